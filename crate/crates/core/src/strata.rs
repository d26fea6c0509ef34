//! Base strata: the closed-orbit criterion, the subtori `G_I`, the
//! fix-or-no-limit dichotomy for one-parameter subgroups, the component form
//! of μ, point fingerprints and the finiteness audit of possible loci.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};

use crate::exec::{EvalOptions, HmPolicy};
use crate::git::{check_sanctioned, GitError, MuValue};
use crate::polyhedra::{integer_kernel, lp_feasible, relint_contains_zero, Constraint, PolyError};
use crate::rat::{dot, from_ints, int, Rat, RatVec};
use crate::scene::{Character, LinCombo, Scene, WeightedPoint};
use crate::vgit::{loci_at_grid, Locus};

/// A connected component `Y` of the fixed locus over a closed-orbit stratum,
/// with a representative character `c_Y` per linearization so that the
/// fibre weight is `w^L(Y, λ) = <λ, c_Y>` for `λ ∈ L_I^⊥`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedComponent {
    pub id: String,
    pub stratum: Vec<usize>,
    pub c: BTreeMap<String, Character>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StrataError {
    #[error("stratum is not a closed-orbit stratum; the fix-or-no-limit dichotomy does not apply")]
    NotClosedOrbit,
    #[error("one-parameter subgroup must be nonzero")]
    ZeroLambda,
    #[error("cocharacter has length {found}, scene rank is {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("point {0:?} carries no fixed-component annotations")]
    NoComponents(String),
    #[error(
        "component {component:?}: λ does not fix its stratum (not in L_I^⊥), so its \
         fibre weight is undefined"
    )]
    ModelConsistency { component: String },
    #[error("component {component:?} has no character for linearization {lin:?}")]
    MissingComponentWeight { component: String, lin: String },
    #[error(transparent)]
    Git(#[from] GitError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Whether the base orbit over the stratum is closed: `0` lies in the
/// relative interior of the convex hull of `I`. The empty stratum is a fixed
/// base point.
pub fn is_closed_orbit_stratum(chars: &[Character]) -> bool {
    if chars.is_empty() {
        return true;
    }
    let pts: Vec<RatVec> = chars.iter().map(|c| from_ints(c)).collect();
    relint_contains_zero(&pts).expect("characters share the scene rank")
}

/// Cocharacter lattice of the subtorus `G_I`, i.e. `L_I^⊥ ∩ ℤ^rank`.
pub fn subtorus_gi(rank: usize, chars: &[Character]) -> Result<Vec<Character>, StrataError> {
    Ok(integer_kernel(rank, chars)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaClass {
    /// `λ ∈ L_I^⊥`: λ fixes the base point.
    Fixes,
    /// The limit `λ(t)·s` as `t → 0` does not exist.
    NoLimit,
}

pub fn classify_lambda(
    rank: usize,
    chars: &[Character],
    lambda: &[i64],
) -> Result<LambdaClass, StrataError> {
    if lambda.len() != rank {
        return Err(StrataError::RankMismatch {
            expected: rank,
            found: lambda.len(),
        });
    }
    if lambda.iter().all(|&x| x == 0) {
        return Err(StrataError::ZeroLambda);
    }
    if !is_closed_orbit_stratum(chars) {
        return Err(StrataError::NotClosedOrbit);
    }
    let fixes = chars.iter().all(|c| pair(lambda, c) == 0);
    Ok(if fixes {
        LambdaClass::Fixes
    } else {
        LambdaClass::NoLimit
    })
}

fn pair(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `μ^L(x, λ) = −min { w^L(Y, λ) : Y ∈ J }`, or `+∞` when some character of
/// the point's stratum pairs negatively with λ.
pub fn mu_via_components(
    scene: &Scene,
    point: &WeightedPoint,
    lin: &str,
    lambda: &[i64],
) -> Result<MuValue, StrataError> {
    if lambda.len() != scene.rank() {
        return Err(StrataError::RankMismatch {
            expected: scene.rank(),
            found: lambda.len(),
        });
    }
    if point.components.is_empty() {
        return Err(StrataError::NoComponents(point.name.clone()));
    }
    if scene
        .stratum_ints(&point.stratum)
        .iter()
        .any(|c| pair(lambda, c) < 0)
    {
        return Ok(MuValue::PlusInfinity);
    }
    let mut min: Option<i64> = None;
    for id in &point.components {
        let comp = scene
            .component(id)
            .expect("scene validation resolves component ids");
        if scene
            .stratum_ints(&comp.stratum)
            .iter()
            .any(|c| pair(lambda, c) != 0)
        {
            return Err(StrataError::ModelConsistency {
                component: id.clone(),
            });
        }
        let c = comp
            .c
            .get(lin)
            .ok_or_else(|| StrataError::MissingComponentWeight {
                component: id.clone(),
                lin: lin.to_string(),
            })?;
        let w = pair(lambda, c);
        min = Some(min.map_or(w, |m| m.min(w)));
    }
    Ok(MuValue::Finite(int(-min.expect("J is non-empty"))))
}

/// Canonical key of a point's μ-functions over a set of linearizations.
///
/// Weights that are redundant for μ on `C_x` are removed: `χ` is redundant
/// when `χ ∈ conv(A ∖ {χ}) + cone(I)`, since then
/// `<λ, χ> ≥ min_{A∖{χ}} <λ, ·>` for every `λ ∈ C_x`. Removal runs in sorted
/// order so the key is deterministic; equal keys mean equal μ-functions and
/// hence equal statuses under every combination.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fingerprint {
    pub stratum: Vec<usize>,
    pub weights: BTreeMap<String, Vec<RatVec>>,
}

pub fn fingerprint(
    scene: &Scene,
    point: &WeightedPoint,
    lins: &[&str],
) -> Result<Fingerprint, StrataError> {
    let base = scene.stratum_chars(&point.stratum);
    let mut weights = BTreeMap::new();
    for &lin in lins {
        let a = point
            .weights
            .get(lin)
            .ok_or_else(|| GitError::MissingWeights {
                point: point.name.clone(),
                lin: lin.to_string(),
            })?;
        let set: BTreeSet<RatVec> = a.iter().map(|c| from_ints(c)).collect();
        weights.insert(
            lin.to_string(),
            reduce_weights(set.into_iter().collect(), &base),
        );
    }
    Ok(Fingerprint {
        stratum: point.stratum.clone(),
        weights,
    })
}

fn reduce_weights(mut set: Vec<RatVec>, base: &[RatVec]) -> Vec<RatVec> {
    let mut i = 0;
    while i < set.len() {
        if set.len() > 1 && is_redundant(&set[i], &set, i, base) {
            set.remove(i);
        } else {
            i += 1;
        }
    }
    set
}

/// `target = Σ c_j a_j + Σ d_k χ_k` with `c` a probability vector over the
/// other weights and `d ≥ 0`.
fn is_redundant(target: &RatVec, set: &[RatVec], skip: usize, base: &[RatVec]) -> bool {
    let others: Vec<&RatVec> = set
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != skip)
        .map(|(_, v)| v)
        .collect();
    let nc = others.len();
    let nv = nc + base.len();
    let dim = target.len();
    let mut cons = Vec::new();
    for j in 0..dim {
        let row: RatVec = others
            .iter()
            .map(|a| a[j].clone())
            .chain(base.iter().map(|b| b[j].clone()))
            .collect();
        cons.push(Constraint::eq(row, target[j].clone()));
    }
    let mut sum_row = vec![Rat::zero(); nv];
    for x in sum_row.iter_mut().take(nc) {
        *x = int(1);
    }
    cons.push(Constraint::eq(sum_row, int(1)));
    for k in 0..nv {
        let mut row = vec![Rat::zero(); nv];
        row[k] = int(1);
        cons.push(Constraint::ge(row, Rat::zero()));
    }
    lp_feasible(&cons)
        .expect("consistent lengths")
        .is_feasible()
}

/// Result of sampling the segment `[L₀, L₁]` at `t = k/D`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitenessAudit {
    pub grid: u64,
    /// Distinct (semistable, stable) loci seen at `k/D`, `k = 0..=D`.
    pub loci: BTreeSet<Locus>,
    /// Whether the loci at `D` equal those at `2D`.
    pub stabilized: bool,
}

pub fn audit_finiteness(
    scene: &Scene,
    from: &str,
    to: &str,
    grid: u64,
    opts: EvalOptions,
) -> Result<FinitenessAudit, StrataError> {
    assert!(grid >= 1, "grid denominator must be at least 1");
    for l in [from, to] {
        check_sanctioned(scene, &LinCombo::single(l), opts.policy)?;
    }
    let opts = EvalOptions {
        policy: HmPolicy::AllowNumerical,
        ..opts
    };
    let coarse: BTreeSet<Locus> = loci_at_grid(scene, from, to, grid, opts)?
        .into_iter()
        .collect();
    let fine: BTreeSet<Locus> = loci_at_grid(scene, from, to, 2 * grid, opts)?
        .into_iter()
        .collect();
    Ok(FinitenessAudit {
        grid,
        stabilized: coarse == fine,
        loci: coarse,
    })
}

/// Fingerprint classes of all points, keyed by fingerprint, listing point
/// names.
pub fn fingerprint_classes(
    scene: &Scene,
    lins: &[&str],
) -> Result<BTreeMap<Fingerprint, Vec<String>>, StrataError> {
    let mut out: BTreeMap<Fingerprint, Vec<String>> = BTreeMap::new();
    for p in scene.points() {
        out.entry(fingerprint(scene, p, lins)?)
            .or_default()
            .push(p.name.clone());
    }
    Ok(out)
}

/// `true` iff `λ ∈ L_I^⊥` (pairs to zero with every character of `I`).
pub fn in_subtorus(chars: &[Character], lambda: &[i64]) -> bool {
    chars.iter().all(|c| pair(lambda, c) == 0)
}

/// For λ off `L_I^⊥` on a closed stratum, some character pairs negatively,
/// which is exactly the `+∞` branch of μ.
pub fn pairs_negatively(chars: &[Character], lambda: &[i64]) -> bool {
    let l = from_ints(lambda);
    chars.iter().any(|c| dot(&l, &from_ints(c)).is_negative())
}
