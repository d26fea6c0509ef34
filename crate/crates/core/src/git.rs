//! Hilbert–Mumford weights, the limit cone `C_x`, the M-function and the
//! numerical (semi)stability status.
//!
//! For `λ ∈ C_x` the weight is `μ(x, λ) = −min { <λ, χ> : χ ∈ Γ_x }` where
//! `Γ_x = ⋃ (χ_i + monoid(I))`. Every monoid element pairs nonnegatively with
//! `λ ∈ C_x` and the monoid contains 0, so the minimum is attained on the
//! finite set `{χ_i}`; outside `C_x` some base character pairs negatively and
//! μ is `+∞`. All functions below work with that finite reduction.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_traits::Zero;

use crate::exec::HmPolicy;
use crate::polyhedra::linalg::{canonical_span, nullspace, orthogonal_basis, project, rank};
use crate::polyhedra::{
    lp_feasible, satisfies_all, Constraint, Feasibility, PolyError, RationalCone,
};
use crate::rat::{
    dot, fmt_rat, from_ints, int, is_zero, neg, norm_sq, primitive_rat, sub, Rat, RatVec,
    SignedSqrtRatio,
};
use crate::scene::{Character, LinCombo, Scene, WeightedPoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GitError {
    #[error("point {point:?} has no weights for linearization {lin:?}")]
    MissingWeights { point: String, lin: String },
    #[error("unknown linearization {0:?}")]
    UnknownLinearization(String),
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error(
        "linearization {0:?} is not flagged hm_sanctioned; the sign of M does not \
         decide stability for it (pass the numerical override to compute anyway)"
    )]
    NotSanctioned(String),
    #[error("cocharacter has length {found}, scene rank is {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A Hilbert–Mumford weight: a rational number or `+∞` (no limit exists).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum MuValue {
    Finite(Rat),
    PlusInfinity,
}

impl MuValue {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            MuValue::Finite(r) => Some(r),
            MuValue::PlusInfinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, MuValue::PlusInfinity)
    }

    pub fn render(&self) -> String {
        match self {
            MuValue::Finite(r) => fmt_rat(r),
            MuValue::PlusInfinity => "+inf".to_string(),
        }
    }
}

impl Ord for MuValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (MuValue::Finite(a), MuValue::Finite(b)) => a.cmp(b),
            (MuValue::Finite(_), MuValue::PlusInfinity) => Ordering::Less,
            (MuValue::PlusInfinity, MuValue::Finite(_)) => Ordering::Greater,
            (MuValue::PlusInfinity, MuValue::PlusInfinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for MuValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Unstable,
    StrictlySemistable,
    Stable,
}

impl Status {
    pub fn is_semistable(self) -> bool {
        self != Status::Unstable
    }

    pub fn is_stable(self) -> bool {
        self == Status::Stable
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Unstable => "Unstable",
            Status::StrictlySemistable => "StrictlySemistable",
            Status::Stable => "Stable",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Value of the M-function. `Finite` carries the exact certificate
/// `value = mu_star / sqrt(norm_sq)` attained at `minimizer`.
#[derive(Debug, Clone, PartialEq)]
pub enum MValue {
    PlusInfinity,
    Finite {
        value: f64,
        mu_star: Rat,
        norm_sq: Rat,
        minimizer: RatVec,
    },
}

impl MValue {
    pub fn certificate(&self) -> Option<SignedSqrtRatio> {
        match self {
            MValue::PlusInfinity => None,
            MValue::Finite {
                mu_star, norm_sq, ..
            } => Some(SignedSqrtRatio::new(mu_star.clone(), norm_sq.clone())),
        }
    }

    /// Status implied by the sign of the certificate (`+∞` counts as
    /// positive).
    pub fn sign_status(&self) -> Status {
        match self {
            MValue::PlusInfinity => Status::Stable,
            MValue::Finite { mu_star, .. } => match mu_star.cmp(&Rat::zero()) {
                Ordering::Less => Status::Unstable,
                Ordering::Equal => Status::StrictlySemistable,
                Ordering::Greater => Status::Stable,
            },
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            MValue::PlusInfinity => f64::INFINITY,
            MValue::Finite { value, .. } => *value,
        }
    }
}

/// `C_x = {λ : <λ, χ> ≥ 0 for χ ∈ I}`, with generators.
pub fn cone_cx(scene: &Scene, point: &WeightedPoint) -> RationalCone {
    RationalCone::from_normals(scene.rank(), &scene.stratum_chars(&point.stratum))
        .expect("scene validation guarantees matching lengths")
}

/// Refuses combos touching a linearization without the sanction flag unless
/// the policy allows numerical-only results.
pub fn check_sanctioned(scene: &Scene, combo: &LinCombo, policy: HmPolicy) -> Result<(), GitError> {
    for name in combo.names() {
        let lin = scene
            .linearization(name)
            .ok_or_else(|| GitError::UnknownLinearization(name.to_string()))?;
        if !lin.hm_sanctioned && policy == HmPolicy::RequireSanctioned {
            return Err(GitError::NotSanctioned(name.to_string()));
        }
    }
    Ok(())
}

fn weights_for<'a>(point: &'a WeightedPoint, lin: &str) -> Result<&'a [Character], GitError> {
    point
        .weights
        .get(lin)
        .map(Vec::as_slice)
        .ok_or_else(|| GitError::MissingWeights {
            point: point.name.clone(),
            lin: lin.to_string(),
        })
}

/// `B_t = {(1−t)a + t b : a ∈ A₀, b ∈ A₁}`, sorted and deduplicated. For
/// `λ ∈ C_x`, `−min_{w∈B_t} <λ, w> = (1−t)μ^{L₀}(x, λ) + t μ^{L₁}(x, λ)`.
pub fn combined_weights(point: &WeightedPoint, combo: &LinCombo) -> Result<Vec<RatVec>, GitError> {
    let mut acc: BTreeSet<RatVec> = BTreeSet::new();
    let mut first = true;
    for (name, coeff) in combo.terms() {
        let a = weights_for(point, name)?;
        let scaled: Vec<RatVec> = a
            .iter()
            .map(|c| from_ints(c).into_iter().map(|x| x * coeff).collect())
            .collect();
        if first {
            acc = scaled.into_iter().collect();
            first = false;
        } else {
            let mut next = BTreeSet::new();
            for u in &acc {
                for v in &scaled {
                    next.insert(u.iter().zip(v).map(|(x, y)| x + y).collect());
                }
            }
            acc = next;
        }
    }
    Ok(acc.into_iter().collect())
}

/// μ of a finite weight set on the cone `{<λ, h> ≥ 0}`.
pub fn mu_from_weights(normals: &[RatVec], weights: &[RatVec], lambda: &[Rat]) -> MuValue {
    if !satisfies_all(lambda, normals) {
        return MuValue::PlusInfinity;
    }
    let min = weights
        .iter()
        .map(|w| dot(lambda, w))
        .min()
        .expect("weight sets are non-empty");
    MuValue::Finite(-min)
}

pub fn mu(
    scene: &Scene,
    point: &WeightedPoint,
    combo: &LinCombo,
    lambda: &[Rat],
) -> Result<MuValue, GitError> {
    if lambda.len() != scene.rank() {
        return Err(GitError::RankMismatch {
            expected: scene.rank(),
            found: lambda.len(),
        });
    }
    let weights = combined_weights(point, combo)?;
    Ok(mu_from_weights(
        &scene.stratum_chars(&point.stratum),
        &weights,
        lambda,
    ))
}

/// Members of `Γ_x` reachable with at most `degree_bound` monoid generators:
/// `{χ_i + Σ a_χ χ : a_χ ≥ 0, Σ a_χ ≤ degree_bound}`.
pub fn gamma_x_members(
    scene: &Scene,
    point: &WeightedPoint,
    lin: &str,
    degree_bound: usize,
) -> Result<BTreeSet<Character>, GitError> {
    let a = weights_for(point, lin)?;
    let gens = scene.stratum_ints(&point.stratum);
    let rank = scene.rank();
    let mut layer: BTreeSet<Character> = BTreeSet::from([vec![0; rank]]);
    let mut monoid = layer.clone();
    for _ in 0..degree_bound {
        let mut next = BTreeSet::new();
        for m in &layer {
            for g in &gens {
                next.insert(m.iter().zip(g).map(|(x, y)| x + y).collect::<Character>());
            }
        }
        monoid.extend(next.iter().cloned());
        layer = next;
    }
    let mut out = BTreeSet::new();
    for chi in a {
        for m in &monoid {
            out.insert(chi.iter().zip(m).map(|(x, y)| x + y).collect());
        }
    }
    Ok(out)
}

/// Status of a finite weight set on the cone `C = {<λ, h> ≥ 0}`.
///
/// Unstable iff some `λ ∈ C` has `<λ, w> > 0` for every weight; the system is
/// homogeneous so the strict inequalities become `≥ 1`. Stable iff
/// `C ∩ {<λ, w> ≥ 0 ∀w} = {0}`.
pub fn status_from_weights(rank: usize, normals: &[RatVec], weights: &[RatVec]) -> Status {
    let mut cons: Vec<Constraint> = normals
        .iter()
        .map(|h| Constraint::ge(h.clone(), Rat::zero()))
        .collect();
    cons.extend(weights.iter().map(|w| Constraint::ge(w.clone(), int(1))));
    if lp_feasible(&cons)
        .expect("lengths checked by caller")
        .is_feasible()
    {
        return Status::Unstable;
    }
    let all: Vec<RatVec> = normals.iter().chain(weights).cloned().collect();
    let k = RationalCone::from_normals(rank, &all).expect("lengths checked by caller");
    if k.is_zero_cone() {
        Status::Stable
    } else {
        Status::StrictlySemistable
    }
}

pub fn status(
    scene: &Scene,
    point: &WeightedPoint,
    combo: &LinCombo,
    policy: HmPolicy,
) -> Result<Status, GitError> {
    check_sanctioned(scene, combo, policy)?;
    let weights = combined_weights(point, combo)?;
    Ok(status_from_weights(
        scene.rank(),
        &scene.stratum_chars(&point.stratum),
        &weights,
    ))
}

pub fn m_function(
    scene: &Scene,
    point: &WeightedPoint,
    combo: &LinCombo,
    policy: HmPolicy,
) -> Result<MValue, GitError> {
    check_sanctioned(scene, combo, policy)?;
    let weights = combined_weights(point, combo)?;
    Ok(m_from_weights(
        scene.rank(),
        &scene.stratum_chars(&point.stratum),
        &weights,
    ))
}

/// `inf_{λ ∈ C∖0} μ(λ)/‖λ‖` for `μ(λ) = −min_w <λ, w>` on `C = {<λ, h> ≥ 0}`.
///
/// `C` is covered by the selector cones
/// `F_w = C ∩ {<λ, w' − w> ≥ 0 ∀w'}` on which μ is the linear form
/// `−<λ, w>`. A minimiser of `−<λ, w>/‖λ‖` over `F_w` lies in the relative
/// interior of some face, where it is a critical point on the unit sphere of
/// the face's span `V`: a multiple of `±proj_V(w)`, or anything in `V` when
/// that projection vanishes. Face spans are kernels of at most `rank − 1`
/// tight constraints, so enumerating those kernels and keeping candidates
/// inside `F_w` finds the minimum exactly.
pub fn m_from_weights(rank: usize, normals: &[RatVec], weights: &[RatVec]) -> MValue {
    let cone = RationalCone::from_normals(rank, normals).expect("lengths checked by caller");
    if cone.is_zero_cone() {
        return MValue::PlusInfinity;
    }
    let base: Vec<RatVec> = cone.h_rep().to_vec();

    let mut best: Option<(SignedSqrtRatio, RatVec)> = None;
    for w in weights {
        let mut cons = base.clone();
        for w2 in weights {
            let d = sub(w2, w);
            if !is_zero(&d) {
                cons.push(d);
            }
        }
        for span in face_spans(rank, &cons) {
            let ortho = orthogonal_basis(&span);
            let p = project(w, &ortho);
            let dirs: Vec<RatVec> = if is_zero(&p) {
                span.iter().flat_map(|b| [b.clone(), neg(b)]).collect()
            } else {
                vec![p.clone(), neg(&p)]
            };
            for d in dirs {
                if !satisfies_all(&d, &cons) {
                    continue;
                }
                let lam = primitive_rat(&d);
                let val = SignedSqrtRatio::new(-dot(&lam, w), norm_sq(&lam));
                let replace = match &best {
                    None => true,
                    // ties go to the lexicographically largest direction
                    Some((bv, bl)) => val < *bv || (val == *bv && lam > *bl),
                };
                if replace {
                    best = Some((val, lam));
                }
            }
        }
    }
    let (val, minimizer) = best.expect("a nonzero cone has a nonzero face");
    MValue::Finite {
        value: val.to_f64(),
        mu_star: val.num,
        norm_sq: val.den,
        minimizer,
    }
}

/// Distinct nonzero kernels of linearly independent subsets of `cons` with at
/// most `rank − 1` elements, each as a canonical basis.
fn face_spans(dim: usize, cons: &[RatVec]) -> BTreeSet<Vec<RatVec>> {
    let mut out = BTreeSet::new();
    let mut chosen: Vec<RatVec> = Vec::new();
    collect_spans(dim, cons, 0, &mut chosen, &mut out);
    out
}

fn collect_spans(
    dim: usize,
    cons: &[RatVec],
    start: usize,
    chosen: &mut Vec<RatVec>,
    out: &mut BTreeSet<Vec<RatVec>>,
) {
    let ns = nullspace(chosen, dim);
    if ns.is_empty() {
        return;
    }
    out.insert(canonical_span(&ns, dim));
    if chosen.len() + 1 >= dim {
        return;
    }
    for i in start..cons.len() {
        chosen.push(cons[i].clone());
        if rank(chosen, dim) == chosen.len() {
            collect_spans(dim, cons, i + 1, chosen, out);
        }
        chosen.pop();
    }
}

/// Checks `λ ∈ C` and returns the strict-feasibility witness direction for
/// an unstable weight set, if any (`<λ, w> ≥ 1` for all `w`).
pub fn destabilizing_direction(normals: &[RatVec], weights: &[RatVec]) -> Option<RatVec> {
    let mut cons: Vec<Constraint> = normals
        .iter()
        .map(|h| Constraint::ge(h.clone(), Rat::zero()))
        .collect();
    cons.extend(weights.iter().map(|w| Constraint::ge(w.clone(), int(1))));
    match lp_feasible(&cons).ok()? {
        Feasibility::Feasible(x) => Some(x),
        Feasibility::Infeasible => None,
    }
}

/// Convenience: `μ/‖λ‖` for a direction inside the cone.
pub fn normalized_mu(
    normals: &[RatVec],
    weights: &[RatVec],
    lambda: &[Rat],
) -> Option<SignedSqrtRatio> {
    if is_zero(lambda) {
        return None;
    }
    match mu_from_weights(normals, weights, lambda) {
        MuValue::Finite(m) => Some(SignedSqrtRatio::new(m, norm_sq(lambda))),
        MuValue::PlusInfinity => None,
    }
}
