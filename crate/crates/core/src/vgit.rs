//! Variation along a segment `L_t = L₀^{1−t} ⊗ L₁^t`: exact walls, chambers,
//! the semi-continuity check and M(t) profiles.
//!
//! Fix a point and split `C_x` into the selector cones
//! `F_ij = C_x ∩ {<λ, a_i − a> ≤ 0 ∀a ∈ A₀} ∩ {<λ, b_j − b> ≤ 0 ∀b ∈ A₁}`.
//! On `F_ij` the weight is `μ_t(λ) = −<λ, (1−t)a_i + t b_j>`, so both status
//! tests (strict feasibility for Unstable, nontriviality of
//! `C_x ∩ {μ_t ≤ 0}` for not-Stable) depend only on the signs of the affine
//! functions `t ↦ <r, (1−t)a_i + t b_j>` over the generators `r` of `F_ij`.
//! Their roots in `(0, 1)` are the candidate walls, and statuses are constant
//! between consecutive candidates.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use crate::exec::{try_map_slice, EvalOptions, HmPolicy};
use crate::git::{
    check_sanctioned, combined_weights, m_function, status_from_weights, GitError, MValue, Status,
};
use crate::polyhedra::RationalCone;
use crate::rat::{dot, from_ints, int, sub, Rat, RatVec};
use crate::scene::{LinCombo, Scene, WeightedPoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VgitError {
    #[error(transparent)]
    Git(#[from] GitError),
    #[error(
        "chamber ({lower}, {upper}): status of {point:?} differs between interior samples; \
         wall candidates are incomplete"
    )]
    Certification {
        lower: String,
        upper: String,
        point: String,
    },
}

/// A semistable locus paired with the stable locus inside it, both as sorted
/// point names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Locus {
    pub semistable: Vec<String>,
    pub stable: Vec<String>,
}

impl Locus {
    pub fn from_statuses(statuses: &BTreeMap<String, Status>) -> Self {
        let mut l = Locus::default();
        for (name, s) in statuses {
            if s.is_semistable() {
                l.semistable.push(name.clone());
            }
            if s.is_stable() {
                l.stable.push(name.clone());
            }
        }
        l
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chamber {
    pub lower: Rat,
    pub upper: Rat,
    /// Interior point at which `statuses` were evaluated.
    pub sample: Rat,
    pub statuses: BTreeMap<String, Status>,
    pub locus: Locus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlicePoint {
    pub t: Rat,
    pub statuses: BTreeMap<String, Status>,
    pub locus: Locus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChamberReport {
    pub from: String,
    pub to: String,
    /// Strictly increasing, in `(0, 1)`; each changes some status.
    pub walls: Vec<Rat>,
    /// Candidates at which no status changes.
    pub spurious_candidates: Vec<Rat>,
    pub chambers: Vec<Chamber>,
    /// Statuses exactly on each wall, aligned with `walls`.
    pub on_walls: Vec<SlicePoint>,
    pub start: SlicePoint,
    pub end: SlicePoint,
}

impl ChamberReport {
    /// Distinct loci over endpoints, walls and chamber interiors.
    pub fn distinct_loci(&self) -> BTreeSet<Locus> {
        let mut out = BTreeSet::new();
        out.insert(self.start.locus.clone());
        out.insert(self.end.locus.clone());
        out.extend(self.on_walls.iter().map(|w| w.locus.clone()));
        out.extend(self.chambers.iter().map(|c| c.locus.clone()));
        out
    }
}

fn dedup_weights(chars: &[Vec<i64>]) -> Vec<RatVec> {
    let set: BTreeSet<RatVec> = chars.iter().map(|c| from_ints(c)).collect();
    set.into_iter().collect()
}

/// Roots in `(0, 1)` of the sign functions that govern the point's status
/// along the segment.
pub fn candidate_walls(
    scene: &Scene,
    point: &WeightedPoint,
    from: &str,
    to: &str,
) -> Result<BTreeSet<Rat>, GitError> {
    let missing = |lin: &str| GitError::MissingWeights {
        point: point.name.clone(),
        lin: lin.to_string(),
    };
    let a0 = dedup_weights(point.weights.get(from).ok_or_else(|| missing(from))?);
    let a1 = dedup_weights(point.weights.get(to).ok_or_else(|| missing(to))?);
    let mut out = BTreeSet::new();
    if from == to {
        return Ok(out);
    }
    let base = scene.stratum_chars(&point.stratum);
    for ai in &a0 {
        for bj in &a1 {
            let mut normals = base.clone();
            normals.extend(a0.iter().map(|a| sub(a, ai)));
            normals.extend(a1.iter().map(|b| sub(b, bj)));
            let f = RationalCone::from_normals(scene.rank(), &normals)
                .expect("scene validation guarantees matching lengths");
            for r in f.conic_generators() {
                let at0 = dot(&r, ai);
                let at1 = dot(&r, bj);
                let slope = &at1 - &at0;
                if slope.is_zero() {
                    continue;
                }
                let t = -&at0 / slope;
                if t.is_positive() && t < Rat::one() {
                    out.insert(t);
                }
            }
        }
    }
    Ok(out)
}

fn point_status(
    scene: &Scene,
    point: &WeightedPoint,
    from: &str,
    to: &str,
    t: &Rat,
) -> Result<Status, GitError> {
    let combo = LinCombo::segment(from, to, t).expect("t lies in [0, 1]");
    let w = combined_weights(point, &combo)?;
    Ok(status_from_weights(
        scene.rank(),
        &scene.stratum_chars(&point.stratum),
        &w,
    ))
}

/// Statuses of every point at each `t` in `ts`; one map per `t`.
pub fn statuses_at(
    scene: &Scene,
    from: &str,
    to: &str,
    ts: &[Rat],
    opts: EvalOptions,
) -> Result<Vec<BTreeMap<String, Status>>, GitError> {
    for l in [from, to] {
        check_sanctioned(scene, &LinCombo::single(l), opts.policy)?;
    }
    let per_point: Vec<Vec<Status>> = try_map_slice(opts.execution, scene.points(), |p| {
        ts.iter()
            .map(|t| point_status(scene, p, from, to, t))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok((0..ts.len())
        .map(|k| {
            scene
                .points()
                .iter()
                .zip(&per_point)
                .map(|(p, s)| (p.name.clone(), s[k]))
                .collect()
        })
        .collect())
}

/// Loci at `t = k/grid` for `k = 0..=grid`.
pub fn loci_at_grid(
    scene: &Scene,
    from: &str,
    to: &str,
    grid: u64,
    opts: EvalOptions,
) -> Result<Vec<Locus>, GitError> {
    let ts: Vec<Rat> = (0..=grid)
        .map(|k| Rat::new((k as i64).into(), (grid as i64).into()))
        .collect();
    Ok(statuses_at(scene, from, to, &ts, opts)?
        .iter()
        .map(Locus::from_statuses)
        .collect())
}

pub fn chamber_decomposition(
    scene: &Scene,
    from: &str,
    to: &str,
    opts: EvalOptions,
) -> Result<ChamberReport, VgitError> {
    for l in [from, to] {
        check_sanctioned(scene, &LinCombo::single(l), opts.policy)?;
    }
    let inner = EvalOptions {
        policy: HmPolicy::AllowNumerical,
        ..opts
    };
    let per_point = try_map_slice(opts.execution, scene.points(), |p| {
        candidate_walls(scene, p, from, to)
    })?;
    let candidates: Vec<Rat> = per_point
        .into_iter()
        .flatten()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    // breakpoints 0 = c_0 < c_1 < ... < c_k < c_{k+1} = 1
    let mut bounds = vec![Rat::zero()];
    bounds.extend(candidates.iter().cloned());
    bounds.push(Rat::one());
    let mids: Vec<Rat> = bounds
        .windows(2)
        .map(|w| (&w[0] + &w[1]) / int(2))
        .collect();
    let mut ts = Vec::with_capacity(bounds.len() + mids.len());
    ts.extend(bounds.iter().cloned());
    ts.extend(mids.iter().cloned());
    let sts = statuses_at(scene, from, to, &ts, inner)?;
    let (at_bounds, at_mids) = sts.split_at(bounds.len());

    let mut walls = Vec::new();
    let mut spurious = Vec::new();
    let mut on_walls = Vec::new();
    let mut kept_idx = Vec::new();
    for (k, c) in candidates.iter().enumerate() {
        let here = &at_bounds[k + 1];
        let left = &at_mids[k];
        let right = &at_mids[k + 1];
        if here != left || here != right {
            walls.push(c.clone());
            kept_idx.push(k + 1);
            on_walls.push(SlicePoint {
                t: c.clone(),
                statuses: here.clone(),
                locus: Locus::from_statuses(here),
            });
        } else {
            spurious.push(c.clone());
        }
    }

    let mut edges = vec![0usize];
    edges.extend(kept_idx.iter().copied());
    edges.push(bounds.len() - 1);
    let mut chambers = Vec::new();
    let mut checks: Vec<Rat> = Vec::new();
    for e in edges.windows(2) {
        let (lo, hi) = (&bounds[e[0]], &bounds[e[1]]);
        let width = hi - lo;
        checks.push(lo + &width / int(3));
        checks.push(lo + &width * int(2) / int(3));
        let statuses = at_mids[e[0]].clone();
        chambers.push(Chamber {
            lower: lo.clone(),
            upper: hi.clone(),
            sample: mids[e[0]].clone(),
            locus: Locus::from_statuses(&statuses),
            statuses,
        });
    }
    let certs = statuses_at(scene, from, to, &checks, inner)?;
    for (i, ch) in chambers.iter().enumerate() {
        for s in &certs[2 * i..2 * i + 2] {
            if let Some((name, _)) = s.iter().find(|(n, st)| ch.statuses[*n] != **st) {
                return Err(VgitError::Certification {
                    lower: crate::rat::fmt_rat(&ch.lower),
                    upper: crate::rat::fmt_rat(&ch.upper),
                    point: name.clone(),
                });
            }
        }
    }

    let slice = |i: usize| SlicePoint {
        t: bounds[i].clone(),
        statuses: at_bounds[i].clone(),
        locus: Locus::from_statuses(&at_bounds[i]),
    };
    Ok(ChamberReport {
        from: from.to_string(),
        to: to.to_string(),
        walls,
        spurious_candidates: spurious,
        chambers,
        on_walls,
        start: slice(0),
        end: slice(bounds.len() - 1),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Which inclusion failed, e.g. `"s(L0) ⊆ s(Lt)"`.
    pub inclusion: String,
    pub point: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemicontinuityReport {
    pub holds: bool,
    /// The chamber `(0, first wall)` used as the "small t" interval.
    pub witness_chamber: (Rat, Rat),
    pub t: Rat,
    pub stable_start: Vec<String>,
    pub stable_t: Vec<String>,
    pub semistable_t: Vec<String>,
    pub semistable_start: Vec<String>,
    pub violations: Vec<Violation>,
}

/// Checks `X^s(L₀) ⊆ X^s(L_t) ⊆ X^ss(L_t) ⊆ X^ss(L₀)` for `t` in the first
/// chamber.
pub fn check_semicontinuity(
    scene: &Scene,
    from: &str,
    to: &str,
    opts: EvalOptions,
) -> Result<SemicontinuityReport, VgitError> {
    let report = chamber_decomposition(scene, from, to, opts)?;
    let first = &report.chambers[0];
    let s0 = &report.start.locus;
    let st = &first.locus;
    let mut violations = Vec::new();
    let mut check = |label: &str, small: &[String], big: &[String]| {
        for p in small {
            if big.binary_search(p).is_err() {
                violations.push(Violation {
                    inclusion: label.to_string(),
                    point: p.clone(),
                });
            }
        }
    };
    check("s(L0) ⊆ s(Lt)", &s0.stable, &st.stable);
    check("s(Lt) ⊆ ss(Lt)", &st.stable, &st.semistable);
    check("ss(Lt) ⊆ ss(L0)", &st.semistable, &s0.semistable);
    Ok(SemicontinuityReport {
        holds: violations.is_empty(),
        witness_chamber: (first.lower.clone(), first.upper.clone()),
        t: first.sample.clone(),
        stable_start: s0.stable.clone(),
        stable_t: st.stable.clone(),
        semistable_t: st.semistable.clone(),
        semistable_start: s0.semistable.clone(),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MProfile {
    pub samples: Vec<(Rat, MValue)>,
    /// `|M(t_mid) − (M(t_a) + M(t_b))/2|` per consecutive pair; `None` when a
    /// value is infinite.
    pub defects: Vec<Option<f64>>,
}

pub fn m_profile(
    scene: &Scene,
    point: &WeightedPoint,
    from: &str,
    to: &str,
    ts: &[Rat],
    policy: HmPolicy,
) -> Result<MProfile, GitError> {
    let at = |t: &Rat| -> Result<MValue, GitError> {
        let combo =
            LinCombo::segment(from, to, t).map_err(|e| GitError::UnknownLinearization(e.0))?;
        m_function(scene, point, &combo, policy)
    };
    let mut samples = Vec::with_capacity(ts.len());
    for t in ts {
        samples.push((t.clone(), at(t)?));
    }
    let mut defects = Vec::new();
    for w in samples.windows(2) {
        let mid = (&w[0].0 + &w[1].0) / int(2);
        let mm = at(&mid)?;
        let vals = [w[0].1.as_f64(), w[1].1.as_f64(), mm.as_f64()];
        defects.push(if vals.iter().all(|v| v.is_finite()) {
            Some((vals[2] - 0.5 * (vals[0] + vals[1])).abs())
        } else {
            None
        });
    }
    Ok(MProfile { samples, defects })
}
