//! Cycle-level weights for length-`d` subschemes on an expanded degeneration.
//!
//! A point `z` is modeled by the weight data its torus limits expose: a fan of
//! scenario cones, and on each cone the character `τ` of `∧ⁿH⁰(O_{Z₀})` plus
//! the support `Σ n_p [p]` with characters `c_p`. For the determinant
//! linearizations and the Hilbert–Chow pullback:
//!
//! ```text
//! μ^{L_m}(z, λ) = −<λ, τ_σ> − m Σ n_p <λ, c_{σ,p}>
//! μ^{L_∞}(z, λ) = −Σ n_p <λ, c_{σ,p}>
//! ```
//!
//! Both are `+∞` when `λ` lies in no cone.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::git::{status_from_weights, MuValue, Status};
use crate::polyhedra::{lp_feasible, Constraint, PolyError, RationalCone};
use crate::rat::{axpy, dot, from_ints, int, is_zero, zeros, Rat, RatVec};
use crate::scene::Character;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HilbError {
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("cocharacter has length {found}, expected {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("the zero cocharacter has no weight")]
    ZeroLambda,
    #[error("cycle data differs: {}", .0.join("; "))]
    TwinMismatch(Vec<String>),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> HilbError {
    HilbError::Invalid {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportPoint {
    pub id: String,
    pub multiplicity: u64,
    pub c: Character,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitScenario {
    cone: RationalCone,
    cone_h: Vec<Character>,
    tau: Character,
    support: Vec<SupportPoint>,
    w_inf: RatVec,
}

impl LimitScenario {
    pub fn cone(&self) -> &RationalCone {
        &self.cone
    }

    /// Inequality normals as given.
    pub fn cone_h(&self) -> &[Character] {
        &self.cone_h
    }

    pub fn tau(&self) -> &[i64] {
        &self.tau
    }

    pub fn support(&self) -> &[SupportPoint] {
        &self.support
    }

    /// `Σ n_p c_p`.
    pub fn w_inf(&self) -> &RatVec {
        &self.w_inf
    }

    /// Weight vector of `L_m`: `τ + m·W_∞`, so that `μ = −<λ, ·>`.
    pub fn w_m(&self, m: u64) -> RatVec {
        axpy(&from_ints(&self.tau), &int(m as i64), &self.w_inf)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbPoint {
    name: String,
    d: u64,
    rank: usize,
    scenarios: Vec<LimitScenario>,
}

/// Raw scenario data, validated by [`HilbPoint::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioSpec {
    pub cone_h: Vec<Character>,
    pub tau: Character,
    pub support: Vec<SupportPoint>,
}

impl HilbPoint {
    pub fn new(
        name: impl Into<String>,
        d: u64,
        rank: usize,
        specs: Vec<ScenarioSpec>,
    ) -> Result<Self, HilbError> {
        let name = name.into();
        if rank == 0 {
            return Err(invalid("rank", "must be positive"));
        }
        if specs.is_empty() {
            return Err(invalid("scenarios", "at least one scenario is required"));
        }
        let mut scenarios = Vec::with_capacity(specs.len());
        for (i, s) in specs.into_iter().enumerate() {
            let at = |f: &str| format!("scenarios[{i}].{f}");
            for (k, h) in s.cone_h.iter().enumerate() {
                if h.len() != rank {
                    return Err(invalid(
                        at(&format!("cone_h[{k}]")),
                        format!("length {} != rank {rank}", h.len()),
                    ));
                }
            }
            if s.tau.len() != rank {
                return Err(invalid(
                    at("tau"),
                    format!("length {} != rank {rank}", s.tau.len()),
                ));
            }
            if s.support.is_empty() {
                return Err(invalid(at("support"), "empty"));
            }
            let mut total: u64 = 0;
            let mut w_inf = zeros(rank);
            for (k, p) in s.support.iter().enumerate() {
                if p.multiplicity == 0 {
                    return Err(invalid(
                        at(&format!("support[{k}].n_p")),
                        "must be positive",
                    ));
                }
                if p.c.len() != rank {
                    return Err(invalid(
                        at(&format!("support[{k}].c")),
                        format!("length {} != rank {rank}", p.c.len()),
                    ));
                }
                total += p.multiplicity;
                w_inf = axpy(&w_inf, &int(p.multiplicity as i64), &from_ints(&p.c));
            }
            if total != d {
                return Err(invalid(
                    at("support"),
                    format!("multiplicities sum to {total}, expected d = {d}"),
                ));
            }
            let normals: Vec<RatVec> = s.cone_h.iter().map(|h| from_ints(h)).collect();
            let cone = RationalCone::from_normals(rank, &normals)?;
            if cone.is_zero_cone() {
                return Err(invalid(at("cone_h"), "cone is {0}"));
            }
            scenarios.push(LimitScenario {
                cone,
                cone_h: s.cone_h,
                tau: s.tau,
                support: s.support,
                w_inf,
            });
        }
        for i in 0..scenarios.len() {
            for j in i + 1..scenarios.len() {
                check_pair(rank, &scenarios[i], &scenarios[j]).map_err(|m| {
                    invalid(
                        format!("scenarios[{j}]"),
                        format!("against scenarios[{i}]: {m}"),
                    )
                })?;
            }
        }
        Ok(HilbPoint {
            name,
            d,
            rank,
            scenarios,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn scenarios(&self) -> &[LimitScenario] {
        &self.scenarios
    }

    /// Copy with each scenario's `τ` replaced, same cycle data.
    pub fn with_taus(
        &self,
        name: impl Into<String>,
        taus: &[Character],
    ) -> Result<Self, HilbError> {
        let specs = self
            .scenarios
            .iter()
            .zip(taus)
            .map(|(s, t)| ScenarioSpec {
                cone_h: s.cone_h.clone(),
                tau: t.clone(),
                support: s.support.clone(),
            })
            .collect();
        HilbPoint::new(name, self.d, self.rank, specs)
    }

    fn scenario_of(&self, lambda: &[Rat]) -> Result<Option<&LimitScenario>, HilbError> {
        if lambda.len() != self.rank {
            return Err(HilbError::RankMismatch {
                expected: self.rank,
                found: lambda.len(),
            });
        }
        if is_zero(lambda) {
            return Err(HilbError::ZeroLambda);
        }
        Ok(self.scenarios.iter().find(|s| s.cone.contains(lambda)))
    }
}

/// The relative interior by homogeneity: normals vanishing on every
/// generator are implicit equalities, the rest become `≥ 1`.
fn relint_constraints(s: &LimitScenario) -> Vec<Constraint> {
    let gens = s.cone.conic_generators();
    s.cone
        .h_rep()
        .iter()
        .map(|h| {
            if gens.iter().all(|g| dot(g, h).is_zero()) {
                Constraint::eq(h.clone(), Rat::zero())
            } else {
                Constraint::ge(h.clone(), Rat::one())
            }
        })
        .collect()
}

fn check_pair(rank: usize, a: &LimitScenario, b: &LimitScenario) -> Result<(), String> {
    let mut cons = relint_constraints(a);
    cons.extend(relint_constraints(b));
    // two full spaces, or both H-reps empty
    if cons.is_empty() || lp_feasible(&cons).map_err(|e| e.to_string())?.is_feasible() {
        return Err("relative interiors overlap".into());
    }
    let normals: Vec<RatVec> = a
        .cone
        .h_rep()
        .iter()
        .chain(b.cone.h_rep())
        .cloned()
        .collect();
    let shared = RationalCone::from_normals(rank, &normals).map_err(|e| e.to_string())?;
    let tau_a = from_ints(&a.tau);
    let tau_b = from_ints(&b.tau);
    for g in shared.conic_generators() {
        if dot(&g, &tau_a) != dot(&g, &tau_b) {
            return Err(format!("tau disagrees on shared generator {}", fmt_vec(&g)));
        }
        if dot(&g, &a.w_inf) != dot(&g, &b.w_inf) {
            return Err(format!(
                "support weight disagrees on shared generator {}",
                fmt_vec(&g)
            ));
        }
    }
    Ok(())
}

fn fmt_vec(v: &[Rat]) -> String {
    let parts: Vec<String> = v.iter().map(crate::rat::fmt_rat).collect();
    format!("({})", parts.join(","))
}

pub fn mu_lm(z: &HilbPoint, lambda: &[Rat], m: u64) -> Result<MuValue, HilbError> {
    Ok(match z.scenario_of(lambda)? {
        None => MuValue::PlusInfinity,
        Some(s) => MuValue::Finite(-dot(lambda, &s.w_m(m))),
    })
}

/// `μ^{L_m}/m`.
pub fn mu_lm_normalized(z: &HilbPoint, lambda: &[Rat], m: u64) -> Result<MuValue, HilbError> {
    Ok(match mu_lm(z, lambda, m)? {
        MuValue::Finite(v) => MuValue::Finite(v / int(m as i64)),
        MuValue::PlusInfinity => MuValue::PlusInfinity,
    })
}

pub fn mu_linf(z: &HilbPoint, lambda: &[Rat]) -> Result<MuValue, HilbError> {
    Ok(match z.scenario_of(lambda)? {
        None => MuValue::PlusInfinity,
        Some(s) => MuValue::Finite(-dot(lambda, &s.w_inf)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvergenceRow {
    pub lambda: RatVec,
    pub m: u64,
    pub normalized: MuValue,
    pub limit: MuValue,
    /// `normalized − limit` when both are finite.
    pub residual: Option<Rat>,
    /// `−<λ, τ_σ>/m` when `λ` has a scenario.
    pub expected: Option<Rat>,
    pub ok: bool,
}

pub fn convergence_report(
    z: &HilbPoint,
    lambdas: &[RatVec],
    ms: &[u64],
) -> Result<Vec<ConvergenceRow>, HilbError> {
    let mut rows = Vec::with_capacity(lambdas.len() * ms.len());
    for lambda in lambdas {
        let sc = z.scenario_of(lambda)?;
        for &m in ms {
            let normalized = mu_lm_normalized(z, lambda, m)?;
            let limit = mu_linf(z, lambda)?;
            let residual = match (&normalized, &limit) {
                (MuValue::Finite(a), MuValue::Finite(b)) => Some(a - b),
                _ => None,
            };
            let expected = sc.map(|s| -dot(lambda, &from_ints(&s.tau)) / int(m as i64));
            let ok = match (&residual, &expected) {
                (Some(r), Some(e)) => r == e,
                (None, None) => normalized.is_infinite() && limit.is_infinite(),
                _ => false,
            };
            rows.push(ConvergenceRow {
                lambda: lambda.clone(),
                m,
                normalized,
                limit,
                residual,
                expected,
                ok,
            });
        }
    }
    Ok(rows)
}

fn combine(statuses: impl Iterator<Item = Status>) -> Status {
    let mut all_stable = true;
    for s in statuses {
        match s {
            Status::Unstable => return Status::Unstable,
            Status::StrictlySemistable => all_stable = false,
            Status::Stable => {}
        }
    }
    if all_stable {
        Status::Stable
    } else {
        Status::StrictlySemistable
    }
}

fn status_with(z: &HilbPoint, weight: impl Fn(&LimitScenario) -> RatVec) -> Status {
    combine(
        z.scenarios
            .iter()
            .map(|s| status_from_weights(z.rank, s.cone.h_rep(), &[weight(s)])),
    )
}

pub fn status_linf(z: &HilbPoint) -> Status {
    status_with(z, |s| s.w_inf.clone())
}

pub fn status_lm(z: &HilbPoint, m: u64) -> Status {
    status_with(z, |s| s.w_m(m))
}

/// Where the `L_m` status settles as `m` grows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Threshold {
    /// Smallest `m` from which `status_lm` is constant.
    pub stable_from: u64,
    /// Smallest `m` from which `status_lm` equals `status_linf`; `None` when
    /// the eventual status differs from the `L_∞` status, which can only
    /// happen when the latter is strictly semistable.
    pub agrees_from: Option<u64>,
    pub tail_status: Status,
    pub linf_status: Status,
}

/// Roots in `t = 1/m ∈ (0, 1]` of `<g, tτ + W_∞>` over the generators `g` of
/// every scenario cone. Statuses are constant for `1/m` below the least root.
pub fn status_threshold(z: &HilbPoint) -> Threshold {
    let mut t_min: Option<Rat> = None;
    for s in &z.scenarios {
        let tau = from_ints(&s.tau);
        for g in s.cone.conic_generators() {
            let slope = dot(&g, &tau);
            if slope.is_zero() {
                continue;
            }
            let t = -dot(&g, &s.w_inf) / slope;
            if t.is_positive() && t <= Rat::one() && t_min.as_ref().is_none_or(|m| t < *m) {
                t_min = Some(t);
            }
        }
    }
    let tail_start: u64 = match t_min {
        None => 1,
        Some(t) => {
            let inv = t.recip();
            let fl: BigInt = inv.numer().div_floor(inv.denom());
            fl.to_u64()
                .expect("1/t is at most the largest generator weight")
                + 1
        }
    };
    let tail_status = status_lm(z, tail_start);
    let mut stable_from = tail_start;
    while stable_from > 1 && status_lm(z, stable_from - 1) == tail_status {
        stable_from -= 1;
    }
    let linf_status = status_linf(z);
    Threshold {
        stable_from,
        agrees_from: (tail_status == linf_status).then_some(stable_from),
        tail_status,
        linf_status,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleVerdict {
    pub linf: (Status, Status),
    pub linf_equal: bool,
    pub thresholds: (Threshold, Threshold),
    /// `max` of the two `stable_from` values.
    pub from_m: u64,
    pub lm_at_from: (Status, Status),
    /// Whether the `L_m` statuses agree for every `m ≥ from_m`.
    pub lm_agree: bool,
    /// The `L_∞` status is strictly semistable, where `ss = s` fails and
    /// agreement of the `L_m` statuses is not forced.
    pub linf_strictly_semistable: bool,
}

impl CycleVerdict {
    pub fn passes(&self) -> bool {
        self.linf_equal && self.lm_agree
    }
}

/// Lists where `z2` differs from `z1` in anything other than `τ`.
pub fn cycle_diff(z1: &HilbPoint, z2: &HilbPoint) -> Vec<String> {
    let mut diff = Vec::new();
    if z1.rank != z2.rank {
        diff.push(format!("rank {} != {}", z1.rank, z2.rank));
        return diff;
    }
    if z1.d != z2.d {
        diff.push(format!("d {} != {}", z1.d, z2.d));
    }
    if z1.scenarios.len() != z2.scenarios.len() {
        diff.push(format!(
            "scenario count {} != {}",
            z1.scenarios.len(),
            z2.scenarios.len()
        ));
        return diff;
    }
    for (i, (a, b)) in z1.scenarios.iter().zip(&z2.scenarios).enumerate() {
        if a.cone.lineality() != b.cone.lineality() || a.cone.rays() != b.cone.rays() {
            diff.push(format!("scenarios[{i}]: cones differ"));
        }
        let sup = |s: &LimitScenario| -> BTreeMap<String, (u64, Character)> {
            s.support
                .iter()
                .map(|p| (p.id.clone(), (p.multiplicity, p.c.clone())))
                .collect()
        };
        if sup(a) != sup(b) {
            diff.push(format!("scenarios[{i}]: support differs"));
        }
    }
    diff
}

pub fn cycle_invariance_check(z1: &HilbPoint, z2: &HilbPoint) -> Result<CycleVerdict, HilbError> {
    let diff = cycle_diff(z1, z2);
    if !diff.is_empty() {
        return Err(HilbError::TwinMismatch(diff));
    }
    let t1 = status_threshold(z1);
    let t2 = status_threshold(z2);
    let from_m = t1.stable_from.max(t2.stable_from);
    let lm_at_from = (status_lm(z1, from_m), status_lm(z2, from_m));
    Ok(CycleVerdict {
        linf: (t1.linf_status, t2.linf_status),
        linf_equal: t1.linf_status == t2.linf_status,
        lm_agree: t1.tail_status == t2.tail_status,
        linf_strictly_semistable: t1.linf_status == Status::StrictlySemistable,
        from_m,
        lm_at_from,
        thresholds: (t1, t2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ratio;

    fn sp(id: &str, n: u64, c: Character) -> SupportPoint {
        SupportPoint {
            id: id.into(),
            multiplicity: n,
            c,
        }
    }

    fn worked(tau_plus: i64) -> HilbPoint {
        HilbPoint::new(
            "z",
            2,
            1,
            vec![
                ScenarioSpec {
                    cone_h: vec![vec![1]],
                    tau: vec![tau_plus],
                    support: vec![sp("p", 2, vec![-1])],
                },
                ScenarioSpec {
                    cone_h: vec![vec![-1]],
                    tau: vec![0],
                    support: vec![sp("q", 2, vec![1])],
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn worked_weights() {
        let z = worked(3);
        let one = from_ints(&[1]);
        assert_eq!(mu_lm(&z, &one, 2).unwrap(), MuValue::Finite(int(1)));
        assert_eq!(
            mu_lm_normalized(&z, &one, 2).unwrap(),
            MuValue::Finite(ratio(1, 2))
        );
        assert_eq!(mu_linf(&z, &one).unwrap(), MuValue::Finite(int(2)));
        assert_eq!(
            mu_linf(&z, &from_ints(&[-1])).unwrap(),
            MuValue::Finite(int(2))
        );
        assert_eq!(mu_lm(&z, &[int(0)], 1), Err(HilbError::ZeroLambda));
    }

    #[test]
    fn worked_residuals() {
        let z = worked(3);
        let rows = convergence_report(&z, &[from_ints(&[1])], &[1, 2, 3]).unwrap();
        for r in rows {
            assert!(r.ok);
            assert_eq!(r.residual.unwrap(), ratio(-3, r.m as i64));
        }
    }

    #[test]
    fn worked_statuses_and_threshold() {
        let z = worked(3);
        assert_eq!(status_linf(&z), Status::Stable);
        assert_eq!(status_lm(&z, 1), Status::Unstable);
        assert_eq!(status_lm(&z, 2), Status::Stable);
        let t = status_threshold(&z);
        assert_eq!(t.agrees_from, Some(2));
        assert_eq!(status_threshold(&worked(5)).agrees_from, Some(3));
        assert_eq!(status_threshold(&worked(0)).agrees_from, Some(1));
    }

    #[test]
    fn twins() {
        let v = cycle_invariance_check(&worked(3), &worked(5)).unwrap();
        assert!(v.passes());
        assert_eq!(v.linf, (Status::Stable, Status::Stable));
        assert_eq!(v.from_m, 3);
        assert_eq!(v.lm_at_from, (Status::Stable, Status::Stable));
        let same = cycle_invariance_check(&worked(3), &worked(3)).unwrap();
        assert_eq!(same.thresholds.0, same.thresholds.1);
        // small tau keeps m = 1 stable
        let small = cycle_invariance_check(&worked(0), &worked(1)).unwrap();
        assert!(small.passes());
        assert_eq!(small.from_m, 1);
    }

    #[test]
    fn twin_mismatch_is_refused() {
        let other = HilbPoint::new(
            "w",
            2,
            1,
            vec![ScenarioSpec {
                cone_h: vec![vec![1]],
                tau: vec![3],
                support: vec![sp("p", 2, vec![-1])],
            }],
        )
        .unwrap();
        assert!(matches!(
            cycle_invariance_check(&worked(3), &other),
            Err(HilbError::TwinMismatch(_))
        ));
    }

    #[test]
    fn outside_cones_is_infinite() {
        let z = HilbPoint::new(
            "z",
            1,
            2,
            vec![ScenarioSpec {
                cone_h: vec![vec![1, 0], vec![0, 1]],
                tau: vec![0, 0],
                support: vec![sp("p", 1, vec![0, 0])],
            }],
        )
        .unwrap();
        let out = from_ints(&[-1, 0]);
        assert_eq!(mu_lm(&z, &out, 3).unwrap(), MuValue::PlusInfinity);
        assert_eq!(mu_linf(&z, &out).unwrap(), MuValue::PlusInfinity);
        let rows = convergence_report(&z, &[out, from_ints(&[1, 1])], &[1, 2]).unwrap();
        assert!(rows.iter().all(|r| r.ok));
        assert_eq!(
            mu_lm(&z, &from_ints(&[2, 5]), 7).unwrap(),
            MuValue::Finite(int(0))
        );
    }

    #[test]
    fn construction_errors() {
        let bad_sum = HilbPoint::new(
            "z",
            3,
            1,
            vec![ScenarioSpec {
                cone_h: vec![vec![1]],
                tau: vec![0],
                support: vec![sp("p", 2, vec![1])],
            }],
        );
        assert!(matches!(bad_sum, Err(HilbError::Invalid { .. })));
        let zero_cone = HilbPoint::new(
            "z",
            1,
            1,
            vec![ScenarioSpec {
                cone_h: vec![vec![1], vec![-1]],
                tau: vec![0],
                support: vec![sp("p", 1, vec![1])],
            }],
        );
        assert!(matches!(zero_cone, Err(HilbError::Invalid { .. })));
        let overlap = HilbPoint::new(
            "z",
            1,
            1,
            vec![
                ScenarioSpec {
                    cone_h: vec![vec![1]],
                    tau: vec![0],
                    support: vec![sp("p", 1, vec![1])],
                },
                ScenarioSpec {
                    cone_h: vec![vec![2]],
                    tau: vec![0],
                    support: vec![sp("p", 1, vec![1])],
                },
            ],
        );
        assert!(matches!(overlap, Err(HilbError::Invalid { .. })));
    }

    #[test]
    fn face_inconsistency_is_rejected() {
        // quadrants sharing the ray (0,1) with different tau there
        let z = HilbPoint::new(
            "z",
            1,
            2,
            vec![
                ScenarioSpec {
                    cone_h: vec![vec![1, 0], vec![0, 1]],
                    tau: vec![0, 1],
                    support: vec![sp("p", 1, vec![0, 0])],
                },
                ScenarioSpec {
                    cone_h: vec![vec![-1, 0], vec![0, 1]],
                    tau: vec![0, 2],
                    support: vec![sp("p", 1, vec![0, 0])],
                },
            ],
        );
        let err = z.unwrap_err().to_string();
        assert!(err.contains("tau disagrees"), "{err}");
    }
}
