mod common;

use num_traits::{Signed, Zero};
use proptest::prelude::*;

use vgitkit::git::{self, MValue, MuValue, Status};
use vgitkit::polyhedra::linalg::rank;
use vgitkit::polyhedra::{
    integer_kernel, lp_feasible, relint_contains_zero, Constraint, Feasibility, RationalCone,
};
use vgitkit::rat::{from_ints, int, norm_sq, to_f64, Rat, RatVec};
use vgitkit::strata::fingerprint;
use vgitkit::vgit::chamber_decomposition;
use vgitkit::{Character, EvalOptions, Execution, HmPolicy, LinCombo};

fn chars(rank: usize, max_n: usize, bound: i64) -> impl Strategy<Value = Vec<Character>> {
    prop::collection::vec(prop::collection::vec(-bound..=bound, rank), 0..=max_n)
}

fn rats(cs: &[Character]) -> Vec<RatVec> {
    cs.iter().map(|c| from_ints(c)).collect()
}

/// Fourier–Motzkin feasibility of `{x : <a_i, x> ≥ b_i}`.
fn fm_feasible(mut rows: Vec<(RatVec, Rat)>, dim: usize) -> bool {
    for j in (0..dim).rev() {
        let (mut pos, mut neg, mut zero) = (vec![], vec![], vec![]);
        for r in rows {
            if r.0[j].is_positive() {
                pos.push(r);
            } else if r.0[j].is_negative() {
                neg.push(r);
            } else {
                zero.push(r);
            }
        }
        for (pa, pb) in &pos {
            for (na, nb) in &neg {
                // pa/pa_j + na/(−na_j) eliminates x_j
                let sp = pa[j].recip();
                let sn = -na[j].recip();
                let a: RatVec = pa.iter().zip(na).map(|(x, y)| x * &sp + y * &sn).collect();
                zero.push((a, pb * &sp + nb * &sn));
            }
        }
        rows = zero;
    }
    rows.iter().all(|(_, b)| !b.is_positive())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn double_description_round_trip(rank in 1usize..=3, seed in chars(3, 5, 3)) {
        let normals: Vec<RatVec> = rats(&seed).into_iter().map(|v| v[..rank].to_vec()).collect();
        let c = RationalCone::from_normals(rank, &normals).unwrap();
        let gens = c.conic_generators();
        for g in &gens {
            prop_assert!(c.contains(g));
        }
        // the dual of the generators is the cone spanned by the normals
        let d = RationalCone::from_normals(rank, &gens).unwrap();
        for h in &normals {
            prop_assert!(d.contains(h));
        }
        for g in d.conic_generators() {
            let mut cons: Vec<Constraint> = (0..rank)
                .map(|j| Constraint::eq(normals.iter().map(|h| h[j].clone()).collect(), g[j].clone()))
                .collect();
            for k in 0..normals.len() {
                let mut row = vec![Rat::zero(); normals.len()];
                row[k] = int(1);
                cons.push(Constraint::ge(row, Rat::zero()));
            }
            if normals.is_empty() {
                prop_assert!(g.iter().all(|x| x.is_zero()));
            } else {
                prop_assert!(lp_feasible(&cons).unwrap().is_feasible());
            }
        }
        prop_assert_eq!(c.dimension() + d.lineality().len(), rank);
    }

    #[test]
    fn lp_agrees_with_fourier_motzkin(
        dim in 1usize..=3,
        rows in prop::collection::vec((prop::collection::vec(-3i64..=3, 3), -4i64..=4), 1..=6),
    ) {
        let rows: Vec<(RatVec, Rat)> = rows.iter().map(|(a, b)| (from_ints(&a[..dim]), int(*b))).collect();
        let cons: Vec<Constraint> = rows.iter().map(|(a, b)| Constraint::ge(a.clone(), b.clone())).collect();
        let fm = fm_feasible(rows, dim);
        match lp_feasible(&cons).unwrap() {
            Feasibility::Feasible(x) => {
                prop_assert!(fm);
                prop_assert!(cons.iter().all(|c| c.is_satisfied_by(&x)));
            }
            Feasibility::Infeasible => prop_assert!(!fm),
        }
    }

    #[test]
    fn integer_kernel_spans_the_kernel(rank_ in 1usize..=4, cs in chars(4, 3, 4)) {
        let cs: Vec<Character> = cs.into_iter().map(|c| c[..rank_].to_vec()).collect();
        let k = integer_kernel(rank_, &cs).unwrap();
        let r = rank(&rats(&cs), rank_);
        prop_assert_eq!(k.len(), rank_ - r);
        for v in &k {
            for c in &cs {
                prop_assert_eq!(v.iter().zip(c).map(|(x, y)| x * y).sum::<i64>(), 0);
            }
        }
        prop_assert_eq!(rank(&rats(&k), rank_), k.len());
        prop_assert_eq!(integer_kernel(rank_, &cs).unwrap(), k);
    }

    #[test]
    fn relint_zero_matches_cone_is_subspace(cs in chars(3, 4, 2)) {
        let pts = rats(&cs);
        prop_assume!(!pts.is_empty());
        // 0 ∈ relint conv(P) iff cone(P) is a linear space iff −p ∈ cone(P) for each p
        let opposite_in_cone = pts.iter().all(|p| {
            let mut cons: Vec<Constraint> = (0..3)
                .map(|j| Constraint::eq(pts.iter().map(|q| q[j].clone()).collect(), -p[j].clone()))
                .collect();
            for k in 0..pts.len() {
                let mut row = vec![Rat::zero(); pts.len()];
                row[k] = int(1);
                cons.push(Constraint::ge(row, Rat::zero()));
            }
            lp_feasible(&cons).unwrap().is_feasible()
        });
        prop_assert_eq!(relint_contains_zero(&pts).unwrap(), opposite_in_cone);
    }

    #[test]
    fn mu_is_affine_along_segments(seed in any::<u64>(), k in 0i64..=8, l in prop::collection::vec(-3i64..=3, 3)) {
        let mut rng = common::rng(seed);
        let rank = 1 + (seed % 3) as usize;
        let scene = common::random_scene(&mut rng, rank, 1);
        let p = &scene.points()[0];
        let lambda = from_ints(&l[..rank]);
        prop_assume!(lambda.iter().any(|x| !x.is_zero()));
        let t = Rat::new(k.into(), 8.into());
        let at = |c: LinCombo| git::mu(&scene, p, &c, &lambda).unwrap();
        let m0 = at(LinCombo::single("L0"));
        let m1 = at(LinCombo::single("L1"));
        let mt = at(LinCombo::segment("L0", "L1", &t).unwrap());
        match (m0, m1, mt) {
            (MuValue::Finite(a), MuValue::Finite(b), MuValue::Finite(c)) => {
                prop_assert_eq!(c, (int(1) - &t) * a + &t * b);
            }
            (a, b, c) => {
                prop_assert!(a.is_infinite() && b.is_infinite() && c.is_infinite());
            }
        }
    }

    #[test]
    fn m_bounds_normalized_mu(seed in any::<u64>(), ls in prop::collection::vec(prop::collection::vec(-4i64..=4, 3), 8)) {
        let mut rng = common::rng(seed);
        let rank = 1 + (seed % 3) as usize;
        let scene = common::random_scene(&mut rng, rank, 1);
        let p = &scene.points()[0];
        let combo = LinCombo::single("L0");
        let m = git::m_function(&scene, p, &combo, HmPolicy::RequireSanctioned).unwrap();
        let st = git::status(&scene, p, &combo, HmPolicy::RequireSanctioned).unwrap();
        prop_assert_eq!(m.sign_status(), st);
        if let MValue::Finite { mu_star, norm_sq: n2, minimizer, value } = &m {
            prop_assert_eq!(git::mu(&scene, p, &combo, minimizer).unwrap(), MuValue::Finite(mu_star.clone()));
            prop_assert_eq!(&norm_sq(minimizer), n2);
            prop_assert!((value - to_f64(mu_star) / to_f64(n2).sqrt()).abs() < 1e-12);
            for l in &ls {
                let lambda = from_ints(&l[..rank]);
                if lambda.iter().all(|x| x.is_zero()) {
                    continue;
                }
                if let MuValue::Finite(v) = git::mu(&scene, p, &combo, &lambda).unwrap() {
                    let ratio = to_f64(&v) / to_f64(&norm_sq(&lambda)).sqrt();
                    prop_assert!(*value <= ratio + 1e-12);
                }
            }
        } else {
            prop_assert!(git::cone_cx(&scene, p).is_zero_cone());
        }
    }

    #[test]
    fn semistable_and_stable_sets_are_intervals(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let rank = 1 + (seed % 3) as usize;
        let scene = common::random_scene(&mut rng, rank, 3);
        let r = chamber_decomposition(&scene, "L0", "L1", EvalOptions::default()).unwrap();
        // statuses in t order: start, chamber, wall, chamber, ..., end
        let mut seq = vec![&r.start.statuses];
        for (i, c) in r.chambers.iter().enumerate() {
            seq.push(&c.statuses);
            if let Some(w) = r.on_walls.get(i) {
                seq.push(&w.statuses);
            }
        }
        seq.push(&r.end.statuses);
        for p in scene.points() {
            for pred in [Status::is_semistable as fn(Status) -> bool, Status::is_stable] {
                let flags: Vec<bool> = seq.iter().map(|s| pred(s[&p.name])).collect();
                let first = flags.iter().position(|&f| f);
                let last = flags.iter().rposition(|&f| f);
                if let (Some(a), Some(b)) = (first, last) {
                    prop_assert!(flags[a..=b].iter().all(|&f| f), "{}: {:?}", p.name, flags);
                }
            }
        }
    }

    #[test]
    fn equal_fingerprints_give_equal_statuses(seed in any::<u64>(), k in 0i64..=6) {
        let mut rng = common::rng(seed);
        let rank = 1 + (seed % 2) as usize;
        let scene = common::random_scene(&mut rng, rank, 5);
        let t = Rat::new(k.into(), 6.into());
        let combo = LinCombo::segment("L0", "L1", &t).unwrap();
        let pts = scene.points();
        for a in pts {
            for b in pts {
                let fa = fingerprint(&scene, a, &["L0", "L1"]).unwrap();
                let fb = fingerprint(&scene, b, &["L0", "L1"]).unwrap();
                if fa == fb {
                    prop_assert_eq!(
                        git::status(&scene, a, &combo, HmPolicy::RequireSanctioned).unwrap(),
                        git::status(&scene, b, &combo, HmPolicy::RequireSanctioned).unwrap()
                    );
                }
            }
            // reduction never changes μ on C_x
            let f = fingerprint(&scene, a, &["L0"]).unwrap();
            let reduced = &f.weights["L0"];
            let normals = scene.stratum_chars(&a.stratum);
            for l in [[1i64, 0], [0, 1], [1, 1], [-1, 2], [2, -1], [-1, -1]] {
                let lambda = from_ints(&l[..rank]);
                if lambda.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let full = git::mu(&scene, a, &LinCombo::single("L0"), &lambda).unwrap();
                prop_assert_eq!(full, git::mu_from_weights(&normals, reduced, &lambda));
            }
        }
    }

    #[test]
    fn hilb_status_linf_ignores_tau(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let z = common::random_hilb(&mut rng, "z");
        let w = common::retau(&mut rng, &z, "w");
        prop_assert_eq!(vgitkit::hilb::status_linf(&z), vgitkit::hilb::status_linf(&w));
    }

    #[test]
    fn hilb_residual_identity(seed in any::<u64>(), l in prop::collection::vec(-3i64..=3, 3), m in 1u64..=12) {
        let mut rng = common::rng(seed);
        let z = common::random_hilb(&mut rng, "z");
        let lambda = from_ints(&l[..z.rank()]);
        prop_assume!(lambda.iter().any(|x| !x.is_zero()));
        let rows = vgitkit::hilb::convergence_report(&z, std::slice::from_ref(&lambda), &[m]).unwrap();
        prop_assert!(rows[0].ok);
    }

    #[test]
    fn execution_strategy_does_not_change_reports(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let rank = 1 + (seed % 3) as usize;
        let scene = common::random_scene(&mut rng, rank, 6);
        let par = chamber_decomposition(&scene, "L0", "L1", EvalOptions::default()).unwrap();
        let seq = chamber_decomposition(
            &scene,
            "L0",
            "L1",
            EvalOptions::default().with_execution(Execution::Sequential),
        )
        .unwrap();
        prop_assert_eq!(par, seq);
    }
}
