#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vgitkit::hilb::{HilbPoint, ScenarioSpec, SupportPoint};
use vgitkit::{Character, Linearization, Scene, WeightedPoint};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_char(rng: &mut impl Rng, rank: usize, bound: i64) -> Character {
    (0..rank).map(|_| rng.gen_range(-bound..=bound)).collect()
}

pub fn random_chars(rng: &mut impl Rng, rank: usize, n: usize, bound: i64) -> Vec<Character> {
    (0..n).map(|_| random_char(rng, rank, bound)).collect()
}

/// Two sanctioned linearizations `L0`, `L1`, a few base characters and
/// points on random strata.
pub fn random_scene(rng: &mut impl Rng, rank: usize, n_points: usize) -> Scene {
    let n_base = rng.gen_range(0..=3);
    let base = random_chars(rng, rank, n_base, 2);
    let lins = ["L0", "L1"]
        .iter()
        .map(|n| Linearization {
            name: n.to_string(),
            hm_sanctioned: true,
        })
        .collect();
    let points = (0..n_points)
        .map(|i| {
            let stratum: Vec<usize> = (0..n_base).filter(|_| rng.gen_bool(0.4)).collect();
            let n0 = rng.gen_range(1..=3);
            let n1 = rng.gen_range(1..=3);
            WeightedPoint::new(format!("p{i}"), stratum)
                .with_weights("L0", random_chars(rng, rank, n0, 3))
                .with_weights("L1", random_chars(rng, rank, n1, 3))
        })
        .collect();
    Scene::new(rank, base, lins, points, vec![]).expect("generated scenes are valid")
}

/// A random subset of the coordinate orthants of `ℤ^rank`, with every
/// linear datum induced from per-ray values so shared faces agree.
pub fn random_hilb(rng: &mut impl Rng, name: &str) -> HilbPoint {
    let rank = rng.gen_range(1..=3);
    let mut signs: Vec<Vec<i64>> = (0..1u32 << rank)
        .map(|mask| {
            (0..rank)
                .map(|i| if mask >> i & 1 == 1 { -1 } else { 1 })
                .collect()
        })
        .collect();
    signs.shuffle(rng);
    let keep = rng.gen_range(1..=signs.len());
    signs.truncate(keep);
    let w_rays = ray_values(rng, rank, 3);
    let tau_rays = ray_values(rng, rank, 6);
    let d = rng.gen_range(1..=4u64);
    let specs = signs
        .iter()
        .map(|s| {
            let w = induced(s, &w_rays);
            ScenarioSpec {
                cone_h: orthant_normals(s),
                tau: induced(s, &tau_rays),
                support: split_support(rng, &w, d),
            }
        })
        .collect();
    HilbPoint::new(name, d, rank, specs).expect("orthant fans are valid")
}

/// `values[i] = (value on +e_i, value on −e_i)`.
pub fn ray_values(rng: &mut impl Rng, rank: usize, bound: i64) -> Vec<(i64, i64)> {
    (0..rank)
        .map(|_| (rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound)))
        .collect()
}

pub fn orthant_normals(signs: &[i64]) -> Vec<Character> {
    (0..signs.len())
        .map(|i| {
            let mut h = vec![0; signs.len()];
            h[i] = signs[i];
            h
        })
        .collect()
}

/// Linear form on the orthant of `signs` taking the given values on its rays.
pub fn induced(signs: &[i64], values: &[(i64, i64)]) -> Character {
    signs
        .iter()
        .zip(values)
        .map(|(&s, &(p, n))| if s > 0 { p } else { -n })
        .collect()
}

/// Support points with `Σ n_p c_p = w` and `Σ n_p = d`.
pub fn split_support(rng: &mut impl Rng, w: &[i64], d: u64) -> Vec<SupportPoint> {
    let mut out = Vec::new();
    let mut left = d;
    let mut acc = vec![0i64; w.len()];
    let mut k = 0;
    while left > 1 && rng.gen_bool(0.5) {
        let n = rng.gen_range(1..left);
        let c = random_char(rng, w.len(), 2);
        for (a, x) in acc.iter_mut().zip(&c) {
            *a += n as i64 * x;
        }
        out.push(SupportPoint {
            id: format!("p{k}"),
            multiplicity: n,
            c,
        });
        left -= n;
        k += 1;
    }
    // the last point absorbs the remainder; scale so n_p divides it
    let rem: Vec<i64> = w.iter().zip(&acc).map(|(a, b)| a - b).collect();
    if rem.iter().all(|x| x % left as i64 == 0) {
        out.push(SupportPoint {
            id: format!("p{k}"),
            multiplicity: left,
            c: rem.iter().map(|x| x / left as i64).collect(),
        });
    } else {
        if left > 1 {
            out.push(SupportPoint {
                id: format!("p{k}"),
                multiplicity: left - 1,
                c: vec![0; w.len()],
            });
            k += 1;
        }
        out.push(SupportPoint {
            id: format!("p{k}"),
            multiplicity: 1,
            c: rem,
        });
    }
    out
}

/// Same cones and support as `z`, fresh τ induced from new ray values.
pub fn retau(rng: &mut impl Rng, z: &HilbPoint, name: &str) -> HilbPoint {
    let tau_rays = ray_values(rng, z.rank(), 6);
    let taus: Vec<Character> = z
        .scenarios()
        .iter()
        .map(|s| {
            let signs: Vec<i64> = s.cone_h().iter().map(|h| h.iter().sum::<i64>()).collect();
            induced(&signs, &tau_rays)
        })
        .collect();
    z.with_taus(name, &taus)
        .expect("induced taus are consistent")
}
