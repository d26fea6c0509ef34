//! Dense exact linear algebra over `Rat`.

use num_traits::{One, Zero};

use crate::rat::{dot, is_zero, primitive_oriented, scale, sub, Rat, RatVec};

/// Reduced row echelon form. Returns the reduced nonzero rows and the pivot
/// column of each.
pub fn rref(rows: &[RatVec], ncols: usize) -> (Vec<RatVec>, Vec<usize>) {
    let mut m: Vec<RatVec> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rat::one() / &m[r][c];
        m[r] = scale(&m[r], &inv);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[RatVec], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// A basis of `{x : <row, x> = 0 for every row}` in `ncols` dimensions.
pub fn nullspace(rows: &[RatVec], ncols: usize) -> Vec<RatVec> {
    let (reduced, pivots) = rref(rows, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rat::zero(); ncols];
        v[free] = Rat::one();
        for (row, &pc) in reduced.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Canonical basis of the span of `vectors`: RREF rows scaled to primitive
/// integer vectors with positive leading entry.
pub fn canonical_span(vectors: &[RatVec], ncols: usize) -> Vec<RatVec> {
    rref(vectors, ncols)
        .0
        .iter()
        .map(|r| primitive_oriented(r))
        .collect()
}

/// Pairwise orthogonal basis of the span of `vectors` (Gram–Schmidt without
/// normalisation, so everything stays rational).
pub fn orthogonal_basis(vectors: &[RatVec]) -> Vec<RatVec> {
    let mut out: Vec<RatVec> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for u in &out {
            let c = dot(&w, u) / dot(u, u);
            w = sub(&w, &scale(u, &c));
        }
        if !is_zero(&w) {
            out.push(w);
        }
    }
    out
}

/// Orthogonal projection of `v` onto the span of the pairwise orthogonal
/// vectors `ortho`.
pub fn project(v: &[Rat], ortho: &[RatVec]) -> RatVec {
    let mut p = vec![Rat::zero(); v.len()];
    for u in ortho {
        let c = dot(v, u) / dot(u, u);
        for (x, y) in p.iter_mut().zip(u) {
            *x += &c * y;
        }
    }
    p
}

/// Component of `v` orthogonal to the span of `ortho`.
pub fn reject(v: &[Rat], ortho: &[RatVec]) -> RatVec {
    sub(v, &project(v, ortho))
}

/// Solves for `x` with `sum_i x_i * basis[i] = v` when `v` is in the span.
pub fn coordinates(basis: &[RatVec], v: &[Rat]) -> Option<RatVec> {
    let n = v.len();
    let k = basis.len();
    // augmented system, one row per coordinate of the ambient space
    let rows: Vec<RatVec> = (0..n)
        .map(|j| {
            let mut r: RatVec = basis.iter().map(|b| b[j].clone()).collect();
            r.push(v[j].clone());
            r
        })
        .collect();
    let (reduced, pivots) = rref(&rows, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Rat::zero(); k];
    for (row, &pc) in reduced.iter().zip(&pivots) {
        x[pc] = row[k].clone();
    }
    Some(x)
}
