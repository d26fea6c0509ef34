//! Rational polyhedral cones in both representations.

use num_traits::{Signed, Zero};

use super::linalg::{canonical_span, orthogonal_basis, rank, reject};
use super::lp::{lp_feasible, Constraint, Feasibility};
use super::{check_dims, satisfies_all, PolyError};
use crate::rat::{axpy, dot, is_zero, neg, primitive_rat, unit, Rat, RatVec};

/// A cone `{λ : <λ, h> ≥ 0 for all h}` together with its generators: a
/// lineality basis plus extreme rays.
///
/// Rays are primitive integer vectors orthogonal to the lineality space,
/// sorted lexicographically. The lineality basis is the primitive-scaled
/// reduced row echelon basis. Both choices make the V-representation
/// canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCone {
    dim: usize,
    h_rep: Vec<RatVec>,
    lineality: Vec<RatVec>,
    rays: Vec<RatVec>,
}

impl RationalCone {
    /// Builds the cone from inequality normals (double description).
    pub fn from_normals(dim: usize, normals: &[RatVec]) -> Result<Self, PolyError> {
        check_dims(dim, normals)?;
        let h_rep: Vec<RatVec> = normals.iter().filter(|h| !is_zero(h)).cloned().collect();
        let (lineality, rays) = double_description(dim, &h_rep);
        Ok(RationalCone {
            dim,
            h_rep,
            lineality,
            rays,
        })
    }

    pub fn full(dim: usize) -> Self {
        Self::from_normals(dim, &[]).expect("no normals to mismatch")
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn h_rep(&self) -> &[RatVec] {
        &self.h_rep
    }

    pub fn lineality(&self) -> &[RatVec] {
        &self.lineality
    }

    pub fn rays(&self) -> &[RatVec] {
        &self.rays
    }

    /// Lineality basis vectors in both orientations followed by the rays: a
    /// set whose conical hull is the cone.
    pub fn conic_generators(&self) -> Vec<RatVec> {
        let mut g = Vec::with_capacity(2 * self.lineality.len() + self.rays.len());
        for l in &self.lineality {
            g.push(l.clone());
            g.push(neg(l));
        }
        g.extend(self.rays.iter().cloned());
        g
    }

    pub fn is_zero_cone(&self) -> bool {
        self.lineality.is_empty() && self.rays.is_empty()
    }

    pub fn is_full_space(&self) -> bool {
        self.lineality.len() == self.dim
    }

    /// Dimension of the linear span of the cone.
    pub fn dimension(&self) -> usize {
        let gens: Vec<RatVec> = self.lineality.iter().chain(&self.rays).cloned().collect();
        rank(&gens, self.dim)
    }

    /// Membership via the inequality description.
    pub fn contains(&self, v: &[Rat]) -> bool {
        v.len() == self.dim && satisfies_all(v, &self.h_rep)
    }

    /// Membership via the generators, decided by LP: `v = Σ a_i l_i + Σ b_j r_j`
    /// with `b ≥ 0`.
    pub fn generators_contain(&self, v: &[Rat]) -> bool {
        if v.len() != self.dim {
            return false;
        }
        let gens: Vec<&RatVec> = self.lineality.iter().chain(&self.rays).collect();
        if gens.is_empty() {
            return is_zero(v);
        }
        let nl = self.lineality.len();
        let k = gens.len();
        let mut cons = Vec::new();
        for j in 0..self.dim {
            let row: RatVec = gens.iter().map(|g| g[j].clone()).collect();
            cons.push(Constraint::eq(row, v[j].clone()));
        }
        for i in nl..k {
            cons.push(Constraint::ge(unit(k, i), Rat::zero()));
        }
        matches!(lp_feasible(&cons), Ok(Feasibility::Feasible(_)))
    }
}

/// Convenience wrapper returning a cone with both representations filled.
pub fn dual_rays(dim: usize, normals: &[RatVec]) -> Result<RationalCone, PolyError> {
    RationalCone::from_normals(dim, normals)
}

struct Ray {
    v: RatVec,
    zeros: Vec<bool>,
}

/// Incremental double description starting from the whole space.
fn double_description(dim: usize, normals: &[RatVec]) -> (Vec<RatVec>, Vec<RatVec>) {
    let mut lin: Vec<RatVec> = (0..dim).map(|i| unit(dim, i)).collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (k, h) in normals.iter().enumerate() {
        for r in rays.iter_mut() {
            r.zeros.push(false);
        }
        if let Some(pos) = lin.iter().position(|l| !dot(l, h).is_zero()) {
            let mut l0 = lin.swap_remove(pos);
            let mut s0 = dot(&l0, h);
            if s0.is_negative() {
                l0 = neg(&l0);
                s0 = -s0;
            }
            for l in lin.iter_mut() {
                let c = -(dot(l, h) / &s0);
                *l = axpy(l, &c, &l0);
            }
            for r in rays.iter_mut() {
                let c = -(dot(&r.v, h) / &s0);
                r.v = axpy(&r.v, &c, &l0);
                r.zeros[k] = true;
            }
            let mut zeros = vec![true; k + 1];
            zeros[k] = false;
            rays.push(Ray { v: l0, zeros });
            continue;
        }

        let vals: Vec<Rat> = rays.iter().map(|r| dot(&r.v, h)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let negs: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        let mut next: Vec<Ray> = Vec::new();
        for &p in &pos {
            for &q in &negs {
                let common: Vec<bool> = rays[p]
                    .zeros
                    .iter()
                    .zip(&rays[q].zeros)
                    .map(|(a, b)| *a && *b)
                    .collect();
                let adjacent = rays.iter().enumerate().all(|(i, r)| {
                    i == p || i == q || !common.iter().zip(&r.zeros).all(|(c, z)| !*c || *z)
                });
                if !adjacent {
                    continue;
                }
                // vals[p] > 0 > vals[q]; the combination lies on the hyperplane
                let v: RatVec = rays[q]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(n, pv)| &vals[p] * n - &vals[q] * pv)
                    .collect();
                let mut zeros = common;
                zeros[k] = true;
                next.push(Ray { v, zeros });
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (i, mut r) in rays.into_iter().enumerate() {
            if vals[i].is_negative() {
                continue;
            }
            if vals[i].is_zero() {
                r.zeros[k] = true;
            }
            kept.push(r);
        }
        kept.extend(next);
        rays = kept;
    }

    let lineality = canonical_span(&lin, dim);
    let ortho = orthogonal_basis(&lineality);
    let mut out: Vec<RatVec> = rays
        .into_iter()
        .map(|r| primitive_rat(&reject(&r.v, &ortho)))
        .filter(|v| !is_zero(v))
        .collect();
    out.sort();
    out.dedup();
    (lineality, out)
}
