//! Exact rational polyhedral primitives.
//!
//! Everything here is a pure function over immutable inputs; no tolerances
//! appear anywhere.

mod cone;
mod lattice;
pub mod linalg;
mod lp;

pub use cone::{dual_rays, RationalCone};
pub use lattice::integer_kernel;
pub use lp::{lp_feasible, Constraint, Feasibility, Relation};

use crate::rat::{int, is_zero, Rat, RatVec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected vectors of length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty input where at least one vector is required")]
    Empty,
    #[error("integer result does not fit in 64 bits")]
    Overflow,
}

pub(crate) fn check_dims<'a, I>(dim: usize, vecs: I) -> Result<(), PolyError>
where
    I: IntoIterator<Item = &'a RatVec>,
{
    for v in vecs {
        if v.len() != dim {
            return Err(PolyError::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
    }
    Ok(())
}

/// True iff some strictly positive combination of `points` vanishes, i.e. the
/// origin lies in the relative interior of their convex hull (within their
/// span). Zero vectors are dropped first; an empty remainder counts as true.
///
/// Strict positivity is imposed as `w ≥ 1`, which is equivalent because the
/// system `Σ w_i p_i = 0` is homogeneous in `w`.
pub fn relint_contains_zero(points: &[RatVec]) -> Result<bool, PolyError> {
    Ok(relint_witness(points)?.is_some())
}

/// Like [`relint_contains_zero`] but returns the positive weights (one per
/// nonzero input point, in input order) when they exist.
pub fn relint_witness(points: &[RatVec]) -> Result<Option<RatVec>, PolyError> {
    let first = points.first().ok_or(PolyError::Empty)?;
    let dim = first.len();
    check_dims(dim, points)?;
    let kept: Vec<&RatVec> = points.iter().filter(|p| !is_zero(p)).collect();
    if kept.is_empty() {
        return Ok(Some(Vec::new()));
    }
    let k = kept.len();
    let mut cons = Vec::with_capacity(k + dim);
    for i in 0..k {
        let mut row = vec![int(0); k];
        row[i] = int(1);
        cons.push(Constraint::new(row, Relation::Ge, int(1)));
    }
    for j in 0..dim {
        let row: RatVec = kept.iter().map(|p| p[j].clone()).collect();
        cons.push(Constraint::new(row, Relation::Eq, int(0)));
    }
    Ok(match lp_feasible(&cons)? {
        Feasibility::Feasible(w) => Some(w),
        Feasibility::Infeasible => None,
    })
}

/// Membership of `v` in `{x : <x,h> ≥ 0 for all h}`.
pub fn satisfies_all(v: &[Rat], normals: &[RatVec]) -> bool {
    use num_traits::Signed;
    normals.iter().all(|h| !crate::rat::dot(v, h).is_negative())
}
