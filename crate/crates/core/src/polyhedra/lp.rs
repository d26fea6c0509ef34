//! Exact LP feasibility by a phase-one simplex with Bland's rule.

use num_traits::{Signed, Zero};

use super::{check_dims, PolyError};
use crate::rat::{dot, Rat, RatVec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `<a, x> ≥ b`
    Ge,
    /// `<a, x> = b`
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub coeffs: RatVec,
    pub relation: Relation,
    pub rhs: Rat,
}

impl Constraint {
    pub fn new(coeffs: RatVec, relation: Relation, rhs: Rat) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn ge(coeffs: RatVec, rhs: Rat) -> Self {
        Self::new(coeffs, Relation::Ge, rhs)
    }

    pub fn eq(coeffs: RatVec, rhs: Rat) -> Self {
        Self::new(coeffs, Relation::Eq, rhs)
    }

    pub fn is_satisfied_by(&self, x: &[Rat]) -> bool {
        let lhs = dot(&self.coeffs, x);
        match self.relation {
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(RatVec),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&RatVec> {
        match self {
            Feasibility::Feasible(w) => Some(w),
            Feasibility::Infeasible => None,
        }
    }
}

/// Decides whether the system has a rational solution over free variables.
///
/// Each free variable is split as `x = x⁺ − x⁻`, `≥` rows receive a surplus
/// column, and every row gets an artificial variable. Phase one minimises the
/// sum of artificials; Bland's smallest-index rule rules out cycling.
pub fn lp_feasible(constraints: &[Constraint]) -> Result<Feasibility, PolyError> {
    let Some(first) = constraints.first() else {
        return Err(PolyError::Empty);
    };
    let n = first.coeffs.len();
    if n == 0 {
        return Err(PolyError::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    check_dims(n, constraints.iter().map(|c| &c.coeffs))?;

    let m = constraints.len();
    let n_surplus = constraints
        .iter()
        .filter(|c| c.relation == Relation::Ge)
        .count();
    let n_struct = 2 * n + n_surplus;
    let ncols = n_struct + m;
    let rhs_col = ncols;

    let mut tab: Vec<RatVec> = Vec::with_capacity(m);
    let mut surplus = 0;
    for (i, c) in constraints.iter().enumerate() {
        let mut row = vec![Rat::zero(); ncols + 1];
        for j in 0..n {
            row[j] = c.coeffs[j].clone();
            row[n + j] = -c.coeffs[j].clone();
        }
        if c.relation == Relation::Ge {
            row[2 * n + surplus] = Rat::from_integer((-1).into());
            surplus += 1;
        }
        row[rhs_col] = c.rhs.clone();
        if row[rhs_col].is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        row[n_struct + i] = Rat::from_integer(1.into());
        tab.push(row);
    }
    let mut basis: Vec<usize> = (n_struct..ncols).collect();

    // reduced costs of the phase-one objective; artificials start at zero
    let mut cost = vec![Rat::zero(); ncols + 1];
    for row in &tab {
        for j in 0..n_struct {
            cost[j] -= &row[j];
        }
        cost[rhs_col] -= &row[rhs_col];
    }

    while let Some(enter) = (0..ncols).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rat)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = &row[rhs_col] / &row[enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // the phase-one objective is bounded below by zero
        let (r, _) = leave.expect("phase-one simplex cannot be unbounded");
        pivot(&mut tab, &mut cost, r, enter);
        basis[r] = enter;
    }

    // cost[rhs] holds minus the objective value
    if !cost[rhs_col].is_zero() {
        return Ok(Feasibility::Infeasible);
    }
    let mut value = vec![Rat::zero(); n_struct];
    for (i, &b) in basis.iter().enumerate() {
        if b < n_struct {
            value[b] = tab[i][rhs_col].clone();
        }
    }
    let x: RatVec = (0..n).map(|j| &value[j] - &value[n + j]).collect();
    debug_assert!(constraints.iter().all(|c| c.is_satisfied_by(&x)));
    Ok(Feasibility::Feasible(x))
}

fn pivot(tab: &mut [RatVec], cost: &mut RatVec, r: usize, c: usize) {
    let inv = Rat::from_integer(1.into()) / &tab[r][c];
    for x in tab[r].iter_mut() {
        *x *= &inv;
    }
    let prow = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c].clone();
        for (x, y) in row.iter_mut().zip(&prow) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for (x, y) in cost.iter_mut().zip(&prow) {
            if !y.is_zero() {
                *x -= &f * y;
            }
        }
    }
}
