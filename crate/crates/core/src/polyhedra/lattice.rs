//! Integer lattice kernels by unimodular column reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::PolyError;

/// Basis of the saturated lattice `{λ ∈ ℤ^dim : <λ, χ> = 0 for all χ}`.
///
/// Column operations with extended gcd steps bring the character matrix to
/// lower echelon form `A·U = [H | 0]` with `U` unimodular; the trailing
/// columns of `U` span the kernel over ℤ. The result is returned in row
/// Hermite normal form, which is unique for the lattice, so the basis is
/// canonical. Each basis vector is primitive.
pub fn integer_kernel(dim: usize, chars: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, PolyError> {
    for c in chars {
        if c.len() != dim {
            return Err(PolyError::DimensionMismatch {
                expected: dim,
                found: c.len(),
            });
        }
    }
    let mut a: Vec<Vec<BigInt>> = chars
        .iter()
        .map(|c| c.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    // u[j] is column j of the transform
    let mut u: Vec<Vec<BigInt>> = (0..dim)
        .map(|j| {
            (0..dim)
                .map(|i| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect();

    let mut p = 0;
    for i in 0..a.len() {
        if p == dim {
            break;
        }
        for j in p + 1..dim {
            if a[i][j].is_zero() {
                continue;
            }
            let x = a[i][p].clone();
            let y = a[i][j].clone();
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (xg, yg) = (&x / &g, &y / &g);
            column_op(&mut a, &mut u, p, j, &s, &t, &yg, &xg);
        }
        if !a[i][p].is_zero() {
            p += 1;
        }
    }
    let basis: Vec<Vec<BigInt>> = u[p..].to_vec();
    hermite_rows(basis)
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|x| x.to_i64().ok_or(PolyError::Overflow))
                .collect()
        })
        .collect()
}

/// `col_p ← s·col_p + t·col_j`, `col_j ← −yg·col_p + xg·col_j` (determinant 1).
#[allow(clippy::too_many_arguments)]
fn column_op(
    a: &mut [Vec<BigInt>],
    u: &mut [Vec<BigInt>],
    p: usize,
    j: usize,
    s: &BigInt,
    t: &BigInt,
    yg: &BigInt,
    xg: &BigInt,
) {
    for row in a.iter_mut() {
        let (cp, cj) = (row[p].clone(), row[j].clone());
        row[p] = s * &cp + t * &cj;
        row[j] = xg * &cj - yg * &cp;
    }
    let (cp, cj) = (u[p].clone(), u[j].clone());
    u[p] = cp.iter().zip(&cj).map(|(x, y)| s * x + t * y).collect();
    u[j] = cp.iter().zip(&cj).map(|(x, y)| xg * y - yg * x).collect();
}

/// Row Hermite normal form: echelon rows with positive pivots and entries
/// above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub(crate) fn hermite_rows(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let Some(ncols) = rows.first().map(Vec::len) else {
        return rows;
    };
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        // Euclid on column c among rows r..
        loop {
            let nz: Vec<usize> = (r..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let piv = *nz
                .iter()
                .min_by(|&&x, &&y| rows[x][c].abs().cmp(&rows[y][c].abs()))
                .expect("nonempty");
            rows.swap(r, piv);
            if rows[r][c].is_negative() {
                rows[r] = rows[r].iter().map(|x| -x).collect();
            }
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][c].is_zero() {
                    continue;
                }
                let q = rows[i][c].div_floor(&rows[r][c]);
                let pr = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
                if !rows[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            for i in 0..r {
                let q = rows[i][c].div_floor(&rows[r][c]);
                if !q.is_zero() {
                    let pr = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pr) {
                        *x -= &q * y;
                    }
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}
