//! Fraction-free integer linear algebra.
//!
//! Bareiss elimination keeps every intermediate entry an integer (each one is
//! a minor of the input), so the pivots are exactly the leading principal
//! minors. No floating point anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("singular system (leading minor {0} vanishes)")]
    Singular(usize),
    #[error("right-hand side has length {got}, expected {expected}")]
    RhsLength { got: usize, expected: usize },
}

pub type Matrix = Vec<Vec<BigInt>>;

fn check_square(m: &Matrix) -> Result<usize, LinalgError> {
    let n = m.len();
    if let Some(row) = m.iter().find(|r| r.len() != n) {
        return Err(LinalgError::NotSquare { rows: n, cols: row.len() });
    }
    Ok(n)
}

/// Leading principal minors `D_1, .., D_n` via Bareiss without pivoting.
/// Stops early (returning the minors computed so far, ending in 0) when a
/// minor vanishes, since elimination without pivoting cannot continue.
pub fn leading_minors(m: &Matrix) -> Result<Vec<BigInt>, LinalgError> {
    let n = check_square(m)?;
    let mut a = m.clone();
    let mut minors = Vec::with_capacity(n);
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = a[k][k].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &pivot - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = pivot;
    }
    Ok(minors)
}

pub fn determinant(m: &Matrix) -> Result<BigInt, LinalgError> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(BigInt::one());
    }
    // Bareiss with row pivoting, tracking the sign of the permutation.
    let mut a = m.clone();
    let mut prev = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(sign * &a[n - 1][n - 1])
}

/// Solves `m x = rhs` exactly. The forward sweep is fraction-free; only the
/// final back substitution divides.
pub fn solve(m: &Matrix, rhs: &[BigInt]) -> Result<Vec<Rational>, LinalgError> {
    let n = check_square(m)?;
    if rhs.len() != n {
        return Err(LinalgError::RhsLength { got: rhs.len(), expected: n });
    }
    let mut a: Matrix =
        m.iter().zip(rhs).map(|(row, b)| row.iter().cloned().chain(std::iter::once(b.clone())).collect()).collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => a.swap(k, i),
                None => return Err(LinalgError::Singular(k + 1)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..=n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(a[i][n].clone());
        for j in i + 1..n {
            acc -= Rational::from_integer(a[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(a[i][i].clone());
    }
    Ok(x)
}

/// A Z-basis of `{ x in Z^n : rows · x = 0 }`, by unimodular column operations.
pub fn integer_kernel(rows: &Matrix, n: usize) -> Vec<Vec<BigInt>> {
    // Columns of `a` (m x n) and `u` (n x n) are transformed together so that
    // a_original * u = a at all times.
    let m = rows.len();
    let mut a: Matrix = rows.clone();
    let mut u: Matrix =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut pivot_col = 0;
    for r in 0..m {
        if pivot_col >= n {
            break;
        }
        // Euclid across columns pivot_col..n on row r.
        loop {
            let nz: Vec<usize> = (pivot_col..n).filter(|&j| !a[r][j].is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let best = *nz.iter().min_by_key(|&&j| a[r][j].abs()).expect("non-empty");
            swap_cols(&mut a, &mut u, pivot_col, best);
            let mut done = true;
            for j in pivot_col + 1..n {
                if a[r][j].is_zero() {
                    continue;
                }
                let q = a[r][j].div_floor(&a[r][pivot_col]);
                col_axpy(&mut a, &mut u, j, pivot_col, &q);
                if !a[r][j].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if !a[r][pivot_col].is_zero() {
            pivot_col += 1;
        }
    }
    (pivot_col..n).map(|j| (0..n).map(|i| u[i][j].clone()).collect()).collect()
}

fn swap_cols(a: &mut Matrix, u: &mut Matrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for row in a.iter_mut().chain(u.iter_mut()) {
        row.swap(i, j);
    }
}

/// col_j -= q * col_k
fn col_axpy(a: &mut Matrix, u: &mut Matrix, j: usize, k: usize, q: &BigInt) {
    for row in a.iter_mut().chain(u.iter_mut()) {
        let v = &row[k] * q;
        row[j] -= v;
    }
}

pub fn to_matrix(rows: &[Vec<i64>]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn minors_of_a_negative_definite_chain() {
        let m = to_matrix(&[vec![-2, 1, 0], vec![1, -2, 1], vec![0, 1, -2]]);
        let minors = leading_minors(&m).unwrap();
        assert_eq!(minors, vec![BigInt::from(-2), BigInt::from(3), BigInt::from(-4)]);
        assert_eq!(determinant(&m).unwrap(), BigInt::from(-4));
    }

    #[test]
    fn zero_minor_stops() {
        let m = to_matrix(&[vec![0, 1], vec![1, -2]]);
        assert_eq!(leading_minors(&m).unwrap(), vec![BigInt::zero()]);
        assert_eq!(determinant(&m).unwrap(), BigInt::from(-1));
    }

    #[test]
    fn solve_small_system() {
        let m = to_matrix(&[vec![-4]]);
        assert_eq!(solve(&m, &[BigInt::from(-2)]).unwrap(), vec![frac(1, 2)]);
        let m = to_matrix(&[vec![0, 1], vec![1, 1]]);
        let x = solve(&m, &[BigInt::from(2), BigInt::from(3)]).unwrap();
        assert_eq!(x, vec![frac(1, 1), frac(2, 1)]);
        let sing = to_matrix(&[vec![1, 2], vec![2, 4]]);
        assert!(matches!(solve(&sing, &[BigInt::one(), BigInt::one()]), Err(LinalgError::Singular(_))));
    }

    #[test]
    fn kernel_basis() {
        let rows = to_matrix(&[vec![2, 4, 6]]);
        let k = integer_kernel(&rows, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot: BigInt = v.iter().zip(&rows[0]).map(|(a, b)| a * b).sum();
            assert!(dot.is_zero());
        }
        // The kernel lattice of (2,4,6) is spanned by (-2,1,0),(-3,0,1): index 1.
        let det =
            determinant(&vec![vec![k[0][1].clone(), k[1][1].clone()], vec![k[0][2].clone(), k[1][2].clone()]]).unwrap();
        assert_eq!(det.abs(), BigInt::one());
    }
}
