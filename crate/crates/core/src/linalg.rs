//! Dense LU decomposition with partial pivoting, used for the Markov chain
//! linear systems (absorption probabilities, stationary distributions,
//! hitting times).

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-12;

/// LU factorization of a square matrix with row pivoting.
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Factorizes `a` (row-major, n×n). Fails on singular matrices.
    pub fn factor(mut a: Vec<f64>, n: usize) -> Result<Lu> {
        assert_eq!(a.len(), n * n);
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            // Partial pivoting: pick the largest magnitude in this column.
            let mut best = col;
            let mut best_val = a[perm[col] * n + col].abs();
            for row in col + 1..n {
                let v = a[perm[row] * n + col].abs();
                if v > best_val {
                    best = row;
                    best_val = v;
                }
            }
            if best_val < PIVOT_TOL {
                return Err(Error::Numeric(format!(
                    "singular linear system (pivot {best_val:.2e} at column {col})"
                )));
            }
            perm.swap(col, best);
            let prow = perm[col];
            let pivot = a[prow * n + col];
            for row in col + 1..n {
                let r = perm[row];
                let factor = a[r * n + col] / pivot;
                a[r * n + col] = factor;
                if factor != 0.0 {
                    for k in col + 1..n {
                        a[r * n + k] -= factor * a[prow * n + k];
                    }
                }
            }
        }
        Ok(Lu { n, lu: a, perm })
    }

    /// Solves `A x = b` for one right-hand side.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut s = b[self.perm[i]];
            for k in 0..i {
                s -= self.lu[self.perm[i] * n + k] * y[k];
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lu[self.perm[i] * n + k] * x[k];
            }
            x[i] = s / self.lu[self.perm[i] * n + i];
        }
        x
    }
}

/// Convenience: solve a dense system once.
pub fn solve_dense(a: Vec<f64>, n: usize, b: &[f64]) -> Result<Vec<f64>> {
    Ok(Lu::factor(a, n)?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // 2x + y = 5; x + 3y = 10 -> x = 1, y = 3
        let a = vec![2.0, 1.0, 1.0, 3.0];
        let x = solve_dense(a, 2, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_singular() {
        let a = vec![1.0, 2.0, 2.0, 4.0];
        assert!(Lu::factor(a, 2).is_err());
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let a = vec![0.0, 1.0, 1.0, 0.0];
        let x = solve_dense(a, 2, &[2.0, 3.0]).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }
}
