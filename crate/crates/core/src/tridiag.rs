//! Eigenpairs of real tridiagonal operators.
//!
//! Operators whose off-diagonal pairs have positive products are similar to a
//! symmetric tridiagonal matrix; those go through Sturm-sequence bisection
//! and inverse iteration. Anything else falls back to a dense real Schur
//! decomposition.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `A[i][i] = diag[i]`, `A[i+1][i] = lower[i]`, `A[i][i+1] = upper[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Energy the boundary rows were assembled at.
    pub e_bc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit Euclidean norm, first non-negligible component positive.
    pub vector: Vec<f64>,
}

impl TridiagonalOperator {
    pub fn new(diag: Vec<f64>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let op = Self {
            diag,
            lower,
            upper,
            e_bc: 0.0,
        };
        op.validate()?;
        Ok(op)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.diag.len();
        if n == 0 || self.lower.len() + 1 != n || self.upper.len() + 1 != n {
            return Err(Error::Solver(format!(
                "inconsistent dimensions: diag {}, lower {}, upper {}",
                n,
                self.lower.len(),
                self.upper.len()
            )));
        }
        let finite = self
            .diag
            .iter()
            .chain(&self.lower)
            .chain(&self.upper)
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::Solver("non-finite matrix entry".into()));
        }
        Ok(())
    }

    pub fn is_symmetrizable(&self) -> bool {
        self.lower.iter().zip(&self.upper).all(|(l, u)| l * u > 0.0)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.lower[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.upper[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if i == j + 1 {
                self.lower[j]
            } else if j == i + 1 {
                self.upper[i]
            } else {
                0.0
            }
        })
    }

    fn norm_bound(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut r = self.diag[i].abs();
                if i > 0 {
                    r += self.lower[i - 1].abs();
                }
                if i + 1 < n {
                    r += self.upper[i].abs();
                }
                r
            })
            .fold(0.0, f64::max)
    }
}

/// The `k` algebraically smallest eigenpairs, ascending.
pub fn eigen_tridiagonal(op: &TridiagonalOperator, k: usize) -> Result<Vec<EigenPair>> {
    op.validate()?;
    if op.is_symmetrizable() {
        eigen_symmetrized(op, k)
    } else {
        eigen_dense(op, k)
    }
}

/// Symmetrizing path. Fails if some off-diagonal product is not positive.
pub fn eigen_symmetrized(op: &TridiagonalOperator, k: usize) -> Result<Vec<EigenPair>> {
    op.validate()?;
    check_k(op, k)?;
    if !op.is_symmetrizable() {
        return Err(Error::Solver("operator is not symmetrizable".into()));
    }
    let n = op.len();
    // D A D^{-1} symmetric with D_{i+1}/D_i = sqrt(upper_i / lower_i); kept in logs
    let mut log_d = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for i in 0..n - 1 {
        log_d[i + 1] = log_d[i] + 0.5 * (op.upper[i] / op.lower[i]).ln();
        off[i] = op.upper[i].signum() * (op.upper[i] * op.lower[i]).sqrt();
    }
    let sym = TridiagonalOperator {
        diag: op.diag.clone(),
        lower: off.clone(),
        upper: off,
        e_bc: op.e_bc,
    };
    let values = sturm_eigenvalues(&sym, k);
    let vectors = inverse_iteration(&sym, &values);
    let shift = log_d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(values
        .into_iter()
        .zip(vectors)
        .map(|(value, y)| {
            let x: Vec<f64> = y
                .iter()
                .zip(&log_d)
                .map(|(yi, ld)| yi * (shift - ld).exp())
                .collect();
            EigenPair {
                value,
                vector: normalize_and_fix_sign(x),
            }
        })
        .collect())
}

/// Dense path: eigenvalues from the real Schur form, vectors by inverse
/// iteration on the original (non-symmetric) tridiagonal.
pub fn eigen_dense(op: &TridiagonalOperator, k: usize) -> Result<Vec<EigenPair>> {
    op.validate()?;
    check_k(op, k)?;
    let dense = op.to_dense();
    let schur = dense
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Solver("dense Schur decomposition did not converge".into()))?;
    let mut values: Vec<(f64, f64)> = schur
        .complex_eigenvalues()
        .iter()
        .map(|c| (c.re, c.im))
        .collect();
    values.sort_by(|a, b| a.0.total_cmp(&b.0));
    let scale = op.norm_bound().max(1.0);
    let lowest = &values[..k];
    if let Some((re, im)) = lowest.iter().find(|(_, im)| im.abs() > 1e-10 * scale) {
        return Err(Error::Solver(format!(
            "complex eigenvalue {re} + {im}i among the lowest {k}"
        )));
    }
    let reals: Vec<f64> = lowest.iter().map(|v| v.0).collect();
    let vectors = inverse_iteration(op, &reals);
    Ok(reals
        .into_iter()
        .zip(vectors)
        .map(|(value, v)| EigenPair {
            value,
            vector: normalize_and_fix_sign(v),
        })
        .collect())
}

fn check_k(op: &TridiagonalOperator, k: usize) -> Result<()> {
    if k == 0 || k > op.len() {
        return Err(Error::Solver(format!(
            "requested {k} eigenpairs from a {}x{} operator",
            op.len(),
            op.len()
        )));
    }
    Ok(())
}

/// Number of eigenvalues of the symmetric tridiagonal below `x`.
fn sturm_count(sym: &TridiagonalOperator, x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut count = 0;
    let mut q = sym.diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..sym.len() {
        let q_prev = if q.abs() < tiny { -tiny } else { q };
        let e = sym.lower[i - 1];
        q = sym.diag[i] - x - e * e / q_prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn sturm_eigenvalues(sym: &TridiagonalOperator, k: usize) -> Vec<f64> {
    let n = sym.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += sym.lower[i - 1].abs();
        }
        if i + 1 < n {
            r += sym.upper[i].abs();
        }
        lo = lo.min(sym.diag[i] - r);
        hi = hi.max(sym.diag[i] + r);
    }
    let pad = 1e-12 * (hi - lo).abs().max(1.0);
    lo -= pad;
    hi += pad;
    (0..k)
        .map(|j| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(sym, mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
                if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) {
                    break;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Solves `(A - shift) x = rhs` for a general tridiagonal with partial pivoting.
fn solve_shifted(op: &TridiagonalOperator, shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = op.len();
    let guard = f64::EPSILON * op.norm_bound().max(1.0);
    // rows of U: (d, u1, u2); l multipliers; pivot flags
    let mut d: Vec<f64> = op.diag.iter().map(|x| x - shift).collect();
    let mut du: Vec<f64> = op.upper.clone();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut dl: Vec<f64> = op.lower.clone();
    let mut swapped = vec![false; n.saturating_sub(1)];
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i].abs() < guard {
                d[i] = guard;
            }
            let m = dl[i] / d[i];
            dl[i] = m;
            d[i + 1] -= m * du[i];
        } else {
            let m = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = m;
            let tmp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = tmp - m * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -m * du[i + 1];
            }
            swapped[i] = true;
        }
    }
    if d[n - 1].abs() < guard {
        d[n - 1] = guard;
    }
    let mut x = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        if swapped[i] {
            let tmp = x[i];
            x[i] = x[i + 1];
            x[i + 1] = tmp - dl[i] * x[i];
        } else {
            x[i + 1] -= dl[i] * x[i];
        }
    }
    x[n - 1] /= d[n - 1];
    if n > 1 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

fn inverse_iteration(op: &TridiagonalOperator, values: &[f64]) -> Vec<Vec<f64>> {
    let n = op.len();
    let scale = op.norm_bound().max(1.0);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
    for (j, &lambda) in values.iter().enumerate() {
        // deterministic, non-degenerate start vector
        let mut x: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i * 7 + j * 13) as f64 * 0.618_033_988_75).fract())
            .collect();
        let cluster: Vec<usize> = (0..j)
            .filter(|&i| (values[i] - lambda).abs() < 1e-8 * scale)
            .collect();
        for _ in 0..4 {
            x = solve_shifted(op, lambda, &x);
            for &i in &cluster {
                let dot: f64 = x.iter().zip(&out[i]).map(|(a, b)| a * b).sum();
                x.iter_mut().zip(&out[i]).for_each(|(a, b)| *a -= dot * b);
            }
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        out.push(x);
    }
    out
}

fn normalize_and_fix_sign(mut x: Vec<f64>) -> Vec<f64> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let maxabs = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let first = x.iter().copied().find(|v| v.abs() > 1e-8 * maxabs).unwrap_or(1.0);
    let s = if first < 0.0 { -1.0 / norm } else { 1.0 / norm };
    x.iter_mut().for_each(|v| *v *= s);
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_3x3_spectrum() {
        let op = TridiagonalOperator::new(vec![2.0; 3], vec![-1.0; 2], vec![-1.0; 2]).unwrap();
        let pairs = eigen_tridiagonal(&op, 3).unwrap();
        let r2 = 2f64.sqrt();
        for (p, e) in pairs.iter().zip([2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((p.value - e).abs() < 1e-14);
            let ax = op.apply(&p.vector);
            for (a, x) in ax.iter().zip(&p.vector) {
                assert!((a - p.value * x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lowest_vector_positive() {
        let n = 50;
        let op = TridiagonalOperator::new(
            (0..n).map(|i| 2.0 + 0.01 * i as f64).collect(),
            vec![-1.2; n - 1],
            vec![-0.8; n - 1],
        )
        .unwrap();
        let p = &eigen_tridiagonal(&op, 1).unwrap()[0];
        assert!(p.vector.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn non_symmetrizable_goes_dense() {
        // rotation-like block has complex eigenvalues
        let op = TridiagonalOperator::new(vec![0.0, 0.0], vec![-1.0], vec![1.0]).unwrap();
        assert!(!op.is_symmetrizable());
        assert!(matches!(eigen_tridiagonal(&op, 1), Err(Error::Solver(_))));
        // lower·upper < 0 but real spectrum via the diagonal
        let op = TridiagonalOperator::new(vec![0.0, 5.0, 9.0], vec![-0.1, 0.1], vec![0.1, 0.1]).unwrap();
        let pairs = eigen_tridiagonal(&op, 3).unwrap();
        for p in &pairs {
            let ax = op.apply(&p.vector);
            for (a, x) in ax.iter().zip(&p.vector) {
                assert!((a - p.value * x).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn bad_requests() {
        let op = TridiagonalOperator::new(vec![1.0; 3], vec![1.0; 2], vec![1.0; 2]).unwrap();
        assert!(eigen_tridiagonal(&op, 0).is_err());
        assert!(eigen_tridiagonal(&op, 4).is_err());
        assert!(TridiagonalOperator::new(vec![1.0; 3], vec![1.0; 1], vec![1.0; 2]).is_err());
        assert!(TridiagonalOperator::new(vec![f64::NAN; 2], vec![1.0], vec![1.0]).is_err());
    }
}
