//! Lowest eigenpair of a real symmetric tridiagonal matrix.
//!
//! The eigenvalue comes from bisection on the Sturm count, the eigenvector
//! from shifted inverse iteration with a Thomas solve.

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 256;
const INVERSE_ITERATIONS: usize = 4;

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    /// `off` holds the `n - 1` sub/super-diagonal entries.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::invalid("empty tridiagonal matrix"));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::invalid("off-diagonal must have n - 1 entries"));
        }
        if diag.iter().chain(&off).any(|v| !v.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(Self { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let scale = self.gershgorin_radius().max(1.0);
        let guard = f64::EPSILON * f64::EPSILON * scale;
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let qs = if q.abs() < guard { guard.copysign(q) } else { q };
            q = (self.diag[i] - x) - self.off[i - 1] * self.off[i - 1] / qs;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin_radius(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Smallest eigenvalue by Sturm bisection.
    pub fn smallest_eigenvalue(&self) -> Result<f64> {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let tol = 4.0 * f64::EPSILON * scale;
        for _ in 0..MAX_BISECTIONS {
            if hi - lo <= tol {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return Ok(mid);
            }
            if self.sturm_count(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::numerical("Sturm bisection did not converge"))
    }

    /// Unit-norm eigenvector for an eigenvalue `lambda` at the bottom of the
    /// spectrum. The sign is fixed so that the entries sum to a nonnegative
    /// value.
    pub fn lowest_eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        if n == 1 {
            return Ok(vec![1.0]);
        }
        let (lo, hi) = self.gershgorin();
        let spread = (hi - lo).max(f64::MIN_POSITIVE);
        // Shifting just below the eigenvalue keeps the factorization positive
        // definite.
        let shift = lambda - 1e-10 * spread;
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..INVERSE_ITERATIONS {
            v = self.solve_shifted(shift, &v)?;
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                return Err(Error::numerical("inverse iteration produced a degenerate vector"));
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        if v.iter().sum::<f64>() < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }

        let residual = self.residual_norm(lambda, &v);
        if residual > 1e-6 * spread {
            return Err(Error::numerical(format!(
                "inverse iteration residual {residual:e} too large"
            )));
        }
        Ok(v)
    }

    /// Solves `(T - shift I) x = rhs` by the Thomas algorithm.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0] - shift;
        if pivot == 0.0 {
            return Err(Error::numerical("zero pivot in shifted solve"));
        }
        c[0] = if n > 1 { self.off[0] / pivot } else { 0.0 };
        d[0] = rhs[0] / pivot;
        for i in 1..n {
            pivot = (self.diag[i] - shift) - self.off[i - 1] * c[i - 1];
            if pivot == 0.0 || !pivot.is_finite() {
                return Err(Error::numerical("zero pivot in shifted solve"));
            }
            if i + 1 < n {
                c[i] = self.off[i] / pivot;
            }
            d[i] = (rhs[i] - self.off[i - 1] * d[i - 1]) / pivot;
        }
        let mut x = d;
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }

    fn residual_norm(&self, lambda: f64, v: &[f64]) -> f64 {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut tv = self.diag[i] * v[i];
                if i > 0 {
                    tv += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    tv += self.off[i] * v[i + 1];
                }
                let r = tv - lambda * v[i];
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dirichlet Laplacian tridiag(-1, 2, -1): eigenvalues 2 - 2cos(kπ/(n+1)).
    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap()
    }

    #[test]
    fn laplacian_lowest_eigenpair() {
        let n = 200;
        let t = laplacian(n);
        let expected = 2.0 - 2.0 * (std::f64::consts::PI / (n as f64 + 1.0)).cos();
        let lambda = t.smallest_eigenvalue().unwrap();
        assert!((lambda - expected).abs() < 1e-13);

        let v = t.lowest_eigenvector(lambda).unwrap();
        let h = std::f64::consts::PI / (n as f64 + 1.0);
        let norm = (0..n).map(|i| ((i + 1) as f64 * h).sin().powi(2)).sum::<f64>().sqrt();
        for (i, x) in v.iter().enumerate() {
            let exact = ((i + 1) as f64 * h).sin() / norm;
            assert!((x - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn sturm_count_matches_spectrum() {
        let n = 10;
        let t = laplacian(n);
        for k in 1..=n {
            let ev = 2.0 - 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert_eq!(t.sturm_count(ev + 1e-9), k);
            assert_eq!(t.sturm_count(ev - 1e-9), k - 1);
        }
    }

    #[test]
    fn diagonal_matrix() {
        let t = SymTridiagonal::new(vec![3.0, -1.0, 2.0], vec![0.0, 0.0]).unwrap();
        let lambda = t.smallest_eigenvalue().unwrap();
        assert!((lambda + 1.0).abs() < 1e-14);
        let v = t.lowest_eigenvector(lambda).unwrap();
        assert!((v[1].abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_entry() {
        let t = SymTridiagonal::new(vec![5.0], vec![]).unwrap();
        assert_eq!(t.smallest_eigenvalue().unwrap(), 5.0);
        assert_eq!(t.lowest_eigenvector(5.0).unwrap(), vec![1.0]);
    }

    #[test]
    fn rejects_malformed() {
        assert!(SymTridiagonal::new(vec![], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(SymTridiagonal::new(vec![1.0, f64::NAN], vec![0.0]).is_err());
    }
}
