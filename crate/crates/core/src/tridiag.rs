//! Symmetric tridiagonal eigensolver: Sturm-count bisection for eigenvalues,
//! inverse iteration for eigenvectors.
//!
//! The finite-difference radial operator reduces to this form on a log grid;
//! only the lowest few eigenvalues are ever requested, so bisection per index
//! beats a full QL sweep and is immune to the strong grading the log grid
//! produces near a tiny inner radius.

/// Symmetric tridiagonal matrix: diagonal `d` (len n), off-diagonal `e`
/// (len n-1).
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiag {
    pub fn new(d: Vec<f64>, e: Vec<f64>) -> Self {
        assert!(!d.is_empty() && e.len() + 1 == d.len());
        SymTridiag { d, e }
    }

    pub fn n(&self) -> usize {
        self.d.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm count via the signs of
    /// the LDL^T pivots of T - xI).
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0usize;
        let mut q = self.d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.n() {
            let e2 = self.e[i - 1] * self.e[i - 1];
            let denom = if q == 0.0 { 1e-300 } else { q };
            q = (self.d[i] - x) - e2 / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin bounds containing the whole spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.n();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.e[i - 1].abs();
            }
            if i + 1 < n {
                r += self.e[i].abs();
            }
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// The `count` smallest eigenvalues, ascending, by bisection.
    pub fn smallest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let count = count.min(self.n());
        let (glo, ghi) = self.bounds();
        (0..count)
            .map(|k| self.eigenvalue_by_index(k, glo, ghi))
            .collect()
    }

    fn eigenvalue_by_index(&self, k: usize, glo: f64, ghi: f64) -> f64 {
        let mut lo = glo;
        let mut hi = ghi;
        // invariant: count_below(lo) <= k < count_below(hi)
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-14 * hi.abs().max(lo.abs()).max(1e-3) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an isolated eigenvalue estimate, by inverse iteration
    /// with partial-pivot LU on (T - lambda I). Returns the normalized vector
    /// and the refined Rayleigh quotient.
    pub fn inverse_iteration(&self, lambda: f64) -> (Vec<f64>, f64) {
        let n = self.n();
        let shift = lambda * (1.0 + 1e-12) + 1e-300;
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut rayleigh = lambda;
        for _ in 0..4 {
            let w = self.solve_shifted(shift, &v);
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / norm;
            }
            rayleigh = self.rayleigh_quotient(&v);
        }
        (v, rayleigh)
    }

    fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let n = self.n();
        let mut num = 0.0;
        for i in 0..n {
            let mut tv = self.d[i] * v[i];
            if i > 0 {
                tv += self.e[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                tv += self.e[i] * v[i + 1];
            }
            num += v[i] * tv;
        }
        num
    }

    /// Solve (T - shift I) w = rhs by LU with partial pivoting on the
    /// tridiagonal band (fill-in of one extra superdiagonal).
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.n();
        // row i holds (sub[i], diag[i], sup1[i], sup2[i]) at columns
        // (i-1, i, i+1, i+2)
        let mut diag: Vec<f64> = self.d.iter().map(|x| x - shift).collect();
        let mut sup1 = vec![0.0; n];
        let mut sup2 = vec![0.0; n];
        let mut sub = vec![0.0; n];
        for i in 0..n - 1 {
            sup1[i] = self.e[i];
            sub[i + 1] = self.e[i];
        }
        let mut w: Vec<f64> = rhs.to_vec();
        for i in 0..n - 1 {
            if sub[i + 1].abs() > diag[i].abs() {
                // full row swap of rows i and i+1, column by column
                std::mem::swap(&mut diag[i], &mut sub[i + 1]); // column i
                std::mem::swap(&mut sup1[i], &mut diag[i + 1]); // column i+1
                std::mem::swap(&mut sup2[i], &mut sup1[i + 1]); // column i+2
                w.swap(i, i + 1);
            }
            let piv = if diag[i] == 0.0 { 1e-300 } else { diag[i] };
            let m = sub[i + 1] / piv;
            diag[i + 1] -= m * sup1[i];
            sup1[i + 1] -= m * sup2[i];
            w[i + 1] -= m * w[i];
            sub[i + 1] = 0.0;
        }
        // back substitution
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = w[i];
            if i + 1 < n {
                acc -= sup1[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= sup2[i] * x[i + 2];
            }
            let piv = if diag[i] == 0.0 { 1e-300 } else { diag[i] };
            x[i] = acc / piv;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SymTridiag {
        SymTridiag::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn discrete_laplacian_eigenvalues() {
        // eigenvalues of tridiag(-1, 2, -1) are 2 - 2 cos(k pi / (n+1))
        let n = 64;
        let t = laplacian_1d(n);
        let got = t.smallest_eigenvalues(5);
        for (k, lam) in got.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((lam - want).abs() < 1e-12, "k={k}: {lam} vs {want}");
        }
    }

    #[test]
    fn sturm_count_is_monotone_and_total() {
        let t = SymTridiag::new(vec![1.0, -2.0, 4.0, 0.5], vec![0.3, -1.2, 0.9]);
        let (lo, hi) = t.bounds();
        assert_eq!(t.count_below(lo - 1.0), 0);
        assert_eq!(t.count_below(hi + 1.0), 4);
        let mut prev = 0;
        let mut x = lo;
        while x < hi {
            let c = t.count_below(x);
            assert!(c >= prev);
            prev = c;
            x += (hi - lo) / 57.0;
        }
    }

    #[test]
    fn inverse_iteration_gives_residual_small() {
        let n = 80;
        let t = laplacian_1d(n);
        let lams = t.smallest_eigenvalues(3);
        for lam in lams {
            let (v, refined) = t.inverse_iteration(lam);
            // residual || T v - lam v ||
            let mut res = 0.0f64;
            for i in 0..n {
                let mut tv = t.d[i] * v[i];
                if i > 0 {
                    tv += t.e[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    tv += t.e[i] * v[i + 1];
                }
                res += (tv - refined * v[i]).powi(2);
            }
            assert!(res.sqrt() < 1e-9, "residual {res}");
        }
    }

    #[test]
    fn graded_matrix_small_eigenvalues_resolved() {
        // strongly graded diagonal, like the log-grid radial operator
        let n = 40;
        let mut d: Vec<f64> = (0..n).map(|i| 1e12 * (-(i as f64)).exp() + 2.0).collect();
        d[n - 1] = 2.5;
        let e = vec![-1.0; n - 1];
        let t = SymTridiag::new(d, e);
        let lams = t.smallest_eigenvalues(2);
        assert!(lams[0] > 0.0 && lams[0] < lams[1]);
        // count is consistent with the returned values
        assert_eq!(t.count_below(lams[0] - 1e-6), 0);
        assert!(t.count_below(lams[1] + 1e-6) >= 2);
    }
}
