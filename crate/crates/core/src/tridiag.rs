//! Tridiagonal linear algebra: a pivoting solver and Sturm-count bisection
//! for symmetric pencils `A − λB` with `A` tridiagonal and `B` diagonal.

use crate::error::{Error, Result};

/// Solves a general tridiagonal system with partial pivoting.
///
/// `sub[i]` couples row `i + 1` to column `i`; `sup[i]` couples row `i` to column `i + 1`.
pub fn solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n || sub.len() + 1 != n.max(1) || sup.len() + 1 != n.max(1) {
        return Err(Error::InvalidArgument("tridiagonal dimensions disagree".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // Row i of the factorization keeps up to three upper entries: d, u1, u2.
    let mut d = diag.to_vec();
    let mut u1: Vec<f64> = sup.to_vec();
    u1.push(0.0);
    let mut u2 = vec![0.0; n];
    let mut l = sub.to_vec();
    let mut b = rhs.to_vec();
    for i in 0..n - 1 {
        if l[i].abs() > d[i].abs() {
            // Swap rows i and i + 1.
            let (di, ui1) = (d[i], u1[i]);
            d[i] = l[i];
            u1[i] = d[i + 1];
            u2[i] = u1[i + 1];
            let f = di / d[i];
            d[i + 1] = ui1 - f * u1[i];
            u1[i + 1] = -f * u2[i];
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
            l[i] = f;
        } else {
            if d[i] == 0.0 {
                return Err(Error::Eigen("singular tridiagonal matrix".into()));
            }
            let f = l[i] / d[i];
            d[i + 1] -= f * u1[i];
            b[i + 1] -= f * b[i];
            l[i] = f;
        }
    }
    if d[n - 1] == 0.0 {
        return Err(Error::Eigen("singular tridiagonal matrix".into()));
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= u1[i] * x[i + 1];
        }
        if i + 2 < n {
            s -= u2[i] * x[i + 2];
        }
        x[i] = s / d[i];
    }
    Ok(x)
}

/// Solves `T x = rhs` for symmetric tridiagonal `T = (diag, off)`.
pub fn solve_symmetric(diag: &[f64], off: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    solve(off, diag, off, rhs)
}

/// `LDLᵀ` factorization of a symmetric positive definite tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct SpdFactor {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl SpdFactor {
    pub fn new(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        if n == 0 || off.len() + 1 != n {
            return Err(Error::InvalidArgument("tridiagonal dimensions disagree".into()));
        }
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(n - 1);
        d.push(diag[0]);
        for i in 1..n {
            let li = off[i - 1] / d[i - 1];
            l.push(li);
            d.push(diag[i] - li * off[i - 1]);
        }
        if d.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::Eigen("matrix is not positive definite".into()));
        }
        Ok(Self { d, l })
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
    }
}

/// Symmetric tridiagonal `A` paired with a nonnegative diagonal `B`.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub mass: Vec<f64>,
}

impl Pencil {
    pub fn new(diag: Vec<f64>, off: Vec<f64>, mass: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || off.len() + 1 != n || mass.len() != n {
            return Err(Error::InvalidArgument("pencil dimensions disagree".into()));
        }
        if mass.iter().any(|&b| !(b >= 0.0)) {
            return Err(Error::InvalidArgument("pencil mass must be nonnegative".into()));
        }
        Ok(Self { diag, off, mass })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of pencil eigenvalues strictly below `lambda` (negative inertia of `A − λB`).
    pub fn count_below(&self, lambda: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut pivot = 1.0;
        for i in 0..self.len() {
            let a = self.diag[i] - lambda * self.mass[i];
            pivot = if i == 0 {
                a
            } else {
                a - self.off[i - 1] * self.off[i - 1] / pivot
            };
            if pivot == 0.0 {
                pivot = -tiny;
            }
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by Sturm bisection.
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::Eigen(format!("index {k} out of range")));
        }
        let mut lo = -1.0;
        while self.count_below(lo) > k {
            lo *= 2.0;
            if !lo.is_finite() || lo < -1e300 {
                return Err(Error::Eigen("no lower bound for pencil spectrum".into()));
            }
        }
        let mut hi = 1.0;
        while self.count_below(hi) <= k {
            hi *= 2.0;
            if !hi.is_finite() || hi > 1e300 {
                return Err(Error::Eigen("pencil eigenvalue is infinite".into()));
            }
        }
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Eigenvector for a (converged) eigenvalue by inverse iteration, `B`-normalized.
    pub fn eigenvector(&self, lambda: f64) -> Result<Vec<f64>> {
        let n = self.len();
        let scale = lambda.abs().max(1.0);
        let mut shift = lambda * (1.0 + 4.0 * f64::EPSILON) + 1e-14 * scale;
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.01 * (i % 7) as f64).collect();
        for _ in 0..6 {
            let diag: Vec<f64> = (0..n).map(|i| self.diag[i] - shift * self.mass[i]).collect();
            let rhs: Vec<f64> = (0..n).map(|i| self.mass[i] * x[i]).collect();
            let y = match solve_symmetric(&diag, &self.off, &rhs) {
                Ok(y) if y.iter().all(|v| v.is_finite()) => y,
                _ => {
                    shift += 1e-10 * scale;
                    continue;
                }
            };
            let norm = self.mass_norm(&y);
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::Eigen("inverse iteration collapsed".into()));
            }
            x = y.iter().map(|v| v / norm).collect();
        }
        Ok(x)
    }

    fn mass_norm(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.mass)
            .map(|(v, b)| b * v * v)
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        let ax = self.apply(x);
        let num: f64 = ax.iter().zip(x).map(|(a, b)| a * b).sum();
        let den: f64 = x.iter().zip(&self.mass).map(|(v, b)| b * v * v).sum();
        num / den
    }

    /// Eigenvalue of smallest magnitude.
    pub fn smallest_magnitude(&self) -> Result<f64> {
        let below = self.count_below(0.0);
        let mut best = f64::INFINITY;
        if below < self.len() {
            best = self.eigenvalue(below)?;
        }
        if below > 0 {
            let neg = self.eigenvalue(below - 1)?;
            if neg.abs() < best.abs() {
                best = neg;
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pivoting_solver_matches_dense() {
        // Indefinite matrix with a zero leading pivot.
        let sub = [2.0, -1.0, 3.0];
        let diag = [0.0, 1.0, -2.0, 4.0];
        let sup = [1.0, 5.0, 0.5];
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let rhs: Vec<f64> = (0..4)
            .map(|i| {
                let mut s = diag[i] * x_true[i];
                if i > 0 {
                    s += sub[i - 1] * x_true[i - 1];
                }
                if i < 3 {
                    s += sup[i] * x_true[i + 1];
                }
                s
            })
            .collect();
        let x = solve(&sub, &diag, &sup, &rhs).unwrap();
        for (a, b) in x.iter().zip(x_true) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn spd_factor_solves() {
        let diag = vec![4.0, 5.0, 6.0, 7.0];
        let off = vec![-1.0, 2.0, -0.5];
        let x_true = [1.0, -1.0, 2.0, 0.25];
        let p = Pencil::new(diag.clone(), off.clone(), vec![1.0; 4]).unwrap();
        let mut x = p.apply(&x_true);
        SpdFactor::new(&diag, &off).unwrap().solve_in_place(&mut x);
        for (a, b) in x.iter().zip(x_true) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(SpdFactor::new(&[1.0, 1.0], &[2.0]).is_err());
    }

    #[test]
    fn sturm_bisection_on_second_difference() {
        // Eigenvalues of tridiag(−1, 2, −1) of size n: 2 − 2cos(kπ/(n+1)).
        let n = 50;
        let p = Pencil::new(vec![2.0; n], vec![-1.0; n - 1], vec![1.0; n]).unwrap();
        for k in [0, 1, 10, 49] {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            let got = p.eigenvalue(k).unwrap();
            assert!((got - exact).abs() < 1e-13, "k={k}");
            let v = p.eigenvector(got).unwrap();
            assert!((p.rayleigh_quotient(&v) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn generalized_pencil_with_tiny_mass() {
        let diag = vec![2.0, 2.0, 2.0];
        let off = vec![-1.0, -1.0];
        let mass = vec![1.0, 1e-30, 1.0];
        let p = Pencil::new(diag, off, mass).unwrap();
        let lam0 = p.eigenvalue(0).unwrap();
        let v = p.eigenvector(lam0).unwrap();
        assert!(((p.rayleigh_quotient(&v) - lam0) / lam0).abs() < 1e-10);
        assert_eq!(p.count_below(lam0 * 0.999), 0);
    }
}
