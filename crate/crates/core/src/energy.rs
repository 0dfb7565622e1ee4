//! Energy functional of the coupled system, its gradient, and the Nehari
//! projection.
//!
//! With `Q(z) = ‖u‖² + ‖v‖² − 2∫(κ₀+κ)uv` and
//! `P(z) = ∫[(a₀+a)|u|^p + (b₀+b)|v|^p + 2(β₀+β)|u|^{p/2}|v|^{p/2}]`
//! the energy is `Φ(z) = Q(z)/2 − P(z)/p`. The Nehari functional is
//! `G(z) = Φ'(z)z = Q(z) − P(z)` and the unique `t > 0` with `G(tz) = 0` is
//! `(Q/P)^{1/(p−2)}`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{RadialGrid, ScalarField};

/// Tolerance for perturbation values on the truncation boundary.
pub const BOUNDARY_DECAY_TOL: f64 = 1e-8;

/// Optional 1-periodic replacements for the constants `a₀`, `b₀`, sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicProfiles {
    pub a0: Vec<f64>,
    pub b0: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Couplings {
    pub a0: f64,
    pub b0: f64,
    pub beta0: f64,
    pub kappa0: f64,
    pub p: f64,
    pub periodic: Option<PeriodicProfiles>,
}

impl Couplings {
    pub fn new(a0: f64, b0: f64, beta0: f64, kappa0: f64, p: f64) -> Result<Self> {
        let c = Self {
            a0,
            b0,
            beta0,
            kappa0,
            p,
            periodic: None,
        };
        c.validate()?;
        Ok(c)
    }

    /// `p = 4`, `a₀ = b₀ = μ`.
    pub fn cubic(mu: f64, beta0: f64, kappa0: f64) -> Result<Self> {
        Self::new(mu, mu, beta0, kappa0, 4.0)
    }

    pub fn with_kappa0(&self, kappa0: f64) -> Result<Self> {
        let mut c = self.clone();
        c.kappa0 = kappa0;
        c.validate()?;
        Ok(c)
    }

    /// Samples 1-periodic `a₀(x)`, `b₀(x)` on `grid` (full-line grids).
    pub fn with_periodic(
        &self,
        grid: &RadialGrid,
        a0: impl Fn(f64) -> f64,
        b0: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let a: Vec<f64> = grid.nodes().iter().map(|&x| a0(x)).collect();
        let b: Vec<f64> = grid.nodes().iter().map(|&x| b0(x)).collect();
        if a.iter().chain(&b).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidCouplings(
                "periodic a₀(x), b₀(x) must be positive".into(),
            ));
        }
        let mut c = self.clone();
        c.periodic = Some(PeriodicProfiles { a0: a, b0: b });
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a0, self.b0, self.beta0, self.kappa0, self.p]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidCouplings("non-finite coupling constant".into()));
        }
        if !(self.a0 > 0.0 && self.b0 > 0.0) {
            return Err(Error::InvalidCouplings(format!(
                "(A₀): a₀ and b₀ must be positive (got a₀ = {}, b₀ = {})",
                self.a0, self.b0
            )));
        }
        if !(self.kappa0 > 0.0 && self.kappa0 < 1.0) {
            return Err(Error::InvalidCouplings(format!(
                "(A₀): 0 < κ₀ < 1 required (got κ₀ = {})",
                self.kappa0
            )));
        }
        if !(self.p > 2.0) {
            return Err(Error::InvalidCouplings(format!(
                "exponent p must exceed 2 (got {})",
                self.p
            )));
        }
        Ok(())
    }

    /// Checks `p < 2N/(N−2)` for `N ≥ 3`.
    pub fn validate_for_dimension(&self, dimension: usize) -> Result<()> {
        self.validate()?;
        if dimension >= 3 {
            let critical = 2.0 * dimension as f64 / (dimension as f64 - 2.0);
            if self.p >= critical {
                return Err(Error::InvalidCouplings(format!(
                    "exponent p = {} is not subcritical: need p < {critical} in dimension {dimension}",
                    self.p
                )));
            }
        }
        Ok(())
    }
}

/// Decaying spatial perturbations `a(x), b(x), β(x), κ(x)`; `None` is the zero profile.
#[derive(Debug, Clone, Default)]
pub struct PerturbationProfile {
    pub a: Option<ScalarField>,
    pub b: Option<ScalarField>,
    pub beta: Option<ScalarField>,
    pub kappa: Option<ScalarField>,
}

impl PerturbationProfile {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn with_a(mut self, f: ScalarField) -> Self {
        self.a = Some(f);
        self
    }
    pub fn with_b(mut self, f: ScalarField) -> Self {
        self.b = Some(f);
        self
    }
    pub fn with_beta(mut self, f: ScalarField) -> Self {
        self.beta = Some(f);
        self
    }
    pub fn with_kappa(mut self, f: ScalarField) -> Self {
        self.kappa = Some(f);
        self
    }

    pub fn is_zero(&self) -> bool {
        self.fields()
            .iter()
            .all(|f| f.is_none_or(|f| f.values().iter().all(|&v| v == 0.0)))
    }

    pub fn fields(&self) -> [Option<&ScalarField>; 4] {
        [
            self.a.as_ref(),
            self.b.as_ref(),
            self.beta.as_ref(),
            self.kappa.as_ref(),
        ]
    }

    pub fn sup_abs(field: Option<&ScalarField>) -> f64 {
        field.map_or(0.0, |f| f.sup_norm())
    }
}

/// Pointwise coefficients `a₀+a`, `b₀+b`, `β₀+β`, `κ₀+κ` on a grid, validated.
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub grid: Arc<RadialGrid>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub beta: Vec<f64>,
    pub kappa: Vec<f64>,
    pub p: f64,
    pub kappa0: f64,
}

fn profile_values(
    grid: &Arc<RadialGrid>,
    field: Option<&ScalarField>,
    name: &str,
) -> Result<Vec<f64>> {
    match field {
        None => Ok(vec![0.0; grid.len()]),
        Some(f) => {
            if **f.grid() != **grid {
                return Err(Error::GridMismatch);
            }
            for i in 0..grid.len() {
                if grid.is_dirichlet(i) && f.values()[i].abs() >= BOUNDARY_DECAY_TOL {
                    return Err(Error::InvalidPerturbation(format!(
                        "(A₀): {name}(x) must vanish as |x| → ∞; boundary value {:.3e} exceeds {BOUNDARY_DECAY_TOL:e}",
                        f.values()[i]
                    )));
                }
            }
            Ok(f.values().to_vec())
        }
    }
}

fn extrema(v: &[f64]) -> (f64, f64) {
    v.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

impl Coefficients {
    pub fn new(grid: &Arc<RadialGrid>, c: &Couplings, pert: &PerturbationProfile) -> Result<Self> {
        c.validate_for_dimension(grid.dimension())?;
        let pa = profile_values(grid, pert.a.as_ref(), "a")?;
        let pb = profile_values(grid, pert.b.as_ref(), "b")?;
        let pbeta = profile_values(grid, pert.beta.as_ref(), "β")?;
        let pkappa = profile_values(grid, pert.kappa.as_ref(), "κ")?;
        let (base_a, base_b): (Vec<f64>, Vec<f64>) = match &c.periodic {
            Some(per) => {
                if per.a0.len() != grid.len() || per.b0.len() != grid.len() {
                    return Err(Error::GridMismatch);
                }
                (per.a0.clone(), per.b0.clone())
            }
            None => (vec![c.a0; grid.len()], vec![c.b0; grid.len()]),
        };
        let a: Vec<f64> = base_a.iter().zip(&pa).map(|(x, y)| x + y).collect();
        let b: Vec<f64> = base_b.iter().zip(&pb).map(|(x, y)| x + y).collect();
        let beta: Vec<f64> = pbeta.iter().map(|x| c.beta0 + x).collect();
        let kappa: Vec<f64> = pkappa.iter().map(|x| c.kappa0 + x).collect();
        let (amin, _) = extrema(&a);
        if !(amin > 0.0) {
            return Err(Error::InvalidPerturbation(format!(
                "(A₀): a₀ + inf a must be > 0 (got {amin})"
            )));
        }
        let (bmin, _) = extrema(&b);
        if !(bmin > 0.0) {
            return Err(Error::InvalidPerturbation(format!(
                "(A₀): b₀ + inf b must be > 0 (got {bmin})"
            )));
        }
        let (kmin, kmax) = extrema(&kappa);
        if !(kmin > 0.0) {
            return Err(Error::InvalidPerturbation(format!(
                "(A₀): κ₀ + inf κ must be > 0 (got {kmin})"
            )));
        }
        if !(kmax < 1.0) {
            return Err(Error::InvalidPerturbation(format!(
                "(A₀): κ₀ + sup κ must be < 1 (got {kmax})"
            )));
        }
        Ok(Self {
            grid: Arc::clone(grid),
            a,
            b,
            beta,
            kappa,
            p: c.p,
            kappa0: c.kappa0,
        })
    }

    /// `κ₀ + sup κ`.
    pub fn kappa_sup(&self) -> f64 {
        extrema(&self.kappa).1
    }

    /// `(Q, P)` for raw value slices.
    pub fn parts(&self, u: &[f64], v: &[f64]) -> (f64, f64) {
        let g = &self.grid;
        let p = self.p;
        let grad = g.dirichlet_form(u, u) + g.dirichlet_form(v, v);
        let mut mass = 0.0;
        let mut coupling = 0.0;
        let mut nonlinear = 0.0;
        for (i, q) in g.weights().iter().enumerate() {
            let (x, y) = (u[i], v[i]);
            mass += q * (x * x + y * y);
            coupling += q * self.kappa[i] * x * y;
            let (ax, ay) = (x.abs(), y.abs());
            let local = if p == 4.0 {
                let (x2, y2) = (x * x, y * y);
                self.a[i] * x2 * x2 + self.b[i] * y2 * y2 + 2.0 * self.beta[i] * x2 * y2
            } else {
                self.a[i] * ax.powf(p) + self.b[i] * ay.powf(p)
                    + 2.0 * self.beta[i] * (ax * ay).powf(0.5 * p)
            };
            nonlinear += q * local;
        }
        (grad + mass - 2.0 * coupling, nonlinear)
    }

    pub fn energy(&self, u: &[f64], v: &[f64]) -> f64 {
        let (q, pp) = self.parts(u, v);
        0.5 * q - pp / self.p
    }

    /// One gradient row; the `v` row is `row(lap_v, v, u, b, …)`.
    #[inline]
    fn row(&self, lap: f64, x: f64, y: f64, self_coef: f64, i: usize) -> f64 {
        let p = self.p;
        let (self_term, cross) = if p == 4.0 {
            (x * x * x, x * (y * y))
        } else {
            let h = 0.5 * p;
            (
                x.abs().powf(p - 2.0) * x,
                x.signum() * x.abs().powf(h - 1.0) * y.abs().powf(h),
            )
        };
        -lap + x - self_coef * self_term - self.beta[i] * cross - self.kappa[i] * y
    }

    /// Strong-form gradient `W⁻¹∇Φ`; zero on Dirichlet nodes.
    pub fn gradient(&self, u: &[f64], v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let g = &self.grid;
        let lu = g.laplacian(u);
        let lv = g.laplacian(v);
        let m = g.len();
        let mut gu = vec![0.0; m];
        let mut gv = vec![0.0; m];
        for i in g.free_range() {
            gu[i] = self.row(lu[i], u[i], v[i], self.a[i], i);
            gv[i] = self.row(lv[i], v[i], u[i], self.b[i], i);
        }
        (gu, gv)
    }

    /// `‖u‖² + ‖v‖² − 2κ₀∫uv`.
    pub fn kappa_norm_sq(&self, u: &[f64], v: &[f64]) -> f64 {
        kappa_norm_sq_raw(&self.grid, u, v, self.kappa0)
    }
}

fn kappa_norm_sq_raw(g: &RadialGrid, u: &[f64], v: &[f64], kappa0: f64) -> f64 {
    h1_norm_sq_raw(g, u) + h1_norm_sq_raw(g, v) - 2.0 * kappa0 * g.inner(u, v)
}

fn h1_norm_sq_raw(g: &RadialGrid, f: &[f64]) -> f64 {
    g.dirichlet_form(f, f) + g.inner(f, f)
}

/// `‖f‖² = ∫ |∇f|² + f²`.
pub fn h1_norm_sq(f: &ScalarField) -> f64 {
    h1_norm_sq_raw(f.grid(), f.values())
}

/// State of the system: a pair of fields on one grid.
#[derive(Debug, Clone)]
pub struct FieldPair {
    pub u: ScalarField,
    pub v: ScalarField,
}

impl FieldPair {
    pub fn new(u: ScalarField, v: ScalarField) -> Result<Self> {
        if **u.grid() != **v.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { u, v })
    }

    pub fn zeros(grid: &Arc<RadialGrid>) -> Self {
        Self {
            u: ScalarField::zeros(Arc::clone(grid)),
            v: ScalarField::zeros(Arc::clone(grid)),
        }
    }

    pub(crate) fn from_values(grid: &Arc<RadialGrid>, u: Vec<f64>, v: Vec<f64>) -> Self {
        Self {
            u: ScalarField::from_parts(Arc::clone(grid), u),
            v: ScalarField::from_parts(Arc::clone(grid), v),
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.u.grid()
    }

    pub fn is_zero(&self) -> bool {
        self.u.values().iter().chain(self.v.values()).all(|&x| x == 0.0)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            u: self.u.scaled(t),
            v: self.v.scaled(t),
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            u: self.v.clone(),
            v: self.u.clone(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.u.sup_norm().max(self.v.sup_norm())
    }

    /// `‖z‖²_E = ‖u‖² + ‖v‖²`.
    pub fn norm_e_sq(&self) -> f64 {
        h1_norm_sq(&self.u) + h1_norm_sq(&self.v)
    }

    pub fn with_dirichlet(&self) -> Self {
        Self {
            u: self.u.with_dirichlet(),
            v: self.v.with_dirichlet(),
        }
    }

    pub fn translated(&self, shift: f64) -> Result<Self> {
        Ok(Self {
            u: self.u.translated(shift)?,
            v: self.v.translated(shift)?,
        })
    }

    pub fn shifted_nodes(&self, k: isize) -> Self {
        Self {
            u: self.u.shifted_nodes(k),
            v: self.v.shifted_nodes(k),
        }
    }
}

/// The quadratic and `p`-homogeneous parts of the energy at `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NehariParts {
    pub quadratic: f64,
    pub nonlinear: f64,
}

pub fn nehari_parts(z: &FieldPair, c: &Couplings, pert: &PerturbationProfile) -> Result<NehariParts> {
    let coef = Coefficients::new(z.grid(), c, pert)?;
    let (q, p) = coef.parts(z.u.values(), z.v.values());
    Ok(NehariParts {
        quadratic: q,
        nonlinear: p,
    })
}

/// `Φ(z)`; with the zero perturbation this is the limit functional `Φ₀`.
pub fn phi_energy(z: &FieldPair, c: &Couplings, pert: &PerturbationProfile) -> Result<f64> {
    let coef = Coefficients::new(z.grid(), c, pert)?;
    Ok(coef.energy(z.u.values(), z.v.values()))
}

/// Strong-form gradient of `Φ` (the residual of the Euler–Lagrange system).
pub fn phi_gradient(z: &FieldPair, c: &Couplings, pert: &PerturbationProfile) -> Result<FieldPair> {
    let coef = Coefficients::new(z.grid(), c, pert)?;
    let (gu, gv) = coef.gradient(z.u.values(), z.v.values());
    Ok(FieldPair::from_values(z.grid(), gu, gv))
}

/// `‖z‖²_{κ₀} = ‖u‖² + ‖v‖² − 2κ₀∫uv`.
pub fn kappa_norm_sq(z: &FieldPair, c: &Couplings) -> f64 {
    kappa_norm_sq_raw(z.grid(), z.u.values(), z.v.values(), c.kappa0)
}

/// `G(z) = Φ'(z)z = Q(z) − P(z)`.
pub fn nehari_value(z: &FieldPair, c: &Couplings, pert: &PerturbationProfile) -> Result<f64> {
    if z.is_zero() {
        return Err(Error::ZeroPair);
    }
    let parts = nehari_parts(z, c, pert)?;
    Ok(parts.quadratic - parts.nonlinear)
}

pub(crate) fn projection_factor(q: f64, p_part: f64, p: f64) -> Result<f64> {
    if !(q > 0.0 && p_part > 0.0) || !q.is_finite() || !p_part.is_finite() {
        return Err(Error::DegenerateDirection {
            quadratic: q,
            nonlinear: p_part,
        });
    }
    Ok((q / p_part).powf(1.0 / (p - 2.0)))
}

/// Scales `z` onto the Nehari manifold: returns `(t, t·z)`.
pub fn nehari_project(
    z: &FieldPair,
    c: &Couplings,
    pert: &PerturbationProfile,
) -> Result<(f64, FieldPair)> {
    let parts = nehari_parts(z, c, pert)?;
    let t = projection_factor(parts.quadratic, parts.nonlinear, c.p)?;
    Ok((t, z.scaled(t)))
}

/// `max_{t>0} Φ(tz) = (½ − 1/p)(Q^p / P²)^{1/(p−2)}`.
pub fn mountain_pass_level(z: &FieldPair, c: &Couplings, pert: &PerturbationProfile) -> Result<f64> {
    let parts = nehari_parts(z, c, pert)?;
    level_from_parts(parts.quadratic, parts.nonlinear, c.p)
}

pub(crate) fn level_from_parts(q: f64, p_part: f64, p: f64) -> Result<f64> {
    let t = projection_factor(q, p_part, p)?;
    Ok((0.5 - 1.0 / p) * t * t * q)
}

/// Energy on the manifold via `(½ − 1/p) Q(z)`.
pub fn on_manifold_energy(z: &FieldPair, c: &Couplings, pert: &PerturbationProfile) -> Result<f64> {
    let parts = nehari_parts(z, c, pert)?;
    Ok((0.5 - 1.0 / c.p) * parts.quadratic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    fn soliton_pair(scale_u: f64, scale_v: f64) -> FieldPair {
        let g = make_grid(1, 20.0, 4001).unwrap();
        let w = g.sample(|x| 2f64.sqrt() / x.cosh());
        FieldPair::new(w.scaled(scale_u), w.scaled(scale_v)).unwrap()
    }

    #[test]
    fn zero_pair_has_zero_energy_and_gradient() {
        let g = make_grid(2, 10.0, 101).unwrap();
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let z = FieldPair::zeros(&g);
        let pert = PerturbationProfile::zero();
        assert_eq!(phi_energy(&z, &c, &pert).unwrap(), 0.0);
        assert_eq!(phi_gradient(&z, &c, &pert).unwrap().sup_norm(), 0.0);
        assert!(matches!(nehari_value(&z, &c, &pert), Err(Error::ZeroPair)));
        assert!(matches!(
            nehari_project(&z, &c, &pert),
            Err(Error::DegenerateDirection { .. })
        ));
    }

    #[test]
    fn semitrivial_energy_is_quarter_norm() {
        let c = Couplings::new(1.0, 1.0, 0.0, 0.5, 4.0).unwrap();
        let z = soliton_pair(1.0, 0.0);
        let e = phi_energy(&z, &c, &PerturbationProfile::zero()).unwrap();
        assert!((e - 4.0 / 3.0).abs() < 1e-4, "{e}");
        let g = nehari_value(&z, &c, &PerturbationProfile::zero()).unwrap();
        assert!(g.abs() < 1e-4);
        let g2 = nehari_value(&z.scaled(2.0), &c, &PerturbationProfile::zero()).unwrap();
        let norm = h1_norm_sq(&z.u);
        assert!((g2 + 12.0 * norm).abs() < 1e-3, "{g2}");
    }

    #[test]
    fn projection_of_equal_solitons() {
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let z = soliton_pair(1.0, 1.0);
        let (t, zp) = nehari_project(&z, &c, &PerturbationProfile::zero()).unwrap();
        assert!((t * t - 0.3125).abs() < 1e-4, "{}", t * t);
        let g = nehari_value(&zp, &c, &PerturbationProfile::zero()).unwrap();
        assert!(g.abs() < 1e-12);
        let (t1, _) = nehari_project(&zp, &c, &PerturbationProfile::zero()).unwrap();
        assert!((t1 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn projection_halves_doubled_decoupled_solitons() {
        let c = Couplings::cubic(1.0, 0.0, 1e-12).unwrap();
        let z = soliton_pair(2.0, 2.0);
        let (t, _) = nehari_project(&z, &c, &PerturbationProfile::zero()).unwrap();
        assert!((t - 0.5).abs() < 1e-4, "{t}");
    }

    #[test]
    fn kappa_norm_expansions() {
        let c = Couplings::cubic(1.0, 0.0, 0.3).unwrap();
        let g = make_grid(3, 8.0, 201).unwrap();
        let f = g.sample(|r| (-r * r).exp());
        let n = h1_norm_sq(&f);
        let m = g.inner(f.values(), f.values());
        let same = kappa_norm_sq(&FieldPair::new(f.clone(), f.clone()).unwrap(), &c);
        let opp = kappa_norm_sq(&FieldPair::new(f.clone(), f.scaled(-1.0)).unwrap(), &c);
        assert!((same - 2.0 * (n - 0.3 * m)).abs() < 1e-12 * n);
        assert!((opp - 2.0 * (n + 0.3 * m)).abs() < 1e-12 * n);
    }

    #[test]
    fn rejects_inadmissible_perturbations() {
        let g = make_grid(1, 10.0, 201).unwrap();
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let z = FieldPair::new(g.sample(|x| (-x * x).exp()), g.sample(|x| (-x * x).exp())).unwrap();
        let big = PerturbationProfile::zero().with_kappa(g.sample(|x| 0.6 * (-x * x).exp()));
        let err = phi_energy(&z, &c, &big).unwrap_err();
        assert!(err.to_string().contains("(A₀)"), "{err}");
        let slow = PerturbationProfile::zero().with_a(g.sample(|_| 0.1));
        assert!(matches!(phi_energy(&z, &c, &slow), Err(Error::InvalidPerturbation(_))));
        let neg = PerturbationProfile::zero().with_b(g.sample(|x| -2.0 * (-x * x).exp()));
        assert!(matches!(phi_energy(&z, &c, &neg), Err(Error::InvalidPerturbation(_))));
        assert!(Couplings::cubic(1.0, 1.0, 1.2).is_err());
        assert!(Couplings::new(1.0, 1.0, 0.0, 0.5, 6.0)
            .unwrap()
            .validate_for_dimension(3)
            .is_err());
    }

    #[test]
    fn periodic_hook_replaces_constants() {
        let g = make_grid(1, 10.0, 1001).unwrap();
        let base = Couplings::cubic(1.0, 0.0, 0.5).unwrap();
        let flat = base.with_periodic(&g, |_| 1.0, |_| 1.0).unwrap();
        let z = FieldPair::new(g.sample(|x| 1.0 / x.cosh()), g.sample(|x| 0.5 / x.cosh())).unwrap();
        let pert = PerturbationProfile::zero();
        let e0 = phi_energy(&z, &base, &pert).unwrap();
        let e1 = phi_energy(&z, &flat, &pert).unwrap();
        assert!((e0 - e1).abs() < 1e-14);
        let wavy = base
            .with_periodic(
                &g,
                |x| 1.0 + 0.2 * (2.0 * std::f64::consts::PI * x).cos(),
                |_| 1.0,
            )
            .unwrap();
        assert!(phi_energy(&z, &wavy, &pert).unwrap() != e0);
        assert!(base.with_periodic(&g, |_| -1.0, |_| 1.0).is_err());
    }
}
