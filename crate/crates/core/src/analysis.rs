//! Diagnostics built on ground states of the limit problem: the barycenter,
//! sufficient conditions for a ground state, the translated path `Γ(y)`, the
//! bound-state threshold, and a barycenter-penalized search.

use std::sync::Arc;

use rayon::prelude::*;

use crate::energy::{
    level_from_parts, projection_factor, Coefficients, Couplings, FieldPair, PerturbationProfile,
};
use crate::error::{Error, Result};
use crate::ground_state::{
    accepts, projected, residual_norm, shift_values, sup, GroundStateReport, IterRecord,
    Preconditioner, State,
};
use crate::grid::{GridKind, RadialGrid, ScalarField};

/// Residual below which a pair is accepted as a limit-problem ground state.
pub const GROUND_STATE_RESIDUAL: f64 = 1e-4;
/// Largest fraction of `∫(u² + v²)` a translation may push past the boundary.
pub const SUPPORT_LOSS_TOL: f64 = 1e-12;
const ANGULAR_NODES: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Barycenter {
    pub point: Vec<f64>,
}

/// Window average of `|f|` over `[x − 1, x + 1]`, zero outside the grid.
fn local_average(g: &RadialGrid, f: &[f64]) -> Vec<f64> {
    let x = g.nodes();
    let h = g.spacing();
    let m = x.len();
    let mut cum = vec![0.0; m];
    for i in 1..m {
        cum[i] = cum[i - 1] + 0.5 * h * (f[i - 1].abs() + f[i].abs());
    }
    let at = |t: f64| -> f64 {
        let s = (t - x[0]) / h;
        if s <= 0.0 {
            0.0
        } else if s >= (m - 1) as f64 {
            cum[m - 1]
        } else {
            let k = s.floor() as usize;
            let frac = s - k as f64;
            cum[k] + frac * (cum[k + 1] - cum[k])
        }
    };
    x.iter().map(|&xi| 0.5 * (at(xi + 1.0) - at(xi - 1.0))).collect()
}

fn truncated(avg: &[f64]) -> Vec<f64> {
    let half = 0.5 * avg.iter().fold(0.0f64, |m, v| m.max(*v));
    avg.iter().map(|v| (v - half).max(0.0)).collect()
}

/// Barycenter of a pair on a full-line grid.
pub fn barycenter_values(g: &RadialGrid, u: &[f64], v: &[f64]) -> Result<f64> {
    if g.kind() != GridKind::FullLine {
        return Err(Error::GridKindRequired("a full-line grid"));
    }
    let uh = truncated(&local_average(g, u));
    let vh = truncated(&local_average(g, v));
    let dens: Vec<f64> = uh.iter().zip(&vh).map(|(a, b)| a + b).collect();
    let mass = g.integrate(&dens);
    if !(mass > 0.0) {
        return Err(Error::ZeroPair);
    }
    let moment: f64 = g
        .weights()
        .iter()
        .zip(g.nodes())
        .zip(&dens)
        .map(|((q, x), d)| q * x * d)
        .sum();
    Ok(moment / mass)
}

/// `ξ(u, v)`; radial pairs have barycenter at the origin.
pub fn barycenter(z: &FieldPair) -> Result<Barycenter> {
    if z.is_zero() {
        return Err(Error::ZeroPair);
    }
    let g = z.grid();
    match g.kind() {
        GridKind::FullLine => Ok(Barycenter {
            point: vec![barycenter_values(g, z.u.values(), z.v.values())?],
        }),
        GridKind::Radial => Ok(Barycenter {
            point: vec![0.0; g.dimension()],
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conclusion {
    GroundStateExists,
    Undetermined,
}

impl Conclusion {
    pub fn as_str(self) -> &'static str {
        match self {
            Conclusion::GroundStateExists => "exists",
            Conclusion::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub lhs01: f64,
    pub rhs01: f64,
    pub crit01: bool,
    /// `Q^{p/2}/P < Q₀^{p/2}/P₀` evaluated directly.
    pub crit_less2: bool,
    pub crit02: bool,
    /// Evaluated only when the components coincide.
    pub crit03: bool,
    pub crit04: bool,
    pub equal_components: bool,
    pub conclusion: Conclusion,
}

fn values_or_zero(f: Option<&ScalarField>, m: usize) -> Vec<f64> {
    f.map_or_else(|| vec![0.0; m], |f| f.values().to_vec())
}

/// All listed profiles are `≥ 0` at every node and at least one is `> 0` somewhere.
fn nonnegative_somewhere_strict(g: &RadialGrid, profiles: &[&[f64]]) -> bool {
    let nonneg = profiles.iter().all(|p| p.iter().all(|&x| x >= 0.0));
    let strict = profiles
        .iter()
        .any(|p| p.iter().zip(g.weights()).any(|(&x, &q)| x > 0.0 && q > 0.0));
    nonneg && strict
}

/// Evaluates the sufficient conditions for `c < c₀` at the limit ground state `w0`.
pub fn comparison_check(
    w0: &FieldPair,
    c: &Couplings,
    pert: &PerturbationProfile,
) -> Result<ComparisonReport> {
    let zero = PerturbationProfile::zero();
    let res = residual_norm(w0, c, &zero)?;
    if !(res < GROUND_STATE_RESIDUAL) {
        return Err(Error::InvalidGroundState(format!(
            "limit-problem residual {res:.3e} exceeds {GROUND_STATE_RESIDUAL:e}"
        )));
    }
    if w0.is_zero() {
        return Err(Error::ZeroPair);
    }
    let g = w0.grid();
    let m = g.len();
    let coef0 = Coefficients::new(g, c, &zero)?;
    let coef = Coefficients::new(g, c, pert)?;
    let (u, v) = (w0.u.values(), w0.v.values());
    let (q0, p0) = coef0.parts(u, v);
    let (q, p) = coef.parts(u, v);
    let kappa = values_or_zero(pert.kappa.as_ref(), m);
    let a = values_or_zero(pert.a.as_ref(), m);
    let b = values_or_zero(pert.b.as_ref(), m);
    let beta = values_or_zero(pert.beta.as_ref(), m);
    let kuv: f64 = g
        .weights()
        .iter()
        .enumerate()
        .map(|(i, w)| w * kappa[i] * u[i] * v[i])
        .sum();
    let half_p = 0.5 * c.p;
    let lhs01 = ((q0 - 2.0 * kuv) / q0).powf(half_p);
    let rhs01 = p / p0;
    let crit01 = lhs01 < rhs01;
    let crit_less2 = q.powf(half_p) / p < q0.powf(half_p) / p0;
    let crit02 = nonnegative_somewhere_strict(g, &[&kappa, &a, &b, &beta]);
    let scale = u.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    let equal_components = u
        .iter()
        .zip(v)
        .all(|(x, y)| (x - y).abs() <= 1e-8 * scale);
    let (crit03, crit04) = if equal_components {
        let combined: Vec<f64> = (0..m)
            .map(|i| {
                (a[i] + b[i] + 2.0 * beta[i]) * u[i].abs().powf(c.p - 2.0) + c.p * kappa[i]
            })
            .collect();
        let abeta: Vec<f64> = (0..m).map(|i| a[i] + b[i] + 2.0 * beta[i]).collect();
        (
            nonnegative_somewhere_strict(g, &[&combined]),
            nonnegative_somewhere_strict(g, &[&kappa, &abeta]),
        )
    } else {
        (false, false)
    };
    let conclusion = if crit01 || crit02 || crit03 || crit04 {
        Conclusion::GroundStateExists
    } else {
        Conclusion::Undetermined
    };
    Ok(ComparisonReport {
        lhs01,
        rhs01,
        crit01,
        crit_less2,
        crit02,
        crit03,
        crit04,
        equal_components,
        conclusion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaPoint {
    pub y: f64,
    pub t_y: f64,
    pub energy: f64,
    /// Barycenter of `Γ(y)` (full-line grids only).
    pub xi: Option<f64>,
}

/// Fraction of `∫(u² + v²)` lying where a shift by `y` pushes it past the boundary.
fn support_loss(g: &RadialGrid, z: &FieldPair, y: f64) -> f64 {
    let r = g.radius();
    let (u, v) = (z.u.values(), z.v.values());
    let mut lost = 0.0;
    let mut total = 0.0;
    for (i, (&x, &q)) in g.nodes().iter().zip(g.weights()).enumerate() {
        let d = q * (u[i] * u[i] + v[i] * v[i]);
        total += d;
        if (x + y).abs() >= r {
            lost += d;
        }
    }
    if total > 0.0 {
        lost / total
    } else {
        0.0
    }
}

fn gamma_point_line(
    w0: &FieldPair,
    coef: &Coefficients,
    p: f64,
    y: f64,
) -> Result<GammaPoint> {
    let g = w0.grid();
    if support_loss(g, w0, y) > SUPPORT_LOSS_TOL {
        return Err(Error::TranslationOutOfSupport { shift: y });
    }
    let moved = w0.translated(y)?.with_dirichlet();
    let (q, pp) = coef.parts(moved.u.values(), moved.v.values());
    let t_y = projection_factor(q, pp, p)?;
    let energy = level_from_parts(q, pp, p)?;
    let xi = barycenter_values(g, moved.u.values(), moved.v.values())?;
    Ok(GammaPoint {
        y,
        t_y,
        energy,
        xi: Some(xi),
    })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    (p0, p1) = (p1, ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k);
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// `∫ g(|x|) f(|x − y|) dx` over the truncated ball, `|y| = s`.
fn overlap(grid: &RadialGrid, g: &[f64], f: &[f64], s: f64) -> f64 {
    let rule = gauss_legendre(ANGULAR_NODES);
    let dim = grid.dimension();
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .zip(g)
        .filter(|(_, gv)| **gv != 0.0)
        .map(|((&r, &q), &gv)| {
            // Spherical average of f(|x − y|) over |x| = r, in cos θ (N = 3) or θ (N = 2).
            let avg: f64 = rule
                .iter()
                .map(|&(t, w)| {
                    let cos = if dim == 3 {
                        t
                    } else {
                        (0.5 * std::f64::consts::PI * (t + 1.0)).cos()
                    };
                    let d = (r * r + s * s - 2.0 * r * s * cos).max(0.0).sqrt();
                    0.5 * w * grid.interpolate(f, d)
                })
                .sum();
            q * gv * avg
        })
        .sum()
}

fn gamma_point_radial(
    w0: &FieldPair,
    c: &Couplings,
    pert: &PerturbationProfile,
    y: f64,
) -> Result<GammaPoint> {
    let g = w0.grid();
    let s = y.abs();
    if s > 0.0 && support_loss(g, w0, s) > SUPPORT_LOSS_TOL {
        return Err(Error::TranslationOutOfSupport { shift: y });
    }
    let zero = PerturbationProfile::zero();
    let coef0 = Coefficients::new(g, c, &zero)?;
    Coefficients::new(g, c, pert)?;
    let (u, v) = (w0.u.values(), w0.v.values());
    let (mut q, mut pp) = coef0.parts(u, v);
    let p = c.p;
    let pow = |x: f64, e: f64| if p == 4.0 && e == 4.0 { x * x * x * x } else { x.abs().powf(e) };
    if let Some(k) = &pert.kappa {
        let uv: Vec<f64> = u.iter().zip(v).map(|(a, b)| a * b).collect();
        q -= 2.0 * overlap(g, k.values(), &uv, s);
    }
    if let Some(a) = &pert.a {
        let up: Vec<f64> = u.iter().map(|x| pow(*x, p)).collect();
        pp += overlap(g, a.values(), &up, s);
    }
    if let Some(b) = &pert.b {
        let vp: Vec<f64> = v.iter().map(|x| pow(*x, p)).collect();
        pp += overlap(g, b.values(), &vp, s);
    }
    if let Some(beta) = &pert.beta {
        let uv: Vec<f64> = u
            .iter()
            .zip(v)
            .map(|(a, b)| (a.abs() * b.abs()).powf(0.5 * p))
            .collect();
        pp += 2.0 * overlap(g, beta.values(), &uv, s);
    }
    let t_y = projection_factor(q, pp, p)?;
    let energy = level_from_parts(q, pp, p)?;
    Ok(GammaPoint {
        y,
        t_y,
        energy,
        xi: None,
    })
}

/// `Φ(Γ(y))` with `Γ(y) = t_y·w0(· − y)` projected onto the Nehari manifold.
pub fn gamma_profile(
    w0: &FieldPair,
    c: &Couplings,
    pert: &PerturbationProfile,
    ys: &[f64],
) -> Result<Vec<GammaPoint>> {
    if w0.is_zero() {
        return Err(Error::ZeroPair);
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::NonFinite);
    }
    let g = w0.grid();
    match g.kind() {
        GridKind::FullLine => {
            let coef = Coefficients::new(g, c, pert)?;
            ys.par_iter()
                .map(|&y| gamma_point_line(w0, &coef, c.p, y))
                .collect()
        }
        GridKind::Radial => ys
            .par_iter()
            .map(|&y| gamma_point_radial(w0, c, pert, y))
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    pub r0: f64,
    pub c0: f64,
    pub c_tilde0: f64,
    /// `c̃₀ / c₀`.
    pub ratio_bound: f64,
    pub satisfied: bool,
}

/// `R₀ = (1 + |κ|∞/(1−κ₀))² / (1 − max{|a|∞/a₀, |b|∞/b₀, |β|∞/|β₀|})` against `c̃₀/c₀`,
/// where `c̃₀ = min{d₀, 2c₀}` and `d₀` defaults to `+∞`.
pub fn r0_threshold(
    c: &Couplings,
    pert: &PerturbationProfile,
    c0: f64,
    d0: Option<f64>,
) -> Result<ThresholdReport> {
    c.validate()?;
    if !(c0 > 0.0 && c0.is_finite()) {
        return Err(Error::InvalidArgument(format!("c₀ must be positive, got {c0}")));
    }
    let sup_of = |f: Option<&ScalarField>| PerturbationProfile::sup_abs(f);
    let ratio = |s: f64, base: f64| if s == 0.0 { 0.0 } else { s / base.abs() };
    let max_ratio = ratio(sup_of(pert.a.as_ref()), c.a0)
        .max(ratio(sup_of(pert.b.as_ref()), c.b0))
        .max(ratio(sup_of(pert.beta.as_ref()), c.beta0));
    if !(max_ratio < 1.0) {
        return Err(Error::PerturbationTooLarge(max_ratio));
    }
    let r0 = (1.0 + sup_of(pert.kappa.as_ref()) / (1.0 - c.kappa0)).powi(2) / (1.0 - max_ratio);
    let c_tilde0 = match d0 {
        Some(d) => d.min(2.0 * c0),
        None => 2.0 * c0,
    };
    let ratio_bound = c_tilde0 / c0;
    Ok(ThresholdReport {
        r0,
        c0,
        c_tilde0,
        ratio_bound,
        satisfied: r0 < ratio_bound,
    })
}

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Increasing penalty weights on `ξ²`.
    pub penalties: Vec<f64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 20_000,
            penalties: vec![1.0, 10.0, 100.0, 1e3, 1e4],
        }
    }
}

fn penalized(state: &State, g: &RadialGrid, weight: f64) -> Option<(f64, f64)> {
    let xi = barycenter_values(g, &state.u, &state.v).ok()?;
    Some((state.energy + weight * xi * xi, xi))
}

/// Minimizes `Φ + λ|ξ|²` over the Nehari manifold for each penalty weight in turn;
/// the final energy estimates the barycenter-constrained level from above.
pub fn constrained_search(
    init: &FieldPair,
    c: &Couplings,
    pert: &PerturbationProfile,
    opts: &SearchOptions,
) -> Result<GroundStateReport> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidTolerance(opts.tol));
    }
    let g = Arc::clone(init.grid());
    if g.kind() != GridKind::FullLine {
        return Err(Error::GridKindRequired("a full-line grid for the barycenter constraint"));
    }
    let coef = Coefficients::new(&g, c, pert)?;
    for f in pert.fields().into_iter().flatten() {
        if f.values().iter().any(|&x| x > 0.0) {
            return Err(Error::InvalidPerturbation(
                "barycenter search requires non-positive perturbations".into(),
            ));
        }
    }
    let pre = Preconditioner::new(&g, c.kappa0)?;
    let start = init.with_dirichlet();
    let (u0, v0) = (start.u.values().to_vec(), start.v.values().to_vec());
    let (q0, p0) = coef.parts(&u0, &v0);
    projection_factor(q0, p0, c.p)?;
    let mut state = projected(&coef, u0, v0).ok_or(Error::DegenerateDirection {
        quadratic: q0,
        nonlinear: p0,
    })?;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    for &weight in &opts.penalties {
        let (mut f, _) = penalized(&state, &g, weight).ok_or(Error::ZeroPair)?;
        let mut tau = 1.0;
        converged = false;
        while iterations < opts.max_iter {
            iterations += 1;
            let before = f;
            let (gu, gv) = coef.gradient(&state.u, &state.v);
            let grad_before = sup(&gu).max(sup(&gv));
            let (du, dv) = pre.apply(&gu, &gv);
            while tau >= 1e-14 {
                let tu: Vec<f64> = state.u.iter().zip(&du).map(|(a, d)| a - tau * d).collect();
                let tv: Vec<f64> = state.v.iter().zip(&dv).map(|(a, d)| a - tau * d).collect();
                let accepted = projected(&coef, tu, tv)
                    .and_then(|t| penalized(&t, &g, weight).map(|(ft, _)| (t, ft)))
                    .filter(|(_, ft)| accepts(*ft, f));
                if let Some((t, ft)) = accepted {
                    state = t;
                    f = ft;
                    tau = (tau * 2.0).min(8.0);
                    break;
                }
                tau *= 0.5;
            }
            // Translation line search on the penalized objective.
            for dir in [1isize, -1] {
                let mut k = dir;
                while k.unsigned_abs() <= g.len() / 4 {
                    let moved = projected(
                        &coef,
                        shift_values(&state.u, k, &g),
                        shift_values(&state.v, k, &g),
                    )
                    .and_then(|t| penalized(&t, &g, weight).map(|(ft, _)| (t, ft)));
                    match moved {
                        Some((t, ft)) if ft < f => {
                            state = t;
                            f = ft;
                            k *= 2;
                        }
                        _ => break,
                    }
                }
            }
            let (_, xi) = penalized(&state, &g, weight).ok_or(Error::ZeroPair)?;
            trace.push(IterRecord {
                energy: state.energy,
                grad_sup: grad_before,
                norm_e_sq: g.dirichlet_form(&state.u, &state.u)
                    + g.inner(&state.u, &state.u)
                    + g.dirichlet_form(&state.v, &state.v)
                    + g.inner(&state.v, &state.v),
                xi: Some(xi),
            });
            if (before - f).abs() <= opts.tol * f.abs().max(1.0) {
                converged = true;
                break;
            }
        }
    }
    let (gu, gv) = coef.gradient(&state.u, &state.v);
    let grad_sup = sup(&gu).max(sup(&gv));
    let (q, p) = coef.parts(&state.u, &state.v);
    Ok(GroundStateReport {
        pair: FieldPair::new(
            ScalarField::new(Arc::clone(&g), state.u)?,
            ScalarField::new(Arc::clone(&g), state.v)?,
        )?,
        energy: state.energy,
        grad_sup,
        nehari_residual: q - p,
        iterations,
        converged,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::ground_state::{build_synchronized, Branch};
    use crate::soliton::closed_form_soliton;

    fn z1(radius: f64, m: usize, kappa0: f64) -> (FieldPair, Couplings) {
        let g = make_grid(1, radius, m).unwrap();
        let w = closed_form_soliton(&g).unwrap();
        let c = Couplings::cubic(1.0, 1.0, kappa0).unwrap();
        (build_synchronized(Branch::Z1, &c, &w, &g).unwrap().pair, c)
    }

    #[test]
    fn barycenter_of_symmetric_pair_is_zero() {
        let (z, _) = z1(20.0, 2001, 0.5);
        let xi = barycenter(&z).unwrap().point[0];
        assert!(xi.abs() < 1e-12, "{xi}");
        assert!(matches!(barycenter(&FieldPair::zeros(z.grid())), Err(Error::ZeroPair)));
    }

    #[test]
    fn barycenter_follows_translation() {
        let (z, _) = z1(30.0, 3001, 0.5);
        let h = z.grid().spacing();
        for y in [3.0, -7.0, 2.345] {
            let moved = z.translated(y).unwrap();
            let xi = barycenter(&moved).unwrap().point[0];
            assert!((xi - y).abs() < 2.0 * h, "{y}: {xi}");
        }
    }

    #[test]
    fn radial_grid_barycenter_is_origin() {
        let g = make_grid(3, 10.0, 101).unwrap();
        let f = g.sample(|r| (-r * r).exp());
        let z = FieldPair::new(f.clone(), f).unwrap();
        assert_eq!(barycenter(&z).unwrap().point, vec![0.0; 3]);
    }

    #[test]
    fn threshold_arithmetic() {
        let g = make_grid(1, 10.0, 201).unwrap();
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let zero = r0_threshold(&c, &PerturbationProfile::zero(), 1.0, None).unwrap();
        assert_eq!(zero.r0, 1.0);
        assert!(zero.satisfied);
        let bump = |amp: f64| g.sample(move |x| amp * (-x * x).exp());
        let pert = PerturbationProfile::zero()
            .with_kappa(bump(-0.1))
            .with_a(bump(-0.2));
        let r = r0_threshold(&c, &pert, 0.5, None).unwrap();
        assert!((r.r0 - 1.8).abs() < 1e-12, "{}", r.r0);
        assert_eq!(r.ratio_bound, 2.0);
        assert!(r.satisfied);
        let tight = r0_threshold(&c, &pert, 0.5, Some(0.8)).unwrap();
        assert!((tight.ratio_bound - 1.6).abs() < 1e-15 && !tight.satisfied);
        let big = PerturbationProfile::zero().with_b(bump(-1.0));
        assert!(matches!(
            r0_threshold(&c, &big, 1.0, None),
            Err(Error::PerturbationTooLarge(_))
        ));
    }

    #[test]
    fn comparison_with_zero_perturbation_is_undetermined() {
        let (z, c) = z1(20.0, 4001, 0.5);
        let r = comparison_check(&z, &c, &PerturbationProfile::zero()).unwrap();
        assert!(!r.crit01 && !r.crit02 && !r.crit03 && !r.crit04 && !r.crit_less2);
        assert_eq!(r.conclusion, Conclusion::Undetermined);
        assert!(r.equal_components);
    }

    #[test]
    fn comparison_sign_conditions() {
        let (z, c) = z1(20.0, 4001, 0.5);
        let g = z.grid();
        let a = PerturbationProfile::zero().with_a(g.sample(|x| 0.1 * (-x * x).exp()));
        let r = comparison_check(&z, &c, &a).unwrap();
        assert!(r.crit02 && r.crit01 && r.crit_less2);
        assert_eq!(r.conclusion, Conclusion::GroundStateExists);
        let k = PerturbationProfile::zero().with_kappa(g.sample(|x| 0.05 * (-x * x).exp()));
        let r = comparison_check(&z, &c, &k).unwrap();
        assert!(r.crit04 && r.crit03);
        let bad = FieldPair::new(z.u.scaled(2.0), z.v.clone()).unwrap();
        assert!(matches!(
            comparison_check(&bad, &c, &k),
            Err(Error::InvalidGroundState(_))
        ));
    }

    #[test]
    fn gamma_at_origin_without_perturbation() {
        let (z, c) = z1(40.0, 4001, 0.5);
        let pts = gamma_profile(&z, &c, &PerturbationProfile::zero(), &[0.0, 2.0, -3.0]).unwrap();
        let e0 = crate::energy::phi_energy(&z, &c, &PerturbationProfile::zero()).unwrap();
        for p in &pts {
            assert!((p.t_y - 1.0).abs() < 1e-4, "{p:?}");
            assert!((p.energy - e0).abs() < 1e-6 * e0.abs().max(1.0), "{p:?}");
            assert!((p.xi.unwrap() - p.y).abs() < 2.0 * z.grid().spacing());
        }
        assert!(matches!(
            gamma_profile(&z, &c, &PerturbationProfile::zero(), &[35.0]),
            Err(Error::TranslationOutOfSupport { .. })
        ));
    }

    #[test]
    fn radial_overlap_matches_direct_integral() {
        // Gaussians: ∫ e^{−|x|²} e^{−|x−y|²} dx = (π/2)^{3/2} e^{−|y|²/2} in three dimensions.
        let g = make_grid(3, 10.0, 801).unwrap();
        let f = g.sample(|r| (-r * r).exp());
        for s in [0.0, 1.0, 2.5] {
            let got = overlap(&g, f.values(), f.values(), s);
            let exact = (std::f64::consts::PI / 2.0).powf(1.5) * (-s * s / 2.0).exp();
            assert!(((got - exact) / exact).abs() < 1e-4, "{s}: {got} vs {exact}");
        }
        let g2 = make_grid(2, 10.0, 801).unwrap();
        let f2 = g2.sample(|r| (-r * r).exp());
        let got = overlap(&g2, f2.values(), f2.values(), 1.5);
        let exact = std::f64::consts::PI / 2.0 * (-1.5f64 * 1.5 / 2.0).exp();
        assert!(((got - exact) / exact).abs() < 1e-4, "{got} vs {exact}");
    }
}
