//! The scalar soliton: positive radial solution of `−Δw + w = w³`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{GridKind, RadialGrid, ScalarField};
use crate::tridiag;

const SHOOT_STEP: f64 = 1e-3;
const SHOOT_START: f64 = 1e-6;
const SHOOT_RADIUS: f64 = 40.0;
const BISECTIONS: usize = 80;
const NEWTON_MAX: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolitonMethod {
    Shooting,
    GradientFlow,
    ClosedForm,
}

#[derive(Debug, Clone)]
pub struct SolitonSolution {
    pub profile: ScalarField,
    pub peak: f64,
    pub residual: f64,
    pub method: SolitonMethod,
}

/// Sup-norm of `−Δw + w − w³` over the free nodes.
pub fn scalar_residual(w: &ScalarField) -> f64 {
    let g = w.grid();
    let f = w.values();
    let lap = g.laplacian(f);
    g.free_range()
        .map(|i| (-lap[i] + f[i] - f[i] * f[i] * f[i]).abs())
        .fold(0.0, f64::max)
}

/// `√2·sech(x)` sampled on a one-dimensional grid.
pub fn closed_form_soliton(grid: &Arc<RadialGrid>) -> Result<SolitonSolution> {
    if grid.dimension() != 1 {
        return Err(Error::UnsupportedDimension(grid.dimension()));
    }
    let profile = grid.sample(|x| std::f64::consts::SQRT_2 / x.cosh());
    let residual = scalar_residual(&profile);
    Ok(SolitonSolution {
        profile,
        peak: std::f64::consts::SQRT_2,
        residual,
        method: SolitonMethod::ClosedForm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Over,
    Under,
}

fn rhs(n1: f64, r: f64, w: f64, dw: f64) -> (f64, f64) {
    (dw, w - w * w * w - n1 / r * dw)
}

fn rk4(n1: f64, r: f64, w: f64, dw: f64, h: f64) -> (f64, f64) {
    let (k1w, k1d) = rhs(n1, r, w, dw);
    let (k2w, k2d) = rhs(n1, r + 0.5 * h, w + 0.5 * h * k1w, dw + 0.5 * h * k1d);
    let (k3w, k3d) = rhs(n1, r + 0.5 * h, w + 0.5 * h * k2w, dw + 0.5 * h * k2d);
    let (k4w, k4d) = rhs(n1, r + h, w + h * k3w, dw + h * k3d);
    (
        w + h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
        dw + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d),
    )
}

/// Integrates from the series start; stops at the first zero crossing or turn-up.
/// Returns the classification and the sampled trajectory `(r, w)`.
fn shoot(dimension: usize, alpha: f64, keep: bool) -> (Shot, Vec<(f64, f64)>) {
    let n = dimension as f64;
    let n1 = n - 1.0;
    let r0 = SHOOT_START;
    let mut w = alpha + (alpha - alpha.powi(3)) * r0 * r0 / (2.0 * n);
    let mut dw = (alpha - alpha.powi(3)) * r0 / n;
    let mut r = r0;
    let mut path = Vec::new();
    if keep {
        path.push((0.0, alpha));
    }
    let steps = (SHOOT_RADIUS / SHOOT_STEP) as usize;
    for k in 0..steps {
        // First step lands on the regular lattice.
        let h = if k == 0 { SHOOT_STEP - r0 } else { SHOOT_STEP };
        (w, dw) = rk4(n1, r, w, dw, h);
        r = (k + 1) as f64 * SHOOT_STEP;
        if !w.is_finite() || w < 0.0 {
            return (Shot::Over, path);
        }
        if dw > 0.0 {
            return (Shot::Under, path);
        }
        if keep {
            path.push((r, w));
        }
    }
    (Shot::Under, path)
}

fn bisect(dimension: usize, lo: f64, hi: f64) -> Option<f64> {
    if shoot(dimension, lo, false).0 != Shot::Under || shoot(dimension, hi, false).0 != Shot::Over {
        return None;
    }
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match shoot(dimension, mid, false).0 {
            Shot::Under => lo = mid,
            Shot::Over => hi = mid,
        }
    }
    Some(0.5 * (lo + hi))
}

/// Initial height `w(0)` of the ODE soliton by bisection shooting.
pub fn shooting_peak(dimension: usize) -> Result<f64> {
    if !(1..=3).contains(&dimension) {
        return Err(Error::UnsupportedDimension(dimension));
    }
    bisect(dimension, 0.1, 10.0)
        .or_else(|| bisect(dimension, 0.01, 100.0))
        .ok_or(Error::ShootingBracket { lo: 0.01, hi: 100.0 })
}

/// Shooting trajectory evaluated at radius `r`, continued by `e^{−r}` decay past departure.
fn trajectory_value(path: &[(f64, f64)], r: f64) -> f64 {
    let k = (r / SHOOT_STEP).floor() as usize;
    if k + 1 < path.len() {
        let (r0, w0) = path[k];
        let (r1, w1) = path[k + 1];
        w0 + (w1 - w0) * (r - r0) / (r1 - r0)
    } else {
        let (rl, wl) = *path.last().expect("trajectory starts at the origin");
        wl.max(0.0) * (rl - r).exp()
    }
}

/// Even/radial reduction of the free nodes: each node maps to an unknown or to a
/// Dirichlet zero.
struct Fold {
    start: usize,
    map: Vec<Option<usize>>,
    unknowns: usize,
}

impl Fold {
    fn new(g: &RadialGrid) -> Self {
        let m = g.len();
        let start = match g.kind() {
            GridKind::FullLine => m / 2,
            GridKind::Radial => 0,
        };
        let map: Vec<Option<usize>> = (0..m)
            .map(|i| {
                let rep = match g.kind() {
                    GridKind::FullLine => i.max(m - 1 - i),
                    GridKind::Radial => i,
                };
                (!g.is_dirichlet(rep)).then(|| rep - start)
            })
            .collect();
        let unknowns = g.free_range().end - start;
        Self { start, map, unknowns }
    }

    fn expand(&self, y: &[f64]) -> Vec<f64> {
        self.map.iter().map(|k| k.map_or(0.0, |k| y[k])).collect()
    }
}

fn newton_polish(g: &RadialGrid, init: Vec<f64>, tol: f64) -> Result<Vec<f64>> {
    let fold = Fold::new(g);
    let n = fold.unknowns;
    let mut y: Vec<f64> = (0..n).map(|k| init[fold.start + k]).collect();
    let q = g.weights();
    let c = g.edges();
    let residual_of = |y: &[f64]| -> (Vec<f64>, f64) {
        let f = fold.expand(y);
        let lap = g.laplacian(&f);
        let r: Vec<f64> = (0..n)
            .map(|k| {
                let i = fold.start + k;
                -lap[i] + f[i] - f[i] * f[i] * f[i]
            })
            .collect();
        let sup = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (r, sup)
    };
    let (mut r, mut sup) = residual_of(&y);
    for _ in 0..NEWTON_MAX {
        if sup < tol {
            return Ok(fold.expand(&y));
        }
        let mut diag = vec![0.0; n];
        let mut sub = vec![0.0; n.saturating_sub(1)];
        let mut sup_band = vec![0.0; n.saturating_sub(1)];
        for k in 0..n {
            let i = fold.start + k;
            diag[k] += 1.0 - 3.0 * y[k] * y[k];
            let mut couple = |col: Option<usize>, coef: f64| {
                diag[k] += coef / q[i];
                if let Some(col) = col {
                    let v = -coef / q[i];
                    if col == k {
                        diag[k] += v;
                    } else if col == k + 1 {
                        sup_band[k] += v;
                    } else if col + 1 == k {
                        sub[col] += v;
                    }
                }
            };
            if i > 0 {
                couple(fold.map[i - 1], c[i - 1]);
            }
            couple(fold.map[i + 1], c[i]);
        }
        let step = tridiag::solve(&sub, &diag, &sup_band, &r)?;
        let mut lambda = 1.0;
        loop {
            let trial: Vec<f64> = y.iter().zip(&step).map(|(a, d)| a - lambda * d).collect();
            let (rt, st) = residual_of(&trial);
            if st < sup || lambda < 1e-3 {
                y = trial;
                r = rt;
                sup = st;
                break;
            }
            lambda *= 0.5;
        }
    }
    if sup < tol {
        return Ok(fold.expand(&y));
    }
    Err(Error::NoConvergence {
        iterations: NEWTON_MAX,
        residual: sup,
    })
}

/// Solves the scalar problem on `grid` by shooting, then Newton on the discrete residual.
pub fn solve_scalar(grid: &Arc<RadialGrid>, tol: f64) -> Result<SolitonSolution> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance(tol));
    }
    let alpha = shooting_peak(grid.dimension())?;
    let (_, path) = shoot(grid.dimension(), alpha, true);
    let init: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| trajectory_value(&path, x.abs()))
        .collect();
    let values = newton_polish(grid, init, tol)?;
    let profile = ScalarField::new(Arc::clone(grid), values)?;
    let residual = scalar_residual(&profile);
    let peak = match grid.center_index() {
        Some(i) => profile.values()[i],
        None => profile.interpolate(0.0),
    };
    Ok(SolitonSolution {
        profile,
        peak,
        residual,
        method: SolitonMethod::Shooting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;

    #[test]
    fn closed_form_values() {
        let g = make_grid(1, 20.0, 4001).unwrap();
        let s = closed_form_soliton(&g).unwrap();
        assert_eq!(s.peak, 2f64.sqrt());
        assert_eq!(s.profile.values()[2000], 2f64.sqrt());
        assert!(s.residual < 1e-4, "{}", s.residual);
        let w = s.profile.values();
        assert!((g.inner(w, w) - 4.0).abs() < 1e-6);
        assert!(closed_form_soliton(&make_grid(3, 10.0, 101).unwrap()).is_err());
    }

    #[test]
    fn shooting_recovers_root_two() {
        let a = shooting_peak(1).unwrap();
        assert!((a - 2f64.sqrt()).abs() < 1e-6, "{a}");
    }

    #[test]
    fn full_line_solution_matches_closed_form() {
        let g = make_grid(1, 20.0, 16001).unwrap();
        let s = solve_scalar(&g, 1e-9).unwrap();
        assert!(s.residual < 1e-9);
        assert!((s.peak - 2f64.sqrt()).abs() < 1e-6, "{}", s.peak);
        let exact = closed_form_soliton(&g).unwrap();
        let diff = s
            .profile
            .values()
            .iter()
            .zip(exact.profile.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(diff < 1e-5, "{diff}");
    }

    #[test]
    fn even_node_count_is_handled() {
        let g = make_grid(1, 20.0, 4000).unwrap();
        let s = solve_scalar(&g, 1e-9).unwrap();
        assert!(s.residual < 1e-9);
        assert!((s.peak - 2f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let g = make_grid(2, 10.0, 101).unwrap();
        assert!(matches!(solve_scalar(&g, -1.0), Err(Error::InvalidTolerance(_))));
        assert!(matches!(solve_scalar(&g, 0.0), Err(Error::InvalidTolerance(_))));
    }
}
