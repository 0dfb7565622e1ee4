//! Ground states by Nehari-projected descent, the explicit synchronized
//! solutions, and warm-started continuation in κ₀.

use std::sync::Arc;

use crate::analysis;
use crate::energy::{projection_factor, Coefficients, Couplings, FieldPair, PerturbationProfile};
use crate::error::{Error, Result};
use crate::grid::{GridKind, RadialGrid, ScalarField};
use crate::soliton::SolitonSolution;
use crate::tridiag::SpdFactor;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 50_000;
const MIN_STEP: f64 = 1e-14;
const MAX_STEP: f64 = 1.0;
const CONTINUATION_STEP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    pub energy: f64,
    pub grad_sup: f64,
    pub norm_e_sq: f64,
    pub xi: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GroundStateReport {
    pub pair: FieldPair,
    pub energy: f64,
    pub grad_sup: f64,
    pub nehari_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<IterRecord>,
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub record_trace: bool,
    /// Record the barycenter of every iterate (full-line grids).
    pub track_barycenter: bool,
    /// Try integer-node translations of the iterate after each step (full-line grids).
    pub translation_search: bool,
    /// Return the last iterate instead of failing when `max_iter` is reached.
    pub allow_unconverged: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            record_trace: false,
            track_barycenter: false,
            translation_search: false,
            allow_unconverged: false,
        }
    }
}

/// Inverse of the `κ₀` inner-product operator, split into sum and difference channels.
pub(crate) struct Preconditioner {
    start: usize,
    weights: Vec<f64>,
    sum: SpdFactor,
    diff: SpdFactor,
}

impl Preconditioner {
    pub(crate) fn new(g: &RadialGrid, kappa0: f64) -> Result<Self> {
        let range = g.free_range();
        let (s_diag, off) = g.stiffness();
        let weights: Vec<f64> = g.weights()[range.clone()].to_vec();
        let with_mass = |m: f64| -> Vec<f64> {
            s_diag.iter().zip(&weights).map(|(s, q)| s + m * q).collect()
        };
        Ok(Self {
            start: range.start,
            sum: SpdFactor::new(&with_mass(1.0 - kappa0), &off)?,
            diff: SpdFactor::new(&with_mass(1.0 + kappa0), &off)?,
            weights,
        })
    }

    pub(crate) fn apply(&self, gu: &[f64], gv: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.weights.len();
        let mut s: Vec<f64> = (0..n)
            .map(|k| self.weights[k] * (gu[self.start + k] + gv[self.start + k]))
            .collect();
        let mut d: Vec<f64> = (0..n)
            .map(|k| self.weights[k] * (gu[self.start + k] - gv[self.start + k]))
            .collect();
        self.sum.solve_in_place(&mut s);
        self.diff.solve_in_place(&mut d);
        let m = gu.len();
        let mut du = vec![0.0; m];
        let mut dv = vec![0.0; m];
        for k in 0..n {
            du[self.start + k] = 0.5 * (s[k] + d[k]);
            dv[self.start + k] = 0.5 * (s[k] - d[k]);
        }
        (du, dv)
    }
}

pub(crate) fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub(crate) fn shift_values(f: &[f64], k: isize, g: &RadialGrid) -> Vec<f64> {
    let m = f.len() as isize;
    (0..m)
        .map(|i| {
            let j = i - k;
            if g.is_dirichlet(i as usize) || !(0..m).contains(&j) {
                0.0
            } else {
                f[j as usize]
            }
        })
        .collect()
}

pub(crate) struct State {
    pub(crate) u: Vec<f64>,
    pub(crate) v: Vec<f64>,
    pub(crate) energy: f64,
}

/// Projects `(u, v)` onto the Nehari manifold; `None` if the direction is degenerate.
pub(crate) fn projected(coef: &Coefficients, u: Vec<f64>, v: Vec<f64>) -> Option<State> {
    let (q, p) = coef.parts(&u, &v);
    let t = projection_factor(q, p, coef.p).ok()?;
    let u: Vec<f64> = u.iter().map(|x| t * x).collect();
    let v: Vec<f64> = v.iter().map(|x| t * x).collect();
    let energy = coef.energy(&u, &v);
    energy.is_finite().then_some(State { u, v, energy })
}

pub(crate) fn energy_slack(e: f64) -> f64 {
    1e-13 * e.abs().max(1.0)
}

pub(crate) fn accepts(new: f64, old: f64) -> bool {
    new <= old + energy_slack(old)
}

fn translation_search(coef: &Coefficients, state: &State) -> Option<State> {
    let g = &coef.grid;
    let limit = (g.len() / 4) as isize;
    let mut best: Option<State> = None;
    for dir in [1isize, -1] {
        let mut k = dir;
        while k.abs() <= limit {
            let current = best.as_ref().map_or(state.energy, |b| b.energy);
            let trial = projected(
                coef,
                shift_values(&state.u, k, g),
                shift_values(&state.v, k, g),
            );
            match trial {
                Some(t) if t.energy < current => {
                    best = Some(t);
                    k *= 2;
                }
                _ => break,
            }
        }
    }
    best
}

fn report(
    coef: &Coefficients,
    state: State,
    grad_sup: f64,
    iterations: usize,
    converged: bool,
    trace: Vec<IterRecord>,
) -> GroundStateReport {
    let (q, p) = coef.parts(&state.u, &state.v);
    let pair = FieldPair::from_values(&coef.grid, state.u, state.v);
    GroundStateReport {
        pair,
        energy: state.energy,
        grad_sup,
        nehari_residual: q - p,
        iterations,
        converged,
        trace,
    }
}

fn record(coef: &Coefficients, state: &State, grad_sup: f64, opts: &SolverOptions) -> IterRecord {
    let g = &coef.grid;
    let norm_e_sq = g.dirichlet_form(&state.u, &state.u)
        + g.inner(&state.u, &state.u)
        + g.dirichlet_form(&state.v, &state.v)
        + g.inner(&state.v, &state.v);
    let xi = if opts.track_barycenter && g.kind() == GridKind::FullLine {
        analysis::barycenter_values(g, &state.u, &state.v).ok()
    } else {
        None
    };
    IterRecord {
        energy: state.energy,
        grad_sup,
        norm_e_sq,
        xi,
    }
}

/// Minimizes `Φ` on the Nehari manifold starting from `init`.
pub fn solve_ground_state(
    init: &FieldPair,
    c: &Couplings,
    pert: &PerturbationProfile,
    tol: f64,
    max_iter: usize,
) -> Result<GroundStateReport> {
    let opts = SolverOptions {
        tol,
        max_iter,
        ..SolverOptions::default()
    };
    solve_ground_state_with(init, c, pert, &opts)
}

pub fn solve_ground_state_with(
    init: &FieldPair,
    c: &Couplings,
    pert: &PerturbationProfile,
    opts: &SolverOptions,
) -> Result<GroundStateReport> {
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidTolerance(opts.tol));
    }
    let grid = Arc::clone(init.grid());
    let coef = Coefficients::new(&grid, c, pert)?;
    let pre = Preconditioner::new(&grid, c.kappa0)?;
    let start = init.with_dirichlet();
    let (u0, v0) = (start.u.values().to_vec(), start.v.values().to_vec());
    let (q0, p0) = coef.parts(&u0, &v0);
    projection_factor(q0, p0, c.p)?;
    let mut state = projected(&coef, u0, v0).ok_or(Error::DegenerateDirection {
        quadratic: q0,
        nonlinear: p0,
    })?;
    let (mut gu, mut gv) = coef.gradient(&state.u, &state.v);
    let mut grad_sup = sup(&gu).max(sup(&gv));
    let mut trace = Vec::new();
    if opts.record_trace {
        trace.push(record(&coef, &state, grad_sup, opts));
    }
    let mut tau = 1.0;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        if grad_sup < opts.tol {
            return Ok(report(&coef, state, grad_sup, iterations, true, trace));
        }
        let (du, dv) = pre.apply(&gu, &gv);
        let next = loop {
            let trial_u: Vec<f64> = state.u.iter().zip(&du).map(|(a, d)| a - tau * d).collect();
            let trial_v: Vec<f64> = state.v.iter().zip(&dv).map(|(a, d)| a - tau * d).collect();
            if let Some(t) = projected(&coef, trial_u, trial_v) {
                let slack = energy_slack(state.energy);
                // Energy differences below round-off are decided by the gradient norm.
                if t.energy <= state.energy + slack {
                    let (tu, tv) = coef.gradient(&t.u, &t.v);
                    let t_sup = sup(&tu).max(sup(&tv));
                    if t.energy < state.energy - slack || t_sup < grad_sup {
                        break Some((t, tu, tv, t_sup));
                    }
                }
            }
            tau *= 0.5;
            if tau < MIN_STEP {
                break None;
            }
        };
        iterations += 1;
        let Some((next, nu, nv, n_sup)) = next else {
            let converged = grad_sup < opts.tol;
            let r = report(&coef, state, grad_sup, iterations, converged, trace);
            return Err(Error::Stalled(Box::new(r)));
        };
        tau = (tau * 2.0).min(MAX_STEP);
        state = next;
        (gu, gv, grad_sup) = (nu, nv, n_sup);
        if opts.translation_search && grid.kind() == GridKind::FullLine {
            if let Some(moved) = translation_search(&coef, &state) {
                state = moved;
                (gu, gv) = coef.gradient(&state.u, &state.v);
                grad_sup = sup(&gu).max(sup(&gv));
            }
        }
        if opts.record_trace {
            trace.push(record(&coef, &state, grad_sup, opts));
        }
    }
    let converged = grad_sup < opts.tol;
    let r = report(&coef, state, grad_sup, iterations, converged, trace);
    if converged || opts.allow_unconverged {
        Ok(r)
    } else {
        Err(Error::MaxIterExceeded(Box::new(r)))
    }
}

/// Sup-norm of the strong-form gradient of `Φ`.
pub fn residual_norm(z: &FieldPair, c: &Couplings, pert: &PerturbationProfile) -> Result<f64> {
    let coef = Coefficients::new(z.grid(), c, pert)?;
    let (gu, gv) = coef.gradient(z.u.values(), z.v.values());
    Ok(sup(&gu).max(sup(&gv)))
}

/// Pair of `sech` bumps centered at `offset` (full line) or at the origin (radial).
pub fn default_init(grid: &Arc<RadialGrid>, offset: f64) -> FieldPair {
    let shift = match grid.kind() {
        GridKind::FullLine => offset,
        GridKind::Radial => 0.0,
    };
    let f = grid.sample(|x| 1.0 / (x - shift).cosh()).with_dirichlet();
    FieldPair {
        u: f.clone(),
        v: f,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `(+, +)`
    Z1,
    /// `(−, −)`
    Z2,
    /// `(+, −)`
    Z3,
    /// `(−, +)`
    Z4,
}

impl Branch {
    fn signs(self) -> (f64, f64) {
        match self {
            Branch::Z1 => (1.0, 1.0),
            Branch::Z2 => (-1.0, -1.0),
            Branch::Z3 => (1.0, -1.0),
            Branch::Z4 => (-1.0, 1.0),
        }
    }

    pub fn is_synchronized_in_phase(self) -> bool {
        matches!(self, Branch::Z1 | Branch::Z2)
    }
}

#[derive(Debug, Clone)]
pub struct SynchronizedSolution {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub branch: Branch,
    pub pair: FieldPair,
}

/// Checks the constant-coefficient cubic regime `a₀ = b₀ = μ`, `β₀ > −μ`; returns `μ`.
pub fn synchronized_mu(c: &Couplings) -> Result<f64> {
    if c.p != 4.0 {
        return Err(Error::SynchronizedAnsatz(format!(
            "synchronized ansatz requires p = 4 (got {})",
            c.p
        )));
    }
    if c.a0 != c.b0 || c.periodic.is_some() {
        return Err(Error::SynchronizedAnsatz(format!(
            "synchronized ansatz requires μ=a₀=b₀ (got a₀ = {}, b₀ = {})",
            c.a0, c.b0
        )));
    }
    let mu = c.a0;
    if !(c.beta0 > -mu) {
        return Err(Error::SynchronizedAnsatz(format!(
            "synchronized ansatz requires β₀ > −μ (got β₀ = {}, μ = {mu})",
            c.beta0
        )));
    }
    Ok(mu)
}

/// Builds `(a₁w(a₃x), a₂w(a₃x))` on `grid`. Boundary values are left as sampled.
pub fn build_synchronized(
    branch: Branch,
    c: &Couplings,
    w: &SolitonSolution,
    grid: &Arc<RadialGrid>,
) -> Result<SynchronizedSolution> {
    let mu = synchronized_mu(c)?;
    c.validate_for_dimension(grid.dimension())?;
    if w.profile.grid().dimension() != grid.dimension() {
        return Err(Error::GridMismatch);
    }
    // In-phase branches see an effective mass 1 − κ₀, anti-phase ones 1 + κ₀.
    let mass = if branch.is_synchronized_in_phase() {
        1.0 - c.kappa0
    } else {
        1.0 + c.kappa0
    };
    let amp = (mass / (mu + c.beta0)).sqrt();
    let a3 = mass.sqrt();
    let (s1, s2) = branch.signs();
    let profile: ScalarField = if grid.dimension() == 1 {
        grid.sample(|x| std::f64::consts::SQRT_2 / (a3 * x).cosh())
    } else {
        grid.sample(|r| w.profile.interpolate(a3 * r))
    };
    Ok(SynchronizedSolution {
        a1: s1 * amp,
        a2: s2 * amp,
        a3,
        branch,
        pair: FieldPair {
            u: profile.scaled(s1 * amp),
            v: profile.scaled(s2 * amp),
        },
    })
}

/// Energy of the in-phase synchronized solution in one dimension:
/// `(8/3)(1−κ₀)^{3/2}/(μ+β₀)`.
pub fn synchronized_energy_1d(mu: f64, beta0: f64, kappa0: f64) -> f64 {
    8.0 / 3.0 * (1.0 - kappa0).powf(1.5) / (mu + beta0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationRecord {
    pub kappa0: f64,
    pub energy: f64,
    pub peak_u: f64,
    pub peak_v: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Solves along `kappas`, warm-starting each solve from the previous one.
/// Gaps wider than 0.1 are bridged by unrecorded intermediate solves.
pub fn continuation_kappa(
    template: &Couplings,
    pert: &PerturbationProfile,
    kappas: &[f64],
    init: &FieldPair,
    opts: &SolverOptions,
) -> Result<Vec<ContinuationRecord>> {
    if kappas.is_empty() {
        return Err(Error::InvalidKappaList("empty list".into()));
    }
    for (i, &k) in kappas.iter().enumerate() {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::InvalidKappaList(format!(
                "entry {i} = {k} is outside (0, 1)"
            )));
        }
        if i > 0 && !(k > kappas[i - 1]) {
            return Err(Error::InvalidKappaList(format!(
                "entries must be strictly increasing (entry {i} = {k})"
            )));
        }
    }
    let wrap = |index: usize, kappa0: f64, e: Error| Error::Continuation {
        index,
        kappa0,
        source: Box::new(e),
    };
    let mut current = init.clone();
    let mut prev: Option<f64> = None;
    let mut out = Vec::with_capacity(kappas.len());
    for (index, &k) in kappas.iter().enumerate() {
        if let Some(p) = prev {
            let sub = ((k - p) / CONTINUATION_STEP).ceil() as usize;
            for j in 1..sub {
                let kj = p + (k - p) * j as f64 / sub as f64;
                let cj = template.with_kappa0(kj).map_err(|e| wrap(index, k, e))?;
                current = solve_ground_state_with(&current, &cj, pert, opts)
                    .map_err(|e| wrap(index, k, e))?
                    .pair;
            }
        }
        let ck = template.with_kappa0(k).map_err(|e| wrap(index, k, e))?;
        let rep = solve_ground_state_with(&current, &ck, pert, opts).map_err(|e| wrap(index, k, e))?;
        out.push(ContinuationRecord {
            kappa0: k,
            energy: rep.energy,
            peak_u: rep.pair.u.sup_norm(),
            peak_v: rep.pair.v.sup_norm(),
            iterations: rep.iterations,
            converged: rep.converged,
        });
        current = rep.pair;
        prev = Some(k);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{nehari_value, phi_energy};
    use crate::grid::make_grid;
    use crate::soliton::closed_form_soliton;

    fn line(m: usize) -> Arc<RadialGrid> {
        make_grid(1, 20.0, m).unwrap()
    }

    #[test]
    fn synchronized_amplitudes() {
        let g = line(2001);
        let w = closed_form_soliton(&g).unwrap();
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let z1 = build_synchronized(Branch::Z1, &c, &w, &g).unwrap();
        assert!((z1.a1 - 0.5).abs() < 1e-15 && (z1.a2 - 0.5).abs() < 1e-15);
        assert!((z1.a3 - 0.5f64.sqrt()).abs() < 1e-15);
        let z2 = build_synchronized(Branch::Z2, &c, &w, &g).unwrap();
        assert_eq!((z2.a1, z2.a2), (-0.5, -0.5));
        let z3 = build_synchronized(Branch::Z3, &c, &w, &g).unwrap();
        assert!(z3.a1 > 0.0 && z3.a2 == -z3.a1);
        let decoupled = Couplings::cubic(1.0, 0.0, 1e-15).unwrap();
        let z = build_synchronized(Branch::Z1, &decoupled, &w, &g).unwrap();
        assert!((z.a1 - 1.0).abs() < 1e-12 && (z.a3 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn synchronized_branches_solve_the_system() {
        let g = line(8001);
        let w = closed_form_soliton(&g).unwrap();
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let pert = PerturbationProfile::zero();
        for b in [Branch::Z1, Branch::Z2, Branch::Z3, Branch::Z4] {
            let z = build_synchronized(b, &c, &w, &g).unwrap();
            let r = residual_norm(&z.pair, &c, &pert).unwrap();
            assert!(r < 1e-4, "{b:?}: {r}");
        }
    }

    #[test]
    fn synchronized_rejects_bad_couplings() {
        let g = line(201);
        let w = closed_form_soliton(&g).unwrap();
        let c = Couplings::new(1.0, 2.0, 1.0, 0.5, 4.0).unwrap();
        let err = build_synchronized(Branch::Z1, &c, &w, &g).unwrap_err();
        assert!(err.to_string().contains("μ=a₀=b₀"));
        let c = Couplings::cubic(1.0, -1.0, 0.5).unwrap();
        assert!(build_synchronized(Branch::Z1, &c, &w, &g).is_err());
    }

    #[test]
    fn residual_of_zero_and_random_pairs() {
        let g = line(401);
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let pert = PerturbationProfile::zero();
        assert_eq!(residual_norm(&FieldPair::zeros(&g), &c, &pert).unwrap(), 0.0);
        let z = FieldPair {
            u: g.sample(|x| (-x * x).exp()).with_dirichlet(),
            v: g.sample(|x| (0.3 * x).sin() * (-x * x).exp()).with_dirichlet(),
        };
        assert!(residual_norm(&z, &c, &pert).unwrap() > 0.0);
    }

    #[test]
    fn solver_finds_synchronized_ground_state() {
        let g = line(2001);
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let pert = PerturbationProfile::zero();
        let rep = solve_ground_state(&default_init(&g, 0.0), &c, &pert, 1e-8, 50_000).unwrap();
        assert!(rep.converged);
        assert!((rep.energy - synchronized_energy_1d(1.0, 1.0, 0.5)).abs() < 1e-3);
        assert!(rep.nehari_residual.abs() < 1e-8 * rep.pair.norm_e_sq());
        let e = phi_energy(&rep.pair, &c, &pert).unwrap();
        assert!((e - rep.energy).abs() < 1e-14);
        assert!(nehari_value(&rep.pair, &c, &pert).unwrap().abs() < 1e-9);
        assert!(rep.pair.u.values() == rep.pair.v.values());
    }

    #[test]
    fn zero_init_is_degenerate() {
        let g = line(201);
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let err = solve_ground_state(&FieldPair::zeros(&g), &c, &PerturbationProfile::zero(), 1e-8, 10)
            .unwrap_err();
        assert!(err.to_string().contains("projection degenerate"), "{err}");
    }

    #[test]
    fn max_iter_is_reported() {
        let g = line(401);
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let err = solve_ground_state(&default_init(&g, 0.0), &c, &PerturbationProfile::zero(), 1e-14, 2)
            .unwrap_err();
        match err {
            Error::MaxIterExceeded(r) => assert_eq!(r.iterations, 2),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn continuation_validates_list() {
        let g = line(201);
        let c = Couplings::cubic(1.0, 1.0, 0.5).unwrap();
        let init = default_init(&g, 0.0);
        let pert = PerturbationProfile::zero();
        let opts = SolverOptions::default();
        for bad in [vec![], vec![0.3, 0.2], vec![0.0, 0.5], vec![0.5, 1.0]] {
            let err = continuation_kappa(&c, &pert, &bad, &init, &opts).unwrap_err();
            assert!(matches!(err, Error::InvalidKappaList(_)));
        }
    }

    #[test]
    fn single_entry_continuation_matches_direct_solve() {
        let g = line(1001);
        let c = Couplings::cubic(1.0, 1.0, 0.4).unwrap();
        let init = default_init(&g, 0.0);
        let pert = PerturbationProfile::zero();
        let opts = SolverOptions::default();
        let recs = continuation_kappa(&c, &pert, &[0.4], &init, &opts).unwrap();
        let direct = solve_ground_state_with(&init, &c, &pert, &opts).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].energy, direct.energy);
    }
}
