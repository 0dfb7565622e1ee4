//! One function per subcommand; each returns the tables it produced.

use std::sync::Arc;

use cnls_core::analysis::{
    barycenter, comparison_check, constrained_search, gamma_profile, r0_threshold, SearchOptions,
};
use cnls_core::energy::{FieldPair, PerturbationProfile};
use cnls_core::ground_state::{
    continuation_kappa, default_init, solve_ground_state_with, GroundStateReport, SolverOptions,
};
use cnls_core::soliton::{solve_scalar, SolitonMethod};
use cnls_core::spectrum::nondegeneracy_check;
use cnls_core::ScalarField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Setup;
use crate::error::CliError;
use crate::output::{self, num, Table};

fn flag(b: bool) -> String {
    b.to_string()
}

fn solver_options(s: &Setup) -> SolverOptions {
    SolverOptions {
        tol: s.config.tol,
        max_iter: s.config.max_iter,
        ..SolverOptions::default()
    }
}

/// Sech bumps at `init_offset`, plus seeded uniform noise when requested.
pub fn initial_pair(s: &Setup) -> Result<FieldPair, CliError> {
    let base = default_init(&s.grid, s.config.init_offset);
    if s.config.init_noise == 0.0 {
        return Ok(base);
    }
    let seed = s.config.seed.ok_or_else(|| {
        CliError::Config("init_noise > 0 requires an explicit seed (--seed or `seed`)".into())
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = s.config.init_noise;
    let mut noisy = |f: &ScalarField| -> Result<ScalarField, CliError> {
        let v = f
            .values()
            .iter()
            .map(|x| x + amp * rng.gen_range(-1.0..1.0))
            .collect();
        Ok(ScalarField::new(Arc::clone(&s.grid), v)?.with_dirichlet())
    };
    let u = noisy(&base.u)?;
    let v = noisy(&base.v)?;
    Ok(FieldPair::new(u, v)?)
}

fn pair_table(file: &'static str, z: &FieldPair) -> Table {
    let mut t = Table::new(file, output::PAIR_PROFILE);
    for ((x, u), v) in z.grid().nodes().iter().zip(z.u.values()).zip(z.v.values()) {
        t.push(vec![num(*x), num(*u), num(*v)]);
    }
    t
}

/// Ground state of the unperturbed problem; its energy is `c₀`.
fn limit_ground_state(s: &Setup) -> Result<GroundStateReport, CliError> {
    let init = initial_pair(s)?;
    Ok(solve_ground_state_with(
        &init,
        &s.couplings,
        &PerturbationProfile::zero(),
        &solver_options(s),
    )?)
}

pub fn scalar(s: &Setup) -> Result<Vec<Table>, CliError> {
    let sol = solve_scalar(&s.grid, s.config.tol)?;
    let method = match sol.method {
        SolitonMethod::Shooting => "shooting",
        SolitonMethod::GradientFlow => "gradient-flow",
        SolitonMethod::ClosedForm => "closed-form",
    };
    let mut summary = Table::new("scalar.csv", output::SCALAR);
    summary.push(vec![
        s.grid.dimension().to_string(),
        num(sol.peak),
        num(sol.residual),
        method.into(),
    ]);
    let mut profile = Table::new("scalar_profile.csv", output::SCALAR_PROFILE);
    for (r, w) in s.grid.nodes().iter().zip(sol.profile.values()) {
        profile.push(vec![num(*r), num(*w)]);
    }
    Ok(vec![summary, profile])
}

pub fn ground(s: &Setup) -> Result<Vec<Table>, CliError> {
    let init = initial_pair(s)?;
    let rep = solve_ground_state_with(&init, &s.couplings, &s.perturbation, &solver_options(s))?;
    let mut t = Table::new("ground.csv", output::GROUND);
    t.push(vec![
        num(rep.energy),
        num(rep.grad_sup),
        num(rep.nehari_residual),
        rep.iterations.to_string(),
        flag(rep.converged),
        num(rep.pair.u.sup_norm()),
        num(rep.pair.v.sup_norm()),
    ]);
    Ok(vec![t, pair_table("ground_profile.csv", &rep.pair)])
}

pub fn sweep_kappa(s: &Setup) -> Result<Vec<Table>, CliError> {
    let init = initial_pair(s)?;
    let records = continuation_kappa(
        &s.couplings,
        &s.perturbation,
        &s.config.kappas,
        &init,
        &solver_options(s),
    )?;
    let mut t = Table::new("sweep.csv", output::SWEEP);
    for r in records {
        t.push(vec![
            num(r.kappa0),
            num(r.energy),
            num(r.peak_u),
            num(r.peak_v),
            r.iterations.to_string(),
            flag(r.converged),
        ]);
    }
    Ok(vec![t])
}

pub fn spectrum(s: &Setup) -> Result<Vec<Table>, CliError> {
    let sol = solve_scalar(&s.grid, s.config.tol)?;
    let rep = nondegeneracy_check(&s.couplings, &sol, s.config.eigen_count)?;
    let mut summary = Table::new("spectrum.csv", output::SPECTRUM);
    summary.push(vec![
        num(s.couplings.beta0),
        num(s.couplings.kappa0),
        num(rep.w0),
        num(rep.k_indicator),
        rep.verdict.as_str().into(),
        rep.kernel_dim.to_string(),
        num(rep.sigma_min_a),
        num(rep.sigma_min_b),
        flag(rep.agrees),
    ]);
    let mut eig = Table::new("eigenvalues.csv", output::EIGENVALUES);
    for (i, l) in rep.eigenvalues.iter().enumerate() {
        eig.push(vec![i.to_string(), num(*l)]);
    }
    Ok(vec![summary, eig])
}

fn read_pair(s: &Setup) -> Result<FieldPair, CliError> {
    #[derive(serde::Deserialize)]
    struct Row {
        x: f64,
        u: f64,
        v: f64,
    }
    let path = s
        .config
        .pair_file
        .as_ref()
        .ok_or_else(|| CliError::Config("barycenter needs `pair_file` (CSV with x,u,v)".into()))?;
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let (mut u, mut v) = (Vec::new(), Vec::new());
    let nodes = s.grid.nodes();
    for (i, row) in rdr.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let expected = nodes.get(i).copied().unwrap_or(f64::NAN);
        if !((row.x - expected).abs() <= 1e-9 * s.grid.radius()) {
            return Err(CliError::Config(format!(
                "{}: row {i} has x = {} but the configured grid node is {expected}",
                path.display(),
                row.x
            )));
        }
        u.push(row.u);
        v.push(row.v);
    }
    let u = ScalarField::new(Arc::clone(&s.grid), u)?;
    let v = ScalarField::new(Arc::clone(&s.grid), v)?;
    Ok(FieldPair::new(u, v)?)
}

pub fn barycenter_cmd(s: &Setup) -> Result<Vec<Table>, CliError> {
    let z = read_pair(s)?;
    let xi = barycenter(&z)?;
    let mut t = Table::new("barycenter.csv", output::BARYCENTER);
    for (i, x) in xi.point.iter().enumerate() {
        t.push(vec![i.to_string(), num(*x)]);
    }
    Ok(vec![t])
}

pub fn gamma(s: &Setup) -> Result<Vec<Table>, CliError> {
    let w0 = limit_ground_state(s)?;
    let points = gamma_profile(&w0.pair, &s.couplings, &s.perturbation, &s.config.ys)?;
    let mut t = Table::new("gamma.csv", output::GAMMA);
    for p in points {
        t.push(vec![
            num(p.y),
            num(p.t_y),
            num(p.energy),
            num(w0.energy),
            p.xi.map(num).unwrap_or_default(),
        ]);
    }
    Ok(vec![t])
}

pub fn threshold(s: &Setup) -> Result<Vec<Table>, CliError> {
    let c0 = match s.config.c0 {
        Some(c0) => c0,
        None => limit_ground_state(s)?.energy,
    };
    let rep = r0_threshold(&s.couplings, &s.perturbation, c0, s.config.d0)?;
    let mut t = Table::new("threshold.csv", output::THRESHOLD);
    t.push(vec![
        num(rep.r0),
        num(rep.c0),
        num(rep.c_tilde0),
        num(rep.ratio_bound),
        flag(rep.satisfied),
    ]);
    Ok(vec![t])
}

pub fn compare(s: &Setup) -> Result<Vec<Table>, CliError> {
    let w0 = limit_ground_state(s)?;
    let rep = comparison_check(&w0.pair, &s.couplings, &s.perturbation)?;
    let mut t = Table::new("compare.csv", output::COMPARE);
    t.push(vec![
        num(rep.lhs01),
        num(rep.rhs01),
        flag(rep.crit01),
        flag(rep.crit_less2),
        flag(rep.crit02),
        flag(rep.crit03),
        flag(rep.crit04),
        flag(rep.equal_components),
        rep.conclusion.as_str().into(),
    ]);
    Ok(vec![t])
}

pub fn bound(s: &Setup) -> Result<Vec<Table>, CliError> {
    let c0 = limit_ground_state(s)?.energy;
    let init = initial_pair(s)?;
    let opts = SearchOptions {
        tol: s.config.tol,
        max_iter: s.config.max_iter,
        penalties: s.config.penalties.clone(),
    };
    let rep = constrained_search(&init, &s.couplings, &s.perturbation, &opts)?;
    let xi = barycenter(&rep.pair)?.point[0];
    let mut t = Table::new("bound.csv", output::BOUND);
    t.push(vec![
        num(rep.energy),
        num(c0),
        num(rep.energy - c0),
        num(xi),
        rep.iterations.to_string(),
        flag(rep.converged),
    ]);
    Ok(vec![t, pair_table("bound_profile.csv", &rep.pair)])
}
