//! Run configuration: a flat TOML document plus optional perturbation tables.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use cnls_core::energy::{Coefficients, Couplings, PerturbationProfile};
use cnls_core::{make_grid, RadialGrid, ScalarField};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

fn one() -> f64 {
    1.0
}
fn four() -> f64 {
    4.0
}
fn default_tol() -> f64 {
    cnls_core::ground_state::DEFAULT_TOL
}
fn default_max_iter() -> usize {
    cnls_core::ground_state::DEFAULT_MAX_ITER
}
fn default_kappas() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}
fn default_eigen_count() -> usize {
    6
}
fn default_ys() -> Vec<f64> {
    (-5..=5).map(f64::from).collect()
}
fn default_penalties() -> Vec<f64> {
    vec![1.0, 10.0, 100.0, 1e3, 1e4]
}

/// A spatial perturbation profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `amplitude · exp(−((x − center)/width)²)`, with `x = r` on radial grids.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// Samples from a CSV file with header `x,value`, linearly interpolated
    /// onto the grid and zero outside the sampled range.
    File { path: PathBuf },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpecs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<ProfileSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<ProfileSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<ProfileSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<ProfileSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    /// Defaults to 20 for `N = 1` and 15 otherwise.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    /// Defaults to `100·R + 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(default = "one")]
    pub a0: f64,
    #[serde(default = "one")]
    pub b0: f64,
    pub beta0: f64,
    pub kappa0: f64,
    #[serde(default = "four")]
    pub p: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Center of the initial bumps (full-line grids).
    #[serde(default)]
    pub init_offset: f64,
    /// Amplitude of uniform noise added to the initial pair; needs a seed.
    #[serde(default)]
    pub init_noise: f64,
    #[serde(default = "default_kappas")]
    pub kappas: Vec<f64>,
    #[serde(default = "default_eigen_count")]
    pub eigen_count: usize,
    #[serde(default = "default_ys")]
    pub ys: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
    /// Stored pair (`x,u,v`) for the `barycenter` command.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair_file: Option<PathBuf>,
    #[serde(default = "default_penalties")]
    pub penalties: Vec<f64>,
    #[serde(default)]
    pub perturbation: PerturbationSpecs,
}

/// Everything a command needs, validated.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: RunConfig,
    pub grid: Arc<RadialGrid>,
    pub couplings: Couplings,
    pub perturbation: PerturbationProfile,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!(
            "cannot read {}: {e}",
            path.display()
        )))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.anchor_paths(base);
        Ok(cfg)
    }

    /// Makes file references absolute relative to `base`.
    fn anchor_paths(&mut self, base: &Path) {
        let anchor = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = self.pair_file.as_mut() {
            anchor(p);
        }
        let specs = &mut self.perturbation;
        for spec in [&mut specs.a, &mut specs.b, &mut specs.beta, &mut specs.kappa]
            .into_iter()
            .flatten()
        {
            if let ProfileSpec::File { path } = spec {
                anchor(path);
            }
        }
    }

    /// Fills grid defaults so the serialized form is self-contained.
    pub fn resolved(mut self) -> Self {
        let r = self
            .radius
            .unwrap_or(if self.dimension == 1 { 20.0 } else { 15.0 });
        self.radius = Some(r);
        if self.nodes.is_none() {
            self.nodes = Some((100.0 * r).round() as usize + 1);
        }
        self
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(self) -> Result<Setup, CliError> {
        let config = self.resolved();
        let grid = make_grid(
            config.dimension,
            config.radius.unwrap_or_default(),
            config.nodes.unwrap_or_default(),
        )?;
        let couplings = Couplings::new(config.a0, config.b0, config.beta0, config.kappa0, config.p)?;
        couplings.validate_for_dimension(config.dimension)?;
        if !(config.tol > 0.0 && config.tol.is_finite()) {
            return Err(CliError::Config(format!("tol must be positive, got {}", config.tol)));
        }
        if config.max_iter == 0 {
            return Err(CliError::Config("max_iter must be at least 1".into()));
        }
        if !(config.init_noise >= 0.0 && config.init_noise.is_finite()) {
            return Err(CliError::Config(format!(
                "init_noise must be non-negative, got {}",
                config.init_noise
            )));
        }
        let specs = &config.perturbation;
        let mut pert = PerturbationProfile::zero();
        if let Some(s) = &specs.a {
            pert = pert.with_a(sample_profile(&grid, s, "a")?);
        }
        if let Some(s) = &specs.b {
            pert = pert.with_b(sample_profile(&grid, s, "b")?);
        }
        if let Some(s) = &specs.beta {
            pert = pert.with_beta(sample_profile(&grid, s, "beta")?);
        }
        if let Some(s) = &specs.kappa {
            pert = pert.with_kappa(sample_profile(&grid, s, "kappa")?);
        }
        Coefficients::new(&grid, &couplings, &pert)?;
        Ok(Setup {
            config,
            grid,
            couplings,
            perturbation: pert,
        })
    }
}

fn sample_profile(grid: &Arc<RadialGrid>, spec: &ProfileSpec, name: &str) -> Result<ScalarField, CliError> {
    match spec {
        ProfileSpec::Gaussian {
            amplitude,
            width,
            center,
        } => {
            if !(*width > 0.0) {
                return Err(CliError::Config(format!(
                    "perturbation {name}: width must be positive, got {width}"
                )));
            }
            Ok(grid.sample(|x| amplitude * (-((x - center) / width).powi(2)).exp()))
        }
        ProfileSpec::File { path } => {
            let samples = read_samples(path)?;
            let values = grid
                .nodes()
                .iter()
                .map(|&x| interpolate_samples(&samples, x))
                .collect();
            Ok(ScalarField::new(Arc::clone(grid), values)?)
        }
    }
}

fn read_samples(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    #[derive(Deserialize)]
    struct Row {
        x: f64,
        value: f64,
    }
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let row = row.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        out.push((row.x, row.value));
    }
    if out.len() < 2 || out.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(CliError::Config(format!(
            "{}: need at least two samples with strictly increasing x",
            path.display()
        )));
    }
    Ok(out)
}

fn interpolate_samples(s: &[(f64, f64)], x: f64) -> f64 {
    if x < s[0].0 || x > s[s.len() - 1].0 {
        return 0.0;
    }
    let k = s.partition_point(|&(xi, _)| xi <= x).clamp(1, s.len() - 1);
    let (x0, y0) = s[k - 1];
    let (x1, y1) = s[k];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "dimension = 1\nbeta0 = 1.0\nkappa0 = 0.5\n";

    #[test]
    fn defaults_are_resolved() {
        let cfg = RunConfig::from_toml(BASIC).unwrap().resolved();
        assert_eq!(cfg.radius, Some(20.0));
        assert_eq!(cfg.nodes, Some(2001));
        assert_eq!(cfg.p, 4.0);
        assert_eq!(cfg.kappas.len(), 9);
    }

    #[test]
    fn serialized_config_round_trips() {
        let text = format!(
            "{BASIC}[perturbation.kappa]\nkind = \"gaussian\"\namplitude = -0.05\nwidth = 1.0\n"
        );
        let cfg = RunConfig::from_toml(&text).unwrap().resolved();
        let again = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn invalid_kappa_cites_the_condition() {
        let cfg = RunConfig::from_toml("dimension = 1\nbeta0 = 1.0\nkappa0 = 1.2\n").unwrap();
        let err = cfg.validate().unwrap_err();
        assert!(err.to_string().contains("(A₀)"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml("dimension = 1\nbeta0 = 1.0\nkappa0 = 0.5\nkapa = 1\n").is_err());
    }

    #[test]
    fn sample_interpolation() {
        let s = [(0.0, 1.0), (1.0, 3.0), (2.0, 3.0)];
        assert_eq!(interpolate_samples(&s, 0.5), 2.0);
        assert_eq!(interpolate_samples(&s, 2.0), 3.0);
        assert_eq!(interpolate_samples(&s, -0.1), 0.0);
        assert_eq!(interpolate_samples(&s, 2.5), 0.0);
    }
}
