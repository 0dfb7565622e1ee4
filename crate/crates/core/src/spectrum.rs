//! Linearization at in-phase synchronized solutions: the weighted scalar
//! eigenproblem `−Δψ + ψ = λw²ψ`, the sum/difference decoupling, and the
//! nondegeneracy verdict.

use std::sync::Arc;

use crate::energy::Couplings;
use crate::error::{Error, Result};
use crate::grid::{GridKind, RadialGrid, ScalarField};
use crate::ground_state::{build_synchronized, synchronized_mu, Branch, SynchronizedSolution};
use crate::soliton::{closed_form_soliton, SolitonSolution};
use crate::tridiag::Pencil;

/// Cutoff on the smallest singular value below which a discrete kernel is reported.
pub const KERNEL_CUTOFF: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// Radial functions; even functions for `N = 1`.
    Radial,
    /// All functions on the full line (`N = 1` only).
    FullLine,
}

#[derive(Debug, Clone)]
pub struct WeightedSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<ScalarField>,
    pub rayleigh: Vec<f64>,
}

/// Grid and sampled values of `w` in the requested symmetry class.
fn restrict(w: &ScalarField, symmetry: Symmetry) -> Result<(Arc<RadialGrid>, Vec<f64>)> {
    let g = w.grid();
    match (symmetry, g.kind()) {
        (Symmetry::FullLine, GridKind::FullLine) => Ok((Arc::clone(g), w.values().to_vec())),
        (Symmetry::FullLine, GridKind::Radial) => {
            Err(Error::GridKindRequired("a full-line grid for the unrestricted solve"))
        }
        (Symmetry::Radial, GridKind::Radial) => Ok((Arc::clone(g), w.values().to_vec())),
        (Symmetry::Radial, GridKind::FullLine) => {
            let half = Arc::new(g.half_line()?);
            let values = half.nodes().iter().map(|&r| w.interpolate(r)).collect();
            Ok((half, values))
        }
    }
}

fn embed(g: &Arc<RadialGrid>, free: &[f64]) -> ScalarField {
    let mut values = vec![0.0; g.len()];
    let start = g.free_range().start;
    values[start..start + free.len()].copy_from_slice(free);
    ScalarField::new(Arc::clone(g), values).expect("finite eigenvector")
}

/// Pencil `(S + W·(1 − potential), W·mass)` over the free nodes.
fn pencil(g: &RadialGrid, potential: &[f64], mass: &[f64]) -> Result<Pencil> {
    let range = g.free_range();
    let (s, off) = g.stiffness();
    let q = &g.weights()[range.clone()];
    let diag = s
        .iter()
        .zip(q)
        .zip(&potential[range.clone()])
        .map(|((s, q), v)| s + q * (1.0 - v))
        .collect();
    let b = q.iter().zip(&mass[range]).map(|(q, m)| q * m).collect();
    Pencil::new(diag, off, b)
}

fn eigenpairs(g: &Arc<RadialGrid>, p: &Pencil, count: usize) -> Result<WeightedSpectrum> {
    let mut eigenvalues = Vec::with_capacity(count);
    let mut eigenvectors = Vec::with_capacity(count);
    let mut rayleigh = Vec::with_capacity(count);
    for k in 0..count.min(p.len()) {
        let lam = p.eigenvalue(k)?;
        let x = p.eigenvector(lam)?;
        rayleigh.push(p.rayleigh_quotient(&x));
        eigenvalues.push(lam);
        eigenvectors.push(embed(g, &x));
    }
    Ok(WeightedSpectrum {
        eigenvalues,
        eigenvectors,
        rayleigh,
    })
}

/// Smallest `count` eigenvalues of `−Δψ + ψ = λw²ψ`, ascending.
pub fn weighted_eigenvalues(
    w: &SolitonSolution,
    count: usize,
    symmetry: Symmetry,
) -> Result<WeightedSpectrum> {
    if count < 2 {
        return Err(Error::InvalidArgument(format!("eigenvalue count must be ≥ 2, got {count}")));
    }
    let (g, values) = restrict(&w.profile, symmetry)?;
    let mass: Vec<f64> = values.iter().map(|x| x * x).collect();
    if g.free_range().all(|i| mass[i] == 0.0) {
        return Err(Error::WeightDegenerate);
    }
    let zero = vec![0.0; g.len()];
    let p = pencil(&g, &zero, &mass)?;
    eigenpairs(&g, &p, count)
}

/// Scalar problem `−ΔΨ + Ψ = (coefficient·w²(y) + shift)Ψ` on the scaled grid.
#[derive(Debug, Clone)]
pub struct ScalarDescriptor {
    pub coefficient: f64,
    pub shift: f64,
    /// `coefficient·w² + shift` sampled on the scaled grid.
    pub potential: ScalarField,
}

impl ScalarDescriptor {
    /// Eigenvalues `σ` of `−ΔΨ + Ψ − VΨ = σΨ`, ascending.
    pub fn spectrum(&self, count: usize) -> Result<Vec<f64>> {
        let p = self.pencil()?;
        (0..count.min(p.len())).map(|k| p.eigenvalue(k)).collect()
    }

    /// Eigenvalue of smallest magnitude (the singular value of the symmetric operator).
    pub fn smallest_singular(&self) -> Result<f64> {
        Ok(self.pencil()?.smallest_magnitude()?.abs())
    }

    fn pencil(&self) -> Result<Pencil> {
        let g = self.potential.grid();
        pencil(g, self.potential.values(), &vec![1.0; g.len()])
    }
}

/// Splits the linearization at an in-phase synchronized solution into the
/// sum channel (A) and the difference channel (B).
pub fn decouple(
    sync: &SynchronizedSolution,
    c: &Couplings,
) -> Result<(ScalarDescriptor, ScalarDescriptor)> {
    if !sync.branch.is_synchronized_in_phase() {
        return Err(Error::WrongBranch(format!(
            "decoupling applies to the in-phase branches z₁, z₂ (got {:?})",
            sync.branch
        )));
    }
    let mu = synchronized_mu(c)?;
    let k = c.kappa0;
    let grid = Arc::new(sync.pair.u.grid().dilated(sync.a3)?);
    let w2: Vec<f64> = sync
        .pair
        .u
        .values()
        .iter()
        .map(|u| (u / sync.a1).powi(2))
        .collect();
    let make = |coefficient: f64, shift: f64| -> Result<ScalarDescriptor> {
        let values = w2.iter().map(|x| coefficient * x + shift).collect();
        Ok(ScalarDescriptor {
            coefficient,
            shift,
            potential: ScalarField::new(Arc::clone(&grid), values)?,
        })
    };
    let a = make(3.0, 0.0)?;
    let b = make((3.0 * mu - c.beta0) / (mu + c.beta0), -2.0 * k / (1.0 - k))?;
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Nondegenerate,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Nondegenerate => "nondegenerate",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// `K = (3−β̃)/(1+β̃)·w₀² − 2κ₀/(1−κ₀)` with `β̃ = β₀/μ`, and the verdict.
pub fn nondegeneracy_verdict(beta_ratio: f64, kappa0: f64, w0: f64) -> Result<(f64, Verdict)> {
    if !(beta_ratio > -1.0) {
        return Err(Error::InvalidCouplings(format!(
            "nondegeneracy test requires β₀ > −μ (got β₀/μ = {beta_ratio})"
        )));
    }
    let k = (3.0 - beta_ratio) / (1.0 + beta_ratio) * w0 * w0 - 2.0 * kappa0 / (1.0 - kappa0);
    let verdict = if beta_ratio >= 3.0 || k <= 0.0 {
        Verdict::Nondegenerate
    } else {
        Verdict::Inconclusive
    };
    Ok((k, verdict))
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub w0: f64,
    pub k_indicator: f64,
    pub verdict: Verdict,
    pub kernel_dim: usize,
    pub sigma_min_a: f64,
    pub sigma_min_b: f64,
    /// A nondegenerate verdict is backed by a trivial discrete kernel.
    pub agrees: bool,
}

/// Formula verdict cross-checked against the radial kernels of both channels.
pub fn nondegeneracy_check(c: &Couplings, w: &SolitonSolution, count: usize) -> Result<SpectrumReport> {
    let mu = synchronized_mu(c)?;
    let w0 = w.peak;
    let (k_indicator, verdict) = nondegeneracy_verdict(c.beta0 / mu, c.kappa0, w0)?;
    let eigenvalues = weighted_eigenvalues(w, count, Symmetry::Radial)?.eigenvalues;
    let g = w.profile.grid();
    let (radial, w_radial) = match g.kind() {
        GridKind::Radial => (Arc::clone(g), w.clone()),
        GridKind::FullLine => {
            let half = Arc::new(g.half_line()?);
            let w_half = closed_form_soliton(&half)?;
            (half, w_half)
        }
    };
    let sync = build_synchronized(Branch::Z1, c, &w_radial, &radial)?;
    let (a, b) = decouple(&sync, c)?;
    let sigma_min_a = a.smallest_singular()?;
    let sigma_min_b = b.smallest_singular()?;
    let kernel_dim = [sigma_min_a, sigma_min_b]
        .iter()
        .filter(|s| **s < KERNEL_CUTOFF)
        .count();
    let agrees = verdict == Verdict::Inconclusive || kernel_dim == 0;
    Ok(SpectrumReport {
        eigenvalues,
        w0,
        k_indicator,
        verdict,
        kernel_dim,
        sigma_min_a,
        sigma_min_b,
        agrees,
    })
}
