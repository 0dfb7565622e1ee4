//! Truncated radial meshes for `ℝ^N`, `N ∈ {1, 2, 3}`.
//!
//! Two layouts are supported:
//!
//! * [`GridKind::FullLine`]: `N = 1` on the symmetric interval `[−R, R]`,
//!   Dirichlet nodes at both ends.
//! * [`GridKind::Radial`]: radial functions on `[0, R]` with the surface
//!   factor `ω_N r^{N−1}` folded into the weights; the node at `r = R` is
//!   Dirichlet. `N = 1` radial grids describe even functions on the line.
//!
//! Quadrature weights are the measure of each node's cell
//! `[r_i − h/2, r_i + h/2] ∩ [0, R]`; for `N = 1` this is the trapezoid rule.
//! The Laplacian is the matching finite-volume operator, so that
//! `⟨Δf, g⟩ = −Σ_e c_e (f_{i+1} − f_i)(g_{i+1} − g_i)` exactly for fields
//! vanishing on Dirichlet nodes. At `r = 0` the flux form reduces to
//! `2N (f_1 − f_0)/h² ≈ N f''(0)`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    FullLine,
    Radial,
}

#[derive(Clone)]
pub struct RadialGrid {
    kind: GridKind,
    dimension: usize,
    radius: f64,
    spacing: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Flux coefficient `A_{i+1/2} / h` for the edge between nodes `i` and `i + 1`.
    edges: Vec<f64>,
}

impl fmt::Debug for RadialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGrid")
            .field("kind", &self.kind)
            .field("dimension", &self.dimension)
            .field("radius", &self.radius)
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
            && self.dimension == other.dimension
            && self.radius == other.radius
            && self.nodes.len() == other.nodes.len()
    }
}

/// Surface measure of the unit sphere `S^{N−1}` (for `N = 1`, the two points `±1`).
pub fn sphere_area(dimension: usize) -> f64 {
    match dimension {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => f64::NAN,
    }
}

/// Builds the default grid: full line for `N = 1`, radial otherwise.
pub fn make_grid(dimension: usize, radius: f64, nodes: usize) -> Result<Arc<RadialGrid>> {
    RadialGrid::new(dimension, radius, nodes).map(Arc::new)
}

fn check_params(dimension: usize, radius: f64, nodes: usize) -> Result<()> {
    if !(1..=3).contains(&dimension) {
        return Err(Error::UnsupportedDimension(dimension));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidRadius(radius));
    }
    if nodes < 3 {
        return Err(Error::TooFewNodes(nodes));
    }
    Ok(())
}

impl RadialGrid {
    pub fn new(dimension: usize, radius: f64, nodes: usize) -> Result<Self> {
        check_params(dimension, radius, nodes)?;
        if dimension == 1 {
            Self::full_line(radius, nodes)
        } else {
            Self::radial(dimension, radius, nodes)
        }
    }

    pub fn full_line(radius: f64, nodes: usize) -> Result<Self> {
        check_params(1, radius, nodes)?;
        let h = 2.0 * radius / (nodes - 1) as f64;
        let last = nodes - 1;
        let xs: Vec<f64> = (0..nodes)
            .map(|i| {
                // Mirror-exact placement so the grid is symmetric about 0 in floating point.
                if 2 * i <= last {
                    -radius + i as f64 * h
                } else {
                    radius - (last - i) as f64 * h
                }
            })
            .collect();
        let mut weights = vec![h; nodes];
        weights[0] = 0.5 * h;
        weights[last] = 0.5 * h;
        let edges = vec![1.0 / h; nodes - 1];
        Ok(Self {
            kind: GridKind::FullLine,
            dimension: 1,
            radius,
            spacing: h,
            nodes: xs,
            weights,
            edges,
        })
    }

    pub fn radial(dimension: usize, radius: f64, nodes: usize) -> Result<Self> {
        check_params(dimension, radius, nodes)?;
        let h = radius / (nodes - 1) as f64;
        let omega = sphere_area(dimension);
        let n = dimension as i32;
        let rs: Vec<f64> = (0..nodes).map(|i| i as f64 * h).collect();
        let weights = (0..nodes)
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { (i as f64 - 0.5) * h };
                let hi = if i == nodes - 1 { radius } else { (i as f64 + 0.5) * h };
                omega * (hi.powi(n) - lo.powi(n)) / dimension as f64
            })
            .collect();
        let edges = (0..nodes - 1)
            .map(|i| omega * ((i as f64 + 0.5) * h).powi(n - 1) / h)
            .collect();
        Ok(Self {
            kind: GridKind::Radial,
            dimension,
            radius,
            spacing: h,
            nodes: rs,
            weights,
            edges,
        })
    }

    /// Radial grid on `[0, R]` with the same spacing as `self` (even part of a full-line grid).
    pub fn half_line(&self) -> Result<Self> {
        match self.kind {
            GridKind::Radial => Ok(self.clone()),
            GridKind::FullLine => {
                let m = (self.radius / self.spacing).round() as usize + 1;
                Self::radial(1, self.radius, m)
            }
        }
    }

    /// Copy of this grid with all lengths multiplied by `factor`.
    pub fn dilated(&self, factor: f64) -> Result<Self> {
        let m = self.len();
        match self.kind {
            GridKind::FullLine => Self::full_line(self.radius * factor, m),
            GridKind::Radial => Self::radial(self.dimension, self.radius * factor, m),
        }
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }
    pub fn dimension(&self) -> usize {
        self.dimension
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }
    pub fn spacing(&self) -> f64 {
        self.spacing
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    /// Measure of the truncated ball (interval length for `N = 1`).
    pub fn measure(&self) -> f64 {
        match self.kind {
            GridKind::FullLine => 2.0 * self.radius,
            GridKind::Radial => {
                sphere_area(self.dimension) * self.radius.powi(self.dimension as i32)
                    / self.dimension as f64
            }
        }
    }

    /// Index range of the non-Dirichlet nodes.
    pub fn free_range(&self) -> Range<usize> {
        match self.kind {
            GridKind::FullLine => 1..self.len() - 1,
            GridKind::Radial => 0..self.len() - 1,
        }
    }

    pub fn is_dirichlet(&self, i: usize) -> bool {
        !self.free_range().contains(&i)
    }

    /// Index of the node at the origin, if any.
    pub fn center_index(&self) -> Option<usize> {
        match self.kind {
            GridKind::Radial => Some(0),
            GridKind::FullLine => {
                let m = self.len();
                (m % 2 == 1).then_some(m / 2)
            }
        }
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(q, v)| q * v).sum()
    }

    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(f.iter().zip(g))
            .map(|(q, (a, b))| q * a * b)
            .sum()
    }

    /// Discrete `∫ ∇f·∇g` (edge sum).
    pub fn dirichlet_form(&self, f: &[f64], g: &[f64]) -> f64 {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, c)| c * (f[i + 1] - f[i]) * (g[i + 1] - g[i]))
            .sum()
    }

    /// Finite-volume Laplacian; Dirichlet rows are zero.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let m = self.len();
        let mut out = vec![0.0; m];
        for i in self.free_range() {
            let right = self.edges[i] * (f[i + 1] - f[i]);
            let left = if i == 0 {
                0.0
            } else {
                self.edges[i - 1] * (f[i] - f[i - 1])
            };
            out[i] = (right - left) / self.weights[i];
        }
        out
    }

    /// Weak-form stiffness matrix `S` restricted to the free nodes, as
    /// `(diagonal, off-diagonal)` of a symmetric tridiagonal matrix.
    pub fn stiffness(&self) -> (Vec<f64>, Vec<f64>) {
        let range = self.free_range();
        let mut diag = Vec::with_capacity(range.len());
        let mut off = Vec::with_capacity(range.len().saturating_sub(1));
        for i in range.clone() {
            let left = if i == 0 { 0.0 } else { self.edges[i - 1] };
            diag.push(left + self.edges[i]);
            if i + 1 < range.end {
                off.push(-self.edges[i]);
            }
        }
        (diag, off)
    }

    pub fn sample(self: &Arc<Self>, f: impl Fn(f64) -> f64) -> ScalarField {
        let values = self.nodes.iter().map(|&x| f(x)).collect();
        ScalarField {
            grid: Arc::clone(self),
            values,
        }
    }

    fn extended(&self, values: &[f64], idx: isize) -> f64 {
        let m = self.len() as isize;
        match self.kind {
            GridKind::Radial => {
                let j = idx.abs();
                if j < m {
                    values[j as usize]
                } else {
                    0.0
                }
            }
            GridKind::FullLine => {
                if (0..m).contains(&idx) {
                    values[idx as usize]
                } else {
                    0.0
                }
            }
        }
    }

    /// Cubic Lagrange interpolation; even extension through `r = 0` on
    /// radial grids, zero beyond the truncation boundary.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let x0 = self.nodes[0];
        let s = (x - x0) / self.spacing;
        let m = self.len() as f64;
        let outside = match self.kind {
            GridKind::Radial => x.abs() > self.radius,
            GridKind::FullLine => x.abs() > self.radius,
        };
        if outside || !s.is_finite() {
            return 0.0;
        }
        let i0 = s.floor();
        let t = s - i0;
        let i0 = i0 as isize;
        if t == 0.0 && (i0 as f64) < m && i0 >= 0 {
            return values[i0 as usize];
        }
        let f = |k: isize| self.extended(values, i0 + k);
        let (fm, f0, f1, f2) = (f(-1), f(0), f(1), f(2));
        // Lagrange weights on nodes −1, 0, 1, 2 at offset t.
        let wm = -t * (t - 1.0) * (t - 2.0) / 6.0;
        let w0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
        let w1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
        let w2 = (t + 1.0) * t * (t - 1.0) / 6.0;
        wm * fm + w0 * f0 + w1 * f1 + w2 * f2
    }
}

/// Real-valued grid function.
#[derive(Clone)]
pub struct ScalarField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("grid", &self.grid)
            .field("sup_norm", &self.sup_norm())
            .finish()
    }
}

impl ScalarField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    pub(crate) fn from_parts(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| factor * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Value at the origin (interpolated if the origin is not a node).
    pub fn value_at_origin(&self) -> f64 {
        match self.grid.center_index() {
            Some(i) => self.values[i],
            None => self.grid.interpolate(&self.values, 0.0),
        }
    }

    pub fn interpolate(&self, x: f64) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    /// Copy with the Dirichlet nodes set to zero.
    pub fn with_dirichlet(&self) -> Self {
        let mut out = self.clone();
        for i in 0..out.values.len() {
            if self.grid.is_dirichlet(i) {
                out.values[i] = 0.0;
            }
        }
        out
    }

    /// `x ↦ f(x − shift)` on a full-line grid. Shifts that are whole
    /// multiples of the spacing move values exactly; others use cubic
    /// interpolation. Values entering from outside the grid are zero.
    pub fn translated(&self, shift: f64) -> Result<Self> {
        if self.grid.kind() != GridKind::FullLine {
            return Err(Error::GridKindRequired("a full-line grid"));
        }
        let h = self.grid.spacing();
        let steps = shift / h;
        let k = steps.round();
        if (steps - k).abs() < 1e-9 {
            return Ok(self.shifted_nodes(k as isize));
        }
        let nodes = self.grid.nodes();
        let values = nodes
            .iter()
            .map(|&x| self.grid.interpolate(&self.values, x - shift))
            .collect();
        Ok(Self::from_parts(Arc::clone(&self.grid), values))
    }

    /// Shift by `k` nodes (towards larger `x` for positive `k`), zero fill.
    pub fn shifted_nodes(&self, k: isize) -> Self {
        let m = self.values.len() as isize;
        let values = (0..m)
            .map(|i| {
                let j = i - k;
                if (0..m).contains(&j) {
                    self.values[j as usize]
                } else {
                    0.0
                }
            })
            .collect();
        Self::from_parts(Arc::clone(&self.grid), values)
    }
}

/// Finite-volume Laplacian of a field (zero on Dirichlet rows).
pub fn apply_laplacian(f: &ScalarField) -> ScalarField {
    ScalarField::from_parts(Arc::clone(f.grid()), f.grid().laplacian(f.values()))
}

/// Quadrature `Σ q_i f_i`.
pub fn integrate(f: &ScalarField) -> f64 {
    f.grid().integrate(f.values())
}
