//! Time grids, sampled functions and space-time tensor fields.
//!
//! Time grids are cell-centred: every node is the midpoint of a cell and the
//! quadrature weight is the cell width (composite midpoint rule). No node ever
//! sits on `t = 0`, where the weight `t^{p(1-mu)}` and several trace formulas
//! are singular.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The exponent pair `(p, mu)` of the temporal power weight `t^{p(1-mu)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    p: f64,
    mu: f64,
}

impl WeightParams {
    pub fn new(p: f64, mu: f64) -> Result<Self> {
        let ok = p.is_finite() && p > 1.0 && mu.is_finite() && mu > 1.0 / p && mu <= 1.0;
        if !ok {
            return Err(Error::InvalidWeight { p, mu });
        }
        Ok(Self { p, mu })
    }

    /// Unweighted parameters `(p, 1)`.
    pub fn unweighted(p: f64) -> Result<Self> {
        Self::new(p, 1.0)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Exponent of the power weight, `p(1-mu)`.
    pub fn weight_exponent(&self) -> f64 {
        self.p * (1.0 - self.mu)
    }

    /// Limit number `1 - mu + 1/p` for the existence of a trace at `t = 0`.
    /// Lies in `[1/p, 1)`.
    pub fn trace_limit(&self) -> f64 {
        1.0 - self.mu + 1.0 / self.p
    }

    pub fn is_unweighted(&self) -> bool {
        self.mu == 1.0
    }
}

/// Time interval: a finite `(0, T)` or the half-line truncated at `T_trunc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeDomain {
    Finite { t: f64 },
    HalfLine { t_trunc: f64 },
}

impl TimeDomain {
    pub fn finite(t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidGrid(format!("interval length must be > 0, got {t}")));
        }
        Ok(TimeDomain::Finite { t })
    }

    pub fn half_line(t_trunc: f64) -> Result<Self> {
        if !(t_trunc.is_finite() && t_trunc > 0.0) {
            return Err(Error::InvalidGrid(format!("truncation must be > 0, got {t_trunc}")));
        }
        Ok(TimeDomain::HalfLine { t_trunc })
    }

    /// Length of the (possibly truncated) computational interval.
    pub fn length(&self) -> f64 {
        match *self {
            TimeDomain::Finite { t } => t,
            TimeDomain::HalfLine { t_trunc } => t_trunc,
        }
    }

    pub fn is_half_line(&self) -> bool {
        matches!(self, TimeDomain::HalfLine { .. })
    }

    /// Same kind of domain with a different length.
    pub fn with_length(&self, len: f64) -> Result<Self> {
        match self {
            TimeDomain::Finite { .. } => TimeDomain::finite(len),
            TimeDomain::HalfLine { .. } => TimeDomain::half_line(len),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grading {
    Uniform,
    /// Cells shrink by `ratio` per layer towards `t = 0`; `layers` geometric
    /// cells are inserted below the first bulk cell.
    Geometric {
        ratio: f64,
        layers: usize,
    },
    /// Grid reconstructed from a list of cell midpoints.
    Imported,
}

impl Default for Grading {
    fn default() -> Self {
        Grading::Geometric { ratio: 0.7, layers: 12 }
    }
}

/// Cell-centred grid on a time interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    domain: TimeDomain,
    grading: Grading,
    edges: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid1D {
    fn from_edges(domain: TimeDomain, grading: Grading, edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(Error::InvalidGrid("need at least one cell".into()));
        }
        if edges[0] != 0.0 {
            return Err(Error::InvalidGrid("first edge must be 0".into()));
        }
        for w in edges.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidGrid(format!("cell edges not strictly increasing near t={}", w[0])));
            }
        }
        let len = domain.length();
        let last = *edges.last().unwrap();
        if (last - len).abs() > 1e-12 * len {
            return Err(Error::InvalidGrid(format!("grid ends at {last}, domain length {len}")));
        }
        let nodes = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let weights = edges.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Self { domain, grading, edges, nodes, weights })
    }

    /// Rebuilds a midpoint grid from its nodes. The cell edges are recovered
    /// from `e_{i+1} = 2 t_i - e_i` starting at `e_0 = 0`.
    pub fn from_midpoints(nodes: &[f64], half_line: bool) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("need at least two nodes".into()));
        }
        let mut edges = Vec::with_capacity(nodes.len() + 1);
        edges.push(0.0);
        for (i, &t) in nodes.iter().enumerate() {
            let e = 2.0 * t - edges[i];
            if !(e > edges[i]) {
                return Err(Error::InvalidGrid(format!(
                    "nodes are not midpoints of a partition of (0,T) (node {i}, t={t})"
                )));
            }
            edges.push(e);
        }
        let len = *edges.last().unwrap();
        let domain = if half_line { TimeDomain::half_line(len)? } else { TimeDomain::finite(len)? };
        Self::from_edges(domain, Grading::Imported, edges)
    }

    pub fn domain(&self) -> TimeDomain {
        self.domain
    }

    pub fn grading(&self) -> Grading {
        self.grading
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

    pub fn length(&self) -> f64 {
        self.domain.length()
    }

    /// Merges neighbouring cells pairwise (an odd trailing cell is kept).
    pub fn coarsen(&self) -> Grid1D {
        let mut edges = Vec::with_capacity(self.edges.len() / 2 + 2);
        let mut i = 0;
        while i < self.edges.len() {
            edges.push(self.edges[i]);
            i += 2;
        }
        if *edges.last().unwrap() != *self.edges.last().unwrap() {
            edges.push(*self.edges.last().unwrap());
        }
        Self::from_edges(self.domain, self.grading, edges).expect("coarsening keeps a valid grid")
    }

    /// The same grid scaled to a domain of length `len`.
    pub fn rescaled(&self, len: f64) -> Result<Grid1D> {
        let domain = self.domain.with_length(len)?;
        let f = len / self.length();
        let mut edges: Vec<f64> = self.edges.iter().map(|e| e * f).collect();
        *edges.last_mut().unwrap() = len;
        Self::from_edges(domain, self.grading, edges)
    }

    /// True if all cells have the same width (to rounding).
    pub fn is_uniform(&self) -> bool {
        let h = self.weights[0];
        self.weights.iter().all(|w| (w - h).abs() <= 1e-9 * h)
    }

    /// Appends uniform cells of width about `h` until `t_end` is reached.
    pub(crate) fn extended_to(&self, t_end: f64, h: f64, domain: TimeDomain) -> Result<Grid1D> {
        let start = self.length();
        let mut edges = self.edges.clone();
        if t_end > start {
            let cells = ((t_end - start) / h).ceil().max(1.0) as usize;
            let step = (t_end - start) / cells as f64;
            for j in 1..=cells {
                edges.push(if j == cells { t_end } else { start + step * j as f64 });
            }
        }
        Self::from_edges(domain, self.grading, edges)
    }

    /// Appends the mirror image of this grid about `T`, giving a grid on `(0, 2T)`.
    pub(crate) fn mirrored(&self, domain: TimeDomain) -> Result<Grid1D> {
        let t = self.length();
        let mut edges = self.edges.clone();
        for e in self.edges.iter().rev().skip(1) {
            edges.push(2.0 * t - e);
        }
        *edges.last_mut().unwrap() = 2.0 * t;
        Self::from_edges(domain, self.grading, edges)
    }

    /// Index of the cell containing `t` (clamped to the grid).
    pub fn cell_of(&self, t: f64) -> usize {
        match self.edges.binary_search_by(|e| e.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.len() - 1),
            Err(i) => i.saturating_sub(1).min(self.len() - 1),
        }
    }
}

/// Builds a cell-centred grid with `n` cells.
pub fn make_graded_grid(domain: TimeDomain, n: usize, grading: Grading) -> Result<Grid1D> {
    if n < 8 {
        return Err(Error::InvalidGrid(format!("need n >= 8 cells, got {n}")));
    }
    let len = domain.length();
    let edges = match grading {
        Grading::Uniform => (0..=n).map(|i| len * i as f64 / n as f64).collect(),
        Grading::Geometric { ratio, layers } => {
            if !(ratio > 0.0 && ratio < 1.0) {
                return Err(Error::InvalidGrid(format!("geometric ratio must lie in (0,1), got {ratio}")));
            }
            if n < layers + 2 {
                return Err(Error::InvalidGrid(format!("{layers} boundary layers need n >= {}", layers + 2)));
            }
            // boundary layer [0, b] split into layers+1 geometric cells,
            // bulk (b, T) uniform.
            let bulk = n - layers - 1;
            let b = (len / (n - layers) as f64).min(len / 100.0);
            let mut edges = Vec::with_capacity(n + 1);
            edges.push(0.0);
            for j in (0..=layers).rev() {
                edges.push(b * ratio.powi(j as i32));
            }
            for j in 1..=bulk {
                edges.push(if j == bulk { len } else { b + (len - b) * j as f64 / bulk as f64 });
            }
            edges
        }
        Grading::Imported => return Err(Error::InvalidGrid("imported grading is only produced by CSV import".into())),
    };
    Grid1D::from_edges(domain, grading, edges)
}

/// How the value space `E = R^d` is normed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueNorm {
    Euclidean,
    /// Discrete `L_p` norm over the components with uniform cell measure;
    /// used when the components are samples of a spatial function.
    Lp {
        p: f64,
        cell: f64,
    },
}

impl ValueNorm {
    pub fn norm(&self, v: &[f64]) -> f64 {
        match *self {
            ValueNorm::Euclidean => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            ValueNorm::Lp { p, cell } => (v.iter().map(|x| x.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p),
        }
    }

    pub fn norm_diff(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            ValueNorm::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
            ValueNorm::Lp { p, cell } => {
                (a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
            }
        }
    }
}

/// Values in `R^d` at the nodes of a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Arc<Grid1D>,
    d: usize,
    values: Vec<f64>,
    value_norm: ValueNorm,
}

impl SampledFunction {
    /// Wraps row-major values (`n * d`).
    pub fn from_values(grid: Arc<Grid1D>, d: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(Error::ShapeMismatch("value dimension must be >= 1".into()));
        }
        if values.len() != grid.len() * d {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} nodes of dimension {d}",
                values.len(),
                grid.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { index: i / d, t: grid.nodes()[i / d] });
            }
        }
        Ok(Self { grid, d, values, value_norm: ValueNorm::Euclidean })
    }

    pub fn with_value_norm(mut self, value_norm: ValueNorm) -> Self {
        self.value_norm = value_norm;
        self
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn grid_arc(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_norm(&self) -> ValueNorm {
        self.value_norm
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    /// `|u(t_i)|_E`.
    pub fn norm_at(&self, i: usize) -> f64 {
        self.value_norm.norm(self.value(i))
    }

    /// Scalar component `c` as a vector over the nodes.
    pub fn component(&self, c: usize) -> Vec<f64> {
        self.values.iter().skip(c).step_by(self.d).copied().collect()
    }

    /// New function on the same grid with the same value norm.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Ok(Self::from_values(self.grid.clone(), self.d, values)?.with_value_norm(self.value_norm))
    }

    pub fn map_values(&self, f: impl Fn(f64, &[f64], &mut [f64])) -> Result<Self> {
        let mut out = vec![0.0; self.values.len()];
        for (i, &t) in self.grid.nodes().iter().enumerate() {
            f(t, self.value(i), &mut out[i * self.d..(i + 1) * self.d]);
        }
        self.with_values(out)
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        let values = self.values.iter().map(|v| v * lambda).collect();
        Self { grid: self.grid.clone(), d: self.d, values, value_norm: self.value_norm }
    }

    /// Pairwise cell merge with weight-averaged values.
    pub fn coarsen(&self) -> Self {
        let coarse = Arc::new(self.grid.coarsen());
        let w = self.grid.weights();
        let d = self.d;
        let mut values = Vec::with_capacity(coarse.len() * d);
        let mut i = 0;
        while i < self.len() {
            if i + 1 < self.len() {
                let (w0, w1) = (w[i], w[i + 1]);
                for c in 0..d {
                    let a = self.values[i * d + c];
                    let b = self.values[(i + 1) * d + c];
                    values.push((w0 * a + w1 * b) / (w0 + w1));
                }
            } else {
                values.extend_from_slice(self.value(i));
            }
            i += 2;
        }
        Self { grid: coarse, d, values, value_norm: self.value_norm }
    }

    /// Local cubic Lagrange interpolation of the nodal values at `t`
    /// (linear-in-data, extrapolates near the ends).
    pub fn interpolate_at(&self, t: f64, out: &mut [f64]) {
        interpolate_nodal(self.grid.nodes(), &self.values, self.d, t, out);
    }

    /// Resamples onto another grid by cubic interpolation.
    pub fn resample(&self, grid: Arc<Grid1D>) -> Result<Self> {
        let mut values = vec![0.0; grid.len() * self.d];
        for (i, &t) in grid.nodes().iter().enumerate() {
            self.interpolate_at(t, &mut values[i * self.d..(i + 1) * self.d]);
        }
        Ok(Self::from_values(grid, self.d, values)?.with_value_norm(self.value_norm))
    }
}

/// Cubic Lagrange interpolation through the four nodes around `t`.
pub(crate) fn interpolate_nodal(nodes: &[f64], values: &[f64], d: usize, t: f64, out: &mut [f64]) {
    let n = nodes.len();
    let stencil = 4.min(n);
    let pos = nodes.partition_point(|&x| x < t);
    let start = pos.saturating_sub(stencil / 2).min(n - stencil);
    out.iter_mut().for_each(|o| *o = 0.0);
    for j in start..start + stencil {
        let mut l = 1.0;
        for m in start..start + stencil {
            if m != j {
                l *= (t - nodes[m]) / (nodes[j] - nodes[m]);
            }
        }
        for c in 0..d {
            out[c] += l * values[j * d + c];
        }
    }
}

/// Evaluates a closed-form function at the nodes of `grid`.
pub fn sample(f: impl Fn(f64, &mut [f64]), grid: Arc<Grid1D>, d: usize) -> Result<SampledFunction> {
    let mut values = vec![0.0; grid.len() * d];
    for (i, &t) in grid.nodes().iter().enumerate() {
        f(t, &mut values[i * d..(i + 1) * d]);
    }
    SampledFunction::from_values(grid, d, values)
}

/// Scalar convenience wrapper around [`sample`].
pub fn sample_scalar(f: impl Fn(f64) -> f64, grid: Arc<Grid1D>) -> Result<SampledFunction> {
    sample(|t, out| out[0] = f(t), grid, 1)
}

/// Kind of a spatial axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// Uniform periodic axis, nodes `j h`, `h = length / n`.
    Periodic,
    /// Half-line `y > 0`, nodes `(j + 1/2) h`.
    HalfLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialAxis {
    pub kind: AxisKind,
    pub n: usize,
    /// Torus side `2 pi L_x` for periodic axes; covered length `n h` for
    /// half-line axes.
    pub length: f64,
}

impl SpatialAxis {
    pub fn periodic(n: usize, l_x: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < 2 {
            return Err(Error::InvalidGrid(format!("periodic axis size must be a power of two, got {n}")));
        }
        if !(l_x > 0.0) {
            return Err(Error::InvalidGrid("torus scale must be positive".into()));
        }
        Ok(Self { kind: AxisKind::Periodic, n, length: 2.0 * std::f64::consts::PI * l_x })
    }

    pub fn half_line(n: usize, h: f64) -> Result<Self> {
        if n < 1 || !(h > 0.0) {
            return Err(Error::InvalidGrid("half-line axis needs n >= 1 and h > 0".into()));
        }
        Ok(Self { kind: AxisKind::HalfLine, n, length: n as f64 * h })
    }

    pub fn step(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        match self.kind {
            AxisKind::Periodic => j as f64 * self.step(),
            AxisKind::HalfLine => (j as f64 + 0.5) * self.step(),
        }
    }

    /// Angular wavenumber of FFT bin `j` (periodic axes).
    pub fn wavenumber(&self, j: usize) -> f64 {
        let k = if j <= self.n / 2 { j as f64 } else { j as f64 - self.n as f64 };
        2.0 * std::f64::consts::PI * k / self.length
    }
}

/// Values over `time x space`, row-major with time outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    tgrid: Arc<Grid1D>,
    axes: Vec<SpatialAxis>,
    values: Vec<f64>,
}

impl SpaceTimeField {
    pub fn new(tgrid: Arc<Grid1D>, axes: Vec<SpatialAxis>, values: Vec<f64>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 3 {
            return Err(Error::ShapeMismatch(format!("expected 1..=3 spatial axes, got {}", axes.len())));
        }
        let per_t: usize = axes.iter().map(|a| a.n).product();
        if values.len() != per_t * tgrid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {} time nodes x {per_t} spatial nodes",
                values.len(),
                tgrid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index: i / per_t, t: tgrid.nodes()[i / per_t] });
        }
        Ok(Self { tgrid, axes, values })
    }

    /// Samples `f(t, x)` where `x` holds one coordinate per spatial axis.
    pub fn from_fn(tgrid: Arc<Grid1D>, axes: Vec<SpatialAxis>, f: impl Fn(f64, &[f64]) -> f64) -> Result<Self> {
        let per_t: usize = axes.iter().map(|a| a.n).product();
        let mut values = Vec::with_capacity(per_t * tgrid.len());
        let mut x = vec![0.0; axes.len()];
        for &t in tgrid.nodes() {
            for flat in 0..per_t {
                let mut rem = flat;
                for (k, a) in axes.iter().enumerate().rev() {
                    x[k] = a.node(rem % a.n);
                    rem /= a.n;
                }
                values.push(f(t, &x));
            }
        }
        Self::new(tgrid, axes, values)
    }

    pub fn tgrid(&self) -> &Grid1D {
        &self.tgrid
    }

    pub fn tgrid_arc(&self) -> &Arc<Grid1D> {
        &self.tgrid
    }

    pub fn axes(&self) -> &[SpatialAxis] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spatial_len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    /// Product of the spatial steps.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.step()).product()
    }

    pub fn slice(&self, i: usize) -> &[f64] {
        let m = self.spatial_len();
        &self.values[i * m..(i + 1) * m]
    }

    /// The field as an `L_p(space)`-valued function of time.
    pub fn as_time_function(&self, p: f64) -> Result<SampledFunction> {
        let cell = self.cell_volume();
        Ok(SampledFunction::from_values(self.tgrid.clone(), self.spatial_len(), self.values.clone())?
            .with_value_norm(ValueNorm::Lp { p, cell }))
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.tgrid.clone(), self.axes.clone(), values)
    }
}

/// Samples of a function of space only, on periodic axes.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialSample {
    axes: Vec<SpatialAxis>,
    values: Vec<f64>,
}

impl SpatialSample {
    pub fn new(axes: Vec<SpatialAxis>, values: Vec<f64>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::ShapeMismatch(format!("expected 1 or 2 spatial axes, got {}", axes.len())));
        }
        if axes.iter().any(|a| a.kind != AxisKind::Periodic) {
            return Err(Error::ShapeMismatch("spatial samples live on periodic axes".into()));
        }
        let n: usize = axes.iter().map(|a| a.n).product();
        if values.len() != n {
            return Err(Error::ShapeMismatch(format!("{} values for {n} nodes", values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index: i, t: f64::NAN });
        }
        Ok(Self { axes, values })
    }

    pub fn from_fn(axes: Vec<SpatialAxis>, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n: usize = axes.iter().map(|a| a.n).product();
        let mut x = vec![0.0; axes.len()];
        let mut values = Vec::with_capacity(n);
        for flat in 0..n {
            let mut rem = flat;
            for (k, a) in axes.iter().enumerate().rev() {
                x[k] = a.node(rem % a.n);
                rem /= a.n;
            }
            values.push(f(&x));
        }
        Self::new(axes, values)
    }

    pub fn axes(&self) -> &[SpatialAxis] {
        &self.axes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n).collect()
    }

    pub fn periods(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.length).collect()
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.step()).product()
    }

    /// Discrete `L_p` norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        ValueNorm::Lp { p, cell: self.cell_volume() }.norm(&self.values)
    }
}

/// Samples on a half-torus: optional periodic tangential axis `x'` and the
/// normal direction `y` in `[0, pi L_y]` with nodes `j h`, `j = 0..=n_y/2`,
/// where `n_y` is the size of the full torus in `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfTorusSample {
    pub x_axis: Option<SpatialAxis>,
    pub y_axis: SpatialAxis,
    pub values: Vec<f64>,
}

impl HalfTorusSample {
    pub fn new(x_axis: Option<SpatialAxis>, y_axis: SpatialAxis, values: Vec<f64>) -> Result<Self> {
        if y_axis.kind != AxisKind::Periodic || x_axis.is_some_and(|a| a.kind != AxisKind::Periodic) {
            return Err(Error::ShapeMismatch("half-torus axes must describe periodic tori".into()));
        }
        let nx = x_axis.map_or(1, |a| a.n);
        if values.len() != nx * (y_axis.n / 2 + 1) {
            return Err(Error::ShapeMismatch(format!(
                "{} values for {nx} x {} half-torus nodes",
                values.len(),
                y_axis.n / 2 + 1
            )));
        }
        Ok(Self { x_axis, y_axis, values })
    }

    pub fn from_fn(x_axis: Option<SpatialAxis>, y_axis: SpatialAxis, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let nx = x_axis.map_or(1, |a| a.n);
        let ny = y_axis.n / 2 + 1;
        let mut values = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            let x = x_axis.map_or(0.0, |a| a.node(i));
            for j in 0..ny {
                values.push(f(x, y_axis.node(j)));
            }
        }
        Self::new(x_axis, y_axis, values)
    }

    pub fn ny(&self) -> usize {
        self.y_axis.n / 2 + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_params_validation() {
        assert!(WeightParams::new(2.0, 0.75).is_ok());
        assert!(WeightParams::new(2.0, 1.0).is_ok());
        assert!(WeightParams::new(2.0, 0.5).is_err());
        assert!(WeightParams::new(1.0, 1.0).is_err());
        assert!(WeightParams::new(2.0, 1.1).is_err());
        assert!(WeightParams::new(f64::INFINITY, 1.0).is_err());
        let wp = WeightParams::new(4.0, 0.5).unwrap();
        assert_eq!(wp.trace_limit(), 0.75);
    }

    #[test]
    fn uniform_midpoints() {
        let g = make_graded_grid(TimeDomain::finite(1.0).unwrap(), 8, Grading::Uniform).unwrap();
        for (i, (&t, &w)) in g.nodes().iter().zip(g.weights()).enumerate() {
            assert!((t - (2 * i + 1) as f64 / 16.0).abs() < 1e-15);
            assert!((w - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_sum_to_length() {
        for &len in &[0.1, 1.0, 10.0] {
            for grading in [Grading::Uniform, Grading::default(), Grading::Geometric { ratio: 0.5, layers: 10 }] {
                let g = make_graded_grid(TimeDomain::finite(len).unwrap(), 64, grading).unwrap();
                let s: f64 = g.weights().iter().sum();
                assert!((s - len).abs() <= 1e-12 * len, "{s} vs {len}");
                assert!(g.nodes().windows(2).all(|w| w[1] > w[0]));
                assert!(g.nodes().iter().all(|&t| t > 0.0 && t < len));
            }
        }
    }

    #[test]
    fn geometric_boundary_layers() {
        let g = make_graded_grid(TimeDomain::finite(1.0).unwrap(), 64, Grading::Geometric { ratio: 0.5, layers: 10 })
            .unwrap();
        // oracle: enumerate nodes below T/100
        let below = g.nodes().iter().filter(|&&t| t < 0.01).count();
        assert!(below >= 10, "{below}");
    }

    #[test]
    fn geometric_rejects_bad_ratio() {
        let d = TimeDomain::finite(1.0).unwrap();
        assert!(make_graded_grid(d, 64, Grading::Geometric { ratio: 1.0, layers: 4 }).is_err());
        assert!(make_graded_grid(d, 64, Grading::Geometric { ratio: 1.5, layers: 4 }).is_err());
        assert!(make_graded_grid(d, 64, Grading::Geometric { ratio: 0.0, layers: 4 }).is_err());
        assert!(make_graded_grid(d, 4, Grading::Uniform).is_err());
    }

    #[test]
    fn sampling() {
        let g = Arc::new(make_graded_grid(TimeDomain::finite(1.0).unwrap(), 32, Grading::default()).unwrap());
        let one = sample_scalar(|_| 1.0, g.clone()).unwrap();
        assert!(one.values().iter().all(|&v| v == 1.0));

        let g4 = Arc::new(Grid1D::from_midpoints(&[0.25, 0.75], false).unwrap());
        let u = sample_scalar(|t| t.powf(0.75 - 1.0), g4).unwrap();
        assert!((u.values()[0] - std::f64::consts::SQRT_2).abs() < 1e-12);

        let bad = sample_scalar(|t| 1.0 / (t - t), g);
        assert!(matches!(bad, Err(Error::NonFiniteSample { .. })));
    }

    #[test]
    fn sine_on_uniform_grid() {
        let g = Arc::new(
            make_graded_grid(TimeDomain::finite(std::f64::consts::PI).unwrap(), 16, Grading::Uniform).unwrap(),
        );
        let u = sample_scalar(f64::sin, g.clone()).unwrap();
        for (v, t) in u.values().iter().zip(g.nodes()) {
            assert_eq!(*v, t.sin());
        }
    }

    #[test]
    fn midpoint_roundtrip() {
        let g = make_graded_grid(TimeDomain::finite(2.0).unwrap(), 40, Grading::default()).unwrap();
        let back = Grid1D::from_midpoints(g.nodes(), false).unwrap();
        for (a, b) in g.edges().iter().zip(back.edges()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(Grid1D::from_midpoints(&[0.5, 0.6, 0.65], false).is_err());
    }

    #[test]
    fn coarsen_preserves_integral() {
        let g = Arc::new(make_graded_grid(TimeDomain::finite(1.0).unwrap(), 33, Grading::Uniform).unwrap());
        let u = sample_scalar(|t| t * t, g.clone()).unwrap();
        let c = u.coarsen();
        assert_eq!(c.len(), 17);
        let int = |f: &SampledFunction| -> f64 { f.values().iter().zip(f.grid().weights()).map(|(v, w)| v * w).sum() };
        assert!((int(&u) - int(&c)).abs() < 1e-14);
    }

    #[test]
    fn cubic_interpolation_exact_on_cubics() {
        let g = Arc::new(make_graded_grid(TimeDomain::finite(1.0).unwrap(), 20, Grading::default()).unwrap());
        let u = sample_scalar(|t| 1.0 - 2.0 * t + t * t * t, g).unwrap();
        let mut out = [0.0];
        for &t in &[0.0, 0.013, 0.5, 0.999, 1.0] {
            u.interpolate_at(t, &mut out);
            assert!((out[0] - (1.0 - 2.0 * t + t * t * t)).abs() < 1e-11);
        }
    }
}
