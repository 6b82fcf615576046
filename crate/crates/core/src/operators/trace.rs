//! Temporal and spatial traces and their right-inverses.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{cpow, SumOperatorSpec};
use crate::error::{Error, Result};
use crate::grids::{AxisKind, Grid1D, SampledFunction, SpaceTimeField, SpatialAxis, SpatialSample, WeightParams};
use crate::spectral;

/// Piecewise-linear reconstruction through the nodes, extended linearly to
/// `0` and to `T` from the neighbouring segments.
struct PiecewiseLinear<'a> {
    u: &'a SampledFunction,
    /// breakpoints `0, t_0, ..., t_{n-1}, T`
    knots: Vec<f64>,
}

impl<'a> PiecewiseLinear<'a> {
    fn new(u: &'a SampledFunction) -> Self {
        let g = u.grid();
        let mut knots = Vec::with_capacity(g.len() + 2);
        knots.push(0.0);
        knots.extend_from_slice(g.nodes());
        knots.push(g.length());
        Self { u, knots }
    }

    /// Line `(alpha, beta)` (per component) on knot segment `s` (between
    /// `knots[s]` and `knots[s+1]`).
    fn line(&self, s: usize, alpha: &mut [f64], beta: &mut [f64]) {
        let n = self.u.len();
        let nodes = self.u.grid().nodes();
        // node pair defining the line on this segment
        let i = s.saturating_sub(1).min(n - 2);
        let (t0, t1) = (nodes[i], nodes[i + 1]);
        let (v0, v1) = (self.u.value(i), self.u.value(i + 1));
        for c in 0..self.u.dim() {
            beta[c] = (v1[c] - v0[c]) / (t1 - t0);
            alpha[c] = v0[c] - beta[c] * t0;
        }
    }
}

/// `int_x0^x1 tau^a (alpha + beta tau) dtau` per component, added to `acc`.
fn add_moment(a: f64, x0: f64, x1: f64, alpha: &[f64], beta: &[f64], acc: &mut [f64]) {
    let m0 = (x1.powf(a + 1.0) - x0.powf(a + 1.0)) / (a + 1.0);
    let m1 = (x1.powf(a + 2.0) - x0.powf(a + 2.0)) / (a + 2.0);
    for c in 0..acc.len() {
        acc[c] += alpha[c] * m0 + beta[c] * m1;
    }
}

/// Recovers `u(0)` from the integral representation
///
/// `u(0) = (2-mu) ( sigma^{-(2-mu)} int_0^sigma tau^{1-mu} u dtau
///          - (2-mu) int_0^sigma t^{-(3-mu)} int_0^t tau^{1-mu} (u(t)-u(tau)) dtau dt )`.
///
/// Both integrals use the piecewise-linear reconstruction of `u` with the
/// power weight integrated exactly, so affine `u` is reproduced to rounding.
pub fn trace_t0(u: &SampledFunction, wp: WeightParams, sigma: f64) -> Result<Vec<f64>> {
    let g = u.grid();
    if g.len() < 2 {
        return Err(Error::GridTooCoarse("trace needs at least two nodes".into()));
    }
    if !(sigma > g.nodes()[0] && sigma <= g.length()) {
        return Err(Error::InvalidParameter(format!(
            "sigma={sigma} outside the grid span ({}, {}]",
            g.nodes()[0],
            g.length()
        )));
    }
    let a = 1.0 - wp.mu();
    let d = u.dim();
    let pl = PiecewiseLinear::new(u);
    let (mut alpha, mut beta) = (vec![0.0; d], vec![0.0; d]);

    // g(t) = t^{-(a+2)} (l(t) M0(t) - M1(t)) at the knots up to sigma.
    let mut m1 = vec![0.0; d];
    let mut outer = vec![0.0; d];
    // constant value of g on the first segment
    pl.line(0, &mut alpha, &mut beta);
    let mut g_prev: Vec<f64> = beta.iter().map(|b| b / ((a + 1.0) * (a + 2.0))).collect();
    let mut t_prev = 0.0;
    let mut first_segment = true;
    let mut s = 0;
    loop {
        let x1 = pl.knots[s + 1].min(sigma);
        pl.line(s, &mut alpha, &mut beta);
        add_moment(a, t_prev, x1, &alpha, &beta, &mut m1);
        let m0 = x1.powf(a + 1.0) / (a + 1.0);
        let scale = x1.powf(-(a + 2.0));
        let g_cur: Vec<f64> = (0..d).map(|c| ((alpha[c] + beta[c] * x1) * m0 - m1[c]) * scale).collect();
        let width = x1 - t_prev;
        for c in 0..d {
            outer[c] += if first_segment { g_prev[c] * width } else { 0.5 * (g_prev[c] + g_cur[c]) * width };
        }
        first_segment = false;
        g_prev = g_cur;
        t_prev = x1;
        if x1 >= sigma {
            break;
        }
        s += 1;
    }
    let pre = sigma.powf(-(a + 1.0));
    Ok((0..d).map(|c| (a + 1.0) * (pre * m1[c] - (a + 1.0) * outer[c])).collect())
}

/// Trace at `sigma = T/2` and `T/4` and their difference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDiagnostic {
    pub at_half: Vec<f64>,
    pub at_quarter: Vec<f64>,
    pub difference: f64,
}

pub fn trace_t0_diagnostic(u: &SampledFunction, wp: WeightParams) -> Result<TraceDiagnostic> {
    let len = u.grid().length();
    let at_half = trace_t0(u, wp, len / 2.0)?;
    let at_quarter = trace_t0(u, wp, len / 4.0)?;
    let difference = u.value_norm().norm_diff(&at_half, &at_quarter);
    Ok(TraceDiagnostic { at_half, at_quarter, difference })
}

/// Quadratic extrapolation to `t = 0` from the first three nodes.
pub fn extrapolate_to_zero(nodes: &[f64], values: &[f64], d: usize) -> Vec<f64> {
    let (t0, t1, t2) = (nodes[0], nodes[1], nodes[2]);
    let l0 = t1 * t2 / ((t0 - t1) * (t0 - t2));
    let l1 = t0 * t2 / ((t1 - t0) * (t1 - t2));
    let l2 = t0 * t1 / ((t2 - t0) * (t2 - t1));
    (0..d).map(|c| l0 * values[c] + l1 * values[d + c] + l2 * values[2 * d + c]).collect()
}

/// `S u0 (t) = exp(-t (1 - Laplacian)^m) u0`, evaluated mode-wise at the
/// nodes of `tgrid`.
pub fn trace_rightinverse_s(u0: &SpatialSample, m: usize, tgrid: std::sync::Arc<Grid1D>) -> Result<SpaceTimeField> {
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    let shape = u0.shape();
    let periods = u0.periods();
    let mut hat: Vec<Complex64> = u0.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    spectral::fft_nd(&mut hat, &shape, false);
    let mut xi = vec![0.0; shape.len()];
    let lambda: Vec<f64> = (0..hat.len())
        .map(|flat| {
            spectral::wavevector(flat, &shape, &periods, &mut xi);
            (1.0 + xi.iter().map(|x| x * x).sum::<f64>()).powi(m as i32)
        })
        .collect();
    let mut values = Vec::with_capacity(tgrid.len() * hat.len());
    let mut buf = vec![Complex64::new(0.0, 0.0); hat.len()];
    for &t in tgrid.nodes() {
        for ((b, h), l) in buf.iter_mut().zip(&hat).zip(&lambda) {
            *b = h * (-t * l).exp();
        }
        spectral::fft_nd(&mut buf, &shape, true);
        values.extend(buf.iter().map(|c| c.re));
    }
    SpaceTimeField::new(tgrid, u0.axes().to_vec(), values)
}

/// Spatial trace at `y = 0` by quadratic extrapolation from the first three
/// layers of the last (half-line) axis.
pub fn trace_y0(u: &SpaceTimeField) -> Result<SpaceTimeField> {
    let axes = u.axes();
    let y = *axes.last().unwrap();
    if y.kind != AxisKind::HalfLine {
        return Err(Error::ShapeMismatch("last axis must be the half-line normal direction".into()));
    }
    if y.n < 3 {
        return Err(Error::GridTooCoarse(format!("need >= 3 layers near y=0, got {}", y.n)));
    }
    if axes.len() < 2 {
        return Err(Error::ShapeMismatch("trace needs a tangential axis".into()));
    }
    let ny = y.n;
    // nodes h/2, 3h/2, 5h/2
    let (w0, w1, w2) = (15.0 / 8.0, -5.0 / 4.0, 3.0 / 8.0);
    let values: Vec<f64> = u.values().chunks(ny).map(|col| w0 * col[0] + w1 * col[1] + w2 * col[2]).collect();
    SpaceTimeField::new(u.tgrid_arc().clone(), axes[..axes.len() - 1].to_vec(), values)
}

/// `exp(-y L^{1/(2m)}) g` for `L = 1 - d/dt + (-Laplacian_{x'})^m`, mode-wise
/// on the `(t, x')` torus; `g` must live on a uniform (periodic) time grid.
pub fn trace_y0_rightinverse(
    g: &SpaceTimeField,
    spec: &SumOperatorSpec,
    m: usize,
    y_axis: SpatialAxis,
) -> Result<SpaceTimeField> {
    if spec.time.order() != 1.0 {
        return Err(Error::InvalidParameter("the spatial right-inverse needs alpha = 1".into()));
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    if y_axis.kind != AxisKind::HalfLine {
        return Err(Error::ShapeMismatch("y axis must be a half-line axis".into()));
    }
    if !g.tgrid().is_uniform() {
        return Err(Error::InvalidGrid("g must be sampled on a uniform periodic time grid".into()));
    }
    if g.axes().iter().any(|a| a.kind != AxisKind::Periodic) {
        return Err(Error::ShapeMismatch("tangential axes must be periodic".into()));
    }
    let nt = g.tgrid().len();
    let mut shape = vec![nt];
    shape.extend(g.axes().iter().map(|a| a.n));
    let mut periods = vec![g.tgrid().length()];
    periods.extend(g.axes().iter().map(|a| a.length));
    let mut hat: Vec<Complex64> = g.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    spectral::fft_nd(&mut hat, &shape, false);
    let mut xi = vec![0.0; shape.len()];
    let mut roots = Vec::with_capacity(hat.len());
    for flat in 0..hat.len() {
        spectral::wavevector(flat, &shape, &periods, &mut xi);
        let lam = spec.symbol(xi[0], xi[1..].iter().map(|x| x * x).sum());
        if lam.im == 0.0 && lam.re <= 0.0 {
            return Err(Error::BranchAmbiguity(format!("symbol {lam} on the branch cut")));
        }
        roots.push(cpow(lam, 1.0 / (2 * m) as f64));
    }
    let ny = y_axis.n;
    let per_t: usize = g.spatial_len();
    let mut values = vec![0.0; nt * per_t * ny];
    let mut buf = vec![Complex64::new(0.0, 0.0); hat.len()];
    for j in 0..ny {
        let y = y_axis.node(j);
        for ((b, h), r) in buf.iter_mut().zip(&hat).zip(&roots) {
            *b = h * (-y * r).exp();
        }
        spectral::fft_nd(&mut buf, &shape, true);
        for (flat, c) in buf.iter().enumerate() {
            values[flat * ny + j] = c.re;
        }
    }
    let mut axes = g.axes().to_vec();
    axes.push(y_axis);
    SpaceTimeField::new(g.tgrid_arc().clone(), axes, values)
}
