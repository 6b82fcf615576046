//! Concrete operators on sampled functions and space-time fields.
//!
//! Fractional powers are Fourier multipliers applied on a periodic extension
//! of the data; principal branch throughout (`arg` in `(-pi, pi]`).

mod extension;
mod trace;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grids::{AxisKind, SampledFunction, SpaceTimeField, WeightParams};
use crate::spectral;

pub(crate) use extension::Periodized;
pub use extension::{
    extend_general, extend_general_to, extend_spatial, extend_zero, reflection_coefficients, smooth_cutoff,
};
pub use trace::{
    extrapolate_to_zero, trace_rightinverse_s, trace_t0, trace_t0_diagnostic, trace_y0, trace_y0_rightinverse,
    TraceDiagnostic,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Inverse,
}

/// `Phi_mu`: multiplication by `t^{1-mu}` (forward) or its inverse.
pub fn phi_mu(u: &SampledFunction, wp: WeightParams, direction: Direction) -> Result<SampledFunction> {
    let a = 1.0 - wp.mu();
    if a == 0.0 {
        return Ok(u.clone());
    }
    let e = match direction {
        Direction::Forward => a,
        Direction::Inverse => -a,
    };
    u.map_values(|t, v, out| {
        let f = t.powf(e);
        for (o, x) in out.iter_mut().zip(v) {
            *o = f * x;
        }
    })
}

/// Left translation `(Lambda_{t0} u)(tau) = u(tau + t0)`; values shifted in
/// from beyond the grid are zero.
pub fn translate(u: &SampledFunction, t0: f64) -> Result<SampledFunction> {
    if !(t0 >= 0.0 && t0.is_finite()) {
        return Err(Error::InvalidParameter(format!("translation must be >= 0, got {t0}")));
    }
    if t0 == 0.0 {
        return Ok(u.clone());
    }
    let len = u.grid().length();
    u.map_values(|tau, _, out| {
        let s = tau + t0;
        if s >= len {
            out.iter_mut().for_each(|o| *o = 0.0);
        } else {
            u.interpolate_at(s, out);
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FractionalKind {
    /// `(omega - d/dt)^order`, symbol `(omega - i xi)^order`.
    TimeDerivMinus,
    /// `(omega + d/dt)^order`, symbol `(omega + i xi)^order`.
    TimeDerivPlus,
    /// `(omega - Laplacian)^order`, symbol `(omega + |xi|^2)^order`.
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalOperatorSpec {
    kind: FractionalKind,
    order: f64,
    shift: f64,
}

impl FractionalOperatorSpec {
    pub fn new(kind: FractionalKind, order: f64, shift: f64) -> Result<Self> {
        if !(shift >= 0.0 && shift.is_finite()) {
            return Err(Error::InvalidParameter(format!("shift must be >= 0, got {shift}")));
        }
        match kind {
            FractionalKind::TimeDerivMinus | FractionalKind::TimeDerivPlus => {
                if !(0.0..2.0).contains(&order) {
                    return Err(Error::InvalidParameter(format!(
                        "time derivative order must lie in (0,2), got {order}"
                    )));
                }
            }
            FractionalKind::Laplacian => {
                if !(order >= 0.0 && order.is_finite()) {
                    return Err(Error::InvalidParameter(format!("laplacian order must be > 0, got {order}")));
                }
            }
        }
        Ok(Self { kind, order, shift })
    }

    pub fn time_minus(order: f64, shift: f64) -> Result<Self> {
        Self::new(FractionalKind::TimeDerivMinus, order, shift)
    }

    pub fn laplacian(order: f64, shift: f64) -> Result<Self> {
        Self::new(FractionalKind::Laplacian, order, shift)
    }

    pub fn kind(&self) -> FractionalKind {
        self.kind
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Symbol at the (scalar or radial) frequency `xi`.
    pub fn symbol(&self, xi: f64) -> Complex64 {
        let base = match self.kind {
            FractionalKind::TimeDerivMinus => Complex64::new(self.shift, -xi),
            FractionalKind::TimeDerivPlus => Complex64::new(self.shift, xi),
            FractionalKind::Laplacian => Complex64::new(self.shift + xi * xi, 0.0),
        };
        cpow(base, self.order)
    }
}

/// Principal power `z^a`, with `0^a = 0` for `a > 0` and `z^0 = 1`.
pub(crate) fn cpow(z: Complex64, a: f64) -> Complex64 {
    if a == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if z.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    z.powf(a)
}

/// `L = (omega' - d/dt)^alpha + (omega - Laplacian)^{beta/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumOperatorSpec {
    pub time: FractionalOperatorSpec,
    pub space: FractionalOperatorSpec,
}

impl SumOperatorSpec {
    pub fn new(time: FractionalOperatorSpec, space: FractionalOperatorSpec) -> Result<Self> {
        if time.kind == FractionalKind::Laplacian || space.kind != FractionalKind::Laplacian {
            return Err(Error::InvalidParameter("sum operator needs a time derivative and a laplacian".into()));
        }
        if time.shift == 0.0 && space.shift == 0.0 {
            return Err(Error::InvalidParameter("shifts omega and omega' must not both vanish".into()));
        }
        Ok(Self { time, space })
    }

    /// `L = 1 - d/dt + (-Laplacian)^m`.
    pub fn parabolic(m: usize) -> Result<Self> {
        Self::new(FractionalOperatorSpec::time_minus(1.0, 1.0)?, FractionalOperatorSpec::laplacian(m as f64, 0.0)?)
    }

    pub fn symbol(&self, xi_t: f64, xi_x_sq: f64) -> Complex64 {
        self.time.symbol(xi_t) + cpow(Complex64::new(self.space.shift + xi_x_sq, 0.0), self.space.order)
    }
}

/// How a function on `(0, T)` is turned into a periodic one before a
/// multiplier is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Periodization {
    /// Data on a uniform grid is one period.
    Periodic,
    /// Reflect past `T`, cut off, zero-pad to period `4T`; the part left of
    /// `t = 0` is zero.
    ExtendZeroLeft,
    /// As [`Periodization::ExtendZeroLeft`] but also reflected smoothly past
    /// `t = 0`. Right-sided operators such as `(1 - d/dt)^s` do not see the
    /// left part, so this only removes the Gibbs error of the jump at 0.
    ExtendReflectLeft,
}

/// Applies a time-frequency symbol to every component of `u`.
pub(crate) fn apply_time_symbol(
    u: &SampledFunction,
    symbol: impl Fn(f64) -> Complex64,
    per: Periodization,
) -> Result<SampledFunction> {
    match per {
        Periodization::Periodic => {
            if !u.grid().is_uniform() {
                return Err(Error::InvalidGrid("periodic realization needs a uniform grid".into()));
            }
            let out = spectral::apply_multiplier_interleaved(u.values(), u.dim(), u.grid().length(), symbol);
            u.with_values(out)
        }
        Periodization::ExtendZeroLeft | Periodization::ExtendReflectLeft => {
            let per = Periodized::new(u, per == Periodization::ExtendReflectLeft)?;
            let out = spectral::apply_multiplier_interleaved(&per.values, per.d, per.period, symbol);
            per.evaluate(&out, u)
        }
    }
}

/// Mean over one period of the periodic realization (the zero mode).
fn zero_mode(u: &SampledFunction, per: Periodization) -> Result<Vec<f64>> {
    let d = u.dim();
    let (values, n) = match per {
        Periodization::Periodic => (u.values().to_vec(), u.len()),
        _ => {
            let p = Periodized::new(u, per == Periodization::ExtendReflectLeft)?;
            let n = p.values.len() / d;
            (p.values, n)
        }
    };
    let mut mean = vec![0.0; d];
    for j in 0..n {
        for c in 0..d {
            mean[c] += values[j * d + c] / n as f64;
        }
    }
    Ok(mean)
}

/// Applies the fractional operator described by `spec` as a Fourier
/// multiplier.
pub fn fractional_apply(
    u: &SampledFunction,
    spec: &FractionalOperatorSpec,
    per: Periodization,
) -> Result<SampledFunction> {
    if spec.order == 0.0 {
        return Ok(u.clone());
    }
    if spec.shift == 0.0 {
        let scale = u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mean = zero_mode(u, per)?;
        if mean.iter().any(|m| m.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
            return Err(Error::BranchAmbiguity("shift omega = 0 with a nonzero zero mode".into()));
        }
    }
    let s = *spec;
    apply_time_symbol(u, move |xi| s.symbol(xi), per)
}

/// Applies `m(xi)` along one periodic spatial axis of a field.
pub(crate) fn apply_along_axis(
    field: &SpaceTimeField,
    axis: usize,
    m: impl Fn(f64) -> Complex64,
) -> Result<SpaceTimeField> {
    let axes = field.axes();
    let a = axes.get(axis).ok_or_else(|| Error::ShapeMismatch(format!("no spatial axis {axis}")))?;
    if a.kind != AxisKind::Periodic {
        return Err(Error::ShapeMismatch(format!("axis {axis} is not periodic")));
    }
    let n = a.n;
    let stride: usize = axes[axis + 1..].iter().map(|a| a.n).product();
    let total = field.values().len();
    let symbols: Vec<Complex64> = (0..n).map(|j| m(a.wavenumber(j))).collect();
    let mut out = field.values().to_vec();
    let mut planner = rustfft::FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let block = n * stride;
    for outer in 0..total / block {
        for inner in 0..stride {
            let base = outer * block + inner;
            for j in 0..n {
                line[j] = Complex64::new(out[base + j * stride], 0.0);
            }
            fwd.process(&mut line);
            for (l, s) in line.iter_mut().zip(&symbols) {
                *l *= s;
            }
            inv.process(&mut line);
            for j in 0..n {
                out[base + j * stride] = line[j].re / n as f64;
            }
        }
    }
    field.with_values(out)
}

/// `d/dx_i` realized as multiplication by `i xi_i`.
pub fn spatial_derivative(field: &SpaceTimeField, axis: usize) -> Result<SpaceTimeField> {
    apply_along_axis(field, axis, |xi| Complex64::new(0.0, xi))
}

/// Applies a radial spatial symbol `m(|xi|^2)` over all (periodic) spatial axes.
pub(crate) fn apply_spatial_radial(field: &SpaceTimeField, m: impl Fn(f64) -> Complex64) -> Result<SpaceTimeField> {
    let axes = field.axes();
    if axes.iter().any(|a| a.kind != AxisKind::Periodic) {
        return Err(Error::ShapeMismatch("spatial multipliers need periodic axes".into()));
    }
    let shape: Vec<usize> = axes.iter().map(|a| a.n).collect();
    let periods: Vec<f64> = axes.iter().map(|a| a.length).collect();
    let per_t = field.spatial_len();
    let mut out = Vec::with_capacity(field.values().len());
    for i in 0..field.tgrid().len() {
        let slice = &field.values()[i * per_t..(i + 1) * per_t];
        out.extend(spectral::apply_multiplier_nd(slice, &shape, &periods, |xi| m(xi.iter().map(|x| x * x).sum())));
    }
    field.with_values(out)
}

/// Fractional Laplacian `(omega - Laplacian)^{order}` on the spatial axes.
pub fn fractional_laplacian(field: &SpaceTimeField, spec: &FractionalOperatorSpec) -> Result<SpaceTimeField> {
    if spec.kind != FractionalKind::Laplacian {
        return Err(Error::InvalidParameter("expected a laplacian spec".into()));
    }
    let s = *spec;
    apply_spatial_radial(field, move |r2| cpow(Complex64::new(s.shift + r2, 0.0), s.order))
}

/// Applies a time operator column by column to a field.
pub fn fractional_apply_field(
    field: &SpaceTimeField,
    spec: &FractionalOperatorSpec,
    per: Periodization,
) -> Result<SpaceTimeField> {
    let as_fn = field.as_time_function(2.0)?;
    let out = fractional_apply(&as_fn, spec, per)?;
    field.with_values(out.values().to_vec())
}

/// Mode-wise ratio `|a^sigma b^{1-sigma}| / |a + b|` for the mixed bound
/// `|A^sigma B^{1-sigma} u| <= C |(A + B) u|` of commuting multipliers.
pub fn mixed_power_ratio(a: Complex64, b: Complex64, sigma: f64) -> f64 {
    (cpow(a, sigma) * cpow(b, 1.0 - sigma)).norm() / (a + b).norm()
}

/// Grid of `n` uniform cells on `(0, len)`.
#[cfg(test)]
pub(crate) fn uniform_grid(len: f64, n: usize) -> Result<std::sync::Arc<crate::grids::Grid1D>> {
    Ok(std::sync::Arc::new(crate::grids::make_graded_grid(
        crate::grids::TimeDomain::finite(len)?,
        n,
        crate::grids::Grading::Uniform,
    )?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::{make_graded_grid, sample, sample_scalar, Grading, Grid1D, SpatialAxis, TimeDomain};
    use std::sync::Arc;

    fn graded(len: f64, n: usize) -> Arc<Grid1D> {
        Arc::new(make_graded_grid(TimeDomain::finite(len).unwrap(), n, Grading::default()).unwrap())
    }

    #[test]
    fn phi_mu_cases() {
        let g = graded(1.0, 64);
        let u = sample_scalar(|t| t.powf(-0.25), g.clone()).unwrap();
        let wp = WeightParams::new(2.0, 0.75).unwrap();
        let f = phi_mu(&u, wp, Direction::Forward).unwrap();
        assert!(f.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        let back = phi_mu(&f, wp, Direction::Inverse).unwrap();
        for (a, b) in back.values().iter().zip(u.values()) {
            assert!((a - b).abs() <= 1e-14 * b.abs());
        }
        let id = phi_mu(&u, WeightParams::new(2.0, 1.0).unwrap(), Direction::Forward).unwrap();
        assert_eq!(id, u);
    }

    #[test]
    fn translate_identity_and_zero_fill() {
        let g = graded(1.0, 64);
        let u = sample_scalar(|_| 1.0, g.clone()).unwrap();
        assert_eq!(translate(&u, 0.0).unwrap(), u);
        let v = translate(&u, 0.5).unwrap();
        for (t, x) in g.nodes().iter().zip(v.values()) {
            assert!((x - if t + 0.5 < 1.0 { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
        assert!(translate(&u, -1.0).is_err());
    }

    #[test]
    fn fractional_single_mode_eigenrelation() {
        let period = 2.0 * std::f64::consts::PI;
        let g = uniform_grid(period, 64).unwrap();
        let k = 3.0;
        let u = sample(
            |t, o| {
                o[0] = (k * t).cos();
                o[1] = (k * t).sin();
            },
            g.clone(),
            2,
        )
        .unwrap();
        let alpha = 0.7;
        let spec = FractionalOperatorSpec::time_minus(alpha, 1.0).unwrap();
        let out = fractional_apply(&u, &spec, Periodization::Periodic).unwrap();
        let lam = Complex64::new(1.0, -k).powf(alpha);
        for (i, &t) in g.nodes().iter().enumerate() {
            let e = lam * Complex64::new(0.0, k * t).exp();
            assert!((out.value(i)[0] - e.re).abs() < 1e-12);
            assert!((out.value(i)[1] - e.im).abs() < 1e-12);
        }
    }

    #[test]
    fn first_order_derivative_of_sine() {
        let period = 2.0 * std::f64::consts::PI;
        let g = uniform_grid(period, 256).unwrap();
        let u = sample_scalar(f64::sin, g.clone()).unwrap();
        let spec = FractionalOperatorSpec::time_minus(1.0, 1.0).unwrap();
        let out = fractional_apply(&u, &spec, Periodization::Periodic).unwrap();
        let err = g.nodes().iter().zip(out.values()).map(|(t, v)| (v - (t.sin() - t.cos())).abs()).fold(0.0, f64::max);
        assert!(err <= 1e-8, "{err}");
    }

    #[test]
    fn order_zero_is_identity_and_branch_flag() {
        let g = uniform_grid(1.0, 32).unwrap();
        let u = sample_scalar(|t| 1.0 + t, g).unwrap();
        let id = FractionalOperatorSpec::time_minus(0.0, 0.0).unwrap();
        assert_eq!(fractional_apply(&u, &id, Periodization::Periodic).unwrap(), u);
        let no_shift = FractionalOperatorSpec::time_minus(0.5, 0.0).unwrap();
        assert!(matches!(fractional_apply(&u, &no_shift, Periodization::Periodic), Err(Error::BranchAmbiguity(_))));
        assert!(FractionalOperatorSpec::time_minus(2.0, 1.0).is_err());
    }

    #[test]
    fn extended_first_derivative_matches_local_formula() {
        // (1 - d/dt) is local, so the periodization must not matter on (0,T).
        let g = graded(1.0, 256);
        let f = |t: f64| (-(t - 0.5) * (t - 0.5) * 60.0).exp();
        let u = sample_scalar(f, g.clone()).unwrap();
        let spec = FractionalOperatorSpec::time_minus(1.0, 1.0).unwrap();
        for per in [Periodization::ExtendZeroLeft, Periodization::ExtendReflectLeft] {
            let out = fractional_apply(&u, &spec, per);
            // zero-left has a jump at t=0; only compare away from it
            let out = out.unwrap();
            for (i, &t) in g.nodes().iter().enumerate() {
                if per == Periodization::ExtendZeroLeft && t < 0.2 {
                    continue;
                }
                let exact = (1.0 + 120.0 * (t - 0.5)) * f(t);
                assert!((out.values()[i] - exact).abs() < 1e-4, "{per:?} t={t} {} {exact}", out.values()[i]);
            }
        }
    }

    #[test]
    fn spatial_derivative_modes() {
        let tg = uniform_grid(1.0, 8).unwrap();
        let ax = SpatialAxis::periodic(32, 1.0).unwrap();
        let c = SpaceTimeField::from_fn(tg.clone(), vec![ax], |_, _| 2.5).unwrap();
        let dc = spatial_derivative(&c, 0).unwrap();
        assert!(dc.values().iter().all(|v| v.abs() < 1e-12));
        let f = SpaceTimeField::from_fn(tg, vec![ax], |t, x| t * (4.0 * x[0]).sin()).unwrap();
        let df = spatial_derivative(&f, 0).unwrap();
        let expect =
            SpaceTimeField::from_fn(f.tgrid_arc().clone(), vec![ax], |t, x| 4.0 * t * (4.0 * x[0]).cos()).unwrap();
        for (a, b) in df.values().iter().zip(expect.values()) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn mixed_power_young_bound() {
        for &sigma in &[0.25, 0.5, 0.75] {
            for k in -20..=20 {
                for kx in 0..10 {
                    let a = cpow(Complex64::new(1.0, -(k as f64)), 0.9);
                    let b = Complex64::new((1.0 + (kx * kx) as f64).powf(1.0), 0.0);
                    assert!(mixed_power_ratio(a, b, sigma) <= 1.0 + 1e-14);
                }
            }
        }
    }
}
