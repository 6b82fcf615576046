//! K-functionals of Fourier-diagonal couples and real interpolation norms.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grids::{SampledFunction, WeightParams};
use crate::norms::{fractional_norm, Family, NormResult, SpaceSpec};
use crate::operators::{phi_mu, Direction, Periodized};
use crate::spectral;
use crate::verify::{Instance, Tolerances, VerificationReport};

/// A couple `(X, Y)` whose norms are weighted `l_2` sums over a shared
/// Fourier basis: `|a|_X^2 = sum w0_k^2 |a_k|^2`, likewise `Y` with `w1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalCouple {
    w0: Vec<f64>,
    w1: Vec<f64>,
}

impl DiagonalCouple {
    pub fn new(w0: Vec<f64>, w1: Vec<f64>) -> Result<Self> {
        if w0.len() != w1.len() {
            return Err(Error::ShapeMismatch(format!("weights of length {} and {}", w0.len(), w1.len())));
        }
        if w0.iter().chain(&w1).any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter("couple weights must be positive and finite".into()));
        }
        Ok(Self { w0, w1 })
    }

    /// Bessel-potential couple `(H^{s1}, H^{s2})` on the given wavenumbers.
    pub fn bessel(xi: &[f64], s1: f64, s2: f64) -> Result<Self> {
        let w = |s: f64| xi.iter().map(|x| (1.0 + x * x).powf(s / 2.0)).collect::<Vec<_>>();
        Self::new(w(s1), w(s2))
    }

    pub fn w0(&self) -> &[f64] {
        &self.w0
    }

    pub fn w1(&self) -> &[f64] {
        &self.w1
    }

    pub fn len(&self) -> usize {
        self.w0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w0.is_empty()
    }

    fn check(&self, u: &[Complex64]) -> Result<()> {
        if u.len() != self.len() {
            return Err(Error::ShapeMismatch(format!("{} coefficients for a couple of {} modes", u.len(), self.len())));
        }
        Ok(())
    }

    pub fn norm_x(&self, u: &[Complex64]) -> f64 {
        weighted_l2(u, &self.w0)
    }

    pub fn norm_y(&self, u: &[Complex64]) -> f64 {
        weighted_l2(u, &self.w1)
    }
}

fn weighted_l2(u: &[Complex64], w: &[f64]) -> f64 {
    u.iter().zip(w).map(|(a, w)| w * w * a.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KMode {
    /// `K_2(t) = inf (|a|_X^2 + t^2 |b|_Y^2)^{1/2}`, exact mode by mode.
    QuadraticExact,
    /// `K(t) = inf |a|_X + t |b|_Y`, minimized over the family of splits
    /// satisfying the optimality condition.
    CoordinateDescent,
}

fn k_quadratic(u: &[Complex64], c: &DiagonalCouple, t: f64) -> f64 {
    let mut s = 0.0;
    for k in 0..u.len() {
        let a = c.w0[k] * c.w0[k];
        let b = t * t * c.w1[k] * c.w1[k];
        s += u[k].norm_sqr() * a * b / (a + b);
    }
    s.sqrt()
}

/// Objective `|u - b|_X + t |b|_Y` along `b_k = u_k / (1 + rho t w1^2 / w0^2)`.
fn k_split(u: &[Complex64], c: &DiagonalCouple, t: f64, log_rho: f64) -> f64 {
    let rho = log_rho.exp();
    let (mut na, mut nb) = (0.0, 0.0);
    for k in 0..u.len() {
        let (w0, w1) = (c.w0[k] * c.w0[k], c.w1[k] * c.w1[k]);
        let f = 1.0 / (1.0 + rho * t * w1 / w0);
        let m = u[k].norm_sqr();
        nb += w1 * m * f * f;
        na += w0 * m * (1.0 - f) * (1.0 - f);
    }
    na.sqrt() + t * nb.sqrt()
}

const RHO_SCAN: usize = 121;
const GOLDEN_ITERS: usize = 80;

fn k_descent(u: &[Complex64], c: &DiagonalCouple, t: f64) -> f64 {
    let endpoints = c.norm_x(u).min(t * c.norm_y(u));
    // a ratio of norms spans at most the dynamic range of the weights
    let range = c.w0.iter().zip(&c.w1).map(|(a, b)| (a / (t * b)).ln().abs()).fold(0.0f64, f64::max) + 10.0;
    let (lo, hi) = (-range, range);
    let step = (hi - lo) / (RHO_SCAN - 1) as f64;
    let vals: Vec<f64> = (0..RHO_SCAN).map(|j| k_split(u, c, t, lo + j as f64 * step)).collect();
    let jbest = (0..RHO_SCAN).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    let (mut a, mut b) = (lo + jbest.saturating_sub(1) as f64 * step, lo + (jbest + 1).min(RHO_SCAN - 1) as f64 * step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (k_split(u, c, t, x1), k_split(u, c, t, x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = k_split(u, c, t, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = k_split(u, c, t, x2);
        }
    }
    vals[jbest].min(f1).min(f2).min(endpoints)
}

/// `K(t, u)` of the couple.
pub fn k_functional(u: &[Complex64], couple: &DiagonalCouple, t: f64, mode: KMode) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    couple.check(u)?;
    Ok(match mode {
        KMode::QuadraticExact => k_quadratic(u, couple, t),
        KMode::CoordinateDescent => k_descent(u, couple, t),
    })
}

/// Log-spaced points of the `t` quadrature.
pub const T_POINTS: usize = 160;
const T_MIN: f64 = 1e-6;
const T_MAX: f64 = 1e6;

/// Quadrature nodes `t_j` in `[1e-6, 1e6]`.
pub fn t_nodes() -> Vec<f64> {
    let (a, b) = (T_MIN.ln(), T_MAX.ln());
    let du = (b - a) / (T_POINTS - 1) as f64;
    (0..T_POINTS).map(|j| (a + j as f64 * du).exp()).collect()
}

fn log_trapezoid(vals: &[f64], du: f64, slope_left: f64, slope_right: f64) -> f64 {
    let n = vals.len();
    let mut s = 0.0;
    for (j, v) in vals.iter().enumerate() {
        s += if j == 0 || j + 1 == n { 0.5 * v } else { *v };
    }
    // Euler-Maclaurin end terms with f'(u) = slope * f at the ends
    s * du + du * du / 12.0 * (slope_left * vals[0] - slope_right * vals[n - 1])
}

/// `(int_0^inf (t^{-theta} K(t,u))^p dt/t)^{1/p}` on 160 log-spaced points
/// plus tails from `K ~ t |u|_Y` near 0 and `K ~ |u|_X` near infinity.
pub fn real_interp_norm(
    u: &[Complex64],
    couple: &DiagonalCouple,
    theta: f64,
    p: f64,
    mode: KMode,
) -> Result<NormResult> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0,1), got {theta}")));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
    }
    couple.check(u)?;
    let ts = t_nodes();
    let du = (T_MAX.ln() - T_MIN.ln()) / (T_POINTS - 1) as f64;
    let vals: Vec<f64> = ts
        .par_iter()
        .map(|&t| {
            let k = match mode {
                KMode::QuadraticExact => k_quadratic(u, couple, t),
                KMode::CoordinateDescent => k_descent(u, couple, t),
            };
            (t.powf(-theta) * k).powf(p)
        })
        .collect();
    let (sl, sr) = ((1.0 - theta) * p, -theta * p);
    let body = log_trapezoid(&vals, du, sl, sr);
    let head = vals[0] / sl;
    let tail = vals[T_POINTS - 1] / -sr;
    let value = (body + head + tail).powf(1.0 / p);
    let coarse: Vec<f64> = vals.iter().step_by(3).copied().collect();
    let coarse_body = log_trapezoid(&coarse, 3.0 * du, sl, sr);
    let coarse_value = (coarse_body + head + vals[T_POINTS - 1] / -sr).powf(1.0 / p);
    let mut r = NormResult {
        value,
        resolution: T_POINTS,
        est_error: (value - coarse_value).abs(),
        components: Default::default(),
    };
    r.components.insert("head".into(), head);
    r.components.insert("tail".into(), tail);
    Ok(r)
}

/// `((1/2) B(p(1-theta)/2, p theta/2))^{1/p}`: the factor by which the
/// K_2-method norm of `(X, X)_{theta,p}` exceeds `|.|_X`, computed with the
/// same quadrature as [`real_interp_norm`].
pub fn normalization(theta: f64, p: f64) -> Result<f64> {
    let c = DiagonalCouple::new(vec![1.0], vec![1.0])?;
    Ok(real_interp_norm(&[Complex64::new(1.0, 0.0)], &c, theta, p, KMode::QuadraticExact)?.value)
}

/// Normalized spectral coefficients and angular wavenumbers of the
/// periodized `u` (smooth extension past `T`, zero left of 0): their squared
/// moduli sum to the squared `L_2` norm over one period.
pub fn periodized_spectrum(u: &SampledFunction) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let per = Periodized::new(u, false)?;
    let d = per.d;
    let n = per.values.len() / d;
    let scale = per.period.sqrt() / n as f64;
    let mut coeffs = Vec::with_capacity(n * d);
    let mut xi = Vec::with_capacity(n * d);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..d {
        for j in 0..n {
            buf[j] = Complex64::new(per.values[j * d + c], 0.0);
        }
        spectral::fft(&mut buf);
        for (j, b) in buf.iter().enumerate() {
            coeffs.push(b * scale);
            xi.push(spectral::wavenumber(j, n, per.period));
        }
    }
    Ok((coeffs, xi))
}

/// Normalized `(H^{s1}, H^{s2})_{theta,2}` norm of `Phi_mu u`.
fn interp_side(u: &SampledFunction, wp: WeightParams, s1: f64, s2: f64, theta: f64) -> Result<f64> {
    let v = phi_mu(u, wp, Direction::Forward)?;
    let (coeffs, xi) = periodized_spectrum(&v)?;
    let couple = DiagonalCouple::bessel(&xi, s1, s2)?;
    let r = real_interp_norm(&coeffs, &couple, theta, 2.0, KMode::QuadraticExact)?;
    Ok(r.value / normalization(theta, 2.0)?)
}

/// Spectral `H^s` norm of `Phi_mu u` on the extension torus.
fn torus_bessel(u: &SampledFunction, wp: WeightParams, s: f64) -> Result<f64> {
    let v = phi_mu(u, wp, Direction::Forward)?;
    let (coeffs, xi) = periodized_spectrum(&v)?;
    Ok(coeffs.iter().zip(&xi).map(|(c, x)| (1.0 + x * x).powf(s) * c.norm_sqr()).sum::<f64>().sqrt())
}

/// Frozen bracket for `(s1, s2, theta) = (0, 1, 1/2)`, `p = 2`, calibrated
/// on the standard ensembles.
pub const INTERP_BRACKET: (f64, f64) = (1.0 / 3.0, 3.0);
pub const DRIFT_TOL: f64 = 0.1;

/// Compares the real interpolation norm of `(H^{s1}, H^{s2})_{theta,2}`
/// (on `Phi_mu`-transformed data) with the `W^s_{p,mu}` norm,
/// `s = (1-theta) s1 + theta s2`, across the ensemble and one coarsening.
pub fn check_interp_identity(
    ensemble: &[SampledFunction],
    wp: WeightParams,
    s1: f64,
    s2: f64,
    theta: f64,
) -> Result<VerificationReport> {
    check_interp_identity_with(
        ensemble,
        wp,
        s1,
        s2,
        theta,
        Tolerances::bracket(INTERP_BRACKET.0, INTERP_BRACKET.1, DRIFT_TOL),
    )
}

pub fn check_interp_identity_with(
    ensemble: &[SampledFunction],
    wp: WeightParams,
    s1: f64,
    s2: f64,
    theta: f64,
    tolerances: Tolerances,
) -> Result<VerificationReport> {
    if ensemble.len() < 8 {
        return Err(Error::InvalidParameter(format!("ensemble needs at least 8 members, got {}", ensemble.len())));
    }
    if wp.p() != 2.0 {
        return Err(Error::InvalidParameter("diagonal couples realize p = 2 norms only".into()));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::InvalidParameter(format!("theta must lie in (0,1), got {theta}")));
    }
    let s = (1.0 - theta) * s1 + theta * s2;
    let degenerate = s1 == s2;
    let ratio_of = |u: &SampledFunction| -> Result<(f64, f64)> {
        let lhs = interp_side(u, wp, s1, s2, theta)?;
        let rhs = if degenerate {
            torus_bessel(u, wp, s)?
        } else {
            let spec = SpaceSpec::new(Family::W, s, wp)?;
            fractional_norm(u, &spec)?.value
        };
        Ok((lhs, rhs))
    };
    let rows: Vec<Result<Instance>> = ensemble
        .par_iter()
        .enumerate()
        .map(|(idx, u)| {
            let (lhs, rhs) = ratio_of(u)?;
            let (cl, cr) = ratio_of(&u.coarsen())?;
            let inst = Instance::new(lhs, rhs, u.len());
            let drift = ((cl / cr) / inst.ratio - 1.0).abs();
            Ok(inst.param("member", idx as f64).param("s", s).with_drift(drift))
        })
        .collect();
    let instances = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let tolerances =
        if degenerate { Tolerances::bracket(1.0 - 1e-8, 1.0 + 1e-8, tolerances.drift_tol) } else { tolerances };
    Ok(VerificationReport::assemble("interp", instances, tolerances))
}

/// Weights of `(X, Y)_{theta,2}` under the normalized `K_2` method, obtained
/// mode by mode from the quadrature.
pub fn interpolated_couple_weights(couple: &DiagonalCouple, theta: f64) -> Result<Vec<f64>> {
    let c = normalization(theta, 2.0)?;
    let one = [Complex64::new(1.0, 0.0)];
    couple
        .w0
        .iter()
        .zip(&couple.w1)
        .map(|(&a, &b)| {
            let single = DiagonalCouple::new(vec![a], vec![b])?;
            Ok(real_interp_norm(&one, &single, theta, 2.0, KMode::QuadraticExact)?.value / c)
        })
        .collect()
}

/// Ratio of the `((X,Y)_{theta1}, (X,Y)_{theta2})_{eta}` norm to the
/// `(X,Y)_{(1-eta) theta1 + eta theta2}` norm of `u` (all with `p = 2`).
pub fn reiteration_ratio(u: &[Complex64], couple: &DiagonalCouple, theta1: f64, theta2: f64, eta: f64) -> Result<f64> {
    let inner = DiagonalCouple::new(
        interpolated_couple_weights(couple, theta1)?,
        interpolated_couple_weights(couple, theta2)?,
    )?;
    let c_eta = normalization(eta, 2.0)?;
    let lhs = real_interp_norm(u, &inner, eta, 2.0, KMode::QuadraticExact)?.value / c_eta;
    let theta = (1.0 - eta) * theta1 + eta * theta2;
    let rhs = real_interp_norm(u, couple, theta, 2.0, KMode::QuadraticExact)?.value / normalization(theta, 2.0)?;
    Ok(lhs / rhs)
}
