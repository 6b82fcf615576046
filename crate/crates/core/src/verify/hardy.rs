//! Hardy and Poincaré inequalities.

use std::sync::Arc;

use rayon::prelude::*;

use super::ensembles::Ensemble;
use super::report::{Instance, Tolerances, VerificationReport};
use crate::error::{Error, Result};
use crate::grids::{make_graded_grid, sample_scalar, Grading, SampledFunction, TimeDomain, WeightParams};
use crate::norms::{
    check_vanishing_traces, finite_difference_derivative, fractional_norm, slobodetskii_seminorm, Family, SpaceSpec,
};

/// Relative quadrature slack allowed on top of a proven constant.
pub const QUADRATURE_SLACK: f64 = 0.02;
pub const DRIFT_TOL: f64 = 0.1;

/// Frozen bound for `int t^{p(1-mu-s)} |u|^p / (C_s |u|^p_{W^s})` at
/// fractional `s`, where `C_s` interpolates the integer constants
/// geometrically; twice the largest value seen on the standard ensembles.
pub const HARDY_FRACTIONAL_BOUND: f64 = 2.0;

pub(crate) fn drift(fine: f64, coarse: f64) -> f64 {
    if fine == coarse {
        return 0.0;
    }
    (fine - coarse).abs() / fine.abs().max(coarse.abs())
}

/// Both sides of the Hardy inequality for `phi >= 0` sampled on `(0, T)`
/// and zero beyond: `(int_0^inf (t^{-alpha} Phi)^p, int_0^inf (t^{1-alpha} phi)^p)`.
pub fn hardy_sides(phi: &SampledFunction, alpha: f64, p: f64) -> Result<(f64, f64)> {
    if !(alpha > 1.0 / p) {
        return Err(Error::InvalidParameter(format!("need alpha > 1/p, got alpha={alpha}, p={p}")));
    }
    let g = phi.grid();
    let (t, w, e) = (g.nodes(), g.weights(), g.edges());
    let mut cum = 0.0;
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for i in 0..phi.len() {
        let f = phi.norm_at(i);
        let big_phi = cum + (t[i] - e[i]) * f;
        cum += w[i] * f;
        lhs += w[i] * t[i].powf(-alpha * p) * big_phi.powf(p);
        rhs += w[i] * (t[i].powf(1.0 - alpha) * f).powf(p);
    }
    // Phi is constant past T
    let len = g.length();
    lhs += cum.powf(p) * len.powf(1.0 - alpha * p) / (alpha * p - 1.0);
    Ok((lhs, rhs))
}

/// `prod_{j<k} (mu + j - 1/p)^{-p}`.
pub fn hardy_constant(wp: WeightParams, k: usize) -> f64 {
    (0..k).map(|j| (wp.mu() + j as f64 - 1.0 / wp.p()).powf(-wp.p())).product()
}

fn weighted_power_integral(u: &SampledFunction, exponent: f64, p: f64) -> f64 {
    let g = u.grid();
    (0..u.len()).map(|i| g.weights()[i] * g.nodes()[i].powf(exponent) * u.norm_at(i).powf(p)).sum()
}

fn nth_derivative(u: &SampledFunction, k: usize) -> Result<SampledFunction> {
    let mut v = u.clone();
    for _ in 0..k {
        v = finite_difference_derivative(&v)?;
    }
    Ok(v)
}

/// `(lhs, rhs)` of the weighted lemma at order `s`.
fn lemma_sides(u: &SampledFunction, wp: WeightParams, s: f64) -> Result<(f64, f64)> {
    let p = wp.p();
    let lhs = weighted_power_integral(u, p * (1.0 - wp.mu() - s), p);
    let k = s.floor() as usize;
    if s == k as f64 {
        let top = nth_derivative(u, k)?;
        let rhs = hardy_constant(wp, k) * weighted_power_integral(&top, p * (1.0 - wp.mu()), p);
        return Ok((lhs, rhs));
    }
    let theta = s - k as f64;
    let c = hardy_constant(wp, k).powf(1.0 - theta) * hardy_constant(wp, k + 1).powf(theta);
    let norm = fractional_norm(u, &SpaceSpec::new(Family::W, s, wp)?)?.value;
    Ok((lhs, c * norm.powf(p)))
}

/// Raw Hardy inequality with the sharp constant on `|member|` and the closed
/// form cases, then the weighted lemma at order `s` on the ensemble.
pub fn run_hardy_suite(wp: WeightParams, ensemble: &Ensemble, s: f64) -> Result<VerificationReport> {
    if !(s >= 0.0) {
        return Err(Error::InvalidParameter(format!("s must be >= 0, got {s}")));
    }
    let p = wp.p();
    let n = ensemble.n;
    for i in 0..ensemble.len() {
        check_vanishing_traces(&ensemble.sample(i, 1.0, n)?, s, wp)?;
    }
    let mut alphas = vec![wp.mu()];
    if wp.mu() != 1.0 {
        alphas.push(1.0);
    }

    let raw_ratio = |phi: &SampledFunction, alpha: f64, pp: f64| -> Result<(f64, f64)> {
        let (l, r) = hardy_sides(phi, alpha, pp)?;
        Ok((l, (alpha - 1.0 / pp).powf(-pp) * r))
    };
    let mut raw: Vec<Instance> = Vec::new();
    // phi = 1 on (0,1), alpha = 1, p = 2: LHS = 2, bound 4
    let grid = |m: usize| -> Result<Arc<_>> {
        Ok(Arc::new(make_graded_grid(TimeDomain::finite(1.0)?, m, Grading::default())?))
    };
    let one = sample_scalar(|_| 1.0, grid(n)?)?;
    let (l, r) = raw_ratio(&one, 1.0, 2.0)?;
    let (lc, rc) = raw_ratio(&one.resample(grid(n / 2)?)?, 1.0, 2.0)?;
    raw.push(
        Instance::new(l, r, n)
            .param("closed_form", 1.0)
            .param("alpha", 1.0)
            .param("p", 2.0)
            .with_drift(drift(l / r, lc / rc)),
    );
    let zero = sample_scalar(|_| 0.0, grid(n)?)?;
    let (l, r) = raw_ratio(&zero, wp.mu(), p)?;
    raw.push(Instance::new(l, r, n).param("closed_form", 0.0).param("alpha", wp.mu()).param("p", p).with_drift(0.0));
    let members: Vec<Result<Vec<Instance>>> = (0..ensemble.len())
        .into_par_iter()
        .map(|i| {
            let fine = ensemble.sample(i, 1.0, n)?;
            let coarse = ensemble.sample(i, 1.0, n / 2)?;
            let abs = |u: &SampledFunction| u.map_values(|_, v, o| o[0] = v[0].abs());
            let (fa, ca) = (abs(&fine)?, abs(&coarse)?);
            alphas
                .iter()
                .map(|&alpha| {
                    let (l, r) = raw_ratio(&fa, alpha, p)?;
                    let (lc, rc) = raw_ratio(&ca, alpha, p)?;
                    Ok(Instance::new(l, r, n)
                        .param("member", i as f64)
                        .param("alpha", alpha)
                        .param("p", p)
                        .with_drift(drift(l / r, lc / rc)))
                })
                .collect()
        })
        .collect();
    for m in members {
        raw.extend(m?);
    }
    let raw = VerificationReport::assemble("hardy-raw", raw, Tolerances::upper(1.0 + QUADRATURE_SLACK, DRIFT_TOL));

    let lemma: Vec<Result<Instance>> = (0..ensemble.len())
        .into_par_iter()
        .map(|i| {
            let (l, r) = lemma_sides(&ensemble.sample(i, 1.0, n)?, wp, s)?;
            let (lc, rc) = lemma_sides(&ensemble.sample(i, 1.0, n / 2)?, wp, s)?;
            Ok(Instance::new(l, r, n).param("member", i as f64).param("s", s).with_drift(drift(l / r, lc / rc)))
        })
        .collect();
    let lemma = lemma.into_iter().collect::<Result<Vec<_>>>()?;
    let bound = if s.fract() == 0.0 { 1.0 + QUADRATURE_SLACK } else { HARDY_FRACTIONAL_BOUND };
    let lemma = VerificationReport::assemble("hardy-weighted", lemma, Tolerances::upper(bound, DRIFT_TOL));
    Ok(VerificationReport::combine("hardy", vec![raw, lemma])
        .meta("p", p.to_string())
        .meta("mu", wp.mu().to_string())
        .meta("s", s.to_string()))
}

/// Proven constant of `|u|_{L_{p,mu}(0,T)} <= C T |u'|_{L_{p,mu}(0,T)}` for
/// `u(0) = 0`, from Hölder's inequality on `(0, t)`.
pub fn poincare_constant(wp: WeightParams) -> f64 {
    let p = wp.p();
    let q = p / (p - 1.0);
    p.powf(-1.0 / p) * (1.0 - q * (1.0 - wp.mu())).powf(-1.0 / q)
}

/// Allowed deviation of the fitted `T`-exponents.
pub const POINCARE_EXPONENT_TOL: f64 = 0.02;
pub const POINCARE_S_EXPONENT_TOL: f64 = 0.05;

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Poincaré bound at every `T`, plus the fitted `T`-exponents of
/// `|u|/|u'|` (expected 1) and `[u]_s/|u'|` (expected `1 - s`).
pub fn run_poincare_suite(
    wp: WeightParams,
    t_values: &[f64],
    ensemble: &Ensemble,
    s: f64,
) -> Result<VerificationReport> {
    if t_values.len() < 2 || t_values.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter("need at least two positive T values".into()));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("s-variant order must lie in (0,1), got {s}")));
    }
    let n = ensemble.n;
    let c = poincare_constant(wp);
    let mut notes = Vec::new();
    let mut admitted = Vec::new();
    for i in 0..ensemble.len() {
        match check_vanishing_traces(&ensemble.sample(i, 1.0, n)?, 1.0, wp) {
            Ok(()) => admitted.push(i),
            Err(e) => notes.push(format!("member {i} rejected: {e}")),
        }
    }
    let logt: Vec<f64> = t_values.iter().map(|t| t.ln()).collect();
    type Row = (Vec<Instance>, Instance, Instance);
    let rows: Vec<Result<Row>> = admitted
        .par_iter()
        .map(|&i| {
            let mut bound = Vec::new();
            let (mut r1, mut rs) = (Vec::new(), Vec::new());
            for &t in t_values {
                let measure = |m: usize| -> Result<(f64, f64, f64)> {
                    let u = ensemble.sample(i, t, m)?;
                    let du = finite_difference_derivative(&u)?;
                    let nu = crate::norms::weighted_lp_norm(&u, wp)?.value;
                    let ndu = crate::norms::weighted_lp_norm(&du, wp)?.value;
                    let semi = slobodetskii_seminorm(&u, s, wp)?.value;
                    Ok((nu, ndu, semi))
                };
                let (nu, ndu, semi) = measure(n)?;
                let (cu, cdu, _) = measure(n / 2)?;
                bound.push(
                    Instance::new(nu, c * t * ndu, n)
                        .param("member", i as f64)
                        .param("T", t)
                        .with_drift(drift(nu / ndu, cu / cdu)),
                );
                r1.push((nu / ndu).ln());
                rs.push((semi / ndu).ln());
            }
            let e1 = least_squares_slope(&logt, &r1);
            let es = least_squares_slope(&logt, &rs);
            Ok((
                bound,
                Instance::new(e1, 1.0, n).param("member", i as f64),
                Instance::new(es, 1.0 - s, n).param("member", i as f64).param("s", s),
            ))
        })
        .collect();
    let (mut bound, mut exp1, mut exps) = (Vec::new(), Vec::new(), Vec::new());
    for r in rows {
        let (b, e1, es) = r?;
        bound.extend(b);
        exp1.push(e1);
        exps.push(es);
    }
    let tol1 = POINCARE_EXPONENT_TOL;
    let tols = POINCARE_S_EXPONENT_TOL / (1.0 - s);
    let mut parts = vec![
        VerificationReport::assemble("poincare-bound", bound, Tolerances::upper(1.0 + QUADRATURE_SLACK, DRIFT_TOL)),
        VerificationReport::assemble("poincare-exponent", exp1, Tolerances::bracket(1.0 - tol1, 1.0 + tol1, DRIFT_TOL)),
        VerificationReport::assemble(
            "poincare-s-exponent",
            exps,
            Tolerances::bracket(1.0 - tols, 1.0 + tols, DRIFT_TOL),
        ),
    ];
    if admitted.is_empty() {
        parts[0].verdict = super::Verdict::Inconclusive;
    }
    let mut report = VerificationReport::combine("poincare", parts)
        .meta("p", wp.p().to_string())
        .meta("mu", wp.mu().to_string())
        .meta("s", s.to_string());
    report.notes.extend(notes);
    Ok(report)
}
