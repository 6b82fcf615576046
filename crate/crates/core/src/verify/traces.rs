//! Temporal and spatial trace suites.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ensembles::{BandLimited1D, BandLimited2D};
use super::hardy::drift;
use super::predicates::{trace_space_order, TraceOrder, TraceQuery, TraceVariant};
use super::report::{Instance, Tolerances, VerificationReport};
use crate::error::{Error, Result};
use crate::grids::{make_graded_grid, Grading, SpaceTimeField, SpatialAxis, SpatialSample, TimeDomain, WeightParams};
use crate::norms::{
    finite_difference_derivative, fractional_norm, mixed_norm, semigroup_besov_norm, spatial_bessel, weighted_lp_norm,
    Family, SpaceSpec,
};
use crate::operators::{
    apply_along_axis, trace_rightinverse_s, trace_t0, trace_y0, trace_y0_rightinverse, Periodization, SumOperatorSpec,
};

pub const DRIFT_TOL: f64 = 0.1;
/// Ratios above this are treated as unbounded.
pub const TRACE_RATIO_CEILING: f64 = 1e3;
pub const RIGHT_INVERSE_TOL: f64 = 1e-6;

/// Averaging radius of the trace functional in the right-inverse leg, as a
/// fraction of `T`; it stays inside the graded boundary layer.
pub const RINV_SIGMA: f64 = 1e-3;

/// Seeded band-limited data for the trace suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEnsemble {
    /// Initial values on the `x`-torus.
    pub u0: Vec<BandLimited1D>,
    /// Boundary data on the `(t, x')`-torus.
    pub g: Vec<BandLimited2D>,
    /// Bulk time cells at the coarse level.
    pub n: usize,
}

impl TraceEnsemble {
    pub fn standard(seed: u64, count: usize, n: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u0 = (0..count).map(|_| BandLimited1D::random(&mut rng, 6, 2.0)).collect();
        let g = (0..count).map(|_| BandLimited2D::random(&mut rng, 3, 3, 2.0)).collect();
        Self { u0, g, n }
    }
}

/// Mode-wise `exp(-t c)` orbit of `u0` with constant rate.
fn scalar_orbit(u0: &SpatialSample, rate: f64, tgrid: Arc<crate::grids::Grid1D>) -> Result<SpaceTimeField> {
    let per = u0.values().len();
    let mut values = Vec::with_capacity(per * tgrid.len());
    for &t in tgrid.nodes() {
        let e = (-rate * t).exp();
        values.extend(u0.values().iter().map(|v| v * e));
    }
    SpaceTimeField::new(tgrid, u0.axes().to_vec(), values)
}

/// Orders that the refusal rule looks at.
fn refuse_integer_orders(q: &TraceQuery) -> Result<()> {
    if q.p == 2.0 {
        return Ok(());
    }
    for order in [q.r, q.r + q.beta] {
        if order > 0.0 && (order - order.round()).abs() < 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "W-space of integer order {order} with p != 2: the admissible intersection is not determined"
            )));
        }
    }
    Ok(())
}

fn lifted_time_norm(u: &SpaceTimeField, r: f64, family: Family, s: f64, wp: WeightParams) -> Result<f64> {
    let f = spatial_bessel(u, r)?.as_time_function(wp.p())?;
    if s == 0.0 {
        return Ok(weighted_lp_norm(&f, wp)?.value);
    }
    Ok(fractional_norm(&f, &SpaceSpec::new(family, s, wp)?)?.value)
}

fn intersection_norm(u: &SpaceTimeField, q: &TraceQuery, wp: WeightParams) -> Result<f64> {
    let per = Periodization::ExtendReflectLeft;
    Ok(match q.variant {
        TraceVariant::Temporal => {
            mixed_norm(u, q.s + q.alpha, q.r, wp, per)?.value + mixed_norm(u, q.s, q.r + q.beta, wp, per)?.value
        }
        TraceVariant::TemporalLg73 => {
            lifted_time_norm(u, q.r, Family::W, q.alpha, wp)? + lifted_time_norm(u, q.r + q.beta, Family::W, 0.0, wp)?
        }
        TraceVariant::TemporalLg74 => {
            lifted_time_norm(u, q.r, Family::W, 1.0, wp)? + lifted_time_norm(u, q.r + q.beta, Family::W, q.s, wp)?
        }
        TraceVariant::Spatial => unreachable!(),
    })
}

/// `|x|_p + [x]_{D_A(theta,p)}` with `A = (1 - Laplacian)^m`, realizing `B^rho_{pp}`.
pub fn besov_norm(x: &SpatialSample, rho: f64, wp: WeightParams) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("Besov order must be positive, got {rho}")));
    }
    let m = (rho / 2.0).floor() as usize + 1;
    let theta = rho / (2 * m) as f64;
    Ok(x.lp_norm(wp.p()) + semigroup_besov_norm(x, theta, wp, m)?.value)
}

fn temporal_sides(u: &SpaceTimeField, q: &TraceQuery, rho: f64, wp: WeightParams) -> Result<(f64, f64)> {
    let len = u.tgrid().length();
    let mut f = u.as_time_function(wp.p())?;
    for _ in 0..q.k {
        f = finite_difference_derivative(&f)?;
    }
    let tr = trace_t0(&f, wp, len / 2.0)?;
    let tr = SpatialSample::new(u.axes().to_vec(), tr)?;
    Ok((besov_norm(&tr, rho, wp)?, intersection_norm(u, q, wp)?))
}

fn temporal_suite(q: &TraceQuery, rho: f64, ens: &TraceEnsemble) -> Result<VerificationReport> {
    if q.k > 1 {
        return Err(Error::InvalidParameter(format!("the temporal suite supports k <= 1, got {}", q.k)));
    }
    refuse_integer_orders(q)?;
    let wp = q.weight()?;
    let (nx, n) = (32, ens.n);
    let tgrid = |m: usize| -> Result<Arc<_>> {
        Ok(Arc::new(make_graded_grid(TimeDomain::finite(1.0)?, m, Grading::default())?))
    };
    // members: e^{-t} u0 and e^{-t(1-Laplacian)} u0
    let jobs: Vec<(usize, bool)> = (0..ens.u0.len()).flat_map(|i| [(i, false), (i, true)]).collect();
    let rows: Vec<Result<Instance>> = jobs
        .par_iter()
        .map(|&(i, parabolic)| {
            let u0 = ens.u0[i].sample(nx)?;
            let field = |m: usize| -> Result<SpaceTimeField> {
                if parabolic {
                    trace_rightinverse_s(&u0, 1, tgrid(m)?)
                } else {
                    scalar_orbit(&u0, 1.0, tgrid(m)?)
                }
            };
            let (l, r) = temporal_sides(&field(2 * n)?, q, rho, wp)?;
            let (lc, rc) = temporal_sides(&field(n)?, q, rho, wp)?;
            Ok(Instance::new(l, r, 2 * n)
                .param("member", i as f64)
                .param("parabolic", parabolic as u8 as f64)
                .with_drift(drift(l / r, lc / rc)))
        })
        .collect();
    let ratios = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let ratios =
        VerificationReport::assemble("trace-time-ratio", ratios, Tolerances::upper(TRACE_RATIO_CEILING, DRIFT_TOL));

    // tr o S = id
    let rows: Vec<Result<Instance>> = ens
        .u0
        .par_iter()
        .enumerate()
        .map(|(i, b)| {
            let u0 = b.sample(nx)?;
            let v = trace_rightinverse_s(&u0, q.m.max(1), tgrid(2 * n)?)?;
            let tr = trace_t0(&v.as_time_function(wp.p())?, wp, RINV_SIGMA)?;
            let scale = u0.values().iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let err = tr.iter().zip(u0.values()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs())) / scale;
            Ok(Instance::new(err, RIGHT_INVERSE_TOL, 2 * n).param("member", i as f64))
        })
        .collect();
    let rinv = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let rinv = VerificationReport::assemble("trace-time-rinv", rinv, Tolerances::upper(1.0, 0.0));
    Ok(VerificationReport::combine("trace-time", vec![ratios, rinv]).meta("besov_order", rho.to_string()))
}

/// `d/dy` along the last (half-line) axis by second-order differences.
fn y_derivative(u: &SpaceTimeField) -> Result<SpaceTimeField> {
    let y = *u.axes().last().unwrap();
    let (ny, h) = (y.n, y.step());
    let mut out = vec![0.0; u.values().len()];
    for (col, o) in u.values().chunks(ny).zip(out.chunks_mut(ny)) {
        o[0] = (-3.0 * col[0] + 4.0 * col[1] - col[2]) / (2.0 * h);
        for j in 1..ny - 1 {
            o[j] = (col[j + 1] - col[j - 1]) / (2.0 * h);
        }
        o[ny - 1] = (3.0 * col[ny - 1] - 4.0 * col[ny - 2] + col[ny - 3]) / (2.0 * h);
    }
    u.with_values(out)
}

/// `|u|_{H^s(L_p)} + sum_j |d_y^j (1 - Laplacian_{x'})^{(K-j)/2} u|_{L_{p,mu}(L_p)}`, `K = 2ms`.
fn half_space_norm(u: &SpaceTimeField, s: f64, big_k: usize, wp: WeightParams) -> Result<f64> {
    let mut total = mixed_norm(u, s, 0.0, wp, Periodization::Periodic)?.value;
    let mut dy = u.clone();
    for j in 0..=big_k {
        let e = (big_k - j) as f64 / 2.0;
        let lifted = apply_along_axis(&dy, 0, move |xi| Complex64::new((1.0 + xi * xi).powf(e), 0.0))?;
        total += weighted_lp_norm(&lifted.as_time_function(wp.p())?, wp)?.value;
        if j < big_k {
            dy = y_derivative(&dy)?;
        }
    }
    Ok(total)
}

/// Depth of the truncated half-space and the normal steps of the two levels.
const Y_DEPTH: f64 = 12.0;
const Y_STEP: f64 = 0.02;

fn spatial_suite(q: &TraceQuery, a: f64, b: f64, ens: &TraceEnsemble) -> Result<VerificationReport> {
    let wp = q.weight()?;
    let m = q.m;
    let big_k = (2.0 * m as f64 * q.s).round() as usize;
    let op = SumOperatorSpec::parabolic(m)?;
    let sides = |g: &BandLimited2D, kind: bool, level: usize| -> Result<(f64, f64)> {
        let nt = 16 << level;
        let h = Y_STEP / (1 << level) as f64;
        let y = SpatialAxis::half_line((Y_DEPTH / h).round() as usize, h)?;
        let gs = g.sample(nt, nt)?;
        let u = if kind {
            trace_y0_rightinverse(&gs, &op, m, y)?
        } else {
            let ny = y.n;
            let mut values = Vec::with_capacity(gs.values().len() * ny);
            for v in gs.values() {
                values.extend((0..ny).map(|j| v * (-y.node(j)).exp()));
            }
            let mut axes = gs.axes().to_vec();
            axes.push(y);
            SpaceTimeField::new(gs.tgrid_arc().clone(), axes, values)?
        };
        let tr = trace_y0(&u)?;
        let per = Periodization::Periodic;
        let lhs = mixed_norm(&tr, a, 0.0, wp, per)?.value + mixed_norm(&tr, 0.0, b, wp, per)?.value;
        Ok((lhs, half_space_norm(&u, q.s, big_k, wp)?))
    };
    let jobs: Vec<(usize, bool)> = (0..ens.g.len()).flat_map(|i| [(i, true), (i, false)]).collect();
    let rows: Vec<Result<Instance>> = jobs
        .par_iter()
        .map(|&(i, kind)| {
            let (l, r) = sides(&ens.g[i], kind, 1)?;
            let (lc, rc) = sides(&ens.g[i], kind, 0)?;
            Ok(Instance::new(l, r, 32)
                .param("member", i as f64)
                .param("rinv", kind as u8 as f64)
                .with_drift(drift(l / r, lc / rc)))
        })
        .collect();
    let ratios = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let ratios =
        VerificationReport::assemble("trace-space-ratio", ratios, Tolerances::upper(TRACE_RATIO_CEILING, DRIFT_TOL));

    // trace_y0 o rinv = id on a thin layer
    let rows: Vec<Result<Instance>> = ens
        .g
        .par_iter()
        .enumerate()
        .map(|(i, g)| {
            let gs = g.sample(32, 32)?;
            let u = trace_y0_rightinverse(&gs, &op, m, SpatialAxis::half_line(4, 1e-3)?)?;
            let tr = trace_y0(&u)?;
            let scale = gs.values().iter().fold(0.0f64, |a, x| a.max(x.abs()));
            let err = tr.values().iter().zip(gs.values()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs())) / scale;
            Ok(Instance::new(err, RIGHT_INVERSE_TOL, 32).param("member", i as f64))
        })
        .collect();
    let rinv = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let rinv = VerificationReport::assemble("trace-space-rinv", rinv, Tolerances::upper(1.0, 0.0));
    Ok(VerificationReport::combine("trace-space", vec![ratios, rinv])
        .meta("trace_time_order", a.to_string())
        .meta("trace_space_order", b.to_string()))
}

/// Trace norm ratios with one refinement and the right-inverse identity for
/// the query's variant.
pub fn run_trace_suites(q: &TraceQuery, ensemble: &TraceEnsemble) -> Result<VerificationReport> {
    let report = match trace_space_order(q)? {
        TraceOrder::Temporal(rho) => temporal_suite(q, rho, ensemble)?,
        TraceOrder::Spatial(a, b) => spatial_suite(q, a, b, ensemble)?,
    };
    Ok(report.meta("p", q.p.to_string()).meta("mu", q.mu.to_string()).meta("variant", format!("{:?}", q.variant)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Verdict;

    #[test]
    fn temporal_reference_case() {
        let q = TraceQuery::temporal(2.0, 1.0, 0.0, 0, 1.0, 0.0, 2.0);
        let r = run_trace_suites(&q, &TraceEnsemble::standard(3, 4, 64)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{} {} {:?}", r.worst_ratio, r.refinement_drift, r.notes);
    }

    #[test]
    fn spatial_reference_case() {
        let q = TraceQuery::spatial(2.0, 1.0, 1.0, 1);
        let r = run_trace_suites(&q, &TraceEnsemble::standard(3, 2, 64)).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{} {} {:?}", r.worst_ratio, r.refinement_drift, r.notes);
    }

    #[test]
    fn limit_and_integer_orders_refused() {
        let ens = TraceEnsemble::standard(3, 2, 32);
        let q = TraceQuery::temporal(2.0, 0.75, 0.75, 0, 1.0, 0.0, 2.0);
        assert!(matches!(run_trace_suites(&q, &ens), Err(Error::LimitExponent { .. })));
        let q = TraceQuery::temporal(3.0, 1.0, 0.0, 0, 1.0, 0.0, 2.0);
        assert!(matches!(run_trace_suites(&q, &ens), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn besov_norm_of_zero() {
        let x = SpatialSample::new(vec![SpatialAxis::periodic(8, 1.0).unwrap()], vec![0.0; 8]).unwrap();
        assert_eq!(besov_norm(&x, 1.0, WeightParams::new(2.0, 1.0).unwrap()).unwrap(), 0.0);
    }
}
