//! Dependence of measured operator norms on the length of the time interval.

use rayon::prelude::*;

use super::ensembles::Ensemble;
use super::report::{Instance, Tolerances, Verdict, VerificationReport};
use crate::error::{Error, Result};
use crate::grids::{SampledFunction, WeightParams};
use crate::norms::{check_vanishing_traces, fractional_norm, Family, SpaceSpec};
use crate::operators::{extend_general, extend_zero};

/// Largest admissible `max_T / min_T` of the worst ratios.
pub const VARIATION_BOUND: f64 = 2.0;
pub const SWEEP_ORDERS: [f64; 5] = [0.0, 0.5, 1.0, 1.5, 2.0];
/// Reflection order of `E_J` in the informational leg.
const REFLECTION_ORDER: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    Identity,
    ExtendZero,
    Extend,
}

impl Op {
    fn parse(name: &str) -> Result<Self> {
        match name {
            "identity" => Ok(Op::Identity),
            "extend-zero" | "extend_zero" => Ok(Op::ExtendZero),
            "extend" => Ok(Op::Extend),
            _ => Err(Error::InvalidParameter(format!(
                "suite {name:?} has no vanishing-trace variant; use identity, extend-zero or extend"
            ))),
        }
    }

    fn apply(self, u: &SampledFunction, wp: WeightParams) -> Result<SampledFunction> {
        match self {
            Op::Identity => Ok(u.clone()),
            Op::ExtendZero => extend_zero(u, wp),
            Op::Extend => extend_general(u, REFLECTION_ORDER),
        }
    }
}

/// Full `W^s` norm: `|u|_{L_{p,mu}}` plus the top-order seminorm.
fn norm(u: &SampledFunction, s: f64, wp: WeightParams) -> Result<f64> {
    let family = if s == 0.0 { Family::L } else { Family::W };
    Ok(fractional_norm(u, &SpaceSpec::new(family, s, wp)?)?.value)
}

/// Worst `|Op u| / |u|` in `_0W^s` over the ensemble on `(0, T)`.
fn worst_ratio(op: Op, s: f64, t_end: f64, wp: WeightParams, ens: &Ensemble, n: usize) -> Result<f64> {
    let ratios: Vec<Result<f64>> = (0..ens.len())
        .into_par_iter()
        .map(|i| {
            let u = ens.sample(i, t_end, n)?;
            check_vanishing_traces(&u, s, wp)?;
            let v = op.apply(&u, wp)?;
            Ok(norm(&v, s, wp)? / norm(&u, s, wp)?)
        })
        .collect();
    ratios.into_iter().try_fold(0.0f64, |a, r| Ok(a.max(r?)))
}

fn variation(xs: &[f64]) -> f64 {
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    hi / lo
}

/// Reruns the operator-norm measurement of `suite` at every `T` with the
/// ensemble rescaled to `(0, T)`; one instance per order `s` with
/// `ratio = max_T / min_T`. Suites: `identity`, `extend-zero`, and the
/// informational `extend`.
pub fn run_t_uniformity_sweep(
    suite: &str,
    t_values: &[f64],
    wp: WeightParams,
    ensemble: &Ensemble,
) -> Result<VerificationReport> {
    let op = Op::parse(suite)?;
    if t_values.is_empty() || t_values.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidParameter(format!("T values must be positive, got {t_values:?}")));
    }
    let n = ensemble.n;
    let mut instances = Vec::new();
    for s in SWEEP_ORDERS {
        let fine = t_values.iter().map(|&t| worst_ratio(op, s, t, wp, ensemble, n)).collect::<Result<Vec<_>>>()?;
        let coarse =
            t_values.iter().map(|&t| worst_ratio(op, s, t, wp, ensemble, n / 2)).collect::<Result<Vec<_>>>()?;
        let (hi, lo) = (fine.iter().cloned().fold(0.0, f64::max), fine.iter().cloned().fold(f64::INFINITY, f64::min));
        let (v, vc) = (variation(&fine), variation(&coarse));
        let mut inst = Instance::new(hi, lo, n).param("s", s).with_drift((v - vc).abs() / v);
        for (t, r) in t_values.iter().zip(&fine) {
            inst = inst.param(&format!("worst@T={t}"), *r);
        }
        instances.push(inst);
    }
    let mut report = VerificationReport::assemble(
        &format!("t-sweep-{suite}"),
        instances,
        Tolerances::upper(VARIATION_BOUND, f64::INFINITY),
    );
    if op == Op::Extend {
        let worst = report.worst_ratio;
        report.notes.push(format!(
            "informational: T-independence is only claimed for the vanishing-trace extension; variation {worst:.3}"
        ));
        report.verdict = Verdict::Pass;
    }
    Ok(report.meta("p", wp.p().to_string()).meta("mu", wp.mu().to_string()).meta("T_values", format!("{t_values:?}")))
}
