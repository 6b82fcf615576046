//! The reference battery: every suite at its reference parameters.

use super::embedding::{run_buc_suite, run_embedding_suite};
use super::ensembles::{band_limited_2d, Ensemble};
use super::hardy::{run_hardy_suite, run_poincare_suite};
use super::interp::run_interp_suite;
use super::mixed::{run_mixed_derivative_suite, MixedParams};
use super::predicates::{EmbeddingQuery, EmbeddingVariant, TraceQuery};
use super::report::{Verdict, VerificationReport};
use super::sweep::run_t_uniformity_sweep;
use super::traces::{run_trace_suites, TraceEnsemble};
use crate::error::{Error, Result};
use crate::grids::WeightParams;

pub const SUITES: [&str; 8] =
    ["hardy", "poincare", "embedding", "mixed", "trace-time", "trace-space", "interp", "t-sweep"];

/// Caps the worker threads of the battery; `0` means automatic.
pub const THREADS_ENV: &str = "ANISO_THREADS";

pub const SWEEP_T: [f64; 3] = [0.1, 1.0, 10.0];

fn wp(p: f64, mu: f64) -> Result<WeightParams> {
    WeightParams::new(p, mu)
}

/// Runs `name` at its reference parameters with ensembles drawn from `seed`.
pub fn run_reference_suite(name: &str, seed: u64) -> Result<VerificationReport> {
    let report = match name {
        "hardy" => VerificationReport::combine(
            "hardy",
            vec![
                run_hardy_suite(wp(2.0, 1.0)?, &Ensemble::standard(seed, 32, 1, 256), 1.0)?,
                run_hardy_suite(wp(3.0, 0.75)?, &Ensemble::standard(seed, 32, 2, 256), 2.0)?,
            ],
        ),
        "poincare" => {
            run_poincare_suite(wp(2.0, 1.0)?, &[0.5, 1.0, 2.0, 4.0], &Ensemble::standard(seed, 16, 1, 128), 0.5)?
        }
        "embedding" => {
            let q = EmbeddingQuery::new(2.0, 4.0, 1.0, 0.8, 0.5, EmbeddingVariant::WeightedTarget)?;
            let w = EmbeddingQuery::new(2.0, 4.0, 1.0, 0.6, 0.5, EmbeddingVariant::UnweightedTarget)?;
            VerificationReport::combine(
                "embedding",
                vec![
                    run_embedding_suite(&q, &Ensemble::standard(seed, 32, 0, 256))?,
                    run_embedding_suite(&w, &Ensemble::standard(seed, 4, 0, 256))?,
                    run_buc_suite(wp(2.0, 1.0)?, 0.8, &Ensemble::standard(seed, 16, 0, 256))?,
                ],
            )
        }
        "mixed" => {
            let prm = MixedParams::new(0.0, 0.0, 1.0, 2.0, 0.5)?;
            run_mixed_derivative_suite(prm, wp(2.0, 1.0)?, &band_limited_2d(seed, 8, 6, 6), 128)?
        }
        "trace-time" => {
            let ens = TraceEnsemble::standard(seed, 4, 64);
            let qs = [
                TraceQuery::temporal(2.0, 1.0, 0.0, 0, 1.0, 0.0, 2.0),
                TraceQuery::temporal(2.0, 1.0, 1.0, 1, 1.0, 0.0, 2.0),
                TraceQuery::temporal(3.0, 0.8, 0.3, 0, 1.0, 0.5, 2.0),
                TraceQuery::lg73(2.0, 1.0, 1.0, 0.0, 2.0),
                TraceQuery::lg74(2.0, 1.0, 0.2, 0.0, 2.0),
            ];
            let parts = qs.iter().map(|q| run_trace_suites(q, &ens)).collect::<Result<Vec<_>>>()?;
            VerificationReport::combine("trace-time", parts)
        }
        "trace-space" => {
            let ens = TraceEnsemble::standard(seed, 2, 64);
            let qs = [TraceQuery::spatial(2.0, 1.0, 1.0, 1), TraceQuery::spatial(2.0, 0.75, 0.5, 1)];
            let parts = qs.iter().map(|q| run_trace_suites(q, &ens)).collect::<Result<Vec<_>>>()?;
            VerificationReport::combine("trace-space", parts)
        }
        "interp" => VerificationReport::combine(
            "interp",
            vec![
                run_interp_suite(wp(2.0, 1.0)?, 0.0, 1.0, 0.5, &Ensemble::standard(seed, 32, 0, 128))?,
                run_interp_suite(wp(2.0, 0.75)?, 0.0, 1.0, 0.5, &Ensemble::standard(seed, 32, 1, 128))?,
            ],
        ),
        "t-sweep" => {
            let ens = Ensemble::standard(seed, 8, 3, 128);
            VerificationReport::combine(
                "t-sweep",
                vec![
                    run_t_uniformity_sweep("identity", &SWEEP_T, wp(2.0, 1.0)?, &ens)?,
                    run_t_uniformity_sweep("extend-zero", &SWEEP_T, wp(2.0, 1.0)?, &ens)?,
                    run_t_uniformity_sweep("extend-zero", &SWEEP_T, wp(2.0, 0.75)?, &ens)?,
                    run_t_uniformity_sweep("extend", &SWEEP_T, wp(2.0, 1.0)?, &ens)?,
                ],
            )
        }
        _ => return Err(Error::InvalidParameter(format!("unknown suite {name:?}; expected one of {SUITES:?}"))),
    };
    Ok(report.meta("seed", seed.to_string()))
}

fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => {
            v.trim().parse::<usize>().ok().map(|n| (n > 0).then_some(n)).ok_or_else(|| {
                Error::InvalidParameter(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))
            })
        }
        Err(_) => Ok(None),
    }
}

/// All reference suites in a fixed order. Results do not depend on the
/// number of threads.
pub fn run_battery(seed: u64) -> Result<Vec<VerificationReport>> {
    let run = || SUITES.iter().map(|s| run_reference_suite(s, seed)).collect::<Result<Vec<_>>>();
    match thread_cap()? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

/// Canonical JSON of a battery run.
pub fn battery_json(reports: &[VerificationReport], seed: u64) -> String {
    let verdict = reports.iter().fold(Verdict::Pass, |v, r| match (v, r.verdict) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
        _ => Verdict::Pass,
    });
    let v = serde_json::json!({
        "seed": seed.to_string(),
        "verdict": verdict.as_str(),
        "reports": reports.iter().map(VerificationReport::to_json).collect::<Vec<_>>(),
    });
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}
