//! The `verify` subcommand.

use std::path::PathBuf;

use aniso_core::grids::WeightParams;
use aniso_core::verify::ensembles::band_limited_2d;
use aniso_core::verify::{
    battery_json, run_battery, run_buc_suite, run_embedding_suite, run_hardy_suite, run_interp_suite,
    run_mixed_derivative_suite, run_poincare_suite, run_reference_suite, run_t_uniformity_sweep, run_trace_suites,
    EmbeddingQuery, EmbeddingVariant, Ensemble, MixedParams, TraceEnsemble, TraceQuery, TraceVariant, Verdict,
    VerificationReport, SUITES,
};
use aniso_core::VERSION;
use clap::Args;

use crate::commands::emit;
use crate::config::Params;
use crate::render::render_text;
use crate::{CliError, ParamArgs, EXIT_FAIL, EXIT_INCONCLUSIVE};

/// Instance rows shown in the terminal summary.
const SUMMARY_ROWS: usize = 20;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// hardy, poincare, embedding, mixed, trace-time, trace-space, interp,
    /// t-sweep, or battery for all of them at reference parameters.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON output path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

pub fn exit_for(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

/// Stamps version, seed and resolution into the artifact.
pub fn finalize(r: VerificationReport, seed: u64, resolution: usize) -> VerificationReport {
    r.meta("version", VERSION).meta("seed", seed.to_string()).meta("resolution", resolution.to_string())
}

fn weight(p: &mut Params) -> Result<WeightParams, CliError> {
    Ok(WeightParams::new(p.f64_or("p", 2.0)?, p.f64_or("mu", 1.0)?)?)
}

/// One run of `suite` with the parameters in `p`; unspecified keys take
/// the first reference configuration.
fn configured(suite: &str, seed: u64, p: &mut Params) -> Result<(VerificationReport, usize), CliError> {
    Ok(match suite {
        "hardy" => {
            let wp = weight(p)?;
            let s = p.f64_or("s", 1.0)?;
            let n = p.usize_or("n", 256)?;
            let ens = Ensemble::standard(seed, p.usize_or("size", 32)?, p.usize_or("vanish", 1)?, n);
            (run_hardy_suite(wp, &ens, s)?, n)
        }
        "poincare" => {
            let wp = weight(p)?;
            let s = p.f64_or("s", 0.5)?;
            let ts = p.f64_list_or("T", &[0.5, 1.0, 2.0, 4.0])?;
            let n = p.usize_or("n", 128)?;
            let ens = Ensemble::standard(seed, p.usize_or("size", 16)?, p.usize_or("vanish", 1)?, n);
            (run_poincare_suite(wp, &ts, &ens, s)?, n)
        }
        "embedding" => {
            let wp = weight(p)?;
            let n = p.usize_or("n", 256)?;
            let size = p.usize_or("size", 32)?;
            match p.str_or("mode", "embedding").as_str() {
                "embedding" => {
                    let variant = match p.str_or("variant", "weighted").as_str() {
                        "weighted" => EmbeddingVariant::WeightedTarget,
                        "unweighted" => EmbeddingVariant::UnweightedTarget,
                        v => return Err(CliError::Usage(format!("variant must be weighted or unweighted, got {v:?}"))),
                    };
                    let q = EmbeddingQuery::new(
                        wp.p(),
                        p.f64_or("q", 4.0)?,
                        wp.mu(),
                        p.f64_or("s", 0.8)?,
                        p.f64_or("tau", 0.5)?,
                        variant,
                    )?;
                    (run_embedding_suite(&q, &Ensemble::standard(seed, size, 0, n))?, n)
                }
                "buc" => (run_buc_suite(wp, p.f64_or("s", 0.8)?, &Ensemble::standard(seed, size, 0, n))?, n),
                m => return Err(CliError::Usage(format!("mode must be embedding or buc, got {m:?}"))),
            }
        }
        "mixed" => {
            let wp = weight(p)?;
            let prm = MixedParams::new(
                p.f64_or("s", 0.0)?,
                p.f64_or("r", 0.0)?,
                p.f64_or("alpha", 1.0)?,
                p.f64_or("beta", 2.0)?,
                p.f64_or("sigma", 0.5)?,
            )?;
            let count = p.usize_or("count", 8)?;
            let (kt, kx) = (p.usize_or("kt_max", 6)? as i32, p.usize_or("kx_max", 6)? as i32);
            let coarse = p.usize_or("coarse", 128)?;
            (run_mixed_derivative_suite(prm, wp, &band_limited_2d(seed, count, kt, kx), coarse)?, 2 * coarse)
        }
        "trace-time" => {
            let (pp, mu) = (p.f64_or("p", 2.0)?, p.f64_or("mu", 1.0)?);
            let (s, r, beta) = (p.f64_or("s", 0.0)?, p.f64_or("r", 0.0)?, p.f64_or("beta", 2.0)?);
            let q = match TraceVariant::parse(&p.str_or("variant", "temporal"))? {
                TraceVariant::Temporal => {
                    TraceQuery::temporal(pp, mu, s, p.usize_or("k", 0)?, p.f64_or("alpha", 1.0)?, r, beta)
                }
                TraceVariant::TemporalLg73 => TraceQuery::lg73(pp, mu, p.f64_or("alpha", 1.0)?, r, beta),
                TraceVariant::TemporalLg74 => TraceQuery::lg74(pp, mu, s, r, beta),
                TraceVariant::Spatial => {
                    return Err(CliError::Usage("use --suite trace-space for the spatial trace".into()))
                }
            };
            let n = p.usize_or("n", 64)?;
            (run_trace_suites(&q, &TraceEnsemble::standard(seed, p.usize_or("count", 4)?, n))?, 2 * n)
        }
        "trace-space" => {
            let q = TraceQuery::spatial(
                p.f64_or("p", 2.0)?,
                p.f64_or("mu", 1.0)?,
                p.f64_or("s", 1.0)?,
                p.usize_or("m", 1)?,
            );
            (run_trace_suites(&q, &TraceEnsemble::standard(seed, p.usize_or("count", 2)?, 64))?, 32)
        }
        "interp" => {
            let wp = weight(p)?;
            let (s1, s2, theta) = (p.f64_or("s1", 0.0)?, p.f64_or("s2", 1.0)?, p.f64_or("theta", 0.5)?);
            let n = p.usize_or("n", 128)?;
            let ens = Ensemble::standard(seed, p.usize_or("size", 32)?, p.usize_or("vanish", 0)?, n);
            (run_interp_suite(wp, s1, s2, theta, &ens)?, n)
        }
        "t-sweep" => {
            let op = p.str_or("operator", "extend-zero");
            let ts = p.f64_list_or("T", &[0.1, 1.0, 10.0])?;
            let wp = weight(p)?;
            let n = p.usize_or("n", 128)?;
            let ens = Ensemble::standard(seed, p.usize_or("size", 8)?, p.usize_or("vanish", 3)?, n);
            (run_t_uniformity_sweep(&op, &ts, wp, &ens)?, n)
        }
        other => {
            return Err(CliError::Usage(format!("unknown suite {other:?}; expected one of {SUITES:?} or battery")))
        }
    })
}

pub fn verify(a: VerifyArgs) -> Result<u8, CliError> {
    let mut p = Params::load(a.params.params.as_deref())?.with_overrides(&a.params.set)?;
    if a.suite == "battery" {
        p.finish()?;
        let reports: Vec<VerificationReport> =
            run_battery(a.seed)?.into_iter().map(|r| r.meta("version", VERSION)).collect();
        for r in &reports {
            println!("{}", render_text(r, Some(0)).lines().take(2).collect::<Vec<_>>().join("\n"));
        }
        let json = battery_json(&reports, a.seed);
        if let Some(path) = &a.out {
            emit(Some(path), json.as_bytes())?;
        }
        let worst = reports.iter().map(|r| exit_for(r.verdict)).max().unwrap_or(0);
        // fail outranks inconclusive
        return Ok(if reports.iter().any(|r| r.verdict == Verdict::Fail) { EXIT_FAIL } else { worst });
    }
    let report = if p.is_empty() {
        if !SUITES.contains(&a.suite.as_str()) {
            return Err(CliError::Usage(format!("unknown suite {:?}; expected one of {SUITES:?} or battery", a.suite)));
        }
        run_reference_suite(&a.suite, a.seed)?.meta("version", VERSION).meta("resolution", "reference")
    } else {
        let (r, n) = configured(&a.suite, a.seed, &mut p)?;
        p.finish()?;
        finalize(r, a.seed, n)
    };
    print!("{}", render_text(&report, Some(SUMMARY_ROWS)));
    if let Some(path) = &a.out {
        emit(Some(path), report.to_json_string().as_bytes())?;
    }
    Ok(exit_for(report.verdict))
}
