use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use aniso_core::grids::{
    make_graded_grid, sample_scalar, Grading, Grid1D, SampledFunction, SpatialAxis, TimeDomain, WeightParams,
};
use aniso_core::norms::{fractional_norm, weighted_lp_norm, Family, SpaceSpec};
use aniso_core::operators::{
    extend_general, extend_zero, fractional_apply, phi_mu, trace_rightinverse_s, trace_t0, trace_y0,
    trace_y0_rightinverse, Direction, FractionalOperatorSpec, Periodization, SumOperatorSpec,
};
use aniso_core::verify::ensembles::{band_limited_1d, band_limited_2d};
use aniso_core::verify::{
    battery_json, hardy_sides, modewise_ratio, run_battery, run_hardy_suite, run_interp_suite,
    run_mixed_derivative_suite, run_reference_suite, run_t_uniformity_sweep, run_trace_suites, trace_space_order,
    Ensemble, MixedParams, TraceEnsemble, TraceOrder, TraceQuery, Verdict, VerificationReport, SWEEP_T,
};
use aniso_core::Error;

const SEED: u64 = 20260101;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn wp(p: f64, mu: f64) -> WeightParams {
    WeightParams::new(p, mu).unwrap()
}

fn graded(len: f64, n: usize) -> Arc<Grid1D> {
    Arc::new(make_graded_grid(TimeDomain::finite(len).unwrap(), n, Grading::default()).unwrap())
}

fn uniform(len: f64, n: usize) -> Arc<Grid1D> {
    Arc::new(make_graded_grid(TimeDomain::finite(len).unwrap(), n, Grading::Uniform).unwrap())
}

fn passed(r: &VerificationReport) -> bool {
    r.verdict == Verdict::Pass
}

fn brief(r: &VerificationReport) -> String {
    format!("{} {:?} worst={:.4} drift={:.4}", r.suite, r.verdict, r.worst_ratio, r.refinement_drift)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

fn hardy() -> Outcome {
    let one = sample_scalar(|_| 1.0, graded(1.0, 256)).unwrap();
    let (l, r) = hardy_sides(&one, 1.0, 2.0).unwrap();
    let closed = (l - 2.0).abs() <= 1e-3 && (4.0 * r - 4.0).abs() <= 1e-3;
    let a = run_hardy_suite(wp(2.0, 1.0), &Ensemble::standard(SEED, 32, 1, 256), 1.0).unwrap();
    let b = run_hardy_suite(wp(3.0, 0.75), &Ensemble::standard(SEED, 32, 2, 256), 2.0).unwrap();
    outcome(
        closed && passed(&a) && passed(&b),
        format!("closed form {l:.6} <= {:.6}; {}; {}", 4.0 * r, brief(&a), brief(&b)),
    )
}

fn isometry() -> Outcome {
    let eps = 0.01;
    let mut worst = 0.0f64;
    for (p, mu) in [(2.0, 1.0), (2.0, 0.75), (4.0, 0.75 + eps)] {
        let w = wp(p, mu);
        for vanish in 0..3 {
            let ens = Ensemble::standard(SEED + vanish as u64, 16, vanish, 256);
            for i in 0..ens.len() {
                let u = ens.sample(i, 1.0, 256).unwrap();
                let a = weighted_lp_norm(&u, w).unwrap().value;
                let b = weighted_lp_norm(&phi_mu(&u, w, Direction::Forward).unwrap(), wp(p, 1.0)).unwrap().value;
                worst = worst.max((a - b).abs() / a.abs().max(f64::MIN_POSITIVE));
            }
        }
    }
    outcome(worst <= 1e-10, format!("max relative error {worst:.2e}"))
}

fn extension() -> Outcome {
    let mut exact = true;
    let ens = Ensemble::standard(SEED, 8, 0, 256);
    for i in 0..ens.len() {
        let u = ens.sample(i, 1.0, 256).unwrap();
        let n = u.len();
        exact &= extend_zero(&u, wp(2.0, 0.75)).unwrap().values()[..n] == *u.values();
        for k in 1..=3 {
            exact &= extend_general(&u, k).unwrap().values()[..n] == *u.values();
        }
    }
    let ens = Ensemble::standard(SEED, 8, 3, 128);
    let sweeps: Vec<VerificationReport> = [wp(2.0, 1.0), wp(2.0, 0.75)]
        .into_iter()
        .map(|w| run_t_uniformity_sweep("extend-zero", &SWEEP_T, w, &ens).unwrap())
        .collect();
    let uniform = sweeps.iter().all(|r| passed(r) && r.worst_ratio < 2.0);
    let d: Vec<String> = sweeps.iter().map(brief).collect();
    outcome(exact && uniform, format!("restriction exact: {exact}; {}", d.join("; ")))
}

fn trace_formula() -> Outcome {
    let mut affine = 0.0f64;
    for mu in [1.0, 0.75] {
        let w = wp(2.0, mu);
        for (c, b) in [(2.5, 0.0), (-1.0, 3.0), (0.3, -0.7)] {
            for t_end in [1.0, 4.0] {
                let u = sample_scalar(|t| c + b * t, graded(t_end, 64)).unwrap();
                for sigma in [t_end / 4.0, t_end / 2.0] {
                    affine = affine.max((trace_t0(&u, w, sigma).unwrap()[0] - c).abs());
                }
            }
        }
    }
    let gaussians = [(0.3, 0.4), (0.5, 0.3), (0.1, 0.5), (0.6, 0.6)];
    let levels = [32usize, 64, 128, 256];
    let mut slope = f64::INFINITY;
    for mu in [1.0, 0.75] {
        let w = wp(2.0, mu);
        for &(m, s) in &gaussians {
            let f = move |t: f64| (-((t - m) / s).powi(2)).exp();
            let pts: Vec<(f64, f64)> = levels
                .iter()
                .map(|&n| {
                    let u = sample_scalar(f, graded(1.0, n)).unwrap();
                    let e = (trace_t0(&u, w, 0.5).unwrap()[0] - f(0.0)).abs();
                    ((1.0 / n as f64).ln(), e.ln())
                })
                .collect();
            slope = slope.min(fit_slope(&pts));
        }
    }
    outcome(affine <= 1e-12 && slope >= 0.9, format!("affine error {affine:.2e}; min fitted exponent {slope:.3}"))
}

fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn right_inverses() -> Outcome {
    let w = wp(2.0, 1.0);
    let mut time_err = 0.0f64;
    let k_max = 6;
    for u0 in band_limited_1d(SEED, 6, k_max) {
        let x = u0.sample(32).unwrap();
        for m in [1, 2] {
            // horizon on the time scale of the stiffest mode
            let t_end = (1.0 + (k_max * k_max) as f64).powi(1 - m as i32);
            let v = trace_rightinverse_s(&x, m, graded(t_end, 128)).unwrap();
            let tr = trace_t0(&v.as_time_function(2.0).unwrap(), w, t_end / 1000.0).unwrap();
            time_err = time_err.max(max_diff(&tr, x.values()) / max_abs(x.values()));
        }
    }
    let mut space_err = 0.0f64;
    for g in band_limited_2d(SEED, 4, 3, 3) {
        let gs = g.sample(32, 32).unwrap();
        for m in [1, 2] {
            let op = SumOperatorSpec::parabolic(m).unwrap();
            let u = trace_y0_rightinverse(&gs, &op, m, SpatialAxis::half_line(4, 1e-3).unwrap()).unwrap();
            let tr = trace_y0(&u).unwrap();
            space_err = space_err.max(max_diff(tr.values(), gs.values()) / max_abs(gs.values()));
        }
    }
    outcome(time_err <= 1e-6 && space_err <= 1e-6, format!("time {time_err:.2e}; space {space_err:.2e}"))
}

fn fractional_algebra() -> Outcome {
    let period = 2.0 * std::f64::consts::PI;
    let g = uniform(period, 128);
    let mut law = 0.0f64;
    for b in band_limited_1d(SEED, 6, 8) {
        let u = sample_scalar(|t| b.eval(t), g.clone()).unwrap();
        for (a1, a2) in [(0.3, 0.5), (0.7, 0.9), (0.25, 1.5)] {
            let apply = |u: &SampledFunction, a: f64| {
                let spec = FractionalOperatorSpec::time_minus(a, 1.0).unwrap();
                fractional_apply(u, &spec, Periodization::Periodic).unwrap()
            };
            let first = apply(&u, a1);
            let ab = apply(&first, a2);
            let direct = apply(&u, a1 + a2);
            law = law.max(max_diff(ab.values(), direct.values()) / max_abs(direct.values()));
        }
    }
    // smooth members vanishing at both ends
    let ens = Ensemble::standard(SEED, 8, 2, 512);
    let w = wp(2.0, 1.0);
    let mut gap = 0.0f64;
    for i in 0..ens.len() {
        let u = ens.sample(i, 1.0, 512).unwrap().map_values(|t, v, o| o[0] = v[0] * (1.0 - t).powi(2)).unwrap();
        let h = fractional_norm(&u, &SpaceSpec::new(Family::H, 1.0, w).unwrap()).unwrap().value;
        let wn = fractional_norm(&u, &SpaceSpec::new(Family::W, 1.0, w).unwrap()).unwrap().value;
        gap = gap.max((h - wn).abs() / wn);
    }
    outcome(law <= 1e-10 && gap <= 0.01, format!("semigroup law {law:.2e}; H^1 vs W^1 {gap:.2e}"))
}

fn interpolation() -> Outcome {
    let a = run_interp_suite(wp(2.0, 1.0), 0.0, 1.0, 0.5, &Ensemble::standard(SEED, 32, 0, 128)).unwrap();
    let b = run_interp_suite(wp(2.0, 0.75), 0.0, 1.0, 0.5, &Ensemble::standard(SEED, 32, 1, 128)).unwrap();
    outcome(passed(&a) && passed(&b), format!("{}; {}", brief(&a), brief(&b)))
}

fn mixed() -> Outcome {
    let mut modewise = 0.0f64;
    for sigma in [0.0, 0.25, 0.5, 0.75, 1.0] {
        for kt in -32..=32 {
            for kx in 0..=32 {
                modewise = modewise.max(modewise_ratio(kt as f64, kx as f64, 1.0, 2.0, sigma));
            }
        }
    }
    let prm = MixedParams::new(0.0, 0.0, 1.0, 2.0, 0.5).unwrap();
    let r = run_mixed_derivative_suite(prm, wp(2.0, 1.0), &band_limited_2d(SEED, 8, 6, 6), 128).unwrap();
    outcome(modewise <= 1.0 && passed(&r), format!("max modewise {modewise:.6}; {}", brief(&r)))
}

fn trace_orders() -> Outcome {
    let a =
        trace_space_order(&TraceQuery::temporal(2.0, 1.0, 0.0, 0, 1.0, 0.0, 2.0)).unwrap() == TraceOrder::Temporal(1.0);
    let mut b = true;
    for (p, mu) in [(2.0, 1.0), (2.0, 0.75), (3.0, 0.5), (4.0, 0.9), (1.5, 0.8)] {
        for m in 1..=3 {
            let target = 2.0 * m as f64 * (mu - 1.0 / p);
            b &= match trace_space_order(&TraceQuery::lg73(p, mu, 1.0, 0.0, 2.0 * m as f64)) {
                Ok(TraceOrder::Temporal(o)) => (o - target).abs() <= 1e-14,
                _ => false,
            };
        }
    }
    let c = trace_space_order(&TraceQuery::spatial(2.0, 1.0, 1.0, 1)).unwrap() == TraceOrder::Spatial(0.75, 1.5);
    outcome(a && b && c, format!("(a) {a} (b) {b} (c) {c}"))
}

fn trace_suites() -> Outcome {
    let time = run_reference_suite("trace-time", SEED).unwrap();
    let space = run_reference_suite("trace-space", SEED).unwrap();
    let ens = TraceEnsemble::standard(SEED, 2, 32);
    let mut rejected = true;
    for (p, mu, k) in [(2.0, 1.0, 0usize), (2.0, 0.75, 0), (3.0, 0.8, 0), (2.0, 1.0, 1)] {
        let s = k as f64 + 1.0 - mu + 1.0 / p;
        let q = TraceQuery::temporal(p, mu, s, k, 1.0, 0.0, 2.0);
        rejected &= matches!(trace_space_order(&q), Err(Error::LimitExponent { .. }));
        rejected &= matches!(run_trace_suites(&q, &ens), Err(Error::LimitExponent { .. }));
    }
    let finite = time.worst_ratio.is_finite() && space.worst_ratio.is_finite();
    outcome(
        passed(&time) && passed(&space) && finite && rejected,
        format!("{}; {}; limits rejected: {rejected}", brief(&time), brief(&space)),
    )
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let a = battery_json(&run_battery(SEED).unwrap(), SEED);
    let b = battery_json(&run_battery(SEED).unwrap(), SEED);
    let per_run = start.elapsed().as_secs_f64() / 2.0;
    outcome(a == b && per_run <= 600.0, format!("identical: {}; {} bytes; {per_run:.1} s per battery", a == b, a.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("hardy sharp constant", hardy),
        ("phi_mu isometry", isometry),
        ("extension operators", extension),
        ("averaged trace formula", trace_formula),
        ("right inverses", right_inverses),
        ("fractional-power algebra", fractional_algebra),
        ("interpolation identity", interpolation),
        ("mixed-derivative embedding", mixed),
        ("trace-space orders", trace_orders),
        ("trace norm suites", trace_suites),
        ("battery determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
