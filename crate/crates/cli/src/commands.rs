//! norm, op, interp, sweep, oracle and report.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use aniso_core::grids::{
    make_graded_grid, Grading, SampledFunction, SpaceTimeField, SpatialAxis, TimeDomain, WeightParams,
};
use aniso_core::io::{
    read_field_csv, read_function_csv, read_spatial_csv, write_field_csv, write_function_csv, write_spatial_csv,
};
use aniso_core::norms::{fractional_norm, Family, NormResult, SpaceSpec};
use aniso_core::operators::{
    extend_general, extend_zero, fractional_apply, fractional_laplacian, phi_mu, trace_rightinverse_s, trace_t0,
    trace_y0, trace_y0_rightinverse, translate, Direction, FractionalKind, FractionalOperatorSpec, Periodization,
    SumOperatorSpec,
};
use aniso_core::oracle::{
    dense_weighted_lp, exact_weighted_lp, single_mode_interp_norm, validate_closed_form, ClosedForm,
};
use aniso_core::verify::{
    embeds, fmt_num, hardy_constant, poincare_constant, run_interp_suite, run_interp_suite_on, run_t_uniformity_sweep,
    trace_space_order, EmbeddingQuery, EmbeddingVariant, Ensemble, TraceOrder, TraceQuery, TraceVariant,
};
use aniso_core::VERSION;
use clap::Args;
use serde_json::{json, Map, Value};

use crate::config::Params;
use crate::render::{render_report, render_text, Format};
use crate::suites::{exit_for, finalize};
use crate::{CliError, ParamArgs};

fn params_of(args: &ParamArgs) -> Result<Params, CliError> {
    Params::load(args.params.as_deref())?.with_overrides(&args.set)
}

fn required(p: &mut Params, key: &str) -> Result<f64, CliError> {
    match p.take_str(key) {
        None => Err(CliError::Usage(format!("missing required parameter --{key}"))),
        Some(v) => v.parse().map_err(|_| CliError::Usage(format!("{key}: not a number: {v:?}"))),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))
}

fn header_of(path: &Path) -> Result<String, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))?;
    Ok(text.lines().find(|l| !l.trim_start().starts_with('#')).unwrap_or("").replace(' ', ""))
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Data(e.to_string())),
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn meta(resolution: Option<usize>, seed: Option<u64>) -> Value {
    let mut m = Map::new();
    m.insert("version".into(), Value::String(VERSION.into()));
    if let Some(r) = resolution {
        m.insert("resolution".into(), Value::String(r.to_string()));
    }
    if let Some(s) = seed {
        m.insert("seed".into(), Value::String(s.to_string()));
    }
    Value::Object(m)
}

fn resampled(u: SampledFunction, grid_n: Option<usize>) -> Result<SampledFunction, CliError> {
    match grid_n {
        None => Ok(u),
        Some(n) => {
            let g = make_graded_grid(u.grid().domain(), n, Grading::default())?;
            Ok(u.resample(Arc::new(g))?)
        }
    }
}

fn norm_json(r: &NormResult) -> Value {
    let comps: Map<String, Value> = r.components.iter().map(|(k, v)| (k.clone(), Value::String(fmt_num(*v)))).collect();
    json!({
        "value": fmt_num(r.value),
        "resolution": r.resolution.to_string(),
        "est_error": fmt_num(r.est_error),
        "components": comps,
    })
}

#[derive(Args, Debug)]
pub struct NormArgs {
    /// L, W, H, W0, H0 or B.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// CSV with header `t,v1..vd`.
    #[arg(long)]
    input: PathBuf,
    /// Resample onto a graded grid with this many bulk cells.
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    /// JSON output path.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

pub fn norm(a: NormArgs) -> Result<u8, CliError> {
    let mut p = params_of(&a.params)?;
    p.set_if("family", a.family);
    p.set_if("s", a.s);
    p.set_if("p", a.p);
    p.set_if("mu", a.mu);
    let family = p.take_str("family").ok_or_else(|| CliError::Usage("missing required parameter --family".into()))?;
    let family = Family::parse(&family)?;
    let s = p.f64_or("s", 0.0)?;
    let wp = WeightParams::new(required(&mut p, "p")?, p.f64_or("mu", 1.0)?)?;
    p.finish()?;
    let u = resampled(read_function_csv(open(&a.input)?)?, a.grid_n)?;
    let r = fractional_norm(&u, &SpaceSpec::new(family, s, wp)?)?;
    let mut line = format!(
        "{family:?}^{s} norm = {} (resolution {}, est_error {})",
        fmt_num(r.value),
        r.resolution,
        fmt_num(r.est_error)
    );
    for (k, v) in &r.components {
        line.push_str(&format!("\n  {k} = {}", fmt_num(*v)));
    }
    println!("{line}");
    if let Some(path) = &a.report {
        let mut v = norm_json(&r);
        v["family"] = json!(format!("{family:?}"));
        v["s"] = json!(fmt_num(s));
        v["p"] = json!(fmt_num(wp.p()));
        v["mu"] = json!(fmt_num(wp.mu()));
        v["meta"] = meta(Some(u.len()), None);
        emit(Some(path), json_text(&v).as_bytes())?;
    }
    Ok(0)
}

#[derive(Args, Debug)]
pub struct OpArgs {
    /// phi-mu, extend0, extend, translate, fracderiv, laplacian, trace-t0,
    /// trace-y0, rinv-S or rinv-y0.
    #[arg(long)]
    name: String,
    /// Input CSV (function, field or spatial sample, by operator).
    #[arg(long)]
    input: PathBuf,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// forward or inverse (phi-mu).
    #[arg(long)]
    direction: Option<String>,
    /// Reflection order (extend).
    #[arg(long)]
    k: Option<usize>,
    /// Shift (translate).
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    order: Option<f64>,
    #[arg(long)]
    shift: Option<f64>,
    /// minus or plus (fracderiv).
    #[arg(long)]
    kind: Option<String>,
    /// reflect, zero or periodic (fracderiv).
    #[arg(long)]
    periodization: Option<String>,
    /// Averaging radius (trace-t0); defaults to T/2.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    /// Time horizon (rinv-S).
    #[arg(long = "t-end")]
    t_end: Option<f64>,
    /// Bulk time cells (rinv-S).
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    /// Normal nodes and step (rinv-y0).
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    h: Option<f64>,
    #[command(flatten)]
    params: ParamArgs,
}

enum OpOut {
    Function(SampledFunction),
    Field(SpaceTimeField),
    Spatial(aniso_core::grids::SpatialSample),
    Vector(Vec<f64>),
}

fn weight(p: &mut Params) -> Result<WeightParams, CliError> {
    Ok(WeightParams::new(p.f64_or("p", 2.0)?, p.f64_or("mu", 1.0)?)?)
}

fn periodization(s: &str) -> Result<Periodization, CliError> {
    match s {
        "reflect" => Ok(Periodization::ExtendReflectLeft),
        "zero" => Ok(Periodization::ExtendZeroLeft),
        "periodic" => Ok(Periodization::Periodic),
        _ => Err(CliError::Usage(format!("periodization must be reflect, zero or periodic, got {s:?}"))),
    }
}

fn apply_op(name: &str, input: &Path, p: &mut Params) -> Result<OpOut, CliError> {
    let function = || -> Result<SampledFunction, CliError> { Ok(read_function_csv(open(input)?)?) };
    let field = || -> Result<SpaceTimeField, CliError> { Ok(read_field_csv(open(input)?)?) };
    Ok(match name {
        "phi-mu" => {
            let wp = weight(p)?;
            let dir = match p.str_or("direction", "forward").as_str() {
                "forward" => Direction::Forward,
                "inverse" => Direction::Inverse,
                d => return Err(CliError::Usage(format!("direction must be forward or inverse, got {d:?}"))),
            };
            OpOut::Function(phi_mu(&function()?, wp, dir)?)
        }
        "extend0" => {
            let wp = weight(p)?;
            OpOut::Function(extend_zero(&function()?, wp)?)
        }
        "extend" => {
            let k = p.usize_or("k", 2)?;
            OpOut::Function(extend_general(&function()?, k)?)
        }
        "translate" => {
            let t0 = p.f64_or("t0", 0.0)?;
            OpOut::Function(translate(&function()?, t0)?)
        }
        "fracderiv" => {
            let kind = match p.str_or("kind", "minus").as_str() {
                "minus" => FractionalKind::TimeDerivMinus,
                "plus" => FractionalKind::TimeDerivPlus,
                k => return Err(CliError::Usage(format!("kind must be minus or plus, got {k:?}"))),
            };
            let spec = FractionalOperatorSpec::new(kind, required(p, "order")?, p.f64_or("shift", 1.0)?)?;
            let per = periodization(&p.str_or("periodization", "reflect"))?;
            OpOut::Function(fractional_apply(&function()?, &spec, per)?)
        }
        "laplacian" => {
            let spec = FractionalOperatorSpec::laplacian(required(p, "order")?, p.f64_or("shift", 1.0)?)?;
            OpOut::Field(fractional_laplacian(&field()?, &spec)?)
        }
        "trace-t0" => {
            let wp = weight(p)?;
            let sigma = p.take_str("sigma");
            let sigma_of = |len: f64| -> Result<f64, CliError> {
                match &sigma {
                    None => Ok(len / 2.0),
                    Some(v) => v.parse().map_err(|_| CliError::Usage(format!("sigma: not a number: {v:?}"))),
                }
            };
            if header_of(input)?.starts_with("t,x,") {
                let u = field()?;
                let tr = trace_t0(&u.as_time_function(wp.p())?, wp, sigma_of(u.tgrid().length())?)?;
                OpOut::Spatial(aniso_core::grids::SpatialSample::new(u.axes().to_vec(), tr)?)
            } else {
                let u = function()?;
                OpOut::Vector(trace_t0(&u, wp, sigma_of(u.grid().length())?)?)
            }
        }
        "trace-y0" => OpOut::Field(trace_y0(&field()?)?),
        "rinv-S" => {
            let m = p.usize_or("m", 1)?;
            let t_end = p.f64_or("t-end", 1.0)?;
            let n = p.usize_or("grid-n", 64)?;
            let g = make_graded_grid(TimeDomain::finite(t_end)?, n, Grading::default())?;
            let u0 = read_spatial_csv(open(input)?)?;
            OpOut::Field(trace_rightinverse_s(&u0, m, Arc::new(g))?)
        }
        "rinv-y0" => {
            let m = p.usize_or("m", 1)?;
            let y = SpatialAxis::half_line(p.usize_or("ny", 64)?, p.f64_or("h", 0.05)?)?;
            OpOut::Field(trace_y0_rightinverse(&field()?, &SumOperatorSpec::parabolic(m)?, m, y)?)
        }
        _ => return Err(CliError::Usage(format!("unknown operator {name:?}"))),
    })
}

pub fn op(a: OpArgs) -> Result<u8, CliError> {
    let mut p = params_of(&a.params)?;
    p.set_if("p", a.p);
    p.set_if("mu", a.mu);
    p.set_if("direction", a.direction);
    p.set_if("k", a.k);
    p.set_if("t0", a.t0);
    p.set_if("order", a.order);
    p.set_if("shift", a.shift);
    p.set_if("kind", a.kind);
    p.set_if("periodization", a.periodization);
    p.set_if("sigma", a.sigma);
    p.set_if("m", a.m);
    p.set_if("t-end", a.t_end);
    p.set_if("grid-n", a.grid_n);
    p.set_if("ny", a.ny);
    p.set_if("h", a.h);
    let out = apply_op(&a.name, &a.input, &mut p)?;
    p.finish()?;
    let mut buf = Vec::new();
    match out {
        OpOut::Function(u) => write_function_csv(&u, &mut buf)?,
        OpOut::Field(u) => write_field_csv(&u, &mut buf)?,
        OpOut::Spatial(x) => write_spatial_csv(&x, &mut buf)?,
        OpOut::Vector(v) => {
            let head: Vec<String> = (1..=v.len()).map(|c| format!("v{c}")).collect();
            let row: Vec<String> = v.iter().map(|x| fmt_num(*x)).collect();
            buf.extend(format!("{}\n{}\n", head.join(","), row.join(",")).bytes());
        }
    }
    emit(a.output.as_deref(), &buf)?;
    Ok(0)
}

#[derive(Args, Debug)]
pub struct InterpArgs {
    #[arg(long)]
    s1: Option<f64>,
    #[arg(long)]
    s2: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// `standard`, `standard0` (members vanishing at 0) or a directory of
    /// `t,v1` CSV files.
    #[arg(long, default_value = "standard")]
    ensemble: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON output path.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

fn csv_dir(dir: &Path) -> Result<Vec<SampledFunction>, CliError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Data(format!("cannot list {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Ok(read_function_csv(open(p)?)?)).collect()
}

pub fn interp(a: InterpArgs) -> Result<u8, CliError> {
    let mut p = params_of(&a.params)?;
    p.set_if("s1", a.s1);
    p.set_if("s2", a.s2);
    p.set_if("theta", a.theta);
    p.set_if("p", a.p);
    p.set_if("mu", a.mu);
    let (s1, s2, theta) = (p.f64_or("s1", 0.0)?, p.f64_or("s2", 1.0)?, p.f64_or("theta", 0.5)?);
    let wp = weight(&mut p)?;
    let size = p.usize_or("size", 32)?;
    let n = p.usize_or("n", 128)?;
    p.finish()?;
    let report = match a.ensemble.as_str() {
        "standard" | "standard0" => {
            let vanish = usize::from(a.ensemble == "standard0");
            run_interp_suite(wp, s1, s2, theta, &Ensemble::standard(a.seed, size, vanish, n))?
        }
        dir => run_interp_suite_on(&csv_dir(Path::new(dir))?, wp, s1, s2, theta)?,
    };
    let report = finalize(report, a.seed, n);
    print!("{}", render_text(&report, Some(20)));
    if let Some(path) = &a.report {
        emit(Some(path), report.to_json_string().as_bytes())?;
    }
    Ok(exit_for(report.verdict))
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// embeds, trace-order or t-uniformity.
    #[arg(long)]
    predicate: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV table (predicates) or JSON report (t-uniformity); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

fn product(lists: &[Vec<f64>]) -> Vec<Vec<f64>> {
    lists.iter().fold(vec![Vec::new()], |acc, l| {
        acc.into_iter().flat_map(|row| l.iter().map(move |x| [row.clone(), vec![*x]].concat())).collect()
    })
}

fn short(x: f64) -> String {
    format!("{x}")
}

pub fn sweep(a: SweepArgs) -> Result<u8, CliError> {
    let mut p = params_of(&a.params)?;
    match a.predicate.as_str() {
        "embeds" => {
            let keys = ["p", "q", "mu", "s", "tau"];
            let defaults: [&[f64]; 5] = [&[2.0], &[2.0, 4.0, 8.0], &[0.75, 1.0], &[0.5, 0.8, 1.2], &[0.0, 0.25, 0.5]];
            let lists = keys.iter().zip(defaults).map(|(k, d)| p.f64_list_or(k, d)).collect::<Result<Vec<_>, _>>()?;
            let variants = p.str_or("variant", "weighted,unweighted");
            p.finish()?;
            let mut out = String::from("p,q,mu,s,tau,variant,lhs,rhs,embeds\n");
            for v in variants.split(',').map(str::trim) {
                let variant = match v {
                    "weighted" => EmbeddingVariant::WeightedTarget,
                    "unweighted" => EmbeddingVariant::UnweightedTarget,
                    _ => return Err(CliError::Usage(format!("variant must be weighted or unweighted, got {v:?}"))),
                };
                for r in product(&lists) {
                    let cells: Vec<String> = r.iter().map(|x| short(*x)).collect();
                    let tail = match EmbeddingQuery::new(r[0], r[1], r[2], r[3], r[4], variant) {
                        Ok(q) => {
                            let (l, rr) = q.sides();
                            format!("{},{},{}", fmt_num(l), fmt_num(rr), embeds(&q))
                        }
                        Err(e) => format!("-,-,invalid: {}", e.to_string().replace(',', ";")),
                    };
                    out.push_str(&format!("{},{v},{tail}\n", cells.join(",")));
                }
            }
            emit(a.out.as_deref(), out.as_bytes())?;
            Ok(0)
        }
        "trace-order" => {
            let variant = TraceVariant::parse(&p.str_or("variant", "temporal"))?;
            let keys = ["p", "mu", "s", "k", "alpha", "r", "beta", "m"];
            let defaults: [&[f64]; 8] = [&[2.0], &[1.0], &[0.0], &[0.0], &[1.0], &[0.0], &[2.0], &[1.0]];
            let lists = keys.iter().zip(defaults).map(|(k, d)| p.f64_list_or(k, d)).collect::<Result<Vec<_>, _>>()?;
            p.finish()?;
            let mut out = String::from("variant,p,mu,s,k,alpha,r,beta,m,time_order,space_order,status\n");
            for r in product(&lists) {
                let (k, m) = (r[3] as usize, r[7] as usize);
                let q = match variant {
                    TraceVariant::Temporal => TraceQuery::temporal(r[0], r[1], r[2], k, r[4], r[5], r[6]),
                    TraceVariant::TemporalLg73 => TraceQuery::lg73(r[0], r[1], r[4], r[5], r[6]),
                    TraceVariant::TemporalLg74 => TraceQuery::lg74(r[0], r[1], r[2], r[5], r[6]),
                    TraceVariant::Spatial => TraceQuery::spatial(r[0], r[1], r[2], m),
                };
                let cells: Vec<String> = r.iter().map(|x| short(*x)).collect();
                let tail = match trace_space_order(&q) {
                    Ok(TraceOrder::Temporal(rho)) => format!("{},-,ok", fmt_num(rho)),
                    Ok(TraceOrder::Spatial(x, y)) => format!("{},{},ok", fmt_num(x), fmt_num(y)),
                    Err(e) => format!("-,-,{}", e.to_string().replace(',', ";")),
                };
                out.push_str(&format!("{variant:?},{},{tail}\n", cells.join(",")));
            }
            emit(a.out.as_deref(), out.as_bytes())?;
            Ok(0)
        }
        "t-uniformity" => {
            let op = p.str_or("operator", "extend-zero");
            let ts = p.f64_list_or("T", &[0.1, 1.0, 10.0])?;
            let wp = weight(&mut p)?;
            let (size, vanish, n) = (p.usize_or("size", 8)?, p.usize_or("vanish", 3)?, p.usize_or("n", 128)?);
            p.finish()?;
            let r = run_t_uniformity_sweep(&op, &ts, wp, &Ensemble::standard(a.seed, size, vanish, n))?;
            let r = finalize(r, a.seed, n);
            print!("{}", render_text(&r, Some(20)));
            if let Some(path) = &a.out {
                emit(Some(path), r.to_json_string().as_bytes())?;
            }
            Ok(exit_for(r.verdict))
        }
        other => {
            Err(CliError::Usage(format!("unknown predicate {other:?}; expected embeds, trace-order or t-uniformity")))
        }
    }
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    /// weighted-lp, hardy-constant, poincare-constant or single-mode.
    #[arg(long)]
    query: String,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// JSON output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
}

fn closed_form(p: &mut Params) -> Result<ClosedForm, CliError> {
    let coef = p.f64_or("coef", 1.0)?;
    Ok(match p.str_or("form", "monomial").as_str() {
        "monomial" => ClosedForm::Monomial { coef, gamma: p.f64_or("gamma", 1.0)? },
        "exponential" => ClosedForm::Exponential { coef, lambda: p.f64_or("lambda", 1.0)? },
        "trig" => ClosedForm::Trig { coef, k: p.f64_or("k", 1.0)?, phase: p.f64_or("phase", 0.0)? },
        "gaussian" => ClosedForm::Gaussian { coef, a: p.f64_or("a", 1.0)? },
        f => return Err(CliError::Usage(format!("form must be monomial, exponential, trig or gaussian, got {f:?}"))),
    })
}

pub fn oracle(a: OracleArgs) -> Result<u8, CliError> {
    let mut p = params_of(&a.params)?;
    p.set_if("p", a.p);
    p.set_if("mu", a.mu);
    let mut v = match a.query.as_str() {
        "weighted-lp" => {
            let cf = closed_form(&mut p)?;
            let wp = weight(&mut p)?;
            let t_end = p.f64_or("t-end", 1.0)?;
            p.finish()?;
            let exact = exact_weighted_lp(cf, wp, t_end)?;
            let dense = dense_weighted_lp(cf, wp, t_end, 6)?;
            json!({
                "value": fmt_num(exact),
                "dense_extrapolated": fmt_num(dense.extrapolated),
                "dense_rate": fmt_num(dense.rate),
                "dense_flagged": dense.flagged,
                "validation_gap": fmt_num(validate_closed_form(cf, wp, t_end)?),
                "form": serde_json::to_value(cf).expect("closed forms serialize"),
            })
        }
        "hardy-constant" => {
            let wp = weight(&mut p)?;
            let k = p.usize_or("k", 1)?;
            p.finish()?;
            json!({ "value": fmt_num(hardy_constant(wp, k)), "k": k.to_string() })
        }
        "poincare-constant" => {
            let wp = weight(&mut p)?;
            p.finish()?;
            json!({ "value": fmt_num(poincare_constant(wp)) })
        }
        "single-mode" => {
            let (coef, w, theta) = (p.f64_or("coef", 1.0)?, required(&mut p, "w")?, p.f64_or("theta", 0.5)?);
            let pp = p.f64_or("p", 2.0)?;
            p.finish()?;
            json!({ "value": fmt_num(single_mode_interp_norm(coef, w, theta, pp)) })
        }
        q => return Err(CliError::Usage(format!("unknown query {q:?}"))),
    };
    v["query"] = json!(a.query);
    v["meta"] = meta(None, None);
    emit(a.out.as_deref(), json_text(&v).as_bytes())?;
    Ok(0)
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Report or battery JSON.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Limit the instance rows per report.
    #[arg(long = "max-rows")]
    max_rows: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn report(a: ReportArgs) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&a.input)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", a.input.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Data(format!("invalid JSON: {e}")))?;
    let out = render_report(&v, a.format, a.max_rows)?;
    emit(a.out.as_deref(), out.as_bytes())?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_product() {
        let rows = product(&[vec![1.0, 2.0], vec![3.0], vec![4.0, 5.0]]);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[3], vec![2.0, 3.0, 5.0]);
    }
}
