//! Verification reports and their canonical JSON form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "pass" => Ok(Verdict::Pass),
            "fail" => Ok(Verdict::Fail),
            "inconclusive" => Ok(Verdict::Inconclusive),
            _ => Err(Error::DataFormat(format!("unknown verdict {s:?}"))),
        }
    }
}

/// One checked inequality instance `lhs <= C rhs`, `ratio = lhs / rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub params: BTreeMap<String, f64>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub resolution: usize,
    /// Relative change of the ratio under one refinement, when measured.
    pub drift: Option<f64>,
}

impl Instance {
    pub fn new(lhs: f64, rhs: f64, resolution: usize) -> Self {
        let ratio = if rhs == 0.0 && lhs == 0.0 { 0.0 } else { lhs / rhs };
        Self { params: BTreeMap::new(), lhs, rhs, ratio, resolution, drift: None }
    }

    pub fn param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    pub fn with_drift(mut self, drift: f64) -> Self {
        self.drift = Some(drift);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Upper bound on every ratio.
    pub threshold: f64,
    /// Lower bound on every ratio (two-sided brackets).
    pub lower: f64,
    pub drift_tol: f64,
}

impl Tolerances {
    pub fn upper(threshold: f64, drift_tol: f64) -> Self {
        Self { threshold, lower: f64::NEG_INFINITY, drift_tol }
    }

    pub fn bracket(lower: f64, threshold: f64, drift_tol: f64) -> Self {
        Self { threshold, lower, drift_tol }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub instances: Vec<Instance>,
    pub worst_ratio: f64,
    pub min_ratio: f64,
    pub refinement_drift: f64,
    pub verdict: Verdict,
    pub tolerances: Tolerances,
    /// Informational results that do not enter the verdict.
    pub notes: Vec<String>,
    pub meta: BTreeMap<String, String>,
}

impl VerificationReport {
    /// Assembles a report; the verdict is pass iff every ratio lies in the
    /// bracket and the largest drift is within `drift_tol`.
    pub fn assemble(suite: &str, instances: Vec<Instance>, tolerances: Tolerances) -> Self {
        let worst_ratio = instances.iter().map(|i| i.ratio).fold(f64::NEG_INFINITY, f64::max);
        let min_ratio = instances.iter().map(|i| i.ratio).fold(f64::INFINITY, f64::min);
        let refinement_drift = instances.iter().filter_map(|i| i.drift).fold(0.0, f64::max);
        let finite = instances.iter().all(|i| i.ratio.is_finite() && i.drift.map_or(true, f64::is_finite));
        let verdict = if !finite {
            Verdict::Inconclusive
        } else if instances.is_empty()
            || (worst_ratio <= tolerances.threshold
                && min_ratio >= tolerances.lower
                && refinement_drift <= tolerances.drift_tol)
        {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let (worst_ratio, min_ratio) = if instances.is_empty() { (0.0, 0.0) } else { (worst_ratio, min_ratio) };
        Self {
            suite: suite.to_string(),
            instances,
            worst_ratio,
            min_ratio,
            refinement_drift,
            verdict,
            tolerances,
            notes: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.notes.push(s.into());
        self
    }

    pub fn meta(mut self, k: &str, v: impl Into<String>) -> Self {
        self.meta.insert(k.to_string(), v.into());
        self
    }

    /// Merges sub-reports into one suite; the verdict is the worst of the parts.
    pub fn combine(suite: &str, parts: Vec<VerificationReport>) -> Self {
        let tolerances = parts.first().map(|p| p.tolerances).unwrap_or(Tolerances::upper(f64::INFINITY, f64::INFINITY));
        let mut out = Self::assemble(suite, Vec::new(), tolerances);
        let mut verdict = Verdict::Pass;
        let mut worst = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for p in parts {
            verdict = match (verdict, p.verdict) {
                (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
                (Verdict::Inconclusive, _) | (_, Verdict::Inconclusive) => Verdict::Inconclusive,
                _ => Verdict::Pass,
            };
            if !p.instances.is_empty() {
                worst = worst.max(p.worst_ratio);
                min = min.min(p.min_ratio);
            }
            out.refinement_drift = out.refinement_drift.max(p.refinement_drift);
            out.notes.push(format!("{}: {}", p.suite, p.verdict.as_str()));
            out.notes.extend(p.notes.into_iter().map(|n| format!("{}: {n}", p.suite)));
            for mut inst in p.instances {
                inst.params.entry(format!("part:{}", p.suite)).or_insert(1.0);
                out.instances.push(inst);
            }
        }
        if worst.is_finite() {
            out.worst_ratio = worst;
            out.min_ratio = min;
        }
        out.verdict = verdict;
        out
    }

    /// Canonical JSON: numbers as decimal strings with 15 significant digits,
    /// keys sorted.
    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("suite".into(), Value::String(self.suite.clone()));
        m.insert("verdict".into(), Value::String(self.verdict.as_str().into()));
        m.insert("worst_ratio".into(), num(self.worst_ratio));
        m.insert("min_ratio".into(), num(self.min_ratio));
        m.insert("refinement_drift".into(), num(self.refinement_drift));
        let mut tol = Map::new();
        tol.insert("threshold".into(), num(self.tolerances.threshold));
        tol.insert("lower".into(), num(self.tolerances.lower));
        tol.insert("drift_tol".into(), num(self.tolerances.drift_tol));
        m.insert("tolerances".into(), Value::Object(tol));
        let inst: Vec<Value> = self
            .instances
            .iter()
            .map(|i| {
                let mut o = Map::new();
                let params: Map<String, Value> = i.params.iter().map(|(k, v)| (k.clone(), num(*v))).collect();
                o.insert("params".into(), Value::Object(params));
                o.insert("lhs".into(), num(i.lhs));
                o.insert("rhs".into(), num(i.rhs));
                o.insert("ratio".into(), num(i.ratio));
                o.insert("resolution".into(), Value::String(i.resolution.to_string()));
                o.insert("drift".into(), i.drift.map_or(Value::Null, num));
                Value::Object(o)
            })
            .collect();
        m.insert("instances".into(), Value::Array(inst));
        m.insert("notes".into(), Value::Array(self.notes.iter().cloned().map(Value::String).collect()));
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        m.insert("meta".into(), Value::Object(meta));
        Value::Object(m)
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json values serialize");
        s.push('\n');
        s
    }

    /// Parses the canonical JSON form back.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| bad("report must be an object"))?;
        let text = |k: &str| -> Result<String> {
            obj.get(k)
                .and_then(Value::as_str)
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("missing string field {k}")))
        };
        let number = |o: &Map<String, Value>, k: &str| -> Result<f64> {
            parse_num(o.get(k).ok_or_else(|| bad(&format!("missing field {k}")))?)
        };
        let tol = obj.get("tolerances").and_then(Value::as_object).ok_or_else(|| bad("missing tolerances"))?;
        let tolerances = Tolerances {
            threshold: number(tol, "threshold")?,
            lower: number(tol, "lower")?,
            drift_tol: number(tol, "drift_tol")?,
        };
        let mut instances = Vec::new();
        for i in obj.get("instances").and_then(Value::as_array).ok_or_else(|| bad("missing instances"))? {
            let io = i.as_object().ok_or_else(|| bad("instance must be an object"))?;
            let mut params = BTreeMap::new();
            for (k, v) in io.get("params").and_then(Value::as_object).ok_or_else(|| bad("missing params"))? {
                params.insert(k.clone(), parse_num(v)?);
            }
            let resolution = io
                .get("resolution")
                .and_then(Value::as_str)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| bad("bad resolution"))?;
            let drift = match io.get("drift") {
                None | Some(Value::Null) => None,
                Some(v) => Some(parse_num(v)?),
            };
            instances.push(Instance {
                params,
                lhs: number(io, "lhs")?,
                rhs: number(io, "rhs")?,
                ratio: number(io, "ratio")?,
                resolution,
                drift,
            });
        }
        let notes = obj
            .get("notes")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(|v| v.as_str().map(str::to_string)).collect())
            .unwrap_or_default();
        let meta = obj
            .get("meta")
            .and_then(Value::as_object)
            .map(|m| m.iter().filter_map(|(k, v)| v.as_str().map(|s| (k.clone(), s.to_string()))).collect())
            .unwrap_or_default();
        Ok(Self {
            suite: text("suite")?,
            instances,
            worst_ratio: number(obj, "worst_ratio")?,
            min_ratio: number(obj, "min_ratio")?,
            refinement_drift: number(obj, "refinement_drift")?,
            verdict: Verdict::parse(&text("verdict")?)?,
            tolerances,
            notes,
            meta,
        })
    }
}

fn bad(msg: &str) -> Error {
    Error::DataFormat(msg.to_string())
}

/// Decimal string with 15 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.14e}")
    }
}

fn num(x: f64) -> Value {
    Value::String(fmt_num(x))
}

fn parse_num(v: &Value) -> Result<f64> {
    let s = v.as_str().ok_or_else(|| bad("numbers are encoded as strings"))?;
    s.parse::<f64>().map_err(|_| bad(&format!("not a number: {s:?}")))
}
