//! Parameter conditions for embeddings and trace spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grids::WeightParams;

const STRICT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingVariant {
    /// `W^s_{p,mu} -> W^tau_{q,mu}`
    WeightedTarget,
    /// `W^s_{p,mu} -> W^tau_q`
    UnweightedTarget,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingQuery {
    pub p: f64,
    pub q: f64,
    pub mu: f64,
    pub s: f64,
    pub tau: f64,
    pub variant: EmbeddingVariant,
}

impl EmbeddingQuery {
    pub fn new(p: f64, q: f64, mu: f64, s: f64, tau: f64, variant: EmbeddingVariant) -> Result<Self> {
        WeightParams::new(p, mu)?;
        if !(q > p && q.is_finite()) {
            return Err(Error::InvalidParameter(format!("need p < q < inf, got p={p}, q={q}")));
        }
        if !(tau >= 0.0 && s > tau) {
            return Err(Error::InvalidParameter(format!("need s > tau >= 0, got s={s}, tau={tau}")));
        }
        Ok(Self { p, q, mu, s, tau, variant })
    }

    pub fn limit(&self) -> f64 {
        1.0 - self.mu + 1.0 / self.p
    }

    /// Both sides of the sufficient condition `lhs > rhs`.
    pub fn sides(&self) -> (f64, f64) {
        let lim = self.limit();
        let rhs = match self.variant {
            EmbeddingVariant::WeightedTarget => self.tau - self.p * lim / self.q,
            EmbeddingVariant::UnweightedTarget => self.tau - 1.0 / self.q,
        };
        (self.s - lim, rhs)
    }
}

/// Strict sufficient condition for the Sobolev-type embedding.
pub fn embeds(q: &EmbeddingQuery) -> bool {
    let (lhs, rhs) = q.sides();
    lhs - rhs > STRICT * lhs.abs().max(rhs.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceVariant {
    /// `H^{s+alpha}(W^r) ∩ H^s(W^{r+beta}) -> BUC^k(B^rho)`
    Temporal,
    /// `W^alpha(W^r) ∩ L(W^{r+beta})`, `alpha <= 1`
    TemporalLg73,
    /// `W^1(W^r) ∩ W^s(W^{r+beta})`
    TemporalLg74,
    /// Trace on the flat boundary of `H^{s,2ms}`.
    Spatial,
}

impl TraceVariant {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "temporal" | "mott" => TraceVariant::Temporal,
            "temporal_lg73" | "lg73" => TraceVariant::TemporalLg73,
            "temporal_lg74" | "lg74" => TraceVariant::TemporalLg74,
            "spatial" => TraceVariant::Spatial,
            _ => return Err(Error::InvalidParameter(format!("unknown trace variant {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceQuery {
    pub p: f64,
    pub mu: f64,
    pub s: f64,
    pub alpha: f64,
    pub r: f64,
    pub beta: f64,
    pub k: usize,
    pub m: usize,
    pub variant: TraceVariant,
}

impl TraceQuery {
    pub fn temporal(p: f64, mu: f64, s: f64, k: usize, alpha: f64, r: f64, beta: f64) -> Self {
        Self { p, mu, s, alpha, r, beta, k, m: 1, variant: TraceVariant::Temporal }
    }

    pub fn lg73(p: f64, mu: f64, alpha: f64, r: f64, beta: f64) -> Self {
        Self { p, mu, s: 0.0, alpha, r, beta, k: 0, m: 1, variant: TraceVariant::TemporalLg73 }
    }

    pub fn lg74(p: f64, mu: f64, s: f64, r: f64, beta: f64) -> Self {
        Self { p, mu, s, alpha: 1.0 - s, r, beta, k: 0, m: 1, variant: TraceVariant::TemporalLg74 }
    }

    pub fn spatial(p: f64, mu: f64, s: f64, m: usize) -> Self {
        Self { p, mu, s, alpha: 0.0, r: 0.0, beta: 0.0, k: 0, m, variant: TraceVariant::Spatial }
    }

    pub fn weight(&self) -> Result<WeightParams> {
        WeightParams::new(self.p, self.mu)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TraceOrder {
    /// Besov order of the temporal trace space.
    Temporal(f64),
    /// `(time order, space order)` of the spatial trace space.
    Spatial(f64, f64),
}

/// Rejects an order that sits exactly on `j + 1 - mu + 1/p`.
fn reject_limit(order: f64, lim: f64) -> Result<()> {
    let x = order - lim;
    if x > -1e-12 && (x - x.round()).abs() < 1e-12 {
        return Err(Error::LimitExponent { s: order, k: x.round().max(0.0) as usize });
    }
    Ok(())
}

/// Order of the trace space for the query's variant.
pub fn trace_space_order(q: &TraceQuery) -> Result<TraceOrder> {
    let wp = q.weight()?;
    let lim = wp.trace_limit();
    match q.variant {
        TraceVariant::Spatial => {
            if q.m == 0 {
                return Err(Error::InvalidParameter("m must be >= 1".into()));
            }
            if !(q.s > 0.0 && q.s <= 1.0) {
                return Err(Error::InvalidParameter(format!("need s in (0,1], got {}", q.s)));
            }
            let tm = 2.0 * q.m as f64 * q.s;
            if (tm - tm.round()).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!("2ms = {tm} must be an integer")));
            }
            let m2 = 2.0 * q.m as f64;
            Ok(TraceOrder::Spatial(q.s - 1.0 / (m2 * q.p), tm.round() - 1.0 / q.p))
        }
        _ => {
            if !(q.beta > 0.0) || !(q.r >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "need r >= 0 and beta > 0, got r={}, beta={}",
                    q.r, q.beta
                )));
            }
            let (s, alpha, k) = match q.variant {
                TraceVariant::Temporal => (q.s, q.alpha, q.k),
                TraceVariant::TemporalLg73 => {
                    if q.alpha > 1.0 {
                        return Err(Error::InvalidParameter(format!("this variant needs alpha <= 1, got {}", q.alpha)));
                    }
                    (0.0, q.alpha, 0)
                }
                TraceVariant::TemporalLg74 => {
                    if !(q.s >= 0.0 && q.s < 1.0) {
                        return Err(Error::InvalidParameter(format!("need s in [0,1), got {}", q.s)));
                    }
                    (q.s, 1.0 - q.s, 0)
                }
                TraceVariant::Spatial => unreachable!(),
            };
            if !(alpha > 0.0 && alpha < 2.0) {
                return Err(Error::InvalidParameter(format!("alpha must lie in (0,2), got {alpha}")));
            }
            if !(s >= 0.0) {
                return Err(Error::InvalidParameter(format!("s must be >= 0, got {s}")));
            }
            if s > 0.0 {
                reject_limit(s, lim)?;
            }
            reject_limit(s + alpha, lim)?;
            let kl = k as f64 + lim;
            if !(s < kl && kl < s + alpha) {
                return Err(Error::InvalidParameter(format!(
                    "need s < k + 1 - mu + 1/p < s + alpha, got s={s}, k={k}, alpha={alpha}, limit {lim}"
                )));
            }
            let order = match q.variant {
                TraceVariant::TemporalLg73 => q.r + q.beta * (1.0 - lim / alpha),
                TraceVariant::TemporalLg74 => q.r + q.beta * (q.mu - 1.0 / q.p) / (1.0 - s),
                _ => q.r + q.beta * (1.0 + (s - kl) / alpha),
            };
            Ok(TraceOrder::Temporal(order))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_conditions() {
        let q = EmbeddingQuery::new(2.0, 4.0, 1.0, 0.8, 0.5, EmbeddingVariant::WeightedTarget).unwrap();
        assert!(embeds(&q));
        // mu = 1: both variants are s - 1/p > tau - 1/q
        for tau in [0.1, 0.3, 0.54, 0.56] {
            let a = EmbeddingQuery::new(2.0, 4.0, 1.0, 0.8, tau, EmbeddingVariant::WeightedTarget).unwrap();
            let b = EmbeddingQuery { variant: EmbeddingVariant::UnweightedTarget, ..a };
            assert_eq!(embeds(&a), embeds(&b));
            assert_eq!(embeds(&a), 0.8 - 0.5 > tau - 0.25);
        }
        let eq = EmbeddingQuery::new(2.0, 4.0, 1.0, 0.8, 0.55, EmbeddingVariant::WeightedTarget).unwrap();
        assert!(!embeds(&eq));
        assert!(EmbeddingQuery::new(2.0, 2.0, 1.0, 0.8, 0.5, EmbeddingVariant::WeightedTarget).is_err());
        assert!(EmbeddingQuery::new(2.0, 4.0, 0.4, 0.8, 0.5, EmbeddingVariant::WeightedTarget).is_err());
    }

    #[test]
    fn trace_orders() {
        let q = TraceQuery::temporal(2.0, 1.0, 0.0, 0, 1.0, 0.0, 2.0);
        assert_eq!(trace_space_order(&q).unwrap(), TraceOrder::Temporal(1.0));
        for &(p, mu) in &[(2.0, 1.0), (2.0, 0.75), (3.0, 0.5), (4.0, 0.9)] {
            for m in 1..=3 {
                let q = TraceQuery::lg73(p, mu, 1.0, 0.0, 2.0 * m as f64);
                let TraceOrder::Temporal(o) = trace_space_order(&q).unwrap() else { panic!() };
                assert!((o - 2.0 * m as f64 * (mu - 1.0 / p)).abs() < 1e-14);
            }
        }
        let q = TraceQuery::spatial(2.0, 1.0, 1.0, 1);
        assert_eq!(trace_space_order(&q).unwrap(), TraceOrder::Spatial(0.75, 1.5));
    }

    #[test]
    fn trace_hypotheses() {
        // s = 1 - mu + 1/p
        let q = TraceQuery::temporal(2.0, 1.0, 0.5, 0, 1.0, 0.0, 2.0);
        assert!(matches!(trace_space_order(&q), Err(Error::LimitExponent { k: 0, .. })));
        let q = TraceQuery::temporal(2.0, 1.0, 0.0, 0, 0.5, 0.0, 2.0);
        assert!(matches!(trace_space_order(&q), Err(Error::LimitExponent { .. })));
        let q = TraceQuery::temporal(2.0, 1.0, 0.0, 1, 1.0, 0.0, 2.0);
        assert!(matches!(trace_space_order(&q), Err(Error::InvalidParameter(_))));
        let q = TraceQuery::temporal(2.0, 1.0, 0.0, 0, 2.0, 0.0, 2.0);
        assert!(trace_space_order(&q).is_err());
        let q = TraceQuery::lg73(2.0, 1.0, 1.2, 0.0, 2.0);
        assert!(trace_space_order(&q).is_err());
        let q = TraceQuery::spatial(2.0, 1.0, 0.3, 1);
        assert!(trace_space_order(&q).is_err());
        // lg74 agrees with the general formula at alpha = 1 - s
        let a = trace_space_order(&TraceQuery::lg74(2.0, 0.75, 0.25, 0.5, 2.0)).unwrap();
        let b = trace_space_order(&TraceQuery::temporal(2.0, 0.75, 0.25, 0, 0.75, 0.5, 2.0)).unwrap();
        let (TraceOrder::Temporal(a), TraceOrder::Temporal(b)) = (a, b) else { panic!() };
        assert!((a - b).abs() < 1e-14);
    }
}
