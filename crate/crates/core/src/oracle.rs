//! Reference values computed without the library's norm and operator code:
//! closed forms, extrapolated dense quadrature and a certified brute-force
//! K-functional.

use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};
use std::sync::{OnceLock, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta;
use statrs::function::gamma::{gamma, gamma_lr};

use crate::error::{Error, Result};
use crate::grids::WeightParams;

/// Closed-form test functions on `(0, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    /// `coef * t^gamma`
    Monomial { coef: f64, gamma: f64 },
    /// `coef * exp(-lambda t)`
    Exponential { coef: f64, lambda: f64 },
    /// `coef * cos(k t + phase)`
    Trig { coef: f64, k: f64, phase: f64 },
    /// `coef * exp(-a t^2)`
    Gaussian { coef: f64, a: f64 },
}

impl ClosedForm {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            ClosedForm::Monomial { coef, gamma } => coef * t.powf(gamma),
            ClosedForm::Exponential { coef, lambda } => coef * (-lambda * t).exp(),
            ClosedForm::Trig { coef, k, phase } => coef * (k * t + phase).cos(),
            ClosedForm::Gaussian { coef, a } => coef * (-a * t * t).exp(),
        }
    }

    fn key(&self, h: &mut DefaultHasher) {
        let (tag, a, b, c) = match *self {
            ClosedForm::Monomial { coef, gamma } => (0u8, coef, gamma, 0.0),
            ClosedForm::Exponential { coef, lambda } => (1, coef, lambda, 0.0),
            ClosedForm::Trig { coef, k, phase } => (2, coef, k, phase),
            ClosedForm::Gaussian { coef, a } => (3, coef, a, 0.0),
        };
        tag.hash(h);
        for x in [a, b, c] {
            x.to_bits().hash(h);
        }
    }
}

/// `int_0^x s^{a-1} e^{-s} ds`.
fn lower_gamma(a: f64, x: f64) -> f64 {
    gamma(a) * gamma_lr(a, x)
}

/// `|t^{1-mu} cf|_{L_p(0,T)}` in closed form.
pub fn exact_weighted_lp(cf: ClosedForm, wp: WeightParams, t_end: f64) -> Result<f64> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidParameter(format!("T must be positive, got {t_end}")));
    }
    let p = wp.p();
    let e = p * (1.0 - wp.mu());
    let pth = match cf {
        ClosedForm::Monomial { coef, gamma } => {
            let q = e + p * gamma;
            if q <= -1.0 {
                return Err(Error::NonIntegrable(format!("t^{gamma} is not in L_p,mu near 0 (exponent {q} <= -1)")));
            }
            coef.abs().powf(p) * t_end.powf(q + 1.0) / (q + 1.0)
        }
        ClosedForm::Exponential { coef, lambda } => {
            if lambda == 0.0 {
                coef.abs().powf(p) * t_end.powf(e + 1.0) / (e + 1.0)
            } else if lambda > 0.0 {
                let c = p * lambda;
                coef.abs().powf(p) * c.powf(-(e + 1.0)) * lower_gamma(e + 1.0, c * t_end)
            } else {
                return Err(Error::NonIntegrable("growing exponentials are not tabulated".into()));
            }
        }
        ClosedForm::Trig { coef, k, phase } => {
            if p != 2.0 || wp.mu() != 1.0 {
                return Err(Error::NonIntegrable("trig closed form only for p = 2, mu = 1".into()));
            }
            let i = if k == 0.0 {
                t_end * phase.cos().powi(2)
            } else {
                t_end / 2.0 + ((2.0 * (k * t_end + phase)).sin() - (2.0 * phase).sin()) / (4.0 * k)
            };
            coef * coef * i
        }
        ClosedForm::Gaussian { coef, a } => {
            if a <= 0.0 {
                return Err(Error::NonIntegrable("gaussian needs a > 0".into()));
            }
            let c = p * a;
            let h = (e + 1.0) / 2.0;
            coef.abs().powf(p) * 0.5 * c.powf(-h) * lower_gamma(h, c * t_end * t_end)
        }
    };
    Ok(pth.powf(1.0 / p))
}

fn cache() -> &'static RwLock<HashMap<u64, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// [`exact_weighted_lp`] memoized by a hash of the query.
pub fn cached_exact_weighted_lp(cf: ClosedForm, wp: WeightParams, t_end: f64) -> Result<f64> {
    let mut h = DefaultHasher::new();
    cf.key(&mut h);
    wp.p().to_bits().hash(&mut h);
    wp.mu().to_bits().hash(&mut h);
    t_end.to_bits().hash(&mut h);
    let key = h.finish();
    if let Some(v) = cache().read().unwrap().get(&key) {
        return Ok(*v);
    }
    let v = exact_weighted_lp(cf, wp, t_end)?;
    cache().write().unwrap().entry(key).or_insert(v);
    Ok(v)
}

/// Cell layout of the dense quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DenseGrading {
    Uniform,
    /// Substitution `t = T x^q` with uniform cells in `x`.
    Algebraic(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    /// Finest-level value.
    pub value: f64,
    pub extrapolated: f64,
    /// Observed convergence order from the last three levels.
    pub rate: f64,
    /// Set when successive corrections do not shrink monotonically or the
    /// rate falls below 1.5.
    pub flagged: bool,
    pub levels: Vec<f64>,
}

const DENSE_BASE: usize = 32;

fn midpoint(f: &dyn Fn(f64) -> f64, t_end: f64, n: usize, grading: DenseGrading) -> f64 {
    let h = 1.0 / n as f64;
    let mut sum = 0.0;
    for j in 0..n {
        let x = (j as f64 + 0.5) * h;
        sum += match grading {
            DenseGrading::Uniform => f(t_end * x),
            DenseGrading::Algebraic(q) => f(t_end * x.powf(q)) * t_end * q * x.powf(q - 1.0),
        };
    }
    sum * h
}

/// Midpoint rule on `32 * 2^l` cells, `l < levels`, with Richardson
/// extrapolation.
pub fn dense_quadrature(
    f: &dyn Fn(f64) -> f64,
    t_end: f64,
    levels: usize,
    grading: DenseGrading,
) -> Result<QuadratureResult> {
    if levels < 3 {
        return Err(Error::InvalidParameter(format!("need at least 3 levels, got {levels}")));
    }
    let qs: Vec<f64> = (0..levels).map(|l| midpoint(f, t_end, DENSE_BASE << l, grading)).collect();
    let diffs: Vec<f64> = qs.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let l = diffs.len();
    let (d1, d2) = (diffs[l - 2], diffs[l - 1]);
    let scale = qs.iter().fold(0.0f64, |m, q| m.max(q.abs())).max(f64::MIN_POSITIVE);
    let converged = d2 <= 1e-14 * scale;
    let rate = if converged { f64::INFINITY } else { (d1 / d2).log2() };
    let monotone = diffs.windows(2).all(|w| w[1] <= w[0] || w[1] <= 1e-14 * scale);
    let flagged = !converged && (!monotone || rate < 1.5);
    let value = qs[levels - 1];
    let extrapolated = if converged {
        value
    } else if (rate - 2.0).abs() < 0.25 {
        romberg(&qs)
    } else {
        let r = rate.clamp(0.5, 8.0);
        value + (value - qs[levels - 2]) / (2f64.powf(r) - 1.0)
    };
    Ok(QuadratureResult { value, extrapolated, rate, flagged, levels: qs })
}

/// Romberg table for an error expansion in even powers of `h`.
fn romberg(qs: &[f64]) -> f64 {
    let mut row = qs.to_vec();
    let mut factor = 4.0;
    while row.len() > 1 {
        row = row.windows(2).map(|w| w[1] + (w[1] - w[0]) / (factor - 1.0)).collect();
        factor *= 4.0;
    }
    row[0]
}

/// `|t^{1-mu} cf|_{L_p(0,T)}` by dense quadrature, graded to absorb the
/// power singularities at 0.
pub fn dense_weighted_lp(cf: ClosedForm, wp: WeightParams, t_end: f64, levels: usize) -> Result<QuadratureResult> {
    let p = wp.p();
    let e = p * (1.0 - wp.mu());
    let g = move |t: f64| t.powf(e) * cf.eval(t).abs().powf(p);
    let mut r = dense_quadrature(&g, t_end, levels, DenseGrading::Algebraic(4.0))?;
    r.value = r.value.powf(1.0 / p);
    r.extrapolated = r.extrapolated.max(0.0).powf(1.0 / p);
    Ok(r)
}

/// Self-consistency gate: the closed form must agree with the extrapolated
/// dense quadrature at three ladder depths. Returns the worst relative gap.
pub fn validate_closed_form(cf: ClosedForm, wp: WeightParams, t_end: f64) -> Result<f64> {
    let exact = exact_weighted_lp(cf, wp, t_end)?;
    let mut worst = 0.0f64;
    for levels in [5, 6, 7] {
        let q = dense_weighted_lp(cf, wp, t_end, levels)?;
        worst = worst.max((q.extrapolated - exact).abs() / exact.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// `|u|_{X,p}` of a single mode for the couple with weights `(1, w)` and
/// the quadratic K-functional: `|u| w^theta ((1/2) B(p(1-theta)/2, p theta/2))^{1/p}`.
pub fn single_mode_interp_norm(coef: f64, w: f64, theta: f64, p: f64) -> f64 {
    coef.abs() * w.powf(theta) * (0.5 * beta(p * (1.0 - theta) / 2.0, p * theta / 2.0)).powf(1.0 / p)
}

/// Certified value of `inf_{u = a + b} |a|_X + t |b|_Y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KCertificate {
    /// Best primal value (an upper bound).
    pub value: f64,
    /// Best dual value (a lower bound).
    pub lower: f64,
    /// `(value - lower) / value`.
    pub residual: f64,
}

const BF_TOL: f64 = 1e-6;
const BF_STARTS: usize = 8;
const BF_ITERS: usize = 20_000;

fn wnorm(v: &[Complex64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(x, w)| w * w * x.norm_sqr()).sum::<f64>().sqrt()
}

/// Dual lower bound from a functional direction `phi`: rescaled so that
/// `|phi|_{X*} <= 1` and `|phi|_{Y*} <= t`, then paired with `u`.
fn dual_bound(u: &[Complex64], phi: &[Complex64], w0: &[f64], w1: &[f64], t: f64) -> f64 {
    let dual = |w: &[f64]| phi.iter().zip(w).map(|(f, w)| f.norm_sqr() / (w * w)).sum::<f64>().sqrt();
    let (nx, ny) = (dual(w0), dual(w1));
    let s = nx.max(ny / t);
    if s == 0.0 {
        return 0.0;
    }
    let pairing: f64 = u.iter().zip(phi).map(|(a, b)| (a.conj() * b).re).sum();
    pairing / s
}

/// Multi-start majorize-minimize iteration for `|u - b|_X + t |b|_Y` with a
/// duality-gap certificate. Inputs up to 16 modes.
pub fn brute_force_k(u: &[Complex64], w0: &[f64], w1: &[f64], t: f64, seed: u64) -> Result<KCertificate> {
    if u.len() > 16 || u.len() != w0.len() || u.len() != w1.len() {
        return Err(Error::ShapeMismatch(format!(
            "need matching weights and at most 16 modes, got {} / {} / {}",
            u.len(),
            w0.len(),
            w1.len()
        )));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("t must be positive, got {t}")));
    }
    if w0.iter().chain(w1).any(|w| !(*w > 0.0)) {
        return Err(Error::InvalidParameter("couple weights must be positive".into()));
    }
    let norm_u = wnorm(u, w0);
    if norm_u == 0.0 {
        return Ok(KCertificate { value: 0.0, lower: 0.0, residual: 0.0 });
    }
    let objective = |b: &[Complex64]| {
        let a: Vec<Complex64> = u.iter().zip(b).map(|(x, y)| x - y).collect();
        wnorm(&a, w0) + t * wnorm(b, w1)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = u.len();
    let mut starts: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n], u.to_vec()];
    while starts.len() < BF_STARTS {
        starts.push(
            u.iter()
                .map(|x| {
                    x * rng.gen_range(0.0..1.0)
                        + Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * x.norm()
                })
                .collect(),
        );
    }
    let mut best = f64::INFINITY;
    let mut lower = 0.0f64;
    let eps = 1e-300;
    for b0 in starts {
        let mut b = b0;
        let mut f = objective(&b);
        for _ in 0..BF_ITERS {
            let a: Vec<Complex64> = u.iter().zip(&b).map(|(x, y)| x - y).collect();
            let (na, nb) = (wnorm(&a, w0).max(eps), wnorm(&b, w1).max(eps));
            // minimizer of the quadratic majorant at the current point
            let next: Vec<Complex64> = (0..n)
                .map(|k| {
                    let ca = w0[k] * w0[k] / na;
                    let cb = t * w1[k] * w1[k] / nb;
                    u[k] * (ca / (ca + cb))
                })
                .collect();
            let fnext = objective(&next);
            // candidate dual functionals: the two subgradient directions
            let an: Vec<Complex64> = u.iter().zip(&next).map(|(x, y)| x - y).collect();
            let phi_a: Vec<Complex64> = an.iter().zip(w0).map(|(x, w)| x * (w * w)).collect();
            let phi_b: Vec<Complex64> = next.iter().zip(w1).map(|(x, w)| x * (w * w)).collect();
            lower = lower.max(dual_bound(u, &phi_a, w0, w1, t)).max(dual_bound(u, &phi_b, w0, w1, t));
            b = next;
            let stalled = fnext >= f;
            f = f.min(fnext);
            best = best.min(f);
            if best - lower <= 0.1 * BF_TOL * best || stalled {
                break;
            }
        }
        // the two trivial splits
        best = best.min(norm_u).min(t * wnorm(u, w1));
        let phi_u: Vec<Complex64> = u.iter().zip(w0).map(|(x, w)| x * (w * w)).collect();
        let phi_v: Vec<Complex64> = u.iter().zip(w1).map(|(x, w)| x * (w * w)).collect();
        lower = lower.max(dual_bound(u, &phi_u, w0, w1, t)).max(dual_bound(u, &phi_v, w0, w1, t));
    }
    let residual = (best - lower).max(0.0) / best;
    if residual > BF_TOL {
        return Err(Error::NotCertified { residual, tolerance: BF_TOL });
    }
    Ok(KCertificate { value: best, lower, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wp(p: f64, mu: f64) -> WeightParams {
        WeightParams::new(p, mu).unwrap()
    }

    #[test]
    fn closed_forms() {
        let m = ClosedForm::Monomial { coef: 1.0, gamma: -0.25 };
        for p in [1.5, 2.0, 4.0] {
            let mu = 0.75;
            let w = wp(p, mu);
            let cf = ClosedForm::Monomial { coef: 1.0, gamma: mu - 1.0 };
            assert!((exact_weighted_lp(cf, w, 1.0).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!((exact_weighted_lp(m, wp(2.0, 0.75), 1.0).unwrap() - 1.0).abs() < 1e-15);
        let one = ClosedForm::Monomial { coef: 1.0, gamma: 0.0 };
        assert!((exact_weighted_lp(one, wp(2.0, 0.75), 1.0).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let ex = ClosedForm::Exponential { coef: 1.0, lambda: 1.0 };
        let t = 5.0;
        let v = exact_weighted_lp(ex, wp(2.0, 1.0), t).unwrap();
        assert!((v - (1.0 - (-2.0 * t).exp()).sqrt() / 2f64.sqrt()).abs() < 1e-14);
        let bad = ClosedForm::Monomial { coef: 1.0, gamma: -0.6 };
        assert!(matches!(exact_weighted_lp(bad, wp(2.0, 1.0), 1.0), Err(Error::NonIntegrable(_))));
        let tr = ClosedForm::Trig { coef: 1.0, k: 1.0, phase: 0.0 };
        assert!(exact_weighted_lp(tr, wp(2.0, 0.75), 1.0).is_err());
        let v = exact_weighted_lp(tr, wp(2.0, 1.0), std::f64::consts::PI).unwrap();
        assert!((v - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_pass_the_quadrature_gate() {
        let cases = [
            (ClosedForm::Monomial { coef: 2.0, gamma: 1.5 }, wp(2.0, 0.75)),
            (ClosedForm::Exponential { coef: 1.0, lambda: 2.0 }, wp(3.0, 0.6)),
            (ClosedForm::Gaussian { coef: 1.0, a: 3.0 }, wp(2.0, 0.75)),
            (ClosedForm::Trig { coef: 1.0, k: 3.0, phase: 0.3 }, wp(2.0, 1.0)),
        ];
        for (cf, w) in cases {
            let gap = validate_closed_form(cf, w, 1.3).unwrap();
            assert!(gap < 1e-8, "{cf:?}: {gap}");
        }
    }

    #[test]
    fn quadrature_ladder() {
        let poly = |t: f64| t * t;
        let r = dense_quadrature(&poly, 1.0, 4, DenseGrading::Uniform).unwrap();
        assert!((r.extrapolated - 1.0 / 3.0).abs() < 1e-12);
        let exact = exact_weighted_lp(ClosedForm::Monomial { coef: 1.0, gamma: 1.0 }, wp(2.0, 1.0), 1.0).unwrap();
        assert!((r.extrapolated.sqrt() - exact).abs() < 1e-12);

        let root = |t: f64| t.sqrt();
        let r = dense_quadrature(&root, 1.0, 5, DenseGrading::Algebraic(2.0)).unwrap();
        assert!(r.rate >= 1.5 && !r.flagged, "{}", r.rate);
        let r = dense_quadrature(&root, 1.0, 5, DenseGrading::Uniform).unwrap();
        assert!(r.rate >= 1.4, "{}", r.rate);

        let step = |t: f64| if t < 1.0 / 3.0 { 1.0 } else { 0.0 };
        let r = dense_quadrature(&step, 1.0, 6, DenseGrading::Uniform).unwrap();
        assert!(r.flagged);
        assert!(dense_quadrature(&poly, 1.0, 2, DenseGrading::Uniform).is_err());
    }

    #[test]
    fn cache_hits_are_identical() {
        let cf = ClosedForm::Gaussian { coef: 1.5, a: 0.7 };
        let a = cached_exact_weighted_lp(cf, wp(2.5, 0.8), 2.0).unwrap();
        let b = cached_exact_weighted_lp(cf, wp(2.5, 0.8), 2.0).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        assert_eq!(a.to_bits(), exact_weighted_lp(cf, wp(2.5, 0.8), 2.0).unwrap().to_bits());
    }

    #[test]
    fn brute_force_equal_couple() {
        let u: Vec<Complex64> = (0..6).map(|k| Complex64::new(1.0 / (k + 1) as f64, 0.3 * k as f64)).collect();
        let w = vec![1.7; 6];
        let norm = wnorm(&u, &w);
        for t in [0.01, 0.5, 0.999, 1.0, 2.0, 100.0] {
            let c = brute_force_k(&u, &w, &w, t, 1).unwrap();
            assert!((c.value - t.min(1.0) * norm).abs() <= 1e-8 * norm, "t={t}");
        }
    }

    #[test]
    fn brute_force_single_mode() {
        let u = [Complex64::new(0.6, -0.8)];
        for (w0, w1, t) in [(1.0, 3.0, 0.2), (1.0, 3.0, 0.5), (2.0, 0.5, 7.0)] {
            let c = brute_force_k(&u, &[w0], &[w1], t, 3).unwrap();
            let exact = f64::min(w0, t * w1);
            assert!((c.value - exact).abs() < 1e-9, "{c:?} {exact}");
        }
    }

    #[test]
    fn brute_force_bracket_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let u: Vec<Complex64> =
                (0..8).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let w0: Vec<f64> = (0..8).map(|_| rng.gen_range(0.5..2.0)).collect();
            let w1: Vec<f64> = (0..8).map(|k| (1.0 + (k * k) as f64).sqrt()).collect();
            let t: f64 = 10f64.powf(rng.gen_range(-2.0..2.0));
            let c = brute_force_k(&u, &w0, &w1, t, 5).unwrap();
            let k2: f64 = u
                .iter()
                .zip(w0.iter().zip(&w1))
                .map(|(x, (a, b))| x.norm_sqr() * a * a * t * t * b * b / (a * a + t * t * b * b))
                .sum::<f64>()
                .sqrt();
            assert!(k2 <= c.value * (1.0 + 1e-9) && c.value <= 2f64.sqrt() * k2 * (1.0 + 1e-9));
        }
    }

    #[test]
    fn interp_single_mode_monotone_in_theta() {
        // increasing wherever ln w > (pi/2) cot(pi theta); w = 4 covers theta >= 0.3
        let vals: Vec<f64> = (3..10).map(|j| single_mode_interp_norm(1.0, 4.0, j as f64 / 10.0, 2.0)).collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
        let p2 = single_mode_interp_norm(2.0, 4.0, 0.5, 2.0);
        assert!((p2 - 2.0 * 2.0 * (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
    }
}
