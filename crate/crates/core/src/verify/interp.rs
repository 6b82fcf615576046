//! Interpolation identity together with the equivalence of the two K-functionals.

use rayon::prelude::*;

use super::ensembles::Ensemble;
use super::report::{Instance, Tolerances, VerificationReport};
use crate::error::Result;
use crate::grids::{SampledFunction, WeightParams};
use crate::interpolation::{check_interp_identity, k_functional, periodized_spectrum, t_nodes, DiagonalCouple, KMode};

/// Every `K_STRIDE`-th quadrature node enters the K-functional bracket.
const K_STRIDE: usize = 8;
const K_SLACK: f64 = 1e-9;

/// `K_cd / K_2` on the quadrature nodes; `1 <= . <= sqrt 2` since
/// `(a^2 + b^2)^{1/2} <= a + b <= (2(a^2 + b^2))^{1/2}`.
fn k_bracket(members: &[SampledFunction], s1: f64, s2: f64) -> Result<VerificationReport> {
    let ts: Vec<f64> = t_nodes().into_iter().step_by(K_STRIDE).collect();
    let rows: Vec<Result<Vec<Instance>>> = members
        .par_iter()
        .enumerate()
        .map(|(i, u)| {
            let (coeffs, xi) = periodized_spectrum(u)?;
            let couple = DiagonalCouple::bessel(&xi, s1, s2)?;
            ts.iter()
                .map(|&t| {
                    let k2 = k_functional(&coeffs, &couple, t, KMode::QuadraticExact)?;
                    let kcd = k_functional(&coeffs, &couple, t, KMode::CoordinateDescent)?;
                    Ok(Instance::new(kcd, k2, u.len()).param("member", i as f64).param("t", t))
                })
                .collect()
        })
        .collect();
    let instances = rows.into_iter().collect::<Result<Vec<_>>>()?.concat();
    let tol = Tolerances::bracket(1.0 - K_SLACK, 2f64.sqrt() + K_SLACK, 0.0);
    Ok(VerificationReport::assemble("interp-k-bracket", instances, tol))
}

/// Ratios of the interpolation norm to the `W^s_{p,mu}` norm plus the
/// `K_2 <= K_cd <= sqrt 2 K_2` bracket on every member.
pub fn run_interp_suite(
    wp: WeightParams,
    s1: f64,
    s2: f64,
    theta: f64,
    ensemble: &Ensemble,
) -> Result<VerificationReport> {
    let members = (0..ensemble.len()).map(|i| ensemble.sample(i, 1.0, ensemble.n)).collect::<Result<Vec<_>>>()?;
    run_interp_suite_on(&members, wp, s1, s2, theta)
}

/// As [`run_interp_suite`] on explicit members.
pub fn run_interp_suite_on(
    members: &[SampledFunction],
    wp: WeightParams,
    s1: f64,
    s2: f64,
    theta: f64,
) -> Result<VerificationReport> {
    let identity = check_interp_identity(members, wp, s1, s2, theta)?;
    let bracket = k_bracket(members, s1, s2)?;
    Ok(VerificationReport::combine("interp", vec![identity, bracket])
        .meta("p", wp.p().to_string())
        .meta("mu", wp.mu().to_string())
        .meta("s1", s1.to_string())
        .meta("s2", s2.to_string())
        .meta("theta", theta.to_string()))
}
