//! Seeded test ensembles.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grids::{
    make_graded_grid, sample_scalar, Grading, Grid1D, SampledFunction, SpaceTimeField, SpatialAxis, SpatialSample,
    TimeDomain,
};

/// A scalar profile on the reference interval `(0, 1)`, multiplied by `t^vanish`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// `c t^a e^{-b t}`
    PowerDecay { c: f64, a: f64, b: f64 },
    /// `c t^a exp(-((t - m)/w)^2)`
    Bump { c: f64, a: f64, m: f64, w: f64 },
    /// `c t^a sin(k t + phi)`
    Wave { c: f64, a: f64, k: f64, phi: f64 },
    /// `c (1 + t)^{-1} t^a`
    Rational { c: f64, a: f64 },
    /// `c B(lambda t)` with the standard bump `B` supported in `(0, 1)`.
    Dilated { c: f64, lambda: f64 },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Profile::PowerDecay { c, a, b } => c * t.powf(a) * (-b * t).exp(),
            Profile::Bump { c, a, m, w } => c * t.powf(a) * (-((t - m) / w).powi(2)).exp(),
            Profile::Wave { c, a, k, phi } => c * t.powf(a) * (k * t + phi).sin(),
            Profile::Rational { c, a } => c * t.powf(a) / (1.0 + t),
            Profile::Dilated { c, lambda } => {
                let x = 2.0 * lambda * t - 1.0;
                if x.abs() < 1.0 {
                    c * (-1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// `f(t / T)` sampled on `grid`.
    pub fn sample(&self, grid: Arc<Grid1D>, t_scale: f64) -> Result<SampledFunction> {
        let f = *self;
        sample_scalar(move |t| f.eval(t / t_scale), grid)
    }
}

/// A seeded family of profiles together with the reference resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    pub members: Vec<Profile>,
    /// Number of bulk cells at the reference resolution.
    pub n: usize,
    pub grading: Grading,
}

impl Ensemble {
    /// `size` members vanishing to order `vanish` at `t = 0`.
    pub fn standard(seed: u64, size: usize, vanish: usize, n: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a0 = vanish as f64;
        let members = (0..size)
            .map(|i| {
                let c = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                // extra integer powers keep every member smooth at 0
                let a = a0 + rng.gen_range(0..2) as f64;
                match i % 4 {
                    0 => Profile::PowerDecay { c, a: a.max(0.0), b: rng.gen_range(0.0..4.0) },
                    1 => {
                        let w = rng.gen_range(0.08..0.2);
                        Profile::Bump { c, a, m: rng.gen_range(0.35..0.75), w }
                    }
                    2 => Profile::Wave { c, a, k: rng.gen_range(1.0..6.0), phi: rng.gen_range(0.0..2.0 * PI) },
                    _ => Profile::Rational { c, a },
                }
            })
            .collect();
        Self { members, n, grading: Grading::default() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Grid on `(0, t_end)` with `n` bulk cells.
    pub fn grid(&self, t_end: f64, n: usize) -> Result<Arc<Grid1D>> {
        Ok(Arc::new(make_graded_grid(TimeDomain::finite(t_end)?, n, self.grading)?))
    }

    /// Member `i` rescaled to `(0, t_end)` at `n` bulk cells.
    pub fn sample(&self, i: usize, t_end: f64, n: usize) -> Result<SampledFunction> {
        self.members[i].sample(self.grid(t_end, n)?, t_end)
    }
}

/// Real trigonometric polynomial on the `2 pi`-torus in `(t, x)`:
/// `sum a cos(kt t + kx x) + b sin(kt t + kx x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLimited2D {
    pub terms: Vec<(i32, i32, f64, f64)>,
}

impl BandLimited2D {
    /// Random polynomial with `|kt| <= kt_max`, `|kx| <= kx_max`, amplitudes
    /// decaying like `(1 + kt^2 + kx^2)^{-decay/2}`.
    pub fn random(rng: &mut ChaCha8Rng, kt_max: i32, kx_max: i32, decay: f64) -> Self {
        let mut terms = Vec::new();
        for kt in -kt_max..=kt_max {
            for kx in 0..=kx_max {
                if kx == 0 && kt < 0 {
                    continue;
                }
                let damp = (1.0 + (kt * kt + kx * kx) as f64).powf(-decay / 2.0);
                terms.push((kt, kx, rng.gen_range(-1.0..1.0) * damp, rng.gen_range(-1.0..1.0) * damp));
            }
        }
        Self { terms }
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(kt, kx, a, b)| {
                let arg = kt as f64 * t + kx as f64 * x;
                a * arg.cos() + b * arg.sin()
            })
            .sum()
    }

    /// Samples on the `nt x nx` periodic grid of `(0, 2 pi)^2`.
    pub fn sample(&self, nt: usize, nx: usize) -> Result<SpaceTimeField> {
        let tgrid = Arc::new(make_graded_grid(TimeDomain::finite(2.0 * PI)?, nt, Grading::Uniform)?);
        // periodic sampling of t at the cell midpoints: shift by h/2 is a phase
        let axes = vec![SpatialAxis::periodic(nx, 1.0)?];
        SpaceTimeField::from_fn(tgrid, axes, |t, x| self.eval(t, x[0]))
    }
}

/// Real trigonometric polynomial in `x` on the `2 pi`-torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandLimited1D {
    pub terms: Vec<(i32, f64, f64)>,
}

impl BandLimited1D {
    pub fn random(rng: &mut ChaCha8Rng, k_max: i32, decay: f64) -> Self {
        let terms = (0..=k_max)
            .map(|k| {
                let damp = (1.0 + (k * k) as f64).powf(-decay / 2.0);
                (k, rng.gen_range(-1.0..1.0) * damp, rng.gen_range(-1.0..1.0) * damp)
            })
            .collect();
        Self { terms }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|&(k, a, b)| a * (k as f64 * x).cos() + b * (k as f64 * x).sin()).sum()
    }

    pub fn sample(&self, nx: usize) -> Result<SpatialSample> {
        SpatialSample::from_fn(vec![SpatialAxis::periodic(nx, 1.0)?], |x| self.eval(x[0]))
    }
}

/// `count` seeded 2-D trigonometric polynomials.
pub fn band_limited_2d(seed: u64, count: usize, kt_max: i32, kx_max: i32) -> Vec<BandLimited2D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| BandLimited2D::random(&mut rng, kt_max, kx_max, 2.0)).collect()
}

/// `count` seeded 1-D trigonometric polynomials.
pub fn band_limited_1d(seed: u64, count: usize, k_max: i32) -> Vec<BandLimited1D> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| BandLimited1D::random(&mut rng, k_max, 2.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_vanishing() {
        let a = Ensemble::standard(7, 32, 2, 64);
        let b = Ensemble::standard(7, 32, 2, 64);
        assert_eq!(a, b);
        assert_ne!(a, Ensemble::standard(8, 32, 2, 64));
        for m in &a.members {
            assert!(m.eval(1e-4).abs() < 1e-7);
        }
    }

    #[test]
    fn band_limited_is_periodic() {
        let f = &band_limited_2d(3, 1, 3, 3)[0];
        let v = f.eval(0.3, 1.1);
        assert!((f.eval(0.3 + 2.0 * PI, 1.1 - 2.0 * PI) - v).abs() < 1e-12);
    }
}
