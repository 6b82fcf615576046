use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grids::{HalfTorusSample, SampledFunction, SpatialAxis, SpatialSample, TimeDomain, WeightParams};

/// Coefficients `c_1..c_{k+1}` of the order-`k` reflection
/// `Eu(T + d) = sum_j c_j u(T - j d)`, i.e. `sum_j c_j j^l = (-1)^l` for
/// `l = 0..=k`. The same coefficients reflect across a left endpoint.
pub fn reflection_coefficients(k: usize) -> Vec<f64> {
    let scales: Vec<f64> = (1..=k + 1).map(|j| j as f64).collect();
    reflection_weights(&scales)
}

/// Solves `sum_j c_j s_j^l = (-1)^l`, `l = 0..scales.len()`.
fn reflection_weights(scales: &[f64]) -> Vec<f64> {
    let n = scales.len();
    let mut a = vec![vec![0.0; n + 1]; n];
    for (l, row) in a.iter_mut().enumerate() {
        for j in 0..n {
            row[j] = scales[j].powi(l as i32);
        }
        row[n] = if l % 2 == 0 { 1.0 } else { -1.0 };
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..=n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][n] - s) / a[r][r];
    }
    x
}

/// C-infinity step: 1 for `x >= 1`, 0 for `x <= 0`.
pub fn smooth_cutoff(x: f64) -> f64 {
    fn f(x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-1.0 / x).exp()
        }
    }
    if x >= 1.0 {
        1.0
    } else if x <= 0.0 {
        0.0
    } else {
        f(x) / (f(x) + f(1.0 - x))
    }
}

/// Reflected and cut-off value `phi(t) * sum_j c_j u(T - j (t - T))` for
/// `t in (T, T_k)`, `T_k = T + T/(2k+2)`.
fn reflected_value(u: &SampledFunction, coeffs: &[f64], t: f64, out: &mut [f64], tmp: &mut [f64]) {
    let len = u.grid().length();
    let width = len / (2 * coeffs.len()) as f64;
    let delta = t - len;
    out.iter_mut().for_each(|o| *o = 0.0);
    if delta >= width {
        return;
    }
    let phi = smooth_cutoff((width - delta) / width);
    for (j, c) in coeffs.iter().enumerate() {
        u.interpolate_at(len - (j + 1) as f64 * delta, tmp);
        for (o, v) in out.iter_mut().zip(tmp.iter()) {
            *o += phi * c * v;
        }
    }
}

fn check_reflection_resolution(u: &SampledFunction, k: usize) -> Result<()> {
    if k > 4 {
        return Err(Error::InvalidParameter(format!("reflection order must be <= 4, got {k}")));
    }
    let len = u.grid().length();
    let inside = u.grid().nodes().iter().filter(|&&t| t > len / 2.0).count();
    if inside < 2 * (k + 2) {
        return Err(Error::GridTooCoarse(format!(
            "order-{k} reflection needs {} nodes in (T/2, T), found {inside}",
            2 * (k + 2)
        )));
    }
    Ok(())
}

/// `E_J^0`: extension of a function with vanishing traces from `(0, T)` to
/// `(0, 2T)`; zero beyond `2T`.
pub fn extend_zero(u: &SampledFunction, wp: WeightParams) -> Result<SampledFunction> {
    let len = u.grid().length();
    let domain = match u.grid().domain() {
        TimeDomain::Finite { .. } => TimeDomain::finite(2.0 * len)?,
        TimeDomain::HalfLine { .. } => TimeDomain::half_line(2.0 * len)?,
    };
    let grid = Arc::new(u.grid().mirrored(domain)?);
    let a = 1.0 - wp.mu();
    let psi = |tau: f64| ((2.0 * len * tau - tau * tau) / (len * len)).max(0.0);
    let d = u.dim();
    let n = u.len();
    let mut values = Vec::with_capacity(2 * n * d);
    values.extend_from_slice(u.values());
    let mut tmp = vec![0.0; d];
    for i in (0..n).rev() {
        let ti = u.grid().nodes()[i];
        let first = 3.0 * psi(ti).powf(a);
        let tau = 2.0 * ti - len;
        let second = if tau > 0.0 {
            u.interpolate_at(tau, &mut tmp);
            2.0 * psi(tau).powf(a)
        } else {
            tmp.iter_mut().for_each(|x| *x = 0.0);
            0.0
        };
        for c in 0..d {
            values.push(first * u.value(i)[c] - second * tmp[c]);
        }
    }
    Ok(SampledFunction::from_values(grid, d, values)?.with_value_norm(u.value_norm()))
}

/// `E_J` with horizon `2T`.
pub fn extend_general(u: &SampledFunction, k: usize) -> Result<SampledFunction> {
    extend_general_to(u, k, 2.0 * u.grid().length())
}

/// `E_J`: order-`k` reflection past `T`, smooth cutoff supported in
/// `(0, T + T/(2k+2))`, zero up to `horizon` (a truncated half-line).
pub fn extend_general_to(u: &SampledFunction, k: usize, horizon: f64) -> Result<SampledFunction> {
    check_reflection_resolution(u, k)?;
    let len = u.grid().length();
    let t_k = len + len / (2 * k + 2) as f64;
    if horizon < t_k {
        return Err(Error::InvalidParameter(format!("horizon {horizon} below support end {t_k}")));
    }
    let h = *u.grid().weights().last().unwrap();
    // cells on (T, T_k) first so that T_k is an edge, then zeros.
    let grid = u.grid().extended_to(t_k, h, TimeDomain::half_line(t_k)?)?;
    let grid = Arc::new(grid.extended_to(horizon, h.max((horizon - t_k) / 64.0), TimeDomain::half_line(horizon)?)?);
    let coeffs = reflection_coefficients(k);
    let d = u.dim();
    let mut values = Vec::with_capacity(grid.len() * d);
    values.extend_from_slice(u.values());
    let (mut out, mut tmp) = (vec![0.0; d], vec![0.0; d]);
    for &t in &grid.nodes()[u.len()..] {
        reflected_value(u, &coeffs, t, &mut out, &mut tmp);
        values.extend_from_slice(&out);
    }
    Ok(SampledFunction::from_values(grid, d, values)?.with_value_norm(u.value_norm()))
}

/// Order-`k` reflection of a half-torus sample across `y = 0`.
pub fn extend_spatial(u: &HalfTorusSample, k: usize) -> Result<SpatialSample> {
    if k > 4 {
        return Err(Error::InvalidParameter(format!("reflection order must be <= 4, got {k}")));
    }
    let ny = u.y_axis.n;
    let half = ny / 2;
    if half < 4 * (k + 1) {
        return Err(Error::GridTooCoarse(format!("need n_y >= {} for order {k}", 8 * (k + 1))));
    }
    // Eu(-y) = sum_i c_i u(y / i) keeps every argument inside [0, y].
    let scales: Vec<f64> = (1..=k + 1).map(|i| 1.0 / i as f64).collect();
    let coeffs = reflection_weights(&scales);
    let h = u.y_axis.step();
    let nx = u.x_axis.map_or(1, |a| a.n);
    let ys: Vec<f64> = (0..=half).map(|j| j as f64 * h).collect();
    let mut values = vec![0.0; nx * ny];
    let mut tmp = [0.0];
    for ix in 0..nx {
        let row = &u.values[ix * (half + 1)..(ix + 1) * (half + 1)];
        let out = &mut values[ix * ny..(ix + 1) * ny];
        out[..=half].copy_from_slice(row);
        for j in 1..half {
            let y = j as f64 * h;
            let mut v = 0.0;
            for (i, c) in coeffs.iter().enumerate() {
                crate::grids::interpolate_nodal(&ys, row, 1, y / (i + 1) as f64, &mut tmp);
                v += c * tmp[0];
            }
            out[ny - j] = v;
        }
    }
    let mut axes: Vec<SpatialAxis> = u.x_axis.into_iter().collect();
    axes.push(u.y_axis);
    SpatialSample::new(axes, values)
}

/// Uniform periodic samples of the extended function, one period of length
/// `4T`, sample `j` at `(j + 1/2) h`.
pub(crate) struct Periodized {
    pub h: f64,
    pub period: f64,
    pub d: usize,
    pub values: Vec<f64>,
}

impl Periodized {
    const ORDER: usize = 3;

    pub fn new(u: &SampledFunction, reflect_left: bool) -> Result<Self> {
        let len = u.grid().length();
        let m = (2 * u.len()).max(128).next_power_of_two();
        let h = len / m as f64;
        let n = 4 * m;
        let period = 4.0 * len;
        let d = u.dim();
        let coeffs = reflection_coefficients(Self::ORDER);
        let width = len / (2 * coeffs.len()) as f64;
        let mut values = vec![0.0; n * d];
        let (mut tmp, mut tmp2) = (vec![0.0; d], vec![0.0; d]);
        for j in 0..n {
            let t = (j as f64 + 0.5) * h;
            let out = &mut values[j * d..(j + 1) * d];
            if t < len {
                u.interpolate_at(t, out);
            } else if t < len + width {
                reflected_value(u, &coeffs, t, out, &mut tmp);
            } else if reflect_left && t > period - width {
                let s = period - t;
                let phi = smooth_cutoff((width - s) / width);
                for (i, c) in coeffs.iter().enumerate() {
                    u.interpolate_at((i + 1) as f64 * s, &mut tmp2);
                    for (o, v) in out.iter_mut().zip(&tmp2) {
                        *o += phi * c * v;
                    }
                }
            }
        }
        Ok(Self { h, period, d, values })
    }

    /// Cubic interpolation of periodic output samples back onto the nodes of `u`.
    pub fn evaluate(&self, samples: &[f64], u: &SampledFunction) -> Result<SampledFunction> {
        let n = samples.len() / self.d;
        let d = self.d;
        let mut out = vec![0.0; u.len() * d];
        for (i, &t) in u.grid().nodes().iter().enumerate() {
            let pos = t / self.h - 0.5;
            let base = pos.floor() as i64 - 1;
            let frac = pos - (base + 1) as f64;
            // Lagrange weights on offsets -1, 0, 1, 2
            let x = frac;
            let w = [
                -x * (x - 1.0) * (x - 2.0) / 6.0,
                (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
                -(x + 1.0) * x * (x - 2.0) / 2.0,
                (x + 1.0) * x * (x - 1.0) / 6.0,
            ];
            for (o, wk) in w.iter().enumerate() {
                let j = (base + o as i64).rem_euclid(n as i64) as usize;
                for c in 0..d {
                    out[i * d + c] += wk * samples[j * d + c];
                }
            }
        }
        u.with_values(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::{make_graded_grid, sample_scalar, Grading, Grid1D};

    fn graded(len: f64, n: usize) -> Arc<Grid1D> {
        Arc::new(make_graded_grid(TimeDomain::finite(len).unwrap(), n, Grading::default()).unwrap())
    }

    #[test]
    fn reflection_coefficients_match_moments() {
        for k in 0..=4 {
            let c = reflection_coefficients(k);
            for l in 0..=k {
                let s: f64 = c.iter().enumerate().map(|(j, c)| c * ((j + 1) as f64).powi(l as i32)).sum();
                let target = if l % 2 == 0 { 1.0 } else { -1.0 };
                assert!((s - target).abs() < 1e-9, "k={k} l={l} {s}");
            }
        }
        assert_eq!(reflection_coefficients(0), vec![1.0]);
    }

    #[test]
    fn extend_zero_restriction_and_continuity() {
        let g = graded(1.0, 128);
        let wp = WeightParams::new(2.0, 0.75).unwrap();
        let u = sample_scalar(|t| t * t * (1.0 + t), g.clone()).unwrap();
        let e = extend_zero(&u, wp).unwrap();
        assert_eq!(&e.values()[..u.len()], u.values());
        assert_eq!(e.grid().length(), 2.0);
        // continuity across T: first extension node vs last original node
        let n = u.len();
        let jump = (e.values()[n] - e.values()[n - 1]).abs();
        assert!(jump < 0.1, "{jump}");
        // formula check at t = 2T - t_i: t_i near T gives psi ~ 1
        let ti = u.grid().nodes()[n - 1];
        let mut tmp = [0.0];
        u.interpolate_at(2.0 * ti - 1.0, &mut tmp);
        let psi = |tau: f64| 2.0 * tau - tau * tau;
        let expect = 3.0 * psi(ti).powf(0.25) * u.values()[n - 1] - 2.0 * psi(2.0 * ti - 1.0).powf(0.25) * tmp[0];
        assert!((e.values()[n] - expect).abs() < 1e-14);
    }

    #[test]
    fn extend_zero_value_at_t_is_continuous_formula() {
        // psi(T) = 1, so both reflected terms meet at 3u(T) - 2u(T) = u(T).
        let psi_t: f64 = (2.0 * 1.0 * 1.0 - 1.0) / 1.0;
        assert_eq!(3.0 * psi_t.powf(0.3) - 2.0 * psi_t.powf(0.3), 1.0);
    }

    #[test]
    fn extend_general_constant_gives_cutoff() {
        let g = graded(1.0, 128);
        let u = sample_scalar(|_| 1.0, g).unwrap();
        let e = extend_general(&u, 1).unwrap();
        let t_k = 1.0 + 1.0 / 4.0;
        for (i, &t) in e.grid().nodes().iter().enumerate() {
            let v = e.values()[i];
            assert!(v <= 1.0 + 1e-12);
            if t < 1.0 {
                assert_eq!(v, 1.0);
            } else if t < t_k {
                assert!((v - smooth_cutoff((t_k - t) / 0.25)).abs() < 1e-12);
            } else {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn extend_general_support_and_smoothness() {
        let g = graded(2.0, 256);
        let u = sample_scalar(|t| (3.0 * t).sin() + t * t, g).unwrap();
        for k in 1..=4 {
            let e = extend_general(&u, k).unwrap();
            let t_k = 2.0 + 2.0 / (2 * k + 2) as f64;
            for (i, &t) in e.grid().nodes().iter().enumerate() {
                if t >= t_k {
                    assert_eq!(e.values()[i], 0.0);
                }
            }
            // continuity across T
            let n = u.len();
            let h = *u.grid().weights().last().unwrap();
            assert!((e.values()[n] - e.values()[n - 1]).abs() < 10.0 * h);
        }
    }

    #[test]
    fn extend_general_rejects_coarse_grid() {
        let g = Arc::new(make_graded_grid(TimeDomain::finite(1.0).unwrap(), 8, Grading::Uniform).unwrap());
        let u = sample_scalar(|t| t, g).unwrap();
        assert!(matches!(extend_general(&u, 4), Err(Error::GridTooCoarse(_))));
    }

    #[test]
    fn spatial_extension() {
        let y = SpatialAxis::periodic(64, 1.0).unwrap();
        let c = HalfTorusSample::from_fn(None, y, |_, _| 3.0).unwrap();
        let e = extend_spatial(&c, 2).unwrap();
        assert!(e.values().iter().all(|v| (v - 3.0).abs() < 1e-12));

        let cosp = HalfTorusSample::from_fn(None, y, |_, y| (2.0 * y).cos()).unwrap();
        let e = extend_spatial(&cosp, 1).unwrap();
        // restriction recovers u
        assert_eq!(&e.values()[..=32], &cosp.values[..]);
        // jump of first difference across y = 0
        let h = y.step();
        let v = e.values();
        let right = (v[1] - v[0]) / h;
        let left = (v[0] - v[63]) / h;
        assert!((right - left).abs() <= 4.0 * h, "{right} {left}");
    }

    #[test]
    fn periodized_roundtrip_on_nodes() {
        let g = graded(1.0, 64);
        let u = sample_scalar(|t| (2.0 * t).cos(), g).unwrap();
        let p = Periodized::new(&u, true).unwrap();
        let back = p.evaluate(&p.values, &u).unwrap();
        for (a, b) in back.values().iter().zip(u.values()) {
            assert!((a - b).abs() < 1e-5, "{a} {b}");
        }
    }
}
