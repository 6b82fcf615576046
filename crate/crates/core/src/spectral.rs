//! FFT plumbing for Fourier multipliers on periodic samples.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Angular wavenumber of FFT bin `j` for `n` samples over `period`.
pub fn wavenumber(j: usize, n: usize, period: f64) -> f64 {
    let k = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
    2.0 * std::f64::consts::PI * k / period
}

/// Forward DFT, unnormalized.
pub fn fft(data: &mut [Complex64]) {
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(data.len()).process(data);
}

/// Inverse DFT including the `1/n` factor.
pub fn ifft(data: &mut [Complex64]) {
    let n = data.len();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(data);
    let s = 1.0 / n as f64;
    data.iter_mut().for_each(|c| *c *= s);
}

/// Applies `m(xi)` to real periodic samples taken at uniform spacing over
/// `period`. The sample offset does not matter for a multiplier. Returns the
/// real part of the result.
pub fn apply_multiplier(values: &[f64], period: f64, m: impl Fn(f64) -> Complex64) -> Vec<f64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft(&mut buf);
    for (j, c) in buf.iter_mut().enumerate() {
        *c *= m(wavenumber(j, n, period));
    }
    ifft(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Applies the same multiplier to `d` interleaved real components.
pub fn apply_multiplier_interleaved(values: &[f64], d: usize, period: f64, m: impl Fn(f64) -> Complex64) -> Vec<f64> {
    let n = values.len() / d;
    let symbols: Vec<Complex64> = (0..n).map(|j| m(wavenumber(j, n, period))).collect();
    let mut out = vec![0.0; values.len()];
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..d {
        for j in 0..n {
            buf[j] = Complex64::new(values[j * d + c], 0.0);
        }
        fwd.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&symbols) {
            *b *= s;
        }
        inv.process(&mut buf);
        for j in 0..n {
            out[j * d + c] = buf[j].re / n as f64;
        }
    }
    out
}

/// In-place n-dimensional transform of a row-major array with the given shape.
pub fn fft_nd(data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    let total: usize = shape.iter().product();
    debug_assert_eq!(total, data.len());
    let mut stride = 1;
    for axis in (0..shape.len()).rev() {
        let n = shape[axis];
        let plan = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let block = n * stride;
        for outer in 0..total / block {
            for inner in 0..stride {
                let base = outer * block + inner;
                for j in 0..n {
                    line[j] = data[base + j * stride];
                }
                plan.process(&mut line);
                for j in 0..n {
                    data[base + j * stride] = line[j];
                }
            }
        }
        stride *= n;
    }
    if inverse {
        let s = 1.0 / total as f64;
        data.iter_mut().for_each(|c| *c *= s);
    }
}

/// Wavenumber vector of the multi-index encoded by `flat` in a row-major
/// array with the given shape and periods.
pub fn wavevector(flat: usize, shape: &[usize], periods: &[f64], out: &mut [f64]) {
    let mut rem = flat;
    for axis in (0..shape.len()).rev() {
        let j = rem % shape[axis];
        rem /= shape[axis];
        out[axis] = wavenumber(j, shape[axis], periods[axis]);
    }
}

/// Applies a multiplier `m(xi)` to one real n-dimensional periodic array.
pub fn apply_multiplier_nd(
    values: &[f64],
    shape: &[usize],
    periods: &[f64],
    m: impl Fn(&[f64]) -> Complex64,
) -> Vec<f64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut buf, shape, false);
    let mut xi = vec![0.0; shape.len()];
    for (flat, c) in buf.iter_mut().enumerate() {
        wavevector(flat, shape, periods, &mut xi);
        *c *= m(&xi);
    }
    fft_nd(&mut buf, shape, true);
    buf.into_iter().map(|c| c.re).collect()
}
