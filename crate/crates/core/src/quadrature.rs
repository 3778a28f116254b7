//! Fixed-grid quadrature rules shared by the phonon and photon kernels.

use num_complex::Complex64 as C64;

/// Composite Simpson weights for `n_intervals` (even) intervals of width `h`.
pub fn simpson_weights(n_intervals: usize, h: f64) -> Vec<f64> {
    assert!(n_intervals >= 2 && n_intervals % 2 == 0, "Simpson needs an even interval count");
    let mut w = vec![0.0; n_intervals + 1];
    for (k, wk) in w.iter_mut().enumerate() {
        *wk = if k == 0 || k == n_intervals {
            h / 3.0
        } else if k % 2 == 1 {
            4.0 * h / 3.0
        } else {
            2.0 * h / 3.0
        };
    }
    w
}

/// Trapezoid rule on a uniform grid with the leading Euler-Maclaurin endpoint
/// correction `-h^2/12 (f'(b) - f'(a))`, the derivatives taken from
/// second-order one-sided differences. Error is O(h^4) for smooth integrands.
pub fn corrected_trapezoid(values: &[C64], h: f64) -> C64 {
    let n = values.len();
    assert!(n >= 2, "need at least two samples");
    let mut sum: C64 = values.iter().sum();
    sum -= 0.5 * (values[0] + values[n - 1]);
    let mut total = sum * h;
    if n >= 3 {
        let da = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
        let db = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
        total -= h * h / 12.0 * (db - da);
    }
    total
}

/// `int_0^{(n-1)h} e^{i nu t} f(t) dt` on the uniform grid `t_k = k h`, using
/// [`corrected_trapezoid`]. The phase factor is advanced by recurrence and
/// reseeded periodically.
pub fn fourier_trapezoid(values: &[C64], h: f64, nu: f64) -> C64 {
    let n = values.len();
    assert!(n >= 2, "need at least two samples");
    let phase = |k: usize| C64::from_polar(1.0, nu * h * k as f64);
    let step = phase(1);
    let mut rot = C64::new(1.0, 0.0);
    let mut sum = C64::new(0.0, 0.0);
    for (k, f) in values.iter().enumerate() {
        if k % 512 == 0 {
            rot = phase(k);
        }
        sum += rot * f;
        rot *= step;
    }
    let g = |k: usize| phase(k) * values[k];
    sum -= 0.5 * (g(0) + g(n - 1));
    let mut total = sum * h;
    if n >= 3 {
        let da = (-3.0 * g(0) + 4.0 * g(1) - g(2)) / (2.0 * h);
        let db = (3.0 * g(n - 1) - 4.0 * g(n - 2) + g(n - 3)) / (2.0 * h);
        total -= h * h / 12.0 * (db - da);
    }
    total
}
