//! Acoustic-phonon bath: spectral function, independent-boson phase,
//! displacement average, polaron shift, correlation function and the
//! phonon-mediated scattering rates.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::PhononBath;
use crate::quadrature::{fourier_trapezoid, simpson_weights};
use crate::units::{omega_coth, HBAR_MEV_PS, UNITS};

/// Grid and tolerance settings for the phonon quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononNumerics {
    /// ps.
    pub tau_max: f64,
    /// Number of tau intervals.
    pub n_tau: usize,
    /// Number of omega intervals (rounded up to even).
    pub n_omega: usize,
    /// Upper omega limit in units of `omega_b`.
    pub omega_cut_factor: f64,
    /// Largest relative change of phi allowed when n_omega is doubled.
    pub quadrature_tol: f64,
    /// Largest allowed `|C(tau_max) - <B>^2| / <B>^2`.
    pub tail_tol: f64,
}

impl Default for PhononNumerics {
    fn default() -> Self {
        PhononNumerics {
            tau_max: 10.0,
            n_tau: 4000,
            n_omega: 2000,
            omega_cut_factor: 8.0,
            quadrature_tol: 1e-6,
            tail_tol: 1e-3,
        }
    }
}

impl PhononNumerics {
    fn check(&self) -> Result<()> {
        if !(self.tau_max > 0.0) {
            return Err(Error::invalid("tau_max", "must be > 0"));
        }
        if self.n_tau < 2 {
            return Err(Error::invalid("n_tau", "need at least 2 intervals"));
        }
        if self.n_omega < 2 {
            return Err(Error::invalid("n_omega", "need at least 2 intervals"));
        }
        if !(self.omega_cut_factor > 0.0) {
            return Err(Error::invalid("omega_cut_factor", "must be > 0"));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        self.tau_max / self.n_tau as f64
    }
}

/// `J_pn(omega)` in 1/ps for a phonon energy `omega` in meV.
pub fn phonon_spectral_density(omega: f64, bath: &PhononBath) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    let w = UNITS.mev_to_rad_per_ps(omega);
    let wb = UNITS.mev_to_rad_per_ps(bath.omega_b);
    bath.alpha_rad() * w.powi(3) * (-w * w / (2.0 * wb * wb)).exp()
}

/// Independent-boson phase sampled on a uniform tau grid, plus everything
/// derived from it.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    pub bath: PhononBath,
    pub tau_grid: Vec<f64>,
    pub phi_values: Vec<C64>,
    pub phi_zero: f64,
    pub b_avg: f64,
    /// meV.
    pub polaron_shift: f64,
    /// `C_pn(tau) = exp(phi(tau) - phi(0))`.
    pub correlation: Vec<C64>,
    /// `exp(phi) - 1`, the integrand of the incoherent scattering rates.
    pub emission_kernel: Vec<C64>,
    /// `1 - exp(-phi)`, the integrand of the cross-dephasing rate.
    pub dephasing_kernel: Vec<C64>,
    /// Relative change of phi under omega-grid doubling.
    pub quadrature_residual: f64,
    /// `|C(tau_max) - <B>^2| / <B>^2`.
    pub tail_residual: f64,
    pub tail_tol: f64,
}

struct PhaseSampler {
    omegas: Vec<f64>,
    cos_weights: Vec<f64>,
    sin_weights: Vec<f64>,
}

impl PhaseSampler {
    fn new(bath: &PhononBath, omega_cut: f64, n_omega: usize) -> Self {
        let n = n_omega + n_omega % 2;
        let h = omega_cut / n as f64;
        let simpson = simpson_weights(n, h);
        let alpha = bath.alpha_rad();
        let wb = UNITS.mev_to_rad_per_ps(bath.omega_b);
        let mut omegas = Vec::with_capacity(n + 1);
        let mut cos_weights = Vec::with_capacity(n + 1);
        let mut sin_weights = Vec::with_capacity(n + 1);
        for (k, wk) in simpson.iter().enumerate() {
            let w = k as f64 * h;
            // J(w)/w^2 = alpha w exp(-w^2/2wb^2)
            let gauss = alpha * (-w * w / (2.0 * wb * wb)).exp();
            omegas.push(w);
            cos_weights.push(wk * gauss * omega_coth(w, bath.temperature));
            sin_weights.push(wk * gauss * w);
        }
        PhaseSampler { omegas, cos_weights, sin_weights }
    }

    fn phi(&self, tau: f64) -> C64 {
        let mut re = 0.0;
        let mut im = 0.0;
        for ((w, a), b) in self.omegas.iter().zip(&self.cos_weights).zip(&self.sin_weights) {
            let (s, c) = (w * tau).sin_cos();
            re += a * c;
            im -= b * s;
        }
        C64::new(re, im)
    }
}

/// Samples `phi(tau)` on `[0, tau_max]` by Simpson quadrature over
/// `(0, omega_cut_factor * omega_b]`, and fills `<B>`, the polaron shift and
/// the derived correlation kernels.
pub fn phase_function(bath: &PhononBath, numerics: &PhononNumerics) -> Result<PhaseTable> {
    numerics.check()?;
    let omega_cut = numerics.omega_cut_factor * UNITS.mev_to_rad_per_ps(bath.omega_b);
    let dt = numerics.dt();
    let tau_grid: Vec<f64> = (0..=numerics.n_tau).map(|k| k as f64 * dt).collect();

    let sampler = PhaseSampler::new(bath, omega_cut, numerics.n_omega);
    let mut phi_values: Vec<C64> = tau_grid.par_iter().map(|&t| sampler.phi(t)).collect();
    // sin(0) = 0 makes this exact already; pin it against rounding.
    phi_values[0].im = 0.0;
    let phi_zero = phi_values[0].re;

    let refined = PhaseSampler::new(bath, omega_cut, 2 * numerics.n_omega);
    let stride = (numerics.n_tau / 64).max(1);
    let probe: Vec<usize> = (0..=numerics.n_tau).step_by(stride).chain([numerics.n_tau]).collect();
    let max_change = probe
        .par_iter()
        .map(|&k| (refined.phi(tau_grid[k]) - phi_values[k]).norm())
        .reduce(|| 0.0, f64::max);
    let quadrature_residual = if phi_zero > 0.0 { max_change / phi_zero } else { max_change };
    if quadrature_residual > numerics.quadrature_tol {
        return Err(Error::NonConvergent { what: "phonon phase quadrature".into(), residual: quadrature_residual });
    }

    let b_avg = (-0.5 * phi_zero).exp();
    let b2 = b_avg * b_avg;

    let shift_weights = simpson_weights(sampler.omegas.len() - 1, omega_cut / (sampler.omegas.len() - 1) as f64);
    let alpha = bath.alpha_rad();
    let wb = UNITS.mev_to_rad_per_ps(bath.omega_b);
    let shift_rad: f64 = sampler
        .omegas
        .iter()
        .zip(&shift_weights)
        .map(|(w, wk)| wk * alpha * w * w * (-w * w / (2.0 * wb * wb)).exp())
        .sum();

    let correlation: Vec<C64> = phi_values.iter().map(|p| (p - phi_zero).exp()).collect();
    let emission_kernel: Vec<C64> = phi_values.iter().map(|p| p.exp() - 1.0).collect();
    let dephasing_kernel: Vec<C64> = phi_values.iter().map(|p| 1.0 - (-p).exp()).collect();

    let tail_residual = (correlation[numerics.n_tau] - b2).norm() / b2;

    Ok(PhaseTable {
        bath: *bath,
        tau_grid,
        phi_values,
        phi_zero,
        b_avg,
        polaron_shift: shift_rad * HBAR_MEV_PS,
        correlation,
        emission_kernel,
        dephasing_kernel,
        quadrature_residual,
        tail_residual,
        tail_tol: numerics.tail_tol,
    })
}

impl PhaseTable {
    pub fn dt(&self) -> f64 {
        self.tau_grid[1] - self.tau_grid[0]
    }

    pub fn tau_max(&self) -> f64 {
        *self.tau_grid.last().expect("non-empty grid")
    }

    pub fn b_squared(&self) -> f64 {
        self.b_avg * self.b_avg
    }

    pub fn ensure_tail(&self) -> Result<()> {
        if self.tail_residual > self.tail_tol {
            Err(Error::TailNotConverged { residual: self.tail_residual })
        } else {
            Ok(())
        }
    }
}

/// `C_pn(tau) = exp(phi(tau) - phi(0))`, linearly interpolating phi.
pub fn phonon_correlation(table: &PhaseTable, tau: f64) -> Result<C64> {
    let tau_max = table.tau_max();
    if !(0.0..=tau_max).contains(&tau) {
        return Err(Error::Domain(format!("tau = {tau} ps outside [0, {tau_max}]")));
    }
    if tau == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let x = tau / table.dt();
    let k = (x.floor() as usize).min(table.tau_grid.len() - 2);
    let frac = x - k as f64;
    let phi = table.phi_values[k] * (1.0 - frac) + table.phi_values[k + 1] * frac;
    Ok((phi - table.phi_zero).exp())
}

fn rate_prefactor(table: &PhaseTable, eta_x: f64) -> f64 {
    let eta = UNITS.uev_to_rate(eta_x);
    2.0 * table.b_squared() * eta * eta
}

/// Incoherent excitation and decay rates `(Gamma+, Gamma-)` in ueV for a
/// drive `eta_x` (ueV) at laser-exciton detuning `delta_xl` (meV).
pub fn phonon_scattering_rates(table: &PhaseTable, eta_x: f64, delta_xl: f64) -> Result<(f64, f64)> {
    table.ensure_tail()?;
    let nu = UNITS.mev_to_rad_per_ps(delta_xl);
    let pref = rate_prefactor(table, eta_x);
    let h = table.dt();
    let plus = pref * fourier_trapezoid(&table.emission_kernel, h, -nu).re;
    let minus = pref * fourier_trapezoid(&table.emission_kernel, h, nu).re;
    Ok((UNITS.rate_to_uev(plus), UNITS.rate_to_uev(minus)))
}

/// Cross-dephasing rate in ueV.
pub fn cross_dephasing(table: &PhaseTable, eta_x: f64, delta_xl: f64) -> Result<f64> {
    table.ensure_tail()?;
    let nu = UNITS.mev_to_rad_per_ps(delta_xl);
    let pref = rate_prefactor(table, eta_x);
    let h = table.dt();
    let a = fourier_trapezoid(&table.dephasing_kernel, h, nu);
    let b = fourier_trapezoid(&table.dephasing_kernel, h, -nu);
    Ok(UNITS.rate_to_uev(pref * 0.5 * (a + b).re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FrequencyConvention;

    fn quick() -> PhononNumerics {
        PhononNumerics { n_tau: 2000, n_omega: 1000, ..PhononNumerics::default() }
    }

    #[test]
    fn spectral_density_edges() {
        let bath = PhononBath::inas(4.0);
        assert_eq!(phonon_spectral_density(0.0, &bath), 0.0);
        let free = PhononBath::new(0.0, 1.0, 4.0, FrequencyConvention::Angular).unwrap();
        for e in [0.1, 1.0, 3.0] {
            assert_eq!(phonon_spectral_density(e, &free), 0.0);
        }
    }

    #[test]
    fn spectral_density_peak_at_sqrt3_omega_b() {
        let bath = PhononBath::inas(4.0);
        let h = 1e-4;
        let (arg, _) = (1..60000)
            .map(|k| k as f64 * h)
            .map(|e| (e, phonon_spectral_density(e, &bath)))
            .fold((0.0, f64::MIN), |acc, x| if x.1 > acc.1 { x } else { acc });
        assert!((arg - 3f64.sqrt() * bath.omega_b).abs() <= h);
    }

    #[test]
    fn zero_coupling_gives_trivial_table() {
        let bath = PhononBath::new(0.0, 1.0, 40.0, FrequencyConvention::Ordinary).unwrap();
        let t = phase_function(&bath, &quick()).unwrap();
        assert!(t.phi_values.iter().all(|p| p.norm() == 0.0));
        assert_eq!(t.b_avg, 1.0);
        assert_eq!(t.polaron_shift, 0.0);
        assert_eq!(phonon_scattering_rates(&t, 0.4, 0.7).unwrap(), (0.0, 0.0));
        assert_eq!(cross_dephasing(&t, 0.4, 0.7).unwrap(), 0.0);
    }

    #[test]
    fn phase_table_invariants() {
        let t = phase_function(&PhononBath::inas(40.0), &quick()).unwrap();
        assert_eq!(t.phi_values[0].im, 0.0);
        for p in &t.phi_values {
            assert!(p.re <= t.phi_zero + 1e-10);
        }
        for c in &t.correlation {
            assert!(c.norm() <= 1.0 + 1e-12);
        }
        assert!(t.tail_residual < 1e-3);
        let c_end = phonon_correlation(&t, t.tau_max()).unwrap();
        assert!((c_end.norm() - t.b_squared()).abs() < 1e-3 * t.b_squared());
        assert_eq!(phonon_correlation(&t, 0.0).unwrap(), C64::new(1.0, 0.0));
        assert!(phonon_correlation(&t, -0.1).is_err());
        assert!(phonon_correlation(&t, t.tau_max() + 0.1).is_err());
    }

    #[test]
    fn phase_is_hermitian_in_tau() {
        // phi(-tau) = conj(phi(tau)): the cosine part is even, the sine part odd.
        let bath = PhononBath::inas(20.0);
        let s = PhaseSampler::new(&bath, 8.0 * UNITS.mev_to_rad_per_ps(1.0), 1000);
        for tau in [0.1, 0.7, 2.5] {
            assert!((s.phi(-tau) - s.phi(tau).conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn b_decreases_with_temperature() {
        let bs: Vec<f64> = [4.0, 10.0, 20.0, 40.0]
            .iter()
            .map(|&t| phase_function(&PhononBath::inas(t), &quick()).unwrap().b_avg)
            .collect();
        for w in bs.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(bs.iter().all(|&b| b > 0.0 && b < 1.0));
    }

    #[test]
    fn polaron_shift_is_temperature_independent() {
        let a = phase_function(&PhononBath::inas(4.0), &quick()).unwrap();
        let b = phase_function(&PhononBath::inas(40.0), &quick()).unwrap();
        assert!(a.polaron_shift > 0.0);
        assert_eq!(a.polaron_shift, b.polaron_shift);
        // alpha wb^3 sqrt(pi/2) hbar, the Gaussian moment in closed form
        let wb = 1.0 / HBAR_MEV_PS;
        let exact = 0.06 * wb.powi(3) * (std::f64::consts::PI / 2.0).sqrt() * HBAR_MEV_PS;
        assert!((a.polaron_shift / exact - 1.0).abs() < 1e-8);
    }

    #[test]
    fn scattering_rate_symmetry_and_scaling() {
        let t = phase_function(&PhononBath::inas(40.0), &quick()).unwrap();
        for d in [-2.0, -0.5, 0.0, 0.3, 1.7] {
            let (p, _) = phonon_scattering_rates(&t, 0.4, d).unwrap();
            let (_, m) = phonon_scattering_rates(&t, 0.4, -d).unwrap();
            assert_eq!(p, m);
            assert_eq!(cross_dephasing(&t, 0.4, d).unwrap(), cross_dephasing(&t, 0.4, -d).unwrap());
            let (p2, m2) = phonon_scattering_rates(&t, 1.2, d).unwrap();
            assert!((p2 / p - 9.0).abs() < 1e-12);
            assert!((m2 / phonon_scattering_rates(&t, 0.4, d).unwrap().1 - 9.0).abs() < 1e-12);
        }
        let (p, m) = phonon_scattering_rates(&t, 0.4, -1.0).unwrap();
        assert!(p > m, "laser above the exciton favours phonon emission: {p} vs {m}");
    }

    #[test]
    fn unsettled_tail_is_an_error() {
        let numerics = PhononNumerics { tau_max: 0.3, n_tau: 300, ..quick() };
        let t = phase_function(&PhononBath::inas(4.0), &numerics).unwrap();
        assert!(matches!(phonon_scattering_rates(&t, 0.4, 0.0), Err(Error::TailNotConverged { .. })));
    }

    #[test]
    fn coarse_omega_grid_is_rejected() {
        let numerics = PhononNumerics { n_omega: 4, ..quick() };
        assert!(matches!(
            phase_function(&PhononBath::inas(40.0), &numerics),
            Err(Error::NonConvergent { .. })
        ));
    }
}
