//! Spontaneous-emission rates with and without phonon dressing, and Purcell
//! spectra.
//!
//! The phonon-modified rate is the time integral
//! `2 int_0^inf Re[C_pn(tau) J_ph(tau)] dtau`. Since `C_pn` settles to the
//! plateau `<B>^2` while `J_ph` may still ring, the integral is split as
//! `<B>^2 * gamma + 2 int Re[(C_pn - <B>^2) J_ph]`: the plateau part is the
//! bare rate, whose time integral is `2 pi J_ph(omega_L)` in closed form, and
//! the remainder decays on the phonon time scale and is integrated on the
//! phase-table grid.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::PhotonReservoir;
use crate::phonon::PhaseTable;
use crate::photon::{photon_spectral_density, ReservoirKernel};
use crate::quadrature::{corrected_trapezoid, fourier_trapezoid};
use crate::units::{HBAR_MEV_PS, UNITS};

/// Phonon-free emission rate (ueV) for a laser at `omega_l` (meV).
pub fn se_rate_bare(reservoir: &PhotonReservoir, omega_l: f64) -> f64 {
    2.0 * std::f64::consts::PI * photon_spectral_density(omega_l, reservoir) * 1e3
}

/// `2 int Re[J(tau)] dtau` (ueV) for a correlation sampled with step `dt`.
pub fn se_rate_from_correlation(correlation: &[C64], dt: f64) -> f64 {
    2.0 / HBAR_MEV_PS * corrected_trapezoid(correlation, dt).re * 1e3
}

/// Phonon-dressed emission rates for one phase table and one reservoir.
pub struct PolaronRates<'a> {
    table: &'a PhaseTable,
    kernel: &'a ReservoirKernel,
    dressed: Vec<C64>,
}

impl<'a> PolaronRates<'a> {
    pub fn new(table: &'a PhaseTable, kernel: &'a ReservoirKernel) -> Result<Self> {
        if kernel.kernel.len() != table.tau_grid.len() || (kernel.dt - table.dt()).abs() > 1e-12 * table.dt() {
            return Err(Error::Config("photon kernel and phase table use different tau grids".into()));
        }
        table.ensure_tail()?;
        let b2 = table.b_squared();
        let dressed = table.correlation.iter().zip(&kernel.kernel).map(|(c, k)| (c - b2) * k).collect();
        Ok(PolaronRates { table, kernel, dressed })
    }

    pub fn reservoir(&self) -> &PhotonReservoir {
        &self.kernel.grid.variant
    }

    fn check_laser(&self, omega_l: f64) -> Result<()> {
        if !self.kernel.grid.window.contains(omega_l) {
            return Err(Error::Domain(format!("laser energy {omega_l} meV outside the frequency window")));
        }
        Ok(())
    }

    /// Phonon-free rate, ueV.
    pub fn bare(&self, omega_l: f64) -> Result<f64> {
        self.check_laser(omega_l)?;
        Ok(se_rate_bare(self.reservoir(), omega_l))
    }

    /// Phonon-modified rate, ueV.
    pub fn polaron(&self, omega_l: f64) -> Result<f64> {
        let bare = self.bare(omega_l)?;
        let nu = UNITS.mev_to_rad_per_ps(omega_l - self.kernel.reference);
        let sideband = 2.0 / HBAR_MEV_PS * fourier_trapezoid(&self.dressed, self.kernel.dt, nu).re * 1e3;
        Ok(self.table.b_squared() * bare + sideband)
    }
}

/// Phonon-modified emission rate (ueV) at laser energy `omega_l`.
pub fn se_rate_polaron(table: &PhaseTable, kernel: &ReservoirKernel, omega_l: f64) -> Result<f64> {
    PolaronRates::new(table, kernel)?.polaron(omega_l)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurcellSpectrum {
    /// Detuning from the reservoir's reference energy, meV.
    pub detuning_axis: Vec<f64>,
    pub pf_phonon: Vec<f64>,
    pub pf_bare: Vec<f64>,
}

/// Purcell factors `gamma~/gamma_b` and `gamma/gamma_b` over absolute
/// energies `omega_grid`. With `background_add` the background rate is added
/// to both rates before normalising.
pub fn purcell_spectrum(
    table: &PhaseTable,
    kernel: &ReservoirKernel,
    omega_grid: &[f64],
    gamma_b: f64,
    background_add: bool,
    origin: f64,
) -> Result<PurcellSpectrum> {
    if !(gamma_b > 0.0) {
        return Err(Error::invalid("gamma_b", "Purcell factors need gamma_b > 0"));
    }
    let rates = PolaronRates::new(table, kernel)?;
    let offset = if background_add { gamma_b } else { 0.0 };
    let pairs: Vec<(f64, f64)> = omega_grid
        .par_iter()
        .map(|&w| Ok(((rates.bare(w)? + offset) / gamma_b, (rates.polaron(w)? + offset) / gamma_b)))
        .collect::<Result<_>>()?;
    let spectrum = PurcellSpectrum {
        detuning_axis: omega_grid.iter().map(|w| w - origin).collect(),
        pf_bare: pairs.iter().map(|p| p.0).collect(),
        pf_phonon: pairs.iter().map(|p| p.1).collect(),
    };
    if spectrum.pf_bare.iter().chain(&spectrum.pf_phonon).any(|&v| !(v > 0.0)) {
        return Err(Error::NegativeRate { name: "purcell factor", value: 0.0 });
    }
    Ok(spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FrequencyConvention, PhononBath};
    use crate::phonon::{phase_function, PhononNumerics};
    use crate::photon::{FrequencyWindow, ReservoirGrid};

    const WX: f64 = 1440.0;

    fn numerics() -> PhononNumerics {
        PhononNumerics { n_tau: 2000, n_omega: 1000, ..PhononNumerics::default() }
    }

    fn kernel(r: &PhotonReservoir, n: &PhononNumerics) -> ReservoirKernel {
        let window = FrequencyWindow::new(WX, 25.0, 0.004, 1e-3).unwrap();
        let grid = ReservoirGrid::new(r, &window).unwrap();
        ReservoirKernel::new(grid, WX, n.dt(), n.n_tau).unwrap()
    }

    #[test]
    fn bare_rate_lorentzian_closed_forms() {
        let r = PhotonReservoir::lorentzian(0.05, 0.6, WX).unwrap();
        let on = se_rate_bare(&r, WX);
        assert!((on / (4.0 * 0.0025 / 0.6 * 1e3) - 1.0).abs() < 1e-12);
        for d in [0.3, 0.6, 1.2] {
            let v = se_rate_bare(&r, WX + d);
            let exact = 0.0025 * 0.6 / (d * d + 0.09) * 1e3;
            assert!((v / exact - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn time_domain_bare_rate_matches_closed_form() {
        let c = crate::model::LorentzianCavity { g: 0.05, kappa: 0.6, omega_c: WX };
        let dt = 0.002;
        let taus: Vec<f64> = (0..=40000).map(|k| k as f64 * dt).collect();
        for d in [0.0, 0.3, 1.2] {
            let j: Vec<C64> =
                taus.iter().map(|&t| crate::photon::lorentzian_correlation(&c, WX + d, t)).collect();
            let got = se_rate_from_correlation(&j, dt);
            let exact = 0.0025 * 0.6 / (d * d + 0.09) * 1e3;
            assert!((got / exact - 1.0).abs() < 1e-3, "{d}: {got} vs {exact}");
        }
    }

    #[test]
    fn no_phonons_means_no_dressing() {
        let n = numerics();
        let bath = PhononBath::new(0.0, 1.0, 40.0, FrequencyConvention::Ordinary).unwrap();
        let table = phase_function(&bath, &n).unwrap();
        let r = PhotonReservoir::lorentzian(0.05, 0.6, WX + 1.0).unwrap();
        let k = kernel(&r, &n);
        let rates = PolaronRates::new(&table, &k).unwrap();
        for d in [-3.0, -1.0, 0.0, 0.5, 2.5] {
            let a = rates.bare(WX + d).unwrap();
            let b = rates.polaron(WX + d).unwrap();
            assert!(((a - b) / a).abs() < 1e-10);
        }
    }

    #[test]
    fn flat_reservoir_is_phonon_transparent() {
        let n = numerics();
        let table = phase_function(&PhononBath::inas(40.0), &n).unwrap();
        let r = PhotonReservoir::flat(1.0, WX, None).unwrap();
        let k = kernel(&r, &n);
        let g = se_rate_polaron(&table, &k, WX + 0.5).unwrap();
        assert!((g - 1.0).abs() < 1e-2, "{g}");
    }

    #[test]
    fn phonons_smooth_the_cavity_rate() {
        let n = numerics();
        let table = phase_function(&PhononBath::inas(40.0), &n).unwrap();
        let r = PhotonReservoir::lorentzian(0.05, 0.6, WX + 1.0).unwrap();
        let k = kernel(&r, &n);
        let rates = PolaronRates::new(&table, &k).unwrap();
        let on = WX + 1.0;
        assert!(rates.polaron(on).unwrap() < rates.bare(on).unwrap());
        for off in [on - 2.0, on + 2.0] {
            assert!(rates.polaron(off).unwrap() > rates.bare(off).unwrap());
        }
    }

    #[test]
    fn purcell_pf_bare_is_symmetric() {
        let n = numerics();
        let table = phase_function(&PhononBath::inas(10.0), &n).unwrap();
        let r = PhotonReservoir::lorentzian(0.05, 0.6, WX + 1.0).unwrap();
        let k = kernel(&r, &n);
        let grid: Vec<f64> = (-100..=100).map(|i| WX + 1.0 + 0.02 * i as f64).collect();
        let s = purcell_spectrum(&table, &k, &grid, 1.0, true, WX + 1.0).unwrap();
        let m = s.pf_bare.len();
        for i in 0..m {
            assert!((s.pf_bare[i] - s.pf_bare[m - 1 - i]).abs() < 1e-6 * s.pf_bare[i]);
        }
        let max_bare = s.pf_bare.iter().cloned().fold(0.0, f64::max);
        let max_phonon = s.pf_phonon.iter().cloned().fold(0.0, f64::max);
        assert!(max_phonon <= max_bare);
    }

    #[test]
    fn laser_outside_window_is_rejected() {
        let n = numerics();
        let table = phase_function(&PhononBath::inas(10.0), &n).unwrap();
        let r = PhotonReservoir::lorentzian(0.05, 0.6, WX + 1.0).unwrap();
        let k = kernel(&r, &n);
        assert!(se_rate_polaron(&table, &k, WX + 30.0).is_err());
    }
}
