//! Steady-state exciton population under weak cw drive, photoluminescence
//! intensity spectra over laser detuning, dip metrics and temperature sweeps.
//!
//! The PLI is reported as `n_x` itself. Detunings follow
//! `Delta_xL = omega_x - omega_L`, so a laser above the exciton has
//! `Delta_xL < 0`.

use rayon::prelude::*;

use crate::emission::PolaronRates;
use crate::error::{Error, Result};
use crate::model::{DriveConfig, PhononBath, PhotonReservoir, RateSet, ReservoirFeature, Spectrum};
use crate::phonon::{cross_dephasing, phase_function, phonon_scattering_rates, PhaseTable, PhononNumerics};
use crate::photon::{photon_spectral_density, FrequencyWindow, ReservoirGrid, ReservoirKernel};

/// Temperature-dependent pure dephasing, ueV. Clamped to the 1 K value below
/// 1 K.
pub fn pure_dephasing(temperature: f64) -> Result<f64> {
    if !(temperature >= 0.0) {
        return Err(Error::Domain(format!("temperature must be >= 0 K, got {temperature}")));
    }
    Ok(3.0 + 0.95 * (temperature.max(1.0) - 1.0))
}

/// Steady-state population
///
/// ```text
/// n_x = 1/2 [1 + (G+ - G- - gamma~) / (G+ + G- + gamma~ + 4 B^2 eta^2 (Gamma_pol + gamma_cd) / D)]
/// D = Gamma_pol^2 + Delta^2 - gamma_cd^2
/// ```
///
/// with rates and `eta_x` in ueV and `delta_xl` in meV.
pub fn exciton_population(rates: &RateSet, b_avg: f64, eta_x: f64, delta_xl: f64) -> Result<f64> {
    let delta = delta_xl * 1e3;
    let gp = rates.gamma_plus;
    let gm = rates.gamma_minus;
    let gt = rates.gamma_tilde;
    let gcd = rates.gamma_cd;
    let pol = 0.5 * (gp + gm + gt + rates.gamma_prime);
    let d = pol * pol + delta * delta - gcd * gcd;
    if !(d > 0.0) {
        return Err(Error::Singular { denominator: d });
    }
    let saturation = 4.0 * b_avg * b_avg * eta_x * eta_x * (pol + gcd) / d;
    let total = gp + gm + gt + saturation;
    if !(total > 0.0) {
        return Err(Error::Singular { denominator: total });
    }
    Ok(0.5 * (1.0 + (gp - gm - gt) / total))
}

/// Dip found in a PLI curve. Positions are on the `Delta_xL` axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DipMetric {
    pub dip_position: Option<f64>,
    pub peak_position: Option<f64>,
    pub dip_depth: f64,
}

/// Search range above the dip (in laser energy) for the reference maximum, meV.
pub const DIP_RIGHT_RANGE: f64 = 3.0;

impl DipMetric {
    pub fn none() -> Self {
        DipMetric::default()
    }
}

/// Depth of the PLI dip attached to a reservoir feature.
///
/// Works on the laser-energy offset `omega_L - omega_x = -Delta_xL`. The dip
/// is the local minimum of `n_x` closest to the feature that lies within its
/// search window; the reference is the highest `n_x` at larger laser energy,
/// up to [`DIP_RIGHT_RANGE`] away.
pub fn pli_dip_metric(delta_xl: &[f64], n_x: &[f64], feature: Option<&ReservoirFeature>, omega_x: f64) -> DipMetric {
    let Some(f) = feature else {
        return DipMetric::none();
    };
    if delta_xl.len() != n_x.len() || delta_xl.len() < 3 {
        return DipMetric::none();
    }
    // ascending laser offset
    let eps: Vec<f64> = delta_xl.iter().rev().map(|d| -d).collect();
    let n: Vec<f64> = n_x.iter().rev().cloned().collect();
    let center = f.center - omega_x;
    let dip = (1..eps.len() - 1)
        .filter(|&i| (eps[i] - center).abs() <= f.dip_half_window && n[i] < n[i - 1] && n[i] <= n[i + 1])
        .min_by(|&a, &b| (eps[a] - center).abs().total_cmp(&(eps[b] - center).abs()));
    let Some(i) = dip else {
        return DipMetric::none();
    };
    let peak = (i + 1..eps.len())
        .take_while(|&k| eps[k] <= eps[i] + DIP_RIGHT_RANGE)
        .max_by(|&a, &b| n[a].total_cmp(&n[b]));
    let Some(k) = peak else {
        return DipMetric::none();
    };
    DipMetric { dip_position: Some(-eps[i]), peak_position: Some(-eps[k]), dip_depth: (n[k] - n[i]).max(0.0) }
}

/// One PLI curve.
#[derive(Debug, Clone, PartialEq)]
pub struct PliResult {
    /// meV.
    pub delta_xl_axis: Vec<f64>,
    pub n_x: Vec<f64>,
    pub components: Vec<RateSet>,
    pub dip: DipMetric,
}

/// The three PLI variants plus the reservoir lineshape at the laser energy.
#[derive(Debug, Clone, PartialEq)]
pub struct PliSpectra {
    pub temperature: f64,
    pub b_avg: f64,
    /// Background emission only.
    pub no_reservoir: PliResult,
    /// Reservoir with the phonon-free rate.
    pub bare: PliResult,
    /// Reservoir with the phonon-modified rate.
    pub phonon: PliResult,
    /// `J_ph(omega_L)`, meV.
    pub lineshape: Vec<f64>,
    /// Detunings where `gamma_cd` came out below [`RateSet::GAMMA_CD_FLOOR`].
    pub negative_gamma_cd: Vec<f64>,
}

impl PliSpectra {
    pub fn delta_xl_axis(&self) -> &[f64] {
        &self.bare.delta_xl_axis
    }

    pub fn to_spectrum(&self) -> Result<Spectrum> {
        let mut s = Spectrum::new("delta_xL_meV", self.delta_xl_axis().to_vec());
        s.push("n_x_no_reservoir", self.no_reservoir.n_x.clone())?;
        s.push("n_x_bare_gamma", self.bare.n_x.clone())?;
        s.push("n_x_phonon_gamma", self.phonon.n_x.clone())?;
        s.push("J_ph_lineshape", self.lineshape.clone())?;
        let c = &self.phonon.components;
        s.push("gamma_plus_ueV", c.iter().map(|r| r.gamma_plus).collect())?;
        s.push("gamma_minus_ueV", c.iter().map(|r| r.gamma_minus).collect())?;
        s.push("gamma_cd_ueV", c.iter().map(|r| r.gamma_cd).collect())?;
        s.push("gamma_tilde_ueV", c.iter().map(|r| r.gamma_tilde).collect())?;
        s.metadata.insert("temperature_K".into(), format!("{}", self.temperature));
        s.metadata.insert("b_avg".into(), format!("{}", self.b_avg));
        Ok(s)
    }
}

/// Uniform grid on `[lo, hi]` with `n` points, subdivided `factor` times
/// inside `refine = (lo, hi)`.
pub fn refined_detuning_grid(lo: f64, hi: f64, n: usize, refine: Option<(f64, f64)>, factor: usize) -> Result<Vec<f64>> {
    if !(hi > lo) || n < 2 {
        return Err(Error::invalid("delta_xl_grid", "need lo < hi and at least two points"));
    }
    if factor == 0 {
        return Err(Error::invalid("refine_factor", "must be >= 1"));
    }
    let h = (hi - lo) / (n - 1) as f64;
    let mut out = Vec::with_capacity(n * factor);
    for k in 0..n {
        let a = lo + k as f64 * h;
        out.push(a);
        if k + 1 == n {
            break;
        }
        let b = a + h;
        if let Some((r0, r1)) = refine {
            if b > r0 && a < r1 {
                for j in 1..factor {
                    out.push(a + h * j as f64 / factor as f64);
                }
            }
        }
    }
    Ok(out)
}

/// Everything needed to compute PLI spectra for one scenario.
#[derive(Debug, Clone)]
pub struct PliSetup {
    pub bath: PhononBath,
    pub reservoir: PhotonReservoir,
    pub window: FrequencyWindow,
    pub numerics: PhononNumerics,
    pub drive: DriveConfig,
    /// Background rate, ueV.
    pub gamma_b: f64,
    /// Add the background to the reservoir rate.
    pub background_add: bool,
}

/// Precomputed photon kernel for a setup; reused across temperatures.
pub struct PliEngine {
    pub setup: PliSetup,
    pub kernel: ReservoirKernel,
}

impl PliEngine {
    pub fn new(setup: PliSetup) -> Result<Self> {
        if !(setup.gamma_b >= 0.0) {
            return Err(Error::invalid("gamma_b", "must be >= 0"));
        }
        let reservoir = setup.reservoir.validated(&setup.window)?;
        let setup = PliSetup { reservoir, ..setup };
        let grid = ReservoirGrid::new(&setup.reservoir, &setup.window)?;
        let kernel = ReservoirKernel::new(grid, setup.drive.omega_x, setup.numerics.dt(), setup.numerics.n_tau)?;
        Ok(PliEngine { setup, kernel })
    }

    pub fn phase_table(&self, temperature: f64) -> Result<PhaseTable> {
        phase_function(&self.setup.bath.with_temperature(temperature)?, &self.setup.numerics)
    }

    /// PLI spectra at the bath temperature of the setup.
    pub fn spectra(&self) -> Result<PliSpectra> {
        let table = phase_function(&self.setup.bath, &self.setup.numerics)?;
        self.spectra_with(&table)
    }

    /// PLI spectra for a given phase table.
    pub fn spectra_with(&self, table: &PhaseTable) -> Result<PliSpectra> {
        let setup = &self.setup;
        let temperature = table.bath.temperature;
        let gamma_prime = pure_dephasing(temperature)?;
        let rates = PolaronRates::new(table, &self.kernel)?;
        let eta = setup.drive.eta_x;
        let b = table.b_avg;
        let offset = if setup.background_add { setup.gamma_b } else { 0.0 };
        let points: Vec<(RateSet, RateSet, f64, [f64; 3])> = setup
            .drive
            .delta_xl_grid
            .par_iter()
            .map(|&d| {
                let at = |e: Error| Error::AtDetuning { delta_xl: d, source: Box::new(e) };
                let omega_l = setup.drive.laser_energy(d);
                let (gamma_plus, gamma_minus) = phonon_scattering_rates(table, eta, d).map_err(at)?;
                let gamma_cd = cross_dephasing(table, eta, d).map_err(at)?;
                let bare = rates.bare(omega_l).map_err(at)? + offset;
                let dressed = rates.polaron(omega_l).map_err(at)? + offset;
                let base = RateSet {
                    gamma_plus,
                    gamma_minus,
                    gamma_cd,
                    gamma_tilde: setup.gamma_b,
                    gamma_bare: bare,
                    gamma_prime,
                    gamma_b: setup.gamma_b,
                };
                let bare_set = base.with_gamma_tilde(bare);
                let phonon_set = base.with_gamma_tilde(dressed);
                let mut n = [0.0; 3];
                for (slot, set) in n.iter_mut().zip([&base, &bare_set, &phonon_set]) {
                    set.validate_signed_cd().map_err(at)?;
                    let v = exciton_population(set, b, eta, d).map_err(at)?;
                    if !(-1e-12..=1.0 + 1e-12).contains(&v) {
                        return Err(at(Error::Domain(format!("population {v} outside [0, 1]"))));
                    }
                    *slot = v;
                }
                let lineshape = photon_spectral_density(omega_l, &setup.reservoir);
                Ok((bare_set, phonon_set, lineshape, n))
            })
            .collect::<Result<_>>()?;

        let axis = setup.drive.delta_xl_grid.clone();
        let feature = setup.reservoir.feature();
        let omega_x = setup.drive.omega_x;
        let curve = |col: usize, components: Vec<RateSet>| {
            let n_x: Vec<f64> = points.iter().map(|p| p.3[col]).collect();
            let dip = pli_dip_metric(&axis, &n_x, feature.as_ref(), omega_x);
            PliResult { delta_xl_axis: axis.clone(), n_x, components, dip }
        };
        let base_components = points.iter().map(|p| p.0.with_gamma_tilde(setup.gamma_b)).collect();
        let mut no_reservoir = curve(0, base_components);
        no_reservoir.dip = DipMetric::none();
        Ok(PliSpectra {
            temperature,
            b_avg: b,
            no_reservoir,
            bare: curve(1, points.iter().map(|p| p.0).collect()),
            phonon: curve(2, points.iter().map(|p| p.1).collect()),
            lineshape: points.iter().map(|p| p.2).collect(),
            negative_gamma_cd: axis
                .iter()
                .zip(&points)
                .filter(|(_, p)| p.0.gamma_cd < RateSet::GAMMA_CD_FLOOR)
                .map(|(d, _)| *d)
                .collect(),
        })
    }

    /// Dip depth versus temperature for the bare and phonon-modified curves.
    pub fn temperature_sweep(&self, t_grid: &[f64]) -> Result<Spectrum> {
        if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("t_grid", "must be non-empty and strictly increasing"));
        }
        let mut bare = Vec::with_capacity(t_grid.len());
        let mut phonon = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            let at = |e: Error| Error::AtTemperature { temperature: t, source: Box::new(e) };
            let table = self.phase_table(t).map_err(at)?;
            let s = self.spectra_with(&table).map_err(at)?;
            bare.push(s.bare.dip.dip_depth);
            phonon.push(s.phonon.dip.dip_depth);
        }
        let mut out = Spectrum::new("temperature_K", t_grid.to_vec());
        out.push("dip_bare", bare)?;
        out.push("dip_phonon", phonon)?;
        Ok(out)
    }
}

/// PLI spectra for a setup.
pub fn pli_spectrum(setup: &PliSetup) -> Result<PliSpectra> {
    PliEngine::new(setup.clone())?.spectra()
}

/// Dip depth versus temperature; the phase table is rebuilt per temperature.
pub fn temperature_sweep(setup: &PliSetup, t_grid: &[f64]) -> Result<Spectrum> {
    PliEngine::new(setup.clone())?.temperature_sweep(t_grid)
}
