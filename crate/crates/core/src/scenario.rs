//! Scenario files: a strict TOML schema describing one figure reproduction.
//!
//! Energies in meV, rates in ueV, temperatures in K, times in ps. Reservoir
//! positions are offsets from the exciton zero-phonon line `omega_x`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{
    CoupledCavityWaveguide, DriveConfig, FrequencyConvention, ModeVolume, PhononBath, PhotonReservoir,
};
use crate::emission::{purcell_spectrum, PurcellSpectrum};
use crate::phonon::PhononNumerics;
use crate::photon::FrequencyWindow;
use crate::pli::{refined_detuning_grid, PliEngine, PliSetup, PliSpectra};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub bath: BathSection,
    pub reservoir: ReservoirSection,
    pub background: BackgroundSection,
    pub drive: DriveSection,
    #[serde(default)]
    pub purcell: Option<PurcellSection>,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    /// Quoted coupling `alpha_p / (2 pi)^2`, ps^2.
    pub alpha_p: f64,
    /// Phonon cutoff, meV.
    pub omega_b: f64,
    /// K.
    pub temperature: f64,
    /// Optional temperatures for the dip-versus-T sweep, K.
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub convention: FrequencyConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReservoirSection {
    /// Uses the background rate as its level.
    Flat {
        #[serde(default)]
        bandwidth: Option<f64>,
    },
    LorentzianCavity {
        g: f64,
        kappa: f64,
        /// `omega_c - omega_x`, meV.
        offset: f64,
    },
    CoupledCavityWaveguide {
        /// `omega_u - omega_x`, meV.
        upper_offset: f64,
        /// `omega_l - omega_x`, meV.
        lower_offset: f64,
        kappa_u: f64,
        kappa_l: f64,
        /// Debye.
        #[serde(default)]
        dipole_debye: Option<f64>,
        #[serde(default)]
        n_b: Option<f64>,
        #[serde(default)]
        mode_volume: Option<ModeVolume>,
        /// meV. Alternative to dipole, index and mode volume.
        #[serde(default)]
        coupling_scale: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundSection {
    /// ueV.
    pub gamma_b: f64,
    /// Add the background rate to the reservoir rate.
    #[serde(default = "yes")]
    pub add: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    /// Zero-phonon line, meV.
    pub omega_x: f64,
    /// ueV.
    pub eta_x: f64,
    #[serde(default = "default_delta_min")]
    pub delta_min: f64,
    #[serde(default = "default_delta_max")]
    pub delta_max: f64,
    #[serde(default = "default_delta_points")]
    pub n_points: usize,
    /// Subdivision factor near the reservoir feature.
    #[serde(default = "default_refine_factor")]
    pub refine_factor: usize,
    /// Half-width of the refined region in units of the feature linewidth.
    #[serde(default = "default_refine_linewidths")]
    pub refine_linewidths: f64,
}

fn default_delta_min() -> f64 {
    -3.0
}
fn default_delta_max() -> f64 {
    3.0
}
fn default_delta_points() -> usize {
    1201
}
fn default_refine_factor() -> usize {
    4
}
fn default_refine_linewidths() -> f64 {
    3.0
}

/// Detuning grid for the Purcell spectrum, relative to the reservoir's
/// reference energy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PurcellSection {
    pub detuning_min: f64,
    pub detuning_max: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub tau_max: f64,
    pub n_tau: usize,
    pub n_omega: usize,
    pub omega_cut_factor: f64,
    pub quadrature_tol: f64,
    pub tail_tol: f64,
    /// Half-width of the photon frequency window around `omega_x`, meV.
    pub window_half_width: f64,
    /// meV.
    pub window_spacing: f64,
    pub edge_tol: f64,
}

impl Default for NumericsSection {
    fn default() -> Self {
        let p = PhononNumerics::default();
        NumericsSection {
            tau_max: p.tau_max,
            n_tau: p.n_tau,
            n_omega: p.n_omega,
            omega_cut_factor: p.omega_cut_factor,
            quadrature_tol: p.quadrature_tol,
            tail_tol: p.tail_tol,
            window_half_width: 25.0,
            window_spacing: 0.002,
            edge_tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    /// Output directory, relative to the working directory.
    pub dir: Option<String>,
    pub plots: bool,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: None, plots: true }
    }
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text)?;
        s.setup()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)?;
        Ok((Self::from_toml(&text)?, text))
    }

    pub fn bath(&self) -> Result<PhononBath> {
        let b = &self.bath;
        PhononBath::new(b.alpha_p, b.omega_b, b.temperature, b.convention)
    }

    pub fn phonon_numerics(&self) -> PhononNumerics {
        let n = &self.numerics;
        PhononNumerics {
            tau_max: n.tau_max,
            n_tau: n.n_tau,
            n_omega: n.n_omega,
            omega_cut_factor: n.omega_cut_factor,
            quadrature_tol: n.quadrature_tol,
            tail_tol: n.tail_tol,
        }
    }

    pub fn window(&self) -> Result<FrequencyWindow> {
        let n = &self.numerics;
        FrequencyWindow::new(self.drive.omega_x, n.window_half_width, n.window_spacing, n.edge_tol)
    }

    pub fn reservoir(&self) -> Result<PhotonReservoir> {
        let wx = self.drive.omega_x;
        match &self.reservoir {
            ReservoirSection::Flat { bandwidth } => PhotonReservoir::flat(self.background.gamma_b, wx, *bandwidth),
            ReservoirSection::LorentzianCavity { g, kappa, offset } => {
                PhotonReservoir::lorentzian(*g, *kappa, wx + offset)
            }
            ReservoirSection::CoupledCavityWaveguide {
                upper_offset,
                lower_offset,
                kappa_u,
                kappa_l,
                dipole_debye,
                n_b,
                mode_volume,
                coupling_scale,
            } => {
                let (u, l) = (wx + upper_offset, wx + lower_offset);
                let wg = match (coupling_scale, dipole_debye, n_b, mode_volume) {
                    (Some(s), None, None, None) => CoupledCavityWaveguide::from_scale(u, l, *kappa_u, *kappa_l, *s)?,
                    (None, Some(d), Some(n), Some(v)) => {
                        CoupledCavityWaveguide::from_dipole(u, l, *kappa_u, *kappa_l, *d, *n, *v)?
                    }
                    _ => {
                        return Err(Error::Config(
                            "reservoir: give either `coupling_scale` or all of `dipole_debye`, `n_b`, `mode_volume`"
                                .into(),
                        ))
                    }
                };
                Ok(PhotonReservoir::CoupledCavityWaveguide(wg))
            }
        }
    }

    pub fn detuning_grid(&self, reservoir: &PhotonReservoir) -> Result<Vec<f64>> {
        let d = &self.drive;
        let refine = reservoir.feature().map(|f| {
            let c = d.omega_x - f.center;
            let hw = d.refine_linewidths * f.linewidth;
            (c - hw, c + hw)
        });
        refined_detuning_grid(d.delta_min, d.delta_max, d.n_points, refine, d.refine_factor)
    }

    /// Validated computation setup.
    pub fn setup(&self) -> Result<PliSetup> {
        let bath = self.bath()?;
        if let Some(ts) = &self.bath.t_grid {
            if ts.is_empty() || ts.windows(2).any(|w| !(w[1] > w[0])) || ts.iter().any(|t| !(*t >= 0.0)) {
                return Err(Error::invalid("bath.t_grid", "must be non-empty, non-negative and strictly increasing"));
            }
        }
        let reservoir = self.reservoir()?;
        let window = self.window()?;
        let numerics = self.phonon_numerics();
        let drive = DriveConfig::new(self.drive.eta_x, self.detuning_grid(&reservoir)?, self.drive.omega_x)?;
        if let Some(p) = &self.purcell {
            if !(p.detuning_max > p.detuning_min) || p.n_points < 2 {
                return Err(Error::invalid("purcell", "need detuning_min < detuning_max and n_points >= 2"));
            }
        }
        if !(self.background.gamma_b > 0.0) {
            return Err(Error::invalid("background.gamma_b", "must be > 0"));
        }
        Ok(PliSetup {
            bath,
            reservoir,
            window,
            numerics,
            drive,
            gamma_b: self.background.gamma_b,
            background_add: self.background.add,
        })
    }

    /// Same scenario with `n_omega`, `n_tau` and the window density doubled.
    pub fn refined(&self) -> Self {
        let mut s = self.clone();
        s.numerics.n_omega *= 2;
        s.numerics.n_tau *= 2;
        s.numerics.window_spacing *= 0.5;
        s
    }

    /// Absolute energies of the Purcell grid and the axis origin.
    pub fn purcell_grid(&self, reservoir: &PhotonReservoir) -> Option<(Vec<f64>, f64)> {
        let p = self.purcell.as_ref()?;
        let origin = reservoir.feature().map(|f| f.axis_origin).unwrap_or(self.drive.omega_x);
        let h = (p.detuning_max - p.detuning_min) / (p.n_points - 1) as f64;
        let grid = (0..p.n_points).map(|k| origin + p.detuning_min + k as f64 * h).collect();
        Some((grid, origin))
    }
}

/// Quadrature diagnostics of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub b_avg: f64,
    /// meV.
    pub polaron_shift: f64,
    pub phase_quadrature_residual: f64,
    pub phase_tail_residual: f64,
    /// `J(edge) / max J` on the frequency window.
    pub window_edge_ratio: f64,
    /// Detunings where `gamma_cd` is below the default validation floor.
    pub negative_gamma_cd_points: usize,
}

/// Everything a scenario produces.
#[derive(Debug, Clone)]
pub struct ScenarioResults {
    pub pli: PliSpectra,
    pub purcell: Option<PurcellSpectrum>,
    /// Columns `dip_bare`, `dip_phonon` over temperature.
    pub dip_vs_t: Option<crate::model::Spectrum>,
    pub diagnostics: Diagnostics,
}

impl Scenario {
    /// Runs the PLI spectra, the Purcell spectrum and the temperature sweep
    /// described by the scenario.
    pub fn compute(&self) -> Result<ScenarioResults> {
        let engine = PliEngine::new(self.setup()?)?;
        let table = engine.phase_table(self.bath.temperature)?;
        let pli = engine.spectra_with(&table)?;
        let purcell = match self.purcell_grid(&engine.setup.reservoir) {
            Some((grid, origin)) => Some(purcell_spectrum(
                &table,
                &engine.kernel,
                &grid,
                engine.setup.gamma_b,
                engine.setup.background_add,
                origin,
            )?),
            None => None,
        };
        let dip_vs_t = match &self.bath.t_grid {
            Some(ts) => Some(engine.temperature_sweep(ts)?),
            None => None,
        };
        let diagnostics = Diagnostics {
            b_avg: table.b_avg,
            polaron_shift: table.polaron_shift,
            phase_quadrature_residual: table.quadrature_residual,
            phase_tail_residual: table.tail_residual,
            window_edge_ratio: engine.kernel.grid.edge_ratio(),
            negative_gamma_cd_points: pli.negative_gamma_cd.len(),
        };
        Ok(ScenarioResults { pli, purcell, dip_vs_t, diagnostics })
    }
}

/// Hex SHA-256 of the scenario text.
pub fn scenario_hash(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAVITY: &str = r#"
name = "t"
[bath]
alpha_p = 0.06
omega_b = 1.0
temperature = 40.0
t_grid = [10.0, 20.0]

[reservoir]
kind = "lorentzian_cavity"
g = 0.05
kappa = 0.6
offset = 1.0

[background]
gamma_b = 1.0

[drive]
omega_x = 1440.0
eta_x = 0.4
n_points = 61

[purcell]
detuning_min = -3.0
detuning_max = 3.0
n_points = 11
"#;

    #[test]
    fn parses_and_builds() {
        let s = Scenario::from_toml(CAVITY).unwrap();
        let setup = s.setup().unwrap();
        assert_eq!(setup.bath.convention, FrequencyConvention::Ordinary);
        assert!(setup.background_add);
        let g = &setup.drive.delta_xl_grid;
        assert!(g.len() > 61);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        let (pg, origin) = s.purcell_grid(&setup.reservoir).unwrap();
        assert_eq!(origin, 1441.0);
        assert_eq!(pg.len(), 11);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = CAVITY.replace("kappa = 0.6", "kappa = 0.6\nq = 2300");
        let e = Scenario::from_toml(&bad).unwrap_err();
        assert!(e.to_string().contains('q'), "{e}");
        let bad = CAVITY.replace("[drive]", "[drive]\nspeed = 1");
        assert!(Scenario::from_toml(&bad).is_err());
    }

    #[test]
    fn invalid_values_name_the_key() {
        let bad = CAVITY.replace("kappa = 0.6", "kappa = -0.6");
        let e = Scenario::from_toml(&bad).unwrap_err();
        assert!(e.to_string().contains("kappa"), "{e}");
    }

    #[test]
    fn waveguide_needs_one_parameterisation() {
        let wg = CAVITY.replace(
            "kind = \"lorentzian_cavity\"\ng = 0.05\nkappa = 0.6\noffset = 1.0",
            "kind = \"coupled_cavity_waveguide\"\nupper_offset = 1.0\nlower_offset = -1.0\nkappa_u = 0.05\nkappa_l = 0.05\ncoupling_scale = 1e-5",
        );
        assert!(Scenario::from_toml(&wg).is_ok());
        let both = wg.replace("coupling_scale = 1e-5", "coupling_scale = 1e-5\ndipole_debye = 50.0");
        assert!(Scenario::from_toml(&both).is_err());
    }

    #[test]
    fn refined_doubles_resolution() {
        let s = Scenario::from_toml(CAVITY).unwrap();
        let r = s.refined();
        assert_eq!(r.numerics.n_tau, 2 * s.numerics.n_tau);
        assert_eq!(r.numerics.n_omega, 2 * s.numerics.n_omega);
        assert_eq!(r.numerics.window_spacing, 0.5 * s.numerics.window_spacing);
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(scenario_hash("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
