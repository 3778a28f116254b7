//! Shared domain types.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{DEBYE_C_M, EPSILON_0, HC_MEV_UM, MEV_J};

/// How the quoted phonon coupling relates to the angular frequencies used
/// inside the quadratures.
///
/// The coupling is quoted as `alpha_p / (2 pi)^2` in ps^2. With `Angular` the
/// factor `(2 pi)^2` is multiplied back in and `J_pn` is evaluated in rad/ps.
/// With `Ordinary` the quoted number is taken to already refer to rad/ps, which
/// is what one gets when `alpha_p` was defined against cycles/ps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyConvention {
    Angular,
    #[default]
    Ordinary,
}

/// Acoustic phonon bath with `J_pn(w) = alpha w^3 exp(-w^2 / 2 w_b^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhononBath {
    /// Quoted coupling `alpha_p / (2 pi)^2`, ps^2.
    pub alpha_p: f64,
    /// Cutoff energy, meV.
    pub omega_b: f64,
    /// K.
    pub temperature: f64,
    pub convention: FrequencyConvention,
}

impl PhononBath {
    pub fn new(alpha_p: f64, omega_b: f64, temperature: f64, convention: FrequencyConvention) -> Result<Self> {
        if !(alpha_p >= 0.0) || !alpha_p.is_finite() {
            return Err(Error::invalid("alpha_p", format!("must be >= 0, got {alpha_p}")));
        }
        if !(omega_b > 0.0) || !omega_b.is_finite() {
            return Err(Error::invalid("omega_b", format!("must be > 0, got {omega_b}")));
        }
        if !(temperature >= 0.0) || !temperature.is_finite() {
            return Err(Error::invalid("temperature", format!("must be >= 0, got {temperature}")));
        }
        Ok(PhononBath { alpha_p, omega_b, temperature, convention })
    }

    /// InAs dot parameters: `alpha_p/(2 pi)^2 = 0.06 ps^2`, `omega_b = 1 meV`.
    pub fn inas(temperature: f64) -> Self {
        PhononBath::new(0.06, 1.0, temperature, FrequencyConvention::default()).expect("valid constants")
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        PhononBath::new(self.alpha_p, self.omega_b, temperature, self.convention)
    }

    /// Coupling prefactor for `J_pn` with omega in rad/ps, ps^2.
    pub fn alpha_rad(&self) -> f64 {
        match self.convention {
            FrequencyConvention::Angular => self.alpha_p * (2.0 * std::f64::consts::PI).powi(2),
            FrequencyConvention::Ordinary => self.alpha_p,
        }
    }
}

/// Unstructured background reservoir with `J = gamma_b / 2 pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatBackground {
    /// ueV.
    pub gamma_b: f64,
    /// Absolute band centre, meV.
    pub center: f64,
    /// Full bandwidth in meV; `None` covers the whole evaluation window.
    pub bandwidth: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianCavity {
    /// QD-cavity coupling, meV.
    pub g: f64,
    /// Cavity linewidth (FWHM), meV.
    pub kappa: f64,
    /// Cavity energy, meV.
    pub omega_c: f64,
}

/// Mode volume together with its unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "unit", content = "value", rename_all = "snake_case")]
pub enum ModeVolume {
    CubicMicrons(f64),
    /// Units of `(lambda / n_b)^3` at the band centre.
    LambdaOverNCubed(f64),
}

/// Tight-binding coupled-cavity waveguide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledCavityWaveguide {
    /// Upper band edge, meV.
    pub omega_u: f64,
    /// Lower band edge, meV.
    pub omega_l: f64,
    pub kappa_u: f64,
    pub kappa_l: f64,
    /// `d^2 / (2 eps0 n_b^2 V_eff)` expressed in meV.
    pub coupling_scale: f64,
    /// +1 or -1, fixed so that the density is non-negative.
    pub branch_sign: f64,
}

impl CoupledCavityWaveguide {
    /// Builds the waveguide from a dipole moment (Debye), background index and
    /// mode volume. The branch sign is left at +1; call
    /// [`PhotonReservoir::validated`] to fix it against a frequency window.
    pub fn from_dipole(
        omega_u: f64,
        omega_l: f64,
        kappa_u: f64,
        kappa_l: f64,
        dipole_debye: f64,
        n_b: f64,
        v_eff: ModeVolume,
    ) -> Result<Self> {
        if !(dipole_debye > 0.0) {
            return Err(Error::invalid("dipole_debye", "must be > 0"));
        }
        if !(n_b >= 1.0) {
            return Err(Error::invalid("n_b", format!("must be >= 1, got {n_b}")));
        }
        let volume_m3 = match v_eff {
            ModeVolume::CubicMicrons(v) => {
                if !(v > 0.0) {
                    return Err(Error::invalid("v_eff", "must be > 0"));
                }
                v * 1e-18
            }
            ModeVolume::LambdaOverNCubed(v) => {
                if !(v > 0.0) {
                    return Err(Error::invalid("v_eff", "must be > 0"));
                }
                let center = 0.5 * (omega_u + omega_l);
                let lambda_um = HC_MEV_UM / center;
                v * (lambda_um / n_b).powi(3) * 1e-18
            }
        };
        let d = dipole_debye * DEBYE_C_M;
        let scale_j = d * d / (2.0 * EPSILON_0 * n_b * n_b * volume_m3);
        let wg = CoupledCavityWaveguide {
            omega_u,
            omega_l,
            kappa_u,
            kappa_l,
            coupling_scale: scale_j / MEV_J,
            branch_sign: 1.0,
        };
        wg.check()?;
        Ok(wg)
    }

    pub fn from_scale(omega_u: f64, omega_l: f64, kappa_u: f64, kappa_l: f64, coupling_scale: f64) -> Result<Self> {
        let wg = CoupledCavityWaveguide { omega_u, omega_l, kappa_u, kappa_l, coupling_scale, branch_sign: 1.0 };
        wg.check()?;
        Ok(wg)
    }

    fn check(&self) -> Result<()> {
        if !(self.omega_l < self.omega_u) {
            return Err(Error::invalid("omega_l", "lower band edge must lie below the upper edge"));
        }
        if !(self.kappa_u > 0.0) || !(self.kappa_l > 0.0) {
            return Err(Error::invalid("kappa_u/kappa_l", "edge damping must be > 0"));
        }
        if !(self.coupling_scale > 0.0) || !self.coupling_scale.is_finite() {
            return Err(Error::invalid("coupling_scale", "must be > 0"));
        }
        Ok(())
    }

    pub fn band_center(&self) -> f64 {
        0.5 * (self.omega_u + self.omega_l)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhotonReservoir {
    Flat(FlatBackground),
    LorentzianCavity(LorentzianCavity),
    CoupledCavityWaveguide(CoupledCavityWaveguide),
}

/// Where a reservoir's spectral feature sits, used for dip searches and grid
/// refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirFeature {
    /// Absolute energy of the LDOS feature, meV.
    pub center: f64,
    /// Characteristic linewidth, meV.
    pub linewidth: f64,
    /// Half-width of the window searched for a PLI dip, meV.
    pub dip_half_window: f64,
    /// Reference energy for Purcell-spectrum detuning axes, meV.
    pub axis_origin: f64,
}

impl PhotonReservoir {
    pub fn lorentzian(g: f64, kappa: f64, omega_c: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::invalid("g", format!("must be > 0, got {g}")));
        }
        if !(kappa > 0.0) {
            return Err(Error::invalid("kappa", format!("must be > 0, got {kappa}")));
        }
        Ok(PhotonReservoir::LorentzianCavity(LorentzianCavity { g, kappa, omega_c }))
    }

    pub fn flat(gamma_b: f64, center: f64, bandwidth: Option<f64>) -> Result<Self> {
        if !(gamma_b >= 0.0) {
            return Err(Error::invalid("gamma_b", "must be >= 0"));
        }
        if let Some(b) = bandwidth {
            if !(b > 0.0) {
                return Err(Error::invalid("bandwidth", "must be > 0"));
            }
        }
        Ok(PhotonReservoir::Flat(FlatBackground { gamma_b, center, bandwidth }))
    }

    pub fn feature(&self) -> Option<ReservoirFeature> {
        match self {
            PhotonReservoir::Flat(_) => None,
            PhotonReservoir::LorentzianCavity(c) => Some(ReservoirFeature {
                center: c.omega_c,
                linewidth: c.kappa,
                dip_half_window: 2.0 * c.kappa,
                axis_origin: c.omega_c,
            }),
            PhotonReservoir::CoupledCavityWaveguide(w) => Some(ReservoirFeature {
                center: w.omega_u,
                linewidth: w.kappa_u,
                dip_half_window: 0.5 * (w.omega_u - w.omega_l),
                axis_origin: w.band_center(),
            }),
        }
    }
}

/// Coherent drive and laser-exciton detuning grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveConfig {
    /// Rabi frequency, ueV.
    pub eta_x: f64,
    /// `Delta_xL = omega_x - omega_L` in meV, strictly increasing.
    pub delta_xl_grid: Vec<f64>,
    /// Exciton (zero-phonon line) energy, meV.
    pub omega_x: f64,
}

impl DriveConfig {
    pub fn new(eta_x: f64, delta_xl_grid: Vec<f64>, omega_x: f64) -> Result<Self> {
        if !(eta_x > 0.0) {
            return Err(Error::invalid("eta_x", format!("must be > 0, got {eta_x}")));
        }
        if delta_xl_grid.is_empty() {
            return Err(Error::invalid("delta_xl_grid", "empty"));
        }
        if delta_xl_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("delta_xl_grid", "must be strictly increasing"));
        }
        if !(omega_x > 0.0) {
            return Err(Error::invalid("omega_x", "must be > 0"));
        }
        Ok(DriveConfig { eta_x, delta_xl_grid, omega_x })
    }

    /// Laser energy for a detuning on the grid.
    pub fn laser_energy(&self, delta_xl: f64) -> f64 {
        self.omega_x - delta_xl
    }
}

/// All rates entering the steady-state population at one laser detuning, ueV.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RateSet {
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub gamma_cd: f64,
    /// Spontaneous-emission rate used in the population formula.
    pub gamma_tilde: f64,
    /// Phonon-free rate at the same laser energy.
    pub gamma_bare: f64,
    pub gamma_prime: f64,
    pub gamma_b: f64,
}

impl RateSet {
    /// Allowed undershoot for `gamma_cd`, ueV.
    pub const GAMMA_CD_FLOOR: f64 = -1e-6;

    pub fn validate(&self) -> Result<()> {
        self.validate_signed_cd()?;
        if self.gamma_cd < Self::GAMMA_CD_FLOOR {
            return Err(Error::NegativeRate { name: "gamma_cd", value: self.gamma_cd });
        }
        Ok(())
    }

    /// Like [`RateSet::validate`] but lets `gamma_cd` take either sign. The
    /// cross-dephasing integrand `1 - exp(-phi)` has no positive spectrum, so
    /// far from resonance a converged `gamma_cd` can be slightly negative.
    pub fn validate_signed_cd(&self) -> Result<()> {
        let checks: [(&'static str, f64); 6] = [
            ("gamma_plus", self.gamma_plus),
            ("gamma_minus", self.gamma_minus),
            ("gamma_tilde", self.gamma_tilde),
            ("gamma_bare", self.gamma_bare),
            ("gamma_prime", self.gamma_prime),
            ("gamma_b", self.gamma_b),
        ];
        for (name, value) in checks {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeRate { name, value });
            }
        }
        if !self.gamma_cd.is_finite() {
            return Err(Error::NegativeRate { name: "gamma_cd", value: self.gamma_cd });
        }
        Ok(())
    }

    /// Same rates with a different spontaneous-emission rate.
    pub fn with_gamma_tilde(mut self, gamma_tilde: f64) -> Self {
        self.gamma_tilde = gamma_tilde;
        self
    }
}

/// Aligned columns over one axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Spectrum {
    pub axis_name: String,
    pub axis: Vec<f64>,
    pub values: Vec<(String, Vec<f64>)>,
    pub metadata: BTreeMap<String, String>,
}

impl Spectrum {
    pub fn new(axis_name: impl Into<String>, axis: Vec<f64>) -> Self {
        Spectrum { axis_name: axis_name.into(), axis, values: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if values.len() != self.axis.len() {
            return Err(Error::invalid(
                name,
                format!("column has {} rows, axis has {}", values.len(), self.axis.len()),
            ));
        }
        self.values.push((name, values));
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.values.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    /// Equal lengths and no NaN/Inf anywhere.
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        if !finite(&self.axis) {
            return Err(Error::NonConvergent { what: format!("axis `{}`", self.axis_name), residual: f64::NAN });
        }
        for (name, col) in &self.values {
            if col.len() != self.axis.len() {
                return Err(Error::invalid(name.clone(), "length mismatch"));
            }
            if !finite(col) {
                return Err(Error::NonConvergent { what: format!("column `{name}`"), residual: f64::NAN });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phonon_bath_accepts_zero_coupling() {
        assert!(PhononBath::new(0.0, 1.0, 4.0, FrequencyConvention::Angular).is_ok());
        assert!(PhononBath::new(-0.1, 1.0, 4.0, FrequencyConvention::Angular).is_err());
        assert!(PhononBath::new(0.06, 0.0, 4.0, FrequencyConvention::Angular).is_err());
        assert!(PhononBath::new(0.06, 1.0, -1.0, FrequencyConvention::Angular).is_err());
    }

    #[test]
    fn convention_scales_coupling() {
        let a = PhononBath::new(0.06, 1.0, 4.0, FrequencyConvention::Angular).unwrap();
        let o = PhononBath::new(0.06, 1.0, 4.0, FrequencyConvention::Ordinary).unwrap();
        assert!((a.alpha_rad() / o.alpha_rad() - (2.0 * std::f64::consts::PI).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn reservoir_invariants() {
        assert!(PhotonReservoir::lorentzian(0.0, 0.6, 1441.0).is_err());
        assert!(PhotonReservoir::lorentzian(0.05, -0.6, 1441.0).is_err());
        assert!(CoupledCavityWaveguide::from_scale(1441.0, 1442.0, 0.05, 0.05, 1e-5).is_err());
        assert!(CoupledCavityWaveguide::from_scale(1441.0, 1439.0, 0.0, 0.05, 1e-5).is_err());
        assert!(CoupledCavityWaveguide::from_dipole(
            1441.0,
            1439.0,
            0.05,
            0.05,
            50.0,
            0.9,
            ModeVolume::CubicMicrons(0.01)
        )
        .is_err());
    }

    #[test]
    fn dipole_coupling_scale() {
        // d^2 / (2 eps0 n^2 V) for 50 D, n = 3.5, V = 0.01 um^3, by hand in SI
        let wg = CoupledCavityWaveguide::from_dipole(
            1441.0,
            1439.0,
            0.05,
            0.05,
            50.0,
            3.5,
            ModeVolume::CubicMicrons(0.01),
        )
        .unwrap();
        let d = 50.0 * 3.33564095e-30;
        let expected = d * d / (2.0 * 8.8541878128e-12 * 12.25 * 1e-20) / 1.602176634e-22;
        assert!((wg.coupling_scale / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn drive_grid_must_increase() {
        assert!(DriveConfig::new(0.4, vec![0.0, 0.0], 1440.0).is_err());
        assert!(DriveConfig::new(0.0, vec![0.0, 1.0], 1440.0).is_err());
        let d = DriveConfig::new(0.4, vec![-1.0, 1.0], 1440.0).unwrap();
        assert_eq!(d.laser_energy(-1.0), 1441.0);
    }

    #[test]
    fn rate_set_validation() {
        let mut r = RateSet { gamma_tilde: 1.0, gamma_b: 1.0, ..Default::default() };
        assert!(r.validate().is_ok());
        r.gamma_cd = -1e-7;
        assert!(r.validate().is_ok());
        r.gamma_cd = -1e-3;
        assert!(r.validate().is_err());
        r.gamma_cd = 0.0;
        r.gamma_plus = -1.0;
        assert!(r.validate().is_err());
    }

    #[test]
    fn spectrum_length_check() {
        let mut s = Spectrum::new("x", vec![0.0, 1.0]);
        assert!(s.push("y", vec![1.0]).is_err());
        s.push("y", vec![1.0, 2.0]).unwrap();
        assert!(s.validate().is_ok());
        s.values[0].1[1] = f64::NAN;
        assert!(s.validate().is_err());
    }
}
