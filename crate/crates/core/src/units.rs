//! Unit conventions.
//!
//! Everything public is in meV (energies, and rates written as hbar * rate),
//! ps (times) and K (temperatures). Rates that feed the steady-state formula
//! are quoted in ueV. Angular frequencies in rad/ps only appear inside the
//! quadrature kernels.

use crate::error::{Error, Result};

/// hbar in meV ps.
pub const HBAR_MEV_PS: f64 = 0.6582119569;
/// Boltzmann constant in meV/K.
pub const KB_MEV_PER_K: f64 = 0.08617333;

/// Debye in C m.
pub const DEBYE_C_M: f64 = 3.335_640_95e-30;
/// Vacuum permittivity in F/m.
pub const EPSILON_0: f64 = 8.854_187_8128e-12;
/// One meV in J.
pub const MEV_J: f64 = 1.602_176_634e-22;
/// h c in meV um, for vacuum wavelengths.
pub const HC_MEV_UM: f64 = 1239.841_984;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hbar: f64,
    pub kb: f64,
}

pub const UNITS: UnitSystem = UnitSystem { hbar: HBAR_MEV_PS, kb: KB_MEV_PER_K };

impl UnitSystem {
    #[inline]
    pub fn mev_to_rad_per_ps(&self, energy: f64) -> f64 {
        energy / self.hbar
    }

    #[inline]
    pub fn rad_per_ps_to_mev(&self, omega: f64) -> f64 {
        omega * self.hbar
    }

    #[inline]
    pub fn kelvin_to_mev(&self, t: f64) -> f64 {
        t * self.kb
    }

    #[inline]
    pub fn mev_to_kelvin(&self, e: f64) -> f64 {
        e / self.kb
    }

    /// ueV (as hbar * rate) to a rate in 1/ps.
    #[inline]
    pub fn uev_to_rate(&self, uev: f64) -> f64 {
        uev * 1e-3 / self.hbar
    }

    #[inline]
    pub fn rate_to_uev(&self, rate: f64) -> f64 {
        rate * self.hbar * 1e3
    }
}

#[inline]
pub fn mev_to_rad_per_ps(energy: f64) -> f64 {
    UNITS.mev_to_rad_per_ps(energy)
}

#[inline]
pub fn rad_per_ps_to_mev(omega: f64) -> f64 {
    UNITS.rad_per_ps_to_mev(omega)
}

/// `coth(omega / 2 kB T)` for a phonon energy `omega` in meV.
///
/// T = 0 returns the limit 1 exactly.
pub fn thermal_coth(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("thermal_coth needs omega > 0, got {omega}")));
    }
    if !(temperature >= 0.0) {
        return Err(Error::Domain(format!("negative temperature {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(1.0);
    }
    let x = omega / (2.0 * UNITS.kelvin_to_mev(temperature));
    Ok(1.0 / x.tanh())
}

/// `omega * coth(hbar omega / 2 kB T)` with omega in rad/ps. Finite at omega = 0,
/// where it tends to 2 kB T / hbar.
pub(crate) fn omega_coth(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return omega;
    }
    let two_kt = 2.0 * UNITS.kelvin_to_mev(temperature) / HBAR_MEV_PS;
    if omega == 0.0 {
        return two_kt;
    }
    let x = omega / two_kt;
    if x < 1e-4 {
        // series of x coth x
        two_kt * (1.0 + x * x / 3.0)
    } else {
        omega / x.tanh()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coth_zero_temperature_is_one() {
        assert_eq!(thermal_coth(1.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn coth_large_argument() {
        let t = 40.0;
        let omega = 80.0 * KB_MEV_PER_K * t;
        assert!((thermal_coth(omega, t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coth_small_argument() {
        // 1/tanh(0.1 / (2 * 0.08617333 * 40)), evaluated with mpmath at 30 digits
        let v = thermal_coth(0.1, 40.0).unwrap();
        assert!((v - 68.943_499_148_206_01).abs() < 1e-9, "{v}");
    }

    #[test]
    fn coth_rejects_nonpositive_frequency() {
        assert!(thermal_coth(0.0, 4.0).is_err());
        assert!(thermal_coth(-1.0, 4.0).is_err());
    }

    #[test]
    fn omega_coth_limits() {
        let t = 10.0;
        let two_kt = 2.0 * KB_MEV_PER_K * t / HBAR_MEV_PS;
        assert_eq!(omega_coth(0.0, t), two_kt);
        let w = 1e-7;
        let direct = w / (w / two_kt).tanh();
        assert!((omega_coth(w, t) - direct).abs() < 1e-10 * two_kt);
        assert_eq!(omega_coth(0.3, 0.0), 0.3);
    }

    #[test]
    fn round_trips() {
        for e in [1e-6, 0.4e-3, 1.0, 1440.0] {
            let back = rad_per_ps_to_mev(mev_to_rad_per_ps(e));
            assert!(((back - e) / e).abs() < 1e-12);
            let back = UNITS.mev_to_kelvin(UNITS.kelvin_to_mev(e));
            assert!(((back - e) / e).abs() < 1e-12);
            let back = UNITS.rate_to_uev(UNITS.uev_to_rate(e));
            assert!(((back - e) / e).abs() < 1e-12);
        }
    }
}
