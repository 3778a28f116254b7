//! Photonic reservoirs: spectral densities `J_ph(omega)` and the photon
//! correlation `J_ph(tau)` seen by a laser at `omega_L`.
//!
//! Spectral densities are energy-scaled and returned in meV, normalised so
//! that the phonon-free emission rate at energy `E` is `2 pi J_ph(E)`
//! (also meV). Correlation functions are in meV^2.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{CoupledCavityWaveguide, LorentzianCavity, PhotonReservoir};
use crate::units::{HBAR_MEV_PS, UNITS};

/// Uniform frequency grid over which reservoir quadratures run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyWindow {
    /// meV.
    pub center: f64,
    /// meV.
    pub half_width: f64,
    /// meV.
    pub spacing: f64,
    /// Largest allowed `J(edge) / max J`.
    pub edge_tol: f64,
}

impl FrequencyWindow {
    pub fn new(center: f64, half_width: f64, spacing: f64, edge_tol: f64) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::invalid("window_half_width", "must be > 0"));
        }
        if !(spacing > 0.0) || spacing > half_width {
            return Err(Error::invalid("window_spacing", "must be in (0, half_width]"));
        }
        if !(edge_tol > 0.0) {
            return Err(Error::invalid("edge_tol", "must be > 0"));
        }
        Ok(FrequencyWindow { center, half_width, spacing, edge_tol })
    }

    pub fn n_points(&self) -> usize {
        2 * (self.half_width / self.spacing).round() as usize + 1
    }

    pub fn lower(&self) -> f64 {
        self.center - self.step() * ((self.n_points() - 1) / 2) as f64
    }

    pub fn upper(&self) -> f64 {
        self.center + self.step() * ((self.n_points() - 1) / 2) as f64
    }

    /// Actual grid step after rounding the point count.
    pub fn step(&self) -> f64 {
        self.half_width / ((self.n_points() - 1) / 2) as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        let lo = self.lower();
        let h = self.step();
        (0..self.n_points()).map(|k| lo + k as f64 * h).collect()
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.lower() && e <= self.upper()
    }

    /// Same window with twice the point density.
    pub fn refined(&self) -> Self {
        FrequencyWindow { spacing: 0.5 * self.step(), ..*self }
    }
}

fn waveguide_raw(w: &CoupledCavityWaveguide, omega: f64) -> f64 {
    // Product of the two principal roots keeps the branch continuous along
    // the real axis; the root of the product flips sign mid-band.
    let a = C64::new(omega - w.omega_u, -w.kappa_u).sqrt();
    let b = C64::new(omega - w.omega_l, -w.kappa_l).sqrt();
    let inv = (a * b).inv();
    -w.coupling_scale * omega / std::f64::consts::PI * inv.im
}

fn lorentzian(c: &LorentzianCavity, omega: f64) -> f64 {
    let hw = 0.5 * c.kappa;
    let d = omega - c.omega_c;
    c.g * c.g / std::f64::consts::PI * hw / (d * d + hw * hw)
}

/// `J_ph(omega)` in meV for an absolute photon energy in meV.
pub fn photon_spectral_density(omega: f64, reservoir: &PhotonReservoir) -> f64 {
    match reservoir {
        PhotonReservoir::Flat(f) => {
            let inside = f.bandwidth.map_or(true, |bw| (omega - f.center).abs() <= 0.5 * bw);
            if inside {
                f.gamma_b * 1e-3 / (2.0 * std::f64::consts::PI)
            } else {
                0.0
            }
        }
        PhotonReservoir::LorentzianCavity(c) => lorentzian(c, omega),
        PhotonReservoir::CoupledCavityWaveguide(w) => w.branch_sign * waveguide_raw(w, omega),
    }
}

impl PhotonReservoir {
    /// Checks `J >= 0` on the window grid. For the waveguide this also fixes
    /// the global sign of the square-root branch.
    pub fn validated(self, window: &FrequencyWindow) -> Result<Self> {
        let grid = window.grid();
        match self {
            PhotonReservoir::CoupledCavityWaveguide(mut w) => {
                let raw: Vec<f64> = grid.iter().map(|&e| waveguide_raw(&w, e)).collect();
                let peak = raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let slack = 1e-12 * peak;
                w.branch_sign = if lo >= -slack {
                    1.0
                } else if hi <= slack {
                    -1.0
                } else {
                    return Err(Error::Branch { worst: lo.abs().min(hi.abs()) / peak });
                };
                Ok(PhotonReservoir::CoupledCavityWaveguide(w))
            }
            other => {
                if grid.iter().any(|&e| photon_spectral_density(e, &other) < 0.0) {
                    return Err(Error::Branch { worst: f64::NAN });
                }
                Ok(other)
            }
        }
    }
}

/// A reservoir sampled on a frequency window.
#[derive(Debug, Clone)]
pub struct ReservoirGrid {
    pub omega_grid: Vec<f64>,
    pub j_values: Vec<f64>,
    pub variant: PhotonReservoir,
    pub window: FrequencyWindow,
}

impl ReservoirGrid {
    pub fn new(reservoir: &PhotonReservoir, window: &FrequencyWindow) -> Result<Self> {
        let omega_grid = window.grid();
        let j_values: Vec<f64> = omega_grid.iter().map(|&e| photon_spectral_density(e, reservoir)).collect();
        if let Some((k, v)) = j_values.iter().enumerate().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::Config(format!(
                "photon spectral density {v:e} < 0 at {} meV",
                omega_grid[k]
            )));
        }
        Ok(ReservoirGrid { omega_grid, j_values, variant: *reservoir, window: *window })
    }

    pub fn peak(&self) -> f64 {
        self.j_values.iter().cloned().fold(0.0, f64::max)
    }

    /// `max(J(lower), J(upper)) / max J`.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.peak();
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.j_values.len();
        self.j_values[0].max(self.j_values[n - 1]) / peak
    }

    /// Fails when the density has not died away at the window edges.
    /// A flat band is exempt because it is truncated on purpose.
    pub fn check_edges(&self) -> Result<()> {
        if matches!(self.variant, PhotonReservoir::Flat(_)) {
            return Ok(());
        }
        let ratio = self.edge_ratio();
        if ratio > self.window.edge_tol {
            return Err(Error::Config(format!(
                "frequency window too narrow: J at the edges is {ratio:.2e} of the peak (limit {:.1e})",
                self.window.edge_tol
            )));
        }
        Ok(())
    }

    /// Trapezoid area, meV^2.
    pub fn area(&self) -> f64 {
        let h = self.window.step();
        let n = self.j_values.len();
        h * (self.j_values.iter().sum::<f64>() - 0.5 * (self.j_values[0] + self.j_values[n - 1]))
    }

    /// `int dE J(E) exp(-i (E - reference) tau / hbar)` on the window.
    pub fn transform(&self, reference: f64, tau: f64) -> C64 {
        let h = self.window.step();
        let k = tau / HBAR_MEV_PS;
        let lo = self.omega_grid[0];
        let phase = |i: usize| C64::from_polar(1.0, -(lo + i as f64 * h - reference) * k);
        let step = C64::from_polar(1.0, -h * k);
        let mut rot = phase(0);
        let mut sum = C64::new(0.0, 0.0);
        for (i, j) in self.j_values.iter().enumerate() {
            if i % 512 == 0 {
                rot = phase(i);
            }
            sum += rot * j;
            rot *= step;
        }
        let n = self.j_values.len();
        sum -= 0.5 * (phase(0) * self.j_values[0] + phase(n - 1) * self.j_values[n - 1]);
        sum * h
    }
}

/// `K(tau) = int dE J(E) exp(-i (E - omega_ref) tau / hbar)` on a uniform tau
/// grid. The photon correlation for a laser at `omega_L` is
/// `exp(i (omega_L - omega_ref) tau / hbar) K(tau)`.
#[derive(Debug, Clone)]
pub struct ReservoirKernel {
    pub reference: f64,
    pub dt: f64,
    pub kernel: Vec<C64>,
    pub grid: ReservoirGrid,
}

impl ReservoirKernel {
    pub fn new(grid: ReservoirGrid, reference: f64, dt: f64, n_tau: usize) -> Result<Self> {
        grid.check_edges()?;
        let kernel: Vec<C64> =
            (0..=n_tau).into_par_iter().map(|k| grid.transform(reference, k as f64 * dt)).collect();
        Ok(ReservoirKernel { reference, dt, kernel, grid })
    }

    /// `J_ph(tau)` on the kernel's tau grid for a laser at `omega_l` (meV).
    pub fn correlation(&self, omega_l: f64) -> Vec<C64> {
        let nu = UNITS.mev_to_rad_per_ps(omega_l - self.reference);
        self.kernel
            .iter()
            .enumerate()
            .map(|(k, v)| C64::from_polar(1.0, nu * self.dt * k as f64) * v)
            .collect()
    }
}

/// Photon correlation `J_ph(tau)` (meV^2) by quadrature over the window for
/// arbitrary tau values.
pub fn photon_correlation(
    reservoir: &PhotonReservoir,
    omega_l: f64,
    tau_grid: &[f64],
    window: &FrequencyWindow,
) -> Result<Vec<C64>> {
    let grid = ReservoirGrid::new(reservoir, window)?;
    grid.check_edges()?;
    Ok(tau_grid
        .par_iter()
        .map(|&t| {
            let phase = C64::from_polar(1.0, (omega_l - window.center) * t / HBAR_MEV_PS);
            phase * grid.transform(window.center, t)
        })
        .collect())
}

/// Closed form of the Lorentzian correlation,
/// `g^2 exp(i (omega_L - omega_c) tau / hbar - kappa tau / 2 hbar)`.
pub fn lorentzian_correlation(cavity: &LorentzianCavity, omega_l: f64, tau: f64) -> C64 {
    let arg = C64::new(-0.5 * cavity.kappa * tau, (omega_l - cavity.omega_c) * tau) / HBAR_MEV_PS;
    cavity.g * cavity.g * arg.exp()
}

/// Lorentzian cavity with the same peak position, peak height and full width
/// at half maximum as the sampled density. Half-maximum crossings are
/// interpolated linearly.
pub fn matched_lorentzian(grid: &ReservoirGrid) -> Result<PhotonReservoir> {
    let j = &grid.j_values;
    let w = &grid.omega_grid;
    let (ip, &peak) = j
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| Error::Domain("empty reservoir grid".into()))?;
    if !(peak > 0.0) {
        return Err(Error::Domain("reservoir has no peak to match".into()));
    }
    let half = 0.5 * peak;
    let cross = |a: usize, b: usize| w[a] + (half - j[a]) / (j[b] - j[a]) * (w[b] - w[a]);
    let left = (1..=ip).rev().find(|&k| j[k - 1] <= half).map(|k| cross(k - 1, k));
    let right = (ip..j.len() - 1).find(|&k| j[k + 1] <= half).map(|k| cross(k, k + 1));
    let (Some(l), Some(r)) = (left, right) else {
        return Err(Error::Domain("peak has no half-maximum crossing inside the window".into()));
    };
    let kappa = r - l;
    // peak of g^2/pi * (k/2)/(d^2 + (k/2)^2) is 2 g^2/(pi k)
    let g = (peak * std::f64::consts::PI * kappa / 2.0).sqrt();
    PhotonReservoir::lorentzian(g, kappa, w[ip])
}
