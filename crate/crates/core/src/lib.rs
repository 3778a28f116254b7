//! Phonon-dressed spontaneous emission and photoluminescence intensity of a
//! weakly driven quantum dot coupled to an acoustic-phonon bath and a
//! structured photonic reservoir.
//!
//! Public quantities use meV for energies, ueV for rates and drive strengths,
//! ps for times and K for temperatures.

pub mod bloch;
pub mod convergence;
pub mod emission;
pub mod error;
pub mod model;
pub mod phonon;
pub mod photon;
pub mod pli;
pub mod quadrature;
pub mod scenario;
pub mod units;

pub use bloch::{bloch_steady_state, verify_random_draws, BlochState, VerifyRecord};
pub use emission::{purcell_spectrum, se_rate_bare, se_rate_polaron, PolaronRates, PurcellSpectrum};
pub use error::{Error, ErrorKind, Result};
pub use model::{
    CoupledCavityWaveguide, DriveConfig, FlatBackground, FrequencyConvention, LorentzianCavity, ModeVolume,
    PhononBath, PhotonReservoir, RateSet, ReservoirFeature, Spectrum,
};
pub use phonon::{
    cross_dephasing, phase_function, phonon_correlation, phonon_scattering_rates, PhaseTable, PhononNumerics,
};
pub use photon::{matched_lorentzian, photon_correlation, photon_spectral_density, FrequencyWindow, ReservoirGrid, ReservoirKernel};
pub use pli::{
    exciton_population, pli_dip_metric, pli_spectrum, pure_dephasing, temperature_sweep, DipMetric, PliEngine,
    PliResult, PliSetup, PliSpectra,
};
pub use convergence::{convergence_report, ConvergenceReport};
pub use scenario::{scenario_hash, Diagnostics, Scenario, ScenarioResults};
pub use units::{thermal_coth, UNITS};
