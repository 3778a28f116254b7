//! Independent check of the analytic steady state: the two-level master
//! equation is integrated in time, directly from its operator form, until it
//! stops moving.
//!
//! Generator (energies and rates in ueV, time in hbar/ueV):
//!
//! ```text
//! d rho/dt = -i [H, rho]
//!          + G+ D[s+] rho + (G- + gamma~) D[s-] rho + gamma' D[s+ s-] rho
//!          - gamma_cd (s+ rho s+ + s- rho s-)
//! H = Delta s+ s- + <B> eta (s+ + s-),   D[O] rho = O rho O' - {O'O, rho}/2
//! ```
//!
//! The pure-dephasing channel `gamma' D[s+ s-]` damps the coherence at
//! `gamma'/2`, which is how `gamma'` enters `Gamma_pol`. Writing the
//! equations out for `n = rho_ee` and `s = <s-> = rho_eg` gives
//!
//! ```text
//! dn/dt = G+ (1 - n) - (G- + gamma~) n - 2 <B> eta Im s
//! ds/dt = -(Gamma_pol + i Delta) s - gamma_cd s* + i <B> eta (2n - 1)
//! ```
//!
//! whose fixed point is the closed-form population.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::RateSet;
use crate::pli::exciton_population;

type Mat = [[C64; 2]; 2];

const E: usize = 0;
const G: usize = 1;

fn zero() -> Mat {
    [[C64::new(0.0, 0.0); 2]; 2]
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut c = zero();
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn dagger(a: &Mat) -> Mat {
    let mut c = zero();
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[j][i].conj();
        }
    }
    c
}

fn axpy(acc: &mut Mat, s: C64, a: &Mat) {
    for i in 0..2 {
        for j in 0..2 {
            acc[i][j] += s * a[i][j];
        }
    }
}

fn lowering() -> Mat {
    let mut m = zero();
    m[G][E] = C64::new(1.0, 0.0);
    m
}

struct Generator {
    hamiltonian: Mat,
    channels: Vec<(f64, Mat)>,
    gamma_cd: f64,
    sp: Mat,
    sm: Mat,
}

impl Generator {
    fn new(rates: &RateSet, b_avg: f64, eta_x: f64, delta_xl: f64) -> Self {
        let sm = lowering();
        let sp = dagger(&sm);
        let n = mul(&sp, &sm);
        let delta = delta_xl * 1e3;
        let drive = b_avg * eta_x;
        let mut hamiltonian = zero();
        axpy(&mut hamiltonian, C64::new(delta, 0.0), &n);
        axpy(&mut hamiltonian, C64::new(drive, 0.0), &sp);
        axpy(&mut hamiltonian, C64::new(drive, 0.0), &sm);
        let channels = vec![
            (rates.gamma_plus, sp),
            (rates.gamma_minus + rates.gamma_tilde, sm),
            (rates.gamma_prime, n),
        ];
        Generator { hamiltonian, channels, gamma_cd: rates.gamma_cd, sp, sm }
    }

    fn apply(&self, rho: &Mat) -> Mat {
        let i = C64::new(0.0, 1.0);
        let mut out = zero();
        axpy(&mut out, -i, &mul(&self.hamiltonian, rho));
        axpy(&mut out, i, &mul(rho, &self.hamiltonian));
        for (rate, op) in &self.channels {
            if *rate == 0.0 {
                continue;
            }
            let od = dagger(op);
            let odo = mul(&od, op);
            let r = C64::new(*rate, 0.0);
            axpy(&mut out, r, &mul(&mul(op, rho), &od));
            axpy(&mut out, -0.5 * r, &mul(&odo, rho));
            axpy(&mut out, -0.5 * r, &mul(rho, &odo));
        }
        if self.gamma_cd != 0.0 {
            let g = C64::new(-self.gamma_cd, 0.0);
            axpy(&mut out, g, &mul(&mul(&self.sp, rho), &self.sp));
            axpy(&mut out, g, &mul(&mul(&self.sm, rho), &self.sm));
        }
        out
    }

    fn rhs(&self, y: &[f64; 8]) -> [f64; 8] {
        pack(&self.apply(&unpack(y)))
    }
}

fn pack(m: &Mat) -> [f64; 8] {
    [m[0][0].re, m[0][0].im, m[0][1].re, m[0][1].im, m[1][0].re, m[1][0].im, m[1][1].re, m[1][1].im]
}

fn unpack(y: &[f64; 8]) -> Mat {
    [[C64::new(y[0], y[1]), C64::new(y[2], y[3])], [C64::new(y[4], y[5]), C64::new(y[6], y[7])]]
}

fn norm_inf(y: &[f64; 8]) -> f64 {
    y.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Population and coherence of the two-level system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    /// `<s+ s->`.
    pub population: f64,
    /// `<s->`.
    pub coherence: C64,
}

impl BlochState {
    pub fn ground() -> Self {
        BlochState { population: 0.0, coherence: C64::new(0.0, 0.0) }
    }

    pub fn excited() -> Self {
        BlochState { population: 1.0, coherence: C64::new(0.0, 0.0) }
    }

    fn to_vec(self) -> [f64; 8] {
        let mut m = zero();
        m[E][E] = C64::new(self.population, 0.0);
        m[G][G] = C64::new(1.0 - self.population, 0.0);
        m[E][G] = self.coherence;
        m[G][E] = self.coherence.conj();
        pack(&m)
    }

    fn from_vec(y: &[f64; 8]) -> Self {
        let m = unpack(y);
        BlochState { population: m[E][E].re, coherence: m[E][G] }
    }

    fn is_physical(&self, slack: f64) -> bool {
        self.population >= -slack && self.population <= 1.0 + slack && self.coherence.norm() <= 0.5 + slack
    }
}

// Dormand-Prince 5(4) tableau. The generator is autonomous, so the nodes
// c_i are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn lin(y: &[f64; 8], terms: &[(f64, &[f64; 8])], h: f64) -> [f64; 8] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..8 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integration controls for the oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    /// Stop when `|d rho/dt| < tol * |rho|`.
    pub tol: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OracleSettings {
    fn default() -> Self {
        OracleSettings { tol: 1e-10, rtol: 1e-13, atol: 1e-15, max_steps: 5_000_000 }
    }
}

/// Integrates from `initial` until stationary.
pub fn bloch_steady_state_from(
    initial: BlochState,
    rates: &RateSet,
    b_avg: f64,
    eta_x: f64,
    delta_xl: f64,
    settings: &OracleSettings,
) -> Result<BlochState> {
    let gen = Generator::new(rates, b_avg, eta_x, delta_xl);
    let mut y = initial.to_vec();
    let scale = (delta_xl * 1e3).abs()
        + b_avg * eta_x
        + rates.gamma_plus
        + rates.gamma_minus
        + rates.gamma_tilde
        + rates.gamma_prime
        + rates.gamma_cd.abs();
    if !(scale > 0.0) {
        return Err(Error::Oracle { reason: "generator is identically zero".into(), residual: f64::NAN });
    }
    let mut h = 1e-3 / scale;
    let mut k1 = gen.rhs(&y);
    let mut residual = norm_inf(&k1) / norm_inf(&y);
    for _ in 0..settings.max_steps {
        if residual < settings.tol {
            return Ok(BlochState::from_vec(&y));
        }
        let k2 = gen.rhs(&lin(&y, &[(A21, &k1)], h));
        let k3 = gen.rhs(&lin(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = gen.rhs(&lin(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = gen.rhs(&lin(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = gen.rhs(&lin(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
        let y_new = lin(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = gen.rhs(&y_new);
        let mut err = 0.0f64;
        for i in 0..8 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = settings.atol + settings.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }
        if err <= 1.0 {
            y = y_new;
            k1 = k7;
            residual = norm_inf(&k1) / norm_inf(&y);
            let state = BlochState::from_vec(&y);
            if !state.is_physical(1e-9) {
                return Err(Error::Oracle { reason: "left the Bloch ball".into(), residual });
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Err(Error::Oracle { reason: "no steady state within max_steps".into(), residual })
}

/// Steady state reached from the ground state.
pub fn bloch_steady_state(rates: &RateSet, b_avg: f64, eta_x: f64, delta_xl: f64, tol: f64) -> Result<BlochState> {
    let settings = OracleSettings { tol, ..OracleSettings::default() };
    bloch_steady_state_from(BlochState::ground(), rates, b_avg, eta_x, delta_xl, &settings)
}

/// One randomized comparison of the closed form against the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRecord {
    pub rates: RateSet,
    pub b_avg: f64,
    pub eta_x: f64,
    pub delta_xl: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_error: f64,
}

/// Tolerance on `|n_closed - n_oracle|`.
pub const VERIFY_TOL: f64 = 1e-8;

/// Draws random rate sets and compares the closed-form population with the
/// time-integrated steady state. Rates are drawn in `[0, 50]` ueV
/// (`gamma~` in `[1, 50]` so the slowest relaxation stays bounded),
/// `gamma_cd` below `Gamma_pol`, `eta_x` in `[0.1, 1]` ueV, `Delta_xL` in
/// `[-2, 2]` meV and `<B>` in `[0.3, 1]`.
pub fn verify_random_draws(seed: u64, draws: usize) -> Result<Vec<VerifyRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(draws);
    for _ in 0..draws {
        let mut rates = RateSet {
            gamma_plus: rng.gen_range(0.0..50.0),
            gamma_minus: rng.gen_range(0.0..50.0),
            gamma_tilde: rng.gen_range(1.0..50.0),
            gamma_prime: rng.gen_range(0.0..50.0),
            ..RateSet::default()
        };
        rates.gamma_bare = rates.gamma_tilde;
        let pol = 0.5 * (rates.gamma_plus + rates.gamma_minus + rates.gamma_tilde + rates.gamma_prime);
        rates.gamma_cd = rng.gen_range(0.0..0.95) * pol;
        let b_avg = rng.gen_range(0.3..1.0);
        let eta_x = rng.gen_range(0.1..1.0);
        let delta_xl = rng.gen_range(-2.0..2.0);
        let closed_form = exciton_population(&rates, b_avg, eta_x, delta_xl)?;
        let oracle = bloch_steady_state(&rates, b_avg, eta_x, delta_xl, 1e-10)?.population;
        out.push(VerifyRecord {
            rates,
            b_avg,
            eta_x,
            delta_xl,
            closed_form,
            oracle,
            abs_error: (closed_form - oracle).abs(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_decay_empties_the_dot() {
        let rates = RateSet { gamma_tilde: 5.0, ..RateSet::default() };
        let s = bloch_steady_state_from(
            BlochState::excited(),
            &rates,
            1.0,
            0.0,
            0.0,
            &OracleSettings::default(),
        );
        // eta = 0 leaves only decay
        let s = s.unwrap();
        assert!(s.population.abs() < 1e-9);
    }

    #[test]
    fn resonant_two_level_steady_state() {
        let rates = RateSet { gamma_tilde: 1.0, gamma_bare: 1.0, ..RateSet::default() };
        let s = bloch_steady_state(&rates, 1.0, 0.4, 0.0, 1e-10).unwrap();
        let exact = 4.0 * 0.16 / (1.0 + 8.0 * 0.16);
        assert!((s.population - exact).abs() < 1e-9, "{}", s.population);
    }

    #[test]
    fn independent_of_initial_state() {
        let rates = RateSet {
            gamma_plus: 3.0,
            gamma_minus: 7.0,
            gamma_tilde: 2.0,
            gamma_prime: 10.0,
            gamma_cd: 4.0,
            ..RateSet::default()
        };
        let st = OracleSettings::default();
        let a = bloch_steady_state_from(BlochState::ground(), &rates, 0.8, 0.6, 0.3, &st).unwrap();
        let b = bloch_steady_state_from(BlochState::excited(), &rates, 0.8, 0.6, 0.3, &st).unwrap();
        assert!((a.population - b.population).abs() < 1e-9);
        assert!((a.coherence - b.coherence).norm() < 1e-9);
    }

    #[test]
    fn random_draws_agree_with_closed_form() {
        for r in verify_random_draws(7, 5).unwrap() {
            assert!(r.abs_error < VERIFY_TOL, "{r:?}");
        }
    }
}
