use std::sync::OnceLock;

use proptest::prelude::*;
use qdpl::*;

fn table() -> &'static PhaseTable {
    static T: OnceLock<PhaseTable> = OnceLock::new();
    T.get_or_init(|| phase_function(&PhononBath::inas(25.0), &PhononNumerics::default()).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn rates() -> impl Strategy<Value = RateSet> {
    (0.0..50.0f64, 0.0..50.0f64, 0.5..50.0f64, 0.0..10.0f64, 0.0..0.9f64).prop_map(|(gp, gm, gt, gpr, f)| {
        let pol = 0.5 * (gp + gm + gt + gpr);
        RateSet {
            gamma_plus: gp,
            gamma_minus: gm,
            gamma_cd: f * pol,
            gamma_tilde: gt,
            gamma_bare: gt,
            gamma_prime: gpr,
            gamma_b: 0.0,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phonon_rates_scale_with_drive_squared(d in -3.0..3.0f64, eta in 0.05..2.0f64) {
        let t = table();
        let (p1, m1) = phonon_scattering_rates(t, 1.0, d).unwrap();
        let (p, m) = phonon_scattering_rates(t, eta, d).unwrap();
        let c1 = cross_dephasing(t, 1.0, d).unwrap();
        let c = cross_dephasing(t, eta, d).unwrap();
        let e2 = eta * eta;
        prop_assert!(rel(p, e2 * p1) < 1e-12);
        prop_assert!(rel(m, e2 * m1) < 1e-12);
        prop_assert!((c - e2 * c1).abs() <= 1e-12 * c1.abs().max(1e-300));
    }

    #[test]
    fn cross_dephasing_is_even(d in 0.0..3.0f64) {
        let t = table();
        let a = cross_dephasing(t, 0.5, d).unwrap();
        let b = cross_dephasing(t, 0.5, -d).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-12));
    }

    #[test]
    fn population_is_a_probability(r in rates(), b in 0.3..1.0f64, eta in 0.0..5.0f64, d in -3.0..3.0f64) {
        let n = exciton_population(&r, b, eta, d).unwrap();
        prop_assert!((0.0..=1.0).contains(&n), "n = {n}");
        if r.gamma_plus <= r.gamma_minus + r.gamma_tilde {
            prop_assert!(n <= 0.5 + 1e-15, "n = {n}");
        }
    }

    #[test]
    fn weak_drive_population_scales_with_drive_squared(r in rates(), b in 0.3..1.0f64, d in -2.0..2.0f64) {
        // phonon-assisted rates are themselves proportional to eta^2; keep
        // them off so only the coherent term scales
        let r = RateSet { gamma_plus: 0.0, gamma_minus: 0.0, gamma_cd: 0.0, ..r };
        let eta = 1e-3;
        let n1 = exciton_population(&r, b, eta, d).unwrap();
        let n2 = exciton_population(&r, b, 2.0 * eta, d).unwrap();
        prop_assert!(n1 > 0.0);
        prop_assert!(rel(n2, 4.0 * n1) < 1e-2, "{n1} {n2}");
    }

    #[test]
    fn lorentzian_density_is_symmetric(g in 0.01..0.5f64, kappa in 0.05..2.0f64, x in 0.0..5.0f64) {
        let r = PhotonReservoir::lorentzian(g, kappa, 1380.0).unwrap();
        let a = photon_spectral_density(1380.0 + x, &r);
        let b = photon_spectral_density(1380.0 - x, &r);
        prop_assert!(a > 0.0);
        prop_assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn waveguide_density_is_non_negative(
        half in 0.3..2.0f64,
        ku in 0.01..0.3f64,
        kl in 0.01..0.3f64,
        x in -4.0..4.0f64,
    ) {
        let wg = model::CoupledCavityWaveguide::from_scale(1380.0 + half, 1380.0 - half, ku, kl, 0.01).unwrap();
        let window = FrequencyWindow::new(1380.0, 25.0, 0.01, 1e-2).unwrap();
        let r = PhotonReservoir::CoupledCavityWaveguide(wg).validated(&window).unwrap();
        let v = photon_spectral_density(1380.0 + x, &r);
        prop_assert!(v.is_finite() && v >= 0.0, "J({x}) = {v}");
    }
}
