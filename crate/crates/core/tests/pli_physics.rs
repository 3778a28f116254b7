use std::path::PathBuf;

use qdpl::scenario::ReservoirSection;
use qdpl::*;

fn fig2() -> Scenario {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/fig2.scenario");
    let mut s = Scenario::load(&p).unwrap().0;
    s.bath.t_grid = None;
    s.drive.n_points = 301;
    s
}

fn at(s: &PliSpectra, curve: &PliResult, d: f64) -> f64 {
    let i = s.delta_xl_axis().iter().position(|x| (x - d).abs() < 1e-9).unwrap();
    curve.n_x[i]
}

#[test]
fn background_only_curve_favours_blue_laser_detuning() {
    // phonon emission (laser above the exciton) beats absorption at 40 K
    let r = pli_spectrum(&fig2().setup().unwrap()).unwrap();
    let blue = at(&r, &r.no_reservoir, -1.0);
    let red = at(&r, &r.no_reservoir, 1.0);
    assert!(blue > red, "{blue} vs {red}");
}

#[test]
fn phonon_free_sweep_has_identical_curves() {
    let mut s = fig2();
    s.bath.alpha_p = 0.0;
    let sw = temperature_sweep(&s.setup().unwrap(), &[10.0, 40.0]).unwrap();
    let b = sw.column("dip_bare").unwrap();
    let p = sw.column("dip_phonon").unwrap();
    for (x, y) in b.iter().zip(p) {
        assert!((x - y).abs() <= 1e-10 * x.abs(), "{x} vs {y}");
    }
}

#[test]
fn flat_reservoir_has_no_dip() {
    let mut s = fig2();
    s.reservoir = ReservoirSection::Flat { bandwidth: None };
    let r = pli_spectrum(&s.setup().unwrap()).unwrap();
    assert_eq!(r.bare.dip.dip_depth, 0.0);
    assert_eq!(r.phonon.dip.dip_depth, 0.0);
}

#[test]
fn spectra_are_continuous_away_from_the_zero_phonon_line() {
    // the coherent resonance at zero detuning is only ueV wide
    let r = pli_spectrum(&fig2().setup().unwrap()).unwrap();
    let axis = r.delta_xl_axis();
    let scale = r.phonon.n_x.iter().cloned().fold(0.0, f64::max);
    for curve in [&r.no_reservoir, &r.bare, &r.phonon] {
        for (w, x) in curve.n_x.windows(2).zip(axis.windows(2)).filter(|(_, x)| x[0].abs() > 0.2) {
            let slope = (w[1] - w[0]).abs() / (x[1] - x[0]);
            assert!(slope < 50.0 * scale, "jump at {}: {} -> {}", x[0], w[0], w[1]);
        }
    }
}

#[test]
fn detuning_outside_window_reports_location() {
    let mut s = fig2();
    s.drive.delta_min = -40.0;
    s.drive.delta_max = 40.0;
    s.drive.n_points = 81;
    let err = pli_spectrum(&s.setup().unwrap()).unwrap_err();
    assert!(matches!(err, Error::AtDetuning { .. }), "{err}");
    assert!(err.to_string().contains("40"), "{err}");
}
