//! Grid-doubling check: a scenario is recomputed with `n_omega`, `n_tau` and
//! the frequency-window density doubled, and every reported rate and
//! population is compared.

use serde::Serialize;

use crate::error::Result;
use crate::scenario::{Scenario, ScenarioResults};

/// Largest allowed relative change of any rate.
pub const RATE_TOL: f64 = 1e-4;
/// Largest allowed absolute change of any population.
pub const POPULATION_TOL: f64 = 1e-5;
/// Rates smaller than this fraction of their column maximum are compared
/// against that floor rather than against themselves, so sign changes of
/// `gamma_cd` do not produce meaningless ratios.
pub const RELATIVE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub max_rate_rel_change: f64,
    /// Column holding the largest rate change.
    pub worst_rate: String,
    pub max_population_abs_change: f64,
    pub worst_population: String,
    pub b_avg_rel_change: f64,
    pub rate_tol: f64,
    pub population_tol: f64,
    pub passed: bool,
}

fn rel_change(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(RELATIVE_FLOOR * scale))
        .fold(0.0, f64::max)
}

fn abs_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn worst<'a>(items: impl IntoIterator<Item = (&'a str, f64)>) -> (String, f64) {
    items
        .into_iter()
        .fold((String::new(), 0.0), |acc, (n, v)| if v > acc.1 || acc.0.is_empty() { (n.to_string(), v) } else { acc })
}

/// Compares a run against its refined counterpart.
pub fn compare(base: &ScenarioResults, fine: &ScenarioResults) -> ConvergenceReport {
    let col = |r: &ScenarioResults, f: fn(&crate::model::RateSet) -> f64, bare: bool| -> Vec<f64> {
        let c = if bare { &r.pli.bare.components } else { &r.pli.phonon.components };
        c.iter().map(f).collect()
    };
    let mut rates: Vec<(&str, f64)> = vec![
        ("gamma_plus", rel_change(&col(base, |r| r.gamma_plus, false), &col(fine, |r| r.gamma_plus, false))),
        ("gamma_minus", rel_change(&col(base, |r| r.gamma_minus, false), &col(fine, |r| r.gamma_minus, false))),
        ("gamma_cd", rel_change(&col(base, |r| r.gamma_cd, false), &col(fine, |r| r.gamma_cd, false))),
        ("gamma_tilde", rel_change(&col(base, |r| r.gamma_tilde, false), &col(fine, |r| r.gamma_tilde, false))),
        ("gamma_bare", rel_change(&col(base, |r| r.gamma_tilde, true), &col(fine, |r| r.gamma_tilde, true))),
    ];
    if let (Some(a), Some(b)) = (&base.purcell, &fine.purcell) {
        rates.push(("pf_bare", rel_change(&a.pf_bare, &b.pf_bare)));
        rates.push(("pf_phonon", rel_change(&a.pf_phonon, &b.pf_phonon)));
    }
    let pops = [
        ("n_x_no_reservoir", abs_change(&base.pli.no_reservoir.n_x, &fine.pli.no_reservoir.n_x)),
        ("n_x_bare_gamma", abs_change(&base.pli.bare.n_x, &fine.pli.bare.n_x)),
        ("n_x_phonon_gamma", abs_change(&base.pli.phonon.n_x, &fine.pli.phonon.n_x)),
    ];
    let b_avg_rel_change = (base.pli.b_avg - fine.pli.b_avg).abs() / fine.pli.b_avg;
    rates.push(("b_avg", b_avg_rel_change));
    let (worst_rate, max_rate_rel_change) = worst(rates);
    let (worst_population, max_population_abs_change) = worst(pops);
    ConvergenceReport {
        passed: max_rate_rel_change < RATE_TOL && max_population_abs_change < POPULATION_TOL,
        max_rate_rel_change,
        worst_rate,
        max_population_abs_change,
        worst_population,
        b_avg_rel_change,
        rate_tol: RATE_TOL,
        population_tol: POPULATION_TOL,
    }
}

/// Runs `scenario` at its own and at doubled resolution. The temperature
/// sweep is skipped in the refined run.
pub fn convergence_report(scenario: &Scenario, base: &ScenarioResults) -> Result<ConvergenceReport> {
    let mut fine = scenario.refined();
    fine.bath.t_grid = None;
    Ok(compare(base, &fine.compute()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_change_uses_floor_near_zero() {
        let a = [1.0, 1e-9, -1e-9];
        let b = [1.0, -1e-9, 1e-9];
        assert!(rel_change(&a, &b) < 1e-5);
        assert!((rel_change(&[2.0], &[1.0]) - 0.5).abs() < 1e-15);
        assert_eq!(abs_change(&[0.1, 0.2], &[0.1, 0.25]), 0.25 - 0.2);
    }
}
