//! `qdpl run`: compute a scenario and write its artifacts.

use std::path::{Path, PathBuf};

use qdpl::bloch::VERIFY_TOL;
use qdpl::convergence::{convergence_report, ConvergenceReport, POPULATION_TOL, RATE_TOL};
use qdpl::pli::DipMetric;
use qdpl::scenario::{Diagnostics, NumericsSection};
use qdpl::{scenario_hash, verify_random_draws, Scenario};
use serde::Serialize;

use crate::plot::{dip_style, emit_plot, pli_style, purcell_style};
use crate::table::{write_rows, write_spectrum};
use crate::{CliError, Result};

/// Seed of the oracle draws run by `--verify`.
pub const VERIFY_SEED: u64 = 20_130_917;
pub const VERIFY_DRAWS: usize = 20;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub scenario: PathBuf,
    pub out: Option<PathBuf>,
    pub verify: bool,
    pub convergence_report: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DipSummary {
    #[serde(rename = "dip_position_meV")]
    pub dip_position: Option<f64>,
    #[serde(rename = "peak_position_meV")]
    pub peak_position: Option<f64>,
    pub dip_depth: f64,
}

impl From<DipMetric> for DipSummary {
    fn from(d: DipMetric) -> Self {
        DipSummary { dip_position: d.dip_position, peak_position: d.peak_position, dip_depth: d.dip_depth }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    pub convergence_rate_rel: f64,
    pub convergence_population_abs: f64,
    pub oracle_abs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifySummary {
    pub seed: u64,
    pub draws: usize,
    pub failed: usize,
    pub max_abs_error: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub scenario_sha256: String,
    pub name: Option<String>,
    #[serde(rename = "temperature_K")]
    pub temperature: f64,
    pub numerics: NumericsSection,
    pub tolerances: Tolerances,
    pub diagnostics: Diagnostics,
    pub dip_bare: DipSummary,
    pub dip_phonon: DipSummary,
    pub files: Vec<String>,
    pub convergence: Option<ConvergenceReport>,
    pub verify: Option<VerifySummary>,
}

/// Output directory: the flag, then the scenario's `output.dir`, then
/// `out/<scenario name>`.
pub fn output_dir(opts: &RunOptions, scenario: &Scenario) -> PathBuf {
    if let Some(o) = &opts.out {
        return o.clone();
    }
    if let Some(d) = &scenario.output.dir {
        return PathBuf::from(d);
    }
    let stem = scenario
        .name
        .clone()
        .or_else(|| opts.scenario.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "run".into());
    Path::new("out").join(stem)
}

pub fn run_verify() -> Result<VerifySummary> {
    let records = verify_random_draws(VERIFY_SEED, VERIFY_DRAWS)?;
    let failed = records.iter().filter(|r| !(r.abs_error < VERIFY_TOL)).count();
    let max_abs_error = records.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    Ok(VerifySummary {
        seed: VERIFY_SEED,
        draws: records.len(),
        failed,
        max_abs_error,
        tol: VERIFY_TOL,
        passed: failed == 0,
    })
}

/// Runs one scenario and writes its artifacts. Returns the manifest.
pub fn run_scenario(opts: &RunOptions) -> Result<Manifest> {
    let (scenario, text) = Scenario::load(&opts.scenario).map_err(|e| match e {
        qdpl::Error::Io(source) => CliError::io(&opts.scenario, source),
        other => CliError::Core(other),
    })?;
    let out = output_dir(opts, &scenario);
    std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;

    let results = scenario.compute()?;
    let mut files = Vec::new();

    let pli_csv = out.join("pli.csv");
    write_spectrum(&pli_csv, &results.pli.to_spectrum()?)?;
    files.push("pli.csv".to_string());
    let mut plots = vec![("pli.csv", "pli.svg", pli_style())];

    if let Some(p) = &results.purcell {
        let header = ["detuning_meV", "pf_bare", "pf_phonon"].map(String::from);
        let rows = (0..p.detuning_axis.len()).map(|i| vec![p.detuning_axis[i], p.pf_bare[i], p.pf_phonon[i]]);
        write_rows(&out.join("purcell.csv"), &header, rows)?;
        files.push("purcell.csv".into());
        plots.push(("purcell.csv", "purcell.svg", purcell_style()));
    }
    if let Some(d) = &results.dip_vs_t {
        write_spectrum(&out.join("dip_vs_T.csv"), d)?;
        files.push("dip_vs_T.csv".into());
        plots.push(("dip_vs_T.csv", "dip_vs_T.svg", dip_style()));
    }
    if scenario.output.plots {
        for (csv, svg, style) in plots {
            emit_plot(&out.join(csv), &out.join(svg), &style)?;
            files.push(svg.into());
        }
    }

    let convergence = if opts.convergence_report { Some(convergence_report(&scenario, &results)?) } else { None };
    let verify = if opts.verify { Some(run_verify()?) } else { None };
    files.push("manifest.json".into());

    let manifest = Manifest {
        tool: "qdpl".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: opts.scenario.display().to_string(),
        scenario_sha256: scenario_hash(&text),
        name: scenario.name.clone(),
        temperature: scenario.bath.temperature,
        numerics: scenario.numerics.clone(),
        tolerances: Tolerances {
            convergence_rate_rel: RATE_TOL,
            convergence_population_abs: POPULATION_TOL,
            oracle_abs: VERIFY_TOL,
        },
        diagnostics: results.diagnostics.clone(),
        dip_bare: results.pli.bare.dip.into(),
        dip_phonon: results.pli.phonon.dip.into(),
        files,
        convergence,
        verify,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    let path = out.join("manifest.json");
    std::fs::write(&path, json + "\n").map_err(|e| CliError::io(&path, e))?;

    if let Some(c) = &manifest.convergence {
        if !c.passed {
            return Err(CliError::Convergence(format!(
                "{} changed by {:.3e} (limit {:.0e}), {} by {:.3e} (limit {:.0e})",
                c.worst_rate, c.max_rate_rel_change, c.rate_tol, c.worst_population, c.max_population_abs_change, c.population_tol
            )));
        }
    }
    if let Some(v) = &manifest.verify {
        if !v.passed {
            return Err(CliError::Verify { failed: v.failed, total: v.draws, tol: v.tol, worst: v.max_abs_error });
        }
    }
    Ok(manifest)
}
