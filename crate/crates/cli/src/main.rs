use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdpl_cli::run::{run_scenario, RunOptions};
use qdpl_cli::CliError;

#[derive(Parser)]
#[command(name = "qdpl", version, about = "Phonon-dressed emission and PLI spectra of a driven quantum dot")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write CSV, SVG and manifest outputs.
    Run {
        scenario: PathBuf,
        /// Output directory (default: scenario `output.dir`, else out/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long, env = "QDPL_THREADS")]
        threads: Option<usize>,
        /// Check the closed-form population against the time-integrated
        /// master equation on 20 seeded random draws.
        #[arg(long)]
        verify: bool,
        /// Rerun at doubled resolution and report the largest changes.
        #[arg(long)]
        convergence_report: bool,
    },
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { scenario, out, threads, verify, convergence_report } => {
            if let Some(n) = threads {
                if n == 0 {
                    return Err(CliError::Usage("--threads must be at least 1".into()));
                }
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::Usage(e.to_string()))?;
            }
            let opts = RunOptions { scenario, out, verify, convergence_report };
            let m = run_scenario(&opts)?;
            println!("scenario {} (sha256 {})", m.scenario, &m.scenario_sha256[..12]);
            println!(
                "<B> = {:.6}, dip depth bare {:.4e}, phonon {:.4e}",
                m.diagnostics.b_avg, m.dip_bare.dip_depth, m.dip_phonon.dip_depth
            );
            if let Some(c) = &m.convergence {
                println!(
                    "convergence: max rate change {:.3e} ({}), max n_x change {:.3e} ({})",
                    c.max_rate_rel_change, c.worst_rate, c.max_population_abs_change, c.worst_population
                );
            }
            if let Some(v) = &m.verify {
                println!("verify: {}/{} draws within {:e} (max error {:.3e})", v.draws - v.failed, v.draws, v.tol, v.max_abs_error);
            }
            println!("wrote {}", m.files.join(", "));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
