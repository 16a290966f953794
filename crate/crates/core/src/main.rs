use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vacone::cli::problem::parse_problem;
use vacone::cli::suite::{generate, run_suite, suite_passed, SuiteOptions};
use vacone::cli::{run_text, svg, RunFlags};
use vacone::normals::Engine;

#[derive(Parser)]
#[command(name = "vacone", version, about = "Normal cones, coderivatives and subdifferentials with respect to a set")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    #[value(name = "A")]
    A,
    #[value(name = "B")]
    B,
    #[value(name = "oracle")]
    Oracle,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "VACONE_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol_mem: Option<f64>,
    #[arg(long)]
    tol_dir: Option<f64>,
    /// Oracle lattice points per unit length in one and two dimensions.
    #[arg(long)]
    grid_res: Option<usize>,
    #[arg(long, value_enum)]
    engine: Option<EngineArg>,
}

impl Common {
    fn flags(&self) -> RunFlags {
        RunFlags {
            seed: self.seed,
            tol_mem: self.tol_mem,
            tol_dir: self.tol_dir,
            grid_res: self.grid_res,
            engine: self.engine.map(|e| match e {
                EngineArg::A => Engine::A,
                EngineArg::B => Engine::B,
                EngineArg::Oracle => Engine::Oracle,
            }),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the queries of a problem file.
    Run {
        problem: PathBuf,
        /// Exit with status 2 when a verdict query fails.
        #[arg(long)]
        expect_hold: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Check the built-in examples against the expectations file.
    PaperSuite {
        /// Restrict to these fixtures (exam0, exam1, exam2, indicators, scalar).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Use this expectations file instead of the built-in one.
        #[arg(long)]
        expectations: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Draw a two-dimensional cone query as SVG.
    Plot {
        problem: PathBuf,
        query: String,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Regenerate the expectations file with the brute-force oracles.
    Oracle {
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "VACONE_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Run { problem, expect_hold, common } => {
            let text = read(&problem)?;
            let report = run_text(&text, &common.flags()).map_err(|e| format!("{}: {e}", problem.display()))?;
            emit(common.out.as_deref(), &report.to_json())?;
            for r in &report.results {
                if let Err(e) = &r.result {
                    eprintln!("query `{}` failed: {e}", r.id);
                }
            }
            Ok(if report.has_errors() {
                1
            } else if expect_hold && report.any_verdict_fails() {
                2
            } else {
                0
            })
        }
        Command::PaperSuite { only, expectations, common } => {
            let expectations = expectations.map(|p| read(&p)).transpose()?;
            let report = run_suite(&common.flags(), &SuiteOptions { only, expectations }).map_err(|e| e.to_string())?;
            emit(common.out.as_deref(), &report.to_json())?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if suite_passed(&report) {
                Ok(0)
            } else {
                if let Some(failed) = report.extra.get("failed") {
                    eprintln!("failed checks: {failed}");
                }
                Ok(2)
            }
        }
        Command::Plot { problem, query, svg: path, common } => {
            let text = read(&problem)?;
            let p = parse_problem(&text).map_err(|e| format!("{}: {e}", problem.display()))?;
            let doc = svg::plot(&p, &query, &common.flags()).map_err(|e| e.to_string())?;
            emit(path.as_deref().or(common.out.as_deref()), &doc)?;
            Ok(0)
        }
        Command::Oracle { only, out, seed } => {
            let e = generate(seed, &only).map_err(|e| e.to_string())?;
            emit(out.as_deref(), &e.to_json())?;
            Ok(0)
        }
    }
}
