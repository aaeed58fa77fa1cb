//! `mucheck`: check coalgebraic μ-calculus formulas, generate benchmarks,
//! run timed sweeps and convert parity games to and from PGSolver format.

mod bench;
mod files;
mod gen;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use mucheck::batch::{check, Engine};
use mucheck::benchgen::{lift_game, BenchSpec, Family, Lift};
use mucheck::formula::closure;
use mucheck::game::{build_mc_game, export_pgsolver, import_pgsolver, solve_zielonka, verify_strategies, Player};
use mucheck::model::serialize_model;
use mucheck::Deadline;

#[derive(Parser)]
#[command(name = "mucheck", version, about = "Model checker for the coalgebraic mu-calculus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the formulas of a formula file at one state of a model.
    /// Exits 0 if all hold, 1 if one fails, 2 on errors.
    Check {
        model: PathBuf,
        formulas: PathBuf,
        /// State name, or `#k` for the k-th state; defaults to the first.
        #[arg(long)]
        state: Option<String>,
        #[arg(long, default_value = "local")]
        engine: Engine,
        /// Seconds before giving up.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Generate a benchmark instance with its formulas and manifest.
    Gen {
        family: Family,
        /// One size for parity families; agents and moves for modulo;
        /// castles and health for castle.
        #[arg(required = true)]
        params: Vec<usize>,
        #[arg(long, default_value = "none")]
        lift: Lift,
        /// Prepend the lazy choice to the game.
        #[arg(long)]
        lazy: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Time every cell of a benchmark matrix and write CSV.
    Bench {
        matrix: PathBuf,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        reps: u32,
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        jobs: u32,
        /// CSV file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the model-checking game of a formula at a state in PGSolver format.
    ExportPg {
        model: PathBuf,
        formulas: PathBuf,
        #[arg(long)]
        state: Option<String>,
        /// Game file; standard output if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a PGSolver game and print the solution.
    ImportPg {
        game: PathBuf,
        /// Also write the game as a model file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn deadline(timeout: Option<f64>) -> Result<Deadline> {
    match timeout {
        None => Ok(Deadline::none()),
        Some(t) if t.is_finite() && t > 0.0 => Ok(Deadline::after(Duration::from_secs_f64(t))),
        Some(t) => bail!("invalid timeout {t}"),
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => files::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Returns whether every checked formula holds.
fn run(command: Command) -> Result<bool> {
    match command {
        Command::Check { model, formulas, state, engine, timeout } => {
            let m = files::load_model(&model)?;
            let fs = files::load_formulas(&formulas)?;
            let s = files::resolve_state(&m, state.as_deref())?;
            let deadline = deadline(timeout)?;
            let mut all = true;
            for f in &fs {
                let cl = closure(f)?;
                let v = check(&m, s, &cl, engine, deadline).with_context(|| format!("checking {f}"))?;
                all &= v.holds;
                let verdict = if v.holds { "holds" } else { "fails" };
                print!("{verdict} at {}: {f}", m.state_name(s));
                if let (Some(e), Some(t), Some(q)) = (v.explored, v.total, v.quotient()) {
                    print!(" [explored {e} of {t}, quotient {q}]");
                }
                if let Some(p) = v.positions {
                    print!(" [{p} game positions]");
                }
                println!();
            }
            Ok(all)
        }
        Command::Gen { family, params, lift, lazy, out } => {
            let spec = BenchSpec { family, params, lift, lazy };
            print!("{}", gen::run(&spec, &out)?);
            Ok(true)
        }
        Command::Bench { matrix, reps, timeout, jobs, out } => {
            let cells = bench::parse_matrix(&files::read(&matrix)?).with_context(|| format!("in {}", matrix.display()))?;
            if !(timeout.is_finite() && timeout > 0.0) {
                bail!("invalid timeout {timeout}");
            }
            let rows = bench::run_matrix(&cells, reps as usize, Duration::from_secs_f64(timeout), jobs as usize);
            bench::write_csv(&rows, out.as_deref())?;
            Ok(true)
        }
        Command::ExportPg { model, formulas, state, out } => {
            let m = files::load_model(&model)?;
            let fs = files::load_formulas(&formulas)?;
            let [f] = fs.as_slice() else {
                bail!("export-pg takes a file with a single formula, found {}", fs.len());
            };
            let s = files::resolve_state(&m, state.as_deref())?;
            let mc = build_mc_game(&m, &closure(f)?, s, Deadline::none())?;
            emit(&export_pgsolver(&mc.game), out.as_ref())?;
            eprintln!("{} positions, initial position {}", mc.game.len(), mc.roots[0]);
            Ok(true)
        }
        Command::ImportPg { game, out } => {
            let g = import_pgsolver(&files::read(&game)?).with_context(|| format!("in {}", game.display()))?;
            let sol = solve_zielonka(&g);
            verify_strategies(&g, &sol).map_err(anyhow::Error::msg).context("solution failed verification")?;
            let mut text = format!("paritysol {};\n", g.len().saturating_sub(1));
            for v in 0..g.len() {
                let w = match sol.winner[v] {
                    Player::Exists => 0,
                    Player::Forall => 1,
                };
                match sol.strategy[v] {
                    Some(next) => text.push_str(&format!("{v} {w} {next};\n")),
                    None => text.push_str(&format!("{v} {w};\n")),
                }
            }
            print!("{text}");
            if let Some(p) = out {
                files::write(&p, &serialize_model(&lift_game(&g, Lift::None).model))?;
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
