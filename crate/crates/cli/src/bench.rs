//! Timed sweeps over a benchmark matrix, one CSV row per cell.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use mucheck::batch::{check, Engine};
use mucheck::benchgen::{generate, BenchSpec, Family, Lift};
use mucheck::formula::closure;
use mucheck::{CheckError, Deadline};
use serde::{Deserialize, Serialize};

/// A matrix file is a list of sweeps; every sweep expands to the product
/// of its lifts, sizes and engines.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Matrix {
    #[serde(rename = "sweep")]
    pub sweeps: Vec<Sweep>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub family: String,
    #[serde(default)]
    pub lazy: bool,
    #[serde(default = "default_lifts")]
    pub lifts: Vec<String>,
    /// Sizes of a parity family.
    #[serde(default)]
    pub sizes: Vec<usize>,
    /// Parameter tuples of a game family.
    #[serde(default)]
    pub params: Vec<Vec<usize>>,
    #[serde(default = "default_engines")]
    pub engines: Vec<String>,
}

fn default_lifts() -> Vec<String> {
    vec!["none".into()]
}

fn default_engines() -> Vec<String> {
    Engine::ALL.iter().map(|e| e.to_string()).collect()
}

#[derive(Clone, Debug)]
pub struct Cell {
    pub spec: BenchSpec,
    pub engine: Engine,
}

pub fn parse_matrix(text: &str) -> Result<Vec<Cell>> {
    let matrix: Matrix = toml::from_str(text)?;
    let mut cells = Vec::new();
    for (i, s) in matrix.sweeps.iter().enumerate() {
        let ctx = || format!("sweep {}", i + 1);
        let family: Family = s.family.parse().with_context(ctx)?;
        let mut params: Vec<Vec<usize>> = s.sizes.iter().map(|&n| vec![n]).collect();
        params.extend(s.params.iter().cloned());
        if params.is_empty() {
            bail!("{}: no sizes or params", ctx());
        }
        let lifts = s.lifts.iter().map(|l| l.parse::<Lift>()).collect::<Result<Vec<_>, _>>().with_context(ctx)?;
        let engines = s.engines.iter().map(|e| e.parse::<Engine>()).collect::<Result<Vec<_>, _>>();
        let engines = engines.map_err(anyhow::Error::msg).with_context(ctx)?;
        for &lift in &lifts {
            for p in &params {
                for &engine in &engines {
                    let spec = BenchSpec { family, params: p.clone(), lift, lazy: s.lazy };
                    cells.push(Cell { spec, engine });
                }
            }
        }
    }
    Ok(cells)
}

#[derive(Serialize, Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub family: String,
    pub lift: String,
    pub size: String,
    pub engine: String,
    pub verdict: String,
    pub mean: Option<f64>,
    pub std: Option<f64>,
    pub runs: usize,
    pub timeout: bool,
    pub explored: Option<usize>,
    pub total: Option<usize>,
    pub quotient: Option<f64>,
    pub game_positions: Option<usize>,
}

/// Verdicts and statistics of one execution, summed over the cell's
/// formulas and initial states.
#[derive(PartialEq)]
struct Execution {
    verdicts: Vec<bool>,
    explored: Option<usize>,
    total: Option<usize>,
    positions: Option<usize>,
}

fn add(a: Option<usize>, b: Option<usize>) -> Option<usize> {
    match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(a), Some(b)) => Some(a + b),
    }
}

/// Generation happens before the clock starts; closure construction,
/// exploration and solving are timed.
fn execute(b: &mucheck::benchgen::Benchmark, engine: Engine, deadline: Deadline) -> Result<Execution, CheckError> {
    let mut ex = Execution { verdicts: Vec::new(), explored: None, total: None, positions: None };
    for f in &b.formulas {
        let cl = closure(f)?;
        for &s in &b.initial {
            let v = check(&b.model, s, &cl, engine, deadline)?;
            ex.verdicts.push(v.holds);
            ex.explored = add(ex.explored, v.explored);
            ex.total = add(ex.total, v.total);
            ex.positions = add(ex.positions, v.positions);
        }
    }
    Ok(ex)
}

pub fn run_cell(cell: &Cell, reps: usize, timeout: Duration) -> RunRecord {
    let spec = &cell.spec;
    let family = if spec.lazy { format!("lazy-{}", spec.family) } else { spec.family.to_string() };
    let size = spec.params.iter().map(usize::to_string).collect::<Vec<_>>().join("x");
    let mut rec = RunRecord {
        family,
        lift: spec.lift.to_string(),
        size,
        engine: cell.engine.to_string(),
        verdict: String::new(),
        mean: None,
        std: None,
        runs: 0,
        timeout: false,
        explored: None,
        total: None,
        quotient: None,
        game_positions: None,
    };
    let b = match generate(spec) {
        Ok(b) => b,
        Err(e) => {
            rec.verdict = format!("error: {e}");
            return rec;
        }
    };
    let mut times = Vec::with_capacity(reps);
    let mut first: Option<Execution> = None;
    for _ in 0..reps {
        rec.runs += 1;
        let start = Instant::now();
        match execute(&b, cell.engine, Deadline::after(timeout)) {
            Ok(ex) => {
                times.push(start.elapsed().as_secs_f64());
                match &first {
                    Some(f) if *f != ex => {
                        rec.verdict = "error: repeated runs disagree".into();
                        return rec;
                    }
                    Some(_) => {}
                    None => first = Some(ex),
                }
            }
            // runs are deterministic, so the remaining ones would time out too
            Err(CheckError::Timeout) => {
                rec.timeout = true;
                break;
            }
            Err(e) => {
                rec.verdict = format!("error: {e}");
                return rec;
            }
        }
    }
    if let Some(ex) = first {
        rec.verdict = ex.verdicts.iter().map(|&h| if h { "holds" } else { "fails" }).collect::<Vec<_>>().join(";");
        rec.explored = ex.explored;
        rec.total = ex.total;
        rec.quotient = match (ex.explored, ex.total) {
            (Some(e), Some(t)) if t > 0 => Some(e as f64 / t as f64),
            (Some(_), Some(_)) => Some(1.0),
            _ => None,
        };
        rec.game_positions = ex.positions;
    } else {
        rec.verdict = "timeout".into();
    }
    if !rec.timeout {
        let n = times.len() as f64;
        let mean = times.iter().sum::<f64>() / n;
        let var = if times.len() > 1 { times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
        rec.mean = Some(mean);
        rec.std = Some(var.sqrt());
    }
    rec
}

/// Runs every cell on up to `jobs` worker threads; rows keep matrix order.
pub fn run_matrix(cells: &[Cell], reps: usize, timeout: Duration, jobs: usize) -> Vec<RunRecord> {
    let next = AtomicUsize::new(0);
    let rows: Mutex<Vec<Option<RunRecord>>> = Mutex::new(vec![None; cells.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, cells.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(cell) = cells.get(i) else { break };
                let rec = run_cell(cell, reps, timeout);
                rows.lock().unwrap()[i] = Some(rec);
            });
        }
    });
    rows.into_inner().unwrap().into_iter().map(|r| r.expect("every cell ran")).collect()
}

pub fn write_csv(rows: &[RunRecord], out: Option<&Path>) -> Result<()> {
    let sink: Box<dyn std::io::Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("cannot write {}", p.display()))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
