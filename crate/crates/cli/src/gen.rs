use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use mucheck::benchgen::{generate, BenchSpec, Benchmark};
use mucheck::game::export_pgsolver;
use mucheck::model::{serialize_model, Structure};
use serde::Serialize;

use crate::files::{write, write_formulas};

#[derive(Serialize)]
pub struct Manifest {
    pub stem: String,
    pub family: String,
    pub lift: String,
    pub lazy: bool,
    pub params: Vec<usize>,
    pub worlds: usize,
    /// Positions of the underlying parity game, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positions: Option<usize>,
    /// Smallest total successor multiplicity, for graded models.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_multiplicity: Option<u64>,
    pub added_self_loops: usize,
    pub initial: Vec<String>,
    pub formulas: usize,
    pub files: Vec<String>,
}

pub fn manifest(b: &Benchmark, files: Vec<String>) -> Manifest {
    let min_multiplicity = match b.model.structure() {
        Structure::Multiset(rows) => rows.iter().map(|r| r.iter().map(|&(_, w)| w).sum()).min(),
        _ => None,
    };
    Manifest {
        stem: b.spec.file_stem(),
        family: b.spec.family.to_string(),
        lift: b.spec.lift.to_string(),
        lazy: b.spec.lazy,
        params: b.spec.params.clone(),
        worlds: b.model.len(),
        positions: b.game.as_ref().map(|g| g.game.len()),
        min_multiplicity,
        added_self_loops: b.added_self_loops,
        initial: b.initial.iter().map(|&s| b.model.state_name(s).to_string()).collect(),
        formulas: b.formulas.len(),
        files,
    }
}

/// Writes `<stem>.model`, `<stem>.mu`, `<stem>.gm` for parity families,
/// and `<stem>.toml` holding the manifest, which is also returned.
pub fn run(spec: &BenchSpec, out: &Path) -> Result<String> {
    let b = generate(spec)?;
    fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let stem = spec.file_stem();
    let mut files = vec![format!("{stem}.model"), format!("{stem}.mu")];
    write(&out.join(&files[0]), &serialize_model(&b.model))?;
    write(&out.join(&files[1]), &write_formulas(&b.formulas))?;
    if let Some(g) = &b.game {
        files.push(format!("{stem}.gm"));
        write(&out.join(&files[2]), &export_pgsolver(&g.game))?;
    }
    let text = toml::to_string(&manifest(&b, files))?;
    write(&out.join(format!("{stem}.toml")), &text)?;
    Ok(text)
}
