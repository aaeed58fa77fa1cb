use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use mucheck::formula::{parse_formula, Formula};
use mucheck::model::{parse_model, CoalgebraModel};

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_model(path: &Path) -> Result<CoalgebraModel> {
    parse_model(&read(path)?).with_context(|| format!("invalid model {}", path.display()))
}

/// Formula files hold one or more formulas separated by `;`.
/// Lines starting with `#` are comments.
pub fn parse_formulas(text: &str) -> Result<Vec<Formula>> {
    let body: String = text
        .lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .collect::<Vec<_>>()
        .join("\n");
    let formulas = body
        .split(';')
        .filter(|part| !part.trim().is_empty())
        .enumerate()
        .map(|(i, part)| parse_formula(part).with_context(|| format!("formula {}", i + 1)))
        .collect::<Result<Vec<_>>>()?;
    if formulas.is_empty() {
        bail!("no formula found");
    }
    Ok(formulas)
}

pub fn load_formulas(path: &Path) -> Result<Vec<Formula>> {
    parse_formulas(&read(path)?).with_context(|| format!("in {}", path.display()))
}

pub fn write_formulas(formulas: &[Formula]) -> String {
    formulas.iter().map(|f| format!("{f};\n")).collect()
}

/// A state given by name, or by index as `#k`.
pub fn resolve_state(model: &CoalgebraModel, state: Option<&str>) -> Result<usize> {
    let Some(s) = state else {
        if model.is_empty() {
            bail!("the model has no states");
        }
        return Ok(0);
    };
    if let Some(i) = model.state_index(s) {
        return Ok(i);
    }
    if let Some(i) = s.strip_prefix('#').and_then(|k| k.parse::<usize>().ok()) {
        if i < model.len() {
            return Ok(i);
        }
    }
    bail!("unknown state `{s}`")
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
