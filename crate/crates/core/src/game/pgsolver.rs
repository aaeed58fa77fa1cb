//! PGSolver text format:
//!
//! ```text
//! parity <max id>;
//! <id> <priority> <owner> <succ>,<succ>,... "<label>";
//! ```
//!
//! Owner 0 is ∃ and 1 is ∀. Positions without a label are written as
//! `"n<id>"`, and that label reads back as no label.

use std::fmt::Write;

use super::{ParityGame, Player};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct PgError {
    pub line: usize,
    pub message: String,
}

fn default_label(id: usize) -> String {
    format!("n{id}")
}

pub fn export_pgsolver(g: &ParityGame) -> String {
    let mut out = String::with_capacity(g.len() * 24 + 16);
    let _ = writeln!(out, "parity {};", g.len().saturating_sub(1));
    for v in 0..g.len() {
        let owner = match g.owner[v] {
            Player::Exists => 0,
            Player::Forall => 1,
        };
        let succ: Vec<String> = g.moves[v].iter().map(usize::to_string).collect();
        let label = match &g.labels[v] {
            Some(l) => l.replace('"', "'"),
            None => default_label(v),
        };
        let _ = writeln!(out, "{v} {} {owner} {} \"{label}\";", g.priority[v], succ.join(","));
    }
    out
}

pub fn import_pgsolver(text: &str) -> Result<ParityGame, PgError> {
    let err = |line: usize, message: String| PgError { line, message };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty input".into()))?;
    let max: usize = header
        .strip_prefix("parity")
        .and_then(|r| r.trim().strip_suffix(';'))
        .and_then(|r| r.trim().parse().ok())
        .ok_or_else(|| err(hline, format!("expected `parity <max id>;`, found `{header}`")))?;
    let n = max.checked_add(1).ok_or_else(|| err(hline, "maximal id out of range".into()))?;
    let mut rows: Vec<Option<(u32, Player, Vec<usize>, Option<String>)>> = vec![None; n];
    for (ln, line) in lines {
        let body = line.strip_suffix(';').ok_or_else(|| err(ln, "missing `;`".into()))?;
        let (head, label) = match body.find('"') {
            Some(q) => {
                let rest = &body[q + 1..];
                let close = rest.find('"').ok_or_else(|| err(ln, "unterminated label".into()))?;
                if !rest[close + 1..].trim().is_empty() {
                    return Err(err(ln, "text after label".into()));
                }
                (&body[..q], Some(rest[..close].to_string()))
            }
            None => (body, None),
        };
        let fields: Vec<&str> = head.split_whitespace().collect();
        if fields.len() < 3 || fields.len() > 4 {
            return Err(err(ln, "expected `<id> <priority> <owner> <successors>`".into()));
        }
        let id: usize = fields[0].parse().map_err(|_| err(ln, format!("bad id `{}`", fields[0])))?;
        let prio: u32 = fields[1].parse().map_err(|_| err(ln, format!("bad priority `{}`", fields[1])))?;
        let owner = match fields[2] {
            "0" => Player::Exists,
            "1" => Player::Forall,
            o => return Err(err(ln, format!("owner must be 0 or 1, found `{o}`"))),
        };
        let succ = match fields.get(3) {
            Some(s) => s
                .split(',')
                .map(|t| {
                    let w: usize = t.trim().parse().map_err(|_| err(ln, format!("bad successor `{t}`")))?;
                    if w >= n {
                        return Err(err(ln, format!("successor {w} exceeds the maximal id {max}")));
                    }
                    Ok(w)
                })
                .collect::<Result<Vec<_>, _>>()?,
            None => Vec::new(),
        };
        if id >= n {
            return Err(err(ln, format!("id {id} exceeds the maximal id {max}")));
        }
        if rows[id].is_some() {
            return Err(err(ln, format!("duplicate id {id}")));
        }
        let label = label.filter(|l| *l != default_label(id));
        rows[id] = Some((prio, owner, succ, label));
    }
    let mut g = ParityGame::new();
    for (id, row) in rows.into_iter().enumerate() {
        let (prio, owner, succ, label) = row.ok_or_else(|| err(0, format!("position {id} is missing")))?;
        let v = g.add(owner, prio, label);
        g.moves[v] = succ;
    }
    Ok(g)
}
