//! JSON model files.
//!
//! ```text
//! { "functor": "powerset" | "multiset" | "distribution" | "monotone" | "game",
//!   "states": ["a", "b", ...],
//!   "valuation": { "p": ["a"], ... },
//!   "agents": ["x", ...],                      // game models only
//!   "transitions": ... }                       // shape depends on the functor
//! ```
//!
//! Serialization is canonical: object keys sorted, successors in state
//! order, rationals reduced.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use super::{CoalgebraModel, DistributionRow, GameStructure, ModelError, Structure};
use crate::formula::Functor;
use crate::rational::Rational;

fn malformed(msg: impl Into<String>) -> ModelError {
    ModelError::Malformed(msg.into())
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, ModelError> {
    v.as_object().ok_or_else(|| malformed(format!("{what} must be an object")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, ModelError> {
    v.as_array().ok_or_else(|| malformed(format!("{what} must be an array")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Result<&'a str, ModelError> {
    v.as_str().ok_or_else(|| malformed(format!("{what} must be a string")))
}

struct Names<'a> {
    index: BTreeMap<&'a str, usize>,
}

impl<'a> Names<'a> {
    fn state(&self, name: &str) -> Result<usize, ModelError> {
        self.index.get(name).copied().ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    fn state_list(&self, v: &Value, what: &str) -> Result<Vec<usize>, ModelError> {
        as_array(v, what)?.iter().map(|s| self.state(as_str(s, what)?)).collect()
    }

    /// Rows keyed by state name; states without an entry get `empty`.
    fn rows<T>(
        &self,
        v: Option<&Value>,
        n: usize,
        empty: impl Fn() -> T,
        mut row: impl FnMut(usize, &Value) -> Result<T, ModelError>,
    ) -> Result<Vec<T>, ModelError> {
        let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
        if let Some(v) = v {
            for (name, value) in as_object(v, "transitions")? {
                let s = self.state(name)?;
                out[s] = Some(row(s, value)?);
            }
        }
        Ok(out.into_iter().map(|r| r.unwrap_or_else(&empty)).collect())
    }
}

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> Result<CoalgebraModel, ModelError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let top = as_object(&doc, "model")?;
    for key in top.keys() {
        if !matches!(key.as_str(), "functor" | "states" | "valuation" | "agents" | "transitions") {
            return Err(malformed(format!("unexpected key `{key}`")));
        }
    }
    let tag = as_str(top.get("functor").ok_or_else(|| malformed("missing `functor`"))?, "functor")?;
    let functor = Functor::from_tag(tag).ok_or_else(|| ModelError::UnknownFunctor(tag.to_string()))?;
    let states: Vec<String> = as_array(top.get("states").ok_or_else(|| malformed("missing `states`"))?, "states")?
        .iter()
        .map(|s| as_str(s, "state").map(str::to_string))
        .collect::<Result<_, _>>()?;
    let mut index = BTreeMap::new();
    for (i, s) in states.iter().enumerate() {
        if index.insert(s.as_str(), i).is_some() {
            return Err(ModelError::DuplicateState(s.clone()));
        }
    }
    let names = Names { index };
    let n = states.len();

    let mut valuation = BTreeMap::new();
    if let Some(v) = top.get("valuation") {
        for (atom, members) in as_object(v, "valuation")? {
            valuation.insert(atom.clone(), names.state_list(members, "valuation entry")?);
        }
    }

    let agents: Vec<String> = match top.get("agents") {
        Some(v) => as_array(v, "agents")?.iter().map(|a| as_str(a, "agent").map(str::to_string)).collect::<Result<_, _>>()?,
        None => Vec::new(),
    };
    if functor != Functor::Game && top.contains_key("agents") {
        return Err(malformed("`agents` is only allowed for game models"));
    }

    let transitions = top.get("transitions");
    let structure = match functor {
        Functor::Powerset => Structure::Powerset(names.rows(transitions, n, Vec::new, |_, v| names.state_list(v, "successors"))?),
        Functor::Multiset => Structure::Multiset(names.rows(transitions, n, Vec::new, |_, v| {
            as_object(v, "multiset")?
                .iter()
                .map(|(t, m)| {
                    let m = m.as_u64().ok_or_else(|| malformed(format!("multiplicity of `{t}` must be a non-negative integer")))?;
                    Ok((names.state(t)?, m))
                })
                .collect()
        })?),
        Functor::Distribution => {
            let rows = names.rows(transitions, n, Vec::new, |s, v| {
                as_object(v, "distribution")?
                    .iter()
                    .map(|(t, p)| {
                        let p: Rational = as_str(p, "probability")?.parse().map_err(|_| ModelError::InvalidWeight {
                            state: states[s].clone(),
                            target: t.clone(),
                            reason: "not a rational `a/b`".into(),
                        })?;
                        Ok((names.state(t)?, p))
                    })
                    .collect::<Result<Vec<_>, ModelError>>()
            })?;
            Structure::Distribution(rows.into_iter().map(DistributionRow::new).collect())
        }
        Functor::Monotone => Structure::Monotone(names.rows(transitions, n, Vec::new, |_, v| {
            as_array(v, "neighbourhoods")?.iter().map(|hood| names.state_list(hood, "neighbourhood")).collect()
        })?),
        Functor::Game => Structure::Game(parse_game(transitions, &names, &states, &agents)?),
    };
    CoalgebraModel::new(states, valuation, agents, structure)
}

fn parse_game(
    transitions: Option<&Value>,
    names: &Names<'_>,
    states: &[String],
    agents: &[String],
) -> Result<GameStructure, ModelError> {
    let t = as_object(transitions.ok_or_else(|| malformed("missing `transitions`"))?, "transitions")?;
    let agent_index: BTreeMap<&str, usize> = agents.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    let n = states.len();
    let mut moves: Vec<Vec<Vec<String>>> = vec![vec![Vec::new(); agents.len()]; n];
    let mut seen = vec![false; n];
    for (state, per_agent) in as_object(t.get("moves").ok_or_else(|| malformed("missing `moves`"))?, "moves")? {
        let s = names.state(state)?;
        seen[s] = true;
        for (agent, list) in as_object(per_agent, "moves entry")? {
            let a = *agent_index.get(agent.as_str()).ok_or_else(|| ModelError::UnknownAgent(agent.clone()))?;
            moves[s][a] = as_array(list, "move list")?.iter().map(|m| as_str(m, "move").map(str::to_string)).collect::<Result<_, _>>()?;
        }
    }
    if let Some(s) = seen.iter().position(|b| !b) {
        return Err(ModelError::InvalidMoves { state: states[s].clone(), reason: "no moves given".into() });
    }
    for (s, per_agent) in moves.iter().enumerate() {
        if let Some(a) = per_agent.iter().position(Vec::is_empty) {
            return Err(ModelError::InvalidMoves { state: states[s].clone(), reason: format!("agent `{}` has no moves", agents[a]) });
        }
    }
    let shape = GameStructure { moves, delta: vec![] };
    let mut delta: Vec<Vec<Option<usize>>> = (0..n).map(|s| vec![None; shape.joint_count(s)]).collect();
    for record in as_array(t.get("delta").ok_or_else(|| malformed("missing `delta`"))?, "delta")? {
        let record = as_object(record, "delta record")?;
        let s = names.state(as_str(record.get("state").ok_or_else(|| malformed("delta record without `state`"))?, "state")?)?;
        let target = names.state(as_str(record.get("target").ok_or_else(|| malformed("delta record without `target`"))?, "target")?)?;
        let mv = as_object(record.get("move").ok_or_else(|| malformed("delta record without `move`"))?, "move")?;
        if mv.len() != agents.len() {
            return Err(malformed(format!("delta record for `{}` must name one move per agent", states[s])));
        }
        let mut choice = vec![0; agents.len()];
        for (agent, name) in mv {
            let a = *agent_index.get(agent.as_str()).ok_or_else(|| ModelError::UnknownAgent(agent.clone()))?;
            let name = as_str(name, "move")?;
            choice[a] = shape.moves[s][a].iter().position(|m| m == name).ok_or_else(|| ModelError::InvalidMoves {
                state: states[s].clone(),
                reason: format!("agent `{agent}` has no move `{name}`"),
            })?;
        }
        let joint = shape.encode(s, &choice);
        if delta[s][joint].replace(target).is_some() {
            return Err(malformed(format!("duplicate transition for `{}`", states[s])));
        }
    }
    let mut complete = Vec::with_capacity(n);
    for (s, row) in delta.into_iter().enumerate() {
        let mut targets = Vec::with_capacity(row.len());
        for (joint, t) in row.into_iter().enumerate() {
            match t {
                Some(t) => targets.push(t),
                None => {
                    let digits = shape.decode(s, joint);
                    let moves: Vec<String> = digits
                        .iter()
                        .enumerate()
                        .map(|(a, &d)| format!("{}={}", agents[a], shape.moves[s][a][d]))
                        .collect();
                    return Err(ModelError::MissingTransition { state: states[s].clone(), moves: moves.join(",") });
                }
            }
        }
        complete.push(targets);
    }
    Ok(GameStructure { moves: shape.moves, delta: complete })
}

/// Canonical JSON text for a model.
pub fn serialize_model(model: &CoalgebraModel) -> String {
    let name = |s: usize| Value::String(model.state_name(s).to_string());
    let names = |v: &[usize]| Value::Array(v.iter().map(|&s| name(s)).collect());
    let mut top = Map::new();
    top.insert("functor".into(), json!(model.functor().tag()));
    top.insert("states".into(), Value::Array(model.states().iter().map(|s| json!(s)).collect()));
    let valuation: Map<String, Value> = model
        .valuation()
        .iter()
        .map(|(atom, set)| (atom.clone(), names(&set.ones().collect::<Vec<_>>())))
        .collect();
    top.insert("valuation".into(), Value::Object(valuation));

    let per_state = |f: &dyn Fn(usize) -> Value| -> Value {
        Value::Object((0..model.len()).map(|s| (model.state_name(s).to_string(), f(s))).collect())
    };
    let transitions = match model.structure() {
        Structure::Powerset(rows) => per_state(&|s| names(&rows[s])),
        Structure::Multiset(rows) => {
            per_state(&|s| Value::Object(rows[s].iter().map(|&(t, m)| (model.state_name(t).to_string(), json!(m))).collect()))
        }
        Structure::Distribution(rows) => per_state(&|s| {
            Value::Object(rows[s].entries.iter().map(|(t, p)| (model.state_name(*t).to_string(), json!(p.to_string()))).collect())
        }),
        Structure::Monotone(rows) => per_state(&|s| Value::Array(rows[s].iter().map(|h| names(h)).collect())),
        Structure::Game(g) => {
            let agents = model.agents();
            top.insert("agents".into(), Value::Array(agents.iter().map(|a| json!(a)).collect()));
            let moves = per_state(&|s| {
                Value::Object(
                    agents
                        .iter()
                        .enumerate()
                        .map(|(a, agent)| (agent.clone(), Value::Array(g.moves[s][a].iter().map(|m| json!(m)).collect())))
                        .collect(),
                )
            });
            let mut delta = Vec::new();
            for s in 0..model.len() {
                for (joint, &target) in g.delta[s].iter().enumerate() {
                    let digits = g.decode(s, joint);
                    let mv: Map<String, Value> =
                        agents.iter().enumerate().map(|(a, agent)| (agent.clone(), json!(g.moves[s][a][digits[a]]))).collect();
                    delta.push(json!({ "state": model.state_name(s), "move": mv, "target": model.state_name(target) }));
                }
            }
            json!({ "moves": moves, "delta": delta })
        }
    };
    top.insert("transitions".into(), transitions);
    let mut text = serde_json::to_string_pretty(&Value::Object(top)).expect("json values always serialize");
    text.push('\n');
    text
}
