//! Engine selection and data-parallel batch checking.
//!
//! With the `parallel` feature (on by default) batches are spread over the
//! rayon thread pool; without it the same functions run sequentially.

use std::fmt;
use std::str::FromStr;

use crate::error::{CheckError, Deadline};
use crate::formula::ClosureGraph;
use crate::game::check_game_closure;
use crate::local::{check_local_closure, exploration_quotient};
use crate::model::CoalgebraModel;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Engine {
    /// Local fixpoint engine over the full product.
    Local,
    /// Local engine with on-demand exploration.
    Lazy,
    /// Parity game reduction solved with Zielonka's algorithm.
    Game,
}

impl Engine {
    pub const ALL: [Engine; 3] = [Engine::Local, Engine::Lazy, Engine::Game];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Local => "local",
            Engine::Lazy => "lazy",
            Engine::Game => "game",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = String;
    fn from_str(s: &str) -> Result<Engine, String> {
        Engine::ALL.into_iter().find(|e| e.name() == s).ok_or_else(|| format!("unknown engine `{s}` (local, lazy, game)"))
    }
}

/// Verdict plus the statistics of whichever engine produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    /// Explored product pairs (local engines).
    pub explored: Option<usize>,
    /// Size of the full product (local engines).
    pub total: Option<usize>,
    /// Number of game positions (game engine).
    pub positions: Option<usize>,
}

impl Verdict {
    pub fn quotient(&self) -> Option<Rational> {
        match (self.explored, self.total) {
            (Some(explored), Some(total)) => Some(exploration_quotient(&crate::local::LocalStats {
                explored,
                total,
                ..Default::default()
            })),
            _ => None,
        }
    }
}

pub fn check(
    model: &CoalgebraModel,
    state: usize,
    cl: &ClosureGraph,
    engine: Engine,
    deadline: Deadline,
) -> Result<Verdict, CheckError> {
    match engine {
        Engine::Local | Engine::Lazy => {
            let out = check_local_closure(model, state, cl, engine == Engine::Lazy, deadline)?;
            Ok(Verdict { holds: out.holds, explored: Some(out.stats.explored), total: Some(out.stats.total), positions: None })
        }
        Engine::Game => {
            let out = check_game_closure(model, state, cl, deadline)?;
            Ok(Verdict { holds: out.holds, explored: None, total: None, positions: Some(out.positions) })
        }
    }
}

/// Checks `cl` at every state of `states`, one after another.
pub fn check_states_seq(
    model: &CoalgebraModel,
    cl: &ClosureGraph,
    states: &[usize],
    engine: Engine,
    deadline: Deadline,
) -> Vec<Result<Verdict, CheckError>> {
    states.iter().map(|&s| check(model, s, cl, engine, deadline)).collect()
}

/// Checks `cl` at every state of `states`, in parallel when enabled.
/// Results are in the order of `states`.
pub fn check_states(
    model: &CoalgebraModel,
    cl: &ClosureGraph,
    states: &[usize],
    engine: Engine,
    deadline: Deadline,
) -> Vec<Result<Verdict, CheckError>> {
    par_map(states, |&s| check(model, s, cl, engine, deadline))
}

/// Order-preserving map over a slice, parallel when enabled.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
