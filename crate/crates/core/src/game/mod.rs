//! Parity games: the model-checking game of a formula over a coalgebra,
//! Zielonka's recursive solver, strategy verification and the PGSolver
//! text format.

mod build;
mod pgsolver;
mod verify;
mod zielonka;

use std::fmt;

pub use build::{build_mc_game, build_mc_game_multi, McGame};
pub use pgsolver::{export_pgsolver, import_pgsolver, PgError};
pub use verify::verify_strategies;
pub use zielonka::{solve_zielonka, GameSolution};

use crate::error::{CheckError, Deadline};
use crate::formula::{closure, ClosureGraph, Formula};
use crate::model::CoalgebraModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Player {
    Exists,
    Forall,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Exists => Player::Forall,
            Player::Forall => Player::Exists,
        }
    }

    /// The player favoured by a priority: even priorities belong to ∃.
    pub fn of_parity(priority: u32) -> Player {
        if priority % 2 == 0 {
            Player::Exists
        } else {
            Player::Forall
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Exists => "exists",
            Player::Forall => "forall",
        })
    }
}

/// A max-parity game. Positions without moves are lost by their owner.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Player>,
    pub priority: Vec<u32>,
    pub moves: Vec<Vec<usize>>,
    pub labels: Vec<Option<String>>,
}

impl ParityGame {
    pub fn new() -> ParityGame {
        ParityGame::default()
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }

    pub fn add(&mut self, owner: Player, priority: u32, label: Option<String>) -> usize {
        self.owner.push(owner);
        self.priority.push(priority);
        self.moves.push(Vec::new());
        self.labels.push(label);
        self.owner.len() - 1
    }

    pub fn max_priority(&self) -> u32 {
        self.priority.iter().copied().max().unwrap_or(0)
    }

    pub fn edge_count(&self) -> usize {
        self.moves.iter().map(Vec::len).sum()
    }

    /// Checks successor indices.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.len();
        if self.priority.len() != n || self.moves.len() != n || self.labels.len() != n {
            return Err("per-position vectors differ in length".into());
        }
        for (v, succ) in self.moves.iter().enumerate() {
            if let Some(&w) = succ.iter().find(|&&w| w >= n) {
                return Err(format!("position {v} moves to missing position {w}"));
            }
        }
        Ok(())
    }

    /// Gives every deadlock a self-loop; returns how many were added.
    pub fn remove_deadlocks(&mut self) -> usize {
        let mut added = 0;
        for v in 0..self.len() {
            if self.moves[v].is_empty() {
                self.moves[v].push(v);
                added += 1;
            }
        }
        added
    }
}

/// Verdict of the game engine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameOutcome {
    pub holds: bool,
    pub positions: usize,
}

/// Builds and solves the model-checking game for `phi` at `state`.
pub fn check_game(
    model: &CoalgebraModel,
    state: usize,
    phi: &Formula,
    deadline: Deadline,
) -> Result<GameOutcome, CheckError> {
    let cl = closure(phi)?;
    check_game_closure(model, state, &cl, deadline)
}

/// [`check_game`] on a prepared closure graph.
pub fn check_game_closure(
    model: &CoalgebraModel,
    state: usize,
    cl: &ClosureGraph,
    deadline: Deadline,
) -> Result<GameOutcome, CheckError> {
    let mc = build::build_unlabelled(model, cl, state, deadline)?;
    let sol = zielonka::solve_with_deadline(&mc.game, deadline)?;
    Ok(GameOutcome { holds: sol.winner[mc.roots[0]] == Player::Exists, positions: mc.game.len() })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::formula::parse_formula;
    use crate::local::check_local;
    use crate::model::Structure;

    fn chain() -> CoalgebraModel {
        let mut val = BTreeMap::new();
        val.insert("p".to_string(), vec![2]);
        CoalgebraModel::new(
            vec!["a".into(), "b".into(), "c".into()],
            val,
            vec![],
            Structure::Powerset(vec![vec![1], vec![2], vec![]]),
        )
        .unwrap()
    }

    #[test]
    fn top_is_a_forall_deadlock() {
        let m = chain();
        let mc = build_mc_game(&m, &closure(&Formula::Top).unwrap(), 0, Deadline::none()).unwrap();
        assert_eq!(mc.game.len(), 1);
        assert_eq!(mc.game.owner[0], Player::Forall);
        assert!(mc.game.moves[0].is_empty());
        assert!(check_game(&m, 0, &Formula::Top, Deadline::none()).unwrap().holds);
    }

    #[test]
    fn agrees_with_local_engine_on_chain() {
        let m = chain();
        for f in ["nu X. X", "mu X. X", "mu X. p | <>X", "nu X. <>X", "[]false", "nu X. mu Y. (p & <>X) | <>Y"] {
            let phi = parse_formula(f).unwrap();
            for s in 0..3 {
                let game = check_game(&m, s, &phi, Deadline::none()).unwrap().holds;
                let local = check_local(&m, s, &phi, false, Deadline::none()).unwrap().holds;
                assert_eq!(game, local, "{f} at {s}");
            }
        }
    }
}
