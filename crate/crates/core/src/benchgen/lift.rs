use std::collections::BTreeMap;

use super::Lift;
use crate::formula::{Formula, ModalOp};
use crate::game::{ParityGame, Player};
use crate::model::{CoalgebraModel, DistributionRow, Structure};
use crate::rational::Rational;

/// A game read as a coalgebra, plus how many deadlocks received a self-loop.
#[derive(Clone, Debug)]
pub struct LiftedModel {
    pub model: CoalgebraModel,
    pub added_self_loops: usize,
}

pub fn state_name(v: usize) -> String {
    format!("v{v}")
}

/// Reads a parity game as a coalgebra for the given lift. Positions carry
/// the atoms `prio_<i>` and `owner_e` / `owner_a`.
pub fn lift_game(g: &ParityGame, lift: Lift) -> LiftedModel {
    let mut g = g.clone();
    let added_self_loops = g.remove_deadlocks();
    let n = g.len();
    let mut valuation: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for v in 0..n {
        valuation.entry(format!("prio_{}", g.priority[v])).or_default().push(v);
        let owner = match g.owner[v] {
            Player::Exists => "owner_e",
            Player::Forall => "owner_a",
        };
        valuation.entry(owner.to_string()).or_default().push(v);
    }
    let succ: Vec<Vec<usize>> = g
        .moves
        .iter()
        .map(|m| {
            let mut m = m.clone();
            m.sort_unstable();
            m.dedup();
            m
        })
        .collect();
    let structure = match lift {
        Lift::None => Structure::Powerset(succ),
        Lift::Graded => Structure::Multiset(
            g.moves
                .iter()
                .map(|m| {
                    let w = 10u64.div_ceil(m.len() as u64);
                    let mut row: BTreeMap<usize, u64> = BTreeMap::new();
                    for &d in m {
                        *row.entry(d).or_default() += w;
                    }
                    row.into_iter().collect()
                })
                .collect(),
        ),
        Lift::Probabilistic => Structure::Distribution(
            g.moves
                .iter()
                .map(|m| {
                    let mut row: BTreeMap<usize, Rational> = BTreeMap::new();
                    let share = Rational::new(1, m.len() as i64);
                    for &d in m {
                        let e = row.entry(d).or_insert_with(Rational::zero);
                        *e = &*e + &share;
                    }
                    DistributionRow::new(row.into_iter().collect())
                })
                .collect(),
        ),
        Lift::Monotone => Structure::Monotone((0..n).map(|v| two_step_neighbourhoods(&g, &succ, v)).collect()),
    };
    let states = (0..n).map(state_name).collect();
    let model = CoalgebraModel::new(states, valuation, vec![], structure).expect("lifted games are well formed");
    LiftedModel { model, added_self_loops }
}

/// Outcome sets of the owner's two-step strategies from `v`, minimised
/// under inclusion.
fn two_step_neighbourhoods(g: &ParityGame, succ: &[Vec<usize>], v: usize) -> Vec<Vec<usize>> {
    let owner = g.owner[v];
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for &u in &succ[v] {
        if g.owner[u] == owner {
            sets.extend(succ[u].iter().map(|&w| vec![w]));
        } else {
            sets.push(succ[u].clone());
        }
    }
    sets.sort();
    sets.dedup();
    let is_subset = |a: &[usize], b: &[usize]| a.iter().all(|x| b.binary_search(x).is_ok());
    sets.iter()
        .filter(|s| !sets.iter().any(|t| t.len() < s.len() && is_subset(t, s)))
        .cloned()
        .collect()
}

/// The modality pair a lift interprets moves of ∃ and ∀ with.
pub fn lift_modalities(lift: Lift) -> (ModalOp, ModalOp) {
    match lift {
        Lift::None => (ModalOp::Diamond, ModalOp::Box),
        Lift::Monotone => (ModalOp::MonDia, ModalOp::MonBox),
        Lift::Graded => (ModalOp::GradedDia(5), ModalOp::GradedBox(5)),
        Lift::Probabilistic => {
            let half = Rational::new(1, 2);
            (ModalOp::ProbDia(half.clone()), ModalOp::ProbBox(half))
        }
    }
}

/// The formula true at exactly the positions ∃ wins in a game with
/// priorities up to `k` (rounded up to odd).
pub fn chi_formula(k: u32, lift: Lift) -> Formula {
    let k = k | 1;
    let (dia, boxed) = lift_modalities(lift);
    let var = |i: u32| format!("X{i}");
    let body = Formula::disj((0..=k).map(|i| {
        Formula::and(
            Formula::atom(format!("prio_{i}")),
            Formula::or(
                Formula::and(Formula::atom("owner_e"), Formula::modal(dia.clone(), Formula::var(var(i)))),
                Formula::and(Formula::atom("owner_a"), Formula::modal(boxed.clone(), Formula::var(var(i)))),
            ),
        )
    }));
    (0..=k).fold(body, |f, i| if i % 2 == 0 { Formula::nu(var(i), f) } else { Formula::mu(var(i), f) })
}
