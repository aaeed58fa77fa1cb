//! Finite coalgebras for the five supported functors and the predicate
//! liftings that give the modalities their one-step meaning.

mod json;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use fixedbitset::FixedBitSet;
use num::bigint::BigUint;
use num::{Integer, One, ToPrimitive};

use crate::formula::{Functor, ModalOp};
use crate::rational::Rational;

pub use json::{parse_model, serialize_model};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Malformed(String),
    #[error("unknown functor `{0}`")]
    UnknownFunctor(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("distribution of state `{state}` sums to {sum}, not 1")]
    DistributionSum { state: String, sum: Rational },
    #[error("invalid weight for `{state}` -> `{target}`: {reason}")]
    InvalidWeight { state: String, target: String, reason: String },
    #[error("state `{state}`: {reason}")]
    InvalidMoves { state: String, reason: String },
    #[error("state `{state}` has no transition for joint move {moves}")]
    MissingTransition { state: String, moves: String },
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error("modality {op} needs a {needed} model, found {found}")]
    FunctorMismatch { op: String, needed: Functor, found: Functor },
}

/// One row of a probability distribution, rescaled to integer weights over a
/// common denominator so that liftings are evaluated in integer arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionRow {
    pub entries: Vec<(usize, Rational)>,
    scale: BigUint,
    weights: Vec<BigUint>,
    small: Option<(u64, Vec<u64>)>,
}

impl DistributionRow {
    pub fn new(mut entries: Vec<(usize, Rational)>) -> DistributionRow {
        entries.sort_by_key(|(s, _)| *s);
        let scale = entries
            .iter()
            .fold(BigUint::one(), |acc, (_, p)| acc.lcm(p.denom().magnitude()));
        let weights: Vec<BigUint> = entries
            .iter()
            .map(|(_, p)| p.numer().magnitude() * (&scale / p.denom().magnitude()))
            .collect();
        let small = scale
            .to_u64()
            .and_then(|s| weights.iter().map(|w| w.to_u64()).collect::<Option<Vec<_>>>().map(|w| (s, w)));
        DistributionRow { entries, scale, weights, small }
    }

    /// Common denominator of the row.
    pub fn scale(&self) -> &BigUint {
        &self.scale
    }

    /// Integer weights `p_i * scale`, aligned with `entries`.
    pub fn weights(&self) -> &[BigUint] {
        &self.weights
    }

    pub fn sum(&self) -> Rational {
        self.entries.iter().map(|(_, p)| p.clone()).sum()
    }

    /// Compares `mass(D) * p_den` against `rhs_num * scale`, where `mass(D)`
    /// is the integer weight on D. Returns the ordering of the left side.
    fn compare_mass(&self, pred: &dyn Fn(usize) -> bool, p_den: &BigUint, rhs_num: &BigUint) -> std::cmp::Ordering {
        if let (Some((scale, weights)), Some(pd), Some(rn)) = (&self.small, p_den.to_u64(), rhs_num.to_u64()) {
            let mass: u128 = self
                .entries
                .iter()
                .zip(weights)
                .filter(|((s, _), _)| pred(*s))
                .map(|(_, &w)| u128::from(w))
                .sum();
            let lhs = mass.checked_mul(u128::from(pd));
            let rhs = u128::from(rn).checked_mul(u128::from(*scale));
            if let (Some(l), Some(r)) = (lhs, rhs) {
                return l.cmp(&r);
            }
        }
        let mass: BigUint = self
            .entries
            .iter()
            .zip(&self.weights)
            .filter(|((s, _), _)| pred(*s))
            .map(|(_, w)| w.clone())
            .sum();
        (mass * p_den).cmp(&(rhs_num * &self.scale))
    }
}

/// Concurrent game structure: per state and agent a list of moves, and a
/// successor for every joint move. Joint moves are numbered in mixed radix
/// with the first agent most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameStructure {
    pub moves: Vec<Vec<Vec<String>>>,
    pub delta: Vec<Vec<usize>>,
}

impl GameStructure {
    pub fn joint_count(&self, state: usize) -> usize {
        self.moves[state].iter().map(Vec::len).product()
    }

    /// Move index of every agent in joint move `joint`.
    pub fn decode(&self, state: usize, mut joint: usize) -> Vec<usize> {
        let radices = &self.moves[state];
        let mut out = vec![0; radices.len()];
        for (a, r) in radices.iter().enumerate().rev() {
            out[a] = joint % r.len();
            joint /= r.len();
        }
        out
    }

    pub fn encode(&self, state: usize, choice: &[usize]) -> usize {
        self.moves[state].iter().zip(choice).fold(0, |acc, (r, &c)| acc * r.len() + c)
    }

    /// For every joint choice of the agents in `members` (mixed radix, first
    /// member most significant), the sorted successors over all completions.
    pub fn coalition_outcomes(&self, state: usize, members: &[usize]) -> Vec<Vec<usize>> {
        let radices: Vec<usize> = members.iter().map(|&a| self.moves[state][a].len()).collect();
        let mut groups = vec![Vec::new(); radices.iter().product()];
        for (joint, &target) in self.delta[state].iter().enumerate() {
            let digits = self.decode(state, joint);
            let key = members.iter().zip(&radices).fold(0, |acc, (&a, &r)| acc * r + digits[a]);
            groups[key].push(target);
        }
        for g in &mut groups {
            g.sort_unstable();
            g.dedup();
        }
        groups
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Structure {
    Powerset(Vec<Vec<usize>>),
    Multiset(Vec<Vec<(usize, u64)>>),
    Distribution(Vec<DistributionRow>),
    Monotone(Vec<Vec<Vec<usize>>>),
    Game(GameStructure),
}

/// A finite coalgebra with an atom valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalgebraModel {
    states: Vec<String>,
    index: HashMap<String, usize>,
    valuation: BTreeMap<String, FixedBitSet>,
    agents: Vec<String>,
    structure: Structure,
}

/// Arguments of a predicate lifting: a state and a predicate on states.
#[derive(Clone, Copy, Debug)]
pub struct LiftingArgument<'a> {
    pub model: &'a CoalgebraModel,
    pub state: usize,
    pub predicate: &'a FixedBitSet,
}

impl CoalgebraModel {
    /// Builds and validates a model. Successor lists are sorted and
    /// deduplicated; neighbourhood families are sorted.
    pub fn new(
        states: Vec<String>,
        valuation: BTreeMap<String, Vec<usize>>,
        agents: Vec<String>,
        structure: Structure,
    ) -> Result<CoalgebraModel, ModelError> {
        let mut index = HashMap::with_capacity(states.len());
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        let n = states.len();
        let check = |s: usize| if s < n { Ok(()) } else { Err(ModelError::UnknownState(format!("#{s}"))) };
        let mut bits = BTreeMap::new();
        for (atom, members) in valuation {
            let mut set = FixedBitSet::with_capacity(n);
            for s in members {
                check(s)?;
                set.insert(s);
            }
            bits.insert(atom, set);
        }
        let structure = match structure {
            Structure::Powerset(mut rows) => {
                if rows.len() != n {
                    return Err(ModelError::Malformed("one successor list per state expected".into()));
                }
                for row in &mut rows {
                    row.sort_unstable();
                    row.dedup();
                    row.iter().try_for_each(|&s| check(s))?;
                }
                Structure::Powerset(rows)
            }
            Structure::Multiset(mut rows) => {
                if rows.len() != n {
                    return Err(ModelError::Malformed("one multiset per state expected".into()));
                }
                for (c, row) in rows.iter_mut().enumerate() {
                    row.sort_unstable();
                    for w in row.windows(2) {
                        if w[0].0 == w[1].0 {
                            return Err(ModelError::Malformed(format!("duplicate successor in multiset of `{}`", states[c])));
                        }
                    }
                    for &(s, m) in row.iter() {
                        check(s)?;
                        if m == 0 {
                            return Err(ModelError::InvalidWeight {
                                state: states[c].clone(),
                                target: states[s].clone(),
                                reason: "multiplicity must be at least 1".into(),
                            });
                        }
                    }
                }
                Structure::Multiset(rows)
            }
            Structure::Distribution(rows) => {
                if rows.len() != n {
                    return Err(ModelError::Malformed("one distribution per state expected".into()));
                }
                for (c, row) in rows.iter().enumerate() {
                    for w in row.entries.windows(2) {
                        if w[0].0 == w[1].0 {
                            return Err(ModelError::Malformed(format!("duplicate successor in distribution of `{}`", states[c])));
                        }
                    }
                    for (s, p) in &row.entries {
                        check(*s)?;
                        if !p.is_positive() {
                            return Err(ModelError::InvalidWeight {
                                state: states[c].clone(),
                                target: states[*s].clone(),
                                reason: "probability must be positive".into(),
                            });
                        }
                    }
                    let sum = row.sum();
                    if sum != Rational::one() {
                        return Err(ModelError::DistributionSum { state: states[c].clone(), sum });
                    }
                }
                Structure::Distribution(rows)
            }
            Structure::Monotone(mut rows) => {
                if rows.len() != n {
                    return Err(ModelError::Malformed("one neighbourhood family per state expected".into()));
                }
                for family in &mut rows {
                    for hood in family.iter_mut() {
                        hood.sort_unstable();
                        hood.dedup();
                        hood.iter().try_for_each(|&s| check(s))?;
                    }
                    family.sort();
                    family.dedup();
                }
                Structure::Monotone(rows)
            }
            Structure::Game(g) => {
                if g.moves.len() != n || g.delta.len() != n {
                    return Err(ModelError::Malformed("moves and transitions for every state expected".into()));
                }
                for c in 0..n {
                    if g.moves[c].len() != agents.len() {
                        return Err(ModelError::InvalidMoves {
                            state: states[c].clone(),
                            reason: format!("expected moves for {} agents", agents.len()),
                        });
                    }
                    for (a, mv) in g.moves[c].iter().enumerate() {
                        if mv.is_empty() {
                            return Err(ModelError::InvalidMoves {
                                state: states[c].clone(),
                                reason: format!("agent `{}` has no moves", agents[a]),
                            });
                        }
                        let distinct: BTreeSet<&String> = mv.iter().collect();
                        if distinct.len() != mv.len() {
                            return Err(ModelError::InvalidMoves {
                                state: states[c].clone(),
                                reason: format!("agent `{}` has duplicate moves", agents[a]),
                            });
                        }
                    }
                    if g.delta[c].len() != g.joint_count(c) {
                        return Err(ModelError::MissingTransition {
                            state: states[c].clone(),
                            moves: format!("(expected {} joint moves)", g.joint_count(c)),
                        });
                    }
                    g.delta[c].iter().try_for_each(|&s| check(s))?;
                }
                Structure::Game(g)
            }
        };
        if !matches!(structure, Structure::Game(_)) && !agents.is_empty() {
            return Err(ModelError::Malformed("agents are only allowed for game models".into()));
        }
        Ok(CoalgebraModel { states, index, valuation: bits, agents, structure })
    }

    pub fn functor(&self) -> Functor {
        match self.structure {
            Structure::Powerset(_) => Functor::Powerset,
            Structure::Multiset(_) => Functor::Multiset,
            Structure::Distribution(_) => Functor::Distribution,
            Structure::Monotone(_) => Functor::Monotone,
            Structure::Game(_) => Functor::Game,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.states[state]
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn structure(&self) -> &Structure {
        &self.structure
    }

    pub fn valuation(&self) -> &BTreeMap<String, FixedBitSet> {
        &self.valuation
    }

    /// Whether `atom` holds at `state`; unknown atoms hold nowhere.
    pub fn holds(&self, atom: &str, state: usize) -> bool {
        self.valuation.get(atom).is_some_and(|set| set.contains(state))
    }

    /// Checks that `op` is interpreted over this model's functor and, for
    /// coalition modalities, that all agents exist.
    pub fn check_op(&self, op: &ModalOp) -> Result<(), ModelError> {
        if op.functor() != self.functor() {
            return Err(ModelError::FunctorMismatch { op: op.to_string(), needed: op.functor(), found: self.functor() });
        }
        if let ModalOp::CoalDia(c) | ModalOp::CoalBox(c) = op {
            for agent in c {
                if !self.agents.contains(agent) {
                    return Err(ModelError::UnknownAgent(agent.clone()));
                }
            }
        }
        Ok(())
    }

    /// Agent indices of a coalition, in agent order.
    pub fn coalition_indices(&self, coalition: &BTreeSet<String>) -> Vec<usize> {
        (0..self.agents.len()).filter(|&a| coalition.contains(&self.agents[a])).collect()
    }

    /// States the one-step structure at `state` can refer to.
    pub fn modal_base(&self, state: usize) -> Vec<usize> {
        let mut out: Vec<usize> = match &self.structure {
            Structure::Powerset(rows) => rows[state].clone(),
            Structure::Multiset(rows) => rows[state].iter().map(|&(s, _)| s).collect(),
            Structure::Distribution(rows) => rows[state].entries.iter().map(|(s, _)| *s).collect(),
            Structure::Monotone(rows) => rows[state].iter().flatten().copied().collect(),
            Structure::Game(g) => g.delta[state].clone(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Evaluates `xi(state) ∈ [[op]](D)` where `D = { d | pred(d) }`.
    /// The operator must have been validated with [`check_op`](Self::check_op).
    pub fn lift_with(&self, op: &ModalOp, state: usize, pred: &dyn Fn(usize) -> bool) -> bool {
        match (&self.structure, op) {
            (Structure::Powerset(rows), ModalOp::Diamond) => rows[state].iter().any(|&d| pred(d)),
            (Structure::Powerset(rows), ModalOp::Box) => rows[state].iter().all(|&d| pred(d)),
            (Structure::Multiset(rows), ModalOp::GradedDia(n)) => {
                let inside = rows[state].iter().filter(|(d, _)| pred(*d)).fold(0u64, |acc, (_, m)| acc.saturating_add(*m));
                inside > *n
            }
            (Structure::Multiset(rows), ModalOp::GradedBox(n)) => {
                let outside = rows[state].iter().filter(|(d, _)| !pred(*d)).fold(0u64, |acc, (_, m)| acc.saturating_add(*m));
                outside <= *n
            }
            (Structure::Distribution(rows), ModalOp::ProbDia(p)) => {
                // mass(D)/scale > p_num/p_den
                let p_den = p.denom().magnitude();
                let p_num = p.numer().magnitude();
                rows[state].compare_mass(pred, p_den, p_num) == std::cmp::Ordering::Greater
            }
            (Structure::Distribution(rows), ModalOp::ProbBox(p)) => {
                // mass(D)/scale >= 1 - p_num/p_den
                let p_den = p.denom().magnitude();
                let rest = p_den - p.numer().magnitude();
                rows[state].compare_mass(pred, p_den, &rest) != std::cmp::Ordering::Less
            }
            (Structure::Monotone(rows), ModalOp::MonDia) => rows[state].iter().any(|hood| hood.iter().all(|&d| pred(d))),
            (Structure::Monotone(rows), ModalOp::MonBox) => rows[state].iter().all(|hood| hood.iter().any(|&d| pred(d))),
            (Structure::Game(g), ModalOp::CoalDia(c)) => self.coalition_lift(g, state, c, pred, true),
            (Structure::Game(g), ModalOp::CoalBox(c)) => self.coalition_lift(g, state, c, pred, false),
            _ => panic!("modality {op} applied to a {} model", self.functor()),
        }
    }

    /// Coalition modalities. For every joint choice of the coalition we ask
    /// whether all (enforce) or some (box) completions by the other agents
    /// land in D; enforce needs one good choice, box needs all choices good.
    fn coalition_lift(
        &self,
        g: &GameStructure,
        state: usize,
        coalition: &BTreeSet<String>,
        pred: &dyn Fn(usize) -> bool,
        enforce: bool,
    ) -> bool {
        let members = self.coalition_indices(coalition);
        let radices: Vec<usize> = members.iter().map(|&a| g.moves[state][a].len()).collect();
        let choices: usize = radices.iter().product();
        // outcome[k] for coalition choice k: enforce -> all completions in D,
        // box -> some completion in D.
        let mut outcome = vec![enforce; choices];
        for (joint, &target) in g.delta[state].iter().enumerate() {
            let digits = g.decode(state, joint);
            let key = members.iter().zip(&radices).fold(0, |acc, (&a, &r)| acc * r + digits[a]);
            let inside = pred(target);
            if enforce {
                outcome[key] &= inside;
            } else {
                outcome[key] |= inside;
            }
        }
        if enforce {
            outcome.iter().any(|&b| b)
        } else {
            outcome.iter().all(|&b| b)
        }
    }

    /// Predicate lifting on an explicit predicate.
    pub fn lift(&self, op: &ModalOp, state: usize, predicate: &FixedBitSet) -> Result<bool, ModelError> {
        self.check_op(op)?;
        Ok(self.lift_with(op, state, &|d| predicate.contains(d)))
    }

    pub fn state_set(&self, members: impl IntoIterator<Item = usize>) -> FixedBitSet {
        let mut set = FixedBitSet::with_capacity(self.len());
        set.extend(members);
        set
    }
}

/// `xi(c) ∈ [[op]](D)` for a lifting argument.
pub fn lift(op: &ModalOp, arg: &LiftingArgument<'_>) -> Result<bool, ModelError> {
    arg.model.lift(op, arg.state, arg.predicate)
}

/// Support of the one-step structure at a state.
pub fn modal_base(model: &CoalgebraModel, state: usize) -> Vec<usize> {
    model.modal_base(state)
}
