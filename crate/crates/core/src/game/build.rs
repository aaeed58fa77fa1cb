use std::collections::{HashMap, VecDeque};

use super::{ParityGame, Player};
use crate::error::{CheckError, Deadline};
use crate::formula::{ClosureGraph, ModalOp, NodeKind};
use crate::local::check_compatible;
use crate::model::{CoalgebraModel, Structure};
use num::ToPrimitive;

/// A model-checking game with the positions `(state, root)` it was built from.
#[derive(Clone, Debug)]
pub struct McGame {
    pub game: ParityGame,
    pub roots: Vec<usize>,
}

/// The model-checking game reachable from `(state, root)`.
pub fn build_mc_game(
    model: &CoalgebraModel,
    cl: &ClosureGraph,
    state: usize,
    deadline: Deadline,
) -> Result<McGame, CheckError> {
    build_mc_game_multi(model, cl, &[state], deadline)
}

/// Unlabelled game for solving only; skips formatting a label per position.
pub(crate) fn build_unlabelled(
    model: &CoalgebraModel,
    cl: &ClosureGraph,
    state: usize,
    deadline: Deadline,
) -> Result<McGame, CheckError> {
    build(model, cl, &[state], false, deadline)
}

/// One game rooted at `(s, root)` for every `s` in `states`.
pub fn build_mc_game_multi(
    model: &CoalgebraModel,
    cl: &ClosureGraph,
    states: &[usize],
    deadline: Deadline,
) -> Result<McGame, CheckError> {
    build(model, cl, states, true, deadline)
}

/// Products up to this many pairs get a dense position table.
const DENSE_LIMIT: usize = 1 << 26;

fn build(
    model: &CoalgebraModel,
    cl: &ClosureGraph,
    states: &[usize],
    labels: bool,
    deadline: Deadline,
) -> Result<McGame, CheckError> {
    check_compatible(model, cl)?;
    if let Some(&s) = states.iter().find(|&&s| s >= model.len()) {
        return Err(CheckError::UnknownState(format!("#{s}")));
    }
    let pairs = model.len().saturating_mul(cl.len());
    let index = if pairs <= DENSE_LIMIT {
        PairIndex::Dense(vec![u32::MAX; pairs])
    } else {
        PairIndex::Sparse(HashMap::new())
    };
    let mut b = Builder { model, cl, game: ParityGame::new(), index, labels, queue: VecDeque::new() };
    let roots = states.iter().map(|&s| b.pair(s, cl.root)).collect();
    let mut steps = 0usize;
    while let Some((pos, c, n)) = b.queue.pop_front() {
        steps += 1;
        if steps % 1024 == 0 {
            deadline.check()?;
        }
        b.expand(pos, c, n)?;
    }
    Ok(McGame { game: b.game, roots })
}

struct Builder<'a> {
    model: &'a CoalgebraModel,
    cl: &'a ClosureGraph,
    game: ParityGame,
    index: PairIndex,
    labels: bool,
    queue: VecDeque<(usize, usize, usize)>,
}

enum PairIndex {
    Dense(Vec<u32>),
    Sparse(HashMap<(usize, usize), usize>),
}

impl Builder<'_> {
    /// Position of `(state, node)`, created on first use.
    fn pair(&mut self, state: usize, node: usize) -> usize {
        let slot = state * self.cl.len() + node;
        match &self.index {
            PairIndex::Dense(v) if v[slot] != u32::MAX => return v[slot] as usize,
            PairIndex::Sparse(m) => {
                if let Some(&p) = m.get(&(state, node)) {
                    return p;
                }
            }
            _ => {}
        }
        let owner = match self.cl.kind(node) {
            NodeKind::Top => Player::Forall,
            NodeKind::Bot => Player::Exists,
            NodeKind::Atom(p) => {
                if self.model.holds(p, state) {
                    Player::Forall
                } else {
                    Player::Exists
                }
            }
            NodeKind::NegAtom(p) => {
                if self.model.holds(p, state) {
                    Player::Exists
                } else {
                    Player::Forall
                }
            }
            NodeKind::And(..) => Player::Forall,
            NodeKind::Or(..) | NodeKind::Fix(..) => Player::Exists,
            NodeKind::Modal(op, _) => match op {
                ModalOp::Diamond
                | ModalOp::GradedDia(_)
                | ModalOp::ProbDia(_)
                | ModalOp::MonDia
                | ModalOp::CoalDia(_) => Player::Exists,
                _ => Player::Forall,
            },
        };
        let label = self.labels.then(|| format!("{}|{}", self.model.state_name(state), node));
        let p = self.game.add(owner, self.cl.priority(node), label);
        match &mut self.index {
            // positions stay below u32::MAX long before memory runs out
            PairIndex::Dense(v) => v[slot] = p as u32,
            PairIndex::Sparse(m) => {
                m.insert((state, node), p);
            }
        }
        self.queue.push_back((p, state, node));
        p
    }

    fn internal(&mut self, owner: Player) -> usize {
        self.game.add(owner, 0, None)
    }

    fn expand(&mut self, pos: usize, c: usize, n: usize) -> Result<(), CheckError> {
        let cl = self.cl;
        match cl.kind(n) {
            NodeKind::Top | NodeKind::Bot | NodeKind::Atom(_) | NodeKind::NegAtom(_) => {}
            &NodeKind::And(l, r) | &NodeKind::Or(l, r) => {
                let moves = vec![self.pair(c, l), self.pair(c, r)];
                self.game.moves[pos] = moves;
            }
            &NodeKind::Fix(_, body) => {
                let m = self.pair(c, body);
                self.game.moves[pos] = vec![m];
            }
            NodeKind::Modal(op, arg) => self.modal(pos, c, op, *arg)?,
        }
        Ok(())
    }

    fn modal(&mut self, pos: usize, c: usize, op: &ModalOp, arg: usize) -> Result<(), CheckError> {
        let model = self.model;
        match (model.structure(), op) {
            (Structure::Powerset(rows), ModalOp::Diamond | ModalOp::Box) => {
                let moves = rows[c].iter().map(|&d| self.pair(d, arg)).collect();
                self.game.moves[pos] = moves;
            }
            (Structure::Monotone(rows), ModalOp::MonDia | ModalOp::MonBox) => {
                let chooser = self.game.owner[pos];
                let mut moves = Vec::with_capacity(rows[c].len());
                for hood in &rows[c] {
                    let h = self.internal(chooser.opponent());
                    self.game.moves[h] = hood.iter().map(|&d| self.pair(d, arg)).collect();
                    moves.push(h);
                }
                self.game.moves[pos] = moves;
            }
            (Structure::Game(g), ModalOp::CoalDia(coalition) | ModalOp::CoalBox(coalition)) => {
                let chooser = self.game.owner[pos];
                let members = model.coalition_indices(coalition);
                let groups = g.coalition_outcomes(c, &members);
                let mut moves = Vec::with_capacity(groups.len());
                for targets in groups {
                    let h = self.internal(chooser.opponent());
                    self.game.moves[h] = targets.iter().map(|&d| self.pair(d, arg)).collect();
                    moves.push(h);
                }
                self.game.moves[pos] = moves;
            }
            (Structure::Multiset(rows), ModalOp::GradedDia(t) | ModalOp::GradedBox(t)) => {
                let row = rows[c].clone();
                self.counting(pos, &row, *t, arg);
            }
            (Structure::Distribution(rows), ModalOp::ProbDia(p) | ModalOp::ProbBox(p)) => {
                // Scale row and threshold by the lcm of all denominators.
                let row = &rows[c];
                let scale = num::Integer::lcm(row.scale(), p.denom().magnitude());
                let too_large = || CheckError::Unsupported(format!("probabilities at `{}` need weights beyond 64 bits", model.state_name(c)));
                let factor = &scale / row.scale();
                let weights = row
                    .entries
                    .iter()
                    .zip(row.weights())
                    .map(|((d, _), w)| (w * &factor).to_u64().map(|w| (*d, w)))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(too_large)?;
                let t = (p.numer().magnitude() * (&scale / p.denom().magnitude())).to_u64().ok_or_else(too_large)?;
                self.counting(pos, &weights, t, arg);
            }
            _ => unreachable!("modalities are checked against the model before building"),
        }
        Ok(())
    }

    /// Layered counting game: the owner of `entry` walks through the
    /// weighted successors, deciding for each whether to count it; the
    /// opponent may challenge a counted successor at `(d, arg)` or accept it.
    /// The owner wins once the count exceeds `threshold` and loses if the
    /// list runs out first.
    fn counting(&mut self, entry: usize, row: &[(usize, u64)], threshold: u64, arg: usize) {
        let owner = self.game.owner[entry];
        let cap = threshold.saturating_add(1);
        let mut layers: HashMap<(usize, u64), usize> = HashMap::new();
        layers.insert((0, 0), entry);
        let mut work = vec![(0usize, 0u64)];
        let mut sink = None;
        while let Some((i, cnt)) = work.pop() {
            let pos = layers[&(i, cnt)];
            if i == row.len() {
                continue; // deadlock: owner loses
            }
            let mut layer = |b: &mut Self, j: usize, k: u64, work: &mut Vec<(usize, u64)>| -> usize {
                if k == cap {
                    return *sink.get_or_insert_with(|| b.internal(owner.opponent()));
                }
                *layers.entry((j, k)).or_insert_with(|| {
                    work.push((j, k));
                    b.internal(owner)
                })
            };
            let skip = layer(self, i + 1, cnt, &mut work);
            let (d, w) = row[i];
            let accept = layer(self, i + 1, cnt.saturating_add(w).min(cap), &mut work);
            let include = self.internal(owner.opponent());
            let challenge = self.pair(d, arg);
            self.game.moves[include] = vec![challenge, accept];
            self.game.moves[pos] = vec![skip, include];
        }
    }
}
