//! Local model checking: winning regions of the model-checking game computed
//! directly as nested fixpoints over state × closure pairs.
//!
//! The eager mode iterates over the full product. The lazy mode explores the
//! product breadth-first from the root pair and re-solves at exploration
//! sizes 1, 2, 4, 8, ... and at exhaustion; both the region won by ∃ for the
//! formula and the region won by ∃ for its negation are sound lower bounds
//! on the explored part, so either can settle the root early.

mod arena;

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::error::{CheckError, Deadline};
use crate::formula::{closure, ClosureGraph, Formula, NodeKind};
use crate::model::{CoalgebraModel, ModelError};
use crate::rational::Rational;

use arena::Arena;

/// A set of (state, closure node) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductRegion {
    nodes: usize,
    bits: FixedBitSet,
}

impl ProductRegion {
    pub fn empty(states: usize, nodes: usize) -> ProductRegion {
        ProductRegion { nodes, bits: FixedBitSet::with_capacity(states * nodes) }
    }

    pub fn full(states: usize, nodes: usize) -> ProductRegion {
        let mut r = ProductRegion::empty(states, nodes);
        r.bits.insert_range(..);
        r
    }

    pub fn states(&self) -> usize {
        if self.nodes == 0 {
            0
        } else {
            self.bits.len() / self.nodes
        }
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn contains(&self, state: usize, node: usize) -> bool {
        self.bits.contains(state * self.nodes + node)
    }

    pub fn insert(&mut self, state: usize, node: usize) {
        self.bits.insert(state * self.nodes + node);
    }

    pub fn union_with(&mut self, other: &ProductRegion) {
        self.bits.union_with(&other.bits);
    }

    pub fn is_subset(&self, other: &ProductRegion) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &ProductRegion) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.ones().map(move |i| (i / self.nodes, i % self.nodes))
    }

    /// States `c` with `(c, node)` in the region.
    pub fn states_at(&self, node: usize) -> FixedBitSet {
        let n = self.states();
        let mut out = FixedBitSet::with_capacity(n);
        out.extend((0..n).filter(|&c| self.contains(c, node)));
        out
    }
}

/// Checks that every modality of the closure is interpreted by the model.
pub fn check_compatible(model: &CoalgebraModel, cl: &ClosureGraph) -> Result<(), ModelError> {
    cl.modal_ops().into_iter().try_for_each(|op| model.check_op(op))
}

/// One-step evaluation of `node` against `x`, restricted to `scope`.
pub fn eval_step(
    model: &CoalgebraModel,
    cl: &ClosureGraph,
    node: usize,
    x: &ProductRegion,
    scope: &ProductRegion,
) -> Result<ProductRegion, ModelError> {
    if let NodeKind::Modal(op, _) = cl.kind(node) {
        model.check_op(op)?;
    }
    let mut out = ProductRegion::empty(model.len(), cl.len());
    for c in 0..model.len() {
        if !scope.contains(c, node) {
            continue;
        }
        let holds = match cl.kind(node) {
            NodeKind::Top => true,
            NodeKind::Bot => false,
            NodeKind::Atom(p) => model.holds(p, c),
            NodeKind::NegAtom(p) => !model.holds(p, c),
            NodeKind::And(l, r) => x.contains(c, *l) && x.contains(c, *r),
            NodeKind::Or(l, r) => x.contains(c, *l) || x.contains(c, *r),
            NodeKind::Fix(_, body) => x.contains(c, *body),
            NodeKind::Modal(op, arg) => model.lift_with(op, c, &|d| x.contains(d, *arg)),
        };
        if holds {
            out.insert(c, node);
        }
    }
    Ok(out)
}

/// The region won by ∃ within `scope`; pairs outside the scope never count
/// as won.
pub fn solve_nested(
    model: &CoalgebraModel,
    cl: &ClosureGraph,
    scope: &ProductRegion,
    deadline: Deadline,
) -> Result<ProductRegion, CheckError> {
    check_compatible(model, cl)?;
    let arena = Arena::from_scope(model, cl, scope);
    let won = arena.solve(model, cl, arena.len(), deadline)?;
    let mut out = ProductRegion::empty(model.len(), cl.len());
    for i in won.ones() {
        let (c, n) = arena.pair(i);
        out.insert(c, n);
    }
    Ok(out)
}

/// Counters of a local run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalStats {
    /// Product pairs in the solved scope when the verdict was reached.
    pub explored: usize,
    /// |states| · |closure|.
    pub total: usize,
    /// Number of (re-)solves performed.
    pub solves: usize,
    /// Largest number of Kleene rounds any single fixpoint variable needed.
    pub max_rounds: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalOutcome {
    pub holds: bool,
    pub stats: LocalStats,
}

/// Explored pairs over total pairs.
pub fn exploration_quotient(stats: &LocalStats) -> Rational {
    if stats.total == 0 {
        return Rational::one();
    }
    Rational::new(stats.explored as i64, stats.total as i64)
}

/// Bookkeeping of a lazy exploration.
#[derive(Clone, Debug)]
pub struct ExplorationState {
    arena: Arena,
    index: HashMap<(usize, usize), u32>,
    /// Pairs below this id have had their dependencies added.
    expanded: usize,
    pub total: usize,
    pub decided: Option<bool>,
}

impl ExplorationState {
    pub fn new(model: &CoalgebraModel, cl: &ClosureGraph, state: usize) -> ExplorationState {
        let mut st = ExplorationState {
            arena: Arena::default(),
            index: HashMap::new(),
            expanded: 0,
            total: model.len() * cl.len(),
            decided: None,
        };
        st.discover(state, cl.root);
        st
    }

    fn discover(&mut self, state: usize, node: usize) -> u32 {
        let next = self.arena.len() as u32;
        *self.index.entry((state, node)).or_insert_with(|| {
            self.arena.push_pair(state, node);
            next
        })
    }

    /// Number of expanded pairs.
    pub fn explored(&self) -> usize {
        self.expanded
    }

    /// Pairs discovered but not yet expanded.
    pub fn frontier(&self) -> usize {
        self.arena.len() - self.expanded
    }

    pub fn explored_region(&self, model: &CoalgebraModel, cl: &ClosureGraph) -> ProductRegion {
        let mut r = ProductRegion::empty(model.len(), cl.len());
        for i in 0..self.expanded {
            let (c, n) = self.arena.pair(i);
            r.insert(c, n);
        }
        r
    }

    /// Expands the next frontier pair. Returns false when the frontier is empty.
    pub fn expand_next(&mut self, model: &CoalgebraModel, cl: &ClosureGraph) -> bool {
        if self.expanded == self.arena.len() {
            return false;
        }
        let (c, n) = self.arena.pair(self.expanded);
        let deps: Vec<u32> = match cl.kind(n) {
            NodeKind::Modal(_, arg) => {
                let arg = *arg;
                model.modal_base(c).into_iter().map(|d| self.discover(d, arg)).collect()
            }
            kind => kind.local_operands().collect::<Vec<_>>().into_iter().map(|m| self.discover(c, m)).collect(),
        };
        self.arena.set_deps(self.expanded, &deps);
        self.expanded += 1;
        true
    }

    /// Solves for the formula and its dual on the explored part. Returns
    /// `Some(verdict)` if either settles the root.
    pub fn checkpoint(
        &mut self,
        model: &CoalgebraModel,
        cl: &ClosureGraph,
        dual: &ClosureGraph,
        deadline: Deadline,
        stats: &mut LocalStats,
    ) -> Result<Option<bool>, CheckError> {
        let m = self.expanded;
        let exists = self.arena.solve_counting(model, cl, m, deadline, stats)?;
        if exists.contains(0) {
            self.decided = Some(true);
            return Ok(self.decided);
        }
        let forall = self.arena.solve_counting(model, dual, m, deadline, stats)?;
        if forall.contains(0) {
            self.decided = Some(false);
        }
        Ok(self.decided)
    }
}

/// Decides whether `state` satisfies `phi`.
pub fn check_local(
    model: &CoalgebraModel,
    state: usize,
    phi: &Formula,
    lazy: bool,
    deadline: Deadline,
) -> Result<LocalOutcome, CheckError> {
    let cl = closure(phi)?;
    check_local_closure(model, state, &cl, lazy, deadline)
}

/// [`check_local`] on a prepared closure graph.
pub fn check_local_closure(
    model: &CoalgebraModel,
    state: usize,
    cl: &ClosureGraph,
    lazy: bool,
    deadline: Deadline,
) -> Result<LocalOutcome, CheckError> {
    if state >= model.len() {
        return Err(CheckError::UnknownState(format!("#{state}")));
    }
    check_compatible(model, cl)?;
    let dual = cl.dual();
    let mut stats = LocalStats { total: model.len() * cl.len(), ..LocalStats::default() };
    if !lazy {
        let arena = Arena::full(model, cl);
        let root = state * cl.len() + cl.root;
        let exists = arena.solve_counting(model, cl, arena.len(), deadline, &mut stats)?;
        let forall = arena.solve_counting(model, &dual, arena.len(), deadline, &mut stats)?;
        let holds = exists.contains(root);
        assert_ne!(holds, forall.contains(root), "determinacy violated at the root");
        stats.explored = stats.total;
        return Ok(LocalOutcome { holds, stats });
    }
    let mut ex = ExplorationState::new(model, cl, state);
    let mut next_checkpoint = 1;
    loop {
        deadline.check()?;
        let progressed = ex.expand_next(model, cl);
        if ex.explored() == next_checkpoint || !progressed {
            next_checkpoint *= 2;
            if let Some(holds) = ex.checkpoint(model, cl, &dual, deadline, &mut stats)? {
                stats.explored = ex.explored();
                return Ok(LocalOutcome { holds, stats });
            }
            if !progressed {
                unreachable!("exhausted exploration left the root undecided");
            }
        }
    }
}
