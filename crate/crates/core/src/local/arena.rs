use fixedbitset::FixedBitSet;

use super::{LocalStats, ProductRegion};
use crate::error::{CheckError, Deadline};
use crate::formula::{ClosureGraph, NodeKind};
use crate::model::CoalgebraModel;

const NONE: u32 = u32::MAX;

/// Positions of a (partial) product with densely numbered pairs and their
/// dependencies in compressed rows. Modal dependencies are stored in state
/// order so a lifting predicate can find them by binary search.
#[derive(Clone, Debug, Default)]
pub(super) struct Arena {
    pairs: Vec<(u32, u32)>,
    offsets: Vec<u32>,
    deps: Vec<u32>,
}

impl Arena {
    pub(super) fn len(&self) -> usize {
        self.pairs.len()
    }

    pub(super) fn pair(&self, i: usize) -> (usize, usize) {
        let (c, n) = self.pairs[i];
        (c as usize, n as usize)
    }

    pub(super) fn push_pair(&mut self, state: usize, node: usize) {
        self.pairs.push((state as u32, node as u32));
    }

    /// Records the dependencies of pair `i`; pairs must be completed in order.
    pub(super) fn set_deps(&mut self, i: usize, deps: &[u32]) {
        debug_assert_eq!(self.offsets.len(), i);
        self.offsets.push(self.deps.len() as u32);
        self.deps.extend_from_slice(deps);
    }

    fn deps_of(&self, i: usize) -> &[u32] {
        let start = self.offsets[i] as usize;
        let end = self.offsets.get(i + 1).map_or(self.deps.len(), |&e| e as usize);
        &self.deps[start..end]
    }

    /// The full product, with pair id `state * |cl| + node`.
    pub(super) fn full(model: &CoalgebraModel, cl: &ClosureGraph) -> Arena {
        let k = cl.len();
        let mut arena = Arena::default();
        for c in 0..model.len() {
            for n in 0..k {
                arena.push_pair(c, n);
            }
        }
        for c in 0..model.len() {
            for n in 0..k {
                let deps: Vec<u32> = match cl.kind(n) {
                    NodeKind::Modal(_, arg) => model.modal_base(c).into_iter().map(|d| (d * k + arg) as u32).collect(),
                    kind => kind.local_operands().map(|m| (c * k + m) as u32).collect(),
                };
                arena.set_deps(c * k + n, &deps);
            }
        }
        arena
    }

    /// The pairs of `scope`; dependencies outside it are recorded as absent.
    pub(super) fn from_scope(model: &CoalgebraModel, cl: &ClosureGraph, scope: &ProductRegion) -> Arena {
        let k = cl.len();
        let mut id = vec![NONE; model.len() * k];
        let mut arena = Arena::default();
        for (c, n) in scope.iter() {
            id[c * k + n] = arena.len() as u32;
            arena.push_pair(c, n);
        }
        for i in 0..arena.len() {
            let (c, n) = arena.pair(i);
            let deps: Vec<u32> = match cl.kind(n) {
                // absent modal dependencies are dropped so the rest stays searchable by state
                NodeKind::Modal(_, arg) => {
                    model.modal_base(c).into_iter().map(|d| id[d * k + arg]).filter(|&j| j != NONE).collect()
                }
                kind => kind.local_operands().map(|m| id[c * k + m]).collect(),
            };
            arena.set_deps(i, &deps);
        }
        arena
    }

    pub(super) fn solve(
        &self,
        model: &CoalgebraModel,
        cl: &ClosureGraph,
        m: usize,
        deadline: Deadline,
    ) -> Result<FixedBitSet, CheckError> {
        self.solve_counting(model, cl, m, deadline, &mut LocalStats::default())
    }

    /// Nested fixpoint over the first `m` pairs; the rest count as lost.
    pub(super) fn solve_counting(
        &self,
        model: &CoalgebraModel,
        cl: &ClosureGraph,
        m: usize,
        deadline: Deadline,
        stats: &mut LocalStats,
    ) -> Result<FixedBitSet, CheckError> {
        // Pad to an odd top level so the outermost variable is a least one.
        let top = (cl.max_priority() | 1) as usize;
        let mut present = vec![false; top + 1];
        for i in 0..m {
            present[cl.priority(self.pairs[i].1 as usize) as usize] = true;
        }
        let prio: Vec<u32> = self.pairs[..m].iter().map(|&(_, n)| cl.priority(n as usize)).collect();
        // reverse dependencies inside the prefix, for incremental body updates
        let mut rev_offsets = vec![0u32; m + 1];
        for i in 0..m {
            for &j in self.deps_of(i) {
                if (j as usize) < m {
                    rev_offsets[j as usize + 1] += 1;
                }
            }
        }
        for j in 0..m {
            rev_offsets[j + 1] += rev_offsets[j];
        }
        let mut fill = rev_offsets.clone();
        let mut rev = vec![0u32; rev_offsets[m] as usize];
        for i in 0..m {
            for &j in self.deps_of(i) {
                if (j as usize) < m {
                    rev[fill[j as usize] as usize] = i as u32;
                    fill[j as usize] += 1;
                }
            }
        }
        let mut solver = Nested {
            arena: self,
            model,
            cl,
            m,
            deadline,
            present,
            xs: vec![FixedBitSet::with_capacity(m); top + 1],
            max_rounds: 0,
            prio,
            rev_offsets,
            rev,
            last: None,
        };
        let won = solver.level(top as isize)?;
        stats.solves += 1;
        stats.max_rounds = stats.max_rounds.max(solver.max_rounds);
        Ok(won)
    }
}

struct Nested<'a> {
    arena: &'a Arena,
    model: &'a CoalgebraModel,
    cl: &'a ClosureGraph,
    m: usize,
    deadline: Deadline,
    present: Vec<bool>,
    xs: Vec<FixedBitSet>,
    max_rounds: usize,
    prio: Vec<u32>,
    rev_offsets: Vec<u32>,
    rev: Vec<u32>,
    /// Previous body result and the variable values it was computed from.
    last: Option<(FixedBitSet, Vec<FixedBitSet>)>,
}

impl Nested<'_> {
    /// Fixpoint of variable `level` for the current outer values: ν at even
    /// levels (from the full scope), μ at odd ones (from the empty set).
    /// Inner variables restart on every round.
    fn level(&mut self, level: isize) -> Result<FixedBitSet, CheckError> {
        if level < 0 {
            return self.body();
        }
        let l = level as usize;
        if !self.present[l] {
            return self.level(level - 1);
        }
        let mut init = FixedBitSet::with_capacity(self.m);
        if l % 2 == 0 {
            init.insert_range(..);
        }
        self.xs[l] = init;
        let mut rounds = 0;
        loop {
            rounds += 1;
            let next = self.level(level - 1)?;
            if next == self.xs[l] {
                self.max_rounds = self.max_rounds.max(rounds);
                return Ok(next);
            }
            self.xs[l] = next;
        }
    }

    /// One-step evaluation of every pair against its own priority's variable.
    ///
    /// A pair only reads its dependencies in `X_{Ω(pair)}`, so after the first
    /// call only pairs with such a dependency that changed are re-evaluated.
    /// The result is the same as a full sweep.
    fn body(&mut self) -> Result<FixedBitSet, CheckError> {
        self.deadline.check()?;
        let Some((mut out, mut seen)) = self.last.take() else {
            let mut out = FixedBitSet::with_capacity(self.m);
            for i in 0..self.m {
                out.set(i, self.eval(i));
            }
            self.last = Some((out.clone(), self.xs.clone()));
            return Ok(out);
        };
        let mut dirty = FixedBitSet::with_capacity(self.m);
        for (p, x) in self.xs.iter().enumerate() {
            if *x == seen[p] {
                continue;
            }
            // word-wise xor; the iterator form walks every member of both sides
            seen[p].symmetric_difference_with(x);
            for j in seen[p].ones() {
                let (a, b) = (self.rev_offsets[j] as usize, self.rev_offsets[j + 1] as usize);
                for &i in &self.rev[a..b] {
                    if self.prio[i as usize] as usize == p {
                        dirty.insert(i as usize);
                    }
                }
            }
            seen[p].clone_from(x);
        }
        for i in dirty.ones() {
            out.set(i, self.eval(i));
        }
        self.last = Some((out.clone(), seen));
        Ok(out)
    }

    fn eval(&self, i: usize) -> bool {
        let (c, n) = self.arena.pair(i);
        let x = &self.xs[self.prio[i] as usize];
        let won = |j: u32| (j as usize) < self.m && x.contains(j as usize);
        let deps = self.arena.deps_of(i);
        match self.cl.kind(n) {
            NodeKind::Top => true,
            NodeKind::Bot => false,
            NodeKind::Atom(p) => self.model.holds(p, c),
            NodeKind::NegAtom(p) => !self.model.holds(p, c),
            NodeKind::And(..) => won(deps[0]) && won(deps[1]),
            NodeKind::Or(..) => won(deps[0]) || won(deps[1]),
            NodeKind::Fix(..) => won(deps[0]),
            NodeKind::Modal(op, _) => {
                let pairs = &self.arena.pairs;
                self.model.lift_with(op, c, &|d| {
                    deps.binary_search_by_key(&(d as u32), |&j| pairs[j as usize].0).is_ok_and(|k| won(deps[k]))
                })
            }
        }
    }
}
