use std::collections::{BTreeSet, HashMap};

use super::{Formula, FormulaError, ModalOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FixKind {
    Mu,
    Nu,
}

impl FixKind {
    pub fn dual(self) -> FixKind {
        match self {
            FixKind::Mu => FixKind::Nu,
            FixKind::Nu => FixKind::Mu,
        }
    }

    /// Parity every priority of this kind of fixpoint must have.
    pub fn parity(self) -> u32 {
        match self {
            FixKind::Mu => 1,
            FixKind::Nu => 0,
        }
    }
}

/// Operator of a closure node. Operands are node indices; variable
/// occurrences point back at their binder.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Top,
    Bot,
    Atom(String),
    NegAtom(String),
    And(usize, usize),
    Or(usize, usize),
    Modal(ModalOp, usize),
    Fix(FixKind, usize),
}

impl NodeKind {
    /// Operand nodes evaluated at the same state.
    pub fn local_operands(&self) -> impl Iterator<Item = usize> {
        let (a, b) = match *self {
            NodeKind::And(l, r) | NodeKind::Or(l, r) => (Some(l), Some(r)),
            NodeKind::Fix(_, body) => (Some(body), None),
            _ => (None, None),
        };
        a.into_iter().chain(b)
    }

    fn dual(&self) -> NodeKind {
        match self {
            NodeKind::Top => NodeKind::Bot,
            NodeKind::Bot => NodeKind::Top,
            NodeKind::Atom(p) => NodeKind::NegAtom(p.clone()),
            NodeKind::NegAtom(p) => NodeKind::Atom(p.clone()),
            NodeKind::And(l, r) => NodeKind::Or(*l, *r),
            NodeKind::Or(l, r) => NodeKind::And(*l, *r),
            NodeKind::Modal(op, a) => NodeKind::Modal(op.dual(), *a),
            NodeKind::Fix(k, b) => NodeKind::Fix(k.dual(), *b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureNode {
    pub kind: NodeKind,
    pub priority: u32,
    /// Bound variable name, for fixpoint nodes.
    pub var: Option<String>,
    /// Binder nodes whose variables occur free below a fixpoint node.
    /// Empty for all other nodes.
    pub free: Vec<usize>,
}

/// Fischer-Ladner closure of a closed formula as a graph with one node per
/// distinct closure formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureGraph {
    pub nodes: Vec<ClosureNode>,
    pub root: usize,
    /// Alternation depth of the root formula.
    pub ad: usize,
}

#[derive(Hash, PartialEq, Eq)]
enum Key {
    Top,
    Bot,
    Atom(String),
    NegAtom(String),
    And(usize, usize),
    Or(usize, usize),
    Modal(ModalOp, usize),
}

struct Builder {
    nodes: Vec<ClosureNode>,
    shared: HashMap<Key, usize>,
}

impl Builder {
    fn intern(&mut self, key: Key) -> usize {
        if let Some(&id) = self.shared.get(&key) {
            return id;
        }
        let kind = match &key {
            Key::Top => NodeKind::Top,
            Key::Bot => NodeKind::Bot,
            Key::Atom(p) => NodeKind::Atom(p.clone()),
            Key::NegAtom(p) => NodeKind::NegAtom(p.clone()),
            Key::And(l, r) => NodeKind::And(*l, *r),
            Key::Or(l, r) => NodeKind::Or(*l, *r),
            Key::Modal(op, a) => NodeKind::Modal(op.clone(), *a),
        };
        let id = self.nodes.len();
        self.nodes.push(ClosureNode { kind, priority: 0, var: None, free: Vec::new() });
        self.shared.insert(key, id);
        id
    }

    /// Returns the node for `f` and the binders free in this occurrence.
    fn build(&mut self, f: &Formula, env: &mut Vec<(String, usize)>) -> Result<(usize, BTreeSet<usize>), FormulaError> {
        Ok(match f {
            Formula::Top => (self.intern(Key::Top), BTreeSet::new()),
            Formula::Bot => (self.intern(Key::Bot), BTreeSet::new()),
            Formula::Atom(p) => (self.intern(Key::Atom(p.clone())), BTreeSet::new()),
            Formula::NegAtom(p) => (self.intern(Key::NegAtom(p.clone())), BTreeSet::new()),
            Formula::Var(x) => {
                let binder = env
                    .iter()
                    .rev()
                    .find(|(name, _)| name == x)
                    .map(|&(_, id)| id)
                    .ok_or_else(|| FormulaError::UnboundVariable(x.clone()))?;
                (binder, BTreeSet::from([binder]))
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                let (li, mut lf) = self.build(l, env)?;
                let (ri, rf) = self.build(r, env)?;
                lf.extend(rf);
                let key = if matches!(f, Formula::And(..)) { Key::And(li, ri) } else { Key::Or(li, ri) };
                (self.intern(key), lf)
            }
            Formula::Modal(op, a) => {
                let (ai, af) = self.build(a, env)?;
                (self.intern(Key::Modal(op.clone(), ai)), af)
            }
            Formula::Mu(x, body) | Formula::Nu(x, body) => {
                let kind = if matches!(f, Formula::Mu(..)) { FixKind::Mu } else { FixKind::Nu };
                let id = self.nodes.len();
                self.nodes.push(ClosureNode {
                    kind: NodeKind::Fix(kind, usize::MAX),
                    priority: 0,
                    var: Some(x.clone()),
                    free: Vec::new(),
                });
                env.push((x.clone(), id));
                let built = self.build(body, env);
                env.pop();
                let (bi, mut bf) = built?;
                bf.remove(&id);
                self.nodes[id].kind = NodeKind::Fix(kind, bi);
                self.nodes[id].free = bf.iter().copied().collect();
                (id, bf)
            }
        })
    }
}

/// Builds the closure graph of a closed formula and assigns priorities.
/// Binders are renamed apart first, so identical-looking subformulas under
/// different binders never get identified.
pub fn closure(phi: &Formula) -> Result<ClosureGraph, FormulaError> {
    phi.check_closed()?;
    let phi = if phi.binders_distinct() { phi.clone() } else { phi.alpha_rename() };
    let mut builder = Builder { nodes: Vec::new(), shared: HashMap::new() };
    let (root, _) = builder.build(&phi, &mut Vec::new())?;
    let graph = ClosureGraph { nodes: builder.nodes, root, ad: 0 };
    Ok(assign_priorities(graph))
}

/// Alternation depth: the longest chain of nested, mutually dependent
/// fixpoints counted by the number of least/greatest alternations plus one.
pub fn alternation_depth(phi: &Formula) -> Result<usize, FormulaError> {
    Ok(closure(phi)?.ad)
}

/// Assigns every fixpoint node the least number of its parity (odd for mu,
/// even and at least 2 for nu) that bounds the priorities of all inner
/// fixpoints depending on it; every other node gets 0. Also recomputes `ad`.
pub fn assign_priorities(mut cl: ClosureGraph) -> ClosureGraph {
    let n = cl.nodes.len();
    let deps: Vec<Vec<usize>> = (0..n).map(|x| cl.dependents(x)).collect();
    let mut prio: Vec<Option<u32>> = vec![None; n];
    let mut depth: Vec<Option<usize>> = vec![None; n];

    fn solve(
        x: usize,
        cl: &ClosureGraph,
        deps: &[Vec<usize>],
        prio: &mut [Option<u32>],
        depth: &mut [Option<usize>],
    ) {
        if prio[x].is_some() {
            return;
        }
        let kind = match cl.nodes[x].kind {
            NodeKind::Fix(k, _) => k,
            _ => {
                prio[x] = Some(0);
                depth[x] = Some(0);
                return;
            }
        };
        let mut bound = 0;
        let mut ad = 1;
        for &y in &deps[x] {
            solve(y, cl, deps, prio, depth);
            bound = bound.max(prio[y].unwrap_or(0));
            let NodeKind::Fix(inner, _) = cl.nodes[y].kind else { unreachable!() };
            ad = ad.max(depth[y].unwrap_or(0) + usize::from(inner != kind));
        }
        let base = if kind == FixKind::Mu { 1 } else { 2 };
        let mut p = bound.max(base);
        if p % 2 != kind.parity() {
            p += 1;
        }
        prio[x] = Some(p);
        depth[x] = Some(ad);
    }

    for x in 0..n {
        solve(x, &cl, &deps, &mut prio, &mut depth);
    }
    for (node, p) in cl.nodes.iter_mut().zip(&prio) {
        node.priority = p.unwrap_or(0);
    }
    cl.ad = depth.iter().map(|d| d.unwrap_or(0)).max().unwrap_or(0);
    cl
}

impl ClosureGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn kind(&self, node: usize) -> &NodeKind {
        &self.nodes[node].kind
    }

    pub fn priority(&self, node: usize) -> u32 {
        self.nodes[node].priority
    }

    pub fn max_priority(&self) -> u32 {
        self.nodes.iter().map(|n| n.priority).max().unwrap_or(0)
    }

    pub fn is_fixpoint(&self, node: usize) -> bool {
        matches!(self.nodes[node].kind, NodeKind::Fix(..))
    }

    pub fn modal_ops(&self) -> Vec<&ModalOp> {
        let mut ops: Vec<&ModalOp> = Vec::new();
        for node in &self.nodes {
            if let NodeKind::Modal(op, _) = &node.kind {
                if !ops.contains(&op) {
                    ops.push(op);
                }
            }
        }
        ops
    }

    /// Inner fixpoint nodes that have the variable of `x` free, i.e. the
    /// fixpoints inside `x` that a play can leave to return to `x`.
    pub fn dependents(&self, x: usize) -> Vec<usize> {
        let NodeKind::Fix(_, body) = self.nodes[x].kind else {
            return Vec::new();
        };
        let mut seen = vec![false; self.nodes.len()];
        seen[x] = true;
        let mut stack = vec![body];
        let mut out = Vec::new();
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            let node = &self.nodes[v];
            if matches!(node.kind, NodeKind::Fix(..)) && node.free.binary_search(&x).is_ok() {
                out.push(v);
            }
            match node.kind {
                NodeKind::Modal(_, a) => stack.push(a),
                ref k => stack.extend(k.local_operands()),
            }
        }
        out.sort_unstable();
        out
    }

    /// The closure of the negated formula, node for node: every connective,
    /// modality and fixpoint is dualized and priorities are reassigned.
    pub fn dual(&self) -> ClosureGraph {
        let nodes = self
            .nodes
            .iter()
            .map(|n| ClosureNode { kind: n.kind.dual(), priority: 0, var: n.var.clone(), free: n.free.clone() })
            .collect();
        assign_priorities(ClosureGraph { nodes, root: self.root, ad: 0 })
    }

    /// Formula denoted by a node. Fixpoints whose binder is being printed
    /// appear as their variable; any other fixpoint node prints in full, so
    /// variables bound above `node` stay free in the result.
    pub fn formula_of(&self, node: usize) -> Formula {
        self.formula_rec(node, &mut Vec::new())
    }

    fn formula_rec(&self, node: usize, open: &mut Vec<usize>) -> Formula {
        let n = &self.nodes[node];
        match &n.kind {
            NodeKind::Top => Formula::Top,
            NodeKind::Bot => Formula::Bot,
            NodeKind::Atom(p) => Formula::Atom(p.clone()),
            NodeKind::NegAtom(p) => Formula::NegAtom(p.clone()),
            NodeKind::And(l, r) => Formula::and(self.formula_rec(*l, open), self.formula_rec(*r, open)),
            NodeKind::Or(l, r) => Formula::or(self.formula_rec(*l, open), self.formula_rec(*r, open)),
            NodeKind::Modal(op, a) => Formula::modal(op.clone(), self.formula_rec(*a, open)),
            NodeKind::Fix(kind, body) => {
                let var = n.var.clone().unwrap_or_else(|| format!("X{node}"));
                if open.contains(&node) {
                    return Formula::Var(var);
                }
                open.push(node);
                let body = self.formula_rec(*body, open);
                open.pop();
                match kind {
                    FixKind::Mu => Formula::mu(var, body),
                    FixKind::Nu => Formula::nu(var, body),
                }
            }
        }
    }
}
