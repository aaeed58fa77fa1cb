//! Coalgebraic mu-calculus formulas: syntax tree, surface syntax, negation
//! normal form and the closure graph used by both engines.

mod closure;
mod parser;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use crate::rational::Rational;

pub use closure::{alternation_depth, assign_priorities, closure, ClosureGraph, ClosureNode, FixKind, NodeKind};
pub use parser::parse_formula;

/// A next-step modality. Every operator has a dual, see [`ModalOp::dual`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ModalOp {
    Diamond,
    Box,
    /// More than `n` successors, counting multiplicities.
    GradedDia(u64),
    /// All but at most `n` successors, counting multiplicities.
    GradedBox(u64),
    /// With probability more than `p`.
    ProbDia(Rational),
    /// With probability at least `1 - p`.
    ProbBox(Rational),
    MonDia,
    MonBox,
    /// The coalition can enforce the argument in the next step.
    CoalDia(BTreeSet<String>),
    /// The coalition cannot prevent the argument in the next step.
    CoalBox(BTreeSet<String>),
}

/// Which functor a modality is interpreted over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Functor {
    Powerset,
    Multiset,
    Distribution,
    Monotone,
    Game,
}

impl Functor {
    pub fn tag(self) -> &'static str {
        match self {
            Functor::Powerset => "powerset",
            Functor::Multiset => "multiset",
            Functor::Distribution => "distribution",
            Functor::Monotone => "monotone",
            Functor::Game => "game",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Functor> {
        Some(match tag {
            "powerset" => Functor::Powerset,
            "multiset" => Functor::Multiset,
            "distribution" => Functor::Distribution,
            "monotone" => Functor::Monotone,
            "game" => Functor::Game,
            _ => return None,
        })
    }
}

impl fmt::Display for Functor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl ModalOp {
    pub fn dual(&self) -> ModalOp {
        match self {
            ModalOp::Diamond => ModalOp::Box,
            ModalOp::Box => ModalOp::Diamond,
            ModalOp::GradedDia(n) => ModalOp::GradedBox(*n),
            ModalOp::GradedBox(n) => ModalOp::GradedDia(*n),
            ModalOp::ProbDia(p) => ModalOp::ProbBox(p.clone()),
            ModalOp::ProbBox(p) => ModalOp::ProbDia(p.clone()),
            ModalOp::MonDia => ModalOp::MonBox,
            ModalOp::MonBox => ModalOp::MonDia,
            ModalOp::CoalDia(c) => ModalOp::CoalBox(c.clone()),
            ModalOp::CoalBox(c) => ModalOp::CoalDia(c.clone()),
        }
    }

    pub fn functor(&self) -> Functor {
        match self {
            ModalOp::Diamond | ModalOp::Box => Functor::Powerset,
            ModalOp::GradedDia(_) | ModalOp::GradedBox(_) => Functor::Multiset,
            ModalOp::ProbDia(_) | ModalOp::ProbBox(_) => Functor::Distribution,
            ModalOp::MonDia | ModalOp::MonBox => Functor::Monotone,
            ModalOp::CoalDia(_) | ModalOp::CoalBox(_) => Functor::Game,
        }
    }
}

fn write_coalition(f: &mut fmt::Formatter<'_>, agents: &BTreeSet<String>) -> fmt::Result {
    let names: Vec<&str> = agents.iter().map(String::as_str).collect();
    f.write_str(&names.join(","))
}

impl fmt::Display for ModalOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModalOp::Diamond => f.write_str("<>"),
            ModalOp::Box => f.write_str("[]"),
            ModalOp::GradedDia(n) => write!(f, "<g {n}>"),
            ModalOp::GradedBox(n) => write!(f, "[g {n}]"),
            ModalOp::ProbDia(p) => write!(f, "<p {p}>"),
            ModalOp::ProbBox(p) => write!(f, "[p {p}]"),
            ModalOp::MonDia => f.write_str("<m>"),
            ModalOp::MonBox => f.write_str("[m]"),
            ModalOp::CoalDia(c) => {
                f.write_str("<{")?;
                write_coalition(f, c)?;
                f.write_str("}>")
            }
            ModalOp::CoalBox(c) => {
                f.write_str("[{")?;
                write_coalition(f, c)?;
                f.write_str("}]")
            }
        }
    }
}

/// A formula in negation normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bot,
    Atom(String),
    NegAtom(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Modal(ModalOp, Box<Formula>),
    Var(String),
    Mu(String, Box<Formula>),
    Nu(String, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unbound fixpoint variable `{0}`")]
    UnboundVariable(String),
    #[error("negation applied to a subformula with free fixpoint variable `{0}`")]
    NonMonotoneNegation(String),
}

// Constructors keep tests and generators readable.
impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn neg_atom(name: impl Into<String>) -> Formula {
        Formula::NegAtom(name.into())
    }

    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn modal(op: ModalOp, arg: Formula) -> Formula {
        Formula::Modal(op, Box::new(arg))
    }

    pub fn mu(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Mu(var.into(), Box::new(body))
    }

    pub fn nu(var: impl Into<String>, body: Formula) -> Formula {
        Formula::Nu(var.into(), Box::new(body))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::Bot)
    }

    /// Syntactic size: number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot | Formula::Atom(_) | Formula::NegAtom(_) | Formula::Var(_) => 1,
            Formula::And(l, r) | Formula::Or(l, r) => 1 + l.size() + r.size(),
            Formula::Modal(_, a) | Formula::Mu(_, a) | Formula::Nu(_, a) => 1 + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            Formula::Modal(_, a) => a.collect_free(bound, out),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                bound.push(x);
                b.collect_free(bound, out);
                bound.pop();
            }
            _ => {}
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Fails with the first free variable, if any.
    pub fn check_closed(&self) -> Result<(), FormulaError> {
        match self.free_vars().into_iter().next() {
            Some(x) => Err(FormulaError::UnboundVariable(x)),
            None => Ok(()),
        }
    }

    /// All atom names, positive or negated.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) | Formula::NegAtom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn modal_ops(&self) -> Vec<ModalOp> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Modal(op, _) = f {
                if !out.contains(op) {
                    out.push(op.clone());
                }
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.visit(f);
                r.visit(f);
            }
            Formula::Modal(_, a) | Formula::Mu(_, a) | Formula::Nu(_, a) => a.visit(f),
            _ => {}
        }
    }

    fn identifiers(&self) -> HashSet<String> {
        let mut out = HashSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom(x) | Formula::NegAtom(x) | Formula::Var(x) | Formula::Mu(x, _) | Formula::Nu(x, _) => {
                out.insert(x.clone());
            }
            _ => {}
        });
        out
    }

    /// Renames bound variables so that every binder uses a distinct name.
    /// The first binder of each name keeps it; later ones get `name_<k>`.
    pub fn alpha_rename(&self) -> Formula {
        let mut taken = self.identifiers();
        let mut seen_binders = HashSet::new();
        let mut env: Vec<(String, String)> = Vec::new();
        self.rename_rec(&mut env, &mut seen_binders, &mut taken)
    }

    fn rename_rec(
        &self,
        env: &mut Vec<(String, String)>,
        seen: &mut HashSet<String>,
        taken: &mut HashSet<String>,
    ) -> Formula {
        match self {
            Formula::Var(x) => {
                let renamed = env.iter().rev().find(|(from, _)| from == x).map(|(_, to)| to.clone());
                Formula::Var(renamed.unwrap_or_else(|| x.clone()))
            }
            Formula::And(l, r) => Formula::and(l.rename_rec(env, seen, taken), r.rename_rec(env, seen, taken)),
            Formula::Or(l, r) => Formula::or(l.rename_rec(env, seen, taken), r.rename_rec(env, seen, taken)),
            Formula::Modal(op, a) => Formula::modal(op.clone(), a.rename_rec(env, seen, taken)),
            Formula::Mu(x, b) | Formula::Nu(x, b) => {
                let fresh = if seen.insert(x.clone()) {
                    x.clone()
                } else {
                    let mut k = 1;
                    loop {
                        let candidate = format!("{x}_{k}");
                        if !taken.contains(&candidate) {
                            break candidate;
                        }
                        k += 1;
                    }
                };
                taken.insert(fresh.clone());
                seen.insert(fresh.clone());
                env.push((x.clone(), fresh.clone()));
                let body = b.rename_rec(env, seen, taken);
                env.pop();
                match self {
                    Formula::Mu(..) => Formula::Mu(fresh, Box::new(body)),
                    _ => Formula::Nu(fresh, Box::new(body)),
                }
            }
            other => other.clone(),
        }
    }

    /// True when no two binders share a name.
    pub fn binders_distinct(&self) -> bool {
        let mut names = HashMap::new();
        let mut ok = true;
        self.visit(&mut |f| {
            if let Formula::Mu(x, _) | Formula::Nu(x, _) = f {
                if names.insert(x.clone(), ()).is_some() {
                    ok = false;
                }
            }
        });
        ok
    }
}

/// Negation of a formula, pushed through to the atoms. Variables are kept
/// as they are, which is correct because every occurrence of a bound
/// variable gets negated twice.
pub fn negate(phi: &Formula) -> Formula {
    match phi {
        Formula::Top => Formula::Bot,
        Formula::Bot => Formula::Top,
        Formula::Atom(p) => Formula::NegAtom(p.clone()),
        Formula::NegAtom(p) => Formula::Atom(p.clone()),
        Formula::And(l, r) => Formula::or(negate(l), negate(r)),
        Formula::Or(l, r) => Formula::and(negate(l), negate(r)),
        Formula::Modal(op, a) => Formula::modal(op.dual(), negate(a)),
        Formula::Var(x) => Formula::Var(x.clone()),
        Formula::Mu(x, b) => Formula::nu(x.clone(), negate(b)),
        Formula::Nu(x, b) => Formula::mu(x.clone(), negate(b)),
    }
}

// Precedence levels used by the printer: binder < or < and < unary.
const PREC_BINDER: u8 = 0;
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNARY: u8 = 3;

impl Formula {
    fn prec(&self) -> u8 {
        match self {
            Formula::Mu(..) | Formula::Nu(..) => PREC_BINDER,
            Formula::Or(..) => PREC_OR,
            Formula::And(..) => PREC_AND,
            _ => PREC_UNARY,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        // Binders extend maximally to the right, so they are bracketed
        // whenever they are not the whole (sub)formula.
        let wrap = self.prec() < min;
        if wrap {
            f.write_str("(")?;
        }
        match self {
            Formula::Top => f.write_str("true")?,
            Formula::Bot => f.write_str("false")?,
            Formula::Atom(p) | Formula::Var(p) => f.write_str(p)?,
            Formula::NegAtom(p) => write!(f, "!{p}")?,
            Formula::Or(l, r) => {
                l.write_at(f, PREC_OR)?;
                f.write_str(" | ")?;
                r.write_at(f, PREC_AND)?;
            }
            Formula::And(l, r) => {
                l.write_at(f, PREC_AND)?;
                f.write_str(" & ")?;
                r.write_at(f, PREC_UNARY)?;
            }
            Formula::Modal(op, a) => {
                write!(f, "{op}")?;
                // `<>p` and `<> p` parse alike; the space keeps `[m]` readable.
                if !matches!(op, ModalOp::Diamond | ModalOp::Box) {
                    f.write_str(" ")?;
                }
                a.write_at(f, PREC_UNARY)?;
            }
            Formula::Mu(x, b) => {
                write!(f, "mu {x}. ")?;
                b.write_at(f, PREC_BINDER)?;
            }
            Formula::Nu(x, b) => {
                write!(f, "nu {x}. ")?;
                b.write_at(f, PREC_BINDER)?;
            }
        }
        if wrap {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, PREC_BINDER)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negate_examples() {
        assert_eq!(negate(&Formula::Top), Formula::Bot);
        let phi = Formula::mu("X", Formula::or(Formula::atom("p"), Formula::modal(ModalOp::Diamond, Formula::var("X"))));
        let expected = Formula::nu("X", Formula::and(Formula::neg_atom("p"), Formula::modal(ModalOp::Box, Formula::var("X"))));
        assert_eq!(negate(&phi), expected);
        let graded = Formula::modal(ModalOp::GradedDia(5), Formula::atom("p"));
        assert_eq!(negate(&graded), Formula::modal(ModalOp::GradedBox(5), Formula::neg_atom("p")));
    }

    #[test]
    fn dual_is_involution() {
        let ops = [
            ModalOp::Diamond,
            ModalOp::GradedDia(3),
            ModalOp::ProbBox(Rational::new(1, 3)),
            ModalOp::MonDia,
            ModalOp::CoalDia(["a".to_string()].into_iter().collect()),
        ];
        for op in ops {
            assert_ne!(op.dual(), op);
            assert_eq!(op.dual().dual(), op);
            assert_eq!(op.dual().functor(), op.functor());
        }
    }

    #[test]
    fn alpha_rename_separates_binders() {
        // (nu X. <>X) & (nu X. []X) with a clashing atom X_1 inside
        let phi = Formula::and(
            Formula::nu("X", Formula::modal(ModalOp::Diamond, Formula::var("X"))),
            Formula::nu("X", Formula::or(Formula::atom("X_1"), Formula::modal(ModalOp::Box, Formula::var("X")))),
        );
        let renamed = phi.alpha_rename();
        assert!(renamed.binders_distinct());
        assert!(renamed.is_closed());
        assert_eq!(renamed.to_string(), "(nu X. <>X) & (nu X_2. X_1 | []X_2)");
    }

    #[test]
    fn size_counts_every_symbol() {
        let phi = parse_formula("mu X. p | <> X").unwrap();
        assert_eq!(phi.size(), 5);
    }

    #[test]
    fn printer_brackets_binders_and_right_nesting() {
        let phi = Formula::or(Formula::atom("a"), Formula::or(Formula::atom("b"), Formula::atom("c")));
        assert_eq!(phi.to_string(), "a | (b | c)");
        let phi = Formula::and(Formula::mu("X", Formula::var("X")), Formula::atom("q"));
        assert_eq!(phi.to_string(), "(mu X. X) & q");
    }
}
