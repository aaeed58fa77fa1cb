//! Benchmark families: classic parity games and their lifts to other
//! functors, lazy variants, the χ formulas, and two multi-agent games.

mod atl;
mod lift;
mod parity;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use atl::{castle_agent, castle_formulas, castle_initial, gen_castle, gen_modulo, modulo_agent, modulo_formulas};
pub use lift::{chi_formula, lift_game, lift_modalities, state_name, LiftedModel};
pub use parity::{clique, hanoi, jurdzinski, ladder, langincl, make_lazy, BenchGame};

use crate::formula::Formula;
use crate::model::CoalgebraModel;
use parity::check_range;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BenchError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("unknown lift `{0}`")]
    UnknownLift(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Clique,
    Ladder,
    Jurdzinski,
    Hanoi,
    Langincl,
    Modulo,
    Castle,
}

impl Family {
    pub const ALL: [Family; 7] =
        [Family::Clique, Family::Ladder, Family::Jurdzinski, Family::Hanoi, Family::Langincl, Family::Modulo, Family::Castle];

    pub fn name(self) -> &'static str {
        match self {
            Family::Clique => "clique",
            Family::Ladder => "ladder",
            Family::Jurdzinski => "jurdzinski",
            Family::Hanoi => "hanoi",
            Family::Langincl => "langincl",
            Family::Modulo => "modulo",
            Family::Castle => "castle",
        }
    }

    /// Families generated as parity games (as opposed to game-functor models).
    pub fn is_parity(self) -> bool {
        !matches!(self, Family::Modulo | Family::Castle)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Family, BenchError> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| BenchError::UnknownFamily(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lift {
    None,
    Monotone,
    Graded,
    Probabilistic,
}

impl Lift {
    pub const ALL: [Lift; 4] = [Lift::None, Lift::Monotone, Lift::Graded, Lift::Probabilistic];

    pub fn name(self) -> &'static str {
        match self {
            Lift::None => "none",
            Lift::Monotone => "monotone",
            Lift::Graded => "graded",
            Lift::Probabilistic => "probabilistic",
        }
    }
}

impl fmt::Display for Lift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Lift {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Lift, BenchError> {
        Lift::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| BenchError::UnknownLift(s.to_string()))
    }
}

/// One benchmark instance. Parity families take one size parameter;
/// `modulo` takes (agents, moves) and `castle` takes (castles, health).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BenchSpec {
    pub family: Family,
    pub params: Vec<usize>,
    pub lift: Lift,
    pub lazy: bool,
}

impl BenchSpec {
    pub fn parity(family: Family, size: usize, lift: Lift, lazy: bool) -> BenchSpec {
        BenchSpec { family, params: vec![size], lift, lazy }
    }

    /// `<family>-<lift>-<size>`, with a `lazy-` prefix on lazy variants and
    /// multiple parameters joined by `x`.
    pub fn file_stem(&self) -> String {
        let size = self.params.iter().map(usize::to_string).collect::<Vec<_>>().join("x");
        let family = if self.lazy { format!("lazy-{}", self.family) } else { self.family.to_string() };
        format!("{family}-{}-{size}", self.lift)
    }

    fn validate(&self) -> Result<(), BenchError> {
        let want = if self.family.is_parity() { 1 } else { 2 };
        if self.params.len() != want {
            return Err(BenchError::OutOfRange(format!("{} takes {want} parameter(s)", self.family)));
        }
        if !self.family.is_parity() && (self.lift != Lift::None || self.lazy) {
            return Err(BenchError::Unsupported(format!("{} is a game model; it has no lifts or lazy variant", self.family)));
        }
        let p = &self.params;
        match self.family {
            Family::Clique => check_range("clique size", p[0], 1, 4096),
            Family::Ladder => check_range("ladder size", p[0], 1, 1 << 20),
            Family::Jurdzinski => check_range("jurdzinski size", p[0], 1, 512),
            Family::Hanoi => check_range("hanoi disks", p[0], 1, 13),
            Family::Langincl => check_range("langincl size", p[0], 1, 4096),
            Family::Modulo => {
                check_range("modulo agents", p[0], 1, 8)?;
                check_range("modulo moves", p[1], 1, 16)?;
                if p[1].checked_pow(p[0] as u32).is_none_or(|j| j > 1 << 16) {
                    return Err(BenchError::OutOfRange("modulo: too many joint moves".into()));
                }
                Ok(())
            }
            Family::Castle => {
                check_range("castles", p[0], 2, 6)?;
                check_range("castle health", p[1], 1, 16)?;
                if (2 * (p[1] + 1)).checked_pow(p[0] as u32).is_none_or(|s| s > 1 << 20) {
                    return Err(BenchError::OutOfRange("castle: too many states".into()));
                }
                Ok(())
            }
        }
    }
}

/// A generated instance: model, formulas to check and the states to check
/// them at. Parity families also keep the underlying game.
#[derive(Clone, Debug)]
pub struct Benchmark {
    pub spec: BenchSpec,
    pub model: CoalgebraModel,
    pub formulas: Vec<Formula>,
    pub initial: Vec<usize>,
    pub game: Option<BenchGame>,
    pub added_self_loops: usize,
}

pub fn gen_parity(family: Family, size: usize) -> Result<BenchGame, BenchError> {
    BenchSpec::parity(family, size, Lift::None, false).validate()?;
    Ok(match family {
        Family::Clique => clique(size),
        Family::Ladder => ladder(size),
        Family::Jurdzinski => jurdzinski(size, size),
        Family::Hanoi => hanoi(size),
        Family::Langincl => langincl(size),
        Family::Modulo | Family::Castle => {
            return Err(BenchError::Unsupported(format!("{family} is not a parity game family")));
        }
    })
}

pub fn generate(spec: &BenchSpec) -> Result<Benchmark, BenchError> {
    spec.validate()?;
    match spec.family {
        Family::Modulo => {
            let (a, m) = (spec.params[0], spec.params[1]);
            let model = gen_modulo(a, m);
            let mut formulas = Vec::new();
            for size in 0..=a {
                let c: BTreeSet<String> = (0..size).map(modulo_agent).collect();
                let (f1, f2) = modulo_formulas(&c);
                formulas.push(f1);
                formulas.push(f2);
            }
            Ok(Benchmark { spec: spec.clone(), model, formulas, initial: vec![0], game: None, added_self_loops: 0 })
        }
        Family::Castle => {
            let (n, h) = (spec.params[0], spec.params[1]);
            Ok(Benchmark {
                spec: spec.clone(),
                model: gen_castle(n, h),
                formulas: castle_formulas(n),
                initial: vec![castle_initial(n, h)],
                game: None,
                added_self_loops: 0,
            })
        }
        family => {
            let mut bg = gen_parity(family, spec.params[0])?;
            if spec.lazy {
                bg = make_lazy(&bg);
            }
            let lifted = lift_game(&bg.game, spec.lift);
            Ok(Benchmark {
                spec: spec.clone(),
                model: lifted.model,
                formulas: vec![chi_formula(bg.game.max_priority(), spec.lift)],
                initial: vec![bg.entry],
                game: Some(bg),
                added_self_loops: lifted.added_self_loops,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        for l in Lift::ALL {
            assert_eq!(l.name().parse::<Lift>().unwrap(), l);
        }
        assert!("tree".parse::<Family>().is_err());
    }

    #[test]
    fn stems() {
        assert_eq!(BenchSpec::parity(Family::Hanoi, 3, Lift::Graded, true).file_stem(), "lazy-hanoi-graded-3");
        let castle = BenchSpec { family: Family::Castle, params: vec![2, 1], lift: Lift::None, lazy: false };
        assert_eq!(castle.file_stem(), "castle-none-2x1");
    }

    #[test]
    fn parameters_are_validated() {
        assert!(gen_parity(Family::Hanoi, 0).is_err());
        assert!(gen_parity(Family::Castle, 2).is_err());
        let bad = BenchSpec { family: Family::Castle, params: vec![1, 1], lift: Lift::None, lazy: false };
        assert!(generate(&bad).is_err());
        let lifted = BenchSpec { family: Family::Modulo, params: vec![2, 2], lift: Lift::Graded, lazy: false };
        assert!(generate(&lifted).is_err());
    }

    #[test]
    fn lazy_hanoi_world_count() {
        let b = generate(&BenchSpec::parity(Family::Hanoi, 1, Lift::None, true)).unwrap();
        assert_eq!(b.model.len(), 5);
        assert_eq!(b.initial, vec![3]);
    }
}
