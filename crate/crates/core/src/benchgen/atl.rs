use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{Formula, ModalOp};
use crate::model::{CoalgebraModel, GameStructure, Structure};

pub fn modulo_agent(i: usize) -> String {
    format!("ag{}", i + 1)
}

/// Ten states `p0..p9`; every agent picks a number in `1..=m` and the game
/// advances by the sum modulo 10.
pub fn gen_modulo(agents: usize, moves: usize) -> CoalgebraModel {
    let states: Vec<String> = (0..10).map(|i| format!("p{i}")).collect();
    let valuation = (0..10).map(|i| (format!("p{i}"), vec![i])).collect();
    let names: Vec<String> = (1..=moves).map(|h| h.to_string()).collect();
    let per_state = vec![names; agents];
    let mut g = GameStructure { moves: vec![per_state; 10], delta: vec![] };
    for j in 0..10 {
        let row = (0..g.joint_count(j))
            .map(|joint| {
                let sum: usize = g.decode(j, joint).iter().map(|&h| h + 1).sum();
                (j + sum) % 10
            })
            .collect();
        g.delta.push(row);
    }
    let agents = (0..agents).map(modulo_agent).collect();
    CoalgebraModel::new(states, valuation, agents, Structure::Game(g)).expect("modulo game is well formed")
}

/// `(φ1, φ2)`: the coalition can reach every `p_i`, and it can visit `p0`
/// and `p5` infinitely often.
pub fn modulo_formulas(coalition: &BTreeSet<String>) -> (Formula, Formula) {
    let enforce = |f: Formula| Formula::modal(ModalOp::CoalDia(coalition.clone()), f);
    let phi1 = Formula::conj((0..10).map(|i| {
        let x = format!("X{i}");
        Formula::mu(x.clone(), Formula::or(Formula::atom(format!("p{i}")), enforce(Formula::var(x))))
    }));
    let phi2 = Formula::nu(
        "X",
        Formula::mu(
            "Y",
            Formula::conj([
                Formula::var("X"),
                Formula::or(Formula::atom("p0"), enforce(Formula::var("Y"))),
                Formula::or(Formula::atom("p5"), enforce(Formula::var("Y"))),
            ]),
        ),
    );
    (phi1, phi2)
}

pub fn castle_agent(i: usize) -> String {
    format!("k{}", i + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Castle {
    ready: bool,
    hp: usize,
}

fn castle_name(castles: &[Castle]) -> String {
    castles
        .iter()
        .map(|c| format!("{}{}", if c.ready { 't' } else { 'f' }, c.hp))
        .collect::<Vec<_>>()
        .join("_")
}

/// Index of the state where every knight is ready and every castle has full
/// health. The state encoding numbers it first for every `n` and `h`.
pub fn castle_initial(_n: usize, _h: usize) -> usize {
    0
}

/// `n` castles with `h` health points each. A ready knight defends or
/// attacks another castle; after an attack it must rest for a turn. A
/// knight at home (defending or resting) blocks one attack, every other
/// attack costs a health point. Castles at 0 are lost and their knight only
/// plays `dead`.
pub fn gen_castle(n: usize, h: usize) -> CoalgebraModel {
    let per = 2 * (h + 1);
    let count = per.pow(n as u32);
    // digit d of castle i: ready = d < h + 1, hp = h - d % (h + 1)
    let decode = |mut s: usize| -> Vec<Castle> {
        let mut out = vec![Castle { ready: true, hp: 0 }; n];
        for i in (0..n).rev() {
            let d = s % per;
            s /= per;
            out[i] = Castle { ready: d <= h, hp: h - d % (h + 1) };
        }
        out
    };
    let encode = |cs: &[Castle]| -> usize {
        cs.iter().fold(0, |acc, c| acc * per + if c.ready { 0 } else { h + 1 } + (h - c.hp))
    };
    let mut states = Vec::with_capacity(count);
    let mut valuation: BTreeMap<String, Vec<usize>> = (0..n).map(|i| (format!("lost_{}", i + 1), vec![])).collect();
    let mut moves = Vec::with_capacity(count);
    let mut delta = Vec::with_capacity(count);
    for s in 0..count {
        let cs = decode(s);
        debug_assert_eq!(encode(&cs), s);
        states.push(castle_name(&cs));
        for (i, c) in cs.iter().enumerate() {
            if c.hp == 0 {
                valuation.get_mut(&format!("lost_{}", i + 1)).expect("atom exists").push(s);
            }
        }
        let options: Vec<Vec<String>> = cs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.hp == 0 {
                    vec!["dead".to_string()]
                } else if c.ready {
                    std::iter::once("defend".to_string())
                        .chain((0..n).filter(|&j| j != i).map(|j| format!("attack_{}", j + 1)))
                        .collect()
                } else {
                    vec!["rest".to_string()]
                }
            })
            .collect();
        let shape = GameStructure { moves: vec![options.clone()], delta: vec![] };
        let row = (0..shape.joint_count(0))
            .map(|joint| {
                let choice = shape.decode(0, joint);
                let acts: Vec<&str> = choice.iter().enumerate().map(|(i, &k)| options[i][k].as_str()).collect();
                let mut next = cs.clone();
                for (j, castle) in next.iter_mut().enumerate() {
                    let target = format!("attack_{}", j + 1);
                    let attackers = acts.iter().filter(|&&a| a == target).count();
                    let home = matches!(acts[j], "defend" | "rest");
                    let damage = attackers.saturating_sub(usize::from(home));
                    castle.hp = castle.hp.saturating_sub(damage);
                    match acts[j] {
                        "rest" | "defend" => castle.ready = true,
                        "dead" => {}
                        _ => castle.ready = false,
                    }
                }
                encode(&next)
            })
            .collect();
        moves.push(options);
        delta.push(row);
    }
    let agents = (0..n).map(castle_agent).collect();
    CoalgebraModel::new(states, valuation, agents, Structure::Game(GameStructure { moves, delta }))
        .expect("castle game is well formed")
}

/// One safety formula per knight, then one elimination formula for each
/// coalition `{k1..ks}`, `1 <= s <= n`.
pub fn castle_formulas(n: usize) -> Vec<Formula> {
    let mut out = Vec::new();
    for i in 0..n {
        let me: BTreeSet<String> = [castle_agent(i)].into();
        out.push(Formula::nu(
            "X",
            Formula::and(
                Formula::neg_atom(format!("lost_{}", i + 1)),
                Formula::modal(ModalOp::CoalDia(me), Formula::var("X")),
            ),
        ));
    }
    for size in 1..=n {
        let coalition: BTreeSet<String> = (0..size).map(castle_agent).collect();
        let goal = Formula::and(
            Formula::conj((0..size).map(|i| Formula::neg_atom(format!("lost_{}", i + 1)))),
            Formula::conj((size..n).map(|i| Formula::atom(format!("lost_{}", i + 1)))),
        );
        out.push(Formula::mu("X", Formula::or(goal, Formula::modal(ModalOp::CoalDia(coalition), Formula::var("X")))));
    }
    out
}
