//! Reference implementations the engines are tested against. They share
//! only data types with the library and are written for clarity, not speed.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use mucheck::formula::{Formula, ModalOp};
use mucheck::game::{ParityGame, Player};
use mucheck::model::{CoalgebraModel, DistributionRow, GameStructure, Structure};
use mucheck::rational::Rational;
use rand::seq::SliceRandom;
use rand::Rng;

pub type States = BTreeSet<usize>;

/// Agent choices of a joint move, first agent most significant.
pub fn digits(radices: &[usize], mut joint: usize) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    for i in (0..radices.len()).rev() {
        out[i] = joint % radices[i];
        joint /= radices[i];
    }
    out
}

/// Direct reading of each modality's one-step semantics.
pub fn oracle_lift(model: &CoalgebraModel, op: &ModalOp, c: usize, d: &States) -> bool {
    match (model.structure(), op) {
        (Structure::Powerset(rows), ModalOp::Diamond) => rows[c].iter().any(|x| d.contains(x)),
        (Structure::Powerset(rows), ModalOp::Box) => rows[c].iter().all(|x| d.contains(x)),
        (Structure::Multiset(rows), ModalOp::GradedDia(n)) => {
            rows[c].iter().filter(|(x, _)| d.contains(x)).map(|&(_, m)| u128::from(m)).sum::<u128>() > u128::from(*n)
        }
        (Structure::Multiset(rows), ModalOp::GradedBox(n)) => {
            rows[c].iter().filter(|(x, _)| !d.contains(x)).map(|&(_, m)| u128::from(m)).sum::<u128>() <= u128::from(*n)
        }
        (Structure::Distribution(rows), ModalOp::ProbDia(p)) => {
            let mass: Rational = rows[c].entries.iter().filter(|(x, _)| d.contains(x)).map(|(_, q)| q.clone()).sum();
            mass > *p
        }
        (Structure::Distribution(rows), ModalOp::ProbBox(p)) => {
            let mass: Rational = rows[c].entries.iter().filter(|(x, _)| d.contains(x)).map(|(_, q)| q.clone()).sum();
            mass >= &Rational::one() - p
        }
        (Structure::Monotone(rows), ModalOp::MonDia) => rows[c].iter().any(|s| s.iter().all(|x| d.contains(x))),
        (Structure::Monotone(rows), ModalOp::MonBox) => rows[c].iter().all(|s| s.iter().any(|x| d.contains(x))),
        (Structure::Game(g), ModalOp::CoalDia(coal) | ModalOp::CoalBox(coal)) => {
            let agents = model.agents();
            let radices: Vec<usize> = g.moves[c].iter().map(Vec::len).collect();
            let mut by_choice: BTreeMap<Vec<usize>, Vec<bool>> = BTreeMap::new();
            for (joint, target) in g.delta[c].iter().enumerate() {
                let ds = digits(&radices, joint);
                let key: Vec<usize> = (0..agents.len()).filter(|&a| coal.contains(&agents[a])).map(|a| ds[a]).collect();
                by_choice.entry(key).or_default().push(d.contains(target));
            }
            if matches!(op, ModalOp::CoalDia(_)) {
                by_choice.values().any(|outs| outs.iter().all(|&b| b))
            } else {
                by_choice.values().all(|outs| outs.iter().any(|&b| b))
            }
        }
        _ => panic!("modality {op} does not fit the model"),
    }
}

/// Set semantics with explicit fixpoint iteration per binder.
pub fn denote(model: &CoalgebraModel, f: &Formula) -> States {
    denote_env(model, f, &mut HashMap::new())
}

fn denote_env(model: &CoalgebraModel, f: &Formula, env: &mut HashMap<String, States>) -> States {
    let all: States = (0..model.len()).collect();
    match f {
        Formula::Top => all,
        Formula::Bot => States::new(),
        Formula::Atom(p) => all.into_iter().filter(|&c| model.holds(p, c)).collect(),
        Formula::NegAtom(p) => all.into_iter().filter(|&c| !model.holds(p, c)).collect(),
        Formula::And(l, r) => {
            let a = denote_env(model, l, env);
            let b = denote_env(model, r, env);
            a.intersection(&b).copied().collect()
        }
        Formula::Or(l, r) => {
            let a = denote_env(model, l, env);
            let b = denote_env(model, r, env);
            a.union(&b).copied().collect()
        }
        Formula::Modal(op, a) => {
            let d = denote_env(model, a, env);
            all.into_iter().filter(|&c| oracle_lift(model, op, c, &d)).collect()
        }
        Formula::Var(x) => env.get(x).cloned().unwrap_or_else(|| panic!("free variable {x}")),
        Formula::Mu(x, body) | Formula::Nu(x, body) => {
            let mut cur = if matches!(f, Formula::Mu(..)) { States::new() } else { all };
            loop {
                let saved = env.insert(x.clone(), cur.clone());
                let next = denote_env(model, body, env);
                match saved {
                    Some(s) => env.insert(x.clone(), s),
                    None => env.remove(x),
                };
                if next == cur {
                    return cur;
                }
                cur = next;
            }
        }
    }
}

/// Winner of every position by enumerating all positional ∃-strategies.
/// A strategy wins at `v` if in the graph it induces no ∃-deadlock and no
/// cycle with an odd maximal priority is reachable from `v`.
pub fn brute_force_winners(g: &ParityGame) -> Vec<Player> {
    let n = g.len();
    let exists: Vec<usize> = (0..n).filter(|&v| g.owner[v] == Player::Exists && !g.moves[v].is_empty()).collect();
    let radices: Vec<usize> = exists.iter().map(|&v| g.moves[v].len()).collect();
    let count: usize = radices.iter().product();
    let mut won = vec![false; n];
    for s in 0..count {
        let choice = digits(&radices, s);
        let mut succ: Vec<Vec<usize>> = g.moves.clone();
        for (k, &v) in exists.iter().enumerate() {
            succ[v] = vec![g.moves[v][choice[k]]];
        }
        // positions that are bad on their own
        let bad: Vec<bool> = (0..n)
            .map(|u| {
                if g.moves[u].is_empty() {
                    return g.owner[u] == Player::Exists;
                }
                let q = g.priority[u];
                q % 2 == 1 && reaches(&succ, &succ[u], u, |w| g.priority[w] <= q)
            })
            .collect();
        for v in 0..n {
            if !won[v] && !reachable(&succ, v).iter().any(|&u| bad[u]) {
                won[v] = true;
            }
        }
    }
    won.into_iter().map(|w| if w { Player::Exists } else { Player::Forall }).collect()
}

fn reachable(succ: &[Vec<usize>], from: usize) -> Vec<usize> {
    let mut seen = vec![false; succ.len()];
    let mut stack = vec![from];
    seen[from] = true;
    let mut out = Vec::new();
    while let Some(v) = stack.pop() {
        out.push(v);
        for &w in &succ[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    out
}

/// Whether `target` is reachable from `start` through positions satisfying `keep`.
fn reaches(succ: &[Vec<usize>], start: &[usize], target: usize, keep: impl Fn(usize) -> bool) -> bool {
    let mut seen = vec![false; succ.len()];
    let mut stack: Vec<usize> = start.iter().copied().filter(|&w| keep(w)).collect();
    while let Some(v) = stack.pop() {
        if v == target {
            return true;
        }
        if std::mem::replace(&mut seen[v], true) {
            continue;
        }
        stack.extend(succ[v].iter().copied().filter(|&w| keep(w) && !seen[w]));
    }
    false
}

/// Random game without deadlocks: up to `max_n` positions, priorities in
/// `0..=max_prio`, one to three distinct moves per position.
pub fn random_game(rng: &mut impl Rng, max_n: usize, max_prio: u32) -> ParityGame {
    let n = rng.gen_range(1..=max_n);
    let mut g = ParityGame::new();
    for _ in 0..n {
        let owner = if rng.gen_bool(0.5) { Player::Exists } else { Player::Forall };
        g.add(owner, rng.gen_range(0..=max_prio), None);
    }
    let all: Vec<usize> = (0..n).collect();
    for v in 0..n {
        let k = rng.gen_range(1..=n.min(3));
        let mut m: Vec<usize> = all.choose_multiple(rng, k).copied().collect();
        m.sort_unstable();
        g.moves[v] = m;
    }
    g
}

/// Random powerset model over `n` states with atoms `p` and `q`.
pub fn random_kripke(rng: &mut impl Rng, n: usize) -> CoalgebraModel {
    let rows = (0..n).map(|_| (0..n).filter(|_| rng.gen_bool(0.4)).collect()).collect();
    let mut val = BTreeMap::new();
    for atom in ["p", "q"] {
        val.insert(atom.to_string(), (0..n).filter(|_| rng.gen_bool(0.5)).collect());
    }
    CoalgebraModel::new((0..n).map(|i| format!("s{i}")).collect(), val, vec![], Structure::Powerset(rows)).unwrap()
}

/// Random closed formula over `p`, `q`, ◇ and □ with at most `budget` nodes.
pub fn random_formula(rng: &mut impl Rng, budget: usize) -> Formula {
    fn go(rng: &mut impl Rng, budget: usize, vars: &mut Vec<String>, fresh: &mut usize) -> Formula {
        fn leaf(rng: &mut impl Rng, vars: &[String]) -> Formula {
            match rng.gen_range(0..7) {
                0 => Formula::Top,
                1 => Formula::Bot,
                2 => Formula::atom("p"),
                3 => Formula::neg_atom("p"),
                4 => Formula::atom("q"),
                5 => Formula::neg_atom("q"),
                _ => match vars.choose(rng) {
                    Some(x) => Formula::var(x.clone()),
                    None => Formula::atom("q"),
                },
            }
        }
        if budget <= 1 {
            return leaf(rng, vars);
        }
        // a binary node needs room for two operands
        let lowest = if budget >= 3 { 0 } else { 2 };
        match rng.gen_range(lowest..6) {
            0 | 1 => {
                let left = rng.gen_range(1..budget - 1);
                let l = go(rng, left, vars, fresh);
                let r = go(rng, budget - 1 - left, vars, fresh);
                if rng.gen_bool(0.5) {
                    Formula::and(l, r)
                } else {
                    Formula::or(l, r)
                }
            }
            2 => Formula::modal(ModalOp::Diamond, go(rng, budget - 1, vars, fresh)),
            3 => Formula::modal(ModalOp::Box, go(rng, budget - 1, vars, fresh)),
            4 | 5 => {
                *fresh += 1;
                let x = format!("X{}", *fresh);
                vars.push(x.clone());
                let body = go(rng, budget - 1, vars, fresh);
                vars.pop();
                if rng.gen_bool(0.5) {
                    Formula::mu(x, body)
                } else {
                    Formula::nu(x, body)
                }
            }
            _ => unreachable!(),
        }
    }
    let mut fresh = 0;
    go(rng, budget, &mut Vec::new(), &mut fresh)
}

/// Plays `plays` random games of length `len` from every position of each
/// region, the winner following its strategy and the opponent moving at
/// random. Fails if a play leaves the region or the winner gets stuck.
pub fn random_playouts(
    g: &ParityGame,
    winner: &[Player],
    strategy: &[Option<usize>],
    rng: &mut impl Rng,
    plays: usize,
    len: usize,
) -> Result<(), String> {
    for _ in 0..plays {
        let start = rng.gen_range(0..g.len());
        let p = winner[start];
        let mut v = start;
        for _ in 0..len {
            let next = if g.owner[v] == p {
                match strategy[v] {
                    Some(w) => w,
                    None => return Err(format!("{p} has no strategy at {v}")),
                }
            } else {
                match g.moves[v].choose(rng) {
                    Some(&w) => w,
                    None => break, // opponent stuck: the winner wins
                }
            };
            if !g.moves[v].contains(&next) {
                return Err(format!("illegal move {v} -> {next}"));
            }
            if winner[next] != p {
                return Err(format!("play from {start} left the region of {p} at {next}"));
            }
            v = next;
        }
    }
    Ok(())
}

/// Deterministic seeds for reproducible sweeps.
pub fn seed_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Exhaustive check of a claimed solution: in the graph where each winner
/// follows its strategy and the opponent keeps all moves, no play from the
/// winner's region leaves it, ends in a loss, or reaches a cycle whose
/// largest priority favours the opponent.
pub fn strategies_win(g: &ParityGame, winner: &[Player], strategy: &[Option<usize>]) -> Result<(), String> {
    for p in [Player::Exists, Player::Forall] {
        let succ: Vec<Vec<usize>> = (0..g.len())
            .map(|v| match (g.owner[v] == p, strategy[v]) {
                (true, Some(w)) if winner[v] == p => vec![w],
                _ => g.moves[v].clone(),
            })
            .collect();
        for v in (0..g.len()).filter(|&v| winner[v] == p) {
            for u in reachable(&succ, v) {
                if winner[u] != p {
                    return Err(format!("{p} leaves its region: {v} reaches {u}"));
                }
                if g.moves[u].is_empty() && g.owner[u] == p {
                    return Err(format!("{p} gets stuck at {u}"));
                }
                if g.owner[u] == p && succ[u].len() != 1 {
                    return Err(format!("{p} has no strategy at {u}"));
                }
                let q = g.priority[u];
                if Player::of_parity(q) != p && reaches(&succ, &succ[u], u, |w| g.priority[w] <= q) {
                    return Err(format!("{p} loses the cycle through {u} with priority {q}"));
                }
            }
        }
    }
    Ok(())
}

/// Random model of functor `functor` (0 powerset, 1 multiset, 2 distribution,
/// 3 monotone, 4 game) with up to five states and no atoms.
pub fn random_model(rng: &mut impl Rng, functor: usize) -> CoalgebraModel {
    let n = rng.gen_range(1..=5);
    let names = (0..n).map(|i| format!("s{i}")).collect();
    let pick = |rng: &mut dyn rand::RngCore| -> Vec<usize> { (0..n).filter(|_| rng.gen_bool(0.5)).collect() };
    let (agents, structure) = match functor {
        0 => (vec![], Structure::Powerset((0..n).map(|_| pick(rng)).collect())),
        1 => (vec![], Structure::Multiset((0..n).map(|_| pick(rng).into_iter().map(|d| (d, rng.gen_range(1..=6))).collect()).collect())),
        2 => (
            vec![],
            Structure::Distribution(
                (0..n)
                    .map(|_| {
                        let mut support = pick(rng);
                        if support.is_empty() {
                            support.push(rng.gen_range(0..n));
                        }
                        let weights: Vec<i64> = support.iter().map(|_| rng.gen_range(1..=4)).collect();
                        let sum: i64 = weights.iter().sum();
                        DistributionRow::new(support.into_iter().zip(weights).map(|(d, w)| (d, Rational::new(w, sum))).collect())
                    })
                    .collect(),
            ),
        ),
        3 => (vec![], Structure::Monotone((0..n).map(|_| (0..rng.gen_range(0..=3)).map(|_| pick(rng)).collect()).collect())),
        _ => {
            let agents: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("a{i}")).collect();
            let moves: Vec<Vec<Vec<String>>> = (0..n)
                .map(|_| agents.iter().map(|_| (0..rng.gen_range(1..=3)).map(|k| k.to_string()).collect()).collect())
                .collect();
            let delta = moves
                .iter()
                .map(|per: &Vec<Vec<String>>| {
                    let joint: usize = per.iter().map(Vec::len).product();
                    (0..joint).map(|_| rng.gen_range(0..n)).collect()
                })
                .collect();
            (agents, Structure::Game(GameStructure { moves, delta }))
        }
    };
    CoalgebraModel::new(names, BTreeMap::new(), agents, structure).expect("random model is valid")
}

/// A random modality fitting `model`, diamond or box with equal odds.
pub fn random_op(rng: &mut impl Rng, model: &CoalgebraModel) -> ModalOp {
    let dia = rng.gen_bool(0.5);
    let op = match model.structure() {
        Structure::Powerset(_) => ModalOp::Diamond,
        Structure::Multiset(_) => ModalOp::GradedDia(rng.gen_range(0..=12)),
        Structure::Distribution(_) => {
            let den = rng.gen_range(1..=8);
            ModalOp::ProbDia(Rational::new(rng.gen_range(0..=den), den))
        }
        Structure::Monotone(_) => ModalOp::MonDia,
        Structure::Game(_) => ModalOp::CoalDia(model.agents().iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()),
    };
    if dia {
        op
    } else {
        op.dual()
    }
}
