use std::collections::{HashMap, VecDeque};

use super::BenchError;
use crate::game::{ParityGame, Player};

/// A generated parity game with its designated starting position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchGame {
    pub game: ParityGame,
    pub entry: usize,
}

fn player(bit: usize) -> Player {
    if bit % 2 == 0 {
        Player::Exists
    } else {
        Player::Forall
    }
}

pub fn clique(n: usize) -> BenchGame {
    let mut g = ParityGame::new();
    for i in 0..n {
        g.add(player(i), i as u32, None);
    }
    for i in 0..n {
        g.moves[i] = (0..n).filter(|&j| j != i).collect();
    }
    BenchGame { game: g, entry: 0 }
}

pub fn ladder(n: usize) -> BenchGame {
    let len = 2 * n;
    let mut g = ParityGame::new();
    for i in 0..len {
        g.add(player(i), (i % 2) as u32, None);
    }
    for i in 0..len {
        g.moves[i] = vec![(i + 1) % len, (i + 2) % len];
    }
    BenchGame { game: g, entry: 0 }
}

/// Lattice of `d` rows of ∃-positions alternating between an even and an
/// odd priority of that row, joined by `w + 1` ∀-hubs that may enter any row.
pub fn jurdzinski(d: usize, w: usize) -> BenchGame {
    let cols = 2 * w + 1;
    let mut g = ParityGame::new();
    let e = |i: usize, j: usize| i * cols + j;
    for i in 0..d {
        for j in 0..cols {
            let prio = if j % 2 == 0 { 2 * i + 2 } else { 2 * i + 1 };
            g.add(Player::Exists, prio as u32, None);
        }
    }
    let hub = |k: usize| d * cols + k;
    for _ in 0..=w {
        g.add(Player::Forall, 0, None);
    }
    for i in 0..d {
        for j in 0..cols {
            let mut moves = Vec::new();
            if j + 1 < cols {
                moves.push(e(i, j + 1));
            }
            if j % 2 == 0 {
                moves.push(hub(j / 2));
            }
            g.moves[e(i, j)] = moves;
        }
    }
    for k in 0..=w {
        let col = if k < w { 2 * k + 1 } else { 2 * w };
        g.moves[hub(k)] = (0..d).map(|i| e(i, col)).collect();
    }
    BenchGame { game: g, entry: 0 }
}

/// Configurations of `n` disks on three pegs, numbered `Σ peg(k)·3^k` with
/// disk 0 the smallest.
pub fn hanoi(n: usize) -> BenchGame {
    let count = 3usize.pow(n as u32);
    let target = count - 1;
    let mut g = ParityGame::new();
    for c in 0..count {
        g.add(Player::Exists, if c == target { 0 } else { 1 }, None);
    }
    let mut pegs = vec![0usize; n];
    for c in 0..count {
        if c == target {
            g.moves[c] = vec![c];
            continue;
        }
        let mut rest = c;
        for p in pegs.iter_mut() {
            *p = rest % 3;
            rest /= 3;
        }
        // smallest disk on each peg
        let mut top = [usize::MAX; 3];
        for (k, &p) in pegs.iter().enumerate().rev() {
            top[p] = k;
        }
        let mut moves = Vec::new();
        for from in 0..3 {
            let disk = top[from];
            if disk == usize::MAX {
                continue;
            }
            for to in 0..3 {
                if to != from && top[to] > disk {
                    let next = c - from * 3usize.pow(disk as u32) + to * 3usize.pow(disk as u32);
                    moves.push(next);
                }
            }
        }
        moves.sort_unstable();
        g.moves[c] = moves;
    }
    BenchGame { game: g, entry: 0 }
}

/// Fair simulation game between two automata with `n` states over {a, b}.
/// ∀ moves in the first automaton, ∃ answers with the same letter in the
/// second; ∃ wins a play if the second automaton accepts infinitely often
/// or the first one does not.
pub fn langincl(n: usize) -> BenchGame {
    let delta_a = |p: usize, letter: usize| -> Vec<usize> {
        if letter == 0 {
            vec![(p + 1) % n]
        } else {
            let mut v = vec![0, p];
            v.sort_unstable();
            v.dedup();
            v
        }
    };
    let delta_b = |q: usize, letter: usize| -> Vec<usize> {
        if letter == 0 {
            let mut v = vec![(q + 1) % n];
            if q % 2 == 0 {
                v.push(0);
            }
            v.sort_unstable();
            v.dedup();
            v
        } else {
            vec![q]
        }
    };
    let accept_a = |p: usize| p == 0;
    let accept_b = |q: usize| q == n - 1;

    #[derive(Clone, Copy, PartialEq, Eq, Hash)]
    enum Pos {
        Forall(usize, usize),
        Exists(usize, usize, usize),
    }
    let mut g = ParityGame::new();
    let mut index: HashMap<Pos, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |g: &mut ParityGame, queue: &mut VecDeque<Pos>, pos: Pos| -> usize {
        *index.entry(pos).or_insert_with(|| {
            queue.push_back(pos);
            match pos {
                Pos::Forall(p, q) => {
                    let prio = if accept_b(q) {
                        2
                    } else if accept_a(p) {
                        1
                    } else {
                        0
                    };
                    g.add(Player::Forall, prio, None)
                }
                Pos::Exists(..) => g.add(Player::Exists, 0, None),
            }
        })
    };
    let entry = intern(&mut g, &mut queue, Pos::Forall(0, 0));
    while let Some(pos) = queue.pop_front() {
        let v = intern(&mut g, &mut queue, pos);
        let moves = match pos {
            Pos::Forall(p, q) => {
                let mut m = Vec::new();
                for letter in 0..2 {
                    for p2 in delta_a(p, letter) {
                        m.push(intern(&mut g, &mut queue, Pos::Exists(p2, q, letter)));
                    }
                }
                m
            }
            Pos::Exists(p2, q, letter) => {
                delta_b(q, letter).into_iter().map(|q2| intern(&mut g, &mut queue, Pos::Forall(p2, q2))).collect()
            }
        };
        g.moves[v] = moves;
    }
    BenchGame { game: g, entry }
}

/// Prepends an ∃-position that may enter the game or move to a priority-0
/// self-loop, so the new entry is always won by ∃.
pub fn make_lazy(bg: &BenchGame) -> BenchGame {
    let mut g = bg.game.clone();
    let root = g.add(Player::Exists, 0, None);
    let sink = g.add(Player::Exists, 0, None);
    g.moves[root] = vec![bg.entry, sink];
    g.moves[sink] = vec![sink];
    BenchGame { game: g, entry: root }
}

pub(super) fn check_range(name: &str, value: usize, lo: usize, hi: usize) -> Result<(), BenchError> {
    if value < lo || value > hi {
        return Err(BenchError::OutOfRange(format!("{name} must lie in {lo}..={hi}, got {value}")));
    }
    Ok(())
}
