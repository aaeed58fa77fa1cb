use std::collections::VecDeque;

use fixedbitset::FixedBitSet;

use super::{ParityGame, Player};
use crate::error::{CheckError, Deadline};

/// Winner of every position with positional winning strategies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameSolution {
    pub winner: Vec<Player>,
    /// The chosen successor at positions owned by their winner.
    pub strategy: Vec<Option<usize>>,
}

impl GameSolution {
    pub fn region(&self, player: Player) -> Vec<usize> {
        (0..self.winner.len()).filter(|&v| self.winner[v] == player).collect()
    }
}

/// Solves a parity game with Zielonka's algorithm.
pub fn solve_zielonka(game: &ParityGame) -> GameSolution {
    solve_with_deadline(game, Deadline::none()).expect("no deadline set")
}

pub(crate) fn solve_with_deadline(game: &ParityGame, deadline: Deadline) -> Result<GameSolution, CheckError> {
    let n = game.len();
    // Deadlocks become self-loops with a priority losing for their owner.
    let mut priority = game.priority.clone();
    let mut succ_off = Vec::with_capacity(n + 1);
    let mut succ = Vec::with_capacity(game.moves.iter().map(Vec::len).sum::<usize>() + n);
    succ_off.push(0);
    for v in 0..n {
        if game.moves[v].is_empty() {
            succ.push(v as u32);
            priority[v] = match game.owner[v] {
                Player::Exists => 1,
                Player::Forall => 0,
            };
        } else {
            succ.extend(game.moves[v].iter().map(|&w| w as u32));
        }
        succ_off.push(succ.len());
    }
    // predecessor lists by counting sort; duplicate moves give one entry
    let mut pred_off = vec![0usize; n + 1];
    for v in 0..n {
        for (i, &w) in succ[succ_off[v]..succ_off[v + 1]].iter().enumerate() {
            if i == 0 || succ[succ_off[v] + i - 1] != w {
                pred_off[w as usize + 1] += 1;
            }
        }
    }
    for v in 0..n {
        pred_off[v + 1] += pred_off[v];
    }
    let mut fill = pred_off.clone();
    let mut pred = vec![0u32; pred_off[n]];
    for v in 0..n {
        for (i, &w) in succ[succ_off[v]..succ_off[v + 1]].iter().enumerate() {
            if i == 0 || succ[succ_off[v] + i - 1] != w {
                pred[fill[w as usize]] = v as u32;
                fill[w as usize] += 1;
            }
        }
    }
    let mut z = Zielonka {
        owner: &game.owner,
        priority,
        succ_off,
        succ,
        pred_off,
        pred,
        winner: vec![Player::Exists; n],
        strategy: vec![None; n],
        deadline,
        count: vec![0; n],
    };
    let mut all = FixedBitSet::with_capacity(n);
    all.insert_range(..);
    z.solve(all)?;
    let mut strategy = z.strategy;
    for v in 0..n {
        if game.owner[v] != z.winner[v] || game.moves[v].is_empty() {
            strategy[v] = None;
        }
    }
    Ok(GameSolution { winner: z.winner, strategy })
}

struct Zielonka<'a> {
    owner: &'a [Player],
    priority: Vec<u32>,
    succ_off: Vec<usize>,
    succ: Vec<u32>,
    pred_off: Vec<usize>,
    pred: Vec<u32>,
    winner: Vec<Player>,
    strategy: Vec<Option<usize>>,
    deadline: Deadline,
    count: Vec<usize>,
}

impl Zielonka<'_> {
    fn moves(&self, x: usize) -> &[u32] {
        &self.succ[self.succ_off[x]..self.succ_off[x + 1]]
    }

    /// Solves the subgame on `v`, which every position can stay inside.
    fn solve(&mut self, mut v: FixedBitSet) -> Result<(), CheckError> {
        loop {
            self.deadline.check()?;
            let Some(d) = v.ones().map(|x| self.priority[x]).max() else {
                return Ok(());
            };
            let p = Player::of_parity(d);
            let top: Vec<usize> = v.ones().filter(|&x| self.priority[x] == d).collect();
            let a = self.attractor(&v, &top, p);
            let mut rest = v.clone();
            rest.difference_with(&a);
            self.solve(rest.clone())?;
            let lost: Vec<usize> = rest.ones().filter(|&x| self.winner[x] != p).collect();
            if lost.is_empty() {
                for x in a.ones() {
                    self.winner[x] = p;
                    if self.priority[x] == d && self.owner[x] == p {
                        self.strategy[x] = self.moves(x).iter().map(|&y| y as usize).find(|&y| v.contains(y));
                    }
                }
                return Ok(());
            }
            let b = self.attractor(&v, &lost, p.opponent());
            for x in b.ones() {
                self.winner[x] = p.opponent();
            }
            v.difference_with(&b);
        }
    }

    /// Attractor of `target` for `player` within `v`, breadth-first from the
    /// target in index order. Attracted positions of `player` record the move
    /// through which they were first reached.
    fn attractor(&mut self, v: &FixedBitSet, target: &[usize], player: Player) -> FixedBitSet {
        let mut attr = FixedBitSet::with_capacity(v.len());
        for x in v.ones() {
            if self.owner[x] != player {
                self.count[x] = self.moves(x).iter().filter(|&&y| v.contains(y as usize)).count();
            }
        }
        let mut queue: VecDeque<usize> = VecDeque::new();
        for &t in target {
            attr.insert(t);
            queue.push_back(t);
        }
        while let Some(y) = queue.pop_front() {
            for i in self.pred_off[y]..self.pred_off[y + 1] {
                let x = self.pred[i] as usize;
                if !v.contains(x) || attr.contains(x) {
                    continue;
                }
                if self.owner[x] == player {
                    self.strategy[x] = Some(y);
                } else {
                    // counts are per successor occurrence
                    let dup = self.moves(x).iter().filter(|&&z| z as usize == y).count();
                    self.count[x] -= dup;
                    if self.count[x] > 0 {
                        continue;
                    }
                }
                attr.insert(x);
                queue.push_back(x);
            }
        }
        attr
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(priority: u32) -> ParityGame {
        let mut g = ParityGame::new();
        let v = g.add(Player::Exists, priority, None);
        g.moves[v].push(v);
        g
    }

    #[test]
    fn self_loops() {
        assert_eq!(solve_zielonka(&single(0)).winner, vec![Player::Exists]);
        assert_eq!(solve_zielonka(&single(1)).winner, vec![Player::Forall]);
        assert_eq!(solve_zielonka(&single(0)).strategy, vec![Some(0)]);
    }

    #[test]
    fn deadlocks_lose_for_their_owner() {
        let mut g = ParityGame::new();
        let e = g.add(Player::Exists, 0, None);
        let a = g.add(Player::Forall, 1, None);
        let sol = solve_zielonka(&g);
        assert_eq!(sol.winner[e], Player::Forall);
        assert_eq!(sol.winner[a], Player::Exists);
        assert_eq!(sol.strategy, vec![None, None]);
    }

    #[test]
    fn choice_between_loops() {
        // 0 (∃) -> 1 (prio 1 loop) or 2 (prio 2 loop)
        let mut g = ParityGame::new();
        let r = g.add(Player::Exists, 0, None);
        let bad = g.add(Player::Exists, 1, None);
        let good = g.add(Player::Exists, 2, None);
        g.moves[r] = vec![bad, good];
        g.moves[bad] = vec![bad];
        g.moves[good] = vec![good];
        let sol = solve_zielonka(&g);
        assert_eq!(sol.winner, vec![Player::Exists, Player::Forall, Player::Exists]);
        assert_eq!(sol.strategy[r], Some(good));
        // the same choice belongs to ∀ now
        g.owner[r] = Player::Forall;
        let sol = solve_zielonka(&g);
        assert_eq!(sol.winner[r], Player::Forall);
        assert_eq!(sol.strategy[r], Some(bad));
    }
}
