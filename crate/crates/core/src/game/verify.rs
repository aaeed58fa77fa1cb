use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::{GameSolution, ParityGame, Player};

/// Checks that each player's strategy wins from every position of its
/// region: the region is closed under the resulting plays, the player never
/// gets stuck, and every cycle the opponent can force has a maximal priority
/// of the player's parity.
pub fn verify_strategies(game: &ParityGame, sol: &GameSolution) -> Result<(), String> {
    for player in [Player::Exists, Player::Forall] {
        verify_player(game, sol, player)?;
    }
    Ok(())
}

fn verify_player(game: &ParityGame, sol: &GameSolution, player: Player) -> Result<(), String> {
    let n = game.len();
    let inside = |v: usize| sol.winner[v] == player;
    let mut edges: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in (0..n).filter(|&v| inside(v)) {
        if game.owner[v] == player {
            if game.moves[v].is_empty() {
                return Err(format!("{player} is stuck at {v} inside its own region"));
            }
            let w = sol.strategy[v].ok_or_else(|| format!("no strategy at {v} for {player}"))?;
            if !game.moves[v].contains(&w) {
                return Err(format!("strategy at {v} picks {w}, which is not a move"));
            }
            if !inside(w) {
                return Err(format!("strategy at {v} leaves the region of {player}"));
            }
            edges[v].push(w);
        } else {
            if let Some(&w) = game.moves[v].iter().find(|&&w| !inside(w)) {
                return Err(format!("the opponent of {player} escapes from {v} to {w}"));
            }
            edges[v].extend(&game.moves[v]);
        }
    }
    // A losing cycle exists iff for some priority q of the opponent's parity
    // the subgraph on priorities <= q has a cycle through a q-position.
    let mut bad: Vec<u32> = (0..n)
        .filter(|&v| inside(v) && Player::of_parity(game.priority[v]) != player)
        .map(|v| game.priority[v])
        .collect();
    bad.sort_unstable();
    bad.dedup();
    for q in bad {
        let keep = |v: usize| inside(v) && game.priority[v] <= q;
        let mut graph = DiGraph::<usize, ()>::new();
        let mut node = vec![None; n];
        for v in (0..n).filter(|&v| keep(v)) {
            node[v] = Some(graph.add_node(v));
        }
        for v in (0..n).filter(|&v| keep(v)) {
            for &w in &edges[v] {
                if let (Some(a), Some(b)) = (node[v], node[w]) {
                    graph.add_edge(a, b, ());
                }
            }
        }
        for scc in tarjan_scc(&graph) {
            let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
            if cyclic {
                if let Some(&v) = scc.iter().map(|ix| &graph[*ix]).find(|&&v| game.priority[v] == q) {
                    return Err(format!("the opponent of {player} can cycle through {v} with priority {q}"));
                }
            }
        }
    }
    Ok(())
}
