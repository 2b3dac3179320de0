//! Seeded random instances for property checks and benchmarks.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::betting::{BettingGame, Edge, Owner, Vertex};
use crate::game::{Game, StateKind, StateRecord, Transition};
use crate::rational::{int, rat, Rat, Vec2};

const SPLITS: [(i64, i64); 5] = [(1, 4), (1, 3), (1, 2), (2, 3), (3, 4)];

#[derive(Clone, Copy, Debug)]
pub struct GameShape {
    /// Upper bound on the number of states, terminal included.
    pub max_states: usize,
    /// Rewards are integers in `[-max_reward, max_reward]`.
    pub max_reward: i64,
    pub player2: bool,
}

impl Default for GameShape {
    fn default() -> Self {
        GameShape { max_states: 6, max_reward: 3, player2: true }
    }
}

fn split(rng: &mut ChaCha8Rng) -> Rat {
    let (n, d) = *SPLITS.choose(rng).expect("nonempty");
    rat(n, d)
}

fn draw_game(rng: &mut ChaCha8Rng, shape: GameShape) -> Game {
    let n = rng.gen_range(2..=shape.max_states.max(2));
    let ids: Vec<String> = (0..n - 1).map(|i| format!("s{i}")).chain(["t".to_string()]).collect();
    let kinds = if shape.player2 {
        vec![StateKind::Player1, StateKind::Player2, StateKind::Chance]
    } else {
        vec![StateKind::Player1, StateKind::Chance]
    };
    let mut states = Vec::with_capacity(n);
    for id in &ids[..n - 1] {
        let kind = *kinds.choose(rng).expect("nonempty");
        let two = rng.gen_bool(0.7);
        let targets: Vec<&String> = ids.choose_multiple(rng, if two { 2 } else { 1 }).collect();
        let transitions = match (kind, targets.as_slice()) {
            (StateKind::Chance, [a, b]) => {
                let p = split(rng);
                vec![Transition::chance(a.as_str(), p.clone()), Transition::chance(b.as_str(), int(1) - p)]
            }
            (StateKind::Chance, [a]) => vec![Transition::chance(a.as_str(), int(1))],
            (_, ts) => ts.iter().map(|t| Transition::controlled(t.as_str())).collect(),
        };
        let r = shape.max_reward;
        let reward = Vec2::ints(rng.gen_range(-r..=r), rng.gen_range(-r..=r));
        states.push(StateRecord::new(id.clone(), kind, reward, transitions));
    }
    states.push(StateRecord::terminal("t"));
    Game { initial: ids[0].clone(), states }
}

/// A valid stopping game; rejection-sampled.
pub fn stopping_game(rng: &mut ChaCha8Rng, shape: GameShape) -> Game {
    loop {
        let g = draw_game(rng, shape);
        if g.validate().is_ok() && g.checked().is_ok_and(|cg| cg.is_stopping()) {
            return g;
        }
    }
}

/// A stopping MDP: no Player-2 states.
pub fn stopping_mdp(rng: &mut ChaCha8Rng, max_states: usize) -> Game {
    stopping_game(rng, GameShape { max_states, max_reward: 3, player2: false })
}

/// A betting game with at most `max_vertices` vertices, initial credit 1,
/// and a target set from which Eve wins everywhere.
pub fn betting_game(rng: &mut ChaCha8Rng, max_vertices: usize) -> (BettingGame, BTreeSet<String>) {
    loop {
        let n = rng.gen_range(2..=max_vertices.max(2));
        let ids: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let states = ids
            .iter()
            .map(|id| {
                let kind = if rng.gen_bool(0.5) { Owner::Eve } else { Owner::Adam };
                let pair: Vec<&String> = ids.choose_multiple(rng, 2).collect();
                let w = split(rng);
                Vertex {
                    id: id.clone(),
                    kind,
                    transitions: vec![
                        Edge { to: pair[0].clone(), weight: w.clone() },
                        Edge { to: pair[1].clone(), weight: int(1) - w },
                    ],
                }
            })
            .collect();
        let k = rng.gen_range(1..=2.min(n - 1));
        let target: BTreeSet<String> = ids.choose_multiple(rng, k).cloned().collect();
        let bg = BettingGame { initial: ids[0].clone(), credit: int(1), states };
        let arena = bg.arena().expect("generated games are well formed");
        let att = arena.attractor(&arena.target_indices(&target).expect("known ids"));
        if att.covers_all() {
            return (bg, target);
        }
    }
}
