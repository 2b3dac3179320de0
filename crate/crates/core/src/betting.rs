//! Inverse betting games.
//!
//! Adam holds a credit. At an Eve vertex he must spread it over the two
//! outgoing edges as bets whose weighted sum equals the credit; Eve picks
//! the successor and the credit becomes the bet on that edge. At an Adam
//! vertex Adam picks the successor and the credit is unchanged. Eve wants
//! to reach a target with at least the initial credit, or to push the
//! credit past a bound.
//!
//! Eve's strategy here follows a potential `p(v,c) = c + W^{a(v)} - W^{|V|}`
//! where `a` is the attractor rank and `W` the smallest edge weight, and
//! picks the successor with the larger potential.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, fmt_rat, int, pow, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Eve,
    Adam,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub to: String,
    #[serde(with = "rational::as_str")]
    pub weight: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    pub kind: Owner,
    pub transitions: Vec<Edge>,
}

/// File form of a betting game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettingGame {
    pub initial: String,
    #[serde(with = "rational::as_str")]
    pub credit: Rat,
    pub states: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BettingConfig {
    pub vertex: String,
    #[serde(with = "rational::as_str")]
    pub credit: Rat,
}

impl fmt::Display for BettingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.vertex, self.credit)
    }
}

impl BettingGame {
    pub fn from_json(text: &str) -> Result<BettingGame> {
        let bg: BettingGame = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        bg.arena()?;
        Ok(bg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<BettingGame> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        BettingGame::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("betting game serializes")
    }

    pub fn arena(&self) -> Result<Arena> {
        Arena::new(self)
    }
}

/// Validated index form of a [`BettingGame`].
#[derive(Clone, Debug)]
pub struct Arena {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    owner: Vec<Owner>,
    edges: Vec<[(usize, Rat); 2]>,
    initial: usize,
    initial_credit: Rat,
    min_weight: Rat,
}

impl Arena {
    fn new(bg: &BettingGame) -> Result<Arena> {
        let mut problems = Vec::new();
        let mut index = HashMap::new();
        for (i, v) in bg.states.iter().enumerate() {
            if index.insert(v.id.clone(), i).is_some() {
                problems.push(format!("duplicate vertex {}", v.id));
            }
        }
        if !index.contains_key(&bg.initial) {
            problems.push(format!("initial vertex {} does not exist", bg.initial));
        }
        let mut edges = Vec::with_capacity(bg.states.len());
        for v in &bg.states {
            if v.transitions.len() != 2 {
                problems.push(format!("{} has {} successors, expected 2", v.id, v.transitions.len()));
                continue;
            }
            let (a, b) = (&v.transitions[0], &v.transitions[1]);
            if a.to == b.to {
                problems.push(format!("{} has both edges to {}", v.id, a.to));
            }
            for e in [a, b] {
                if !index.contains_key(&e.to) {
                    problems.push(format!("{} has an edge to unknown vertex {}", v.id, e.to));
                }
                if !e.weight.is_positive() || e.weight > Rat::one() {
                    problems.push(format!("edge {}→{} has weight {} outside (0,1]", v.id, e.to, e.weight));
                }
            }
            if &a.weight + &b.weight != Rat::one() {
                problems.push(format!("weights out of {} sum to {}", v.id, &a.weight + &b.weight));
            }
            if problems.is_empty() {
                edges.push([(index[&a.to], a.weight.clone()), (index[&b.to], b.weight.clone())]);
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidGame(problems));
        }
        let min_weight = edges.iter().flat_map(|e| e.iter().map(|(_, w)| w)).min().cloned().unwrap_or_else(Rat::one);
        Ok(Arena {
            ids: bg.states.iter().map(|v| v.id.clone()).collect(),
            owner: bg.states.iter().map(|v| v.kind).collect(),
            initial: index[&bg.initial],
            index,
            edges,
            initial_credit: bg.credit.clone(),
            min_weight,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, v: usize) -> &str {
        &self.ids[v]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn owner(&self, v: usize) -> Owner {
        self.owner[v]
    }

    pub fn edges(&self, v: usize) -> &[(usize, Rat); 2] {
        &self.edges[v]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn initial_credit(&self) -> &Rat {
        &self.initial_credit
    }

    /// Smallest edge weight in the game.
    pub fn min_weight(&self) -> &Rat {
        &self.min_weight
    }

    /// `W^{|V|} - W^{|V|+1}`, the least potential gain per step.
    pub fn min_increment(&self) -> Rat {
        let n = self.len();
        pow(&self.min_weight, n) - pow(&self.min_weight, n + 1)
    }

    /// `ceil((B + W^{|V|}) / (W^{|V|} - W^{|V|+1}))`.
    pub fn step_bound(&self, bound: &Rat) -> BigInt {
        let q = (bound + pow(&self.min_weight, self.len())) / self.min_increment();
        q.ceil().to_integer()
    }

    pub fn target_indices(&self, target: &BTreeSet<String>) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.len()];
        for t in target {
            let i = self
                .index_of(t)
                .ok_or_else(|| Error::InvalidGame(vec![format!("target vertex {t} does not exist")]))?;
            mask[i] = true;
        }
        Ok(mask)
    }

    pub fn attractor(&self, target: &[bool]) -> AttractorIndex {
        let n = self.len();
        let mut rank: Vec<Option<usize>> = target.iter().map(|&t| t.then_some(0)).collect();
        let mut choice = vec![None; n];
        let mut layer = 0;
        loop {
            layer += 1;
            let mut added = Vec::new();
            for v in (0..n).filter(|&v| rank[v].is_none()) {
                let inner = |i: usize| rank[self.edges[v][i].0].is_some_and(|r| r < layer);
                match self.owner[v] {
                    Owner::Eve => {
                        if let Some(i) = (0..2).find(|&i| inner(i)) {
                            added.push((v, Some(i)));
                        }
                    }
                    Owner::Adam => {
                        if inner(0) && inner(1) {
                            added.push((v, None));
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            for (v, i) in added {
                rank[v] = Some(layer);
                choice[v] = i;
            }
        }
        AttractorIndex { target: target.to_vec(), rank, choice }
    }

    /// `c + W^{a(v)} - W^{|V|}`.
    pub fn potential(&self, att: &AttractorIndex, v: usize, credit: &Rat) -> Rat {
        let a = att.rank[v].expect("potential is defined on the winning region");
        credit + pow(&self.min_weight, a) - pow(&self.min_weight, self.len())
    }

    fn check_valuation(&self, v: usize, credit: &Rat, bets: &[Rat; 2]) -> std::result::Result<(), String> {
        let [(_, w0), (_, w1)] = &self.edges[v];
        let total = w0 * &bets[0] + w1 * &bets[1];
        if &total == credit {
            Ok(())
        } else {
            Err(format!(
                "at {} bets {} and {} give weighted sum {} instead of credit {}",
                self.ids[v],
                fmt_rat(&bets[0]),
                fmt_rat(&bets[1]),
                fmt_rat(&total),
                fmt_rat(credit)
            ))
        }
    }

    /// Eve's potential-maximizing answer to `bets` at `v`; ties go to the
    /// attractor successor, then to the first edge.
    pub fn eve_choice(&self, att: &AttractorIndex, v: usize, bets: &[Rat; 2]) -> usize {
        let p = |i: usize| self.potential(att, self.edges[v][i].0, &bets[i]);
        let (p0, p1) = (p(0), p(1));
        if p0 != p1 {
            return if p0 > p1 { 0 } else { 1 };
        }
        att.choice[v].unwrap_or(0)
    }
}

/// Attractor over indices: `rank[v]` is the layer at which `v` joins, which
/// equals the longest strategy-compatible path avoiding the target.
#[derive(Clone, Debug)]
pub struct AttractorIndex {
    pub target: Vec<bool>,
    pub rank: Vec<Option<usize>>,
    /// Edge index chosen at Eve vertices of the winning region outside the target.
    pub choice: Vec<Option<usize>>,
}

impl AttractorIndex {
    pub fn is_winning(&self, v: usize) -> bool {
        self.rank[v].is_some()
    }

    pub fn covers_all(&self) -> bool {
        self.rank.iter().all(Option::is_some)
    }

    /// Edge index leading toward the target: the strategy edge at Eve
    /// vertices, otherwise the successor of lower rank.
    pub fn closer_edge(&self, arena: &Arena, v: usize) -> usize {
        if let Some(i) = self.choice[v] {
            return i;
        }
        let r = |i: usize| self.rank[arena.edges[v][i].0].unwrap_or(usize::MAX);
        if r(1) < r(0) {
            1
        } else {
            0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Attractor {
    pub winning: BTreeSet<String>,
    /// Successor chosen at each Eve vertex of `winning` outside the target.
    pub strategy: BTreeMap<String, String>,
    pub rank: BTreeMap<String, usize>,
}

pub fn attractor(bg: &BettingGame, target: &BTreeSet<String>) -> Result<Attractor> {
    let arena = bg.arena()?;
    let att = arena.attractor(&arena.target_indices(target)?);
    let mut out = Attractor { winning: BTreeSet::new(), strategy: BTreeMap::new(), rank: BTreeMap::new() };
    for v in 0..arena.len() {
        if let Some(r) = att.rank[v] {
            out.winning.insert(arena.id(v).to_string());
            out.rank.insert(arena.id(v).to_string(), r);
        }
        if let Some(i) = att.choice[v] {
            out.strategy.insert(arena.id(v).to_string(), arena.id(arena.edges[v][i].0).to_string());
        }
    }
    Ok(out)
}

/// Eve's move from an Eve configuration given Adam's bets, listed in edge order.
pub fn eve_move(bg: &BettingGame, target: &BTreeSet<String>, config: &BettingConfig, bets: &[Rat; 2]) -> Result<BettingConfig> {
    let arena = bg.arena()?;
    let att = arena.attractor(&arena.target_indices(target)?);
    let v = arena
        .index_of(&config.vertex)
        .ok_or_else(|| Error::NotWinningVertex(config.vertex.clone()))?;
    if arena.owner(v) != Owner::Eve {
        return Err(Error::InvalidValuation(format!("{} is not an Eve vertex", config.vertex)));
    }
    if !att.is_winning(v) {
        return Err(Error::NotWinningVertex(config.vertex.clone()));
    }
    arena.check_valuation(v, &config.credit, bets).map_err(Error::InvalidValuation)?;
    let i = arena.eve_choice(&att, v, bets);
    Ok(BettingConfig { vertex: arena.id(arena.edges(v)[i].0).to_string(), credit: bets[i].clone() })
}

/// What an adversary sees when asked to move.
pub struct Position<'a> {
    pub arena: &'a Arena,
    pub attractor: &'a AttractorIndex,
    pub vertex: usize,
    pub credit: &'a Rat,
}

impl Position<'_> {
    pub fn weight(&self, edge: usize) -> &Rat {
        &self.arena.edges(self.vertex)[edge].1
    }

    pub fn successor(&self, edge: usize) -> usize {
        self.arena.edges(self.vertex)[edge].0
    }

    pub fn rank(&self, v: usize) -> usize {
        self.attractor.rank[v].unwrap_or(self.arena.len())
    }

    /// Bets putting `bet` on `edge` and the balance on the other edge.
    pub fn bets_with(&self, edge: usize, bet: Rat) -> [Rat; 2] {
        let other = 1 - edge;
        let rest = (self.credit - self.weight(edge) * &bet) / self.weight(other);
        let mut out = [Rat::zero(), Rat::zero()];
        out[edge] = bet;
        out[other] = rest;
        out
    }
}

/// Adam's side of a simulation.
pub trait Adversary {
    fn name(&self) -> &str;
    /// Bets on the two edges of an Eve vertex, in edge order.
    fn bets(&mut self, pos: &Position<'_>) -> [Rat; 2];
    /// Edge index taken at an Adam vertex.
    fn choose(&mut self, pos: &Position<'_>) -> usize;
}

fn random_offset(rng: &mut ChaCha8Rng, scale: i64) -> Rat {
    Rat::new(BigInt::from(rng.gen_range(-4 * scale..=4 * scale)), BigInt::from(4))
}

/// Bets drawn uniformly from a grid around the credit; uniform successor choice.
pub struct UniformRandom {
    rng: ChaCha8Rng,
}

impl UniformRandom {
    pub fn new(rng: ChaCha8Rng) -> Self {
        UniformRandom { rng }
    }
}

impl Adversary for UniformRandom {
    fn name(&self) -> &str {
        "random"
    }

    fn bets(&mut self, pos: &Position<'_>) -> [Rat; 2] {
        let edge = self.rng.gen_range(0..2);
        let bet = pos.credit + random_offset(&mut self.rng, 2);
        pos.bets_with(edge, bet)
    }

    fn choose(&mut self, _pos: &Position<'_>) -> usize {
        self.rng.gen_range(0..2)
    }
}

/// Bets nothing on the edge toward the target and everything on the other;
/// takes the successor farther from the target.
#[derive(Default)]
pub struct GreedyStarve;

impl Adversary for GreedyStarve {
    fn name(&self) -> &str {
        "starve"
    }

    fn bets(&mut self, pos: &Position<'_>) -> [Rat; 2] {
        pos.bets_with(pos.attractor.closer_edge(pos.arena, pos.vertex), Rat::zero())
    }

    fn choose(&mut self, pos: &Position<'_>) -> usize {
        1 - pos.attractor.closer_edge(pos.arena, pos.vertex)
    }
}

/// Bets slightly less than the credit toward the target, by half the margin
/// that still makes Eve's potential prefer that edge.
#[derive(Default)]
pub struct NearMiss;

impl Adversary for NearMiss {
    fn name(&self) -> &str {
        "near-miss"
    }

    fn bets(&mut self, pos: &Position<'_>) -> [Rat; 2] {
        let near = pos.attractor.closer_edge(pos.arena, pos.vertex);
        let far = 1 - near;
        let w = pos.arena.min_weight();
        let gap = pow(w, pos.rank(pos.successor(near))) - pow(w, pos.rank(pos.successor(far)));
        let cut = if gap.is_positive() { pos.weight(far) * gap / int(2) } else { Rat::zero() };
        pos.bets_with(near, pos.credit - cut)
    }

    fn choose(&mut self, pos: &Position<'_>) -> usize {
        1 - pos.attractor.closer_edge(pos.arena, pos.vertex)
    }
}

/// Puts all credit on the edge toward the target.
#[derive(Default)]
pub struct Flood;

impl Adversary for Flood {
    fn name(&self) -> &str {
        "flood"
    }

    fn bets(&mut self, pos: &Position<'_>) -> [Rat; 2] {
        let near = pos.attractor.closer_edge(pos.arena, pos.vertex);
        pos.bets_with(1 - near, Rat::zero())
    }

    fn choose(&mut self, pos: &Position<'_>) -> usize {
        pos.attractor.closer_edge(pos.arena, pos.vertex)
    }
}

/// Wide random bets, including negative ones; random successor choice.
pub struct Erratic {
    rng: ChaCha8Rng,
}

impl Erratic {
    pub fn new(rng: ChaCha8Rng) -> Self {
        Erratic { rng }
    }
}

impl Adversary for Erratic {
    fn name(&self) -> &str {
        "erratic"
    }

    fn bets(&mut self, pos: &Position<'_>) -> [Rat; 2] {
        let edge = self.rng.gen_range(0..2);
        let scale = 1 + pos.credit.abs().to_integer().to_i64().unwrap_or(0).min(1000);
        let bet = pos.credit + random_offset(&mut self.rng, 4 * scale);
        pos.bets_with(edge, bet)
    }

    fn choose(&mut self, _pos: &Position<'_>) -> usize {
        self.rng.gen_range(0..2)
    }
}

/// Replays fixed moves, cycling when exhausted.
pub struct Scripted {
    bets: Vec<[Rat; 2]>,
    choices: Vec<usize>,
    next_bet: usize,
    next_choice: usize,
}

impl Scripted {
    pub fn new(bets: Vec<[Rat; 2]>, choices: Vec<usize>) -> Self {
        Scripted { bets, choices, next_bet: 0, next_choice: 0 }
    }
}

impl Adversary for Scripted {
    fn name(&self) -> &str {
        "scripted"
    }

    fn bets(&mut self, _pos: &Position<'_>) -> [Rat; 2] {
        let b = self.bets[self.next_bet % self.bets.len()].clone();
        self.next_bet += 1;
        b
    }

    fn choose(&mut self, _pos: &Position<'_>) -> usize {
        let c = self.choices[self.next_choice % self.choices.len()];
        self.next_choice += 1;
        c
    }
}

/// Adversary names accepted by [`adversary_by_name`].
pub const ADVERSARIES: [&str; 5] = ["random", "starve", "near-miss", "flood", "erratic"];

pub fn adversary_by_name(name: &str, rng: ChaCha8Rng) -> Option<Box<dyn Adversary + Send>> {
    Some(match name {
        "random" => Box::new(UniformRandom::new(rng)),
        "starve" => Box::new(GreedyStarve),
        "near-miss" => Box::new(NearMiss),
        "flood" => Box::new(Flood),
        "erratic" => Box::new(Erratic::new(rng)),
        _ => return None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// In the target with at least the initial credit.
    Target,
    /// Credit reached the bound.
    Bound,
    /// `max_steps` ran out first.
    StepLimit,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub vertex: String,
    #[serde(with = "rational::as_str")]
    pub credit: Rat,
    #[serde(with = "rational::as_str")]
    pub potential: Rat,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub adversary: String,
    pub steps: Vec<TraceStep>,
    pub outcome: Outcome,
    #[serde(with = "rational::as_str")]
    pub min_increment: Rat,
    pub step_bound: String,
    /// Steps taken from outside the target whose potential gain fell short of `min_increment`.
    pub short_steps: Vec<usize>,
}

impl Trace {
    /// Number of moves played.
    pub fn moves(&self) -> usize {
        self.steps.len() - 1
    }

    pub fn within_step_bound(&self) -> bool {
        BigInt::from(self.moves()) <= self.step_bound.parse::<BigInt>().expect("integer")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,vertex,credit,potential\n");
        for s in &self.steps {
            out.push_str(&format!("{},{},{},{}\n", s.step, s.vertex, fmt_rat(&s.credit), fmt_rat(&s.potential)));
        }
        out
    }
}

/// Plays Eve's potential strategy against `adam` until the configuration is
/// in `target × [c0,∞)` or has credit at least `bound`, or `max_steps` moves.
pub fn simulate(
    bg: &BettingGame,
    target: &BTreeSet<String>,
    bound: &Rat,
    adam: &mut dyn Adversary,
    max_steps: usize,
) -> Result<Trace> {
    let arena = bg.arena()?;
    let att = arena.attractor(&arena.target_indices(target)?);
    if let Some(v) = (0..arena.len()).find(|&v| !att.is_winning(v)) {
        return Err(Error::HypothesisViolated(format!("Adam can keep the play away from the target from {}", arena.id(v))));
    }
    simulate_arena(&arena, &att, bound, adam, max_steps)
}

pub fn simulate_arena(
    arena: &Arena,
    att: &AttractorIndex,
    bound: &Rat,
    adam: &mut dyn Adversary,
    max_steps: usize,
) -> Result<Trace> {
    let c0 = arena.initial_credit().clone();
    let min_increment = arena.min_increment();
    let mut v = arena.initial();
    let mut credit = c0.clone();
    let mut potential = arena.potential(att, v, &credit);
    let record = |step: usize, v: usize, credit: &Rat, potential: &Rat| TraceStep {
        step,
        vertex: arena.id(v).to_string(),
        credit: credit.clone(),
        potential: potential.clone(),
    };
    let mut steps = vec![record(0, v, &credit, &potential)];
    let mut short_steps = Vec::new();
    let outcome = loop {
        if att.target[v] && credit >= c0 {
            break Outcome::Target;
        }
        if &credit >= bound {
            break Outcome::Bound;
        }
        if steps.len() > max_steps {
            break Outcome::StepLimit;
        }
        let pos = Position { arena, attractor: att, vertex: v, credit: &credit };
        let (next_v, next_credit) = match arena.owner(v) {
            Owner::Eve => {
                let bets = adam.bets(&pos);
                arena.check_valuation(v, &credit, &bets).map_err(Error::AdamCheated)?;
                let i = arena.eve_choice(att, v, &bets);
                let [a, b] = bets;
                (arena.edges(v)[i].0, if i == 0 { a } else { b })
            }
            Owner::Adam => {
                let i = adam.choose(&pos);
                if i > 1 {
                    return Err(Error::AdamCheated(format!("edge index {i} at {}", arena.id(v))));
                }
                (arena.edges(v)[i].0, credit.clone())
            }
        };
        let next_potential = arena.potential(att, next_v, &next_credit);
        if !att.target[v] && &next_potential - &potential < min_increment {
            short_steps.push(steps.len());
        }
        v = next_v;
        credit = next_credit;
        potential = next_potential;
        steps.push(record(steps.len(), v, &credit, &potential));
    };
    Ok(Trace {
        adversary: adam.name().to_string(),
        steps,
        outcome,
        min_increment,
        step_bound: arena.step_bound(bound).to_string(),
        short_steps,
    })
}
