//! Turn-based stochastic two-player games with two-dimensional rewards.
//!
//! [`Game`] mirrors the JSON file format and may hold invalid content;
//! [`Game::validate`] reports every violation. Solvers work on a
//! [`CheckedGame`], an index-based view that only exists for valid games.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rat, Vec2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StateKind {
    #[serde(rename = "p1")]
    Player1,
    #[serde(rename = "p2")]
    Player2,
    #[serde(rename = "chance")]
    Chance,
    #[serde(rename = "terminal")]
    Terminal,
}

impl StateKind {
    pub fn is_controlled(self) -> bool {
        matches!(self, StateKind::Player1 | StateKind::Player2)
    }
}

impl fmt::Display for StateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            StateKind::Player1 => "p1",
            StateKind::Player2 => "p2",
            StateKind::Chance => "chance",
            StateKind::Terminal => "terminal",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    pub to: String,
    /// Omitted in files for controlled states, where it is implied to be 1.
    #[serde(default, with = "rational::as_opt_str", skip_serializing_if = "Option::is_none")]
    pub prob: Option<Rat>,
}

impl Transition {
    pub fn controlled(to: impl Into<String>) -> Self {
        Transition { to: to.into(), prob: None }
    }

    pub fn chance(to: impl Into<String>, prob: Rat) -> Self {
        Transition { to: to.into(), prob: Some(prob) }
    }

    pub fn probability(&self) -> Rat {
        self.prob.clone().unwrap_or_else(Rat::one)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRecord {
    pub id: String,
    pub kind: StateKind,
    #[serde(default = "Vec2::zero")]
    pub reward: Vec2,
    #[serde(default)]
    pub transitions: Vec<Transition>,
}

impl StateRecord {
    pub fn new(id: impl Into<String>, kind: StateKind, reward: Vec2, transitions: Vec<Transition>) -> Self {
        StateRecord { id: id.into(), kind, reward, transitions }
    }

    pub fn terminal(id: impl Into<String>) -> Self {
        let id = id.into();
        StateRecord {
            transitions: vec![Transition::chance(id.clone(), Rat::one())],
            id,
            kind: StateKind::Terminal,
            reward: Vec2::zero(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Game {
    pub initial: String,
    pub states: Vec<StateRecord>,
}

/// Outcome of [`Game::validate`]: empty means the game is well formed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return writeln!(f, "ok");
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        Ok(())
    }
}

/// Result of [`CheckedGame::check_stopping`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StoppingReport {
    pub stopping: bool,
    /// A nonempty closed set of non-terminal states when not stopping.
    pub witness_closed_set: BTreeSet<String>,
}

impl Game {
    pub fn from_json(text: &str) -> Result<Game> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Game> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Game::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("games always serialize")
    }

    pub fn state(&self, id: &str) -> Option<&StateRecord> {
        self.states.iter().find(|s| s.id == id)
    }

    pub fn validate(&self) -> ValidationReport {
        self.validate_with(Some(2))
    }

    /// Like [`Game::validate`] but with a configurable successor limit;
    /// `None` accepts any positive number of successors.
    pub fn validate_with(&self, max_successors: Option<usize>) -> ValidationReport {
        let too_many = |n: usize| max_successors.is_some_and(|m| n > m);
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for s in &self.states {
            if !seen.insert(s.id.as_str()) {
                out.push(format!("state {}: duplicate id", s.id));
            }
        }
        if !seen.contains(self.initial.as_str()) {
            out.push(format!("initial state {} does not exist", self.initial));
        }
        for s in &self.states {
            let id = &s.id;
            for t in &s.transitions {
                if !seen.contains(t.to.as_str()) {
                    out.push(format!("state {id}: unknown target {}", t.to));
                }
            }
            let targets: HashSet<&str> = s.transitions.iter().map(|t| t.to.as_str()).collect();
            if targets.len() != s.transitions.len() {
                out.push(format!("state {id}: repeated target"));
            }
            match s.kind {
                StateKind::Terminal => {
                    if !s.reward.is_zero() {
                        out.push(format!("state {id}: terminal reward nonzero"));
                    }
                    let self_loop = s.transitions.len() == 1
                        && s.transitions[0].to == *id
                        && s.transitions[0].probability().is_one();
                    if !self_loop {
                        out.push(format!("state {id}: terminal state needs exactly one self-transition with probability 1"));
                    }
                }
                StateKind::Player1 | StateKind::Player2 => {
                    if s.transitions.is_empty() {
                        out.push(format!("state {id}: no successors"));
                    } else if too_many(s.transitions.len()) {
                        out.push(format!("state {id}: more than two successors"));
                    }
                    if s.transitions.iter().any(|t| !t.probability().is_one()) {
                        out.push(format!("state {id}: controlled transition probability must be 1"));
                    }
                }
                StateKind::Chance => {
                    if s.transitions.is_empty() {
                        out.push(format!("state {id}: no successors"));
                    } else if too_many(s.transitions.len()) {
                        out.push(format!("state {id}: more than two successors"));
                    }
                    if s.transitions.iter().any(|t| t.prob.is_none()) {
                        out.push(format!("state {id}: chance transition without probability"));
                    }
                    if s.transitions.iter().any(|t| !t.probability().is_positive()) {
                        out.push(format!("state {id}: probabilities must be positive"));
                    }
                    let sum: Rat = s.transitions.iter().map(Transition::probability).sum();
                    if !s.transitions.is_empty() && !sum.is_one() {
                        out.push(format!("state {id}: probabilities sum ≠ 1 (sum is {sum})"));
                    }
                }
            }
        }
        ValidationReport { violations: out }
    }

    pub fn checked(&self) -> Result<CheckedGame> {
        CheckedGame::new(self)
    }

    pub fn check_stopping(&self) -> Result<StoppingReport> {
        Ok(self.checked()?.check_stopping())
    }
}

/// Index-based view of a valid game. Successor lists keep file order.
#[derive(Clone, Debug)]
pub struct CheckedGame {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    kinds: Vec<StateKind>,
    rewards: Vec<Vec2>,
    succ: Vec<Vec<(usize, Rat)>>,
    initial: usize,
}

impl CheckedGame {
    pub fn new(g: &Game) -> Result<CheckedGame> {
        let report = g.validate();
        if !report.is_ok() {
            return Err(Error::InvalidGame(report.violations));
        }
        let index: HashMap<String, usize> = g.states.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();
        let succ = g
            .states
            .iter()
            .map(|s| s.transitions.iter().map(|t| (index[&t.to], t.probability())).collect())
            .collect();
        Ok(CheckedGame {
            ids: g.states.iter().map(|s| s.id.clone()).collect(),
            kinds: g.states.iter().map(|s| s.kind).collect(),
            rewards: g.states.iter().map(|s| s.reward.clone()).collect(),
            initial: index[&g.initial],
            index,
            succ,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, s: usize) -> &str {
        &self.ids[s]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn kind(&self, s: usize) -> StateKind {
        self.kinds[s]
    }

    pub fn reward(&self, s: usize) -> &Vec2 {
        &self.rewards[s]
    }

    pub fn successors(&self, s: usize) -> &[(usize, Rat)] {
        &self.succ[s]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn states_of(&self, kind: StateKind) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&s| self.kinds[s] == kind)
    }

    /// Least positive transition probability, 1 if there are no chance states.
    pub fn min_probability(&self) -> Rat {
        self.states_of(StateKind::Chance)
            .flat_map(|s| self.succ[s].iter().map(|(_, p)| p.clone()))
            .min()
            .unwrap_or_else(Rat::one)
    }

    /// Largest absolute reward coordinate over all states.
    pub fn max_abs_reward(&self) -> Rat {
        self.rewards.iter().map(Vec2::max_abs).max().unwrap_or_else(Rat::zero)
    }

    /// Non-terminal states surviving iterated removal of states that cannot
    /// avoid the terminal states even when both players cooperate.
    pub fn largest_closed_set(&self) -> Vec<bool> {
        let mut alive: Vec<bool> = self.kinds.iter().map(|k| *k != StateKind::Terminal).collect();
        loop {
            let mut changed = false;
            for s in 0..self.len() {
                if !alive[s] {
                    continue;
                }
                let keep = if self.kinds[s] == StateKind::Chance {
                    self.succ[s].iter().all(|(t, _)| alive[*t])
                } else {
                    self.succ[s].iter().any(|(t, _)| alive[*t])
                };
                if !keep {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return alive;
            }
        }
    }

    pub fn check_stopping(&self) -> StoppingReport {
        let alive = self.largest_closed_set();
        let witness: BTreeSet<String> = (0..self.len()).filter(|&s| alive[s]).map(|s| self.ids[s].clone()).collect();
        StoppingReport { stopping: witness.is_empty(), witness_closed_set: witness }
    }

    pub fn is_stopping(&self) -> bool {
        self.largest_closed_set().iter().all(|a| !a)
    }

    /// Whether `set` is closed: non-terminal, every controlled member keeps a
    /// successor inside, every chance member keeps all successors inside.
    pub fn is_closed_set(&self, set: &BTreeSet<String>) -> bool {
        let inside: HashSet<usize> = match set.iter().map(|id| self.index_of(id)).collect::<Option<_>>() {
            Some(s) => s,
            None => return false,
        };
        inside.iter().all(|&s| match self.kinds[s] {
            StateKind::Terminal => false,
            StateKind::Chance => self.succ[s].iter().all(|(t, _)| inside.contains(t)),
            _ => self.succ[s].iter().any(|(t, _)| inside.contains(t)),
        })
    }
}

fn fresh_id(taken: &mut HashSet<String>, base: &str, tag: &str) -> String {
    let mut n = 0usize;
    loop {
        let candidate = if n == 0 { format!("{base}~{tag}") } else { format!("{base}~{tag}{n}") };
        if taken.insert(candidate.clone()) {
            return candidate;
        }
        n += 1;
    }
}

/// Rewrites `g` so that every state has at most two successors and every
/// nonzero reward sits on a Player-2 state. Original ids keep their Pareto
/// curves: a rewarded non-Player-2 state keeps its id on a fresh Player-2
/// entry state carrying the reward, and its body moves to a fresh id.
///
/// Unlike the other operations this accepts states with more than two
/// successors, since splitting them is half of its job.
pub fn normalize(g: &Game) -> Result<Game> {
    let report = g.validate_with(None);
    if !report.is_ok() {
        return Err(Error::InvalidGame(report.violations));
    }
    let mut taken: HashSet<String> = g.states.iter().map(|s| s.id.clone()).collect();
    let mut out: Vec<StateRecord> = Vec::with_capacity(g.states.len());

    for s in &g.states {
        let mut rec = s.clone();
        let needs_entry = !s.reward.is_zero() && !matches!(s.kind, StateKind::Player2 | StateKind::Terminal);
        if needs_entry {
            let body = fresh_id(&mut taken, &s.id, "body");
            out.push(StateRecord::new(
                s.id.clone(),
                StateKind::Player2,
                s.reward.clone(),
                vec![Transition::controlled(body.clone())],
            ));
            rec.id = body;
            rec.reward = Vec2::zero();
        }
        split_wide(rec, &mut taken, &mut out);
    }
    Ok(Game { initial: g.initial.clone(), states: out })
}

/// Binary-splits a state with more than two successors into a chain of
/// fresh same-kind states; chance probabilities become conditional.
fn split_wide(mut rec: StateRecord, taken: &mut HashSet<String>, out: &mut Vec<StateRecord>) {
    while rec.transitions.len() > 2 {
        let head = rec.transitions.remove(0);
        let rest = std::mem::take(&mut rec.transitions);
        let aux = fresh_id(taken, &rec.id, "split");
        let (head, rest_edge, rest) = if rec.kind == StateKind::Chance {
            let p = head.probability();
            let remaining = Rat::one() - &p;
            let rest: Vec<Transition> = rest
                .into_iter()
                .map(|t| Transition::chance(t.to.clone(), t.probability() / &remaining))
                .collect();
            (head, Transition::chance(aux.clone(), remaining), rest)
        } else {
            (head, Transition::controlled(aux.clone()), rest)
        };
        rec.transitions = vec![head, rest_edge];
        let next = StateRecord::new(aux, rec.kind, Vec2::zero(), rest);
        out.push(rec);
        rec = next;
    }
    out.push(rec);
}

/// Encodes discounted reward with factor `delta` as total reward: every
/// edge into a non-terminal state passes through a fresh chance state that
/// stops with probability `1 - delta`.
pub fn discount_transform(g: &Game, delta: &Rat) -> Result<Game> {
    if !delta.is_positive() || delta >= &Rat::one() {
        return Err(Error::DeltaOutOfRange(delta.to_string()));
    }
    let cg = g.checked()?;
    let mut taken: HashSet<String> = g.states.iter().map(|s| s.id.clone()).collect();
    let needs_gate = |id: &str| cg.kind(cg.index_of(id).expect("validated")) != StateKind::Terminal;
    let gated: BTreeSet<&str> = g
        .states
        .iter()
        .flat_map(|s| s.transitions.iter())
        .map(|t| t.to.as_str())
        .filter(|to| needs_gate(to))
        .collect();
    if gated.is_empty() {
        return Ok(g.clone());
    }

    let sink = fresh_id(&mut taken, "stop", "discount");
    let gate_of: HashMap<&str, String> = gated.iter().map(|&t| (t, fresh_id(&mut taken, t, "gate"))).collect();
    let mut states: Vec<StateRecord> = g
        .states
        .iter()
        .map(|s| {
            let mut rec = s.clone();
            if s.kind != StateKind::Terminal {
                for t in &mut rec.transitions {
                    if let Some(gate) = gate_of.get(t.to.as_str()) {
                        t.to = gate.clone();
                    }
                }
            }
            rec
        })
        .collect();
    for (&target, gate) in &gate_of {
        states.push(StateRecord::new(
            gate.clone(),
            StateKind::Chance,
            Vec2::zero(),
            vec![Transition::chance(target, delta.clone()), Transition::chance(sink.clone(), Rat::one() - delta)],
        ));
    }
    states.push(StateRecord::terminal(sink));
    Ok(Game { initial: g.initial.clone(), states })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p1(id: &str, reward: Vec2, to: &[&str]) -> StateRecord {
        StateRecord::new(id, StateKind::Player1, reward, to.iter().map(|t| Transition::controlled(*t)).collect())
    }

    fn chance(id: &str, reward: Vec2, to: &[(&str, Rat)]) -> StateRecord {
        StateRecord::new(id, StateKind::Chance, reward, to.iter().map(|(t, p)| Transition::chance(*t, p.clone())).collect())
    }

    #[test]
    fn detects_bad_probability_sum() {
        let g = Game {
            initial: "c".into(),
            states: vec![
                chance("c", Vec2::zero(), &[("t", rat(1, 2)), ("u", rat(1, 3))]),
                StateRecord::terminal("t"),
                StateRecord::terminal("u"),
            ],
        };
        let r = g.validate();
        assert_eq!(r.violations.len(), 1);
        assert!(r.violations[0].contains("probabilities sum ≠ 1"), "{r}");
    }

    #[test]
    fn detects_terminal_reward() {
        let mut t = StateRecord::terminal("t");
        t.reward = Vec2::ints(1, 0);
        let g = Game { initial: "t".into(), states: vec![t] };
        let r = g.validate();
        assert!(r.violations.iter().any(|v| v.contains("terminal reward nonzero")));
    }

    #[test]
    fn detects_structural_violations() {
        let g = Game {
            initial: "nope".into(),
            states: vec![p1("a", Vec2::zero(), &["b", "c", "a"]), p1("a", Vec2::zero(), &[]), StateRecord::terminal("c")],
        };
        let text = g.validate().to_string();
        for needle in ["duplicate id", "initial state nope", "unknown target b", "more than two successors", "no successors"] {
            assert!(text.contains(needle), "missing {needle:?} in {text}");
        }
        assert!(matches!(g.checked(), Err(Error::InvalidGame(_))));
    }

    #[test]
    fn stopping_cases() {
        let cyc = Game {
            initial: "a".into(),
            states: vec![p1("a", Vec2::zero(), &["b", "t"]), p1("b", Vec2::zero(), &["a"]), StateRecord::terminal("t")],
        };
        let r = cyc.check_stopping().unwrap();
        assert!(!r.stopping);
        assert_eq!(r.witness_closed_set, ["a".to_string(), "b".to_string()].into_iter().collect());
        assert!(cyc.checked().unwrap().is_closed_set(&r.witness_closed_set));

        let only = Game { initial: "t".into(), states: vec![StateRecord::terminal("t")] };
        assert!(only.check_stopping().unwrap().stopping);
    }

    #[test]
    fn chance_escape_makes_cycle_stopping() {
        let g = Game {
            initial: "a".into(),
            states: vec![
                p1("a", Vec2::zero(), &["c"]),
                chance("c", Vec2::zero(), &[("a", rat(99, 100)), ("t", rat(1, 100))]),
                StateRecord::terminal("t"),
            ],
        };
        assert!(g.check_stopping().unwrap().stopping);
    }

    #[test]
    fn normalize_is_identity_on_normal_games() {
        let g = Game {
            initial: "a".into(),
            states: vec![
                p1("a", Vec2::zero(), &["b", "t"]),
                StateRecord::new("b", StateKind::Player2, Vec2::ints(1, 0), vec![Transition::controlled("t")]),
                StateRecord::terminal("t"),
            ],
        };
        assert_eq!(normalize(&g).unwrap(), g);
    }

    #[test]
    fn normalize_splits_three_successors() {
        let g = Game {
            initial: "s".into(),
            states: vec![
                p1("s", Vec2::zero(), &["a", "b", "c"]),
                StateRecord::terminal("a"),
                StateRecord::terminal("b"),
                StateRecord::terminal("c"),
            ],
        };
        assert!(!g.validate().is_ok());
        let n = normalize(&g).unwrap();
        assert!(n.validate().is_ok());
        let s = n.state("s").unwrap();
        let aux = &s.transitions[1].to;
        let s_targets: Vec<&str> = s.transitions.iter().map(|t| t.to.as_str()).collect();
        assert_eq!(s_targets, ["a", aux.as_str()]);
        let aux_rec = n.state(aux).unwrap();
        let aux_targets: Vec<&str> = aux_rec.transitions.iter().map(|t| t.to.as_str()).collect();
        assert_eq!(aux_targets, ["b", "c"]);
        assert_eq!(aux_rec.kind, StateKind::Player1);
        assert_eq!(aux_rec.reward, Vec2::zero());
    }

    #[test]
    fn chance_split_uses_conditional_probabilities() {
        let rec = StateRecord::new(
            "s",
            StateKind::Chance,
            Vec2::zero(),
            vec![
                Transition::chance("a", rat(1, 2)),
                Transition::chance("b", rat(1, 3)),
                Transition::chance("c", rat(1, 6)),
            ],
        );
        let mut out = Vec::new();
        let mut taken = HashSet::new();
        split_wide(rec, &mut taken, &mut out);
        assert_eq!(out[0].transitions[1].probability(), rat(1, 2));
        assert_eq!(out[1].transitions[0].probability(), rat(2, 3));
        assert_eq!(out[1].transitions[1].probability(), rat(1, 3));
    }

    #[test]
    fn normalize_moves_rewards_to_player2_entries() {
        let g = Game {
            initial: "s".into(),
            states: vec![
                chance("s", Vec2::ints(1, 0), &[("s", rat(1, 2)), ("t", rat(1, 2))]),
                StateRecord::terminal("t"),
            ],
        };
        let n = normalize(&g).unwrap();
        assert!(n.validate().is_ok());
        let entry = n.state("s").unwrap();
        assert_eq!(entry.kind, StateKind::Player2);
        assert_eq!(entry.reward, Vec2::ints(1, 0));
        for s in &n.states {
            if !s.reward.is_zero() {
                assert_eq!(s.kind, StateKind::Player2);
            }
        }
    }

    #[test]
    fn discount_only_terminal_is_unchanged() {
        let g = Game { initial: "t".into(), states: vec![StateRecord::terminal("t")] };
        assert_eq!(discount_transform(&g, &rat(1, 2)).unwrap(), g);
    }

    #[test]
    fn discount_rejects_bad_delta() {
        let g = Game { initial: "t".into(), states: vec![StateRecord::terminal("t")] };
        for d in [int(0), int(1), rat(3, 2), rat(-1, 2)] {
            assert!(matches!(discount_transform(&g, &d), Err(Error::DeltaOutOfRange(_))));
        }
    }

    #[test]
    fn discount_makes_self_loop_stopping() {
        let g = Game {
            initial: "s".into(),
            states: vec![p1("s", Vec2::ints(1, 0), &["s"])],
        };
        assert!(!g.check_stopping().unwrap().stopping);
        let d = discount_transform(&g, &rat(1, 2)).unwrap();
        assert!(d.validate().is_ok());
        assert!(d.check_stopping().unwrap().stopping);
    }

    #[test]
    fn json_round_trip_with_implied_probabilities() {
        let text = r#"{"initial":"a","states":[
            {"id":"a","kind":"p1","reward":["-1/2","0"],"transitions":[{"to":"c"}]},
            {"id":"c","kind":"chance","reward":["0","0"],"transitions":[{"to":"a","prob":"1/2"},{"to":"t","prob":"1/2"}]},
            {"id":"t","kind":"terminal","reward":["0","0"],"transitions":[{"to":"t","prob":"1"}]}]}"#;
        let g = Game::from_json(text).unwrap();
        assert!(g.validate().is_ok());
        assert_eq!(g.states[0].reward, Vec2::new(rat(-1, 2), int(0)));
        assert_eq!(Game::from_json(&g.to_json()).unwrap(), g);
    }
}
