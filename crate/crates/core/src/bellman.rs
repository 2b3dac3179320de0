//! The one-step operator on per-state frontiers, value iteration from
//! `dwc({(0,0)})`, fixpoint verification and tail bounds.
//!
//! The operator adds the state's reward at every state kind:
//!
//! * terminal: `dwc({(0,0)})`
//! * Player 1: `ϱ(s) + dwc(conv(⋃ X_t))`
//! * Player 2: `ϱ(s) + ⋂ X_t`
//! * chance:   `ϱ(s) + Σ Δ(s,t)·X_t`
//!
//! Games with rewards only on Player-2 states get the textbook equations.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frontier::{self, Frontier};
use crate::game::{CheckedGame, Game, StateKind};
use crate::rational::{self, Rat, Vec2};

/// One frontier per state, ordered by state id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CurveMap(BTreeMap<String, Frontier>);

impl CurveMap {
    pub fn new() -> Self {
        CurveMap(BTreeMap::new())
    }

    pub fn get(&self, id: &str) -> Option<&Frontier> {
        self.0.get(id)
    }

    pub fn curve(&self, id: &str) -> Result<&Frontier> {
        self.0.get(id).ok_or_else(|| Error::IncompleteCurveMap(id.to_string()))
    }

    pub fn insert(&mut self, id: impl Into<String>, f: Frontier) -> Option<Frontier> {
        self.0.insert(id.into(), f)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Frontier)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `dwc({(0,0)})` at every state.
    pub fn origin(cg: &CheckedGame) -> CurveMap {
        CurveMap(cg.ids().iter().map(|id| (id.clone(), Frontier::origin())).collect())
    }

    pub fn to_indexed(&self, cg: &CheckedGame) -> Result<Vec<Frontier>> {
        cg.ids().iter().map(|id| self.curve(id).cloned()).collect()
    }

    pub fn from_indexed(cg: &CheckedGame, curves: Vec<Frontier>) -> CurveMap {
        CurveMap(cg.ids().iter().cloned().zip(curves).collect())
    }

    /// Writes `<dir>/<state>.csv` for every state.
    pub fn write_csv_dir(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        for (id, f) in &self.0 {
            std::fs::write(dir.join(format!("{}.csv", file_stem(id))), f.to_csv())?;
        }
        Ok(())
    }

    /// Reads the CSV files of `dir` for the states of `cg`; every file must
    /// hold a canonical vertex list.
    pub fn read_csv_dir(cg: &CheckedGame, dir: &Path) -> Result<CurveMap> {
        let mut out = CurveMap::new();
        for id in cg.ids() {
            let path = dir.join(format!("{}.csv", file_stem(id)));
            let Ok(text) = std::fs::read_to_string(&path) else {
                return Err(Error::IncompleteCurveMap(id.clone()));
            };
            out.insert(id.clone(), Frontier::from_canonical(frontier::parse_csv(&text)?)?);
        }
        Ok(out)
    }
}

impl FromIterator<(String, Frontier)> for CurveMap {
    fn from_iter<I: IntoIterator<Item = (String, Frontier)>>(iter: I) -> Self {
        CurveMap(iter.into_iter().collect())
    }
}

/// File-system safe rendering of a state id.
pub fn file_stem(id: &str) -> String {
    id.chars().map(|c| if c.is_alphanumeric() || "-_~.,".contains(c) { c } else { '_' }).collect()
}

fn step_state(cg: &CheckedGame, x: &[Frontier], s: usize) -> Frontier {
    let succ = cg.successors(s);
    let body = match cg.kind(s) {
        StateKind::Terminal => return Frontier::origin(),
        _ if succ.len() == 1 => x[succ[0].0].clone(),
        StateKind::Player1 => {
            let mut acc = x[succ[0].0].clone();
            for (t, _) in &succ[1..] {
                acc = acc.dwc_conv_union(&x[*t]);
            }
            acc
        }
        StateKind::Player2 => {
            let mut acc = x[succ[0].0].clone();
            for (t, _) in &succ[1..] {
                acc = acc.intersect_min(&x[*t]);
            }
            acc
        }
        StateKind::Chance => {
            let terms: Vec<(Rat, &Frontier)> = succ.iter().map(|(t, p)| (p.clone(), &x[*t])).collect();
            Frontier::weighted_sum(&terms).expect("validated probabilities")
        }
    };
    body.translate(cg.reward(s))
}

/// One application of the operator on an index-aligned curve vector.
pub fn step_indexed(cg: &CheckedGame, x: &[Frontier]) -> Vec<Frontier> {
    (0..cg.len()).into_par_iter().map(|s| step_state(cg, x, s)).collect()
}

pub fn bellman_step(g: &Game, x: &CurveMap) -> Result<CurveMap> {
    let cg = g.checked()?;
    let xs = x.to_indexed(&cg)?;
    Ok(CurveMap::from_indexed(&cg, step_indexed(&cg, &xs)))
}

/// Whether `v` solves the equations exactly.
pub fn check_fixpoint(g: &Game, v: &CurveMap) -> Result<bool> {
    let cg = g.checked()?;
    let xs = v.to_indexed(&cg)?;
    Ok(step_indexed(&cg, &xs) == xs)
}

/// The iterates `X^0, X^1, …` as an endless iterator over index-aligned vectors.
pub struct Iterates<'a> {
    cg: &'a CheckedGame,
    current: Option<Vec<Frontier>>,
}

impl<'a> Iterates<'a> {
    pub fn new(cg: &'a CheckedGame) -> Self {
        Iterates { cg, current: None }
    }
}

impl Iterator for Iterates<'_> {
    type Item = Vec<Frontier>;

    fn next(&mut self) -> Option<Vec<Frontier>> {
        let next = match &self.current {
            None => vec![Frontier::origin(); self.cg.len()],
            Some(x) => step_indexed(self.cg, x),
        };
        self.current = Some(next.clone());
        Some(next)
    }
}

/// `X^n` for `n = 0..=last` as curve maps.
pub fn iterates(g: &Game, last: usize) -> Result<Vec<CurveMap>> {
    let cg = g.checked()?;
    Ok(Iterates::new(&cg).take(last + 1).map(|x| CurveMap::from_indexed(&cg, x)).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct IterationResult {
    pub curves: CurveMap,
    pub iterations: usize,
    /// Coordinatewise distance bound to the true curves; `None` for
    /// non-stopping games that did not reach an exact fixpoint, whose
    /// iterate carries no guarantee.
    #[serde(with = "rational::as_opt_str")]
    pub residual_bound: Option<Rat>,
    pub converged: bool,
    pub fixpoint_reached: bool,
    pub stopping: bool,
    /// Residual bound after each iteration (stopping games only).
    #[serde(skip)]
    pub log: Vec<(usize, Rat)>,
}

/// Crude geometric tail bound: every window of `|S|` steps stops with
/// probability at least `p_min^|S|`, so the reward collected from step `n`
/// on is at most `Σ_{k >= ⌊n/|S|⌋} (1 - p_min^|S|)^k · |S| · R`.
pub fn tail_bound(g: &Game, n: usize) -> Result<Rat> {
    let cg = g.checked()?;
    if !cg.is_stopping() {
        return Err(Error::NotStopping);
    }
    Ok(geometric_tail(&cg, n))
}

fn geometric_tail(cg: &CheckedGame, n: usize) -> Rat {
    let size = cg.len();
    let r = cg.max_abs_reward();
    if r.is_zero() {
        return Rat::zero();
    }
    let q = rational::pow(&cg.min_probability(), size);
    let keep = Rat::one() - &q;
    rational::pow(&keep, n / size) * Rat::from_integer(size.into()) * r / q
}

/// Tail bound driven by the exact worst-case survival probabilities
/// `u_k = max_{s, strategies} Pr(not terminated after k steps)`.
///
/// `u` is submultiplicative and non-increasing, so the reward collected
/// from step `n` on is at most `R · L · u_n / (1 - u_L)` for any window `L`
/// with `u_L < 1`.
#[derive(Clone, Debug)]
pub struct SurvivalTail {
    alive: Vec<Rat>,
    survival: Vec<Rat>,
    window_factor: Rat,
    reward: Rat,
}

impl SurvivalTail {
    /// `None` if the game is not stopping.
    pub fn new(cg: &CheckedGame) -> Option<SurvivalTail> {
        if !cg.is_stopping() {
            return None;
        }
        let alive: Vec<Rat> = (0..cg.len())
            .map(|s| if cg.kind(s) == StateKind::Terminal { Rat::zero() } else { Rat::one() })
            .collect();
        let mut tail = SurvivalTail {
            survival: vec![alive.iter().max().cloned().unwrap_or_else(Rat::zero)],
            alive,
            window_factor: Rat::zero(),
            reward: cg.max_abs_reward(),
        };
        let horizon = 4 * cg.len().max(1);
        let mut best: Option<Rat> = None;
        for l in 1..=horizon {
            tail.advance(cg);
            let u = &tail.survival[l];
            if u < &Rat::one() {
                let factor = Rat::from_integer(l.into()) / (Rat::one() - u);
                if best.as_ref().is_none_or(|b| &factor < b) {
                    best = Some(factor);
                }
            }
        }
        tail.window_factor = best.expect("stopping games terminate within |S| steps with positive probability");
        Some(tail)
    }

    fn advance(&mut self, cg: &CheckedGame) {
        let next: Vec<Rat> = (0..cg.len())
            .map(|s| {
                let succ = cg.successors(s);
                match cg.kind(s) {
                    StateKind::Terminal => Rat::zero(),
                    StateKind::Chance => succ.iter().map(|(t, p)| p * &self.alive[*t]).sum(),
                    _ => succ.iter().map(|(t, _)| self.alive[*t].clone()).max().expect("has successors"),
                }
            })
            .collect();
        self.survival.push(next.iter().max().cloned().unwrap_or_else(Rat::zero));
        self.alive = next;
    }

    /// `u_n`.
    pub fn survival(&mut self, cg: &CheckedGame, n: usize) -> Rat {
        while self.survival.len() <= n {
            self.advance(cg);
        }
        self.survival[n].clone()
    }

    /// Bound on the reward collected from step `n` on.
    pub fn bound(&mut self, cg: &CheckedGame, n: usize) -> Rat {
        if self.reward.is_zero() {
            return Rat::zero();
        }
        &self.reward * &self.window_factor * self.survival(cg, n)
    }
}

/// Value iteration from `X^0 = dwc({(0,0)})`. Stops at an exact fixpoint,
/// at a residual bound `<= epsilon` (stopping games only), or after
/// `max_iters` applications.
pub fn value_iterate(g: &Game, epsilon: &Rat, max_iters: usize) -> Result<IterationResult> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    let cg = g.checked()?;
    let mut survival = SurvivalTail::new(&cg);
    let stopping = survival.is_some();
    let mut x = vec![Frontier::origin(); cg.len()];
    let mut log = Vec::new();
    let mut n = 0;
    loop {
        if n == max_iters {
            let residual_bound = log.last().map(|(_, b): &(usize, Rat)| b.clone());
            return Ok(IterationResult {
                curves: CurveMap::from_indexed(&cg, x),
                iterations: n,
                residual_bound,
                converged: false,
                fixpoint_reached: false,
                stopping,
                log,
            });
        }
        let next = step_indexed(&cg, &x);
        n += 1;
        if next == x {
            log.push((n, Rat::zero()));
            return Ok(IterationResult {
                curves: CurveMap::from_indexed(&cg, next),
                iterations: n,
                residual_bound: Some(Rat::zero()),
                converged: true,
                fixpoint_reached: true,
                stopping,
                log,
            });
        }
        x = next;
        if let Some(tail) = survival.as_mut() {
            let bound = std::cmp::min(tail.bound(&cg, n), geometric_tail(&cg, n));
            let done = bound <= *epsilon;
            log.push((n, bound.clone()));
            if done {
                return Ok(IterationResult {
                    curves: CurveMap::from_indexed(&cg, x),
                    iterations: n,
                    residual_bound: Some(bound),
                    converged: true,
                    fixpoint_reached: false,
                    stopping,
                    log,
                });
            }
        }
    }
}

/// Whether `z` lies in the downward closure of the curve at `state`.
pub fn achievable(curves: &CurveMap, state: &str, z: &Vec2) -> Result<bool> {
    Ok(curves.curve(state)?.contains(z))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Achievability {
    Yes,
    No,
    Unknown,
}

impl fmt::Display for Achievability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Achievability::Yes => "yes",
            Achievability::No => "no",
            Achievability::Unknown => "unknown-within-epsilon",
        })
    }
}

/// Three-valued query against curves known only up to `residual` in every
/// coordinate: `Yes` if `z + (ε,ε)` is inside, `No` if `z - (ε,ε)` is
/// outside, `Unknown` in between.
pub fn achievable_within(curves: &CurveMap, state: &str, z: &Vec2, residual: &Rat) -> Result<Achievability> {
    let f = curves.curve(state)?;
    let shift = Vec2::new(residual.clone(), residual.clone());
    if f.contains(&(z + &shift)) {
        Ok(Achievability::Yes)
    } else if !f.contains(&(z - &shift)) {
        Ok(Achievability::No)
    } else {
        Ok(Achievability::Unknown)
    }
}

/// `a ⊆ b + (r,r)` and `b ⊆ a + (r,r)`: the two families are within `r` of
/// each other in every coordinate, checked exactly on vertices.
pub fn within_residual(a: &Frontier, b: &Frontier, r: &Rat) -> bool {
    let shift = Vec2::new(-r.clone(), -r.clone());
    a.vertices().iter().all(|v| b.contains(&(v + &shift))) && b.vertices().iter().all(|v| a.contains(&(v + &shift)))
}
