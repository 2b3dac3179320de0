//! Exact Pareto curves of determined games by enumerating memoryless
//! deterministic Player-2 strategies, and the determinacy check.

use rayon::prelude::*;
use serde::Serialize;

use crate::bellman::{check_fixpoint, CurveMap};
use crate::error::{Error, Result};
use crate::frontier::Frontier;
use crate::game::{CheckedGame, Game, StateKind};
use crate::mdp::{induce_mdp, MdStrategy, Mdp};

/// Every total Player-2 MD strategy of `g`, in mixed-radix order.
#[derive(Clone, Debug)]
pub struct MdStrategies {
    states: Vec<(String, Vec<String>)>,
    digits: Vec<usize>,
    done: bool,
}

impl MdStrategies {
    fn new(cg: &CheckedGame) -> Self {
        let states = cg
            .states_of(StateKind::Player2)
            .map(|s| {
                let succ = cg.successors(s).iter().map(|(t, _)| cg.id(*t).to_string()).collect();
                (cg.id(s).to_string(), succ)
            })
            .collect::<Vec<_>>();
        MdStrategies { digits: vec![0; states.len()], states, done: false }
    }

    /// Number of strategies: product of Player-2 successor counts.
    pub fn count(&self) -> usize {
        self.states.iter().map(|(_, succ)| succ.len()).product()
    }
}

impl Iterator for MdStrategies {
    type Item = MdStrategy;

    fn next(&mut self) -> Option<MdStrategy> {
        if self.done {
            return None;
        }
        let current = self
            .states
            .iter()
            .zip(&self.digits)
            .map(|((s, succ), &d)| (s.clone(), succ[d].clone()))
            .collect();
        self.done = true;
        for (digit, (_, succ)) in self.digits.iter_mut().zip(&self.states) {
            *digit += 1;
            if *digit < succ.len() {
                self.done = false;
                break;
            }
            *digit = 0;
        }
        Some(current)
    }
}

pub fn enumerate_md_strategies(g: &Game) -> Result<MdStrategies> {
    Ok(MdStrategies::new(&g.checked()?))
}

fn strategy_curves(g: &Game, sigma: &MdStrategy) -> Result<Vec<Frontier>> {
    let mdp = Mdp::new(&induce_mdp(g, sigma)?)?;
    let cg = mdp.game();
    cg.ids().iter().map(|id| Ok(mdp.pareto_curve(id)?.frontier)).collect()
}

/// Pointwise minimum over all Player-2 MD strategies of the induced MDP curves.
pub fn solve_determined(g: &Game) -> Result<CurveMap> {
    let cg = g.checked()?;
    if !cg.is_stopping() {
        return Err(Error::NotStopping);
    }
    let strategies: Vec<MdStrategy> = MdStrategies::new(&cg).collect();
    let curves = strategies
        .par_iter()
        .map(|sigma| strategy_curves(g, sigma))
        .try_reduce_with(|a, b| Ok(a.iter().zip(&b).map(|(x, y)| x.intersect_min(y)).collect()))
        .expect("at least one strategy")?;
    Ok(CurveMap::from_indexed(&cg, curves))
}

#[derive(Clone, Debug, Serialize)]
pub struct Determinacy {
    pub determined: bool,
    pub curves: CurveMap,
}

/// Solves by enumeration, then checks the result against the one-step operator.
pub fn check_determinacy(g: &Game) -> Result<Determinacy> {
    let curves = solve_determined(g)?;
    let determined = check_fixpoint(g, &curves)?;
    Ok(Determinacy { determined, curves })
}
