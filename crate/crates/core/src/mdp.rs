//! Exact Pareto curves of stopping MDPs.
//!
//! Fixing a memoryless deterministic Player-2 strategy turns a game into an
//! MDP. For a stopping MDP the achievable set at a state is the downward
//! closure of the convex hull of the values of its memoryless deterministic
//! policies, so each vertex is exposed by some nonnegative weight vector and
//! found by exact policy iteration on the scalarized problem.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frontier::Frontier;
use crate::game::{CheckedGame, Game, StateKind, Transition};
use crate::rational::{Rat, Vec2};

macro_rules! choice_map {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
        pub struct $name(BTreeMap<String, String>);

        impl $name {
            pub fn new() -> Self {
                $name(BTreeMap::new())
            }

            pub fn get(&self, state: &str) -> Option<&str> {
                self.0.get(state).map(String::as_str)
            }

            pub fn insert(&mut self, state: impl Into<String>, successor: impl Into<String>) {
                self.0.insert(state.into(), successor.into());
            }

            pub fn iter(&self) -> impl Iterator<Item = (&String, &String)> {
                self.0.iter()
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }
        }

        impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for $name {
            fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
                $name(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{{")?;
                for (i, (k, v)) in self.0.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k}→{v}")?;
                }
                write!(f, "}}")
            }
        }
    };
}

choice_map!(
    /// Memoryless deterministic Player-2 strategy: one successor per Player-2 state.
    MdStrategy
);
choice_map!(
    /// Memoryless deterministic Player-1 policy: one successor per Player-1 state.
    MdPolicy
);

/// Replaces every Player-2 state by a chance state moving to `sigma(s)`.
pub fn induce_mdp(g: &Game, sigma: &MdStrategy) -> Result<Game> {
    let cg = g.checked()?;
    let p2: HashSet<&str> = cg.states_of(StateKind::Player2).map(|s| cg.id(s)).collect();
    if let Some((k, _)) = sigma.iter().find(|(k, _)| !p2.contains(k.as_str())) {
        return Err(Error::InvalidStrategy(format!("{k} is not a Player-2 state")));
    }
    let mut out = g.clone();
    for rec in &mut out.states {
        if rec.kind != StateKind::Player2 {
            continue;
        }
        let choice = sigma
            .get(&rec.id)
            .ok_or_else(|| Error::InvalidStrategy(format!("no choice for Player-2 state {}", rec.id)))?;
        if !rec.transitions.iter().any(|t| t.to == choice) {
            return Err(Error::InvalidStrategy(format!("{choice} is not a successor of {}", rec.id)));
        }
        rec.kind = StateKind::Chance;
        rec.transitions = vec![Transition::chance(choice, Rat::one())];
    }
    Ok(out)
}

/// Index form of an MDP: Player-1 states choose, everything else is a fixed
/// distribution. A Player-2 state with a single successor counts as fixed.
#[derive(Clone, Debug)]
pub struct Mdp {
    cg: CheckedGame,
}

/// Action index per state; only meaningful at Player-1 states.
type Choice = Vec<usize>;

impl Mdp {
    pub fn new(g: &Game) -> Result<Mdp> {
        let cg = g.checked()?;
        if let Some(s) = cg.states_of(StateKind::Player2).find(|&s| cg.successors(s).len() > 1) {
            return Err(Error::InvalidStrategy(format!("state {} still has a Player-2 choice", cg.id(s))));
        }
        Ok(Mdp { cg })
    }

    pub fn game(&self) -> &CheckedGame {
        &self.cg
    }

    fn is_choice(&self, s: usize) -> bool {
        self.cg.kind(s) == StateKind::Player1
    }

    fn policy_of(&self, choice: &Choice) -> MdPolicy {
        (0..self.cg.len())
            .filter(|&s| self.is_choice(s))
            .map(|s| (self.cg.id(s).to_string(), self.cg.id(self.cg.successors(s)[choice[s]].0).to_string()))
            .collect()
    }

    fn choice_of(&self, pol: &MdPolicy) -> Result<Choice> {
        let cg = &self.cg;
        for (k, _) in pol.iter() {
            match cg.index_of(k) {
                Some(s) if self.is_choice(s) => {}
                _ => return Err(Error::InvalidStrategy(format!("{k} is not a Player-1 state"))),
            }
        }
        (0..cg.len())
            .map(|s| {
                if !self.is_choice(s) {
                    return Ok(0);
                }
                let target = pol
                    .get(cg.id(s))
                    .ok_or_else(|| Error::InvalidStrategy(format!("no choice for Player-1 state {}", cg.id(s))))?;
                cg.successors(s)
                    .iter()
                    .position(|(t, _)| cg.id(*t) == target)
                    .ok_or_else(|| Error::InvalidStrategy(format!("{target} is not a successor of {}", cg.id(s))))
            })
            .collect()
    }

    /// Expected total reward of every state under `choice`, or `None` when
    /// the induced chain does not stop almost surely.
    fn evaluate(&self, choice: &Choice) -> Option<Vec<Vec2>> {
        let cg = &self.cg;
        let n = cg.len();
        // v(s) - Σ_t P(s,t) v(t) = ϱ(s) on non-terminal states, v = 0 on terminals.
        let live: Vec<usize> = (0..n).filter(|&s| cg.kind(s) != StateKind::Terminal).collect();
        let mut pos = vec![usize::MAX; n];
        for (i, &s) in live.iter().enumerate() {
            pos[s] = i;
        }
        let m = live.len();
        let mut a = vec![vec![Rat::zero(); m]; m];
        let mut b: Vec<Vec2> = Vec::with_capacity(m);
        for (i, &s) in live.iter().enumerate() {
            a[i][i] += Rat::one();
            let succ = cg.successors(s);
            let moves: Vec<(usize, Rat)> = if self.is_choice(s) {
                vec![(succ[choice[s]].0, Rat::one())]
            } else {
                succ.to_vec()
            };
            for (t, p) in moves {
                if pos[t] != usize::MAX {
                    a[i][pos[t]] -= p;
                }
            }
            b.push(cg.reward(s).clone());
        }
        let sol = solve_linear(a, b)?;
        let mut out = vec![Vec2::zero(); n];
        for (i, &s) in live.iter().enumerate() {
            out[s] = sol[i].clone();
        }
        Some(out)
    }

    /// Policy iteration maximizing `w·v` over the actions in `allowed`,
    /// starting from `start`. Returns the final choice, its values and every
    /// choice visited.
    fn improve(&self, w: &Vec2, allowed: &[Vec<usize>], start: Choice) -> Result<(Choice, Vec<Vec2>, Vec<Choice>)> {
        let cg = &self.cg;
        let mut choice = start;
        let mut visited = Vec::new();
        loop {
            let values = self.evaluate(&choice).ok_or(Error::NotStopping)?;
            visited.push(choice.clone());
            let mut changed = false;
            for s in (0..cg.len()).filter(|&s| self.is_choice(s)) {
                let succ = cg.successors(s);
                let score = |a: usize| values[succ[a].0].dot(w);
                let mut best = choice[s];
                let mut best_score = score(best);
                for &a in &allowed[s] {
                    let sc = score(a);
                    if sc > best_score {
                        best = a;
                        best_score = sc;
                    }
                }
                if best != choice[s] {
                    choice[s] = best;
                    changed = true;
                }
            }
            if !changed {
                return Ok((choice, values, visited));
            }
        }
    }

    fn all_actions(&self) -> Vec<Vec<usize>> {
        (0..self.cg.len())
            .map(|s| if self.is_choice(s) { (0..self.cg.successors(s).len()).collect() } else { vec![0] })
            .collect()
    }

    fn optimize(&self, w: &Vec2, lexicographic: bool) -> Result<(Choice, Vec<Vec2>, Vec<Choice>)> {
        let (choice, values, mut visited) = self.improve(w, &self.all_actions(), vec![0; self.cg.len()])?;
        let axis = w.x.is_zero() != w.y.is_zero();
        if !(lexicographic && axis) {
            return Ok((choice, values, visited));
        }
        // Keep only actions optimal for the primary axis, then optimize the other one.
        let cg = &self.cg;
        let allowed: Vec<Vec<usize>> = (0..cg.len())
            .map(|s| {
                if !self.is_choice(s) {
                    return vec![0];
                }
                let succ = cg.successors(s);
                let best = succ.iter().map(|(t, _)| values[*t].dot(w)).max().expect("has successors");
                (0..succ.len()).filter(|&a| values[succ[a].0].dot(w) == best).collect()
            })
            .collect();
        let secondary = Vec2::new(w.y.clone(), w.x.clone());
        let (choice, values, more) = self.improve(&secondary, &allowed, choice)?;
        visited.extend(more);
        Ok((choice, values, visited))
    }

    fn ensure_stopping(&self) -> Result<()> {
        if self.cg.is_stopping() {
            Ok(())
        } else {
            Err(Error::NotStopping)
        }
    }

    fn values_map(&self, values: Vec<Vec2>) -> BTreeMap<String, Vec2> {
        self.cg.ids().iter().cloned().zip(values).collect()
    }

    pub fn policy_evaluate(&self, pol: &MdPolicy) -> Result<BTreeMap<String, Vec2>> {
        let choice = self.choice_of(pol)?;
        let values = self.evaluate(&choice).ok_or(Error::NotStoppingUnderPolicy)?;
        Ok(self.values_map(values))
    }

    pub fn optimal_policy(&self, w: &Vec2, lexicographic: bool) -> Result<OptimalPolicy> {
        if w.x.is_negative() || w.y.is_negative() || w.is_zero() {
            return Err(Error::BadDirection);
        }
        self.ensure_stopping()?;
        let (choice, values, visited) = self.optimize(w, lexicographic)?;
        Ok(OptimalPolicy {
            policy: self.policy_of(&choice),
            values: self.values_map(values),
            visited: visited.iter().map(|c| self.policy_of(c)).collect(),
        })
    }

    /// Pareto frontier at `state` by dichotomic weight refinement between
    /// the two lexicographic extremes.
    pub fn pareto_curve(&self, state: &str) -> Result<ParetoCurve> {
        self.ensure_stopping()?;
        let s = self
            .cg
            .index_of(state)
            .ok_or_else(|| Error::InvalidStrategy(format!("unknown state {state}")))?;
        let solve = |w: &Vec2, lex: bool| -> Result<(Vec2, Choice)> {
            let (choice, values, _) = self.optimize(w, lex)?;
            Ok((values[s].clone(), choice))
        };
        let right = solve(&Vec2::ints(1, 0), true)?;
        let left = solve(&Vec2::ints(0, 1), true)?;
        let mut found = vec![left.clone()];
        if left.0 != right.0 {
            found.push(right.clone());
            let mut pending = vec![(left.0, right.0)];
            while let Some((a, b)) = pending.pop() {
                let w = Vec2::new(&a.y - &b.y, &b.x - &a.x);
                let (c, choice) = solve(&w, false)?;
                if c.dot(&w) > a.dot(&w) {
                    found.push((c.clone(), choice));
                    pending.push((a, c.clone()));
                    pending.push((c, b));
                }
            }
        }
        let points: Vec<Vec2> = found.iter().map(|(p, _)| p.clone()).collect();
        let frontier = Frontier::canonicalize(&points)?;
        let witnesses = frontier
            .vertices()
            .iter()
            .map(|v| {
                let (_, choice) = found.iter().find(|(p, _)| p == v).expect("vertices come from found points");
                (v.clone(), self.policy_of(choice))
            })
            .collect();
        Ok(ParetoCurve { frontier, witnesses })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimalPolicy {
    pub policy: MdPolicy,
    pub values: BTreeMap<String, Vec2>,
    /// Every policy evaluated by policy iteration, in order.
    pub visited: Vec<MdPolicy>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ParetoCurve {
    pub frontier: Frontier,
    /// One realizing policy per frontier vertex.
    pub witnesses: Vec<(Vec2, MdPolicy)>,
}

pub fn policy_evaluate(mdp: &Game, pol: &MdPolicy) -> Result<BTreeMap<String, Vec2>> {
    Mdp::new(mdp)?.policy_evaluate(pol)
}

pub fn optimal_policy(mdp: &Game, w: &Vec2, lexicographic: bool) -> Result<OptimalPolicy> {
    Mdp::new(mdp)?.optimal_policy(w, lexicographic)
}

pub fn mdp_pareto_curve(mdp: &Game, state: &str) -> Result<ParetoCurve> {
    Mdp::new(mdp)?.pareto_curve(state)
}

/// Solves `a·x = b` exactly for two right-hand sides packed as `Vec2`.
/// Returns `None` if `a` is singular.
pub fn solve_linear(mut a: Vec<Vec<Rat>>, mut b: Vec<Vec2>) -> Option<Vec<Vec2>> {
    let n = a.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = Rat::one() / &a[col][col];
        let pivot_row = a[col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] * &inv;
            for (v, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                *v -= &factor * p;
            }
            let delta = b[col].scale(&factor);
            b[r] = &b[r] - &delta;
        }
    }
    Some((0..n).map(|i| b[i].scale(&(Rat::one() / &a[i][i]))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::StateRecord;
    use crate::rational::{int, rat};

    fn loops() -> Game {
        Game::from_json(include_str!("../fixtures/loops.json")).unwrap()
    }

    fn heating() -> Game {
        Game::from_json(include_str!("../fixtures/heating.json")).unwrap()
    }

    fn loops_mdp() -> Game {
        induce_mdp(&loops(), &MdStrategy::from_iter([("s3", "s5"), ("s4", "s5")])).unwrap()
    }

    #[test]
    fn loops_has_a_single_induced_mdp_with_the_same_graph() {
        let m = loops_mdp();
        for (a, b) in loops().states.iter().zip(&m.states) {
            let ta: Vec<&str> = a.transitions.iter().map(|t| t.to.as_str()).collect();
            let tb: Vec<&str> = b.transitions.iter().map(|t| t.to.as_str()).collect();
            assert_eq!(ta, tb);
            assert_eq!(a.reward, b.reward);
        }
        assert!(m.validate().is_ok());
    }

    #[test]
    fn heating_induced_mdp_is_stopping() {
        let sigma = MdStrategy::from_iter([("HC2", "HC3"), ("CH2", "CH3"), ("D1", "HH1")]);
        let m = induce_mdp(&heating(), &sigma).unwrap();
        assert!(m.check_stopping().unwrap().stopping);
    }

    #[test]
    fn induce_rejects_bad_strategies() {
        let g = heating();
        let missing = MdStrategy::from_iter([("HC2", "HC3"), ("D1", "HH1")]);
        assert!(matches!(induce_mdp(&g, &missing), Err(Error::InvalidStrategy(_))));
        let wrong = MdStrategy::from_iter([("HC2", "HH1"), ("CH2", "CH3"), ("D1", "HH1")]);
        assert!(matches!(induce_mdp(&g, &wrong), Err(Error::InvalidStrategy(_))));
        let extra = MdStrategy::from_iter([("HC2", "HC3"), ("CH2", "CH3"), ("D1", "HH1"), ("CC1", "HC2")]);
        assert!(matches!(induce_mdp(&g, &extra), Err(Error::InvalidStrategy(_))));
    }

    #[test]
    fn no_player2_states_is_unchanged() {
        let g = Game {
            initial: "a".into(),
            states: vec![
                StateRecord::new("a", StateKind::Player1, Vec2::ints(1, 2), vec![Transition::controlled("t")]),
                StateRecord::terminal("t"),
            ],
        };
        assert_eq!(induce_mdp(&g, &MdStrategy::new()).unwrap(), g);
    }

    #[test]
    fn one_step_value() {
        let g = Game {
            initial: "a".into(),
            states: vec![
                StateRecord::new("a", StateKind::Chance, Vec2::ints(1, 2), vec![Transition::chance("t", int(1))]),
                StateRecord::terminal("t"),
            ],
        };
        let v = policy_evaluate(&g, &MdPolicy::new()).unwrap();
        assert_eq!(v["a"], Vec2::ints(1, 2));
        assert_eq!(v["t"], Vec2::zero());
    }

    #[test]
    fn geometric_visits() {
        let g = Game {
            initial: "a".into(),
            states: vec![
                StateRecord::new(
                    "a",
                    StateKind::Chance,
                    Vec2::ints(1, 0),
                    vec![Transition::chance("a", rat(1, 2)), Transition::chance("t", rat(1, 2))],
                ),
                StateRecord::terminal("t"),
            ],
        };
        assert_eq!(policy_evaluate(&g, &MdPolicy::new()).unwrap()["a"], Vec2::ints(2, 0));
    }

    #[test]
    fn loops_always_s1_policy() {
        let pol = MdPolicy::from_iter([("s0", "s1")]);
        let v = policy_evaluate(&loops_mdp(), &pol).unwrap();
        assert_eq!(v["s0"], Vec2::ints(1, 0));
        let pol = MdPolicy::from_iter([("s0", "s2")]);
        assert_eq!(policy_evaluate(&loops_mdp(), &pol).unwrap()["s0"], Vec2::ints(0, 1));
    }

    #[test]
    fn non_stopping_policy_is_singular() {
        let g = Game {
            initial: "a".into(),
            states: vec![
                StateRecord::new("a", StateKind::Player1, Vec2::ints(1, 0), vec![Transition::controlled("a"), Transition::controlled("t")]),
                StateRecord::terminal("t"),
            ],
        };
        let pol = MdPolicy::from_iter([("a", "a")]);
        assert_eq!(policy_evaluate(&g, &pol).unwrap_err(), Error::NotStoppingUnderPolicy);
        assert_eq!(optimal_policy(&g, &Vec2::ints(1, 0), false).unwrap_err(), Error::NotStopping);
    }

    #[test]
    fn loops_scalarized_optima() {
        let m = loops_mdp();
        let r = optimal_policy(&m, &Vec2::ints(1, 1), false).unwrap();
        assert_eq!(r.values["s0"].dot(&Vec2::ints(1, 1)), int(1));
        for target in ["s1", "s2"] {
            let v = policy_evaluate(&m, &MdPolicy::from_iter([("s0", target)])).unwrap();
            assert_eq!(v["s0"].dot(&Vec2::ints(1, 1)), int(1));
        }
        let r = optimal_policy(&m, &Vec2::ints(1, 0), true).unwrap();
        assert_eq!(r.policy.get("s0"), Some("s1"));
        assert_eq!(r.values["s0"], Vec2::ints(1, 0));
    }

    #[test]
    fn loops_pareto_curve() {
        let c = mdp_pareto_curve(&loops_mdp(), "s0").unwrap();
        assert_eq!(c.frontier, Frontier::from_canonical(vec![Vec2::ints(0, 1), Vec2::ints(1, 0)]).unwrap());
        let m = loops_mdp();
        for (v, pol) in &c.witnesses {
            assert_eq!(&policy_evaluate(&m, pol).unwrap()["s0"], v);
        }
    }

    #[test]
    fn curves_at_other_states() {
        let m = loops_mdp();
        let c = mdp_pareto_curve(&m, "s1").unwrap();
        assert_eq!(c.frontier.len(), 2);
        let c = mdp_pareto_curve(&m, "s3").unwrap();
        assert_eq!(c.frontier, Frontier::point(Vec2::ints(1, 0)));
    }

    #[test]
    fn bad_direction_rejected() {
        assert_eq!(optimal_policy(&loops_mdp(), &Vec2::ints(0, 0), false).unwrap_err(), Error::BadDirection);
        assert_eq!(optimal_policy(&loops_mdp(), &Vec2::ints(-1, 1), false).unwrap_err(), Error::BadDirection);
    }

    #[test]
    fn unresolved_player2_choice_is_rejected() {
        assert!(matches!(Mdp::new(&heating()), Err(Error::InvalidStrategy(_))));
    }

    #[test]
    fn linear_solver() {
        let a = vec![vec![int(2), int(1)], vec![int(1), int(3)]];
        let b = vec![Vec2::ints(3, 1), Vec2::ints(4, 2)];
        let x = solve_linear(a, b).unwrap();
        assert_eq!(x[0], Vec2::new(int(1), rat(1, 5)));
        assert_eq!(x[1], Vec2::new(int(1), rat(3, 5)));
        assert!(solve_linear(vec![vec![int(1), int(1)], vec![int(2), int(2)]], vec![Vec2::zero(), Vec2::zero()]).is_none());
    }
}
