//! Executable slope relations between a curve and the curves of its
//! successors after one Bellman application.
//!
//! Each audit takes curves already related by the operator and checks the
//! slope facts that must then hold at their vertices. They apply equally to
//! exact Pareto curves and to consecutive value-iteration iterates.

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bellman::CurveMap;
use crate::error::{Error, Result};
use crate::frontier::{Frontier, Slope};
use crate::game::{Game, StateKind};
use crate::rational::{int, Rat, Vec2};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub state: Option<String>,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    /// Number of individual assertions evaluated.
    pub checks: usize,
    pub failures: Vec<Finding>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, check: &str, detail: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(Finding { state: None, check: check.to_string(), detail: detail() });
        }
    }

    fn merge(&mut self, other: Report) {
        self.checks += other.checks;
        self.failures.extend(other.failures);
    }

    fn for_state(mut self, state: &str) -> Report {
        for f in &mut self.failures {
            f.state.get_or_insert_with(|| state.to_string());
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "pass" } else { "FAIL" };
        writeln!(f, "{verdict}: {} checks, {} failures", self.checks, self.failures.len())?;
        for x in &self.failures {
            match &x.state {
                Some(s) => writeln!(f, "  [{s}] {}: {}", x.check, x.detail)?,
                None => writeln!(f, "  {}: {}", x.check, x.detail)?,
            }
        }
        Ok(())
    }
}

/// Checks a raw vertex list for the shape of a frontier function.
pub fn audit_frontier(vertices: &[Vec2]) -> Report {
    let mut r = Report::default();
    r.check(!vertices.is_empty(), "nonempty", || "no vertices".into());
    for w in vertices.windows(2) {
        r.check(w[0].x < w[1].x, "x increasing", || format!("{} then {}", w[0], w[1]));
        r.check(w[0].y > w[1].y, "y decreasing", || format!("y not decreasing: {} then {}", w[0], w[1]));
    }
    if !r.passed() {
        return r;
    }
    let slopes: Vec<Rat> = vertices.windows(2).map(|w| (&w[1].y - &w[0].y) / (&w[1].x - &w[0].x)).collect();
    for (i, s) in slopes.windows(2).enumerate() {
        r.check(s[0] > s[1], "concave", || format!("slopes {} then {} at {}", s[0], s[1], vertices[i + 1]));
    }
    if !r.passed() {
        return r;
    }
    let f = Frontier::from_canonical(vertices.to_vec()).expect("checked above");
    let xs = sample_points(&f);
    let slopes: Vec<(Slope, Slope)> = xs.iter().map(|x| f.slope_at(x).expect("in domain")).collect();
    for i in 0..xs.len() {
        let (l, rs) = &slopes[i];
        r.check(l >= rs, "lslope >= rslope", || format!("at x = {}: {l} < {rs}", xs[i]));
        if let Some((l2, _)) = slopes.get(i + 1) {
            r.check(rs >= l2, "rslope >= next lslope", || format!("at x = {}: {rs} < {l2}", xs[i]));
            if l != l2 {
                let has_vertex = f.vertices().iter().any(|v| v.x >= xs[i] && v.x <= xs[i + 1]);
                r.check(has_vertex, "slope change at a vertex", || {
                    format!("left slopes {l} and {l2} differ on [{}, {}] with no vertex", xs[i], xs[i + 1])
                });
            }
        }
    }
    r
}

/// Vertex abscissas, segment midpoints and one point on the left ray.
fn sample_points(f: &Frontier) -> Vec<Rat> {
    let v = f.vertices();
    let mut xs = vec![&v[0].x - Rat::one()];
    for (i, p) in v.iter().enumerate() {
        xs.push(p.x.clone());
        if let Some(q) = v.get(i + 1) {
            xs.push((&p.x + &q.x) / int(2));
        }
    }
    xs
}

fn mismatch(what: &str, expected: &Frontier, actual: &Frontier) -> Error {
    Error::RelationMismatch(format!("{what}: expected {expected}, got {actual}"))
}

/// Player-1 relation: `parent` is the hull of the union of the successors.
pub fn audit_p1(parent: &Frontier, succ1: &Frontier, succ2: &Frontier) -> Result<Report> {
    let expected = succ1.dwc_conv_union(succ2);
    if &expected != parent {
        return Err(mismatch("parent is not the hull of the union", &expected, parent));
    }
    let mut r = Report::default();
    for p in parent.vertices() {
        let own = succ1.vertices().contains(p) || succ2.vertices().contains(p);
        r.check(own, "vertex inherited", || format!("{p} is not a vertex of either successor"));
        let (Ok(s1), Ok(s2)) = (succ1.slope_at(&p.x), succ2.slope_at(&p.x)) else {
            continue;
        };
        let (pl, pr) = parent.slope_at(&p.x)?;
        let between = |x: &Slope, a: &Slope, b: &Slope| std::cmp::min(a, b) <= x && x <= std::cmp::max(a, b);
        r.check(between(&pl, &s1.0, &s2.0), "lslope between successors", || {
            format!("at x = {}: {pl} not within [{}, {}]", p.x, s1.0, s2.0)
        });
        r.check(between(&pr, &s1.1, &s2.1), "rslope between successors", || {
            format!("at x = {}: {pr} not within [{}, {}]", p.x, s1.1, s2.1)
        });
    }
    Ok(r)
}

/// Player-2 relation: `parent` is the pointwise minimum of the successors
/// shifted by `reward`.
pub fn audit_p2(parent: &Frontier, succ1: &Frontier, succ2: &Frontier, reward: &Vec2) -> Result<Report> {
    let base = succ1.intersect_min(succ2);
    let expected = base.translate(reward);
    if &expected != parent {
        return Err(mismatch("parent is not the shifted minimum", &expected, parent));
    }
    let mut r = Report::default();
    for x in sample_points(&base) {
        let (f1, f2) = (succ1.evaluate(&x).expect("in domain"), succ2.evaluate(&x).expect("in domain"));
        let (s1, s2) = (succ1.slope_at(&x)?, succ2.slope_at(&x)?);
        let (pl, pr) = parent.slope_at(&(&x + &reward.x))?;
        let (el, er) = match f1.cmp(&f2) {
            std::cmp::Ordering::Less => s1,
            std::cmp::Ordering::Greater => s2,
            std::cmp::Ordering::Equal => (std::cmp::max(s1.0, s2.0), std::cmp::min(s1.1, s2.1)),
        };
        r.check(pl == el, "minimum left slope", || format!("at x = {x}: parent lslope {pl}, expected {el}"));
        let er = if &x == base.x_last() { Slope::NegInfinity } else { er };
        r.check(pr == er, "minimum right slope", || format!("at x = {x}: parent rslope {pr}, expected {er}"));
    }
    Ok(r)
}

fn left_slope_at_vertex(f: &Frontier, i: usize) -> Slope {
    if i == 0 {
        Slope::zero()
    } else {
        Slope::Finite(f.segment_slopes()[i - 1].clone())
    }
}

fn right_slope_at_vertex(f: &Frontier, i: usize) -> Slope {
    f.segment_slopes().get(i).cloned().map_or(Slope::NegInfinity, Slope::Finite)
}

/// Vertices of `f` maximizing the dot product with `w`.
fn maximizers(f: &Frontier, w: &Vec2) -> Vec<usize> {
    let best = f.support(w).expect("direction is nonnegative");
    (0..f.len()).filter(|&i| f.vertices()[i].dot(w) == best).collect()
}

/// Chance relation: `parent` is the weighted Minkowski sum of the successors.
pub fn audit_chance(parent: &Frontier, succ1: &Frontier, succ2: &Frontier, p1: &Rat, p2: &Rat) -> Result<Report> {
    let expected = Frontier::weighted_sum(&[(p1.clone(), succ1), (p2.clone(), succ2)])?;
    if &expected != parent {
        return Err(mismatch("parent is not the weighted sum", &expected, parent));
    }
    let surrogate = parent
        .segment_slopes()
        .into_iter()
        .chain(succ1.segment_slopes())
        .chain(succ2.segment_slopes())
        .fold(Rat::zero(), std::cmp::min)
        - Rat::one();
    let mut r = Report::default();
    for (i, p) in parent.vertices().iter().enumerate() {
        let left = left_slope_at_vertex(parent, i);
        let right = right_slope_at_vertex(parent, i);
        let left = left.finite().expect("left slopes are finite").clone();
        let right = right.finite().cloned().unwrap_or_else(|| surrogate.clone());
        let m = (&left + &right) / int(2);
        let w = Vec2::new(-m, Rat::one());
        let (q, rr) = (maximizers(succ1, &w), maximizers(succ2, &w));
        r.check(q.len() == 1 && rr.len() == 1, "unique decomposition", || {
            format!("at {p}: {} and {} maximizers", q.len(), rr.len())
        });
        let (Some(&qi), Some(&ri)) = (q.first(), rr.first()) else { continue };
        let (qv, rv) = (&succ1.vertices()[qi], &succ2.vertices()[ri]);
        let sum = &qv.scale(p1) + &rv.scale(p2);
        r.check(&sum == p, "decomposition sums", || format!("{p} != {p1}·{qv} + {p2}·{rv}"));
        let expected = std::cmp::min(left_slope_at_vertex(succ1, qi), left_slope_at_vertex(succ2, ri));
        let actual = left_slope_at_vertex(parent, i);
        r.check(actual == expected, "left slope is min", || format!("at {p}: {actual}, expected {expected}"));
    }
    Ok(r)
}

/// Audits every non-terminal state with `parents[s]` as the image of
/// `succs` under one operator step.
pub fn audit_step(g: &Game, parents: &CurveMap, succs: &CurveMap) -> Result<Report> {
    let cg = g.checked()?;
    let reports: Vec<Report> = (0..cg.len())
        .into_par_iter()
        .filter(|&s| cg.kind(s) != StateKind::Terminal)
        .map(|s| -> Result<Report> {
            let id = cg.id(s);
            let parent = parents.curve(id)?;
            let reward = cg.reward(s);
            let succ = cg.successors(s);
            let curves: Vec<&Frontier> = succ.iter().map(|(t, _)| succs.curve(cg.id(*t))).collect::<Result<_>>()?;
            let unshifted = parent.translate(&-reward);
            let outcome = match (cg.kind(s), curves.as_slice()) {
                (_, [only]) => {
                    if *only == &unshifted {
                        Ok(Report { checks: 1, failures: vec![] })
                    } else {
                        Err(mismatch("parent is not the shifted successor", only, &unshifted))
                    }
                }
                (StateKind::Player1, [a, b]) => audit_p1(&unshifted, a, b),
                (StateKind::Player2, [a, b]) => audit_p2(parent, a, b, reward),
                (StateKind::Chance, [a, b]) => audit_chance(&unshifted, a, b, &succ[0].1, &succ[1].1),
                _ => Err(Error::InvalidGame(vec![format!("{id} has {} successors", curves.len())])),
            };
            Ok(match outcome {
                Ok(r) => r.for_state(id),
                Err(Error::RelationMismatch(detail)) => Report {
                    checks: 1,
                    failures: vec![Finding { state: Some(id.to_string()), check: "relation".into(), detail }],
                },
                Err(e) => return Err(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut total = Report::default();
    for r in reports {
        total.merge(r);
    }
    for (id, f) in parents.iter() {
        total.merge(audit_frontier(f.vertices()).for_state(id));
    }
    Ok(total)
}

/// Audits a curve family against itself, as for a fixpoint.
pub fn audit_game(g: &Game, curves: &CurveMap) -> Result<Report> {
    audit_step(g, curves, curves)
}
