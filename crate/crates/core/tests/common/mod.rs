//! Independent oracles shared by the integration tests. Nothing here calls
//! into the solver's geometry or linear algebra.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use pareto_games::{Frontier, Game, StateKind};

pub type Pt = (f64, f64);

/// A frontier as plain floats: vertex list with the usual ray semantics.
#[derive(Clone, Debug)]
pub struct FloatCurve(pub Vec<Pt>);

pub fn f(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

impl FloatCurve {
    pub fn from_exact(fr: &Frontier) -> Self {
        FloatCurve(fr.vertices().iter().map(|v| (f(&v.x), f(&v.y))).collect())
    }

    pub fn origin() -> Self {
        FloatCurve(vec![(0.0, 0.0)])
    }

    /// Upper-right hull of a point cloud: Pareto filter then concave chain.
    pub fn hull(mut pts: Vec<Pt>) -> Self {
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(b.1.partial_cmp(&a.1).unwrap()));
        let mut pareto: Vec<Pt> = Vec::new();
        for p in pts.into_iter().rev() {
            if pareto.last().is_none_or(|q: &Pt| p.1 > q.1 + 1e-12) {
                pareto.push(p);
            }
        }
        pareto.reverse();
        let mut chain: Vec<Pt> = Vec::new();
        for p in pareto {
            while chain.len() >= 2 {
                let (o, a) = (chain[chain.len() - 2], chain[chain.len() - 1]);
                let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
                if cross >= -1e-12 {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(p);
        }
        FloatCurve(chain)
    }

    pub fn x_last(&self) -> f64 {
        self.0.last().unwrap().0
    }

    pub fn eval(&self, x: f64) -> f64 {
        let v = &self.0;
        if x <= v[0].0 {
            return v[0].1;
        }
        for w in v.windows(2) {
            if x <= w[1].0 {
                let t = (x - w[0].0) / (w[1].0 - w[0].0);
                return w[0].1 + t * (w[1].1 - w[0].1);
            }
        }
        v.last().unwrap().1
    }

    pub fn union(&self, other: &FloatCurve) -> FloatCurve {
        FloatCurve::hull(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn min(&self, other: &FloatCurve) -> FloatCurve {
        let x_max = self.x_last().min(other.x_last());
        let mut xs: Vec<f64> = self.0.iter().chain(other.0.iter()).map(|p| p.0).filter(|&x| x <= x_max).collect();
        xs.push(x_max);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        let mut pts = Vec::new();
        for w in xs.windows(2) {
            let d0 = self.eval(w[0]) - other.eval(w[0]);
            let d1 = self.eval(w[1]) - other.eval(w[1]);
            if d0 * d1 < 0.0 {
                let x = w[0] + (w[1] - w[0]) * d0 / (d0 - d1);
                pts.push(x);
            }
        }
        xs.extend(pts);
        FloatCurve::hull(xs.into_iter().map(|x| (x, self.eval(x).min(other.eval(x)))).collect())
    }

    pub fn mix(&self, p: f64, other: &FloatCurve, q: f64) -> FloatCurve {
        let mut pts = Vec::new();
        for a in &self.0 {
            for b in &other.0 {
                pts.push((p * a.0 + q * b.0, p * a.1 + q * b.1));
            }
        }
        FloatCurve::hull(pts)
    }

    pub fn shift(&self, d: Pt) -> FloatCurve {
        FloatCurve(self.0.iter().map(|p| (p.0 + d.0, p.1 + d.1)).collect())
    }

    /// Distance from `p` to the boundary: polyline plus both rays.
    fn dist_to(&self, p: Pt) -> f64 {
        let v = &self.0;
        let mut best = f64::INFINITY;
        let first = v[0];
        // Left ray: y = first.1, x <= first.0.
        let dx = (p.0 - first.0).max(0.0);
        best = best.min((dx * dx + (p.1 - first.1).powi(2)).sqrt());
        let last = *v.last().unwrap();
        let dy = (p.1 - last.1).max(0.0);
        best = best.min(((p.0 - last.0).powi(2) + dy * dy).sqrt());
        for w in v.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (ux, uy) = (b.0 - a.0, b.1 - a.1);
            let t = (((p.0 - a.0) * ux + (p.1 - a.1) * uy) / (ux * ux + uy * uy)).clamp(0.0, 1.0);
            let (cx, cy) = (a.0 + t * ux, a.1 + t * uy);
            best = best.min(((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt());
        }
        best
    }

    /// Hausdorff distance between the two boundaries, measured at vertices.
    pub fn hausdorff(&self, other: &FloatCurve) -> f64 {
        let a = self.0.iter().map(|&p| other.dist_to(p)).fold(0.0, f64::max);
        let b = other.0.iter().map(|&p| self.dist_to(p)).fold(0.0, f64::max);
        a.max(b)
    }
}

/// One application of the operator, all in floats, indexed like `g.states`.
pub fn float_step(g: &Game, x: &[FloatCurve]) -> Vec<FloatCurve> {
    let index = |id: &str| g.states.iter().position(|s| s.id == id).unwrap();
    g.states
        .iter()
        .map(|s| {
            let succ: Vec<(usize, f64)> = s
                .transitions
                .iter()
                .map(|t| (index(&t.to), t.prob.as_ref().map_or(1.0, f)))
                .collect();
            let body = match s.kind {
                StateKind::Terminal => return FloatCurve::origin(),
                _ if succ.len() == 1 => x[succ[0].0].clone(),
                StateKind::Player1 => x[succ[0].0].union(&x[succ[1].0]),
                StateKind::Player2 => x[succ[0].0].min(&x[succ[1].0]),
                StateKind::Chance => x[succ[0].0].mix(succ[0].1, &x[succ[1].0], succ[1].1),
            };
            body.shift((f(&s.reward.x), f(&s.reward.y)))
        })
        .collect()
}

/// Gauss-Jordan elimination over rationals for one right-hand side.
pub fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by_key(|&r| a[r][c].abs())?;
        if a[p][c].is_zero() {
            return None;
        }
        a.swap(c, p);
        b.swap(c, p);
        let piv = a[c][c].clone();
        for k in 0..n {
            a[c][k] = &a[c][k] / &piv;
        }
        b[c] = &b[c] / &piv;
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let m = a[r][c].clone();
                for k in 0..n {
                    let t = &m * &a[c][k];
                    a[r][k] -= t;
                }
                let t = &m * &b[c];
                b[r] -= t;
            }
        }
    }
    Some(b)
}

/// Best `w·value(start)` over every memoryless deterministic policy of an
/// MDP, by enumeration and exact linear solves.
pub fn brute_force_scalar_optimum(g: &Game, start: &str, w: (&BigRational, &BigRational)) -> BigRational {
    let n = g.states.len();
    let index = |id: &str| g.states.iter().position(|s| s.id == id).unwrap();
    let choice_states: Vec<usize> = (0..n).filter(|&i| g.states[i].transitions.len() > 1 && g.states[i].kind != StateKind::Chance).collect();
    let total: usize = choice_states.iter().map(|&i| g.states[i].transitions.len()).product();
    let mut best: Option<BigRational> = None;
    for code in 0..total {
        let mut pick = vec![0usize; n];
        let mut c = code;
        for &i in &choice_states {
            let k = g.states[i].transitions.len();
            pick[i] = c % k;
            c /= k;
        }
        let mut a = vec![vec![BigRational::zero(); n]; n];
        let mut b = vec![BigRational::zero(); n];
        for (i, s) in g.states.iter().enumerate() {
            a[i][i] = BigRational::one();
            if s.kind == StateKind::Terminal {
                continue;
            }
            b[i] = w.0 * &s.reward.x + w.1 * &s.reward.y;
            if s.kind == StateKind::Chance {
                for t in &s.transitions {
                    a[i][index(&t.to)] -= t.prob.clone().unwrap();
                }
            } else {
                a[i][index(&s.transitions[pick[i]].to)] -= BigRational::one();
            }
        }
        let v = solve_exact(a, b).expect("stopping MDP gives a regular system");
        let val = v[index(start)].clone();
        if best.as_ref().map_or(true, |b| &val > b) {
            best = Some(val);
        }
    }
    best.unwrap()
}

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
