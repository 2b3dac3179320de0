//! Nonempty downward-closed convex subsets of the plane, represented by
//! their Pareto frontier.
//!
//! A [`Frontier`] with vertices `v_0, …, v_k` (x strictly increasing, y
//! strictly decreasing, slopes strictly decreasing) denotes the set
//! `{(a, b) : a <= x_k, b <= F(a)}` where `F` is `y_0` left of `x_0` and the
//! linear interpolation of the vertices on `[x_0, x_k]`. The left ray is
//! horizontal and the right ray vertical, so two frontiers denote the same
//! set exactly when their vertex lists are equal.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{fmt_rat, to_f64, Rat, Vec2};

/// One-sided slope of a frontier. The vertical right ray has slope
/// `NegInfinity`, which orders below every finite slope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slope {
    NegInfinity,
    Finite(Rat),
}

impl Slope {
    pub fn zero() -> Slope {
        Slope::Finite(Rat::zero())
    }

    pub fn finite(&self) -> Option<&Rat> {
        match self {
            Slope::Finite(r) => Some(r),
            Slope::NegInfinity => None,
        }
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Slope::NegInfinity, Slope::NegInfinity) => Ordering::Equal,
            (Slope::NegInfinity, _) => Ordering::Less,
            (_, Slope::NegInfinity) => Ordering::Greater,
            (Slope::Finite(a), Slope::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::NegInfinity => write!(f, "-inf"),
            Slope::Finite(r) => write!(f, "{r}"),
        }
    }
}

/// Canonical Pareto frontier of a downward-closed convex planar set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Frontier {
    vertices: Vec<Vec2>,
}

/// `(a - o) x (b - o)`; negative for a clockwise turn.
fn cross(o: &Vec2, a: &Vec2, b: &Vec2) -> Rat {
    (&a.x - &o.x) * (&b.y - &o.y) - (&a.y - &o.y) * (&b.x - &o.x)
}

fn segment_slope(a: &Vec2, b: &Vec2) -> Rat {
    (&b.y - &a.y) / (&b.x - &a.x)
}

/// Checks the canonical-form invariants on a raw vertex list.
pub fn is_canonical(vertices: &[Vec2]) -> bool {
    if vertices.is_empty() {
        return false;
    }
    for w in vertices.windows(2) {
        if w[0].x >= w[1].x || w[0].y <= w[1].y {
            return false;
        }
    }
    vertices.windows(3).all(|w| cross(&w[0], &w[1], &w[2]).is_negative())
}

impl Frontier {
    /// Frontier of `dwc(conv(points))`.
    pub fn canonicalize(points: &[Vec2]) -> Result<Frontier> {
        if points.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut pts: Vec<&Vec2> = points.iter().collect();
        // x descending, ties by y descending: a point survives only if it is
        // strictly higher than everything to its right.
        pts.sort_by(|a, b| b.x.cmp(&a.x).then_with(|| b.y.cmp(&a.y)));
        let mut maximal: Vec<&Vec2> = Vec::with_capacity(pts.len());
        for p in pts {
            if maximal.last().is_none_or(|q| p.y > q.y) {
                maximal.push(p);
            }
        }
        maximal.reverse();

        let mut hull: Vec<Vec2> = Vec::with_capacity(maximal.len());
        for p in maximal {
            while hull.len() >= 2 && !cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p).is_negative() {
                hull.pop();
            }
            hull.push(p.clone());
        }
        Ok(Frontier { vertices: hull })
    }

    /// Wraps a vertex list that must already be canonical.
    pub fn from_canonical(vertices: Vec<Vec2>) -> Result<Frontier> {
        if vertices.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !is_canonical(&vertices) {
            return Err(Error::Parse(format!("vertex list {vertices:?} is not a canonical frontier")));
        }
        Ok(Frontier { vertices })
    }

    /// `dwc({p})`.
    pub fn point(p: Vec2) -> Frontier {
        Frontier { vertices: vec![p] }
    }

    /// `dwc({(0,0)})`.
    pub fn origin() -> Frontier {
        Frontier::point(Vec2::zero())
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// The extremal points, which are exactly the canonical vertices.
    pub fn extremal_points(&self) -> Vec<Vec2> {
        self.vertices.clone()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn first(&self) -> &Vec2 {
        &self.vertices[0]
    }

    pub fn last(&self) -> &Vec2 {
        &self.vertices[self.vertices.len() - 1]
    }

    pub fn x_last(&self) -> &Rat {
        &self.last().x
    }

    /// Index `i` of the segment `[v_i, v_{i+1}]` with `v_i.x < x <= v_{i+1}.x`;
    /// requires `x_first < x <= x_last`.
    fn segment_left_of(&self, x: &Rat) -> usize {
        self.vertices.partition_point(|v| &v.x < x) - 1
    }

    /// `F(x)`, or `None` for `x > x_last`.
    pub fn evaluate(&self, x: &Rat) -> Option<Rat> {
        if x > self.x_last() {
            return None;
        }
        if x <= &self.first().x {
            return Some(self.first().y.clone());
        }
        let i = self.segment_left_of(x);
        let (a, b) = (&self.vertices[i], &self.vertices[i + 1]);
        Some(&a.y + segment_slope(a, b) * (x - &a.x))
    }

    /// Left and right slopes of `F` at `x`.
    pub fn slope_at(&self, x: &Rat) -> Result<(Slope, Slope)> {
        if x > self.x_last() {
            return Err(Error::OutOfDomain(x.to_string()));
        }
        let v = &self.vertices;
        let left = if x <= &self.first().x {
            Slope::zero()
        } else {
            let i = self.segment_left_of(x);
            Slope::Finite(segment_slope(&v[i], &v[i + 1]))
        };
        let right = if x == self.x_last() {
            Slope::NegInfinity
        } else if x < &self.first().x {
            Slope::zero()
        } else {
            // v_i.x <= x < v_{i+1}.x
            let i = v.partition_point(|p| &p.x <= x) - 1;
            Slope::Finite(segment_slope(&v[i], &v[i + 1]))
        };
        Ok((left, right))
    }

    /// Slopes of the finite segments, left to right.
    pub fn segment_slopes(&self) -> Vec<Rat> {
        self.vertices.windows(2).map(|w| segment_slope(&w[0], &w[1])).collect()
    }

    /// Frontier of `dwc(conv(self ∪ other))`.
    pub fn dwc_conv_union(&self, other: &Frontier) -> Frontier {
        let mut pts = self.vertices.clone();
        pts.extend(other.vertices.iter().cloned());
        Frontier::canonicalize(&pts).expect("union of nonempty frontiers")
    }

    /// Frontier of `self ∩ other`: the pointwise minimum of the two
    /// frontier functions, cut at the smaller right end.
    pub fn intersect_min(&self, other: &Frontier) -> Frontier {
        if self == other {
            return self.clone();
        }
        let x_max = std::cmp::min(self.x_last(), other.x_last()).clone();
        let mut xs: Vec<Rat> = self
            .vertices
            .iter()
            .chain(other.vertices.iter())
            .map(|v| v.x.clone())
            .filter(|x| x <= &x_max)
            .collect();
        xs.push(x_max.clone());
        xs.sort();
        xs.dedup();

        let gap = |x: &Rat| -> Rat {
            self.evaluate(x).expect("inside domain") - other.evaluate(x).expect("inside domain")
        };
        let mut crossings = Vec::new();
        for w in xs.windows(2) {
            let (da, db) = (gap(&w[0]), gap(&w[1]));
            // Both functions are affine on [a, b]; a strict sign change is a crossing.
            if (da.is_positive() && db.is_negative()) || (da.is_negative() && db.is_positive()) {
                let t = &da / (&da - &db);
                crossings.push(&w[0] + (&w[1] - &w[0]) * t);
            }
        }
        xs.extend(crossings);

        let pts: Vec<Vec2> = xs
            .into_iter()
            .map(|x| {
                let a = self.evaluate(&x).expect("inside domain");
                let b = other.evaluate(&x).expect("inside domain");
                Vec2::new(x, std::cmp::min(a, b))
            })
            .collect();
        Frontier::canonicalize(&pts).expect("nonempty")
    }

    /// Frontier of the scaled Minkowski sum `Σ p_i · set(f_i)`; weights must
    /// be positive and sum to one.
    pub fn weighted_sum(terms: &[(Rat, &Frontier)]) -> Result<Frontier> {
        if terms.is_empty() {
            return Err(Error::WeightsInvalid("no terms".into()));
        }
        if let Some((p, _)) = terms.iter().find(|(p, _)| !p.is_positive()) {
            return Err(Error::WeightsInvalid(format!("weight {p} is not positive")));
        }
        let total: Rat = terms.iter().map(|(p, _)| p.clone()).sum();
        if !total.is_one() {
            return Err(Error::WeightsInvalid(format!("weights sum to {total}")));
        }
        if terms.len() == 1 {
            return Ok(terms[0].1.clone());
        }

        let mut start = Vec2::zero();
        let mut edges: Vec<Vec2> = Vec::new();
        for (p, f) in terms {
            start = &start + &f.first().scale(p);
            edges.extend(f.vertices.windows(2).map(|w| (&w[1] - &w[0]).scale(p)));
        }
        // Every edge has dx > 0, so compare dy1/dx1 with dy2/dx2 by cross-multiplying.
        edges.sort_by(|a, b| (&b.y * &a.x).cmp(&(&a.y * &b.x)));

        let mut vertices = vec![start];
        let mut i = 0;
        while i < edges.len() {
            let mut step = edges[i].clone();
            let mut j = i + 1;
            while j < edges.len() && &edges[j].y * &step.x == &step.y * &edges[j].x {
                step = &step + &edges[j];
                j += 1;
            }
            let next = vertices.last().expect("nonempty") + &step;
            vertices.push(next);
            i = j;
        }
        debug_assert!(is_canonical(&vertices));
        Ok(Frontier { vertices })
    }

    pub fn translate(&self, v: &Vec2) -> Frontier {
        if v.is_zero() {
            return self.clone();
        }
        Frontier { vertices: self.vertices.iter().map(|p| p + v).collect() }
    }

    /// `max { w·z : z ∈ set(self) }` for `w >= 0`, `w != 0`.
    pub fn support(&self, w: &Vec2) -> Result<Rat> {
        if w.x.is_negative() || w.y.is_negative() || w.is_zero() {
            return Err(Error::BadDirection);
        }
        Ok(self.vertices.iter().map(|v| v.dot(w)).max().expect("nonempty"))
    }

    /// Vertex attaining the support in direction `w`, first one on ties.
    pub fn support_vertex(&self, w: &Vec2) -> Result<&Vec2> {
        let best = self.support(w)?;
        Ok(self.vertices.iter().find(|v| v.dot(w) == best).expect("attained"))
    }

    /// Whether `z` lies in the denoted downward-closed set.
    pub fn contains(&self, z: &Vec2) -> bool {
        match self.evaluate(&z.x) {
            Some(y) => z.y <= y,
            None => false,
        }
    }

    /// `set(self) ⊆ set(other)`; exact, via the vertices of `self`.
    pub fn is_subset_of(&self, other: &Frontier) -> bool {
        self.vertices.iter().all(|v| other.contains(v))
    }

    /// Convergence gauge: the largest vertical gap over the common domain,
    /// or the gap between the right ends if that is larger. Not a metric.
    pub fn distance(&self, other: &Frontier) -> Rat {
        let x_max = std::cmp::min(self.x_last(), other.x_last()).clone();
        let mut d = (self.x_last() - other.x_last()).abs();
        let xs = self
            .vertices
            .iter()
            .chain(other.vertices.iter())
            .map(|v| &v.x)
            .filter(|x| *x <= &x_max)
            .chain(std::iter::once(&x_max));
        for x in xs {
            let gap = (self.evaluate(x).expect("in domain") - other.evaluate(x).expect("in domain")).abs();
            if gap > d {
                d = gap;
            }
        }
        d
    }

    /// One `x,y` row per vertex, coordinates as `p/q`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            out.push_str(&format!("{},{}\n", fmt_rat(&v.x), fmt_rat(&v.y)));
        }
        out
    }

    /// SVG drawing of the frontier polyline with both rays clipped to a box
    /// one unit (or 10%) wider than the vertices. Coordinates are rounded
    /// to `f64` for display.
    pub fn to_svg(&self, width: u32, height: u32) -> String {
        let xs: Vec<f64> = self.vertices.iter().map(|v| to_f64(&v.x)).collect();
        let ys: Vec<f64> = self.vertices.iter().map(|v| to_f64(&v.y)).collect();
        let (x0, x1) = (xs[0], xs[xs.len() - 1]);
        let (y1, y0) = (ys[0], ys[ys.len() - 1]);
        let pad_x = ((x1 - x0) * 0.1).max(1.0);
        let pad_y = ((y1 - y0) * 0.1).max(1.0);
        let (left, right, bottom, top) = (x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y);
        let (w, h) = (f64::from(width), f64::from(height));
        let px = |x: f64| (x - left) / (right - left) * w;
        let py = |y: f64| (top - y) / (top - bottom) * h;
        let mut points = vec![format!("{:.3},{:.3}", px(left), py(y1))];
        points.extend(xs.iter().zip(&ys).map(|(&x, &y)| format!("{:.3},{:.3}", px(x), py(y))));
        points.push(format!("{:.3},{:.3}", px(x1), py(bottom)));
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
        );
        out.push_str(&format!(
            "  <polygon points=\"{} {:.3},{:.3} {:.3},{:.3}\" fill=\"#dde8f5\" stroke=\"none\"/>\n",
            points.join(" "),
            px(left),
            py(bottom),
            px(left),
            py(y1)
        ));
        out.push_str(&format!("  <polyline points=\"{}\" fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"2\"/>\n", points.join(" ")));
        for (x, y) in xs.iter().zip(&ys) {
            out.push_str(&format!("  <circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"3\" fill=\"#1f4e8c\"/>\n", px(*x), py(*y)));
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Parses the vertex CSV written by [`Frontier::to_csv`]; the rows are
/// returned as-is, without canonicalization.
pub fn parse_csv(text: &str) -> Result<Vec<Vec2>> {
    text.lines().map(str::trim).filter(|l| !l.is_empty()).map(Vec2::parse).collect()
}

impl fmt::Debug for Frontier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.vertices.iter()).finish()
    }
}

impl fmt::Display for Frontier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for Frontier {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.vertices.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn p(x: (i64, i64), y: (i64, i64)) -> Vec2 {
        Vec2::new(rat(x.0, x.1), rat(y.0, y.1))
    }

    fn pi(x: i64, y: i64) -> Vec2 {
        Vec2::ints(x, y)
    }

    fn f(pts: &[Vec2]) -> Frontier {
        Frontier::from_canonical(pts.to_vec()).unwrap()
    }

    fn unit() -> Frontier {
        f(&[pi(0, 1), pi(1, 0)])
    }

    #[test]
    fn canonicalize_drops_collinear_midpoint() {
        let c = Frontier::canonicalize(&[pi(0, 1), pi(1, 0), p((1, 2), (1, 2))]).unwrap();
        assert_eq!(c, unit());
    }

    #[test]
    fn canonicalize_singleton_and_empty() {
        assert_eq!(Frontier::canonicalize(&[pi(0, 0)]).unwrap(), Frontier::origin());
        assert_eq!(Frontier::canonicalize(&[]), Err(Error::EmptyInput));
    }

    #[test]
    fn canonicalize_heating_segment() {
        let c = Frontier::canonicalize(&[pi(-1, 0), p((-1, 2), (-1, 2)), pi(0, -1)]).unwrap();
        assert_eq!(c, f(&[pi(-1, 0), pi(0, -1)]));
    }

    #[test]
    fn canonicalize_removes_dominated_and_duplicates() {
        let c = Frontier::canonicalize(&[pi(0, 0), pi(0, 1), pi(0, 1), pi(-3, 1), pi(1, -5), pi(1, -2)]).unwrap();
        assert_eq!(c, f(&[pi(0, 1), pi(1, -2)]));
    }

    #[test]
    fn evaluate_cases() {
        assert_eq!(unit().evaluate(&rat(1, 2)), Some(rat(1, 2)));
        assert_eq!(unit().evaluate(&int(-5)), Some(int(1)));
        assert_eq!(unit().evaluate(&int(2)), None);
    }

    #[test]
    fn slope_cases() {
        let m1 = Slope::Finite(int(-1));
        assert_eq!(unit().slope_at(&rat(1, 2)).unwrap(), (m1.clone(), m1.clone()));
        let g = f(&[pi(-1, 0), pi(0, -1)]);
        assert_eq!(g.slope_at(&int(-1)).unwrap(), (Slope::zero(), m1.clone()));
        assert_eq!(unit().slope_at(&int(1)).unwrap(), (m1, Slope::NegInfinity));
        assert_eq!(unit().slope_at(&int(3)), Err(Error::OutOfDomain("3".into())));
        let single = Frontier::origin();
        assert_eq!(single.slope_at(&int(-1)).unwrap(), (Slope::zero(), Slope::zero()));
        assert_eq!(single.slope_at(&int(0)).unwrap(), (Slope::zero(), Slope::NegInfinity));
    }

    #[test]
    fn union_examples() {
        let a = Frontier::point(pi(0, 1));
        let b = Frontier::point(pi(1, 0));
        assert_eq!(a.dwc_conv_union(&b), unit());
        assert_eq!(unit().dwc_conv_union(&unit()), unit());
        let hh = Frontier::point(pi(-1, 0));
        let hcs = f(&[p((-1, 2), (-1, 2)), pi(0, -1)]);
        assert_eq!(hh.dwc_conv_union(&hcs), f(&[pi(-1, 0), pi(0, -1)]));
    }

    #[test]
    fn intersect_examples() {
        let hc3 = f(&[p((-1, 2), (0, 1)), p((0, 1), (-1, 2))]);
        let hc1 = f(&[pi(-1, 0), pi(0, -1)]);
        assert_eq!(hc3.intersect_min(&hc1), hc1);
        assert_eq!(unit().intersect_min(&unit()), unit());
        let mid = Frontier::point(p((1, 2), (1, 2)));
        assert_eq!(unit().intersect_min(&mid), mid);
    }

    #[test]
    fn intersect_with_crossing() {
        // A straight segment against a concave chain: they cross twice.
        let a = f(&[pi(-6, 6), pi(4, -4)]);
        let b = f(&[pi(-6, 5), pi(0, 4), pi(2, 0), pi(4, -8)]);
        let m = a.intersect_min(&b);
        assert!(is_canonical(m.vertices()));
        // a - b changes sign on (-6, 0) and on (2, 4).
        assert_eq!(m.len(), 4);
        for k in -24..=16 {
            let x = rat(k, 4);
            let want = std::cmp::min(a.evaluate(&x).unwrap(), b.evaluate(&x).unwrap());
            assert_eq!(m.evaluate(&x).unwrap(), want, "x = {x}");
        }
        assert_eq!(m.intersect_min(&a), m);
        assert_eq!(b.intersect_min(&a), m);
    }

    #[test]
    fn intersect_cuts_at_smaller_right_end() {
        let a = f(&[pi(0, 5), pi(10, 0)]);
        let b = Frontier::point(pi(2, 100));
        let m = a.intersect_min(&b);
        assert_eq!(m.x_last(), &int(2));
        assert_eq!(m, f(&[pi(0, 5), pi(2, 4)]));
    }

    #[test]
    fn weighted_sum_examples() {
        let hc2 = f(&[pi(-1, -1), pi(0, -2)]);
        let hh = Frontier::origin();
        let half = rat(1, 2);
        let got = Frontier::weighted_sum(&[(half.clone(), &hc2), (half.clone(), &hh)]).unwrap();
        assert_eq!(got, f(&[p((-1, 2), (-1, 2)), pi(0, -1)]));

        assert_eq!(Frontier::weighted_sum(&[(int(1), &unit())]).unwrap(), unit());

        let a = Frontier::point(pi(1, 0));
        let b = Frontier::point(pi(0, 1));
        let got = Frontier::weighted_sum(&[(half.clone(), &a), (half, &b)]).unwrap();
        assert_eq!(got, Frontier::point(p((1, 2), (1, 2))));
    }

    #[test]
    fn weighted_sum_merges_equal_slopes() {
        let big = f(&[pi(0, 2), pi(2, 0)]);
        let half = rat(1, 2);
        let got = Frontier::weighted_sum(&[(half.clone(), &unit()), (half, &big)]).unwrap();
        assert_eq!(got, f(&[p((0, 1), (3, 2)), p((3, 2), (0, 1))]));
    }

    #[test]
    fn weighted_sum_rejects_bad_weights() {
        let u = unit();
        assert!(matches!(
            Frontier::weighted_sum(&[(rat(1, 2), &u), (rat(1, 3), &u)]),
            Err(Error::WeightsInvalid(_))
        ));
        assert!(matches!(
            Frontier::weighted_sum(&[(int(2), &u), (int(-1), &u)]),
            Err(Error::WeightsInvalid(_))
        ));
        assert!(matches!(Frontier::weighted_sum(&[]), Err(Error::WeightsInvalid(_))));
    }

    #[test]
    fn translate_examples() {
        let hc1 = f(&[pi(-1, 0), pi(0, -1)]);
        let hc2 = hc1.translate(&pi(0, -1));
        assert_eq!(hc2, f(&[pi(-1, -1), pi(0, -2)]));
        assert_eq!(unit().translate(&Vec2::zero()), unit());
        assert_eq!(hc2.translate(&pi(-1, 0)), f(&[pi(-2, -1), pi(-1, -2)]));
        assert_eq!(hc2.translate(&pi(0, -1)).translate(&pi(0, 1)), hc2);
    }

    #[test]
    fn support_examples() {
        assert_eq!(unit().support(&pi(1, 1)).unwrap(), int(1));
        assert_eq!(unit().support(&pi(1, 0)).unwrap(), int(1));
        let cc = f(&[pi(-2, -1), pi(-1, -2)]);
        assert_eq!(cc.support(&pi(1, 2)).unwrap(), int(-4));
        assert_eq!(cc.support_vertex(&pi(1, 2)).unwrap(), &pi(-2, -1));
        assert_eq!(unit().support(&pi(0, 0)), Err(Error::BadDirection));
        assert_eq!(unit().support(&pi(-1, 1)), Err(Error::BadDirection));
    }

    #[test]
    fn contains_and_distance() {
        assert!(unit().contains(&p((2, 5), (1, 2))));
        assert!(!unit().contains(&p((3, 5), (3, 5))));
        assert!(unit().contains(&pi(-100, 1)));
        assert!(!unit().contains(&p((1001, 1000), (-100, 1))));
        assert_eq!(unit().distance(&unit()), int(0));
        let lower = unit().translate(&pi(0, -1));
        assert_eq!(unit().distance(&lower), int(1));
    }

    #[test]
    fn csv_round_trip() {
        let cc = f(&[pi(-2, -1), pi(-1, -2)]);
        let csv = cc.to_csv();
        assert_eq!(csv, "-2/1,-1/1\n-1/1,-2/1\n");
        assert_eq!(Frontier::from_canonical(parse_csv(&csv).unwrap()).unwrap(), cc);
    }

    #[test]
    fn slope_order_puts_neg_infinity_last() {
        assert!(Slope::NegInfinity < Slope::Finite(int(-1000)));
        assert!(Slope::Finite(int(-1)) < Slope::zero());
    }

    #[test]
    fn svg_has_one_marker_per_vertex() {
        let f = Frontier::from_canonical(vec![Vec2::ints(0, 3), Vec2::ints(1, 2), Vec2::ints(3, -2)]).unwrap();
        let svg = f.to_svg(200, 100);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 3);
        let single = Frontier::point(Vec2::ints(1, 1)).to_svg(50, 50);
        assert_eq!(single.matches("<circle").count(), 1);
    }
}