//! Points and lines with exact coordinates.
//!
//! A [`Line3`] is always stored in canonical form: the direction is scaled so
//! its first nonzero coordinate is 1, and the base point is the unique point
//! of the line whose coordinate in that position is 0. Two `Line3` values are
//! therefore equal (and hash equally) iff they describe the same line.

use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point2 {
    pub x: Rational,
    pub y: Rational,
}

impl Point2 {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point2 { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point2::new(rational::int(x), rational::int(y))
    }

    pub fn sub(&self, other: &Point2) -> Point2 {
        Point2::new(&self.x - &other.x, &self.y - &other.y)
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Squared euclidean distance. Distances are never square-rooted.
pub fn dist_sq(p: &Point2, q: &Point2) -> Rational {
    let dx = &p.x - &q.x;
    let dy = &p.y - &q.y;
    &dx * &dx + &dy * &dy
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point3(pub [Rational; 3]);

impl Point3 {
    pub fn new(x1: Rational, x2: Rational, x3: Rational) -> Self {
        Point3([x1, x2, x3])
    }

    pub fn from_ints(x1: i64, x2: i64, x3: i64) -> Self {
        Point3::new(rational::int(x1), rational::int(x2), rational::int(x3))
    }

    pub fn origin() -> Self {
        Point3::from_ints(0, 0, 0)
    }

    pub fn x1(&self) -> &Rational {
        &self.0[0]
    }

    pub fn x2(&self) -> &Rational {
        &self.0[1]
    }

    pub fn x3(&self) -> &Rational {
        &self.0[2]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn add(&self, o: &Point3) -> Point3 {
        Point3([&self.0[0] + &o.0[0], &self.0[1] + &o.0[1], &self.0[2] + &o.0[2]])
    }

    pub fn sub(&self, o: &Point3) -> Point3 {
        Point3([&self.0[0] - &o.0[0], &self.0[1] - &o.0[1], &self.0[2] - &o.0[2]])
    }

    pub fn scale(&self, s: &Rational) -> Point3 {
        Point3([&self.0[0] * s, &self.0[1] * s, &self.0[2] * s])
    }

    pub fn dot(&self, o: &Point3) -> Rational {
        &self.0[0] * &o.0[0] + &self.0[1] * &o.0[1] + &self.0[2] * &o.0[2]
    }

    pub fn cross(&self, o: &Point3) -> Point3 {
        let [a1, a2, a3] = &self.0;
        let [b1, b2, b3] = &o.0;
        Point3([a2 * b3 - a3 * b2, a3 * b1 - a1 * b3, a1 * b2 - a2 * b1])
    }

    pub fn to_f64(&self) -> [f64; 3] {
        [
            rational::to_f64(&self.0[0]),
            rational::to_f64(&self.0[1]),
            rational::to_f64(&self.0[2]),
        ]
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Clone, Debug)]
pub struct Line3 {
    base: Point3,
    dir: Point3,
    plucker: [Rational; 6],
}

impl PartialEq for Line3 {
    fn eq(&self, other: &Self) -> bool {
        self.dir == other.dir && self.base == other.base
    }
}

impl Eq for Line3 {}

impl std::hash::Hash for Line3 {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.dir.hash(state);
        self.base.hash(state);
    }
}

impl PartialOrd for Line3 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Line3 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.dir, &self.base).cmp(&(&other.dir, &other.base))
    }
}

impl fmt::Display for Line3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + t{}", self.base, self.dir)
    }
}

/// Builds the canonical representative of the line `base + t * dir`.
pub fn canonicalize(base: Point3, dir: Point3) -> Result<Line3> {
    let k = dir
        .0
        .iter()
        .position(|c| !c.is_zero())
        .ok_or(Error::ZeroDirection)?;
    let dir = if dir.0[k].is_one() {
        dir
    } else {
        let inv = dir.0[k].recip();
        dir.scale(&inv)
    };
    let base = if base.0[k].is_zero() {
        base
    } else {
        base.sub(&dir.scale(&base.0[k]))
    };
    let moment = base.cross(&dir);
    let [d1, d2, d3] = dir.0.clone();
    let [m1, m2, m3] = moment.0;
    Ok(Line3 {
        base,
        dir,
        plucker: [d1, d2, d3, m1, m2, m3],
    })
}

impl Line3 {
    pub fn new(base: Point3, dir: Point3) -> Result<Line3> {
        canonicalize(base, dir)
    }

    /// Line through two distinct points.
    pub fn through(p: &Point3, q: &Point3) -> Result<Line3> {
        canonicalize(p.clone(), q.sub(p))
    }

    pub fn base(&self) -> &Point3 {
        &self.base
    }

    pub fn dir(&self) -> &Point3 {
        &self.dir
    }

    /// Plücker coordinates `(d, m)` with `m = base x d`.
    pub fn plucker(&self) -> &[Rational; 6] {
        &self.plucker
    }

    pub fn point_at(&self, t: &Rational) -> Point3 {
        self.base.add(&self.dir.scale(t))
    }

    pub fn contains(&self, p: &Point3) -> bool {
        p.sub(&self.base).cross(&self.dir).is_zero()
    }
}

/// `d . m` for the stored coordinates; zero for every valid line.
pub fn grassmann_plucker(l: &Line3) -> Rational {
    let p = &l.plucker;
    &p[0] * &p[3] + &p[1] * &p[4] + &p[2] * &p[5]
}

/// Reciprocal product `d_a . m_b + d_b . m_a`; zero iff the lines are coplanar.
pub fn plucker_side(a: &Line3, b: &Line3) -> Rational {
    let (p, q) = (&a.plucker, &b.plucker);
    &p[0] * &q[3] + &p[1] * &q[4] + &p[2] * &q[5] + &q[0] * &p[3] + &q[1] * &p[4] + &q[2] * &p[5]
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PairClass {
    Equal,
    Parallel,
    Intersecting(Point3),
    Skew,
}

impl PairClass {
    pub fn is_skew(&self) -> bool {
        matches!(self, PairClass::Skew)
    }

    pub fn name(&self) -> &'static str {
        match self {
            PairClass::Equal => "equal",
            PairClass::Parallel => "parallel",
            PairClass::Intersecting(_) => "intersecting",
            PairClass::Skew => "skew",
        }
    }
}

pub fn classify_pair(a: &Line3, b: &Line3) -> PairClass {
    let n = a.dir.cross(&b.dir);
    let w = b.base.sub(&a.base);
    if n.is_zero() {
        if w.cross(&a.dir).is_zero() {
            PairClass::Equal
        } else {
            PairClass::Parallel
        }
    } else if !w.dot(&n).is_zero() {
        PairClass::Skew
    } else {
        let s = w.cross(&b.dir).dot(&n) / n.dot(&n);
        PairClass::Intersecting(a.point_at(&s))
    }
}
