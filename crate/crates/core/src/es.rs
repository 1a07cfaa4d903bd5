//! The line family of a planar point set and the distance-quadruple census.
//!
//! For `p1 = (x1, y1)` and `p2 = (x2, y2)` the line `l(p1, p2)` is
//!
//! ```text
//! 2x = (x1 + x2) + (y1 - y2) z
//! 2y = (y1 + y2) + (x2 - x1) z
//! ```
//!
//! Two lines `l(p1, p3)` and `l(p2, p4)` meet or are parallel exactly when
//! `|p1 - p2| = |p3 - p4|`, which turns distance counting into an incidence
//! problem for lines in space.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{classify_pair, dist_sq, Line3, PairClass, Point2, Point3};
use crate::incidence::{compute_rich_points, RichPointMap};
use crate::poly::TriPoly;
use crate::rational::{self, Rational};

/// Default limit for the `O(N^4)` census.
pub const BRUTE_FORCE_CAP: usize = 40;

/// A finite set of distinct points in the plane.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarConfig {
    points: Vec<Point2>,
}

impl PlanarConfig {
    pub fn new(points: Vec<Point2>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInstance("a planar configuration needs at least one point".into()));
        }
        let mut seen = BTreeSet::new();
        for p in &points {
            if !seen.insert(p) {
                return Err(Error::InvalidInstance(format!("repeated point {p}")));
            }
        }
        Ok(PlanarConfig { points })
    }

    pub fn from_ints(points: &[(i64, i64)]) -> Result<Self> {
        PlanarConfig::new(points.iter().map(|&(x, y)| Point2::from_ints(x, y)).collect())
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ESLine {
    pub line: Line3,
    pub source: (Point2, Point2),
}

/// `l(p1, p2)`: base `((x1+x2)/2, (y1+y2)/2, 0)`, direction `(y1-y2, x2-x1, 2)`.
pub fn es_line(p1: &Point2, p2: &Point2) -> Line3 {
    let half = rational::rat(1, 2);
    let base = Point3::new((&p1.x + &p2.x) * &half, (&p1.y + &p2.y) * &half, Rational::zero());
    let dir = Point3::new(&p1.y - &p2.y, &p2.x - &p1.x, rational::int(2));
    Line3::new(base, dir).expect("third direction coordinate is 2")
}

/// Recovers the ordered pair a line was built from. Every line that is not
/// horizontal (`dir.x3 != 0`) is `l(p1, p2)` for exactly one pair.
pub fn es_source(l: &Line3) -> Option<(Point2, Point2)> {
    let d = l.dir();
    if d.x3().is_zero() {
        return None;
    }
    let b = l.base();
    let t = -(b.x3() / d.x3());
    let at0 = l.point_at(&t);
    let two = rational::int(2);
    let ax = at0.x1() * &two;
    let ay = at0.x2() * &two;
    let bx = d.x1() / d.x3() * &two;
    let by = d.x2() / d.x3() * &two;
    let half = rational::rat(1, 2);
    let p1 = Point2::new((&ax - &by) * &half, (&ay + &bx) * &half);
    let p2 = Point2::new((&ax + &by) * &half, (&ay - &bx) * &half);
    Some((p1, p2))
}

/// All `N^2` lines, ordered by `(i, j)` with index `i * N + j`.
pub fn build_line_family(p: &PlanarConfig) -> Vec<ESLine> {
    let pts = p.points();
    pts.iter()
        .flat_map(|a| {
            pts.iter().map(move |b| ESLine {
                line: es_line(a, b),
                source: (a.clone(), b.clone()),
            })
        })
        .collect()
}

pub fn family_lines(p: &PlanarConfig) -> Vec<Line3> {
    build_line_family(p).into_iter().map(|e| e.line).collect()
}

pub fn is_distance_quadruple(p1: &Point2, p2: &Point2, p3: &Point2, p4: &Point2) -> bool {
    let d = dist_sq(p1, p2);
    !d.is_zero() && d == dist_sq(p3, p4)
}

/// `(a_x - a'_x)(b_y - b'_y) - (a_y - a'_y)(b_x - b'_x)` for the lines
/// `l(p1, p3)` and `l(p2, p4)` written as `2x = a_x + b_x z, 2y = a_y + b_y z`.
pub fn incidence_determinant(p1: &Point2, p2: &Point2, p3: &Point2, p4: &Point2) -> Rational {
    let ax = &p1.x + &p3.x;
    let ay = &p1.y + &p3.y;
    let bx = &p1.y - &p3.y;
    let by = &p3.x - &p1.x;
    let ax_ = &p2.x + &p4.x;
    let ay_ = &p2.y + &p4.y;
    let bx_ = &p2.y - &p4.y;
    let by_ = &p4.x - &p2.x;
    (ax - ax_) * (by - by_) - (ay - ay_) * (bx - bx_)
}

/// The determinant test for a distance quadruple. The determinant alone is
/// also zero when `p1 = p2` and `p3 = p4`, so that case is excluded here.
pub fn quadinter_check(p1: &Point2, p2: &Point2, p3: &Point2, p4: &Point2) -> bool {
    incidence_determinant(p1, p2, p3, p4).is_zero() && p1 != p2
}

/// Classification of `l(p1, p3)` against `l(p2, p4)`.
pub fn quadruple_lines(p1: &Point2, p2: &Point2, p3: &Point2, p4: &Point2) -> PairClass {
    classify_pair(&es_line(p1, p3), &es_line(p2, p4))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub tuples: u64,
    pub quadruples: u64,
    /// Tuples with `p1 = p2` and `p3 = p4`, left out of the classifier
    /// comparison. Their two lines coincide.
    pub excluded: u64,
    /// Tuples where distance test and determinant test differ.
    pub determinant_disagreements: u64,
    /// Non-excluded tuples where the distance test and "not skew" differ.
    pub classifier_disagreements: u64,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        self.determinant_disagreements == 0 && self.classifier_disagreements == 0
    }
}

/// Runs the three quadruple tests on all `N^4` ordered tuples.
pub fn quadruple_equivalence(p: &PlanarConfig) -> EquivalenceReport {
    let pts = p.points();
    let lines: Vec<Vec<Line3>> = pts.iter().map(|a| pts.iter().map(|b| es_line(a, b)).collect()).collect();
    (0..pts.len())
        .into_par_iter()
        .map(|i1| {
            let mut rep = EquivalenceReport::default();
            for i2 in 0..pts.len() {
                for i3 in 0..pts.len() {
                    for i4 in 0..pts.len() {
                        let (a, b, c, d) = (&pts[i1], &pts[i2], &pts[i3], &pts[i4]);
                        let dq = is_distance_quadruple(a, b, c, d);
                        rep.tuples += 1;
                        rep.quadruples += dq as u64;
                        rep.determinant_disagreements += (dq != quadinter_check(a, b, c, d)) as u64;
                        if i1 == i2 && i3 == i4 {
                            rep.excluded += 1;
                            continue;
                        }
                        let meets = !classify_pair(&lines[i1][i3], &lines[i2][i4]).is_skew();
                        rep.classifier_disagreements += (dq != meets) as u64;
                    }
                }
            }
            rep
        })
        .reduce(EquivalenceReport::default, |a, b| EquivalenceReport {
            tuples: a.tuples + b.tuples,
            quadruples: a.quadruples + b.quadruples,
            excluded: a.excluded + b.excluded,
            determinant_disagreements: a.determinant_disagreements + b.determinant_disagreements,
            classifier_disagreements: a.classifier_disagreements + b.classifier_disagreements,
        })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadrupleCensus {
    pub n: usize,
    pub total: u64,
    pub parallel: u64,
    pub intersecting: u64,
}

pub fn quadruple_census_bruteforce(p: &PlanarConfig) -> Result<QuadrupleCensus> {
    quadruple_census_bruteforce_capped(p, BRUTE_FORCE_CAP)
}

pub fn quadruple_census_bruteforce_capped(p: &PlanarConfig, cap: usize) -> Result<QuadrupleCensus> {
    let n = p.len();
    if n > cap {
        return Err(Error::CensusCapExceeded { n, cap });
    }
    let pts = p.points();
    let dist: Vec<Vec<Rational>> = pts.iter().map(|a| pts.iter().map(|b| dist_sq(a, b)).collect()).collect();
    let diff: Vec<Vec<Point2>> = pts.iter().map(|a| pts.iter().map(|b| a.sub(b)).collect()).collect();
    let (total, parallel) = (0..n)
        .into_par_iter()
        .map(|i1| {
            let mut total = 0u64;
            let mut parallel = 0u64;
            for i2 in 0..n {
                if i1 == i2 {
                    continue;
                }
                for i3 in 0..n {
                    for i4 in 0..n {
                        if dist[i1][i2] == dist[i3][i4] {
                            total += 1;
                            if diff[i1][i2] == diff[i3][i4] {
                                parallel += 1;
                            }
                        }
                    }
                }
            }
            (total, parallel)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(QuadrupleCensus {
        n,
        total,
        parallel,
        intersecting: total - parallel,
    })
}

/// `sum over v != 0 of m_v^2`, where `m_v` counts ordered pairs with difference `v`.
pub fn parallel_quadruples(p: &PlanarConfig) -> u64 {
    let mut m: HashMap<Point2, u64> = HashMap::new();
    for a in p.points() {
        for b in p.points() {
            if a != b {
                *m.entry(a.sub(b)).or_insert(0) += 1;
            }
        }
    }
    m.values().map(|k| k * k).sum()
}

/// `sum over r >= 2 of (2r - 2) |P_r|`.
pub fn intersecting_from_rich_points(map: &RichPointMap) -> u64 {
    map.cumulative().iter().map(|(&r, &c)| (2 * r as u64 - 2) * c).sum()
}

pub fn quadruple_census_via_rich_points(p: &PlanarConfig) -> Result<QuadrupleCensus> {
    let map = compute_rich_points(&family_lines(p))?;
    Ok(census_from_map(p, &map))
}

pub fn census_from_map(p: &PlanarConfig, map: &RichPointMap) -> QuadrupleCensus {
    let intersecting = intersecting_from_rich_points(map);
    let parallel = parallel_quadruples(p);
    QuadrupleCensus {
        n: p.len(),
        total: intersecting + parallel,
        parallel,
        intersecting,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinctDistanceReport {
    pub n: usize,
    pub distinct: usize,
    pub quadruples: u64,
    /// `(N^4 - 2N^3) / |Q|`
    pub bound: Rational,
    pub holds: bool,
}

pub fn distinct_distances(p: &PlanarConfig) -> usize {
    let pts = p.points();
    let mut set = BTreeSet::new();
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            set.insert(dist_sq(a, b));
        }
    }
    set.len()
}

pub fn dd_lower_bound(p: &PlanarConfig) -> Result<DistinctDistanceReport> {
    let census = quadruple_census_via_rich_points(p)?;
    dd_bound_from_census(p, &census)
}

pub fn dd_bound_from_census(p: &PlanarConfig, census: &QuadrupleCensus) -> Result<DistinctDistanceReport> {
    let n = p.len();
    if n < 3 {
        return Err(Error::TooFewPoints { got: n, min: 3 });
    }
    let ni = n as i64;
    let num = ni.pow(4) - 2 * ni.pow(3);
    let bound = rational::rat(num, census.total as i64);
    let distinct = distinct_distances(p);
    Ok(DistinctDistanceReport {
        n,
        distinct,
        quadruples: census.total,
        holds: rational::int(distinct as i64) >= bound,
        bound,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorFieldValue {
    pub v1: Rational,
    pub v2: Rational,
    pub v3: Rational,
}

impl VectorFieldValue {
    pub fn as_point(&self) -> Point3 {
        Point3::new(self.v1.clone(), self.v2.clone(), self.v3.clone())
    }
}

/// `(b1, b2)` with `q = b / (x3^2 + 1)` the unique `q` such that `x` lies on `l(p, q)`.
fn b_vector(p: &Point2, x: &Point3) -> (Rational, Rational) {
    let two = rational::int(2);
    let a1 = x.x1() * &two - &p.x - x.x3() * &p.y;
    let a2 = x.x2() * &two - &p.y + &p.x * x.x3();
    let b1 = &a1 + x.x3() * &a2;
    let b2 = &a2 - x.x3() * &a1;
    (b1, b2)
}

pub fn vector_field_vp(p: &Point2, x: &Point3) -> VectorFieldValue {
    let (b1, b2) = b_vector(p, x);
    let s = x.x3() * x.x3() + Rational::one();
    VectorFieldValue {
        v1: &p.y * &s - b2,
        v2: b1 - &p.x * &s,
        v3: &s * rational::int(2),
    }
}

/// The components of `V_p` as polynomials in `x`.
pub fn vp_polynomials(p: &Point2) -> [TriPoly; 3] {
    let x1 = TriPoly::var(0);
    let x2 = TriPoly::var(1);
    let x3 = TriPoly::var(2);
    let c = |q: &Rational| TriPoly::constant(q.clone());
    let two = rational::int(2);
    let a1 = x1.scale(&two).sub(&c(&p.x)).sub(&x3.scale(&p.y));
    let a2 = x2.scale(&two).sub(&c(&p.y)).add(&x3.scale(&p.x));
    let b1 = a1.add(&x3.mul(&a2));
    let b2 = a2.sub(&x3.mul(&a1));
    let s = x3.mul(&x3).add(&TriPoly::constant(Rational::one()));
    [s.scale(&p.y).sub(&b2), b1.sub(&s.scale(&p.x)), s.scale(&two)]
}

/// The unique `q` with `x` on `l(p, q)`, and that line.
pub fn line_through_point(p: &Point2, x: &Point3) -> (Point2, Line3) {
    let (b1, b2) = b_vector(p, x);
    let s = x.x3() * x.x3() + Rational::one();
    let q = Point2::new(b1 / &s, b2 / &s);
    let line = es_line(p, &q);
    debug_assert!(line.contains(x));
    (q, line)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VpSuiteReport {
    pub samples: usize,
    /// `V_p(x)` not parallel to the direction of `l(p, q)`.
    pub tangency_failures: usize,
    pub third_component_zero: usize,
    /// [`line_through_point`] did not give back `q` and the line.
    pub round_trip_failures: usize,
}

impl VpSuiteReport {
    pub fn holds(&self) -> bool {
        self.tangency_failures == 0 && self.third_component_zero == 0 && self.round_trip_failures == 0
    }
}

/// Checks `V_p` at `x = l(p, q)(t)` for random `p, q, t` with coordinates
/// `k/64` in `[-4, 4]`.
pub fn vp_suite(samples: usize, seed: u64) -> VpSuiteReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || rational::rat(rng.gen_range(-256..=256), 64);
    let mut rep = VpSuiteReport {
        samples,
        ..Default::default()
    };
    for _ in 0..samples {
        let p = Point2::new(draw(), draw());
        let q = Point2::new(draw(), draw());
        let t = draw();
        let line = es_line(&p, &q);
        let x = line.point_at(&t);
        let v = vector_field_vp(&p, &x);
        rep.tangency_failures += !is_parallel(&v.as_point(), line.dir()) as usize;
        rep.third_component_zero += v.v3.is_zero() as usize;
        let (q2, l2) = line_through_point(&p, &x);
        rep.round_trip_failures += (q2 != q || l2 != line) as usize;
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionalLine {
    pub q: Point2,
    pub in_zero_set: bool,
    /// `V_p . grad Q` restricted to the line is identically zero.
    pub w_vanishes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionalReport {
    pub w: TriPoly,
    pub lines: Vec<DirectionalLine>,
    /// Every line of the list lying in `Z(Q)` has `w_vanishes`.
    pub holds: bool,
    pub q_divides_w: Option<bool>,
}

/// Forms `W = V_p . grad Q` and checks it on the lines `l(p, q)` for the
/// given `q` that lie in `Z(Q)`.
pub fn directional_vanishing_check(
    p: &Point2,
    q_poly: &TriPoly,
    qs: &[Point2],
    test_divisibility: bool,
) -> Result<DirectionalReport> {
    if q_poly.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let v = vp_polynomials(p);
    let (g1, g2, g3) = q_poly.gradient();
    let w = v[0].mul(&g1).add(&v[1].mul(&g2)).add(&v[2].mul(&g3));
    let mut lines = Vec::new();
    for q in qs {
        let l = es_line(p, q);
        let in_zero_set = q_poly.line_in_zero_set(&l)?;
        let w_vanishes = w.is_zero() || w.restrict_to_line(&l).is_zero();
        lines.push(DirectionalLine {
            q: q.clone(),
            in_zero_set,
            w_vanishes,
        });
    }
    let holds = lines.iter().all(|d| !d.in_zero_set || d.w_vanishes);
    let q_divides_w = test_divisibility.then(|| q_poly.divides(&w));
    Ok(DirectionalReport {
        w,
        lines,
        holds,
        q_divides_w,
    })
}

/// Largest number of family lines through one point, and whether it is `<= N`.
pub fn point_clustering(p: &PlanarConfig, map: &RichPointMap) -> (usize, bool) {
    let m = map.max_multiplicity();
    (m, m <= p.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonClusteringReport {
    pub n: usize,
    pub lines: usize,
    /// Most family lines in one plane (exhaustive over coplanar pairs).
    pub max_in_plane: usize,
    pub max_through_point: usize,
    /// Pairs `l(p, q), l(p, q')` with `q != q'`, over all `p`.
    pub same_source_pairs: u64,
    pub same_source_not_skew: u64,
}

impl NonClusteringReport {
    pub fn holds(&self) -> bool {
        self.max_in_plane <= self.n && self.max_through_point <= self.n && self.same_source_not_skew == 0
    }
}

/// Plane, point and same-source checks on the line family.
pub fn non_clustering(p: &PlanarConfig) -> Result<NonClusteringReport> {
    let pts = p.points();
    let n = pts.len();
    let lines = family_lines(p);
    let map = compute_rich_points(&lines)?;
    let max_in_plane = crate::surfaces::max_coplanar(&lines).map_or(lines.len().min(1), |(k, _)| k);
    let (same_source_pairs, same_source_not_skew) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut pairs = 0u64;
            let mut bad = 0u64;
            for j in 0..n {
                for k in j + 1..n {
                    pairs += 1;
                    bad += !classify_pair(&lines[i * n + j], &lines[i * n + k]).is_skew() as u64;
                }
            }
            (pairs, bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(NonClusteringReport {
        n,
        lines: lines.len(),
        max_in_plane,
        max_through_point: map.max_multiplicity(),
        same_source_pairs,
        same_source_not_skew,
    })
}

/// Tolerance-free check that two vectors are parallel.
pub fn is_parallel(a: &Point3, b: &Point3) -> bool {
    a.cross(b).is_zero()
}

/// `true` if a scalar `c > 0` has `a = c b`.
pub fn is_positive_multiple(a: &Point3, b: &Point3) -> bool {
    if !is_parallel(a, b) {
        return false;
    }
    a.0.iter().zip(&b.0).all(|(x, y)| x.is_zero() == y.is_zero() && (x.is_zero() || (x / y).is_positive()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn pt(x: i64, y: i64) -> Point2 {
        Point2::from_ints(x, y)
    }

    fn unit_square() -> PlanarConfig {
        PlanarConfig::from_ints(&[(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap()
    }

    #[test]
    fn single_point_gives_the_vertical_axis() {
        let fam = build_line_family(&PlanarConfig::from_ints(&[(0, 0)]).unwrap());
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].line.base(), &Point3::origin());
        assert_eq!(fam[0].line.dir(), &Point3::from_ints(0, 0, 1));
    }

    #[test]
    fn two_point_family_line() {
        let l = es_line(&pt(0, 0), &pt(1, 0));
        assert_eq!(l.base(), &Point3::new(rat(1, 2), int(0), int(0)));
        assert_eq!(l.dir(), &Point3::from_ints(0, 1, 2));
        assert_eq!(es_source(&l), Some((pt(0, 0), pt(1, 0))));
    }

    #[test]
    fn rejects_repeats_and_empty() {
        assert!(PlanarConfig::from_ints(&[(0, 0), (0, 0)]).is_err());
        assert!(PlanarConfig::new(Vec::new()).is_err());
    }

    #[test]
    fn distance_quadruple_examples() {
        assert!(is_distance_quadruple(&pt(0, 0), &pt(1, 0), &pt(0, 1), &pt(1, 1)));
        assert!(!is_distance_quadruple(&pt(0, 0), &pt(0, 0), &pt(0, 1), &pt(1, 1)));
        assert!(!is_distance_quadruple(&pt(0, 0), &pt(2, 0), &pt(1, 1), &pt(0, 0)));
    }

    #[test]
    fn quadinter_examples() {
        let (p1, p3, p2, p4) = (pt(0, 0), pt(1, 0), pt(1, 0), pt(0, 0));
        assert!(quadinter_check(&p1, &p2, &p3, &p4));
        assert_eq!(
            quadruple_lines(&p1, &p2, &p3, &p4),
            PairClass::Intersecting(Point3::new(rat(1, 2), int(0), int(0)))
        );

        let (p1, p2, p3, p4) = (pt(0, 0), pt(1, 0), pt(0, 1), pt(1, 1));
        assert!(quadinter_check(&p1, &p2, &p3, &p4));
        assert_eq!(quadruple_lines(&p1, &p2, &p3, &p4), PairClass::Parallel);
        assert_eq!(es_line(&p1, &p3).dir(), &Point3::new(int(1), int(0), int(-2)));

        let (p1, p2, p3, p4) = (pt(0, 0), pt(3, 0), pt(0, 0), pt(1, 0));
        assert!(!quadinter_check(&p1, &p2, &p3, &p4));
        assert_eq!(quadruple_lines(&p1, &p2, &p3, &p4), PairClass::Skew);
    }

    #[test]
    fn degenerate_determinant_is_not_a_quadruple() {
        let (a, b) = (pt(0, 0), pt(2, 1));
        assert!(incidence_determinant(&a, &a, &b, &b).is_zero());
        assert!(!quadinter_check(&a, &a, &b, &b));
        assert_eq!(quadruple_lines(&a, &a, &b, &b), PairClass::Equal);
    }

    #[test]
    fn equivalence_on_the_unit_square() {
        let p = PlanarConfig::from_ints(&[(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap();
        let rep = quadruple_equivalence(&p);
        assert_eq!(rep.tuples, 256);
        assert_eq!(rep.quadruples, 80);
        assert_eq!(rep.excluded, 16);
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn unit_square_census() {
        let p = unit_square();
        let bf = quadruple_census_bruteforce(&p).unwrap();
        assert_eq!((bf.total, bf.parallel, bf.intersecting), (80, 20, 60));
        assert_eq!(quadruple_census_via_rich_points(&p).unwrap(), bf);
    }

    #[test]
    fn small_censuses() {
        let p = PlanarConfig::from_ints(&[(0, 0), (1, 0), (2, 0)]).unwrap();
        assert_eq!(quadruple_census_bruteforce(&p).unwrap().total, 20);
        assert_eq!(quadruple_census_via_rich_points(&p).unwrap().total, 20);
        let p = PlanarConfig::from_ints(&[(0, 0)]).unwrap();
        assert_eq!(quadruple_census_bruteforce(&p).unwrap().total, 0);
        let p = PlanarConfig::from_ints(&[(0, 0), (1, 0)]).unwrap();
        assert_eq!(quadruple_census_bruteforce(&p).unwrap().total, 4);
        assert_eq!(quadruple_census_via_rich_points(&p).unwrap().total, 4);
    }

    #[test]
    fn cap_is_enforced() {
        let pts: Vec<(i64, i64)> = (0..5).map(|i| (i, 0)).collect();
        let p = PlanarConfig::from_ints(&pts).unwrap();
        assert_eq!(
            quadruple_census_bruteforce_capped(&p, 4),
            Err(Error::CensusCapExceeded { n: 5, cap: 4 })
        );
    }

    #[test]
    fn distinct_distance_bounds() {
        let r = dd_lower_bound(&unit_square()).unwrap();
        assert_eq!(r.distinct, 2);
        assert_eq!(r.bound, rat(8, 5));
        assert!(r.holds);
        let grid: Vec<(i64, i64)> = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).collect();
        assert_eq!(distinct_distances(&PlanarConfig::from_ints(&grid).unwrap()), 5);
        let line: Vec<(i64, i64)> = (0..7).map(|i| (i, 0)).collect();
        assert_eq!(distinct_distances(&PlanarConfig::from_ints(&line).unwrap()), 6);
        assert!(matches!(
            dd_lower_bound(&PlanarConfig::from_ints(&[(0, 0), (1, 0)]).unwrap()),
            Err(Error::TooFewPoints { .. })
        ));
    }

    #[test]
    fn vector_field_examples() {
        let v = vector_field_vp(&pt(0, 0), &Point3::new(rat(1, 2), int(0), int(0)));
        assert_eq!(v.as_point(), Point3::from_ints(0, 1, 2));
        let v = vector_field_vp(&pt(0, 0), &Point3::new(rat(1, 2), int(1), int(2)));
        assert_eq!(v.as_point(), Point3::from_ints(0, 5, 10));
        let x = Point3::new(rat(3, 7), int(-2), rat(5, 3));
        let v = vector_field_vp(&pt(2, -1), &x);
        assert!(v.v3.is_positive());
        let sym = vp_polynomials(&pt(2, -1));
        assert_eq!([sym[0].eval(&x), sym[1].eval(&x), sym[2].eval(&x)], [v.v1, v.v2, v.v3]);
    }

    #[test]
    fn vp_suite_small() {
        let rep = vp_suite(50, 1);
        assert_eq!(rep.samples, 50);
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn non_clustering_on_the_grid() {
        let p = PlanarConfig::from_ints(&[(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1), (0, 2), (1, 2), (2, 2)]).unwrap();
        let rep = non_clustering(&p).unwrap();
        assert_eq!(rep.lines, 81);
        assert_eq!(rep.same_source_pairs, 9 * 36);
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn line_through_point_examples() {
        let (q, l) = line_through_point(&pt(0, 0), &Point3::new(rat(1, 2), int(0), int(0)));
        assert_eq!(q, pt(1, 0));
        let (q2, l2) = line_through_point(&pt(0, 0), &Point3::new(rat(1, 2), int(1), int(2)));
        assert_eq!(q2, pt(1, 0));
        assert_eq!(l, l2);
        let (p, q) = (Point2::new(rat(1, 3), int(2)), Point2::new(int(-4), rat(5, 2)));
        let x = es_line(&p, &q).point_at(&rat(7, 5));
        assert_eq!(line_through_point(&p, &x).0, q);
    }

    #[test]
    fn directional_vanishing_on_a_plane() {
        let p = pt(0, 0);
        let q = pt(1, 0);
        // l(p, q): x1 = 1/2, and 2 x2 = x3; take the plane x1 = 1/2.
        let plane = TriPoly::linear([int(2), int(0), int(0)], int(-1));
        let rep = directional_vanishing_check(&p, &plane, &[q.clone(), pt(3, 3)], false).unwrap();
        assert!(rep.lines[0].in_zero_set && rep.lines[0].w_vanishes);
        assert!(!rep.lines[1].in_zero_set);
        assert!(rep.holds);
        let empty = directional_vanishing_check(&p, &plane, &[], true).unwrap();
        assert!(empty.lines.is_empty() && empty.holds);
    }

    #[test]
    fn directional_vanishing_on_a_ruling() {
        // A point on x1 x2 = x3 and its ruling through that point with
        // direction (1, 0, x2); pick p so that l(p, q) is the ruling.
        let regulus = TriPoly::from_int_terms(&[(1, 1, 0, 1), (0, 0, 1, -1)]);
        // Ruling through (0, 1, 0) with direction (1, 0, 1): points (t, 1, t).
        // l(p, q) has direction (p.y - q.y, q.x - p.x, 2), so p.y - q.y = 2 and q.x = p.x;
        // at z = 0 it passes (0, 1): p.x + q.x = 0 and p.y + q.y = 2.
        let (p, q) = (pt(0, 2), pt(0, 0));
        let l = es_line(&p, &q);
        assert!(regulus.line_in_zero_set(&l).unwrap());
        let rep = directional_vanishing_check(&p, &regulus, &[q], false).unwrap();
        assert!(rep.lines[0].in_zero_set && rep.lines[0].w_vanishes);
    }
}
