//! The rich-point engine: exact `P_r` for arbitrary line families.
//!
//! Every pair of lines is classified; intersecting pairs are grouped by their
//! exact intersection point, so a point where `k` lines meet is recorded once
//! with the `k` line indices. Pairs are processed in parallel blocks and the
//! per-block maps are merged by exact key, which makes the result independent
//! of thread scheduling.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{classify_pair, Line3, PairClass, Point3};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairStats {
    pub intersecting: u64,
    pub parallel: u64,
    pub skew: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RichPointMap {
    /// Points on at least two lines, with the sorted indices of those lines.
    entries: BTreeMap<Point3, Vec<u32>>,
    total_lines: usize,
    pairs: PairStats,
}

impl RichPointMap {
    pub fn total_lines(&self) -> usize {
        self.total_lines
    }

    pub fn pair_stats(&self) -> &PairStats {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn multiplicity(&self, x: &Point3) -> usize {
        self.entries.get(x).map_or(0, Vec::len)
    }

    pub fn lines_through(&self, x: &Point3) -> &[u32] {
        self.entries.get(x).map_or(&[], Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point3, usize)> {
        self.entries.iter().map(|(p, ls)| (p, ls.len()))
    }

    pub fn entries(&self) -> &BTreeMap<Point3, Vec<u32>> {
        &self.entries
    }

    pub fn max_multiplicity(&self) -> usize {
        self.entries.values().map(Vec::len).max().unwrap_or(0)
    }

    /// `r -> |P_{=r}|`
    pub fn histogram(&self) -> BTreeMap<usize, u64> {
        let mut h = BTreeMap::new();
        for ls in self.entries.values() {
            *h.entry(ls.len()).or_insert(0) += 1;
        }
        h
    }

    /// `r -> |P_r|` for every `r` from 2 to the maximum multiplicity.
    pub fn cumulative(&self) -> BTreeMap<usize, u64> {
        let h = self.histogram();
        let max = self.max_multiplicity();
        let mut out = BTreeMap::new();
        let mut acc = 0;
        for r in (2..=max).rev() {
            acc += h.get(&r).copied().unwrap_or(0);
            out.insert(r, acc);
        }
        out
    }

    pub fn count_rich(&self, r: usize) -> u64 {
        self.entries.values().filter(|ls| ls.len() >= r).count() as u64
    }
}

/// Integer form of a line: `base = num / den`, integer direction, and
/// integer Plücker coordinates scaled by `den`.
#[derive(Clone, Debug)]
struct IntLine {
    num: [BigInt; 3],
    den: BigInt,
    dir: [BigInt; 3],
    small: Option<([i64; 3], [i64; 3])>,
}

fn int_line(l: &Line3) -> IntLine {
    let dden = rational::common_denominator(l.dir().0.iter());
    let dir: [BigInt; 3] =
        std::array::from_fn(|i| (&l.dir().0[i] * Rational::from_integer(dden.clone())).to_integer());
    let den = rational::common_denominator(l.base().0.iter());
    let num: [BigInt; 3] =
        std::array::from_fn(|i| (&l.base().0[i] * Rational::from_integer(den.clone())).to_integer());
    // m = base x dir, scaled by den
    let m = [
        &num[1] * &dir[2] - &num[2] * &dir[1],
        &num[2] * &dir[0] - &num[0] * &dir[2],
        &num[0] * &dir[1] - &num[1] * &dir[0],
    ];
    let d_small: Option<Vec<i64>> = dir
        .iter()
        .map(|x| x.to_i64().filter(|v| v.abs() < (1 << 31)))
        .collect();
    let m_small: Option<Vec<i64>> = m
        .iter()
        .map(|x| x.to_i64().filter(|v| v.abs() < (1i64 << 62)))
        .collect();
    // num x dir is den * (base x dir), so d is scaled by den to match.
    let small = match (d_small, m_small, den.to_i64()) {
        (Some(d), Some(m), Some(dn)) if dn.abs() < (1 << 31) => {
            let d = [d[0] * dn, d[1] * dn, d[2] * dn];
            Some((d, [m[0], m[1], m[2]]))
        }
        _ => None,
    };
    IntLine { num, den, dir, small }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FastClass {
    Parallel,
    Coplanar,
    Skew,
}

fn fast_class(a: &([i64; 3], [i64; 3]), b: &([i64; 3], [i64; 3])) -> FastClass {
    let (da, ma) = a;
    let (db, mb) = b;
    let w = |x: i64| x as i128;
    let n = [
        w(da[1]) * w(db[2]) - w(da[2]) * w(db[1]),
        w(da[2]) * w(db[0]) - w(da[0]) * w(db[2]),
        w(da[0]) * w(db[1]) - w(da[1]) * w(db[0]),
    ];
    if n == [0, 0, 0] {
        return FastClass::Parallel;
    }
    let side = (0..3).fold(0i128, |acc, i| acc + w(da[i]) * w(mb[i]) + w(db[i]) * w(ma[i]));
    if side == 0 {
        FastClass::Coplanar
    } else {
        FastClass::Skew
    }
}

/// Intersection of two coplanar, non-parallel lines in integer form.
fn int_intersection(a: &IntLine, b: &IntLine) -> Point3 {
    let cross = |u: &[BigInt; 3], v: &[BigInt; 3]| -> [BigInt; 3] {
        [
            &u[1] * &v[2] - &u[2] * &v[1],
            &u[2] * &v[0] - &u[0] * &v[2],
            &u[0] * &v[1] - &u[1] * &v[0],
        ]
    };
    let dot = |u: &[BigInt; 3], v: &[BigInt; 3]| -> BigInt { &u[0] * &v[0] + &u[1] * &v[1] + &u[2] * &v[2] };
    let n = cross(&a.dir, &b.dir);
    let nn = dot(&n, &n);
    let wv: [BigInt; 3] = std::array::from_fn(|i| &a.den * &b.num[i] - &b.den * &a.num[i]);
    let s_num = dot(&cross(&wv, &b.dir), &n);
    let den = &a.den * &b.den * &nn;
    let coords: [Rational; 3] = std::array::from_fn(|i| {
        let x = &a.num[i] * &b.den * &nn + &s_num * &a.dir[i];
        Rational::new(x, den.clone())
    });
    Point3(coords)
}

enum PairOutcome {
    Point(Point3),
    Parallel,
    Skew,
}

fn pair_outcome(la: &Line3, lb: &Line3, a: &IntLine, b: &IntLine) -> PairOutcome {
    if let (Some(sa), Some(sb)) = (&a.small, &b.small) {
        return match fast_class(sa, sb) {
            FastClass::Parallel => PairOutcome::Parallel,
            FastClass::Skew => PairOutcome::Skew,
            FastClass::Coplanar => PairOutcome::Point(int_intersection(a, b)),
        };
    }
    match classify_pair(la, lb) {
        PairClass::Intersecting(p) => PairOutcome::Point(p),
        PairClass::Parallel | PairClass::Equal => PairOutcome::Parallel,
        PairClass::Skew => PairOutcome::Skew,
    }
}

struct Partial {
    points: HashMap<Point3, Vec<u32>>,
    stats: PairStats,
}

impl Partial {
    fn new() -> Self {
        Partial {
            points: HashMap::new(),
            stats: PairStats::default(),
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        let (mut big, small) = if self.points.len() >= other.points.len() {
            (std::mem::take(&mut self.points), other.points)
        } else {
            (other.points, std::mem::take(&mut self.points))
        };
        for (p, ls) in small {
            big.entry(p).or_default().extend(ls);
        }
        Partial {
            points: big,
            stats: PairStats {
                intersecting: self.stats.intersecting + other.stats.intersecting,
                parallel: self.stats.parallel + other.stats.parallel,
                skew: self.stats.skew + other.stats.skew,
            },
        }
    }
}

/// Computes the rich-point map of a family of distinct lines.
pub fn compute_rich_points(lines: &[Line3]) -> Result<RichPointMap> {
    let mut seen = HashSet::with_capacity(lines.len());
    for (i, l) in lines.iter().enumerate() {
        if !seen.insert(l) {
            return Err(Error::DuplicateLine(i));
        }
    }
    let ints: Vec<IntLine> = lines.par_iter().map(int_line).collect();
    let n = lines.len();
    let merged = (0..n)
        .into_par_iter()
        .fold(Partial::new, |mut acc, i| {
            for j in (i + 1)..n {
                match pair_outcome(&lines[i], &lines[j], &ints[i], &ints[j]) {
                    PairOutcome::Point(p) => {
                        acc.stats.intersecting += 1;
                        let e = acc.points.entry(p).or_default();
                        e.push(i as u32);
                        e.push(j as u32);
                    }
                    PairOutcome::Parallel => acc.stats.parallel += 1,
                    PairOutcome::Skew => acc.stats.skew += 1,
                }
            }
            acc
        })
        .reduce(Partial::new, Partial::merge);
    let entries = merged
        .points
        .into_iter()
        .map(|(p, mut ls)| {
            ls.sort_unstable();
            ls.dedup();
            (p, ls)
        })
        .collect();
    Ok(RichPointMap {
        entries,
        total_lines: n,
        pairs: merged.stats,
    })
}

/// `P_r`: the points on at least `r` lines, in sorted order.
pub fn p_r(map: &RichPointMap, r: usize) -> Result<Vec<Point3>> {
    if r < 2 {
        return Err(Error::RichnessTooSmall(r as u64));
    }
    Ok(map
        .entries
        .iter()
        .filter(|(_, ls)| ls.len() >= r)
        .map(|(p, _)| p.clone())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigRReport {
    pub r: usize,
    pub lines: usize,
    pub count: u64,
    pub bound: Rational,
    pub margin: Rational,
    pub holds: bool,
}

/// Checks `|P_r| <= 2L/r`, valid only when `r > 2 sqrt(L)`.
pub fn verify_bigr(map: &RichPointMap, r: usize) -> Result<BigRReport> {
    let l = map.total_lines;
    if (r as u128) * (r as u128) <= 4 * l as u128 {
        return Err(Error::BigRPrecondition { r: r as u64, lines: l });
    }
    let count = map.count_rich(r);
    let bound = rational::rat(2 * l as i64, r as i64);
    let margin = &bound - rational::int(count as i64);
    Ok(BigRReport {
        r,
        lines: l,
        count,
        holds: !margin.is_negative(),
        bound,
        margin,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SzTRow {
    pub r: usize,
    pub count: u64,
    /// `L^2 r^-3 + L r^-1`
    pub scale: Rational,
    pub ratio: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SzTReport {
    pub lines: usize,
    pub rows: Vec<SzTRow>,
    /// Empirical constant: the largest ratio over all `r`.
    pub max_ratio: Rational,
    pub argmax: Option<usize>,
}

/// Measures `|P_r| / (L^2 r^-3 + L r^-1)` for every `r` in `2..=L`.
pub fn verify_szemeredi_trotter(map: &RichPointMap) -> SzTReport {
    let l = map.total_lines as i64;
    let cum = map.cumulative();
    let mut rows = Vec::new();
    let mut max_ratio = Rational::zero();
    let mut argmax = None;
    for r in 2..=map.total_lines {
        let ri = r as i64;
        let count = cum.get(&r).copied().unwrap_or(0);
        let scale = rational::rat(l * l, ri * ri * ri) + rational::rat(l, ri);
        let ratio = rational::int(count as i64) / &scale;
        if ratio > max_ratio {
            max_ratio = ratio.clone();
            argmax = Some(r);
        }
        rows.push(SzTRow { r, count, scale, ratio });
    }
    SzTReport {
        lines: map.total_lines,
        rows,
        max_ratio,
        argmax,
    }
}
