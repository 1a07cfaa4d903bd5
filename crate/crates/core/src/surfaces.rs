//! Low-degree surfaces containing many lines of a family.
//!
//! [`vanishing_space`] is exact linear algebra: a polynomial of degree at
//! most `D` vanishes on a line iff it vanishes at `D + 1` distinct points of
//! it. [`greedy_surface_clusters`] searches for surfaces with many lines;
//! planes are found exhaustively from coplanar pairs, higher degrees from
//! seeded random line subsets.

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::{classify_pair, Line3, PairClass};
use crate::linalg;
use crate::poly::{monomial_values, monomials, Irreducibility, TriPoly};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceCandidate {
    pub poly: TriPoly,
    /// Indices of the family's lines lying in `Z(poly)`, sorted.
    pub lines: Vec<usize>,
    pub irreducibility: Irreducibility,
}

impl SurfaceCandidate {
    pub fn new(poly: TriPoly, family: &[Line3]) -> SurfaceCandidate {
        let poly = poly.normalized();
        let lines = lines_in_surface(&poly, family);
        let irreducibility = poly.irreducibility();
        SurfaceCandidate {
            poly,
            lines,
            irreducibility,
        }
    }
}

/// Indices of the lines contained in `Z(poly)`.
pub fn lines_in_surface(poly: &TriPoly, family: &[Line3]) -> Vec<usize> {
    family
        .par_iter()
        .enumerate()
        .filter(|(_, l)| poly.restrict_to_line(l).is_zero())
        .map(|(i, _)| i)
        .collect()
}

/// Basis of the polynomials of degree at most `d` vanishing on every line.
/// Empty when only the zero polynomial does.
pub fn vanishing_space(lines: &[Line3], d: u32) -> Vec<TriPoly> {
    assert!(d >= 1, "degree must be at least 1");
    let exps = monomials(d);
    let rows: Vec<Vec<Rational>> = lines
        .iter()
        .flat_map(|l| (0..=d as i64).map(move |t| l.point_at(&rational::int(t))))
        .map(|x| monomial_values(&x, &exps))
        .collect();
    linalg::nullspace(&rows, exps.len())
        .into_iter()
        .map(|v| TriPoly::from_terms(exps.iter().copied().zip(v)).normalized())
        .collect()
}

/// The plane spanned by two coplanar distinct lines.
pub fn plane_through(a: &Line3, b: &Line3) -> Option<TriPoly> {
    let n = match classify_pair(a, b) {
        PairClass::Intersecting(_) => a.dir().cross(b.dir()),
        PairClass::Parallel => a.dir().cross(&b.base().sub(a.base())),
        PairClass::Equal | PairClass::Skew => return None,
    };
    let c = -n.dot(a.base());
    Some(TriPoly::linear(n.0, c).normalized())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyConfig {
    /// Random seed subsets tried per degree `2..=D` in each pass.
    pub seeds_per_degree: usize,
    pub seed: u64,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        GreedyConfig {
            seeds_per_degree: 200,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSearch {
    pub surfaces: Vec<SurfaceCandidate>,
    pub degree: u32,
    pub threshold: usize,
    pub seeds_per_degree: usize,
    /// Degree one only: every plane with two or more lines was examined.
    pub exhaustive: bool,
}

pub fn greedy_surface_clusters(lines: &[Line3], d: u32, a: usize) -> SurfaceSearch {
    greedy_surface_clusters_with(lines, d, a, &GreedyConfig::default())
}

/// Repeatedly accepts the candidate surface containing the most remaining
/// lines, provided it holds at least `a` of them, and removes those lines.
pub fn greedy_surface_clusters_with(lines: &[Line3], d: u32, a: usize, cfg: &GreedyConfig) -> SurfaceSearch {
    assert!(d >= 1, "degree must be at least 1");
    let a = a.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut remaining: Vec<bool> = vec![true; lines.len()];
    let mut surfaces = Vec::new();
    loop {
        let live: Vec<usize> = (0..lines.len()).filter(|&i| remaining[i]).collect();
        if live.len() < a {
            break;
        }
        let mut best: Option<(usize, TriPoly)> = best_plane(lines, &live);
        let mut tried: HashSet<TriPoly> = HashSet::new();
        for deg in 2..=d {
            let size = (monomials(deg).len() - 1) / (deg as usize + 1);
            if live.len() < size {
                continue;
            }
            for _ in 0..cfg.seeds_per_degree {
                let pick: Vec<Line3> = sample(&mut rng, live.len(), size)
                    .into_iter()
                    .map(|k| lines[live[k]].clone())
                    .collect();
                let space = vanishing_space(&pick, deg);
                let [p] = space.as_slice() else {
                    continue;
                };
                if matches!(p.irreducibility(), Irreducibility::Reducible(_)) || !tried.insert(p.clone()) {
                    continue;
                }
                let count = live.iter().filter(|&&i| p.restrict_to_line(&lines[i]).is_zero()).count();
                if best.as_ref().map_or(true, |(c, _)| count > *c) {
                    best = Some((count, p.clone()));
                }
            }
        }
        let Some((count, poly)) = best else {
            break;
        };
        if count < a {
            break;
        }
        let cand = SurfaceCandidate::new(poly, lines);
        for &i in &cand.lines {
            remaining[i] = false;
        }
        surfaces.push(cand);
    }
    SurfaceSearch {
        surfaces,
        degree: d,
        threshold: a,
        seeds_per_degree: cfg.seeds_per_degree,
        exhaustive: d == 1,
    }
}

/// The plane holding the most of the given lines, with its count. Ties go
/// to the plane found first in pair order.
/// Largest number of the lines in one plane, with that plane. Exhaustive
/// over coplanar pairs; `None` when no two lines are coplanar.
pub fn max_coplanar(lines: &[Line3]) -> Option<(usize, TriPoly)> {
    let all: Vec<usize> = (0..lines.len()).collect();
    best_plane(lines, &all)
}

fn best_plane(lines: &[Line3], live: &[usize]) -> Option<(usize, TriPoly)> {
    let found: Vec<Vec<(TriPoly, usize, usize)>> = (0..live.len())
        .into_par_iter()
        .map(|x| {
            ((x + 1)..live.len())
                .filter_map(|y| plane_through(&lines[live[x]], &lines[live[y]]).map(|p| (p, x, y)))
                .collect()
        })
        .collect();
    let mut members: HashMap<TriPoly, (usize, BTreeSet<usize>)> = HashMap::new();
    let mut order = 0;
    for (p, x, y) in found.into_iter().flatten() {
        let e = members.entry(p).or_insert_with(|| {
            order += 1;
            (order, BTreeSet::new())
        });
        e.1.insert(x);
        e.1.insert(y);
    }
    members
        .into_iter()
        .max_by(|a, b| a.1 .1.len().cmp(&b.1 .1.len()).then(b.1 .0.cmp(&a.1 .0)))
        .map(|(p, (_, s))| (s.len(), p))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfCountReport {
    pub lines: usize,
    pub threshold: usize,
    pub degree: u32,
    pub surfaces: usize,
    /// `A > 2 D L^{1/2}`
    pub applicable: bool,
    /// `2L / A`
    pub bound: Rational,
    pub count_holds: bool,
    /// Every surface contains at least `A` lines.
    pub min_lines_holds: bool,
    pub max_shared: usize,
    /// Any two surfaces share at most `D^2` lines.
    pub shared_holds: bool,
}

impl SurfCountReport {
    /// The count bound is only asserted when the hypothesis holds.
    pub fn holds(&self) -> bool {
        self.min_lines_holds && self.shared_holds && (!self.applicable || self.count_holds)
    }
}

pub fn verify_surfcount(cands: &[SurfaceCandidate], l: usize, a: usize, d: u32) -> SurfCountReport {
    let (a2, d2) = (a as u128 * a as u128, d as u128 * d as u128);
    let applicable = a2 > 4 * d2 * l as u128;
    let bound = rational::rat(2 * l as i64, a.max(1) as i64);
    let mut max_shared = 0;
    for (i, x) in cands.iter().enumerate() {
        let xs: BTreeSet<usize> = x.lines.iter().copied().collect();
        for y in &cands[i + 1..] {
            max_shared = max_shared.max(y.lines.iter().filter(|k| xs.contains(k)).count());
        }
    }
    SurfCountReport {
        lines: l,
        threshold: a,
        degree: d,
        surfaces: cands.len(),
        applicable,
        count_holds: rational::int(cands.len() as i64) <= bound,
        bound,
        min_lines_holds: cands.iter().all(|c| c.lines.len() >= a),
        max_shared,
        shared_holds: max_shared as u128 <= d2,
    }
}
