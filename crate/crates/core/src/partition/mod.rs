//! Polynomial partitioning of finite point sets in space.
//!
//! A partition is a list of factors `f_1, ..., f_k` of total degree at most
//! `D`. A point lies in the cell named by its sign vector
//! `(sign f_1(x), ..., sign f_k(x))` when every entry is nonzero, and on the
//! boundary `Z(f_1 ... f_k)` otherwise. Cells are sign classes, so they need
//! not be connected.
//!
//! Two backends build the factors:
//!
//! - [`partition_planes`] cuts the heaviest cell with a median plane, one
//!   plane per unit of degree. Every cell ends up with at most `2|S|/D`
//!   points.
//! - [`partition_lifted`] bisects every cell at once with one polynomial per
//!   round, aiming at `O(|S|/D^3)` points per cell. The search is heuristic;
//!   each round is checked with exact signs.

mod lifted;
mod lines;
mod planes;

pub use lifted::partition_lifted;
pub use lines::{line_cell_incidence, LineCellIncidence, LineCells};
pub use planes::partition_planes;

use std::collections::BTreeMap;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::poly::{sign_vector_at, SignVector, TriPoly};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Planes,
    Lifted,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Planes => "planes",
            Backend::Lifted => "lifted",
        }
    }

    pub fn parse(s: &str) -> Result<Backend> {
        match s {
            "planes" => Ok(Backend::Planes),
            "lifted" => Ok(Backend::Lifted),
            _ => Err(Error::Format(format!("unknown backend {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellCount {
    pub sign: SignVector,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assignment {
    /// Index into [`PartitionResult::cells`].
    Cell(usize),
    Boundary,
}

/// One construction step: a plane cut or a simultaneous bisection round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundReport {
    pub degree: u32,
    /// Number of nonempty cells before the step.
    pub parts: usize,
    pub largest_part: usize,
    /// Largest open side produced from any part, by exact signs.
    pub largest_side: usize,
    /// Every part was split with both open sides `<= ceil(m/2)`.
    pub verified: bool,
    /// The round search failed and a single median plane was used instead.
    pub fallback: bool,
    pub attempts: usize,
}

#[derive(Clone, Debug)]
pub struct PartitionResult {
    pub backend: Backend,
    /// The degree budget `D`.
    pub budget: u32,
    pub factors: Vec<TriPoly>,
    /// Product of the factors.
    pub poly: TriPoly,
    /// Nonempty cells, sorted by sign vector.
    pub cells: Vec<CellCount>,
    pub on_boundary: Vec<usize>,
    pub assignment: Vec<Assignment>,
    pub rounds: Vec<RoundReport>,
}

impl PartitionResult {
    fn from_signs(
        backend: Backend,
        budget: u32,
        factors: Vec<TriPoly>,
        signs: &[Vec<i8>],
        rounds: Vec<RoundReport>,
    ) -> PartitionResult {
        let mut counts: BTreeMap<&[i8], usize> = BTreeMap::new();
        for s in signs {
            if s.iter().all(|&x| x != 0) {
                *counts.entry(s.as_slice()).or_insert(0) += 1;
            }
        }
        let index: BTreeMap<&[i8], usize> = counts.keys().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut on_boundary = Vec::new();
        let assignment = signs
            .iter()
            .enumerate()
            .map(|(i, s)| match index.get(s.as_slice()) {
                Some(&c) => Assignment::Cell(c),
                None => {
                    on_boundary.push(i);
                    Assignment::Boundary
                }
            })
            .collect();
        let cells = counts
            .into_iter()
            .map(|(k, count)| CellCount {
                sign: SignVector(k.to_vec()),
                count,
            })
            .collect();
        let poly = TriPoly::product(factors.clone());
        PartitionResult {
            backend,
            budget,
            factors,
            poly,
            cells,
            on_boundary,
            assignment,
            rounds,
        }
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(TriPoly::degree).sum()
    }

    pub fn n_points(&self) -> usize {
        self.assignment.len()
    }

    pub fn max_cell(&self) -> usize {
        self.cells.iter().map(|c| c.count).max().unwrap_or(0)
    }

    pub fn cell_index(&self, sign: &SignVector) -> Option<usize> {
        self.cells.binary_search_by(|c| c.sign.cmp(sign)).ok()
    }

    /// Point indices grouped by cell, in cell order.
    pub fn cell_members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cells.len()];
        for (i, a) in self.assignment.iter().enumerate() {
            if let Assignment::Cell(c) = a {
                out[*c].push(i);
            }
        }
        out
    }
}

pub(crate) fn point_signs(factors: &[TriPoly], points: &[Point3]) -> Vec<Vec<i8>> {
    points.par_iter().map(|x| sign_vector_at(factors, x).0).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyhamReport {
    pub backend: Backend,
    pub n_points: usize,
    pub budget: u32,
    pub degree: u32,
    pub cells: usize,
    pub max_cell: usize,
    pub boundary: usize,
    /// `#cells / D^3`
    pub cells_ratio: Rational,
    /// `max_cell * D^3 / |S|`
    pub max_cell_ratio: Rational,
    pub conservation: bool,
    pub cell_count_holds: bool,
    /// `(2|S|/D, max_cell <= 2|S|/D)` for the planes backend.
    pub planes_bound: Option<(Rational, bool)>,
    pub rounds_verified: bool,
    pub fallbacks: usize,
}

impl PolyhamReport {
    /// All guaranteed bounds of the backend hold.
    pub fn holds(&self) -> bool {
        self.conservation
            && self.cell_count_holds
            && self.planes_bound.as_ref().map_or(true, |(_, ok)| *ok)
            && self.rounds_verified
    }
}

/// Cell-count constant `C` in the bound `#cells <= C D^3`.
pub const CELL_COUNT_CONSTANT: u64 = 8;

/// Recomputes every sign from the factors and checks the stored
/// assignment, then reports counts and the measured constants.
pub fn verify_polyham(part: &PartitionResult, points: &[Point3]) -> Result<PolyhamReport> {
    if points.len() != part.n_points() {
        return Err(Error::PartitionMismatch(format!(
            "partition has {} points, got {}",
            part.n_points(),
            points.len()
        )));
    }
    let signs = point_signs(&part.factors, points);
    for (i, (s, a)) in signs.iter().zip(&part.assignment).enumerate() {
        let ok = match a {
            Assignment::Boundary => s.iter().any(|&x| x == 0),
            Assignment::Cell(c) => part.cells.get(*c).is_some_and(|cell| cell.sign.0 == *s),
        };
        if !ok {
            return Err(Error::PartitionMismatch(format!("point {i} is not where the partition puts it")));
        }
    }
    let n = points.len();
    let d = part.budget as i64;
    let d3 = d * d * d;
    let in_cells: usize = part.cells.iter().map(|c| c.count).sum();
    let max_cell = part.max_cell();
    let planes_bound = (part.backend == Backend::Planes).then(|| {
        let b = rational::rat(2 * n as i64, d);
        let ok = rational::int(max_cell as i64) <= b;
        (b, ok)
    });
    let max_cell_ratio = if n == 0 {
        Rational::zero()
    } else {
        rational::rat(max_cell as i64 * d3, n as i64)
    };
    Ok(PolyhamReport {
        backend: part.backend,
        n_points: n,
        budget: part.budget,
        degree: part.degree(),
        cells: part.cells.len(),
        max_cell,
        boundary: part.on_boundary.len(),
        cells_ratio: rational::rat(part.cells.len() as i64, d3),
        max_cell_ratio,
        conservation: in_cells + part.on_boundary.len() == n,
        cell_count_holds: (part.cells.len() as u64) <= CELL_COUNT_CONSTANT * d3 as u64,
        planes_bound,
        rounds_verified: part.rounds.iter().all(|r| r.verified || r.fallback),
        fallbacks: part.rounds.iter().filter(|r| r.fallback).count(),
    })
}

/// Groups the indices of points that are not on the boundary by sign vector.
pub(crate) fn group_parts(signs: &[Vec<i8>]) -> BTreeMap<Vec<i8>, Vec<usize>> {
    let mut parts: BTreeMap<Vec<i8>, Vec<usize>> = BTreeMap::new();
    for (i, s) in signs.iter().enumerate() {
        if s.iter().all(|&x| x != 0) {
            parts.entry(s.clone()).or_default().push(i);
        }
    }
    parts
}

/// Median plane through a part along `dir`: returns the constant `c` of
/// `dir . x = c` and the side counts `(pos, neg, zero)`.
pub(crate) fn median_cut(points: &[Point3], members: &[usize], dir: &Point3) -> (Rational, usize, usize, usize) {
    let mut vals: Vec<Rational> = members.iter().map(|&i| points[i].dot(dir)).collect();
    vals.sort();
    let m = vals.len();
    let c = if m % 2 == 0 {
        (&vals[m / 2 - 1] + &vals[m / 2]) / rational::int(2)
    } else {
        vals[m / 2].clone()
    };
    let pos = vals.iter().filter(|v| **v > c).count();
    let neg = vals.iter().filter(|v| **v < c).count();
    (c.clone(), pos, neg, m - pos - neg)
}

pub(crate) fn plane(dir: &Point3, c: &Rational) -> TriPoly {
    TriPoly::linear(dir.0.clone(), -c.clone())
}
