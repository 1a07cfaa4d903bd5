use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;

use super::PartitionResult;
use crate::geometry::Line3;
use crate::poly::{SignVector, TriPoly, UniPoly};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineCells {
    pub in_zero_set: bool,
    /// Sign classes the line passes through, sorted.
    pub cells: Vec<SignVector>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineCellIncidence {
    pub degree: u32,
    pub lines: Vec<LineCells>,
}

impl LineCellIncidence {
    pub fn in_zero_set(&self) -> Vec<usize> {
        (0..self.lines.len()).filter(|&i| self.lines[i].in_zero_set).collect()
    }

    /// `sum_i |L_i|` over the lines not contained in `Z(poly)`.
    pub fn total(&self) -> usize {
        self.lines.iter().map(|l| l.cells.len()).sum()
    }

    pub fn max_per_line(&self) -> usize {
        self.lines.iter().map(|l| l.cells.len()).max().unwrap_or(0)
    }

    /// Every line outside `Z(poly)` meets at most `deg + 1` cells, hence the
    /// total is at most `(deg + 1) L`.
    pub fn bound_holds(&self) -> bool {
        let d = self.degree as usize + 1;
        self.lines.iter().all(|l| l.cells.len() <= d) && self.total() <= d * self.lines.len()
    }

    /// Line indices per sign class.
    pub fn lines_by_cell(&self) -> BTreeMap<SignVector, Vec<usize>> {
        let mut out: BTreeMap<SignVector, Vec<usize>> = BTreeMap::new();
        for (i, l) in self.lines.iter().enumerate() {
            for c in &l.cells {
                out.entry(c.clone()).or_default().push(i);
            }
        }
        out
    }
}

/// For each line, the cells of the partition it passes through.
pub fn line_cell_incidence(lines: &[Line3], part: &PartitionResult) -> LineCellIncidence {
    let out = lines.par_iter().map(|l| cells_met(&part.factors, l)).collect();
    LineCellIncidence {
        degree: part.degree(),
        lines: out,
    }
}

/// Sign classes met by one line, found by sampling between consecutive
/// roots of the restricted factors.
pub fn cells_met(factors: &[TriPoly], l: &Line3) -> LineCells {
    let us: Vec<UniPoly> = factors.iter().map(|f| f.restrict_to_line(l)).collect();
    if us.iter().any(UniPoly::is_zero) {
        return LineCells {
            in_zero_set: true,
            cells: Vec::new(),
        };
    }
    let samples = if us.iter().all(|u| u.degree().unwrap_or(0) <= 1) {
        linear_samples(&us)
    } else {
        sturm_samples(&us)
    };
    let cells: BTreeSet<SignVector> = samples
        .iter()
        .map(|t| SignVector(us.iter().map(|u| u.sign_at(t)).collect()))
        .collect();
    debug_assert!(cells.iter().all(SignVector::is_cell));
    LineCells {
        in_zero_set: false,
        cells: cells.into_iter().collect(),
    }
}

fn between(roots: &[Rational]) -> Vec<Rational> {
    let one = rational::int(1);
    match (roots.first(), roots.last()) {
        (Some(a), Some(b)) => {
            let mut s = vec![a - &one];
            s.extend(roots.windows(2).map(|w| (&w[0] + &w[1]) / rational::int(2)));
            s.push(b + &one);
            s
        }
        _ => vec![Rational::zero()],
    }
}

fn linear_samples(us: &[UniPoly]) -> Vec<Rational> {
    let roots: BTreeSet<Rational> = us
        .iter()
        .filter(|u| u.degree() == Some(1))
        .map(|u| -(&u.coeffs()[0] / &u.coeffs()[1]))
        .collect();
    between(&roots.into_iter().collect::<Vec<_>>())
}

fn sturm_samples(us: &[UniPoly]) -> Vec<Rational> {
    let prod = us.iter().fold(UniPoly::constant(rational::int(1)), |acc, u| acc.mul(u));
    let sf = prod.square_free();
    let mut ivs = sf.isolate_real_roots().expect("nonzero product");
    if ivs.is_empty() {
        return vec![Rational::zero()];
    }
    for i in 0..ivs.len() - 1 {
        while ivs[i].hi >= ivs[i + 1].lo {
            for k in [i, i + 1] {
                if !ivs[k].is_exact() {
                    let w = (&ivs[k].hi - &ivs[k].lo) / rational::int(2);
                    ivs[k] = sf.refine_root(&ivs[k], &w);
                }
            }
        }
    }
    let one = rational::int(1);
    let mut s = vec![&ivs[0].lo - &one];
    s.extend(ivs.windows(2).map(|w| (&w[0].hi + &w[1].lo) / rational::int(2)));
    s.push(&ivs[ivs.len() - 1].hi + &one);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::partition::{partition_planes, Backend};
    use crate::rational::int;

    fn line(b: [i64; 3], d: [i64; 3]) -> Line3 {
        Line3::new(Point3::from_ints(b[0], b[1], b[2]), Point3::from_ints(d[0], d[1], d[2])).unwrap()
    }

    #[test]
    fn one_plane() {
        let fs = vec![TriPoly::var(0)];
        let crossing = cells_met(&fs, &line([0, 0, 0], [1, 1, 0]));
        assert_eq!(crossing.cells.len(), 2);
        let inside = cells_met(&fs, &line([0, 0, 0], [0, 1, 1]));
        assert!(inside.in_zero_set && inside.cells.is_empty());
    }

    #[test]
    fn quadric_restrictions() {
        // sphere of radius 1 and the plane x3 = 0
        let sphere = TriPoly::from_int_terms(&[(2, 0, 0, 1), (0, 2, 0, 1), (0, 0, 2, 1), (0, 0, 0, -1)]);
        let fs = vec![sphere, TriPoly::var(2)];
        // the x1 axis crosses the sphere twice inside the plane: in Z
        assert!(cells_met(&fs, &line([0, 0, 0], [1, 0, 0])).in_zero_set);
        // a diagonal line through the centre crosses the sphere twice and the plane once
        let met = cells_met(&fs, &line([0, 0, 0], [1, 1, 1]));
        assert_eq!(met.cells.len(), 4);
        // misses the sphere, crosses the plane
        let far = cells_met(&fs, &line([5, 5, 0], [0, 1, 1]));
        assert_eq!(far.cells.len(), 2);
    }

    #[test]
    fn root_shared_by_two_factors() {
        // x1 and x1^2 + x1 (roots 0 and -1) along the x1 axis
        let fs = vec![TriPoly::var(0), TriPoly::from_int_terms(&[(2, 0, 0, 1), (1, 0, 0, 1)])];
        let met = cells_met(&fs, &line([0, 1, 0], [1, 0, 0]));
        assert!(met.cells.iter().all(SignVector::is_cell));
        assert_eq!(met.cells.len(), 3);
    }

    #[test]
    fn planes_partition_respects_the_line_bound() {
        let pts: Vec<Point3> = (0..40).map(|i| Point3::from_ints(i % 7, (i * 3) % 11, (i * 5) % 13)).collect();
        let part = partition_planes(&pts, 5, 3).unwrap();
        assert_eq!(part.backend, Backend::Planes);
        let lines: Vec<Line3> = (0..30).map(|i| line([i % 5, i % 3, 0], [1, i, 2 * i + 1])).collect();
        let inc = line_cell_incidence(&lines, &part);
        assert!(inc.bound_holds());
        assert!(inc.max_per_line() <= 6);
        assert_eq!(int(inc.total() as i64), inc.lines_by_cell().values().map(|v| int(v.len() as i64)).sum());
    }
}
