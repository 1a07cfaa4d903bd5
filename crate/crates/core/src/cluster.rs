//! Surface clustering of rich points, run as an explicit recursion.
//!
//! For a family of `L` lines and `2 <= r <= 2 L^{1/2}`, [`cluster_decompose`]
//! returns surfaces of degree at most `D`, each containing at least
//! `L^{1/2+eps}` lines, together with the residual
//! `P_r(L) \ U_Z P_{r'}(L_Z)`, `r' = ceil(9r/10)`. Each node of the
//! recursion partitions the current point set, recurses into the cells met
//! by few lines, adds the components of the partition to the surface list
//! and repeats on the points not yet covered. Every inequality the
//! construction relies on is recorded in the trace with exact sides.
//!
//! A top-level family small enough that `L^eps <= 2D` is handled directly
//! with the greedy surface search, and so are cells whose line count does
//! not drop to `L/2` (stalled cells); small families deeper in the
//! recursion get no surfaces. The lines in a surface, `L_Z`, are always taken
//! from the full input family.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Line3, Point3};
use crate::incidence::{compute_rich_points, RichPointMap};
use crate::partition::{line_cell_incidence, partition_lifted, partition_planes, Backend, PartitionResult};
use crate::poly::TriPoly;
use crate::rational::{self, serde_str, Rational};
use crate::surfaces::{greedy_surface_clusters_with, GreedyConfig, SurfaceCandidate};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterConfig {
    pub degree: u32,
    pub eps: Rational,
    pub k: Rational,
    pub backend: Backend,
    pub seed: u64,
    /// Random seed subsets per degree in the greedy surface search.
    pub greedy_seeds: usize,
    /// Stop iterating a node once `|S_j|` already meets the end bound
    /// `K L^{3/2+eps} r^-2 / 100`; otherwise iterate until `S_j` is empty,
    /// stuck, or the cap is reached.
    pub stop_at_bound: bool,
}

impl ClusterConfig {
    /// Configuration with the smallest gate-satisfying `K` from [`min_k`].
    pub fn new(degree: u32, eps: Rational) -> ClusterConfig {
        let k = min_k(degree, &eps);
        ClusterConfig {
            degree,
            eps,
            k,
            backend: Backend::Planes,
            seed: 0,
            greedy_seeds: GreedyConfig::default().seeds_per_degree,
            stop_at_bound: true,
        }
    }
}

/// `r' = ceil(9r/10)`
pub fn r_prime(r: usize) -> usize {
    (9 * r).div_ceil(10)
}

/// An integer `K` with `K >= 10 (2D)^{2/eps}`.
pub fn min_k(degree: u32, eps: &Rational) -> Rational {
    let exp = rational::int(2) / eps;
    rational::int(10) * rational::int(rational::ceil_pow(2 * degree as u64, &exp) as i64)
}

/// `coef * base^exp`, kept exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bound {
    #[serde(with = "serde_str")]
    pub coef: Rational,
    pub base: u64,
    #[serde(with = "serde_str")]
    pub exp: Rational,
}

impl Bound {
    pub fn new(coef: Rational, base: u64, exp: Rational) -> Bound {
        Bound { coef, base, exp }
    }

    pub fn exact(q: Rational) -> Bound {
        Bound::new(q, 1, Rational::zero())
    }

    /// `x <= self` for `x >= 0`.
    pub fn admits(&self, x: &Rational) -> bool {
        if !self.coef.is_positive() || self.base == 0 {
            return !x.is_positive();
        }
        rational::cmp_pow(&(x / &self.coef), self.base, &self.exp) != Ordering::Greater
    }

    pub fn approx(&self) -> f64 {
        rational::to_f64(&self.coef) * (self.base as f64).powf(rational::to_f64(&self.exp))
    }
}

/// One inequality `lhs <= rhs` checked during the run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(with = "serde_str")]
    pub lhs: Rational,
    pub rhs: Bound,
    pub holds: bool,
}

impl Check {
    pub fn new(name: &str, lhs: Rational, rhs: Bound) -> Check {
        let holds = rhs.admits(&lhs);
        Check {
            name: name.to_string(),
            lhs,
            rhs,
            holds,
        }
    }
}

fn count(n: usize) -> Rational {
    rational::int(n as i64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationTrace {
    pub j: usize,
    pub points: usize,
    pub partition_degree: u32,
    pub cells: usize,
    /// `max_cell * D^3 / |S|` of this partition.
    #[serde(with = "serde_str")]
    pub cell_constant: Rational,
    #[serde(with = "serde_str")]
    pub beta: Rational,
    pub good_cells: usize,
    pub bad_cells: usize,
    pub bad_points: usize,
    pub big_r_cells: usize,
    pub recursed_cells: usize,
    pub stalled_cells: usize,
    /// Cells whose line set was already handled earlier in the run.
    pub reused_cells: usize,
    pub wall_components: usize,
    pub wall_missed: usize,
    pub good_missed: usize,
    pub new_surfaces: usize,
    pub remaining: usize,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeTrace {
    pub id: usize,
    pub parent: Option<usize>,
    pub depth: usize,
    pub lines: usize,
    /// `|P_r|` of this node's family.
    pub rich: usize,
    pub base_case: bool,
    /// Least integer at least `L^{1/2+eps}`.
    pub threshold: u64,
    pub iterations: Vec<IterationTrace>,
    /// Surfaces collected before pruning.
    pub collected: usize,
    pub kept: usize,
    pub checks: Vec<Check>,
}

/// Pruned-away surfaces with `2^s <= |L_Z| < 2^{s+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicRow {
    pub s: u32,
    pub surfaces: usize,
    /// `sum |P_{r'}(L_Z)|` over the row.
    pub rich_sum: u64,
    /// `2^s > 2 D L^{1/2}`
    pub count_bound_applies: bool,
    /// `2L / 2^s`
    #[serde(with = "serde_str")]
    pub count_bound: Rational,
    pub count_holds: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClusterTrace {
    pub nodes: Vec<NodeTrace>,
    pub dyadic: Vec<DyadicRow>,
    pub checks: Vec<Check>,
}

impl ClusterTrace {
    pub fn all_checks(&self) -> impl Iterator<Item = &Check> {
        self.nodes
            .iter()
            .flat_map(|n| n.checks.iter().chain(n.iterations.iter().flat_map(|it| it.checks.iter())))
            .chain(self.checks.iter())
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.all_checks().filter(|c| !c.holds).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterParams {
    pub lines: usize,
    pub r: usize,
    pub r_prime: usize,
    #[serde(with = "serde_str")]
    pub eps: Rational,
    pub degree: u32,
    #[serde(with = "serde_str")]
    pub k: Rational,
    pub backend: &'static str,
    pub seed: u64,
    pub greedy_seeds: usize,
    pub stop_at_bound: bool,
    /// Iteration cap `ceil(4 log2 L)` per node.
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct ClusterResult {
    pub params: ClusterParams,
    pub surfaces: Vec<SurfaceCandidate>,
    pub rich: usize,
    pub residual: Vec<Point3>,
    pub trace: ClusterTrace,
}

/// `ceil(4 log2 L)`
pub fn iteration_cap(l: usize) -> usize {
    let n = (l as u128).pow(4);
    if n <= 1 {
        1
    } else {
        (128 - (n - 1).leading_zeros()) as usize
    }
}

fn validate(l: usize, r: usize, cfg: &ClusterConfig) -> Result<()> {
    let gate = |s: &str| Err(Error::ParameterGate(s.to_string()));
    if r < 2 {
        return gate("r >= 2");
    }
    if (r as u128) * (r as u128) > 4 * l as u128 {
        return gate("r <= 2 L^{1/2}");
    }
    if !cfg.eps.is_positive() || cfg.eps > rational::rat(1, 2) {
        return gate("0 < eps <= 1/2");
    }
    if cfg.degree < 1 {
        return gate("D >= 1");
    }
    let exp = rational::int(2) / &cfg.eps;
    let k10 = &cfg.k / rational::int(10);
    if k10.is_negative() || rational::cmp_pow(&k10, 2 * cfg.degree as u64, &exp) == Ordering::Less {
        return gate("K >= 10 (2D)^{2/eps}");
    }
    Ok(())
}

struct Ctx<'a> {
    lines: &'a [Line3],
    map: &'a RichPointMap,
    cfg: &'a ClusterConfig,
    r: usize,
    r_prime: usize,
    /// Root-family membership per surface.
    members: HashMap<TriPoly, Vec<bool>>,
    nodes: Vec<NodeTrace>,
    /// Surfaces already found for a cell's line set.
    solved: HashMap<Vec<usize>, Vec<TriPoly>>,
}

impl<'a> Ctx<'a> {
    fn members(&mut self, z: &TriPoly) -> &Vec<bool> {
        let lines = self.lines;
        self.members.entry(z.clone()).or_insert_with(|| {
            let mut v = vec![false; lines.len()];
            for i in crate::surfaces::lines_in_surface(z, lines) {
                v[i] = true;
            }
            v
        })
    }

    /// `x` lies in `P_{r'}(L_Z)`.
    fn covers(&mut self, z: &TriPoly, x: &Point3) -> bool {
        let map = self.map;
        let rp = self.r_prime;
        let m = self.members(z);
        map.lines_through(x).iter().filter(|&&i| m[i as usize]).count() >= rp
    }

    fn covered_by_any(&mut self, zs: &[TriPoly], x: &Point3) -> bool {
        zs.iter().any(|z| self.covers(z, x))
    }

    fn scaled(&self, coef: Rational, l: usize, extra: Rational) -> Bound {
        let r2 = count(self.r * self.r);
        Bound::new(coef * &self.cfg.k / r2, l as u64, rational::rat(3, 2) + extra)
    }

    fn main_bound(&self, coef: Rational, l: usize) -> Bound {
        self.scaled(coef, l, self.cfg.eps.clone())
    }

    fn greedy(&self, family: &[usize], a: u64) -> Vec<TriPoly> {
        // Seeded by the line set so equal cells get equal searches.
        let salt = family.iter().fold(0xcbf29ce484222325u64, |h, &i| (h ^ i as u64).wrapping_mul(0x100000001b3));
        let fam: Vec<Line3> = family.iter().map(|&i| self.lines[i].clone()).collect();
        let gc = GreedyConfig {
            seeds_per_degree: self.cfg.greedy_seeds,
            seed: self.cfg.seed ^ salt,
        };
        greedy_surface_clusters_with(&fam, self.cfg.degree, a as usize, &gc)
            .surfaces
            .into_iter()
            .map(|s| s.poly)
            .collect()
    }

    /// Runs one node on a subfamily (root indices, sorted) and returns its
    /// pruned surfaces.
    fn node(&mut self, family: &[usize], parent: Option<usize>, depth: usize) -> (Vec<TriPoly>, Vec<TriPoly>) {
        let l = family.len();
        let id = self.nodes.len();
        let half_eps = rational::rat(1, 2) + &self.cfg.eps;
        let threshold = rational::ceil_pow(l as u64, &half_eps);
        let mut in_family = vec![false; self.lines.len()];
        for &i in family {
            in_family[i] = true;
        }
        let rich: Vec<Point3> = self
            .map
            .entries()
            .iter()
            .filter(|(_, ls)| ls.iter().filter(|&&i| in_family[i as usize]).count() >= self.r)
            .map(|(p, _)| p.clone())
            .collect();
        let base_case = rational::cmp_pow(&count(l), 2 * self.cfg.degree as u64, &self.cfg.eps.recip())
            != Ordering::Greater;
        self.nodes.push(NodeTrace {
            id,
            parent,
            depth,
            lines: l,
            rich: rich.len(),
            base_case,
            threshold,
            iterations: Vec::new(),
            collected: 0,
            kept: 0,
            checks: Vec::new(),
        });
        let mut checks = Vec::new();
        let collected = if base_case {
            checks.push(Check::new("base case: |P_r| <= L^2", count(rich.len()), Bound::exact(count(l * l))));
            if depth == 0 {
                self.greedy(family, threshold.max(2))
            } else {
                Vec::new()
            }
        } else {
            self.iterate(family, rich, id, depth, &mut checks)
        };
        let kept: Vec<TriPoly> = collected
            .iter()
            .filter(|z| {
                let m = self.members(z);
                let n = family.iter().filter(|&&i| m[i]).count();
                rational::cmp_pow(&count(n), l as u64, &half_eps) != Ordering::Less
            })
            .cloned()
            .collect();
        let node = &mut self.nodes[id];
        node.collected = collected.len();
        node.kept = kept.len();
        node.checks = checks;
        (kept, collected)
    }

    fn iterate(
        &mut self,
        family: &[usize],
        rich: Vec<Point3>,
        id: usize,
        depth: usize,
        checks: &mut Vec<Check>,
    ) -> Vec<TriPoly> {
        let l = family.len();
        let mut s = rich;
        let mut collected: Vec<TriPoly> = Vec::new();
        let mut seen: HashSet<TriPoly> = HashSet::new();
        let cap = iteration_cap(l);
        let end = self.main_bound(rational::rat(1, 100), l);
        for j in 1..cap {
            if s.is_empty() || (self.cfg.stop_at_bound && end.admits(&count(s.len()))) {
                break;
            }
            let (mut it, zs) = self.one_pass(family, &s, j, id, depth);
            let before = s.len();
            let next: Vec<Point3> = s.iter().filter(|x| !self.covered_by_any(&zs, x)).cloned().collect();
            let bound = self.main_bound(rational::rat(1, 200), l);
            // |S_{j+1}| <= |S_j|/100 + K L^{3/2+eps} r^-2 / 200
            let slack = count(before) / rational::int(100);
            let lhs = count(next.len()) - &slack;
            let holds = !lhs.is_positive() || bound.admits(&lhs);
            it.checks.push(Check {
                name: "iteration: |S_{j+1}| - |S_j|/100 <= K L^{3/2+eps} r^-2 / 200".to_string(),
                lhs,
                rhs: bound,
                holds,
            });
            it.checks.push(Check::new("monotone: |S_{j+1}| <= |S_j|", count(next.len()), Bound::exact(count(before))));
            it.remaining = next.len();
            let mut added = 0;
            for z in zs {
                if seen.insert(z.clone()) {
                    collected.push(z);
                    added += 1;
                }
            }
            it.new_surfaces = added;
            self.nodes[id].iterations.push(it);
            // A pass that neither removes points nor adds surfaces would
            // repeat unchanged.
            let stuck = next.len() == before && added == 0;
            s = next;
            if stuck {
                break;
            }
        }
        checks.push(Check::new("end: |S_J| <= K L^{3/2+eps} r^-2 / 100", count(s.len()), end));
        collected
    }

    fn partition(&self, s: &[Point3], j: usize) -> PartitionResult {
        let d = self.cfg.degree;
        let seed = self.cfg.seed.wrapping_add(j as u64);
        let lifted = self.cfg.backend == Backend::Lifted && d >= 2 && s.len() >= 2;
        let part = if lifted { partition_lifted(s, d, seed).ok() } else { None };
        part.unwrap_or_else(|| partition_planes(s, d, seed).expect("nonempty point set"))
    }

    fn one_pass(&mut self, family: &[usize], s: &[Point3], j: usize, id: usize, depth: usize) -> (IterationTrace, Vec<TriPoly>) {
        let l = family.len();
        let d = self.cfg.degree;
        let part = self.partition(s, j);
        let fam_lines: Vec<Line3> = family.iter().map(|&i| self.lines[i].clone()).collect();
        let inc = line_cell_incidence(&fam_lines, &part);
        let by_cell = inc.lines_by_cell();
        let cell_points = part.cell_members();
        let d3 = count((d * d * d) as usize);
        let cell_constant = count(part.max_cell()) * &d3 / count(s.len());
        let beta = rational::int(200) * &cell_constant;
        let good_limit = &beta * count(l) / count((d * d) as usize);
        let mut it = IterationTrace {
            j,
            points: s.len(),
            partition_degree: part.degree(),
            cells: part.cells.len(),
            cell_constant,
            beta,
            good_cells: 0,
            bad_cells: 0,
            bad_points: 0,
            big_r_cells: 0,
            recursed_cells: 0,
            stalled_cells: 0,
            reused_cells: 0,
            wall_components: 0,
            wall_missed: 0,
            good_missed: 0,
            new_surfaces: 0,
            remaining: 0,
            checks: Vec::new(),
        };
        it.checks.push(Check::new(
            "line-cell total: sum |L_i| <= (D+1) L",
            count(inc.total()),
            Bound::exact(count((d as usize + 1) * l)),
        ));
        let mut zs: Vec<TriPoly> = Vec::new();
        let mut big_r_points = 0;
        let mut big_r_budget = Rational::zero();
        for (ci, cell) in part.cells.iter().enumerate() {
            let li: Vec<usize> = by_cell
                .get(&cell.sign)
                .map(|v| v.iter().map(|&k| family[k]).collect())
                .unwrap_or_default();
            let pts = &cell_points[ci];
            let n = li.len();
            if count(n) > good_limit {
                it.bad_cells += 1;
                it.bad_points += pts.len();
                continue;
            }
            it.good_cells += 1;
            if (self.r as u128) * (self.r as u128) > 4 * n as u128 {
                it.big_r_cells += 1;
                big_r_points += pts.len();
                big_r_budget += rational::rat(2 * n as i64, self.r as i64);
                it.good_missed += pts.len();
                continue;
            }
            let zi = if let Some(z) = self.solved.get(&li) {
                it.reused_cells += 1;
                z.clone()
            } else {
                let z = if 2 * n <= l {
                    it.recursed_cells += 1;
                    self.node(&li, Some(id), depth + 1).0
                } else {
                    it.stalled_cells += 1;
                    let half_eps = rational::rat(1, 2) + &self.cfg.eps;
                    let a = rational::ceil_pow(n as u64, &half_eps).max(2);
                    self.greedy(&li, a)
                };
                self.solved.insert(li, z.clone());
                z
            };
            let missed = pts.iter().filter(|&&k| !self.covered_by_any(&zi, &s[k])).count();
            it.good_missed += missed;
            zs.extend(zi);
        }
        it.checks.push(Check::new(
            "bad cells: points in bad cells <= |S|/100",
            count(it.bad_points),
            Bound::exact(count(s.len()) / rational::int(100)),
        ));
        if it.big_r_cells > 0 {
            it.checks.push(Check::new(
                "big-r cells: sum |S cap O_i| <= sum 2|L_i|/r",
                count(big_r_points),
                Bound::exact(big_r_budget),
            ));
        }
        it.checks.push(Check::new(
            "good cells: missed points <= K L^{3/2+eps} r^-2 / 400",
            count(it.good_missed),
            self.main_bound(rational::rat(1, 400), l),
        ));
        let comps: Vec<TriPoly> = part.poly.components().into_iter().map(|c| c.normalized()).collect();
        it.wall_components = comps.len();
        it.wall_missed = part
            .on_boundary
            .iter()
            .filter(|&&k| !self.covered_by_any(&comps, &s[k]))
            .count();
        it.checks.push(Check::new(
            "cell walls: missed boundary points <= 10 D L / r",
            count(it.wall_missed),
            Bound::exact(rational::rat(10 * d as i64 * l as i64, self.r as i64)),
        ));
        zs.extend(comps);
        (it, zs)
    }
}

/// Runs the decomposition on a family of distinct lines.
pub fn cluster_decompose(lines: &[Line3], r: usize, cfg: &ClusterConfig) -> Result<ClusterResult> {
    let l = lines.len();
    validate(l, r, cfg)?;
    let map = compute_rich_points(lines)?;
    let rp = r_prime(r);
    let mut ctx = Ctx {
        lines,
        map: &map,
        cfg,
        r,
        r_prime: rp,
        members: HashMap::new(),
        solved: HashMap::new(),
        nodes: Vec::new(),
    };
    let all: Vec<usize> = (0..l).collect();
    let (kept, collected) = ctx.node(&all, None, 0);
    let kept_set: HashSet<&TriPoly> = kept.iter().collect();
    let pruned: Vec<&TriPoly> = collected.iter().filter(|z| !kept_set.contains(z)).collect();
    let pruned_members: Vec<Vec<bool>> = pruned.iter().map(|z| ctx.members(z).clone()).collect();
    let dyadic = dyadic_rows(&map, &pruned_members, rp, l, cfg.degree);
    let mut checks = Vec::new();
    let pruned_sum: u64 = dyadic.iter().map(|row| row.rich_sum).sum();
    checks.push(Check::new(
        "pruned surfaces: sum |P_{r'}(L_Z)| <= K L^{3/2+eps} r^-2 / 100",
        rational::int(pruned_sum as i64),
        ctx.main_bound(rational::rat(1, 100), l),
    ));
    let surfaces: Vec<SurfaceCandidate> = kept.into_iter().map(|p| SurfaceCandidate::new(p, lines)).collect();
    let residual = residual_points(&map, &surfaces, r, rp);
    let trace = ClusterTrace {
        nodes: std::mem::take(&mut ctx.nodes),
        dyadic,
        checks,
    };
    Ok(ClusterResult {
        params: ClusterParams {
            lines: l,
            r,
            r_prime: rp,
            eps: cfg.eps.clone(),
            degree: cfg.degree,
            k: cfg.k.clone(),
            backend: cfg.backend.name(),
            seed: cfg.seed,
            greedy_seeds: cfg.greedy_seeds,
            stop_at_bound: cfg.stop_at_bound,
            iterations: iteration_cap(l),
        },
        surfaces,
        rich: map.count_rich(r) as usize,
        residual,
        trace,
    })
}

fn dyadic_rows(map: &RichPointMap, members: &[Vec<bool>], rp: usize, l: usize, d: u32) -> Vec<DyadicRow> {
    let stats: Vec<(usize, u64)> = members
        .par_iter()
        .map(|m| {
            let lz = m.iter().filter(|&&b| b).count();
            let rich = map
                .entries()
                .values()
                .filter(|ls| ls.iter().filter(|&&i| m[i as usize]).count() >= rp)
                .count() as u64;
            (lz, rich)
        })
        .collect();
    let mut rows: BTreeMap<u32, (usize, u64)> = BTreeMap::new();
    for (lz, rich) in stats {
        let s = if lz <= 1 { 0 } else { usize::BITS - 1 - lz.leading_zeros() };
        let e = rows.entry(s).or_insert((0, 0));
        e.0 += 1;
        e.1 += rich;
    }
    rows.into_iter()
        .map(|(s, (surfaces, rich_sum))| {
            let two_s = 1u128 << s;
            let count_bound = rational::rat(2 * l as i64, two_s as i64);
            DyadicRow {
                s,
                surfaces,
                rich_sum,
                count_bound_applies: two_s * two_s > 4 * (d as u128) * (d as u128) * l as u128,
                count_holds: count(surfaces) <= count_bound,
                count_bound,
            }
        })
        .collect()
}

/// `P_r \ U_Z P_{r'}(L_Z)` from a rich-point map and surface line lists.
pub fn residual_points(map: &RichPointMap, surfaces: &[SurfaceCandidate], r: usize, rp: usize) -> Vec<Point3> {
    let sets: Vec<HashSet<u32>> = surfaces
        .iter()
        .map(|s| s.lines.iter().map(|&i| i as u32).collect())
        .collect();
    map.entries()
        .iter()
        .filter(|(_, ls)| ls.len() >= r)
        .filter(|(_, ls)| !sets.iter().any(|set| ls.iter().filter(|i| set.contains(i)).count() >= rp))
        .map(|(p, _)| p.clone())
        .collect()
}

/// Post-hoc check of the four conclusions, recomputed from the raw
/// definitions with an independent line-membership test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterVerification {
    pub degrees_hold: bool,
    /// Surface line lists agree with membership by sampling `D + 1` points.
    pub membership_agrees: bool,
    pub line_counts_hold: bool,
    pub surface_count: usize,
    pub surface_count_holds: bool,
    pub residual: usize,
    pub residual_matches: bool,
    pub residual_bound_holds: bool,
    pub max_shared: usize,
    pub shared_holds: bool,
    pub irreducibility: Vec<String>,
}

impl ClusterVerification {
    pub fn holds(&self) -> bool {
        self.degrees_hold
            && self.membership_agrees
            && self.line_counts_hold
            && self.surface_count_holds
            && self.residual_matches
            && self.residual_bound_holds
            && self.shared_holds
    }
}

pub fn verify_cluster(res: &ClusterResult, lines: &[Line3]) -> Result<ClusterVerification> {
    let p = &res.params;
    let l = lines.len();
    if l != p.lines {
        return Err(Error::Format(format!("result is for {} lines, got {l}", p.lines)));
    }
    let map = compute_rich_points(lines)?;
    let half = rational::rat(1, 2);
    let mut membership_agrees = true;
    let mut recomputed = Vec::new();
    for s in &res.surfaces {
        let ls: Vec<usize> = (0..l).filter(|&i| s.poly.vanishes_at_line_samples(&lines[i])).collect();
        membership_agrees &= ls == s.lines;
        recomputed.push(SurfaceCandidate {
            poly: s.poly.clone(),
            lines: ls,
            irreducibility: s.irreducibility.clone(),
        });
    }
    let line_counts_hold = recomputed.iter().all(|s| {
        rational::cmp_pow(&count(s.lines.len()), l as u64, &(&half + &p.eps)) != Ordering::Less
    });
    let n = recomputed.len();
    let surface_count_holds =
        rational::cmp_pow(&(count(n) / rational::int(2)), l as u64, &(&half - &p.eps)) != Ordering::Greater;
    let residual = residual_points(&map, &recomputed, p.r, p.r_prime);
    let r2 = count(p.r * p.r);
    let bound = Bound::new(&p.k / r2, l as u64, rational::rat(3, 2) + &p.eps);
    let mut max_shared = 0;
    for (i, a) in recomputed.iter().enumerate() {
        let set: HashSet<usize> = a.lines.iter().copied().collect();
        for b in &recomputed[i + 1..] {
            max_shared = max_shared.max(b.lines.iter().filter(|k| set.contains(k)).count());
        }
    }
    let d2 = (p.degree * p.degree) as usize;
    Ok(ClusterVerification {
        degrees_hold: recomputed.iter().all(|s| s.poly.degree() <= p.degree && !s.poly.is_zero()),
        membership_agrees,
        line_counts_hold,
        surface_count: n,
        surface_count_holds,
        residual: residual.len(),
        residual_matches: residual == res.residual,
        residual_bound_holds: bound.admits(&count(residual.len())),
        max_shared,
        shared_holds: max_shared <= d2,
        irreducibility: recomputed.iter().map(|s| s.irreducibility.label().to_string()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainIncidReport {
    pub lines: usize,
    pub r: usize,
    pub rich: usize,
    pub surfaces: usize,
    pub bound: Bound,
    /// `|P_r| <= K L^{3/2+eps} r^-2`; only asserted when no surface was found.
    pub holds: Option<bool>,
}

pub fn verify_mainincid(lines: &[Line3], r: usize, cfg: &ClusterConfig) -> Result<(MainIncidReport, ClusterResult)> {
    let res = cluster_decompose(lines, r, cfg)?;
    let l = lines.len();
    let bound = Bound::new(&cfg.k / count(r * r), l as u64, rational::rat(3, 2) + &cfg.eps);
    let holds = res.surfaces.is_empty().then(|| bound.admits(&count(res.rich)));
    let rep = MainIncidReport {
        lines: l,
        r,
        rich: res.rich,
        surfaces: res.surfaces.len(),
        bound,
        holds,
    };
    Ok((rep, res))
}
