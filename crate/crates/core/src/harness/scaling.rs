use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::es::{census_from_map, dd_bound_from_census, family_lines, PlanarConfig};
use crate::incidence::compute_rich_points;
use crate::rational::{self, serde_str, Rational};

/// Slack added to `3 + eps` when judging the fitted slope.
pub fn fit_tolerance() -> Rational {
    rational::rat(1, 5)
}

/// Quadruple count of the unit square.
pub const UNIT_SQUARE_QUADRUPLES: u64 = 80;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub side: usize,
    pub lines: usize,
    pub pairs: u64,
    pub quadruples: u64,
    pub parallel: u64,
    pub intersecting: u64,
    pub distinct_distances: usize,
    /// `(N^4 - 2N^3) / |Q|`
    #[serde(with = "serde_str")]
    pub dd_bound: Rational,
    pub dd_holds: bool,
    pub seconds_approx: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope_approx: f64,
    pub intercept_approx: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn loglog_fit(pts: &[(f64, f64)]) -> Option<Fit> {
    let pts: Vec<(f64, f64)> = pts
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(Fit {
        slope_approx: slope,
        intercept_approx: my - slope * mx,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    #[serde(with = "serde_str")]
    pub eps: Rational,
    pub rows: Vec<ScalingRow>,
    /// The unit square, checked against its pinned count.
    pub fixture: ScalingRow,
    pub fixture_holds: bool,
    pub fit: Option<Fit>,
    /// `3 + eps + tolerance`
    #[serde(with = "serde_str")]
    pub slope_limit: Rational,
    pub slope_holds: bool,
    /// The time budget ran out before every size was measured.
    pub partial: bool,
}

impl ScalingReport {
    pub fn passed(&self) -> bool {
        !self.partial && self.fixture_holds && self.slope_holds && self.rows.iter().all(|r| r.dd_holds)
    }
}

/// Measures `|Q(P)|` through rich points and checks the distinct-distance bound.
pub fn scaling_row(p: &PlanarConfig, side: usize) -> Result<ScalingRow> {
    let start = Instant::now();
    let lines = family_lines(p);
    let map = compute_rich_points(&lines)?;
    let census = census_from_map(p, &map);
    let dd = dd_bound_from_census(p, &census)?;
    let stats = map.pair_stats();
    Ok(ScalingRow {
        n: p.len(),
        side,
        lines: lines.len(),
        pairs: stats.intersecting + stats.parallel + stats.skew,
        quadruples: census.total,
        parallel: census.parallel,
        intersecting: census.intersecting,
        distinct_distances: dd.distinct,
        dd_bound: dd.bound,
        dd_holds: dd.holds,
        seconds_approx: start.elapsed().as_secs_f64(),
    })
}

fn square_side(n: usize) -> Result<usize> {
    let s = (n as f64).sqrt().round() as usize;
    if s < 2 || s * s != n {
        return Err(Error::InvalidInstance(format!("grid size {n} is not a square of a side >= 2")));
    }
    Ok(s)
}

fn square_grid(side: usize) -> Result<PlanarConfig> {
    let pts: Vec<(i64, i64)> = (0..side as i64).flat_map(|i| (0..side as i64).map(move |j| (i, j))).collect();
    PlanarConfig::from_ints(&pts)
}

pub fn run_quadruple_scaling(sizes: &[usize], eps: &Rational) -> Result<ScalingReport> {
    run_quadruple_scaling_with(sizes, eps, None)
}

/// Square grids of the given sizes `N`. Sizes run in increasing order; once
/// `budget` is spent the remaining sizes are skipped and the report is
/// flagged partial.
pub fn run_quadruple_scaling_with(sizes: &[usize], eps: &Rational, budget: Option<Duration>) -> Result<ScalingReport> {
    let mut sides = sizes.iter().map(|&n| square_side(n)).collect::<Result<Vec<_>>>()?;
    sides.sort_unstable();
    sides.dedup();
    let start = Instant::now();
    let fixture = scaling_row(&square_grid(2)?, 2)?;
    let mut rows = Vec::new();
    let mut partial = false;
    for side in sides {
        if budget.is_some_and(|b| start.elapsed() > b) {
            partial = true;
            break;
        }
        rows.push(scaling_row(&square_grid(side)?, side)?);
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.quadruples as f64)).collect();
    let fit = loglog_fit(&pts);
    let slope_limit = rational::int(3) + eps + fit_tolerance();
    let slope_holds = fit
        .as_ref()
        .is_some_and(|f| f.slope_approx <= rational::to_f64(&slope_limit));
    Ok(ScalingReport {
        eps: eps.clone(),
        fixture_holds: fixture.quadruples == UNIT_SQUARE_QUADRUPLES && fixture.dd_holds,
        fixture,
        rows,
        fit,
        slope_limit,
        slope_holds,
        partial,
    })
}
