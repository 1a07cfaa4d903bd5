//! Simultaneous bisection rounds in the Veronese lift.
//!
//! Round `t` looks for one polynomial of the smallest degree `d` whose
//! monomial space has more than `k` dimensions, `k` being the number of
//! nonempty cells, and which splits every cell in half. The search runs in
//! floating point: Gauss-Newton on smoothed per-cell discrepancies with a
//! shrinking smoothing width, then a polish that pins each cell's median
//! point to the zero set and re-picks the medians. The candidate is
//! then made exact (free coefficients rounded, the rest solved over the
//! rationals so the medians lie exactly on the zero set) and every cell's
//! split is checked with exact signs.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::planes::random_direction;
use super::{group_parts, median_cut, plane, Backend, PartitionResult, RoundReport};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::linalg;
use crate::poly::{self, monomials, Exps, TriPoly};
use crate::rational::{self, Rational};

const ATTEMPTS: usize = 12;
const SMOOTH_STEPS: usize = 12;
const POLISH: usize = 25;
const FREE_DENOMINATOR: i64 = 1 << 24;

/// Smallest `d` with `C(d+3, 3) - 1 >= parts`.
pub fn round_degree(parts: usize) -> u32 {
    (1..).find(|&d| monomials(d).len() > parts).unwrap()
}

fn monomial_values(y: &[f64; 3], exps: &[Exps]) -> Vec<f64> {
    exps.iter()
        .map(|e| y[0].powi(e[0] as i32) * y[1].powi(e[1] as i32) * y[2].powi(e[2] as i32))
        .collect()
}

/// Simultaneous-bisection partition. Rounds continue while the degree
/// budget allows a full round. A round whose search fails at the smallest
/// degree is retried at higher degrees the budget still allows; if all
/// fail it is replaced by a median plane through the heaviest cell and
/// marked as a fallback.
pub fn partition_lifted(points: &[Point3], degree: u32, seed: u64) -> Result<PartitionResult> {
    if degree < 2 {
        return Err(Error::DegreeTooSmall { got: degree, min: 2 });
    }
    if points.len() < 2 {
        return Err(Error::TooFewPoints { got: points.len(), min: 2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (shift, scale) = normalization(points);
    let local: Vec<Point3> = points
        .iter()
        .map(|x| Point3(std::array::from_fn(|i| (&x.0[i] - &shift[i]) / &scale)))
        .collect();
    let local_f: Vec<[f64; 3]> = local.iter().map(Point3::to_f64).collect();

    let mut signs: Vec<Vec<i8>> = vec![Vec::new(); points.len()];
    let mut factors = Vec::new();
    let mut rounds = Vec::new();
    let mut used = 0u32;
    loop {
        let parts: Vec<Vec<usize>> = group_parts(&signs).into_values().collect();
        if parts.is_empty() {
            break;
        }
        let d = round_degree(parts.len());
        let largest_part = parts.iter().map(Vec::len).max().unwrap();
        if used + d > degree && used >= degree {
            break;
        }
        // Raise the degree within the remaining budget when a round fails.
        let search = (d..=degree - used).find_map(|e| {
            bisect_round(&local, &local_f, &parts, e, &mut rng).map(|(g, s, a)| (e, g, s, a))
        });
        match search {
            Some((d, g, new_signs, attempts)) => {
                let largest_side = largest_side(&parts, &new_signs);
                for (s, n) in signs.iter_mut().zip(&new_signs) {
                    s.push(*n);
                }
                factors.push(g.substitute_affine(&shift, &scale));
                rounds.push(RoundReport {
                    degree: d,
                    parts: parts.len(),
                    largest_part,
                    largest_side,
                    verified: sides_ok(&parts, &new_signs, false),
                    fallback: false,
                    attempts,
                });
                used += d;
            }
            None => {
                // Median plane through the heaviest part.
                let heaviest = parts.iter().max_by_key(|p| p.len()).unwrap();
                let mut dir = Point3::origin();
                dir.0[rounds.len() % 3] = rational::int(1);
                let (mut c, mut pos, mut neg, _) = median_cut(points, heaviest, &dir);
                if pos.max(neg) > heaviest.len() / 2 {
                    dir = random_direction(&mut rng);
                    (c, pos, neg, _) = median_cut(points, heaviest, &dir);
                }
                for (s, x) in signs.iter_mut().zip(points) {
                    s.push(rational::sign(&(x.dot(&dir) - &c)));
                }
                factors.push(plane(&dir, &c));
                rounds.push(RoundReport {
                    degree: 1,
                    parts: parts.len(),
                    largest_part,
                    largest_side: pos.max(neg),
                    verified: false,
                    fallback: true,
                    attempts: if used + d <= degree { ATTEMPTS } else { 0 },
                });
                used += 1;
            }
        }
        if used >= degree {
            break;
        }
    }
    Ok(PartitionResult::from_signs(Backend::Lifted, degree, factors, &signs, rounds))
}

/// Shift to a rounded centroid and scale by a power of two so the local
/// coordinates lie in `[-1, 1]`.
fn normalization(points: &[Point3]) -> ([Rational; 3], Rational) {
    let fs: Vec<[f64; 3]> = points.iter().map(Point3::to_f64).collect();
    let n = fs.len() as f64;
    let mean: [f64; 3] = std::array::from_fn(|i| fs.iter().map(|p| p[i]).sum::<f64>() / n);
    let shift: [Rational; 3] = std::array::from_fn(|i| rational::round_to_den(mean[i], 64));
    let sf: [f64; 3] = std::array::from_fn(|i| rational::to_f64(&shift[i]));
    let spread = fs
        .iter()
        .flat_map(|p| (0..3).map(move |i| (p[i] - sf[i]).abs()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let e = spread.log2().ceil() as i32;
    let scale = if e >= 0 {
        rational::int(1i64 << e.min(62))
    } else {
        rational::rat(1, 1i64 << (-e).min(62))
    };
    (shift, scale)
}

/// `(pos, neg)` per part.
fn side_counts(parts: &[Vec<usize>], signs: &[i8]) -> Vec<(usize, usize)> {
    parts
        .iter()
        .map(|p| {
            let pos = p.iter().filter(|&&i| signs[i] > 0).count();
            let neg = p.iter().filter(|&&i| signs[i] < 0).count();
            (pos, neg)
        })
        .collect()
}

fn largest_side(parts: &[Vec<usize>], signs: &[i8]) -> usize {
    side_counts(parts, signs).iter().map(|&(p, n)| p.max(n)).max().unwrap_or(0)
}

/// Both open sides of every part are at most `floor(m/2)` (strict) or
/// `ceil(m/2)`.
fn sides_ok(parts: &[Vec<usize>], signs: &[i8], strict: bool) -> bool {
    parts.iter().zip(side_counts(parts, signs)).all(|(p, (pos, neg))| {
        let cap = if strict { p.len() / 2 } else { p.len().div_ceil(2) };
        pos <= cap && neg <= cap
    })
}

type RoundOutcome = (TriPoly, Vec<i8>, usize);

fn bisect_round(
    local: &[Point3],
    local_f: &[[f64; 3]],
    parts: &[Vec<usize>],
    d: u32,
    rng: &mut ChaCha8Rng,
) -> Option<RoundOutcome> {
    let exps = monomials(d);
    let m = exps.len();
    let values: Vec<Vec<f64>> = local_f.iter().map(|y| monomial_values(y, &exps)).collect();
    let mut best: Option<RoundOutcome> = None;
    for attempt in 1..=ATTEMPTS {
        let mut f: DVector<f64> = DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0));
        f.normalize_mut();
        f = smooth_descent(parts, &values, f);
        // Polish: pin the medians to the zero set and re-pick them.
        for _ in 0..POLISH {
            let (med, h) = median_values(parts, &values, &f);
            let a = DMatrix::from_fn(med.len(), m, |r, c| values[med[r]][c]);
            let Some(step) = weighted_step(parts, &values, &f, &a, &h) else {
                break;
            };
            f -= step;
            if f.norm() == 0.0 {
                break;
            }
            f.normalize_mut();
            if !float_split_ok(parts, &values, &f, &med) {
                continue;
            }
            let Some(g) = exact_candidate(local, &med, &exps, &f) else {
                break;
            };
            let signs: Vec<i8> = local.par_iter().map(|y| g.sign_at(y)).collect();
            if sides_ok(parts, &signs, true) {
                return Some((g, signs, attempt));
            }
            if best.is_none() && sides_ok(parts, &signs, false) {
                best = Some((g, signs, attempt));
            }
        }
    }
    best
}

/// Gauss-Newton on the smoothed discrepancies
/// `phi_i(f) = mean over part i of tanh(f(x) / tau)`, with `tau` halved
/// from the typical value size down to well below the point spacing.
fn smooth_descent(parts: &[Vec<usize>], values: &[Vec<f64>], mut f: DVector<f64>) -> DVector<f64> {
    let mut mags: Vec<f64> = values.iter().map(|v| dot(v, &f).abs()).collect();
    mags.sort_by(f64::total_cmp);
    let mut tau = mags[mags.len() / 2].max(1e-12);
    let n = parts.iter().map(Vec::len).max().unwrap_or(1) as f64;
    let floor = tau / (16.0 * n);
    while tau > floor {
        let (mut phi, mut jac) = soft_discrepancy(parts, values, &f, tau);
        for _ in 0..SMOOTH_STEPS {
            let Some(step) = newton_step(&jac, &phi) else {
                break;
            };
            let res = phi.norm();
            let mut alpha = 1.0;
            let mut moved = false;
            while alpha > 1e-4 {
                let mut g = &f - &step * alpha;
                g.normalize_mut();
                let (p2, j2) = soft_discrepancy(parts, values, &g, tau);
                if p2.norm() < res {
                    (f, phi, jac) = (g, p2, j2);
                    moved = true;
                    break;
                }
                alpha /= 2.0;
            }
            if !moved || phi.amax() * n < 0.25 {
                break;
            }
        }
        tau /= 2.0;
    }
    f
}

fn soft_discrepancy(
    parts: &[Vec<usize>],
    values: &[Vec<f64>],
    f: &DVector<f64>,
    tau: f64,
) -> (DVector<f64>, DMatrix<f64>) {
    let m = f.len();
    let mut phi = DVector::zeros(parts.len());
    let mut jac = DMatrix::zeros(parts.len(), m);
    for (i, p) in parts.iter().enumerate() {
        let w = 1.0 / p.len() as f64;
        for &x in p {
            let t = (dot(&values[x], f) / tau).tanh();
            phi[i] += t * w;
            let slope = (1.0 - t * t) * w / tau;
            for (c, v) in values[x].iter().enumerate() {
                jac[(i, c)] += slope * v;
            }
        }
    }
    (phi, jac)
}

/// Lower median point of each part under `f` (ties broken by index) and
/// the value of `f` there.
fn median_values(parts: &[Vec<usize>], values: &[Vec<f64>], f: &DVector<f64>) -> (Vec<usize>, DVector<f64>) {
    let med: Vec<(usize, f64)> = parts
        .iter()
        .map(|p| {
            let mut v: Vec<(f64, usize)> = p.iter().map(|&i| (dot(&values[i], f), i)).collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            let (val, i) = v[(v.len() - 1) / 2];
            (i, val)
        })
        .collect();
    let h = DVector::from_iterator(med.len(), med.iter().map(|x| x.1));
    (med.into_iter().map(|x| x.0).collect(), h)
}

fn dot(v: &[f64], f: &DVector<f64>) -> f64 {
    v.iter().zip(f.iter()).map(|(a, b)| a * b).sum()
}

/// The `s` with `a s = h` that moves the values of `f` least, weighting
/// each point by `1 / (f(x)^2 + delta^2)` so points near the zero set stay
/// put.
fn weighted_step(
    parts: &[Vec<usize>],
    values: &[Vec<f64>],
    f: &DVector<f64>,
    a: &DMatrix<f64>,
    h: &DVector<f64>,
) -> Option<DVector<f64>> {
    let m = f.len();
    let delta = h.amax().max(1e-15);
    let mut g = DMatrix::<f64>::zeros(m, m);
    for p in parts {
        for &x in p {
            let v = &values[x];
            let fx = dot(v, f);
            let w = 1.0 / (fx * fx + delta * delta);
            for r in 0..m {
                let wr = w * v[r];
                for c in r..m {
                    g[(r, c)] += wr * v[c];
                }
            }
        }
    }
    for r in 0..m {
        for c in 0..r {
            g[(r, c)] = g[(c, r)];
        }
    }
    let ridge = 1e-12 * g.trace() / m as f64;
    for r in 0..m {
        g[(r, r)] += ridge;
    }
    let ginv = g.pseudo_inverse(1e-14).ok()?;
    let gat = &ginv * a.transpose();
    let inner = (a * &gat).pseudo_inverse(1e-14).ok()?;
    Some(gat * (inner * h))
}

/// Minimum-norm `s` with `a s = h`.
fn newton_step(a: &DMatrix<f64>, h: &DVector<f64>) -> Option<DVector<f64>> {
    let gram = a * a.transpose();
    let pinv = gram.pseudo_inverse(1e-12).ok()?;
    Some(a.transpose() * (pinv * h))
}

/// Float pre-check with the medians treated as zeros.
fn float_split_ok(parts: &[Vec<usize>], values: &[Vec<f64>], f: &DVector<f64>, medians: &[usize]) -> bool {
    parts.iter().zip(medians).all(|(p, &med)| {
        let mut pos = 0;
        let mut neg = 0;
        for &i in p {
            if i == med {
                continue;
            }
            let v = dot(&values[i], f);
            if v > 0.0 {
                pos += 1;
            } else {
                neg += 1;
            }
        }
        pos <= p.len() / 2 && neg <= p.len() / 2
    })
}

/// Rational polynomial vanishing exactly at the medians, close to `f`.
fn exact_candidate(local: &[Point3], medians: &[usize], exps: &[Exps], f: &DVector<f64>) -> Option<TriPoly> {
    let m = exps.len();
    let mut rows: Vec<Vec<Rational>> = medians.iter().map(|&i| poly::monomial_values(&local[i], exps)).collect();
    let pivots = linalg::rref(&mut rows, m);
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    let top = free.iter().map(|&j| f[j].abs()).fold(0.0, f64::max);
    if top == 0.0 {
        return None;
    }
    let mut g = vec![Rational::zero(); m];
    for &j in &free {
        g[j] = rational::round_to_den(f[j] / top, FREE_DENOMINATOR);
    }
    for (r, &p) in pivots.iter().enumerate() {
        let mut acc = Rational::zero();
        for &j in &free {
            acc -= &rows[r][j] * &g[j];
        }
        g[p] = acc;
    }
    let poly = TriPoly::from_terms(exps.iter().copied().zip(g));
    (poly.degree() > 0).then_some(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::verify_polyham;
    use crate::rational::rat;

    fn random_points(n: usize, seed: u64) -> Vec<Point3> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Point3(std::array::from_fn(|_| rat(rng.gen_range(-64..=64), 64))))
            .collect()
    }

    #[test]
    fn round_degrees() {
        assert_eq!(round_degree(1), 1);
        assert_eq!(round_degree(3), 1);
        assert_eq!(round_degree(4), 2);
        assert_eq!(round_degree(16), 3);
        assert_eq!(round_degree(32), 4);
        assert_eq!(round_degree(64), 6);
    }

    #[test]
    fn two_clusters() {
        let mut pts = Vec::new();
        for i in 0..50i64 {
            pts.push(Point3::new(rat(i, 50), rat(i * i % 17, 17), rat(i % 5, 5)));
            pts.push(Point3::new(rat(i, 50) + rat(10, 1), rat(i * 7 % 13, 13), rat(i % 3, 3)));
        }
        let part = partition_lifted(&pts, 2, 0).unwrap();
        let rep = verify_polyham(&part, &pts).unwrap();
        assert!(rep.conservation);
        assert!(part.rounds.iter().all(|r| r.verified));
        assert!(rep.max_cell <= 50);
    }

    #[test]
    fn uniform_points_degree_four() {
        let pts = random_points(1000, 3);
        let part = partition_lifted(&pts, 4, 1).unwrap();
        let rep = verify_polyham(&part, &pts).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.fallbacks, 0);
        assert_eq!(part.cells.len(), 8);
        assert!(rep.max_cell <= 125, "{rep:?}");
    }

    #[test]
    fn collinear_points_stay_consistent() {
        let pts: Vec<Point3> = (0..30).map(|i| Point3::from_ints(i, 2 * i, -i)).collect();
        let part = partition_lifted(&pts, 5, 2).unwrap();
        let rep = verify_polyham(&part, &pts).unwrap();
        assert!(rep.conservation);
    }
}
