use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{group_parts, median_cut, plane, Backend, PartitionResult, RoundReport};
use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::rational;

/// Product-of-planes partition.
///
/// Repeatedly takes the heaviest cell and cuts it through the median of its
/// points, along either the next coordinate axis or a seeded generic
/// direction, whichever splits it more evenly (the axis wins ties).
/// Stops after `degree` planes or once every point is on a plane.
pub fn partition_planes(points: &[Point3], degree: u32, seed: u64) -> Result<PartitionResult> {
    if degree < 1 {
        return Err(Error::DegreeTooSmall { got: degree, min: 1 });
    }
    if points.is_empty() {
        return Err(Error::TooFewPoints { got: 0, min: 1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signs: Vec<Vec<i8>> = vec![Vec::new(); points.len()];
    let mut factors = Vec::new();
    let mut rounds = Vec::new();
    while (factors.len() as u32) < degree {
        let parts = group_parts(&signs);
        let Some((_, members)) = parts.iter().max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(a.0)))
        else {
            break;
        };
        let generic = random_direction(&mut rng);
        let mut axis = Point3::origin();
        axis.0[factors.len() % 3] = rational::int(1);
        // Both cuts leave at most floor(m/2) on each side; prefer the one
        // with the larger smaller side.
        let cut = |dir: Point3| {
            let (c, pos, neg, _) = median_cut(points, members, &dir);
            (pos.min(neg), pos.max(neg), dir, c)
        };
        let a = cut(axis);
        let g = cut(generic);
        let (_, largest_side, dir, c) = if g.0 > a.0 { g } else { a };
        let f = plane(&dir, &c);
        for (s, x) in signs.iter_mut().zip(points) {
            s.push(rational::sign(&(x.dot(&dir) - &c)));
        }
        rounds.push(RoundReport {
            degree: 1,
            parts: parts.len(),
            largest_part: members.len(),
            largest_side,
            verified: largest_side <= members.len().div_ceil(2),
            fallback: false,
            attempts: 1,
        });
        factors.push(f);
    }
    Ok(PartitionResult::from_signs(Backend::Planes, degree, factors, &signs, rounds))
}

pub(crate) fn random_direction(rng: &mut ChaCha8Rng) -> Point3 {
    loop {
        let v: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-8..=8));
        if v != [0, 0, 0] {
            return Point3::from_ints(v[0], v[1], v[2]);
        }
    }
}
