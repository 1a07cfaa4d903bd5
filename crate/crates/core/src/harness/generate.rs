use std::collections::BTreeSet;
use std::path::PathBuf;

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::es::{family_lines, PlanarConfig};
use crate::geometry::{Line3, Point2, Point3};
use crate::io::InstanceFile;
use crate::rational::{self, serde_str, Rational};

/// Default denominator of random coordinates.
pub const DEFAULT_Q: i64 = 64;

fn default_q() -> i64 {
    DEFAULT_Q
}

fn default_range() -> Rational {
    rational::int(1)
}

/// Largest absolute value of an integer direction entry for random lines.
const DIR_BOUND: i64 = 8;

/// What to generate. Random kinds draw coordinates `k/q` in `[-range, range]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InstanceSpec {
    /// The `n x m` integer grid (`m` defaults to `n`).
    Grid2d {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
    },
    Random2d {
        n: usize,
        #[serde(default = "default_q")]
        q: i64,
        #[serde(default = "default_range", with = "serde_str")]
        range: Rational,
        #[serde(default)]
        seed: u64,
    },
    /// `n` points on the x-axis.
    Collinear2d { n: usize },
    /// The line family of a planar configuration.
    EsFromConfig { config: Box<InstanceSpec> },
    RandomLines3d {
        n: usize,
        #[serde(default = "default_q")]
        q: i64,
        #[serde(default = "default_range", with = "serde_str")]
        range: Rational,
        #[serde(default)]
        seed: u64,
    },
    /// `n` lines in the plane `x3 = 0`.
    CoplanarLines {
        n: usize,
        #[serde(default = "default_q")]
        q: i64,
        #[serde(default = "default_range", with = "serde_str")]
        range: Rational,
        #[serde(default)]
        seed: u64,
    },
    /// `n` lines through the origin with directions `(1, k, k^2)`.
    Pencil { n: usize },
    /// `n` lines from each ruling of `x1 x2 - x3 = 0`.
    RegulusRulings { n: usize },
    FromFile { path: PathBuf },
}

impl InstanceSpec {
    /// Replaces the seed of random kinds, including nested ones.
    pub fn with_seed(mut self, s: u64) -> InstanceSpec {
        match &mut self {
            InstanceSpec::Random2d { seed, .. }
            | InstanceSpec::RandomLines3d { seed, .. }
            | InstanceSpec::CoplanarLines { seed, .. } => *seed = s,
            InstanceSpec::EsFromConfig { config } => *config = Box::new(config.as_ref().clone().with_seed(s)),
            _ => {}
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Planar(PlanarConfig),
    Points3d(Vec<Point3>),
    Lines(Vec<Line3>),
}

impl Instance {
    pub fn to_file(&self) -> InstanceFile {
        match self {
            Instance::Planar(p) => InstanceFile::Points {
                points: p.points().to_vec(),
            },
            Instance::Points3d(p) => InstanceFile::Points3d { points: p.clone() },
            Instance::Lines(l) => InstanceFile::Lines { lines: l.clone() },
        }
    }

    pub fn from_file(f: InstanceFile) -> Result<Instance> {
        Ok(match f {
            InstanceFile::Points { points } => Instance::Planar(PlanarConfig::new(points)?),
            InstanceFile::Points3d { points } => Instance::Points3d(points),
            InstanceFile::Lines { lines } => Instance::Lines(check_distinct(lines)?),
        })
    }

    /// Reads an instance file, or a generator spec which is then run.
    pub fn load(path: &std::path::Path) -> Result<Instance> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        match crate::io::from_json::<InstanceFile>(&s) {
            Ok(f) => Instance::from_file(f),
            Err(e) => match crate::io::from_json::<InstanceSpec>(&s) {
                Ok(spec) => generate(&spec),
                Err(_) => Err(e),
            },
        }
    }

    /// Lines of the instance; planar configurations give their line family.
    pub fn lines(&self) -> Result<Vec<Line3>> {
        match self {
            Instance::Planar(p) => Ok(family_lines(p)),
            Instance::Lines(l) => Ok(l.clone()),
            Instance::Points3d(_) => Err(Error::InvalidInstance("expected lines, got points in space".into())),
        }
    }

    pub fn planar(&self) -> Result<&PlanarConfig> {
        match self {
            Instance::Planar(p) => Ok(p),
            _ => Err(Error::InvalidInstance("expected a planar configuration".into())),
        }
    }

    pub fn points3d(&self) -> Result<&[Point3]> {
        match self {
            Instance::Points3d(p) => Ok(p),
            _ => Err(Error::InvalidInstance("expected points in space".into())),
        }
    }
}

fn check_distinct(lines: Vec<Line3>) -> Result<Vec<Line3>> {
    let mut seen = BTreeSet::new();
    for (i, l) in lines.iter().enumerate() {
        if !seen.insert(l) {
            return Err(Error::DuplicateLine(i));
        }
    }
    Ok(lines)
}

fn positive(name: &str, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInstance(format!("{name} must be positive")));
    }
    Ok(())
}

/// Numerators `k` with `|k/q| <= range`.
fn numerator_bound(q: i64, range: &Rational) -> Result<i64> {
    if q <= 0 {
        return Err(Error::InvalidInstance(format!("denominator q must be positive, got {q}")));
    }
    if range.is_negative() {
        return Err(Error::InvalidInstance("range must be nonnegative".into()));
    }
    let k = rational::floor(&(range * rational::int(q)));
    i64::try_from(&k).map_err(|_| Error::InvalidInstance("range too large".into()))
}

fn draw(rng: &mut ChaCha8Rng, k: i64, q: i64) -> Rational {
    rational::rat(rng.gen_range(-k..=k), q)
}

fn random_points2(n: usize, q: i64, range: &Rational, seed: u64) -> Result<Vec<Point2>> {
    positive("n", n)?;
    let k = numerator_bound(q, range)?;
    let side = 2 * k as u128 + 1;
    let total = side * side;
    if n as u128 > total {
        return Err(Error::InvalidInstance(format!("{n} distinct points do not fit in a grid of {total}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if (n as u128) * 4 >= total {
        let mut all: Vec<Point2> = (-k..=k)
            .flat_map(|a| (-k..=k).map(move |b| Point2::new(rational::rat(a, q), rational::rat(b, q))))
            .collect();
        all.shuffle(&mut rng);
        all.truncate(n);
        return Ok(all);
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point2::new(draw(&mut rng, k, q), draw(&mut rng, k, q));
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    Ok(out)
}

/// `n` distinct points `k/q` in `[-1, 1]^3`.
pub fn random_points3(n: usize, q: i64, seed: u64) -> Result<Vec<Point3>> {
    positive("n", n)?;
    let k = numerator_bound(q, &rational::int(1))?;
    let side = 2 * k as u128 + 1;
    if n as u128 > side * side * side {
        return Err(Error::InvalidInstance(format!("{n} distinct points do not fit")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point3::new(draw(&mut rng, k, q), draw(&mut rng, k, q), draw(&mut rng, k, q));
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    Ok(out)
}

/// Draws lines until `n` distinct ones are found, giving up after `50 n` draws.
fn distinct_lines(n: usize, mut next: impl FnMut() -> Option<Line3>) -> Result<Vec<Line3>> {
    positive("n", n)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    for _ in 0..50 * n {
        if out.len() == n {
            break;
        }
        if let Some(l) = next() {
            if seen.insert(l.clone()) {
                out.push(l);
            }
        }
    }
    if out.len() < n {
        return Err(Error::InvalidInstance(format!(
            "only {} distinct lines found; widen the range or denominator",
            out.len()
        )));
    }
    Ok(out)
}

fn grid(n: usize, m: usize) -> Result<PlanarConfig> {
    positive("n", n)?;
    positive("m", m)?;
    let pts = (0..n as i64).flat_map(|i| (0..m as i64).map(move |j| Point2::from_ints(i, j))).collect();
    PlanarConfig::new(pts)
}

/// Builds the instance. Output depends only on the spec.
pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    Ok(match spec {
        InstanceSpec::Grid2d { n, m } => Instance::Planar(grid(*n, m.unwrap_or(*n))?),
        InstanceSpec::Random2d { n, q, range, seed } => {
            Instance::Planar(PlanarConfig::new(random_points2(*n, *q, range, *seed)?)?)
        }
        InstanceSpec::Collinear2d { n } => {
            positive("n", *n)?;
            Instance::Planar(PlanarConfig::new((0..*n as i64).map(|i| Point2::from_ints(i, 0)).collect())?)
        }
        InstanceSpec::EsFromConfig { config } => match generate(config)? {
            Instance::Planar(p) => Instance::Lines(family_lines(&p)),
            _ => return Err(Error::InvalidInstance("es-from-config needs a planar configuration".into())),
        },
        InstanceSpec::RandomLines3d { n, q, range, seed } => {
            let k = numerator_bound(*q, range)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Instance::Lines(distinct_lines(*n, || {
                let base = Point3::new(draw(&mut rng, k, *q), draw(&mut rng, k, *q), draw(&mut rng, k, *q));
                let dir: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-DIR_BOUND..=DIR_BOUND));
                Line3::new(base, Point3::from_ints(dir[0], dir[1], dir[2])).ok()
            })?)
        }
        InstanceSpec::CoplanarLines { n, q, range, seed } => {
            let k = numerator_bound(*q, range)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            Instance::Lines(distinct_lines(*n, || {
                let b = draw(&mut rng, k, *q);
                let a = draw(&mut rng, k, *q);
                let base = Point3::new(rational::int(0), b, rational::int(0));
                Line3::new(base, Point3::new(rational::int(1), a, rational::int(0))).ok()
            })?)
        }
        InstanceSpec::Pencil { n } => {
            positive("n", *n)?;
            let lines = (0..*n as i64)
                .map(|k| Line3::new(Point3::origin(), Point3::from_ints(1, k, k * k)))
                .collect::<Result<_>>()?;
            Instance::Lines(lines)
        }
        InstanceSpec::RegulusRulings { n } => Instance::Lines(regulus_rulings(*n)?),
        InstanceSpec::FromFile { path } => Instance::load(path)?,
    })
}

/// `(t, 0, 0) + s (0, 1, t)` and `(0, t, 0) + s (1, 0, t)` for `t = 0..n`.
pub fn regulus_rulings(n: usize) -> Result<Vec<Line3>> {
    positive("n", n)?;
    let mut out = Vec::with_capacity(2 * n);
    for t in 0..n as i64 {
        out.push(Line3::new(Point3::from_ints(t, 0, 0), Point3::from_ints(0, 1, t))?);
    }
    for t in 0..n as i64 {
        out.push(Line3::new(Point3::from_ints(0, t, 0), Point3::from_ints(1, 0, t))?);
    }
    Ok(out)
}
