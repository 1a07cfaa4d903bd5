use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use richpoint::cluster::{min_k, verify_cluster, verify_mainincid, ClusterConfig};
use richpoint::es::{
    census_from_map, dd_bound_from_census, non_clustering, quadruple_census_bruteforce, quadruple_equivalence,
    vp_suite, BRUTE_FORCE_CAP,
};
use richpoint::harness::{
    emit_plots, generate, random_points3, run_quadruple_scaling_with, CensusRow, ExperimentReport, Instance,
    InstanceSpec, PartitionRow, RichTable, DEFAULT_Q,
};
use richpoint::incidence::{compute_rich_points, p_r, verify_bigr, verify_szemeredi_trotter, RichPointMap};
use richpoint::io::{from_json, to_json};
use richpoint::partition::{line_cell_incidence, partition_lifted, partition_planes, verify_polyham, Backend};
use richpoint::rational::{self, Rational};
use richpoint::Line3;
use serde_json::{json, Map, Value};

use crate::config::Config;
use crate::{Cli, Cmd};

/// Largest `N` for the exhaustive `N^4` checks in `verify`.
const EXHAUSTIVE_MAX: usize = 12;
/// Largest `N` for the plane search in `verify`.
const PLANE_SEARCH_MAX: usize = 20;

struct Env {
    cfg: Config,
    seed: u64,
}

pub fn run(cli: Cli) -> Result<bool> {
    let cfg = Config::load(cli.config.as_deref())?;
    let seed = cfg.pick_or(cli.seed, "seed", 0)?;
    let out = cfg.pick(cli.out, "out")?;
    let env = Env { cfg, seed };
    let (text, passed) = match cli.cmd {
        Cmd::Gen(a) => (gen(&env, a)?, true),
        Cmd::Plot(a) => plot(&env, a)?,
        Cmd::Rich(a) => report(rich(&env, a)?)?,
        Cmd::Quads(a) => report(quads(&env, a)?)?,
        Cmd::Ddbound(a) => report(ddbound(&env, a)?)?,
        Cmd::Partition(a) => report(partition(&env, a)?)?,
        Cmd::Cluster(a) => report(cluster(&env, a)?)?,
        Cmd::Verify(a) => report(verify(&env, a)?)?,
        Cmd::Scale(a) => report(scale(&env, a)?)?,
    };
    match out {
        Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(passed)
}

fn report(r: ExperimentReport) -> Result<(String, bool)> {
    Ok((to_json(&r)?, r.passed()))
}

fn load_input(env: &Env, a: crate::InputArgs) -> Result<(Instance, String)> {
    let path: PathBuf = env.cfg.require(a.input, "input")?;
    let inst = Instance::load(&path).with_context(|| format!("loading {}", path.display()))?;
    Ok((inst, label_of(&path)))
}

fn label_of(path: &Path) -> String {
    path.file_stem().map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned())
}

fn q(x: &Rational) -> String {
    rational::format(x)
}

fn gen(env: &Env, a: crate::GenArgs) -> Result<String> {
    let cfg = &env.cfg;
    let spec_file: Option<PathBuf> = cfg.pick(a.spec, "spec")?;
    let mut spec: InstanceSpec = match spec_file {
        Some(p) => from_json(&std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
        None => {
            let mut m = Map::new();
            m.insert("kind".into(), json!(cfg.require::<String>(a.kind, "kind")?));
            if let Some(n) = cfg.pick::<usize>(a.n, "n")? {
                m.insert("n".into(), json!(n));
            }
            if let Some(v) = cfg.pick::<usize>(a.m, "m")? {
                m.insert("m".into(), json!(v));
            }
            if let Some(v) = cfg.pick::<i64>(a.q, "q")? {
                m.insert("q".into(), json!(v));
            }
            if let Some(v) = cfg.rational(a.range, "range")? {
                m.insert("range".into(), json!(q(&v)));
            }
            if let Some(v) = cfg.pick::<PathBuf>(a.path, "path")? {
                m.insert("path".into(), json!(v));
            }
            serde_json::from_value(Value::Object(m)).context("invalid generator parameters")?
        }
    };
    if cfg.pick_or(a.es.then_some(true), "es", false)? {
        spec = InstanceSpec::EsFromConfig { config: Box::new(spec) };
    }
    spec = spec.with_seed(env.seed);
    Ok(to_json(&generate(&spec)?.to_file())?)
}

fn plot(env: &Env, a: crate::PlotArgs) -> Result<(String, bool)> {
    let path: PathBuf = env.cfg.require(a.report, "report")?;
    let outdir: PathBuf = env.cfg.require(a.outdir, "outdir")?;
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let rep: ExperimentReport = from_json(&text)?;
    let files = emit_plots(&rep, &outdir)?;
    let names: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    Ok((to_json(&names)?, true))
}

/// Smallest `r` with `r^2 > 4L`.
fn big_r_start(l: usize) -> usize {
    let mut r = (2.0 * (l as f64).sqrt()).floor() as usize;
    while r * r <= 4 * l {
        r += 1;
    }
    while r > 1 && (r - 1) * (r - 1) > 4 * l {
        r -= 1;
    }
    r
}

/// Checks `|P_r| <= 2L/r` for every `r > 2 sqrt(L)` up to `L`. Counts vanish
/// beyond the largest multiplicity, so rows stop there.
fn big_r_rows(map: &RichPointMap) -> Result<(Vec<Value>, bool)> {
    let l = map.total_lines();
    let start = big_r_start(l);
    let stop = l.min(map.max_multiplicity().max(start));
    let mut rows = Vec::new();
    let mut ok = true;
    for r in start..=stop {
        let b = verify_bigr(map, r)?;
        ok &= b.holds;
        rows.push(json!({ "r": r, "count": b.count, "bound": q(&b.bound), "holds": b.holds }));
    }
    Ok((rows, ok))
}

fn rich_details(map: &RichPointMap) -> Value {
    let s = map.pair_stats();
    let szt = verify_szemeredi_trotter(map);
    json!({
        "lines": map.total_lines(),
        "intersecting_pairs": s.intersecting,
        "parallel_pairs": s.parallel,
        "skew_pairs": s.skew,
        "rich_points": map.len(),
        "max_multiplicity": map.max_multiplicity(),
        "szemeredi_trotter": { "max_ratio": q(&szt.max_ratio), "argmax": szt.argmax },
    })
}

fn rich(env: &Env, a: crate::RichArgs) -> Result<ExperimentReport> {
    let r: Option<usize> = env.cfg.pick(a.r, "r")?;
    let (inst, label) = load_input(env, a.input)?;
    let lines = inst.lines()?;
    let map = compute_rich_points(&lines)?;
    let mut rep = ExperimentReport::new("rich");
    rep.rich.push(RichTable::from_map(label, &map));
    let (rows, ok) = big_r_rows(&map)?;
    rep.assert("|P_r| <= 2L/r for all r > 2 sqrt(L)", ok);
    let mut details = rich_details(&map);
    details["big_r"] = json!(rows);
    if let Some(r) = r {
        let pts: Vec<Value> = p_r(&map, r)?
            .into_iter()
            .map(|x| json!({ "lines": map.lines_through(&x), "point": x }))
            .collect();
        details["p_r"] = json!({ "r": r, "points": pts });
    }
    rep.details = details;
    Ok(rep)
}

fn quads(env: &Env, a: crate::QuadsArgs) -> Result<ExperimentReport> {
    let no_brute = env.cfg.pick_or(a.no_brute.then_some(true), "no-brute", false)?;
    let (inst, _) = load_input(env, a.input)?;
    let p = inst.planar()?;
    let map = compute_rich_points(&richpoint::es::family_lines(p))?;
    let census = census_from_map(p, &map);
    let mut rep = ExperimentReport::new("quads");
    rep.census.push(CensusRow::new("rich points", &census));
    rep.assert("total = parallel + intersecting", census.total == census.parallel + census.intersecting);
    let brute = !no_brute && p.len() <= BRUTE_FORCE_CAP;
    if brute {
        let b = quadruple_census_bruteforce(p)?;
        rep.census.push(CensusRow::new("brute force", &b));
        rep.assert("brute-force census equals rich-point census", b == census);
    }
    rep.details = json!({ "n": p.len(), "lines": map.total_lines(), "brute_force": brute });
    Ok(rep)
}

fn ddbound(env: &Env, a: crate::InputArgs) -> Result<ExperimentReport> {
    let (inst, _) = load_input(env, a)?;
    let p = inst.planar()?;
    let map = compute_rich_points(&richpoint::es::family_lines(p))?;
    let census = census_from_map(p, &map);
    let dd = dd_bound_from_census(p, &census)?;
    let mut rep = ExperimentReport::new("ddbound");
    rep.census.push(CensusRow::new("rich points", &census));
    rep.assert("distinct distances >= (N^4 - 2N^3) / |Q|", dd.holds);
    rep.details = json!({
        "n": dd.n,
        "distinct": dd.distinct,
        "quadruples": dd.quadruples,
        "bound": q(&dd.bound),
    });
    Ok(rep)
}

fn partition(env: &Env, a: crate::PartitionArgs) -> Result<ExperimentReport> {
    let cfg = &env.cfg;
    let degree: u32 = cfg.pick_or(a.degree, "degree", 4)?;
    let backend = Backend::parse(&cfg.pick_or(a.backend, "backend", "planes".to_string())?)?;
    let max_ratio = cfg.rational(a.max_ratio, "max-ratio")?;
    let lines_path: Option<PathBuf> = cfg.pick(a.lines, "lines")?;
    let points = match cfg.pick::<usize>(a.points, "points")? {
        Some(n) => random_points3(n, cfg.pick_or(a.q, "q", DEFAULT_Q)?, env.seed)?,
        None => load_input(env, a.input)?.0.points3d()?.to_vec(),
    };
    let part = match backend {
        Backend::Planes => partition_planes(&points, degree, env.seed)?,
        Backend::Lifted => partition_lifted(&points, degree, env.seed)?,
    };
    let v = verify_polyham(&part, &points)?;
    let mut rep = ExperimentReport::new("partition");
    rep.partition.push(PartitionRow::new(&v));
    rep.assert("every point is in its cell or on the boundary", v.conservation);
    rep.assert("cells <= 8 D^3", v.cell_count_holds);
    rep.assert("every round verified by exact signs", v.rounds_verified);
    if let Some((_, ok)) = &v.planes_bound {
        rep.assert("max cell <= 2|S|/D", *ok);
    }
    if let Some(m) = &max_ratio {
        rep.assert(format!("max cell * D^3 / |S| <= {}", q(m)), v.max_cell_ratio <= *m);
    }
    let cells: Vec<Value> = part
        .cells
        .iter()
        .map(|c| json!({ "sign": c.sign.to_string(), "count": c.count }))
        .collect();
    let rounds: Vec<Value> = part
        .rounds
        .iter()
        .map(|r| {
            json!({
                "degree": r.degree, "parts": r.parts, "largest_part": r.largest_part,
                "largest_side": r.largest_side, "verified": r.verified, "fallback": r.fallback,
                "attempts": r.attempts,
            })
        })
        .collect();
    let mut details = json!({
        "degree": v.degree,
        "boundary": v.boundary,
        "cells_ratio": q(&v.cells_ratio),
        "max_cell_ratio": q(&v.max_cell_ratio),
        "fallbacks": v.fallbacks,
        "factors": part.factors,
        "cells": cells,
        "rounds": rounds,
    });
    if let Some((b, _)) = &v.planes_bound {
        details["planes_bound"] = json!(q(b));
    }
    if let Some(path) = lines_path {
        let lines = Instance::load(&path)?.lines()?;
        let inc = line_cell_incidence(&lines, &part);
        rep.assert("each line outside Z meets <= D+1 cells and the total is <= (D+1)L", inc.bound_holds());
        details["line_cells"] = json!({
            "lines": lines.len(),
            "in_zero_set": inc.in_zero_set().len(),
            "max_per_line": inc.max_per_line(),
            "total": inc.total(),
        });
    }
    rep.details = details;
    Ok(rep)
}

fn backend_of(s: &str) -> Result<Backend> {
    Ok(Backend::parse(s)?)
}

fn cluster(env: &Env, a: crate::ClusterArgs) -> Result<ExperimentReport> {
    let c = &env.cfg;
    let r: usize = c.require(a.r, "r")?;
    let eps = c.rational(a.eps, "eps")?.unwrap_or_else(|| rational::rat(1, 10));
    let degree: u32 = c.pick_or(a.degree, "degree", 1)?;
    let mut cfg = ClusterConfig::new(degree, eps);
    cfg.k = c.rational(a.k, "k")?.unwrap_or_else(|| min_k(degree, &cfg.eps));
    cfg.backend = backend_of(&c.pick_or(a.backend, "backend", "planes".to_string())?)?;
    cfg.seed = env.seed;
    cfg.greedy_seeds = c.pick_or(a.greedy_seeds, "greedy-seeds", cfg.greedy_seeds)?;
    cfg.stop_at_bound = !c.pick_or(a.full.then_some(true), "full", false)?;
    let trace = c.pick_or(a.trace.then_some(true), "trace", false)?;
    let (inst, _) = load_input(env, a.input)?;
    let lines = inst.lines()?;
    let (mi, res) = verify_mainincid(&lines, r, &cfg)?;
    let v = verify_cluster(&res, &lines)?;
    let mut rep = ExperimentReport::new("cluster");
    rep.assert("surface degrees <= D", v.degrees_hold);
    rep.assert("surface line lists match sampled membership", v.membership_agrees);
    rep.assert("each surface holds >= L^(1/2+eps) lines", v.line_counts_hold);
    rep.assert("surface count <= 2 L^(1/2-eps)", v.surface_count_holds);
    rep.assert("residual recomputed independently", v.residual_matches);
    rep.assert("residual <= K L^(3/2+eps) r^-2", v.residual_bound_holds);
    rep.assert("two surfaces share <= D^2 lines", v.shared_holds);
    if let Some(h) = mi.holds {
        rep.assert("no surfaces: |P_r| <= K L^(3/2+eps) r^-2", h);
    }
    let failed: Vec<&str> = res.trace.failed_checks().iter().map(|c| c.name.as_str()).collect();
    rep.assert("recursion checks", failed.is_empty());
    let surfaces: Vec<Value> = res
        .surfaces
        .iter()
        .map(|s| {
            json!({
                "poly": s.poly, "degree": s.poly.degree(), "lines": s.lines,
                "irreducibility": s.irreducibility.label(),
            })
        })
        .collect();
    let mut details = json!({
        "params": res.params,
        "rich": res.rich,
        "surfaces": surfaces,
        "residual": res.residual,
        "rich_bound": mi.bound,
        "verification": v,
        "failed_checks": failed,
    });
    if trace {
        details["trace"] = serde_json::to_value(&res.trace)?;
    }
    rep.details = details;
    Ok(rep)
}

fn verify(env: &Env, a: crate::VerifyArgs) -> Result<ExperimentReport> {
    let samples: usize = env.cfg.pick_or(a.samples, "samples", 1000)?;
    let (inst, label) = load_input(env, a.input)?;
    let mut rep = ExperimentReport::new("verify");
    let mut details = Map::new();
    match &inst {
        Instance::Planar(p) => {
            let n = p.len();
            let lines = richpoint::es::family_lines(p);
            let map = compute_rich_points(&lines)?;
            let census = census_from_map(p, &map);
            rep.census.push(CensusRow::new("rich points", &census));
            let mut skipped = Vec::new();
            if n <= EXHAUSTIVE_MAX {
                let e = quadruple_equivalence(p);
                rep.assert("distance test = determinant test on all N^4 tuples", e.determinant_disagreements == 0);
                rep.assert("distance test = lines meet or are parallel", e.classifier_disagreements == 0);
                details.insert(
                    "equivalence".into(),
                    json!({ "tuples": e.tuples, "quadruples": e.quadruples, "excluded": e.excluded }),
                );
            } else {
                skipped.push(format!("N^4 equivalence (N > {EXHAUSTIVE_MAX})"));
            }
            if n <= BRUTE_FORCE_CAP {
                let b = quadruple_census_bruteforce(p)?;
                rep.assert("brute-force census equals rich-point census", b == census);
            } else {
                skipped.push(format!("brute-force census (N > {BRUTE_FORCE_CAP})"));
            }
            if n >= 3 {
                let dd = dd_bound_from_census(p, &census)?;
                rep.assert("distinct distances >= (N^4 - 2N^3) / |Q|", dd.holds);
                details.insert("distinct".into(), json!(dd.distinct));
                details.insert("dd_bound".into(), json!(q(&dd.bound)));
            }
            if n <= PLANE_SEARCH_MAX {
                let nc = non_clustering(p)?;
                rep.assert("at most N family lines in a plane", nc.max_in_plane <= n);
                rep.assert("at most N family lines through a point", nc.max_through_point <= n);
                rep.assert("lines with a common source are pairwise skew", nc.same_source_not_skew == 0);
                details.insert(
                    "non_clustering".into(),
                    json!({ "max_in_plane": nc.max_in_plane, "max_through_point": nc.max_through_point }),
                );
            } else {
                skipped.push(format!("non-clustering (N > {PLANE_SEARCH_MAX})"));
            }
            details.insert("skipped".into(), json!(skipped));
            let vp = vp_suite(samples, env.seed);
            rep.assert("V_p tangent, third component nonzero, line recovered", vp.holds());
            details.insert("vp_samples".into(), json!(vp.samples));
            rep.rich.push(RichTable::from_map(label, &map));
            let (_, ok) = big_r_rows(&map)?;
            rep.assert("|P_r| <= 2L/r for all r > 2 sqrt(L)", ok);
        }
        Instance::Lines(lines) => {
            let map = compute_rich_points(lines)?;
            rep.rich.push(RichTable::from_map(label, &map));
            let (rows, ok) = big_r_rows(&map)?;
            rep.assert("|P_r| <= 2L/r for all r > 2 sqrt(L)", ok);
            let census_ok = rich_pair_identity(&map, lines);
            rep.assert("pair count identity", census_ok);
            details = match rich_details(&map) {
                Value::Object(m) => m,
                _ => unreachable!(),
            };
            details.insert("big_r".into(), json!(rows));
        }
        Instance::Points3d(_) => bail!("verify takes a planar configuration or a line family"),
    }
    rep.details = Value::Object(details);
    Ok(rep)
}

/// Intersecting pairs equal `sum over rich points of C(k, 2)`, and all
/// pairs are classified.
fn rich_pair_identity(map: &RichPointMap, lines: &[Line3]) -> bool {
    let s = map.pair_stats();
    let l = lines.len() as u64;
    let from_points: u64 = map.iter().map(|(_, k)| (k * (k - 1) / 2) as u64).sum();
    s.intersecting == from_points && s.intersecting + s.parallel + s.skew == l * l.saturating_sub(1) / 2
}

fn scale(env: &Env, a: crate::ScaleArgs) -> Result<ExperimentReport> {
    let c = &env.cfg;
    let sizes: Vec<usize> = c.pick_or(a.sizes, "sizes", vec![16, 25, 36, 49, 64])?;
    let eps = c.rational(a.eps, "eps")?.unwrap_or_else(|| rational::rat(1, 10));
    let budget = c.pick::<u64>(a.budget_secs, "budget-secs")?.map(Duration::from_secs);
    let s = run_quadruple_scaling_with(&sizes, &eps, budget)?;
    let mut rep = ExperimentReport::new("scale");
    rep.census.push(CensusRow {
        label: "unit square".into(),
        n: s.fixture.n,
        total: s.fixture.quadruples,
        parallel: s.fixture.parallel,
        intersecting: s.fixture.intersecting,
    });
    rep.assert("unit square has 80 quadruples", s.fixture_holds);
    for row in &s.rows {
        rep.assert(format!("N={}: distinct distances >= (N^4 - 2N^3) / |Q|", row.n), row.dd_holds);
    }
    rep.assert(format!("fitted slope <= {}", q(&s.slope_limit)), s.slope_holds);
    rep.assert("all sizes measured within budget", !s.partial);
    rep.scaling = Some(s);
    Ok(rep)
}
