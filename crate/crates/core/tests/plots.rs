//! Plot output is compared byte for byte against files in `tests/golden`.
//! Run with `RICHPOINT_UPDATE_GOLDEN=1` to rewrite them.

use std::path::PathBuf;

use richpoint::es::{quadruple_census_via_rich_points, PlanarConfig};
use richpoint::harness::{
    emit_plots, render, run_quadruple_scaling, CensusRow, ExperimentReport, PartitionRow, RichRow, RichTable,
};
use richpoint::io::{from_json, to_json};
use richpoint::rational::rat;

fn golden(name: &str, body: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var("RICHPOINT_UPDATE_GOLDEN").is_ok_and(|v| v == "1") {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, body).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(body, want, "{name} differs from its golden file");
}

/// FNV-1a hash of the unit-square census chart.
const CENSUS_SVG_FNV: u64 = 0x57ff_7cd7_b09b_5cc3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ *b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn unit_square_report() -> ExperimentReport {
    let p = PlanarConfig::from_ints(&[(0, 0), (1, 0), (0, 1), (1, 1)]).unwrap();
    let mut rep = ExperimentReport::new("unit square");
    rep.census.push(CensusRow::new("unit square", &quadruple_census_via_rich_points(&p).unwrap()));
    rep
}

fn scaling_report() -> ExperimentReport {
    let mut s = run_quadruple_scaling(&[9, 16, 25, 36], &rat(1, 10)).unwrap();
    for r in s.rows.iter_mut().chain([&mut s.fixture]) {
        r.seconds_approx = 0.0;
    }
    let mut rep = ExperimentReport::new("scaling");
    rep.scaling = Some(s);
    rep
}

fn files(rep: &ExperimentReport) -> Vec<String> {
    render(rep).unwrap().into_iter().map(|f| f.0).collect()
}

#[test]
fn empty_report_gives_empty_axes() {
    let rep = ExperimentReport::new("nothing yet");
    let out = render(&rep).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].0, "empty.svg");
    let svg = &out[0].1;
    assert!(svg.starts_with("<svg ") && svg.ends_with("</svg>\n"));
    assert!(!svg.contains("<circle") && !svg.contains("<polyline"));
    golden("empty.svg", svg);
}

#[test]
fn unit_square_census_is_one_bar_chart() {
    let rep = unit_square_report();
    let out = render(&rep).unwrap();
    assert_eq!(files(&rep), ["census.svg", "census.csv"]);
    let svg = &out[0].1;
    assert_eq!(svg.matches("<rect x=").count(), 3);
    assert!(svg.contains(">80<") && svg.contains(">20<") && svg.contains(">60<"));
    golden("census.svg", svg);
    golden("census.csv", &out[1].1);
    assert_eq!(fnv1a(svg.as_bytes()), CENSUS_SVG_FNV, "{:#x}", fnv1a(svg.as_bytes()));
    assert_eq!(out[1].1, "label,n,total,parallel,intersecting\nunit square,4,80,20,60\n");
}

#[test]
fn scaling_report_has_fit_annotation() {
    let rep = scaling_report();
    let out = render(&rep).unwrap();
    assert_eq!(files(&rep), ["scaling.svg", "scaling.csv"]);
    let svg = &out[0].1;
    assert!(svg.contains("stroke-dasharray"));
    assert!(svg.contains("fitted slope"));
    assert_eq!(svg.matches("<circle").count(), 4);
    golden("scaling.svg", svg);
    golden("scaling.csv", &out[1].1);
}

#[test]
fn every_section_has_a_plot_and_a_table() {
    let mut rep = scaling_report();
    rep.census = unit_square_report().census;
    rep.rich.push(RichTable {
        label: "pencil".into(),
        lines: 5,
        rows: vec![RichRow { r: 2, count: 1 }, RichRow { r: 5, count: 1 }],
    });
    rep.partition.push(PartitionRow {
        backend: "planes".into(),
        points: 1000,
        degree: 4,
        cells: 16,
        max_cell: 125,
        ratio: rat(8, 1),
    });
    rep.assert("something", true);
    assert_eq!(
        files(&rep),
        [
            "rich.svg",
            "rich.csv",
            "census.svg",
            "census.csv",
            "scaling.svg",
            "scaling.csv",
            "partition.svg",
            "partition.csv",
            "assertions.csv"
        ]
    );
}

#[test]
fn output_depends_only_on_the_report() {
    let rep = scaling_report();
    let text = to_json(&rep).unwrap();
    let back: ExperimentReport = from_json(&text).unwrap();
    assert_eq!(render(&rep).unwrap(), render(&back).unwrap());
    let dir = std::env::temp_dir().join(format!("richpoint-plots-{}", std::process::id()));
    let written = emit_plots(&back, &dir).unwrap();
    for (path, (_, body)) in written.iter().zip(render(&rep).unwrap()) {
        assert_eq!(std::fs::read_to_string(path).unwrap(), body);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}
