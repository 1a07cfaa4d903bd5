use serde::{Deserialize, Serialize};

use super::scaling::ScalingReport;
use crate::es::QuadrupleCensus;
use crate::incidence::RichPointMap;
use crate::partition::PolyhamReport;
use crate::rational::{serde_str, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub holds: bool,
}

impl Assertion {
    pub fn new(name: impl Into<String>, holds: bool) -> Assertion {
        Assertion {
            name: name.into(),
            holds,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RichRow {
    pub r: usize,
    /// `|P_r|`
    pub count: u64,
}

/// `|P_r|` for every `r >= 2` with a nonzero count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RichTable {
    pub label: String,
    pub lines: usize,
    pub rows: Vec<RichRow>,
}

impl RichTable {
    pub fn from_map(label: impl Into<String>, map: &RichPointMap) -> RichTable {
        RichTable {
            label: label.into(),
            lines: map.total_lines(),
            rows: map.cumulative().into_iter().map(|(r, count)| RichRow { r, count }).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub label: String,
    pub n: usize,
    pub total: u64,
    pub parallel: u64,
    pub intersecting: u64,
}

impl CensusRow {
    pub fn new(label: impl Into<String>, c: &QuadrupleCensus) -> CensusRow {
        CensusRow {
            label: label.into(),
            n: c.n,
            total: c.total,
            parallel: c.parallel,
            intersecting: c.intersecting,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub backend: String,
    pub points: usize,
    pub degree: u32,
    pub cells: usize,
    pub max_cell: usize,
    /// `max_cell * D^3 / |S|`
    #[serde(with = "serde_str")]
    pub ratio: Rational,
}

impl PartitionRow {
    pub fn new(r: &PolyhamReport) -> PartitionRow {
        PartitionRow {
            backend: r.backend.name().to_string(),
            points: r.n_points,
            degree: r.budget,
            cells: r.cells,
            max_cell: r.max_cell,
            ratio: r.max_cell_ratio.clone(),
        }
    }
}

/// Collected measurements of one run. Everything except fields suffixed
/// `_approx` is exact.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    #[serde(default)]
    pub rich: Vec<RichTable>,
    #[serde(default)]
    pub census: Vec<CensusRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingReport>,
    #[serde(default)]
    pub partition: Vec<PartitionRow>,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
    /// Command-specific output.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>) -> ExperimentReport {
        ExperimentReport {
            name: name.into(),
            ..Default::default()
        }
    }

    pub fn assert(&mut self, name: impl Into<String>, holds: bool) {
        self.assertions.push(Assertion::new(name, holds));
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.holds) && self.scaling.as_ref().map_or(true, ScalingReport::passed)
    }

    pub fn is_empty(&self) -> bool {
        self.rich.is_empty() && self.census.is_empty() && self.scaling.is_none() && self.partition.is_empty()
    }
}
