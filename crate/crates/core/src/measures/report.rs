//! Evaluating every requested measure for every group or pair of a table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{centralization_index, clustering_index, concentration, evenness, joint_exposure, MeasureError, Variant};
use crate::io::{digest_table, digest_unit_space};
use crate::model::{GroupDistribution, PersonhoodTable, UnitSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Evenness,
    JointExposure,
    Concentration,
    Centralization,
    Clustering,
}

impl Measure {
    pub const ALL: [Measure; 5] = [
        Measure::Evenness,
        Measure::JointExposure,
        Measure::Concentration,
        Measure::Centralization,
        Measure::Clustering,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::Evenness => "evenness",
            Measure::JointExposure => "joint_exposure",
            Measure::Concentration => "concentration",
            Measure::Centralization => "centralization",
            Measure::Clustering => "clustering",
        }
    }

    /// Measures defined over ordered pairs of groups rather than single groups.
    pub fn is_pairwise(self) -> bool {
        matches!(self, Measure::JointExposure | Measure::Centralization)
    }

    /// The variants a measure is evaluated under. Exposure and clustering have
    /// one formula; centralization uses the cumulative-share reading.
    fn variants(self, selection: VariantSelection) -> Vec<Variant> {
        match self {
            Measure::Evenness | Measure::Concentration => selection.variants(),
            Measure::JointExposure | Measure::Clustering => vec![Variant::Paper],
            Measure::Centralization => vec![Variant::Classical],
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().replace('-', "_").as_str() {
            "evenness" => Ok(Measure::Evenness),
            "joint_exposure" | "exposure" => Ok(Measure::JointExposure),
            "concentration" => Ok(Measure::Concentration),
            "centralization" => Ok(Measure::Centralization),
            "clustering" => Ok(Measure::Clustering),
            other => Err(format!("unknown measure {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariantSelection {
    Paper,
    #[default]
    Classical,
    Both,
}

impl VariantSelection {
    pub fn variants(self) -> Vec<Variant> {
        match self {
            VariantSelection::Paper => vec![Variant::Paper],
            VariantSelection::Classical => vec![Variant::Classical],
            VariantSelection::Both => vec![Variant::Paper, Variant::Classical],
        }
    }
}

impl FromStr for VariantSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(VariantSelection::Paper),
            "classical" => Ok(VariantSelection::Classical),
            "both" => Ok(VariantSelection::Both),
            other => Err(format!("unknown variant selection {other:?}")),
        }
    }
}

/// Which ordered group pairs the pairwise measures are evaluated on.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum PairSelection {
    /// Every ordered pair of distinct groups.
    #[default]
    All,
    Explicit(Vec<(String, String)>),
}

impl FromStr for PairSelection {
    type Err = String;

    /// `all`, or a comma-separated list of `A:B` pairs.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "all" {
            return Ok(PairSelection::All);
        }
        s.split(',')
            .map(|pair| {
                let (a, b) = pair
                    .split_once(':')
                    .ok_or_else(|| format!("pair {pair:?} is not of the form A:B"))?;
                Ok((a.trim().to_string(), b.trim().to_string()))
            })
            .collect::<Result<Vec<_>, String>>()
            .map(PairSelection::Explicit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRequest {
    pub measures: Vec<Measure>,
    pub variants: VariantSelection,
    pub pairs: PairSelection,
}

impl Default for MeasureRequest {
    fn default() -> Self {
        MeasureRequest {
            measures: Measure::ALL.to_vec(),
            variants: VariantSelection::default(),
            pairs: PairSelection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Score(f64),
    /// Degenerate input for which the measure has no value.
    Undefined(String),
    Error(String),
}

impl Outcome {
    pub fn score(&self) -> Option<f64> {
        match self {
            Outcome::Score(v) => Some(*v),
            _ => None,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Score(_) => "ok",
            Outcome::Undefined(_) => "undefined",
            Outcome::Error(_) => "error",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Outcome::Score(_) => "",
            Outcome::Undefined(m) | Outcome::Error(m) => m,
        }
    }
}

impl From<Result<f64, MeasureError>> for Outcome {
    fn from(r: Result<f64, MeasureError>) -> Self {
        match r {
            Ok(v) => Outcome::Score(v),
            Err(e) if e.is_undefined() => Outcome::Undefined(e.to_string()),
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub measure: Measure,
    pub variant: Variant,
    /// One group, or the ordered pair `(A, B)` for pairwise measures.
    pub groups: Vec<String>,
    pub outcome: Outcome,
}

/// Every score of a run, tagged with the digests of the inputs it came from.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasureReport {
    pub dataset_digest: String,
    pub unit_space_digest: String,
    pub rows: Vec<ReportRow>,
}

impl MeasureReport {
    pub fn find(&self, measure: Measure, variant: Variant, groups: &[&str]) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.measure == measure && r.variant == variant && r.groups == groups)
    }
}

/// Evaluates the requested measures over all groups (and group pairs) of
/// `table`. Per-row failures become error or undefined rows; only a table
/// whose units do not match `space` fails the whole run.
pub fn measure_all(
    table: &PersonhoodTable,
    space: &UnitSpace,
    request: &MeasureRequest,
) -> Result<MeasureReport, MeasureError> {
    if table.unit_ids() != space.unit_ids() {
        return Err(MeasureError::UnitCountMismatch {
            expected: space.len(),
            got: table.unit_count(),
        });
    }
    let groups: Vec<&str> = table.group_ids().collect();
    let pairs: Vec<(String, String)> = match &request.pairs {
        PairSelection::All => groups
            .iter()
            .flat_map(|a| {
                groups
                    .iter()
                    .filter(move |b| *b != a)
                    .map(move |b| (a.to_string(), b.to_string()))
            })
            .collect(),
        PairSelection::Explicit(list) => list.clone(),
    };
    let distribution = |g: &str| -> Result<GroupDistribution, MeasureError> {
        table
            .distribution(g)
            .map_err(|_| MeasureError::UnknownGroup(g.to_string()))
    };
    let totals = table.totals();

    let mut measures = request.measures.clone();
    measures.sort();
    measures.dedup();

    let mut rows = Vec::new();
    for measure in measures {
        for variant in measure.variants(request.variants) {
            if measure.is_pairwise() {
                for (a, b) in &pairs {
                    let outcome = distribution(a).and_then(|da| {
                        let db = distribution(b)?;
                        match measure {
                            Measure::JointExposure => joint_exposure(&da, &db, totals),
                            _ => centralization_index(&da, &db, space),
                        }
                    });
                    rows.push(ReportRow {
                        measure,
                        variant,
                        groups: vec![a.clone(), b.clone()],
                        outcome: outcome.into(),
                    });
                }
            } else {
                for g in &groups {
                    let outcome = distribution(g).and_then(|d| match measure {
                        Measure::Evenness => evenness(&d, variant),
                        Measure::Concentration => concentration(&d, space, variant),
                        _ => clustering_index(&d, totals, space),
                    });
                    rows.push(ReportRow {
                        measure,
                        variant,
                        groups: vec![g.to_string()],
                        outcome: outcome.into(),
                    });
                }
            }
        }
    }
    rows.sort_by(|x, y| (x.measure, x.variant, &x.groups).cmp(&(y.measure, y.variant, &y.groups)));

    Ok(MeasureReport {
        dataset_digest: digest_table(table),
        unit_space_digest: digest_unit_space(space),
        rows,
    })
}
