//! File formats: parsing datasets and unit spaces, emitting reports and
//! plot-ready tables.
//!
//! Person-level data is CSV; anything set-valued is JSON carrying a `kind`
//! tag. All text is UTF-8 with LF line endings, and numbers always use a
//! period as the decimal point.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::mapping::{AudienceComposition, Classified, MappingError};
use crate::measures::{Measure, MeasureReport, Variant};
use crate::model::{AccessSet, ExactSetCounts, GroupPersonhood, ModelError, PersonhoodTable, UnitSpace, UnitSpaceSpec};
use crate::personhood::{
    describe_set, exact_counts_from_memberships, exact_counts_from_union_observations, personhoods, Membership,
    ObservationTable, PersonhoodError,
};

pub const MEMBERSHIP_HEADER: [&str; 3] = ["person_id", "group_id", "unit_id"];
pub const COMPOSITION_HEADER: [&str; 6] = ["source_id", "f_vc", "f_c", "f_m", "f_l", "f_vl"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("expected header {expected:?}, found {found:?}")]
    Header { expected: String, found: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected a {expected} file, found {found:?}")]
    WrongKind { expected: &'static str, found: String },
    #[error("unrecognised dataset: {0}")]
    UnknownDataset(String),
    #[error("person {0} in two groups")]
    PersonInTwoGroups(String),
    #[error("record {record}: negative count")]
    NegativeCount { record: usize },
    #[error("record {record}: empty access set")]
    EmptyAccessSet { record: usize },
    #[error("record {record}: unknown unit {unit:?}")]
    UnknownUnit { record: usize, unit: String },
    #[error("record {record}: unit {unit:?} listed twice")]
    RepeatedUnit { record: usize, unit: String },
    #[error("unit space lists units {found:?} but the dataset uses {expected:?}")]
    UnitMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("source {source_id:?}: {error}")]
    Composition { source_id: String, error: MappingError },
    #[error("no matching rows for plot {0}")]
    NoMatchingRows(String),
    #[error("unknown plot kind {0:?}")]
    UnknownPlot(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Personhood(#[from] PersonhoodError),
}

/// Renders a number with six significant digits, `%g` style, trailing zeros
/// trimmed. Negative zero prints as `0`.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (5 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn sig6_number(x: f64) -> serde_json::Value {
    let rounded: f64 = format_sig6(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Short content digest of a personhood table (its canonical JSON form).
pub fn digest_table(table: &PersonhoodTable) -> String {
    sha256_hex(&emit_personhood_table(table))[..16].to_string()
}

/// Short content digest of a unit space (its canonical JSON form).
pub fn digest_unit_space(space: &UnitSpace) -> String {
    sha256_hex(&emit_unit_space(space))[..16].to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetKind {
    MembershipLog,
    ExactSetCounts,
    UnionObservations,
    SourceCompositions,
    PersonhoodTable,
}

impl DatasetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DatasetKind::MembershipLog => "membership-log",
            DatasetKind::ExactSetCounts => "exact-set-counts",
            DatasetKind::UnionObservations => "union-observations",
            DatasetKind::SourceCompositions => "source-compositions",
            DatasetKind::PersonhoodTable => "personhood-table",
        }
    }
}

/// What a dataset file declares itself to be, plus its checksum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    pub kind: DatasetKind,
    pub paths: Vec<std::path::PathBuf>,
    /// Demographic axis the groups are drawn from, when declared.
    pub axis: Option<String>,
    /// SHA-256 of the file contents, hex.
    pub checksum: String,
}

#[derive(Deserialize)]
struct KindProbe {
    kind: Option<String>,
    axis: Option<String>,
}

impl DatasetManifest {
    /// Identifies a dataset from its declared header: the CSV header line,
    /// or the `kind` field of a JSON document.
    pub fn sniff(text: &str) -> Result<Self, IoError> {
        let trimmed = text.trim_start();
        let (kind, axis) = if trimmed.starts_with('{') {
            let probe: KindProbe = serde_json::from_str(text)?;
            let kind = match probe.kind.as_deref() {
                Some("exact-set-counts") => DatasetKind::ExactSetCounts,
                Some("union-observations") => DatasetKind::UnionObservations,
                Some("personhood-table") => DatasetKind::PersonhoodTable,
                Some(other) => return Err(IoError::UnknownDataset(format!("kind {other:?}"))),
                None => return Err(IoError::UnknownDataset("JSON without a kind field".into())),
            };
            (kind, probe.axis)
        } else {
            let header: Vec<String> = trimmed
                .lines()
                .next()
                .unwrap_or("")
                .split(',')
                .map(|h| h.trim().to_string())
                .collect();
            if header == MEMBERSHIP_HEADER {
                (DatasetKind::MembershipLog, None)
            } else if header == COMPOSITION_HEADER {
                (DatasetKind::SourceCompositions, None)
            } else {
                return Err(IoError::UnknownDataset(format!("CSV header {:?}", header.join(","))));
            }
        };
        Ok(DatasetManifest {
            kind,
            paths: Vec::new(),
            axis,
            checksum: sha256_hex(text),
        })
    }
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn check_header(reader: &mut csv::Reader<&[u8]>, expected: &[&str]) -> Result<(), IoError> {
    let found = reader.headers().map_err(|e| csv_error(&e))?;
    if found.iter().ne(expected.iter().copied()) {
        return Err(IoError::Header {
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        });
    }
    Ok(())
}

fn csv_error(e: &csv::Error) -> IoError {
    let line = e.position().map_or(0, |p| p.line());
    IoError::Malformed {
        line,
        message: e.to_string(),
    }
}

/// Parses a `person_id,group_id,unit_id` CSV. Repeated (person, unit) rows
/// collapse into one; order of first appearance is kept.
pub fn parse_membership_log(text: &str) -> Result<Vec<Membership>, IoError> {
    let mut reader = csv_reader(text);
    check_header(&mut reader, &MEMBERSHIP_HEADER)?;
    let mut seen = HashSet::new();
    let mut group_of: HashMap<String, String> = HashMap::new();
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().any(str::is_empty) {
            return Err(IoError::Malformed {
                line,
                message: "empty field".into(),
            });
        }
        let row = Membership::new(&record[0], &record[1], &record[2]);
        match group_of.get(&row.person_id) {
            Some(g) if *g != row.group_id => return Err(IoError::PersonInTwoGroups(row.person_id)),
            Some(_) => {}
            None => {
                group_of.insert(row.person_id.clone(), row.group_id.clone());
            }
        }
        if seen.insert((row.person_id.clone(), row.unit_id.clone())) {
            out.push(row);
        }
    }
    Ok(out)
}

pub fn emit_membership_log(log: &[Membership]) -> String {
    let mut out = MEMBERSHIP_HEADER.join(",");
    out.push('\n');
    for row in log {
        let _ = writeln!(out, "{},{},{}", row.person_id, row.group_id, row.unit_id);
    }
    out
}

fn resolve_set(record: usize, units: &[String], unit_ids: &[String]) -> Result<AccessSet, IoError> {
    if units.is_empty() {
        return Err(IoError::EmptyAccessSet { record });
    }
    let mut bits = 0u32;
    for unit in units {
        let i = unit_ids
            .iter()
            .position(|u| u == unit)
            .ok_or_else(|| IoError::UnknownUnit {
                record,
                unit: unit.clone(),
            })?;
        if bits & (1 << i) != 0 {
            return Err(IoError::RepeatedUnit {
                record,
                unit: unit.clone(),
            });
        }
        bits |= 1 << i;
    }
    Ok(AccessSet::from_bits(bits))
}

fn set_names(set: AccessSet, unit_ids: &[String]) -> Vec<String> {
    set.indices().map(|i| unit_ids[i].clone()).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExactCountsFile {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<String>,
    records: Vec<ExactRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExactRecord {
    group: String,
    access_set: Vec<String>,
    count: i64,
}

fn expect_kind(found: &str, expected: DatasetKind) -> Result<(), IoError> {
    if found == expected.as_str() {
        Ok(())
    } else {
        Err(IoError::WrongKind {
            expected: expected.as_str(),
            found: found.to_string(),
        })
    }
}

/// Exact-set counts with any warnings raised while merging.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCounts {
    pub counts: ExactSetCounts,
    pub warnings: Vec<String>,
}

/// Parses `{"kind":"exact-set-counts","records":[{group, access_set, count}]}`.
/// Records repeating a (group, set) pair are summed, with a warning.
pub fn parse_exact_counts(text: &str, unit_ids: &[String]) -> Result<ParsedCounts, IoError> {
    let file: ExactCountsFile = serde_json::from_str(text)?;
    expect_kind(&file.kind, DatasetKind::ExactSetCounts)?;
    let mut counts = ExactSetCounts::new(unit_ids.iter().cloned())?;
    let mut seen = HashSet::new();
    let mut warnings = Vec::new();
    for (i, rec) in file.records.iter().enumerate() {
        let record = i + 1;
        if rec.count < 0 {
            return Err(IoError::NegativeCount { record });
        }
        let set = resolve_set(record, &rec.access_set, unit_ids)?;
        if !seen.insert((rec.group.clone(), set)) {
            warnings.push(format!(
                "record {record}: duplicate entry for group {:?} and {}; counts summed",
                rec.group,
                describe_set(set, unit_ids)
            ));
        }
        counts.add(&rec.group, set, rec.count as u64)?;
    }
    Ok(ParsedCounts { counts, warnings })
}

pub fn emit_exact_counts(counts: &ExactSetCounts) -> String {
    let records = counts
        .groups()
        .flat_map(|(g, entries)| {
            entries.iter().map(move |(set, &c)| ExactRecord {
                group: g.to_string(),
                access_set: set_names(*set, counts.unit_ids()),
                count: c as i64,
            })
        })
        .collect();
    let file = ExactCountsFile {
        kind: DatasetKind::ExactSetCounts.as_str().into(),
        axis: None,
        records,
    };
    to_json(&file)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservationsFile {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<String>,
    records: Vec<ObservationRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservationRecord {
    group: String,
    units: Vec<String>,
    reach: i64,
}

/// Parses `{"kind":"union-observations","records":[{group, units, reach}]}`.
/// Every nonempty subset must appear exactly once per group.
pub fn parse_union_observations(text: &str, unit_ids: &[String]) -> Result<ObservationTable, IoError> {
    let file: ObservationsFile = serde_json::from_str(text)?;
    expect_kind(&file.kind, DatasetKind::UnionObservations)?;
    let mut rows = Vec::with_capacity(file.records.len());
    for (i, rec) in file.records.into_iter().enumerate() {
        let record = i + 1;
        if rec.reach < 0 {
            return Err(IoError::NegativeCount { record });
        }
        let set = resolve_set(record, &rec.units, unit_ids)?;
        rows.push((rec.group, set, rec.reach as u64));
    }
    Ok(ObservationTable::from_records(unit_ids.to_vec(), rows)?)
}

pub fn emit_union_observations(obs: &ObservationTable) -> String {
    let records = obs
        .records()
        .map(|(g, set, reach)| ObservationRecord {
            group: g.to_string(),
            units: set_names(set, obs.unit_ids()),
            reach: reach as i64,
        })
        .collect();
    to_json(&ObservationsFile {
        kind: DatasetKind::UnionObservations.as_str().into(),
        axis: None,
        records,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Position {
    Scalar(f64),
    Vector(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitEntry {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    position: Option<Position>,
    #[serde(default)]
    topics: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UnitSpaceFile {
    units: Vec<UnitEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distances: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center_order: Option<Vec<String>>,
}

/// Parses a unit-space config:
///
/// ```json
/// {"units": [{"id": "VC", "position": -1.0, "topics": 12}, ...],
///  "center": "M"}
/// ```
///
/// `position` is a number or a coordinate list; `distances` (an m×m
/// matrix) and `center_order` are optional.
pub fn parse_unit_space(text: &str) -> Result<UnitSpace, IoError> {
    let file: UnitSpaceFile = serde_json::from_str(text)?;
    let with_position = file.units.iter().filter(|u| u.position.is_some()).count();
    if with_position != 0 && with_position != file.units.len() {
        return Err(ModelError::PositionDimension.into());
    }
    let positions = (with_position > 0).then(|| {
        file.units
            .iter()
            .map(|u| match &u.position {
                Some(Position::Scalar(x)) => vec![*x],
                Some(Position::Vector(v)) => v.clone(),
                None => Vec::new(),
            })
            .collect()
    });
    let spec = UnitSpaceSpec {
        unit_ids: file.units.iter().map(|u| u.id.clone()).collect(),
        positions,
        distances: file.distances,
        topic_counts: Some(file.units.iter().map(|u| u.topics).collect()),
        center: file.center,
        center_order: file.center_order,
    };
    Ok(spec.validate()?)
}

/// Canonical form: positions when known (distances derive from them),
/// explicit distances otherwise, and the center ordering spelled out.
pub fn emit_unit_space(space: &UnitSpace) -> String {
    let spec = space.to_spec();
    let units = spec
        .unit_ids
        .iter()
        .enumerate()
        .map(|(i, id)| UnitEntry {
            id: id.clone(),
            position: spec.positions.as_ref().map(|p| match p[i].as_slice() {
                [x] => Position::Scalar(*x),
                v => Position::Vector(v.to_vec()),
            }),
            topics: space.topic_counts()[i],
        })
        .collect();
    to_json(&UnitSpaceFile {
        units,
        distances: if spec.positions.is_some() { None } else { spec.distances },
        center: None,
        center_order: spec.center_order,
    })
}

/// Parses `source_id,f_vc,f_c,f_m,f_l,f_vl` rows.
pub fn parse_source_compositions(text: &str) -> Result<Vec<(String, AudienceComposition)>, IoError> {
    let mut reader = csv_reader(text);
    check_header(&mut reader, &COMPOSITION_HEADER)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&e))?;
        let line = record.position().map_or(0, |p| p.line());
        let mut fractions = [0.0; 5];
        for (k, slot) in fractions.iter_mut().enumerate() {
            *slot = record[k + 1].parse().map_err(|e| IoError::Malformed {
                line,
                message: format!("column {}: {e}", COMPOSITION_HEADER[k + 1]),
            })?;
        }
        let composition = AudienceComposition::new(fractions).map_err(|error| IoError::Composition {
            source_id: record[0].to_string(),
            error,
        })?;
        out.push((record[0].to_string(), composition));
    }
    Ok(out)
}

pub fn emit_source_compositions(sources: &[(String, AudienceComposition)]) -> String {
    let mut out = COMPOSITION_HEADER.join(",");
    out.push('\n');
    for (id, c) in sources {
        let f = c.fractions();
        let _ = writeln!(out, "{id},{},{},{},{},{}", f[0], f[1], f[2], f[3], f[4]);
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PersonhoodFile {
    kind: String,
    units: Vec<String>,
    population: u64,
    groups: Vec<PersonhoodGroup>,
    totals: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PersonhoodGroup {
    group: String,
    people: u64,
    personhood: Vec<f64>,
}

/// Full-precision JSON, so that reading it back reproduces the table bit for bit.
pub fn emit_personhood_table(table: &PersonhoodTable) -> String {
    to_json(&PersonhoodFile {
        kind: DatasetKind::PersonhoodTable.as_str().into(),
        units: table.unit_ids().to_vec(),
        population: table.population(),
        groups: table
            .groups()
            .map(|(g, gp)| PersonhoodGroup {
                group: g.to_string(),
                people: gp.people,
                personhood: gp.mass.clone(),
            })
            .collect(),
        totals: table.totals().to_vec(),
    })
}

pub fn parse_personhood_table(text: &str) -> Result<PersonhoodTable, IoError> {
    let file: PersonhoodFile = serde_json::from_str(text)?;
    expect_kind(&file.kind, DatasetKind::PersonhoodTable)?;
    let groups: BTreeMap<String, GroupPersonhood> = file
        .groups
        .into_iter()
        .map(|g| {
            (
                g.group,
                GroupPersonhood {
                    mass: g.personhood,
                    people: g.people,
                },
            )
        })
        .collect();
    let table = PersonhoodTable::from_parts(file.units, groups)?;
    let table = if table.population() == file.population {
        table
    } else {
        table.with_population(file.population)?
    };
    Ok(table)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// A parsed dataset of any kind that yields personhoods.
#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Memberships(Vec<Membership>),
    Exact(ExactSetCounts),
    Observations(ObservationTable),
    Personhood(PersonhoodTable),
}

/// A dataset with its manifest and parse-time warnings.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub manifest: DatasetManifest,
    pub dataset: Dataset,
    pub warnings: Vec<String>,
}

impl LoadedDataset {
    /// Parses any population dataset against the unit ids of a unit space.
    pub fn parse(text: &str, unit_ids: &[String]) -> Result<Self, IoError> {
        let manifest = DatasetManifest::sniff(text)?;
        let mut warnings = Vec::new();
        let dataset = match manifest.kind {
            DatasetKind::MembershipLog => Dataset::Memberships(parse_membership_log(text)?),
            DatasetKind::ExactSetCounts => {
                let parsed = parse_exact_counts(text, unit_ids)?;
                warnings = parsed.warnings;
                Dataset::Exact(parsed.counts)
            }
            DatasetKind::UnionObservations => Dataset::Observations(parse_union_observations(text, unit_ids)?),
            DatasetKind::PersonhoodTable => Dataset::Personhood(parse_personhood_table(text)?),
            DatasetKind::SourceCompositions => {
                return Err(IoError::WrongKind {
                    expected: "population dataset",
                    found: manifest.kind.as_str().into(),
                })
            }
        };
        Ok(LoadedDataset {
            manifest,
            dataset,
            warnings,
        })
    }

    /// Runs the dataset through tabulation or inversion as needed.
    pub fn personhood_table(&self, unit_ids: &[String]) -> Result<PersonhoodTable, IoError> {
        let table = match &self.dataset {
            Dataset::Memberships(log) => personhoods(&exact_counts_from_memberships(log, unit_ids)?),
            Dataset::Exact(counts) => personhoods(counts),
            Dataset::Observations(obs) => personhoods(&exact_counts_from_union_observations(obs)?),
            Dataset::Personhood(table) => table.clone(),
        };
        if table.unit_ids() != unit_ids {
            return Err(IoError::UnitMismatch {
                expected: table.unit_ids().to_vec(),
                found: unit_ids.to_vec(),
            });
        }
        Ok(table)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Tsv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "tsv" => Ok(ReportFormat::Tsv),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

pub const REPORT_TSV_HEADER: &str =
    "measure\tvariant\tgroup_a\tgroup_b\tvalue\tstatus\tmessage\tdataset_digest\tunit_space_digest";

#[derive(Serialize)]
struct JsonRow<'a> {
    measure: &'static str,
    variant: &'static str,
    groups: &'a [String],
    value: serde_json::Value,
    status: &'static str,
    #[serde(skip_serializing_if = "str::is_empty")]
    message: &'a str,
    dataset_digest: &'a str,
    unit_space_digest: &'a str,
}

/// Serializes a report; rows keep the report's (measure, variant, groups) order.
pub fn emit_report(report: &MeasureReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Tsv => {
            let mut out = String::from(REPORT_TSV_HEADER);
            out.push('\n');
            for row in &report.rows {
                let value = row.outcome.score().map(format_sig6).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    row.measure,
                    row.variant,
                    row.groups.first().map_or("", String::as_str),
                    row.groups.get(1).map_or("", String::as_str),
                    value,
                    row.outcome.status(),
                    row.outcome.message().replace(['\t', '\n'], " "),
                    report.dataset_digest,
                    report.unit_space_digest,
                );
            }
            out
        }
        ReportFormat::Json => {
            let rows: Vec<JsonRow> = report
                .rows
                .iter()
                .map(|row| JsonRow {
                    measure: row.measure.as_str(),
                    variant: row.variant.as_str(),
                    groups: &row.groups,
                    value: row.outcome.score().map_or(serde_json::Value::Null, sig6_number),
                    status: row.outcome.status(),
                    message: row.outcome.message(),
                    dataset_digest: &report.dataset_digest,
                    unit_space_digest: &report.unit_space_digest,
                })
                .collect();
            to_json(&rows)
        }
    }
}

/// Bar-chart data extracted from a report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlotKind {
    /// One bar per group: its evenness.
    EvennessByGroup,
    /// One bar per other group: joint exposure of the named group with it.
    ExposureOfGroup(String),
}

impl FromStr for PlotKind {
    type Err = IoError;

    /// `evenness-by-group` or `exposure-of-group:<GROUP>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "evenness-by-group" => Ok(PlotKind::EvennessByGroup),
            Some(("exposure-of-group", g)) if !g.is_empty() => Ok(PlotKind::ExposureOfGroup(g.to_string())),
            _ => Err(IoError::UnknownPlot(s.to_string())),
        }
    }
}

/// Two-column `label,value` CSV sorted by descending value (label breaks ties).
/// Evenness uses the classical rows when the report has any.
pub fn emit_plot_data(report: &MeasureReport, kind: &PlotKind) -> Result<String, IoError> {
    let mut bars: Vec<(String, f64)> = match kind {
        PlotKind::EvennessByGroup => {
            let pick = |variant: Variant| -> Vec<(String, f64)> {
                report
                    .rows
                    .iter()
                    .filter(|r| r.measure == Measure::Evenness && r.variant == variant)
                    .filter_map(|r| r.outcome.score().map(|v| (r.groups[0].clone(), v)))
                    .collect()
            };
            let classical = pick(Variant::Classical);
            if classical.is_empty() {
                pick(Variant::Paper)
            } else {
                classical
            }
        }
        PlotKind::ExposureOfGroup(focal) => report
            .rows
            .iter()
            .filter(|r| r.measure == Measure::JointExposure && r.groups[0] == *focal)
            .filter_map(|r| r.outcome.score().map(|v| (r.groups[1].clone(), v)))
            .collect(),
    };
    if bars.is_empty() {
        let name = match kind {
            PlotKind::EvennessByGroup => "evenness-by-group".to_string(),
            PlotKind::ExposureOfGroup(g) => format!("exposure-of-group:{g}"),
        };
        return Err(IoError::NoMatchingRows(name));
    }
    bars.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut out = String::from("label,value\n");
    for (label, value) in bars {
        let _ = writeln!(out, "{label},{}", format_sig6(value));
    }
    Ok(out)
}

#[derive(Serialize)]
struct ClassificationRow<'a> {
    source_id: &'a str,
    leaning: serde_json::Value,
    unit: &'static str,
}

pub fn emit_classification(mapping: &BTreeMap<String, Classified>, format: ReportFormat) -> String {
    match format {
        ReportFormat::Tsv => {
            let mut out = String::from("source_id\tleaning\tunit\n");
            for (id, c) in mapping {
                let _ = writeln!(out, "{id}\t{}\t{}", format_sig6(c.score), c.unit);
            }
            out
        }
        ReportFormat::Json => {
            let rows: Vec<ClassificationRow> = mapping
                .iter()
                .map(|(id, c)| ClassificationRow {
                    source_id: id,
                    leaning: sig6_number(c.score),
                    unit: c.unit.as_str(),
                })
                .collect();
            to_json(&rows)
        }
    }
}
