//! Shared data model: unit spaces, access sets, exact-set counts,
//! personhood tables and per-group distributions.
//!
//! Everything here is an immutable value once validated. Units are addressed
//! by their position in `UnitSpace::unit_ids`; access sets are bitmasks over
//! those positions, which caps the number of units at [`MAX_UNITS`].

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Upper bound on the number of information units. Subset enumeration costs `2^m`.
pub const MAX_UNITS: usize = 20;

/// Tolerance for distance symmetry and position/distance agreement.
pub const GEOMETRY_TOL: f64 = 1e-9;

/// Tolerance (relative to `max(1, total)`) for personhood conservation.
pub const CONSERVATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("unit space has no units")]
    NoUnits,
    #[error("{0} units exceeds the supported maximum of {MAX_UNITS}")]
    TooManyUnits(usize),
    #[error("duplicate unit id {0:?}")]
    DuplicateUnit(String),
    #[error("unknown unit {0:?}")]
    UnknownUnit(String),
    #[error("distance matrix must be {expected}x{expected}")]
    DistanceShape { expected: usize },
    #[error("asymmetric distances: d[{a}][{b}] != d[{b}][{a}]")]
    Asymmetric { a: String, b: String },
    #[error("nonzero diagonal distance at unit {0:?}")]
    NonzeroDiagonal(String),
    #[error("distance d[{a}][{b}] is negative or not finite")]
    InvalidDistance { a: String, b: String },
    #[error("positions must all share one dimension n >= 1 and be finite")]
    PositionDimension,
    #[error("distance d[{a}][{b}] disagrees with the Euclidean distance of the positions")]
    PositionDistanceMismatch { a: String, b: String },
    #[error("expected {expected} topic counts, got {got}")]
    TopicCountLength { expected: usize, got: usize },
    #[error("center_order is not a permutation of the unit ids")]
    CenterOrderNotPermutation,
    #[error("a center unit needs positions or distances to order units")]
    CenterWithoutGeometry,
    #[error("empty access set")]
    EmptyAccessSet,
    #[error("access set refers to unit index {0} outside the unit space")]
    AccessSetOutOfRange(usize),
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
    #[error("group {group:?}: expected {expected} personhood entries, got {got}")]
    MassLength { group: String, expected: usize, got: usize },
    #[error("group {0:?}: personhood entries must be finite and nonnegative")]
    NegativeMass(String),
    #[error("group {group:?}: personhood sums to {sum} but the group has {total} people")]
    MassNotConserved { group: String, sum: f64, total: f64 },
    #[error("complement size must be finite and nonnegative")]
    NegativeComplement,
    #[error("population {given} is smaller than the loaded population {loaded}")]
    PopulationTooSmall { given: u64, loaded: u64 },
}

/// The exact set of units a person follows, as a bitmask over unit indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccessSet(u32);

impl AccessSet {
    pub fn from_bits(bits: u32) -> Self {
        AccessSet(bits)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        AccessSet(indices.into_iter().fold(0u32, |acc, i| acc | (1 << i)))
    }

    /// The full set `{0, .., m-1}`.
    pub fn full(m: usize) -> Self {
        AccessSet(((1u64 << m) - 1) as u32)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, unit: usize) -> bool {
        unit < 32 && self.0 & (1 << unit) != 0
    }

    pub fn intersects(self, other: AccessSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset_of(self, other: AccessSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Unit indices in ascending order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }

    /// Highest unit index plus one; zero for the empty set.
    pub fn span(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }
}

/// Raw, unvalidated description of a unit space.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct UnitSpaceSpec {
    pub unit_ids: Vec<String>,
    pub positions: Option<Vec<Vec<f64>>>,
    pub distances: Option<Vec<Vec<f64>>>,
    /// Defaults to all zeros when `None`.
    pub topic_counts: Option<Vec<u64>>,
    /// Designated center unit; ignored when `center_order` is given.
    pub center: Option<String>,
    pub center_order: Option<Vec<String>>,
}

impl UnitSpaceSpec {
    pub fn new<S: Into<String>>(unit_ids: impl IntoIterator<Item = S>) -> Self {
        UnitSpaceSpec {
            unit_ids: unit_ids.into_iter().map(Into::into).collect(),
            ..Default::default()
        }
    }

    /// Units on a line, one coordinate each.
    pub fn with_line_positions(mut self, xs: &[f64]) -> Self {
        self.positions = Some(xs.iter().map(|&x| vec![x]).collect());
        self
    }

    pub fn with_positions(mut self, positions: Vec<Vec<f64>>) -> Self {
        self.positions = Some(positions);
        self
    }

    pub fn with_distances(mut self, distances: Vec<Vec<f64>>) -> Self {
        self.distances = Some(distances);
        self
    }

    pub fn with_topic_counts(mut self, counts: Vec<u64>) -> Self {
        self.topic_counts = Some(counts);
        self
    }

    pub fn with_center(mut self, center: impl Into<String>) -> Self {
        self.center = Some(center.into());
        self
    }

    pub fn with_center_order<S: Into<String>>(mut self, order: impl IntoIterator<Item = S>) -> Self {
        self.center_order = Some(order.into_iter().map(Into::into).collect());
        self
    }

    /// Checks every invariant and derives distances (Euclidean, from positions)
    /// and the center ordering (ascending distance, unit id tiebreak).
    pub fn validate(self) -> Result<UnitSpace, ModelError> {
        let m = self.unit_ids.len();
        if m == 0 {
            return Err(ModelError::NoUnits);
        }
        if m > MAX_UNITS {
            return Err(ModelError::TooManyUnits(m));
        }
        let mut index = BTreeMap::new();
        for (i, id) in self.unit_ids.iter().enumerate() {
            if index.insert(id.clone(), i).is_some() {
                return Err(ModelError::DuplicateUnit(id.clone()));
            }
        }
        let ids = &self.unit_ids;

        if let Some(positions) = &self.positions {
            let dim = positions.first().map_or(0, Vec::len);
            if positions.len() != m
                || dim == 0
                || positions
                    .iter()
                    .any(|p| p.len() != dim || p.iter().any(|x| !x.is_finite()))
            {
                return Err(ModelError::PositionDimension);
            }
        }

        let distances = match (&self.distances, &self.positions) {
            (Some(d), positions) => {
                if d.len() != m || d.iter().any(|row| row.len() != m) {
                    return Err(ModelError::DistanceShape { expected: m });
                }
                for i in 0..m {
                    for j in 0..m {
                        let v = d[i][j];
                        if !v.is_finite() || v < 0.0 {
                            return Err(ModelError::InvalidDistance {
                                a: ids[i].clone(),
                                b: ids[j].clone(),
                            });
                        }
                    }
                    if d[i][i] != 0.0 {
                        return Err(ModelError::NonzeroDiagonal(ids[i].clone()));
                    }
                }
                for i in 0..m {
                    for j in (i + 1)..m {
                        if (d[i][j] - d[j][i]).abs() > GEOMETRY_TOL {
                            return Err(ModelError::Asymmetric {
                                a: ids[i].clone(),
                                b: ids[j].clone(),
                            });
                        }
                    }
                }
                if let Some(p) = positions {
                    for i in 0..m {
                        for j in 0..m {
                            if (euclidean(&p[i], &p[j]) - d[i][j]).abs() > GEOMETRY_TOL {
                                return Err(ModelError::PositionDistanceMismatch {
                                    a: ids[i].clone(),
                                    b: ids[j].clone(),
                                });
                            }
                        }
                    }
                }
                Some(d.clone())
            }
            (None, Some(p)) => Some(
                (0..m)
                    .map(|i| (0..m).map(|j| euclidean(&p[i], &p[j])).collect())
                    .collect(),
            ),
            (None, None) => None,
        };

        let topic_counts = match self.topic_counts {
            Some(t) if t.len() != m => {
                return Err(ModelError::TopicCountLength {
                    expected: m,
                    got: t.len(),
                })
            }
            Some(t) => t,
            None => vec![0; m],
        };

        let center_order = match (&self.center_order, &self.center) {
            (Some(order), _) => {
                let mut seen = vec![false; m];
                if order.len() != m {
                    return Err(ModelError::CenterOrderNotPermutation);
                }
                let mut out = Vec::with_capacity(m);
                for id in order {
                    match index.get(id) {
                        Some(&i) if !seen[i] => {
                            seen[i] = true;
                            out.push(i);
                        }
                        _ => return Err(ModelError::CenterOrderNotPermutation),
                    }
                }
                Some(out)
            }
            (None, Some(center)) => {
                let c = *index
                    .get(center)
                    .ok_or_else(|| ModelError::UnknownUnit(center.clone()))?;
                let d = distances.as_ref().ok_or(ModelError::CenterWithoutGeometry)?;
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&x, &y| d[c][x].total_cmp(&d[c][y]).then_with(|| ids[x].cmp(&ids[y])));
                Some(order)
            }
            (None, None) => None,
        };

        Ok(UnitSpace {
            unit_ids: self.unit_ids,
            positions: self.positions,
            distances,
            topic_counts,
            center_order,
        })
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// A validated space of information units.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSpace {
    unit_ids: Vec<String>,
    positions: Option<Vec<Vec<f64>>>,
    distances: Option<Vec<Vec<f64>>>,
    topic_counts: Vec<u64>,
    center_order: Option<Vec<usize>>,
}

impl UnitSpace {
    /// Five political buckets on a line at -1, -0.5, 0, 0.5, 1, centered on M.
    pub fn political_line() -> Self {
        UnitSpaceSpec::new(["VC", "C", "M", "L", "VL"])
            .with_line_positions(&[-1.0, -0.5, 0.0, 0.5, 1.0])
            .with_center("M")
            .validate()
            .expect("built-in unit space is valid")
    }

    pub fn unit_ids(&self) -> &[String] {
        &self.unit_ids
    }

    pub fn len(&self) -> usize {
        self.unit_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unit_ids.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.unit_ids.iter().position(|u| u == id)
    }

    pub fn positions(&self) -> Option<&[Vec<f64>]> {
        self.positions.as_deref()
    }

    pub fn distances(&self) -> Option<&[Vec<f64>]> {
        self.distances.as_deref()
    }

    pub fn distance(&self, a: usize, b: usize) -> Option<f64> {
        self.distances.as_ref().map(|d| d[a][b])
    }

    pub fn topic_counts(&self) -> &[u64] {
        &self.topic_counts
    }

    pub fn topic_total(&self) -> u64 {
        self.topic_counts.iter().sum()
    }

    /// Unit indices sorted outward from the center, when known.
    pub fn center_order(&self) -> Option<&[usize]> {
        self.center_order.as_deref()
    }

    /// Back to the raw form, with derived distances and ordering made explicit.
    pub fn to_spec(&self) -> UnitSpaceSpec {
        UnitSpaceSpec {
            unit_ids: self.unit_ids.clone(),
            positions: self.positions.clone(),
            distances: self.distances.clone(),
            topic_counts: Some(self.topic_counts.clone()),
            center: None,
            center_order: self
                .center_order
                .as_ref()
                .map(|o| o.iter().map(|&i| self.unit_ids[i].clone()).collect()),
        }
    }
}

/// Number of people per group whose access set is exactly a given set.
///
/// Only nonzero counts are stored, so two tables describing the same
/// population compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSetCounts {
    unit_ids: Vec<String>,
    groups: BTreeMap<String, BTreeMap<AccessSet, u64>>,
}

impl ExactSetCounts {
    pub fn new<S: Into<String>>(unit_ids: impl IntoIterator<Item = S>) -> Result<Self, ModelError> {
        let unit_ids: Vec<String> = unit_ids.into_iter().map(Into::into).collect();
        if unit_ids.is_empty() {
            return Err(ModelError::NoUnits);
        }
        if unit_ids.len() > MAX_UNITS {
            return Err(ModelError::TooManyUnits(unit_ids.len()));
        }
        for (i, id) in unit_ids.iter().enumerate() {
            if unit_ids[..i].contains(id) {
                return Err(ModelError::DuplicateUnit(id.clone()));
            }
        }
        Ok(ExactSetCounts {
            unit_ids,
            groups: BTreeMap::new(),
        })
    }

    /// Registers a group even if it ends up with no people.
    pub fn ensure_group(&mut self, group: &str) {
        self.groups.entry(group.to_string()).or_default();
    }

    /// Adds `count` people of `group` with access set `set`, merging with any
    /// existing entry.
    pub fn add(&mut self, group: &str, set: AccessSet, count: u64) -> Result<(), ModelError> {
        if set.is_empty() {
            return Err(ModelError::EmptyAccessSet);
        }
        if set.span() > self.unit_ids.len() {
            return Err(ModelError::AccessSetOutOfRange(set.span() - 1));
        }
        let entries = self.groups.entry(group.to_string()).or_default();
        if count > 0 {
            *entries.entry(set).or_insert(0) += count;
        }
        Ok(())
    }

    pub fn unit_ids(&self) -> &[String] {
        &self.unit_ids
    }

    pub fn unit_count(&self) -> usize {
        self.unit_ids.len()
    }

    pub fn group_ids(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, &BTreeMap<AccessSet, u64>)> {
        self.groups.iter().map(|(g, e)| (g.as_str(), e))
    }

    pub fn group(&self, group: &str) -> Option<&BTreeMap<AccessSet, u64>> {
        self.groups.get(group)
    }

    pub fn get(&self, group: &str, set: AccessSet) -> u64 {
        self.groups.get(group).and_then(|e| e.get(&set)).copied().unwrap_or(0)
    }

    pub fn group_population(&self, group: &str) -> u64 {
        self.groups.get(group).map_or(0, |e| e.values().sum())
    }

    pub fn population(&self) -> u64 {
        self.groups.values().flat_map(|e| e.values()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.population() == 0
    }
}

/// Personhood mass of one group over the units, plus its head count.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPersonhood {
    pub mass: Vec<f64>,
    pub people: u64,
}

/// Per-group, per-unit fractional personhoods with the derived totals.
#[derive(Debug, Clone, PartialEq)]
pub struct PersonhoodTable {
    unit_ids: Vec<String>,
    groups: BTreeMap<String, GroupPersonhood>,
    totals: Vec<f64>,
    population: u64,
}

impl PersonhoodTable {
    /// Validates nonnegativity and conservation, then derives the per-unit
    /// totals and the population (sum of group sizes).
    pub fn from_parts(unit_ids: Vec<String>, groups: BTreeMap<String, GroupPersonhood>) -> Result<Self, ModelError> {
        let m = unit_ids.len();
        if m == 0 {
            return Err(ModelError::NoUnits);
        }
        for (g, gp) in &groups {
            if gp.mass.len() != m {
                return Err(ModelError::MassLength {
                    group: g.clone(),
                    expected: m,
                    got: gp.mass.len(),
                });
            }
            if gp.mass.iter().any(|&x| !x.is_finite() || x < 0.0) {
                return Err(ModelError::NegativeMass(g.clone()));
            }
            let sum: f64 = gp.mass.iter().sum();
            let total = gp.people as f64;
            if (sum - total).abs() > CONSERVATION_TOL * total.max(1.0) {
                return Err(ModelError::MassNotConserved {
                    group: g.clone(),
                    sum,
                    total,
                });
            }
        }
        let mut totals = vec![0.0; m];
        for gp in groups.values() {
            for (t, x) in totals.iter_mut().zip(&gp.mass) {
                *t += x;
            }
        }
        let population = groups.values().map(|gp| gp.people).sum();
        Ok(PersonhoodTable {
            unit_ids,
            groups,
            totals,
            population,
        })
    }

    /// Replaces the population used for complement sizes with an external
    /// figure, which must cover everyone loaded.
    pub fn with_population(mut self, population: u64) -> Result<Self, ModelError> {
        let loaded: u64 = self.groups.values().map(|gp| gp.people).sum();
        if population < loaded {
            return Err(ModelError::PopulationTooSmall {
                given: population,
                loaded,
            });
        }
        self.population = population;
        Ok(self)
    }

    pub fn unit_ids(&self) -> &[String] {
        &self.unit_ids
    }

    pub fn unit_count(&self) -> usize {
        self.unit_ids.len()
    }

    pub fn group_ids(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, &GroupPersonhood)> {
        self.groups.iter().map(|(g, p)| (g.as_str(), p))
    }

    pub fn group(&self, group: &str) -> Option<&GroupPersonhood> {
        self.groups.get(group)
    }

    /// `total_i`: personhood of everyone with access to unit `i`.
    pub fn totals(&self) -> &[f64] {
        &self.totals
    }

    pub fn population(&self) -> u64 {
        self.population
    }

    /// Projects one group out of the table.
    pub fn distribution(&self, group: &str) -> Result<GroupDistribution, ModelError> {
        let gp = self
            .groups
            .get(group)
            .ok_or_else(|| ModelError::UnknownGroup(group.to_string()))?;
        Ok(GroupDistribution {
            group_id: group.to_string(),
            mass: gp.mass.clone(),
            total: gp.people as f64,
            complement: (self.population - gp.people) as f64,
        })
    }

    /// The whole population viewed as a single group.
    pub fn population_distribution(&self) -> GroupDistribution {
        let people: u64 = self.groups.values().map(|gp| gp.people).sum();
        GroupDistribution {
            group_id: "*".to_string(),
            mass: self.totals.clone(),
            total: people as f64,
            complement: (self.population - people) as f64,
        }
    }
}

/// One group's personhood vector with its size `a_total` and complement `a'_total`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDistribution {
    group_id: String,
    mass: Vec<f64>,
    total: f64,
    complement: f64,
}

impl GroupDistribution {
    pub fn new(group_id: impl Into<String>, mass: Vec<f64>, total: f64, complement: f64) -> Result<Self, ModelError> {
        let group_id = group_id.into();
        if mass.iter().any(|&x| !x.is_finite() || x < 0.0) || !total.is_finite() {
            return Err(ModelError::NegativeMass(group_id));
        }
        let sum: f64 = mass.iter().sum();
        if (sum - total).abs() > CONSERVATION_TOL * total.abs().max(1.0) {
            return Err(ModelError::MassNotConserved {
                group: group_id,
                sum,
                total,
            });
        }
        if !complement.is_finite() || complement < 0.0 {
            return Err(ModelError::NegativeComplement);
        }
        Ok(GroupDistribution {
            group_id,
            mass,
            total,
            complement,
        })
    }

    /// Distribution whose size is the sum of its masses.
    pub fn from_mass(group_id: impl Into<String>, mass: Vec<f64>, complement: f64) -> Result<Self, ModelError> {
        let total = mass.iter().sum();
        Self::new(group_id, mass, total, complement)
    }

    pub fn group_id(&self) -> &str {
        &self.group_id
    }

    /// `a_i` for every unit.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    /// `a_total`.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// `a'_total`.
    pub fn complement(&self) -> f64 {
        self.complement
    }

    pub fn unit_count(&self) -> usize {
        self.mass.len()
    }
}

impl fmt::Display for AccessSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_positions_derive_distances() {
        let space = UnitSpaceSpec::new(["a", "b"])
            .with_line_positions(&[0.0, 1.0])
            .validate()
            .unwrap();
        assert_eq!(space.distances().unwrap(), &[vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn asymmetric_distances_rejected() {
        let err = UnitSpaceSpec::new(["a", "b"])
            .with_distances(vec![vec![0.0, 1.0], vec![2.0, 0.0]])
            .validate()
            .unwrap_err();
        assert!(matches!(err, ModelError::Asymmetric { .. }));
        assert!(err.to_string().contains("asymmetric"));
    }

    #[test]
    fn political_line_extremes_are_two_apart() {
        let space = UnitSpace::political_line();
        let vc = space.index_of("VC").unwrap();
        let vl = space.index_of("VL").unwrap();
        assert_eq!(space.distance(vc, vl), Some(2.0));
    }

    #[test]
    fn center_order_uses_distance_then_id() {
        let space = UnitSpace::political_line();
        let order: Vec<&str> = space
            .center_order()
            .unwrap()
            .iter()
            .map(|&i| space.unit_ids()[i].as_str())
            .collect();
        assert_eq!(order, ["M", "C", "L", "VC", "VL"]);
    }

    #[test]
    fn nonzero_diagonal_and_bad_center_order_rejected() {
        let err = UnitSpaceSpec::new(["a", "b"])
            .with_distances(vec![vec![0.5, 1.0], vec![1.0, 0.0]])
            .validate()
            .unwrap_err();
        assert!(matches!(err, ModelError::NonzeroDiagonal(_)));

        let err = UnitSpaceSpec::new(["a", "b"])
            .with_center_order(["a", "a"])
            .validate()
            .unwrap_err();
        assert_eq!(err, ModelError::CenterOrderNotPermutation);

        let err = UnitSpaceSpec::new(["a", "b"])
            .with_center_order(["a", "c"])
            .validate()
            .unwrap_err();
        assert_eq!(err, ModelError::CenterOrderNotPermutation);
    }

    #[test]
    fn position_distance_mismatch_rejected() {
        let err = UnitSpaceSpec::new(["a", "b"])
            .with_line_positions(&[0.0, 1.0])
            .with_distances(vec![vec![0.0, 1.5], vec![1.5, 0.0]])
            .validate()
            .unwrap_err();
        assert!(matches!(err, ModelError::PositionDistanceMismatch { .. }));
    }

    #[test]
    fn validation_is_idempotent() {
        let once = UnitSpaceSpec::new(["x", "y", "z"])
            .with_positions(vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![1.0, 1.0]])
            .with_center("z")
            .validate()
            .unwrap();
        let twice = once.to_spec().validate().unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn duplicate_units_rejected() {
        let err = UnitSpaceSpec::new(["a", "a"]).validate().unwrap_err();
        assert_eq!(err, ModelError::DuplicateUnit("a".into()));
    }

    #[test]
    fn access_set_helpers() {
        let s = AccessSet::from_indices([0, 2]);
        assert_eq!(s.bits(), 0b101);
        assert_eq!(s.len(), 2);
        assert!(s.contains(2) && !s.contains(1));
        assert_eq!(s.span(), 3);
        assert_eq!(s.indices().collect::<Vec<_>>(), [0, 2]);
        assert!(s.is_subset_of(AccessSet::full(3)));
        assert_eq!(s.to_string(), "{0,2}");
    }

    #[test]
    fn exact_counts_reject_empty_and_out_of_range_sets() {
        let mut c = ExactSetCounts::new(["a", "b"]).unwrap();
        assert_eq!(c.add("g", AccessSet::from_bits(0), 1), Err(ModelError::EmptyAccessSet));
        assert!(c.add("g", AccessSet::from_indices([2]), 1).is_err());
        c.add("g", AccessSet::from_indices([0]), 2).unwrap();
        c.add("g", AccessSet::from_indices([0]), 3).unwrap();
        assert_eq!(c.get("g", AccessSet::from_indices([0])), 5);
    }

    fn table(groups: &[(&str, Vec<f64>, u64)]) -> PersonhoodTable {
        let m = groups[0].1.len();
        PersonhoodTable::from_parts(
            (0..m).map(|i| format!("u{i}")).collect(),
            groups
                .iter()
                .map(|(g, mass, people)| {
                    (
                        g.to_string(),
                        GroupPersonhood {
                            mass: mass.clone(),
                            people: *people,
                        },
                    )
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn whole_population_group_has_empty_complement() {
        let t = table(&[("g", vec![1.0, 1.0, 1.0, 1.0], 4)]);
        let d = t.distribution("g").unwrap();
        assert_eq!(d.mass(), &[1.0, 1.0, 1.0, 1.0]);
        assert_eq!(d.total(), 4.0);
        assert_eq!(d.complement(), 0.0);
    }

    #[test]
    fn two_groups_complement_is_the_other_group() {
        let t = table(&[("A", vec![2.0, 0.0], 2), ("B", vec![1.0, 1.0], 2)]);
        let d = t.distribution("A").unwrap();
        assert_eq!(d.mass(), &[2.0, 0.0]);
        assert_eq!(d.complement(), 2.0);
        assert_eq!(t.totals(), &[3.0, 1.0]);
        assert!(matches!(t.distribution("C"), Err(ModelError::UnknownGroup(_))));
    }

    #[test]
    fn conservation_enforced_on_tables() {
        let err = PersonhoodTable::from_parts(
            vec!["u".into()],
            [(
                "g".to_string(),
                GroupPersonhood {
                    mass: vec![2.5],
                    people: 2,
                },
            )]
            .into_iter()
            .collect(),
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::MassNotConserved { .. }));
    }

    #[test]
    fn external_population_must_cover_loaded_people() {
        let t = table(&[("g", vec![1.0, 1.0], 2)]);
        assert!(t.clone().with_population(1).is_err());
        let t = t.with_population(10).unwrap();
        assert_eq!(t.distribution("g").unwrap().complement(), 8.0);
    }
}
