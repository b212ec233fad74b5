//! From membership logs or union-reach observations to exact access-set
//! counts, and from those to fractional personhoods.
//!
//! A person who follows `k` units counts as `1/k` of a person in each of them.
//! Union observations `U(T)` (people following at least one unit of `T`) are
//! turned back into exact-set counts by Möbius inversion over the subset
//! lattice, all in integer arithmetic.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{AccessSet, ExactSetCounts, GroupPersonhood, ModelError, PersonhoodTable, MAX_UNITS};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PersonhoodError {
    #[error("person {person} in two groups ({first} and {second})")]
    PersonInTwoGroups {
        person: String,
        first: String,
        second: String,
    },
    #[error("unknown unit {0:?}")]
    UnknownUnit(String),
    #[error("incomplete observation table: group {group:?} has no row for {subset}")]
    Incomplete { group: String, subset: String },
    #[error("duplicate observation for group {group:?} and {subset}")]
    DuplicateObservation { group: String, subset: String },
    #[error("non-monotone observations for group {group:?}: U({subset}) > U({superset})")]
    NonMonotone {
        group: String,
        subset: String,
        superset: String,
    },
    #[error("inconsistent observations for group {group:?}: implied count for exactly {subset} is {value}")]
    Inconsistent { group: String, subset: String, value: i64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One row of a membership log: `person` (in `group`) follows `unit`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Membership {
    pub person_id: String,
    pub group_id: String,
    pub unit_id: String,
}

impl Membership {
    pub fn new(person: impl Into<String>, group: impl Into<String>, unit: impl Into<String>) -> Self {
        Membership {
            person_id: person.into(),
            group_id: group.into(),
            unit_id: unit.into(),
        }
    }
}

/// Renders a set with unit ids, e.g. `{VC,M}`.
pub fn describe_set(set: AccessSet, unit_ids: &[String]) -> String {
    let names: Vec<&str> = set
        .indices()
        .map(|i| unit_ids.get(i).map_or("?", String::as_str))
        .collect();
    format!("{{{}}}", names.join(","))
}

/// Tabulates, per group, how many distinct people follow exactly each set of units.
pub fn exact_counts_from_memberships(
    log: &[Membership],
    unit_ids: &[String],
) -> Result<ExactSetCounts, PersonhoodError> {
    let mut counts = ExactSetCounts::new(unit_ids.iter().cloned())?;
    let index: BTreeMap<&str, usize> = unit_ids.iter().enumerate().map(|(i, u)| (u.as_str(), i)).collect();

    let mut people: BTreeMap<&str, (&str, u32)> = BTreeMap::new();
    for row in log {
        let unit = *index
            .get(row.unit_id.as_str())
            .ok_or_else(|| PersonhoodError::UnknownUnit(row.unit_id.clone()))?;
        match people.entry(row.person_id.as_str()) {
            Entry::Vacant(v) => {
                v.insert((row.group_id.as_str(), 1 << unit));
            }
            Entry::Occupied(mut o) => {
                let (group, bits) = o.get_mut();
                if *group != row.group_id {
                    return Err(PersonhoodError::PersonInTwoGroups {
                        person: row.person_id.clone(),
                        first: group.to_string(),
                        second: row.group_id.clone(),
                    });
                }
                *bits |= 1 << unit;
            }
        }
    }
    for (group, bits) in people.into_values() {
        counts.add(group, AccessSet::from_bits(bits), 1)?;
    }
    Ok(counts)
}

/// Union-reach observations: for each group and nonempty `T`, the number of
/// people following at least one unit of `T`.
///
/// Always complete over the `2^m - 1` nonempty subsets and monotone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationTable {
    unit_ids: Vec<String>,
    // indexed by subset bitmask; slot 0 (the empty set) is always 0
    groups: BTreeMap<String, Vec<u64>>,
}

impl ObservationTable {
    /// Builds a table from `(group, subset, reach)` records, rejecting
    /// duplicate rows, missing subsets and monotonicity violations.
    pub fn from_records<I>(unit_ids: Vec<String>, records: I) -> Result<Self, PersonhoodError>
    where
        I: IntoIterator<Item = (String, AccessSet, u64)>,
    {
        let m = unit_ids.len();
        if m == 0 {
            return Err(ModelError::NoUnits.into());
        }
        if m > MAX_UNITS {
            return Err(ModelError::TooManyUnits(m).into());
        }
        let size = 1usize << m;
        let mut raw: BTreeMap<String, Vec<Option<u64>>> = BTreeMap::new();
        for (group, set, reach) in records {
            if set.is_empty() {
                return Err(ModelError::EmptyAccessSet.into());
            }
            if set.span() > m {
                return Err(ModelError::AccessSetOutOfRange(set.span() - 1).into());
            }
            let slots = raw.entry(group.clone()).or_insert_with(|| vec![None; size]);
            let slot = &mut slots[set.bits() as usize];
            if slot.is_some() {
                return Err(PersonhoodError::DuplicateObservation {
                    subset: describe_set(set, &unit_ids),
                    group,
                });
            }
            *slot = Some(reach);
        }

        let mut groups = BTreeMap::new();
        for (group, slots) in raw {
            let mut reach = vec![0u64; size];
            for mask in 1..size {
                reach[mask] = slots[mask].ok_or_else(|| PersonhoodError::Incomplete {
                    group: group.clone(),
                    subset: describe_set(AccessSet::from_bits(mask as u32), &unit_ids),
                })?;
            }
            for mask in 1..size {
                for i in 0..m {
                    let sup = mask | (1 << i);
                    if sup != mask && reach[mask] > reach[sup] {
                        return Err(PersonhoodError::NonMonotone {
                            group,
                            subset: describe_set(AccessSet::from_bits(mask as u32), &unit_ids),
                            superset: describe_set(AccessSet::from_bits(sup as u32), &unit_ids),
                        });
                    }
                }
            }
            groups.insert(group, reach);
        }
        Ok(ObservationTable { unit_ids, groups })
    }

    pub fn unit_ids(&self) -> &[String] {
        &self.unit_ids
    }

    pub fn group_ids(&self) -> impl Iterator<Item = &str> {
        self.groups.keys().map(String::as_str)
    }

    /// `U_g(T)`; zero for the empty set, `None` for an unknown group.
    pub fn reach(&self, group: &str, set: AccessSet) -> Option<u64> {
        self.groups.get(group).and_then(|r| r.get(set.bits() as usize)).copied()
    }

    /// All `(group, subset, reach)` rows over nonempty subsets, in group then
    /// bitmask order.
    pub fn records(&self) -> impl Iterator<Item = (&str, AccessSet, u64)> + '_ {
        self.groups.iter().flat_map(|(g, reach)| {
            reach
                .iter()
                .enumerate()
                .skip(1)
                .map(move |(mask, &u)| (g.as_str(), AccessSet::from_bits(mask as u32), u))
        })
    }
}

/// Superset-closed sums: `out[X] = Σ_{A ⊆ X} f[A]`.
fn subset_sums(f: &mut [i64], m: usize) {
    for bit in 0..m {
        for mask in 0..f.len() {
            if mask & (1 << bit) != 0 {
                f[mask] += f[mask ^ (1 << bit)];
            }
        }
    }
}

/// Inverse of [`subset_sums`] (Möbius inversion on the subset lattice).
fn subset_differences(f: &mut [i64], m: usize) {
    for bit in 0..m {
        for mask in 0..f.len() {
            if mask & (1 << bit) != 0 {
                f[mask] -= f[mask ^ (1 << bit)];
            }
        }
    }
}

/// Forward model: `U_g(T) = Σ_{A ∩ T ≠ ∅} E_g(A)`.
pub fn union_observations_from_exact(counts: &ExactSetCounts) -> ObservationTable {
    let m = counts.unit_count();
    let size = 1usize << m;
    let full = size - 1;
    let mut groups = BTreeMap::new();
    for (group, entries) in counts.groups() {
        let mut within = vec![0i64; size];
        for (set, &c) in entries {
            within[set.bits() as usize] += c as i64;
        }
        subset_sums(&mut within, m);
        // people whose access set avoids T are exactly those inside S \ T
        let population = within[full];
        let reach = (0..size).map(|t| (population - within[full & !t]) as u64).collect();
        groups.insert(group.to_string(), reach);
    }
    ObservationTable {
        unit_ids: counts.unit_ids().to_vec(),
        groups,
    }
}

/// Recovers exact-set counts from a complete union-reach table.
///
/// With `F(X) = U(S) - U(S \ X)` (people whose access set lies inside `X`),
/// `E(A) = Σ_{B ⊆ A} (-1)^{|A \ B|} F(B)`. A negative result means the
/// observations cannot come from any population and is reported with the
/// offending subset.
pub fn exact_counts_from_union_observations(obs: &ObservationTable) -> Result<ExactSetCounts, PersonhoodError> {
    let m = obs.unit_ids.len();
    let size = 1usize << m;
    let full = size - 1;
    let mut counts = ExactSetCounts::new(obs.unit_ids.iter().cloned())?;
    for (group, reach) in &obs.groups {
        counts.ensure_group(group);
        let mut f: Vec<i64> = (0..size)
            .map(|x| reach[full] as i64 - reach[full & !x] as i64)
            .collect();
        subset_differences(&mut f, m);
        for (mask, &e) in f.iter().enumerate().skip(1) {
            if e < 0 {
                return Err(PersonhoodError::Inconsistent {
                    group: group.clone(),
                    subset: describe_set(AccessSet::from_bits(mask as u32), &obs.unit_ids),
                    value: e,
                });
            }
            if e > 0 {
                counts.add(group, AccessSet::from_bits(mask as u32), e as u64)?;
            }
        }
    }
    Ok(counts)
}

/// Fractional personhoods `a_i(g) = Σ_{T ∋ i} E_g(T) / |T|`.
///
/// Counts are accumulated exactly per access-set size and divided once per
/// size, so the only rounding is in the final `m` divisions and sums.
pub fn personhoods(counts: &ExactSetCounts) -> PersonhoodTable {
    let m = counts.unit_count();
    let mut groups = BTreeMap::new();
    for (group, entries) in counts.groups() {
        // by_size[k][i]: people following exactly k units, one of which is i
        let mut by_size = vec![vec![0u64; m]; m + 1];
        let mut people = 0u64;
        for (set, &c) in entries {
            people += c;
            let k = set.len();
            for i in set.indices() {
                by_size[k][i] += c;
            }
        }
        let mass = (0..m)
            .map(|i| (1..=m).map(|k| by_size[k][i] as f64 / k as f64).sum::<f64>())
            .collect();
        groups.insert(group.to_string(), GroupPersonhood { mass, people });
    }
    PersonhoodTable::from_parts(counts.unit_ids().to_vec(), groups)
        .expect("personhoods conserve group sizes by construction")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn set(idx: &[usize]) -> AccessSet {
        AccessSet::from_indices(idx.iter().copied())
    }

    fn obs(units: &[&str], rows: &[(&[usize], u64)]) -> Result<ObservationTable, PersonhoodError> {
        ObservationTable::from_records(ids(units), rows.iter().map(|(s, u)| ("g".to_string(), set(s), *u)))
    }

    #[test]
    fn tabulates_exact_sets() {
        let log = vec![
            Membership::new("p1", "g", "u1"),
            Membership::new("p2", "g", "u1"),
            Membership::new("p2", "g", "u2"),
            Membership::new("p3", "g", "u2"),
        ];
        let c = exact_counts_from_memberships(&log, &ids(&["u1", "u2"])).unwrap();
        assert_eq!(c.get("g", set(&[0])), 1);
        assert_eq!(c.get("g", set(&[0, 1])), 1);
        assert_eq!(c.get("g", set(&[1])), 1);
    }

    #[test]
    fn empty_log_gives_empty_counts() {
        let c = exact_counts_from_memberships(&[], &ids(&["u1"])).unwrap();
        assert_eq!(c.group_ids().count(), 0);
        assert!(c.is_empty());
    }

    #[test]
    fn everyone_following_everything() {
        let mut log = Vec::new();
        for p in ["p1", "p2", "p3"] {
            for u in ["u1", "u2", "u3"] {
                log.push(Membership::new(p, "g", u));
            }
        }
        let c = exact_counts_from_memberships(&log, &ids(&["u1", "u2", "u3"])).unwrap();
        assert_eq!(c.get("g", set(&[0, 1, 2])), 3);
        assert_eq!(c.group("g").unwrap().len(), 1);
    }

    #[test]
    fn membership_errors() {
        let log = vec![Membership::new("p1", "g1", "u1"), Membership::new("p1", "g2", "u1")];
        let err = exact_counts_from_memberships(&log, &ids(&["u1"])).unwrap_err();
        assert!(matches!(err, PersonhoodError::PersonInTwoGroups { .. }));
        let log = vec![Membership::new("p1", "g1", "zz")];
        let err = exact_counts_from_memberships(&log, &ids(&["u1"])).unwrap_err();
        assert_eq!(err, PersonhoodError::UnknownUnit("zz".into()));
    }

    #[test]
    fn forward_model_matches_enumeration() {
        let mut c = ExactSetCounts::new(["u1", "u2"]).unwrap();
        c.add("g", set(&[0]), 1).unwrap();
        c.add("g", set(&[0, 1]), 1).unwrap();
        c.add("g", set(&[1]), 1).unwrap();
        let u = union_observations_from_exact(&c);
        assert_eq!(u.reach("g", set(&[0])), Some(2));
        assert_eq!(u.reach("g", set(&[1])), Some(2));
        assert_eq!(u.reach("g", set(&[0, 1])), Some(3));

        let mut single = ExactSetCounts::new(["u1", "u2"]).unwrap();
        single.add("g", set(&[0]), 1).unwrap();
        let u = union_observations_from_exact(&single);
        assert_eq!(u.reach("g", set(&[0])), Some(1));
        assert_eq!(u.reach("g", set(&[0, 1])), Some(1));
        assert_eq!(u.reach("g", set(&[1])), Some(0));
    }

    #[test]
    fn no_people_gives_zero_reach() {
        let mut c = ExactSetCounts::new(["u1", "u2"]).unwrap();
        c.ensure_group("g");
        let u = union_observations_from_exact(&c);
        assert!(u.records().all(|(_, _, r)| r == 0));
        assert_eq!(u.records().count(), 3);
    }

    #[test]
    fn inversion_examples() {
        let t = obs(&["u1", "u2"], &[(&[0], 2), (&[1], 2), (&[0, 1], 3)]).unwrap();
        let c = exact_counts_from_union_observations(&t).unwrap();
        assert_eq!(c.get("g", set(&[0])), 1);
        assert_eq!(c.get("g", set(&[1])), 1);
        assert_eq!(c.get("g", set(&[0, 1])), 1);

        let t = obs(&["u1", "u2"], &[(&[0], 7), (&[1], 7), (&[0, 1], 7)]).unwrap();
        let c = exact_counts_from_union_observations(&t).unwrap();
        assert_eq!(c.get("g", set(&[0, 1])), 7);
        assert_eq!(c.population(), 7);

        let t = obs(&["u1", "u2"], &[(&[0], 1), (&[1], 1), (&[0, 1], 1)]).unwrap();
        let c = exact_counts_from_union_observations(&t).unwrap();
        assert_eq!(c.get("g", set(&[0, 1])), 1);
        assert_eq!(c.population(), 1);
    }

    #[test]
    fn incomplete_and_non_monotone_tables_rejected() {
        let err = obs(&["u1", "u2"], &[(&[0], 2), (&[1], 2)]).unwrap_err();
        assert!(err.to_string().contains("incomplete observation table"));
        assert!(err.to_string().contains("{u1,u2}"));

        let err = obs(&["u1", "u2"], &[(&[0], 4), (&[1], 2), (&[0, 1], 3)]).unwrap_err();
        assert!(matches!(err, PersonhoodError::NonMonotone { .. }));
        assert!(err.to_string().contains("non-monotone"));
    }

    #[test]
    fn unrealisable_table_reports_subset() {
        // U({1})=U({2})=U({3})=1 and U of every pair = 2 but U(S)=2:
        // pairwise unions say the three followers are distinct, the total says otherwise
        let rows: Vec<(&[usize], u64)> = vec![
            (&[0], 1),
            (&[1], 1),
            (&[2], 1),
            (&[0, 1], 2),
            (&[0, 2], 2),
            (&[1, 2], 2),
            (&[0, 1, 2], 2),
        ];
        let t = obs(&["a", "b", "c"], &rows).unwrap();
        let err = exact_counts_from_union_observations(&t).unwrap_err();
        assert!(matches!(err, PersonhoodError::Inconsistent { .. }), "{err}");
    }

    #[test]
    fn personhood_examples() {
        // p1:{i}, p2:{i,j}, p3:{j}
        let mut c = ExactSetCounts::new(["i", "j"]).unwrap();
        c.add("g", set(&[0]), 1).unwrap();
        c.add("g", set(&[0, 1]), 1).unwrap();
        c.add("g", set(&[1]), 1).unwrap();
        let t = personhoods(&c);
        assert_eq!(t.group("g").unwrap().mass, vec![1.5, 1.5]);
        assert_eq!(t.totals().iter().sum::<f64>(), 3.0);

        let mut c = ExactSetCounts::new(["a", "b", "c"]).unwrap();
        c.add("g", set(&[0]), 4).unwrap();
        c.add("g", set(&[2]), 9).unwrap();
        assert_eq!(personhoods(&c).group("g").unwrap().mass, vec![4.0, 0.0, 9.0]);

        let mut c = ExactSetCounts::new(["a", "b", "c", "d", "e"]).unwrap();
        c.add("g", AccessSet::full(5), 1).unwrap();
        assert_eq!(personhoods(&c).group("g").unwrap().mass, vec![0.2; 5]);
    }

    #[test]
    fn one_person_on_two_units_is_half_each() {
        let mut c = ExactSetCounts::new(["a", "b"]).unwrap();
        c.add("g", set(&[0, 1]), 1).unwrap();
        let d = personhoods(&c).distribution("g").unwrap();
        assert_eq!(d.mass(), &[0.5, 0.5]);
        assert_eq!(d.total(), 1.0);
    }
}
