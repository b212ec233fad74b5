//! Seeded synthetic populations.
//!
//! Each person draws a follow count `k` from their group's distribution and
//! then `k` distinct units by sequential weighted draws without replacement,
//! renormalizing after every pick. Unit weights are `pref_i^β` (zero
//! preferences stay zero).
//!
//! Randomness is ChaCha8 (`rand_chacha`), seeded with the config seed and
//! switched to stream `n` for the `n`-th person overall (groups in config
//! order). A person's draws therefore do not depend on anyone else's, and a
//! given (config, seed) always produces the same log.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::MAX_UNITS;
use crate::personhood::Membership;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("generator config has no units")]
    NoUnits,
    #[error("generator config has more than {MAX_UNITS} units")]
    TooManyUnits,
    #[error("duplicate unit {0:?}")]
    DuplicateUnit(String),
    #[error("duplicate group {0:?}")]
    DuplicateGroup(String),
    #[error("group {group:?}: expected {expected} preference weights, got {got}")]
    PreferenceLength { group: String, expected: usize, got: usize },
    #[error("group {0:?}: preference weights must be finite, nonnegative and not all zero")]
    BadPreferences(String),
    #[error(
        "group {0:?}: follow-count probabilities must be finite, nonnegative, not all zero, and cover at most m counts"
    )]
    BadFollowCounts(String),
    #[error("group {group:?}: follow count {k} exceeds the {available} units with positive weight")]
    FollowCountTooLarge { group: String, k: usize, available: usize },
    #[error("group {0:?}: selectivity must be finite and nonnegative")]
    BadSelectivity(String),
    #[error("invalid generator config: {0}")]
    Parse(String),
}

fn default_selectivity() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupProfile {
    pub id: String,
    pub size: u64,
    /// Relative preference per unit; normalized internally.
    pub preferences: Vec<f64>,
    /// `follow_counts[k-1]` is the relative probability of following `k` units.
    pub follow_counts: Vec<f64>,
    /// Sharpening exponent β applied to the preferences.
    #[serde(default = "default_selectivity")]
    pub selectivity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub units: Vec<String>,
    pub groups: Vec<GroupProfile>,
}

impl GeneratorConfig {
    pub fn from_json(text: &str) -> Result<Self, SynthError> {
        serde_json::from_str(text).map_err(|e| SynthError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let m = self.units.len();
        if m == 0 {
            return Err(SynthError::NoUnits);
        }
        if m > MAX_UNITS {
            return Err(SynthError::TooManyUnits);
        }
        let mut units = HashSet::new();
        for u in &self.units {
            if !units.insert(u) {
                return Err(SynthError::DuplicateUnit(u.clone()));
            }
        }
        let mut groups = HashSet::new();
        for g in &self.groups {
            if !groups.insert(&g.id) {
                return Err(SynthError::DuplicateGroup(g.id.clone()));
            }
            if g.preferences.len() != m {
                return Err(SynthError::PreferenceLength {
                    group: g.id.clone(),
                    expected: m,
                    got: g.preferences.len(),
                });
            }
            if !valid_weights(&g.preferences) {
                return Err(SynthError::BadPreferences(g.id.clone()));
            }
            if g.follow_counts.len() > m || !valid_weights(&g.follow_counts) {
                return Err(SynthError::BadFollowCounts(g.id.clone()));
            }
            if !g.selectivity.is_finite() || g.selectivity < 0.0 {
                return Err(SynthError::BadSelectivity(g.id.clone()));
            }
            let available = g.preferences.iter().filter(|&&p| p > 0.0).count();
            let k_max = g.follow_counts.iter().rposition(|&p| p > 0.0).map_or(0, |i| i + 1);
            if k_max > available {
                return Err(SynthError::FollowCountTooLarge {
                    group: g.id.clone(),
                    k: k_max,
                    available,
                });
            }
        }
        Ok(())
    }
}

fn valid_weights(w: &[f64]) -> bool {
    w.iter().all(|x| x.is_finite() && *x >= 0.0) && w.iter().any(|&x| x > 0.0)
}

/// `pref^β`, keeping zero preferences at zero even when β = 0.
fn sharpened(preferences: &[f64], beta: f64) -> Vec<f64> {
    preferences
        .iter()
        .map(|&p| if p > 0.0 { p.powf(beta) } else { 0.0 })
        .collect()
}

/// Index drawn with probability proportional to `weights`.
fn weighted_index<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.gen::<f64>() * total;
    let mut cumulative = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        cumulative += w;
        if w > 0.0 && target < cumulative {
            return i;
        }
    }
    // rounding pushed the target past the last bucket
    weights.iter().rposition(|&w| w > 0.0).expect("some positive weight")
}

/// Generates the membership log for a config. Each person's units are
/// listed in unit order.
pub fn generate(config: &GeneratorConfig) -> Result<Vec<Membership>, SynthError> {
    config.validate()?;
    let mut log = Vec::new();
    let mut person = 0u64;
    for group in &config.groups {
        let weights = sharpened(&group.preferences, group.selectivity);
        for i in 0..group.size {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(person);
            person += 1;

            let k = weighted_index(&mut rng, &group.follow_counts) + 1;
            let mut remaining = weights.clone();
            let mut picked = Vec::with_capacity(k);
            for _ in 0..k {
                let unit = weighted_index(&mut rng, &remaining);
                remaining[unit] = 0.0;
                picked.push(unit);
            }
            picked.sort_unstable();
            let person_id = format!("{}-{i}", group.id);
            for unit in picked {
                log.push(Membership::new(
                    person_id.clone(),
                    group.id.clone(),
                    config.units[unit].clone(),
                ));
            }
        }
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{evenness, Variant};
    use crate::personhood::{exact_counts_from_memberships, personhoods};

    fn units() -> Vec<String> {
        ["VC", "C", "M", "L", "VL"].iter().map(|s| s.to_string()).collect()
    }

    fn single(preferences: Vec<f64>, follow_counts: Vec<f64>, size: u64, seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            seed,
            units: units(),
            groups: vec![GroupProfile {
                id: "g".into(),
                size,
                preferences,
                follow_counts,
                selectivity: 1.0,
            }],
        }
    }

    fn classical_evenness(log: &[Membership]) -> f64 {
        let table = personhoods(&exact_counts_from_memberships(log, &units()).unwrap());
        evenness(&table.distribution("g").unwrap(), Variant::Classical).unwrap()
    }

    #[test]
    fn uniform_single_follow_is_nearly_even() {
        let log = generate(&single(vec![1.0; 5], vec![1.0], 1000, 2)).unwrap();
        assert_eq!(log.len(), 1000);
        let people: HashSet<&str> = log.iter().map(|m| m.person_id.as_str()).collect();
        assert_eq!(people.len(), 1000);
        let e = classical_evenness(&log);
        assert!((e - 1.0).abs() < 0.05, "{e}");
    }

    #[test]
    fn point_mass_preference() {
        let log = generate(&single(vec![1.0, 0.0, 0.0, 0.0, 0.0], vec![1.0], 50, 3)).unwrap();
        assert!(log.iter().all(|m| m.unit_id == "VC"));
        assert_eq!(classical_evenness(&log), 0.2);
    }

    #[test]
    fn same_seed_same_log() {
        let config = single(vec![0.1, 0.2, 0.4, 0.2, 0.1], vec![0.5, 0.3, 0.2], 200, 11);
        assert_eq!(generate(&config).unwrap(), generate(&config).unwrap());
        let other = generate(&config.clone().with_seed(12)).unwrap();
        assert_ne!(generate(&config).unwrap(), other);
    }

    #[test]
    fn multi_follow_draws_distinct_units() {
        let log = generate(&single(vec![1.0, 1.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0], 30, 5)).unwrap();
        assert_eq!(log.len(), 90);
        assert!(log.iter().all(|m| ["VC", "C", "M"].contains(&m.unit_id.as_str())));
    }

    #[test]
    fn follow_count_beyond_support_rejected() {
        let err = generate(&single(vec![1.0, 1.0, 0.0, 0.0, 0.0], vec![0.0, 0.0, 1.0], 1, 0)).unwrap_err();
        assert_eq!(
            err,
            SynthError::FollowCountTooLarge {
                group: "g".into(),
                k: 3,
                available: 2
            }
        );
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            generate(&single(vec![1.0; 4], vec![1.0], 1, 0)),
            Err(SynthError::PreferenceLength { .. })
        ));
        assert!(matches!(
            generate(&single(vec![0.0; 5], vec![1.0], 1, 0)),
            Err(SynthError::BadPreferences(_))
        ));
        assert!(matches!(
            generate(&single(vec![1.0; 5], vec![1.0; 6], 1, 0)),
            Err(SynthError::BadFollowCounts(_))
        ));
        let mut c = single(vec![1.0; 5], vec![1.0], 1, 0);
        c.groups[0].selectivity = -1.0;
        assert!(matches!(generate(&c), Err(SynthError::BadSelectivity(_))));
    }

    #[test]
    fn zero_selectivity_flattens_positive_preferences() {
        assert_eq!(sharpened(&[0.5, 0.0, 2.0], 0.0), vec![1.0, 0.0, 1.0]);
        assert_eq!(sharpened(&[0.5, 0.0, 2.0], 2.0), vec![0.25, 0.0, 4.0]);
    }

    #[test]
    fn config_json_round_trip() {
        let config = single(vec![1.0; 5], vec![0.7, 0.3], 10, 99);
        assert_eq!(GeneratorConfig::from_json(&config.to_json()).unwrap(), config);
        let text = r#"{"seed":1,"units":["a"],"groups":[{"id":"g","size":2,"preferences":[1],"follow_counts":[1]}]}"#;
        assert_eq!(GeneratorConfig::from_json(text).unwrap().groups[0].selectivity, 1.0);
    }
}
