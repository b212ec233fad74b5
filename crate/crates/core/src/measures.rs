//! The five segregation measures over personhood distributions.
//!
//! Evenness and concentration come in two variants. [`Variant::Paper`]
//! evaluates the formula exactly as originally printed, which can leave the
//! advertised range (evenness of `[2,0,0,0]` against a complement of 2 is
//! `-0.5`). [`Variant::Classical`] is the textbook index (Gini complement,
//! Hoover/Duncan Delta) and is the default. Both are reported with their
//! label; neither silently replaces the other.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{GroupDistribution, UnitSpace};

pub mod report;

pub use report::{
    measure_all, Measure, MeasureReport, MeasureRequest, Outcome, PairSelection, ReportRow, VariantSelection,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("group {0:?} has zero size")]
    EmptyGroup(String),
    #[error("group {0:?} has an empty complement (a'_total = 0)")]
    NoComplement(String),
    #[error("unit space has no topics (n_total = 0)")]
    NoTopics,
    #[error("missing center_order")]
    MissingCenterOrder,
    #[error("unit space has no positions or distances")]
    MissingDistances,
    #[error("group {group:?} has mass on unit {unit} whose total is zero")]
    InconsistentTotals { group: String, unit: usize },
    #[error("expected {expected} units, got {got}")]
    UnitCountMismatch { expected: usize, got: usize },
    #[error("undefined: clustering denominator vanishes for group {0:?}")]
    Undefined(String),
    #[error("unknown group {0:?}")]
    UnknownGroup(String),
}

impl MeasureError {
    /// Degenerate-but-valid inputs, as opposed to inconsistent ones.
    pub fn is_undefined(&self) -> bool {
        matches!(self, MeasureError::Undefined(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Formula as printed.
    Paper,
    /// Textbook index with its usual range.
    Classical,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Paper => "paper",
            Variant::Classical => "classical",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Variant::Paper),
            "classical" => Ok(Variant::Classical),
            other => Err(format!("unknown variant {other:?}")),
        }
    }
}

fn require_mass(a: &GroupDistribution) -> Result<(), MeasureError> {
    if a.total() > 0.0 {
        Ok(())
    } else {
        Err(MeasureError::EmptyGroup(a.group_id().to_string()))
    }
}

fn require_units(expected: usize, got: usize) -> Result<(), MeasureError> {
    if expected == got {
        Ok(())
    } else {
        Err(MeasureError::UnitCountMismatch { expected, got })
    }
}

/// Information evenness, the complement of a Gini coefficient over the
/// group's per-unit personhood.
///
/// Classical: `1 - ΣΣ|a_i - a_j| / (2 m Σa_i)`, always in `[1/m, 1]`.
/// Paper: `1 - Σ_{i≠j}|a_i - a_j| / (2 a_total a'_total)`, reported raw.
pub fn evenness(a: &GroupDistribution, variant: Variant) -> Result<f64, MeasureError> {
    require_mass(a)?;
    let mass = a.mass();
    let mut abs_diff = 0.0;
    for &x in mass {
        for &y in mass {
            abs_diff += (x - y).abs();
        }
    }
    match variant {
        Variant::Classical => {
            let m = mass.len() as f64;
            let sum: f64 = mass.iter().sum();
            let scale = 2.0 * m * sum;
            Ok((scale - abs_diff) / scale)
        }
        Variant::Paper => {
            if a.complement() <= 0.0 {
                return Err(MeasureError::NoComplement(a.group_id().to_string()));
            }
            let scale = 2.0 * a.total() * a.complement();
            Ok((scale - abs_diff) / scale)
        }
    }
}

/// Joint information exposure `Σ_i (a_i / a_total) (b_i / total_i)`.
///
/// Units where `A` has no mass contribute nothing, whatever their total.
pub fn joint_exposure(a: &GroupDistribution, b: &GroupDistribution, totals: &[f64]) -> Result<f64, MeasureError> {
    require_mass(a)?;
    require_units(a.unit_count(), b.unit_count())?;
    require_units(a.unit_count(), totals.len())?;
    let mut score = 0.0;
    for (i, ((&ai, &bi), &ti)) in a.mass().iter().zip(b.mass()).zip(totals).enumerate() {
        if ai == 0.0 {
            continue;
        }
        if ti <= 0.0 {
            return Err(MeasureError::InconsistentTotals {
                group: a.group_id().to_string(),
                unit: i,
            });
        }
        score += (ai / a.total()) * (bi / ti);
    }
    // b_i <= total_i bounds the exact value by 1; only rounding can exceed it
    Ok(score.min(1.0))
}

/// Concentration (Delta) of a group relative to the units' topic counts.
///
/// Classical: `½ Σ |a_i/a_total - n_i/n_total|`.
/// Paper: `½ Σ (a_i/a_total)(n_i/n_total)`.
pub fn concentration(a: &GroupDistribution, space: &UnitSpace, variant: Variant) -> Result<f64, MeasureError> {
    require_units(space.len(), a.unit_count())?;
    let n_total = space.topic_total();
    if n_total == 0 {
        return Err(MeasureError::NoTopics);
    }
    require_mass(a)?;
    let n_total = n_total as f64;
    let terms = a.mass().iter().zip(space.topic_counts()).map(|(&ai, &ni)| {
        let group_share = ai / a.total();
        let topic_share = ni as f64 / n_total;
        match variant {
            Variant::Classical => (group_share - topic_share).abs(),
            Variant::Paper => group_share * topic_share,
        }
    });
    Ok(0.5 * terms.sum::<f64>())
}

/// Cumulative shares over the center ordering; the last entry is exactly 1.
fn cumulative_shares(mass: &[f64], order: &[usize]) -> Vec<f64> {
    let mut running = 0.0;
    let cumulative: Vec<f64> = order
        .iter()
        .map(|&i| {
            running += mass[i];
            running
        })
        .collect();
    let last = running;
    cumulative.into_iter().map(|c| c / last).collect()
}

/// Centralization index of `A` relative to `B`.
///
/// Units are taken in center order; with `X_i`, `Y_i` the cumulative shares
/// of the two groups over the first `i` units,
/// `CI = Σ (X_{i-1} Y_i - X_i Y_{i-1})`. Positive means `A` sits closer to the
/// center. Antisymmetric, in `[-1, 1]`.
pub fn centralization_index(
    a: &GroupDistribution,
    b: &GroupDistribution,
    space: &UnitSpace,
) -> Result<f64, MeasureError> {
    require_units(space.len(), a.unit_count())?;
    require_units(space.len(), b.unit_count())?;
    let order = space.center_order().ok_or(MeasureError::MissingCenterOrder)?;
    require_mass(a)?;
    require_mass(b)?;
    if a.mass().iter().sum::<f64>() <= 0.0 {
        return Err(MeasureError::EmptyGroup(a.group_id().to_string()));
    }
    if b.mass().iter().sum::<f64>() <= 0.0 {
        return Err(MeasureError::EmptyGroup(b.group_id().to_string()));
    }
    let x = cumulative_shares(a.mass(), order);
    let y = cumulative_shares(b.mass(), order);
    let mut ci = 0.0;
    let (mut x_prev, mut y_prev) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(&y) {
        ci += x_prev * yi - xi * y_prev;
        x_prev = xi;
        y_prev = yi;
    }
    Ok(ci)
}

/// Information clustering with the `e^{-d}` proximity kernel (self-pairs included):
///
/// ```text
///        Σ_i (a_i/a_total) Σ_j K_ij a_j     - (a_total/m²) Σ_i Σ_j K_ij
/// IC = ---------------------------------------------------------------
///        Σ_i (a_i/a_total) Σ_j K_ij total_j - (a_total/m²) Σ_i Σ_j K_ij
/// ```
///
/// Uniform groups score 0 and the whole population scores 1. A vanishing
/// denominator yields [`MeasureError::Undefined`].
pub fn clustering_index(a: &GroupDistribution, totals: &[f64], space: &UnitSpace) -> Result<f64, MeasureError> {
    let m = space.len();
    require_units(m, a.unit_count())?;
    require_units(m, totals.len())?;
    let distances = space.distances().ok_or(MeasureError::MissingDistances)?;
    require_mass(a)?;

    let kernel: Vec<Vec<f64>> = distances
        .iter()
        .map(|row| row.iter().map(|d| (-d).exp()).collect())
        .collect();
    let kernel_sum: f64 = kernel.iter().flatten().sum();
    let baseline = a.total() / (m * m) as f64 * kernel_sum;

    let mut own = 0.0;
    let mut everyone = 0.0;
    for (i, &ai) in a.mass().iter().enumerate() {
        let share = ai / a.total();
        let near_own: f64 = kernel[i].iter().zip(a.mass()).map(|(k, aj)| k * aj).sum();
        let near_all: f64 = kernel[i].iter().zip(totals).map(|(k, tj)| k * tj).sum();
        own += share * near_own;
        everyone += share * near_all;
    }
    let numerator = own - baseline;
    let denominator = everyone - baseline;
    let scale = everyone.abs().max(baseline.abs());
    if denominator.abs() <= 1e-12 * scale || denominator == 0.0 {
        return Err(MeasureError::Undefined(a.group_id().to_string()));
    }
    Ok(numerator / denominator)
}
