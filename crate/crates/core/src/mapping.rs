//! Assigning information sources to the five political units by the
//! leaning of their audience.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Allowed deviation of a composition's sum from 1 before it is rejected.
pub const COMPOSITION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MappingError {
    #[error("audience fractions must be finite and within [0, 1]")]
    FractionOutOfRange,
    #[error("audience fractions sum to {0}, not 1")]
    BadSum(f64),
    #[error("leaning score {score} outside [{lo}, {hi}]")]
    ScoreOutOfRange { score: f64, lo: f64, hi: f64 },
    #[error("thresholds must be finite and strictly increasing")]
    BadThresholds,
    #[error("duplicate source id {0:?}")]
    DuplicateSource(String),
}

/// The five political information units, left (conservative) to right (liberal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Leaning {
    VC,
    C,
    M,
    L,
    VL,
}

impl Leaning {
    pub const ALL: [Leaning; 5] = [Leaning::VC, Leaning::C, Leaning::M, Leaning::L, Leaning::VL];

    pub fn as_str(self) -> &'static str {
        match self {
            Leaning::VC => "VC",
            Leaning::C => "C",
            Leaning::M => "M",
            Leaning::L => "L",
            Leaning::VL => "VL",
        }
    }

    pub fn mirror(self) -> Leaning {
        match self {
            Leaning::VC => Leaning::VL,
            Leaning::C => Leaning::L,
            Leaning::M => Leaning::M,
            Leaning::L => Leaning::C,
            Leaning::VL => Leaning::VC,
        }
    }
}

impl fmt::Display for Leaning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Leaning {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Leaning::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown leaning {s:?}"))
    }
}

/// Fractions of a source's audience per leaning, in `Leaning::ALL` order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AudienceComposition([f64; 5]);

impl AudienceComposition {
    /// Accepts fractions in `[0, 1]` summing to 1 within [`COMPOSITION_TOL`],
    /// renormalizing them to sum to 1.
    pub fn new(fractions: [f64; 5]) -> Result<Self, MappingError> {
        if fractions.iter().any(|f| !f.is_finite() || *f < 0.0 || *f > 1.0) {
            return Err(MappingError::FractionOutOfRange);
        }
        // mirror-symmetric summation order keeps mirrored inputs exactly mirrored
        let [vc, c, m, l, vl] = fractions;
        let sum = ((vc + vl) + (c + l)) + m;
        if (sum - 1.0).abs() > COMPOSITION_TOL {
            return Err(MappingError::BadSum(sum));
        }
        // already unit-sum up to rounding; rescaling would only shift ulps
        if (sum - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(AudienceComposition(fractions));
        }
        Ok(AudienceComposition(fractions.map(|f| f / sum)))
    }

    pub fn fractions(&self) -> [f64; 5] {
        self.0
    }

    pub fn get(&self, leaning: Leaning) -> f64 {
        self.0[leaning as usize]
    }

    /// Swaps the conservative and liberal sides.
    pub fn mirrored(&self) -> Self {
        let [vc, c, m, l, vl] = self.0;
        AudienceComposition([vl, l, m, c, vc])
    }
}

/// Cut points `[t1, t2, t3, t4]` between the five units:
/// VC `< t1 ≤` C `< t2 ≤` M `≤ t3 <` L `≤ t4 <` VL.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds(pub [f64; 4]);

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds([-0.5, -0.1, 0.1, 0.5])
    }
}

impl Thresholds {
    pub fn new(cuts: [f64; 4]) -> Result<Self, MappingError> {
        if cuts.iter().any(|c| !c.is_finite()) || cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MappingError::BadThresholds);
        }
        Ok(Thresholds(cuts))
    }

    pub fn is_symmetric(&self) -> bool {
        let [a, b, c, d] = self.0;
        a == -d && b == -c
    }
}

impl FromStr for Thresholds {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cuts: Vec<f64> = s
            .split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad threshold {x:?}: {e}")))
            .collect::<Result<_, _>>()?;
        let cuts: [f64; 4] = cuts
            .try_into()
            .map_err(|_| "expected four comma-separated thresholds".to_string())?;
        Thresholds::new(cuts).map_err(|e| e.to_string())
    }
}

/// Weights of each audience leaning plus the classification cut points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeaningScale {
    pub weights: [f64; 5],
    pub thresholds: Thresholds,
}

impl Default for LeaningScale {
    fn default() -> Self {
        LeaningScale {
            weights: [-1.0, -0.5, 0.0, 0.5, 1.0],
            thresholds: Thresholds::default(),
        }
    }
}

impl LeaningScale {
    pub fn with_thresholds(thresholds: Thresholds) -> Self {
        LeaningScale {
            thresholds,
            ..Default::default()
        }
    }

    /// Range of attainable scores.
    pub fn bounds(&self) -> (f64, f64) {
        let lo = self.weights.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Audience-weighted leaning `Σ w_k f_k`.
    ///
    /// Terms are paired outside-in so that with antisymmetric weights a
    /// mirrored composition gives exactly the negated score.
    pub fn score(&self, c: &AudienceComposition) -> f64 {
        let [f0, f1, f2, f3, f4] = c.fractions();
        let [w0, w1, w2, w3, w4] = self.weights;
        let (lo, hi) = self.bounds();
        let s = ((w0 * f0 + w4 * f4) + (w1 * f1 + w3 * f3)) + w2 * f2;
        // renormalized fractions can overshoot the extremes by an ulp
        s.clamp(lo, hi) + 0.0
    }

    pub fn classify(&self, score: f64) -> Result<Leaning, MappingError> {
        let (lo, hi) = self.bounds();
        if !score.is_finite() || score < lo || score > hi {
            return Err(MappingError::ScoreOutOfRange { score, lo, hi });
        }
        let [t1, t2, t3, t4] = self.thresholds.0;
        Ok(if score < t1 {
            Leaning::VC
        } else if score < t2 {
            Leaning::C
        } else if score <= t3 {
            Leaning::M
        } else if score <= t4 {
            Leaning::L
        } else {
            Leaning::VL
        })
    }
}

/// Leaning score under the default weights `(-1, -0.5, 0, 0.5, 1)`.
pub fn leaning_score(c: &AudienceComposition) -> f64 {
    LeaningScale::default().score(c)
}

/// Unit for a score under the given cut points.
pub fn classify_leaning(score: f64, thresholds: &Thresholds) -> Result<Leaning, MappingError> {
    LeaningScale::with_thresholds(*thresholds).classify(score)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classified {
    pub score: f64,
    pub unit: Leaning,
}

/// Scores and classifies every source. Source ids must be unique.
pub fn map_sources<'a, I>(sources: I, scale: &LeaningScale) -> Result<BTreeMap<String, Classified>, MappingError>
where
    I: IntoIterator<Item = (&'a str, &'a AudienceComposition)>,
{
    let mut out = BTreeMap::new();
    for (id, composition) in sources {
        let score = scale.score(composition);
        let unit = scale.classify(score)?;
        if out.insert(id.to_string(), Classified { score, unit }).is_some() {
            return Err(MappingError::DuplicateSource(id.to_string()));
        }
    }
    Ok(out)
}

/// Number of classified sources per unit, in unit order; units with none are kept.
pub fn sources_per_unit(mapping: &BTreeMap<String, Classified>) -> BTreeMap<Leaning, u64> {
    let mut counts: BTreeMap<Leaning, u64> = Leaning::ALL.iter().map(|&l| (l, 0)).collect();
    for c in mapping.values() {
        *counts.entry(c.unit).or_default() += 1;
    }
    counts
}

/// Ids of sources per unit.
pub fn members_per_unit(mapping: &BTreeMap<String, Classified>) -> BTreeMap<Leaning, BTreeSet<String>> {
    let mut out: BTreeMap<Leaning, BTreeSet<String>> = BTreeMap::new();
    for (id, c) in mapping {
        out.entry(c.unit).or_default().insert(id.clone());
    }
    out
}
