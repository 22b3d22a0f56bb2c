use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ccr_core::model::AgentId;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{DatasetError, DemographicCell};
use crate::SentimentCategory;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentProfile {
    pub agent_id: AgentId,
    pub sex: String,
    pub age_group: String,
    pub education: String,
    /// Two-decimal score in `[0, 1]`.
    pub sentiment_score: f64,
    pub sentiment_category: SentimentCategory,
    pub profile_text: String,
}

impl AgentProfile {
    pub fn new(agent_id: AgentId, cell: &DemographicCell, sentiment_score: f64) -> Result<Self, DatasetError> {
        let sentiment_category = SentimentCategory::of(sentiment_score)
            .ok_or_else(|| DatasetError::Config(format!("sentiment score {sentiment_score} outside [0, 1]")))?;
        Ok(AgentProfile {
            agent_id,
            sex: cell.sex.clone(),
            age_group: cell.age_group.clone(),
            education: cell.education.clone(),
            sentiment_score,
            sentiment_category,
            profile_text: format!(
                "You are a {} years old {} with {}",
                cell.age_group,
                cell.sex.to_lowercase(),
                cell.education
            ),
        })
    }
}

/// How profile sentiment scores are drawn.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum SentimentDistribution {
    /// Uniform over the hundredths `0.00..=1.00`.
    #[default]
    Uniform,
    /// Exactly this many agents per category, shuffled, each uniform
    /// within its bucket.
    Counts(BTreeMap<SentimentCategory, usize>),
}

impl SentimentDistribution {
    /// 6 proactive, 5 supportive, 4 minimal, 4 resistant, 1 balanced.
    pub fn twenty_mixed() -> Self {
        use SentimentCategory::*;
        SentimentDistribution::Counts(BTreeMap::from([
            (ProactiveAction, 6),
            (SupportiveMeasures, 5),
            (MinimalAcknowledgment, 4),
            (ActiveResistance, 4),
            (BalancedApproach, 1),
        ]))
    }
}

impl fmt::Display for SentimentDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SentimentDistribution::Uniform => f.write_str("uniform"),
            SentimentDistribution::Counts(m) => {
                let parts: Vec<String> = SentimentCategory::ALL
                    .iter()
                    .map(|c| m.get(c).copied().unwrap_or(0).to_string())
                    .collect();
                write!(f, "counts:{}", parts.join("/"))
            }
        }
    }
}

impl FromStr for SentimentDistribution {
    type Err = String;

    /// `uniform`, or `counts:r/m/b/s/p` listing agents per category from
    /// Active Resistance up to Proactive Action.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("uniform") {
            return Ok(SentimentDistribution::Uniform);
        }
        let body = s
            .strip_prefix("counts:")
            .ok_or_else(|| format!("expected `uniform` or `counts:r/m/b/s/p`, got {s:?}"))?;
        let counts: Vec<usize> = body
            .split('/')
            .map(|t| t.trim().parse().map_err(|_| format!("bad count {t:?}")))
            .collect::<Result<_, _>>()?;
        if counts.len() != 5 {
            return Err(format!("expected 5 counts, got {}", counts.len()));
        }
        Ok(SentimentDistribution::Counts(
            SentimentCategory::ALL.into_iter().zip(counts).collect(),
        ))
    }
}

/// Integer hundredths inside a category's bucket.
fn score_in<R: Rng + ?Sized>(category: SentimentCategory, rng: &mut R) -> f64 {
    let lo = category as u32 * 20;
    let hi = if category == SentimentCategory::ProactiveAction { 100 } else { lo + 19 };
    rng.random_range(lo..=hi) as f64 / 100.0
}

/// Draws `n` profiles with ids `a1..an`: demographics by cell weight,
/// sentiment from `distribution`.
pub fn sample_profiles<R: Rng + ?Sized>(
    cells: &[DemographicCell],
    n: usize,
    distribution: &SentimentDistribution,
    rng: &mut R,
) -> Result<Vec<AgentProfile>, DatasetError> {
    if cells.is_empty() {
        return Err(DatasetError::Config("no demographic cells".into()));
    }
    let pick = WeightedIndex::new(cells.iter().map(|c| c.weight)).map_err(|e| DatasetError::Config(e.to_string()))?;
    let categories: Option<Vec<SentimentCategory>> = match distribution {
        SentimentDistribution::Uniform => None,
        SentimentDistribution::Counts(m) => {
            let total: usize = m.values().sum();
            if total != n {
                return Err(DatasetError::Config(format!(
                    "category counts sum to {total} but {n} agents were requested"
                )));
            }
            let mut cats: Vec<SentimentCategory> =
                m.iter().flat_map(|(&c, &k)| std::iter::repeat_n(c, k)).collect();
            cats.shuffle(rng);
            Some(cats)
        }
    };
    (0..n)
        .map(|k| {
            let cell = &cells[pick.sample(rng)];
            let score = match &categories {
                None => rng.random_range(0..=100u32) as f64 / 100.0,
                Some(cats) => score_in(cats[k], rng),
            };
            AgentProfile::new(AgentId(k as u32 + 1), cell, score)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::bundled_demographics;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn category_counts_are_exact_and_seeded() {
        let cells = bundled_demographics();
        let dist = SentimentDistribution::twenty_mixed();
        let a = sample_profiles(&cells, 20, &dist, &mut ChaCha8Rng::seed_from_u64(38)).unwrap();
        let b = sample_profiles(&cells, 20, &dist, &mut ChaCha8Rng::seed_from_u64(38)).unwrap();
        assert_eq!(a, b);
        let mut counts: BTreeMap<SentimentCategory, usize> = BTreeMap::new();
        for p in &a {
            assert!(p.sentiment_category.contains(p.sentiment_score));
            *counts.entry(p.sentiment_category).or_default() += 1;
        }
        assert_eq!(SentimentDistribution::Counts(counts), dist);
    }

    #[test]
    fn single_cell_population() {
        let cell = DemographicCell {
            sex: "Female".into(),
            age_group: "30–34".into(),
            education: "ISCED 2011, level 3 – upper secondary education".into(),
            weight: 1.0,
        };
        let ps = sample_profiles(
            std::slice::from_ref(&cell),
            7,
            &SentimentDistribution::Uniform,
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        assert!(ps.iter().all(|p| p.age_group == "30–34" && p.sex == "Female"));
        assert_eq!(
            ps[0].profile_text,
            "You are a 30–34 years old female with ISCED 2011, level 3 – upper secondary education"
        );
    }

    #[test]
    fn cell_frequencies_follow_weights() {
        let cells = bundled_demographics();
        let n = 100_000;
        let ps = sample_profiles(&cells, n, &SentimentDistribution::Uniform, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let mut seen: BTreeMap<(&str, &str, &str), usize> = BTreeMap::new();
        for p in &ps {
            *seen.entry((&p.sex, &p.age_group, &p.education)).or_default() += 1;
        }
        for c in &cells {
            let f = seen.get(&(&*c.sex, &*c.age_group, &*c.education)).copied().unwrap_or(0) as f64 / n as f64;
            assert!((f - c.weight).abs() < 0.01, "{c:?}: {f}");
        }
    }

    #[test]
    fn counts_must_match_n() {
        let err = sample_profiles(
            &bundled_demographics(),
            19,
            &SentimentDistribution::twenty_mixed(),
            &mut ChaCha8Rng::seed_from_u64(0),
        );
        assert!(matches!(err, Err(DatasetError::Config(_))));
        assert!(matches!(
            sample_profiles(&[], 1, &SentimentDistribution::Uniform, &mut ChaCha8Rng::seed_from_u64(0)),
            Err(DatasetError::Config(_))
        ));
    }

    #[test]
    fn distribution_text_form() {
        let d: SentimentDistribution = "counts:4/4/1/5/6".parse().unwrap();
        assert_eq!(d, SentimentDistribution::twenty_mixed());
        assert_eq!(d.to_string(), "counts:4/4/1/5/6");
        assert_eq!("uniform".parse::<SentimentDistribution>().unwrap(), SentimentDistribution::Uniform);
        assert!("counts:1/2".parse::<SentimentDistribution>().is_err());
    }
}
