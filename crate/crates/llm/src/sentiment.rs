use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Five activism buckets over `[0, 1]`; the last one is closed at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SentimentCategory {
    ActiveResistance,
    MinimalAcknowledgment,
    BalancedApproach,
    SupportiveMeasures,
    ProactiveAction,
}

impl SentimentCategory {
    pub const ALL: [SentimentCategory; 5] = [
        SentimentCategory::ActiveResistance,
        SentimentCategory::MinimalAcknowledgment,
        SentimentCategory::BalancedApproach,
        SentimentCategory::SupportiveMeasures,
        SentimentCategory::ProactiveAction,
    ];

    /// Bucket of a score; `None` outside `[0, 1]`.
    pub fn of(score: f64) -> Option<SentimentCategory> {
        if !(0.0..=1.0).contains(&score) {
            return None;
        }
        let k = [0.2, 0.4, 0.6, 0.8].iter().filter(|&&edge| score >= edge).count();
        Some(Self::ALL[k])
    }

    /// `[lo, hi)`, except the last bucket which includes 1.
    pub fn range(self) -> (f64, f64) {
        let k = self as usize as f64;
        (k / 5.0, (k + 1.0) / 5.0)
    }

    pub fn contains(self, score: f64) -> bool {
        Self::of(score) == Some(self)
    }

    pub fn name(self) -> &'static str {
        match self {
            SentimentCategory::ActiveResistance => "Active Resistance",
            SentimentCategory::MinimalAcknowledgment => "Minimal Acknowledgment",
            SentimentCategory::BalancedApproach => "Balanced Approach",
            SentimentCategory::SupportiveMeasures => "Supportive Measures",
            SentimentCategory::ProactiveAction => "Proactive Action",
        }
    }

    /// One-line orientation used in the system prompt.
    pub fn orientation(self) -> &'static str {
        match self {
            SentimentCategory::ActiveResistance => "you reject climate measures and favour rolling existing ones back",
            SentimentCategory::MinimalAcknowledgment => {
                "you accept that the climate is a concern but want no binding change"
            }
            SentimentCategory::BalancedApproach => {
                "you weigh climate goals evenly against cost and practicality"
            }
            SentimentCategory::SupportiveMeasures => "you back practical, achievable climate policies",
            SentimentCategory::ProactiveAction => "you push for ambitious, climate-first transformation",
        }
    }
}

impl fmt::Display for SentimentCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SentimentCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphabetic()).collect::<String>().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|c| c.name().replace(' ', "").to_ascii_lowercase() == key)
            .ok_or_else(|| format!("unknown sentiment category {s:?}"))
    }
}
