use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::SentimentCategory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Domain {
    Building,
    Transport,
    Energy,
    Waste,
    Water,
    Health,
    Business,
    #[serde(rename = "Natural Environment")]
    NaturalEnvironment,
    #[serde(rename = "Land Use")]
    LandUse,
    #[serde(rename = "Natural Hazards")]
    NaturalHazards,
}

impl Domain {
    pub const ALL: [Domain; 10] = [
        Domain::Building,
        Domain::Transport,
        Domain::Energy,
        Domain::Waste,
        Domain::Water,
        Domain::Health,
        Domain::Business,
        Domain::NaturalEnvironment,
        Domain::LandUse,
        Domain::NaturalHazards,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Domain::NaturalEnvironment => "Natural Environment",
            Domain::LandUse => "Land Use",
            Domain::NaturalHazards => "Natural Hazards",
            Domain::Building => "Building",
            Domain::Transport => "Transport",
            Domain::Energy => "Energy",
            Domain::Waste => "Waste",
            Domain::Water => "Water",
            Domain::Health => "Health",
            Domain::Business => "Business",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposalExample {
    pub domain: Domain,
    pub sentiment_score: f64,
    pub text: String,
    pub reasoning: String,
}

impl ProposalExample {
    pub fn category(&self) -> SentimentCategory {
        SentimentCategory::of(self.sentiment_score).expect("validated on load")
    }
}

/// A validated corpus: scores in range, unique texts, at least
/// [`CorpusFile::MIN_PER_CATEGORY`] entries in every category.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusFile {
    entries: Vec<ProposalExample>,
}

impl CorpusFile {
    pub const MIN_PER_CATEGORY: usize = 3;

    pub fn new(entries: Vec<ProposalExample>) -> Result<Self, DatasetError> {
        let mut seen = HashSet::new();
        for e in &entries {
            if SentimentCategory::of(e.sentiment_score).is_none() {
                return Err(DatasetError::ScoreOutOfRange {
                    text: e.text.clone(),
                    score: e.sentiment_score,
                });
            }
            if !seen.insert(e.text.trim().to_lowercase()) {
                return Err(DatasetError::DuplicateText(e.text.clone()));
            }
        }
        let corpus = CorpusFile { entries };
        for c in SentimentCategory::ALL {
            let n = corpus.in_category(c).count();
            if n < Self::MIN_PER_CATEGORY {
                return Err(DatasetError::schema(
                    None,
                    format!("category {c} has {n} entries, need {}", Self::MIN_PER_CATEGORY),
                ));
            }
        }
        Ok(corpus)
    }

    pub fn entries(&self) -> &[ProposalExample] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn in_category(&self, category: SentimentCategory) -> impl Iterator<Item = &ProposalExample> {
        self.entries.iter().filter(move |e| category.contains(e.sentiment_score))
    }

    pub fn by_category(&self) -> BTreeMap<SentimentCategory, Vec<&ProposalExample>> {
        let mut out: BTreeMap<_, Vec<_>> = BTreeMap::new();
        for e in &self.entries {
            out.entry(e.category()).or_default().push(e);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("plain data serializes")
    }
}

const SAMPLE: &str = include_str!("../../data/climate_corpus.json");

pub fn bundled_corpus() -> CorpusFile {
    parse_corpus(SAMPLE).expect("bundled corpus is valid")
}

pub fn load_corpus(path: &Path) -> Result<CorpusFile, DatasetError> {
    parse_corpus(&std::fs::read_to_string(path)?)
}

/// Parses a JSON array of `{domain, sentiment_score, text, reasoning}`.
pub fn parse_corpus(json: &str) -> Result<CorpusFile, DatasetError> {
    let entries: Vec<ProposalExample> =
        serde_json::from_str(json).map_err(|e| DatasetError::schema(Some(e.line()), e.to_string()))?;
    CorpusFile::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(domain: Domain, score: f64, text: &str) -> ProposalExample {
        ProposalExample {
            domain,
            sentiment_score: score,
            text: text.into(),
            reasoning: "r".into(),
        }
    }

    #[test]
    fn bundled_corpus_covers_every_domain_and_category() {
        let c = bundled_corpus();
        for cat in SentimentCategory::ALL {
            assert!(c.in_category(cat).count() >= 3, "{cat}");
            let domains: HashSet<Domain> = c.in_category(cat).map(|e| e.domain).collect();
            assert_eq!(domains.len(), 10, "{cat}");
        }
        let fixed = c
            .entries()
            .iter()
            .find(|e| e.text.starts_with("Mandate fixed temperature settings"))
            .unwrap();
        assert_eq!(fixed.domain, Domain::Building);
        assert_eq!(fixed.category(), SentimentCategory::ActiveResistance);
    }

    #[test]
    fn round_trips() {
        let c = bundled_corpus();
        assert_eq!(parse_corpus(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn score_out_of_range() {
        let json = r#"[{"domain": "Water", "sentiment_score": 1.3, "text": "x", "reasoning": "y"}]"#;
        assert!(matches!(
            parse_corpus(json),
            Err(DatasetError::ScoreOutOfRange { score, .. }) if score == 1.3
        ));
    }

    #[test]
    fn duplicates_and_thin_categories() {
        let mut entries: Vec<ProposalExample> = bundled_corpus().entries().to_vec();
        entries.push(entry(Domain::Energy, 0.5, " create a public dashboard showing live municipal renewable generation."));
        assert!(matches!(CorpusFile::new(entries), Err(DatasetError::DuplicateText(_))));

        let thin = vec![
            entry(Domain::Energy, 0.1, "a"),
            entry(Domain::Energy, 0.1, "b"),
            entry(Domain::Energy, 0.1, "c"),
        ];
        assert!(matches!(CorpusFile::new(thin), Err(DatasetError::Schema { .. })));
    }

    #[test]
    fn unknown_domain_is_a_schema_error() {
        let json = r#"[{"domain": "Space", "sentiment_score": 0.3, "text": "x", "reasoning": "y"}]"#;
        assert!(matches!(parse_corpus(json), Err(DatasetError::Schema { .. })));
    }
}
