use std::fmt;
use std::path::Path;
use std::str::FromStr;

use ccr_core::model::AgentId;
use ccr_core::populations::{sample_population, IdealPointDistribution, PopulationSpec, SimRng};
use ccr_core::scheduler::{AgentPolicy, EuclideanPolicy, SimError, UnstructuredPolicy};
use ccr_llm::datasets::{
    bundled_corpus, bundled_demographics, load_corpus, load_demographics, sample_profiles, CorpusFile, DemographicCell,
};
use ccr_llm::{ChatTransport, HttpConfig, HttpTransport, LlmPolicy, LlmSettings, PersonaMock, Retrying, TransportError};
use rand::SeedableRng;

use crate::config::{LlmOptions, RunSettings};
use crate::CliError;

const HTTP_RETRIES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PopulationKind {
    Unstructured,
    Euclidean(IdealPointDistribution),
    Llm,
}

impl FromStr for PopulationKind {
    type Err = CliError;

    /// `unstructured`, `euclidean` (uniform ideal points),
    /// `euclidean:<distribution>` or `llm`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |token: &str, why: String| CliError::Usage(format!("population {s:?}: bad token {token:?} ({why})"));
        let (head, rest) = match s.trim().split_once(':') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (s.trim(), None),
        };
        match (head.to_ascii_lowercase().as_str(), rest) {
            ("unstructured" | "random", None) => Ok(PopulationKind::Unstructured),
            ("llm", None) => Ok(PopulationKind::Llm),
            ("euclidean", None) => Ok(PopulationKind::Euclidean(IdealPointDistribution::Uniform)),
            ("euclidean", Some(d)) => d
                .parse()
                .map(PopulationKind::Euclidean)
                .map_err(|e| bad(d, e.to_string())),
            _ => Err(bad(head, "expected unstructured, euclidean[:distribution] or llm".into())),
        }
    }
}

impl fmt::Display for PopulationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PopulationKind::Unstructured => f.write_str("unstructured"),
            PopulationKind::Euclidean(d) => write!(f, "euclidean:{d}"),
            PopulationKind::Llm => f.write_str("llm"),
        }
    }
}

/// Everything needed to build a fresh population for any seed.
pub struct Population {
    kind: PopulationKind,
    agents: u32,
    width: f64,
    llm: LlmOptions,
    cells: Vec<DemographicCell>,
    corpus: Option<CorpusFile>,
}

impl Population {
    /// Loads datasets and, for live LLM runs, checks the credential before
    /// anything touches the network.
    pub fn prepare(settings: &RunSettings) -> Result<Self, CliError> {
        let mut pop = Population {
            kind: settings.population,
            agents: settings.agents,
            width: settings.width,
            llm: settings.llm.clone(),
            cells: Vec::new(),
            corpus: None,
        };
        if pop.kind == PopulationKind::Llm {
            let schema = |e: ccr_llm::datasets::DatasetError| CliError::Schema(e.to_string());
            pop.cells = match &pop.llm.demographics {
                Some(p) => load_demographics(p).map_err(schema)?,
                None => bundled_demographics(),
            };
            pop.corpus = Some(match &pop.llm.corpus {
                Some(p) => load_corpus(p).map_err(schema)?,
                None => bundled_corpus(),
            });
            if !pop.llm.mock {
                pop.gateway(0).map_err(|e| CliError::Runtime(e.to_string()))?;
            }
        }
        Ok(pop)
    }

    pub fn kind(&self) -> PopulationKind {
        self.kind
    }

    fn gateway(&self, seed: u64) -> Result<Box<dyn ChatTransport>, TransportError> {
        if self.llm.mock {
            return Ok(Box::new(PersonaMock::new(seed)));
        }
        let http = HttpTransport::from_env(&HttpConfig {
            base_url: self.llm.base_url.clone(),
            ..HttpConfig::default()
        })?;
        Ok(Box::new(Retrying::new(http, HTTP_RETRIES)))
    }

    pub fn build(&self, seed: u64, audit_log: Option<&Path>) -> Result<(Vec<AgentId>, Box<dyn AgentPolicy>), SimError> {
        let ids: Vec<AgentId> = (1..=self.agents).map(AgentId).collect();
        match self.kind {
            PopulationKind::Unstructured => Ok((ids, Box::new(UnstructuredPolicy))),
            PopulationKind::Euclidean(distribution) => {
                let spec = PopulationSpec {
                    width: self.width,
                    ..PopulationSpec::new(self.agents, distribution, seed)
                };
                let agents = sample_population(&spec)?;
                Ok((agents.iter().map(|a| a.id).collect(), Box::new(EuclideanPolicy::new(&agents))))
            }
            PopulationKind::Llm => {
                let config = |e: String| SimError::Config(e);
                let mut rng = SimRng::seed_from_u64(seed);
                let profiles = sample_profiles(&self.cells, self.agents as usize, &self.llm.sentiment, &mut rng)
                    .map_err(|e| config(e.to_string()))?;
                let settings = LlmSettings {
                    topic: self.llm.topic.clone(),
                    model: self.llm.model.clone(),
                    temperature: self.llm.temperature,
                    ..LlmSettings::default()
                };
                let transport = self.gateway(seed).map_err(|e| config(e.to_string()))?;
                let corpus = self.corpus.clone().expect("prepared");
                let mut policy = LlmPolicy::new(profiles, corpus, settings, transport);
                if let Some(path) = audit_log {
                    policy = policy.with_audit_log(path)?;
                }
                Ok((ids, Box::new(policy)))
            }
        }
    }
}
