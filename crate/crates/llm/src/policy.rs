use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ccr_core::model::AgentId;
use ccr_core::populations::{AgentView, SimRng};
use ccr_core::scheduler::{AgentPolicy, Decision};
use serde::Serialize;
use serde_json::json;

use crate::datasets::{AgentProfile, CorpusFile};
use crate::fewshot::sample_few_shot;
use crate::parse::{parse_decision, validate_action};
use crate::prompt::{action_hint, render_decision_prompt, render_system_prompt, PromptTemplates, FEW_SHOT};
use crate::transport::{ChatRequest, ChatTransport, TransportError, DEFAULT_MODEL, DEFAULT_TEMPERATURE};

#[derive(Clone, Debug, PartialEq)]
pub struct LlmSettings {
    pub topic: String,
    pub model: String,
    pub temperature: f64,
    /// Extra attempts after a rejected answer before the turn is skipped.
    pub max_reprompts: usize,
}

impl Default for LlmSettings {
    fn default() -> Self {
        LlmSettings {
            topic: "Climate change policy".into(),
            model: DEFAULT_MODEL.into(),
            temperature: DEFAULT_TEMPERATURE,
            max_reprompts: 2,
        }
    }
}

/// One request/response pair, as written to the audit log.
#[derive(Clone, Debug, Serialize)]
pub struct AuditRecord {
    pub turn: usize,
    pub agent: AgentId,
    pub attempt: usize,
    pub request: ChatRequest,
    pub response: Option<String>,
    /// `accepted`, or why the answer was rejected.
    pub outcome: String,
}

/// Agents backed by a chat model: every turn renders the agent's prompts,
/// asks the transport, and validates the answer against the agent's view.
pub struct LlmPolicy {
    profiles: BTreeMap<AgentId, AgentProfile>,
    corpus: CorpusFile,
    templates: PromptTemplates,
    settings: LlmSettings,
    transport: Box<dyn ChatTransport>,
    sink: Option<BufWriter<File>>,
    records: Vec<AuditRecord>,
    turns: usize,
    skips: usize,
    rejections: usize,
}

impl LlmPolicy {
    pub fn new(
        profiles: Vec<AgentProfile>,
        corpus: CorpusFile,
        settings: LlmSettings,
        transport: Box<dyn ChatTransport>,
    ) -> Self {
        LlmPolicy {
            profiles: profiles.into_iter().map(|p| (p.agent_id, p)).collect(),
            corpus,
            templates: PromptTemplates::default(),
            settings,
            transport,
            sink: None,
            records: Vec::new(),
            turns: 0,
            skips: 0,
            rejections: 0,
        }
    }

    pub fn with_templates(mut self, templates: PromptTemplates) -> Self {
        self.templates = templates;
        self
    }

    /// Streams every request/response pair to `path` as JSON lines.
    pub fn with_audit_log(mut self, path: &Path) -> std::io::Result<Self> {
        self.sink = Some(BufWriter::new(File::create(path)?));
        Ok(self)
    }

    pub fn agents(&self) -> Vec<AgentId> {
        self.profiles.keys().copied().collect()
    }

    pub fn profiles(&self) -> impl Iterator<Item = &AgentProfile> {
        self.profiles.values()
    }

    pub fn records(&self) -> &[AuditRecord] {
        &self.records
    }

    fn record(&mut self, rec: AuditRecord) -> std::io::Result<()> {
        if let Some(sink) = &mut self.sink {
            serde_json::to_writer(&mut *sink, &rec)?;
            sink.write_all(b"\n")?;
            sink.flush()?;
        }
        self.records.push(rec);
        Ok(())
    }
}

type BoxError = Box<dyn std::error::Error + Send + Sync>;

impl AgentPolicy for LlmPolicy {
    fn decide(&mut self, view: &AgentView, rng: &mut SimRng) -> Result<Decision, BoxError> {
        self.turns += 1;
        let profile = self
            .profiles
            .get(&view.agent)
            .ok_or_else(|| format!("no profile for agent {}", view.agent))?
            .clone();
        let few_shot = sample_few_shot(&self.corpus, profile.sentiment_category, FEW_SHOT, rng)?;
        let system = render_system_prompt(&self.templates, &profile, &self.settings.topic)?;
        let base = render_decision_prompt(&self.templates, view, &few_shot, action_hint(view))?;
        let mut user = base.clone();

        for attempt in 0..=self.settings.max_reprompts {
            let request = ChatRequest {
                model: self.settings.model.clone(),
                temperature: self.settings.temperature,
                system: system.clone(),
                user: user.clone(),
            };
            let reply = match self.transport.complete(&request) {
                Ok(r) => r,
                Err(e) => {
                    self.record(AuditRecord {
                        turn: self.turns,
                        agent: view.agent,
                        attempt,
                        request,
                        response: None,
                        outcome: format!("transport: {e}"),
                    })?;
                    return match e {
                        TransportError::Auth(_) => Err(Box::new(e)),
                        other => {
                            self.skips += 1;
                            Ok(Decision::Skip(format!("transport: {other}")))
                        }
                    };
                }
            };
            let verdict = parse_decision(&reply)
                .map_err(|e| e.to_string())
                .and_then(|d| validate_action(&d, view).map_err(|e| e.to_string()));
            let outcome = match &verdict {
                Ok(_) => "accepted".to_string(),
                Err(why) => why.clone(),
            };
            self.record(AuditRecord {
                turn: self.turns,
                agent: view.agent,
                attempt,
                request,
                response: Some(reply),
                outcome,
            })?;
            match verdict {
                Ok(action) => return Ok(Decision::Act(action)),
                Err(why) => {
                    self.rejections += 1;
                    log::debug!("agent {} answer rejected: {why}", view.agent);
                    user = format!(
                        "{base}\n\nYour previous answer was rejected: {why}. Answer again, following the voting rules and the answer format."
                    );
                }
            }
        }
        self.skips += 1;
        Ok(Decision::Skip(format!(
            "no valid answer after {} attempts",
            self.settings.max_reprompts + 1
        )))
    }

    fn write_population(&self, out: &mut dyn std::io::Write) -> std::io::Result<bool> {
        let mut w = csv::Writer::from_writer(out);
        for p in self.profiles.values() {
            w.serialize(p).map_err(std::io::Error::other)?;
        }
        w.flush()?;
        Ok(true)
    }

    fn audit(&self) -> serde_json::Value {
        json!({
            "kind": "llm",
            "model": self.settings.model,
            "temperature": self.settings.temperature,
            "topic": self.settings.topic,
            "turns": self.turns,
            "requests": self.records.len(),
            "rejected_answers": self.rejections,
            "skipped_turns": self.skips,
            "profiles": self.profiles.values().collect::<Vec<_>>(),
        })
    }
}
