use std::collections::BTreeMap;
use std::path::Path;

use ccr_core::model::VoteValue;
use ccr_core::populations::AgentView;
use thiserror::Error;

use crate::datasets::{AgentProfile, ProposalExample};

#[derive(Debug, Error)]
pub enum PromptError {
    #[error("template placeholder {{{{{0}}}}} has no value")]
    MissingPlaceholder(String),
    #[error("unterminated placeholder at byte {0}")]
    Unterminated(usize),
    #[error("expected {expected} few-shot examples, got {got}")]
    FewShotCount { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub const FEW_SHOT: usize = 3;

pub const GENERAL_HINT: &str = "You can either PROPOSE a new action or VOTE on an existing proposal";
pub const FORCED_PROPOSE_HINT: &str = "There are no proposals yet, so you must PROPOSE a new action";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PromptTemplates {
    pub system: String,
    pub decision: String,
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            system: include_str!("../templates/system.txt").to_string(),
            decision: include_str!("../templates/decision.txt").to_string(),
        }
    }
}

impl PromptTemplates {
    /// Reads `system.txt` and `decision.txt` from `dir`.
    pub fn from_dir(dir: &Path) -> Result<Self, PromptError> {
        Ok(PromptTemplates {
            system: std::fs::read_to_string(dir.join("system.txt"))?,
            decision: std::fs::read_to_string(dir.join("decision.txt"))?,
        })
    }
}

/// Replaces every `{{name}}` in one pass; substituted values are not
/// rescanned, so text containing braces passes through untouched.
pub fn fill(template: &str, values: &BTreeMap<&str, String>) -> Result<String, PromptError> {
    let mut out = String::with_capacity(template.len() * 2);
    let mut rest = template;
    let mut offset = 0;
    while let Some(start) = rest.find("{{") {
        out.push_str(&rest[..start]);
        let after = &rest[start + 2..];
        let end = after.find("}}").ok_or(PromptError::Unterminated(offset + start))?;
        let name = after[..end].trim();
        let value = values
            .get(name)
            .ok_or_else(|| PromptError::MissingPlaceholder(name.to_string()))?;
        out.push_str(value);
        let consumed = start + 2 + end + 2;
        offset += consumed;
        rest = &rest[consumed..];
    }
    out.push_str(rest);
    Ok(out)
}

pub fn render_system_prompt(
    templates: &PromptTemplates,
    profile: &AgentProfile,
    topic: &str,
) -> Result<String, PromptError> {
    let values = BTreeMap::from([
        ("agent_id", profile.agent_id.0.to_string()),
        ("topic", topic.to_string()),
        ("profile", profile.profile_text.clone()),
        ("topic_position", format!("{:.2}", profile.sentiment_score)),
        ("position_category", profile.sentiment_category.name().to_lowercase()),
        ("description", profile.sentiment_category.orientation().to_string()),
    ]);
    fill(&templates.system, &values)
}

/// `'?'` for no stance, `'+1'` / `'-1'` otherwise.
pub fn own_vote_token(v: VoteValue) -> &'static str {
    match v {
        VoteValue::Approve => "+1",
        VoteValue::Abstain => "?",
        VoteValue::Disapprove => "-1",
    }
}

fn quoted(s: &str) -> String {
    format!("'{}'", s.replace('\\', "\\\\").replace('\'', "\\'"))
}

/// One dict-style row per paragraph, in id order.
pub fn system_state_section(view: &AgentView) -> String {
    if view.is_empty() {
        return "no paragraphs have been proposed yet".to_string();
    }
    view.paragraphs
        .iter()
        .map(|s| {
            format!(
                "{{'paragraph_id': {}, 'text': {}, 'votes_plus': {}, 'votes_minus': {}, 'own_vote': {}, 'In document': {}}}",
                s.id.0,
                quoted(s.payload.text().unwrap_or("")),
                s.plus,
                s.minus,
                quoted(own_vote_token(s.own)),
                quoted(if s.in_document { "yes" } else { "no" }),
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn action_hint(view: &AgentView) -> &'static str {
    if view.is_empty() {
        FORCED_PROPOSE_HINT
    } else {
        GENERAL_HINT
    }
}

pub fn format_examples(examples: &[ProposalExample]) -> String {
    examples
        .iter()
        .enumerate()
        .map(|(k, e)| format!("{}. [{}] {} (Reasoning: {})", k + 1, e.domain, e.text, e.reasoning))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn render_decision_prompt(
    templates: &PromptTemplates,
    view: &AgentView,
    few_shot: &[ProposalExample],
    hint: &str,
) -> Result<String, PromptError> {
    if few_shot.len() != FEW_SHOT {
        return Err(PromptError::FewShotCount {
            expected: FEW_SHOT,
            got: few_shot.len(),
        });
    }
    let values = BTreeMap::from([
        ("system_state_section", system_state_section(view)),
        ("action_hint", hint.to_string()),
        ("examples", format_examples(few_shot)),
    ]);
    fill(&templates.decision, &values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fill_is_single_pass() {
        let v = BTreeMap::from([("a", "{{b}}".to_string())]);
        assert_eq!(fill("x {{ a }} y", &v).unwrap(), "x {{b}} y");
        assert!(matches!(fill("{{b}}", &v), Err(PromptError::MissingPlaceholder(n)) if n == "b"));
        assert!(matches!(fill("ok {{a", &v), Err(PromptError::Unterminated(3))));
    }
}
