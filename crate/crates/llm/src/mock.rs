use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::parse::{format_decision, DecisionKind, ParsedDecision, VoteToken};
use crate::transport::{ChatRequest, ChatTransport, TransportError};

/// Offline stand-in for a chat model.
///
/// Reads the state rows, few-shot examples and position score back out of
/// the rendered prompts and answers with a legal decision in the required
/// format. Answers are a pure function of the seed and the request text.
#[derive(Clone, Debug, Default)]
pub struct PersonaMock {
    pub seed: u64,
    pub calls: usize,
}

impl PersonaMock {
    pub fn new(seed: u64) -> Self {
        PersonaMock { seed, calls: 0 }
    }
}

struct Row {
    id: u32,
    own: i8,
}

fn field<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let at = line.find(&format!("'{key}': "))? + key.len() + 4;
    let rest = &line[at..];
    let end = rest.find([',', '}']).unwrap_or(rest.len());
    Some(rest[..end].trim().trim_matches('\''))
}

fn state_rows(user: &str) -> Vec<Row> {
    user.lines()
        .filter(|l| l.trim_start().starts_with("{'paragraph_id'"))
        .filter_map(|l| {
            let id = field(l, "paragraph_id")?.parse().ok()?;
            let own = match field(l, "own_vote")? {
                "+1" => 1,
                "-1" => -1,
                _ => 0,
            };
            Some(Row { id, own })
        })
        .collect()
}

/// `N. [Domain] text (Reasoning: ...)` lines of the few-shot block.
fn examples(user: &str) -> Vec<String> {
    user.lines()
        .filter_map(|l| {
            let l = l.trim();
            let (num, rest) = l.split_once(". [")?;
            num.parse::<u32>().ok()?;
            let (_, text) = rest.split_once("] ")?;
            Some(text.split(" (Reasoning:").next().unwrap_or(text).trim().to_string())
        })
        .collect()
}

fn position(system: &str) -> f64 {
    system
        .lines()
        .find(|l| l.starts_with("YOUR POSITION ON"))
        .and_then(|l| l.rsplit_once(": "))
        .and_then(|(_, v)| v.split_whitespace().next())
        .and_then(|v| v.parse().ok())
        .unwrap_or(0.5)
}

fn fnv(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3))
}

impl PersonaMock {
    pub fn decide(&self, request: &ChatRequest) -> ParsedDecision {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ fnv(request.system.as_bytes()) ^ fnv(request.user.as_bytes()).rotate_left(17));
        let rows = state_rows(&request.user);
        let next = rows.iter().map(|r| r.id).max().unwrap_or(0) + 1;
        let stance = position(&request.system);
        if rows.is_empty() || rng.random_bool(1.0 / 3.0) {
            let pool = examples(&request.user);
            let text = if pool.is_empty() {
                format!("Proposal {next}")
            } else {
                // a light variation so repeated proposals stay distinguishable
                format!("{} (variant {next})", pool[rng.random_range(0..pool.len())].trim_end_matches('.'))
            };
            return ParsedDecision {
                decision: DecisionKind::Propose,
                paragraph_id: next,
                action_text: text,
                vote: VoteToken::Upvote,
                reasoning: "Adds a point my position needs.".into(),
            };
        }
        let row = &rows[rng.random_range(0..rows.len())];
        let vote = match row.own {
            0 if rng.random_bool(stance.clamp(0.05, 0.95)) => VoteToken::Upvote,
            0 => VoteToken::Downvote,
            // change of mind: withdraw or flip
            1 if rng.random_bool(0.5) => VoteToken::Abstain,
            1 => VoteToken::Downvote,
            _ if rng.random_bool(0.5) => VoteToken::Abstain,
            _ => VoteToken::Upvote,
        };
        ParsedDecision {
            decision: DecisionKind::Vote,
            paragraph_id: row.id,
            action_text: String::new(),
            vote,
            reasoning: "Reflects my view of this paragraph.".into(),
        }
    }
}

impl ChatTransport for PersonaMock {
    fn complete(&mut self, request: &ChatRequest) -> Result<String, TransportError> {
        self.calls += 1;
        let mut d = self.decide(request);
        if d.action_text.is_empty() {
            d.action_text = "(existing paragraph)".into();
        }
        Ok(format_decision(&d))
    }
}
