use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{AgentId, ModelError, ParagraphId, VoteValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    /// 1-based position in the log.
    pub seq: usize,
    pub agent: AgentId,
    pub paragraph: ParagraphId,
    pub value: VoteValue,
}

/// Append-only sequence of events.
///
/// Every paragraph enters the log through an approval: the first event
/// touching a paragraph must carry `+1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EventLog {
    events: Vec<Event>,
    paragraphs: BTreeSet<ParagraphId>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a log from `(agent, paragraph, value)` triples, validating the
    /// proposal rule on every event.
    pub fn from_votes<I>(votes: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (AgentId, ParagraphId, VoteValue)>,
    {
        let mut log = EventLog::new();
        for (a, p, v) in votes {
            log.push(a, p, v)?;
        }
        Ok(log)
    }

    pub fn push(
        &mut self,
        agent: AgentId,
        paragraph: ParagraphId,
        value: VoteValue,
    ) -> Result<&Event, ModelError> {
        if !self.paragraphs.contains(&paragraph) {
            if value != VoteValue::Approve {
                return Err(ModelError::NewParagraphNotApproval { paragraph, value });
            }
            self.paragraphs.insert(paragraph);
        }
        self.events.push(Event {
            seq: self.events.len() + 1,
            agent,
            paragraph,
            value,
        });
        Ok(self.events.last().expect("just pushed"))
    }

    /// `E + e`: a new log with the event appended; `self` is untouched.
    pub fn append(
        &self,
        agent: AgentId,
        paragraph: ParagraphId,
        value: VoteValue,
    ) -> Result<EventLog, ModelError> {
        let mut next = self.clone();
        next.push(agent, paragraph, value)?;
        Ok(next)
    }

    /// `E + E'`, renumbering the appended events.
    pub fn concat(&self, other: &EventLog) -> Result<EventLog, ModelError> {
        let mut next = self.clone();
        for e in other.iter() {
            next.push(e.agent, e.paragraph, e.value)?;
        }
        Ok(next)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Event> {
        self.events.iter()
    }

    /// `P(E)`.
    pub fn paragraphs(&self) -> &BTreeSet<ParagraphId> {
        &self.paragraphs
    }

    /// `A(E)`: agents that generated at least one event.
    pub fn agents(&self) -> BTreeSet<AgentId> {
        self.events.iter().map(|e| e.agent).collect()
    }

    pub fn contains_paragraph(&self, p: ParagraphId) -> bool {
        self.paragraphs.contains(&p)
    }

    /// The id a fresh proposal receives: one past the largest id so far.
    pub fn next_paragraph_id(&self) -> ParagraphId {
        self.paragraphs
            .iter()
            .next_back()
            .map(|p| p.next())
            .unwrap_or(ParagraphId(1))
    }

    /// First `n` events (clamped to the log length).
    pub fn prefix(&self, n: usize) -> EventLog {
        let n = n.min(self.events.len());
        let events = self.events[..n].to_vec();
        let paragraphs = events.iter().map(|e| e.paragraph).collect();
        EventLog { events, paragraphs }
    }

    /// `E↓p`, or `E↓a,p` when an agent is given. Sequence numbers keep their
    /// original values so the result can be traced back into the full log.
    pub fn restrict(&self, paragraph: ParagraphId, agent: Option<AgentId>) -> Vec<Event> {
        self.events
            .iter()
            .filter(|e| e.paragraph == paragraph && agent.is_none_or(|a| e.agent == a))
            .copied()
            .collect()
    }
}

impl<'a> IntoIterator for &'a EventLog {
    type Item = &'a Event;
    type IntoIter = std::slice::Iter<'a, Event>;

    fn into_iter(self) -> Self::IntoIter {
        self.events.iter()
    }
}

/// A community of agents together with the log they produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    agents: BTreeSet<AgentId>,
    log: EventLog,
}

impl Instance {
    pub fn new(agents: BTreeSet<AgentId>, log: EventLog) -> Result<Self, ModelError> {
        if let Some(e) = log.iter().find(|e| !agents.contains(&e.agent)) {
            return Err(ModelError::UnknownAgent(e.agent));
        }
        Ok(Instance { agents, log })
    }

    /// Agents `a1..=an`.
    pub fn with_agents(n: u32, log: EventLog) -> Result<Self, ModelError> {
        Self::new((1..=n).map(AgentId).collect(), log)
    }

    pub fn empty(n: u32) -> Self {
        Instance {
            agents: (1..=n).map(AgentId).collect(),
            log: EventLog::new(),
        }
    }

    pub fn agents(&self) -> &BTreeSet<AgentId> {
        &self.agents
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn into_log(self) -> EventLog {
        self.log
    }

    pub fn push(
        &mut self,
        agent: AgentId,
        paragraph: ParagraphId,
        value: VoteValue,
    ) -> Result<&Event, ModelError> {
        if !self.agents.contains(&agent) {
            return Err(ModelError::UnknownAgent(agent));
        }
        self.log.push(agent, paragraph, value)
    }

    pub fn append(
        &self,
        agent: AgentId,
        paragraph: ParagraphId,
        value: VoteValue,
    ) -> Result<Instance, ModelError> {
        let mut next = self.clone();
        next.push(agent, paragraph, value)?;
        Ok(next)
    }

    pub fn extend(&self, log: &EventLog) -> Result<Instance, ModelError> {
        let mut next = self.clone();
        for e in log {
            next.push(e.agent, e.paragraph, e.value)?;
        }
        Ok(next)
    }

    /// Adds agents to the community without touching the log.
    pub fn admit_agents<I: IntoIterator<Item = AgentId>>(&self, agents: I) -> Instance {
        let mut next = self.clone();
        next.agents.extend(agents);
        next
    }

    pub fn prefix(&self, n: usize) -> Instance {
        Instance {
            agents: self.agents.clone(),
            log: self.log.prefix(n),
        }
    }

    pub fn with_log(&self, log: EventLog) -> Result<Instance, ModelError> {
        Instance::new(self.agents.clone(), log)
    }
}
