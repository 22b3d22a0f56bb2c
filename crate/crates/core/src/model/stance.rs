use std::collections::{BTreeMap, BTreeSet};

use super::{AgentId, EventLog, Instance, ParagraphId, VoteValue};

/// Each agent's last recorded vote per paragraph. Only nonzero entries are
/// stored, so two matrices compare equal exactly when their stances agree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StanceMatrix {
    entries: BTreeMap<(AgentId, ParagraphId), VoteValue>,
}

impl StanceMatrix {
    pub fn from_log(log: &EventLog) -> Self {
        let mut entries = BTreeMap::new();
        for e in log {
            if e.value.is_nonzero() {
                entries.insert((e.agent, e.paragraph), e.value);
            } else {
                entries.remove(&(e.agent, e.paragraph));
            }
        }
        StanceMatrix { entries }
    }

    pub fn get(&self, agent: AgentId, paragraph: ParagraphId) -> VoteValue {
        self.entries
            .get(&(agent, paragraph))
            .copied()
            .unwrap_or(VoteValue::Abstain)
    }

    /// Nonzero entries in (agent, paragraph) order.
    pub fn nonzero(&self) -> impl Iterator<Item = (AgentId, ParagraphId, VoteValue)> + '_ {
        self.entries.iter().map(|(&(a, p), &v)| (a, p, v))
    }

    pub fn row(&self, agent: AgentId) -> impl Iterator<Item = (ParagraphId, VoteValue)> + '_ {
        self.entries
            .range((agent, ParagraphId(0))..=(agent, ParagraphId(u32::MAX)))
            .map(|(&(_, p), &v)| (p, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }
}

pub fn stance_of(instance: &Instance) -> StanceMatrix {
    StanceMatrix::from_log(instance.log())
}

/// Abstentions that bring every nonzero stance of `log` back to zero.
pub fn undo_list(log: &EventLog) -> Vec<(AgentId, ParagraphId, VoteValue)> {
    StanceMatrix::from_log(log)
        .nonzero()
        .map(|(a, p, _)| (a, p, VoteValue::Abstain))
        .collect()
}

/// `N_active`: agents holding at least one nonzero stance.
pub fn active_agents(instance: &Instance) -> usize {
    stance_of(instance)
        .nonzero()
        .map(|(a, _, _)| a)
        .collect::<BTreeSet<_>>()
        .len()
}
