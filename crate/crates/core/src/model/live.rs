use std::collections::HashMap;

use super::{AgentId, Event, ParagraphId, VoteValue, WeightMode};
use crate::scalar::Scalar;

/// Incrementally maintained stance and tally state.
///
/// Replaying a log event by event through [`LiveTally::apply`] yields the
/// same counts as [`tally_of`](super::tally_of) on every prefix, at O(1)
/// cost per event (O(|A|) when a paragraph is first seen). Rule evaluation
/// and the scheduler use this instead of re-deriving from the log.
#[derive(Clone, Debug, Default)]
pub struct LiveTally {
    agent_index: HashMap<AgentId, usize>,
    agents: Vec<AgentId>,
    para_index: HashMap<ParagraphId, usize>,
    paragraphs: Vec<ParagraphId>,
    // [agent][paragraph]
    stance: Vec<Vec<i8>>,
    ever: Vec<Vec<bool>>,
    plus: Vec<u32>,
    minus: Vec<u32>,
    current_n: Vec<u32>,
    ever_n: Vec<u32>,
    seen: Vec<bool>,
    seen_count: usize,
    events: usize,
}

impl LiveTally {
    pub fn new<I: IntoIterator<Item = AgentId>>(agents: I) -> Self {
        let mut t = LiveTally::default();
        for a in agents {
            t.agent_slot(a);
        }
        t
    }

    fn agent_slot(&mut self, a: AgentId) -> usize {
        if let Some(&i) = self.agent_index.get(&a) {
            return i;
        }
        let i = self.agents.len();
        self.agent_index.insert(a, i);
        self.agents.push(a);
        self.stance.push(vec![0; self.paragraphs.len()]);
        self.ever.push(vec![false; self.paragraphs.len()]);
        self.current_n.push(0);
        self.ever_n.push(0);
        self.seen.push(false);
        i
    }

    fn paragraph_slot(&mut self, p: ParagraphId) -> usize {
        if let Some(&j) = self.para_index.get(&p) {
            return j;
        }
        let j = self.paragraphs.len();
        self.para_index.insert(p, j);
        self.paragraphs.push(p);
        self.plus.push(0);
        self.minus.push(0);
        for row in &mut self.stance {
            row.push(0);
        }
        for row in &mut self.ever {
            row.push(false);
        }
        j
    }

    pub fn apply(&mut self, e: &Event) {
        self.apply_vote(e.agent, e.paragraph, e.value);
    }

    pub fn apply_vote(&mut self, agent: AgentId, paragraph: ParagraphId, value: VoteValue) {
        let i = self.agent_slot(agent);
        let j = self.paragraph_slot(paragraph);
        self.events += 1;
        if !self.seen[i] {
            self.seen[i] = true;
            self.seen_count += 1;
        }
        let old = self.stance[i][j];
        let new = value.as_i8();
        if old == new {
            return;
        }
        match old {
            1 => self.plus[j] -= 1,
            -1 => self.minus[j] -= 1,
            _ => {}
        }
        match new {
            1 => self.plus[j] += 1,
            -1 => self.minus[j] += 1,
            _ => {}
        }
        if old == 0 {
            self.current_n[i] += 1;
        } else if new == 0 {
            self.current_n[i] -= 1;
        }
        if new != 0 && !self.ever[i][j] {
            self.ever[i][j] = true;
            self.ever_n[i] += 1;
        }
        self.stance[i][j] = new;
    }

    /// `|E|` of the replayed prefix.
    pub fn num_events(&self) -> usize {
        self.events
    }

    /// `|A(E)|`: agents that generated at least one event.
    pub fn num_agents_seen(&self) -> usize {
        self.seen_count
    }

    /// `|P(E)|`.
    pub fn num_paragraphs(&self) -> usize {
        self.paragraphs.len()
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    /// Paragraph ids in first-appearance order; indices into the per-paragraph
    /// accessors below.
    pub fn paragraph_ids(&self) -> &[ParagraphId] {
        &self.paragraphs
    }

    pub fn paragraph_index(&self, p: ParagraphId) -> Option<usize> {
        self.para_index.get(&p).copied()
    }

    pub fn agent_index(&self, a: AgentId) -> Option<usize> {
        self.agent_index.get(&a).copied()
    }

    pub fn plus(&self, j: usize) -> u32 {
        self.plus[j]
    }

    pub fn minus(&self, j: usize) -> u32 {
        self.minus[j]
    }

    pub fn stance_at(&self, i: usize, j: usize) -> VoteValue {
        VoteValue::from_i8(self.stance[i][j]).expect("stance cells hold -1, 0 or 1")
    }

    pub fn stance(&self, a: AgentId, p: ParagraphId) -> VoteValue {
        match (self.agent_index(a), self.paragraph_index(p)) {
            (Some(i), Some(j)) => self.stance_at(i, j),
            _ => VoteValue::Abstain,
        }
    }

    /// Raw stance row of agent index `i` (values in {-1, 0, 1}).
    pub fn stance_row(&self, i: usize) -> &[i8] {
        &self.stance[i]
    }

    pub fn weight_at(&self, i: usize, mode: WeightMode) -> u32 {
        match mode {
            WeightMode::CurrentStance => self.current_n[i],
            WeightMode::EverVoted => self.ever_n[i],
        }
    }

    pub fn active_agents(&self) -> usize {
        self.current_n.iter().filter(|&&n| n > 0).count()
    }

    /// Relative approval and disapproval per paragraph index.
    pub fn relative<S: Scalar>(&self, mode: WeightMode) -> (Vec<S>, Vec<S>) {
        let mut plus = vec![S::zero(); self.paragraphs.len()];
        let mut minus = vec![S::zero(); self.paragraphs.len()];
        for (i, row) in self.stance.iter().enumerate() {
            let n = self.weight_at(i, mode);
            if n == 0 || self.current_n[i] == 0 {
                continue;
            }
            let share = S::from_ratio(1, n as u64);
            for (j, &v) in row.iter().enumerate() {
                match v {
                    1 => plus[j] = plus[j] + share,
                    -1 => minus[j] = minus[j] + share,
                    _ => {}
                }
            }
        }
        (plus, minus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{tally_of, EventLog, Instance};
    use VoteValue::*;

    #[test]
    fn matches_batch_tally_on_every_prefix() {
        let votes = [
            (1, 1, Approve),
            (2, 1, Disapprove),
            (2, 2, Approve),
            (1, 1, Abstain),
            (3, 1, Approve),
            (2, 1, Abstain),
            (3, 2, Disapprove),
            (1, 1, Approve),
        ];
        let log = EventLog::from_votes(
            votes
                .iter()
                .map(|&(a, p, v)| (AgentId(a), ParagraphId(p), v)),
        )
        .unwrap();
        let inst = Instance::with_agents(3, log).unwrap();
        let mut live = LiveTally::new(inst.agents().iter().copied());
        for (k, e) in inst.log().iter().enumerate() {
            live.apply(e);
            let prefix = inst.prefix(k + 1);
            for mode in [WeightMode::CurrentStance, WeightMode::EverVoted] {
                let batch = tally_of::<f64>(&prefix, mode);
                let (pr, mr) = live.relative::<f64>(mode);
                for (j, &p) in live.paragraph_ids().iter().enumerate() {
                    let t = batch.get(p).unwrap();
                    assert_eq!(t.plus as u32, live.plus(j));
                    assert_eq!(t.minus as u32, live.minus(j));
                    assert!((t.plus_rel - pr[j]).abs() < 1e-12);
                    assert!((t.minus_rel - mr[j]).abs() < 1e-12);
                }
            }
        }
    }
}
