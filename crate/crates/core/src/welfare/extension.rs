use super::WelfareError;
use crate::model::{tally_of, AgentId, Instance, ModelError, ParagraphId, VoteValue, WeightMode};
use crate::rules::{rm_solution, TieBreak};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Push an included paragraph out with fresh disapprovals.
    Out,
    /// Pull an excluded paragraph in with fresh approvals.
    In,
}

/// Votes from agents new to the instance. Kept as raw votes rather than a
/// log: on its own the list would open with a non-approval on an existing
/// paragraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub agents: Vec<AgentId>,
    pub votes: Vec<(AgentId, ParagraphId, VoteValue)>,
}

impl Extension {
    pub fn len(&self) -> usize {
        self.votes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.votes.is_empty()
    }

    pub fn apply(&self, instance: &Instance) -> Result<Instance, ModelError> {
        let mut next = instance.admit_agents(self.agents.iter().copied());
        for &(a, p, v) in &self.votes {
            next.push(a, p, v)?;
        }
        Ok(next)
    }
}

/// `p⁺ + 1` fresh disapprovals (`Out`) or `p⁻ + 1` fresh approvals (`In`).
///
/// Each fresh agent votes once, so its relative weight is a full 1 and the
/// appended side outweighs anything the existing agents can muster.
pub fn destabilizing_extension(
    instance: &Instance,
    paragraph: ParagraphId,
    direction: Direction,
) -> Result<Extension, WelfareError> {
    if !instance.log().contains_paragraph(paragraph) {
        return Err(WelfareError::UnknownParagraph(paragraph));
    }
    let t = *tally_of::<f64>(instance, WeightMode::CurrentStance).get(paragraph)?;
    let (count, value) = match direction {
        Direction::Out => (t.plus + 1, VoteValue::Disapprove),
        Direction::In => (t.minus + 1, VoteValue::Approve),
    };
    let first = instance
        .agents()
        .iter()
        .chain(instance.log().agents().iter())
        .map(|a| a.0)
        .max()
        .map_or(1, |m| m + 1);
    let agents: Vec<AgentId> = (first..first + count as u32).map(AgentId).collect();
    let votes = agents.iter().map(|&a| (a, paragraph, value)).collect();
    Ok(Extension { agents, votes })
}

/// The extension that flips `paragraph`'s membership under RM.
pub fn flip_extension(
    instance: &Instance,
    paragraph: ParagraphId,
    mode: WeightMode,
    tie: TieBreak,
) -> Result<Extension, WelfareError> {
    let direction = if rm_solution::<f64>(instance, mode, tie).contains(paragraph) {
        Direction::Out
    } else {
        Direction::In
    };
    destabilizing_extension(instance, paragraph, direction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::four_paragraphs;
    use crate::model::EventLog;

    #[test]
    fn pushes_p1_out() {
        let inst = four_paragraphs();
        let ext = destabilizing_extension(&inst, ParagraphId(1), Direction::Out).unwrap();
        assert_eq!(ext.len(), 4);
        assert!(ext.agents.iter().all(|a| a.0 > 5));
        let after = ext.apply(&inst).unwrap();
        let rm = rm_solution::<f64>(&after, WeightMode::EverVoted, TieBreak::default());
        assert!(!rm.contains(ParagraphId(1)));
    }

    #[test]
    fn pulls_excluded_paragraph_in() {
        let log = EventLog::from_votes([
            (AgentId(1), ParagraphId(1), VoteValue::Approve),
            (AgentId(2), ParagraphId(1), VoteValue::Disapprove),
            (AgentId(1), ParagraphId(1), VoteValue::Abstain),
        ])
        .unwrap();
        let inst = Instance::with_agents(2, log).unwrap();
        let mode = WeightMode::EverVoted;
        assert!(rm_solution::<f64>(&inst, mode, TieBreak::default()).is_empty());
        let ext = flip_extension(&inst, ParagraphId(1), mode, TieBreak::default()).unwrap();
        assert_eq!(ext.len(), 2);
        let after = ext.apply(&inst).unwrap();
        assert!(rm_solution::<f64>(&after, mode, TieBreak::default()).contains(ParagraphId(1)));
    }

    #[test]
    fn flipping_twice_restores_membership() {
        let inst = four_paragraphs();
        let mode = WeightMode::EverVoted;
        let tie = TieBreak::default();
        for p in inst.log().paragraphs().clone() {
            let before = rm_solution::<f64>(&inst, mode, tie).contains(p);
            let once = flip_extension(&inst, p, mode, tie).unwrap().apply(&inst).unwrap();
            assert_ne!(rm_solution::<f64>(&once, mode, tie).contains(p), before);
            let twice = flip_extension(&once, p, mode, tie).unwrap().apply(&once).unwrap();
            assert_eq!(rm_solution::<f64>(&twice, mode, tie).contains(p), before);
        }
    }

    #[test]
    fn unknown_paragraph() {
        assert!(matches!(
            destabilizing_extension(&four_paragraphs(), ParagraphId(7), Direction::Out),
            Err(WelfareError::UnknownParagraph(_))
        ));
    }
}
