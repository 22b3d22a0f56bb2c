use rand::Rng;

use crate::model::{AgentId, EventLog, Instance, ParagraphId, VoteValue};

/// Size bounds for random instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceBounds {
    pub max_agents: u32,
    pub max_paragraphs: u32,
    pub max_events: usize,
}

impl Default for InstanceBounds {
    fn default() -> Self {
        InstanceBounds {
            max_agents: 6,
            max_paragraphs: 8,
            max_events: 60,
        }
    }
}

/// A random valid log over `1..=n` agents with ids starting at `first_agent`.
///
/// Each step either proposes a fresh paragraph (while under the cap) or casts
/// a uniformly random vote on an existing one.
pub fn random_log<R: Rng + ?Sized>(rng: &mut R, agents: u32, bounds: &InstanceBounds, len: usize) -> EventLog {
    let mut log = EventLog::new();
    let mut next = 1u32;
    for _ in 0..len {
        let a = AgentId(rng.random_range(1..=agents));
        let open = next <= bounds.max_paragraphs;
        if next == 1 || (open && rng.random_bool(0.25)) {
            log.push(a, ParagraphId(next), VoteValue::Approve)
                .expect("fresh proposal");
            next += 1;
            continue;
        }
        let p = ParagraphId(rng.random_range(1..next));
        let v = match rng.random_range(0..3) {
            0 => VoteValue::Approve,
            1 => VoteValue::Abstain,
            _ => VoteValue::Disapprove,
        };
        log.push(a, p, v).expect("existing paragraph");
    }
    log
}

pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, bounds: &InstanceBounds) -> Instance {
    let n = rng.random_range(1..=bounds.max_agents.max(1));
    let len = rng.random_range(0..=bounds.max_events);
    let log = random_log(rng, n, bounds, len);
    Instance::with_agents(n, log).expect("agents drawn from 1..=n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::populations::SimRng;
    use rand::SeedableRng;

    #[test]
    fn respects_bounds() {
        let mut rng = SimRng::seed_from_u64(3);
        let b = InstanceBounds::default();
        for _ in 0..300 {
            let inst = random_instance(&mut rng, &b);
            assert!(inst.n_agents() <= 6);
            assert!(inst.log().paragraphs().len() <= 8);
            assert!(inst.log().len() <= 60);
        }
    }
}
