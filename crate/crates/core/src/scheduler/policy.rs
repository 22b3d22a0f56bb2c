use std::collections::BTreeMap;
use std::io::Write;

use crate::model::AgentId;
use crate::populations::{
    euclidean_step, unstructured_step, write_population, AgentAction, AgentView, EuclideanAgent, SimRng, R_MIN,
};

pub enum Decision {
    Act(AgentAction),
    /// The turn produced nothing usable; no event is consumed.
    Skip(String),
}

/// Decides actions for a whole population, one selected agent at a time.
pub trait AgentPolicy: Send {
    fn decide(
        &mut self,
        view: &AgentView,
        rng: &mut SimRng,
    ) -> Result<Decision, Box<dyn std::error::Error + Send + Sync>>;

    /// Population snapshot for the run directory, if the policy has one.
    fn write_population(&self, _out: &mut dyn Write) -> std::io::Result<bool> {
        Ok(false)
    }

    /// Extra audit metadata merged into the run's audit record.
    fn audit(&self) -> serde_json::Value {
        serde_json::Value::Null
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct UnstructuredPolicy;

impl AgentPolicy for UnstructuredPolicy {
    fn decide(
        &mut self,
        view: &AgentView,
        rng: &mut SimRng,
    ) -> Result<Decision, Box<dyn std::error::Error + Send + Sync>> {
        Ok(Decision::Act(unstructured_step(view, rng)))
    }
}

#[derive(Clone, Debug)]
pub struct EuclideanPolicy {
    agents: BTreeMap<AgentId, EuclideanAgent>,
    pub r_min: f64,
}

impl EuclideanPolicy {
    pub fn new(agents: &[EuclideanAgent]) -> Self {
        EuclideanPolicy {
            agents: agents.iter().map(|a| (a.id, *a)).collect(),
            r_min: R_MIN,
        }
    }

    pub fn agents(&self) -> impl Iterator<Item = &EuclideanAgent> {
        self.agents.values()
    }
}

impl AgentPolicy for EuclideanPolicy {
    fn decide(
        &mut self,
        view: &AgentView,
        rng: &mut SimRng,
    ) -> Result<Decision, Box<dyn std::error::Error + Send + Sync>> {
        let agent = self
            .agents
            .get(&view.agent)
            .ok_or_else(|| format!("no interval for agent {}", view.agent))?;
        Ok(Decision::Act(euclidean_step(agent, view, rng, self.r_min)))
    }

    fn write_population(&self, out: &mut dyn Write) -> std::io::Result<bool> {
        let agents: Vec<EuclideanAgent> = self.agents.values().copied().collect();
        write_population(&agents, out).map_err(std::io::Error::other)?;
        Ok(true)
    }
}
