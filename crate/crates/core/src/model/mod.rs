//! The event-sourced data model.
//!
//! An [`EventLog`] is the only source of truth: stance matrices, tallies,
//! solutions and metrics are all derived from it by replay.

mod io;
mod live;
mod log;
mod stance;
mod tally;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use self::io::{parse_event_log, read_event_log, write_event_log, EVENT_LOG_HEADER};
pub use self::live::LiveTally;
pub use self::log::{Event, EventLog, Instance};
pub use self::stance::{active_agents, stance_of, undo_list, StanceMatrix};
pub use self::tally::{tally_of, vote_weights, ParagraphTally, Tally, WeightMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AgentId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParagraphId(pub u32);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl fmt::Display for ParagraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl ParagraphId {
    pub fn next(self) -> ParagraphId {
        ParagraphId(self.0 + 1)
    }
}

/// A single vote: approve, withdraw, or disapprove.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VoteValue {
    Approve,
    Abstain,
    Disapprove,
}

impl VoteValue {
    pub fn as_i8(self) -> i8 {
        match self {
            VoteValue::Approve => 1,
            VoteValue::Abstain => 0,
            VoteValue::Disapprove => -1,
        }
    }

    pub fn from_i8(v: i8) -> Option<VoteValue> {
        match v {
            1 => Some(VoteValue::Approve),
            0 => Some(VoteValue::Abstain),
            -1 => Some(VoteValue::Disapprove),
            _ => None,
        }
    }

    pub fn is_nonzero(self) -> bool {
        self != VoteValue::Abstain
    }
}

impl fmt::Display for VoteValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VoteValue::Approve => "+1",
            VoteValue::Abstain => "0",
            VoteValue::Disapprove => "-1",
        })
    }
}

impl FromStr for VoteValue {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+1" | "1" => Ok(VoteValue::Approve),
            "0" | "+0" | "-0" => Ok(VoteValue::Abstain),
            "-1" => Ok(VoteValue::Disapprove),
            other => Err(ModelError::BadVoteValue(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("paragraph {paragraph} enters the log with value {value}; a proposal must be an approval")]
    NewParagraphNotApproval {
        paragraph: ParagraphId,
        value: VoteValue,
    },
    #[error("agent {0} is not part of the instance")]
    UnknownAgent(AgentId),
    #[error("paragraph {0} does not appear in the log")]
    UnknownParagraph(ParagraphId),
    #[error("invalid vote value {0:?}")]
    BadVoteValue(String),
    #[error("event log line {line}: {reason}")]
    Format { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
