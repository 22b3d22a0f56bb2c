use crate::model::{EventLog, ParagraphId, VoteValue};

use super::Solution;

/// Includes every paragraph that received any event before the first
/// abstention on `sentinel`; the sentinel itself is never part of the output.
///
/// Once some agent abstains on the sentinel, the output is fixed for good.
pub fn sentinel_rule(log: &EventLog, sentinel: ParagraphId) -> Solution {
    let cut = log
        .iter()
        .position(|e| e.paragraph == sentinel && e.value == VoteValue::Abstain)
        .unwrap_or(log.len());
    log.events()[..cut]
        .iter()
        .map(|e| e.paragraph)
        .filter(|&p| p != sentinel)
        .collect()
}
