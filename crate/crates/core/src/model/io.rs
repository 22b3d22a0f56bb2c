//! Plain-text event log files.
//!
//! ```text
//! #ccr-eventlog v1
//! 1,2,1,+1
//! 2,1,1,+1
//! ```
//!
//! One `seq,agent,paragraph,value` line per event. Agents and paragraphs are
//! written as bare integers; `seq` must be contiguous from 1.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{AgentId, EventLog, ModelError, ParagraphId, VoteValue};

pub const EVENT_LOG_HEADER: &str = "#ccr-eventlog v1";

pub fn write_event_log<W: Write>(log: &EventLog, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{EVENT_LOG_HEADER}")?;
    for e in log {
        writeln!(out, "{},{},{},{}", e.seq, e.agent.0, e.paragraph.0, e.value)?;
    }
    Ok(())
}

pub fn parse_event_log(text: &str) -> Result<EventLog, ModelError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == EVENT_LOG_HEADER => {}
        Some((_, h)) => {
            return Err(ModelError::Format {
                line: 1,
                reason: format!("expected header {EVENT_LOG_HEADER:?}, found {h:?}"),
            })
        }
        None => {
            return Err(ModelError::Format {
                line: 1,
                reason: "empty file".into(),
            })
        }
    }
    let mut log = EventLog::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(ModelError::Format {
                line,
                reason: format!("expected 4 fields, found {}", fields.len()),
            });
        }
        let int = |s: &str, what: &str| -> Result<u32, ModelError> {
            s.parse::<u32>().map_err(|_| ModelError::Format {
                line,
                reason: format!("bad {what} {s:?}"),
            })
        };
        let seq = fields[0].parse::<usize>().map_err(|_| ModelError::Format {
            line,
            reason: format!("bad seq {:?}", fields[0]),
        })?;
        if seq != log.len() + 1 {
            return Err(ModelError::Format {
                line,
                reason: format!("seq {seq} breaks contiguity (expected {})", log.len() + 1),
            });
        }
        let agent = AgentId(int(fields[1], "agent")?);
        let paragraph = ParagraphId(int(fields[2], "paragraph")?);
        let value: VoteValue = fields[3].parse().map_err(|_| ModelError::Format {
            line,
            reason: format!("bad value {:?}", fields[3]),
        })?;
        log.push(agent, paragraph, value)?;
    }
    Ok(log)
}

pub fn read_event_log(path: &Path) -> Result<EventLog, ModelError> {
    parse_event_log(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use VoteValue::*;

    #[test]
    fn writes_the_documented_layout() {
        let log = EventLog::from_votes([
            (AgentId(2), ParagraphId(1), Approve),
            (AgentId(1), ParagraphId(1), Disapprove),
            (AgentId(1), ParagraphId(1), Abstain),
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_event_log(&log, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "#ccr-eventlog v1\n1,2,1,+1\n2,1,1,-1\n3,1,1,0\n"
        );
    }

    #[test]
    fn rejects_missing_header_and_gaps() {
        assert!(matches!(
            parse_event_log("1,1,1,+1\n"),
            Err(ModelError::Format { line: 1, .. })
        ));
        assert!(matches!(
            parse_event_log("#ccr-eventlog v1\n1,1,1,+1\n3,1,1,0\n"),
            Err(ModelError::Format { line: 3, .. })
        ));
    }

    #[test]
    fn enforces_proposal_rule_on_load() {
        assert!(matches!(
            parse_event_log("#ccr-eventlog v1\n1,1,4,-1\n"),
            Err(ModelError::NewParagraphNotApproval { .. })
        ));
    }
}
