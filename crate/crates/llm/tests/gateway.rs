use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::thread;
use std::time::Duration;

use ccr_core::fixtures::twenty_agents;
use ccr_core::model::{AgentId, ParagraphId, VoteValue};
use ccr_core::populations::{AgentAction, AgentView, Payload};
use ccr_core::rules::{RuleEvaluator, RuleSpec, StaticKernel};
use ccr_llm::datasets::{bundled_corpus, AgentProfile, DemographicCell};
use ccr_llm::parse::{parse_decision, validate_action, ActionError, DecisionKind, VoteToken};
use ccr_llm::prompt::{render_decision_prompt, render_system_prompt, PromptTemplates, GENERAL_HINT};
use ccr_llm::replay::PARAGRAPH_TEXTS;
use ccr_llm::{ChatRequest, ChatTransport, HttpConfig, HttpTransport, Retrying, ScriptedTransport, TransportError};

fn cell() -> DemographicCell {
    DemographicCell {
        sex: "Female".into(),
        age_group: "35–39".into(),
        education: "ISCED 2011, level 3 – upper secondary education".into(),
        weight: 1.0,
    }
}

fn request() -> ChatRequest {
    ChatRequest {
        model: "m".into(),
        temperature: 0.7,
        system: "s".into(),
        user: "u".into(),
    }
}

/// Agent 2's view after the first 37 events of the twenty-agent log.
fn view_after_37() -> AgentView {
    let inst = twenty_agents().prefix(37);
    let rule = RuleSpec::new(StaticKernel::Aps, 0.7);
    let mut ev = RuleEvaluator::<f64>::for_instance(&rule, &inst);
    for e in inst.log() {
        ev.step(e);
    }
    let payloads = BTreeMap::from([(ParagraphId(1), Payload::Text(PARAGRAPH_TEXTS[0].into()))]);
    AgentView::build(AgentId(2), ev.tally(), ev.solution(), &payloads)
}

#[test]
fn system_prompt_states_position() {
    let profile = AgentProfile::new(AgentId(2), &cell(), 0.05).unwrap();
    let s = render_system_prompt(&PromptTemplates::default(), &profile, "Climate change policy").unwrap();
    assert!(s.contains("0.05 (active resistance)"), "{s}");
    assert!(s.contains("35–39 years old female"));
    assert!(!s.contains("{{"));
}

#[test]
fn decision_prompt_renders_state_rows() {
    let view = view_after_37();
    let corpus = bundled_corpus();
    let shots: Vec<_> = corpus.entries().iter().take(3).cloned().collect();
    let t = PromptTemplates::default();
    let a = render_decision_prompt(&t, &view, &shots, GENERAL_HINT).unwrap();
    let b = render_decision_prompt(&t, &view, &shots, GENERAL_HINT).unwrap();
    assert_eq!(a, b);
    assert!(!a.contains("{{"));
    let row = a.lines().find(|l| l.starts_with("{'paragraph_id': 1,")).unwrap();
    assert!(row.contains("'votes_plus': 12, 'votes_minus': 5"), "{row}");
    assert!(row.contains("'own_vote': '-1'"));
    assert!(row.contains("'In document': 'yes'"));
    assert!(a.contains(GENERAL_HINT));
}

#[test]
fn next_event_round_trips() {
    let view = view_after_37();
    let raw = format!(
        "DECISION: PROPOSE\nPARAGRAPH ID: 2\nACTION DETAILS: {}\nVOTE: UPVOTE\nREASONING: Farmers need stability.\n",
        PARAGRAPH_TEXTS[1]
    );
    let d = parse_decision(&raw).unwrap();
    assert_eq!(d.decision, DecisionKind::Propose);
    assert_eq!(d.paragraph_id, 2);
    assert_eq!(d.vote, VoteToken::Upvote);
    assert_eq!(
        validate_action(&d, &view).unwrap(),
        AgentAction::Propose(Payload::Text(PARAGRAPH_TEXTS[1].into()))
    );
}

#[test]
fn illegal_votes_are_rejected() {
    let view = view_after_37();
    let vote = |token: &str, p: u32| {
        let raw = format!("DECISION: VOTE\nPARAGRAPH ID: {p}\nACTION DETAILS: x\nVOTE: {token}\nREASONING: r");
        validate_action(&parse_decision(&raw).unwrap(), &view)
    };
    // agent 2 currently holds -1 on p1
    assert_eq!(
        vote("DOWNVOTE", 1),
        Err(ActionError::RepeatedVote {
            paragraph: ParagraphId(1),
            vote: VoteToken::Downvote
        })
    );
    assert_eq!(vote("ABSTAIN", 1), Ok(AgentAction::Vote(ParagraphId(1), VoteValue::Abstain)));
    assert_eq!(vote("UPVOTE", 1), Ok(AgentAction::Vote(ParagraphId(1), VoteValue::Approve)));
    assert_eq!(vote("UPVOTE", 2), Err(ActionError::UnknownParagraph(ParagraphId(2))));

    let fresh = AgentView::build(AgentId(1), view_tally_one().tally(), &Default::default(), &BTreeMap::new());
    let raw = "DECISION: VOTE\nPARAGRAPH ID: 1\nACTION DETAILS: x\nVOTE: ABSTAIN\nREASONING: r";
    assert_eq!(
        validate_action(&parse_decision(raw).unwrap(), &fresh),
        Err(ActionError::IllegalAbstain(ParagraphId(1)))
    );
}

// agent 1 has never voted on the single paragraph proposed by agent 2
fn view_tally_one() -> RuleEvaluator<f64> {
    let inst = ccr_core::model::Instance::with_agents(
        2,
        ccr_core::model::EventLog::from_votes([(AgentId(2), ParagraphId(1), VoteValue::Approve)]).unwrap(),
    )
    .unwrap();
    let mut ev = RuleEvaluator::<f64>::for_instance(&RuleSpec::new(StaticKernel::Aps, 0.5), &inst);
    for e in inst.log() {
        ev.step(e);
    }
    ev
}

#[test]
fn retries_transient_failures() {
    let flaky = ScriptedTransport::with_outcomes([
        Err(TransportError::Transport {
            message: "reset".into(),
            transient: true,
        }),
        Err(TransportError::RateLimited {
            retry_after: Some(Duration::from_millis(1)),
        }),
        Ok("done".into()),
    ]);
    let mut t = Retrying::new(flaky, 2).with_delays(Duration::from_millis(1), Duration::from_millis(5));
    assert_eq!(t.complete(&request()).unwrap(), "done");
    assert_eq!(t.inner().requests.len(), 3);

    let auth = ScriptedTransport::with_outcomes([Err(TransportError::Auth("no".into())), Ok("x".into())]);
    let mut t = Retrying::new(auth, 5).with_delays(Duration::from_millis(1), Duration::from_millis(1));
    assert!(matches!(t.complete(&request()), Err(TransportError::Auth(_))));
    assert_eq!(t.inner().remaining(), 1);
}

#[test]
fn missing_key_fails_before_network() {
    let cfg = HttpConfig {
        base_url: "http://127.0.0.1:9".into(),
        ..HttpConfig::default()
    };
    let err = HttpTransport::from_env_var(&cfg, "CCR_TEST_SURELY_UNSET_KEY").unwrap_err();
    assert!(matches!(err, TransportError::Auth(_)));
    assert!(matches!(HttpTransport::new(&cfg, "  "), Err(TransportError::Auth(_))));
}

/// Serves one canned HTTP response per connection, returning the request bodies.
fn serve(responses: Vec<String>) -> (String, thread::JoinHandle<Vec<String>>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let mut bodies = Vec::new();
        for resp in responses {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut len = 0;
            let mut chunked = false;
            let mut auth = String::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                let l = line.trim_end();
                if l.is_empty() {
                    break;
                }
                let lower = l.to_ascii_lowercase();
                if let Some(v) = lower.strip_prefix("content-length:") {
                    len = v.trim().parse().unwrap();
                }
                if lower.starts_with("transfer-encoding:") && lower.contains("chunked") {
                    chunked = true;
                }
                if lower.starts_with("authorization:") {
                    auth = l.to_string();
                }
            }
            let mut body = vec![0; len];
            reader.read_exact(&mut body).unwrap();
            while chunked {
                let mut size = String::new();
                reader.read_line(&mut size).unwrap();
                let n = usize::from_str_radix(size.trim(), 16).unwrap();
                let mut chunk = vec![0; n + 2];
                reader.read_exact(&mut chunk).unwrap();
                body.extend_from_slice(&chunk[..n]);
                chunked = n > 0;
            }
            bodies.push(format!("{auth}\n{}", String::from_utf8(body).unwrap()));
            let mut stream = stream;
            stream.write_all(resp.as_bytes()).unwrap();
            stream.flush().unwrap();
        }
        bodies
    });
    (url, handle)
}

fn http(status: &str, extra: &str, body: &str) -> String {
    format!(
        "HTTP/1.1 {status}\r\ncontent-type: application/json\r\n{extra}content-length: {}\r\nconnection: close\r\n\r\n{body}",
        body.len()
    )
}

#[test]
fn http_status_mapping() {
    let ok = r#"{"choices":[{"message":{"role":"assistant","content":"DECISION: VOTE"}}]}"#;
    let (url, server) = serve(vec![
        http("401 Unauthorized", "", "{}"),
        http("429 Too Many Requests", "retry-after: 2\r\n", "{}"),
        http("503 Service Unavailable", "", "busy"),
        http("200 OK", "", ok),
    ]);
    let cfg = HttpConfig {
        base_url: url,
        timeout: Duration::from_secs(10),
    };
    let mut t = HttpTransport::new(&cfg, "sk-test").unwrap();
    assert!(matches!(t.complete(&request()), Err(TransportError::Auth(_))));
    assert_eq!(
        t.complete(&request()),
        Err(TransportError::RateLimited {
            retry_after: Some(Duration::from_secs(2))
        })
    );
    let e = t.complete(&request()).unwrap_err();
    assert!(e.is_transient(), "{e:?}");
    assert_eq!(t.complete(&request()).unwrap(), "DECISION: VOTE");

    let bodies = server.join().unwrap();
    assert_eq!(bodies.len(), 4);
    let (auth, body) = bodies[3].split_once('\n').unwrap();
    assert!(auth.ends_with("Bearer sk-test"), "{auth}");
    let body: serde_json::Value = serde_json::from_str(body).unwrap();
    assert_eq!(body["messages"][0]["role"], "system");
    assert_eq!(body["messages"][1]["content"], "u");
    assert_eq!(body["temperature"], 0.7);
}
