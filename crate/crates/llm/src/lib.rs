//! Persona agents backed by a chat model: demographic profiles, prompt
//! rendering, response parsing and validation, HTTP transport with retries,
//! and an offline deterministic mock.

pub mod datasets;
pub mod fewshot;
pub mod mock;
pub mod parse;
pub mod policy;
pub mod prompt;
pub mod replay;
pub mod sentiment;
pub mod transport;

pub use mock::PersonaMock;
pub use policy::{AuditRecord, LlmPolicy, LlmSettings};
pub use sentiment::SentimentCategory;
pub use transport::{ChatRequest, ChatTransport, HttpConfig, HttpTransport, Retrying, ScriptedTransport, TransportError};
