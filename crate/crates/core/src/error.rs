use thiserror::Error;

use crate::graph::Violation;
use crate::transition::Condition;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("graph `{id}` is invalid: {}", join(.violations))]
    InvalidGraph { id: String, violations: Vec<Violation> },
    #[error("illegal transition {transition}: {condition}")]
    Illegal { transition: String, condition: Condition },
    #[error("illegal transition at step {step}: {source}")]
    IllegalAt {
        step: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("action cap of {0} transitions exceeded")]
    ActionCap(usize),
    #[error("no legal transition after {0} steps")]
    Stuck(usize),
    #[error("transition sequence ended before FINISH")]
    NotTerminal,
    #[error("state is terminal")]
    Terminal,
    #[error("gold graph is unreachable from the current state")]
    Unreachable,
    #[error("bilexical graph `{0}` is cyclic")]
    Cyclic(String),
    #[error("non-terminal {0} has no children, so it has no head")]
    NoHead(u32),
    #[error("graphs disagree on tokens ({0})")]
    TokenMismatch(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("model file: {0}")]
    Model(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
