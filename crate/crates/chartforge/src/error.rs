use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dangling reference: {0}")]
    DanglingReference(String),
    #[error("label {label} out of range for degree {n}")]
    LabelOutOfRange { label: u32, n: u32 },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("not incident: {0}")]
    NotIncident(String),
    #[error("complement component is not a disk: {0}")]
    NotCellular(String),
    #[error("stale move site: {0}")]
    StaleSite(String),
    #[error("move produced an invalid chart: {0}")]
    InvalidResult(String),
    #[error("blocked path: {0}")]
    BlockedPath(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("rulebase incomplete: {0}")]
    RulebaseIncomplete(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
