use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("trivial class: the basis contains {0}, so the class does not contain both 12 and 21")]
    TrivialClass(String),
    #[error("basis is not an antichain: {small} is a pattern of {large}")]
    NotAntichain { small: String, large: String },
    #[error("equation cap exceeded: more than {cap} equations (set PERMSPEC_MAX_EQUATIONS to raise it)")]
    TooManyEquations { cap: usize },
    #[error("the specification is not disjoint at equation {0}")]
    NotDisjoint(String),
    #[error("no object of size {n} in {what}")]
    NoObject { n: usize, what: String },
    #[error("size {n} exceeds the table bound {bound}")]
    BeyondTables { n: usize, bound: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
