use thiserror::Error;

use crate::decomposition::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on vertex `{vertex}`")]
    SelfLoop { line: usize, vertex: String },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("edge {0}-{1} is not present in the graph")]
    MissingEdge(String, String),

    #[error("no weight given for vertex `{0}`")]
    MissingWeight(String),

    #[error("annotation for `{name}` must be a positive integer, got {value}")]
    NonPositiveAnnotation { name: String, value: u64 },

    #[error("invalid tree decomposition: {}", format_violations(.0))]
    InvalidDecomposition(Vec<Violation>),

    #[error("decomposition node {0} does not exist")]
    UnknownNode(usize),

    #[error("decomposition does not match the graph: {0}")]
    Mismatch(String),

    #[error("component bound h must be at least 1")]
    ZeroComponentBound,

    #[error("bag of size {size} exceeds the supported maximum of {max}")]
    BagTooLarge { size: usize, max: usize },

    #[error("node {node} holds {count} states, above the configured cap of {cap}")]
    StateCapExceeded {
        node: usize,
        count: usize,
        cap: usize,
    },

    #[error("child signature has no entry for a required inherited state")]
    MissingInheritedState,

    #[error("witness recording was not enabled for this solve")]
    WitnessNotRecorded,

    #[error(
        "forbidden family member {0} has no edges; every graph with enough vertices contains it"
    )]
    EdgelessMember(usize),

    #[error("forbidden family is empty")]
    EmptyFamily,

    #[error("family member has {vertices} vertices, above the cap of {cap}")]
    PatternTooLarge { vertices: usize, cap: usize },

    #[error("family has {members} members, above the cap of {cap}")]
    FamilyTooLarge { members: usize, cap: usize },

    #[error("instance has {edges} edges; exhaustive search supports at most {max}")]
    TooManyEdges { edges: usize, max: usize },

    #[error("valid-state enumeration exceeded {0} states")]
    EnumerationLimit(usize),

    #[error("vertex count {0} is not divisible by 3")]
    NotDivisibleByThree(usize),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
