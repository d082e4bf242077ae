use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty compact set")]
    EmptyCompactSet,
    #[error("covering infeasible at tolerance")]
    CoveringInfeasible,
    #[error("unknown map kind: {0}")]
    UnknownMap(String),
    #[error("not acyclic")]
    NotAcyclic,
    #[error("unbalanced boundary: positive mass {positive}, negative mass {negative}")]
    Unbalanced { positive: f64, negative: f64 },
    #[error("invalid interval: a = {a} > b = {b}")]
    InvalidInterval { a: f64, b: f64 },
    #[error("mutually singular endpoints required")]
    NotMutuallySingular,
    #[error("below irrigability threshold")]
    BelowIrrigabilityThreshold,
    #[error("atom off sphere at distance {0}")]
    AtomOffSphere(f64),
    #[error("alpha = {alpha} violates sphere threshold {threshold}")]
    SphereThreshold { alpha: f64, threshold: f64 },
    #[error("not a sub-measure")]
    NotSubMeasure,
    #[error("instance exceeds oracle bound")]
    OracleRange,
    #[error("no convergence after {iterations} iterations (best objective {best})")]
    NoConvergence { iterations: usize, best: f64 },
    #[error("path exits grid box")]
    OutsideGrid,
    #[error("multiplicity hypothesis violated: {0}")]
    MultiplicityHypothesis(String),
    #[error("smallness constraint violated: {0}")]
    Smallness(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("oracle range exceeded at n = {n}")]
    TrialOracleRange { n: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
