use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("anti-unitary flags are not a homomorphism to Z2: s({a})+s({b}) != s({ab})")]
    FlagInconsistent { a: usize, b: usize, ab: usize },
    #[error("unitary elements do not form a halving subgroup ({unitary} of {order})")]
    NoHalvingSubgroup { unitary: usize, order: usize },
    #[error("invalid subgroup chain entry {index}: {reason}")]
    InvalidSubgroupChain { index: usize, reason: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("group is purely unitary; no anti-unitary element T0")]
    NoT0,
    #[error("element {0} is not in the requested subgroup")]
    ElementNotInSubgroup(usize),
    #[error("element {0} is anti-unitary where a unitary element is required")]
    NotUnitaryElement(usize),
    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error(
        "matrices do not commute (commutator norm {norm:.3e} between family members {a} and {b})"
    )]
    NotCommuting { a: usize, b: usize, norm: f64 },
    #[error("matrix is not a symmetric unitary (residual {0:.3e})")]
    NotSymmetricUnitary(f64),
    #[error("matrix is not idempotent (residual {0:.3e})")]
    NotIdempotent(f64),
    #[error("projector trace {0} is not an integer")]
    TraceNotInteger(f64),
    #[error("invalid co-representation: {0}")]
    InvalidCoRep(String),
    #[error("co-representation is not irreducible (criterion {0})")]
    NotIrreducible(f64),
    #[error("torsion indicator {0} is not quantized")]
    IndicatorNotQuantized(f64),
    #[error("reduction failed after {attempts} attempts: {reason}")]
    ReductionFailed { attempts: usize, reason: String },
    #[error("probe action matrix for element {0} is singular")]
    SingularAction(usize),
    #[error("invalid probe action: {0}")]
    InvalidAction(String),
    #[error("multiplicity {0} is not an integer")]
    NonIntegerMultiplicity(f64),
    #[error("channel has zero multiplicity")]
    EmptyChannel,
    #[error("could not fix the T0 gauge on the coupling subspace (residual {0:.3e})")]
    GaugeFixFailed(f64),
    #[error("embedding is not a subgroup embedding: {0}")]
    NotASubgroupEmbedding(String),
    #[error("unknown catalog entry {0:?}")]
    UnknownName(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
