//! Error types.

use thiserror::Error;

use crate::lattice::MixedFieldError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("cannot parse scalar {0:?}")]
    Scalar(String),
    #[error("cannot parse vector {0:?}")]
    Vector(String),
    #[error("{0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error(transparent)]
    MixedField(#[from] MixedFieldError),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApartmentError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("Weyl generator {0} is not an invertible integer matrix of the right size")]
    BadWeylGenerator(usize),
    #[error("Weyl generator {0} does not permute the weight multiset")]
    WeylNotPermuting(usize),
    #[error("Weyl group closure exceeds the bound of {0} elements")]
    WeylTooLarge(usize),
    #[error("root index {0} is out of range")]
    BadRootIndex(usize),
    #[error("rank {rank} exceeds the configured bound {bound}")]
    RankBound { rank: usize, bound: usize },
    #[error("sign pattern does not partition the weight indices")]
    MalformedPattern,
    #[error("lattice map is {rows}x{cols}, expected {want_rows}x{want_cols}")]
    MapShape {
        rows: usize,
        cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("pulled-back weight {0} is not a character of the source datum")]
    Incompatible(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Apartment(#[from] ApartmentError),
    #[error("form is not invariant under Weyl generator {0}")]
    NotWeylInvariant(usize),
    #[error("lattice map is not injective over Q")]
    NotInjective,
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("spherical distance needs rational coordinates")]
    IrrationalInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GlError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("matrix has shape {rows}x{cols}, expected {n}x{n}")]
    Shape { rows: usize, cols: usize, n: usize },
    #[error("matrix is not invertible")]
    Singular,
    #[error("matrix is not an element of {0}")]
    NotInGroup(String),
    #[error("cocharacter is not valued in {0}")]
    CocharNotInGroup(String),
    #[error("point does not lie in the edifice of {0}")]
    PointNotInGroup(String),
    #[error("points live over different groups ({0} and {1})")]
    GroupMismatch(String, String),
    #[error("malformed group spec: {0}")]
    BadSpec(String),
    #[error("malformed point: {0}")]
    BadPoint(String),
    #[error("{0} is not a subgroup of {1}")]
    NotNested(String, String),
    #[error("the points have no common apartment")]
    NoCommonApartment,
    #[error("the points are not opposite")]
    NotOpposite,
    #[error("no limit as a -> 0")]
    NoLimit,
    #[error("element is not in the big cell")]
    NotInCell,
    #[error("unsupported group for {0}")]
    Unsupported(String),
    #[error("{0} is not a normal unipotent block of the group")]
    BadQuotient(String),
    #[error("cocharacters do not share P and U")]
    TransporterPrecondition,
    #[error("geodesic parameter must lie in [0, 1]")]
    BadParameter,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KempfError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Apartment(#[from] ApartmentError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("malformed state point: {0}")]
    BadPoint(String),
    #[error("the linear action has no weights")]
    NoWeights,
    #[error("the zero vector has no optimal cocharacter")]
    ZeroVector,
    #[error("torus orbit test needs rational coordinates")]
    IrrationalInput,
}
