use serde::Serialize;
use thiserror::Error;

/// A single broken metric axiom, reported with the offending labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Violation {
    NegativeEntry { i: String, j: String },
    AsymmetricPair { i: String, j: String },
    NonzeroDiagonal { i: String },
    ZeroOffDiagonal { i: String, j: String },
    /// `d(i, k) > d(i, j) + d(j, k)`.
    TriangleViolation { i: String, j: String, k: String },
}

impl Violation {
    pub fn code(&self) -> &'static str {
        match self {
            Violation::NegativeEntry { .. } => "NegativeEntry",
            Violation::AsymmetricPair { .. } => "AsymmetricPair",
            Violation::NonzeroDiagonal { .. } => "NonzeroDiagonal",
            Violation::ZeroOffDiagonal { .. } => "ZeroOffDiagonal",
            Violation::TriangleViolation { .. } => "TriangleViolation",
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NegativeEntry { i, j } => write!(f, "negative entry at ({i}, {j})"),
            Violation::AsymmetricPair { i, j } => write!(f, "d({i}, {j}) != d({j}, {i})"),
            Violation::NonzeroDiagonal { i } => write!(f, "d({i}, {i}) != 0"),
            Violation::ZeroOffDiagonal { i, j } => write!(f, "d({i}, {j}) = 0 for distinct points"),
            Violation::TriangleViolation { i, j, k } => {
                write!(f, "d({i}, {k}) > d({i}, {j}) + d({j}, {k})")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },
    #[error("matrix has {violations} metric violation(s); first: {first}", violations = .0.len(), first = .0[0])]
    Invalid(Vec<Violation>),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),
    #[error("malformed document: {0}")]
    Document(String),
    #[error("label sets differ")]
    LabelMismatch,
    #[error("subset is empty")]
    EmptySubset,
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("subset needs at least 2 points, got {0}")]
    SubsetTooSmall(usize),
    #[error("constant must be positive, got {0}")]
    NonpositiveConstant(String),

    #[error("bridge {bridge} is smaller than the sup-distance {sup_dist}")]
    BridgeTooSmall { bridge: String, sup_dist: String },
    #[error("bridge must be positive, got {0}")]
    NonpositiveBridge(String),
    #[error("label sets do not intersect")]
    DisjointLabelSets,
    #[error("metrics disagree on the shared pair ({0}, {1})")]
    OverlapDisagreement(String, String),
    #[error("label {0:?} occurs in more than one input")]
    LabelCollision(String),
    #[error("separation must be positive, got {0}")]
    NonpositiveSeparation(String),
    #[error("anchor {0:?} is not a point of its space")]
    UnknownAnchor(String),
    #[error("family is empty")]
    EmptyFamily,
    #[error("invalid subset family: {0}")]
    FamilyInvalid(String),
    #[error("all target metrics already agree with the base metric (eta = 0)")]
    ZeroEta,
    #[error("label {0:?} of the subset is not a point of the space")]
    SubsetNotContained(String),

    #[error("no admissible tuple size fits in a space of {points} point(s)")]
    ArityExceedsSpace { points: usize },
    #[error("parameter must be positive: {0}")]
    NonpositiveParameter(String),
    #[error("space needs at least 2 points")]
    SpaceTooSmall,
    #[error("tuple repeats a point")]
    TupleNotInjective,
    #[error("tuple needs at least 3 points, got {0}")]
    ArityTooSmall(usize),
    #[error("unknown descriptor {0:?}")]
    UnknownDescriptor(String),
    #[error("cannot parse expression: {0}")]
    Expression(String),
    #[error("exponent {0} is not a small positive rational")]
    UnsupportedExponent(String),

    #[error("parameter {0:?} has no singular witnesses")]
    NotSingular(String),
    #[error("no cluster of {size} points with diameter below {bound}")]
    NoSmallCluster { size: usize, bound: String },
    #[error("spaces have {0} and {1} points")]
    CardinalityMismatch(usize, usize),
    #[error("{0} points exceed the exhaustive-search limit of {1}")]
    TooLarge(usize, usize),
    #[error("target has {target} points but the space only {space}")]
    TargetTooLarge { target: usize, space: usize },
    #[error("target metric is degenerate")]
    DegenerateTarget,
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        use Error::*;
        match self {
            NonSquare { .. } => "NonSquare",
            Invalid(v) if v.len() == 1 => v[0].code(),
            Invalid(_) => "InvalidMetric",
            DuplicateLabel(_) => "DuplicateLabel",
            ParseScalar(_) => "ParseScalar",
            Document(_) => "Document",
            LabelMismatch => "LabelMismatch",
            EmptySubset => "EmptySubset",
            UnknownLabel(_) => "UnknownLabel",
            SubsetTooSmall(_) => "SubsetTooSmall",
            NonpositiveConstant(_) => "NonpositiveConstant",
            BridgeTooSmall { .. } => "BridgeTooSmall",
            NonpositiveBridge(_) => "NonpositiveBridge",
            DisjointLabelSets => "DisjointLabelSets",
            OverlapDisagreement(..) => "OverlapDisagreement",
            LabelCollision(_) => "LabelCollision",
            NonpositiveSeparation(_) => "NonpositiveSeparation",
            UnknownAnchor(_) => "UnknownAnchor",
            EmptyFamily => "EmptyFamily",
            FamilyInvalid(_) => "FamilyInvalid",
            ZeroEta => "ZeroEta",
            SubsetNotContained(_) => "SubsetNotContained",
            ArityExceedsSpace { .. } => "ArityExceedsSpace",
            NonpositiveParameter(_) => "NonpositiveParameter",
            SpaceTooSmall => "SpaceTooSmall",
            TupleNotInjective => "TupleNotInjective",
            ArityTooSmall(_) => "ArityTooSmall",
            UnknownDescriptor(_) => "UnknownDescriptor",
            Expression(_) => "Expression",
            UnsupportedExponent(_) => "UnsupportedExponent",
            NotSingular(_) => "NotSingular",
            NoSmallCluster { .. } => "NoSmallCluster",
            CardinalityMismatch(..) => "CardinalityMismatch",
            TooLarge(..) => "TooLarge",
            TargetTooLarge { .. } => "TargetTooLarge",
            DegenerateTarget => "DegenerateTarget",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
