//! Error type shared by every module in the crate.
//!
//! Each variant names a failure class; the payload carries a human-readable
//! detail string.  `Display` renders as `Class: detail` on a single line so
//! callers (including the CLI) can surface errors without further formatting.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A matrix was constructed or loaded with an impossible shape.
    #[error("InvalidShape: {0}")]
    InvalidShape(String),
    /// Two operands have incompatible dimensions.
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    /// A NaN or infinity was found where finite data is required.
    #[error("NonFiniteValue: {0}")]
    NonFiniteValue(String),
    /// A scalar or option argument violates its documented range.
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),

    /// The data admit no meaningful answer (e.g. all points identical).
    #[error("DegenerateData: {0}")]
    DegenerateData(String),
    /// A linear system is rank deficient and cannot be solved as requested.
    #[error("SingularSystem: {0}")]
    SingularSystem(String),
    /// The iterative singular value decomposition failed to converge.
    #[error("SvdFailed: {0}")]
    SvdFailed(String),
    /// A target column has (numerically) zero variance.
    #[error("ConstantTarget: {0}")]
    ConstantTarget(String),

    /// More neighbors were requested than the dataset can provide.
    #[error("KTooLarge: {0}")]
    KTooLarge(String),
    /// A neighborhood contains a zero distance (duplicate point).
    #[error("DegenerateNeighborhood: {0}")]
    DegenerateNeighborhood(String),
    /// Every point of a dataset had a degenerate neighborhood.
    #[error("AllDegenerate: {0}")]
    AllDegenerate(String),
    /// Too few usable radii to fit a scaling slope.
    #[error("InsufficientRange: {0}")]
    InsufficientRange(String),

    /// Not enough samples for the requested split or fit.
    #[error("TooFewSamples: {0}")]
    TooFewSamples(String),

    /// Trial counts are empty or sum to zero.
    #[error("EmptyCounts: {0}")]
    EmptyCounts(String),
    /// A variance argument is negative.
    #[error("NegativeVariance: {0}")]
    NegativeVariance(String),
    /// No stimulus has the repeated trials the estimator needs.
    #[error("NoRepeats: {0}")]
    NoRepeats(String),
    /// Paired sequences differ in length.
    #[error("LengthMismatch: {0}")]
    LengthMismatch(String),
    /// A noise ceiling lies outside its valid range.
    #[error("InvalidCeiling: {0}")]
    InvalidCeiling(String),

    /// An input vector is constant and the statistic is undefined.
    #[error("ConstantInput: {0}")]
    ConstantInput(String),
    /// Fewer items than groups (or other too-small collections).
    #[error("TooFewItems: {0}")]
    TooFewItems(String),
    /// Ties collapse a requested grouping into an empty group.
    #[error("TieCollapse: {0}")]
    TieCollapse(String),
    /// A matrix argument has the wrong shape for the operation.
    #[error("ShapeMismatch: {0}")]
    ShapeMismatch(String),
    /// A square matrix argument is not symmetric.
    #[error("NotSymmetric: {0}")]
    NotSymmetric(String),
    /// A required field or column is absent.
    #[error("MissingField: {0}")]
    MissingField(String),

    /// A synthetic-data specification is internally inconsistent.
    #[error("SpecError: {0}")]
    SpecError(String),

    /// A binary matrix file does not start with the expected magic bytes.
    #[error("BadMagic: {0}")]
    BadMagic(String),
    /// A binary matrix file ends before its declared payload.
    #[error("TruncatedPayload: {0}")]
    TruncatedPayload(String),
    /// A model manifest is malformed or references missing files.
    #[error("ManifestError: {0}")]
    ManifestError(String),
    /// A result table is malformed.
    #[error("TableError: {0}")]
    TableError(String),
    /// An underlying filesystem operation failed.
    #[error("IoError: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The failure class name, i.e. the part of `Display` before the colon.
    pub fn class(&self) -> &'static str {
        match self {
            Error::InvalidShape(_) => "InvalidShape",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFiniteValue(_) => "NonFiniteValue",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::DegenerateData(_) => "DegenerateData",
            Error::SingularSystem(_) => "SingularSystem",
            Error::SvdFailed(_) => "SvdFailed",
            Error::ConstantTarget(_) => "ConstantTarget",
            Error::KTooLarge(_) => "KTooLarge",
            Error::DegenerateNeighborhood(_) => "DegenerateNeighborhood",
            Error::AllDegenerate(_) => "AllDegenerate",
            Error::InsufficientRange(_) => "InsufficientRange",
            Error::TooFewSamples(_) => "TooFewSamples",
            Error::EmptyCounts(_) => "EmptyCounts",
            Error::NegativeVariance(_) => "NegativeVariance",
            Error::NoRepeats(_) => "NoRepeats",
            Error::LengthMismatch(_) => "LengthMismatch",
            Error::InvalidCeiling(_) => "InvalidCeiling",
            Error::ConstantInput(_) => "ConstantInput",
            Error::TooFewItems(_) => "TooFewItems",
            Error::TieCollapse(_) => "TieCollapse",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NotSymmetric(_) => "NotSymmetric",
            Error::MissingField(_) => "MissingField",
            Error::SpecError(_) => "SpecError",
            Error::BadMagic(_) => "BadMagic",
            Error::TruncatedPayload(_) => "TruncatedPayload",
            Error::ManifestError(_) => "ManifestError",
            Error::TableError(_) => "TableError",
            Error::Io(_) => "IoError",
        }
    }
}
