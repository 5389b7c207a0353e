use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("the {0} class has no training examples")]
    EmptyClass(&'static str),
    #[error("non-finite feature value in training example {0}")]
    NonFiniteFeature(usize),
    #[error("unsupported configuration: {0}")]
    Unsupported(&'static str),
    #[error("requested {requested} known positives but only {available} are available")]
    NotEnoughPositives { requested: usize, available: usize },
    #[error("metric needs at least one positive and one negative label")]
    SingleClass,
    #[error("score and label lengths differ ({scores} vs {labels})")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("no usable pairs")]
    NoUsablePairs,
    #[error("only {0} usable pairs, the normal approximation needs at least 6")]
    TooFewPairs(usize),
    #[error("{groups} groups cannot fill {folds} folds")]
    TooFewGroups { groups: usize, folds: usize },
    #[error("empty parameter grid")]
    EmptyGrid,
}
