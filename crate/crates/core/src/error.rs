use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("{context}: expected length {expected}, got {actual}")]
    ShapeMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("record {id}: unknown technique name {name:?}")]
    UnknownLabel { id: String, name: String },

    #[error("duplicate id {0:?}")]
    DuplicateId(String),

    #[error("malformed JSON: {0}")]
    Json(String),

    #[error("invalid record {id:?}: {reason}")]
    InvalidRecord { id: String, reason: String },

    #[error("class weights need at least one class with a positive count")]
    AllZeroCounts,

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("crop {x},{y} {w}x{h} is outside a {width}x{height} image")]
    CropOutOfBounds {
        x: usize,
        y: usize,
        w: usize,
        h: usize,
        width: usize,
        height: usize,
    },

    #[error("bad magic: expected {expected:?}")]
    BadMagic { expected: &'static str },

    #[error("truncated {what}: expected {expected} bytes, got {actual}")]
    Truncated {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid {what}: {reason}")]
    Format { what: &'static str, reason: String },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("example {0:?} has no labels or no features")]
    MissingExample(String),

    #[error("resampling: {0}")]
    Resample(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(alloc::format!("{e}"))
    }
}
