use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input sequence is empty")]
    EmptyInput,

    #[error("value {value} at index {index} does not fit in {width} bits")]
    ValueOverflow { index: usize, value: u64, width: u32 },

    #[error("width {0} is outside the supported range 1..=64")]
    WidthOutOfRange(u32),

    #[error("column {column} out of range for width {width}")]
    ColumnOutOfRange { column: u32, width: u32 },

    #[error("bank count {banks} does not divide array length {n}")]
    BankMismatch { banks: usize, n: usize },

    #[error("invalid dataset spec: {0}")]
    InvalidSpec(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("malformed trace: {0}")]
    MalformedTrace(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
