use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
    #[error("duplicate point {0}")]
    DuplicatePoint(u32),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("invalid window [{i}, {j}] for {n} points")]
    InvalidWindow { i: u32, j: u32, n: u32 },
    #[error("alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("point indices must run 1..=n in order (found {found} at position {position})")]
    BadIndexing { position: usize, found: u32 },
    #[error("corrupt staircase input: {0}")]
    CorruptStaircase(String),
    #[error("enumeration invariant violated: {0}")]
    Enumeration(String),
    #[error("malformed input at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("archive: {0}")]
    Archive(String),
    #[error("empty dataset")]
    EmptyDataset,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
