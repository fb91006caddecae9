use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("parse error at row {row}, column {col}: {message}")]
    Parse { row: usize, col: usize, message: String },
    #[error("map generation failed: {0}")]
    Generation(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("episode {episode} (seed {seed}) failed: {source}")]
    Episode {
        episode: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
