use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AtgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("X check row {x_row} and Z check row {z_row} overlap on an odd number of qubits")]
    NotOrthogonal { x_row: usize, z_row: usize },

    #[error("{matrix} is rank deficient (rank {rank} < {rows} rows)")]
    RankDeficient {
        matrix: &'static str,
        rank: usize,
        rows: usize,
    },

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("infeasible configuration: {0}")]
    Infeasible(String),

    #[error("syndrome is not in the image of the check matrix")]
    InconsistentSyndrome,

    #[error("stabilizer factorization failed for {label}: stray support on {stray} vertices")]
    Factorization { label: String, stray: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AtgError {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            AtgError::Dimension(_)
            | AtgError::NotOrthogonal { .. }
            | AtgError::RankDeficient { .. }
            | AtgError::InvalidConfig(_)
            | AtgError::Schema { .. } => 2,
            AtgError::CapExceeded { .. } | AtgError::Infeasible(_) => 3,
            AtgError::InconsistentSyndrome
            | AtgError::Factorization { .. }
            | AtgError::Internal(_) => 4,
            AtgError::Io { .. } => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, AtgError>;
