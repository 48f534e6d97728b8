//! Crate-wide error type.
//!
//! Every fallible operation returns [`Result`]. Variants are grouped by what
//! the caller can do about them: `Domain` means the mathematical inputs are
//! outside the range where the requested quantity is defined or proven,
//! `InvalidBody` means a body description failed validation, `Unsupported`
//! means the combination of options is recognised but not implemented, and
//! `Config` means the request itself is malformed (bad grids, empty inputs,
//! unreadable files).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Mathematically out of range: exponents outside proven intervals,
    /// evaluation points outside the body, degenerate directions.
    #[error("domain error: {0}")]
    Domain(String),

    /// A body description that does not define a convex body with the
    /// origin in its interior.
    #[error("invalid body: {0}")]
    InvalidBody(String),

    /// A recognised but unimplemented combination (for example product-rule
    /// quadrature in dimension 4).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// Malformed request: inconsistent options, grids too coarse to trust,
    /// empty record sets.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn invalid_body(msg: impl Into<String>) -> Self {
        Error::InvalidBody(msg.into())
    }

    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code for CLI use: 2 for configuration/input problems,
    /// 1 for everything else. (Verification failures are not errors; the
    /// CLI maps those to exit code 3 itself.)
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            _ => 1,
        }
    }
}
