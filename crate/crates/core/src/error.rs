// Copyright 2026 the roughweyl authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the laboratory.
///
/// The variants map one-to-one onto the error codes of the C ABI and onto
/// the CLI exit codes (configuration problems exit with 3).
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A numerical procedure broke down.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A memory or work budget would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// Malformed or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// A postcondition that the construction guarantees did not hold.
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
