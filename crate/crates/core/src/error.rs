// Copyright 2026 The madelung authors
//
// Licensed under the Apache license, version 2.0 (the "license");
// you may not use this file except in compliance with the license.
// You may obtain a copy of the license at
//
//     http://www.apache.org/licenses/license-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the license is distributed on an "as is" basis,
// without warranties or conditions of any kind, either express or implied.
// See the license for the specific language governing permissions and
// limitations under the license.

use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate lattice basis: |det V| = {det:e} is below {threshold:e}")]
    DegenerateBasis { det: f64, threshold: f64 },
    #[error("unit cell is not charge neutral: total charge {total:e}")]
    NotNeutral { total: f64 },
    #[error("sites {first} and {second} coincide (image distance {distance:e})")]
    CoincidentSites {
        first: usize,
        second: usize,
        distance: f64,
    },
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("series did not converge: {0}")]
    NoConvergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
