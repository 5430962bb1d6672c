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

//! # Madelung
//!
//! Electrostatic energy of neutral periodic lattices of point charges.
//!
//! Four routes to the same cell energy are provided:
//!
//! - direct truncated sums over expanding spheres or cubes ([`trunc`]),
//! - Ewald summation and the analytically continued Epstein zeta function ([`epstein`]),
//! - the charge-neutralized Wolf sphere sum, undamped and damped ([`wolf`]).
//!
//! The sphere sums are conditionally convergent and do not settle on a value;
//! cubes do for cells without a dipole moment, and the Wolf construction turns the
//! sphere sum into one that converges to the Ewald energy.
//!
//! Energies are in Gaussian units (charge²/length), without a 4πε₀ factor.

pub mod crystal;
pub mod epstein;
mod error;
pub mod harness;
pub mod special;
pub mod sum;
pub mod trunc;
pub mod wolf;

pub use crate::crystal::{LatticeBasis, PairOffset, Preset, Site, UnitCell};
pub use crate::error::{Error, Result};

/// Cartesian 3-vector.
pub type Vector3 = nalgebra::Vector3<f64>;
/// Real 3×3 matrix.
pub type Matrix3 = nalgebra::Matrix3<f64>;
