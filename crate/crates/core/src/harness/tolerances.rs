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

//! Thresholds of the verification suites and acceptance tests.
//!
//! Bump [`VERSION`] whenever a value changes.

pub const VERSION: u32 = 1;

/// Requested accuracy of reference Ewald energies.
pub const EWALD_TARGET: f64 = 1e-12;
/// Pairwise agreement of Ewald energies at different α (relative).
pub const EWALD_ALPHA_INVARIANCE: f64 = 1e-10;
/// Ewald energy against the expanding-cube direct sum at M = 30 (absolute).
pub const EWALD_VS_CUBE: f64 = 1e-6;
/// Continuation at s = 1 against Ewald (absolute).
pub const CONTINUATION_VS_EWALD: f64 = 1e-8;
/// Continuation against smooth-cutoff direct sums (relative).
pub const CONTINUATION_VS_DIRECT: f64 = 1e-8;
/// ζ_{μA}(s, μd) against μ^{−s} ζ_A(s, d) (relative).
pub const HOMOGENEITY: f64 = 1e-10;
/// Variation of ζ over the split parameter (relative).
pub const SPLIT_INVARIANCE: f64 = 1e-10;
/// Λ_A(s, 0) against Λ_B(3 − s, 0) (relative).
pub const FUNCTIONAL_EQUATION: f64 = 1e-8;
/// Residue at s = 3 against 4π / det A (relative).
pub const RESIDUE: f64 = 1e-3;
/// Half-width of the symmetric difference used by the residue estimate.
pub const RESIDUE_EPS: f64 = 1e-2;
/// Sphere sums against the naive reference, relative to the absolute term sum.
pub const NAIVE_SPHERE: f64 = 1e-10;
/// Site permutations (relative).
pub const PERMUTATION: f64 = 1e-12;
/// Wolf energy at R = 40 against Ewald (relative to |E|).
pub const WOLF_AT_40: f64 = 1e-3;
/// Required ratio of early to late windowed Wolf errors.
pub const WOLF_WINDOW_RATIO: f64 = 2.0;
/// Required ratio of raw sphere spread to Wolf spread.
pub const SPHERE_TO_WOLF_SPREAD: f64 = 10.0;
/// Neutralized sum at R = 40 against the continuation (absolute).
pub const THEOREM_AT_40: f64 = 1e-3;
/// Damped biases at α = 0.5 and 1.0 must differ by more than this.
pub const DAMPED_ALPHA_SEPARATION: f64 = 1e-3;
/// Damped energy at α = 1e-4 against the undamped one, R = 40 (absolute).
pub const DAMPED_SMALL_ALPHA: f64 = 2e-3;

/// All entries, for reports.
pub const TABLE: &[(&str, f64)] = &[
    ("ewald_target", EWALD_TARGET),
    ("ewald_alpha_invariance", EWALD_ALPHA_INVARIANCE),
    ("ewald_vs_cube", EWALD_VS_CUBE),
    ("continuation_vs_ewald", CONTINUATION_VS_EWALD),
    ("continuation_vs_direct", CONTINUATION_VS_DIRECT),
    ("homogeneity", HOMOGENEITY),
    ("split_invariance", SPLIT_INVARIANCE),
    ("functional_equation", FUNCTIONAL_EQUATION),
    ("residue", RESIDUE),
    ("residue_eps", RESIDUE_EPS),
    ("naive_sphere", NAIVE_SPHERE),
    ("permutation", PERMUTATION),
    ("wolf_at_40", WOLF_AT_40),
    ("wolf_window_ratio", WOLF_WINDOW_RATIO),
    ("sphere_to_wolf_spread", SPHERE_TO_WOLF_SPREAD),
    ("theorem_at_40", THEOREM_AT_40),
    ("damped_alpha_separation", DAMPED_ALPHA_SEPARATION),
    ("damped_small_alpha", DAMPED_SMALL_ALPHA),
];
