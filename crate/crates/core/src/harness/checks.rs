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

//! Built-in verification suites.
//!
//! Every suite is deterministic: random cells come from fixed seeds, and thresholds
//! come from [`tolerances`](super::tolerances).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::reference;
use super::tolerances as tol;
use crate::epstein::{
    cell_energy_s, completed_lambda, epstein_zeta, epstein_zeta_split, ewald_cell_energy, residue_estimate,
    EwaldParams, ZetaContext,
};
use crate::trunc::{truncated_sum, TruncationRegion};
use crate::{wolf, Error, LatticeBasis, Matrix3, Preset, Result, UnitCell, Vector3};

/// One verified quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub measured: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// A recorded quantity that is reported but not asserted.
#[derive(Debug, Clone, PartialEq)]
pub struct Note {
    pub id: String,
    pub measured: f64,
    pub reference: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub suite: String,
    pub checks: Vec<Check>,
    pub notes: Vec<Note>,
}

impl CheckReport {
    pub fn new(suite: &str) -> Self {
        CheckReport { suite: suite.to_string(), checks: Vec::new(), notes: Vec::new() }
    }

    /// Conjunction of all check flags.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// |measured − reference| ≤ tolerance.
    pub fn absolute(&mut self, id: impl Into<String>, measured: f64, reference: f64, tolerance: f64) {
        let pass = (measured - reference).abs() <= tolerance;
        self.checks.push(Check { id: id.into(), measured, reference, tolerance, pass });
    }

    /// |measured − reference| ≤ tolerance · |reference|.
    pub fn relative(&mut self, id: impl Into<String>, measured: f64, reference: f64, tolerance: f64) {
        let pass = (measured - reference).abs() <= tolerance * reference.abs();
        self.checks.push(Check { id: id.into(), measured, reference, tolerance, pass });
    }

    /// measured < bound; the reference column holds the bound.
    pub fn below(&mut self, id: impl Into<String>, measured: f64, bound: f64) {
        let pass = measured < bound;
        self.checks.push(Check { id: id.into(), measured, reference: bound, tolerance: 0.0, pass });
    }

    /// measured > bound; the reference column holds the bound.
    pub fn above(&mut self, id: impl Into<String>, measured: f64, bound: f64) {
        let pass = measured > bound;
        self.checks.push(Check { id: id.into(), measured, reference: bound, tolerance: 0.0, pass });
    }

    pub fn note(&mut self, id: impl Into<String>, measured: f64, reference: f64) {
        self.notes.push(Note { id: id.into(), measured, reference });
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Report lines without the final verdict.
    pub fn lines(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                format!(
                    "suite={} id={} measured={:.10e} reference={:.10e} tol={:.3e} pass={}",
                    self.suite, c.id, c.measured, c.reference, c.tolerance, c.pass
                )
            })
            .collect();
        out.extend(self.notes.iter().map(|n| {
            format!("suite={} id={} measured={:.10e} reference={:.10e} note=recorded", self.suite, n.id, n.measured, n.reference)
        }));
        out
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.lines() {
            writeln!(f, "{line}")?;
        }
        f.write_str(if self.passed() { "PASS" } else { "FAIL" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Residue,
    Functional,
    Theorem,
    EwaldInvariance,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Residue, Suite::Functional, Suite::Theorem, Suite::EwaldInvariance, Suite::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Residue => "residue",
            Suite::Functional => "functional",
            Suite::Theorem => "theorem",
            Suite::EwaldInvariance => "ewald_invariance",
            Suite::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check suite '{s}'")))
    }
}

pub fn check_suite(suite: Suite) -> Result<CheckReport> {
    match suite {
        Suite::Residue => residue_suite(),
        Suite::Functional => functional_suite(),
        Suite::Theorem => theorem_suite(),
        Suite::EwaldInvariance => ewald_suite(),
        Suite::Oracle => oracle_suite(),
    }
}

/// Ewald energy at the default α and the reference tolerance.
pub fn ewald_reference(cell: &UnitCell) -> Result<f64> {
    ewald_cell_energy(cell, &EwaldParams::default_for(cell.basis(), tol::EWALD_TARGET)?)
}

/// The residue constant 2^{5/2} π / √det Q as stated for Z_Q at s = 3.
pub fn stated_residue(basis: &LatticeBasis) -> f64 {
    2f64.powf(2.5) * PI / basis.quadratic_form().determinant().sqrt()
}

fn residue_suite() -> Result<CheckReport> {
    let mut report = CheckReport::new("residue");
    let cubic = LatticeBasis::cubic(1.0)?;
    let at = |basis: &LatticeBasis, p: [f64; 3]| -> Result<f64> {
        residue_estimate(&ZetaContext::from_offset(basis, &Vector3::from(p))?, tol::RESIDUE_EPS)
    };
    let r0 = at(&cubic, [0.0; 3])?;
    report.relative("cubic_p0", r0, 4.0 * PI, tol::RESIDUE);
    report.relative("cubic_p_half", at(&cubic, [0.5; 3])?, 4.0 * PI, tol::RESIDUE);
    report.relative("cubic_p_offset_vs_p0", at(&cubic, [0.1, 0.2, 0.3])?, r0, tol::RESIDUE);
    let hex = LatticeBasis::hexagonal(1.0, 1.6)?;
    report.relative("hexagonal_p0", at(&hex, [0.0; 3])?, 4.0 * PI / hex.volume(), tol::RESIDUE);
    let doubled = cubic.scaled(2.0)?;
    report.relative("scaling_mu2", at(&doubled, [0.0; 3])?, r0 / 8.0, tol::RESIDUE);
    report.note("cubic_ratio_to_stated_constant", r0 / stated_residue(&cubic), 2.0);
    Ok(report)
}

fn functional_bases() -> Result<Vec<(&'static str, Matrix3)>> {
    Ok(vec![
        ("identity", Matrix3::identity()),
        ("diag_1_1_2", Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, 2.0))),
        ("hexagonal", *LatticeBasis::hexagonal(1.0, 1.6)?.matrix()),
    ])
}

fn functional_suite() -> Result<CheckReport> {
    let mut report = CheckReport::new("functional");
    for (name, a) in functional_bases()? {
        let ctx = ZetaContext::new(&a, &Vector3::zeros())?;
        let dual = ctx.dual()?;
        for s in [0.5, 1.0, 1.5, 2.0, 2.5] {
            let lhs = completed_lambda(&ctx, s)?;
            let rhs = completed_lambda(&dual, 3.0 - s)?;
            report.relative(format!("{name}_s{s}"), lhs, rhs, tol::FUNCTIONAL_EQUATION);
        }
    }
    Ok(report)
}

/// Radii at which the neutralized sums are compared with the continuation.
pub const THEOREM_RADII: [f64; 3] = [10.0, 20.0, 40.0];

/// Signed errors E_R(Q,s) − R^{−s} E_R(Q,0) − E(Q,s) at [`THEOREM_RADII`].
pub fn theorem_errors(cell: &UnitCell, s: f64) -> Result<[f64; 3]> {
    let exact = cell_energy_s(cell, s)?;
    let mut out = [0.0; 3];
    for (slot, &r) in out.iter_mut().zip(&THEOREM_RADII) {
        *slot = wolf::neutralized_sum(cell, s, r)? - exact;
    }
    Ok(out)
}

/// Largest ratio of successive absolute errors; below one when they decrease.
pub fn successive_ratio(errors: &[f64]) -> f64 {
    errors.windows(2).map(|w| w[1].abs() / w[0].abs()).fold(0.0, f64::max)
}

fn theorem_suite() -> Result<CheckReport> {
    let mut report = CheckReport::new("theorem");
    for preset in [Preset::Rocksalt, Preset::CsCl] {
        let cell = preset.cell();
        for s in [1.0, 1.5, 2.0] {
            let errors = theorem_errors(&cell, s)?;
            let tag = format!("{preset}_s{s}");
            report.below(format!("{tag}_error_R40"), errors[2].abs(), tol::THEOREM_AT_40);
            report.below(format!("{tag}_error_ratio_successive"), successive_ratio(&errors), 1.0);
            // E(Q,0) = −½Σq² predicts an offset ½Σq² R^{−s} at finite R
            let offset = 0.5 * cell.charge_square_sum() * 40f64.powf(-s);
            report.note(format!("{tag}_signed_error_R40"), errors[2], offset);
            report.note(format!("{tag}_offset_removed_error_R40"), errors[2] - offset, 0.0);
        }
    }
    Ok(report)
}

fn ewald_suite() -> Result<CheckReport> {
    let mut report = CheckReport::new("ewald_invariance");
    for preset in Preset::ALL {
        let cell = preset.cell();
        let energies = [2.0, 3.0, 5.0]
            .iter()
            .map(|&alpha| ewald_cell_energy(&cell, &EwaldParams::for_tolerance(alpha, tol::EWALD_TARGET)?))
            .collect::<Result<Vec<f64>>>()?;
        report.relative(format!("{preset}_alpha2_vs_alpha3"), energies[0], energies[1], tol::EWALD_ALPHA_INVARIANCE);
        report.relative(format!("{preset}_alpha5_vs_alpha3"), energies[2], energies[1], tol::EWALD_ALPHA_INVARIANCE);
        report.relative(format!("{preset}_alpha2_vs_alpha5"), energies[0], energies[2], tol::EWALD_ALPHA_INVARIANCE);
        let reference = ewald_reference(&cell)?;
        report.absolute(format!("{preset}_continuation_s1"), cell_energy_s(&cell, 1.0)?, reference, tol::CONTINUATION_VS_EWALD);
        let doubled = cell.scaled(2.0)?;
        report.relative(format!("{preset}_scaled_mu2"), ewald_reference(&doubled)?, 0.5 * reference, tol::EWALD_ALPHA_INVARIANCE);
    }
    let rocksalt = Preset::Rocksalt.cell();
    let cube = truncated_sum(&rocksalt, 1.0, TruncationRegion::cube(30)?);
    report.absolute("rocksalt_cube_M30", cube.value, ewald_reference(&rocksalt)?, tol::EWALD_VS_CUBE);
    Ok(report)
}

/// Seeds of the random batteries.
const SPHERE_SEED: u64 = 0x5eed_0001;
const COUNT_SEED: u64 = 0x5eed_0002;
const PERMUTATION_SEED: u64 = 0x5eed_0003;
const ZETA_SEED: u64 = 0x5eed_0004;

/// Largest error of sphere sums against the naive triple loop, relative to the sum
/// of absolute terms, over `cases` random cells with R ≤ 3.
pub fn naive_sphere_battery(cases: usize) -> f64 {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(SPHERE_SEED);
    let inputs: Vec<(UnitCell, f64, f64)> = (0..cases)
        .map(|k| {
            let cell = reference::random_cell(&mut rng, 4, false);
            let radius = rng.gen_range(1.0..3.0);
            (cell, [0.5, 1.0, 2.0, 4.0][k % 4], radius)
        })
        .collect();
    inputs
        .par_iter()
        .map(|(cell, s, radius)| {
            let fast = truncated_sum(cell, *s, TruncationRegion::Sphere { radius: *radius }).value;
            let (naive, magnitude) = reference::naive_sphere_sum(cell, *s, *radius);
            if magnitude == 0.0 {
                fast.abs()
            } else {
                (fast - naive).abs() / magnitude
            }
        })
        .reduce(|| 0.0, f64::max)
}

/// Largest deviation of E_R(Q,0) from the enumerated pair count over `cases` random
/// integer-charge cells.
pub fn counting_battery(cases: usize) -> f64 {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(COUNT_SEED);
    let inputs: Vec<(UnitCell, f64)> = (0..cases)
        .map(|_| {
            let cell = reference::random_cell(&mut rng, 4, true);
            let radius = rng.gen_range(0.5..3.0);
            (cell, radius)
        })
        .collect();
    inputs
        .par_iter()
        .map(|(cell, radius)| {
            let sum = truncated_sum(cell, 0.0, TruncationRegion::Sphere { radius: *radius }).value;
            (sum - reference::counted_pairs(cell, *radius)).abs()
        })
        .reduce(|| 0.0, f64::max)
}

/// Largest relative change of sphere sums under site permutations.
pub fn permutation_battery(cases: usize) -> Result<f64> {
    use rand::seq::SliceRandom;
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(PERMUTATION_SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let cell = reference::random_cell(&mut rng, 5, false);
        let mut order: Vec<usize> = (0..cell.len()).collect();
        order.shuffle(&mut rng);
        let shuffled = cell.permuted(&order)?;
        let radius = rng.gen_range(1.0..4.0);
        let region = TruncationRegion::sphere(radius)?;
        let a = truncated_sum(&cell, 1.0, region).value;
        let b = truncated_sum(&shuffled, 1.0, region).value;
        worst = worst.max((a - b).abs() / a.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Largest relative deviation of the continuation from smooth-cutoff direct sums
/// over `cases` random (lattice, p) at s ∈ {3.5, 4, 5}.
pub fn continuation_battery(cases: usize) -> Result<f64> {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(ZETA_SEED);
    let inputs: Vec<(Matrix3, Vector3, f64)> = (0..cases)
        .map(|k| {
            let basis = reference::random_basis(&mut rng);
            let p = Vector3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let p = if k % 5 == 0 { Vector3::zeros() } else { p };
            (*basis.matrix(), p, [3.5, 4.0, 5.0][k % 3])
        })
        .collect();
    let errors = inputs
        .par_iter()
        .map(|(a, p, s)| {
            let ctx = ZetaContext::new(a, &(-(a * p)))?;
            let z = epstein_zeta(&ctx, *s)?;
            let direct = reference::smooth_zeta(a, p, *s);
            Ok((z - direct).abs() / direct.abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(errors.into_iter().fold(0.0, f64::max))
}

fn oracle_suite() -> Result<CheckReport> {
    let mut report = CheckReport::new("oracle");
    report.below("sphere_vs_naive_50_cells", naive_sphere_battery(50), tol::NAIVE_SPHERE);
    report.absolute("counting_identity_100_cases", counting_battery(100), 0.0, 0.0);
    report.below("site_permutation_20_cells", permutation_battery(20)?, tol::PERMUTATION);
    report.below("continuation_vs_direct_20_cases", continuation_battery(20)?, tol::CONTINUATION_VS_DIRECT);

    for preset in Preset::ALL {
        let cell = preset.cell();
        for s in [1.0, 2.0] {
            let smooth = reference::smooth_cell_energy(&cell, s);
            report.relative(format!("{preset}_s{s}_vs_smooth_cutoff"), cell_energy_s(&cell, s)?, smooth, tol::CONTINUATION_VS_DIRECT);
        }
    }

    let hex = LatticeBasis::hexagonal(1.0, 1.6)?;
    let p = Vector3::new(0.2, -0.1, 0.35);
    let ctx = ZetaContext::from_offset(&hex, &p)?;
    for s in [1.0, 2.0, 4.0] {
        let base = epstein_zeta(&ctx, s)?;
        for mu in [0.5, 2.0] {
            let scaled = epstein_zeta(&ctx.scaled(mu)?, s)?;
            report.relative(format!("homogeneity_s{s}_mu{mu}"), scaled, mu.powf(-s) * base, tol::HOMOGENEITY);
        }
        for lambda in [0.5, 2.0] {
            let split = epstein_zeta_split(&ctx, s, lambda)?;
            let unit = epstein_zeta_split(&ctx, s, 1.0)?;
            report.relative(format!("split_s{s}_lambda{lambda}"), split, unit, tol::SPLIT_INVARIANCE);
        }
    }

    for preset in [Preset::Rocksalt, Preset::HexagonalTest] {
        let cell = preset.cell();
        let radius = 4.3;
        let e0 = truncated_sum(&cell, 0.0, TruncationRegion::sphere(radius)?).value;
        report.absolute(
            format!("{preset}_mirror_pairs"),
            e0 + cell.charge_square_sum(),
            reference::mirror_pair_sum(&cell, radius),
            1e-12,
        );
    }
    Ok(report)
}
