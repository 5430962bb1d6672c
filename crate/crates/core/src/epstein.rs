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

//! Analytic continuation of the lattice sums: Ewald energies at s = 1, the Epstein
//! zeta function for general s, its residue at s = 3 and the completed function.
//!
//! The zeta function is evaluated through the theta-function split
//!
//! ```text
//! π^{−s/2} Γ(s/2) ζ_A(s, d) = λ^{s/2} Σ′_n F(s/2, πλ|An − d|²)
//!     + (detA)⁻¹ λ^{(s−3)/2} Σ_{m≠0} cos(2π m·c) F((3−s)/2, π|Bm|²/λ)
//!     + (detA)⁻¹ λ^{(s−3)/2} · 2/(s−3) − [d ∈ AZ³] λ^{s/2} · 2/s
//! ```
//!
//! with F(a, x) = x^{−a} Γ(a, x), B = A⁻ᵀ and c = A⁻¹d. Both sums decay like
//! Gaussians, and the identity holds for every split parameter λ > 0.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::special::{completion_factor, erfc, upper_gamma_scaled};
use crate::sum::CompensatedSum;
use crate::{Error, LatticeBasis, Matrix3, Result, UnitCell, Vector3};

/// Summands whose magnitude F falls below this fraction of the running sum of
/// magnitudes end a dual sum.
const TRUNCATION_REL: f64 = 1e-17;

/// e-folds of Gaussian decay covered by the candidate ball of a dual sum.
const BALL_EFOLDS: f64 = 60.0;

/// Cutoffs are sized for `target_tol · CUTOFF_MARGIN` so that the many terms near
/// the cutoff still sum to well below `target_tol`.
const CUTOFF_MARGIN: f64 = 1e-3;

/// Closest approach to the pole at s = 3 accepted by [`epstein_zeta`].
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Distance of c from the nearest lattice point below which d counts as a lattice point.
const LATTICE_POINT_TOL: f64 = 1e-12;

/// Ewald splitting parameter and cutoffs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwaldParams {
    pub alpha: f64,
    pub r_cut: f64,
    pub k_cut: f64,
    pub target_tol: f64,
}

impl EwaldParams {
    /// Cutoffs solved for `target_tol` at the given α.
    pub fn for_tolerance(alpha: f64, target_tol: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameters(format!("alpha must be positive, got {alpha}")));
        }
        if !(target_tol > 0.0 && target_tol < 1.0) {
            return Err(Error::InvalidParameters(format!("target_tol must lie in (0, 1), got {target_tol}")));
        }
        let goal = (target_tol * CUTOFF_MARGIN).max(1e-300);
        let x = solve_decreasing(erfc, goal);
        let y = (-goal.ln()).sqrt();
        let params = EwaldParams { alpha, r_cut: x / alpha, k_cut: 2.0 * alpha * y, target_tol };
        params.validate()?;
        Ok(params)
    }

    /// α = 3 / (det V)^{1/3} with cutoffs for `target_tol`.
    pub fn default_for(basis: &LatticeBasis, target_tol: f64) -> Result<Self> {
        Self::for_tolerance(3.0 / basis.volume().cbrt(), target_tol)
    }

    pub fn validate(&self) -> Result<()> {
        let EwaldParams { alpha, r_cut, k_cut, target_tol } = *self;
        let finite = [alpha, r_cut, k_cut, target_tol].iter().all(|x| x.is_finite());
        if !finite || alpha <= 0.0 || r_cut <= 0.0 || k_cut <= 0.0 || target_tol <= 0.0 {
            return Err(Error::InvalidParameters(format!("non-positive Ewald parameters {self:?}")));
        }
        if erfc(alpha * r_cut) >= target_tol {
            return Err(Error::InvalidParameters(format!(
                "real-space cutoff too short: erfc(alpha r_cut) = {:e} >= {target_tol:e}",
                erfc(alpha * r_cut)
            )));
        }
        let k_tail = (-(k_cut * k_cut) / (4.0 * alpha * alpha)).exp();
        if k_tail >= target_tol {
            return Err(Error::InvalidParameters(format!(
                "reciprocal cutoff too short: exp(-k_cut^2/4alpha^2) = {k_tail:e} >= {target_tol:e}"
            )));
        }
        Ok(())
    }
}

/// Smallest x ≥ 0 with f(x) ≤ goal for a decreasing f, by bisection.
fn solve_decreasing(f: impl Fn(f64) -> f64, goal: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    while f(hi) > goal {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > goal {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Cell energy E(Q, 1) by Ewald summation.
pub fn ewald_cell_energy(cell: &UnitCell, params: &EwaldParams) -> Result<f64> {
    params.validate()?;
    let EwaldParams { alpha, r_cut, k_cut, .. } = *params;
    let basis = cell.basis();
    let sites = cell.sites();

    let real_parts: Vec<f64> = cell
        .pair_offsets()
        .into_par_iter()
        .map(|pair| {
            let qq = sites[pair.i].charge * sites[pair.j].charge;
            let mut acc = CompensatedSum::new();
            for (n, r) in basis.images_within(&pair.p, r_cut) {
                if pair.i == pair.j && n == [0, 0, 0] {
                    continue;
                }
                acc.add(qq * erfc(alpha * r) / r);
            }
            acc.value()
        })
        .collect();
    let real = 0.5 * real_parts.iter().copied().collect::<CompensatedSum>().value();

    // k = 2π Uᵀ m, so k·r_j = 2π m·frac_j
    let reciprocal_basis = basis.dual()?.scaled(2.0 * PI)?;
    let mut modes = reciprocal_basis.images_within(&Vector3::zeros(), k_cut);
    modes.retain(|(m, _)| *m != [0, 0, 0]);
    let recip_terms: Vec<f64> = modes
        .par_iter()
        .map(|(m, k)| {
            let (mut re, mut im) = (0.0, 0.0);
            for site in sites {
                let phase = 2.0 * PI * (m[0] as f64 * site.frac[0] + m[1] as f64 * site.frac[1] + m[2] as f64 * site.frac[2]);
                re += site.charge * phase.cos();
                im += site.charge * phase.sin();
            }
            (-(k * k) / (4.0 * alpha * alpha)).exp() / (k * k) * (re * re + im * im)
        })
        .collect();
    let recip = 2.0 * PI / basis.volume() * recip_terms.iter().copied().collect::<CompensatedSum>().value();

    let own = -alpha / PI.sqrt() * cell.charge_square_sum();
    Ok(real + recip + own)
}

/// Lattice AZ³, shift d and the dual data of an Epstein zeta function ζ_A(s, d).
#[derive(Debug, Clone)]
pub struct ZetaContext {
    direct: LatticeBasis,
    reciprocal: LatticeBasis,
    d: Vector3,
    /// c = A⁻¹d reduced to [−½, ½]³.
    c: Vector3,
    on_lattice: bool,
}

impl ZetaContext {
    pub fn new(a: &Matrix3, d: &Vector3) -> Result<Self> {
        let direct = LatticeBasis::from_matrix(a)?;
        let reciprocal = direct.dual()?;
        let raw = direct.inverse() * d;
        let c = raw.map(|x| x - x.round());
        let on_lattice = c.amax() < LATTICE_POINT_TOL;
        let c = if on_lattice { Vector3::zeros() } else { c };
        Ok(ZetaContext { direct, reciprocal, d: *d, c, on_lattice })
    }

    /// A = V and d = −Vp, for which ζ_A(s, d) = Z_Q(s, p).
    pub fn from_offset(basis: &LatticeBasis, p: &Vector3) -> Result<Self> {
        Self::new(basis.matrix(), &(-(basis.matrix() * p)))
    }

    pub fn a(&self) -> &Matrix3 {
        self.direct.matrix()
    }

    /// B = A⁻ᵀ.
    pub fn b(&self) -> &Matrix3 {
        self.reciprocal.matrix()
    }

    pub fn d(&self) -> &Vector3 {
        &self.d
    }

    /// c = A⁻¹d, reduced modulo Z³.
    pub fn c(&self) -> &Vector3 {
        &self.c
    }

    pub fn det_a(&self) -> f64 {
        self.direct.volume()
    }

    pub fn d_is_lattice_point(&self) -> bool {
        self.on_lattice
    }

    /// The context of the dual lattice BZ³ with zero shift.
    pub fn dual(&self) -> Result<Self> {
        Self::new(self.b(), &Vector3::zeros())
    }

    /// A → μA, d → μd.
    pub fn scaled(&self, mu: f64) -> Result<Self> {
        Self::new(&(self.a() * mu), &(self.d * mu))
    }

    /// Split parameter balancing the two dual sums.
    pub fn default_split(&self) -> f64 {
        self.det_a().powf(-2.0 / 3.0)
    }
}

fn check_domain(s: f64) -> Result<()> {
    if s.is_nan() || s <= 0.0 || !s.is_finite() {
        return Err(Error::Domain(format!("zeta requires finite s > 0, got {s}")));
    }
    if (s - 3.0).abs() <= POLE_EXCLUSION {
        return Err(Error::Domain(format!("s = {s} is at the pole s = 3")));
    }
    Ok(())
}

/// Σ weight(n) F(a, scale·r_n²) over the points of `lattice` shifted by `shift`,
/// skipping `skip_origin` points with r = 0, summed in order of increasing radius.
fn dual_sum(
    lattice: &LatticeBasis,
    shift: &Vector3,
    a: f64,
    scale: f64,
    skip_origin: bool,
    weight: impl Fn(&[i32; 3]) -> f64,
) -> f64 {
    let radius = ((a.max(0.0) + BALL_EFOLDS) / scale).sqrt();
    let mut points = lattice.images_within(shift, radius);
    points.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
    let mut acc = CompensatedSum::new();
    let mut magnitude = 0.0;
    for (n, r) in points {
        if skip_origin && n == [0, 0, 0] {
            continue;
        }
        let x = scale * r * r;
        let size = upper_gamma_scaled(a, x);
        // judged on F alone: a weight that happens to vanish says nothing about the tail
        if x > a + 1.0 && size < TRUNCATION_REL * magnitude {
            break;
        }
        acc.add(weight(&n) * size);
        magnitude += size;
    }
    acc.value()
}

/// π^{−s/2} Γ(s/2) ζ_A(s, d) for any s > 0 other than 3.
fn completed_sum(ctx: &ZetaContext, s: f64, lambda: f64) -> f64 {
    let det = ctx.det_a();
    let a_direct = 0.5 * s;
    let a_recip = 0.5 * (3.0 - s);
    let direct = dual_sum(&ctx.direct, &(-ctx.c), a_direct, PI * lambda, ctx.on_lattice, |_| 1.0);
    let c = ctx.c;
    let recip = dual_sum(&ctx.reciprocal, &Vector3::zeros(), a_recip, PI / lambda, true, |m| {
        (2.0 * PI * (m[0] as f64 * c[0] + m[1] as f64 * c[1] + m[2] as f64 * c[2])).cos()
    });
    let mut total = CompensatedSum::new();
    total.add(lambda.powf(a_direct) * direct);
    total.add(lambda.powf(-a_recip) / det * recip);
    total.add(lambda.powf(-a_recip) / det * 2.0 / (s - 3.0));
    if ctx.on_lattice {
        total.add(-lambda.powf(a_direct) * 2.0 / s);
    }
    total.value()
}

/// ζ_A(s, d) = Σ′_n |An − d|^{−s}, analytically continued to s > 0, s ≠ 3.
pub fn epstein_zeta(ctx: &ZetaContext, s: f64) -> Result<f64> {
    epstein_zeta_split(ctx, s, ctx.default_split())
}

/// [`epstein_zeta`] with an explicit split parameter λ > 0.
pub fn epstein_zeta_split(ctx: &ZetaContext, s: f64, lambda: f64) -> Result<f64> {
    check_domain(s)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!("split parameter must be positive, got {lambda}")));
    }
    Ok(completed_sum(ctx, s, lambda) / completion_factor(s))
}

/// E(Q, s) = ½ Σ_{i,j} q_i q_j Z_Q(s, p_ij).
pub fn cell_energy_s(cell: &UnitCell, s: f64) -> Result<f64> {
    check_domain(s)?;
    let basis = cell.basis();
    let sites = cell.sites();
    let terms: Vec<Result<f64>> = cell
        .pair_offsets()
        .into_par_iter()
        .map(|pair| {
            let ctx = ZetaContext::from_offset(basis, &pair.p)?;
            let qq = sites[pair.i].charge * sites[pair.j].charge;
            Ok(qq * epstein_zeta(&ctx, s)?)
        })
        .collect();
    let mut acc = CompensatedSum::new();
    for term in terms {
        acc.add(term?);
    }
    Ok(0.5 * acc.value())
}

/// Residue of ζ_A at s = 3 from the symmetric difference quotient around the pole,
/// Richardson-extrapolated over `eps` and `eps / 2`.
pub fn residue_estimate(ctx: &ZetaContext, eps: f64) -> Result<f64> {
    if !(eps > 1e-6 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!("eps must lie in (1e-6, 0.5), got {eps}")));
    }
    let lambda = ctx.default_split();
    let sym = |e: f64| {
        let above = e * completed_sum(ctx, 3.0 + e, lambda) / completion_factor(3.0 + e);
        let below = -e * completed_sum(ctx, 3.0 - e, lambda) / completion_factor(3.0 - e);
        0.5 * (above + below)
    };
    let coarse = sym(eps);
    let fine = sym(0.5 * eps);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Λ_A(s, 0) = √detA · π^{−s/2} Γ(s/2) · ζ_A(s, 0).
pub fn completed_lambda(ctx: &ZetaContext, s: f64) -> Result<f64> {
    if !ctx.d_is_lattice_point() || ctx.d.amax() > 0.0 {
        return Err(Error::Unsupported("the completed function is only provided for d = 0".into()));
    }
    check_domain(s)?;
    Ok(ctx.det_a().sqrt() * completed_sum(ctx, s, ctx.default_split()))
}
