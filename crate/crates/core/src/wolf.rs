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

//! Wolf energies: charge-neutralized sphere sums with mirror charges on the
//! surface, undamped and damped, and estimates of their R → ∞ limits.

use std::f64::consts::PI;

use crate::epstein::{ewald_cell_energy, EwaldParams};
use crate::special::{erf, erfc};
use crate::sum::CompensatedSum;
use crate::trunc::{
    nudge_off_shells, radial_power, table_radius, ConvergenceSeries, ImageTable,
    SeriesMethod, SeriesSample,
};
use crate::{Error, Result, UnitCell};

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.25;

/// Fewest samples accepted by [`estimate_limit`].
pub const MIN_SERIES_SAMPLES: usize = 8;

/// Samples per series used by [`damped_bias`].
const BIAS_SAMPLES: usize = 31;

/// Accuracy of the Ewald reference inside [`damped_bias`].
const BIAS_EWALD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WolfParams {
    pub radius: f64,
    /// Damping parameter; `None` selects the undamped method.
    pub alpha: Option<f64>,
}

impl WolfParams {
    pub fn new(radius: f64, alpha: Option<f64>) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameters(format!("radius must be positive, got {radius}")));
        }
        if let Some(a) = alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::InvalidParameters(format!("alpha must be positive, got {a}")));
            }
        }
        Ok(WolfParams { radius, alpha })
    }
}

/// Finite-R estimate of a limit from the tail of a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitEstimate {
    pub value: f64,
    /// Smallest and largest extent in the averaging window.
    pub window: (f64, f64),
    /// max − min of the window samples.
    pub spread: f64,
    pub samples: usize,
}

/// Point evaluation: the radius actually used (nudged off shells) and the pair of
/// sphere sums ½ΣΣ′Ψ q_i q_j f(r) and ½ΣΣ′Ψ q_i q_j.
fn sphere_pair<F: Fn(f64) -> f64>(cell: &UnitCell, radius: f64, kernel: F) -> (SeriesSample, f64) {
    let table = ImageTable::build(cell, table_radius(radius * (1.0 + 1e-6)));
    let radius = nudge_off_shells(radius, &table.shell_radii());
    let weighted = table.sphere_sums(&[radius], kernel)[0];
    let counted = table.sphere_sums(&[radius], |_| 1.0)[0];
    let sample = SeriesSample {
        extent: radius,
        value: weighted.value,
        terms: weighted.terms,
        surface_terms: weighted.surface_terms,
    };
    (sample, counted.value)
}

/// E_R(Q,1) − E_R(Q,0)/R − Σq_i²/R.
pub fn wolf_undamped(cell: &UnitCell, radius: f64) -> Result<f64> {
    WolfParams::new(radius, None)?;
    let (e1, e0) = sphere_pair(cell, radius, |r| 1.0 / r);
    Ok(undamped_value(cell, e1.extent, e1.value, e0))
}

fn undamped_value(cell: &UnitCell, radius: f64, e1: f64, e0: f64) -> f64 {
    e1 - e0 / radius - cell.charge_square_sum() / radius
}

/// Damped Wolf energy at s = 1:
/// ½ΣΣ′[erfc(αr)/r − erfc(αR)/R] − (erfc(αR)/(2R) + α/√π)Σq_i².
pub fn wolf_damped(cell: &UnitCell, radius: f64, alpha: f64) -> Result<f64> {
    WolfParams::new(radius, Some(alpha))?;
    let (screened, e0) = sphere_pair(cell, radius, |r| erfc(alpha * r) / r);
    Ok(damped_value(cell, screened.extent, alpha, screened.value, e0))
}

fn damped_value(cell: &UnitCell, radius: f64, alpha: f64, screened: f64, e0: f64) -> f64 {
    let shift = erfc(alpha * radius) / radius;
    let mut acc = CompensatedSum::new();
    acc.add(screened);
    acc.add(-shift * e0);
    acc.add(-(0.5 * shift + alpha / PI.sqrt()) * cell.charge_square_sum());
    acc.value()
}

/// Either Wolf energy, selected by the presence of α.
pub fn wolf_energy(cell: &UnitCell, params: &WolfParams) -> Result<f64> {
    match params.alpha {
        None => wolf_undamped(cell, params.radius),
        Some(alpha) => wolf_damped(cell, params.radius, alpha),
    }
}

/// E_R(Q,s) − R^{−s} E_R(Q,0), the estimator whose R → ∞ limit is E(Q,s).
pub fn neutralized_sum(cell: &UnitCell, s: f64, radius: f64) -> Result<f64> {
    WolfParams::new(radius, None)?;
    let (es, e0) = sphere_pair(cell, radius, |r| radial_power(r, s));
    Ok(es.value - radial_power(es.extent, s) * e0)
}

pub(crate) fn undamped_from_table(cell: &UnitCell, table: &ImageTable, radii: &[f64]) -> Vec<SeriesSample> {
    let e1 = table.sphere_sums(radii, |r| 1.0 / r);
    let e0 = table.sphere_sums(radii, |_| 1.0);
    e1.iter()
        .zip(&e0)
        .map(|(a, b)| SeriesSample {
            extent: a.radius,
            value: undamped_value(cell, a.radius, a.value, b.value),
            terms: a.terms,
            surface_terms: a.surface_terms,
        })
        .collect()
}

pub(crate) fn damped_from_table(cell: &UnitCell, table: &ImageTable, radii: &[f64], alpha: f64) -> Vec<SeriesSample> {
    let screened = table.sphere_sums(radii, |r| erfc(alpha * r) / r);
    let e0 = table.sphere_sums(radii, |_| 1.0);
    screened
        .iter()
        .zip(&e0)
        .map(|(a, b)| SeriesSample {
            extent: a.radius,
            value: damped_value(cell, a.radius, alpha, a.value, b.value),
            terms: a.terms,
            surface_terms: a.surface_terms,
        })
        .collect()
}

/// Mean of the samples with extent ≥ (1 − window_fraction) · max extent.
pub fn estimate_limit(series: &ConvergenceSeries, window_fraction: f64) -> Result<LimitEstimate> {
    if series.samples.len() < MIN_SERIES_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "limit estimation needs at least {MIN_SERIES_SAMPLES} samples, got {}",
            series.samples.len()
        )));
    }
    if !(window_fraction > 0.0 && window_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("window fraction must lie in (0, 1), got {window_fraction}")));
    }
    let top = series.samples.iter().map(|s| s.extent).fold(f64::NEG_INFINITY, f64::max);
    let threshold = (1.0 - window_fraction) * top;
    let window: Vec<&SeriesSample> = series.samples.iter().filter(|s| s.extent >= threshold).collect();
    if window.len() < 2 {
        return Err(Error::InvalidArgument("averaging window holds fewer than two samples".into()));
    }
    let mean = window.iter().map(|s| s.value).collect::<CompensatedSum>().value() / window.len() as f64;
    let (lo, hi) = window.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
        (lo.min(s.value), hi.max(s.value))
    });
    let r_lo = window.iter().map(|s| s.extent).fold(f64::INFINITY, f64::min);
    Ok(LimitEstimate { value: mean, window: (r_lo, top), spread: hi - lo, samples: window.len() })
}

/// Distinct shell radii R(n, p_ij) of the cell up to `max_radius`, merged within
/// the surface tie band.
pub fn shell_radii(cell: &UnitCell, max_radius: f64) -> Vec<f64> {
    ImageTable::build(cell, max_radius).shell_radii()
}

/// `count` radii near an even spacing of [lo, hi], each moved to the midpoint of the
/// gap between the two shell radii around it. The result is strictly increasing.
pub fn sampling_radii(cell: &UnitCell, lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi.is_finite() && lo <= hi) || count == 0 || (count > 1 && lo == hi) {
        return Err(Error::InvalidArgument(format!("invalid sampling range {lo}:{hi}:{count}")));
    }
    let mut shells = vec![0.0];
    shells.extend(shell_radii(cell, hi * 1.25 + 2.0 * cell.min_pair_distance()));
    let gap_mid = |k: usize| 0.5 * (shells[k] + shells[k + 1]);
    let mut out: Vec<f64> = Vec::with_capacity(count);
    for idx in 0..count {
        let target = if count == 1 { lo } else { lo + (hi - lo) * idx as f64 / (count - 1) as f64 };
        // gap [shells[k], shells[k + 1]) holding the target
        let mut k = shells.partition_point(|&x| x <= target).saturating_sub(1);
        if gap_mid(k) > hi && k > 0 && gap_mid(k - 1) >= lo {
            k -= 1;
        }
        if let Some(&prev) = out.last() {
            while k + 1 < shells.len() - 1 && gap_mid(k) <= prev {
                k += 1;
            }
            if gap_mid(k) <= prev {
                return Err(Error::InvalidArgument(format!(
                    "{count} samples do not fit between the shells in [{lo}, {hi}]"
                )));
            }
        }
        out.push(gap_mid(k));
    }
    Ok(out)
}

fn bias_radii(cell: &UnitCell, alpha: f64, r_max: f64) -> Result<Vec<f64>> {
    WolfParams::new(r_max, Some(alpha))?;
    let floor = 10.0 * cell.min_pair_distance();
    if r_max <= floor {
        return Err(Error::InvalidArgument(format!(
            "R_max = {r_max} must exceed ten times the minimum pair distance ({floor})"
        )));
    }
    sampling_radii(cell, 0.25 * r_max, r_max, BIAS_SAMPLES)
}

/// Sweep of the two finite-R forms of the damped bias for one α.
#[derive(Debug, Clone, PartialEq)]
pub struct DampedBias {
    /// Trailing-window estimate of the right side of the bias identity,
    /// −½ ΣΣ′_{r ≤ R} q_i q_j [erf(αr)/r − erf(αR)/R] − (α/√π) Σq_i².
    pub series: LimitEstimate,
    /// Trailing-window estimate of the damped energy minus the Ewald energy.
    pub offset: LimitEstimate,
}

impl DampedBias {
    /// The estimate with the flatter window. The two forms share their limit; the
    /// series form converges fast for αR ≪ 1 and the offset form for αR ≫ 1.
    pub fn best(&self) -> LimitEstimate {
        if self.offset.spread < self.series.spread {
            self.offset
        } else {
            self.series
        }
    }
}

/// Both bias estimates from a sweep over R ∈ [R_max/4, R_max], against the Ewald
/// energy `reference`.
pub fn damped_bias_sweep(cell: &UnitCell, alpha: f64, r_max: f64, reference: f64) -> Result<DampedBias> {
    let grid = bias_radii(cell, alpha, r_max)?;
    let table = ImageTable::build(cell, table_radius(r_max * (1.0 + 1e-6)));
    let shells = table.shell_radii();
    let radii: Vec<f64> = grid.iter().map(|&r| nudge_off_shells(r, &shells)).collect();
    let smooth = table.sphere_sums(&radii, |r| erf(alpha * r) / r);
    let e0 = table.sphere_sums(&radii, |_| 1.0);
    let own = alpha / PI.sqrt() * cell.charge_square_sum();
    let samples = smooth
        .iter()
        .zip(&e0)
        .map(|(a, b)| {
            let mut acc = CompensatedSum::new();
            acc.add(-a.value);
            acc.add(erf(alpha * a.radius) / a.radius * b.value);
            acc.add(-own);
            SeriesSample { extent: a.radius, value: acc.value(), terms: a.terms, surface_terms: a.surface_terms }
        })
        .collect();
    let wrap = |samples| ConvergenceSeries { method: SeriesMethod::WolfDamped, s: 1.0, alpha: Some(alpha), samples };
    let series = estimate_limit(&wrap(samples), DEFAULT_WINDOW_FRACTION)?;
    let damped = damped_from_table(cell, &table, &radii, alpha);
    let mut offset = estimate_limit(&wrap(damped), DEFAULT_WINDOW_FRACTION)?;
    offset.value -= reference;
    Ok(DampedBias { series, offset })
}

/// Bias of the damped energy against the exact cell energy, lim E^D_R − E_cell,
/// estimated from a sweep up to `r_max` (see [`DampedBias::best`]).
pub fn damped_bias(cell: &UnitCell, alpha: f64, r_max: f64) -> Result<f64> {
    let params = EwaldParams::default_for(cell.basis(), BIAS_EWALD_TOL)?;
    let reference = ewald_cell_energy(cell, &params)?;
    Ok(damped_bias_sweep(cell, alpha, r_max, reference)?.best().value)
}
