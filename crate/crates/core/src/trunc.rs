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

//! Direct truncated lattice sums.
//!
//! Sphere sums weight every image by Ψ(R / R(n, p_ij)): images strictly inside the
//! sphere count fully and images on its surface count one half. Cube sums take all
//! translations n ∈ [−M, M]³ of the lattice indices.
//!
//! Both sums are accumulated in a fixed canonical order with compensation, so a
//! given input always produces the same bits regardless of thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::crystal::Image;
use crate::sum::CompensatedSum;
use crate::{wolf, Error, LatticeBasis, Result, UnitCell, Vector3};

/// Relative half-width of the band in which a radius counts as lying on the sphere.
pub const TIE_EPS: f64 = 1e-9;

/// Step factor applied to sample radii that land on a shell: R → R (1 + NUDGE · TIE_EPS).
const NUDGE: f64 = 10.0;

/// Surface weight: 0 outside, ½ on the surface (within [`TIE_EPS`]), 1 inside.
#[inline]
pub fn psi(x: f64) -> f64 {
    if (x - 1.0).abs() <= TIE_EPS {
        0.5
    } else if x > 1.0 {
        1.0
    } else {
        0.0
    }
}

/// r^{−s}, with the common exponents special-cased.
#[inline]
pub(crate) fn radial_power(r: f64, s: f64) -> f64 {
    if s == 0.0 {
        1.0
    } else if s == 1.0 {
        1.0 / r
    } else if s == 2.0 {
        1.0 / (r * r)
    } else {
        r.powf(-s)
    }
}

/// Every translation n with R(n, p) ≤ R (1 + TIE_EPS), in lexicographic order.
pub fn enumerate_images(p: &Vector3, basis: &LatticeBasis, radius: f64) -> Vec<Image> {
    basis
        .images_within(p, radius * (1.0 + TIE_EPS))
        .into_iter()
        .map(|(n, _)| n)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruncationRegion {
    /// Sphere of the given radius around each site.
    Sphere { radius: f64 },
    /// Translations n ∈ [−M, M]³.
    Cube { half_width: u32 },
}

impl TruncationRegion {
    pub fn sphere(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(TruncationRegion::Sphere { radius })
    }

    pub fn cube(half_width: u32) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::InvalidArgument("cube half-width must be at least 1".into()));
        }
        Ok(TruncationRegion::Cube { half_width })
    }

    pub fn extent(&self) -> f64 {
        match *self {
            TruncationRegion::Sphere { radius } => radius,
            TruncationRegion::Cube { half_width } => half_width as f64,
        }
    }
}

/// Value of a truncated sum together with its bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumResult {
    pub value: f64,
    pub s: f64,
    pub region: TruncationRegion,
    /// Number of (i, j, n) summands with non-zero weight.
    pub terms: u64,
    /// Number of those summands that carried the surface weight ½.
    pub surface_terms: u64,
}

/// One (i, j, n) summand of a sphere sum.
#[derive(Debug, Clone, Copy)]
struct ImageTerm {
    r: f64,
    qq: f64,
    i: u32,
    j: u32,
    n: Image,
}

impl ImageTerm {
    fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.r
            .total_cmp(&other.r)
            .then(self.i.cmp(&other.i))
            .then(self.j.cmp(&other.j))
            .then(self.n.cmp(&other.n))
    }
}

/// Weighted sphere sum ½ Σ Ψ q_i q_j f(R(n, p_ij)) at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereSum {
    pub radius: f64,
    pub value: f64,
    pub terms: u64,
    pub surface_terms: u64,
}

/// All summands (i, j, n) of a cell with R(n, p_ij) up to some maximum radius,
/// sorted by radius, then (i, j), then lexicographic n. The self term is excluded.
#[derive(Debug, Clone)]
pub struct ImageTable {
    max_radius: f64,
    terms: Vec<ImageTerm>,
}

impl ImageTable {
    pub fn build(cell: &UnitCell, max_radius: f64) -> Self {
        let basis = cell.basis();
        let sites = cell.sites();
        let mut terms: Vec<ImageTerm> = cell
            .pair_offsets()
            .into_par_iter()
            .flat_map_iter(|pair| {
                let qq = sites[pair.i].charge * sites[pair.j].charge;
                let (i, j) = (pair.i as u32, pair.j as u32);
                basis
                    .images_within(&pair.p, max_radius)
                    .into_iter()
                    .filter(move |(n, _)| !(i == j && *n == [0, 0, 0]))
                    .map(move |(n, r)| ImageTerm { r, qq, i, j, n })
            })
            .collect();
        terms.par_sort_unstable_by(ImageTerm::canonical_cmp);
        ImageTable { max_radius, terms }
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Distinct shell radii, merging radii that agree to within [`TIE_EPS`].
    pub fn shell_radii(&self) -> Vec<f64> {
        let mut shells: Vec<f64> = Vec::new();
        for term in &self.terms {
            match shells.last() {
                Some(&last) if term.r - last <= TIE_EPS * last => {}
                _ => shells.push(term.r),
            }
        }
        shells
    }

    /// ½ Σ Ψ(R / r) q_i q_j f(r) at each radius in `radii` (which must be
    /// non-decreasing and lie below the table's maximum radius).
    pub fn sphere_sums<F>(&self, radii: &[f64], kernel: F) -> Vec<SphereSum>
    where
        F: Fn(f64) -> f64,
    {
        debug_assert!(radii.windows(2).all(|w| w[0] <= w[1]));
        let mut out = Vec::with_capacity(radii.len());
        let mut inside = CompensatedSum::new();
        let mut inside_count = 0u64;
        let mut cursor = 0usize;
        for &radius in radii {
            debug_assert!(
                radius * (1.0 + 2.0 * TIE_EPS) <= self.max_radius || self.max_radius.is_infinite(),
                "radius {radius} exceeds table radius {}",
                self.max_radius
            );
            while cursor < self.terms.len() && psi(radius / self.terms[cursor].r) == 1.0 {
                let t = &self.terms[cursor];
                inside.add(t.qq * kernel(t.r));
                inside_count += 1;
                cursor += 1;
            }
            // sorted by r, so the surface terms follow directly
            let mut total = inside;
            let mut surface = 0u64;
            for t in &self.terms[cursor..] {
                if psi(radius / t.r) != 0.5 {
                    break;
                }
                total.add(0.5 * t.qq * kernel(t.r));
                surface += 1;
            }
            out.push(SphereSum {
                radius,
                value: 0.5 * total.value(),
                terms: inside_count + surface,
                surface_terms: surface,
            });
        }
        out
    }
}

/// Table radius needed to evaluate sphere sums up to `radius`, surface band included.
pub(crate) fn table_radius(radius: f64) -> f64 {
    radius / (1.0 - 2.0 * TIE_EPS)
}

/// Moves `radius` upward until it is not within [`TIE_EPS`] (relative) of any of the
/// sorted `shells`.
pub fn nudge_off_shells(radius: f64, shells: &[f64]) -> f64 {
    let mut r = radius;
    for _ in 0..64 {
        let idx = shells.partition_point(|&x| x < r * (1.0 - TIE_EPS));
        let hit = shells.get(idx).is_some_and(|&x| (x - r).abs() <= TIE_EPS * r);
        if !hit {
            return r;
        }
        r *= 1.0 + NUDGE * TIE_EPS;
    }
    r
}

/// Truncated sum E_R(Q, s) over a sphere, or its cube counterpart.
pub fn truncated_sum(cell: &UnitCell, s: f64, region: TruncationRegion) -> SumResult {
    match region {
        TruncationRegion::Sphere { radius } => {
            let table = ImageTable::build(cell, table_radius(radius));
            let sum = table.sphere_sums(&[radius], |r| radial_power(r, s))[0];
            SumResult { value: sum.value, s, region, terms: sum.terms, surface_terms: sum.surface_terms }
        }
        TruncationRegion::Cube { half_width } => cube_sums(cell, s, &[half_width])[0],
    }
}

/// Cube sums for several half-widths at once. Each cube is accumulated shell by
/// shell (shell k holds the n with max |n_i| = k), every shell summed over all pairs
/// before it is added, which keeps the cancellation between pairs local.
pub fn cube_sums(cell: &UnitCell, s: f64, half_widths: &[u32]) -> Vec<SumResult> {
    let max_m = half_widths.iter().copied().max().unwrap_or(0) as i32;
    let basis = cell.basis();
    let sites = cell.sites();
    let per_pair: Vec<Vec<(CompensatedSum, u64)>> = cell
        .pair_offsets()
        .into_par_iter()
        .map(|pair| {
            let qq = sites[pair.i].charge * sites[pair.j].charge;
            let mut shells = vec![(CompensatedSum::new(), 0u64); max_m as usize + 1];
            for a in -max_m..=max_m {
                for b in -max_m..=max_m {
                    for c in -max_m..=max_m {
                        let n = [a, b, c];
                        if pair.i == pair.j && n == [0, 0, 0] {
                            continue;
                        }
                        let shell = a.abs().max(b.abs()).max(c.abs()) as usize;
                        let r = basis.quadratic_radius(&n, &pair.p);
                        shells[shell].0.add(qq * radial_power(r, s));
                        shells[shell].1 += 1;
                    }
                }
            }
            shells
        })
        .collect();

    let mut running = CompensatedSum::new();
    let mut count = 0u64;
    let mut cumulative = Vec::with_capacity(max_m as usize + 1);
    for k in 0..=max_m as usize {
        let mut shell_total = CompensatedSum::new();
        for pair in &per_pair {
            shell_total.add(pair[k].0.value());
            count += pair[k].1;
        }
        running.add(shell_total.value());
        cumulative.push((0.5 * running.value(), count));
    }
    half_widths
        .iter()
        .map(|&m| {
            let (value, terms) = cumulative[m as usize];
            SumResult {
                value,
                s,
                region: TruncationRegion::Cube { half_width: m },
                terms,
                surface_terms: 0,
            }
        })
        .collect()
}

/// Estimator evaluated along a convergence series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesMethod {
    Sphere,
    Cube,
    Wolf,
    WolfDamped,
}

impl SeriesMethod {
    pub fn name(self) -> &'static str {
        match self {
            SeriesMethod::Sphere => "sphere",
            SeriesMethod::Cube => "cube",
            SeriesMethod::Wolf => "wolf",
            SeriesMethod::WolfDamped => "wolf_damped",
        }
    }
}

impl fmt::Display for SeriesMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SeriesMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(SeriesMethod::Sphere),
            "cube" => Ok(SeriesMethod::Cube),
            "wolf" => Ok(SeriesMethod::Wolf),
            "wolf_damped" => Ok(SeriesMethod::WolfDamped),
            other => Err(Error::InvalidArgument(format!("unknown series method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSample {
    pub extent: f64,
    pub value: f64,
    pub terms: u64,
    pub surface_terms: u64,
}

/// Ordered samples of one estimator for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSeries {
    pub method: SeriesMethod,
    pub s: f64,
    pub alpha: Option<f64>,
    pub samples: Vec<SeriesSample>,
}

pub const CSV_HEADER: &str = "method,s,alpha,extent,value,terms,surface_terms";

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl ConvergenceSeries {
    pub fn extents(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.extent).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.value).collect()
    }

    /// CSV rendering: header line, then one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let alpha = self.alpha.map(format_float).unwrap_or_default();
        for sample in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                self.method,
                format_float(self.s),
                alpha,
                format_float(sample.extent),
                format_float(sample.value),
                sample.terms,
                sample.surface_terms
            ));
        }
        out
    }
}

/// Evaluates `method` at every extent of `grid`.
///
/// Sphere-based radii that fall on a shell radius are moved off it (see
/// [`nudge_off_shells`]); the recorded extent is the radius actually used.
pub fn convergence_series(
    cell: &UnitCell,
    s: f64,
    method: SeriesMethod,
    grid: &[f64],
    alpha: Option<f64>,
) -> Result<ConvergenceSeries> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("convergence grid is empty".into()));
    }
    if grid.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument("grid extents must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    match (method, alpha) {
        (SeriesMethod::WolfDamped, None) => {
            return Err(Error::InvalidArgument("wolf_damped needs a damping parameter".into()))
        }
        (SeriesMethod::WolfDamped, Some(a)) if a.is_nan() || a <= 0.0 => {
            return Err(Error::InvalidArgument(format!("damping parameter must be positive, got {a}")))
        }
        (SeriesMethod::WolfDamped, Some(_)) => {}
        (_, Some(_)) => {
            return Err(Error::InvalidArgument(format!("{method} takes no damping parameter")))
        }
        _ => {}
    }
    if matches!(method, SeriesMethod::Wolf | SeriesMethod::WolfDamped) && s != 1.0 {
        return Err(Error::InvalidArgument(format!("{method} is defined for s = 1 only, got s = {s}")));
    }

    if method == SeriesMethod::Cube {
        let mut widths = Vec::with_capacity(grid.len());
        for &x in grid {
            if x.fract() != 0.0 || x > u32::MAX as f64 {
                return Err(Error::InvalidArgument(format!("cube extents must be integers, got {x}")));
            }
            widths.push(x as u32);
        }
        let samples = cube_sums(cell, s, &widths)
            .into_iter()
            .map(|r| SeriesSample { extent: r.region.extent(), value: r.value, terms: r.terms, surface_terms: 0 })
            .collect();
        return Ok(ConvergenceSeries { method, s, alpha, samples });
    }

    let top = grid[grid.len() - 1];
    // room for nudging the largest radius
    let table = ImageTable::build(cell, table_radius(top * (1.0 + 1e-6)));
    let shells = table.shell_radii();
    let radii: Vec<f64> = grid.iter().map(|&r| nudge_off_shells(r, &shells)).collect();
    let samples = match method {
        SeriesMethod::Sphere => table
            .sphere_sums(&radii, |r| radial_power(r, s))
            .into_iter()
            .map(|t| SeriesSample { extent: t.radius, value: t.value, terms: t.terms, surface_terms: t.surface_terms })
            .collect(),
        SeriesMethod::Wolf => wolf::undamped_from_table(cell, &table, &radii),
        SeriesMethod::WolfDamped => wolf::damped_from_table(cell, &table, &radii, alpha.unwrap_or_default()),
        SeriesMethod::Cube => unreachable!(),
    };
    Ok(ConvergenceSeries { method, s, alpha, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Preset;
    use approx::assert_relative_eq;

    #[test]
    fn psi_values() {
        assert_eq!(psi(0.5), 0.0);
        assert_eq!(psi(1.0), 0.5);
        assert_eq!(psi(2.0), 1.0);
        assert_eq!(psi(1.0 + 0.5 * TIE_EPS), 0.5);
        assert_eq!(psi(1.0 - 2.0 * TIE_EPS), 0.0);
    }

    #[test]
    fn image_counts() {
        let cubic = LatticeBasis::cubic(1.0).unwrap();
        assert_eq!(enumerate_images(&Vector3::zeros(), &cubic, 1.0).len(), 7);
        assert_eq!(enumerate_images(&Vector3::zeros(), &cubic, 1.5).len(), 19);
        let body = Vector3::new(0.5, 0.5, 0.5);
        let corners = enumerate_images(&body, &cubic, 0.9);
        assert_eq!(corners.len(), 8);
        for n in corners {
            assert!(n.iter().all(|&k| k == 0 || k == -1));
        }
    }

    #[test]
    fn empty_sphere() {
        let cell = Preset::Rocksalt.cell();
        for s in [0.0, 1.0, 2.5] {
            let res = truncated_sum(&cell, s, TruncationRegion::sphere(0.99).unwrap());
            assert_eq!(res.value, 0.0);
            assert_eq!(res.terms, 0);
        }
    }

    #[test]
    fn cscl_nearest_shell() {
        let cell = Preset::CsCl.cell();
        let region = TruncationRegion::sphere(0.9).unwrap();
        let res = truncated_sum(&cell, 1.0, region);
        assert_relative_eq!(res.value, -16.0 / 3f64.sqrt(), max_relative = 1e-14);
        assert_eq!(res.terms, 16);
        let res = truncated_sum(&cell, 0.0, region);
        assert_eq!(res.value, -8.0);
    }

    #[test]
    fn surface_images_count_half() {
        // radius exactly at the body-diagonal shell
        let cell = Preset::CsCl.cell();
        let res = truncated_sum(&cell, 0.0, TruncationRegion::sphere(3f64.sqrt() / 2.0).unwrap());
        assert_eq!(res.surface_terms, 16);
        assert_eq!(res.value, -4.0);
    }

    #[test]
    fn rocksalt_unit_cube_against_double_loop() {
        let cell = Preset::Rocksalt.cell();
        let positions = cell.cartesian_positions();
        let v = cell.basis().matrix();
        let mut expected = 0.0;
        for (i, ri) in positions.iter().enumerate() {
            for (j, rj) in positions.iter().enumerate() {
                for a in -1..=1 {
                    for b in -1..=1 {
                        for c in -1..=1 {
                            if i == j && (a, b, c) == (0, 0, 0) {
                                continue;
                            }
                            let shift = v * Vector3::new(a as f64, b as f64, c as f64);
                            let d = (shift + ri - rj).norm();
                            expected += 0.5 * cell.sites()[i].charge * cell.sites()[j].charge / d;
                        }
                    }
                }
            }
        }
        let res = truncated_sum(&cell, 1.0, TruncationRegion::cube(1).unwrap());
        assert_relative_eq!(res.value, expected, max_relative = 1e-12);
        assert_eq!(res.terms, 64 * 27 - 8);
    }

    #[test]
    fn terms_grow_with_radius() {
        let cell = Preset::HexagonalTest.cell();
        let table = ImageTable::build(&cell, 6.0);
        let radii: Vec<f64> = (1..=50).map(|k| 0.1 * k as f64 + 0.013).collect();
        let sums = table.sphere_sums(&radii, |_| 1.0);
        assert!(sums.windows(2).all(|w| w[0].terms <= w[1].terms));
    }

    #[test]
    fn nudging_moves_off_shells() {
        let shells = [1.0, 2.0f64.sqrt(), 3f64.sqrt()];
        assert_eq!(nudge_off_shells(1.2, &shells), 1.2);
        let r = nudge_off_shells(2f64.sqrt(), &shells);
        assert!(r > 2f64.sqrt() && (r - 2f64.sqrt()) / r > TIE_EPS && (r - 2f64.sqrt()) / r < 20.0 * TIE_EPS);
    }

    #[test]
    fn series_argument_errors() {
        let cell = Preset::CsCl.cell();
        assert!(convergence_series(&cell, 1.0, SeriesMethod::Sphere, &[], None).is_err());
        assert!(convergence_series(&cell, 1.0, SeriesMethod::Sphere, &[2.0, 1.0], None).is_err());
        assert!(convergence_series(&cell, 1.0, SeriesMethod::WolfDamped, &[2.0], None).is_err());
        assert!(convergence_series(&cell, 1.0, SeriesMethod::Wolf, &[2.0], Some(0.3)).is_err());
        assert!(convergence_series(&cell, 1.0, SeriesMethod::Cube, &[1.5], None).is_err());
        assert!(convergence_series(&cell, 2.0, SeriesMethod::Wolf, &[2.0], None).is_err());
    }

    #[test]
    fn below_nearest_shell_series() {
        let cell = Preset::CsCl.cell();
        let series = convergence_series(&cell, 1.0, SeriesMethod::Sphere, &[0.5], None).unwrap();
        assert_eq!(series.samples.len(), 1);
        assert_eq!(series.samples[0].extent, 0.5);
        assert_eq!(series.samples[0].value, 0.0);
    }

    #[test]
    fn series_matches_pointwise_sums() {
        let cell = Preset::OrthorhombicTest.cell();
        let grid = [1.1, 2.35, 3.0, 4.75];
        let series = convergence_series(&cell, 1.5, SeriesMethod::Sphere, &grid, None).unwrap();
        for sample in &series.samples {
            let point = truncated_sum(&cell, 1.5, TruncationRegion::sphere(sample.extent).unwrap());
            assert_eq!(point.value.to_bits(), sample.value.to_bits());
            assert_eq!(point.terms, sample.terms);
        }
    }

    #[test]
    fn csv_layout() {
        let cell = Preset::CsCl.cell();
        let series = convergence_series(&cell, 1.0, SeriesMethod::WolfDamped, &[1.2, 2.2], Some(0.5)).unwrap();
        let csv = series.to_csv();
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 3);
        let fields: Vec<_> = lines[1].split(',').collect();
        assert_eq!(fields.len(), 7);
        assert_eq!(fields[0], "wolf_damped");
        assert_eq!(fields[2], "5.0000000000000000e-1");
    }
}
