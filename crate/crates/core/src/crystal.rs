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

//! Lattices, neutral unit cells and the generalized radius.
//!
//! A lattice is stored through its basis matrix V (lattice vectors as columns),
//! the quadratic form Q = 2 VᵀV and U = V⁻¹. Site positions are kept in
//! fractional coordinates, so the offset between sites i and j is simply
//! p_ij = p_i − p_j, and the distance from site i to the image of site j shifted
//! by the lattice vector n is the generalized radius [½ (n+p)ᵀ Q (n+p)]^{1/2}.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Matrix3, Result, Vector3};

/// Integer lattice translation, in units of the lattice vectors.
pub type Image = [i32; 3];

/// Relative charge-neutrality tolerance: |Σq| ≤ NEUTRALITY_TOL · Σ|q|.
pub const NEUTRALITY_TOL: f64 = 1e-12;
/// Minimum distance (length units) between distinct sites and their images.
pub const MIN_SITE_SEPARATION: f64 = 1e-9;
/// A basis is degenerate when |det V| is below this fraction of |e1||e2||e3|.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeBasis {
    vectors: [Vector3; 3],
    v: Matrix3,
    q: Matrix3,
    u: Matrix3,
    det_v: f64,
}

impl LatticeBasis {
    pub fn new(e1: Vector3, e2: Vector3, e3: Vector3) -> Result<Self> {
        let v = Matrix3::from_columns(&[e1, e2, e3]);
        let det_v = v.determinant();
        let threshold = DEGENERACY_TOL * e1.norm() * e2.norm() * e3.norm();
        if !det_v.is_finite() || det_v.abs() <= threshold || threshold == 0.0 {
            return Err(Error::DegenerateBasis { det: det_v, threshold });
        }
        let u = v
            .try_inverse()
            .ok_or(Error::DegenerateBasis { det: det_v, threshold })?;
        let mut q = Matrix3::zeros();
        let vectors = [e1, e2, e3];
        for a in 0..3 {
            for b in 0..3 {
                q[(a, b)] = 2.0 * vectors[a].dot(&vectors[b]);
            }
        }
        Ok(LatticeBasis { vectors, v, q, u, det_v })
    }

    pub fn from_matrix(v: &Matrix3) -> Result<Self> {
        Self::new(v.column(0).into(), v.column(1).into(), v.column(2).into())
    }

    pub fn cubic(a: f64) -> Result<Self> {
        Self::orthorhombic(a, a, a)
    }

    pub fn orthorhombic(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::new(
            Vector3::new(a, 0.0, 0.0),
            Vector3::new(0.0, b, 0.0),
            Vector3::new(0.0, 0.0, c),
        )
    }

    /// Hexagonal lattice with e1 = (a,0,0), e2 = (a/2, a√3/2, 0), e3 = (0,0,c).
    pub fn hexagonal(a: f64, c: f64) -> Result<Self> {
        Self::new(
            Vector3::new(a, 0.0, 0.0),
            Vector3::new(0.5 * a, 0.5 * 3f64.sqrt() * a, 0.0),
            Vector3::new(0.0, 0.0, c),
        )
    }

    pub fn vectors(&self) -> &[Vector3; 3] {
        &self.vectors
    }

    /// Matrix V with the lattice vectors as columns.
    pub fn matrix(&self) -> &Matrix3 {
        &self.v
    }

    /// Quadratic form Q, twice the metric tensor.
    pub fn quadratic_form(&self) -> &Matrix3 {
        &self.q
    }

    /// U = V⁻¹, mapping Cartesian vectors to fractional ones.
    pub fn inverse(&self) -> &Matrix3 {
        &self.u
    }

    pub fn det(&self) -> f64 {
        self.det_v
    }

    /// Cell volume |det V|.
    pub fn volume(&self) -> f64 {
        self.det_v.abs()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let [e1, e2, e3] = self.vectors;
        Self::new(e1 * factor, e2 * factor, e3 * factor)
    }

    /// Basis whose matrix is V⁻ᵀ. Its lattice is the dual of this one, without the
    /// 2π of crystallographic reciprocal lattices.
    pub fn dual(&self) -> Result<Self> {
        Self::from_matrix(&self.u.transpose())
    }

    pub fn to_cartesian(&self, frac: &Vector3) -> Vector3 {
        self.v * frac
    }

    pub fn to_fractional(&self, cart: &Vector3) -> Vector3 {
        self.u * cart
    }

    /// Generalized radius [½ (n+p)ᵀ Q (n+p)]^{1/2}, equal to |V (n+p)|.
    #[inline]
    pub fn quadratic_radius(&self, n: &Image, p: &Vector3) -> f64 {
        let x = [n[0] as f64 + p[0], n[1] as f64 + p[1], n[2] as f64 + p[2]];
        let q = &self.q;
        let form = q[(0, 0)] * x[0] * x[0]
            + q[(1, 1)] * x[1] * x[1]
            + q[(2, 2)] * x[2] * x[2]
            + 2.0 * (q[(0, 1)] * x[0] * x[1] + q[(0, 2)] * x[0] * x[2] + q[(1, 2)] * x[1] * x[2]);
        (0.5 * form).max(0.0).sqrt()
    }

    /// Index ranges of a box of translations containing every n with
    /// |V (n + p)| ≤ radius, padded by one cell on each side.
    pub fn image_bounds(&self, p: &Vector3, radius: f64) -> [(i32, i32); 3] {
        let mut bounds = [(0, 0); 3];
        for (k, bound) in bounds.iter_mut().enumerate() {
            let half_width = radius * self.u.row(k).norm();
            let lo = (-p[k] - half_width).floor() - 1.0;
            let hi = (-p[k] + half_width).ceil() + 1.0;
            *bound = (lo as i32, hi as i32);
        }
        bounds
    }

    /// All translations n with quadratic_radius(n, p) ≤ radius, in lexicographic
    /// order of n, paired with their radius.
    pub fn images_within(&self, p: &Vector3, radius: f64) -> Vec<(Image, f64)> {
        let bounds = self.image_bounds(p, radius);
        let mut out = Vec::new();
        for n0 in bounds[0].0..=bounds[0].1 {
            for n1 in bounds[1].0..=bounds[1].1 {
                for n2 in bounds[2].0..=bounds[2].1 {
                    let n = [n0, n1, n2];
                    let r = self.quadratic_radius(&n, p);
                    if r <= radius {
                        out.push((n, r));
                    }
                }
            }
        }
        out
    }
}

/// One point charge of a unit cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub charge: f64,
    /// Fractional position, wrapped into [0, 1)³.
    pub frac: Vector3,
}

/// Fractional offset p_ij = U (r_i − r_j) between two sites of a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOffset {
    pub i: usize,
    pub j: usize,
    pub p: Vector3,
}

/// A charge-neutral unit cell.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCell {
    basis: LatticeBasis,
    sites: Vec<Site>,
}

fn wrap_unit(x: f64) -> f64 {
    let w = x - x.floor();
    // x slightly below an integer can round up to exactly 1
    if w >= 1.0 {
        0.0
    } else {
        w
    }
}

impl UnitCell {
    /// Builds a cell from `(charge, fractional position)` pairs.
    pub fn new(basis: LatticeBasis, sites: &[(f64, [f64; 3])]) -> Result<Self> {
        if sites.len() < 2 {
            return Err(Error::Geometry(format!(
                "a unit cell needs at least 2 sites, got {}",
                sites.len()
            )));
        }
        let mut wrapped = Vec::with_capacity(sites.len());
        for (idx, &(charge, frac)) in sites.iter().enumerate() {
            if !charge.is_finite() || frac.iter().any(|x| !x.is_finite()) {
                return Err(Error::Geometry(format!("site {idx} has a non-finite value")));
            }
            wrapped.push(Site {
                charge,
                frac: Vector3::new(wrap_unit(frac[0]), wrap_unit(frac[1]), wrap_unit(frac[2])),
            });
        }

        let total: f64 = wrapped.iter().map(|s| s.charge).sum();
        let scale: f64 = wrapped.iter().map(|s| s.charge.abs()).sum();
        if total.abs() > NEUTRALITY_TOL * scale {
            return Err(Error::NotNeutral { total });
        }

        let cell = UnitCell { basis, sites: wrapped };
        for i in 0..cell.sites.len() {
            for j in (i + 1)..cell.sites.len() {
                let distance = cell.min_image_distance(i, j);
                if distance <= MIN_SITE_SEPARATION {
                    return Err(Error::CoincidentSites { first: i, second: j, distance });
                }
            }
        }
        Ok(cell)
    }

    /// Smallest distance between site i and any image of site j (j ≠ i).
    fn min_image_distance(&self, i: usize, j: usize) -> f64 {
        let p = self.sites[i].frac - self.sites[j].frac;
        let p = p.map(|x| x - x.round());
        let mut best = f64::INFINITY;
        for a in -1..=1 {
            for b in -1..=1 {
                for c in -1..=1 {
                    best = best.min(self.basis.quadratic_radius(&[a, b, c], &p));
                }
            }
        }
        best
    }

    pub fn basis(&self) -> &LatticeBasis {
        &self.basis
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn charges(&self) -> impl Iterator<Item = f64> + '_ {
        self.sites.iter().map(|s| s.charge)
    }

    pub fn total_charge(&self) -> f64 {
        self.charges().sum()
    }

    /// Σ q_i².
    pub fn charge_square_sum(&self) -> f64 {
        self.charges().map(|q| q * q).sum()
    }

    pub fn cartesian_positions(&self) -> Vec<Vector3> {
        self.sites.iter().map(|s| self.basis.to_cartesian(&s.frac)).collect()
    }

    pub fn pair_offset(&self, i: usize, j: usize) -> PairOffset {
        PairOffset { i, j, p: self.sites[i].frac - self.sites[j].frac }
    }

    /// All N² ordered pair offsets, row-major in (i, j).
    pub fn pair_offsets(&self) -> Vec<PairOffset> {
        let n = self.sites.len();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.pair_offset(i, j)).collect()
    }

    /// Smallest R(n, p_ij) over all pairs and translations, excluding the self term.
    pub fn min_pair_distance(&self) -> f64 {
        let mut radius = self.basis.vectors().iter().map(|e| e.norm()).fold(f64::INFINITY, f64::min);
        // the shortest lattice vector bounds the answer from above
        let mut best = f64::INFINITY;
        for pair in self.pair_offsets() {
            for (n, r) in self.basis.images_within(&pair.p, radius) {
                if pair.i == pair.j && n == [0, 0, 0] {
                    continue;
                }
                best = best.min(r);
            }
            radius = radius.min(best);
        }
        best
    }

    /// The same cell with every lattice vector multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Ok(UnitCell { basis: self.basis.scaled(factor)?, sites: self.sites.clone() })
    }

    /// The cell with its sites listed in a different order; `order[k]` is the old
    /// index of the new k-th site.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let sites: Vec<_> = order
            .iter()
            .map(|&k| {
                let s = self.sites[k];
                (s.charge, [s.frac[0], s.frac[1], s.frac[2]])
            })
            .collect();
        UnitCell::new(self.basis.clone(), &sites)
    }

    pub fn definition(&self) -> CellDefinition {
        let [e1, e2, e3] = self.basis.vectors();
        CellDefinition {
            lattice: LatticeDefinition {
                e1: [e1[0], e1[1], e1[2]],
                e2: [e2[0], e2[1], e2[2]],
                e3: [e3[0], e3[1], e3[2]],
            },
            sites: self
                .sites
                .iter()
                .map(|s| SiteDefinition { q: s.charge, frac: [s.frac[0], s.frac[1], s.frac[2]] })
                .collect(),
        }
    }
}

/// Cell definition document: `{"lattice": {"e1": [...], ...}, "sites": [{"q": .., "frac": [..]}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDefinition {
    pub lattice: LatticeDefinition,
    pub sites: Vec<SiteDefinition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDefinition {
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub e3: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteDefinition {
    pub q: f64,
    pub frac: [f64; 3],
}

impl CellDefinition {
    pub fn build(&self) -> Result<UnitCell> {
        let l = &self.lattice;
        let basis = LatticeBasis::new(l.e1.into(), l.e2.into(), l.e3.into())?;
        let sites: Vec<_> = self.sites.iter().map(|s| (s.q, s.frac)).collect();
        UnitCell::new(basis, &sites)
    }
}

/// Built-in structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// Conventional 8-site rock-salt cell, a = 2, nearest-neighbour distance 1.
    Rocksalt,
    /// CsCl, a = 1.
    CsCl,
    /// Two-site basis on an a = 1, b = 1.2, c = 1.5 orthorhombic lattice.
    OrthorhombicTest,
    /// Two-site basis on an a = 1, c = 1.6 hexagonal lattice.
    HexagonalTest,
}

impl Preset {
    pub const ALL: [Preset; 4] =
        [Preset::Rocksalt, Preset::CsCl, Preset::OrthorhombicTest, Preset::HexagonalTest];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Rocksalt => "rocksalt",
            Preset::CsCl => "cscl",
            Preset::OrthorhombicTest => "orthorhombic_test",
            Preset::HexagonalTest => "hexagonal_test",
        }
    }

    pub fn cell(self) -> UnitCell {
        const PAIR: [(f64, [f64; 3]); 2] = [(1.0, [0.0, 0.0, 0.0]), (-1.0, [0.5, 0.5, 0.5])];
        let (basis, sites): (_, &[(f64, [f64; 3])]) = match self {
            Preset::Rocksalt => (
                LatticeBasis::cubic(2.0),
                &[
                    (1.0, [0.0, 0.0, 0.0]),
                    (1.0, [0.5, 0.5, 0.0]),
                    (1.0, [0.5, 0.0, 0.5]),
                    (1.0, [0.0, 0.5, 0.5]),
                    (-1.0, [0.5, 0.0, 0.0]),
                    (-1.0, [0.0, 0.5, 0.0]),
                    (-1.0, [0.0, 0.0, 0.5]),
                    (-1.0, [0.5, 0.5, 0.5]),
                ],
            ),
            Preset::CsCl => (LatticeBasis::cubic(1.0), &PAIR),
            Preset::OrthorhombicTest => (LatticeBasis::orthorhombic(1.0, 1.2, 1.5), &PAIR),
            Preset::HexagonalTest => (LatticeBasis::hexagonal(1.0, 1.6), &PAIR),
        };
        UnitCell::new(basis.expect("preset basis is valid"), sites).expect("preset cell is valid")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(name: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| Error::UnknownPreset(name.to_string()))
    }
}

/// Looks up a preset cell by name.
pub fn preset(name: &str) -> Result<UnitCell> {
    Ok(name.parse::<Preset>()?.cell())
}
