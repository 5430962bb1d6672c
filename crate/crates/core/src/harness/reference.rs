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

//! Slow, straightforward implementations used as oracles by the check suites.
//!
//! Nothing here shares code paths with the production sums beyond the cell model:
//! distances are Cartesian, loops run over plain index boxes and accumulation is a
//! naive running sum.

use std::f64::consts::PI;

use rand::Rng;

use crate::special::erfc;
use crate::trunc::psi;
use crate::{LatticeBasis, Matrix3, UnitCell, Vector3};

/// Box of indices guaranteed to contain every image within `radius`.
fn index_box(basis: &LatticeBasis, radius: f64) -> i32 {
    let u = basis.inverse();
    let widest = (0..3).map(|k| u.row(k).norm()).fold(0.0, f64::max);
    (radius * widest).ceil() as i32 + 2
}

/// Sum of ½ q_i q_j Ψ(R / r) r^{−s} and of its absolute values.
pub fn naive_sphere_sum(cell: &UnitCell, s: f64, radius: f64) -> (f64, f64) {
    let positions = cell.cartesian_positions();
    let v = cell.basis().matrix();
    let m = index_box(cell.basis(), radius);
    let (mut total, mut magnitude) = (0.0, 0.0);
    for (i, ri) in positions.iter().enumerate() {
        for (j, rj) in positions.iter().enumerate() {
            let qq = cell.sites()[i].charge * cell.sites()[j].charge;
            for a in -m..=m {
                for b in -m..=m {
                    for c in -m..=m {
                        if i == j && a == 0 && b == 0 && c == 0 {
                            continue;
                        }
                        let r = (v * Vector3::new(a as f64, b as f64, c as f64) + ri - rj).norm();
                        let w = psi(radius / r);
                        if w > 0.0 {
                            let term = 0.5 * w * qq * r.powf(-s);
                            total += term;
                            magnitude += term.abs();
                        }
                    }
                }
            }
        }
    }
    (total, magnitude)
}

/// ½ Σ_{i,j} q_i q_j N_ij(R), with N_ij the number of images within R (surface
/// images counted ½, the self term excluded).
pub fn counted_pairs(cell: &UnitCell, radius: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..cell.len() {
        for j in 0..cell.len() {
            let pair = cell.pair_offset(i, j);
            let qq = cell.sites()[i].charge * cell.sites()[j].charge;
            let mut count = 0.0;
            for n in crate::trunc::enumerate_images(&pair.p, cell.basis(), radius) {
                if i == j && n == [0, 0, 0] {
                    continue;
                }
                count += psi(radius / cell.basis().quadratic_radius(&n, &pair.p));
            }
            total += 0.5 * qq * count;
        }
    }
    total
}

/// Sum of q_i q_j over all unordered pairs of images within R, self pairs included,
/// surface images weighted ½.
pub fn mirror_pair_sum(cell: &UnitCell, radius: f64) -> f64 {
    let positions = cell.cartesian_positions();
    let v = cell.basis().matrix();
    let m = index_box(cell.basis(), radius);
    let mut total = 0.0;
    for (i, ri) in positions.iter().enumerate() {
        for (j, rj) in positions.iter().enumerate() {
            let qq = cell.sites()[i].charge * cell.sites()[j].charge;
            for a in -m..=m {
                for b in -m..=m {
                    for c in -m..=m {
                        let r = (v * Vector3::new(a as f64, b as f64, c as f64) + ri - rj).norm();
                        // an ordered pair and its reverse are one unordered pair; a
                        // self pair has no reverse
                        let w = if r == 0.0 { 2.0 } else { psi(radius / r) };
                        total += w * qq;
                    }
                }
            }
        }
    }
    0.5 * total
}

/// Smooth cutoff ½ erfc((r − r_c)/σ) used by the direct-sum oracles. The Poisson
/// remainder of a sum weighted this way decays like a Gaussian in σ times the
/// shortest reciprocal vector.
struct Ramp {
    center: f64,
    width: f64,
}

impl Ramp {
    fn for_lattice(v: &Matrix3) -> Self {
        let longest = (0..3).map(|k| v.column(k).norm()).fold(0.0, f64::max);
        let width = 1.5 * longest;
        Ramp { center: 7.0 * width, width }
    }

    fn weight(&self, r: f64) -> f64 {
        0.5 * erfc((r - self.center) / self.width)
    }

    fn reach(&self) -> f64 {
        self.center + 7.0 * self.width
    }
}

/// Composite Simpson rule.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let mut total = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        total += w * f(a + k as f64 * h);
    }
    total * h / 3.0
}

/// Σ′_n |A(n + p)|^{−s} for s > 3 from a smoothly cut off direct sum plus the
/// integral of the cut off tail.
pub fn smooth_zeta(a: &Matrix3, p: &Vector3, s: f64) -> f64 {
    assert!(s > 3.0, "smooth_zeta needs an absolutely convergent sum");
    let ramp = Ramp::for_lattice(a);
    let basis = LatticeBasis::from_matrix(a).expect("oracle lattice");
    let m = index_box(&basis, ramp.reach());
    let mut total = 0.0;
    for i in -m..=m {
        for j in -m..=m {
            for k in -m..=m {
                let x = a * (Vector3::new(i as f64, j as f64, k as f64) + p);
                let r = x.norm();
                if r < 1e-12 || r > ramp.reach() {
                    continue;
                }
                total += ramp.weight(r) * r.powf(-s);
            }
        }
    }
    // (1 − w) is below 1e-30 under `lo`
    let lo = (ramp.center - 8.0 * ramp.width).max(1e-3 * ramp.width);
    let hi = ramp.reach();
    let body = simpson(|r| (1.0 - ramp.weight(r)) * r.powf(2.0 - s), lo, hi, 20_000);
    let tail = hi.powf(3.0 - s) / (s - 3.0);
    total + 4.0 * PI / a.determinant().abs() * (body + tail)
}

/// E(Q, s) of a neutral cell from smoothly cut off pair sums. Neutrality cancels the
/// tail integrals, so this holds for every s > 0.
pub fn smooth_cell_energy(cell: &UnitCell, s: f64) -> f64 {
    let v = cell.basis().matrix();
    let ramp = Ramp::for_lattice(v);
    let m = index_box(cell.basis(), ramp.reach());
    let positions = cell.cartesian_positions();
    let mut total = 0.0;
    for (i, ri) in positions.iter().enumerate() {
        for (j, rj) in positions.iter().enumerate() {
            let qq = cell.sites()[i].charge * cell.sites()[j].charge;
            let mut pair = 0.0;
            for a in -m..=m {
                for b in -m..=m {
                    for c in -m..=m {
                        let r = (v * Vector3::new(a as f64, b as f64, c as f64) + ri - rj).norm();
                        if r < 1e-12 || r > ramp.reach() {
                            continue;
                        }
                        pair += ramp.weight(r) * r.powf(-s);
                    }
                }
            }
            total += 0.5 * qq * pair;
        }
    }
    total
}

/// Random sheared lattice with |det| ≥ 0.3 and edge lengths near one.
pub fn random_basis<R: Rng>(rng: &mut R) -> LatticeBasis {
    loop {
        let mut m = Matrix3::zeros();
        for col in 0..3 {
            for row in 0..3 {
                m[(row, col)] = if row == col { rng.gen_range(0.8..1.5) } else { rng.gen_range(-0.3..0.3) };
            }
        }
        if m.determinant().abs() >= 0.3 {
            if let Ok(basis) = LatticeBasis::from_matrix(&m) {
                return basis;
            }
        }
    }
}

/// Random neutral cell with 2 to `max_sites` sites at least 0.15 apart. Integer
/// charges keep every sphere sum at s = 0 exact in floating point.
pub fn random_cell<R: Rng>(rng: &mut R, max_sites: usize, integer_charges: bool) -> UnitCell {
    loop {
        let basis = random_basis(rng);
        let count = rng.gen_range(2..=max_sites.max(2));
        let mut sites: Vec<(f64, [f64; 3])> = (0..count)
            .map(|_| {
                let q = if integer_charges { rng.gen_range(-3i32..=3) as f64 } else { rng.gen_range(-2.0..2.0) };
                (q, [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)])
            })
            .collect();
        let rest: f64 = sites[..count - 1].iter().map(|s| s.0).sum();
        sites[count - 1].0 = -rest;
        if sites.iter().all(|s| s.0 == 0.0) {
            continue;
        }
        if let Ok(cell) = UnitCell::new(basis, &sites) {
            if cell.min_pair_distance() >= 0.15 {
                return cell;
            }
        }
    }
}
