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

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use madelung::epstein::{cell_energy_s, ewald_cell_energy, EwaldParams};
use madelung::harness::reference::{counted_pairs, random_cell};
use madelung::trunc::{truncated_sum, TruncationRegion};
use madelung::wolf::wolf_undamped;
use madelung::UnitCell;

fn cell(seed: u64) -> UnitCell {
    random_cell(&mut ChaCha8Rng::seed_from_u64(seed), 4, false)
}

fn sphere(cell: &UnitCell, s: f64, r: f64) -> (f64, u64) {
    let res = truncated_sum(cell, s, TruncationRegion::sphere(r).unwrap());
    (res.value, res.terms)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn site_order_is_irrelevant(seed in any::<u64>(), rotate in 1usize..4) {
        let c = cell(seed);
        let order: Vec<usize> = (0..c.len()).map(|k| (k + rotate) % c.len()).collect();
        let p = c.permuted(&order).unwrap();
        let (a, _) = sphere(&c, 1.0, 4.5);
        let (b, _) = sphere(&p, 1.0, 4.5);
        prop_assert!(close(a, b, 1e-12), "{} vs {}", a, b);
        let params = EwaldParams::default_for(c.basis(), 1e-12).unwrap();
        let ea = ewald_cell_energy(&c, &params).unwrap();
        let eb = ewald_cell_energy(&p, &params).unwrap();
        prop_assert!(close(ea, eb, 1e-12));
    }

    #[test]
    fn terms_grow_with_radius(seed in any::<u64>(), r in 0.5f64..5.0, dr in 0.0f64..2.0) {
        let c = cell(seed);
        let (_, a) = sphere(&c, 1.0, r);
        let (_, b) = sphere(&c, 1.0, r + dr);
        prop_assert!(a <= b);
    }

    #[test]
    fn sphere_sum_scales_homogeneously(seed in any::<u64>(), mu in 0.5f64..2.0, s in 0.5f64..3.0) {
        let c = cell(seed);
        let r = 4.1;
        let (a, _) = sphere(&c, s, r);
        let (b, _) = sphere(&c.scaled(mu).unwrap(), s, mu * r);
        prop_assert!(close(b, mu.powf(-s) * a, 1e-11), "{} vs {}", b, mu.powf(-s) * a);
    }

    #[test]
    fn continued_energy_scales_homogeneously(seed in any::<u64>(), mu in 0.5f64..2.0) {
        let c = cell(seed);
        let s = 1.7;
        let a = cell_energy_s(&c, s).unwrap();
        let b = cell_energy_s(&c.scaled(mu).unwrap(), s).unwrap();
        prop_assert!(close(b, mu.powf(-s) * a, 1e-10), "{} vs {}", b, mu.powf(-s) * a);
    }

    #[test]
    fn rigid_shift_leaves_wolf_unchanged(seed in any::<u64>(), shift in prop::array::uniform3(0.0f64..1.0)) {
        let c = cell(seed);
        let sites: Vec<(f64, [f64; 3])> = c
            .sites()
            .iter()
            .map(|s| (s.charge, [0, 1, 2].map(|k| (s.frac[k] + shift[k]).rem_euclid(1.0))))
            .collect();
        let moved = UnitCell::new(c.basis().clone(), &sites).unwrap();
        let a = wolf_undamped(&c, 5.3).unwrap();
        let b = wolf_undamped(&moved, 5.3).unwrap();
        prop_assert!(close(a, b, 1e-9), "{} vs {}", a, b);
    }

    #[test]
    fn zero_power_sum_counts_pairs(seed in any::<u64>(), r in 0.5f64..5.0) {
        let c = random_cell(&mut ChaCha8Rng::seed_from_u64(seed), 4, true);
        let (value, _) = sphere(&c, 0.0, r);
        prop_assert_eq!(value, counted_pairs(&c, r));
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let c = cell(7);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let params = EwaldParams::default_for(c.basis(), 1e-12).unwrap();
            (sphere(&c, 1.0, 6.0).0, ewald_cell_energy(&c, &params).unwrap(), cell_energy_s(&c, 1.5).unwrap())
        })
    };
    let one = run(1);
    let many = run(4);
    assert_eq!(one.0.to_bits(), many.0.to_bits());
    assert_eq!(one.1.to_bits(), many.1.to_bits());
    assert_eq!(one.2.to_bits(), many.2.to_bits());
}
