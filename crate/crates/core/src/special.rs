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

//! Special functions: error function, gamma function and the upper incomplete
//! gamma function for arbitrary real order.

use std::f64::consts::PI;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const MAX_ITER: usize = 10_000;
const CF_TINY: f64 = 1e-300;

#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Γ(x).
#[inline]
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ln Γ(1 + a) for |a| ≤ 1/2, accurate in relative terms as a → 0.
///
/// Forming 1 + a first would drop the low bits of a small `a`, so tiny arguments
/// go through the Taylor series −γa + Σ_{k≥2} (−a)^k ζ(k)/k instead.
fn ln_gamma_1p(a: f64) -> f64 {
    const ZETA: [f64; 11] = [
        1.644_934_066_848_226_4, // ζ(2)
        1.202_056_903_159_594_3,
        1.082_323_233_711_138_2,
        1.036_927_755_143_37,
        1.017_343_061_984_449,
        1.008_349_277_381_922_8,
        1.004_077_356_197_944_3,
        1.002_008_392_826_082_2,
        1.000_994_575_127_818_1,
        1.000_494_188_604_119_5,
        1.000_246_086_553_308, // ζ(12)
    ];
    if a.abs() < 0.05 {
        let mut acc = 0.0;
        let mut power = -a; // (−a)^k, built up below
        for (idx, z) in ZETA.iter().enumerate() {
            let k = (idx + 2) as f64;
            power *= -a;
            acc += power * z / k;
        }
        -EULER_GAMMA * a + acc
    } else {
        libm::lgamma(1.0 + a)
    }
}

/// Scaled upper incomplete gamma function
///
/// F(a, x) = x^{−a} Γ(a, x) = ∫₁^∞ t^{a−1} e^{−x t} dt,
///
/// defined for every real order `a` and `x > 0`. Negative orders are reached by
/// the downward recurrence Γ(a, x) = (Γ(a+1, x) − x^a e^{−x}) / a.
pub fn upper_gamma_scaled(a: f64, x: f64) -> f64 {
    debug_assert!(x > 0.0, "upper_gamma_scaled needs x > 0, got {x}");
    if x >= f64::max(1.0, a + 1.0) {
        continued_fraction(a, x)
    } else if a > 0.5 {
        // Γ(a) x^{-a} − x^{-a} γ(a, x), with Q(a, x) bounded away from zero here
        gamma(a) * x.powf(-a) - scaled_lower_series(a, x)
    } else if a > -0.5 {
        small_order_series(a, x)
    } else {
        let shift = (0.5 - a).floor();
        let mut order = a + shift;
        let mut value = small_order_series(order, x);
        let decay = (-x).exp();
        for _ in 0..shift as usize {
            order -= 1.0;
            value = (x * value - decay) / order;
        }
        value
    }
}

/// x^{−a} γ(a, x) = e^{−x} Σ_k x^k / (a (a+1) … (a+k)), for a > 0.
fn scaled_lower_series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut total = term;
    let mut denom = a;
    for _ in 0..MAX_ITER {
        denom += 1.0;
        term *= x / denom;
        total += term;
        if term.abs() < total.abs() * f64::EPSILON {
            break;
        }
    }
    total * (-x).exp()
}

/// Legendre continued fraction, evaluated with the modified Lentz method.
fn continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / CF_TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let i = i as f64;
        let an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = b + an / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    (-x).exp() * h
}

/// Series for |a| ≤ 1/2 and moderate x:
///
/// F(a, x) = [x^{−a} Γ(1+a) − 1]/a − Σ_{k≥1} (−x)^k / (k! (a+k)).
///
/// The bracket is split as (g + h + g h)/a with g = Γ(1+a) − 1 and h = x^{−a} − 1,
/// both evaluated with expm1, so the a → 0 limit (the exponential integral E₁)
/// comes out without cancellation.
fn small_order_series(a: f64, x: f64) -> f64 {
    let ln_x = x.ln();
    let head = if a == 0.0 {
        -EULER_GAMMA - ln_x
    } else {
        let g = ln_gamma_1p(a).exp_m1();
        let h = (-a * ln_x).exp_m1();
        (g + h + g * h) / a
    };
    let mut tail = 0.0;
    let mut power = 1.0;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        power *= -x / kf;
        let term = power / (a + kf);
        tail += term;
        if term.abs() < f64::EPSILON * tail.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    head - tail
}

/// π^{−s/2} Γ(s/2), the prefactor of the completed Epstein zeta function.
pub fn completion_factor(s: f64) -> f64 {
    PI.powf(-0.5 * s) * gamma(0.5 * s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Composite Simpson quadrature of ∫₁^T t^{a−1} e^{−xt} dt with T far in the tail,
    /// in the variable u = ln t.
    fn quadrature(a: f64, x: f64) -> f64 {
        let upper = (1.0 + 60.0 / x).ln();
        let n = 400_000;
        let h = upper / n as f64;
        let f = |u: f64| (a * u - x * u.exp()).exp();
        let mut acc = f(0.0) + f(upper);
        for k in 1..n {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn closed_forms() {
        for &x in &[0.01, 0.3, 1.0, 2.5, 10.0] {
            // F(1, x) = e^{-x}/x
            assert_relative_eq!(upper_gamma_scaled(1.0, x), (-x).exp() / x, max_relative = 1e-14);
            // F(1/2, x) = sqrt(pi/x) erfc(sqrt(x))
            let expected = (PI / x).sqrt() * erfc(x.sqrt());
            assert_relative_eq!(upper_gamma_scaled(0.5, x), expected, max_relative = 1e-13);
        }
        // E1(1)
        assert_relative_eq!(upper_gamma_scaled(0.0, 1.0), 0.219_383_934_395_520_27, max_relative = 1e-14);
        assert_relative_eq!(upper_gamma_scaled(0.0, 0.5), 0.559_773_594_776_160_8, max_relative = 1e-14);
    }

    #[test]
    fn matches_quadrature_across_orders() {
        for &a in &[-2.5, -1.0, -0.75, -0.5, -1e-4, 0.0, 1e-4, 0.25, 0.5, 0.75, 1.5, 2.5] {
            for &x in &[0.05, 0.4, 0.99, 1.0, 1.7, 3.0, 8.0] {
                let got = upper_gamma_scaled(a, x);
                let want = quadrature(a, x);
                assert_relative_eq!(got, want, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn continuous_across_branch_boundaries() {
        let eps = 1e-12;
        for &a in &[-1.3, -0.2, 0.3, 0.9, 1.6] {
            let x = f64::max(1.0, a + 1.0);
            let below = upper_gamma_scaled(a, x - eps);
            let above = upper_gamma_scaled(a, x + eps);
            assert_relative_eq!(below, above, max_relative = 1e-11);
        }
        // order boundaries of the series branches
        for &a in &[-0.5, 0.5] {
            let x = 0.3;
            assert_relative_eq!(
                upper_gamma_scaled(a - 1e-13, x),
                upper_gamma_scaled(a + 1e-13, x),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn recurrence_in_order() {
        // F(a, x) = (x F(a+1, x) - e^{-x}) / a
        for &a in &[-1.7, -0.3, 0.4, 1.2] {
            for &x in &[0.2, 0.8, 2.0, 5.0] {
                let lhs = upper_gamma_scaled(a, x);
                let rhs = (x * upper_gamma_scaled(a + 1.0, x) - (-x).exp()) / a;
                assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn small_order_is_smooth_through_zero() {
        let x = 0.37;
        let e1 = upper_gamma_scaled(0.0, x);
        for &a in &[1e-8, 1e-6, -1e-6] {
            let slope = (upper_gamma_scaled(a, x) - e1) / a;
            let fd = (upper_gamma_scaled(1e-4, x) - upper_gamma_scaled(-1e-4, x)) / 2e-4;
            assert!((slope - fd).abs() < 1e-3, "a={a} slope={slope} fd={fd}");
        }
    }

    #[test]
    fn ln_gamma_series_matches_library() {
        for &a in &[-0.049, -0.01, 0.003, 0.049] {
            assert_relative_eq!(ln_gamma_1p(a), libm::lgamma(1.0 + a), max_relative = 1e-12);
        }
    }

    #[test]
    fn completion_factor_at_three() {
        // pi^{-3/2} Gamma(3/2) = 1 / (2 pi)
        assert_relative_eq!(completion_factor(3.0), 0.5 / PI, max_relative = 1e-15);
    }
}
