//! The stable self-similar Burgers profile W and its rescalings.
//!
//! W(X) is the unique real root of the depressed cubic
//!
//! ```text
//!     W^3 + W + X = 0,
//! ```
//!
//! equivalently the Cardano expression
//!
//! ```text
//!     W(X) = (-X/2 + (1/27 + X^2/4)^{1/2})^{1/3}
//!          - ( X/2 + (1/27 + X^2/4)^{1/2})^{1/3}.
//! ```
//!
//! It is odd, strictly decreasing, solves the steady self-similar Burgers
//! equation -W/2 + (3X/2 + W) W' = 0, and has W(0) = 0, W'(0) = -1,
//! W''(0) = 0, W'''(0) = 6. Near infinity W ~ -X^{1/3} + X^{-1/3}/3.
//!
//! Direct evaluation of the Cardano form loses precision for X >> 1 (the two
//! cube roots nearly cancel), so evaluation goes through a stabilized Cardano
//! expression (the small branch rewritten as a reciprocal) followed by a
//! Newton polish on the cubic residual, which is unconditionally convergent
//! on a monotone cubic. Derivatives come from implicit differentiation of
//! the cubic with D = 1 + 3W^2:
//!
//! ```text
//!     W'    = -1/D
//!     W''   = -6 W / D^3
//!     W'''  = (6 - 90 W^2) / D^5
//!     W'''' = (360 W - 2160 W^3) / D^7
//!     W^(5) = (-360 + 20520 W^2 - 71280 W^4) / D^9.
//! ```

use serde::Serialize;

use crate::error::{BhError, Result};

/// Profile value and derivatives at one point.
#[derive(Debug, Clone, Serialize)]
pub struct ProfileEval {
    pub x: f64,
    pub value: f64,
    /// derivs[j-1] = j-th derivative, for j = 1..=up_to.
    pub derivs: Vec<f64>,
}

/// W(X): stabilized Cardano evaluation plus Newton polish.
pub fn bar_u(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x < 0.0 {
        return -bar_u(-x); // odd symmetry
    }
    let s = (1.0 / 27.0 + 0.25 * x * x).sqrt();
    let big = 0.5 * x + s;
    // -X/2 + s = (1/27) / (X/2 + s): avoids cancellation for large X.
    let small = (1.0 / 27.0) / big;
    let mut w = small.cbrt() - big.cbrt();
    // Newton on r(w) = w^3 + w + x; two steps reach machine precision.
    for _ in 0..2 {
        w -= (w * w * w + w + x) / (3.0 * w * w + 1.0);
    }
    w
}

/// W and its derivatives up to order `up_to` (1..=5).
pub fn bar_u_derivs(x: f64, up_to: u32) -> ProfileEval {
    let up_to = up_to.clamp(1, 5) as usize;
    let w = bar_u(x);
    let d = 1.0 + 3.0 * w * w;
    let w2 = w * w;
    let all = [
        -1.0 / d,
        -6.0 * w / d.powi(3),
        (6.0 - 90.0 * w2) / d.powi(5),
        (360.0 * w - 2160.0 * w2 * w) / d.powi(7),
        (-360.0 + 20520.0 * w2 - 71280.0 * w2 * w2) / d.powi(9),
    ];
    ProfileEval {
        x,
        value: w,
        derivs: all[..up_to].to_vec(),
    }
}

/// Rescaled profile W_nu(X) = (nu/6)^{-1/2} W((nu/6)^{1/2} X); its third
/// derivative at the origin equals nu.
pub fn rescaled(nu: f64, x: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return Err(BhError::Parameter(format!("nu must be positive, got {nu}")));
    }
    let r = (nu / 6.0).sqrt();
    Ok(bar_u(r * x) / r)
}

/// One checked inequality on the profile.
#[derive(Debug, Clone, Serialize)]
pub struct BoundCheck {
    pub name: String,
    /// Minimum of (bound - |measured|) over the sampling plan, normalized by
    /// the bound at the worst point.
    pub worst_margin: f64,
    pub worst_x: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileBoundsReport {
    pub checks: Vec<BoundCheck>,
    pub all_pass: bool,
}

/// Default sampling plan: log-spaced |X| over [1e-6, xmax] on both sides plus
/// a fine uniform sweep of [-1/5, 1/5].
pub fn sampling_plan(xmax: f64, samples: usize) -> Vec<f64> {
    let half = samples / 2;
    let mut xs = Vec::with_capacity(2 * samples);
    for i in 0..half {
        let t = i as f64 / (half - 1) as f64;
        let r = 1e-6 * (xmax / 1e-6_f64).powf(t);
        xs.push(r);
        xs.push(-r);
    }
    for i in 0..half {
        let x = -0.2 + 0.4 * i as f64 / (half - 1) as f64;
        xs.push(x);
    }
    xs.push(0.0);
    xs
}

/// Verify every stated global, far-field, near-origin and middle-range bound
/// on W and its derivatives over the sampling plan.
pub fn check_profile_bounds(xs: &[f64]) -> ProfileBoundsReport {
    let mut checks: Vec<BoundCheck> = Vec::new();

    let mut track = |name: &str, measured: f64, bound: f64, x: f64| {
        let margin = (bound - measured.abs()) / bound.abs().max(1e-300);
        match checks.iter_mut().find(|c| c.name == name) {
            Some(c) => {
                if margin < c.worst_margin {
                    c.worst_margin = margin;
                    c.worst_x = x;
                    c.pass = margin >= 0.0;
                }
            }
            None => checks.push(BoundCheck {
                name: name.into(),
                worst_margin: margin,
                worst_x: x,
                pass: margin >= 0.0,
            }),
        }
    };

    for &x in xs {
        let e = bar_u_derivs(x, 5);
        let w = e.value;
        let q = 1.0 + x * x;

        // Global bounds: |W| <= (1+X^2)^{1/6}, |W'| <= (1+X^2)^{-1/3},
        // |W''| <= (1+X^2)^{-5/6}.
        track("value_global", w, q.powf(1.0 / 6.0), x);
        track("d1_global", e.derivs[0], q.powf(-1.0 / 3.0), x);
        track("d2_global", e.derivs[1], q.powf(-5.0 / 6.0), x);

        // Far field |X| >= 100: (1/4)(1+X^2)^{-1/3} <= |W'| <= (7/20)(...)^{-1/3}.
        if x.abs() >= 100.0 {
            track("d1_far_upper", e.derivs[0], 0.35 * q.powf(-1.0 / 3.0), x);
            // Lower bound recast as |W'| * (1+X^2)^{1/3} >= 1/4.
            let scaled = e.derivs[0].abs() * q.powf(1.0 / 3.0);
            track("d1_far_lower", 0.25, scaled, x);
        }

        // Near origin |X| <= 1/5: table of derivative caps.
        if x.abs() <= 0.2 {
            track("value_near0", w, 1.0 / 6.0, x);
            track("d1_near0", e.derivs[0], 1.0, x);
            track("d2_near0", e.derivs[1], 1.0, x);
            track("d3_near0", e.derivs[2], 6.0, x);
            track("d4_near0", e.derivs[3], 30.0, x);
            track("d5_near0", e.derivs[4], 360.0, x);
        }
    }

    // Middle range: |W'(X)| <= (1 - 2 l^2)(1+X^2)^{-1/3} for l <= |X|, with l
    // spanning (0, 1/5). The bound is monotone in l so checking each l on the
    // points with |X| >= l covers the family.
    for il in 1..=40 {
        let l = 0.2 * il as f64 / 41.0;
        for &x in xs {
            if x.abs() >= l {
                let e = bar_u_derivs(x, 1);
                let bound = (1.0 - 2.0 * l * l) * (1.0 + x * x).powf(-1.0 / 3.0);
                track("d1_middle_l_family", e.derivs[0], bound, x);
            }
        }
    }

    let all_pass = checks.iter().all(|c| c.pass);
    ProfileBoundsReport { checks, all_pass }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn values_at_anchor_points() {
        assert_eq!(bar_u(0.0), 0.0);
        assert!((bar_u(2.0) + 1.0).abs() < 1e-14); // (-1)^3 + (-1) + 2 = 0
        assert!((bar_u(-2.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn derivatives_at_origin() {
        let e = bar_u_derivs(0.0, 5);
        assert!((e.derivs[0] + 1.0).abs() < 1e-12);
        assert!(e.derivs[1].abs() < 1e-12);
        assert!((e.derivs[2] - 6.0).abs() < 1e-10);
        assert!(e.derivs[3].abs() < 1e-10);
        assert!((e.derivs[4] + 360.0).abs() < 1e-8);
    }

    #[test]
    fn derivative_at_x2() {
        let e = bar_u_derivs(2.0, 1);
        assert!((e.derivs[0] + 0.25).abs() < 1e-13); // W(2) = -1, D = 4
    }

    #[test]
    fn cubic_and_ode_residuals() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let x = rng.gen_range(-1e3..1e3);
            let e = bar_u_derivs(x, 1);
            let w = e.value;
            let scale = w.abs().max(x.abs()).max(1.0);
            assert!((w * w * w + w + x).abs() <= 1e-12 * scale);
            let ode = -0.5 * w + (1.5 * x + w) * e.derivs[0];
            assert!(ode.abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn taylor_expansion_near_zero() {
        // W(X) = -X + X^3 - 3 X^5 + O(X^7)
        for &x in &[1e-1, 1e-2, 1e-3] {
            let w = bar_u(x);
            let taylor = -x + x.powi(3) - 3.0 * x.powi(5);
            let rem = (w - taylor).abs() / x.powi(7);
            assert!(rem < 20.0, "X={x}: O(X^7) ratio {rem}");
        }
    }

    #[test]
    fn far_field_expansion() {
        // W(X) = -X^{1/3} + X^{-1/3}/3 + O(X^{-5/3})
        for &x in &[1e2, 1e3, 1e4] {
            let w = bar_u(x);
            let asym = -x.cbrt() + 1.0 / (3.0 * x.cbrt());
            let rem = (w - asym).abs() / x.powf(-5.0 / 3.0);
            assert!(rem < 1.0, "X={x}: O(X^-5/3) ratio {rem}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let x = rng.gen_range(-50.0..50.0);
            let e = bar_u_derivs(x, 2);
            let h = 1e-5 * x.abs().max(1.0);
            let fd1 = (bar_u(x + h) - bar_u(x - h)) / (2.0 * h);
            let fd2 = (bar_u(x + h) - 2.0 * bar_u(x) + bar_u(x - h)) / (h * h);
            assert!((fd1 - e.derivs[0]).abs() < 1e-6);
            assert!((fd2 - e.derivs[1]).abs() < 1e-4);
        }
    }

    #[test]
    fn rescaled_profile() {
        assert!((rescaled(6.0, 1.7).unwrap() - bar_u(1.7)).abs() < 1e-14);
        assert!(rescaled(0.0, 1.0).is_err());
        assert!(rescaled(-3.0, 1.0).is_err());
        // Third derivative of W_nu at 0 equals nu, via central differences.
        for &nu in &[6.0, 24.0] {
            let h = 1e-3;
            let f = |x: f64| rescaled(nu, x).unwrap();
            let d3 = (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h);
            assert!((d3 - nu).abs() < 1e-4 * nu, "nu={nu}, d3={d3}");
        }
    }

    #[test]
    fn bounds_hold_on_default_plan() {
        let plan = sampling_plan(1e4, 20_000);
        let report = check_profile_bounds(&plan);
        for c in &report.checks {
            if c.name == "value_near0" {
                // The stated 1/6 cap on |W| over |X| <= 1/5 is exceeded at the
                // edge: |W(0.2)| ~ 0.192 (the sharp elementary cap is |X|).
                // Pin the known deficit rather than the inequality.
                assert!(!c.pass);
                assert!(c.worst_x.abs() > 0.199, "worst at X={}", c.worst_x);
                assert!((c.worst_margin + 0.157).abs() < 2e-3, "margin {}", c.worst_margin);
                continue;
            }
            assert!(c.pass, "bound {} violated at X={} margin {}", c.name, c.worst_x, c.worst_margin);
        }
        // Tightness: |W'(0)| = 1 meets the global bound with zero margin.
        let tight = report.checks.iter().find(|c| c.name == "d1_global").unwrap();
        assert!(tight.worst_margin.abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn odd_symmetry(x in -1e4f64..1e4) {
            prop_assert!((bar_u(x) + bar_u(-x)).abs() <= 1e-12 * bar_u(x).abs().max(1.0));
        }

        #[test]
        fn first_derivative_even(x in -1e3f64..1e3) {
            let a = bar_u_derivs(x, 1).derivs[0];
            let b = bar_u_derivs(-x, 1).derivs[0];
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
