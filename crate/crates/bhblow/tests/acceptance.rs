//! End-to-end acceptance checks for the blowup laboratory.
//!
//! Each check prints exactly one `criterion N ... PASS/FAIL` line with its
//! headline numbers.  Two sub-items are known analytic/data-family failures
//! and are pinned as such rather than asserted: the 1/6 near-origin cap on
//! |Ubar| (false at X = 0.2, where |Ubar| ~ 0.192) and the far-field slope
//! cap |du| <= 2 (the prepared data family floors near 3.4).  Everything
//! else is asserted at its stated tolerance.
//!
//! The heavy runs (the full-equation reference run, the amplitude sweep and
//! the characteristics oracle) are shared across criteria through lazies;
//! total runtime is tens of minutes on one core.

use once_cell::sync::Lazy;

use bhblow::config::RunConfig;
use bhblow::evolve::Mode;
use bhblow::experiment::{self, preset, RunResult, SweepReport, SweepView};
use bhblow::grid::{Field, SpectralGrid};
use bhblow::hilbert::{hilbert_multiplier, hilbert_pv, PvQuadratureSpec};
use bhblow::profile;
use bhblow::verify::{Status, LEDGER_IDS};

/// Reference full-equation blowup run (perturbed data, eps = 1e-2, n = 2^18).
static MAIN: Lazy<RunResult> =
    Lazy::new(|| experiment::run(&preset("bh-main").unwrap()).expect("bh-main run"));

/// Characteristics oracle: Hilbert term off, prepared profile data.
static ORACLE: Lazy<RunResult> =
    Lazy::new(|| experiment::run(&preset("burgers-oracle").unwrap()).expect("burgers-oracle run"));

/// Amplitude sweep eps = 1e-1, 3e-2, 1e-2.
static SWEEP: Lazy<(SweepView, SweepReport)> = Lazy::new(|| {
    let cfgs: Vec<RunConfig> = ["bh-sweep-1e-1", "bh-sweep-3e-2", "bh-sweep-1e-2"]
        .iter()
        .map(|n| preset(n).unwrap())
        .collect();
    let view = experiment::sweep(&cfgs);
    let report = view.report().expect("sweep report");
    (view, report)
});

fn verdict(n: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {n:2} ({name}): {} -- {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_01_profile_identities() {
    // Steady self-similar Burgers ODE and defining cubic, plus the third
    // derivative at the origin.
    let xs = profile::sampling_plan(1e4, 10_000);
    let mut worst_ode = 0.0f64;
    let mut worst_cubic = 0.0f64;
    for &x in &xs {
        let e = profile::bar_u_derivs(x, 1);
        let w = e.value;
        let ode = -0.5 * w + (1.5 * x + w) * e.derivs[0];
        // Normalized by the term magnitude: at |X| = 1e4 the cubic evaluates
        // terms of size 1e4, so the absolute residual floor is ~1e-12 ulp.
        let cubic = (w * w * w + w + x) / (1.0 + x.abs() + w.abs().powi(3));
        worst_ode = worst_ode.max(ode.abs());
        worst_cubic = worst_cubic.max(cubic.abs());
    }
    let d3_at_0 = profile::bar_u_derivs(0.0, 3).derivs[2];
    let pass = worst_ode <= 1e-12 && worst_cubic <= 1e-12 && (d3_at_0 - 6.0).abs() <= 1e-10;
    verdict(
        1,
        "profile identities",
        pass,
        &format!("ode {worst_ode:.2e}, cubic {worst_cubic:.2e}, d3U(0) {d3_at_0}"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_profile_bounds() {
    let plan = profile::sampling_plan(1e4, 20_000);
    let report = profile::check_profile_bounds(&plan);
    let failures: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
    let pass = report.all_pass;
    verdict(
        2,
        "profile bounds",
        pass,
        &format!(
            "{} checks, failing: {:?}",
            report.checks.len(),
            failures.iter().map(|c| (&c.name, c.worst_margin)).collect::<Vec<_>>()
        ),
    );
    // The single failure is the near-origin 1/6 value cap, which is false
    // as stated (|Ubar(0.2)| ~ 0.192 > 1/6); pin it instead of asserting it.
    assert_eq!(failures.len(), 1);
    assert_eq!(failures[0].name, "value_near0");
    assert!((failures[0].worst_margin + 0.157).abs() < 2e-3);
}

#[test]
fn criterion_03_hilbert_operator() {
    let g = SpectralGrid::new(4096, 4.0).unwrap();
    // Smooth periodic fields, band-limited well below Nyquist.
    let f = Field::from_fn(g, |x| (x * std::f64::consts::PI / 4.0).sin().exp() - 1.0).unwrap();
    let h = Field::from_fn(g, |x| (2.0 * std::f64::consts::PI * x / 4.0).cos() + 0.3 * (3.0 * std::f64::consts::PI * x / 4.0).sin())
        .unwrap();
    let hf = hilbert_multiplier(&f).unwrap();
    let hh = hilbert_multiplier(&h).unwrap();
    let dot = |a: &Field, b: &Field| -> f64 {
        g.dx() * a.samples().iter().zip(b.samples()).map(|(x, y)| x * y).sum::<f64>()
    };
    let skew = (dot(&hf, &h) + dot(&f, &hh)).abs() / (dot(&f, &f).sqrt() * dot(&h, &h).sqrt());

    // Isometry on the zero-mean part.
    let f0 = f.add_scaled(-f.mean(), &Field::from_fn(g, |_| 1.0).unwrap()).unwrap();
    let hf0 = hilbert_multiplier(&f0).unwrap();
    let iso = (hf0.norms().0 - f0.norms().0).abs() / f0.norms().0;

    // Multiplier vs principal-value quadrature on a compact bump, on a wide
    // box so the periodization term ~ x (integral f) pi/(12 L^2) is negligible.
    let bump = |y: f64| if y.abs() >= 1.0 { 0.0 } else { (-1.0 / (1.0 - y * y)).exp() };
    let gw = SpectralGrid::new(32768, 100.0).unwrap();
    let fb = Field::from_fn(gw, bump).unwrap();
    let hfb = hilbert_multiplier(&fb).unwrap();
    let spec = PvQuadratureSpec::default();
    let mut worst_rel = 0.0f64;
    for &x in &[-0.7, -0.2, 0.33, 0.9, 1.5] {
        let pv = hilbert_pv(&bump, x, &spec).unwrap();
        let rel = (hfb.interp(x) - pv.value).abs() / pv.value.abs().max(1e-2);
        worst_rel = worst_rel.max(rel);
    }

    let pass = skew <= 1e-12 && iso <= 1e-12 && worst_rel < 1e-3;
    verdict(
        3,
        "hilbert operator",
        pass,
        &format!("skew {skew:.2e}, isometry {iso:.2e}, pv rel {worst_rel:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_linear_oracle() {
    let dev = experiment::linear_oracle_deviation(4096).unwrap();
    let pass = dev < 1e-6;
    verdict(4, "linear oracle", pass, &format!("max deviation {dev:.2e} over one period"));
    assert!(pass);
}

#[test]
fn criterion_05_burgers_oracle() {
    let r = &*ORACLE;
    let t_star = r.fit.t_star;
    let slope = r.fit.slope;
    let dist = r.frames.last().unwrap().sup_dist;
    let pass = t_star.abs() <= 1e-4 && (slope + 1.0).abs() <= 0.02 && dist <= 1e-3;
    verdict(
        5,
        "burgers oracle",
        pass,
        &format!("T* {t_star:.3e}, 1/m slope {slope:.4}, frame dist {dist:.2e}"),
    );
    assert!(pass);
}

#[test]
fn criterion_06a_l2_conservation() {
    let drift = MAIN.l2_drift;
    let pass = drift < 1e-6;
    verdict(6, "full run: L2 conservation", pass, &format!("relative drift {drift:.2e}"));
    assert!(pass);
}

#[test]
fn criterion_06b_blowup_rate_window() {
    let r = &MAIN.rate;
    let pass = r.product_min >= 0.5 && r.product_max <= 2.0;
    verdict(
        6,
        "full run: m(t)(T*-t) in [1/2,2]",
        pass,
        &format!("[{:.4}, {:.4}] over {} records", r.product_min, r.product_max, r.records_used),
    );
    assert!(pass);
}

#[test]
fn criterion_06c_tstar_trend() {
    let (_, report) = &*SWEEP;
    let mut ok = report.failures.is_empty();
    for row in &report.rows {
        ok &= row.t_star.abs() <= row.epsilon / 2.0;
    }
    let slope = report.tstar_loglog_slope.unwrap_or(f64::NAN);
    let decreasing = report.tstar_decreasing.unwrap_or(false);
    let pass = ok && decreasing && slope >= 1.0;
    verdict(
        6,
        "sweep: |T*| <= eps/2, decreasing, log-log slope >= 1",
        pass,
        &format!(
            "|T*| = {:?}, slope {slope:.3}",
            report.rows.iter().map(|r| format!("{:.2e}", r.t_star.abs())).collect::<Vec<_>>()
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06d_cusp_exponent() {
    let c = &MAIN.cusp;
    let pass = (c.exponent_mean + 2.0 / 3.0).abs() <= 0.05;
    verdict(
        6,
        "full run: cusp exponent -2/3",
        pass,
        &format!(
            "left {:.4} right {:.4} (r2 >= {:.5})",
            c.exponent_left, c.exponent_right, c.r2_min
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_06e_nu_hat() {
    let eps = MAIN.config.data.epsilon;
    let nu = MAIN.frames.last().unwrap().nu_hat;
    let pass = (nu - 6.0).abs() <= eps.powf(0.25);
    verdict(
        6,
        "full run: |nu-hat - 6| <= eps^(1/4)",
        pass,
        &format!("nu-hat {nu:.5}, tol {:.4}", eps.powf(0.25)),
    );
    assert!(pass);
}

#[test]
fn criterion_06f_profile_convergence() {
    let conv = MAIN.convergence.as_ref().expect("convergence report");
    let pass = conv.final_sup_dist <= 0.1 && conv.last3_nonincreasing;
    verdict(
        6,
        "full run: window distance to profile",
        pass,
        &format!(
            "sup dists {:?}, final {:.4}",
            conv.sup_dist.iter().map(|d| format!("{d:.3}")).collect::<Vec<_>>(),
            conv.final_sup_dist
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_bootstrap_ledger() {
    let b = &MAIN.bootstrap;
    let ids: Vec<&str> = b.items.iter().map(|i| i.id.as_str()).collect();
    let complete = ids == LEDGER_IDS;
    let mut near_middle_ok = true;
    for item in &b.items {
        if item.region == "near" || item.region == "middle" {
            match item.status {
                Status::Pass => {}
                Status::Unchecked => near_middle_ok &= item.note.is_some(),
                Status::Fail => near_middle_ok = false,
            }
        }
    }
    let l2_ok = b.item("eq:1xUL2").map(|i| i.status == Status::Pass).unwrap_or(false);
    let pass = complete && near_middle_ok && l2_ok;
    verdict(
        7,
        "bootstrap ledger",
        pass,
        &format!(
            "{} items: {} pass, {} fail, {} unchecked; failing: {:?}",
            b.items.len(),
            b.pass_count,
            b.fail_count,
            b.unchecked_count,
            b.items.iter().filter(|i| i.status == Status::Fail).map(|i| i.id.clone()).collect::<Vec<_>>()
        ),
    );
    assert!(pass);
    // The only failures allowed anywhere in the ledger for this data family
    // are the far-field slope cap (floors near 3.4 for prepared data with a
    // unit-slope core and plateau shoulders).
    for item in &b.items {
        if item.status == Status::Fail {
            assert_eq!(item.id, "eq:1xUfar", "unexpected ledger failure: {item:?}");
        }
    }
}

#[test]
fn criterion_08_lagrangian_sandwich() {
    let lag = MAIN.lagrangian.as_ref().expect("lagrangian report");
    let pass = lag.all_pass;
    verdict(
        8,
        "lagrangian sandwich",
        pass,
        &format!("{} seeds over s in [{:.3}, {:.3}]", lag.checks.len(), lag.s0, lag.s1),
    );
    assert!(pass);
}

#[test]
fn criterion_09_interpolation() {
    let mut worst = f64::INFINITY;
    let mut all = true;
    for rep in &MAIN.interpolation {
        for row in &rep.rows {
            worst = worst.min(row.margin);
            all &= row.margin > 0.0;
        }
    }
    let pass = all;
    verdict(
        9,
        "interpolation inequalities",
        pass,
        &format!("{} snapshots, worst margin {worst:.3}", MAIN.interpolation.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_10_determinism() {
    // Two identical small perturbed runs must produce byte-identical numeric
    // artifacts.
    let mut cfg = preset("bh-sweep-1e-1").unwrap();
    cfg.perturbation.enabled = true;
    cfg.mode = Mode::Full;
    cfg.step.m_stop = 30.0;
    // Keep the cusp fit window above the resolved scale 5 m^{-3/2} at m = 30.
    cfg.cusp.w_lo = 0.05;
    let dir = tempfile::tempdir().unwrap();
    let mut digests = Vec::new();
    for run_idx in 0..2 {
        let result = experiment::run(&cfg).unwrap();
        let out = dir.path().join(format!("run{run_idx}"));
        experiment::write_artifacts(&result, &out).unwrap();
        let mut bytes = Vec::new();
        let mut names: Vec<_> = std::fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n.ends_with(".csv") || n.ends_with(".bhf"))
            .collect();
        names.sort();
        for n in &names {
            bytes.extend_from_slice(&std::fs::read(out.join(n)).unwrap());
        }
        digests.push((names, bytes));
    }
    let pass = digests[0] == digests[1];
    verdict(
        10,
        "determinism",
        pass,
        &format!(
            "{} numeric artifacts, {} bytes compared",
            digests[0].0.len(),
            digests[0].1.len()
        ),
    );
    assert!(pass);
}
