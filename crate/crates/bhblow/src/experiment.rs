//! Experiment presets and the make-data / evolve / selfsim / verify pipeline.
//!
//! A run takes a [`RunConfig`], integrates toward blowup, extracts
//! self-similar frames from the snapshot schedule, and evaluates every
//! diagnostic report: blowup-time fit, modulation residuals, convergence
//! to the profile, cusp exponent, bootstrap ledger, interpolation and rate
//! checks, and the Lagrangian sandwich.  Artifacts (CSV/JSON/snapshots)
//! are written into a run directory together with the exact configuration,
//! making each run reproducible and bitwise deterministic.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::config::{FrameConfig, GridConfig, RunConfig};
use crate::error::{BhError, Result};
use crate::evolve::{
    extrapolate_t_star, run_to_blowup, run_to_time, Mode, PhysState, RunOutput, SnapshotSchedule,
    StepControl, StopReason, TstarFit,
};
use crate::hilbert::hilbert_multiplier;
use crate::initial_data::{apply_perturbation, audit_u0, build_u0, AuditReport, DataSpec, Perturbation};
use crate::io::{write_csv, write_json, write_snapshot};
use crate::selfsim::{
    build_track, convergence_to_profile, cusp_exponent, extract_frame, extrapolate_x_star,
    default_seeds, lagrangian_check, modulation_residuals, ConvergenceReport, CuspReport,
    CuspWindow, Frame, LagrangianReport, ModulationReport, ModulationTrack,
};
use crate::verify::{
    check_blowup_rate, check_bootstrap, check_interpolation, BlowupRateReport, BootstrapConfig,
    BootstrapReport, InterpolationReport,
};

/// Geometric snapshot ratio: four snapshots per slope doubling.
const SNAP_RATIO: f64 = 1.189207115002721; // 2^(1/4)

/// Construct a named builtin preset.
///
/// - `linear-oracle`: rotation flow u_t = H[u]; closed-form oracle.
/// - `burgers-oracle`: H off, scaled-profile data; characteristics oracle.
/// - `bh-main`: the reference full-equation blowup run (perturbed data).
/// - `bh-sweep-1e-1` / `bh-sweep-3e-2` / `bh-sweep-1e-2`: amplitude sweep.
pub fn preset(name: &str) -> Result<RunConfig> {
    let mk = |epsilon: f64,
              n: usize,
              mode: Mode,
              perturbed: bool,
              m_first: f64|
     -> RunConfig {
        let l_dom = 4.0;
        let dx = 2.0 * l_dom / n as f64;
        // Stop a little before the resolution guard 1/m = 8 dx would fire:
        // the guard corresponds to m = (1/(8 dx)) and the shock width must
        // stay spectrally resolved, so target 90% of (0.25/dx)^{2/3}, the
        // slope at which the self-similar unit length equals 4 grid cells.
        let m_stop = 0.9 * (0.25 / dx).powf(2.0 / 3.0);
        RunConfig {
            grid: GridConfig { n, l_dom },
            data: DataSpec::new(epsilon, 50.0),
            perturbation: Perturbation { enabled: perturbed, seed: 7 },
            mode,
            step: StepControl {
                cfl: 0.3,
                slope_factor: 0.1,
                m_stop,
                resolution_guard: 8.0,
                max_steps: 2_000_000,
            },
            schedule: SnapshotSchedule { m_first, ratio: SNAP_RATIO },
            frame: FrameConfig::default(),
            cusp: CuspWindow { w_lo: 0.02, w_hi: 0.1 },
            m_big: 50.0,
        }
    };
    let cfg = match name {
        "burgers-oracle" => {
            let mut c = mk(1e-2, 1 << 17, Mode::BurgersOnly, false, 100.0);
            c.step.m_stop = 250.0;
            c
        }
        "bh-main" => mk(1e-2, 1 << 18, Mode::Full, true, 100.0),
        "bh-sweep-1e-1" => mk(1e-1, 1 << 14, Mode::Full, false, 12.0),
        "bh-sweep-3e-2" => mk(3e-2, 1 << 16, Mode::Full, false, 12.0),
        "bh-sweep-1e-2" => mk(1e-2, 1 << 18, Mode::Full, false, 100.0),
        other => {
            return Err(BhError::Config(format!(
                "unknown preset '{other}'; available: linear-oracle (see linear_oracle_deviation), \
                 burgers-oracle, bh-main, bh-sweep-1e-1, bh-sweep-3e-2, bh-sweep-1e-2"
            )))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Integrate the linear flow u_t = H[u] for one period and return the
/// maximum deviation from the closed form u0 cos t + H[u0] sin t, sampled
/// at quarter periods.
pub fn linear_oracle_deviation(n: usize) -> Result<f64> {
    let grid = GridConfig { n, l_dom: 4.0 }.build()?;
    let spec = DataSpec::new(1e-1, 50.0);
    let u0 = build_u0(&spec, grid)?;
    let h0 = hilbert_multiplier(&u0)?;
    let ctl = StepControl::default();
    let mut state = PhysState { t: 0.0, u: u0.clone() };
    let mut max_dev = 0.0f64;
    for k in 1..=4u32 {
        let t_end = f64::from(k) * std::f64::consts::FRAC_PI_2;
        state = run_to_time(&state, t_end, &ctl, Mode::LinearOnly)?;
        let (c, s) = (t_end.cos(), t_end.sin());
        for (i, &v) in state.u.samples().iter().enumerate() {
            let exact = c * u0.samples()[i] + s * h0.samples()[i];
            max_dev = max_dev.max((v - exact).abs());
        }
    }
    Ok(max_dev)
}

/// Summary report aggregating the headline numbers of one run.
#[derive(Debug, Clone, Serialize)]
pub struct BlowupReport {
    pub t_star: Option<f64>,
    pub slope: Option<f64>,
    pub r_squared: Option<f64>,
    pub x_star: Option<f64>,
    pub nu_hat: Option<f64>,
    pub cusp_exponent: Option<f64>,
    pub window_sup_dist: Option<f64>,
    pub bootstrap_pass: Option<usize>,
    pub bootstrap_fail: Option<usize>,
    pub bootstrap_unchecked: Option<usize>,
    pub stop_reason: StopReason,
    pub wall_time_s: f64,
    /// Reasons for any null field above.
    pub notes: Vec<String>,
    /// Every artifact file the run directory contains.
    pub artifacts: Vec<String>,
}

/// Full in-memory result of one pipeline run.
#[derive(Debug)]
pub struct RunResult {
    pub config: RunConfig,
    pub audit: AuditReport,
    pub output: RunOutput,
    pub fit: TstarFit,
    pub track: ModulationTrack,
    /// Extracted frames and the snapshot index each one came from.
    pub frames: Vec<Frame>,
    pub frame_indices: Vec<usize>,
    pub x_star: f64,
    pub cusp: CuspReport,
    pub modulation: ModulationReport,
    pub convergence: Option<ConvergenceReport>,
    pub bootstrap: BootstrapReport,
    pub interpolation: Vec<InterpolationReport>,
    pub rate: BlowupRateReport,
    pub lagrangian: Option<LagrangianReport>,
    /// max relative drift of the conserved L2 norm over the run.
    pub l2_drift: f64,
    pub notes: Vec<String>,
    pub wall_time_s: f64,
}

impl RunResult {
    pub fn frame_states(&self) -> Vec<&PhysState> {
        self.frame_indices.iter().map(|&i| &self.output.snapshots[i]).collect()
    }

    pub fn summary(&self) -> BlowupReport {
        BlowupReport {
            t_star: Some(self.fit.t_star),
            slope: Some(self.fit.slope),
            r_squared: Some(self.fit.r_squared),
            x_star: Some(self.x_star),
            nu_hat: self.frames.last().map(|f| f.nu_hat),
            cusp_exponent: Some(self.cusp.exponent_mean),
            window_sup_dist: self.frames.last().map(|f| f.sup_dist),
            bootstrap_pass: Some(self.bootstrap.pass_count),
            bootstrap_fail: Some(self.bootstrap.fail_count),
            bootstrap_unchecked: Some(self.bootstrap.unchecked_count),
            stop_reason: self.output.stop,
            wall_time_s: self.wall_time_s,
            notes: self.notes.clone(),
            artifacts: Vec::new(),
        }
    }
}

/// Execute the full pipeline for one configuration.
pub fn run(config: &RunConfig) -> Result<RunResult> {
    config.validate()?;
    let start = Instant::now();
    let mut notes = Vec::new();

    let grid = config.grid.build()?;
    let mut u0 = build_u0(&config.data, grid)?;
    if config.perturbation.enabled {
        u0 = apply_perturbation(&u0, &config.data, &config.perturbation)?;
    }
    let audit = audit_u0(&u0, &config.data)?;

    let state0 = PhysState { t: config.data.t0(), u: u0 };
    let output = run_to_blowup(state0, &config.step, config.mode, &config.schedule)?;
    if output.stop == StopReason::MaxSteps {
        return Err(BhError::Partial("step budget exhausted before the slope target".into()));
    }

    let fit = extrapolate_t_star(&output.series)?;
    let track = build_track(&output.snapshots, config.mode)?;

    // Keep frames only while the self-similar grid spacing is fine enough;
    // coarser frames carry visible truncation bias in the tip region.
    let dx = grid.dx();
    let mut frames = Vec::new();
    let mut frame_indices = Vec::new();
    for (i, entry) in track.entries.iter().enumerate() {
        if entry.m >= 0.999 * config.schedule.m_first && dx * entry.m.powf(1.5) <= config.frame.dx_max {
            frames.push(extract_frame(&output.snapshots[i], &config.frame.options())?);
            frame_indices.push(i);
        }
    }
    if frames.is_empty() {
        return Err(BhError::Partial(
            "no snapshot admitted a valid self-similar frame before the stop".into(),
        ));
    }

    let modulation = modulation_residuals(&track)?;
    let convergence = match convergence_to_profile(&frames, config.data.epsilon) {
        Ok(rep) => Some(rep),
        Err(e) => {
            notes.push(format!("convergence report unavailable: {e}"));
            None
        }
    };

    let x_star = extrapolate_x_star(&output.series, fit.t_star)?;
    let final_state = output.snapshots.last().unwrap();
    let cusp = cusp_exponent(final_state, x_star, &config.cusp)?;

    let frame_states: Vec<PhysState> =
        frame_indices.iter().map(|&i| output.snapshots[i].clone()).collect();
    let bootstrap = check_bootstrap(
        &frames,
        &frame_states,
        &track,
        Some(fit.t_star),
        &BootstrapConfig { m_big: config.m_big, epsilon: config.data.epsilon },
    )?;

    let interpolation: Vec<InterpolationReport> = output
        .snapshots
        .iter()
        .map(check_interpolation)
        .collect::<Result<_>>()?;

    let rate = check_blowup_rate(&output.series, fit.t_star, &output.snapshots)?;

    let lagrangian = if frames.len() >= 2 {
        let rates: Vec<(f64, f64)> = frame_indices
            .iter()
            .map(|&i| (track.entries[i].tau_dot_meas, track.entries[i].xi_dot_meas))
            .collect();
        Some(lagrangian_check(
            &frames,
            &frame_states,
            &rates,
            config.m_big,
            &default_seeds(config.m_big),
        )?)
    } else {
        notes.push("single frame: Lagrangian check skipped".to_string());
        None
    };

    let l2_0 = output.series.first().unwrap().l2;
    let l2_drift = output
        .series
        .iter()
        .map(|r| (r.l2 - l2_0).abs() / l2_0)
        .fold(0.0, f64::max);

    Ok(RunResult {
        config: config.clone(),
        audit,
        output,
        fit,
        track,
        frames,
        frame_indices,
        x_star,
        cusp,
        modulation,
        convergence,
        bootstrap,
        interpolation,
        rate,
        lagrangian,
        l2_drift,
        notes,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Write every artifact of a run into `dir` and return the summary report.
pub fn write_artifacts(result: &RunResult, dir: &Path) -> Result<BlowupReport> {
    std::fs::create_dir_all(dir)?;
    let mut artifacts: Vec<String> = Vec::new();
    let mut track_file = |name: &str| -> std::path::PathBuf {
        artifacts.push(name.to_string());
        dir.join(name)
    };

    result.config.to_file(&track_file("config.json"))?;

    let series_rows: Vec<Vec<f64>> = result
        .output
        .series
        .iter()
        .map(|r| vec![r.step as f64, r.t, r.dt, r.m, r.xi, r.kappa, r.l2, r.linf])
        .collect();
    write_csv(
        &track_file("series.csv"),
        &["step", "t", "dt", "m", "xi", "kappa", "l2", "linf"],
        &series_rows,
    )?;

    for (i, snap) in result.output.snapshots.iter().enumerate() {
        write_snapshot(&track_file(&format!("snapshot_{i:03}.bhf")), snap)?;
    }

    let mut frame_rows = Vec::new();
    for f in &result.frames {
        for (x, u) in f.window_x.iter().zip(&f.window_u) {
            frame_rows.push(vec![f.s, *x, *u]);
        }
    }
    write_csv(&track_file("frames.csv"), &["s", "X", "U"], &frame_rows)?;

    let mod_rows: Vec<Vec<f64>> = result
        .track
        .entries
        .iter()
        .map(|e| {
            vec![
                e.t, e.m, e.s, e.tau, e.xi, e.kappa, e.tau_dot_pred, e.tau_dot_meas,
                e.xi_dot_pred, e.xi_dot_meas,
            ]
        })
        .collect();
    write_csv(
        &track_file("modulation.csv"),
        &[
            "t", "m", "s", "tau", "xi", "kappa", "tau_dot_pred", "tau_dot_meas", "xi_dot_pred",
            "xi_dot_meas",
        ],
        &mod_rows,
    )?;

    write_json(&track_file("audit.json"), &result.audit)?;
    write_json(&track_file("tstar.json"), &result.fit)?;
    if let Some(conv) = &result.convergence {
        write_json(&track_file("convergence.json"), conv)?;
    }
    write_json(&track_file("cusp.json"), &result.cusp)?;
    write_json(&track_file("modulation_residuals.json"), &result.modulation)?;
    write_json(&track_file("bootstrap.json"), &result.bootstrap)?;
    write_json(&track_file("interpolation.json"), &result.interpolation)?;
    write_json(&track_file("rate.json"), &result.rate)?;
    if let Some(lag) = &result.lagrangian {
        write_json(&track_file("lagrangian.json"), lag)?;
    }

    let mut report = result.summary();
    artifacts.push("report.json".to_string());
    report.artifacts = artifacts;
    write_json(&dir.join("report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub n: usize,
    pub t_star: f64,
    pub slope: f64,
    pub nu_hat: f64,
    pub nu_dev: f64,
    pub cusp_exponent: f64,
    pub final_sup_dist: f64,
    pub worst_near_middle_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<String>,
    /// Fitted slope of log |T*| against log epsilon (positive: |T*|
    /// decreases with epsilon).
    pub tstar_loglog_slope: Option<f64>,
    pub tstar_decreasing: Option<bool>,
}

/// Run an amplitude sweep over the given configurations (>= 3), isolating
/// per-run failures, and fit the |T*| vs epsilon trend.
pub fn sweep(configs: &[RunConfig]) -> SweepView {
    let mut results = Vec::new();
    let mut failures = Vec::new();
    for cfg in configs {
        match run(cfg) {
            Ok(r) => results.push(r),
            Err(e) => failures.push(format!("epsilon {}: {e}", cfg.data.epsilon)),
        }
    }
    SweepView { results, failures }
}

/// Sweep results with per-run failures kept aside.
#[derive(Debug)]
pub struct SweepView {
    pub results: Vec<RunResult>,
    pub failures: Vec<String>,
}

impl SweepView {
    pub fn report(&self) -> Result<SweepReport> {
        if self.results.len() + self.failures.len() < 3 {
            return Err(BhError::Parameter("sweep needs >= 3 configurations".into()));
        }
        let mut rows = Vec::new();
        for r in &self.results {
            let worst_margin = r
                .bootstrap
                .items
                .iter()
                .filter(|i| i.region == "near" || i.region == "middle")
                .map(|i| i.margin)
                .filter(|m| m.is_finite())
                .fold(f64::INFINITY, f64::min);
            let nu = r.frames.last().map(|f| f.nu_hat).unwrap_or(f64::NAN);
            rows.push(SweepRow {
                epsilon: r.config.data.epsilon,
                n: r.config.grid.n,
                t_star: r.fit.t_star,
                slope: r.fit.slope,
                nu_hat: nu,
                nu_dev: (nu - 6.0).abs(),
                cusp_exponent: r.cusp.exponent_mean,
                final_sup_dist: r.frames.last().map(|f| f.sup_dist).unwrap_or(f64::NAN),
                worst_near_middle_margin: worst_margin,
            });
        }
        let (slope, decreasing) = if rows.len() >= 2 {
            let xs: Vec<f64> = rows.iter().map(|r| r.epsilon.ln()).collect();
            let ys: Vec<f64> = rows.iter().map(|r| r.t_star.abs().max(1e-300).ln()).collect();
            let n = xs.len() as f64;
            let xbar = xs.iter().sum::<f64>() / n;
            let ybar = ys.iter().sum::<f64>() / n;
            let mut sxx = 0.0;
            let mut sxy = 0.0;
            for (&x, &y) in xs.iter().zip(&ys) {
                sxx += (x - xbar) * (x - xbar);
                sxy += (x - xbar) * (y - ybar);
            }
            let slope = sxy / sxx;
            let mut sorted = rows.clone();
            sorted.sort_by(|a, b| a.epsilon.partial_cmp(&b.epsilon).unwrap());
            let dec = sorted.windows(2).all(|w| w[0].t_star.abs() <= w[1].t_star.abs());
            (Some(slope), Some(dec))
        } else {
            (None, None)
        };
        Ok(SweepReport {
            rows,
            failures: self.failures.clone(),
            tstar_loglog_slope: slope,
            tstar_decreasing: decreasing,
        })
    }
}

/// Write sweep.csv alongside the JSON summary.
pub fn write_sweep(report: &SweepReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let rows: Vec<Vec<f64>> = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.epsilon,
                r.n as f64,
                r.t_star,
                r.slope,
                r.nu_hat,
                r.nu_dev,
                r.cusp_exponent,
                r.final_sup_dist,
                r.worst_near_middle_margin,
            ]
        })
        .collect();
    write_csv(
        &dir.join("sweep.csv"),
        &[
            "epsilon", "n", "t_star", "slope", "nu_hat", "nu_dev", "cusp_exponent",
            "final_sup_dist", "worst_near_middle_margin",
        ],
        &rows,
    )?;
    write_json(&dir.join("sweep.json"), report)
}
