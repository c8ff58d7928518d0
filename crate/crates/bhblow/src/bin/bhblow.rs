//! Command-line surface for the Burgers-Hilbert blowup laboratory.
//!
//! Subcommands: make-data, audit-data, evolve, selfsim, bootstrap-check,
//! profile-check, sweep, report.  Exit codes: 0 ok, 2 configuration error,
//! 3 partial results, 4 numeric failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use bhblow::config::RunConfig;
use bhblow::error::{BhError, Result};
use bhblow::evolve::{PhysState, Record};
use bhblow::experiment;
use bhblow::initial_data::{apply_perturbation, audit_u0, build_u0, DataSpec, Perturbation};
use bhblow::io::{read_snapshot, write_csv, write_json, write_snapshot};
use bhblow::profile;
use bhblow::selfsim::{
    build_track, convergence_to_profile, cusp_exponent, extract_frame, extrapolate_x_star,
    modulation_residuals,
};
use bhblow::verify::{check_bootstrap, BootstrapConfig, Status};

#[derive(Parser)]
#[command(name = "bhblow", about = "Shock formation laboratory for the Burgers-Hilbert equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build profile-shaped initial data and write a BHF1 snapshot.
    MakeData {
        #[arg(long, default_value_t = 1e-2)]
        epsilon: f64,
        #[arg(long, default_value_t = 1 << 18)]
        n: usize,
        #[arg(long, default_value_t = 4.0)]
        l_dom: f64,
        /// Add the random tail perturbation.
        #[arg(long)]
        perturb: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Audit a data snapshot against the admissibility checklist.
    AuditData {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 1e-2)]
        epsilon: f64,
        #[arg(long, default_value_t = 50.0)]
        m_big: f64,
    },
    /// Run the full pipeline (integration + all diagnostics) into a directory.
    Evolve {
        /// Builtin preset name (burgers-oracle, bh-main, bh-sweep-*).
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Path to a RunConfig JSON file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-extract self-similar diagnostics from a run directory.
    Selfsim {
        #[arg(long)]
        run: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        window: f64,
    },
    /// Evaluate the bootstrap-inequality ledger on a run directory.
    BootstrapCheck {
        #[arg(long)]
        run: PathBuf,
        #[arg(long, default_value_t = 50.0)]
        m_big: f64,
        #[arg(long, default_value_t = 1e-2)]
        epsilon: f64,
    },
    /// Check the closed-form profile bounds on the standard sampling plan.
    ProfileCheck {
        #[arg(long, default_value_t = 1e6)]
        xmax: f64,
        #[arg(long, default_value_t = 4000)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the amplitude sweep presets and write sweep.csv / sweep.json.
    Sweep {
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the summary report of a run directory.
    Report {
        #[arg(long)]
        run: PathBuf,
    },
}

fn load_series(dir: &Path) -> Result<Vec<Record>> {
    let text = std::fs::read_to_string(dir.join("series.csv"))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| BhError::Format("empty series.csv".into()))?;
    if header != "step,t,dt,m,xi,kappa,l2,linf" {
        return Err(BhError::Format(format!("unexpected series.csv header: {header}")));
    }
    let mut records = Vec::new();
    for line in lines {
        let cells: Vec<f64> = line
            .split(',')
            .map(|c| c.parse::<f64>().map_err(|e| BhError::Format(format!("series.csv: {e}"))))
            .collect::<Result<_>>()?;
        if cells.len() != 8 {
            return Err(BhError::Format("series.csv row width".into()));
        }
        records.push(Record {
            step: cells[0] as usize,
            t: cells[1],
            dt: cells[2],
            m: cells[3],
            xi: cells[4],
            kappa: cells[5],
            l2: cells[6],
            linf: cells[7],
        });
    }
    Ok(records)
}

fn load_snapshots(dir: &Path) -> Result<Vec<PhysState>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .map(|n| n.starts_with("snapshot_") && n.ends_with(".bhf"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(BhError::Partial(format!("no snapshots in {}", dir.display())));
    }
    paths.iter().map(|p| read_snapshot(p)).collect()
}

fn run_cli() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::MakeData { epsilon, n, l_dom, perturb, seed, out } => {
            let grid = bhblow::grid::SpectralGrid::new(n, l_dom)?;
            let spec = DataSpec::new(epsilon, 50.0);
            let mut u0 = build_u0(&spec, grid)?;
            if perturb {
                u0 = apply_perturbation(&u0, &spec, &Perturbation { enabled: true, seed })?;
            }
            write_snapshot(&out, &PhysState { t: spec.t0(), u: u0 })?;
            println!("wrote {} (n={n}, L={l_dom}, t0={})", out.display(), spec.t0());
        }
        Command::AuditData { data, epsilon, m_big } => {
            let state = read_snapshot(&data)?;
            let spec = DataSpec::new(epsilon, m_big);
            let report = audit_u0(&state.u, &spec)?;
            for item in &report.items {
                println!(
                    "{} {:<32} measured {: >12.4e}  bound {: >12.4e}",
                    if item.pass { "PASS" } else { "FAIL" },
                    item.name,
                    item.measured,
                    item.bound,
                );
            }
            if !report.all_pass {
                return Err(BhError::Numeric("data audit failed".into()));
            }
        }
        Command::Evolve { preset, config, out } => {
            let cfg = match (preset, config) {
                (Some(name), None) => experiment::preset(&name)?,
                (None, Some(path)) => RunConfig::from_file(&path)?,
                _ => return Err(BhError::Config("pass exactly one of --preset/--config".into())),
            };
            let result = experiment::run(&cfg)?;
            let report = experiment::write_artifacts(&result, &out)?;
            println!(
                "stop={:?} T*={:.6e} slope={:.4} nu_hat={:?} cusp={:.4} [{:.1}s]",
                report.stop_reason,
                report.t_star.unwrap_or(f64::NAN),
                report.slope.unwrap_or(f64::NAN),
                report.nu_hat,
                report.cusp_exponent.unwrap_or(f64::NAN),
                report.wall_time_s,
            );
        }
        Command::Selfsim { run, window } => {
            let cfg = RunConfig::from_file(&run.join("config.json"))?;
            let snapshots = load_snapshots(&run)?;
            let series = load_series(&run)?;
            let track = build_track(&snapshots, cfg.mode)?;
            let mut opts = cfg.frame.options();
            opts.window = window;
            let dx = snapshots[0].u.grid().dx();
            let mut frames = Vec::new();
            for (i, e) in track.entries.iter().enumerate() {
                if e.m >= 0.999 * cfg.schedule.m_first && dx * e.m.powf(1.5) <= cfg.frame.dx_max {
                    frames.push(extract_frame(&snapshots[i], &opts)?);
                }
            }
            if frames.is_empty() {
                return Err(BhError::Partial("no valid frames in run".into()));
            }
            let mut frame_rows = Vec::new();
            for f in &frames {
                for (x, u) in f.window_x.iter().zip(&f.window_u) {
                    frame_rows.push(vec![f.s, *x, *u]);
                }
            }
            write_csv(&run.join("frames.csv"), &["s", "X", "U"], &frame_rows)?;
            write_json(&run.join("modulation_residuals.json"), &modulation_residuals(&track)?)?;
            match convergence_to_profile(&frames, cfg.data.epsilon) {
                Ok(conv) => write_json(&run.join("convergence.json"), &conv)?,
                Err(e) => println!("convergence report unavailable: {e}"),
            }
            let fit = bhblow::evolve::extrapolate_t_star(&series)?;
            let x_star = extrapolate_x_star(&series, fit.t_star)?;
            let cusp = cusp_exponent(snapshots.last().unwrap(), x_star, &cfg.cusp)?;
            write_json(&run.join("cusp.json"), &cusp)?;
            println!(
                "{} frames; final sup-dist {:.4e}; cusp exponent {:.4}",
                frames.len(),
                frames.last().unwrap().sup_dist,
                cusp.exponent_mean,
            );
        }
        Command::BootstrapCheck { run, m_big, epsilon } => {
            let cfg = RunConfig::from_file(&run.join("config.json"))?;
            let snapshots = load_snapshots(&run)?;
            let series = load_series(&run)?;
            let track = build_track(&snapshots, cfg.mode)?;
            let dx = snapshots[0].u.grid().dx();
            let mut frames = Vec::new();
            let mut states = Vec::new();
            for (i, e) in track.entries.iter().enumerate() {
                if e.m >= 0.999 * cfg.schedule.m_first && dx * e.m.powf(1.5) <= cfg.frame.dx_max {
                    frames.push(extract_frame(&snapshots[i], &cfg.frame.options())?);
                    states.push(snapshots[i].clone());
                }
            }
            if frames.is_empty() {
                return Err(BhError::Partial("no valid frames in run".into()));
            }
            let t_star = bhblow::evolve::extrapolate_t_star(&series).ok().map(|f| f.t_star);
            let bcfg = BootstrapConfig { m_big, epsilon };
            let report = check_bootstrap(&frames, &states, &track, t_star, &bcfg)?;
            for item in &report.items {
                let tag = match item.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Unchecked => "----",
                };
                println!(
                    "{tag} {:<20} {:<12} margin {: >+10.4}  measured {: >12.4e}  bound {: >12.4e}",
                    item.id, item.region, item.margin, item.measured, item.bound,
                );
            }
            println!(
                "{} pass / {} fail / {} unchecked over {} frames",
                report.pass_count, report.fail_count, report.unchecked_count, report.frames_checked,
            );
            write_json(&run.join("bootstrap.json"), &report)?;
        }
        Command::ProfileCheck { xmax, samples, out } => {
            let plan = profile::sampling_plan(xmax, samples);
            let report = profile::check_profile_bounds(&plan);
            for b in &report.checks {
                println!(
                    "{} {:<24} worst margin {:+.6e} at X = {:+.4e}",
                    if b.pass { "PASS" } else { "FAIL" },
                    b.name,
                    b.worst_margin,
                    b.worst_x,
                );
            }
            if let Some(path) = out {
                write_json(&path, &report)?;
            }
            if !report.all_pass {
                return Err(BhError::Numeric("profile bounds violated".into()));
            }
        }
        Command::Sweep { out } => {
            let configs: Vec<RunConfig> = ["bh-sweep-1e-1", "bh-sweep-3e-2", "bh-sweep-1e-2"]
                .iter()
                .map(|n| experiment::preset(n))
                .collect::<Result<_>>()?;
            let view = experiment::sweep(&configs);
            let report = view.report()?;
            experiment::write_sweep(&report, &out)?;
            for row in &report.rows {
                println!(
                    "epsilon {:>8.1e}  T* {:+.4e}  nu_hat {:.4}  cusp {:+.4}",
                    row.epsilon, row.t_star, row.nu_hat, row.cusp_exponent,
                );
            }
            println!(
                "|T*| log-log slope vs epsilon: {:?} (decreasing: {:?})",
                report.tstar_loglog_slope, report.tstar_decreasing,
            );
            if !report.failures.is_empty() {
                for f in &report.failures {
                    eprintln!("failed: {f}");
                }
                return Err(BhError::Partial("sweep completed with per-run failures".into()));
            }
        }
        Command::Report { run } => {
            let text = std::fs::read_to_string(run.join("report.json"))?;
            println!("{text}");
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_cli() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
