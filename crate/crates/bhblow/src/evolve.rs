//! Pseudo-spectral time integration of the Burgers-Hilbert equation
//!
//! ```text
//!     u_t + u u_x = H[u]
//! ```
//!
//! on the periodic domain `[-L, L)`.  The nonlinear term is computed
//! pseudo-spectrally with a 2/3-rule dealiased product, and time stepping is
//! classical fourth-order Runge-Kutta with an adaptive step
//!
//! ```text
//!     dt = min(cfl * dx / ||u||_inf,  slope_factor / m(t)),
//! ```
//!
//! where `m(t) = -min_x u_x(x,t)` is the maximal negative slope.  As the
//! solution approaches gradient blowup, `m -> infinity` like `1/(T* - t)`,
//! so the second term enforces a fixed resolution per doubling of the slope.
//!
//! The integrator records a time series of slope diagnostics every step and
//! captures full snapshots of the state on a geometric schedule in `m`,
//! stopping when a target slope is reached, when the shock width `1/m`
//! approaches the grid scale, or when a step budget is exhausted.

use serde::{Deserialize, Serialize};

use crate::error::{BhError, Result};
use crate::grid::Field;
use crate::hilbert::hilbert_multiplier;

/// Which right-hand side to integrate.
///
/// The reduced modes serve as oracles: `LinearOnly` has the closed-form
/// solution `u(t) = u0 cos t + H[u0] sin t` (so the flow is 2π-periodic),
/// and `BurgersOnly` blows up along characteristics with
/// `m(t) = m0 / (1 - m0 (t - t0))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Full,
    BurgersOnly,
    LinearOnly,
}

/// Evaluate the right-hand side `-u u_x + H[u]` (or a reduced version).
pub fn rhs(u: &Field, mode: Mode) -> Result<Field> {
    match mode {
        Mode::LinearOnly => hilbert_multiplier(u),
        Mode::BurgersOnly => {
            let ux = u.derivative(1)?;
            Ok(u.dealiased_product(&ux)?.scaled(-1.0))
        }
        Mode::Full => {
            let ux = u.derivative(1)?;
            let adv = u.dealiased_product(&ux)?;
            hilbert_multiplier(u)?.add_scaled(-1.0, &adv)
        }
    }
}

/// Step-size and stopping policy for [`run_to_blowup`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StepControl {
    /// Advective CFL number multiplying `dx / ||u||_inf`.
    pub cfl: f64,
    /// Cap `dt <= slope_factor / m` so each slope-doubling takes many steps.
    pub slope_factor: f64,
    /// Stop once `m >= m_stop`.
    pub m_stop: f64,
    /// Stop once the shock width `1/m` falls below `resolution_guard * dx`.
    pub resolution_guard: f64,
    /// Hard cap on the number of time steps.
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            cfl: 0.3,
            slope_factor: 0.2,
            m_stop: f64::INFINITY,
            resolution_guard: 8.0,
            max_steps: 2_000_000,
        }
    }
}

impl StepControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(BhError::Parameter(format!("cfl {} not in (0, 1]", self.cfl)));
        }
        if !(self.slope_factor > 0.0 && self.slope_factor <= 1.0) {
            return Err(BhError::Parameter(format!(
                "slope_factor {} not in (0, 1]",
                self.slope_factor
            )));
        }
        if !(self.m_stop > 0.0) {
            return Err(BhError::Parameter(format!("m_stop {} must be positive", self.m_stop)));
        }
        if !(self.resolution_guard >= 2.0) {
            return Err(BhError::Parameter(format!(
                "resolution_guard {} must be >= 2",
                self.resolution_guard
            )));
        }
        Ok(())
    }
}

/// Physical-space state at a single time.
#[derive(Debug, Clone)]
pub struct PhysState {
    pub t: f64,
    pub u: Field,
}

/// Location and depth of the steepest negative slope.
///
/// The grid argmin of `u_x` is refined by parabolic interpolation through the
/// three neighbouring samples and then polished with Newton steps on the
/// spectral interpolant of `u_xx` (the slope minimum solves `u_xx = 0`).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlopeMin {
    /// Refined location `xi` of the slope minimum.
    pub xi: f64,
    /// Maximal negative slope `m = -u_x(xi)`.
    pub m: f64,
}

/// Locate the steepest negative slope of `u` given its derivative fields.
///
/// `newton_steps` polishing iterations of `xi <- xi - u_xx(xi)/u_xxx(xi)`
/// are applied after the parabolic refinement; one suffices for time-series
/// records, two are used when extracting self-similar frames.
pub fn locate_slope_min(ux: &Field, uxx: &Field, uxxx: &Field, newton_steps: usize) -> Result<SlopeMin> {
    let grid = ux.grid();
    let n = grid.n();
    let dx = grid.dx();
    let samples = ux.samples();
    let mut jmin = 0usize;
    for (j, &v) in samples.iter().enumerate() {
        if v < samples[jmin] {
            jmin = j;
        }
    }
    let ym = samples[(jmin + n - 1) % n];
    let y0 = samples[jmin];
    let yp = samples[(jmin + 1) % n];
    let den = ym - 2.0 * y0 + yp;
    let mut xi = grid.x(jmin);
    if den.abs() > f64::EPSILON * (ym.abs() + y0.abs() + yp.abs()) {
        let d = (0.5 * (ym - yp) / den).clamp(-0.5, 0.5);
        xi += d * dx;
    }
    for _ in 0..newton_steps {
        let c = uxx.interp(xi);
        let j = uxxx.interp(xi);
        if j.abs() < f64::EPSILON {
            break;
        }
        let step = (c / j).clamp(-dx, dx);
        xi -= step;
    }
    xi = grid.wrap(xi);
    let m = -ux.interp(xi);
    if !m.is_finite() {
        return Err(BhError::Numeric("slope minimum is not finite".into()));
    }
    Ok(SlopeMin { xi, m })
}

/// One time-series record, written every accepted step.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Record {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    /// Maximal negative slope `m(t)`.
    pub m: f64,
    /// Refined location of the slope minimum.
    pub xi: f64,
    /// Solution value at the slope minimum, `kappa = u(xi)`.
    pub kappa: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Why the integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The slope target `m_stop` was reached (the intended stop).
    SlopeTarget,
    /// The shock width `1/m` fell below `resolution_guard * dx`.
    ResolutionGuard,
    /// The step budget was exhausted.
    MaxSteps,
}

/// Output of [`run_to_blowup`]: the per-step time series, the snapshots
/// captured on the geometric slope schedule (always including the initial
/// and final states), and the stop reason.
#[derive(Debug)]
pub struct RunOutput {
    pub series: Vec<Record>,
    pub snapshots: Vec<PhysState>,
    pub stop: StopReason,
}

/// Snapshot schedule: capture the state whenever `m` first crosses
/// `m_first * ratio^k` for `k = 0, 1, 2, ...`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SnapshotSchedule {
    pub m_first: f64,
    pub ratio: f64,
}

impl Default for SnapshotSchedule {
    fn default() -> Self {
        // 2^(1/4) gives four snapshots per slope doubling, i.e. frame
        // spacing of about 0.17 in the self-similar time s = log m.
        SnapshotSchedule { m_first: 100.0, ratio: std::f64::consts::SQRT_2.sqrt() }
    }
}

fn rk4_step(state: &PhysState, dt: f64, mode: Mode) -> Result<PhysState> {
    let u = &state.u;
    let k1 = rhs(u, mode)?;
    let k2 = rhs(&u.add_scaled(0.5 * dt, &k1)?, mode)?;
    let k3 = rhs(&u.add_scaled(0.5 * dt, &k2)?, mode)?;
    let k4 = rhs(&u.add_scaled(dt, &k3)?, mode)?;
    // add_scaled validates finiteness, so scheme blowup surfaces as a
    // numeric error naming the offending stage.
    let unew = u
        .add_scaled(dt / 6.0, &k1)?
        .add_scaled(dt / 3.0, &k2)?
        .add_scaled(dt / 3.0, &k3)?
        .add_scaled(dt / 6.0, &k4)?;
    Ok(PhysState { t: state.t + dt, u: unew })
}

fn diagnose(state: &PhysState, step: usize, dt: f64) -> Result<Record> {
    let ux = state.u.derivative(1)?;
    let uxx = state.u.derivative(2)?;
    let uxxx = state.u.derivative(3)?;
    let sm = locate_slope_min(&ux, &uxx, &uxxx, 1)?;
    let (l2, linf) = state.u.norms();
    Ok(Record {
        step,
        t: state.t,
        dt,
        m: sm.m,
        xi: sm.xi,
        kappa: state.u.interp(sm.xi),
        l2,
        linf,
    })
}

/// Integrate a single RK4 step with the adaptive `dt` policy (no records).
/// Exposed for the time-step convergence tests.
pub fn adaptive_step(state: &PhysState, ctl: &StepControl, mode: Mode) -> Result<PhysState> {
    let (_, linf) = state.u.norms();
    let ux = state.u.derivative(1)?;
    let m = -ux.samples().iter().cloned().fold(f64::INFINITY, f64::min);
    let dx = state.u.grid().dx();
    let dt_adv = ctl.cfl * dx / linf.max(f64::EPSILON);
    let dt_slope = ctl.slope_factor / m.max(f64::EPSILON);
    rk4_step(state, dt_adv.min(dt_slope), mode)
}

/// Integrate from `state` up to exactly `t_end` (final step clipped).
pub fn run_to_time(state: &PhysState, t_end: f64, ctl: &StepControl, mode: Mode) -> Result<PhysState> {
    ctl.validate()?;
    if t_end <= state.t {
        return Err(BhError::Parameter(format!(
            "t_end {} must exceed initial time {}",
            t_end, state.t
        )));
    }
    let dx = state.u.grid().dx();
    let mut cur = state.clone();
    for _ in 0..ctl.max_steps {
        let (_, linf) = cur.u.norms();
        let ux = cur.u.derivative(1)?;
        let m = -ux.samples().iter().cloned().fold(f64::INFINITY, f64::min);
        let dt_adv = ctl.cfl * dx / linf.max(f64::EPSILON);
        let dt_slope = ctl.slope_factor / m.max(f64::EPSILON);
        let dt = dt_adv.min(dt_slope).min(t_end - cur.t);
        cur = rk4_step(&cur, dt, mode)?;
        if cur.t >= t_end - f64::EPSILON * t_end.abs().max(1.0) {
            cur.t = t_end;
            return Ok(cur);
        }
    }
    Err(BhError::Partial("step budget exhausted before t_end".into()))
}

/// Integrate toward gradient blowup, recording diagnostics every step and
/// capturing snapshots on the geometric slope schedule.
pub fn run_to_blowup(
    u0: PhysState,
    ctl: &StepControl,
    mode: Mode,
    schedule: &SnapshotSchedule,
) -> Result<RunOutput> {
    ctl.validate()?;
    if !(schedule.ratio > 1.0) || !(schedule.m_first > 0.0) {
        return Err(BhError::Parameter(format!(
            "snapshot schedule needs ratio > 1 and m_first > 0, got ratio={} m_first={}",
            schedule.ratio, schedule.m_first
        )));
    }
    let dx = u0.u.grid().dx();
    let mut series = Vec::new();
    let mut snapshots = vec![u0.clone()];
    let mut next_m = schedule.m_first;
    let mut cur = u0;

    let rec0 = diagnose(&cur, 0, 0.0)?;
    let mut m = rec0.m;
    series.push(rec0);
    while next_m <= m {
        next_m *= schedule.ratio;
    }

    let mut stop = StopReason::MaxSteps;
    for step in 1..=ctl.max_steps {
        if m >= ctl.m_stop {
            stop = StopReason::SlopeTarget;
            break;
        }
        if 1.0 / m < ctl.resolution_guard * dx {
            stop = StopReason::ResolutionGuard;
            break;
        }
        let last = series.last().unwrap();
        let dt_adv = ctl.cfl * dx / last.linf.max(f64::EPSILON);
        let dt_slope = ctl.slope_factor / m.max(f64::EPSILON);
        let dt = dt_adv.min(dt_slope);
        cur = rk4_step(&cur, dt, mode)?;
        let rec = diagnose(&cur, step, dt)?;
        m = rec.m;
        series.push(rec);
        if m >= next_m {
            snapshots.push(cur.clone());
            while next_m <= m {
                next_m *= schedule.ratio;
            }
        }
    }
    snapshots.push(cur);
    Ok(RunOutput { series, snapshots, stop })
}

/// Least-squares blowup-time fit.
///
/// Across the final decade of slopes, `1/m(t)` is fitted linearly against
/// `t`; the blowup rate `m ~ 1/(T* - t)` predicts slope `-1` and root `T*`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TstarFit {
    /// Extrapolated blowup time (root of the linear fit).
    pub t_star: f64,
    /// Fitted slope of `1/m` against `t`; the self-similar rate is `-1`.
    pub slope: f64,
    /// Coefficient of determination of the linear fit.
    pub r_squared: f64,
    pub records_used: usize,
    /// Set when `r_squared < 0.99`.
    pub low_confidence: bool,
}

/// Fit `1/m` vs `t` over the final decade of slopes in the series.
pub fn extrapolate_t_star(series: &[Record]) -> Result<TstarFit> {
    let m_end = series.last().map(|r| r.m).unwrap_or(0.0);
    let sel: Vec<&Record> = series.iter().filter(|r| r.m >= m_end / 10.0).collect();
    if sel.len() < 20 {
        return Err(BhError::Parameter(format!(
            "blowup-time fit needs >= 20 records in the final slope decade, found {}",
            sel.len()
        )));
    }
    let n = sel.len() as f64;
    let (mut st, mut sy) = (0.0, 0.0);
    for r in &sel {
        st += r.t;
        sy += 1.0 / r.m;
    }
    let (tbar, ybar) = (st / n, sy / n);
    let (mut stt, mut sty) = (0.0, 0.0);
    for r in &sel {
        stt += (r.t - tbar) * (r.t - tbar);
        sty += (r.t - tbar) * (1.0 / r.m - ybar);
    }
    if stt == 0.0 {
        return Err(BhError::Numeric("degenerate time axis in blowup fit".into()));
    }
    let slope = sty / stt;
    let intercept = ybar - slope * tbar;
    if slope == 0.0 {
        return Err(BhError::Numeric("zero slope in blowup fit".into()));
    }
    let t_star = -intercept / slope;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for r in &sel {
        let y = 1.0 / r.m;
        let pred = intercept + slope * r.t;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - ybar) * (y - ybar);
    }
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 0.0 };
    Ok(TstarFit {
        t_star,
        slope,
        r_squared,
        records_used: sel.len(),
        low_confidence: r_squared < 0.99,
    })
}
