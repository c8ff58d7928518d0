//! Self-similar diagnostics: modulation tracking, frame extraction,
//! convergence and cusp measurements, and Lagrangian trajectory checks.
//!
//! The physical solution is compared against the self-similar ansatz
//!
//! ```text
//!     u(x,t) = e^{-s/2} U(X, s) + kappa(t),   X = (x - xi(t)) e^{3s/2},
//! ```
//!
//! with e^{-s} = tau(t) - t.  The frame is fixed by the constraints
//! U(0,s) = 0, dU/dX(0,s) = -1, d2U/dX2(0,s) = 0, which pins the dynamic
//! variables to measurable quantities of u: xi-hat is the location of the
//! steepest slope, m-hat = -u_x(xi-hat) fixes tau-hat - t = 1/m-hat and
//! s-hat = log m-hat, and kappa-hat = u(xi-hat).  Derivatives transform as
//!
//! ```text
//!     d^j U / dX^j (X) = m^{-(3j-1)/2} d^j u / dx^j (xi + X m^{-3/2}).
//! ```
//!
//! The blowup profile is the rescaled Burgers profile Ubar_nu with
//! nu-hat = u_xxx(xi-hat) / m-hat^4; convergence is measured as the sup
//! distance between the extracted U and Ubar_nu on a fixed window in X.

use serde::Serialize;

use crate::error::{BhError, Result};
use crate::evolve::{locate_slope_min, Mode, PhysState, Record};
use crate::grid::Field;
use crate::hilbert::hilbert_multiplier;
use crate::profile;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Least-squares line through (x, y); returns (slope, intercept, r_squared).
fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(BhError::Parameter("linear fit needs >= 2 points".into()));
    }
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    if sxx == 0.0 {
        return Err(BhError::Numeric("degenerate abscissa in linear fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let p = intercept + slope * x;
        ss_res += (y - p) * (y - p);
        ss_tot += (y - ybar) * (y - ybar);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((slope, intercept, r2))
}

/// Per-snapshot modulation state and ODE residual ingredients.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TrackEntry {
    pub t: f64,
    /// Maximal negative slope m-hat.
    pub m: f64,
    /// Self-similar time s-hat = log m-hat.
    pub s: f64,
    /// Blowup-time estimate tau-hat = t + 1/m-hat.
    pub tau: f64,
    /// Blowup-location estimate (steepest-slope position).
    pub xi: f64,
    /// Amplitude kappa-hat = u(xi-hat).
    pub kappa: f64,
    /// H[u_x](xi-hat); zero in Burgers-only mode.
    pub h_ux: f64,
    /// H[u_xx](xi-hat); zero in Burgers-only mode.
    pub h_uxx: f64,
    /// u_xxx(xi-hat).
    pub u3x: f64,
    /// Modulation ODE prediction tau-dot = H[u_x](xi-hat)/m-hat^2.
    pub tau_dot_pred: f64,
    /// Modulation ODE prediction xi-dot = kappa-hat - H[u_xx]/u_xxx at xi-hat.
    pub xi_dot_pred: f64,
    /// Finite-difference d(tau-hat)/dt over the snapshot schedule.
    pub tau_dot_meas: f64,
    /// Finite-difference d(xi-hat)/dt over the snapshot schedule.
    pub xi_dot_meas: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulationTrack {
    pub entries: Vec<TrackEntry>,
}

/// Three-point derivative on a nonuniform stencil (second order), one-sided
/// two-point slopes at the ends.  The snapshot schedule is geometric in m,
/// so the stencil spacings are genuinely unequal.
fn nonuniform_derivative(ts: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = ts.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    out[0] = (ys[1] - ys[0]) / (ts[1] - ts[0]);
    out[n - 1] = (ys[n - 1] - ys[n - 2]) / (ts[n - 1] - ts[n - 2]);
    for i in 1..n - 1 {
        let h1 = ts[i] - ts[i - 1];
        let h2 = ts[i + 1] - ts[i];
        out[i] = -h2 / (h1 * (h1 + h2)) * ys[i - 1] + (h2 - h1) / (h1 * h2) * ys[i]
            + h1 / (h2 * (h1 + h2)) * ys[i + 1];
    }
    out
}

/// Build the modulation track from a snapshot sequence.
///
/// The Hilbert source terms are dropped in Burgers-only mode, where the
/// modulation ODEs degenerate to tau-dot = 0 and xi-dot = kappa-hat.
pub fn build_track(snapshots: &[PhysState], mode: Mode) -> Result<ModulationTrack> {
    if snapshots.len() < 2 {
        return Err(BhError::Parameter(format!(
            "modulation track needs >= 2 snapshots, got {}",
            snapshots.len()
        )));
    }
    let mut entries = Vec::with_capacity(snapshots.len());
    for state in snapshots {
        let ux = state.u.derivative(1)?;
        let uxx = state.u.derivative(2)?;
        let uxxx = state.u.derivative(3)?;
        let sm = locate_slope_min(&ux, &uxx, &uxxx, 2)?;
        if sm.m <= 0.0 {
            return Err(BhError::Numeric("nonpositive maximal slope".into()));
        }
        let (h_ux, h_uxx) = if mode == Mode::BurgersOnly {
            (0.0, 0.0)
        } else {
            (
                hilbert_multiplier(&ux)?.interp(sm.xi),
                hilbert_multiplier(&uxx)?.interp(sm.xi),
            )
        };
        let u3x = uxxx.interp(sm.xi);
        let kappa = state.u.interp(sm.xi);
        let xi_dot_pred = if u3x.abs() > f64::EPSILON {
            kappa - h_uxx / u3x
        } else {
            kappa
        };
        entries.push(TrackEntry {
            t: state.t,
            m: sm.m,
            s: sm.m.ln(),
            tau: state.t + 1.0 / sm.m,
            xi: sm.xi,
            kappa,
            h_ux,
            h_uxx,
            u3x,
            tau_dot_pred: h_ux / (sm.m * sm.m),
            xi_dot_pred,
            tau_dot_meas: 0.0,
            xi_dot_meas: 0.0,
        });
    }
    let ts: Vec<f64> = entries.iter().map(|e| e.t).collect();
    let taus: Vec<f64> = entries.iter().map(|e| e.tau).collect();
    let xis: Vec<f64> = entries.iter().map(|e| e.xi).collect();
    let tau_dots = nonuniform_derivative(&ts, &taus);
    let xi_dots = nonuniform_derivative(&ts, &xis);
    for (i, e) in entries.iter_mut().enumerate() {
        e.tau_dot_meas = tau_dots[i];
        e.xi_dot_meas = xi_dots[i];
    }
    Ok(ModulationTrack { entries })
}

/// One row of the modulation residual report (interior entries only).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModResidualRow {
    pub s: f64,
    pub tau_dot_pred: f64,
    pub tau_dot_meas: f64,
    /// Decay envelope e^{-3s/4} that |tau-dot| must stay under.
    pub tau_decay_bound: f64,
    pub tau_decay_ok: bool,
    pub xi_dot_pred: f64,
    pub xi_dot_meas: f64,
    /// |meas - pred| / max(|pred|, 1e-12).
    pub xi_rel_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulationReport {
    pub rows: Vec<ModResidualRow>,
    pub span_s: f64,
    pub tau_decay_all_ok: bool,
    pub max_abs_tau_dot_meas: f64,
    /// The 10% predicted-vs-measured xi-dot comparison applies only once
    /// the run spans >= 3 units of s; shorter runs record it as inapplicable.
    pub xi_agreement_applicable: bool,
    pub xi_agreement_ok: Option<bool>,
}

/// Compare the modulation ODE predictions against finite differences of the
/// tracked tau-hat and xi-hat.
pub fn modulation_residuals(track: &ModulationTrack) -> Result<ModulationReport> {
    let n = track.entries.len();
    if n < 5 {
        return Err(BhError::Parameter(format!(
            "modulation residuals need >= 5 consecutive snapshots, got {n}"
        )));
    }
    let mut rows = Vec::new();
    let mut tau_decay_all_ok = true;
    let mut max_tau = 0.0f64;
    for e in &track.entries[1..n - 1] {
        let bound = (-0.75 * e.s).exp();
        // Decay is judged on the ODE value: the finite-difference estimate
        // inherits slope-locator noise amplified by m and is recorded only
        // as a consistency diagnostic.
        let ok = e.tau_dot_pred.abs() <= bound;
        tau_decay_all_ok &= ok;
        max_tau = max_tau.max(e.tau_dot_meas.abs());
        rows.push(ModResidualRow {
            s: e.s,
            tau_dot_pred: e.tau_dot_pred,
            tau_dot_meas: e.tau_dot_meas,
            tau_decay_bound: bound,
            tau_decay_ok: ok,
            xi_dot_pred: e.xi_dot_pred,
            xi_dot_meas: e.xi_dot_meas,
            xi_rel_residual: (e.xi_dot_meas - e.xi_dot_pred).abs()
                / e.xi_dot_pred.abs().max(1e-12),
        });
    }
    let span_s = track.entries[n - 1].s - track.entries[0].s;
    let xi_agreement_applicable = span_s >= 3.0;
    let xi_agreement_ok = if xi_agreement_applicable {
        Some(rows.iter().all(|r| r.xi_rel_residual <= 0.1))
    } else {
        None
    };
    Ok(ModulationReport {
        rows,
        span_s,
        tau_decay_all_ok,
        max_abs_tau_dot_meas: max_tau,
        xi_agreement_applicable,
        xi_agreement_ok,
    })
}

/// Options for frame extraction.
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct FrameOptions {
    /// Half-width of the comparison window in X.
    pub window: f64,
    /// Number of uniform window samples.
    pub window_samples: usize,
}

impl Default for FrameOptions {
    fn default() -> Self {
        FrameOptions { window: 10.0, window_samples: 201 }
    }
}

/// An extracted self-similar frame.
#[derive(Debug, Clone, Serialize)]
pub struct Frame {
    pub t: f64,
    pub s: f64,
    pub m: f64,
    pub xi: f64,
    pub kappa: f64,
    /// Rescaled third derivative u_xxx(xi-hat)/m-hat^4; the profile parameter.
    pub nu_hat: f64,
    /// Effective window half-width actually used (capped by the domain).
    pub window: f64,
    pub window_x: Vec<f64>,
    pub window_u: Vec<f64>,
    /// sup over the window of |U - Ubar_{nu-hat}|.
    pub sup_dist: f64,
    /// Constraint residuals at X=0: |U(0)|, |dU(0)+1|, |d2U(0)|.
    pub residual_u0: f64,
    pub residual_du0: f64,
    pub residual_d2u0: f64,
    /// m-hat^{-1/4} ||u_x||_{L2} = ||dU/dX||_{L2}.
    pub dxu_l2_selfsim: f64,
}

/// Extract the self-similar frame from a physical snapshot.
///
/// Requires the self-similar unit length m-hat^{-3/2} to span at least four
/// grid cells; coarser states produce systematically biased frames.
pub fn extract_frame(state: &PhysState, opts: &FrameOptions) -> Result<Frame> {
    if opts.window_samples < 3 || !(opts.window > 0.0) {
        return Err(BhError::Parameter("frame window must be positive with >= 3 samples".into()));
    }
    let grid = state.u.grid();
    let ux = state.u.derivative(1)?;
    let uxx = state.u.derivative(2)?;
    let uxxx = state.u.derivative(3)?;
    let sm = locate_slope_min(&ux, &uxx, &uxxx, 2)?;
    let m = sm.m;
    if m <= 0.0 {
        return Err(BhError::Numeric("nonpositive maximal slope".into()));
    }
    let len_x = m.powf(-1.5);
    if len_x < 4.0 * grid.dx() {
        return Err(BhError::Resolution(format!(
            "self-similar unit length {:.3e} below 4 dx = {:.3e}; frame would be biased",
            len_x,
            4.0 * grid.dx()
        )));
    }
    let xi = sm.xi;
    let kappa = state.u.interp(xi);
    let nu_hat = uxxx.interp(xi) / m.powi(4);
    if !(nu_hat > 0.0) {
        return Err(BhError::Numeric(format!("nonpositive nu-hat {nu_hat}")));
    }
    // Cap the window at the self-similar image of the truncated domain.
    let cap = (0.5 * m.powf(1.5)).min((grid.half_width() - xi.abs() - 2.0 * grid.dx()) * m.powf(1.5));
    let window = opts.window.min(cap);
    let xs_w = linspace(-window, window, opts.window_samples);
    let sqrt_m = m.sqrt();
    let mut window_u = Vec::with_capacity(xs_w.len());
    let mut sup_dist = 0.0f64;
    for &xw in &xs_w {
        let u_val = sqrt_m * (state.u.interp(xi + xw * len_x) - kappa);
        sup_dist = sup_dist.max((u_val - profile::rescaled(nu_hat, xw)?).abs());
        window_u.push(u_val);
    }
    let (l2_ux, _) = ux.norms();
    Ok(Frame {
        t: state.t,
        s: m.ln(),
        m,
        xi,
        kappa,
        nu_hat,
        window,
        window_x: xs_w,
        window_u,
        sup_dist,
        residual_u0: 0.0, // U(0) = sqrt(m) (u(xi) - kappa) with kappa := u(xi)
        residual_du0: (ux.interp(xi) / m + 1.0).abs(),
        residual_d2u0: (uxx.interp(xi) / m.powf(2.5)).abs(),
        dxu_l2_selfsim: l2_ux * m.powf(-0.25),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub s: Vec<f64>,
    pub nu_hat: Vec<f64>,
    pub sup_dist: Vec<f64>,
    /// Cauchy increments |nu_{k+1} - nu_k|.
    pub nu_increments: Vec<f64>,
    pub span_s: f64,
    /// Whether the frames span >= 2 units of s (short runs record false and
    /// the trend checks below carry correspondingly less weight).
    pub span_ok: bool,
    /// sup-distance nonincreasing across the last 3 frames (10% tolerance).
    pub last3_nonincreasing: bool,
    pub final_sup_dist: f64,
    pub nu_final: f64,
    pub nu_dev: f64,
    /// Tolerance max(epsilon^{1/4}, extraction bound) for |nu-hat - 6|.
    pub nu_tol: f64,
    pub nu_ok: bool,
}

/// Convergence-to-profile trend report over a frame sequence.
pub fn convergence_to_profile(frames: &[Frame], epsilon: f64) -> Result<ConvergenceReport> {
    if frames.len() < 4 {
        return Err(BhError::Parameter(format!(
            "convergence report needs >= 4 frames, got {}",
            frames.len()
        )));
    }
    if !(epsilon > 0.0) {
        return Err(BhError::Parameter("epsilon must be positive".into()));
    }
    let s: Vec<f64> = frames.iter().map(|f| f.s).collect();
    let nu_hat: Vec<f64> = frames.iter().map(|f| f.nu_hat).collect();
    let sup_dist: Vec<f64> = frames.iter().map(|f| f.sup_dist).collect();
    let nu_increments = nu_hat.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let span_s = s.last().unwrap() - s.first().unwrap();
    let k = sup_dist.len();
    let last3_nonincreasing = sup_dist[k - 2] <= 1.1 * sup_dist[k - 3]
        && sup_dist[k - 1] <= 1.1 * sup_dist[k - 2];
    let nu_final = *nu_hat.last().unwrap();
    let nu_dev = (nu_final - 6.0).abs();
    let nu_tol = epsilon.powf(0.25);
    Ok(ConvergenceReport {
        span_ok: span_s >= 2.0,
        last3_nonincreasing,
        final_sup_dist: *sup_dist.last().unwrap(),
        nu_final,
        nu_dev,
        nu_tol,
        nu_ok: nu_dev <= nu_tol,
        s,
        nu_hat,
        sup_dist,
        nu_increments,
        span_s,
    })
}

/// Cusp fit window in physical distance from the blowup point.
#[derive(Debug, Clone, Copy, Serialize, serde::Deserialize)]
pub struct CuspWindow {
    pub w_lo: f64,
    pub w_hi: f64,
}

impl Default for CuspWindow {
    fn default() -> Self {
        CuspWindow { w_lo: 7e-4, w_hi: 0.1 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CuspReport {
    pub x_star: f64,
    pub window: CuspWindow,
    pub exponent_left: f64,
    pub exponent_right: f64,
    pub exponent_mean: f64,
    pub r2_left: f64,
    pub r2_right: f64,
    pub r2_min: f64,
    /// max |u_x| over grid points with |x - x_star| > 1/2 (periodic distance).
    pub far_field_max_slope: f64,
    pub far_field_bound: f64,
    pub far_field_ok: bool,
}

/// Fit the cusp exponent of |u_x| ~ |x - x_star|^p on both sides of x_star.
pub fn fit_cusp(ux: &Field, x_star: f64, window: &CuspWindow, points: usize) -> Result<CuspReport> {
    if !(window.w_lo > 0.0 && window.w_lo < window.w_hi) {
        return Err(BhError::Parameter("cusp window must satisfy 0 < w_lo < w_hi".into()));
    }
    if window.w_hi > 0.1 {
        return Err(BhError::Parameter(format!(
            "cusp window w_hi {} exceeds 0.1 (must stay inside |x - x*| < 1/2)",
            window.w_hi
        )));
    }
    if points < 8 {
        return Err(BhError::Parameter("cusp fit needs >= 8 points per side".into()));
    }
    let rs = geomspace(window.w_lo, window.w_hi, points);
    let log_r: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let mut fits = [0.0f64; 2];
    let mut r2s = [0.0f64; 2];
    for (side_idx, sgn) in [(0usize, -1.0f64), (1, 1.0)] {
        let mut log_v = Vec::with_capacity(rs.len());
        for &r in &rs {
            let v = ux.interp(x_star + sgn * r).abs();
            if v <= 0.0 {
                return Err(BhError::Numeric("vanishing slope inside cusp window".into()));
            }
            log_v.push(v.ln());
        }
        let (slope, _, r2) = linear_fit(&log_r, &log_v)?;
        fits[side_idx] = slope;
        r2s[side_idx] = r2;
    }
    // Far field: the theorem caps the slope at 2 beyond distance 1/2.
    let grid = ux.grid();
    let mut far_max = 0.0f64;
    for (j, &v) in ux.samples().iter().enumerate() {
        let d = grid.wrap(grid.x(j) - x_star).abs();
        if d > 0.5 {
            far_max = far_max.max(v.abs());
        }
    }
    Ok(CuspReport {
        x_star,
        window: *window,
        exponent_left: fits[0],
        exponent_right: fits[1],
        exponent_mean: 0.5 * (fits[0] + fits[1]),
        r2_left: r2s[0],
        r2_right: r2s[1],
        r2_min: r2s[0].min(r2s[1]),
        far_field_max_slope: far_max,
        far_field_bound: 2.0,
        far_field_ok: far_max <= 2.0,
    })
}

/// Cusp report from a physical state near the stop time.
pub fn cusp_exponent(state: &PhysState, x_star: f64, window: &CuspWindow) -> Result<CuspReport> {
    let ux = state.u.derivative(1)?;
    let uxx = state.u.derivative(2)?;
    let uxxx = state.u.derivative(3)?;
    let sm = locate_slope_min(&ux, &uxx, &uxxx, 2)?;
    let scale = 5.0 * sm.m.powf(-1.5);
    if window.w_lo < scale {
        return Err(BhError::Resolution(format!(
            "cusp window w_lo {:.3e} below the resolved scale {:.3e} at m = {:.1}",
            window.w_lo, scale, sm.m
        )));
    }
    fit_cusp(&ux, x_star, window, 60)
}

/// Extrapolate the blowup location x* = xi(T*) by a linear fit of xi(t)
/// over the final slope decade of the time series.
pub fn extrapolate_x_star(series: &[Record], t_star: f64) -> Result<f64> {
    let m_end = series.last().map(|r| r.m).unwrap_or(0.0);
    let sel: Vec<&Record> = series.iter().filter(|r| r.m >= m_end / 10.0).collect();
    if sel.len() < 2 {
        return Err(BhError::Parameter("x* extrapolation needs >= 2 records".into()));
    }
    let ts: Vec<f64> = sel.iter().map(|r| r.t).collect();
    let xis: Vec<f64> = sel.iter().map(|r| r.xi).collect();
    let (slope, intercept, _) = linear_fit(&ts, &xis)?;
    Ok(intercept + slope * t_star)
}

/// Integrate dPhi/ds = V(Phi, s) with RK4 at roughly the target step;
/// returns the sampled trajectory including both endpoints.
pub fn integrate_trajectory(
    v: &dyn Fn(f64, f64) -> f64,
    x0: f64,
    s0: f64,
    s1: f64,
    ds_target: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(s1 > s0) || !(ds_target > 0.0) {
        return Err(BhError::Parameter("trajectory needs s1 > s0 and ds > 0".into()));
    }
    let steps = ((s1 - s0) / ds_target).ceil() as usize;
    let ds = (s1 - s0) / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut phi = x0;
    let mut s = s0;
    out.push((s, phi));
    for _ in 0..steps {
        let k1 = v(phi, s);
        let k2 = v(phi + 0.5 * ds * k1, s + 0.5 * ds);
        let k3 = v(phi + 0.5 * ds * k2, s + 0.5 * ds);
        let k4 = v(phi + ds * k3, s + ds);
        phi += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s += ds;
        if !phi.is_finite() {
            return Err(BhError::Numeric("trajectory diverged".into()));
        }
        out.push((s, phi));
    }
    Ok(out)
}

/// Exponential sandwich bounds for one Lagrangian seed.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeedCheck {
    pub x0: f64,
    pub phi_final: f64,
    /// min over s of (|Phi| - lower(s)) / lower(s).
    pub lower_margin_min: f64,
    /// min over s of (upper(s) - |Phi|) / upper(s).
    pub upper_margin_min: f64,
    /// Set if the trajectory left the numerically valid X window.
    pub truncated: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LagrangianReport {
    pub s0: f64,
    pub s1: f64,
    pub m_big: f64,
    pub checks: Vec<SeedCheck>,
    pub all_pass: bool,
}

/// Default seed set: |X0| in {l, 2l, 1, 10} with l = (log M)^{-2}, both signs.
pub fn default_seeds(m_big: f64) -> Vec<f64> {
    let l = m_big.ln().powi(-2);
    let mut seeds = Vec::new();
    for base in [l, 2.0 * l, 1.0, 10.0] {
        seeds.push(base);
        seeds.push(-base);
    }
    seeds
}

/// Check one trajectory of a given speed field against the sandwich
///
/// ```text
///     |X0| e^{(s-s0)/5}  <=  |Phi(s)|  <=  (|X0| + 3.5 M e^{s0/2}) e^{3(s-s0)/2}.
/// ```
pub fn check_seed(
    v: &dyn Fn(f64, f64) -> f64,
    x0: f64,
    s0: f64,
    s1: f64,
    m_big: f64,
    x_valid: f64,
) -> Result<SeedCheck> {
    let traj = integrate_trajectory(v, x0, s0, s1, 0.01)?;
    let upper0 = x0.abs() + 3.5 * m_big * (0.5 * s0).exp();
    let mut lower_margin = f64::INFINITY;
    let mut upper_margin = f64::INFINITY;
    let mut truncated = false;
    for &(s, phi) in &traj {
        if phi.abs() > x_valid {
            truncated = true;
            break;
        }
        let lower = x0.abs() * ((s - s0) / 5.0).exp();
        let upper = upper0 * (1.5 * (s - s0)).exp();
        lower_margin = lower_margin.min((phi.abs() - lower) / lower);
        upper_margin = upper_margin.min((upper - phi.abs()) / upper);
    }
    Ok(SeedCheck {
        x0,
        phi_final: traj.last().unwrap().1,
        lower_margin_min: lower_margin,
        upper_margin_min: upper_margin,
        truncated,
        pass: lower_margin >= 0.0 && upper_margin >= 0.0,
    })
}

/// Check the Lagrangian sandwich along trajectories of the self-similar
/// transport speed assembled from extracted frames:
///
/// ```text
///     V(X, s) = sqrt(m) (u(xi + X m^{-3/2}) - xi-dot) / (1 - tau-dot) + (3/2) X,
/// ```
///
/// with V interpolated linearly in s between consecutive frames.  `rates`
/// supplies (tau-dot, xi-dot) measured at each frame time.
pub fn lagrangian_check(
    frames: &[Frame],
    states: &[PhysState],
    rates: &[(f64, f64)],
    m_big: f64,
    seeds: &[f64],
) -> Result<LagrangianReport> {
    if frames.len() != states.len() || frames.len() != rates.len() {
        return Err(BhError::Parameter("frames, states, and rates must align".into()));
    }
    if frames.len() < 2 {
        return Err(BhError::Parameter("lagrangian check needs >= 2 frames".into()));
    }
    for w in frames.windows(2) {
        if w[1].s <= w[0].s {
            return Err(BhError::Parameter("frames must be strictly increasing in s".into()));
        }
    }
    let s0 = frames[0].s;
    let s1 = frames[frames.len() - 1].s;
    // The speed is trustworthy while xi + X m^{-3/2} stays well inside the
    // domain at the coarsest frame.
    let x_valid = 0.45 * frames[0].m.powf(1.5) * states[0].u.grid().half_width();
    let v_at = |i: usize, x: f64| -> f64 {
        let f = &frames[i];
        let (tau_dot, xi_dot) = rates[i];
        let u_val = states[i].u.interp(f.xi + x * f.m.powf(-1.5));
        f.m.sqrt() * (u_val - xi_dot) / (1.0 - tau_dot) + 1.5 * x
    };
    let v = |x: f64, s: f64| -> f64 {
        let mut i = 0;
        while i + 2 < frames.len() && frames[i + 1].s <= s {
            i += 1;
        }
        let (sa, sb) = (frames[i].s, frames[i + 1].s);
        let lam = ((s - sa) / (sb - sa)).clamp(0.0, 1.0);
        (1.0 - lam) * v_at(i, x) + lam * v_at(i + 1, x)
    };
    let mut checks = Vec::new();
    let mut all_pass = true;
    for &x0 in seeds {
        let c = check_seed(&v, x0, s0, s1, m_big, x_valid)?;
        all_pass &= c.pass;
        checks.push(c);
    }
    Ok(LagrangianReport { s0, s1, m_big, checks, all_pass })
}
