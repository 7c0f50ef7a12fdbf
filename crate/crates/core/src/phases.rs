//! Amplitude/phase extraction, adiabatic invariants and the dynamical/geometric phase split.
//!
//! Phase convention: with `w = (gamma P + beta Q) / omega`, the amplitude is
//! `r = sqrt(Q^2 + w^2)` and the phase is `atan2(-w, Q)`, so the constant-parameter
//! solution reads `Q = r cos(theta)`, `P = -(r / gamma)(beta cos(theta) + omega sin(theta))`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::dynamics::{gho_energy, PendulumParams, PhaseSpaceState, Trajectory};
use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::schedules::{GhoParams, GhoRates, LoopSpec, ParamPath, ParamSchedule};

/// Below this amplitude the phase is undefined.
pub const MIN_AMPLITUDE: f64 = 1e-300;

/// Absolute tolerance of the phase quadratures.
pub const PHASE_QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub r: f64,
    pub theta: f64,
    pub t: f64,
}

pub fn extract_phase(state: &PhaseSpaceState, p: &GhoParams) -> Result<PhaseState> {
    let omega = p.frequency()?;
    let w = (p.gamma * state.p + p.beta * state.q) / omega;
    let r = state.q.hypot(w);
    if !(r >= MIN_AMPLITUDE) {
        return Err(Error::ZeroAmplitude { r });
    }
    Ok(PhaseState {
        r,
        theta: (-w).atan2(state.q),
        t: state.t,
    })
}

/// Unwraps raw phases given the local frequency at each sample.
pub fn unwrap_phases(series: &[PhaseState], omega: &[f64]) -> Result<Vec<PhaseState>> {
    if omega.len() != series.len() {
        return Err(Error::InvalidArgument(format!(
            "{} phase samples but {} frequencies",
            series.len(),
            omega.len()
        )));
    }
    let mut out = Vec::with_capacity(series.len());
    let Some(first) = series.first() else {
        return Ok(out);
    };
    out.push(*first);
    for i in 1..series.len() {
        let dt = series[i].t - series[i - 1].t;
        let advance = omega[i - 1].max(omega[i]) * dt;
        let mut gap = series[i].theta - series[i - 1].theta;
        if advance >= PI {
            return Err(Error::UndersampledTrajectory {
                index: i - 1,
                next: i,
                gap: advance,
            });
        }
        gap -= TAU * ((gap - PI) / TAU).ceil();
        out.push(PhaseState {
            theta: out[i - 1].theta + gap,
            ..series[i]
        });
    }
    Ok(out)
}

/// Net phase change of an unwrapped series; zero for fewer than two samples.
pub fn total_phase(unwrapped: &[PhaseState]) -> f64 {
    match (unwrapped.first(), unwrapped.last()) {
        (Some(a), Some(b)) => b.theta - a.theta,
        _ => 0.0,
    }
}

/// `I = omega r^2 / (2 gamma)`.
pub fn adiabatic_invariant(ps: &PhaseState, p: &GhoParams) -> Result<f64> {
    let omega = p.frequency()?;
    Ok(omega * ps.r * ps.r / (2.0 * p.gamma))
}

fn check_span<P: ParamPath + ?Sized>(path: &P, t0: f64, t1: f64) -> Result<()> {
    let s = path.slowness();
    s.check_window(t0)?;
    s.check_window(t1)
}

fn omega_at_tau<P: ParamPath + ?Sized>(path: &P, tau: f64) -> Result<f64> {
    path.params_at_tau(tau)?.0.frequency()
}

/// Geometric-phase density per unit slow time, written without the `1/beta` factor.
pub fn geometric_integrand(p: &GhoParams, rate: &GhoRates) -> Result<f64> {
    let w = p.frequency()?;
    Ok(p.beta * rate.gamma / (2.0 * w * p.gamma) - rate.beta / (2.0 * w))
}

/// `integral of omega dt` over `[t0, t1]`.
pub fn dynamical_phase<P: ParamPath + ?Sized>(path: &P, t0: f64, t1: f64) -> Result<f64> {
    check_span(path, t0, t1)?;
    let eps = path.epsilon();
    let slow = integrate(|tau| omega_at_tau(path, tau), eps * t0, eps * t1, PHASE_QUAD_TOL * eps)?;
    Ok(slow / eps)
}

/// Line integral of the geometric connection along the path between `t0` and `t1`.
pub fn geometric_phase_line<P: ParamPath + ?Sized>(path: &P, t0: f64, t1: f64) -> Result<f64> {
    check_span(path, t0, t1)?;
    let eps = path.epsilon();
    integrate(
        |tau| {
            let (p, r) = path.params_at_tau(tau)?;
            geometric_integrand(&p, &r)
        },
        eps * t0,
        eps * t1,
        PHASE_QUAD_TOL,
    )
}

/// Coefficients of the curvature 2-form `(gamma dA^dB + alpha dB^dG + beta dG^dA) / (4 omega^3)`.
pub fn curvature(p: &GhoParams) -> Result<(f64, f64, f64)> {
    let w = p.frequency()?;
    let k = 1.0 / (4.0 * w * w * w);
    Ok((p.gamma * k, p.alpha * k, p.beta * k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceEstimate {
    pub coarse: f64,
    pub fine: f64,
    /// Richardson-extrapolated value.
    pub value: f64,
}

impl SurfaceEstimate {
    /// Size of the Richardson correction, a proxy for the remaining error.
    pub fn refinement_delta(&self) -> f64 {
        (self.value - self.fine).abs()
    }
}

fn surface_midpoint(lp: &LoopSpec, n: usize) -> Result<f64> {
    let h = 1.0 / n as f64;
    let mut total = 0.0;
    for iu in 0..n {
        let u = (iu as f64 + 0.5) * h;
        let mut column = 0.0;
        for is in 0..n {
            let s = (is as f64 + 0.5) * h;
            let (p, ds, du) = lp.surface_point(s, u)?;
            let (fab, fbg, fga) = curvature(&p).map_err(|_| Error::NonOscillatoryOnSurface {
                alpha: p.alpha,
                beta: p.beta,
                gamma: p.gamma,
            })?;
            let ab = ds.alpha * du.beta - ds.beta * du.alpha;
            let bg = ds.beta * du.gamma - ds.gamma * du.beta;
            let ga = ds.gamma * du.alpha - ds.alpha * du.gamma;
            column += fab * ab + fbg * bg + fga * ga;
        }
        total += column;
    }
    Ok(total * h * h)
}

/// Surface integral over the centroid cone: midpoint rule on `N x N` and `2N x 2N`, then one Richardson step.
pub fn geometric_phase_surface_estimate(lp: &LoopSpec) -> Result<SurfaceEstimate> {
    let coarse = surface_midpoint(lp, lp.grid())?;
    let fine = surface_midpoint(lp, 2 * lp.grid())?;
    Ok(SurfaceEstimate {
        coarse,
        fine,
        value: (4.0 * fine - coarse) / 3.0,
    })
}

pub fn geometric_phase_surface(lp: &LoopSpec) -> Result<f64> {
    geometric_phase_surface_estimate(lp).map(|e| e.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDecomposition {
    /// Period-averaged extracted phase change.
    pub theta_total: f64,
    pub theta_d: f64,
    pub theta_g_line: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_g_surface: Option<f64>,
    /// `theta_total - theta_d - theta_g_line`.
    pub residual: f64,
    pub invariant_drift: f64,
    /// Raw phase change between the first and last sample.
    pub theta_total_endpoint: f64,
    pub residual_endpoint: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticReport {
    pub t: Vec<f64>,
    pub invariant: Vec<f64>,
    pub energy: Vec<f64>,
    pub omega: Vec<f64>,
    pub max_relative_drift: f64,
    pub final_relative_change: f64,
    pub mean_invariant: f64,
}

impl AdiabaticReport {
    pub fn digest(&self) -> AdiabaticDigest {
        AdiabaticDigest {
            samples: self.t.len(),
            initial_invariant: self.invariant.first().copied().unwrap_or(0.0),
            mean_invariant: self.mean_invariant,
            max_relative_drift: self.max_relative_drift,
            final_relative_change: self.final_relative_change,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticDigest {
    pub samples: usize,
    pub initial_invariant: f64,
    pub mean_invariant: f64,
    pub max_relative_drift: f64,
    pub final_relative_change: f64,
}

struct Extracted {
    phases: Vec<PhaseState>,
    params: Vec<GhoParams>,
    omega: Vec<f64>,
}

fn extract_all<P: ParamPath + ?Sized>(traj: &Trajectory, path: &P) -> Result<Extracted> {
    let mut raw = Vec::with_capacity(traj.len());
    let mut params = Vec::with_capacity(traj.len());
    let mut omega = Vec::with_capacity(traj.len());
    for s in traj.phase_states() {
        let p = path.sample(s.t)?.params;
        raw.push(extract_phase(&s, &p)?);
        omega.push(p.frequency()?);
        params.push(p);
    }
    Ok(Extracted {
        phases: unwrap_phases(&raw, &omega)?,
        params,
        omega,
    })
}

/// Invariant, energy and frequency along a trajectory.
pub fn adiabatic_report<P: ParamPath + ?Sized>(traj: &Trajectory, path: &P) -> Result<AdiabaticReport> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let ex = extract_all(traj, path)?;
    let invariant: Vec<f64> = ex
        .phases
        .iter()
        .zip(&ex.params)
        .map(|(ps, p)| adiabatic_invariant(ps, p))
        .collect::<Result<_>>()?;
    let energy: Vec<f64> = traj.phase_states().zip(&ex.params).map(|(s, p)| gho_energy(&s, p)).collect();
    let i0 = invariant[0];
    let max_relative_drift = invariant.iter().map(|i| (i - i0).abs()).fold(0.0, f64::max) / i0;
    let final_relative_change = (invariant[invariant.len() - 1] - i0).abs() / i0;
    let mean_invariant = invariant.iter().sum::<f64>() / invariant.len() as f64;
    Ok(AdiabaticReport {
        t: traj.times().to_vec(),
        invariant,
        energy,
        omega: ex.omega,
        max_relative_drift,
        final_relative_change,
        mean_invariant,
    })
}

/// Running `(Theta_d, Theta_g)` from `times[0]` to each sample, by per-interval quadrature.
fn cumulative_phases<P: ParamPath + ?Sized>(path: &P, times: &[f64]) -> Result<Vec<(f64, f64)>> {
    let mut acc = (0.0, 0.0);
    let mut out = vec![acc];
    for w in times.windows(2) {
        acc.0 += dynamical_phase(path, w[0], w[1])?;
        acc.1 += geometric_phase_line(path, w[0], w[1])?;
        out.push(acc);
    }
    Ok(out)
}

/// Least-squares mean of `delta` over one oscillation, removing the first and second phase harmonics
/// and a linear trend; returns the fitted secular value at `t_ref`.
fn secular_mean(t: &[f64], theta: &[f64], delta: &[f64], t_ref: f64) -> Option<f64> {
    const K: usize = 6;
    if t.len() < 2 * K {
        return None;
    }
    let mut ata = [[0.0; K]; K];
    let mut atb = [0.0; K];
    for i in 0..t.len() {
        let (s1, c1) = theta[i].sin_cos();
        let (s2, c2) = (2.0 * theta[i]).sin_cos();
        let row = [1.0, t[i] - t_ref, c1, s1, c2, s2];
        for a in 0..K {
            atb[a] += row[a] * delta[i];
            for b in 0..K {
                ata[a][b] += row[a] * row[b];
            }
        }
    }
    solve_dense(ata, atb).map(|x| x[0])
}

fn solve_dense<const K: usize>(mut a: [[f64; K]; K], mut b: [f64; K]) -> Option<[f64; K]> {
    for col in 0..K {
        let piv = (col..K).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..K {
            let f = a[row][col] / a[col][col];
            for k in col..K {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; K];
    for row in (0..K).rev() {
        let s: f64 = (row + 1..K).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Phase decomposition along a trajectory of the GHO driven by `path`; no surface value.
pub fn decompose_path<P: ParamPath + ?Sized>(traj: &Trajectory, path: &P) -> Result<PhaseDecomposition> {
    if traj.len() < 2 {
        return Err(Error::InvalidArgument("phase decomposition needs at least two samples".into()));
    }
    let ex = extract_all(traj, path)?;
    let times = traj.times();
    let (t0, t1) = (times[0], times[times.len() - 1]);
    let theta_d = dynamical_phase(path, t0, t1)?;
    let theta_g_line = geometric_phase_line(path, t0, t1)?;
    let theta_total_endpoint = total_phase(&ex.phases);
    let residual_endpoint = theta_total_endpoint - theta_d - theta_g_line;

    let i0 = adiabatic_invariant(&ex.phases[0], &ex.params[0])?;
    let mut invariant_drift = 0.0f64;
    for (ps, p) in ex.phases.iter().zip(&ex.params) {
        invariant_drift = invariant_drift.max((adiabatic_invariant(ps, p)? - i0).abs() / i0);
    }

    let residual = averaged_residual(path, times, &ex, theta_d, theta_g_line)?.unwrap_or(residual_endpoint);
    Ok(PhaseDecomposition {
        theta_total: theta_d + theta_g_line + residual,
        theta_d,
        theta_g_line,
        theta_g_surface: None,
        residual,
        invariant_drift,
        theta_total_endpoint,
        residual_endpoint,
    })
}

/// Difference of the period-averaged phase mismatch at the two ends of the trajectory.
fn averaged_residual<P: ParamPath + ?Sized>(
    path: &P,
    times: &[f64],
    ex: &Extracted,
    theta_d: f64,
    theta_g: f64,
) -> Result<Option<f64>> {
    let n = times.len();
    let (t0, t1) = (times[0], times[n - 1]);
    let period0 = TAU / ex.omega[0];
    let period1 = TAU / ex.omega[n - 1];
    if t1 - t0 < 2.0 * period0.max(period1) {
        return Ok(None);
    }
    let head = times.partition_point(|&t| t <= t0 + period0);
    let tail = times.partition_point(|&t| t < t1 - period1);
    let theta0 = ex.phases[0].theta;

    let cum = cumulative_phases(path, &times[..head])?;
    let mut delta = Vec::with_capacity(head);
    for i in 0..head {
        delta.push(ex.phases[i].theta - theta0 - cum[i].0 - cum[i].1);
    }
    let theta: Vec<f64> = ex.phases[..head].iter().map(|p| p.theta).collect();
    let Some(start) = secular_mean(&times[..head], &theta, &delta, t0) else {
        return Ok(None);
    };

    // From each tail sample to the end, accumulated backwards.
    let tail_times = &times[tail..];
    let forward = cumulative_phases(path, tail_times)?;
    let (fd_end, fg_end) = forward[forward.len() - 1];
    let mut delta = Vec::with_capacity(n - tail);
    for (k, i) in (tail..n).enumerate() {
        let to_end = (fd_end - forward[k].0, fg_end - forward[k].1);
        let d = theta_d - to_end.0;
        let g = theta_g - to_end.1;
        delta.push(ex.phases[i].theta - theta0 - d - g);
    }
    let theta: Vec<f64> = ex.phases[tail..].iter().map(|p| p.theta).collect();
    let Some(end) = secular_mean(tail_times, &theta, &delta, t1) else {
        return Ok(None);
    };
    Ok(Some(end - start))
}

/// Full decomposition; the surface value is filled in when the trajectory spans the whole closed loop.
pub fn decompose(traj: &Trajectory, schedule: &ParamSchedule) -> Result<PhaseDecomposition> {
    let mut d = decompose_path(traj, schedule)?;
    let (w0, w1) = schedule.slowness().t_span;
    let times = traj.times();
    let spans_window = times[0] == w0 && times[times.len() - 1] == w1;
    if spans_window && schedule.is_closed() {
        d.theta_g_surface = Some(geometric_phase_surface(&LoopSpec::new(schedule.clone())?)?);
    }
    Ok(d)
}

/// `(Theta_d, Theta_g)` of the moving-suspension pendulum.
pub fn pendulum_phases(pp: &PendulumParams, t0: f64, t1: f64) -> Result<(f64, f64)> {
    let s = pp.slowness();
    s.check_window(t0)?;
    s.check_window(t1)?;
    let eps = s.epsilon;
    let g = pp.g;
    let theta_d = integrate(|tau| Ok((g / pp.l.value(tau)).sqrt()), eps * t0, eps * t1, PHASE_QUAD_TOL * eps)? / eps;
    let theta_g = integrate(
        |tau| {
            let (m, dm, _) = pp.m.eval(tau);
            let (v, dv, _) = pp.v.eval(tau);
            let l = pp.l.value(tau);
            Ok(-(v * dm / m + dv) / (2.0 * (g * l).sqrt()))
        },
        eps * t0,
        eps * t1,
        PHASE_QUAD_TOL,
    )?;
    Ok((theta_d, theta_g))
}

/// Squared frequency of the reduced pendulum Lagrangian: `g/l - (v m'/m + v')/l`.
pub fn pendulum_effective_frequency(pp: &PendulumParams, t: f64) -> Result<f64> {
    let s = pp.at(t)?;
    Ok(s.g / s.l - (s.v * s.m_dot / s.m + s.v_dot) / s.l)
}

/// `integral of sqrt(omega_eff^2) dt`.
pub fn pendulum_effective_phase(pp: &PendulumParams, t0: f64, t1: f64) -> Result<f64> {
    let eps = pp.slowness().epsilon;
    let slow = integrate(
        |tau| {
            let w2 = pendulum_effective_frequency(pp, tau / eps)?;
            if !(w2 > 0.0) {
                return Err(Error::DegenerateParameter("effective squared frequency must stay positive"));
            }
            Ok(w2.sqrt())
        },
        eps * t0,
        eps * t1,
        PHASE_QUAD_TOL * eps,
    )?;
    Ok(slow / eps)
}
