//! Adaptive Verner 9(8) integrator with a continuous extension for dense sampling.

use std::f64::consts::TAU;

use super::tableau::{A, A_EXTRA, B_DENSE, B_HIGH, B_LOW, C, C_EXTRA, DENSE_DEGREE, EXTRA_STAGES, STAGES};
use super::trajectory::{Trajectory, TrajectoryMeta};
use crate::error::{Error, Result};

/// A first-order system `y' = f(t, y)` on a flat state vector.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;

    /// Column labels for export, `dim()` entries.
    fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|i| format!("y{i}")).collect()
    }
}

impl<S: OdeSystem + ?Sized> OdeSystem for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        (**self).rhs(t, y, dy)
    }
    fn labels(&self) -> Vec<String> {
        (**self).labels()
    }
}

/// Runs a system backwards: `s -> y(-s)` obeys `dy/ds = -f(-s, y)`.
pub struct TimeReversed<S>(pub S);

impl<S: OdeSystem> OdeSystem for TimeReversed<S> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        self.0.rhs(-t, y, dy)?;
        dy.iter_mut().for_each(|v| *v = -*v);
        Ok(())
    }
    fn labels(&self) -> Vec<String> {
        self.0.labels()
    }
}

/// Where output samples are placed.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// `t0 + k dt`, plus the endpoint.
    Uniform(f64),
    /// Uniform spacing giving `samples` points per period of the fastest frequency `omega_max`.
    PerPeriod { samples: usize, omega_max: f64 },
    /// Explicit increasing times inside the window.
    Times(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    pub tol: f64,
    pub sampling: Sampling,
    pub max_steps: usize,
    pub model: String,
    pub schedule: String,
}

pub const MIN_SAMPLES_PER_PERIOD: usize = 20;
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 32;

impl IntegrateOptions {
    pub fn new(tol: f64, sampling: Sampling) -> Self {
        Self {
            tol,
            sampling,
            max_steps: 5_000_000,
            model: String::new(),
            schedule: String::new(),
        }
    }

    /// Densified sampling for an oscillator whose frequency never exceeds `omega_max`.
    pub fn oscillator(tol: f64, omega_max: f64) -> Self {
        Self::new(
            tol,
            Sampling::PerPeriod {
                samples: DEFAULT_SAMPLES_PER_PERIOD,
                omega_max,
            },
        )
    }

    pub fn labelled(mut self, model: &str, schedule: &str) -> Self {
        self.model = model.to_owned();
        self.schedule = schedule.to_owned();
        self
    }
}

fn sample_times(sampling: &Sampling, t0: f64, t1: f64) -> Result<Vec<f64>> {
    let uniform = |dt: f64| -> Result<Vec<f64>> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("sample spacing must be positive, got {dt}")));
        }
        let n = ((t1 - t0) / dt).floor() as usize;
        let mut ts: Vec<f64> = (0..=n).map(|k| t0 + k as f64 * dt).filter(|&t| t < t1).collect();
        ts.push(t1);
        Ok(ts)
    };
    match sampling {
        Sampling::Uniform(dt) => uniform(*dt),
        Sampling::PerPeriod { samples, omega_max } => {
            if *samples < MIN_SAMPLES_PER_PERIOD {
                return Err(Error::InvalidArgument(format!(
                    "at least {MIN_SAMPLES_PER_PERIOD} samples per period are required, got {samples}"
                )));
            }
            if !(*omega_max > 0.0) {
                return Err(Error::InvalidArgument(format!("frequency bound must be positive, got {omega_max}")));
            }
            uniform(TAU / (omega_max * *samples as f64))
        }
        Sampling::Times(ts) => {
            if ts.is_empty() || ts.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidArgument("sample times must be strictly increasing".into()));
            }
            if ts[0] < t0 || ts[ts.len() - 1] > t1 {
                return Err(Error::InvalidArgument("sample times must lie inside the integration window".into()));
            }
            Ok(ts.clone())
        }
    }
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrates `system` from `y0` over `t_span` (forward only, `t0 < t1`).
pub fn integrate<S: OdeSystem + ?Sized>(
    system: &S,
    y0: &[f64],
    t_span: (f64, f64),
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let n = system.dim();
    let (t0, t1) = t_span;
    if y0.len() != n {
        return Err(Error::InvalidArgument(format!("initial state has {} components, system needs {n}", y0.len())));
    }
    if !(opts.tol >= 1e-14 && opts.tol <= 1e-6) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in [1e-14, 1e-6], got {}", opts.tol)));
    }
    if !(t1 > t0) || !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidArgument(format!("integration window must satisfy t0 < t1, got [{t0}, {t1}]")));
    }
    if !finite(y0) {
        return Err(Error::NonFinite { t: t0 });
    }
    let times = sample_times(&opts.sampling, t0, t1)?;
    let (rtol, atol) = (opts.tol, opts.tol);

    let mut out = Trajectory::new(system.labels(), TrajectoryMeta {
        model: opts.model.clone(),
        schedule: opts.schedule.clone(),
        tol: opts.tol,
        accepted_steps: 0,
        rejected_steps: 0,
    });
    let mut next = 0;
    while next < times.len() && times[next] == t0 {
        out.push(t0, y0);
        next += 1;
    }

    let mut k = vec![vec![0.0; n]; STAGES + EXTRA_STAGES];
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut stage = vec![0.0; n];
    let mut y_high = vec![0.0; n];
    let mut y_low = vec![0.0; n];

    system.rhs(t, &y, &mut k[0])?;
    if !finite(&k[0]) {
        return Err(Error::NonFinite { t });
    }
    let mut h = initial_step(system, t, &y, &k[0], t1 - t0, rtol, atol)?;
    let mut failures_in_row = 0usize;
    let mut steps = 0usize;

    while t < t1 {
        if steps >= opts.max_steps {
            return Err(Error::MaxStepsExceeded { t, max_steps: opts.max_steps });
        }
        steps += 1;
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, h });
        }

        for i in 1..STAGES {
            for d in 0..n {
                let mut acc = 0.0;
                for j in 0..i {
                    acc += A[i][j] * k[j][d];
                }
                stage[d] = y[d] + h * acc;
            }
            system.rhs(t + C[i] * h, &stage, &mut k[i])?;
        }
        let mut err = 0.0f64;
        for d in 0..n {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for i in 0..STAGES {
                hi += B_HIGH[i] * k[i][d];
                lo += B_LOW[i] * k[i][d];
            }
            y_high[d] = y[d] + h * hi;
            y_low[d] = y[d] + h * lo;
            let scale = atol + rtol * y[d].abs().max(y_high[d].abs());
            let e = (y_high[d] - y_low[d]).abs() / scale;
            err = if e.is_nan() || err.is_nan() { f64::NAN } else { err.max(e) };
        }

        if !err.is_finite() {
            out.meta.rejected_steps += 1;
            failures_in_row += 1;
            if failures_in_row > 60 {
                return Err(Error::NonFinite { t });
            }
            h *= 0.2;
            continue;
        }

        if err <= 1.0 {
            let t_new = if last { t1 } else { t + h };
            // Samples strictly inside the step use the continuous extension.
            let mut extras_ready = false;
            while next < times.len() && times[next] <= t_new {
                let ts = times[next];
                if ts == t_new {
                    out.push(ts, &y_high);
                } else {
                    if !extras_ready {
                        for e in 0..EXTRA_STAGES {
                            let row = STAGES + e;
                            for d in 0..n {
                                let mut acc = 0.0;
                                for j in 0..row {
                                    acc += A_EXTRA[e][j] * k[j][d];
                                }
                                stage[d] = y[d] + h * acc;
                            }
                            system.rhs(t + C_EXTRA[e] * h, &stage, &mut k[row])?;
                        }
                        extras_ready = true;
                    }
                    let theta = (ts - t) / h;
                    let mut weights = [0.0; STAGES + EXTRA_STAGES];
                    for (i, w) in weights.iter_mut().enumerate() {
                        let mut p = 0.0;
                        for j in (0..DENSE_DEGREE).rev() {
                            p = p * theta + B_DENSE[i][j];
                        }
                        *w = p * theta;
                    }
                    for d in 0..n {
                        let mut acc = 0.0;
                        for (i, w) in weights.iter().enumerate() {
                            acc += w * k[i][d];
                        }
                        stage[d] = y[d] + h * acc;
                    }
                    out.push(ts, &stage);
                }
                next += 1;
            }

            y.copy_from_slice(&y_high);
            t = t_new;
            out.meta.accepted_steps += 1;
            failures_in_row = 0;
            if t < t1 {
                system.rhs(t, &y, &mut k[0])?;
                if !finite(&y) || !finite(&k[0]) {
                    return Err(Error::NonFinite { t });
                }
            }
            let factor = if err == 0.0 { 10.0 } else { (0.9 * err.powf(-1.0 / 9.0)).clamp(0.2, 10.0) };
            h *= factor;
        } else {
            out.meta.rejected_steps += 1;
            failures_in_row += 1;
            h *= (0.9 * err.powf(-1.0 / 9.0)).clamp(0.2, 1.0);
        }
    }
    Ok(out)
}

fn initial_step<S: OdeSystem + ?Sized>(
    system: &S,
    t: f64,
    y: &[f64],
    f0: &[f64],
    span: f64,
    rtol: f64,
    atol: f64,
) -> Result<f64> {
    let n = y.len();
    let scale: Vec<f64> = y.iter().map(|v| atol + rtol * v.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&scale).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / n as f64).sqrt();
    let d0 = norm(y);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; n];
    system.rhs(t + h0, &y1, &mut f1)?;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 9.0)
    };
    Ok((100.0 * h0).min(h1).min(span))
}
