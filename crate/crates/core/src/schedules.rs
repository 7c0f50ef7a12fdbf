//! Slowly varying parameter paths in (alpha, beta, gamma)-space.
//!
//! Every path is written in slow time `tau = epsilon * t`. Real-time rates are
//! always the slow-time derivative scaled by `epsilon`, so the same geometric
//! path can be replayed at a different slowness without touching its shape.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spline::CubicSpline;

/// Number of points used to certify that a path stays oscillatory.
pub const VALIDATION_POINTS: usize = 1000;

/// Default (s, u) resolution of the cone spanning a closed loop.
pub const DEFAULT_SURFACE_GRID: usize = 200;

/// Coefficients of the quadratic Hamiltonian `(alpha Q^2 + 2 beta Q P + gamma P^2) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhoParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Time derivatives of [`GhoParams`], either per unit real time or per unit slow time.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GhoRates {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl GhoParams {
    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// `alpha * gamma - beta^2`, the squared frequency.
    pub fn discriminant(&self) -> f64 {
        self.alpha * self.gamma - self.beta * self.beta
    }

    pub fn check_oscillatory(&self) -> Result<()> {
        let d = self.discriminant();
        if d > 0.0 && self.gamma > 0.0 {
            Ok(())
        } else {
            Err(Error::NonOscillatory {
                alpha: self.alpha,
                beta: self.beta,
                gamma: self.gamma,
                discriminant: d,
            })
        }
    }

    /// Angular frequency `sqrt(alpha gamma - beta^2)`.
    pub fn frequency(&self) -> Result<f64> {
        self.check_oscillatory()?;
        Ok(self.discriminant().sqrt())
    }

    fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite() && self.gamma.is_finite()
    }
}

impl GhoRates {
    pub const fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn scaled(self, k: f64) -> Self {
        Self::new(self.alpha * k, self.beta * k, self.gamma * k)
    }
}

/// Free-function form of [`GhoParams::frequency`].
pub fn gho_frequency(p: &GhoParams) -> Result<f64> {
    p.frequency()
}

/// Parameters and their real-time rates at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleSample {
    pub params: GhoParams,
    pub rates: GhoRates,
}

impl ScheduleSample {
    pub fn frequency(&self) -> Result<f64> {
        self.params.frequency()
    }

    /// Real-time derivative of the frequency.
    pub fn frequency_rate(&self) -> Result<f64> {
        let w = self.params.frequency()?;
        let (p, r) = (self.params, self.rates);
        Ok((r.alpha * p.gamma + p.alpha * r.gamma - 2.0 * p.beta * r.beta) / (2.0 * w))
    }
}

/// Slowness rate and the real-time window it applies to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlownessSpec {
    pub epsilon: f64,
    pub t_span: (f64, f64),
}

impl SlownessSpec {
    pub fn new(epsilon: f64, t_span: (f64, f64)) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidSchedule(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(t_span.1 > t_span.0) || !t_span.0.is_finite() || !t_span.1.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "time window must satisfy t0 < t1, got [{}, {}]",
                t_span.0, t_span.1
            )));
        }
        Ok(Self { epsilon, t_span })
    }

    /// The real-time window covering the slow-time interval `[tau0, tau1]`.
    pub fn over_tau(epsilon: f64, tau0: f64, tau1: f64) -> Result<Self> {
        Self::new(epsilon, (tau0 / epsilon, tau1 / epsilon))
    }

    pub fn tau_window(&self) -> (f64, f64) {
        (self.epsilon * self.t_span.0, self.epsilon * self.t_span.1)
    }

    pub fn check_window(&self, t: f64) -> Result<()> {
        let (t0, t1) = self.t_span;
        let slack = 1e-12 * t0.abs().max(t1.abs()).max(1.0);
        if t >= t0 - slack && t <= t1 + slack {
            Ok(())
        } else {
            Err(Error::OutOfWindow { t, t0, t1 })
        }
    }

    /// Whether phase extraction is meaningful: one slow step per oscillation period stays below 1.
    pub fn admits_phase_extraction(&self, omega_min: f64) -> bool {
        self.epsilon * TAU / omega_min < 1.0
    }
}

/// One Fourier mode `cos_amp cos(2 pi k tau) + sin_amp sin(2 pi k tau)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub order: u32,
    pub cos: f64,
    pub sin: f64,
}

/// A scalar function of slow time: `mean + slope tau + sum of harmonics` (period 1 when `slope == 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlowFn {
    pub mean: f64,
    pub slope: f64,
    pub harmonics: Vec<Harmonic>,
}

impl SlowFn {
    pub fn constant(value: f64) -> Self {
        Self {
            mean: value,
            slope: 0.0,
            harmonics: Vec::new(),
        }
    }

    /// `mean + cos_amp cos(2 pi tau) + sin_amp sin(2 pi tau)`.
    pub fn trig(mean: f64, cos_amp: f64, sin_amp: f64) -> Self {
        Self {
            mean,
            slope: 0.0,
            harmonics: vec![Harmonic {
                order: 1,
                cos: cos_amp,
                sin: sin_amp,
            }],
        }
    }

    pub fn linear(start: f64, slope: f64) -> Self {
        Self {
            mean: start,
            slope,
            harmonics: Vec::new(),
        }
    }

    pub fn is_periodic(&self) -> bool {
        self.slope == 0.0
    }

    /// Value, first and second slow-time derivatives.
    pub fn eval(&self, tau: f64) -> (f64, f64, f64) {
        let mut v = self.mean + self.slope * tau;
        let mut d1 = self.slope;
        let mut d2 = 0.0;
        for h in &self.harmonics {
            let k = TAU * f64::from(h.order);
            let (s, c) = (k * tau).sin_cos();
            v += h.cos * c + h.sin * s;
            d1 += k * (h.sin * c - h.cos * s);
            d2 -= k * k * (h.cos * c + h.sin * s);
        }
        (v, d1, d2)
    }

    pub fn value(&self, tau: f64) -> f64 {
        self.eval(tau).0
    }
}

/// Sampled path interpolated component-wise by not-a-knot cubic splines.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    alpha: CubicSpline,
    beta: CubicSpline,
    gamma: CubicSpline,
}

impl SampledPath {
    pub fn new(taus: &[f64], samples: &[GhoParams]) -> Result<Self> {
        let column = |f: fn(&GhoParams) -> f64| samples.iter().map(f).collect::<Vec<_>>();
        Ok(Self {
            alpha: CubicSpline::not_a_knot(taus, &column(|p| p.alpha))?,
            beta: CubicSpline::not_a_knot(taus, &column(|p| p.beta))?,
            gamma: CubicSpline::not_a_knot(taus, &column(|p| p.gamma))?,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.alpha.domain()
    }

    fn eval(&self, tau: f64) -> Option<(GhoParams, GhoRates)> {
        let (a, da) = self.alpha.eval(tau)?;
        let (b, db) = self.beta.eval(tau)?;
        let (g, dg) = self.gamma.eval(tau)?;
        Some((GhoParams::new(a, b, g), GhoRates::new(da, db, dg)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleFamily {
    Constant(GhoParams),
    /// `start + slope * tau`.
    LinearRamp { start: GhoParams, slope: GhoRates },
    TrigLoop { alpha: SlowFn, beta: SlowFn, gamma: SlowFn },
    SampledSpline(SampledPath),
}

impl ScheduleFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleFamily::Constant(_) => "constant",
            ScheduleFamily::LinearRamp { .. } => "linear-ramp",
            ScheduleFamily::TrigLoop { .. } => "trig-loop",
            ScheduleFamily::SampledSpline(_) => "sampled-spline",
        }
    }

    fn eval_slow(&self, tau: f64) -> Option<(GhoParams, GhoRates)> {
        match self {
            ScheduleFamily::Constant(p) => Some((*p, GhoRates::default())),
            ScheduleFamily::LinearRamp { start, slope } => Some((
                GhoParams::new(
                    start.alpha + slope.alpha * tau,
                    start.beta + slope.beta * tau,
                    start.gamma + slope.gamma * tau,
                ),
                *slope,
            )),
            ScheduleFamily::TrigLoop { alpha, beta, gamma } => {
                let (a, da, _) = alpha.eval(tau);
                let (b, db, _) = beta.eval(tau);
                let (g, dg, _) = gamma.eval(tau);
                Some((GhoParams::new(a, b, g), GhoRates::new(da, db, dg)))
            }
            ScheduleFamily::SampledSpline(path) => path.eval(tau),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Forward,
    Reversed,
}

/// A path through parameter space, addressable in slow time.
pub trait ParamPath: Sync {
    fn slowness(&self) -> SlownessSpec;

    /// Parameters and their slow-time derivatives `d/dtau` at slow time `tau`.
    fn params_at_tau(&self, tau: f64) -> Result<(GhoParams, GhoRates)>;

    fn epsilon(&self) -> f64 {
        self.slowness().epsilon
    }

    fn tau_window(&self) -> (f64, f64) {
        self.slowness().tau_window()
    }

    /// Parameters and real-time rates at real time `t`.
    fn sample(&self, t: f64) -> Result<ScheduleSample> {
        let slowness = self.slowness();
        slowness.check_window(t)?;
        let (params, slow_rates) = self.params_at_tau(slowness.epsilon * t)?;
        params.check_oscillatory()?;
        Ok(ScheduleSample {
            params,
            rates: slow_rates.scaled(slowness.epsilon),
        })
    }
}

/// A validated schedule: family, slowness and traversal direction.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSchedule {
    family: ScheduleFamily,
    slowness: SlownessSpec,
    orientation: Orientation,
    min_discriminant: f64,
}

impl ParamSchedule {
    pub fn new(family: ScheduleFamily, slowness: SlownessSpec) -> Result<Self> {
        Self::with_orientation(family, slowness, Orientation::Forward)
    }

    pub fn with_orientation(family: ScheduleFamily, slowness: SlownessSpec, orientation: Orientation) -> Result<Self> {
        let mut schedule = Self {
            family,
            slowness,
            orientation,
            min_discriminant: f64::INFINITY,
        };
        schedule.min_discriminant = schedule.validate()?;
        Ok(schedule)
    }

    pub fn constant(params: GhoParams, slowness: SlownessSpec) -> Result<Self> {
        Self::new(ScheduleFamily::Constant(params), slowness)
    }

    pub fn family(&self) -> &ScheduleFamily {
        &self.family
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The same path traversed the other way round over the same window.
    pub fn reversed(&self) -> Self {
        let orientation = match self.orientation {
            Orientation::Forward => Orientation::Reversed,
            Orientation::Reversed => Orientation::Forward,
        };
        Self {
            orientation,
            ..self.clone()
        }
    }

    /// The same geometric path over the same slow-time window, traversed at another slowness.
    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        let (tau0, tau1) = self.slowness.tau_window();
        Ok(Self {
            slowness: SlownessSpec::over_tau(epsilon, tau0, tau1)?,
            ..self.clone()
        })
    }

    /// The same path over a different slow-time window.
    pub fn with_tau_window(&self, tau0: f64, tau1: f64) -> Result<Self> {
        let slowness = SlownessSpec::over_tau(self.slowness.epsilon, tau0, tau1)?;
        Self::with_orientation(self.family.clone(), slowness, self.orientation)
    }

    /// Smallest sampled `alpha gamma - beta^2` along the path.
    pub fn min_discriminant(&self) -> f64 {
        self.min_discriminant
    }

    pub fn omega_min(&self) -> f64 {
        self.min_discriminant.sqrt()
    }

    /// Real-time evaluation with window and regime checks.
    pub fn eval(&self, t: f64) -> Result<ScheduleSample> {
        self.sample(t)
    }

    /// Whether the path returns to its starting point at the end of its window.
    pub fn is_closed(&self) -> bool {
        let (tau0, tau1) = self.slowness.tau_window();
        match (self.params_at_tau(tau0), self.params_at_tau(tau1)) {
            (Ok((a, _)), Ok((b, _))) => {
                let tol = 1e-12 * (1.0 + a.alpha.abs() + a.beta.abs() + a.gamma.abs());
                (a.alpha - b.alpha).abs() < tol && (a.beta - b.beta).abs() < tol && (a.gamma - b.gamma).abs() < tol
            }
            _ => false,
        }
    }

    fn validate(&self) -> Result<f64> {
        let (tau0, tau1) = self.slowness.tau_window();
        if let ScheduleFamily::SampledSpline(path) = &self.family {
            let (lo, hi) = path.domain();
            let slack = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
            if tau0 < lo - slack || tau1 > hi + slack {
                return Err(Error::InvalidSchedule(format!(
                    "slow-time window [{tau0}, {tau1}] exceeds the sampled range [{lo}, {hi}]"
                )));
            }
        }
        let mut min_disc = f64::INFINITY;
        for k in 0..VALIDATION_POINTS {
            let tau = tau0 + (tau1 - tau0) * k as f64 / (VALIDATION_POINTS - 1) as f64;
            let (p, r) = self.params_at_tau(tau)?;
            if !p.is_finite() || !r.alpha.is_finite() || !r.beta.is_finite() || !r.gamma.is_finite() {
                return Err(Error::InvalidSchedule(format!("non-finite parameters at tau = {tau}")));
            }
            p.check_oscillatory()?;
            min_disc = min_disc.min(p.discriminant());
        }
        Ok(min_disc)
    }
}

impl ParamPath for ParamSchedule {
    fn slowness(&self) -> SlownessSpec {
        self.slowness
    }

    fn params_at_tau(&self, tau: f64) -> Result<(GhoParams, GhoRates)> {
        let (tau0, tau1) = self.slowness.tau_window();
        let (eval_tau, sign) = match self.orientation {
            Orientation::Forward => (tau, 1.0),
            Orientation::Reversed => (tau0 + tau1 - tau, -1.0),
        };
        let (p, r) = self.family.eval_slow(eval_tau).ok_or_else(|| {
            let eps = self.slowness.epsilon;
            Error::OutOfWindow {
                t: tau / eps,
                t0: self.slowness.t_span.0,
                t1: self.slowness.t_span.1,
            }
        })?;
        Ok((p, r.scaled(sign)))
    }
}

/// Free-function form of [`ParamSchedule::eval`].
pub fn eval_schedule(schedule: &ParamSchedule, t: f64) -> Result<ScheduleSample> {
    schedule.eval(t)
}

/// A closed schedule together with the centroid cone spanning it.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopSpec {
    schedule: ParamSchedule,
    grid: usize,
    centroid: GhoParams,
}

impl LoopSpec {
    pub fn new(schedule: ParamSchedule) -> Result<Self> {
        Self::with_grid(schedule, DEFAULT_SURFACE_GRID)
    }

    pub fn with_grid(schedule: ParamSchedule, grid: usize) -> Result<Self> {
        if grid < 2 {
            return Err(Error::InvalidArgument(format!("surface grid must be at least 2, got {grid}")));
        }
        if !schedule.is_closed() {
            return Err(Error::InvalidSchedule(
                "surface integrals need a closed loop (start and end points differ)".into(),
            ));
        }
        // Periodic trapezoid rule: exact for the trig families.
        let n = 4 * grid;
        let mut c = GhoParams::new(0.0, 0.0, 0.0);
        let (tau0, tau1) = schedule.tau_window();
        for k in 0..n {
            let tau = tau0 + (tau1 - tau0) * k as f64 / n as f64;
            let (p, _) = schedule.params_at_tau(tau)?;
            c.alpha += p.alpha;
            c.beta += p.beta;
            c.gamma += p.gamma;
        }
        let inv = 1.0 / n as f64;
        let centroid = GhoParams::new(c.alpha * inv, c.beta * inv, c.gamma * inv);
        Ok(Self {
            schedule,
            grid,
            centroid,
        })
    }

    pub fn schedule(&self) -> &ParamSchedule {
        &self.schedule
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn centroid(&self) -> GhoParams {
        self.centroid
    }

    pub fn orientation(&self) -> Orientation {
        self.schedule.orientation()
    }

    pub fn reversed(&self) -> Self {
        Self {
            schedule: self.schedule.reversed(),
            ..self.clone()
        }
    }

    /// Loop point and its derivative with respect to the loop parameter `u` in `[0, 1]`.
    pub fn boundary(&self, u: f64) -> Result<(GhoParams, GhoRates)> {
        let (tau0, tau1) = self.schedule.tau_window();
        let span = tau1 - tau0;
        let (p, r) = self.schedule.params_at_tau(tau0 + span * u)?;
        Ok((p, r.scaled(span)))
    }

    /// Cone point `c + s (Gamma(u) - c)` with its partial derivatives in `s` and `u`.
    pub fn surface_point(&self, s: f64, u: f64) -> Result<(GhoParams, GhoRates, GhoRates)> {
        let (g, dg) = self.boundary(u)?;
        let c = self.centroid;
        let ds = GhoRates::new(g.alpha - c.alpha, g.beta - c.beta, g.gamma - c.gamma);
        let p = GhoParams::new(c.alpha + s * ds.alpha, c.beta + s * ds.beta, c.gamma + s * ds.gamma);
        Ok((p, ds, dg.scaled(s)))
    }
}
