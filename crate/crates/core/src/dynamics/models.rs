//! Equations of motion for the five oscillators.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::schedules::{GhoParams, ParamPath, ParamSchedule, SlowFn, SlownessSpec, VALIDATION_POINTS};

use super::integrator::OdeSystem;
use super::trajectory::PhaseSpaceState;

/// `(Q', P') = (beta Q + gamma P, -alpha Q - beta P)`.
pub fn gho_rhs(state: &PhaseSpaceState, p: &GhoParams) -> (f64, f64) {
    (
        p.beta * state.q + p.gamma * state.p,
        -p.alpha * state.q - p.beta * state.p,
    )
}

pub fn gho_energy(state: &PhaseSpaceState, p: &GhoParams) -> f64 {
    0.5 * (p.alpha * state.q * state.q + 2.0 * p.beta * state.q * state.p + p.gamma * state.p * state.p)
}

/// Exact solution for constant parameters with phase zero at `t = 0`.
pub fn gho_closed_form(p: &GhoParams, r: f64, t: f64) -> Result<PhaseSpaceState> {
    let w = p.frequency()?;
    let (s, c) = (w * t).sin_cos();
    Ok(PhaseSpaceState::new(r * c, -(r / p.gamma) * (p.beta * c + w * s), t))
}

/// Anything that supplies GHO coefficients at real time `t`.
pub trait GhoDrive: Sync {
    fn params_at(&self, t: f64) -> Result<GhoParams>;
}

impl GhoDrive for GhoParams {
    fn params_at(&self, _t: f64) -> Result<GhoParams> {
        Ok(*self)
    }
}

impl GhoDrive for ParamSchedule {
    fn params_at(&self, t: f64) -> Result<GhoParams> {
        self.sample(t).map(|s| s.params)
    }
}

impl<D: GhoDrive + ?Sized> GhoDrive for &D {
    fn params_at(&self, t: f64) -> Result<GhoParams> {
        (**self).params_at(t)
    }
}

/// Hamilton flow of the generalized oscillator, state `(Q, P)`.
pub struct GhoSystem<D>(pub D);

impl<D: GhoDrive> OdeSystem for GhoSystem<D> {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let p = self.0.params_at(t)?;
        let (dq, dp) = gho_rhs(&PhaseSpaceState::new(y[0], y[1], t), &p);
        dy[0] = dq;
        dy[1] = dp;
        Ok(())
    }
    fn labels(&self) -> Vec<String> {
        vec!["Q".into(), "P".into()]
    }
}

/// Pendulum data at one instant; dotted quantities are real-time derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendulumSample {
    pub m: f64,
    pub m_dot: f64,
    pub l: f64,
    pub l_dot: f64,
    pub l_ddot: f64,
    pub v: f64,
    pub v_dot: f64,
    pub g: f64,
}

/// Pendulum with slowly varying mass, length and suspension speed.
#[derive(Debug, Clone, PartialEq)]
pub struct PendulumParams {
    pub m: SlowFn,
    pub l: SlowFn,
    pub v: SlowFn,
    pub g: f64,
    slowness: SlownessSpec,
}

impl PendulumParams {
    pub fn new(m: SlowFn, l: SlowFn, v: SlowFn, g: f64, slowness: SlownessSpec) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::DegenerateParameter("g must be positive"));
        }
        let pp = Self { m, l, v, g, slowness };
        let (tau0, tau1) = slowness.tau_window();
        for k in 0..VALIDATION_POINTS {
            let tau = tau0 + (tau1 - tau0) * k as f64 / (VALIDATION_POINTS - 1) as f64;
            if !(pp.m.value(tau) > 0.0) {
                return Err(Error::DegenerateParameter("mass must stay positive"));
            }
            if !(pp.l.value(tau) > 0.0) {
                return Err(Error::DegenerateParameter("length must stay positive"));
            }
        }
        Ok(pp)
    }

    pub fn slowness(&self) -> SlownessSpec {
        self.slowness
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        let (tau0, tau1) = self.slowness.tau_window();
        Self::new(
            self.m.clone(),
            self.l.clone(),
            self.v.clone(),
            self.g,
            SlownessSpec::over_tau(epsilon, tau0, tau1)?,
        )
    }

    pub fn at(&self, t: f64) -> Result<PendulumSample> {
        self.slowness.check_window(t)?;
        let eps = self.slowness.epsilon;
        let tau = eps * t;
        let (m, dm, _) = self.m.eval(tau);
        let (l, dl, ddl) = self.l.eval(tau);
        let (v, dv, _) = self.v.eval(tau);
        Ok(PendulumSample {
            m,
            m_dot: eps * dm,
            l,
            l_dot: eps * dl,
            l_ddot: eps * eps * ddl,
            v,
            v_dot: eps * dv,
            g: self.g,
        })
    }
}

/// Hamilton flow of the linearized moving-suspension pendulum, state `(phi, p)`.
pub fn pendulum_rhs_at(state: &PhaseSpaceState, s: &PendulumSample) -> (f64, f64) {
    let k = s.v / s.l;
    (
        state.p / (s.m * s.l * s.l) + k * state.q,
        -k * state.p - s.m * s.l * (s.g + s.v * s.v / s.l + s.v * s.l_dot / s.l) * state.q,
    )
}

pub fn pendulum_rhs(state: &PhaseSpaceState, pp: &PendulumParams) -> Result<(f64, f64)> {
    Ok(pendulum_rhs_at(state, &pp.at(state.t)?))
}

pub struct PendulumSystem<'a>(pub &'a PendulumParams);

impl OdeSystem for PendulumSystem<'_> {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let (a, b) = pendulum_rhs(&PhaseSpaceState::new(y[0], y[1], t), self.0)?;
        dy[0] = a;
        dy[1] = b;
        Ok(())
    }
    fn labels(&self) -> Vec<String> {
        vec!["phi".into(), "p".into()]
    }
}

/// Damped-oscillator coefficients at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DhoSample {
    pub mass: f64,
    pub mass_rate: f64,
    pub lambda: f64,
    pub omega_sq: f64,
}

/// Anything that supplies damped-oscillator coefficients at real time `t`.
pub trait DhoPath: Sync {
    fn dho_at(&self, t: f64) -> Result<DhoSample>;
}

impl<D: DhoPath + ?Sized> DhoPath for &D {
    fn dho_at(&self, t: f64) -> Result<DhoSample> {
        (**self).dho_at(t)
    }
}

/// Mass `M`, damping rate `lambda` and natural frequency `Omega` as slow functions.
#[derive(Debug, Clone, PartialEq)]
pub struct DhoParams {
    pub mass: SlowFn,
    pub lambda: SlowFn,
    pub omega: SlowFn,
    slowness: SlownessSpec,
}

impl DhoParams {
    pub fn new(mass: SlowFn, lambda: SlowFn, omega: SlowFn, slowness: SlownessSpec) -> Result<Self> {
        let (tau0, tau1) = slowness.tau_window();
        for k in 0..VALIDATION_POINTS {
            let tau = tau0 + (tau1 - tau0) * k as f64 / (VALIDATION_POINTS - 1) as f64;
            if !(mass.value(tau) > 0.0) {
                return Err(Error::DegenerateParameter("mass must stay positive"));
            }
        }
        Ok(Self {
            mass,
            lambda,
            omega,
            slowness,
        })
    }

    pub fn constant(mass: f64, lambda: f64, omega: f64, t_span: (f64, f64)) -> Result<Self> {
        Self::new(
            SlowFn::constant(mass),
            SlowFn::constant(lambda),
            SlowFn::constant(omega),
            SlownessSpec::new(1.0, t_span)?,
        )
    }

    pub fn slowness(&self) -> SlownessSpec {
        self.slowness
    }
}

impl DhoPath for DhoParams {
    fn dho_at(&self, t: f64) -> Result<DhoSample> {
        self.slowness.check_window(t)?;
        let eps = self.slowness.epsilon;
        let tau = eps * t;
        let (m, dm, _) = self.mass.eval(tau);
        let w = self.omega.value(tau);
        Ok(DhoSample {
            mass: m,
            mass_rate: eps * dm,
            lambda: self.lambda.value(tau),
            omega_sq: w * w,
        })
    }
}

/// `(q', q'') ` with `q'' = -(M'/M) q' - 2 lambda q' - Omega^2 q`.
pub fn dho_rhs_at(q: f64, qdot: f64, s: &DhoSample) -> (f64, f64) {
    (
        qdot,
        -(s.mass_rate / s.mass) * qdot - 2.0 * s.lambda * qdot - s.omega_sq * q,
    )
}

pub fn dho_rhs<D: DhoPath + ?Sized>(q: f64, qdot: f64, dp: &D, t: f64) -> Result<(f64, f64)> {
    Ok(dho_rhs_at(q, qdot, &dp.dho_at(t)?))
}

/// Damped oscillator in `(q, q', Lambda)` with `Lambda' = lambda`.
pub struct DhoSystem<D>(pub D);

impl<D: DhoPath> OdeSystem for DhoSystem<D> {
    fn dim(&self) -> usize {
        3
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let s = self.0.dho_at(t)?;
        let (a, b) = dho_rhs_at(y[0], y[1], &s);
        dy[0] = a;
        dy[1] = b;
        dy[2] = s.lambda;
        Ok(())
    }
    fn labels(&self) -> Vec<String> {
        vec!["q".into(), "qdot".into(), "Lambda".into()]
    }
}

/// Largest accumulated damping accepted before `exp(2 Lambda)` loses meaning.
pub const MAX_DAMPING_EXPONENT: f64 = 350.0;

/// Caldirola-Kanai Hamilton flow in `(q, p, Lambda)`:
/// `q' = p e^{-2 Lambda} / M`, `p' = -M Omega^2 q e^{2 Lambda}`.
pub struct CaldirolaKanaiSystem<D>(pub D);

impl<D: DhoPath> OdeSystem for CaldirolaKanaiSystem<D> {
    fn dim(&self) -> usize {
        3
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let s = self.0.dho_at(t)?;
        if y[2].abs() > MAX_DAMPING_EXPONENT {
            return Err(Error::Overflow { lambda: y[2] });
        }
        let e2 = (2.0 * y[2]).exp();
        dy[0] = y[1] / (e2 * s.mass);
        dy[1] = -s.mass * s.omega_sq * y[0] * e2;
        dy[2] = s.lambda;
        Ok(())
    }
    fn labels(&self) -> Vec<String> {
        vec!["q".into(), "p".into(), "Lambda".into()]
    }
}

/// `q'' = -b q'^2 - omega0^2 q`.
pub fn quadratic_friction_rhs(q: f64, qdot: f64, b: f64, omega0: f64) -> Result<(f64, f64)> {
    if b == 0.0 {
        return Err(Error::DegenerateParameter("quadratic friction needs b != 0"));
    }
    Ok((qdot, -b * qdot * qdot - omega0 * omega0 * q))
}

/// Conserved energy of the quadratic-friction oscillator.
pub fn quadratic_friction_energy(q: f64, qdot: f64, m: f64, b: f64, omega0: f64) -> f64 {
    let w2 = omega0 * omega0;
    0.5 * m * ((qdot * qdot + (w2 / b) * q - w2 / (2.0 * b * b)) * (2.0 * b * q).exp() + w2 / (2.0 * b * b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFrictionSystem {
    b: f64,
    omega0: f64,
}

impl QuadraticFrictionSystem {
    pub fn new(b: f64, omega0: f64) -> Result<Self> {
        if b == 0.0 {
            return Err(Error::DegenerateParameter("quadratic friction needs b != 0"));
        }
        Ok(Self { b, omega0 })
    }
}

impl OdeSystem for QuadraticFrictionSystem {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let (a, b) = quadratic_friction_rhs(y[0], y[1], self.b, self.omega0)?;
        dy[0] = a;
        dy[1] = b;
        Ok(())
    }
    fn labels(&self) -> Vec<String> {
        vec!["q".into(), "qdot".into()]
    }
}

/// Guard band below `pi/2` for the Hirota oscillator.
pub const HIROTA_GUARD: f64 = 1e-9;

/// `phi'' = -(1 + phi'^2) tan(phi)`.
pub fn hirota_rhs(phi: f64, phidot: f64) -> Result<(f64, f64)> {
    if !(phi.abs() < FRAC_PI_2 - HIROTA_GUARD) {
        return Err(Error::SingularConfiguration { phi });
    }
    Ok((phidot, -(1.0 + phidot * phidot) * phi.tan()))
}

/// `(1 + phi'^2) / cos^2 phi`, constant along Hirota orbits.
pub fn hirota_invariant(phi: f64, phidot: f64) -> f64 {
    let c = phi.cos();
    (1.0 + phidot * phidot) / (c * c)
}

pub struct HirotaSystem;

impl OdeSystem for HirotaSystem {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let (a, b) = hirota_rhs(y[0], y[1])?;
        dy[0] = a;
        dy[1] = b;
        Ok(())
    }
    fn labels(&self) -> Vec<String> {
        vec!["phi".into(), "phidot".into()]
    }
}
