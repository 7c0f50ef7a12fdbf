//! Last-multiplier and Lagrangian certificates for second-order equations `q'' = F(q, q', t)`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::dynamics::{PendulumParams, Trajectory, HIROTA_GUARD};
use crate::error::{Error, Result};

pub const CATALOG: [&str; 3] = ["caldirola-kanai", "quadratic-friction", "hirota"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterBag {
    pub m: f64,
    pub b: f64,
    pub omega0: f64,
    pub lambda: f64,
    #[serde(rename = "Omega")]
    pub big_omega: f64,
    pub m0: f64,
}

impl Default for ParameterBag {
    fn default() -> Self {
        Self {
            m: 1.0,
            b: 0.5,
            omega0: 1.0,
            lambda: 0.1,
            big_omega: 1.0,
            m0: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    CaldirolaKanai,
    QuadraticFriction,
    Hirota,
}

/// One catalog entry: force, multiplier and Lagrangian with their analytic partials.
#[derive(Debug, Clone, PartialEq)]
pub struct VariationalSpec {
    pub model: Model,
    pub params: ParameterBag,
    /// Constant factor applied to the multiplier (gauge freedom).
    pub scale: f64,
    /// Sign of the exponent in the quadratic-friction multiplier `m exp(+-2 b q)`.
    pub exponent_sign: f64,
    pub has_lagrangian: bool,
}

/// Partial derivatives `(d/dt, d/dq, d/dqdot)`.
type Partials = (f64, f64, f64);

impl VariationalSpec {
    pub fn catalog(name: &str) -> Result<Self> {
        let model = match name {
            "caldirola-kanai" => Model::CaldirolaKanai,
            "quadratic-friction" => Model::QuadraticFriction,
            "hirota" => Model::Hirota,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown catalog entry {other:?}; expected one of {CATALOG:?}"
                )))
            }
        };
        Ok(Self {
            model,
            params: ParameterBag::default(),
            scale: 1.0,
            exponent_sign: 1.0,
            has_lagrangian: true,
        })
    }

    /// Quadratic friction with the sign-flipped multiplier `m exp(-2 b q)`, which fails the PDE.
    pub fn flipped_quadratic_friction() -> Self {
        Self {
            exponent_sign: -1.0,
            ..Self::catalog("quadratic-friction").expect("catalog entry exists")
        }
    }

    pub fn name(&self) -> &'static str {
        match self.model {
            Model::CaldirolaKanai => "caldirola-kanai",
            Model::QuadraticFriction => "quadratic-friction",
            Model::Hirota => "hirota",
        }
    }

    pub fn with_params(mut self, params: ParameterBag) -> Self {
        self.params = params;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn without_lagrangian(mut self) -> Self {
        self.has_lagrangian = false;
        self
    }

    pub fn check_domain(&self, q: f64, qdot: f64, t: f64) -> Result<()> {
        let ok = q.is_finite()
            && qdot.is_finite()
            && t.is_finite()
            && match self.model {
                Model::Hirota => q.abs() < FRAC_PI_2 - HIROTA_GUARD,
                Model::QuadraticFriction => self.params.b != 0.0 && (2.0 * self.params.b * q).abs() < 700.0,
                Model::CaldirolaKanai => (2.0 * self.params.lambda * t).abs() < 700.0,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::DomainViolation {
                model: self.name(),
                q,
                qdot,
                t,
            })
        }
    }

    /// `F(q, q', t)` and `dF/dq'`.
    fn force_with_slope(&self, q: f64, qdot: f64, _t: f64) -> (f64, f64) {
        let p = &self.params;
        match self.model {
            Model::CaldirolaKanai => (
                -2.0 * p.lambda * qdot - p.big_omega * p.big_omega * q,
                -2.0 * p.lambda,
            ),
            Model::QuadraticFriction => (-p.b * qdot * qdot - p.omega0 * p.omega0 * q, -2.0 * p.b * qdot),
            Model::Hirota => {
                let tq = q.tan();
                (-(1.0 + qdot * qdot) * tq, -2.0 * qdot * tq)
            }
        }
    }

    pub fn force(&self, q: f64, qdot: f64, t: f64) -> f64 {
        self.force_with_slope(q, qdot, t).0
    }

    /// Multiplier value and its analytic partials.
    fn multiplier_with_partials(&self, q: f64, qdot: f64, t: f64) -> (f64, Partials) {
        let p = &self.params;
        let c = self.scale;
        match self.model {
            Model::CaldirolaKanai => {
                let m = c * p.m0 * (2.0 * p.lambda * t).exp();
                (m, (2.0 * p.lambda * m, 0.0, 0.0))
            }
            Model::QuadraticFriction => {
                let k = 2.0 * self.exponent_sign * p.b;
                let m = c * p.m * (k * q).exp();
                (m, (0.0, k * m, 0.0))
            }
            Model::Hirota => {
                let d = 1.0 + qdot * qdot;
                let m = c / d;
                (m, (0.0, 0.0, -2.0 * c * qdot / (d * d)))
            }
        }
    }

    pub fn multiplier(&self, q: f64, qdot: f64, t: f64) -> f64 {
        self.multiplier_with_partials(q, qdot, t).0
    }

    pub fn lagrangian(&self, q: f64, qdot: f64, t: f64) -> Result<f64> {
        if !self.has_lagrangian {
            return Err(Error::MissingLagrangian(self.name()));
        }
        let p = &self.params;
        Ok(match self.model {
            Model::CaldirolaKanai => {
                0.5 * p.m0 * (2.0 * p.lambda * t).exp() * (qdot * qdot - p.big_omega * p.big_omega * q * q)
            }
            Model::QuadraticFriction => {
                let w2 = p.omega0 * p.omega0;
                let b2 = 2.0 * p.b * p.b;
                0.5 * p.m * ((qdot * qdot - w2 / p.b * q + w2 / b2) * (2.0 * p.b * q).exp() - w2 / b2)
            }
            Model::Hirota => {
                let c = q.cos();
                qdot * qdot.atan() - 0.5 * (1.0 + qdot * qdot).ln() + 0.5 * (c * c).ln()
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub q: f64,
    pub qdot: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub q: f64,
    pub qdot: f64,
    pub t: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub spec: String,
    pub check: String,
    pub grid: String,
    pub samples: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    pub worst: Vec<Offender>,
}

const WORST_KEPT: usize = 5;

fn report(spec: &VariationalSpec, check: &str, grid: String, values: Vec<(SamplePoint, f64)>) -> Result<ResidualReport> {
    if let Some((s, _)) = values.iter().find(|(_, r)| !r.is_finite()) {
        return Err(Error::DomainViolation {
            model: spec.name(),
            q: s.q,
            qdot: s.qdot,
            t: s.t,
        });
    }
    let n = values.len();
    let max_abs = values.iter().map(|(_, r)| r.abs()).fold(0.0, f64::max);
    let mean_abs = if n == 0 { 0.0 } else { values.iter().map(|(_, r)| r.abs()).sum::<f64>() / n as f64 };
    let mut sorted = values;
    // Stable sort keeps ties in sample order, so reports are deterministic.
    sorted.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    let worst = sorted
        .iter()
        .take(WORST_KEPT)
        .map(|(s, r)| Offender {
            q: s.q,
            qdot: s.qdot,
            t: s.t,
            residual: *r,
        })
        .collect();
    Ok(ResidualReport {
        spec: spec.name().to_owned(),
        check: check.to_owned(),
        grid,
        samples: n,
        max_abs,
        mean_abs,
        worst,
    })
}

/// Regular `n x n x n` grid over the given ranges.
pub fn grid_samples(q: (f64, f64), qdot: (f64, f64), t: (f64, f64), n: usize) -> Vec<SamplePoint> {
    let at = |r: (f64, f64), k: usize| {
        if n == 1 {
            0.5 * (r.0 + r.1)
        } else {
            r.0 + (r.1 - r.0) * k as f64 / (n - 1) as f64
        }
    };
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                out.push(SamplePoint {
                    q: at(q, i),
                    qdot: at(qdot, j),
                    t: at(t, k),
                });
            }
        }
    }
    out
}

fn describe(samples: &[SamplePoint]) -> String {
    let range = |f: fn(&SamplePoint) -> f64| {
        let lo = samples.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = samples.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        format!("[{lo}, {hi}]")
    };
    format!(
        "{} points, q in {}, qdot in {}, t in {}",
        samples.len(),
        range(|s| s.q),
        range(|s| s.qdot),
        range(|s| s.t)
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Differentiation {
    /// Catalog partials combined by the product rule.
    Analytic,
    /// Central differences with relative step `1e-6`.
    FiniteDifference,
}

/// Residual of `dM/dt + q' dM/dq + d(M F)/dq' = 0` at every sample.
pub fn multiplier_residual(
    spec: &VariationalSpec,
    samples: &[SamplePoint],
    mode: Differentiation,
) -> Result<ResidualReport> {
    let mut values = Vec::with_capacity(samples.len());
    for s in samples {
        spec.check_domain(s.q, s.qdot, s.t)?;
        let r = match mode {
            Differentiation::Analytic => {
                let (f, f_v) = spec.force_with_slope(s.q, s.qdot, s.t);
                let (m, (m_t, m_q, m_v)) = spec.multiplier_with_partials(s.q, s.qdot, s.t);
                m_t + s.qdot * m_q + m_v * f + m * f_v
            }
            Differentiation::FiniteDifference => {
                let mult = |q: f64, v: f64, t: f64| spec.multiplier(q, v, t);
                let mf = |q: f64, v: f64, t: f64| spec.multiplier(q, v, t) * spec.force(q, v, t);
                let ht = 1e-6 * s.t.abs().max(1.0);
                let hq = 1e-6 * s.q.abs().max(1.0);
                let hv = 1e-6 * s.qdot.abs().max(1.0);
                let m_t = (mult(s.q, s.qdot, s.t + ht) - mult(s.q, s.qdot, s.t - ht)) / (2.0 * ht);
                let m_q = (mult(s.q + hq, s.qdot, s.t) - mult(s.q - hq, s.qdot, s.t)) / (2.0 * hq);
                let mf_v = (mf(s.q, s.qdot + hv, s.t) - mf(s.q, s.qdot - hv, s.t)) / (2.0 * hv);
                m_t + s.qdot * m_q + mf_v
            }
        };
        values.push((*s, r));
    }
    let check = match mode {
        Differentiation::Analytic => "multiplier-pde",
        Differentiation::FiniteDifference => "multiplier-pde-fd",
    };
    report(spec, check, describe(samples), values)
}

/// Relative step of the fourth-order stencils used on the Lagrangian.
pub const LAGRANGIAN_FD_STEP: f64 = 1e-3;

fn step(x: f64) -> f64 {
    LAGRANGIAN_FD_STEP * x.abs().max(1.0)
}

fn d2<F: Fn(f64) -> Result<f64>>(f: F, x: f64) -> Result<f64> {
    let h = step(x);
    Ok((-f(x + 2.0 * h)? + 16.0 * f(x + h)? - 30.0 * f(x)? + 16.0 * f(x - h)? - f(x - 2.0 * h)?) / (12.0 * h * h))
}

fn d1<F: Fn(f64) -> Result<f64>>(f: F, x: f64) -> Result<f64> {
    let h = step(x);
    Ok((-f(x + 2.0 * h)? + 8.0 * f(x + h)? - 8.0 * f(x - h)? + f(x - 2.0 * h)?) / (12.0 * h))
}

/// Compares `d^2 L / dq'^2` (fourth-order central difference) with the multiplier.
pub fn hessian_matches_multiplier(spec: &VariationalSpec, samples: &[SamplePoint]) -> Result<ResidualReport> {
    if !spec.has_lagrangian {
        return Err(Error::MissingLagrangian(spec.name()));
    }
    let mut values = Vec::with_capacity(samples.len());
    for s in samples {
        spec.check_domain(s.q, s.qdot, s.t)?;
        let hess = d2(|v| spec.lagrangian(s.q, v, s.t), s.qdot)?;
        values.push((*s, hess - spec.multiplier(s.q, s.qdot, s.t)));
    }
    report(spec, "hessian-multiplier", describe(samples), values)
}

/// A point on a curve in configuration space with its first two time derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub t: f64,
    pub q: f64,
    pub qdot: f64,
    pub qddot: f64,
}

/// Reads `(t, q, q')` from a trajectory and takes `q''` from the equation of motion.
pub fn kinematics_from_trajectory(spec: &VariationalSpec, traj: &Trajectory) -> Result<Vec<Kinematics>> {
    if traj.dim() < 2 {
        return Err(Error::InvalidArgument("trajectory must carry (q, qdot)".into()));
    }
    (0..traj.len())
        .map(|i| {
            let (t, y) = (traj.time(i), traj.state(i));
            spec.check_domain(y[0], y[1], t)?;
            Ok(Kinematics {
                t,
                q: y[0],
                qdot: y[1],
                qddot: spec.force(y[0], y[1], t),
            })
        })
        .collect()
}

/// `[d/dt dL/dq' - dL/dq] / M` along a curve, with finite-difference partials of `L`.
pub fn euler_lagrange_residual(spec: &VariationalSpec, curve: &[Kinematics]) -> Result<ResidualReport> {
    if !spec.has_lagrangian {
        return Err(Error::MissingLagrangian(spec.name()));
    }
    let l = |q: f64, v: f64, t: f64| spec.lagrangian(q, v, t);
    let mut values = Vec::with_capacity(curve.len());
    for k in curve {
        spec.check_domain(k.q, k.qdot, k.t)?;
        let l_vv = d2(|v| l(k.q, v, k.t), k.qdot)?;
        let l_vq = d1(|q| d1(|v| l(q, v, k.t), k.qdot), k.q)?;
        let l_vt = d1(|t| d1(|v| l(k.q, v, t), k.qdot), k.t)?;
        let l_q = d1(|q| l(q, k.qdot, k.t), k.q)?;
        let el = l_vv * k.qddot + l_vq * k.qdot + l_vt - l_q;
        let point = SamplePoint {
            q: k.q,
            qdot: k.qdot,
            t: k.t,
        };
        values.push((point, el / spec.multiplier(k.q, k.qdot, k.t)));
    }
    let grid = format!("{} trajectory points", curve.len());
    report(spec, "euler-lagrange", grid, values)
}

/// Coefficients of the reduced pendulum Lagrangian `K phi'^2 - V phi^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedLagrangian {
    /// `m l^2 / 2`.
    pub kinetic: f64,
    /// `(m g l - l (v m' + m v')) / 2`.
    pub potential: f64,
    /// Real-time derivative of `kinetic`.
    pub kinetic_rate: f64,
}

impl ReducedLagrangian {
    pub fn squared_frequency(&self) -> f64 {
        self.potential / self.kinetic
    }
}

pub fn averaged_pendulum_lagrangian(pp: &PendulumParams, t: f64) -> Result<ReducedLagrangian> {
    let s = pp.at(t)?;
    Ok(ReducedLagrangian {
        kinetic: 0.5 * s.m * s.l * s.l,
        potential: 0.5 * (s.m * s.g * s.l - s.l * (s.v * s.m_dot + s.m * s.v_dot)),
        kinetic_rate: 0.5 * (s.m_dot * s.l * s.l + 2.0 * s.m * s.l * s.l_dot),
    })
}

/// Euler-Lagrange flow of the reduced pendulum Lagrangian, state `(phi, phi')`.
pub struct ReducedPendulumSystem<'a>(pub &'a PendulumParams);

impl crate::dynamics::OdeSystem for ReducedPendulumSystem<'_> {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let c = averaged_pendulum_lagrangian(self.0, t)?;
        dy[0] = y[1];
        dy[1] = -(c.kinetic_rate / c.kinetic) * y[1] - c.squared_frequency() * y[0];
        Ok(())
    }
    fn labels(&self) -> Vec<String> {
        vec!["phi".into(), "phidot".into()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(name: &str) -> VariationalSpec {
        VariationalSpec::catalog(name).unwrap()
    }

    #[test]
    fn catalog_lookup() {
        for name in CATALOG {
            assert_eq!(spec(name).name(), name);
        }
        assert!(VariationalSpec::catalog("duffing").is_err());
    }

    #[test]
    fn caldirola_kanai_multiplier_annuls_the_pde() {
        let grid = grid_samples((-1.0, 1.0), (-1.0, 1.0), (0.0, 10.0), 10);
        let r = multiplier_residual(&spec("caldirola-kanai"), &grid, Differentiation::Analytic).unwrap();
        assert!(r.max_abs < 1e-10, "{}", r.max_abs);
        assert_eq!(r.samples, 1000);
    }

    #[test]
    fn flipped_quadratic_friction_multiplier_leaves_a_residual() {
        let grid = grid_samples((-1.0, 1.0), (-1.0, 1.0), (0.0, 1.0), 5);
        let s = VariationalSpec::flipped_quadratic_friction();
        let r = multiplier_residual(&s, &grid, Differentiation::Analytic).unwrap();
        for p in &grid {
            let m = s.multiplier(p.q, p.qdot, p.t);
            let direct = multiplier_residual(&s, std::slice::from_ref(p), Differentiation::Analytic).unwrap();
            assert!((direct.worst[0].residual - (-4.0 * 0.5 * p.qdot * m)).abs() < 1e-12);
        }
        assert!(r.max_abs > 0.1);
    }

    #[test]
    fn hirota_domain_is_enforced() {
        let bad = [SamplePoint { q: 1.6, qdot: 0.0, t: 0.0 }];
        let r = multiplier_residual(&spec("hirota"), &bad, Differentiation::Analytic);
        assert!(matches!(r, Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn missing_lagrangian_is_reported() {
        let s = spec("hirota").without_lagrangian();
        let grid = grid_samples((0.0, 0.1), (0.0, 0.1), (0.0, 0.0), 2);
        assert!(matches!(hessian_matches_multiplier(&s, &grid), Err(Error::MissingLagrangian("hirota"))));
    }

    #[test]
    fn reduced_lagrangian_without_suspension_motion() {
        use crate::schedules::{SlowFn, SlownessSpec};
        let pp = PendulumParams::new(
            SlowFn::constant(2.0),
            SlowFn::constant(0.5),
            SlowFn::constant(0.0),
            9.81,
            SlownessSpec::new(1e-3, (0.0, 1.0)).unwrap(),
        )
        .unwrap();
        let c = averaged_pendulum_lagrangian(&pp, 0.3).unwrap();
        assert_eq!(c.kinetic, 0.5 * 2.0 * 0.25);
        assert_eq!(c.potential, 0.5 * 2.0 * 9.81 * 0.5);
    }
}
