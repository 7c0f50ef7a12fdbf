//! Canonical equivalences: GHO and Caldirola-Kanai, pendulum and damped oscillator,
//! and the complex chart of the GHO.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    DhoPath, DhoSample, GhoDrive, OdeSystem, PendulumParams, PendulumSample, PhaseSpaceState,
};
use crate::error::{Error, Result};
use crate::schedules::{GhoParams, GhoRates, ParamPath, ScheduleSample, SlownessSpec};

/// Largest `|Lambda|` accepted by the damping map.
pub const MAX_LAMBDA: f64 = 700.0;

/// `(alpha, beta, gamma) = (M Omega^2, lambda, 1/M)`.
pub fn dho_to_gho_params(s: &DhoSample) -> GhoParams {
    GhoParams::new(s.mass * s.omega_sq, s.lambda, 1.0 / s.mass)
}

/// `M = m l^2`, `lambda = v/l`, `Omega^2 = (g l + v^2 + v l') / l^2`.
pub fn pendulum_sample_to_dho(s: &PendulumSample) -> DhoSample {
    DhoSample {
        mass: s.m * s.l * s.l,
        mass_rate: s.m_dot * s.l * s.l + 2.0 * s.m * s.l * s.l_dot,
        lambda: s.v / s.l,
        omega_sq: (s.g * s.l + s.v * s.v + s.v * s.l_dot) / (s.l * s.l),
    }
}

pub fn pendulum_to_dho_params(pp: &PendulumParams, t: f64) -> Result<DhoSample> {
    Ok(pendulum_sample_to_dho(&pp.at(t)?))
}

/// `alpha = m(g l + v^2 + v l')`, `beta = v/l`, `gamma = 1/(m l^2)`.
pub fn pendulum_to_gho(s: &PendulumSample) -> GhoParams {
    GhoParams::new(
        s.m * (s.g * s.l + s.v * s.v + s.v * s.l_dot),
        s.v / s.l,
        1.0 / (s.m * s.l * s.l),
    )
}

/// The pendulum seen as a GHO parameter path.
#[derive(Debug, Clone, Copy)]
pub struct PendulumGhoPath<'a>(pub &'a PendulumParams);

impl ParamPath for PendulumGhoPath<'_> {
    fn slowness(&self) -> SlownessSpec {
        self.0.slowness()
    }

    fn params_at_tau(&self, tau: f64) -> Result<(GhoParams, GhoRates)> {
        let pp = self.0;
        let eps = pp.slowness().epsilon;
        let (m, dm, _) = pp.m.eval(tau);
        let (l, dl, ddl) = pp.l.eval(tau);
        let (v, dv, _) = pp.v.eval(tau);
        let g = pp.g;
        let inner = g * l + v * v + eps * v * dl;
        let d_inner = g * dl + 2.0 * v * dv + eps * (dv * dl + v * ddl);
        let gamma = 1.0 / (m * l * l);
        Ok((
            GhoParams::new(m * inner, v / l, gamma),
            GhoRates::new(
                dm * inner + m * d_inner,
                dv / l - v * dl / (l * l),
                -(dm / m + 2.0 * dl / l) * gamma,
            ),
        ))
    }
}

impl GhoDrive for PendulumGhoPath<'_> {
    fn params_at(&self, t: f64) -> Result<GhoParams> {
        self.0.at(t).map(|s| pendulum_to_gho(&s))
    }
}

/// The pendulum seen as a damped oscillator.
#[derive(Debug, Clone, Copy)]
pub struct PendulumDhoPath<'a>(pub &'a PendulumParams);

impl DhoPath for PendulumDhoPath<'_> {
    fn dho_at(&self, t: f64) -> Result<DhoSample> {
        pendulum_to_dho_params(self.0, t)
    }
}

/// A damped oscillator seen as a GHO.
#[derive(Debug, Clone, Copy)]
pub struct DhoGhoDrive<D>(pub D);

impl<D: DhoPath> GhoDrive for DhoGhoDrive<D> {
    fn params_at(&self, t: f64) -> Result<GhoParams> {
        self.0.dho_at(t).map(|s| dho_to_gho_params(&s))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.abs() > MAX_LAMBDA || !lambda.is_finite() {
        Err(Error::Overflow { lambda })
    } else {
        Ok(())
    }
}

/// `(Q, P) = (q e^Lambda, p e^-Lambda)`.
pub fn ck_map(q: f64, p: f64, lambda: f64) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    let e = lambda.exp();
    Ok((q * e, p / e))
}

pub fn ck_map_inverse(big_q: f64, big_p: f64, lambda: f64) -> Result<(f64, f64)> {
    ck_map(big_q, big_p, -lambda)
}

/// Mixed generating function `F(q, P) = q P e^Lambda`.
pub fn generating_function(q: f64, big_p: f64, lambda: f64) -> f64 {
    q * big_p * lambda.exp()
}

/// `dF/dt = q P lambda e^Lambda`.
pub fn generating_function_dt(q: f64, big_p: f64, lambda: f64, rate: f64) -> f64 {
    q * big_p * rate * lambda.exp()
}

/// `p^2 e^{-2 Lambda} / (2M) + M Omega^2 q^2 e^{2 Lambda} / 2`.
pub fn ck_hamiltonian(q: f64, p: f64, lambda: f64, s: &DhoSample) -> f64 {
    let e2 = (2.0 * lambda).exp();
    p * p / (2.0 * s.mass * e2) + 0.5 * s.mass * s.omega_sq * q * q * e2
}

/// `H_GHO(Q, P) - H_CK(q, p) - dF/dt` at one point.
pub fn hamiltonian_identity_residual(q: f64, p: f64, lambda: f64, s: &DhoSample) -> Result<f64> {
    let (big_q, big_p) = ck_map(q, p, lambda)?;
    let gho = crate::dynamics::gho_energy(&PhaseSpaceState::new(big_q, big_p, 0.0), &dho_to_gho_params(s));
    Ok(gho - ck_hamiltonian(q, p, lambda, s) - generating_function_dt(q, big_p, lambda, s.lambda))
}

/// `q(t) = phi(t) e^{-Lambda(t)}` on a shared time grid.
pub fn pendulum_dho_substitution(phi: &[f64], lambda_acc: &[f64]) -> Result<Vec<f64>> {
    if phi.len() != lambda_acc.len() {
        return Err(Error::InvalidArgument(format!(
            "{} angle samples but {} damping samples",
            phi.len(),
            lambda_acc.len()
        )));
    }
    phi.iter()
        .zip(lambda_acc)
        .map(|(&f, &l)| {
            check_lambda(l)?;
            Ok(f * (-l).exp())
        })
        .collect()
}

/// A point map between two canonical planes.
pub trait CanonicalMap {
    fn name(&self) -> &str;
    fn forward(&self, x: (f64, f64)) -> Result<(f64, f64)>;
    fn inverse(&self, y: (f64, f64)) -> Result<(f64, f64)>;
}

/// The damping map at fixed `Lambda`, from `(q, p)` to `(Q, P)`.
#[derive(Debug, Clone, Copy)]
pub struct CkMap {
    pub lambda: f64,
}

impl CanonicalMap for CkMap {
    fn name(&self) -> &str {
        "gho-caldirola-kanai"
    }
    fn forward(&self, x: (f64, f64)) -> Result<(f64, f64)> {
        ck_map(x.0, x.1, self.lambda)
    }
    fn inverse(&self, y: (f64, f64)) -> Result<(f64, f64)> {
        ck_map_inverse(y.0, y.1, self.lambda)
    }
}

/// Central-difference Jacobian determinant of `forward` minus one.
pub fn symplectic_residual<M: CanonicalMap + ?Sized>(map: &M, x: (f64, f64)) -> Result<f64> {
    let hq = 1e-6 * x.0.abs().max(1.0);
    let hp = 1e-6 * x.1.abs().max(1.0);
    let a = map.forward((x.0 + hq, x.1))?;
    let b = map.forward((x.0 - hq, x.1))?;
    let c = map.forward((x.0, x.1 + hp))?;
    let d = map.forward((x.0, x.1 - hp))?;
    let j00 = (a.0 - b.0) / (2.0 * hq);
    let j10 = (a.1 - b.1) / (2.0 * hq);
    let j01 = (c.0 - d.0) / (2.0 * hp);
    let j11 = (c.1 - d.1) / (2.0 * hp);
    // In two dimensions J^T Omega J = det(J) Omega.
    Ok((j00 * j11 - j01 * j10 - 1.0).abs())
}

/// `|inverse(forward(x)) - x|` in the max norm.
pub fn round_trip_error<M: CanonicalMap + ?Sized>(map: &M, x: (f64, f64)) -> Result<f64> {
    let back = map.inverse(map.forward(x)?)?;
    Ok((back.0 - x.0).abs().max((back.1 - x.1).abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub map_name: String,
    pub max_state_deviation: f64,
    pub hamiltonian_identity_residual: Option<f64>,
    pub symplectic_residual: f64,
}

/// `sqrt(omega / (2 gamma))`, the scale of the complex chart.
fn chart_scale(p: &GhoParams) -> Result<(f64, f64)> {
    let w = p.frequency()?;
    Ok((w, (w / (2.0 * p.gamma)).sqrt()))
}

/// `z = sqrt(omega / 2 gamma) (Q - i w)` with `w = (gamma P + beta Q) / omega`, so that `z zbar = E / omega`.
pub fn to_complex(state: &PhaseSpaceState, p: &GhoParams) -> Result<Complex64> {
    let (w, a) = chart_scale(p)?;
    Ok(Complex64::new(a * state.q, -a * (p.gamma * state.p + p.beta * state.q) / w))
}

/// `Q = sqrt(gamma / 2 omega)(z + zbar)`, `P = [(i omega - beta) z - (i omega + beta) zbar] / sqrt(2 omega gamma)`.
pub fn from_complex(z: Complex64, p: &GhoParams, t: f64) -> Result<PhaseSpaceState> {
    let w = p.frequency()?;
    let zb = z.conj();
    let q = (p.gamma / (2.0 * w)).sqrt() * (z + zb);
    let big_p = (Complex64::new(-p.beta, w) * z - Complex64::new(p.beta, w) * zb) / (2.0 * w * p.gamma).sqrt();
    Ok(PhaseSpaceState::new(q.re, big_p.re, t))
}

/// The complex chart as a real map `(Q, P) -> (sqrt2 Im z, sqrt2 Re z)`, a canonical (coordinate, momentum) pair.
#[derive(Debug, Clone, Copy)]
pub struct ComplexChart {
    pub params: GhoParams,
}

impl CanonicalMap for ComplexChart {
    fn name(&self) -> &str {
        "gho-complex"
    }
    fn forward(&self, x: (f64, f64)) -> Result<(f64, f64)> {
        let z = to_complex(&PhaseSpaceState::new(x.0, x.1, 0.0), &self.params)?;
        Ok((std::f64::consts::SQRT_2 * z.im, std::f64::consts::SQRT_2 * z.re))
    }
    fn inverse(&self, y: (f64, f64)) -> Result<(f64, f64)> {
        let z = Complex64::new(y.1, y.0) / std::f64::consts::SQRT_2;
        let s = from_complex(z, &self.params, 0.0)?;
        Ok((s.q, s.p))
    }
}

/// `{Q, P}` computed in the chart coordinates by central differences of the inverse map.
pub fn complex_poisson_bracket(chart: &ComplexChart, x: (f64, f64)) -> Result<f64> {
    let y = chart.forward(x)?;
    // The chart is linear at fixed parameters, so wide steps cost no truncation error.
    let h0 = y.0.abs().max(1.0);
    let h1 = y.1.abs().max(1.0);
    let a = chart.inverse((y.0 + h0, y.1))?;
    let b = chart.inverse((y.0 - h0, y.1))?;
    let c = chart.inverse((y.0, y.1 + h1))?;
    let d = chart.inverse((y.0, y.1 - h1))?;
    let q_y = (a.0 - b.0) / (2.0 * h0);
    let p_y = (a.1 - b.1) / (2.0 * h0);
    let q_x = (c.0 - d.0) / (2.0 * h1);
    let p_x = (c.1 - d.1) / (2.0 * h1);
    Ok(q_y * p_x - q_x * p_y)
}

/// Parameters, real-time rates and the frequency rate needed by the complex Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexCoefficients {
    pub params: GhoParams,
    pub rates: GhoRates,
    pub omega: f64,
    pub omega_rate: f64,
}

impl ComplexCoefficients {
    pub fn new(params: GhoParams, rates: GhoRates) -> Result<Self> {
        let sample = ScheduleSample { params, rates };
        Ok(Self {
            params,
            rates,
            omega: sample.frequency()?,
            omega_rate: sample.frequency_rate()?,
        })
    }
}

/// The complex Hamiltonian with `z` and `zbar` treated as independent arguments.
pub fn complex_hamiltonian_at(z: Complex64, zb: Complex64, c: &ComplexCoefficients) -> Complex64 {
    let i = Complex64::i();
    let (w, g, b) = (c.omega, c.params.gamma, c.params.beta);
    let sq_diff = z * z - zb * zb;
    let sum_sq = (z + zb) * (z + zb);
    w * z * zb + i * (c.omega_rate / (4.0 * w)) * sq_diff - (c.rates.beta / (4.0 * w)) * sum_sq
        + (c.rates.gamma / (4.0 * w * g)) * (-i * w * sq_diff + b * sum_sq)
}

/// Value of the complex Hamiltonian on the conjugate pair `(z, zbar)`.
pub fn complex_hamiltonian(z: Complex64, c: &ComplexCoefficients) -> Complex64 {
    complex_hamiltonian_at(z, z.conj(), c)
}

/// `z' = dH/d(-i zbar) = i dH/dzbar`.
pub fn complex_flow(z: Complex64, c: &ComplexCoefficients) -> Complex64 {
    let i = Complex64::i();
    let zb = z.conj();
    let (w, g, b) = (c.omega, c.params.gamma, c.params.beta);
    let dh_dzb = w * z - i * (c.omega_rate / (2.0 * w)) * zb - (c.rates.beta / (2.0 * w)) * (z + zb)
        + (c.rates.gamma / (4.0 * w * g)) * (2.0 * i * w * zb + 2.0 * b * (z + zb));
    i * dh_dzb
}

/// Coefficient of `z zbar` in the complex Hamiltonian, read off by polarization.
pub fn zz_coefficient(c: &ComplexCoefficients) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let h = |a, b| complex_hamiltonian_at(a, b, c);
    (h(one, one) - h(one, zero) - h(zero, one)).re
}

/// GHO flow written in the complex chart, state `(Re z, Im z)`.
pub struct ComplexGhoSystem<'a, P: ?Sized>(pub &'a P);

impl<P: ParamPath + ?Sized> OdeSystem for ComplexGhoSystem<'_, P> {
    fn dim(&self) -> usize {
        2
    }
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let s = self.0.sample(t)?;
        let c = ComplexCoefficients::new(s.params, s.rates)?;
        let dz = complex_flow(Complex64::new(y[0], y[1]), &c);
        dy[0] = dz.re;
        dy[1] = dz.im;
        Ok(())
    }
    fn labels(&self) -> Vec<String> {
        vec!["re_z".into(), "im_z".into()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{gho_energy, gho_rhs};
    use crate::schedules::SlowFn;

    #[test]
    fn parameter_identification_examples() {
        let s = DhoSample { mass: 1.0, mass_rate: 0.0, lambda: 0.0, omega_sq: 1.0 };
        assert_eq!(dho_to_gho_params(&s), GhoParams::new(1.0, 0.0, 1.0));
        let s = DhoSample { mass: 2.0, mass_rate: 0.0, lambda: 0.1, omega_sq: 2.25 };
        assert_eq!(dho_to_gho_params(&s), GhoParams::new(4.5, 0.1, 0.5));
        let w = dho_to_gho_params(&s).frequency().unwrap();
        assert!((w * w - (2.25 - 0.01)).abs() < 1e-14);
    }

    #[test]
    fn pendulum_to_dho_examples() {
        let pp = PendulumParams::new(
            SlowFn::constant(1.0),
            SlowFn::constant(2.0),
            SlowFn::constant(0.2),
            9.81,
            SlownessSpec::new(1e-3, (0.0, 1.0)).unwrap(),
        )
        .unwrap();
        let d = pendulum_to_dho_params(&pp, 0.5).unwrap();
        assert_eq!((d.mass, d.lambda), (4.0, 0.1));
        assert!((d.omega_sq - (19.62 + 0.04) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn ck_map_examples() {
        assert_eq!(ck_map(0.3, -0.7, 0.0).unwrap(), (0.3, -0.7));
        let (a, b) = ck_map(1.0, 1.0, 2f64.ln()).unwrap();
        assert!((a - 2.0).abs() < 1e-15 && (b - 0.5).abs() < 1e-15);
        assert!(matches!(ck_map(1.0, 1.0, 701.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn substitution_examples() {
        let ts: Vec<f64> = (0..50).map(|k| k as f64 * 0.2).collect();
        let phi: Vec<f64> = ts.iter().map(|t| (0.1 * t).exp()).collect();
        let lam: Vec<f64> = ts.iter().map(|t| 0.1 * t).collect();
        for q in pendulum_dho_substitution(&phi, &lam).unwrap() {
            assert!((q - 1.0).abs() < 1e-15);
        }
        assert_eq!(pendulum_dho_substitution(&phi, &vec![0.0; 50]).unwrap(), phi);
    }

    #[test]
    fn complex_chart_of_the_unit_oscillator() {
        let p = GhoParams::new(1.0, 0.0, 1.0);
        let s = PhaseSpaceState::new(1.0, 0.0, 0.0);
        let z = to_complex(&s, &p).unwrap();
        assert!(z.im.abs() < 1e-16);
        assert!((z.norm_sqr() - 0.5).abs() < 1e-15);
        assert!((z.norm_sqr() * 1.0 - gho_energy(&s, &p)).abs() < 1e-15);
    }

    #[test]
    fn constant_parameters_rotate_the_chart() {
        let p = GhoParams::new(2.0, 1.0, 2.0);
        let c = ComplexCoefficients::new(p, GhoRates::default()).unwrap();
        let z = Complex64::new(0.3, -0.8);
        let h = complex_hamiltonian(z, &c);
        assert!((h.re - c.omega * z.norm_sqr()).abs() < 1e-15 && h.im.abs() < 1e-15);
        let dz = complex_flow(z, &c);
        let expect = Complex64::i() * c.omega * z;
        assert!((dz - expect).norm() < 1e-15);
    }

    #[test]
    fn complex_flow_matches_real_flow_pointwise() {
        let p = GhoParams::new(2.0, 0.3, 1.2);
        let r = GhoRates::new(0.01, -0.02, 0.015);
        let c = ComplexCoefficients::new(p, r).unwrap();
        let s = PhaseSpaceState::new(0.7, -0.4, 0.0);
        let z = to_complex(&s, &p).unwrap();
        let dz = complex_flow(z, &c);
        // Differentiate z(Q(t), P(t), params(t)) along the real flow by a central difference.
        let (dq, dp) = gho_rhs(&s, &p);
        let h = 1e-5;
        let at = |k: f64| {
            let pp = GhoParams::new(p.alpha + k * r.alpha, p.beta + k * r.beta, p.gamma + k * r.gamma);
            to_complex(&PhaseSpaceState::new(s.q + k * dq, s.p + k * dp, 0.0), &pp).unwrap()
        };
        let fd = (at(h) - at(-h)) / (2.0 * h);
        assert!((fd - dz).norm() < 1e-9, "{fd} vs {dz}");
    }

    #[test]
    fn ck_map_is_canonical() {
        let m = CkMap { lambda: 0.37 };
        assert!(symplectic_residual(&m, (0.4, -1.3)).unwrap() < 1e-9);
        assert!(round_trip_error(&m, (0.4, -1.3)).unwrap() < 1e-15);
    }
}
