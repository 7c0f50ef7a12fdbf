use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hannay_core::dynamics::*;
use hannay_core::lagrange::{averaged_pendulum_lagrangian, ReducedPendulumSystem};
use hannay_core::phases::{
    dynamical_phase, extract_phase, geometric_phase_line, pendulum_effective_frequency, pendulum_effective_phase,
    pendulum_phases, total_phase, unwrap_phases,
};
use hannay_core::schedules::{GhoParams, ParamPath, ParamSchedule, ScheduleFamily, SlowFn, SlownessSpec};
use hannay_core::transforms::*;

fn pendulum(epsilon: f64, l: SlowFn) -> PendulumParams {
    PendulumParams::new(
        SlowFn::trig(1.0, 0.0, 0.2),
        l,
        SlowFn::trig(0.0, 0.01, 0.005),
        9.81,
        SlownessSpec::over_tau(epsilon, 0.0, 1.0).unwrap(),
    )
    .unwrap()
}

fn varying_length() -> SlowFn {
    SlowFn::trig(1.0, 0.1, 0.05)
}

#[test]
fn pendulum_and_damped_oscillator_share_trajectories() {
    let pp = pendulum(1e-3, varying_length());
    let (t0, t1) = pp.slowness().t_span;
    let opts = IntegrateOptions::oscillator(1e-12, 3.5);
    let (phi0, p0) = (0.1, 0.0);
    let a = integrate(&PendulumSystem(&pp), &[phi0, p0], (t0, t1), &opts).unwrap();
    let s0 = pp.at(t0).unwrap();
    let qdot0 = p0 / (s0.m * s0.l * s0.l);
    let b = integrate(&DhoSystem(PendulumDhoPath(&pp)), &[phi0, qdot0, 0.0], (t0, t1), &opts).unwrap();
    assert_eq!(a.times(), b.times());
    let q = pendulum_dho_substitution(&a.column(0), &b.column(2)).unwrap();
    let dev_q = q.iter().zip(b.column(0)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let dev_phi = (0..a.len())
        .map(|i| (a.state(i)[0] - b.state(i)[0] * b.state(i)[2].exp()).abs())
        .fold(0.0, f64::max);
    assert!(dev_phi < 1e-8, "{dev_phi}");
    assert!(dev_q < 1e-8, "{dev_q}");
}

#[test]
fn pendulum_routes_to_the_gho_agree() {
    let pp = pendulum(1e-3, varying_length());
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let t = rng.gen_range(0.0..1000.0);
        let s = pp.at(t).unwrap();
        let direct = pendulum_to_gho(&s);
        let via = dho_to_gho_params(&pendulum_sample_to_dho(&s));
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(1e-300);
        assert!(rel(direct.alpha, via.alpha) < 1e-15);
        assert!(rel(direct.beta, via.beta) < 1e-15 || direct.beta == via.beta);
        assert!(rel(direct.gamma, via.gamma) < 1e-15);
        let st = PhaseSpaceState::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), t);
        let (a, b) = pendulum_rhs_at(&st, &s);
        let (c, d) = gho_rhs(&st, &direct);
        assert!((a - c).abs() < 1e-12 && (b - d).abs() < 1e-12);
    }
}

#[test]
fn pendulum_path_rates_match_finite_differences() {
    let pp = pendulum(1e-3, varying_length());
    let path = PendulumGhoPath(&pp);
    for tau in [0.1, 0.37, 0.8] {
        let (_, r) = path.params_at_tau(tau).unwrap();
        let h = 1e-5;
        let a = path.params_at_tau(tau + h).unwrap().0;
        let b = path.params_at_tau(tau - h).unwrap().0;
        assert!(((a.alpha - b.alpha) / (2.0 * h) - r.alpha).abs() < 1e-7);
        assert!(((a.beta - b.beta) / (2.0 * h) - r.beta).abs() < 1e-7);
        assert!(((a.gamma - b.gamma) / (2.0 * h) - r.gamma).abs() < 1e-7);
    }
}

#[test]
fn pendulum_phases_match_the_gho_route_at_fixed_length() {
    let pp = pendulum(1e-3, SlowFn::constant(0.8));
    let path = PendulumGhoPath(&pp);
    let (t0, t1) = pp.slowness().t_span;
    let (d, g) = pendulum_phases(&pp, t0, t1).unwrap();
    let d2 = dynamical_phase(&path, t0, t1).unwrap();
    let g2 = geometric_phase_line(&path, t0, t1).unwrap();
    assert!((d - d2).abs() < 1e-9, "{d} vs {d2}");
    assert!((g - g2).abs() < 1e-9, "{g} vs {g2}");
    assert!(g.abs() > 1e-6);
}

#[test]
fn length_rate_terms_cancel_to_first_order() {
    let pp = pendulum(1e-3, varying_length());
    let path = PendulumGhoPath(&pp);
    let (t0, t1) = pp.slowness().t_span;
    let (d, g) = pendulum_phases(&pp, t0, t1).unwrap();
    let gho = dynamical_phase(&path, t0, t1).unwrap() + geometric_phase_line(&path, t0, t1).unwrap();
    assert!((d + g - gho).abs() < 1e-3, "{}", d + g - gho);
}

#[test]
fn pendulum_geometric_phase_vanishes_without_speed_variation() {
    let still = PendulumParams::new(
        SlowFn::trig(1.0, 0.0, 0.2),
        varying_length(),
        SlowFn::constant(0.0),
        9.81,
        SlownessSpec::over_tau(1e-3, 0.0, 1.0).unwrap(),
    )
    .unwrap();
    assert_eq!(pendulum_phases(&still, 0.0, 1000.0).unwrap().1, 0.0);
    let steady = PendulumParams::new(
        SlowFn::constant(1.0),
        varying_length(),
        SlowFn::constant(0.3),
        9.81,
        SlownessSpec::over_tau(1e-3, 0.0, 1.0).unwrap(),
    )
    .unwrap();
    assert_eq!(pendulum_phases(&steady, 0.0, 1000.0).unwrap().1, 0.0);
    assert_eq!(pendulum_effective_frequency(&steady, 10.0).unwrap(), 9.81 / steady.at(10.0).unwrap().l);
}

#[test]
fn effective_frequency_reproduces_the_phase_split() {
    let pp = pendulum(1e-3, varying_length());
    let (d, g) = pendulum_phases(&pp, 0.0, 1000.0).unwrap();
    let eff = pendulum_effective_phase(&pp, 0.0, 1000.0).unwrap();
    assert!((eff - d - g).abs() < 1e-3, "{}", eff - d - g);
    for t in [0.0, 250.0, 777.0] {
        let c = averaged_pendulum_lagrangian(&pp, t).unwrap();
        let w2 = pendulum_effective_frequency(&pp, t).unwrap();
        assert!((c.squared_frequency() - w2).abs() < 1e-14 * w2);
    }
}

fn extracted_total(traj: &Trajectory, chart: impl Fn(f64, &[f64]) -> (PhaseSpaceState, GhoParams)) -> f64 {
    let mut raw = Vec::new();
    let mut omega = Vec::new();
    for i in 0..traj.len() {
        let (s, p) = chart(traj.time(i), traj.state(i));
        raw.push(extract_phase(&s, &p).unwrap());
        omega.push(p.frequency().unwrap());
    }
    total_phase(&unwrap_phases(&raw, &omega).unwrap())
}

#[test]
fn reduced_and_full_pendulum_accumulate_the_same_phase() {
    let pp = pendulum(1e-3, varying_length());
    let span = pp.slowness().t_span;
    let opts = IntegrateOptions::oscillator(1e-12, 3.5);
    let full = integrate(&PendulumSystem(&pp), &[0.1, 0.0], span, &opts).unwrap();
    let s0 = pp.at(0.0).unwrap();
    let phidot0 = pendulum_rhs_at(&PhaseSpaceState::new(0.1, 0.0, 0.0), &s0).0;
    let reduced = integrate(&ReducedPendulumSystem(&pp), &[0.1, phidot0], span, &opts).unwrap();
    let a = extracted_total(&full, |t, y| {
        (PhaseSpaceState::new(y[0], y[1], t), pendulum_to_gho(&pp.at(t).unwrap()))
    });
    let b = extracted_total(&reduced, |t, y| {
        let c = averaged_pendulum_lagrangian(&pp, t).unwrap();
        let p = GhoParams::new(2.0 * c.potential, 0.0, 1.0 / (2.0 * c.kinetic));
        (PhaseSpaceState::new(y[0], 2.0 * c.kinetic * y[1], t), p)
    });
    assert!((a - b).abs() < 0.05, "{a} vs {b}");
}

fn damped() -> DhoParams {
    DhoParams::new(
        SlowFn::trig(1.5, 0.2, 0.1),
        SlowFn::trig(0.05, 0.0, 0.03),
        SlowFn::trig(1.2, 0.1, 0.0),
        SlownessSpec::over_tau(1e-2, 0.0, 1.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn gho_and_caldirola_kanai_flows_coincide() {
    let dp = damped();
    let span = dp.slowness().t_span;
    let opts = IntegrateOptions::oscillator(1e-12, 1.6);
    let ck = integrate(&CaldirolaKanaiSystem(&dp), &[0.8, 0.2, 0.0], span, &opts).unwrap();
    let gho = integrate(&GhoSystem(DhoGhoDrive(&dp)), &[0.8, 0.2], span, &opts).unwrap();
    let mut dev = 0.0f64;
    for i in 0..ck.len() {
        let y = ck.state(i);
        let (q, p) = ck_map(y[0], y[1], y[2]).unwrap();
        let z = gho.state(i);
        dev = dev.max((q - z[0]).abs()).max((p - z[1]).abs());
    }
    assert!(dev < 1e-8, "{dev}");

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_h = 0.0f64;
    let mut worst_s = 0.0f64;
    for _ in 0..100 {
        let i = rng.gen_range(0..ck.len());
        let (t, lam) = (ck.time(i), ck.state(i)[2]);
        let s = dp.dho_at(t).unwrap();
        let (q, p) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        worst_h = worst_h.max(hamiltonian_identity_residual(q, p, lam, &s).unwrap().abs());
        worst_s = worst_s.max(symplectic_residual(&CkMap { lambda: lam }, (q, p)).unwrap());
        // The two energies differ by exactly dF/dt.
        let (bq, bp) = ck_map(q, p, lam).unwrap();
        let diff = gho_energy(&PhaseSpaceState::new(bq, bp, t), &dho_to_gho_params(&s)) - ck_hamiltonian(q, p, lam, &s);
        if (q * p).abs() > 1e-3 {
            assert!(diff.abs() > 0.0);
        }
        assert!((diff - generating_function_dt(q, bp, lam, s.lambda)).abs() < 1e-10);
    }
    assert!(worst_h < 1e-10, "{worst_h}");
    assert!(worst_s < 1e-8, "{worst_s}");
}

#[test]
fn generating_function_reproduces_the_map() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let (q, p, lam) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-3.0..3.0));
        let (bq, bp) = ck_map(q, p, lam).unwrap();
        // F is bilinear in (q, P), so a wide step is exact up to rounding.
        let h = 1e-3;
        let f_q = (generating_function(q + h, bp, lam) - generating_function(q - h, bp, lam)) / (2.0 * h);
        let f_p = (generating_function(q, bp + h, lam) - generating_function(q, bp - h, lam)) / (2.0 * h);
        assert!((f_q - p).abs() < 1e-10 * p.abs().max(1.0));
        assert!((f_p - bq).abs() < 1e-10 * bq.abs().max(1.0));
        let (rq, rp) = ck_map_inverse(bq, bp, lam).unwrap();
        assert!((rq - q).abs() < 1e-12 && (rp - p).abs() < 1e-12);
    }
}

#[test]
fn complex_chart_contracts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_rt = 0.0f64;
    let mut worst_pb = 0.0f64;
    let mut worst_sym = 0.0f64;
    for _ in 0..1000 {
        let p = loop {
            let p = GhoParams::new(rng.gen_range(0.2..3.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.2..3.0));
            if p.discriminant() > 0.05 {
                break p;
            }
        };
        let s = PhaseSpaceState::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), 0.0);
        let z = to_complex(&s, &p).unwrap();
        let back = from_complex(z, &p, 0.0).unwrap();
        worst_rt = worst_rt.max((back.q - s.q).abs()).max((back.p - s.p).abs());
        let w = p.frequency().unwrap();
        assert!((w * z.norm_sqr() - gho_energy(&s, &p)).abs() < 1e-12 * gho_energy(&s, &p).max(1.0));
        let chart = ComplexChart { params: p };
        worst_pb = worst_pb.max((complex_poisson_bracket(&chart, (s.q, s.p)).unwrap() - 1.0).abs());
        worst_sym = worst_sym.max(symplectic_residual(&chart, (s.q, s.p)).unwrap());
    }
    assert!(worst_rt < 1e-12, "{worst_rt}");
    assert!(worst_pb < 1e-12, "{worst_pb}");
    assert!(worst_sym < 1e-8, "{worst_sym}");
}

fn hannay_loop(epsilon: f64) -> ParamSchedule {
    ParamSchedule::new(
        ScheduleFamily::TrigLoop {
            alpha: SlowFn::constant(2.0),
            beta: SlowFn::trig(0.0, 0.4, 0.0),
            gamma: SlowFn::trig(1.0, 0.0, 0.4),
        },
        SlownessSpec::over_tau(epsilon, 0.0, 1.0).unwrap(),
    )
    .unwrap()
}

#[test]
fn zz_coefficient_carries_the_geometric_integrand() {
    let s = hannay_loop(1e-2);
    for k in 0..50 {
        let t = 100.0 * k as f64 / 49.0;
        let e = s.eval(t).unwrap();
        let c = ComplexCoefficients::new(e.params, e.rates).unwrap();
        let expect = c.omega + hannay_core::phases::geometric_integrand(&e.params, &e.rates).unwrap();
        assert!((zz_coefficient(&c) - expect).abs() < 1e-12);
    }
}

#[test]
fn complex_flow_tracks_the_real_flow() {
    let s = hannay_loop(1e-2);
    let span = s.slowness().t_span;
    let opts = IntegrateOptions::oscillator(1e-12, 2.0);
    let p0 = s.eval(0.0).unwrap().params;
    let y0 = [1.0, -p0.beta / p0.gamma];
    let real = integrate(&GhoSystem(&s), &y0, span, &opts).unwrap();
    let z0 = to_complex(&PhaseSpaceState::new(y0[0], y0[1], 0.0), &p0).unwrap();
    let cplx = integrate(&ComplexGhoSystem(&s), &[z0.re, z0.im], span, &opts).unwrap();
    let mut dev = 0.0f64;
    for i in 0..real.len() {
        let t = real.time(i);
        let z = Complex64::new(cplx.state(i)[0], cplx.state(i)[1]);
        let back = from_complex(z, &s.eval(t).unwrap().params, t).unwrap();
        dev = dev.max((back.q - real.state(i)[0]).abs()).max((back.p - real.state(i)[1]).abs());
    }
    assert!(dev < 1e-8, "{dev}");
}
