use std::f64::consts::TAU;

use hannay_core::dynamics::*;
use hannay_core::schedules::GhoParams;

fn periods(p: &GhoParams, n: f64) -> f64 {
    n * TAU / p.frequency().unwrap()
}

#[test]
fn closed_form_oracle_over_ten_periods() {
    for p in [GhoParams::new(1.0, 0.0, 1.0), GhoParams::new(2.0, 1.0, 2.0)] {
        let w = p.frequency().unwrap();
        let s0 = gho_closed_form(&p, 1.0, 0.0).unwrap();
        let opts = IntegrateOptions::oscillator(1e-12, w);
        let tr = integrate(&GhoSystem(p), &[s0.q, s0.p], (0.0, periods(&p, 10.0)), &opts).unwrap();
        let e0 = gho_energy(&s0, &p);
        let mut dev = 0.0f64;
        let mut drift = 0.0f64;
        for s in tr.phase_states() {
            let exact = gho_closed_form(&p, 1.0, s.t).unwrap();
            dev = dev.max((s.q - exact.q).abs()).max((s.p - exact.p).abs());
            drift = drift.max((gho_energy(&s, &p) - e0).abs() / e0);
        }
        assert!(dev < 1e-9, "deviation {dev}");
        assert!(drift < 1e-10, "energy drift {drift}");
    }
}

#[test]
fn tightening_the_tolerance_tightens_the_solution() {
    let p = GhoParams::new(2.0, 1.0, 2.0);
    let s0 = gho_closed_form(&p, 1.0, 0.0).unwrap();
    let t1 = periods(&p, 10.0);
    let mut last = f64::INFINITY;
    for tol in [1e-6, 1e-8, 1e-10, 1e-12] {
        let opts = IntegrateOptions::oscillator(tol, p.frequency().unwrap());
        let tr = integrate(&GhoSystem(p), &[s0.q, s0.p], (0.0, t1), &opts).unwrap();
        let dev = tr
            .phase_states()
            .map(|s| {
                let e = gho_closed_form(&p, 1.0, s.t).unwrap();
                (s.q - e.q).abs().max((s.p - e.p).abs())
            })
            .fold(0.0, f64::max);
        assert!(dev <= last.max(1e-12), "tol {tol}: {dev} after {last}");
        last = dev;
    }
}

#[test]
fn zero_state_stays_zero() {
    let p = GhoParams::new(2.0, 1.0, 2.0);
    let tr = integrate(&GhoSystem(p), &[0.0, 0.0], (0.0, 20.0), &IntegrateOptions::oscillator(1e-12, 2.0)).unwrap();
    assert!((0..tr.len()).all(|i| tr.state(i) == [0.0, 0.0]));
}

fn reversal_defect(p: GhoParams) -> f64 {
    let t1 = periods(&p, 3.0);
    let opts = IntegrateOptions::new(1e-13, Sampling::Uniform(t1 / 300.0));
    let fwd = integrate(&GhoSystem(p), &[1.0, 0.0], (0.0, t1), &opts).unwrap();
    let bwd = integrate(&TimeReversed(GhoSystem(p)), &[1.0, 0.0], (0.0, t1), &opts).unwrap();
    (0..fwd.len())
        .map(|i| {
            let (a, b) = (fwd.state(i), bwd.state(i));
            (a[0] - b[0]).abs().max((a[1] + b[1]).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn time_reversal_holds_only_without_cross_term() {
    assert!(reversal_defect(GhoParams::new(2.0, 0.0, 0.5)) < 1e-9);
    assert!(reversal_defect(GhoParams::new(2.0, 1.0, 2.0)) >= 1e-3);
}

#[test]
fn underdamped_oscillator_matches_its_closed_form() {
    let lambda = 0.1;
    let dp = DhoParams::constant(1.0, lambda, 1.0, (0.0, 70.0)).unwrap();
    let opts = IntegrateOptions::oscillator(1e-12, 1.0);
    let tr = integrate(&DhoSystem(&dp), &[1.0, -lambda, 0.0], (0.0, 10.0 * TAU), &opts).unwrap();
    let wd = (1.0 - lambda * lambda).sqrt();
    for i in 0..tr.len() {
        let t = tr.time(i);
        let exact = (-lambda * t).exp() * (wd * t).cos();
        assert!((tr.state(i)[0] - exact).abs() < 1e-9);
        assert!((tr.state(i)[2] - lambda * t).abs() < 1e-12);
    }
}

#[test]
fn caldirola_kanai_flow_reproduces_the_damped_equation() {
    use hannay_core::schedules::{SlowFn, SlownessSpec};
    let dp = DhoParams::new(
        SlowFn::trig(1.5, 0.2, 0.1),
        SlowFn::trig(0.05, 0.0, 0.03),
        SlowFn::trig(1.2, 0.1, 0.0),
        SlownessSpec::over_tau(1e-2, 0.0, 1.0).unwrap(),
    )
    .unwrap();
    let t1 = 100.0;
    let opts = IntegrateOptions::oscillator(1e-12, 1.6);
    let a = integrate(&DhoSystem(&dp), &[1.0, 0.3, 0.0], (0.0, t1), &opts).unwrap();
    let m0 = dp.dho_at(0.0).unwrap().mass;
    let b = integrate(&CaldirolaKanaiSystem(&dp), &[1.0, 0.3 * m0, 0.0], (0.0, t1), &opts).unwrap();
    let mut dev = 0.0f64;
    for i in 0..a.len() {
        let (x, y) = (a.state(i), b.state(i));
        let s = dp.dho_at(a.time(i)).unwrap();
        let qdot = y[1] * (-2.0 * y[2]).exp() / s.mass;
        dev = dev.max((x[0] - y[0]).abs()).max((x[1] - qdot).abs());
    }
    assert!(dev < 1e-9, "{dev}");
}

#[test]
fn quadratic_friction_energy_is_conserved() {
    let (m, b, w0) = (1.0, 0.5, 1.0);
    let sys = QuadraticFrictionSystem::new(b, w0).unwrap();
    let tr = integrate(&sys, &[0.5, 0.0], (0.0, 10.0 * TAU), &IntegrateOptions::oscillator(1e-13, 1.5)).unwrap();
    let e0 = quadratic_friction_energy(0.5, 0.0, m, b, w0);
    let drift = (0..tr.len())
        .map(|i| (quadratic_friction_energy(tr.state(i)[0], tr.state(i)[1], m, b, w0) - e0).abs() / e0)
        .fold(0.0, f64::max);
    assert!(drift < 1e-9, "{drift}");
}

#[test]
fn quadratic_friction_energy_has_zero_derivative_along_the_flow() {
    // Brute-force differentiation of the energy along the vector field.
    let (m, b, w0) = (1.3, 0.5, 1.1);
    for &(q, v) in &[(0.2, -0.4), (-0.7, 0.9), (1.1, 0.05)] {
        let (dq, dv) = quadratic_friction_rhs(q, v, b, w0).unwrap();
        let h = 1e-5;
        let e = |s: f64| quadratic_friction_energy(q + s * dq, v + s * dv, m, b, w0);
        let de = (e(h) - e(-h)) / (2.0 * h);
        assert!(de.abs() < 1e-9, "{de}");
    }
}

#[test]
fn hirota_invariant_is_conserved() {
    let tr = integrate(&HirotaSystem, &[0.3, 0.0], (0.0, 10.0 * TAU), &IntegrateOptions::oscillator(1e-13, 1.5)).unwrap();
    let c0 = hirota_invariant(0.3, 0.0);
    let drift = (0..tr.len())
        .map(|i| (hirota_invariant(tr.state(i)[0], tr.state(i)[1]) - c0).abs() / c0)
        .fold(0.0, f64::max);
    assert!(drift < 1e-9, "{drift}");
}

#[test]
fn csv_export_is_deterministic() {
    let p = GhoParams::new(2.0, 1.0, 2.0);
    let run = || {
        integrate(&GhoSystem(p), &[1.0, -0.5], (0.0, 5.0), &IntegrateOptions::oscillator(1e-12, 2.0))
            .unwrap()
            .to_csv_string()
    };
    let a = run();
    assert_eq!(a, run());
    assert!(a.starts_with("t,Q,P\n0,1,-0.5\n"));
}
