use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hannay_core::dynamics::{gho_closed_form, gho_energy, gho_rhs, PhaseSpaceState};
use hannay_core::lagrange::{multiplier_residual, Differentiation, SamplePoint, VariationalSpec, CATALOG};
use hannay_core::phases::{adiabatic_invariant, curvature, extract_phase, unwrap_phases};
use hannay_core::schedules::{GhoParams, ParamSchedule, ScheduleFamily, SlowFn, SlownessSpec};
use hannay_core::transforms::{ck_map, ck_map_inverse, round_trip_error, symplectic_residual, CkMap, ComplexChart};

fn oscillatory() -> impl Strategy<Value = GhoParams> {
    (0.1f64..5.0, -2.0f64..2.0, 0.1f64..5.0)
        .prop_map(|(a, b, g)| GhoParams::new(a, b, g))
        .prop_filter("oscillatory", |p| p.discriminant() > 1e-3 * p.alpha * p.gamma)
}

fn state() -> impl Strategy<Value = (f64, f64)> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_filter("nonzero", |(q, p)| q.hypot(*p) > 1e-3)
}

fn trig_loop(epsilon: f64) -> ParamSchedule {
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn frequency_closes_the_discriminant(p in oscillatory()) {
        let w = p.frequency().unwrap();
        prop_assert!((w * w + p.beta * p.beta - p.alpha * p.gamma).abs() <= 1e-14 * p.alpha * p.gamma);
    }

    #[test]
    fn extracted_phase_reconstructs_the_state(p in oscillatory(), (q, mom) in state()) {
        let s = PhaseSpaceState::new(q, mom, 0.0);
        let ps = extract_phase(&s, &p).unwrap();
        prop_assert!(ps.r >= 0.0);
        let w = p.frequency().unwrap();
        let big_q = ps.r * ps.theta.cos();
        let big_p = -(w * ps.r * ps.theta.sin() + p.beta * big_q) / p.gamma;
        prop_assert!((big_q - q).abs() < 1e-12 * ps.r.max(1.0));
        prop_assert!((big_p - mom).abs() < 1e-11 * ps.r.max(1.0) * (w + p.beta.abs()) / p.gamma);
    }

    #[test]
    fn invariant_is_energy_over_frequency(p in oscillatory(), r in 0.1f64..3.0, t in 0.0f64..50.0) {
        let s = gho_closed_form(&p, r, t).unwrap();
        let i = adiabatic_invariant(&extract_phase(&s, &p).unwrap(), &p).unwrap();
        let e = gho_energy(&s, &p) / p.frequency().unwrap();
        prop_assert!((i - e).abs() < 1e-12 * e.max(1.0));
    }

    #[test]
    fn closed_form_solves_the_equations_of_motion(p in oscillatory(), t in 0.0f64..20.0) {
        let h = 1e-5;
        let a = gho_closed_form(&p, 1.0, t + h).unwrap();
        let b = gho_closed_form(&p, 1.0, t - h).unwrap();
        let (dq, dp) = gho_rhs(&gho_closed_form(&p, 1.0, t).unwrap(), &p);
        prop_assert!(((a.q - b.q) / (2.0 * h) - dq).abs() < 1e-7 * (1.0 + dq.abs()));
        prop_assert!(((a.p - b.p) / (2.0 * h) - dp).abs() < 1e-7 * (1.0 + dp.abs()));
    }

    #[test]
    fn ck_map_is_canonical((q, p) in state(), lambda in -5.0f64..5.0) {
        let (bq, bp) = ck_map(q, p, lambda).unwrap();
        let (rq, rp) = ck_map_inverse(bq, bp, lambda).unwrap();
        prop_assert!((rq - q).abs() < 1e-12 && (rp - p).abs() < 1e-12);
        let map = CkMap { lambda };
        prop_assert!(symplectic_residual(&map, (q, p)).unwrap() < 1e-8);
    }

    #[test]
    fn complex_chart_is_canonical(p in oscillatory(), x in state()) {
        let chart = ComplexChart { params: p };
        prop_assert!(round_trip_error(&chart, x).unwrap() < 1e-12 * (1.0 + x.0.abs() + x.1.abs()));
        prop_assert!(symplectic_residual(&chart, x).unwrap() < 1e-8);
    }

    #[test]
    fn unwrapped_phase_increases_on_closed_form_orbits(p in oscillatory(), n in 20usize..64) {
        let w = p.frequency().unwrap();
        let dt = std::f64::consts::TAU / (w * n as f64);
        let raw: Vec<_> = (0..4 * n)
            .map(|k| extract_phase(&gho_closed_form(&p, 1.0, k as f64 * dt).unwrap(), &p).unwrap())
            .collect();
        let un = unwrap_phases(&raw, &vec![w; raw.len()]).unwrap();
        prop_assert!(un.windows(2).all(|s| s[1].theta > s[0].theta));
        prop_assert!((un.last().unwrap().theta - un[0].theta - w * (4 * n - 1) as f64 * dt).abs() < 1e-9);
    }

    #[test]
    fn slow_time_reparameterization_is_exact(tau in 0.0f64..1.0) {
        let a = trig_loop(1e-3);
        let b = trig_loop(5e-4);
        let sa = a.eval(tau / 1e-3).unwrap();
        let sb = b.eval(tau / 5e-4).unwrap();
        prop_assert_eq!(sa.params, sb.params);
        prop_assert_eq!(sb.rates.alpha, 0.5 * sa.rates.alpha);
        prop_assert_eq!(sb.rates.beta, 0.5 * sa.rates.beta);
        prop_assert_eq!(sb.rates.gamma, 0.5 * sa.rates.gamma);
    }

    #[test]
    fn multiplier_gauge_scales_linearly(q in -1.0f64..1.0, v in -2.0f64..2.0, t in 0.0f64..5.0, c in 0.1f64..10.0) {
        for name in CATALOG {
            let spec = VariationalSpec::catalog(name).unwrap();
            let s = [SamplePoint { q, qdot: v, t }];
            let base = multiplier_residual(&spec, &s, Differentiation::Analytic).unwrap().max_abs;
            let scaled = multiplier_residual(&spec.with_scale(c), &s, Differentiation::Analytic).unwrap().max_abs;
            prop_assert!(base < 1e-10 && scaled < 1e-10 * c.max(1.0));
        }
        let flipped = VariationalSpec::flipped_quadratic_friction();
        let s = [SamplePoint { q, qdot: v, t }];
        let one = multiplier_residual(&flipped, &s, Differentiation::Analytic).unwrap().worst[0].residual;
        let two = multiplier_residual(&flipped.with_scale(c), &s, Differentiation::Analytic).unwrap().worst[0].residual;
        prop_assert!((two - c * one).abs() <= 1e-12 * (c * one).abs().max(1.0));
    }
}

#[test]
fn loop_closes_after_one_slow_period() {
    for eps in [1e-2, 1e-3, 5e-4] {
        let s = trig_loop(eps);
        let a = s.eval(0.0).unwrap().params;
        let b = s.eval(1.0 / eps).unwrap().params;
        assert!((a.alpha - b.alpha).abs() < 1e-14);
        assert!((a.beta - b.beta).abs() < 1e-14);
        assert!((a.gamma - b.gamma).abs() < 1e-14);
    }
}

#[test]
fn geometric_one_form_is_inexact() {
    // Components of the form (-1/omega) dbeta + (beta/(gamma omega)) dgamma at fixed alpha.
    let alpha = 2.0;
    let w = |b: f64, g: f64| (alpha * g - b * b).sqrt();
    let a_beta = |b: f64, g: f64| -1.0 / w(b, g);
    let a_gamma = |b: f64, g: f64| b / (g * w(b, g));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut witnessed = 0;
    for _ in 0..100 {
        let (b, g) = loop {
            let b = rng.gen_range(-1.0..1.0);
            let g = rng.gen_range(0.5..2.0);
            if alpha * g - b * b > 0.1 {
                break (b, g);
            }
        };
        let h = 1e-5;
        let lhs = (a_beta(b, g + h) - a_beta(b, g - h)) / (2.0 * h);
        let rhs = (a_gamma(b + h, g) - a_gamma(b - h, g)) / (2.0 * h);
        if (lhs - rhs).abs() > 1e-6 {
            witnessed += 1;
        }
        // Half the mismatch is the dbeta^dgamma coefficient of the curvature.
        let k = curvature(&GhoParams::new(alpha, b, g)).unwrap().1;
        assert!(((rhs - lhs) / 2.0 - k).abs() < 1e-8 * k);
    }
    assert!(witnessed >= 95, "{witnessed}");
}
