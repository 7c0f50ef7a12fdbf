use hannay_core::dynamics::{integrate, GhoSystem, IntegrateOptions};
use hannay_core::phases::{
    decompose, dynamical_phase, geometric_phase_line, geometric_phase_surface_estimate, PhaseDecomposition,
};
use hannay_core::schedules::{LoopSpec, ParamPath, ParamSchedule, ScheduleFamily, SlowFn, SlownessSpec};

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

fn run(schedule: &ParamSchedule) -> PhaseDecomposition {
    let p0 = schedule.eval(0.0).unwrap().params;
    let y0 = [1.0, -p0.beta / p0.gamma];
    let opts = IntegrateOptions::oscillator(1e-12, 2.0);
    let traj = integrate(&GhoSystem(schedule), &y0, schedule.slowness().t_span, &opts).unwrap();
    decompose(&traj, schedule).unwrap()
}

#[test]
fn residual_is_small_and_shrinks_with_slowness() {
    let a = run(&hannay_loop(1e-3));
    let b = run(&hannay_loop(5e-4));
    println!("{a:?}\n{b:?}");
    assert!(a.residual.abs() < 0.05);
    assert!(a.residual.abs() / b.residual.abs() >= 1.4);
    let surface = a.theta_g_surface.unwrap();
    assert!((surface - a.theta_g_line).abs() < 1e-6);
}

#[test]
fn geometric_phase_depends_only_on_the_path() {
    let a = hannay_loop(1e-3);
    let b = hannay_loop(5e-4);
    let ga = geometric_phase_line(&a, 0.0, 1e3).unwrap();
    let gb = geometric_phase_line(&b, 0.0, 2e3).unwrap();
    assert!((ga - gb).abs() < 1e-12);
    let da = dynamical_phase(&a, 0.0, 1e3).unwrap();
    let db = dynamical_phase(&b, 0.0, 2e3).unwrap();
    assert!((db / da - 2.0).abs() < 1e-9);
}

#[test]
fn orientation_and_double_traversal() {
    let s = hannay_loop(1e-3);
    let g = geometric_phase_line(&s, 0.0, 1e3).unwrap();
    let r = s.reversed();
    assert!((geometric_phase_line(&r, 0.0, 1e3).unwrap() + g).abs() < 1e-12);
    let twice = s.with_tau_window(0.0, 2.0).unwrap();
    assert!((geometric_phase_line(&twice, 0.0, 2e3).unwrap() - 2.0 * g).abs() < 1e-12);
    let surf = geometric_phase_surface_estimate(&LoopSpec::new(s).unwrap()).unwrap();
    let surf_rev = geometric_phase_surface_estimate(&LoopSpec::new(r).unwrap()).unwrap();
    assert!((surf.value + surf_rev.value).abs() < 1e-9);
    // Richardson removes the O(h^2) midpoint error.
    assert!((surf.value - g).abs() < 1e-10);
    assert!((surf.value - g).abs() < (surf.fine - g).abs());
}

// The excursion of I along a loop that starts with nonzero rates is first
// order in epsilon, so halving epsilon halves the drift.
#[test]
fn invariant_excursion_is_first_order_in_slowness() {
    let a = run(&hannay_loop(1e-3)).invariant_drift;
    let b = run(&hannay_loop(5e-4)).invariant_drift;
    assert!(a < 2e-3, "{a}");
    assert!((a / b - 2.0).abs() < 0.2, "{a} {b}");
}
