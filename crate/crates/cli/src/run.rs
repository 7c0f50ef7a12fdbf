//! Executes one scenario and writes its artifacts.

use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use hannay_core::dynamics::*;
use hannay_core::lagrange::{
    euler_lagrange_residual, grid_samples, hessian_matches_multiplier, kinematics_from_trajectory,
    multiplier_residual, Differentiation, ParameterBag, ResidualReport, VariationalSpec,
};
use hannay_core::phases::{adiabatic_report, decompose, decompose_path, AdiabaticDigest, AdiabaticReport, PhaseDecomposition};
use hannay_core::schedules::{GhoParams, ParamPath};
use hannay_core::transforms::{
    ck_map, from_complex, hamiltonian_identity_residual, symplectic_residual, to_complex, CkMap, ComplexChart,
    ComplexGhoSystem, DhoGhoDrive, EquivalenceReport, PendulumDhoPath, PendulumGhoPath,
};
use num_complex::Complex64;
use serde::Serialize;

use crate::scenario::{Analysis, ModelSpec, Scenario, SCHEMA_VERSION};
use crate::svg::{Plot, Series};

/// Points used to bound the fastest frequency along a drive.
const FREQUENCY_PROBES: usize = 1000;
/// States probed by the pointwise canonicity checks.
const CANONICITY_PROBES: usize = 100;
const MULTIPLIER_GRID: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrationStats {
    pub t0: f64,
    pub t1: f64,
    pub samples: usize,
    pub omega_max: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConservedDrift {
    pub quantity: &'static str,
    pub initial: f64,
    pub max_relative_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub schema: u64,
    pub version: &'static str,
    pub scenario: String,
    pub scenario_hash: String,
    pub model: &'static str,
    pub tolerance: f64,
    pub integration: IntegrationStats,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<PhaseDecomposition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adiabatic: Option<AdiabaticDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conserved: Option<ConservedDrift>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub equivalence: Vec<EquivalenceReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub multipliers: Vec<ResidualReport>,
    /// Seconds; written to the metadata file only.
    #[serde(skip)]
    pub wall_time: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub summary: RunSummary,
    pub trajectory: Trajectory,
    /// File name and SVG text.
    pub plots: Vec<(String, String)>,
}

fn path_omega_max<P: ParamPath + ?Sized>(path: &P) -> Result<f64> {
    let (tau0, tau1) = path.tau_window();
    let mut w = 0.0f64;
    for k in 0..FREQUENCY_PROBES {
        let tau = tau0 + (tau1 - tau0) * k as f64 / (FREQUENCY_PROBES - 1) as f64;
        w = w.max(path.params_at_tau(tau)?.0.frequency()?);
    }
    Ok(w)
}

fn dho_omega_max<D: DhoPath>(dp: &D, t_span: (f64, f64)) -> Result<f64> {
    let mut w = 0.0f64;
    for k in 0..FREQUENCY_PROBES {
        let t = t_span.0 + (t_span.1 - t_span.0) * k as f64 / (FREQUENCY_PROBES - 1) as f64;
        let s = dp.dho_at(t)?;
        w = w.max(s.omega_sq.abs().sqrt() + s.lambda.abs());
    }
    Ok(w)
}

fn options(s: &Scenario, omega_max: f64) -> IntegrateOptions {
    let schedule = match &s.model {
        ModelSpec::Gho { schedule, .. } => schedule.family().name(),
        ModelSpec::Pendulum { .. } | ModelSpec::Dho { .. } => "slow-fn",
        _ => "autonomous",
    };
    IntegrateOptions::new(
        s.tolerance,
        Sampling::PerPeriod {
            samples: s.samples_per_period,
            omega_max,
        },
    )
    .labelled(s.model.id(), schedule)
}

/// Evenly spaced sample indices, at most `n` of them.
fn probe_indices(len: usize, n: usize) -> Vec<usize> {
    if len <= n {
        return (0..len).collect();
    }
    (0..n).map(|k| k * (len - 1) / (n - 1)).collect()
}

pub fn complex_equivalence<P: ParamPath>(path: &P, real: &Trajectory, opts: &IntegrateOptions) -> Result<EquivalenceReport> {
    let (t0, t1) = (real.time(0), real.time(real.len() - 1));
    let p0 = path.sample(t0)?.params;
    let z0 = to_complex(&real.phase_state(0), &p0)?;
    let opts = IntegrateOptions {
        sampling: Sampling::Times(real.times().to_vec()),
        ..opts.clone()
    };
    let cplx = integrate(&ComplexGhoSystem(path), &[z0.re, z0.im], (t0, t1), &opts)?;
    let mut dev = 0.0f64;
    for i in 0..real.len() {
        let t = real.time(i);
        let z = Complex64::new(cplx.state(i)[0], cplx.state(i)[1]);
        let back = from_complex(z, &path.sample(t)?.params, t)?;
        dev = dev.max((back.q - real.state(i)[0]).abs()).max((back.p - real.state(i)[1]).abs());
    }
    let mut sym = 0.0f64;
    for i in probe_indices(real.len(), CANONICITY_PROBES) {
        let chart = ComplexChart {
            params: path.sample(real.time(i))?.params,
        };
        sym = sym.max(symplectic_residual(&chart, (real.state(i)[0], real.state(i)[1]))?);
    }
    Ok(EquivalenceReport {
        map_name: "gho-complex".into(),
        max_state_deviation: dev,
        hamiltonian_identity_residual: None,
        symplectic_residual: sym,
    })
}

pub fn pendulum_dho_equivalence(pp: &PendulumParams, traj: &Trajectory, opts: &IntegrateOptions) -> Result<EquivalenceReport> {
    let (t0, t1) = (traj.time(0), traj.time(traj.len() - 1));
    let s0 = pp.at(t0)?;
    let y = traj.state(0);
    let qdot0 = y[1] / (s0.m * s0.l * s0.l);
    let opts = IntegrateOptions {
        sampling: Sampling::Times(traj.times().to_vec()),
        ..opts.clone()
    };
    let dho = integrate(&DhoSystem(PendulumDhoPath(pp)), &[y[0], qdot0, 0.0], (t0, t1), &opts)?;
    let dev = (0..traj.len())
        .map(|i| (traj.state(i)[0] - dho.state(i)[0] * dho.state(i)[2].exp()).abs())
        .fold(0.0, f64::max);
    Ok(EquivalenceReport {
        map_name: "pendulum-dho".into(),
        max_state_deviation: dev,
        hamiltonian_identity_residual: None,
        symplectic_residual: 0.0,
    })
}

/// Integrates the Caldirola-Kanai and GHO flows and compares them through the canonical map.
pub fn ck_equivalence(dp: &DhoParams, q: f64, qdot: f64, opts: &IntegrateOptions) -> Result<EquivalenceReport> {
    let span = dp.slowness().t_span;
    let m0 = dp.dho_at(span.0)?.mass;
    let p0 = m0 * qdot;
    let ck = integrate(&CaldirolaKanaiSystem(dp), &[q, p0, 0.0], span, opts)?;
    let gho = integrate(&GhoSystem(DhoGhoDrive(dp)), &[q, p0], span, opts)?;
    let mut dev = 0.0f64;
    for i in 0..ck.len() {
        let y = ck.state(i);
        let (bq, bp) = ck_map(y[0], y[1], y[2])?;
        dev = dev.max((bq - gho.state(i)[0]).abs()).max((bp - gho.state(i)[1]).abs());
    }
    let (mut ham, mut sym) = (0.0f64, 0.0f64);
    for i in probe_indices(ck.len(), CANONICITY_PROBES) {
        let y = ck.state(i);
        let s = dp.dho_at(ck.time(i))?;
        ham = ham.max(hamiltonian_identity_residual(y[0], y[1], y[2], &s)?.abs());
        sym = sym.max(symplectic_residual(&CkMap { lambda: y[2] }, (y[0], y[1]))?);
    }
    Ok(EquivalenceReport {
        map_name: "gho-caldirola-kanai".into(),
        max_state_deviation: dev,
        hamiltonian_identity_residual: Some(ham),
        symplectic_residual: sym,
    })
}

/// PDE, Hessian and Euler-Lagrange checks on a box spanning the trajectory.
fn multiplier_checks(spec: &VariationalSpec, traj: &Trajectory) -> Result<Vec<ResidualReport>> {
    let range = |c: usize| {
        let col = traj.column(c);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    };
    let t = (traj.time(0), traj.time(traj.len() - 1));
    let grid = grid_samples(range(0), range(1), t, MULTIPLIER_GRID);
    Ok(vec![
        multiplier_residual(spec, &grid, Differentiation::Analytic)?,
        hessian_matches_multiplier(spec, &grid)?,
        euler_lagrange_residual(spec, &kinematics_from_trajectory(spec, traj)?)?,
    ])
}

fn conserved(quantity: &'static str, traj: &Trajectory, f: impl Fn(&[f64]) -> f64) -> ConservedDrift {
    let initial = f(traj.state(0));
    let drift = (0..traj.len())
        .map(|i| (f(traj.state(i)) - initial).abs() / initial.abs())
        .fold(0.0, f64::max);
    ConservedDrift {
        quantity,
        initial,
        max_relative_drift: drift,
    }
}

fn path_loop<P: ParamPath + ?Sized>(path: &P) -> Result<Vec<(f64, f64)>> {
    let (tau0, tau1) = path.tau_window();
    (0..=400)
        .map(|k| {
            let p: GhoParams = path.params_at_tau(tau0 + (tau1 - tau0) * k as f64 / 400.0)?.0;
            Ok((p.beta, p.gamma))
        })
        .collect()
}

fn plots(traj: &Trajectory, report: Option<&AdiabaticReport>, parameter_loop: Option<Vec<(f64, f64)>>) -> Vec<(String, String)> {
    let label = traj.labels()[0].clone();
    let coord: Vec<_> = (0..traj.len()).map(|i| (traj.time(i), traj.state(i)[0])).collect();
    let mut out = vec![(
        "trajectory.svg".to_owned(),
        Plot::new(&format!("{label} vs t"), "t", &label)
            .series(Series::new(&label, coord))
            .render(),
    )];
    if let Some(r) = report {
        let pts = r.t.iter().copied().zip(r.invariant.iter().copied()).collect();
        out.push((
            "invariant.svg".to_owned(),
            Plot::new("adiabatic invariant", "t", "I").series(Series::new("I", pts)).render(),
        ));
    }
    if let Some(pts) = parameter_loop {
        out.push((
            "loop.svg".to_owned(),
            Plot::new("parameter path", "beta", "gamma")
                .series(Series::new("(beta, gamma)", pts))
                .render(),
        ));
    }
    out
}

pub fn execute(s: &Scenario) -> Result<RunOutput> {
    let start = Instant::now();
    let ctx = |what: &str| format!("scenario {:?}: {what}", s.name);
    let mut phases = None;
    let mut report = None;
    let mut conserved_drift = None;
    let mut equivalence = Vec::new();
    let mut multipliers = Vec::new();
    let mut parameter_loop = None;
    let (traj, omega_max) = match &s.model {
        ModelSpec::Gho { schedule, q, p } => {
            let w = path_omega_max(schedule).with_context(|| ctx("frequency bound"))?;
            let opts = options(s, w);
            let traj = integrate(&GhoSystem(schedule), &[*q, *p], s.t_span, &opts).with_context(|| ctx("integration"))?;
            if s.wants(Analysis::Phases) {
                phases = Some(decompose(&traj, schedule).with_context(|| ctx("phases"))?);
            }
            if s.wants(Analysis::Invariant) {
                report = Some(adiabatic_report(&traj, schedule).with_context(|| ctx("invariant"))?);
            }
            if s.wants(Analysis::Equivalence) {
                equivalence.push(complex_equivalence(schedule, &traj, &opts).with_context(|| ctx("equivalence"))?);
            }
            parameter_loop = Some(path_loop(schedule)?);
            (traj, w)
        }
        ModelSpec::Pendulum { params, phi, p } => {
            let path = PendulumGhoPath(params);
            let w = path_omega_max(&path).with_context(|| ctx("frequency bound"))?;
            let opts = options(s, w);
            let traj =
                integrate(&PendulumSystem(params), &[*phi, *p], s.t_span, &opts).with_context(|| ctx("integration"))?;
            if s.wants(Analysis::Phases) {
                phases = Some(decompose_path(&traj, &path).with_context(|| ctx("phases"))?);
            }
            if s.wants(Analysis::Invariant) {
                report = Some(adiabatic_report(&traj, &path).with_context(|| ctx("invariant"))?);
            }
            if s.wants(Analysis::Equivalence) {
                equivalence.push(pendulum_dho_equivalence(params, &traj, &opts).with_context(|| ctx("equivalence"))?);
            }
            parameter_loop = Some(path_loop(&path)?);
            (traj, w)
        }
        ModelSpec::Dho {
            params,
            constant,
            q,
            qdot,
        } => {
            let w = dho_omega_max(params, s.t_span).with_context(|| ctx("frequency bound"))?;
            let opts = options(s, w);
            let traj =
                integrate(&DhoSystem(params), &[*q, *qdot, 0.0], s.t_span, &opts).with_context(|| ctx("integration"))?;
            if s.wants(Analysis::Equivalence) {
                equivalence.push(ck_equivalence(params, *q, *qdot, &opts).with_context(|| ctx("equivalence"))?);
            }
            if let (true, Some((m0, lambda, omega))) = (s.wants(Analysis::Multipliers), constant) {
                let spec = VariationalSpec::catalog("caldirola-kanai")?.with_params(ParameterBag {
                    m0: *m0,
                    lambda: *lambda,
                    big_omega: *omega,
                    ..ParameterBag::default()
                });
                multipliers = multiplier_checks(&spec, &traj).with_context(|| ctx("multipliers"))?;
            }
            (traj, w)
        }
        ModelSpec::QuadraticFriction { m, b, omega0, q, qdot } => {
            let w = 2.0 * omega0.abs().max(1.0);
            let sys = QuadraticFrictionSystem::new(*b, *omega0).with_context(|| ctx("model"))?;
            let traj = integrate(&sys, &[*q, *qdot], s.t_span, &options(s, w)).with_context(|| ctx("integration"))?;
            if s.wants(Analysis::Invariant) {
                conserved_drift = Some(conserved("energy", &traj, |y| {
                    quadratic_friction_energy(y[0], y[1], *m, *b, *omega0)
                }));
            }
            if s.wants(Analysis::Multipliers) {
                let spec = VariationalSpec::catalog("quadratic-friction")?.with_params(ParameterBag {
                    m: *m,
                    b: *b,
                    omega0: *omega0,
                    ..ParameterBag::default()
                });
                multipliers = multiplier_checks(&spec, &traj).with_context(|| ctx("multipliers"))?;
            }
            (traj, w)
        }
        ModelSpec::Hirota { phi, phidot } => {
            let w = 2.0 * hirota_invariant(*phi, *phidot);
            let traj =
                integrate(&HirotaSystem, &[*phi, *phidot], s.t_span, &options(s, w)).with_context(|| ctx("integration"))?;
            if s.wants(Analysis::Invariant) {
                conserved_drift = Some(conserved("(1 + phidot^2) / cos^2 phi", &traj, |y| hirota_invariant(y[0], y[1])));
            }
            if s.wants(Analysis::Multipliers) {
                let spec = VariationalSpec::catalog("hirota")?;
                multipliers = multiplier_checks(&spec, &traj).with_context(|| ctx("multipliers"))?;
            }
            (traj, w)
        }
    };
    let plots = if s.output.plots {
        plots(&traj, report.as_ref(), parameter_loop)
    } else {
        Vec::new()
    };
    let summary = RunSummary {
        schema: SCHEMA_VERSION,
        version: env!("CARGO_PKG_VERSION"),
        scenario: s.name.clone(),
        scenario_hash: s.hash(),
        model: s.model.id(),
        tolerance: s.tolerance,
        integration: IntegrationStats {
            t0: s.t_span.0,
            t1: s.t_span.1,
            samples: traj.len(),
            omega_max,
            accepted_steps: traj.meta.accepted_steps,
            rejected_steps: traj.meta.rejected_steps,
        },
        phases,
        adiabatic: report.as_ref().map(AdiabaticReport::digest),
        conserved: conserved_drift,
        equivalence,
        multipliers,
        wall_time: start.elapsed().as_secs_f64(),
    };
    Ok(RunOutput {
        summary,
        trajectory: traj,
        plots,
    })
}

#[derive(Serialize)]
struct Metadata<'a> {
    scenario_hash: &'a str,
    wall_time_seconds: f64,
}

/// Writes `trajectory.csv`, `summary.json`, `metadata.json` and any plots into `dir`.
pub fn write_artifacts(out: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let csv = fs::File::create(dir.join("trajectory.csv"))?;
    out.trajectory.write_csv(BufWriter::new(csv))?;
    let mut summary = serde_json::to_string_pretty(&out.summary)?;
    summary.push('\n');
    fs::write(dir.join("summary.json"), summary)?;
    let meta = Metadata {
        scenario_hash: &out.summary.scenario_hash,
        wall_time_seconds: out.summary.wall_time,
    };
    fs::write(dir.join("metadata.json"), serde_json::to_string_pretty(&meta)? + "\n")?;
    for (name, svg) in &out.plots {
        fs::write(dir.join(name), svg)?;
    }
    Ok(())
}
