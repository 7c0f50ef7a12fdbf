//! Runs one scenario across several slowness values.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hannay_core::dynamics::format_number;
use rayon::prelude::*;

use crate::run::execute;
use crate::scenario::{Analysis, ModelSpec, Scenario};
use crate::svg::{Plot, Series};

pub const SWEEP_COLUMNS: [&str; 7] = [
    "epsilon",
    "theta_total",
    "theta_d",
    "theta_g_line",
    "residual",
    "invariant_drift",
    "error",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub theta_total: f64,
    pub theta_d: f64,
    pub theta_g_line: f64,
    pub residual: f64,
    pub invariant_drift: f64,
}

/// One entry per requested epsilon, in input order.
pub type SweepTable = Vec<(f64, std::result::Result<SweepRow, String>)>;

fn row(base: &Scenario, epsilon: f64) -> Result<SweepRow> {
    let s = base.with_epsilon(epsilon)?.with_analyses(&[Analysis::Phases])?;
    let out = execute(&s)?;
    let p = out.summary.phases.context("phase decomposition missing")?;
    Ok(SweepRow {
        epsilon,
        theta_total: p.theta_total,
        theta_d: p.theta_d,
        theta_g_line: p.theta_g_line,
        residual: p.residual,
        invariant_drift: p.invariant_drift,
    })
}

/// Runs every epsilon on a pool of `jobs` threads; a failing entry becomes an error row.
pub fn sweep(base: &Scenario, epsilons: &[f64], jobs: usize) -> Result<SweepTable> {
    if epsilons.len() < 2 {
        bail!("at least two epsilon values required");
    }
    if !matches!(base.model, ModelSpec::Gho { .. } | ModelSpec::Pendulum { .. }) {
        bail!("sweeps need a model with a phase decomposition (gho or pendulum), got {:?}", base.model.id());
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    Ok(pool.install(|| {
        epsilons
            .par_iter()
            .map(|&eps| (eps, row(base, eps).map_err(|e| format!("{e:#}"))))
            .collect()
    }))
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

pub fn to_csv(table: &SweepTable) -> String {
    let mut out = SWEEP_COLUMNS.join(",");
    out.push('\n');
    for (eps, r) in table {
        let cells = match r {
            Ok(r) => [r.theta_total, r.theta_d, r.theta_g_line, r.residual, r.invariant_drift]
                .iter()
                .map(|v| format_number(*v))
                .chain([String::new()])
                .collect::<Vec<_>>(),
            Err(e) => std::iter::repeat(String::new()).take(5).chain([csv_field(e)]).collect(),
        };
        out.push_str(&format_number(*eps));
        for c in cells {
            out.push(',');
            out.push_str(&c);
        }
        out.push('\n');
    }
    out
}

pub fn drift_plot(table: &SweepTable) -> String {
    let pts = table
        .iter()
        .filter_map(|(eps, r)| r.as_ref().ok().map(|r| (1.0 / eps, r.invariant_drift)))
        .collect();
    Plot::new("invariant drift vs 1/epsilon", "1/epsilon", "max relative drift of I")
        .log_log()
        .with_markers()
        .series(Series::new("drift", pts))
        .render()
}

pub fn write_sweep(table: &SweepTable, dir: &Path, plots: bool) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("sweep.csv"), to_csv(table))?;
    if plots {
        fs::write(dir.join("sweep.svg"), drift_plot(table))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_rows_keep_their_place() {
        let table: SweepTable = vec![
            (
                0.01,
                Ok(SweepRow {
                    epsilon: 0.01,
                    theta_total: 1.0,
                    theta_d: 0.5,
                    theta_g_line: 0.25,
                    residual: 0.25,
                    invariant_drift: 1e-3,
                }),
            ),
            (0.5, Err("time step, underflow".into())),
        ];
        let csv = to_csv(&table);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "epsilon,theta_total,theta_d,theta_g_line,residual,invariant_drift,error");
        assert_eq!(lines[1], "0.01,1,0.5,0.25,0.25,0.001,");
        assert_eq!(lines[2], "0.5,,,,,,\"time step, underflow\"");
    }
}
