use std::io::{self, Write};

use serde::{Deserialize, Serialize};

/// A point `(Q, P)` of the canonical phase plane at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpaceState {
    pub q: f64,
    pub p: f64,
    pub t: f64,
}

impl PhaseSpaceState {
    pub const fn new(q: f64, p: f64, t: f64) -> Self {
        Self { q, p, t }
    }

    pub fn is_finite(&self) -> bool {
        self.q.is_finite() && self.p.is_finite() && self.t.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub model: String,
    pub schedule: String,
    pub tol: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Time-ordered samples of a flat state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    labels: Vec<String>,
    times: Vec<f64>,
    data: Vec<f64>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn new(labels: Vec<String>, meta: TrajectoryMeta) -> Self {
        Self {
            labels,
            times: Vec::new(),
            data: Vec::new(),
            meta,
        }
    }

    pub(crate) fn push(&mut self, t: f64, y: &[f64]) {
        debug_assert_eq!(y.len(), self.labels.len());
        self.times.push(t);
        self.data.extend_from_slice(y);
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn state(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.data[i * d..(i + 1) * d]
    }

    /// Component `c` across all samples.
    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.state(i)[c]).collect()
    }

    /// The first two components read as a canonical pair.
    pub fn phase_state(&self, i: usize) -> PhaseSpaceState {
        let s = self.state(i);
        PhaseSpaceState::new(s[0], s[1], self.times[i])
    }

    pub fn phase_states(&self) -> impl Iterator<Item = PhaseSpaceState> + '_ {
        (0..self.len()).map(|i| self.phase_state(i))
    }

    pub fn last_state(&self) -> Option<&[f64]> {
        (!self.is_empty()).then(|| self.state(self.len() - 1))
    }

    /// CSV with a `t` column followed by the state labels.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "t")?;
        for l in &self.labels {
            write!(w, ",{l}")?;
        }
        writeln!(w)?;
        for i in 0..self.len() {
            write!(w, "{}", format_number(self.times[i]))?;
            for v in self.state(i) {
                write!(w, ",{}", format_number(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Shortest representation that round-trips (never more than 17 significant digits).
pub fn format_number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}
