//! Cubic spline interpolation with not-a-knot end conditions.

use crate::error::{Error, Result};

/// A C² piecewise cubic through `(x_i, y_i)` stored in Hermite form (values and slopes).
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl CubicSpline {
    /// Builds the not-a-knot spline. Needs at least four strictly increasing knots.
    pub fn not_a_knot(x: &[f64], y: &[f64]) -> Result<Self> {
        let n = x.len();
        if n != y.len() {
            return Err(Error::InvalidArgument(format!(
                "spline abscissae ({n}) and ordinates ({}) differ in length",
                y.len()
            )));
        }
        if n < 4 {
            return Err(Error::InvalidArgument(format!(
                "not-a-knot spline needs at least 4 knots, got {n}"
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "spline knots must be finite and strictly increasing".into(),
            ));
        }

        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Tridiagonal system for the knot slopes.
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];

        let x31 = x[2] - x[0];
        diag[0] = h[1];
        upper[0] = x31;
        rhs[0] = ((h[0] + 2.0 * x31) * h[1] * del[0] + h[0] * h[0] * del[1]) / x31;

        for i in 1..n - 1 {
            lower[i] = h[i];
            diag[i] = 2.0 * (h[i] + h[i - 1]);
            upper[i] = h[i - 1];
            rhs[i] = 3.0 * (h[i] * del[i - 1] + h[i - 1] * del[i]);
        }

        let xn = x[n - 1] - x[n - 3];
        lower[n - 1] = xn;
        diag[n - 1] = h[n - 3];
        rhs[n - 1] = (h[n - 2] * h[n - 2] * del[n - 3] + (2.0 * xn + h[n - 2]) * h[n - 3] * del[n - 2]) / xn;

        let slopes = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            slopes,
        })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Value and first derivative at `t`. Returns `None` outside the knot range.
    pub fn eval(&self, t: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.domain();
        if !(t >= lo && t <= hi) {
            return None;
        }
        let i = self.x.partition_point(|&k| k <= t).clamp(1, self.x.len() - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);

        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let value = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;

        let d00 = 6.0 * s2 - 6.0 * s;
        let d10 = 3.0 * s2 - 4.0 * s + 1.0;
        let d01 = -6.0 * s2 + 6.0 * s;
        let d11 = 3.0 * s2 - 2.0 * s;
        let deriv = (d00 * y0 + d10 * m0 + d01 * y1 + d11 * m1) / h;
        Some((value, deriv))
    }
}

fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}
