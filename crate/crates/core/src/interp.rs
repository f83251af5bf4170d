//! Natural cubic splines with zero extension outside the knot range.
//!
//! Local interpolation error is `O(h⁴)` for smooth data.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Natural cubic spline through complex samples.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    knots: Knots,
    values: Vec<Complex64>,
    /// Second derivatives at the knots.
    second: Vec<Complex64>,
}

#[derive(Debug, Clone)]
enum Knots {
    Uniform { start: f64, step: f64, len: usize },
    Irregular(Vec<f64>),
}

impl Knots {
    fn len(&self) -> usize {
        match self {
            Knots::Uniform { len, .. } => *len,
            Knots::Irregular(t) => t.len(),
        }
    }

    fn at(&self, i: usize) -> f64 {
        match self {
            Knots::Uniform { start, step, .. } => start + i as f64 * step,
            Knots::Irregular(t) => t[i],
        }
    }

    /// Interval index `i` with `t_i ≤ t ≤ t_{i+1}`, or `None` outside.
    fn locate(&self, t: f64) -> Option<usize> {
        let n = self.len();
        let (first, last) = (self.at(0), self.at(n - 1));
        if !(t >= first && t <= last) {
            return None;
        }
        let i = match self {
            Knots::Uniform { start, step, .. } => ((t - start) / step).floor() as usize,
            Knots::Irregular(k) => k.partition_point(|&v| v <= t).saturating_sub(1),
        };
        Some(i.min(n - 2))
    }
}

impl CubicSpline {
    /// Spline on the uniform knots `start + i·step`, `i = 0..values.len()`.
    pub fn uniform(start: f64, step: f64, values: Vec<Complex64>) -> Result<Self> {
        if values.len() < 2 || !(step > 0.0) {
            return Err(Error::InvalidParameter("spline needs ≥ 2 knots and a positive step".into()));
        }
        let knots = Knots::Uniform { start, step, len: values.len() };
        Ok(Self::build(knots, values))
    }

    /// Spline on strictly increasing knots.
    pub fn irregular(t: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if t.len() != values.len() || t.len() < 2 {
            return Err(Error::InvalidParameter("spline needs ≥ 2 knots with matching values".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("spline knots must be finite and strictly increasing".into()));
        }
        Ok(Self::build(Knots::Irregular(t), values))
    }

    fn build(knots: Knots, values: Vec<Complex64>) -> Self {
        let n = values.len();
        let mut second = vec![Complex64::new(0.0, 0.0); n];
        if n > 2 {
            // Thomas algorithm on the interior equations
            // h_{i-1} M_{i-1} + 2(h_{i-1}+h_i) M_i + h_i M_{i+1} = 6(Δ_i − Δ_{i-1}).
            let h: Vec<f64> = (0..n - 1).map(|i| knots.at(i + 1) - knots.at(i)).collect();
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut rhs = vec![Complex64::new(0.0, 0.0); m];
            for k in 0..m {
                let i = k + 1;
                diag[k] = 2.0 * (h[i - 1] + h[i]);
                rhs[k] = ((values[i + 1] - values[i]) / h[i] - (values[i] - values[i - 1]) / h[i - 1]) * 6.0;
            }
            for k in 1..m {
                let w = h[k] / diag[k - 1];
                diag[k] -= w * h[k];
                let prev = rhs[k - 1];
                rhs[k] -= prev * w;
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for k in (0..m - 1).rev() {
                second[k + 1] = (rhs[k] - second[k + 2] * h[k + 1]) / diag[k];
            }
        }
        Self { knots, values, second }
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let Some(i) = self.knots.locate(t) else {
            return Complex64::new(0.0, 0.0);
        };
        let (t0, t1) = (self.knots.at(i), self.knots.at(i + 1));
        let h = t1 - t0;
        let a = (t1 - t) / h;
        let b = (t - t0) / h;
        let h2 = h * h / 6.0;
        self.values[i] * a
            + self.values[i + 1] * b
            + (self.second[i] * (a * a * a - a) + self.second[i + 1] * (b * b * b - b)) * h2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_knots_and_zero_extension() {
        let v: Vec<Complex64> = (0..9).map(|i| Complex64::new((i as f64).sin(), i as f64)).collect();
        let s = CubicSpline::uniform(-1.0, 0.25, v.clone()).unwrap();
        for (i, vi) in v.iter().enumerate() {
            assert!((s.eval(-1.0 + 0.25 * i as f64) - vi).norm() < 1e-12);
        }
        assert_eq!(s.eval(-1.01), Complex64::new(0.0, 0.0));
        assert_eq!(s.eval(1.01), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn fourth_order_accuracy_on_smooth_data() {
        let f = |t: f64| (-std::f64::consts::PI * t * t).exp();
        let err = |h: f64| {
            let n = (16.0 / h) as usize + 1;
            let v = (0..n).map(|i| Complex64::new(f(-8.0 + i as f64 * h), 0.0)).collect();
            let s = CubicSpline::uniform(-8.0, h, v).unwrap();
            (0..200).map(|k| -2.0 + 0.0173 * k as f64).map(|t| (s.eval(t).re - f(t)).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(1.0 / 16.0), err(1.0 / 32.0));
        assert!(e1 / e2 > 12.0, "ratio {}", e1 / e2);
        assert!(err(1.0 / 64.0) < 5e-7);
    }

    #[test]
    fn irregular_matches_uniform() {
        let v: Vec<Complex64> = (0..7).map(|i| Complex64::new((0.3 * i as f64).cos(), 0.0)).collect();
        let t: Vec<f64> = (0..7).map(|i| 0.5 * i as f64).collect();
        let a = CubicSpline::uniform(0.0, 0.5, v.clone()).unwrap();
        let b = CubicSpline::irregular(t, v).unwrap();
        for k in 0..30 {
            let x = 0.1 * k as f64;
            assert!((a.eval(x) - b.eval(x)).norm() < 1e-12);
        }
        assert!(CubicSpline::irregular(vec![0.0, 0.0], vec![Complex64::new(1.0, 0.0); 2]).is_err());
    }
}
