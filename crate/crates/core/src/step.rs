//! Piecewise-constant functions on the real line.

use crate::error::{Error, Result};

/// A right-continuous piecewise-constant function with finitely many jumps.
///
/// `values[0]` holds on `(-inf, breakpoints[0])`, `values[k]` on
/// `[breakpoints[k-1], breakpoints[k])` and the last value on
/// `[breakpoints[K-1], inf)`. Adjacent plateaus with equal values are merged
/// at construction, so every stored breakpoint is a genuine jump.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidStepFunction(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if let Some(bad) = breakpoints.iter().chain(&values).find(|v| !v.is_finite()) {
            return Err(Error::InvalidStepFunction(format!(
                "non-finite entry {bad}"
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStepFunction(
                "breakpoints must be strictly increasing".into(),
            ));
        }

        let mut bps = Vec::with_capacity(breakpoints.len());
        let mut vals = Vec::with_capacity(values.len());
        vals.push(values[0]);
        for (x, &v) in breakpoints.into_iter().zip(&values[1..]) {
            if v != *vals.last().unwrap() {
                bps.push(x);
                vals.push(v);
            }
        }
        Ok(Self {
            breakpoints: bps,
            values: vals,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            breakpoints: Vec::new(),
            values: vec![value],
        }
    }

    /// Single jump from `left` to `right` at `position`.
    pub fn heaviside(position: f64, left: f64, right: f64) -> Result<Self> {
        Self::new(vec![position], vec![left, right])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn num_jumps(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn left_state(&self) -> f64 {
        self.values[0]
    }

    pub fn right_state(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.breakpoints.partition_point(|&b| b <= x);
        self.values[k]
    }

    pub fn tv(&self) -> f64 {
        self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
    }

    /// Strictly decreasing plateau values (constants count as decreasing).
    pub fn is_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] > w[1])
    }

    /// Exact integral over `[a, b]`, `a <= b`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        debug_assert!(a <= b);
        let mut k = self.breakpoints.partition_point(|&x| x <= a);
        let mut lo = a;
        let mut acc = 0.0;
        while k < self.breakpoints.len() && self.breakpoints[k] < b {
            acc += self.values[k] * (self.breakpoints[k] - lo);
            lo = self.breakpoints[k];
            k += 1;
        }
        acc + self.values[k] * (b - lo)
    }

    pub fn translate(&self, shift: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().map(|x| x + shift).collect(),
            values: self.values.clone(),
        }
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_equal_plateaus() {
        let u = StepFunction::new(vec![0.0, 1.0, 2.0], vec![3.0, 3.0, 1.0, 1.0]).unwrap();
        assert_eq!(u.breakpoints(), &[1.0]);
        assert_eq!(u.values(), &[3.0, 1.0]);
    }

    #[test]
    fn rejects_unsorted_breakpoints() {
        assert!(StepFunction::new(vec![1.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
        assert!(StepFunction::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn eval_is_right_continuous() {
        let u = StepFunction::new(vec![0.25, 0.5], vec![2.0, 1.0, 0.0]).unwrap();
        assert_eq!(u.eval(0.2499), 2.0);
        assert_eq!(u.eval(0.25), 1.0);
        assert_eq!(u.eval(0.5), 0.0);
    }

    #[test]
    fn integral_splits_at_breakpoints() {
        let u = StepFunction::new(vec![0.25, 0.5], vec![2.0, 1.0, 0.0]).unwrap();
        assert!((u.integral(0.0, 1.0) - 0.75).abs() < 1e-15);
        assert!((u.integral(0.3, 0.4) - 0.1).abs() < 1e-15);
        assert!((u.integral(-1.0, 0.0) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn total_variation() {
        let u = StepFunction::new(vec![0.25, 0.5], vec![2.0, 1.0, 0.0]).unwrap();
        assert_eq!(u.tv(), 2.0);
        assert_eq!(StepFunction::constant(4.0).tv(), 0.0);
    }
}
