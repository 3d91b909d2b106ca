//! Uniform grids, cell-average grid functions and exact projection.

use crate::error::{Error, Result};
use crate::step::StepFunction;

/// Uniform grid; cell `i` spans `[x_left + i*dx, x_left + (i+1)*dx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_left: f64,
    dx: f64,
    n_cells: usize,
}

impl Grid {
    pub fn new(x_left: f64, dx: f64, n_cells: usize) -> Result<Self> {
        if !x_left.is_finite() {
            return Err(Error::InvalidGrid(format!("x_left = {x_left}")));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidGrid(format!("dx = {dx} must be positive")));
        }
        if n_cells < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells, got {n_cells}"
            )));
        }
        Ok(Self {
            x_left,
            dx,
            n_cells,
        })
    }

    /// `n_cells` cells of equal width covering `[a, b]`.
    pub fn over(a: f64, b: f64, n_cells: usize) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidGrid(format!("empty interval [{a}, {b}]")));
        }
        Self::new(a, (b - a) / n_cells as f64, n_cells)
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.edge(self.n_cells)
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn span(&self) -> f64 {
        self.x_right() - self.x_left
    }

    /// Left edge of cell `i`; `edge(n_cells)` is the right end of the grid.
    pub fn edge(&self, i: usize) -> f64 {
        self.x_left + i as f64 * self.dx
    }

    pub fn center(&self, i: usize) -> f64 {
        self.x_left + (i as f64 + 0.5) * self.dx
    }

    /// Index of the cell containing `x`, if inside the grid.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        let s = ((x - self.x_left) / self.dx).floor();
        (s >= 0.0 && (s as usize) < self.n_cells).then_some(s as usize)
    }
}

/// Cell averages on a [`Grid`], extended by constant far states outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
    far_left: f64,
    far_right: f64,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>, far_left: f64, far_right: f64) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::InvalidGridFunction(format!(
                "{} values for {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        if !(far_left.is_finite() && far_right.is_finite()) || values.iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidGridFunction("non-finite value".into()));
        }
        Ok(Self {
            grid,
            values,
            far_left,
            far_right,
        })
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.n_cells()],
            far_left: value,
            far_right: value,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn far_left(&self) -> f64 {
        self.far_left
    }

    pub fn far_right(&self) -> f64 {
        self.far_right
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same grid and far states, new cell values.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            grid: self.grid,
            values,
            far_left: self.far_left,
            far_right: self.far_right,
        }
    }

    /// `dx * sum(values)`, the integral over the grid span.
    pub fn mass(&self) -> f64 {
        self.grid.dx() * self.values.iter().sum::<f64>()
    }

    /// Value at `x`, using the far states outside the grid.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.grid.x_left() {
            self.far_left
        } else if x >= self.grid.x_right() {
            self.far_right
        } else {
            let i =
                (((x - self.grid.x_left()) / self.grid.dx()) as usize).min(self.values.len() - 1);
            self.values[i]
        }
    }

    /// Smallest and largest value including the far states.
    pub fn range(&self) -> (f64, f64) {
        let init = (
            self.far_left.min(self.far_right),
            self.far_left.max(self.far_right),
        );
        self.values
            .iter()
            .fold(init, |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn tv(&self) -> f64 {
        let mut prev = self.far_left;
        let mut acc = 0.0;
        for &v in self.values.iter().chain(std::iter::once(&self.far_right)) {
            acc += (v - prev).abs();
            prev = v;
        }
        acc
    }

    /// `far_left >= values[0] >= ... >= values[n-1] >= far_right`.
    pub fn is_decreasing(&self) -> bool {
        let mut prev = self.far_left;
        for &v in self.values.iter().chain(std::iter::once(&self.far_right)) {
            if v > prev {
                return false;
            }
            prev = v;
        }
        true
    }

    /// Lossless conversion to a step function with jumps on cell edges.
    pub fn to_step(&self) -> StepFunction {
        let n = self.grid.n_cells();
        let breakpoints = (0..=n).map(|i| self.grid.edge(i)).collect();
        let mut values = Vec::with_capacity(n + 2);
        values.push(self.far_left);
        values.extend_from_slice(&self.values);
        values.push(self.far_right);
        StepFunction::new(breakpoints, values).expect("grid edges are increasing")
    }

    pub(crate) fn check_compatible(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::IncompatibleFunctions(format!(
                "grids differ: {:?} vs {:?}",
                self.grid, other.grid
            )));
        }
        Ok(())
    }
}

/// Exact cell averages of `u` on `grid`; far states are `u`'s extreme plateaus.
pub fn project(u: &StepFunction, grid: &Grid) -> Result<GridFunction> {
    let (a, b) = (grid.x_left(), grid.x_right());
    if let Some(&x) = u.breakpoints().iter().find(|&&x| x < a || x > b) {
        return Err(Error::ExteriorJump {
            position: x,
            left: a,
            right: b,
        });
    }
    let dx = grid.dx();
    let values = (0..grid.n_cells())
        .map(|i| u.integral(grid.edge(i), grid.edge(i + 1)) / dx)
        .collect();
    GridFunction::new(*grid, values, u.left_state(), u.right_state())
}

/// `dx * sum(u_i - v_i)` for functions on a common grid with equal far states.
pub fn total_mass_difference(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    u.check_compatible(v)?;
    if u.far_left != v.far_left || u.far_right != v.far_right {
        return Err(Error::IncompatibleFunctions(format!(
            "far states ({}, {}) vs ({}, {})",
            u.far_left, u.far_right, v.far_left, v.far_right
        )));
    }
    let sum: f64 = u.values.iter().zip(&v.values).map(|(a, b)| a - b).sum();
    Ok(u.grid.dx() * sum)
}

/// Absolute tolerance for mass comparisons on `grid` with total variation `tv`.
pub fn mass_tolerance(tv: f64, grid: &Grid) -> f64 {
    1e-12 * (tv * grid.span()).max(f64::MIN_POSITIVE)
}
