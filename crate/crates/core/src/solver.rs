//! Conservative time stepping: the monotone three-point scheme and the
//! ENO + SSP-RK3 extension.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::eno::reconstruct_extended;
use crate::error::{Error, Result};
use crate::flux::{cfl_timestep, NumericalFlux};
use crate::grid::{Grid, GridFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Monotone1,
    Eno2,
    Eno3,
}

impl Order {
    /// Polynomial degree plus one; also the ghost width used by ENO.
    pub fn accuracy(self) -> usize {
        match self {
            Order::Monotone1 => 1,
            Order::Eno2 => 2,
            Order::Eno3 => 3,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Order::Monotone1 => "1",
            Order::Eno2 => "eno2",
            Order::Eno3 => "eno3",
        })
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "monotone" | "first" => Ok(Order::Monotone1),
            "2" | "eno2" => Ok(Order::Eno2),
            "3" | "eno3" => Ok(Order::Eno3),
            other => Err(Error::Config(format!(
                "unknown order '{other}' (expected 1, 2 or 3)"
            ))),
        }
    }
}

/// Cell source `h_i^n` added as `dt * h_i^n` in each step.
pub trait Source: Send + Sync {
    fn cell_values(&self, grid: &Grid, step: usize, t: f64, out: &mut [f64]);
}

/// A source `h(x, t)` sampled at cell centers.
pub struct PointSource<F>(pub F);

impl<F> Source for PointSource<F>
where
    F: Fn(f64, f64) -> f64 + Send + Sync,
{
    fn cell_values(&self, grid: &Grid, _step: usize, t: f64, out: &mut [f64]) {
        for (i, h) in out.iter_mut().enumerate() {
            *h = (self.0)(grid.center(i), t);
        }
    }
}

/// Precomputed source values, one row per time step; steps past the last row
/// have zero source.
pub struct TableSource {
    rows: Vec<Vec<f64>>,
}

impl TableSource {
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        Self { rows }
    }
}

impl Source for TableSource {
    fn cell_values(&self, _grid: &Grid, step: usize, _t: f64, out: &mut [f64]) {
        match self.rows.get(step) {
            Some(row) => out.copy_from_slice(row),
            None => out.fill(0.0),
        }
    }
}

#[derive(Clone)]
pub struct SchemeConfig {
    pub nf: NumericalFlux,
    pub order: Order,
    pub cfl_number: f64,
    pub source: Option<Arc<dyn Source>>,
}

impl fmt::Debug for SchemeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchemeConfig")
            .field("nf", &self.nf)
            .field("order", &self.order)
            .field("cfl_number", &self.cfl_number)
            .field("source", &self.source.is_some())
            .finish()
    }
}

impl SchemeConfig {
    pub fn new(nf: NumericalFlux, order: Order, cfl_number: f64) -> Self {
        Self {
            nf,
            order,
            cfl_number,
            source: None,
        }
    }

    pub fn with_source(mut self, source: Arc<dyn Source>) -> Self {
        self.source = Some(source);
        self
    }
}

/// Position in time of a step, used to evaluate sources.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepClock {
    pub index: usize,
    pub time: f64,
}

const CFL_LIMIT: f64 = 1.0;

fn check_cfl(nf: &NumericalFlux, u: &GridFunction, dt: f64) -> Result<()> {
    if !(dt >= 0.0 && dt.is_finite()) {
        return Err(Error::Config(format!("invalid time step {dt}")));
    }
    let (lo, hi) = u.range();
    let courant = dt / u.grid().dx() * nf.flux().max_speed(lo, hi);
    if courant > CFL_LIMIT * (1.0 + 1e-12) {
        return Err(Error::CflViolation {
            courant,
            limit: CFL_LIMIT,
        });
    }
    Ok(())
}

/// Flux differences `-(F_{i+1/2} - F_{i-1/2}) / dx` for the monotone scheme.
fn monotone_rhs(nf: &NumericalFlux, ext: &[f64], dx: f64, out: &mut [f64]) {
    let mut f_left = nf.eval_unchecked(ext[0], ext[1]);
    for (i, o) in out.iter_mut().enumerate() {
        let f_right = nf.eval_unchecked(ext[i + 1], ext[i + 2]);
        *o = -(f_right - f_left) / dx;
        f_left = f_right;
    }
}

struct Workspace {
    ext: Vec<f64>,
    rhs: Vec<f64>,
    source: Vec<f64>,
    iface: Vec<(f64, f64)>,
}

impl Workspace {
    fn new(n: usize, width: usize) -> Self {
        Self {
            ext: vec![0.0; n + 2 * width],
            rhs: vec![0.0; n],
            source: vec![0.0; n],
            iface: Vec::with_capacity(n + 1),
        }
    }
}

fn fill_ext(ext: &mut [f64], values: &[f64], far_left: f64, far_right: f64, width: usize) {
    ext[..width].fill(far_left);
    ext[width..width + values.len()].copy_from_slice(values);
    ext[width + values.len()..].fill(far_right);
}

/// Spatial operator `L(u)` plus the source, written into `ws.rhs`.
fn spatial_operator(
    cfg: &SchemeConfig,
    grid: &Grid,
    values: &[f64],
    far: (f64, f64),
    clock: StepClock,
    ws: &mut Workspace,
) {
    let width = cfg.order.accuracy();
    fill_ext(&mut ws.ext, values, far.0, far.1, width);
    let dx = grid.dx();
    match cfg.order {
        Order::Monotone1 => monotone_rhs(&cfg.nf, &ws.ext, dx, &mut ws.rhs),
        Order::Eno2 | Order::Eno3 => {
            reconstruct_extended(&ws.ext, width, &mut ws.iface);
            let (a, b) = ws.iface[0];
            let mut f_left = cfg.nf.eval_unchecked(a, b);
            for i in 0..values.len() {
                let (a, b) = ws.iface[i + 1];
                let f_right = cfg.nf.eval_unchecked(a, b);
                ws.rhs[i] = -(f_right - f_left) / dx;
                f_left = f_right;
            }
        }
    }
    if let Some(src) = &cfg.source {
        src.cell_values(grid, clock.index, clock.time, &mut ws.source);
        for (r, h) in ws.rhs.iter_mut().zip(&ws.source) {
            *r += h;
        }
    }
}

fn advance_one(
    u: &GridFunction,
    cfg: &SchemeConfig,
    dt: f64,
    clock: StepClock,
    ws: &mut Workspace,
) -> Vec<f64> {
    let grid = *u.grid();
    let far = (u.far_left(), u.far_right());
    let u0 = u.values();
    spatial_operator(cfg, &grid, u0, far, clock, ws);
    let u1: Vec<f64> = u0.iter().zip(&ws.rhs).map(|(u, l)| u + dt * l).collect();
    if cfg.order == Order::Monotone1 {
        return u1;
    }
    spatial_operator(cfg, &grid, &u1, far, clock, ws);
    let u2: Vec<f64> = u0
        .iter()
        .zip(&u1)
        .zip(&ws.rhs)
        .map(|((u, v), l)| 0.75 * u + 0.25 * (v + dt * l))
        .collect();
    spatial_operator(cfg, &grid, &u2, far, clock, ws);
    u0.iter()
        .zip(&u2)
        .zip(&ws.rhs)
        .map(|((u, v), l)| u / 3.0 + 2.0 / 3.0 * (v + dt * l))
        .collect()
}

fn checked_step(
    u: &GridFunction,
    cfg: &SchemeConfig,
    dt: f64,
    clock: StepClock,
    expected: Order,
) -> Result<GridFunction> {
    if (cfg.order == Order::Monotone1) != (expected == Order::Monotone1) {
        return Err(Error::Config(format!(
            "scheme order {} does not match the requested step",
            cfg.order
        )));
    }
    cfg.nf.ensure_ready()?;
    check_cfl(&cfg.nf, u, dt)?;
    let mut ws = Workspace::new(u.values().len(), cfg.order.accuracy());
    Ok(u.with_values(advance_one(u, cfg, dt, clock, &mut ws)))
}

/// One step of the monotone scheme with the source evaluated at `clock`.
pub fn step_monotone_at(
    u: &GridFunction,
    cfg: &SchemeConfig,
    dt: f64,
    clock: StepClock,
) -> Result<GridFunction> {
    checked_step(u, cfg, dt, clock, Order::Monotone1)
}

/// One step of the monotone scheme.
pub fn step_monotone(u: &GridFunction, cfg: &SchemeConfig, dt: f64) -> Result<GridFunction> {
    step_monotone_at(u, cfg, dt, StepClock::default())
}

/// One SSP-RK3 step with ENO interface values.
pub fn step_eno_rk3(u: &GridFunction, cfg: &SchemeConfig, dt: f64) -> Result<GridFunction> {
    checked_step(u, cfg, dt, StepClock::default(), Order::Eno2)
}

/// Uniform time step for `cfg` and data `u0`, and the flux with its mesh
/// ratio filled in where the scheme needs it.
pub fn prepare(u0: &GridFunction, cfg: &SchemeConfig) -> Result<(f64, SchemeConfig)> {
    let (lo, hi) = u0.range();
    let dt = cfl_timestep(&cfg.nf, u0.grid(), lo, hi, cfg.cfl_number)?;
    let mut cfg = cfg.clone();
    if cfg.nf.lambda().is_none() {
        cfg.nf = cfg.nf.clone().with_lambda(dt / u0.grid().dx());
    }
    Ok((dt, cfg))
}

/// Time levels `0, dt, 2 dt, ..` up to `t_final`, the last step shortened to
/// land exactly on `t_final`.
pub fn time_levels(dt: f64, t_final: f64) -> Vec<f64> {
    let mut levels = vec![0.0];
    if t_final <= 0.0 {
        return levels;
    }
    let full = (t_final / dt * (1.0 + 1e-12)).floor() as usize;
    levels.extend((1..=full).map(|k| (k as f64 * dt).min(t_final)));
    let last = *levels.last().unwrap();
    if t_final - last > 1e-12 * dt {
        levels.push(t_final);
    } else {
        *levels.last_mut().unwrap() = t_final;
    }
    levels
}

/// Advances `u0` to `t_final`, calling `observer` after every step with the
/// step count, the time and the new state.
pub fn run_with(
    u0: &GridFunction,
    cfg: &SchemeConfig,
    t_final: f64,
    mut observer: impl FnMut(usize, f64, &GridFunction),
) -> Result<(GridFunction, usize)> {
    if !(t_final >= 0.0) {
        return Err(Error::Config(format!("negative final time {t_final}")));
    }
    if t_final == 0.0 {
        return Ok((u0.clone(), 0));
    }
    let (dt, cfg) = prepare(u0, cfg)?;
    check_cfl(&cfg.nf, u0, dt)?;
    let levels = time_levels(dt, t_final);
    let mut ws = Workspace::new(u0.values().len(), cfg.order.accuracy());
    let mut u = u0.clone();
    for (k, w) in levels.windows(2).enumerate() {
        let clock = StepClock {
            index: k,
            time: w[0],
        };
        u = u.with_values(advance_one(&u, &cfg, w[1] - w[0], clock, &mut ws));
        observer(k + 1, w[1], &u);
    }
    Ok((u, levels.len() - 1))
}

/// Advances `u0` to `t_final`; returns the final state and the step count.
pub fn run(u0: &GridFunction, cfg: &SchemeConfig, t_final: f64) -> Result<(GridFunction, usize)> {
    run_with(u0, cfg, t_final, |_, _, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{ConvexFlux, Scheme};
    use crate::grid::project;
    use crate::step::StepFunction;

    fn cfg(scheme: Scheme, order: Order) -> SchemeConfig {
        SchemeConfig::new(
            NumericalFlux::new(scheme, ConvexFlux::burgers()),
            order,
            0.3,
        )
    }

    fn numinitialcond(n: usize) -> GridFunction {
        let u0 = StepFunction::new(vec![0.25, 0.5], vec![2.0, 1.0, 0.0]).unwrap();
        project(&u0, &Grid::over(0.0, 1.0, n).unwrap()).unwrap()
    }

    #[test]
    fn constant_data_is_stationary() {
        let g = Grid::new(0.0, 0.1, 10).unwrap();
        let u = GridFunction::constant(g, 0.7);
        for scheme in Scheme::ALL {
            for order in [Order::Monotone1, Order::Eno2, Order::Eno3] {
                let (v, _) = run(&u, &cfg(scheme, order), 0.2).unwrap();
                for &x in v.values() {
                    assert!((x - 0.7).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn stationary_godunov_shock() {
        let h = StepFunction::heaviside(0.5, 1.0, -1.0).unwrap();
        let u = project(&h, &Grid::over(0.0, 1.0, 16).unwrap()).unwrap();
        let v = step_monotone(&u, &cfg(Scheme::Godunov, Order::Monotone1), 0.3 / 16.0).unwrap();
        assert_eq!(u, v);
    }

    #[test]
    fn one_step_conserves_mass() {
        let u = numinitialcond(32);
        let dt = 0.3 / 32.0 / 2.0;
        for scheme in Scheme::ALL {
            let mut c = cfg(scheme, Order::Monotone1);
            c.nf = c.nf.with_lambda(dt * 32.0);
            let v = step_monotone(&u, &c, dt).unwrap();
            // the flux through the window edges is f(2) - f(0) = 2
            assert!((v.mass() - u.mass() - 2.0 * dt).abs() < 1e-14, "{scheme}");
        }
    }

    #[test]
    fn cfl_violation_is_reported() {
        let u = numinitialcond(32);
        let c = cfg(Scheme::Godunov, Order::Monotone1);
        assert!(matches!(
            step_monotone(&u, &c, 1.0 / 32.0),
            Err(Error::CflViolation { .. })
        ));
        assert!(matches!(
            step_monotone(&u, &cfg(Scheme::LaxFriedrichs, Order::Monotone1), 0.001),
            Err(Error::MissingLambda)
        ));
    }

    #[test]
    fn landing_on_final_time() {
        let levels = time_levels(0.3, 1.0);
        assert_eq!(levels.len(), 5);
        assert_eq!(*levels.last().unwrap(), 1.0);
        let levels = time_levels(0.25, 1.0);
        assert_eq!(levels, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let u = numinitialcond(16);
        let (v, steps) = run(&u, &cfg(Scheme::Godunov, Order::Monotone1), 0.0).unwrap();
        assert_eq!((v, steps), (u, 0));
    }

    #[test]
    fn source_adds_dt_h() {
        let g = Grid::over(0.0, 1.0, 8).unwrap();
        let u = GridFunction::constant(g, 1.0);
        let c = cfg(Scheme::Godunov, Order::Monotone1)
            .with_source(Arc::new(PointSource(|x: f64, _t: f64| x)));
        let dt = 0.01;
        let v = step_monotone(&u, &c, dt).unwrap();
        let expected: f64 = (0..8).map(|i| g.center(i)).sum::<f64>() * dt * g.dx();
        assert!((v.mass() - u.mass() - expected).abs() < 1e-15);
    }

    #[test]
    fn eno_runs_conserve_and_stay_bounded() {
        let u = numinitialcond(64);
        for order in [Order::Eno2, Order::Eno3] {
            let (v, _) = run(&u, &cfg(Scheme::Godunov, order), 0.15).unwrap();
            assert!((v.mass() - u.mass() - 2.0 * 0.15).abs() < 1e-12);
            let (lo, hi) = v.range();
            assert!(lo > -0.05 && hi < 2.05);
        }
    }
}
