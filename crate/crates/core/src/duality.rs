//! Backward dual evolution, DLip stability and empirical W1-contractivity.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::flux::{
    check_contractivity_conditions, linearization_coefficients, ConditionViolation, NumericalFlux,
};
use crate::grid::{project, Grid, GridFunction};
use crate::metrics::{dlip_norm_of, w1, w1_discrete};
use crate::solver::{step_monotone_at, Order, SchemeConfig, Source, StepClock};
use crate::step::StepFunction;

/// Per-step flux linearization coefficients in the interface layout of
/// [`crate::flux::FluxLinearization`]: `a[n][j] = A_{j-1}^n`, `b[n][j] = B_j^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCoefficients {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub lambdas: Vec<f64>,
}

impl DualCoefficients {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, lambda: f64) -> Result<Self> {
        let lambdas = vec![lambda; a.len()];
        Self::with_lambdas(a, b, lambdas)
    }

    pub fn with_lambdas(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>, lambdas: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.len() != lambdas.len() {
            return Err(Error::IncompatibleCoefficients(format!(
                "{} A slices, {} B slices, {} ratios",
                a.len(),
                b.len(),
                lambdas.len()
            )));
        }
        if let Some(w) = a.first().map(Vec::len) {
            if a.iter().chain(&b).any(|s| s.len() != w) {
                return Err(Error::IncompatibleCoefficients(
                    "slices differ in length".into(),
                ));
            }
        }
        Ok(Self { a, b, lambdas })
    }

    /// Number of time steps covered.
    pub fn steps(&self) -> usize {
        self.a.len()
    }

    /// Coefficients of the paired runs `u` and `v`, one slice per step.
    pub fn from_trajectories(
        nf: &NumericalFlux,
        u_traj: &[GridFunction],
        v_traj: &[GridFunction],
        lambdas: &[f64],
    ) -> Result<Self> {
        if u_traj.len() != v_traj.len() || u_traj.len() != lambdas.len() + 1 {
            return Err(Error::IncompatibleCoefficients(format!(
                "{} and {} states for {} steps",
                u_traj.len(),
                v_traj.len(),
                lambdas.len()
            )));
        }
        let mut a = Vec::with_capacity(lambdas.len());
        let mut b = Vec::with_capacity(lambdas.len());
        for (u, v) in u_traj.iter().zip(v_traj).take(lambdas.len()) {
            let lin = linearization_coefficients(nf, u, v)?;
            a.push(lin.a);
            b.push(lin.b);
        }
        Self::with_lambdas(a, b, lambdas.to_vec())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualTrajectory {
    /// `phi[n]` for `n = 0..=N`.
    pub phi: Vec<GridFunction>,
    /// `dlip_history[n] = ||phi^n||_DLip`.
    pub dlip_history: Vec<f64>,
}

impl DualTrajectory {
    /// Largest increase of the DLip norm from step `n + 1` back to step `n`.
    pub fn max_dlip_increase(&self) -> f64 {
        self.dlip_history
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn constant_extension(grid: Grid, values: Vec<f64>) -> Result<GridFunction> {
    let (l, r) = (values[0], values[values.len() - 1]);
    GridFunction::new(grid, values, l, r)
}

/// Solves `phi^n_i = phi^{n+1}_i + lambda (A_i (phi_{i+1} - phi_i) + B_i (phi_i - phi_{i-1}))`
/// backward from `phi_final`, with `phi` extended constantly beyond the grid.
pub fn backward_solve(
    phi_final: &GridFunction,
    coeffs: &DualCoefficients,
) -> Result<DualTrajectory> {
    let grid = *phi_final.grid();
    let n = grid.n_cells();
    if coeffs.a.iter().any(|s| s.len() != n + 1) {
        return Err(Error::IncompatibleCoefficients(format!(
            "coefficient slices must have {} entries for {} cells",
            n + 1,
            n
        )));
    }
    let steps = coeffs.steps();
    let mut phis = vec![phi_final.values().to_vec()];
    let mut cur = phi_final.values().to_vec();
    for k in (0..steps).rev() {
        let (a, b, lambda) = (&coeffs.a[k], &coeffs.b[k], coeffs.lambdas[k]);
        let next: Vec<f64> = (0..n)
            .map(|i| {
                let right = if i + 1 < n { cur[i + 1] } else { cur[i] };
                let left = if i > 0 { cur[i - 1] } else { cur[i] };
                cur[i] + lambda * (a[i + 1] * (right - cur[i]) + b[i] * (cur[i] - left))
            })
            .collect();
        phis.push(next.clone());
        cur = next;
    }
    phis.reverse();
    let dx = grid.dx();
    let dlip_history = phis.iter().map(|p| dlip_norm_of(p, dx)).collect();
    let phi = phis
        .into_iter()
        .map(|p| constant_extension(grid, p))
        .collect::<Result<_>>()?;
    Ok(DualTrajectory { phi, dlip_history })
}

/// Result of checking the coefficient conditions on every time slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionRunReport {
    pub passed: bool,
    pub slices_checked: usize,
    /// Step index and first violation on that slice.
    pub first_failure: Option<(usize, ConditionViolation)>,
}

/// Linearizes the flux along paired trajectories and checks the coefficient
/// conditions slice by slice.
pub fn verify_coefficient_conditions(
    nf: &NumericalFlux,
    u_traj: &[GridFunction],
    v_traj: &[GridFunction],
    lambda: f64,
) -> Result<ConditionRunReport> {
    let steps = u_traj.len().min(v_traj.len()).saturating_sub(1);
    let coeffs = DualCoefficients::from_trajectories(
        nf,
        &u_traj[..=steps],
        &v_traj[..=steps],
        &vec![lambda; steps],
    )?;
    for (n, (a, b)) in coeffs.a.iter().zip(&coeffs.b).enumerate() {
        let report = check_contractivity_conditions(a, b, lambda);
        if let Some(v) = report.first_violation {
            return Ok(ConditionRunReport {
                passed: false,
                slices_checked: n + 1,
                first_failure: Some((n, v)),
            });
        }
    }
    Ok(ConditionRunReport {
        passed: true,
        slices_checked: steps,
        first_failure: None,
    })
}

/// `max_n |dx sum_i phi^n_i (u^n_i - v^n_i) - dx sum_i phi^N_i (u^N_i - v^N_i)|`
/// for `phi` from [`backward_solve`] on the runs' own coefficients.
pub fn summation_by_parts_defect(
    nf: &NumericalFlux,
    u_traj: &[GridFunction],
    v_traj: &[GridFunction],
    lambdas: &[f64],
    phi_final: &GridFunction,
) -> Result<f64> {
    let coeffs = DualCoefficients::from_trajectories(nf, u_traj, v_traj, lambdas)?;
    let dual = backward_solve(phi_final, &coeffs)?;
    let pairing = |phi: &GridFunction, u: &GridFunction, v: &GridFunction| -> f64 {
        u.grid().dx()
            * phi
                .values()
                .iter()
                .zip(u.values().iter().zip(v.values()))
                .map(|(p, (a, b))| p * (a - b))
                .sum::<f64>()
    };
    let last = lambdas.len();
    let reference = pairing(&dual.phi[last], &u_traj[last], &v_traj[last]);
    Ok((0..last)
        .map(|n| (pairing(&dual.phi[n], &u_traj[n], &v_traj[n]) - reference).abs())
        .fold(0.0, f64::max))
}

/// One row of the contractivity report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractivityRow {
    pub step: usize,
    pub time: f64,
    /// `W1(u^n, v^n)`
    pub lhs: f64,
    /// `W1D(u^0, v^0) + dt sum_{m<n} W1D(h^m, g^m)`
    pub rhs: f64,
}

impl ContractivityRow {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Debug, Clone)]
pub struct ContractivityReport {
    pub rows: Vec<ContractivityRow>,
    pub dt: f64,
    /// `TV(u^0 - v^0) * span * max|f'|`
    pub scale: f64,
    /// `max_n (lhs - rhs)`
    pub max_excess: f64,
    pub u_traj: Vec<GridFunction>,
    pub v_traj: Vec<GridFunction>,
}

impl ContractivityReport {
    /// Whether every slack is at least `-tol * scale`.
    pub fn holds(&self, tol: f64) -> bool {
        self.max_excess <= tol * self.scale
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("step,time,lhs,rhs,slack\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{:.12e},{:.12e},{:.12e},{:.12e}",
                r.step,
                r.time,
                r.lhs,
                r.rhs,
                r.slack()
            );
        }
        s
    }
}

/// Parameters of a contractivity experiment.
#[derive(Clone)]
pub struct ContractivitySetup {
    pub nf: NumericalFlux,
    pub grid: Grid,
    pub steps: usize,
    pub cfl_number: f64,
    pub h: Option<Arc<dyn Source>>,
    pub g: Option<Arc<dyn Source>>,
}

impl ContractivitySetup {
    pub fn homogeneous(nf: NumericalFlux, grid: Grid, steps: usize, cfl_number: f64) -> Self {
        Self {
            nf,
            grid,
            steps,
            cfl_number,
            h: None,
            g: None,
        }
    }

    pub fn with_sources(mut self, h: Arc<dyn Source>, g: Arc<dyn Source>) -> Self {
        self.h = Some(h);
        self.g = Some(g);
        self
    }
}

fn sample_source(src: &Option<Arc<dyn Source>>, grid: &Grid, step: usize, t: f64) -> Vec<f64> {
    let mut out = vec![0.0; grid.n_cells()];
    if let Some(s) = src {
        s.cell_values(grid, step, t, &mut out);
    }
    out
}

/// Runs the inhomogeneous schemes from `u0` and `v0` with sources `h` and
/// `g` and evaluates both sides of the W1 stability bound at every step.
pub fn contractivity_experiment(
    u0: &StepFunction,
    v0: &StepFunction,
    setup: &ContractivitySetup,
) -> Result<ContractivityReport> {
    if !u0.is_decreasing() || !v0.is_decreasing() {
        return Err(Error::NotDecreasing);
    }
    let grid = setup.grid;
    let u = project(u0, &grid)?;
    let v = project(v0, &grid)?;
    let (ul, uh) = u.range();
    let (vl, vh) = v.range();
    let (lo, hi) = (ul.min(vl), uh.max(vh));
    let speed = setup.nf.flux().max_speed(lo, hi);
    if speed == 0.0 {
        return Err(Error::NoWaveSpeed {
            u_min: lo,
            u_max: hi,
        });
    }
    let dt = setup.cfl_number * grid.dx() / speed;
    let lambda = dt / grid.dx();
    let nf = match setup.nf.lambda() {
        Some(_) => setup.nf.clone(),
        None => setup.nf.clone().with_lambda(lambda),
    };
    let base = SchemeConfig::new(nf.clone(), Order::Monotone1, setup.cfl_number);
    let cfg_u = match &setup.h {
        Some(h) => base.clone().with_source(h.clone()),
        None => base.clone(),
    };
    let cfg_v = match &setup.g {
        Some(g) => base.clone().with_source(g.clone()),
        None => base,
    };

    let diff_tv = {
        let d: Vec<f64> = u
            .values()
            .iter()
            .zip(v.values())
            .map(|(a, b)| a - b)
            .collect();
        let mut prev = 0.0;
        let mut acc = 0.0;
        for x in d.iter().chain(std::iter::once(&0.0)) {
            acc += (x - prev).abs();
            prev = *x;
        }
        acc
    };
    let scale = (diff_tv * grid.span() * speed).max(f64::MIN_POSITIVE);

    let w1d0 = w1_discrete(&u, &v)?;
    let zero = GridFunction::constant(grid, 0.0);
    let mut rows = vec![ContractivityRow {
        step: 0,
        time: 0.0,
        lhs: w1(&u, &v)?,
        rhs: w1d0,
    }];
    let mut u_traj = vec![u];
    let mut v_traj = vec![v];
    let mut source_sum = 0.0;
    for n in 0..setup.steps {
        let t = n as f64 * dt;
        let clock = StepClock { index: n, time: t };
        let un = step_monotone_at(u_traj.last().unwrap(), &cfg_u, dt, clock)?;
        let vn = step_monotone_at(v_traj.last().unwrap(), &cfg_v, dt, clock)?;
        if setup.h.is_some() || setup.g.is_some() {
            let hn = zero.with_values(sample_source(&setup.h, &grid, n, t));
            let gn = zero.with_values(sample_source(&setup.g, &grid, n, t));
            source_sum += w1_discrete(&hn, &gn)?;
        }
        rows.push(ContractivityRow {
            step: n + 1,
            time: (n + 1) as f64 * dt,
            lhs: w1(&un, &vn)?,
            rhs: w1d0 + dt * source_sum,
        });
        u_traj.push(un);
        v_traj.push(vn);
    }
    let max_excess = rows
        .iter()
        .map(|r| r.lhs - r.rhs)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ContractivityReport {
        rows,
        dt,
        scale,
        max_excess,
        u_traj,
        v_traj,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{ConvexFlux, Scheme};

    fn nf(scheme: Scheme) -> NumericalFlux {
        NumericalFlux::new(scheme, ConvexFlux::burgers())
    }

    fn shifted_pair() -> (StepFunction, StepFunction) {
        (
            StepFunction::new(vec![-0.3, 0.1], vec![2.0, 1.0, 0.0]).unwrap(),
            StepFunction::new(vec![-0.25, 0.05], vec![2.0, 1.0, 0.0]).unwrap(),
        )
    }

    #[test]
    fn zero_coefficients_are_the_identity() {
        let g = Grid::new(0.0, 0.1, 5).unwrap();
        let phi = GridFunction::new(g, vec![0.0, 0.3, -0.2, 0.1, 0.0], 0.0, 0.0).unwrap();
        let c = DualCoefficients::new(vec![vec![0.0; 6]; 4], vec![vec![0.0; 6]; 4], 0.3).unwrap();
        let dual = backward_solve(&phi, &c).unwrap();
        assert_eq!(dual.phi.len(), 5);
        assert!(dual.phi.iter().all(|p| p.values() == phi.values()));
    }

    #[test]
    fn misaligned_coefficients_are_rejected() {
        let g = Grid::new(0.0, 0.1, 5).unwrap();
        let phi = GridFunction::constant(g, 1.0);
        let c = DualCoefficients::new(vec![vec![0.0; 5]], vec![vec![0.0; 5]], 0.3).unwrap();
        assert!(matches!(
            backward_solve(&phi, &c),
            Err(Error::IncompatibleCoefficients(_))
        ));
        assert!(DualCoefficients::new(vec![vec![0.0; 5]], vec![], 0.3).is_err());
    }

    #[test]
    fn homogeneous_runs_are_contractive() {
        let (u0, v0) = shifted_pair();
        let grid = Grid::over(-1.0, 1.5, 100).unwrap();
        for scheme in Scheme::ALL {
            let setup = ContractivitySetup::homogeneous(nf(scheme), grid, 60, 0.3);
            let rep = contractivity_experiment(&u0, &v0, &setup).unwrap();
            assert!(rep.holds(1e-10), "{scheme}: {}", rep.max_excess);
            assert_eq!(rep.rows.len(), 61);
            assert!(rep.to_csv().starts_with("step,time,lhs,rhs,slack\n"));
        }
    }

    #[test]
    fn identical_data_gives_zero_rows() {
        let (u0, _) = shifted_pair();
        let grid = Grid::over(-1.0, 1.5, 50).unwrap();
        let setup = ContractivitySetup::homogeneous(nf(Scheme::Godunov), grid, 10, 0.3);
        let rep = contractivity_experiment(&u0, &u0, &setup).unwrap();
        assert!(rep.rows.iter().all(|r| r.lhs == 0.0 && r.rhs == 0.0));
    }

    #[test]
    fn summation_by_parts_holds_on_the_runs() {
        let (u0, v0) = shifted_pair();
        let grid = Grid::over(-1.0, 1.5, 100).unwrap();
        for scheme in Scheme::ALL {
            let setup = ContractivitySetup::homogeneous(nf(scheme), grid, 40, 0.3);
            let rep = contractivity_experiment(&u0, &v0, &setup).unwrap();
            let lambda = rep.dt / grid.dx();
            let flux = nf(scheme).with_lambda(lambda);
            let phi: Vec<f64> = (0..100).map(|i| (3.0 * grid.center(i)).sin()).collect();
            let phi = GridFunction::new(grid, phi, 0.0, 0.0).unwrap();
            let d =
                summation_by_parts_defect(&flux, &rep.u_traj, &rep.v_traj, &vec![lambda; 40], &phi)
                    .unwrap();
            assert!(d < 1e-11 * rep.scale, "{scheme}: {d}");
        }
    }
}
