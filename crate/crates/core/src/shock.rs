//! Discrete shock profiles of the monotone schemes: computation by long-time
//! evolution, traveling-wave residuals, mass normalization and decay fits.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::flux::{NumericalFlux, Scheme};
use crate::front::shock_speed;
use crate::grid::{Grid, GridFunction};
use crate::metrics::w1;
use crate::step::StepFunction;

/// Default traveling-wave tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
/// Default cap on evolution steps.
pub const DEFAULT_STEP_CAP: usize = 1_000_000;
/// Smallest admissible half window, in cells.
pub const MIN_HALF_WINDOW: usize = 40;
const MAX_HALF_WINDOW: usize = 1 << 16;
const MAX_DENOMINATOR: u64 = 4096;

/// `D lambda = p / q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub p: i64,
    pub q: u64,
    /// Fine-lattice index of the first sample; sample `k` sits at
    /// `(first + k) / q`.
    pub first: i64,
}

/// Samples of a discrete shock `U` with `U(xi - D lambda) = U(xi) - lambda (F(U(xi), U(xi + 1))
/// - F(U(xi - 1), U(xi)))`.
///
/// Offsets are in cell units; offset 0 is the cell nearest the mass-defined
/// shock location. With rational `D lambda = p / q` the samples sit on the
/// lattice of spacing `1 / q` and the residual is evaluated without
/// interpolation; otherwise `approximate` is set.
#[derive(Debug, Clone)]
pub struct DiscreteShockProfile {
    pub offsets: Vec<f64>,
    pub values: Vec<f64>,
    pub lattice: Option<Lattice>,
    pub u_left: f64,
    pub u_right: f64,
    pub speed: f64,
    pub lambda: f64,
    pub nf: NumericalFlux,
    pub residual: f64,
    pub alpha: f64,
    pub beta: f64,
    pub steps: usize,
    pub approximate: bool,
}

/// Best rational approximation `p / q` of `x` with `q <= max_q`, if it is
/// within `tol`.
pub fn rational_approximation(x: f64, max_q: u64, tol: f64) -> Option<(i64, u64)> {
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 as u64 > max_q {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1 as u64));
        }
        let frac = r - a as f64;
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    ((x - h1 as f64 / k1 as f64).abs() <= tol && k1 > 0).then_some((h1, k1 as u64))
}

fn monotone_step(
    nf: &NumericalFlux,
    lambda: f64,
    u: &mut [f64],
    ul: f64,
    ur: f64,
    flux: &mut Vec<f64>,
) {
    let n = u.len();
    flux.clear();
    flux.push(nf.eval_unchecked(ul, u[0]));
    for i in 0..n - 1 {
        flux.push(nf.eval_unchecked(u[i], u[i + 1]));
    }
    flux.push(nf.eval_unchecked(u[n - 1], ur));
    for i in 0..n {
        u[i] -= lambda * (flux[i + 1] - flux[i]);
    }
}

/// Mass-defined shock position in cell-center coordinates of `u`.
fn mass_center(u: &[f64], ul: f64, ur: f64) -> f64 {
    let m: f64 = u.iter().map(|v| v - ur).sum();
    m / (ul - ur) - 0.5
}

fn lerp_at(u: &[f64], x: f64, ul: f64, ur: f64) -> f64 {
    if x < 0.0 {
        return ul;
    }
    let k = x.floor() as usize;
    if k + 1 >= u.len() {
        return if k + 1 == u.len() && x == k as f64 {
            u[k]
        } else {
            ur
        };
    }
    let t = x - k as f64;
    u[k] + t * (u[k + 1] - u[k])
}

/// Computes the discrete shock connecting `u_left > u_right` for `nf` at
/// mesh ratio `lambda`, starting with `window` cells on each side of the
/// shock; the window doubles while the tails are not flat at its ends.
pub fn compute_profile(
    nf: &NumericalFlux,
    u_left: f64,
    u_right: f64,
    lambda: f64,
    window: usize,
    tol: f64,
) -> Result<DiscreteShockProfile> {
    compute_profile_capped(nf, u_left, u_right, lambda, window, tol, DEFAULT_STEP_CAP)
}

pub fn compute_profile_capped(
    nf: &NumericalFlux,
    u_left: f64,
    u_right: f64,
    lambda: f64,
    window: usize,
    tol: f64,
    step_cap: usize,
) -> Result<DiscreteShockProfile> {
    let speed = shock_speed(u_left, u_right, nf.flux())?;
    if window < MIN_HALF_WINDOW {
        return Err(Error::InsufficientWindow {
            available: window,
            required: MIN_HALF_WINDOW,
        });
    }
    if !(lambda > 0.0) {
        return Err(Error::Config(format!(
            "mesh ratio {lambda} must be positive"
        )));
    }
    let courant = lambda * nf.flux().max_speed(u_right, u_left);
    if courant > 1.0 + 1e-12 {
        return Err(Error::CflViolation {
            courant,
            limit: 1.0,
        });
    }
    let nf = nf.clone().with_lambda(lambda);
    let jump = u_left - u_right;
    let d_lambda = speed * lambda;
    let (p, q, exact) = match rational_approximation(d_lambda, MAX_DENOMINATOR, 1e-12) {
        Some((p, q)) => (p, q, true),
        None => {
            let (p, q) = rational_approximation(d_lambda, MAX_DENOMINATOR, f64::INFINITY)
                .unwrap_or((d_lambda.round() as i64, 1));
            (p, q, false)
        }
    };
    let frac_shift = q as f64 * d_lambda - p as f64;

    let mut half = window;
    let mut u = vec![u_right; 2 * half + 1];
    u[..half].fill(u_left);
    // Lax-Friedrichs decouples even and odd cells; starting with the jump at a
    // cell center balances the mass of the two sublattices.
    if nf.scheme() == Scheme::LaxFriedrichs {
        u[half] = 0.5 * (u_left + u_right);
    }
    let mut origin: i64 = 0;
    let mut history: VecDeque<(i64, Vec<f64>)> = VecDeque::with_capacity(q as usize + 2);
    let mut flux = Vec::with_capacity(u.len() + 1);
    let grow_threshold = 1e-3 * tol * jump;
    let mut residual = f64::INFINITY;

    for step in 1..=step_cap {
        monotone_step(&nf, lambda, &mut u, u_left, u_right, &mut flux);

        let drift = mass_center(&u, u_left, u_right) - half as f64;
        let shift = if drift.abs() >= 1.0 {
            drift.trunc() as i64
        } else {
            0
        };
        if shift > 0 {
            let s = (shift as usize).min(u.len());
            u.drain(..s);
            u.extend(std::iter::repeat_n(u_right, s));
            origin += s as i64;
        } else if shift < 0 {
            let s = ((-shift) as usize).min(u.len());
            u.truncate(u.len() - s);
            u.splice(0..0, std::iter::repeat_n(u_left, s));
            origin -= s as i64;
        }

        let tail = (u[0] - u_left).abs().max((u[u.len() - 1] - u_right).abs());
        if tail > grow_threshold && half < MAX_HALF_WINDOW {
            let mut grown = vec![u_left; half];
            grown.extend_from_slice(&u);
            grown.extend(std::iter::repeat_n(u_right, half));
            u = grown;
            origin -= half as i64;
            half *= 2;
            history.clear();
        }

        history.push_back((origin, u.clone()));
        if history.len() > q as usize + 1 {
            history.pop_front();
        }
        if history.len() == q as usize + 1 {
            let (o0, u0) = history.front().unwrap();
            let (o1, u1) = history.back().unwrap();
            let off = (o0 + p - o1) as f64 + frac_shift;
            residual = u0
                .iter()
                .enumerate()
                .map(|(k, &v)| (lerp_at(u1, k as f64 + off, u_left, u_right) - v).abs())
                .fold(0.0, f64::max);
            if residual <= tol {
                let mut profile = assemble(
                    &history, &nf, u_left, u_right, speed, lambda, p, q, exact, step,
                )?;
                profile.residual = profile_residual(&profile)?;
                match fit_decay(&profile) {
                    Ok(fit) => {
                        profile.alpha = fit.alpha;
                        profile.beta = fit.beta;
                    }
                    Err(Error::TailTooSharp) => {}
                    Err(e) => return Err(e),
                }
                return Ok(profile);
            }
        }
    }
    Err(Error::NoConvergence {
        steps: step_cap,
        residual,
        tolerance: tol,
    })
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    history: &VecDeque<(i64, Vec<f64>)>,
    nf: &NumericalFlux,
    u_left: f64,
    u_right: f64,
    speed: f64,
    lambda: f64,
    p: i64,
    q: u64,
    exact: bool,
    steps: usize,
) -> Result<DiscreteShockProfile> {
    let (o_last, u_last) = history.back().unwrap();
    let j_ref = o_last + mass_center(u_last, u_left, u_right).round() as i64;
    let d_lambda = speed * lambda;
    // snapshot `m` steps back samples U at j + m D lambda
    let snapshots: Vec<&(i64, Vec<f64>)> = history.iter().rev().take(q as usize).collect();

    let (offsets, values, lattice) = if exact {
        let qi = q as i64;
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for (m, (o, u)) in snapshots.iter().enumerate() {
            let base = qi * (o - j_ref) + m as i64 * p;
            lo = lo.min(base);
            hi = hi.max(base + qi * (u.len() as i64 - 1));
        }
        let mut fine = vec![f64::NAN; (hi - lo + 1) as usize];
        for (m, (o, u)) in snapshots.iter().enumerate() {
            let base = qi * (o - j_ref) + m as i64 * p;
            for (k, &v) in u.iter().enumerate() {
                fine[(base + qi * k as i64 - lo) as usize] = v;
            }
        }
        // longest run of filled samples around offset 0
        let zero = (-lo) as usize;
        let mut a = zero.min(fine.len() - 1);
        let mut b = a;
        if fine[a].is_nan() {
            return Err(Error::InsufficientWindow {
                available: 0,
                required: q as usize,
            });
        }
        while a > 0 && !fine[a - 1].is_nan() {
            a -= 1;
        }
        while b + 1 < fine.len() && !fine[b + 1].is_nan() {
            b += 1;
        }
        let first = lo + a as i64;
        let values = fine[a..=b].to_vec();
        let offsets = (0..values.len())
            .map(|k| (first + k as i64) as f64 / q as f64)
            .collect();
        (offsets, values, Some(Lattice { p, q, first }))
    } else {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        for (m, (o, u)) in snapshots.iter().enumerate() {
            for (k, &v) in u.iter().enumerate() {
                pts.push(((o + k as i64 - j_ref) as f64 + m as f64 * d_lambda, v));
            }
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        let (offsets, values) = pts.into_iter().unzip();
        (offsets, values, None)
    };

    Ok(DiscreteShockProfile {
        offsets,
        values,
        lattice,
        u_left,
        u_right,
        speed,
        lambda,
        nf: nf.clone(),
        residual: f64::NAN,
        alpha: f64::INFINITY,
        beta: 0.0,
        steps,
        approximate: !exact,
    })
}

impl DiscreteShockProfile {
    /// `U(xi)` by linear interpolation between samples, far states outside.
    pub fn eval(&self, xi: f64) -> f64 {
        let xs = &self.offsets;
        if xs.is_empty() || xi < xs[0] {
            return self.u_left;
        }
        if xi > xs[xs.len() - 1] {
            return self.u_right;
        }
        let k = xs.partition_point(|&x| x <= xi);
        if k == xs.len() {
            return self.values[k - 1];
        }
        let (x0, x1) = (xs[k - 1], xs[k]);
        let t = (xi - x0) / (x1 - x0);
        self.values[k - 1] + t * (self.values[k] - self.values[k - 1])
    }

    /// Mass-defined shock location in offset units.
    pub fn mass_center(&self) -> f64 {
        let xs = &self.offsets;
        let Some(&first) = xs.first() else { return 0.0 };
        let jump = self.u_left - self.u_right;
        let mut acc = 0.0;
        for (w, v) in xs.windows(2).zip(self.values.windows(2)) {
            acc += 0.5 * (w[1] - w[0]) * ((v[0] - self.u_right) + (v[1] - self.u_right));
        }
        first + acc / jump
    }

    /// Two-column `offset value` text.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.values.len() * 40);
        for (x, v) in self.offsets.iter().zip(&self.values) {
            let _ = writeln!(s, "{x:.10} {v:.17e}");
        }
        s
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// `max |U(xi - D lambda) - U(xi) + lambda (F(U(xi), U(xi + 1)) - F(U(xi - 1), U(xi)))|`
/// over the samples whose shifted arguments are stored.
pub fn profile_residual(p: &DiscreteShockProfile) -> Result<f64> {
    let nf = &p.nf;
    nf.ensure_ready()?;
    let lambda = p.lambda;
    let defect = |lhs: f64, um: f64, u0: f64, up: f64| {
        (lhs - (u0 - lambda * (nf.eval_unchecked(u0, up) - nf.eval_unchecked(um, u0)))).abs()
    };
    match p.lattice {
        Some(Lattice { p: shift, q, .. }) => {
            let q = q as i64;
            let n = p.values.len() as i64;
            let lo = q.max(shift);
            let hi = (n - q).min(n + shift);
            if hi <= lo {
                return Err(Error::InsufficientWindow {
                    available: p.values.len(),
                    required: (2 * q + shift.abs() + 1) as usize,
                });
            }
            let v = &p.values;
            Ok((lo..hi)
                .map(|k| {
                    let k = k as usize;
                    defect(
                        v[k - shift as usize],
                        v[k - q as usize],
                        v[k],
                        v[k + q as usize],
                    )
                })
                .fold(0.0, f64::max))
        }
        None => {
            let d = p.speed * p.lambda;
            let (a, b) = match (p.offsets.first(), p.offsets.last()) {
                (Some(&a), Some(&b)) => (a, b),
                _ => {
                    return Err(Error::InsufficientWindow {
                        available: 0,
                        required: 3,
                    })
                }
            };
            let reach = 1.0f64.max(d.abs());
            let interior: Vec<f64> = p
                .offsets
                .iter()
                .copied()
                .filter(|&x| x - reach >= a && x + reach <= b)
                .collect();
            if interior.is_empty() {
                return Err(Error::InsufficientWindow {
                    available: p.values.len(),
                    required: 3,
                });
            }
            Ok(interior
                .into_iter()
                .map(|x| defect(p.eval(x - d), p.eval(x - 1.0), p.eval(x), p.eval(x + 1.0)))
                .fold(0.0, f64::max))
        }
    }
}

/// Log-linear fit of one tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    /// Fitted decay rate per cell.
    pub rate: f64,
    /// Correlation of `log |U - u_pm|` with `|xi|`.
    pub r: f64,
    /// The local decay rate on the far half of the tail exceeds the near
    /// half by more than [`SUPEREXPONENTIAL_RATIO`]; such tails (towards a
    /// sonic state) are bounded by any exponential and are not log-linear.
    pub superexponential: bool,
}

/// Exponential decay constants of the tails: `|U(xi) - u_pm| <= beta e^{-alpha |xi|}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub alpha: f64,
    pub beta: f64,
    /// `None` if that tail has fewer than three samples above the noise floor.
    pub left: Option<TailFit>,
    pub right: Option<TailFit>,
}

const NOISE_FLOOR: f64 = 1e-13;
const CORE_FRACTION: f64 = 0.05;
pub const SUPEREXPONENTIAL_RATIO: f64 = 1.5;

fn least_squares(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let r = if syy > 0.0 {
        sxy / (sxx * syy).sqrt()
    } else {
        -1.0
    };
    Some((sxy / sxx, r))
}

/// Least-squares fit of `log |U - u_pm|` against `|xi|` on each tail.
pub fn fit_decay(p: &DiscreteShockProfile) -> Result<DecayFit> {
    let jump = p.u_left - p.u_right;
    let center = p.mass_center();
    let deviation = |x: f64, v: f64| -> (f64, f64) {
        let r = x - center;
        let dev = if r < 0.0 { p.u_left - v } else { v - p.u_right }.abs();
        (r, dev)
    };
    let tail = |left: bool| -> Option<TailFit> {
        let mut pts: Vec<(f64, f64)> = p
            .offsets
            .iter()
            .zip(&p.values)
            .filter_map(|(&x, &v)| {
                let (r, dev) = deviation(x, v);
                let side = if left { r < 0.0 } else { r > 0.0 };
                (side && dev > NOISE_FLOOR && dev < CORE_FRACTION * jump)
                    .then(|| (r.abs(), dev.ln()))
            })
            .collect();
        if pts.len() < 3 {
            return None;
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
        let (slope, r) = least_squares(&xs, &ys)?;
        if slope >= 0.0 {
            return None;
        }
        let half = xs.len() / 2;
        let superexponential = half >= 2
            && xs.len() - half >= 2
            && match (
                least_squares(&xs[..half], &ys[..half]),
                least_squares(&xs[half..], &ys[half..]),
            ) {
                (Some((near, _)), Some((far, _))) => {
                    near < 0.0 && far < SUPEREXPONENTIAL_RATIO * near
                }
                _ => false,
            };
        Some(TailFit {
            rate: -slope,
            r,
            superexponential,
        })
    };
    let left = tail(true);
    let right = tail(false);
    let rate = |t: &Option<TailFit>, exponential_only: bool| {
        t.filter(|t| !(exponential_only && t.superexponential))
            .map(|t| t.rate)
    };
    let alpha = [rate(&left, true), rate(&right, true)]
        .into_iter()
        .flatten()
        .reduce(f64::min)
        .or_else(|| {
            [rate(&left, false), rate(&right, false)]
                .into_iter()
                .flatten()
                .reduce(f64::min)
        })
        .ok_or(Error::TailTooSharp)?;
    // envelope constant so that the bound holds on every sample above the noise floor
    let beta = p
        .offsets
        .iter()
        .zip(&p.values)
        .map(|(&x, &v)| deviation(x, v))
        .filter(|&(_, dev)| dev > NOISE_FLOOR)
        .map(|(r, dev)| dev * (alpha * r.abs()).exp())
        .fold(0.0, f64::max);
    Ok(DecayFit {
        alpha,
        beta,
        left,
        right,
    })
}

/// `V_i = U((x_i - x_shock) / dx + zeta)` at the cell centers of `grid`.
pub fn sample_profile(
    p: &DiscreteShockProfile,
    x_shock: f64,
    grid: &Grid,
    zeta: f64,
) -> Result<GridFunction> {
    let dx = grid.dx();
    let values = (0..grid.n_cells())
        .map(|i| p.eval((grid.center(i) - x_shock) / dx + zeta))
        .collect();
    GridFunction::new(*grid, values, p.u_left, p.u_right)
}

/// `integral (H(. - x_shock) - V)` over the grid.
fn heaviside_mass_defect(h: &StepFunction, v: &GridFunction) -> f64 {
    let g = v.grid();
    let dx = g.dx();
    (0..g.n_cells())
        .map(|i| h.integral(g.edge(i), g.edge(i + 1)) - dx * v.values()[i])
        .sum()
}

/// Sampling shift `zeta` for which the sampled profile has the mass of the
/// Heaviside jump at `x_shock`.
pub fn mass_normalizing_shift(p: &DiscreteShockProfile, x_shock: f64, grid: &Grid) -> Result<f64> {
    let dx = grid.dx();
    let (a, b) = (
        p.offsets.first().copied().unwrap_or(0.0),
        p.offsets.last().copied().unwrap_or(0.0),
    );
    let needed_left = x_shock + (a - 2.0) * dx;
    let needed_right = x_shock + (b + 2.0) * dx;
    if needed_left < grid.x_left() || needed_right > grid.x_right() {
        return Err(Error::WindowTooSmall(format!(
            "profile support [{needed_left}, {needed_right}] exceeds grid [{}, {}]",
            grid.x_left(),
            grid.x_right()
        )));
    }
    let h = StepFunction::heaviside(x_shock, p.u_left, p.u_right)?;
    let jump = p.u_left - p.u_right;
    let defect = |zeta: f64| -> Result<f64> {
        Ok(heaviside_mass_defect(
            &h,
            &sample_profile(p, x_shock, grid, zeta)?,
        ))
    };
    let unit = dx * jump;
    let tol = 1e-15 * unit.max(jump * grid.span());
    let m0 = defect(0.0)?;
    if m0.abs() <= tol {
        return Ok(0.0);
    }
    // m is non-decreasing and m(zeta + 1) = m(zeta) + dx * jump.
    let guess = -m0 / unit;
    let (mut lo, mut hi) = (guess.floor() - 1.0, guess.ceil() + 1.0);
    let (mut mlo, mut mhi) = (defect(lo)?, defect(hi)?);
    let mut best = (guess, defect(guess)?);
    if best.1.abs() <= tol {
        return Ok(best.0);
    }
    let mut side = 0;
    for _ in 0..200 {
        let z = if mhi != mlo {
            lo - mlo * (hi - lo) / (mhi - mlo)
        } else {
            0.5 * (lo + hi)
        };
        let z = if z > lo && z < hi { z } else { 0.5 * (lo + hi) };
        let m = defect(z)?;
        if m.abs() < best.1.abs() {
            best = (z, m);
        }
        if m.abs() <= tol {
            break;
        }
        if m < 0.0 {
            lo = z;
            mlo = m;
            if side == -1 {
                mhi *= 0.5;
            }
            side = -1;
        } else {
            hi = z;
            mhi = m;
            if side == 1 {
                mlo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(best.0)
}

/// Sampled profile on `grid` with zero mass relative to the Heaviside jump
/// at `x_shock`.
pub fn normalize_mass(p: &DiscreteShockProfile, x_shock: f64, grid: &Grid) -> Result<GridFunction> {
    let zeta = mass_normalizing_shift(p, x_shock, grid)?;
    sample_profile(p, x_shock, grid, zeta)
}

/// W1 distance between the Heaviside jump at 0 and the normalized profile
/// sampled on cells of width `dx` with edges at multiples of `dx`.
pub fn w1_heaviside_gap(p: &DiscreteShockProfile, dx: f64) -> Result<f64> {
    let extent = p
        .offsets
        .first()
        .map_or(0.0, |a| a.abs())
        .max(p.offsets.last().map_or(0.0, |b| b.abs()));
    let half = extent.ceil() as usize + 8;
    let grid = Grid::new(-(half as f64) * dx, dx, 2 * half)?;
    let v = normalize_mass(p, 0.0, &grid)?;
    let h = StepFunction::heaviside(0.0, p.u_left, p.u_right)?;
    w1(&h, &v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::ConvexFlux;

    fn nf(scheme: Scheme) -> NumericalFlux {
        NumericalFlux::new(scheme, ConvexFlux::burgers())
    }

    #[test]
    fn rational_speeds() {
        assert_eq!(rational_approximation(0.15, 4096, 1e-12), Some((3, 20)));
        assert_eq!(rational_approximation(0.225, 4096, 1e-12), Some((9, 40)));
        assert_eq!(rational_approximation(0.0, 4096, 1e-12), Some((0, 1)));
        assert_eq!(rational_approximation(-0.25, 4096, 1e-12), Some((-1, 4)));
        assert_eq!(rational_approximation(2f64.sqrt(), 4096, 1e-12), None);
    }

    #[test]
    fn godunov_stationary_shock_is_exact() {
        let p = compute_profile(&nf(Scheme::Godunov), 1.0, -1.0, 0.25, 40, 1e-10).unwrap();
        assert_eq!(p.residual, 0.0);
        assert!(p.values.iter().all(|&v| v == 1.0 || v == -1.0));
        assert!(matches!(fit_decay(&p), Err(Error::TailTooSharp)));
        assert!(w1_heaviside_gap(&p, 1.0 / 64.0).unwrap() < 1e-15);
    }

    #[test]
    fn lax_friedrichs_profile_converges() {
        let p = compute_profile(&nf(Scheme::LaxFriedrichs), 1.0, -1.0, 0.25, 40, 1e-10).unwrap();
        assert!(p.residual <= 1e-10);
        assert!(p.values.windows(2).all(|w| w[1] <= w[0]));
        let fit = fit_decay(&p).unwrap();
        assert!(fit.alpha > 0.0);
        assert!(fit.left.unwrap().r.abs() > 0.999 && fit.right.unwrap().r.abs() > 0.999);
    }

    #[test]
    fn moving_shock_on_fine_lattice() {
        let p = compute_profile(&nf(Scheme::EngquistOsher), 2.0, 0.0, 0.15, 40, 1e-10).unwrap();
        let lat = p.lattice.unwrap();
        assert_eq!((lat.p, lat.q), (3, 20));
        assert!(p.residual <= 1e-10);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            compute_profile(&nf(Scheme::Godunov), -1.0, 1.0, 0.25, 40, 1e-10),
            Err(Error::NotAShock { .. })
        ));
        assert!(matches!(
            compute_profile(&nf(Scheme::Godunov), 1.0, -1.0, 0.25, 10, 1e-10),
            Err(Error::InsufficientWindow { .. })
        ));
    }

    #[test]
    fn normalization_follows_the_jump_condition() {
        let p = compute_profile(&nf(Scheme::EngquistOsher), 2.0, 0.0, 0.25, 40, 1e-10).unwrap();
        let dx = 0.01;
        let grid = Grid::new(-1.0, dx, 200).unwrap();
        let z0 = mass_normalizing_shift(&p, 0.0, &grid).unwrap();
        let z1 = mass_normalizing_shift(&p, dx, &grid).unwrap();
        assert!((z0 - z1).abs() < 1e-9);
        let v0 = normalize_mass(&p, 0.0, &grid).unwrap();
        let v1 = normalize_mass(&p, dx, &grid).unwrap();
        for i in 0..199 {
            assert!((v1.values()[i + 1] - v0.values()[i]).abs() < 1e-9);
        }
        let h = StepFunction::heaviside(0.0, 2.0, 0.0).unwrap();
        let defect: f64 = (0..200)
            .map(|i| h.integral(grid.edge(i), grid.edge(i + 1)) - dx * v0.values()[i])
            .sum();
        assert!(defect.abs() < 1e-12);
    }
}
