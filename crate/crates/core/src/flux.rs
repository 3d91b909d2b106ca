//! Convex physical fluxes, monotone two-point numerical fluxes, CFL time
//! steps and the flux linearization used by the dual stability argument.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::quadrature::integrate_unit;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A convex flux `f` together with its derivative.
#[derive(Clone)]
pub struct ConvexFlux {
    name: String,
    f: ScalarFn,
    f_prime: ScalarFn,
    minimizer: Option<f64>,
    affine_derivative: bool,
}

impl fmt::Debug for ConvexFlux {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("ConvexFlux")
            .field("name", &self.name)
            .field("minimizer", &self.minimizer)
            .finish()
    }
}

impl ConvexFlux {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            f_prime: Arc::new(f_prime),
            minimizer: None,
            affine_derivative: false,
        }
    }

    /// Registers the global minimizer of `f` (the sonic point `f'(w) = 0`).
    pub fn with_minimizer(mut self, w: f64) -> Self {
        self.minimizer = Some(w);
        self
    }

    /// Marks `f'` as affine, so path averages of `f'` are midpoint values.
    pub fn with_affine_derivative(mut self) -> Self {
        self.affine_derivative = true;
        self
    }

    /// Burgers' flux `u^2 / 2`.
    pub fn burgers() -> Self {
        Self::new("burgers", |u| 0.5 * u * u, |u| u)
            .with_minimizer(0.0)
            .with_affine_derivative()
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "burgers" => Ok(Self::burgers()),
            other => Err(Error::Config(format!("unknown physical flux '{other}'"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn minimizer(&self) -> Option<f64> {
        self.minimizer
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    #[inline]
    pub fn derivative(&self, u: f64) -> f64 {
        (self.f_prime)(u)
    }

    /// `max |f'|` on `[lo, hi]`; attained at an end point since `f'` is monotone.
    pub fn max_speed(&self, lo: f64, hi: f64) -> f64 {
        self.derivative(lo).abs().max(self.derivative(hi).abs())
    }

    /// Point in `(lo, hi)` where `f'` changes sign, if any.
    pub fn sonic_point(&self, lo: f64, hi: f64) -> Option<f64> {
        if let Some(w) = self.minimizer {
            return (lo < w && w < hi).then_some(w);
        }
        let (mut a, mut b) = (lo, hi);
        if !(self.derivative(a) < 0.0 && self.derivative(b) > 0.0) {
            return None;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if self.derivative(m) < 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        Some(0.5 * (a + b))
    }

    /// `min f` over the interval spanned by `a` and `b`.
    pub fn min_between(&self, a: f64, b: f64) -> f64 {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        match self.sonic_point(lo, hi) {
            Some(w) => self.eval(w),
            None => self.eval(lo).min(self.eval(hi)),
        }
    }

    /// Oriented integral of `|f'|` from `a` to `b`.
    pub fn abs_derivative_integral(&self, a: f64, b: f64) -> f64 {
        if a == b {
            return 0.0;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let total = match self.sonic_point(lo, hi) {
            Some(w) => (self.eval(lo) - self.eval(w)) + (self.eval(hi) - self.eval(w)),
            None => (self.eval(hi) - self.eval(lo)).abs(),
        };
        sign * total
    }

    /// `integral_0^1 f'(y + s (x - y)) ds`, i.e. the divided difference of `f`
    /// without cancellation when `x` and `y` are close.
    pub fn mean_derivative(&self, x: f64, y: f64) -> f64 {
        if x == y {
            self.derivative(x)
        } else if self.affine_derivative {
            self.derivative(0.5 * (x + y))
        } else {
            integrate_unit(|s| self.derivative(y + s * (x - y)))
        }
    }

    /// Sampled checks that `f'` is non-decreasing on `[lo, hi]` and consistent
    /// with finite differences of `f`.
    pub fn validate(&self, lo: f64, hi: f64) -> Result<()> {
        const SAMPLES: usize = 512;
        if !(lo <= hi) {
            return Err(Error::Config(format!("empty state range [{lo}, {hi}]")));
        }
        let width = (hi - lo).max(1e-3);
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=SAMPLES {
            let u = lo + (hi - lo) * k as f64 / SAMPLES as f64;
            let d = self.derivative(u);
            if d < prev - 1e-12 * (1.0 + prev.abs()) {
                return Err(Error::Config(format!(
                    "flux '{}' is not convex near u = {u}",
                    self.name
                )));
            }
            prev = d;
            let h = 1e-5 * width;
            let fd = (self.eval(u + h) - self.eval(u - h)) / (2.0 * h);
            if (fd - d).abs() > 1e-5 * (1.0 + d.abs()) {
                return Err(Error::Config(format!(
                    "derivative of flux '{}' is inconsistent at u = {u}: {d} vs {fd}",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

/// The monotone two-point schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    LaxFriedrichs,
    EngquistOsher,
    Godunov,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [
        Scheme::LaxFriedrichs,
        Scheme::EngquistOsher,
        Scheme::Godunov,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Scheme::LaxFriedrichs => "lxf",
            Scheme::EngquistOsher => "eo",
            Scheme::Godunov => "godunov",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lxf" | "lax-friedrichs" => Ok(Scheme::LaxFriedrichs),
            "eo" | "engquist-osher" => Ok(Scheme::EngquistOsher),
            "godunov" => Ok(Scheme::Godunov),
            other => Err(Error::Config(format!(
                "unknown numerical flux '{other}' (expected lxf, eo or godunov)"
            ))),
        }
    }
}

/// A two-point numerical flux `F(a, b)` built on a convex flux.
#[derive(Debug, Clone)]
pub struct NumericalFlux {
    scheme: Scheme,
    flux: ConvexFlux,
    lambda: Option<f64>,
}

impl NumericalFlux {
    pub fn new(scheme: Scheme, flux: ConvexFlux) -> Self {
        Self {
            scheme,
            flux,
            lambda: None,
        }
    }

    /// Sets the mesh ratio `dt / dx`; only Lax-Friedrichs depends on it.
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn flux(&self) -> &ConvexFlux {
        &self.flux
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    fn lxf_lambda(&self) -> Result<f64> {
        match self.lambda {
            Some(l) if l > 0.0 => Ok(l),
            _ => Err(Error::MissingLambda),
        }
    }

    /// Fails with [`Error::MissingLambda`] if the flux cannot be evaluated.
    pub fn ensure_ready(&self) -> Result<()> {
        if self.scheme == Scheme::LaxFriedrichs {
            self.lxf_lambda()?;
        }
        Ok(())
    }

    pub fn eval(&self, a: f64, b: f64) -> Result<f64> {
        self.ensure_ready()?;
        Ok(self.eval_unchecked(a, b))
    }

    /// Evaluates `F(a, b)`; callers must have checked [`Self::ensure_ready`].
    #[inline]
    pub(crate) fn eval_unchecked(&self, a: f64, b: f64) -> f64 {
        let f = &self.flux;
        match self.scheme {
            Scheme::LaxFriedrichs => {
                let lambda = self.lambda.unwrap_or(f64::NAN);
                0.5 * (f.eval(a) + f.eval(b)) - (b - a) / (2.0 * lambda)
            }
            Scheme::EngquistOsher => {
                0.5 * (f.eval(a) + f.eval(b)) - 0.5 * f.abs_derivative_integral(a, b)
            }
            Scheme::Godunov => {
                if a >= b {
                    f.eval(a).max(f.eval(b))
                } else {
                    f.min_between(a, b)
                }
            }
        }
    }

    /// Pointwise partial derivatives `(dF/da, dF/db)`.
    ///
    /// At the Godunov kink `f(a) = f(b)`, `a > b` the `a`-branch is taken; on
    /// the diagonal `a = b` the one-sided limits `(max(f', 0), min(f', 0))` are
    /// used.
    pub fn partials(&self, a: f64, b: f64) -> Result<(f64, f64)> {
        self.ensure_ready()?;
        Ok(self.partials_unchecked(a, b))
    }

    fn partials_unchecked(&self, a: f64, b: f64) -> (f64, f64) {
        let f = &self.flux;
        match self.scheme {
            Scheme::LaxFriedrichs => {
                let inv = 1.0 / self.lambda.unwrap_or(f64::NAN);
                (0.5 * (f.derivative(a) + inv), 0.5 * (f.derivative(b) - inv))
            }
            Scheme::EngquistOsher => (f.derivative(a).max(0.0), f.derivative(b).min(0.0)),
            Scheme::Godunov => match godunov_branch(f, a, b) {
                GodunovBranch::Left => (f.derivative(a), 0.0),
                GodunovBranch::Right => (0.0, f.derivative(b)),
                GodunovBranch::Sonic => (0.0, 0.0),
                GodunovBranch::Diagonal => {
                    let d = f.derivative(a);
                    (d.max(0.0), d.min(0.0))
                }
            },
        }
    }

    /// Sampled consistency and monotonicity checks on `[lo, hi]^2`.
    pub fn validate(&self, lo: f64, hi: f64) -> Result<()> {
        self.ensure_ready()?;
        const SAMPLES: usize = 24;
        let pts: Vec<f64> = (0..=SAMPLES)
            .map(|k| lo + (hi - lo) * k as f64 / SAMPLES as f64)
            .collect();
        let scale = 1.0 + self.flux.max_speed(lo, hi) * (hi - lo).abs();
        let tol = 1e-12 * scale;
        for &u in &pts {
            let diff = self.eval_unchecked(u, u) - self.flux.eval(u);
            if diff.abs() > tol {
                return Err(Error::Config(format!(
                    "{} flux is inconsistent at u = {u}",
                    self.scheme
                )));
            }
        }
        for w in pts.windows(2) {
            for &c in &pts {
                if self.eval_unchecked(w[1], c) < self.eval_unchecked(w[0], c) - tol
                    || self.eval_unchecked(c, w[1]) > self.eval_unchecked(c, w[0]) + tol
                {
                    return Err(Error::Config(format!(
                        "{} flux is not monotone on [{lo}, {hi}]",
                        self.scheme
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GodunovBranch {
    Left,
    Right,
    Sonic,
    Diagonal,
}

fn godunov_branch(f: &ConvexFlux, a: f64, b: f64) -> GodunovBranch {
    if a == b {
        GodunovBranch::Diagonal
    } else if a > b {
        if f.eval(a) >= f.eval(b) {
            GodunovBranch::Left
        } else {
            GodunovBranch::Right
        }
    } else if f.derivative(a) >= 0.0 {
        GodunovBranch::Left
    } else if f.derivative(b) <= 0.0 {
        GodunovBranch::Right
    } else {
        GodunovBranch::Sonic
    }
}

/// `dt = cfl_number * dx / max|f'|` over the state box `[u_min, u_max]`.
pub fn cfl_timestep(
    nf: &NumericalFlux,
    grid: &Grid,
    u_min: f64,
    u_max: f64,
    cfl_number: f64,
) -> Result<f64> {
    if !(cfl_number > 0.0 && cfl_number <= 1.0) {
        return Err(Error::Config(format!(
            "CFL number {cfl_number} must lie in (0, 1]"
        )));
    }
    if !(u_min <= u_max) {
        return Err(Error::Config(format!("empty state box [{u_min}, {u_max}]")));
    }
    let speed = nf.flux().max_speed(u_min, u_max);
    if speed == 0.0 {
        return Err(Error::NoWaveSpeed { u_min, u_max });
    }
    Ok(cfl_number * grid.dx() / speed)
}

/// Interface-aligned coefficients of `F(u_i, u_{i+1}) - F(v_i, v_{i+1})
/// = A_i (u_i - v_i) + B_{i+1} (u_{i+1} - v_{i+1})`.
///
/// Entry `j` belongs to the interface between extended cells `j - 1` and `j`
/// (cell `-1` and cell `n` are the far states), so `a[j] = A_{j-1}` and
/// `b[j] = B_j`; both vectors have `n + 1` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxLinearization {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn linearization_coefficients(
    nf: &NumericalFlux,
    u: &GridFunction,
    v: &GridFunction,
) -> Result<FluxLinearization> {
    u.check_compatible(v)?;
    nf.ensure_ready()?;
    let n = u.values().len();
    let ext = |g: &GridFunction, k: usize| -> f64 {
        if k == 0 {
            g.far_left()
        } else if k == n + 1 {
            g.far_right()
        } else {
            g.values()[k - 1]
        }
    };
    let mut a = Vec::with_capacity(n + 1);
    let mut b = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let (ul, ur) = (ext(u, j), ext(u, j + 1));
        let (vl, vr) = (ext(v, j), ext(v, j + 1));
        let (aj, bj) = path_partials(nf, (ul, ur), (vl, vr));
        a.push(aj);
        b.push(bj);
    }
    Ok(FluxLinearization { a, b })
}

/// `integral_0^1 grad F((1-s) v + s u) ds` for the segment from `v` to `u`.
fn path_partials(nf: &NumericalFlux, u: (f64, f64), v: (f64, f64)) -> (f64, f64) {
    let f = nf.flux();
    match nf.scheme() {
        Scheme::LaxFriedrichs => {
            let inv = 1.0 / nf.lambda.unwrap_or(f64::NAN);
            (
                0.5 * (f.mean_derivative(u.0, v.0) + inv),
                0.5 * (f.mean_derivative(u.1, v.1) - inv),
            )
        }
        Scheme::EngquistOsher => (
            mean_positive_part(f, u.0, v.0),
            mean_negative_part(f, u.1, v.1),
        ),
        Scheme::Godunov => godunov_path_partials(f, u, v),
    }
}

/// `integral_0^1 max(f'(y + s (x - y)), 0) ds`.
fn mean_positive_part(f: &ConvexFlux, x: f64, y: f64) -> f64 {
    if x == y {
        return f.derivative(x).max(0.0);
    }
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    let split = f.sonic_point(lo, hi);
    match split {
        Some(w) => ((hi - w) / (hi - lo)) * f.mean_derivative(hi, w).max(0.0),
        None => f.mean_derivative(x, y).max(0.0),
    }
}

/// `integral_0^1 min(f'(y + s (x - y)), 0) ds`.
fn mean_negative_part(f: &ConvexFlux, x: f64, y: f64) -> f64 {
    if x == y {
        return f.derivative(x).min(0.0);
    }
    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
    match f.sonic_point(lo, hi) {
        Some(w) => ((w - lo) / (hi - lo)) * f.mean_derivative(w, lo).min(0.0),
        None => f.mean_derivative(x, y).min(0.0),
    }
}

fn godunov_path_partials(f: &ConvexFlux, u: (f64, f64), v: (f64, f64)) -> (f64, f64) {
    let at = |s: f64| (v.0 + s * (u.0 - v.0), v.1 + s * (u.1 - v.1));
    let da = u.0 - v.0;
    let db = u.1 - v.1;

    // Diagonal segment: F(a, a) = f(a) with the one-sided partials.
    if v.0 == v.1 && da == db {
        return (
            mean_positive_part(f, u.0, v.0),
            mean_negative_part(f, u.1, v.1),
        );
    }

    let mut cuts = vec![0.0, 1.0];
    let mut push_root = |num: f64, den: f64| {
        if den != 0.0 {
            let s = num / den;
            if s > 0.0 && s < 1.0 {
                cuts.push(s);
            }
        }
    };
    // a_s = b_s
    push_root(v.1 - v.0, da - db);
    if let Some(w) = f.minimizer() {
        push_root(w - v.0, da);
        push_root(w - v.1, db);
    }
    // Sign changes of f(a_s) - f(b_s), bracketed on a uniform sample.
    const SAMPLES: usize = 32;
    let phi = |s: f64| {
        let (a, b) = at(s);
        f.eval(a) - f.eval(b)
    };
    let mut prev = phi(0.0);
    for k in 1..=SAMPLES {
        let s1 = k as f64 / SAMPLES as f64;
        let cur = phi(s1);
        if prev.signum() * cur.signum() < 0.0 {
            let (mut lo, mut hi) = ((k - 1) as f64 / SAMPLES as f64, s1);
            let plo = prev;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if phi(mid).signum() == plo.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            cuts.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();

    let (mut pa, mut pb) = (0.0, 0.0);
    for w in cuts.windows(2) {
        let (s0, s1) = (w[0], w[1]);
        if s1 <= s0 {
            continue;
        }
        let (am, bm) = at(0.5 * (s0 + s1));
        let (a0, b0) = at(s0);
        let (a1, b1) = at(s1);
        let len = s1 - s0;
        match godunov_branch(f, am, bm) {
            GodunovBranch::Left => pa += len * f.mean_derivative(a1, a0),
            GodunovBranch::Right => pb += len * f.mean_derivative(b1, b0),
            GodunovBranch::Sonic => {}
            GodunovBranch::Diagonal => {
                let d = f.mean_derivative(a1, a0);
                pa += len * d.max(0.0);
                pb += len * d.min(0.0);
            }
        }
    }
    (pa, pb)
}

/// Which inequality of the dual stability conditions failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// `A_i >= 0`
    NegativeA,
    /// `A_i <= A_{i-1}`
    IncreasingA,
    /// `B_i <= 0`
    PositiveB,
    /// `B_i <= B_{i-1}`
    IncreasingB,
    /// `lambda (A_{i-1} - B_i) <= 1`
    Courant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionViolation {
    /// Interface index in the layout of [`FluxLinearization`].
    pub index: usize,
    pub kind: ConditionKind,
    /// Amount by which the inequality is exceeded.
    pub excess: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionReport {
    pub satisfied: bool,
    pub first_violation: Option<ConditionViolation>,
}

/// Checks `0 <= A_i <= A_{i-1}`, `0 >= B_{i-1} >= B_i` and
/// `lambda (A_{i-1} - B_i) <= 1` on interface-aligned coefficients.
pub fn check_contractivity_conditions(a: &[f64], b: &[f64], lambda: f64) -> ConditionReport {
    let scale = a.iter().chain(b).fold(1.0f64, |m, x| m.max(x.abs()));
    let tol = 1e-12 * scale;
    let violation = |index, kind, excess: f64| ConditionReport {
        satisfied: false,
        first_violation: Some(ConditionViolation {
            index,
            kind,
            excess,
        }),
    };
    for j in 0..a.len().min(b.len()) {
        if a[j] < -tol {
            return violation(j, ConditionKind::NegativeA, -a[j]);
        }
        if j > 0 && a[j] > a[j - 1] + tol {
            return violation(j, ConditionKind::IncreasingA, a[j] - a[j - 1]);
        }
        if b[j] > tol {
            return violation(j, ConditionKind::PositiveB, b[j]);
        }
        if j > 0 && b[j] > b[j - 1] + tol {
            return violation(j, ConditionKind::IncreasingB, b[j] - b[j - 1]);
        }
        let courant = lambda * (a[j] - b[j]);
        if courant > 1.0 + tol {
            return violation(j, ConditionKind::Courant, courant - 1.0);
        }
    }
    ConditionReport {
        satisfied: true,
        first_violation: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn burgers(scheme: Scheme) -> NumericalFlux {
        NumericalFlux::new(scheme, ConvexFlux::burgers())
    }

    #[test]
    fn godunov_value() {
        assert_eq!(burgers(Scheme::Godunov).eval(2.0, 0.0).unwrap(), 2.0);
        // transonic rarefaction: min over [-1, 2] of u^2/2
        assert_eq!(burgers(Scheme::Godunov).eval(-1.0, 2.0).unwrap(), 0.0);
        assert_eq!(burgers(Scheme::Godunov).eval(1.0, -1.0).unwrap(), 0.5);
    }

    #[test]
    fn engquist_osher_value() {
        // 1/2 (2 + 0) - 1/2 * int_2^0 |u| du = 1 + 1
        let got = burgers(Scheme::EngquistOsher).eval(2.0, 0.0).unwrap();
        assert!((got - 2.0).abs() < 1e-15);
    }

    #[test]
    fn lax_friedrichs_value() {
        let nf = burgers(Scheme::LaxFriedrichs).with_lambda(0.15);
        let got = nf.eval(2.0, 0.0).unwrap();
        assert!((got - (1.0 + 20.0 / 3.0)).abs() < 1e-13);
        assert!(matches!(
            burgers(Scheme::LaxFriedrichs).eval(1.0, 0.0),
            Err(Error::MissingLambda)
        ));
    }

    #[test]
    fn consistency_for_all_schemes() {
        for scheme in Scheme::ALL {
            let nf = burgers(scheme).with_lambda(0.2);
            for k in -20..=20 {
                let u = k as f64 * 0.13;
                assert!((nf.eval(u, u).unwrap() - 0.5 * u * u).abs() < 1e-14);
            }
            nf.validate(-2.0, 2.0).unwrap();
        }
    }

    #[test]
    fn unregistered_minimizer_matches_closed_form() {
        let plain = ConvexFlux::new("q", |u| 0.5 * u * u, |u| u);
        let nf_plain = NumericalFlux::new(Scheme::EngquistOsher, plain.clone());
        let nf = burgers(Scheme::EngquistOsher);
        for &(a, b) in &[(2.0, 0.0), (-1.0, 1.5), (0.3, -0.7), (-2.0, -1.0)] {
            let x = nf.eval(a, b).unwrap();
            let y = nf_plain.eval(a, b).unwrap();
            assert!((x - y).abs() < 1e-12, "{a} {b}: {x} vs {y}");
        }
        assert!((plain.min_between(-1.0, 2.0)).abs() < 1e-24);
    }

    #[test]
    fn godunov_partials_follow_branches() {
        let nf = burgers(Scheme::Godunov);
        assert_eq!(nf.partials(2.0, 1.0).unwrap(), (2.0, 0.0));
        assert_eq!(nf.partials(1.0, -2.0).unwrap(), (0.0, -2.0));
        assert_eq!(nf.partials(1.0, -1.0).unwrap(), (1.0, 0.0));
        assert_eq!(nf.partials(-1.0, -1.0).unwrap(), (0.0, -1.0));
        assert_eq!(nf.partials(-1.0, 1.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn cfl_timestep_values() {
        let nf = burgers(Scheme::Godunov);
        let g = Grid::new(0.0, 1.0 / 32.0, 32).unwrap();
        let dt = cfl_timestep(&nf, &g, 0.0, 2.0, 0.3).unwrap();
        assert!((dt - 3.0 / 640.0).abs() < 1e-18);
        let half = cfl_timestep(&nf, &g, 0.0, 2.0, 0.15).unwrap();
        assert!((half - dt / 2.0).abs() < 1e-18);
        let sym = cfl_timestep(&nf, &g, -1.0, 1.0, 0.4).unwrap();
        assert!((sym - 0.4 / 32.0).abs() < 1e-18);
        assert!(matches!(
            cfl_timestep(&nf, &g, 0.0, 0.0, 0.3),
            Err(Error::NoWaveSpeed { .. })
        ));
        assert!(cfl_timestep(&nf, &g, 0.0, 1.0, 1.5).is_err());
    }

    #[test]
    fn lax_friedrichs_linearization_closed_form() {
        let lambda = 0.15;
        let nf = burgers(Scheme::LaxFriedrichs).with_lambda(lambda);
        let g = Grid::new(0.0, 0.1, 3).unwrap();
        let u = GridFunction::new(g, vec![2.0, 1.5, 0.5], 2.0, 0.0).unwrap();
        let v = GridFunction::new(g, vec![1.8, 1.0, 0.2], 2.0, 0.0).unwrap();
        let lin = linearization_coefficients(&nf, &u, &v).unwrap();
        // a[j] = A_{j-1}, b[j] = B_j
        for i in 0..3 {
            let (ui, vi) = (u.values()[i], v.values()[i]);
            let a = 0.5 * ((ui + vi) / 2.0 + 1.0 / lambda);
            let b = 0.5 * ((ui + vi) / 2.0 - 1.0 / lambda);
            assert!((lin.a[i + 1] - a).abs() < 1e-14);
            assert!((lin.b[i] - b).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_path_uses_pointwise_partials() {
        let g = Grid::new(0.0, 0.1, 4).unwrap();
        let u = GridFunction::new(g, vec![1.0, 0.6, -0.2, -1.0], 1.0, -1.0).unwrap();
        for scheme in Scheme::ALL {
            let nf = burgers(scheme).with_lambda(0.25);
            let lin = linearization_coefficients(&nf, &u, &u).unwrap();
            let ext = [1.0, 1.0, 0.6, -0.2, -1.0, -1.0];
            for j in 0..=4 {
                let (pa, pb) = nf.partials(ext[j], ext[j + 1]).unwrap();
                assert!((lin.a[j] - pa).abs() < 1e-14, "{scheme} A at {j}");
                assert!((lin.b[j] - pb).abs() < 1e-14, "{scheme} B at {j}");
            }
        }
    }

    #[test]
    fn condition_checks() {
        let zeros = [0.0; 4];
        assert!(check_contractivity_conditions(&zeros, &zeros, 0.3).satisfied);
        let r = check_contractivity_conditions(&[1.0, 2.0], &[0.0, 0.0], 0.1);
        assert!(!r.satisfied);
        let v = r.first_violation.unwrap();
        assert_eq!((v.index, v.kind), (1, ConditionKind::IncreasingA));
        let r = check_contractivity_conditions(&[3.0], &[-3.0], 0.2);
        assert_eq!(r.first_violation.unwrap().kind, ConditionKind::Courant);
        let r = check_contractivity_conditions(&[0.0, 0.0], &[-1.0, -0.5], 0.2);
        assert_eq!(r.first_violation.unwrap().kind, ConditionKind::IncreasingB);
    }

    #[test]
    fn scheme_names_parse() {
        for s in Scheme::ALL {
            assert_eq!(s.short_name().parse::<Scheme>().unwrap(), s);
        }
        assert!("roe".parse::<Scheme>().is_err());
    }
}
