//! Exact W1, discrete W1, L1 and DLip computations.

use std::borrow::Cow;

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::step::StepFunction;

/// Anything that is exactly a step function on the real line.
pub trait Piecewise {
    fn as_step(&self) -> Cow<'_, StepFunction>;
}

impl Piecewise for StepFunction {
    fn as_step(&self) -> Cow<'_, StepFunction> {
        Cow::Borrowed(self)
    }
}

impl Piecewise for GridFunction {
    fn as_step(&self) -> Cow<'_, StepFunction> {
        Cow::Owned(self.to_step())
    }
}

/// Piecewise-constant difference `u - v` on merged breakpoints.
///
/// `slopes[k]` is the value on `[nodes[k], nodes[k+1])`; outside the nodes the
/// difference vanishes.
#[derive(Debug, Clone, PartialEq)]
struct Difference {
    nodes: Vec<f64>,
    slopes: Vec<f64>,
}

fn difference(u: &StepFunction, v: &StepFunction) -> Result<Difference> {
    if u.left_state() != v.left_state() || u.right_state() != v.right_state() {
        return Err(Error::FarStateMismatch {
            left_u: u.left_state(),
            left_v: v.left_state(),
            right_u: u.right_state(),
            right_v: v.right_state(),
        });
    }
    let (bu, bv) = (u.breakpoints(), v.breakpoints());
    let mut nodes = Vec::with_capacity(bu.len() + bv.len());
    let (mut i, mut j) = (0, 0);
    while i < bu.len() || j < bv.len() {
        let x = match (bu.get(i), bv.get(j)) {
            (Some(&a), Some(&b)) if a < b => {
                i += 1;
                a
            }
            (Some(&a), Some(&b)) if b < a => {
                j += 1;
                b
            }
            (Some(&a), Some(_)) => {
                i += 1;
                j += 1;
                a
            }
            (Some(&a), None) => {
                i += 1;
                a
            }
            (None, Some(&b)) => {
                j += 1;
                b
            }
            (None, None) => unreachable!(),
        };
        nodes.push(x);
    }
    // Values on [nodes[k], nodes[k+1]): plateau indices advance in lockstep.
    let (vu, vv) = (u.values(), v.values());
    let (mut i, mut j) = (0, 0);
    let mut slopes = Vec::with_capacity(nodes.len().saturating_sub(1));
    for (k, &x) in nodes.iter().enumerate() {
        if i < bu.len() && bu[i] == x {
            i += 1;
        }
        if j < bv.len() && bv[j] == x {
            j += 1;
        }
        if k + 1 < nodes.len() {
            slopes.push(vu[i] - vv[j]);
        }
    }
    Ok(Difference { nodes, slopes })
}

/// Exact W1 together with the mass defect that was tolerated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct W1Report {
    pub value: f64,
    /// `integral (u - v)`; non-zero only below the mass tolerance.
    pub mass_defect: f64,
    pub tolerance: f64,
}

/// `1e-10 * TV * span`, the admissible total mass defect.
fn w1_mass_tolerance(u: &StepFunction, v: &StepFunction, d: &Difference) -> f64 {
    let span = match (d.nodes.first(), d.nodes.last()) {
        (Some(a), Some(b)) => b - a,
        _ => 0.0,
    };
    1e-10 * (u.tv() + v.tv()) * span.max(1.0)
}

/// `integral |P|` for a piecewise-linear `P` with `P(nodes[0]) = 0`.
fn integrate_abs_primitive(d: &Difference) -> (f64, f64) {
    let mut p0 = 0.0;
    let mut acc = 0.0;
    for (w, &s) in d.nodes.windows(2).zip(&d.slopes) {
        let h = w[1] - w[0];
        let p1 = p0 + s * h;
        acc += abs_linear_integral(p0, p1, h);
        p0 = p1;
    }
    (acc, p0)
}

/// `integral_0^h |p0 + (p1 - p0) s / h| ds`.
#[inline]
fn abs_linear_integral(p0: f64, p1: f64, h: f64) -> f64 {
    if p0 * p1 >= 0.0 {
        0.5 * h * (p0.abs() + p1.abs())
    } else {
        0.5 * h * (p0 * p0 + p1 * p1) / (p0.abs() + p1.abs())
    }
}

pub fn w1_report<U: Piecewise + ?Sized, V: Piecewise + ?Sized>(u: &U, v: &V) -> Result<W1Report> {
    let (u, v) = (u.as_step(), v.as_step());
    let d = difference(&u, &v)?;
    let (value, defect) = integrate_abs_primitive(&d);
    let tolerance = w1_mass_tolerance(&u, &v, &d);
    if defect.abs() > tolerance {
        return Err(Error::MassMismatch { defect, tolerance });
    }
    Ok(W1Report {
        value,
        mass_defect: defect,
        tolerance,
    })
}

/// Wasserstein-1 distance between equal-mass step or grid functions.
pub fn w1<U: Piecewise + ?Sized, V: Piecewise + ?Sized>(u: &U, v: &V) -> Result<f64> {
    Ok(w1_report(u, v)?.value)
}

/// `integral |u - v|`.
pub fn l1_distance<U: Piecewise + ?Sized, V: Piecewise + ?Sized>(u: &U, v: &V) -> Result<f64> {
    let d = difference(&u.as_step(), &v.as_step())?;
    Ok(d.nodes
        .windows(2)
        .zip(&d.slopes)
        .map(|(w, s)| (w[1] - w[0]) * s.abs())
        .sum())
}

/// `dx^2 * sum_i |sum_{j<i} (u_j - v_j)|`.
pub fn w1_discrete(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    u.check_compatible(v)?;
    if u.far_left() != v.far_left() || u.far_right() != v.far_right() {
        return Err(Error::IncompatibleFunctions(format!(
            "far states ({}, {}) vs ({}, {})",
            u.far_left(),
            u.far_right(),
            v.far_left(),
            v.far_right()
        )));
    }
    let dx = u.grid().dx();
    let mut partial = 0.0f64;
    let mut acc = 0.0;
    for (a, b) in u.values().iter().zip(v.values()) {
        acc += partial.abs();
        partial += a - b;
    }
    let defect = dx * partial;
    let tolerance = 1e-10 * (u.tv() + v.tv()) * u.grid().span().max(1.0);
    if defect.abs() > tolerance {
        return Err(Error::MassMismatch { defect, tolerance });
    }
    Ok(dx * dx * acc)
}

/// `max_i |phi_{i+1} - phi_i| / dx` over the grid values.
pub fn dlip_norm(phi: &GridFunction) -> f64 {
    dlip_norm_of(phi.values(), phi.grid().dx())
}

pub fn dlip_norm_of(values: &[f64], dx: f64) -> f64 {
    values
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max)
        / dx
}
