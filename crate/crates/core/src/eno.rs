//! ENO reconstruction of interface values from cell averages.

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Weights producing the value at `x_{i+1/2}` from the stencil starting at
/// cell `i - r`.
const RIGHT_WEIGHTS_2: [[f64; 2]; 2] = [[0.5, 0.5], [-0.5, 1.5]];
const RIGHT_WEIGHTS_3: [[f64; 3]; 3] = [
    [1.0 / 3.0, 5.0 / 6.0, -1.0 / 6.0],
    [-1.0 / 6.0, 5.0 / 6.0, 1.0 / 3.0],
    [1.0 / 3.0, -7.0 / 6.0, 11.0 / 6.0],
];

fn right_weights(order: usize, r: usize) -> &'static [f64] {
    match order {
        2 => &RIGHT_WEIGHTS_2[r],
        _ => &RIGHT_WEIGHTS_3[r],
    }
}

/// Weights for `x_{i-1/2}` with shift `r`: the `x_{i+1/2}` weights of shift
/// `r - 1`; shift `-1` extrapolates from the cells on the right.
fn left_weights(order: usize, r: usize) -> &'static [f64] {
    match (order, r) {
        (2, 0) => &[1.5, -0.5],
        (3, 0) => &[11.0 / 6.0, -7.0 / 6.0, 1.0 / 3.0],
        _ => right_weights(order, r - 1),
    }
}

/// `k`-th undivided difference of `u[s..=s+k]`.
fn undivided(u: &[f64], s: usize, k: usize) -> f64 {
    match k {
        1 => u[s + 1] - u[s],
        2 => u[s + 2] - 2.0 * u[s + 1] + u[s],
        _ => unreachable!("ENO order is at most 3"),
    }
}

/// Left shift of the ENO stencil for cell `i` of the extended array.
fn stencil_shift(u: &[f64], i: usize, order: usize) -> usize {
    let mut r = 0;
    for k in 1..order {
        let s = i - r;
        let left = undivided(u, s - 1, k).abs();
        let right = undivided(u, s, k).abs();
        if left <= right {
            r += 1;
        }
    }
    r
}

/// Reconstructs `(u^-, u^+)` at the interfaces of an extended array that
/// carries `order` ghost cells on each side.
///
/// The result has `ext.len() - 2 * order + 1` entries; entry `j` is the
/// interface on the left of the `j`-th non-ghost cell.
pub(crate) fn reconstruct_extended(ext: &[f64], order: usize, out: &mut Vec<(f64, f64)>) {
    let g = order;
    let n = ext.len() - 2 * g;
    out.clear();
    out.reserve(n + 1);
    let dot = |w: &[f64], s: usize| -> f64 { w.iter().zip(&ext[s..]).map(|(a, b)| a * b).sum() };
    let mut prev_right = {
        let i = g - 1;
        let r = stencil_shift(ext, i, order);
        dot(right_weights(order, r), i - r)
    };
    for i in g..g + n + 1 {
        let r = stencil_shift(ext, i, order);
        let minus_side = dot(left_weights(order, r), i - r);
        out.push((prev_right, minus_side));
        if i < g + n {
            prev_right = dot(right_weights(order, r), i - r);
        }
    }
}

/// Interface values `(u^-_{j-1/2}, u^+_{j-1/2})` for `j = 0..=n`, with ghost
/// cells filled from the far states.
pub fn eno_reconstruct(u: &GridFunction, order: usize) -> Result<Vec<(f64, f64)>> {
    if !(order == 2 || order == 3) {
        return Err(Error::Config(format!(
            "ENO order must be 2 or 3, got {order}"
        )));
    }
    let ext = extend(u, order);
    let mut out = Vec::new();
    reconstruct_extended(&ext, order, &mut out);
    Ok(out)
}

/// Values with `width` constant ghost cells from the far states.
pub(crate) fn extend(u: &GridFunction, width: usize) -> Vec<f64> {
    let mut ext = Vec::with_capacity(u.values().len() + 2 * width);
    ext.extend(std::iter::repeat_n(u.far_left(), width));
    ext.extend_from_slice(u.values());
    ext.extend(std::iter::repeat_n(u.far_right(), width));
    ext
}
