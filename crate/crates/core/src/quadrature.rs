//! Fixed Gauss-Legendre rule used for path averages of smooth integrands.

use std::sync::OnceLock;

pub(crate) const GAUSS_POINTS: usize = 16;

/// Nodes and weights of the 16-point Gauss-Legendre rule on `[0, 1]`.
pub(crate) fn gauss_legendre_16() -> &'static [(f64, f64); GAUSS_POINTS] {
    static RULE: OnceLock<[(f64, f64); GAUSS_POINTS]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_POINTS;
        let mut rule = [(0.0, 0.0); GAUSS_POINTS];
        for (k, node) in rule.iter_mut().enumerate() {
            // Newton on P_n starting from the Chebyshev-like guess.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=n {
                    let j = j as f64;
                    let p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            *node = (0.5 * (1.0 - x), 0.5 * w);
        }
        rule
    })
}

/// `integral_0^1 g(s) ds` with the 16-point rule.
pub(crate) fn integrate_unit(g: impl Fn(f64) -> f64) -> f64 {
    gauss_legendre_16().iter().map(|&(s, w)| w * g(s)).sum()
}
