//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Each panel is integrated with an `N`-point rule and again as two halves;
//! the difference is the panel's error estimate. Panels are refined by
//! bisection in a fixed left-to-right order, so the result is bit-identical
//! from run to run.

use std::sync::OnceLock;

use crate::error::{invalid, Error, Result};

const NODES: usize = 12;
const MAX_DEPTH: u32 = 40;

/// Nodes and weights on `[-1, 1]`, found by Newton iteration on `P_N`.
fn rule() -> &'static [(f64, f64); NODES] {
    static RULE: OnceLock<[(f64, f64); NODES]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NODES;
        let mut out = [(0.0, 0.0); NODES];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                // P_n(x) and P_n'(x) by the three-term recurrence
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

fn gauss(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    rule().iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Outcome of [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of per-panel `|coarse - fine|` differences.
    pub error_estimate: f64,
    pub panels: usize,
}

/// `int_a^b f` to relative tolerance `rel_tol`, starting from `initial_panels`
/// equal panels.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64, initial_panels: usize) -> Result<Quadrature> {
    if !(a.is_finite() && b.is_finite()) || b < a {
        return invalid(format!("bad integration interval [{a}, {b}]"));
    }
    if !(rel_tol > 0.0) {
        return invalid("relative tolerance must be positive");
    }
    if a == b {
        return Ok(Quadrature { value: 0.0, error_estimate: 0.0, panels: 0 });
    }
    let n0 = initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let edges: Vec<f64> = (0..=n0).map(|i| if i == n0 { b } else { a + width * i as f64 }).collect();

    // a first pass fixes the absolute target
    let rough: f64 = edges.windows(2).map(|e| gauss(&f, e[0], e[1])).sum();
    let target = rel_tol * rough.abs().max(f64::MIN_POSITIVE);

    let mut value = 0.0;
    let mut error = 0.0;
    let mut panels = 0;
    // explicit stack, right half pushed first so panels finish left to right
    let mut stack: Vec<(f64, f64, f64, u32)> = Vec::new();
    for e in edges.windows(2).rev() {
        stack.push((e[0], e[1], gauss(&f, e[0], e[1]), 0));
    }
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gauss(&f, lo, mid);
        let right = gauss(&f, mid, hi);
        let diff = (left + right - coarse).abs();
        let allowed = target * (hi - lo) / (b - a);
        if diff <= allowed || depth >= MAX_DEPTH {
            if depth >= MAX_DEPTH && diff > allowed {
                return Err(Error::Consistency(format!(
                    "quadrature failed to converge on [{lo}, {hi}] (difference {diff:e})"
                )));
            }
            value += left + right;
            error += diff;
            panels += 2;
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    if !value.is_finite() {
        return Err(Error::Consistency("quadrature produced a non-finite value".into()));
    }
    Ok(Quadrature { value, error_estimate: error, panels })
}
