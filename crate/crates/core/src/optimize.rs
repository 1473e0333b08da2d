//! One-dimensional searches used by the analysis and finite-time modules.

use serde::Serialize;

/// Result of a bracketed scalar search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
    /// Final bracket width relative to `|x|` (absolute when `x == 0`).
    pub residual: f64,
    pub converged: bool,
    /// Optimum sits on an end of the search interval.
    pub at_boundary: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_ITER: usize = 500;

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> Optimum {
    let (lo, hi) = (a, b);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    let width = |a: f64, b: f64| {
        let m = 0.5 * (a + b);
        if m == 0.0 {
            (b - a).abs()
        } else {
            (b - a).abs() / m.abs()
        }
    };
    while width(a, b) > rel_tol && iterations < MAX_ITER {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        iterations += 1;
    }
    let (x, value) = if fc < fd { (c, fc) } else { (d, fd) };
    let residual = width(a, b);
    let span = hi - lo;
    Optimum {
        x,
        value,
        iterations,
        residual,
        converged: residual <= rel_tol,
        at_boundary: (x - lo).abs() <= 1e-6 * span || (hi - x).abs() <= 1e-6 * span,
    }
}

/// Golden-section maximization.
pub fn golden_section_max(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Optimum {
    let mut o = golden_section_min(|x| -f(x), a, b, rel_tol);
    o.value = -o.value;
    o
}

/// Maximizes `f` on `[a, b]`: scans `grid` equally spaced points (in `log`
/// space when requested), then refines by golden section inside the two
/// cells adjacent to the best grid point.
pub fn grid_then_golden_max(f: impl Fn(f64) -> f64, a: f64, b: f64, grid: usize, log: bool, rel_tol: f64) -> Optimum {
    let grid = grid.max(3);
    let (ta, tb) = if log { (a.ln(), b.ln()) } else { (a, b) };
    let to_x = |t: f64| if log { t.exp() } else { t };
    let node = |i: usize| ta + (tb - ta) * i as f64 / (grid - 1) as f64;
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..grid {
        let v = f(to_x(node(i)));
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let lo = node(best.saturating_sub(1));
    let hi = node((best + 1).min(grid - 1));
    let mut o = golden_section_max(|t| f(to_x(t)), lo, hi, rel_tol);
    o.x = to_x(o.x);
    if o.value < best_val {
        o.x = to_x(node(best));
        o.value = best_val;
    }
    let span = (b - a).abs();
    o.at_boundary = (o.x - a).abs() <= 1e-6 * span || (b - o.x).abs() <= 1e-6 * span;
    o
}

/// Minimizes `f` on `[a, b]` after a grid prescan; see [`grid_then_golden_max`].
pub fn grid_then_golden_min(f: impl Fn(f64) -> f64, a: f64, b: f64, grid: usize, log: bool, rel_tol: f64) -> Optimum {
    let mut o = grid_then_golden_max(|x| -f(x), a, b, grid, log, rel_tol);
    o.value = -o.value;
    o
}

/// Root of `f` on `[a, b]` by bisection; `None` without a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, abs_tol: f64) -> Option<f64> {
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= abs_tol || m == a || m == b {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}
