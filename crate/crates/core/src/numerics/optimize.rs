//! Bracketed root finding and one-dimensional maximization.

use super::{Bracket, Tolerance};
use crate::error::{Error, Result};

/// Root of `f` inside `bracket`.
///
/// Regula falsi with the Illinois modification; every third step that fails
/// to halve the bracket is replaced by a bisection, so the worst case is
/// within a constant factor of plain bisection. Stops when the bracket is
/// narrower than `tol.target(x)` or `f` is exactly zero.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, bracket: Bracket, tol: Tolerance) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo(), bracket.hi());
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Domain(format!("function is NaN at the bracket [{a}, {b}]")));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoSignChange { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }

    let mut side = 0i8;
    let mut slow_steps = 0;
    let mut evals = 2;
    while evals < tol.max_evals {
        let width = b - a;
        let mid = 0.5 * (a + b);
        if width <= 2.0 * tol.target(mid) || mid <= a || mid >= b {
            return Ok(mid);
        }
        let x = if slow_steps >= 2 {
            slow_steps = 0;
            mid
        } else {
            let s = (a * fb - b * fa) / (fb - fa);
            if s > a && s < b {
                s
            } else {
                mid
            }
        };
        let fx = f(x);
        evals += 1;
        if fx.is_nan() {
            return Err(Error::Domain(format!("function is NaN at {x}")));
        }
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = fx;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
        if b - a > 0.5 * width {
            slow_steps += 1;
        } else {
            slow_steps = 0;
        }
    }
    Err(Error::Convergence { evals, estimate: b - a, target: tol.target(0.5 * (a + b)) })
}

/// Location and value of a maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
}

const GRID_POINTS: usize = 64;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximum of `f` on `bracket`.
///
/// A uniform grid picks the best cell, then golden-section search refines
/// inside the two neighboring cells. Endpoint maxima are returned as such.
pub fn maximize_1d<F: FnMut(f64) -> f64>(mut f: F, bracket: Bracket, tol: Tolerance) -> Maximum {
    let (lo, hi) = (bracket.lo(), bracket.hi());
    let step = bracket.width() / GRID_POINTS as f64;
    let mut best = Maximum { arg: lo, value: f(lo) };
    let mut best_i = 0;
    for i in 1..=GRID_POINTS {
        let x = if i == GRID_POINTS { hi } else { lo + step * i as f64 };
        let y = f(x);
        if y > best.value || best.value.is_nan() {
            best = Maximum { arg: x, value: y };
            best_i = i;
        }
    }

    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = GRID_POINTS + 3;
    while b - a > tol.target(0.5 * (a + b)) && evals < tol.max_evals {
        if fc >= fd {
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
        evals += 1;
        if c >= d {
            break;
        }
    }
    for (x, y) in [(c, fc), (d, fd)] {
        if y > best.value {
            best = Maximum { arg: x, value: y };
        }
    }
    best
}
