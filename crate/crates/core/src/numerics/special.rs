//! Laguerre polynomials and the real branches of the Lambert W function.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// Laguerre polynomial `L_n(x)` by the three-term recurrence.
pub fn laguerre(n: usize, x: f64) -> f64 {
    laguerre_assoc(n, 0, x)
}

/// Generalized Laguerre polynomial `L_n^{(k)}(x)`.
pub fn laguerre_assoc(n: usize, k: usize, x: f64) -> f64 {
    let k = k as f64;
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut curr = 1.0 + k - x;
    for m in 1..n {
        let m = m as f64;
        let next = ((2.0 * m + 1.0 + k - x) * curr - (m + k) * prev) / (m + 1.0);
        prev = curr;
        curr = next;
    }
    curr
}

/// All of `L_0^{(k)}(x), ..., L_{n_max}^{(k)}(x)` from one pass of the recurrence.
pub fn laguerre_assoc_seq(n_max: usize, k: usize, x: f64) -> Vec<f64> {
    let kf = k as f64;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(1.0 + kf - x);
    for m in 1..n_max {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + kf - x) * out[m] - (mf + kf) * out[m - 1]) / (mf + 1.0);
        out.push(next);
    }
    out
}

/// `ln(n!)` by direct summation; exact enough for the small `n` used with Fock cutoffs.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|j| (j as f64).ln()).sum()
}

/// Real branches of the Lambert W function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LambertBranch {
    /// `W_0`, with `W >= -1`.
    Principal,
    /// `W_{-1}`, with `W <= -1`, defined on `[-1/e, 0)`.
    MinusOne,
}

const BRANCH_SLACK: f64 = 8.0 * f64::EPSILON;
const HALLEY_MAX_ITER: usize = 64;

/// Solves `w * exp(w) = x` on the requested branch.
///
/// Arguments below `-1/e` by no more than a few ulps are snapped onto the
/// branch point.
pub fn lambert_w(branch: LambertBranch, x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("lambert_w of NaN".into()));
    }
    lambert_w_impl(branch, x, E.mul_add(x, 1.0))
}

/// Lambert W evaluated from the branch-point offset `q = 1 + e*x`.
///
/// Near `x = -1/e` the offset carries far more relative precision than `x`
/// itself, so callers that can form `q` without cancellation should use this.
pub fn lambert_w_from_offset(branch: LambertBranch, q: f64) -> Result<f64> {
    if q.is_nan() {
        return Err(Error::Domain("lambert_w of NaN offset".into()));
    }
    lambert_w_impl(branch, (q - 1.0) / E, q)
}

fn lambert_w_impl(branch: LambertBranch, x: f64, q: f64) -> Result<f64> {
    if q < 0.0 {
        if q < -BRANCH_SLACK {
            return Err(Error::Domain(format!("lambert_w argument {x:e} is below -1/e")));
        }
        return Ok(-1.0);
    }
    if q == 0.0 {
        return Ok(-1.0);
    }
    match branch {
        LambertBranch::Principal => {
            if x == 0.0 {
                return Ok(0.0);
            }
            if x.is_infinite() {
                return Ok(f64::INFINITY);
            }
        }
        LambertBranch::MinusOne => {
            if x >= 0.0 {
                return Err(Error::Domain(format!("lambert_w minus-one branch needs x < 0, got {x:e}")));
            }
        }
    }

    let sign = match branch {
        LambertBranch::Principal => 1.0,
        LambertBranch::MinusOne => -1.0,
    };

    if q < 0.5 {
        let p = sign * (2.0 * q).sqrt();
        let seed = branch_point_series(p);
        if p.abs() < 1e-3 {
            // series truncation error ~p^8, below one ulp of -1
            return Ok(seed);
        }
        return Ok(halley(seed, x));
    }

    let seed = match branch {
        LambertBranch::Principal => {
            if x <= E {
                x / (1.0 + x)
            } else {
                let l1 = x.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
        }
        LambertBranch::MinusOne => {
            let l1 = (-x).ln();
            let l2 = (-l1).ln();
            l1 - l2 + l2 / l1
        }
    };
    Ok(halley(seed, x))
}

/// `1 + W₀(x)` from the branch-point offset `q = 1 + e·x`, keeping full
/// relative precision as `q → 0` where `W₀ → −1`.
pub fn lambert_w0_plus_one(q: f64) -> Result<f64> {
    if q.is_nan() {
        return Err(Error::Domain("lambert_w of NaN offset".into()));
    }
    if q >= 0.5 {
        return Ok(1.0 + lambert_w_from_offset(LambertBranch::Principal, q)?);
    }
    if q < 0.0 {
        if q < -BRANCH_SLACK {
            return Err(Error::Domain(format!("lambert_w offset {q:e} is below the branch point")));
        }
        return Ok(0.0);
    }
    // y = 1 + W solves f(y) = (y − 1)e^y + 1 = q, f(y) = Σ_{k≥2} (k−1)y^k/k!
    let p = (2.0 * q).sqrt();
    let mut y = branch_point_series(p) + 1.0;
    if p < 1e-3 {
        y = p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
    }
    for _ in 0..HALLEY_MAX_ITER {
        let mut term = y;
        let mut f = 0.0;
        for k in 2..40 {
            term *= y / k as f64;
            f += (k - 1) as f64 * term;
            if term < 1e-18 * f {
                break;
            }
        }
        let step = (f - q) / (y * y.exp());
        y -= step;
        if step.abs() <= 2.0 * f64::EPSILON * y {
            break;
        }
    }
    Ok(y)
}

/// Expansion of W about the branch point in `p = ±sqrt(2(1 + e x))`.
fn branch_point_series(p: f64) -> f64 {
    const C: [f64; 8] =
        [-1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0, 769.0 / 17280.0, -221.0 / 8505.0, 680863.0 / 43545600.0];
    C.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

fn halley(mut w: f64, x: f64) -> f64 {
    for _ in 0..HALLEY_MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            break;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if denom == 0.0 || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * w.abs().max(1e-300) {
            break;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn exact_laguerre(n: usize, x: f64) -> f64 {
        match n {
            0 => 1.0,
            1 => 1.0 - x,
            2 => (x * x - 4.0 * x + 2.0) / 2.0,
            3 => (-x.powi(3) + 9.0 * x * x - 18.0 * x + 6.0) / 6.0,
            4 => (x.powi(4) - 16.0 * x.powi(3) + 72.0 * x * x - 96.0 * x + 24.0) / 24.0,
            _ => unreachable!(),
        }
    }

    #[test]
    fn laguerre_examples() {
        assert_eq!(laguerre(0, 3.7), 1.0);
        assert_eq!(laguerre(1, 2.0), -1.0);
        assert_relative_eq!(laguerre(2, 1.0), -0.5, epsilon = 1e-15);
    }

    #[test]
    fn laguerre_matches_closed_forms() {
        for n in 0..=4 {
            for x in [0.0, 1.0, 2.0] {
                assert!((laguerre(n, x) - exact_laguerre(n, x)).abs() < 1e-13, "n={n} x={x}");
            }
        }
    }

    #[test]
    fn assoc_laguerre_examples() {
        assert_eq!(laguerre_assoc(0, 5, 1.2), 1.0);
        assert_eq!(laguerre_assoc(1, 1, 0.0), 2.0);
        // (k+1)(k+2)/2 - (k+2)x + x^2/2 at k = 1, x = 1 is 3 - 3 + 1/2
        assert_relative_eq!(laguerre_assoc(2, 1, 1.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn assoc_sequence_agrees_with_scalar() {
        let seq = laguerre_assoc_seq(12, 3, 4.5);
        for (n, v) in seq.iter().enumerate() {
            assert_relative_eq!(*v, laguerre_assoc(n, 3, 4.5), max_relative = 1e-14);
        }
    }

    #[test]
    fn lambert_examples() {
        assert_eq!(lambert_w(LambertBranch::Principal, 0.0).unwrap(), 0.0);
        assert_relative_eq!(lambert_w(LambertBranch::Principal, E).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(lambert_w(LambertBranch::MinusOne, -1.0 / E).unwrap(), -1.0, epsilon = 1e-7);
        assert_eq!(lambert_w_from_offset(LambertBranch::MinusOne, 0.0).unwrap(), -1.0);
    }

    #[test]
    fn lambert_rejects_outside_domain() {
        assert!(matches!(lambert_w(LambertBranch::Principal, -0.5), Err(Error::Domain(_))));
        assert!(matches!(lambert_w(LambertBranch::MinusOne, 0.3), Err(Error::Domain(_))));
        assert!(lambert_w(LambertBranch::MinusOne, 0.0).is_err());
    }

    #[test]
    fn lambert_branches_are_distinct() {
        let x = -0.2;
        let w0 = lambert_w(LambertBranch::Principal, x).unwrap();
        let wm = lambert_w(LambertBranch::MinusOne, x).unwrap();
        assert!(w0 > -1.0 && wm < -1.0);
        assert_relative_eq!(w0 * w0.exp(), x, max_relative = 1e-14);
        assert_relative_eq!(wm * wm.exp(), x, max_relative = 1e-14);
    }

    #[test]
    fn lambert_near_branch_point_from_offset() {
        for q in [1e-14, 1e-10, 1e-6, 1e-3, 0.1, 0.4] {
            for branch in [LambertBranch::Principal, LambertBranch::MinusOne] {
                let w = lambert_w_from_offset(branch, q).unwrap();
                // 1 + e w e^w = q, checked in the offset form
                let lhs = E.mul_add(w * w.exp(), 1.0);
                assert!((lhs - q).abs() < 1e-15 + 1e-12 * q, "branch {branch:?} q={q}");
            }
        }
    }

    #[test]
    fn plus_one_keeps_precision_near_branch_point() {
        for q in [1e-300, 1e-30, 1e-12, 1e-4, 0.2, 0.49, 0.5, 3.0] {
            let y = lambert_w0_plus_one(q).unwrap();
            // (y − 1)e^y + 1 = q, expanded for small y
            let lhs: f64 = if y < 0.1 {
                (2..30).map(|k| (k - 1) as f64 * y.powi(k) / (2..=k).map(|j| j as f64).product::<f64>()).sum()
            } else {
                (y - 1.0) * y.exp() + 1.0
            };
            assert!((lhs - q).abs() <= 1e-14 * q, "q={q} y={y} lhs={lhs}");
        }
    }

    proptest::proptest! {
        #[test]
        fn lambert_principal_inverts(x in -0.3678f64..1e6) {
            let w = lambert_w(LambertBranch::Principal, x).unwrap();
            let back = w * w.exp();
            proptest::prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1e-300) + 1e-300,
                "x={} w={} back={}", x, w, back);
        }

        #[test]
        fn lambert_minus_one_inverts(x in -0.3678f64..-1e-300) {
            let w = lambert_w(LambertBranch::MinusOne, x).unwrap();
            let back = w * w.exp();
            proptest::prop_assert!((back - x).abs() <= 1e-12 * x.abs(),
                "x={} w={} back={}", x, w, back);
        }
    }
}
