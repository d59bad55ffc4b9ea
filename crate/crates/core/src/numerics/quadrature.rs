//! Globally adaptive Gauss-Kronrod quadrature in one dimension, and a nested
//! tensor-product version for Gaussian-damped integrands on the plane.

use std::cell::{Cell, RefCell};

use super::Tolerance;
use crate::error::{Error, Result};

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error of `value` over the integration region.
    pub error: f64,
    /// Estimated contribution of the region outside the truncation box,
    /// assuming Gaussian decay beyond it. Zero for finite 1-D intervals.
    pub tail_bound: f64,
    pub evals: usize,
}

const INITIAL_PANELS: usize = 8;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// `∫|f|` over the panel, the scale for relative accuracy.
    l1: f64,
}

/// 21-point Kronrod rule with its embedded 10-point Gauss rule.
fn qk21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_g = 0.0;
    let mut res_k = f_center * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..5 {
        let jtw = 2 * j + 1;
        let dx = half * XGK[jtw];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        res_g += WG[j] * (f1 + f2);
        res_k += WGK[jtw] * (f1 + f2);
        res_abs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..5 {
        let jtwm1 = 2 * j;
        let dx = half * XGK[jtwm1];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        res_k += WGK[jtwm1] * (f1 + f2);
        res_abs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_half = half.abs();
    let value = res_k * half;
    res_abs *= abs_half;
    res_asc *= abs_half;

    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        let scale = (200.0 * error / res_asc).powf(1.5);
        error = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.is_finite() {
        error = f64::NAN;
    }
    Panel { a, b, value, error, l1: res_abs }
}

/// Adaptive integral of `f` over `[a, b]`.
///
/// The interval is first cut into a few panels so that narrow peaks are not
/// missed by the initial rule, then the panel with the largest error is
/// bisected until the total error meets `tol`. The relative part of the
/// target is taken against `∫|f|`, so integrands that cancel to zero still
/// terminate.
pub fn integrate_1d<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration limits must be finite: [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, tail_bound: 0.0, evals: 0 });
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let mut panels: Vec<Panel> = (0..INITIAL_PANELS)
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == INITIAL_PANELS { b } else { lo + width };
            qk21(&mut f, lo, hi)
        })
        .collect();
    let mut evals = 21 * INITIAL_PANELS;

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let l1: f64 = panels.iter().map(|p| p.l1).sum();
        if error.is_nan() {
            return Err(Error::Domain("integrand returned a non-finite value".into()));
        }
        let target = tol.target(l1);
        if error <= target {
            return Ok(QuadResult { value, error, tail_bound: 0.0, evals });
        }
        if evals + 42 > tol.max_evals {
            return Err(Error::Convergence { evals, estimate: error, target });
        }
        let (worst, _) =
            panels
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // interval exhausted at machine resolution; nothing left to refine
            return Err(Error::Convergence { evals, estimate: error, target });
        }
        panels.push(qk21(&mut f, p.a, mid));
        panels.push(qk21(&mut f, mid, p.b));
        evals += 42;
    }
}

/// Integral of `f(u, v)` over the square `[-radius, radius]^2`.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(f: F, radius: f64, tol: Tolerance) -> Result<QuadResult> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParam(format!("truncation radius must be positive, got {radius}")));
    }
    integrate_2d_box(f, (-radius, radius), (-radius, radius), tol)
}

/// Integral of `f(u, v)` over a rectangle, as an outer adaptive integral in
/// `u` of inner adaptive integrals in `v`.
pub fn integrate_2d_box<F: Fn(f64, f64) -> f64>(
    f: F,
    u_range: (f64, f64),
    v_range: (f64, f64),
    tol: Tolerance,
) -> Result<QuadResult> {
    let (u0, u1) = u_range;
    let (v0, v1) = v_range;
    let u_width = (u1 - u0).abs();
    let inner_tol = Tolerance { abs: 0.25 * tol.abs / u_width.max(1.0), rel: 0.25 * tol.rel, max_evals: tol.max_evals };
    let evals = Cell::new(0usize);
    let worst_inner = Cell::new(0.0f64);
    let failure: RefCell<Option<Error>> = RefCell::new(None);

    let outer = integrate_1d(
        |u| {
            if failure.borrow().is_some() {
                return 0.0;
            }
            let budget = Tolerance { max_evals: tol.max_evals.saturating_sub(evals.get()).max(1), ..inner_tol };
            match integrate_1d(|v| f(u, v), v0, v1, budget) {
                Ok(r) => {
                    evals.set(evals.get() + r.evals);
                    worst_inner.set(worst_inner.get().max(r.error));
                    r.value
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    0.0
                }
            }
        },
        u0,
        u1,
        Tolerance { abs: 0.5 * tol.abs, rel: 0.5 * tol.rel, max_evals: tol.max_evals },
    );
    if let Some(e) = failure.into_inner() {
        return Err(match e {
            Error::Convergence { estimate, target, .. } => Error::Convergence { evals: evals.get(), estimate, target },
            other => other,
        });
    }
    let outer = outer?;

    let half_u = 0.5 * u_width;
    let half_v = 0.5 * (v1 - v0).abs();
    let boundary = boundary_max(&f, u0, u1, v0, v1);
    let r = half_u.max(half_v);
    // Gaussian tail with the boundary at ~8 standard deviations
    let tail_bound = std::f64::consts::PI * r * r * boundary / 64.0;

    Ok(QuadResult {
        value: outer.value,
        error: outer.error + u_width * worst_inner.get(),
        tail_bound,
        evals: evals.get() + outer.evals,
    })
}

fn boundary_max<F: Fn(f64, f64) -> f64>(f: &F, u0: f64, u1: f64, v0: f64, v1: f64) -> f64 {
    const N: usize = 64;
    let mut best = 0.0f64;
    for i in 0..=N {
        let s = i as f64 / N as f64;
        let u = u0 + s * (u1 - u0);
        let v = v0 + s * (v1 - v0);
        for val in [f(u, v0), f(u, v1), f(u0, v), f(u1, v)] {
            best = best.max(val.abs());
        }
    }
    best
}

/// Truncation radius for an integrand decaying like `exp(-c |ξ|^2)`:
/// eight standard deviations, clipped to `[8, 40]`.
pub fn default_truncation_radius(min_damping: f64) -> f64 {
    if !(min_damping > 0.0) {
        return 40.0;
    }
    (8.0 / min_damping.sqrt()).clamp(8.0, 40.0)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
