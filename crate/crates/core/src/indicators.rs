//! Nonclassicality indicators of the attenuated cat and the times at which
//! each one is lost.
//!
//! Every indicator depends on time only through the attenuation exponent
//! `ν(t)`, so each loss time is the first solution of `ν(t) = ν*` for an
//! indicator-specific threshold `ν*`:
//!
//! | indicator              | threshold `ν*`                          |
//! |------------------------|-----------------------------------------|
//! | fringe visibility      | `1/(8α²)`                               |
//! | nonclassical depth     | `1`                                     |
//! | Wigner negativity      | `1/2`                                   |
//! | Vogel criterion        | `sup_{u>0} ln χ_0(u, 0, 1)/u²`          |
//! | Klyshko `B(1)`         | first zero of `B(1)` in `ν`             |

use std::f64::consts::LN_2;

use crate::channels::Attenuation;
use crate::error::{Error, Result};
use crate::numerics::{find_root, maximize_1d, Bracket, Maximum, Tolerance};
use crate::phase_space::{photon_pmf, PhaseGrid};
use crate::states::{wigner_isotropic, AttenuatedCat, EvenCatState};

/// Loss times of all indicators for one channel and amplitude, in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorTimes {
    pub channel: String,
    pub alpha: f64,
    pub tau_dec: f64,
    pub tau_p: f64,
    pub tau_w: f64,
    pub tau_v: f64,
    pub tau_k: f64,
}

impl IndicatorTimes {
    pub const CSV_HEADER: &'static str = "channel,alpha,tau_dec,tau_p,tau_w,tau_v,tau_k";

    /// One CSV row, 12 significant digits.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e},{:.11e}",
            self.channel, self.alpha, self.tau_dec, self.tau_p, self.tau_w, self.tau_v, self.tau_k
        )
    }
}

/// Attenuation exponents at which each indicator is lost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub alpha: f64,
    pub nu_dec: f64,
    pub nu_p: f64,
    pub nu_w: f64,
    pub nu_v: f64,
    pub nu_k: f64,
}

impl Thresholds {
    pub fn compute(alpha: f64, tol: Tolerance) -> Result<Self> {
        let state = positive_cat(alpha)?;
        Ok(Self {
            alpha,
            nu_dec: 1.0 / (8.0 * alpha * alpha),
            nu_p: 1.0,
            nu_w: 0.5,
            nu_v: vogel_threshold(&state, tol)?.value,
            nu_k: klyshko_threshold(&state, tol)?,
        })
    }

    pub fn times<C: Attenuation + ?Sized>(&self, channel: &C) -> Result<IndicatorTimes> {
        Ok(IndicatorTimes {
            channel: channel.label(),
            alpha: self.alpha,
            tau_dec: channel.time_at(self.nu_dec)?,
            tau_p: channel.time_at(self.nu_p)?,
            tau_w: channel.time_at(self.nu_w)?,
            tau_v: channel.time_at(self.nu_v)?,
            tau_k: channel.time_at(self.nu_k)?,
        })
    }
}

/// All five loss times for `channel`.
pub fn indicator_times<C: Attenuation + ?Sized>(alpha: f64, channel: &C, tol: Tolerance) -> Result<IndicatorTimes> {
    Thresholds::compute(alpha, tol)?.times(channel)
}

fn positive_cat(alpha: f64) -> Result<EvenCatState> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidParam(format!("indicator times need alpha > 0, got {alpha}")));
    }
    EvenCatState::new(alpha)
}

/// Fringe-visibility decoherence time under time dilation,
/// `τ_dec = 1/(2α√κ)`, and the end of its validity window `τ_dec·Δx/Δx₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceTime {
    pub tau_dec: f64,
    pub valid_until: f64,
}

pub fn tau_dec_dilation(alpha: f64, kappa: f64) -> Result<DecoherenceTime> {
    if !(alpha > 0.0 && kappa > 0.0) {
        return Err(Error::InvalidParam(format!("need alpha > 0 and kappa > 0, got {alpha}, {kappa}")));
    }
    let tau_dec = 1.0 / (2.0 * alpha * kappa.sqrt());
    // Δx/Δx₀ = 2α
    Ok(DecoherenceTime { tau_dec, valid_until: 2.0 * alpha * tau_dec })
}

/// Fringe-visibility time for any channel: `ν(τ_dec) = 1/(8α²)`, which
/// reduces to [`tau_dec_dilation`] for `ν = κt²/2`.
pub fn tau_dec<C: Attenuation + ?Sized>(alpha: f64, channel: &C) -> Result<f64> {
    positive_cat(alpha)?;
    channel.time_at(1.0 / (8.0 * alpha * alpha))
}

/// Time at which the P function has been smoothed into the Q function, `ν = 1`.
pub fn tau_p<C: Attenuation + ?Sized>(channel: &C) -> Result<f64> {
    channel.time_at(1.0)
}

/// Time at which the Wigner function becomes the initial Q function, `ν = 1/2`.
pub fn tau_w<C: Attenuation + ?Sized>(channel: &C) -> Result<f64> {
    channel.time_at(0.5)
}

/// Nonclassical depth `η(t) = 1 − ν(t)`, clipped to `[0, 1]`.
pub fn nonclassical_depth<C: Attenuation + ?Sized>(channel: &C, t: f64) -> f64 {
    (1.0 - channel.nu(t)).clamp(0.0, 1.0)
}

/// `ln sinh x` for `x > 0`.
fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1()).ln() - LN_2
}

/// `ln(1 + e^x)`.
fn softplus(x: f64) -> f64 {
    if x > 30.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln χ_0(u, 0, 1) / u²` for the unattenuated cat, where
/// `χ_0(u, 0, 1) = [1 + e^{−2α²} cosh 2αu]/(1 + e^{−2α²})`.
///
/// The attenuated normal-order function on the real axis is
/// `χ_0 e^{−νu²}`, so it exceeds 1 somewhere iff `ν` is below the supremum
/// of this ratio.
pub fn vogel_ratio(state: &EvenCatState, u: f64) -> f64 {
    let a = state.alpha();
    let w = state.overlap();
    let u = u.abs();
    if a == 0.0 {
        return 0.0;
    }
    if a * u < 1e-6 {
        // small-u limit of ln1p(2w sinh²(αu)/(1+w))/u²
        return 2.0 * a * a * w / (1.0 + w);
    }
    // χ_0 − 1 = 2w sinh²(αu)/(1 + w), formed in log space
    let ln_excess = (2.0 / (1.0 + w)).ln() - 2.0 * a * a + 2.0 * ln_sinh(a * u);
    softplus(ln_excess) / (u * u)
}

/// `χ_t(u, 0, 1) = e^{−νu²}[1 + e^{−2α²} cosh 2αu]/(1 + e^{−2α²})`.
pub fn vogel_chi(state: &EvenCatState, nu: f64, u: f64) -> f64 {
    (u * u * (vogel_ratio(state, u) - nu)).exp()
}

fn vogel_search_limit(state: &EvenCatState, nu: f64) -> f64 {
    state.alpha() + 10.0 / nu.max(0.05).sqrt()
}

/// Supremum of [`vogel_ratio`] over `u > 0`, with its location.
pub fn vogel_threshold(state: &EvenCatState, tol: Tolerance) -> Result<Maximum> {
    let hi = vogel_search_limit(state, 0.0).max(4.0 * state.alpha());
    Ok(maximize_1d(|u| vogel_ratio(state, u), Bracket::new(0.0, hi)?, tol))
}

/// `sup_u χ_t(u, 0, 1)` at attenuation `nu`; above 1 iff the Vogel test
/// detects nonclassicality.
pub fn vogel_sup(state: &EvenCatState, nu: f64, tol: Tolerance) -> Result<Maximum> {
    let hi = vogel_search_limit(state, nu);
    Ok(maximize_1d(|u| vogel_chi(state, nu, u), Bracket::new(0.0, hi)?, tol))
}

/// Vogel loss time: the first `t` with `sup_u χ_t(u, 0, 1) = 1`.
pub fn tau_v<C: Attenuation + ?Sized>(alpha: f64, channel: &C, tol: Tolerance) -> Result<f64> {
    let state = positive_cat(alpha)?;
    let nu_v = vogel_threshold(&state, tol)?.value;
    if !(nu_v > 0.0) {
        return Err(Error::NoCrossing { what: "Vogel criterion (classical at t = 0)".into(), limit: 0.0 });
    }
    channel.time_at(nu_v)
}

/// `B(n) = (n + 2)p(n)p(n + 2) − (n + 1)p(n + 1)²`; negative values
/// certify nonclassical counting statistics.
pub fn klyshko_b<P: Fn(usize) -> f64>(n: usize, pmf: P) -> f64 {
    let nf = n as f64;
    let p1 = pmf(n + 1);
    (nf + 2.0) * pmf(n) * pmf(n + 2) - (nf + 1.0) * p1 * p1
}

/// `p(0..=3)` of the cat after isotropic attenuation `nu`, by quadrature.
pub fn low_photon_pmf(state: &EvenCatState, nu: f64, tol: Tolerance) -> Result<[f64; 4]> {
    let chi = AttenuatedCat::isotropic(*state, nu)?;
    let mut p = [0.0; 4];
    for (n, slot) in p.iter_mut().enumerate() {
        *slot = photon_pmf(&chi, n, tol)?.raw;
    }
    Ok(p)
}

fn klyshko_tol(tol: Tolerance) -> Tolerance {
    Tolerance { abs: tol.abs.min(1e-12), rel: tol.rel.min(1e-10), max_evals: tol.max_evals }
}

/// `B(1)` of the cat attenuated by `nu`.
pub fn klyshko_b1_at(state: &EvenCatState, nu: f64, tol: Tolerance) -> Result<f64> {
    let p = low_photon_pmf(state, nu, klyshko_tol(tol))?;
    Ok(klyshko_b(1, |n| p[n]))
}

const SCAN_PANELS: usize = 16;

/// First root of `f` on `[0, hi]`, growing `hi` by doubling up to `limit`.
/// `f(0)` must be negative.
fn first_crossing<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut hi: f64,
    limit: f64,
    what: &str,
    tol: Tolerance,
) -> Result<f64> {
    let mut lo = 0.0;
    if !(f(0.0)? < 0.0) {
        return Err(Error::NoCrossing { what: format!("{what} (not negative at the start)"), limit: 0.0 });
    }
    loop {
        let step = (hi - lo) / SCAN_PANELS as f64;
        for i in 1..=SCAN_PANELS {
            let x = if i == SCAN_PANELS { hi } else { lo + step * i as f64 };
            let fx = f(x)?;
            if fx >= 0.0 {
                let a = x - step;
                let mut err = None;
                let root = find_root(
                    |t| match f(t) {
                        Ok(v) => v,
                        Err(e) => {
                            err.get_or_insert(e);
                            f64::NAN
                        }
                    },
                    Bracket::new(a, x)?,
                    tol,
                );
                if let Some(e) = err {
                    return Err(e);
                }
                return root;
            }
        }
        if hi >= limit {
            return Err(Error::NoCrossing { what: what.into(), limit });
        }
        lo = hi;
        hi = (2.0 * hi).min(limit);
    }
}

/// Attenuation at which `B(1)` first reaches zero.
pub fn klyshko_threshold(state: &EvenCatState, tol: Tolerance) -> Result<f64> {
    first_crossing(|nu| klyshko_b1_at(state, nu, tol), 0.5, 10.0, "Klyshko B(1)", root_tol(tol))
}

fn root_tol(tol: Tolerance) -> Tolerance {
    Tolerance { abs: 1e-300, rel: tol.rel.max(1e-14), max_evals: 10_000 }
}

/// Klyshko loss time: first root of `t ↦ B(1)` at `ν(t)`, bracketed from
/// `[0, τ_W]` and grown geometrically up to `10 τ_p`.
pub fn tau_k<C: Attenuation + ?Sized>(alpha: f64, channel: &C, tol: Tolerance) -> Result<f64> {
    let state = positive_cat(alpha)?;
    let t_w = tau_w(channel)?;
    let t_p = tau_p(channel)?;
    first_crossing(|t| klyshko_b1_at(&state, channel.nu(t), tol), t_w, 10.0 * t_p, "Klyshko B(1)", root_tol(tol))
}

/// Extremes of the Wigner function over phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativityScan {
    pub min: f64,
    pub max: f64,
    pub argmin: (f64, f64),
}

/// Minimum and maximum of the closed-form Wigner function at time `t`.
///
/// A coarse grid over the default window locates the candidate; the
/// search box is then shrunk around it until its width falls below
/// `tol.rel` relative to the window.
pub fn wigner_negativity_scan<C: Attenuation + ?Sized>(
    alpha: f64,
    channel: &C,
    t: f64,
    tol: Tolerance,
) -> Result<NegativityScan> {
    let state = EvenCatState::new(alpha)?;
    let nu = channel.nu(t);
    let w = |x: f64, y: f64| wigner_isotropic(&state, nu, x, y).map(|c| c.total()).unwrap_or(f64::NAN);
    let grid = PhaseGrid::default_for_cat(alpha, nu)?.fill(w);
    let max = grid.max();
    let (mut bx, mut by, mut best) = (0.0, 0.0, f64::INFINITY);
    for i in 0..grid.n_re() {
        for j in 0..grid.n_im() {
            if grid.get(i, j) < best {
                best = grid.get(i, j);
                bx = grid.re_at(i);
                by = grid.im_at(j);
            }
        }
    }
    let mut hx = grid.re_at(1) - grid.re_at(0);
    let mut hy = grid.im_at(1) - grid.im_at(0);
    let floor = tol.rel.max(1e-12) * hx.max(hy);
    while hx.max(hy) > floor {
        let (cx, cy) = (bx, by);
        for i in -4..=4 {
            for j in -4..=4 {
                let x = cx + hx * i as f64 / 4.0;
                let y = cy + hy * j as f64 / 4.0;
                let v = w(x, y);
                if v < best {
                    best = v;
                    bx = x;
                    by = y;
                }
            }
        }
        hx /= 4.0;
        hy /= 4.0;
    }
    Ok(NegativityScan { min: best, max, argmin: (bx, by) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::DilationChannel;
    use crate::states::cat_pmf_exact;
    use approx::assert_relative_eq;

    fn tol() -> Tolerance {
        Tolerance::new(1e-12, 1e-12, 50_000_000).unwrap()
    }

    fn cat(a: f64) -> EvenCatState {
        EvenCatState::new(a).unwrap()
    }

    #[test]
    fn dilation_closed_forms() {
        let d = tau_dec_dilation(1.0, 1.0).unwrap();
        assert_eq!(d.tau_dec, 0.5);
        assert_eq!(tau_dec_dilation(2.0, 1.0).unwrap().tau_dec, 0.25);
        assert_eq!(d.valid_until, 1.0);
        assert!(tau_dec_dilation(0.0, 1.0).is_err());
        let ch = DilationChannel::new(2.0).unwrap();
        assert_relative_eq!(tau_p(&ch).unwrap(), 1.0, max_relative = 1e-15);
        let ch = DilationChannel::new(0.5).unwrap();
        assert_relative_eq!(tau_p(&ch).unwrap(), 2.0, max_relative = 1e-15);
        let ch = DilationChannel::new(1.0).unwrap();
        assert_relative_eq!(tau_w(&ch).unwrap(), 1.0, max_relative = 1e-15);
        for a in [0.5, 1.0, 3.0] {
            assert_relative_eq!(
                tau_dec(a, &ch).unwrap(),
                tau_dec_dilation(a, 1.0).unwrap().tau_dec,
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn depth_examples() {
        let ch = DilationChannel::new(1.0).unwrap();
        assert_eq!(nonclassical_depth(&ch, 0.0), 1.0);
        assert_relative_eq!(nonclassical_depth(&ch, tau_w(&ch).unwrap()), 0.5, epsilon = 1e-15);
        assert_eq!(nonclassical_depth(&ch, 3.0), 0.0);
    }

    #[test]
    fn vogel_ratio_matches_direct_form() {
        let state = cat(1.0);
        for u in [1e-3f64, 0.3, 1.0, 2.5] {
            let w = state.overlap();
            let chi0 = (1.0 + w * (2.0 * u).cosh()) / (1.0 + w);
            assert_relative_eq!(vogel_ratio(&state, u), chi0.ln() / (u * u), max_relative = 1e-9);
        }
    }

    #[test]
    fn vogel_chi_exceeds_one_initially() {
        let state = cat(1.0);
        let m = vogel_sup(&state, 0.0, tol()).unwrap();
        assert!(m.arg > 0.0 && m.value > 1.0);
        // dense grid oracle for the location of the maximum of χ_0(u,0,1) − 1
        let nu = 0.1;
        let grid_best =
            (1..200_000).map(|i| i as f64 * 1e-4).map(|u| vogel_chi(&state, nu, u)).fold(f64::NEG_INFINITY, f64::max);
        let m = vogel_sup(&state, nu, tol()).unwrap();
        assert!(m.value >= grid_best - 1e-12 && m.value > 1.0);
    }

    #[test]
    fn vogel_time_below_wigner_time() {
        let ch = DilationChannel::new(1.0).unwrap();
        for a in [0.5, 1.0, 2.0, 4.0] {
            let tv = tau_v(a, &ch, tol()).unwrap();
            assert!(tv > 0.0 && tv < tau_w(&ch).unwrap());
        }
    }

    #[test]
    fn klyshko_examples() {
        let lam: f64 = 1.7;
        let poisson = |n: usize| (-lam).exp() * lam.powi(n as i32) / (1..=n).map(|k| k as f64).product::<f64>();
        for n in 0..6 {
            assert!(klyshko_b(n, poisson).abs() < 1e-15);
        }
        let q: f64 = 0.4;
        let thermal = |n: usize| (1.0 - q) * q.powi(n as i32);
        for n in 0..6 {
            assert!(klyshko_b(n, thermal) > 0.0);
        }
        let state = cat(1.0);
        let b = klyshko_b(1, |n| cat_pmf_exact(&state, n));
        assert_relative_eq!(b, -2.0 * cat_pmf_exact(&state, 2).powi(2), max_relative = 1e-15);
    }

    #[test]
    fn klyshko_at_zero_attenuation() {
        let state = cat(1.0);
        let b = klyshko_b1_at(&state, 0.0, tol()).unwrap();
        assert!((b + 2.0 * cat_pmf_exact(&state, 2).powi(2)).abs() < 1e-8);
    }

    #[test]
    fn negativity_scan_signs() {
        let ch = DilationChannel::new(1.0).unwrap();
        let s0 = wigner_negativity_scan(1.0, &ch, 0.0, tol()).unwrap();
        assert!(s0.min < -0.01);
        let tw = tau_w(&ch).unwrap();
        let s1 = wigner_negativity_scan(1.0, &ch, tw, tol()).unwrap();
        assert!(s1.min.abs() <= 1e-6 * s1.max);
        let s2 = wigner_negativity_scan(1.0, &ch, 2.0 * tw, tol()).unwrap();
        assert!(s2.min >= -1e-12);
    }

    #[test]
    fn csv_row_layout() {
        let t = IndicatorTimes {
            channel: "dilation".into(),
            alpha: 1.0,
            tau_dec: 0.5,
            tau_p: 1.0,
            tau_w: 0.7,
            tau_v: 0.6,
            tau_k: 0.4,
        };
        let row = t.csv_row();
        assert_eq!(row.split(',').count(), 7);
        assert!(row.starts_with("dilation,1.00000000000e0,"));
    }
}
