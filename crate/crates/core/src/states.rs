//! The even coherent state `|α⟩ + |−α⟩` (real `α ≥ 0`) under Gaussian
//! attenuation of its characteristic function.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::ln_factorial;
use crate::phase_space::{CharFn, SOrder};

/// Even cat state with real amplitude `alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenCatState {
    alpha: f64,
}

impl EvenCatState {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParam(format!("cat amplitude must be finite and >= 0, got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `2(1 + e^{−2α²})`, the squared norm of `|α⟩ + |−α⟩`.
    pub fn norm(&self) -> f64 {
        2.0 * (1.0 + self.overlap())
    }

    /// `⟨α|−α⟩ = e^{−2α²}`.
    pub fn overlap(&self) -> f64 {
        (-2.0 * self.alpha * self.alpha).exp()
    }

    /// Fock amplitudes `⟨n|ψ⟩` for `n ≤ cutoff`; real and zero on odd `n`.
    pub fn fock_amplitudes(&self, cutoff: usize) -> Vec<Complex64> {
        (0..=cutoff).map(|n| Complex64::new(cat_pmf_exact(self, n).sqrt(), 0.0)).collect()
    }
}

/// Per-axis Gaussian damping `exp(−a_u u² − a_v v²)` of `χ(u + iv)`.
///
/// Isotropic attenuation `e^{−ν|ξ|²}` has `a_u = a_v = ν`. Dephasing in
/// position only, generated by `[X, [X, ρ]]`, damps the `u` direction alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianDamping {
    pub a_u: f64,
    pub a_v: f64,
}

impl GaussianDamping {
    pub fn new(a_u: f64, a_v: f64) -> Result<Self> {
        if !(a_u >= 0.0 && a_v >= 0.0 && a_u.is_finite() && a_v.is_finite()) {
            return Err(Error::InvalidParam(format!(
                "damping coefficients must be finite and >= 0, got ({a_u}, {a_v})"
            )));
        }
        Ok(Self { a_u, a_v })
    }

    pub fn isotropic(nu: f64) -> Result<Self> {
        Self::new(nu, nu)
    }

    /// Damping `e^{−2N u²}` left by position dephasing with exponent `N`.
    pub fn position_dephasing(n: f64) -> Result<Self> {
        Self::new(2.0 * n, 0.0)
    }
}

/// Characteristic function of an attenuated even cat.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttenuatedCat {
    pub state: EvenCatState,
    pub damping: GaussianDamping,
}

impl AttenuatedCat {
    pub fn new(state: EvenCatState, damping: GaussianDamping) -> Self {
        Self { state, damping }
    }

    pub fn isotropic(state: EvenCatState, nu: f64) -> Result<Self> {
        Ok(Self::new(state, GaussianDamping::isotropic(nu)?))
    }

    /// Real value of `χ(u + iv, s)`.
    pub fn value(&self, u: f64, v: f64, s: f64) -> f64 {
        let a = self.state.alpha;
        let gauss = 0.5 * (s - 1.0) * (u * u + v * v) - self.damping.a_u * u * u - self.damping.a_v * v * v;
        let two_a_u = 2.0 * a * u;
        // e^{−2α²} cosh(2αu) times the Gaussian, formed in log space
        let cross = 0.5 * ((gauss + two_a_u - 2.0 * a * a).exp() + (gauss - two_a_u - 2.0 * a * a).exp());
        (gauss.exp() * (2.0 * a * v).cos() + cross) / (1.0 + self.state.overlap())
    }
}

impl CharFn for AttenuatedCat {
    fn eval(&self, u: f64, v: f64, s: SOrder) -> Complex64 {
        Complex64::new(self.value(u, v, s.value()), 0.0)
    }

    fn decay_rate(&self, s: SOrder) -> Option<f64> {
        let c = 0.5 * (1.0 - s.value()) + self.damping.a_u.min(self.damping.a_v);
        (c > 0.0).then_some(c)
    }

    fn growth(&self) -> f64 {
        2.0 * self.state.alpha
    }
}

/// `χ(u + iv, s)` of the cat after isotropic attenuation `e^{−ν|ξ|²}`:
/// `e^{(s−1)|ξ|²/2 − ν|ξ|²}[cos 2αv + e^{−2α²} cosh 2αu]/(1 + e^{−2α²})`.
pub fn even_cat_chi(state: &EvenCatState, nu: f64, s: SOrder, u: f64, v: f64) -> f64 {
    AttenuatedCat { state: *state, damping: GaussianDamping { a_u: nu, a_v: nu } }.value(u, v, s.value())
}

/// The two coherent peaks and the interference term of the Wigner function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerComponents {
    pub w_plus: f64,
    pub w_minus: f64,
    pub w_interf: f64,
}

impl WignerComponents {
    pub fn total(&self) -> f64 {
        self.w_plus + self.w_minus + self.w_interf
    }
}

/// Exact Wigner components at `β = x + iy` under general Gaussian damping.
///
/// With `A_u = 1/2 + a_u`, `A_v = 1/2 + a_v` and `C = 1/(2(1 + e^{−2α²}))`:
/// `W± = C/(π√(A_u A_v)) e^{−y²/A_u − (x∓α)²/A_v}` and
/// `W_I = 2C F/(π√(A_u A_v)) e^{−y²/A_u − x²/A_v} cos(2αy/A_u)` with
/// `F = e^{−2α²(1 − 1/(2A_u))}`.
pub fn wigner_components(
    state: &EvenCatState,
    damping: GaussianDamping,
    re_beta: f64,
    im_beta: f64,
) -> WignerComponents {
    let a = state.alpha;
    let au = 0.5 + damping.a_u;
    let av = 0.5 + damping.a_v;
    let c = 1.0 / state.norm();
    let pref = c / (PI * (au * av).sqrt());
    let y_part = -im_beta * im_beta / au;
    let w_plus = pref * (y_part - (re_beta - a).powi(2) / av).exp();
    let w_minus = pref * (y_part - (re_beta + a).powi(2) / av).exp();
    let f = fringe_factor(a, au);
    let w_interf = 2.0 * pref * f * (y_part - re_beta * re_beta / av).exp() * (2.0 * a * im_beta / au).cos();
    WignerComponents { w_plus, w_minus, w_interf }
}

fn fringe_factor(alpha: f64, au: f64) -> f64 {
    // 1 − 1/(2A_u) = (2A_u − 1)/(2A_u), exact at A_u = 1/2
    (-2.0 * alpha * alpha * (2.0 * au - 1.0) / (2.0 * au)).exp()
}

/// Wigner components after position dephasing with exponent `N`, whose
/// prefactor is `C/(π√(N + 1/4))` and fringe cosine `cos(2α Im β/(2N + 1/2))`.
pub fn wigner_closed_form(state: &EvenCatState, n: f64, re_beta: f64, im_beta: f64) -> Result<WignerComponents> {
    Ok(wigner_components(state, GaussianDamping::position_dephasing(n)?, re_beta, im_beta))
}

/// Isotropic-attenuation counterpart of [`wigner_closed_form`].
pub fn wigner_isotropic(state: &EvenCatState, nu: f64, re_beta: f64, im_beta: f64) -> Result<WignerComponents> {
    Ok(wigner_components(state, GaussianDamping::isotropic(nu)?, re_beta, im_beta))
}

/// `F(α, N) = exp[−2α²(1 − 1/(1 + 4N))]` for position dephasing.
pub fn fringe_visibility(state: &EvenCatState, n: f64) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(Error::InvalidParam(format!("attenuation exponent must be >= 0, got {n}")));
    }
    let a2 = state.alpha * state.alpha;
    Ok((-2.0 * a2 * (4.0 * n) / (1.0 + 4.0 * n)).exp())
}

/// Fringe visibility under any damping, `exp[−2α²(1 − 1/(1 + 2a_u))]`.
pub fn fringe_visibility_for(state: &EvenCatState, damping: GaussianDamping) -> f64 {
    fringe_factor(state.alpha, 0.5 + damping.a_u)
}

/// Fringe visibility from peak heights,
/// `W_I(0, 0) / (2√(W^{+α}(α, 0) W^{−α}(−α, 0)))`.
pub fn fringe_visibility_from_peaks(state: &EvenCatState, damping: GaussianDamping) -> f64 {
    let a = state.alpha;
    let at_origin = wigner_components(state, damping, 0.0, 0.0);
    let at_plus = wigner_components(state, damping, a, 0.0);
    let at_minus = wigner_components(state, damping, -a, 0.0);
    at_origin.w_interf / (2.0 * (at_plus.w_plus * at_minus.w_minus).sqrt())
}

/// Photon-number distribution of the unattenuated cat,
/// `p(n) = 2 e^{−α²} α^{2n} / (n!(1 + e^{−2α²}))` on even `n`, zero on odd.
pub fn cat_pmf_exact(state: &EvenCatState, n: usize) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let a = state.alpha;
    if a == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let ln_p = std::f64::consts::LN_2 - a * a + 2.0 * n as f64 * a.ln() - ln_factorial(n) - state.overlap().ln_1p();
    ln_p.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cat(a: f64) -> EvenCatState {
        EvenCatState::new(a).unwrap()
    }

    #[test]
    fn chi_is_normalized() {
        for a in [0.0, 0.7, 2.5] {
            for nu in [0.0, 0.3] {
                for s in [-1.0, 0.0, 1.0] {
                    assert_eq!(even_cat_chi(&cat(a), nu, SOrder::new(s).unwrap(), 0.0, 0.0), 1.0);
                }
            }
        }
    }

    #[test]
    fn vacuum_limit() {
        let v = even_cat_chi(&cat(0.0), 0.0, SOrder::SYMMETRIC, 0.6, -1.1);
        assert_relative_eq!(v, (-0.5f64 * (0.36 + 1.21)).exp(), max_relative = 1e-15);
    }

    #[test]
    fn chi_matches_coherent_overlaps() {
        // χ(ξ,1) = Σ_{a,b=±α} ⟨a|D(ξ)|b⟩ e^{|ξ|²/2} / norm, from
        // ⟨a|D(ξ)|b⟩ = exp(−|ξ|²/2 + ξ a* − ξ* b − |a|²/2 − |b|²/2 + a* b)
        let alpha = 1.0;
        let state = cat(alpha);
        for (u, v) in [(1.0, 0.0), (0.3, -0.8), (-1.2, 0.4)] {
            let xi = Complex64::new(u, v);
            let mut sum = Complex64::default();
            for a in [alpha, -alpha] {
                for b in [alpha, -alpha] {
                    let e = -0.5 * xi.norm_sqr() + xi * a - xi.conj() * b - 0.5 * a * a - 0.5 * b * b + a * b;
                    sum += e.exp();
                }
            }
            let expected = sum * (0.5 * xi.norm_sqr()).exp() / state.norm();
            assert!(expected.im.abs() < 1e-14);
            assert_relative_eq!(even_cat_chi(&state, 0.0, SOrder::NORMAL, u, v), expected.re, max_relative = 1e-13);
        }
        let at_one = (1.0 + (-2.0f64).exp() * 2.0f64.cosh()) / (1.0 + (-2.0f64).exp());
        assert_relative_eq!(even_cat_chi(&state, 0.0, SOrder::NORMAL, 1.0, 0.0), at_one, max_relative = 1e-14);
    }

    #[test]
    fn separated_peaks() {
        let w = wigner_closed_form(&cat(2.0), 0.0, 2.0, 0.0).unwrap();
        assert!(w.w_plus > 1e10 * w.w_minus);
        assert_relative_eq!(w.w_minus / w.w_plus, (-32.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn pure_state_has_full_fringe_visibility() {
        let state = cat(2.0);
        let d = GaussianDamping::position_dephasing(0.0).unwrap();
        assert_relative_eq!(fringe_visibility_from_peaks(&state, d), 1.0, epsilon = 1e-14);
        assert_eq!(fringe_visibility(&state, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn fringe_examples() {
        assert_relative_eq!(fringe_visibility(&cat(1.0), 0.25).unwrap(), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(fringe_visibility(&cat(1.3), 1e12).unwrap(), (-2.0 * 1.69f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn fringe_identity_holds() {
        for a in [0.5, 1.0, 2.0, 3.0] {
            for n in [0.0, 0.1, 0.5, 1.0] {
                let state = cat(a);
                let d = GaussianDamping::position_dephasing(n).unwrap();
                let lhs = fringe_visibility(&state, n).unwrap();
                let rhs = fringe_visibility_from_peaks(&state, d);
                assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1e-300) + 1e-300, "a={a} n={n}");
            }
        }
    }

    #[test]
    fn fringe_decreases_with_dephasing() {
        let state = cat(1.5);
        let mut prev = 1.0;
        for k in 1..50 {
            let f = fringe_visibility(&state, 0.05 * k as f64).unwrap();
            assert!(f < prev);
            prev = f;
        }
    }

    #[test]
    fn pmf_examples() {
        assert_eq!(cat_pmf_exact(&cat(0.0), 0), 1.0);
        assert_eq!(cat_pmf_exact(&cat(1.7), 3), 0.0);
        let e = (-1.0f64).exp();
        let norm = 1.0 + (-2.0f64).exp();
        assert_relative_eq!(cat_pmf_exact(&cat(1.0), 0), 2.0 * e / norm, max_relative = 1e-14);
        assert_relative_eq!(cat_pmf_exact(&cat(1.0), 2), e / norm, max_relative = 1e-14);
    }

    #[test]
    fn pmf_sums_to_one() {
        for a in [0.3, 1.0, 2.0, 3.0] {
            let s: f64 = (0..120).map(|n| cat_pmf_exact(&cat(a), n)).sum();
            assert_relative_eq!(s, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn vacuum_wigner() {
        let w = wigner_isotropic(&cat(0.0), 0.0, 0.3, 0.2).unwrap();
        assert_relative_eq!(w.total(), 2.0 / PI * (-2.0f64 * 0.13).exp(), max_relative = 1e-14);
    }

    #[test]
    fn invalid_inputs() {
        assert!(EvenCatState::new(-1.0).is_err());
        assert!(EvenCatState::new(f64::NAN).is_err());
        assert!(GaussianDamping::isotropic(-0.1).is_err());
        assert!(fringe_visibility(&cat(1.0), -1.0).is_err());
    }
}
