//! s-ordered characteristic functions and the phase-space objects built from
//! them: quasiprobability distributions, photon statistics and Fock-basis
//! reconstruction.
//!
//! Conventions: `ξ = u + iv`, `χ(ξ, s) = Tr[ρ D(ξ)] e^{s|ξ|²/2}` with
//! `D(ξ) = exp(ξa† − ξ*a)`, and for `β = x + iy`
//! `W(β, s) = π⁻² ∫ e^{2i(yu − xv)} χ(ξ, s) du dv`.
//! The state is recovered as `ρ = π⁻¹ ∫ χ(ξ, 0) D(−ξ) d²ξ`.

mod fock;
mod grid;
mod reconstruct;

pub use fock::FockMatrix;
pub use grid::PhaseGrid;
pub use reconstruct::{density_matrix_from_chi, displacement_element};

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{integrate_2d, laguerre, Tolerance};

/// Operator ordering parameter `s ∈ [−1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SOrder(f64);

impl SOrder {
    pub const NORMAL: SOrder = SOrder(1.0);
    pub const SYMMETRIC: SOrder = SOrder(0.0);
    pub const ANTINORMAL: SOrder = SOrder(-1.0);

    pub fn new(s: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&s) {
            return Err(Error::InvalidParam(format!("ordering parameter must lie in [-1, 1], got {s}")));
        }
        Ok(SOrder(s))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A state's characteristic function at every ordering.
pub trait CharFn: Sync {
    /// `χ(u + iv, s)`.
    fn eval(&self, u: f64, v: f64, s: SOrder) -> Complex64;

    /// Rate `c` of the Gaussian envelope `e^{−c|ξ|²}` bounding `|χ(ξ, s)|`
    /// at large `|ξ|`, or `None` when no such bound with `c > 0` exists.
    fn decay_rate(&self, s: SOrder) -> Option<f64>;

    /// Linear growth rate `a` in `e^{a|ξ|}` multiplying the envelope.
    /// Zero for states centered at the origin.
    fn growth(&self) -> f64 {
        0.0
    }

    /// Radius beyond which `|χ(ξ, s)|` is negligible.
    fn truncation_radius(&self, s: SOrder) -> Result<f64> {
        let c = self.decay_rate(s).ok_or(Error::DivergentOrder { s: s.value(), damping: 0.0 })?;
        // e^{a r − c r²} peaks at a/2c; nine envelope widths past the peak
        let r = 0.5 * self.growth() / c + 9.0 / c.sqrt();
        Ok(r.clamp(8.0, 80.0))
    }
}

/// Characteristic function given by its symmetric-order form `χ(ξ, 0)`
/// and the envelope rate of that form.
pub struct SymmetricChi<F> {
    chi0: F,
    decay0: f64,
    growth: f64,
}

impl<F: Fn(f64, f64) -> Complex64 + Sync> SymmetricChi<F> {
    pub fn new(chi0: F, decay0: f64, growth: f64) -> Self {
        Self { chi0, decay0, growth }
    }
}

impl<F: Fn(f64, f64) -> Complex64 + Sync> CharFn for SymmetricChi<F> {
    fn eval(&self, u: f64, v: f64, s: SOrder) -> Complex64 {
        (self.chi0)(u, v) * (0.5 * s.value() * (u * u + v * v)).exp()
    }

    fn decay_rate(&self, s: SOrder) -> Option<f64> {
        let c = self.decay0 - 0.5 * s.value();
        (c > 0.0).then_some(c)
    }

    fn growth(&self) -> f64 {
        self.growth
    }
}

/// The vacuum, `χ(ξ, 0) = e^{−|ξ|²/2}`.
pub fn vacuum_chi() -> SymmetricChi<fn(f64, f64) -> Complex64> {
    fn chi0(u: f64, v: f64) -> Complex64 {
        Complex64::new((-0.5 * (u * u + v * v)).exp(), 0.0)
    }
    SymmetricChi::new(chi0 as fn(f64, f64) -> Complex64, 0.5, 0.0)
}

/// `χ` known at order `from`, re-expressed at order `to`.
pub struct Reordered<'a, C: ?Sized> {
    chi: &'a C,
    from: SOrder,
    to: SOrder,
}

impl<C: CharFn + ?Sized> Reordered<'_, C> {
    pub fn eval(&self, u: f64, v: f64) -> Complex64 {
        self.chi.eval(u, v, self.from) * (0.5 * (self.to.value() - self.from.value()) * (u * u + v * v)).exp()
    }

    pub fn order(&self) -> SOrder {
        self.to
    }
}

/// `χ(ξ, to) = χ(ξ, from)·e^{(to − from)|ξ|²/2}`.
pub fn convert_order<C: CharFn + ?Sized>(chi: &C, from: SOrder, to: SOrder) -> Reordered<'_, C> {
    Reordered { chi, from, to }
}

/// `W(β, s)` at one point by direct quadrature.
pub fn quasiprob_at<C: CharFn + ?Sized>(chi: &C, s: SOrder, re_beta: f64, im_beta: f64, tol: Tolerance) -> Result<f64> {
    let radius = chi.truncation_radius(s)?;
    let r = integrate_2d(
        |u, v| {
            let phase = 2.0 * (im_beta * u - re_beta * v);
            let z = chi.eval(u, v, s);
            phase.cos() * z.re - phase.sin() * z.im
        },
        radius,
        tol.scaled(PI * PI),
    )?;
    Ok(r.value / (PI * PI))
}

/// Fills `grid` with `W(β, s)`; points are evaluated in parallel.
pub fn quasiprob<C: CharFn + ?Sized>(chi: &C, s: SOrder, grid: &PhaseGrid, tol: Tolerance) -> Result<PhaseGrid> {
    chi.truncation_radius(s)?;
    let coords: Vec<(f64, f64)> = (0..grid.n_re())
        .flat_map(|i| (0..grid.n_im()).map(move |j| (i, j)))
        .map(|(i, j)| (grid.re_at(i), grid.im_at(j)))
        .collect();
    let values = coords.par_iter().map(|&(x, y)| quasiprob_at(chi, s, x, y, tol)).collect::<Result<Vec<f64>>>()?;
    grid.with_values(values)
}

/// A probability computed by quadrature: `value` is clamped to `[0, 1]`,
/// `raw` is the quadrature result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmfValue {
    pub value: f64,
    pub raw: f64,
}

/// `p(n) = π⁻¹ ∫ χ(ξ, 1) e^{−|ξ|²} L_n(|ξ|²) d²ξ`, evaluated through the
/// antinormal form `χ(ξ, −1) = χ(ξ, 1) e^{−|ξ|²}`, which is always integrable.
pub fn photon_pmf<C: CharFn + ?Sized>(chi: &C, n: usize, tol: Tolerance) -> Result<PmfValue> {
    let s = SOrder::ANTINORMAL;
    let radius = chi.truncation_radius(s)?;
    let r = integrate_2d(|u, v| chi.eval(u, v, s).re * laguerre(n, u * u + v * v), radius, tol.scaled(PI))?;
    let raw = r.value / PI;
    Ok(PmfValue { value: raw.clamp(0.0, 1.0), raw })
}

/// `Tr ρ² = π⁻¹ ∫ |χ(ξ, 0)|² d²ξ`.
pub fn purity_from_chi<C: CharFn + ?Sized>(chi: &C, tol: Tolerance) -> Result<f64> {
    let s = SOrder::SYMMETRIC;
    // |χ|² decays twice as fast as χ, so the symmetric radius is generous
    let radius = chi.truncation_radius(s)?;
    let r = integrate_2d(|u, v| chi.eval(u, v, s).norm_sqr(), radius, tol.scaled(PI))?;
    Ok(r.value / PI)
}
