//! Fock-basis density matrix from the symmetric characteristic function,
//! `ρ_mn = π⁻¹ ∫ χ(ξ, 0) ⟨m|D(−ξ)|n⟩ d²ξ`, in polar coordinates.
//!
//! With `ξ = r e^{iφ}` and `k = m − n ≥ 0`, the angular integral collapses
//! onto the Fourier coefficient `c_k(r) = ∫ χ e^{ikφ} dφ`, so each radial
//! node costs one sweep over the circle plus one Laguerre sequence per `k`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::{CharFn, FockMatrix, SOrder};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, laguerre_assoc, laguerre_assoc_seq, ln_factorial, Tolerance};

const GL_ORDER: usize = 16;
const MAX_REFINEMENTS: usize = 5;

/// `⟨m|D(ξ)|n⟩` for `ξ = u + iv`.
pub fn displacement_element(m: usize, n: usize, u: f64, v: f64) -> Complex64 {
    let xi = Complex64::new(u, v);
    let r2 = xi.norm_sqr();
    let (hi, lo, base) = if m >= n { (m, n, xi) } else { (n, m, -xi.conj()) };
    let k = hi - lo;
    let scale = (0.5 * (ln_factorial(lo) - ln_factorial(hi)) - 0.5 * r2).exp();
    base.powu(k as u32) * scale * laguerre_assoc(lo, k, r2)
}

/// Reconstructs `ρ` on `|0>..|cutoff>`.
///
/// Radial Gauss-Legendre panels and the angular trapezoid rule are doubled
/// together until successive matrices agree entrywise to `tol`.
pub fn density_matrix_from_chi<C: CharFn + ?Sized>(chi: &C, cutoff: usize, tol: Tolerance) -> Result<FockMatrix> {
    if cutoff < 1 {
        return Err(Error::InvalidParam("reconstruction cutoff must be at least 1".into()));
    }
    let radius = chi.truncation_radius(SOrder::SYMMETRIC)?;
    let bandwidth = cutoff as f64 + chi.growth() * radius + 4.0 * radius + 16.0;
    let mut angles = (2.0 * bandwidth).ceil().max(64.0) as usize;
    angles = angles.next_power_of_two();
    let mut panels = ((radius * 2.0).ceil() as usize).max(16);

    let mut prev = reconstruct_pass(chi, cutoff, radius, panels, angles);
    let mut evals = panels * GL_ORDER * angles;
    for _ in 0..MAX_REFINEMENTS {
        panels *= 2;
        angles *= 2;
        let next = reconstruct_pass(chi, cutoff, radius, panels, angles);
        evals += panels * GL_ORDER * angles;
        let change = (&next - &prev).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !change.is_finite() {
            return Err(Error::Domain("characteristic function produced a non-finite value".into()));
        }
        if change <= tol.abs {
            return FockMatrix::from_matrix(next);
        }
        if evals > tol.max_evals {
            return Err(Error::Convergence { evals, estimate: change, target: tol.abs });
        }
        prev = next;
    }
    let target = tol.abs;
    Err(Error::Convergence { evals, estimate: f64::NAN, target })
}

fn reconstruct_pass<C: CharFn + ?Sized>(
    chi: &C,
    cutoff: usize,
    radius: f64,
    panels: usize,
    angles: usize,
) -> DMatrix<Complex64> {
    let dim = cutoff + 1;
    let (x, w) = gauss_legendre(GL_ORDER);
    let h = radius / panels as f64;
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            let a = p as f64 * h;
            x.iter().zip(&w).map(move |(xi, wi)| (a + 0.5 * h * (xi + 1.0), 0.5 * h * wi)).collect::<Vec<_>>()
        })
        .collect();
    let twiddle: Vec<Complex64> =
        (0..angles).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / angles as f64)).collect();
    let ln_fact: Vec<f64> = (0..=cutoff).map(ln_factorial).collect();
    let dphi = 2.0 * PI / angles as f64;

    let mut lower = nodes
        .par_iter()
        .fold(
            || DMatrix::<Complex64>::zeros(dim, dim),
            |mut acc, &(r, wr)| {
                let samples: Vec<Complex64> =
                    twiddle.iter().map(|z| chi.eval(r * z.re, r * z.im, SOrder::SYMMETRIC)).collect();
                let r2 = r * r;
                let ln_r = r.ln();
                for k in 0..=cutoff {
                    let mut ck = Complex64::default();
                    for (j, s) in samples.iter().enumerate() {
                        ck += s * twiddle[(k * j) % angles];
                    }
                    ck *= dphi;
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    let lag = laguerre_assoc_seq(cutoff - k, k, r2);
                    for (n, l) in lag.iter().enumerate() {
                        let m = n + k;
                        let ln_pref = k as f64 * ln_r - 0.5 * r2 + 0.5 * (ln_fact[n] - ln_fact[m]);
                        let weight = sign * wr * r * ln_pref.exp() * l / PI;
                        acc[(m, n)] += ck * weight;
                    }
                }
                acc
            },
        )
        .reduce(|| DMatrix::<Complex64>::zeros(dim, dim), |a, b| a + b);

    for m in 0..dim {
        lower[(m, m)].im = 0.0;
        for n in 0..m {
            lower[(n, m)] = lower[(m, n)].conj();
        }
    }
    lower
}

#[cfg(test)]
mod tests {
    use super::super::vacuum_chi;
    use super::*;
    use approx::assert_relative_eq;

    /// `⟨m|D|n⟩` from `D_{m,0} = e^{−r²/2} ξ^m/√m!` and
    /// `√n D_{m,n} = √m D_{m−1,n−1} − ξ* D_{m,n−1}`.
    fn recurrence_table(size: usize, xi: Complex64) -> Vec<Vec<Complex64>> {
        let mut d = vec![vec![Complex64::default(); size]; size];
        let g = (-0.5 * xi.norm_sqr()).exp();
        let mut pow = Complex64::new(g, 0.0);
        for (m, row) in d.iter_mut().enumerate() {
            if m > 0 {
                pow = pow * xi / (m as f64).sqrt();
            }
            row[0] = pow;
        }
        for n in 1..size {
            for m in 0..size {
                let up = if m > 0 { d[m - 1][n - 1] * (m as f64).sqrt() } else { Complex64::default() };
                d[m][n] = (up - xi.conj() * d[m][n - 1]) / (n as f64).sqrt();
            }
        }
        d
    }

    #[test]
    fn displacement_matches_ladder_recurrence() {
        for (u, v) in [(0.3, -0.2), (1.1, 0.7), (-2.0, 1.5)] {
            let table = recurrence_table(12, Complex64::new(u, v));
            for m in 0..12 {
                for n in 0..12 {
                    let d = displacement_element(m, n, u, v);
                    assert!((d - table[m][n]).norm() < 1e-12, "m={m} n={n} u={u} v={v}");
                }
            }
        }
    }

    #[test]
    fn vacuum_reconstruction() {
        let tol = Tolerance::new(1e-10, 1e-10, 100_000_000).unwrap();
        let rho = density_matrix_from_chi(&vacuum_chi(), 8, tol).unwrap();
        assert_relative_eq!(rho.get(0, 0).re, 1.0, epsilon = 1e-10);
        for m in 0..9 {
            for n in 0..9 {
                if m + n > 0 {
                    assert!(rho.get(m, n).norm() < 1e-10, "m={m} n={n} {}", rho.get(m, n));
                }
            }
        }
    }

    #[test]
    fn zero_cutoff_rejected() {
        let tol = Tolerance::default();
        assert!(density_matrix_from_chi(&vacuum_chi(), 0, tol).is_err());
    }
}
