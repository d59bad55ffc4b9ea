//! Brute-force check of the attenuation solution: integrate the dephasing
//! master equation in a truncated Fock basis and compare with the state
//! reconstructed from the analytic characteristic function.
//!
//! Two generators are provided, both with rate `κt` so that the exponent is
//! `N(t) = κt²/2`:
//!
//! - position dephasing `−κt [X, [X, ρ]]`, whose solution damps
//!   `χ` as `e^{−2N u²}`;
//! - isotropic dephasing `−(κt/2)([X, [X, ρ]] + [P, [P, ρ]])`, whose solution
//!   is `χ_0 e^{−N|ξ|²}`, the form the indicators are built on.
//!
//! The free oscillator rotation is omitted, matching the interaction-picture
//! solution.

use nalgebra::DMatrix;
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{evolve_fock_with, EvolveOptions, Tolerance};
use crate::phase_space::{density_matrix_from_chi, purity_from_chi, FockMatrix};
use crate::states::{AttenuatedCat, EvenCatState, GaussianDamping};

/// Which double-commutator generator to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Position,
    Isotropic,
}

impl GeneratorKind {
    /// Damping of `χ` that solves this generator at exponent `n`.
    pub fn damping(self, n: f64) -> Result<GaussianDamping> {
        match self {
            GeneratorKind::Position => GaussianDamping::position_dephasing(n),
            GeneratorKind::Isotropic => GaussianDamping::isotropic(n),
        }
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "position" => Ok(GeneratorKind::Position),
            "isotropic" => Ok(GeneratorKind::Isotropic),
            other => Err(Error::InvalidParam(format!("unknown generator '{other}' (expected position or isotropic)"))),
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorKind::Position => "position",
            GeneratorKind::Isotropic => "isotropic",
        })
    }
}

/// `[X, ρ]` with `X = (a + a†)/√2`, using the tridiagonal structure of `X`.
fn x_commutator(rho: &DMatrix<Complex64>, sqrt_n: &[f64]) -> DMatrix<Complex64> {
    let d = rho.nrows();
    DMatrix::from_fn(d, d, |m, n| {
        // (Xρ)_{mn} = (√m ρ_{m−1,n} + √(m+1) ρ_{m+1,n})/√2, likewise on the right
        let mut acc = Complex64::default();
        if m > 0 {
            acc += rho[(m - 1, n)] * sqrt_n[m];
        }
        if m + 1 < d {
            acc += rho[(m + 1, n)] * sqrt_n[m + 1];
        }
        if n > 0 {
            acc -= rho[(m, n - 1)] * sqrt_n[n];
        }
        if n + 1 < d {
            acc -= rho[(m, n + 1)] * sqrt_n[n + 1];
        }
        acc * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// `[P, ρ]` with `P = i(a† − a)/√2`.
fn p_commutator(rho: &DMatrix<Complex64>, sqrt_n: &[f64]) -> DMatrix<Complex64> {
    let d = rho.nrows();
    let i = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    DMatrix::from_fn(d, d, |m, n| {
        // (Pρ)_{mn} = i(√m ρ_{m−1,n} − √(m+1) ρ_{m+1,n})/√2
        // (ρP)_{mn} = i(ρ_{m,n+1}√(n+1) − ρ_{m,n−1}√n)/√2
        let mut acc = Complex64::default();
        if m > 0 {
            acc += rho[(m - 1, n)] * sqrt_n[m];
        }
        if m + 1 < d {
            acc -= rho[(m + 1, n)] * sqrt_n[m + 1];
        }
        if n + 1 < d {
            acc -= rho[(m, n + 1)] * sqrt_n[n + 1];
        }
        if n > 0 {
            acc += rho[(m, n - 1)] * sqrt_n[n];
        }
        acc * i
    })
}

fn sqrt_table(cutoff: usize) -> Vec<f64> {
    (0..=cutoff + 1).map(|n| (n as f64).sqrt()).collect()
}

/// `ρ ↦ −κt [X, [X, ρ]]` on `|0>..|cutoff>`.
pub fn dilation_generator(kappa: f64, cutoff: usize) -> impl Fn(&FockMatrix, f64) -> FockMatrix {
    let sq = sqrt_table(cutoff);
    move |rho, t| {
        let inner = x_commutator(rho.matrix(), &sq);
        let out = x_commutator(&inner, &sq) * Complex64::new(-kappa * t, 0.0);
        FockMatrix::from_matrix(out).expect("square")
    }
}

/// `ρ ↦ −(κt/2)([X, [X, ρ]] + [P, [P, ρ]])` on `|0>..|cutoff>`.
pub fn isotropic_generator(kappa: f64, cutoff: usize) -> impl Fn(&FockMatrix, f64) -> FockMatrix {
    let sq = sqrt_table(cutoff);
    move |rho, t| {
        let xx = x_commutator(&x_commutator(rho.matrix(), &sq), &sq);
        let pp = p_commutator(&p_commutator(rho.matrix(), &sq), &sq);
        FockMatrix::from_matrix((xx + pp) * Complex64::new(-0.5 * kappa * t, 0.0)).expect("square")
    }
}

/// Default Fock cutoff for a cat of amplitude `alpha`, `⌈α² + 8α + 20⌉`.
pub fn default_cutoff(alpha: f64) -> usize {
    (alpha * alpha + 8.0 * alpha + 20.0).ceil() as usize
}

/// Comparison of integrated and reconstructed states.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub alpha: f64,
    pub kappa: f64,
    pub t: f64,
    pub cutoff: usize,
    pub generator: GeneratorKind,
    pub trace_distance: f64,
    /// `π⁻¹∫|χ_t|²`, from the analytic characteristic function.
    pub purity_chi: f64,
    /// `Tr ρ²` of the integrated state.
    pub purity_fock: f64,
    /// Trace distance between integrations at `cutoff` and `cutoff + 10`.
    pub cutoff_sensitivity: f64,
    /// Largest `|ρ_mn|` with `m + n` odd in the integrated state.
    pub parity_leak: f64,
    pub trace_defect: f64,
    pub hermiticity_defect: f64,
}

impl ValidationReport {
    pub const CSV_HEADER: &'static str = "alpha,kappa,t,cutoff,trace_distance,purity_chi,purity_fock";

    pub fn csv_row(&self) -> String {
        format!(
            "{:.11e},{:.11e},{:.11e},{},{:.11e},{:.11e},{:.11e}",
            self.alpha, self.kappa, self.t, self.cutoff, self.trace_distance, self.purity_chi, self.purity_fock
        )
    }

    /// The cutoff is trusted when growing it by 10 moves the state by less than 1e-8.
    pub fn cutoff_converged(&self) -> bool {
        self.cutoff_sensitivity < 1e-8
    }
}

/// Integrates the cat from `0` to `t` under `kind`.
pub fn evolve_cat(alpha: f64, kappa: f64, t: f64, cutoff: usize, kind: GeneratorKind) -> Result<FockMatrix> {
    if cutoff < 4 {
        return Err(Error::InvalidParam(format!("oracle cutoff must be at least 4, got {cutoff}")));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParam(format!("kappa must be finite and >= 0, got {kappa}")));
    }
    let state = EvenCatState::new(alpha)?;
    let rho0 = FockMatrix::from_pure(&state.fock_amplitudes(cutoff))?;
    let opts = EvolveOptions::default();
    match kind {
        GeneratorKind::Position => evolve_fock_with(dilation_generator(kappa, cutoff), &rho0, t, 64, &opts),
        GeneratorKind::Isotropic => evolve_fock_with(isotropic_generator(kappa, cutoff), &rho0, t, 64, &opts),
    }
}

/// Trace distance between the integrated cat at time `t` and the state
/// reconstructed from its attenuated characteristic function.
pub fn validate_channel_solution(
    alpha: f64,
    kappa: f64,
    t: f64,
    cutoff: usize,
    kind: GeneratorKind,
    tol: Tolerance,
) -> Result<ValidationReport> {
    let state = EvenCatState::new(alpha)?;
    let n = 0.5 * kappa * t * t;
    let chi = AttenuatedCat::new(state, kind.damping(n)?);

    let evolved = evolve_cat(alpha, kappa, t, cutoff, kind)?;
    let wider = evolve_cat(alpha, kappa, t, cutoff + 10, kind)?;
    let reconstructed = density_matrix_from_chi(&chi, cutoff, tol)?;

    Ok(ValidationReport {
        alpha,
        kappa,
        t,
        cutoff,
        generator: kind,
        trace_distance: evolved.trace_distance(&reconstructed),
        purity_chi: purity_from_chi(&chi, tol)?,
        purity_fock: evolved.purity(),
        cutoff_sensitivity: evolved.trace_distance(&wider),
        parity_leak: evolved.odd_parity_coherence(),
        trace_defect: (evolved.trace() - Complex64::new(1.0, 0.0)).norm(),
        hermiticity_defect: evolved.hermiticity_defect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn x_matrix(cutoff: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(cutoff + 1, cutoff + 1, |m, n| {
            if m + 1 == n {
                Complex64::new((n as f64 / 2.0).sqrt(), 0.0)
            } else if n + 1 == m {
                Complex64::new((m as f64 / 2.0).sqrt(), 0.0)
            } else {
                Complex64::default()
            }
        })
    }

    fn p_matrix(cutoff: usize) -> DMatrix<Complex64> {
        // P = i(a† − a)/√2
        DMatrix::from_fn(cutoff + 1, cutoff + 1, |m, n| {
            if n + 1 == m {
                Complex64::new(0.0, (m as f64 / 2.0).sqrt())
            } else if m + 1 == n {
                Complex64::new(0.0, -(n as f64 / 2.0).sqrt())
            } else {
                Complex64::default()
            }
        })
    }

    fn random_hermitian(cutoff: usize) -> FockMatrix {
        let d = cutoff + 1;
        let m = DMatrix::from_fn(d, d, |i, j| {
            Complex64::new(((i * 7 + j * 3) % 11) as f64 / 11.0, ((i * 5 + j) % 13) as f64 / 13.0)
        });
        FockMatrix::from_matrix(&m + m.adjoint()).unwrap()
    }

    #[test]
    fn sparse_commutators_match_dense() {
        let c = 9;
        let rho = random_hermitian(c);
        let sq = sqrt_table(c);
        let x = x_matrix(c);
        let p = p_matrix(c);
        let dense_x = &x * rho.matrix() - rho.matrix() * &x;
        let dense_p = &p * rho.matrix() - rho.matrix() * &p;
        assert!((x_commutator(rho.matrix(), &sq) - dense_x).norm() < 1e-13);
        assert!((p_commutator(rho.matrix(), &sq) - dense_p).norm() < 1e-13);
    }

    #[test]
    fn generator_output_is_traceless_and_hermitian() {
        let vac = FockMatrix::vacuum(12);
        for out in [dilation_generator(1.0, 12)(&vac, 1.0), isotropic_generator(1.0, 12)(&vac, 1.0)] {
            assert!(out.trace().norm() < 1e-15);
            assert!(out.hermiticity_defect() < 1e-15);
        }
        let r = random_hermitian(10);
        assert!(dilation_generator(0.7, 10)(&r, 2.0).trace().norm() < 1e-12);
    }

    #[test]
    fn position_coherences_decay_with_squared_separation() {
        let c = 30;
        let x = x_matrix(c);
        let eig = nalgebra::linalg::SymmetricEigen::new(x.map(|z| z.re));
        let gen = dilation_generator(1.3, c);
        let t = 0.8;
        for (i, j) in [(0usize, 1usize), (3, 17), (10, 29)] {
            let vi = eig.eigenvectors.column(i).map(|z| Complex64::new(z, 0.0));
            let vj = eig.eigenvectors.column(j).map(|z| Complex64::new(z, 0.0));
            let rho = FockMatrix::from_matrix(&vi * vj.adjoint()).unwrap();
            let out = gen(&rho, t);
            let rate = -1.3 * t * (eig.eigenvalues[i] - eig.eigenvalues[j]).powi(2);
            let expected = rho.matrix() * Complex64::new(rate, 0.0);
            assert!((out.matrix() - expected).norm() < 1e-10 * (1.0 + rate.abs()), "({i}, {j})");
        }
    }

    #[test]
    fn vacuum_evolution_preserves_trace() {
        let vac = FockMatrix::vacuum(20);
        let out = evolve_fock_with(dilation_generator(1.0, 20), &vac, 0.5, 16, &EvolveOptions::default()).unwrap();
        assert_relative_eq!(out.trace().re, 1.0, epsilon = 1e-12);
        assert!(out.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn generator_names_parse() {
        assert_eq!("isotropic".parse::<GeneratorKind>().unwrap(), GeneratorKind::Isotropic);
        assert_eq!(GeneratorKind::Position.to_string(), "position");
        assert!("spin".parse::<GeneratorKind>().is_err());
    }

    #[test]
    fn default_cutoffs() {
        assert_eq!(default_cutoff(1.0), 29);
        assert_eq!(default_cutoff(0.0), 20);
    }
}
