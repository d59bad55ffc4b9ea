//! Truncated-basis density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Density matrix in the Fock basis `|0>, ..., |cutoff>`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockMatrix {
    entries: DMatrix<Complex64>,
}

impl FockMatrix {
    pub fn zeros(cutoff: usize) -> Self {
        Self { entries: DMatrix::zeros(cutoff + 1, cutoff + 1) }
    }

    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() < 2 {
            return Err(Error::InvalidParam(format!(
                "Fock matrix must be square with dimension >= 2, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut m = Self::zeros(cutoff);
        m.entries[(0, 0)] = Complex64::new(1.0, 0.0);
        m
    }

    /// `|psi><psi|` for the given amplitudes, normalized.
    pub fn from_pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidParam("zero state vector".into()));
        }
        let psi = nalgebra::DVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|a| a / norm));
        Self::from_matrix(&psi * psi.adjoint())
    }

    pub fn cutoff(&self) -> usize {
        self.entries.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.entries[(m, n)]
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Largest `|rho_mn - conj(rho_nm)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `Tr rho^2`, real part.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|n| self.entries[(n, n)].re).collect()
    }

    /// Largest `|rho_mn|` with `m + n` odd; zero for states supported on a
    /// single parity sector.
    pub fn odd_parity_coherence(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if (i + j) % 2 == 1 {
                    worst = worst.max(self.entries[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `½‖a − b‖₁`, with the smaller matrix zero-padded to the larger cutoff.
    pub fn trace_distance(&self, other: &FockMatrix) -> f64 {
        let dim = self.dim().max(other.dim());
        let diff = DMatrix::from_fn(dim, dim, |i, j| {
            let a = if i < self.dim() && j < self.dim() { self.entries[(i, j)] } else { Complex64::default() };
            let b = if i < other.dim() && j < other.dim() { other.entries[(i, j)] } else { Complex64::default() };
            a - b
        });
        let diff = FockMatrix { entries: diff };
        0.5 * diff.eigenvalues().iter().map(|x| x.abs()).sum::<f64>()
    }

    /// Copy restricted to `|0>..|cutoff>`.
    pub fn truncated(&self, cutoff: usize) -> FockMatrix {
        let d = (cutoff + 1).min(self.dim());
        FockMatrix { entries: self.entries.view((0, 0), (d, d)).into_owned() }
    }
}
