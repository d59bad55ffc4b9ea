//! Special functions, quadrature, root finding and the Fock-space integrator
//! that the physics modules are built on.

mod ode;
mod optimize;
mod quadrature;
mod special;

pub use ode::{evolve_fock, evolve_fock_with, EvolveOptions};
pub use optimize::{find_root, maximize_1d, Maximum};
pub use quadrature::{
    default_truncation_radius, gauss_legendre, integrate_1d, integrate_2d, integrate_2d_box, QuadResult,
};
pub use special::{
    laguerre, laguerre_assoc, laguerre_assoc_seq, lambert_w, lambert_w0_plus_one, lambert_w_from_offset, ln_factorial,
    LambertBranch,
};

use crate::error::{Error, Result};

/// Accuracy target shared by the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_evals: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_evals: usize) -> Result<Self> {
        if !(abs > 0.0 && rel > 0.0 && max_evals > 0) {
            return Err(Error::InvalidParam(format!(
                "tolerance needs abs > 0, rel > 0, max_evals > 0 (got {abs}, {rel}, {max_evals})"
            )));
        }
        Ok(Self { abs, rel, max_evals })
    }

    /// Same budget, tighter accuracy.
    pub fn scaled(self, factor: f64) -> Self {
        Self { abs: self.abs * factor, rel: self.rel * factor, max_evals: self.max_evals }
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-12, rel: 1e-12, max_evals: 50_000_000 }
    }
}

/// A closed interval `[lo, hi]` known to contain a root or an extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    lo: f64,
    hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParam(format!("bracket needs finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}
