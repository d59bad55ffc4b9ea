//! Decoherence of an even Schrödinger-cat state of a trapped particle under
//! gravitational time dilation and classical Ornstein-Uhlenbeck noise.
//!
//! Both noise sources act as Gaussian attenuation of the characteristic
//! function, `χ_t(ξ) = χ_0(ξ) e^{−ν(t)|ξ|²}`, so every nonclassicality
//! indicator is a function of the single exponent `ν(t)`. The crate computes
//! those indicators and the times at which they are lost, checks the
//! analytic solution against brute-force integration in a truncated Fock
//! basis, and produces parameter sweeps over amplitude and noise strength.

pub mod channels;
pub mod error;
pub mod experiments;
pub mod fock_oracle;
pub mod indicators;
pub mod numerics;
pub mod phase_space;
pub mod states;

pub use error::{Error, Result};
