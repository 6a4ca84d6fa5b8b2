//! Choi matrix variants, bilinear pairings and cone membership for linear
//! maps between matrix algebras.
//!
//! The crate works with four kinds of values and the relations between them:
//!
//! * dense complex matrices and elements of `M_m ⊗ M_n` ([`matlin`]),
//! * linear maps `φ: M_m → M_n` held in Choi-canonical form ([`mapspace`]),
//! * superoperators `Θ` on `M_m ⊗ M_n` built from a small atom catalog
//!   ([`transforms`]), together with the Choi variants `C^Θ_φ` they induce
//!   ([`choivar`]) and the twisted bilinear pairings `⟨ , ⟩_Θ` ([`pairing`]),
//! * certificate-based membership for the cone families `S_k`, `BP_k`,
//!   `P_k`, `SP_k` ([`cones`]) and the constructive factorization of
//!   separability-preserving superoperators ([`classify`]).
//!
//! Everything is pure computation over heap-allocated dense storage; the
//! crate is `no_std` (with `alloc`) and all randomized procedures are
//! deterministic functions of their seed.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod classify;
pub mod choivar;
pub mod cones;
mod error;
pub mod mapspace;
pub mod matlin;
pub mod pairing;
pub mod rng;
pub mod transforms;

pub use error::{Error, Result};
pub use matlin::{ComplexMatrix, Side, TensorMatrix};

use num_complex::Complex;

/// Double precision complex scalar used throughout.
pub type C64 = Complex<f64>;

/// The single knob bundling the numeric thresholds used by structural
/// checks, reconstruction residuals and cone margins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceProfile {
    /// Structural decisions: rank cuts, duality checks, model fits.
    pub structural: f64,
    /// Reconstruction residuals of factorizations and decompositions.
    pub reconstruction: f64,
    /// A pairing value or eigenvalue below `-cone_margin` refutes membership.
    pub cone_margin: f64,
    /// Reciprocal condition estimate below this raises `SingularTheta`.
    pub rcond_floor: f64,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            structural: 1e-8,
            reconstruction: 1e-10,
            cone_margin: 1e-10,
            rcond_floor: 1e-12,
        }
    }
}
