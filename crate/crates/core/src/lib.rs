//! Resonances and time decay for the one-dimensional double Dirac-delta
//! barrier Hamiltonian H = -d^2/dx^2 + alpha delta(x+a) + alpha delta(x-a).
//!
//! The crate computes:
//! * every branch of the complex Lambert W function ([`lambertw`]);
//! * the resonance momenta/energies of the barrier in closed form and by an
//!   independent Newton refiner ([`resonance`]);
//! * the resolvent kernel and its pole-carrying factor g(k) ([`resolvent`]);
//! * the momentum-space amplitude F_alpha(k) for pairs of test functions
//!   ([`amplitude`]);
//! * the survival amplitude <psi, e^{-itH} phi> by rotated-contour quadrature,
//!   a real-axis oracle, and a Crank-Nicolson grid propagator, together with
//!   its power-law/resonance decomposition and the power/exponential
//!   crossover window ([`decay`]).
//!
//! All lengths are in the rescaled units where hbar^2/2m = 1; a^{-2} carries
//! the dimension of energy.

pub mod amplitude;
pub mod barrier;
pub mod decay;
pub mod error;
pub mod lambertw;
pub mod parallel;
pub mod quad;
pub mod resolvent;
pub mod resonance;

pub use error::{Error, Result};
pub use num_complex::Complex64;
