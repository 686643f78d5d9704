use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("z = 0 is a branch point of W_{0} (only the principal branch is defined there)")]
    BranchPoint(i32),
    #[error("iteration failed to converge after {0} steps (residual {1:.3e})")]
    Convergence(usize, f64),
    #[error("argument outside the valid domain: {0}")]
    Domain(String),
    #[error("integer overflow computing {0}")]
    Overflow(String),
    #[error("k = 0 is excluded: W_0(a alpha e^(a alpha)) = a alpha gives k_{{2,0}} = 0 exactly")]
    ExcludedRoot,
    #[error("evaluation at a pole (denominator modulus {0:.3e})")]
    Pole(f64),
    #[error("a resonance pole lies within {0:.1e} of the rotated contour")]
    PoleOnRay(f64),
    #[error("quadrature failed to reach tolerance {wanted:.1e} (achieved {got:.1e})")]
    Quadrature { wanted: f64, got: f64 },
    #[error("grid refinement changed the answer by {0:.3e}, above tolerance {1:.1e}")]
    Stability(f64, f64),
    #[error("finite-difference derivative orders disagree beyond tolerance ({0:.3e})")]
    Derivative(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
