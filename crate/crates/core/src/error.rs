use thiserror::Error;

/// Unified error type for the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Lattice-sum radius needed for the requested precision exceeds the cap,
    /// i.e. the imaginary part of the period matrix is too small for the
    /// precision budget.
    #[error("theta sum does not converge within the radius cap (required {required:.2}, cap {cap:.2})")]
    NonConvergent { required: f64, cap: f64 },

    /// A linear solve against `C Z + D` failed numerically.
    #[error("cocycle factor C*Z + D is numerically singular")]
    SingularFactor,

    /// Exact integer arithmetic exceeded 64-bit range.
    #[error("integer overflow in exact arithmetic: {0}")]
    Overflow(&'static str),

    /// Tuple enumeration for the requested theta-series genus is gated off.
    #[error("siegel theta series of genus {genus} exceeds the cost cap (use the override to force genus 3)")]
    CostCapExceeded { genus: usize },

    /// Both sides of the Klein ratio vanish: the input is hyperelliptic.
    #[error("chi_68 vanishes at this point (hyperelliptic locus); the Klein ratio is 0/0")]
    OnHyperellipticLocus,

    /// The Schottky form does not vanish at the input to the required tolerance.
    #[error("point is not on the Schottky locus: |F_4|/scale = {residual:.3e} > {tol:.3e}")]
    NotOnLocus { residual: f64, tol: f64 },

    /// The Schottky-form gradient is below the noise floor; restart elsewhere.
    #[error("gradient of F_4 is degenerate at the start point (signal below noise floor)")]
    GradientDegenerate,

    /// A Newton step left the Siegel upper half-space and halving did not recover.
    #[error("iteration left the Siegel upper half-space")]
    LeftSiegelSpace,

    /// Newton projection did not reach the tolerance in the allowed iterations.
    #[error("projection did not converge in {0} iterations")]
    MaxIter(usize),

    /// No Gauss-Newton start converged to a singular point of the theta divisor.
    #[error("no singular point of the theta divisor found (best residual {best:.3e}, tol {tol:.3e})")]
    NotFound { best: f64, tol: f64 },

    /// Proportionality test received a numerically zero matrix.
    #[error("proportionality test received a zero matrix")]
    ZeroMatrix,

    /// Doubling the quadrature order still changes the period matrix.
    #[error("quadrature did not converge (change {change:.3e} at order {order})")]
    QuadratureNotConverged { change: f64, order: usize },

    /// Assembled period matrix is not symmetric: cycle-assembly bug.
    #[error("period matrix is not symmetric (defect {0:.3e})")]
    NotSymmetric(f64),

    /// Assembled period matrix has indefinite imaginary part.
    #[error("imaginary part of the period matrix is not positive definite")]
    NotPositiveDefinite,

    /// A thetanull magnitude falls between the vanishing floor and the
    /// non-vanishing ceiling, so the split is not decidable.
    #[error("thetanull split is ambiguous: |theta| = {value:.3e} lies in [{floor:.3e}, {ceiling:.3e}]")]
    AmbiguousSplit { value: f64, floor: f64, ceiling: f64 },

    /// Determinant identity requested for a singular matrix.
    #[error("input matrix is singular")]
    SingularInput,

    /// Malformed argument or configuration.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// True for failures of numerical convergence (CLI exit code 2), as
    /// opposed to usage errors (exit 1) or failed checks (exit 3).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::InvalidInput(_))
    }
}
