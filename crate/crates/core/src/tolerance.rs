/// Numerical tolerances shared by the library and its tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Algebraic identities: normalization, orthogonality, eigen-residuals.
    pub algebraic: f64,
    /// Comparisons between independent evolution routes.
    pub dynamics: f64,
    /// Entry-wise Hermiticity and unitarity of small constant matrices.
    pub exact: f64,
    /// Population allowed above n = 2 after a protocol step.
    pub leakage: f64,
}

pub const TOL: Tolerances = Tolerances {
    algebraic: 1e-12,
    dynamics: 1e-10,
    exact: 1e-15,
    leakage: 1e-12,
};
