use crate::phase::{block_reduce, BasisTag, BogoliubovTransform, HamiltonianMatrix};
use crate::quasifree::CovarianceMatrix;
use crate::tolerance;

/// Splitting of the modes of a (possibly degenerate) covariance into modes
/// pinned empty and a faithful remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportDecomposition {
    /// Modes with covariance eigenvalue 1 (empty in the rotated basis).
    pub pinned: usize,
    /// `L - pinned`.
    pub free: usize,
    /// `U` with `U* M_c U = diag(1/2 + Lambda, 1/2 - Lambda)`.
    pub transform: BogoliubovTransform,
    /// Diagonal entries `1/2 + Lambda_i`, descending.
    pub eigenvalues: Vec<f64>,
}

pub fn support_decomposition(m: &CovarianceMatrix) -> SupportDecomposition {
    support_decomposition_with(m, tolerance::PIN)
}

pub fn support_decomposition_with(m: &CovarianceMatrix, pin: f64) -> SupportDecomposition {
    let l = m.modes();
    // M_f - I/2 = iR is a QF matrix; reduce it.
    let shifted = HamiltonianMatrix::from_real_antisymmetric(&m.real_antisymmetric())
        .expect("covariance minus I/2 is antisymmetric");
    let (u, lambdas) = block_reduce(&shifted);
    let pinned = lambdas.iter().filter(|x| **x >= 0.5 - pin).count();
    SupportDecomposition {
        pinned,
        free: l - pinned,
        transform: crate::phase::Structured::to_basis(&u, BasisTag::CreationAnnihilation),
        eigenvalues: lambdas.iter().map(|x| 0.5 + x).collect(),
    }
}
