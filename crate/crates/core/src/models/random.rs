//! Seeded random models for sweeps and property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::fock::{DenseOperator, DenseState};
use crate::lindblad::{GaugeInvariantSpec, SemigroupSpec};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::phase::{CouplingMatrix, HamiltonianMatrix};
use crate::quasifree::{covariance_from_gibbs, CovarianceMatrix, SmallCovarianceMatrix};

pub type ModelRng = ChaCha8Rng;

pub fn rng(seed: u64) -> ModelRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn real_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> RMatrix {
    RMatrix::from_fn(rows, cols, |_, _| normal(rng))
}

pub fn complex_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| num_complex::Complex64::new(normal(rng), normal(rng)))
}

pub fn hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let a = complex_matrix(rng, n, n);
    (&a + a.adjoint()).scale(0.5)
}

/// `T = iR` with `R` real antisymmetric, standard normal entries.
pub fn hamiltonian(rng: &mut impl Rng, l: usize) -> HamiltonianMatrix {
    let a = real_matrix(rng, 2 * l, 2 * l);
    HamiltonianMatrix::from_real_antisymmetric(&((&a - a.transpose()) * 0.5)).expect("antisymmetric by construction")
}

pub fn coupling(rng: &mut impl Rng, l: usize, k: usize) -> CouplingMatrix {
    CouplingMatrix::from_real(&(real_matrix(rng, 2 * l, 2 * k) * 0.7)).expect("real coupling")
}

/// Gibbs covariance of a random Hamiltonian at `beta` drawn from `[0.2, 2)`.
pub fn covariance(rng: &mut impl Rng, l: usize) -> Result<CovarianceMatrix> {
    let t = hamiltonian(rng, l);
    let beta = rng.random_range(0.2..2.0);
    covariance_from_gibbs(&t, beta)
}

pub fn small_covariance(rng: &mut impl Rng, l: usize) -> Result<SmallCovarianceMatrix> {
    let t0 = hermitian(rng, l);
    let beta = rng.random_range(0.2..2.0);
    SmallCovarianceMatrix::gibbs(&t0, beta)
}

pub fn spec(rng: &mut impl Rng, l: usize, k: usize) -> Result<SemigroupSpec> {
    let t = hamiltonian(rng, l);
    let theta = coupling(rng, l, k);
    SemigroupSpec::new(t, theta, covariance(rng, k)?)
}

/// Random spec whose coupling annihilates one eigenvector pair of `T_S`, so the
/// Kalman rank is at most `2L - 2`.
pub fn uncontrollable_spec(rng: &mut impl Rng, l: usize, k: usize) -> Result<SemigroupSpec> {
    let t = hamiltonian(rng, l);
    let (_, vecs) = linalg::hermitian_eigen(&t.majorana());
    let pick = rng.random_range(0..2 * l);
    let v = vecs.column(pick);
    let mut basis = RMatrix::zeros(2 * l, 2);
    basis.set_column(0, &v.map(|z| z.re));
    basis.set_column(1, &v.map(|z| z.im));
    let q = basis.svd(true, false).u.expect("requested U");
    let proj = RMatrix::identity(2 * l, 2 * l) - &q * q.transpose();
    let w = proj * (real_matrix(rng, 2 * l, 2 * k) * 0.7);
    SemigroupSpec::new(t, CouplingMatrix::from_real(&w)?, covariance(rng, k)?)
}

pub fn gauge_invariant_spec(rng: &mut impl Rng, l: usize, k: usize) -> Result<GaugeInvariantSpec> {
    let t0 = hermitian(rng, l);
    let theta0 = complex_matrix(rng, l, k).scale(0.6);
    GaugeInvariantSpec::new(t0, theta0, small_covariance(rng, k)?)
}

/// Density matrix `A A* / tr(A A*)` on `n` modes (generally not quasi-free).
pub fn dense_state(rng: &mut impl Rng, n: usize) -> Result<DenseState> {
    let a = complex_matrix(rng, 1 << n, 1 << n);
    let rho = &a * a.adjoint();
    let tr = rho.trace();
    DenseState::new(DenseOperator::new(rho.map(|z| z / tr), n)?)
}
