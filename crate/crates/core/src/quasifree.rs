//! Covariance matrices of quasi-free states and Wick's formula.
//!
//! Normalization: in the Majorana basis `M_f[i][j] = tr(rho gamma_i gamma_j) / 2`,
//! which equals `S^-1 M_c S` for the c/a covariance
//! `M_c[i][j] = tr(rho a_i a_j*)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{self, c, CMatrix, CVector, RMatrix};
use crate::phase::{convert_matrix, BasisTag, HamiltonianMatrix, Structured};
use crate::tolerance;

/// Longest word accepted by [`wick_moment`].
pub const WICK_MAX_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: CMatrix,
    basis: BasisTag,
    modes: usize,
}

impl CovarianceMatrix {
    pub fn new(entries: CMatrix, basis: BasisTag) -> Result<Self> {
        Self::new_with(entries, basis, tolerance::STRUCTURE)
    }

    /// Validates against `tol` and projects onto the exact structure
    /// `1/2 I + iR`, clamping the spectrum into `[0, 1]`.
    pub fn new_with(entries: CMatrix, basis: BasisTag, tol: f64) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch("covariance matrix must be square".into()));
        }
        let f = convert_matrix(&entries, basis, BasisTag::Majorana)?;
        let l = f.nrows() / 2;
        let scale = linalg::max_abs(&f).max(1.0);
        let shifted = &f - CMatrix::identity(2 * l, 2 * l).scale(0.5);
        let re = linalg::max_abs_real(&linalg::real_part(&shifted));
        let im = linalg::imag_part(&shifted);
        let sym = linalg::max_abs_real(&(&im + im.transpose()));
        let residual = re.max(sym) / scale;
        if residual > tol || !residual.is_finite() {
            return Err(Error::StructureViolation { what: "covariance matrix", residual });
        }
        let mut r = (&im - im.transpose()).scale(0.5);
        let (vals, vecs) = linalg::hermitian_eigen(&r.map(|x| Complex64::new(0.0, x)));
        let extreme = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        if extreme > 0.5 + tol {
            return Err(Error::StructureViolation {
                what: "covariance spectrum",
                residual: extreme - 0.5,
            });
        }
        // eigen-solver rounding alone must not trigger a re-projection
        if extreme > 0.5 + 16.0 * f64::EPSILON * (2 * l) as f64 {
            let mut scaled = vecs.clone();
            for (j, v) in vals.iter().enumerate() {
                scaled.column_mut(j).scale_mut(v.clamp(-0.5, 0.5));
            }
            let ir = scaled * vecs.adjoint();
            let im = linalg::imag_part(&ir);
            r = (&im - im.transpose()).scale(0.5);
        }
        let mf = CMatrix::from_fn(2 * l, 2 * l, |i, j| {
            Complex64::new(if i == j { 0.5 } else { 0.0 }, r[(i, j)])
        });
        Ok(Self { entries: convert_matrix(&mf, BasisTag::Majorana, basis)?, basis, modes: l })
    }

    /// `1/2 I`: the infinite-temperature state.
    pub fn half(l: usize) -> Self {
        Self { entries: CMatrix::identity(2 * l, 2 * l).scale(0.5), basis: BasisTag::Majorana, modes: l }
    }

    /// All modes empty: `diag(I, 0)` in the c/a basis.
    pub fn vacuum(l: usize) -> Self {
        let m = CMatrix::from_fn(2 * l, 2 * l, |i, j| c(if i == j && i < l { 1.0 } else { 0.0 }));
        Self { entries: m, basis: BasisTag::CreationAnnihilation, modes: l }
    }

    /// Gauge-invariant full covariance `diag(M0, I - conj M0)` (c/a).
    pub fn from_small(m0: &SmallCovarianceMatrix) -> Self {
        let l = m0.modes();
        let lower = CMatrix::identity(l, l) - m0.entries().conjugate();
        Self {
            entries: linalg::block_diag(m0.entries(), &lower),
            basis: BasisTag::CreationAnnihilation,
            modes: l,
        }
    }

    /// `[[M0, A0], [-conj A0, I - conj M0]]` (c/a), validated.
    pub fn from_blocks(m0: &CMatrix, a0: &CMatrix) -> Result<Self> {
        let l = m0.nrows();
        if m0.shape() != (l, l) || a0.shape() != (l, l) {
            return Err(Error::DimensionMismatch("covariance blocks must be L×L".into()));
        }
        let lower = CMatrix::identity(l, l) - m0.conjugate();
        let full = linalg::blocks(m0, a0, &a0.map(|z| -z.conj()), &lower);
        Self::new(full, BasisTag::CreationAnnihilation)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn majorana(&self) -> CMatrix {
        self.in_basis(BasisTag::Majorana)
    }

    pub fn creation_annihilation(&self) -> CMatrix {
        self.in_basis(BasisTag::CreationAnnihilation)
    }

    fn in_basis(&self, b: BasisTag) -> CMatrix {
        convert_matrix(&self.entries, self.basis, b).expect("even dimension")
    }

    /// `R` with `M_f = 1/2 I + iR`.
    pub fn real_antisymmetric(&self) -> RMatrix {
        linalg::imag_part(&self.majorana())
    }

    /// Spectrum, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.majorana()).0
    }

    /// Largest entrywise deviation, compared in the Majorana basis.
    pub fn distance(&self, other: &CovarianceMatrix) -> f64 {
        linalg::max_abs(&(self.majorana() - other.majorana()))
    }

    /// Joint covariance of a product state: `self`'s modes first, then `other`'s.
    pub fn direct_sum(&self, other: &CovarianceMatrix) -> Self {
        let (l, k) = (self.modes, other.modes);
        let n = l + k;
        let a = self.creation_annihilation();
        let b = other.creation_annihilation();
        let pos_a = |i: usize| if i < l { i } else { n + i - l };
        let pos_b = |i: usize| if i < k { l + i } else { n + l + i - k };
        let mut m = CMatrix::zeros(2 * n, 2 * n);
        for i in 0..2 * l {
            for j in 0..2 * l {
                m[(pos_a(i), pos_a(j))] = a[(i, j)];
            }
        }
        for i in 0..2 * k {
            for j in 0..2 * k {
                m[(pos_b(i), pos_b(j))] = b[(i, j)];
            }
        }
        Self { entries: m, basis: BasisTag::CreationAnnihilation, modes: n }
    }

    /// Covariance of the first `l` modes.
    pub fn restrict(&self, l: usize) -> Result<Self> {
        if l > self.modes {
            return Err(Error::DimensionMismatch(format!("cannot restrict {} modes to {l}", self.modes)));
        }
        let n = self.modes;
        let f = self.majorana();
        let idx: Vec<usize> = (0..l).chain(n..n + l).collect();
        let m = CMatrix::from_fn(2 * l, 2 * l, |i, j| f[(idx[i], idx[j])]);
        Ok(Self { entries: m, basis: BasisTag::Majorana, modes: l })
    }

    /// Two-point matrix `P` with `tr(rho phi(x) phi(y)) = x^T P y`, where
    /// `phi(x)` is `sum x_i gamma_i` (Majorana) or `sum x_i a_i` (c/a).
    pub fn pair_matrix(&self, basis: BasisTag) -> CMatrix {
        match basis {
            BasisTag::Majorana => self.majorana().scale(2.0),
            BasisTag::CreationAnnihilation => {
                let m = self.creation_annihilation();
                let l = self.modes;
                CMatrix::from_fn(2 * l, 2 * l, |i, k| m[(i, (k + l) % (2 * l))])
            }
        }
    }

    pub fn small(&self) -> SmallCovarianceMatrix {
        small_from_full(self)
    }
}

impl Structured for CovarianceMatrix {
    fn basis(&self) -> BasisTag {
        self.basis
    }

    fn to_basis(&self, target: BasisTag) -> Self {
        Self { entries: self.in_basis(target), basis: target, modes: self.modes }
    }
}

/// Upper-left block `M0[i][j] = tr(rho c_i c_j*)` of the c/a covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallCovarianceMatrix {
    entries: CMatrix,
}

impl SmallCovarianceMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        Self::new_with(entries, tolerance::STRUCTURE)
    }

    /// Validates Hermiticity and `0 <= M0 <= I`, clamping the spectrum.
    pub fn new_with(entries: CMatrix, tol: f64) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch("small covariance must be square".into()));
        }
        let scale = linalg::max_abs(&entries).max(1.0);
        let herm = linalg::max_abs(&(&entries - entries.adjoint())) / scale;
        if herm > tol {
            return Err(Error::StructureViolation { what: "small covariance", residual: herm });
        }
        let h = linalg::hermitian_part(&entries);
        let (vals, vecs) = linalg::hermitian_eigen(&h);
        let below = vals.first().map_or(0.0, |v| -v);
        let above = vals.last().map_or(0.0, |v| v - 1.0);
        let excess = below.max(above);
        if excess > tol {
            return Err(Error::StructureViolation { what: "small covariance spectrum", residual: excess });
        }
        if excess > 0.0 {
            let mut scaled = vecs.clone();
            for (j, v) in vals.iter().enumerate() {
                scaled.column_mut(j).scale_mut(v.clamp(0.0, 1.0));
            }
            return Ok(Self { entries: linalg::hermitian_part(&(scaled * vecs.adjoint())) });
        }
        Ok(Self { entries: h })
    }

    /// `diag(values)`.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let l = values.len();
        Self::new(CMatrix::from_fn(l, l, |i, j| c(if i == j { values[i] } else { 0.0 })))
    }

    /// `(I + e^{-beta T0})^-1`, the small covariance of `exp(-beta dGamma(T0)) / Z`.
    pub fn gibbs(t0: &CMatrix, beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(Error::InvalidInput("beta must be finite".into()));
        }
        if !t0.is_square() {
            return Err(Error::DimensionMismatch("T0 must be square".into()));
        }
        Self::new(linalg::hermitian_function(t0, |x| linalg::logistic(beta * x)))
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn modes(&self) -> usize {
        self.entries.nrows()
    }

    /// Diagonal entries `tr(rho c_i c_i*)`.
    pub fn occupations(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    /// Imaginary parts of the first superdiagonal.
    pub fn currents(&self) -> Vec<f64> {
        let l = self.modes();
        (0..l.saturating_sub(1)).map(|i| self.entries[(i, i + 1)].im).collect()
    }
}

/// Covariance of `exp(-beta a* T_c a) / Z`, i.e. `(I + e^{-2 beta T})^-1` in the
/// c/a basis, evaluated through the Hermitian eigendecomposition.
pub fn covariance_from_gibbs(t: &HamiltonianMatrix, beta: f64) -> Result<CovarianceMatrix> {
    if !beta.is_finite() {
        return Err(Error::InvalidInput("beta must be finite".into()));
    }
    let tc = t.creation_annihilation();
    let m = linalg::hermitian_function(&tc, |x| linalg::logistic(2.0 * beta * x));
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalFailure("Gibbs covariance is not finite".into()));
    }
    CovarianceMatrix::new(m, BasisTag::CreationAnnihilation)
}

pub fn small_from_full(m: &CovarianceMatrix) -> SmallCovarianceMatrix {
    let l = m.modes();
    let mc = m.creation_annihilation();
    SmallCovarianceMatrix { entries: linalg::hermitian_part(&mc.view((0, 0), (l, l)).into_owned()) }
}

/// A word of phase-space vectors together with its Wick value.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingMoment {
    pub word: Vec<CVector>,
    pub value: Complex64,
}

impl PairingMoment {
    pub fn evaluate(m: &CovarianceMatrix, basis: BasisTag, word: Vec<CVector>) -> Result<Self> {
        let value = wick_moment(m, basis, &word)?;
        Ok(Self { word, value })
    }
}

/// `tr(rho phi(x_1) ... phi(x_n))` for a quasi-free `rho` by summing over all
/// pairings. Vectors are read in `basis` (see [`CovarianceMatrix::pair_matrix`]).
pub fn wick_moment(m: &CovarianceMatrix, basis: BasisTag, word: &[CVector]) -> Result<Complex64> {
    wick_moment_with(m, basis, word, Execution::Sequential)
}

pub fn wick_moment_with(
    m: &CovarianceMatrix,
    basis: BasisTag,
    word: &[CVector],
    exec: Execution,
) -> Result<Complex64> {
    let n = word.len();
    if n > WICK_MAX_LEN {
        return Err(Error::WordTooLong { len: n, max: WICK_MAX_LEN });
    }
    let dim = 2 * m.modes();
    if let Some(v) = word.iter().find(|v| v.len() != dim) {
        return Err(Error::DimensionMismatch(format!("word vector of length {} (expected {dim})", v.len())));
    }
    if n % 2 == 1 {
        return Ok(c(0.0));
    }
    if n == 0 {
        return Ok(c(1.0));
    }
    let p = m.pair_matrix(basis);
    let g = CMatrix::from_fn(n, n, |i, j| {
        if i < j {
            (word[i].transpose() * &p * &word[j])[(0, 0)]
        } else {
            c(0.0)
        }
    });
    let rest: Vec<usize> = (1..n).collect();
    let terms = exec.map_range(n - 1, |k| {
        let mut remaining = rest.clone();
        let partner = remaining.remove(k);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        g[(0, partner)] * pairing_sum(&g, &remaining) * sign
    });
    Ok(terms.into_iter().sum())
}

fn pairing_sum(g: &CMatrix, idx: &[usize]) -> Complex64 {
    if idx.is_empty() {
        return c(1.0);
    }
    let first = idx[0];
    let mut total = c(0.0);
    let mut rest: Vec<usize> = idx[1..].to_vec();
    for k in 0..rest.len() {
        let partner = rest.remove(k);
        let term = g[(first, partner)] * pairing_sum(g, &rest);
        if k % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
        rest.insert(k, partner);
    }
    total
}
