//! Dense complex linear-algebra helpers shared by the phase-space and Fock-space code.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;
pub type CVector = DVector<Complex64>;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_real(m: &RMatrix) -> f64 {
    m.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().fold(0.0, |a: f64, s| a.max(*s))
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn real_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMatrix) -> RMatrix {
    m.map(|z| z.im)
}

pub fn complexify(m: &RMatrix) -> CMatrix {
    m.map(c)
}

pub fn is_real(m: &CMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

/// Superdiagonal shift D with D[i][i+1] = 1.
pub fn shift_matrix(l: usize) -> RMatrix {
    RMatrix::from_fn(l, l, |i, j| if j == i + 1 { 1.0 } else { 0.0 })
}

pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = CMatrix::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Assembles [[a, b], [c, d]] from four equally shaped blocks.
pub fn blocks(a: &CMatrix, b: &CMatrix, c_: &CMatrix, d: &CMatrix) -> CMatrix {
    let (r, k) = a.shape();
    let mut out = CMatrix::zeros(2 * r, 2 * k);
    out.view_mut((0, 0), (r, k)).copy_from(a);
    out.view_mut((0, k), (r, k)).copy_from(b);
    out.view_mut((r, 0), (r, k)).copy_from(c_);
    out.view_mut((r, k), (r, k)).copy_from(d);
    out
}

pub fn block(m: &CMatrix, row: usize, col: usize, l: usize, k: usize) -> CMatrix {
    m.view((row * l, col * k), (l, k)).into_owned()
}

/// Hermitian eigendecomposition with eigenvalues ascending. The input is
/// symmetrized first so slightly non-Hermitian rounding noise is tolerated.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// f(H) for Hermitian H through its eigendecomposition.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, v) = hermitian_eigen(m);
    let mut scaled = v.clone();
    for (j, lambda) in values.iter().enumerate() {
        let fl = f(*lambda);
        scaled.column_mut(j).scale_mut(fl);
    }
    scaled * v.adjoint()
}

/// Eigenvalues of a general complex matrix (complex Schur form).
pub fn eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    if is_real(m) {
        let r = real_part(m);
        return Schur::new(r).complex_eigenvalues().iter().copied().collect();
    }
    let schur = Schur::new(m.clone());
    match schur.eigenvalues() {
        Some(v) => v.iter().copied().collect(),
        None => {
            // The complex QR iteration leaves a triangular form; reading the
            // diagonal is the fallback if nalgebra flags a residual block.
            let (_, t) = schur.unpack();
            t.diagonal().iter().copied().collect()
        }
    }
}

/// Numerical rank using the threshold `factor * max(rows, cols) * eps * sigma_max`.
pub fn numerical_rank(m: &CMatrix, factor: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = m.singular_values();
    let smax = s.iter().fold(0.0_f64, |a, x| a.max(*x));
    if smax == 0.0 {
        return 0;
    }
    let thresh = factor * (m.nrows().max(m.ncols()) as f64) * f64::EPSILON * smax;
    s.iter().filter(|x| **x > thresh).count()
}

/// Rank with an absolute threshold on singular values.
pub fn rank_abs(m: &CMatrix, threshold: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    m.singular_values().iter().filter(|x| **x > threshold).count()
}

/// Orthonormal basis of the orthogonal complement of the column space of `m`,
/// given its rank. Columns of the returned matrix span the complement.
pub fn column_space_complement(m: &CMatrix, rank: usize) -> CMatrix {
    let n = m.nrows();
    if rank >= n {
        return CMatrix::zeros(n, 0);
    }
    if m.ncols() == 0 || rank == 0 {
        return CMatrix::identity(n, n);
    }
    // Pad with zero columns so the thin SVD returns a full n×n U.
    let cols = m.ncols().max(n);
    let mut padded = CMatrix::zeros(n, cols);
    padded.view_mut((0, 0), (n, m.ncols())).copy_from(m);
    let svd = SVD::new(padded, true, false);
    let u = svd.u.expect("requested U");
    u.columns(rank, n - rank).into_owned()
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Column-stacking vectorization.
pub fn vec_columns(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvec_columns(v: &CVector, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Stable logistic 1 / (1 + e^{-x}).
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_eigenvalues_of_triangular_input() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[Complex64::new(1.0, 2.0), c(3.0), c(0.0), Complex64::new(-0.5, 0.25)],
        );
        let mut ev = eigenvalues(&m);
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - Complex64::new(-0.5, 0.25)).norm() < 1e-12);
        assert!((ev[1] - Complex64::new(1.0, 2.0)).norm() < 1e-12);
    }

    #[test]
    fn complex_eigenvalues_match_characteristic_polynomial() {
        // [[i, 1], [1, -i]] is nilpotent: both eigenvalues vanish.
        let m = CMatrix::from_row_slice(2, 2, &[I, c(1.0), c(1.0), -I]);
        for z in eigenvalues(&m) {
            assert!(z.norm() < 1e-6);
        }
        let g = CMatrix::from_row_slice(2, 2, &[c(-1.0), I, I, c(-2.0)]);
        let ev = eigenvalues(&g);
        let tr: Complex64 = ev.iter().sum();
        let det = ev[0] * ev[1];
        assert!((tr - c(-3.0)).norm() < 1e-12);
        assert!((det - c(3.0)).norm() < 1e-12);
    }

    #[test]
    fn complement_is_orthogonal() {
        let m = CMatrix::from_row_slice(3, 1, &[c(1.0), c(1.0), c(0.0)]);
        let q = column_space_complement(&m, 1);
        assert_eq!(q.ncols(), 2);
        assert!(max_abs(&(q.adjoint() * &m)) < 1e-14);
        assert!(max_abs(&(q.adjoint() * &q - CMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn logistic_is_stable() {
        assert_eq!(logistic(800.0), 1.0);
        assert_eq!(logistic(-800.0), 0.0);
        assert!((logistic(0.0) - 0.5).abs() < 1e-16);
    }
}
