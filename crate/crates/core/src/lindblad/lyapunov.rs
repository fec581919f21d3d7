//! Continuous Lyapunov equations `G X + X G* = -P` and the affine flow
//! `dX/dt = G X + X G* + P` they describe the fixed point of.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::phase::expm;

fn pivot_ratio<T: nalgebra::ComplexField<RealField = f64>>(lu: &nalgebra::LU<T, nalgebra::Dyn, nalgebra::Dyn>) -> f64 {
    let u = lu.u();
    let diag: Vec<f64> = u.diagonal().iter().map(|x| x.clone().modulus()).collect();
    let max = diag.iter().fold(0.0_f64, |a, b| a.max(*b));
    let min = diag.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    if max == 0.0 {
        0.0
    } else {
        min / max
    }
}

/// `I ⊗ G + conj(G) ⊗ I` acting on column-stacked `vec X`.
pub fn lyapunov_operator(g: &CMatrix) -> CMatrix {
    let n = g.nrows();
    let id = CMatrix::identity(n, n);
    linalg::kron(&id, g) + linalg::kron(&g.conjugate(), &id)
}

/// Solves `G X + X G* = -P` by Kronecker vectorization and dense LU.
/// Returns `NonUniqueStationary` when the relative LU pivot falls below `pivot`.
pub fn solve_lyapunov(g: &CMatrix, p: &CMatrix, pivot: f64) -> Result<CMatrix> {
    let n = g.nrows();
    if !g.is_square() || p.shape() != (n, n) {
        return Err(Error::DimensionMismatch("Lyapunov data must be square and equal-sized".into()));
    }
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    if linalg::is_real(g) {
        // Real operator: solve for the real and imaginary parts of X together.
        let gr = linalg::real_part(g);
        let id = DMatrix::<f64>::identity(n, n);
        let op = id.kronecker(&gr) + gr.kronecker(&id);
        let lu = op.lu();
        let ratio = pivot_ratio(&lu);
        if ratio < pivot {
            return Err(Error::NonUniqueStationary { pivot: ratio });
        }
        let mut rhs = DMatrix::<f64>::zeros(n * n, 2);
        for (k, z) in p.iter().enumerate() {
            rhs[(k, 0)] = -z.re;
            rhs[(k, 1)] = -z.im;
        }
        let sol = lu
            .solve(&rhs)
            .ok_or(Error::NonUniqueStationary { pivot: 0.0 })?;
        let x = CMatrix::from_fn(n, n, |i, j| {
            let k = j * n + i;
            num_complex::Complex64::new(sol[(k, 0)], sol[(k, 1)])
        });
        return Ok(x);
    }
    let lu = lyapunov_operator(g).lu();
    let ratio = pivot_ratio(&lu);
    if ratio < pivot {
        return Err(Error::NonUniqueStationary { pivot: ratio });
    }
    let rhs = -linalg::vec_columns(p);
    let sol = lu.solve(&rhs).ok_or(Error::NonUniqueStationary { pivot: 0.0 })?;
    Ok(linalg::unvec_columns(&sol, n, n))
}

/// Max-norm of `G X + X G* + P`.
pub fn lyapunov_residual(g: &CMatrix, x: &CMatrix, p: &CMatrix) -> f64 {
    linalg::max_abs(&(g * x + x * g.adjoint() + p))
}

/// Exact solution operator of `dX/dt = G X + X G* + P`.
#[derive(Debug, Clone)]
pub struct AffineFlow {
    g: CMatrix,
    p: CMatrix,
    fixed_point: Option<CMatrix>,
}

impl AffineFlow {
    /// Uses the fixed point when the Lyapunov operator is nonsingular, and the
    /// augmented linear system of dimension `n^2 + 1` otherwise.
    pub fn new(g: &CMatrix, p: &CMatrix, pivot: f64) -> Result<Self> {
        let fixed_point = match solve_lyapunov(g, p, pivot) {
            Ok(x) => Some(linalg::hermitian_part(&x)),
            Err(Error::NonUniqueStationary { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(Self { g: g.clone(), p: p.clone(), fixed_point })
    }

    pub fn fixed_point(&self) -> Option<&CMatrix> {
        self.fixed_point.as_ref()
    }

    pub fn at(&self, x0: &CMatrix, t: f64) -> Result<CMatrix> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::InvalidInput(format!("time must be finite and non-negative, got {t}")));
        }
        let n = self.g.nrows();
        if x0.shape() != (n, n) {
            return Err(Error::DimensionMismatch("initial matrix has the wrong size".into()));
        }
        if t == 0.0 {
            return Ok(x0.clone());
        }
        match &self.fixed_point {
            Some(xinf) => {
                let e = expm(&self.g.scale(t))?;
                Ok(&e * (x0 - xinf) * e.adjoint() + xinf)
            }
            None => {
                let nn = n * n;
                let mut aug = CMatrix::zeros(nn + 1, nn + 1);
                aug.view_mut((0, 0), (nn, nn)).copy_from(&lyapunov_operator(&self.g));
                aug.view_mut((0, nn), (nn, 1)).copy_from(&linalg::vec_columns(&self.p));
                let e = expm(&aug.scale(t))?;
                let mut v = CVector::zeros(nn + 1);
                v.rows_mut(0, nn).copy_from(&linalg::vec_columns(x0));
                v[nn] = linalg::c(1.0);
                let w = e * v;
                Ok(linalg::unvec_columns(&w.rows(0, nn).into_owned(), n, n))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use num_complex::Complex64;

    #[test]
    fn scalar_equation() {
        let g = CMatrix::from_element(1, 1, c(-0.5));
        let p = CMatrix::from_element(1, 1, c(2.0));
        let x = solve_lyapunov(&g, &p, 1e-12).unwrap();
        assert!((x[(0, 0)] - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_and_real_paths_agree() {
        let g = CMatrix::from_row_slice(2, 2, &[c(-1.0), c(0.4), c(-0.3), c(-0.2)]);
        let p = CMatrix::from_row_slice(2, 2, &[c(1.0), Complex64::new(0.0, 0.3), Complex64::new(0.0, -0.3), c(0.5)]);
        let x = solve_lyapunov(&g, &p, 1e-12).unwrap();
        assert!(lyapunov_residual(&g, &x, &p) < 1e-14);
        let gc = g.map(|z| z + Complex64::new(0.0, 1e-300));
        let xc = solve_lyapunov(&gc, &p, 1e-12).unwrap();
        assert!(linalg::max_abs(&(x - xc)) < 1e-14);
    }

    #[test]
    fn skew_hermitian_drift_is_singular() {
        let g = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(-1.0), c(0.0)]);
        let p = CMatrix::identity(2, 2);
        assert!(matches!(solve_lyapunov(&g, &p, 1e-12), Err(Error::NonUniqueStationary { .. })));
    }

    #[test]
    fn affine_paths_agree() {
        let g = CMatrix::from_row_slice(2, 2, &[c(-1.0), c(0.4), c(-0.3), c(-0.2)]);
        let p = CMatrix::identity(2, 2);
        let closed = AffineFlow::new(&g, &p, 1e-12).unwrap();
        let forced = AffineFlow { g: g.clone(), p: p.clone(), fixed_point: None };
        let x0 = CMatrix::from_row_slice(2, 2, &[c(0.2), c(0.1), c(0.1), c(0.7)]);
        let a = closed.at(&x0, 1.3).unwrap();
        let b = forced.at(&x0, 1.3).unwrap();
        assert!(linalg::max_abs(&(a - b)) < 1e-13);
    }
}
