//! Uniqueness and convergence criteria: Kalman rank, eigenvector test and the
//! spectral abscissa of the drift.

use num_complex::Complex64;

use crate::linalg::{self, CMatrix, RMatrix};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicityReport {
    /// Numerical rank of `[Theta | T Theta | ... | T^{n-1} Theta]`.
    pub kalman_rank: usize,
    pub kalman_full: bool,
    /// Unique stationary state (equivalently, full Kalman rank).
    pub unique_stationary: bool,
    /// Every initial state converges.
    pub converges: bool,
    /// Largest real part of the drift spectrum.
    pub spectral_abscissa: f64,
    /// An eigenvalue of `T_S` whose eigenspace meets `ker Theta*`.
    pub offending_eigenvalue: Option<Complex64>,
    /// Independent eigenvector test: no eigenvector of `T_S` lies in `ker Theta*`.
    pub spectral_criterion: bool,
}

impl ErgodicityReport {
    /// Drift is Hurwitz within the tolerance.
    pub fn hurwitz(&self, tol: &Tolerances) -> bool {
        self.spectral_abscissa < -tol.hurwitz
    }

    /// Kalman and eigenvector criteria agree.
    pub fn consistent(&self) -> bool {
        self.kalman_full == self.spectral_criterion
    }
}

/// Controllability matrix of the norm-scaled `T` and its numerical rank.
fn kalman(t: &CMatrix, theta: &CMatrix, tol: &Tolerances) -> (CMatrix, usize) {
    let n = t.nrows();
    let m = theta.ncols();
    let norm = linalg::spectral_norm(t);
    let that = if norm > 0.0 { t.unscale(norm) } else { t.clone() };
    let mut k = CMatrix::zeros(n, n * m);
    let mut block = theta.clone();
    for p in 0..n {
        k.view_mut((0, p * m), (n, m)).copy_from(&block);
        block = &that * block;
    }
    if m == 0 {
        return (k, 0);
    }
    let s = k.singular_values();
    let smax = s.iter().fold(0.0_f64, |a, x| a.max(*x));
    if smax == 0.0 {
        return (k, 0);
    }
    let thresh = tol.rank_factor * n as f64 * f64::EPSILON * smax;
    let rank = s.iter().filter(|x| **x > thresh).count();
    (k, rank)
}

/// First eigenvalue cluster of `t` containing a vector annihilated by `theta*`.
fn spectral_offender(t: &CMatrix, theta: &CMatrix, tol: &Tolerances) -> Option<f64> {
    let n = t.nrows();
    let (vals, vecs) = linalg::hermitian_eigen(t);
    let scale = linalg::spectral_norm(t).max(1.0);
    let theta_norm = linalg::spectral_norm(theta);
    let rank_tol = 1e-10 * theta_norm;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && vals[end] - vals[end - 1] <= tol.cluster_gap * scale {
            end += 1;
        }
        let e = vecs.columns(start, end - start);
        let proj = theta.adjoint() * e;
        let rank = if theta_norm == 0.0 { 0 } else { linalg::rank_abs(&proj, rank_tol) };
        if rank < end - start {
            let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
            return Some(mean);
        }
        start = end;
    }
    None
}

/// Whether `t` restricted to the complement of the Kalman space is a multiple
/// of the identity; returns that multiple.
fn complement_scalar(t: &CMatrix, k: &CMatrix, rank: usize, tol: &Tolerances) -> Option<f64> {
    let n = t.nrows();
    if rank >= n {
        return Some(0.0);
    }
    let q = linalg::column_space_complement(k, rank);
    let a = q.adjoint() * t * &q;
    let d = a.nrows();
    let mu = a.trace().re / d as f64;
    let dev = linalg::max_abs(&(a - CMatrix::identity(d, d).scale(mu)));
    let scale = linalg::spectral_norm(t).max(1.0);
    if dev <= tol.numeric * scale {
        Some(mu)
    } else {
        None
    }
}

fn abscissa(g: &CMatrix) -> f64 {
    linalg::eigenvalues(g).iter().fold(f64::NEG_INFINITY, |a, z| a.max(z.re))
}

/// Criteria on Hermitian `t` (n×n), coupling `theta` (n×m) and drift `g`.
pub(crate) fn analyze(t: &CMatrix, theta: &CMatrix, g: &CMatrix, tol: &Tolerances) -> ErgodicityReport {
    let n = t.nrows();
    let (k, rank) = kalman(t, theta, tol);
    let full = rank == n;
    let offender = spectral_offender(t, theta, tol);
    let converges = full || complement_scalar(t, &k, rank, tol).is_some();
    ErgodicityReport {
        kalman_rank: rank,
        kalman_full: full,
        unique_stationary: full,
        converges,
        spectral_abscissa: abscissa(g),
        offending_eigenvalue: offender.map(|x| Complex64::new(x, 0.0)),
        spectral_criterion: offender.is_none(),
    }
}

/// Gauge-invariant variant: rank and abscissa are reported for the lifted
/// 2L problem (the lifted Kalman space is `K0 ⊕ conj K0`), while convergence
/// is decided within the gauge-invariant sector.
pub(crate) fn analyze_gauge_invariant(
    t0: &CMatrix,
    theta0: &CMatrix,
    g0: &CMatrix,
    tol: &Tolerances,
) -> ErgodicityReport {
    let mut r = analyze(t0, theta0, g0, tol);
    r.kalman_rank *= 2;
    r
}

/// Convergence of the lifted problem for gauge-invariant data: the complement
/// must be an eigenspace of `T0` with eigenvalue zero (otherwise the lifted
/// complement splits into the `mu` and `-mu` eigenspaces).
pub(crate) fn lifted_converges_gauge_invariant(t0: &CMatrix, theta0: &CMatrix, tol: &Tolerances) -> bool {
    let (k, rank) = kalman(t0, theta0, tol);
    if rank == t0.nrows() {
        return true;
    }
    let scale = linalg::spectral_norm(t0).max(1.0);
    matches!(complement_scalar(t0, &k, rank, tol), Some(mu) if mu.abs() <= tol.numeric * scale)
}

fn real_span_rank(blocks: &[RMatrix], l: usize, tol: &Tolerances) -> usize {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut m = CMatrix::zeros(l, cols);
    let mut at = 0;
    for b in blocks {
        m.view_mut((0, at), (l, b.ncols())).copy_from(&linalg::complexify(b));
        at += b.ncols();
    }
    if cols == 0 {
        return 0;
    }
    let s = m.singular_values();
    let smax = s.iter().fold(0.0_f64, |a, x| a.max(*x));
    if smax == 0.0 {
        return 0;
    }
    let thresh = tol.rank_factor * 2.0 * l as f64 * f64::EPSILON * smax;
    s.iter().filter(|x| **x > thresh).count()
}

/// Kalman test for `T = [[0, i C_T], [-i C_T^T, 0]]`,
/// `Theta = [[0, i C_top], [-i C_bottom, 0]]`: both span conditions
/// `{(C C^T)^k C_top, (C C^T)^k C C_bottom}` and
/// `{(C^T C)^k C_bottom, (C^T C)^k C^T C_top}` must be the whole space.
pub fn real_case_kalman_pair(c_t: &RMatrix, c_top: &RMatrix, c_bottom: &RMatrix) -> bool {
    real_case_kalman_pair_with(c_t, c_top, c_bottom, &Tolerances::default())
}

pub fn real_case_kalman_pair_with(c_t: &RMatrix, c_top: &RMatrix, c_bottom: &RMatrix, tol: &Tolerances) -> bool {
    let l = c_t.nrows();
    let norm = linalg::spectral_norm(&linalg::complexify(c_t));
    let ct = if norm > 0.0 { c_t.unscale(norm) } else { c_t.clone() };
    let left = &ct * ct.transpose();
    let right = ct.transpose() * &ct;
    let mut top_blocks = Vec::with_capacity(2 * l);
    let mut bottom_blocks = Vec::with_capacity(2 * l);
    let mut a = c_top.clone();
    let mut b = &ct * c_bottom;
    let mut cb = c_bottom.clone();
    let mut d = ct.transpose() * c_top;
    for _ in 0..l {
        top_blocks.push(a.clone());
        top_blocks.push(b.clone());
        bottom_blocks.push(cb.clone());
        bottom_blocks.push(d.clone());
        a = &left * a;
        b = &left * b;
        cb = &right * cb;
        d = &right * d;
    }
    real_span_rank(&top_blocks, l, tol) == l && real_span_rank(&bottom_blocks, l, tol) == l
}

/// Single-matrix form with `C_top = C_bottom = c_theta`.
pub fn real_case_kalman(c_t: &RMatrix, c_theta: &RMatrix) -> bool {
    real_case_kalman_pair(c_t, c_theta, c_theta)
}
