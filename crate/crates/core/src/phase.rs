//! Phase-space linear algebra: basis changes between the Majorana and
//! creation/annihilation (c/a) bases, structured matrix types, Bogoliubov
//! block reduction and the matrix exponential.
//!
//! The field vectors are `a = (c_1..c_L, c_1*..c_L*)` and
//! `gamma = (c_i + c_i*, -i(c_i - c_i*))`, so `a = S gamma / 2` with
//! `S = [[I, iI], [I, -iI]]`. Operators transform as `A_f = S^-1 A_c S`.

use nalgebra::SVD;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, RMatrix, I};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisTag {
    Majorana,
    CreationAnnihilation,
}

impl BasisTag {
    pub fn name(self) -> &'static str {
        match self {
            BasisTag::Majorana => "majorana",
            BasisTag::CreationAnnihilation => "creation-annihilation",
        }
    }
}

impl std::str::FromStr for BasisTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "majorana" => Ok(BasisTag::Majorana),
            "creation-annihilation" | "ca" => Ok(BasisTag::CreationAnnihilation),
            other => Err(Error::InvalidInput(format!("unknown basis `{other}`"))),
        }
    }
}

/// `S` for `l` modes.
pub fn ca_from_majorana_factor(l: usize) -> CMatrix {
    let id = CMatrix::identity(l, l);
    linalg::blocks(&id, &id.map(|z| z * I), &id, &id.map(|z| -z * I))
}

/// `S^-1 = S* / 2`.
pub fn majorana_from_ca_factor(l: usize) -> CMatrix {
    ca_from_majorana_factor(l).adjoint().scale(0.5)
}

fn even_half(n: usize) -> Result<usize> {
    if n % 2 == 1 {
        Err(Error::OddDimension(n))
    } else {
        Ok(n / 2)
    }
}

/// Expresses a 2L×2K matrix given in basis `from` in basis `to`.
pub fn convert_matrix(m: &CMatrix, from: BasisTag, to: BasisTag) -> Result<CMatrix> {
    let l = even_half(m.nrows())?;
    let k = even_half(m.ncols())?;
    Ok(convert_unchecked(m, l, k, from, to))
}

fn convert_unchecked(m: &CMatrix, l: usize, k: usize, from: BasisTag, to: BasisTag) -> CMatrix {
    match (from, to) {
        (BasisTag::CreationAnnihilation, BasisTag::Majorana) => {
            majorana_from_ca_factor(l) * m * ca_from_majorana_factor(k)
        }
        (BasisTag::Majorana, BasisTag::CreationAnnihilation) => {
            ca_from_majorana_factor(l) * m * majorana_from_ca_factor(k)
        }
        _ => m.clone(),
    }
}

/// Values that carry a basis tag and can be re-expressed in the other basis.
pub trait Structured: Sized {
    fn basis(&self) -> BasisTag;
    fn to_basis(&self, target: BasisTag) -> Self;
}

pub fn convert_basis<M: Structured>(m: &M, target: BasisTag) -> M {
    m.to_basis(target)
}

fn scale_of(m: &CMatrix) -> f64 {
    linalg::max_abs(m)
}

fn check(what: &'static str, residual: f64, scale: f64, tol: f64) -> Result<()> {
    if scale == 0.0 {
        return Ok(());
    }
    let rel = residual / scale;
    if rel > tol || !rel.is_finite() {
        Err(Error::StructureViolation { what, residual: rel })
    } else {
        Ok(())
    }
}

/// Real antisymmetric part `R` of a Majorana matrix `iR + noise`.
fn antisymmetric_imag(m: &CMatrix) -> RMatrix {
    let im = linalg::imag_part(m);
    (&im - im.transpose()).scale(0.5)
}

/// Relative residual of the Majorana-basis identity `m = iR`, `R^T = -R`.
fn majorana_qf_residual(m: &CMatrix) -> f64 {
    let re = linalg::max_abs_real(&linalg::real_part(m));
    let im = linalg::imag_part(m);
    let sym = linalg::max_abs_real(&(&im + im.transpose()));
    re.max(sym)
}

/// One-body matrix of a quadratic Hamiltonian (an element of QF(L)).
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    entries: CMatrix,
    basis: BasisTag,
    modes: usize,
}

impl HamiltonianMatrix {
    pub fn new(entries: CMatrix, basis: BasisTag) -> Result<Self> {
        validate_qf(&entries, basis)
    }

    /// `T_f = iR` for a real antisymmetric `R`.
    pub fn from_real_antisymmetric(r: &RMatrix) -> Result<Self> {
        validate_qf(&r.map(|x| Complex64::new(0.0, x)), BasisTag::Majorana)
    }

    pub fn zero(l: usize) -> Self {
        Self { entries: CMatrix::zeros(2 * l, 2 * l), basis: BasisTag::Majorana, modes: l }
    }

    /// Lift of a Hermitian L×L matrix `T0` (with `H = dGamma(T0)`), stored in
    /// the c/a basis as `diag(T0, -conj T0)`.
    pub fn from_gauge_invariant(t0: &CMatrix) -> Result<Self> {
        if !t0.is_square() {
            return Err(Error::DimensionMismatch("gauge-invariant Hamiltonian must be square".into()));
        }
        check_hermitian("gauge-invariant Hamiltonian", t0, tolerance::STRUCTURE)?;
        let t0 = linalg::hermitian_part(t0);
        let lifted = linalg::block_diag(&t0, &t0.map(|z| -z.conj()));
        validate_qf(&lifted, BasisTag::CreationAnnihilation)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn majorana(&self) -> CMatrix {
        convert_unchecked(&self.entries, self.modes, self.modes, self.basis, BasisTag::Majorana)
    }

    pub fn creation_annihilation(&self) -> CMatrix {
        convert_unchecked(
            &self.entries,
            self.modes,
            self.modes,
            self.basis,
            BasisTag::CreationAnnihilation,
        )
    }

    /// The real antisymmetric `R` with `T_f = iR`.
    pub fn real_antisymmetric(&self) -> RMatrix {
        antisymmetric_imag(&self.majorana())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { entries: self.entries.scale(s), basis: self.basis, modes: self.modes }
    }
}

impl Structured for HamiltonianMatrix {
    fn basis(&self) -> BasisTag {
        self.basis
    }

    fn to_basis(&self, target: BasisTag) -> Self {
        Self {
            entries: convert_unchecked(&self.entries, self.modes, self.modes, self.basis, target),
            basis: target,
            modes: self.modes,
        }
    }
}

fn check_hermitian(what: &'static str, m: &CMatrix, tol: f64) -> Result<()> {
    check(what, linalg::max_abs(&(m - m.adjoint())), scale_of(m), tol)
}

/// Validates a QF(L) matrix and returns it projected onto the exact structure.
pub fn validate_qf(m: &CMatrix, basis: BasisTag) -> Result<HamiltonianMatrix> {
    validate_qf_with(m, basis, tolerance::STRUCTURE)
}

pub fn validate_qf_with(m: &CMatrix, basis: BasisTag, tol: f64) -> Result<HamiltonianMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian matrix is {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let l = even_half(m.nrows())?;
    let scale = scale_of(m);
    let f = match basis {
        BasisTag::Majorana => {
            check("Majorana Hamiltonian", majorana_qf_residual(m), scale, tol)?;
            m.clone()
        }
        BasisTag::CreationAnnihilation => {
            let a = linalg::block(m, 0, 0, l, l);
            let b = linalg::block(m, 0, 1, l, l);
            let cc = linalg::block(m, 1, 0, l, l);
            let d = linalg::block(m, 1, 1, l, l);
            let residual = [
                linalg::max_abs(&(&a - a.adjoint())),
                linalg::max_abs(&(&b + b.transpose())),
                linalg::max_abs(&(&cc + b.conjugate())),
                linalg::max_abs(&(&d + a.conjugate())),
            ]
            .into_iter()
            .fold(0.0, f64::max);
            check("c/a Hamiltonian", residual, scale, tol)?;
            convert_unchecked(m, l, l, basis, BasisTag::Majorana)
        }
    };
    let r = antisymmetric_imag(&f);
    let projected = r.map(|x| Complex64::new(0.0, x));
    Ok(HamiltonianMatrix {
        entries: convert_unchecked(&projected, l, l, BasisTag::Majorana, basis),
        basis,
        modes: l,
    })
}

/// System-bath coupling matrix (2L×2K), `iW` with `W` real in the Majorana basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: CMatrix,
    basis: BasisTag,
    system_modes: usize,
    bath_modes: usize,
}

impl CouplingMatrix {
    pub fn new(entries: CMatrix, basis: BasisTag) -> Result<Self> {
        Self::new_with(entries, basis, tolerance::STRUCTURE)
    }

    pub fn new_with(entries: CMatrix, basis: BasisTag, tol: f64) -> Result<Self> {
        let l = even_half(entries.nrows())?;
        let k = even_half(entries.ncols())?;
        let f = convert_unchecked(&entries, l, k, basis, BasisTag::Majorana);
        let re = linalg::max_abs_real(&linalg::real_part(&f));
        check("coupling matrix", re, scale_of(&f), tol)?;
        let projected = f.map(|z| Complex64::new(0.0, z.im));
        Ok(Self {
            entries: convert_unchecked(&projected, l, k, BasisTag::Majorana, basis),
            basis,
            system_modes: l,
            bath_modes: k,
        })
    }

    /// `Theta_f = iW`.
    pub fn from_real(w: &RMatrix) -> Result<Self> {
        Self::new(w.map(|x| Complex64::new(0.0, x)), BasisTag::Majorana)
    }

    pub fn zero(l: usize, k: usize) -> Self {
        Self {
            entries: CMatrix::zeros(2 * l, 2 * k),
            basis: BasisTag::Majorana,
            system_modes: l,
            bath_modes: k,
        }
    }

    /// Lift of an L×K gauge-invariant coupling: `diag(Theta0, -conj Theta0)` in c/a.
    pub fn from_gauge_invariant(theta0: &CMatrix) -> Result<Self> {
        let lifted = linalg::block_diag(theta0, &theta0.map(|z| -z.conj()));
        Self::new(lifted, BasisTag::CreationAnnihilation)
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn system_modes(&self) -> usize {
        self.system_modes
    }

    pub fn bath_modes(&self) -> usize {
        self.bath_modes
    }

    pub fn majorana(&self) -> CMatrix {
        convert_unchecked(
            &self.entries,
            self.system_modes,
            self.bath_modes,
            self.basis,
            BasisTag::Majorana,
        )
    }

    pub fn creation_annihilation(&self) -> CMatrix {
        convert_unchecked(
            &self.entries,
            self.system_modes,
            self.bath_modes,
            self.basis,
            BasisTag::CreationAnnihilation,
        )
    }

    /// The real `W` with `Theta_f = iW`.
    pub fn real_part_w(&self) -> RMatrix {
        linalg::imag_part(&self.majorana())
    }
}

impl Structured for CouplingMatrix {
    fn basis(&self) -> BasisTag {
        self.basis
    }

    fn to_basis(&self, target: BasisTag) -> Self {
        Self {
            entries: convert_unchecked(
                &self.entries,
                self.system_modes,
                self.bath_modes,
                self.basis,
                target,
            ),
            basis: target,
            system_modes: self.system_modes,
            bath_modes: self.bath_modes,
        }
    }
}

/// Unitary on phase space commuting with particle-hole conjugation; real
/// orthogonal in the Majorana basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovTransform {
    entries: CMatrix,
    basis: BasisTag,
    modes: usize,
}

impl BogoliubovTransform {
    pub fn new(entries: CMatrix, basis: BasisTag) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch("Bogoliubov transform must be square".into()));
        }
        let l = even_half(entries.nrows())?;
        let n = entries.nrows();
        let unitarity = linalg::max_abs(&(&entries * entries.adjoint() - CMatrix::identity(n, n)));
        check("Bogoliubov unitarity", unitarity, 1.0, tolerance::STRUCTURE)?;
        let f = convert_unchecked(&entries, l, l, basis, BasisTag::Majorana);
        let imag = linalg::max_abs_real(&linalg::imag_part(&f));
        check("Bogoliubov reality", imag, 1.0, tolerance::STRUCTURE)?;
        let projected = f.map(|z| c(z.re));
        Ok(Self { entries: convert_unchecked(&projected, l, l, BasisTag::Majorana, basis), basis, modes: l })
    }

    pub fn from_orthogonal(o: &RMatrix) -> Result<Self> {
        Self::new(linalg::complexify(o), BasisTag::Majorana)
    }

    pub fn identity(l: usize) -> Self {
        Self { entries: CMatrix::identity(2 * l, 2 * l), basis: BasisTag::Majorana, modes: l }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn majorana(&self) -> CMatrix {
        convert_unchecked(&self.entries, self.modes, self.modes, self.basis, BasisTag::Majorana)
    }

    pub fn creation_annihilation(&self) -> CMatrix {
        convert_unchecked(
            &self.entries,
            self.modes,
            self.modes,
            self.basis,
            BasisTag::CreationAnnihilation,
        )
    }

    /// Real orthogonal Majorana form.
    pub fn orthogonal(&self) -> RMatrix {
        linalg::real_part(&self.majorana())
    }

    /// `self * other`, expressed in `self`'s basis.
    pub fn compose(&self, other: &BogoliubovTransform) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch("composing transforms of different sizes".into()));
        }
        let prod = &self.entries * other.to_basis(self.basis).entries;
        Self::new(prod, self.basis)
    }

    pub fn inverse(&self) -> Self {
        Self { entries: self.entries.adjoint(), basis: self.basis, modes: self.modes }
    }

    /// `U* M U` with `M` given in `basis`.
    pub fn conjugate(&self, m: &CMatrix, basis: BasisTag) -> CMatrix {
        let u = self.to_basis(basis).entries;
        u.adjoint() * m * u
    }
}

impl Structured for BogoliubovTransform {
    fn basis(&self) -> BasisTag {
        self.basis
    }

    fn to_basis(&self, target: BasisTag) -> Self {
        Self {
            entries: convert_unchecked(&self.entries, self.modes, self.modes, self.basis, target),
            basis: target,
            modes: self.modes,
        }
    }
}

/// Orthogonal reduction of a real antisymmetric matrix. Returns `O` whose first
/// half of columns are the `b` vectors and second half the `a` vectors, so that
/// `O^T R O = [[0, diag(lambda)], [-diag(lambda), 0]]` with `lambda >= 0`.
fn reduce_antisymmetric(r: &RMatrix, floor: f64) -> (RMatrix, Vec<f64>) {
    let n = r.nrows();
    let half = n / 2;
    let scale = linalg::max_abs_real(r);
    if n == 0 || scale <= floor {
        return (RMatrix::identity(n, n), vec![0.0; half]);
    }
    let h = r.map(|x| Complex64::new(0.0, x));
    let (vals, vecs) = linalg::hermitian_eigen(&h);
    let cut = 1e-6 * scale;
    let p = vals.iter().filter(|v| **v > cut).count().min(half);
    let z = n - 2 * p;

    let mut pairs: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::with_capacity(half);
    let sqrt2 = std::f64::consts::SQRT_2;
    for (idx, &val) in vals.iter().enumerate().skip(n - p) {
        let w = vecs.column(idx);
        let a: Vec<f64> = w.iter().map(|x| x.re * sqrt2).collect();
        let b: Vec<f64> = w.iter().map(|x| x.im * sqrt2).collect();
        pairs.push((val, b, a));
    }

    if z > 0 {
        // Real orthonormal basis of the near-kernel, then recurse on the
        // restricted (much smaller) antisymmetric matrix.
        let cluster = vecs.columns(p, z);
        let mut stacked = RMatrix::zeros(n, 2 * z);
        for j in 0..z {
            for i in 0..n {
                stacked[(i, j)] = cluster[(i, j)].re;
                stacked[(i, j + z)] = cluster[(i, j)].im;
            }
        }
        let svd = SVD::new(stacked, true, false);
        let u = svd.u.expect("requested U");
        let q = u.columns(0, z).into_owned();
        let r0 = q.transpose() * r * &q;
        let r0 = (&r0 - r0.transpose()).scale(0.5);
        let (o0, l0) = reduce_antisymmetric(&r0, floor);
        let qo = &q * o0;
        let zh = z / 2;
        for (m, lam) in l0.iter().enumerate() {
            let b: Vec<f64> = qo.column(m).iter().copied().collect();
            let a: Vec<f64> = qo.column(m + zh).iter().copied().collect();
            pairs.push((*lam, b, a));
        }
    }

    pairs.sort_by(|x, y| {
        y.0.total_cmp(&x.0).then_with(|| {
            x.1.iter()
                .zip(y.1.iter())
                .map(|(p, q)| p.total_cmp(q))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });

    let mut o = RMatrix::zeros(n, n);
    let mut lambdas = Vec::with_capacity(half);
    for (m, (lam, b, a)) in pairs.into_iter().enumerate() {
        for i in 0..n {
            o[(i, m)] = b[i];
            o[(i, m + half)] = a[i];
        }
        lambdas.push(lam);
    }
    (o, lambdas)
}

/// Block reduction of a quadratic Hamiltonian: returns a Bogoliubov transform
/// `U` (c/a basis) and `Lambda` (descending, non-negative) with
/// `U* T_c U = diag(Lambda, -Lambda)`.
pub fn block_reduce(t: &HamiltonianMatrix) -> (BogoliubovTransform, Vec<f64>) {
    let r = t.real_antisymmetric();
    let floor = 1e-15 * linalg::max_abs_real(&r);
    let (o, lambdas) = reduce_antisymmetric(&r, floor);
    let l = t.modes();
    let u = BogoliubovTransform {
        entries: convert_unchecked(&linalg::complexify(&o), l, l, BasisTag::Majorana, BasisTag::CreationAnnihilation),
        basis: BasisTag::CreationAnnihilation,
        modes: l,
    };
    (u, lambdas)
}

/// `diag(Lambda, -Lambda)` as a complex matrix.
pub fn reduced_form(lambdas: &[f64]) -> CMatrix {
    let l = lambdas.len();
    CMatrix::from_fn(2 * l, 2 * l, |i, j| {
        if i != j {
            c(0.0)
        } else if i < l {
            c(lambdas[i])
        } else {
            c(-lambdas[i - l])
        }
    })
}

/// Matrix exponential (Padé scaling and squaring).
pub fn expm(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("expm of a non-square matrix".into()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalFailure("expm input is not finite".into()));
    }
    let e = m.exp();
    if e.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericalFailure("expm overflowed".into()));
    }
    Ok(e)
}
