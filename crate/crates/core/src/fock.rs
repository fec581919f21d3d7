//! Exact dense Fock-space representation via Jordan-Wigner.
//!
//! Basis states `|u_1, ..., u_n>` are indexed by the binary number
//! `u_1 u_2 ... u_n` (site 1 is the most significant bit, i.e. the outermost
//! tensor factor). `c_i` carries the string `(-1)^{u_1 + ... + u_{i-1}}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{self, c, CMatrix, I};
use crate::phase::{BasisTag, HamiltonianMatrix};
use crate::quasifree::CovarianceMatrix;

/// Largest number of modes represented densely.
pub const N_DENSE_MAX: usize = 12;

fn check_modes(n: usize) -> Result<()> {
    if n > N_DENSE_MAX {
        Err(Error::TooLarge { modes: n, max: N_DENSE_MAX })
    } else {
        Ok(())
    }
}

/// Operator mapping each basis state to a phase times another basis state.
/// Majorana monomials have this form.
#[derive(Debug, Clone)]
pub(crate) struct SignedPermutation {
    target: Vec<usize>,
    phase: Vec<Complex64>,
}

impl SignedPermutation {
    fn identity(dim: usize) -> Self {
        Self { target: (0..dim).collect(), phase: vec![c(1.0); dim] }
    }

    /// `gamma_j` on `n` modes, `j < 2n`.
    pub(crate) fn majorana(n: usize, j: usize) -> Self {
        let dim = 1usize << n;
        let site = j % n;
        let shift = n - 1 - site;
        let mask = 1usize << shift;
        let string_mask = !((1usize << (shift + 1)) - 1) & (dim - 1);
        let mut target = Vec::with_capacity(dim);
        let mut phase = Vec::with_capacity(dim);
        for x in 0..dim {
            let sign = if (x & string_mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            let occupied = x & mask != 0;
            target.push(x ^ mask);
            let ph = if j < n {
                c(sign)
            } else if occupied {
                -I * sign
            } else {
                I * sign
            };
            phase.push(ph);
        }
        Self { target, phase }
    }

    /// `self * other`.
    fn then_after(&self, other: &SignedPermutation) -> Self {
        let dim = self.target.len();
        let mut target = Vec::with_capacity(dim);
        let mut phase = Vec::with_capacity(dim);
        for x in 0..dim {
            let y = other.target[x];
            target.push(self.target[y]);
            phase.push(other.phase[x] * self.phase[y]);
        }
        Self { target, phase }
    }

    fn to_dense(&self) -> CMatrix {
        let dim = self.target.len();
        let mut m = CMatrix::zeros(dim, dim);
        for x in 0..dim {
            m[(self.target[x], x)] = self.phase[x];
        }
        m
    }

    /// `tr(rho P)`.
    fn trace_against(&self, rho: &CMatrix) -> Complex64 {
        (0..self.target.len()).map(|x| rho[(x, self.target[x])] * self.phase[x]).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    entries: CMatrix,
    modes: usize,
}

impl DenseOperator {
    pub fn new(entries: CMatrix, modes: usize) -> Result<Self> {
        check_modes(modes)?;
        let dim = 1usize << modes;
        if entries.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, expected {dim}x{dim}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries, modes })
    }

    pub fn identity(modes: usize) -> Self {
        let dim = 1usize << modes;
        Self { entries: CMatrix::identity(dim, dim), modes }
    }

    pub fn zero(modes: usize) -> Self {
        let dim = 1usize << modes;
        Self { entries: CMatrix::zeros(dim, dim), modes }
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self { entries: self.entries.adjoint(), modes: self.modes }
    }

    pub fn mul(&self, other: &DenseOperator) -> Self {
        Self { entries: &self.entries * &other.entries, modes: self.modes }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { entries: self.entries.map(|z| z * s), modes: self.modes }
    }

    pub fn add(&self, other: &DenseOperator) -> Self {
        Self { entries: &self.entries + &other.entries, modes: self.modes }
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn anticommutator(&self, other: &DenseOperator) -> Self {
        Self {
            entries: &self.entries * &other.entries + &other.entries * &self.entries,
            modes: self.modes,
        }
    }

    pub fn commutator(&self, other: &DenseOperator) -> Self {
        Self {
            entries: &self.entries * &other.entries - &other.entries * &self.entries,
            modes: self.modes,
        }
    }
}

/// Density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    op: DenseOperator,
}

impl DenseState {
    pub fn new(op: DenseOperator) -> Result<Self> {
        let m = op.entries();
        let herm = linalg::max_abs(&(m - m.adjoint()));
        if herm > 1e-10 {
            return Err(Error::InvalidInput(format!("state is not Hermitian (residual {herm:.3e})")));
        }
        let tr = m.trace();
        if (tr - c(1.0)).norm() > 1e-10 {
            return Err(Error::InvalidInput(format!("state has trace {tr}")));
        }
        let (vals, _) = linalg::hermitian_eigen(m);
        if let Some(v) = vals.first() {
            if *v < -1e-10 {
                return Err(Error::NotPsd { eigenvalue: *v });
            }
        }
        Ok(Self { op: DenseOperator { entries: linalg::hermitian_part(m), modes: op.modes } })
    }

    /// Hermitizes and rescales to unit trace; used for outputs of exact maps.
    pub(crate) fn normalized(entries: CMatrix, modes: usize) -> Result<Self> {
        let h = linalg::hermitian_part(&entries);
        let tr = h.trace().re;
        if !tr.is_finite() || tr <= 0.0 {
            return Err(Error::NumericalFailure(format!("state trace {tr}")));
        }
        Ok(Self { op: DenseOperator { entries: h.unscale(tr), modes } })
    }

    pub fn maximally_mixed(modes: usize) -> Result<Self> {
        check_modes(modes)?;
        let dim = 1usize << modes;
        Ok(Self { op: DenseOperator { entries: CMatrix::identity(dim, dim).unscale(dim as f64), modes } })
    }

    /// All modes empty: `|0...0><0...0|`.
    pub fn vacuum(modes: usize) -> Result<Self> {
        check_modes(modes)?;
        let dim = 1usize << modes;
        let mut m = CMatrix::zeros(dim, dim);
        m[(0, 0)] = c(1.0);
        Ok(Self { op: DenseOperator { entries: m, modes } })
    }

    pub fn op(&self) -> &DenseOperator {
        &self.op
    }

    pub fn entries(&self) -> &CMatrix {
        self.op.entries()
    }

    pub fn modes(&self) -> usize {
        self.op.modes()
    }

    /// `tr(rho A)`.
    pub fn expectation(&self, a: &DenseOperator) -> Complex64 {
        (self.entries() * a.entries()).trace()
    }

    /// `tr(rho gamma_{i_1} ... gamma_{i_k})`.
    pub fn majorana_moment(&self, indices: &[usize]) -> Complex64 {
        let n = self.modes();
        let mut p = SignedPermutation::identity(1 << n);
        for &i in indices {
            p = p.then_after(&SignedPermutation::majorana(n, i));
        }
        p.trace_against(self.entries())
    }
}

/// Identification of the joint CAR algebra with `H_S ⊗ H_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IsomorphismTag {
    /// `c^S -> c ⊗ I`, `c^B -> (-1)^{N_S} ⊗ c`.
    SB,
    /// `c^S -> c ⊗ (-1)^{N_B}`, `c^B -> I ⊗ c`.
    BS,
    /// Bath split as `B1 S B2`: the first `left_modes` bath modes precede the
    /// system in the ordering, the rest follow it.
    B1SB2 { left_modes: usize },
}

impl IsomorphismTag {
    pub fn name(self) -> String {
        match self {
            IsomorphismTag::SB => "sb".into(),
            IsomorphismTag::BS => "bs".into(),
            IsomorphismTag::B1SB2 { left_modes } => format!("b1sb2:{left_modes}"),
        }
    }

    /// Bath modes whose coupling picks up the `(-1)^{N_S}` twist.
    pub(crate) fn twisted_bath_modes(self, k: usize) -> Result<std::ops::Range<usize>> {
        match self {
            IsomorphismTag::SB => Ok(0..k),
            IsomorphismTag::BS => Ok(0..0),
            IsomorphismTag::B1SB2 { left_modes } => {
                if left_modes == 0 || left_modes >= k {
                    Err(Error::UnsupportedIso(format!(
                        "split embedding needs 0 < left_modes < {k}, got {left_modes}"
                    )))
                } else {
                    Ok(left_modes..k)
                }
            }
        }
    }

    /// Bath modes moved in front of the system relative to the system-first ordering.
    fn leading_bath_modes(self, k: usize) -> Result<std::ops::Range<usize>> {
        match self {
            IsomorphismTag::SB => Ok(0..0),
            IsomorphismTag::BS => Ok(0..k),
            IsomorphismTag::B1SB2 { left_modes } => {
                self.twisted_bath_modes(k)?;
                Ok(0..left_modes)
            }
        }
    }
}

impl std::str::FromStr for IsomorphismTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "sb" | "e_sb" => Ok(IsomorphismTag::SB),
            "bs" | "e_bs" => Ok(IsomorphismTag::BS),
            "b1sb2" | "e_b1sb2" => Ok(IsomorphismTag::B1SB2 { left_modes: 1 }),
            _ => {
                if let Some(rest) = lower.strip_prefix("b1sb2:") {
                    let left_modes = rest
                        .parse()
                        .map_err(|_| Error::InvalidInput(format!("bad split in `{s}`")))?;
                    Ok(IsomorphismTag::B1SB2 { left_modes })
                } else {
                    Err(Error::InvalidInput(format!("unknown isomorphism `{s}`")))
                }
            }
        }
    }
}

pub fn majorana_ops(n: usize) -> Result<Vec<DenseOperator>> {
    check_modes(n)?;
    Ok((0..2 * n)
        .map(|j| DenseOperator { entries: SignedPermutation::majorana(n, j).to_dense(), modes: n })
        .collect())
}

/// `c_1, ..., c_n`.
pub fn annihilators(n: usize) -> Result<Vec<DenseOperator>> {
    let g = majorana_ops(n)?;
    Ok((0..n)
        .map(|i| {
            let m = (g[i].entries() + g[i + n].entries().map(|z| z * I)).scale(0.5);
            DenseOperator { entries: m, modes: n }
        })
        .collect())
}

/// Diagonal of `(-1)^{sum over sites of u_i}` restricted to the given sites.
fn parity_diagonal(n: usize, sites: std::ops::Range<usize>) -> Vec<f64> {
    let mut mask = 0usize;
    for s in sites {
        mask |= 1 << (n - 1 - s);
    }
    (0..1usize << n).map(|x| if (x & mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 }).collect()
}

/// `(-1)^N`.
pub fn parity(n: usize) -> Result<DenseOperator> {
    check_modes(n)?;
    let d = parity_diagonal(n, 0..n);
    let dim = d.len();
    Ok(DenseOperator {
        entries: CMatrix::from_fn(dim, dim, |i, j| c(if i == j { d[i] } else { 0.0 })),
        modes: n,
    })
}

/// `N = sum_i c_i* c_i`.
pub fn number_operator(n: usize) -> Result<DenseOperator> {
    check_modes(n)?;
    let dim = 1usize << n;
    Ok(DenseOperator {
        entries: CMatrix::from_fn(dim, dim, |i, j| c(if i == j { i.count_ones() as f64 } else { 0.0 })),
        modes: n,
    })
}

/// `prefactor/2 * sum_ij K_ij gamma_i gamma_j` for a 2n×2n Majorana matrix `K`.
pub(crate) fn majorana_quadratic(k: &CMatrix, n: usize, prefactor: f64) -> Result<DenseOperator> {
    check_modes(n)?;
    let dim = 1usize << n;
    let gammas: Vec<SignedPermutation> = (0..2 * n).map(|j| SignedPermutation::majorana(n, j)).collect();
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..2 * n {
        for j in 0..2 * n {
            let kij = k[(i, j)];
            if kij == c(0.0) {
                continue;
            }
            let p = gammas[i].then_after(&gammas[j]);
            let w = kij * (0.5 * prefactor);
            for x in 0..dim {
                h[(p.target[x], x)] += w * p.phase[x];
            }
        }
    }
    Ok(DenseOperator { entries: linalg::hermitian_part(&h), modes: n })
}

/// `prefactor * a* T_c a = prefactor/2 * sum (T_f)_ij gamma_i gamma_j`.
pub fn quadratic_hamiltonian(t: &HamiltonianMatrix, prefactor: f64) -> Result<DenseOperator> {
    majorana_quadratic(&t.majorana(), t.modes(), prefactor)
}

/// `exp(-beta H) / Z`.
pub fn gibbs_state(h: &DenseOperator, beta: f64) -> Result<DenseState> {
    if !beta.is_finite() {
        return Err(Error::InvalidInput("beta must be finite".into()));
    }
    let (vals, _) = linalg::hermitian_eigen(h.entries());
    let shift = vals.first().copied().unwrap_or(0.0);
    let shift = if beta >= 0.0 { shift } else { vals.last().copied().unwrap_or(0.0) };
    let rho = linalg::hermitian_function(h.entries(), |x| (-beta * (x - shift)).exp());
    DenseState::normalized(rho, h.modes())
}

/// The quasi-free state with covariance `m`. Pure directions (eigenvalues 0 or
/// 1) are approximated by eigenvalues `1e-14` away from the boundary.
pub fn gaussian_state(m: &CovarianceMatrix) -> Result<DenseState> {
    check_modes(m.modes())?;
    let edge = 1.0 - 2e-14;
    // 1/2 ln(mu / (1 - mu)) in odd form so that mu and 1 - mu map to exact negatives
    let t = linalg::hermitian_function(&m.creation_annihilation(), |mu| (2.0 * mu - 1.0).clamp(-edge, edge).atanh());
    let t = HamiltonianMatrix::new(t, BasisTag::CreationAnnihilation)?;
    gibbs_state(&quadratic_hamiltonian(&t, 1.0)?, 1.0)
}

/// Diagonal unitary `(-1)^{N_S N_X}` on the system-first tensor product, where
/// `X` is the given set of bath modes.
fn crossing_signs(l: usize, k: usize, bath: std::ops::Range<usize>) -> Vec<f64> {
    let ns = parity_diagonal(l, 0..l);
    let nb = parity_diagonal(k, bath);
    let db = nb.len();
    (0..ns.len() * db)
        .map(|x| if ns[x / db] < 0.0 && nb[x % db] < 0.0 { -1.0 } else { 1.0 })
        .collect()
}

fn conjugate_by_signs(m: &CMatrix, s: &[f64]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * (s[i] * s[j]))
}

/// Joint-algebra element (as a matrix in the system-first Jordan-Wigner
/// ordering) whose image under `iso` is `op_s ⊗ op_b`.
pub fn embed(op_s: &DenseOperator, op_b: &DenseOperator, iso: IsomorphismTag) -> Result<DenseOperator> {
    let (l, k) = (op_s.modes(), op_b.modes());
    check_modes(l + k)?;
    let s = crossing_signs(l, k, iso.leading_bath_modes(k)?);
    let prod = linalg::kron(op_s.entries(), op_b.entries());
    Ok(DenseOperator { entries: conjugate_by_signs(&prod, &s), modes: l + k })
}

/// Image under `iso` of a joint-algebra element given in the system-first
/// Jordan-Wigner ordering.
pub fn to_tensor(joint: &DenseOperator, l: usize, iso: IsomorphismTag) -> Result<DenseOperator> {
    if l > joint.modes() {
        return Err(Error::DimensionMismatch("system larger than joint space".into()));
    }
    let k = joint.modes() - l;
    let s = crossing_signs(l, k, iso.leading_bath_modes(k)?);
    Ok(DenseOperator { entries: conjugate_by_signs(joint.entries(), &s), modes: joint.modes() })
}

/// `Tr_B` on `H_S ⊗ H_B` with the system as the outer factor.
pub fn partial_trace_bath(rho: &DenseState, l: usize, k: usize) -> Result<DenseState> {
    if rho.modes() != l + k {
        return Err(Error::DimensionMismatch(format!(
            "state has {} modes, expected {}",
            rho.modes(),
            l + k
        )));
    }
    let ds = 1usize << l;
    let db = 1usize << k;
    let m = rho.entries();
    let out = CMatrix::from_fn(ds, ds, |i, j| (0..db).map(|b| m[(i * db + b, j * db + b)]).sum());
    Ok(DenseState { op: DenseOperator { entries: out, modes: l } })
}

/// Covariance `1/2 tr(rho gamma_i gamma_j)` (Majorana basis).
pub fn covariance_of(rho: &DenseState) -> Result<CovarianceMatrix> {
    let exec = if rho.modes() >= 6 { Execution::Parallel } else { Execution::Sequential };
    covariance_of_with(rho, exec)
}

pub fn covariance_of_with(rho: &DenseState, exec: Execution) -> Result<CovarianceMatrix> {
    let n = rho.modes();
    let gammas: Vec<SignedPermutation> = (0..2 * n).map(|j| SignedPermutation::majorana(n, j)).collect();
    let m = rho.entries();
    let rows = exec.map_range(2 * n, |i| {
        (0..2 * n)
            .map(|j| gammas[i].then_after(&gammas[j]).trace_against(m) * 0.5)
            .collect::<Vec<_>>()
    });
    let cov = CMatrix::from_fn(2 * n, 2 * n, |i, j| rows[i][j]);
    CovarianceMatrix::new(cov, BasisTag::Majorana)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
        linalg::max_abs(&(a - b))
    }

    #[test]
    fn single_mode_majoranas_are_pauli_like() {
        let g = majorana_ops(1).unwrap();
        let x = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]);
        let y = CMatrix::from_row_slice(2, 2, &[c(0.0), -I, I, c(0.0)]);
        assert_eq!(g[0].entries(), &x);
        assert_eq!(g[1].entries(), &y);
    }

    #[test]
    fn canonical_anticommutation() {
        for n in 1..=3 {
            let g = majorana_ops(n).unwrap();
            let id = CMatrix::identity(1 << n, 1 << n);
            for i in 0..2 * n {
                assert_eq!(max_dev(g[i].entries(), &g[i].adjoint().entries), 0.0);
                for j in 0..2 * n {
                    let ac = g[i].anticommutator(&g[j]);
                    let expect = if i == j { id.scale(2.0) } else { CMatrix::zeros(1 << n, 1 << n) };
                    assert_eq!(ac.entries(), &expect);
                }
            }
            let cs = annihilators(n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let ac = cs[i].anticommutator(&cs[j].adjoint());
                    let expect = if i == j { id.clone() } else { CMatrix::zeros(1 << n, 1 << n) };
                    assert_eq!(ac.entries(), &expect);
                    assert_eq!(cs[i].anticommutator(&cs[j]).entries(), &CMatrix::zeros(1 << n, 1 << n));
                }
            }
        }
    }

    #[test]
    fn annihilator_matches_occupation_string() {
        // c_2 on |1,1> = -|1,0>
        let cs = annihilators(2).unwrap();
        assert_eq!(cs[1].entries()[(2, 3)], c(-1.0));
        assert_eq!(cs[0].entries()[(1, 3)], c(1.0));
    }

    #[test]
    fn single_majoranas_are_traceless() {
        for g in majorana_ops(3).unwrap() {
            assert_eq!(g.trace(), c(0.0));
        }
    }

    #[test]
    fn gauge_invariant_single_mode_hamiltonian() {
        let eps = 0.7;
        let t = HamiltonianMatrix::from_gauge_invariant(&CMatrix::from_element(1, 1, c(eps))).unwrap();
        let h = quadratic_hamiltonian(&t, 1.0).unwrap();
        let cs = annihilators(1).unwrap();
        let cd = cs[0].adjoint();
        let direct = cd.mul(&cs[0]).add(&cs[0].mul(&cd).scale(c(-1.0))).scale(c(eps));
        assert!(max_dev(h.entries(), direct.entries()) < 1e-15);
    }

    #[test]
    fn vacuum_covariance() {
        let cov = covariance_of(&DenseState::vacuum(2).unwrap()).unwrap();
        assert!(cov.distance(&CovarianceMatrix::vacuum(2)) < 1e-15);
        let mixed = covariance_of(&DenseState::maximally_mixed(3).unwrap()).unwrap();
        assert!(mixed.distance(&CovarianceMatrix::half(3)) < 1e-15);
    }

    #[test]
    fn gibbs_single_mode_occupation() {
        let t = HamiltonianMatrix::from_gauge_invariant(&CMatrix::from_element(1, 1, c(1.0))).unwrap();
        // exp(-beta c*c) = exp(-beta * (1/2)(a* T a) - beta/2)
        let h = quadratic_hamiltonian(&t, 0.5).unwrap();
        let rho = gibbs_state(&h, 2f64.ln()).unwrap();
        let n = number_operator(1).unwrap();
        assert!((rho.expectation(&n) - c(1.0 / 3.0)).norm() < 1e-15);
        let mm = gibbs_state(&h, 0.0).unwrap();
        assert!(max_dev(mm.entries(), DenseState::maximally_mixed(1).unwrap().entries()) < 1e-15);
    }

    #[test]
    fn bs_embedding_images() {
        let c1 = annihilators(1).unwrap().remove(0);
        let id = DenseOperator::identity(1);
        let p = parity(1).unwrap();
        let joint = annihilators(2).unwrap();
        let cs_img = to_tensor(&joint[0], 1, IsomorphismTag::BS).unwrap();
        let cb_img = to_tensor(&joint[1], 1, IsomorphismTag::BS).unwrap();
        assert!(max_dev(cs_img.entries(), &linalg::kron(c1.entries(), p.entries())) < 1e-15);
        assert!(max_dev(cb_img.entries(), &linalg::kron(id.entries(), c1.entries())) < 1e-15);
        assert!(linalg::max_abs(cs_img.anticommutator(&cb_img).entries()) < 1e-15);
        let sb_b = to_tensor(&joint[1], 1, IsomorphismTag::SB).unwrap();
        assert!(max_dev(sb_b.entries(), &linalg::kron(p.entries(), c1.entries())) < 1e-15);
        let back = embed(&c1, &id, IsomorphismTag::BS).unwrap();
        let expect = to_tensor(&DenseOperator::new(linalg::kron(c1.entries(), id.entries()), 2).unwrap(), 1, IsomorphismTag::BS)
            .unwrap();
        assert!(max_dev(back.entries(), expect.entries()) < 1e-15);
    }

    #[test]
    fn identity_embeds_to_identity() {
        for iso in [IsomorphismTag::SB, IsomorphismTag::BS, IsomorphismTag::B1SB2 { left_modes: 1 }] {
            let e = embed(&DenseOperator::identity(1), &DenseOperator::identity(2), iso).unwrap();
            assert_eq!(e.entries(), DenseOperator::identity(3).entries());
        }
        assert!(matches!(
            embed(&DenseOperator::identity(1), &DenseOperator::identity(1), IsomorphismTag::B1SB2 { left_modes: 1 }),
            Err(Error::UnsupportedIso(_))
        ));
    }

    #[test]
    fn partial_trace_of_product() {
        let a = gibbs_state(&number_operator(1).unwrap(), 0.4).unwrap();
        let b = DenseState::vacuum(2).unwrap();
        let prod = DenseState::new(DenseOperator::new(linalg::kron(a.entries(), b.entries()), 3).unwrap()).unwrap();
        let red = partial_trace_bath(&prod, 1, 2).unwrap();
        assert!(max_dev(red.entries(), a.entries()) < 1e-15);
        let mm = partial_trace_bath(&DenseState::maximally_mixed(3).unwrap(), 2, 1).unwrap();
        assert!(max_dev(mm.entries(), DenseState::maximally_mixed(2).unwrap().entries()) < 1e-15);
        assert!(partial_trace_bath(&mm, 1, 2).is_err());
    }

    #[test]
    fn too_many_modes() {
        assert_eq!(majorana_ops(13).unwrap_err(), Error::TooLarge { modes: 13, max: N_DENSE_MAX });
    }
}
