//! Brute-force reference dynamics on the dense Fock space: the Lindblad
//! generator of a quasi-free semigroup, its exact exponential, and the
//! repeated-interaction step map.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    self, majorana_quadratic, partial_trace_bath, DenseOperator, DenseState, IsomorphismTag, N_DENSE_MAX,
};
use crate::lindblad::SemigroupSpec;
use crate::linalg::{self, c, CMatrix, I};
use crate::phase::expm;
use crate::tolerance;

/// Largest system handled by [`build_lindbladian`] (superoperators are `4^L` square).
pub const MAX_ORACLE_MODES: usize = 6;

/// Prefactor of `a* T_S a` in the system Hamiltonian that makes the dense
/// commutator reproduce `-i[T_S, M]` on covariances.
pub const HAMILTONIAN_PREFACTOR: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct DenseLindbladian {
    hamiltonian: DenseOperator,
    jump_ops: Vec<DenseOperator>,
    iso: IsomorphismTag,
}

/// Majorana indices of the given bath modes within `0..2K`.
fn bath_indices(k: usize, modes: std::ops::Range<usize>) -> Vec<usize> {
    modes.clone().chain(modes.map(|j| j + k)).collect()
}

fn sub_matrix(m: &CMatrix, rows: &[usize], cols: &[usize]) -> CMatrix {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Jump operators `sqrt(lambda/2) * sum_j conj(u_j) gamma_j` for the eigenpairs
/// of `P_X = Theta_X M_X Theta_X*`, optionally followed by `(-1)^N`.
fn jumps_for(
    spec: &SemigroupSpec,
    modes: std::ops::Range<usize>,
    twisted: bool,
    gammas: &[DenseOperator],
    parity: &DenseOperator,
) -> Result<Vec<DenseOperator>> {
    let k = spec.bath_modes();
    let l = spec.modes();
    let idx = bath_indices(k, modes);
    if idx.is_empty() {
        return Ok(Vec::new());
    }
    let theta = spec.theta().majorana();
    let rows: Vec<usize> = (0..2 * l).collect();
    let th = sub_matrix(&theta, &rows, &idx);
    let mb = sub_matrix(&spec.m_b().majorana(), &idx, &idx);
    let p = linalg::hermitian_part(&(&th * mb * th.adjoint()));
    let (vals, vecs) = linalg::hermitian_eigen(&p);
    let floor = 1e-14 * linalg::max_abs(&p).max(1.0);
    let mut out = Vec::new();
    for (n, lambda) in vals.iter().enumerate() {
        if *lambda < -tolerance::JUMP_CLAMP {
            return Err(Error::NotPsd { eigenvalue: *lambda });
        }
        if *lambda <= floor {
            continue;
        }
        let amp = (lambda / 2.0).sqrt();
        let mut j = CMatrix::zeros(1 << l, 1 << l);
        for (a, g) in gammas.iter().enumerate() {
            j += g.entries() * (vecs[(a, n)].conj() * amp);
        }
        if twisted {
            j *= parity.entries();
        }
        out.push(DenseOperator::new(j, l)?);
    }
    Ok(out)
}

/// Dense generator `L(rho) = -i[H_S, rho] + sum J rho J* - 1/2 {J* J, rho}` of
/// the semigroup whose covariance dynamics is `spec`.
pub fn build_lindbladian(spec: &SemigroupSpec, iso: IsomorphismTag) -> Result<DenseLindbladian> {
    let l = spec.modes();
    let k = spec.bath_modes();
    if l > MAX_ORACLE_MODES {
        return Err(Error::TooLarge { modes: l, max: MAX_ORACLE_MODES });
    }
    let twisted = iso.twisted_bath_modes(k)?;
    if twisted.start > 0 && twisted.end == k && twisted.start < k {
        // split bath: the two parts must be uncorrelated
        let mb = spec.m_b().majorana();
        let left = bath_indices(k, 0..twisted.start);
        let right = bath_indices(k, twisted.clone());
        let cross = linalg::max_abs(&sub_matrix(&mb, &left, &right));
        if cross > tolerance::STRUCTURE {
            return Err(Error::InvalidInput(format!(
                "split embedding needs a product bath (cross covariance {cross:.3e})"
            )));
        }
    }
    let hamiltonian = fock::quadratic_hamiltonian(spec.t_s(), HAMILTONIAN_PREFACTOR)?;
    let gammas = fock::majorana_ops(l)?;
    let parity = fock::parity(l)?;
    let mut jump_ops = Vec::new();
    if twisted.start == 0 && twisted.end == k {
        jump_ops.extend(jumps_for(spec, 0..k, true, &gammas, &parity)?);
    } else if twisted.is_empty() {
        jump_ops.extend(jumps_for(spec, 0..k, false, &gammas, &parity)?);
    } else {
        jump_ops.extend(jumps_for(spec, 0..twisted.start, false, &gammas, &parity)?);
        jump_ops.extend(jumps_for(spec, twisted, true, &gammas, &parity)?);
    }
    Ok(DenseLindbladian { hamiltonian, jump_ops, iso })
}

impl DenseLindbladian {
    pub fn hamiltonian(&self) -> &DenseOperator {
        &self.hamiltonian
    }

    pub fn jump_ops(&self) -> &[DenseOperator] {
        &self.jump_ops
    }

    pub fn iso(&self) -> IsomorphismTag {
        self.iso
    }

    pub fn modes(&self) -> usize {
        self.hamiltonian.modes()
    }

    fn damping(&self) -> CMatrix {
        let d = self.hamiltonian.dim();
        let mut k = CMatrix::zeros(d, d);
        for j in &self.jump_ops {
            k += j.entries().adjoint() * j.entries();
        }
        k
    }

    /// `L(rho)`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let h = self.hamiltonian.entries();
        let k = self.damping();
        let mut out = (h * rho - rho * h) * -I - (&k * rho + rho * &k).scale(0.5);
        for j in &self.jump_ops {
            out += j.entries() * rho * j.entries().adjoint();
        }
        out
    }

    /// Matrix of `L` acting on column-stacked density matrices.
    pub fn superoperator(&self) -> CMatrix {
        let d = self.hamiltonian.dim();
        let id = CMatrix::identity(d, d);
        let h = self.hamiltonian.entries();
        let k = self.damping();
        let mut s = linalg::kron(&id, h) * -I + linalg::kron(&h.transpose(), &id) * I;
        s -= (linalg::kron(&id, &k) + linalg::kron(&k.transpose(), &id)).scale(0.5);
        for j in &self.jump_ops {
            s += linalg::kron(&j.entries().conjugate(), j.entries());
        }
        s
    }

    /// `exp(t L)` as a matrix on column-stacked density matrices.
    pub fn propagator(&self, t: f64) -> Result<CMatrix> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::InvalidInput(format!("time must be finite and non-negative, got {t}")));
        }
        expm(&self.superoperator().scale(t))
    }
}

fn apply_propagator(e: &CMatrix, rho: &DenseState) -> Result<DenseState> {
    let d = rho.op().dim();
    let v = e * linalg::vec_columns(rho.entries());
    let out = linalg::unvec_columns(&v, d, d);
    let tr = out.trace();
    if (tr - c(1.0)).norm() > 1e-8 {
        return Err(Error::NumericalFailure(format!("evolved trace {tr}")));
    }
    DenseState::normalized(out, rho.modes())
}

/// `exp(t L) rho0`.
pub fn evolve_dense(lind: &DenseLindbladian, rho0: &DenseState, t: f64) -> Result<DenseState> {
    if rho0.modes() != lind.modes() {
        return Err(Error::DimensionMismatch("state and generator sizes differ".into()));
    }
    apply_propagator(&lind.propagator(t)?, rho0)
}

/// Evolution sampled at several times, reusing one superoperator.
pub fn evolve_dense_many(lind: &DenseLindbladian, rho0: &DenseState, times: &[f64]) -> Result<Vec<DenseState>> {
    if rho0.modes() != lind.modes() {
        return Err(Error::DimensionMismatch("state and generator sizes differ".into()));
    }
    let s = lind.superoperator();
    times
        .iter()
        .map(|t| {
            if *t < 0.0 || !t.is_finite() {
                return Err(Error::InvalidInput(format!("time must be finite and non-negative, got {t}")));
            }
            apply_propagator(&expm(&s.scale(*t))?, rho0)
        })
        .collect()
}

/// Kernel of the generator, normalized to a state.
pub fn stationary_dense(lind: &DenseLindbladian) -> Result<DenseState> {
    let s = lind.superoperator();
    let d = lind.hamiltonian().dim();
    let svd = s.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|a, b| svd.singular_values[*a].total_cmp(&svd.singular_values[*b]));
    let smax = svd.singular_values[order[order.len() - 1]];
    if order.len() > 1 && svd.singular_values[order[1]] <= 1e-10 * smax {
        return Err(Error::NonUniqueStationary { pivot: svd.singular_values[order[1]] / smax });
    }
    let null = v_t.row(order[0]).adjoint();
    let rho = linalg::unvec_columns(&null, d, d);
    let tr = rho.trace();
    if tr.norm() < 1e-12 {
        return Err(Error::NumericalFailure("kernel vector is traceless".into()));
    }
    DenseState::normalized(rho.map(|z| z / tr), lind.modes())
}

/// One step `rho -> Tr_B(U (rho ⊗ omega) U*)` of the repeated-interaction
/// process with `U = exp(-i tau (H_S + V / sqrt(tau)))` (no free bath
/// Hamiltonian) and `V = 1/2 * sum Theta_ab gamma^S_a gamma^B_b + h.c.` in
/// Majorana form.
#[derive(Debug, Clone)]
pub struct RepeatedInteraction {
    system_modes: usize,
    bath_modes: usize,
    unitary: CMatrix,
    omega: CMatrix,
}

pub fn repeated_interaction_step(
    spec: &SemigroupSpec,
    omega: &DenseState,
    tau: f64,
    iso: IsomorphismTag,
) -> Result<RepeatedInteraction> {
    let l = spec.modes();
    let k = spec.bath_modes();
    let n = l + k;
    if n > N_DENSE_MAX {
        return Err(Error::TooLarge { modes: n, max: N_DENSE_MAX });
    }
    if tau <= 0.0 || !tau.is_finite() {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    if omega.modes() != k {
        return Err(Error::DimensionMismatch(format!("bath state has {} modes, spec has {k}", omega.modes())));
    }
    for j in 0..2 * k {
        let m = omega.majorana_moment(&[j]);
        if m.norm() > 1e-10 {
            return Err(Error::InvalidInput(format!("bath state has a nonzero odd moment {m}")));
        }
    }
    let cov = fock::covariance_of(omega)?;
    let dev = cov.distance(spec.m_b());
    if dev > 1e-8 {
        return Err(Error::InvalidInput(format!("bath state covariance differs from M_B by {dev:.3e}")));
    }
    let sys = |a: usize| if a < l { a } else { n + a - l };
    let bath = |b: usize| if b < k { l + b } else { n + l + b - k };
    let t = spec.t_s().majorana();
    let theta = spec.theta().majorana().scale(1.0 / tau.sqrt());
    let mut kmat = CMatrix::zeros(2 * n, 2 * n);
    for a in 0..2 * l {
        for a2 in 0..2 * l {
            kmat[(sys(a), sys(a2))] = t[(a, a2)];
        }
        for b in 0..2 * k {
            kmat[(sys(a), bath(b))] = theta[(a, b)];
            kmat[(bath(b), sys(a))] = theta[(a, b)].conj();
        }
    }
    let h_joint = majorana_quadratic(&kmat, n, HAMILTONIAN_PREFACTOR)?;
    let h = fock::to_tensor(&h_joint, l, iso)?;
    let (vals, vecs) = linalg::hermitian_eigen(h.entries());
    let mut scaled = vecs.clone();
    for (j, v) in vals.iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0);
        let phase = Complex64::new(0.0, -tau * v).exp();
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= phase;
        }
    }
    let unitary = scaled * vecs.adjoint();
    Ok(RepeatedInteraction { system_modes: l, bath_modes: k, unitary, omega: omega.entries().clone() })
}

impl RepeatedInteraction {
    pub fn apply(&self, rho: &DenseState) -> Result<DenseState> {
        if rho.modes() != self.system_modes {
            return Err(Error::DimensionMismatch("state size differs from the system".into()));
        }
        let joint = linalg::kron(rho.entries(), &self.omega);
        let evolved = &self.unitary * joint * self.unitary.adjoint();
        let joint_state = DenseState::normalized(evolved, self.system_modes + self.bath_modes)?;
        partial_trace_bath(&joint_state, self.system_modes, self.bath_modes)
    }

    pub fn iterate(&self, rho: &DenseState, steps: usize) -> Result<DenseState> {
        let mut cur = rho.clone();
        for _ in 0..steps {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{covariance_of, gaussian_state};
    use crate::linalg::RMatrix;
    use crate::phase::{CouplingMatrix, HamiltonianMatrix};
    use crate::quasifree::{CovarianceMatrix, SmallCovarianceMatrix};

    fn spec_l1() -> SemigroupSpec {
        let r = RMatrix::from_row_slice(2, 2, &[0.0, 0.9, -0.9, 0.0]);
        let w = RMatrix::from_row_slice(2, 2, &[0.6, 0.0, 0.0, 0.6]);
        SemigroupSpec::new(
            HamiltonianMatrix::from_real_antisymmetric(&r).unwrap(),
            CouplingMatrix::from_real(&w).unwrap(),
            CovarianceMatrix::from_small(&SmallCovarianceMatrix::diagonal(&[0.3]).unwrap()),
        )
        .unwrap()
    }

    #[test]
    fn uncoupled_generator_is_a_commutator() {
        let r = RMatrix::from_row_slice(2, 2, &[0.0, 0.9, -0.9, 0.0]);
        let spec = SemigroupSpec::new(
            HamiltonianMatrix::from_real_antisymmetric(&r).unwrap(),
            CouplingMatrix::zero(1, 1),
            CovarianceMatrix::half(1),
        )
        .unwrap();
        let lind = build_lindbladian(&spec, IsomorphismTag::SB).unwrap();
        assert!(lind.jump_ops().is_empty());
    }

    #[test]
    fn thermal_single_mode_has_two_jumps() {
        let lind = build_lindbladian(&spec_l1(), IsomorphismTag::SB).unwrap();
        assert_eq!(lind.jump_ops().len(), 2);
    }

    #[test]
    fn generator_is_trace_free() {
        let lind = build_lindbladian(&spec_l1(), IsomorphismTag::BS).unwrap();
        let rho = gaussian_state(&CovarianceMatrix::from_small(&SmallCovarianceMatrix::diagonal(&[0.8]).unwrap()))
            .unwrap();
        assert!(lind.apply(rho.entries()).trace().norm() < 1e-14);
    }

    #[test]
    fn evolution_tracks_covariance_flow() {
        let spec = spec_l1();
        let rho0 = gaussian_state(&CovarianceMatrix::from_small(&SmallCovarianceMatrix::diagonal(&[0.9]).unwrap()))
            .unwrap();
        let m0 = covariance_of(&rho0).unwrap();
        for iso in [IsomorphismTag::SB, IsomorphismTag::BS] {
            let lind = build_lindbladian(&spec, iso).unwrap();
            let rho = evolve_dense(&lind, &rho0, 0.8).unwrap();
            let fast = crate::lindblad::propagate(&spec, &m0, 0.8).unwrap();
            assert!(covariance_of(&rho).unwrap().distance(&fast) < 1e-12);
        }
    }

    #[test]
    fn stationary_kernel_matches_lyapunov() {
        let spec = spec_l1();
        let lind = build_lindbladian(&spec, IsomorphismTag::SB).unwrap();
        let rho = stationary_dense(&lind).unwrap();
        let m = crate::lindblad::stationary(&spec).unwrap();
        assert!(covariance_of(&rho).unwrap().distance(&m) < 1e-12);
    }

    #[test]
    fn split_embedding_requires_two_bath_modes() {
        assert!(matches!(
            build_lindbladian(&spec_l1(), IsomorphismTag::B1SB2 { left_modes: 1 }),
            Err(Error::UnsupportedIso(_))
        ));
    }
}
