//! The quasi-free semigroup on covariance matrices:
//! `dM/dt = G M + M G* + P` with `G = -i T_S - Theta Theta* / 2` and
//! `P = Theta M_B Theta*`.

mod ergodicity;
mod lyapunov;
mod support;

pub use ergodicity::{real_case_kalman, real_case_kalman_pair, real_case_kalman_pair_with, ErgodicityReport};
pub use lyapunov::{lyapunov_operator, lyapunov_residual, solve_lyapunov, AffineFlow};
pub use support::{support_decomposition, support_decomposition_with, SupportDecomposition};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{self, CMatrix, RMatrix};
use crate::phase::{BasisTag, CouplingMatrix, HamiltonianMatrix, Structured};
use crate::quasifree::{CovarianceMatrix, SmallCovarianceMatrix};
use crate::tolerance::Tolerances;

/// `(T_S, Theta, M_B)` with the derived drift and inhomogeneity, all in the
/// Majorana basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupSpec {
    t_s: HamiltonianMatrix,
    theta: CouplingMatrix,
    m_b: CovarianceMatrix,
    drift: CMatrix,
    inhomogeneity: CMatrix,
}

impl SemigroupSpec {
    pub fn new(t_s: HamiltonianMatrix, theta: CouplingMatrix, m_b: CovarianceMatrix) -> Result<Self> {
        Self::new_with(t_s, theta, m_b, &Tolerances::default())
    }

    pub fn new_with(
        t_s: HamiltonianMatrix,
        theta: CouplingMatrix,
        m_b: CovarianceMatrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        if theta.system_modes() != t_s.modes() {
            return Err(Error::DimensionMismatch(format!(
                "coupling has {} system modes, Hamiltonian has {}",
                theta.system_modes(),
                t_s.modes()
            )));
        }
        if theta.bath_modes() != m_b.modes() {
            return Err(Error::DimensionMismatch(format!(
                "coupling has {} bath modes, bath covariance has {}",
                theta.bath_modes(),
                m_b.modes()
            )));
        }
        let t_s = t_s.to_basis(BasisTag::Majorana);
        let theta = theta.to_basis(BasisTag::Majorana);
        let m_b = m_b.to_basis(BasisTag::Majorana);
        // T_f = iR, Theta_f = iW: G = R - W W^T / 2 is real.
        let r = t_s.real_antisymmetric();
        let w = theta.real_part_w();
        let drift = linalg::complexify(&(&r - (&w * w.transpose()).scale(0.5)));
        let th = theta.majorana();
        let p = &th * m_b.majorana() * th.adjoint();
        let p = linalg::hermitian_part(&p);
        let (vals, _) = linalg::hermitian_eigen(&p);
        let scale = linalg::max_abs(&p).max(f64::MIN_POSITIVE);
        if let Some(v) = vals.first() {
            if *v < -tol.structure * scale {
                return Err(Error::NotPsd { eigenvalue: *v });
            }
        }
        Ok(Self { t_s, theta, m_b, drift, inhomogeneity: p })
    }

    pub fn t_s(&self) -> &HamiltonianMatrix {
        &self.t_s
    }

    pub fn theta(&self) -> &CouplingMatrix {
        &self.theta
    }

    pub fn m_b(&self) -> &CovarianceMatrix {
        &self.m_b
    }

    /// `G` (Majorana basis, real).
    pub fn drift(&self) -> &CMatrix {
        &self.drift
    }

    /// `P = Theta M_B Theta*` (Majorana basis).
    pub fn inhomogeneity(&self) -> &CMatrix {
        &self.inhomogeneity
    }

    pub fn modes(&self) -> usize {
        self.t_s.modes()
    }

    pub fn bath_modes(&self) -> usize {
        self.theta.bath_modes()
    }

    /// Right-hand side of the covariance equation at `m` (Majorana basis).
    pub fn generator(&self, m: &CMatrix) -> CMatrix {
        &self.drift * m + m * self.drift.adjoint() + &self.inhomogeneity
    }
}

/// Gauge-invariant data `(T_{S,0}, Theta_0, M_{B,0})`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeInvariantSpec {
    t_s0: CMatrix,
    theta0: CMatrix,
    m_b0: SmallCovarianceMatrix,
}

impl GaugeInvariantSpec {
    pub fn new(t_s0: CMatrix, theta0: CMatrix, m_b0: SmallCovarianceMatrix) -> Result<Self> {
        let l = t_s0.nrows();
        if !t_s0.is_square() {
            return Err(Error::DimensionMismatch("T_S0 must be square".into()));
        }
        if theta0.nrows() != l || theta0.ncols() != m_b0.modes() {
            return Err(Error::DimensionMismatch(format!(
                "Theta_0 is {}x{}, expected {l}x{}",
                theta0.nrows(),
                theta0.ncols(),
                m_b0.modes()
            )));
        }
        let scale = linalg::max_abs(&t_s0).max(f64::MIN_POSITIVE);
        let herm = linalg::max_abs(&(&t_s0 - t_s0.adjoint())) / scale;
        if herm > crate::tolerance::STRUCTURE {
            return Err(Error::StructureViolation { what: "gauge-invariant Hamiltonian", residual: herm });
        }
        Ok(Self { t_s0: linalg::hermitian_part(&t_s0), theta0, m_b0 })
    }

    pub fn t_s0(&self) -> &CMatrix {
        &self.t_s0
    }

    pub fn theta0(&self) -> &CMatrix {
        &self.theta0
    }

    pub fn m_b0(&self) -> &SmallCovarianceMatrix {
        &self.m_b0
    }

    pub fn modes(&self) -> usize {
        self.t_s0.nrows()
    }

    pub fn bath_modes(&self) -> usize {
        self.theta0.ncols()
    }

    /// `G0 = -i T0 - Theta0 Theta0* / 2`.
    pub fn drift(&self) -> CMatrix {
        self.t_s0.map(|z| z * -linalg::I) - (&self.theta0 * self.theta0.adjoint()).scale(0.5)
    }

    /// `P0 = Theta0 M_B0 Theta0*`.
    pub fn inhomogeneity(&self) -> CMatrix {
        linalg::hermitian_part(&(&self.theta0 * self.m_b0.entries() * self.theta0.adjoint()))
    }

    /// Full 2L spec with `T_c = diag(T0, -conj T0)`, `Theta_c = diag(Theta0, -conj Theta0)`
    /// and `M_B,c = diag(M_B0, I - conj M_B0)`.
    pub fn lift(&self) -> Result<SemigroupSpec> {
        SemigroupSpec::new(
            HamiltonianMatrix::from_gauge_invariant(&self.t_s0)?,
            CouplingMatrix::from_gauge_invariant(&self.theta0)?,
            CovarianceMatrix::from_small(&self.m_b0),
        )
    }
}

fn check_modes(spec_modes: usize, m: usize) -> Result<()> {
    if spec_modes != m {
        Err(Error::DimensionMismatch(format!("covariance has {m} modes, spec has {spec_modes}")))
    } else {
        Ok(())
    }
}

/// Covariance propagator for one spec; the fixed point is computed once.
#[derive(Debug, Clone)]
pub struct Propagator {
    flow: AffineFlow,
    modes: usize,
    tol: Tolerances,
}

impl Propagator {
    pub fn new(spec: &SemigroupSpec) -> Result<Self> {
        Self::new_with(spec, &Tolerances::default())
    }

    pub fn new_with(spec: &SemigroupSpec, tol: &Tolerances) -> Result<Self> {
        Ok(Self {
            flow: AffineFlow::new(spec.drift(), spec.inhomogeneity(), tol.pivot)?,
            modes: spec.modes(),
            tol: *tol,
        })
    }

    /// `M_inf` when unique.
    pub fn stationary(&self) -> Option<CovarianceMatrix> {
        self.flow
            .fixed_point()
            .and_then(|x| CovarianceMatrix::new_with(x.clone(), BasisTag::Majorana, self.tol.structure).ok())
    }

    /// `M(t)` returned in the basis of `m0`.
    pub fn at(&self, m0: &CovarianceMatrix, t: f64) -> Result<CovarianceMatrix> {
        check_modes(self.modes, m0.modes())?;
        let mt = self.flow.at(&m0.majorana(), t)?;
        let out = CovarianceMatrix::new_with(mt, BasisTag::Majorana, self.tol.structure)
            .map_err(|e| Error::NumericalFailure(format!("propagated covariance invalid: {e}")))?;
        Ok(out.to_basis(m0.basis()))
    }
}

/// `M(t)` for the covariance equation.
pub fn propagate(spec: &SemigroupSpec, m0: &CovarianceMatrix, t: f64) -> Result<CovarianceMatrix> {
    Propagator::new(spec)?.at(m0, t)
}

/// Unique stationary covariance, via the Lyapunov equation `G M + M G* = -P`.
pub fn stationary(spec: &SemigroupSpec) -> Result<CovarianceMatrix> {
    stationary_with(spec, &Tolerances::default())
}

pub fn stationary_with(spec: &SemigroupSpec, tol: &Tolerances) -> Result<CovarianceMatrix> {
    let x = solve_checked(spec.drift(), spec.inhomogeneity(), tol)?;
    CovarianceMatrix::new_with(x, BasisTag::Majorana, tol.structure)
        .map_err(|e| Error::NumericalFailure(format!("stationary covariance invalid: {e}")))
}

fn solve_checked(g: &CMatrix, p: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    let x = linalg::hermitian_part(&solve_lyapunov(g, p, tol.pivot)?);
    let residual = lyapunov_residual(g, &x, p);
    let bound = tol.numeric * linalg::max_abs(p);
    if residual > bound && residual > f64::EPSILON {
        return Err(Error::NumericalFailure(format!(
            "Lyapunov residual {residual:.3e} exceeds {bound:.3e}"
        )));
    }
    Ok(x)
}

pub fn ergodicity(spec: &SemigroupSpec) -> ErgodicityReport {
    ergodicity_with(spec, &Tolerances::default())
}

pub fn ergodicity_with(spec: &SemigroupSpec, tol: &Tolerances) -> ErgodicityReport {
    ergodicity::analyze(&spec.t_s().majorana(), &spec.theta().majorana(), spec.drift(), tol)
}

pub fn ergodicity_gauge_invariant(spec: &GaugeInvariantSpec) -> ErgodicityReport {
    ergodicity_gauge_invariant_with(spec, &Tolerances::default())
}

/// Criteria evaluated on the L-dimensional data. Convergence refers to
/// gauge-invariant initial states; see [`lifted_converges_gauge_invariant`]
/// for the answer on the lifted problem.
pub fn ergodicity_gauge_invariant_with(spec: &GaugeInvariantSpec, tol: &Tolerances) -> ErgodicityReport {
    ergodicity::analyze_gauge_invariant(spec.t_s0(), spec.theta0(), &spec.drift(), tol)
}

/// Convergence of the lifted 2L problem computed from gauge-invariant data.
pub fn lifted_converges_gauge_invariant(spec: &GaugeInvariantSpec) -> bool {
    ergodicity::lifted_converges_gauge_invariant(spec.t_s0(), spec.theta0(), &Tolerances::default())
}

/// Stationary small covariance from the L×L Lyapunov equation
/// `G0 M0 + M0 G0* = -P0`.
pub fn stationary_gauge_invariant(spec: &GaugeInvariantSpec) -> Result<SmallCovarianceMatrix> {
    stationary_gauge_invariant_with(spec, &Tolerances::default())
}

pub fn stationary_gauge_invariant_with(
    spec: &GaugeInvariantSpec,
    tol: &Tolerances,
) -> Result<SmallCovarianceMatrix> {
    let x = solve_checked(&spec.drift(), &spec.inhomogeneity(), tol)?;
    SmallCovarianceMatrix::new_with(x, tol.structure)
        .map_err(|e| Error::NumericalFailure(format!("stationary covariance invalid: {e}")))
}

/// Propagates `(M0, A0)` where the c/a covariance is
/// `[[M0, A0], [-conj A0, I - conj M0]]`:
/// `dM0/dt = G0 M0 + M0 G0* + P0`, `dA0/dt = G0 A0 + A0 G0^T`.
pub fn propagate_gauge_invariant(
    spec: &GaugeInvariantSpec,
    m0: &SmallCovarianceMatrix,
    a0: &CMatrix,
    t: f64,
) -> Result<(SmallCovarianceMatrix, CMatrix)> {
    let l = spec.modes();
    if m0.modes() != l || a0.shape() != (l, l) {
        return Err(Error::DimensionMismatch("initial data does not match the spec".into()));
    }
    let tol = Tolerances::default();
    let g0 = spec.drift();
    let flow = AffineFlow::new(&g0, &spec.inhomogeneity(), tol.pivot)?;
    let mt = flow.at(m0.entries(), t)?;
    let e = crate::phase::expm(&g0.scale(t))?;
    let at = &e * a0 * e.transpose();
    let mt = SmallCovarianceMatrix::new_with(mt, tol.structure)
        .map_err(|e| Error::NumericalFailure(format!("propagated covariance invalid: {e}")))?;
    Ok((mt, at))
}

/// Assembles `T = [[0, i C_T], [-i C_T^T, 0]]` and
/// `Theta = [[0, i C_top], [-i C_bottom, 0]]` in the Majorana basis.
pub fn assemble_real_case(
    c_t: &RMatrix,
    c_top: &RMatrix,
    c_bottom: &RMatrix,
) -> Result<(HamiltonianMatrix, CouplingMatrix)> {
    let l = c_t.nrows();
    let k = c_top.ncols();
    if c_t.ncols() != l || c_top.nrows() != l || c_bottom.shape() != (l, k) {
        return Err(Error::DimensionMismatch("real-case blocks have inconsistent sizes".into()));
    }
    let mut r = RMatrix::zeros(2 * l, 2 * l);
    r.view_mut((0, l), (l, l)).copy_from(c_t);
    r.view_mut((l, 0), (l, l)).copy_from(&(-c_t.transpose()));
    let mut w = RMatrix::zeros(2 * l, 2 * k);
    w.view_mut((0, k), (l, k)).copy_from(c_top);
    w.view_mut((l, 0), (l, k)).copy_from(&(-c_bottom));
    Ok((HamiltonianMatrix::from_real_antisymmetric(&r)?, CouplingMatrix::from_real(&w)?))
}

pub fn ergodicity_batch(specs: &[SemigroupSpec], exec: Execution) -> Vec<ErgodicityReport> {
    exec.map(specs, ergodicity)
}

pub fn stationary_batch(specs: &[SemigroupSpec], exec: Execution) -> Vec<Result<CovarianceMatrix>> {
    exec.map(specs, stationary)
}

#[cfg(test)]
mod tests;
