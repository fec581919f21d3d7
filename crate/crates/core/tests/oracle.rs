use num_complex::Complex64;

use qfsim::fock::{self, covariance_of, gaussian_state, IsomorphismTag};
use qfsim::lindblad::{propagate, stationary, SemigroupSpec};
use qfsim::linalg::{self, CMatrix};
use qfsim::models::{self, random, XYParams};
use qfsim::oracle::{
    build_lindbladian, evolve_dense, evolve_dense_many, repeated_interaction_step, stationary_dense,
    HAMILTONIAN_PREFACTOR, MAX_ORACLE_MODES,
};
use qfsim::phase::{expm, CouplingMatrix};
use qfsim::quasifree::CovarianceMatrix;
use qfsim::Error;

fn uncoupled(seed: u64, l: usize) -> SemigroupSpec {
    let mut rng = random::rng(seed);
    SemigroupSpec::new(random::hamiltonian(&mut rng, l), CouplingMatrix::zero(l, 1), CovarianceMatrix::half(1)).unwrap()
}

#[test]
fn zero_coupling_gives_unitary_flow() {
    let spec = uncoupled(11, 2);
    let lind = build_lindbladian(&spec, IsomorphismTag::SB).unwrap();
    assert!(lind.jump_ops().is_empty());
    let rho0 = gaussian_state(&random::covariance(&mut random::rng(12), 2).unwrap()).unwrap();
    let rho = evolve_dense(&lind, &rho0, 1.3).unwrap();
    let u = expm(&lind.hamiltonian().entries().scale(1.3).map(|z| z * Complex64::new(0.0, -1.0))).unwrap();
    let expect = &u * rho0.entries() * u.adjoint();
    assert!(linalg::max_abs(&(rho.entries() - expect)) < 1e-12);
    // covariance conjugated by exp(-i t T) in Majorana form
    let m0 = covariance_of(&rho0).unwrap();
    let v = expm(&spec.t_s().majorana().scale(1.3).map(|z| z * Complex64::new(0.0, -1.0))).unwrap();
    let m_expect = &v * m0.majorana() * v.adjoint();
    assert!(linalg::max_abs(&(covariance_of(&rho).unwrap().majorana() - m_expect)) < 1e-12);
    assert_eq!(HAMILTONIAN_PREFACTOR, 0.5);
}

#[test]
fn evolution_at_zero_time_is_identity() {
    let spec = random::spec(&mut random::rng(3), 2, 1).unwrap();
    let lind = build_lindbladian(&spec, IsomorphismTag::BS).unwrap();
    let rho0 = random::dense_state(&mut random::rng(4), 2).unwrap();
    let rho = evolve_dense(&lind, &rho0, 0.0).unwrap();
    assert!(linalg::max_abs(&(rho.entries() - rho0.entries())) < 1e-14);
}

#[test]
fn generator_is_trace_free_and_hermiticity_preserving() {
    let mut rng = random::rng(21);
    let spec = random::spec(&mut rng, 3, 2).unwrap();
    for iso in [IsomorphismTag::SB, IsomorphismTag::BS] {
        let lind = build_lindbladian(&spec, iso).unwrap();
        for _ in 0..20 {
            let rho = random::dense_state(&mut rng, 3).unwrap();
            let out = lind.apply(rho.entries());
            assert!(out.trace().norm() < 1e-12);
            assert!(linalg::max_abs(&(&out - out.adjoint())) < 1e-12);
        }
    }
}

#[test]
fn superoperator_agrees_with_apply() {
    let mut rng = random::rng(5);
    let spec = random::spec(&mut rng, 2, 2).unwrap();
    let lind = build_lindbladian(&spec, IsomorphismTag::SB).unwrap();
    let rho = random::dense_state(&mut rng, 2).unwrap();
    let via_super = lind.superoperator() * linalg::vec_columns(rho.entries());
    let direct = linalg::vec_columns(&lind.apply(rho.entries()));
    assert!((via_super - direct).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn semigroup_law_dense() {
    let mut rng = random::rng(6);
    let spec = random::spec(&mut rng, 2, 1).unwrap();
    let lind = build_lindbladian(&spec, IsomorphismTag::SB).unwrap();
    let rho0 = random::dense_state(&mut rng, 2).unwrap();
    let a = evolve_dense(&lind, &evolve_dense(&lind, &rho0, 0.4).unwrap(), 0.9).unwrap();
    let b = evolve_dense(&lind, &rho0, 1.3).unwrap();
    assert!(linalg::max_abs(&(a.entries() - b.entries())) < 1e-10);
}

#[test]
fn covariance_consistency_both_embeddings() {
    for seed in 0..6u64 {
        let mut rng = random::rng(100 + seed);
        let l = 1 + seed as usize % 3;
        let k = 1 + seed as usize % 2;
        let spec = random::spec(&mut rng, l, k).unwrap();
        let rho0 = gaussian_state(&random::covariance(&mut rng, l).unwrap()).unwrap();
        let m0 = covariance_of(&rho0).unwrap();
        for iso in [IsomorphismTag::SB, IsomorphismTag::BS] {
            let lind = build_lindbladian(&spec, iso).unwrap();
            let times = [0.3, 1.0, 3.0];
            for (rho, t) in evolve_dense_many(&lind, &rho0, &times).unwrap().iter().zip(times) {
                let fast = propagate(&spec, &m0, t).unwrap();
                assert!(covariance_of(rho).unwrap().distance(&fast) < 1e-8, "seed {seed} {iso:?} t={t}");
            }
        }
    }
}

#[test]
fn embeddings_agree_on_even_states() {
    let mut rng = random::rng(31);
    let spec = random::spec(&mut rng, 2, 1).unwrap();
    let rho0 = gaussian_state(&random::covariance(&mut rng, 2).unwrap()).unwrap();
    let a = evolve_dense(&build_lindbladian(&spec, IsomorphismTag::SB).unwrap(), &rho0, 0.8).unwrap();
    let b = evolve_dense(&build_lindbladian(&spec, IsomorphismTag::BS).unwrap(), &rho0, 0.8).unwrap();
    assert!(linalg::max_abs(&(a.entries() - b.entries())) < 1e-12);
}

#[test]
fn embeddings_differ_on_odd_coherences() {
    let mut rng = random::rng(32);
    let spec = random::spec(&mut rng, 1, 1).unwrap();
    // |0><1| + |1><0| mixed into the maximally mixed state: odd part present
    let mut rho = CMatrix::identity(2, 2).scale(0.5);
    rho[(0, 1)] = Complex64::new(0.3, 0.0);
    rho[(1, 0)] = Complex64::new(0.3, 0.0);
    let rho0 = qfsim::fock::DenseState::new(fock::DenseOperator::new(rho, 1).unwrap()).unwrap();
    let a = evolve_dense(&build_lindbladian(&spec, IsomorphismTag::SB).unwrap(), &rho0, 0.8).unwrap();
    let b = evolve_dense(&build_lindbladian(&spec, IsomorphismTag::BS).unwrap(), &rho0, 0.8).unwrap();
    assert!(linalg::max_abs(&(a.entries() - b.entries())) > 1e-6);
    // covariances still agree
    assert!(covariance_of(&a).unwrap().distance(&covariance_of(&b).unwrap()) < 1e-12);
}

#[test]
fn long_time_limit_is_the_lyapunov_fixed_point() {
    let mut rng = random::rng(41);
    let spec = random::spec(&mut rng, 2, 2).unwrap();
    let lind = build_lindbladian(&spec, IsomorphismTag::SB).unwrap();
    let rho = evolve_dense(&lind, &fock::DenseState::maximally_mixed(2).unwrap(), 60.0).unwrap();
    let m = stationary(&spec).unwrap();
    assert!(covariance_of(&rho).unwrap().distance(&m) < 1e-6);
    let kernel = stationary_dense(&lind).unwrap();
    assert!(covariance_of(&kernel).unwrap().distance(&m) < 1e-10);
}

#[test]
fn split_embedding_matches_covariance_flow_for_xy() {
    let p = XYParams { length: 2, kappa: 0.5, field: 0.3, theta1: 1.0, theta2: 0.8, bath_state: [0.9, 0.2] };
    let spec = models::xy_chain(p).unwrap();
    let lind = build_lindbladian(&spec, models::XY_ISO).unwrap();
    let rho0 = gaussian_state(&CovarianceMatrix::half(2)).unwrap();
    let rho = evolve_dense(&lind, &rho0, 1.5).unwrap();
    let fast = propagate(&spec, &CovarianceMatrix::half(2), 1.5).unwrap();
    assert!(covariance_of(&rho).unwrap().distance(&fast) < 1e-10);
}

#[test]
fn split_embedding_rejects_correlated_bath() {
    let mut rng = random::rng(51);
    let spec = random::spec(&mut rng, 1, 2).unwrap();
    let r = build_lindbladian(&spec, IsomorphismTag::B1SB2 { left_modes: 1 });
    assert!(matches!(r, Err(Error::InvalidInput(_))));
}

#[test]
fn size_guard() {
    let spec = uncoupled(1, MAX_ORACLE_MODES + 1);
    assert!(matches!(build_lindbladian(&spec, IsomorphismTag::SB), Err(Error::TooLarge { .. })));
}

#[test]
fn repeated_interaction_without_coupling_is_conjugation() {
    let spec = uncoupled(61, 2);
    let omega = gaussian_state(spec.m_b()).unwrap();
    let step = repeated_interaction_step(&spec, &omega, 0.2, IsomorphismTag::SB).unwrap();
    let rho0 = random::dense_state(&mut random::rng(62), 2).unwrap();
    let h = qfsim::fock::quadratic_hamiltonian(spec.t_s(), HAMILTONIAN_PREFACTOR).unwrap();
    let u = expm(&h.entries().scale(0.2).map(|z| z * Complex64::new(0.0, -1.0))).unwrap();
    let expect = &u * rho0.entries() * u.adjoint();
    assert!(linalg::max_abs(&(step.apply(&rho0).unwrap().entries() - expect)) < 1e-12);
}

#[test]
fn repeated_interaction_converges_to_generator() {
    let mut rng = random::rng(71);
    let spec = random::spec(&mut rng, 2, 1).unwrap();
    let omega = gaussian_state(spec.m_b()).unwrap();
    let rho0 = gaussian_state(&random::covariance(&mut rng, 2).unwrap()).unwrap();
    for iso in [IsomorphismTag::SB, IsomorphismTag::BS] {
        let target = evolve_dense(&build_lindbladian(&spec, iso).unwrap(), &rho0, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for tau in [0.1, 0.05, 0.025] {
            let step = repeated_interaction_step(&spec, &omega, tau, iso).unwrap();
            let rho = step.iterate(&rho0, (1.0 / tau).round() as usize).unwrap();
            let err = linalg::max_abs(&(rho.entries() - target.entries()));
            assert!(err < prev, "{iso:?} tau={tau} err={err}");
            prev = err;
        }
    }
}

#[test]
fn single_step_has_no_half_order_term() {
    // ||L_tau(rho) - rho - tau L(rho)|| / tau should shrink linearly in tau
    let mut rng = random::rng(81);
    let spec = random::spec(&mut rng, 1, 1).unwrap();
    let omega = gaussian_state(spec.m_b()).unwrap();
    let rho = random::dense_state(&mut rng, 1).unwrap();
    let lind = build_lindbladian(&spec, IsomorphismTag::SB).unwrap();
    let generator = lind.apply(rho.entries());
    let remainder = |tau: f64| {
        let step = repeated_interaction_step(&spec, &omega, tau, IsomorphismTag::SB).unwrap();
        let out = step.apply(&rho).unwrap();
        linalg::max_abs(&(out.entries() - rho.entries() - generator.scale(tau))) / tau
    };
    let (a, b) = (remainder(1e-2), remainder(5e-3));
    assert!(b < 0.7 * a, "{a} {b}");
}

#[test]
fn bath_state_must_match() {
    let mut rng = random::rng(91);
    let spec = random::spec(&mut rng, 1, 1).unwrap();
    let wrong = gaussian_state(&CovarianceMatrix::vacuum(1)).unwrap();
    assert!(repeated_interaction_step(&spec, &wrong, 0.1, IsomorphismTag::SB).is_err());
    let omega = gaussian_state(spec.m_b()).unwrap();
    assert!(repeated_interaction_step(&spec, &omega, 0.0, IsomorphismTag::SB).is_err());
}
