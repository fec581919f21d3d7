use super::*;
use crate::linalg::{c, max_abs};
use crate::phase::expm;
use num_complex::Complex64;

fn chain(l: usize) -> CMatrix {
    let d = linalg::complexify(&linalg::shift_matrix(l));
    &d + d.transpose()
}

fn unit_column(l: usize, i: usize) -> CMatrix {
    CMatrix::from_fn(l, 1, |r, _| c(if r == i { 1.0 } else { 0.0 }))
}

fn sample_spec() -> SemigroupSpec {
    let r = RMatrix::from_row_slice(4, 4, &[
        0.0, 0.3, -0.7, 0.2, //
        -0.3, 0.0, 0.5, 1.1, //
        0.7, -0.5, 0.0, -0.4, //
        -0.2, -1.1, 0.4, 0.0,
    ]);
    let w = RMatrix::from_row_slice(4, 2, &[0.5, -0.2, 0.1, 0.9, -0.6, 0.3, 0.0, 0.4]);
    let mb = SmallCovarianceMatrix::diagonal(&[0.3]).unwrap();
    SemigroupSpec::new(
        HamiltonianMatrix::from_real_antisymmetric(&r).unwrap(),
        CouplingMatrix::from_real(&w).unwrap(),
        CovarianceMatrix::from_small(&mb),
    )
    .unwrap()
}

#[test]
fn drift_is_real_in_majorana_basis() {
    let spec = sample_spec();
    assert!(linalg::is_real(spec.drift()));
    let p = spec.inhomogeneity();
    assert!(max_abs(&(p - p.adjoint())) < 1e-15);
}

#[test]
fn uncoupled_flow_is_unitary_conjugation() {
    let r = RMatrix::from_row_slice(2, 2, &[0.0, 0.8, -0.8, 0.0]);
    let t = HamiltonianMatrix::from_real_antisymmetric(&r).unwrap();
    let spec = SemigroupSpec::new(
        t.clone(),
        CouplingMatrix::zero(1, 1),
        CovarianceMatrix::half(1),
    )
    .unwrap();
    let m0 = CovarianceMatrix::from_small(&SmallCovarianceMatrix::diagonal(&[0.2]).unwrap());
    let time = 1.7;
    let mt = propagate(&spec, &m0, time).unwrap();
    let u = expm(&t.majorana().scale(time).map(|z| z * -linalg::I)).unwrap();
    let expect = &u * m0.majorana() * u.adjoint();
    assert!(max_abs(&(mt.majorana() - expect)) < 1e-13);
    let e0 = m0.eigenvalues();
    let et = mt.eigenvalues();
    for (a, b) in e0.iter().zip(et.iter()) {
        assert!((a - b).abs() < 1e-13);
    }
}

#[test]
fn stationary_solves_the_lyapunov_equation() {
    let spec = sample_spec();
    let m = stationary(&spec).unwrap();
    let res = max_abs(&spec.generator(&m.majorana()));
    assert!(res <= 1e-10 * max_abs(spec.inhomogeneity()));
    let late = propagate(&spec, &CovarianceMatrix::half(2), 200.0).unwrap();
    assert!(late.distance(&m) < 1e-9);
}

#[test]
fn propagation_returns_input_basis() {
    let spec = sample_spec();
    let m0 = CovarianceMatrix::vacuum(2);
    let mt = propagate(&spec, &m0, 0.4).unwrap();
    assert_eq!(crate::phase::Structured::basis(&mt), BasisTag::CreationAnnihilation);
    assert!(propagate(&spec, &m0, -1.0).is_err());
}

#[test]
fn star_has_no_unique_stationary_state() {
    let t0 = CMatrix::from_row_slice(3, 3, &[c(0.0), c(1.0), c(1.0), c(1.0), c(0.0), c(0.0), c(1.0), c(0.0), c(0.0)]);
    let gi = GaugeInvariantSpec::new(t0, unit_column(3, 0), SmallCovarianceMatrix::diagonal(&[0.4]).unwrap())
        .unwrap();
    let rep = ergodicity_gauge_invariant(&gi);
    assert_eq!(rep.kalman_rank, 4);
    assert!(!rep.unique_stationary && rep.converges);
    assert!(lifted_converges_gauge_invariant(&gi));
    assert!(matches!(stationary_gauge_invariant(&gi), Err(Error::NonUniqueStationary { .. })));
    let lifted = gi.lift().unwrap();
    let full = ergodicity(&lifted);
    assert_eq!(full.kalman_rank, 4);
    assert!(!full.unique_stationary && full.converges);
    let off = full.offending_eigenvalue.unwrap();
    assert!(off.norm() < 1e-8);
    assert!(matches!(stationary(&lifted), Err(Error::NonUniqueStationary { .. })));
}

#[test]
fn one_end_chain_is_controllable() {
    let gi = GaugeInvariantSpec::new(chain(3), unit_column(3, 0), SmallCovarianceMatrix::diagonal(&[0.4]).unwrap())
        .unwrap();
    let rep = ergodicity_gauge_invariant(&gi);
    assert_eq!(rep.kalman_rank, 6);
    assert!(rep.unique_stationary && rep.converges && rep.spectral_criterion);
    assert!(rep.spectral_abscissa < 0.0);
    let small = stationary_gauge_invariant(&gi).unwrap();
    assert!(max_abs(&(small.entries() - CMatrix::identity(3, 3).scale(0.4))) < 1e-12);
}

#[test]
fn uncoupled_gauge_invariant_convergence() {
    let mb = SmallCovarianceMatrix::diagonal(&[0.4]).unwrap();
    let scalar = GaugeInvariantSpec::new(CMatrix::identity(2, 2).scale(2.0), CMatrix::zeros(2, 1), mb.clone()).unwrap();
    let rep = ergodicity_gauge_invariant(&scalar);
    assert_eq!(rep.kalman_rank, 0);
    assert!(!rep.unique_stationary && rep.converges);
    assert!(!lifted_converges_gauge_invariant(&scalar));
    let generic = GaugeInvariantSpec::new(chain(2), CMatrix::zeros(2, 1), mb).unwrap();
    assert!(!ergodicity_gauge_invariant(&generic).converges);
}

#[test]
fn gauge_invariant_stationary_matches_lift() {
    let theta0 = CMatrix::from_row_slice(3, 2, &[c(0.7), c(0.0), c(0.0), Complex64::new(0.2, 0.1), c(0.0), c(1.3)]);
    let gi = GaugeInvariantSpec::new(chain(3), theta0, SmallCovarianceMatrix::diagonal(&[0.9, 0.1]).unwrap()).unwrap();
    let small = stationary_gauge_invariant(&gi).unwrap();
    let full = stationary(&gi.lift().unwrap()).unwrap();
    assert!(max_abs(&(full.small().entries() - small.entries())) < 1e-12);
}

#[test]
fn gauge_invariant_propagation_matches_lift() {
    let theta0 = CMatrix::from_row_slice(2, 1, &[c(0.7), Complex64::new(0.2, -0.4)]);
    let gi = GaugeInvariantSpec::new(chain(2), theta0, SmallCovarianceMatrix::diagonal(&[0.8]).unwrap()).unwrap();
    let m0 = CMatrix::from_row_slice(2, 2, &[c(0.6), Complex64::new(0.1, 0.05), Complex64::new(0.1, -0.05), c(0.3)]);
    let a0 = CMatrix::from_row_slice(2, 2, &[c(0.0), Complex64::new(0.15, 0.1), Complex64::new(-0.15, -0.1), c(0.0)]);
    let full0 = CovarianceMatrix::from_blocks(&m0, &a0).unwrap();
    let (mt, at) = propagate_gauge_invariant(&gi, &SmallCovarianceMatrix::new(m0).unwrap(), &a0, 0.7).unwrap();
    let full = propagate(&gi.lift().unwrap(), &full0, 0.7).unwrap().creation_annihilation();
    assert!(max_abs(&(full.view((0, 0), (2, 2)).into_owned() - mt.entries())) < 1e-12);
    assert!(max_abs(&(full.view((0, 2), (2, 2)).into_owned() - at)) < 1e-12);
}

#[test]
fn support_of_extremes() {
    let v = support_decomposition(&CovarianceMatrix::vacuum(3));
    assert_eq!((v.pinned, v.free), (3, 0));
    let h = support_decomposition(&CovarianceMatrix::half(3));
    assert_eq!((h.pinned, h.free), (0, 3));
    let full = CovarianceMatrix::from_small(&SmallCovarianceMatrix::diagonal(&[0.0, 1.0]).unwrap());
    // an occupied mode is pinned empty after a particle-hole rotation
    assert_eq!(support_decomposition(&full).pinned, 2);
}

#[test]
fn real_case_invertible_coupling() {
    let ct = RMatrix::from_row_slice(2, 2, &[0.3, -1.0, 2.0, 0.1]);
    let cth = RMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 2.0]);
    assert!(real_case_kalman(&ct, &cth));
    let (t, th) = assemble_real_case(&ct, &cth, &cth).unwrap();
    let spec = SemigroupSpec::new(t, th, CovarianceMatrix::half(2)).unwrap();
    assert!(ergodicity(&spec).unique_stationary);
}
