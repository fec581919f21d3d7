//! Constructors for the standard example families and their closed-form
//! stationary predictions.

pub mod random;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::IsomorphismTag;
use crate::lindblad::{assemble_real_case, GaugeInvariantSpec, SemigroupSpec};
use crate::linalg::{self, c, CMatrix, RMatrix, I};
use crate::phase::{CouplingMatrix, HamiltonianMatrix};
use crate::quasifree::{covariance_from_gibbs, CovarianceMatrix, SmallCovarianceMatrix};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub length: usize,
    pub theta1: f64,
    pub theta_l: f64,
    pub n1: f64,
    pub n_l: f64,
}

impl ChainParams {
    fn validate(&self) -> Result<()> {
        if self.length < 3 {
            return Err(Error::InvalidInput(format!("chain length must be at least 3, got {}", self.length)));
        }
        if !(self.theta1 > 0.0 && self.theta_l > 0.0) || !self.theta1.is_finite() || !self.theta_l.is_finite() {
            return Err(Error::InvalidInput("end couplings must be positive".into()));
        }
        for n in [self.n1, self.n_l] {
            if !(0.0..=1.0).contains(&n) {
                return Err(Error::InvalidInput(format!("bath occupation {n} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// Stationary small covariance `diag(p1, pm, ..., pm, pL) + i c (D - D^T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainStationaryPrediction {
    pub p1: f64,
    pub pm: f64,
    pub p_l: f64,
    pub current: f64,
    pub s: f64,
    weights: [[f64; 2]; 3],
}

impl ChainStationaryPrediction {
    pub fn new(theta1: f64, theta_l: f64, n1: f64, n_l: f64) -> Self {
        let (a, b) = (theta1 * theta1, theta_l * theta_l);
        let s = 4.0 * (a + b) + a * b * (a + b);
        let weights = [
            [(a * b * b + a * a * b + 4.0 * a) / s, 4.0 * b / s],
            [a * (b * b + 4.0) / s, b * (a * a + 4.0) / s],
            [4.0 * a / s, (b * a * a + b * b * a + 4.0 * b) / s],
        ];
        let at = |w: [f64; 2]| w[0] * n1 + w[1] * n_l;
        ChainStationaryPrediction {
            p1: at(weights[0]),
            pm: at(weights[1]),
            p_l: at(weights[2]),
            current: 2.0 * a * b * (n1 - n_l) / s,
            s,
            weights,
        }
    }

    /// Coefficients of `(n1, nL)` in `p1`, `pm` and `pL`.
    pub fn weights(&self) -> [[f64; 2]; 3] {
        self.weights
    }

    pub fn matrix(&self, l: usize) -> CMatrix {
        let mut m = CMatrix::zeros(l, l);
        for i in 0..l {
            m[(i, i)] = c(if i == 0 {
                self.p1
            } else if i + 1 == l {
                self.p_l
            } else {
                self.pm
            });
            if i + 1 < l {
                m[(i, i + 1)] = I * self.current;
                m[(i + 1, i)] = -I * self.current;
            }
        }
        m
    }
}

/// `D + D^T` on `l` sites.
pub fn chain_hamiltonian(l: usize) -> CMatrix {
    let d = linalg::complexify(&linalg::shift_matrix(l));
    &d + d.transpose()
}

fn unit_column(l: usize, i: usize, value: f64) -> CMatrix {
    CMatrix::from_fn(l, 1, |r, _| c(if r == i { value } else { 0.0 }))
}

pub fn two_bath_chain(params: ChainParams) -> Result<(GaugeInvariantSpec, ChainStationaryPrediction)> {
    params.validate()?;
    let l = params.length;
    let mut theta0 = CMatrix::zeros(l, 2);
    theta0[(0, 0)] = c(params.theta1);
    theta0[(l - 1, 1)] = c(params.theta_l);
    let m_b0 = SmallCovarianceMatrix::diagonal(&[params.n1, params.n_l])?;
    let spec = GaugeInvariantSpec::new(chain_hamiltonian(l), theta0, m_b0)?;
    Ok((spec, ChainStationaryPrediction::new(params.theta1, params.theta_l, params.n1, params.n_l)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XYParams {
    pub length: usize,
    pub kappa: f64,
    pub field: f64,
    pub theta1: f64,
    pub theta2: f64,
    /// Small covariances of the two single-mode bath factors.
    pub bath_state: [f64; 2],
}

/// `(C_T, C_top, C_bottom)` with `T = 1/2 [[0, i C_T], [-i C_T^T, 0]]` and
/// `Theta = [[0, i C_top], [-i C_bottom, 0]]`.
pub fn xy_real_blocks(p: &XYParams) -> Result<(RMatrix, RMatrix, RMatrix)> {
    let l = p.length;
    if l < 2 {
        return Err(Error::InvalidInput(format!("XY chain needs at least 2 sites, got {l}")));
    }
    if !(0.0..=1.0).contains(&p.kappa) || !p.field.is_finite() {
        return Err(Error::InvalidInput("anisotropy must lie in [0, 1] and the field must be finite".into()));
    }
    if !(p.theta1 > 0.0 && p.theta2 > 0.0) {
        return Err(Error::InvalidInput("end couplings must be positive".into()));
    }
    let d = linalg::shift_matrix(l);
    let c_t = RMatrix::identity(l, l) * p.field + &d * ((1.0 - p.kappa) / 2.0) + d.transpose() * ((1.0 + p.kappa) / 2.0);
    let mut top = RMatrix::zeros(l, 2);
    top[(0, 0)] = -(1.0 + p.kappa) * p.theta1 / 2.0;
    top[(l - 1, 1)] = -(1.0 - p.kappa) * p.theta2 / 2.0;
    let mut bottom = RMatrix::zeros(l, 2);
    bottom[(0, 0)] = -(1.0 - p.kappa) * p.theta1 / 2.0;
    bottom[(l - 1, 1)] = -(1.0 + p.kappa) * p.theta2 / 2.0;
    Ok((c_t, top, bottom))
}

/// Spin chain after the Jordan-Wigner transform; the oracle embedding is
/// `IsomorphismTag::B1SB2 { left_modes: 1 }`.
pub fn xy_chain(p: XYParams) -> Result<SemigroupSpec> {
    let (c_t, top, bottom) = xy_real_blocks(&p)?;
    let (t, theta) = assemble_real_case(&(c_t * 0.5), &top, &bottom)?;
    let bath = SmallCovarianceMatrix::diagonal(&p.bath_state)?;
    SemigroupSpec::new(t, theta, CovarianceMatrix::from_small(&bath))
}

pub const XY_ISO: IsomorphismTag = IsomorphismTag::B1SB2 { left_modes: 1 };

/// Every system mode coupled to its own bath mode, bath in the Gibbs state of
/// `t_s`.
pub fn thermalization_model(t_s: &HamiltonianMatrix, beta: f64) -> Result<SemigroupSpec> {
    let l = t_s.modes();
    let theta = CouplingMatrix::from_real(&RMatrix::identity(2 * l, 2 * l))?;
    SemigroupSpec::new(t_s.clone(), theta, covariance_from_gibbs(t_s, beta)?)
}

/// Small covariance `(1 + e^{-beta})^{-1}` of one bath mode in the Gibbs state
/// of its number operator.
pub fn simple_bath_scalar(beta: f64) -> f64 {
    linalg::logistic(beta)
}

pub fn simple_bath_model(t_s0: &CMatrix, theta0: &CMatrix, beta: f64) -> Result<GaugeInvariantSpec> {
    let k = theta0.ncols();
    let m_b0 = SmallCovarianceMatrix::diagonal(&vec![simple_bath_scalar(beta); k])?;
    GaugeInvariantSpec::new(t_s0.clone(), theta0.clone(), m_b0)
}

pub fn one_end_chain(l: usize, theta: f64, m_b0: f64) -> Result<GaugeInvariantSpec> {
    if l == 0 {
        return Err(Error::InvalidInput("chain needs at least one site".into()));
    }
    GaugeInvariantSpec::new(chain_hamiltonian(l), unit_column(l, 0, theta), SmallCovarianceMatrix::diagonal(&[m_b0])?)
}

/// Center (site 0) joined to `l - 1` leaves, bath on the center.
pub fn star_hamiltonian(l: usize) -> CMatrix {
    let mut t = CMatrix::zeros(l, l);
    for j in 1..l {
        t[(0, j)] = c(1.0);
        t[(j, 0)] = c(1.0);
    }
    t
}

pub fn star_model(l: usize, theta: f64, m_b0: f64) -> Result<GaugeInvariantSpec> {
    if l < 2 {
        return Err(Error::InvalidInput(format!("star needs at least 2 sites, got {l}")));
    }
    GaugeInvariantSpec::new(star_hamiltonian(l), unit_column(l, 0, theta), SmallCovarianceMatrix::diagonal(&[m_b0])?)
}

/// A named model ready for the fast path and the oracle.
#[derive(Debug, Clone)]
pub struct PresetModel {
    pub name: String,
    pub spec: SemigroupSpec,
    pub gauge_invariant: Option<GaugeInvariantSpec>,
    /// Embedding for oracle runs.
    pub iso: IsomorphismTag,
}

pub const PRESETS: &[&str] =
    &["two-bath-chain", "xy", "one-end-chain", "star", "thermalization", "simple-bath", "random"];

struct Params<'a> {
    map: &'a BTreeMap<String, f64>,
    used: Vec<&'static str>,
}

impl Params<'_> {
    fn get(&mut self, key: &'static str, default: f64) -> f64 {
        self.used.push(key);
        self.map.get(key).copied().unwrap_or(default)
    }

    fn count(&mut self, key: &'static str, default: usize) -> Result<usize> {
        let v = self.get(key, default as f64);
        if v < 0.0 || v.fract() != 0.0 || v > 1e6 {
            return Err(Error::InvalidInput(format!("parameter {key} must be a non-negative integer, got {v}")));
        }
        Ok(v as usize)
    }

    fn finish(&self) -> Result<()> {
        for key in self.map.keys() {
            if !self.used.contains(&key.as_str()) {
                return Err(Error::InvalidInput(format!("unknown parameter {key}")));
            }
        }
        Ok(())
    }
}

fn from_gauge_invariant(name: &str, gi: GaugeInvariantSpec) -> Result<PresetModel> {
    Ok(PresetModel { name: name.into(), spec: gi.lift()?, gauge_invariant: Some(gi), iso: IsomorphismTag::SB })
}

/// Build a preset from named numeric parameters; absent keys take defaults.
pub fn preset(name: &str, parameters: &BTreeMap<String, f64>) -> Result<PresetModel> {
    let mut p = Params { map: parameters, used: Vec::new() };
    let model = match name {
        "two-bath-chain" | "chain" => {
            let params = ChainParams {
                length: p.count("length", 5)?,
                theta1: p.get("theta1", 1.0),
                theta_l: p.get("theta_l", 1.0),
                n1: p.get("n1", 1.0),
                n_l: p.get("n_l", 0.0),
            };
            from_gauge_invariant("two-bath-chain", two_bath_chain(params)?.0)?
        }
        "xy" => {
            let params = XYParams {
                length: p.count("length", 4)?,
                kappa: p.get("kappa", 0.5),
                field: p.get("h", 0.0),
                theta1: p.get("theta1", 1.0),
                theta2: p.get("theta2", 1.0),
                bath_state: [p.get("m1", 1.0), p.get("m2", 0.0)],
            };
            PresetModel { name: "xy".into(), spec: xy_chain(params)?, gauge_invariant: None, iso: XY_ISO }
        }
        "one-end-chain" => {
            let gi = one_end_chain(p.count("length", 3)?, p.get("theta", 1.0), p.get("m_b", 0.4))?;
            from_gauge_invariant("one-end-chain", gi)?
        }
        "star" => {
            let gi = star_model(p.count("length", 3)?, p.get("theta", 1.0), p.get("m_b", 0.4))?;
            from_gauge_invariant("star", gi)?
        }
        "thermalization" => {
            let l = p.count("length", 4)?;
            let t = HamiltonianMatrix::from_gauge_invariant(&chain_hamiltonian(l))?;
            let spec = thermalization_model(&t, p.get("beta", 1.0))?;
            PresetModel { name: "thermalization".into(), spec, gauge_invariant: None, iso: IsomorphismTag::SB }
        }
        "simple-bath" => {
            let l = p.count("length", 3)?;
            let gi = simple_bath_model(&chain_hamiltonian(l), &unit_column(l, 0, p.get("theta", 1.0)), p.get("beta", 1.0))?;
            from_gauge_invariant("simple-bath", gi)?
        }
        "random" => {
            let l = p.count("length", 2)?;
            let k = p.count("bath_modes", 1)?;
            let seed = p.count("seed", 0)? as u64;
            let mut rng = random::rng(seed);
            PresetModel {
                name: "random".into(),
                spec: random::spec(&mut rng, l, k)?,
                gauge_invariant: None,
                iso: IsomorphismTag::SB,
            }
        }
        other => {
            return Err(Error::InvalidInput(format!("unknown preset {other}; known: {}", PRESETS.join(", "))));
        }
    };
    p.finish()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::{ergodicity, ergodicity_gauge_invariant, stationary, stationary_gauge_invariant};

    #[test]
    fn chain_examples() {
        let a = ChainStationaryPrediction::new(1.0, 1.0, 1.0, 0.0);
        assert_eq!(a.s, 10.0);
        for (x, y) in [(a.p1, 0.6), (a.pm, 0.5), (a.p_l, 0.4), (a.current, 0.2)] {
            assert!((x - y).abs() < 1e-15);
        }
        let b = ChainStationaryPrediction::new(2.0, 1.0, 1.0, 0.0);
        assert_eq!(b.s, 40.0);
        for (x, y) in [(b.p1, 0.9), (b.pm, 0.5), (b.p_l, 0.4), (b.current, 0.2)] {
            assert!((x - y).abs() < 1e-15);
        }
        let eq = ChainStationaryPrediction::new(0.7, 1.9, 0.3, 0.3);
        for x in [eq.p1, eq.pm, eq.p_l] {
            assert!((x - 0.3).abs() < 1e-15);
        }
        assert_eq!(eq.current, 0.0);
    }

    #[test]
    fn chain_prediction_matches_lyapunov() {
        let params = ChainParams { length: 5, theta1: 1.0, theta_l: 3.0, n1: 0.7, n_l: 0.2 };
        let (gi, pred) = two_bath_chain(params).unwrap();
        let m = stationary_gauge_invariant(&gi).unwrap();
        assert!(linalg::max_abs(&(m.entries() - pred.matrix(5))) < 1e-12);
        assert!((pred.current - 0.9 / 13.0).abs() < 1e-12);
    }

    #[test]
    fn xy_at_zero_anisotropy_is_the_chain() {
        let xy = xy_chain(XYParams {
            length: 4,
            kappa: 0.0,
            field: 0.3,
            theta1: 1.0,
            theta2: 3.0,
            bath_state: [0.7, 0.2],
        })
        .unwrap();
        let m = stationary(&xy).unwrap().small();
        let (_, pred) = two_bath_chain(ChainParams { length: 4, theta1: 1.0, theta_l: 3.0, n1: 0.7, n_l: 0.2 }).unwrap();
        for (x, y) in m.occupations().iter().zip(pred.matrix(4).diagonal().iter()) {
            assert!((x - y.re).abs() < 1e-12);
        }
    }

    #[test]
    fn xy_isotropic_without_field_is_degenerate() {
        let p = XYParams { length: 4, kappa: 1.0, field: 0.0, theta1: 1.0, theta2: 1.0, bath_state: [0.5, 0.5] };
        assert!(!ergodicity(&xy_chain(p).unwrap()).unique_stationary);
        let q = XYParams { kappa: 0.5, field: 0.3, ..p };
        assert!(ergodicity(&xy_chain(q).unwrap()).unique_stationary);
    }

    #[test]
    fn thermalization_fixed_point_is_the_bath() {
        let t = HamiltonianMatrix::from_gauge_invariant(&chain_hamiltonian(4)).unwrap();
        let spec = thermalization_model(&t, 1.0).unwrap();
        assert!(stationary(&spec).unwrap().distance(spec.m_b()) < 1e-12);
        let hot = thermalization_model(&t, 0.0).unwrap();
        assert!(stationary(&hot).unwrap().distance(&CovarianceMatrix::half(4)) < 1e-12);
    }

    #[test]
    fn star_eigenvector() {
        let t = star_hamiltonian(5);
        let v = CMatrix::from_fn(5, 1, |i, _| c(if i == 0 { 2.0 } else { 1.0 }));
        assert!(linalg::max_abs(&(&t * &v - v.scale(2.0))) < 1e-15);
        assert_eq!(ergodicity_gauge_invariant(&star_model(2, 1.0, 0.4).unwrap()).kalman_rank, 4);
    }

    #[test]
    fn presets_reject_unknown_keys() {
        let mut m = BTreeMap::new();
        m.insert("lenght".to_string(), 3.0);
        assert!(preset("star", &m).is_err());
        assert!(preset("nope", &BTreeMap::new()).is_err());
        for name in PRESETS {
            assert!(preset(name, &BTreeMap::new()).is_ok(), "{name}");
        }
    }
}
