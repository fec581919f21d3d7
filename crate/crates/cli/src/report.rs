use serde::{Deserialize, Serialize};

use qfsim::lindblad::ErgodicityReport;
use qfsim::{Execution, Tolerances};

use crate::model::MatrixRows;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ergodicity: Option<ErgodicitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationary: Option<StationarySection>,
    pub metadata: Metadata,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicitySection {
    pub kalman_rank: usize,
    pub kalman_full: bool,
    pub unique: bool,
    pub converges: bool,
    pub spectral_abscissa: f64,
    pub spectral_criterion: bool,
    pub offending_eigenvalue: Option<[f64; 2]>,
    /// `gauge-invariant` when decided on the L×L reduction, else `full`.
    pub reduction: String,
}

impl ErgodicitySection {
    pub fn new(r: &ErgodicityReport, gauge_invariant: bool) -> Self {
        ErgodicitySection {
            kalman_rank: r.kalman_rank,
            kalman_full: r.kalman_full,
            unique: r.unique_stationary,
            converges: r.converges,
            spectral_abscissa: r.spectral_abscissa,
            spectral_criterion: r.spectral_criterion,
            offending_eigenvalue: r.offending_eigenvalue.map(|z| [z.re, z.im]),
            reduction: if gauge_invariant { "gauge-invariant" } else { "full" }.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarySection {
    /// Diagonal of the L×L covariance block `tr(rho c_i c_j*)`.
    pub occupations: Vec<f64>,
    /// Imaginary parts of its first superdiagonal.
    pub currents: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixRows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix_basis: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSection {
    pub structure: f64,
    pub numeric: f64,
    pub pivot: f64,
    pub rank_factor: f64,
    pub cluster_gap: f64,
    pub pin: f64,
    pub hurwitz: f64,
}

impl From<&Tolerances> for ToleranceSection {
    fn from(t: &Tolerances) -> Self {
        ToleranceSection {
            structure: t.structure,
            numeric: t.numeric,
            pivot: t.pivot,
            rank_factor: t.rank_factor,
            cluster_gap: t.cluster_gap,
            pin: t.pin,
            hurwitz: t.hurwitz,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub spec_hash: String,
    pub tolerances: ToleranceSection,
    pub execution: String,
    pub version: String,
}

impl Metadata {
    pub fn new(spec_hash: String, tol: &Tolerances, exec: Execution) -> Self {
        Metadata {
            spec_hash,
            tolerances: tol.into(),
            execution: if exec.is_parallel() { "parallel" } else { "sequential" }.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// `oracle-compare` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub model: String,
    pub iso: String,
    pub t: f64,
    pub seed: u64,
    pub max_deviation: f64,
    pub threshold: f64,
    pub passed: bool,
    pub spec_hash: String,
}
