//! Model files: a preset reference or explicit matrices.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use qfsim::fock::IsomorphismTag;
use qfsim::lindblad::{GaugeInvariantSpec, SemigroupSpec};
use qfsim::linalg::CMatrix;
use qfsim::models;
use qfsim::phase::{validate_qf_with, BasisTag, CouplingMatrix, Structured};
use qfsim::quasifree::CovarianceMatrix;
use qfsim::Tolerances;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<ExplicitSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetSection {
    pub name: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitSection {
    pub mode_count: usize,
    pub bath_modes: usize,
    pub basis: String,
    pub t_s: MatrixRows,
    pub theta: MatrixRows,
    pub m_b: MatrixRows,
    /// Embedding used by `oracle-compare` (default `sb`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iso: Option<String>,
}

/// A validated model ready for computation.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub name: String,
    pub spec: SemigroupSpec,
    pub gauge_invariant: Option<GaugeInvariantSpec>,
    pub iso: IsomorphismTag,
}

pub fn matrix_to_rows(m: &CMatrix) -> MatrixRows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn rows_to_matrix(rows: &MatrixRows, shape: (usize, usize), name: &str) -> CliResult<CMatrix> {
    if rows.len() != shape.0 || rows.iter().any(|r| r.len() != shape.1) {
        return Err(CliError::Input(format!("{name} must be {}x{} (row-major [re, im] pairs)", shape.0, shape.1)));
    }
    if rows.iter().flatten().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Input(format!("{name} has non-finite entries")));
    }
    Ok(CMatrix::from_fn(shape.0, shape.1, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

fn parse_basis(s: &str) -> CliResult<BasisTag> {
    s.parse().map_err(|_| CliError::Input(format!("unknown basis tag {s}")))
}

pub fn parse_iso(s: &str) -> CliResult<IsomorphismTag> {
    s.parse().map_err(|_| CliError::Input(format!("unknown isomorphism {s} (expected sb, bs or b1sb2:N)")))
}

impl ModelFile {
    pub fn from_preset(name: &str, parameters: BTreeMap<String, f64>) -> Self {
        ModelFile {
            schema_version: SCHEMA_VERSION,
            preset: Some(PresetSection { name: name.to_string(), parameters }),
            explicit: None,
        }
    }

    /// Explicit form of a spec in the requested basis.
    pub fn explicit(spec: &SemigroupSpec, basis: BasisTag, iso: IsomorphismTag) -> Self {
        let pick = |m: CMatrix, from: BasisTag| qfsim::phase::convert_matrix(&m, from, basis).expect("square");
        let theta = spec.theta().to_basis(basis).entries().clone();
        ModelFile {
            schema_version: SCHEMA_VERSION,
            preset: None,
            explicit: Some(ExplicitSection {
                mode_count: spec.modes(),
                bath_modes: spec.bath_modes(),
                basis: basis.name().to_string(),
                t_s: matrix_to_rows(&pick(spec.t_s().majorana(), BasisTag::Majorana)),
                theta: matrix_to_rows(&theta),
                m_b: matrix_to_rows(&pick(spec.m_b().majorana(), BasisTag::Majorana)),
                iso: Some(iso.name()),
            }),
        }
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Input(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                file.schema_version
            )));
        }
        match (&file.preset, &file.explicit) {
            (Some(_), None) | (None, Some(_)) => Ok(file),
            _ => Err(CliError::Input("model file needs exactly one of `preset` and `explicit`".into())),
        }
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files serialize")
    }

    pub fn load(&self, tol: &Tolerances) -> CliResult<LoadedModel> {
        if let Some(p) = &self.preset {
            let m = models::preset(&p.name, &p.parameters)?;
            return Ok(LoadedModel { name: m.name, spec: m.spec, gauge_invariant: m.gauge_invariant, iso: m.iso });
        }
        let e = self.explicit.as_ref().expect("validated on parse");
        let (l, k) = (e.mode_count, e.bath_modes);
        if l == 0 {
            return Err(CliError::Input("mode_count must be positive".into()));
        }
        let basis = parse_basis(&e.basis)?;
        let t = validate_qf_with(&rows_to_matrix(&e.t_s, (2 * l, 2 * l), "t_s")?, basis, tol.structure)?;
        let theta = CouplingMatrix::new_with(rows_to_matrix(&e.theta, (2 * l, 2 * k), "theta")?, basis, tol.structure)?;
        let m_b = CovarianceMatrix::new_with(rows_to_matrix(&e.m_b, (2 * k, 2 * k), "m_b")?, basis, tol.structure)?;
        let spec = SemigroupSpec::new_with(t, theta, m_b, tol)?;
        let iso = match &e.iso {
            Some(s) => parse_iso(s)?,
            None => IsomorphismTag::SB,
        };
        Ok(LoadedModel { name: "explicit".into(), spec, gauge_invariant: None, iso })
    }
}

/// SHA-256 over the Majorana-basis matrices of a model (little-endian bits).
pub fn spec_hash(spec: &SemigroupSpec) -> String {
    let mut h = Sha256::new();
    h.update(b"qfsim-spec-v1");
    h.update((spec.modes() as u64).to_le_bytes());
    h.update((spec.bath_modes() as u64).to_le_bytes());
    for m in [spec.t_s().majorana(), spec.theta().majorana(), spec.m_b().majorana()] {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                h.update(m[(i, j)].re.to_le_bytes());
                h.update(m[(i, j)].im.to_le_bytes());
            }
        }
    }
    hex::encode(h.finalize())
}
