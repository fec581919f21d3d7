//! Subcommand implementations. Each returns the text for standard output.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use qfsim::fock::{covariance_of, gaussian_state, IsomorphismTag};
use qfsim::lindblad::{
    ergodicity_gauge_invariant_with, ergodicity_with, stationary_gauge_invariant_with, stationary_with, Propagator,
};
use qfsim::models::{self, random};
use qfsim::oracle::{build_lindbladian, evolve_dense};
use qfsim::phase::BasisTag;
use qfsim::quasifree::{CovarianceMatrix, SmallCovarianceMatrix};
use qfsim::{Execution, Tolerances};

use crate::error::{CliError, CliResult};
use crate::model::{matrix_to_rows, parse_iso, rows_to_matrix, spec_hash, LoadedModel, MatrixRows, ModelFile};
use crate::report::{ErgodicitySection, Metadata, OracleComparison, Report, StationarySection, REPORT_VERSION};

/// Largest system and bath accepted by `oracle-compare`.
pub const ORACLE_MAX_SYSTEM: usize = 3;
pub const ORACLE_MAX_BATH: usize = 2;
pub const ORACLE_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub tol: Tolerances,
    pub exec: Execution,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { tol: Tolerances::default(), exec: Execution::Sequential }
    }
}

/// Result of a subcommand: standard output and exit status.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub stdout: String,
    pub code: i32,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Output { stdout, code: 0 }
    }
}

fn load(path: &Path, settings: &Settings) -> CliResult<LoadedModel> {
    ModelFile::read(path)?.load(&settings.tol)
}

fn ergodicity_section(model: &LoadedModel, tol: &Tolerances) -> ErgodicitySection {
    match &model.gauge_invariant {
        Some(gi) => ErgodicitySection::new(&ergodicity_gauge_invariant_with(gi, tol), true),
        None => ErgodicitySection::new(&ergodicity_with(&model.spec, tol), false),
    }
}

fn report(model: &LoadedModel, settings: &Settings) -> Report {
    Report {
        schema_version: REPORT_VERSION,
        model: model.name.clone(),
        ergodicity: None,
        stationary: None,
        metadata: Metadata::new(spec_hash(&model.spec), &settings.tol, settings.exec),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn check(paths: &[PathBuf], settings: &Settings) -> CliResult<Output> {
    if paths.is_empty() {
        return Err(CliError::Input("no model files given".into()));
    }
    let models: Vec<LoadedModel> = paths.iter().map(|p| load(p, settings)).collect::<CliResult<_>>()?;
    let reports = settings.exec.map(&models, |m| {
        let mut r = report(m, settings);
        r.ergodicity = Some(ergodicity_section(m, &settings.tol));
        r
    });
    Ok(Output::ok(if reports.len() == 1 { to_json(&reports[0]) } else { to_json(&reports) }))
}

fn stationary_small(model: &LoadedModel, tol: &Tolerances) -> CliResult<SmallCovarianceMatrix> {
    match &model.gauge_invariant {
        Some(gi) => Ok(stationary_gauge_invariant_with(gi, tol)?),
        None => Ok(stationary_with(&model.spec, tol)?.small()),
    }
}

fn stationary_full(model: &LoadedModel, tol: &Tolerances) -> CliResult<CovarianceMatrix> {
    match &model.gauge_invariant {
        Some(gi) => Ok(CovarianceMatrix::from_small(&stationary_gauge_invariant_with(gi, tol)?)),
        None => Ok(stationary_with(&model.spec, tol)?),
    }
}

pub fn stationary(path: &Path, full_matrix: bool, settings: &Settings) -> CliResult<Output> {
    let model = load(path, settings)?;
    let erg = ergodicity_section(&model, &settings.tol);
    if !erg.unique {
        return Err(CliError::Numerical(format!(
            "no unique stationary state (Kalman rank {}); see `check`",
            erg.kalman_rank
        )));
    }
    let small = stationary_small(&model, &settings.tol)?;
    let mut section =
        StationarySection { occupations: small.occupations(), currents: small.currents(), matrix: None, matrix_basis: None };
    if full_matrix {
        let full = stationary_full(&model, &settings.tol)?;
        section.matrix = Some(matrix_to_rows(&full.creation_annihilation()));
        section.matrix_basis = Some(BasisTag::CreationAnnihilation.name().to_string());
    }
    let mut r = report(&model, settings);
    r.ergodicity = Some(erg);
    r.stationary = Some(section);
    Ok(Output::ok(to_json(&r)))
}

/// Covariance file accepted by `evolve --m0`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CovarianceFile {
    schema_version: u32,
    #[serde(default)]
    basis: Option<String>,
    #[serde(default)]
    matrix: Option<MatrixRows>,
    #[serde(default)]
    small: Option<MatrixRows>,
}

/// `vacuum`, `filled`, `half`, `stationary` or a covariance file.
fn initial_covariance(arg: &str, model: &LoadedModel, prop: &Propagator, tol: &Tolerances) -> CliResult<CovarianceMatrix> {
    let l = model.spec.modes();
    match arg {
        "vacuum" => Ok(CovarianceMatrix::vacuum(l)),
        "filled" => Ok(CovarianceMatrix::from_small(&SmallCovarianceMatrix::diagonal(&vec![0.0; l])?)),
        "half" => Ok(CovarianceMatrix::half(l)),
        "stationary" => prop
            .stationary()
            .ok_or_else(|| CliError::Numerical("no unique stationary state to start from".into())),
        path => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("--m0 is neither a preset nor a readable file ({path}): {e}")))?;
            let f: CovarianceFile = serde_json::from_str(&text)?;
            if f.schema_version != 1 {
                return Err(CliError::Input(format!("unsupported covariance schema_version {}", f.schema_version)));
            }
            match (f.matrix, f.small) {
                (Some(rows), None) => {
                    let basis: BasisTag = f
                        .basis
                        .as_deref()
                        .unwrap_or("creation-annihilation")
                        .parse()
                        .map_err(|_| CliError::Input("unknown basis tag in covariance file".into()))?;
                    Ok(CovarianceMatrix::new_with(rows_to_matrix(&rows, (2 * l, 2 * l), "matrix")?, basis, tol.structure)?)
                }
                (None, Some(rows)) => Ok(CovarianceMatrix::from_small(&SmallCovarianceMatrix::new_with(
                    rows_to_matrix(&rows, (l, l), "small")?,
                    tol.structure,
                )?)),
                _ => Err(CliError::Input("covariance file needs exactly one of `matrix` and `small`".into())),
            }
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn evolve(path: &Path, m0: &str, t_final: f64, samples: usize, settings: &Settings) -> CliResult<Output> {
    if t_final <= 0.0 || !t_final.is_finite() {
        return Err(CliError::Input(format!("--t-final must be positive, got {t_final}")));
    }
    if samples == 0 {
        return Err(CliError::Input("--samples must be at least 1".into()));
    }
    let model = load(path, settings)?;
    let l = model.spec.modes();
    let prop = Propagator::new_with(&model.spec, &settings.tol)?;
    let start = initial_covariance(m0, &model, &prop, &settings.tol)?;
    let fixed = prop.stationary();
    let mut out = String::from("t");
    for i in 1..=l {
        write!(out, ",occupation_{i}").unwrap();
    }
    for i in 1..l {
        write!(out, ",current_{i}").unwrap();
    }
    out.push_str(",distance\n");
    let times: Vec<f64> = if samples == 1 {
        vec![t_final]
    } else {
        (0..samples).map(|k| t_final * k as f64 / (samples - 1) as f64).collect()
    };
    let rows = settings.exec.map(&times, |t| prop.at(&start, *t));
    for (t, m) in times.iter().zip(rows) {
        let m = m?;
        let small = m.small();
        let mut cells = vec![fmt(*t)];
        cells.extend(small.occupations().into_iter().map(fmt));
        cells.extend(small.currents().into_iter().map(fmt));
        cells.push(fixed.as_ref().map(|f| fmt(m.distance(f))).unwrap_or_default());
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(Output::ok(out))
}

pub fn oracle_compare(
    path: &Path,
    t: f64,
    iso: Option<&str>,
    seed: u64,
    threshold: f64,
    settings: &Settings,
) -> CliResult<Output> {
    if t < 0.0 || !t.is_finite() {
        return Err(CliError::Input(format!("--t must be non-negative, got {t}")));
    }
    let model = load(path, settings)?;
    let (l, k) = (model.spec.modes(), model.spec.bath_modes());
    if l > ORACLE_MAX_SYSTEM || k > ORACLE_MAX_BATH {
        return Err(CliError::Input(format!(
            "oracle comparison limited to L <= {ORACLE_MAX_SYSTEM}, K <= {ORACLE_MAX_BATH} (got L = {l}, K = {k})"
        )));
    }
    let iso: IsomorphismTag = match iso {
        Some(s) => parse_iso(s)?,
        None => model.iso,
    };
    let m0 = random::covariance(&mut random::rng(seed), l)?;
    let rho0 = gaussian_state(&m0)?;
    let m0 = covariance_of(&rho0)?;
    let dense = covariance_of(&evolve_dense(&build_lindbladian(&model.spec, iso)?, &rho0, t)?)?;
    let fast = Propagator::new_with(&model.spec, &settings.tol)?.at(&m0, t)?;
    let dev = dense.distance(&fast);
    let passed = dev <= threshold;
    let cmp = OracleComparison {
        model: model.name.clone(),
        iso: iso.name(),
        t,
        seed,
        max_deviation: dev,
        threshold,
        passed,
        spec_hash: spec_hash(&model.spec),
    };
    Ok(Output { stdout: to_json(&cmp), code: if passed { 0 } else { 2 } })
}

/// Parses `key=value` pairs.
pub fn parse_params(pairs: &[String]) -> CliResult<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for p in pairs {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("parameter {p} is not of the form key=value")))?;
        let v: f64 = v.trim().parse().map_err(|_| CliError::Input(format!("parameter {k} has non-numeric value {v}")))?;
        if out.insert(k.trim().to_string(), v).is_some() {
            return Err(CliError::Input(format!("parameter {k} given twice")));
        }
    }
    Ok(out)
}

pub fn model_build(preset: &str, params: &[String], explicit: Option<BasisTag>, settings: &Settings) -> CliResult<Output> {
    let parameters = parse_params(params)?;
    let built = models::preset(preset, &parameters)?;
    let file = match explicit {
        Some(basis) => ModelFile::explicit(&built.spec, basis, built.iso),
        None => ModelFile::from_preset(preset, parameters),
    };
    // loading back guards against emitting files the reader rejects
    file.load(&settings.tol)?;
    let mut s = file.to_json();
    s.push('\n');
    Ok(Output::ok(s))
}
