//! Run configuration assembly: defaults, then config file, then CLI flags.
//!
//! The config file is either flat `key = value` text with optional
//! `[params]` / `[solver]` sections, or a JSON fragment with the same two
//! objects at top level. JSON outputs of this tool embed exactly those
//! objects, so any result file can be fed back as a config for a rerun.

use std::path::Path;

use serde::{Deserialize, Serialize};

use ptaho_core::model::{OscillatorParams, SolverConfig, DEFAULT_SEED};

use crate::CliError;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, Default)]
pub struct ParamsFragment {
    pub a: Option<f64>,
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, Default)]
pub struct SolverFragment {
    pub s: Option<f64>,
    pub n_trunc: Option<usize>,
    pub tol_imag: Option<f64>,
    pub tol_residual: Option<f64>,
    pub max_qr_sweeps: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FileConfig {
    pub params: ParamsFragment,
    pub solver: SolverFragment,
}

#[derive(Deserialize)]
struct JsonConfig {
    #[serde(default)]
    params: ParamsFragment,
    #[serde(default)]
    solver: SolverFragment,
}

pub fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    if text.trim_start().starts_with('{') {
        let parsed: JsonConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Invalid(format!("bad JSON config: {e}")))?;
        Ok(FileConfig {
            params: parsed.params,
            solver: parsed.solver,
        })
    } else {
        parse_flat(&text)
    }
}

fn parse_flat(text: &str) -> Result<FileConfig, CliError> {
    let mut out = FileConfig::default();
    let mut section = "";
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = match &line[1..line.len() - 1] {
                "params" => "params",
                "solver" => "solver",
                other => {
                    return Err(CliError::Invalid(format!(
                        "config line {}: unknown section [{other}]",
                        lineno + 1
                    )))
                }
            };
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Invalid(format!("config line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| CliError::Invalid(format!("config line {}: {what}", lineno + 1));
        let as_f64 = || value.parse::<f64>().map_err(|_| bad("not a number"));
        let as_usize = || value.parse::<usize>().map_err(|_| bad("not a positive integer"));
        let as_u64 = || value.parse::<u64>().map_err(|_| bad("not a non-negative integer"));
        match (section, key) {
            (_, "a") => out.params.a = Some(as_f64()?),
            (_, "beta") => out.params.beta = Some(as_f64()?),
            ("params", "c") | ("", "c") => out.params.c = Some(as_f64()?),
            (_, "delta") => out.params.delta = Some(as_f64()?),
            (_, "s") => out.solver.s = Some(as_f64()?),
            (_, "n_trunc") => out.solver.n_trunc = Some(as_usize()?),
            (_, "tol_imag") => out.solver.tol_imag = Some(as_f64()?),
            (_, "tol_residual") => out.solver.tol_residual = Some(as_f64()?),
            (_, "max_qr_sweeps") => out.solver.max_qr_sweeps = Some(as_usize()?),
            (_, "seed") => out.solver.seed = Some(as_u64()?),
            (_, other) => {
                return Err(CliError::Invalid(format!(
                    "config line {}: unknown key {other}",
                    lineno + 1
                )))
            }
        }
    }
    Ok(out)
}

/// Fully resolved run setup; serialized into every JSON output.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResolvedConfig {
    pub params: ResolvedParams,
    pub solver: ResolvedSolver,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResolvedParams {
    pub a: f64,
    pub beta: f64,
    pub c: f64,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ResolvedSolver {
    pub s: f64,
    pub n_trunc: usize,
    pub tol_imag: f64,
    pub tol_residual: f64,
    pub max_qr_sweeps: usize,
    pub seed: u64,
}

impl ResolvedConfig {
    pub fn oscillator(&self) -> Result<OscillatorParams, CliError> {
        OscillatorParams::new(self.params.a, self.params.beta, self.params.c, self.params.delta)
            .map_err(CliError::from)
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            s: self.solver.s,
            n_trunc: self.solver.n_trunc,
            tol_imag: self.solver.tol_imag,
            tol_residual: self.solver.tol_residual,
            max_qr_sweeps_per_eigenvalue: self.solver.max_qr_sweeps,
            seed: self.solver.seed,
        }
    }
}

pub struct Overrides {
    pub a: Option<f64>,
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
    pub s: Option<f64>,
    pub n_trunc: Option<usize>,
    pub seed: Option<u64>,
}

/// Precedence: CLI flags over config file over the standard setup
/// (unit couplings, s = 2, truncation 35).
pub fn resolve(file: FileConfig, flags: Overrides) -> ResolvedConfig {
    let defaults = SolverConfig::default();
    ResolvedConfig {
        params: ResolvedParams {
            a: flags.a.or(file.params.a).unwrap_or(1.0),
            beta: flags.beta.or(file.params.beta).unwrap_or(1.0),
            c: flags.c.or(file.params.c).unwrap_or(1.0),
            delta: flags.delta.or(file.params.delta).unwrap_or(1.0),
        },
        solver: ResolvedSolver {
            s: flags.s.or(file.solver.s).unwrap_or(defaults.s),
            n_trunc: flags.n_trunc.or(file.solver.n_trunc).unwrap_or(defaults.n_trunc),
            tol_imag: file.solver.tol_imag.unwrap_or(defaults.tol_imag),
            tol_residual: file.solver.tol_residual.unwrap_or(defaults.tol_residual),
            max_qr_sweeps: file
                .solver
                .max_qr_sweeps
                .unwrap_or(defaults.max_qr_sweeps_per_eigenvalue),
            seed: flags.seed.or(file.solver.seed).unwrap_or(DEFAULT_SEED),
        },
    }
}
