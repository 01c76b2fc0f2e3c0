use serde::Serialize;

use ptaho_core::model::SolverConfig;
use ptaho_core::oracle::{
    fd_pair_extrapolate, fd_single_grid_levels, solve_boundary_conditions, BoundaryState,
};

use crate::config::ResolvedConfig;
use crate::output::deliver;
use crate::{CliError, CommonArgs, Format};

/// Pairwise agreement bound for the three methods.
pub const CROSS_METHOD_TOL: f64 = 1e-3;
/// Relative agreement bound for the Gaussian-exponent independence check.
pub const S_INDEPENDENCE_REL_TOL: f64 = 1e-5;

pub struct Options {
    pub levels: usize,
    pub fd_grid_points: usize,
    pub fd_halfwidth: f64,
    pub s_alt: f64,
    pub n_indep: usize,
    pub n_seed: usize,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub params: crate::config::ResolvedParams,
    pub solver: crate::config::ResolvedSolver,
    pub cross_method_tolerance: f64,
    pub fd_grid_points: usize,
    pub fd_halfwidth: f64,
    pub levels: Vec<LevelCheck>,
    pub s_independence: SIndependence,
    pub pass: bool,
}

/// One cross-checked level. A route that failed or resolved too few levels
/// reports `null` and a note; that level then cannot pass.
#[derive(Serialize)]
pub struct LevelCheck {
    pub k: usize,
    pub hill: Option<f64>,
    pub newton: Option<f64>,
    pub fd: Option<f64>,
    pub delta_hill_newton: Option<f64>,
    pub delta_hill_fd: Option<f64>,
    pub delta_newton_fd: Option<f64>,
    pub notes: Vec<String>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct SIndependence {
    pub s: f64,
    pub s_alt: f64,
    pub n_trunc: usize,
    pub relative_tolerance: f64,
    pub levels: Vec<SIndependenceLevel>,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct SIndependenceLevel {
    pub k: usize,
    pub energy: f64,
    pub energy_alt: f64,
    pub relative_delta: f64,
    pub pass: bool,
}

pub fn run(common: &CommonArgs, options: Options) -> Result<(), CliError> {
    let resolved = common.resolve()?;
    let report = compute(&resolved, &options)?;
    let text = match common.format {
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let num = |v: Option<f64>| v.map_or(String::from("-"), |x| format!("{x:.12e}"));
            let delta = |v: Option<f64>| v.map_or(String::from("-"), |x| format!("{x:.3e}"));
            let mut out = String::from(
                "k,hill,newton,fd,delta_hill_newton,delta_hill_fd,delta_newton_fd,pass\n",
            );
            for l in &report.levels {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    l.k,
                    num(l.hill),
                    num(l.newton),
                    num(l.fd),
                    delta(l.delta_hill_newton),
                    delta(l.delta_hill_fd),
                    delta(l.delta_newton_fd),
                    l.pass
                ));
            }
            out
        }
    };
    deliver(common.out.as_deref(), &text)?;
    if report.pass {
        Ok(())
    } else {
        Err(CliError::Verification(
            "cross-method verification failed; see the report for the offending levels".to_string(),
        ))
    }
}

pub fn compute(resolved: &ResolvedConfig, options: &Options) -> Result<VerifyReport, CliError> {
    let params = resolved.oscillator()?;
    let config = resolved.solver_config();
    let (unit, scale) = ptaho_core::prepare(&params, &config)?;

    struct LevelData {
        hill: Option<f64>,
        newton: Option<f64>,
        notes: Vec<String>,
    }

    // finite-difference reference on two grids, computed concurrently with
    // the matrix routes
    let (fd_result, matrix_levels) = std::thread::scope(|scope| {
        let fd_handle = {
            let params = params;
            let m = options.fd_grid_points;
            let x = options.fd_halfwidth;
            scope.spawn(move || -> Result<Vec<f64>, String> {
                let coarse = fd_single_grid_levels(&params, x, m).map_err(|e| e.to_string())?;
                let fine =
                    fd_single_grid_levels(&params, x, 2 * m + 1).map_err(|e| e.to_string())?;
                Ok(fd_pair_extrapolate(&coarse, &fine))
            })
        };

        let seed_config = SolverConfig {
            n_trunc: options.n_seed,
            ..config
        };
        let mut matrix_levels = Vec::with_capacity(options.levels);
        for k in 0..options.levels {
            let mut notes = Vec::new();
            let hill = match ptaho_core::eigenstate(&params, &config, k) {
                Ok(state) => Some(state.unit_energy),
                Err(e) => {
                    notes.push(format!("diagonalization route: {e}"));
                    None
                }
            };
            let newton = match ptaho_core::eigenstate(&params, &seed_config, k) {
                Ok(seed) => match solve_boundary_conditions(
                    BoundaryState::new(seed.unit_energy, seed.zeta),
                    config.n_trunc,
                    &config,
                    &unit,
                ) {
                    Ok(solved) => Some(solved.energy),
                    Err(e) => {
                        notes.push(format!("boundary-condition route: {e}"));
                        None
                    }
                },
                Err(e) => {
                    notes.push(format!("boundary-condition seed: {e}"));
                    None
                }
            };
            matrix_levels.push(LevelData { hill, newton, notes });
        }
        (fd_handle.join().expect("fd thread panicked"), matrix_levels)
    });

    let (fd_levels, fd_note): (Vec<f64>, Option<String>) = match fd_result {
        Ok(levels) => (levels, None),
        Err(message) => (Vec::new(), Some(format!("finite-difference route: {message}"))),
    };

    let mut level_checks = Vec::with_capacity(options.levels);
    let mut all_pass = true;
    for (k, data) in matrix_levels.into_iter().enumerate() {
        let hill = data.hill.map(|e| e * scale.factor);
        let newton = data.newton.map(|e| e * scale.factor);
        let fd = fd_levels.get(k).copied();
        let mut notes = data.notes;
        if fd.is_none() {
            notes.push(match &fd_note {
                Some(msg) => msg.clone(),
                None => format!(
                    "finite-difference route: only {} stable levels resolved",
                    fd_levels.len()
                ),
            });
        }
        let diff = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(x), Some(y)) => Some((x - y).abs()),
            _ => None,
        };
        let d_hn = diff(hill, newton);
        let d_hf = diff(hill, fd);
        let d_nf = diff(newton, fd);
        let pass = [d_hn, d_hf, d_nf]
            .iter()
            .all(|d| d.is_some_and(|v| v <= CROSS_METHOD_TOL));
        all_pass &= pass;
        level_checks.push(LevelCheck {
            k,
            hill,
            newton,
            fd,
            delta_hill_newton: d_hn,
            delta_hill_fd: d_hf,
            delta_newton_fd: d_nf,
            notes,
            pass,
        });
    }

    // the Gaussian exponent is an ansatz knob; the spectrum must not move
    let indep = {
        let base = SolverConfig {
            n_trunc: options.n_indep,
            ..config
        };
        let alt = SolverConfig {
            s: options.s_alt,
            ..base
        };
        let e_base = ptaho_core::spectrum(&params, &base)?.energies;
        let e_alt = ptaho_core::spectrum(&params, &alt)?.energies;
        let count = 3.min(e_base.len()).min(e_alt.len());
        let mut rows = Vec::with_capacity(count);
        let mut pass = count == 3;
        for k in 0..count {
            let rel = (e_base[k] - e_alt[k]).abs() / e_base[k].abs().max(1e-300);
            let ok = rel <= S_INDEPENDENCE_REL_TOL;
            pass &= ok;
            rows.push(SIndependenceLevel {
                k,
                energy: e_base[k],
                energy_alt: e_alt[k],
                relative_delta: rel,
                pass: ok,
            });
        }
        SIndependence {
            s: config.s,
            s_alt: options.s_alt,
            n_trunc: options.n_indep,
            relative_tolerance: S_INDEPENDENCE_REL_TOL,
            levels: rows,
            pass,
        }
    };

    let pass = all_pass && indep.pass;
    Ok(VerifyReport {
        params: resolved.params,
        solver: resolved.solver,
        cross_method_tolerance: CROSS_METHOD_TOL,
        fd_grid_points: options.fd_grid_points,
        fd_halfwidth: options.fd_halfwidth,
        levels: level_checks,
        s_independence: indep,
        pass,
    })
}
