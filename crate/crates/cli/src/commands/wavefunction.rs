use serde::Serialize;

use ptaho_core::model::rescale_to_unit_quartic;
use ptaho_core::wavefunction::{evaluate_psi, ode_residual, pt_defect};
use ptaho_core::{Complex64, Error as CoreError};

use crate::config::ResolvedConfig;
use crate::output::{deliver, fmt_sig, sig_for, write_atomic};
use crate::{CliError, CommonArgs, Format};

#[derive(Serialize)]
struct Header {
    params: crate::config::ResolvedParams,
    solver: crate::config::ResolvedSolver,
    level: usize,
    energy: f64,
    unit_energy: f64,
    zeta: f64,
    pt_defect: f64,
    ode_residual: f64,
    /// Samples and checks live on the rescaled (unit-quartic) axis.
    coordinates: &'static str,
    requested_x_max: f64,
    usable_x_max: f64,
    warning: Option<String>,
}

#[derive(Serialize)]
struct Sample {
    x: f64,
    re: f64,
    im: f64,
    abs: f64,
}

#[derive(Serialize)]
struct JsonReport {
    #[serde(flatten)]
    header: Header,
    samples: Vec<Sample>,
}

pub fn run(
    common: &CommonArgs,
    level: usize,
    x_max: f64,
    samples: usize,
    coefficients_out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    if !(x_max.is_finite() && x_max > 0.0) {
        return Err(CliError::Invalid("x_max must be positive".to_string()));
    }
    if samples < 3 {
        return Err(CliError::Invalid("need at least 3 samples".to_string()));
    }
    let resolved = common.resolve()?;
    if let Some(path) = coefficients_out {
        let params = resolved.oscillator()?;
        let config = resolved.solver_config();
        let state = ptaho_core::eigenstate(&params, &config, level)?;
        let mut csv = String::from("n,mantissa,exponent10\n");
        for n in 0..state.series.coeffs.len() {
            let e = state.series.coeffs.entry(n);
            csv.push_str(&format!("{n},{:.17e},{}\n", e.mantissa, e.exp10));
        }
        crate::output::write_atomic(path, &csv)?;
    }
    let (header, sample_rows) = compute(&resolved, level, x_max, samples)?;

    match common.format {
        Format::Json => {
            let report = JsonReport {
                header,
                samples: sample_rows,
            };
            let mut s =
                serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            deliver(common.out.as_deref(), &s)
        }
        Format::Csv => {
            let sig = sig_for(common.paper_style);
            let mut csv = String::from("x,re_psi,im_psi,abs_psi\n");
            for row in &sample_rows {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_sig(row.x, sig),
                    fmt_sig(row.re, sig),
                    fmt_sig(row.im, sig),
                    fmt_sig(row.abs, sig)
                ));
            }
            let mut header_json =
                serde_json::to_string_pretty(&header).map_err(|e| CliError::Io(e.to_string()))?;
            header_json.push('\n');
            match common.out.as_deref() {
                Some(path) => {
                    write_atomic(path, &csv)?;
                    let meta = path.with_extension("meta.json");
                    write_atomic(&meta, &header_json)
                }
                None => {
                    print!("{header_json}{csv}");
                    Ok(())
                }
            }
        }
    }
}

fn compute(
    resolved: &ResolvedConfig,
    level: usize,
    x_max: f64,
    samples: usize,
) -> Result<(Header, Vec<Sample>), CliError> {
    let params = resolved.oscillator()?;
    let config = resolved.solver_config();
    let state = ptaho_core::eigenstate(&params, &config, level)?;
    let unit = rescale_to_unit_quartic(&params).map_err(CliError::from)?.0;

    // find the largest |x| the truncated series supports, then truncate the
    // requested grid to it
    let mut usable = x_max;
    let probe_steps = 64;
    for k in (1..=probe_steps).rev() {
        let x = x_max * k as f64 / probe_steps as f64;
        match evaluate_psi(&state.series, Complex64::new(x, 0.0)) {
            Ok(_) => {
                usable = x;
                break;
            }
            Err(CoreError::TailNotNegligible { .. }) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    let warning = if usable + 1e-12 < x_max {
        Some(format!(
            "series order {} is only reliable up to |x| = {usable:.3}; grid truncated",
            state.series.order
        ))
    } else {
        None
    };

    let grid: Vec<f64> = (0..samples)
        .map(|i| -usable + 2.0 * usable * i as f64 / (samples - 1) as f64)
        .collect();
    let defect = pt_defect(&state.series, &grid)?;
    let residual = ode_residual(&state.series, &unit, &grid)?;

    let mut rows = Vec::with_capacity(grid.len());
    for &x in &grid {
        let psi = evaluate_psi(&state.series, Complex64::new(x, 0.0))?;
        rows.push(Sample {
            x,
            re: psi.re,
            im: psi.im,
            abs: psi.norm(),
        });
    }

    Ok((
        Header {
            params: resolved.params,
            solver: resolved.solver,
            level,
            energy: state.energy,
            unit_energy: state.unit_energy,
            zeta: state.zeta,
            pt_defect: defect,
            ode_residual: residual,
            coordinates: "unit_quartic",
            requested_x_max: x_max,
            usable_x_max: usable,
            warning,
        },
        rows,
    ))
}
