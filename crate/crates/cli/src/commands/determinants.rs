use serde::Serialize;

use ptaho_core::hill::taylor_from_determinants;
use ptaho_core::model::rescale_to_unit_quartic;
use ptaho_core::recurrence::{sigma_omega_forward, CoefficientSequence};
use ptaho_core::scaled::Scaled;

use crate::config::ResolvedConfig;
use crate::output::deliver;
use crate::{CliError, CommonArgs, Format};

#[derive(Serialize)]
struct DeterminantsReport {
    params: crate::config::ResolvedParams,
    solver: crate::config::ResolvedSolver,
    energy: f64,
    max_relative_deviation: f64,
    rows: Vec<Row>,
}

#[derive(Serialize)]
struct Row {
    n: usize,
    sigma_forward_mantissa: f64,
    sigma_forward_exp10: i64,
    sigma_determinant_mantissa: f64,
    sigma_determinant_exp10: i64,
    omega_forward_mantissa: f64,
    omega_forward_exp10: i64,
    omega_determinant_mantissa: f64,
    omega_determinant_exp10: i64,
}

pub fn run(common: &CommonArgs, energy: f64, n_max: usize) -> Result<(), CliError> {
    let resolved = common.resolve()?;
    let report = compute(&resolved, energy, n_max)?;
    let text = match common.format {
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::from(
                "n,sigma_forward_mantissa,sigma_forward_exp10,sigma_determinant_mantissa,sigma_determinant_exp10,omega_forward_mantissa,omega_forward_exp10,omega_determinant_mantissa,omega_determinant_exp10\n",
            );
            for r in &report.rows {
                out.push_str(&format!(
                    "{},{:.17e},{},{:.17e},{},{:.17e},{},{:.17e},{}\n",
                    r.n,
                    r.sigma_forward_mantissa,
                    r.sigma_forward_exp10,
                    r.sigma_determinant_mantissa,
                    r.sigma_determinant_exp10,
                    r.omega_forward_mantissa,
                    r.omega_forward_exp10,
                    r.omega_determinant_mantissa,
                    r.omega_determinant_exp10,
                ));
            }
            out.push_str(&format!(
                "# max_relative_deviation,{:.3e}\n",
                report.max_relative_deviation
            ));
            out
        }
    };
    deliver(common.out.as_deref(), &text)
}

fn relative_deviation(a: Scaled, b: Scaled) -> f64 {
    if a.is_zero() && b.is_zero() {
        return 0.0;
    }
    let emax = [a, b]
        .iter()
        .filter(|e| !e.is_zero())
        .map(|e| e.exp10)
        .max()
        .unwrap();
    let va = if a.is_zero() {
        0.0
    } else {
        a.mantissa * 10f64.powf((a.exp10 - emax) as f64)
    };
    let vb = if b.is_zero() {
        0.0
    } else {
        b.mantissa * 10f64.powf((b.exp10 - emax) as f64)
    };
    (va - vb).abs() / va.abs().max(vb.abs())
}

fn compute(resolved: &ResolvedConfig, energy: f64, n_max: usize) -> Result<DeterminantsReport, CliError> {
    let params = resolved.oscillator()?;
    let config = resolved.solver_config();
    let unit = rescale_to_unit_quartic(&params).map_err(CliError::from)?.0;

    let (det_sigma, det_omega) = taylor_from_determinants(energy, n_max, &config, &unit)?;
    let (fwd_sigma, fwd_omega) = sigma_omega_forward(energy, n_max, &config, &unit)?;

    let entry = |seq: &CoefficientSequence, n: usize| seq.entry(n);
    let mut rows = Vec::with_capacity(n_max);
    let mut worst: f64 = 0.0;
    for n in 0..n_max {
        let fs = entry(&fwd_sigma, n);
        let ds = entry(&det_sigma, n);
        let fo = entry(&fwd_omega, n);
        let dom = entry(&det_omega, n);
        worst = worst
            .max(relative_deviation(fs, ds))
            .max(relative_deviation(fo, dom));
        rows.push(Row {
            n,
            sigma_forward_mantissa: fs.mantissa,
            sigma_forward_exp10: fs.exp10,
            sigma_determinant_mantissa: ds.mantissa,
            sigma_determinant_exp10: ds.exp10,
            omega_forward_mantissa: fo.mantissa,
            omega_forward_exp10: fo.exp10,
            omega_determinant_mantissa: dom.mantissa,
            omega_determinant_exp10: dom.exp10,
        });
    }

    Ok(DeterminantsReport {
        params: resolved.params,
        solver: resolved.solver,
        energy,
        max_relative_deviation: worst,
        rows,
    })
}
