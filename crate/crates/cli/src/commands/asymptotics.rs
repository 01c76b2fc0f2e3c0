use serde::Serialize;

use ptaho_core::asymptotics::{
    birkhoff_solutions, corrected_log, dominance_margin, empirical_growth_fit,
};
use ptaho_core::model::{min_admissible_s, rescale_to_unit_quartic};
use ptaho_core::recurrence::forward_coefficients;

use crate::config::ResolvedConfig;
use crate::output::{deliver, fmt_sig, sig_for};
use crate::{CliError, CommonArgs, Format};

#[derive(Serialize)]
struct AsymptoticsReport {
    params: crate::config::ResolvedParams,
    solver: crate::config::ResolvedSolver,
    energy: f64,
    min_admissible_s: f64,
    dominance_margin: f64,
    characteristic_solutions: Vec<SolutionRow>,
    fit: FitRow,
    growth: Vec<GrowthRow>,
}

#[derive(Serialize)]
struct SolutionRow {
    p: usize,
    lambda_re: f64,
    lambda_im: f64,
    gamma_re: f64,
    gamma_im: f64,
    re_gamma_closed_form: f64,
}

#[derive(Serialize)]
struct FitRow {
    gamma: f64,
    cube_root_coeff: f64,
    offset: f64,
    envelope_points: usize,
    expected_gamma: f64,
}

#[derive(Serialize)]
struct GrowthRow {
    n: usize,
    log10_abs: Option<f64>,
    corrected: Option<f64>,
    fitted: f64,
}

pub fn run(common: &CommonArgs, energy: f64, n_lo: usize, n_hi: usize) -> Result<(), CliError> {
    let resolved = common.resolve()?;
    let report = compute(&resolved, energy, n_lo, n_hi)?;
    let text = match common.format {
        Format::Json => {
            let mut s =
                serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let sig = sig_for(common.paper_style);
            let mut out = String::new();
            out.push_str("# characteristic solutions: p, re_lambda, im_lambda, re_gamma, im_gamma, re_gamma_closed_form\n");
            for row in &report.characteristic_solutions {
                out.push_str(&format!(
                    "# p={} lambda=({},{}) gamma=({},{}) closed_form={}\n",
                    row.p,
                    fmt_sig(row.lambda_re, sig),
                    fmt_sig(row.lambda_im, sig),
                    fmt_sig(row.gamma_re, sig),
                    fmt_sig(row.gamma_im, sig),
                    fmt_sig(row.re_gamma_closed_form, sig),
                ));
            }
            out.push_str(&format!(
                "# dominance_margin={} fit_gamma={} expected={}\n",
                fmt_sig(report.dominance_margin, sig),
                fmt_sig(report.fit.gamma, sig),
                fmt_sig(report.fit.expected_gamma, sig),
            ));
            out.push_str("n,log10_abs,corrected,fitted\n");
            for row in &report.growth {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    row.n,
                    row.log10_abs.map_or(String::from(""), |v| fmt_sig(v, sig)),
                    row.corrected.map_or(String::from(""), |v| fmt_sig(v, sig)),
                    fmt_sig(row.fitted, sig)
                ));
            }
            out
        }
    };
    deliver(common.out.as_deref(), &text)
}

fn compute(
    resolved: &ResolvedConfig,
    energy: f64,
    n_lo: usize,
    n_hi: usize,
) -> Result<AsymptoticsReport, CliError> {
    let params = resolved.oscillator()?;
    let config = resolved.solver_config();
    let unit = rescale_to_unit_quartic(&params).map_err(CliError::from)?.0;

    let solutions: Vec<SolutionRow> = birkhoff_solutions(config.s, unit.beta())
        .into_iter()
        .map(|sol| SolutionRow {
            p: sol.p,
            lambda_re: sol.lambda.re,
            lambda_im: sol.lambda.im,
            gamma_re: sol.gamma.re,
            gamma_im: sol.gamma.im,
            re_gamma_closed_form: sol.re_gamma,
        })
        .collect();

    let seq = forward_coefficients(energy, 1.0, 0.0, n_hi + 20, &config, &unit)?;
    let fit = empirical_growth_fit(&seq, n_lo, n_hi)?;

    let growth: Vec<GrowthRow> = (n_lo..=n_hi)
        .map(|n| {
            let nf = n as f64;
            let v = nf.cbrt();
            GrowthRow {
                n,
                log10_abs: seq.log10_abs(n),
                corrected: corrected_log(&seq, n),
                fitted: fit.gamma * v * v + fit.cube_root_coeff * v + fit.offset,
            }
        })
        .collect();

    Ok(AsymptoticsReport {
        params: resolved.params,
        solver: resolved.solver,
        energy,
        min_admissible_s: min_admissible_s(unit.beta()),
        dominance_margin: dominance_margin(config.s, unit.beta()),
        characteristic_solutions: solutions,
        fit: FitRow {
            gamma: fit.gamma,
            cube_root_coeff: fit.cube_root_coeff,
            offset: fit.offset,
            envelope_points: fit.envelope_points,
            expected_gamma: config.s,
        },
        growth,
    })
}
