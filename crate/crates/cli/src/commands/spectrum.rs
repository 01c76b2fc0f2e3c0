use serde::Serialize;

use crate::config::ResolvedConfig;
use crate::output::{deliver, fmt_sig, sig_for};
use crate::{CliError, CommonArgs, Format};

#[derive(Serialize)]
struct SpectrumReport {
    params: crate::config::ResolvedParams,
    solver: crate::config::ResolvedSolver,
    scale_factor: f64,
    dropped_complex_pairs: usize,
    levels: Vec<LevelEntry>,
}

#[derive(Serialize)]
struct LevelEntry {
    k: usize,
    energy: f64,
    imag_flag: f64,
}

pub fn run(
    common: &CommonArgs,
    levels: usize,
    dump_matrix: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let resolved = common.resolve()?;
    if let Some(path) = dump_matrix {
        let params = resolved.oscillator()?;
        let config = resolved.solver_config();
        let (unit, _) = ptaho_core::prepare(&params, &config)?;
        let banded = ptaho_core::hill::build_hill_operator(&config, &unit)?;
        let mut csv = String::from("row,col,value\n");
        for (i, j, v) in banded.band_triples() {
            csv.push_str(&format!("{i},{j},{}\n", fmt_sig(v, 17)));
        }
        crate::output::write_atomic(path, &csv)?;
    }
    let report = compute(&resolved, levels)?;
    let text = match common.format {
        Format::Csv => {
            let sig = sig_for(common.paper_style);
            let mut out = String::from("k,energy,imag_flag\n");
            for entry in &report.levels {
                out.push_str(&format!(
                    "{},{},{}\n",
                    entry.k,
                    fmt_sig(entry.energy, sig),
                    fmt_sig(entry.imag_flag, 3)
                ));
            }
            out
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    deliver(common.out.as_deref(), &text)
}

fn compute(resolved: &ResolvedConfig, levels: usize) -> Result<SpectrumReport, CliError> {
    let params = resolved.oscillator()?;
    let config = resolved.solver_config();
    let spec = ptaho_core::spectrum(&params, &config)?;
    let scale = ptaho_core::model::rescale_to_unit_quartic(&params)
        .map_err(CliError::from)?
        .1;
    Ok(SpectrumReport {
        params: resolved.params,
        solver: resolved.solver,
        scale_factor: scale.factor,
        dropped_complex_pairs: spec.dropped_complex_pairs,
        levels: spec
            .energies
            .iter()
            .zip(spec.imag_flags.iter())
            .take(levels)
            .enumerate()
            .map(|(k, (e, im))| LevelEntry {
                k,
                energy: *e,
                imag_flag: *im,
            })
            .collect(),
    })
}
