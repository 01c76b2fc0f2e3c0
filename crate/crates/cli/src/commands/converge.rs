use serde::Serialize;

use ptaho_core::eigen::{assign_levels, real_spectrum, LevelSlot};

use crate::config::ResolvedConfig;
use crate::output::{deliver, fmt_sig, sig_for};
use crate::{CliError, CommonArgs, Format};

/// Window for a complex pair to claim a reference level: its real part must
/// be genuinely close.
const PAIR_REL_CAP: f64 = 0.25;
/// Window for a real value to fill a reference level: coarse truncations
/// approximate high levels badly (errors of tens of percent), so this is
/// deliberately wide.
const FILL_REL_CAP: f64 = 0.6;

#[derive(Serialize)]
struct ConvergeReport {
    params: crate::config::ResolvedParams,
    solver: crate::config::ResolvedSolver,
    reference_n_trunc: usize,
    reference: Vec<f64>,
    rows: Vec<RowReport>,
}

#[derive(Serialize)]
struct RowReport {
    n_trunc: usize,
    cells: Vec<CellReport>,
    error: Option<String>,
}

#[derive(Serialize)]
struct CellReport {
    state: &'static str,
    value: Option<f64>,
}

/// Parse "5,6,7" / "5..25" / mixtures of both into a sorted unique list.
pub fn parse_n_list(text: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::new();
    for piece in text.split(',') {
        let piece = piece.trim();
        if piece.is_empty() {
            continue;
        }
        if let Some((lo, hi)) = piece.split_once("..") {
            let lo: usize = lo
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad range start in {piece:?}")))?;
            let hi: usize = hi
                .trim()
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad range end in {piece:?}")))?;
            if hi < lo {
                return Err(CliError::Invalid(format!("empty range {piece:?}")));
            }
            out.extend(lo..=hi);
        } else {
            out.push(
                piece
                    .parse()
                    .map_err(|_| CliError::Invalid(format!("bad truncation order {piece:?}")))?,
            );
        }
    }
    if out.is_empty() {
        return Err(CliError::Invalid("empty truncation list".to_string()));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

struct RowData {
    n_trunc: usize,
    result: Result<(Vec<f64>, Vec<(f64, f64)>), String>,
}

pub fn run(common: &CommonArgs, n_list: &str, levels: usize) -> Result<(), CliError> {
    let resolved = common.resolve()?;
    let n_values = parse_n_list(n_list)?;
    let report = compute(&resolved, &n_values, levels)?;
    let text = match common.format {
        Format::Csv => render_csv(&report, sig_for(common.paper_style)),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    deliver(common.out.as_deref(), &text)
}

fn compute(
    resolved: &ResolvedConfig,
    n_values: &[usize],
    levels: usize,
) -> Result<ConvergeReport, CliError> {
    let params = resolved.oscillator()?;
    let base = resolved.solver_config();

    // one diagonalization per truncation order, in parallel
    let rows: Vec<RowData> = std::thread::scope(|scope| {
        let handles: Vec<_> = n_values
            .iter()
            .map(|&n| {
                let mut config = base;
                scope.spawn(move || {
                    config.n_trunc = n;
                    let result = ptaho_core::hill_eigenvalues(&params, &config)
                        .map(|(eigs, scale)| {
                            let spec = real_spectrum(&eigs, scale, &config);
                            let pairs: Vec<(f64, f64)> = eigs
                                .values
                                .iter()
                                .filter(|z| z.im > config.tol_imag * (1.0 + z.re.abs()))
                                .map(|z| (z.re * scale.factor, z.im.abs()))
                                .collect();
                            (spec.energies, pairs)
                        })
                        .map_err(|e| e.to_string());
                    RowData { n_trunc: n, result }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    // the largest successful truncation provides the reference levels
    let reference_row = rows
        .iter()
        .rev()
        .find(|r| r.result.is_ok())
        .ok_or_else(|| CliError::Numerical("every truncation in the sweep failed".to_string()))?;
    let (reference_levels, _) = reference_row.result.as_ref().unwrap();
    let reference: Vec<f64> = reference_levels.iter().take(levels).copied().collect();
    let reference_n = reference_row.n_trunc;
    if reference.len() < levels {
        return Err(CliError::Numerical(format!(
            "reference truncation {reference_n} only resolves {} real levels",
            reference.len()
        )));
    }

    let mut out_rows = Vec::with_capacity(rows.len());
    for row in &rows {
        match &row.result {
            Ok((reals, pairs)) => {
                let slots = assign_levels(&reference, reals, pairs, PAIR_REL_CAP, FILL_REL_CAP);
                out_rows.push(RowReport {
                    n_trunc: row.n_trunc,
                    cells: slots
                        .iter()
                        .map(|slot| match slot {
                            LevelSlot::Real(v) => CellReport {
                                state: "real",
                                value: Some(*v),
                            },
                            LevelSlot::DroppedPair => CellReport {
                                state: "complex_pair",
                                value: None,
                            },
                            LevelSlot::Empty => CellReport {
                                state: "missing",
                                value: None,
                            },
                        })
                        .collect(),
                    error: None,
                });
            }
            Err(message) => out_rows.push(RowReport {
                n_trunc: row.n_trunc,
                cells: Vec::new(),
                error: Some(message.clone()),
            }),
        }
    }

    Ok(ConvergeReport {
        params: resolved.params,
        solver: resolved.solver,
        reference_n_trunc: reference_n,
        reference,
        rows: out_rows,
    })
}

fn render_csv(report: &ConvergeReport, sig: usize) -> String {
    let levels = report.reference.len();
    let mut out = String::from("n_trunc");
    for k in 0..levels {
        out.push_str(&format!(",E_{k}"));
    }
    out.push('\n');
    for row in &report.rows {
        out.push_str(&row.n_trunc.to_string());
        if let Some(err) = &row.error {
            out.push_str(&format!(",error: {err}\n"));
            continue;
        }
        for cell in &row.cells {
            match cell.value {
                Some(v) => out.push_str(&format!(",{}", fmt_sig(v, sig))),
                None => out.push_str(",-"),
            }
        }
        out.push('\n');
    }
    out
}
