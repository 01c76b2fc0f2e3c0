//! The six-term coefficient recurrence
//!
//! ```text
//! A_n h_{n+2} + C_n h_n + delta h_{n-1} + theta h_{n-2} - beta h_{n-3} + h_{n-4} = 0
//! ```
//!
//! with `A_n = (n+1)(n+2)`, `C_n = 4sn + 2s - E`, `theta = 4s^2 - c`, which
//! is equivalent to the differential equation once the ansatz
//! `psi(x) = exp(-s x^2) sum h_n (ix)^n` is substituted. Solved forward it
//! defines every `h_n` from the input pair `(h_0, h_1)`; entries are stored
//! in per-entry scientific notation because their magnitudes leave the
//! double range near index a few hundred.

use alloc::vec::Vec;

use crate::model::{validate_growth_constraint, SolverConfig, UnitQuartic};
use crate::scaled::{linear_combination, linear_combination_with_scale, Scaled};
use crate::{Error, Result};

/// Band values of one recurrence row. Terms whose target index would be
/// negative are simply absent; rows 0..=3 are shorter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecurrenceRow {
    pub n: usize,
    /// `(n+1)(n+2)`, never zero, so forward recursion never divides by zero.
    pub a_n: f64,
    /// `4sn + 2s - E`
    pub c_n: f64,
    pub delta_term: f64,
    /// `4s^2 - c`
    pub theta: f64,
    /// `-beta`
    pub beta_term: f64,
    pub quartic_term: f64,
}

pub fn recurrence_row(
    n: usize,
    energy: f64,
    config: &SolverConfig,
    params: &UnitQuartic,
) -> RecurrenceRow {
    let s = config.s;
    RecurrenceRow {
        n,
        a_n: ((n + 1) * (n + 2)) as f64,
        c_n: 4.0 * s * n as f64 + 2.0 * s - energy,
        delta_term: params.delta(),
        theta: 4.0 * s * s - params.c(),
        beta_term: -params.beta(),
        quartic_term: 1.0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SequenceOrigin {
    /// Forward recursion from a caller-supplied `(h_0, h_1)`.
    FromInitialPair,
    /// Forward recursion from `(1, 0)`.
    Sigma,
    /// Forward recursion from `(0, 1)`.
    Omega,
    DeterminantSigma,
    DeterminantOmega,
}

/// Taylor coefficients in per-entry scientific notation.
#[derive(Clone, Debug)]
pub struct CoefficientSequence {
    entries: Vec<Scaled>,
    pub origin: SequenceOrigin,
}

impl CoefficientSequence {
    pub fn from_entries(entries: Vec<Scaled>, origin: SequenceOrigin) -> Self {
        CoefficientSequence { entries, origin }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, n: usize) -> Scaled {
        self.entries[n]
    }

    pub fn get(&self, n: usize) -> Option<Scaled> {
        self.entries.get(n).copied()
    }

    pub fn entries(&self) -> &[Scaled] {
        &self.entries
    }

    /// Entry collapsed to f64; saturates outside the double range.
    pub fn value(&self, n: usize) -> f64 {
        self.entries[n].value()
    }

    pub fn log10_abs(&self, n: usize) -> Option<f64> {
        self.entries[n].log10_abs()
    }
}

/// Run the recurrence forward from `(h_0, h_1)` up to index `n_max`.
///
/// Row `n` determines `h_{n+2}`, so the returned sequence satisfies every row
/// `0..=n_max-2` exactly (up to rounding), at any energy; only the boundary
/// behavior distinguishes eigenvalues.
pub fn forward_coefficients(
    energy: f64,
    h0: f64,
    h1: f64,
    n_max: usize,
    config: &SolverConfig,
    params: &UnitQuartic,
) -> Result<CoefficientSequence> {
    let seq = forward_from_pair(energy, h0, h1, n_max, config, params)?;
    Ok(CoefficientSequence::from_entries(
        seq,
        SequenceOrigin::FromInitialPair,
    ))
}

/// The two fundamental solutions: sigma from `(1, 0)` and omega from `(0, 1)`.
/// Every forward solution is the entrywise combination
/// `h_n = h_0 sigma_n + h_1 omega_n`.
pub fn sigma_omega_forward(
    energy: f64,
    n_max: usize,
    config: &SolverConfig,
    params: &UnitQuartic,
) -> Result<(CoefficientSequence, CoefficientSequence)> {
    let sigma = forward_from_pair(energy, 1.0, 0.0, n_max, config, params)?;
    let omega = forward_from_pair(energy, 0.0, 1.0, n_max, config, params)?;
    Ok((
        CoefficientSequence::from_entries(sigma, SequenceOrigin::Sigma),
        CoefficientSequence::from_entries(omega, SequenceOrigin::Omega),
    ))
}

fn forward_from_pair(
    energy: f64,
    h0: f64,
    h1: f64,
    n_max: usize,
    config: &SolverConfig,
    params: &UnitQuartic,
) -> Result<Vec<Scaled>> {
    config.validate()?;
    if n_max < 2 {
        return Err(Error::InvalidArgument {
            what: "forward recursion needs n_max >= 2",
        });
    }
    if !energy.is_finite() {
        return Err(Error::NonFiniteParameter {
            name: "energy",
            value: energy,
        });
    }
    if !h0.is_finite() || !h1.is_finite() {
        return Err(Error::InvalidArgument {
            what: "initial pair (h0, h1) must be finite",
        });
    }
    let verdict = validate_growth_constraint(config, params.params());
    if !verdict.valid {
        return Err(Error::GrowthConstraint {
            s: config.s,
            min_s: verdict.min_admissible_s,
        });
    }

    let mut entries = Vec::with_capacity(n_max + 1);
    entries.push(Scaled::from_value(h0));
    entries.push(Scaled::from_value(h1));
    for n in 0..=(n_max - 2) {
        let row = recurrence_row(n, energy, config, params);
        let back = |k: isize| -> Scaled {
            if k < 0 {
                Scaled::ZERO
            } else {
                entries[k as usize]
            }
        };
        let n_i = n as isize;
        let terms = [
            (row.c_n, back(n_i)),
            (row.delta_term, back(n_i - 1)),
            (row.theta, back(n_i - 2)),
            (row.beta_term, back(n_i - 3)),
            (row.quartic_term, back(n_i - 4)),
        ];
        let (acc, exp) = linear_combination(&terms);
        let raw = -acc / row.a_n;
        if !raw.is_finite() {
            return Err(Error::NonFiniteCoefficient { index: n + 2 });
        }
        entries.push(Scaled::from_parts(raw, exp));
    }
    Ok(entries)
}

/// Largest relative row residual over all rows fully contained in the
/// sequence (rows `0..=len-3`). A correctly generated sequence sits at the
/// rounding floor.
pub fn max_relative_row_residual(
    seq: &CoefficientSequence,
    energy: f64,
    config: &SolverConfig,
    params: &UnitQuartic,
) -> f64 {
    if seq.len() < 3 {
        return 0.0;
    }
    let mut worst = 0.0;
    for n in 0..=(seq.len() - 3) {
        let r = relative_row_residual(seq.entries(), n, energy, config, params, false);
        if r > worst {
            worst = r;
        }
    }
    worst
}

/// Row residuals with the sequence treated as zero beyond its last entry,
/// i.e. rows `0..len` of the truncated problem. Small only when the sequence
/// is an eigenvector of the truncated operator.
pub fn max_relative_row_residual_zero_padded(
    seq: &CoefficientSequence,
    energy: f64,
    config: &SolverConfig,
    params: &UnitQuartic,
) -> f64 {
    let mut worst = 0.0;
    for n in 0..seq.len() {
        let r = relative_row_residual(seq.entries(), n, energy, config, params, true);
        if r > worst {
            worst = r;
        }
    }
    worst
}

fn relative_row_residual(
    entries: &[Scaled],
    n: usize,
    energy: f64,
    config: &SolverConfig,
    params: &UnitQuartic,
    zero_padded: bool,
) -> f64 {
    let row = recurrence_row(n, energy, config, params);
    let at = |k: isize| -> Scaled {
        if k < 0 || (zero_padded && k as usize >= entries.len()) {
            Scaled::ZERO
        } else {
            entries[k as usize]
        }
    };
    let n_i = n as isize;
    let terms = [
        (row.a_n, at(n_i + 2)),
        (row.c_n, at(n_i)),
        (row.delta_term, at(n_i - 1)),
        (row.theta, at(n_i - 2)),
        (row.beta_term, at(n_i - 3)),
        (row.quartic_term, at(n_i - 4)),
    ];
    let (acc, _exp, largest) = linear_combination_with_scale(&terms);
    if largest == 0.0 {
        0.0
    } else {
        libm::fabs(acc) / largest
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rescale_to_unit_quartic, OscillatorParams};

    fn unit_setup() -> (SolverConfig, UnitQuartic) {
        let params = OscillatorParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let (unit, _) = rescale_to_unit_quartic(&params).unwrap();
        (SolverConfig::default(), unit)
    }

    #[test]
    fn row_values_by_direct_substitution() {
        let (mut config, _) = unit_setup();
        config.s = 2.0;
        let params = OscillatorParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let (unit, _) = rescale_to_unit_quartic(&params).unwrap();

        let r0 = recurrence_row(0, 0.0, &config, &unit);
        assert_eq!(r0.a_n, 2.0);
        assert_eq!(r0.c_n, 4.0);
        assert_eq!(r0.theta, 15.0);

        let r1 = recurrence_row(1, 0.0, &config, &unit);
        assert_eq!(r1.a_n, 6.0);
        assert_eq!(r1.c_n, 12.0);

        let r10 = recurrence_row(10, 5.123_579, &config, &unit);
        assert!((r10.c_n - 78.876_421).abs() < 1e-12);
    }

    #[test]
    fn first_coefficients_match_hand_solution() {
        let (config, unit) = unit_setup();
        for energy in [0.0, 1.7, -3.2] {
            let seq = forward_coefficients(energy, 1.0, 0.0, 8, &config, &unit).unwrap();
            let h2 = (energy - 2.0 * config.s) / 2.0;
            assert!((seq.value(2) - h2).abs() <= 1e-15 * (1.0 + h2.abs()));
            // row 1: 6 h_3 + C_1 h_1 + delta h_0 = 0 with h_1 = 0
            let h3 = -unit.delta() / 6.0;
            assert!((seq.value(3) - h3).abs() <= 1e-15);
        }
    }

    #[test]
    fn sigma_omega_seeds() {
        let (config, unit) = unit_setup();
        let (sigma, omega) = sigma_omega_forward(0.7, 12, &config, &unit).unwrap();
        assert_eq!(sigma.value(0), 1.0);
        assert_eq!(sigma.value(1), 0.0);
        assert_eq!(omega.value(0), 0.0);
        assert_eq!(omega.value(1), 1.0);
        // row 0 for omega: 2 w_2 + C_0 w_0 = 0 with w_0 = 0
        assert_eq!(omega.value(2), 0.0);
        // row 1 for omega: 6 w_3 + C_1 w_1 + delta w_0 = 0
        let c1 = recurrence_row(1, 0.7, &config, &unit).c_n;
        assert!((omega.value(3) + c1 / 6.0).abs() < 1e-15);
        assert_eq!(sigma.origin, SequenceOrigin::Sigma);
        assert_eq!(omega.origin, SequenceOrigin::Omega);
    }

    #[test]
    fn residuals_sit_at_rounding_floor() {
        let (config, unit) = unit_setup();
        let seq = forward_coefficients(2.31, 0.3, -1.1, 300, &config, &unit).unwrap();
        let worst = max_relative_row_residual(&seq, 2.31, &config, &unit);
        assert!(worst < 1e-12, "worst residual {worst}");
    }

    #[test]
    fn growth_constraint_gates_forward_recursion() {
        let params = OscillatorParams::new(1.0, 1.0, 1.0, 1.0).unwrap();
        let (unit, _) = rescale_to_unit_quartic(&params).unwrap();
        let config = SolverConfig {
            s: 0.1,
            ..SolverConfig::default()
        };
        assert!(matches!(
            forward_coefficients(1.0, 1.0, 0.0, 10, &config, &unit),
            Err(Error::GrowthConstraint { .. })
        ));
    }
}
