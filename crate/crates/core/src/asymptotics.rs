//! Large-index behavior of the coefficient recurrence.
//!
//! As a linear difference equation of sixth order, the recurrence has six
//! independent solutions of the canonical form
//!
//! ```text
//! h_n(p) = lambda(p)^n g_n(p) / (3^(1/3))^n Gamma(1 + n/3),
//! g_n(p) = exp(gamma(p) n^(2/3) + O(n^(1/3))),
//! lambda(p) = exp(i (2p - 1) pi / 6),      p = 1..6,
//! gamma(p) = s lambda(p)^4 - beta lambda(p) / 4.
//! ```
//!
//! The pair p = 2, 5 has the largest real growth exponent (equal to `s`)
//! whenever `s > |beta| / (4 sqrt(3))`; a generic forward solution is then
//! dominated by that pair, which is what the truncation conditions act on.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::recurrence::CoefficientSequence;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BirkhoffSolution {
    /// 1-based solution index.
    pub p: usize,
    /// Unimodular ratio factor; the six 12th roots of unity with odd
    /// multiples of pi/6 as argument.
    pub lambda: Complex64,
    /// Growth exponent of `g_n` from the definition above.
    pub gamma: Complex64,
    /// Closed-form real part of `gamma`.
    pub re_gamma: f64,
}

/// Closed-form `Re gamma(p)`: elementary trigonometry on the definition.
pub fn closed_form_re_gamma(p: usize, s: f64, beta: f64) -> f64 {
    let root3_8 = libm::sqrt(3.0) / 8.0;
    match p {
        1 | 6 => -root3_8 * beta - s / 2.0,
        2 | 5 => s,
        3 | 4 => root3_8 * beta - s / 2.0,
        _ => panic!("solution index must be in 1..=6"),
    }
}

/// All six canonical solutions with `gamma` computed from the definition and
/// `re_gamma` from the closed forms; the two agree to machine precision.
pub fn birkhoff_solutions(s: f64, beta: f64) -> Vec<BirkhoffSolution> {
    (1..=6)
        .map(|p| {
            let phi = (2 * p - 1) as f64 * core::f64::consts::PI / 6.0;
            let lambda = Complex64::new(libm::cos(phi), libm::sin(phi));
            let lambda4 = lambda * lambda * lambda * lambda;
            let gamma = lambda4 * s - lambda * (beta / 4.0);
            BirkhoffSolution {
                p,
                lambda,
                gamma,
                re_gamma: closed_form_re_gamma(p, s, beta),
            }
        })
        .collect()
}

/// Gap between the dominant growth exponent `s` and the fastest of the four
/// sub-dominant solutions. Positive exactly when the admissibility bound
/// `s > |beta| / (4 sqrt(3))` holds.
pub fn dominance_margin(s: f64, beta: f64) -> f64 {
    1.5 * s - libm::sqrt(3.0) * libm::fabs(beta) / 8.0
}

/// Least-squares fit of the corrected log-magnitudes
/// `y_n = ln|h_n| + ln Gamma(1 + n/3) + (n/3) ln 3`
/// against `gamma n^(2/3) + b n^(1/3) + c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthFit {
    /// Fitted coefficient of `n^(2/3)`; approximately `s` for a generic
    /// (non-eigenvalue) forward solution at admissible `s`.
    pub gamma: f64,
    /// Fitted coefficient of `n^(1/3)`, a nuisance parameter.
    pub cube_root_coeff: f64,
    pub offset: f64,
    pub envelope_points: usize,
}

const ENVELOPE_WINDOW: usize = 12;
const MIN_FIT_SPAN: usize = 50;
const MIN_ENVELOPE_POINTS: usize = 5;

/// Fit the growth exponent of a coefficient sequence over `n` in
/// `[n_lo, n_hi]`. The sequence oscillates because the dominant pair
/// interferes, so the fit uses window maxima of the corrected values (window
/// width 12) rather than every entry.
pub fn empirical_growth_fit(
    seq: &CoefficientSequence,
    n_lo: usize,
    n_hi: usize,
) -> Result<GrowthFit> {
    if n_hi >= seq.len() {
        return Err(Error::SequenceTooShort {
            len: seq.len(),
            needed: n_hi + 1,
        });
    }
    if n_hi < n_lo || n_hi - n_lo < MIN_FIT_SPAN {
        return Err(Error::FitRangeTooSmall {
            lo: n_lo,
            hi: n_hi,
            min_span: MIN_FIT_SPAN,
        });
    }

    let mut points: Vec<(f64, f64)> = Vec::new();
    let mut w_start = n_lo;
    while w_start + ENVELOPE_WINDOW <= n_hi + 1 {
        let mut best: Option<(usize, f64)> = None;
        for n in w_start..w_start + ENVELOPE_WINDOW {
            if let Some(y) = corrected_log(seq, n) {
                if best.is_none_or(|(_, b)| y > b) {
                    best = Some((n, y));
                }
            }
        }
        if let Some((n, y)) = best {
            points.push((n as f64, y));
        }
        w_start += ENVELOPE_WINDOW;
    }
    if points.len() < MIN_ENVELOPE_POINTS {
        return Err(Error::TooFewEnvelopePoints {
            found: points.len(),
            needed: MIN_ENVELOPE_POINTS,
        });
    }

    // normal equations for y = gamma u + b v + c with u = n^(2/3), v = n^(1/3)
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for &(n, y) in &points {
        let v = libm::cbrt(n);
        let u = v * v;
        let basis = [u, v, 1.0];
        for (i, bi) in basis.iter().enumerate() {
            for (j, bj) in basis.iter().enumerate() {
                m[i][j] += bi * bj;
            }
            rhs[i] += bi * y;
        }
    }
    let sol = solve3(m, rhs).ok_or(Error::SingularJacobian { energy: f64::NAN })?;
    Ok(GrowthFit {
        gamma: sol[0],
        cube_root_coeff: sol[1],
        offset: sol[2],
        envelope_points: points.len(),
    })
}

/// `ln|h_n| + ln Gamma(1 + n/3) + (n/3) ln 3`, or `None` for a zero entry.
pub fn corrected_log(seq: &CoefficientSequence, n: usize) -> Option<f64> {
    let ln_abs = seq.entry(n).ln_abs()?;
    let nf = n as f64;
    Some(ln_abs + libm::lgamma(1.0 + nf / 3.0) + nf / 3.0 * libm::log(3.0))
}

pub(crate) fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for k in 0..3 {
        let mut piv = k;
        for i in k + 1..3 {
            if libm::fabs(m[i][k]) > libm::fabs(m[piv][k]) {
                piv = i;
            }
        }
        if m[piv][k] == 0.0 {
            return None;
        }
        m.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..3 {
            let f = m[i][k] / m[k][k];
            for j in k..3 {
                m[i][j] -= f * m[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut acc = b[i];
        for j in i + 1..3 {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    Some(x)
}
