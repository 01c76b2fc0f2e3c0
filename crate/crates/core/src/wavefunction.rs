//! Wavefunction reconstruction from a coefficient sequence:
//! `psi(x) = exp(-s x^2) sum_n h_n (ix)^n`, with symmetry, residual, and
//! tail diagnostics.
//!
//! For real coefficients the real part of `psi` is even and the imaginary
//! part odd, which is the symmetry the potential `V(x) = conj(V(-x))`
//! demands. The series solves the differential equation at *every* energy;
//! only the behavior at large |x| singles out eigenvalues, so the residual
//! check validates the recurrence transcription while the tail report looks
//! at the asymptotics.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::model::UnitQuartic;
use crate::recurrence::CoefficientSequence;
use crate::scaled::pow10;
use crate::{Error, Result};

/// A truncated series together with the data needed to evaluate it.
#[derive(Clone, Debug)]
pub struct WavefunctionSeries {
    pub coeffs: CoefficientSequence,
    /// Gaussian exponent of the ansatz.
    pub s: f64,
    /// Highest retained index; must be within the sequence.
    pub order: usize,
    /// Energy the coefficients were generated at.
    pub energy: f64,
}

impl WavefunctionSeries {
    pub fn new(coeffs: CoefficientSequence, s: f64, order: usize, energy: f64) -> Result<Self> {
        if order >= coeffs.len() {
            return Err(Error::SequenceTooShort {
                len: coeffs.len(),
                needed: order + 1,
            });
        }
        Ok(WavefunctionSeries {
            coeffs,
            s,
            order,
            energy,
        })
    }
}

/// The two characteristic behaviors at |x| >> 1:
/// `exp(u x^3/3 + v x^2/2 + O(x))` with `u = ±1` on the unit-quartic problem
/// and `v = i beta / (2u)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticForm {
    pub u: f64,
    pub v: Complex64,
}

pub fn asymptotic_forms(params: &UnitQuartic) -> [AsymptoticForm; 2] {
    let beta = params.beta();
    [
        AsymptoticForm {
            u: 1.0,
            v: Complex64::new(0.0, beta / 2.0),
        },
        AsymptoticForm {
            u: -1.0,
            v: Complex64::new(0.0, -beta / 2.0),
        },
    ]
}

/// Complex accumulator in scientific notation, so partial sums with huge
/// dynamic range stay representable.
#[derive(Clone, Copy)]
struct ScaledComplex {
    m: Complex64,
    e: i64,
}

impl ScaledComplex {
    const ZERO: ScaledComplex = ScaledComplex {
        m: Complex64::new(0.0, 0.0),
        e: 0,
    };

    fn add_term(&mut self, t: Complex64, e: i64) {
        if t == Complex64::new(0.0, 0.0) {
            return;
        }
        if self.m == Complex64::new(0.0, 0.0) {
            self.m = t;
            self.e = e;
        } else if e > self.e {
            self.m = self.m * pow10(self.e - e) + t;
            self.e = e;
        } else {
            self.m += t * pow10(e - self.e);
        }
        let n2 = self.m.norm_sqr();
        if n2 > 1e100 {
            self.m *= 1e-50;
            self.e += 50;
        } else if n2 > 0.0 && n2 < 1e-100 {
            self.m *= 1e50;
            self.e -= 50;
        }
    }

    fn log10_abs(&self) -> Option<f64> {
        let n = self.m.norm();
        if n == 0.0 {
            None
        } else {
            Some(libm::log10(n) + self.e as f64)
        }
    }

    fn materialize(&self) -> Complex64 {
        self.m * pow10(self.e)
    }
}

struct SeriesValues {
    f: Complex64,
    df: Complex64,
    ddf: Complex64,
}

/// One pass over the retained terms accumulating the polynomial part and its
/// first two derivatives, all in scaled arithmetic. The last ten retained
/// terms must contribute less than 1e-10 of the partial sum, otherwise the
/// truncation order is too small for this `x`. The first ten indices are
/// never counted as tail, so short exactly-terminating polynomials always
/// evaluate.
fn series_sums(series: &WavefunctionSeries, x: Complex64) -> Result<SeriesValues> {
    let order = series.order;
    let ix = Complex64::new(0.0, 1.0) * x;
    let mut pw = Complex64::new(1.0, 0.0);
    let mut pw_e: i64 = 0;
    let mut s0 = ScaledComplex::ZERO;
    let mut s1 = ScaledComplex::ZERO;
    let mut s2 = ScaledComplex::ZERO;
    let mut tail_logs = [f64::NEG_INFINITY; 10];

    for n in 0..=order {
        let h = series.coeffs.entry(n);
        let term = pw * h.mantissa;
        let term_e = pw_e + h.exp10;
        let t_norm = term.norm();
        if n >= 10 && n + 10 > order {
            tail_logs[n % 10] = if t_norm == 0.0 {
                f64::NEG_INFINITY
            } else {
                libm::log10(t_norm) + term_e as f64
            };
        }
        s0.add_term(term, term_e);

        if n < order {
            let hn1 = series.coeffs.entry(n + 1);
            let c = (n + 1) as f64;
            // d/dx of (ix)^(n+1) is (n+1) i (ix)^n
            s1.add_term(pw * (hn1.mantissa * c) * Complex64::new(0.0, 1.0), pw_e + hn1.exp10);
        }
        if n + 2 <= order {
            let hn2 = series.coeffs.entry(n + 2);
            let c = ((n + 2) * (n + 1)) as f64;
            // second derivative of (ix)^(n+2) is -(n+2)(n+1) (ix)^n
            s2.add_term(pw * (-hn2.mantissa * c), pw_e + hn2.exp10);
        }

        pw *= ix;
        let n2 = pw.norm_sqr();
        if n2 > 1e100 {
            pw *= 1e-50;
            pw_e += 50;
        } else if n2 > 0.0 && n2 < 1e-100 {
            pw *= 1e50;
            pw_e -= 50;
        }
    }

    let tail_max = tail_logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    match s0.log10_abs() {
        Some(sum_log) => {
            if tail_max > sum_log - 10.0 {
                return Err(Error::TailNotNegligible {
                    x_abs: x.norm(),
                    order,
                });
            }
        }
        None => {
            if tail_max > f64::NEG_INFINITY {
                return Err(Error::TailNotNegligible {
                    x_abs: x.norm(),
                    order,
                });
            }
        }
    }

    Ok(SeriesValues {
        f: s0.materialize(),
        df: s1.materialize(),
        ddf: s2.materialize(),
    })
}

/// Evaluate `psi(x)`. Fails when the truncation order is too small for the
/// requested point.
pub fn evaluate_psi(series: &WavefunctionSeries, x: Complex64) -> Result<Complex64> {
    let sums = series_sums(series, x)?;
    Ok(gaussian_factor(series.s, x) * sums.f)
}

/// `psi` and `psi''`, the latter from exact term-wise differentiation of the
/// truncated ansatz.
pub fn evaluate_psi_with_second_derivative(
    series: &WavefunctionSeries,
    x: Complex64,
) -> Result<(Complex64, Complex64)> {
    let sums = series_sums(series, x)?;
    let g = gaussian_factor(series.s, x);
    let s = series.s;
    let psi = g * sums.f;
    // (e^{-sx^2} f)'' = e^{-sx^2} (f'' - 4sx f' + (4 s^2 x^2 - 2 s) f)
    let psi_dd = g * (sums.ddf - sums.df * (4.0 * s) * x + sums.f * (x * x * (4.0 * s * s) - 2.0 * s));
    Ok((psi, psi_dd))
}

fn gaussian_factor(s: f64, x: Complex64) -> Complex64 {
    (-(x * x) * s).exp()
}

/// Worst-case violation of `psi(x) = conj(psi(-x))` over a real grid, scaled
/// by `max(1, |psi|)`. Real coefficients make this identically zero up to
/// rounding; the check guards the evaluation path.
pub fn pt_defect(series: &WavefunctionSeries, grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0;
    for &x in grid {
        let here = evaluate_psi(series, Complex64::new(x, 0.0))?;
        let mirrored = evaluate_psi(series, Complex64::new(-x, 0.0))?.conj();
        let defect = (here - mirrored).norm() / here.norm().max(1.0);
        if defect > worst {
            worst = defect;
        }
    }
    Ok(worst)
}

/// Worst relative residual of the differential equation
/// `-psi'' + (x^4 + i beta x^3 + c x^2 + i delta x) psi = E psi`
/// over a real grid, with `psi''` evaluated term-wise. For coefficients from
/// the forward recursion (any energy, matching initial pair) this sits at
/// the rounding floor; it is the end-to-end check that the recurrence really
/// is the differential equation.
pub fn ode_residual(series: &WavefunctionSeries, params: &UnitQuartic, grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0;
    for &x in grid {
        let (psi, psi_dd) = evaluate_psi_with_second_derivative(series, Complex64::new(x, 0.0))?;
        let v = Complex64::new(
            x * x * x * x + params.c() * x * x,
            params.beta() * x * x * x + params.delta() * x,
        );
        let lhs = -psi_dd + (v - Complex64::new(series.energy, 0.0)) * psi;
        let scale = psi.norm() + psi_dd.norm();
        if scale == 0.0 {
            continue;
        }
        let r = lhs.norm() / scale;
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// Per-side tail diagnostics from a probe sweep.
#[derive(Clone, Copy, Debug)]
pub struct TailSide {
    /// Coefficient of `x^2` in a least-squares fit of the outward derivative
    /// of `ln |psi|`; near +1 when the cubic growth `exp(|x|^3/3)` is on.
    pub fitted_cubic_coeff: Option<f64>,
    /// First probe radius at which the outward derivative turns positive.
    pub onset_radius: Option<f64>,
    /// Largest |x| the truncated series could be trusted at.
    pub usable_radius: f64,
    pub growing: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct TailReport {
    pub positive: TailSide,
    pub negative: TailSide,
    /// Set when either sweep was cut short or had too few points for the fit.
    pub degraded: bool,
}

const PROBE_START: f64 = 2.0;
const PROBE_STEP: f64 = 0.2;
const MIN_TAIL_SERIES_LEN: usize = 400;
const MIN_DERIVATIVE_POINTS: usize = 4;

/// Probe `|psi|` on both sides over `[2, x_probe]` and fit the outward
/// derivative of `ln |psi|` against `kappa x^2 + b x + c`. An unreliable
/// radius degrades the report instead of failing it.
pub fn tail_classification(
    series: &WavefunctionSeries,
    _params: &UnitQuartic,
    x_probe: f64,
) -> Result<TailReport> {
    if series.order + 1 < MIN_TAIL_SERIES_LEN {
        return Err(Error::SequenceTooShort {
            len: series.order + 1,
            needed: MIN_TAIL_SERIES_LEN,
        });
    }
    if !(x_probe.is_finite() && x_probe >= PROBE_START + 5.0 * PROBE_STEP) {
        return Err(Error::InvalidArgument {
            what: "probe radius must reach at least 3.0",
        });
    }

    let mut degraded = false;
    let mut sides = [None, None];
    for (slot, sign) in [(0usize, 1.0), (1usize, -1.0)] {
        let mut ts: Vec<f64> = Vec::new();
        let mut logs: Vec<f64> = Vec::new();
        let mut t = PROBE_START;
        let mut usable = 0.0;
        while t <= x_probe + 1e-12 {
            match evaluate_psi(series, Complex64::new(sign * t, 0.0)) {
                Ok(psi) => {
                    usable = t;
                    let n = psi.norm();
                    if n > 0.0 {
                        ts.push(t);
                        logs.push(libm::log(n));
                    }
                }
                Err(Error::TailNotNegligible { .. }) => break,
                Err(e) => return Err(e),
            }
            t += PROBE_STEP;
        }
        if usable + PROBE_STEP < x_probe {
            degraded = true;
        }

        // centered outward derivative of ln|psi|
        let mut dts: Vec<f64> = Vec::new();
        let mut gs: Vec<f64> = Vec::new();
        for i in 1..ts.len().saturating_sub(1) {
            let dt = ts[i + 1] - ts[i - 1];
            if dt > 0.0 {
                dts.push(ts[i]);
                gs.push((logs[i + 1] - logs[i - 1]) / dt);
            }
        }

        let (fitted, onset, growing) = if dts.len() < MIN_DERIVATIVE_POINTS {
            degraded = true;
            (None, None, false)
        } else {
            let mut m = [[0.0f64; 3]; 3];
            let mut rhs = [0.0f64; 3];
            for (t, g) in dts.iter().zip(gs.iter()) {
                let basis = [t * t, *t, 1.0];
                for (i, bi) in basis.iter().enumerate() {
                    for (j, bj) in basis.iter().enumerate() {
                        m[i][j] += bi * bj;
                    }
                    rhs[i] += bi * g;
                }
            }
            let coeff = crate::asymptotics::solve3(m, rhs);
            let onset = dts
                .iter()
                .zip(gs.iter())
                .find(|(_, g)| **g > 0.0)
                .map(|(t, _)| *t);
            let growing = gs.last().is_some_and(|g| *g > 0.0);
            (coeff.map(|c| c[0]), onset, growing)
        };

        sides[slot] = Some(TailSide {
            fitted_cubic_coeff: fitted,
            onset_radius: onset,
            usable_radius: usable,
            growing,
        });
    }

    Ok(TailReport {
        positive: sides[0].unwrap(),
        negative: sides[1].unwrap(),
        degraded,
    })
}
