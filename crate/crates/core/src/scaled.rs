//! Per-entry scientific notation for coefficient sequences whose magnitudes
//! leave the representable range of `f64` at large index.

/// A signed real stored as `mantissa * 10^exp10` with |mantissa| in [1, 10)
/// or exactly zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub exp10: i64,
}

pub(crate) fn pow10(e: i64) -> f64 {
    libm::pow(10.0, e as f64)
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: 0.0,
        exp10: 0,
    };

    /// Normalize `raw * 10^exp10` into mantissa form.
    pub fn from_parts(raw: f64, exp10: i64) -> Scaled {
        if raw == 0.0 {
            return Scaled::ZERO;
        }
        let shift = libm::floor(libm::log10(libm::fabs(raw))) as i64;
        let mut mantissa = raw / pow10(shift);
        let mut exp = exp10 + shift;
        // log10 can misplace the decade boundary by one slot
        if libm::fabs(mantissa) >= 10.0 {
            mantissa /= 10.0;
            exp += 1;
        } else if libm::fabs(mantissa) < 1.0 {
            mantissa *= 10.0;
            exp -= 1;
        }
        Scaled {
            mantissa,
            exp10: exp,
        }
    }

    pub fn from_value(value: f64) -> Scaled {
        Scaled::from_parts(value, 0)
    }

    /// Rebuild `sign * 10^log10_abs`.
    pub fn from_sign_log10(sign: f64, log10_abs: f64) -> Scaled {
        if sign == 0.0 {
            return Scaled::ZERO;
        }
        let exp = libm::floor(log10_abs) as i64;
        let mantissa = libm::copysign(libm::pow(10.0, log10_abs - exp as f64), sign);
        Scaled::from_parts(mantissa, exp)
    }

    /// Collapse to f64, saturating to `inf`/`0` outside the double range.
    pub fn value(&self) -> f64 {
        self.mantissa * pow10(self.exp10)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn log10_abs(&self) -> Option<f64> {
        if self.is_zero() {
            None
        } else {
            Some(libm::log10(libm::fabs(self.mantissa)) + self.exp10 as f64)
        }
    }

    pub fn ln_abs(&self) -> Option<f64> {
        self.log10_abs().map(|l| l * core::f64::consts::LN_10)
    }

    pub fn signum(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else if self.mantissa > 0.0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Evaluate `sum(coeff_i * value_i)` with all terms aligned on the largest
/// exponent, so the reduction itself can never overflow. Returns the raw
/// accumulator together with that exponent.
pub(crate) fn linear_combination(terms: &[(f64, Scaled)]) -> (f64, i64) {
    let mut emax = i64::MIN;
    for (c, v) in terms {
        if *c != 0.0 && !v.is_zero() && v.exp10 > emax {
            emax = v.exp10;
        }
    }
    if emax == i64::MIN {
        return (0.0, 0);
    }
    let mut acc = 0.0;
    for (c, v) in terms {
        if *c == 0.0 || v.is_zero() {
            continue;
        }
        acc += c * v.mantissa * pow10(v.exp10 - emax);
    }
    (acc, emax)
}

/// Like `linear_combination` but also reports the largest aligned term
/// magnitude, for scale-free residual checks.
pub(crate) fn linear_combination_with_scale(terms: &[(f64, Scaled)]) -> (f64, i64, f64) {
    let mut emax = i64::MIN;
    for (c, v) in terms {
        if *c != 0.0 && !v.is_zero() && v.exp10 > emax {
            emax = v.exp10;
        }
    }
    if emax == i64::MIN {
        return (0.0, 0, 0.0);
    }
    let mut acc = 0.0;
    let mut largest = 0.0;
    for (c, v) in terms {
        if *c == 0.0 || v.is_zero() {
            continue;
        }
        let t = c * v.mantissa * pow10(v.exp10 - emax);
        acc += t;
        let a = libm::fabs(t);
        if a > largest {
            largest = a;
        }
    }
    (acc, emax, largest)
}
