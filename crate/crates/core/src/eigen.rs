//! Dense nonsymmetric eigenvalue machinery: balancing, Householder
//! reduction to upper Hessenberg form, implicit double-shift QR for the full
//! complex spectrum, real-spectrum filtering, and eigenvector recovery by
//! inverse iteration on the banded operator.
//!
//! The QR kernel follows the classical EISPACK/JAMA organization
//! (eigenvalues only, no Schur vectors). Bandedness is not exploited there:
//! nonsymmetric QR does not preserve the band and the dimensions involved
//! make dense cost a non-issue. The band structure is used for building, for
//! the shifted solves of inverse iteration, and for determinants.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dense::DenseMatrix;
use crate::hill::{BandedMatrix, LOWER_BANDWIDTH, UPPER_BANDWIDTH};
use crate::model::{EnergyScale, SolverConfig};
use crate::recurrence::{CoefficientSequence, SequenceOrigin};
use crate::scaled::Scaled;
use crate::{Error, Result};

/// All eigenvalues of a real matrix; conjugation-symmetric up to rounding.
#[derive(Clone, Debug)]
pub struct ComplexEigenvalueList {
    pub values: Vec<Complex64>,
    pub sweeps_used: usize,
}

/// Diagonal similarity scaling by powers of two that equalizes row and
/// column norms. Exact in floating point, so eigenvalues are unchanged.
/// Returns the scale factors.
pub fn balance(a: &mut DenseMatrix) -> Vec<f64> {
    let n = a.dim();
    let mut scale = vec![1.0; n];
    if n < 2 {
        return scale;
    }
    loop {
        let mut converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += libm::fabs(a.get(j, i));
                    row += libm::fabs(a.get(i, j));
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let total = col + row;
            let mut f = 1.0;
            let mut c = col;
            let mut g = row / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            g = row * 2.0;
            while c > g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + row) / f < 0.95 * total {
                converged = false;
                let inv = 1.0 / f;
                scale[i] *= f;
                for j in 0..n {
                    let v = a.get(i, j) * inv;
                    a.set(i, j, v);
                }
                for j in 0..n {
                    let v = a.get(j, i) * f;
                    a.set(j, i, v);
                }
            }
        }
        if converged {
            return scale;
        }
    }
}

/// Orthogonal (Householder) similarity reduction to upper Hessenberg form.
/// Entries below the first subdiagonal are zeroed explicitly.
pub fn hessenberg_reduce(a: &mut DenseMatrix) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n - 2 {
        let mut norm_sq = 0.0;
        for i in k + 1..n {
            let x = a.get(i, k);
            norm_sq += x * x;
        }
        if norm_sq == 0.0 {
            continue;
        }
        let x0 = a.get(k + 1, k);
        let alpha = if x0 >= 0.0 {
            -libm::sqrt(norm_sq)
        } else {
            libm::sqrt(norm_sq)
        };
        v[k + 1] = x0 - alpha;
        for i in k + 2..n {
            v[i] = a.get(i, k);
        }
        let vtv = norm_sq - 2.0 * alpha * x0 + alpha * alpha;
        if vtv == 0.0 {
            continue;
        }
        let beta = 2.0 / vtv;

        // left: A := A - beta v (v^T A), rows k+1.., cols k..
        for item in w.iter_mut().take(n).skip(k) {
            *item = 0.0;
        }
        {
            let data = a.as_mut_slice();
            for i in k + 1..n {
                let vi = v[i];
                if vi == 0.0 {
                    continue;
                }
                let row = &data[i * n..(i + 1) * n];
                for j in k..n {
                    w[j] += vi * row[j];
                }
            }
            for i in k + 1..n {
                let t = beta * v[i];
                if t == 0.0 {
                    continue;
                }
                let row = &mut data[i * n..(i + 1) * n];
                for j in k..n {
                    row[j] -= t * w[j];
                }
            }
            // right: A := A - beta (A v) v^T, cols k+1..
            for i in 0..n {
                let row = &mut data[i * n..(i + 1) * n];
                let mut dot = 0.0;
                for j in k + 1..n {
                    dot += row[j] * v[j];
                }
                let t = beta * dot;
                if t == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    row[j] -= t * v[j];
                }
            }
        }
        a.set(k + 1, k, alpha);
        for i in k + 2..n {
            a.set(i, k, 0.0);
        }
    }
}

/// Francis implicit double-shift QR on an upper Hessenberg matrix, with
/// deflation on negligible subdiagonals and exceptional shifts after 10 and
/// 30 stalled sweeps. Returns all eigenvalues; real ones come from 1x1
/// blocks, conjugate pairs from 2x2 blocks.
pub fn qr_eigenvalues(
    h: &mut DenseMatrix,
    max_sweeps_per_eigenvalue: usize,
) -> Result<ComplexEigenvalueList> {
    let n = h.dim();
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return Ok(ComplexEigenvalueList {
            values: out,
            sweeps_used: 0,
        });
    }
    for i in 0..n {
        for j in 0..n {
            if !h.get(i, j).is_finite() {
                return Err(Error::NonFiniteMatrixEntry { row: i, col: j });
            }
        }
    }
    if max_sweeps_per_eigenvalue == 0 {
        return Err(Error::InvalidArgument {
            what: "max_qr_sweeps_per_eigenvalue must be positive",
        });
    }

    let data = h.as_mut_slice();
    let at = |d: &[f64], i: isize, j: isize| -> f64 { d[i as usize * n + j as usize] };
    let eps = f64::EPSILON;

    // norm over the Hessenberg profile, used when a diagonal pair vanishes
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += libm::fabs(data[i * n + j]);
        }
    }

    let mut exshift = 0.0;
    let mut en = n as isize - 1;
    let mut iter = 0usize;
    let mut total_sweeps = 0usize;
    let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);

    while en >= 0 {
        // find the highest l with a negligible subdiagonal
        let mut l = en;
        while l > 0 {
            let mut s = libm::fabs(at(data, l - 1, l - 1)) + libm::fabs(at(data, l, l));
            if s == 0.0 {
                s = anorm;
            }
            if libm::fabs(at(data, l, l - 1)) <= eps * s {
                break;
            }
            l -= 1;
        }

        if l == en {
            // one real root
            out.push(Complex64::new(at(data, en, en) + exshift, 0.0));
            en -= 1;
            iter = 0;
            continue;
        }
        if l == en - 1 {
            // a 2x2 block: real pair or conjugate pair
            let w = at(data, en, en - 1) * at(data, en - 1, en);
            let pp = (at(data, en - 1, en - 1) - at(data, en, en)) / 2.0;
            let qq = pp * pp + w;
            let zz = libm::sqrt(libm::fabs(qq));
            let x = at(data, en, en) + exshift;
            if qq >= 0.0 {
                let zz = if pp >= 0.0 { pp + zz } else { pp - zz };
                let e1 = x + zz;
                let e2 = if zz != 0.0 { x - w / zz } else { e1 };
                out.push(Complex64::new(e1, 0.0));
                out.push(Complex64::new(e2, 0.0));
            } else {
                out.push(Complex64::new(x + pp, zz));
                out.push(Complex64::new(x + pp, -zz));
            }
            en -= 2;
            iter = 0;
            continue;
        }

        if iter >= max_sweeps_per_eigenvalue {
            return Err(Error::QrNoConvergence {
                block_end: en as usize,
                sweeps: total_sweeps,
            });
        }

        // form the shift
        let mut x = at(data, en, en);
        let mut y = at(data, en - 1, en - 1);
        let mut w = at(data, en, en - 1) * at(data, en - 1, en);
        if iter == 10 {
            // exceptional shift; applied to every not-yet-deflated diagonal
            // entry so that `exshift` stays a global offset
            exshift += x;
            for i in 0..=en {
                data[i as usize * n + i as usize] -= x;
            }
            let s = libm::fabs(at(data, en, en - 1)) + libm::fabs(at(data, en - 1, en - 2));
            x = 0.75 * s;
            y = x;
            w = -0.4375 * s * s;
        }
        if iter == 30 {
            let mut s = (y - x) / 2.0;
            s = s * s + w;
            if s > 0.0 {
                s = libm::sqrt(s);
                if y < x {
                    s = -s;
                }
                s = x - w / ((y - x) / 2.0 + s);
                for i in 0..=en {
                    data[i as usize * n + i as usize] -= s;
                }
                exshift += s;
                x = 0.964;
                y = 0.964;
                w = 0.964;
            }
        }
        iter += 1;
        total_sweeps += 1;

        // two consecutive small subdiagonals
        let mut m = en - 2;
        while m >= l {
            let zz = at(data, m, m);
            let rr = x - zz;
            let ss = y - zz;
            p = (rr * ss - w) / at(data, m + 1, m) + at(data, m, m + 1);
            q = at(data, m + 1, m + 1) - zz - rr - ss;
            r = at(data, m + 2, m + 1);
            let sc = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
            if sc != 0.0 {
                p /= sc;
                q /= sc;
                r /= sc;
            }
            if m == l {
                break;
            }
            if libm::fabs(at(data, m, m - 1)) * (libm::fabs(q) + libm::fabs(r))
                < eps
                    * libm::fabs(p)
                    * (libm::fabs(at(data, m - 1, m - 1))
                        + libm::fabs(zz)
                        + libm::fabs(at(data, m + 1, m + 1)))
            {
                break;
            }
            m -= 1;
        }
        for i in (m + 2)..=en {
            data[i as usize * n + (i - 2) as usize] = 0.0;
            if i > m + 2 {
                data[i as usize * n + (i - 3) as usize] = 0.0;
            }
        }

        // double QR sweep on rows m..=en
        for k in m..en {
            let notlast = k != en - 1;
            if k != m {
                p = at(data, k, k - 1);
                q = at(data, k + 1, k - 1);
                r = if notlast { at(data, k + 2, k - 1) } else { 0.0 };
                x = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                if x == 0.0 {
                    continue;
                }
                p /= x;
                q /= x;
                r /= x;
            }
            let mut s = libm::sqrt(p * p + q * q + r * r);
            if p < 0.0 {
                s = -s;
            }
            if s == 0.0 {
                continue;
            }
            if k != m {
                data[k as usize * n + (k - 1) as usize] = -s * x;
            } else if l != m {
                data[k as usize * n + (k - 1) as usize] = -at(data, k, k - 1);
            }
            p += s;
            x = p / s;
            y = q / s;
            let zz = r / s;
            q /= p;
            r /= p;

            // act on rows k, k+1, k+2 from the left
            for j in k..=en {
                let j_u = j as usize;
                let mut pp = data[k as usize * n + j_u] + q * data[(k + 1) as usize * n + j_u];
                if notlast {
                    pp += r * data[(k + 2) as usize * n + j_u];
                    data[(k + 2) as usize * n + j_u] -= pp * zz;
                }
                data[(k + 1) as usize * n + j_u] -= pp * y;
                data[k as usize * n + j_u] -= pp * x;
            }
            // act on columns k, k+1, k+2 from the right
            let i_hi = if en < k + 3 { en } else { k + 3 };
            for i in l..=i_hi {
                let i_u = i as usize;
                let mut pp = x * data[i_u * n + k as usize] + y * data[i_u * n + (k + 1) as usize];
                if notlast {
                    pp += zz * data[i_u * n + (k + 2) as usize];
                    data[i_u * n + (k + 2) as usize] -= pp * r;
                }
                data[i_u * n + (k + 1) as usize] -= pp * q;
                data[i_u * n + k as usize] -= pp;
            }
        }
    }

    Ok(ComplexEigenvalueList {
        values: out,
        sweeps_used: total_sweeps,
    })
}

/// Balance, reduce, and run QR in one pass.
pub fn eigenvalues(a: &DenseMatrix, max_sweeps_per_eigenvalue: usize) -> Result<ComplexEigenvalueList> {
    let mut work = a.clone();
    balance(&mut work);
    hessenberg_reduce(&mut work);
    qr_eigenvalues(&mut work, max_sweeps_per_eigenvalue)
}

/// Relative tolerance used to merge numerically coincident real eigenvalues.
pub const DEDUP_REL_TOL: f64 = 1e-8;

/// Sorted real part of the spectrum after unit-scale filtering, deduplication
/// and mapping through the energy scale.
#[derive(Clone, Debug)]
pub struct SpectrumResult {
    /// Strictly ascending energies of the original (unscaled) problem.
    pub energies: Vec<f64>,
    /// |Im| of each kept eigenvalue before scaling.
    pub imag_flags: Vec<f64>,
    pub n_trunc: usize,
    pub dropped_complex_pairs: usize,
}

pub(crate) fn filter_near_real(
    values: &[Complex64],
    tol_imag: f64,
) -> (Vec<(f64, f64)>, usize) {
    let mut kept: Vec<(f64, f64)> = values
        .iter()
        .filter(|z| libm::fabs(z.im) <= tol_imag * (1.0 + libm::fabs(z.re)))
        .map(|z| (z.re, libm::fabs(z.im)))
        .collect();
    kept.sort_by(|a, b| a.0.total_cmp(&b.0));
    let dropped = values.len() - kept.len();
    (kept, dropped / 2)
}

pub(crate) fn dedup_sorted(kept: &mut Vec<(f64, f64)>) {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(kept.len());
    for &(re, im) in kept.iter() {
        match out.last_mut() {
            Some(last) if re - last.0 <= DEDUP_REL_TOL * (1.0 + libm::fabs(re)) => {
                if im < last.1 {
                    last.1 = im;
                }
            }
            _ => out.push((re, im)),
        }
    }
    *kept = out;
}

/// Keep eigenvalues with |Im| within tolerance, sort ascending, merge
/// duplicates, then map through the energy scale. Filtering and
/// deduplication happen on the unit-quartic values.
pub fn real_spectrum(
    eigs: &ComplexEigenvalueList,
    scale: EnergyScale,
    config: &SolverConfig,
) -> SpectrumResult {
    let (mut kept, dropped_pairs) = filter_near_real(&eigs.values, config.tol_imag);
    dedup_sorted(&mut kept);
    SpectrumResult {
        energies: kept.iter().map(|(re, _)| re * scale.factor).collect(),
        imag_flags: kept.iter().map(|&(_, im)| im).collect(),
        n_trunc: config.n_trunc,
        dropped_complex_pairs: dropped_pairs,
    }
}

struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

const BAND_LU_WIDTH: usize = LOWER_BANDWIDTH + UPPER_BANDWIDTH + 1;

/// Compact LU of a shifted banded operator with partial pivoting. Row swaps
/// stay within the lower bandwidth, which widens the stored upper band from
/// 2 to 6.
struct BandLu {
    n: usize,
    upper: Vec<f64>,
    lower: Vec<f64>,
    pivot: Vec<usize>,
}

impl BandLu {
    /// Returns `None` when a pivot is exactly zero after pivoting.
    fn factor(d: &BandedMatrix, shift: f64) -> Option<BandLu> {
        let n = d.dim();
        let m1 = LOWER_BANDWIDTH;
        let mm = BAND_LU_WIDTH;
        let mut upper = vec![0.0; n * mm];
        let mut lower = vec![0.0; n * m1];
        let mut pivot = vec![0usize; n];

        for i in 0..n {
            for w in 0..mm {
                let j = i as isize + w as isize - m1 as isize;
                if j < 0 || j >= n as isize {
                    continue;
                }
                let j = j as usize;
                let mut v = d.entry(i, j);
                if i == j {
                    v -= shift;
                }
                upper[i * mm + w] = v;
            }
        }
        // left-align the short leading rows
        for i in 0..m1.min(n) {
            let l = m1 - i;
            for j in 0..(mm - l) {
                upper[i * mm + j] = upper[i * mm + j + l];
            }
            for j in (mm - l)..mm {
                upper[i * mm + j] = 0.0;
            }
        }

        for k in 0..n {
            let lim = (k + m1).min(n - 1);
            let mut piv = k;
            let mut best = libm::fabs(upper[k * mm]);
            for i in (k + 1)..=lim {
                let v = libm::fabs(upper[i * mm]);
                if v > best {
                    best = v;
                    piv = i;
                }
            }
            pivot[k] = piv;
            if best == 0.0 {
                return None;
            }
            if piv != k {
                for w in 0..mm {
                    upper.swap(k * mm + w, piv * mm + w);
                }
            }
            let diag = upper[k * mm];
            for i in (k + 1)..=lim {
                let mult = upper[i * mm] / diag;
                lower[k * m1 + (i - k - 1)] = mult;
                for w in 1..mm {
                    upper[i * mm + w - 1] = upper[i * mm + w] - mult * upper[k * mm + w];
                }
                upper[i * mm + mm - 1] = 0.0;
            }
        }

        Some(BandLu {
            n,
            upper,
            lower,
            pivot,
        })
    }

    fn solve(&self, b: &[f64], out: &mut [f64]) {
        let n = self.n;
        let m1 = LOWER_BANDWIDTH;
        let mm = BAND_LU_WIDTH;
        out.copy_from_slice(b);
        for k in 0..n {
            let lim = (k + m1).min(n - 1);
            if self.pivot[k] != k {
                out.swap(k, self.pivot[k]);
            }
            for i in (k + 1)..=lim {
                out[i] -= self.lower[k * m1 + (i - k - 1)] * out[k];
            }
        }
        for i in (0..n).rev() {
            let mut acc = out[i];
            let w_hi = mm.min(n - i);
            for w in 1..w_hi {
                acc -= self.upper[i * mm + w] * out[i + w];
            }
            out[i] = acc / self.upper[i * mm];
        }
    }
}

const MAX_INVERSE_ITERATIONS: usize = 64;

/// Recover the eigenvector of the banded operator belonging to an eigenvalue
/// estimate by inverse iteration, then normalize the leading pair to the
/// unit circle: `(h_0, h_1) = (cos zeta, sin zeta)`.
///
/// The shifted factorization being exactly singular is handled by perturbing
/// the shift by `1e-10 * (1 + |E|)`, at most three times.
pub fn eigenvector_inverse_iteration(
    d: &BandedMatrix,
    energy: f64,
    config: &SolverConfig,
) -> Result<(CoefficientSequence, f64)> {
    config.validate()?;
    let n = d.dim();
    if n < 2 {
        return Err(Error::InvalidArgument {
            what: "inverse iteration needs dimension >= 2 to define the leading pair",
        });
    }
    if !energy.is_finite() {
        return Err(Error::NonFiniteParameter {
            name: "energy",
            value: energy,
        });
    }

    let mut lu = None;
    for attempt in 0..4usize {
        let shift = energy + attempt as f64 * 1e-10 * (1.0 + libm::fabs(energy));
        if let Some(f) = BandLu::factor(d, shift) {
            lu = Some(f);
            break;
        }
    }
    let lu = lu.ok_or(Error::SingularShiftedSystem { attempts: 4 })?;

    let mut rng = SplitMix64::new(config.seed);
    let mut x: Vec<f64> = (0..n).map(|_| 2.0 * rng.next_unit() - 1.0).collect();
    let norm_d = d.inf_norm();
    let mut y = vec![0.0; n];
    let mut resid = vec![0.0; n];
    let mut last_rel = f64::INFINITY;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        lu.solve(&x, &mut y);
        let ymax = y.iter().fold(0.0f64, |m, v| m.max(libm::fabs(*v)));
        if ymax == 0.0 || !ymax.is_finite() {
            return Err(Error::InverseIterationStalled { residual: last_rel });
        }
        for (xi, yi) in x.iter_mut().zip(y.iter()) {
            *xi = yi / ymax;
        }
        d.matvec(&x, &mut resid);
        let mut r2 = 0.0;
        let mut x2 = 0.0;
        for i in 0..n {
            let ri = resid[i] - energy * x[i];
            r2 += ri * ri;
            x2 += x[i] * x[i];
        }
        let xnorm = libm::sqrt(x2);
        let rnorm = libm::sqrt(r2);
        last_rel = rnorm / (norm_d * xnorm);
        if rnorm <= config.tol_residual * norm_d * xnorm {
            let rho = libm::hypot(x[0], x[1]);
            if rho < 1e-150 {
                return Err(Error::DegenerateLeadingPair);
            }
            let zeta = wrap_angle(libm::atan2(x[1], x[0]));
            let entries: Vec<Scaled> = x.iter().map(|v| Scaled::from_value(v / rho)).collect();
            return Ok((
                CoefficientSequence::from_entries(entries, SequenceOrigin::FromInitialPair),
                zeta,
            ));
        }
    }
    Err(Error::InverseIterationStalled { residual: last_rel })
}

pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * core::f64::consts::PI;
    let mut t = libm::fmod(theta, two_pi);
    if t < 0.0 {
        t += two_pi;
    }
    if t >= two_pi {
        t = 0.0;
    }
    t
}

/// How one reference level is realized at some truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LevelSlot {
    Real(f64),
    /// A complex-conjugate pair sits where this level should be.
    DroppedPair,
    Empty,
}

/// |Im| bound (relative) below which a dropped conjugate pair is treated as
/// a level that has just left the real axis at this truncation.
pub const PAIR_IM_CAP: f64 = 0.15;

/// Assign computed real eigenvalues and dropped complex pairs `(Re, |Im|)`
/// to a list of reference levels.
///
/// A near-real pair (|Im| <= 0.15 (1 + |Re|)) whose real part lands within
/// `pair_rel_cap * (1 + |reference|)` of a slot claims that slot. Each such
/// pair stands for two eigenvalues missing from the real list, so it also
/// withholds one further fill: after the remaining real values are matched
/// monotonically at minimum cost within `fill_rel_cap`, the costliest
/// matches are dropped until at most `open_slots - claiming_pairs` remain.
/// Coarse truncations approximate high levels badly, hence the fill window
/// is much wider than the pair window.
pub fn assign_levels(
    reference: &[f64],
    reals: &[f64],
    dropped_pairs: &[(f64, f64)],
    pair_rel_cap: f64,
    fill_rel_cap: f64,
) -> Vec<LevelSlot> {
    let ns = reference.len();
    let mut slots = vec![LevelSlot::Empty; ns];
    let mut claims = 0usize;
    for &(pre, pim) in dropped_pairs {
        if pim > PAIR_IM_CAP * (1.0 + libm::fabs(pre)) {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for (j, &r) in reference.iter().enumerate() {
            let dist = libm::fabs(pre - r);
            if dist <= pair_rel_cap * (1.0 + libm::fabs(r))
                && best.is_none_or(|(_, d)| dist < d)
                && matches!(slots[j], LevelSlot::Empty)
            {
                best = Some((j, dist));
            }
        }
        if let Some((j, _)) = best {
            slots[j] = LevelSlot::DroppedPair;
            claims += 1;
        }
    }

    let open: Vec<usize> = (0..ns)
        .filter(|&j| matches!(slots[j], LevelSlot::Empty))
        .collect();
    let mut assignment = monotone_match(
        &open.iter().map(|&j| reference[j]).collect::<Vec<_>>(),
        reals,
        fill_rel_cap,
    );
    let allowed = open.len().saturating_sub(claims);
    while assignment.len() > allowed {
        let worst = assignment
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| {
                let ca = libm::fabs(reals[a.1] - reference[open[a.0]]);
                let cb = libm::fabs(reals[b.1] - reference[open[b.0]]);
                ca.total_cmp(&cb)
            })
            .map(|(i, _)| i)
            .expect("assignment non-empty");
        assignment.remove(worst);
    }
    for (slot_idx, real_idx) in assignment {
        slots[open[slot_idx]] = LevelSlot::Real(reals[real_idx]);
    }
    slots
}

/// Order-preserving matching of `values` into `targets` maximizing the
/// number of matches and, among those, minimizing total distance. Pairs
/// farther than `rel_cap * (1 + |target|)` are forbidden.
fn monotone_match(targets: &[f64], values: &[f64], rel_cap: f64) -> Vec<(usize, usize)> {
    let nt = targets.len();
    let nv = values.len();
    // best[i][j]: (matched, cost) achievable using targets[i..] and values[j..]
    let mut best = vec![(0usize, 0.0f64); (nt + 1) * (nv + 1)];
    let idx = |i: usize, j: usize| i * (nv + 1) + j;
    for i in (0..nt).rev() {
        for j in (0..nv).rev() {
            let mut cand = best[idx(i + 1, j)]; // skip target i
            let skip_value = best[idx(i, j + 1)]; // skip value j
            if skip_value.0 > cand.0 || (skip_value.0 == cand.0 && skip_value.1 < cand.1) {
                cand = skip_value;
            }
            let dist = libm::fabs(values[j] - targets[i]);
            if dist <= rel_cap * (1.0 + libm::fabs(targets[i])) {
                let tail = best[idx(i + 1, j + 1)];
                let take = (tail.0 + 1, tail.1 + dist);
                if take.0 > cand.0 || (take.0 == cand.0 && take.1 < cand.1) {
                    cand = take;
                }
            }
            best[idx(i, j)] = cand;
        }
    }
    // walk the table to extract the matching
    let mut out = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    while i < nt && j < nv {
        let here = best[idx(i, j)];
        let dist = libm::fabs(values[j] - targets[i]);
        if dist <= rel_cap * (1.0 + libm::fabs(targets[i])) {
            let tail = best[idx(i + 1, j + 1)];
            if (tail.0 + 1, tail.1 + dist) == here {
                out.push((i, j));
                i += 1;
                j += 1;
                continue;
            }
        }
        if best[idx(i + 1, j)] == here {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}
