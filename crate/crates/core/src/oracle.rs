//! Independent verification paths for the banded spectral solve.
//!
//! Two routes that share no linear algebra with the main diagonalization:
//!
//! * a damped two-parameter Newton iteration on the truncation conditions
//!   `h_N = h_{N+1} = 0` over the unknowns `(E, zeta)` with
//!   `(h_0, h_1) = (cos zeta, sin zeta)`, and
//! * a central finite-difference discretization of the differential equation
//!   on `[-X, X]` with Dirichlet ends, Richardson-extrapolated over two
//!   grids.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::DenseMatrix;
use crate::eigen::{self, ComplexEigenvalueList};
use crate::error::NewtonStep;
use crate::model::{validate_growth_constraint, OscillatorParams, SolverConfig, UnitQuartic};
use crate::recurrence::forward_coefficients;
use crate::{Error, Result};

/// A point in the two-parameter boundary space: the energy and the phase of
/// the leading coefficient pair at unit norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryState {
    pub energy: f64,
    /// In `[0, 2 pi)`.
    pub zeta: f64,
}

impl BoundaryState {
    pub fn new(energy: f64, zeta: f64) -> Self {
        BoundaryState {
            energy,
            zeta: eigen::wrap_angle(zeta),
        }
    }
}

/// Run the recurrence forward from `(cos zeta, sin zeta)` and return
/// `(h_N, h_{N+1})` rescaled by the envelope maximum over the window
/// `[N-5, N+1]`, so the mismatch is O(1) regardless of how fast the
/// coefficients grow at a non-eigenvalue energy.
pub fn truncation_mismatch(
    state: &BoundaryState,
    n_trunc: usize,
    config: &SolverConfig,
    params: &UnitQuartic,
) -> Result<(f64, f64)> {
    if n_trunc < 2 {
        return Err(Error::InvalidArgument {
            what: "truncation mismatch needs n_trunc >= 2",
        });
    }
    let seq = forward_coefficients(
        state.energy,
        libm::cos(state.zeta),
        libm::sin(state.zeta),
        n_trunc + 1,
        config,
        params,
    )?;
    let lo = n_trunc.saturating_sub(5);
    let mut env_log = f64::NEG_INFINITY;
    for n in lo..=n_trunc + 1 {
        if let Some(l) = seq.log10_abs(n) {
            if l > env_log {
                env_log = l;
            }
        }
    }
    if env_log == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument {
            what: "coefficient window is identically zero",
        });
    }
    let rescaled = |n: usize| -> f64 {
        let e = seq.entry(n);
        match e.log10_abs() {
            Some(l) => e.signum() * libm::pow(10.0, l - env_log),
            None => 0.0,
        }
    };
    Ok((rescaled(n_trunc), rescaled(n_trunc + 1)))
}

const NEWTON_MAX_ITERATIONS: usize = 50;
const NEWTON_MAX_HALVINGS: usize = 20;
const NEWTON_TOLERANCE: f64 = 1e-10;

/// Damped Newton iteration on the rescaled pair `(h_N, h_{N+1})` over
/// `(E, zeta)`, Jacobian by central finite differences. Converges when the
/// mismatch norm drops below 1e-10. Seeds from a diagonalization at a
/// smaller truncation land well inside the basin.
pub fn solve_boundary_conditions(
    initial: BoundaryState,
    n_trunc: usize,
    config: &SolverConfig,
    params: &UnitQuartic,
) -> Result<BoundaryState> {
    let verdict = validate_growth_constraint(config, params.params());
    if !verdict.valid {
        return Err(Error::GrowthConstraint {
            s: config.s,
            min_s: verdict.min_admissible_s,
        });
    }
    if n_trunc < 5 {
        return Err(Error::DimensionTooSmall {
            dim: n_trunc,
            min: 5,
        });
    }

    let eval = |e: f64, z: f64| -> Result<(f64, f64)> {
        truncation_mismatch(&BoundaryState::new(e, z), n_trunc, config, params)
    };

    let mut energy = initial.energy;
    let mut zeta = eigen::wrap_angle(initial.zeta);
    let (mut f1, mut f2) = eval(energy, zeta)?;
    let mut mismatch = libm::hypot(f1, f2);
    let mut trail: Vec<NewtonStep> = Vec::new();

    for _ in 0..NEWTON_MAX_ITERATIONS {
        trail.push(NewtonStep {
            energy,
            zeta,
            mismatch,
        });
        if mismatch < NEWTON_TOLERANCE {
            return Ok(BoundaryState::new(energy, zeta));
        }

        let de = 1e-6 * (1.0 + libm::fabs(energy));
        let dz = 1e-6;
        let (ep1, ep2) = eval(energy + de, zeta)?;
        let (em1, em2) = eval(energy - de, zeta)?;
        let (zp1, zp2) = eval(energy, zeta + dz)?;
        let (zm1, zm2) = eval(energy, zeta - dz)?;
        let j11 = (ep1 - em1) / (2.0 * de);
        let j21 = (ep2 - em2) / (2.0 * de);
        let j12 = (zp1 - zm1) / (2.0 * dz);
        let j22 = (zp2 - zm2) / (2.0 * dz);
        let det = j11 * j22 - j12 * j21;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularJacobian { energy });
        }
        let step_e = (j22 * f1 - j12 * f2) / det;
        let step_z = (-j21 * f1 + j11 * f2) / det;

        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..NEWTON_MAX_HALVINGS {
            let e_try = energy - lambda * step_e;
            let z_try = zeta - lambda * step_z;
            let (t1, t2) = eval(e_try, z_try)?;
            let t_norm = libm::hypot(t1, t2);
            if t_norm < mismatch {
                energy = e_try;
                zeta = eigen::wrap_angle(z_try);
                f1 = t1;
                f2 = t2;
                mismatch = t_norm;
                accepted = true;
                break;
            }
            lambda /= 2.0;
        }
        if !accepted {
            return Err(Error::NewtonDidNotConverge { mismatch, trail });
        }
    }
    if mismatch < NEWTON_TOLERANCE {
        return Ok(BoundaryState::new(energy, zeta));
    }
    Err(Error::NewtonDidNotConverge { mismatch, trail })
}

/// Potential samples on the symmetric interior grid of `[-X, X]` with
/// `m` points and spacing `2X/(m+1)`. Construction enforces the exact
/// symmetry `x_j = -x_{m-1-j}` in floating point, so the even/odd splitting
/// below is exact.
pub fn potential_on_grid(
    params: &OscillatorParams,
    x_half: f64,
    m: usize,
) -> (Vec<f64>, Vec<f64>) {
    let h = 2.0 * x_half / (m + 1) as f64;
    let mut v_re = vec![0.0; m];
    let mut v_im = vec![0.0; m];
    for j in 0..m / 2 {
        let x = (j + 1) as f64 * h - x_half; // negative side
        let re = params.a * x * x * x * x + params.c * x * x;
        let im = params.beta * x * x * x + params.delta * x;
        v_re[j] = re;
        v_im[j] = im;
        v_re[m - 1 - j] = re;
        v_im[m - 1 - j] = -im;
    }
    // center point of an odd grid sits exactly at x = 0
    (v_re, v_im)
}

/// Real matrix with the same spectrum as the complex tridiagonal
/// discretization `A + iB` (A: Laplacian + even potential, B: odd potential).
///
/// Both A and B commute/anticommute with the grid reflection, so in the
/// reflection-adapted basis the complex matrix block-diagonalizes and a
/// diagonal phase similarity makes it real: `[[A_e, -B_d], [B_d, A_o]]`.
fn parity_reduced_matrix(v_re: &[f64], v_im: &[f64], h: f64) -> DenseMatrix {
    let m = v_re.len();
    let k = m / 2;
    let center = m % 2 == 1;
    let n_even = k + usize::from(center);
    let t = -1.0 / (h * h);
    let diag = |j: usize| 2.0 / (h * h) + v_re[j];

    let mut r = DenseMatrix::zeros(m);
    // even block: pair combinations ordered from the boundary inward,
    // the center point (when present) last
    for p in 0..k {
        let mut d = diag(p);
        if !center && p == k - 1 {
            d += t; // the two middle points are reflection partners
        }
        r.set(p, p, d);
        if p > 0 {
            r.set(p, p - 1, t);
            r.set(p - 1, p, t);
        }
    }
    if center {
        let c = k;
        r.set(c, c, diag(k));
        if k > 0 {
            // the center couples to the nearest pair with weight sqrt(2) t
            let w = libm::sqrt(2.0) * t;
            r.set(c, k - 1, w);
            r.set(k - 1, c, w);
        }
    }
    // odd block
    for p in 0..k {
        let mut d = diag(p);
        if !center && p == k - 1 {
            d -= t;
        }
        let row = n_even + p;
        r.set(row, row, d);
        if p > 0 {
            r.set(row, row - 1, t);
            r.set(row - 1, row, t);
        }
    }
    // odd-potential coupling between the parity sectors
    for p in 0..k {
        let b = v_im[p];
        r.set(p, n_even + p, -b);
        r.set(n_even + p, p, b);
    }
    r
}

const FD_QR_MAX_SWEEPS: usize = 60;

/// All eigenvalues of the real `2m x 2m` embedding `[[A, -B], [B, A]]` of
/// the complex finite-difference matrix: the spectrum of `A + iB` together
/// with its conjugate. Computed through the parity-reduced real form, whose
/// spectrum equals that of `A + iB` exactly; the embedding then doubles it.
pub fn fd_grid_eigenvalues(v_re: &[f64], v_im: &[f64], x_half: f64) -> Result<ComplexEigenvalueList> {
    let m = v_re.len();
    if m == 0 || v_im.len() != m {
        return Err(Error::InvalidArgument {
            what: "potential arrays must be non-empty and equally long",
        });
    }
    if !(x_half.is_finite() && x_half > 0.0) {
        return Err(Error::NonFiniteParameter {
            name: "x_half",
            value: x_half,
        });
    }
    let h = 2.0 * x_half / (m + 1) as f64;
    let reduced = parity_reduced_matrix(v_re, v_im, h);
    let eigs = eigen::eigenvalues(&reduced, FD_QR_MAX_SWEEPS)?;
    let mut doubled = eigs.values.clone();
    doubled.extend(eigs.values.iter().map(|z| z.conj()));
    Ok(ComplexEigenvalueList {
        values: doubled,
        sweeps_used: eigs.sweeps_used,
    })
}

/// Near-real eigenvalues of one grid, ascending, conjugate copies merged.
pub fn fd_single_grid_levels(
    params: &OscillatorParams,
    x_half: f64,
    grid_points: usize,
) -> Result<Vec<f64>> {
    params.validate()?;
    if grid_points < 32 {
        return Err(Error::DimensionTooSmall {
            dim: grid_points,
            min: 32,
        });
    }
    let (v_re, v_im) = potential_on_grid(params, x_half, grid_points);
    let eigs = fd_grid_eigenvalues(&v_re, &v_im, x_half)?;
    let (mut kept, _) = eigen::filter_near_real(&eigs.values, 1e-6);
    eigen::dedup_sorted(&mut kept);
    Ok(kept.into_iter().map(|(re, _)| re).collect())
}

/// Absolute stability window for accepting a level across the two grids.
pub const FD_STABILITY_TOL: f64 = 1e-2;

/// Pair levels across a grid and its refinement; keep the stable ones and
/// Richardson-extrapolate the second-order error away:
/// `E = (4 E_fine - E_coarse) / 3`. Unstable levels are spectral pollution
/// and are dropped.
pub fn fd_pair_extrapolate(coarse: &[f64], fine: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    let mut i = 0;
    let mut j = 0;
    while i < coarse.len() && j < fine.len() {
        let d = coarse[i] - fine[j];
        if libm::fabs(d) <= FD_STABILITY_TOL {
            out.push((4.0 * fine[j] - coarse[i]) / 3.0);
            i += 1;
            j += 1;
        } else if coarse[i] < fine[j] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Reference energies from two grids (`m` and `2m + 1` interior points, so
/// the spacing halves exactly) with Richardson extrapolation and pollution
/// filtering. No minimum on `m` beyond basic sanity; accuracy is the
/// caller's choice.
pub fn fd_reference_levels(
    params: &OscillatorParams,
    x_half: f64,
    grid_points: usize,
) -> Result<Vec<f64>> {
    let coarse = fd_single_grid_levels(params, x_half, grid_points)?;
    let fine = fd_single_grid_levels(params, x_half, 2 * grid_points + 1)?;
    Ok(fd_pair_extrapolate(&coarse, &fine))
}

/// The production reference solver: domain wide enough for the tails
/// (default half-width 6) and at least 800 interior points.
pub fn fd_reference_solver(
    params: &OscillatorParams,
    x_half: f64,
    grid_points: usize,
) -> Result<Vec<f64>> {
    if grid_points < 800 {
        return Err(Error::DimensionTooSmall {
            dim: grid_points,
            min: 800,
        });
    }
    fd_reference_levels(params, x_half, grid_points)
}
