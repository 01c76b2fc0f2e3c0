//! Bound states of the non-Hermitian quartic oscillator
//! `p^2 + a x^4 + i beta x^3 + c x^2 + i delta x` (a > 0) on the real line,
//! whose potential satisfies the antilinear symmetry `V(x) = conj(V(-x))`.
//!
//! Substituting the ansatz `psi(x) = exp(-s x^2) sum_n h_n (ix)^n` turns the
//! differential eigenproblem into a six-term recurrence with real
//! coefficients; truncating it with `h_N = h_{N+1} = 0` gives a real banded
//! non-symmetric matrix whose eigenvalues approximate the energies. The
//! crate builds that matrix, diagonalizes it with a dense double-shift QR,
//! recovers eigenvectors by banded inverse iteration, analyzes the
//! large-index growth of the coefficients, reconstructs and checks the
//! wavefunction, and cross-verifies against two independent routes (a
//! Newton solve on the truncation conditions and a finite-difference
//! discretization).
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod asymptotics;
pub mod dense;
pub mod eigen;
mod error;
pub mod hill;
pub mod model;
pub mod oracle;
pub mod recurrence;
pub mod scaled;
pub mod wavefunction;

pub use error::{Error, NewtonStep};
pub use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

use model::{
    rescale_to_unit_quartic, validate_growth_constraint, EnergyScale, OscillatorParams,
    SolverConfig, UnitQuartic,
};

/// Validate, rescale to the unit quartic, and check the growth bound.
/// Every spectral entry point goes through this gate before any numerical
/// work happens.
pub fn prepare(
    params: &OscillatorParams,
    config: &SolverConfig,
) -> Result<(UnitQuartic, EnergyScale)> {
    config.validate()?;
    let (unit, scale) = rescale_to_unit_quartic(params)?;
    let verdict = validate_growth_constraint(config, unit.params());
    if !verdict.valid {
        return Err(Error::GrowthConstraint {
            s: config.s,
            min_s: verdict.min_admissible_s,
        });
    }
    Ok((unit, scale))
}

/// Full complex spectrum of the truncated operator, on the unit-quartic
/// scale, together with the energy scale for mapping back.
pub fn hill_eigenvalues(
    params: &OscillatorParams,
    config: &SolverConfig,
) -> Result<(eigen::ComplexEigenvalueList, EnergyScale)> {
    let (unit, scale) = prepare(params, config)?;
    let banded = hill::build_hill_operator(config, &unit)?;
    let eigs = eigen::eigenvalues(&banded.to_dense(), config.max_qr_sweeps_per_eigenvalue)?;
    Ok((eigs, scale))
}

/// Real bound-state energies of the original problem: build, diagonalize,
/// filter, sort, rescale.
pub fn spectrum(params: &OscillatorParams, config: &SolverConfig) -> Result<eigen::SpectrumResult> {
    let (eigs, scale) = hill_eigenvalues(params, config)?;
    Ok(eigen::real_spectrum(&eigs, scale, config))
}

/// One bound state: energy (both scales), leading-pair phase, and the
/// eigenvector as a coefficient sequence normalized to
/// `h_0^2 + h_1^2 = 1`.
#[derive(Clone, Debug)]
pub struct Eigenstate {
    /// Energy of the original problem.
    pub energy: f64,
    /// Energy of the rescaled (unit-quartic) problem.
    pub unit_energy: f64,
    pub zeta: f64,
    pub series: wavefunction::WavefunctionSeries,
    /// The full real spectrum of the same diagonalization, already rescaled.
    pub full_spectrum: eigen::SpectrumResult,
}

/// Diagonalize, pick the `level`-th real energy, and recover its
/// eigenvector by inverse iteration.
pub fn eigenstate(
    params: &OscillatorParams,
    config: &SolverConfig,
    level: usize,
) -> Result<Eigenstate> {
    let (unit, scale) = prepare(params, config)?;
    let banded = hill::build_hill_operator(config, &unit)?;
    let eigs = eigen::eigenvalues(&banded.to_dense(), config.max_qr_sweeps_per_eigenvalue)?;
    let unit_spectrum = eigen::real_spectrum(&eigs, EnergyScale::IDENTITY, config);
    if level >= unit_spectrum.energies.len() {
        return Err(Error::LevelOutOfRange {
            level,
            available: unit_spectrum.energies.len(),
        });
    }
    let unit_energy = unit_spectrum.energies[level];
    let (coeffs, zeta) = eigen::eigenvector_inverse_iteration(&banded, unit_energy, config)?;
    let order = coeffs.len() - 1;
    let series = wavefunction::WavefunctionSeries::new(coeffs, config.s, order, unit_energy)?;
    Ok(Eigenstate {
        energy: unit_energy * scale.factor,
        unit_energy,
        zeta,
        series,
        full_spectrum: eigen::SpectrumResult {
            energies: unit_spectrum
                .energies
                .iter()
                .map(|e| e * scale.factor)
                .collect(),
            imag_flags: unit_spectrum.imag_flags.clone(),
            n_trunc: unit_spectrum.n_trunc,
            dropped_complex_pairs: unit_spectrum.dropped_complex_pairs,
        },
    })
}
