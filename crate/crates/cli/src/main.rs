//! Command-line interface for the quartic-oscillator spectral solver.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ptaho_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// Bad parameters or an inadmissible configuration (exit code 2).
    Invalid(String),
    /// A numerical stage failed to converge or broke down (exit code 3).
    Numerical(String),
    /// Cross-checks disagree beyond their bounds (exit code 4).
    Verification(String),
    /// Filesystem trouble (exit code 1).
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Verification(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Numerical(m) | CliError::Verification(m) | CliError::Io(m) => m,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::NonPositiveQuartic { .. }
            | CoreError::NonFiniteParameter { .. }
            | CoreError::InvalidArgument { .. }
            | CoreError::GrowthConstraint { .. }
            | CoreError::DimensionTooSmall { .. }
            | CoreError::DeterminantOrderTooLarge { .. }
            | CoreError::FitRangeTooSmall { .. }
            | CoreError::SequenceTooShort { .. }
            | CoreError::LevelOutOfRange { .. } => CliError::Invalid(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone, Debug)]
pub struct CommonArgs {
    /// Quartic coupling (must be positive)
    #[arg(long)]
    a: Option<f64>,
    /// Coefficient of i x^3
    #[arg(long)]
    beta: Option<f64>,
    /// Coefficient of x^2
    #[arg(long)]
    c: Option<f64>,
    /// Coefficient of i x
    #[arg(long)]
    delta: Option<f64>,
    /// Gaussian exponent of the series ansatz
    #[arg(long)]
    s: Option<f64>,
    /// Truncation order (matrix dimension)
    #[arg(long)]
    n_trunc: Option<usize>,
    /// Config file: flat key = value text or a JSON fragment
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Round table numbers to 7 significant digits, like the published tables
    #[arg(long)]
    paper_style: bool,
    /// Seed for the inverse-iteration start vector
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<config::ResolvedConfig, CliError> {
        let file = match &self.config {
            Some(path) => config::load_file(path)?,
            None => config::FileConfig::default(),
        };
        let resolved = config::resolve(
            file,
            config::Overrides {
                a: self.a,
                beta: self.beta,
                c: self.c,
                delta: self.delta,
                s: self.s,
                n_trunc: self.n_trunc,
                seed: self.seed,
            },
        );
        resolved.solver_config().validate().map_err(CliError::from)?;
        Ok(resolved)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "ptaho",
    version,
    about = "Bound states of the non-Hermitian quartic oscillator p^2 + a x^4 + i b x^3 + c x^2 + i d x",
    long_about = "Computes bound-state energies and wavefunctions of the quartic oscillator with\n\
                  imaginary odd couplings by truncating the series-coefficient recurrence into a\n\
                  banded eigenproblem, with growth diagnostics and independent verification routes."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Real bound-state energies at one truncation order
    #[command(allow_negative_numbers = true)]
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of levels to report
        #[arg(long, default_value_t = 8)]
        levels: usize,
        /// Also dump the banded operator as row,col,value triples
        #[arg(long)]
        dump_matrix: Option<PathBuf>,
    },
    /// Energy table over a sweep of truncation orders
    #[command(allow_negative_numbers = true)]
    Converge {
        #[command(flatten)]
        common: CommonArgs,
        /// Truncation orders: comma list (5,6,7) and/or inclusive ranges (5..25)
        #[arg(long)]
        n_list: String,
        /// Number of levels per row
        #[arg(long, default_value_t = 8)]
        levels: usize,
    },
    /// Reconstruct one eigenstate and sample it on a grid
    #[command(allow_negative_numbers = true)]
    Wavefunction {
        #[command(flatten)]
        common: CommonArgs,
        /// Level index (0 = ground state)
        #[arg(long, default_value_t = 0)]
        level: usize,
        /// Half-width of the symmetric sampling grid
        #[arg(long, default_value_t = 1.0)]
        x_max: f64,
        /// Number of grid samples
        #[arg(long, default_value_t = 41)]
        samples: usize,
        /// Also dump the eigenvector coefficients as n,mantissa,exponent10
        #[arg(long)]
        coefficients_out: Option<PathBuf>,
    },
    /// Cross-check diagonalization, boundary-condition root finding, and the
    /// finite-difference reference; nonzero exit on disagreement
    #[command(allow_negative_numbers = true)]
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Levels to cross-check
        #[arg(long, default_value_t = 4)]
        levels: usize,
        /// Interior grid points of the finite-difference reference
        #[arg(long, default_value_t = 800)]
        fd_grid_points: usize,
        /// Half-width of the finite-difference box
        #[arg(long, default_value_t = 6.0)]
        fd_halfwidth: f64,
        /// Second Gaussian exponent for the independence check
        #[arg(long, default_value_t = 3.0)]
        s_alt: f64,
        /// Truncation order for the independence check
        #[arg(long, default_value_t = 40)]
        n_indep: usize,
        /// Truncation order used to seed the root finder
        #[arg(long, default_value_t = 25)]
        n_seed: usize,
    },
    /// Growth-rate table of the coefficient recurrence and the empirical fit
    #[command(allow_negative_numbers = true)]
    Asymptotics {
        #[command(flatten)]
        common: CommonArgs,
        /// Energy the coefficient sequence is generated at
        #[arg(long, default_value_t = 3.0)]
        energy: f64,
        /// Fit window start index
        #[arg(long, default_value_t = 100)]
        n_lo: usize,
        /// Fit window end index (inclusive)
        #[arg(long, default_value_t = 400)]
        n_hi: usize,
    },
    /// Taylor coefficients via forward recursion and via determinants, side by side
    #[command(allow_negative_numbers = true)]
    Determinants {
        #[command(flatten)]
        common: CommonArgs,
        /// Energy the sequences are generated at
        #[arg(long, default_value_t = 1.0)]
        energy: f64,
        /// Highest coefficient index (determinant path is capped at 60)
        #[arg(long, default_value_t = 30)]
        n_max: usize,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Spectrum {
            common,
            levels,
            dump_matrix,
        } => commands::spectrum::run(&common, levels, dump_matrix.as_deref()),
        Command::Converge {
            common,
            n_list,
            levels,
        } => commands::converge::run(&common, &n_list, levels),
        Command::Wavefunction {
            common,
            level,
            x_max,
            samples,
            coefficients_out,
        } => commands::wavefunction::run(&common, level, x_max, samples, coefficients_out.as_deref()),
        Command::Verify {
            common,
            levels,
            fd_grid_points,
            fd_halfwidth,
            s_alt,
            n_indep,
            n_seed,
        } => commands::verify::run(
            &common,
            commands::verify::Options {
                levels,
                fd_grid_points,
                fd_halfwidth,
                s_alt,
                n_indep,
                n_seed,
            },
        ),
        Command::Asymptotics {
            common,
            energy,
            n_lo,
            n_hi,
        } => commands::asymptotics::run(&common, energy, n_lo, n_hi),
        Command::Determinants {
            common,
            energy,
            n_max,
        } => commands::determinants::run(&common, energy, n_max),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
