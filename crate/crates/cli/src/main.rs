//! `sympwig`: command-line front end.
//!
//! Every subcommand prints one JSON document on standard output (sorted keys,
//! 17 significant digits). Failures print `{error, detail}` and exit with 2
//! for invalid input, 3 for an exhausted search and 1 for internal errors.

mod commands;
mod doc;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::doc::FormArg;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "sympwig", version, about = "Phase-space tools for arbitrary constant symplectic forms")]
struct Cli {
    /// Absolute tolerance for membership verdicts.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Symplectic spectrum of a covariance and the Wigner verdict.
    Spectrum {
        #[arg(long)]
        cov: PathBuf,
        /// Form document, or `J`.
        #[arg(long, default_value = "J")]
        form: FormArg,
    },
    /// Williamson diagonalization `A = S diag(d, d) Sᵀ` for a form.
    Williamson {
        #[arg(long)]
        cov: PathBuf,
        #[arg(long, default_value = "J")]
        form: FormArg,
    },
    /// Normalizes a form and returns a Darboux matrix `S J Sᵀ = Ω`.
    Darboux {
        #[arg(long)]
        form: FormArg,
        /// Mode count when `--form J`.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Whether a linear map is symplectic or antisymplectic for a form.
    Verify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value = "J")]
        form: FormArg,
    },
    /// Narcowich-Wigner interval, purity and Wigner verdict of a Gaussian.
    Nw {
        #[arg(long)]
        cov: PathBuf,
        #[arg(long, default_value = "J")]
        form: FormArg,
    },
    /// Region label of a Gaussian, or re-check of a generated certificate.
    Classify {
        /// Covariance, Gaussian state or non-Gaussian state document.
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        form1: FormArg,
        #[arg(long)]
        form2: FormArg,
    },
    /// Partial-transpose separability test of a Gaussian on `J`.
    Ppt {
        #[arg(long)]
        cov: PathBuf,
        /// Number of modes in the first subsystem.
        #[arg(long, default_value_t = 1)]
        split: usize,
    },
    /// Applies `z ↦ |det M| G(Mz)` and reports representability.
    Transform {
        #[arg(long)]
        cov: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value = "J")]
        form: FormArg,
    },
    /// A state in the requested region for a pair of forms.
    Generate {
        #[arg(long)]
        region: sympwig::RegionLabel,
        #[arg(long)]
        form1: FormArg,
        #[arg(long)]
        form2: FormArg,
        /// Also write the document to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite KLM positivity test of a function at `(alpha, Σ)`.
    Klm {
        #[arg(long)]
        function: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Skew matrix Σ as a form document, or `J`.
        #[arg(long, default_value = "J")]
        sigma: FormArg,
        #[arg(long, default_value_t = 64)]
        points: usize,
        /// Double the point count from 16 up to `--points` until refuted.
        #[arg(long)]
        escalate: bool,
    },
    /// Convolution `f ⋆ g` of two functions.
    Convolve {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Overlap `∫ f g` of two functions.
    Overlap {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
    },
    /// Samples a function on a regular grid into a CSV file.
    Grid {
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 101)]
        per_axis: usize,
        #[arg(long, default_value_t = 5.0)]
        box_sigmas: f64,
    },
    /// Covariance with `λ₁(form1) / λ₁(form2) ≥ k`.
    Ratio {
        #[arg(long)]
        form1: FormArg,
        #[arg(long)]
        form2: FormArg,
        #[arg(long)]
        k: f64,
    },
    /// Covariance with different spectra for two forms.
    Separate {
        #[arg(long)]
        form1: FormArg,
        #[arg(long)]
        form2: FormArg,
    },
    /// Form for which a covariance has the prescribed spectrum.
    Prescribe {
        #[arg(long)]
        cov: PathBuf,
        /// Ascending positive values, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas: Vec<f64>,
    },
    /// Wigner function of a Fock product state.
    Fock {
        /// Occupation number per mode, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reference documents for scripting and tests.
    Fixture {
        #[arg(value_enum)]
        kind: FixtureKind,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Squeezing parameter for `squeezed`.
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        /// Diagonal entries `(a, a, b, b)` for `diagonal-cov`.
        #[arg(long, default_value_t = 2.0)]
        a: f64,
        #[arg(long, default_value_t = 3.0)]
        b: f64,
        /// Entries `(θ, 1/θ)` for `two-scale-form`.
        #[arg(long, default_value_t = 2.0)]
        theta: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum FixtureKind {
    /// `J` on `n` modes.
    StandardForm,
    /// Two-mode form with `Ω₁₃ = θ`, `Ω₂₄ = 1/θ`.
    TwoScaleForm,
    /// Two-mode covariance `diag(a, a, b, b)`.
    DiagonalCov,
    /// Two-mode squeezed vacuum covariance.
    Squeezed,
    /// `½ I` on `n` modes.
    Vacuum,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SYMPWIG_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::validation("InvalidArgument", format!("SYMPWIG_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: Cli) -> Result<serde_json::Value, CliError> {
    configure_threads()?;
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(CliError::validation("InvalidArgument", format!("--tol must be non-negative, got {}", cli.tol)));
    }
    let (tol, seed) = (cli.tol, cli.seed);
    use commands as c;
    match cli.command {
        Command::Spectrum { cov, form } => c::spectrum(&cov, &form, tol),
        Command::Williamson { cov, form } => c::williamson(&cov, &form),
        Command::Darboux { form, n } => c::darboux(&form, n),
        Command::Verify { map, form } => c::verify(&map, &form, tol),
        Command::Nw { cov, form } => c::nw(&cov, &form, tol),
        Command::Classify { state, form1, form2 } => c::classify(&state, &form1, &form2, tol, seed),
        Command::Ppt { cov, split } => c::ppt(&cov, split, tol),
        Command::Transform { cov, map, form } => c::transform(&cov, &map, &form, tol),
        Command::Generate { region, form1, form2, out } => c::generate(region, &form1, &form2, seed, out.as_deref()),
        Command::Klm { function, alpha, sigma, points, escalate } => {
            c::klm(&function, alpha, &sigma, points, escalate, seed, tol)
        }
        Command::Convolve { f, g, out } => c::convolve(&f, &g, out.as_deref()),
        Command::Overlap { f, g } => c::overlap(&f, &g),
        Command::Grid { function, out, per_axis, box_sigmas } => c::grid(&function, &out, per_axis, box_sigmas),
        Command::Ratio { form1, form2, k } => c::ratio(&form1, &form2, k, seed),
        Command::Separate { form1, form2 } => c::separate(&form1, &form2, seed),
        Command::Prescribe { cov, lambdas } => c::prescribe(&cov, &lambdas),
        Command::Fock { m, hbar, out } => c::fock(&m, hbar, out.as_deref()),
        Command::Fixture { kind, n, r, a, b, theta } => c::fixture(kind, n, r, a, b, theta),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let err = CliError::validation("Usage", e.to_string().trim().to_string());
            print!("{}", doc::render(&err.to_json()));
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    let outcome = std::panic::catch_unwind(move || run(cli));
    let result = outcome.unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| p.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "panic".into());
        Err(CliError::Internal(msg))
    });
    match result {
        Ok(v) => {
            print!("{}", doc::render(&v));
            ExitCode::SUCCESS
        }
        Err(err) => {
            print!("{}", doc::render(&err.to_json()));
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
