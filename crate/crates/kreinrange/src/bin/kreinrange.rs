//! Command-line front end: classify, predict, sample, verify, generate,
//! and the randomized conformance suite.
//!
//! Exit codes: 0 on pass, 2 on invalid input, 3 on a conformance violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kreinrange::generate::generate_case;
use kreinrange::problem::ProblemFile;
use kreinrange::report::{
    plot_samples, run_classify, run_predict, run_sample, run_suite, run_verify, Report,
    RunOptions, SuiteOptions,
};
use kreinrange::space::SubspaceClass;
use kreinrange::tol::Tolerances;
use kreinrange::KreinError;

const EXIT_INVALID: u8 = 2;

#[derive(Parser)]
#[command(
    name = "kreinrange",
    version,
    about = "Numerical and co-numerical ranges of non-negative operators in indefinite inner-product spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonFlags {
    /// Number of oracle samples per range.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    /// RNG seed; falls back to the KREINRANGE_SEED environment variable.
    #[arg(long)]
    seed: Option<u64>,
    /// Rank tolerance multiplier (default 64, scaled by eps * dim * norm).
    #[arg(long)]
    tol_rank: Option<f64>,
    /// Relative positive-semidefiniteness slack (default 1e-10).
    #[arg(long)]
    tol_psd: Option<f64>,
    /// Enforce the theorem hypotheses: reject the zero operator and
    /// definite Gram matrices.
    #[arg(long)]
    strict: bool,
    /// Write sampled values and predicted endpoints as CSV columns.
    #[arg(long, value_name = "PATH")]
    emit_plot_data: Option<PathBuf>,
}

fn env_seed() -> Option<u64> {
    std::env::var("KREINRANGE_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
}

impl CommonFlags {
    fn seed(&self) -> u64 {
        self.seed.or_else(env_seed).unwrap_or(0)
    }

    fn tolerances(&self) -> Tolerances {
        let mut tol = Tolerances::default();
        if let Some(rank) = self.tol_rank {
            tol.rank_factor = rank;
        }
        if let Some(psd) = self.tol_psd {
            tol.psd_rel = psd;
        }
        tol
    }

    fn options(&self) -> RunOptions {
        RunOptions {
            samples: self.samples,
            seed: self.seed(),
            strict: self.strict,
            tol: self.tolerances(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Validate an instance and report its spectral classification.
    Classify {
        file: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Add the closed-form range predictions to the classification.
    Predict {
        file: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Sample both ranges and check every value against the predictions.
    Sample {
        file: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Full pipeline: sampling, endpoint recovery, quotient checks, and the
    /// spectral-inclusion verdict.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        flags: CommonFlags,
    },
    /// Write a problem file with prescribed kernel and range classes.
    Generate {
        #[arg(long)]
        dim: usize,
        /// Kernel class: Zero, Positive, Negative, Neutral,
        /// NonNegDegenerate, NonPosDegenerate, Indefinite.
        #[arg(long)]
        kernel: String,
        /// Range class; same names as --kernel.
        #[arg(long)]
        range: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomized conformance suite over generated instances.
    Suite {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Dimension list, e.g. "2..8" or "2,4,6".
        #[arg(long, default_value = "2..8")]
        dims: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Oracle samples per generated instance.
        #[arg(long, default_value_t = 1_000)]
        samples: usize,
    },
}

fn parse_dims(text: &str) -> Result<Vec<usize>, KreinError> {
    let bad = || KreinError::InvalidInput(format!("cannot parse dimension list {text:?}"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().parse().map_err(|_| bad())?;
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    let dims: Result<Vec<usize>, _> = text.split(',').map(|s| s.trim().parse()).collect();
    let dims = dims.map_err(|_| bad())?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(bad());
    }
    Ok(dims)
}

fn parse_class(text: &str) -> Result<SubspaceClass, KreinError> {
    SubspaceClass::parse(text).ok_or_else(|| {
        KreinError::InvalidInput(format!(
            "unknown subspace class {text:?}; expected one of Zero, Positive, Negative, \
             Neutral, NonNegDegenerate, NonPosDegenerate, Indefinite"
        ))
    })
}

fn emit_report(report: &Report, flags: &CommonFlags, file: &PathBuf) -> Result<u8, KreinError> {
    println!("{}", report.to_json());
    if let Some(path) = &flags.emit_plot_data {
        let problem = ProblemFile::read(file)?;
        let op = problem.to_operator(flags.tolerances())?;
        let csv = plot_samples(&op, &flags.options())?;
        std::fs::write(path, csv)
            .map_err(|e| KreinError::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(report.exit_code() as u8)
}

fn run() -> Result<u8, KreinError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Classify { file, flags } => {
            let problem = ProblemFile::read(&file)?;
            let op = problem.to_operator(flags.tolerances())?;
            let report = run_classify(&op, problem.label.clone(), &flags.options())?;
            emit_report(&report, &flags, &file)
        }
        Command::Predict { file, flags } => {
            let problem = ProblemFile::read(&file)?;
            let op = problem.to_operator(flags.tolerances())?;
            let report = run_predict(&op, problem.label.clone(), &flags.options())?;
            emit_report(&report, &flags, &file)
        }
        Command::Sample { file, flags } => {
            let problem = ProblemFile::read(&file)?;
            let op = problem.to_operator(flags.tolerances())?;
            let report = run_sample(&op, problem.label.clone(), &flags.options())?;
            emit_report(&report, &flags, &file)
        }
        Command::Verify { file, flags } => {
            let problem = ProblemFile::read(&file)?;
            let op = problem.to_operator(flags.tolerances())?;
            let report = run_verify(&op, problem.label.clone(), &flags.options())?;
            emit_report(&report, &flags, &file)
        }
        Command::Generate {
            dim,
            kernel,
            range,
            seed,
            out,
        } => {
            let kernel = parse_class(&kernel)?;
            let range = parse_class(&range)?;
            let seed = seed.or_else(env_seed).unwrap_or(0);
            let op = generate_case(dim, kernel, range, seed)?;
            let label = format!("generated dim={dim} kernel={kernel} range={range} seed={seed}");
            let problem = ProblemFile::from_operator(&op, Some(label));
            problem.write(&out)?;
            println!("{}", out.display());
            Ok(0)
        }
        Command::Suite {
            trials,
            dims,
            seed,
            samples,
        } => {
            let dims = parse_dims(&dims)?;
            let seed = seed.or_else(env_seed).unwrap_or(0);
            let opts = SuiteOptions {
                trials,
                dims,
                seed,
                samples,
                strict: false,
            };
            let summary = run_suite(&opts)?;
            println!("{}", summary.to_json());
            Ok(summary.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
