//! `ctp`: runs slit experiments, the axiom suite and density-matrix dumps.
//!
//! Exit codes: 0 success, 2 invalid configuration, 3 capacity guard,
//! 4 invariant violation.

mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ctp_core::error::CtpError;
use ctp_core::lattice::HopRange;
use ctp_core::measure::{self, MeasureContext};
use ctp_core::{density, experiments, sampling};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use config::{Format, RunConfig, SamplingSection};

#[derive(Parser)]
#[command(name = "ctp", version, about = "Complex trajectory-pair probabilities on a lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Screen pattern, classical baseline and optional sampled frequencies.
    Run(ExperimentArgs),
    /// Randomized axiom suite on a random sample space.
    VerifyAxioms(AxiomArgs),
    /// Density matrix at one time slice plus its invariant report.
    Density {
        #[command(flatten)]
        exp: ExperimentArgs,
        /// Time slice, defaults to the screen.
        #[arg(long)]
        t: Option<usize>,
    },
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON file mirroring the run configuration.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Pinned configuration: exp1, exp2 or nslit3m1.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// `all` or a maximum hop distance.
    #[arg(long)]
    hop_range: Option<HopRange>,
    #[arg(long)]
    source: Option<usize>,
    #[arg(long)]
    barrier_t: Option<usize>,
    /// Open barrier sites, e.g. `28,36`.
    #[arg(long, value_delimiter = ',')]
    slits: Option<Vec<usize>>,
    /// 1-based slit numbers with a detector, e.g. `2` or `1,2`.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    measured: Option<Vec<usize>>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AxiomArgs {
    /// Number of random paths in Ω₊.
    #[arg(long, default_value_t = 200)]
    omega_size: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    sites: usize,
    #[arg(long, default_value_t = 4)]
    steps: usize,
    /// Also write the report as JSON into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<CtpError> for Failure {
    fn from(e: CtpError) -> Self {
        let code = match e {
            CtpError::Capacity { .. } => 3,
            CtpError::Invariant(_) => 4,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invariant(message: String) -> Failure {
    Failure { code: 4, message }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("cannot write {}: {e}", path.display()),
    }
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<RunConfig, CtpError> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => RunConfig::from_file(path)?,
            (None, Some(name)) => RunConfig::preset(name)?,
            (None, None) => RunConfig::preset("exp1")?,
        };
        let l = &mut cfg.lattice;
        l.sites = self.sites.unwrap_or(l.sites);
        l.steps = self.steps.unwrap_or(l.steps);
        l.alpha = self.alpha.unwrap_or(l.alpha);
        l.hop_range = self.hop_range.unwrap_or(l.hop_range);
        let e = &mut cfg.experiment;
        e.source = self.source.unwrap_or(e.source);
        e.barrier_t = self.barrier_t.unwrap_or(e.barrier_t);
        if let Some(slits) = &self.slits {
            e.slits = slits.clone();
        }
        if let Some(measured) = &self.measured {
            e.measured = measured.clone();
        }
        if self.samples.is_some() || self.seed.is_some() {
            let base = cfg.sampling.take();
            let n = self.samples.or(base.as_ref().map(|s| s.n));
            let seed = self.seed.or(base.as_ref().map(|s| s.seed)).unwrap_or(0);
            cfg.sampling = n.map(|n| SamplingSection { n, seed });
        }
        if let Some(format) = self.format {
            cfg.output.format = format;
        }
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn out_dir(path: Option<&PathBuf>) -> Result<PathBuf, Failure> {
    let dir = path.cloned().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
    Ok(dir)
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| io_failure(&path, e))?;
    Ok(path)
}

fn run(args: &ExperimentArgs) -> Result<(), Failure> {
    let cfg = args.resolve()?;
    let exp = cfg.experiment()?;
    let format = cfg.output.format;
    let pattern = experiments::pattern(&exp)?;
    let baseline = experiments::classical_baseline(&exp)?;
    let dir = out_dir(cfg.output.path.as_ref())?;
    let ext = format.extension();
    let p = write(&dir, &format!("pattern.{ext}"), &output::pattern(&pattern, format))?;
    let b = write(&dir, &format!("baseline.{ext}"), &output::pattern(&baseline, format))?;
    println!("pattern: {}", p.display());
    println!("baseline: {}", b.display());
    if let Some(s) = &cfg.sampling {
        let dist = sampling::normalize(&pattern)?;
        let report = sampling::sample(&dist, s.n, s.seed)?;
        let outcome = sampling::lln_check(&report, &dist);
        let f = write(&dir, "frequencies.json", &output::to_json(&report))?;
        println!("frequencies: {} (bound check {})", f.display(), pass_word(report.pass));
        if !outcome.null_respected {
            return Err(invariant("a bin with zero probability was sampled".into()));
        }
    }
    Ok(())
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

#[derive(Serialize)]
struct AxiomSummary<'a> {
    sites: usize,
    steps: usize,
    passed: bool,
    report: &'a measure::AxiomReport,
}

fn verify_axioms(args: &AxiomArgs) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let ctx = MeasureContext::random(args.sites, args.steps, args.omega_size, &mut rng)?;
    let report = measure::verify_axioms(&ctx, args.trials, args.seed)?;
    let passed = report.passed();
    for (name, stat) in report.checks() {
        println!(
            "{name}: {} checks, {} failures, max residual {:.3e}",
            stat.checked, stat.failures, stat.max_residual
        );
    }
    match report.complex_witness {
        Some(w) => println!("complex witness: {w}"),
        None => println!("complex witness: none"),
    }
    if let Some(dir) = &args.out {
        let dir = out_dir(Some(dir))?;
        let summary = AxiomSummary {
            sites: args.sites,
            steps: args.steps,
            passed,
            report: &report,
        };
        write(&dir, "axioms.json", &output::to_json(&summary))?;
    }
    println!("axioms: {}", pass_word(passed));
    if passed {
        Ok(())
    } else {
        Err(invariant("axiom suite reported failures".into()))
    }
}

fn emit_density(args: &ExperimentArgs, t: Option<usize>) -> Result<(), Failure> {
    let cfg = args.resolve()?;
    let exp = cfg.experiment()?;
    let t = t.unwrap_or(exp.screen_t());
    let rho = density::density_at(&exp, t)?;
    let report = rho.report();
    let dir = out_dir(cfg.output.path.as_ref())?;
    let format = cfg.output.format;
    let m = write(&dir, &format!("density_t{t}.{}", format.extension()), &output::density(&rho, format))?;
    let r = write(&dir, &format!("density_t{t}_report.json"), &output::density_report(&report))?;
    println!("density: {}", m.display());
    println!("report: {}", r.display());
    println!(
        "hermiticity residual {:.3e}, min eigenvalue {:.6e}, rank estimate {}",
        report.hermiticity_residual, report.min_eigenvalue, report.rank_estimate
    );
    if report.hermiticity_residual > ctp_core::tolerance::ALGEBRAIC {
        return Err(invariant(format!(
            "hermiticity residual {:.3e} above tolerance",
            report.hermiticity_residual
        )));
    }
    if !report.is_psd() {
        return Err(invariant(format!(
            "minimum eigenvalue {:.3e} below -tolerance x trace",
            report.min_eigenvalue
        )));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run(args) => run(args),
        Command::VerifyAxioms(args) => verify_axioms(args),
        Command::Density { exp, t } => emit_density(exp, *t),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            if f.code == 3 {
                eprintln!("hint: shrink the lattice or sample space, or use the transfer-matrix evaluator");
            }
            ExitCode::from(f.code)
        }
    }
}
