//! Command-line front end.
//!
//! Exit codes: 0 success, 1 numeric failure, 2 usage or input error,
//! 3 a verification verdict did not hold.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{
    constant_rejection_bound, kkr_check, scaling_study, starting_penalty_reports,
    uncoupling_reports, verify_eqma, verify_qma_window, BoundReport, Instance, DEFAULT_BAND_FACTOR,
};
use crate::circuitham::{assemble_capped, specfile, StandardFormHamiltonian, DEFAULT_MAX_DIM};
use crate::error::Error;
use crate::linalg::DenseSymmetric;
use crate::par::{self, Exec};
use crate::report::{write_json, write_reports, Format};
use crate::stoquastic::circuit_block_form;
use crate::walks::{endpoint_spectrum, walk_spectrum, PenalizedWalk};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATED: i32 = 3;

/// Environment variable overriding the assembly dimension cap.
pub const MAX_DIM_VAR: &str = "CLOCKHAM_MAX_DIM";

#[derive(Debug, Parser)]
#[command(
    name = "clockham",
    version,
    about = "Penalized walk spectra and clock Hamiltonian bounds"
)]
pub struct Cli {
    /// Worker threads for grid sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of a penalized walk.
    Spectrum(SpectrumArgs),
    /// Run a verification suite and write its bound reports.
    Verify(VerifyArgs),
    /// Assemble a Hamiltonian from a spec file and summarize its blocks.
    Assemble(AssembleArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("shape").required(true).args(["endpoint", "walk"]))]
pub struct SpectrumArgs {
    /// Walk of length T with penalty μ on its last site.
    #[arg(long, value_name = "T", requires = "mu")]
    pub endpoint: Option<usize>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Walk of length T with penalties given by --penalty.
    #[arg(long, value_name = "T")]
    pub walk: Option<usize>,
    /// `k:w` adds weight w at 1-based site k; repeatable.
    #[arg(long, value_parser = parse_penalty, requires = "walk")]
    pub penalty: Vec<(usize, f64)>,
    #[command(flatten)]
    pub out: Output,
}

fn parse_penalty(s: &str) -> Result<(usize, f64), String> {
    let (k, w) = s
        .split_once(':')
        .ok_or_else(|| format!("expected k:w, got {s:?}"))?;
    let k = k.parse().map_err(|e| format!("bad site {k:?}: {e}"))?;
    let w = w.parse().map_err(|e| format!("bad weight {w:?}: {e}"))?;
    Ok((k, w))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Uncoupling,
    StartingPenalty,
    Kkr,
    Eqma,
    QmaWindow,
    ConstantRejection,
    Scaling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InstanceArg {
    Yes,
    No,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Largest T for uncoupling, starting-penalty and scaling.
    #[arg(long)]
    pub tmax: Option<usize>,
    /// Smallest T for scaling (grid is powers of two).
    #[arg(long, default_value_t = 64)]
    pub tmin: usize,
    /// Penalty strengths k for scaling (μ = k/T).
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 1.0, 2.0])]
    pub k: Vec<f64>,
    /// Allowed max/min spread of λ₀T²/k.
    #[arg(long, default_value_t = DEFAULT_BAND_FACTOR)]
    pub factor: f64,
    /// Circuit/clock file for eqma and qma-window.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Promised error; measured from the circuit when omitted.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long, value_enum)]
    pub instance: Option<InstanceArg>,
    /// Clock lengths for constant-rejection.
    #[arg(long = "t", value_delimiter = ',', default_values_t = [36usize, 100])]
    pub t: Vec<usize>,
    /// Defaults to ceil(sqrt(T)).
    #[arg(long)]
    pub t_init: Option<usize>,
    /// Rejection probabilities for constant-rejection.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0 / 3.0])]
    pub mu: Vec<f64>,
    /// Random pairs for kkr.
    #[arg(long, default_value_t = 500)]
    pub samples: usize,
    #[arg(long, default_value_t = 32)]
    pub max_dim: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct AssembleArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Eigenvalues at most this size count towards the kernel.
    #[arg(long, default_value_t = 1e-10)]
    pub kernel_tol: f64,
    #[command(flatten)]
    pub out: Output,
}

/// Parse `args` and run. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        par::set_threads(n);
    }
    let result = match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Assemble(a) => cmd_assemble(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit code for an error that reached the top level.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Schema { .. }
        | Error::InvalidSize(_)
        | Error::DomainError(_)
        | Error::Precondition(_)
        | Error::InvalidGate(_)
        | Error::InvalidClock(_)
        | Error::ClockContractViolation(_)
        | Error::NotAProjector(_)
        | Error::NotInitialized(_)
        | Error::NoDecomposition(_)
        | Error::TooLarge { .. } => EXIT_USAGE,
        Error::InstanceContractViolation(_) => EXIT_VIOLATED,
        _ => EXIT_NUMERIC,
    }
}

fn sink(path: Option<&Path>) -> crate::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
            Error::Precondition(format!("cannot create {}: {e}", p.display()))
        })?)),
        None => Box::new(io::stdout().lock()),
    })
}

#[derive(Serialize)]
struct SpectrumOut<'a> {
    kind: &'a str,
    len: usize,
    penalties: Vec<(usize, f64)>,
    eigenvalues: Vec<f64>,
}

fn cmd_spectrum(a: &SpectrumArgs) -> crate::Result<i32> {
    let (kind, walk, values) = if let Some(t) = a.endpoint {
        let mu = a.mu.expect("required by clap");
        let w = PenalizedWalk::endpoint(t, mu)?;
        ("endpoint", w.clone(), endpoint_spectrum(t, mu)?)
    } else {
        let t = a.walk.expect("required by clap");
        let w = PenalizedWalk::new(t, a.penalty.clone())?;
        ("walk", w.clone(), walk_spectrum(&w)?)
    };
    let mut out = sink(a.out.output.as_deref())?;
    match a.out.format {
        Format::Json => write_json(
            &mut out,
            &SpectrumOut {
                kind,
                len: walk.len(),
                penalties: walk.penalties().to_vec(),
                eigenvalues: values,
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            let io = |e: csv::Error| Error::DomainError(format!("write failed: {e}"));
            w.write_record(["index", "eigenvalue"]).map_err(io)?;
            for (i, v) in values.iter().enumerate() {
                w.serialize((i, v)).map_err(io)?;
            }
            w.flush()
                .map_err(|e| Error::DomainError(format!("write failed: {e}")))?;
        }
    }
    Ok(EXIT_OK)
}

fn max_dim() -> crate::Result<usize> {
    match std::env::var(MAX_DIM_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Schema {
            path: MAX_DIM_VAR.into(),
            message: format!("expected a positive integer, got {v:?}"),
        }),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}

fn load_hamiltonian(path: Option<&Path>) -> crate::Result<StandardFormHamiltonian> {
    let path = path.ok_or_else(|| Error::Precondition("--spec is required".into()))?;
    let spec = specfile::load(path)?;
    assemble_capped(&spec.circuit, &spec.clock, max_dim()?)
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DenseSymmetric {
    let mut m = DenseSymmetric::zeros(n);
    for i in 0..n {
        for j in i..n {
            m.add_sym(i, j, scale * rng.gen_range(-1.0..1.0));
        }
    }
    m
}

fn kkr_reports(samples: usize, max_dim: usize, seed: u64) -> crate::Result<Vec<BoundReport>> {
    if max_dim == 0 {
        return Err(Error::InvalidSize("--max-dim must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(DenseSymmetric, DenseSymmetric)> = (0..samples)
        .map(|_| {
            let n = rng.gen_range(1..=max_dim);
            let h1 = random_symmetric(&mut rng, n, 1.0);
            let eps = 10f64.powf(rng.gen_range(-6.0..0.0));
            let h2 = h1
                .add(&random_symmetric(&mut rng, n, eps))
                .expect("same dimension");
            (h1, h2)
        })
        .collect();
    par::map(Exec::default(), &pairs, |(a, b)| kkr_check(a, b))
        .into_iter()
        .collect()
}

fn powers_of_two(lo: usize, hi: usize) -> Vec<usize> {
    let mut t = lo.max(2).next_power_of_two();
    let mut out = Vec::new();
    while t <= hi {
        out.push(t);
        t *= 2;
    }
    out
}

fn cmd_verify(a: &VerifyArgs) -> crate::Result<i32> {
    let exec = Exec::default();
    let reports = match a.suite {
        Suite::Uncoupling => uncoupling_reports(a.tmax.unwrap_or(32), exec)?,
        Suite::StartingPenalty => starting_penalty_reports(a.tmax.unwrap_or(64), exec)?,
        Suite::Kkr => kkr_reports(a.samples, a.max_dim, a.seed)?,
        Suite::Eqma => vec![verify_eqma(&load_hamiltonian(a.spec.as_deref())?)?],
        Suite::QmaWindow => {
            let h = load_hamiltonian(a.spec.as_deref())?;
            let cb = circuit_block_form(h.circuit(), h.clock())?;
            let instance = match a.instance {
                Some(InstanceArg::Yes) => Instance::Yes,
                Some(InstanceArg::No) => Instance::No,
                None if cb.min_rejection() < 0.5 => Instance::Yes,
                None => Instance::No,
            };
            let eta = a.eta.unwrap_or(match instance {
                Instance::Yes => cb.eta_yes(),
                Instance::No => cb.eta_no(),
            });
            vec![verify_qma_window(&h, eta, instance)?]
        }
        Suite::ConstantRejection => {
            let mut out = Vec::new();
            for &t in &a.t {
                let t_init = a
                    .t_init
                    .unwrap_or_else(|| (t as f64).sqrt().ceil() as usize);
                for &mu in &a.mu {
                    out.push(constant_rejection_bound(t, t_init, mu)?.report());
                }
            }
            out
        }
        Suite::Scaling => {
            let grid = powers_of_two(a.tmin, a.tmax.unwrap_or(4096));
            if grid.is_empty() || a.k.is_empty() {
                return Err(Error::InvalidSize("empty scaling grid".into()));
            }
            if a.factor <= 1.0 {
                return Err(Error::DomainError("--factor must exceed 1".into()));
            }
            scaling_study(&a.k, &grid, a.factor, exec)?.reports()
        }
    };
    let mut out = sink(a.out.output.as_deref())?;
    write_reports(&mut out, &reports, a.out.format)?;
    let violated = reports.iter().filter(|r| !r.holds()).count();
    if violated > 0 {
        eprintln!("{violated} of {} checks violated", reports.len());
        return Ok(EXIT_VIOLATED);
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct AssembleOut {
    dim: usize,
    register_dim: usize,
    realified: bool,
    subspaces: Vec<crate::circuitham::SubspaceSummary>,
}

fn cmd_assemble(a: &AssembleArgs) -> crate::Result<i32> {
    if a.kernel_tol.is_nan() || a.kernel_tol <= 0.0 {
        return Err(Error::DomainError("--kernel-tol must be positive".into()));
    }
    let h = load_hamiltonian(Some(&a.spec))?;
    let subspaces = h.summarize(a.kernel_tol)?;
    let mut out = sink(a.out.output.as_deref())?;
    match a.out.format {
        Format::Json => write_json(
            &mut out,
            &AssembleOut {
                dim: h.dim(),
                register_dim: h.register_dim(),
                realified: h.is_realified(),
                subspaces,
            },
        )?,
        Format::Csv => {
            let io = |e: csv::Error| Error::DomainError(format!("write failed: {e}"));
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["kind", "labels", "dim", "lambda0", "kernel_dim"])
                .map_err(io)?;
            for s in &subspaces {
                let kind = serde_json::to_value(s.kind)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default();
                w.serialize((kind, s.labels.join(" "), s.dim, s.lambda0, s.kernel_dim))
                    .map_err(io)?;
            }
            w.flush()
                .map_err(|e| Error::DomainError(format!("write failed: {e}")))?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn penalty_flag() {
        assert_eq!(parse_penalty("3:1"), Ok((3, 1.0)));
        assert!(parse_penalty("3").is_err());
        assert!(parse_penalty("x:1").is_err());
    }

    #[test]
    fn grid() {
        assert_eq!(powers_of_two(64, 512), vec![64, 128, 256, 512]);
        assert_eq!(powers_of_two(100, 300), vec![128, 256]);
    }

    #[test]
    fn codes() {
        assert_eq!(
            exit_code(&Error::Schema {
                path: "x".into(),
                message: "y".into()
            }),
            EXIT_USAGE
        );
        assert_eq!(
            exit_code(&Error::DecompositionFailed("x".into())),
            EXIT_NUMERIC
        );
    }
}
