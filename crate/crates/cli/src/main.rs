//! `accdm`: accessible density matrices from the command line.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use accessible_dm::io::{read_counts, read_matrix, read_settings, write_counts, write_matrix, write_trace};
use accessible_dm::measurement::{measurement_span_rank, simulate_counts, standard_settings};
use accessible_dm::schur::{
    accessible_param_count, partitions, spin_sectors, su2_multiplicity, symmetric_dimension, weyl_dimension,
};
use accessible_dm::states::{expand_and_symmetrize, parse_definitions, parse_source, trace_hidden};
use accessible_dm::tomography::{
    fidelity, indistinguishability_report, mle_reconstruct, IndistinguishabilityReport, DEFAULT_VERDICT_TOL,
};
use accessible_dm::{AccessibleDensityMatrix64, Error, MleOptions};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "accdm",
    version,
    about = "Accessible density matrices of photons with hidden modes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the block structure and parameter counts for N particles.
    Dims {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// Trace out hidden modes of a state given as a creation-operator product.
    Analyze {
        /// Expression file.
        input: PathBuf,
        /// Extra mode and constant definitions.
        #[arg(long)]
        modes: Option<PathBuf>,
        /// Output directory for accessible.json and report.json.
        #[arg(long)]
        out: PathBuf,
        /// Verdict tolerance on the symmetric population.
        #[arg(long, default_value_t = DEFAULT_VERDICT_TOL)]
        tol: f64,
    },
    /// Draw Poisson counts for every setting and outcome.
    Simulate {
        /// Accessible density matrix (JSON).
        input: PathBuf,
        /// Settings CSV; defaults to the twelve standard settings.
        #[arg(long)]
        settings: Option<PathBuf>,
        /// Mean photon-number-resolved detections per setting.
        #[arg(long, default_value_t = 1e4)]
        shots: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Counts CSV to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximum-likelihood reconstruction from a counts CSV.
    Reconstruct(ReconstructArgs),
}

#[derive(Args, Debug)]
struct ReconstructArgs {
    /// Counts CSV.
    input: PathBuf,
    /// Matrix to report fidelity against.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Verdict tolerance on the symmetric population.
    #[arg(long, default_value_t = DEFAULT_VERDICT_TOL)]
    tol: f64,
    /// Stop when the log-likelihood gain per count drops below this.
    #[arg(long, default_value_t = 1e-10)]
    mle_tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Also write the log-likelihood trace as loglik.tsv.
    #[arg(long)]
    trace: bool,
    /// Output directory for estimate.json and report.json.
    #[arg(long)]
    out: PathBuf,
}

/// Failure with its process exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(msg: impl Display) -> Self {
        Self {
            code: 2,
            message: msg.to_string(),
        }
    }
}

#[derive(Clone, Copy)]
enum Stage {
    Input,
    Compute,
}

fn fail(stage: Stage, context: impl Display) -> impl FnOnce(Error) -> Failure {
    move |e| {
        let code = match (&e, stage) {
            (Error::ZeroParticles | Error::ZeroLevels | Error::TooManyParticles { .. } | Error::Invalid(_), _) => 2,
            (_, Stage::Input) => 3,
            (_, Stage::Compute) => 4,
        };
        Failure {
            code,
            message: format!("{context}: {e}"),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| fail(Stage::Input, path.display())(e.into()))
}

fn open(path: &Path) -> Outcome<fs::File> {
    fs::File::open(path).map_err(|e| fail(Stage::Input, path.display())(e.into()))
}

fn load_matrix(path: &Path) -> Outcome<AccessibleDensityMatrix64> {
    read_matrix(open(path)?).map_err(fail(Stage::Input, path.display()))
}

/// Output files are staged next to their destination and renamed into place
/// only after every file of a command has been produced.
struct Staged {
    files: Vec<(tempfile::NamedTempFile, PathBuf)>,
}

impl Staged {
    fn new() -> Self {
        Self { files: Vec::new() }
    }

    fn add(&mut self, path: PathBuf, write: impl FnOnce(&mut dyn Write) -> accessible_dm::Result<()>) -> Outcome<()> {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let io = |e: std::io::Error| fail(Stage::Input, path.display())(e.into());
        fs::create_dir_all(&dir).map_err(io)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
        write(tmp.as_file_mut()).map_err(fail(Stage::Input, path.display()))?;
        tmp.as_file_mut().flush().map_err(io)?;
        self.files.push((tmp, path));
        Ok(())
    }

    fn add_json<T: Serialize>(&mut self, path: PathBuf, value: &T) -> Outcome<()> {
        self.add(path, |w| {
            serde_json::to_writer_pretty(&mut *w, value).map_err(|e| Error::Format(e.to_string()))?;
            writeln!(w)?;
            Ok(())
        })
    }

    fn commit(self) -> Outcome<()> {
        for (tmp, path) in self.files {
            tmp.persist(&path)
                .map_err(|e| fail(Stage::Input, path.display())(e.error.into()))?;
        }
        Ok(())
    }
}

fn spin_label(two_j: usize) -> String {
    if two_j.is_multiple_of(2) {
        format!("{}", two_j / 2)
    } else {
        format!("{two_j}/2")
    }
}

fn dims(n: usize, d: usize) -> Outcome<()> {
    let err = fail(Stage::Compute, "dims");
    if n == 0 {
        return Err(err(Error::ZeroParticles));
    }
    if d == 0 {
        return Err(err(Error::ZeroLevels));
    }
    if d == 2 {
        println!("{:>6} {:>12} {:>10}", "j", "multiplicity", "dimension");
        for two_j in spin_sectors(n) {
            let mult = su2_multiplicity(n, two_j).map_err(fail(Stage::Compute, "dims"))?;
            println!("{:>6} {:>12} {:>10}", spin_label(two_j), mult, two_j + 1);
        }
    } else {
        println!("{:<24} {:>10}", "irrep", "dimension");
        for lambda in partitions(n, d) {
            let dim = weyl_dimension(&lambda, d).map_err(fail(Stage::Compute, "dims"))?;
            println!("{:<24} {:>10}", format!("{:?}", lambda.parts()), dim);
        }
    }
    let sym = symmetric_dimension(n, d).map_err(fail(Stage::Compute, "dims"))?;
    let accessible = accessible_param_count(n, d).map_err(fail(Stage::Compute, "dims"))?;
    let full = (d as u128)
        .checked_pow(2 * n as u32)
        .map(|x| x.to_string())
        .unwrap_or_else(|| format!("{d}^{}", 2 * n));
    println!(
        "symmetric {}",
        sym.checked_mul(sym)
            .map(|x| x.to_string())
            .unwrap_or_else(|| format!("{sym}^2"))
    );
    println!("accessible {accessible}");
    println!("full {full}");
    Ok(())
}

fn print_report(report: &IndistinguishabilityReport) {
    println!("photons: {}", report.n_photons);
    println!("symmetric population: {:.4}", report.symmetric_population);
    println!("purity: {:.4}", report.purity);
    println!("verdict: {}", report.verdict);
}

fn analyze(input: &Path, modes: Option<&Path>, out: &Path, tol: f64) -> Outcome<()> {
    let text = read_text(input)?;
    if text
        .lines()
        .all(|l| l.split('#').next().unwrap_or("").trim().is_empty())
    {
        return Err(Failure::usage(format!("{}: no expression", input.display())));
    }
    let table = match modes {
        Some(p) => Some(parse_definitions(&read_text(p)?).map_err(fail(Stage::Input, p.display()))?),
        None => None,
    };
    let source = parse_source(&text, table.as_ref()).map_err(fail(Stage::Input, input.display()))?;
    let state = expand_and_symmetrize::<f64>(&source.expression).map_err(fail(Stage::Compute, "symmetrize"))?;
    let rho = trace_hidden(&state).map_err(fail(Stage::Compute, "trace hidden modes"))?;
    let report = indistinguishability_report(&rho, tol).map_err(fail(Stage::Compute, "report"))?;

    let mut staged = Staged::new();
    staged.add(out.join("accessible.json"), |w| write_matrix(w, &rho))?;
    staged.add_json(out.join("report.json"), &report)?;
    staged.commit()?;
    print_report(&report);
    Ok(())
}

fn simulate(input: &Path, settings: Option<&Path>, shots: f64, seed: u64, out: &Path) -> Outcome<()> {
    if !(shots.is_finite() && shots >= 0.0) {
        return Err(Failure::usage(format!(
            "--shots must be a finite non-negative number, got {shots}"
        )));
    }
    let rho = load_matrix(input)?;
    let settings = match settings {
        Some(p) => read_settings(open(p)?).map_err(fail(Stage::Input, p.display()))?,
        None => standard_settings(),
    };
    let n = rho.n();
    let rank = measurement_span_rank(&settings, n).map_err(fail(Stage::Compute, "span rank"))?;
    let needed = accessible_param_count(n, 2).map_err(fail(Stage::Compute, "span rank"))?;
    if (rank as u128) < needed {
        eprintln!("warning: settings span rank {rank} < {needed}; these counts cannot determine the state");
    }
    let records = simulate_counts(&rho, &settings, shots, seed).map_err(fail(Stage::Compute, "simulate"))?;
    let mut staged = Staged::new();
    staged.add(out.to_path_buf(), |w| write_counts(w, &records))?;
    staged.commit()?;
    let total: f64 = records.iter().map(|r| r.count).sum();
    println!("{} rows, {} detections", records.len(), total);
    Ok(())
}

#[derive(Serialize)]
struct ReconstructReport {
    #[serde(flatten)]
    indistinguishability: IndistinguishabilityReport,
    log_likelihood: f64,
    iterations: usize,
    converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    fidelity_to_reference: Option<f64>,
}

fn reconstruct(args: &ReconstructArgs) -> Outcome<()> {
    if !(args.mle_tol > 0.0 && args.mle_tol.is_finite()) {
        return Err(Failure::usage(format!(
            "--mle-tol must be positive, got {}",
            args.mle_tol
        )));
    }
    if !(args.tol > 0.0 && args.tol.is_finite()) {
        return Err(Failure::usage(format!("--tol must be positive, got {}", args.tol)));
    }
    let data = read_counts(open(&args.input)?).map_err(fail(Stage::Input, args.input.display()))?;
    let reference = args.reference.as_deref().map(load_matrix).transpose()?;
    let opts = MleOptions {
        max_iters: args.max_iters,
        tol: args.mle_tol,
        ..MleOptions::default()
    };
    let result = mle_reconstruct::<f64>(&data, &opts).map_err(fail(Stage::Compute, "reconstruct"))?;
    if !result.converged {
        return Err(Failure {
            code: 4,
            message: format!("reconstruct: no convergence within {} iterations", args.max_iters),
        });
    }
    let fid = match &reference {
        Some(r) => Some(fidelity(&result.estimate, r).map_err(fail(Stage::Input, "reference"))?),
        None => None,
    };
    let ind = indistinguishability_report(&result.estimate, args.tol).map_err(fail(Stage::Compute, "report"))?;
    let report = ReconstructReport {
        indistinguishability: ind,
        log_likelihood: result.log_likelihood,
        iterations: result.iterations,
        converged: result.converged,
        fidelity_to_reference: fid,
    };

    let mut staged = Staged::new();
    staged.add(args.out.join("estimate.json"), |w| write_matrix(w, &result.estimate))?;
    staged.add_json(args.out.join("report.json"), &report)?;
    if args.trace {
        staged.add(args.out.join("loglik.tsv"), |w| write_trace(w, &result.trace))?;
    }
    staged.commit()?;
    print_report(&ind);
    println!("log-likelihood: {:.6}", result.log_likelihood);
    println!("iterations: {}", result.iterations);
    if let Some(f) = fid {
        println!("fidelity to reference: {f:.6}");
    }
    if result.floored > 0 {
        eprintln!(
            "warning: {} observed outcomes have near-zero predicted probability",
            result.floored
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::Dims { n, d } => dims(n, d),
        Command::Analyze { input, modes, out, tol } => {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(Failure::usage(format!("--tol must be positive, got {tol}")));
            }
            analyze(&input, modes.as_deref(), &out, tol)
        }
        Command::Simulate {
            input,
            settings,
            shots,
            seed,
            out,
        } => simulate(&input, settings.as_deref(), shots, seed, &out),
        Command::Reconstruct(args) => reconstruct(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
