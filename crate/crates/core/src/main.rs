use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gcg::registry;
use gcg::run::{exit_code, run, run_batch, ConfigLayer, RunConfig, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "gcg", version, about = "Generalized conditional gradient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one registered problem and write history, control and report.
    Run(RunArgs),
    /// List the registered problems.
    List,
    /// Run several config files, possibly in parallel.
    Batch {
        /// Config files (flat key = value).
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    problem: Option<String>,
    /// Interior nodes per space direction.
    #[arg(long)]
    n: Option<usize>,
    /// Time steps (parabolic problems).
    #[arg(long)]
    nt: Option<usize>,
    /// Stop once the gap is at most this.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Armijo sufficient-decrease factor.
    #[arg(long)]
    alpha: Option<f64>,
    /// Backtracking factor.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    max_backtracks: Option<u32>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Record distances to the converged control (costs a second solve).
    #[arg(long)]
    track_errors: Option<bool>,
    /// Compute rate, growth and structure diagnostics.
    #[arg(long)]
    diagnostics: Option<bool>,
    /// Gap tolerance of a tighter reference run for the residuals.
    #[arg(long)]
    reference_tol: Option<f64>,
}

impl RunArgs {
    fn resolve(self) -> gcg::Result<RunConfig> {
        let file = match &self.config {
            Some(p) => ConfigLayer::from_file(p)?,
            None => ConfigLayer::default(),
        };
        let flags = ConfigLayer {
            problem: self.problem,
            n: self.n,
            nt: self.nt,
            tol: self.tol,
            max_iter: self.max_iter,
            alpha: self.alpha,
            gamma: self.gamma,
            max_backtracks: self.max_backtracks,
            out_dir: self.out_dir,
            track_errors: self.track_errors,
            diagnostics: self.diagnostics,
            reference_tol: self.reference_tol,
        };
        RunConfig::resolve(file.overlay(flags))
    }
}

fn fail(err: &gcg::GcgError) -> ExitCode {
    eprintln!("error: {err}");
    if matches!(err, gcg::GcgError::UnknownProblem(_)) {
        eprintln!("available problems:\n{}", registry::listing());
    }
    ExitCode::from(exit_code(err) as u8)
}

fn main() -> ExitCode {
    // usage errors exit with 1, not clap's default of 2 (reserved for numerical failures)
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE as u8) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::List => {
            print!("{}", registry::listing());
            ExitCode::SUCCESS
        }
        Command::Run(args) => {
            let cfg = match args.resolve() {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match run(&cfg) {
                Ok(out) => {
                    print!("{}", out.report);
                    for p in &out.written {
                        eprintln!("wrote {}", p.display());
                    }
                    ExitCode::from(out.exit_code() as u8)
                }
                Err(e) => fail(&e),
            }
        }
        Command::Batch { configs, jobs } => {
            let mut resolved = Vec::new();
            for path in &configs {
                match ConfigLayer::from_file(path).and_then(RunConfig::resolve) {
                    Ok(c) => resolved.push(c),
                    Err(e) => {
                        eprintln!("{}: ", path.display());
                        return fail(&e);
                    }
                }
            }
            let mut code = 0;
            for (path, out) in configs.iter().zip(run_batch(&resolved, jobs)) {
                match out {
                    Ok(o) => {
                        println!("{}: {} after {} iterations", path.display(), o.status, o.iterations);
                        code = code.max(o.exit_code());
                    }
                    Err(e) => {
                        eprintln!("{}: error: {e}", path.display());
                        code = code.max(exit_code(&e));
                    }
                }
            }
            if code == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(code.max(EXIT_USAGE) as u8)
            }
        }
    }
}
