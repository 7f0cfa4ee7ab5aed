use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod bernstein;
mod bss;
mod error;
mod io;
mod pi;
mod report;
mod solve;
mod transparency;

use error::CliError;

#[derive(Parser)]
#[command(name = "realgap", version, about = "Exact and effective solvers for sparse inverse problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Lasso2,
    Bp,
    Bpa,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance exactly and write the certified result as JSON.
    Solve {
        problem: Problem,
        instance: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// BP-A: box half-width parameter β of the certified ball.
        #[arg(long, default_value = "1")]
        beta: String,
        /// BP-A: uniform approximation accuracy of the ℓ1 surrogate.
        #[arg(long, default_value = "1/16")]
        gamma: String,
        /// BP-A: branch-and-bound termination tolerance.
        #[arg(long, default_value = "1/32")]
        tol: String,
        #[arg(long, env = "REALGAP_NODE_BUDGET")]
        node_budget: Option<u64>,
    },
    /// Run the naive and exact BP maps over representation variants near the
    /// switching threshold and report transparency verdicts.
    TransparencyDemo {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        k: Option<u32>,
        #[arg(long)]
        variants: Option<usize>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Largest oracle precision any map may request.
        #[arg(long, env = "REALGAP_QUERY_BUDGET")]
        query_budget: Option<u32>,
        /// Include wall-clock time in the report (breaks byte-identity).
        #[arg(long)]
        timing: bool,
    },
    /// Measured sup-error of the Bernstein ℓ1 surrogate against degree.
    BernsteinCurve {
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value = "1")]
        beta: String,
        /// Comma-separated ascending degrees, e.g. "4,16,64,256".
        #[arg(long, default_value = "4,16,64,256")]
        degrees: String,
        /// Grid step in each coordinate.
        #[arg(long, default_value = "1/4096")]
        step: String,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// BSS programs over the rationals.
    Bss {
        #[command(subcommand)]
        command: BssCommand,
    },
    /// Rational approximation of π within 2^-k from a Machin-type series.
    Pi {
        #[arg(short, long, default_value_t = 64)]
        k: u32,
    },
}

#[derive(Subcommand)]
enum BssCommand {
    /// Execute a program on a comma-separated rational input.
    Run {
        program: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        input: String,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, env = "REALGAP_MAX_STEPS")]
        max_steps: Option<u64>,
    },
    /// Compile a ReLU network to a BSS program.
    CompileNet {
        net: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Solve { problem, instance, output, beta, gamma, tol, node_budget } => {
            let opts = solve::BpaOptions {
                beta: io::parse_rational("--beta", &beta)?,
                gamma: io::parse_rational("--gamma", &gamma)?,
                tol: io::parse_rational("--tol", &tol)?,
                node_budget,
            };
            solve::cmd_solve(problem, &instance, output.as_deref(), &opts)
        }
        Command::TransparencyDemo { config, seed, k, variants, json, csv, query_budget, timing } => {
            let mut cfg = match &config {
                Some(path) => transparency::ExperimentConfig::load(path)?,
                None => transparency::ExperimentConfig::default(),
            };
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.k = k.unwrap_or(cfg.k);
            cfg.variants = variants.unwrap_or(cfg.variants);
            cfg.budgets.query_precision = query_budget.or(cfg.budgets.query_precision);
            if json.is_some() {
                cfg.outputs.json = json;
            }
            if csv.is_some() {
                cfg.outputs.csv = csv;
            }
            transparency::cmd_transparency_demo(&cfg, timing)
        }
        Command::BernsteinCurve { dim, beta, degrees, step, csv, svg } => {
            let degrees = bernstein::parse_degrees(&degrees)?;
            let beta = io::parse_rational("--beta", &beta)?;
            let step = io::parse_rational("--step", &step)?;
            bernstein::cmd_bernstein_curve(dim, &beta, &degrees, &step, csv.as_deref(), svg.as_deref())
        }
        Command::Bss { command: BssCommand::Run { program, input, trace, max_steps } } => {
            bss::cmd_run(&program, &input, trace.as_deref(), max_steps)
        }
        Command::Bss { command: BssCommand::CompileNet { net, output } } => bss::cmd_compile_net(&net, output.as_deref()),
        Command::Pi { k } => {
            let q = pi::machin_pi().query(k);
            println!("{q}");
            println!("{:.17}", q.to_f64());
            Ok(true)
        }
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
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}
