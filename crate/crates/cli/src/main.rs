use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use semibound_cli::{
    run, CliError, Grid, OperatorSource, RunConfig, RunReport, SplitWeight, Task, EXIT_DOMINATION, EXIT_INPUT,
};
use semibound_core::bounds::SChoice;
use semibound_core::gallery::GalleryEntry;
use semibound_core::io::matrix_to_json;
use semibound_core::linalg::spectral_abscissa;
use semibound_core::{BoundMethod, WeightSpec};

/// Semigroup decay bounds from resolvent estimates.
#[derive(Parser)]
#[command(name = "semibound", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every task of a JSON configuration.
    Run { config: PathBuf },
    /// Build a gallery operator; `--emit` prints its matrix JSON.
    Gallery {
        name: String,
        #[arg(long)]
        emit: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Certified r(omega) on a grid.
    Profile {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        omega: Vec<f64>,
        #[arg(long, default_value_t = 1e-4)]
        rel_width: f64,
    },
    /// Bound curves against the true semigroup norm.
    Bound {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        t: TimeArgs,
        /// Comma-separated: gps, propa, contrb, contrbprime, power, phi_limit, appendix.
        #[arg(long, value_delimiter = ',', default_value = "gps", value_parser = parse_method)]
        methods: Vec<BoundMethod>,
        #[arg(long, allow_negative_numbers = true)]
        omega: Option<f64>,
        /// Majorant M e^(omega_hat t); needs --omega-hat too.
        #[arg(long, requires = "omega_hat")]
        m_hat: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "m_hat")]
        omega_hat: Option<f64>,
        /// Fixed s for the contrb family instead of the optimizer.
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        epsilon0: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long, default_value_t = 1e-4)]
        rel_width: f64,
    },
    /// Remainder bound after splitting off the spectrum right of omega_tilde.
    Split {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        t: TimeArgs,
        #[arg(long, allow_negative_numbers = true)]
        omega_tilde: f64,
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-4)]
        rel_width: f64,
    },
    /// Extend a majorant from [0, T) by the doubling recursion.
    Recursion {
        #[command(flatten)]
        op: OperatorArgs,
        #[arg(long, allow_negative_numbers = true)]
        omega: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        horizon: f64,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, default_value_t = 16)]
        stride: usize,
    },
}

#[derive(Args)]
struct OperatorArgs {
    /// Gallery operator with default parameters.
    #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
    gallery: Option<String>,
    /// Matrix JSON file.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, default_value = "semibound-out")]
    output_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    svg: bool,
}

#[derive(Args)]
struct TimeArgs {
    /// Explicit comma-separated times.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["t_from", "t_to"])]
    t: Vec<f64>,
    #[arg(long, requires = "t_to")]
    t_from: Option<f64>,
    #[arg(long, requires = "t_from")]
    t_to: Option<f64>,
    #[arg(long, default_value_t = 10)]
    t_count: usize,
    #[arg(long)]
    t_log: bool,
}

impl TimeArgs {
    fn grid(&self) -> Result<Grid, CliError> {
        match (self.t_from, self.t_to) {
            (Some(from), Some(to)) => Ok(Grid::Range { from, to, count: self.t_count, log: self.t_log }),
            _ if !self.t.is_empty() => Ok(Grid::List(self.t.clone())),
            _ => Err(CliError::Config("give --t or --t-from/--t-to".into())),
        }
    }
}

fn parse_method(s: &str) -> Result<BoundMethod, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown method '{s}'"))
}

fn single(op: OperatorArgs, task: Task) -> Result<RunConfig, CliError> {
    let operator = match (op.gallery, op.matrix) {
        (Some(name), None) => OperatorSource::Gallery(GalleryEntry::by_name(&name)?),
        (None, Some(p)) => OperatorSource::File(p),
        _ => return Err(CliError::Config("give exactly one of --gallery and --matrix".into())),
    };
    Ok(RunConfig {
        operator,
        tasks: vec![task],
        output_dir: op.output_dir,
        seed: op.seed,
        svg: op.svg,
    })
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SEMIBOUND_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("SEMIBOUND_THREADS = '{v}' is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the thread pool: {e}")))
}

fn print_report(report: &RunReport) {
    println!("seed {}", report.seed);
    for r in &report.rows {
        println!(
            "{:<14} {:<14} max truth/bound = {:<12.6e} {}",
            r.task,
            r.method,
            r.max_truth_over_bound,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let config = match cli.cmd {
        Cmd::Run { config } => RunConfig::load(&config)?,
        Cmd::Gallery { name, emit, seed } => {
            let a = GalleryEntry::by_name(&name)?.build_seeded(seed)?;
            if emit {
                println!("{}", matrix_to_json(&a));
            } else {
                println!("{name}: dim {}", a.dim());
                println!("spectral abscissa {}", spectral_abscissa(&a)?);
                println!("numerical abscissa {}", a.numerical_abscissa());
                println!("norm {}", a.norm2());
            }
            return Ok(0);
        }
        Cmd::Profile { op, omega, rel_width } => single(op, Task::Profile { omega: Grid::List(omega), rel_width })?,
        Cmd::Bound { op, t, methods, omega, m_hat, omega_hat, s, alpha, epsilon0, horizon, rel_width } => {
            let m = match (m_hat, omega_hat) {
                (Some(m_hat), Some(omega_hat)) => Some(WeightSpec::exponential(m_hat, omega_hat)?),
                _ => None,
            };
            let task = Task::Bound {
                methods,
                t: t.grid()?,
                omega,
                m,
                s: s.map_or(SChoice::Optimal, SChoice::Fixed),
                alpha,
                power_optimal: true,
                epsilon0,
                horizon,
                rel_width,
            };
            single(op, task)?
        }
        Cmd::Split { op, t, omega_tilde, nodes, rel_width } => {
            let task = Task::Split {
                omega_tilde,
                t: t.grid()?,
                contour: None,
                weight: SplitWeight::NumericalAbscissa,
                nodes,
                rel_width,
            };
            single(op, task)?
        }
        Cmd::Recursion { op, omega, r, horizon, t_max, h, stride } => {
            single(op, Task::Recursion { omega, r, m0: None, horizon, t_max, h, stride })?
        }
    };
    let report = run(&config)?;
    print_report(&report);
    Ok(if report.all_pass() { 0 } else { EXIT_DOMINATION })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    let result = configure_threads().and_then(|()| dispatch(cli));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}
