//! `formal-powers`: reproduces the published tables and runs boundary value
//! and eigenvalue experiments described by TOML configs.
//!
//! Exit codes: 0 pass, 1 tolerance failure, 2 usage or config error,
//! 3 numerical error.

mod config;
mod output;
mod tables;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use formal_powers::problems::{complete_system, particular_solution, BasisMode, EllipticProblem, ParticularSpec};
use formal_powers::solver::{assemble, error_grid, find_eigenvalues, max_abs_error, solve_bvp, EigenSetup, SolveMode, DEFAULT_GRID_STEP};

use config::{EquationTag, Exact, ExperimentConfig};
use output::{to_csv, write_outputs, Metadata, ResultRow, Versions};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Config(String),
    Io(String),
    Data(String),
    Numerical(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Data(m) => write!(f, "reference data error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

impl From<formal_powers::Error> for CliError {
    fn from(e: formal_powers::Error) -> Self {
        use formal_powers::Error as E;
        match e {
            E::InvalidArgument(_) | E::DomainParameter(_) | E::Underdetermined { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "formal-powers", version, about = "Formal-power solvers for (div p grad + q)u = 0")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce a published table (1, 2, 3, 5, 6, 7, 8, 9 or eigen).
    Table {
        id: String,
        /// Result CSV; the metadata sidecar is written next to it.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve one boundary value problem.
    Bvp {
        #[arg(long)]
        config: PathBuf,
    },
    /// Scan for eigenvalues of −Δ + V on the configured domain.
    Eigen {
        #[arg(long)]
        config: PathBuf,
    },
    /// Build the basis; with --dump write samples of every u_k.
    Basis {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dump: bool,
    },
}

/// Rows, warnings and the config echo of one run.
struct RunResult {
    rows: Vec<ResultRow>,
    warnings: Vec<String>,
}

fn finish(command: &str, config: String, path: &Path, run: RunResult, started: Instant) -> Result<ExitCode, CliError> {
    let csv = to_csv(&run.rows)?;
    let meta = Metadata {
        command: command.to_string(),
        versions: Versions::current(),
        total_seconds: started.elapsed().as_secs_f64(),
        row_seconds: run.rows.iter().map(|r| r.seconds).collect(),
        warnings: run.warnings,
        config,
    };
    write_outputs(path, &csv, &meta)?;
    print!("{csv}");
    let failed = run.rows.iter().filter(|r| r.pass == Some(false)).count();
    if failed > 0 {
        eprintln!("{failed} row(s) outside tolerance");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_bvp(cfg: &ExperimentConfig) -> Result<RunResult, CliError> {
    let domain = cfg.domain()?;
    let ps = particular_solution(&cfg.problem(), &cfg.particular(), &domain)?;
    let t = Instant::now();
    let basis = complete_system(&ps, &domain, cfg.solver.n, cfg.mode(), &cfg.rule())?;
    let bc = cfg.boundary_condition()?;
    let sys = assemble(&basis, &bc, cfg.points())?;
    let mode = if sys.is_square() { SolveMode::Square } else { SolveMode::LeastSquares };
    let sol = solve_bvp(&sys, mode)?;
    let seconds = t.elapsed().as_secs_f64();
    let tag = |mut r: ResultRow| {
        r.n = Some(cfg.solver.n);
        r.c = cfg.equation.c;
        r.e = cfg.domain.e;
        r.height = cfg.domain.height;
        r
    };
    let mut rows: Vec<ResultRow> = sol
        .coefficients()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let mut r = tag(ResultRow::new("bvp", "coefficient", *b));
            r.k = Some(k);
            r
        })
        .collect();
    rows.push(tag(ResultRow::new("bvp", "boundary_residual", sol.residual())));
    rows.push(tag(ResultRow::new("bvp", "condition", sol.condition())));
    if let Some(r) = cfg.reference.tag {
        let exact = Exact::new(r, cfg.c());
        let err = max_abs_error(&sol, &|z| exact.value(z), &error_grid(&domain))?;
        rows.push(tag(ResultRow::new("bvp", "max_abs_error", err)));
    }
    if let Some(last) = rows.last_mut() {
        last.seconds = seconds;
    }
    let mut warnings = sol.warnings().to_vec();
    warnings.push(format!("mode={} solve={}", basis.mode_name(), mode.name()));
    Ok(RunResult { rows, warnings })
}

fn eigen_problem(cfg: &ExperimentConfig) -> Result<EllipticProblem<f64>, CliError> {
    match cfg.equation.tag {
        EquationTag::Laplace => Ok(EllipticProblem::laplace()),
        EquationTag::ExpPotential => Ok(config::second_example()),
        EquationTag::Yukawa => Err(CliError::Config("equation.tag: eigen runs take laplace or exp_potential".into())),
    }
}

fn run_eigen(cfg: &ExperimentConfig) -> Result<RunResult, CliError> {
    let range = cfg.lambda_range()?;
    let mode = match cfg.mode() {
        BasisMode::Auto => BasisMode::Numeric,
        m => m,
    };
    let mut setup = EigenSetup::new(eigen_problem(cfg)?, cfg.domain()?, cfg.solver.n).with_mode(mode);
    setup.rule = cfg.rule();
    let t = Instant::now();
    let scan = find_eigenvalues(&setup, range, DEFAULT_GRID_STEP, None)?;
    let seconds = t.elapsed().as_secs_f64() / scan.roots.len().max(1) as f64;
    let rows = scan
        .roots
        .iter()
        .enumerate()
        .map(|(i, r)| ResultRow {
            experiment: "eigen".into(),
            n: Some(cfg.solver.n),
            e: cfg.domain.e,
            height: cfg.domain.height,
            k: Some(i + 1),
            quantity: "lambda".into(),
            measured: Some(r.lambda),
            indicator: Some(r.indicator),
            width: Some(r.width),
            seconds,
            ..Default::default()
        })
        .collect();
    let warnings = scan
        .skipped
        .iter()
        .map(|(l, m)| format!("skipped lambda={l:e}: {m}"))
        .collect();
    Ok(RunResult { rows, warnings })
}

/// Boundary and interior sample counts for `basis --dump`.
const DUMP_BOUNDARY: usize = 256;
const DUMP_INTERIOR: usize = 400;

fn run_basis(cfg: &ExperimentConfig, dump: bool, text: String, started: Instant) -> Result<ExitCode, CliError> {
    let domain = cfg.domain()?;
    let spec = match (cfg.equation.tag, cfg.equation.lambda_range) {
        (EquationTag::Laplace | EquationTag::ExpPotential, Some([l, _])) => ParticularSpec::Eigen {
            lambda: l,
            init: formal_powers::problems::ProfileInit::Default,
        },
        _ => cfg.particular(),
    };
    let problem = if matches!(spec, ParticularSpec::Eigen { .. }) { eigen_problem(cfg)? } else { cfg.problem() };
    let ps = particular_solution(&problem, &spec, &domain)?;
    let basis = complete_system(&ps, &domain, cfg.solver.n, cfg.mode(), &cfg.rule())?;
    let mut points = domain.boundary_sample(DUMP_BOUNDARY);
    points.extend(domain.interior_grid_min(DUMP_INTERIOR));
    if !dump {
        basis.check_pde(&domain.interior_grid_min(60))?;
        println!("basis: {} functions, mode {}, PDE residual check passed", basis.len(), basis.mode_name());
        return Ok(ExitCode::SUCCESS);
    }
    let values = basis.eval_many(&points)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["k", "x", "y", "re", "im"]).map_err(io)?;
    for k in 0..basis.len() {
        for (z, row) in points.iter().zip(&values) {
            w.write_record([k.to_string(), format!("{:e}", z.re), format!("{:e}", z.im), format!("{:e}", row[k].re), format!("{:e}", row[k].im)])
                .map_err(io)?;
        }
    }
    let csv = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?).map_err(|e| CliError::Io(e.to_string()))?;
    let meta = Metadata {
        command: "basis --dump".into(),
        versions: Versions::current(),
        total_seconds: started.elapsed().as_secs_f64(),
        row_seconds: Vec::new(),
        warnings: vec![format!("mode={}", basis.mode_name())],
        config: text,
    };
    let side = write_outputs(&cfg.output.path, &csv, &meta)?;
    eprintln!("wrote {} and {}", cfg.output.path.display(), side.display());
    Ok(ExitCode::SUCCESS)
}

fn load(path: &Path) -> Result<(ExperimentConfig, String), CliError> {
    let (cfg, text) = ExperimentConfig::load(path)?;
    cfg.validate()?;
    Ok((cfg, text))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let started = Instant::now();
    match cli.command {
        Command::Table { id, output } => {
            let rows = tables::run_table(&id)?;
            let path = output.unwrap_or_else(|| PathBuf::from(format!("table-{id}.csv")));
            finish(&format!("table {id}"), format!("table = {id:?}"), &path, RunResult { rows, warnings: Vec::new() }, started)
        }
        Command::Bvp { config } => {
            let (cfg, text) = load(&config)?;
            let run = run_bvp(&cfg)?;
            finish("bvp", text, &cfg.output.path, run, started)
        }
        Command::Eigen { config } => {
            let (cfg, text) = load(&config)?;
            let run = run_eigen(&cfg)?;
            finish("eigen", text, &cfg.output.path, run, started)
        }
        Command::Basis { config, dump } => {
            let (cfg, text) = load(&config)?;
            run_basis(&cfg, dump, text, started)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
