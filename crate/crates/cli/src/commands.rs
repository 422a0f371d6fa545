use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use epscap::{region_sample, LpValue, Status, Vector};
use serde::Serialize;

use crate::problem::{Problem, ProblemError, ProblemFile};
use crate::render;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ITERATION_LIMIT: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "epscap",
    version,
    about = "Epsilon-capacity sets of state-feedback gains"
)]
pub struct Cli {
    /// Emit reports as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Override the iteration limit of the determination loop.
    #[arg(long, global = true, value_name = "N")]
    pub max_iter: Option<usize>,
    /// Override the slack of the stopping test.
    #[arg(long, global = true, value_name = "TOL")]
    pub stop_tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the capacity set and its determination index.
    Determine { file: PathBuf },
    /// Decide whether the gain tolerates every initial-state disturbance.
    CheckGain { file: PathBuf },
    /// Controllability, observability, stability and the resulting guarantees.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Rasterize a 2-D capacity set to CSV (and optionally SVG).
    Region(RegionArgs),
    /// Simulate the closed loop from `x0 = alpha*tau0 + beta` as CSV.
    Simulate {
        file: PathBuf,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        alpha: f64,
        /// Comma-separated, one entry per state; zeros by default.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        beta: Option<Vec<f64>>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub xmin: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub xmax: f64,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub ymin: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub ymax: f64,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Write the CSV raster here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write an SVG rendering.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Core(#[from] epscap::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Parses `args` (including the program name) and runs the command, writing
/// reports to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run_from_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
            } else {
                let _ = out.write_all(text.as_bytes());
            }
            code
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn load(cli: &Cli, path: &Path, horizon: Option<usize>) -> Result<Problem, CliError> {
    let problem = ProblemFile::read(path)?.validate()?;
    Ok(problem.with_overrides(cli.max_iter, cli.stop_tol, horizon)?)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|source| CliError::Write {
            path: "<stdout>".into(),
            source,
        })
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn fmt_row(row: &[f64]) -> String {
    let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
    format!("[{}]", cells.join(", "))
}

fn fmt_value(v: &LpValue) -> String {
    match v {
        LpValue::Finite(x) => format!("{x:.12}"),
        LpValue::Unbounded => "unbounded".into(),
    }
}

fn status_code(status: Status) -> i32 {
    match status {
        Status::Determined => EXIT_OK,
        Status::IterationLimitReached { .. } => EXIT_ITERATION_LIMIT,
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Determine { file } => determine(cli, file, out),
        Command::CheckGain { file } => check_gain(cli, file, out),
        Command::Analyze { file, horizon } => analyze(cli, file, *horizon, out),
        Command::Region(args) => region(cli, args, out, err),
        Command::Simulate {
            file,
            alpha,
            beta,
            steps,
        } => simulate(cli, file, *alpha, beta.as_deref(), *steps, out),
    }
}

#[derive(Serialize)]
struct DetermineReport<'a> {
    name: Option<&'a str>,
    #[serde(flatten)]
    cap: &'a epscap::CapacitySet,
    reference_k0: Option<usize>,
    matches_reference: Option<bool>,
}

fn determine(cli: &Cli, file: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let problem = load(cli, file, None)?;
    let cap = problem
        .closed_loop
        .determine(&problem.settings.determine_options())?;
    let matches_reference = problem
        .reference_k0
        .map(|r| cap.determination_index() == Some(r));

    if cli.json {
        let report = DetermineReport {
            name: problem.name.as_deref(),
            cap: &cap,
            reference_k0: problem.reference_k0,
            matches_reference,
        };
        emit(out, &json(&report))?;
        return Ok(status_code(cap.status));
    }

    let mut s = String::new();
    if let Some(name) = &problem.name {
        let _ = writeln!(s, "problem: {name}");
    }
    match cap.status {
        Status::Determined => {
            let _ = writeln!(s, "status: determined");
            let _ = writeln!(s, "k0: {}", cap.k0);
        }
        Status::IterationLimitReached { k_reached } => {
            let _ = writeln!(
                s,
                "status: iteration limit reached at k = {k_reached} (set not certified)"
            );
        }
    }
    if let Some(reference) = problem.reference_k0 {
        let verdict = if matches_reference == Some(true) {
            "matches"
        } else {
            "DIFFERS"
        };
        let _ = writeln!(s, "reference k0: {reference} ({verdict})");
    }
    let _ = writeln!(s, "epsilon: {}", cap.epsilon);
    let _ = writeln!(s, "constraints |r.x| <= epsilon:");
    let p = cap.p();
    for (t, row) in cap.constraint_rows.row_iter().enumerate() {
        let _ = writeln!(s, "  i={} j={}: {}", t / p, t % p + 1, fmt_row(row));
    }
    let _ = writeln!(
        s,
        "LP maxima per step (signed constraints s = 1..{}):",
        2 * p
    );
    for rec in &cap.iterations {
        let values: Vec<String> = rec.maxima.iter().map(fmt_value).collect();
        let _ = writeln!(
            s,
            "  k={}: max {}  [{}]",
            rec.k,
            fmt_value(&rec.max()),
            values.join(", ")
        );
    }
    emit(out, &s)?;
    Ok(status_code(cap.status))
}

fn check_gain(cli: &Cli, file: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let problem = load(cli, file, None)?;
    let report = problem
        .closed_loop
        .phi_check(&problem.settings.determine_options())?;
    let code = if !report.admissible {
        EXIT_INADMISSIBLE
    } else if !report.certified {
        EXIT_ITERATION_LIMIT
    } else {
        EXIT_OK
    };

    if cli.json {
        emit(out, &json(&report))?;
        return Ok(code);
    }
    let mut s = String::new();
    if let Some(name) = &problem.name {
        let _ = writeln!(s, "problem: {name}");
    }
    let _ = writeln!(
        s,
        "admissible: {}{}",
        report.admissible,
        if report.certified {
            ""
        } else {
            " (uncertified: iteration limit)"
        }
    );
    match &report.alpha_violation {
        None => {
            let _ = writeln!(s, "tau0: member (alpha tolerable)");
        }
        Some(v) => {
            let _ = writeln!(
                s,
                "tau0: violation at step {} output {} magnitude {} > {}",
                v.step,
                v.output + 1,
                v.magnitude,
                problem.closed_loop.epsilon()
            );
        }
    }
    if report.beta_violations.is_empty() {
        let _ = writeln!(s, "e_j: all members (beta tolerable)");
    }
    for b in &report.beta_violations {
        let _ = writeln!(
            s,
            "e_{}: violation at step {} magnitude {}",
            b.j, b.first_violation_step, b.magnitude
        );
    }
    emit(out, &s)?;
    Ok(code)
}

fn analyze(
    cli: &Cli,
    file: &Path,
    horizon: Option<usize>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let problem = load(cli, file, horizon)?;
    let open_loop = problem.b.as_ref().map(|b| (&problem.a, b));
    let report = problem
        .closed_loop
        .analyze(open_loop, problem.settings.horizon)?;
    if cli.json {
        emit(out, &json(&report))?;
        return Ok(EXIT_OK);
    }
    let mut s = String::new();
    if let Some(name) = &problem.name {
        let _ = writeln!(s, "problem: {name}");
    }
    let controllable = match report.controllable {
        Some(v) => v.to_string(),
        None => "not evaluated (no B)".into(),
    };
    let _ = writeln!(s, "controllable (A, B): {controllable}");
    let _ = writeln!(s, "observable (A_tilde, C): {}", report.observable);
    let _ = writeln!(s, "spectral radius: {}", report.spectral_radius);
    let _ = writeln!(s, "induced inf-norm: {}", report.inf_norm);
    let _ = writeln!(
        s,
        "finitely determined by contraction (norm < 1): {}",
        report.prop9_guarantee
    );
    let _ = writeln!(
        s,
        "finitely determined by controllability/observability/stability: {}",
        report.thm13_guarantee
    );
    match report.thm11_k0 {
        Some(k) => {
            let _ = writeln!(
                s,
                "beta-insensitive from step: {k} (checked to {})",
                report.horizon
            );
        }
        None => {
            let _ = writeln!(
                s,
                "beta-insensitive from step: none within {}",
                report.horizon
            );
        }
    }
    emit(out, &s)?;
    Ok(EXIT_OK)
}

fn region(
    cli: &Cli,
    args: &RegionArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let problem = load(cli, &args.file, None)?;
    if problem.n() != 2 {
        return Err(CliError::Usage(format!(
            "region needs n = 2, the problem has n = {}",
            problem.n()
        )));
    }
    if args.grid < 2 {
        return Err(CliError::Usage(format!(
            "--grid must be at least 2, got {}",
            args.grid
        )));
    }
    let cap = problem
        .closed_loop
        .determine(&problem.settings.determine_options())?;
    let raster = region_sample(
        &cap,
        (args.xmin, args.xmax),
        (args.ymin, args.ymax),
        args.grid,
    )?;

    let csv = render::region_csv(&raster);
    match &args.csv {
        Some(path) => write_file(path, &csv)?,
        None => emit(out, &csv)?,
    }
    if let Some(path) = &args.svg {
        let tau0 = problem.closed_loop.tau0();
        let markers = [
            ("tau0", tau0[0], tau0[1]),
            ("e1", 1.0, 0.0),
            ("e2", 0.0, 1.0),
        ];
        write_file(path, &render::region_svg(&raster, &markers))?;
    }
    if !cap.is_determined() {
        let _ = writeln!(
            err,
            "warning: iteration limit reached; raster shows an outer approximation"
        );
    }
    Ok(status_code(cap.status))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.display().to_string(),
        source,
    })
}

fn simulate(
    cli: &Cli,
    file: &Path,
    alpha: f64,
    beta: Option<&[f64]>,
    steps: usize,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let problem = load(cli, file, None)?;
    let n = problem.n();
    let beta = match beta {
        None => Vector::zeros(n),
        Some(b) if b.len() != n => {
            return Err(CliError::Usage(format!(
                "--beta needs {n} entries, got {}",
                b.len()
            )));
        }
        Some(b) => Vector::new(b.to_vec())?,
    };
    let traj = match &problem.plant {
        Some((sys, gain)) => epscap::simulate(sys, gain, alpha, &beta, steps)?,
        None => problem.closed_loop.simulate(alpha, &beta, steps)?,
    };
    if cli.json {
        emit(out, &json(&traj))?;
    } else {
        emit(out, &render::trajectory_csv(&traj))?;
    }
    Ok(EXIT_OK)
}
