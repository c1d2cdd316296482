//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bounds::{assemble_box, ideal_point, simplex_bound, BoundSource};
use crate::diagnostics::{sample_feasible, sandwich_check};
use crate::driver::{solve, Selection, SolveOptions, DEFAULT_MAX_SCALARIZATIONS};
use crate::error::QvpError;
use crate::oracle::OracleSettings;
use crate::problem::QvpProblem;
use crate::report::{write_csv, write_json};
use crate::scalarize::{verify_wes, Direction, SolverSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

const SANDWICH_SAMPLES: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "qvp", version, about = "Outer approximation of weakly nondominated sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SelectionArg {
    Fifo,
    MaxGap,
}

impl From<SelectionArg> for Selection {
    fn from(s: SelectionArg) -> Self {
        match s {
            SelectionArg::Fifo => Selection::Fifo,
            SelectionArg::MaxGap => Selection::MaxGap,
        }
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct Tolerances {
    #[arg(long, default_value_t = 1e-6)]
    pub tol_scalar: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub tol_feas: f64,
}

impl Tolerances {
    fn settings(&self) -> Result<SolverSettings, String> {
        if !(self.tol_scalar > 0.0) || !(self.tol_feas > 0.0) {
            return Err("tolerances must be positive".into());
        }
        Ok(SolverSettings {
            oracle: OracleSettings {
                tol_feas: self.tol_feas,
                ..OracleSettings::default()
            },
            tol_scalar: self.tol_scalar,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the outer approximation and write the result file.
    Solve {
        problem: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Comma-separated positive direction; defaults to the problem's or e.
        #[arg(long, value_delimiter = ',')]
        direction: Option<Vec<f64>>,
        #[arg(long, value_enum, default_value = "fifo")]
        selection: SelectionArg,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value = "result.json")]
        out: PathBuf,
        /// Directory for front.csv and vertices.csv.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        tol: Tolerances,
        /// Seed for a sampled sandwich check after the solve.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_MAX_SCALARIZATIONS)]
        max_scalarizations: usize,
    },
    /// Check whether a decision point is weakly efficient.
    Verify {
        problem: PathBuf,
        /// Comma-separated decision point.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        direction: Option<Vec<f64>>,
        #[command(flatten)]
        tol: Tolerances,
    },
    /// Print the enclosing box of the outcome set.
    Bounds {
        problem: PathBuf,
        #[arg(long, default_value_t = 1e-7)]
        tol_feas: f64,
    },
}

fn exit_code(e: &QvpError) -> i32 {
    match e {
        QvpError::InfeasibleSet => EXIT_INFEASIBLE,
        QvpError::IterationCapExceeded(_) => EXIT_CAP,
        _ => EXIT_INPUT,
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // --help and --version also arrive here, on stdout with exit 0
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match run(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Solver(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

enum Failure {
    Solver(QvpError),
    Usage(String),
}

impl From<QvpError> for Failure {
    fn from(e: QvpError) -> Self {
        Failure::Solver(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn direction_arg(d: Option<Vec<f64>>) -> Result<Option<Direction>, Failure> {
    d.map(Direction::new).transpose().map_err(Failure::from)
}

fn run(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Solve {
            problem,
            epsilon,
            direction,
            selection,
            workers,
            out: out_path,
            csv,
            tol,
            seed,
            max_scalarizations,
        } => {
            if !(epsilon > 0.0) {
                return Err(Failure::Usage("--epsilon must be positive".into()));
            }
            if workers == 0 {
                return Err(Failure::Usage("--workers must be at least 1".into()));
            }
            let settings = tol.settings().map_err(Failure::Usage)?;
            let problem = QvpProblem::from_path(&problem, &settings.oracle)?;
            let options = SolveOptions {
                epsilon,
                direction: direction_arg(direction)?,
                selection: selection.into(),
                workers,
                settings,
                max_scalarizations,
            };
            let result = solve(&problem, &options)?;
            write_json(&result, &out_path)?;
            if let Some(dir) = csv {
                write_csv(&result, dir)?;
            }
            writeln!(
                out,
                "epsilon={} scalarizations={} |Y_WN|={} |V_eps|={} gap={:.6} time={:.3}s",
                result.epsilon,
                result.scalarizations,
                result.y_wn.len(),
                result.v_eps.len(),
                result.final_gap,
                result.wall_time_s
            )?;
            if let Some(seed) = seed {
                let samples = sample_feasible(&problem, SANDWICH_SAMPLES, seed)?;
                let report = sandwich_check(&result, &problem, &samples)?;
                writeln!(
                    out,
                    "sandwich samples={} outside_upper={} max_inner_distance={:.6}",
                    report.samples, report.outside_upper, report.max_inner_distance
                )?;
            }
        }
        Command::Verify {
            problem,
            x,
            direction,
            tol,
        } => {
            let settings = tol.settings().map_err(Failure::Usage)?;
            let problem = QvpProblem::from_path(&problem, &settings.oracle)?;
            let d = direction_arg(direction)?
                .or_else(|| problem.direction().cloned())
                .unwrap_or_else(|| Direction::ones(problem.num_objectives()));
            match verify_wes(&problem, &x, &d, &settings) {
                Ok(v) => writeln!(out, "weakly_efficient={} t={:.6}", v.weakly_efficient, v.t)?,
                Err(QvpError::InfeasiblePoint { violation }) => writeln!(
                    out,
                    "weakly_efficient=false t=nan note=infeasible point (violation {violation:e})"
                )?,
                Err(e) => return Err(e.into()),
            }
        }
        Command::Bounds { problem, tol_feas } => {
            if !(tol_feas > 0.0) {
                return Err(Failure::Usage("--tol-feas must be positive".into()));
            }
            let oracle = OracleSettings {
                tol_feas,
                ..OracleSettings::default()
            };
            let problem = QvpProblem::from_path(&problem, &oracle)?;
            let (m, _) = ideal_point(&problem, &oracle)?;
            writeln!(out, "computed m = {}", fmt_vec(&m))?;
            match simplex_bound(&problem, &oracle) {
                Ok((simplex, upper)) => {
                    writeln!(out, "simplex alpha0 = {} U_cap = {:.6}", fmt_vec(simplex.base()), simplex.cap)?;
                    writeln!(out, "simplex M = {}", fmt_vec(&upper))?;
                }
                Err(e @ QvpError::DenominatorNonPositiveOnSimplex { .. }) => {
                    writeln!(out, "simplex M unavailable: {e}")?;
                }
                Err(e) => return Err(e.into()),
            }
            if problem.box_lower().is_some() || problem.box_upper().is_some() {
                let b = assemble_box(&problem, &oracle)?;
                let src = |s: BoundSource| if s == BoundSource::User { "file" } else { "computed" };
                writeln!(
                    out,
                    "override from file: m = {} ({}), M = {} ({})",
                    fmt_vec(&b.lower),
                    src(b.lower_source),
                    fmt_vec(&b.upper),
                    src(b.upper_source)
                )?;
            }
            let b = assemble_box(&problem, &oracle)?;
            writeln!(out, "box m = {} M = {}", fmt_vec(&b.lower), fmt_vec(&b.upper))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with_args(std::iter::once("qvp").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn parses_solve_flags() {
        let cli = Cli::try_parse_from([
            "qvp", "solve", "p.json", "--epsilon", "0.1", "--direction", "1,2", "--selection", "max-gap",
            "--workers", "4", "--seed", "3",
        ])
        .unwrap();
        match cli.command {
            Command::Solve {
                epsilon,
                direction,
                selection,
                workers,
                seed,
                ..
            } => {
                assert_eq!(epsilon, 0.1);
                assert_eq!(direction, Some(vec![1.0, 2.0]));
                assert!(matches!(selection, SelectionArg::MaxGap));
                assert_eq!(workers, 4);
                assert_eq!(seed, Some(3));
            }
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn missing_file_is_input_error() {
        let (code, _, err) = run_args(&["solve", "does-not-exist.json", "--epsilon", "0.5"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("does-not-exist.json"));
    }

    #[test]
    fn epsilon_is_required() {
        assert_eq!(run_args(&["solve", "p.json"]).0, EXIT_INPUT);
    }

    #[test]
    fn malformed_point_is_input_error() {
        assert_eq!(run_args(&["verify", "p.json", "--x", "1,abc"]).0, EXIT_INPUT);
    }

    #[test]
    fn exit_codes_by_error() {
        assert_eq!(exit_code(&QvpError::InfeasibleSet), EXIT_INFEASIBLE);
        assert_eq!(exit_code(&QvpError::IterationCapExceeded(1)), EXIT_CAP);
        assert_eq!(exit_code(&QvpError::WNotAbove), EXIT_INPUT);
    }
}
