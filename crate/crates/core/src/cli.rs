//! Batch front-end behind the `safe` binary.
//!
//! A [`RunConfig`] is built from defaults, an optional `key = value` file,
//! the `SAFE_OUTPUT_DIR` environment variable and command-line flags, in
//! that order of increasing precedence.

use std::ffi::OsString;
use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::exponential::bernoulli;
use crate::mesh::Diagonal;
use crate::solver::SolveConfig;
use crate::verify::{builtin_case, error_norms, run_convergence_with, solve_case, stability_metrics, CaseParams};
use crate::vtk::write_solution_vtk;

pub const OUTPUT_DIR_ENV: &str = "SAFE_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Command {
    #[default]
    Convergence,
    Solve,
    BernoulliTable,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convergence" => Ok(Self::Convergence),
            "solve" => Ok(Self::Solve),
            "bernoulli-table" => Ok(Self::BernoulliTable),
            other => Err(Error::Config(format!("unknown command '{other}'"))),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Convergence => "convergence",
            Self::Solve => "solve",
            Self::BernoulliTable => "bernoulli-table",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub case: String,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    /// Empty selects the command default.
    pub refinements: Vec<usize>,
    pub solver: SolveConfig,
    pub outdir: PathBuf,
    pub diagonal: Diagonal,
    pub write_csv: bool,
    pub write_vtk: bool,
    /// `solve` only: also solve at this diffusion and report the difference.
    pub reference_alpha: Option<f64>,
    pub epsilons: Vec<f64>,
    pub arg_min: f64,
    pub arg_max: f64,
    pub samples: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::Convergence,
            case: "div2d".into(),
            alpha: None,
            gamma: None,
            refinements: Vec::new(),
            solver: SolveConfig::default(),
            outdir: PathBuf::from("output"),
            diagonal: Diagonal::default(),
            write_csv: true,
            write_vtk: true,
            reference_alpha: None,
            epsilons: vec![0.0, 1e-8, 1.0],
            arg_min: -10.0,
            arg_max: 10.0,
            samples: 11,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for '{key}'")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

fn parse_opt(key: &str, value: &str) -> Result<Option<f64>> {
    if value.is_empty() {
        Ok(None)
    } else {
        parse(key, value).map(Some)
    }
}

fn join<T: fmt::Debug>(v: &[T]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Refinement levels with the command default filled in.
    pub fn levels(&self) -> Vec<usize> {
        if !self.refinements.is_empty() {
            return self.refinements.clone();
        }
        match (self.command, self.case.as_str()) {
            (Command::Solve, _) => vec![32],
            (_, "curl3d" | "grad3d") => vec![2, 4, 8, 16],
            _ => vec![4, 8, 16, 32, 64, 128],
        }
    }

    pub fn case_params(&self) -> CaseParams {
        CaseParams {
            alpha: self.alpha,
            gamma: self.gamma,
            diagonal: self.diagonal,
        }
    }

    /// Sets one key; the same keys are used by the text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "command" => self.command = value.parse()?,
            "case" => self.case = value.to_string(),
            "alpha" => self.alpha = parse_opt(key, value)?,
            "gamma" => self.gamma = parse_opt(key, value)?,
            "n" => self.refinements = parse_list(key, value)?,
            "solver" => self.solver.method = value.parse()?,
            "tol" => self.solver.tol = parse(key, value)?,
            "max_iter" => self.solver.max_iter = parse(key, value)?,
            "outdir" => self.outdir = PathBuf::from(value),
            "diagonal" => self.diagonal = value.parse()?,
            "csv" => self.write_csv = parse(key, value)?,
            "vtk" => self.write_vtk = parse(key, value)?,
            "reference_alpha" => self.reference_alpha = parse_opt(key, value)?,
            "eps" => self.epsilons = parse_list(key, value)?,
            "arg_min" => self.arg_min = parse(key, value)?,
            "arg_max" => self.arg_max = parse(key, value)?,
            "samples" => self.samples = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// `key = value` lines; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", i + 1)))?;
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }

    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        let mut out = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("command", self.command.to_string());
        kv("case", self.case.clone());
        kv("alpha", opt(self.alpha));
        kv("gamma", opt(self.gamma));
        kv("n", join(&self.refinements));
        kv("solver", self.solver.method.to_string());
        kv("tol", format!("{:?}", self.solver.tol));
        kv("max_iter", self.solver.max_iter.to_string());
        kv("outdir", self.outdir.display().to_string());
        kv("diagonal", self.diagonal.to_string());
        kv("csv", self.write_csv.to_string());
        kv("vtk", self.write_vtk.to_string());
        kv("reference_alpha", opt(self.reference_alpha));
        kv("eps", join(&self.epsilons));
        kv("arg_min", format!("{:?}", self.arg_min));
        kv("arg_max", format!("{:?}", self.arg_max));
        kv("samples", self.samples.to_string());
        out
    }
}

#[derive(Debug, Parser)]
#[command(name = "safe", version, about = "Simplex-averaged finite element experiments")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Convergence study of a manufactured case; writes <case>_convergence.csv.
    Convergence(Flags),
    /// Single solve; writes a VTK file and prints stability metrics.
    Solve(Flags),
    /// Samples the Bernoulli kernels into bernoulli_table.csv.
    BernoulliTable(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated refinement levels (cells per side).
    #[arg(long = "n", value_delimiter = ',')]
    n: Vec<usize>,
    /// ll-ur or ul-lr.
    #[arg(long)]
    diagonal: Option<String>,
    /// direct or iterative.
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Output directory (overrides SAFE_OUTPUT_DIR).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_csv: bool,
    #[arg(long)]
    no_vtk: bool,
    #[arg(long)]
    reference_alpha: Option<f64>,
    /// Comma-separated diffusion values for the Bernoulli table.
    #[arg(long, value_delimiter = ',')]
    eps: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    max: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

fn resolve(command: Command, flags: Flags, env_outdir: Option<OsString>) -> Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(path) => RunConfig::from_text(&fs::read_to_string(path)?)?,
        None => RunConfig::default(),
    };
    cfg.command = command;
    if let Some(dir) = env_outdir.filter(|d| !d.is_empty()) {
        cfg.outdir = PathBuf::from(dir);
    }
    if let Some(v) = flags.case {
        cfg.case = v;
    }
    if flags.alpha.is_some() {
        cfg.alpha = flags.alpha;
    }
    if flags.gamma.is_some() {
        cfg.gamma = flags.gamma;
    }
    if !flags.n.is_empty() {
        cfg.refinements = flags.n;
    }
    if let Some(v) = flags.diagonal {
        cfg.diagonal = v.parse()?;
    }
    if let Some(v) = flags.solver {
        cfg.solver.method = v.parse()?;
    }
    if let Some(v) = flags.tol {
        cfg.solver.tol = v;
    }
    if let Some(v) = flags.max_iter {
        cfg.solver.max_iter = v;
    }
    if let Some(v) = flags.out {
        cfg.outdir = v;
    }
    cfg.write_csv &= !flags.no_csv;
    cfg.write_vtk &= !flags.no_vtk;
    if flags.reference_alpha.is_some() {
        cfg.reference_alpha = flags.reference_alpha;
    }
    if !flags.eps.is_empty() {
        cfg.epsilons = flags.eps;
    }
    if let Some(v) = flags.min {
        cfg.arg_min = v;
    }
    if let Some(v) = flags.max {
        cfg.arg_max = v;
    }
    if let Some(v) = flags.samples {
        cfg.samples = v;
    }
    Ok(cfg)
}

/// Parses a full argument list (program name first) into a configuration.
pub fn parse_args<I, T>(args: I) -> std::result::Result<RunConfig, ParseOutcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(ParseOutcome::Clap)?;
    let (command, flags) = match cli.command {
        Sub::Convergence(f) => (Command::Convergence, f),
        Sub::Solve(f) => (Command::Solve, f),
        Sub::BernoulliTable(f) => (Command::BernoulliTable, f),
    };
    resolve(command, flags, std::env::var_os(OUTPUT_DIR_ENV)).map_err(ParseOutcome::Config)
}

/// Why argument parsing did not produce a configuration.
#[derive(Debug)]
pub enum ParseOutcome {
    /// Usage errors, `--help` and `--version`.
    Clap(clap::Error),
    Config(Error),
}

/// Exit status for an error: 2 for configuration and I/O problems, 3 for
/// numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_)
        | Error::Io(_)
        | Error::UnsupportedDegree { .. }
        | Error::NonPositiveDiffusion { .. }
        | Error::NegativeEpsilon(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Files written by a command and the text it prints.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub summary: String,
}

fn prepare_outdir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn cmd_convergence(cfg: &RunConfig) -> Result<Outcome> {
    let case = builtin_case(&cfg.case, &cfg.case_params())?;
    let levels = cfg.levels();
    if cfg.write_csv {
        prepare_outdir(&cfg.outdir)?;
    }
    let report = run_convergence_with(&case, &levels, &cfg.solver)?;
    let mut out = Outcome {
        summary: report.to_table(),
        ..Default::default()
    };
    if cfg.write_csv {
        let path = cfg.outdir.join(format!("{}_convergence.csv", case.name));
        fs::write(&path, report.to_csv())?;
        out.written.push(path);
    }
    Ok(out)
}

pub fn cmd_solve_field(cfg: &RunConfig) -> Result<Outcome> {
    let case = builtin_case(&cfg.case, &cfg.case_params())?;
    let levels = cfg.levels();
    let [n] = levels[..] else {
        return Err(Error::Config(format!("solve takes one refinement level, got {}", levels.len())));
    };
    if n == 0 {
        return Err(Error::Config("refinement level must be positive".into()));
    }
    if cfg.write_vtk {
        prepare_outdir(&cfg.outdir)?;
    }
    let sol = solve_case(&case, n, &cfg.solver)?;
    let reference = match cfg.reference_alpha {
        Some(a) => {
            let params = CaseParams {
                alpha: Some(a),
                ..cfg.case_params()
            };
            Some(solve_case(&builtin_case(&cfg.case, &params)?, n, &cfg.solver)?)
        }
        None => None,
    };
    let metrics = stability_metrics(sol.dofs(), reference.as_ref().map(|r| r.dofs()))?;
    let mut s = format!(
        "case {} ({} scheme, alpha = {:e}, gamma = {}), n = {n}, dofs = {}\n",
        case.name,
        case.scheme,
        case.alpha,
        case.gamma,
        sol.dofs().len()
    );
    let _ = writeln!(s, "max |u_h| = {:.8e}", metrics.max_abs);
    let _ = writeln!(s, "relative residual = {:.3e}", sol.report.relative_residual);
    if let (Some(a), Some(d), Some(o)) = (cfg.reference_alpha, metrics.max_diff, metrics.overshoot) {
        let _ = writeln!(s, "max |u_h - u_ref| = {d:.8e} (reference alpha = {a:e})");
        let _ = writeln!(s, "overshoot = {o:.8e}");
    }
    if let (Some(u), Some(du)) = (&case.exact, &case.exact_derivative) {
        let (l2, d) = error_norms(&sol.mesh, case.k, sol.dofs(), u, du)?;
        let _ = writeln!(s, "L2 error = {l2:.8e}, d error = {d:.8e}");
    }
    let mut out = Outcome::default();
    if cfg.write_vtk {
        let path = cfg.outdir.join(format!("{}_alpha{:e}_n{n}.vtk", case.name, case.alpha));
        let mut buf = Vec::new();
        write_solution_vtk(&sol.mesh, sol.space, sol.dofs(), "u", &mut buf)?;
        fs::write(&path, buf)?;
        out.written.push(path);
    }
    out.summary = s;
    Ok(out)
}

fn linspace(a: f64, b: f64, m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![a];
    }
    (0..m).map(|i| a + (b - a) * i as f64 / (m - 1) as f64).collect()
}

/// CSV with columns `kernel,epsilon,s,t,r,value`; unused arguments are empty.
pub fn bernoulli_table_csv(cfg: &RunConfig) -> Result<String> {
    if cfg.samples == 0 || !(cfg.arg_min <= cfg.arg_max) {
        return Err(Error::Config("need samples >= 1 and min <= max".into()));
    }
    let grid = linspace(cfg.arg_min, cfg.arg_max, cfg.samples);
    let mut out = String::from("kernel,epsilon,s,t,r,value\n");
    for j in 1..=3usize {
        for &eps in &cfg.epsilons {
            let total = grid.len().pow(j as u32);
            for idx in 0..total {
                let mut args = [0.0; 3];
                let mut rest = idx;
                for a in args.iter_mut().take(j).rev() {
                    *a = grid[rest % grid.len()];
                    rest /= grid.len();
                }
                let value = bernoulli(eps, &args[..j])?;
                let _ = write!(out, "B{j},{eps:.8e}");
                for (i, a) in args.iter().enumerate() {
                    if i < j {
                        let _ = write!(out, ",{a:.8e}");
                    } else {
                        out.push(',');
                    }
                }
                let _ = writeln!(out, ",{value:.8e}");
            }
        }
    }
    Ok(out)
}

pub fn cmd_bernoulli_table(cfg: &RunConfig) -> Result<Outcome> {
    let csv = bernoulli_table_csv(cfg)?;
    prepare_outdir(&cfg.outdir)?;
    let path = cfg.outdir.join("bernoulli_table.csv");
    fs::write(&path, &csv)?;
    Ok(Outcome {
        summary: format!("{} rows written to {}\n", csv.lines().count() - 1, path.display()),
        written: vec![path],
    })
}

pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    match cfg.command {
        Command::Convergence => cmd_convergence(cfg),
        Command::Solve => cmd_solve_field(cfg),
        Command::BernoulliTable => cmd_bernoulli_table(cfg),
    }
}

/// Entry point of the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match parse_args(args) {
        Ok(cfg) => cfg,
        Err(ParseOutcome::Clap(e)) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
        Err(ParseOutcome::Config(e)) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match run(&cfg) {
        Ok(out) => {
            print!("{}", out.summary);
            for p in &out.written {
                println!("wrote {}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::Method;

    fn flags(args: &[&str]) -> RunConfig {
        let mut full = vec!["safe"];
        full.extend_from_slice(args);
        let cli = Cli::try_parse_from(full).unwrap();
        let (c, f) = match cli.command {
            Sub::Convergence(f) => (Command::Convergence, f),
            Sub::Solve(f) => (Command::Solve, f),
            Sub::BernoulliTable(f) => (Command::BernoulliTable, f),
        };
        resolve(c, f, None).unwrap()
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = RunConfig {
            command: Command::Solve,
            alpha: Some(2e-3),
            reference_alpha: Some(0.1 + 0.2),
            refinements: vec![32],
            epsilons: vec![0.0, 1e-8, 1.0 / 3.0],
            ..Default::default()
        };
        cfg.solver.method = Method::Iterative;
        let back = RunConfig::from_text(&cfg.to_text()).unwrap();
        assert_eq!(back, cfg);
        let d = RunConfig::default();
        assert_eq!(RunConfig::from_text(&d.to_text()).unwrap(), d);
    }

    #[test]
    fn flags_override_defaults() {
        let cfg = flags(&["convergence", "--case", "curl3d", "--alpha", "1", "--n", "2,4"]);
        assert_eq!(cfg.case, "curl3d");
        assert_eq!(cfg.alpha, Some(1.0));
        assert_eq!(cfg.levels(), vec![2, 4]);
        let cfg = flags(&["bernoulli-table", "--min", "-3", "--max", "3", "--eps", "0,1"]);
        assert_eq!((cfg.arg_min, cfg.arg_max), (-3.0, 3.0));
        assert_eq!(cfg.epsilons, vec![0.0, 1.0]);
    }

    #[test]
    fn command_defaults() {
        let mut cfg = RunConfig::default();
        assert_eq!(cfg.levels().len(), 6);
        cfg.command = Command::Solve;
        assert_eq!(cfg.levels(), vec![32]);
    }

    #[test]
    fn bad_keys_are_config_errors() {
        let e = RunConfig::from_text("colour = red").unwrap_err();
        assert_eq!(exit_code(&e), EXIT_CONFIG);
        assert!(RunConfig::from_text("alpha = abc").is_err());
        assert!(RunConfig::from_text("no equals sign").is_err());
    }

    #[test]
    fn table_contains_limit_rows() {
        let cfg = RunConfig::default();
        let csv = bernoulli_table_csv(&cfg).unwrap();
        let row = csv
            .lines()
            .find(|l| l.starts_with("B1,0.00000000e0,-2.00000000e0,"))
            .unwrap();
        assert!(row.ends_with(",2.00000000e0"));
        assert!(!csv.contains(",-0.00000000e0"));
        let ones = csv
            .lines()
            .filter(|l| l.contains(",1.00000000e0,0.00000000e0,"))
            .filter(|l| l.split(',').skip(2).take(3).all(|v| v.is_empty() || v == "0.00000000e0"))
            .count();
        assert_eq!(ones, 3);
    }
}
