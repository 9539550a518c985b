//! Command-line front end: `run`, `list` and `describe`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::scenario::{bundled, find_bundled, run, RunOptions, Scenario, ScenarioError};

pub const OUT_DIR_ENV: &str = "TORSOR_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "torsor-out";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "torsor", version, about = "Run torsor mechanics scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file, or a bundled scenario by name.
    Run {
        scenario: String,
        /// Output directory; defaults to $TORSOR_OUT_DIR, then ./torsor-out.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Multiplies every check tolerance.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
        /// Seed for randomly sampled chart points.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List bundled scenarios.
    List,
    /// Show a bundled scenario.
    Describe { name: String },
}

fn load(scenario: &str) -> Result<Scenario, ScenarioError> {
    let path = Path::new(scenario);
    if path.exists() {
        return Scenario::from_file(path);
    }
    match find_bundled(scenario) {
        Some(b) => b.load(),
        None => Err(ScenarioError::Config(format!("scenario: no file or bundled scenario named `{scenario}`"))),
    }
}

fn error_code(e: &ScenarioError) -> i32 {
    match e {
        ScenarioError::Evaluation(_) => EXIT_FAIL,
        ScenarioError::Config(_) | ScenarioError::Io(_) => EXIT_CONFIG,
    }
}

/// Runs the command line `args` and returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match cli.command {
        Command::List => {
            for b in bundled() {
                match b.load() {
                    Ok(s) => {
                        let _ = writeln!(out, "{:<28} {:<15} {:<12} {}", s.header.name, kind_name(&s), medium_name(&s), s.header.description);
                    }
                    Err(e) => {
                        let _ = writeln!(err, "{}: {e}", b.name);
                        return EXIT_CONFIG;
                    }
                }
            }
            EXIT_PASS
        }
        Command::Describe { name } => match find_bundled(&name).map(|b| b.load()) {
            Some(Ok(s)) => {
                let _ = write!(out, "{}", describe(&s));
                EXIT_PASS
            }
            Some(Err(e)) => {
                let _ = writeln!(err, "{name}: {e}");
                EXIT_CONFIG
            }
            None => {
                let known: Vec<&str> = bundled().iter().map(|b| b.name).collect();
                let _ = writeln!(err, "unknown scenario `{name}`; known: {}", known.join(", "));
                EXIT_CONFIG
            }
        },
        Command::Run { scenario, out_dir, tolerance_scale, seed } => {
            let out_dir = out_dir
                .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
            let opts = RunOptions { out_dir, tolerance_scale, seed };
            let report = load(&scenario).and_then(|s| run(&s, &opts));
            match report {
                Ok(r) => {
                    for c in &r.checks {
                        let _ = writeln!(out, "{}", c.line());
                    }
                    for f in &r.files {
                        let _ = writeln!(out, "wrote {}", f.display());
                    }
                    let ok = r.passed();
                    let _ = writeln!(out, "{} {}", if ok { "PASS" } else { "FAIL" }, r.scenario);
                    if ok { EXIT_PASS } else { EXIT_FAIL }
                }
                Err(e) => {
                    let _ = writeln!(err, "{e}");
                    error_code(&e)
                }
            }
        }
    }
}

fn kind_name(s: &Scenario) -> String {
    serde_json::to_value(s.header.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn medium_name(s: &Scenario) -> String {
    serde_json::to_value(s.header.medium).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

pub fn describe(s: &Scenario) -> String {
    let mut d = format!(
        "name: {}\nkind: {}\nmedium: {}\nlaw: {}\ndescription: {}\nchecks:\n",
        s.header.name,
        kind_name(s),
        medium_name(s),
        s.header.law,
        s.header.description
    );
    for c in s.checks() {
        d.push_str(&format!("  {} (tolerance {:e})\n", c.name(), c.tolerance()));
    }
    let outputs = s.outputs().declared();
    if !outputs.is_empty() {
        d.push_str("outputs:\n");
        for (k, v) in outputs {
            d.push_str(&format!("  {k}: {v}\n"));
        }
    }
    d
}
