//! Command-line front end: `table`, `eval`, `expand` and `verify`.
//!
//! Exit codes: 0 success, 1 a verified identity failed, 2 invalid input or
//! usage, 3 expression parse or evaluation error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::gfparse;
use crate::identities::{parse_ids, reports_to_csv, reports_to_json, Grid, Harness};
use crate::ring::{parse_rational, render_rational};
use crate::sequences::{
    changhee1_poly, changhee2_poly, euler_poly, Family, SequenceTable, Value,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// Effective settings after merging defaults, the config file and flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub n_max: usize,
    pub k_max: u32,
    /// `None` means `n_max + 4`.
    pub truncation: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n_max: 12,
            k_max: 6,
            truncation: None,
            format: Format::Json,
            out: None,
        }
    }
}

impl Config {
    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or(self.n_max + 4)
    }

    /// Reads `key = value` lines; `#` starts a comment.
    pub fn parse_file(text: &str) -> Result<Config, CliError> {
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| CliError::Usage(format!("config line {}: {what}", lineno + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let value = value.trim();
            let int = || value.parse::<usize>().map_err(|_| bad("expected a nonnegative integer"));
            match key.trim().replace('-', "_").as_str() {
                "n_max" => cfg.n_max = int()?,
                "k_max" => cfg.k_max = u32::try_from(int()?).map_err(|_| bad("k_max too large"))?,
                "truncation" => cfg.truncation = Some(int()?),
                "format" => cfg.format = value.parse().map_err(|e: String| bad(&e))?,
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.k_max == 0 {
            return Err(CliError::Usage("k must be at least 1".into()));
        }
        if self.truncation() < self.n_max {
            return Err(CliError::Usage(format!(
                "truncation {} is below n-max {}",
                self.truncation(),
                self.n_max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Expression(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Expression(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "changhee", version, about = "Exact Changhee, Euler and Stirling numbers and identity checks")]
struct Cli {
    /// key=value file with defaults for n_max, k_max, truncation, format, out
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a sequence table for n = 0..=n-max
    Table {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n_max: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Evaluate a polynomial family member at a rational x
    Eval {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the EGF coefficients a_0..a_N of a generating-function expression
    Expand {
        expr: String,
        /// Highest coefficient index N
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run identity checkers over the grid
    Verify {
        #[arg(long, default_value = "all")]
        ids: String,
        #[arg(long)]
        n_max: Option<usize>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long)]
        truncation: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Entry point for the binary.
pub fn main() -> ! {
    let code = run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code)
}

/// Runs one invocation and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, CliError> {
    match path {
        None => Ok(Config::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            Config::parse_file(&text)
        }
    }
}

fn apply_output(cfg: &mut Config, output: OutputArgs) {
    if let Some(f) = output.format {
        cfg.format = f;
    }
    if output.out.is_some() {
        cfg.out = output.out;
    }
}

fn emit(cfg: &Config, body: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut text = body.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cfg.out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => stdout.write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: PathBuf::from("<stdout>"),
            source,
        }),
    }
}

fn parse_family(name: &str) -> Result<Family, CliError> {
    name.parse().map_err(|e: crate::sequences::UnknownFamily| CliError::Usage(e.to_string()))
}

fn dispatch(cli: Cli, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let mut cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Table { family, k, n_max, output } => {
            apply_output(&mut cfg, output);
            let family = parse_family(&family)?;
            if k == 0 {
                return Err(CliError::Usage("k must be at least 1".into()));
            }
            let n_max = n_max.unwrap_or(cfg.n_max);
            let table = SequenceTable::compute(family, k, n_max);
            let body = match cfg.format {
                Format::Json => table.to_json(),
                Format::Csv => table.to_csv(),
            };
            emit(&cfg, &body, stdout)?;
            Ok(0)
        }
        Command::Eval { family, k, n, x, output } => {
            apply_output(&mut cfg, output);
            let family = parse_family(&family)?;
            if k == 0 {
                return Err(CliError::Usage("k must be at least 1".into()));
            }
            let at = parse_rational(&x).map_err(|e| CliError::Usage(e.to_string()))?;
            let poly = match family {
                Family::EulerPoly => euler_poly(n, k),
                Family::Changhee1Poly => changhee1_poly(n, k),
                Family::Changhee2Poly => changhee2_poly(n, k),
                number => {
                    return Err(CliError::Usage(format!(
                        "{number} is a number family; there is no x to evaluate"
                    )))
                }
            };
            let value = render_rational(&poly.eval(&at));
            let body = match cfg.format {
                Format::Json => json!({
                    "family": family.name(),
                    "k": k,
                    "n": n,
                    "x": render_rational(&at),
                    "value": value,
                })
                .to_string(),
                Format::Csv => format!("n,value\n{n},{value}"),
            };
            emit(&cfg, &body, stdout)?;
            Ok(0)
        }
        Command::Expand { expr, n, output } => {
            apply_output(&mut cfg, output);
            let order = n.unwrap_or(cfg.n_max);
            let series = gfparse::expand(&expr, order).map_err(|e| CliError::Expression(e.to_string()))?;
            let values: Vec<Value> = series
                .egf_coefficients()
                .into_iter()
                .map(|p| match p.as_constant() {
                    Some(c) => Value::Number(c),
                    None => Value::Poly(p),
                })
                .collect();
            let body = match cfg.format {
                Format::Json => json!({
                    "expr": expr,
                    "n": order,
                    "coefficients": values,
                })
                .to_string(),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["n", "value"]).expect("in-memory write");
                    for (i, v) in values.iter().enumerate() {
                        w.write_record([i.to_string(), v.render()]).expect("in-memory write");
                    }
                    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
                }
            };
            emit(&cfg, &body, stdout)?;
            Ok(0)
        }
        Command::Verify { ids, n_max, k_max, truncation, output } => {
            apply_output(&mut cfg, output);
            if let Some(n) = n_max {
                cfg.n_max = n;
            }
            if let Some(k) = k_max {
                cfg.k_max = k;
            }
            if truncation.is_some() {
                cfg.truncation = truncation;
            }
            cfg.validate()?;
            let ids = parse_ids(&ids).map_err(|e| CliError::Usage(e.to_string()))?;
            let grid = Grid {
                n_max: cfg.n_max,
                k_max: cfg.k_max,
            };
            let harness =
                Harness::new(grid, Some(cfg.truncation())).map_err(|e| CliError::Usage(e.to_string()))?;
            let reports = harness.verify_all(&ids);
            let body = match cfg.format {
                Format::Json => reports_to_json(&reports),
                Format::Csv => reports_to_csv(&reports),
            };
            emit(&cfg, &body, stdout)?;
            Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("changhee").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn table_examples() {
        let (code, out, _) = invoke(&["table", "--family", "changhee1-number", "--k", "1", "--n-max", "3"]);
        assert_eq!(code, 0);
        assert_eq!(
            out,
            "{\"family\":\"changhee1-number\",\"k\":1,\"values\":[\"1\",\"-1/2\",\"1/2\",\"-3/4\"]}\n"
        );
        let (_, out, _) = invoke(&["table", "--family", "euler-number", "--k", "1", "--n-max", "0"]);
        assert!(out.contains("\"values\":[\"1\"]"));
        let (_, out, _) = invoke(&[
            "table", "--family", "changhee2-number", "--k", "1", "--n-max", "2", "--format", "csv",
        ]);
        assert_eq!(out, "n,value\n0,1\n1,1/2\n2,-1/2\n");
    }

    #[test]
    fn table_rejects_bad_input() {
        let (code, _, err) = invoke(&["table", "--family", "bernoulli", "--k", "1"]);
        assert_eq!(code, 2);
        assert!(err.contains("unknown family"));
        assert_eq!(invoke(&["table", "--family", "euler-number", "--k", "0"]).0, 2);
        assert_eq!(invoke(&["table", "--family", "euler-number", "--k", "-1"]).0, 2);
    }

    #[test]
    fn eval_examples() {
        let value = |args: &[&str]| {
            let mut full = vec!["eval", "--format", "csv"];
            full.extend_from_slice(args);
            let (code, out, _) = invoke(&full);
            assert_eq!(code, 0);
            out.lines().nth(1).unwrap().split(',').nth(1).unwrap().to_string()
        };
        assert_eq!(value(&["--family", "changhee1-poly", "--k", "1", "--n", "1", "--x", "0"]), "-1/2");
        assert_eq!(value(&["--family", "changhee1-poly", "--k", "1", "--n", "1", "--x", "1/2"]), "0");
        assert_eq!(value(&["--family", "changhee2-poly", "--k", "1", "--n", "1", "--x", "-1/2"]), "0");
        let (code, _, _) = invoke(&["eval", "--family", "euler-number", "--k", "1", "--n", "1", "--x", "0"]);
        assert_eq!(code, 2);
        let (code, _, _) = invoke(&["eval", "--family", "euler-poly", "--k", "1", "--n", "1", "--x", "1/0"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn expand_examples() {
        let (code, out, _) = invoke(&["expand", "(2/(2+t))^2", "--n", "2"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["coefficients"], json!(["1", "-1", "3/2"]));
        let (_, out, _) = invoke(&["expand", "t", "--n", "1", "--format", "csv"]);
        assert_eq!(out, "n,value\n0,0\n1,1\n");
        let (code, _, err) = invoke(&["expand", "2/^t"]);
        assert_eq!(code, 3);
        assert!(err.contains("offset 2"), "{err}");
        let (code, _, _) = invoke(&["expand", "1/t", "--n", "2"]);
        assert_eq!(code, 3);
        let (_, out, _) = invoke(&["expand", "(1+t)^x", "--n", "1"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["coefficients"], json!(["1", ["0", "1"]]));
    }

    #[test]
    fn verify_examples() {
        let (code, out, _) = invoke(&["verify", "--ids", "thm1", "--n-max", "0", "--k-max", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"verdict\": \"pass\""));
        let (code, _, err) = invoke(&["verify", "--ids", "nosuch"]);
        assert_eq!(code, 2);
        assert!(err.contains("nosuch"));
        assert_eq!(invoke(&["verify", "--n-max", "8", "--truncation", "4"]).0, 2);
        assert_eq!(invoke(&["verify", "--k-max", "0"]).0, 2);
    }

    #[test]
    fn config_file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("grid.conf");
        fs::write(&path, "# grid\nn_max = 2\nk-max=1\nformat = csv\n").unwrap();
        let p = path.to_str().unwrap();
        let (code, out, _) = invoke(&["verify", "--config", p, "--ids", "thm2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "id,verdict,n_max,k_max,witness_n,witness_k,lhs,rhs\nthm2,pass,2,1,,,,\n");
        let (_, out, _) = invoke(&["verify", "--config", p, "--ids", "thm2", "--k-max", "2", "--format", "json"]);
        assert!(out.contains("\"k_max\": 2"));
        fs::write(&path, "colour = blue\n").unwrap();
        assert_eq!(invoke(&["verify", "--config", p]).0, 2);
        assert_eq!(invoke(&["verify", "--config", "/nonexistent/file"]).0, 2);
    }

    #[test]
    fn out_flag_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let (code, out, _) = invoke(&[
            "table", "--family", "euler-number", "--k", "2", "--n-max", "2", "--format", "csv", "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        assert_eq!(fs::read_to_string(path).unwrap(), "n,value\n0,1\n1,-1\n2,1/2\n");
    }

    #[test]
    fn csv_and_json_share_rational_strings() {
        for family in ["changhee2-poly", "euler-number"] {
            let (_, json_out, _) = invoke(&["table", "--family", family, "--k", "3", "--n-max", "5"]);
            let (_, csv_out, _) = invoke(&["table", "--family", family, "--k", "3", "--n-max", "5", "--format", "csv"]);
            let v: serde_json::Value = serde_json::from_str(&json_out).unwrap();
            let mut rdr = csv::Reader::from_reader(csv_out.as_bytes());
            for (row, expected) in rdr.records().zip(v["values"].as_array().unwrap()) {
                let row = row.unwrap();
                let rendered = match expected {
                    serde_json::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                assert_eq!(&row[1], rendered);
            }
        }
    }

    #[test]
    fn output_is_deterministic() {
        let args = ["verify", "--ids", "thm3,eq37", "--n-max", "5", "--k-max", "3"];
        assert_eq!(invoke(&args), invoke(&args));
    }
}
