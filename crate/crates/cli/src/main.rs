use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bloch_kit::diagnostics::{
    difference_compactness, power_sequence, single_compactness_bloch, single_compactness_hinf,
};
use bloch_kit::norms::{combination_norm, GridSpec, NormKind};
use bloch_kit::report::{self, load_config, ConfigError, Format, RunConfig, TermValidation};
use bloch_kit::symbols::{parse_complex, Symbol, SymbolError};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "bloch-kit",
    version,
    about = "Compactness diagnostics for linear combinations of composition operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Norm: bloch or hinf.
    #[arg(long, global = true)]
    norm: Option<NormKind>,
    #[arg(long, global = true)]
    nmax: Option<u32>,
    /// Zero threshold for sequence limits and sampled residuals.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Grid as LEVELSxANGLES, e.g. 30x512.
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated formats: json, csv, plot.
    #[arg(long, global = true, value_delimiter = ',')]
    format: Vec<Format>,
    /// A term LAMBDA:SYMBOL, e.g. `-1+0.5i:sigma(0.3)`; repeatable.
    #[arg(long = "term", global = true, allow_hyphen_values = true)]
    terms: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Check that symbols are self-maps of the disk.
    Validate { symbols: Vec<String> },
    /// Norm of `Σ λ_i φ_i^n` for one `n`.
    Norm {
        symbols: Vec<String>,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// The sequence `s_n = ‖Σ λ_i φ_i^n‖` and its verdict.
    PowerSeq { symbols: Vec<String> },
    /// Compactness of a single composition operator.
    Compactness { symbol: String },
    /// Compactness of `C_φ - C_ψ` on the Bloch space.
    Difference { phi: String, psi: String },
    /// The full pipeline.
    FullReport { symbols: Vec<String> },
}

#[derive(Debug)]
enum CliError {
    Config(String),
    SelfMap(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::SelfMap(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::SelfMap(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::InvalidSelfMap { .. } => CliError::SelfMap(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn symbol(text: &str) -> Result<Symbol, CliError> {
    Symbol::parse(text).map_err(|e| match e {
        SymbolError::InvalidSelfMap { .. } => CliError::SelfMap(format!("{text}: {e}")),
        _ => CliError::Config(format!("{text}: {e}")),
    })
}

fn parse_grid(text: &str) -> Result<GridSpec, CliError> {
    let bad = || CliError::Config(format!("--grid: expected LEVELSxANGLES, got `{text}`"));
    let (l, a) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let levels = l.trim().parse().map_err(|_| bad())?;
    let angles = a.trim().parse().map_err(|_| bad())?;
    Ok(GridSpec { levels, angles, ..GridSpec::default() })
}

fn parse_term(text: &str) -> Result<(Complex64, String), CliError> {
    let (l, s) = text
        .split_once(':')
        .ok_or_else(|| CliError::Config(format!("--term: expected LAMBDA:SYMBOL, got `{text}`")))?;
    let lambda = parse_complex(l.trim()).map_err(|e| CliError::Config(format!("--term {text}: {e}")))?;
    Ok((lambda, s.trim().to_string()))
}

/// Config file, `--term`s or positional symbols (scalar 1), then flag overrides.
fn build_config(common: &Common, symbols: &[String]) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) if common.terms.is_empty() && symbols.is_empty() => load_config(path)?,
        Some(_) => return Err(CliError::Config("give either --config or terms, not both".into())),
        None => {
            let mut terms = common.terms.iter().map(|t| parse_term(t)).collect::<Result<Vec<_>, _>>()?;
            terms.extend(symbols.iter().map(|s| (Complex64::new(1.0, 0.0), s.clone())));
            if terms.is_empty() {
                return Err(CliError::Config("no symbols given (use --config, --term or positional symbols)".into()));
            }
            RunConfig::with_terms(terms)
        }
    };
    if let Some(n) = common.norm {
        cfg.norm = n;
    }
    if let Some(n) = common.nmax {
        cfg.n_max = n;
    }
    if let Some(t) = common.tol {
        cfg.thresholds.tol_zero = t;
        cfg.tolerances.tol_zero = t;
    }
    if let Some(g) = &common.grid {
        cfg.grid = parse_grid(g)?;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(o) = &common.out {
        cfg.output.dir = Some(o.clone());
    }
    if !common.format.is_empty() {
        cfg.output.formats = common.format.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_out(dir: Option<&Path>, name: &str, text: &str) -> Result<(), CliError> {
    match dir {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(d) => {
            std::fs::create_dir_all(d).map_err(|e| CliError::Io(format!("{}: {e}", d.display())))?;
            let path = d.join(name);
            std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| CliError::Numeric(e.to_string()))
}

fn finite(values: &[f64]) -> Result<(), CliError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(CliError::Numeric(format!("non-finite norm at n = {}", i + 1))),
        None => Ok(()),
    }
}

fn validate(common: &Common, symbols: &[String]) -> Result<(), CliError> {
    let terms: Vec<(Complex64, String)> = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let cfg: RunConfig = toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
            cfg.combination.into_iter().map(|t| (t.lambda, t.symbol)).collect()
        }
        None => {
            let mut t = common.terms.iter().map(|t| parse_term(t)).collect::<Result<Vec<_>, _>>()?;
            t.extend(symbols.iter().map(|s| (Complex64::new(1.0, 0.0), s.clone())));
            t
        }
    };
    if terms.is_empty() {
        return Err(CliError::Config("no symbols given".into()));
    }
    let mut out = Vec::new();
    let mut worst: Option<CliError> = None;
    for (index, (_, text)) in terms.iter().enumerate() {
        let (report, error) = match symbol(text) {
            Ok(s) => (Some(s.validation().clone()), None),
            Err(e) => {
                let msg = e.message().to_string();
                if worst.as_ref().is_none_or(|w| w.code() < e.code()) {
                    worst = Some(e);
                }
                (None, Some(msg))
            }
        };
        out.push(TermValidation { index, symbol: text.clone(), report, error });
    }
    write_out(common.out.as_deref(), "validation.json", &json(&out)?)?;
    worst.map_or(Ok(()), Err)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let common = &cli.common;
    match &cli.command {
        Command::Validate { symbols } => validate(common, symbols),
        Command::Norm { symbols, power } => {
            let cfg = build_config(common, symbols)?;
            let spec = cfg.spec()?;
            let est = combination_norm(&spec, *power, cfg.norm, &cfg.grid);
            finite(&[est.value])?;
            write_out(cfg.output.dir.as_deref(), "norm.json", &json(&est)?)
        }
        Command::PowerSeq { symbols } => {
            let cfg = build_config(common, symbols)?;
            let spec = cfg.spec()?;
            let seq = power_sequence(&spec, cfg.norm, cfg.n_max, &cfg.grid, &cfg.thresholds);
            finite(&seq.values)?;
            if common.format.contains(&Format::Csv) {
                let mut text = String::from("n,s_n\n");
                for (i, s) in seq.values.iter().enumerate() {
                    text.push_str(&format!("{},{s:.16e}\n", i + 1));
                }
                write_out(cfg.output.dir.as_deref(), "s_n.csv", &text)?;
            }
            if common.format.is_empty() || common.format.contains(&Format::Json) {
                write_out(cfg.output.dir.as_deref(), "power_seq.json", &json(&seq)?)?;
            }
            Ok(())
        }
        Command::Compactness { symbol: text } => {
            let cfg = build_config(common, std::slice::from_ref(text))?;
            let phi = symbol(text)?;
            let body = match cfg.norm {
                NormKind::Bloch => {
                    let r = single_compactness_bloch(&phi, &cfg.params());
                    finite(&r.power.values)?;
                    json(&r)?
                }
                NormKind::SupNorm => {
                    let seq = power_sequence(&cfg.spec()?, NormKind::SupNorm, cfg.n_max, &cfg.grid, &cfg.thresholds);
                    finite(&seq.values)?;
                    let h = single_compactness_hinf(&phi, &cfg.grid);
                    json(&serde_json::json!({ "power": seq, "range": h }))?
                }
            };
            write_out(cfg.output.dir.as_deref(), "compactness.json", &body)
        }
        Command::Difference { phi, psi } => {
            let cfg = build_config(common, &[phi.clone(), psi.clone()])?;
            let r = difference_compactness(&symbol(phi)?, &symbol(psi)?, &cfg.params());
            finite(&r.power.values)?;
            write_out(cfg.output.dir.as_deref(), "difference.json", &json(&r)?)
        }
        Command::FullReport { symbols } => {
            let cfg = build_config(common, symbols)?;
            let rep = report::run(&cfg);
            match &cfg.output.dir {
                None => print!("{}", report::json_string(&rep).map_err(|e| CliError::Io(e.to_string()))?),
                Some(dir) => {
                    for &f in &cfg.output.formats {
                        for p in report::emit(&rep, f, dir).map_err(|e| CliError::Io(e.to_string()))? {
                            eprintln!("wrote {}", p.display());
                        }
                    }
                }
            }
            if rep.numeric_failure() {
                return Err(CliError::Numeric("non-finite values in the power sequence".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
