use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use eigenwkb::harness::{
    self, Config, Experiment, LoadedScenario, ScenarioConfig, ScenarioSource, BITS_ENV, DEFAULT_BITS,
};
use eigenwkb::series::SeriesTables;
use eigenwkb::{BigComplex, BranchContext, PolyJson, Scalar};

#[derive(Parser, Debug)]
#[command(name = "eigenwkb", version, about = "Eigenpolynomials of exactly solvable operators and their asymptotics")]
struct Cli {
    /// Working precision in bits [default: 512, or the config's value for run-all].
    #[arg(long, global = true, env = BITS_ENV, value_parser = clap::value_parser!(u32).range(53..))]
    bits: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalue and monic eigenpolynomial of degree n, exactly.
    Solve {
        #[command(flatten)]
        op: OpArgs,
        #[arg(short, long)]
        n: usize,
        /// Exact rational back-substitution, or big-float after rounding the coefficients.
        #[arg(long, value_enum, default_value_t = Mode::Rational)]
        mode: Mode,
        /// Write the JSON here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Branch value w_1, b_1, Phi0, Phi1 and optionally the predictor at z.
    Phi {
        #[command(flatten)]
        op: OpArgs,
        /// Point as `re,im` or `re`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Also evaluate the predictor at this degree.
        #[arg(short, long)]
        n: Option<usize>,
        /// Print only Phi0 (0) or Phi1 (1).
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
        order: Option<u8>,
    },
    /// Coefficient tables gamma, q and h of the 1/n expansion.
    Series {
        #[command(flatten)]
        op: OpArgs,
        #[arg(long, default_value_t = eigenwkb::series::DEFAULT_ORDER)]
        order: usize,
    },
    /// Q_{n+1}(z)/Q_n(z) against exp(Phi0(z)).
    RatioTest(GridArgs),
    /// Q_n(z) against the strong-asymptotics predictor.
    StrongAsym(GridArgs),
    /// n (Q_n/predictor - 1) along a doubling ladder.
    C1(GridArgs),
    /// Logarithmic derivatives of Q_n against powers of w_1.
    Cauchy(GridArgs),
    /// Zeros of Q_n for the largest n on the grid.
    Zeros(GridArgs),
    /// Run every scenario of a config file.
    RunAll {
        #[arg(long)]
        config: PathBuf,
        /// Output directory for the CSV tables and manifest.json.
        #[arg(long, default_value = "eigenwkb-out")]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Rational,
    Float,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Legendre2,
    Jacobi4,
    MassonShapiro,
}

#[derive(Args, Debug)]
struct OpArgs {
    /// Built-in operator family.
    #[arg(long, value_enum, conflicts_with = "op")]
    family: Option<Family>,
    /// Parameter c of the jacobi4 family.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    c: String,
    /// Coefficients of P for masson-shapiro, constant term first.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    p: Vec<String>,
    /// Operator JSON file.
    #[arg(long)]
    op: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[command(flatten)]
    op: OpArgs,
    /// Degrees.
    #[arg(short, long = "n", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Points as `re,im`; repeat for several.
    #[arg(long, required = true, allow_hyphen_values = true)]
    z: Vec<String>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_point(s: &str) -> Result<[String; 2]> {
    let mut it = s.split(',').map(str::trim);
    let re = it.next().filter(|x| !x.is_empty()).context("empty point")?;
    let im = it.next().unwrap_or("0");
    if it.next().is_some() {
        bail!("point {s:?} has more than two parts");
    }
    Ok([re.to_string(), im.to_string()])
}

impl OpArgs {
    fn source(&self) -> Result<ScenarioSource> {
        Ok(match (self.family, &self.op) {
            (_, Some(file)) => ScenarioSource::Custom { file: file.clone() },
            (Some(Family::Legendre2), None) => ScenarioSource::Legendre2,
            (Some(Family::Jacobi4), None) => ScenarioSource::Jacobi4 { c: self.c.clone() },
            (Some(Family::MassonShapiro), None) => {
                if self.p.is_empty() {
                    bail!("--family masson-shapiro needs --p");
                }
                ScenarioSource::MassonShapiro {
                    p: PolyJson {
                        coeffs: self.p.iter().map(|c| [c.trim().to_string(), "0".into()]).collect(),
                    },
                }
            }
            (None, None) => bail!("choose an operator with --family or --op"),
        })
    }

    fn load(&self, bits: u32, n_grid: Vec<usize>, z_grid: Vec<[String; 2]>, order: usize) -> Result<LoadedScenario> {
        let config = Config {
            precision: Some(bits),
            scenarios: vec![ScenarioConfig {
                source: self.source()?,
                name: None,
                n_grid,
                z_grid,
                precision: Some(bits),
                order: Some(order),
                experiments: None,
            }],
            thresholds: Vec::new(),
        };
        Ok(config.load(Path::new("."), None)?.remove(0))
    }
}

fn parts<S: Scalar>(x: &S) -> [String; 2] {
    let (re, im) = x.format_parts();
    [re, im]
}

fn print_json(v: &Value) -> Result<()> {
    write_json(io::stdout().lock(), v)
}

fn write_json<W: Write>(mut out: W, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn run_grid(exp: Experiment, args: &GridArgs, bits: u32) -> Result<()> {
    let z_grid = args.z.iter().map(|s| parse_point(s)).collect::<Result<Vec<_>>>()?;
    let loaded = args.op.load(bits, args.n.clone(), z_grid, eigenwkb::series::DEFAULT_ORDER)?;
    let sc = &loaded.scenario;
    let rows = match exp {
        Experiment::Ratio => harness::run_ratio_test(sc)?,
        Experiment::Strong => harness::run_strong_asym(sc)?,
        Experiment::C1 => harness::run_c1_extraction(sc)?,
        Experiment::Cauchy => harness::run_cauchy_transform(sc)?,
        Experiment::Zeros => {
            let zm = harness::run_zero_map(sc)?;
            eprintln!(
                "{}",
                json!({
                    "scenario": zm.scenario,
                    "n": zm.n,
                    "count": zm.zeros.len(),
                    "max_hull_distance": zm.max_hull_distance,
                    "hausdorff": zm.hausdorff,
                })
            );
            zm.rows
        }
    };
    match &args.out {
        Some(path) => harness::write_csv(std::fs::File::create(path)?, &rows)?,
        None => harness::write_csv(io::stdout().lock(), &rows)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let bits = cli.bits.unwrap_or(DEFAULT_BITS);
    match &cli.command {
        Command::Solve { op, n, mode, out } => {
            let loaded = op.load(bits, vec![], vec![], 1)?;
            let v = match mode {
                Mode::Rational => {
                    let pair = loaded.scenario.op.eigenpoly(*n)?;
                    json!({"n": pair.n, "lambda": parts(&pair.lambda), "q": PolyJson::from_poly(&pair.q)})
                }
                Mode::Float => {
                    let pair = loaded.scenario.op.to_big(bits).eigenpoly(*n)?;
                    json!({"n": pair.n, "lambda": parts(&pair.lambda), "q": PolyJson::from_poly(&pair.q)})
                }
            };
            match out {
                Some(path) => write_json(std::fs::File::create(path)?, &v)?,
                None => print_json(&v)?,
            }
        }
        Command::Phi { op, z, n, order } => {
            let point = parse_point(z)?;
            let loaded = op.load(bits, vec![], vec![point], 1)?;
            let sc = &loaded.scenario;
            let ctx = BranchContext::new(&sc.op, bits)?;
            let z: &BigComplex = &sc.z_grid[0];
            let phi0 = ctx.phi0(z)?;
            let phi1 = ctx.phi1(z)?;
            if let Some(k) = order {
                let p = if *k == 0 { &phi0 } else { &phi1 };
                print_json(&json!({"z": parts(z), "order": k, "value": parts(&p.value), "error": p.error}))?;
                return Ok(ExitCode::SUCCESS);
            }
            let mut v = json!({
                "z": parts(z),
                "kappa": parts(ctx.kappa()),
                "w1": parts(&ctx.w(1, z)?),
                "b1": parts(&ctx.b1(z)?),
                "phi0": {"value": parts(&phi0.value), "error": phi0.error},
                "phi1": {"value": parts(&phi1.value), "error": phi1.error},
            });
            if let Some(n) = n {
                let pred = eigenwkb::Predictor {
                    phi0,
                    phi1,
                    kappa: ctx.kappa().clone(),
                };
                v["n"] = json!(n);
                v["predictor"] = json!(parts(&pred.at(*n)));
            }
            print_json(&v)?;
        }
        Command::Series { op, order } => {
            let loaded = op.load(bits, vec![], vec![], *order)?;
            let tables = SeriesTables::build(&loaded.scenario.op, *order)?;
            print_json(&serde_json::to_value(tables.to_json())?)?;
        }
        Command::RatioTest(a) => run_grid(Experiment::Ratio, a, bits)?,
        Command::StrongAsym(a) => run_grid(Experiment::Strong, a, bits)?,
        Command::C1(a) => run_grid(Experiment::C1, a, bits)?,
        Command::Cauchy(a) => run_grid(Experiment::Cauchy, a, bits)?,
        Command::Zeros(a) => run_grid(Experiment::Zeros, a, bits)?,
        Command::RunAll { config, out } => {
            let report = harness::run_all_with(config, out, cli.bits)?;
            for t in &report.thresholds {
                let th = &t.threshold;
                let value = t.value.map_or("no rows".to_string(), |v| format!("{v:e}"));
                println!(
                    "{} {} scenario={} n={} {} = {} (max {:e})",
                    if t.passed { "PASS" } else { "FAIL" },
                    th.experiment,
                    th.scenario.as_deref().unwrap_or("*"),
                    th.n.map_or("*".to_string(), |n| n.to_string()),
                    serde_json::to_value(th.metric)?.as_str().unwrap_or_default(),
                    value,
                    th.max
                );
            }
            println!("wrote {}", out.display());
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
