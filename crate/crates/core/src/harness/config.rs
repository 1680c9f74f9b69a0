//! JSON run configuration, the `run_all` driver and its manifest.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha1::{Digest, Sha1};

use crate::error::{Error, Result};
use crate::operator::ExactlySolvableOperator;
use crate::poly::PolyJson;
use crate::scalar::{parse_rational, BigComplex, QComplex, Scalar};
use crate::series::DEFAULT_ORDER;

use super::experiments::{
    run_c1_extraction, run_cauchy_transform, run_ratio_test, run_strong_asym, run_zero_map, ZeroMap,
};
use super::scenario::{build_masson_shapiro, jacobi4, legendre2, Scenario, ScenarioKind};
use super::{precision_override, write_csv, ResultRow};

/// Working precision when neither the config nor the environment sets one.
pub const DEFAULT_BITS: u32 = 512;

/// Environment variable that overrides every precision in a config.
pub const BITS_ENV: &str = "EIGENWKB_BITS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    Ratio,
    Strong,
    C1,
    Cauchy,
    Zeros,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::Ratio,
        Experiment::Strong,
        Experiment::C1,
        Experiment::Cauchy,
        Experiment::Zeros,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Ratio => "ratio",
            Experiment::Strong => "strong",
            Experiment::C1 => "c1",
            Experiment::Cauchy => "cauchy",
            Experiment::Zeros => "zeros",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which operator a config entry names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioSource {
    Legendre2,
    /// `c` is a decimal or `p/q` string.
    Jacobi4 { c: String },
    MassonShapiro { p: PolyJson },
    /// Path to an operator JSON file, relative to the config file.
    Custom { file: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(flatten)]
    pub source: ScenarioSource,
    #[serde(default)]
    pub name: Option<String>,
    pub n_grid: Vec<usize>,
    /// Points as `[re, im]` decimal or `p/q` strings.
    pub z_grid: Vec<[String; 2]>,
    #[serde(default)]
    pub precision: Option<u32>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub experiments: Option<Vec<Experiment>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Largest `rel_error` over the matching rows.
    #[default]
    RelError,
    /// Largest distance from a zero to the hull.
    HullDistance,
    /// Hausdorff distance between the zeros and the hull.
    Hausdorff,
}

/// An upper bound on a metric over the rows of one experiment, optionally
/// restricted to one scenario label and one degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub experiment: Experiment,
    #[serde(default)]
    pub scenario: Option<String>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub metric: Metric,
    pub max: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Config {
    #[serde(default)]
    pub precision: Option<u32>,
    #[serde(default)]
    pub scenarios: Vec<ScenarioConfig>,
    #[serde(default)]
    pub thresholds: Vec<Threshold>,
}

/// Git blob id: SHA-1 of `"blob <len>\0"` followed by the bytes.
pub fn blob_hash(bytes: &[u8]) -> String {
    let mut h = Sha1::new();
    h.update(format!("blob {}\0", bytes.len()).as_bytes());
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// A scenario ready to run, with the provenance of its operator.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub experiments: Vec<Experiment>,
    pub operator_file: Option<PathBuf>,
    pub operator_hash: String,
}

impl Config {
    /// Parse config text; errors name the line and column or the field.
    pub fn parse(text: &str) -> Result<Config> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Config> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Config::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display()).replace("config error: ", "")))
    }

    /// Build every scenario. `base` resolves relative operator files;
    /// `bits_override` replaces every precision when set.
    pub fn load(&self, base: &Path, bits_override: Option<u32>) -> Result<Vec<LoadedScenario>> {
        let mut out = Vec::new();
        for (i, sc) in self.scenarios.iter().enumerate() {
            let at = |msg: String| Error::Config(format!("scenarios[{i}]: {msg}"));
            let (kind, op, default_name, file, hash) = match &sc.source {
                ScenarioSource::Legendre2 => {
                    let op = legendre2();
                    let h = operator_hash(&op);
                    (ScenarioKind::Legendre2, op, "legendre2".to_string(), None, h)
                }
                ScenarioSource::Jacobi4 { c } => {
                    let c = parse_rational(c).map_err(|e| at(format!("field c: {e}")))?;
                    let op = jacobi4(&c);
                    let h = operator_hash(&op);
                    (ScenarioKind::Jacobi4 { c: c.clone() }, op, format!("jacobi4(c={c})"), None, h)
                }
                ScenarioSource::MassonShapiro { p } => {
                    let p = p.to_poly::<QComplex>(()).map_err(|e| at(format!("field p: {e}")))?;
                    let op = build_masson_shapiro(&p).map_err(|e| at(format!("field p: {e}")))?;
                    let h = operator_hash(&op);
                    (ScenarioKind::MassonShapiro { p: p.clone() }, op, format!("masson_shapiro({p})"), None, h)
                }
                ScenarioSource::Custom { file } => {
                    let path = base.join(file);
                    let bytes = fs::read(&path).map_err(|e| at(format!("field file: {}: {e}", path.display())))?;
                    let text = String::from_utf8_lossy(&bytes);
                    let op = ExactlySolvableOperator::<QComplex>::from_json_str(&text, ())
                        .map_err(|e| at(format!("field file: {}: {e}", path.display())))?;
                    let stem = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    (
                        ScenarioKind::Custom { file: file.clone() },
                        op,
                        format!("custom({stem})"),
                        Some(path),
                        blob_hash(&bytes),
                    )
                }
            };
            let precision = bits_override.or(sc.precision).or(self.precision).unwrap_or(DEFAULT_BITS);
            if precision < 53 {
                return Err(at(format!("precision {precision} is below 53 bits")));
            }
            let mut z_grid = Vec::with_capacity(sc.z_grid.len());
            for (k, [re, im]) in sc.z_grid.iter().enumerate() {
                let q = QComplex::parse_parts(re, im, ()).map_err(|e| at(format!("z_grid[{k}]: {e}")))?;
                z_grid.push(q.to_big(precision));
            }
            let name = sc.name.clone().unwrap_or(default_name);
            let scenario = Scenario::new(
                name,
                kind,
                op,
                sc.n_grid.clone(),
                z_grid,
                precision,
                sc.order.unwrap_or(DEFAULT_ORDER),
            )
            .map_err(|e| at(e.to_string().replace("config error: ", "")))?;
            out.push(LoadedScenario {
                scenario,
                experiments: sc.experiments.clone().unwrap_or_else(|| Experiment::ALL.to_vec()),
                operator_file: file,
                operator_hash: hash,
            });
        }
        Ok(out)
    }
}

fn operator_hash(op: &ExactlySolvableOperator<QComplex>) -> String {
    let text = serde_json::to_string(&op.to_json()).expect("serializable");
    blob_hash(text.as_bytes())
}

/// Result of checking one threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdOutcome {
    pub threshold: Threshold,
    /// `None` when no row matched.
    pub value: Option<f64>,
    pub passed: bool,
}

/// Everything `run_all` produced.
#[derive(Clone, Debug)]
pub struct Report {
    pub rows: Vec<(Experiment, Vec<ResultRow>)>,
    pub zero_maps: Vec<ZeroMap>,
    pub thresholds: Vec<ThresholdOutcome>,
    pub manifest: Value,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.thresholds.iter().all(|t| t.passed)
    }
}

fn check(t: &Threshold, rows: &[(Experiment, Vec<ResultRow>)], zero_maps: &[ZeroMap]) -> ThresholdOutcome {
    let scenario_ok = |s: &str| t.scenario.as_deref().is_none_or(|want| want == s);
    let n_ok = |n: usize| t.n.is_none_or(|want| want == n);
    let values: Vec<f64> = match t.metric {
        Metric::RelError => rows
            .iter()
            .filter(|(e, _)| *e == t.experiment)
            .flat_map(|(_, rs)| rs.iter())
            .filter(|r| scenario_ok(&r.scenario) && n_ok(r.n))
            .map(|r| r.rel_error().unwrap_or(f64::INFINITY))
            .collect(),
        Metric::HullDistance | Metric::Hausdorff => zero_maps
            .iter()
            .filter(|z| t.experiment == Experiment::Zeros && scenario_ok(&z.scenario) && n_ok(z.n))
            .map(|z| match t.metric {
                Metric::HullDistance => z.max_hull_distance,
                _ => z.hausdorff.unwrap_or(f64::INFINITY),
            })
            .collect(),
    };
    let value = values.into_iter().reduce(f64::max);
    let passed = value.is_some_and(|v| v <= t.max);
    ThresholdOutcome {
        threshold: t.clone(),
        value,
        passed,
    }
}

fn parts(z: &BigComplex) -> [String; 2] {
    let (re, im) = z.format_parts();
    [re, im]
}

/// Run every scenario of the config at `config_path`, writing one CSV per
/// experiment and `manifest.json` into `out_dir`. The precision can be
/// overridden through the environment variable [`BITS_ENV`].
pub fn run_all(config_path: &Path, out_dir: &Path) -> Result<Report> {
    run_all_with(config_path, out_dir, precision_override()?)
}

/// As [`run_all`], with an explicit precision override.
pub fn run_all_with(config_path: &Path, out_dir: &Path, bits_override: Option<u32>) -> Result<Report> {
    let text = fs::read(config_path).map_err(|e| Error::Config(format!("{}: {e}", config_path.display())))?;
    let config = Config::from_file(config_path)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let loaded = config.load(base, bits_override)?;
    fs::create_dir_all(out_dir)?;

    let mut rows: Vec<(Experiment, Vec<ResultRow>)> = Vec::new();
    let mut zero_maps = Vec::new();
    let mut outputs = Vec::new();
    for exp in Experiment::ALL {
        let wanted: Vec<&LoadedScenario> = loaded.iter().filter(|l| l.experiments.contains(&exp)).collect();
        if wanted.is_empty() {
            continue;
        }
        let start = Instant::now();
        let mut all = Vec::new();
        for l in wanted {
            info!("{exp}: {}", l.scenario.name);
            let sc = &l.scenario;
            match exp {
                Experiment::Ratio => all.extend(run_ratio_test(sc)?),
                Experiment::Strong => all.extend(run_strong_asym(sc)?),
                Experiment::C1 => all.extend(run_c1_extraction(sc)?),
                Experiment::Cauchy => all.extend(run_cauchy_transform(sc)?),
                Experiment::Zeros => {
                    let zm = run_zero_map(sc)?;
                    all.extend(zm.rows.iter().cloned());
                    zero_maps.push(zm);
                }
            }
        }
        let file = format!("{exp}.csv");
        write_csv(fs::File::create(out_dir.join(&file))?, &all)?;
        outputs.push(json!({
            "experiment": exp,
            "file": file,
            "rows": all.len(),
            "wall_seconds": start.elapsed().as_secs_f64(),
        }));
        rows.push((exp, all));
    }

    let thresholds: Vec<ThresholdOutcome> = config.thresholds.iter().map(|t| check(t, &rows, &zero_maps)).collect();

    let scenarios: Vec<Value> = loaded
        .iter()
        .map(|l| {
            let sc = &l.scenario;
            json!({
                "name": sc.name,
                "precision": sc.precision,
                "order": sc.order,
                "n_grid": sc.n_grid,
                "z_grid": sc.z_grid.iter().map(parts).collect::<Vec<_>>(),
                "experiments": l.experiments,
                "operator": sc.op.to_json(),
                "operator_file": l.operator_file.as_ref().map(|p| p.display().to_string()),
                "operator_sha1": l.operator_hash,
            })
        })
        .collect();
    let zeros: Vec<Value> = zero_maps
        .iter()
        .map(|z| {
            json!({
                "scenario": z.scenario,
                "n": z.n,
                "count": z.zeros.len(),
                "max_hull_distance": z.max_hull_distance,
                "hausdorff": z.hausdorff,
                "moments": z.moments.iter().map(parts).collect::<Vec<_>>(),
            })
        })
        .collect();
    let aux: Vec<Value> = rows
        .iter()
        .flat_map(|(e, rs)| rs.iter().map(move |r| (e, r)))
        .filter(|(_, r)| !r.aux.is_empty())
        .map(|(e, r)| {
            json!({
                "experiment": e,
                "scenario": r.scenario,
                "n": r.n,
                "z": parts(&r.z),
                "values": r.aux,
            })
        })
        .collect();
    let manifest = json!({
        "config": config_path.display().to_string(),
        "config_sha1": blob_hash(&text),
        "precision_override": bits_override,
        "scenarios": scenarios,
        "outputs": outputs,
        "zeros": zeros,
        "aux": aux,
        "thresholds": thresholds,
    });
    fs::write(
        out_dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest).expect("serializable"),
    )?;
    Ok(Report {
        rows,
        zero_maps,
        thresholds,
        manifest,
    })
}
