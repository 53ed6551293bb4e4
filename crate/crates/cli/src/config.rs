//! Run configuration shared by every command.
//!
//! Flags and JSON config keys are the same names (`--value-column` and
//! `"value-column"`). A config file supplies values, flags override them and
//! command defaults fill the rest. The effective result is written to
//! `run_manifest.json`, which is itself a valid config file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};
use crate::ingest::IngestSpec;

pub const MANIFEST_FILE: &str = "run_manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    /// Input CSV file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Timestamp column of the input CSV.
    #[arg(long)]
    pub time_column: Option<String>,
    /// Value column of the input CSV.
    #[arg(long)]
    pub value_column: Option<String>,
    /// Optional group column; values are summed per timestamp across groups.
    #[arg(long)]
    pub group_column: Option<String>,
    /// Fitted model JSON written by `fit`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// ARIMA order as `p,d,q`.
    #[arg(long)]
    pub order: Option<String>,
    /// Orders for the order sweep, separated by `;` (e.g. `1,1,1;2,1,2`).
    #[arg(long)]
    pub orders: Option<String>,
    /// Grid range for p, e.g. `0..3`.
    #[arg(long)]
    pub p: Option<String>,
    /// Grid range for d, e.g. `0..2`.
    #[arg(long)]
    pub d: Option<String>,
    /// Grid range for q, e.g. `0..3`.
    #[arg(long)]
    pub q: Option<String>,
    /// AR coefficients for `simulate`, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub ar: Option<String>,
    /// MA coefficients for `simulate`, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub ma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub intercept: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Number of points to simulate.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Moving-median window for gap filling (odd, >= 3).
    #[arg(long)]
    pub window: Option<usize>,
    /// Seasonal period for decomposition.
    #[arg(long)]
    pub period: Option<usize>,
    /// Mask points further than this many robust standard deviations from the median.
    #[arg(long)]
    pub outlier_k: Option<f64>,
    /// Min-max scale the preprocessed series.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub normalize: Option<bool>,
    /// Differencing passes applied by `preprocess`.
    #[arg(long)]
    pub difference: Option<usize>,
    /// Series sizes for the size sweep, comma separated.
    #[arg(long)]
    pub sizes: Option<String>,
    /// Series size for strong scaling and the order sweep.
    #[arg(long)]
    pub size: Option<usize>,
    /// Per-worker series size for weak scaling.
    #[arg(long)]
    pub base_size: Option<usize>,
    /// Worker counts for strong and weak scaling, comma separated.
    #[arg(long)]
    pub worker_counts: Option<String>,
    /// Timed repeats per measurement (odd, >= 3).
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Allow more workers than available cores.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub allow_oversubscribe: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,

    /// Recorded in manifests; ignored on input apart from a consistency check.
    #[arg(skip)]
    pub command: Option<String>,
    #[arg(skip)]
    pub version: Option<String>,
}

const GLOBAL_KEYS: &[&str] = &["seed", "out-dir", "format", "command", "version"];
const INGEST_KEYS: &[&str] = &["input", "time-column", "value-column", "group-column"];

/// Keys each command reads, beyond the global ones, and their defaults.
fn command_keys(command: &str) -> (Vec<&'static str>, Value) {
    // four workers as in the reference tables, capped by the machine
    let workers = parima::bench::available_cores().min(4);
    let ingest_defaults = json!({"time-column": "t", "value-column": "value"});
    let with_ingest = |extra: &[&'static str], defaults: Value| {
        let mut keys = INGEST_KEYS.to_vec();
        keys.extend_from_slice(extra);
        let mut d = ingest_defaults.clone();
        merge_into(&mut d, defaults);
        (keys, d)
    };
    match command {
        "simulate" => (
            vec!["order", "n", "ar", "ma", "intercept", "sigma"],
            json!({"intercept": 0.0, "sigma": 1.0}),
        ),
        "preprocess" => with_ingest(
            &["window", "period", "outlier-k", "normalize", "difference"],
            json!({"window": parima::preprocess::DEFAULT_MEDIAN_WINDOW, "normalize": false, "difference": 0}),
        ),
        "fit" => with_ingest(&["order"], json!({})),
        "forecast" => with_ingest(&["order", "model", "horizon"], json!({"horizon": 12})),
        "gridsearch" => with_ingest(&["p", "d", "q", "workers"], json!({"p": "0..4", "d": "0..2", "q": "0..4", "workers": 1})),
        "validate" => with_ingest(&["order", "folds", "horizon"], json!({"folds": 5, "horizon": 12})),
        "benchmark size-sweep" => (
            vec!["sizes", "workers", "p", "d", "q", "repeats", "allow-oversubscribe"],
            json!({"sizes": "1000,5000,10000,20000,50000", "workers": workers, "p": "0..3", "d": "0..2", "q": "0..3", "repeats": 3, "allow-oversubscribe": false}),
        ),
        "benchmark strong" => (
            vec!["size", "worker-counts", "p", "d", "q", "repeats", "allow-oversubscribe"],
            json!({"size": 10000, "worker-counts": "1,2,4,8,16", "p": "0..3", "d": "0..2", "q": "0..3", "repeats": 3, "allow-oversubscribe": false}),
        ),
        "benchmark weak" => (
            vec!["base-size", "worker-counts", "p", "d", "q", "repeats", "allow-oversubscribe"],
            json!({"base-size": 10000, "worker-counts": "1,2,4,8,16", "p": "0..3", "d": "0..2", "q": "0..3", "repeats": 3, "allow-oversubscribe": false}),
        ),
        "benchmark order-sweep" => (
            vec!["orders", "size", "workers", "repeats", "allow-oversubscribe"],
            json!({"orders": "1,1,1;2,1,2;3,1,3;4,1,4", "size": 10000, "workers": workers, "repeats": 3, "allow-oversubscribe": false}),
        ),
        _ => (vec![], json!({})),
    }
}

fn merge_into(base: &mut Value, overlay: Value) {
    if let (Value::Object(b), Value::Object(o)) = (base, overlay) {
        for (k, v) in o {
            if !v.is_null() {
                b.insert(k, v);
            }
        }
    }
}

fn to_object(cfg: &RunConfig) -> Map<String, Value> {
    match serde_json::to_value(cfg).expect("config serializes") {
        Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => unreachable!("config is a struct"),
    }
}

pub fn load_file(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::BadJson {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn absolute(path: &Path) -> CliResult<PathBuf> {
    std::path::absolute(path).map_err(|e| CliError::io(path, e))
}

impl RunConfig {
    /// Combines file values, flag values and command defaults, rejects keys
    /// the command does not use and resolves paths.
    pub fn resolve(command: &str, file: Option<RunConfig>, flags: RunConfig) -> CliResult<RunConfig> {
        let (keys, defaults) = command_keys(command);
        let mut merged = json!({"seed": 0, "out-dir": ".", "format": "csv"});
        merge_into(&mut merged, defaults);
        if let Some(file) = file {
            if let Some(recorded) = &file.command {
                if recorded != command {
                    return Err(CliError::Usage(format!(
                        "config was recorded for `{recorded}`, not `{command}`"
                    )));
                }
            }
            merge_into(&mut merged, Value::Object(to_object(&file)));
        }
        merge_into(&mut merged, Value::Object(to_object(&flags)));

        let Value::Object(mut map) = merged else { unreachable!() };
        map.remove("version");
        map.remove("command");
        for key in map.keys() {
            if !keys.contains(&key.as_str()) && !GLOBAL_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("--{key} is not used by `{command}`")));
            }
        }
        let mut cfg: RunConfig = serde_json::from_value(Value::Object(map)).map_err(|e| CliError::Usage(e.to_string()))?;
        cfg.command = Some(command.to_string());
        cfg.version = Some(env!("CARGO_PKG_VERSION").to_string());

        for p in [&mut cfg.input, &mut cfg.model].into_iter().flatten() {
            if !p.is_file() {
                return Err(CliError::Usage(format!("{} does not exist", p.display())));
            }
            *p = absolute(p)?;
        }
        let out = cfg.out_dir.clone().unwrap_or_else(|| ".".into());
        std::fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
        cfg.out_dir = Some(absolute(&out)?);
        Ok(cfg)
    }

    pub fn out_dir(&self) -> &Path {
        self.out_dir.as_deref().unwrap_or(Path::new("."))
    }

    pub fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir().join(name)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Csv)
    }

    pub fn ingest_spec(&self) -> IngestSpec {
        let d = IngestSpec::default();
        IngestSpec {
            time_column: self.time_column.clone().unwrap_or(d.time_column),
            value_column: self.value_column.clone().unwrap_or(d.value_column),
            group_column: self.group_column.clone(),
        }
    }

    /// Effective config as pretty JSON with only the keys that are set.
    pub fn manifest_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&Value::Object(to_object(self))).expect("config serializes");
        text.push('\n');
        text
    }

    pub fn write_manifest(&self) -> CliResult<PathBuf> {
        let path = self.out_path(MANIFEST_FILE);
        std::fs::write(&path, self.manifest_json()).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// Required value or a usage error naming the flag.
pub fn required<T: Clone>(value: &Option<T>, flag: &str) -> CliResult<T> {
    value.clone().ok_or_else(|| CliError::Usage(format!("--{flag} is required")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn flags_override_file_and_defaults_fill_in() {
        let dir = tmp();
        let file = RunConfig { n: Some(100), order: Some("1,0,0".into()), seed: Some(3), ..Default::default() };
        let flags = RunConfig { seed: Some(9), out_dir: Some(dir.path().into()), ..Default::default() };
        let cfg = RunConfig::resolve("simulate", Some(file), flags).unwrap();
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.n, Some(100));
        assert_eq!(cfg.sigma, Some(1.0));
        assert_eq!(cfg.format, Some(Format::Csv));
        assert_eq!(cfg.command.as_deref(), Some("simulate"));
    }

    #[test]
    fn unused_keys_rejected() {
        let dir = tmp();
        let flags = RunConfig { sizes: Some("1,2".into()), out_dir: Some(dir.path().into()), ..Default::default() };
        assert!(matches!(RunConfig::resolve("simulate", None, flags), Err(CliError::Usage(_))));
    }

    #[test]
    fn manifest_round_trips() {
        let dir = tmp();
        let flags = RunConfig { n: Some(50), order: Some("0,1,1".into()), out_dir: Some(dir.path().into()), ..Default::default() };
        let cfg = RunConfig::resolve("simulate", None, flags).unwrap();
        let path = cfg.write_manifest().unwrap();
        let loaded = load_file(&path).unwrap();
        let again = RunConfig::resolve("simulate", Some(loaded), RunConfig::default()).unwrap();
        assert_eq!(again, cfg);
        assert!(RunConfig::resolve("fit", Some(load_file(&path).unwrap()), RunConfig::default()).is_err());
    }

    #[test]
    fn file_keys_are_kebab_case() {
        let dir = tmp();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"value-column": "mwh", "seed": 4}"#).unwrap();
        let cfg = load_file(&path).unwrap();
        assert_eq!(cfg.value_column.as_deref(), Some("mwh"));
        std::fs::write(&path, r#"{"value_column": "mwh"}"#).unwrap();
        assert!(matches!(load_file(&path), Err(CliError::BadJson { .. })));
    }

    #[test]
    fn missing_input_is_a_usage_error() {
        let dir = tmp();
        let flags = RunConfig {
            input: Some(dir.path().join("nope.csv")),
            order: Some("1,0,0".into()),
            out_dir: Some(dir.path().into()),
            ..Default::default()
        };
        assert!(matches!(RunConfig::resolve("fit", None, flags), Err(CliError::Usage(_))));
    }
}
