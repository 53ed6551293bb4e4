//! One function per subcommand. Each takes the resolved [`RunConfig`],
//! delegates to the library and writes its outputs into the output
//! directory. Returned strings are the human summary printed on stdout.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use parima::arima::{self, default_coefficients, simulate_arima, ArimaModel, ArimaOrder};
use parima::bench::{self, ExperimentOptions, ScalingReport};
use parima::eval::{residual_diagnostics, rolling_origin_cv, CvReport, DiagnosticsReport};
use parima::preprocess;
use parima::search::{grid_search_parallel, GridSpec, IntRange, SearchReport};
use parima::TimeSeries;

use crate::config::{required, Format, RunConfig};
use crate::error::{CliError, CliResult};
use crate::ingest::{read_labeled, Labeled};

fn write_file(path: &Path, contents: &[u8]) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("output types serialize");
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_order(s: &str) -> CliResult<ArimaOrder> {
    Ok(s.parse()?)
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse().map_err(|_| CliError::Usage(format!("--{flag}: cannot parse {x:?}"))))
        .collect()
}

fn parse_range(s: &str, flag: &str) -> CliResult<IntRange> {
    s.parse().map_err(|e: parima::Error| CliError::Usage(format!("--{flag}: {e}")))
}

fn grid(cfg: &RunConfig) -> CliResult<GridSpec> {
    Ok(GridSpec::new(
        parse_range(&required(&cfg.p, "p")?, "p")?,
        parse_range(&required(&cfg.d, "d")?, "d")?,
        parse_range(&required(&cfg.q, "q")?, "q")?,
    )?)
}

fn load_input(cfg: &RunConfig) -> CliResult<Labeled> {
    read_labeled(&required(&cfg.input, "input")?, &cfg.ingest_spec())
}

#[derive(Serialize)]
struct SeriesRow<'a> {
    t: &'a str,
    value: Option<f64>,
}

/// Writes `t,value` rows (CSV) or an array of `{t, value}` objects (JSON).
fn write_series(cfg: &RunConfig, stem: &str, labels: &[String], values: &[Option<f64>]) -> CliResult<String> {
    let name = match cfg.format() {
        Format::Csv => {
            let mut out = String::from("t,value\n");
            for (t, v) in labels.iter().zip(values) {
                let _ = writeln!(out, "{t},{}", cell(*v));
            }
            let name = format!("{stem}.csv");
            write_file(&cfg.out_path(&name), out.as_bytes())?;
            name
        }
        Format::Json => {
            let rows: Vec<SeriesRow> = labels.iter().zip(values).map(|(t, &value)| SeriesRow { t, value }).collect();
            let name = format!("{stem}.json");
            write_json(&cfg.out_path(&name), &rows)?;
            name
        }
    };
    Ok(name)
}

pub fn simulate(cfg: &RunConfig) -> CliResult<String> {
    let order = parse_order(&required(&cfg.order, "order")?)?;
    let n = required(&cfg.n, "n")?;
    let (default_ar, default_ma) = match default_coefficients(order) {
        Ok(c) => (Some(c.0), Some(c.1)),
        Err(_) => (None, None),
    };
    let coeffs = |given: &Option<String>, fallback: Option<Vec<f64>>, flag: &str| -> CliResult<Vec<f64>> {
        match given {
            Some(s) if s.trim().is_empty() => Ok(vec![]),
            Some(s) => parse_list(s, flag),
            None => fallback.ok_or_else(|| CliError::Usage(format!("--{flag} is required for orders above 4"))),
        }
    };
    let ar = coeffs(&cfg.ar, default_ar, "ar")?;
    let ma = coeffs(&cfg.ma, default_ma, "ma")?;
    let series = simulate_arima(order, &ar, &ma, cfg.intercept.unwrap_or(0.0), cfg.sigma.unwrap_or(1.0), n, cfg.seed())?;
    let labels: Vec<String> = (0..n).map(|t| t.to_string()).collect();
    let file = write_series(cfg, "series", &labels, series.values())?;
    Ok(format!("simulated ARIMA{order}, n = {n}, seed = {} -> {file}", cfg.seed()))
}

pub fn preprocess(cfg: &RunConfig) -> CliResult<String> {
    let Labeled { labels, mut series } = load_input(cfg)?;
    let mut notes = Vec::new();

    if let Some(k) = cfg.outlier_k {
        let before = series.missing_count();
        series = preprocess::mask_outliers_mad(&series, k);
        notes.push(format!("{} outliers masked", series.missing_count() - before));
    }
    if series.has_missing() {
        let gaps = series.missing_count();
        series = preprocess::impute_moving_median(&series, cfg.window.unwrap_or(preprocess::DEFAULT_MEDIAN_WINDOW))?;
        notes.push(format!("{gaps} gaps filled"));
    }
    if let Some(period) = cfg.period {
        let r = preprocess::decompose_additive(&series, period)?;
        let mut out = String::from("t,value,trend,seasonal,residual\n");
        for (i, t) in labels.iter().enumerate() {
            let _ = writeln!(
                out,
                "{t},{},{},{},{}",
                cell(series.values()[i]),
                cell(r.trend[i]),
                r.seasonal[i],
                cell(r.residual[i])
            );
        }
        write_file(&cfg.out_path("decomposition.csv"), out.as_bytes())?;
        notes.push(format!("decomposed with period {period}"));
    }
    if cfg.normalize.unwrap_or(false) {
        let (scaled, params) = preprocess::normalize_min_max(&series)?;
        write_json(&cfg.out_path("normalization.json"), &params)?;
        series = scaled;
        notes.push(format!("scaled from [{}, {}]", params.min(), params.max()));
    }
    let d = cfg.difference.unwrap_or(0);
    let labels = &labels[d.min(labels.len())..];
    if d > 0 {
        series = preprocess::difference(&series, d)?;
        notes.push(format!("differenced {d} time(s)"));
    }
    let file = write_series(cfg, "preprocessed", labels, series.values())?;
    if notes.is_empty() {
        notes.push("no changes needed".into());
    }
    Ok(format!("{} -> {file}", notes.join(", ")))
}

/// `model.json`: the fitted model plus a few fit statistics.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub model: ArimaModel,
    pub aic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub css: f64,
}

fn observed(series: &TimeSeries) -> CliResult<()> {
    if series.has_missing() {
        return Err(CliError::Core(parima::Error::MissingData));
    }
    Ok(())
}

pub fn fit(cfg: &RunConfig) -> CliResult<String> {
    let order = parse_order(&required(&cfg.order, "order")?)?;
    let input = load_input(cfg)?;
    observed(&input.series)?;
    let (model, diag) = arima::fit(&input.series, order)?;
    let file = ModelFile {
        aic: model.aic(),
        converged: diag.converged,
        iterations: diag.iterations,
        css: diag.final_objective,
        model,
    };
    write_json(&cfg.out_path("model.json"), &file)?;
    Ok(format!(
        "ARIMA{order}: aic = {:.4}, sigma2 = {:.6}, converged = {} -> model.json",
        file.aic, file.model.sigma2, file.converged
    ))
}

pub fn forecast(cfg: &RunConfig) -> CliResult<String> {
    let horizon = required(&cfg.horizon, "horizon")?;
    let model = match (&cfg.model, &cfg.input) {
        (Some(path), None) => {
            if cfg.order.is_some() {
                return Err(CliError::Usage("--order cannot be combined with --model".into()));
            }
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let file: ModelFile = serde_json::from_str(&text).map_err(|e| CliError::BadJson {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            file.model.validate()?;
            file.model
        }
        (None, Some(_)) => {
            let order = parse_order(&required(&cfg.order, "order")?)?;
            let input = load_input(cfg)?;
            observed(&input.series)?;
            arima::fit(&input.series, order)?.0
        }
        _ => return Err(CliError::Usage("give exactly one of --model or --input".into())),
    };
    let values = arima::forecast(&model, horizon);
    let name = match cfg.format() {
        Format::Csv => {
            let mut out = String::from("h,forecast\n");
            for (h, v) in values.iter().enumerate() {
                let _ = writeln!(out, "{},{v}", h + 1);
            }
            write_file(&cfg.out_path("forecast.csv"), out.as_bytes())?;
            "forecast.csv"
        }
        Format::Json => {
            write_json(&cfg.out_path("forecast.json"), &serde_json::json!({ "order": model.order, "forecast": values }))?;
            "forecast.json"
        }
    };
    Ok(format!("{horizon}-step forecast from ARIMA{} -> {name}", model.order))
}

#[derive(Serialize)]
struct BestFile {
    best: String,
    p: usize,
    d: usize,
    q: usize,
    aic: Option<f64>,
    candidates: usize,
    failed: usize,
}

pub fn gridsearch(cfg: &RunConfig) -> CliResult<String> {
    let grid = grid(cfg)?;
    let workers = cfg.workers.unwrap_or(1);
    let input = load_input(cfg)?;
    observed(&input.series)?;
    let report: SearchReport = grid_search_parallel(&input.series, &grid, workers)?;
    match cfg.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf).map_err(|e| CliError::io("candidates.csv", e))?;
            write_file(&cfg.out_path("candidates.csv"), &buf)?;
        }
        Format::Json => {
            let mut text = report.to_json().expect("report serializes");
            text.push('\n');
            write_file(&cfg.out_path("search.json"), text.as_bytes())?;
        }
    }
    let best = report.best_candidate();
    write_json(
        &cfg.out_path("best.json"),
        &BestFile {
            best: report.best.to_string(),
            p: report.best.p,
            d: report.best.d,
            q: report.best.q,
            aic: best.aic,
            candidates: report.candidates.len(),
            failed: report.candidates.iter().filter(|c| c.aic.is_none()).count(),
        },
    )?;
    Ok(format!(
        "best order {} (aic {:.4}) over {} candidates, {} worker(s), {:.3} s",
        report.best,
        best.aic.unwrap_or(f64::NAN),
        report.candidates.len(),
        workers,
        report.wall_time
    ))
}

#[derive(Serialize)]
struct ValidationFile {
    order: ArimaOrder,
    cv: CvReport,
    diagnostics: DiagnosticsReport,
}

pub fn validate(cfg: &RunConfig) -> CliResult<String> {
    let order = parse_order(&required(&cfg.order, "order")?)?;
    let folds = cfg.folds.unwrap_or(5);
    let horizon = cfg.horizon.unwrap_or(12);
    let input = load_input(cfg)?;
    observed(&input.series)?;
    let cv = rolling_origin_cv(&input.series, folds, horizon, order)?;
    let (_, diag) = arima::fit(&input.series, order)?;
    let diagnostics = residual_diagnostics(&diag.residuals, &diag.fitted)?;
    match cfg.format() {
        Format::Csv => {
            let mut out = String::from("fold,train_end,test_end,mae,rmse\n");
            for (i, (f, (a, b))) in cv.folds.iter().zip(&cv.fold_boundaries).enumerate() {
                let _ = writeln!(out, "{},{a},{b},{},{}", i + 1, f.mae, f.rmse);
            }
            write_file(&cfg.out_path("cv_folds.csv"), out.as_bytes())?;
            let mut out = String::from("test,statistic,p_value\n");
            let sw = diagnostics.shapiro_wilk;
            let bp = diagnostics.breusch_pagan;
            let _ = writeln!(out, "shapiro_wilk,{},{}", sw.statistic, sw.p_value);
            let _ = writeln!(out, "durbin_watson,{},", diagnostics.durbin_watson);
            let _ = writeln!(out, "breusch_pagan,{},{}", bp.statistic, bp.p_value);
            write_file(&cfg.out_path("diagnostics.csv"), out.as_bytes())?;
        }
        Format::Json => write_json(
            &cfg.out_path("validation.json"),
            &ValidationFile {
                order,
                cv: cv.clone(),
                diagnostics,
            },
        )?,
    }
    Ok(format!(
        "ARIMA{order}: {folds}-fold mean MAE {:.4}, mean RMSE {:.4}; DW {:.3}, SW p {:.4}, BP p {:.4}",
        cv.mean_mae, cv.mean_rmse, diagnostics.durbin_watson, diagnostics.shapiro_wilk.p_value, diagnostics.breusch_pagan.p_value
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchKind {
    SizeSweep,
    Strong,
    Weak,
    OrderSweep,
}

impl BenchKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::SizeSweep => "size-sweep",
            Self::Strong => "strong",
            Self::Weak => "weak",
            Self::OrderSweep => "order-sweep",
        }
    }

    fn stem(self) -> &'static str {
        match self {
            Self::SizeSweep => "size_sweep",
            Self::Strong => "strong_scaling",
            Self::Weak => "weak_scaling",
            Self::OrderSweep => "order_sweep",
        }
    }
}

fn write_report(cfg: &RunConfig, stem: &str, report: &ScalingReport) -> CliResult<Vec<String>> {
    let mut files = Vec::new();
    match cfg.format() {
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf).map_err(|e| CliError::io(stem, e))?;
            files.push(format!("{stem}.csv"));
            write_file(&cfg.out_path(&files[0]), &buf)?;
        }
        Format::Json => {
            files.push(format!("{stem}.json"));
            let mut text = report.to_json().expect("report serializes");
            text.push('\n');
            write_file(&cfg.out_path(&files[0]), text.as_bytes())?;
        }
    }
    let mut buf = Vec::new();
    report.write_plot_csv(&mut buf).map_err(|e| CliError::io(stem, e))?;
    files.push(format!("{stem}_plot.csv"));
    write_file(&cfg.out_path(&files[1]), &buf)?;
    files.push(format!("{stem}.svg"));
    write_file(&cfg.out_path(&files[2]), report.to_svg().as_bytes())?;
    Ok(files)
}

pub fn benchmark(kind: BenchKind, cfg: &RunConfig) -> CliResult<String> {
    let opts = ExperimentOptions {
        grid: if kind == BenchKind::OrderSweep { GridSpec::default() } else { grid(cfg)? },
        repeats: required(&cfg.repeats, "repeats")?,
        seed: cfg.seed(),
        allow_oversubscribe: cfg.allow_oversubscribe.unwrap_or(false),
    };
    let report = match kind {
        BenchKind::SizeSweep => bench::run_size_sweep(
            &parse_list(&required(&cfg.sizes, "sizes")?, "sizes")?,
            required(&cfg.workers, "workers")?,
            &opts,
        )?,
        BenchKind::Strong => bench::run_strong_scaling(
            required(&cfg.size, "size")?,
            &parse_list(&required(&cfg.worker_counts, "worker-counts")?, "worker-counts")?,
            &opts,
        )?,
        BenchKind::Weak => bench::run_weak_scaling(
            required(&cfg.base_size, "base-size")?,
            &parse_list(&required(&cfg.worker_counts, "worker-counts")?, "worker-counts")?,
            &opts,
        )?,
        BenchKind::OrderSweep => {
            let orders = required(&cfg.orders, "orders")?
                .split(';')
                .map(parse_order)
                .collect::<CliResult<Vec<_>>>()?;
            bench::run_order_sweep(&orders, required(&cfg.size, "size")?, required(&cfg.workers, "workers")?, &opts)?
        }
    };
    report.validate()?;
    let files = write_report(cfg, kind.stem(), &report)?;

    let mut summary = String::new();
    let _ = writeln!(summary, "{} benchmark, {} cores available", kind.name(), report.environment.cores);
    for r in &report.records {
        let label = r.order.map(|o| format!("{o} ")).unwrap_or_default();
        let _ = writeln!(
            summary,
            "  {label}n = {:>7}  p = {:>2}  T1 = {:.4} s  Tp = {:.4} s  S = {:.3}  E = {:.3}",
            r.data_size, r.workers, r.t_sequential, r.t_parallel, r.speedup, r.efficiency
        );
    }
    if let Some(why) = &report.incomplete {
        let _ = writeln!(summary, "  incomplete: {why}");
    }
    let _ = write!(summary, "-> {}", files.join(", "));
    Ok(summary)
}

/// Prints to stdout, ignoring a closed pipe.
pub fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}
