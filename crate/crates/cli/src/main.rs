//! `demat`: trend fitting, dematerialization assessment and phase-region maps.

mod output;
mod plot;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use demat_core::cases::{
    assess_all, CaseTable, ReplicationConfig, BUNDLED_CASES_FILE, SAMPLE_GDP_GROWTH,
    SAMPLE_POP_GROWTH,
};
use demat_core::phase::{boundary_polyline, classify_grid};
use demat_core::{
    combined_growth_series, detect_absolute_decline, fit_exponential, replicate_tables, Axis,
    CaseResult, Category, Classification, Era, EraRule, Param, Preset, Region, Series, SeriesKind,
};

use output::{Csv, Field, Outputs};
use plot::Marker;

#[derive(Debug, Parser)]
#[command(
    name = "demat",
    version,
    about = "Dematerialization analysis under technical progress and demand rebound"
)]
struct Cli {
    /// Directory holding the case table (`cases.csv`); the embedded table is used when unset.
    #[arg(long, global = true, env = "DEMAT_DATA_DIR", value_name = "DIR")]
    data_dir: Option<PathBuf>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    /// Only print errors.
    #[arg(short, long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit exponential trends to yearly series.
    Fit(FitArgs),
    /// Estimate elasticities and evaluate the criterion for every case.
    Assess(AssessArgs),
    /// Classify a parameter region and draw its boundary.
    Phase(PhaseArgs),
    /// Recompute the case table and compare with its expected columns.
    Replicate(ReplicateArgs),
    /// Detect absolute decline in consumption series.
    Decline(DeclineArgs),
    /// Assessments, all phase presets and the combined growth series in one directory.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        self != Format::Svg
    }

    fn svg(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Debug, Args)]
struct CasesArg {
    /// Case table (`name;category;start_year;end_year;g;k[;epsilon_expected;index_expected]`).
    #[arg(long, env = "DEMAT_CASES", value_name = "PATH")]
    cases: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// `year,value` file (repeatable).
    #[arg(long, required = true, value_name = "PATH")]
    input: Vec<PathBuf>,
    /// Series kind: price, demand, gdp_per_capita, population, consumption.
    #[arg(long, default_value = "price", value_parser = parse_kind)]
    kind: SeriesKind,
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AssessArgs {
    #[command(flatten)]
    cases: CasesArg,
    /// Population growth rate for every case, replacing the era rule.
    #[arg(
        long,
        env = "DEMAT_POP",
        value_name = "RATE",
        allow_negative_numbers = true
    )]
    pop: Option<f64>,
    /// Per-capita GDP growth rate for every case, replacing the era rule.
    #[arg(
        long,
        env = "DEMAT_GDP",
        value_name = "RATE",
        allow_negative_numbers = true
    )]
    gdp: Option<f64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PhaseArgs {
    /// Named region (see below).
    #[arg(long, conflicts_with_all = ["x", "y", "fix"], required_unless_present = "x")]
    preset: Option<Preset>,
    /// Horizontal axis, `VAR:MIN:MAX:STEP`.
    #[arg(long, value_parser = parse_axis, requires = "y", allow_hyphen_values = true)]
    x: Option<Axis<f64>>,
    /// Vertical axis, `VAR:MIN:MAX:STEP`.
    #[arg(long, value_parser = parse_axis, requires = "x", allow_hyphen_values = true)]
    y: Option<Axis<f64>>,
    /// Fixed parameter, `VAR=VALUE`; give one for each parameter not on an axis.
    #[arg(long, value_parser = parse_fix, allow_hyphen_values = true)]
    fix: Vec<(Param, f64)>,
    #[command(flatten)]
    cases: CasesArg,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "both", env = "DEMAT_FORMAT")]
    format: Format,
}

#[derive(Debug, Args)]
struct ReplicateArgs {
    #[command(flatten)]
    cases: CasesArg,
    /// Absolute tolerance on epsilon.
    #[arg(long, env = "DEMAT_TOL_EPSILON", default_value_t = 1e-4)]
    tol_epsilon: f64,
    /// Absolute tolerance on the criterion value.
    #[arg(long, env = "DEMAT_TOL_INDEX", default_value_t = 1e-6)]
    tol_index: f64,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DeclineArgs {
    /// `year,value` file or a directory of them (repeatable).
    #[arg(long, required = true, value_name = "PATH")]
    input: Vec<PathBuf>,
    #[arg(long, default_value = "consumption", value_parser = parse_kind)]
    kind: SeriesKind,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    cases: CasesArg,
    /// Population growth-rate series for the combined growth chart.
    #[arg(long, value_name = "PATH")]
    pop_series: Option<PathBuf>,
    /// Per-capita GDP growth-rate series for the combined growth chart.
    #[arg(long, value_name = "PATH")]
    gdp_series: Option<PathBuf>,
    /// Elasticity weighting GDP growth in the combined growth chart.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    epsilon: f64,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "both", env = "DEMAT_FORMAT")]
    format: Format,
}

/// Invalid flag combination detected after parsing.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

/// Replication ran but did not pass.
#[derive(Debug)]
struct ReplicationFailed;

impl fmt::Display for ReplicationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("replication failed")
    }
}

impl std::error::Error for ReplicationFailed {}

fn parse_kind(s: &str) -> Result<SeriesKind, String> {
    SeriesKind::parse(s).ok_or_else(|| format!("unknown series kind `{s}`"))
}

fn parse_axis(s: &str) -> Result<Axis<f64>, String> {
    s.parse().map_err(|e: demat_core::Error| e.to_string())
}

fn parse_fix(s: &str) -> Result<(Param, f64), String> {
    let (var, value) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}` is not VAR=VALUE"))?;
    let param: Param = var.parse().map_err(|e: demat_core::Error| e.to_string())?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("bad number `{value}`"))?;
    if !value.is_finite() {
        return Err(format!("`{s}`: value must be finite"));
    }
    Ok((param, value))
}

fn presets_help() -> String {
    let mut s = String::from("Presets:\n");
    for p in Preset::ALL {
        s.push_str(&format!("  {:<10} {}\n", p.name(), p.description()));
    }
    s.push_str("\nVariables: k, epsilon (eps), pop_growth (pop), gdp_growth (gdp).");
    s
}

fn command() -> clap::Command {
    Cli::command()
        .mut_subcommand("phase", |c| c.after_help(presets_help()))
        .after_help("Exit status: 0 success, 1 data error, 2 usage error, 3 replication failure.")
}

fn main() -> ExitCode {
    let cli = match command()
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m))
    {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let level = match (cli.quiet, cli.verbose) {
        (true, _) => log::LevelFilter::Error,
        (false, 0) => log::LevelFilter::Warn,
        (false, 1) => log::LevelFilter::Info,
        (false, _) => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .parse_default_env()
        .init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<ReplicationFailed>() => ExitCode::from(3),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let data_dir = cli.data_dir.as_deref();
    match &cli.command {
        Command::Fit(a) => fit(a),
        Command::Assess(a) => assess(a, data_dir),
        Command::Phase(a) => phase(a, data_dir),
        Command::Replicate(a) => replicate(a, data_dir),
        Command::Decline(a) => decline(a),
        Command::Report(a) => report(a, data_dir),
    }
}

fn load_table(cases: &CasesArg, data_dir: Option<&Path>) -> Result<CaseTable<f64>> {
    let path = match (&cases.cases, data_dir) {
        (Some(p), _) => p.clone(),
        (None, Some(dir)) => dir.join(BUNDLED_CASES_FILE),
        (None, None) => return Ok(CaseTable::bundled()),
    };
    log::info!("reading cases from {}", path.display());
    CaseTable::read(&path).with_context(|| path.display().to_string())
}

fn read_series(path: &Path, kind: SeriesKind) -> Result<Series> {
    Series::read(path, kind).with_context(|| path.display().to_string())
}

fn fit(args: &FitArgs) -> Result<()> {
    let mut csv = Csv::new(&[
        "label",
        "kind",
        "n_points",
        "rate",
        "ln_intercept",
        "r_squared",
        "improvement_rate",
    ]);
    for path in &args.input {
        let series = read_series(path, args.kind)?;
        let fit = fit_exponential(&series).with_context(|| path.display().to_string())?;
        let improvement = if args.kind == SeriesKind::Price {
            Field::Num(fit.improvement_rate())
        } else {
            Field::Empty
        };
        csv.row(&[
            Field::Text(series.label()),
            Field::Text(args.kind.as_str()),
            Field::Int(fit.n_points as i64),
            Field::Num(fit.rate),
            Field::Num(fit.ln_intercept),
            Field::Num(fit.r_squared),
            improvement,
        ]);
    }
    let mut out = Outputs::default();
    out.file_or_stdout(args.out.as_deref(), csv.finish());
    out.commit()
}

fn era_rule(pop: Option<f64>, gdp: Option<f64>) -> Result<EraRule<f64>> {
    let mut rule = EraRule::default();
    for era in [&mut rule.historical, &mut rule.modern] {
        *era = Era::new(pop.unwrap_or(era.pop_growth), gdp.unwrap_or(era.gdp_growth))
            .map_err(|e| Usage(e.to_string()))?;
    }
    Ok(rule)
}

fn assessments_csv(results: &[CaseResult]) -> String {
    let mut csv = Csv::new(&[
        "name",
        "category",
        "start_year",
        "end_year",
        "g",
        "k",
        "pop_growth",
        "gdp_growth",
        "epsilon",
        "index",
        "class",
    ]);
    for a in results {
        let r = &a.record;
        csv.row(&[
            Field::Text(&r.name),
            Field::Text(r.category.as_str()),
            Field::Int(r.start_year.into()),
            Field::Int(r.end_year.into()),
            Field::Num(r.g),
            Field::Num(r.k),
            Field::Num(a.era.pop_growth),
            Field::Num(a.era.gdp_growth),
            Field::Num(a.epsilon),
            Field::Num(a.index),
            Field::Text(a.classification.as_str()),
        ]);
    }
    csv.finish()
}

fn class_counts(results: &[CaseResult]) -> [usize; 3] {
    let count = |c| results.iter().filter(|a| a.classification == c).count();
    [
        count(Classification::Materializing),
        count(Classification::Dematerializing),
        count(Classification::Boundary),
    ]
}

fn assess(args: &AssessArgs, data_dir: Option<&Path>) -> Result<()> {
    let rule = era_rule(args.pop, args.gdp)?;
    let table = load_table(&args.cases, data_dir)?;
    let results = assess_all(&table.records, &rule)?;
    let [m, d, b] = class_counts(&results);
    log::info!(
        "{} cases: {m} materializing, {d} dematerializing, {b} boundary",
        results.len()
    );
    let mut out = Outputs::default();
    out.file_or_stdout(args.out.as_deref(), assessments_csv(&results));
    out.commit()
}

fn preset_category(preset: Preset) -> Option<Category> {
    match preset {
        Preset::Fig5a => Some(Category::Chemicals),
        Preset::Fig5b | Preset::Fig5bEra => Some(Category::Hardware),
        Preset::Fig5c => Some(Category::Energy),
        Preset::Fig2 | Preset::Fig3 | Preset::Fig4 => None,
    }
}

/// Renders one region into `dir`, with the given cases as markers.
fn render_phase(
    out: &mut Outputs,
    dir: &Path,
    spec: &Region,
    title: &str,
    points: &[&CaseResult],
    format: Format,
) -> Result<()> {
    let grid = classify_grid(spec).map_err(|e| Usage(e.to_string()))?;
    let boundary = boundary_polyline(spec)?;
    if format.csv() {
        let mut csv = Csv::new(&["x", "y", "index", "class"]);
        for c in &grid.cells {
            csv.row(&[
                Field::Num(c.x),
                Field::Num(c.y),
                Field::Num(c.index),
                Field::Text(c.classification.as_str()),
            ]);
        }
        out.file(dir.join("grid.csv"), csv.finish());
        let mut csv = Csv::new(&["x", "y"]);
        for &(x, y) in &boundary {
            csv.row(&[Field::Num(x), Field::Num(y)]);
        }
        out.file(dir.join("boundary.csv"), csv.finish());
        if !points.is_empty() {
            let mut csv = Csv::new(&[
                "name",
                "k",
                "epsilon",
                "pop_growth",
                "gdp_growth",
                "index",
                "class",
            ]);
            for a in points {
                csv.row(&[
                    Field::Text(&a.record.name),
                    Field::Num(a.record.k),
                    Field::Num(a.epsilon),
                    Field::Num(a.era.pop_growth),
                    Field::Num(a.era.gdp_growth),
                    Field::Num(a.index),
                    Field::Text(a.classification.as_str()),
                ]);
            }
            out.file(dir.join("points.csv"), csv.finish());
        }
    }
    if format.svg() {
        let markers: Vec<Marker> = points
            .iter()
            .map(|a| Marker {
                label: a.record.name.clone(),
                x: a.record.k,
                y: a.epsilon,
            })
            .collect();
        out.file(
            dir.join("phase.svg"),
            plot::phase_svg(&grid, &boundary, &markers, title),
        );
    }
    Ok(())
}

fn phase(args: &PhaseArgs, data_dir: Option<&Path>) -> Result<()> {
    let (spec, title, category) = match (args.preset, args.x, args.y) {
        (Some(p), _, _) => (
            p.spec::<f64>(),
            format!("{p}: {}", p.description()),
            preset_category(p),
        ),
        (None, Some(x), Some(y)) => {
            let spec = Region::new(x, y, &args.fix).map_err(|e| Usage(e.to_string()))?;
            let fixed: Vec<String> = spec
                .fixed_params()
                .iter()
                .map(|&p| format!("{p}={}", spec.fixed.get(p)))
                .collect();
            (spec, fixed.join(", "), None)
        }
        _ => return Err(Usage("give --preset or both --x and --y".into()).into()),
    };
    let results = match category {
        Some(_) => {
            let table = load_table(&args.cases, data_dir)?;
            assess_all(&table.records, &EraRule::default())?
        }
        None => Vec::new(),
    };
    let points: Vec<&CaseResult> = results
        .iter()
        .filter(|a| Some(a.record.category) == category)
        .collect();
    let mut out = Outputs::default();
    render_phase(&mut out, &args.out, &spec, &title, &points, args.format)?;
    out.commit()
}

fn replicate(args: &ReplicateArgs, data_dir: Option<&Path>) -> Result<()> {
    if !(args.tol_epsilon >= 0.0 && args.tol_index >= 0.0) {
        return Err(Usage("tolerances must be non-negative".into()).into());
    }
    let table = load_table(&args.cases, data_dir)?;
    let Some(expected) = &table.expected else {
        bail!("case table has no epsilon_expected/index_expected columns");
    };
    let config = ReplicationConfig {
        tol_epsilon: args.tol_epsilon,
        tol_index: args.tol_index,
        ..Default::default()
    };
    let report = replicate_tables(&table.records, expected, &config)?;

    let mut csv = Csv::new(&[
        "name",
        "epsilon",
        "epsilon_expected",
        "epsilon_deviation",
        "index",
        "index_expected",
        "index_deviation",
        "class",
        "within_tolerance",
    ]);
    for r in &report.rows {
        csv.row(&[
            Field::Text(&r.name),
            Field::Num(r.epsilon),
            Field::Num(r.epsilon_expected),
            Field::Num(r.epsilon_deviation),
            Field::Num(r.index),
            Field::Num(r.index_expected),
            Field::Num(r.index_deviation),
            Field::Text(r.classification.as_str()),
            Field::Bool(r.within_tolerance),
        ]);
    }
    csv.line(&format!(
        "# counts materializing={} dematerializing={} boundary={}",
        report.materializing, report.dematerializing, report.boundary
    ));
    csv.line(&format!(
        "# max_deviation epsilon={} index={}",
        report.max_epsilon_deviation(),
        report.max_index_deviation()
    ));
    csv.line(if report.pass { "PASS" } else { "FAIL" });

    let mut out = Outputs::default();
    out.file_or_stdout(args.out.as_deref(), csv.finish());
    out.commit()?;
    if report.pass {
        return Ok(());
    }
    for r in report.failing_rows() {
        eprintln!(
            "{}: epsilon {} vs {} (deviation {}), index {} vs {} (deviation {})",
            r.name,
            r.epsilon,
            r.epsilon_expected,
            r.epsilon_deviation,
            r.index,
            r.index_expected,
            r.index_deviation
        );
    }
    if report.materializing != report.rows.len() {
        eprintln!(
            "{} of {} cases are not materializing",
            report.rows.len() - report.materializing,
            report.rows.len()
        );
    }
    eprintln!("FAIL");
    Err(ReplicationFailed.into())
}

fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for path in inputs {
        if path.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(path)
                .with_context(|| path.display().to_string())?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| {
                    p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
                })
                .collect();
            found.sort();
            if found.is_empty() {
                bail!("{}: no .csv files", path.display());
            }
            files.extend(found);
        } else {
            files.push(path.clone());
        }
    }
    Ok(files)
}

fn decline(args: &DeclineArgs) -> Result<()> {
    let mut csv = Csv::new(&[
        "label",
        "n_points",
        "fitted_rate",
        "endpoint_ratio",
        "declining",
    ]);
    for path in expand_inputs(&args.input)? {
        let series = read_series(&path, args.kind)?;
        let v = detect_absolute_decline(&series).with_context(|| path.display().to_string())?;
        csv.row(&[
            Field::Text(&v.label),
            Field::Int(v.n_points as i64),
            Field::Num(v.fitted_rate),
            Field::Num(v.endpoint_ratio),
            Field::Bool(v.declining),
        ]);
    }
    let mut out = Outputs::default();
    out.file_or_stdout(args.out.as_deref(), csv.finish());
    out.commit()
}

fn rate_series(path: Option<&Path>, bundled: &str, label: &str) -> Result<Series> {
    match path {
        Some(p) => read_series(p, SeriesKind::Rate),
        None => Ok(Series::parse(bundled, label, SeriesKind::Rate)?),
    }
}

fn report(args: &ReportArgs, data_dir: Option<&Path>) -> Result<()> {
    let table = load_table(&args.cases, data_dir)?;
    let results = assess_all(&table.records, &EraRule::default())?;
    let pop = rate_series(args.pop_series.as_deref(), SAMPLE_POP_GROWTH, "pop_growth")?;
    let gdp = rate_series(args.gdp_series.as_deref(), SAMPLE_GDP_GROWTH, "gdp_growth")?;
    let combined = combined_growth_series(&pop, &gdp, args.epsilon)?;

    let dir = &args.out;
    let mut out = Outputs::default();
    out.file(dir.join("assessments.csv"), assessments_csv(&results));

    let mut summary = String::new();
    let [m, d, b] = class_counts(&results);
    summary.push_str(&format!("cases: {}\n", results.len()));
    summary.push_str(&format!(
        "materializing: {m}\ndematerializing: {d}\nboundary: {b}\n"
    ));
    for cat in [Category::Chemicals, Category::Hardware, Category::Energy] {
        let n = results.iter().filter(|a| a.record.category == cat).count();
        let min = results
            .iter()
            .filter(|a| a.record.category == cat)
            .map(|a| a.index)
            .fold(f64::INFINITY, f64::min);
        if n > 0 {
            summary.push_str(&format!("{cat}: {n} cases, smallest index {min}\n"));
        }
    }
    if let Some(expected) = &table.expected {
        let report = replicate_tables(&table.records, expected, &ReplicationConfig::default())?;
        summary.push_str(&format!(
            "replication: {} (max epsilon deviation {}, max index deviation {})\n",
            if report.pass { "PASS" } else { "FAIL" },
            report.max_epsilon_deviation(),
            report.max_index_deviation()
        ));
    }

    for preset in Preset::ALL {
        let category = preset_category(preset);
        let points: Vec<&CaseResult> = results
            .iter()
            .filter(|a| Some(a.record.category) == category)
            .collect();
        let title = format!("{preset}: {}", preset.description());
        render_phase(
            &mut out,
            &dir.join(preset.name()),
            &preset.spec(),
            &title,
            &points,
            args.format,
        )?;
        let line = boundary_polyline(&preset.spec::<f64>())?;
        summary.push_str(&format!("{preset}: {} boundary points\n", line.len()));
    }

    let title = format!("population growth + {} x GDP growth", args.epsilon);
    if args.format.csv() {
        let mut csv = Csv::new(&["year", "value"]);
        for &(year, v) in &combined {
            csv.row(&[Field::Num(year), Field::Num(v)]);
        }
        out.file(dir.join("fig1.csv"), csv.finish());
    }
    if args.format.svg() {
        out.file(
            dir.join("fig1.svg"),
            plot::line_svg(&combined, &title, "year", "rate"),
        );
    }
    if let (Some(first), Some(last)) = (combined.first(), combined.last()) {
        summary.push_str(&format!(
            "fig1: {} years, {} in {} to {} in {}\n",
            combined.len(),
            first.1,
            first.0,
            last.1,
            last.0
        ));
    }

    let mut files: Vec<String> = out
        .paths()
        .filter_map(|p| p.strip_prefix(dir).ok())
        .map(|p| p.display().to_string())
        .collect();
    files.sort();
    summary.push_str("files:\n");
    for f in files {
        summary.push_str(&format!("  {f}\n"));
    }
    out.file(dir.join("summary.txt"), summary);
    out.commit()
}
