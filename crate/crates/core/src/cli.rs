//! `infoseg` command-line front end.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 internal invariant
//! violation. Measure rows that are undefined or fail individually are
//! report content and do not change the exit code.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::io::{
    emit_classification, emit_membership_log, emit_personhood_table, emit_plot_data, emit_report, emit_unit_space,
    parse_source_compositions, parse_unit_space, DatasetKind, DatasetManifest, LoadedDataset, PlotKind, ReportFormat,
};
use crate::mapping::{map_sources, sources_per_unit, Leaning, LeaningScale, Thresholds};
use crate::measures::{measure_all, Measure, MeasureRequest, PairSelection, VariantSelection};
use crate::model::{PersonhoodTable, UnitSpace, UnitSpaceSpec};
use crate::synth::{generate, GeneratorConfig};

#[derive(Debug, Parser)]
#[command(
    name = "infoseg",
    version,
    about = "Information segregation measures over fractional personhoods"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a dataset and unit space and report any problems.
    Validate(ValidateArgs),
    /// Compute per-group, per-unit fractional personhoods.
    Personhood(PersonhoodArgs),
    /// Evaluate segregation measures and write a report.
    Measure(MeasureArgs),
    /// Map information sources to political units by audience leaning.
    Classify(ClassifyArgs),
    /// Generate a synthetic membership log.
    Generate(GenerateArgs),
}

#[derive(Debug, Args)]
struct Shared {
    /// Unit-space config (JSON).
    #[arg(long)]
    unit_space: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON file supplying defaults for any flag.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    dataset: PathBuf,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct PersonhoodArgs {
    dataset: PathBuf,
    #[command(flatten)]
    shared: Shared,
    /// External population size for complement sizes.
    #[arg(long)]
    population: Option<u64>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    dataset: PathBuf,
    #[command(flatten)]
    shared: Shared,
    #[arg(long)]
    format: Option<ReportFormat>,
    /// Comma-separated: evenness, joint_exposure, concentration, centralization, clustering.
    #[arg(long)]
    measures: Option<String>,
    /// paper, classical or both.
    #[arg(long)]
    variants: Option<VariantSelection>,
    /// `all`, or a list like `VC:C,VC:M`.
    #[arg(long)]
    pairs: Option<String>,
    /// `evenness-by-group` or `exposure-of-group:<GROUP>`.
    #[arg(long)]
    plot: Option<String>,
    /// Where to write plot data; stdout when absent.
    #[arg(long)]
    plot_out: Option<PathBuf>,
    #[arg(long)]
    population: Option<u64>,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    sources: PathBuf,
    #[command(flatten)]
    shared: Shared,
    #[arg(long)]
    format: Option<ReportFormat>,
    /// Four increasing cut points, e.g. `-0.5,-0.1,0.1,0.5`.
    #[arg(long, allow_hyphen_values = true)]
    thresholds: Option<Thresholds>,
    /// Also write a unit-space config with one topic per classified source.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Generator config (JSON).
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

/// File equivalents of the command-line flags. Relative paths resolve
/// against the config file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    unit_space: Option<PathBuf>,
    out: Option<PathBuf>,
    format: Option<ReportFormat>,
    measures: Option<Vec<String>>,
    variants: Option<VariantSelection>,
    pairs: Option<String>,
    plot: Option<String>,
    plot_out: Option<PathBuf>,
    population: Option<u64>,
    thresholds: Option<[f64; 4]>,
    weights: Option<[f64; 5]>,
    summary: Option<PathBuf>,
}

impl RunConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = read(path)?;
        let mut config: RunConfig =
            serde_json::from_str(&text).with_context(|| format!("{}: invalid config", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut config.unit_space,
            &mut config.out,
            &mut config.plot_out,
            &mut config.summary,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }
}

enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

/// Entry point used by the binary.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs a command line against the given output streams and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = panic::catch_unwind(AssertUnwindSafe(|| dispatch(cli.command, stdout, stderr)));
    match outcome {
        Ok(Ok(code)) => code,
        Ok(Err(Failure::Input(e))) => {
            let _ = writeln!(stderr, "error: {e:#}");
            1
        }
        Ok(Err(Failure::Internal(e))) => {
            let _ = writeln!(stderr, "internal error: {e:#}");
            2
        }
        Err(panic) => {
            let message = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            let _ = writeln!(stderr, "internal error: {message}");
            2
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, Failure> {
    match command {
        Command::Validate(args) => cmd_validate(args, stdout),
        Command::Personhood(args) => cmd_personhood(args, stdout, stderr).map(|_| 0),
        Command::Measure(args) => cmd_measure(args, stdout, stderr).map(|_| 0),
        Command::Classify(args) => cmd_classify(args, stdout).map(|_| 0),
        Command::Generate(args) => cmd_generate(args, stdout).map(|_| 0),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => stdout.write_all(text.as_bytes()).context("cannot write to stdout"),
    }
}

fn load_unit_space(path: Option<&Path>) -> Result<UnitSpace> {
    let path = path.ok_or_else(|| anyhow!("--unit-space is required"))?;
    let text = read(path)?;
    parse_unit_space(&text).with_context(|| format!("unit space {}", path.display()))
}

fn load_table(
    dataset: &Path,
    space: &UnitSpace,
    population: Option<u64>,
    stderr: &mut dyn Write,
) -> Result<PersonhoodTable> {
    let text = read(dataset)?;
    let context = || format!("dataset {}", dataset.display());
    let loaded = LoadedDataset::parse(&text, space.unit_ids()).with_context(context)?;
    for w in &loaded.warnings {
        let _ = writeln!(stderr, "warning: {}: {w}", dataset.display());
    }
    let table = loaded.personhood_table(space.unit_ids()).with_context(context)?;
    match population {
        Some(p) => Ok(table.with_population(p)?),
        None => Ok(table),
    }
}

fn cmd_validate(args: ValidateArgs, stdout: &mut dyn Write) -> Result<u8, Failure> {
    let config = RunConfig::load(args.shared.config.as_deref())?;
    let unit_space_path = args.shared.unit_space.or(config.unit_space);
    let mut lines = Vec::new();
    let mut ok = true;

    let space = match unit_space_path.as_deref() {
        Some(path) => match read(path).and_then(|t| parse_unit_space(&t).map_err(Into::into)) {
            Ok(space) => {
                lines.push(format!("unit-space {}: ok ({} units)", path.display(), space.len()));
                Some(space)
            }
            Err(e) => {
                ok = false;
                lines.push(format!("unit-space {}: error: {e:#}", path.display()));
                None
            }
        },
        None => None,
    };

    let dataset = args.dataset.display().to_string();
    let report = (|| -> Result<String> {
        let text = read(&args.dataset)?;
        let manifest = DatasetManifest::sniff(&text)?;
        if manifest.kind == DatasetKind::SourceCompositions {
            let sources = parse_source_compositions(&text)?;
            map_sources(sources.iter().map(|(id, c)| (id.as_str(), c)), &LeaningScale::default())?;
            return Ok(format!("ok (source-compositions, {} sources)", sources.len()));
        }
        let space = match (&space, &unit_space_path) {
            (Some(s), _) => s,
            (None, Some(_)) => bail!("not checked: unit space is invalid"),
            (None, None) => bail!("--unit-space is required for {}", manifest.kind.as_str()),
        };
        let loaded = LoadedDataset::parse(&text, space.unit_ids())?;
        let table = loaded.personhood_table(space.unit_ids())?;
        let mut line = format!(
            "ok ({}, {} groups, {} people)",
            manifest.kind.as_str(),
            table.group_ids().count(),
            table.population()
        );
        for w in loaded.warnings {
            line.push_str(&format!("; warning: {w}"));
        }
        Ok(line)
    })();
    match report {
        Ok(line) => lines.push(format!("dataset {dataset}: {line}")),
        Err(e) => {
            ok = false;
            lines.push(format!("dataset {dataset}: error: {e:#}"));
        }
    }
    let mut text = lines.join("\n");
    text.push('\n');
    stdout.write_all(text.as_bytes()).map_err(anyhow::Error::from)?;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_personhood(args: PersonhoodArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let config = RunConfig::load(args.shared.config.as_deref())?;
    let space = load_unit_space(args.shared.unit_space.or(config.unit_space).as_deref())?;
    let table = load_table(&args.dataset, &space, args.population.or(config.population), stderr)?;
    check_conservation(&table)?;
    let out = args.shared.out.or(config.out);
    write_output(out.as_deref(), &emit_personhood_table(&table), stdout)?;
    Ok(())
}

/// Recomputed table invariants; a failure here is a bug, not bad input.
fn check_conservation(table: &PersonhoodTable) -> Result<(), Failure> {
    for (g, gp) in table.groups() {
        let sum: f64 = gp.mass.iter().sum();
        let people = gp.people as f64;
        if (sum - people).abs() > 1e-9 * people.max(1.0) {
            return Err(Failure::Internal(anyhow!(
                "personhood of group {g} sums to {sum}, expected {people}"
            )));
        }
    }
    Ok(())
}

fn cmd_measure(args: MeasureArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), Failure> {
    let config = RunConfig::load(args.shared.config.as_deref())?;
    let space = load_unit_space(args.shared.unit_space.or(config.unit_space).as_deref())?;
    let table = load_table(&args.dataset, &space, args.population.or(config.population), stderr)?;
    check_conservation(&table)?;

    let measures: Vec<Measure> = match (args.measures, config.measures) {
        (Some(flag), _) => flag
            .split(',')
            .map(str::parse)
            .collect::<Result<_, String>>()
            .map_err(|e| anyhow!(e))?,
        (None, Some(list)) => list
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_, String>>()
            .map_err(|e| anyhow!(e))?,
        (None, None) => Measure::ALL.to_vec(),
    };
    let pairs: PairSelection = match args.pairs.or(config.pairs) {
        Some(p) => p.parse().map_err(|e: String| anyhow!(e))?,
        None => PairSelection::All,
    };
    let request = MeasureRequest {
        measures,
        variants: args.variants.or(config.variants).unwrap_or_default(),
        pairs,
    };
    let plot = args
        .plot
        .or(config.plot)
        .map(|p| p.parse::<PlotKind>())
        .transpose()
        .map_err(anyhow::Error::from)?;

    let report = measure_all(&table, &space, &request).map_err(anyhow::Error::from)?;
    let format = args.format.or(config.format).unwrap_or_default();
    let out = args.shared.out.or(config.out);
    write_output(out.as_deref(), &emit_report(&report, format), stdout)?;

    if let Some(kind) = plot {
        let csv = emit_plot_data(&report, &kind).map_err(anyhow::Error::from)?;
        write_output(args.plot_out.or(config.plot_out).as_deref(), &csv, stdout)?;
    }
    Ok(())
}

fn cmd_classify(args: ClassifyArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let config = RunConfig::load(args.shared.config.as_deref())?;
    let text = read(&args.sources)?;
    let sources = parse_source_compositions(&text).with_context(|| format!("sources {}", args.sources.display()))?;

    let mut scale = LeaningScale::default();
    if let Some(w) = config.weights {
        scale.weights = w;
    }
    scale.thresholds = match (args.thresholds, config.thresholds) {
        (Some(t), _) => t,
        (None, Some(cuts)) => Thresholds::new(cuts).map_err(anyhow::Error::from)?,
        (None, None) => Thresholds::default(),
    };

    let mapping = map_sources(sources.iter().map(|(id, c)| (id.as_str(), c)), &scale).map_err(anyhow::Error::from)?;
    let format = args.format.or(config.format).unwrap_or_default();
    let out = args.shared.out.or(config.out);
    write_output(out.as_deref(), &emit_classification(&mapping, format), stdout)?;

    if let Some(path) = args.summary.or(config.summary) {
        let counts = sources_per_unit(&mapping);
        let space = UnitSpaceSpec::new(Leaning::ALL.iter().map(|l| l.as_str()))
            .with_line_positions(&scale.weights)
            .with_topic_counts(counts.values().copied().collect())
            .with_center(Leaning::M.as_str())
            .validate()
            .map_err(anyhow::Error::from)?;
        write_output(Some(&path), &emit_unit_space(&space), stdout)?;
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let text = read(&args.config)?;
    let mut config =
        GeneratorConfig::from_json(&text).with_context(|| format!("generator config {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        config = config.with_seed(seed);
    }
    let log = generate(&config).map_err(anyhow::Error::from)?;
    write_output(args.out.as_deref(), &emit_membership_log(&log), stdout)?;
    Ok(())
}
