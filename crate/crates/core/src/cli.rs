//! Command-line front end. Parsing is clap; everything else is dispatch to the
//! library and ordered, single-threaded output assembly.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::measures::{piles_for_rounds, Family};
use crate::moments::{moments_c, moments_d_c, moments_d_r, MomentReport};
use crate::pair::{nogood_diagnostic, NogoodRow};
use crate::permcore::eulerian_table;
use crate::report::{csv_text, emit, json_text, Format, RunManifest};
use crate::sampler::{
    exact_law, riffle_histogram, sample_histogram, summarize, SampleStatistic, SamplerConfig,
};
use crate::stein::{tv_grid, tv_report, TvReport, TvStatistic, CERTIFICATION_NS, CERTIFICATION_POINTS};
use crate::verify::{verify_suite, VerifyOptions, VerifyReport};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_CERTIFICATION: u8 = 3;
pub const EXIT_IO: u8 = 1;

#[derive(Debug, Parser, Serialize)]
#[command(name = "descents", version, about = "Exact descent statistics under riffle-shuffle measures")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    #[serde(serialize_with = "display")]
    pub format: Format,

    /// Write to this file (plus `<file>.manifest.json`) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Exact law of a statistic.
    Dist(DistArgs),
    /// Exact moments, optionally with the linear asymptotics.
    Moments(MomentsArgs),
    /// Total variation to Poisson against the Stein bound.
    Tv(TvArgs),
    /// Monte Carlo draws compared with the exact law.
    Sample(SampleArgs),
    /// GSR riffle simulation compared with the exact law of d(π⁻¹).
    Riffle(RiffleArgs),
    /// Exchangeable-pair remainder diagnostic under the uniform measure.
    Diagnostic(DiagnosticArgs),
    /// Runs every self-check suite.
    Verify(VerifyArgs),
    /// Eulerian triangle.
    Eulerian(EulerianArgs),
}

fn display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
pub enum MeasureArg {
    #[value(name = "R", alias = "r")]
    R,
    #[value(name = "C", alias = "c")]
    C,
}

impl From<MeasureArg> for Family {
    fn from(m: MeasureArg) -> Self {
        match m {
            MeasureArg::R => Family::R,
            MeasureArg::C => Family::C,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum StatArg {
    D,
    C,
    Parsimony,
}

impl From<StatArg> for SampleStatistic {
    fn from(s: StatArg) -> Self {
        match s {
            StatArg::D => SampleStatistic::D,
            StatArg::C => SampleStatistic::C,
            StatArg::Parsimony => SampleStatistic::Parsimony,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
pub enum MomentStatArg {
    /// c under C_{k,n}
    #[value(name = "c")]
    #[serde(rename = "c")]
    C,
    /// d under C_{k,n}
    #[value(name = "d-c")]
    #[serde(rename = "d-c")]
    DC,
    /// d under R_{k,n}
    #[value(name = "d-r")]
    #[serde(rename = "d-r")]
    DR,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
pub enum TvStatArg {
    #[value(name = "R")]
    #[serde(rename = "R")]
    R,
    #[value(name = "C-kd")]
    #[serde(rename = "C-kd")]
    CKd,
    #[value(name = "C-kc")]
    #[serde(rename = "C-kc")]
    CKc,
}

impl From<TvStatArg> for TvStatistic {
    fn from(s: TvStatArg) -> Self {
        match s {
            TvStatArg::R => TvStatistic::KMinus1MinusDUnderR,
            TvStatArg::CKd => TvStatistic::KMinusDUnderC,
            TvStatArg::CKc => TvStatistic::KMinusCUnderC,
        }
    }
}

/// `auto` draws from OS entropy; the drawn value is written to the manifest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Auto,
}

impl std::str::FromStr for SeedArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            Ok(SeedArg::Auto)
        } else {
            s.parse().map(SeedArg::Fixed).map_err(|e| format!("{e}: expected an integer or `auto`"))
        }
    }
}

impl SeedArg {
    fn resolve(self) -> u64 {
        match self {
            SeedArg::Fixed(s) => s,
            SeedArg::Auto => rand::rng().random(),
        }
    }
}

impl Serialize for SeedArg {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            SeedArg::Fixed(v) => s.serialize_u64(*v),
            SeedArg::Auto => s.serialize_str("auto"),
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct DistArgs {
    #[arg(long, value_enum)]
    pub measure: MeasureArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, value_enum, default_value = "d")]
    pub stat: StatArg,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, value_enum, default_value = "c")]
    pub statistic: MomentStatArg,
    /// Add n·m(α)+s(α) and n·v(α) with α = k/n.
    #[arg(long)]
    pub asymptotic: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct TvArgs {
    #[arg(long, value_enum, required_unless_present = "grid")]
    pub statistic: Option<TvStatArg>,
    #[arg(long, required_unless_present = "grid", conflicts_with = "grid",
          value_parser = clap::value_parser!(u64).range(1..))]
    pub k: Option<u64>,
    #[arg(long, required_unless_present = "grid", conflicts_with = "grid",
          value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    /// Full certification sweep over all three statistics.
    #[arg(long)]
    pub grid: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub measure: MeasureArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    #[arg(long)]
    pub seed: SeedArg,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub streams: u32,
    #[arg(long, value_enum, default_value = "d")]
    pub stat: StatArg,
}

#[derive(Debug, Args, Serialize)]
pub struct RiffleArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,
    #[arg(long)]
    pub rounds: u32,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    #[arg(long)]
    pub seed: SeedArg,
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub streams: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct DiagnosticArgs {
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(2..))]
    pub n_min: u64,
    #[arg(long, default_value_t = 14, value_parser = clap::value_parser!(u64).range(2..))]
    pub n_max: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Largest n enumerated by the brute-force oracle.
    #[arg(long, default_value_t = 8)]
    pub oracle_max: usize,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    pub k_max: u64,
    /// Skip the Poisson certification sweep.
    #[arg(long)]
    pub skip_tv_grid: bool,
    /// Test-only: corrupt one binomial coefficient in the transfer suite.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct EulerianArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_max: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(Error),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistent(msg) => CliError::Certification(msg),
            other => CliError::Usage(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Certification(_) => EXIT_CERTIFICATION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

/// Rendered output of one command. `certified` is false when the command
/// computed a result that violates a bound it checks.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub certified: bool,
    /// Extra manifest fields such as the drawn seed.
    pub extra: Map<String, Value>,
}

fn to_usize(name: &'static str, v: u64) -> Result<usize, CliError> {
    usize::try_from(v).map_err(|_| CliError::Usage(Error::out_of_range(name, v, "fits in usize")))
}

fn ok(text: String) -> Outcome {
    Outcome {
        text,
        certified: true,
        extra: Map::new(),
    }
}

/// Computes the output text for a parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let fmt = cli.format;
    match &cli.command {
        Command::Dist(a) => {
            let n = to_usize("n", a.n)?;
            let pmf = exact_law(a.measure.into(), a.stat.into(), a.k, n)?;
            Ok(ok(match fmt {
                Format::Json => json_text(&pmf.to_json()),
                Format::Csv => pmf.to_csv(),
            }))
        }
        Command::Moments(a) => {
            let n = to_usize("n", a.n)?;
            let report: MomentReport = match a.statistic {
                MomentStatArg::C => moments_c(a.k, n)?,
                MomentStatArg::DC => moments_d_c(a.k, n)?,
                MomentStatArg::DR => moments_d_r(a.k, n)?,
            };
            Ok(ok(match fmt {
                Format::Json => json_text(&report.to_json(a.asymptotic)),
                Format::Csv => csv_text(
                    MomentReport::csv_header(a.asymptotic),
                    [report.csv_row(a.asymptotic)],
                ),
            }))
        }
        Command::Tv(a) => {
            let rows: Vec<TvReport> = if a.grid {
                let stats = match a.statistic {
                    Some(s) => vec![s.into()],
                    None => TvStatistic::ALL.to_vec(),
                };
                tv_grid(&CERTIFICATION_NS, CERTIFICATION_POINTS, &stats)?
            } else {
                let (k, n, s) = (a.k.expect("clap"), a.n.expect("clap"), a.statistic.expect("clap"));
                vec![tv_report(k, to_usize("n", n)?, s.into())?]
            };
            let certified = rows.iter().all(|r| r.tv_exact + r.tv_width <= r.bound);
            let text = match fmt {
                Format::Json if !a.grid => json_text(&rows[0].to_json()),
                Format::Json => json_text(&json!({
                    "certified": certified,
                    "rows": rows.iter().map(TvReport::to_json).collect::<Vec<_>>(),
                })),
                Format::Csv => csv_text(TvReport::CSV_HEADER, rows.iter().map(TvReport::csv_row)),
            };
            Ok(Outcome {
                text,
                certified,
                extra: Map::new(),
            })
        }
        Command::Sample(a) => {
            let seed = a.seed.resolve();
            let config = SamplerConfig::new(a.k, to_usize("n", a.n)?, a.count, seed, a.streams)?;
            let (family, stat) = (a.measure.into(), a.stat.into());
            let exact = exact_law(family, stat, a.k, config.n)?;
            let summary = summarize(sample_histogram(&config, family, stat)?, &exact)?;
            Ok(seeded(sample_text(&summary, fmt), seed))
        }
        Command::Riffle(a) => {
            let seed = a.seed.resolve();
            let k = piles_for_rounds(a.rounds)?;
            let n = to_usize("n", a.n)?;
            let config = SamplerConfig::new(k, n, a.count, seed, a.streams)?;
            let exact = exact_law(Family::R, SampleStatistic::D, k, n)?;
            let summary = summarize(riffle_histogram(&config, a.rounds), &exact)?;
            Ok(seeded(sample_text(&summary, fmt), seed))
        }
        Command::Diagnostic(a) => {
            if a.n_min > a.n_max {
                return Err(CliError::Usage(Error::out_of_range(
                    "n_min",
                    a.n_min,
                    format!("<= n_max = {}", a.n_max),
                )));
            }
            let rows = nogood_diagnostic(to_usize("n_min", a.n_min)?..=to_usize("n_max", a.n_max)?)?;
            let certified = rows.iter().all(|r| r.dominates);
            let text = match fmt {
                Format::Json => json_text(&Value::Array(rows.iter().map(NogoodRow::to_json).collect())),
                Format::Csv => csv_text(NogoodRow::CSV_HEADER, rows.iter().map(NogoodRow::csv_row)),
            };
            Ok(Outcome {
                text,
                certified,
                extra: Map::new(),
            })
        }
        Command::Verify(a) => {
            let mut opts = VerifyOptions {
                oracle_max: a.oracle_max,
                k_max: a.k_max,
                inject_fault: a.inject_fault,
                ..VerifyOptions::default()
            };
            if a.skip_tv_grid {
                opts.tv_ns.clear();
            }
            let report = verify_suite(&opts)?;
            let text = match fmt {
                Format::Json => json_text(&report.to_json()),
                Format::Csv => csv_text(VerifyReport::CSV_HEADER, report.csv_rows()),
            };
            Ok(Outcome {
                text,
                certified: report.passed(),
                extra: Map::new(),
            })
        }
        Command::Eulerian(a) => {
            let table = eulerian_table(to_usize("n_max", a.n_max)?)?;
            let text = match fmt {
                Format::Json => {
                    let mut map = Map::new();
                    for n in 1..=table.n_max() {
                        let row = table.row(n).iter().map(|v| Value::String(v.to_string())).collect();
                        map.insert(n.to_string(), Value::Array(row));
                    }
                    json_text(&Value::Object(map))
                }
                Format::Csv => {
                    let rows = (1..=table.n_max()).flat_map(|n| {
                        table
                            .row(n)
                            .iter()
                            .enumerate()
                            .map(move |(i, v)| format!("{n},{},{v}", i + 1))
                            .collect::<Vec<_>>()
                    });
                    csv_text("n,k,value", rows)
                }
            };
            Ok(ok(text))
        }
    }
}

fn sample_text(summary: &crate::sampler::SampleSummary, fmt: Format) -> String {
    match fmt {
        Format::Json => json_text(&summary.to_json()),
        Format::Csv => summary.to_csv(),
    }
}

fn seeded(text: String, seed: u64) -> Outcome {
    let mut extra = Map::new();
    extra.insert("seed".into(), json!(seed));
    Outcome {
        text,
        certified: true,
        extra,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Dist(_) => "dist",
        Command::Moments(_) => "moments",
        Command::Tv(_) => "tv",
        Command::Sample(_) => "sample",
        Command::Riffle(_) => "riffle",
        Command::Diagnostic(_) => "diagnostic",
        Command::Verify(_) => "verify",
        Command::Eulerian(_) => "eulerian",
    }
}

/// Runs a parsed command line: computes, writes output and manifest, and
/// maps the outcome to an exit status.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let outcome = execute(cli)?;
    let mut params = match serde_json::to_value(cli).expect("arguments serialize") {
        Value::Object(m) => m,
        _ => unreachable!("Cli serializes to an object"),
    };
    params.extend(outcome.extra);
    let mut manifest = RunManifest::new(command_name(&cli.command), params);
    manifest.set_wall_time(start.elapsed());
    emit(&outcome.text, cli.out.as_deref(), &mut manifest)?;
    if outcome.certified {
        Ok(())
    } else {
        Err(CliError::Certification(format!(
            "{} reported a violated bound",
            command_name(&cli.command)
        )))
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exec(args: &[&str]) -> Result<Outcome, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("descents").chain(args.iter().copied()))
            .expect("parses");
        execute(&cli)
    }

    #[test]
    fn dist_json_matches_exact_law() {
        let out = exec(&["dist", "--measure", "R", "--k", "2", "--n", "2", "--format", "json"]).unwrap();
        let v: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v, json!({"0": "3/4", "1": "1/4"}));
    }

    #[test]
    fn tv_example_row() {
        let out = exec(&["tv", "--statistic", "R", "--k", "1", "--n", "9"]).unwrap();
        let v: Value = serde_json::from_str(&out.text).unwrap();
        let tv: f64 = v["tv_exact"].as_str().map(|s| s.parse().unwrap()).or(v["tv_exact"].as_f64()).unwrap();
        assert!((tv - 0.0952).abs() < 5e-4, "{v}");
        assert!(out.certified);
    }

    #[test]
    fn invalid_input_is_a_usage_error() {
        assert!(Cli::try_parse_from(["descents", "dist", "--measure", "R", "--k", "0", "--n", "2"]).is_err());
        assert!(Cli::try_parse_from(["descents", "dist", "--bogus", "1"]).is_err());
        let e = exec(&["dist", "--measure", "C", "--k", "2", "--n", "1", "--stat", "c"]).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_USAGE);
    }

    #[test]
    fn sampling_is_deterministic_given_seed() {
        let args = ["sample", "--measure", "C", "--k", "3", "--n", "5", "--count", "2000", "--seed", "9", "--format", "csv"];
        let a = exec(&args).unwrap();
        let b = exec(&args).unwrap();
        assert_eq!(a.text, b.text);
        assert!(a.text.starts_with("value,count,empirical,exact_num,exact_den,z\n"));
        assert_eq!(a.extra["seed"], json!(9));
    }

    #[test]
    fn auto_seed_is_recorded() {
        let out = exec(&["riffle", "--n", "4", "--rounds", "1", "--count", "100", "--seed", "auto"]).unwrap();
        assert!(out.extra["seed"].is_u64());
    }

    #[test]
    fn params_echo_serializes() {
        let cli = Cli::try_parse_from(["descents", "tv", "--grid", "--format", "csv"]).unwrap();
        let v = serde_json::to_value(&cli).unwrap();
        assert_eq!(v["format"], json!("csv"));
        assert_eq!(v["command"]["tv"]["grid"], json!(true));
    }
}
