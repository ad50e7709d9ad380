//! Command-line front end. Every subcommand is a pure function of its flags:
//! all randomness comes from `--seed` and output files are replaced
//! atomically.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cloud::PointCloud;
use crate::curve::Scheme;
use crate::error::{Error, Result};
use crate::ingest::{self, AttributeSpec, IngestOptions, IngestReport, MissingPolicy};
use crate::metrics::{self, IndexMetrics};
use crate::stats::{self, ComparisonResult, FitResult};
use crate::synth::{self, Family, SynthSpec};
use crate::tree::{self, ScaledTree, TreeDocument, DEFAULT_MAX_BITS};

#[derive(Debug, Parser)]
#[command(name = "gray-hilbert", version, about = "Scaled Gray-Hilbert curve index for point clouds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Seed for categorical coding, bootstrap replicates and synthetic data.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Output file (written atomically); standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Output format; each subcommand accepts a subset.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the scaled tree and export it with the ingest report.
    Build(BuildArgs),
    /// Tabulate storage metrics over bucket sizes and schemes.
    Metrics(MetricsArgs),
    /// Print point ids in curve order, one per line.
    Order(TreeArgs),
    /// Write the tail distribution of bucket occupancies as CSV.
    Tail(TailArgs),
    /// Fit log-normal and power-law tails and compare them.
    Fit(FitArgs),
    /// Generate a synthetic point cloud as CSV.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeChoice {
    Bubble,
    Ring,
    Both,
}

impl SchemeChoice {
    fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeChoice::Bubble => vec![Scheme::Bubble],
            SchemeChoice::Ring => vec![Scheme::Ring],
            SchemeChoice::Both => Scheme::ALL.to_vec(),
        }
    }

    fn single(self) -> Result<Scheme> {
        match self {
            SchemeChoice::Bubble => Ok(Scheme::Bubble),
            SchemeChoice::Ring => Ok(Scheme::Ring),
            SchemeChoice::Both => Err(Error::InvalidParameter(
                "this subcommand needs a single scheme (bubble or ring)".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TailSource {
    /// Point counts of the non-empty cells of the static grid at iteration k.
    StaticCells,
    /// Point counts of the non-empty leaves of the scaled tree.
    ScaledLeaves,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MissingChoice {
    Drop,
    ImputeZero,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file with a header row.
    #[arg(long)]
    pub input: PathBuf,

    /// Selected columns as `name[:numeric|cat|date|unit]`, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub attrs: Vec<AttributeSpec>,

    #[arg(long, default_value_t = ',')]
    pub delimiter: char,

    /// Column with integer point ids; row numbers otherwise.
    #[arg(long)]
    pub id_column: Option<String>,

    /// Treatment of rows with missing selected values.
    #[arg(long = "keep-missing", value_enum, default_value = "drop")]
    pub missing: MissingChoice,
}

impl InputArgs {
    fn load(&self, seed: u64) -> Result<(PointCloud, IngestReport)> {
        let delimiter = u8::try_from(self.delimiter)
            .map_err(|_| Error::InvalidParameter("delimiter must be a single-byte character".into()))?;
        let options = IngestOptions {
            delimiter,
            seed,
            missing: match self.missing {
                MissingChoice::Drop => MissingPolicy::Drop,
                MissingChoice::ImputeZero => MissingPolicy::ImputeZero,
            },
            id_column: self.id_column.clone(),
        };
        ingest::load_csv(&self.input, &self.attrs, &options)
    }
}

#[derive(Debug, Args)]
pub struct TreeArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Bucket capacity s.
    #[arg(long, default_value_t = 1)]
    pub bucket: usize,

    #[arg(long, value_enum, default_value = "ring")]
    pub scheme: SchemeChoice,

    /// Bits of coordinate precision before points count as identical.
    #[arg(long, default_value_t = DEFAULT_MAX_BITS)]
    pub max_bits: u32,
}

impl TreeArgs {
    fn build(&self, cloud: &PointCloud) -> Result<ScaledTree> {
        tree::build_scaled(cloud, self.bucket, self.scheme.single()?, self.max_bits)
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub tree: TreeArgs,

    /// Ingest report path; defaults to `<out>.ingest.json` next to the tree.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[arg(long, conflicts_with = "bucket_sweep")]
    pub bucket: Option<usize>,

    /// Bucket capacities, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub bucket_sweep: Vec<usize>,

    #[arg(long, value_enum, default_value = "ring")]
    pub scheme: SchemeChoice,

    #[arg(long, default_value_t = DEFAULT_MAX_BITS)]
    pub max_bits: u32,
}

#[derive(Debug, Args)]
pub struct TailArgs {
    #[command(flatten)]
    pub tree: TreeArgs,

    #[arg(long, value_enum, default_value = "static-cells")]
    pub tail_source: TailSource,

    /// Grid iteration for static cells; the optimal static k by default.
    #[arg(long)]
    pub k: Option<u32>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub tail: TailArgs,

    /// Bootstrap replicates for the goodness-of-fit p-values (0 skips them).
    #[arg(long, default_value_t = 1000)]
    pub replicates: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value = "uniform")]
    pub distribution: Family,

    /// Dimension n.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,

    /// Number of points N.
    #[arg(long)]
    pub count: usize,

    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu: f64,

    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,

    #[arg(long, default_value_t = 2.5)]
    pub alpha: f64,

    #[arg(long, default_value_t = 10)]
    pub clusters: usize,

    /// Radius multiplier for cluster families.
    #[arg(long, default_value_t = 0.01)]
    pub scale: f64,

    /// Uniform fraction of a mixture.
    #[arg(long, default_value_t = 0.5)]
    pub background: f64,
}

/// Writes `bytes` to `out` via a temporary file in the same directory, or
/// to standard output.
pub fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
            tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
            tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(bytes).and_then(|_| stdout.flush()) {
                // a closed pipe (e.g. `| head`) is not a failure of ours
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::io("<stdout>", e)),
                _ => Ok(()),
            }
        }
    }
}

fn check_format(given: Option<Format>, allowed: &[Format], command: &str) -> Result<Format> {
    let format = given.unwrap_or(allowed[0]);
    if allowed.contains(&format) {
        Ok(format)
    } else {
        Err(Error::InvalidParameter(format!(
            "{command} does not support format {format:?}"
        )))
    }
}

fn report_path(explicit: Option<&Path>, out: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| {
        out.map(|o| {
            let stem = o.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            o.with_file_name(format!("{stem}.ingest.json"))
        })
    })
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner().map_err(|e| Error::io("<csv>", e.into_error()))
}

fn occupancies(args: &TailArgs, cloud: &PointCloud) -> Result<(Vec<f64>, Option<u32>)> {
    match args.tail_source {
        TailSource::StaticCells => {
            if args.tree.bucket == 0 {
                return Err(Error::ZeroCapacity);
            }
            let k = args.k.unwrap_or_else(|| {
                metrics::static_k(cloud.len() as u64, args.tree.bucket as u64, cloud.dim())
            });
            let profile = tree::static_profile(cloud, k, args.tree.bucket)?;
            Ok((profile.cell_counts.iter().map(|&c| c as f64).collect(), Some(k)))
        }
        TailSource::ScaledLeaves => {
            let tree = args.tree.build(cloud)?;
            Ok((tree.leaf_occupancies().iter().map(|&c| c as f64).collect(), None))
        }
    }
}

#[derive(Debug, Serialize)]
struct FitReport {
    tail_source: TailSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    s: usize,
    values: usize,
    seed: u64,
    replicates: usize,
    lognormal: FitResult,
    powerlaw: FitResult,
    /// Log-normal minus power law.
    comparison: ComparisonResult,
}

pub fn run(cli: &Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Build(args) => {
            let format = check_format(cli.format, &[Format::Json, Format::Dot], "build")?;
            let (cloud, report) = args.tree.input.load(cli.seed)?;
            let tree = args.tree.build(&cloud)?;
            let doc = TreeDocument::from_tree(&tree);
            let body = match format {
                Format::Dot => doc.to_dot(),
                _ => doc.to_json()? + "\n",
            };
            write_output(out, body.as_bytes())?;
            if let Some(path) = report_path(args.report.as_deref(), out) {
                write_output(Some(&path), (report.to_json()? + "\n").as_bytes())?;
            }
            let counts = tree.leaf_counts();
            eprintln!(
                "{} points, {} nodes, {} leaves ({} non-empty, {} overfilled)",
                tree.point_count(),
                tree.node_count(),
                counts.leaves,
                counts.non_empty,
                counts.overfilled
            );
        }
        Command::Metrics(args) => {
            let format = check_format(cli.format, &[Format::Csv, Format::Json], "metrics")?;
            let sweep = match (args.bucket, args.bucket_sweep.is_empty()) {
                (Some(s), _) => vec![s],
                (None, false) => args.bucket_sweep.clone(),
                (None, true) => vec![1],
            };
            let (cloud, _) = args.input.load(cli.seed)?;
            let mut rows = Vec::new();
            for &s in &sweep {
                for scheme in args.scheme.schemes() {
                    rows.push(IndexMetrics::compute(&cloud, s, scheme, args.max_bits)?);
                }
            }
            let body = match format {
                Format::Json => (serde_json::to_string_pretty(&rows)? + "\n").into_bytes(),
                _ => to_csv(&rows)?,
            };
            write_output(out, &body)?;
        }
        Command::Order(args) => {
            check_format(cli.format, &[Format::Csv], "order")?;
            let (cloud, _) = args.input.load(cli.seed)?;
            let tree = args.build(&cloud)?;
            let body: String = tree.ordered_ids().iter().map(|id| format!("{id}\n")).collect();
            write_output(out, body.as_bytes())?;
        }
        Command::Tail(args) => {
            check_format(cli.format, &[Format::Csv], "tail")?;
            let (cloud, _) = args.tree.input.load(cli.seed)?;
            let (values, _) = occupancies(args, &cloud)?;
            write_output(out, stats::tail_ccdf(&values)?.to_csv()?.as_bytes())?;
        }
        Command::Fit(args) => {
            check_format(cli.format, &[Format::Json], "fit")?;
            let (cloud, _) = args.tail.tree.input.load(cli.seed)?;
            let (values, k) = occupancies(&args.tail, &cloud)?;
            let mut lognormal = stats::fit_lognormal(&values)?;
            let mut powerlaw = stats::fit_powerlaw(&values)?;
            let comparison = stats::compare_models(&values, &lognormal, &powerlaw)?;
            if args.replicates > 0 {
                lognormal.gof_p_value =
                    Some(stats::gof_bootstrap(&values, &lognormal, args.replicates, cli.seed)?);
                powerlaw.gof_p_value =
                    Some(stats::gof_bootstrap(&values, &powerlaw, args.replicates, cli.seed)?);
            }
            let report = FitReport {
                tail_source: args.tail.tail_source,
                k,
                s: args.tail.tree.bucket,
                values: values.len(),
                seed: cli.seed,
                replicates: args.replicates,
                lognormal,
                powerlaw,
                comparison,
            };
            write_output(out, (serde_json::to_string_pretty(&report)? + "\n").as_bytes())?;
        }
        Command::Synth(args) => {
            check_format(cli.format, &[Format::Csv], "synth")?;
            let spec = SynthSpec {
                family: args.distribution,
                n: args.dim,
                count: args.count,
                seed: cli.seed,
                mu: args.mu,
                sigma: args.sigma,
                alpha: args.alpha,
                clusters: args.clusters,
                scale: args.scale,
                background: args.background,
            };
            let cloud = synth::generate(&spec)?;
            let mut body = Vec::new();
            synth::write_csv(&cloud, &mut body)?;
            write_output(out, &body)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_sweeps_and_attrs() {
        let cli = Cli::try_parse_from([
            "gray-hilbert",
            "metrics",
            "--input",
            "a.csv",
            "--attrs",
            "x,y:cat",
            "--bucket-sweep",
            "1,2,4",
            "--scheme",
            "both",
        ])
        .unwrap();
        let Command::Metrics(m) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(m.bucket_sweep, vec![1, 2, 4]);
        assert_eq!(m.input.attrs[1], "y:cat".parse().unwrap());
        assert_eq!(cli.seed, 42);
    }

    #[test]
    fn bucket_and_sweep_conflict() {
        let r = Cli::try_parse_from([
            "gray-hilbert", "metrics", "--input", "a.csv", "--attrs", "x", "--bucket", "1",
            "--bucket-sweep", "1,2",
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn report_path_follows_out() {
        assert_eq!(
            report_path(None, Some(Path::new("dir/tree.json"))),
            Some(PathBuf::from("dir/tree.ingest.json"))
        );
        assert_eq!(report_path(None, None), None);
    }

    #[test]
    fn rejects_unsupported_formats() {
        assert!(check_format(Some(Format::Dot), &[Format::Csv], "order").is_err());
        assert_eq!(check_format(None, &[Format::Csv, Format::Json], "x").unwrap(), Format::Csv);
    }
}
