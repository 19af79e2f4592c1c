use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use trusskit::diagnostics::{self, FeatureSource};
use trusskit::io::{write_csv, write_json, write_matrix_csv};
use trusskit::{AnrdProfile, FeatureMatrix, Graph, PropagationConfig, SparsifyConfig};

/// k-truss decomposition, truss-based sparsification and oversmoothing
/// diagnostics.
#[derive(Debug, Parser)]
#[command(name = "trusskit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write every edge with its trussness as a weighted edge list.
    Truss {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Sparsify one graph; writes the edge list and a JSON report.
    Sparsify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: SparsifyArgs,
        #[arg(short, long)]
        output: PathBuf,
        /// Defaults to `<output>.report.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// ANRD per k-truss region across propagation depths, as CSV.
    Diagnose(DiagnoseArgs),
    /// Pruning rate over an (eta, delta) grid, as CSV.
    Sweep {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_delimiter = ',', default_value = "3")]
        eta: Vec<u32>,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
        #[command(flatten)]
        variant: VariantArgs,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Sparsify every graph of a TU dataset into a new TU directory.
    Batch {
        /// Directory holding NAME_A.txt, NAME_graph_indicator.txt, ...
        #[arg(short, long)]
        input: PathBuf,
        /// Dataset name; defaults to the input directory name.
        #[arg(long)]
        name: Option<String>,
        #[command(flatten)]
        params: SparsifyArgs,
        /// Output directory for the sparsified dataset.
        #[arg(short, long)]
        output: PathBuf,
        /// Defaults to `<output>/NAME_report.json`.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Worker threads (0 = one per core).
        #[arg(long, env = "TRUSSKIT_JOBS", default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Edgelist,
    Tu,
}

#[derive(Debug, Args)]
struct InputArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "edgelist")]
    format: Format,
    /// TU dataset name; defaults to the input directory name.
    #[arg(long)]
    name: Option<String>,
    /// Graph to use from a TU dataset (0-based).
    #[arg(long, default_value_t = 0)]
    graph: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AggregatorArg {
    Mean,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CombinerArg {
    Min,
    Mean,
}

#[derive(Debug, Args)]
struct VariantArgs {
    #[arg(long, value_enum, default_value = "mean")]
    aggregator: AggregatorArg,
    #[arg(long, value_enum, default_value = "min")]
    combiner: CombinerArg,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    prune_batch: u8,
}

#[derive(Debug, Args)]
struct SparsifyArgs {
    #[arg(long, default_value_t = SparsifyConfig::DEFAULT_ETA)]
    eta: u32,
    #[arg(long)]
    delta: f64,
    #[command(flatten)]
    variant: VariantArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FeatureKind {
    Degree,
    Random,
    Labels,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Deepest propagation; rows are emitted for 0..=layers.
    #[arg(long, default_value_t = 2)]
    layers: usize,
    #[arg(long, default_value_t = 0.5)]
    coeff: f64,
    #[arg(long)]
    no_self_loops: bool,
    /// Truss levels to profile; defaults to every level present.
    #[arg(long, value_delimiter = ',')]
    k_values: Vec<u32>,
    #[arg(long, value_enum, default_value = "degree")]
    features: FeatureKind,
    /// Width of random features.
    #[arg(long, default_value_t = 16)]
    dim: usize,
    /// Degrees at or above this share the last one-hot column.
    #[arg(long, default_value_t = 10)]
    degree_cap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the ESM after `layers` rounds as CSV.
    #[arg(long)]
    esm: Option<PathBuf>,
}

impl VariantArgs {
    fn apply(&self, cfg: SparsifyConfig) -> SparsifyConfig {
        cfg.with_aggregator(match self.aggregator {
            AggregatorArg::Mean => trusskit::Aggregator::Mean,
            AggregatorArg::Min => trusskit::Aggregator::Min,
        })
        .with_combiner(match self.combiner {
            CombinerArg::Min => trusskit::Combiner::Min,
            CombinerArg::Mean => trusskit::Combiner::Mean,
        })
        .with_prune_batch(self.prune_batch as usize)
    }
}

impl SparsifyArgs {
    fn config(&self) -> SparsifyConfig {
        self.variant
            .apply(SparsifyConfig::new(self.eta, self.delta))
    }
}

fn dataset_name(dir: &Path, name: &Option<String>) -> Result<String> {
    match name {
        Some(n) => Ok(n.clone()),
        None => dir
            .file_name()
            .and_then(|s| s.to_str())
            .map(str::to_string)
            .with_context(|| {
                format!(
                    "cannot infer a dataset name from {}; pass --name",
                    dir.display()
                )
            }),
    }
}

/// The graph plus its node labels when the source has them.
fn load(input: &InputArgs) -> Result<(Graph, Option<Vec<i64>>)> {
    match input.format {
        Format::Edgelist => Ok((trusskit::read_edge_list(&input.input)?, None)),
        Format::Tu => {
            let name = dataset_name(&input.input, &input.name)?;
            let mut bundle = trusskit::read_tu_dataset(&input.input, &name)?;
            if input.graph >= bundle.len() {
                bail!(
                    "graph {} requested but {name} has {} graphs",
                    input.graph,
                    bundle.len()
                );
            }
            let labels = bundle
                .node_labels
                .take()
                .map(|mut l| l.swap_remove(input.graph));
            Ok((bundle.graphs.swap_remove(input.graph), labels))
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(serde::Serialize)]
struct DiagnoseMeta<'a> {
    features: &'a FeatureSource,
    propagation: PropagationConfig,
    k_values: &'a [u32],
    layers: Vec<usize>,
    notices: &'a [String],
}

fn diagnose(args: &DiagnoseArgs) -> Result<()> {
    let (g, node_labels) = load(&args.input)?;
    let (x, source): (FeatureMatrix, FeatureSource) = match args.features {
        FeatureKind::Degree => (
            diagnostics::degree_one_hot(&g, args.degree_cap),
            FeatureSource::DegreeOneHot {
                cap: args.degree_cap,
            },
        ),
        FeatureKind::Random => (
            diagnostics::random_features(g.node_count(), args.dim, args.seed),
            FeatureSource::Random {
                dim: args.dim,
                seed: args.seed,
            },
        ),
        FeatureKind::Labels => {
            let labels =
                node_labels.context("--features labels needs a TU dataset with node labels")?;
            let x = diagnostics::label_one_hot(&labels);
            let classes = x.cols();
            (x, FeatureSource::NodeLabels { classes })
        }
    };
    let cfg = PropagationConfig {
        layers: args.layers,
        coeff: args.coeff,
        self_loops: !args.no_self_loops,
    };
    let k_values: Vec<u32> = if args.k_values.is_empty() {
        (2..=trusskit::truss_decompose(&g).max_k()).collect()
    } else {
        args.k_values.clone()
    };
    let layers: Vec<usize> = (0..=args.layers).collect();
    let profile: AnrdProfile =
        trusskit::truss_region_anrd_profile(&g, &x, &k_values, &layers, &cfg)?;
    write_csv(&args.output, &profile.rows)?;
    write_json(
        with_suffix(&args.output, ".meta.json"),
        &DiagnoseMeta {
            features: &source,
            propagation: cfg,
            k_values: &k_values,
            layers,
            notices: &profile.notices,
        },
    )?;
    for notice in &profile.notices {
        println!("note: {notice}");
    }
    if let Some(path) = &args.esm {
        let h = trusskit::propagate(&g, &x, &cfg)?;
        write_matrix_csv(path, &trusskit::esm(&h))?;
    }
    println!(
        "{} ANRD rows for k in {:?} over layers 0..={} -> {}",
        profile.rows.len(),
        k_values,
        args.layers,
        args.output.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Truss { input, output } => {
            let (g, _) = load(&input)?;
            let t = trusskit::truss_decompose(&g);
            trusskit::write_weighted_edge_list(&output, &g, &t)?;
            println!(
                "{} nodes, {} edges, max trussness {} -> {}",
                g.node_count(),
                g.edge_count(),
                t.max_k(),
                output.display()
            );
        }
        Command::Sparsify {
            input,
            params,
            output,
            report,
        } => {
            let (g, _) = load(&input)?;
            let (out, rep) = trusskit::tgs_sparsify(&g, &params.config())?;
            trusskit::write_edge_list(&output, &out)?;
            let report_path = report.unwrap_or_else(|| with_suffix(&output, ".report.json"));
            write_json(&report_path, &rep)?;
            println!(
                "pruned {} of {} edges ({:.2}%), {} candidates examined -> {}",
                rep.pruned_count,
                rep.input_edge_count,
                100.0 * rep.pruning_rate,
                rep.examined.len(),
                output.display()
            );
        }
        Command::Diagnose(args) => diagnose(&args)?,
        Command::Sweep {
            input,
            eta,
            delta,
            variant,
            output,
        } => {
            let (g, _) = load(&input)?;
            let base = variant.apply(SparsifyConfig::new(SparsifyConfig::DEFAULT_ETA, 0.0));
            let rows = trusskit::sweep(&g, &eta, &delta, &base)?;
            write_csv(&output, &rows)?;
            let flagged = rows.iter().filter(|r| !r.non_increasing).count();
            println!(
                "{} sweep rows, {flagged} where pruning grew with delta -> {}",
                rows.len(),
                output.display()
            );
        }
        Command::Batch {
            input,
            name,
            params,
            output,
            report,
            jobs,
        } => {
            let name = dataset_name(&input, &name)?;
            let bundle = trusskit::read_tu_dataset(&input, &name)?;
            let cfg = params.config();
            let (out, rep) =
                trusskit::par::with_jobs(jobs, || trusskit::batch_sparsify(&bundle, &cfg))?;
            trusskit::write_tu_dataset(&output, &out)?;
            let report_path = report.unwrap_or_else(|| output.join(format!("{name}_report.json")));
            write_json(&report_path, &rep)?;
            println!(
                "{}: {} graphs, edges {} -> {} in {:.2?} -> {}",
                name,
                rep.graphs,
                rep.total_edges_before,
                rep.total_edges_after,
                rep.wall_time,
                output.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            // library errors already fold their source into the message
            let mut msg = err.to_string();
            for cause in err.chain().skip(1) {
                let cause = cause.to_string();
                if !msg.contains(&cause) {
                    msg = format!("{msg}: {cause}");
                }
            }
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
