use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use fastpolar::analysis::{export_pruned_tree, reduction, stats_csv_row, traversal_stats, STATS_CSV_HEADER};
use fastpolar::construction::{
    construct_fast_polar, construct_polar, LayoutDocument, ReliabilityMethod, DEFAULT_DESIGN_SNR_DB,
};
use fastpolar::decoder::{DispatchPolicy, TraversalStats};
use fastpolar::simulation::{
    run_bler_streaming, write_csv, ArithmeticSpec, BlerRecord, LayoutSource, Modulation, SimConfig,
};
use fastpolar::{Error, Layout};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fastpolar",
    version,
    about = "Fast polar code construction, traversal statistics and BLER simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code layout and write it as JSON.
    Construct {
        #[arg(long, value_parser = parse_len)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "ga")]
        method: ReliabilityMethod,
        #[arg(long, default_value_t = DEFAULT_DESIGN_SNR_DB, allow_hyphen_values = true)]
        design_snr: f64,
        /// Apply rate re-allocation so every segment is fast decodable.
        #[arg(long)]
        fast: bool,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print traversal counters of a layout as CSV.
    Stats {
        layout: PathBuf,
        /// Layout to report reductions against.
        #[arg(long)]
        baseline: Option<PathBuf>,
        /// Also write the pruned decoding tree as JSON.
        #[arg(long)]
        tree: Option<PathBuf>,
    },
    /// Run a Monte Carlo BLER simulation described by a config file.
    Simulate {
        config: PathBuf,
        /// Output prefix for CSV and manifest files; defaults to the config
        /// path without its extension.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to the machine parallelism.
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn parse_len(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if n.is_power_of_two() && (32..=1024).contains(&n) {
        Ok(n)
    } else {
        Err(format!("{n} is not a power of two in 32..=1024"))
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Infeasible(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Infeasible(_) => EXIT_INFEASIBLE,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Infeasible(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible { .. } => Failure::Infeasible(e.to_string()),
            Error::Io(_) | Error::InvalidLayout(_) | Error::LengthMismatch { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Construct {
            n,
            k,
            method,
            design_snr,
            fast,
            out,
        } => construct(n, k, method, design_snr, fast, out.as_deref()),
        Command::Stats { layout, baseline, tree } => stats(&layout, baseline.as_deref(), tree.as_deref()),
        Command::Simulate { config, out, workers } => simulate(&config, out.as_deref(), workers),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn construct(
    n: usize,
    k: usize,
    method: ReliabilityMethod,
    design_snr: f64,
    fast: bool,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let snr = (method == ReliabilityMethod::Ga).then_some(design_snr);
    let (doc, layout) = if fast {
        let code = construct_fast_polar(n, k, method, design_snr)?;
        (LayoutDocument::from_fast(&code, method, snr), code.layout())
    } else {
        let spec = construct_polar(n, k, method, design_snr)?;
        (LayoutDocument::from_plain(&spec, method, snr), Layout::from(&spec))
    };
    let json = doc.to_json();
    match out {
        Some(path) => {
            fs::write(path, json + "\n").map_err(|e| io_err(path, e))?;
            print_histogram(
                &mut io::stdout(),
                &traversal_stats(&layout, &DispatchPolicy::hardware()),
            );
        }
        None => {
            println!("{json}");
            print_histogram(
                &mut io::stderr(),
                &traversal_stats(&layout, &DispatchPolicy::hardware()),
            );
        }
    }
    Ok(())
}

fn print_histogram(w: &mut dyn Write, stats: &TraversalStats) {
    for (tag, count) in &stats.histogram {
        let _ = writeln!(w, "{}\t{count}", tag.name());
    }
    let _ = writeln!(w, "total\t{}", stats.terminal_nodes);
}

fn load_layout(path: &Path) -> Result<Layout, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let doc = LayoutDocument::from_json(&text).map_err(|e| io_err(path, e))?;
    let loaded = doc.load().map_err(|e| io_err(path, e))?;
    Ok(loaded.layout())
}

fn label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn stats(path: &Path, baseline: Option<&Path>, tree: Option<&Path>) -> Result<(), Failure> {
    let policy = DispatchPolicy::hardware();
    let layout = load_layout(path)?;
    let s = traversal_stats(&layout, &policy);
    if let Some(tree_path) = tree {
        let t = export_pruned_tree(&layout, &policy);
        let json = serde_json::to_string_pretty(&t).expect("tree serializes");
        fs::write(tree_path, json + "\n").map_err(|e| io_err(tree_path, e))?;
    }
    match baseline {
        None => {
            println!("{STATS_CSV_HEADER}");
            println!("{}", stats_csv_row(&label(path), &s));
        }
        Some(bpath) => {
            let b = traversal_stats(&load_layout(bpath)?, &policy);
            let r = reduction(&b, &s);
            println!("{STATS_CSV_HEADER},nodes_reduction,edges_reduction,f_ops_reduction");
            println!("{},0,0,0", stats_csv_row(&label(bpath), &b));
            println!(
                "{},{:.4},{:.4},{:.4}",
                stats_csv_row(&label(path), &s),
                r.nodes,
                r.edges,
                r.f_ops
            );
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(t) => vec![t.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Simulation config file. `layout` and `arithmetic` take a single value or
/// a list; every combination becomes one output series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    n: usize,
    k: usize,
    layout: OneOrMany<LayoutSource>,
    #[serde(default = "default_arith")]
    arithmetic: OneOrMany<ArithmeticSpec>,
    snr_grid_db: Vec<f64>,
    #[serde(default)]
    method: Option<ReliabilityMethod>,
    #[serde(default)]
    design_snr_db: Option<f64>,
    #[serde(default)]
    modulation: Option<Modulation>,
    #[serde(default)]
    llr_clip: Option<f64>,
    #[serde(default)]
    max_frames: Option<u64>,
    #[serde(default)]
    target_errors: Option<u64>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    noiseless: Option<bool>,
}

fn default_arith() -> OneOrMany<ArithmeticSpec> {
    OneOrMany::One(ArithmeticSpec::Float)
}

impl RunFile {
    fn configs(&self) -> Vec<SimConfig> {
        let mut out = Vec::new();
        for layout in self.layout.to_vec() {
            for arithmetic in self.arithmetic.to_vec() {
                let mut c = SimConfig::new(layout, self.n, self.k, self.snr_grid_db.clone());
                c.arithmetic = arithmetic;
                c.llr_clip = self.llr_clip;
                if let Some(m) = self.method {
                    c.method = m;
                }
                if let Some(s) = self.design_snr_db {
                    c.design_snr_db = s;
                }
                if let Some(m) = self.modulation {
                    c.modulation = m;
                }
                if let Some(m) = self.max_frames {
                    c.max_frames = m;
                }
                if let Some(t) = self.target_errors {
                    c.target_errors = t;
                }
                if let Some(s) = self.seed {
                    c.seed = s;
                }
                if let Some(z) = self.noiseless {
                    c.noiseless = z;
                }
                out.push(c);
            }
        }
        out
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    revision: String,
    seed: u64,
    workers: usize,
    config: &'a RunFile,
    series: Vec<SeriesEntry>,
}

#[derive(Serialize)]
struct SeriesEntry {
    csv: String,
    /// Fully resolved settings of the series.
    config: SimConfig,
    records: Vec<BlerRecord>,
}

fn revision() -> String {
    let git = std::process::Command::new("git")
        .args(["rev-parse", "--short", "HEAD"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string());
    match git {
        Some(rev) if !rev.is_empty() => format!("{}-g{rev}", env!("CARGO_PKG_VERSION")),
        _ => env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn simulate(path: &Path, out: Option<&Path>, workers: Option<usize>) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let run: RunFile =
        toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {}", path.display(), e.message())))?;
    let configs = run.configs();
    for c in &configs {
        c.validate()?;
    }
    let prefix = out.map(Path::to_path_buf).unwrap_or_else(|| path.with_extension(""));
    let workers = workers
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
        .max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Failure::Usage(e.to_string()))?;

    let mut layouts: BTreeMap<String, Layout> = BTreeMap::new();
    for c in &configs {
        if let std::collections::btree_map::Entry::Vacant(e) = layouts.entry(c.layout.to_string()) {
            e.insert(c.build_layout()?);
        }
    }
    let mut series = Vec::new();
    println!("series,snr_db,ebn0_db,frames,frame_errors,bit_errors,bler,ber");
    for c in &configs {
        let layout = &layouts[&c.layout.to_string()];
        let name = format!("{}_{}", c.layout, c.arithmetic.label());
        let mut records = Vec::new();
        pool.install(|| {
            run_bler_streaming(layout, c, |r| {
                println!(
                    "{name},{},{},{},{},{},{},{}",
                    r.snr_db, r.ebn0_db, r.frames, r.frame_errors, r.bit_errors, r.bler, r.ber
                );
                let _ = io::stdout().flush();
                records.push(r.clone());
            })
        })?;
        let csv_path = with_suffix(&prefix, &format!("_{name}.csv"));
        let file = fs::File::create(&csv_path).map_err(|e| io_err(&csv_path, e))?;
        write_csv(&records, file).map_err(|e| io_err(&csv_path, e))?;
        series.push(SeriesEntry {
            config: c.clone(),
            csv: csv_path.display().to_string(),
            records,
        });
    }

    let manifest = Manifest {
        tool: "fastpolar",
        version: env!("CARGO_PKG_VERSION"),
        revision: revision(),
        seed: configs.first().map(|c| c.seed).unwrap_or_default(),
        workers,
        config: &run,
        series,
    };
    let manifest_path = with_suffix(&prefix, "_manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, json + "\n").map_err(|e| io_err(&manifest_path, e))?;
    Ok(())
}
