// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use spatnet_core::io::{export_graph, export_variables};
use spatnet_core::pipeline::parse_model_sets;
use spatnet_core::{
    fixtures, run, validate_report, write_bundle, AnalysisConfig, Command, EdgeWeighting, Error,
    LatticeOrdering, ReportKind,
};

const EXIT_SCHEMA: u8 = 2;
const EXIT_COMPUTE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "spatnet",
    version,
    about = "Spatial complex-network analysis of regional road and commuting networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Per-node and global network measures (measures.json).
    Analyze(RunArgs),
    /// Small-world ω against randomized and latticeized ensembles (omega.json).
    Omega(RunArgs),
    /// Louvain community detection (communities.json).
    Communities(RunArgs),
    /// Degree-distribution and degree-scaling fits (fits.json, plotdata/).
    Fit(RunArgs),
    /// Variable selection and OLS models for commuters (regression.json).
    Regress(RunArgs),
    /// Every report; regression only when --vars is given.
    All(RunArgs),
    /// Write a seeded synthetic 39-node network and variable table.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Check report files against their schema; the kind is taken from the file name.
    Validate {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Ordering {
    Ingestion,
    Longitude,
}

#[derive(Clone, Copy, ValueEnum)]
enum Weighting {
    Unweighted,
    Km,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    edges: PathBuf,
    /// Variables CSV with class-tagged headers.
    #[arg(long)]
    vars: Option<PathBuf>,
    /// Epoch for travel-time measures, e.g. 2010.
    #[arg(long)]
    epoch: Option<String>,
    /// Required by omega, communities and all.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    swaps_per_edge: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    omega_threshold: Option<f64>,
    /// Significance level gating the correlation sums.
    #[arg(long)]
    alpha: Option<f64>,
    /// Predictor sets, e.g. "S6,B6,O2;S6,B6,O7".
    #[arg(long)]
    models: Option<String>,
    #[arg(long, value_enum, default_value_t = Ordering::Ingestion)]
    lattice_ordering: Ordering,
    #[arg(long, value_enum, default_value_t = Weighting::Unweighted)]
    community_weights: Weighting,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl RunArgs {
    fn config(&self) -> Result<AnalysisConfig, Error> {
        let mut config = AnalysisConfig::new(&self.nodes, &self.edges);
        config.variables = self.vars.clone();
        config.epoch = self.epoch.clone();
        config.seed = self.seed;
        if let Some(v) = self.swaps_per_edge {
            config.swaps_per_edge = v;
        }
        if let Some(v) = self.replicates {
            config.replicates = v;
        }
        if let Some(v) = self.omega_threshold {
            config.omega_threshold = v;
        }
        if let Some(v) = self.alpha {
            config.alpha = v;
        }
        if let Some(text) = &self.models {
            config.models = parse_model_sets(text)?;
        }
        config.lattice_ordering = match self.lattice_ordering {
            Ordering::Ingestion => LatticeOrdering::Ingestion,
            Ordering::Longitude => LatticeOrdering::Longitude,
        };
        config.community_weighting = match self.community_weights {
            Weighting::Unweighted => EdgeWeighting::Unweighted,
            Weighting::Km => EdgeWeighting::Km,
        };
        config.out = self.out.clone();
        Ok(config)
    }
}

fn execute(command: Command, args: &RunArgs) -> Result<(), Error> {
    let config = args.config()?;
    let bundle = run(command, &config)?;
    for path in write_bundle(&bundle, &config.out)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn generate(out: &Path, seed: u64) -> Result<(), Error> {
    let g = fixtures::synthetic_gcn(seed);
    let table = fixtures::synthetic_variables(&g, seed);
    let (mut nodes, mut edges, mut vars) = (Vec::new(), Vec::new(), Vec::new());
    export_graph(&g, &mut nodes, &mut edges)?;
    export_variables(&table, &mut vars)?;
    fs::create_dir_all(out)?;
    for (name, bytes) in [
        ("nodes.csv", nodes),
        ("edges.csv", edges),
        ("variables.csv", vars),
    ] {
        let path = out.join(name);
        fs::write(&path, bytes)?;
        println!("{}", path.display());
    }
    Ok(())
}

fn validate(reports: &[PathBuf]) -> Result<(), Error> {
    for path in reports {
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default();
        let kind = ReportKind::from_file_name(name).ok_or_else(|| {
            Error::Config(format!("{}: not a known report file name", path.display()))
        })?;
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        validate_report(kind, &text)
            .map_err(|e| Error::InvalidReport(format!("{}: {e}", path.display())))?;
        println!("{}: ok", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Cmd::Analyze(a) => execute(Command::Analyze, a),
        Cmd::Omega(a) => execute(Command::Omega, a),
        Cmd::Communities(a) => execute(Command::Communities, a),
        Cmd::Fit(a) => execute(Command::Fit, a),
        Cmd::Regress(a) => execute(Command::Regress, a),
        Cmd::All(a) => execute(Command::All, a),
        Cmd::Generate { out, seed } => generate(out, *seed),
        Cmd::Validate { reports } => validate(reports),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = if e.is_schema() {
                EXIT_SCHEMA
            } else {
                EXIT_COMPUTE
            };
            let record = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": code });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}
