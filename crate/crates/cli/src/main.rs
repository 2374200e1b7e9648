use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use attnstab_cli::{concordance_from_summary, parse_methods, render_concordance, run, AnalysisConfig};
use attnstab_core::graph::PerturbMode;
use attnstab_core::Variant;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "attnstab", version, about = "Attention and stability analyses for signed weighted digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run analyses on a model file and write CSV tables plus summary.json.
    Analyze(Box<AnalyzeArgs>),
    /// Recompute the ranking concordance stored in a summary.json.
    Concordance {
        #[arg(long)]
        summary: PathBuf,
        /// Overrides the top-k stored in the summary.
        #[arg(long)]
        top_k: Option<usize>,
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value = "appendix")]
    variant: Variant,
    /// Comma-separated subset of attention, spectral, motifs, nstc, or `all`.
    #[arg(long = "method", num_args = 1.., required = true)]
    methods: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long = "seed", num_args = 1..)]
    seeds: Vec<u64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    leaky_slope: Option<f64>,
    #[arg(long)]
    perturb_node: Option<usize>,
    #[arg(long)]
    perturb_factor: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    delta_max: Option<f64>,
    #[arg(long)]
    delta_step: Option<f64>,
    /// `column` adds delta to the whole column, `nonzero` only to existing edges.
    #[arg(long)]
    perturb_mode: Option<PerturbMode>,
    #[arg(long)]
    max_motif_size: Option<usize>,
    #[arg(long)]
    top_k: Option<usize>,
}

impl AnalyzeArgs {
    fn into_config(self) -> Result<AnalysisConfig> {
        let mut c = AnalysisConfig::new(self.model, self.out);
        c.variant = self.variant;
        c.methods = parse_methods(&self.methods)?;
        if !self.seeds.is_empty() {
            c.seeds = self.seeds;
        }
        macro_rules! set {
            ($($field:ident <- $arg:ident),* $(,)?) => {
                $(if let Some(v) = self.$arg { c.$field = v; })*
            };
        }
        set!(
            iterations <- iters,
            learning_rate <- lr,
            leaky_slope <- leaky_slope,
            perturb_node <- perturb_node,
            perturb_factor <- perturb_factor,
            delta_min <- delta_min,
            delta_max <- delta_max,
            delta_step <- delta_step,
            perturb_mode <- perturb_mode,
            max_motif_size <- max_motif_size,
            top_k <- top_k,
        );
        Ok(c)
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<()> {
    match Cli::parse().command {
        Command::Analyze(args) => {
            let config = args.into_config()?;
            let out = run(&config)?;
            for path in &out.artifacts {
                println!("wrote {}", path.display());
            }
            print!("{}", render_concordance(&out.summary.concordance));
        }
        Command::Concordance { summary, top_k, json } => {
            let report = concordance_from_summary(&summary, top_k)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&report)?);
            } else {
                print!("{}", render_concordance(&report));
            }
        }
    }
    Ok(())
}
