use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hdlss_hybrid::cli::{self, Overrides, RunConfig};
use hdlss_hybrid::eval::PipelineMode;
use hdlss_hybrid::select::SelectionMethod;
use hdlss_hybrid::synth::SynthSpec;
use hdlss_hybrid::{Error, ErrorClass};

#[derive(Parser)]
#[command(name = "hdlss", version, about = "Penalized-regression / MLP hybrids for HDLSS tabular data")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pipeline {
    Prototype,
    Refined,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-validate the four models and write reports.
    Run {
        /// JSON configuration; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        pipeline: Option<Pipeline>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// l1, elasticnet, mutual_info or prototype_l1_nonzero
        #[arg(long)]
        select_method: Option<SelectionMethod>,
        /// Train folds concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Write a synthetic five-file dataset with known informative features.
    GenSynth {
        #[arg(long)]
        out: PathBuf,
        /// JSON synthetic spec; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        n_samples: Option<usize>,
        #[arg(long)]
        n_features: Option<usize>,
        #[arg(long)]
        n_informative: Option<usize>,
        #[arg(long)]
        coefficient_scale: Option<f64>,
        #[arg(long)]
        missing_fraction: Option<f64>,
        #[arg(long)]
        categorical_fraction: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::InvalidConfig(format!("config file {} not found", path.display())),
        _ => Error::InvalidConfig(format!("cannot read {}: {e}", path.display())),
    })
}

fn execute(command: Command) -> Result<(), Error> {
    match command {
        Command::Run {
            config,
            pipeline,
            data_dir,
            out,
            seed,
            folds,
            k,
            select_method,
            parallel,
        } => {
            let json = config.as_ref().map(read).transpose()?;
            let overrides = Overrides {
                pipeline: pipeline.map(|p| match p {
                    Pipeline::Prototype => PipelineMode::Prototype,
                    Pipeline::Refined => PipelineMode::Refined,
                }),
                data_dir,
                output_dir: out,
                seed,
                n_folds: folds,
                k,
                select_method,
                parallel_folds: parallel.then_some(true),
            };
            let config = RunConfig::resolve(json.as_deref(), &overrides)?;
            let summary = cli::run(&config)?;
            println!(
                "{} rows ({} positive), {} folds -> {}",
                summary.n_rows,
                summary.n_positive,
                summary.report.folds.len(),
                summary.output_dir.display()
            );
            for (name, m) in &summary.report.mean_metrics {
                println!(
                    "  {name:<18} acc {:.4}  prec {:.4}  rec {:.4}  f1 {:.4}  auc {:.4}",
                    m.accuracy, m.precision, m.recall, m.f1, m.auc
                );
            }
            Ok(())
        }
        Command::GenSynth {
            out,
            config,
            n_samples,
            n_features,
            n_informative,
            coefficient_scale,
            missing_fraction,
            categorical_fraction,
            seed,
        } => {
            let mut spec: SynthSpec = match &config {
                Some(p) => serde_json::from_str(&read(p)?)?,
                None => SynthSpec::default(),
            };
            macro_rules! set {
                ($($f:ident),*) => { $(if let Some(v) = $f { spec.$f = v; })* };
            }
            set!(n_samples, n_features, n_informative, coefficient_scale, missing_fraction, categorical_fraction, seed);
            let truth = cli::gen_synth(&spec, &out)?;
            println!(
                "wrote {} samples x {} features ({} informative, positive rate {:.3}) to {}",
                spec.n_samples,
                spec.n_features,
                truth.informative_indices.len(),
                truth.positive_rate,
                out.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Args::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (class, code) = match e.class() {
                ErrorClass::Config => ("ConfigError", 2),
                ErrorClass::Data => ("DataError", 3),
                ErrorClass::Train => ("TrainError", 4),
            };
            eprintln!("hdlss: {class} in {}: {e}", e.module());
            ExitCode::from(code)
        }
    }
}
