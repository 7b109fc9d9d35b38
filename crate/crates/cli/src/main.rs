use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use arbiter_core::apx::{export_apx, export_names, parse_apx};
use arbiter_core::embedding::{load_embeddings, write_embeddings, EmbeddingTable};
use arbiter_core::encoder::encode_af;
use arbiter_core::framework::ArgumentationFramework;
use arbiter_core::gn::{
    aggregate_votes, argmax, load_checkpoint, predict_samples, save_checkpoint, train,
    GnParameters, GnShape, TrainConfig, DEFAULT_HIDDEN,
};
use arbiter_core::model::convert;
use arbiter_core::model::{
    corpus_files, corpus_stats, load_corpus, load_debate, save_debate, Debate, Stance,
};
use arbiter_core::pipeline::{
    generate, load_experiment_config, metrics, run_experiment, SyntheticConfig,
};
use arbiter_core::sample::{build_samples, load_samples, write_samples, FeatureConfig};
use arbiter_core::semantics::{
    brute_force_extensions, extensions, ArgSet, Semantics, SolverLimits,
};

#[derive(Parser)]
#[command(
    name = "arbiter",
    version,
    about = "Predict debate winners from argumentation graphs"
)]
struct Cli {
    /// Log progress (repeat for more detail; RUST_LOG overrides).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check debate files (or directories of them) against the data model.
    Validate { paths: Vec<PathBuf> },
    /// Corpus size, word count and winner split.
    Stats { corpus: PathBuf },
    /// Encode a debate into an argumentation framework.
    Encode {
        debate: PathBuf,
        /// Write the framework in APX format ("-" for stdout).
        #[arg(long)]
        apx: Option<PathBuf>,
        /// Print argument and attack counts.
        #[arg(long)]
        summary: bool,
        /// Print the argument groups as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Enumerate extensions of a debate or an APX framework.
    Solve {
        /// Debate JSON, or an APX file when it ends in `.apx`.
        input: PathBuf,
        #[arg(long, value_parser = parse_semantics)]
        semantics: Semantics,
        /// Cross-check against exhaustive enumeration (at most 20 arguments).
        #[arg(long)]
        oracle: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Build learning samples for every debate in a corpus.
    BuildSamples {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_parser = parse_semantics)]
        semantics: Semantics,
        #[command(flatten)]
        embeddings: EmbeddingArgs,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Train a graph network on a sample file.
    Train {
        #[arg(long)]
        samples: PathBuf,
        /// TOML file with learning_rate, epochs, batch_size and seed.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_HIDDEN)]
        hidden: usize,
        /// Seed for weight initialization.
        #[arg(long, default_value_t = 0)]
        init_seed: u64,
    },
    /// Predict debate winners from a trained model and a sample file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        samples: PathBuf,
    },
    /// Run a full experiment described by a TOML file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Reuse one split across runs.
        #[arg(long)]
        fixed_split: bool,
        /// Also write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Convert one spreadsheet debate (CSV) to the JSON format.
    Convert {
        csv: PathBuf,
        #[arg(long)]
        id: String,
        /// Winning stance, F or A.
        #[arg(long, value_parser = parse_stance)]
        winner: Stance,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
    },
    /// Write a synthetic corpus and its embedding file.
    Synth {
        #[arg(long)]
        debates: usize,
        #[arg(long)]
        signal: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        dimension: usize,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write hash embeddings for a corpus (no semantic content).
    HashEmbed {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 768)]
        dimension: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct LimitArgs {
    #[arg(long, default_value_t = 100_000)]
    max_extensions: usize,
    /// Wall-clock budget per framework, in seconds.
    #[arg(long, default_value_t = 60.0)]
    timeout: f64,
}

impl LimitArgs {
    fn limits(&self) -> SolverLimits {
        SolverLimits {
            max_extensions: self.max_extensions,
            timeout: Some(Duration::from_secs_f64(self.timeout)),
        }
    }
}

#[derive(Args)]
struct EmbeddingArgs {
    /// Embedding file (`DIM d` header, one row per ADU).
    #[arg(long, conflicts_with = "hash_dim")]
    embeddings: Option<PathBuf>,
    /// Use hash embeddings of this width instead of a file.
    #[arg(long)]
    hash_dim: Option<usize>,
}

impl EmbeddingArgs {
    fn load(&self, debates: &[Debate]) -> Result<EmbeddingTable> {
        match (&self.embeddings, self.hash_dim) {
            (Some(path), _) => Ok(load_embeddings(path)?),
            (None, Some(dim)) => Ok(EmbeddingTable::from_hash(debates, dim, 0)?),
            (None, None) => bail!("pass --embeddings <file> or --hash-dim <d>"),
        }
    }
}

fn parse_semantics(s: &str) -> Result<Semantics, String> {
    s.parse().map_err(|e: arbiter_core::Error| e.to_string())
}

fn parse_stance(s: &str) -> Result<Stance, String> {
    convert::parse_stance_label(s).ok_or_else(|| format!("unknown stance {s:?}"))
}

fn format_set(af: &ArgumentationFramework, set: &ArgSet) -> String {
    let names: Vec<&str> = set.iter().map(|&a| af.name(a)).collect();
    format!("{{{}}}", names.join(","))
}

fn debate_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            out.extend(corpus_files(p)?);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn write_output(path: &Path, text: &str) -> Result<()> {
    if path == Path::new("-") {
        print!("{text}");
        Ok(())
    } else {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Validate { paths } => {
            let files = debate_paths(&paths)?;
            if files.is_empty() {
                bail!(arbiter_core::Error::Validation(
                    "no debate files given".into()
                ));
            }
            let mut first_error = None;
            for file in files {
                match load_debate(&file) {
                    Ok(d) => println!("ok      {} ({})", file.display(), d.id),
                    Err(e) => {
                        println!("invalid {}: {e}", file.display());
                        first_error.get_or_insert(e);
                    }
                }
            }
            if let Some(e) = first_error {
                return Err(e.into());
            }
        }
        Command::Stats { corpus } => {
            println!("{}", corpus_stats(&load_corpus(corpus)?));
        }
        Command::Encode {
            debate,
            apx,
            summary,
            json,
        } => {
            let df = encode_af(&load_debate(debate)?)?;
            let quiet = apx.is_some() || json;
            if let Some(path) = apx {
                write_output(&path, &export_apx(&df.af))?;
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&df.arguments)?);
            }
            if summary || !quiet {
                println!("{}", df.summary());
            }
        }
        Command::Solve {
            input,
            semantics,
            oracle,
            limits,
        } => {
            let af = if input.extension().is_some_and(|e| e == "apx") {
                let text = fs::read_to_string(&input)
                    .with_context(|| format!("reading {}", input.display()))?;
                parse_apx(&text)?
            } else {
                let af = encode_af(&load_debate(&input)?)?.af;
                let names = export_names(&af);
                ArgumentationFramework::new(names, af.attacks().iter().copied())?
            };
            let sets = extensions(&af, semantics, limits.limits())?;
            for set in &sets {
                println!("{}", format_set(&af, set));
            }
            log::info!("{} {semantics} extensions", sets.len());
            if oracle {
                let expected = brute_force_extensions(&af, semantics)?;
                if expected != sets {
                    bail!(
                        "solver disagrees with exhaustive enumeration ({} vs {} extensions)",
                        sets.len(),
                        expected.len()
                    );
                }
                eprintln!("oracle agrees: {} extensions", sets.len());
            }
        }
        Command::BuildSamples {
            corpus,
            semantics,
            embeddings,
            out,
            limits,
        } => {
            let debates = load_corpus(corpus)?;
            let emb = embeddings.load(&debates)?;
            let mut samples = Vec::new();
            for d in &debates {
                let df = encode_af(d).with_context(|| format!("encoding {}", d.id))?;
                let exts = arbiter_core::semantics::solve_debate(&df, semantics, limits.limits())?;
                samples.extend(build_samples(&df, &exts, &emb, &FeatureConfig::default())?);
            }
            write_samples(&samples, &out)?;
            println!(
                "{} {semantics} samples from {} debates",
                samples.len(),
                debates.len()
            );
        }
        Command::Train {
            samples,
            config,
            out,
            hidden,
            init_seed,
        } => {
            let samples = load_samples(samples)?;
            let cfg: TrainConfig = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    toml_config(&text)?
                }
                None => TrainConfig::default(),
            };
            let first = samples.first().context("sample file is empty")?;
            let edge_dim = samples
                .iter()
                .find_map(|s| s.edge_dim())
                .unwrap_or(FeatureConfig::default().edge_dim);
            let shape = GnShape {
                node_dim: first.node_dim().context("sample without nodes")?,
                edge_dim,
                global_dim: first.global.len(),
                hidden,
            };
            let outcome = train(GnParameters::init(shape, init_seed), &samples, &cfg)?;
            save_checkpoint(&outcome.params, &out)?;
            println!(
                "trained on {} samples for {} epochs, final loss {:.6}",
                samples.len(),
                cfg.epochs,
                outcome.loss_history.last().copied().unwrap_or(f64::NAN)
            );
        }
        Command::Predict { model, samples } => {
            let params = load_checkpoint(model)?;
            let samples = load_samples(samples)?;
            let probs = predict_samples(&params, &samples)?;
            let mut by_debate: Vec<(String, Stance, Vec<[f64; 2]>)> = Vec::new();
            for (s, p) in samples.iter().zip(&probs) {
                match by_debate.iter_mut().find(|(id, _, _)| *id == s.debate_id) {
                    Some(entry) => entry.2.push(*p),
                    None => by_debate.push((s.debate_id.clone(), s.label, vec![*p])),
                }
            }
            let mut preds = Vec::new();
            let mut golds = Vec::new();
            for (id, gold, p) in &by_debate {
                let vote = aggregate_votes(p)?;
                println!(
                    "{id}\tpredicted {}\tconfidence {:.4}\tgold {gold}\tsamples {}",
                    vote.class,
                    vote.confidence,
                    p.len()
                );
                preds.push(vote.class);
                golds.push(*gold);
            }
            if !golds.is_empty() {
                println!("debate-wise    {}", metrics(&preds, &golds)?);
                let sample_preds: Vec<Stance> = probs.iter().map(|p| argmax(*p)).collect();
                let sample_golds: Vec<Stance> = samples.iter().map(|s| s.label).collect();
                println!("extension-wise {}", metrics(&sample_preds, &sample_golds)?);
            }
        }
        Command::Run {
            config,
            fixed_split,
            json,
        } => {
            let mut cfg = load_experiment_config(&config)?;
            cfg.fixed_split |= fixed_split;
            let report = run_experiment(&cfg)?;
            print!("{}", report.to_text());
            if let Some(path) = json {
                write_output(&path, &report.to_json())?;
            }
        }
        Command::Convert {
            csv,
            id,
            winner,
            out,
            delimiter,
        } => {
            if !delimiter.is_ascii() {
                bail!("delimiter must be an ASCII character");
            }
            let layout = convert::CsvLayout {
                delimiter: delimiter as u8,
                ..convert::CsvLayout::default()
            };
            let file = File::open(&csv).with_context(|| format!("opening {}", csv.display()))?;
            let (debate, report) = convert::from_csv(file, &id, winner, &layout)?;
            debate.validate()?;
            save_debate(&debate, &out)?;
            println!(
                "{}: {} ADUs, {} relations from {} rows",
                debate.id,
                debate.adus.len(),
                debate.relations.len(),
                report.rows
            );
            if !report.is_clean() {
                eprintln!("{}", serde_json::to_string_pretty(&report)?);
            }
        }
        Command::Synth {
            debates,
            signal,
            seed,
            dimension,
            out_dir,
        } => {
            let (corpus, emb) = generate(&SyntheticConfig {
                debates,
                signal,
                seed,
                dimension,
            })?;
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            for d in &corpus {
                save_debate(d, out_dir.join(format!("{}.json", d.id)))?;
            }
            write_embeddings(&emb, out_dir.join("embeddings.txt"))?;
            println!("{} debates written to {}", corpus.len(), out_dir.display());
        }
        Command::HashEmbed {
            corpus,
            dimension,
            seed,
            out,
        } => {
            let debates = load_corpus(corpus)?;
            let emb = EmbeddingTable::from_hash(&debates, dimension, seed)?;
            write_embeddings(&emb, &out)?;
            println!("{} embeddings of width {dimension}", emb.len());
        }
    }
    Ok(())
}

fn toml_config(text: &str) -> Result<TrainConfig> {
    let cfg: TrainConfig =
        toml::from_str(text).map_err(|e| arbiter_core::Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// 2 for bad input data or configuration, 3 for exceeded solver limits.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<arbiter_core::Error>() {
        Some(e) if e.is_resource_limit() => 3,
        Some(e)
            if e.is_validation()
                || matches!(
                    e.root(),
                    arbiter_core::Error::Config(_) | arbiter_core::Error::InvalidInput(_)
                ) =>
        {
            2
        }
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
