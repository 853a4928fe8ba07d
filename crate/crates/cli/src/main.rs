use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use log::{debug, info};
use rayon::prelude::*;

use tusk::corpus::load_report_with;
use tusk::eval::{evaluate, Eligibility};
use tusk::lexicon::{LexiconBuilder, SHIPPED_ANIMALS, SHIPPED_COUNTRIES, SHIPPED_PRODUCTS};
use tusk::report::RenderedReport;
use tusk::store::{import_csv_path, ReportMeta};
use tusk::{Abbreviations, EventStore, HeuristicConfig, Lexicon, Pipeline, TraffickingEvent};

/// Extract wildlife trafficking events from enforcement briefs.
#[derive(Parser, Debug)]
#[command(name = "tusk", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// ANIMAL lexicon CSV (default: shipped list)
    #[arg(long, global = true, value_name = "CSV")]
    animals: Option<PathBuf>,
    /// PRODUCT lexicon CSV (default: shipped list)
    #[arg(long, global = true, value_name = "CSV")]
    products: Option<PathBuf>,
    /// COUNTRY lexicon CSV (default: shipped list)
    #[arg(long, global = true, value_name = "CSV")]
    countries: Option<PathBuf>,
    /// key=value file of assembly windows
    #[arg(long, global = true, value_name = "FILE")]
    heuristics: Option<PathBuf>,
    /// Sentence-internal abbreviations, one per line
    #[arg(long, global = true, value_name = "FILE")]
    abbreviations: Option<PathBuf>,
    /// SQLite event store
    #[arg(long, global = true, value_name = "DB", default_value = "tusk.db")]
    store: PathBuf,
    #[arg(short, long, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract events from briefs (files or directories) into the store
    Extract {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        /// Worker threads (default: one per core)
        #[arg(long, short)]
        jobs: Option<usize>,
    },
    /// Score predictions against a gold CSV
    Eval {
        #[arg(long)]
        gold: PathBuf,
        /// Predictions CSV (default: events in the store)
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Machine-readable key: value report
        #[arg(long, default_value = "evaluation.txt")]
        out: PathBuf,
        /// Match pairs agreeing on any field, not just species or product
        #[arg(long)]
        any_field: bool,
    },
    /// Write all stored events as CSV
    Export {
        /// Output file (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write summary.json and dashboard.html
    Report {
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
    /// Check lexicon files and print entry counts
    LexiconValidate { paths: Vec<PathBuf> },
}

type Failure = (u8, String);

type Extracted = Result<(ReportMeta, Vec<TraffickingEvent>), String>;

fn usage(message: impl ToString) -> Failure {
    (1, message.to_string())
}

fn require_file(path: &Path, what: &str) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{what} `{}` is not a readable file", path.display())))
    }
}

fn load_lexicon(global: &GlobalArgs) -> Result<Lexicon, Failure> {
    let mut builder = LexiconBuilder::default();
    for (path, shipped, origin) in [
        (&global.animals, SHIPPED_ANIMALS, "animals.csv"),
        (&global.products, SHIPPED_PRODUCTS, "products.csv"),
        (&global.countries, SHIPPED_COUNTRIES, "countries.csv"),
    ] {
        match path {
            Some(p) => builder.add_file(p).map(|_| ()),
            None => builder.add_source(shipped, origin).map(|_| ()),
        }
        .map_err(usage)?;
    }
    builder.build().map_err(usage)
}

fn collect_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, Failure> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let entries = fs::read_dir(input).map_err(|e| usage(format!("{}: {e}", input.display())))?;
            let mut found: Vec<PathBuf> = entries
                .filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|p| p.is_file())
                .filter(|p| {
                    !p.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with('.'))
                })
                .collect();
            found.sort();
            files.extend(found);
        } else if input.is_file() {
            files.push(input.clone());
        } else {
            return Err(usage(format!("input `{}` does not exist", input.display())));
        }
    }
    Ok(files)
}

fn extract(global: &GlobalArgs, inputs: &[PathBuf], jobs: Option<usize>) -> Result<(), Failure> {
    for (path, what) in [
        (&global.heuristics, "heuristics file"),
        (&global.abbreviations, "abbreviations file"),
    ] {
        if let Some(p) = path {
            require_file(p, what)?;
        }
    }
    let files = collect_inputs(inputs)?;
    let lexicon = load_lexicon(global)?;
    let config = match &global.heuristics {
        Some(p) => HeuristicConfig::load(p).map_err(usage)?,
        None => HeuristicConfig::default(),
    };
    let abbreviations = match &global.abbreviations {
        Some(p) => Abbreviations::load(p).map_err(usage)?,
        None => Abbreviations::default(),
    };
    let pipeline = Pipeline::new(&lexicon, config);
    info!("lexicon {} with {} surfaces", lexicon.version(), lexicon.len());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(usage)?;
    let results: Vec<(PathBuf, Extracted)> = pool.install(|| {
        files
            .par_iter()
            .map(|path| {
                let result = load_report_with(path, &abbreviations)
                    .map(|doc| {
                        debug!("{}: {} sentences", path.display(), doc.sentences.len());
                        (ReportMeta::from(&doc), pipeline.extract(&doc))
                    })
                    .map_err(|e| e.to_string());
                (path.clone(), result)
            })
            .collect()
    });

    let mut store = EventStore::open(&global.store).map_err(usage)?;
    let (mut failed, mut total) = (0usize, 0usize);
    for (path, result) in results {
        let outcome = result.and_then(|(meta, events)| store.ingest_report(&meta, &events).map_err(|e| e.to_string()));
        match outcome {
            Ok(n) => {
                println!("{}: {n} events", path.display());
                total += n;
            }
            Err(message) => {
                eprintln!("error: {}: {message}", path.display());
                failed += 1;
            }
        }
    }
    println!("{total} events from {} reports", files.len() - failed);
    if failed > 0 {
        return Err((2, format!("{failed} of {} inputs failed", files.len())));
    }
    Ok(())
}

fn eval(
    global: &GlobalArgs,
    gold: &Path,
    predictions: Option<&Path>,
    out: &Path,
    any_field: bool,
) -> Result<(), Failure> {
    require_file(gold, "gold file")?;
    let gold = import_csv_path(gold).map_err(|e| usage(format!("{}: {e}", gold.display())))?;
    let predicted = match predictions {
        Some(p) => import_csv_path(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        None => {
            require_file(&global.store, "store")?;
            EventStore::open(&global.store)
                .and_then(|s| s.events())
                .map_err(usage)?
        }
    };
    let eligibility = if any_field {
        Eligibility::AnyField
    } else {
        Eligibility::SpeciesOrProduct
    };
    let report = evaluate(&predicted, &gold, eligibility);
    println!("{report}");
    println!("detection_rate={:.4}", report.detection_rate());
    fs::write(out, report.to_key_value()).map_err(|e| usage(format!("{}: {e}", out.display())))
}

fn export(global: &GlobalArgs, out: Option<&Path>) -> Result<(), Failure> {
    require_file(&global.store, "store")?;
    let store = EventStore::open(&global.store).map_err(usage)?;
    match out {
        Some(path) => store.export_csv_path(path),
        None => store.export_csv(io::stdout().lock()),
    }
    .map_err(usage)
}

fn report(global: &GlobalArgs, out: &Path) -> Result<(), Failure> {
    let store = EventStore::open(&global.store).map_err(usage)?;
    let rendered = RenderedReport::from_store(&store).map_err(usage)?;
    rendered
        .write_to(out)
        .map_err(|e| usage(format!("{}: {e}", out.display())))?;
    println!("wrote {}", out.display());
    Ok(())
}

fn lexicon_validate(global: &GlobalArgs, paths: &[PathBuf]) -> Result<(), Failure> {
    let lexicon = if paths.is_empty() {
        load_lexicon(global)
    } else {
        Lexicon::load_all(paths).map_err(usage)
    };
    let lexicon = lexicon?;
    for (label, n) in lexicon.count_by_label() {
        println!("{label}: {n}");
    }
    println!("total: {} surfaces, version {}", lexicon.len(), lexicon.version());
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Extract { inputs, jobs } => extract(g, inputs, *jobs),
        Command::Eval {
            gold,
            predictions,
            out,
            any_field,
        } => eval(g, gold, predictions.as_deref(), out, *any_field),
        Command::Export { out } => export(g, out.as_deref()),
        Command::Report { out } => report(g, out),
        Command::LexiconValidate { paths } => lexicon_validate(g, paths),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let level = if cli.global.verbose { "debug" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
