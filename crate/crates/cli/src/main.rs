use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dagforge::expr::parse;
use dagforge::graph::CompiledModel;
use dagforge::output::{write_csv, write_manifest};
use dagforge::sampler::{simulate, RunConfig, SimError, DEFAULT_MAX_REJECTION_FACTOR};
use dagforge::spec::{parse_model, to_dot, validate, ModelSpec, SpecError};
use dagforge::stdlib::FunctionRegistry;

const SEED_ENV: &str = "DAGFORGE_SEED";

const EXIT_IO: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_STARVED: u8 = 3;

/// Sample synthetic datasets from DAG models written in YAML.
#[derive(Parser)]
#[command(name = "dagforge", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model and print its structure.
    Validate { spec: PathBuf },
    /// Simulate a model and write CSV files plus a manifest.
    Run(RunArgs),
    /// Print the model graph.
    Graph {
        spec: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
}

#[derive(clap::Args)]
struct RunArgs {
    spec: PathBuf,
    /// Overrides the model's seed and $DAGFORGE_SEED.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    num_samples: Option<u64>,
    /// Output directory; defaults to the model's output_dir or the current directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace a node's expression, as NODE=EXPR. Repeatable.
    #[arg(long, value_name = "NODE=EXPR")]
    intervene: Vec<String>,
    #[arg(long, default_value_t = DEFAULT_MAX_REJECTION_FACTOR)]
    max_rejection_factor: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { spec } => cmd_validate(&spec),
        Command::Run(args) => cmd_run(&args),
        Command::Graph { spec, format } => cmd_graph(&spec, format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn registry() -> FunctionRegistry {
    let mut r = FunctionRegistry::with_builtins();
    dagforge::bundled::register(&mut r).expect("bundled helper names are unique");
    r
}

fn load(path: &Path, registry: &FunctionRegistry) -> Result<(ModelSpec, CompiledModel), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))?;
    let spec = parse_model(&text).map_err(|e| {
        let code = if matches!(e, SpecError::Yaml(_)) { EXIT_IO } else { EXIT_INVALID };
        Failure::new(code, format!("{}: {e}", path.display()))
    })?;
    for w in &spec.warnings {
        eprintln!("warning: {w}");
    }
    let model = validate(&spec, registry)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{} is not a valid model:\n{e}", path.display())))?;
    Ok((spec, model))
}

fn cmd_validate(path: &Path) -> Result<(), Failure> {
    let (_, model) = load(path, &registry())?;
    println!("{} nodes, {} edges", model.nodes().len(), model.edges().len());
    println!("order: {}", model.topo_order().join(" "));
    Ok(())
}

fn cmd_graph(path: &Path, format: Format) -> Result<(), Failure> {
    let (_, model) = load(path, &registry())?;
    match format {
        Format::Dot => print!("{}", to_dot(&model)),
    }
    Ok(())
}

fn env_seed() -> Result<Option<u64>, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::new(EXIT_INVALID, format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), Failure> {
    let registry = registry();
    let (spec, model) = load(&args.spec, &registry)?;
    let ins = &spec.instructions;

    let seed = match (args.seed, ins.seed) {
        (Some(s), _) | (None, Some(s)) => s,
        (None, None) => env_seed()?.unwrap_or(0),
    };
    let num_samples = args.num_samples.unwrap_or(ins.num_samples);
    if num_samples == 0 {
        return Err(Failure::new(EXIT_INVALID, "--num-samples must be at least 1"));
    }
    if args.max_rejection_factor == 0 {
        return Err(Failure::new(EXIT_INVALID, "--max-rejection-factor must be at least 1"));
    }

    let mut interventions = BTreeMap::new();
    for item in &args.intervene {
        let Some((node, text)) = item.split_once('=') else {
            return Err(Failure::new(EXIT_INVALID, format!("--intervene {item:?}: expected NODE=EXPR")));
        };
        let node = node.trim();
        let expr = parse(text)
            .map_err(|e| Failure::new(EXIT_INVALID, format!("--intervene {item:?}: {e}")))?;
        if interventions.insert(node.to_string(), expr).is_some() {
            return Err(Failure::new(EXIT_INVALID, format!("--intervene given twice for {node}")));
        }
    }

    let config = RunConfig {
        num_samples,
        seed,
        interventions,
        max_rejection_factor: args.max_rejection_factor,
        threads: args.threads,
    };
    let ds = simulate(&model, &config, &registry).map_err(|e| {
        let code = match e {
            SimError::SelectionStarvation { .. } => EXIT_STARVED,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    })?;

    let dir = match (&args.out, &ins.output_dir) {
        (Some(d), _) => d.clone(),
        (None, Some(d)) if d.is_relative() => args.spec.parent().unwrap_or(Path::new("")).join(d),
        (None, Some(d)) => d.clone(),
        (None, None) => PathBuf::from("."),
    };
    let io = |e: dagforge::output::OutputError| {
        let code = match e {
            dagforge::output::OutputError::StratumName(_) => EXIT_INVALID,
            _ => EXIT_IO,
        };
        Failure::new(code, e.to_string())
    };
    let paths = write_csv(&ds, &dir, &ins.csv_name).map_err(io)?;
    let manifest = write_manifest(&model, &ds, &config, &paths, &dir, &ins.csv_name).map_err(io)?;

    eprintln!("kept {} of {} attempted samples (seed {seed})", ds.rows.len(), ds.attempts);
    for p in paths.iter().chain(std::iter::once(&manifest)) {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}
