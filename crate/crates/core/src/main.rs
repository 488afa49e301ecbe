use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use outerkit::cochain::Cochain;
use outerkit::corpus::{self, CORPUS};
use outerkit::io;
use outerkit::report::Report;
use outerkit::suites::{run_suites, Instance, RunConfig, Suite};
use outerkit::walk::{self, MeasureFamily};
use outerkit::{Error, Result};

#[derive(Parser)]
#[command(
    name = "outerkit",
    version,
    about = "Exact and numerical checks for cocycle-twisted groupoid actions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a JSON report.
    Run(RunArgs),
    /// Write the bundled example corpus as JSON files.
    EmitExamples {
        /// Output directory.
        #[arg(long, default_value = "data")]
        out_dir: PathBuf,
        /// Generator strings; the whole corpus when omitted.
        #[arg(long = "kind")]
        kinds: Vec<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CocycleKind {
    Trivial,
    Generator,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureKind {
    Uniform,
    Perturbed,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Groupoid JSON file.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    input: Option<PathBuf>,
    /// Built-in groupoid: pair:M, cyclic:K, bundle:X:K, transformation:K:M or swap.
    #[arg(long)]
    generate: Option<String>,
    /// 3-cocycle JSON file; trivial when omitted.
    #[arg(long, requires = "input")]
    cocycle: Option<PathBuf>,
    /// Measure JSON file; uniform when omitted.
    #[arg(long, requires = "input")]
    measure: Option<PathBuf>,
    /// Cocycle for a generated groupoid.
    #[arg(long, value_enum, default_value = "trivial", requires = "generate")]
    cocycle_kind: CocycleKind,
    /// Measure for a generated groupoid.
    #[arg(long, value_enum, default_value = "uniform", requires = "generate")]
    measure_kind: MeasureKind,
    /// `all` or a comma-separated list of axioms, cocycle, walk, model, invariants, appendix.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Highest model level.
    #[arg(long, default_value_t = 2)]
    level: usize,
    /// Residual tolerance for floating-point checks.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Reiter profile depth.
    #[arg(long, default_value_t = 12)]
    depth: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Randomly generated cocycles in the cocycle suite.
    #[arg(long, default_value_t = 100)]
    cocycle_samples: usize,
    /// Random samples in the walk suite.
    #[arg(long, default_value_t = 1000)]
    walk_samples: usize,
    /// Members of the normal subgroupoid, comma separated.
    #[arg(long, value_delimiter = ',')]
    normal: Option<Vec<usize>>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reiter profiles as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn load_instance(args: &RunArgs) -> Result<Instance> {
    if let Some(kind) = &args.generate {
        let ex = corpus::generate(kind)?;
        return Ok(Instance::from_example(
            &ex,
            matches!(args.cocycle_kind, CocycleKind::Generator),
            matches!(args.measure_kind, MeasureKind::Perturbed),
        ));
    }
    let path = args.input.as_ref().expect("clap requires input or generate");
    let groupoid = io::read_groupoid(path)?;
    let violations = groupoid.validate();
    // Reading cochains and measures needs a valid groupoid; otherwise only
    // the axiom suite can report.
    let (cocycle, measure) = if violations.is_empty() {
        let c = match &args.cocycle {
            Some(p) => io::read_cochain(&groupoid, 3, p)?,
            None => Cochain::trivial(&groupoid, 3),
        };
        let mu = match &args.measure {
            Some(p) => io::read_measure(&groupoid, p)?,
            None => MeasureFamily::uniform(&groupoid),
        };
        (c, mu)
    } else {
        (Cochain::trivial(&groupoid, 3), MeasureFamily::units_only(&groupoid))
    };
    Ok(Instance {
        name: path.display().to_string(),
        groupoid,
        cocycle,
        measure,
        hom: None,
    })
}

fn run(args: RunArgs) -> Result<bool> {
    let suites = Suite::parse_list(&args.suite)?;
    let config = RunConfig {
        level: args.level,
        tol: args.tol,
        depth: args.depth,
        seed: args.seed,
        cocycle_samples: args.cocycle_samples,
        walk_samples: args.walk_samples,
        normal: args.normal.clone(),
    };
    config.validate()?;
    let instance = load_instance(&args)?;
    let reports = run_suites(&instance, &suites, &config)?;
    let config_json = json!({
        "input": args.input,
        "cocycle": args.cocycle,
        "measure": args.measure,
        "generate": args.generate,
        "cocycle_kind": args.generate.as_ref().map(|_| match args.cocycle_kind {
            CocycleKind::Trivial => "trivial",
            CocycleKind::Generator => "generator",
        }),
        "measure_kind": args.generate.as_ref().map(|_| match args.measure_kind {
            MeasureKind::Uniform => "uniform",
            MeasureKind::Perturbed => "perturbed",
        }),
        "suites": suites.iter().map(|s| s.name()).collect::<Vec<_>>(),
        "run": config,
        "theta": "a single automorphism generating a ℤ-action stands in for the flow",
    });
    let report = Report::new(config_json, reports);
    let text = io::to_json(&report)?;
    match &args.out {
        Some(p) => fs::write(p, &text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    if let Some(p) = &args.csv {
        if instance.groupoid.validate().is_empty() {
            let profiles = walk::reiter_profiles(&instance.groupoid, &instance.measure.to_f64(), config.depth);
            walk::write_profiles_csv(fs::File::create(p)?, &profiles)?;
        }
    }
    for suite in &report.suites {
        let failed: Vec<&str> = suite
            .checks
            .iter()
            .filter(|c| c.failed())
            .map(|c| c.name.as_str())
            .collect();
        if failed.is_empty() {
            eprintln!("{}: pass ({} checks)", suite.suite, suite.checks.len());
        } else {
            eprintln!("{}: FAIL {}", suite.suite, failed.join(", "));
        }
        for note in suite.notes.iter().filter(|_| !suite.passed) {
            eprintln!("  {note}");
        }
    }
    Ok(report.passed)
}

fn emit_examples(out_dir: PathBuf, kinds: Vec<String>) -> Result<()> {
    let kinds: Vec<String> = if kinds.is_empty() {
        CORPUS.iter().map(|s| s.to_string()).collect()
    } else {
        kinds
    };
    for kind in kinds {
        let ex = corpus::generate(&kind)?;
        for p in corpus::emit(&ex, &out_dir)? {
            println!("{}", p.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::EmitExamples { out_dir, kinds } => emit_examples(out_dir, kinds).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::DimensionCap { .. } = e {
                eprintln!("lower --level or use a smaller groupoid");
            }
            ExitCode::from(2)
        }
    }
}
