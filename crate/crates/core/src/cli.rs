//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{analyze_observability, dump_matrices, write_certificates, AnalysisReport, NeighborMethod};
use crate::error::{Error, Result};
use crate::game::build_game;
use crate::ranking::MeasureSpec;
use crate::reduction::{build_reduced_game, gap_report, tables_json};
use crate::sim::{AdversarySource, ExperimentConfig, LearnerKind, Preset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rankwatch", version, about = "Online ranking with top-k feedback as a partial-monitoring game")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify the game and report its observability structure.
    Analyze(GameArgs),
    /// Export observability certificates (and estimator tables for pn).
    Certify(GameArgs),
    /// Play one episode and write its trace.
    Run(RunArgs),
    /// Sweep horizons, average regret over reps, and fit a log-log slope.
    Sweep(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Pl,
    Sl,
    Dcg,
    Pn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct GameArgs {
    #[arg(long, value_enum)]
    pub measure: MeasureArg,
    #[arg(long)]
    pub m: usize,
    /// Cutoff for pn.
    #[arg(long)]
    pub n: Option<usize>,
    /// Feedback depth; defaults to 1.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// analyze/certify: csv also dumps L, H and every S_i under --out.
    /// run: trace as csv (default) or json. sweep always writes both.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[command(flatten)]
    pub game: GameArgs,
    #[arg(long)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Preset name (uniform, gap, hard-sl) or path to a JSON spec.
    #[arg(long, default_value = "gap")]
    pub adversary: String,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

fn validation(flag: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("--{flag}: {msg}"))
}

fn measure_spec(args: &GameArgs) -> Result<MeasureSpec> {
    let spec = match (args.measure, args.n) {
        (MeasureArg::Pn, Some(n)) => MeasureSpec::pn(n),
        (MeasureArg::Pn, None) => return Err(validation("n", "required for --measure pn")),
        (_, Some(_)) => return Err(validation("n", "only valid with --measure pn")),
        (MeasureArg::Pl, None) => MeasureSpec::pl(),
        (MeasureArg::Sl, None) => MeasureSpec::sl(),
        (MeasureArg::Dcg, None) => MeasureSpec::dcg(),
    };
    if args.m == 0 {
        return Err(validation("m", "must be at least 1"));
    }
    if let Some(n) = spec.n {
        if n == 0 || n > args.m {
            return Err(validation("n", format!("must lie in 1..={}", args.m)));
        }
    }
    if args.k == 0 || args.k > args.m {
        return Err(validation("k", format!("must lie in 1..={}", args.m)));
    }
    Ok(spec)
}

fn out_dir(args: &GameArgs) -> PathBuf {
    args.out.clone().unwrap_or_else(|| PathBuf::from("."))
}

fn analyze(args: &GameArgs) -> Result<()> {
    let spec = measure_spec(args)?;
    if args.m > crate::game::DEFAULT_MAX_OBJECTS {
        return Err(validation("m", format!("at most {} for explicit games", crate::game::DEFAULT_MAX_OBJECTS)));
    }
    let game = build_game(spec, args.m, args.k)?;
    let summary = analyze_observability(&game, NeighborMethod::Auto)?;
    let mut report = AnalysisReport::new(&game, &summary);
    if let Some(dir) = &args.out {
        let cert = write_certificates(&game, &summary, dir)?;
        report.certificate_files.push(cert.display().to_string());
        if args.format == Some(Format::Csv) {
            dump_matrices(&game, dir)?;
        }
        std::fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    }
    match args.format {
        Some(Format::Csv) => {
            println!("key,value");
            let value = serde_json::to_value(&report)?;
            for (k, v) in value.as_object().expect("report is an object") {
                println!("{k},\"{}\"", v.to_string().replace('"', "'"));
            }
        }
        _ => println!("{}", serde_json::to_string_pretty(&report)?),
    }
    Ok(())
}

fn certify(args: &GameArgs) -> Result<()> {
    let spec = measure_spec(args)?;
    let dir = out_dir(args);
    std::fs::create_dir_all(&dir)?;
    let mut written = Vec::new();
    if let Some(n) = spec.n {
        if n < args.m {
            let reduced = build_reduced_game(args.m, n)?;
            let path = dir.join("v_tables.json");
            std::fs::write(&path, serde_json::to_string_pretty(&tables_json(&reduced))?)?;
            written.push(path);
            let path = dir.join("gap_report.json");
            std::fs::write(&path, serde_json::to_string_pretty(&gap_report(&reduced))?)?;
            written.push(path);
        }
    }
    if args.m <= crate::game::DEFAULT_MAX_OBJECTS {
        let game = build_game(spec, args.m, args.k)?;
        let summary = analyze_observability(&game, NeighborMethod::Auto)?;
        written.push(write_certificates(&game, &summary, &dir)?);
        if args.format == Some(Format::Csv) {
            dump_matrices(&game, &dir)?;
        }
    }
    for p in written {
        println!("{}", p.display());
    }
    Ok(())
}

fn load_adversary(arg: &str) -> Result<AdversarySource> {
    if let Some(preset) = Preset::parse(arg) {
        return Ok(AdversarySource::Preset { preset });
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(validation(
            "adversary",
            format!("'{arg}' is neither a preset (uniform, gap, hard-sl) nor a file"),
        ));
    }
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map(AdversarySource::Spec)
        .map_err(|e| validation("adversary", e))
}

fn experiment(args: &RunArgs) -> Result<ExperimentConfig> {
    let spec = measure_spec(&args.game)?;
    if args.horizon == 0 {
        return Err(validation("horizon", "must be positive"));
    }
    if args.reps == 0 {
        return Err(validation("reps", "must be at least 1"));
    }
    if let Some(eta) = args.eta {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(validation("eta", "must be positive"));
        }
    }
    if let Some(g) = args.gamma {
        if !(g > 0.0 && g < 1.0) {
            return Err(validation("gamma", "must lie in (0, 1)"));
        }
    }
    let (m, k) = (args.game.m, args.game.k);
    let config = ExperimentConfig {
        measure: spec,
        m,
        k,
        learner: LearnerKind::default_for(spec, m, k),
        adversary: load_adversary(&args.adversary)?,
        horizon: args.horizon,
        reps: args.reps,
        seed: args.seed,
        eta: args.eta,
        gamma: args.gamma,
        exploration: None,
    };
    config.validate()?;
    Ok(config)
}

fn run(args: &RunArgs) -> Result<()> {
    let config = experiment(args)?;
    let dir = out_dir(&args.game);
    std::fs::create_dir_all(&dir)?;
    let trace = config.run_episode(config.horizon, 0)?;
    let path = match args.game.format {
        Some(Format::Json) => {
            let path = dir.join("trace.json");
            let doc = serde_json::json!({
                "fingerprint": config.fingerprint(),
                "config": config,
                "final_regret": trace.final_regret(),
                "rows": trace.rows.iter().map(|r| serde_json::json!({
                    "t": r.t,
                    "sampled_class": r.label,
                    "realized_loss": r.loss,
                    "feedback": r.feedback,
                    "cum_regret": r.cum_regret,
                })).collect::<Vec<_>>(),
            });
            std::fs::write(&path, serde_json::to_string_pretty(&doc)?)?;
            path
        }
        _ => {
            let path = dir.join("trace.csv");
            std::fs::write(&path, format!("{}{}", config.preamble(), trace.csv_body()))?;
            path
        }
    };
    println!("{}", path.display());
    println!("final regret {}", trace.final_regret());
    Ok(())
}

fn sweep(args: &RunArgs) -> Result<()> {
    let config = experiment(args)?;
    let dir = out_dir(&args.game);
    std::fs::create_dir_all(&dir)?;
    let result = crate::sim::run_sweep(&config)?;
    let csv = dir.join("sweep.csv");
    std::fs::write(&csv, format!("{}{}", config.preamble(), result.csv_body()))?;
    let summary = dir.join("sweep_summary.json");
    std::fs::write(&summary, serde_json::to_string_pretty(&result.summary_json())?)?;
    println!("{}", csv.display());
    println!("{}", summary.display());
    println!("slope {:.4} r2 {:.4}", result.fit.slope, result.fit.r2);
    Ok(())
}

fn is_validation(e: &Error) -> bool {
    !matches!(e, Error::Io(_) | Error::Json(_) | Error::Convergence { .. })
}

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Certify(a) => certify(a),
        Command::Run(a) => run(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if is_validation(&e) {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
