//! Command-line entry point for the experiment suites.
//!
//! Every flag may also be given in a `key = value` file passed with
//! `--config`; flags on the command line win.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use healsim::experiments::{
    parse_key_values, reward_rows, rows_to_csv, run_analytical, run_reward, run_scalability,
    scalability_rows, RewardSpec, Scenario, ScalabilitySpec, TraceRef,
};
use healsim::planners::validate::{validate_rule_set, ExceptionInjecting};
use healsim::planners::{OracleConfig, OracleStrategy, PlannerConfig, PlannerId};
use healsim::profiles::{
    generate_realistic, generate_synthetic, named_trace, Dist, FailureProfileModel, TraceLength,
};
use healsim::rules::{RuleCosts, RuleSet, TemplateId};
use healsim::sim::{runs_to_csv, PlanningTimeMode, MAX_REPS};
use healsim::Error;

#[derive(Parser, Debug)]
#[command(name = "healsim", version, about = "Self-healing planner experiments", args_override_self = true)]
struct Cli {
    /// `key = value` file mirroring the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a failure trace CSV.
    GenTrace(GenTraceArgs),
    /// Measure planning time over architecture sizes and failure-group sizes.
    Scalability(ScalabilityArgs),
    /// Simulate planners over traces and compare reward.
    Reward(RewardArgs),
    /// Replay the pinned analytical scenarios.
    Analytical(AnalyticalArgs),
    /// Check the rule set against the planning assumptions.
    ValidateRules(ValidateArgs),
}

#[derive(Args, Debug)]
struct GenTraceArgs {
    /// synthetic, lri, deug, grid5000, uniform, single, bigburst or custom.
    model: String,
    /// Trace length for the realistic models: short or long.
    #[arg(long, default_value = "short")]
    variant: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Synthetic: failures per group.
    #[arg(long)]
    fgs: Option<usize>,
    /// Synthetic: number of groups.
    #[arg(long)]
    runs: Option<usize>,
    /// Synthetic: seconds between groups.
    #[arg(long)]
    iat: Option<f64>,
    /// Use the fixed preset parameters for uniform/single/bigburst instead of deriving them.
    #[arg(long)]
    published: bool,
    /// Custom: group-size distribution, e.g. `LOGN(1.88,1.25)`.
    #[arg(long)]
    fgs_dist: Option<String>,
    /// Custom: inter-arrival distribution.
    #[arg(long)]
    iat_dist: Option<String>,
    /// Custom: exposure window in seconds.
    #[arg(long)]
    fet: Option<f64>,
    /// Custom: number of bursts.
    #[arg(long)]
    bursts: Option<usize>,
    /// Custom: trace duration in seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Normalize the total failure count to this value.
    #[arg(long)]
    density: Option<usize>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScalabilityArgs {
    #[arg(long, value_delimiter = ',', default_values_t = ["static".to_string(), "udriven".to_string(), "oracle".to_string()])]
    planner: Vec<String>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 10, 100, 1000])]
    shops: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 10, 100, 1000])]
    fgs: Vec<usize>,
    /// Repetition cap per cell.
    #[arg(long, default_value_t = MAX_REPS)]
    reps: usize,
    /// Repetition cap for oracle cells.
    #[arg(long, default_value_t = 5)]
    oracle_reps: usize,
    /// Largest group size the oracle is measured on.
    #[arg(long, default_value_t = 1000)]
    oracle_max_fgs: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    oracle: OracleArgs,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct RewardArgs {
    #[arg(long, value_delimiter = ',', default_values_t = ["static".to_string(), "udriven".to_string(), "oracle".to_string()])]
    planner: Vec<String>,
    #[arg(long, default_value_t = 100)]
    shops: usize,
    /// Trace references: a model name (`grid5000`, `lri:long`, `single:7`),
    /// `synthetic:<fgs>x<runs>@<iat>` or a CSV path.
    #[arg(long, value_delimiter = ',', default_values_t = ["grid5000".to_string()])]
    trace: Vec<String>,
    /// First simulation seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive simulation seeds.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    /// Seed for traces that do not pin one.
    #[arg(long, default_value_t = 0)]
    trace_seed: u64,
    #[arg(long, default_value_t = 100)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0f64])]
    likelihood: Vec<f64>,
    #[arg(long, default_value = "calibrated")]
    planning_time_mode: String,
    /// Per-template cost overrides, e.g. `RESTART=3,REPLACE=12`.
    #[arg(long, value_delimiter = ',')]
    cost: Vec<String>,
    /// Also write per-simulation timelines and run records.
    #[arg(long)]
    timelines: bool,
    #[command(flatten)]
    oracle: OracleArgs,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Oracle search: auto, enumerate, exchange or decomposed.
    #[arg(long, default_value = "auto")]
    oracle_strategy: String,
    /// Most issues the oracle enumerates exhaustively.
    #[arg(long, default_value_t = 6)]
    oracle_limit: usize,
}

#[derive(Args, Debug)]
struct AnalyticalArgs {
    /// fig10a, fig10b, fig11, fig14 or all.
    #[arg(default_value = "all")]
    scenario: String,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Success likelihood of the rules.
    #[arg(long, default_value_t = 1.0)]
    likelihood: f64,
    /// Validate a rule set whose repairs also raise exceptions elsewhere.
    #[arg(long)]
    inject_exceptions: bool,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Usage(m),
            e => Failure::Runtime(e.to_string()),
        }
    }
}

fn usage(m: impl Into<String>) -> Failure {
    Failure::Usage(m.into())
}

fn runtime(m: impl Into<String>) -> Failure {
    Failure::Runtime(m.into())
}

/// Re-parses with the config file's entries placed before the command-line
/// flags, so that the command line overrides them.
fn parse() -> Result<Cli, Failure> {
    let argv: Vec<String> = std::env::args().collect();
    let cli = try_parse(&argv)?;
    let Some(path) = &cli.config else { return Ok(cli) };
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut injected = Vec::new();
    for (k, v) in parse_key_values(&text)? {
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => injected.push(format!("--{k}={v}")),
        }
    }
    let sub = argv
        .iter()
        .position(|a| {
            ["gen-trace", "scalability", "reward", "analytical", "validate-rules"].contains(&a.as_str())
        })
        .ok_or_else(|| usage("missing subcommand"))?;
    let mut merged = argv[..=sub].to_vec();
    merged.extend(injected);
    merged.extend_from_slice(&argv[sub + 1..]);
    try_parse(&merged)
}

fn try_parse(argv: &[String]) -> Result<Cli, Failure> {
    Cli::try_parse_from(argv).map_err(|e| {
        use clap::error::ErrorKind;
        if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
            print!("{e}");
            std::process::exit(0);
        }
        usage(e.to_string().trim_start_matches("error: ").to_string())
    })
}

fn planners(names: &[String], oracle: &OracleArgs) -> Result<Vec<PlannerConfig>, Failure> {
    let strategy = match oracle.oracle_strategy.to_ascii_lowercase().as_str() {
        "auto" => OracleStrategy::Auto,
        "enumerate" => OracleStrategy::Enumerate,
        "exchange" => OracleStrategy::Exchange,
        "decomposed" => OracleStrategy::Decomposed,
        s => return Err(usage(format!("unknown oracle strategy {s:?}"))),
    };
    names
        .iter()
        .map(|n| {
            let id: PlannerId = n.parse().map_err(|e: healsim::model::ModelError| usage(e.to_string()))?;
            Ok(match id {
                PlannerId::Oracle => PlannerConfig::Oracle(OracleConfig {
                    strategy,
                    exhaustive_limit: oracle.oracle_limit,
                }),
                id => PlannerConfig::default_for(id),
            })
        })
        .collect()
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn gen_trace(a: &GenTraceArgs) -> Result<(), Failure> {
    let length: TraceLength = a.variant.parse().map_err(|e: healsim::profiles::ProfileError| usage(e.to_string()))?;
    let name = a.model.to_ascii_lowercase();
    let trace = match name.as_str() {
        "synthetic" => {
            let (Some(fgs), Some(runs)) = (a.fgs, a.runs.or(Some(1))) else {
                return Err(usage("synthetic traces need --fgs"));
            };
            let iat = a.iat.unwrap_or(1_728.0);
            generate_synthetic(fgs, runs, iat, a.seed).map_err(|e| usage(e.to_string()))?
        }
        "custom" => {
            let dist = |s: &Option<String>, flag: &str| -> Result<Dist, Failure> {
                s.as_deref()
                    .ok_or_else(|| usage(format!("custom traces need --{flag}")))?
                    .parse()
                    .map_err(|e: healsim::profiles::ProfileError| usage(e.to_string()))
            };
            let model = FailureProfileModel {
                name: "custom".into(),
                fgs: dist(&a.fgs_dist, "fgs-dist")?,
                iat: dist(&a.iat_dist, "iat-dist")?,
                fet_s: a.fet.unwrap_or(0.0),
                bursts: a.bursts.ok_or_else(|| usage("custom traces need --bursts"))?,
                duration_s: a.duration.ok_or_else(|| usage("custom traces need --duration"))?,
            };
            generate_realistic(&model, a.seed, a.density).map_err(|e| usage(e.to_string()))?
        }
        "uniform" | "single" | "bigburst" if a.published => {
            let model = FailureProfileModel::named(&name, length).map_err(|e| usage(e.to_string()))?;
            generate_realistic(&model, a.seed, a.density).map_err(|e| usage(e.to_string()))?
        }
        _ => match a.density {
            Some(d) => {
                let model = FailureProfileModel::named(&name, length).map_err(|e| usage(e.to_string()))?;
                generate_realistic(&model, a.seed, Some(d)).map_err(|e| usage(e.to_string()))?
            }
            None => named_trace(&name, length, a.seed).map_err(|e| usage(e.to_string()))?,
        },
    };
    let csv = trace.to_csv();
    match &a.out {
        Some(p) => {
            write(p, &csv)?;
            eprintln!("wrote {} failures to {}", trace.density(), p.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn scalability(a: &ScalabilityArgs) -> Result<(), Failure> {
    let spec = ScalabilitySpec {
        shops: a.shops.clone(),
        fgs: a.fgs.clone(),
        planners: planners(&a.planner, &a.oracle)?,
        max_reps: a.reps.max(1),
        oracle_max_reps: a.oracle_reps.max(1),
        oracle_max_fgs: a.oracle_max_fgs,
        k: a.k.unwrap_or(usize::MAX),
        seed: a.seed,
    };
    let (cells, notices) = run_scalability(&spec)?;
    for n in &notices {
        eprintln!("notice: {n}");
    }
    println!("{:>10} {:>6} {:>10} {:>14} {:>12} {:>6}", "components", "fgs", "planner", "mean_ms", "sd_ms", "reps");
    for c in &cells {
        println!(
            "{:>10} {:>6} {:>10} {:>14.4} {:>12.4} {:>6}",
            c.components,
            c.fgs,
            c.planner,
            c.stats.mean_s * 1e3,
            c.stats.sd_s * 1e3,
            c.stats.reps
        );
    }
    let path = a.out.join("scalability.csv");
    write(&path, &rows_to_csv(&scalability_rows(&cells)))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn costs(overrides: &[String]) -> Result<RuleCosts, Failure> {
    let mut costs = RuleCosts::default();
    for o in overrides {
        let (t, c) = o.split_once('=').ok_or_else(|| usage(format!("bad cost override {o:?}")))?;
        let template: TemplateId = t.trim().parse().map_err(|_| usage(format!("unknown template {t:?}")))?;
        let cost: f64 = c.trim().parse().map_err(|_| usage(format!("bad cost {c:?}")))?;
        if cost.is_nan() || cost <= 0.0 {
            return Err(usage(format!("cost of {template} must be positive")));
        }
        costs.set(template, cost);
    }
    Ok(costs)
}

fn reward(a: &RewardArgs) -> Result<(), Failure> {
    let mode: PlanningTimeMode = a
        .planning_time_mode
        .parse()
        .map_err(|e: healsim::model::ModelError| usage(e.to_string()))?;
    if let Some(p) = a.likelihood.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
        return Err(usage(format!("likelihood {p} outside (0, 1]")));
    }
    let spec = RewardSpec {
        shops: a.shops,
        planners: planners(&a.planner, &a.oracle)?,
        traces: a.trace.iter().map(|t| t.parse()).collect::<Result<Vec<TraceRef>, _>>()?,
        seeds: (a.seed..a.seed + a.seeds.max(1)).collect(),
        likelihoods: a.likelihood.clone(),
        k: a.k,
        planning_time_mode: mode,
        costs: costs(&a.cost)?,
        trace_seed: a.trace_seed,
    };
    let outcomes = run_reward(&spec)?;
    let rows = reward_rows(&spec, &outcomes);
    println!("{:<28} {:>10} {:>20} {:>14}", "trace", "planner", "mean reward", "sd");
    for r in rows.iter().filter(|r| r.metric == "reward") {
        println!("{:<28} {:>10} {:>20.3} {:>14.3}", r.trace, r.planner, r.value, r.stddev);
    }
    let path = a.out.join(if spec.likelihoods.len() > 1 { "likelihood.csv" } else { "reward.csv" });
    write(&path, &rows_to_csv(&rows))?;
    eprintln!("wrote {}", path.display());
    if a.timelines {
        for o in &outcomes {
            let stem = format!("{}_{}_s{}_p{}", o.trace, o.planner, o.seed, o.likelihood);
            write(&a.out.join("timelines").join(format!("{stem}.csv")), &o.result.timeline.to_csv())?;
            write(&a.out.join("timelines").join(format!("{stem}_runs.csv")), &runs_to_csv(&o.result.runs))?;
        }
    }
    Ok(())
}

fn analytical(a: &AnalyticalArgs) -> Result<(), Failure> {
    let scenarios: Vec<Scenario> = if a.scenario.eq_ignore_ascii_case("all") {
        Scenario::ALL.to_vec()
    } else {
        vec![a.scenario.parse()?]
    };
    for s in scenarios {
        let o = run_analytical(s)?;
        println!("{s}:");
        for (p, r) in &o.results {
            let steps: Vec<String> = r
                .executions
                .iter()
                .map(|e| format!("{}:{}@{:.3}", e.failure, e.action, e.end_s))
                .collect();
            println!("  {:<9} reward {:>14.3}  final {:>10.3}  {}", p.to_string(), r.reward(), r.final_utility, steps.join(" "));
            write(&a.out.join(format!("{s}_{p}.csv")), &r.timeline.to_csv())?;
            write(&a.out.join(format!("{s}_{p}_runs.csv")), &runs_to_csv(&r.runs))?;
        }
    }
    eprintln!("wrote timelines to {}", a.out.display());
    Ok(())
}

fn validate(a: &ValidateArgs) -> Result<(), Failure> {
    if !(a.likelihood > 0.0 && a.likelihood <= 1.0) {
        return Err(usage(format!("likelihood {} outside (0, 1]", a.likelihood)));
    }
    let rules = RuleSet {
        likelihood: a.likelihood,
        ..RuleSet::default()
    };
    let report = if a.inject_exceptions {
        validate_rule_set(&ExceptionInjecting(rules), a.seed)
    } else {
        validate_rule_set(&rules, a.seed)
    };
    println!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(runtime(format!("{} assumption violations", report.violations.len())))
    }
}

fn main() -> ExitCode {
    let result = parse().and_then(|cli| match &cli.command {
        Command::GenTrace(a) => gen_trace(a),
        Command::Scalability(a) => scalability(a),
        Command::Reward(a) => reward(a),
        Command::Analytical(a) => analytical(a),
        Command::ValidateRules(a) => validate(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {}", m.trim_end());
            ExitCode::from(1)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
