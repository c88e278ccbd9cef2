//! Command-line front end: scenario generation, range/topology planning,
//! validation, adversary simulation, and manifest-driven reruns.
//!
//! Exit codes: 0 success, 1 input error, 2 infeasible, 3 validation failure.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use apmut::generate::{generate_scenario, GenerateParams};
use apmut::rnm::{schedule_from_json, schedule_rnm_with, schedule_to_json, RnmError, RnmOptions};
use apmut::rtm::{
    deployment_from_json, deployment_to_json, plan_deployment, plan_from_json, plan_movement,
    plan_to_json, Deployment, RtmError,
};
use apmut::scenario::{derive_coverage, load_scenario, serialize_scenario, Scenario};
use apmut::sim::{
    adversary_from_json, run_monte_carlo, simulate, trace_to_csv, ConfigSource, MetricsReport,
};
use apmut::solver::DEFAULT_NODE_BUDGET;
use apmut::validate::{check_deployment, check_movement, check_range_schedule, Violation};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "apmut", version = VERSION, about = "AP mutation planning and evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scenario.
    Generate(GenerateArgs),
    /// Compute a range mutation schedule.
    Rnm(RnmArgs),
    /// Topology mutation: deployments and movement plans.
    #[command(subcommand)]
    Rtm(RtmCommand),
    /// Run the adversary simulation.
    Simulate(SimulateArgs),
    /// Check a schedule, deployment, or movement plan.
    Validate(ValidateArgs),
    /// Reproduce a previous run from its manifest.
    Rerun(RerunArgs),
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    aps: usize,
    #[arg(long)]
    users: usize,
    /// Grid dimensions as WxH.
    #[arg(long)]
    grid: String,
    #[arg(long)]
    ranges: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RnmArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    horizon: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    lookback: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RtmCommand {
    /// Choose a new satisfiable deployment.
    Deploy(DeployArgs),
    /// Plan step-by-step movement between two deployments.
    Move(MoveArgs),
}

#[derive(Args)]
struct DeployArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Current deployment JSON; defaults to the scenario's home positions.
    #[arg(long)]
    current: Option<PathBuf>,
    #[arg(long)]
    delta: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MoveArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long)]
    from: PathBuf,
    #[arg(long)]
    to: PathBuf,
    #[arg(long)]
    max_steps: u32,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Schedule or deployment JSON; repeat for a deployment sequence.
    #[arg(long, conflicts_with = "static_config")]
    plan: Vec<PathBuf>,
    /// Simulate the unmutated configuration.
    #[arg(long = "static", conflicts_with = "plan")]
    static_config: bool,
    #[arg(long)]
    adversary: PathBuf,
    #[arg(long)]
    intervals: u32,
    #[arg(long, default_value_t = 0.01)]
    handoff_cost: f64,
    /// Single seed, inclusive range a..b, or comma list.
    #[arg(long)]
    seeds: String,
    /// Repeat the plan cyclically when shorter than --intervals.
    #[arg(long)]
    cyclic: bool,
    /// Per-interval trace CSV for the first seed.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Plot-ready metric-vs-seed CSV.
    #[arg(long)]
    seed_csv: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, conflicts_with_all = ["deployment", "plan"])]
    schedule: Option<PathBuf>,
    #[arg(long, conflicts_with = "plan")]
    deployment: Option<PathBuf>,
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Previous deployment for --deployment, start deployment for --plan.
    #[arg(long)]
    current: Option<PathBuf>,
    /// Minimum number of APs that must have moved (--deployment).
    #[arg(long, default_value_t = 0)]
    delta: u32,
    /// Goal deployment for --plan; defaults to the home positions.
    #[arg(long)]
    to: Option<PathBuf>,
}

#[derive(Args)]
struct RerunArgs {
    #[arg(long)]
    manifest: PathBuf,
}

/// Failures mapped onto the non-zero exit codes.
enum Failure {
    Input(String),
    Infeasible(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Infeasible(_) => 2,
            Failure::Validation(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Infeasible(m) | Failure::Validation(m) => m,
        }
    }
}

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunManifest {
    command: String,
    argv: Vec<String>,
    scenario: Option<String>,
    seeds: Vec<u64>,
    parameters: BTreeMap<String, serde_json::Value>,
    version: String,
    outputs: Vec<String>,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(&argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(argv: &[String]) -> Result<(), Failure> {
    let cli = match Cli::try_parse_from(std::iter::once("apmut".to_string()).chain(argv.iter().cloned()))
    {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Failure::Input(e.to_string())),
    };
    match cli.command {
        Command::Generate(args) => cmd_generate(argv, args),
        Command::Rnm(args) => cmd_rnm(argv, args),
        Command::Rtm(RtmCommand::Deploy(args)) => cmd_deploy(argv, args),
        Command::Rtm(RtmCommand::Move(args)) => cmd_move(argv, args),
        Command::Simulate(args) => cmd_simulate(argv, args),
        Command::Validate(args) => cmd_validate(args),
        Command::Rerun(args) => cmd_rerun(args),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_scenario(path: &Path) -> Result<Scenario, Failure> {
    load_scenario(&read_file(path)?)
        .map(derive_coverage)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_output(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Emit the artifact: to the output file (with a manifest beside it) or to
/// stdout when no output path was given.
fn emit(
    argv: &[String],
    command: &str,
    scenario: Option<&Path>,
    seeds: &[u64],
    parameters: BTreeMap<String, serde_json::Value>,
    out: Option<&Path>,
    content: &str,
    extra_outputs: &[&Path],
) -> Result<(), Failure> {
    match out {
        None => {
            println!("{content}");
            Ok(())
        }
        Some(out) => {
            write_output(out, content)?;
            let mut outputs: Vec<String> = vec![out.display().to_string()];
            outputs.extend(extra_outputs.iter().map(|p| p.display().to_string()));
            let manifest = RunManifest {
                command: command.to_string(),
                argv: argv.to_vec(),
                scenario: scenario.map(|p| p.display().to_string()),
                seeds: seeds.to_vec(),
                parameters,
                version: VERSION.to_string(),
                outputs,
            };
            let path = manifest_path(out);
            let text =
                serde_json::to_string_pretty(&manifest).expect("manifest serialization cannot fail");
            write_output(&path, &text)
        }
    }
}

fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    out.with_file_name(name)
}

fn params_of<const N: usize>(pairs: [(&str, serde_json::Value); N]) -> BTreeMap<String, serde_json::Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn cmd_generate(argv: &[String], args: GenerateArgs) -> Result<(), Failure> {
    let (w, h) = parse_grid(&args.grid)?;
    let scenario = generate_scenario(&GenerateParams {
        aps: args.aps,
        users: args.users,
        grid_width: w,
        grid_height: h,
        ranges: args.ranges,
        seed: args.seed,
    })
    .map_err(input)?;
    let content = serialize_scenario(&scenario);
    emit(
        argv,
        "generate",
        None,
        &[args.seed],
        params_of([
            ("aps", args.aps.into()),
            ("users", args.users.into()),
            ("grid", args.grid.clone().into()),
            ("ranges", args.ranges.into()),
        ]),
        Some(&args.out),
        &content,
        &[],
    )
}

fn parse_grid(text: &str) -> Result<(u32, u32), Failure> {
    let (w, h) = text
        .split_once('x')
        .ok_or_else(|| Failure::Input(format!("grid '{text}' is not WxH")))?;
    Ok((
        w.parse().map_err(|_| Failure::Input(format!("bad grid width '{w}'")))?,
        h.parse().map_err(|_| Failure::Input(format!("bad grid height '{h}'")))?,
    ))
}

fn cmd_rnm(argv: &[String], args: RnmArgs) -> Result<(), Failure> {
    let scenario = read_scenario(&args.scenario)?;
    let options = RnmOptions {
        lookback: args.lookback,
        node_budget: DEFAULT_NODE_BUDGET,
    };
    let schedule = schedule_rnm_with(&scenario, args.horizon, args.seed, &options).map_err(|e| {
        match e {
            RnmError::Unsat => {
                let stuck = scenario.aps.iter().any(|a| a.ranges.len() == 1);
                if stuck && args.horizon >= 2 {
                    Failure::Infeasible("unsatisfiable: unpredictability (an AP has a single range level)".into())
                } else {
                    Failure::Infeasible("unsatisfiable: no schedule meets the constraints".into())
                }
            }
            RnmError::BudgetExceeded => Failure::Infeasible("search budget exhausted (undecided)".into()),
            other => input(other),
        }
    })?;
    emit(
        argv,
        "rnm",
        Some(&args.scenario),
        &[args.seed],
        params_of([
            ("horizon", args.horizon.into()),
            ("lookback", args.lookback.into()),
        ]),
        args.out.as_deref(),
        &schedule_to_json(&scenario, &schedule),
        &[],
    )
}

fn rtm_failure(e: RtmError) -> Failure {
    match e {
        RtmError::Unsat => Failure::Infeasible("unsatisfiable: no solution meets the constraints".into()),
        RtmError::BudgetExceeded => Failure::Infeasible("search budget exhausted (undecided)".into()),
        other => input(other),
    }
}

fn load_deployment(scenario: &Scenario, path: Option<&Path>) -> Result<Deployment, Failure> {
    match path {
        Some(p) => deployment_from_json(scenario, &read_file(p)?)
            .map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => Deployment::initial(scenario).map_err(rtm_failure),
    }
}

fn cmd_deploy(argv: &[String], args: DeployArgs) -> Result<(), Failure> {
    let scenario = read_scenario(&args.scenario)?;
    if args.delta as usize > scenario.aps.len() {
        return Err(Failure::Input("delta exceeds AP count".into()));
    }
    let current = load_deployment(&scenario, args.current.as_deref())?;
    let deployment =
        plan_deployment(&scenario, &current, args.delta, args.seed).map_err(rtm_failure)?;
    emit(
        argv,
        "rtm deploy",
        Some(&args.scenario),
        &[args.seed],
        params_of([("delta", args.delta.into())]),
        args.out.as_deref(),
        &deployment_to_json(&scenario, &deployment),
        &[],
    )
}

fn cmd_move(argv: &[String], args: MoveArgs) -> Result<(), Failure> {
    let scenario = read_scenario(&args.scenario)?;
    let from = load_deployment(&scenario, Some(&args.from))?;
    let to = load_deployment(&scenario, Some(&args.to))?;
    let plan =
        plan_movement(&scenario, &from, &to, args.max_steps, args.seed).map_err(rtm_failure)?;
    emit(
        argv,
        "rtm move",
        Some(&args.scenario),
        &[args.seed],
        params_of([("max_steps", args.max_steps.into())]),
        args.out.as_deref(),
        &plan_to_json(&scenario, &plan),
        &[],
    )
}

fn parse_seeds(text: &str) -> Result<Vec<u64>, Failure> {
    let bad = |t: &str| Failure::Input(format!("bad seed specification '{t}'"));
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad(text))?;
        let b: u64 = b.trim().parse().map_err(|_| bad(text))?;
        if a > b {
            return Err(bad(text));
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad(text)))
        .collect()
}

/// Per-seed metrics row: the report minus its bulky trace.
#[derive(Serialize)]
struct SeedMetrics {
    seed: u64,
    compromised_flow_fraction: f64,
    jam_outage_fraction: f64,
    handoff_count: u64,
    throughput_reduction: f64,
}

impl SeedMetrics {
    fn of(seed: u64, r: &MetricsReport) -> SeedMetrics {
        SeedMetrics {
            seed,
            compromised_flow_fraction: r.compromised_flow_fraction,
            jam_outage_fraction: r.jam_outage_fraction,
            handoff_count: r.handoff_count,
            throughput_reduction: r.throughput_reduction,
        }
    }
}

fn cmd_simulate(argv: &[String], args: SimulateArgs) -> Result<(), Failure> {
    let scenario = read_scenario(&args.scenario)?;
    let adversary = adversary_from_json(&read_file(&args.adversary)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.adversary.display())))?;
    let seeds = parse_seeds(&args.seeds)?;
    if seeds.is_empty() {
        return Err(Failure::Input("no seeds given".into()));
    }

    // The plan files decide the configuration source: one range schedule,
    // or one-or-more deployments replayed in order.
    let mut schedule = None;
    let mut deployments = Vec::new();
    if !args.static_config {
        if args.plan.is_empty() {
            return Err(Failure::Input("pass --plan or --static".into()));
        }
        for path in &args.plan {
            let text = read_file(path)?;
            match schedule_from_json(&scenario, &text) {
                Ok(s) if args.plan.len() == 1 => schedule = Some(s),
                _ => match deployment_from_json(&scenario, &text) {
                    Ok(d) => deployments.push(d),
                    Err(e) => {
                        return Err(Failure::Input(format!(
                            "{}: neither schedule nor deployment: {e}",
                            path.display()
                        )))
                    }
                },
            }
        }
    }
    let source = if args.static_config {
        ConfigSource::Static
    } else if let Some(s) = &schedule {
        ConfigSource::Range(s)
    } else {
        ConfigSource::Topology(&deployments)
    };

    let reports: Vec<MetricsReport> = seeds
        .iter()
        .map(|&seed| {
            simulate(
                &scenario,
                source,
                &adversary,
                args.intervals,
                args.handoff_cost,
                args.cyclic,
                seed,
            )
            .map_err(input)
        })
        .collect::<Result<_, _>>()?;
    let aggregate = run_monte_carlo(
        &scenario,
        source,
        &adversary,
        args.intervals,
        args.handoff_cost,
        args.cyclic,
        &seeds,
    )
    .map_err(input)?;

    let mut extras: Vec<&Path> = Vec::new();
    if let Some(path) = &args.csv {
        write_output(path, &trace_to_csv(&scenario, &reports[0]))?;
        extras.push(path);
    }
    if let Some(path) = &args.seed_csv {
        let mut csv = String::from(
            "seed,compromised_flow_fraction,jam_outage_fraction,handoff_count,throughput_reduction\n",
        );
        for (seed, r) in seeds.iter().zip(&reports) {
            writeln!(
                csv,
                "{seed},{},{},{},{}",
                r.compromised_flow_fraction,
                r.jam_outage_fraction,
                r.handoff_count,
                r.throughput_reduction
            )
            .expect("string write cannot fail");
        }
        write_output(path, &csv)?;
        extras.push(path);
    }

    let per_seed: Vec<SeedMetrics> = seeds
        .iter()
        .zip(&reports)
        .map(|(&s, r)| SeedMetrics::of(s, r))
        .collect();
    let output = serde_json::json!({
        "aggregate": aggregate,
        "per_seed": per_seed,
    });
    emit(
        argv,
        "simulate",
        Some(&args.scenario),
        &seeds,
        params_of([
            ("intervals", args.intervals.into()),
            ("handoff_cost", args.handoff_cost.into()),
            ("cyclic", args.cyclic.into()),
        ]),
        args.out.as_deref(),
        &serde_json::to_string_pretty(&output).expect("serialization cannot fail"),
        &extras,
    )
}

fn cmd_validate(args: ValidateArgs) -> Result<(), Failure> {
    let scenario = read_scenario(&args.scenario)?;
    let violations: Vec<Violation> = if let Some(path) = &args.schedule {
        let schedule = schedule_from_json(&scenario, &read_file(path)?)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        check_range_schedule(&scenario, &schedule).map_err(input)?
    } else if let Some(path) = &args.deployment {
        let old = load_deployment(&scenario, args.current.as_deref())?;
        let new = deployment_from_json(&scenario, &read_file(path)?)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        check_deployment(&scenario, &old, &new, args.delta).map_err(input)?
    } else if let Some(path) = &args.plan {
        let plan = plan_from_json(&scenario, &read_file(path)?)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let from = load_deployment(&scenario, args.current.as_deref())?;
        let to = load_deployment(&scenario, args.to.as_deref())?;
        check_movement(&scenario, &plan, &from, &to).map_err(input)?
    } else {
        return Err(Failure::Input(
            "pass one of --schedule, --deployment, --plan".into(),
        ));
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&violations).expect("serialization cannot fail")
    );
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Validation(format!(
            "{} violation(s)",
            violations.len()
        )))
    }
}

fn cmd_rerun(args: RerunArgs) -> Result<(), Failure> {
    let manifest: RunManifest = serde_json::from_str(&read_file(&args.manifest)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", args.manifest.display())))?;
    if manifest.argv.first().map(String::as_str) == Some("rerun") {
        return Err(Failure::Input("manifest records a rerun".into()));
    }
    run(&manifest.argv)
}
