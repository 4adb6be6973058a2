//! `rsabench`: generate traffic, solve RSA/RWA instances exactly or
//! heuristically, validate assignments, export LP models, and run the
//! gap-audit experiments.
//!
//! Exit codes: 0 success (including unproven solver outcomes), 1 I/O or
//! parse failure, 2 usage error, 3 validation failure.

use std::path::{Path as FsPath, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use rsabench_core::bench::{
    run_comparison_distortion, run_extrapolation_audit, run_small_scale, ExperimentConfig,
    ExperimentReport,
};
use rsabench_core::heuristics::generation_log_csv;
use rsabench_core::{
    builtin_topology, emit_lp, ga_rwa_solve, load_assignment, load_topology, load_traffic,
    msf_solve, save_assignment, save_traffic, solve_rsa_exact, solve_rwa_exact_warm,
    to_rwa_demands, validate_assignment, GaConfig, MsfConfig, SolveOutcome, SolverLimits,
    SpectrumAssignment, SpectrumGrid, Topology, TrafficMatrix,
};

const EXIT_OK: i32 = 0;
const EXIT_IO: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_VALIDATION: i32 = 3;

#[derive(Parser)]
#[command(name = "rsabench", version, about = "RSA/RWA solvers and optimality-gap benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Emit machine-readable JSON summaries instead of human text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker-count hint; never changes reported objective values.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random traffic matrix CSV.
    Gen(GenArgs),
    /// Solve one instance and write the assignment and outcome.
    Solve(SolveArgs),
    /// Validate an assignment against its topology and traffic.
    Validate(ValidateArgs),
    /// Export the instance as an LP-format MILP model.
    EmitLp(EmitLpArgs),
    /// Run one of the benchmark experiments.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Builtin name (six_node, cost239) or a topology JSON path.
    #[arg(long)]
    topology: String,
    #[arg(long)]
    demands: usize,
    /// Slice range as MIN:MAX.
    #[arg(long, default_value = "1:4")]
    slices: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Problem {
    Rsa,
    Rwa,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Exact,
    Msf,
    Ga,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    topology: String,
    #[arg(long)]
    traffic: PathBuf,
    #[arg(long, value_enum)]
    problem: Problem,
    #[arg(long, value_enum)]
    method: Method,
    /// Spectrum slots (defaults: 80 for RSA, 40 for RWA).
    #[arg(long)]
    slots: Option<usize>,
    #[arg(long)]
    k_paths: Option<usize>,
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Assignment JSON output path.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Outcome JSON output path.
    #[arg(long)]
    outcome: Option<PathBuf>,
    /// GA generation log CSV output path.
    #[arg(long)]
    ga_log: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    topology: String,
    #[arg(long)]
    traffic: PathBuf,
    #[arg(long)]
    assignment: PathBuf,
}

#[derive(Args)]
struct EmitLpArgs {
    #[arg(long)]
    topology: String,
    #[arg(long)]
    traffic: PathBuf,
    #[arg(long, default_value_t = 80)]
    slots: usize,
    #[arg(long, default_value_t = 12.5)]
    slot_width_ghz: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Small,
    Audit,
    Distortion,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    experiment: Experiment,
    /// Experiment config JSON; defaults are shipped per experiment.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.csv and report.md.
    #[arg(short, long)]
    output: PathBuf,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_IO
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args, cli.json),
        Command::Solve(args) => cmd_solve(args, cli.json),
        Command::Validate(args) => cmd_validate(args, cli.json),
        Command::EmitLp(args) => cmd_emit_lp(args, cli.json),
        Command::Bench(args) => cmd_bench(args, cli.json),
    }
}

fn load_topology_arg(spec: &str) -> anyhow::Result<Topology> {
    if matches!(spec, "six_node" | "cost239") {
        return Ok(builtin_topology(spec)?);
    }
    let text = std::fs::read_to_string(spec)?;
    Ok(load_topology(&text)?)
}

fn read_traffic(topo: &Topology, path: &FsPath) -> anyhow::Result<TrafficMatrix> {
    let text = std::fs::read_to_string(path)?;
    Ok(load_traffic(topo, &text)?)
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn cmd_gen(args: GenArgs, json: bool) -> anyhow::Result<i32> {
    let Some((min, max)) = args.slices.split_once(':') else {
        return Ok(usage_error("--slices must be MIN:MAX"));
    };
    let (Ok(min), Ok(max)) = (min.parse::<u32>(), max.parse::<u32>()) else {
        return Ok(usage_error("--slices must be MIN:MAX with integers"));
    };
    if min < 1 || min > max || args.demands == 0 {
        return Ok(usage_error("invalid slice range or demand count"));
    }
    let topo = load_topology_arg(&args.topology)?;
    let tm = rsabench_core::generate_traffic(&topo, args.demands, min, max, args.seed)?;
    std::fs::write(&args.output, save_traffic(&topo, &tm))?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "demands": tm.demands.len(),
                "total_slices": tm.total_slices(),
                "seed": args.seed,
                "output": args.output,
            })
        );
    } else {
        println!(
            "wrote {} demands ({} total slices) to {}",
            tm.demands.len(),
            tm.total_slices(),
            args.output.display()
        );
    }
    Ok(EXIT_OK)
}

fn summarize_outcome(out: &SolveOutcome, json: bool) {
    if json {
        println!("{}", out.to_json());
    } else {
        println!(
            "status {:?}  objective {}  lower_bound {}  nodes {}  wall {:.3}s",
            out.status,
            out.objective.map_or("-".to_string(), |v| v.to_string()),
            out.lower_bound,
            out.stats.nodes,
            out.stats.wall_time_s
        );
    }
}

fn write_solution(
    args: &SolveArgs,
    asg: &SpectrumAssignment,
    outcome: Option<&SolveOutcome>,
) -> anyhow::Result<()> {
    if let Some(path) = &args.output {
        std::fs::write(path, save_assignment(asg))?;
    }
    if let (Some(path), Some(out)) = (&args.outcome, outcome) {
        std::fs::write(path, out.to_json())?;
    }
    Ok(())
}

fn cmd_solve(args: SolveArgs, json: bool) -> anyhow::Result<i32> {
    let topo = load_topology_arg(&args.topology)?;
    let tm = read_traffic(&topo, &args.traffic)?;
    let limits = SolverLimits { time_limit_s: args.time_limit, ..SolverLimits::default() };

    match (args.problem, args.method) {
        (Problem::Rsa, Method::Exact) => {
            let grid = SpectrumGrid {
                slot_count: args.slots.unwrap_or(SpectrumGrid::rsa_default().slot_count),
                ..SpectrumGrid::rsa_default()
            };
            let out = solve_rsa_exact(&topo, &tm, grid, &limits);
            if let Some(asg) = &out.solution {
                write_solution(&args, asg, Some(&out))?;
            } else if let Some(path) = &args.outcome {
                std::fs::write(path, out.to_json())?;
            }
            summarize_outcome(&out, json);
        }
        (Problem::Rwa, Method::Exact) => {
            let out = solve_rwa_exact_warm(&topo, &tm, &limits, None);
            if let Some(asg) = &out.solution {
                write_solution(&args, asg, Some(&out))?;
            } else if let Some(path) = &args.outcome {
                std::fs::write(path, out.to_json())?;
            }
            summarize_outcome(&out, json);
        }
        (Problem::Rsa, Method::Msf) => {
            let grid = SpectrumGrid {
                slot_count: args.slots.unwrap_or(SpectrumGrid::rsa_default().slot_count),
                ..SpectrumGrid::rsa_default()
            };
            let cfg = MsfConfig { k_paths: args.k_paths.unwrap_or(3), grid };
            let asg = msf_solve(&topo, &tm, &cfg)?;
            write_solution(&args, &asg, None)?;
            report_heuristic(&asg, json);
        }
        (Problem::Rwa, Method::Ga) => {
            let cfg = GaConfig {
                k_paths: args.k_paths.unwrap_or(10),
                seed: args.seed,
                ..GaConfig::default()
            };
            let (asg, log) = ga_rwa_solve(&topo, &to_rwa_demands(&tm), &cfg)?;
            write_solution(&args, &asg, None)?;
            if let Some(path) = &args.ga_log {
                std::fs::write(path, generation_log_csv(&log))?;
            }
            report_heuristic(&asg, json);
        }
        (Problem::Rwa, Method::Msf) => {
            return Ok(usage_error("RWA heuristic is --method ga (or exact)"));
        }
        (Problem::Rsa, Method::Ga) => {
            return Ok(usage_error("RSA heuristic is --method msf (or exact)"));
        }
    }
    Ok(EXIT_OK)
}

fn report_heuristic(asg: &SpectrumAssignment, json: bool) {
    if json {
        println!(
            "{}",
            serde_json::json!({
                "objective": asg.used_slice_count(),
                "fitness_max_index": asg.fitness(),
                "demands_routed": asg.demand_count(),
            })
        );
    } else {
        println!(
            "objective {} (max-index fitness {}), {} demands routed",
            asg.used_slice_count(),
            asg.fitness(),
            asg.demand_count()
        );
    }
}

fn cmd_validate(args: ValidateArgs, json: bool) -> anyhow::Result<i32> {
    let topo = load_topology_arg(&args.topology)?;
    let tm = read_traffic(&topo, &args.traffic)?;
    let asg = load_assignment(&std::fs::read_to_string(&args.assignment)?)?;
    let report = validate_assignment(&topo, &tm, &asg);
    if json {
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        println!(
            "{}",
            serde_json::json!({"violations": msgs, "feasible": report.is_feasible()})
        );
    } else {
        println!("{} violations", report.violations.len());
        for v in &report.violations {
            println!("  {v}");
        }
    }
    Ok(if report.is_feasible() { EXIT_OK } else { EXIT_VALIDATION })
}

fn cmd_emit_lp(args: EmitLpArgs, json: bool) -> anyhow::Result<i32> {
    let topo = load_topology_arg(&args.topology)?;
    let tm = read_traffic(&topo, &args.traffic)?;
    let grid = SpectrumGrid { slot_count: args.slots, slot_width_ghz: args.slot_width_ghz };
    let lp = emit_lp(&topo, &tm, grid);
    std::fs::write(&args.output, &lp)?;
    if json {
        println!(
            "{}",
            serde_json::json!({"output": args.output, "bytes": lp.len()})
        );
    } else {
        println!("wrote LP model to {}", args.output.display());
    }
    Ok(EXIT_OK)
}

fn cmd_bench(args: BenchArgs, json: bool) -> anyhow::Result<i32> {
    let cfg: ExperimentConfig = match &args.config {
        Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
        None => match args.experiment {
            // distortion needs provable optima on both problems, so it
            // defaults to the small topology
            Experiment::Small | Experiment::Distortion => ExperimentConfig::small_scale_default(),
            Experiment::Audit => ExperimentConfig::audit_default(),
        },
    };
    let report: ExperimentReport = match args.experiment {
        Experiment::Small => run_small_scale(&cfg)?,
        Experiment::Audit => run_extrapolation_audit(&cfg)?,
        Experiment::Distortion => run_comparison_distortion(&cfg)?,
    };
    std::fs::create_dir_all(&args.output)?;
    let csv_path = args.output.join("report.csv");
    let md_path = args.output.join("report.md");
    std::fs::write(&csv_path, report.to_csv())?;
    std::fs::write(&md_path, report.to_markdown())?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report.aggregates)?);
    } else {
        print!("{}", report.to_markdown());
        println!("reports: {} and {}", csv_path.display(), md_path.display());
    }
    Ok(EXIT_OK)
}
