//! Command-line interface.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use wardflow_core::solver::{min_overflow_budget, solve_p_model};

use crate::config::{ConfigError, HospitalConfig, Scenario};
use crate::engine::EngineError;
use crate::experiment::{run_policy, run_traced, Plan};
use crate::format::{load_instance, FormatError};
use crate::metrics::{
    write_overflow_csv, write_side_by_side_csv, write_solver_csv, write_summary_csv,
    write_wait_csv, MetricsSummary,
};
use crate::policy::{PolicyParseError, PolicySpec};

#[derive(Debug, Parser)]
#[command(name = "wardflow", version, about = "Inpatient ward simulator and bed-assignment solver")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one policy and write its metrics.
    Run(RunArgs),
    /// Simulate several policies on the same random numbers.
    Compare(RunArgs),
    /// Simulate a policy and report solver timings.
    BenchSolver(RunArgs),
    /// Solve one dumped assignment instance.
    SolveInstance {
        path: PathBuf,
        /// Override the budget stored in the file.
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Check a configuration file, or print the built-in one.
    Config {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the built-in reference configuration.
        #[arg(long)]
        print_reference: bool,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Configuration file; the built-in reference configuration by default.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Policy: bmu, early1, early2, tb1, tb2, tb(s,e,h1,h2) or p(alpha,beta,delta).
    /// Repeat for compare.
    #[arg(long = "policy", required = true)]
    pub policies: Vec<String>,
    /// Comma-separated seeds; the configuration's seeds by default.
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    #[arg(long)]
    pub horizon_days: Option<u32>,
    #[arg(long)]
    pub warmup_days: Option<u32>,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Also write an event trace for the first seed of each policy.
    #[arg(long)]
    pub trace: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Policy(#[from] PolicyParseError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Policy(_) | CliError::Usage(_) | CliError::Format(_) => 2,
            CliError::Engine(EngineError::Config(_)) => 2,
            CliError::Engine(EngineError::Escalation { .. }) => 3,
            CliError::Engine(EngineError::Invariant { .. }) => 4,
            CliError::Io(_) | CliError::Csv(_) => 1,
        }
    }
}

/// File-name friendly form of a policy label.
pub fn slug(label: &str) -> String {
    let mut s = String::new();
    for c in label.chars() {
        match c {
            'a'..='z' | '0'..='9' | '.' => s.push(c),
            'A'..='Z' => s.push(c.to_ascii_lowercase()),
            _ => {
                if !s.ends_with('_') {
                    s.push('_');
                }
            }
        }
    }
    s.trim_matches('_').to_string()
}

fn load_scenario(path: Option<&Path>) -> Result<Scenario, CliError> {
    Ok(match path {
        Some(p) => Scenario::load(p)?,
        None => HospitalConfig::reference().validate()?,
    })
}

fn prepare(args: &RunArgs) -> Result<(Scenario, Vec<PolicySpec>, Plan), CliError> {
    let sc = load_scenario(args.config.as_deref())?;
    let specs = args
        .policies
        .iter()
        .map(|p| p.parse())
        .collect::<Result<Vec<PolicySpec>, _>>()?;
    let mut plan = Plan::from_scenario(&sc);
    if let Some(s) = &args.seeds {
        plan.seeds = s.clone();
    }
    if plan.seeds.is_empty() {
        return Err(CliError::Usage("at least one seed is required".into()));
    }
    if let Some(h) = args.horizon_days {
        plan.horizon_days = h;
    }
    if let Some(w) = args.warmup_days {
        plan.warmup_days = w;
    }
    if plan.horizon_days > 0 && plan.warmup_days >= plan.horizon_days {
        return Err(CliError::Usage(format!(
            "warm-up ({} days) must be shorter than the horizon ({} days)",
            plan.warmup_days, plan.horizon_days
        )));
    }
    fs::create_dir_all(&args.out_dir)?;
    Ok((sc, specs, plan))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn simulate(
    sc: &Scenario,
    spec: &PolicySpec,
    plan: &Plan,
    args: &RunArgs,
) -> Result<MetricsSummary, CliError> {
    if args.trace {
        let path = args
            .out_dir
            .join(format!("trace_{}_{}.txt", slug(&spec.label()), plan.seeds[0]));
        run_traced(sc, spec, plan, plan.seeds[0], &path)?;
    }
    let runs = run_policy(sc, spec, plan)?;
    let s = MetricsSummary::from_runs(&runs, sc.simulation.batches);
    let dir = args.out_dir.join(slug(&spec.label()));
    fs::create_dir_all(&dir)?;
    write_wait_csv(create(&dir.join("wait_by_hour.csv"))?, &s)?;
    write_overflow_csv(create(&dir.join("overflow.csv"))?, &s)?;
    Ok(s)
}

fn print_summary(out: &mut impl Write, s: &MetricsSummary) -> io::Result<()> {
    let pct = |x: Option<f64>| x.map_or("-".into(), |v| format!("{:.2}%", 100.0 * v));
    let hrs = |x: Option<f64>| x.map_or("-".into(), |v| format!("{v:.2} h"));
    writeln!(
        out,
        "{:<16} patients {:>8}  overflow {:>7}  wait {:>8}  night {:>8}  afternoon {:>8}",
        s.policy,
        s.patients,
        pct(s.overflow_rate()),
        hrs(s.mean_wait),
        hrs(s.night_wait),
        hrs(s.afternoon_wait),
    )
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Run(args) => {
            if args.policies.len() != 1 {
                return Err(CliError::Usage("run takes exactly one --policy".into()));
            }
            let (sc, specs, plan) = prepare(&args)?;
            let s = simulate(&sc, &specs[0], &plan, &args)?;
            let dir = args.out_dir.join(slug(&specs[0].label()));
            write_summary_csv(create(&dir.join("summary.csv"))?, std::slice::from_ref(&s))?;
            print_summary(&mut out, &s)?;
        }
        Command::Compare(args) => {
            let (sc, specs, plan) = prepare(&args)?;
            let mut rows = Vec::new();
            for spec in &specs {
                let s = simulate(&sc, spec, &plan, &args)?;
                print_summary(&mut out, &s)?;
                rows.push(s);
            }
            let dir = &args.out_dir;
            write_summary_csv(create(&dir.join("summary.csv"))?, &rows)?;
            write_side_by_side_csv(create(&dir.join("mean_wait_by_hour.csv"))?, &rows, |r| r.mean_wait)?;
            for (k, n) in ["8", "12", "16"].iter().enumerate() {
                write_side_by_side_csv(
                    create(&dir.join(format!("over_{n}h_by_hour.csv")))?,
                    &rows,
                    |r| r.service_levels[k],
                )?;
            }
        }
        Command::BenchSolver(args) => {
            let (sc, specs, mut plan) = prepare(&args)?;
            plan.timed = true;
            let mut rows = Vec::new();
            for spec in &specs {
                let runs = run_policy(&sc, spec, &plan)?;
                let s = MetricsSummary::from_runs(&runs, sc.simulation.batches);
                match &s.solver {
                    Some(v) => writeln!(
                        out,
                        "{:<16} solves {:>8}  mean {:>9.4} s  max {:>8.3} s  LP integral {:>6.2}%",
                        s.policy,
                        v.solves,
                        v.mean_seconds.unwrap_or(0.0),
                        v.max_seconds.unwrap_or(0.0),
                        100.0 * v.lp_integral_share.unwrap_or(0.0),
                    )?,
                    None => writeln!(out, "{:<16} does not use the solver", s.policy)?,
                }
                rows.push(s);
            }
            write_solver_csv(create(&args.out_dir.join("solver.csv"))?, &rows)?;
        }
        Command::SolveInstance { path, budget } => {
            let text = fs::read_to_string(&path)?;
            let mut inst = load_instance(&text)?;
            if let Some(b) = budget {
                inst.budget = b;
            }
            let min = min_overflow_budget(&inst)
                .map_err(|e| CliError::Usage(format!("no feasible matching: {e}")))?;
            writeln!(out, "min_budget {:?}", min.budget)?;
            let report = solve_p_model(&inst).map_err(|e| CliError::Usage(format!("solve failed: {e}")))?;
            writeln!(out, "objective {:?}", report.plan.objective.value())?;
            writeln!(out, "cost {:?}", report.plan.total_cost)?;
            writeln!(out, "lp_integral {}", report.lp_was_integral)?;
            for (i, j) in report.plan.matches() {
                writeln!(out, "match {} {}", inst.patients[i].id.0, inst.beds[j].id.0)?;
            }
        }
        Command::Config {
            config,
            print_reference,
        } => {
            if print_reference {
                writeln!(out, "{}", HospitalConfig::reference().to_json())?;
            } else {
                let sc = load_scenario(config.as_deref())?;
                writeln!(
                    out,
                    "ok: {} pools, {} beds, {} patient types, {:.1} requests/day",
                    sc.hospital.pools().len(),
                    sc.hospital.total_beds(),
                    sc.hospital.types().len(),
                    sc.intensity.daily_mean()
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("P(0.15,0.02,4)"), "p_0.15_0.02_4");
        assert_eq!(slug("TB-1"), "tb_1");
        assert_eq!(slug("BMU"), "bmu");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        let e = CliError::Engine(EngineError::Invariant {
            time: wardflow_core::Minutes(0),
            message: String::new(),
            dump: String::new(),
        });
        assert_eq!(e.exit_code(), 4);
    }
}
