//! `annihil`: command-line front end for the particle-annihilation solvers.
//!
//! Exit codes: 0 success, 1 methods disagree, 2 usage or validation error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use annihil_core::crosscheck::{crosscheck, CrosscheckConfig};
use annihil_core::hypervolume::estimate_volume;
use annihil_core::instance::{group, parse_instance, parse_speed_list, Instance};
use annihil_core::montecarlo::{order_invariance_probe, simulate, Policy, SimConfig};
use annihil_core::rational::{parse_rational, Rational};
use annihil_core::relations::{curve_csv, curve_grid, matching_curve_single_vs_pair, relate, verify_cycle};
use annihil_core::residue::{
    default_epsilon, p_a_wins_auto, p_a_wins_closed_form, p_a_wins_distinct, p_a_wins_epsilon,
    p_a_wins_series, recursive_report, MethodReport,
};
use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "annihil", version, about = "Exact and stochastic P(A wins) for the 1-D annihilation model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact P(A wins) with a chosen method.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value_t = SolveMethod::Auto)]
        method: SolveMethod,
        /// Perturbation size for --method epsilon (default: derived from speed gaps).
        #[arg(long, value_parser = rational_arg)]
        epsilon: Option<Rational>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Monte Carlo simulation of the collision process.
    Simulate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        sampling: SimArgs,
        /// Also simulate this many random reorderings of both sides.
        #[arg(long)]
        permutations: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Monte Carlo volume of the equivalent unit-hypercube region.
    Volume {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Beats / matched / loses verdict of group A against group B.
    Relate {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Pairs (x, y) matched with a single particle; CSV by default.
    Curve {
        #[arg(long, value_parser = rational_arg, default_value = "1")]
        speed: Rational,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
    /// Checks whether P beats Q, Q beats R and R beats P.
    Cycle {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        r: String,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Runs every method and checks they agree.
    Crosscheck {
        #[command(flatten)]
        instance: InstanceArgs,
        #[command(flatten)]
        sampling: SimArgs,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, value_enum, default_value_t = Format::Plain)]
        format: Format,
    },
}

#[derive(Args)]
struct InstanceArgs {
    /// Comma-separated A speeds, e.g. 30,20 or 1/2,0.9.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "input", requires = "b")]
    a: Option<String>,
    /// Comma-separated B speeds; an empty string means no B particles.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "input", requires = "a")]
    b: Option<String>,
    /// JSON file {"a": [...], "b": [...]}.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 200_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Frontmost)]
    policy: PolicyArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Auto,
    Recursive,
    Distinct,
    Series,
    Epsilon,
    ClosedForm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Plain,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Frontmost,
    RandomAdjacent,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Frontmost => Policy::Frontmost,
            PolicyArg::RandomAdjacent => Policy::RandomAdjacent,
        }
    }
}

fn rational_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(anyhow::Error),
    Inconsistent(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

impl InstanceArgs {
    fn load(&self) -> anyhow::Result<Instance> {
        match (&self.input, &self.a, &self.b) {
            (Some(path), _, _) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(parse_instance(&text)?)
            }
            (None, Some(a), Some(b)) => Ok(Instance::new(parse_speed_list(a)?, parse_speed_list(b)?)?),
            _ => Err(anyhow!("give either --a and --b, or --input FILE")),
        }
    }
}

fn emit_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn solve(inst: &Instance, method: SolveMethod, epsilon: Option<Rational>) -> anyhow::Result<MethodReport> {
    let g = group(inst);
    let report = match method {
        SolveMethod::Auto => p_a_wins_auto(inst)?,
        SolveMethod::Recursive => recursive_report(inst)?,
        SolveMethod::Distinct => p_a_wins_distinct(inst)?,
        SolveMethod::Series => p_a_wins_series(&g)?,
        SolveMethod::ClosedForm => p_a_wins_closed_form(&g)?,
        SolveMethod::Epsilon => {
            let eps = epsilon.unwrap_or_else(|| default_epsilon(&g));
            p_a_wins_epsilon(&g, &eps)?
        }
    };
    Ok(report)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            instance,
            method,
            epsilon,
            format,
        } => {
            let report = solve(&instance.load()?, method, epsilon)?;
            match format {
                Format::Json => emit_json(&report)?,
                Format::Plain => println!("{} {} {}", report.value, report.value.decimal(), report.method.as_str()),
            }
        }
        Command::Simulate {
            instance,
            sampling,
            permutations,
            format,
        } => {
            let inst = instance.load()?;
            let cfg = SimConfig::new(sampling.trials, sampling.seed).with_policy(sampling.policy.into());
            match permutations {
                None => {
                    let r = simulate(&inst, &cfg)?;
                    match format {
                        Format::Json => emit_json(&r)?,
                        Format::Plain => println!("{} of {} trials: {:.6} ± {:.6}", r.a_wins, r.trials, r.estimate, r.std_error),
                    }
                }
                Some(k) => {
                    let runs = order_invariance_probe(&inst, &cfg, k)?;
                    match format {
                        Format::Json => {
                            let rows: Vec<_> = runs
                                .iter()
                                .map(|(ordering, report)| json!({ "instance": ordering, "report": report }))
                                .collect();
                            emit_json(&rows)?
                        }
                        Format::Plain => {
                            for (ordering, r) in &runs {
                                println!("{} {:.6} ± {:.6}", ordering.to_json(), r.estimate, r.std_error);
                            }
                        }
                    }
                }
            }
        }
        Command::Volume {
            instance,
            samples,
            seed,
            format,
        } => {
            let v = estimate_volume(&instance.load()?, samples, seed)?;
            match format {
                Format::Json => emit_json(&v)?,
                Format::Plain => println!("{} of {} samples: {:.6} ± {:.6}", v.hits, v.samples, v.estimate, v.std_error),
            }
        }
        Command::Relate { instance, format } => {
            let inst = instance.load()?;
            let v = relate(inst.a(), inst.b())?;
            match format {
                Format::Json => emit_json(&json!({
                    "p": v.p.to_string(),
                    "decimal": v.p.decimal(),
                    "verdict": v.verdict,
                }))?,
                Format::Plain => println!("{} {} {}", serde_json::to_value(v.verdict)?.as_str().unwrap_or("?"), v.p, v.p.decimal()),
            }
        }
        Command::Curve { speed, points, format } => {
            let pts = matching_curve_single_vs_pair(&speed, &curve_grid(&speed, points))?;
            match format {
                Format::Plain => print!("{}", curve_csv(&pts)),
                Format::Json => {
                    let rows: Vec<_> = pts
                        .iter()
                        .map(|(x, y)| json!({ "x": x.to_string(), "y": y.to_string() }))
                        .collect();
                    emit_json(&rows)?
                }
            }
        }
        Command::Cycle { p, q, r, format } => {
            let w = verify_cycle(&parse_speed_list(&p)?, &parse_speed_list(&q)?, &parse_speed_list(&r)?)?;
            match format {
                Format::Json => emit_json(&w)?,
                Format::Plain => println!(
                    "P vs Q {}  Q vs R {}  R vs P {}  cycle: {}",
                    w.p_pq.decimal(),
                    w.p_qr.decimal(),
                    w.p_rp.decimal(),
                    w.is_cycle
                ),
            }
        }
        Command::Crosscheck {
            instance,
            sampling,
            samples,
            format,
        } => {
            let cfg = CrosscheckConfig {
                trials: sampling.trials,
                samples,
                seed: sampling.seed,
                policy: sampling.policy.into(),
                ..CrosscheckConfig::default()
            };
            let report = crosscheck(&instance.load()?, &cfg)?;
            match format {
                Format::Json => emit_json(&report)?,
                Format::Plain => print!("{}", report.table()),
            }
            if let Some(why) = report.first_disagreement {
                return Err(Failure::Inconsistent(why));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Inconsistent(why)) => {
            eprintln!("error: methods disagree: {why}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
