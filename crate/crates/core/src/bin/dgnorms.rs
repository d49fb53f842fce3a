//! Command-line front end for the experiment drivers.
//!
//! Exit status: 0 on success, 1 if a computation failed, 2 on a usage error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dgnorms::abm::PayoffAggregation;
use dgnorms::config::KeyValueConfig;
use dgnorms::experiments::{self, parse_grid, parse_norms, parse_roles, parse_strategies, Summary};
use dgnorms::validate::{self, Check, ValidateOptions};
use dgnorms::{Error, Params, RoleAssignment, Strategy};

/// Environment variable naming the default output directory.
const OUT_DIR_ENV: &str = "DGNORMS_OUT_DIR";

const CONFIG_KEYS: &[&str] = &[
    "out-dir",
    "workers",
    "single-thread",
    "no-timestamp",
    "z",
    "epsilon",
    "cost",
    "mu",
    "beta",
    "norms",
    "norm",
    "roles",
    "role",
    "betas",
    "costs",
    "strategies",
    "strategy",
    "against",
    "mutants",
    "generations",
    "burn-in",
    "seed",
    "replicas",
    "aggregation",
    "checks",
    "samples",
];

#[derive(Parser, Debug)]
#[command(name = "dgnorms", version, about = "Fairness in the dictator game under indirect reciprocity")]
struct Cli {
    /// Flat `key = value` file; command-line options take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for outputs without an explicit --out [default: $DGNORMS_OUT_DIR or .]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads [default: available parallelism].
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Run on one thread.
    #[arg(long, global = true)]
    single_thread: bool,
    /// Omit the `# generated:` line from CSV output.
    #[arg(long, global = true)]
    no_timestamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct ParamArgs {
    /// Population size [default: 50].
    #[arg(long)]
    z: Option<usize>,
    /// Execution error of a fair split [default: 0.01].
    #[arg(long)]
    epsilon: Option<f64>,
    /// Reporting cost [default: 0.01].
    #[arg(long)]
    cost: Option<f64>,
    /// Mutation probability [default: 0.01].
    #[arg(long)]
    mu: Option<f64>,
    /// Selection intensity [default: 0.6].
    #[arg(long)]
    beta: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Level of fairness against selection intensity.
    FairnessCurve {
        /// Norms: names, bit strings, or the catalogs named / leading-eight / second-order [default: named].
        #[arg(long)]
        norms: Option<String>,
        /// random, reputation or both [default: both].
        #[arg(long)]
        roles: Option<String>,
        /// Comma list or start:stop:step [default: 0:1:0.2].
        #[arg(long)]
        betas: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixation probabilities between every ordered pair of the given strategies.
    Pairwise {
        #[arg(long)]
        norms: Option<String>,
        #[arg(long)]
        roles: Option<String>,
        /// Strategy names or `all` [default: FNR,NNS,NNR].
        #[arg(long)]
        strategies: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stationary reputation distribution.
    ReputationDist {
        /// Strategy of the population (or of the X group) [default: FNR].
        #[arg(long)]
        strategy: Option<String>,
        /// Second strategy for a mixed population.
        #[arg(long)]
        against: Option<String>,
        /// Number of players using --strategy when --against is given.
        #[arg(long)]
        mutants: Option<usize>,
        /// [default: sj]
        #[arg(long)]
        norm: Option<String>,
        /// [default: reputation]
        #[arg(long)]
        role: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level of fairness against the reporting cost.
    CostSweep {
        #[arg(long)]
        norms: Option<String>,
        #[arg(long)]
        roles: Option<String>,
        /// Comma list or start:stop:step [default: 0,0.01,0.02,0.05].
        #[arg(long)]
        costs: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Agent-based simulation.
    Abm {
        #[arg(long)]
        norms: Option<String>,
        #[arg(long)]
        roles: Option<String>,
        /// [default: 0.6]
        #[arg(long)]
        betas: Option<String>,
        /// [default: 100000]
        #[arg(long)]
        generations: Option<u64>,
        /// [default: 10000]
        #[arg(long)]
        burn_in: Option<u64>,
        /// [default: 1]
        #[arg(long)]
        seed: Option<u64>,
        /// Independent runs per grid point [default: 1].
        #[arg(long)]
        replicas: Option<u64>,
        /// Payoff fed to imitation: total or per-interaction [default: total].
        #[arg(long)]
        aggregation: Option<String>,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check the analytic results against independent oracles.
    Validate {
        /// Comma list of one-step, fixation, mu-invariance [default: all].
        #[arg(long)]
        checks: Option<String>,
        /// Monte Carlo samples per transition row [default: 200000].
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Shift epsilon in the analytic rows; the one-step check must then fail.
        #[arg(long, default_value_t = 0.0)]
        tamper_epsilon: f64,
        /// Also write the outcome as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

struct Ctx {
    cfg: KeyValueConfig,
    out_dir: PathBuf,
    timestamp: bool,
}

impl Ctx {
    fn params(&self, a: &ParamArgs) -> Result<Params, Error> {
        let d = Params::default();
        Params::new(
            self.cfg.resolve(a.z, "z", d.z())?,
            self.cfg.resolve(a.epsilon, "epsilon", d.epsilon())?,
            self.cfg.resolve(a.cost, "cost", d.cost_report())?,
            self.cfg.resolve(a.mu, "mu", d.mu())?,
            self.cfg.resolve(a.beta, "beta", d.beta())?,
        )
    }

    fn text(&self, cli: &Option<String>, key: &str, default: &str) -> String {
        cli.clone()
            .or_else(|| self.cfg.raw(key).map(str::to_string))
            .unwrap_or_else(|| default.to_string())
    }

    fn out(&self, cli: &Option<PathBuf>, name: &str) -> PathBuf {
        cli.clone().unwrap_or_else(|| self.out_dir.join(name))
    }
}

fn report(s: &Summary) -> Result<u8, Error> {
    eprintln!("wrote {} rows to {}", s.rows, s.path.display());
    if s.failed > 0 {
        eprintln!("{} rows failed; see the status column", s.failed);
        return Ok(1);
    }
    Ok(0)
}

fn execute(cli: Cli) -> Result<u8, Error> {
    let cfg = match &cli.config {
        Some(p) => KeyValueConfig::load(p, CONFIG_KEYS)?,
        None => KeyValueConfig::default(),
    };
    let out_dir = match cli.out_dir.clone() {
        Some(d) => d,
        None => match cfg.raw("out-dir") {
            Some(d) => PathBuf::from(d),
            None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".")),
        },
    };
    let threads = if cfg.flag(cli.single_thread, "single-thread")? {
        Some(1)
    } else {
        cli.workers.or(cfg.get::<usize>("workers")?)
    };
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidArgument("worker count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let ctx = Ctx {
        timestamp: !cfg.flag(cli.no_timestamp, "no-timestamp")?,
        cfg,
        out_dir,
    };

    match &cli.command {
        Command::FairnessCurve {
            norms,
            roles,
            betas,
            params,
            out,
        } => {
            let c = experiments::FairnessCurve {
                norms: parse_norms(&ctx.text(norms, "norms", "named"))?,
                roles: parse_roles(&ctx.text(roles, "roles", "both"))?,
                betas: parse_grid(&ctx.text(betas, "betas", "0:1:0.2"))?,
                params: ctx.params(params)?,
            };
            report(&experiments::fairness_curve(&c, &ctx.out(out, "fairness_curve.csv"), ctx.timestamp)?)
        }
        Command::Pairwise {
            norms,
            roles,
            strategies,
            params,
            out,
        } => {
            let c = experiments::Pairwise {
                norms: parse_norms(&ctx.text(norms, "norms", "sj"))?,
                roles: parse_roles(&ctx.text(roles, "roles", "both"))?,
                strategies: parse_strategies(&ctx.text(strategies, "strategies", "FNR,NNS,NNR"))?,
                params: ctx.params(params)?,
            };
            report(&experiments::pairwise(&c, &ctx.out(out, "pairwise.csv"), ctx.timestamp)?)
        }
        Command::ReputationDist {
            strategy,
            against,
            mutants,
            norm,
            role,
            params,
            out,
        } => {
            let params = ctx.params(params)?;
            let against = against.clone().or_else(|| ctx.cfg.raw("against").map(str::to_string));
            let mixture = match against {
                None => None,
                Some(y) => {
                    let m = mutants
                        .or(ctx.cfg.get("mutants")?)
                        .ok_or_else(|| Error::InvalidArgument("--against needs --mutants".into()))?;
                    Some((y.parse::<Strategy>()?, m))
                }
            };
            let norms = parse_norms(&ctx.text(norm, "norm", "sj"))?;
            if norms.len() != 1 {
                return Err(Error::InvalidArgument("reputation-dist takes exactly one norm".into()));
            }
            let c = experiments::ReputationDist {
                strategy: ctx.text(strategy, "strategy", "FNR").parse()?,
                mixture,
                norm: norms[0],
                role: ctx.text(role, "role", "reputation").parse::<RoleAssignment>()?,
                params,
            };
            report(&experiments::reputation_dist(&c, &ctx.out(out, "reputation_dist.csv"), ctx.timestamp)?)
        }
        Command::CostSweep {
            norms,
            roles,
            costs,
            params,
            out,
        } => {
            let c = experiments::CostSweep {
                norms: parse_norms(&ctx.text(norms, "norms", "sj"))?,
                roles: parse_roles(&ctx.text(roles, "roles", "reputation"))?,
                costs: parse_grid(&ctx.text(costs, "costs", "0,0.01,0.02,0.05"))?,
                params: ctx.params(params)?,
            };
            report(&experiments::cost_sweep(&c, &ctx.out(out, "cost_sweep.csv"), ctx.timestamp)?)
        }
        Command::Abm {
            norms,
            roles,
            betas,
            generations,
            burn_in,
            seed,
            replicas,
            aggregation,
            params,
            out,
        } => {
            let c = experiments::AbmSweep {
                norms: parse_norms(&ctx.text(norms, "norms", "sj"))?,
                roles: parse_roles(&ctx.text(roles, "roles", "both"))?,
                betas: parse_grid(&ctx.text(betas, "betas", "0.6"))?,
                params: ctx.params(params)?,
                generations: ctx.cfg.resolve(*generations, "generations", 100_000)?,
                burn_in: ctx.cfg.resolve(*burn_in, "burn-in", 10_000)?,
                seed: ctx.cfg.resolve(*seed, "seed", 1)?,
                replicas: ctx.cfg.resolve(*replicas, "replicas", 1)?,
                aggregation: ctx.text(aggregation, "aggregation", "total").parse::<PayoffAggregation>()?,
            };
            report(&experiments::abm_sweep(&c, &ctx.out(out, "abm.csv"), ctx.timestamp)?)
        }
        Command::Validate {
            checks,
            samples,
            seed,
            tamper_epsilon,
            json,
        } => {
            let d = ValidateOptions::default();
            let checks = match checks.clone().or_else(|| ctx.cfg.raw("checks").map(str::to_string)) {
                None => d.checks.clone(),
                Some(t) => t
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse::<Check>)
                    .collect::<Result<_, _>>()?,
            };
            let opts = ValidateOptions {
                checks,
                samples: ctx.cfg.resolve(*samples, "samples", d.samples)?,
                seed: ctx.cfg.resolve(*seed, "seed", d.seed)?,
                tamper_epsilon: *tamper_epsilon,
            };
            let outcomes = validate::run(&opts)?;
            for o in &outcomes {
                println!(
                    "{} {:<14} compared={:<6} worst/tolerance={:.3e}  {}",
                    if o.passed { "PASS" } else { "FAIL" },
                    o.check.name(),
                    o.compared,
                    o.worst_ratio,
                    o.detail
                );
            }
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&outcomes).map_err(|e| Error::Io(e.to_string()))?;
                std::fs::write(path, text)?;
            }
            Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("dgnorms: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
