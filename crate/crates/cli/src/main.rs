//! Command-line runner for coalition manipulation experiments.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use coalition::geometry::{LimitGeometry, SimplexArrangement, DEFAULT_CELL_CAP};
use coalition::montecarlo::{self, ExperimentConfig, FiniteSetup, LimitSetup, ManipulationEstimates};
use coalition::oracle::{self, Baseline};
use coalition::profile::{CountProfile, SimplexPoint, VoteDistribution};
use coalition::ranking::{candidate_from_name, candidate_name};
use coalition::rules::{gsr_from_hyperplanes, HyperplaneRule, VotingRule, RULE_NAMES};

#[derive(Parser)]
#[command(name = "coalition", version, about = "Coalitional manipulation of voting rules")]
struct Cli {
    /// Worker threads for Monte Carlo estimation.
    #[arg(long, global = true, env = "COALITION_WORKERS")]
    workers: Option<usize>,

    /// Overrides the seed given in a config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Runs an experiment: writes its CSV and prints the report.
    Run(RunArgs),
    /// Writes the CSV of an experiment without the report.
    Curve(RunArgs),
    #[command(subcommand)]
    Rules(RulesCmd),
    #[command(subcommand)]
    Oracle(OracleCmd),
    #[command(subcommand)]
    Geometry(GeometryCmd),
    #[command(subcommand)]
    Estimate(EstimateCmd),
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct RuleArgs {
    /// Rule name, optionally with `@tie=lex` or `@tie=order:cab`.
    #[arg(long)]
    rule: String,
    /// Number of candidates.
    #[arg(short, long, default_value_t = 3)]
    m: usize,
}

impl RuleArgs {
    fn rule(&self) -> Result<VotingRule> {
        Ok(VotingRule::parse(&self.rule, self.m)?)
    }
}

#[derive(Args)]
struct ProfileArgs {
    #[command(flatten)]
    rule: RuleArgs,
    /// Profile as `count: ranking` entries separated by `;`, or `@path` to read a file.
    #[arg(long)]
    profile: String,
}

impl ProfileArgs {
    fn profile(&self) -> Result<CountProfile> {
        let text = match self.profile.strip_prefix('@') {
            Some(path) => fs::read_to_string(path).with_context(|| format!("reading {path}"))?,
            None => self.profile.replace(';', "\n"),
        };
        let profile = CountProfile::parse(&text)?;
        if profile.num_candidates() != self.rule.m {
            bail!("profile has {} candidates but -m is {}", profile.num_candidates(), self.rule.m);
        }
        Ok(profile)
    }
}

#[derive(Subcommand)]
enum RulesCmd {
    /// Lists the supported rule names.
    List,
    /// Prints the deduplicated hyperplanes of a rule.
    Hyperplanes(RuleArgs),
    /// Evaluates a profile directly, through hyperplanes and as a generalized scoring rule.
    Eval(ProfileArgs),
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Whether some or the first `k` voters can change the winner or elect every candidate.
    Manip {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        k: u64,
    },
    /// Margin of victory.
    Mov(ProfileArgs),
    /// Fewest vote changes electing `target`.
    Bribery {
        #[command(flatten)]
        profile: ProfileArgs,
        #[arg(long)]
        target: String,
    },
}

#[derive(Subcommand)]
enum GeometryCmd {
    /// Distances from a point to differently labelled regions.
    Dist {
        #[command(flatten)]
        rule: RuleArgs,
        /// Limit point in H0 (comma separated, one entry per ranking).
        #[arg(long, conflicts_with = "profile", required_unless_present = "profile")]
        x: Option<String>,
        /// Finite profile whose simplex point is measured.
        #[arg(long)]
        profile: Option<String>,
        /// Vote distribution for the limit: `uniform` or comma separated probabilities.
        #[arg(long, default_value = "uniform")]
        p: String,
    },
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    rule: RuleArgs,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value = "uniform")]
    p: String,
}

#[derive(Subcommand)]
enum EstimateCmd {
    /// Estimates at `n` sampled voters.
    Finite {
        #[command(flatten)]
        args: EstimateArgs,
        #[arg(long)]
        n: u64,
        /// Compare the first voters' deviation with the other voters alone.
        #[arg(long)]
        others_only: bool,
    },
    /// Estimates in the Gaussian limit.
    Limit(EstimateArgs),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Checks that manipulable profiles sit between the two blowups.
    Sandwich {
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, default_value_t = 6)]
        n_max: u64,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        k: Vec<u64>,
    },
    /// Checks that the three evaluations of a rule agree.
    TripleAgreement {
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, default_value_t = 6)]
        n_max: u64,
    },
}

fn parse_distribution(text: &str, m: usize) -> Result<VoteDistribution> {
    if text == "uniform" {
        return Ok(VoteDistribution::uniform(m)?);
    }
    let p = text
        .split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad probability {v:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(VoteDistribution::with_min_delta(p)?)
}

fn load_config(args: &RunArgs, cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(&args.config).with_context(|| format!("config {}", args.config.display()))?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(w) = cli.workers {
        if w == 0 {
            bail!("--workers must be at least 1");
        }
        config.workers = Some(w);
    }
    Ok(config)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn print_estimates(e: &ManipulationEstimates) {
    println!("qbar {}", e.qbar);
    println!("qlow {}", e.qlow);
    println!("rbar {}", e.rbar);
    println!("rlow {}", e.rlow);
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Run(args) => {
            let config = load_config(args, cli)?;
            let report = montecarlo::prepare_report(&config)?;
            let table = montecarlo::curve(&config)?;
            write_output(args.out.as_deref(), &table.to_csv())?;
            let text = report.render(Some(&table));
            if args.out.is_some() {
                print!("{text}");
            } else {
                eprint!("{text}");
            }
        }
        Command::Curve(args) => {
            let config = load_config(args, cli)?;
            let table = montecarlo::curve(&config)?;
            write_output(args.out.as_deref(), &table.to_csv())?;
        }
        Command::Rules(RulesCmd::List) => {
            for name in RULE_NAMES {
                println!("{name}");
            }
        }
        Command::Rules(RulesCmd::Hyperplanes(args)) => {
            let hrule = HyperplaneRule::new(args.rule()?)?;
            println!("{} hyperplanes", hrule.num_hyperplanes());
            for h in hrule.hyperplanes() {
                println!("{h}");
            }
        }
        Command::Rules(RulesCmd::Eval(args)) => {
            let rule = args.rule.rule()?;
            let profile = args.profile()?;
            let hrule = HyperplaneRule::new(rule.clone())?;
            let gsr = gsr_from_hyperplanes(&hrule);
            println!("direct      {}", candidate_name(rule.evaluate_direct(&profile)?));
            println!("hyperplane  {}", candidate_name(hrule.evaluate_profile(&profile)?));
            println!("gsr         {}", candidate_name(gsr.evaluate_count_profile(&profile)?));
        }
        Command::Oracle(OracleCmd::Manip { profile, k }) => {
            let rule = profile.rule.rule()?;
            let p = profile.profile()?;
            let (head, tail) = p.to_profile().split_counts((*k).min(p.num_voters()) as usize);
            println!("winner                      {}", candidate_name(rule.evaluate_direct(&p)?));
            println!("some coalition changes it   {}", yes(oracle::manip_some(&rule, &p, *k)?));
            println!("some coalition elects all   {}", yes(oracle::elect_all_some(&rule, &p, *k)?));
            println!(
                "first k voters change it    {}",
                yes(oracle::manip_specific(&rule, &tail, &head, Baseline::Truthful)?)
            );
            println!("first k voters elect all    {}", yes(oracle::elect_all_specific(&rule, &tail, &head)?));
        }
        Command::Oracle(OracleCmd::Mov(args)) => {
            let mov = oracle::margin_of_victory(&args.rule.rule()?, &args.profile()?)?;
            println!("{mov}");
        }
        Command::Oracle(OracleCmd::Bribery { profile, target }) => {
            let p = profile.profile()?;
            let cost = oracle::bribery_min(&profile.rule.rule()?, &p, candidate_from_name(target)?)?;
            if cost > p.num_voters() {
                println!("impossible");
            } else {
                println!("{cost}");
            }
        }
        Command::Geometry(GeometryCmd::Dist { rule, x, profile, p }) => {
            let hrule = HyperplaneRule::new(rule.rule()?)?;
            if let Some(x) = x {
                let x = x
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad coordinate {v:?}")))
                    .collect::<Result<Vec<_>>>()?;
                let geom = LimitGeometry::new(&hrule, &parse_distribution(p, rule.m)?)?;
                if x.len() != geom.arrangement().dim() {
                    bail!("point has {} coordinates, expected {}", x.len(), geom.arrangement().dim());
                }
                let f = geom.functionals(&x);
                println!("winner {}", candidate_name(geom.label(&x)));
                println!("alpha {}\nbeta {}\nphi {}\npsi {}", f.alpha, f.beta, f.phi, f.psi);
            } else if let Some(text) = profile {
                let args = ProfileArgs {
                    rule: rule.clone(),
                    profile: text.clone(),
                };
                let counts = args.profile()?;
                let point = SimplexPoint::from_counts(counts.counts())?;
                let arr = SimplexArrangement::new(&hrule, DEFAULT_CELL_CAP)?;
                println!("alpha {}", arr.alpha(&point));
            }
        }
        Command::Estimate(EstimateCmd::Finite { args, n, others_only }) => {
            let setup = FiniteSetup {
                rule: args.rule.rule()?,
                p: parse_distribution(&args.p, args.rule.m)?,
                n: *n,
                samples: args.samples,
                seed: cli.seed.unwrap_or(0),
                workers: cli.workers,
                baseline: if *others_only { Baseline::OthersOnly } else { Baseline::Truthful },
            };
            print_estimates(&montecarlo::finite_curve(&setup, &[args.c])?[0]);
        }
        Command::Estimate(EstimateCmd::Limit(args)) => {
            let setup = LimitSetup::new(&args.rule.rule()?, &parse_distribution(&args.p, args.rule.m)?)?;
            let rows = montecarlo::limit_curve(&setup, &[args.c], args.samples, cli.seed.unwrap_or(0), cli.workers)?;
            print_estimates(&rows[0]);
        }
        Command::Verify(VerifyCmd::Sandwich { rule, n_max, k }) => {
            let report = oracle::verify_sandwich(&rule.rule()?, *n_max, k)?;
            println!("{report}");
            return Ok(report.passed());
        }
        Command::Verify(VerifyCmd::TripleAgreement { rule, n_max }) => {
            let report = oracle::verify_triple_agreement(&rule.rule()?, *n_max)?;
            println!("{report}");
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
