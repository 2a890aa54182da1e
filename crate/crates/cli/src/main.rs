//! `empathica` command-line tool.
//!
//! Exit codes: 0 on success, 1 on operational errors (unreadable or invalid
//! scenarios, network failures, oracle disagreement), 2 on usage errors.

mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand, ValueEnum};

use empathica::engine::{
    brute_force_oracle, enumerate_equilibria, oracle_equilibria, StrategicGame,
};
use empathica::runtime::{
    run_agent_client, serve_environment, ClientConfig, ServerConfig, Timeouts, DEFAULT_PORT,
    PORT_ENV,
};
use empathica::scenario::{
    builtin, generate_random_scenario, parse_scenario, serialize_scenario, spec_digest,
    GeneratorParams, BUILTIN_NAMES,
};
use empathica::{solve_scenario, AgentId, Aggregation, Algorithm, Assignment, Scenario};

#[derive(Parser)]
#[command(
    name = "empathica",
    version,
    about = "Empathic agents for one-shot multi-agent decisions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run each agent's procedure and report the joint outcome.
    Solve {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        algorithms: Algorithms,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Solve with every agent on naive, then lazy, then full.
    Compare {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// List the pure-strategy Nash equilibria.
    Equilibria {
        #[command(flatten)]
        source: Source,
        /// Use acceptability-filtered utilities as payoffs.
        #[arg(long)]
        primed: bool,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Check the engine against the brute-force oracle; exits 1 on any
    /// disagreement.
    Verify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        algorithms: Algorithms,
    },
    /// Generate a seeded random scenario.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 3)]
        actions: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        low: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        high: f64,
        /// Probability that a profile is banned by some agent.
        #[arg(long, default_value_t = 0.2)]
        unacceptable: f64,
        /// Probability that a utility table entry is null.
        #[arg(long, default_value_t = 0.1)]
        nulls: f64,
        /// Give every agent one extra two-action tuple.
        #[arg(long)]
        multi_action: bool,
        #[arg(long, value_enum, default_value_t = AggregationArg::Product)]
        aggregation: AggregationArg,
        /// Output file; standard output when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Serve one networked session for the scenario's agents.
    Serve {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        net: Network,
        /// Commit (and announce) timeout.
        #[arg(long, default_value_t = 10)]
        timeout_secs: u64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Join a networked session as one agent.
    Agent {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        net: Network,
        /// Agent id to play.
        #[arg(long)]
        id: String,
        #[arg(long, default_value = "full")]
        algorithm: Algorithm,
        /// Longest wait for any server message.
        #[arg(long, default_value_t = 30)]
        timeout_secs: u64,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Print the canonical serialization of a scenario.
    Export {
        #[command(flatten)]
        source: Source,
        /// Print only the SHA-256 digest of the canonical text.
        #[arg(long)]
        digest: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Source {
    /// Scenario file.
    #[arg(
        value_name = "SCENARIO",
        required_unless_present = "builtin",
        conflicts_with = "builtin"
    )]
    path: Option<PathBuf>,
    /// Use a built-in scenario instead of a file.
    #[arg(long, value_parser = PossibleValuesParser::new(BUILTIN_NAMES))]
    builtin: Option<String>,
}

impl Source {
    fn load(&self) -> Result<Scenario> {
        match (&self.path, &self.builtin) {
            (_, Some(name)) => Ok(builtin(name)?),
            (Some(path), None) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                parse_scenario(&text).with_context(|| format!("{}", path.display()))
            }
            (None, None) => unreachable!("clap requires a scenario source"),
        }
    }
}

#[derive(Args)]
struct Algorithms {
    /// Algorithm for every agent without an override.
    #[arg(long, value_name = "ALGORITHM", default_value = "full")]
    all: Algorithm,
    /// Per-agent override, repeatable.
    #[arg(long = "agent", value_name = "ID=ALGORITHM", value_parser = parse_override)]
    overrides: Vec<(AgentId, Algorithm)>,
}

impl Algorithms {
    fn assignment(&self) -> Assignment {
        self.overrides
            .iter()
            .fold(Assignment::uniform(self.all), |a, (id, alg)| {
                a.with(id.clone(), *alg)
            })
    }
}

fn parse_override(s: &str) -> Result<(AgentId, Algorithm), String> {
    let (id, alg) = s
        .split_once('=')
        .ok_or_else(|| format!("expected ID=ALGORITHM, got {s:?}"))?;
    if id.is_empty() {
        return Err("agent id must be non-empty".into());
    }
    Ok((AgentId::from(id), alg.parse()?))
}

#[derive(Args)]
struct Network {
    /// host:port; overrides --port.
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long, env = PORT_ENV, default_value_t = DEFAULT_PORT)]
    port: u16,
}

impl Network {
    fn endpoint(&self) -> String {
        self.endpoint
            .clone()
            .unwrap_or_else(|| format!("127.0.0.1:{}", self.port))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Lines,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregationArg {
    Product,
    Sum,
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve {
            source,
            algorithms,
            format,
        } => {
            let scenario = source.load()?;
            let report = solve_scenario(&scenario, &algorithms.assignment())?;
            match format {
                Format::Human => print!("{}", render::report(&report)),
                Format::Lines => print!("{}", report.to_lines()),
            }
        }
        Command::Compare { source, format } => {
            let scenario = source.load()?;
            let reports = Algorithm::ALL
                .iter()
                .map(|alg| solve_scenario(&scenario, &Assignment::uniform(*alg)))
                .collect::<Result<Vec<_>, _>>()?;
            print!(
                "{}",
                render::comparison(&scenario, &reports, format == Format::Lines)
            );
        }
        Command::Equilibria {
            source,
            primed,
            format,
        } => {
            let scenario = source.load()?;
            let game = game(&scenario, primed);
            let eq = enumerate_equilibria(&game);
            print!(
                "{}",
                render::equilibria(&eq, primed, format == Format::Lines)
            );
        }
        Command::Verify { source, algorithms } => {
            let scenario = source.load()?;
            return verify(&scenario, &algorithms.assignment());
        }
        Command::Gen {
            seed,
            agents,
            actions,
            low,
            high,
            unacceptable,
            nulls,
            multi_action,
            aggregation,
            out,
        } => {
            let params = GeneratorParams {
                seed,
                agent_count: agents,
                actions_per_agent: actions,
                value_range: (low, high),
                unacceptable_fraction: unacceptable,
                null_fraction: nulls,
                multi_action_tuples: multi_action,
                aggregation: match aggregation {
                    AggregationArg::Product => Aggregation::Product,
                    AggregationArg::Sum => Aggregation::Sum,
                },
            };
            let scenario = generate_random_scenario(&params)?;
            write_output(&out, &serialize_scenario(&scenario))?;
        }
        Command::Serve {
            source,
            net,
            timeout_secs,
            format,
        } => {
            let scenario = source.load()?;
            let endpoint = net.endpoint();
            let config = ServerConfig {
                session: None,
                timeouts: Timeouts {
                    announce: Duration::from_secs(timeout_secs),
                    commit: Duration::from_secs(timeout_secs),
                    ..Timeouts::default()
                },
            };
            eprintln!("serving {} on {endpoint}", scenario.name());
            let outcome = serve_environment(scenario, endpoint.as_str(), config)?;
            print!("{}", render::session(&outcome, format == Format::Lines));
        }
        Command::Agent {
            source,
            net,
            id,
            algorithm,
            timeout_secs,
            format,
        } => {
            let scenario = source.load()?;
            let config = ClientConfig {
                session: None,
                read_timeout: Duration::from_secs(timeout_secs),
            };
            let outcome = run_agent_client(
                net.endpoint().as_str(),
                &AgentId::from(id),
                algorithm,
                &scenario,
                &config,
            )?;
            print!("{}", render::client(&outcome, format == Format::Lines));
        }
        Command::Export {
            source,
            digest,
            out,
        } => {
            let scenario = source.load()?;
            let text = if digest {
                format!("{}\n", spec_digest(&scenario))
            } else {
                serialize_scenario(&scenario)
            };
            write_output(&out, &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn game(scenario: &Scenario, primed: bool) -> StrategicGame {
    if primed {
        StrategicGame::primed(
            scenario.space(),
            scenario.utilities(),
            scenario.acceptability(),
        )
    } else {
        StrategicGame::new(scenario.space().clone(), scenario.utilities().to_vec())
    }
}

fn verify(scenario: &Scenario, assignment: &Assignment) -> Result<ExitCode> {
    let mut ok = true;
    let engine = solve_scenario(scenario, assignment)?;
    let oracle = brute_force_oracle(scenario, assignment)?;
    if engine == oracle {
        println!("ok decisions");
    } else {
        ok = false;
        println!("mismatch decisions");
        println!(
            "-- engine\n{}-- oracle\n{}",
            engine.to_lines(),
            oracle.to_lines()
        );
    }
    for primed in [false, true] {
        let g = game(scenario, primed);
        let label = if primed { "primed" } else { "raw" };
        let (e, o) = (enumerate_equilibria(&g), oracle_equilibria(&g)?);
        if e == o {
            println!("ok equilibria_{label} {}", e.len());
        } else {
            ok = false;
            println!(
                "mismatch equilibria_{label} engine {} oracle {}",
                e.len(),
                o.len()
            );
        }
    }
    if !ok {
        bail!("engine and oracle disagree");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
