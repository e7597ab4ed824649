//! Command-line interface: exact conditionals, event conditionals, gap
//! computations, rate functions, confinement probabilities, record
//! builders, and the experiment catalog.
//!
//! Exit codes: 0 success, 1 usage error, 2 assertion failure inside an
//! experiment.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rwrs_harness::config::{FileConfig, RunConfig};
use rwrs_harness::experiments::{run_experiment, CATALOG};
use rwrs_harness::table::{format_float, OutputFormat};
use rwrs_harness::version_string;
use rwrs_core::enumerate::EnumCaps;
use rwrs_core::events::PathEvent;
use rwrs_core::inference::{
    brute_force_conditional, conditional_color_at_origin, conditional_color_by_enumeration,
    conditional_event, delta, Conditional, QueryOptions,
};
use rwrs_core::probe;
use rwrs_core::rates;
use rwrs_core::record::{Color, ColorRecord, StepDistribution};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rwrs", version, about = "random walk in random scenery laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DistArgs {
    /// Probability of an up step given movement, in [1/2, 1]
    #[arg(long)]
    p: f64,
    /// Pause probability, in [0, 1)
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

impl DistArgs {
    fn dist(&self) -> Result<StepDistribution> {
        Ok(StepDistribution::new(self.p, self.eps)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Conditional law of the origin color given a record
    Cond {
        #[command(flatten)]
        dist: DistArgs,
        /// Record expression, e.g. "[WWBB]^3 WBB"
        #[arg(long)]
        record: String,
        /// Backend: filter, enumeration or oracle
        #[arg(long, default_value = "filter")]
        backend: String,
        /// Output as a JSON object instead of text lines
        #[arg(long)]
        json: bool,
    },
    /// Conditional probability of a path event given a record
    Event {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long)]
        record: String,
        /// One of: nt, aot, eu, ed, lt
        #[arg(long)]
        event: String,
        /// Pivot index for lt
        #[arg(long)]
        l: Option<usize>,
        /// Explicit pivot times, comma separated (e.g. 5,16,31)
        #[arg(long, value_delimiter = ',')]
        pivots: Vec<usize>,
        /// Derive pivot times from the probe geometry with this anchor m
        #[arg(long)]
        m: Option<usize>,
        /// Top pivot index for the probe geometry
        #[arg(long = "L")]
        big_l: Option<usize>,
        /// Also require this origin color (joint probability)
        #[arg(long)]
        joint_origin: Option<char>,
    },
    /// Gap between the conditionals under two extensions of a prefix
    Delta {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value = "")]
        prefix: String,
        #[arg(long)]
        ext1: String,
        #[arg(long)]
        ext2: String,
    },
    /// Tilted rate at drift 2/3 and the decay criterion
    Rate {
        #[command(flatten)]
        dist: DistArgs,
        #[arg(long, default_value_t = 2.0 / 3.0)]
        drift: f64,
    },
    /// Probability the simple walk stays inside [-j+1, i-1] for times 0..n-1
    Confine {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
    /// Build a named probe record and print its compact expression
    Build {
        /// One of: barY, tildeY, goodPrefix, sparseB, sparseW, allB, allW
        name: String,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long = "L")]
        big_l: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long = "K")]
        big_k: Option<usize>,
        /// Length for allB / allW
        #[arg(long)]
        n: Option<usize>,
    },
    /// Run a catalog experiment and write its tables and manifest
    Exp {
        /// Experiment id (e.g. phase-diagram or e1); "list" prints the catalog
        id: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        format: Option<String>,
        /// Override one parameter, repeatable: --param key=value
        #[arg(long = "param")]
        params: Vec<String>,
    },
}

fn parse_color(c: char) -> Result<Color> {
    Color::from_char(c.to_ascii_uppercase()).context("color must be B or W")
}

fn parse_record(text: &str) -> Result<ColorRecord> {
    Ok(text.parse::<ColorRecord>()?)
}

fn print_conditional(out: &Conditional<f64>, json: bool) {
    if json {
        println!(
            "{}",
            serde_json::json!({
                "p_black": out.p_black,
                "p_white": out.p_white,
                "log_normalizer": out.log_normalizer,
                "states_explored": out.states_explored,
                "backend": out.backend.as_str(),
                "truncated": out.truncated,
            })
        );
    } else {
        println!("p_black         = {}", format_float(out.p_black));
        println!("p_white         = {}", format_float(out.p_white));
        println!("log_normalizer  = {}", format_float(out.log_normalizer));
        println!("states_explored = {}", out.states_explored);
        println!("backend         = {}", out.backend.as_str());
    }
}

fn event_pivots(
    pivots: &[usize],
    m: Option<usize>,
    big_l: Option<usize>,
) -> Result<Vec<usize>> {
    if !pivots.is_empty() {
        return Ok(pivots.to_vec());
    }
    match (m, big_l) {
        (Some(m), Some(big_l)) => Ok(probe::probe_geometry(m, big_l).pivot_times),
        _ => bail!("pivot-based events need --pivots or both --m and --L"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Cond {
            dist,
            record,
            backend,
            json,
        } => {
            let record = parse_record(&record)?;
            let steps = dist.dist()?.float_weights();
            let out = match backend.as_str() {
                "filter" => conditional_color_at_origin(&record, &steps, &QueryOptions::default())?,
                "enumeration" => {
                    conditional_color_by_enumeration(&record, &steps, &EnumCaps::default())?
                }
                "oracle" => brute_force_conditional(&record, &steps)?,
                other => bail!("unknown backend '{other}'"),
            };
            print_conditional(&out, json);
        }
        Command::Event {
            dist,
            record,
            event,
            l,
            pivots,
            m,
            big_l,
            joint_origin,
        } => {
            let record = parse_record(&record)?;
            let steps = dist.dist()?.float_weights();
            let event = match event.as_str() {
                "eu" => PathEvent::EndsUp,
                "ed" => PathEvent::EndsDown,
                "nt" => PathEvent::NoTurn {
                    pivots: event_pivots(&pivots, m, big_l)?,
                },
                "aot" => PathEvent::AtLeastOneTurn {
                    pivots: event_pivots(&pivots, m, big_l)?,
                },
                "lt" => PathEvent::LastTurnAt {
                    pivots: event_pivots(&pivots, m, big_l)?,
                    index: l.context("lt needs --l")?,
                },
                other => bail!("unknown event '{other}' (expected nt, aot, eu, ed, lt)"),
            };
            let origin = joint_origin.map(parse_color).transpose()?;
            let value: f64 =
                conditional_event(&record, &steps, &event, origin, &EnumCaps::default())?;
            println!("{}", format_float(value));
        }
        Command::Delta {
            dist,
            prefix,
            ext1,
            ext2,
        } => {
            let steps = dist.dist()?.float_weights();
            let value: f64 = delta(
                &parse_record(&prefix)?,
                &parse_record(&ext1)?,
                &parse_record(&ext2)?,
                &steps,
                &QueryOptions::default(),
            )?;
            println!("{}", format_float(value));
        }
        Command::Rate { dist, drift } => {
            let d = dist.dist()?;
            match rates::solve_tilt(d.p(), d.epsilon(), drift) {
                Ok(tilt) => {
                    println!("lambda_bar = {}", format_float(tilt.lambda_bar));
                    println!("rate       = {}", format_float(tilt.rate));
                }
                Err(e) => println!("rate       = inf ({e})"),
            }
            let goodness = rates::goodness_criterion(d.p(), d.epsilon())?;
            println!("criterion  = {}", goodness.holds);
            println!("margin     = {}", format_float(goodness.margin));
        }
        Command::Confine { n, i, j } => {
            println!("{}", format_float(rates::confinement_probability(n, i, j)?));
        }
        Command::Build {
            name,
            m,
            big_l,
            k,
            big_k,
            n,
        } => {
            let need = |value: Option<usize>, flag: &str| {
                value.with_context(|| format!("{name} needs --{flag}"))
            };
            let record = match name.as_str() {
                "barY" | "tildeY" => {
                    let (bar, tilde, geometry) =
                        probe::bad_probe_pair(need(m, "m")?, need(big_l, "L")?)?;
                    println!("# pivot times: {:?}", geometry.pivot_times);
                    println!("# total time n(L) = {}", geometry.total_time);
                    if name == "barY" {
                        bar
                    } else {
                        tilde
                    }
                }
                "goodPrefix" => {
                    let big_l = need(big_l, "L")?;
                    println!("# pivot times: {:?}", probe::good_config_pivot_times(big_l));
                    probe::good_config_prefix(big_l)?
                }
                "sparseB" => probe::sparse_probe(need(k, "k")?, need(big_k, "K")?, Color::B)?,
                "sparseW" => probe::sparse_probe(need(k, "k")?, need(big_k, "K")?, Color::W)?,
                "allB" => probe::all_same(need(n, "n")?, Color::B),
                "allW" => probe::all_same(need(n, "n")?, Color::W),
                other => bail!(
                    "unknown probe '{other}' (expected barY, tildeY, goodPrefix, sparseB, sparseW, allB, allW)"
                ),
            };
            println!("{record}");
            println!("# length {}", record.len());
        }
        Command::Exp {
            id,
            config,
            out,
            seed,
            format,
            params,
        } => {
            if id == "list" {
                for (name, alias, blurb) in CATALOG {
                    println!("{name:<18} ({alias}): {blurb}");
                }
                return Ok(true);
            }
            let file = config.map(|p| FileConfig::load(&p)).transpose()?;
            let format = format
                .map(|f| f.parse::<OutputFormat>())
                .transpose()
                .map_err(|e| anyhow::anyhow!(e))?;
            let mut cli_params = Vec::new();
            for raw in &params {
                let (key, value) = raw
                    .split_once('=')
                    .with_context(|| format!("--param '{raw}' is not key=value"))?;
                cli_params.push((key.to_string(), value.to_string()));
            }
            let cfg = RunConfig::merge(&id, file, seed, out, format, &cli_params)?;
            let start = std::time::Instant::now();
            let output = run_experiment(&id, &cfg.params, cfg.seed)?;
            let wall = start.elapsed().as_secs_f64();
            let written = output.write(&cfg.out, cfg.format, &version_string(), wall)?;
            for path in &written {
                println!("wrote {}", path.display());
            }
            for check in &output.checks {
                let status = if check.passed { "pass" } else { "FAIL" };
                println!("[{status}] {}: {} ({})", check.name, check.claim, check.detail);
            }
            return Ok(output.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("RWRS_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version as "errors" with zero exit
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
