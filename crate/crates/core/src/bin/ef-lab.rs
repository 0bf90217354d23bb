//! Command-line experiment runner.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or
//! usage error, 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ef_lab::config::ExperimentConfig;
use ef_lab::runner::{self, Outcome};
use ef_lab::Error;

#[derive(Parser)]
#[command(name = "ef-lab", version, about = "Explicit-formula experiments for Selberg-class L-functions")]
struct Cli {
    /// TOML configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides general.out_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan critical-line zeros and check the zero count.
    Zeros(ZerosArgs),
    /// Verify the localized explicit formula on a parameter grid.
    VerifyEf(VerifyEfArgs),
    /// Sweep |h(t)|·exp(t/log²t) for a pair and a negative control.
    Decay(DecayArgs),
    /// Detect a degree difference from archimedean terms.
    DegreeTest(DegreeArgs),
    /// Recover a prime-power coefficient difference.
    Probe(ProbeArgs),
    /// Mean-value bound for square-prime coefficient differences.
    Meanvalue(MeanValueArgs),
    /// Growth and thinness checks on coefficient data.
    Conditions(ConditionsArgs),
    /// Print (or write) the default configuration.
    EmitDefaultConfig {
        /// Destination file; stdout when omitted.
        path: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ZerosArgs {
    #[arg(long)]
    datum: Vec<String>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    mesh: Option<f64>,
}

#[derive(Args)]
struct VerifyEfArgs {
    #[arg(long)]
    datum: Vec<String>,
    #[arg(long, allow_negative_numbers = true)]
    t: Vec<f64>,
    #[arg(long = "L")]
    l: Vec<f64>,
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    zero_height: Option<f64>,
    #[arg(long)]
    quad_points: Option<usize>,
}

#[derive(Args)]
struct DecayArgs {
    #[arg(long)]
    pair: Option<String>,
    /// Negative control pair; pass an empty string to skip.
    #[arg(long)]
    control: Option<String>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
}

#[derive(Args)]
struct DegreeArgs {
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    pair: Option<String>,
    #[arg(long = "T")]
    t_base: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct ProbeArgs {
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    m: Vec<u64>,
    #[arg(long = "T")]
    t_base: Option<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
    #[arg(long = "W")]
    w: Option<f64>,
    #[arg(long)]
    n_quad: Option<usize>,
    /// zeros, coefficients or both.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    unmasked: bool,
}

#[derive(Args)]
struct MeanValueArgs {
    /// Entries "F,G".
    #[arg(long = "pairs")]
    pairs: Vec<String>,
    #[arg(long)]
    pair: Option<String>,
    #[arg(long = "T")]
    t_base: Vec<f64>,
    #[arg(long = "L")]
    l: Option<f64>,
}

#[derive(Args)]
struct ConditionsArgs {
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn set_vec<T>(slot: &mut Vec<T>, v: Vec<T>) {
    if !v.is_empty() {
        *slot = v;
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidArgument(_) | Error::BadCharacter { .. } | Error::Unsupported(_) => 2,
        Error::Io { .. } => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let name;
    match cli.command {
        Command::EmitDefaultConfig { path } => {
            let text = ExperimentConfig::default().to_toml()?;
            match path {
                Some(p) => std::fs::write(&p, text).map_err(|e| Error::Io { path: p.display().to_string(), source: e })?,
                None => print!("{text}"),
            }
            return Ok(Outcome { pass: true, summary: String::new() });
        }
        Command::Zeros(a) => {
            name = "zeros";
            set_vec(&mut cfg.zeros.datums, a.datum);
            set(&mut cfg.zeros.t_max, a.tmax);
            set(&mut cfg.zeros.mesh, a.mesh);
        }
        Command::VerifyEf(a) => {
            name = "verify-ef";
            let c = &mut cfg.verify_ef;
            set_vec(&mut c.datums, a.datum);
            set_vec(&mut c.t, a.t);
            set_vec(&mut c.l, a.l);
            set(&mut c.pair, a.pair);
            set(&mut c.zero_height, a.zero_height);
            set(&mut c.quad_points, a.quad_points);
        }
        Command::Decay(a) => {
            name = "decay";
            let c = &mut cfg.decay;
            set(&mut c.pair, a.pair);
            set(&mut c.control, a.control);
            set(&mut c.t_min, a.tmin);
            set(&mut c.t_max, a.tmax);
        }
        Command::DegreeTest(a) => {
            name = "degree-test";
            let c = &mut cfg.degree_test;
            set(&mut c.f, a.f);
            set(&mut c.g, a.g);
            set(&mut c.pair, a.pair);
            set(&mut c.t_base, a.t_base);
            set(&mut c.l, a.l);
            set(&mut c.samples, a.samples);
        }
        Command::Probe(a) => {
            name = "probe";
            let c = &mut cfg.probe;
            set(&mut c.f, a.f);
            set(&mut c.g, a.g);
            set(&mut c.pair, a.pair);
            set_vec(&mut c.m, a.m);
            set(&mut c.t_base, a.t_base);
            set(&mut c.l, a.l);
            set(&mut c.w, a.w);
            set(&mut c.n_quad, a.n_quad);
            set(&mut c.mode, a.mode);
            if a.unmasked {
                c.masked = false;
            }
        }
        Command::Meanvalue(a) => {
            name = "meanvalue";
            let c = &mut cfg.meanvalue;
            set_vec(&mut c.pairs, a.pairs);
            set(&mut c.pair, a.pair);
            set_vec(&mut c.t_base, a.t_base);
            set(&mut c.l, a.l);
        }
        Command::Conditions(a) => {
            name = "conditions";
            let c = &mut cfg.conditions;
            set(&mut c.growth_x, a.x);
            set(&mut c.thinness_x_max, a.x_max);
            set(&mut c.delta, a.delta);
        }
    }
    cfg.validate()?;
    let out = cli.out.unwrap_or_else(|| PathBuf::from(&cfg.general.out_dir));
    let outcome = match name {
        "zeros" => runner::run_zeros(&cfg, &out),
        "verify-ef" => runner::run_verify_ef(&cfg, &out),
        "decay" => runner::run_decay(&cfg, &out),
        "degree-test" => runner::run_degree_test(&cfg, &out),
        "probe" => runner::run_probe(&cfg, &out),
        "meanvalue" => runner::run_meanvalue(&cfg, &out),
        _ => runner::run_conditions(&cfg, &out),
    }?;
    println!("{} {}", if outcome.pass { "PASS" } else { "FAIL" }, outcome.summary);
    Ok(outcome)
}

fn main() -> ExitCode {
    if let Ok(v) = std::env::var("EF_LAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                // Ignoring the error is fine: it only fails if a pool already exists.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: EF_LAB_THREADS must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(o) if o.pass => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
