use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use relay_core::harness::config::{ConfigOverlay, NumberList, RunConfig, TextList};
use relay_core::harness::{emit_report, run_sweep, RunManifest};
use relay_core::joint::{baseline, TrajectoryPoint};
use relay_core::{ChannelGains, Error, RateBreakdown, Strategy, StrategySettings, SystemParams};

#[derive(Parser)]
#[command(name = "relay-sim", version, about = "Two-path alternate relaying with improper signaling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Monte Carlo sweep over Rayleigh fading.
    Run(RunArgs),
    /// Optimize a single channel realization and print the result as JSON.
    Solve(SolveArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML file with the same keys as the flags (underscores instead of dashes).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Average SNR of the source-relay links in dB (comma list to sweep).
    #[arg(long)]
    gamma_h: Option<String>,
    /// Average SNR of the relay-destination links in dB (comma list to sweep).
    #[arg(long)]
    gamma_g: Option<String>,
    /// Average SNR of the inter-relay link in dB (comma list to sweep).
    #[arg(long)]
    gamma_f: Option<String>,
    #[arg(long)]
    p_s: Option<f64>,
    /// Relay power budget (comma list to sweep).
    #[arg(long)]
    p_max: Option<String>,
    #[arg(long)]
    noise_var: Option<f64>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma list of proper_mpa, proper_opa, improper_mpa, cd_init0, cd_init1, gs.
    #[arg(long)]
    strategies: Option<String>,
    #[arg(long)]
    eps_max: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Measure the power change in absolute units rather than as a fraction of p_max.
    #[arg(long)]
    raw_power_error: bool,
    /// Grid-search resolution, `<n_p>x<n_c>`.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma list of csv, json, plot.
    #[arg(long)]
    format: Option<String>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl RunArgs {
    fn overlay(&self) -> ConfigOverlay {
        let nums = |s: &Option<String>| s.clone().map(NumberList::Text);
        let words = |s: &Option<String>| s.clone().map(TextList::Text);
        ConfigOverlay {
            gamma_h: nums(&self.gamma_h),
            gamma_g: nums(&self.gamma_g),
            gamma_f: nums(&self.gamma_f),
            p_s: self.p_s,
            p_max: nums(&self.p_max),
            noise_var: self.noise_var,
            realizations: self.realizations,
            seed: self.seed,
            strategies: words(&self.strategies),
            eps_max: self.eps_max,
            max_iters: self.max_iters,
            raw_power_error: self.raw_power_error.then_some(true),
            grid: self.grid.clone(),
            out: self.out.clone(),
            format: words(&self.format),
            threads: self.threads,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// |h_1|^2, source to relay 1.
    #[arg(long)]
    h1: f64,
    /// |h_2|^2, source to relay 2.
    #[arg(long)]
    h2: f64,
    /// |g_1|^2, relay 1 to destination.
    #[arg(long)]
    g1: f64,
    /// |g_2|^2, relay 2 to destination.
    #[arg(long)]
    g2: f64,
    /// |f|^2, between the relays.
    #[arg(long)]
    f: f64,
    #[arg(long, default_value_t = 1.0)]
    p_s: f64,
    #[arg(long, default_value_t = 1.0)]
    p_max: f64,
    #[arg(long, default_value_t = 1.0)]
    noise_var: f64,
    #[arg(long, default_value = "cd_init1")]
    strategy: String,
    #[arg(long, default_value_t = 1e-4)]
    eps_max: f64,
    #[arg(long, default_value = "1000x1000")]
    grid: String,
}

#[derive(Serialize)]
struct SolveOutput {
    strategy: Strategy,
    p_r: f64,
    c_x: f64,
    r_total: f64,
    rates: RateBreakdown,
    iterations: usize,
    converged: bool,
    trajectory: Vec<TrajectoryPoint>,
}

fn run(args: RunArgs) -> Result<(), Error> {
    let flags = args.overlay();
    let overlay = match &args.config {
        Some(path) => flags.over(ConfigOverlay::from_file(path)?),
        None => flags,
    };
    let cfg = RunConfig::resolve(overlay)?;
    let start = Instant::now();
    let work = || run_sweep(&cfg.fading(), &cfg.params(), &cfg.strategies, &cfg.sweep, &cfg.settings());
    let results = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let manifest = RunManifest::new(cfg.clone(), start.elapsed().as_secs_f64());
    for path in emit_report(&results, &cfg.out, &cfg.formats, &manifest)? {
        eprintln!("wrote {}", path.display());
    }
    let mut stdout = std::io::stdout().lock();
    for r in &results {
        // a closed pipe downstream is not an error of the run
        let _ = writeln!(
            stdout,
            "{:<13} {}={:<8} mean={:.6} se={:.6}",
            r.strategy.tag(),
            r.sweep_var,
            r.sweep_value,
            r.mean_rate,
            r.std_err
        );
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<(), Error> {
    let params = SystemParams::new(args.p_s, args.p_max, args.noise_var)?;
    let gains = ChannelGains::new([args.h1, args.h2], [args.g1, args.g2], args.f)?;
    let strategy: Strategy = args.strategy.parse()?;
    let (grid_p, grid_c) = relay_core::harness::config::parse_grid(&args.grid)?;
    let settings = StrategySettings {
        eps_max: args.eps_max,
        grid_p,
        grid_c,
        ..StrategySettings::default()
    };
    let res = baseline(&params, &gains, strategy, &settings)?;
    let out = SolveOutput {
        strategy,
        p_r: res.design.p_r,
        c_x: res.design.c_x,
        r_total: res.rates.r_total,
        rates: res.rates,
        iterations: res.iterations,
        converged: res.converged,
        trajectory: res.trajectory,
    };
    let text = serde_json::to_string_pretty(&out).map_err(|e| Error::Io(e.into()))?;
    let _ = writeln!(std::io::stdout(), "{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => run(a),
        Command::Solve(a) => solve(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
