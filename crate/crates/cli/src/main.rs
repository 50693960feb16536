use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qwalk2_cli::commands::{
    effective_report, oracle_report, run_scenario, waveguide_run, SPEED_RATIO_MARGIN,
    SPEED_RATIO_TARGET,
};
use qwalk2_cli::config::{parse_config, parse_initial, parse_outputs, Overrides};
use qwalk2_cli::error::{io_error, CliError};
use qwalk2_cli::Result;

use qwalk2_core::{Boundary, LatticeSpec, Statistics};

#[derive(Parser)]
#[command(
    name = "qwalk2",
    version,
    about = "Continuous-time quantum walks of two interacting particles on a ring, \
             with classical waveguide-array equivalents"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a two-particle walk and write correlation artifacts
    Run(RunArgs),
    /// Check the interaction-free walk against the closed-form propagator formula
    Oracle(ScenarioArgs),
    /// Compare strong-coupling walks against the effective composite-pair model
    Effective(EffectiveArgs),
    /// Export a waveguide-array layout and verify the field matches the walk
    Waveguide(WaveguideArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Particle statistics: bose, fermi, or hcb
    #[arg(long)]
    statistics: Option<String>,
    /// Ring half-size; the lattice has 2L+1 sites labelled -L..L
    #[arg(long = "L")]
    l: Option<i32>,
    /// Hopping amplitude
    #[arg(long = "J")]
    j: Option<f64>,
    /// Nearest-neighbour interaction strength
    #[arg(long = "V")]
    v: Option<f64>,
    /// Largest sample time, in units of 1/J
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of uniformly spaced sample times
    #[arg(long)]
    nt: Option<usize>,
    /// Launch sites as "l1,l2"
    #[arg(long)]
    init: Option<String>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plain-text config file; flags given here override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated artifact list (position_corr, momentum_corr,
    /// density, minor_diag, cowalk, waveguide_check)
    #[arg(long)]
    outputs: Option<String>,
    /// Also write PGM heatmaps of the correlation matrices
    #[arg(long)]
    heatmaps: bool,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Particle statistics: bose, fermi, or hcb
    #[arg(long, default_value = "bose")]
    statistics: String,
    #[arg(long = "L", default_value_t = 10)]
    l: i32,
    #[arg(long = "J", default_value_t = 1.0)]
    j: f64,
    /// Largest sample time, in units of 1/J
    #[arg(long, default_value_t = 4.0)]
    tmax: f64,
    #[arg(long, default_value_t = 4)]
    nt: usize,
    /// Launch sites as "l1,l2"
    #[arg(long, default_value = "0,1")]
    init: String,
}

#[derive(Args)]
struct EffectiveArgs {
    #[arg(long = "L", default_value_t = 10)]
    l: i32,
    #[arg(long = "J", default_value_t = 1.0)]
    j: f64,
    #[arg(long = "V", default_value_t = 80.0)]
    v: f64,
    /// Largest sample time, in units of 1/J
    #[arg(long, default_value_t = 40.0)]
    tmax: f64,
    #[arg(long, default_value_t = 80)]
    nt: usize,
}

#[derive(Args)]
struct WaveguideArgs {
    /// Particle statistics: bose, fermi, or hcb
    #[arg(long, default_value = "bose")]
    statistics: String,
    #[arg(long = "L", default_value_t = 10)]
    l: i32,
    #[arg(long = "J", default_value_t = 1.0)]
    j: f64,
    #[arg(long = "V", default_value_t = 0.0)]
    v: f64,
    /// Array edge handling: periodic or open
    #[arg(long, default_value = "periodic")]
    boundary: String,
    /// Largest propagation distance, in units of 1/J
    #[arg(long, default_value_t = 4.0)]
    tmax: f64,
    #[arg(long, default_value_t = 8)]
    nt: usize,
    /// Launch sites as "l1,l2"
    #[arg(long, default_value = "0,1")]
    init: String,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn sample_grid(tmax: f64, nt: usize) -> Result<Vec<f64>> {
    if tmax <= 0.0 {
        return Err(CliError::Validation(format!(
            "tmax must be positive, got {tmax}"
        )));
    }
    if nt < 2 {
        return Err(CliError::Validation(format!(
            "nt must be at least 2, got {nt}"
        )));
    }
    Ok((1..=nt).map(|k| tmax * k as f64 / nt as f64).collect())
}

fn parse_statistics(s: &str) -> Result<Statistics> {
    s.parse()
        .map_err(|e: qwalk2_core::Error| CliError::Validation(e.to_string()))
}

fn run(args: RunArgs) -> Result<()> {
    let file_text = match &args.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| io_error(path.clone(), e))?),
        None => None,
    };
    let flags = Overrides {
        statistics: args
            .statistics
            .as_deref()
            .map(parse_statistics)
            .transpose()?,
        l_max: args.l,
        j: args.j,
        v: args.v,
        time_max: args.tmax,
        n_times: args.nt,
        initial: args.init.as_deref().map(parse_initial).transpose()?,
        out_dir: args.out,
        outputs: args.outputs.as_deref().map(parse_outputs).transpose()?,
        heatmaps: args.heatmaps.then_some(true),
    };
    let cfg = parse_config(file_text.as_deref(), &flags)?;
    let artifacts = run_scenario(&cfg)?;
    println!(
        "run: wrote {} artifacts and run.jsonl to {}",
        artifacts.len(),
        cfg.out_dir.display()
    );
    Ok(())
}

fn oracle(args: ScenarioArgs) -> Result<()> {
    let statistics = parse_statistics(&args.statistics)?;
    let spec = LatticeSpec::new(args.l, args.j, 0.0, statistics)?;
    let initial = parse_initial(&args.init)?;
    let times_jt = sample_grid(args.tmax, args.nt)?;
    let outcome = oracle_report(&spec, initial, &times_jt)?;
    println!(
        "oracle {statistics}: max deviation {:.3e} (tolerance {:.0e}) {}",
        outcome.max_deviation,
        outcome.tolerance,
        if outcome.pass() { "PASS" } else { "FAIL" }
    );
    if !outcome.pass() {
        return Err(CliError::Tolerance(format!(
            "free-walk deviation {:.3e} exceeds {:.0e}",
            outcome.max_deviation, outcome.tolerance
        )));
    }
    Ok(())
}

fn effective(args: EffectiveArgs) -> Result<()> {
    let outcome = effective_report(args.l, args.j, args.v, args.tmax, args.nt)?;
    if !outcome.strong_coupling {
        eprintln!("warning: |V| < 10 J; the composite-pair model is unreliable at these couplings");
    }
    for r in &outcome.per_statistics {
        println!(
            "{}: min P_bound {:.6}, max L1 vs effective {:.6}, front speed {:.6} sites/Jt",
            r.statistics, r.min_p_bound, r.max_l1, r.speed
        );
    }
    println!(
        "speed ratio bose:fermi = {:.4} (target {} within {}%), fermi:hcb = {:.6}",
        outcome.bose_fermi_ratio,
        SPEED_RATIO_TARGET,
        SPEED_RATIO_MARGIN * 100.0,
        outcome.fermi_hcb_ratio
    );
    if !outcome.pass() {
        return Err(CliError::Tolerance(format!(
            "bose:fermi speed ratio {:.4} outside {} +- {}%",
            outcome.bose_fermi_ratio,
            SPEED_RATIO_TARGET,
            SPEED_RATIO_MARGIN * 100.0
        )));
    }
    Ok(())
}

fn waveguide(args: WaveguideArgs) -> Result<()> {
    let statistics = parse_statistics(&args.statistics)?;
    let spec = LatticeSpec::new(args.l, args.j, args.v, statistics)?;
    let boundary: Boundary = args
        .boundary
        .parse()
        .map_err(|e: qwalk2_core::Error| CliError::Validation(e.to_string()))?;
    let initial = parse_initial(&args.init)?;
    let times_jt = sample_grid(args.tmax, args.nt)?;
    let (_, report) = waveguide_run(&spec, boundary, initial, &times_jt, &args.out)?;
    println!(
        "waveguide {statistics} {boundary}: max deviation {:.3e} (tolerance {:.0e}) {}",
        report.max_deviation,
        report.tolerance,
        if report.pass { "PASS" } else { "FAIL" }
    );
    if !report.pass {
        return Err(CliError::Tolerance(format!(
            "field deviation {:.3e} exceeds {:.0e}",
            report.max_deviation, report.tolerance
        )));
    }
    Ok(())
}

fn init_thread_pool() -> Result<()> {
    if let Ok(raw) = std::env::var("QWALK2_THREADS") {
        let n: usize = raw.parse().map_err(|_| {
            CliError::Validation(format!(
                "QWALK2_THREADS must be a positive integer, got '{raw}'"
            ))
        })?;
        if n == 0 {
            return Err(CliError::Validation(
                "QWALK2_THREADS must be a positive integer, got '0'".into(),
            ));
        }
        // Ignore the error if a pool already exists: only the cap matters.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let usage_only = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            // Usage problems are validation failures; help/version are not.
            return if usage_only {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let outcome = init_thread_pool().and_then(|_| match cli.command {
        Command::Run(args) => run(args),
        Command::Oracle(args) => oracle(args),
        Command::Effective(args) => effective(args),
        Command::Waveguide(args) => waveguide(args),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
