mod checkpoint;
mod output;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::fs;
use std::path::PathBuf;
use stratflow::harness::{run, run_dns_from, ExperimentConfig, Mode};

#[derive(Parser)]
#[command(name = "stratflow", version, about = "Stratified Couette perturbation lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Linear propagation of nonzero modes.
    Linear(Flags),
    /// Dispersive decay scans of the zero-mode semigroup.
    Dispersive(Flags),
    /// Full nonlinear simulation.
    Dns(Flags),
    /// Stability threshold bisection over a parameter sweep.
    Threshold(Flags),
    /// Random scan of the ghost weights and the Orr inequality.
    VerifyMultipliers(Flags),
}

#[derive(Args, Clone, Debug)]
struct Flags {
    /// JSON config; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: $STRATFLOW_OUTPUT/<mode>, else ./stratflow-out/<mode>).
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Root for default output directories.
    #[arg(long, env = "STRATFLOW_OUTPUT", hide_env_values = true)]
    output_root: Option<PathBuf>,
    /// Viscosity.
    #[arg(long)]
    nu: Option<f64>,
    /// Buoyancy frequency.
    #[arg(long)]
    beta: Option<f64>,
    /// Sobolev index of the main weight.
    #[arg(long)]
    m: Option<u32>,
    /// Allow beta = 0 (unstratified lift-up runs).
    #[arg(long)]
    lift_up_regression: bool,
    /// Grid points in x.
    #[arg(long)]
    nx: Option<usize>,
    /// Grid points in y.
    #[arg(long)]
    ny: Option<usize>,
    /// Grid points in z.
    #[arg(long)]
    nz: Option<usize>,
    /// Box length in y.
    #[arg(long)]
    ly: Option<f64>,
    /// Time step (capped at 0.1/beta).
    #[arg(long)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long)]
    t_end: Option<f64>,
    /// Time between diagnostic rows.
    #[arg(long)]
    checkpoint_every: Option<f64>,
    /// Initial amplitude (H^{2m+1} proxy norm).
    #[arg(long)]
    eps: Option<f64>,
    /// Seed for the initial data.
    #[arg(long)]
    seed: Option<u64>,
    /// Lower end of the initial bisection bracket.
    #[arg(long)]
    eps_lo: Option<f64>,
    /// Upper end of the initial bisection bracket.
    #[arg(long)]
    eps_hi: Option<f64>,
    /// Bisection steps after bracketing.
    #[arg(long)]
    max_iters: Option<u32>,
    /// Relative bracket width at which bisection stops.
    #[arg(long)]
    tol_rel: Option<f64>,
    /// Comma-separated viscosities for threshold sweeps.
    #[arg(long, value_delimiter = ',')]
    nus: Option<Vec<f64>>,
    /// Comma-separated stratification strengths for threshold sweeps.
    #[arg(long, value_delimiter = ',')]
    betas: Option<Vec<f64>>,
    /// Samples in the multiplier scan.
    #[arg(long)]
    scan_samples: Option<usize>,
    /// Also stop where the y-grid stops resolving the shear.
    #[arg(long)]
    horizon_cap: bool,
    /// Start a DNS from a saved `final_state.ckpt` instead of generated data.
    #[arg(long)]
    from_checkpoint: Option<PathBuf>,
}

fn build_config(mode: Mode, f: &Flags) -> Result<ExperimentConfig> {
    let mut c = match &f.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<ExperimentConfig>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => ExperimentConfig::default_for(mode),
    };
    c.mode = mode;
    macro_rules! set {
        ($flag:expr, $field:expr) => {
            if let Some(v) = $flag.clone() {
                $field = v;
            }
        };
    }
    set!(f.nu, c.physics.nu);
    set!(f.beta, c.physics.beta);
    set!(f.m, c.physics.m);
    set!(f.nx, c.grid.nx);
    set!(f.ny, c.grid.ny);
    set!(f.nz, c.grid.nz);
    set!(f.ly, c.grid.ly);
    set!(f.dt, c.time.dt);
    set!(f.t_end, c.time.t_end);
    set!(f.checkpoint_every, c.time.checkpoint_every);
    set!(f.eps, c.initial.amplitude);
    set!(f.seed, c.seed);
    set!(f.eps_lo, c.bisection.eps_lo);
    set!(f.eps_hi, c.bisection.eps_hi);
    set!(f.max_iters, c.bisection.max_iters);
    set!(f.tol_rel, c.bisection.tol_rel);
    set!(f.nus, c.sweep.nus);
    set!(f.betas, c.sweep.betas);
    set!(f.scan_samples, c.scan_samples);
    c.physics.lift_up_regression |= f.lift_up_regression;
    c.horizon_cap |= f.horizon_cap;
    if let Some(dir) = &f.output_dir {
        c.output_dir = Some(dir.display().to_string());
    }
    Ok(c)
}

fn output_dir(mode: Mode, c: &ExperimentConfig, f: &Flags) -> PathBuf {
    if let Some(d) = &c.output_dir {
        return PathBuf::from(d);
    }
    f.output_root.clone().unwrap_or_else(|| PathBuf::from("stratflow-out")).join(mode.name())
}

fn execute(mode: Mode, flags: &Flags) -> Result<bool> {
    let config = build_config(mode, flags)?;
    config.validate()?;
    let dir = output_dir(mode, &config, flags);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let metadata = json!({
        "code": { "name": "stratflow", "version": env!("CARGO_PKG_VERSION") },
        "mode": mode.name(),
        "seed": config.seed,
        "workers": rayon_threads(),
        "config": config,
        "from_checkpoint": flags.from_checkpoint.as_ref().map(|p| p.display().to_string()),
    });
    output::write_json(&dir.join("metadata.json"), &metadata)?;
    let result = match (&flags.from_checkpoint, mode) {
        (Some(path), Mode::Dns) => {
            let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let state = checkpoint::read_checkpoint(std::io::BufReader::new(file))
                .with_context(|| format!("reading {}", path.display()))?;
            run_dns_from(&config, Some(state))
        }
        (Some(_), _) => anyhow::bail!("--from-checkpoint only applies to dns"),
        (None, _) => run(&config),
    };
    match result {
        Ok(out) => {
            for (name, series) in &out.series {
                output::write_csv(&dir.join(format!("{name}.csv")), series)?;
            }
            if let Some(state) = &out.final_state {
                let file = fs::File::create(dir.join("final_state.ckpt"))?;
                checkpoint::write_checkpoint(std::io::BufWriter::new(file), state)?;
            }
            output::write_json(&dir.join("summary.json"), &out.summary)?;
            println!("{}", serde_json::to_string_pretty(&out.summary)?);
            eprintln!("artifacts in {}", dir.display());
            Ok(true)
        }
        Err(e) => {
            output::write_json(&dir.join("failure.json"), &json!({ "error": e.to_string() }))?;
            Err(e.into())
        }
    }
}

fn rayon_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn main() {
    let cli = Cli::parse();
    let (mode, flags) = match &cli.command {
        Command::Linear(f) => (Mode::Linear, f),
        Command::Dispersive(f) => (Mode::Dispersive, f),
        Command::Dns(f) => (Mode::Dns, f),
        Command::Threshold(f) => (Mode::Threshold, f),
        Command::VerifyMultipliers(f) => (Mode::VerifyMultipliers, f),
    };
    match execute(mode, flags) {
        Ok(_) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
