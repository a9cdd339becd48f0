//! Command-line experiment harness for the bqtsim simulator.
//!
//! Exit codes: 0 on success, 1 when an acceptance check fails (fidelity
//! below threshold, Monte Carlo outside its error band), 2 on usage or
//! configuration errors.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use bqtsim::noise::{self, NoiseKind};
use bqtsim::protocol::{self, GhzLikeSpec};
use bqtsim::qec;
use bqtsim::SimRng;

use config::{normalize_pair, parse_amplitudes, parse_grid, FileConfig};
use output::{Field, OutputFormat, ResultRecord};

const FIDELITY_GATE: f64 = 1.0 - 1e-9;

#[derive(Parser)]
#[command(name = "bqtsim", version, about = "Bi-directional teleportation experiment harness")]
struct Cli {
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Bi-directional teleportation protocol runs
    Bqt {
        #[command(subcommand)]
        cmd: BqtCmd,
    },
    /// Channel noise fidelity analysis
    Noise {
        #[command(subcommand)]
        cmd: NoiseCmd,
    },
    /// Twelve-qubit bit-flip code analysis
    Qec {
        #[command(subcommand)]
        cmd: QecCmd,
    },
}

#[derive(Subcommand)]
enum BqtCmd {
    /// Run the protocol with sampled Bell measurements
    Run(BqtArgs),
    /// Force all sixteen measurement branches deterministically
    Branches(BqtArgs),
}

#[derive(Subcommand)]
enum NoiseCmd {
    /// Exact vs published fidelity over a grid for one noise kind
    Sweep(NoiseArgs),
    /// The same comparison across all six noise kinds
    Compare(NoiseArgs),
}

#[derive(Subcommand)]
enum QecCmd {
    /// Monte Carlo estimate of the correction success probability
    Mc(QecArgs),
    /// Crossover threshold where the code stops paying off
    Threshold(QecArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// RNG seed (64-bit)
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json
    #[arg(long)]
    format: Option<OutputFormat>,
    /// JSON config file supplying defaults for any flag
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct BqtArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of protocol runs
    #[arg(long)]
    trials: Option<u64>,
    /// Alice's register size
    #[arg(long)]
    n_alice: Option<usize>,
    /// Bob's register size
    #[arg(long)]
    n_bob: Option<usize>,
    /// Alice's coefficients as re,im:re,im
    #[arg(long)]
    alpha: Option<String>,
    /// Bob's coefficients as re,im:re,im
    #[arg(long)]
    beta: Option<String>,
    /// Rescale coefficients whose norm deviates by at most 1e-3
    #[arg(long)]
    normalize: bool,
}

#[derive(Args, Clone)]
struct NoiseArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Noise kind: bitflip|phaseflip|bitphaseflip|depolarizing|ampdamp|phasedamp
    #[arg(long)]
    kind: Option<String>,
    /// Grid spec start:stop:count (inclusive)
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Args, Clone)]
struct QecArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Per-qubit flip probability
    #[arg(long)]
    p: Option<f64>,
    /// Number of Monte Carlo trials
    #[arg(long)]
    trials: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.group {
        Group::Bqt { cmd: BqtCmd::Run(args) } => cmd_bqt_run(args),
        Group::Bqt { cmd: BqtCmd::Branches(args) } => cmd_bqt_branches(args),
        Group::Noise { cmd: NoiseCmd::Sweep(args) } => cmd_noise_sweep(args),
        Group::Noise { cmd: NoiseCmd::Compare(args) } => cmd_noise_compare(args),
        Group::Qec { cmd: QecCmd::Mc(args) } => cmd_qec_mc(args),
        Group::Qec { cmd: QecCmd::Threshold(args) } => cmd_qec_threshold(args),
    }
}

struct PartySpecs {
    alice: GhzLikeSpec,
    bob: GhzLikeSpec,
    echo: serde_json::Value,
}

fn resolve_specs(args: &BqtArgs, file: &FileConfig) -> Result<PartySpecs, String> {
    let n_alice = args.n_alice.or(file.n_alice).unwrap_or(3);
    let n_bob = args.n_bob.or(file.n_bob).unwrap_or(3);
    let normalize = args.normalize || file.normalize.unwrap_or(false);

    let resolve = |text: Option<&String>| -> Result<(Complex64, Complex64), String> {
        match text {
            None => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                Ok((Complex64::new(s, 0.0), Complex64::new(s, 0.0)))
            }
            Some(t) => {
                let (c0, c1) = parse_amplitudes(t)?;
                normalize_pair(c0, c1, normalize)
            }
        }
    };
    let (a0, a1) = resolve(args.alpha.as_ref().or(file.alpha.as_ref()))?;
    let (b0, b1) = resolve(args.beta.as_ref().or(file.beta.as_ref()))?;

    let alice = GhzLikeSpec::new(n_alice, a0, a1).map_err(|e| e.to_string())?;
    let bob = GhzLikeSpec::new(n_bob, b0, b1).map_err(|e| e.to_string())?;
    let echo = serde_json::json!({
        "n_alice": n_alice,
        "n_bob": n_bob,
        "alpha": [[a0.re, a0.im], [a1.re, a1.im]],
        "beta": [[b0.re, b0.im], [b1.re, b1.im]],
        "normalize": normalize,
    });
    Ok(PartySpecs { alice, bob, echo })
}

fn merge_json(base: serde_json::Value, extra: serde_json::Value) -> serde_json::Value {
    let mut map = base.as_object().cloned().unwrap_or_default();
    if let Some(obj) = extra.as_object() {
        for (k, v) in obj {
            map.insert(k.clone(), v.clone());
        }
    }
    serde_json::Value::Object(map)
}

fn cmd_bqt_run(args: BqtArgs) -> Result<ExitCode, String> {
    let started = Instant::now();
    let file = FileConfig::load(args.common.config.as_deref())?;
    let specs = resolve_specs(&args, &file)?;
    let seed = args.common.seed.or(file.seed).unwrap_or(42);
    let trials = args.trials.or(file.trials).unwrap_or(1000);
    let format = args.common.format.or(file.format).unwrap_or(OutputFormat::Csv);
    let out = args.common.out.clone().or(file.out);

    let config = merge_json(
        specs.echo.clone(),
        serde_json::json!({"seed": seed, "trials": trials}),
    );
    let mut record = ResultRecord::new(
        "bqt run",
        config,
        &[
            "row",
            "alice_outcome",
            "bob_outcome",
            "alice_correction",
            "bob_correction",
            "fidelity_alice_to_bob",
            "fidelity_bob_to_alice",
            "branch_probability",
        ],
    );

    let mut min_a2b = f64::INFINITY;
    let mut min_b2a = f64::INFINITY;
    for trial in 0..trials {
        let mut rng = SimRng::derive(seed, trial);
        let t = protocol::run_bqt(&specs.alice, &specs.bob, &mut rng).map_err(|e| e.to_string())?;
        min_a2b = min_a2b.min(t.fidelity_alice_to_bob);
        min_b2a = min_b2a.min(t.fidelity_bob_to_alice);
        record.push_row(vec![
            Field::Int(trial as i64),
            t.alice_outcome.to_string().into(),
            t.bob_outcome.to_string().into(),
            t.alice_correction.to_string().into(),
            t.bob_correction.to_string().into(),
            t.fidelity_alice_to_bob.into(),
            t.fidelity_bob_to_alice.into(),
            t.branch_probability.into(),
        ]);
    }
    record.push_row(vec![
        "min".into(),
        Field::Empty,
        Field::Empty,
        Field::Empty,
        Field::Empty,
        min_a2b.into(),
        min_b2a.into(),
        Field::Empty,
    ]);
    record.duration = started.elapsed();
    record
        .write_to(out.as_deref(), format)
        .map_err(|e| e.to_string())?;

    Ok(if min_a2b.min(min_b2a) >= FIDELITY_GATE {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_bqt_branches(args: BqtArgs) -> Result<ExitCode, String> {
    let started = Instant::now();
    let file = FileConfig::load(args.common.config.as_deref())?;
    let specs = resolve_specs(&args, &file)?;
    let format = args.common.format.or(file.format).unwrap_or(OutputFormat::Csv);
    let out = args.common.out.clone().or(file.out);

    let mut record = ResultRecord::new(
        "bqt branches",
        specs.echo.clone(),
        &[
            "alice_outcome",
            "bob_outcome",
            "branch_probability",
            "collapse_overlap",
            "fidelity_alice_to_bob",
            "fidelity_bob_to_alice",
        ],
    );
    let branches =
        protocol::enumerate_branches(&specs.alice, &specs.bob).map_err(|e| e.to_string())?;
    let mut min_fid = f64::INFINITY;
    for b in &branches {
        let t = &b.transcript;
        min_fid = min_fid
            .min(t.fidelity_alice_to_bob)
            .min(t.fidelity_bob_to_alice);
        record.push_row(vec![
            t.alice_outcome.to_string().into(),
            t.bob_outcome.to_string().into(),
            t.branch_probability.into(),
            b.collapse_overlap.into(),
            t.fidelity_alice_to_bob.into(),
            t.fidelity_bob_to_alice.into(),
        ]);
    }
    record.duration = started.elapsed();
    record
        .write_to(out.as_deref(), format)
        .map_err(|e| e.to_string())?;

    Ok(if min_fid >= FIDELITY_GATE {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

struct NoiseSetup {
    kind: Option<NoiseKind>,
    grid: Vec<f64>,
    grid_text: String,
    format: OutputFormat,
    out: Option<PathBuf>,
}

fn resolve_noise(args: &NoiseArgs, default_grid: &str) -> Result<NoiseSetup, String> {
    let file = FileConfig::load(args.common.config.as_deref())?;
    let kind = match args.kind.as_ref().or(file.kind.as_ref()) {
        Some(text) => Some(text.parse::<NoiseKind>().map_err(|e| e.to_string())?),
        None => None,
    };
    let grid_text = args
        .grid
        .clone()
        .or(file.grid.clone())
        .unwrap_or_else(|| default_grid.to_string());
    let grid = parse_grid(&grid_text)?;
    let format = args.common.format.or(file.format).unwrap_or(OutputFormat::Csv);
    let out = args.common.out.clone().or(file.out);
    Ok(NoiseSetup { kind, grid, grid_text, format, out })
}

fn cmd_noise_sweep(args: NoiseArgs) -> Result<ExitCode, String> {
    let started = Instant::now();
    let setup = resolve_noise(&args, "0:1:101")?;
    let kind = setup.kind.ok_or("noise sweep needs --kind (or a config entry)")?;

    let config = serde_json::json!({"kind": kind.to_string(), "grid": setup.grid_text});
    let mut record = ResultRecord::new("noise sweep", config, &["p", "f_exact", "f_paper", "delta"]);
    let curve = noise::sweep(kind, &setup.grid).map_err(|e| e.to_string())?;
    for s in &curve.samples {
        record.push_row(vec![
            s.p.into(),
            s.exact.into(),
            s.published.into(),
            (s.exact - s.published).into(),
        ]);
    }
    record.duration = started.elapsed();
    record
        .write_to(setup.out.as_deref(), setup.format)
        .map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_noise_compare(args: NoiseArgs) -> Result<ExitCode, String> {
    let started = Instant::now();
    let setup = resolve_noise(&args, "0:1:21")?;
    if setup.kind.is_some() {
        return Err("noise compare sweeps every kind; drop --kind or use noise sweep".into());
    }

    let config = serde_json::json!({"grid": setup.grid_text});
    let mut record = ResultRecord::new(
        "noise compare",
        config,
        &["kind", "p", "f_exact", "f_paper", "delta"],
    );
    for kind in NoiseKind::ALL {
        let curve = noise::sweep(kind, &setup.grid).map_err(|e| e.to_string())?;
        for s in &curve.samples {
            record.push_row(vec![
                kind.to_string().into(),
                s.p.into(),
                s.exact.into(),
                s.published.into(),
                (s.exact - s.published).into(),
            ]);
        }
    }
    record.duration = started.elapsed();
    record
        .write_to(setup.out.as_deref(), setup.format)
        .map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_qec_mc(args: QecArgs) -> Result<ExitCode, String> {
    let started = Instant::now();
    let file = FileConfig::load(args.common.config.as_deref())?;
    let p = args.p.or(file.p).unwrap_or(0.017);
    let trials = args.trials.or(file.trials).unwrap_or(100_000);
    let seed = args.common.seed.or(file.seed).unwrap_or(42);
    let format = args.common.format.or(file.format).unwrap_or(OutputFormat::Csv);
    let out = args.common.out.clone().or(file.out);

    let config = serde_json::json!({"p": p, "seed": seed, "trials": trials});
    let mut record = ResultRecord::new(
        "qec mc",
        config,
        &["p", "p_ec_closed_form", "estimate", "std_error", "z_abs"],
    );
    let closed = qec::p_ec_closed_form(p);
    let (estimate, std_error) = qec::monte_carlo_pec(p, trials, seed).map_err(|e| e.to_string())?;
    let z_abs = if std_error > 0.0 {
        (estimate - closed).abs() / std_error
    } else if (estimate - closed).abs() < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    };
    record.push_row(vec![
        p.into(),
        closed.into(),
        estimate.into(),
        std_error.into(),
        z_abs.into(),
    ]);
    record.duration = started.elapsed();
    record
        .write_to(out.as_deref(), format)
        .map_err(|e| e.to_string())?;

    Ok(if z_abs <= 4.0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_qec_threshold(args: QecArgs) -> Result<ExitCode, String> {
    let started = Instant::now();
    let file = FileConfig::load(args.common.config.as_deref())?;
    let format = args.common.format.or(file.format).unwrap_or(OutputFormat::Csv);
    let out = args.common.out.clone().or(file.out);

    let mut record = ResultRecord::new(
        "qec threshold",
        serde_json::json!({}),
        &["root", "p_e_at_root", "bitflip_fidelity_at_root"],
    );
    let root = qec::crossover_threshold();
    let p_e = qec::p_e_closed_form(root);
    let fidelity = noise::channel_fidelity_exact(NoiseKind::BitFlip, root).map_err(|e| e.to_string())?;
    record.push_row(vec![root.into(), p_e.into(), fidelity.into()]);
    record.duration = started.elapsed();
    record
        .write_to(out.as_deref(), format)
        .map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}
