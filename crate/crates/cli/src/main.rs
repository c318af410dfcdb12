use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use dnls_well::classifier::{classify, ClassifyOptions};
use dnls_well::closedform::{d_on_curve, mass_on_curve, mass_threshold, momentum_on_curve, s_star};
use dnls_well::evolve::{evolve, EvolveConfig, Monitor, Status};
use dnls_well::functionals::report;
use dnls_well::gauge::gauge_transform;
use dnls_well::oracle::{run_suite, Suite};
use dnls_well::solitons::{sample, Profile};
use dnls_well::{Error, Field, Frame, Grid, ModelParams, SolitonParams};
use serde::Serialize;

const EXIT_DOMAIN: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "dnls-well", version, about = "Solitons, conserved quantities and potential wells for the generalized derivative NLS")]
struct Cli {
    /// Seed for randomly generated test data.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a soliton profile on a grid.
    Soliton {
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long = "L")]
        half_length: f64,
        #[arg(long = "N")]
        n: usize,
        #[arg(long, default_value = "phi")]
        which: Profile,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conserved quantities and action functionals of a field.
    Report {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long)]
        omega: f64,
        #[arg(long, allow_negative_numbers = true)]
        c: f64,
        #[arg(long, default_value = "dnls")]
        frame: Frame,
    },
    /// Apply the gauge transform G_a.
    Gauge {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate a soliton quantity along the curve (omega, c) = (1, 2s).
    Scan {
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long)]
        quantity: Quantity,
        #[arg(long, allow_negative_numbers = true)]
        s_from: f64,
        #[arg(long, allow_negative_numbers = true)]
        s_to: f64,
        #[arg(long)]
        steps: usize,
    },
    /// Mass threshold M* (and s* for b > 0).
    Threshold {
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
    },
    /// Potential-well classification of a field.
    Classify {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        /// `from:to:count`
        #[arg(long, allow_hyphen_values = true)]
        s_grid: Option<String>,
        #[arg(long, default_value = "gauge")]
        frame: Frame,
    },
    /// Time evolution with conservation tracking.
    Evolve {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, allow_negative_numbers = true)]
        t_end: f64,
        #[arg(long, default_value_t = 100)]
        record_every: usize,
        #[arg(long, requires = "monitor_c")]
        monitor_omega: Option<f64>,
        #[arg(long, requires = "monitor_omega", allow_negative_numbers = true)]
        monitor_c: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Quantity {
    Mass,
    Momentum,
    Energy,
    D,
}

#[derive(Serialize)]
struct Threshold {
    #[serde(skip_serializing_if = "Option::is_none")]
    s_star: Option<f64>,
    #[serde(rename = "M_star")]
    m_star: f64,
}

enum Failure {
    Domain(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

/// 17 significant digits.
fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn print_json(v: &impl Serialize) -> Outcome {
    println!("{}", serde_json::to_string(v)?);
    Ok(())
}

fn parse_s_grid(spec: &str) -> std::result::Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::Domain(format!("--s-grid expects from:to:count, got '{spec}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let from: f64 = parts[0].parse().map_err(|_| bad())?;
    let to: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    Ok(linspace(from, to, count))
}

fn linspace(from: f64, to: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..count).map(|j| from + (to - from) * j as f64 / (count - 1) as f64).collect(),
    }
}

fn scan(b: f64, quantity: Quantity, s_from: f64, s_to: f64, steps: usize) -> Outcome {
    use rayon::prelude::*;
    let rows: Vec<(f64, f64)> = linspace(s_from, s_to, steps)
        .par_iter()
        .map(|&s| {
            let v = match quantity {
                Quantity::Mass => mass_on_curve(b, s)?,
                Quantity::Momentum => momentum_on_curve(b, s)?,
                Quantity::Energy => -s * momentum_on_curve(b, s)? / 2.0,
                Quantity::D => d_on_curve(b, s)?,
            };
            Ok((s, v))
        })
        .collect::<dnls_well::Result<_>>()?;
    let mut out = String::new();
    for (s, v) in rows {
        let _ = writeln!(out, "{},{}", sci(s), sci(v));
    }
    print!("{out}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_evolve(
    field: PathBuf,
    b: f64,
    a: f64,
    dt: f64,
    t_end: f64,
    record_every: usize,
    monitor: Option<Monitor>,
    out: PathBuf,
) -> Outcome {
    let f0 = Field::load(&field)?;
    let cfg = EvolveConfig { b, gauge_a: a, dt, t_end, record_every, ..Default::default() };
    let traj = evolve(&f0, &cfg, monitor)?;
    fs::create_dir_all(&out)?;
    let mut drift = String::from("t,dE/E,dM/M,dP/P\n");
    for d in &traj.drift {
        let _ = writeln!(drift, "{},{},{},{}", sci(d.t), sci(d.energy), sci(d.mass), sci(d.momentum));
    }
    fs::write(out.join("drift.csv"), drift)?;
    if monitor.is_some() {
        let mut ks = String::from("t,sign,K\n");
        for k in &traj.k_sign {
            let _ = writeln!(ks, "{},{},{}", sci(k.t), k.sign, sci(k.value));
        }
        fs::write(out.join("k_sign.csv"), ks)?;
    }
    let mut names = Vec::new();
    for (j, snap) in traj.snapshots.iter().enumerate() {
        let name = format!("snapshot_{j:05}.json");
        snap.field.save(out.join(&name))?;
        names.push((snap.t, name));
    }
    let summary = serde_json::json!({
        "config": traj.config,
        "status": traj.status,
        "dt_used": traj.dt_used,
        "steps": traj.steps,
        "max_drift": traj.max_drift(),
        "max_grad_sq": traj.max_grad_sq,
        "gradient_bound": traj.gradient_bound,
        "bound_margin": traj.bound_margin,
        "last_fit": traj.last_fit,
        "snapshots": names.iter().map(|(t, n)| serde_json::json!({"t": t, "file": n})).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string(&summary)?;
    fs::write(out.join("summary.json"), &text)?;
    println!("{text}");
    match traj.status {
        Status::Completed => Ok(()),
        Status::BlowUp { t, reason } => Err(Failure::Numerical(format!("numerical blow-up at t = {t}: {reason}"))),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Soliton { b, omega, c, half_length, n, which, out } => {
            let sp = SolitonParams::new(ModelParams::new(b)?, omega, c)?;
            let f = sample(&sp, &Grid::new(half_length, n)?, which);
            match out {
                Some(path) => f.save(path)?,
                None => println!("{}", f.to_json()?),
            }
            Ok(())
        }
        Command::Report { field, b, omega, c, frame } => {
            let f = Field::load(field)?;
            print_json(&report(&f, &ModelParams::new(b)?, omega, c, frame))
        }
        Command::Gauge { a, input, out } => {
            if !a.is_finite() {
                return Err(Failure::Domain(format!("gauge parameter must be finite, got {a}")));
            }
            gauge_transform(&Field::load(input)?, a).save(out)?;
            Ok(())
        }
        Command::Scan { b, quantity, s_from, s_to, steps } => scan(b, quantity, s_from, s_to, steps),
        Command::Threshold { b } => {
            let m_star = mass_threshold(b)?;
            let s_star = if b > 0.0 { Some(s_star(b)?) } else { None };
            print_json(&Threshold { s_star, m_star })
        }
        Command::Classify { field, b, s_grid, frame } => {
            let f = Field::load(field)?;
            let mut opts = ClassifyOptions::default();
            if let Some(spec) = s_grid {
                opts.s_grid = parse_s_grid(&spec)?;
            }
            print_json(&classify(&f, &ModelParams::new(b)?, frame, &opts)?)
        }
        Command::Evolve { field, b, a, dt, t_end, record_every, monitor_omega, monitor_c, out } => {
            let monitor = monitor_omega.zip(monitor_c).map(|(omega, c)| Monitor { omega, c });
            run_evolve(field, b, a, dt, t_end, record_every, monitor, out)
        }
        Command::Verify { suite } => {
            let r = run_suite(suite, cli.seed);
            print_json(&r)?;
            if r.passed {
                Ok(())
            } else {
                Err(Failure::Numerical(format!("suite {suite:?} failed")))
            }
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("DNLS_WELL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DOMAIN)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
