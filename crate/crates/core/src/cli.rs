//! Command-line front end.
//!
//! Exit codes: 0 success, 1 unexpected failure, 2 invalid input or flags,
//! 3 solver non-convergence or non-stationary simulation, 4 failed
//! verification.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::network::{Element, ElementLiteral, Network, NetworkError};
use crate::scenarios::DEFAULT_SEED;
use crate::simulator::{detect_clusters, simulate_system, ClosedLoop, SimError, SimOptions};
use crate::steadystate::{residual, solve, SolveError, SolverOptions};
use crate::symmetry::{exchangeability_partition, weak_automorphisms};
use crate::synthesis::{synthesize_with_agent, verify_synthesis, ClusterSpec, Orientation, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "symclust",
    version,
    about = "Symmetry-induced clustering in diffusively coupled networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weak automorphisms, exchangeability partition and predicted cluster values.
    Analyze {
        network: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_iter: usize,
    },
    /// Solve for the network steady state.
    SteadyState {
        network: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_iter: usize,
    },
    /// Simulate the closed loop and detect clusters.
    Simulate {
        network: PathBuf,
        /// Duration.
        #[arg(long = "T", default_value_t = 50.0)]
        duration: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Seed for random initial conditions.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Initial state: comma-separated values, or `ball:R` for a seeded
        /// random point of the ball of radius R.
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        /// Length of the final window used for cluster detection.
        #[arg(long, default_value_t = 5.0)]
        window: f64,
        /// Stationarity and clustering tolerance.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 10)]
        sample_every: usize,
        /// Directory for trace.csv and summary.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize a two-cluster network and verify it.
    Synthesize {
        /// Cluster sizes `nA,nB`.
        #[arg(long, default_value = "2,3")]
        sizes: String,
        /// Cluster values `yA,yB`.
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        values: String,
        #[arg(long, default_value_t = 1.0)]
        slope: f64,
        /// Agent as a JSON relation literal or model reference.
        #[arg(long, default_value = r#"{"named": "identity"}"#)]
        agent: String,
        #[arg(long = "T", default_value_t = 50.0)]
        duration: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Directory for network.json and report.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    NotConverged(String),
    Verification(String),
    Other(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::NotConverged(_) => 3,
            Failure::Verification(_) => 4,
            Failure::Other(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::NotConverged(m) | Failure::Verification(m) | Failure::Other(m) => m,
        }
    }
}

impl From<NetworkError> for Failure {
    fn from(e: NetworkError) -> Self {
        match e {
            NetworkError::Io(_) => Failure::Input(format!("cannot read network file: {e}")),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::NotConverged { .. } | SolveError::Infeasible(_) => Failure::NotConverged(e.to_string()),
            SolveError::InvalidOption(_) => Failure::Input(e.to_string()),
            e => Failure::Other(e.to_string()),
        }
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidStep(_)
            | SimError::InvalidDuration(_)
            | SimError::InvalidSampling
            | SimError::InitialState { .. }
            | SimError::Model(..)
            | SimError::WindowTooLong { .. } => Failure::Input(e.to_string()),
            SimError::NotStationary { .. } => Failure::NotConverged(e.to_string()),
            e => Failure::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(format!("i/o error: {e}"))
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Command::Analyze { network, tol, max_iter } => {
            let net = load(network)?;
            let opts = solver_options(*tol, *max_iter)?;
            analyze(&net, &opts, stdout)
        }
        Command::SteadyState { network, tol, max_iter } => {
            let net = load(network)?;
            let opts = solver_options(*tol, *max_iter)?;
            match solve(&net, &opts) {
                Ok(ss) => emit(stdout, &ss),
                Err(SolveError::NotConverged { max_iter, best }) => {
                    emit(stdout, &best)?;
                    Err(SolveError::NotConverged { max_iter, best }.into())
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::Simulate {
            network,
            duration,
            dt,
            seed,
            x0,
            window,
            tol,
            sample_every,
            out,
        } => {
            positive("T", *duration)?;
            positive("dt", *dt)?;
            positive("window", *window)?;
            positive("tol", *tol)?;
            let net = load(network)?;
            let opts = SimOptions {
                duration: *duration,
                dt: *dt,
                sample_every: *sample_every,
            };
            run_simulation(&net, &opts, *seed, x0.as_deref(), *window, *tol, out.as_deref(), stdout)
        }
        Command::Synthesize {
            sizes,
            values,
            slope,
            agent,
            duration,
            dt,
            out,
        } => {
            positive("slope", *slope)?;
            positive("T", *duration)?;
            positive("dt", *dt)?;
            let sizes = pair::<usize>("sizes", sizes)?;
            let values = pair::<f64>("values", values)?;
            let literal: ElementLiteral =
                serde_json::from_str(agent).map_err(|e| Failure::Input(format!("invalid --agent literal: {e}")))?;
            let agent = Element::from_literal(literal, None, "agent")?;
            let spec = ClusterSpec::new(sizes, values).with_slope(*slope);
            run_synthesis(&agent, &spec, *duration, *dt, out.as_deref(), stdout)
        }
    }
}

fn load(path: &Path) -> Result<Network, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Ok(Network::from_json(&text)?)
}

fn positive(name: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Input(format!("--{name} must be positive, got {v}")))
    }
}

fn solver_options(tol: f64, max_iter: usize) -> Result<SolverOptions, Failure> {
    positive("tol", tol)?;
    if max_iter == 0 {
        return Err(Failure::Input("--max-iter must be positive".into()));
    }
    Ok(SolverOptions { tol, max_iter })
}

fn pair<T: std::str::FromStr>(name: &str, s: &str) -> Result<(T, T), Failure> {
    let bad = || Failure::Input(format!("--{name} expects two comma-separated values, got {s:?}"));
    let mut it = s.split(',').map(|p| p.trim().parse::<T>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(bad()),
    }
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn emit<T: Serialize + ?Sized>(stdout: &mut dyn Write, value: &T) -> Result<(), Failure> {
    stdout.write_all(to_json(value).as_bytes())?;
    Ok(())
}

fn analyze(net: &Network, opts: &SolverOptions, stdout: &mut dyn Write) -> Result<(), Failure> {
    let ids = net.vertex_ids();
    let group = weak_automorphisms(net).map_err(|e| Failure::Input(e.to_string()))?;
    let images: Vec<Vec<u32>> = group
        .iter()
        .map(|p| p.image().iter().map(|&j| ids[j]).collect())
        .collect();
    let partition = exchangeability_partition(net).map_err(|e| Failure::Input(e.to_string()))?;
    let values: Option<Vec<f64>> = solve(net, opts).ok().map(|ss| {
        partition
            .blocks
            .iter()
            .map(|b| b.iter().map(|&i| ss.y[i]).sum::<f64>() / b.len() as f64)
            .collect()
    });
    emit(
        stdout,
        &json!({
            "weak_automorphisms": images,
            "exchangeability_partition": partition.ids(net),
            "assumption3_holds": net.controllers_odd(),
            "predicted_values": values,
        }),
    )
}

/// Seeded random point of the ball of radius `r` in `dim` dimensions.
fn random_ball(dim: usize, r: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if dim == 0 {
        return Vec::new();
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 {
            let radius = r * rng.random::<f64>().powf(1.0 / dim as f64);
            return v.iter().map(|x| x / norm * radius).collect();
        }
    }
}

fn parse_x0(spec: &str, dim: usize, seed: u64) -> Result<Vec<f64>, Failure> {
    if let Some(r) = spec.strip_prefix("ball:") {
        let r: f64 = r
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("invalid ball radius {r:?}")))?;
        positive("x0 ball radius", r)?;
        return Ok(random_ball(dim, r, seed));
    }
    spec.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Failure::Input(format!("invalid --x0 entry {p:?}")))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn run_simulation(
    net: &Network,
    opts: &SimOptions,
    seed: u64,
    x0: Option<&str>,
    window: f64,
    tol: f64,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let sys = ClosedLoop::new(net)?;
    let x0 = x0.map(|s| parse_x0(s, sys.state_dim(), seed)).transpose()?;
    let trace = simulate_system(&sys, net, x0.as_deref(), opts)?;
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        trace.save_csv(dir.join("trace.csv"))?;
    }
    let final_residual = residual(net, trace.final_outputs());
    let detection = detect_clusters(&trace, window, tol);
    let summary = match &detection {
        Ok(d) => json!({
            "detected_partition": d.partition.ids(net),
            "values": d.partition.values,
            "drift": d.drift,
            "final_residual": final_residual,
            "seed": seed,
        }),
        Err(SimError::NotStationary { drift, .. }) => json!({
            "detected_partition": null,
            "values": null,
            "drift": drift,
            "final_residual": final_residual,
            "seed": seed,
        }),
        Err(_) => serde_json::Value::Null,
    };
    if !summary.is_null() {
        if let Some(dir) = out {
            std::fs::write(dir.join("summary.json"), to_json(&summary))?;
        }
        emit(stdout, &summary)?;
    }
    detection.map(|_| ()).map_err(Failure::from)
}

fn run_synthesis(
    agent: &Element,
    spec: &ClusterSpec,
    duration: f64,
    dt: f64,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let syn = synthesize_with_agent(agent, spec, Orientation::HeadsOnB).map_err(|e| match e {
        crate::synthesis::SynthesisError::Network(e) => Failure::from(e),
        e => Failure::Input(e.to_string()),
    })?;
    let mut opts = VerifyOptions::default();
    opts.sim.duration = duration;
    opts.sim.dt = dt;
    opts.window = opts.window.min(duration / 2.0);
    let report = verify_synthesis(&syn.network, spec, &opts);
    let passed = report.passed();
    let doc = json!({
        "controller": {"a": syn.slope, "b": syn.offset},
        "w": syn.w,
        "checks": report,
        "passed": passed,
    });
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("network.json"), syn.network.to_json())?;
        std::fs::write(dir.join("report.json"), to_json(&doc))?;
    }
    emit(stdout, &doc)?;
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification("synthesized network failed verification".into()))
    }
}
