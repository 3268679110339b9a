//! `degmc`: batch front end for sampling, counting and verification.
//!
//! Every option can also be set through an environment variable with the
//! `DEGMC_` prefix; flags win over the environment, which wins over the
//! defaults. Exit codes: 0 success, 1 verification failure or other error,
//! 2 infeasible instance, 3 parse or usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use degmc::chains::{RunConfig, DEFAULT_SWITCH_Q};
use degmc::counting::{
    build_ladder, build_ladder_for_m, default_chain_steps, estimate_count, estimate_count_m, CountConfig, IntervalSampler,
};
use degmc::io::{parse_edge_list, parse_interval_file, parse_node_counts, write_edge_list, write_interval_file};
use degmc::oracle::{
    enumerate_graphs, mixing_time, mixing_time_bound, spectral_gap, stationarity_residual, stationary_distribution, tv_curve, Constraint,
    DENSE_EIGEN_CAP,
};
use degmc::verify::{run_suite, Suite, SuiteOptions, SuiteReport};
use degmc::{
    chains::seeded_rng, feasible_edge_counts, realize, realize_in_interval, DegreeInterval, Error, Graph, Matrix, TransitionKernel,
};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "degmc", version, about = "Sample and count graphs with degree intervals")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// RNG seed.
    #[arg(long, global = true, env = "DEGMC_SEED", default_value_t = 0)]
    seed: u64,
    /// Chain steps per sample; defaults to 50 n^2 (m+1).
    #[arg(long, global = true, env = "DEGMC_STEPS")]
    steps: Option<u64>,
    /// Relative accuracy.
    #[arg(long, global = true, env = "DEGMC_EPS", default_value_t = 0.1)]
    eps: f64,
    /// Failure probability.
    #[arg(long, global = true, env = "DEGMC_DELTA", default_value_t = 0.05)]
    delta: f64,
    /// Markov chain; without it `sample` uses the exact-count descent.
    #[arg(long, global = true, env = "DEGMC_CHAIN", value_enum)]
    chain: Option<ChainArg>,
    /// Edge count to restrict to.
    #[arg(long, global = true, env = "DEGMC_M")]
    m: Option<usize>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "DEGMC_THREADS")]
    threads: Option<usize>,
    /// Output path (a directory for `sample`); stdout when absent.
    #[arg(long, global = true, env = "DEGMC_OUTPUT")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ChainArg {
    Switch,
    SwitchHinge,
    Interval,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Degree intervals from an observed edge list and per-node counts of
    /// unobserved pairs.
    Ingest { edges: PathBuf, missing: PathBuf },
    /// Draw graphs from G(l,u) and write them with a manifest.
    Sample {
        intervals: PathBuf,
        /// Number of graphs.
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Estimate |G(l,u)|, or |G_m(l,u)| with --m.
    Count { intervals: PathBuf },
    /// Print the telescoping ladder, ending at sum 2m with --m.
    Ladder { intervals: PathBuf },
    /// Exact spectral and mixing diagnostics of a chain on a small instance.
    Analyze { intervals: PathBuf },
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        /// Largest node count; defaults per suite.
        #[arg(long)]
        max_n: Option<usize>,
        /// Sequences drawn per configuration by sampling suites.
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Core(Error::Parse { .. } | Error::InvalidParams(_) | Error::LengthMismatch { .. }) | Failure::Usage(_) => 3,
        Failure::Core(Error::Infeasible(_) | Error::NotGraphical | Error::BoundExceeded { .. } | Error::OddResidue { .. }) => 2,
        _ => 1,
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn emit(common: &Common, text: &str) -> CliResult<()> {
    match &common.output {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn load_intervals(path: &Path) -> CliResult<DegreeInterval> {
    Ok(parse_interval_file(&read(path)?)?)
}

fn count_config(common: &Common) -> CliResult<CountConfig> {
    Ok(CountConfig::new(common.eps, common.delta, common.seed)?)
}

fn cmd_ingest(common: &Common, edges: &Path, missing: &Path) -> CliResult<()> {
    let g = parse_edge_list(&read(edges)?, None)?;
    let counts = parse_node_counts(&read(missing)?, g.n())?;
    let iv = degmc::intervals_from_observation(&g, &counts)?;
    emit(common, &write_interval_file(&iv))
}

/// Kernel and starting state for `--chain`.
fn chain_start(chain: ChainArg, iv: &DegreeInterval, m: Option<usize>) -> CliResult<(TransitionKernel, Graph)> {
    match chain {
        ChainArg::Switch => {
            if !iv.is_exact() {
                return Err(Failure::Usage("the switch chain needs lower = upper".into()));
            }
            let d = degmc::DegreeSequence(iv.lower().to_vec());
            Ok((TransitionKernel::switch(&d, DEFAULT_SWITCH_Q)?, realize(&d)?))
        }
        ChainArg::SwitchHinge => {
            let m = match m {
                Some(m) => m,
                None => *feasible_edge_counts(iv)
                    .first()
                    .ok_or_else(|| Error::Infeasible("no feasible edge count".into()))?,
            };
            Ok((TransitionKernel::switch_hinge(iv.clone(), Some(m)), realize_in_interval(iv, m)?))
        }
        ChainArg::Interval => {
            if m.is_some() {
                return Err(Failure::Usage("the interval chain moves between edge counts; drop --m".into()));
            }
            let m0 = *feasible_edge_counts(iv)
                .first()
                .ok_or_else(|| Error::Infeasible("no feasible edge count".into()))?;
            Ok((TransitionKernel::degree_interval(iv.clone()), realize_in_interval(iv, m0)?))
        }
    }
}

#[derive(Serialize)]
struct SampleFile {
    name: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    command: &'static str,
    instance: String,
    instance_sha256: String,
    seed: u64,
    chain: Option<ChainArg>,
    steps: Option<u64>,
    eps: Option<f64>,
    delta: Option<f64>,
    m: Option<usize>,
    count: usize,
    files: Vec<SampleFile>,
}

fn cmd_sample(common: &Common, intervals: &Path, count: usize) -> CliResult<()> {
    let iv = load_intervals(intervals)?;
    let instance = write_interval_file(&iv);
    let (graphs, steps) = match common.chain {
        Some(chain) => {
            let (kernel, g0) = chain_start(chain, &iv, common.m)?;
            let steps = common.steps.unwrap_or_else(|| default_chain_steps(iv.n(), g0.edge_count()));
            let cfg = RunConfig { steps, seed: common.seed };
            let graphs: Vec<Graph> = (0..count as u64).map(|k| kernel.run_stream(&g0, cfg, k)).collect();
            (graphs, Some(steps))
        }
        None => {
            if common.m.is_some() {
                return Err(Failure::Usage("--m needs --chain switch-hinge".into()));
            }
            let mut sampler = IntervalSampler::new(&iv, common.eps, common.delta, common.seed)?;
            let mut rng = seeded_rng(common.seed, 0);
            let graphs = (0..count).map(|_| sampler.sample(&mut rng)).collect::<degmc::Result<Vec<_>>>()?;
            (graphs, None)
        }
    };
    let texts: Vec<String> = graphs.iter().map(write_edge_list).collect();
    let width = count.saturating_sub(1).to_string().len().max(3);
    let names: Vec<String> = (0..count).map(|k| format!("sample_{k:0width$}.txt")).collect();
    let manifest = Manifest {
        command: "sample",
        instance_sha256: sha256_hex(&instance),
        instance,
        seed: common.seed,
        chain: common.chain,
        steps,
        eps: common.chain.is_none().then_some(common.eps),
        delta: common.chain.is_none().then_some(common.delta),
        m: common.m,
        count,
        files: names
            .iter()
            .zip(&texts)
            .map(|(name, text)| SampleFile {
                name: name.clone(),
                sha256: sha256_hex(text),
            })
            .collect(),
    };
    match &common.output {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.clone(), e))?;
            for (name, text) in names.iter().zip(&texts) {
                write(&dir.join(name), text)?;
            }
            write(&dir.join("manifest.json"), &json(&manifest))
        }
        None => {
            for (name, text) in names.iter().zip(&texts) {
                println!("# {name}");
                print!("{text}");
            }
            Ok(())
        }
    }
}

fn cmd_count(common: &Common, intervals: &Path) -> CliResult<()> {
    let iv = load_intervals(intervals)?;
    let cfg = count_config(common)?;
    let est = match common.m {
        Some(m) => estimate_count_m(&iv, m, &cfg)?,
        None => estimate_count(&iv, &cfg)?,
    };
    emit(common, &json(&est))
}

fn cmd_ladder(common: &Common, intervals: &Path) -> CliResult<()> {
    let iv = load_intervals(intervals)?;
    let ladder = match common.m {
        Some(m) => build_ladder_for_m(&iv, m)?,
        None => build_ladder(&iv)?,
    };
    emit(common, &json(&ladder))
}

#[derive(Serialize)]
struct Analysis {
    chain: ChainArg,
    m: Option<usize>,
    states: usize,
    symmetric: bool,
    /// `max |(pi P)(y) - pi(y)|` for the uniform `pi`.
    uniform_residual: f64,
    /// Largest deviation of the stationary vector from uniform.
    stationary_deviation: f64,
    spectral_gap: Option<f64>,
    relaxation_time: Option<f64>,
    /// Upper bound on the 1/4-mixing time from the spectral gap.
    mixing_time_bound: Option<f64>,
    /// Measured 1/4-mixing time from the first state, if within `steps`.
    mixing_time: Option<usize>,
    steps: usize,
}

fn cmd_analyze(common: &Common, intervals: &Path) -> CliResult<()> {
    let iv = load_intervals(intervals)?;
    let chain = common.chain.unwrap_or(ChainArg::Interval);
    let (kernel, _) = chain_start(chain, &iv, common.m)?;
    let constraint = match (chain, kernel.edge_count()) {
        (ChainArg::Switch, _) => Constraint::Degrees(degmc::DegreeSequence(iv.lower().to_vec())),
        (_, Some(m)) => Constraint::IntervalEdges(iv.clone(), m),
        (_, None) => Constraint::Interval(iv.clone()),
    };
    let space = enumerate_graphs(&constraint)?;
    let p: Matrix = degmc::oracle::build_matrix(&kernel, &space)?;
    let uniform = vec![1.0 / space.len() as f64; space.len()];
    let pi = stationary_distribution(&p)?;
    let gap = if space.len() <= DENSE_EIGEN_CAP {
        Some(spectral_gap(&p)?)
    } else {
        None
    };
    let steps = common.steps.map_or(1000, |s| s as usize);
    let curve = tv_curve(&p, 0, steps)?;
    let report = Analysis {
        chain,
        m: kernel.edge_count(),
        states: space.len(),
        symmetric: p.is_symmetric(1e-15),
        uniform_residual: stationarity_residual(&p, &uniform),
        stationary_deviation: pi.iter().map(|x| (x - uniform[0]).abs()).fold(0.0, f64::max),
        spectral_gap: gap,
        relaxation_time: gap.filter(|&g| g > 0.0).map(|g| 1.0 / g),
        mixing_time_bound: gap.filter(|&g| g > 0.0).map(|g| mixing_time_bound(g, uniform[0], 0.25)),
        mixing_time: mixing_time(&curve, 0.25),
        steps,
    };
    emit(common, &json(&report))
}

fn cmd_verify(common: &Common, suite: &str, max_n: Option<usize>, samples: usize) -> CliResult<()> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse().map_err(|_| {
            let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
            Failure::Usage(format!("unknown suite `{suite}`; expected one of {}, all", names.join(", ")))
        })?]
    };
    let opts = SuiteOptions {
        max_n,
        seed: common.seed,
        samples,
    };
    let reports = suites
        .iter()
        .map(|&s| run_suite(s, &opts))
        .collect::<degmc::Result<Vec<SuiteReport>>>()?;
    for r in &reports {
        eprintln!("{}: {} checks, {} failed", r.suite, r.checks, r.failed);
    }
    let ok = reports.iter().all(SuiteReport::passed);
    if reports.len() == 1 {
        emit(common, &json(&reports[0]))?;
    } else {
        emit(common, &json(&reports))?;
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let c = &cli.common;
    if let Some(t) = c.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Failure::Usage(format!("cannot start {t} threads: {e}")))?;
    }
    match &cli.command {
        Command::Ingest { edges, missing } => cmd_ingest(c, edges, missing),
        Command::Sample { intervals, count } => cmd_sample(c, intervals, *count),
        Command::Count { intervals } => cmd_count(c, intervals),
        Command::Ladder { intervals } => cmd_ladder(c, intervals),
        Command::Analyze { intervals } => cmd_analyze(c, intervals),
        Command::Verify { suite, max_n, samples } => cmd_verify(c, suite, *max_n, *samples),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Core(e) => eprintln!("error: {e}"),
                Failure::Io(path, e) => eprintln!("error: {}: {e}", path.display()),
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(exit_code(&f))
        }
    }
}
