mod config;
mod error;
mod experiment;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bigenus::bigraph::{
    gen_random_bipartite, orient_randomly, read_bipartite, read_digraph, standard_graph,
    write_bipartite, write_digraph, BipartiteGraph, Digraph, GenParams,
};
use bigenus::embedding::write_rotation;
use bigenus::estimator::{
    estimate_genus_with_rotation, nonorientable_bounds, predicted_genus,
    predicted_nonorientable_genus, psi, regime_classify, small_p_asymptote_check, EstimateConfig,
    GenusEstimate, Regime, DEFAULT_TRAIL_CAP,
};
use bigenus::oracle::{exact_genus_with_witness, heuristic_genus_upper, SearchBudget};
use bigenus::trails::{
    build_trail_hypergraph, check_matching_conditions, enumerate_closed_trails, find_matching,
    theoretical_delta, write_trails, Strategy,
};
use clap::{Args, Parser, Subcommand};

use config::{ExperimentConfig, PSpec};
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "bigenus",
    version,
    about = "Genus bounds and embeddings for random bipartite graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample G(n1, n2, p) or build the standard graph; writes an edge list.
    Generate(GenerateArgs),
    /// Orient every edge of a graph at random.
    Orient(OrientArgs),
    /// Enumerate closed trails of length 2i+2 in a random orientation.
    Trails(TrailsArgs),
    /// Match closed trails and report coverage and degree conditions.
    Match(MatchArgs),
    /// Run the embedding pipeline; prints a CSV row and a summary.
    Estimate(EstimateArgs),
    /// Exact genus by exhaustive search, or a hill-climbing upper bound.
    Oracle(OracleArgs),
    /// Regime and predicted genus for (n1, n2, p).
    Predict(PredictArgs),
    /// Monte Carlo sweep over a parameter grid.
    Experiment(ExperimentArgs),
}

#[derive(Args, Clone)]
struct GraphSource {
    /// Edge-list file (`bipartite n1 n2` header); `-` reads stdin.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    /// Probability, or `nexp:<a>` for n1^a.
    #[arg(long)]
    p: Option<PSpec>,
    /// Build the standard graph instead of sampling.
    #[arg(long)]
    standard: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GraphSource {
    fn p_value(&self) -> Option<f64> {
        Some(self.p?.resolve(self.n1?))
    }

    fn load(&self) -> CliResult<BipartiteGraph> {
        if let Some(path) = &self.graph {
            return read_bipartite(open(path)?).map_err(|e| input_error(path, e));
        }
        let (Some(n1), Some(n2), Some(p)) = (self.n1, self.n2, self.p) else {
            return Err(CliError::Usage(
                "give --graph FILE or all of --n1 --n2 --p".into(),
            ));
        };
        let p = p.resolve(n1);
        if self.standard {
            Ok(standard_graph(n1, n2, p)?)
        } else {
            Ok(gen_random_bipartite(&GenParams::new(
                n1, n2, p, self.seed, 1,
            )?)?)
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OrientArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrailsArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Read a digraph file instead of orienting a graph.
    #[arg(long, conflicts_with = "graph")]
    digraph: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    i: usize,
    /// Stop after this many trails.
    #[arg(long)]
    cap: Option<usize>,
    /// Enumerate in the reversed orientation.
    #[arg(long)]
    reverse: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MatchArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 1)]
    i: usize,
    #[arg(long, default_value = "greedy")]
    strategy: Strategy,
    #[arg(long, default_value_t = DEFAULT_TRAIL_CAP)]
    cap: usize,
    /// Tolerance for the degree and codegree conditions.
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    /// Write the matched trails here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 1)]
    i: usize,
    #[arg(long, default_value = "greedy")]
    strategy: Strategy,
    /// Band for the near-(2i+2)-gon diagnostic.
    #[arg(long, default_value_t = 0.15)]
    eps: f64,
    /// Trail cap per hypergraph; 0 disables it.
    #[arg(long, default_value_t = DEFAULT_TRAIL_CAP)]
    cap: usize,
    /// Take mirror trails without the blossom veto and strip blossoms
    /// afterwards only.
    #[arg(long)]
    plain_mirror: bool,
    /// Also check the hypergraph degree/codegree conditions.
    #[arg(long)]
    conditions: bool,
    /// Append the CSV row here (header written for a new file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the constructed rotation system here.
    #[arg(long)]
    rotation_out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    source: GraphSource,
    #[arg(long, default_value_t = 10_000_000)]
    max_rotations: u64,
    #[arg(long, default_value_t = 600.0)]
    max_seconds: f64,
    /// Hill-climb instead of refusing when exhaustive search is too big.
    #[arg(long)]
    heuristic: bool,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    /// Write a witness rotation system here.
    #[arg(long)]
    witness: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    n1: usize,
    #[arg(long)]
    n2: usize,
    #[arg(long)]
    p: PSpec,
    /// Override the classified regime, e.g. `dense-4gon`, `balanced-i(2)`.
    #[arg(long)]
    regime: Option<Regime>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat key = value file: n1, n2, p, i (comma lists), trials, seed,
    /// strategy, eps, cap, out.
    #[arg(long)]
    config: PathBuf,
    /// Overrides `out` from the config; rows already there are reused.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

fn input_error(path: &Path, source: bigenus::Error) -> CliError {
    match source {
        // Read failures keep their own code; anything else is a bad file.
        bigenus::Error::Io(e) => CliError::File {
            path: path.display().to_string(),
            source: e,
        },
        source => CliError::Input {
            path: path.display().to_string(),
            source,
        },
    }
}

fn open(path: &Path) -> CliResult<Box<dyn io::BufRead>> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).map_err(|source| CliError::File {
        path: path.display().to_string(),
        source,
    })?;
    Ok(Box::new(BufReader::new(f)))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::File {
            path: path.display().to_string(),
            source,
        })
}

/// Runs `write` against the file at `out`, or stdout.
fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> CliResult<()>) -> CliResult<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn cap_option(cap: usize) -> Option<usize> {
    (cap > 0).then_some(cap)
}

fn oriented(source: &GraphSource) -> CliResult<(BipartiteGraph, Digraph)> {
    let g = source.load()?;
    let d = orient_randomly(g.graph(), source.seed);
    Ok((g, d))
}

fn cmd_generate(a: GenerateArgs) -> CliResult<()> {
    let g = a.source.load()?;
    emit(a.out.as_deref(), |w| Ok(write_bipartite(&g, w)?))?;
    eprintln!("edges={}", g.edge_count());
    Ok(())
}

fn cmd_orient(a: OrientArgs) -> CliResult<()> {
    let (_, d) = oriented(&a.source)?;
    emit(a.out.as_deref(), |w| Ok(write_digraph(&d, w)?))?;
    eprintln!("arcs={}", d.arc_count());
    Ok(())
}

fn cmd_trails(a: TrailsArgs) -> CliResult<()> {
    let mut d = match &a.digraph {
        Some(path) => read_digraph(open(path)?).map_err(|e| input_error(path, e))?,
        None => oriented(&a.source)?.1,
    };
    if a.reverse {
        d = d.reverse();
    }
    let found = enumerate_closed_trails(&d, a.i, a.cap)?;
    emit(a.out.as_deref(), |w| {
        Ok(write_trails(&d, &found.trails, w)?)
    })?;
    eprintln!(
        "trails={} truncated={}",
        found.trails.len(),
        found.truncated
    );
    Ok(())
}

fn cmd_match(a: MatchArgs) -> CliResult<()> {
    let (g, d) = oriented(&a.source)?;
    let h = build_trail_hypergraph(&d, a.i, cap_option(a.cap))?;
    let mut report = find_matching(&h, a.strategy, a.source.seed);
    let p = a
        .source
        .p_value()
        .unwrap_or_else(|| g.edge_count() as f64 / (g.n1() * g.n2()).max(1) as f64);
    let target = theoretical_delta(g.n1(), g.n2(), p, a.i);
    if target > 0.0 {
        report.conditions = Some(check_matching_conditions(
            &h,
            a.delta,
            target,
            a.source.seed,
        )?);
    }
    let stdout = io::stdout();
    report.write_text(&h, stdout.lock())?;
    if let Some(path) = &a.out {
        let trails = report.trails(&h);
        emit(Some(path), |w| Ok(write_trails(&d, &trails, w)?))?;
    }
    Ok(())
}

fn cmd_estimate(a: EstimateArgs) -> CliResult<()> {
    let g = a.source.load()?;
    let cfg = EstimateConfig {
        strategy: a.strategy,
        seed: a.source.seed,
        trail_cap: cap_option(a.cap),
        p: a.source.p_value(),
        eps: a.eps,
        check_conditions: a.conditions,
        blossom_aware_mirror: !a.plain_mirror,
    };
    let (est, rot) = estimate_genus_with_rotation(&g, a.i, &cfg)?;
    let spec = a
        .source
        .p
        .map_or_else(|| est.p.to_string(), |p| p.to_string());
    let row = est.csv_row_with_spec(&spec);
    match &a.out {
        Some(path) => {
            let fresh = !path.exists();
            let mut f = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .map_err(|source| CliError::File {
                    path: path.display().to_string(),
                    source,
                })?;
            if fresh {
                writeln!(f, "{}", GenusEstimate::csv_header())?;
            }
            writeln!(f, "{row}")?;
        }
        None => println!("{}\n{row}", GenusEstimate::csv_header()),
    }
    let (nl, nu) = nonorientable_bounds(g.graph(), &est)?;
    eprintln!("{est}");
    match nu {
        Some(u) => eprintln!("nonorientable_lower={nl} nonorientable_upper={u}"),
        None => eprintln!("nonorientable_lower={nl}"),
    }
    if let Some(path) = &a.rotation_out {
        let rot = rot.ok_or_else(|| {
            CliError::Usage("no rotation: trail enumeration was truncated".into())
        })?;
        emit(Some(path), |w| Ok(write_rotation(g.graph(), &rot, w)?))?;
    }
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> CliResult<()> {
    let g = a.source.load()?;
    let budget = SearchBudget {
        max_rotations: a.max_rotations,
        max_seconds: a.max_seconds,
        restarts: a.restarts,
        steps_per_restart: None,
    };
    let (lines, rot) = match exact_genus_with_witness(g.graph(), &budget) {
        Ok((genus, rot)) => (format!("genus={genus}\nexact=true"), rot),
        Err(e @ (bigenus::Error::BudgetExceeded { .. } | bigenus::Error::ResourceGuard { .. }))
            if a.heuristic =>
        {
            eprintln!("exhaustive search refused ({e}); hill climbing");
            let lower = bigenus::estimator::euler_lower_bound(g.graph(), 4)?;
            let (upper, rot) = heuristic_genus_upper(g.graph(), &budget, a.source.seed)?;
            let exact = lower == upper;
            let text = if exact {
                format!("genus={upper}\nexact=true\nlower={lower}\nupper={upper}")
            } else {
                format!("exact=false\nlower={lower}\nupper={upper}")
            };
            (text, rot)
        }
        Err(e) => return Err(e.into()),
    };
    println!("{lines}");
    if let Some(path) = &a.witness {
        emit(Some(path), |w| Ok(write_rotation(g.graph(), &rot, w)?))?;
    }
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> CliResult<()> {
    let p = a.p.resolve(a.n1);
    let info = regime_classify(a.n1, a.n2, p)?;
    let regime = a.regime.unwrap_or(info.regime);
    println!("p={p}");
    println!("regime={}", info.regime);
    println!("critical={}", info.critical);
    println!("prediction={:.6}", predicted_genus(a.n1, a.n2, p, regime)?);
    println!(
        "nonorientable_prediction={:.6}",
        predicted_nonorientable_genus(a.n1, a.n2, p, regime)?
    );
    let i = regime.trail_i();
    println!("trail_i={i}");
    println!("delta={:.6}", theoretical_delta(a.n1, a.n2, p, i));
    if a.n2 >= 2 {
        println!("psi={:.12}", psi(p, a.n2));
        let check = small_p_asymptote_check(a.n1, a.n2, p);
        println!("small_p_exact={:.6}", check.exact);
        println!("small_p_asymptote={:.6}", check.asymptote);
        if let Some(r) = check.ratio() {
            println!("small_p_ratio={r:.6}");
        }
    }
    Ok(())
}

fn cmd_experiment(a: ExperimentArgs) -> CliResult<()> {
    let text = fs::read_to_string(&a.config).map_err(|source| CliError::File {
        path: a.config.display().to_string(),
        source,
    })?;
    let cfg = ExperimentConfig::parse(&text)?;
    let out = a.out.or_else(|| cfg.out.as_ref().map(PathBuf::from));
    let run = || experiment::run_experiment(&cfg, out.as_deref());
    let (csv, summary) = match a.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    if out.is_none() {
        print!("{csv}");
    }
    eprintln!(
        "rows={} computed={} reused={} failed={}",
        summary.rows, summary.computed, summary.reused, summary.failed
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Orient(a) => cmd_orient(a),
        Command::Trails(a) => cmd_trails(a),
        Command::Match(a) => cmd_match(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
