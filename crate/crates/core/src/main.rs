use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wcsim::channel::{db_to_linear, default_g, ChannelParams};
use wcsim::consensus::GossipGraph;
use wcsim::harness::{exit_code, run_sweep_to_output};
use wcsim::spectrum::{greedy_coloring, ConflictGraph};
use wcsim::topology::{gossip_radius, place_nodes};
use wcsim::{oracle, Algorithm, Error, NodePlacement, PhaseMode, Result, SweepSpec};

#[derive(Parser)]
#[command(name = "wcsim", version, about = "Averaging consensus over path-loss wireless networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep and write one CSV row per (algorithm, N, trial).
    Run(RunArgs),
    /// Brute-force reference computations.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Write debugging artifacts.
    #[command(subcommand)]
    Dump(DumpCommand),
}

#[derive(Args)]
struct RunArgs {
    /// JSON file with the sweep keys; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    algorithm: Option<Vec<Algorithm>>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    gamma_db: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    k_slots: Option<u32>,
    #[arg(long)]
    u: Option<f64>,
    #[arg(long)]
    phase: Option<PhaseMode>,
    #[arg(long)]
    radius_c: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_slots: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output CSV; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Exact chromatic number and greedy color count of an edge list.
    Chromatic {
        #[arg(long)]
        edges: PathBuf,
    },
    /// Two-hop square of an edge list, by per-vertex BFS.
    Square {
        #[arg(long)]
        edges: PathBuf,
    },
    /// Node neighborhoods when every node transmits at `power`.
    Neighborhoods {
        #[arg(long)]
        placement: PathBuf,
        #[arg(long)]
        power: f64,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Whether the geometric graph at the gossip radius is connected.
    Connectivity {
        #[arg(long)]
        placement: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        radius_c: f64,
    },
}

#[derive(Subcommand)]
enum DumpCommand {
    /// Uniform placement as `node_id,x,y`.
    Placement {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Gossip-power link graph of a placement as an edge list.
    Edges {
        #[arg(long)]
        placement: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        radius_c: f64,
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ChannelArgs {
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    gamma_db: f64,
    /// Path-loss constant; defaults to 10^(-1.5 alpha).
    #[arg(long)]
    g: Option<f64>,
    #[arg(long, default_value = "fixed")]
    phase: PhaseMode,
}

impl ChannelArgs {
    fn params(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.alpha, self.g.unwrap_or_else(|| default_g(self.alpha)), db_to_linear(self.gamma_db), self.phase)
    }
}

fn sweep_spec(args: RunArgs) -> Result<SweepSpec> {
    let mut spec = match &args.config {
        Some(path) => SweepSpec::load(path)?,
        None => SweepSpec::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = args.$field { spec.$field = v; } )* };
    }
    set!(algorithm, n, trials, alpha, gamma_db, epsilon, kappa, k_slots, u, phase, radius_c, seed);
    if args.max_slots.is_some() {
        spec.max_slots = args.max_slots;
    }
    if args.workers.is_some() {
        spec.workers = args.workers;
    }
    if args.out.is_some() {
        spec.out = args.out;
    }
    Ok(spec)
}

fn read_graph(path: &PathBuf) -> Result<ConflictGraph> {
    ConflictGraph::read_edge_list(BufReader::new(File::open(path)?))
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn oracle(cmd: OracleCommand) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match cmd {
        OracleCommand::Chromatic { edges } => {
            let g = read_graph(&edges)?;
            if g.vertex_count() > 24 {
                return Err(Error::InvalidArgument(format!("{} vertices is too many for exact coloring", g.vertex_count())));
            }
            writeln!(out, "chromatic {}", oracle::chromatic_number(&g))?;
            writeln!(out, "greedy {}", greedy_coloring(&g).count)?;
        }
        OracleCommand::Square { edges } => {
            oracle::bfs_square(&read_graph(&edges)?).write_edge_list(&mut out)?;
        }
        OracleCommand::Neighborhoods { placement, power, channel } => {
            let p = NodePlacement::load(placement)?;
            let params = channel.params()?;
            let powers = vec![power; p.len()];
            for n in 0..p.len() {
                let hs: Vec<String> = oracle::node_neighborhood(&params, &p, &powers, n).iter().map(|m| m.to_string()).collect();
                writeln!(out, "{n}: {}", hs.join(" "))?;
            }
        }
        OracleCommand::Connectivity { placement, radius_c } => {
            let p = NodePlacement::load(placement)?;
            let radius = gossip_radius(p.len(), radius_c);
            writeln!(out, "radius {radius}")?;
            writeln!(out, "connected {}", oracle::connected_at_radius(&p, radius))?;
        }
    }
    Ok(())
}

fn dump(cmd: DumpCommand) -> Result<()> {
    match cmd {
        DumpCommand::Placement { n, seed, out } => place_nodes(n, seed)?.write_csv(output(&out)?),
        DumpCommand::Edges { placement, radius_c, channel, out } => {
            let p = NodePlacement::load(placement)?;
            let graph = GossipGraph::new(&channel.params()?, &p, radius_c);
            graph.links.write_edge_list(output(&out)?)?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => sweep_spec(args).and_then(|spec| run_sweep_to_output(&spec)),
        Command::Oracle(cmd) => oracle(cmd),
        Command::Dump(cmd) => dump(cmd),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wcsim: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
