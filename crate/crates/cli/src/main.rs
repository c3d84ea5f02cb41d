//! Command-line front end: one subcommand per pipeline, all randomness
//! drawn from `--seed`, outputs written to `--out` with a manifest.

mod graph;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use graph::{parse_vertex, GraphArgs};
use isograph::ecgraph::{
    build_isogeny_graph, compare_to_cayley, forward_edges, parse_curves_csv, planted_instance, transfer_dlp,
    IsogenyGraph,
};
use isograph::pathfind::{find_path, shortest_path, PathCertificate, SearchConfig, MIN_ORDER};
use isograph::quadform::{class_group_with_bound, Discriminant, DEFAULT_DISC_BOUND};
use isograph::walks::{mixing_experiment, mixing_length, trial_rng, RegularGraph, WalkConfig};
use isograph::{Category, Error, Result};
use output::Outputs;
use rand::Rng;
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "isograph", version, about = "Class groups, Cayley graphs and isogeny graphs")]
struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for output files and the run manifest; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Which output goes to stdout when --out is absent.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Class group of discriminant D as JSON.
    Classgroup {
        #[arg(short = 'D', long = "discriminant", allow_negative_numbers = true)]
        discriminant: i64,
        /// Largest |D| accepted.
        #[arg(long, default_value_t = DEFAULT_DISC_BOUND)]
        disc_bound: u64,
    },
    /// Spectrum and expansion of a Cayley graph, with the B-scan under --delta.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Random-walk hit-frequency experiment.
    Mix {
        #[command(flatten)]
        graph: GraphArgs,
        /// Target set W as comma-separated vertices; default is a seeded random set.
        #[arg(long)]
        targets: Option<String>,
        /// Size of the random target set.
        #[arg(long, default_value_t = 1)]
        target_count: usize,
        /// Start vertex: index, form `a:b:c` or coordinate vector.
        #[arg(long, default_value = "0")]
        start: String,
        /// Number of independent walks.
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Walk length; defaults to the mixing length.
        #[arg(long)]
        length: Option<usize>,
    },
    /// Path certificate between two vertices.
    Path {
        #[command(flatten)]
        graph: GraphArgs,
        /// Start vertex: index, form `a:b:c` or coordinate vector.
        #[arg(long)]
        from: String,
        /// End vertex, in the same notations.
        #[arg(long)]
        to: String,
    },
    /// Replays a path certificate; exit status 1 when it does not verify.
    Verify { certificate: PathBuf },
    /// Isogeny graph of an ordinary class over F_p, compared with its Cayley graph.
    Ecgraph {
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Discrete-log transfer along a path found in the isogeny graph.
    Dlpdemo {
        #[command(flatten)]
        class: ClassArgs,
    },
}

#[derive(Debug, Clone, clap::Args, Serialize)]
struct ClassArgs {
    /// Field size, a prime.
    #[arg(long)]
    p: Option<u64>,
    /// Frobenius trace of the class.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<i64>,
    /// Curves as `p,a,b` lines; the class is that of the first curve.
    #[arg(long, conflicts_with_all = ["p", "t"])]
    curve_file: Option<PathBuf>,
    /// Odd isogeny degrees, comma-separated.
    #[arg(long, default_value = "")]
    primes: String,
}

impl ClassArgs {
    fn resolve(&self) -> Result<(u64, i64, Vec<u64>)> {
        let primes = self
            .primes
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u64>().map_err(|_| Error::Input(format!("bad prime {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let (p, t) = match (&self.curve_file, self.p, self.t) {
            (Some(path), _, _) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
                let curves = parse_curves_csv(&text)?;
                let first = curves.first().ok_or_else(|| Error::Input("curve file is empty".into()))?;
                if let Some(c) = curves.iter().find(|c| c.p != first.p || c.t != first.t) {
                    return Err(Error::Input(format!(
                        "curve {},{},{} is not in the isogeny class of the first curve",
                        c.p, c.a, c.b
                    )));
                }
                (first.p, first.t)
            }
            (None, Some(p), Some(t)) => (p, t),
            _ => return Err(Error::Input("give --p and --t, or --curve-file".into())),
        };
        Ok((p, t, primes))
    }

    fn build(&self) -> Result<IsogenyGraph> {
        let (p, t, primes) = self.resolve()?;
        build_isogeny_graph(p, t, &primes)
    }
}

fn to_json<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn cmd_classgroup(out: &mut Outputs, d: i64, bound: u64) -> Result<bool> {
    let cl = class_group_with_bound(Discriminant::new(d)?, bound)?;
    out.json("classgroup.json", &cl.to_json());
    Ok(true)
}

fn cmd_spectrum(out: &mut Outputs, args: &GraphArgs) -> Result<bool> {
    let built = args.build()?;
    let g = &built.graph;
    let spec = g.spectrum_by_characters()?;
    let expansion = g.expansion().ok();
    out.json(
        "spectrum.json",
        &json!({
            "vertex_count": g.vertex_count(),
            "degree": g.degree(),
            "bound": built.bound,
            "generators": g.generators().iter().map(|s| s.label.clone()).collect::<Vec<_>>(),
            "eigenvalues": spec.entries.iter().map(|(chi, l)| json!({ "character": chi.coords, "eigenvalue": l })).collect::<Vec<_>>(),
            "c": spec.c,
            "expansion": expansion,
            "components": g.components(),
        }),
    );
    out.text("graph.dot", Format::Dot, g.to_dot());
    if let Some(scan) = &built.scan {
        out.text("scan.csv", Format::Csv, scan.to_csv());
    }
    Ok(true)
}

fn cmd_mix(
    out: &mut Outputs,
    seed: u64,
    args: &GraphArgs,
    targets: Option<&str>,
    target_count: usize,
    start: &str,
    trials: u64,
    length: Option<usize>,
) -> Result<bool> {
    let built = args.build()?;
    let g = &built.graph;
    let start = parse_vertex(&built, start)?;
    let w: Vec<usize> = match targets {
        Some(t) => t.split(',').map(|s| parse_vertex(&built, s.trim())).collect::<Result<_>>()?,
        None => random_targets(g.vertex_count(), target_count, seed)?,
    };
    let length = match length {
        Some(l) => l,
        None => {
            let mut distinct = w.clone();
            distinct.sort_unstable();
            distinct.dedup();
            mixing_length(g, distinct.len())?
        }
    };
    let cfg = WalkConfig { length, trials, seed, targets: w };
    let report = mixing_experiment(g, start, &cfg)?;
    out.json("mix.json", &to_json(&report));
    Ok(report.passed())
}

/// `count` distinct vertices chosen uniformly.
fn random_targets(n: usize, count: usize, seed: u64) -> Result<Vec<usize>> {
    if count == 0 || count > n {
        return Err(Error::Input(format!("target count {count} outside 1..={n}")));
    }
    let mut rng = trial_rng(seed, u64::MAX);
    let mut w = rand::seq::index::sample(&mut rng, n, count).into_vec();
    w.sort_unstable();
    Ok(w)
}

fn cmd_path(out: &mut Outputs, seed: u64, args: &GraphArgs, from: &str, to: &str) -> Result<bool> {
    let built = args.build()?;
    let g = &built.graph;
    let (a, b) = (parse_vertex(&built, from)?, parse_vertex(&built, to)?);
    let (cert, stats, method) = if g.vertex_count() >= MIN_ORDER || a == b {
        let (cert, stats) = find_path(g, a, b, seed, &SearchConfig::default())?;
        (cert, Some(stats), "meet-in-the-middle")
    } else {
        (shortest_path(g, a, b)?, None, "exhaustive")
    };
    out.json(
        "certificate.json",
        &json!({
            "graph": args,
            "method": method,
            "certificate": cert.to_json(g),
            "stats": stats,
        }),
    );
    Ok(true)
}

fn cmd_verify(out: &mut Outputs, path: &PathBuf) -> Result<bool> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Input(format!("certificate is not JSON: {e}")))?;
    let args: GraphArgs = serde_json::from_value(doc["graph"].clone())
        .map_err(|e| Error::Input(format!("certificate graph description: {e}")))?;
    let built = args.build()?;
    let g = &built.graph;
    let (valid, reason) = match PathCertificate::from_json(g, &doc["certificate"]) {
        Ok(cert) => match cert.replay(g) {
            Ok(end) if end == cert.end => (true, format!("replay reaches vertex {end}")),
            Ok(end) => (false, format!("replay reaches vertex {end}, certificate claims {}", cert.end)),
            Err(e) => (false, e.to_string()),
        },
        Err(e @ Error::Mismatch(_)) => (false, e.to_string()),
        Err(e) => return Err(e),
    };
    out.json("verify.json", &json!({ "valid": valid, "reason": reason }));
    Ok(valid)
}

fn cmd_ecgraph(out: &mut Outputs, class: &ClassArgs) -> Result<bool> {
    let ig = class.build()?;
    let report = compare_to_cayley(&ig)?;
    out.json("ecgraph.json", &json!({ "graph": ig.to_json(), "comparison": to_json(&report) }));
    out.text("graph.dot", Format::Dot, ig.to_dot());
    Ok(report.passed())
}

fn cmd_dlpdemo(out: &mut Outputs, seed: u64, class: &ClassArgs) -> Result<bool> {
    let ig = class.build()?;
    let h = ig.vertex_count();
    let mut rng = trial_rng(seed, u64::MAX - 1);
    let target = rng.random_range(0..h);
    let (cert, method) = if h >= MIN_ORDER {
        (find_path(&ig, 0, target, seed, &SearchConfig::default())?.0, "meet-in-the-middle")
    } else {
        (shortest_path(&ig, 0, target)?, "exhaustive")
    };
    let path = forward_edges(&ig, &cert)?;
    let (p, q, n, r) = planted_instance(&ig, 0, &mut rng)?;
    let transcript = transfer_dlp(&ig, 0, &path, p, q, n)?;
    let ok = transcript.recovered == r;
    out.json(
        "transcript.json",
        &json!({
            "p": ig.p(),
            "t": ig.t(),
            "primes": ig.primes(),
            "method": method,
            "target_j": ig.vertices()[target].j,
            "planted_r": r,
            "transcript": to_json(&transcript),
            "success": ok,
        }),
    );
    Ok(ok)
}

fn run(cli: &Cli) -> Result<bool> {
    let mut out = Outputs::new(cli.format);
    let ok = match &cli.command {
        Command::Classgroup { discriminant, disc_bound } => cmd_classgroup(&mut out, *discriminant, *disc_bound)?,
        Command::Spectrum { graph } => cmd_spectrum(&mut out, graph)?,
        Command::Mix { graph, targets, target_count, start, trials, length } => {
            cmd_mix(&mut out, cli.seed, graph, targets.as_deref(), *target_count, start, *trials, *length)?
        }
        Command::Path { graph, from, to } => cmd_path(&mut out, cli.seed, graph, from, to)?,
        Command::Verify { certificate } => cmd_verify(&mut out, certificate)?,
        Command::Ecgraph { class } => cmd_ecgraph(&mut out, class)?,
        Command::Dlpdemo { class } => cmd_dlpdemo(&mut out, cli.seed, class)?,
    };
    let name = serde_json::to_value(&cli.command)
        .ok()
        .and_then(|v| v.as_object().and_then(|o| o.keys().next().cloned()).or_else(|| v.as_str().map(String::from)))
        .unwrap_or_default();
    out.finish(cli.out.as_deref(), &name, to_json(&cli.command), cli.seed)?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            let (code, kind) = match e.category() {
                Category::Input => (2, "input"),
                Category::Precondition => (3, "precondition"),
                Category::Internal => (4, "internal"),
            };
            eprintln!("error [{kind}]: {e}");
            ExitCode::from(code)
        }
    }
}
