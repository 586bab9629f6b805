use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cluster_core::report::{exit_code, overall};
use cluster_core::ring::extract_pointed;
use cluster_core::theta;
use cluster_core::verify::{self, BasisKind, VerifyConfig, THEOREMS};
use cluster_core::{catalog, Error, ExchangeGraph, Expander, FreezeSpec, Freezer, LatticeVec, ScatteringDiagram, Seed};
use serde_json::json;
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "cluster", version, about = "Exact computations with (quantum) cluster algebras")]
struct Cli {
    /// Worker threads for the parallel harnesses.
    #[arg(long, global = true, default_value_t = 1, value_parser = positive)]
    threads: usize,
    /// Write the result to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Mutate a seed along a word and print the resulting seed.
    Mutate {
        #[arg(long, value_delimiter = ',', required = true)]
        word: Vec<usize>,
        seed: String,
    },
    /// Laurent expansion of a cluster variable in the initial cluster.
    Expand {
        #[command(flatten)]
        at: VarArgs,
        /// Drop the quantization form before expanding.
        #[arg(long)]
        classical: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// g-vectors of all cluster variables of a seed.
    Gvec {
        #[arg(long, value_delimiter = ',')]
        word: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        seed: String,
    },
    /// F-polynomial of a cluster variable, in variables y_k indexed by unfrozen position.
    Fpoly {
        #[command(flatten)]
        at: VarArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// c-vectors of a seed, one per unfrozen vertex.
    Cvec {
        #[arg(long, value_delimiter = ',')]
        word: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        seed: String,
    },
    /// Exchange graph up to a mutation depth.
    Graph {
        #[arg(long, default_value_t = 8, value_parser = positive)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
        format: GraphFormat,
        seed: String,
    },
    /// Freeze vertices; with --var, freeze the image of a cluster variable instead.
    Freeze {
        #[arg(long, value_delimiter = ',', required = true)]
        freeze: Vec<usize>,
        #[arg(long, value_delimiter = ',')]
        word: Vec<usize>,
        #[arg(long)]
        var: Option<usize>,
        seed: String,
    },
    /// Complete the scattering diagram of a rank-2 seed.
    Scatter {
        #[arg(long, default_value_t = 6, value_parser = positive_i64)]
        order: i64,
        #[arg(long, value_enum, default_value_t = DiagramFormat::Json)]
        format: DiagramFormat,
        /// Print the pushforward along this freezing.
        #[arg(long, value_delimiter = ',')]
        freeze: Option<Vec<usize>>,
        seed: String,
    },
    /// Theta function from broken lines at the default base point.
    Theta {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
        m: Vec<i64>,
        #[arg(long, default_value_t = 6, value_parser = positive_i64)]
        order: i64,
        /// Exchange-graph depth, used when the rank exceeds two.
        #[arg(long, default_value_t = 8, value_parser = positive)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        seed: String,
    },
    /// Run one verification harness and print its reports.
    Verify {
        /// Harness id; `list` prints the available ids.
        id: String,
        #[command(flatten)]
        opts: VerifyArgs,
        seed: Option<String>,
    },
    /// Verification suites for pointed bases.
    Bases {
        #[command(subcommand)]
        cmd: BasesCmd,
    },
}

#[derive(Subcommand)]
enum BasesCmd {
    /// Run the basis harnesses on a degree box.
    Verify {
        #[command(flatten)]
        opts: VerifyArgs,
        seed: String,
    },
}

#[derive(Args)]
struct VarArgs {
    #[arg(long, value_delimiter = ',')]
    word: Vec<usize>,
    #[arg(long)]
    var: usize,
    seed: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Freezing set; every nonempty subset of the unfrozen vertices when omitted.
    #[arg(long, value_delimiter = ',')]
    freeze: Option<Vec<usize>>,
    #[arg(long, default_value_t = 8, value_parser = positive)]
    depth: usize,
    #[arg(long, default_value_t = 8, value_parser = positive)]
    word_len: usize,
    #[arg(long, default_value_t = 6, value_parser = positive_i64)]
    order: i64,
    #[arg(long = "box", default_value_t = 2, value_parser = positive_i64)]
    box_r: i64,
    #[arg(long, default_value_t = 10, value_parser = positive_i64)]
    d_max: i64,
    #[arg(long, default_value_t = 10, value_parser = positive)]
    samples: usize,
    #[arg(long, default_value_t = 20, value_parser = positive)]
    loops: usize,
    #[arg(long, default_value_t = 0)]
    rng_seed: u64,
    #[arg(long, value_enum, default_value_t = Basis::Cluster)]
    basis: Basis,
    /// Drop the quantization form of the seed.
    #[arg(long)]
    classical: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiagramFormat {
    Json,
    Svg,
}

#[derive(Clone, Copy, ValueEnum)]
enum Basis {
    Cluster,
    Theta,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be strictly positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_i64(s: &str) -> Result<i64, String> {
    positive(s).map(|n| n as i64)
}

const BASES_SUITE: &[&str] = &["local-support", "property-s", "induced-basis", "shift-product", "basis-independence"];

/// Result of a command: text to emit and the exit code.
struct Outcome {
    text: String,
    code: i32,
}

impl From<String> for Outcome {
    fn from(text: String) -> Self {
        Outcome { text, code: 0 }
    }
}

fn main() -> ExitCode {
    // usage errors exit with 1; clap's default of 2 means inconclusive here
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let out = match run(cli.cmd) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let mut text = out.text;
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.output {
        Some(p) => {
            if let Err(e) = fs::write(p, text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(out.code as u8)
}

fn load_seed(path: &str) -> Result<Seed, Error> {
    match fs::read_to_string(path) {
        Ok(s) => Seed::from_json_str(&s).map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{path}: {m}")),
            e => e,
        }),
        Err(io) => catalog::by_name(path).ok_or_else(|| Error::Parse(format!("{path}: {io}"))),
    }
}

fn zero_based(seed: &Seed, idx: &[usize]) -> Result<Vec<usize>, Error> {
    idx.iter()
        .map(|&k| {
            if k == 0 || k > seed.n() {
                Err(Error::InvalidSeed(format!("vertex {k} is outside 1..={}", seed.n())))
            } else {
                Ok(k - 1)
            }
        })
        .collect()
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

fn run(cmd: Cmd) -> Result<Outcome, Error> {
    Ok(match cmd {
        Cmd::Mutate { word, seed } => {
            let s = load_seed(&seed)?;
            let mut t = s.clone();
            for k in zero_based(&s, &word)? {
                t = t.mutate(k)?;
            }
            t.to_json_string().into()
        }
        Cmd::Expand { at, classical, format } => {
            let key = format!("expand|{:?}|{}|{classical}|{}", at.word, at.var, matches!(format, Format::Json));
            let s = load_seed(&at.seed)?;
            let s = if classical { s.classical() } else { s };
            cached(&s, &key, || {
                let (_, st, i) = state_at(&s, &at.word, at.var)?;
                let z = &st.vars[i];
                Ok(match format {
                    Format::Text => z.to_string(),
                    Format::Json => serde_json::to_string_pretty(z).expect("laurent serializes"),
                })
            })?
            .into()
        }
        Cmd::Gvec { word, format, seed } => {
            let s = load_seed(&seed)?;
            let ex = Expander::new(s.clone())?;
            let st = ex.run(&zero_based(&s, &word)?)?;
            let g = ex.g_matrix(&st)?;
            match format {
                Format::Text => lines(s.labels(), &g),
                Format::Json => pretty(&json!(g)),
            }
            .into()
        }
        Cmd::Fpoly { at, format } => {
            let s = load_seed(&at.seed)?;
            let (ex, st, i) = state_at(&s, &at.word, at.var)?;
            let p = extract_pointed(&st.vars[i], ex.pstar())?;
            match format {
                Format::Text => {
                    let terms: Vec<String> = p
                        .fpoly
                        .iter()
                        .map(|(n, c)| {
                            let c = c.to_string();
                            match (n.is_zero(), c.as_str()) {
                                (true, _) => c,
                                (false, "1") => format!("y^{n}"),
                                (false, _) => format!("({c}) * y^{n}"),
                            }
                        })
                        .collect();
                    terms.join(" + ")
                }
                Format::Json => {
                    let m: Vec<(LatticeVec, String)> = p.fpoly.iter().map(|(n, c)| (n.clone(), c.to_string())).collect();
                    pretty(&json!({"degree": p.degree, "fpoly": m}))
                }
            }
            .into()
        }
        Cmd::Cvec { word, format, seed } => {
            let s = load_seed(&seed)?;
            let ex = Expander::new(s.clone())?;
            let st = ex.run(&zero_based(&s, &word)?)?;
            let c: Vec<LatticeVec> = (0..s.rank()).map(|p| st.c_vector(p)).collect();
            let names: Vec<String> = s.unfrozen().iter().map(|&k| s.labels()[k].clone()).collect();
            match format {
                Format::Text => lines(&names, &c),
                Format::Json => pretty(&json!(c)),
            }
            .into()
        }
        Cmd::Graph { depth, format, seed } => {
            let ex = Expander::new(load_seed(&seed)?)?;
            let g = ExchangeGraph::explore(&ex, depth)?;
            match format {
                GraphFormat::Dot => g.to_dot(),
                GraphFormat::Json => pretty(&g.to_json()),
            }
            .into()
        }
        Cmd::Freeze { freeze, word, var, seed } => {
            let s = load_seed(&seed)?;
            let f = zero_based(&s, &freeze)?;
            match var {
                None => s.freeze(&f)?.to_json_string(),
                Some(v) => {
                    let fr = Freezer::new(&s, &f)?;
                    let st = fr.expander().run(&zero_based(&s, &word)?)?;
                    fr.freeze(&st.vars[zero_based(&s, &[v])?[0]])?.to_string()
                }
            }
            .into()
        }
        Cmd::Scatter { order, format, freeze, seed } => {
            let s = load_seed(&seed)?.classical();
            let mut d = ScatteringDiagram::complete(&s, order)?;
            if let Some(f) = freeze {
                d = d.freeze_pushforward(&FreezeSpec::new(&s, &zero_based(&s, &f)?)?);
            }
            match format {
                DiagramFormat::Json => pretty(&d.to_json()),
                DiagramFormat::Svg => d.to_svg(),
            }
            .into()
        }
        Cmd::Theta { m, order, depth, format, seed } => theta_cmd(&load_seed(&seed)?.classical(), m, order, depth, format)?.into(),
        Cmd::Verify { id, opts, seed } => {
            if id == "list" {
                let mut s = String::new();
                for (id, what) in THEOREMS {
                    let _ = writeln!(s, "{id:<24} {what}");
                }
                return Ok(s.into());
            }
            let seed = seed.ok_or_else(|| Error::Parse("missing seed file".into()))?;
            let cfg = config(&seed, &opts)?;
            reports(&[id.as_str()], &cfg)?
        }
        Cmd::Bases { cmd: BasesCmd::Verify { opts, seed } } => {
            let cfg = config(&seed, &opts)?;
            let mut ids = BASES_SUITE.to_vec();
            if cfg.basis == BasisKind::Theta {
                ids.push("local-transition");
            }
            reports(&ids, &cfg)?
        }
    })
}

fn lines(names: &[String], vs: &[LatticeVec]) -> String {
    names.iter().zip(vs).map(|(n, v)| format!("{n}: {v}")).collect::<Vec<_>>().join("\n")
}

fn state_at(s: &Seed, word: &[usize], var: usize) -> Result<(Expander, cluster_core::SeedState, usize), Error> {
    let ex = Expander::new(s.clone())?;
    let st = ex.run(&zero_based(s, word)?)?;
    let i = zero_based(s, &[var])?[0];
    Ok((ex, st, i))
}

fn theta_cmd(s: &Seed, m: Vec<i64>, order: i64, depth: usize, format: Format) -> Result<String, Error> {
    if m.len() != s.n() {
        return Err(Error::Dimension { expected: s.n(), got: m.len() });
    }
    let m = LatticeVec(m);
    if s.rank() > 2 {
        let ex = Expander::new(s.clone())?;
        let g = ExchangeGraph::explore(&ex, depth)?;
        let th = theta::theta_cluster_chamber(&ex, &g, &m)?;
        return Ok(match format {
            Format::Text => th.to_string(),
            Format::Json => pretty(&json!({"m": m, "mode": "cluster-chamber", "theta": th.to_string()})),
        });
    }
    let d = ScatteringDiagram::complete(s, order)?;
    let q = theta::default_base_point(d.rank());
    Ok(match format {
        Format::Text => theta::theta(&d, &m, &q)?.to_string(),
        Format::Json => {
            let lines = theta::enumerate_broken_lines(&d, &m, &q)?;
            let th = theta::theta(&d, &m, &q)?;
            let q: Vec<String> = q.iter().map(|x| x.to_string()).collect();
            pretty(&json!({"m": m, "order": order, "base_point": q, "theta": th.to_string(), "broken_lines": lines}))
        }
    })
}

fn config(seed: &str, o: &VerifyArgs) -> Result<VerifyConfig, Error> {
    let mut s = load_seed(seed)?;
    if o.classical {
        s = s.classical();
    }
    let name = Path::new(seed).file_stem().and_then(|x| x.to_str()).unwrap_or(seed).to_string();
    let freeze = match &o.freeze {
        Some(f) => {
            let f = zero_based(&s, f)?;
            FreezeSpec::new(&s, &f)?;
            Some(f)
        }
        None => None,
    };
    let mut cfg = VerifyConfig::new(s, &name);
    cfg.freeze = freeze;
    cfg.depth = o.depth;
    cfg.word_len = o.word_len;
    cfg.order = o.order;
    cfg.box_r = o.box_r;
    cfg.d_max = o.d_max;
    cfg.samples = o.samples;
    cfg.loops = o.loops;
    cfg.rng_seed = o.rng_seed;
    cfg.basis = match o.basis {
        Basis::Cluster => BasisKind::Cluster,
        Basis::Theta => BasisKind::Theta,
    };
    Ok(cfg)
}

fn reports(ids: &[&str], cfg: &VerifyConfig) -> Result<Outcome, Error> {
    let mut all = Vec::new();
    for id in ids {
        all.extend(verify::run(id, cfg)?);
    }
    let code = exit_code(overall(&all));
    Ok(Outcome { text: pretty(&json!(all)), code })
}

/// Memoizes an expansion under `$CLUSTER_CACHE_DIR`, keyed by the seed data
/// and the request.
fn cached(seed: &Seed, key: &str, compute: impl FnOnce() -> Result<String, Error>) -> Result<String, Error> {
    let Some(dir) = std::env::var_os("CLUSTER_CACHE_DIR") else {
        return compute();
    };
    let mut h = Sha256::new();
    h.update(seed.to_json_string().as_bytes());
    h.update(key.as_bytes());
    let name: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    let path = Path::new(&dir).join(name);
    if let Ok(hit) = fs::read_to_string(&path) {
        return Ok(hit);
    }
    let out = compute()?;
    // a failed write only loses the memo
    let _ = fs::create_dir_all(&dir).and_then(|_| fs::write(&path, &out));
    Ok(out)
}
