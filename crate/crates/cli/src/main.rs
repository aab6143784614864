use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use braidcomplex::cube::{build_uconf_with, LinkLabels};
use braidcomplex::export::{complex_json, graph_dot, link_dot, skeleton_dot, xprime_dot};
use braidcomplex::graph::{make_tripod, parse_graph, serialize_graph};
use braidcomplex::homology::{betti_numbers, integral_homology, Coeff, HomologySummary};
use braidcomplex::lasheras::{parse_family, search_trivializing_family, Obstruction, SearchOptions, SearchOutcome};
use braidcomplex::planarity::{test_planar, Planarity};
use braidcomplex::subcomplex::induced_subcomplex;
use braidcomplex::{make_theta, BuildOptions, CubeComplex, Error, Exec, Multigraph};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "braidcomplex", version, about = "Discrete configuration spaces of graphs")]
struct Cli {
    /// Output style for JSON documents.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Pretty,
}

#[derive(Subcommand)]
enum Command {
    /// Write a standard graph as JSON.
    Gen {
        #[command(subcommand)]
        which: GenKind,
    },
    /// Build the configuration complex.
    Build {
        #[command(flatten)]
        input: Input,
        /// Print f-vector and Euler characteristic instead of the complex.
        #[arg(long)]
        stats: bool,
        /// Build even if the graph is not admissible.
        #[arg(long)]
        force: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Vertex link reports.
    Links {
        #[command(flatten)]
        input: Input,
        /// A single configuration, e.g. `ab1` or `a,b,1`.
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long)]
        check_planar: bool,
    },
    Homology {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = CoeffArg::Z)]
        coeff: CoeffArg,
    },
    /// Thickening obstruction.
    Lasheras {
        #[command(subcommand)]
        action: LasherasCmd,
    },
    Sub {
        #[command(subcommand)]
        action: SubCmd,
    },
    Export {
        #[command(subcommand)]
        kind: ExportCmd,
    },
}

#[derive(Subcommand)]
enum GenKind {
    Theta {
        #[arg(long)]
        m: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Tripod {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Input {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    strands: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoeffArg {
    Z,
    Z2,
    Q,
}

#[derive(Subcommand)]
enum LasherasCmd {
    Xprime {
        #[command(flatten)]
        input: Input,
    },
    Verify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        family: PathBuf,
    },
    Search {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 60_000)]
        budget_ms: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Embeddings to keep fixed, in family format.
        #[arg(long)]
        pinned: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SubCmd {
    /// Full-link test for the subcomplex of an induced subgraph.
    Check {
        #[arg(long)]
        ambient: PathBuf,
        /// Comma-separated vertex labels.
        #[arg(long, value_delimiter = ',')]
        sub: Vec<String>,
        #[arg(long)]
        strands: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DotObject {
    Graph,
    Skeleton,
    Link,
    Xprime,
}

#[derive(Subcommand)]
enum ExportCmd {
    Dot {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = DotObject::Skeleton)]
        object: DotObject,
        /// Base configuration for `--object link`.
        #[arg(long)]
        vertex: Option<String>,
        #[arg(long)]
        direction_labels: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Json {
        #[command(flatten)]
        input: Input,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// A failure with its exit code and, optionally, a JSON body for stdout.
struct Failure {
    code: u8,
    message: String,
    body: Option<Value>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let body = match &e {
            Error::NonPlanarLink { vertex, witness } => Some(json!({ "error": "non_planar_link", "vertex": vertex, "witness": witness })),
            Error::NotAdmissible { strands, violation } => Some(json!({ "error": "not_admissible", "strands": strands, "violation": violation })),
            _ => None,
        };
        Failure { code: EXIT_PRECONDITION, message: e.to_string(), body }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_PRECONDITION, message: e.to_string(), body: None }
    }
}

type Outcome = Result<u8, Failure>;

struct Ctx {
    format: Format,
}

impl Ctx {
    fn render(&self, v: &Value) -> String {
        match self.format {
            Format::Json => serde_json::to_string(v).expect("json value serializes"),
            Format::Pretty => serde_json::to_string_pretty(v).expect("json value serializes"),
        }
    }

    fn emit(&self, v: &Value, output: Option<&Path>) -> Result<(), Failure> {
        write_text(&(self.render(v) + "\n"), output)
    }
}

fn write_text(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure { code: EXIT_PRECONDITION, message: format!("{}: {e}", p.display()), body: None }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { code: EXIT_PRECONDITION, message: format!("{}: {e}", path.display()), body: None })
}

fn load_graph(path: &Path) -> Result<Multigraph, Failure> {
    parse_graph(&read(path)?).map_err(|e| Failure { code: EXIT_PRECONDITION, message: format!("{}: {e}", path.display()), body: None })
}

fn load_complex(input: &Input, force: bool) -> Result<CubeComplex, Failure> {
    let g = load_graph(&input.graph)?;
    Ok(build_uconf_with(&g, input.strands, &BuildOptions { force, ..Default::default() })?)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx { format: cli.format };
    match cli.command {
        Command::Gen { which } => {
            let (g, output) = match which {
                GenKind::Theta { m, output } => (make_theta(m)?, output),
                GenKind::Tripod { output } => (make_tripod(), output),
            };
            write_text(&(serialize_graph(&g) + "\n"), output.as_deref())?;
            Ok(0)
        }
        Command::Build { input, stats, force, output } => {
            let x = load_complex(&input, force)?;
            for w in x.warnings() {
                eprintln!("warning: {w}");
            }
            let mut v = if stats {
                json!({ "f": x.f_vector(), "chi": x.euler_characteristic() })
            } else {
                to_value(&complex_json(&x))
            };
            if !x.warnings().is_empty() {
                v["warnings"] = json!(x.warnings());
            }
            ctx.emit(&v, output.as_deref())?;
            Ok(0)
        }
        Command::Links { input, vertex, check_planar } => {
            let x = load_complex(&input, false)?;
            let vertices: Vec<usize> = match &vertex {
                Some(spec) => vec![x.resolve_config(spec)?],
                None => (0..x.num_cells(0)).collect(),
            };
            let mut reports = Vec::new();
            let mut all_planar = true;
            for v in vertices {
                let link = x.vertex_link(v)?;
                let mut r = to_value(&link.report());
                if vertex.is_some() {
                    let labels = link.labels(LinkLabels::Config);
                    r["labels"] = json!(labels);
                    r["edges"] = json!(link.edges().map(|[a, b]| [labels[a], labels[b]]).collect::<Vec<_>>());
                }
                if check_planar {
                    match test_planar(&link.graph(LinkLabels::Config))? {
                        Planarity::Planar(_) => r["planar"] = json!(true),
                        Planarity::NonPlanar(w) => {
                            all_planar = false;
                            r["planar"] = json!(false);
                            r["witness"] = to_value(&w);
                        }
                    }
                }
                reports.push(r);
            }
            let v = if vertex.is_some() { reports.pop().unwrap() } else { Value::Array(reports) };
            ctx.emit(&v, None)?;
            Ok(if all_planar { 0 } else { EXIT_NEGATIVE })
        }
        Command::Homology { input, coeff } => {
            let x = load_complex(&input, false)?;
            let h = match coeff {
                CoeffArg::Z => integral_homology(&x)?,
                CoeffArg::Z2 => HomologySummary::from_betti(Coeff::Z2, &betti_numbers(&x, Coeff::Z2)),
                CoeffArg::Q => HomologySummary::from_betti(Coeff::Q, &betti_numbers(&x, Coeff::Q)),
            };
            ctx.emit(&to_value(&h), None)?;
            Ok(0)
        }
        Command::Lasheras { action } => lasheras(&ctx, action),
        Command::Sub { action: SubCmd::Check { ambient, sub, strands } } => {
            let g = load_graph(&ambient)?;
            let labels: Vec<&str> = sub.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
            let inc = induced_subcomplex(&g, &labels, strands, &BuildOptions::default())?;
            let report = inc.check_full_links(Exec::Parallel)?;
            ctx.emit(&to_value(&report), None)?;
            Ok(if report.full { 0 } else { EXIT_NEGATIVE })
        }
        Command::Export { kind } => match kind {
            ExportCmd::Dot { input, object, vertex, direction_labels, output } => {
                let text = match object {
                    DotObject::Graph => graph_dot("graph", &load_graph(&input.graph)?),
                    DotObject::Skeleton => skeleton_dot(&load_complex(&input, false)?),
                    DotObject::Link => {
                        let x = load_complex(&input, false)?;
                        let spec = vertex.ok_or_else(|| Failure {
                            code: EXIT_USAGE,
                            message: "--object link needs --vertex".into(),
                            body: None,
                        })?;
                        let labels = if direction_labels { LinkLabels::Direction } else { LinkLabels::Config };
                        link_dot(&x, x.resolve_config(&spec)?, labels)?
                    }
                    DotObject::Xprime => xprime_dot(&Obstruction::from_cube(&load_complex(&input, false)?)?),
                };
                write_text(&text, output.as_deref())?;
                Ok(0)
            }
            ExportCmd::Json { input, output } => {
                ctx.emit(&to_value(&complex_json(&load_complex(&input, false)?)), output.as_deref())?;
                Ok(0)
            }
        },
    }
}

fn lasheras(ctx: &Ctx, action: LasherasCmd) -> Outcome {
    match action {
        LasherasCmd::Xprime { input } => {
            let ob = Obstruction::from_cube(&load_complex(&input, false)?)?;
            let c = ob.complex();
            let xp = ob.xprime();
            let v = json!({
                "vertices": xp.vertices.iter().map(|&v| c.vertex_label(v)).collect::<Vec<_>>(),
                "edges": xp.edges.iter().map(|&e| {
                    let [t, h] = c.edge_ends(e);
                    [c.vertex_label(t), c.vertex_label(h)]
                }).collect::<Vec<_>>(),
            });
            ctx.emit(&v, None)?;
            Ok(0)
        }
        LasherasCmd::Verify { input, family } => {
            let x = load_complex(&input, false)?;
            let text = read(&family)?;
            let report = braidcomplex::lasheras::verify_family(&x, &text)?;
            ctx.emit(&to_value(&report), None)?;
            Ok(if report.zero { 0 } else { EXIT_NEGATIVE })
        }
        LasherasCmd::Search { input, budget_ms, seed, threads, pinned, cap, output } => {
            let ob = Obstruction::from_cube(&load_complex(&input, false)?)?;
            let pinned = match pinned {
                Some(p) => parse_family(&read(&p)?)?,
                None => Default::default(),
            };
            let opts = SearchOptions { budget: Duration::from_millis(budget_ms), seed, threads: threads.max(1), cap, pinned };
            let report = search_trivializing_family(&ob, &opts)?;
            let (status, family, code) = match &report.outcome {
                SearchOutcome::Found(f) => ("found", Some(ob.family_to_json(f)), 0),
                SearchOutcome::Exhausted => ("exhausted", None, EXIT_NEGATIVE),
                SearchOutcome::Timeout => ("timeout", None, EXIT_TIMEOUT),
            };
            let mut v = json!({ "outcome": status, "nodes": report.nodes, "seed": seed });
            if !report.truncated.is_empty() {
                v["truncated"] = json!(report.truncated);
            }
            match (family, output) {
                (Some(f), Some(path)) => {
                    write_text(&(serde_json::to_string_pretty(&f).expect("family serializes") + "\n"), Some(&path))?;
                    v["family_file"] = json!(path.display().to_string());
                }
                (Some(f), None) => v["family"] = to_value(&f),
                (None, _) => {}
            }
            ctx.emit(&v, None)?;
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            if let Some(body) = f.body {
                println!("{}", Ctx { format }.render(&body));
            }
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
