use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use cordial::catalog::{self, check_catalog_entry, Verdict};
use cordial::cordiality::{is_k_cordial, Labeling};
use cordial::document::{to_dot, LabelingDocument};
use cordial::grace::grace_label;
use cordial::graph::enumerate::{enumerate_rooted_forests, enumerate_trees};
use cordial::graph::random::mixed_tree;
use cordial::graph::{parse_tree, Tree};
use cordial::labeler::label_tree_7;
use cordial::search::{exists_k_cordial_budgeted, hovey_certify, SearchError};

const DEFAULT_MAX_NODES: u64 = 50_000_000;

#[derive(Parser)]
#[command(name = "cordial", version, about = "Build and check k-cordial labelings of trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Label a tree and write the labeling document.
    Label {
        tree: PathBuf,
        #[arg(long, default_value_t = 7)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Search budget in assignments, used when k is not 7.
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        max_nodes: u64,
    },
    /// Check a labeling document against a tree.
    Verify { tree: PathBuf, labeling: PathBuf },
    /// Search every tree on n vertices for a k-cordial labeling.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 7)]
        k: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        max_nodes: u64,
    },
    /// Check that every tree and rooted forest on p vertices is k-cordial.
    Hovey {
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 7)]
        k: u32,
        /// Largest root count to enumerate; defaults to p.
        #[arg(long)]
        max_roots: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        max_nodes: u64,
    },
    /// Label a caterpillar sequentially along its spine.
    Grace {
        tree: PathBuf,
        #[arg(long, default_value_t = 7)]
        k: u32,
        #[arg(long, default_value_t = 0)]
        offset: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a labeled tree as a DOT graph.
    ExportDot {
        tree: PathBuf,
        labeling: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check catalog entries against a shape file.
    CatalogCheck {
        shape: PathBuf,
        /// Alternative catalog data file; the shipped one by default.
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long)]
        list: Option<u32>,
        #[arg(long)]
        id: Option<String>,
    },
    /// Label random trees and verify every result.
    Fuzz {
        /// Largest tree order.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 7)]
        k: u32,
        #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
        max_nodes: u64,
    },
}

enum CliError {
    Input(anyhow::Error),
    Budget(String),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Input(e)
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::BudgetExceeded(_) => CliError::Budget(e.to_string()),
            other => CliError::Input(other.into()),
        }
    }
}

struct Outcome {
    processed: usize,
    failures: usize,
}

struct Ctx {
    format: Format,
    hasher: Sha256,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn tree(&mut self, path: &Path) -> Result<Tree, CliError> {
        let text = self.read(path)?;
        Ok(parse_tree(&text).with_context(|| format!("parsing {}", path.display()))?)
    }

    fn labeling(&mut self, path: &Path) -> Result<Labeling, CliError> {
        let text = self.read(path)?;
        let doc = LabelingDocument::from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
        Ok(doc.labeling().map_err(anyhow::Error::from)?)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Constructive for k = 7, sequential for caterpillars, budgeted search
/// otherwise. `Ok(None)` means the search finished without a labeling.
fn label_any(t: &Tree, k: u32, max_nodes: u64) -> Result<Option<Labeling>, CliError> {
    if k < 2 {
        return Err(CliError::Input(anyhow!("k must be at least 2")));
    }
    if k == 7 {
        return match label_tree_7(t) {
            Ok(cert) if cert.verified => Ok(Some(cert.labeling)),
            _ => Ok(None),
        };
    }
    if t.is_caterpillar() {
        return Ok(Some(grace_label(t, k, 0).expect("caterpillar")));
    }
    Ok(exists_k_cordial_budgeted(t, k, max_nodes)?)
}

fn compact_edges(t: &Tree) -> String {
    t.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect::<Vec<_>>().join(" ")
}

fn run(cmd: &Command, ctx: &mut Ctx) -> Result<Outcome, CliError> {
    let one = |ok: bool| Outcome { processed: 1, failures: usize::from(!ok) };
    match cmd {
        Command::Label { tree, k, out, max_nodes } => {
            let t = ctx.tree(tree)?;
            let Some(f) = label_any(&t, *k, *max_nodes)? else {
                eprintln!("no {k}-cordial labeling found");
                return Ok(one(false));
            };
            let doc = LabelingDocument::for_tree(&t, &f).expect("labeling fits");
            emit(out.as_deref(), &(doc.to_json() + "\n"))?;
            Ok(one(doc.valid))
        }
        Command::Verify { tree, labeling } => {
            let t = ctx.tree(tree)?;
            let f = ctx.labeling(labeling)?;
            let report = is_k_cordial(&t, &f).map_err(anyhow::Error::from)?;
            let line = match (&report.violation, ctx.format) {
                (None, Format::Text) => "PASS\n".to_string(),
                (Some(v), Format::Text) => format!("FAIL {v}\n"),
                (v, Format::Json) => {
                    json!({"cordial": v.is_none(), "violation": v.map(|v| v.to_string())}).to_string() + "\n"
                }
            };
            print!("{line}");
            Ok(one(report.is_cordial()))
        }
        Command::Sweep { n, k, max_nodes } => {
            let trees = enumerate_trees(*n).map_err(anyhow::Error::from)?;
            if *k < 2 {
                return Err(CliError::Input(anyhow!("k must be at least 2")));
            }
            let results: Vec<Result<Option<Labeling>, SearchError>> =
                trees.par_iter().map(|t| exists_k_cordial_budgeted(t, *k, *max_nodes)).collect();
            let mut rows = Vec::new();
            let mut failures = 0;
            for (i, (t, r)) in trees.iter().zip(results).enumerate() {
                let f = r?;
                failures += usize::from(f.is_none());
                rows.push((i, t, f));
            }
            match ctx.format {
                Format::Text => {
                    for (i, t, f) in &rows {
                        let cell = f.as_ref().map_or("none".to_string(), |f| format!("{:?}", f.labels));
                        println!("{i}\t{}\t{cell}", compact_edges(t));
                    }
                    println!("{}/{} trees on {n} vertices are {k}-cordial", rows.len() - failures, rows.len());
                }
                Format::Json => {
                    let items: Vec<Value> = rows
                        .iter()
                        .map(|(i, t, f)| json!({"index": i, "edges": t.edges(), "labels": f.as_ref().map(|f| &f.labels)}))
                        .collect();
                    println!("{}", json!({"n": n, "k": k, "trees": items}));
                }
            }
            Ok(Outcome { processed: rows.len(), failures })
        }
        Command::Hovey { p, k, max_roots, max_nodes } => {
            if *k < 2 {
                return Err(CliError::Input(anyhow!("k must be at least 2")));
            }
            let trees = enumerate_trees(*p).map_err(anyhow::Error::from)?;
            let forests = enumerate_rooted_forests(*p, max_roots.unwrap_or(*p)).map_err(anyhow::Error::from)?;
            let tree_results: Vec<_> = trees.par_iter().map(|t| exists_k_cordial_budgeted(t, *k, *max_nodes)).collect();
            let certs: Vec<_> = forests.par_iter().map(|f| hovey_certify(f, *k)).collect();
            let mut tree_fail = 0;
            for r in tree_results {
                tree_fail += usize::from(r?.is_none());
            }
            let forest_fail = certs.iter().filter(|c| !c.certified).count();
            match ctx.format {
                Format::Text => {
                    for (i, c) in certs.iter().enumerate().filter(|(_, c)| !c.certified) {
                        for w in c.failures() {
                            println!("forest {i}: roots {:?} weight {} has no witness", w.g, w.ell);
                        }
                    }
                    println!("trees: {}/{} certified", trees.len() - tree_fail, trees.len());
                    println!("rooted forests: {}/{} certified", forests.len() - forest_fail, forests.len());
                }
                Format::Json => println!(
                    "{}",
                    json!({"p": p, "k": k, "trees": trees.len(), "tree_failures": tree_fail,
                           "forests": forests.len(), "forest_failures": forest_fail})
                ),
            }
            Ok(Outcome { processed: trees.len() + forests.len(), failures: tree_fail + forest_fail })
        }
        Command::Grace { tree, k, offset, out } => {
            let t = ctx.tree(tree)?;
            let f = grace_label(&t, *k, *offset).map_err(anyhow::Error::from)?;
            let doc = LabelingDocument::for_tree(&t, &f).expect("labeling fits");
            emit(out.as_deref(), &(doc.to_json() + "\n"))?;
            Ok(one(doc.valid))
        }
        Command::ExportDot { tree, labeling, out } => {
            let t = ctx.tree(tree)?;
            let f = ctx.labeling(labeling)?;
            let dot = to_dot(&t, &f).map_err(anyhow::Error::from)?;
            emit(out.as_deref(), &dot)?;
            Ok(one(true))
        }
        Command::CatalogCheck { shape, catalog: path, list, id } => {
            let shape_text = ctx.read(shape)?;
            let shape = catalog::parse_shape(&shape_text).map_err(anyhow::Error::from)?;
            let entries = match path {
                Some(p) => {
                    let text = ctx.read(p)?;
                    catalog::parse_catalog(&text).map_err(anyhow::Error::from)?
                }
                None => catalog::addendum(),
            };
            let chosen: Vec<_> = entries
                .iter()
                .filter(|e| list.is_none_or(|l| e.list == l) && id.as_ref().is_none_or(|i| &e.id == i))
                .collect();
            let mut failures = 0;
            let mut rows = Vec::new();
            for e in &chosen {
                let (tag, detail) = match check_catalog_entry(e, &shape) {
                    Ok(Verdict::ClaimHolds) => ("claim-holds", String::new()),
                    Ok(Verdict::ClaimFails { observed }) => {
                        failures += 1;
                        ("claim-fails", observed)
                    }
                    Ok(Verdict::ShapeSizeMismatch { labels, shape }) => {
                        ("shape-size-mismatch", format!("{labels} labels for {shape} vertices"))
                    }
                    Err(err) => ("malformed", err.to_string()),
                };
                rows.push((e, tag, detail));
            }
            match ctx.format {
                Format::Text => {
                    for (e, tag, detail) in &rows {
                        println!("list {} {}\t{}\t{}\t{tag}\t{detail}", e.list, e.id, e.labels_text, e.claim_text);
                    }
                }
                Format::Json => {
                    let items: Vec<Value> = rows
                        .iter()
                        .map(|(e, tag, detail)| {
                            json!({"list": e.list, "id": e.id, "labels": e.labels_text, "claim": e.claim_text,
                                   "verdict": tag, "detail": detail})
                        })
                        .collect();
                    println!("{}", Value::Array(items));
                }
            }
            Ok(Outcome { processed: rows.len(), failures })
        }
        Command::Fuzz { n, count, seed, k, max_nodes } => {
            if *n == 0 {
                return Err(CliError::Input(anyhow!("--n must be positive")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let trees: Vec<Tree> = (0..*count)
                .map(|_| {
                    let size = rand::Rng::gen_range(&mut rng, 1..=*n);
                    mixed_tree(size, &mut rng)
                })
                .collect();
            let results: Vec<_> = trees.par_iter().map(|t| label_any(t, *k, *max_nodes)).collect();
            let mut failures = 0;
            for (i, (t, r)) in trees.iter().zip(results).enumerate() {
                let ok = match r? {
                    Some(f) => is_k_cordial(t, &f).expect("labeling fits").is_cordial(),
                    None => false,
                };
                if !ok {
                    failures += 1;
                    println!("tree {i} failed: {}", compact_edges(t));
                }
            }
            println!("{}/{} random trees labeled", trees.len() - failures, trees.len());
            Ok(Outcome { processed: trees.len(), failures })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo: Vec<String> = std::env::args().collect();
    let mut ctx = Ctx { format: cli.format, hasher: Sha256::new() };
    let started = Instant::now();
    let result = run(&cli.command, &mut ctx);
    let digest: String = ctx.hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    let (status, outcome, processed, failures) = match &result {
        Ok(o) if o.failures == 0 => (0, "ok".to_string(), o.processed, 0),
        Ok(o) => (1, "property-failure".to_string(), o.processed, o.failures),
        Err(CliError::Input(e)) => (2, format!("input-error: {e:#}"), 0, 0),
        Err(CliError::Budget(e)) => (3, format!("budget-exhausted: {e}"), 0, 0),
    };
    let report = json!({
        "command": echo.join(" "),
        "input_sha256": digest,
        "outcome": outcome,
        "elapsed_ms": started.elapsed().as_millis() as u64,
        "processed": processed,
        "failures": failures,
    });
    eprintln!("{report}");
    ExitCode::from(status)
}
