//! `cssa`: build, query, and measure compressed spaced suffix arrays.

mod stats;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use cssa::index::{
    compress_relative_document_sa, find_matching, plan_reference_tree, CostMatrix, TreePolicy,
    SA_NAME,
};
use cssa::suffix::build_sa;
use cssa::text::{check_class_map, class_map_for_text, parse_seed_file, Text};
use cssa::{Permutation, RelativeDocumentSa, SeedCollection};

/// PRNG seed for reproducible access sampling; override with CSSA_SEED.
const DEFAULT_RNG_SEED: u64 = 0xC55A;

#[derive(Parser)]
#[command(name = "cssa", version, about = "Compressed spaced suffix arrays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum TreeChoice {
    /// Compress every seed relative to the SA.
    #[default]
    Star,
    /// Minimum spanning arborescence on directed pair costs.
    MstDirected,
    /// Undirected minimum spanning tree, oriented away from the SA.
    MstUndirected,
}

impl From<TreeChoice> for TreePolicy {
    fn from(c: TreeChoice) -> Self {
        match c {
            TreeChoice::Star => TreePolicy::Star,
            TreeChoice::MstDirected => TreePolicy::MstDirected,
            TreeChoice::MstUndirected => TreePolicy::MstUndirected,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a container holding the SA and one compressed SSA per seed.
    Build {
        /// Text file (raw bytes, or FASTA with --fasta).
        text: PathBuf,
        /// Seed file: one spec over {1,0,T} per line, '#' comments.
        seeds: PathBuf,
        /// Strip FASTA headers and line breaks.
        #[arg(long)]
        fasta: bool,
        /// Append this character to the text (e.g. '$').
        #[arg(long)]
        sentinel: Option<char>,
        /// Reference tree policy.
        #[arg(long, value_enum, default_value_t)]
        tree: TreeChoice,
        /// Longest allowed reference chain.
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Output container path.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Print SSA positions for an index or inclusive INDEX..INDEX range.
    Query {
        container: PathBuf,
        /// Entry name (the seed spec), or SA.
        entry: String,
        /// "I" or "I..J" (inclusive).
        range: String,
    },
    /// Space and access-time table for every entry.
    Stats {
        container: PathBuf,
        /// Machine-readable CSV instead of the table.
        #[arg(long)]
        csv: bool,
        /// Four-column space/time layout.
        #[arg(long)]
        paper_layout: bool,
        /// Random accesses per entry for the timing column.
        #[arg(long, default_value_t = 10_000)]
        accesses: usize,
    },
    /// Store the SA of an edited document relative to the original's SA.
    Diffsa {
        original: PathBuf,
        edited: PathBuf,
        #[arg(long)]
        fasta: bool,
        #[arg(long)]
        sentinel: Option<char>,
        /// Write the delta container here.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Recompute pair costs for a container and print the planned tree.
    PlanTree {
        container: PathBuf,
        #[arg(long, value_enum, default_value_t = TreeChoice::MstDirected)]
        tree: TreeChoice,
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
        /// Worker threads (0 = all cores).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Time random accesses against every entry.
    Bench {
        container: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        accesses: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn rng_seed() -> u64 {
    std::env::var("CSSA_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_RNG_SEED)
}

fn configure_threads(threads: usize) {
    if threads > 0 {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn load_text(path: &Path, fasta: bool, sentinel: Option<char>) -> Result<Text> {
    let sentinel = match sentinel {
        None => None,
        Some(c) => {
            let code = u32::from(c);
            Some(u8::try_from(code).map_err(|_| anyhow!("sentinel must be a single byte"))?)
        }
    };
    Text::from_file(path, fasta, sentinel)
        .with_context(|| format!("loading text {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            text,
            seeds,
            fasta,
            sentinel,
            tree,
            max_depth,
            threads,
            out,
        } => {
            configure_threads(threads);
            let text = load_text(&text, fasta, sentinel)?;
            // Subset seeds compare purines {A, G} and pyrimidines {C, T} as
            // classes; anything else in the alphabet gets its own class.
            let classes = class_map_for_text(&text, &[(b"AGag", 0), (b"CTct", 1)]);
            let seed_list = parse_seed_file(
                &std::fs::read_to_string(&seeds)
                    .with_context(|| format!("reading seed file {}", seeds.display()))?,
                Some(&classes),
            )?;
            if seed_list.is_empty() {
                bail!("seed file contains no seeds");
            }
            for seed in &seed_list {
                check_class_map(&text, seed)?;
            }
            let coll = SeedCollection::build(&text, &seed_list, tree.into(), max_depth)?;
            coll.write_to_file(&out)?;
            eprintln!(
                "built {} entries over n={} sigma={} -> {}",
                coll.len(),
                coll.text_len(),
                coll.sigma(),
                out.display()
            );
            Ok(())
        }
        Command::Query {
            container,
            entry,
            range,
        } => {
            let coll = SeedCollection::read_from_file(&container)?;
            let (start, end) = parse_range(&range)?;
            for i in start..=end {
                println!("{}", coll.access(&entry, i)?);
            }
            Ok(())
        }
        Command::Stats {
            container,
            csv,
            paper_layout,
            accesses,
        } => {
            let coll = SeedCollection::read_from_file(&container)?;
            let rows = stats::collect(&coll, accesses, rng_seed())?;
            if csv {
                print!("{}", stats::render_csv(&rows));
            } else if paper_layout {
                print!("{}", stats::render_paper(&rows));
            } else {
                print!("{}", stats::render_table(&coll, &rows));
            }
            Ok(())
        }
        Command::Diffsa {
            original,
            edited,
            fasta,
            sentinel,
            out,
        } => {
            let doc = run_diffsa(&original, &edited, fasta, sentinel)?;
            if let Some(path) = out {
                doc.write_to_file(&path)?;
                eprintln!("wrote delta container to {}", path.display());
            }
            Ok(())
        }
        Command::PlanTree {
            container,
            tree,
            max_depth,
            threads,
        } => {
            configure_threads(threads);
            let coll = SeedCollection::read_from_file(&container)?;
            let names: Vec<String> = coll.entries().map(|(n, _)| n.to_string()).collect();
            let perms: Vec<Permutation> = names
                .iter()
                .map(|n| materialize(&coll, n))
                .collect::<Result<_>>()?;
            let refs: Vec<&Permutation> = perms.iter().collect();
            let costs = CostMatrix::estimate(coll.sa().order(), &refs)?;
            let plan = plan_reference_tree(&costs, tree.into(), max_depth)?;
            println!("entry,parent,depth,edge_cost_bits");
            for (k, name) in names.iter().enumerate() {
                let parent = match plan.parents[k] {
                    0 => SA_NAME.to_string(),
                    p => names[p - 1].clone(),
                };
                println!(
                    "{},{},{},{}",
                    name,
                    parent,
                    plan.depths[k],
                    costs.get(plan.parents[k], k + 1)
                );
            }
            println!(
                "# total={} bits, star={} bits",
                plan.total_cost_bits, plan.star_cost_bits
            );
            Ok(())
        }
        Command::Bench {
            container,
            accesses,
        } => {
            let coll = SeedCollection::read_from_file(&container)?;
            let rows = stats::collect(&coll, accesses, rng_seed())?;
            println!("# {accesses} random accesses per entry, seed {:#x}", rng_seed());
            print!("{}", stats::render_paper(&rows));
            Ok(())
        }
    }
}

/// Rebuilds an entry's full permutation by querying every index.
fn materialize(coll: &SeedCollection, name: &str) -> Result<Permutation> {
    let values: Result<Vec<usize>, _> =
        (0..coll.text_len()).map(|i| coll.access(name, i)).collect();
    Ok(Permutation::new(values?)?)
}

fn run_diffsa(
    original: &Path,
    edited: &Path,
    fasta: bool,
    sentinel: Option<char>,
) -> Result<RelativeDocumentSa> {
    let t_old = load_text(original, fasta, sentinel)?;
    let t_new = load_text(edited, fasta, sentinel)?;
    let sa_old = build_sa(&t_old);
    let sa_new = build_sa(&t_new);
    let matching = find_matching(sa_new.order(), sa_old.order());
    let doc = compress_relative_document_sa(&sa_new, &sa_old, &matching)?;
    let delta = doc.delta_size();
    let n = t_new.len();
    let packed_bpc = cssa::succinct::bits_for(n) as f64;
    println!("original: n={} ({})", t_old.len(), original.display());
    println!("edited:   n={} ({})", n, edited.display());
    println!("matched {} of {} positions", matching.len(), n);
    println!("explicit entries: {}", doc.explicit_entries());
    println!(
        "delta: payload {} + overhead {} + explicit {} = {} bits",
        delta.payload_bits,
        delta.overhead_bits,
        delta.explicit_bits,
        delta.total_bits()
    );
    println!(
        "delta bpc: {:.4} (packed SA baseline: {:.0} bpc)",
        delta.bpc(),
        packed_bpc
    );
    Ok(doc)
}

/// "I" or "I..J", inclusive on both ends.
fn parse_range(s: &str) -> Result<(usize, usize)> {
    if let Some((a, b)) = s.split_once("..") {
        let start: usize = a.trim().parse().context("range start")?;
        let end: usize = b.trim().parse().context("range end")?;
        if end < start {
            bail!("range end {end} before start {start}");
        }
        Ok((start, end))
    } else {
        let i: usize = s.trim().parse().context("index")?;
        Ok((i, i))
    }
}
