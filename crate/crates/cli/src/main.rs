//! `npair`: build, check and take apart complementing pairs of N^n.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use npair::corpus::{corpus_box, CorpusGenerator};
use npair::extension::{tree_extend, ExtensionStep};
use npair::lattice::{direct_sum_check, parse_dump, write_dump, Coord, LatticeBox, SetPair};
use npair::structure::{decompose, separability, Forest};
use npair::tree::{closed_form, render_table, write_tree, WeightedTree};
use npair::Error;

#[derive(Parser)]
#[command(name = "npair", version, about = "Complementing pairs of N^n from weighted trees and back")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the pair of a tree or forest file and write both sides as dumps.
    Generate {
        tree: PathBuf,
        /// Box bounds `M1,...,Mn` or `M^n`; defaults to the corpus box of the dimension.
        #[arg(long = "box", value_parser = parse_box)]
        bounds: Option<BoxArg>,
        /// Output files for the T and S dumps.
        #[arg(long, num_args = 2, value_names = ["T_FILE", "S_FILE"], required = true)]
        out: Vec<PathBuf>,
    },
    /// Check the direct-sum property of two dumps on a box.
    Verify {
        t: PathBuf,
        s: PathBuf,
        /// Window to check; defaults to the common box of the dumps.
        #[arg(long = "box", value_parser = parse_box)]
        bounds: Option<BoxArg>,
        /// Also report whether T splits as a product over some bipartition of the axes.
        #[arg(long)]
        separability: bool,
    },
    /// Recover a forest of weighted trees from two dumps.
    Decompose {
        t: PathBuf,
        s: PathBuf,
        /// Write the forest here and print a JSON report; without it the forest goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include the stage trace in the report.
        #[arg(long, requires = "out")]
        trace: bool,
    },
    /// Generate, decompose and regenerate, comparing on the certified box.
    Roundtrip {
        /// Tree or forest file; omit when using `--random`.
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        tree: Option<PathBuf>,
        #[arg(long = "box", value_parser = parse_box)]
        bounds: Option<BoxArg>,
        /// Number of seeded random trees to run instead of a file.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Exact node count of each random tree.
        #[arg(long, requires = "random")]
        nodes: Option<usize>,
    },
    /// Print the per-node atoms whose products give T and S.
    ClosedForm {
        tree: PathBuf,
        /// Print the weight table first.
        #[arg(long)]
        table: bool,
        #[arg(long)]
        json: bool,
    },
    /// Apply extension steps to a tree, e.g. `--step "second axis=0 delta=0 a=2,3"`.
    Extend {
        tree: PathBuf,
        #[arg(long = "step", required = true)]
        steps: Vec<ExtensionStep>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone)]
struct BoxArg(Vec<Coord>);

fn parse_box(text: &str) -> Result<BoxArg, String> {
    let bad = |_| format!("bad box `{text}`: expected M1,...,Mn or M^n");
    if let Some((side, dim)) = text.split_once('^') {
        let side: Coord = side.trim().parse().map_err(bad)?;
        let dim: usize = dim.trim().parse().map_err(bad)?;
        return Ok(BoxArg(vec![side; dim]));
    }
    text.split(',').map(|m| m.trim().parse().map_err(bad)).collect::<Result<_, _>>().map(BoxArg)
}

enum Failure {
    Core(Error),
    Io(PathBuf, std::io::Error),
    /// Verification ran and the answer was no.
    Rejected(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(..) => 1,
            Failure::Rejected(_) => 5,
            Failure::Core(e) => match e {
                Error::Parse { .. } => 2,
                Error::DimensionMismatch { .. }
                | Error::InvalidBox(_)
                | Error::OutsideBox { .. }
                | Error::AxisOutOfRange { .. }
                | Error::InvalidRadix(_)
                | Error::DigitOutOfRange { .. }
                | Error::ValueOutOfRange { .. }
                | Error::NotIntervalPair(_)
                | Error::InvalidTree(_)
                | Error::IllegalExtension(_)
                | Error::InvalidArgument(_) => 3,
                Error::InsufficientBox { .. }
                | Error::BoxTooLarge(_)
                | Error::BoxNotContained { .. }
                | Error::Overflow(_) => 4,
                Error::NotDirectSum { .. } | Error::NotBinary { .. } | Error::Structure(_) => 5,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(path, e) => format!("{}: {e}", path.display()),
            Failure::Rejected(m) => m.clone(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn read_forest(path: &Path) -> CliResult<Forest> {
    Ok(Forest::parse(&read(path)?)?)
}

fn read_pair(t: &Path, s: &Path) -> CliResult<SetPair> {
    let t = parse_dump(&read(t)?)?;
    let s = parse_dump(&read(s)?)?;
    if t.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: s.dim(),
        }
        .into());
    }
    let common = t.bounds().meet(s.bounds())?;
    Ok(SetPair::new(t.restrict(&common)?, s.restrict(&common)?)?)
}

fn box_for(bounds: Option<BoxArg>, dim: usize) -> CliResult<LatticeBox> {
    let b = match bounds {
        Some(BoxArg(b)) => LatticeBox::new(b)?,
        None => corpus_box(dim)?,
    };
    if b.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: b.dim() }.into());
    }
    Ok(b)
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string(value).expect("JSON values serialize"));
}

fn cmd_generate(tree: &Path, bounds: Option<BoxArg>, out: &[PathBuf]) -> CliResult<()> {
    let forest = read_forest(tree)?;
    let bounds = box_for(bounds, forest.dim())?;
    let pair = forest.generate(&bounds)?;
    let report = direct_sum_check(&pair.t, &pair.s, &bounds)?;
    write(&out[0], &write_dump(&pair.t))?;
    write(&out[1], &write_dump(&pair.s))?;
    print_json(&json!({
        "certificate": {
            "box": bounds.bounds(),
            "t_points": pair.t.len(),
            "s_points": pair.s.len(),
            "direct_sum": report,
        }
    }));
    if let Some(e) = report.into_result().err() {
        return Err(e.into());
    }
    Ok(())
}

fn cmd_verify(t: &Path, s: &Path, bounds: Option<BoxArg>, split: bool) -> CliResult<()> {
    let pair = read_pair(t, s)?;
    let window = match bounds {
        Some(BoxArg(b)) => LatticeBox::new(b)?,
        None => pair.bounds().clone(),
    };
    let report = direct_sum_check(&pair.t, &pair.s, &window)?;
    let mut out = json!({ "box": window.bounds(), "direct_sum": report });
    if split {
        out["separability"] = serde_json::to_value(separability(&pair.t.restrict(&window)?)?)
            .expect("verdicts serialize");
    }
    print_json(&out);
    match report.into_result() {
        Ok(()) => Ok(()),
        Err(e) => Err(Failure::Rejected(e.to_string())),
    }
}

fn cmd_decompose(t: &Path, s: &Path, out: Option<&Path>, trace: bool) -> CliResult<()> {
    let pair = read_pair(t, s)?;
    let d = decompose(&pair)?;
    let text = d.forest.to_text();
    let Some(out) = out else {
        print!("{text}");
        return Ok(());
    };
    write(out, &text)?;
    let mut report = json!({
        "certified": d.certified.bounds(),
        "components": d.forest.components.iter().map(|c| json!({
            "axes": c.axes,
            "tops": c.tree.dim(),
            "nodes": c.tree.len(),
        })).collect::<Vec<_>>(),
    });
    if trace {
        report["trace"] = serde_json::to_value(&d.trace).expect("trace serializes");
    }
    print_json(&report);
    Ok(())
}

/// Regenerates the decomposition of `forest`'s pair and compares on the certified box.
fn roundtrip_one(forest: &Forest, bounds: &LatticeBox) -> CliResult<String> {
    let pair = forest.generate(bounds)?;
    let d = decompose(&pair)?;
    let again = d.forest.generate(&d.certified)?;
    let expected = pair.restrict(&d.certified)?;
    if again == expected {
        Ok(format!("IDENTICAL on certified box {}", d.certified))
    } else {
        Err(Failure::Rejected(format!(
            "DIFFERENT on certified box {}: |T| {} vs {}, |S| {} vs {}",
            d.certified,
            again.t.len(),
            expected.t.len(),
            again.s.len(),
            expected.s.len()
        )))
    }
}

fn cmd_roundtrip(
    tree: Option<&Path>,
    bounds: Option<BoxArg>,
    random: Option<usize>,
    seed: u64,
    nodes: Option<usize>,
) -> CliResult<()> {
    let Some(count) = random else {
        let forest = read_forest(tree.expect("clap enforces a tree file"))?;
        let b = box_for(bounds, forest.dim())?;
        println!("{}", roundtrip_one(&forest, &b)?);
        return Ok(());
    };
    let mut gen = CorpusGenerator::with_seed(seed);
    for k in 0..count {
        let tree: WeightedTree = match nodes {
            Some(n) => gen.tree_with_nodes(n)?,
            None => gen.tree(),
        };
        let b = box_for(bounds.clone(), tree.dim())?;
        let line = roundtrip_one(&Forest::single(tree), &b).map_err(|f| match f {
            Failure::Rejected(m) => Failure::Rejected(format!("tree {k}: {m}")),
            other => other,
        })?;
        println!("tree {k}: {line}");
    }
    Ok(())
}

fn cmd_closed_form(tree: &Path, table: bool, as_json: bool) -> CliResult<()> {
    let forest = read_forest(tree)?;
    let many = forest.components.len() > 1;
    let mut listing = Vec::new();
    for c in &forest.components {
        let f = closed_form(&c.tree)?;
        if as_json {
            listing.push(json!({ "axes": c.axes, "factorization": f }));
            continue;
        }
        if many {
            let axes: Vec<String> = c.axes.iter().map(|a| a.to_string()).collect();
            println!("[component axes={}]", axes.join(","));
        }
        if table {
            print!("{}", render_table(&c.tree));
        }
        print!("{f}");
    }
    if as_json {
        print_json(&serde_json::Value::Array(listing));
    }
    Ok(())
}

fn cmd_extend(tree: &Path, steps: &[ExtensionStep], out: Option<&Path>) -> CliResult<()> {
    let forest = read_forest(tree)?;
    let [component] = forest.components.as_slice() else {
        return Err(Error::InvalidArgument("extend takes a single tree, not a forest".into()).into());
    };
    let mut tree = component.tree.clone();
    for step in steps {
        tree = tree_extend(&tree, step)?;
    }
    let text = write_tree(&tree);
    match out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate { tree, bounds, out } => cmd_generate(&tree, bounds, &out),
        Command::Verify { t, s, bounds, separability } => cmd_verify(&t, &s, bounds, separability),
        Command::Decompose { t, s, out, trace } => cmd_decompose(&t, &s, out.as_deref(), trace),
        Command::Roundtrip { tree, bounds, random, seed, nodes } => {
            cmd_roundtrip(tree.as_deref(), bounds, random, seed, nodes)
        }
        Command::ClosedForm { tree, table, json } => cmd_closed_form(&tree, table, json),
        Command::Extend { tree, steps, out } => cmd_extend(&tree, &steps, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
