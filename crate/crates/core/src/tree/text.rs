//! Text form of weighted trees and forests.
//!
//! ```text
//! # weighted-tree v1
//! [tree]
//! root phi
//! node y1 parent phi
//! node x1 parent y1
//! node x2 parent y1
//! [initial]
//! radices 2,2 tail=no parity=T-even
//! [delta]
//! phi 0
//! y1 1
//! [alpha]
//! y1 2
//! x1 1
//! x2 1
//! [phi]
//! y1 C={0,2} D={0,1}
//! x1 C={0} D={0}
//! x2 radices 3 parity=T-odd
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::one_dim::{IntervalPair, NPairSpec};

use super::{NodeId, WeightedTree, ROOT_NAME};

pub const TREE_HEADER: &str = "# weighted-tree v1";
pub const FOREST_HEADER: &str = "# weighted-forest v1";

pub fn write_tree(tree: &WeightedTree) -> String {
    let mut out = String::new();
    out.push_str(TREE_HEADER);
    out.push('\n');
    write_body(tree, &mut out);
    out
}

fn write_body(tree: &WeightedTree, out: &mut String) {
    let _ = writeln!(out, "[tree]");
    let _ = writeln!(out, "root {}", tree.name(tree.root()));
    for &v in tree.order() {
        if let Some(p) = tree.node(v).parent {
            let _ = writeln!(out, "node {} parent {}", tree.name(v), tree.name(p));
        }
    }
    let _ = writeln!(out, "[initial]\n{}", tree.initial());
    let _ = writeln!(out, "[delta]");
    for &v in tree.order() {
        if let Some(d) = tree.node(v).delta {
            let _ = writeln!(out, "{} {d}", tree.name(v));
        }
    }
    let _ = writeln!(out, "[alpha]");
    for &v in tree.order() {
        if let Some(a) = tree.node(v).alpha {
            let _ = writeln!(out, "{} {a}", tree.name(v));
        }
    }
    let _ = writeln!(out, "[phi]");
    for &v in tree.order() {
        if let Some(phi) = &tree.node(v).phi {
            let _ = writeln!(out, "{} {phi}", tree.name(v));
        }
    }
}

pub fn parse_tree(text: &str) -> Result<WeightedTree> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    parse_lines(&lines)
}

#[derive(PartialEq)]
enum Section {
    None,
    Tree,
    Initial,
    Delta,
    Alpha,
    Phi,
}

fn parse_lines(lines: &[(usize, &str)]) -> Result<WeightedTree> {
    let mut section = Section::None;
    let mut root: Option<(usize, String)> = None;
    let mut decls: Vec<(usize, String, String)> = Vec::new();
    let mut initial: Option<NPairSpec> = None;
    let mut deltas: Vec<(usize, String, u64)> = Vec::new();
    let mut alphas: Vec<(usize, String, u64)> = Vec::new();
    let mut phis: Vec<(usize, String, IntervalPair)> = Vec::new();
    let last_line = lines.last().map_or(1, |l| l.0);

    for &(line, raw) in lines {
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        if text.starts_with('[') {
            section = match text {
                "[tree]" => Section::Tree,
                "[initial]" => Section::Initial,
                "[delta]" => Section::Delta,
                "[alpha]" => Section::Alpha,
                "[phi]" => Section::Phi,
                other => return Err(Error::parse(line, format!("unknown section `{other}`"))),
            };
            continue;
        }
        let words: Vec<&str> = text.split_whitespace().collect();
        match section {
            Section::None => return Err(Error::parse(line, "content before the first section")),
            Section::Tree => match words.as_slice() {
                ["root", name] => {
                    if root.is_some() {
                        return Err(Error::parse(line, "second `root` line"));
                    }
                    root = Some((line, name.to_string()));
                }
                ["node", name, "parent", parent] => decls.push((line, name.to_string(), parent.to_string())),
                _ => return Err(Error::parse(line, "expected `node <name> parent <name>` or `root <name>`")),
            },
            Section::Initial => {
                if initial.is_some() {
                    return Err(Error::parse(line, "more than one initial pair"));
                }
                initial = Some(text.parse().map_err(|e: Error| reline(e, line))?);
            }
            Section::Delta | Section::Alpha => {
                let [name, value] = words.as_slice() else {
                    return Err(Error::parse(line, "expected `<name> <value>`"));
                };
                let value: u64 = value
                    .parse()
                    .map_err(|_| Error::parse(line, format!("`{value}` is not a non-negative integer")))?;
                let rows = if section == Section::Delta { &mut deltas } else { &mut alphas };
                rows.push((line, name.to_string(), value));
            }
            Section::Phi => {
                let (name, rest) = text
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| Error::parse(line, "expected `<name> <interval pair>`"))?;
                let pair: IntervalPair = rest.trim().parse().map_err(|e: Error| reline(e, line))?;
                phis.push((line, name.to_string(), pair));
            }
        }
    }

    let initial = initial.ok_or_else(|| Error::parse(last_line, "missing [initial] section"))?;
    let declared: HashMap<&str, usize> = decls.iter().map(|(l, n, _)| (n.as_str(), *l)).collect();
    let root_name = match root {
        Some((_, name)) => name,
        None => {
            let mut orphans: Vec<&str> = decls
                .iter()
                .map(|(_, _, p)| p.as_str())
                .filter(|p| !declared.contains_key(p))
                .collect();
            orphans.sort_unstable();
            orphans.dedup();
            match orphans.as_slice() {
                [] => ROOT_NAME.to_string(),
                [one] => one.to_string(),
                _ => return Err(Error::parse(last_line, format!("several roots: {}", orphans.join(", ")))),
            }
        }
    };

    let mut tree = WeightedTree::with_root(&root_name, initial);
    let mut pending: Vec<&(usize, String, String)> = decls.iter().collect();
    loop {
        let before = pending.len();
        let mut rest = Vec::new();
        for decl in pending {
            let (line, name, parent) = decl;
            if tree.find(parent).is_some() {
                tree.add_node(name, parent).map_err(|e| reline(e, *line))?;
            } else {
                rest.push(decl);
            }
        }
        pending = rest;
        if pending.is_empty() {
            break;
        }
        if pending.len() == before {
            let (line, name, parent) = pending[0];
            return Err(if declared.contains_key(parent.as_str()) {
                Error::InvalidTree(format!("`{name}` is not connected to the root `{root_name}` (cycle)"))
            } else {
                Error::parse(*line, format!("unknown parent `{parent}`"))
            });
        }
    }
    // Keep the file's declaration order rather than insertion order.
    let mut order = vec![tree.root()];
    order.extend(decls.iter().map(|(_, n, _)| tree.find(n).expect("added")));
    tree.order = order;

    let lookup = |tree: &WeightedTree, line: usize, name: &str, seen: &mut Vec<NodeId>| -> Result<NodeId> {
        let id = tree
            .find(name)
            .ok_or_else(|| Error::parse(line, format!("unknown node `{name}`")))?;
        if seen.contains(&id) {
            return Err(Error::parse(line, format!("second row for `{name}`")));
        }
        seen.push(id);
        Ok(id)
    };
    let mut seen = Vec::new();
    for (line, name, d) in deltas {
        let id = lookup(&tree, line, &name, &mut seen)?;
        tree.set_delta(id, d);
    }
    seen.clear();
    for (line, name, a) in alphas {
        let id = lookup(&tree, line, &name, &mut seen)?;
        tree.set_alpha(id, a);
    }
    seen.clear();
    for (line, name, pair) in phis {
        let id = lookup(&tree, line, &name, &mut seen)?;
        tree.set_phi(id, pair);
    }
    Ok(tree)
}

fn reline(err: Error, line: usize) -> Error {
    match err {
        Error::Parse { message, .. } => Error::Parse { line, message },
        Error::InvalidTree(message) | Error::InvalidArgument(message) => Error::Parse { line, message },
        other => other,
    }
}

/// Components `(axes, tree)` of a forest.
pub fn write_forest_text(components: &[(Vec<usize>, WeightedTree)]) -> String {
    let mut out = String::new();
    out.push_str(FOREST_HEADER);
    out.push('\n');
    for (axes, tree) in components {
        out.push_str("[component]\n");
        let axes: Vec<String> = axes.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(out, "axes {}", axes.join(","));
        write_body(tree, &mut out);
    }
    out
}

/// Reads a forest file. A plain tree file is accepted as a single component.
pub fn parse_forest_text(text: &str) -> Result<Vec<(Vec<usize>, WeightedTree)>> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    let starts: Vec<usize> = lines
        .iter()
        .enumerate()
        .filter(|(_, (_, l))| l.trim() == "[component]")
        .map(|(i, _)| i)
        .collect();
    if starts.is_empty() {
        let tree = parse_lines(&lines)?;
        return Ok(vec![((0..tree.dim()).collect(), tree)]);
    }
    if let Some((line, _)) = lines[..starts[0]]
        .iter()
        .find(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'))
    {
        return Err(Error::parse(*line, "content before the first [component]"));
    }
    let mut components = Vec::with_capacity(starts.len());
    for (k, &start) in starts.iter().enumerate() {
        let end = starts.get(k + 1).copied().unwrap_or(lines.len());
        let body = &lines[start + 1..end];
        let axes_at = body
            .iter()
            .position(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'))
            .ok_or_else(|| Error::parse(lines[start].0, "empty component"))?;
        let (line, axes_line) = body[axes_at];
        let axes = axes_line
            .trim()
            .strip_prefix("axes ")
            .ok_or_else(|| Error::parse(line, "expected `axes <i,j,...>`"))?
            .split(',')
            .map(|a| a.trim().parse::<usize>().map_err(|_| Error::parse(line, format!("bad axis `{a}`"))))
            .collect::<Result<Vec<_>>>()?;
        let tree = parse_lines(&body[axes_at + 1..])?;
        if tree.dim() != axes.len() {
            return Err(Error::parse(
                line,
                format!("{} axes listed for a tree with {} tops", axes.len(), tree.dim()),
            ));
        }
        components.push((axes, tree));
    }
    Ok(components)
}

/// A column per non-root node with its weight, breadth first.
pub fn render_table(tree: &WeightedTree) -> String {
    let mut nodes: Vec<NodeId> = tree.order().iter().copied().filter(|&v| v != tree.root()).collect();
    nodes.sort_by_key(|&v| tree.depth(v));
    let mut rows: Vec<Vec<String>> = vec![
        vec!["node".into()],
        vec!["alpha".into()],
        vec!["C".into()],
        vec!["D".into()],
        vec!["N".into()],
    ];
    for &v in &nodes {
        let node = tree.node(v);
        let (c, d, n) = match &node.phi {
            Some(phi) => {
                let text = phi.to_string();
                let (c, d) = text.split_once(' ').expect("C= D= form");
                (c[2..].to_string(), d[2..].to_string(), phi.size().to_string())
            }
            None => ("-".into(), "-".into(), "-".into()),
        };
        let cells = [
            node.name.clone(),
            node.alpha.map_or("-".into(), |a| a.to_string()),
            c,
            d,
            n,
        ];
        for (row, cell) in rows.iter_mut().zip(cells) {
            row.push(cell);
        }
    }
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", cells.join(" | ").trim_end());
    }
    let deltas: Vec<String> = tree
        .order()
        .iter()
        .filter_map(|&v| tree.node(v).delta.map(|d| format!("{}={d}", tree.name(v))))
        .collect();
    let _ = writeln!(out, "delta: {}", if deltas.is_empty() { "-".into() } else { deltas.join(" ") });
    let _ = writeln!(out, "initial: {}", tree.initial());
    out
}
