use crate::error::{Error, Result};
use crate::lattice::{l_set, BoxSet, Coord, LatticeBox, SetPair};

use super::{NodeId, WeightedTree};

/// The pair generated by `tree`, exact on `bounds`. Axes follow the top order.
pub fn generate(tree: &WeightedTree, bounds: &LatticeBox) -> Result<SetPair> {
    run(tree, bounds, &mut Plan::Deepest)
}

/// Like [`generate`] but eliminates branches by their parents in the given order.
pub fn generate_in_order(tree: &WeightedTree, bounds: &LatticeBox, order: &[NodeId]) -> Result<SetPair> {
    if order.len() != tree.norm() {
        return Err(Error::InvalidArgument(format!(
            "elimination order has {} entries, the tree has {} inner nodes",
            order.len(),
            tree.norm()
        )));
    }
    run(tree, bounds, &mut Plan::Fixed(order.iter()))
}

/// Admissible branch-elimination orders, at most `limit` of them.
pub fn elimination_orders(tree: &WeightedTree, limit: usize) -> Vec<Vec<NodeId>> {
    fn walk(tree: &WeightedTree, active: &mut Vec<bool>, prefix: &mut Vec<NodeId>, out: &mut Vec<Vec<NodeId>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        let choices = admissible(tree, active);
        if choices.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for z in choices {
            let removed = active_children(tree, active, z);
            removed.iter().for_each(|&x| active[x] = false);
            prefix.push(z);
            walk(tree, active, prefix, out, limit);
            prefix.pop();
            removed.iter().for_each(|&x| active[x] = true);
        }
    }
    let mut out = Vec::new();
    walk(tree, &mut vec![true; tree.len()], &mut Vec::new(), &mut out, limit);
    out
}

enum Plan<'a> {
    /// Deepest admissible parent, ties broken by the least name.
    Deepest,
    Fixed(std::slice::Iter<'a, NodeId>),
}

fn active_children(tree: &WeightedTree, active: &[bool], z: NodeId) -> Vec<NodeId> {
    tree.node(z).children.iter().copied().filter(|&c| active[c]).collect()
}

/// Active nodes whose active children are all current tops.
fn admissible(tree: &WeightedTree, active: &[bool]) -> Vec<NodeId> {
    tree.order()
        .iter()
        .copied()
        .filter(|&v| active[v])
        .filter(|&v| {
            let children = active_children(tree, active, v);
            !children.is_empty() && children.iter().all(|&c| active_children(tree, active, c).is_empty())
        })
        .collect()
}

fn run(tree: &WeightedTree, bounds: &LatticeBox, plan: &mut Plan<'_>) -> Result<SetPair> {
    tree.check()?;
    let tops = tree.tops();
    bounds.expect_dim(tops.len())?;
    let mut active = vec![true; tree.len()];
    expand(tree, &tops, bounds.bounds(), &mut active, plan)
}

enum Source {
    Branch(usize),
    Kept(usize),
}

fn expand(
    tree: &WeightedTree,
    axes: &[NodeId],
    bounds: &[Coord],
    active: &mut [bool],
    plan: &mut Plan<'_>,
) -> Result<SetPair> {
    if axes == [tree.root()] {
        return tree.initial().evaluate(bounds[0]);
    }
    let candidates = admissible(tree, active);
    let z = match plan {
        Plan::Deepest => *candidates
            .iter()
            .max_by(|&&u, &&v| {
                tree.depth(u)
                    .cmp(&tree.depth(v))
                    .then_with(|| tree.name(v).cmp(tree.name(u)))
            })
            .ok_or_else(|| Error::InvalidTree("no branch to eliminate".into()))?,
        Plan::Fixed(order) => {
            let z = *order
                .next()
                .ok_or_else(|| Error::InvalidArgument("elimination order ended early".into()))?;
            if !candidates.contains(&z) {
                return Err(Error::InvalidArgument(format!(
                    "`{}` cannot be eliminated at this point",
                    tree.name(z)
                )));
            }
            z
        }
    };

    let mut branch: Vec<(usize, NodeId)> = axes
        .iter()
        .enumerate()
        .filter(|(_, &v)| tree.node(v).parent == Some(z) && active[v])
        .map(|(i, &v)| (i, v))
        .collect();
    branch.sort_unstable();
    let first = branch[0].0;

    let mut reduced_axes = Vec::with_capacity(axes.len() - branch.len() + 1);
    let mut sources = Vec::with_capacity(axes.len());
    let mut z_index = 0;
    for (i, &v) in axes.iter().enumerate() {
        if let Some(j) = branch.iter().position(|&(_, x)| x == v) {
            if i == first {
                z_index = reduced_axes.len();
                reduced_axes.push(z);
            }
            sources.push(Source::Branch(j));
        } else {
            sources.push(Source::Kept(reduced_axes.len()));
            reduced_axes.push(v);
        }
    }

    let mut alphas = Vec::with_capacity(branch.len());
    let mut pairs = Vec::with_capacity(branch.len());
    let mut block = Vec::with_capacity(branch.len());
    let mut steps = Vec::with_capacity(branch.len());
    for &(i, x) in &branch {
        let node = tree.node(x);
        let alpha = node.alpha.expect("validated");
        let phi = node.phi.as_ref().expect("validated");
        let step = alpha.checked_mul(phi.size()).ok_or(Error::Overflow("alpha * N"))?;
        alphas.push(alpha);
        block.push(bounds[i]);
        steps.push(step);
        pairs.push(phi);
    }
    let k_bound = block
        .iter()
        .zip(&steps)
        .map(|(&m, &s)| m.div_ceil(s))
        .min()
        .expect("nonempty branch");

    let mut reduced_bounds = Vec::with_capacity(reduced_axes.len());
    for &v in &reduced_axes {
        reduced_bounds.push(if v == z {
            k_bound
        } else {
            bounds[axes.iter().position(|&a| a == v).expect("kept axis")]
        });
    }

    for &(_, x) in &branch {
        active[x] = false;
    }
    let reduced = expand(tree, &reduced_axes, &reduced_bounds, active, plan)?;

    let delta = tree.node(z).delta.expect("validated");
    let sizes: Vec<Coord> = pairs.iter().map(|p| p.size()).collect();
    let t_factor = local_factor(&pairs.iter().map(|p| p.c()).collect::<Vec<_>>(), &sizes, &alphas, delta == 1, &block)?;
    let s_factor = local_factor(&pairs.iter().map(|p| p.d()).collect::<Vec<_>>(), &sizes, &alphas, delta == 0, &block)?;

    let out_box = LatticeBox::new(bounds.to_vec())?;
    let t = substitute_branch(&reduced.t, &t_factor, &sources, z_index, &steps, &out_box)?;
    let s = substitute_branch(&reduced.s, &s_factor, &sources, z_index, &steps, &out_box)?;
    SetPair::new(t, s)
}

/// `prod C_j(x_j) * L_a^[staircase](x^N)` restricted to the branch block, as tuples.
pub(crate) fn local_factor(
    parts: &[&[u64]],
    sizes: &[Coord],
    alphas: &[Coord],
    staircase: bool,
    block: &[Coord],
) -> Result<Vec<Vec<Coord>>> {
    let mut tuples: Vec<Vec<Coord>> = vec![Vec::new()];
    for (j, part) in parts.iter().enumerate() {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                part.iter().filter(|&&c| c < block[j]).map(move |&c| {
                    let mut t = t.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    if !staircase {
        return Ok(tuples);
    }
    let l_box = LatticeBox::new(block.iter().zip(sizes).map(|(&m, &n)| m.div_ceil(n)).collect())?;
    let steps: BoxSet = l_set(alphas, &l_box)?;
    let mut out = Vec::with_capacity(tuples.len() * steps.len());
    for l in steps.iter() {
        'tuples: for c in &tuples {
            let mut f = Vec::with_capacity(c.len());
            for j in 0..c.len() {
                let v = c[j] + sizes[j] * l[j];
                if v >= block[j] {
                    continue 'tuples;
                }
                f.push(v);
            }
            out.push(f);
        }
    }
    Ok(out)
}

fn substitute_branch(
    reduced: &BoxSet,
    factor: &[Vec<Coord>],
    sources: &[Source],
    z_index: usize,
    steps: &[Coord],
    out_box: &LatticeBox,
) -> Result<BoxSet> {
    let flat = reduced.flat_coords();
    let width = reduced.dim();
    let mut base = vec![0; sources.len()];
    let mut point = vec![0; sources.len()];
    let mut indices = Vec::with_capacity(reduced.len() * factor.len().min(64));
    'points: for r in flat.chunks_exact(width) {
        let k = r[z_index];
        for (i, source) in sources.iter().enumerate() {
            base[i] = match *source {
                Source::Branch(j) => k * steps[j],
                Source::Kept(idx) => r[idx],
            };
            if base[i] >= out_box.bound(i) {
                continue 'points;
            }
        }
        'factor: for f in factor {
            for (i, source) in sources.iter().enumerate() {
                point[i] = match *source {
                    Source::Branch(j) => {
                        let v = base[i] + f[j];
                        if v >= out_box.bound(i) {
                            continue 'factor;
                        }
                        v
                    }
                    Source::Kept(_) => base[i],
                };
            }
            indices.push(out_box.encode(&point));
        }
    }
    BoxSet::from_distinct_indices(out_box.clone(), indices)
}
