use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::{tree_extend_with_names, ExtensionStep};
use crate::lattice::{Coord, LatticeBox, SetPair};
use crate::one_dim::{fit_npair, IntervalPair, Side};
use crate::tree::{WeightedTree, ROOT_NAME};

use super::forest::{Forest, ForestComponent};
use super::reduce::{merged_layout, marginal_pair, marginal_reduce, one_face_reduce, pure_face_candidates};
use super::separability::separability;

/// Faces tried at one level before giving up.
const MAX_FACE_ATTEMPTS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum Stage {
    Fit {
        axis: String,
        spec: String,
        bound: Coord,
    },
    Split {
        left: Vec<String>,
        right: Vec<String>,
    },
    OneFace {
        axis: String,
        finite: Side,
        interval: String,
    },
    Marginal {
        face: Vec<String>,
        germ: Vec<Coord>,
        delta: u64,
        merged: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub depth: usize,
    #[serde(flatten)]
    pub stage: Stage,
}

/// A forest regenerating the input on `certified`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub forest: Forest,
    pub certified: LatticeBox,
    pub trace: Vec<TraceEntry>,
}

/// Trees over labelled axes, with the box on which they reproduce the stage input.
struct Partial {
    trees: Vec<WeightedTree>,
    certified: Vec<Coord>,
}

struct Context {
    merged: usize,
    trace: Vec<TraceEntry>,
}

impl Context {
    fn log(&mut self, depth: usize, stage: Stage) {
        self.trace.push(TraceEntry { depth, stage });
    }
}

/// Recovers a forest of weighted trees from a box-verified pair.
///
/// Separable pairs split along the bipartition found by [`separability`]. A primitive
/// pair is peeled along every axis by its finite section, then one pure face is merged
/// into a single axis and the result decomposed again. The trees are rebuilt by the
/// matching extension steps in reverse. Every stage checks its own re-expansion, and the
/// finished forest is regenerated and compared with the input on the certified box.
pub fn decompose(pair: &SetPair) -> Result<Decomposition> {
    pair.verify()?;
    let labels: Vec<String> = (1..=pair.dim()).map(|j| format!("x{j}")).collect();
    let mut ctx = Context {
        merged: 0,
        trace: Vec::new(),
    };
    let partial = descend(pair, &labels, &mut ctx, 0)?;

    let mut components = Vec::with_capacity(partial.trees.len());
    for mut tree in partial.trees {
        let mut tops: Vec<(usize, usize)> = tree
            .tops()
            .into_iter()
            .map(|v| {
                let axis = labels.iter().position(|l| l == tree.name(v)).expect("top carries an axis label");
                (axis, v)
            })
            .collect();
        tops.sort_unstable();
        tree.reorder_tops(&tops.iter().map(|&(_, v)| v).collect::<Vec<_>>())?;
        if !tree.is_top(tree.root()) {
            tree.rename(tree.root(), ROOT_NAME)?;
        }
        components.push(ForestComponent {
            axes: tops.iter().map(|&(a, _)| a).collect(),
            tree,
        });
    }
    components.sort_by_key(|c| c.axes[0]);
    let forest = Forest { components };
    let certified = LatticeBox::new(partial.certified)?;
    if forest.generate(&certified)? != pair.restrict(&certified)? {
        return Err(Error::Structure(format!(
            "the recovered forest does not regenerate the input on {certified}"
        )));
    }
    Ok(Decomposition {
        forest,
        certified,
        trace: ctx.trace,
    })
}

fn descend(pair: &SetPair, labels: &[String], ctx: &mut Context, depth: usize) -> Result<Partial> {
    if pair.dim() == 1 {
        let fit = fit_npair(pair)?;
        ctx.log(
            depth,
            Stage::Fit {
                axis: labels[0].clone(),
                spec: fit.spec.to_string(),
                bound: fit.bound,
            },
        );
        return Ok(Partial {
            trees: vec![WeightedTree::with_root(&labels[0], fit.spec)],
            certified: vec![fit.bound],
        });
    }
    match separability(&pair.t)?.partition {
        Some((left, right)) => split(pair, &left, &right, labels, ctx, depth),
        None => primitive(pair, labels, ctx, depth),
    }
}

fn split(
    pair: &SetPair,
    left: &[usize],
    right: &[usize],
    labels: &[String],
    ctx: &mut Context,
    depth: usize,
) -> Result<Partial> {
    let pick = |axes: &[usize]| axes.iter().map(|&j| labels[j].clone()).collect::<Vec<_>>();
    ctx.log(
        depth,
        Stage::Split {
            left: pick(left),
            right: pick(right),
        },
    );
    let mut out = Partial {
        trees: Vec::new(),
        certified: vec![0; pair.dim()],
    };
    for axes in [left, right] {
        let part = descend(&marginal_pair(pair, axes)?, &pick(axes), ctx, depth + 1)?;
        for (&j, &c) in axes.iter().zip(&part.certified) {
            out.certified[j] = c;
        }
        out.trees.extend(part.trees);
    }
    Ok(out)
}

fn locate(trees: &[WeightedTree], label: &str) -> (usize, usize) {
    trees
        .iter()
        .enumerate()
        .find_map(|(k, tree)| {
            tree.tops()
                .into_iter()
                .position(|v| tree.name(v) == label)
                .map(|local| (k, local))
        })
        .expect("every axis label is a top of some tree")
}

fn primitive(pair: &SetPair, labels: &[String], ctx: &mut Context, depth: usize) -> Result<Partial> {
    let mut current = pair.clone();
    let mut peeled: Vec<(usize, IntervalPair, Coord)> = Vec::new();
    for (j, label) in labels.iter().enumerate().take(pair.dim()) {
        let r = one_face_reduce(&current, j)?;
        if r.interval.is_trivial() {
            continue;
        }
        ctx.log(
            depth,
            Stage::OneFace {
                axis: label.clone(),
                finite: r.finite,
                interval: r.interval.to_string(),
            },
        );
        peeled.push((j, r.interval, current.bounds().bound(j)));
        current = r.reduced;
    }

    let mut inner = match separability(&current.t)?.partition {
        Some((left, right)) => split(&current, &left, &right, labels, ctx, depth + 1)?,
        None => merge_face(&current, labels, ctx, depth)?,
    };

    for (j, interval, bound) in peeled.into_iter().rev() {
        let (k, local) = locate(&inner.trees, &labels[j]);
        let step = ExtensionStep::First {
            axis: local,
            pair: interval.clone(),
        };
        inner.trees[k] = tree_extend_with_names(&inner.trees[k], &step, &[])?;
        inner.certified[j] = bound.min(inner.certified[j].saturating_mul(interval.size()));
    }
    Ok(inner)
}

fn merge_face(pair: &SetPair, labels: &[String], ctx: &mut Context, depth: usize) -> Result<Partial> {
    let mut last_error = None;
    for candidate in pure_face_candidates(pair)?.into_iter().take(MAX_FACE_ATTEMPTS) {
        let oriented = if candidate.swapped { pair.clone().swap() } else { pair.clone() };
        let reduction = match marginal_reduce(&oriented, &candidate.face) {
            Ok(r) => r,
            Err(e) => {
                last_error = Some(e);
                continue;
            }
        };
        let reduced = if candidate.swapped {
            reduction.reduced.clone().swap()
        } else {
            reduction.reduced.clone()
        };

        let saved = (ctx.merged, ctx.trace.len());
        ctx.merged += 1;
        let merged = format!("y{}", ctx.merged);
        let sub_labels: Vec<String> = reduction
            .source_axes()
            .iter()
            .map(|src| if src.len() > 1 || src[0] == reduction.merged_axis { merged.clone() } else { labels[src[0]].clone() })
            .collect();
        let delta = u64::from(candidate.swapped);
        ctx.log(
            depth,
            Stage::Marginal {
                face: candidate.face.iter().map(|&j| labels[j].clone()).collect(),
                germ: reduction.germ.point.clone(),
                delta,
                merged: merged.clone(),
            },
        );

        let attempt = descend(&reduced, &sub_labels, ctx, depth + 1).and_then(|mut sub| {
            let (k, local) = locate(&sub.trees, &merged);
            let names: Vec<&str> = candidate.face.iter().map(|&j| labels[j].as_str()).collect();
            let step = ExtensionStep::Second {
                axis: local,
                delta,
                a: reduction.germ.point.clone(),
            };
            sub.trees[k] = tree_extend_with_names(&sub.trees[k], &step, &names)?;
            let certified = expand_certified(pair.bounds(), &reduction.face, &reduction.germ.point, &sub.certified);
            Ok(Partial {
                trees: sub.trees,
                certified,
            })
        });
        match attempt {
            Ok(out) => return Ok(out),
            Err(e) => {
                ctx.merged = saved.0;
                ctx.trace.truncate(saved.1);
                last_error = Some(e);
            }
        }
    }
    Err(last_error.unwrap_or_else(|| {
        Error::insufficient(
            "pure face",
            format!("no face of the class-F0 pair on {} has a pure-type marginal", pair.bounds()),
        )
    }))
}

/// Maps a certified box of the merged pair back to the face axes.
///
/// A face point `l + k a` needs the merged coordinate `k = min_i floor(u_i / a_i)` to be
/// certified, so clipping a single face axis to `a_i c` suffices; the axis losing the
/// least is chosen.
fn expand_certified(bounds: &LatticeBox, face: &[usize], a: &[Coord], sub: &[Coord]) -> Vec<Coord> {
    let mut out = bounds.bounds().to_vec();
    let mut merged = 0;
    for (src, &c) in merged_layout(bounds.dim(), face).iter().zip(sub) {
        if src[0] == face[0] {
            merged = c;
        } else {
            out[src[0]] = c;
        }
    }
    let mut best: Option<(usize, Coord)> = None;
    for (&j, &aj) in face.iter().zip(a) {
        let kept = bounds.bound(j).min(aj.saturating_mul(merged));
        // Keep the largest fraction kept / M_j.
        let better = best.is_none_or(|(i, k)| {
            u128::from(kept) * u128::from(bounds.bound(i)) > u128::from(k) * u128::from(bounds.bound(j))
        });
        if better {
            best = Some((j, kept));
        }
    }
    let (j, kept) = best.expect("nonempty face");
    out[j] = kept;
    out
}
