//! The two extension operators, on set pairs and as tree surgery.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{l_set, BoxSet, Coord, LatticeBox, SetPair};
use crate::one_dim::{IntervalPair, NPairSpec};
use crate::tree::WeightedTree;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtensionStep {
    /// `T*(x) = C(x_j) T(.., x_j^N, ..)`, `S*(x) = D(x_j) S(.., x_j^N, ..)`.
    First { axis: usize, pair: IntervalPair },
    /// `x_j -> y^a` with the staircase `L_a` on `T` when `delta = 1`, on `S` when 0.
    Second { axis: usize, delta: u64, a: Vec<Coord> },
}

impl ExtensionStep {
    pub fn axis(&self) -> usize {
        match self {
            ExtensionStep::First { axis, .. } | ExtensionStep::Second { axis, .. } => *axis,
        }
    }

    fn check(&self) -> Result<()> {
        if let ExtensionStep::Second { delta, a, .. } = self {
            if *delta > 1 {
                return Err(Error::InvalidArgument(format!("delta must be 0 or 1, found {delta}")));
            }
            if a.len() < 2 {
                return Err(Error::InvalidArgument("a second-type step needs at least two new axes".into()));
            }
            if a.contains(&0) {
                return Err(Error::InvalidArgument(format!("every entry of a must be positive, got {a:?}")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for ExtensionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtensionStep::First { axis, pair } => write!(f, "first axis={axis} {pair}"),
            ExtensionStep::Second { axis, delta, a } => {
                let a: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                write!(f, "second axis={axis} delta={delta} a={}", a.join(","))
            }
        }
    }
}

/// `first axis=0 C={0,2} D={0,1}` or `second axis=1 delta=0 a=2,3`. Axes count from 0.
impl FromStr for ExtensionStep {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::parse(0, msg);
        let mut words = text.split_whitespace();
        let kind = words.next().ok_or_else(|| bad("empty extension step".into()))?;
        let axis = words
            .next()
            .and_then(|w| w.strip_prefix("axis="))
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| bad("expected `axis=<index>`".into()))?;
        let rest: Vec<&str> = words.collect();
        let step = match kind {
            "first" => ExtensionStep::First {
                axis,
                pair: rest.join(" ").parse()?,
            },
            "second" => {
                let [delta, a] = rest.as_slice() else {
                    return Err(bad("expected `delta=<0|1> a=<a1,...,am>`".into()));
                };
                let delta = delta
                    .strip_prefix("delta=")
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| bad(format!("bad `{delta}`")))?;
                let a = a
                    .strip_prefix("a=")
                    .ok_or_else(|| bad(format!("bad `{a}`")))?
                    .split(',')
                    .map(|x| x.parse().map_err(|_| bad(format!("bad entry `{x}` in a"))))
                    .collect::<Result<Vec<Coord>>>()?;
                ExtensionStep::Second { axis, delta, a }
            }
            other => return Err(bad(format!("unknown extension kind `{other}`"))),
        };
        step.check().map_err(|e| bad(e.to_string()))?;
        Ok(step)
    }
}

/// Shape of a pair as far as legality is concerned.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairKind {
    /// `({0}, N^n)`
    ZeroT,
    /// `(N^n, {0})`
    ZeroS,
    Other,
}

impl PairKind {
    pub fn of_spec(spec: &NPairSpec) -> Self {
        match spec {
            NPairSpec::ZeroT => PairKind::ZeroT,
            NPairSpec::ZeroS => PairKind::ZeroS,
            _ => PairKind::Other,
        }
    }

    /// Classifies a pair from its data on the box.
    pub fn classify(pair: &SetPair) -> Self {
        let cells = pair.bounds().cells();
        if pair.t.len() == 1 && pair.s.len() as u64 == cells {
            PairKind::ZeroT
        } else if pair.s.len() == 1 && pair.t.len() as u64 == cells {
            PairKind::ZeroS
        } else {
            PairKind::Other
        }
    }
}

/// A second-type step that turns a trivial pair into a non-primitive one.
pub fn is_illegal(kind: PairKind, step: &ExtensionStep) -> bool {
    match step {
        ExtensionStep::First { .. } => false,
        ExtensionStep::Second { delta, .. } => {
            matches!((kind, delta), (PairKind::ZeroT, 0) | (PairKind::ZeroS, 1))
        }
    }
}

/// First-type extension on sets; the box grows by `N` along the axis.
pub fn extend_first(pair: &SetPair, axis: usize, interval: &IntervalPair) -> Result<SetPair> {
    let n = interval.size();
    let stretched = pair.map(|set| set.dilate(axis, n))?;
    let bounds = stretched.bounds().clone();
    let block = |part: &[u64]| {
        let mut point = vec![0; bounds.dim()];
        let points: Vec<Vec<Coord>> = part
            .iter()
            .map(|&c| {
                point[axis] = c;
                point.clone()
            })
            .collect();
        BoxSet::new(bounds.clone(), points)
    };
    SetPair::new(
        stretched.t.minkowski_sum(&block(interval.c())?, &bounds)?,
        stretched.s.minkowski_sum(&block(interval.d())?, &bounds)?,
    )
}

/// Second-type extension on sets. Axis `axis` becomes the block of `a.len()` axes
/// starting at the same index, each of length `a_i M_axis`.
pub fn extend_second(pair: &SetPair, axis: usize, delta: u64, a: &[Coord]) -> Result<SetPair> {
    ExtensionStep::Second {
        axis,
        delta,
        a: a.to_vec(),
    }
    .check()?;
    pair.bounds().check_axis(axis)?;
    let n = pair.dim();
    let m = a.len();
    let source = pair.bounds().bound(axis);
    let mut bounds = Vec::with_capacity(n + m - 1);
    bounds.extend_from_slice(&pair.bounds().bounds()[..axis]);
    for &ai in a {
        bounds.push(ai.checked_mul(source).ok_or(Error::Overflow("second-type box"))?);
    }
    bounds.extend_from_slice(&pair.bounds().bounds()[axis + 1..]);
    let target = LatticeBox::new(bounds)?;

    let images: Vec<Vec<Coord>> = (0..n)
        .map(|i| {
            let mut w = vec![0; n + m - 1];
            match i.cmp(&axis) {
                std::cmp::Ordering::Less => w[i] = 1,
                std::cmp::Ordering::Equal => w[axis..axis + m].copy_from_slice(a),
                std::cmp::Ordering::Greater => w[i + m - 1] = 1,
            }
            w
        })
        .collect();
    let substituted = pair.map(|set| set.substitute(&images, target.clone()))?;

    let block_axes: Vec<usize> = (axis..axis + m).collect();
    let staircase = l_set(a, &target.select(&block_axes)?)?.embed(&block_axes, &target)?;
    let (t, s) = if delta == 1 {
        (substituted.t.minkowski_sum(&staircase, &target)?, substituted.s)
    } else {
        (substituted.t, substituted.s.minkowski_sum(&staircase, &target)?)
    };
    SetPair::new(t, s)
}

/// Applies a step on sets.
pub fn extend_pair(pair: &SetPair, step: &ExtensionStep) -> Result<SetPair> {
    match step {
        ExtensionStep::First { axis, pair: interval } => extend_first(pair, *axis, interval),
        ExtensionStep::Second { axis, delta, a } => extend_second(pair, *axis, *delta, a),
    }
}

/// Applies a step to a tree. New tops get fresh names `y1, y2, ...`.
pub fn tree_extend(tree: &WeightedTree, step: &ExtensionStep) -> Result<WeightedTree> {
    let names = match step {
        ExtensionStep::First { .. } => Vec::new(),
        ExtensionStep::Second { a, .. } => {
            let mut probe = tree.clone();
            let root = probe.name(probe.root()).to_string();
            let mut names = Vec::with_capacity(a.len());
            for _ in a {
                let name = probe.fresh_name("y");
                probe.add_node(&name, &root)?;
                names.push(name);
            }
            names
        }
    };
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    tree_extend_with_names(tree, step, &names)
}

/// Like [`tree_extend`] with the names of the new tops supplied.
pub fn tree_extend_with_names(tree: &WeightedTree, step: &ExtensionStep, names: &[&str]) -> Result<WeightedTree> {
    step.check()?;
    let tops = tree.tops();
    let axis = step.axis();
    let &top = tops.get(axis).ok_or(Error::AxisOutOfRange {
        axis,
        dim: tops.len(),
    })?;
    let mut out = tree.clone();
    match step {
        ExtensionStep::First { pair, .. } => {
            if top == tree.root() {
                out.set_initial(tree.initial().graft_interval(pair)?);
            } else {
                let old = tree.node(top).phi.as_ref().ok_or_else(|| {
                    Error::InvalidTree(format!("{}: missing interval pair", tree.name(top)))
                })?;
                out.set_phi(top, pair.graft(old)?);
            }
        }
        ExtensionStep::Second { delta, a, .. } => {
            if names.len() != a.len() {
                return Err(Error::InvalidArgument(format!(
                    "{} names given for {} new tops",
                    names.len(),
                    a.len()
                )));
            }
            if top == tree.root() && is_illegal(PairKind::of_spec(tree.initial()), step) {
                return Err(Error::IllegalExtension(format!(
                    "delta={delta} on the trivial pair {}",
                    tree.initial()
                )));
            }
            let position = tree.order().iter().position(|&v| v == top).expect("top in order");
            for (k, (&name, &ak)) in names.iter().zip(a).enumerate() {
                let id = out.insert_node(name, tree.name(top), position + 1 + k)?;
                out.set_alpha(id, ak);
                out.set_phi(id, IntervalPair::trivial());
            }
            out.set_delta(top, *delta);
        }
    }
    Ok(out)
}
