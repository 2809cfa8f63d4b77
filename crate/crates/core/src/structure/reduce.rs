use serde::Serialize;

use crate::error::{Error, Result};
use crate::extension::extend_first;
use crate::lattice::{l_set, BoxSet, Coord, LatticeBox, SetPair};
use crate::one_dim::{interval_chain, IntervalPair, Side};

/// Least nonzero element of `T` under the componentwise order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Germ {
    pub point: Vec<Coord>,
}

/// True when every point of the box with a zero coordinate lies in `set`.
pub fn contains_faces(set: &BoxSet) -> bool {
    let bounds = set.bounds();
    let interior: u64 = bounds.bounds().iter().map(|&m| m - 1).product();
    let on_faces = set.iter().filter(|p| p.contains(&0)).count() as u64;
    on_faces == bounds.cells() - interior
}

/// The germ of `T` for a pair whose `S`-side holds every face of the box.
///
/// In dimension one this is the least positive `p` in `T`, provided `[0, p)` lies in `S`.
/// Otherwise the points of `T` must form a chain under strict componentwise order
/// and each slab `k a + L_a` may hold at most one of them.
pub fn germ_of(t: &BoxSet, s: &BoxSet) -> Result<Germ> {
    if t.bounds() != s.bounds() {
        return Err(Error::InvalidArgument("germ_of needs both sides on one box".into()));
    }
    if t.len() < 2 {
        return Err(Error::Structure("T has no nonzero point inside the box".into()));
    }
    if t.dim() == 1 {
        let p = t.values()[1];
        if s.values().iter().take_while(|&&v| v < p).count() as u64 != p {
            return Err(Error::Structure(format!("[0, {p}) is not contained in S")));
        }
        return Ok(Germ { point: vec![p] });
    }
    if !contains_faces(s) {
        return Err(Error::Structure("S does not contain the coordinate faces of the box".into()));
    }
    let points: Vec<Vec<Coord>> = t.iter().collect();
    for w in points.windows(2) {
        if !w[0].iter().zip(&w[1]).all(|(a, b)| a < b) {
            return Err(Error::Structure(format!(
                "{:?} and {:?} are not comparable, so T is not a chain",
                w[0], w[1]
            )));
        }
    }
    let germ = points[1].clone();
    let slab = |p: &[Coord]| p.iter().zip(&germ).map(|(x, a)| x / a).min().unwrap_or(0);
    for w in points.windows(2) {
        if slab(&w[0]) == slab(&w[1]) {
            return Err(Error::Structure(format!(
                "{:?} and {:?} share the slab k a + L_a with k = {}",
                w[0],
                w[1],
                slab(&w[0])
            )));
        }
    }
    Ok(Germ { point: germ })
}

/// `(rho(T ∩ Q), rho(S ∩ Q))` for the face `Q` spanned by `face`.
pub fn marginal_pair(pair: &SetPair, face: &[usize]) -> Result<SetPair> {
    if face.is_empty() || face.len() >= pair.dim() {
        return Err(Error::InvalidArgument(format!(
            "a marginal face needs between 1 and {} axes, got {}",
            pair.dim().saturating_sub(1),
            face.len()
        )));
    }
    SetPair::new(pair.t.face(face)?, pair.s.face(face)?)
}

/// `T(x) = T'(x_Q^a, rest)` and `S(x) = L_a(x_Q) S'(x_Q^a, rest)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalReduction {
    pub face: Vec<usize>,
    pub germ: Germ,
    /// Axis of `reduced` carrying the merged face, placed at the first face axis.
    pub merged_axis: usize,
    pub reduced: SetPair,
}

impl MarginalReduction {
    /// For each axis of the reduced pair, the original axes it stands for.
    pub fn source_axes(&self) -> Vec<Vec<usize>> {
        merged_layout(self.face.len() + self.reduced.dim() - 1, &self.face)
    }
}

pub(crate) fn merged_layout(n: usize, face: &[usize]) -> Vec<Vec<usize>> {
    (0..n)
        .filter_map(|j| {
            if j == face[0] {
                Some(face.to_vec())
            } else if face.contains(&j) {
                None
            } else {
                Some(vec![j])
            }
        })
        .collect()
}

fn check_face(n: usize, face: &[usize]) -> Result<()> {
    if face.is_empty() || face.windows(2).any(|w| w[0] >= w[1]) || face.iter().any(|&j| j >= n) {
        return Err(Error::InvalidArgument(format!(
            "face {face:?} must be a nonempty increasing list of axes below {n}"
        )));
    }
    Ok(())
}

/// Collapses the face `Q` onto the ray of its germ.
///
/// The marginal pair on `Q` must be of pure type, or `Q` a single axis whose germ `p`
/// has `[0, p)` on the `S`-side. The merged axis has length `min ceil(M_i / a_i)`,
/// which is exactly the range on which the reduced pair is determined by the input.
pub fn marginal_reduce(pair: &SetPair, face: &[usize]) -> Result<MarginalReduction> {
    let n = pair.dim();
    check_face(n, face)?;
    let marginal = if face.len() == n {
        pair.clone()
    } else {
        marginal_pair(pair, face)?
    };
    let germ = germ_of(&marginal.t, &marginal.s)?;
    let a = &germ.point;
    let bounds = pair.bounds();
    let merged_len = face
        .iter()
        .zip(a)
        .map(|(&j, &aj)| bounds.bound(j).div_ceil(aj))
        .min()
        .expect("nonempty face");

    let layout = merged_layout(n, face);
    let merged_axis = face[0];
    let reduced_bounds = LatticeBox::new(
        layout
            .iter()
            .map(|src| if src.len() > 1 || src[0] == merged_axis { merged_len } else { bounds.bound(src[0]) })
            .collect(),
    )?;
    let collapse = |set: &BoxSet| {
        let points = set.iter().filter_map(|p| {
            let k = p[face[0]] / a[0];
            let on_ray = face.iter().zip(a).all(|(&j, &aj)| p[j] == k * aj);
            on_ray.then(|| {
                layout
                    .iter()
                    .map(|src| if src[0] == merged_axis { k } else { p[src[0]] })
                    .collect::<Vec<_>>()
            })
        });
        BoxSet::new(reduced_bounds.clone(), points)
    };
    let reduced = SetPair::new(collapse(&pair.t)?, collapse(&pair.s)?)?;

    let images: Vec<Vec<Coord>> = layout
        .iter()
        .map(|src| {
            let mut w = vec![0; n];
            if src[0] == merged_axis {
                for (&j, &aj) in face.iter().zip(a) {
                    w[j] = aj;
                }
            } else {
                w[src[0]] = 1;
            }
            w
        })
        .collect();
    let t = reduced.t.substitute(&images, bounds.clone())?;
    let staircase = l_set(a, &bounds.select(face)?)?.embed(face, bounds)?;
    let s = reduced.s.substitute(&images, bounds.clone())?.minkowski_sum(&staircase, bounds)?;
    if t != pair.t || s != pair.s {
        let side = if t != pair.t { "T" } else { "S" };
        return Err(Error::Structure(format!(
            "face {face:?} with germ {a:?}: the {side}-side does not re-expand from the merged pair"
        )));
    }
    Ok(MarginalReduction {
        face: face.to_vec(),
        germ,
        merged_axis,
        reduced,
    })
}

/// `T = A a`, `S = B a ⊕ L_a` for a pure-type pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PureTypeReduction {
    /// `L_0` sits in `T` rather than `S`; the identities then hold for `(S, T)`.
    pub swapped: bool,
    pub germ: Germ,
    /// `(A, B)` on `[0, min ceil(M_i / a_i))`.
    pub line: SetPair,
}

pub fn pure_type_reduce(pair: &SetPair) -> Result<PureTypeReduction> {
    if pair.dim() < 2 {
        return Err(Error::InvalidArgument("pure type needs at least two axes".into()));
    }
    let swapped = if contains_faces(&pair.s) {
        false
    } else if contains_faces(&pair.t) {
        true
    } else {
        return Err(Error::Structure("neither side contains the coordinate faces of the box".into()));
    };
    let oriented = if swapped { pair.clone().swap() } else { pair.clone() };
    let all: Vec<usize> = (0..pair.dim()).collect();
    let r = marginal_reduce(&oriented, &all)?;
    r.reduced.verify()?;
    Ok(PureTypeReduction {
        swapped,
        germ: r.germ,
        line: r.reduced,
    })
}

/// `T = C(x_j) T'(x_j^N, rest)`, `S = D(x_j) S'(x_j^N, rest)` with `(C, D)` the
/// finite axis section completed to an interval pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneFaceReduction {
    pub axis: usize,
    /// The side whose section along the axis is finite.
    pub finite: Side,
    pub interval: IntervalPair,
    pub reduced: SetPair,
}

pub fn one_face_reduce(pair: &SetPair, axis: usize) -> Result<OneFaceReduction> {
    pair.bounds().check_axis(axis)?;
    let section = SetPair::new(pair.t.axis_section(axis)?, pair.s.axis_section(axis)?)?;
    let chain = interval_chain(&section)?;
    let finite = chain.finite.ok_or_else(|| {
        Error::insufficient(
            "one-face",
            format!("neither section of axis {axis} closes up inside [0, {})", pair.bounds().bound(axis)),
        )
    })?;
    let n = finite.pair.size();
    if n == 1 {
        return Ok(OneFaceReduction {
            axis,
            finite: finite.side,
            interval: finite.pair,
            reduced: pair.clone(),
        });
    }
    let bounds = pair.bounds();
    let reduced_bounds = bounds.with_bound(axis, bounds.bound(axis).div_ceil(n))?;
    let divide = |set: &BoxSet| {
        let points = set.iter().filter(|p| p[axis] % n == 0).map(|mut p| {
            p[axis] /= n;
            p
        });
        BoxSet::new(reduced_bounds.clone(), points)
    };
    let reduced = SetPair::new(divide(&pair.t)?, divide(&pair.s)?)?;
    let expanded = extend_first(&reduced, axis, &finite.pair)?.restrict(bounds)?;
    if &expanded != pair {
        return Err(Error::Structure(format!(
            "axis {axis}: {} does not split off the pair",
            finite.pair
        )));
    }
    Ok(OneFaceReduction {
        axis,
        finite: finite.side,
        interval: finite.pair,
        reduced,
    })
}

/// Which side of an axis section is finite inside the box.
///
/// A section counts as finite when all its points lie in the lower half of the axis,
/// so that a full period beyond its last point was observed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SectionFiniteness {
    pub t_finite: bool,
    pub s_finite: bool,
}

pub fn section_finiteness(pair: &SetPair, axis: usize) -> Result<SectionFiniteness> {
    let bound = pair.bounds().bound(axis);
    let finite = |set: &BoxSet| -> Result<bool> {
        let section = set.axis_section(axis)?;
        Ok(section.values().last().is_none_or(|&v| 2 * (v + 1) <= bound))
    };
    Ok(SectionFiniteness {
        t_finite: finite(&pair.t)?,
        s_finite: finite(&pair.s)?,
    })
}

/// A face whose marginal pair is of pure type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PureFace {
    pub face: Vec<usize>,
    /// The faces of the marginal sit in `T`; reduce `(S, T)` instead.
    pub swapped: bool,
    pub germ: Germ,
}

/// True when every axis section is `{0}` on one side.
pub fn is_class_f0(pair: &SetPair) -> Result<bool> {
    for j in 0..pair.dim() {
        if pair.t.axis_section(j)?.len() != 1 && pair.s.axis_section(j)?.len() != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every certified pure face, best first.
///
/// The normal orientation comes first when it has candidates. Within an orientation,
/// faces are the supports of nonzero points of `T ∩ Q`, where `Q` is spanned by the
/// axes on which `T` has section `{0}`; they are ranked by support size, then by the
/// lexicographic order of the point that produced them.
pub(crate) fn pure_face_candidates(pair: &SetPair) -> Result<Vec<PureFace>> {
    let mut out = Vec::new();
    for swapped in [false, true] {
        let (t, s) = if swapped { (&pair.s, &pair.t) } else { (&pair.t, &pair.s) };
        let mut zero_axes = Vec::new();
        for j in 0..pair.dim() {
            if pair.bounds().bound(j) >= 2 && t.axis_section(j)?.len() == 1 {
                zero_axes.push(j);
            }
        }
        if zero_axes.len() < 2 {
            continue;
        }
        let mut supports: Vec<(usize, Vec<Coord>, Vec<usize>)> = t
            .face(&zero_axes)?
            .iter()
            .filter_map(|p| {
                let support: Vec<usize> = zero_axes
                    .iter()
                    .zip(&p)
                    .filter(|(_, &c)| c > 0)
                    .map(|(&j, _)| j)
                    .collect();
                (!support.is_empty()).then_some((support.len(), p, support))
            })
            .collect();
        supports.sort();
        let mut seen = Vec::new();
        for (_, _, face) in supports {
            if face.len() < 2 || seen.contains(&face) {
                continue;
            }
            seen.push(face.clone());
            let marginal = if face.len() == pair.dim() {
                SetPair::new(t.clone(), s.clone())?
            } else {
                SetPair::new(t.face(&face)?, s.face(&face)?)?
            };
            if let Ok(germ) = germ_of(&marginal.t, &marginal.s) {
                out.push(PureFace { face, swapped, germ });
            }
        }
    }
    Ok(out)
}

/// A face of dimension at least two whose marginal pair is of pure type.
pub fn find_pure_face(pair: &SetPair) -> Result<PureFace> {
    if pair.dim() < 2 {
        return Err(Error::InvalidArgument("a pure face needs at least two axes".into()));
    }
    if !is_class_f0(pair)? {
        return Err(Error::Structure("some axis section is nontrivial on both sides".into()));
    }
    pure_face_candidates(pair)?.into_iter().next().ok_or_else(|| {
        Error::insufficient(
            "pure face",
            "no face of dimension two or more has a pure-type marginal inside the box",
        )
    })
}
