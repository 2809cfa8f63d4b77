//! Oracles shared by the integration tests. Each one is written from the definitions,
//! without calling the library routine it is compared against.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use npair::lattice::{BoxSet, Coord, LatticeBox};
use npair::one_dim::{IntervalPair, NPairSpec, Parity};
use npair::tree::{parse_tree, WeightedTree};

pub fn branch_tree() -> WeightedTree {
    let tree = parse_tree(include_str!("../data/branch_tree.tree")).unwrap();
    tree.check().unwrap();
    tree
}

pub fn points(set: &BoxSet) -> BTreeSet<Vec<Coord>> {
    set.iter().collect()
}

/// Number of ways each window point is `a + b`, by brute force over all pairs.
pub fn representation_counts(a: &BoxSet, b: &BoxSet, window: &LatticeBox) -> HashMap<Vec<Coord>, u64> {
    let mut counts = HashMap::new();
    for p in a.iter().filter(|p| window.contains(p)) {
        for q in b.iter().filter(|q| window.contains(q)) {
            let sum: Vec<Coord> = p.iter().zip(&q).map(|(x, y)| x + y).collect();
            if window.contains(&sum) {
                *counts.entry(sum).or_insert(0) += 1;
            }
        }
    }
    counts
}

/// First window point (lexicographically) with a count other than one.
pub fn naive_direct_sum(a: &BoxSet, b: &BoxSet, window: &LatticeBox) -> Option<(Vec<Coord>, u64)> {
    let counts = representation_counts(a, b, window);
    window
        .points()
        .map(|p| {
            let c = counts.get(&p).copied().unwrap_or(0);
            (p, c)
        })
        .find(|(_, c)| *c != 1)
}

/// The only `S` with `T ⊕ S = N^n` on the box, built point by point in lex order.
///
/// A point joins `S` exactly when nothing found so far covers it; this is forced because
/// every decomposition of `c` uses an `s <= c`, which comes earlier in lex order.
pub fn greedy_complement(t: &BoxSet) -> BTreeSet<Vec<Coord>> {
    let bounds = t.bounds();
    let t_points: Vec<Vec<Coord>> = t.iter().collect();
    let mut covered: BTreeSet<Vec<Coord>> = BTreeSet::new();
    let mut s = BTreeSet::new();
    for c in bounds.points() {
        if covered.contains(&c) {
            continue;
        }
        for p in &t_points {
            let sum: Vec<Coord> = p.iter().zip(&c).map(|(x, y)| x + y).collect();
            if bounds.contains(&sum) {
                covered.insert(sum);
            }
        }
        s.insert(c);
    }
    s
}

/// Owner of a 1-based digit position: `true` for `T`.
fn t_position(position: usize, t_even: bool) -> bool {
    position.is_multiple_of(2) == t_even
}

/// Both sides of a de Bruijn pair below `bound`, built as sums of digit blocks.
pub fn debruijn_sides(radices: &[Coord], infinite_tail: bool, t_even: bool, bound: Coord) -> (Vec<Coord>, Vec<Coord>) {
    let mut sides = [vec![0 as Coord], vec![0 as Coord]];
    let mut place: Coord = 1;
    let mut position = 1;
    while place < bound {
        let owner = if t_position(position, t_even) { 0 } else { 1 };
        let radix = match radices.get(position - 1) {
            Some(&n) => n,
            None if infinite_tail => 2,
            // The unbounded last digit.
            None => bound.div_ceil(place) + 1,
        };
        let mut grown = Vec::new();
        for &v in &sides[owner] {
            for d in 0..radix {
                let x = v + d * place;
                if x < bound {
                    grown.push(x);
                }
            }
        }
        sides[owner] = grown;
        if radices.get(position - 1).is_none() && !infinite_tail {
            break;
        }
        place = place.saturating_mul(radix);
        position += 1;
    }
    let [mut t, mut s] = sides;
    t.sort_unstable();
    s.sort_unstable();
    (t, s)
}

pub fn spec_sides(spec: &NPairSpec, bound: Coord) -> (Vec<Coord>, Vec<Coord>) {
    match spec {
        NPairSpec::ZeroT => (vec![0], (0..bound).collect()),
        NPairSpec::ZeroS => ((0..bound).collect(), vec![0]),
        NPairSpec::Radix {
            radices,
            infinite_tail,
            parity,
        } => debruijn_sides(radices, *infinite_tail, *parity == Parity::TEven, bound),
    }
}

/// The two-top pair of a root with children `(alpha_i, (C_i, D_i))` over the initial pair,
/// written out directly:
///
/// `T = C_1(x_1) C_2(x_2) T_0(x_1^{a_1 N_1} x_2^{a_2 N_2})`, likewise `S` with `D_i` and `S_0`,
/// and the staircase `L_{(a_1, a_2)}(x_1^{N_1}, x_2^{N_2})` joins `S` when `delta = 0`, `T` when 1.
pub fn two_top_pair(
    initial: &NPairSpec,
    delta: u64,
    alpha: [Coord; 2],
    phi: [&IntervalPair; 2],
    side: Coord,
) -> (BTreeSet<Vec<Coord>>, BTreeSet<Vec<Coord>>) {
    let n = [phi[0].size(), phi[1].size()];
    let step = [alpha[0] * n[0], alpha[1] * n[1]];
    let (t0, s0) = spec_sides(initial, side);
    let staircase: Vec<[Coord; 2]> = (0..side)
        .flat_map(|u| (0..side).map(move |v| [u, v]))
        .filter(|&[u, v]| u < alpha[0] || v < alpha[1])
        .map(|[u, v]| [u * n[0], v * n[1]])
        .filter(|p| p[0] < side && p[1] < side)
        .collect();
    let build = |base: &[Coord], c1: &[Coord], c2: &[Coord], with_l: bool| {
        let mut out = BTreeSet::new();
        for &k in base {
            for &u in c1 {
                for &v in c2 {
                    let p = [u + k * step[0], v + k * step[1]];
                    if with_l {
                        for l in &staircase {
                            let q = vec![p[0] + l[0], p[1] + l[1]];
                            if q[0] < side && q[1] < side {
                                out.insert(q);
                            }
                        }
                    } else if p[0] < side && p[1] < side {
                        out.insert(p.to_vec());
                    }
                }
            }
        }
        out
    };
    (
        build(&t0, phi[0].c(), phi[1].c(), delta == 1),
        build(&s0, phi[0].d(), phi[1].d(), delta == 0),
    )
}

/// Root with two tops `x1`, `x2` below it.
pub fn two_top_tree(initial: NPairSpec, delta: u64, alpha: [Coord; 2], phi: [IntervalPair; 2]) -> WeightedTree {
    let mut tree = WeightedTree::leaf(initial);
    let root = tree.root();
    tree.set_delta(root, delta);
    for (i, (a, p)) in alpha.into_iter().zip(phi).enumerate() {
        let id = tree.add_node(&format!("x{}", i + 1), "phi").unwrap();
        tree.set_alpha(id, a);
        tree.set_phi(id, p);
    }
    tree
}
