//! Seeded random weighted trees for property tests and round-trip batches.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::extension::{is_illegal, tree_extend, tree_extend_with_names, ExtensionStep, PairKind};
use crate::lattice::{Coord, LatticeBox};
use crate::one_dim::{IntervalPair, NPairSpec, Parity};
use crate::tree::WeightedTree;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusParams {
    pub max_tops: usize,
    pub max_alpha: Coord,
    /// Largest interval-pair size on any node.
    pub max_interval: Coord,
    /// Longest radix prefix of the initial pair.
    pub max_prefix: usize,
    pub max_radix: Coord,
    /// Largest `mu(root, x)` allowed; trees above it are redrawn.
    pub max_weight: Coord,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            max_tops: 4,
            max_alpha: 4,
            max_interval: 6,
            max_prefix: 3,
            max_radix: 3,
            max_weight: 64,
        }
    }
}

/// Box side used for a pair of the given dimension in corpus runs.
pub fn corpus_box(dim: usize) -> Result<LatticeBox> {
    let side = match dim {
        0..=2 => 48,
        3 => 32,
        4 => 20,
        5 => 12,
        6 => 8,
        7 => 6,
        _ => 5,
    };
    LatticeBox::cube(dim, side)
}

pub struct CorpusGenerator {
    rng: ChaCha8Rng,
    params: CorpusParams,
}

impl CorpusGenerator {
    pub fn new(seed: u64, params: CorpusParams) -> Self {
        CorpusGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            params,
        }
    }

    pub fn with_seed(seed: u64) -> Self {
        Self::new(seed, CorpusParams::default())
    }

    pub fn params(&self) -> &CorpusParams {
        &self.params
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A random ordered factorisation of `n` into factors of at least 2.
    fn factorisation(&mut self, mut n: Coord) -> Vec<Coord> {
        let mut out = Vec::new();
        while n > 1 {
            let divisors: Vec<Coord> = (2..=n).filter(|d| n.is_multiple_of(*d)).collect();
            let d = *divisors.choose(&mut self.rng).expect("n > 1 has a divisor");
            out.push(d);
            n /= d;
        }
        out
    }

    /// An interval pair of size at most `max_size`, uniform over sizes.
    pub fn interval_pair(&mut self, max_size: Coord) -> IntervalPair {
        let size = self.rng.gen_range(1..=max_size.max(1));
        let radices = self.factorisation(size);
        let parity = if self.rng.gen() { Parity::TEven } else { Parity::TOdd };
        IntervalPair::from_radices(&radices, parity).expect("radices are at least 2")
    }

    /// A one-dimensional pair: occasionally trivial, otherwise a short radix prefix.
    pub fn npair_spec(&mut self) -> NPairSpec {
        match self.rng.gen_range(0..6) {
            0 => NPairSpec::ZeroT,
            1 => NPairSpec::ZeroS,
            _ => {
                let len = self.rng.gen_range(0..=self.params.max_prefix);
                let radices: Vec<Coord> = (0..len).map(|_| self.rng.gen_range(2..=self.params.max_radix)).collect();
                let tail = radices.is_empty() || self.rng.gen();
                let parity = if self.rng.gen() { Parity::TEven } else { Parity::TOdd };
                NPairSpec::radix(radices, tail, parity).expect("valid radices")
            }
        }
    }

    /// Radix prefixes `n_1..n_k` with `k` in `1..=max_len`.
    pub fn radix_prefix(&mut self, max_len: usize) -> Vec<Coord> {
        let len = self.rng.gen_range(1..=max_len.max(1));
        (0..len).map(|_| self.rng.gen_range(2..=self.params.max_radix)).collect()
    }

    /// A valid tree grown by legal extension steps from a random initial pair.
    pub fn tree(&mut self) -> WeightedTree {
        loop {
            let target = self.rng.gen_range(1..=self.params.max_tops);
            if let Some(tree) = self.grow(target) {
                return tree;
            }
        }
    }

    /// Like [`CorpusGenerator::tree`] with at least `min_tops` tops.
    pub fn tree_with_tops(&mut self, min_tops: usize) -> WeightedTree {
        loop {
            let target = self.rng.gen_range(min_tops.min(self.params.max_tops)..=self.params.max_tops);
            if let Some(tree) = self.grow(target) {
                return tree;
            }
        }
    }

    fn grow(&mut self, target: usize) -> Option<WeightedTree> {
        let mut tree = WeightedTree::leaf(self.npair_spec());
        while tree.dim() < target {
            if tree.norm() > 0 && self.rng.gen_bool(0.4) {
                tree = self.graft_random_top(&tree)?;
            }
            let axis = self.rng.gen_range(0..tree.dim());
            let m = self.rng.gen_range(2..=3.min(target - tree.dim() + 1));
            let a: Vec<Coord> = (0..m).map(|_| self.rng.gen_range(1..=self.params.max_alpha)).collect();
            let mut delta = self.rng.gen_range(0..=1);
            let mut step = ExtensionStep::Second { axis, delta, a: a.clone() };
            if tree.norm() == 0 && is_illegal(PairKind::of_spec(tree.initial()), &step) {
                delta = 1 - delta;
                step = ExtensionStep::Second { axis, delta, a };
            }
            tree = tree_extend(&tree, &step).ok()?;
        }
        if tree.norm() > 0 {
            for _ in 0..tree.dim() {
                if self.rng.gen_bool(0.5) {
                    tree = self.graft_random_top(&tree)?;
                }
            }
        }
        (tree.max_path_weight().ok()? <= self.params.max_weight).then_some(tree)
    }

    fn graft_random_top(&mut self, tree: &WeightedTree) -> Option<WeightedTree> {
        let tops = tree.tops();
        let axis = self.rng.gen_range(0..tops.len());
        let current = tree.node(tops[axis]).phi.as_ref()?.size();
        let room = self.params.max_interval / current;
        if room < 2 {
            return Some(tree.clone());
        }
        let pair = self.interval_pair(room);
        tree_extend_with_names(tree, &ExtensionStep::First { axis, pair }, &[]).ok()
    }

    /// A valid tree with exactly `nodes` nodes, built node by node.
    ///
    /// Inner nodes may have a single child here, which extension steps never produce.
    pub fn tree_with_nodes(&mut self, nodes: usize) -> Result<WeightedTree> {
        let initial = self.npair_spec();
        let mut tree = WeightedTree::leaf(initial.clone());
        let mut weight = vec![1 as Coord; 1];
        let mut counter = 0;
        while tree.len() < nodes {
            let tops = tree.tops();
            let &v = tops.choose(&mut self.rng).expect("a tree has a top");
            let remaining = nodes - tree.len();
            let widest = (self.params.max_tops + 1).saturating_sub(tops.len()).clamp(1, 3).min(remaining);
            let k = self.rng.gen_range(1..=widest);
            let parent = tree.name(v).to_string();
            for _ in 0..k {
                let cap = self.params.max_weight / weight[v];
                let alpha = self.rng.gen_range(1..=self.params.max_alpha.min(cap).max(1));
                let phi = self.interval_pair((cap / alpha).clamp(1, self.params.max_interval));
                counter += 1;
                let id = tree.add_node(&format!("v{counter}"), &parent)?;
                tree.set_alpha(id, alpha);
                weight.push(weight[v] * alpha * phi.size());
                tree.set_phi(id, phi);
            }
            let delta = match (&initial, v == tree.root()) {
                (NPairSpec::ZeroT, true) => 1,
                (NPairSpec::ZeroS, true) => 0,
                _ => self.rng.gen_range(0..=1),
            };
            tree.set_delta(v, delta);
        }
        tree.check()?;
        Ok(tree)
    }
}
