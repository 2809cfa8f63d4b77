//! Weighted trees, the pairs they generate, and their closed product form.

mod closed_form;
mod generate;
mod text;

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Coord;
use crate::one_dim::{IntervalPair, NPairSpec, Side};

pub use closed_form::{closed_form, evaluate_factorization, Atom, BaseTerm, BaseValues, Factorization, NodeFactor, Staircase};
pub use generate::{elimination_orders, generate, generate_in_order};
pub use text::{parse_forest_text, parse_tree, render_table, write_forest_text, write_tree};

pub type NodeId = usize;

pub const ROOT_NAME: &str = "phi";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Orientation of the staircase factor; required exactly on non-tops.
    pub delta: Option<u64>,
    /// Monomial weight on the edge from the parent; required off the root.
    pub alpha: Option<u64>,
    /// Interval pair grafted below the node; required off the root.
    pub phi: Option<IntervalPair>,
}

/// A rooted tree carrying an initial one-dimensional pair and per-node weights.
///
/// Tops are the nodes without children. Their declaration order is the axis order
/// of the generated pair. Equality compares names, links and weights in declaration
/// order, not arena positions.
#[derive(Clone, Debug)]
pub struct WeightedTree {
    nodes: Vec<Node>,
    order: Vec<NodeId>,
    initial: NPairSpec,
}

impl PartialEq for WeightedTree {
    fn eq(&self, other: &Self) -> bool {
        fn parent(t: &WeightedTree, id: NodeId) -> Option<&str> {
            t.nodes[id].parent.map(|p| t.nodes[p].name.as_str())
        }
        self.initial == other.initial
            && self.order.len() == other.order.len()
            && self.order.iter().zip(&other.order).all(|(&a, &b)| {
                let (x, y) = (&self.nodes[a], &other.nodes[b]);
                x.name == y.name
                    && parent(self, a) == parent(other, b)
                    && x.delta == y.delta
                    && x.alpha == y.alpha
                    && x.phi == y.phi
            })
    }
}

impl Eq for WeightedTree {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TilingSide {
    TFinite,
    SFinite,
    Neither,
}

impl WeightedTree {
    /// The one-node tree whose pair is `initial` itself.
    pub fn leaf(initial: NPairSpec) -> Self {
        Self::with_root(ROOT_NAME, initial)
    }

    pub fn with_root(name: &str, initial: NPairSpec) -> Self {
        WeightedTree {
            nodes: vec![Node {
                name: name.to_string(),
                parent: None,
                children: Vec::new(),
                delta: None,
                alpha: None,
                phi: None,
            }],
            order: vec![0],
            initial,
        }
    }

    /// Adds an unweighted node below an existing one. New nodes are declared last.
    pub fn add_node(&mut self, name: &str, parent: &str) -> Result<NodeId> {
        let at = self.order.len();
        self.insert_node(name, parent, at)
    }

    /// Adds a node and places it at `position` in the declaration order.
    pub(crate) fn insert_node(&mut self, name: &str, parent: &str, position: usize) -> Result<NodeId> {
        if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == '=') {
            return Err(Error::InvalidTree(format!("bad node name `{name}`")));
        }
        if self.find(name).is_some() {
            return Err(Error::InvalidTree(format!("duplicate node `{name}`")));
        }
        let parent = self
            .find(parent)
            .ok_or_else(|| Error::InvalidTree(format!("unknown parent `{parent}` of `{name}`")))?;
        let id = self.nodes.len();
        self.nodes.push(Node {
            name: name.to_string(),
            parent: Some(parent),
            children: Vec::new(),
            delta: None,
            alpha: None,
            phi: None,
        });
        self.nodes[parent].children.push(id);
        self.order.insert(position.min(self.order.len()), id);
        Ok(id)
    }

    pub fn set_delta(&mut self, node: NodeId, delta: u64) {
        self.nodes[node].delta = Some(delta);
    }

    pub fn set_alpha(&mut self, node: NodeId, alpha: u64) {
        self.nodes[node].alpha = Some(alpha);
    }

    pub fn set_phi(&mut self, node: NodeId, phi: IntervalPair) {
        self.nodes[node].phi = Some(phi);
    }

    pub fn set_initial(&mut self, initial: NPairSpec) {
        self.initial = initial;
    }

    /// Rearranges the declaration order so that tops appear as listed.
    pub fn reorder_tops(&mut self, tops: &[NodeId]) -> Result<()> {
        let mut current = self.tops();
        let mut wanted = tops.to_vec();
        current.sort_unstable();
        wanted.sort_unstable();
        if current != wanted {
            return Err(Error::InvalidArgument("top order must list every top once".into()));
        }
        let mut order: Vec<NodeId> = self.order.iter().copied().filter(|&v| !self.is_top(v)).collect();
        order.extend_from_slice(tops);
        self.order = order;
        Ok(())
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.nodes[id].name
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node ids in declaration order, root first.
    pub fn order(&self) -> &[NodeId] {
        &self.order
    }

    pub fn find(&self, name: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.name == name)
    }

    pub fn initial(&self) -> &NPairSpec {
        &self.initial
    }

    pub fn is_top(&self, id: NodeId) -> bool {
        self.nodes[id].children.is_empty()
    }

    /// Tops in axis order.
    pub fn tops(&self) -> Vec<NodeId> {
        self.order.iter().copied().filter(|&v| self.is_top(v)).collect()
    }

    pub fn dim(&self) -> usize {
        self.order.iter().filter(|&&v| self.is_top(v)).count()
    }

    /// Number of nodes that are not tops.
    pub fn norm(&self) -> usize {
        self.nodes.len() - self.dim()
    }

    pub fn depth(&self, mut id: NodeId) -> usize {
        let mut depth = 0;
        while let Some(p) = self.nodes[id].parent {
            depth += 1;
            id = p;
        }
        depth
    }

    /// Children in declaration order.
    pub fn children(&self, id: NodeId) -> Vec<NodeId> {
        let position = self.positions();
        let mut children = self.nodes[id].children.clone();
        children.sort_by_key(|c| position[c]);
        children
    }

    fn positions(&self) -> HashMap<NodeId, usize> {
        self.order.iter().enumerate().map(|(i, &v)| (v, i)).collect()
    }

    /// `alpha * size(phi)` of a non-root node.
    pub fn edge_weight(&self, id: NodeId) -> Result<Coord> {
        let node = &self.nodes[id];
        let alpha = node.alpha.ok_or_else(|| missing(&node.name, "alpha"))?;
        let size = node.phi.as_ref().ok_or_else(|| missing(&node.name, "phi"))?.size();
        alpha.checked_mul(size).ok_or(Error::Overflow("alpha * N"))
    }

    /// Every weight violation, empty when the tree is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        for &id in &self.order {
            let node = &self.nodes[id];
            let name = &node.name;
            let top = self.is_top(id);
            match (top, node.delta) {
                (false, None) => violations.push(format!("{name}: missing delta on a non-top node")),
                (true, Some(_)) => violations.push(format!("{name}: delta given on a top")),
                (false, Some(d)) if d > 1 => violations.push(format!("{name}: delta must be 0 or 1, found {d}")),
                _ => {}
            }
            if id == self.root() {
                if node.alpha.is_some() {
                    violations.push(format!("{name}: the root carries no alpha"));
                }
                if node.phi.is_some() {
                    violations.push(format!("{name}: the root carries no interval pair"));
                }
                continue;
            }
            match node.alpha {
                None => violations.push(format!("{name}: missing alpha")),
                Some(0) => violations.push(format!("{name}: alpha must be positive")),
                _ => {}
            }
            if node.phi.is_none() {
                violations.push(format!("{name}: missing interval pair"));
            }
        }
        let root = &self.nodes[self.root()];
        match (&self.initial, root.delta) {
            (NPairSpec::ZeroT, Some(d)) if d != 1 => violations.push(format!(
                "{}: delta at the root must be 1 when the initial T-side is {{0}}",
                root.name
            )),
            (NPairSpec::ZeroS, Some(d)) if d != 0 => violations.push(format!(
                "{}: delta at the root must be 0 when the initial S-side is {{0}}",
                root.name
            )),
            _ => {}
        }
        violations
    }

    pub fn check(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidTree(violations.join("; ")))
        }
    }

    /// Product of `alpha * size(phi)` over the path strictly below `from` down to `top`.
    ///
    /// 1 when `from == top`, 0 when `top` is not below `from`.
    pub fn mu(&self, from: NodeId, top: NodeId) -> Result<Coord> {
        let mut product: Coord = 1;
        let mut at = top;
        while at != from {
            let Some(parent) = self.nodes[at].parent else {
                return Ok(0);
            };
            product = product
                .checked_mul(self.edge_weight(at)?)
                .ok_or(Error::Overflow("mu"))?;
            at = parent;
        }
        Ok(product)
    }

    /// `mu(from, x)` for every top `x` in axis order.
    pub fn mu_vec(&self, from: NodeId) -> Result<Vec<Coord>> {
        self.tops().into_iter().map(|x| self.mu(from, x)).collect()
    }

    /// Largest `alpha * N` product along any root-to-top path.
    pub fn max_path_weight(&self) -> Result<Coord> {
        self.mu_vec(self.root()).map(|v| v.into_iter().max().unwrap_or(1))
    }

    /// Which side of the generated pair is finite.
    pub fn is_tiling_side(&self) -> TilingSide {
        let deltas: Vec<u64> = self
            .order
            .iter()
            .filter(|&&v| !self.is_top(v))
            .filter_map(|&v| self.nodes[v].delta)
            .collect();
        if self.initial.is_finite(Side::T) && deltas.iter().all(|&d| d == 0) {
            TilingSide::TFinite
        } else if self.initial.is_finite(Side::S) && deltas.iter().all(|&d| d == 1) {
            TilingSide::SFinite
        } else {
            TilingSide::Neither
        }
    }

    /// Every top carries the trivial interval pair. For the one-node tree this asks
    /// that one side of the initial pair be `{0}`.
    pub fn is_class_f0(&self) -> bool {
        if self.norm() == 0 {
            return matches!(self.initial, NPairSpec::ZeroT | NPairSpec::ZeroS);
        }
        self.tops()
            .into_iter()
            .all(|x| self.nodes[x].phi.as_ref().is_some_and(IntervalPair::is_trivial))
    }

    /// Renames a node; names must stay unique.
    pub fn rename(&mut self, id: NodeId, name: &str) -> Result<()> {
        if let Some(other) = self.find(name) {
            if other != id {
                return Err(Error::InvalidTree(format!("duplicate node `{name}`")));
            }
        }
        self.nodes[id].name = name.to_string();
        Ok(())
    }

    /// A name not used in the tree, built from `prefix` and a counter.
    pub fn fresh_name(&self, prefix: &str) -> String {
        (1..)
            .map(|k| format!("{prefix}{k}"))
            .find(|n| self.find(n).is_none())
            .expect("unbounded counter")
    }
}

fn missing(name: &str, what: &str) -> Error {
    Error::InvalidTree(format!("{name}: missing {what}"))
}


#[cfg(test)]
mod tests {
    use super::fixtures::branch_tree;
    use super::*;

    #[test]
    fn branch_tree_is_valid() {
        let tree = branch_tree();
        assert!(tree.validate().is_empty(), "{:?}", tree.validate());
        assert_eq!(tree.dim(), 4);
        assert_eq!(tree.norm(), 2);
    }

    #[test]
    fn mu_of_branch_tree() {
        let tree = branch_tree();
        assert_eq!(tree.mu_vec(tree.root()).unwrap(), vec![8, 8, 8, 12]);
        let x1 = tree.find("x1").unwrap();
        let x2 = tree.find("x2").unwrap();
        assert_eq!(tree.mu(x1, x1).unwrap(), 1);
        assert_eq!(tree.mu(x1, x2).unwrap(), 0);
        let y1 = tree.find("y1").unwrap();
        assert_eq!(tree.mu_vec(y1).unwrap(), vec![1, 1, 1, 0]);
    }

    #[test]
    fn leaf_is_valid() {
        for spec in [NPairSpec::ZeroT, NPairSpec::ZeroS, "radices 3 tail=yes parity=T-odd".parse().unwrap()] {
            assert!(WeightedTree::leaf(spec).validate().is_empty());
        }
    }

    #[test]
    fn root_coupling_enforced() {
        let mut tree = WeightedTree::leaf(NPairSpec::ZeroT);
        for name in ["a", "b"] {
            let id = tree.add_node(name, "phi").unwrap();
            tree.set_alpha(id, 1);
            tree.set_phi(id, IntervalPair::trivial());
        }
        tree.set_delta(0, 0);
        let violations = tree.validate();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("delta at the root must be 1"));
        tree.set_delta(0, 1);
        assert!(tree.validate().is_empty());
    }

    #[test]
    fn missing_weights_reported() {
        let mut tree = WeightedTree::leaf(NPairSpec::ZeroS);
        tree.add_node("a", "phi").unwrap();
        let v = tree.validate();
        assert_eq!(v.len(), 3, "{v:?}");
        tree.set_delta(0, 2);
        assert!(tree.validate().iter().any(|m| m.contains("0 or 1")));
    }

    #[test]
    fn tiling_side_and_class() {
        let tree = branch_tree();
        assert_eq!(tree.is_tiling_side(), TilingSide::TFinite);
        assert!(!tree.is_class_f0());
        let leaf = WeightedTree::leaf("radices 2 tail=yes parity=T-even".parse().unwrap());
        assert_eq!(leaf.is_tiling_side(), TilingSide::Neither);
    }

    #[test]
    fn structural_errors() {
        let mut tree = WeightedTree::leaf(NPairSpec::ZeroS);
        assert!(tree.add_node("a", "nope").is_err());
        tree.add_node("a", "phi").unwrap();
        assert!(tree.add_node("a", "phi").is_err());
        assert!(tree.add_node("b c", "phi").is_err());
    }
}
