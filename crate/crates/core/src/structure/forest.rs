use crate::error::{Error, Result};
use crate::lattice::{BoxSet, LatticeBox, SetPair};
use crate::tree::{generate, parse_forest_text, write_forest_text, WeightedTree};

/// A tree placed on some axes of a larger pair; top `i` drives axis `axes[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestComponent {
    pub axes: Vec<usize>,
    pub tree: WeightedTree,
}

/// Trees over a partition of the axes; the pair they generate is the product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    pub components: Vec<ForestComponent>,
}

impl Forest {
    pub fn single(tree: WeightedTree) -> Self {
        Forest {
            components: vec![ForestComponent {
                axes: (0..tree.dim()).collect(),
                tree,
            }],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.iter().map(|c| c.axes.len()).sum()
    }

    /// The axes must partition `0..dim` and every tree must validate.
    pub fn check(&self) -> Result<()> {
        let n = self.dim();
        let mut seen = vec![false; n];
        for c in &self.components {
            c.tree.check()?;
            if c.tree.dim() != c.axes.len() {
                return Err(Error::InvalidTree(format!(
                    "component on axes {:?} has {} tops",
                    c.axes,
                    c.tree.dim()
                )));
            }
            for &a in &c.axes {
                if a >= n || std::mem::replace(&mut seen[a], true) {
                    return Err(Error::InvalidTree(format!("axis {a} is not covered exactly once")));
                }
            }
        }
        Ok(())
    }

    pub fn generate(&self, bounds: &LatticeBox) -> Result<SetPair> {
        self.check()?;
        bounds.expect_dim(self.dim())?;
        let mut t = BoxSet::origin(bounds.clone());
        let mut s = BoxSet::origin(bounds.clone());
        for c in &self.components {
            let part = generate(&c.tree, &bounds.select(&c.axes)?)?;
            t = t.minkowski_sum(&part.t.embed(&c.axes, bounds)?, bounds)?;
            s = s.minkowski_sum(&part.s.embed(&c.axes, bounds)?, bounds)?;
        }
        SetPair::new(t, s)
    }

    pub fn to_text(&self) -> String {
        let parts: Vec<(Vec<usize>, WeightedTree)> =
            self.components.iter().map(|c| (c.axes.clone(), c.tree.clone())).collect();
        write_forest_text(&parts)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let components = parse_forest_text(text)?
            .into_iter()
            .map(|(axes, tree)| ForestComponent { axes, tree })
            .collect();
        let forest = Forest { components };
        forest.check()?;
        Ok(forest)
    }
}
