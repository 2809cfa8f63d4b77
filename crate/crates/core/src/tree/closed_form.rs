use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{l_set, BoxSet, Coord, LatticeBox, SetPair};
use crate::one_dim::{NPairSpec, Side};

use super::{NodeId, WeightedTree};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseValues {
    Finite(Vec<u64>),
    /// An infinite side of the initial pair.
    Initial(Side),
}

/// `A(x^w)`: the set `{k w : k in A}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BaseTerm {
    pub values: BaseValues,
    pub exponent: Vec<Coord>,
}

/// `L_b(x^{w_1}, ..., x^{w_m})`: the set `{ sum l_i w_i : l in L_b }`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Staircase {
    pub b: Vec<Coord>,
    pub monomials: Vec<Vec<Coord>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Atom {
    pub base: BaseTerm,
    pub staircase: Option<Staircase>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeFactor {
    pub node: String,
    pub p: Atom,
    pub q: Atom,
}

/// `T = sum of the P atoms` and `S = sum of the Q atoms`, both direct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub initial: NPairSpec,
    pub variables: Vec<String>,
    pub factors: Vec<NodeFactor>,
}

fn initial_base(initial: &NPairSpec, side: Side, exponent: Vec<Coord>) -> BaseTerm {
    let values = match initial.finite_values(side) {
        Some(v) => BaseValues::Finite(v),
        None => BaseValues::Initial(side),
    };
    BaseTerm { values, exponent }
}

fn scaled(v: &[Coord], factor: Coord) -> Result<Vec<Coord>> {
    v.iter()
        .map(|&x| x.checked_mul(factor).ok_or(Error::Overflow("staircase monomial")))
        .collect()
}

/// Per-node atoms, deepest nodes first.
pub fn closed_form(tree: &WeightedTree) -> Result<Factorization> {
    tree.check()?;
    let tops = tree.tops();
    let variables = tops.iter().map(|&x| tree.name(x).to_string()).collect();
    let mut nodes: Vec<NodeId> = tree.order().to_vec();
    nodes.sort_by_key(|&v| std::cmp::Reverse(tree.depth(v)));

    let mut factors = Vec::with_capacity(nodes.len());
    for v in nodes {
        let node = tree.node(v);
        let exponent = tree.mu_vec(v)?;
        let (p, q) = if tree.norm() == 0 {
            (
                Atom {
                    base: initial_base(tree.initial(), Side::T, exponent.clone()),
                    staircase: None,
                },
                Atom {
                    base: initial_base(tree.initial(), Side::S, exponent),
                    staircase: None,
                },
            )
        } else {
            let (c, d) = match &node.phi {
                Some(phi) => (
                    BaseTerm {
                        values: BaseValues::Finite(phi.c().to_vec()),
                        exponent: exponent.clone(),
                    },
                    BaseTerm {
                        values: BaseValues::Finite(phi.d().to_vec()),
                        exponent,
                    },
                ),
                None => (
                    initial_base(tree.initial(), Side::T, exponent.clone()),
                    initial_base(tree.initial(), Side::S, exponent),
                ),
            };
            let staircase = if tree.is_top(v) {
                None
            } else {
                let children = tree.children(v);
                let mut b = Vec::with_capacity(children.len());
                let mut monomials = Vec::with_capacity(children.len());
                for z in children {
                    let child = tree.node(z);
                    b.push(child.alpha.expect("validated"));
                    let size = child.phi.as_ref().expect("validated").size();
                    monomials.push(scaled(&tree.mu_vec(z)?, size)?);
                }
                Some(Staircase { b, monomials })
            };
            let on_t = node.delta == Some(1);
            let (tp, ts) = if on_t { (staircase, None) } else { (None, staircase) };
            (Atom { base: c, staircase: tp }, Atom { base: d, staircase: ts })
        };
        factors.push(NodeFactor {
            node: node.name.clone(),
            p,
            q,
        });
    }
    Ok(Factorization {
        initial: tree.initial().clone(),
        variables,
        factors,
    })
}

impl BaseTerm {
    fn evaluate(&self, initial: &NPairSpec, bounds: &LatticeBox) -> Result<BoxSet> {
        let depth = reach(&self.exponent, bounds)?;
        let values: Vec<u64> = match &self.values {
            BaseValues::Finite(v) => v.iter().copied().filter(|&k| k < depth).collect(),
            BaseValues::Initial(side) => {
                let pair = initial.evaluate(depth)?;
                match side {
                    Side::T => pair.t.values().to_vec(),
                    Side::S => pair.s.values().to_vec(),
                }
            }
        };
        let mut indices = Vec::with_capacity(values.len());
        let mut point = vec![0; bounds.dim()];
        'values: for k in values {
            for (j, &w) in self.exponent.iter().enumerate() {
                point[j] = k * w;
                if point[j] >= bounds.bound(j) {
                    continue 'values;
                }
            }
            indices.push(bounds.encode(&point));
        }
        BoxSet::from_distinct_indices(bounds.clone(), indices)
    }
}

/// Smallest `K` with `K w` outside the box on some axis: multiples below `K` may land inside.
fn reach(w: &[Coord], bounds: &LatticeBox) -> Result<Coord> {
    bounds.expect_dim(w.len())?;
    w.iter()
        .zip(bounds.bounds())
        .filter(|(&wj, _)| wj > 0)
        .map(|(&wj, &m)| m.div_ceil(wj))
        .min()
        .ok_or_else(|| Error::InvalidArgument("zero exponent vector".into()))
}

impl Staircase {
    fn evaluate(&self, bounds: &LatticeBox) -> Result<BoxSet> {
        let ranges = self
            .monomials
            .iter()
            .map(|w| reach(w, bounds))
            .collect::<Result<Vec<_>>>()?;
        let steps = l_set(&self.b, &LatticeBox::new(ranges)?)?;
        let mut indices = Vec::with_capacity(steps.len());
        let mut point = vec![0; bounds.dim()];
        'steps: for l in steps.iter() {
            point.iter_mut().for_each(|p| *p = 0);
            for (&li, w) in l.iter().zip(&self.monomials) {
                for (j, &wj) in w.iter().enumerate() {
                    point[j] += li * wj;
                }
            }
            if !bounds.contains(&point) {
                continue 'steps;
            }
            indices.push(bounds.encode(&point));
        }
        BoxSet::from_distinct_indices(bounds.clone(), indices)
    }
}

impl Atom {
    pub fn evaluate(&self, initial: &NPairSpec, bounds: &LatticeBox) -> Result<BoxSet> {
        let base = self.base.evaluate(initial, bounds)?;
        match &self.staircase {
            None => Ok(base),
            Some(l) => base.minkowski_sum(&l.evaluate(bounds)?, bounds),
        }
    }
}

/// Expands both products on `bounds`, failing if any partial product repeats a point.
pub fn evaluate_factorization(f: &Factorization, bounds: &LatticeBox) -> Result<SetPair> {
    bounds.expect_dim(f.variables.len())?;
    let mut t = BoxSet::origin(bounds.clone());
    let mut s = BoxSet::origin(bounds.clone());
    for factor in &f.factors {
        t = t.minkowski_sum(&factor.p.evaluate(&f.initial, bounds)?, bounds)?;
        s = s.minkowski_sum(&factor.q.evaluate(&f.initial, bounds)?, bounds)?;
    }
    SetPair::new(t, s)
}

struct Monomial<'a> {
    names: &'a [String],
    exponent: Vec<Coord>,
}

impl fmt::Display for Monomial<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, &e) in self.names.iter().zip(&self.exponent) {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{name}^{e}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

impl Factorization {
    fn monomial<'a>(&'a self, w: &[Coord], k: Coord) -> Monomial<'a> {
        Monomial {
            names: &self.variables,
            exponent: w.iter().map(|&x| x * k).collect(),
        }
    }

    fn render_base(&self, base: &BaseTerm) -> (String, usize) {
        match &base.values {
            BaseValues::Finite(values) => {
                let terms: Vec<String> = values.iter().map(|&k| self.monomial(&base.exponent, k).to_string()).collect();
                (terms.join(" + "), terms.len())
            }
            BaseValues::Initial(side) => {
                let label = if *side == Side::T { "T0" } else { "S0" };
                (format!("{label}({})", self.monomial(&base.exponent, 1)), 1)
            }
        }
    }

    pub fn render_atom(&self, atom: &Atom) -> String {
        let (base, terms) = self.render_base(&atom.base);
        let Some(l) = &atom.staircase else {
            return base;
        };
        let b = l.b.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let args = l
            .monomials
            .iter()
            .map(|w| self.monomial(w, 1).to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let stair = format!("L[{b}]({args})");
        match (base.as_str(), terms) {
            ("1", _) => stair,
            (_, 1) => format!("{base} * {stair}"),
            _ => format!("({base}) * {stair}"),
        }
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for factor in &self.factors {
            writeln!(f, "P[{}] = {}", factor.node, self.render_atom(&factor.p))?;
        }
        for factor in &self.factors {
            writeln!(f, "Q[{}] = {}", factor.node, self.render_atom(&factor.q))?;
        }
        Ok(())
    }
}
