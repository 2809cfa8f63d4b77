use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{BoxSet, Coord, SetPair};

use super::npair::{fit_npair, NPairFit, NPairSpec, Parity, Side};
use super::radix::{check_radices, radix_capacity};

/// A pair `(C, D)` with `C ⊕ D = {0, ..., N-1}`. Size 1 is the trivial pair `({0}, {0})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntervalPair {
    c: Vec<u64>,
    d: Vec<u64>,
    size: u64,
}

impl IntervalPair {
    pub fn new(mut c: Vec<u64>, mut d: Vec<u64>) -> Result<Self> {
        c.sort_unstable();
        c.dedup();
        d.sort_unstable();
        d.dedup();
        let bad = |msg: String| Error::NotIntervalPair(msg);
        if c.first() != Some(&0) || d.first() != Some(&0) {
            return Err(bad("both sides must contain 0".into()));
        }
        let size = (c.len() as u64)
            .checked_mul(d.len() as u64)
            .ok_or(Error::Overflow("interval pair size"))?;
        let mut hits = vec![false; size as usize];
        for &x in &c {
            for &y in &d {
                let sum = x + y;
                if sum >= size || std::mem::replace(&mut hits[sum as usize], true) {
                    return Err(bad(format!(
                        "C={} and D={} do not tile [0,{size})",
                        braces(&c),
                        braces(&d)
                    )));
                }
            }
        }
        Ok(IntervalPair { c, d, size })
    }

    pub fn trivial() -> Self {
        IntervalPair {
            c: vec![0],
            d: vec![0],
            size: 1,
        }
    }

    /// The finite pair of a radix list: `C` takes the positions `T` owns under `parity`.
    pub fn from_radices(radices: &[u64], parity: Parity) -> Result<Self> {
        check_radices(radices)?;
        radix_capacity(radices).ok_or(Error::Overflow("interval pair size"))?;
        let (mut c, mut d) = (vec![0u64], vec![0u64]);
        let mut place = 1u64;
        for (k, &n) in radices.iter().enumerate() {
            let side = if parity.t_owns(k + 1) { &mut c } else { &mut d };
            *side = (0..n)
                .flat_map(|digit| side.iter().map(move |&v| v + digit * place))
                .collect();
            place *= n;
        }
        Self::new(c, d)
    }

    pub fn c(&self) -> &[u64] {
        &self.c
    }

    pub fn d(&self) -> &[u64] {
        &self.d
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn is_trivial(&self) -> bool {
        self.size == 1
    }

    pub fn side(&self, side: Side) -> &[u64] {
        match side {
            Side::T => &self.c,
            Side::S => &self.d,
        }
    }

    pub fn swap(&self) -> Self {
        IntervalPair {
            c: self.d.clone(),
            d: self.c.clone(),
            size: self.size,
        }
    }

    /// `(C + N C_inner, D + N D_inner)` where `N` is the size of `self`.
    pub fn graft(&self, inner: &IntervalPair) -> Result<Self> {
        let n = self.size;
        self.size
            .checked_mul(inner.size)
            .ok_or(Error::Overflow("grafted interval pair"))?;
        let spread = |outer: &[u64], inner: &[u64]| {
            let mut v: Vec<u64> = inner
                .iter()
                .flat_map(|&i| outer.iter().map(move |&o| o + n * i))
                .collect();
            v.sort_unstable();
            v
        };
        Ok(IntervalPair {
            c: spread(&self.c, &inner.c),
            d: spread(&self.d, &inner.d),
            size: self.size * inner.size,
        })
    }
}

fn braces(values: &[u64]) -> String {
    let inner = values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
    format!("{{{inner}}}")
}

impl fmt::Display for IntervalPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C={} D={}", braces(&self.c), braces(&self.d))
    }
}

fn parse_braces(text: &str) -> Result<Vec<u64>> {
    let inner = text
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| Error::parse(0, format!("expected `{{...}}`, found `{text}`")))?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(|w| w.parse().map_err(|_| Error::parse(0, format!("bad element `{w}`"))))
        .collect()
}

/// Accepts `C={0,2} D={0,1}` or `radices 2,2 parity=T-even`.
impl FromStr for IntervalPair {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let words: Vec<&str> = text.split_whitespace().collect();
        let pair = match words.as_slice() {
            [c, d] if c.starts_with("C=") && d.starts_with("D=") => {
                Self::new(parse_braces(&c[2..])?, parse_braces(&d[2..])?)
            }
            ["radices", list, parity] => {
                let radices = list
                    .split(',')
                    .map(|r| r.parse().map_err(|_| Error::parse(0, format!("bad radix `{r}`"))))
                    .collect::<Result<Vec<u64>>>()?;
                let parity = match *parity {
                    "parity=T-even" => Parity::TEven,
                    "parity=T-odd" => Parity::TOdd,
                    other => return Err(Error::parse(0, format!("bad parity `{other}`"))),
                };
                Self::from_radices(&radices, parity)
            }
            _ => return Err(Error::parse(0, format!("cannot parse interval pair `{text}`"))),
        };
        pair.map_err(|e| Error::parse(0, e.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FactorSide {
    C,
    D,
}

/// One level of the interval factorization: the `side` absorbs `{0, ..., p-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FactorStep {
    pub p: u64,
    pub side: FactorSide,
}

/// Repeatedly writes one side as `{0..p-1} ⊕ p X` and the other as `p Y`.
pub fn factor_interval_pair(pair: &IntervalPair) -> Vec<FactorStep> {
    let (mut c, mut d) = (pair.c.clone(), pair.d.clone());
    let mut size = pair.size;
    let mut steps = Vec::new();
    while size > 1 {
        let (side, unit, other) = if c.get(1) == Some(&1) {
            (FactorSide::C, &mut c, &mut d)
        } else {
            (FactorSide::D, &mut d, &mut c)
        };
        // A valid pair keeps 1 on exactly one side; `other` is empty past 0 at the top level.
        let p = other.get(1).copied().unwrap_or(size);
        unit.retain(|&u| u % p == 0);
        unit.iter_mut().for_each(|u| *u /= p);
        other.iter_mut().for_each(|v| *v /= p);
        size /= p;
        steps.push(FactorStep { p, side });
    }
    steps
}

/// Inverse of [`factor_interval_pair`].
pub fn expand_factor_chain(steps: &[FactorStep]) -> Result<IntervalPair> {
    let mut pair = IntervalPair::trivial();
    for step in steps.iter().rev() {
        if step.p < 2 {
            return Err(Error::InvalidRadix(step.p));
        }
        let block = IntervalPair::from_radices(
            &[step.p],
            match step.side {
                FactorSide::C => Parity::TOdd,
                FactorSide::D => Parity::TEven,
            },
        )?;
        pair = block.graft(&pair)?;
    }
    Ok(pair)
}

/// `T ∩ [0, N)`, `S ∩ [0, N)` with the residues `T = C ⊕ N A`, `S = D ⊕ N B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLevel {
    pub pair: IntervalPair,
    pub t_residue: BoxSet,
    pub s_residue: BoxSet,
}

/// A side of a one-dimensional pair that is finite on the observed window.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteSection {
    pub side: Side,
    /// `C` is the `T`-side and `D` the `S`-side, truncated to `[0, N)`.
    pub pair: IntervalPair,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalChain {
    pub fit: NPairFit,
    pub levels: Vec<ChainLevel>,
    pub finite: Option<FiniteSection>,
}

/// Interval pairs `(C_k, D_k)` approximating a one-dimensional pair from below.
pub fn interval_chain(pair: &SetPair) -> Result<IntervalChain> {
    let fit = fit_npair(pair)?;
    let bound = pair.bounds().bound(0);
    let mut sizes = Vec::new();
    if let NPairSpec::Radix { radices, .. } = &fit.spec {
        let mut product = 1u64;
        for &n in radices {
            product *= n;
            if product <= bound {
                sizes.push(product);
            }
        }
        if fit.terminal_window >= 2 && bound.is_multiple_of(product) {
            sizes.push(bound);
        }
    }

    let mut levels = Vec::with_capacity(sizes.len());
    for &n in &sizes {
        let below = |set: &BoxSet| set.values().iter().copied().take_while(|&v| v < n).collect::<Vec<_>>();
        let level = IntervalPair::new(below(&pair.t), below(&pair.s))?;
        let residue = |set: &BoxSet| {
            BoxSet::line(
                bound.div_ceil(n),
                set.values().iter().filter(|&&v| v % n == 0).map(|&v| v / n),
            )
        };
        let t_residue = residue(&pair.t)?;
        let s_residue = residue(&pair.s)?;
        for (part, residue, set) in [(level.c(), &t_residue, &pair.t), (level.d(), &s_residue, &pair.s)] {
            if !expands_to(part, n, residue.values(), set.values(), bound) {
                return Err(Error::Structure(format!(
                    "level {n} does not split the pair into an interval part and a residue"
                )));
            }
        }
        levels.push(ChainLevel {
            pair: level,
            t_residue,
            s_residue,
        });
    }

    let finite = match fit.spec.finite_side() {
        Some(side) if fit.terminal_window >= 2 || matches!(fit.spec, NPairSpec::ZeroT | NPairSpec::ZeroS) => {
            let n = match &fit.spec {
                NPairSpec::Radix { radices, .. } => radix_capacity(radices).unwrap_or(u64::MAX),
                _ => 1,
            };
            let below = |set: &BoxSet| set.values().iter().copied().take_while(|&v| v < n).collect::<Vec<_>>();
            Some(FiniteSection {
                side,
                pair: IntervalPair::new(below(&pair.t), below(&pair.s))?,
            })
        }
        _ => None,
    };

    Ok(IntervalChain {
        fit,
        levels,
        finite,
    })
}

fn expands_to(part: &[u64], n: Coord, residue: &[u64], target: &[u64], bound: Coord) -> bool {
    let mut expanded: Vec<u64> = residue
        .iter()
        .flat_map(|&r| part.iter().map(move |&c| c + n * r))
        .filter(|&v| v < bound)
        .collect();
    expanded.sort_unstable();
    expanded == target
}
