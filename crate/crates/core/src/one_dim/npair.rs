use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{BoxSet, Coord, LatticeBox, SetPair};

use super::interval::{factor_interval_pair, FactorSide, IntervalPair};
use super::radix::check_radices;

/// Which side of the pair takes the digits at even positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Parity {
    /// `T` owns positions 2, 4, ...; `S` owns 1, 3, ... and so contains 1.
    TEven,
    TOdd,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::TEven => Parity::TOdd,
            Parity::TOdd => Parity::TEven,
        }
    }

    /// Whether the 1-based digit position belongs to `T`.
    pub fn t_owns(self, position: usize) -> bool {
        position.is_multiple_of(2) == (self == Parity::TEven)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    T,
    S,
}

impl Side {
    pub fn other(self) -> Self {
        match self {
            Side::T => Side::S,
            Side::S => Side::T,
        }
    }
}

/// A one-dimensional complementing pair `T ⊕ S = N` in de Bruijn form.
///
/// `Radix` lists digit radices `n_1..n_L`. With `infinite_tail` the sequence goes on
/// with radix 2; without it position `L + 1` carries an unbounded digit, so the side
/// that does not own that position is finite.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NPairSpec {
    /// `({0}, N)`
    ZeroT,
    /// `(N, {0})`
    ZeroS,
    Radix {
        radices: Vec<u64>,
        infinite_tail: bool,
        parity: Parity,
    },
}

const TAIL_RADIX: u64 = 2;

impl NPairSpec {
    pub fn radix(radices: Vec<u64>, infinite_tail: bool, parity: Parity) -> Result<Self> {
        check_radices(&radices)?;
        if radices.is_empty() && !infinite_tail {
            return Err(Error::InvalidArgument(
                "a finite radix list must be nonempty; use special=zero-T or zero-S".into(),
            ));
        }
        Ok(NPairSpec::Radix {
            radices,
            infinite_tail,
            parity,
        })
    }

    /// Exchanges the roles of `T` and `S`.
    pub fn swap(&self) -> Self {
        match self {
            NPairSpec::ZeroT => NPairSpec::ZeroS,
            NPairSpec::ZeroS => NPairSpec::ZeroT,
            NPairSpec::Radix {
                radices,
                infinite_tail,
                parity,
            } => NPairSpec::Radix {
                radices: radices.clone(),
                infinite_tail: *infinite_tail,
                parity: parity.flip(),
            },
        }
    }

    /// The side with finitely many elements, if any.
    pub fn finite_side(&self) -> Option<Side> {
        match self {
            NPairSpec::ZeroT => Some(Side::T),
            NPairSpec::ZeroS => Some(Side::S),
            NPairSpec::Radix {
                infinite_tail: true,
                ..
            } => None,
            NPairSpec::Radix {
                radices, parity, ..
            } => Some(if parity.t_owns(radices.len() + 1) {
                Side::S
            } else {
                Side::T
            }),
        }
    }

    pub fn is_finite(&self, side: Side) -> bool {
        self.finite_side() == Some(side)
    }

    /// Elements of a finite side.
    pub fn finite_values(&self, side: Side) -> Option<Vec<u64>> {
        if !self.is_finite(side) {
            return None;
        }
        match self {
            NPairSpec::ZeroT | NPairSpec::ZeroS => Some(vec![0]),
            NPairSpec::Radix {
                radices, parity, ..
            } => {
                let mut values = vec![0u64];
                let mut place = 1u64;
                for (k, &n) in radices.iter().enumerate() {
                    if parity.t_owns(k + 1) == (side == Side::T) {
                        values = (0..n)
                            .flat_map(|d| values.iter().map(move |&v| v + d * place))
                            .collect();
                    }
                    place *= n;
                }
                values.sort_unstable();
                Some(values)
            }
        }
    }

    /// `(t in T, t in S)`.
    pub fn membership(&self, mut t: u64) -> (bool, bool) {
        let (radices, infinite_tail, parity) = match self {
            NPairSpec::ZeroT => return (t == 0, true),
            NPairSpec::ZeroS => return (true, t == 0),
            NPairSpec::Radix {
                radices,
                infinite_tail,
                parity,
            } => (radices, *infinite_tail, *parity),
        };
        let (mut in_t, mut in_s) = (true, true);
        let mut position = 1;
        while t > 0 {
            let digit = match radices.get(position - 1) {
                Some(&n) => {
                    let d = t % n;
                    t /= n;
                    d
                }
                None if infinite_tail => {
                    let d = t % TAIL_RADIX;
                    t /= TAIL_RADIX;
                    d
                }
                None => std::mem::take(&mut t),
            };
            if digit != 0 {
                if parity.t_owns(position) {
                    in_s = false;
                } else {
                    in_t = false;
                }
            }
            position += 1;
        }
        (in_t, in_s)
    }

    /// The pair truncated to `[0, bound)`.
    pub fn evaluate(&self, bound: Coord) -> Result<SetPair> {
        let bounds = LatticeBox::new(vec![bound])?;
        bounds.enumerable_cells()?;
        let (mut t, mut s) = (Vec::new(), Vec::new());
        for v in 0..bound {
            let (in_t, in_s) = self.membership(v);
            if in_t {
                t.push(v);
            }
            if in_s {
                s.push(v);
            }
        }
        SetPair::new(BoxSet::line(bound, t)?, BoxSet::line(bound, s)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tail {
    /// One unbounded digit owned by the side.
    Unbounded(Side),
    /// Radix 2 forever, the first of those positions owned by the side.
    Binary(Side),
}

impl NPairSpec {
    fn digits(&self) -> (Vec<(u64, Side)>, Tail) {
        match self {
            NPairSpec::ZeroT => (Vec::new(), Tail::Unbounded(Side::S)),
            NPairSpec::ZeroS => (Vec::new(), Tail::Unbounded(Side::T)),
            NPairSpec::Radix {
                radices,
                infinite_tail,
                parity,
            } => {
                let owner = |k: usize| if parity.t_owns(k) { Side::T } else { Side::S };
                let digits = radices.iter().enumerate().map(|(k, &n)| (n, owner(k + 1))).collect();
                let next = owner(radices.len() + 1);
                let tail = if *infinite_tail {
                    Tail::Binary(next)
                } else {
                    Tail::Unbounded(next)
                };
                (digits, tail)
            }
        }
    }

    fn from_digits(digits: Vec<(u64, Side)>, tail: Tail) -> Result<Self> {
        let mut merged: Vec<(u64, Side)> = Vec::with_capacity(digits.len());
        for (n, side) in digits {
            match merged.last_mut() {
                Some((m, last)) if *last == side => {
                    *m = m.checked_mul(n).ok_or(Error::Overflow("merged radix"))?;
                }
                _ => merged.push((n, side)),
            }
        }
        let tail = match (merged.last().copied(), tail) {
            (Some((_, last)), Tail::Unbounded(side)) if last == side => {
                merged.pop();
                Tail::Unbounded(side)
            }
            (Some((n, last)), Tail::Binary(side)) if last == side => {
                merged.pop();
                merged.push((n.checked_mul(TAIL_RADIX).ok_or(Error::Overflow("merged radix"))?, side));
                Tail::Binary(side.other())
            }
            (_, tail) => tail,
        };
        let first = match (merged.first(), tail) {
            (Some(&(_, side)), _) | (None, Tail::Binary(side)) => side,
            (None, Tail::Unbounded(Side::T)) => return Ok(NPairSpec::ZeroS),
            (None, Tail::Unbounded(Side::S)) => return Ok(NPairSpec::ZeroT),
        };
        let parity = if first == Side::T { Parity::TOdd } else { Parity::TEven };
        NPairSpec::radix(
            merged.into_iter().map(|(n, _)| n).collect(),
            matches!(tail, Tail::Binary(_)),
            parity,
        )
    }

    /// `(C + N T, D + N S)` for an interval pair `(C, D)` of size `N`.
    pub fn graft_interval(&self, pair: &IntervalPair) -> Result<Self> {
        let mut digits: Vec<(u64, Side)> = factor_interval_pair(pair)
            .into_iter()
            .map(|step| {
                let side = match step.side {
                    FactorSide::C => Side::T,
                    FactorSide::D => Side::S,
                };
                (step.p, side)
            })
            .collect();
        let (rest, tail) = self.digits();
        digits.extend(rest);
        Self::from_digits(digits, tail)
    }
}

/// Evaluates a spec on a one-dimensional box.
pub fn evaluate_npair(spec: &NPairSpec, bounds: &LatticeBox) -> Result<SetPair> {
    bounds.expect_dim(1)?;
    spec.evaluate(bounds.bound(0))
}

impl fmt::Display for NPairSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NPairSpec::ZeroT => f.write_str("special=zero-T"),
            NPairSpec::ZeroS => f.write_str("special=zero-S"),
            NPairSpec::Radix {
                radices,
                infinite_tail,
                parity,
            } => {
                let list = radices.iter().map(|r| r.to_string()).collect::<Vec<_>>();
                write!(
                    f,
                    "radices {} tail={} parity={}",
                    if list.is_empty() { "-".to_string() } else { list.join(",") },
                    if *infinite_tail { "yes" } else { "no" },
                    match parity {
                        Parity::TEven => "T-even",
                        Parity::TOdd => "T-odd",
                    }
                )
            }
        }
    }
}

impl FromStr for NPairSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::parse(0, msg);
        let words: Vec<&str> = text.split_whitespace().collect();
        match words.as_slice() {
            ["special=zero-T"] => Ok(NPairSpec::ZeroT),
            ["special=zero-S"] => Ok(NPairSpec::ZeroS),
            ["radices", list, rest @ ..] => {
                let radices = if *list == "-" {
                    Vec::new()
                } else {
                    list.split(',')
                        .map(|r| r.parse::<u64>().map_err(|_| bad(format!("bad radix `{r}`"))))
                        .collect::<Result<Vec<_>>>()?
                };
                let mut tail = None;
                let mut parity = None;
                for word in rest {
                    match word.split_once('=') {
                        Some(("tail", "yes")) => tail = Some(true),
                        Some(("tail", "no")) => tail = Some(false),
                        Some(("parity", "T-even")) => parity = Some(Parity::TEven),
                        Some(("parity", "T-odd")) => parity = Some(Parity::TOdd),
                        _ => return Err(bad(format!("unexpected `{word}` in N-pair spec"))),
                    }
                }
                let tail = tail.ok_or_else(|| bad("missing tail=<yes|no>".into()))?;
                let parity = parity.ok_or_else(|| bad("missing parity=<T-even|T-odd>".into()))?;
                NPairSpec::radix(radices, tail, parity).map_err(|e| bad(e.to_string()))
            }
            _ => Err(bad(format!("cannot parse N-pair spec `{text}`"))),
        }
    }
}

/// A spec recovered from finite data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NPairFit {
    pub spec: NPairSpec,
    /// Number of leading radices `n_k` with `2 n_1 ... n_k <= bound`.
    pub certified_levels: usize,
    /// The spec reproduces the data on `[0, bound)`.
    pub bound: Coord,
    /// Window left after dividing out every radix. At least 2 means the unbounded
    /// last digit was actually observed.
    pub terminal_window: Coord,
}

/// Peels a box-verified one-dimensional pair into radices.
///
/// At each level the side containing 1 absorbs `{0..p-1}` where `p` is the least
/// positive element of the other side; both sides are then divided by `p`.
pub fn fit_npair(pair: &SetPair) -> Result<NPairFit> {
    pair.bounds().expect_dim(1)?;
    let bound = pair.bounds().bound(0);
    let t = pair.t.values();
    let s = pair.s.values();
    if t.first() != Some(&0) || s.first() != Some(&0) {
        return Err(Error::Structure("0 must lie on both sides".into()));
    }

    let trivial = |spec| NPairFit {
        spec,
        certified_levels: 0,
        bound,
        terminal_window: bound,
    };
    if t.len() == 1 {
        return Ok(trivial(NPairSpec::ZeroT));
    }
    if s.len() == 1 {
        return Ok(trivial(NPairSpec::ZeroS));
    }

    // `unit` is the side containing 1 at the current level.
    let (mut unit, mut other, unit_side) = match (t.get(1), s.get(1)) {
        (Some(1), Some(1)) => {
            return Err(Error::NotDirectSum {
                point: vec![1],
                count: 2,
            })
        }
        (Some(1), _) => (t.to_vec(), s.to_vec(), Side::T),
        (_, Some(1)) => (s.to_vec(), t.to_vec(), Side::S),
        _ => {
            return Err(Error::NotDirectSum {
                point: vec![1],
                count: 0,
            })
        }
    };
    let parity = if unit_side == Side::T {
        Parity::TOdd
    } else {
        Parity::TEven
    };

    let mut window = bound;
    let mut radices = Vec::new();
    while window > 1 {
        let Some(&p) = other.get(1) else {
            break;
        };
        let level = radices.len() + 1;
        let fail = |what: &str| Error::Structure(format!("level {level}, radix {p}: {what}"));
        if unit.iter().take_while(|&&u| u < p).count() as u64 != p.min(window) {
            return Err(fail("the side containing 1 does not start with [0, p)"));
        }
        if other.iter().any(|&v| v % p != 0) {
            return Err(fail("the side without 1 is not a multiple of p"));
        }
        let next_window = window.div_ceil(p);
        let mut reduced_unit: Vec<u64> = unit.iter().map(|&u| u / p).collect();
        reduced_unit.dedup();
        let expanded: Vec<u64> = reduced_unit
            .iter()
            .flat_map(|&q| (0..p).map(move |d| q * p + d))
            .filter(|&v| v < window)
            .collect();
        if expanded != unit {
            return Err(fail("the side containing 1 is not a union of full blocks"));
        }
        let reduced_other: Vec<u64> = other.iter().map(|&v| v / p).collect();

        radices.push(p);
        window = next_window;
        unit = reduced_other;
        other = reduced_unit;
    }

    let spec = NPairSpec::radix(radices.clone(), false, parity)?;
    let mut product = 1u64;
    let certified_levels = radices
        .iter()
        .take_while(|&&n| {
            product = product.saturating_mul(n);
            product.saturating_mul(2) <= bound
        })
        .count();
    Ok(NPairFit {
        spec,
        certified_levels,
        bound,
        terminal_window: window,
    })
}
