use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A lattice coordinate. Points of `N^n` are slices of these.
pub type Coord = u64;

/// Upper limit on the number of cells an operation may enumerate one by one.
pub const MAX_ENUMERATED_CELLS: u64 = 1 << 30;

/// The window `[0, M_1) x ... x [0, M_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LatticeBox {
    bounds: Vec<Coord>,
}

impl LatticeBox {
    pub fn new(bounds: Vec<Coord>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidBox("a box needs at least one axis".into()));
        }
        if let Some(axis) = bounds.iter().position(|&m| m == 0) {
            return Err(Error::InvalidBox(format!("bound on axis {axis} is zero")));
        }
        let mut cells: u64 = 1;
        for &m in &bounds {
            cells = cells
                .checked_mul(m)
                .filter(|&c| c <= i64::MAX as u64)
                .ok_or_else(|| Error::BoxTooLarge(format!("{bounds:?} has more than 2^63 cells")))?;
        }
        Ok(LatticeBox { bounds })
    }

    pub fn cube(dim: usize, side: Coord) -> Result<Self> {
        Self::new(vec![side; dim])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[Coord] {
        &self.bounds
    }

    pub fn bound(&self, axis: usize) -> Coord {
        self.bounds[axis]
    }

    /// Number of lattice points in the box. Never overflows, see [`LatticeBox::new`].
    pub fn cells(&self) -> u64 {
        self.bounds.iter().product()
    }

    pub(crate) fn enumerable_cells(&self) -> Result<u64> {
        let cells = self.cells();
        if cells > MAX_ENUMERATED_CELLS {
            return Err(Error::BoxTooLarge(format!(
                "{:?} has {cells} cells, more than the enumeration limit {MAX_ENUMERATED_CELLS}",
                self.bounds
            )));
        }
        Ok(cells)
    }

    pub fn contains(&self, point: &[Coord]) -> bool {
        point.len() == self.bounds.len() && point.iter().zip(&self.bounds).all(|(p, m)| p < m)
    }

    pub fn contains_box(&self, other: &LatticeBox) -> bool {
        other.dim() == self.dim() && other.bounds.iter().zip(&self.bounds).all(|(o, m)| o <= m)
    }

    /// Componentwise minimum of two boxes of equal dimension.
    pub fn meet(&self, other: &LatticeBox) -> Result<Self> {
        self.expect_dim(other.dim())?;
        Ok(LatticeBox {
            bounds: self.bounds.iter().zip(&other.bounds).map(|(a, b)| *a.min(b)).collect(),
        })
    }

    pub fn with_bound(&self, axis: usize, bound: Coord) -> Result<Self> {
        self.check_axis(axis)?;
        let mut bounds = self.bounds.clone();
        bounds[axis] = bound;
        Self::new(bounds)
    }

    /// The box spanned by the given axes, in the given order.
    pub fn select(&self, axes: &[usize]) -> Result<Self> {
        for &axis in axes {
            self.check_axis(axis)?;
        }
        Self::new(axes.iter().map(|&a| self.bounds[a]).collect())
    }

    pub(crate) fn expect_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }

    pub(crate) fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn encode(&self, point: &[Coord]) -> u64 {
        point
            .iter()
            .zip(&self.bounds)
            .fold(0u64, |acc, (&p, &m)| acc * m + p)
    }

    pub(crate) fn decode_into(&self, mut index: u64, out: &mut [Coord]) {
        for j in (0..self.dim()).rev() {
            let m = self.bounds[j];
            out[j] = index % m;
            index /= m;
        }
    }

    pub(crate) fn decode(&self, index: u64) -> Vec<Coord> {
        let mut out = vec![0; self.dim()];
        self.decode_into(index, &mut out);
        out
    }

    /// All points of the box in lexicographic order.
    pub fn points(&self) -> BoxPoints<'_> {
        BoxPoints {
            bounds: &self.bounds,
            next: Some(vec![0; self.dim()]),
        }
    }
}

impl fmt::Display for LatticeBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.bounds.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "[0,{m})")?;
        }
        Ok(())
    }
}

pub struct BoxPoints<'a> {
    bounds: &'a [Coord],
    next: Option<Vec<Coord>>,
}

impl Iterator for BoxPoints<'_> {
    type Item = Vec<Coord>;

    fn next(&mut self) -> Option<Vec<Coord>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut axis = succ.len();
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            succ[axis] += 1;
            if succ[axis] < self.bounds[axis] {
                self.next = Some(succ);
                break;
            }
            succ[axis] = 0;
        }
        Some(current)
    }
}
