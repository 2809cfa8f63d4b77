use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

use super::boxes::{Coord, LatticeBox};
use super::set::BoxSet;

/// Target number of cells counted per parallel work unit.
const CHUNK_CELLS: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DirectSumReport {
    Ok,
    /// `point` is the lexicographically least point of the window whose number of
    /// decompositions `a + b` differs from one.
    Failure { point: Vec<Coord>, count: u64 },
}

impl DirectSumReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, DirectSumReport::Ok)
    }

    pub fn into_result(self) -> Result<()> {
        match self {
            DirectSumReport::Ok => Ok(()),
            DirectSumReport::Failure { point, count } => Err(Error::NotDirectSum { point, count }),
        }
    }
}

/// Checks `A ⊕ B = N^n` on `window` by counting decompositions of every point.
///
/// Only points of `A` and `B` inside the window matter: `a + b = c` forces `a, b <= c`.
pub fn direct_sum_check(a: &BoxSet, b: &BoxSet, window: &LatticeBox) -> Result<DirectSumReport> {
    for operand in [a, b] {
        window.expect_dim(operand.dim())?;
        if !operand.bounds().contains_box(window) {
            return Err(Error::BoxNotContained {
                inner: window.bounds().to_vec(),
                outer: operand.bounds().bounds().to_vec(),
            });
        }
    }
    window.enumerable_cells()?;

    let dim = window.dim();
    let left = a.restrict(window)?.flat_coords();
    let right = b.restrict(window)?.flat_coords();
    let right_first: Vec<Coord> = right.chunks_exact(dim).map(|p| p[0]).collect();

    let rows = window.bound(0);
    let row_cells = window.cells() / rows;
    let rows_per_chunk = (CHUNK_CELLS / row_cells).max(1);
    let chunks: Vec<(Coord, Coord)> = (0..rows)
        .step_by(rows_per_chunk as usize)
        .map(|lo| (lo, (lo + rows_per_chunk).min(rows)))
        .collect();

    let failure = chunks.par_iter().find_map_first(|&(lo, hi)| {
        let chunk = window.with_bound(0, hi - lo).expect("chunk of a valid box");
        let mut counts = vec![0u32; chunk.cells() as usize];
        let mut sum = vec![0; dim];
        for p in left.chunks_exact(dim) {
            if p[0] >= hi {
                // `left` is sorted on the first coordinate.
                break;
            }
            let from = right_first.partition_point(|&q| q + p[0] < lo);
            let to = right_first.partition_point(|&q| q + p[0] < hi);
            'right: for q in right[from * dim..to * dim].chunks_exact(dim) {
                sum[0] = p[0] + q[0] - lo;
                for j in 1..dim {
                    let s = p[j] + q[j];
                    if s >= window.bound(j) {
                        continue 'right;
                    }
                    sum[j] = s;
                }
                let slot = &mut counts[chunk.encode(&sum) as usize];
                *slot = slot.saturating_add(1);
            }
        }
        counts.iter().position(|&c| c != 1).map(|i| {
            let mut point = chunk.decode(i as u64);
            point[0] += lo;
            (point, counts[i] as u64)
        })
    });

    Ok(match failure {
        None => DirectSumReport::Ok,
        Some((point, count)) => DirectSumReport::Failure { point, count },
    })
}

/// A candidate complementing pair known on a common box.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetPair {
    pub t: BoxSet,
    pub s: BoxSet,
}

impl SetPair {
    pub fn new(t: BoxSet, s: BoxSet) -> Result<Self> {
        if t.bounds() != s.bounds() {
            return Err(Error::InvalidArgument(format!(
                "pair sides live on different boxes {} and {}",
                t.bounds(),
                s.bounds()
            )));
        }
        Ok(SetPair { t, s })
    }

    pub fn bounds(&self) -> &LatticeBox {
        self.t.bounds()
    }

    pub fn dim(&self) -> usize {
        self.t.dim()
    }

    /// Direct-sum check on the whole common box.
    pub fn check(&self) -> Result<DirectSumReport> {
        direct_sum_check(&self.t, &self.s, self.bounds())
    }

    pub fn verify(&self) -> Result<()> {
        self.check()?.into_result()
    }

    pub fn restrict(&self, bounds: &LatticeBox) -> Result<Self> {
        Ok(SetPair {
            t: self.t.restrict(bounds)?,
            s: self.s.restrict(bounds)?,
        })
    }

    pub fn swap(self) -> Self {
        SetPair { t: self.s, s: self.t }
    }

    pub(crate) fn map(&self, mut f: impl FnMut(&BoxSet) -> Result<BoxSet>) -> Result<Self> {
        SetPair::new(f(&self.t)?, f(&self.s)?)
    }
}
