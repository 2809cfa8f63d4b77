use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{BoxSet, LatticeBox};

/// Largest dimension accepted by [`separability`]; the search visits every bipartition.
pub const MAX_SEPARABILITY_DIM: usize = 8;

/// Whether `T` splits as a product over a bipartition of the axes, inside `bounds`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparabilityVerdict {
    pub separable: bool,
    /// `(I, J)` with axis 0 in `I`, set when `separable` and `n >= 2`.
    pub partition: Option<(Vec<usize>, Vec<usize>)>,
    /// The verdict holds for `T ∩ bounds` only.
    pub bounds: LatticeBox,
}

/// Searches bipartitions `{I, J}` with `T ∩ box = proj_I(T) x proj_J(T)`.
///
/// Partitions are tried by increasing `|I|`, so the first hit has the smallest
/// block containing axis 0. In dimension one the set is separable iff it has one point.
pub fn separability(t: &BoxSet) -> Result<SeparabilityVerdict> {
    let n = t.dim();
    if n > MAX_SEPARABILITY_DIM {
        return Err(Error::InvalidArgument(format!(
            "separability search is limited to {MAX_SEPARABILITY_DIM} axes, got {n}"
        )));
    }
    if !t.contains(&vec![0; n]) {
        return Err(Error::Structure("separability needs 0 in T".into()));
    }
    let bounds = t.bounds().clone();
    if n == 1 {
        return Ok(SeparabilityVerdict {
            separable: t.len() == 1,
            partition: None,
            bounds,
        });
    }

    let mut masks: Vec<u32> = (0..1u32 << (n - 1)).map(|m| (m << 1) | 1).collect();
    masks.pop(); // I = every axis
    masks.sort_by_key(|m| (m.count_ones(), *m));
    for mask in masks {
        let (i, j): (Vec<usize>, Vec<usize>) = (0..n).partition(|&a| mask >> a & 1 == 1);
        let left = t.project(&i)?.len();
        let right = t.project(&j)?.len();
        if left * right == t.len() {
            return Ok(SeparabilityVerdict {
                separable: true,
                partition: Some((i, j)),
                bounds,
            });
        }
    }
    Ok(SeparabilityVerdict {
        separable: false,
        partition: None,
        bounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Coord;

    fn set(bounds: &[Coord], points: &[&[Coord]]) -> BoxSet {
        BoxSet::new(LatticeBox::new(bounds.to_vec()).unwrap(), points.iter().copied()).unwrap()
    }

    #[test]
    fn product_of_lines() {
        let t = set(&[4, 4], &[&[0, 0], &[0, 2], &[1, 0], &[1, 2]]);
        let v = separability(&t).unwrap();
        assert!(v.separable);
        assert_eq!(v.partition, Some((vec![0], vec![1])));
    }

    #[test]
    fn origin_alone_is_separable() {
        assert!(separability(&set(&[3, 3], &[&[0, 0]])).unwrap().separable);
    }

    #[test]
    fn diagonal_is_not_separable() {
        let t = set(&[4, 4], &[&[0, 0], &[1, 1], &[2, 2]]);
        assert!(!separability(&t).unwrap().separable);
    }

    #[test]
    fn one_dimensional_convention() {
        assert!(separability(&set(&[5], &[&[0]])).unwrap().separable);
        assert!(!separability(&set(&[5], &[&[0], &[2]])).unwrap().separable);
    }

    #[test]
    fn finds_a_three_way_block() {
        // {0,(1,1,0)} on axes 0,1 times {0,2} on axis 2.
        let t = set(&[4, 4, 4], &[&[0, 0, 0], &[1, 1, 0], &[0, 0, 2], &[1, 1, 2]]);
        let v = separability(&t).unwrap();
        assert_eq!(v.partition, Some((vec![0, 1], vec![2])));
    }

    #[test]
    fn rejects_wide_inputs() {
        let bounds = LatticeBox::cube(9, 1).unwrap();
        assert!(separability(&BoxSet::origin(bounds)).is_err());
    }
}
