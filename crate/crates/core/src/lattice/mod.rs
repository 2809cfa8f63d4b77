//! Finite windows onto subsets of `N^n` and the exhaustive direct-sum check.

mod boxes;
mod direct_sum;
mod dump;
mod set;

pub use boxes::{BoxPoints, Coord, LatticeBox, MAX_ENUMERATED_CELLS};
pub use direct_sum::{direct_sum_check, DirectSumReport, SetPair};
pub use dump::{parse_dump, write_dump, DUMP_HEADER};
pub use set::{l_set, BoxSet};
