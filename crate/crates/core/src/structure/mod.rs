//! The inverse direction: separability, germs, marginal pairs and the reductions
//! that recover a weighted tree (or a forest of them) from a box-verified pair.

mod decompose;
mod forest;
mod reduce;
mod separability;

pub use decompose::{decompose, Decomposition, Stage, TraceEntry};
pub use forest::{Forest, ForestComponent};
pub use reduce::{
    contains_faces, find_pure_face, germ_of, is_class_f0, marginal_pair, marginal_reduce, one_face_reduce,
    pure_type_reduce, section_finiteness, Germ, MarginalReduction, OneFaceReduction, PureFace, PureTypeReduction,
    SectionFiniteness,
};
pub use separability::{separability, SeparabilityVerdict, MAX_SEPARABILITY_DIM};
