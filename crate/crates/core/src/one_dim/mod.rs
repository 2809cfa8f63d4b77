//! One-dimensional pairs: mixed-radix digits, de Bruijn pairs and interval pairs.

mod interval;
mod npair;
mod radix;

pub use interval::{
    expand_factor_chain, factor_interval_pair, interval_chain, ChainLevel, FactorSide, FactorStep,
    FiniteSection, IntervalChain, IntervalPair,
};
pub use npair::{evaluate_npair, fit_npair, NPairFit, NPairSpec, Parity, Side};
pub use radix::{radix_capacity, radix_decode, radix_encode};
