// `!(x < y)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensembles;
pub mod error;
pub mod linalg;
pub mod montecarlo;
pub mod mu;
pub mod oracles;
pub mod rng;
pub mod series;
