#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod distortion;
pub mod elliptic;
pub mod error;
pub mod modulus;
pub mod nome;
