#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod accel;
pub mod cantor;
pub mod catalog;
pub mod cli;
pub mod distrib;
pub mod error;
pub mod expr;
pub mod func_model;
pub mod gauge;
pub mod inversion;
pub mod oscillatory;
pub mod parser;
pub mod quad;
pub mod random;
pub mod spectrum;
pub mod stieltjes;

pub use error::{Error, Result};
pub use num_complex::Complex64;
