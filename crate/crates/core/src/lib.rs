// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod blockage;
pub mod numerics;
pub mod spectral;
pub mod interference;
pub mod detector;
pub mod system;
pub mod config;
pub mod cli;
pub mod mcsim;

pub use error::{Error, Result};
