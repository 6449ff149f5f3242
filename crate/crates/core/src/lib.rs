#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fingerprint;
pub mod cli;
pub mod distinct;
pub mod entropy;
pub mod poly;
pub mod sim;
pub mod support;

pub use error::{Error, Result};
