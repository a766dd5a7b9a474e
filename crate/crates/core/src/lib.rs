#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod error;
pub mod kernel;
pub mod quadrature;
pub mod sharpness;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
