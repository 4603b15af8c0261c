#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod special;

pub use error::{Error, Result};
pub mod group;
pub mod geometry;
pub mod automorphic;
pub mod verify;
pub mod cli;
