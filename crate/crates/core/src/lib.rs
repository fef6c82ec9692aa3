// `!(x < tol)` is used deliberately so that NaN residuals count as failures.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod backlund;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod forms;
pub mod geometry;
pub mod jets;
pub mod report;

pub use error::{Error, Result};
