// `!(x > 0.0)` is used throughout so that NaN is rejected along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cadlag;
pub mod error;
pub mod experiments;
pub mod limits;
pub mod models;
pub mod par;
pub mod pointproc;
pub mod rng;
pub mod skorokhod;
pub mod stats;

pub use cadlag::{CadlagPath, SampleRule};
pub use error::{Error, Result};
