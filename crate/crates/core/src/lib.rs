//! Exact-rational compilation of saturated RNNs, and of Turing machines via
//! two-stack machines, into hard-attention Transformers, with a harness
//! that checks the compiled models step by step against their sources.

pub mod circuit;
mod compile;
pub mod error;
pub mod exec;
pub mod harness;
pub mod numeric;
pub mod seq;
pub mod tm;
pub mod transformer;

pub use compile::{directional, vanilla};
pub use error::{Error, Result};
