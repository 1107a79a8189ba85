//! Alphabets, saturated feed-forward networks and the reference RNN.

mod alphabet;
mod ffn;
mod rnn;

pub use alphabet::{symbols, Alphabet, BEGIN, END};
pub(crate) use ffn::affine_bounds;
pub use ffn::{Bounds, Ffn, FfnLayer};
pub use rnn::{rnn_run, rnn_step, Halt, RnnSpec, RnnTrace};
