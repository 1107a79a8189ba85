//! Encoder-decoder hard-attention Transformer with an output-feedback
//! decoding loop.

mod run;
mod spec;

pub use run::{
    cross_window, decode_step, embed_input, encode, next_input, run, Decoder, EncoderOutput, LayerRecord,
    StepRecord, TransformerTrace,
};
pub use spec::{DecoderLayer, EncoderLayer, PosRule, TransformerSpec};
