//! Turing machines, two-stack machines, Cantor stack codes, and the
//! compilation of a two-stack machine into a saturated RNN.

mod machine;
mod stack;
mod to_rnn;

pub use machine::{
    tm_run, tm_to_two_stack, two_stack_run, Move, Read, StackAction, StackConfig, StackKey, StackOp, StackRead,
    TmRun, TmSpec, TmTransition, TwoStackSpec,
};
pub use stack::{stack_decode, stack_encode, stack_nonempty, stack_pop, stack_push, stack_top, CantorCode};
pub use to_rnn::{bit_symbols, compile_two_stack, tm_alphabet, two_stack_to_rnn, TmRnn, TmRnnLayout};
