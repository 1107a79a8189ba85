use serde::Serialize;

use super::cosim::{cosimulate_traces, VerifyReport};
use crate::compile::{directional::compile_directional, vanilla::compile_vanilla};
use crate::error::Result;
use crate::numeric::RatVec;
use crate::seq::{BEGIN, END};
use crate::tm::{
    bit_symbols, compile_two_stack, tm_alphabet, tm_run, tm_to_two_stack, StackConfig, TmRnn, TmSpec, TwoStackSpec,
};
use crate::transformer::{TransformerSpec, TransformerTrace};

/// A Turing machine compiled all the way to both Transformers.
#[derive(Debug, Clone)]
pub struct TmPipeline {
    pub tm: TmSpec,
    pub two_stack: TwoStackSpec,
    pub rnn: TmRnn,
    pub vanilla: TransformerSpec,
    pub directional: TransformerSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PipelineOutcome {
    pub input: Vec<u8>,
    pub tm_halted: bool,
    pub tm_accepted: bool,
    pub vanilla: VerifyReport,
    pub directional: VerifyReport,
    /// Accept/reject read off the final control state of each Transformer.
    pub vanilla_accepted: Option<bool>,
    pub directional_accepted: Option<bool>,
    /// Final stacks of each Transformer, read as a tape, equal the TM tape.
    pub vanilla_tape_matches: bool,
    pub directional_tape_matches: bool,
}

impl PipelineOutcome {
    pub fn passed(&self) -> bool {
        let decided = Some(self.tm_accepted);
        self.tm_halted
            && self.vanilla.passed()
            && self.directional.passed()
            && self.vanilla_accepted == decided
            && self.directional_accepted == decided
            && self.vanilla_tape_matches
            && self.directional_tape_matches
    }
}

impl TmPipeline {
    pub fn new(tm: &TmSpec) -> Result<Self> {
        let two_stack = tm_to_two_stack(tm)?;
        let rnn = compile_two_stack(&two_stack)?;
        let alphabet = tm_alphabet();
        Ok(TmPipeline {
            tm: tm.clone(),
            vanilla: compile_vanilla(&rnn.rnn, &alphabet)?,
            directional: compile_directional(&rnn.rnn, &alphabet)?,
            two_stack,
            rnn,
        })
    }

    /// Budget covering input loading, the machine run and the halt flag.
    pub fn step_budget(&self, input: &[u8], machine_steps: usize) -> usize {
        input.len() + 2 + 3 * machine_steps + 2
    }

    pub fn check(&self, input: &[u8], machine_steps: usize) -> Result<PipelineOutcome> {
        let direct = tm_run(&self.tm, input, machine_steps);
        let budget = self.step_budget(input, machine_steps);
        let mut plain = bit_symbols(input);
        plain.push(END.to_string());
        let mut marked = vec![BEGIN.to_string()];
        marked.extend(plain.iter().cloned());

        let van = cosimulate_traces(&self.rnn.rnn, &self.vanilla, &plain, budget)?;
        let dir = cosimulate_traces(&self.rnn.rnn, &self.directional, &marked, budget)?;
        let (va, vt) = self.read_out(&van.transformer, &direct.tape, direct.head)?;
        let (da, dt) = self.read_out(&dir.transformer, &direct.tape, direct.head)?;
        Ok(PipelineOutcome {
            input: input.to_vec(),
            tm_halted: direct.halted,
            tm_accepted: direct.accepted,
            vanilla: van.report,
            directional: dir.report,
            vanilla_accepted: va,
            directional_accepted: da,
            vanilla_tape_matches: vt,
            directional_tape_matches: dt,
        })
    }

    fn final_hidden(&self, tr: &TransformerTrace) -> RatVec {
        let y = tr.decoder_inputs.last().expect("y_0 is always recorded");
        y.slice(0..self.rnn.layout.d_h())
    }

    fn read_out(&self, tr: &TransformerTrace, tape: &[u8], head: usize) -> Result<(Option<bool>, bool)> {
        if !tr.halted {
            return Ok((None, false));
        }
        let h = self.final_hidden(tr);
        let lay = &self.rnn.layout;
        let accepted = lay.state(&h).and_then(|q| {
            if q == self.two_stack.accept() {
                Some(true)
            } else if q == self.two_stack.reject() {
                Some(false)
            } else {
                None
            }
        });
        let (stack1, stack2) = lay.stacks(&h)?;
        let conf = StackConfig {
            state: 0,
            stack1,
            stack2,
        };
        let (got_tape, got_head) = conf.tape();
        Ok((accepted, trimmed(&got_tape) == trimmed(tape) && got_head == head))
    }
}

/// Trailing zeros stand for blanks written back as 0.
fn trimmed(tape: &[u8]) -> &[u8] {
    let end = tape.iter().rposition(|&b| b != 0).map_or(0, |i| i + 1);
    &tape[..end]
}
