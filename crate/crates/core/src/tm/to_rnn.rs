use serde::Serialize;

use super::machine::{StackKey, StackOp, StackRead, TwoStackSpec};
use super::stack::stack_decode;
use crate::circuit::{Circuit, Output, Signal};
use crate::error::Result;
use crate::numeric::{Rat, RatMat, RatVec};
use crate::seq::{Alphabet, Halt, RnnSpec};

/// Lane map of the hidden state produced by [`two_stack_to_rnn`].
///
/// `q` is the one-hot control state; `psi1`, `psi2` the Cantor codes;
/// `load` is 1 while input is being copied onto stack 2, `first` is 1 only
/// before the first symbol, `scale` is `4^{-k}` after `k` loaded bits,
/// `halted` the halt flag; `xb`, `xp` are scratch lanes for the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TmRnnLayout {
    pub states: usize,
    pub psi1: usize,
    pub psi2: usize,
    pub load: usize,
    pub first: usize,
    pub scale: usize,
    pub halted: usize,
    pub xb: usize,
    pub xp: usize,
}

impl TmRnnLayout {
    pub fn new(states: usize) -> Self {
        TmRnnLayout {
            states,
            psi1: states,
            psi2: states + 1,
            load: states + 2,
            first: states + 3,
            scale: states + 4,
            halted: states + 5,
            xb: states + 6,
            xp: states + 7,
        }
    }

    pub fn d_h(&self) -> usize {
        self.states + 8
    }

    /// Control state when the `q` block is exactly one-hot.
    pub fn state(&self, h: &RatVec) -> Option<usize> {
        let q = h.slice(0..self.states);
        let hot: Vec<usize> = (0..self.states).filter(|&i| q.get(i).is_one()).collect();
        (hot.len() == 1 && q.iter().filter(|x| !x.is_zero()).count() == 1).then(|| hot[0])
    }

    /// Stack contents, top last.
    pub fn stacks(&self, h: &RatVec) -> Result<(Vec<u8>, Vec<u8>)> {
        let mut s1 = stack_decode(h.get(self.psi1))?;
        let mut s2 = stack_decode(h.get(self.psi2))?;
        s1.reverse();
        s2.reverse();
        Ok((s1, s2))
    }

    pub fn is_loading(&self, h: &RatVec) -> bool {
        h.get(self.load).is_one()
    }
}

/// Binary tape alphabet: `0 ↦ [0, 1]`, `1 ↦ [1, 1]`, markers `↦ 0`.
pub fn tm_alphabet() -> Alphabet {
    Alphabet::with_payload(
        2,
        &[("0", RatVec::from_ints(&[0, 1])), ("1", RatVec::from_ints(&[1, 1]))],
    )
    .expect("fixed alphabet")
}

pub fn bit_symbols(bits: &[u8]) -> Vec<String> {
    bits.iter().map(|b| b.to_string()).collect()
}

#[derive(Debug, Clone)]
pub struct TmRnn {
    pub rnn: RnnSpec,
    pub layout: TmRnnLayout,
}

pub fn two_stack_to_rnn(ts: &TwoStackSpec) -> Result<RnnSpec> {
    Ok(compile_two_stack(ts)?.rnn)
}

fn one() -> Rat {
    Rat::one()
}

fn int(n: i64) -> Rat {
    Rat::int(n)
}

/// The RNN first copies the input bits onto stack 2 (first bit on top),
/// skipping one leading zero-embedding symbol, then runs one machine step
/// per time step, then raises the halt flag one step after reaching a
/// halting state.
pub fn compile_two_stack(ts: &TwoStackSpec) -> Result<TmRnn> {
    let nq = ts.states().len();
    let lay = TmRnnLayout::new(nq);
    let d_h = lay.d_h();

    let mut w_h = RatMat::identity(d_h);
    w_h.set(lay.xb, lay.xb, Rat::zero());
    w_h.set(lay.xp, lay.xp, Rat::zero());
    let mut w_x = RatMat::zeros(d_h, 2);
    w_x.set(lay.xb, 0, one());
    w_x.set(lay.xp, 1, one());

    let mut c = Circuit::new(d_h);
    let q: Vec<Signal> = (0..nq).map(|i| c.input(i)).collect();
    let psi = [c.input(lay.psi1), c.input(lay.psi2)];
    let (load, first, scale, halted) = (
        c.input(lay.load),
        c.input(lay.first),
        c.input(lay.scale),
        c.input(lay.halted),
    );
    let (xb, xp) = (c.input(lay.xb), c.input(lay.xp));

    let top: Vec<Signal> = psi.iter().map(|&p| c.gate(&[(p, int(4))], int(-2))).collect();
    let nonempty: Vec<Signal> = psi.iter().map(|&p| c.gate(&[(p, int(4))], Rat::zero())).collect();
    let load_q = c.gate(&[(scale, one()), (xp, one())], -one());
    let load_b = c.gate(&[(scale, one()), (xb, one())], -one());
    let load_next = c.gate(&[(load, one()), (xp, one()), (first, one())], -one());
    let mut halt_terms = vec![(halted, one()), (load, -one())];
    halt_terms.extend([ts.accept(), ts.reject()].map(|h| (q[h], one())));
    let halted_next = c.gate(&halt_terms, Rat::zero());
    let hold_q: Vec<Signal> = (0..nq)
        .map(|i| {
            if ts.is_halting(i) {
                q[i]
            } else {
                c.gate(&[(q[i], one()), (load, one())], -one())
            }
        })
        .collect();

    // Condition `[state ∧ reads ∧ ¬load]` per transition.
    let mut conds: Vec<(StackKey, Signal)> = Vec::new();
    for key in ts.transitions().keys() {
        let mut terms = vec![(q[key.state], one()), (load, -one())];
        let mut bias = int(-2);
        for (i, read) in [key.read1, key.read2].into_iter().enumerate() {
            match read {
                StackRead::Top(1) => terms.push((top[i], one())),
                StackRead::Top(_) => {
                    terms.push((nonempty[i], one()));
                    terms.push((top[i], -one()));
                }
                StackRead::Empty => {
                    terms.push((nonempty[i], -one()));
                    bias += &one();
                }
            }
        }
        conds.push((*key, c.gate(&terms, bias)));
    }

    let mut stack_out: Vec<Output> = Vec::new();
    for i in 0..2 {
        let mut terms = Vec::new();
        let mut hold = vec![(psi[i], one())];
        for (key, cond) in &conds {
            let a = ts.action(key).expect("key from the table");
            let op = if i == 0 { a.op1 } else { a.op2 };
            let read = if i == 0 { key.read1 } else { key.read2 };
            let (coef, offset) = match op {
                StackOp::Noop => (one(), Rat::zero()),
                StackOp::Push0 => (Rat::frac(1, 4), Rat::frac(1, 4)),
                StackOp::Push1 => (Rat::frac(1, 4), Rat::frac(3, 4)),
                StackOp::Pop => {
                    let t = if read == StackRead::Top(1) { 3 } else { 1 };
                    (int(4), int(-t))
                }
            };
            // A pop candidate reaches 3 when the reading is wrong, so the
            // gate penalty must outweigh it.
            let gated = c.gate(&[(psi[i], coef), (*cond, int(4))], offset - int(4));
            terms.push((gated, one()));
            hold.push((*cond, -one()));
        }
        terms.push((c.gate(&hold, Rat::zero()), one()));
        if i == 1 {
            terms.push((load_q, Rat::frac(1, 4)));
            terms.push((load_b, Rat::frac(1, 2)));
        }
        stack_out.push(Output::new(terms, Rat::zero()));
    }

    let scale_next = c.gate(&[(scale, one()), (load_q, Rat::frac(-3, 4))], Rat::zero());

    let mut outputs = vec![Output::zero(); d_h];
    for (j, out) in outputs.iter_mut().enumerate().take(nq) {
        let mut terms = vec![(hold_q[j], one())];
        terms.extend(
            conds
                .iter()
                .filter(|(k, _)| ts.action(k).expect("key from the table").next == j)
                .map(|(_, s)| (*s, one())),
        );
        *out = Output::new(terms, Rat::zero());
    }
    let [s1, s2]: [Output; 2] = stack_out.try_into().expect("two stacks");
    outputs[lay.psi1] = s1;
    outputs[lay.psi2] = s2;
    outputs[lay.load] = Output::of(load_next);
    outputs[lay.scale] = Output::of(scale_next);
    outputs[lay.halted] = Output::of(halted_next);
    let g = c.finish(&outputs, true)?;

    let mut h0 = RatVec::zeros(d_h).with(ts.start(), one());
    for lane in [lay.load, lay.first, lay.scale] {
        h0 = h0.with(lane, one());
    }
    let rnn = RnnSpec::new(
        d_h,
        2,
        w_h,
        w_x,
        RatVec::zeros(d_h),
        g,
        h0,
        Halt::new(lay.halted, one()),
    )?;
    Ok(TmRnn { rnn, layout: lay })
}
