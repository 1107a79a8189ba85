//! Hand-built RNNs for the counting and copy tasks.

use crate::circuit::{Circuit, Output, Signal};
use crate::error::{Error, Result};
use crate::numeric::{Rat, RatMat, RatVec};
use crate::seq::{Alphabet, Ffn, FfnLayer, Halt, RnnSpec};
use crate::tm::CantorCode;

/// Counting RNN over `{#, c, $}` with `f_b(c) = [Δ]`. Lane 0 latches
/// `min(u, Δ)` through `Δ·σ(u/Δ)`, lane 1 adds lane 0 every step, so after
/// a leading `c` lane 1 reads `min((t − 1)Δ, 1)`. Halts when lane 1 hits 1.
pub fn counting_fixture(delta: &Rat) -> Result<(RnnSpec, Alphabet)> {
    if !delta.is_positive() || delta > &Rat::one() {
        return Err(Error::InvalidInput(format!("delta {delta} outside (0, 1]")));
    }
    let diag = |a: Rat| {
        let mut m = RatMat::identity(2);
        m.set(0, 0, a);
        m
    };
    let g = Ffn::new(
        vec![
            FfnLayer::new(diag(delta.recip()?), RatVec::zeros(2))?,
            FfnLayer::new(diag(delta.clone()), RatVec::zeros(2))?,
        ],
        true,
    )?;
    let rnn = RnnSpec::new(
        2,
        1,
        RatMat::from_int_rows(&[&[1, 0], &[1, 1]])?,
        RatMat::from_int_rows(&[&[1], &[0]])?,
        RatVec::zeros(2),
        g,
        RatVec::zeros(2),
        Halt::new(1, Rat::one()),
    )?;
    let alphabet = Alphabet::with_payload(1, &[("c", RatVec::new(vec![delta.clone()]))])?;
    Ok((rnn, alphabet))
}

/// Payload symbols with one-hot embeddings, between `#` and `$`.
pub fn copy_alphabet(names: &[&str]) -> Result<Alphabet> {
    let m = names.len();
    let payload: Vec<(&str, RatVec)> = names.iter().enumerate().map(|(i, &s)| (s, RatVec::unit(m, i))).collect();
    Alphabet::with_payload(m, &payload)
}

/// Hidden lanes of [`copy_fixture`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CopyLayout {
    pub m: usize,
}

impl CopyLayout {
    pub const PSI1: usize = 0;
    pub const PSI2: usize = 1;
    /// Reading the input.
    pub const READ: usize = 2;
    /// Moving stack 1 onto stack 2.
    pub const TRANSFER: usize = 3;
    /// Popping stack 2 into the output lanes.
    pub const REPLAY: usize = 4;
    pub const DONE: usize = 5;
    /// Set only before the first symbol, so a leading `#` is skipped.
    pub const FIRST: usize = 6;

    pub fn out(&self, a: usize) -> usize {
        7 + a
    }

    pub fn x(&self, a: usize) -> usize {
        7 + self.m + a
    }

    pub fn d_h(&self) -> usize {
        7 + 2 * self.m
    }

    /// Payload index emitted at this step, if any.
    pub fn emitted(&self, h: &RatVec) -> Option<usize> {
        let hot: Vec<usize> = (0..self.m).filter(|&a| h.get(self.out(a)).is_one()).collect();
        (hot.len() == 1).then(|| hot[0])
    }
}

fn layout_for(alphabet: &Alphabet) -> Result<CopyLayout> {
    let payload: Vec<&str> = alphabet.payload().collect();
    let m = payload.len();
    if m == 0 || m + 2 != alphabet.len() || alphabet.len() > 8 {
        return Err(Error::InvalidSpec("copy alphabet needs 1 to 6 payload symbols".into()));
    }
    if alphabet.d_b() != m {
        return Err(Error::InvalidSpec("copy alphabet needs one-hot payload embeddings".into()));
    }
    for (i, s) in payload.iter().enumerate() {
        if alphabet.embed(s)? != &RatVec::unit(m, i) {
            return Err(Error::InvalidSpec(format!("embedding of {s:?} is not e_{i}")));
        }
    }
    Ok(CopyLayout { m })
}

/// RNN that pushes every payload symbol onto stack 1, pours stack 1 onto
/// stack 2, then pops stack 2 one symbol per step into one-hot output
/// lanes, so the emitted sequence is the payload in order. Halts on the
/// step after stack 2 runs empty.
pub fn copy_fixture(alphabet: &Alphabet) -> Result<RnnSpec> {
    let lay = layout_for(alphabet)?;
    let m = lay.m;
    let code = CantorCode::new(m.max(2))?;
    let base = code.base();
    let inv_base = Rat::one() / &base;
    let d_h = lay.d_h();
    let one = Rat::one;
    let neg = || -Rat::one();

    let mut w_h = RatMat::identity(d_h);
    let mut w_x = RatMat::zeros(d_h, m);
    for a in 0..m {
        w_h.set(lay.x(a), lay.x(a), Rat::zero());
        w_x.set(lay.x(a), a, one());
    }

    let mut c = Circuit::new(d_h);
    let [psi1, psi2, read, transfer, replay, done, first] = [
        CopyLayout::PSI1,
        CopyLayout::PSI2,
        CopyLayout::READ,
        CopyLayout::TRANSFER,
        CopyLayout::REPLAY,
        CopyLayout::DONE,
        CopyLayout::FIRST,
    ]
    .map(|i| c.input(i));
    let x: Vec<Signal> = (0..m).map(|a| c.input(lay.x(a))).collect();
    let payload_terms: Vec<(Signal, Rat)> = x.iter().map(|&s| (s, one())).collect();

    // Layer 1.
    let mut t = payload_terms.clone();
    t.push((read, one()));
    let push_gate = c.gate(&t, neg());
    let mut t: Vec<(Signal, Rat)> = x.iter().map(|&s| (s, neg())).collect();
    t.extend([(read, one()), (first, neg())]);
    let end_read = c.gate(&t, Rat::zero());
    // steps[a] = 1 iff the top digit is >= a; steps[0] is "nonempty".
    let steps = |c: &mut Circuit, p: Signal| -> Vec<Signal> {
        (0..m).map(|a| c.gate(&[(p, base.clone())], -Rat::from(2 * a))).collect()
    };
    let st1 = steps(&mut c, psi1);
    let st2 = steps(&mut c, psi2);
    // 2·top + 1 on a nonempty stack, 0 on an empty one.
    let top_val = |st: &[Signal]| -> Vec<(Signal, Rat)> {
        let mut t = vec![(st[0], one())];
        t.extend(st[1..].iter().map(|&s| (s, Rat::int(2))));
        t
    };

    // Layer 2.
    let tr = c.gate(&[(transfer, one()), (st1[0], one())], neg());
    let tr_end = c.gate(&[(transfer, one()), (st1[0], neg())], Rat::zero());
    let rp = c.gate(&[(replay, one()), (st2[0], one())], neg());
    let rp_end = c.gate(&[(replay, one()), (st2[0], neg())], Rat::zero());
    let read_next = c.gate(&[(read, one()), (end_read, neg())], Rat::zero());
    let mut t: Vec<(Signal, Rat)> = vec![(psi1, inv_base.clone()), (push_gate, one())];
    t.extend(x.iter().enumerate().map(|(a, &s)| (s, code.digit_weight(a))));
    let g_push = c.gate(&t, neg());

    // Layer 3.
    let scaled = |coef: Rat, tv: Vec<(Signal, Rat)>| tv.into_iter().map(move |(s, k)| (s, k * &coef));
    let mut t: Vec<(Signal, Rat)> = vec![(psi1, base.clone()), (tr, base.clone())];
    t.extend(scaled(neg(), top_val(&st1)));
    let g_pop1 = c.gate(&t, -base.clone());
    let hold1 = c.gate(&[(psi1, one()), (push_gate, neg()), (tr, neg())], Rat::zero());
    let mut t: Vec<(Signal, Rat)> = vec![(psi2, inv_base.clone()), (tr, one())];
    t.extend(scaled(inv_base.clone(), top_val(&st1)));
    let g_xfer = c.gate(&t, neg());
    let mut t: Vec<(Signal, Rat)> = vec![(psi2, base.clone()), (rp, base.clone())];
    t.extend(scaled(neg(), top_val(&st2)));
    let g_pop2 = c.gate(&t, -base.clone());
    let hold2 = c.gate(&[(psi2, one()), (tr, neg()), (rp, neg())], Rat::zero());
    let outs: Vec<Signal> = (0..m)
        .map(|a| {
            let mut t = vec![(rp, one()), (st2[a], one())];
            if a + 1 < m {
                t.push((st2[a + 1], neg()));
            }
            c.gate(&t, neg())
        })
        .collect();

    let mut outputs = vec![Output::zero(); d_h];
    outputs[CopyLayout::PSI1] = Output::new(vec![(g_push, one()), (g_pop1, one()), (hold1, one())], Rat::zero());
    outputs[CopyLayout::PSI2] = Output::new(vec![(g_xfer, one()), (g_pop2, one()), (hold2, one())], Rat::zero());
    outputs[CopyLayout::READ] = Output::of(read_next);
    outputs[CopyLayout::TRANSFER] = Output::new(vec![(tr, one()), (end_read, one())], Rat::zero());
    outputs[CopyLayout::REPLAY] = Output::new(vec![(tr_end, one()), (rp, one())], Rat::zero());
    outputs[CopyLayout::DONE] = Output::new(vec![(done, one()), (rp_end, one())], Rat::zero());
    for (a, &o) in outs.iter().enumerate() {
        outputs[lay.out(a)] = Output::of(o);
    }
    let g = c.finish(&outputs, true)?;

    let h0 = RatVec::zeros(d_h)
        .with(CopyLayout::READ, one())
        .with(CopyLayout::FIRST, one());
    RnnSpec::new(d_h, m, w_h, w_x, RatVec::zeros(d_h), g, h0, Halt::new(CopyLayout::DONE, one()))
}

/// Payload symbols emitted along a hidden-state trace.
pub fn copy_replay(alphabet: &Alphabet, hidden: &[RatVec]) -> Result<Vec<String>> {
    let lay = layout_for(alphabet)?;
    let payload: Vec<&str> = alphabet.payload().collect();
    Ok(hidden
        .iter()
        .filter_map(|h| lay.emitted(h))
        .map(|a| payload[a].to_string())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::{rnn_run, symbols};

    #[test]
    fn counting_lane_one_quarter_steps() {
        let (rnn, a) = counting_fixture(&Rat::frac(1, 4)).unwrap();
        let run = rnn_run(&rnn, &a, &symbols("c $"), 20).unwrap();
        let lane1: Vec<Rat> = run.hidden_states.iter().map(|h| h.get(1).clone()).collect();
        let want: Vec<Rat> = [0, 0, 1, 2, 3, 4].iter().map(|&k| Rat::frac(k, 4)).collect();
        assert_eq!(lane1, want);
        assert_eq!(run.halt_step, Some(5));
    }

    #[test]
    fn counting_delta_one_saturates() {
        let (rnn, a) = counting_fixture(&Rat::one()).unwrap();
        let run = rnn_run(&rnn, &a, &symbols("c $"), 20).unwrap();
        assert_eq!(run.halt_step, Some(2));
        assert!(counting_fixture(&Rat::zero()).is_err());
        assert!(counting_fixture(&Rat::int(2)).is_err());
    }

    #[test]
    fn counting_latch_ignores_repeats() {
        let (rnn, a) = counting_fixture(&Rat::frac(1, 3)).unwrap();
        let once = rnn_run(&rnn, &a, &symbols("c $"), 10).unwrap();
        let many = rnn_run(&rnn, &a, &symbols("c c c $"), 10).unwrap();
        assert_eq!(once.hidden_states, many.hidden_states);
    }

    #[test]
    fn copy_replays_payload() {
        let a = copy_alphabet(&["a", "b"]).unwrap();
        let rnn = copy_fixture(&a).unwrap();
        for text in ["a b $", "b b a $", "$", "# a $"] {
            let run = rnn_run(&rnn, &a, &symbols(text), 100).unwrap();
            assert!(run.halted, "{text}");
            let want: Vec<String> = symbols(text).into_iter().filter(|s| s != "#" && s != "$").collect();
            assert_eq!(copy_replay(&a, &run.hidden_states).unwrap(), want, "{text}");
        }
    }

    #[test]
    fn copy_rejects_bad_alphabets() {
        let a = Alphabet::with_payload(1, &[("a", RatVec::from_ints(&[2]))]).unwrap();
        assert!(copy_fixture(&a).is_err());
        let names = ["a", "b", "c", "d", "e", "f", "g"];
        assert!(copy_fixture(&copy_alphabet(&names).unwrap()).is_err());
    }
}
