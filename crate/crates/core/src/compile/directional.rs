//! RNN to directional Transformer: no positional encodings, causal
//! encoder, cross-attention truncated to the prefix read so far, `<q, k>`
//! scoring. Position is recovered from running symbol proportions.
//!
//! Residual stream layout: `[h | h' | s | A | x1 | B | C | D]` with
//! `|A| = |B| = |C| = |D| = |Σ|`, so `d = 2 d_h + d_e + 4|Σ| + 1`.
//! The decoder input at step `t` is `[h_t, 0, 0, 0, 2^{-t}, 0, 0, ω]`
//! with `ω = ω_{min(t−1, n)}` (zero at `t = 0`).

use serde::Serialize;

use super::recurrence::{embedding_bounds, recurrence_ffn, reject_affine, Cancel};
use crate::circuit::{Circuit, Output};
use crate::error::{check_dim, Error, Result};
use crate::numeric::{hardmax, sigma, Rat, RatMat, RatVec, ScoringKind};
use crate::seq::{Alphabet, Ffn, FfnLayer, Halt, RnnSpec, BEGIN};
use crate::transformer::{DecoderLayer, EncoderLayer, TransformerSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectionalLayout {
    pub d_h: usize,
    pub d_e: usize,
    pub m: usize,
}

impl DirectionalLayout {
    pub fn new(d_h: usize, d_e: usize, m: usize) -> Self {
        DirectionalLayout { d_h, d_e, m }
    }

    pub fn h1(&self) -> usize {
        0
    }

    pub fn h2(&self) -> usize {
        self.d_h
    }

    pub fn s(&self) -> usize {
        2 * self.d_h
    }

    pub fn a(&self) -> usize {
        2 * self.d_h + self.d_e
    }

    pub fn x1(&self) -> usize {
        self.a() + self.m
    }

    pub fn b(&self) -> usize {
        self.x1() + 1
    }

    pub fn c(&self) -> usize {
        self.b() + self.m
    }

    pub fn d_block(&self) -> usize {
        self.c() + self.m
    }

    pub fn d(&self) -> usize {
        2 * self.d_h + self.d_e + 4 * self.m + 1
    }

    pub fn blocks(&self) -> Vec<(&'static str, usize, usize)> {
        vec![
            ("h1", self.h1(), self.d_h),
            ("h2", self.h2(), self.d_h),
            ("s", self.s(), self.d_e),
            ("A", self.a(), self.m),
            ("x1", self.x1(), 1),
            ("B", self.b(), self.m),
            ("C", self.c(), self.m),
            ("D", self.d_block(), self.m),
        ]
    }

    pub fn decoder_input(&self, h: &RatVec, t: usize, omega_prev: &RatVec) -> RatVec {
        RatVec::zeros(self.d())
            .with_block(self.h1(), h)
            .with(self.x1(), Rat::pow2_recip(t as u32))
            .with_block(self.d_block(), omega_prev)
    }
}

/// '#' first, '$' (if present) last, at least one symbol.
pub fn validate_input(alphabet: &Alphabet, input: &[String]) -> Result<()> {
    alphabet.validate_input(input, false)?;
    if input[0] != BEGIN {
        return Err(Error::InvalidInput("directional input must start with '#'".into()));
    }
    Ok(())
}

/// Symbol counts over `s_0 .. s_{t̄}`, `t̄ = min(t, n)`, and their average.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProportionState {
    pub t: usize,
    pub counts: Vec<usize>,
    pub omega: RatVec,
}

impl ProportionState {
    pub fn at(alphabet: &Alphabet, input: &[String], t: usize) -> Result<Self> {
        validate_input(alphabet, input)?;
        let last = t.min(input.len() - 1);
        let mut counts = vec![0usize; alphabet.len()];
        for s in &input[..=last] {
            counts[alphabet.index_of(s)?] += 1;
        }
        let len = Rat::from(last + 1);
        let omega = RatVec::new(counts.iter().map(|&c| Rat::from(c) / &len).collect());
        Ok(ProportionState { t, counts, omega })
    }
}

pub fn omega(alphabet: &Alphabet, input: &[String], t: usize) -> Result<RatVec> {
    Ok(ProportionState::at(alphabet, input, t)?.omega)
}

/// `ω_{t−1}` clamped to the input, and zero for `t = 0`.
pub fn omega_prev(alphabet: &Alphabet, input: &[String], t: usize) -> Result<RatVec> {
    match t {
        0 => {
            validate_input(alphabet, input)?;
            Ok(RatVec::zeros(alphabet.len()))
        }
        _ => omega(alphabet, input, t - 1),
    }
}

/// `σ(ω_t − ω_{t−1})` on every coordinate but `$`, which holds `2^{-(t+1)}`.
pub fn delta(alphabet: &Alphabet, input: &[String], t: usize) -> Result<RatVec> {
    let now = omega(alphabet, input, t)?;
    let before = omega_prev(alphabet, input, t)?;
    let end = alphabet.end_index();
    Ok(RatVec::new(
        (0..alphabet.len())
            .map(|k| {
                if k == end {
                    Rat::pow2_recip(t as u32 + 1)
                } else {
                    sigma(&(now.get(k) - before.get(k)))
                }
            })
            .collect(),
    ))
}

/// Hard-attention weights of `δ_t` against the one-hot keys of `s_0 .. s_{t̄}`.
pub fn claim1_weights(alphabet: &Alphabet, input: &[String], t: usize) -> Result<RatVec> {
    let dlt = delta(alphabet, input, t)?;
    let last = t.min(input.len() - 1);
    let scores = input[..=last]
        .iter()
        .map(|s| Ok(dlt.get(alphabet.index_of(s)?).clone()))
        .collect::<Result<Vec<_>>>()?;
    hardmax(&scores)
}

/// First decoder FFN: turns the cross-attention average `ω_t̄` (block C)
/// and the previous average (block D) into `δ_t` (block A), halves `x1`,
/// moves `ω_t̄` into D and clears `s̄` and C.
pub fn build_o1(layout: &DirectionalLayout, alphabet: &Alphabet) -> Result<Ffn> {
    check_dim("alphabet size", layout.m, alphabet.len())?;
    check_dim("embedding width", layout.d_e, alphabet.d_b())?;
    let d = layout.d();
    let end = alphabet.end_index();
    let mut c = Circuit::new(d);
    let mut outputs = vec![Output::zero(); d];
    let one = Rat::one();
    let minus = -Rat::one();

    let half = c.gate(&[(c.input(layout.x1()), Rat::frac(1, 2))], Rat::zero());
    outputs[layout.a() + end] = Output::of(half);
    outputs[layout.x1()] = Output::new(vec![(half, minus.clone())], Rat::zero());
    for k in 0..layout.m {
        let (ck, dk) = (c.input(layout.c() + k), c.input(layout.d_block() + k));
        if k != end {
            let dl = c.gate(&[(ck, one.clone()), (dk, minus.clone())], Rat::zero());
            outputs[layout.a() + k] = Output::of(dl);
        }
        let cu = c.gate(&[(ck, one.clone())], Rat::zero());
        let du = c.gate(&[(dk, one.clone())], Rat::zero());
        outputs[layout.c() + k] = Output::new(vec![(cu, minus.clone())], Rat::zero());
        outputs[layout.d_block() + k] = Output::new(vec![(cu, one.clone()), (du, minus.clone())], Rat::zero());
    }
    for (j, (lo, hi)) in embedding_bounds(alphabet).iter().enumerate() {
        let at = layout.s() + j;
        outputs[at] = Output::new(c.split_terms(at, lo, hi, &minus), Rat::zero());
    }
    c.finish(&outputs, false)
}

/// Second decoder FFN: one RNN step on the retrieved symbol, clearing the
/// symbol, `δ` and the retrieved one-hot.
pub fn build_o2(rnn: &RnnSpec, alphabet: &Alphabet) -> Result<Ffn> {
    let lay = DirectionalLayout::new(rnn.d_h, rnn.d_b, alphabet.len());
    let extra: Vec<Cancel> = (0..lay.m)
        .flat_map(|k| [Cancel::unit(lay.a() + k), Cancel::unit(lay.c() + k)])
        .collect();
    recurrence_ffn(rnn, alphabet, lay.d(), lay.h1(), lay.s(), &extra)
}

pub fn compile_directional(rnn: &RnnSpec, alphabet: &Alphabet) -> Result<TransformerSpec> {
    rnn.validate()?;
    reject_affine(rnn)?;
    check_dim("alphabet embedding width", rnn.d_b, alphabet.d_b())?;
    let m = alphabet.len();
    let lay = DirectionalLayout::new(rnn.d_h, rnn.d_b, m);
    let d = lay.d();

    let mut symbol_map = RatMat::zeros(d, rnn.d_b);
    let mut final_value = RatMat::zeros(d, d);
    for j in 0..rnn.d_b {
        symbol_map.set(lay.s() + j, j, Rat::one());
        final_value.set(lay.s() + j, lay.s() + j, Rat::one());
    }
    let mut onehot_map = RatMat::zeros(d, m);
    let mut final_key = RatMat::zeros(d, d);
    for k in 0..m {
        onehot_map.set(lay.a() + k, k, Rat::one());
        final_key.set(lay.a() + k, lay.a() + k, Rat::one());
        final_value.set(lay.c() + k, lay.a() + k, Rat::one());
    }

    let spec = TransformerSpec {
        d,
        scoring: ScoringKind::Dot,
        directional: true,
        alphabet: alphabet.clone(),
        symbol_map,
        onehot_map: Some(onehot_map),
        input_pos: None,
        decoder_pos: None,
        encoder_layers: vec![EncoderLayer::passthrough(d)],
        final_key,
        final_value,
        decoder_layers: vec![
            DecoderLayer::with_ffn(d, build_o1(&lay, alphabet)?),
            DecoderLayer::with_ffn(d, build_o2(rnn, alphabet)?),
        ],
        output_map: Ffn::new(vec![FfnLayer::new(RatMat::identity(d), RatVec::zeros(d))?], false)?,
        y0: lay.decoder_input(&rnn.h0, 0, &RatVec::zeros(m)),
        halt: Halt::new(lay.h1() + rnn.halt.index, rnn.halt.target.clone()),
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seq::symbols;

    fn abc() -> Alphabet {
        Alphabet::with_payload(
            3,
            &[("a", RatVec::from_ints(&[1, 0, 0])), ("b", RatVec::from_ints(&[0, 1, 0]))],
        )
        .unwrap()
    }

    fn r(p: i64, q: i64) -> Rat {
        Rat::frac(p, q)
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(DirectionalLayout::new(2, 3, 4).d(), 24);
    }

    #[test]
    fn proportions_and_delta() {
        let a = abc();
        let input = symbols("# a b a");
        assert_eq!(
            omega(&a, &input, 3).unwrap(),
            RatVec::new(vec![r(1, 4), r(1, 2), r(1, 4), Rat::zero()])
        );
        assert_eq!(
            delta(&a, &input, 3).unwrap(),
            RatVec::new(vec![Rat::zero(), r(1, 6), Rat::zero(), r(1, 16)])
        );
        assert_eq!(
            claim1_weights(&a, &input, 3).unwrap(),
            RatVec::new(vec![Rat::zero(), r(1, 2), Rat::zero(), r(1, 2)])
        );
    }

    #[test]
    fn proportions_freeze_past_the_input() {
        let a = abc();
        let input = symbols("# a $");
        assert_eq!(omega(&a, &input, 7).unwrap(), omega(&a, &input, 2).unwrap());
        let dl = delta(&a, &input, 5).unwrap();
        assert_eq!(dl, RatVec::new(vec![Rat::zero(), Rat::zero(), Rat::zero(), r(1, 64)]));
        assert_eq!(claim1_weights(&a, &input, 5).unwrap(), RatVec::new(vec![Rat::zero(), Rat::zero(), Rat::one()]));
    }

    #[test]
    fn placement_errors() {
        let a = abc();
        assert!(omega(&a, &symbols("a b"), 1).is_err());
        assert!(omega(&a, &symbols("# a # b"), 1).is_err());
        assert!(omega(&a, &symbols("# $ a"), 1).is_err());
    }

    #[test]
    fn o1_produces_delta() {
        let a = abc();
        let lay = DirectionalLayout::new(1, 3, 4);
        let o1 = build_o1(&lay, &a).unwrap();
        let input = symbols("# a b a");
        let w = omega(&a, &input, 3).unwrap();
        let wp = omega(&a, &input, 2).unwrap();
        let s_bar = RatVec::new(vec![r(1, 2), r(1, 4), Rat::zero()]);
        let at = RatVec::zeros(lay.d())
            .with(lay.h1(), r(1, 3))
            .with_block(lay.s(), &s_bar)
            .with(lay.x1(), r(1, 8))
            .with_block(lay.c(), &w)
            .with_block(lay.d_block(), &wp);
        let z = at.add(&o1.apply(&at).unwrap()).unwrap();
        let expect = RatVec::zeros(lay.d())
            .with(lay.h1(), r(1, 3))
            .with_block(lay.a(), &delta(&a, &input, 3).unwrap())
            .with(lay.x1(), r(1, 16))
            .with_block(lay.d_block(), &w);
        assert_eq!(z, expect);
    }
}
