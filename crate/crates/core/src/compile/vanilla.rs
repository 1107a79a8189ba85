//! RNN to vanilla Transformer (positional encodings, full encoder
//! attention, `-|<q, k>|` scoring).
//!
//! Residual stream layout: `[h | s | h' | pos | 1]`, `d = 2 d_h + d_b + 2`.
//! The decoder input at step `t` is `y_t = [h_t, 0, 0, t + 1, 1]`; the
//! cross-attention query `t + 1` retrieves the symbol at position
//! `min(t + 1, n)`.

use super::recurrence::{recurrence_ffn, reject_affine};
use crate::error::{check_dim, Result};
use crate::numeric::{Rat, RatMat, RatVec, ScoringKind};
use crate::seq::{Alphabet, Ffn, FfnLayer, Halt, RnnSpec};
use crate::transformer::{DecoderLayer, EncoderLayer, PosRule, TransformerSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VanillaLayout {
    pub d_h: usize,
    pub d_b: usize,
}

impl VanillaLayout {
    pub fn new(d_h: usize, d_b: usize) -> Self {
        VanillaLayout { d_h, d_b }
    }

    pub fn h(&self) -> usize {
        0
    }

    pub fn s(&self) -> usize {
        self.d_h
    }

    pub fn h2(&self) -> usize {
        self.d_h + self.d_b
    }

    pub fn pos(&self) -> usize {
        2 * self.d_h + self.d_b
    }

    pub fn one(&self) -> usize {
        self.pos() + 1
    }

    pub fn d(&self) -> usize {
        2 * self.d_h + self.d_b + 2
    }

    /// Named blocks as `(name, start, len)`.
    pub fn blocks(&self) -> Vec<(&'static str, usize, usize)> {
        vec![
            ("h", self.h(), self.d_h),
            ("s", self.s(), self.d_b),
            ("h_scratch", self.h2(), self.d_h),
            ("pos", self.pos(), 1),
            ("one", self.one(), 1),
        ]
    }

    /// Expected decoder input `y_t = [h_t, 0, 0, t + 1, 1]`.
    pub fn decoder_input(&self, h: &RatVec, t: usize) -> RatVec {
        RatVec::zeros(self.d())
            .with_block(self.h(), h)
            .with(self.pos(), Rat::from(t + 1))
            .with(self.one(), Rat::one())
    }
}

/// Compilation variants used by the residual-ablation study.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VanillaOptions {
    /// Encoder self-attention reproduces `x_i` positionally, without a residual.
    pub encoder_identity_via_attention: bool,
    /// Decoder self-attention reproduces `y_t` positionally, without a residual.
    pub decoder_identity_via_attention: bool,
}

/// 1-based encoder position read at decoding step `t`.
pub fn retrieval_index(t: usize, n: usize) -> usize {
    (t + 1).min(n)
}

pub fn input_embedding(layout: &VanillaLayout, alphabet: &Alphabet, symbol: &str, i: usize) -> Result<RatVec> {
    check_dim("alphabet width", layout.d_b, alphabet.d_b())?;
    Ok(RatVec::zeros(layout.d())
        .with_block(layout.s(), alphabet.embed(symbol)?)
        .with(layout.pos(), Rat::from(i))
        .with(layout.one(), Rat::one()))
}

pub fn build_o_dec(rnn: &RnnSpec, alphabet: &Alphabet) -> Result<Ffn> {
    let lay = VanillaLayout::new(rnn.d_h, rnn.d_b);
    recurrence_ffn(rnn, alphabet, lay.d(), lay.h(), lay.s(), &[])
}

/// `q[pos], q[one]` copy the input; `k = [.., −1, pos]`, so the score
/// against position `j` is `−|j − i|`.
fn positional_identity(lay: &VanillaLayout) -> (RatMat, RatMat, RatMat) {
    let d = lay.d();
    let mut q = RatMat::zeros(d, d);
    q.set(lay.pos(), lay.pos(), Rat::one());
    q.set(lay.one(), lay.one(), Rat::one());
    let mut k = RatMat::zeros(d, d);
    k.set(lay.pos(), lay.one(), -Rat::one());
    k.set(lay.one(), lay.pos(), Rat::one());
    (q, k, RatMat::identity(d))
}

pub fn compile_vanilla(rnn: &RnnSpec, alphabet: &Alphabet) -> Result<TransformerSpec> {
    compile_vanilla_with(rnn, alphabet, VanillaOptions::default())
}

pub fn compile_vanilla_with(rnn: &RnnSpec, alphabet: &Alphabet, opts: VanillaOptions) -> Result<TransformerSpec> {
    rnn.validate()?;
    reject_affine(rnn)?;
    check_dim("alphabet embedding width", rnn.d_b, alphabet.d_b())?;
    let lay = VanillaLayout::new(rnn.d_h, rnn.d_b);
    let d = lay.d();

    let mut symbol_map = RatMat::zeros(d, rnn.d_b);
    for j in 0..rnn.d_b {
        symbol_map.set(lay.s() + j, j, Rat::one());
    }

    let mut enc = EncoderLayer::passthrough(d);
    if opts.encoder_identity_via_attention {
        let (q, k, v) = positional_identity(&lay);
        enc.query = q;
        enc.key = k;
        enc.value = v;
        enc.attn_residual = false;
    }

    let mut final_key = RatMat::zeros(d, d);
    final_key.set(lay.pos(), lay.one(), -Rat::one());
    final_key.set(lay.one(), lay.pos(), Rat::one());
    let mut final_value = RatMat::zeros(d, d);
    for j in 0..rnn.d_b {
        final_value.set(lay.s() + j, lay.s() + j, Rat::one());
    }

    let mut dec = DecoderLayer::with_ffn(d, build_o_dec(rnn, alphabet)?);
    if opts.decoder_identity_via_attention {
        let (q, k, v) = positional_identity(&lay);
        dec.self_query = q;
        dec.self_key = k;
        dec.self_value = v;
        dec.dec_dec_residual = false;
    }

    let mut project = RatMat::identity(d);
    project.set(lay.pos(), lay.pos(), Rat::zero());
    project.set(lay.one(), lay.one(), Rat::zero());
    let output_map = Ffn::new(vec![FfnLayer::new(project, RatVec::zeros(d))?], false)?;

    let e_pos = RatVec::unit(d, lay.pos());
    let e_one = RatVec::unit(d, lay.one());
    let spec = TransformerSpec {
        d,
        scoring: ScoringKind::NegAbsDot,
        directional: false,
        alphabet: alphabet.clone(),
        symbol_map,
        onehot_map: None,
        input_pos: Some(PosRule {
            offset: e_one.clone(),
            slope: e_pos.clone(),
        }),
        decoder_pos: Some(PosRule {
            offset: e_pos.add(&e_one)?,
            slope: e_pos,
        }),
        encoder_layers: vec![enc],
        final_key,
        final_value,
        decoder_layers: vec![dec],
        output_map,
        y0: lay.decoder_input(&rnn.h0, 0),
        halt: Halt::new(lay.h() + rnn.halt.index, rnn.halt.target.clone()),
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transformer::encode;

    fn tiny() -> (RnnSpec, Alphabet) {
        let rnn = RnnSpec::new(
            1,
            1,
            RatMat::from_int_rows(&[&[1]]).unwrap(),
            RatMat::from_int_rows(&[&[1]]).unwrap(),
            RatVec::zeros(1),
            Ffn::sigma_identity(1),
            RatVec::zeros(1),
            Halt::new(0, Rat::one()),
        )
        .unwrap();
        let a = Alphabet::with_payload(1, &[("a", RatVec::new(vec![Rat::frac(1, 4)]))]).unwrap();
        (rnn, a)
    }

    #[test]
    fn dimension_formula() {
        assert_eq!(VanillaLayout::new(2, 3).d(), 9);
    }

    #[test]
    fn o_dec_on_fixture_vector() {
        let (rnn, a) = tiny();
        let o = build_o_dec(&rnn, &a).unwrap();
        let q = Rat::frac(1, 4);
        let at = RatVec::new(vec![q.clone(), q.clone(), Rat::zero(), Rat::int(2), Rat::one()]);
        let out = o.apply(&at).unwrap();
        assert_eq!(out, RatVec::new(vec![q.clone(), -q, Rat::zero(), Rat::zero(), Rat::zero()]));
    }

    #[test]
    fn keys_are_positional() {
        let rnn = RnnSpec::new(
            2,
            3,
            RatMat::identity(2),
            RatMat::zeros(2, 3),
            RatVec::zeros(2),
            Ffn::sigma_identity(2),
            RatVec::zeros(2),
            Halt::new(0, Rat::one()),
        )
        .unwrap();
        let a = Alphabet::with_payload(3, &[("a", RatVec::from_ints(&[1, 0, 0]))]).unwrap();
        let spec = compile_vanilla(&rnn, &a).unwrap();
        assert_eq!(spec.d, 9);
        let input: Vec<String> = ["a", "a", "a", "a", "$"].iter().map(|s| s.to_string()).collect();
        let enc = encode(&spec, &input).unwrap();
        assert_eq!(enc.keys[3], RatVec::from_ints(&[0, 0, 0, 0, 0, 0, 0, -1, 4]));
        let x = input_embedding(&VanillaLayout::new(2, 3), &a, "a", 4).unwrap();
        assert_eq!(x, RatVec::from_ints(&[0, 0, 1, 0, 0, 0, 0, 4, 1]));
    }

    #[test]
    fn retrieval_clamps() {
        assert_eq!(retrieval_index(0, 3), 1);
        assert_eq!(retrieval_index(2, 3), 3);
        assert_eq!(retrieval_index(9, 3), 3);
    }

    #[test]
    fn affine_g_rejected() {
        let (mut rnn, a) = tiny();
        rnn.g = Ffn::zero(1);
        assert!(compile_vanilla(&rnn, &a).is_err());
    }

    #[test]
    fn spec_json_round_trip() {
        let (rnn, a) = tiny();
        let spec = compile_vanilla(&rnn, &a).unwrap();
        let back = TransformerSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
    }
}
