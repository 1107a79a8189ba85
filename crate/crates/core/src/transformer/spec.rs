use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::numeric::{require_square, RatMat, RatVec, ScoringKind};
use crate::seq::{Alphabet, Ffn, Halt};

/// Affine positional rule `pos(i) = offset + i · slope`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosRule {
    pub offset: RatVec,
    pub slope: RatVec,
}

impl PosRule {
    pub fn at(&self, i: usize) -> RatVec {
        let mut v = self.slope.scale(&i.into());
        v.add_assign(&self.offset);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderLayer {
    #[serde(rename = "Q")]
    pub query: RatMat,
    #[serde(rename = "K")]
    pub key: RatMat,
    #[serde(rename = "V")]
    pub value: RatMat,
    pub ffn: Ffn,
    pub attn_residual: bool,
    pub ffn_residual: bool,
}

impl EncoderLayer {
    /// Attention that contributes nothing, with both residuals on.
    pub fn passthrough(d: usize) -> Self {
        EncoderLayer {
            query: RatMat::zeros(d, d),
            key: RatMat::zeros(d, d),
            value: RatMat::zeros(d, d),
            ffn: Ffn::zero(d),
            attn_residual: true,
            ffn_residual: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderLayer {
    #[serde(rename = "self_Q")]
    pub self_query: RatMat,
    #[serde(rename = "self_K")]
    pub self_key: RatMat,
    #[serde(rename = "self_V")]
    pub self_value: RatMat,
    #[serde(rename = "cross_Q")]
    pub cross_query: RatMat,
    pub ffn: Ffn,
    pub dec_dec_residual: bool,
    pub dec_enc_residual: bool,
    pub ffn_residual: bool,
}

impl DecoderLayer {
    /// Null self-attention, identity cross query, all residuals on.
    pub fn with_ffn(d: usize, ffn: Ffn) -> Self {
        DecoderLayer {
            self_query: RatMat::zeros(d, d),
            self_key: RatMat::zeros(d, d),
            self_value: RatMat::zeros(d, d),
            cross_query: RatMat::identity(d),
            ffn,
            dec_dec_residual: true,
            dec_enc_residual: true,
            ffn_residual: true,
        }
    }
}

/// Encoder-decoder hard-attention Transformer over exact rationals.
///
/// The encoder input at 1-based position `i` is
/// `symbol_map · f_b(s_i) + onehot_map · e_{s_i} + input_pos(i)`.
/// In directional mode encoder self-attention is causal, cross-attention at
/// step `t` sees only the first `min(t, n) + 1` positions, and no
/// positional rule may be present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformerSpec {
    pub d: usize,
    pub scoring: ScoringKind,
    pub directional: bool,
    pub alphabet: Alphabet,
    pub symbol_map: RatMat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub onehot_map: Option<RatMat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_pos: Option<PosRule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoder_pos: Option<PosRule>,
    pub encoder_layers: Vec<EncoderLayer>,
    #[serde(rename = "final_K")]
    pub final_key: RatMat,
    #[serde(rename = "final_V")]
    pub final_value: RatMat,
    pub decoder_layers: Vec<DecoderLayer>,
    #[serde(rename = "F")]
    pub output_map: Ffn,
    pub y0: RatVec,
    pub halt: Halt,
}

fn check_ffn(context: &str, f: &Ffn, d: usize) -> Result<()> {
    check_dim(&format!("{context} input"), d, f.in_dim())?;
    check_dim(&format!("{context} output"), d, f.out_dim())
}

fn check_pos(context: &str, p: &PosRule, d: usize) -> Result<()> {
    check_dim(&format!("{context} offset"), d, p.offset.dim())?;
    check_dim(&format!("{context} slope"), d, p.slope.dim())
}

impl TransformerSpec {
    pub fn validate(&self) -> Result<()> {
        let d = self.d;
        check_dim("symbol map rows", d, self.symbol_map.rows())?;
        check_dim("symbol map cols", self.alphabet.d_b(), self.symbol_map.cols())?;
        if let Some(m) = &self.onehot_map {
            check_dim("one-hot map rows", d, m.rows())?;
            check_dim("one-hot map cols", self.alphabet.len(), m.cols())?;
        }
        if self.directional && (self.input_pos.is_some() || self.decoder_pos.is_some()) {
            return Err(Error::InvalidSpec("directional Transformer with a positional rule".into()));
        }
        if let Some(p) = &self.input_pos {
            check_pos("input_pos", p, d)?;
        }
        if let Some(p) = &self.decoder_pos {
            check_pos("decoder_pos", p, d)?;
        }
        for (i, l) in self.encoder_layers.iter().enumerate() {
            for (name, m) in [("Q", &l.query), ("K", &l.key), ("V", &l.value)] {
                require_square(&format!("encoder layer {i} {name}"), m, d)?;
            }
            check_ffn(&format!("encoder layer {i} FFN"), &l.ffn, d)?;
        }
        require_square("final K", &self.final_key, d)?;
        require_square("final V", &self.final_value, d)?;
        if self.decoder_layers.is_empty() {
            return Err(Error::InvalidSpec("no decoder layers".into()));
        }
        for (i, l) in self.decoder_layers.iter().enumerate() {
            for (name, m) in [
                ("self Q", &l.self_query),
                ("self K", &l.self_key),
                ("self V", &l.self_value),
                ("cross Q", &l.cross_query),
            ] {
                require_square(&format!("decoder layer {i} {name}"), m, d)?;
            }
            check_ffn(&format!("decoder layer {i} FFN"), &l.ffn, d)?;
        }
        check_ffn("output map", &self.output_map, d)?;
        check_dim("y0", d, self.y0.dim())?;
        if self.halt.index >= d {
            return Err(Error::InvalidSpec(format!("halt index {} outside d = {d}", self.halt.index)));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: TransformerSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}
