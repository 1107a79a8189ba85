use serde::{Deserialize, Serialize};

use super::spec::{DecoderLayer, TransformerSpec};
use crate::error::{check_dim, Error, Result};
use crate::numeric::{attention, RatVec};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderOutput {
    pub keys: Vec<RatVec>,
    pub values: Vec<RatVec>,
}

impl EncoderOutput {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Intermediate vectors of one decoder layer at one step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerRecord {
    pub self_weights: RatVec,
    pub p: RatVec,
    pub cross_weights: RatVec,
    pub a: RatVec,
    pub z: RatVec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: usize,
    pub layers: Vec<LayerRecord>,
    /// `ỹ_{t+1}`, before the decoder positional rule.
    pub output: RatVec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformerTrace {
    pub encoder: EncoderOutput,
    /// `y_0 .. y_T`.
    pub decoder_inputs: Vec<RatVec>,
    pub steps: Vec<StepRecord>,
    pub halted: bool,
    pub halt_step: Option<usize>,
}

pub fn embed_input(spec: &TransformerSpec, input: &[String]) -> Result<Vec<RatVec>> {
    if input.is_empty() {
        return Err(Error::InvalidInput("empty input".into()));
    }
    let a = &spec.alphabet;
    input
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut x = spec.symbol_map.matvec(a.embed(s)?)?;
            if let Some(m) = &spec.onehot_map {
                x.add_assign(&m.matvec(&RatVec::unit(a.len(), a.index_of(s)?))?);
            }
            if let Some(p) = &spec.input_pos {
                x.add_assign(&p.at(i + 1));
            }
            Ok(x)
        })
        .collect()
}

pub fn encode(spec: &TransformerSpec, input: &[String]) -> Result<EncoderOutput> {
    let mut xs = embed_input(spec, input)?;
    for layer in &spec.encoder_layers {
        let keys = xs.iter().map(|x| layer.key.matvec(x)).collect::<Result<Vec<_>>>()?;
        let values = xs.iter().map(|x| layer.value.matvec(x)).collect::<Result<Vec<_>>>()?;
        xs = xs
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let visible = if spec.directional { i + 1 } else { keys.len() };
                let q = layer.query.matvec(x)?;
                let mut a = attention(spec.scoring, &q, &keys[..visible], &values[..visible])?.output;
                if layer.attn_residual {
                    a.add_assign(x);
                }
                let mut z = layer.ffn.apply(&a)?;
                if layer.ffn_residual {
                    z.add_assign(&a);
                }
                Ok(z)
            })
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(EncoderOutput {
        keys: xs.iter().map(|x| spec.final_key.matvec(x)).collect::<Result<_>>()?,
        values: xs.iter().map(|x| spec.final_value.matvec(x)).collect::<Result<_>>()?,
    })
}

/// Number of encoder positions visible to cross-attention at step `t`.
pub fn cross_window(spec: &TransformerSpec, n: usize, t: usize) -> usize {
    if spec.directional {
        (t + 1).min(n)
    } else {
        n
    }
}

fn layer_forward(
    spec: &TransformerSpec,
    layer: &DecoderLayer,
    enc: &EncoderOutput,
    t: usize,
    w: &RatVec,
    self_keys: &[RatVec],
    self_values: &[RatVec],
) -> Result<LayerRecord> {
    let q = layer.self_query.matvec(w)?;
    let s = attention(spec.scoring, &q, self_keys, self_values)?;
    let mut p = s.output;
    if layer.dec_dec_residual {
        p.add_assign(w);
    }
    let window = cross_window(spec, enc.len(), t);
    let cq = layer.cross_query.matvec(&p)?;
    let c = attention(spec.scoring, &cq, &enc.keys[..window], &enc.values[..window])?;
    let mut a = c.output;
    if layer.dec_enc_residual {
        a.add_assign(&p);
    }
    let mut z = layer.ffn.apply(&a)?;
    if layer.ffn_residual {
        z.add_assign(&a);
    }
    Ok(LayerRecord {
        self_weights: s.weights,
        p,
        cross_weights: c.weights,
        a,
        z,
    })
}

/// Incremental decoder that keeps per-layer self-attention keys and values.
pub struct Decoder<'a> {
    spec: &'a TransformerSpec,
    enc: &'a EncoderOutput,
    keys: Vec<Vec<RatVec>>,
    values: Vec<Vec<RatVec>>,
    t: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(spec: &'a TransformerSpec, enc: &'a EncoderOutput) -> Self {
        let n = spec.decoder_layers.len();
        Decoder {
            spec,
            enc,
            keys: vec![Vec::new(); n],
            values: vec![Vec::new(); n],
            t: 0,
        }
    }

    /// Consumes `y_t` and returns the step record holding `ỹ_{t+1}`.
    pub fn step(&mut self, y: &RatVec) -> Result<StepRecord> {
        check_dim("decoder input", self.spec.d, y.dim())?;
        let mut w = y.clone();
        let mut layers = Vec::with_capacity(self.spec.decoder_layers.len());
        for (l, layer) in self.spec.decoder_layers.iter().enumerate() {
            self.keys[l].push(layer.self_key.matvec(&w)?);
            self.values[l].push(layer.self_value.matvec(&w)?);
            let rec = layer_forward(self.spec, layer, self.enc, self.t, &w, &self.keys[l], &self.values[l])?;
            w = rec.z.clone();
            layers.push(rec);
        }
        let output = self.spec.output_map.apply(&w)?;
        let rec = StepRecord {
            t: self.t,
            layers,
            output,
        };
        self.t += 1;
        Ok(rec)
    }
}

/// Full recomputation of the step that consumes `ys = y_0 .. y_t`.
pub fn decode_step(spec: &TransformerSpec, enc: &EncoderOutput, ys: &[RatVec]) -> Result<StepRecord> {
    if ys.is_empty() {
        return Err(Error::Empty("decode_step"));
    }
    let t = ys.len() - 1;
    let mut seq: Vec<RatVec> = ys.to_vec();
    let mut layers = Vec::with_capacity(spec.decoder_layers.len());
    for layer in &spec.decoder_layers {
        let keys = seq.iter().map(|w| layer.self_key.matvec(w)).collect::<Result<Vec<_>>>()?;
        let values = seq.iter().map(|w| layer.self_value.matvec(w)).collect::<Result<Vec<_>>>()?;
        let mut next = Vec::with_capacity(seq.len());
        let mut last = None;
        for (j, w) in seq.iter().enumerate() {
            let rec = layer_forward(spec, layer, enc, j, w, &keys[..=j], &values[..=j])?;
            next.push(rec.z.clone());
            last = Some(rec);
        }
        layers.push(last.expect("nonempty prefix"));
        seq = next;
    }
    let output = spec.output_map.apply(&seq[t])?;
    Ok(StepRecord { t, layers, output })
}

/// `y_{t+1} = ỹ_{t+1} + decoder_pos(t + 1)`.
pub fn next_input(spec: &TransformerSpec, step: &StepRecord) -> RatVec {
    let mut y = step.output.clone();
    if let Some(p) = &spec.decoder_pos {
        y.add_assign(&p.at(step.t + 1));
    }
    y
}

/// Decodes until `y_t` meets the halt condition or `max_steps` steps ran.
pub fn run(spec: &TransformerSpec, input: &[String], max_steps: usize) -> Result<TransformerTrace> {
    spec.validate()?;
    let enc = encode(spec, input)?;
    let mut y = spec.y0.clone();
    let mut trace_inputs = vec![y.clone()];
    let mut steps = Vec::new();
    let mut halt_step = spec.halt.reached(&y).then_some(0);
    if halt_step.is_none() {
        let mut dec = Decoder::new(spec, &enc);
        for t in 0..max_steps {
            let rec = dec.step(&y)?;
            y = next_input(spec, &rec);
            steps.push(rec);
            trace_inputs.push(y.clone());
            if spec.halt.reached(&y) {
                halt_step = Some(t + 1);
                break;
            }
        }
    }
    Ok(TransformerTrace {
        encoder: enc,
        decoder_inputs: trace_inputs,
        steps,
        halted: halt_step.is_some(),
        halt_step,
    })
}
