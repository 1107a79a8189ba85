use std::collections::BTreeSet;

use serde::Serialize;

use super::fixtures::counting_fixture;
use super::reachable::enumerate_reachable;
use crate::compile::vanilla::{compile_vanilla, compile_vanilla_with, VanillaOptions};
use crate::error::Result;
use crate::numeric::{Rat, RatVec};
use crate::seq::symbols;
use crate::transformer::{run, TransformerSpec, TransformerTrace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AblationRun {
    pub label: String,
    /// Lane 1 of the hidden block of `y_0 .. y_T`.
    pub lane1: Vec<Rat>,
    /// Decoder FFN inputs `a_t`.
    pub ffn_inputs: Vec<RatVec>,
    pub outputs: Vec<RatVec>,
    pub distinct_ffn_inputs: usize,
    pub distinct_outputs: usize,
    pub halt_step: Option<usize>,
}

impl AblationRun {
    fn from_trace(label: &str, tr: &TransformerTrace) -> Self {
        let ffn_inputs: Vec<RatVec> = tr.steps.iter().map(|s| s.layers[0].a.clone()).collect();
        let outputs: Vec<RatVec> = tr.steps.iter().map(|s| s.output.clone()).collect();
        AblationRun {
            label: label.into(),
            lane1: tr.decoder_inputs.iter().map(|y| y.get(1).clone()).collect(),
            distinct_ffn_inputs: ffn_inputs.iter().collect::<BTreeSet<_>>().len(),
            distinct_outputs: outputs.iter().collect::<BTreeSet<_>>().len(),
            ffn_inputs,
            outputs,
            halt_step: tr.halt_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AblationReport {
    pub delta: Rat,
    pub steps: usize,
    pub input: Vec<String>,
    /// `0` at `t = 0`, then `min((t − 1)Δ, 1)`.
    pub expected_lane1: Vec<Rat>,
    pub full: AblationRun,
    pub no_dec_enc_residual: AblationRun,
    pub no_dec_dec_residual: AblationRun,
    /// Averages of the encoder values over nonempty subsets.
    pub reachable_outputs: usize,
    pub full_counts: bool,
    pub ablated_constant: bool,
    pub ablated_within_reachable: bool,
    pub dec_dec_unchanged: bool,
}

impl AblationReport {
    pub fn passed(&self) -> bool {
        let single = self.input.len() == 1;
        self.full_counts && self.ablated_within_reachable && self.dec_dec_unchanged && (!single || self.ablated_constant)
    }
}

pub fn expected_lane1(delta: &Rat, len: usize) -> Vec<Rat> {
    (0..len)
        .map(|t| match t {
            0 => Rat::zero(),
            _ => (Rat::from(t - 1) * delta).min(Rat::one()),
        })
        .collect()
}

/// Counting fixture on the single-symbol input `c`.
pub fn ablation_demo(delta: &Rat, steps: usize) -> Result<AblationReport> {
    ablation_demo_on(delta, &symbols("c"), steps)
}

/// Runs the compiled counting Transformer as compiled, with the residual
/// around decoder-encoder attention removed, and with the decoder
/// self-attention residual replaced by a positional identity head.
pub fn ablation_demo_on(delta: &Rat, input: &[String], steps: usize) -> Result<AblationReport> {
    let (rnn, alphabet) = counting_fixture(delta)?;
    let full_spec = compile_vanilla(&rnn, &alphabet)?;
    let mut cut: TransformerSpec = full_spec.clone();
    for layer in &mut cut.decoder_layers {
        layer.dec_enc_residual = false;
    }
    let dd_spec = compile_vanilla_with(
        &rnn,
        &alphabet,
        VanillaOptions {
            decoder_identity_via_attention: true,
            ..VanillaOptions::default()
        },
    )?;

    let full_tr = run(&full_spec, input, steps)?;
    let cut_tr = run(&cut, input, steps)?;
    let dd_tr = run(&dd_spec, input, steps)?;
    let full = AblationRun::from_trace("residual", &full_tr);
    let ablated = AblationRun::from_trace("no_dec_enc_residual", &cut_tr);
    let dd = AblationRun::from_trace("no_dec_dec_residual", &dd_tr);

    let reachable = enumerate_reachable(&cut_tr.encoder.values)?;
    let expected = expected_lane1(delta, full.lane1.len());
    Ok(AblationReport {
        delta: delta.clone(),
        steps,
        input: input.to_vec(),
        full_counts: full.lane1 == expected,
        ablated_constant: ablated.distinct_ffn_inputs <= 1 && ablated.distinct_outputs <= 1,
        ablated_within_reachable: ablated.ffn_inputs.iter().all(|a| reachable.contains(a)),
        dec_dec_unchanged: dd.outputs == full.outputs && dd.lane1 == full.lane1,
        reachable_outputs: reachable.len(),
        expected_lane1: expected,
        full,
        no_dec_enc_residual: ablated,
        no_dec_dec_residual: dd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifth_steps() {
        let r = ablation_demo(&Rat::frac(1, 5), 5).unwrap();
        assert!(r.passed() && r.ablated_constant);
        let lane: Vec<Rat> = [0, 0, 1, 2, 3, 4].iter().map(|&k| Rat::frac(k, 5)).collect();
        assert_eq!(r.full.lane1, lane);
        assert!(r.full.lane1[1..].windows(2).all(|w| w[0] < w[1]));
        assert_eq!(r.no_dec_enc_residual.distinct_outputs, 1);
    }

    #[test]
    fn saturation_then_halt() {
        let r = ablation_demo(&Rat::frac(1, 2), 20).unwrap();
        assert!(r.full_counts);
        assert_eq!(r.full.halt_step, Some(3));
        assert_eq!(r.no_dec_enc_residual.halt_step, None);
    }
}
