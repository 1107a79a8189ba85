use serde::{Deserialize, Serialize};

use crate::compile::directional::{claim1_weights, omega_prev, validate_input, DirectionalLayout};
use crate::compile::vanilla::{retrieval_index, VanillaLayout};
use crate::error::{check_dim, Result};
use crate::numeric::{Rat, RatVec};
use crate::seq::{rnn_run, RnnSpec, RnnTrace};
use crate::transformer::{run, TransformerSpec, TransformerTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mismatch {
    pub step: usize,
    pub block: String,
    pub expected: RatVec,
    pub actual: RatVec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub target: String,
    pub steps_checked: usize,
    pub first_mismatch: Option<Mismatch>,
    pub rnn_halt_step: Option<usize>,
    pub transformer_halt_step: Option<usize>,
    pub halt_match: bool,
    pub verdict: Verdict,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Both traces, for callers that inspect more than the verdict.
#[derive(Debug, Clone)]
pub struct Cosim {
    pub report: VerifyReport,
    pub rnn: RnnTrace,
    pub transformer: TransformerTrace,
}

/// Runs the RNN and the Transformer compiled from it on `input` and compares
/// every decoder input (and the recorded attention weights) against the
/// layout predicted from the RNN trace. The compiler is read off
/// `spec.directional`; directional inputs must start with `#`.
pub fn cosimulate(rnn: &RnnSpec, spec: &TransformerSpec, input: &[String], max_steps: usize) -> Result<VerifyReport> {
    Ok(cosimulate_traces(rnn, spec, input, max_steps)?.report)
}

pub fn cosimulate_traces(rnn: &RnnSpec, spec: &TransformerSpec, input: &[String], max_steps: usize) -> Result<Cosim> {
    let alphabet = &spec.alphabet;
    let expect: Box<dyn Fn(usize, &RatVec) -> Result<RatVec>> = if spec.directional {
        validate_input(alphabet, input)?;
        let lay = DirectionalLayout::new(rnn.d_h, rnn.d_b, alphabet.len());
        check_dim("transformer width", lay.d(), spec.d)?;
        Box::new(move |t, h| Ok(lay.decoder_input(h, t, &omega_prev(alphabet, input, t)?)))
    } else {
        let lay = VanillaLayout::new(rnn.d_h, rnn.d_b);
        check_dim("transformer width", lay.d(), spec.d)?;
        Box::new(move |t, h| Ok(lay.decoder_input(h, t)))
    };
    let blocks = if spec.directional {
        DirectionalLayout::new(rnn.d_h, rnn.d_b, alphabet.len()).blocks()
    } else {
        VanillaLayout::new(rnn.d_h, rnn.d_b).blocks()
    };

    let oracle = rnn_run(rnn, alphabet, input, max_steps)?;
    let trace = run(spec, input, max_steps)?;

    let mut first_mismatch = None;
    let steps = oracle.hidden_states.len().min(trace.decoder_inputs.len());
    let mut checked = 0;
    'steps: for t in 0..steps {
        let want = expect(t, &oracle.hidden_states[t])?;
        let got = &trace.decoder_inputs[t];
        for (name, at, len) in &blocks {
            let (w, g) = (want.slice(*at..at + len), got.slice(*at..at + len));
            if w != g {
                first_mismatch = Some(Mismatch {
                    step: t,
                    block: name.to_string(),
                    expected: w,
                    actual: g,
                });
                break 'steps;
            }
        }
        if let Some(step) = trace.steps.get(t) {
            if let Some(m) = check_weights(spec, input, t, step)? {
                first_mismatch = Some(m);
                break;
            }
        }
        checked = t + 1;
    }
    let halt_match = oracle.halt_step == trace.halt_step;
    let verdict = if first_mismatch.is_none() && halt_match {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Cosim {
        report: VerifyReport {
            target: if spec.directional { "directional" } else { "vanilla" }.into(),
            steps_checked: checked,
            first_mismatch,
            rnn_halt_step: oracle.halt_step,
            transformer_halt_step: trace.halt_step,
            halt_match,
            verdict,
        },
        rnn: oracle,
        transformer: trace,
    })
}

fn weight_mismatch(t: usize, block: &str, expected: RatVec, actual: &RatVec) -> Option<Mismatch> {
    (&expected != actual).then(|| Mismatch {
        step: t,
        block: block.into(),
        expected,
        actual: actual.clone(),
    })
}

/// Vanilla: a single cross-attention one-hot at the retrieved position.
/// Directional: layer 1 uniform over the visible prefix, layer 2 equal to
/// the indicator weights of the current symbol.
fn check_weights(
    spec: &TransformerSpec,
    input: &[String],
    t: usize,
    step: &crate::transformer::StepRecord,
) -> Result<Option<Mismatch>> {
    let n = input.len();
    if spec.directional {
        let visible = (t + 1).min(n);
        let uniform = RatVec::new(vec![Rat::one() / Rat::from(visible); visible]);
        if let Some(m) = weight_mismatch(t, "cross_weights[0]", uniform, &step.layers[0].cross_weights) {
            return Ok(Some(m));
        }
        let claim = claim1_weights(&spec.alphabet, input, t)?;
        Ok(weight_mismatch(t, "cross_weights[1]", claim, &step.layers[1].cross_weights))
    } else {
        let hot = RatVec::unit(n, retrieval_index(t, n) - 1);
        Ok(weight_mismatch(t, "cross_weights", hot, &step.layers[0].cross_weights))
    }
}
