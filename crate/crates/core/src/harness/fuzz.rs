use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::cosim::{cosimulate, VerifyReport};
use crate::compile::{directional::compile_directional, vanilla::compile_vanilla};
use crate::error::Result;
use crate::exec::{map_indexed, Exec};
use crate::numeric::{Rat, RatMat, RatVec};
use crate::seq::{Alphabet, Ffn, FfnLayer, Halt, RnnSpec, BEGIN, END};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub cases: usize,
    pub seed: u64,
    pub max_d_h: usize,
    pub max_d_b: usize,
    /// Including `#` and `$`.
    pub max_alphabet: usize,
    /// Longest directional input, `#` and `$` included.
    pub max_len: usize,
    /// Decoding steps beyond the input length.
    pub extra_steps: usize,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            cases: 200,
            seed: 0,
            max_d_h: 8,
            max_d_b: 4,
            max_alphabet: 5,
            max_len: 12,
            extra_steps: 4,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FuzzCase {
    pub index: usize,
    pub rnn: RnnSpec,
    pub alphabet: Alphabet,
    /// Payload followed by `$`; the directional run gets a leading `#`.
    pub input: Vec<String>,
}

impl FuzzCase {
    pub fn directional_input(&self) -> Vec<String> {
        std::iter::once(BEGIN.to_string()).chain(self.input.iter().cloned()).collect()
    }

    pub fn max_steps(&self, cfg: &FuzzConfig) -> usize {
        self.input.len() + 1 + cfg.extra_steps
    }
}

/// `p / q` with `p ∈ {−2..2}`, `q ∈ {1, 2, 4}`.
fn grid(rng: &mut ChaCha8Rng) -> Rat {
    let q = [1, 2, 4][rng.gen_range(0..3)];
    Rat::frac(rng.gen_range(-2..=2), q)
}

fn grid_mat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RatMat {
    let mut m = RatMat::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, grid(rng));
        }
    }
    m
}

fn grid_vec(rng: &mut ChaCha8Rng, n: usize) -> RatVec {
    RatVec::new((0..n).map(|_| grid(rng)).collect())
}

/// Case `index` of the campaign; depends only on `(seed, index)`.
pub fn fuzz_case(cfg: &FuzzConfig, index: usize) -> Result<FuzzCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let d_h = rng.gen_range(1..=cfg.max_d_h);
    let d_b = rng.gen_range(1..=cfg.max_d_b);
    let payload = rng.gen_range(1..=cfg.max_alphabet.saturating_sub(2).max(1));

    let g = if rng.gen_bool(0.5) {
        Ffn::sigma_identity(d_h)
    } else {
        let width = rng.gen_range(1..=4);
        let first = FfnLayer::new(grid_mat(&mut rng, width, d_h), grid_vec(&mut rng, width))?;
        let second = FfnLayer::new(grid_mat(&mut rng, d_h, width), grid_vec(&mut rng, d_h))?;
        Ffn::new(vec![first, second], true)?
    };
    let h0 = RatVec::new((0..d_h).map(|_| Rat::frac(rng.gen_range(0..=4), 4)).collect());
    let rnn = RnnSpec::new(
        d_h,
        d_b,
        grid_mat(&mut rng, d_h, d_h),
        grid_mat(&mut rng, d_h, d_b),
        grid_vec(&mut rng, d_h),
        g,
        h0,
        Halt::new(rng.gen_range(0..d_h), Rat::one()),
    )?;

    let names: Vec<String> = (0..payload).map(|i| format!("s{i}")).collect();
    let embeddings: Vec<(&str, RatVec)> = names.iter().map(|s| (s.as_str(), grid_vec(&mut rng, d_b))).collect();
    let alphabet = Alphabet::with_payload(d_b, &embeddings)?;

    let len = rng.gen_range(0..=cfg.max_len.saturating_sub(2));
    let mut input: Vec<String> = (0..len).map(|_| names[rng.gen_range(0..payload)].clone()).collect();
    input.push(END.to_string());
    Ok(FuzzCase {
        index,
        rnn,
        alphabet,
        input,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzOutcome {
    pub index: usize,
    pub vanilla: VerifyReport,
    pub directional: VerifyReport,
}

impl FuzzOutcome {
    pub fn passed(&self) -> bool {
        self.vanilla.passed() && self.directional.passed()
    }
}

pub fn check_case(cfg: &FuzzConfig, case: &FuzzCase) -> Result<FuzzOutcome> {
    let steps = case.max_steps(cfg);
    let van = compile_vanilla(&case.rnn, &case.alphabet)?;
    let dir = compile_directional(&case.rnn, &case.alphabet)?;
    Ok(FuzzOutcome {
        index: case.index,
        vanilla: cosimulate(&case.rnn, &van, &case.input, steps)?,
        directional: cosimulate(&case.rnn, &dir, &case.directional_input(), steps)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub config: FuzzConfig,
    pub cases: usize,
    pub passed: usize,
    pub halted_vanilla: usize,
    pub halted_directional: usize,
    /// Failing outcomes in case order.
    pub failures: Vec<FuzzOutcome>,
}

impl FuzzSummary {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Generates and checks every case; results are merged by case index, so
/// the summary does not depend on `exec`.
pub fn run_fuzz(cfg: &FuzzConfig, exec: Exec) -> Result<FuzzSummary> {
    let outcomes = map_indexed(exec, cfg.cases, |i| fuzz_case(cfg, i).and_then(|c| check_case(cfg, &c)));
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(FuzzSummary {
        config: cfg.clone(),
        cases: outcomes.len(),
        passed: outcomes.iter().filter(|o| o.passed()).count(),
        halted_vanilla: outcomes.iter().filter(|o| o.vanilla.rnn_halt_step.is_some()).count(),
        halted_directional: outcomes.iter().filter(|o| o.directional.rnn_halt_step.is_some()).count(),
        failures: outcomes.into_iter().filter(|o| !o.passed()).collect(),
    })
}
