//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use turing_xf::directional::{compile_directional, omega};
use turing_xf::exec::Exec;
use turing_xf::harness::{
    ablation_demo, ablation_demo_on, copy_alphabet, copy_fixture, copy_replay, cosimulate, cosimulate_traces,
    counting_fixture, enumerate_reachable, run_fuzz, FuzzConfig, FuzzSummary, TmPipeline,
};
use turing_xf::numeric::{hardmax, sigma, Rat, RatVec};
use turing_xf::seq::{symbols, Alphabet};
use turing_xf::tm::{stack_decode, stack_encode, stack_nonempty, stack_pop, stack_push, stack_top, TmSpec};
use turing_xf::transformer::run;
use turing_xf::vanilla::compile_vanilla;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn campaign() -> FuzzSummary {
    let cfg = FuzzConfig {
        seed: 2024,
        ..FuzzConfig::default()
    };
    run_fuzz(&cfg, Exec::Parallel).expect("fuzz campaign runs")
}

fn failures_of(s: &FuzzSummary, directional: bool) -> Vec<usize> {
    s.failures
        .iter()
        .filter(|o| if directional { !o.directional.passed() } else { !o.vanilla.passed() })
        .map(|o| o.index)
        .collect()
}

fn criterion_1(s: &FuzzSummary) -> Outcome {
    let bad = failures_of(s, false);
    outcome(
        bad.is_empty() && s.cases == 200,
        format!("{} random RNNs, {} halted, failing cases {:?}", s.cases, s.halted_vanilla, bad),
    )
}

fn criterion_2(s: &FuzzSummary) -> Outcome {
    let bad = failures_of(s, true);
    outcome(
        bad.is_empty() && s.cases == 200,
        format!("{} random RNNs, {} halted, failing cases {:?}", s.cases, s.halted_directional, bad),
    )
}

/// Every word over `payload` of length `0..=max`.
fn words(payload: &[String], max: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &frontier {
            for s in payload {
                let mut v: Vec<String> = w.clone();
                v.push(s.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn criterion_3() -> Outcome {
    let mut checked = 0usize;
    for names in [vec!["a"], vec!["a", "b"]] {
        let payload: Vec<(&str, RatVec)> = names.iter().map(|&s| (s, RatVec::from_ints(&[1]))).collect();
        let alphabet = Alphabet::with_payload(1, &payload).unwrap();
        let syms = alphabet.symbols().to_vec();
        let body: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        for w in words(&body, 5) {
            for with_end in [false, true] {
                let mut input = vec!["#".to_string()];
                input.extend(w.iter().cloned());
                if with_end {
                    input.push("$".into());
                }
                if input.len() > 6 {
                    continue;
                }
                for t in 1..input.len() {
                    let now = omega(&alphabet, &input, t).unwrap();
                    let before = omega(&alphabet, &input, t - 1).unwrap();
                    for (k, beta) in syms.iter().enumerate() {
                        let diff = now.get(k) - before.get(k);
                        let is_current = &input[t] == beta;
                        if diff.is_positive() != is_current {
                            return outcome(false, format!("{input:?} t={t} k={k}: sign of {diff}"));
                        }
                        if is_current {
                            let phi = input[..t].iter().filter(|s| *s == beta).count() as i64;
                            let closed = Rat::frac(t as i64 - phi, (t * (t + 1)) as i64);
                            if diff != closed {
                                return outcome(false, format!("{input:?} t={t}: {diff} != {closed}"));
                            }
                        }
                        checked += 1;
                    }
                }
            }
        }
    }
    outcome(true, format!("{checked} (input, t, symbol) triples"))
}

/// Averages over every nonempty subset, one mask at a time.
fn brute_subsets(values: &[RatVec]) -> BTreeSet<RatVec> {
    let n = values.len();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let chosen: Vec<&RatVec> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| &values[i]).collect();
        let dim = chosen[0].dim();
        let avg: Vec<Rat> = (0..dim)
            .map(|c| {
                let total: Rat = chosen.iter().map(|v| v.get(c).clone()).sum();
                total / Rat::from(chosen.len())
            })
            .collect();
        out.insert(RatVec::new(avg));
    }
    out
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 1..=12usize {
        for trial in 0..3 {
            let dim = 1 + trial % 2;
            let values: Vec<RatVec> = (0..n)
                .map(|_| RatVec::new((0..dim).map(|_| Rat::frac(rng.gen_range(-3..=3), rng.gen_range(1..=3))).collect()))
                .collect();
            let got = enumerate_reachable(&values).unwrap();
            let want = brute_subsets(&values);
            if got.outputs != want || got.len() as u64 > (1u64 << n) - 1 {
                return outcome(false, format!("enumeration differs from subset oracle at n={n}"));
            }
        }
    }

    let delta = Rat::frac(1, 5);
    let demo = ablation_demo(&delta, 8).unwrap();
    let expected: Vec<Rat> = (0..demo.full.lane1.len())
        .map(|t| if t == 0 { Rat::zero() } else { Rat::frac(t as i64 - 1, 5).min(Rat::one()) })
        .collect();
    if demo.full.lane1 != expected || !demo.passed() || demo.no_dec_enc_residual.distinct_outputs != 1 {
        return outcome(false, "counting ablation at delta 1/5");
    }

    let fine = Rat::frac(1, 1024);
    let wide = ablation_demo_on(&fine, &symbols("c $"), 1100).unwrap();
    let full_distinct = wide.full.lane1[1..].iter().collect::<BTreeSet<_>>().len();
    let cut_distinct = wide.no_dec_enc_residual.distinct_ffn_inputs;
    let pass = wide.full_counts && full_distinct == 1025 && cut_distinct <= 3 && wide.ablated_within_reachable;
    outcome(
        pass,
        format!(
            "subset oracle n<=12; delta 1/5 ablated outputs constant; delta 1/1024: {full_distinct} counts vs {cut_distinct} ablated inputs (bound {})",
            wide.reachable_outputs
        ),
    )
}

fn bits_of(len: usize, code: usize) -> Vec<u8> {
    (0..len).map(|i| ((code >> (len - 1 - i)) & 1) as u8).collect()
}

fn criterion_5() -> Outcome {
    let pipeline = TmPipeline::new(&TmSpec::parity()).unwrap();
    let inputs: Vec<Vec<u8>> = (0..=8).flat_map(|len| (0..1usize << len).map(move |c| bits_of(len, c))).collect();
    let results = turing_xf::exec::map_indexed(Exec::Parallel, inputs.len(), |i| pipeline.check(&inputs[i], 64));
    let mut accepted = 0;
    for (input, r) in inputs.iter().zip(results) {
        let r = r.unwrap();
        let ones = input.iter().filter(|&&b| b == 1).count();
        if !r.passed() || r.tm_accepted != (ones % 2 == 0) {
            return outcome(false, format!("input {input:?}: {r:?}"));
        }
        accepted += r.tm_accepted as usize;
    }
    outcome(true, format!("{} inputs, {accepted} accepted, both Transformers agree", inputs.len()))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..500 {
        let n = rng.gen_range(1..=8);
        let scores: Vec<Rat> = (0..n).map(|_| Rat::frac(rng.gen_range(-4..=4), rng.gen_range(1..=2))).collect();
        let w = hardmax(&scores).unwrap();
        let max = scores.iter().max().unwrap();
        let r = scores.iter().filter(|s| *s == max).count();
        let total: Rat = w.iter().cloned().sum();
        let support_ok = scores
            .iter()
            .zip(w.iter())
            .all(|(s, x)| if s == max { *x == Rat::frac(1, r as i64) } else { x.is_zero() });
        if !total.is_one() || !support_ok {
            return outcome(false, format!("hardmax {scores:?}"));
        }
    }
    for k in -40..=40 {
        let x = Rat::frac(k, 10);
        let want = if k <= 0 { Rat::zero() } else if k >= 10 { Rat::one() } else { x.clone() };
        if sigma(&x) != want {
            return outcome(false, format!("sigma({x})"));
        }
    }
    let mut words = 0;
    for len in 0..=12usize {
        for code in 0..1usize << len {
            let bits = bits_of(len, code);
            let psi = stack_encode(&bits).unwrap();
            if stack_decode(&psi).unwrap() != bits || stack_nonempty(&psi) != Rat::from(len.min(1)) {
                return outcome(false, format!("stack round trip {bits:?}"));
            }
            if let Some(&b) = bits.first() {
                let (rest, top) = stack_pop(&psi).unwrap();
                if top != b || stack_top(&psi) != Rat::from(b as usize) || rest != stack_encode(&bits[1..]).unwrap() {
                    return outcome(false, format!("stack pop {bits:?}"));
                }
                if stack_push(&rest, b).unwrap() != psi {
                    return outcome(false, format!("stack push {bits:?}"));
                }
            }
            words += 1;
        }
    }
    for p in 0..=16 {
        let c = Rat::frac(p, 16);
        for ind in [0, 1] {
            if sigma(&(&c + Rat::int(ind) - Rat::one())) != &c * Rat::int(ind) {
                return outcome(false, format!("gating at c={c}, ind={ind}"));
            }
        }
    }
    outcome(true, format!("hardmax, sigma, {words} stack words, gating grid"))
}

fn criterion_7() -> Outcome {
    let (rnn, alphabet) = counting_fixture(&Rat::frac(1, 4)).unwrap();
    let input = symbols("c $");
    let dump = || {
        let v = compile_vanilla(&rnn, &alphabet).unwrap();
        let d = compile_directional(&rnn, &alphabet).unwrap();
        let hashed = symbols("# c $");
        [
            serde_json::to_vec_pretty(&run(&v, &input, 12).unwrap()).unwrap(),
            serde_json::to_vec_pretty(&run(&d, &hashed, 12).unwrap()).unwrap(),
            serde_json::to_vec_pretty(&cosimulate(&rnn, &v, &input, 12).unwrap()).unwrap(),
            serde_json::to_vec_pretty(&cosimulate(&rnn, &d, &hashed, 12).unwrap()).unwrap(),
        ]
    };
    if dump() != dump() {
        return outcome(false, "trace or report bytes differ between runs");
    }
    let cfg = FuzzConfig {
        cases: 24,
        seed: 7,
        ..FuzzConfig::default()
    };
    let seq = serde_json::to_vec(&run_fuzz(&cfg, Exec::Sequential).unwrap()).unwrap();
    let par = serde_json::to_vec(&run_fuzz(&cfg, Exec::Parallel).unwrap()).unwrap();
    outcome(seq == par, "run/verify bytes stable; sequential and parallel campaigns identical")
}

/// Copy task through both compilers (reported alongside the criteria).
fn copy_task() -> Outcome {
    let names = ["a", "b", "c", "d", "e", "f"];
    let alphabet = copy_alphabet(&names).unwrap();
    let rnn = copy_fixture(&alphabet).unwrap();
    let van = compile_vanilla(&rnn, &alphabet).unwrap();
    let dir = compile_directional(&rnn, &alphabet).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..20 {
        let len = if i == 0 { 0 } else { rng.gen_range(1..=10) };
        let payload: Vec<String> = (0..len).map(|_| names[rng.gen_range(0..names.len())].to_string()).collect();
        let mut plain = payload.clone();
        plain.push("$".into());
        let mut marked = vec!["#".to_string()];
        marked.extend(plain.iter().cloned());
        for (spec, input) in [(&van, &plain), (&dir, &marked)] {
            let c = cosimulate_traces(&rnn, spec, input, 3 * len + 8).unwrap();
            let hidden: Vec<RatVec> = c.transformer.decoder_inputs.iter().map(|y| y.slice(0..rnn.d_h)).collect();
            if !c.report.passed() || copy_replay(&alphabet, &hidden).unwrap() != payload {
                return outcome(false, format!("copy of {payload:?} ({})", c.report.target));
            }
        }
    }
    outcome(true, "20 random strings up to length 10, |Σ| = 8, both compilers")
}

fn main() {
    let mut all = true;
    let mut report = |name: &str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let o = f();
        let took = start.elapsed();
        all &= o.pass;
        println!(
            "{name}: {} ({:.2?}) {}",
            if o.pass { "PASS" } else { "FAIL" },
            took,
            o.detail
        );
        took
    };

    let start = Instant::now();
    let summary = campaign();
    let fuzz_time: Duration = start.elapsed();
    println!("fuzz campaign: 200 cases x 2 compilers in {fuzz_time:.2?}");
    report("criterion 1 (vanilla co-simulation)", &|| criterion_1(&summary));
    report("criterion 2 (directional co-simulation)", &|| criterion_2(&summary));
    report("criterion 3 (proportion sign law)", &criterion_3);
    report("criterion 4 (reachable outputs, ablation)", &criterion_4);
    report("criterion 5 (TM pipeline)", &criterion_5);
    report("criterion 6 (unit laws)", &criterion_6);
    report("criterion 7 (determinism)", &criterion_7);
    report("copy task", &copy_task);

    if !all {
        std::process::exit(1);
    }
}
