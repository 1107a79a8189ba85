//! The decoder FFNs evaluated on hand-assembled residual vectors, checked
//! against counting and `rnn_step` oracles.

use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use turing_xf::directional::{build_o1, build_o2, DirectionalLayout};
use turing_xf::harness::{fuzz_case, FuzzConfig};
use turing_xf::numeric::{sigma, Rat, RatVec};
use turing_xf::seq::{rnn_step, Alphabet};
use turing_xf::vanilla::{build_o_dec, VanillaLayout};

fn grid01(rng: &mut ChaCha8Rng) -> Rat {
    Rat::frac(rng.gen_range(0..=8), 8)
}

fn random_hidden(rng: &mut ChaCha8Rng, d: usize) -> RatVec {
    RatVec::new((0..d).map(|_| grid01(rng)).collect())
}

fn three(rng: &mut ChaCha8Rng) -> Alphabet {
    let e = |rng: &mut ChaCha8Rng| RatVec::new(vec![Rat::frac(rng.gen_range(-4..=4), 2), Rat::frac(rng.gen_range(0..=3), 3)]);
    let (a, b) = (e(rng), e(rng));
    Alphabet::with_payload(2, &[("a", a), ("b", b)]).unwrap()
}

/// Counts of each symbol over `input[..=last]`.
fn counts(alphabet: &Alphabet, input: &[String], last: usize) -> Vec<i64> {
    alphabet
        .symbols()
        .iter()
        .map(|s| input[..=last].iter().filter(|x| *x == s).count() as i64)
        .collect()
}

#[test]
fn o1_on_random_layouts() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let alphabet = three(&mut rng);
        let m = alphabet.len();
        let lay = DirectionalLayout::new(3, 2, m);
        let o1 = build_o1(&lay, &alphabet).unwrap();

        let len = rng.gen_range(0..6);
        let mut input = vec!["#".to_string()];
        input.extend((0..len).map(|_| if rng.gen_bool(0.5) { "a" } else { "b" }.to_string()));
        if rng.gen_bool(0.5) {
            input.push("$".into());
        }
        let n = input.len() - 1;
        let t = rng.gen_range(0..n + 3);
        let bar = t.min(n);

        let now = counts(&alphabet, &input, bar);
        let omega_now = RatVec::new(now.iter().map(|&c| Rat::frac(c, bar as i64 + 1)).collect());
        let omega_before = match t {
            0 => RatVec::zeros(m),
            _ => {
                let b = (t - 1).min(n);
                RatVec::new(counts(&alphabet, &input, b).iter().map(|&c| Rat::frac(c, b as i64 + 1)).collect())
            }
        };
        let mut s_bar = RatVec::zeros(2);
        for s in &input[..=bar] {
            s_bar = s_bar.add(alphabet.embed(s).unwrap()).unwrap();
        }
        let s_bar = s_bar.scale(&Rat::frac(1, bar as i64 + 1));
        let h = random_hidden(&mut rng, 3);
        let x1 = Rat::pow2_recip(t as u32);

        let a = RatVec::zeros(lay.d())
            .with_block(lay.h1(), &h)
            .with_block(lay.s(), &s_bar)
            .with(lay.x1(), x1.clone())
            .with_block(lay.c(), &omega_now)
            .with_block(lay.d_block(), &omega_before);
        let end = alphabet.end_index();
        let delta: Vec<Rat> = (0..m)
            .map(|k| if k == end { &x1 / Rat::int(2) } else { sigma(&(omega_now.get(k) - omega_before.get(k))) })
            .collect();
        let want = RatVec::zeros(lay.d())
            .with_block(lay.h1(), &h)
            .with_block(lay.a(), &RatVec::new(delta))
            .with(lay.x1(), &x1 / Rat::int(2))
            .with_block(lay.d_block(), &omega_now);
        let got = o1.apply(&a).unwrap().add(&a).unwrap();
        assert_eq!(got, want, "input {input:?} t {t}");
    }
}

#[test]
fn o1_zero_input_stays_zero() {
    let alphabet = three(&mut ChaCha8Rng::seed_from_u64(1));
    let lay = DirectionalLayout::new(1, 2, alphabet.len());
    let o1 = build_o1(&lay, &alphabet).unwrap();
    assert!(o1.apply(&RatVec::zeros(lay.d())).unwrap().is_zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn o_dec_advances_the_rnn(case in 0usize..400, seed in 0u64..4, t in 0usize..20) {
        let cfg = FuzzConfig { seed, ..FuzzConfig::default() };
        let c = fuzz_case(&cfg, case).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(case as u64 ^ seed << 32);
        let lay = VanillaLayout::new(c.rnn.d_h, c.rnn.d_b);
        let o = build_o_dec(&c.rnn, &c.alphabet).unwrap();
        let h = random_hidden(&mut rng, c.rnn.d_h);
        let sym = &c.alphabet.symbols()[rng.gen_range(0..c.alphabet.len())];
        let s = c.alphabet.embed(sym).unwrap();
        let a = RatVec::zeros(lay.d())
            .with_block(lay.h(), &h)
            .with_block(lay.s(), s)
            .with(lay.pos(), Rat::from(t + 1))
            .with(lay.one(), Rat::one());
        let next = rnn_step(&c.rnn, &h, s).unwrap();
        prop_assert_eq!(o.apply(&a).unwrap().add(&a).unwrap(), lay.decoder_input(&next, t));
    }

    #[test]
    fn o2_advances_the_rnn(case in 0usize..400, seed in 0u64..4, t in 0usize..20) {
        let cfg = FuzzConfig { seed, ..FuzzConfig::default() };
        let c = fuzz_case(&cfg, case).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(case as u64 ^ seed << 32);
        let m = c.alphabet.len();
        let lay = DirectionalLayout::new(c.rnn.d_h, c.rnn.d_b, m);
        let o2 = build_o2(&c.rnn, &c.alphabet).unwrap();
        let h = random_hidden(&mut rng, c.rnn.d_h);
        let k = rng.gen_range(0..m);
        let s = c.alphabet.embedding(k);
        let delta = random_hidden(&mut rng, m);
        let omega = random_hidden(&mut rng, m);
        let x1 = Rat::pow2_recip(t as u32 + 1);
        let base = RatVec::zeros(lay.d())
            .with(lay.x1(), x1)
            .with_block(lay.d_block(), &omega);
        let a = base
            .with_block(lay.h1(), &h)
            .with_block(lay.s(), s)
            .with_block(lay.a(), &delta)
            .with_block(lay.c(), &RatVec::unit(m, k));
        let next = rnn_step(&c.rnn, &h, s).unwrap();
        prop_assert_eq!(o2.apply(&a).unwrap().add(&a).unwrap(), base.with_block(lay.h1(), &next));
    }
}
