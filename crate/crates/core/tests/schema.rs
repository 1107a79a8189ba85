use proptest::prelude::*;
use serde::{de::DeserializeOwned, Serialize};
use turing_xf::directional::compile_directional;
use turing_xf::harness::{cosimulate, fuzz_case, FuzzConfig, VerifyReport};
use turing_xf::seq::{rnn_run, Alphabet, RnnSpec, RnnTrace};
use turing_xf::tm::{tm_to_two_stack, TmSpec, TwoStackSpec};
use turing_xf::transformer::{run, TransformerSpec, TransformerTrace};
use turing_xf::vanilla::compile_vanilla;

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(x: &T) {
    let text = serde_json::to_string(x).unwrap();
    let back: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, x);
    assert_eq!(serde_json::to_string(&back).unwrap(), text);
}

#[test]
fn machines() {
    let tm = TmSpec::parity();
    round_trip(&tm);
    round_trip::<TwoStackSpec>(&tm_to_two_stack(&tm).unwrap());
}

#[test]
fn schema_violations_are_errors() {
    assert!(serde_json::from_str::<RnnSpec>(r#"{"d_h": 1}"#).is_err());
    assert!(serde_json::from_str::<Alphabet>(r#"{"symbols": ["a"], "d_b": 1}"#).is_err());
    assert!(TransformerSpec::from_json("[]").is_err());
    assert!(serde_json::from_str::<TmSpec>(r#"{"states": []}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn specs_and_traces(case in 0usize..500) {
        let cfg = FuzzConfig::default();
        let c = fuzz_case(&cfg, case).unwrap();
        round_trip(&c.rnn);
        round_trip(&c.alphabet);
        let steps = c.max_steps(&cfg);
        round_trip::<RnnTrace>(&rnn_run(&c.rnn, &c.alphabet, &c.input, steps).unwrap());
        let van = compile_vanilla(&c.rnn, &c.alphabet).unwrap();
        let dir = compile_directional(&c.rnn, &c.alphabet).unwrap();
        prop_assert_eq!(&TransformerSpec::from_json(&van.to_json()).unwrap(), &van);
        round_trip(&dir);
        round_trip::<TransformerTrace>(&run(&van, &c.input, steps).unwrap());
        round_trip::<VerifyReport>(&cosimulate(&c.rnn, &dir, &c.directional_input(), steps).unwrap());
    }
}
