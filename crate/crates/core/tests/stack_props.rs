use proptest::prelude::*;
use turing_xf::numeric::Rat;
use turing_xf::tm::{stack_decode, stack_encode, stack_nonempty, stack_pop, stack_push, stack_top, CantorCode};

/// Digit expansion oracle: `Σ (2a_i + 1) / (2r)^i`.
fn expand(radix: usize, digits: &[usize]) -> Rat {
    let base = Rat::from(2 * radix);
    let mut scale = Rat::one();
    let mut acc = Rat::zero();
    for &a in digits {
        scale = scale / &base;
        acc += &(Rat::from(2 * a + 1) * &scale);
    }
    acc
}

proptest! {
    #[test]
    fn binary_round_trip(bits in prop::collection::vec(0u8..=1, 0..16)) {
        let psi = stack_encode(&bits).unwrap();
        let digits: Vec<usize> = bits.iter().map(|&b| b as usize).collect();
        prop_assert_eq!(&psi, &expand(2, &digits));
        prop_assert_eq!(stack_decode(&psi).unwrap(), bits.clone());
        prop_assert!(psi >= Rat::zero() && psi < Rat::one());
        prop_assert_eq!(stack_nonempty(&psi), Rat::from(usize::from(!bits.is_empty())));
    }

    #[test]
    fn push_then_pop_is_identity(bits in prop::collection::vec(0u8..=1, 0..12), b in 0u8..=1) {
        let psi = stack_encode(&bits).unwrap();
        let pushed = stack_push(&psi, b).unwrap();
        prop_assert_eq!(stack_top(&pushed), Rat::from(b as usize));
        prop_assert_eq!(stack_pop(&pushed).unwrap(), (psi, b));
    }

    #[test]
    fn any_radix_round_trip(radix in 2usize..=7, seed in prop::collection::vec(0usize..100, 0..10)) {
        let code = CantorCode::new(radix).unwrap();
        let digits: Vec<usize> = seed.iter().map(|x| x % radix).collect();
        let psi = code.encode(&digits).unwrap();
        prop_assert_eq!(&psi, &expand(radix, &digits));
        prop_assert_eq!(code.decode(&psi).unwrap(), digits.clone());
        prop_assert_eq!(code.top(&psi), digits.first().copied());
    }
}
