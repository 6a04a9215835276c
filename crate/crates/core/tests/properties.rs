use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;

use stpetersburg::constructions::{aligned_value, approx_word};
use stpetersburg::dyadic::{accelerated_sums, birkhoff_phi_trace, BinaryWord, BlockDecomposition, Digit};
use stpetersburg::growth::GrowthFunction;
use stpetersburg::pressure::{solve_t, SOLVER_TOL};
use stpetersburg::report::fmt_sig;

fn word(bits: &[bool]) -> BinaryWord {
    BinaryWord::from_digits(bits.iter().map(|&b| Digit::from_bit(b)).collect())
}

proptest! {
    #[test]
    fn transference_on_block_sequences(blocks in prop::collection::vec(1u64..40, 1..60)) {
        let dec = BlockDecomposition::from_blocks(blocks.clone());
        let digits: Vec<Digit> = dec.digits().collect();
        let n = digits.len();
        let s = birkhoff_phi_trace(digits, n).unwrap();
        let hat = accelerated_sums(&dec).unwrap().hat.last().unwrap().clone();
        prop_assert_eq!(s.at(n) + BigUint::from(blocks.len()), hat * 2u32);
    }

    #[test]
    fn unit_step_at_ones(bits in prop::collection::vec(any::<bool>(), 2..200)) {
        let mut w = word(&bits);
        w.push(Digit::One);
        let n = w.len();
        let s = birkhoff_phi_trace(w.iter(), n).unwrap();
        for i in 1..n {
            prop_assert!(s.at(i + 1) > s.at(i));
            if w.digits()[i].is_one() {
                prop_assert_eq!(s.at(i + 1) - s.at(i), BigUint::one());
            }
        }
    }

    #[test]
    fn aligned_window_for_wide_targets(bytes in prop::collection::vec(any::<u8>(), 1..25), frac in 0.0f64..1.0) {
        let w = BigUint::from_bytes_le(&bytes) + 1u32;
        let t = w.bits() - 1;
        let n = (frac * t as f64) as u32;
        let a = aligned_value(&w, n).unwrap();
        prop_assert!(a.v >= w);
        prop_assert!(&a.v << n <= &w * ((BigUint::one() << n) + 1u32));
        prop_assert!(a.ones <= n as u64 + 2);
        let sw = approx_word(&w, n).unwrap();
        let len = sw.word.len();
        let trace = birkhoff_phi_trace(sw.word.iter(), len).unwrap();
        prop_assert_eq!(trace.at(len), &a.v);
    }

    // beyond q ~ 1000 the gap t + q ~ 2^-q underflows f64
    #[test]
    fn root_lies_strictly_inside(log_q in -12.0f64..3.0) {
        let q = 10f64.powf(log_q);
        let s = solve_t(q, SOLVER_TOL).unwrap();
        prop_assert!(s.deficit > 0.0 && s.floor_gap > 0.0 && s.slope_excess > 0.0);
        prop_assert!(s.residual < 1e-12);
    }

    #[test]
    fn fmt_sig_keeps_twelve_digits(x in prop::num::f64::NORMAL) {
        let back: f64 = fmt_sig(x).parse().unwrap();
        prop_assert!(((back - x) / x).abs() < 1e-11);
    }

    #[test]
    fn digit_lines_round_trip(bits in prop::collection::vec(any::<bool>(), 0..300)) {
        let w = word(&bits);
        prop_assert_eq!(BinaryWord::parse_line(&w.to_line()).unwrap(), w);
    }

    #[test]
    fn growth_specs_round_trip(a in 1.001f64..20.0, g in 0.01f64..3.0) {
        for psi in [GrowthFunction::NLogN, GrowthFunction::power(a).unwrap(), GrowthFunction::double_exp(g).unwrap()] {
            prop_assert_eq!(psi.to_string().parse::<GrowthFunction>().unwrap(), psi);
        }
    }
}
