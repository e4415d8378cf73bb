use fastpolar::decoder::{decode_pcr, decode_rep2, decode_rpc, decode_spc, decode_spc2, Fixed, Float};
use fastpolar::oracle::{correlation, enumerate_codebook, ml_metric};
use fastpolar::pattern::PatternTag;
use proptest::prelude::*;

fn decode(kind: PatternTag, alpha: &[f64]) -> Vec<u8> {
    match kind {
        PatternTag::Spc => decode_spc(&Float, alpha),
        PatternTag::Spc2 => decode_spc2(&Float, alpha),
        PatternTag::Rep2 => decode_rep2(&Float, alpha),
        PatternTag::Rpc => decode_rpc(&Float, alpha),
        PatternTag::Pcr => decode_pcr(&Float, alpha),
        _ => unreachable!(),
    }
}

const KINDS: [PatternTag; 5] = [
    PatternTag::Spc,
    PatternTag::Spc2,
    PatternTag::Rep2,
    PatternTag::Rpc,
    PatternTag::Pcr,
];

fn llrs(m: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-8.0f64..8.0, m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn float_nodes_are_ml(alpha in prop_oneof![llrs(4), llrs(8), llrs(16)]) {
        for kind in KINDS {
            let book = enumerate_codebook(kind, alpha.len()).unwrap();
            let x = decode(kind, &alpha);
            prop_assert!(book.codewords.contains(&x), "{kind}: not a codeword");
            let best = ml_metric(&book, &alpha);
            prop_assert!((correlation(&x, &alpha) - best).abs() < 1e-9, "{kind}");
        }
    }

    #[test]
    fn fixed_nodes_are_ml_without_saturation(alpha in prop::collection::vec(-7i32..=7, 8)) {
        let arith = Fixed::new(8);
        let as_f: Vec<f64> = alpha.iter().map(|&a| a as f64).collect();
        for kind in KINDS {
            let x = match kind {
                PatternTag::Spc => decode_spc(&arith, &alpha),
                PatternTag::Spc2 => decode_spc2(&arith, &alpha),
                PatternTag::Rep2 => decode_rep2(&arith, &alpha),
                PatternTag::Rpc => decode_rpc(&arith, &alpha),
                PatternTag::Pcr => decode_pcr(&arith, &alpha),
                _ => unreachable!(),
            };
            let book = enumerate_codebook(kind, 8).unwrap();
            prop_assert!(book.codewords.contains(&x));
            prop_assert_eq!(correlation(&x, &as_f), ml_metric(&book, &as_f), "{}", kind);
        }
    }
}

#[test]
fn node_outputs_satisfy_their_parities() {
    let alpha = [-0.3, 1.2, -2.0, 0.1, 0.7, -0.9, 2.2, -0.05];
    let spc2 = decode_spc2(&Float, &alpha);
    assert_eq!(spc2.iter().step_by(2).fold(0, |a, b| a ^ b), 0);
    assert_eq!(spc2.iter().skip(1).step_by(2).fold(0, |a, b| a ^ b), 0);
    let rpc = decode_rpc(&Float, &alpha);
    let group = |r: usize| rpc.iter().skip(r).step_by(4).fold(0, |a, b| a ^ b);
    assert!(group(0) == group(1) && group(1) == group(2) && group(2) == group(3));
}
