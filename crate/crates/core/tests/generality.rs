//! Synthesis and decoding on non-reference configurations: longer
//! puncturing periods, irregular patterns and an 8-ary alphabet.

mod common;

use common::walk_hypotheses;
use mdpam::decode::{brute_force_mlse, replay_chain, viterbi_time_variant};
use mdpam::trellis::SuperTrellis;
use mdpam::{
    ChannelTaps, CodeSpec, LabelKind, Labeling, ProductTrellis, PuncturingScheme,
    TimeVariantTrellis,
};
use rand::{Rng, SeedableRng};

fn check(code: &CodeSpec, scheme: &PuncturingScheme, label: &Labeling, l: usize, tag: &str) {
    let taps = ChannelTaps::reference(l);
    let plan = mdpam::trellis::compute_phase_plan(code, scheme, label).unwrap();
    let matched = TimeVariantTrellis::build(code, scheme, label, &taps).unwrap();
    let product = ProductTrellis::build(code, scheme, label, &taps).unwrap();
    let cycle = plan.info_bits_per_cycle;

    // Exhaustive replay equivalence over at least 8 bits of whole cycles.
    let nbits = (2 * cycle).max(8usize.div_ceil(cycle) * cycle);
    for v in 0..(1u32 << nbits) {
        let u: Vec<u8> = (0..nbits).map(|i| ((v >> (nbits - 1 - i)) & 1) as u8).collect();
        let replay = replay_chain(&u, code, scheme, label, &taps).unwrap();
        for (hyps, name) in [
            (walk_hypotheses(&matched, &u), "matched"),
            (walk_hypotheses(&product, &u), "product"),
        ] {
            for (k, (y, r)) in hyps.iter().zip(&replay).enumerate() {
                assert!((y - r).abs() < 1e-12, "{tag} {name} v={v:b} k={k}: {y} vs {r}");
            }
        }
    }

    // Decoder vs exhaustive oracle on noisy frames.
    let n_info = 8usize.div_ceil(cycle) * cycle;
    let tail = matched.termination_bits().div_ceil(cycle) * cycle;
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    for _ in 0..100 {
        let mut u: Vec<u8> = (0..n_info).map(|_| rng.random_range(0..2)).collect();
        u.extend(std::iter::repeat_n(0, tail));
        let clean = replay_chain(&u, code, scheme, label, &taps).unwrap();
        let rx: Vec<f64> = clean
            .iter()
            .map(|y| y + 0.9 * rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let va = viterbi_time_variant(&matched, &rx, tail).unwrap();
        let bf = brute_force_mlse(&rx, code, scheme, label, &taps, n_info, tail).unwrap();
        assert_eq!(&va[..n_info], &bf[..], "{tag}: Viterbi disagrees with the oracle");
    }
}

#[test]
fn period_three_puncturing() {
    let code = CodeSpec::from_octal(&[0o5, 0o7]).unwrap();
    let scheme = PuncturingScheme::from_rows(&["110", "111"]).unwrap();
    let label = Labeling::new(4, LabelKind::Natural).unwrap();
    let plan = mdpam::trellis::compute_phase_plan(&code, &scheme, &label).unwrap();
    // 6 information bits over 5 symbols per cycle.
    assert_eq!(plan.period(), 5);
    assert_eq!(plan.info_bits_per_cycle, 6);
    check(&code, &scheme, &label, 1, "P=110/111 L=1");
    check(&code, &scheme, &label, 2, "P=110/111 L=2");
}

#[test]
fn irregular_rate_two_puncturing() {
    let code = CodeSpec::from_octal(&[0o5, 0o7]).unwrap();
    let scheme = PuncturingScheme::from_rows(&["1010", "1001"]).unwrap();
    let label = Labeling::new(4, LabelKind::Natural).unwrap();
    let plan = mdpam::trellis::compute_phase_plan(&code, &scheme, &label).unwrap();
    assert_eq!(plan.period(), 2);
    assert!((plan.rate() - 2.0).abs() < 1e-15);
    check(&code, &scheme, &label, 1, "P=1010/1001 L=1");
}

#[test]
fn eight_ary_alphabet() {
    let code = CodeSpec::from_octal(&[0o5, 0o7, 0o3]).unwrap();
    let label = Labeling::new(8, LabelKind::Gray).unwrap();
    let all_keep = PuncturingScheme::all_keep(3);
    check(&code, &all_keep, &label, 1, "M=8 all-keep L=1");
    let scheme = PuncturingScheme::from_rows(&["10", "11", "11"]).unwrap();
    check(&code, &scheme, &label, 1, "M=8 punctured L=1");
}
