//! The time-variant Viterbi decoder must reproduce the brute-force MLSE
//! decision on noisy frames, including its tie-break.

use mdpam::decode::{brute_force_mlse, replay_chain, viterbi_time_variant};
use mdpam::trellis::SuperTrellis;
use mdpam::{
    ChannelTaps, CodeSpec, LabelKind, Labeling, NoiseSpec, PuncturingScheme, TimeVariantTrellis,
};
use rand::{Rng, SeedableRng};

#[test]
fn viterbi_equals_brute_force_across_channels_and_snrs() {
    let code = CodeSpec::from_octal(&[0o5, 0o7]).unwrap();
    let scheme = PuncturingScheme::from_rows(&["10", "11"]).unwrap();
    let label = Labeling::new(4, LabelKind::Gray).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x5eed);

    for l in 0..=2usize {
        let taps = ChannelTaps::reference(l);
        let trellis = TimeVariantTrellis::build(&code, &scheme, &label, &taps).unwrap();
        let tail = trellis.termination_bits().div_ceil(4) * 4;
        for ebn0_db in [2.0, 6.0, 10.0] {
            let sigma_sq = NoiseSpec::new(ebn0_db, 4.0 / 3.0, label.symbol_energy())
                .unwrap()
                .sigma_sq();
            for _ in 0..60 {
                let n_info = 8;
                let mut u: Vec<u8> = (0..n_info).map(|_| rng.random_range(0..2)).collect();
                u.extend(std::iter::repeat_n(0, tail));
                let clean = replay_chain(&u, &code, &scheme, &label, &taps).unwrap();
                let rx: Vec<f64> = clean
                    .iter()
                    .map(|y| {
                        y + sigma_sq.sqrt() * rng.sample::<f64, _>(rand_distr::StandardNormal)
                    })
                    .collect();
                let va = viterbi_time_variant(&trellis, &rx, tail).unwrap();
                let bf =
                    brute_force_mlse(&rx, &code, &scheme, &label, &taps, n_info, tail).unwrap();
                assert_eq!(
                    &va[..n_info],
                    &bf[..],
                    "mismatch at L={l}, Eb/N0={ebn0_db} dB"
                );
            }
        }
    }
}

#[test]
fn winning_metric_never_exceeds_true_path_metric() {
    let code = CodeSpec::from_octal(&[0o5, 0o7]).unwrap();
    let scheme = PuncturingScheme::from_rows(&["10", "11"]).unwrap();
    let label = Labeling::new(4, LabelKind::Natural).unwrap();
    let taps = ChannelTaps::reference(2);
    let trellis = TimeVariantTrellis::build(&code, &scheme, &label, &taps).unwrap();
    let tail = trellis.termination_bits().div_ceil(4) * 4;
    let mut rng = rand::rngs::StdRng::seed_from_u64(99);
    for _ in 0..50 {
        let mut u: Vec<u8> = (0..12).map(|_| rng.random_range(0..2)).collect();
        u.extend(std::iter::repeat_n(0, tail));
        let clean = replay_chain(&u, &code, &scheme, &label, &taps).unwrap();
        let rx: Vec<f64> = clean
            .iter()
            .map(|y| y + 0.6 * rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let decoded = viterbi_time_variant(&trellis, &rx, tail).unwrap();
        let metric_of = |bits: &[u8]| -> f64 {
            let y = replay_chain(bits, &code, &scheme, &label, &taps).unwrap();
            rx.iter().zip(&y).map(|(r, s)| (r - s) * (r - s)).sum()
        };
        assert!(metric_of(&decoded) <= metric_of(&u) + 1e-9);
    }
}
