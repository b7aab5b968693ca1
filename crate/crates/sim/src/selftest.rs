//! Built-in verification suite: structural state counts, decoder-oracle
//! equivalence and distance preservation. Used by the `selftest` CLI
//! subcommand; the full acceptance suite lives in the integration tests.

use crate::rng::FrameRng;
use mdpam::decode::{brute_force_mlse, replay_chain, viterbi_time_variant};
use mdpam::trellis::{min_divergence_distance, SuperTrellis};
use mdpam::{
    channel, ChannelTaps, CodeSpec, LabelKind, Labeling, NoiseSpec, ProductTrellis,
    PuncturingScheme, TimeVariantTrellis,
};

fn reference() -> (CodeSpec, PuncturingScheme, Labeling) {
    (
        CodeSpec::from_octal(&[0o5, 0o7]).unwrap(),
        PuncturingScheme::from_rows(&["10", "11"]).unwrap(),
        Labeling::new(4, LabelKind::Gray).unwrap(),
    )
}

fn check(all: &mut bool, name: &str, ok: bool) {
    println!("{}  {name}", if ok { "PASS" } else { "FAIL" });
    *all &= ok;
}

/// Run the suite, printing one line per check. Returns true iff all pass.
pub fn run_selftest() -> bool {
    let mut all = true;
    let (code, scheme, label) = reference();

    let tv = |l: usize, sch: &PuncturingScheme| {
        TimeVariantTrellis::build(&code, sch, &label, &ChannelTaps::reference(l)).unwrap()
    };
    check(
        &mut all,
        "matched trellis L=4 has 256/512 states",
        tv(4, &scheme).state_counts() == vec![256, 256, 512],
    );
    check(
        &mut all,
        "matched trellis L=3 has 64/128 states",
        tv(3, &scheme).state_counts() == vec![64, 64, 128],
    );
    check(
        &mut all,
        "non-punctured matched trellis L=4 has 64 states",
        tv(4, &PuncturingScheme::all_keep(2)).state_counts() == vec![64],
    );
    let product =
        ProductTrellis::build(&code, &scheme, &label, &ChannelTaps::reference(4)).unwrap();
    check(
        &mut all,
        "product trellis L=4 has 1024/2048 states",
        product.state_counts() == vec![1024, 1024, 2048],
    );

    for l in 0..=2usize {
        let taps = ChannelTaps::reference(l);
        let trellis = TimeVariantTrellis::build(&code, &scheme, &label, &taps).unwrap();
        let tail = trellis.termination_bits().div_ceil(4) * 4;
        let sigma_sq = NoiseSpec::new(6.0, 4.0 / 3.0, label.symbol_energy())
            .unwrap()
            .sigma_sq();
        let mut mismatches = 0;
        for frame in 0..100u64 {
            let mut rng = FrameRng::for_frame(2024, l as u64, 0, frame);
            let mut u: Vec<u8> = (0..8).map(|_| rng.bit()).collect();
            u.extend(std::iter::repeat_n(0, tail));
            let clean = replay_chain(&u, &code, &scheme, &label, &taps).unwrap();
            let rx = channel::add_awgn(&clean, sigma_sq, &mut rng).unwrap();
            let va = viterbi_time_variant(&trellis, &rx, tail).unwrap();
            let bf = brute_force_mlse(&rx, &code, &scheme, &label, &taps, 8, tail).unwrap();
            if va[..8] != bf[..] {
                mismatches += 1;
            }
        }
        check(
            &mut all,
            &format!("Viterbi equals brute-force MLSE on 100 noisy frames, L={l}"),
            mismatches == 0,
        );
    }

    for l in 0..=2usize {
        let taps = ChannelTaps::reference(l);
        let matched = TimeVariantTrellis::build(&code, &scheme, &label, &taps).unwrap();
        let product = ProductTrellis::build(&code, &scheme, &label, &taps).unwrap();
        let dm = min_divergence_distance(&matched);
        let dp = min_divergence_distance(&product);
        check(
            &mut all,
            &format!("minimum distance preserved, L={l}"),
            (dm - dp).abs() < 1e-9,
        );
    }

    all
}
