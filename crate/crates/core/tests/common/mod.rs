//! Helpers shared by the integration tests.
#![allow(dead_code)] // not every test binary uses every helper

use mdpam::trellis::SuperTrellis;

/// Follow the trellis along `info` from the start state, returning the
/// per-step hypotheses with the frame-start channel lags masked, exactly as
/// the decoders evaluate them.
pub fn walk_hypotheses<T: SuperTrellis + ?Sized>(trellis: &T, info: &[u8]) -> Vec<f64> {
    let (hyps, _) = walk(trellis, info);
    hyps
}

/// As [`walk_hypotheses`], also returning the final state.
pub fn walk<T: SuperTrellis + ?Sized>(trellis: &T, info: &[u8]) -> (Vec<f64>, usize) {
    let sections = trellis.sections();
    let l = trellis.channel_memory();
    let mut state = trellis.start_state();
    let mut pos = 0;
    let mut hyps = Vec::new();
    let mut k = 0;
    while pos < info.len() {
        let section = &sections[k % sections.len()];
        let n = section.new_bits;
        assert!(pos + n <= info.len(), "info length not cycle aligned");
        let mut input = 0usize;
        for j in 0..n {
            input |= (info[pos + n - 1 - j] as usize) << j;
        }
        let y = if k < l {
            section.hypothesis_masked(state, input, k)
        } else {
            section.hypothesis(state, input)
        };
        hyps.push(y);
        state = section.next_state(state, input);
        pos += n;
        k += 1;
    }
    (hyps, state)
}
