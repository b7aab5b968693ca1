//! Sequence estimators: the time-variant super-trellis Viterbi algorithm
//! (matched decoding), its reduced-state variant, separated
//! equalization-then-decoding baselines and a brute-force MLSE oracle.
//!
//! All decoders assume frame-synchronous transmission: the channel memory is
//! zero at the frame start and the first received sample belongs to phase 0
//! of the puncturing cycle. During the first `L` samples the not-yet-filled
//! channel lags are masked out of the hypotheses, which makes the trellis
//! metrics exactly equal to a replay of the transmit chain.
//!
//! Soft values are log-likelihood ratios with positive values favouring bit
//! 0; an erasure is exactly 0.

use crate::channel::ChannelTaps;
use crate::coding::{self, CodeSpec, Labeling, PuncturingScheme};
use crate::trellis::{SuperTrellis, TimeVariantTrellis};
use crate::{Error, Result};

/// Decode the information sequence with the minimum squared Euclidean
/// distance over the time-variant super-trellis.
///
/// The last `zero_tail` information bits of the frame are known to be zero
/// (frame termination); their hypotheses are constrained accordingly, which
/// drives terminated frames back into the start state once the tail covers
/// [`SuperTrellis::termination_bits`]. `zero_tail = 0` decodes with a free
/// final state. Ties are broken towards the lower from-state index, then
/// the lower input value.
pub fn viterbi_time_variant<T: SuperTrellis + ?Sized>(
    trellis: &T,
    received: &[f64],
    zero_tail: usize,
) -> Result<Vec<u8>> {
    let sections = trellis.sections();
    let period = sections.len();
    if received.is_empty() || !received.len().is_multiple_of(period) {
        return Err(Error::LengthMismatch(format!(
            "received length {} is not a positive multiple of the phase period {period}",
            received.len()
        )));
    }
    let total_bits = received.len() / period * trellis.plan().info_bits_per_cycle;
    if zero_tail > total_bits {
        return Err(Error::InvalidInput(format!(
            "zero tail {zero_tail} exceeds the frame's {total_bits} information bits"
        )));
    }
    let limit = total_bits - zero_tail;
    let l = trellis.channel_memory();

    let mut metric = vec![f64::INFINITY; sections[0].num_states];
    metric[trellis.start_state()] = 0.0;
    let mut back: Vec<Vec<(u32, u16)>> = Vec::with_capacity(received.len());
    let mut pos = 0;

    for (k, &r) in received.iter().enumerate() {
        let section = &sections[k % period];
        let next_count = sections[(k + 1) % period].num_states;
        let mut next_metric = vec![f64::INFINITY; next_count];
        let mut choices = vec![(0u32, 0u16); next_count];
        let warmup = k < l;
        // Input bits at frame positions >= limit are the zero tail; they sit
        // in the newest (lowest) input bits of this step.
        let forced = (pos + section.new_bits).saturating_sub(limit.max(pos)).min(section.new_bits);
        let zero_mask = (1usize << forced) - 1;
        for state in 0..section.num_states {
            let pm = metric[state];
            if !pm.is_finite() {
                continue;
            }
            for input in 0..section.input_count() {
                if input & zero_mask != 0 {
                    continue;
                }
                let y = if warmup {
                    section.hypothesis_masked(state, input, k)
                } else {
                    section.hypothesis(state, input)
                };
                let d = r - y;
                let cand = pm + d * d;
                let to = section.next_state(state, input);
                if cand < next_metric[to] {
                    next_metric[to] = cand;
                    choices[to] = (state as u32, input as u16);
                }
            }
        }
        metric = next_metric;
        back.push(choices);
        pos += section.new_bits;
    }

    let final_state = argmin_index(&metric);
    if !metric[final_state].is_finite() {
        return Err(Error::InvalidInput("no surviving path into the final state".into()));
    }

    let mut bits = Vec::new();
    let mut state = final_state;
    for k in (0..received.len()).rev() {
        let section = &sections[k % period];
        let (prev, input) = back[k][state];
        for j in 0..section.new_bits {
            bits.push(((input >> j) & 1) as u8);
        }
        state = prev as usize;
    }
    bits.reverse();
    Ok(bits)
}

fn argmin_index(metric: &[f64]) -> usize {
    let mut best = 0;
    for (i, &m) in metric.iter().enumerate() {
        if m < metric[best] {
            best = i;
        }
    }
    best
}

/// Reduced-state partition for the matched trellis: every phase window is
/// truncated to its newest `log2(reduced_states)` bits; older hypothesis
/// bits are supplied per survivor from its decision register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RssePartition {
    pub reduced_states: usize,
}

impl RssePartition {
    pub fn new(reduced_states: usize) -> Result<RssePartition> {
        if reduced_states < 2 || !reduced_states.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "reduced state count must be a power of two >= 2, got {reduced_states}"
            )));
        }
        Ok(RssePartition { reduced_states })
    }

    pub fn bits(&self) -> usize {
        self.reduced_states.trailing_zeros() as usize
    }
}

/// Viterbi decoding over the partitioned state set with per-survivor
/// decision feedback. With a partition at least as large as every phase
/// window this is bit-identical to [`viterbi_time_variant`].
pub fn rsse_decode(
    trellis: &TimeVariantTrellis,
    partition: &RssePartition,
    received: &[f64],
    zero_tail: usize,
) -> Result<Vec<u8>> {
    let sections = trellis.sections();
    let period = sections.len();
    if received.is_empty() || !received.len().is_multiple_of(period) {
        return Err(Error::LengthMismatch(format!(
            "received length {} is not a positive multiple of the phase period {period}",
            received.len()
        )));
    }
    let total_bits = received.len() / period * trellis.plan().info_bits_per_cycle;
    if zero_tail > total_bits {
        return Err(Error::InvalidInput(format!(
            "zero tail {zero_tail} exceeds the frame's {total_bits} information bits"
        )));
    }
    let limit = total_bits - zero_tail;
    let full_bits = trellis.window_bits().to_vec();
    let class_bits: Vec<usize> = full_bits.iter().map(|&s| s.min(partition.bits())).collect();
    let l = trellis.channel_memory();

    let mut metric = vec![f64::INFINITY; 1 << class_bits[0]];
    let mut hist = vec![0u64; 1 << class_bits[0]];
    metric[trellis.start_state()] = 0.0;
    let mut back: Vec<Vec<(u32, u16)>> = Vec::with_capacity(received.len());
    let mut pos = 0;

    for (k, &r) in received.iter().enumerate() {
        let phase = k % period;
        let section = &sections[phase];
        let next_classes = 1usize << class_bits[(k + 1) % period];
        let full_mask = (1u64 << full_bits[phase]) - 1;
        let mut next_metric = vec![f64::INFINITY; next_classes];
        let mut next_hist = vec![0u64; next_classes];
        let mut choices = vec![(0u32, 0u16); next_classes];
        let warmup = k < l;
        let forced = (pos + section.new_bits).saturating_sub(limit.max(pos)).min(section.new_bits);
        let zero_mask = (1usize << forced) - 1;
        for class in 0..metric.len() {
            let pm = metric[class];
            if !pm.is_finite() {
                continue;
            }
            // Survivor register supplies the window bits the class dropped.
            let full = (hist[class] & full_mask) as usize;
            debug_assert_eq!(full & ((1 << class_bits[phase]) - 1), class);
            for input in 0..section.input_count() {
                if input & zero_mask != 0 {
                    continue;
                }
                let y = if warmup {
                    section.hypothesis_masked(full, input, k)
                } else {
                    section.hypothesis(full, input)
                };
                let d = r - y;
                let cand = pm + d * d;
                let to_full = section.next_state(full, input);
                let to = to_full & (next_classes - 1);
                if cand < next_metric[to] {
                    next_metric[to] = cand;
                    next_hist[to] = (hist[class] << section.new_bits) | input as u64;
                    choices[to] = (class as u32, input as u16);
                }
            }
        }
        metric = next_metric;
        hist = next_hist;
        back.push(choices);
        pos += section.new_bits;
    }

    let final_class = argmin_index(&metric);
    if !metric[final_class].is_finite() {
        return Err(Error::InvalidInput("no surviving path into the final class".into()));
    }

    let mut bits = Vec::new();
    let mut class = final_class;
    for k in (0..received.len()).rev() {
        let section = &sections[k % period];
        let (prev, input) = back[k][class];
        for j in 0..section.new_bits {
            bits.push(((input >> j) & 1) as u8);
        }
        class = prev as usize;
    }
    bits.reverse();
    Ok(bits)
}

/// Exact log-domain forward-backward equalization of the ISI channel.
#[derive(Debug, Clone)]
pub struct BcjrOutput {
    /// One LLR per transmitted coded bit in kept-stream order
    /// (`bits_per_symbol` per received sample, MSB first).
    pub bit_llrs: Vec<f64>,
    /// Per sample, the posterior probability of each alphabet index.
    pub symbol_posteriors: Vec<Vec<f64>>,
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return f64::NEG_INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Symbol-wise a-posteriori equalization over the `M`-ary channel trellis
/// with zero (frame-synchronous) initial channel state and a free final
/// state. Bit LLRs marginalize the symbol posteriors over the labeling.
pub fn bcjr_equalize(
    received: &[f64],
    taps: &ChannelTaps,
    label: &Labeling,
    sigma_sq: f64,
) -> Result<BcjrOutput> {
    if sigma_sq <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "BCJR needs a positive noise variance, got {sigma_sq}"
        )));
    }
    let l = taps.memory();
    let m = label.m_ary;
    let base = m + 1; // digit m marks the pre-frame padding (amplitude 0)
    let num_states = base.pow(l as u32);
    let h = taps.taps();
    let steps = received.len();

    // ISI contribution of the state digits, shared by all current symbols.
    let isi: Vec<f64> = (0..num_states)
        .map(|s| {
            let mut acc = 0.0;
            let mut rest = s;
            for i in 1..=l {
                let digit = rest % base;
                rest /= base;
                if digit < m {
                    acc += h[i] * label.amplitude_of_index(digit);
                }
            }
            acc
        })
        .collect();
    let next_of = |state: usize, a: usize| -> usize {
        if l == 0 {
            0
        } else {
            a + base * (state % base.pow((l - 1) as u32))
        }
    };

    let pad_state = (0..l).fold(0usize, |acc, i| acc + m * base.pow(i as u32));
    let mut alpha = vec![vec![f64::NEG_INFINITY; num_states]; steps + 1];
    alpha[0][pad_state] = 0.0;
    let gamma = |k: usize, state: usize, a: usize| -> f64 {
        let y = h[0] * label.amplitude_of_index(a) + isi[state];
        let d = received[k] - y;
        -d * d / (2.0 * sigma_sq)
    };
    let mut scratch = Vec::new();
    for k in 0..steps {
        for state in 0..num_states {
            if !alpha[k][state].is_finite() {
                continue;
            }
            for a in 0..m {
                let to = next_of(state, a);
                let cand = alpha[k][state] + gamma(k, state, a);
                // In-place log-sum-exp accumulation.
                let cur = alpha[k + 1][to];
                alpha[k + 1][to] = if cur.is_finite() {
                    let hi = cur.max(cand);
                    hi + ((cur - hi).exp() + (cand - hi).exp()).ln()
                } else {
                    cand
                };
            }
        }
    }

    let mut beta = vec![vec![0.0f64; num_states]; steps + 1];
    for k in (0..steps).rev() {
        for state in 0..num_states {
            scratch.clear();
            for a in 0..m {
                scratch.push(gamma(k, state, a) + beta[k + 1][next_of(state, a)]);
            }
            beta[k][state] = log_sum_exp(&scratch);
        }
    }

    let n_bits = label.bits_per_symbol();
    let mut bit_llrs = Vec::with_capacity(steps * n_bits);
    let mut symbol_posteriors = Vec::with_capacity(steps);
    for k in 0..steps {
        let mut log_p = vec![f64::NEG_INFINITY; m];
        for state in 0..num_states {
            if !alpha[k][state].is_finite() {
                continue;
            }
            for a in 0..m {
                let v = alpha[k][state] + gamma(k, state, a) + beta[k + 1][next_of(state, a)];
                let cur = log_p[a];
                log_p[a] = if cur.is_finite() {
                    let hi = cur.max(v);
                    hi + ((cur - hi).exp() + (v - hi).exp()).ln()
                } else {
                    v
                };
            }
        }
        let norm = log_sum_exp(&log_p);
        symbol_posteriors.push(log_p.iter().map(|p| (p - norm).exp()).collect());
        for pos in 0..n_bits {
            let zeros: Vec<f64> = (0..m)
                .filter(|&a| label.bit_of_index(a, pos) == 0)
                .map(|a| log_p[a])
                .collect();
            let ones: Vec<f64> = (0..m)
                .filter(|&a| label.bit_of_index(a, pos) == 1)
                .map(|a| log_p[a])
                .collect();
            bit_llrs.push(log_sum_exp(&zeros) - log_sum_exp(&ones));
        }
    }
    Ok(BcjrOutput { bit_llrs, symbol_posteriors })
}

/// Decision-feedback sequence estimation on the reduced channel trellis:
/// `kept_states = M^J` states over the newest `J` symbols, taps beyond `J`
/// fed back per survivor. With `J = L` this is full MLSE equalization.
/// Returns hard alphabet indices.
pub fn dfse_equalize(
    received: &[f64],
    taps: &ChannelTaps,
    label: &Labeling,
    kept_states: usize,
) -> Result<Vec<usize>> {
    let l = taps.memory();
    let m = label.m_ary;
    let mut j = 0;
    while m.pow(j as u32) < kept_states {
        j += 1;
    }
    if m.pow(j as u32) != kept_states || j > l {
        return Err(Error::InvalidInput(format!(
            "kept_states must be M^J with J <= {l}, got {kept_states}"
        )));
    }
    let num_states = kept_states;
    let h = taps.taps();
    let pad = m as u64; // digit value marking pre-frame padding

    // Per-survivor history of the last L symbol digits, newest in the low
    // nibble; feeds the taps the reduced state no longer covers.
    let nibble = |hist: u64, i: usize| -> u64 { (hist >> (4 * i)) & 0xf };
    let mut hist = vec![0u64; num_states];
    let init: u64 = (0..l).fold(0u64, |acc, i| acc | (pad << (4 * i)));
    hist[0] = init;
    let mut metric = vec![f64::INFINITY; num_states];
    metric[0] = 0.0;
    let mut back: Vec<Vec<(u32, u8)>> = Vec::with_capacity(received.len());

    for &r in received {
        let mut next_metric = vec![f64::INFINITY; num_states];
        let mut next_hist = vec![0u64; num_states];
        let mut choices = vec![(0u32, 0u8); num_states];
        for state in 0..num_states {
            let pm = metric[state];
            if !pm.is_finite() {
                continue;
            }
            let mut isi = 0.0;
            for i in 1..=l {
                let digit = nibble(hist[state], i - 1);
                if digit < m as u64 {
                    isi += h[i] * label.amplitude_of_index(digit as usize);
                }
            }
            for a in 0..m {
                let y = h[0] * label.amplitude_of_index(a) + isi;
                let d = r - y;
                let cand = pm + d * d;
                let to = if j == 0 { 0 } else { a + m * (state % m.pow((j - 1) as u32)) };
                if cand < next_metric[to] {
                    next_metric[to] = cand;
                    next_hist[to] = (hist[state] << 4) | a as u64;
                    choices[to] = (state as u32, a as u8);
                }
            }
        }
        metric = next_metric;
        hist = next_hist;
        back.push(choices);
    }

    let mut state = argmin_index(&metric);
    let mut symbols = vec![0usize; received.len()];
    for k in (0..received.len()).rev() {
        let (prev, a) = back[k][state];
        symbols[k] = a as usize;
        state = prev as usize;
    }
    Ok(symbols)
}

/// Equalizer choice of the separated receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparationMode {
    /// DFSE hard symbol decisions, demapped to +-1 bit metrics.
    Hard,
    /// BCJR soft bit LLRs.
    Soft,
}

/// Separated equalization and decoding: equalize, demap to per-bit metrics,
/// re-insert exact-zero erasures at punctured positions, then run the
/// code-trellis Viterbi decoder. No interleaving.
#[allow(clippy::too_many_arguments)]
pub fn separated_receiver(
    received: &[f64],
    mode: SeparationMode,
    eq_states: usize,
    code: &CodeSpec,
    scheme: &PuncturingScheme,
    label: &Labeling,
    taps: &ChannelTaps,
    sigma_sq: f64,
    zero_tail: usize,
) -> Result<Vec<u8>> {
    let kept_llrs = match mode {
        SeparationMode::Soft => bcjr_equalize(received, taps, label, sigma_sq)?.bit_llrs,
        SeparationMode::Hard => {
            let symbols = dfse_equalize(received, taps, label, eq_states)?;
            let n = label.bits_per_symbol();
            let mut llrs = Vec::with_capacity(symbols.len() * n);
            for a in symbols {
                for pos in 0..n {
                    llrs.push(if label.bit_of_index(a, pos) == 0 { 1.0 } else { -1.0 });
                }
            }
            llrs
        }
    };
    let full = coding::depuncture_llrs(&kept_llrs, scheme)?;
    viterbi_code_llr(code, &full, zero_tail)
}

/// Soft-input Viterbi decoding on the time-invariant code trellis. One LLR
/// per coded bit (erasures exactly 0); returns the information bits. The
/// last `zero_tail` information bits are constrained to zero.
pub fn viterbi_code_llr(code: &CodeSpec, llrs: &[f64], zero_tail: usize) -> Result<Vec<u8>> {
    let n = code.n_out;
    if llrs.is_empty() || !llrs.len().is_multiple_of(n) {
        return Err(Error::LengthMismatch(format!(
            "LLR count {} is not a positive multiple of {n}",
            llrs.len()
        )));
    }
    let steps = llrs.len() / n;
    if zero_tail > steps {
        return Err(Error::InvalidInput(format!(
            "zero tail {zero_tail} exceeds the frame's {steps} information bits"
        )));
    }
    let num_states = code.state_count();
    let mut metric = vec![f64::INFINITY; num_states];
    metric[0] = 0.0;
    let mut back: Vec<Vec<(u32, u8)>> = Vec::with_capacity(steps);

    for k in 0..steps {
        let step_llrs = &llrs[k * n..(k + 1) * n];
        let mut next_metric = vec![f64::INFINITY; num_states];
        let mut choices = vec![(0u32, 0u8); num_states];
        let max_input: u8 = if k >= steps - zero_tail { 1 } else { 2 };
        for state in 0..num_states {
            let pm = metric[state];
            if !pm.is_finite() {
                continue;
            }
            for input in 0..max_input {
                let outs = code.step_outputs(input, state as u64);
                // Correlation metric: cost grows where the sign of the LLR
                // disagrees with the hypothesized bit; erasures cost 0.
                let cost: f64 = outs
                    .iter()
                    .zip(step_llrs)
                    .map(|(&c, &llr)| if c == 1 { llr } else { -llr })
                    .sum();
                let cand = pm + cost;
                let to = code.next_state(input, state as u64) as usize;
                if cand < next_metric[to] {
                    next_metric[to] = cand;
                    choices[to] = (state as u32, input);
                }
            }
        }
        metric = next_metric;
        back.push(choices);
    }

    let mut state = argmin_index(&metric);
    let mut bits = vec![0u8; steps];
    for k in (0..steps).rev() {
        let (prev, input) = back[k][state];
        bits[k] = input;
        state = prev as usize;
    }
    Ok(bits)
}

/// Exhaustive maximum-likelihood sequence estimation: replay every
/// `2^n_info` information sequence (plus `zero_tail` trailing zeros) through
/// the transmit chain and return the one with the minimum squared Euclidean
/// distance. Ties go to the smallest sequence read as an unsigned integer
/// (first bit most significant), consistent with the Viterbi tie-break.
pub fn brute_force_mlse(
    received: &[f64],
    code: &CodeSpec,
    scheme: &PuncturingScheme,
    label: &Labeling,
    taps: &ChannelTaps,
    n_info: usize,
    zero_tail: usize,
) -> Result<Vec<u8>> {
    if n_info == 0 || n_info > 20 {
        return Err(Error::InvalidInput(format!(
            "exhaustive search supports 1..=20 information bits, got {n_info}"
        )));
    }
    let mut best_metric = f64::INFINITY;
    let mut best = Vec::new();
    let mut u = vec![0u8; n_info + zero_tail];
    for v in 0..(1u64 << n_info) {
        for (i, bit) in u[..n_info].iter_mut().enumerate() {
            *bit = ((v >> (n_info - 1 - i)) & 1) as u8;
        }
        let replay = replay_chain(&u, code, scheme, label, taps)?;
        if replay.len() != received.len() {
            return Err(Error::LengthMismatch(format!(
                "replay produces {} symbols but {} were received",
                replay.len(),
                received.len()
            )));
        }
        let metric: f64 = received
            .iter()
            .zip(&replay)
            .map(|(r, y)| (r - y) * (r - y))
            .sum();
        if metric < best_metric {
            best_metric = metric;
            best = u[..n_info].to_vec();
        }
    }
    Ok(best)
}

/// Noiseless transmit chain: encode, puncture, map, filter.
pub fn replay_chain(
    info: &[u8],
    code: &CodeSpec,
    scheme: &PuncturingScheme,
    label: &Labeling,
    taps: &ChannelTaps,
) -> Result<Vec<f64>> {
    let coded = coding::encode(info, code, false)?;
    let (kept, _) = coding::puncture(&coded, scheme)?;
    let symbols = coding::map_symbols(&kept, label)?;
    Ok(crate::channel::filter(&symbols, taps))
}
