//! Time-variant super-trellis synthesis.
//!
//! Puncturing breaks the fixed relation between information bits, generator
//! outputs and mapped symbols. Each symbol of the puncturing cycle gets a
//! generator-offset descriptor: which generator, applied at which encoder
//! step, produces each of its bits. From these descriptors the synthesizer
//! derives, per symbol phase, the window of past information bits that
//! jointly determines the current symbol and the `L` symbols still inside
//! the channel memory. The window is the trellis state; phases where a
//! symbol's LSB runs one encoder step ahead of its MSB carry an extra
//! hypothesis bit, which temporarily doubles the state count (split) until a
//! later phase resynchronizes and decides two bits at once (merge).
//!
//! Two constructions are provided over the same section layout:
//!
//! - [`TimeVariantTrellis`]: the reduced (matched) construction whose states
//!   are information-bit windows and whose hypotheses are evaluated through
//!   the non-linear floor form of the mod-2 encoder.
//! - [`ProductTrellis`]: the straightforward construction whose states are
//!   encoder state x pending kept bits x last `L` mapped symbols, used as a
//!   baseline for state counts and distance comparisons.

use crate::channel::ChannelTaps;
use crate::coding::{CodeSpec, Labeling, PuncturingScheme};
use crate::{Error, Result};

/// Default cap on per-section state counts during synthesis.
pub const DEFAULT_STATE_CAP: usize = 1 << 20;

/// Origin of one transmitted bit: output line `generator` evaluated at
/// encoder step `step` (relative to the cycle base).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BitSource {
    pub generator: usize,
    pub step: i64,
}

/// Per-phase generator-offset descriptor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseOffset {
    /// Bit sources of the symbol, most significant first.
    pub sources: Vec<BitSource>,
    /// Information bits newly hypothesized at this phase.
    pub new_bits: usize,
    /// Information bits decided (released) by a survivor selection here.
    pub decided_bits: usize,
    /// State count doubles across this phase.
    pub split: bool,
    /// State count halves across this phase; survivor selection decides
    /// more than one bit.
    pub merge: bool,
}

/// The symbol-phase schedule of a punctured code and mapper combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePlan {
    pub phases: Vec<PhaseOffset>,
    /// Encoder steps per cycle.
    pub steps_per_cycle: usize,
    /// Information bits consumed per cycle.
    pub info_bits_per_cycle: usize,
    /// Code-only state window length per phase (entry, in bits).
    pub code_window_bits: Vec<usize>,
    hi: Vec<i64>,
    lo: Vec<i64>,
}

impl PhasePlan {
    /// Symbols per cycle.
    pub fn period(&self) -> usize {
        self.phases.len()
    }

    /// Overall transmission rate in information bits per symbol.
    pub fn rate(&self) -> f64 {
        self.info_bits_per_cycle as f64 / self.period() as f64
    }

    /// Highest encoder step hypothesized up to and including phase `sigma`.
    fn hi(&self, sigma: i64) -> i64 {
        let s = self.period() as i64;
        self.hi[sigma.rem_euclid(s) as usize] + sigma.div_euclid(s) * self.info_bits_per_cycle as i64
    }

    /// Lowest encoder step referenced by the symbol at phase `sigma`.
    fn lo(&self, sigma: i64) -> i64 {
        let s = self.period() as i64;
        self.lo[sigma.rem_euclid(s) as usize] + sigma.div_euclid(s) * self.info_bits_per_cycle as i64
    }
}

/// Compute the generator offsets, split/merge schedule and decided-bit
/// counts for `code` under `scheme` and `label`.
pub fn compute_phase_plan(
    code: &CodeSpec,
    scheme: &PuncturingScheme,
    label: &Labeling,
) -> Result<PhasePlan> {
    if code.k_in != 1 {
        return Err(Error::InvalidInput("only K=1 codes are supported".into()));
    }
    if scheme.pattern.len() != code.n_out {
        return Err(Error::InvalidInput(format!(
            "puncturing rows ({}) must match encoder output lines ({})",
            scheme.pattern.len(),
            code.n_out
        )));
    }
    if label.m_ary != 1 << code.n_out {
        return Err(Error::InvalidInput(format!(
            "alphabet size {} does not match 2^n_out = {}",
            label.m_ary,
            1 << code.n_out
        )));
    }
    let n_sym = label.bits_per_symbol();
    let kept = scheme.kept_per_period();

    // Extend to whole symbols: smallest multiple of the pattern period whose
    // kept-bit count is divisible by the bits per symbol.
    let mut q = 1;
    while !(q * kept).is_multiple_of(n_sym) {
        q += 1;
    }
    let steps_per_cycle = q * scheme.period;
    let symbols = q * kept / n_sym;

    // Kept-bit stream over one cycle, packed into symbols MSB-first.
    let mut stream = Vec::with_capacity(q * kept);
    for step in 0..steps_per_cycle {
        for generator in 0..code.n_out {
            if scheme.keeps(generator, step) {
                stream.push(BitSource { generator, step: step as i64 });
            }
        }
    }
    let sources: Vec<Vec<BitSource>> = stream.chunks(n_sym).map(|c| c.to_vec()).collect();
    debug_assert_eq!(sources.len(), symbols);

    let memory = code.memory as i64;
    let info_per_cycle = steps_per_cycle as i64;
    let hi: Vec<i64> = sources
        .iter()
        .map(|s| s.iter().map(|b| b.step).max().unwrap())
        .collect();
    let lo: Vec<i64> = sources
        .iter()
        .map(|s| s.iter().map(|b| b.step).min().unwrap() - memory)
        .collect();

    let hi_at = |sigma: i64| -> i64 {
        hi[sigma.rem_euclid(symbols as i64) as usize]
            + sigma.div_euclid(symbols as i64) * info_per_cycle
    };
    let new_bits: Vec<usize> = (0..symbols as i64)
        .map(|s| (hi_at(s) - hi_at(s - 1)) as usize)
        .collect();

    // Minimal code-only window sizes: the window entering phase sigma must
    // still contain everything any later phase needs, discounted by the bits
    // arriving in between.
    let span_code: Vec<i64> = (0..symbols as i64)
        .map(|s| hi_at(s - 1) - lo[s as usize] + 1)
        .collect();
    let code_window_bits: Vec<usize> = (0..symbols)
        .map(|sigma| {
            let mut best = 0i64;
            let mut arrived = 0i64;
            for k in 0..symbols {
                let idx = (sigma + k) % symbols;
                best = best.max(span_code[idx] - arrived);
                arrived += new_bits[idx] as i64;
            }
            best as usize
        })
        .collect();

    let phases: Vec<PhaseOffset> = (0..symbols)
        .map(|sigma| {
            let next = (sigma + 1) % symbols;
            let decided = code_window_bits[sigma] + new_bits[sigma] - code_window_bits[next];
            PhaseOffset {
                sources: sources[sigma].clone(),
                new_bits: new_bits[sigma],
                decided_bits: decided,
                split: code_window_bits[next] > code_window_bits[sigma],
                merge: code_window_bits[next] < code_window_bits[sigma],
            }
        })
        .collect();
    debug_assert_eq!(
        phases.iter().map(|p| p.decided_bits).sum::<usize>(),
        steps_per_cycle
    );

    Ok(PhasePlan {
        phases,
        steps_per_cycle,
        info_bits_per_cycle: steps_per_cycle,
        code_window_bits,
        hi,
        lo,
    })
}

/// One cyclic trellis section: the transitions taken while receiving the
/// symbol of one phase.
///
/// States and inputs are dense indices. Per transition the per-lag channel
/// contributions `h[i] * amplitude(symbol at lag i)` are stored so decoders
/// can mask lags that fall before the frame start.
#[derive(Debug, Clone)]
pub struct Section {
    pub num_states: usize,
    pub new_bits: usize,
    pub decided_bits: usize,
    pub split: bool,
    pub merge: bool,
    lags: usize,
    next: Vec<u32>,
    contrib: Vec<f64>,
    hyp: Vec<f64>,
}

impl Section {
    pub fn input_count(&self) -> usize {
        1 << self.new_bits
    }

    #[inline]
    pub fn next_state(&self, state: usize, input: usize) -> usize {
        self.next[(state << self.new_bits) | input] as usize
    }

    /// Steady-state hypothesis (all channel lags valid).
    #[inline]
    pub fn hypothesis(&self, state: usize, input: usize) -> f64 {
        self.hyp[(state << self.new_bits) | input]
    }

    /// Hypothesis with only lags `0..=max_lag` contributing; lags beyond
    /// `max_lag` fall before the frame start and are zero by frame synchrony.
    #[inline]
    pub fn hypothesis_masked(&self, state: usize, input: usize, max_lag: usize) -> f64 {
        let base = ((state << self.new_bits) | input) * self.lags;
        let take = (max_lag + 1).min(self.lags);
        let mut acc = 0.0;
        for i in 0..take {
            acc += self.contrib[base + i];
        }
        acc
    }
}

fn build_sections<F>(
    plan: &PhasePlan,
    window_bits: &[usize],
    lags: usize,
    cap: usize,
    mut transition: F,
) -> Result<Vec<Section>>
where
    F: FnMut(usize, usize, usize, &mut Vec<f64>) -> usize,
{
    let mut sections = Vec::with_capacity(plan.period());
    for sigma in 0..plan.period() {
        let phase = &plan.phases[sigma];
        let num_states = 1usize
            .checked_shl(window_bits[sigma] as u32)
            .unwrap_or(usize::MAX);
        if num_states > cap {
            return Err(Error::StateCapExceeded { phase: sigma, states: num_states, cap });
        }
        let num_inputs = 1usize << phase.new_bits;
        let mut next = Vec::with_capacity(num_states * num_inputs);
        let mut contrib = Vec::with_capacity(num_states * num_inputs * lags);
        let mut hyp = Vec::with_capacity(num_states * num_inputs);
        let mut scratch = vec![0.0; lags];
        for state in 0..num_states {
            for input in 0..num_inputs {
                let to = transition(sigma, state, input, &mut scratch);
                next.push(to as u32);
                contrib.extend_from_slice(&scratch);
                hyp.push(scratch.iter().sum());
            }
        }
        sections.push(Section {
            num_states,
            new_bits: phase.new_bits,
            decided_bits: phase.decided_bits,
            split: phase.split,
            merge: phase.merge,
            lags,
            next,
            contrib,
            hyp,
        });
    }
    Ok(sections)
}

/// Common decoder-facing view of both super-trellis constructions.
pub trait SuperTrellis {
    fn plan(&self) -> &PhasePlan;
    fn sections(&self) -> &[Section];
    /// Channel memory `L`.
    fn channel_memory(&self) -> usize;
    /// State corresponding to an all-zero information history with
    /// frame-synchronous (zero) channel memory.
    fn start_state(&self) -> usize;
    /// Trailing zero information bits that force the final state back to
    /// `start_state`.
    fn termination_bits(&self) -> usize;

    fn state_counts(&self) -> Vec<usize> {
        self.sections().iter().map(|s| s.num_states).collect()
    }
}

/// The matched (reduced) super-trellis over information-bit windows.
#[derive(Debug, Clone)]
pub struct TimeVariantTrellis {
    plan: PhasePlan,
    sections: Vec<Section>,
    window_bits: Vec<usize>,
    channel_memory: usize,
}

impl TimeVariantTrellis {
    pub fn build(
        code: &CodeSpec,
        scheme: &PuncturingScheme,
        label: &Labeling,
        taps: &ChannelTaps,
    ) -> Result<TimeVariantTrellis> {
        Self::build_with_cap(code, scheme, label, taps, DEFAULT_STATE_CAP)
    }

    pub fn build_with_cap(
        code: &CodeSpec,
        scheme: &PuncturingScheme,
        label: &Labeling,
        taps: &ChannelTaps,
        cap: usize,
    ) -> Result<TimeVariantTrellis> {
        let plan = compute_phase_plan(code, scheme, label)?;
        let l = taps.memory();
        let period = plan.period() as i64;

        // Window entering phase sigma must reach down to the lowest
        // information bit referenced by any of the L+1 symbols still in the
        // channel, and up to the newest already-hypothesized bit. Drops
        // follow the code-only decided schedule, so sizes are the decided
        // profile shifted up until every phase's span fits.
        let span: Vec<i64> = (0..period)
            .map(|sigma| {
                let lo_ch = (0..=l as i64).map(|i| plan.lo(sigma - i)).min().unwrap();
                plan.hi(sigma - 1) - lo_ch + 1
            })
            .collect();
        let mut cum = 0i64;
        let mut profile = Vec::with_capacity(plan.period());
        for phase in &plan.phases {
            profile.push(cum);
            cum += phase.new_bits as i64 - phase.decided_bits as i64;
        }
        debug_assert_eq!(cum, 0);
        let shift = (0..plan.period())
            .map(|s| span[s] - profile[s])
            .max()
            .unwrap();
        let window_bits: Vec<usize> = profile.iter().map(|c| (c + shift) as usize).collect();

        let h = taps.taps().to_vec();
        let sections = build_sections(&plan, &window_bits, l + 1, cap, |sigma, state, input, out| {
            let s_bits = window_bits[sigma];
            let n_bits = plan.phases[sigma].new_bits;
            let window = ((state as u64) << n_bits) | input as u64;
            let hi_cur = plan.hi(sigma as i64);
            for (i, slot) in out.iter_mut().enumerate() {
                let sym = sigma as i64 - i as i64;
                let ph = sym.rem_euclid(period) as usize;
                let cycle = sym.div_euclid(period);
                let mut group = 0usize;
                for src in &plan.phases[ph].sources {
                    let step = src.step + cycle * plan.info_bits_per_cycle as i64;
                    let mut v = 0u32;
                    for (j, &tap) in code.generators[src.generator].iter().enumerate() {
                        let pos = hi_cur - (step - j as i64);
                        debug_assert!(pos >= 0 && (pos as usize) < s_bits + n_bits);
                        v += u32::from(tap) * ((window >> pos) & 1) as u32;
                    }
                    // Gauss representation of the modulo: v mod 2 = v - 2*floor(v/2).
                    let bit = v - 2 * (v / 2);
                    group = (group << 1) | bit as usize;
                }
                let amp = label.amplitude_of_index(label.index_of_group(group));
                *slot = h[i] * amp;
            }
            let next_bits = window_bits[(sigma + 1) % plan.period()];
            (window & ((1u64 << next_bits) - 1)) as usize
        })?;

        Ok(TimeVariantTrellis {
            plan,
            sections,
            window_bits,
            channel_memory: l,
        })
    }

    /// Window length in bits entering each phase.
    pub fn window_bits(&self) -> &[usize] {
        &self.window_bits
    }
}

impl SuperTrellis for TimeVariantTrellis {
    fn plan(&self) -> &PhasePlan {
        &self.plan
    }
    fn sections(&self) -> &[Section] {
        &self.sections
    }
    fn channel_memory(&self) -> usize {
        self.channel_memory
    }
    fn start_state(&self) -> usize {
        0
    }
    fn termination_bits(&self) -> usize {
        self.window_bits[0]
    }
}

/// The straightforward product super-trellis: encoder state x pending kept
/// bits x last `L` mapped symbols.
#[derive(Debug, Clone)]
pub struct ProductTrellis {
    plan: PhasePlan,
    sections: Vec<Section>,
    pending_bits: Vec<usize>,
    channel_memory: usize,
    termination_bits: usize,
}

impl ProductTrellis {
    pub fn build(
        code: &CodeSpec,
        scheme: &PuncturingScheme,
        label: &Labeling,
        taps: &ChannelTaps,
    ) -> Result<ProductTrellis> {
        Self::build_with_cap(code, scheme, label, taps, DEFAULT_STATE_CAP)
    }

    pub fn build_with_cap(
        code: &CodeSpec,
        scheme: &PuncturingScheme,
        label: &Labeling,
        taps: &ChannelTaps,
        cap: usize,
    ) -> Result<ProductTrellis> {
        let plan = compute_phase_plan(code, scheme, label)?;
        let l = taps.memory();
        let m = label.m_ary;
        let n_sym = label.bits_per_symbol();
        let period = plan.period() as i64;

        // Encoder steps consumed and kept bits produced per phase; kept bits
        // that belong to a later symbol wait in the pending buffer.
        let steps: Vec<Vec<i64>> = (0..period)
            .map(|s| (plan.hi(s - 1) + 1..=plan.hi(s)).collect())
            .collect();
        let kept_at = |step: i64| -> usize {
            (0..code.n_out)
                .filter(|&g| scheme.keeps(g, step.rem_euclid(scheme.period as i64) as usize))
                .count()
        };
        let mut pending_bits = Vec::with_capacity(plan.period());
        let mut pend = 0usize;
        for sigma in 0..plan.period() {
            pending_bits.push(pend);
            let produced: usize = steps[sigma].iter().map(|&s| kept_at(s)).sum();
            pend = pend + produced - n_sym;
        }
        debug_assert_eq!(pend, 0);

        let enc_bits = code.memory;
        let digit_count = m.pow(l as u32);
        let window_bits: Vec<usize> = (0..plan.period())
            .map(|s| enc_bits + pending_bits[s] + n_sym * l)
            .collect();

        let h = taps.taps().to_vec();
        let sections = build_sections(&plan, &window_bits, l + 1, cap, |sigma, state, input, out| {
            let pend_in = pending_bits[sigma];
            let pend_out = pending_bits[(sigma + 1) % plan.period()];
            let digits = state % digit_count;
            let rest = state / digit_count;
            let pending = rest & ((1 << pend_in) - 1);
            let mut enc = (rest >> pend_in) as u64;

            // Oldest pending bit first, then freshly produced kept bits.
            let mut queue: Vec<u8> = (0..pend_in)
                .map(|i| ((pending >> (pend_in - 1 - i)) & 1) as u8)
                .collect();
            let n_in = plan.phases[sigma].new_bits;
            for (j, &step) in steps[sigma].iter().enumerate() {
                let bit = ((input >> (n_in - 1 - j)) & 1) as u8;
                let outs = code.step_outputs(bit, enc);
                for (g, &o) in outs.iter().enumerate() {
                    if scheme.keeps(g, step.rem_euclid(scheme.period as i64) as usize) {
                        queue.push(o);
                    }
                }
                enc = code.next_state(bit, enc);
            }
            let group = queue[..n_sym]
                .iter()
                .fold(0usize, |acc, &b| (acc << 1) | b as usize);
            let a = label.index_of_group(group);
            out[0] = h[0] * label.amplitude_of_index(a);
            for i in 1..=l {
                let digit = (digits / m.pow((i - 1) as u32)) % m;
                out[i] = h[i] * label.amplitude_of_index(digit);
            }

            let new_pending = queue[n_sym..]
                .iter()
                .fold(0usize, |acc, &b| (acc << 1) | b as usize);
            debug_assert_eq!(queue.len() - n_sym, pend_out);
            let new_digits = if l == 0 {
                0
            } else {
                a + m * (digits % m.pow((l - 1) as u32))
            };
            (((enc as usize) << pend_out | new_pending) * digit_count) + new_digits
        })?;

        // Enough trailing zeros to zero the encoder, the pending buffer and
        // the information windows of the last L symbols.
        let span0 = {
            let lo_ch = (0..=l as i64).map(|i| plan.lo(-i)).min().unwrap();
            (plan.hi(-1) - lo_ch + 1) as usize
        };

        Ok(ProductTrellis {
            plan,
            sections,
            pending_bits,
            channel_memory: l,
            termination_bits: span0,
        })
    }

    /// Pending kept bits entering each phase.
    pub fn pending_bits(&self) -> &[usize] {
        &self.pending_bits
    }
}

impl SuperTrellis for ProductTrellis {
    fn plan(&self) -> &PhasePlan {
        &self.plan
    }
    fn sections(&self) -> &[Section] {
        &self.sections
    }
    fn channel_memory(&self) -> usize {
        self.channel_memory
    }
    fn start_state(&self) -> usize {
        0
    }
    fn termination_bits(&self) -> usize {
        self.termination_bits
    }
}

/// One outgoing transition as reported by [`enumerate_hypotheses`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypothesis {
    pub input: usize,
    pub hypothesis: f64,
    pub next_state: usize,
}

/// List the outgoing transitions of `state` in phase `phase`, ordered by
/// ascending input value (and thereby next-state index).
pub fn enumerate_hypotheses<T: SuperTrellis + ?Sized>(
    trellis: &T,
    state: usize,
    phase: usize,
) -> Result<Vec<Hypothesis>> {
    let sections = trellis.sections();
    if phase >= sections.len() {
        return Err(Error::InvalidInput(format!(
            "phase {phase} out of range ({} phases)",
            sections.len()
        )));
    }
    let section = &sections[phase];
    if state >= section.num_states {
        return Err(Error::InvalidInput(format!(
            "state {state} out of range ({} states in phase {phase})",
            section.num_states
        )));
    }
    Ok((0..section.input_count())
        .map(|input| Hypothesis {
            input,
            hypothesis: section.hypothesis(state, input),
            next_state: section.next_state(state, input),
        })
        .collect())
}

/// Minimum squared Euclidean distance `sum (y1 - y2)^2` over all pairs of
/// paths that diverge from a common state and later remerge, taken over
/// every starting phase. Exact shortest-path search on the pair trellis.
pub fn min_divergence_distance<T: SuperTrellis + ?Sized>(trellis: &T) -> f64 {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Item(f64, usize, usize, usize); // cost, phase, state a, state b (a < b)
    impl Eq for Item {}
    impl Ord for Item {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0
                .total_cmp(&other.0)
                .then(self.1.cmp(&other.1))
                .then(self.2.cmp(&other.2))
                .then(self.3.cmp(&other.3))
        }
    }
    impl PartialOrd for Item {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }

    let sections = trellis.sections();
    let period = sections.len();
    let mut dist: Vec<Vec<f64>> = sections
        .iter()
        .map(|s| vec![f64::INFINITY; s.num_states * s.num_states])
        .collect();
    let mut heap: BinaryHeap<Reverse<Item>> = BinaryHeap::new();
    let mut best = f64::INFINITY;

    // Seed with every divergence: two distinct inputs out of one state.
    for (phase, section) in sections.iter().enumerate() {
        let next_phase = (phase + 1) % period;
        for state in 0..section.num_states {
            for va in 0..section.input_count() {
                for vb in (va + 1)..section.input_count() {
                    let d = section.hypothesis(state, va) - section.hypothesis(state, vb);
                    let cost = d * d;
                    let (a, b) = (section.next_state(state, va), section.next_state(state, vb));
                    if a == b {
                        best = best.min(cost);
                    } else {
                        let (a, b) = (a.min(b), a.max(b));
                        let idx = a * sections[next_phase].num_states + b;
                        if cost < dist[next_phase][idx] {
                            dist[next_phase][idx] = cost;
                            heap.push(Reverse(Item(cost, next_phase, a, b)));
                        }
                    }
                }
            }
        }
    }

    while let Some(Reverse(Item(cost, phase, a, b))) = heap.pop() {
        if cost >= best {
            break;
        }
        let idx = a * sections[phase].num_states + b;
        if cost > dist[phase][idx] {
            continue;
        }
        let section = &sections[phase];
        let next_phase = (phase + 1) % period;
        for va in 0..section.input_count() {
            for vb in 0..section.input_count() {
                let d = section.hypothesis(a, va) - section.hypothesis(b, vb);
                let edge = cost + d * d;
                let (na, nb) = (section.next_state(a, va), section.next_state(b, vb));
                if na == nb {
                    best = best.min(edge);
                } else {
                    let (na, nb) = (na.min(nb), na.max(nb));
                    let nidx = na * sections[next_phase].num_states + nb;
                    if edge < dist[next_phase][nidx] {
                        dist[next_phase][nidx] = edge;
                        heap.push(Reverse(Item(edge, next_phase, na, nb)));
                    }
                }
            }
        }
    }
    best
}

/// Render one section as text, one transition per line:
/// `phase from input hypothesis to decided-bits`.
pub fn dump_section<T: SuperTrellis + ?Sized>(trellis: &T, phase: usize) -> Result<String> {
    let sections = trellis.sections();
    if phase >= sections.len() {
        return Err(Error::InvalidInput(format!(
            "phase {phase} out of range ({} phases)",
            sections.len()
        )));
    }
    let section = &sections[phase];
    let mut out = String::new();
    for state in 0..section.num_states {
        for input in 0..section.input_count() {
            out.push_str(&format!(
                "{} {} {} {:.11e} {} {}\n",
                phase,
                state,
                input,
                section.hypothesis(state, input),
                section.next_state(state, input),
                section.decided_bits,
            ));
        }
    }
    Ok(out)
}
