//! Convolutional encoding, periodic puncturing and M-ary ASK mapping.
//!
//! Bits are represented as `u8` values in `{0, 1}` and amplitudes as `f64`.
//! The encoder is feed-forward (delay-free) with one input line; generators
//! are given in octal with the most significant octal bit acting on the
//! current input bit, so `5oct = 101` and `7oct = 111`.

use crate::{Error, Result};

/// A feed-forward binary convolutional code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    /// Input bits per encoder step. Only `k_in = 1` is supported in v1; the
    /// field is carried for forward compatibility.
    pub k_in: usize,
    /// Output bits per encoder step.
    pub n_out: usize,
    /// One tap list per output line, `memory + 1` taps each. `taps[0]`
    /// multiplies the current input bit, `taps[j]` the input `j` steps back.
    pub generators: Vec<Vec<u8>>,
    /// Encoder memory in bits.
    pub memory: usize,
}

impl CodeSpec {
    /// Build a code from octal generator polynomials, e.g. `[0o5, 0o7]`.
    ///
    /// The constraint length is taken from the widest generator; narrower
    /// generators are left-padded with zero taps.
    pub fn from_octal(generators_octal: &[u32]) -> Result<Self> {
        if generators_octal.is_empty() {
            return Err(Error::InvalidInput("no generator polynomials".into()));
        }
        if generators_octal.contains(&0) {
            return Err(Error::InvalidInput("all-zero generator polynomial".into()));
        }
        let width = generators_octal
            .iter()
            .map(|&g| 32 - g.leading_zeros() as usize)
            .max()
            .unwrap();
        // The widest generator's leading bit lands on the current-input tap,
        // so the encoder is delay-free by construction.
        let generators: Vec<Vec<u8>> = generators_octal
            .iter()
            .map(|&g| (0..width).rev().map(|j| ((g >> j) & 1) as u8).collect())
            .collect();
        debug_assert!(generators.iter().any(|g| g[0] == 1));
        Ok(CodeSpec {
            k_in: 1,
            n_out: generators.len(),
            generators,
            memory: width - 1,
        })
    }

    /// Number of encoder states, `2^memory`.
    pub fn state_count(&self) -> usize {
        1 << self.memory
    }

    /// Output bits of one encoder step. `state` holds the previous inputs
    /// with the most recent input in bit 0.
    pub fn step_outputs(&self, input: u8, state: u64) -> Vec<u8> {
        self.generators
            .iter()
            .map(|taps| {
                let mut v = taps[0] & input;
                for (j, &t) in taps.iter().enumerate().skip(1) {
                    v ^= t & ((state >> (j - 1)) as u8 & 1);
                }
                v
            })
            .collect()
    }

    /// State after consuming `input` from `state`.
    pub fn next_state(&self, input: u8, state: u64) -> u64 {
        if self.memory == 0 {
            0
        } else {
            ((state << 1) | u64::from(input)) & ((1 << self.memory) - 1)
        }
    }
}

/// Periodic keep/drop pattern applied per output line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturingScheme {
    /// `n_out` rows of `period` keep (1) / drop (0) flags.
    pub pattern: Vec<Vec<u8>>,
    /// Pattern period in encoder steps.
    pub period: usize,
}

impl PuncturingScheme {
    /// Build a scheme from rows of `0`/`1` characters, e.g. `["10", "11"]`.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let pattern: Vec<Vec<u8>> = rows
            .iter()
            .map(|r| {
                r.chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(Error::InvalidInput(format!(
                            "puncturing rows must contain only 0/1, got {c:?}"
                        ))),
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        Self::new(pattern)
    }

    /// Build a scheme from an explicit keep/drop matrix.
    pub fn new(pattern: Vec<Vec<u8>>) -> Result<Self> {
        if pattern.is_empty() || pattern[0].is_empty() {
            return Err(Error::InvalidInput("empty puncturing pattern".into()));
        }
        let period = pattern[0].len();
        if pattern.iter().any(|r| r.len() != period) {
            return Err(Error::InvalidInput("ragged puncturing pattern".into()));
        }
        if pattern.iter().flatten().any(|&b| b > 1) {
            return Err(Error::InvalidInput("puncturing entries must be 0 or 1".into()));
        }
        let scheme = PuncturingScheme { pattern, period };
        if scheme.kept_per_period() == 0 {
            return Err(Error::InvalidInput("puncturing pattern keeps no bits".into()));
        }
        Ok(scheme)
    }

    /// A pattern that keeps every bit of an `n_out`-line encoder.
    pub fn all_keep(n_out: usize) -> Self {
        PuncturingScheme {
            pattern: vec![vec![1]; n_out],
            period: 1,
        }
    }

    /// Total kept bits over one pattern period.
    pub fn kept_per_period(&self) -> usize {
        self.pattern.iter().flatten().map(|&b| b as usize).sum()
    }

    /// Whether output line `generator` is kept at encoder step `step`.
    pub fn keeps(&self, generator: usize, step: usize) -> bool {
        self.pattern[generator][step % self.period] == 1
    }
}

/// Mapping of coded-bit groups onto the M-ary ASK alphabet
/// `{-(M-1), -(M-3), ..., M-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelKind {
    /// Group value maps directly onto the amplitude index.
    Natural,
    /// Group value is binary-reflected Gray decoded before mapping.
    Gray,
}

/// A bits-to-amplitude labeling for `M = 2^n` ASK.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Labeling {
    pub m_ary: usize,
    pub kind: LabelKind,
}

fn gray_to_binary(g: usize) -> usize {
    let mut b = g;
    let mut shift = g >> 1;
    while shift != 0 {
        b ^= shift;
        shift >>= 1;
    }
    b
}

fn binary_to_gray(b: usize) -> usize {
    b ^ (b >> 1)
}

impl Labeling {
    pub fn new(m_ary: usize, kind: LabelKind) -> Result<Self> {
        if m_ary < 2 || !m_ary.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "alphabet size must be a power of two >= 2, got {m_ary}"
            )));
        }
        Ok(Labeling { m_ary, kind })
    }

    /// Coded bits per symbol, `log2(M)`.
    pub fn bits_per_symbol(&self) -> usize {
        self.m_ary.trailing_zeros() as usize
    }

    /// Amplitude of alphabet index `a` (ascending order), `2a - (M-1)`.
    pub fn amplitude_of_index(&self, a: usize) -> f64 {
        debug_assert!(a < self.m_ary);
        (2 * a) as f64 - (self.m_ary - 1) as f64
    }

    /// Alphabet index selected by group value `d` (first bit = MSB).
    pub fn index_of_group(&self, d: usize) -> usize {
        match self.kind {
            LabelKind::Natural => d,
            LabelKind::Gray => gray_to_binary(d),
        }
    }

    /// Group value that selects alphabet index `a`; inverse of
    /// [`Labeling::index_of_group`].
    pub fn group_of_index(&self, a: usize) -> usize {
        match self.kind {
            LabelKind::Natural => a,
            LabelKind::Gray => binary_to_gray(a),
        }
    }

    /// Transmitted bit at position `pos` (0 = MSB) when alphabet index `a`
    /// is sent.
    pub fn bit_of_index(&self, a: usize, pos: usize) -> u8 {
        let n = self.bits_per_symbol();
        ((self.group_of_index(a) >> (n - 1 - pos)) & 1) as u8
    }

    /// The full amplitude alphabet in index order.
    pub fn alphabet(&self) -> Vec<f64> {
        (0..self.m_ary).map(|a| self.amplitude_of_index(a)).collect()
    }

    /// Average symbol energy of the equiprobable alphabet, `(M^2 - 1)/3`.
    pub fn symbol_energy(&self) -> f64 {
        ((self.m_ary * self.m_ary - 1) as f64) / 3.0
    }
}

/// Where a kept bit came from: `(generator index, encoder step)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeptBit {
    pub generator: usize,
    pub step: usize,
}

/// Convolutionally encode `info`. With `terminate`, `memory` zero bits are
/// appended so the encoder returns to the all-zero state.
pub fn encode(info: &[u8], code: &CodeSpec, terminate: bool) -> Result<Vec<u8>> {
    if info.is_empty() {
        return Err(Error::InvalidInput("empty information sequence".into()));
    }
    let tail = if terminate { code.memory } else { 0 };
    let mut out = Vec::with_capacity((info.len() + tail) * code.n_out);
    let mut state = 0u64;
    for &u in info.iter().chain(std::iter::repeat_n(&0u8, tail)) {
        debug_assert!(u <= 1);
        out.extend(code.step_outputs(u, state));
        state = code.next_state(u, state);
    }
    Ok(out)
}

/// Drop coded bits per the puncturing scheme. Returns the kept bits in
/// stream order together with the phase trace recording each kept bit's
/// origin.
pub fn puncture(coded: &[u8], scheme: &PuncturingScheme) -> Result<(Vec<u8>, Vec<KeptBit>)> {
    let n_out = scheme.pattern.len();
    if !coded.len().is_multiple_of(n_out) {
        return Err(Error::LengthMismatch(format!(
            "coded length {} is not a multiple of {n_out}",
            coded.len()
        )));
    }
    let steps = coded.len() / n_out;
    let mut kept = Vec::new();
    let mut trace = Vec::new();
    for step in 0..steps {
        for generator in 0..n_out {
            if scheme.keeps(generator, step) {
                kept.push(coded[step * n_out + generator]);
                trace.push(KeptBit { generator, step });
            }
        }
    }
    Ok((kept, trace))
}

/// Re-insert erased positions into a kept-bit soft-value stream: dropped
/// positions receive an exact-zero LLR, kept positions pass through.
///
/// The input must end exactly at an encoder-step boundary of the scheme.
pub fn depuncture_llrs(llrs: &[f64], scheme: &PuncturingScheme) -> Result<Vec<f64>> {
    let n_out = scheme.pattern.len();
    let mut out = Vec::new();
    let mut pos = 0;
    let mut step = 0;
    while pos < llrs.len() {
        for generator in 0..n_out {
            if scheme.keeps(generator, step) {
                if pos >= llrs.len() {
                    return Err(Error::LengthMismatch(format!(
                        "soft-value count {} ends inside encoder step {step}",
                        llrs.len()
                    )));
                }
                out.push(llrs[pos]);
                pos += 1;
            } else {
                out.push(0.0);
            }
        }
        step += 1;
    }
    Ok(out)
}

/// Map a bit stream onto ASK amplitudes, `bits_per_symbol` bits per symbol,
/// first bit of each group most significant.
pub fn map_symbols(bits: &[u8], label: &Labeling) -> Result<Vec<f64>> {
    let n = label.bits_per_symbol();
    if !bits.len().is_multiple_of(n) {
        return Err(Error::LengthMismatch(format!(
            "bit count {} is not a multiple of {n}",
            bits.len()
        )));
    }
    Ok(bits
        .chunks(n)
        .map(|group| {
            let d = group.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            label.amplitude_of_index(label.index_of_group(d))
        })
        .collect())
}
