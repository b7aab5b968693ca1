//! Monte-Carlo BER measurement: frame simulation, stopping rules and the
//! whitespace-separated sweep data format.
//!
//! Frames are simulated in fixed-size chunks whose members run in parallel;
//! the stopping rule is evaluated at chunk boundaries only, so results are
//! bit-identical regardless of thread count or scheduling.

use crate::config::{ChannelConfig, ReceiverKind, Result, SimConfig, SimError};
use crate::rng::{hash_str, FrameRng};
use mdpam::decode::{
    replay_chain, rsse_decode, separated_receiver, viterbi_time_variant, SeparationMode,
};
use mdpam::trellis::SuperTrellis;
use mdpam::{
    channel, ChannelTaps, CodeSpec, Labeling, NoiseSpec, PuncturingScheme, RssePartition,
    TimeVariantTrellis,
};
use rayon::prelude::*;

/// Frames per parallel chunk; the stopping rule is checked after each chunk.
const CHUNK: u64 = 32;

/// Immutable transmit-side objects shared by all receivers of a sweep.
pub struct Chain {
    pub code: CodeSpec,
    pub scheme: PuncturingScheme,
    pub label: Labeling,
    pub taps: ChannelTaps,
    /// Information bits per puncturing cycle.
    pub cycle_bits: usize,
    /// Overall rate in information bits per symbol.
    pub rate: f64,
}

impl Chain {
    pub fn from_config(cfg: &SimConfig) -> Result<Chain> {
        let code = CodeSpec::from_octal(&cfg.generators)?;
        let rows: Vec<&str> = cfg.puncturing.iter().map(|s| s.as_str()).collect();
        let scheme = PuncturingScheme::from_rows(&rows)?;
        let label = Labeling::new(1 << code.n_out, cfg.labeling)?;
        let taps = match &cfg.channel {
            ChannelConfig::Reference(l) => ChannelTaps::reference(*l),
            ChannelConfig::Taps(t) => {
                let (taps, renormalized) = ChannelTaps::custom(t.clone())?;
                if renormalized {
                    eprintln!("note: custom taps renormalized to unit energy");
                }
                taps
            }
        };
        let plan = mdpam::trellis::compute_phase_plan(&code, &scheme, &label)?;
        if cfg.frame_info_bits == 0 || !cfg.frame_info_bits.is_multiple_of(plan.info_bits_per_cycle) {
            return Err(SimError::Config(format!(
                "frame_info_bits ({}) must be a positive multiple of the puncturing cycle ({})",
                cfg.frame_info_bits, plan.info_bits_per_cycle
            )));
        }
        if cfg.min_bit_errors == 0 {
            return Err(SimError::Config("min_bit_errors must be >= 1".into()));
        }
        Ok(Chain {
            code,
            scheme,
            label,
            taps,
            cycle_bits: plan.info_bits_per_cycle,
            rate: plan.rate(),
        })
    }

    /// Zero-tail length for a receiver needing `needed` trailing zeros,
    /// rounded up to a whole puncturing cycle.
    fn tail_bits(&self, needed: usize) -> usize {
        needed.div_ceil(self.cycle_bits) * self.cycle_bits
    }
}

enum BuiltReceiver {
    Matched { trellis: TimeVariantTrellis },
    Rsse { trellis: TimeVariantTrellis, partition: RssePartition },
    Dfse { states: usize },
    Bcjr,
}

impl BuiltReceiver {
    fn build(kind: ReceiverKind, chain: &Chain) -> mdpam::Result<BuiltReceiver> {
        match kind {
            ReceiverKind::Matched => Ok(BuiltReceiver::Matched {
                trellis: TimeVariantTrellis::build(
                    &chain.code,
                    &chain.scheme,
                    &chain.label,
                    &chain.taps,
                )?,
            }),
            ReceiverKind::MatchedRsse(states) => Ok(BuiltReceiver::Rsse {
                trellis: TimeVariantTrellis::build(
                    &chain.code,
                    &chain.scheme,
                    &chain.label,
                    &chain.taps,
                )?,
                partition: RssePartition::new(states)?,
            }),
            ReceiverKind::DfseVa(states) => {
                // Validate the state count up front against M^J.
                let m = chain.label.m_ary;
                let l = chain.taps.memory();
                let valid = (0..=l).any(|j| m.pow(j as u32) == states);
                if !valid {
                    return Err(mdpam::Error::InvalidInput(format!(
                        "dfse-va states {states} is not M^J with J <= {l}"
                    )));
                }
                Ok(BuiltReceiver::Dfse { states })
            }
            ReceiverKind::BcjrVa => Ok(BuiltReceiver::Bcjr),
        }
    }

    fn termination_bits(&self, chain: &Chain) -> usize {
        match self {
            BuiltReceiver::Matched { trellis } | BuiltReceiver::Rsse { trellis, .. } => {
                trellis.termination_bits()
            }
            BuiltReceiver::Dfse { .. } | BuiltReceiver::Bcjr => chain.code.memory,
        }
    }

    fn decode(
        &self,
        rx: &[f64],
        chain: &Chain,
        sigma_sq: f64,
        zero_tail: usize,
    ) -> mdpam::Result<Vec<u8>> {
        match self {
            BuiltReceiver::Matched { trellis } => viterbi_time_variant(trellis, rx, zero_tail),
            BuiltReceiver::Rsse { trellis, partition } => {
                rsse_decode(trellis, partition, rx, zero_tail)
            }
            BuiltReceiver::Dfse { states } => separated_receiver(
                rx,
                SeparationMode::Hard,
                *states,
                &chain.code,
                &chain.scheme,
                &chain.label,
                &chain.taps,
                sigma_sq,
                zero_tail,
            ),
            BuiltReceiver::Bcjr => separated_receiver(
                rx,
                SeparationMode::Soft,
                0,
                &chain.code,
                &chain.scheme,
                &chain.label,
                &chain.taps,
                // The soft equalizer needs a strictly positive variance even
                // on the noiseless calibration path.
                if sigma_sq > 0.0 { sigma_sq } else { 1.0 },
                zero_tail,
            ),
        }
    }
}

/// One Monte-Carlo measurement point.
#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub ebn0_db: f64,
    pub receiver: String,
    pub bits: u64,
    pub errors: u64,
    pub frames: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub wilson_half_width: f64,
    /// Set when the receiver could not be constructed or failed to decode.
    pub error: Option<String>,
}

impl BerRecord {
    fn failed(ebn0_db: f64, receiver: String, message: String) -> BerRecord {
        BerRecord {
            ebn0_db,
            receiver,
            bits: 0,
            errors: 0,
            frames: 0,
            frame_errors: 0,
            ber: f64::NAN,
            wilson_half_width: f64::NAN,
            error: Some(message),
        }
    }

    /// 95% Wilson score interval for the bit error probability.
    pub fn wilson_interval(&self) -> (f64, f64) {
        wilson_interval(self.errors, self.bits)
    }
}

/// 95% Wilson score interval for `errors` out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let hw = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - hw).max(0.0), (center + hw).min(1.0))
}

/// Simulate one `(Eb/N0, receiver)` point until `min_bit_errors` or
/// `max_frames`, whichever comes first (checked at chunk boundaries).
pub fn run_point(cfg: &SimConfig, ebn0_db: f64, receiver: ReceiverKind) -> BerRecord {
    let name = receiver.to_string();
    let chain = match Chain::from_config(cfg) {
        Ok(c) => c,
        Err(e) => return BerRecord::failed(ebn0_db, name, e.to_string()),
    };
    let built = match BuiltReceiver::build(receiver, &chain) {
        Ok(b) => b,
        Err(e) => return BerRecord::failed(ebn0_db, name, e.to_string()),
    };
    let sigma_sq = if cfg.noiseless {
        0.0
    } else {
        match NoiseSpec::new(ebn0_db, chain.rate, chain.label.symbol_energy()) {
            Ok(spec) => spec.sigma_sq(),
            Err(e) => return BerRecord::failed(ebn0_db, name, e.to_string()),
        }
    };
    let tail = chain.tail_bits(built.termination_bits(&chain));
    let receiver_id = hash_str(&name);
    let ebn0_index = cfg
        .ebn0_grid_db
        .iter()
        .position(|&x| (x - ebn0_db).abs() < 1e-9)
        .map(|i| i as u64)
        .unwrap_or_else(|| ebn0_db.to_bits());

    let mut frames = 0u64;
    let mut errors = 0u64;
    let mut frame_errors = 0u64;
    while frames < cfg.max_frames && errors < cfg.min_bit_errors {
        let n = CHUNK.min(cfg.max_frames - frames);
        let chunk: Vec<mdpam::Result<(u64, bool)>> = (frames..frames + n)
            .into_par_iter()
            .map(|frame_index| {
                simulate_frame(
                    &chain,
                    &built,
                    cfg,
                    sigma_sq,
                    tail,
                    receiver_id,
                    ebn0_index,
                    frame_index,
                )
            })
            .collect();
        for result in chunk {
            match result {
                Ok((e, fe)) => {
                    errors += e;
                    frame_errors += u64::from(fe);
                }
                Err(e) => return BerRecord::failed(ebn0_db, name, e.to_string()),
            }
        }
        frames += n;
    }

    let bits = frames * cfg.frame_info_bits as u64;
    let (lo, hi) = wilson_interval(errors, bits);
    BerRecord {
        ebn0_db,
        receiver: name,
        bits,
        errors,
        frames,
        frame_errors,
        ber: errors as f64 / bits as f64,
        wilson_half_width: (hi - lo) / 2.0,
        error: None,
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate_frame(
    chain: &Chain,
    built: &BuiltReceiver,
    cfg: &SimConfig,
    sigma_sq: f64,
    tail: usize,
    receiver_id: u64,
    ebn0_index: u64,
    frame_index: u64,
) -> mdpam::Result<(u64, bool)> {
    let mut rng = FrameRng::for_frame(cfg.seed, receiver_id, ebn0_index, frame_index);
    let info = cfg.frame_info_bits;
    let mut u: Vec<u8> = (0..info).map(|_| rng.bit()).collect();
    u.extend(std::iter::repeat_n(0, tail));
    let clean = replay_chain(&u, &chain.code, &chain.scheme, &chain.label, &chain.taps)?;
    let rx = channel::add_awgn(&clean, sigma_sq, &mut rng)?;
    let decoded = built.decode(&rx, chain, sigma_sq, tail)?;
    let errors = u[..info]
        .iter()
        .zip(&decoded[..info])
        .filter(|(a, b)| a != b)
        .count() as u64;
    Ok((errors, errors > 0))
}

/// A finished sweep: all records plus the rendered data file.
pub struct SweepOutput {
    pub records: Vec<BerRecord>,
    pub data: String,
}

/// Iterate the full grid x receiver matrix and render the data file:
/// column 0 is Eb/N0 in dB, one BER column per receiver in config order.
pub fn run_sweep(cfg: &SimConfig) -> Result<SweepOutput> {
    // Surface config-level problems before burning CPU on the grid.
    Chain::from_config(cfg)?;
    let mut records = Vec::new();
    for &ebn0_db in &cfg.ebn0_grid_db {
        for &receiver in &cfg.receivers {
            records.push(run_point(cfg, ebn0_db, receiver));
        }
    }
    let data = render_data(cfg, &records);
    Ok(SweepOutput { records, data })
}

fn render_data(cfg: &SimConfig, records: &[BerRecord]) -> String {
    let names: Vec<String> = cfg.receivers.iter().map(|r| r.to_string()).collect();
    let mut out = String::new();
    out.push_str("# mdpam-sim sweep\n");
    out.push_str(&format!("# config {:016x}\n", hash_str(&cfg.canonical())));
    out.push_str(&format!("# columns: ebn0_db {}\n", names.join(" ")));
    for (i, &ebn0_db) in cfg.ebn0_grid_db.iter().enumerate() {
        out.push_str(&format!("{ebn0_db}"));
        for j in 0..names.len() {
            let rec = &records[i * names.len() + j];
            out.push_str(&format!(" {:.6e}", rec.ber));
        }
        out.push('\n');
    }
    out
}

/// Verbose per-record line for terminal output.
pub fn format_record(rec: &BerRecord) -> String {
    match &rec.error {
        Some(e) => format!(
            "{:>6.2} dB  {:<18} FAILED: {e}",
            rec.ebn0_db, rec.receiver
        ),
        None => {
            let (lo, hi) = rec.wilson_interval();
            format!(
                "{:>6.2} dB  {:<18} BER {:.3e}  [{:.3e}, {:.3e}]  ({} errors / {} bits, {} frames)",
                rec.ebn0_db, rec.receiver, rec.ber, lo, hi, rec.errors, rec.bits, rec.frames
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> SimConfig {
        let mut cfg = SimConfig::default();
        cfg.set("channel_memory", "1").unwrap();
        cfg.set("frame_info_bits", "64").unwrap();
        cfg.set("min_bit_errors", "20").unwrap();
        cfg.set("max_frames", "40").unwrap();
        cfg.set("ebn0_db", "4 8").unwrap();
        cfg.set("receivers", "matched bcjr-va").unwrap();
        cfg
    }

    #[test]
    fn noiseless_points_have_zero_ber() {
        let mut cfg = quick_cfg();
        cfg.noiseless = true;
        cfg.max_frames = 5;
        for receiver in [
            ReceiverKind::Matched,
            ReceiverKind::MatchedRsse(8),
            ReceiverKind::DfseVa(4),
            ReceiverKind::BcjrVa,
        ] {
            let rec = run_point(&cfg, 8.0, receiver);
            assert_eq!(rec.error, None, "{receiver}: {:?}", rec.error);
            assert_eq!(rec.errors, 0, "{receiver}");
            assert_eq!(rec.ber, 0.0);
        }
    }

    #[test]
    fn same_seed_reproduces_records_across_thread_counts() {
        let cfg = quick_cfg();
        let serial = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_point(&cfg, 4.0, ReceiverKind::Matched));
        let parallel = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_point(&cfg, 4.0, ReceiverKind::Matched));
        assert_eq!(serial, parallel);
        let again = run_point(&cfg, 4.0, ReceiverKind::Matched);
        assert_eq!(serial, again);
    }

    #[test]
    fn bits_equal_frames_times_info_bits() {
        let cfg = quick_cfg();
        let rec = run_point(&cfg, 4.0, ReceiverKind::Matched);
        assert_eq!(rec.bits, rec.frames * cfg.frame_info_bits as u64);
        assert!(rec.frames <= cfg.max_frames);
    }

    #[test]
    fn sweep_renders_one_row_per_grid_point() {
        let mut cfg = quick_cfg();
        cfg.max_frames = 8;
        cfg.min_bit_errors = 5;
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.records.len(), 4);
        let rows: Vec<&str> = out.data.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows.len(), 2);
        for row in rows {
            assert_eq!(row.split_whitespace().count(), 3);
        }
        assert!(out.data.contains("# columns: ebn0_db matched bcjr-va"));
    }

    #[test]
    fn construction_failure_lands_in_record() {
        let mut cfg = quick_cfg();
        // dfse-va:8 is not a power of M=4.
        let rec = run_point(&cfg, 4.0, ReceiverKind::DfseVa(8));
        assert!(rec.error.is_some());
        assert!(rec.ber.is_nan());
        // State-cap failure for the matched receiver.
        cfg.set("channel_memory", "16").unwrap();
        let rec = run_point(&cfg, 4.0, ReceiverKind::Matched);
        assert!(rec.error.is_some());
    }

    #[test]
    fn frame_info_bits_must_align_to_cycle() {
        let mut cfg = quick_cfg();
        cfg.frame_info_bits = 66;
        assert!(Chain::from_config(&cfg).is_err());
    }
}
