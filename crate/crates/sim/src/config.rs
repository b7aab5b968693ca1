//! Simulation configuration: flat `key = value` text files with CLI
//! overrides on top.

use mdpam::LabelKind;
use std::fmt;
use std::str::FromStr;

/// Harness errors.
#[derive(Debug)]
pub enum SimError {
    Config(String),
    Io(std::io::Error),
    Core(mdpam::Error),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Config(msg) => write!(f, "config error: {msg}"),
            SimError::Io(e) => write!(f, "io error: {e}"),
            SimError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SimError {}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e)
    }
}

impl From<mdpam::Error> for SimError {
    fn from(e: mdpam::Error) -> Self {
        SimError::Core(e)
    }
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Receiver selection, e.g. `matched`, `matched-rsse:16`, `dfse-va:4`,
/// `bcjr-va`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiverKind {
    /// Matched decoding: Viterbi on the time-variant super-trellis.
    Matched,
    /// Matched decoding on a reduced state partition.
    MatchedRsse(usize),
    /// DFSE hard equalization followed by the code Viterbi.
    DfseVa(usize),
    /// BCJR soft equalization followed by the code Viterbi.
    BcjrVa,
}

impl fmt::Display for ReceiverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReceiverKind::Matched => write!(f, "matched"),
            ReceiverKind::MatchedRsse(s) => write!(f, "matched-rsse:{s}"),
            ReceiverKind::DfseVa(s) => write!(f, "dfse-va:{s}"),
            ReceiverKind::BcjrVa => write!(f, "bcjr-va"),
        }
    }
}

impl FromStr for ReceiverKind {
    type Err = SimError;

    fn from_str(s: &str) -> Result<ReceiverKind> {
        let bad = |s: &str| SimError::Config(format!("unknown receiver {s:?}"));
        if s == "matched" {
            return Ok(ReceiverKind::Matched);
        }
        if s == "bcjr-va" {
            return Ok(ReceiverKind::BcjrVa);
        }
        if let Some(states) = s.strip_prefix("matched-rsse:") {
            let states = states.parse().map_err(|_| bad(s))?;
            return Ok(ReceiverKind::MatchedRsse(states));
        }
        if let Some(states) = s.strip_prefix("dfse-va:") {
            let states = states.parse().map_err(|_| bad(s))?;
            return Ok(ReceiverKind::DfseVa(states));
        }
        Err(bad(s))
    }
}

/// Channel selection: a reference-family memory or explicit taps.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelConfig {
    Reference(usize),
    Taps(Vec<f64>),
}

/// Full description of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Generator polynomials, octal.
    pub generators: Vec<u32>,
    /// Puncturing rows of 0/1 characters, one per generator.
    pub puncturing: Vec<String>,
    pub labeling: LabelKind,
    pub channel: ChannelConfig,
    pub receivers: Vec<ReceiverKind>,
    pub ebn0_grid_db: Vec<f64>,
    /// Random information bits per frame (the zero tail comes on top).
    pub frame_info_bits: usize,
    pub max_frames: u64,
    pub min_bit_errors: u64,
    pub seed: u64,
    /// Skip the noise entirely (calibration runs).
    pub noiseless: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            generators: vec![0o5, 0o7],
            puncturing: vec!["10".into(), "11".into()],
            labeling: LabelKind::Gray,
            channel: ChannelConfig::Reference(2),
            receivers: vec![ReceiverKind::Matched, ReceiverKind::BcjrVa, ReceiverKind::DfseVa(4)],
            ebn0_grid_db: grid(2.0, 12.0, 2.0),
            frame_info_bits: 1024,
            max_frames: 100_000,
            min_bit_errors: 100,
            seed: 1,
            noiseless: false,
        }
    }
}

/// Inclusive dB grid `start:stop:step`.
pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let mut v = Vec::new();
    let mut x = start;
    while x <= stop + 1e-9 {
        v.push(x);
        x += step;
    }
    v
}

fn parse_grid_spec(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let nums: std::result::Result<Vec<f64>, _> = parts.iter().map(|p| p.parse()).collect();
        if let Ok(n) = nums {
            if n[2] > 0.0 && n[1] >= n[0] {
                return Ok(grid(n[0], n[1], n[2]));
            }
        }
        return Err(SimError::Config(format!("bad grid spec {spec:?}")));
    }
    let values: std::result::Result<Vec<f64>, _> =
        spec.split_whitespace().map(|p| p.parse()).collect();
    match values {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(SimError::Config(format!("bad grid spec {spec:?}"))),
    }
}

impl SimConfig {
    /// Parse a flat `key = value` file. Unknown keys are rejected; `#`
    /// starts a comment.
    pub fn parse(text: &str) -> Result<SimConfig> {
        let mut cfg = SimConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| SimError::Config(format!("line {}: expected key = value", lineno + 1)))?;
            cfg.set(key.trim(), value.trim())
                .map_err(|e| SimError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<SimConfig> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Apply one `key = value` assignment (also used for CLI overrides).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse_list(v: &str) -> Vec<&str> {
            v.split_whitespace().collect()
        }
        match key {
            "generators" => {
                self.generators = parse_list(value)
                    .iter()
                    .map(|g| u32::from_str_radix(g, 8))
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| SimError::Config(format!("generators: {e}")))?;
            }
            "puncturing" => {
                self.puncturing = parse_list(value).iter().map(|s| s.to_string()).collect();
            }
            "labeling" => {
                self.labeling = match value {
                    "natural" => LabelKind::Natural,
                    "gray" => LabelKind::Gray,
                    other => {
                        return Err(SimError::Config(format!("unknown labeling {other:?}")));
                    }
                };
            }
            "channel_memory" => {
                self.channel = ChannelConfig::Reference(
                    value
                        .parse()
                        .map_err(|e| SimError::Config(format!("channel_memory: {e}")))?,
                );
            }
            "taps" => {
                let taps: std::result::Result<Vec<f64>, _> =
                    parse_list(value).iter().map(|t| t.parse()).collect();
                self.channel = ChannelConfig::Taps(
                    taps.map_err(|e| SimError::Config(format!("taps: {e}")))?,
                );
            }
            "receivers" => {
                self.receivers = parse_list(value)
                    .iter()
                    .map(|r| r.parse())
                    .collect::<Result<_>>()?;
            }
            "ebn0_db" => self.ebn0_grid_db = parse_grid_spec(value)?,
            "frame_info_bits" => {
                self.frame_info_bits = value
                    .parse()
                    .map_err(|e| SimError::Config(format!("frame_info_bits: {e}")))?;
            }
            "max_frames" => {
                self.max_frames = value
                    .parse()
                    .map_err(|e| SimError::Config(format!("max_frames: {e}")))?;
            }
            "min_bit_errors" => {
                self.min_bit_errors = value
                    .parse()
                    .map_err(|e| SimError::Config(format!("min_bit_errors: {e}")))?;
            }
            "seed" => {
                self.seed = value.parse().map_err(|e| SimError::Config(format!("seed: {e}")))?;
            }
            "noiseless" => {
                self.noiseless = value
                    .parse()
                    .map_err(|e| SimError::Config(format!("noiseless: {e}")))?;
            }
            other => return Err(SimError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Canonical one-line rendering, hashed into the data-file header.
    pub fn canonical(&self) -> String {
        let receivers: Vec<String> = self.receivers.iter().map(|r| r.to_string()).collect();
        let channel = match &self.channel {
            ChannelConfig::Reference(l) => format!("L={l}"),
            ChannelConfig::Taps(t) => format!("taps={t:?}"),
        };
        format!(
            "generators={:?} puncturing={:?} labeling={:?} {channel} receivers={} ebn0={:?} \
             frame={} max_frames={} min_errors={} seed={} noiseless={}",
            self.generators,
            self.puncturing,
            self.labeling,
            receivers.join(","),
            self.ebn0_grid_db,
            self.frame_info_bits,
            self.max_frames,
            self.min_bit_errors,
            self.seed,
            self.noiseless
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_reference_config() {
        let text = "\
# reference sweep
generators = 5 7
puncturing = 10 11
labeling = gray
channel_memory = 4
receivers = matched matched-rsse:16 dfse-va:64 bcjr-va
ebn0_db = 2:12:2
frame_info_bits = 512
max_frames = 2000
min_bit_errors = 50
seed = 9
";
        let cfg = SimConfig::parse(text).unwrap();
        assert_eq!(cfg.generators, vec![0o5, 0o7]);
        assert_eq!(cfg.channel, ChannelConfig::Reference(4));
        assert_eq!(
            cfg.receivers,
            vec![
                ReceiverKind::Matched,
                ReceiverKind::MatchedRsse(16),
                ReceiverKind::DfseVa(64),
                ReceiverKind::BcjrVa
            ]
        );
        assert_eq!(cfg.ebn0_grid_db, vec![2.0, 4.0, 6.0, 8.0, 10.0, 12.0]);
        assert_eq!(cfg.frame_info_bits, 512);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn rejects_unknown_keys_and_receivers() {
        assert!(SimConfig::parse("bogus = 1").is_err());
        assert!(SimConfig::parse("receivers = turbo").is_err());
    }

    #[test]
    fn grid_spec_forms() {
        assert_eq!(parse_grid_spec("2:6:2").unwrap(), vec![2.0, 4.0, 6.0]);
        assert_eq!(parse_grid_spec("1 3 10").unwrap(), vec![1.0, 3.0, 10.0]);
        assert!(parse_grid_spec("a:b:c").is_err());
    }
}
