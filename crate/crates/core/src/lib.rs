//! Coded-modulation toolkit for punctured convolutionally encoded PAM
//! transmission over ISI channels.
//!
//! The crate is organized around the transmit chain and its receivers:
//!
//! - [`coding`]: bit-exact convolutional encoding, periodic puncturing and
//!   bits-to-amplitude mapping for M-ary ASK.
//! - [`channel`]: the reference minimum-phase ISI channel family, linear
//!   filtering and calibrated AWGN.
//! - [`trellis`]: synthesis of the time-variant non-linear super-trellis that
//!   describes encoder, puncturer, mapper and channel jointly on a reduced
//!   state set, plus the straightforward product super-trellis used as a
//!   baseline.
//! - [`decode`]: sequence estimators — the time-variant Viterbi algorithm
//!   (matched decoding), its reduced-state variant, separated
//!   equalization-then-decoding baselines (DFSE and BCJR front ends) and a
//!   brute-force MLSE oracle for verification.
//!
//! All types are immutable after construction and all operations are pure
//! functions, so independent simulation workers can share them freely.

pub mod channel;
pub mod coding;
pub mod decode;
pub mod trellis;

pub use channel::{ChannelTaps, NoiseSpec};
pub use coding::{CodeSpec, LabelKind, Labeling, PuncturingScheme};
pub use decode::RssePartition;
pub use trellis::{PhasePlan, ProductTrellis, SuperTrellis, TimeVariantTrellis};

/// Errors reported by construction and decoding operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A constructor argument violated an invariant.
    InvalidInput(String),
    /// A stream length is inconsistent with the structure processing it.
    LengthMismatch(String),
    /// Trellis synthesis would exceed the configured state-count cap.
    StateCapExceeded { phase: usize, states: usize, cap: usize },
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::LengthMismatch(msg) => write!(f, "length mismatch: {msg}"),
            Error::StateCapExceeded { phase, states, cap } => write!(
                f,
                "state cap exceeded in phase {phase}: {states} states > cap {cap}"
            ),
        }
    }
}

impl std::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
