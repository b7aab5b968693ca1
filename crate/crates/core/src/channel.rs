//! Reference ISI channel construction, linear filtering and calibrated AWGN.

use crate::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

/// Unit-energy real channel coefficients `h[0..=L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTaps {
    taps: Vec<f64>,
}

impl ChannelTaps {
    /// The reference minimum-phase ramp family:
    /// `h[k] = (L-k+1) / ((L+1) * alpha)` with `alpha` normalizing the tap
    /// vector to unit energy.
    pub fn reference(memory: usize) -> ChannelTaps {
        let l = memory as f64;
        let raw: Vec<f64> = (0..=memory).map(|k| (l - k as f64 + 1.0) / (l + 1.0)).collect();
        let alpha = raw.iter().map(|h| h * h).sum::<f64>().sqrt();
        ChannelTaps {
            taps: raw.iter().map(|h| h / alpha).collect(),
        }
    }

    /// Accept an explicit tap vector. Taps are normalized to unit energy;
    /// the returned flag is true when normalization actually changed them.
    pub fn custom(taps: Vec<f64>) -> Result<(ChannelTaps, bool)> {
        if taps.is_empty() {
            return Err(Error::InvalidInput("empty tap vector".into()));
        }
        let energy: f64 = taps.iter().map(|h| h * h).sum();
        if energy <= 0.0 {
            return Err(Error::InvalidInput("tap vector has zero energy".into()));
        }
        let renormalized = (energy - 1.0).abs() > 1e-12;
        let scale = energy.sqrt();
        let taps = if renormalized {
            taps.iter().map(|h| h / scale).collect()
        } else {
            taps
        };
        Ok((ChannelTaps { taps }, renormalized))
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    /// Channel memory `L` (number of taps minus one).
    pub fn memory(&self) -> usize {
        self.taps.len() - 1
    }
}

/// Noise calibration for a transmission with overall rate `rate` info bits
/// per symbol and average symbol energy `symbol_energy`.
///
/// `Eb = Es / R` and the per-sample variance is `N0 / 2` with
/// `N0 = Eb / 10^(ebn0_db / 10)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub ebn0_db: f64,
    pub rate: f64,
    pub symbol_energy: f64,
}

impl NoiseSpec {
    pub fn new(ebn0_db: f64, rate: f64, symbol_energy: f64) -> Result<NoiseSpec> {
        if rate <= 0.0 || symbol_energy <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "rate and symbol energy must be positive, got {rate} and {symbol_energy}"
            )));
        }
        Ok(NoiseSpec { ebn0_db, rate, symbol_energy })
    }

    /// Noise variance per real sample, `sigma^2 = N0/2`.
    pub fn sigma_sq(&self) -> f64 {
        let ebn0 = 10f64.powf(self.ebn0_db / 10.0);
        self.symbol_energy / (self.rate * ebn0) / 2.0
    }
}

/// Causal FIR filtering with zero initial memory:
/// `r[k] = sum_i h[i] * m[k-i]`, `m[j] = 0` for `j < 0`.
///
/// With `flush`, `L` trailing samples of the decaying response are appended;
/// otherwise the output length equals the input length.
pub fn filter_with_flush(symbols: &[f64], taps: &ChannelTaps, flush: bool) -> Vec<f64> {
    let h = taps.taps();
    let out_len = symbols.len() + if flush { taps.memory() } else { 0 };
    (0..out_len)
        .map(|k| {
            let mut acc = 0.0;
            for (i, &hi) in h.iter().enumerate() {
                if k >= i && k - i < symbols.len() {
                    acc += hi * symbols[k - i];
                }
            }
            acc
        })
        .collect()
}

/// Frame-synchronous filtering without the trailing flush.
pub fn filter(symbols: &[f64], taps: &ChannelTaps) -> Vec<f64> {
    filter_with_flush(symbols, taps, false)
}

/// Add white Gaussian noise of variance `sigma_sq` drawn from `rng`.
/// `sigma_sq = 0` is the noiseless path and returns the signal unchanged.
pub fn add_awgn<R: Rng>(signal: &[f64], sigma_sq: f64, rng: &mut R) -> Result<Vec<f64>> {
    if sigma_sq < 0.0 {
        return Err(Error::InvalidInput(format!("negative noise variance {sigma_sq}")));
    }
    if sigma_sq == 0.0 {
        return Ok(signal.to_vec());
    }
    let sigma = sigma_sq.sqrt();
    Ok(signal
        .iter()
        .map(|&s| s + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn reference_taps_memoryless() {
        assert_eq!(ChannelTaps::reference(0).taps(), &[1.0]);
    }

    #[test]
    fn reference_taps_memory_one() {
        let taps = ChannelTaps::reference(1);
        let s5 = 5f64.sqrt();
        assert!((taps.taps()[0] - 2.0 / s5).abs() < 1e-12);
        assert!((taps.taps()[1] - 1.0 / s5).abs() < 1e-12);
    }

    #[test]
    fn reference_taps_memory_two() {
        let taps = ChannelTaps::reference(2);
        let s14 = 14f64.sqrt();
        let expected = [3.0 / s14, 2.0 / s14, 1.0 / s14];
        for (t, e) in taps.taps().iter().zip(expected) {
            assert!((t - e).abs() < 1e-12);
        }
    }

    #[test]
    fn reference_taps_are_unit_energy_and_decreasing() {
        for l in 0..=8 {
            let taps = ChannelTaps::reference(l);
            let energy: f64 = taps.taps().iter().map(|h| h * h).sum();
            assert!((energy - 1.0).abs() < 1e-12, "L={l}: energy {energy}");
            for w in taps.taps().windows(2) {
                assert!(w[0] > w[1] && w[1] > 0.0);
            }
        }
    }

    #[test]
    fn custom_taps_normalize_with_flag() {
        let (taps, renorm) = ChannelTaps::custom(vec![3.0, 4.0]).unwrap();
        assert!(renorm);
        let energy: f64 = taps.taps().iter().map(|h| h * h).sum();
        assert!((energy - 1.0).abs() < 1e-12);
        let (_, renorm) = ChannelTaps::custom(vec![1.0]).unwrap();
        assert!(!renorm);
    }

    #[test]
    fn single_tap_filter_is_identity() {
        let taps = ChannelTaps::reference(0);
        let x = vec![2.0, -1.0, 0.5];
        assert_eq!(filter(&x, &taps), x);
    }

    #[test]
    fn filter_matches_direct_convolution() {
        let taps = ChannelTaps::reference(1);
        let s5 = 5f64.sqrt();
        let out = filter(&[3.0, -1.0], &taps);
        assert!((out[0] - 6.0 / s5).abs() < 1e-12);
        assert!((out[1] - 1.0 / s5).abs() < 1e-12);
    }

    #[test]
    fn impulse_response_reads_out_taps() {
        let taps = ChannelTaps::reference(2);
        let out = filter(&[1.0, 0.0, 0.0], &taps);
        for (o, t) in out.iter().zip(taps.taps()) {
            assert!((o - t).abs() < 1e-12);
        }
    }

    #[test]
    fn filter_is_linear() {
        let taps = ChannelTaps::reference(2);
        let a = [1.0, -3.0, 2.0, 0.5, -1.0];
        let b = [0.25, 1.0, -2.0, 3.0, 1.5];
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let fa = filter(&a, &taps);
        let fb = filter(&b, &taps);
        let fsum = filter(&sum, &taps);
        for i in 0..a.len() {
            assert!((fsum[i] - fa[i] - fb[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn flush_appends_decaying_tail() {
        let taps = ChannelTaps::reference(1);
        let out = filter_with_flush(&[1.0], &taps, true);
        assert_eq!(out.len(), 2);
        assert!((out[1] - taps.taps()[1]).abs() < 1e-12);
    }

    #[test]
    fn sigma_sq_reference_point() {
        // M=4 (Es=5), R=4/3, 10 dB: N0 = 5/(4/3 * 10) = 0.375, sigma^2 = 0.1875.
        let spec = NoiseSpec::new(10.0, 4.0 / 3.0, 5.0).unwrap();
        assert!((spec.sigma_sq() - 0.1875).abs() < 1e-12);
    }

    #[test]
    fn noise_spec_rejects_bad_rate() {
        assert!(NoiseSpec::new(10.0, 0.0, 5.0).is_err());
        assert!(NoiseSpec::new(10.0, 4.0 / 3.0, -1.0).is_err());
    }

    #[test]
    fn zero_variance_noise_is_identity() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let x = vec![1.0, -2.0, 3.0];
        assert_eq!(add_awgn(&x, 0.0, &mut rng).unwrap(), x);
    }

    #[test]
    fn fixed_seed_reproduces_noise() {
        let x = vec![0.0; 32];
        let mut r1 = rand::rngs::StdRng::seed_from_u64(42);
        let mut r2 = rand::rngs::StdRng::seed_from_u64(42);
        let a = add_awgn(&x, 0.5, &mut r1).unwrap();
        let b = add_awgn(&x, 0.5, &mut r2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn long_run_output_energy_approaches_symbol_energy() {
        // Unit-energy taps preserve average energy for i.i.d. symbols.
        let taps = ChannelTaps::reference(3);
        let alphabet = [-3.0, -1.0, 1.0, 3.0];
        let mut rng = rand::rngs::StdRng::seed_from_u64(1234);
        let symbols: Vec<f64> = (0..200_000)
            .map(|_| alphabet[rng.random_range(0..4)])
            .collect();
        let out = filter(&symbols, &taps);
        let mean_energy: f64 = out.iter().map(|r| r * r).sum::<f64>() / out.len() as f64;
        assert!(
            (mean_energy - 5.0).abs() < 0.1,
            "E[r^2] = {mean_energy}, expected close to 5"
        );
    }
}
