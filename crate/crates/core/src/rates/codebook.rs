//! Random vector quantization codebooks for a two-antenna transmitter.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, miso_channel};

/// Largest per-band bit count a super-codebook can be generated for.
pub const MAX_CODEBOOK_BITS: u32 = 12;

pub type Channel = [Complex64; 2];

/// A set of unit-norm beamforming vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[[f64; 2]; 2]>", into = "Vec<[[f64; 2]; 2]>")]
pub struct Codebook {
    codewords: Vec<Channel>,
}

impl Codebook {
    pub fn new(codewords: Vec<Channel>) -> Result<Self> {
        if codewords.is_empty() {
            return Err(Error::EmptyCodebook);
        }
        if let Some(i) = codewords.iter().position(|w| (norm_sqr(w) - 1.0).abs() > 1e-9) {
            return Err(Error::Config(format!(
                "codeword {i} has squared norm {}",
                norm_sqr(&codewords[i])
            )));
        }
        Ok(Self { codewords })
    }

    /// The single codeword `(1, 0)` used with zero feedback bits.
    pub fn trivial() -> Self {
        Self {
            codewords: vec![[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]],
        }
    }

    /// `2^bits` points uniform on the unit sphere of `C^2`.
    pub fn random<R: rand::Rng + ?Sized>(bits: u32, rng: &mut R) -> Self {
        let codewords = (0..1usize << bits)
            .map(|_| {
                let h = miso_channel(rng);
                let n = norm_sqr(&h).sqrt();
                [h[0] / n, h[1] / n]
            })
            .collect();
        Self { codewords }
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codewords(&self) -> &[Channel] {
        &self.codewords
    }

    /// `max_w |<h, w>|^2`.
    pub fn best_gain(&self, h: &Channel) -> f64 {
        self.codewords
            .iter()
            .map(|w| (h[0].conj() * w[0] + h[1].conj() * w[1]).norm_sqr())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<[[f64; 2]; 2]>> for Codebook {
    type Error = Error;

    fn try_from(raw: Vec<[[f64; 2]; 2]>) -> Result<Self> {
        Codebook::new(
            raw.into_iter()
                .map(|[a, b]| [Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1])])
                .collect(),
        )
    }
}

impl From<Codebook> for Vec<[[f64; 2]; 2]> {
    fn from(cb: Codebook) -> Self {
        cb.codewords
            .into_iter()
            .map(|[a, b]| [[a.re, a.im], [b.re, b.im]])
            .collect()
    }
}

pub fn norm_sqr(h: &Channel) -> f64 {
    h[0].norm_sqr() + h[1].norm_sqr()
}

/// `log2(1 + snr ||h||^2)`, the rate with perfect channel direction feedback.
pub fn perfect_rate(snr: f64, h: &Channel) -> f64 {
    (snr * norm_sqr(h)).ln_1p() / std::f64::consts::LN_2
}

/// Instantaneous quantized-beamforming rate `log2(1 + snr max_w |<h, w>|^2)`.
pub fn codebook_rate(codebook: &Codebook, snr: f64, h: &Channel) -> Result<f64> {
    if codebook.is_empty() {
        return Err(Error::EmptyCodebook);
    }
    Ok((snr * codebook.best_gain(h)).ln_1p() / std::f64::consts::LN_2)
}

/// Sample-mean rate of `codebook` over `channels`.
pub fn ergodic_rate(codebook: &Codebook, snr: f64, channels: &[Channel]) -> f64 {
    if channels.is_empty() {
        return 0.0;
    }
    channels
        .iter()
        .map(|h| (snr * codebook.best_gain(h)).ln_1p())
        .sum::<f64>()
        / channels.len() as f64
        / std::f64::consts::LN_2
}

pub fn draw_channels<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Channel> {
    (0..n).map(|_| miso_channel(rng)).collect()
}

/// Best-of-random codebooks `C*(0), ..., C*(B)`, one per bit count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperCodebook {
    pub seed: u64,
    pub num_candidates: usize,
    pub num_channels: usize,
    pub codebooks: Vec<Codebook>,
}

/// SNR at which candidate codebooks are ranked (0 dB).
pub const SELECTION_SNR: f64 = 1.0;

impl SuperCodebook {
    pub fn max_bits(&self) -> u32 {
        self.codebooks.len().saturating_sub(1) as u32
    }

    pub fn get(&self, bits: u32) -> Result<&Codebook> {
        self.codebooks.get(bits as usize).ok_or_else(|| {
            Error::Config(format!(
                "no codebook for {bits} bits (super-codebook covers 0..={})",
                self.max_bits()
            ))
        })
    }
}

/// For each `b` in `0..=max_bits`, draws `num_candidates` random codebooks of
/// `2^b` codewords, scores each by its ergodic rate at 0 dB over a common set
/// of `num_channels` channels and keeps the best (lowest index on ties).
pub fn generate_supercodebook(
    max_bits: u32,
    num_candidates: usize,
    num_channels: usize,
    seed: u64,
) -> Result<SuperCodebook> {
    if max_bits > MAX_CODEBOOK_BITS {
        return Err(Error::BudgetTooLarge {
            bits: max_bits,
            max: MAX_CODEBOOK_BITS,
        });
    }
    if num_candidates == 0 || num_channels == 0 {
        return Err(Error::Config(
            "codebook search needs at least one candidate and one channel".into(),
        ));
    }
    let codebooks = (0..=max_bits)
        .map(|b| {
            if b == 0 {
                return Codebook::trivial();
            }
            let channels = draw_channels(num_channels, &mut rng::stream(seed, rng::stream_id(&[b as u64, 0])));
            let (_, best) = (0..num_candidates)
                .into_par_iter()
                .map(|c| {
                    let mut r = rng::stream(seed, rng::stream_id(&[b as u64, c as u64 + 1]));
                    let cb = Codebook::random(b, &mut r);
                    (ergodic_rate(&cb, SELECTION_SNR, &channels), c, cb)
                })
                .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
                .map(|(s, _, cb)| (s, cb))
                .expect("at least one candidate");
            best
        })
        .collect();
    Ok(SuperCodebook {
        seed,
        num_candidates,
        num_channels,
        codebooks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn perfect_direction_gives_full_rate() {
        let h = [c(0.3, -1.2), c(0.8, 0.1)];
        let n = norm_sqr(&h).sqrt();
        let cb = Codebook::new(vec![[h[0] / n, h[1] / n]]).unwrap();
        let r = codebook_rate(&cb, 2.0, &h).unwrap();
        assert!((r - perfect_rate(2.0, &h)).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_miss_gives_zero() {
        let h = [c(0.0, 0.0), c(1.0, 0.0)];
        assert_eq!(codebook_rate(&Codebook::trivial(), 5.0, &h).unwrap(), 0.0);
    }

    #[test]
    fn empty_codebook_rejected() {
        assert!(matches!(Codebook::new(vec![]), Err(Error::EmptyCodebook)));
    }

    #[test]
    fn random_codewords_are_unit_norm() {
        let mut r = rng::stream(7, 0);
        let cb = Codebook::random(6, &mut r);
        assert_eq!(cb.len(), 64);
        assert!(cb.codewords().iter().all(|w| (norm_sqr(w) - 1.0).abs() < 1e-12));
    }

    #[test]
    fn supercodebook_shape_and_reproducibility() {
        let a = generate_supercodebook(5, 8, 50, 11).unwrap();
        let b = generate_supercodebook(5, 8, 50, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.codebooks[0], Codebook::trivial());
        for (bits, cb) in a.codebooks.iter().enumerate() {
            assert_eq!(cb.len(), 1 << bits);
        }
        let other = generate_supercodebook(5, 8, 50, 12).unwrap();
        assert_ne!(a.codebooks[3], other.codebooks[3]);
        assert!(a.get(6).is_err());
    }

    #[test]
    fn zero_bit_supercodebook() {
        let s = generate_supercodebook(0, 100, 1000, 3).unwrap();
        assert_eq!(s.codebooks, vec![Codebook::trivial()]);
    }

    #[test]
    fn preconditions() {
        assert!(generate_supercodebook(13, 1, 1, 0).is_err());
        assert!(generate_supercodebook(3, 0, 1, 0).is_err());
        assert!(generate_supercodebook(3, 1, 0, 0).is_err());
    }

    #[test]
    fn json_codewords_are_re_im_pairs() {
        let cb = Codebook::trivial();
        let v = serde_json::to_value(&cb).unwrap();
        assert_eq!(v, serde_json::json!([[[1.0, 0.0], [0.0, 0.0]]]));
        let back: Codebook = serde_json::from_value(v).unwrap();
        assert_eq!(back, cb);
        assert!(serde_json::from_value::<Codebook>(serde_json::json!([[[2.0, 0.0], [0.0, 0.0]]])).is_err());
    }
}
