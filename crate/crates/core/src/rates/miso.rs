//! 2x1 MISO beamforming with RVQ feedback: one-tap and two-tap expected
//! rates and the `2^{-b}` interpolation between them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Integration cut-off for the exponential-tailed densities.
const TAIL: f64 = 60.0;
const TOL: f64 = 1e-10;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn check_snr(snr: f64) -> Result<()> {
    if snr.is_finite() && snr > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("average SNR must be positive, got {snr}")))
    }
}

/// `E[log2(1 + snr |h_1|^2)]` with `|h_1|^2 ~ Exp(1)`.
pub fn beta1(snr: f64) -> Result<f64> {
    check_snr(snr)?;
    Ok(quad::integrate(
        |x| (snr * x).ln_1p() * (-x).exp(),
        0.0,
        TAIL,
        TOL,
    ) / std::f64::consts::LN_2)
}

/// `E[log2(1 + snr ||h||^2)]` with `||h||^2 ~ Gamma(2, 1)`.
pub fn beta2(snr: f64) -> Result<f64> {
    check_snr(snr)?;
    Ok(quad::integrate(
        |x| (snr * x).ln_1p() * x * (-x).exp(),
        0.0,
        TAIL,
        TOL,
    ) / std::f64::consts::LN_2)
}

/// Average SNR together with its cached one- and two-tap rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MisoModel {
    pub snr: f64,
    pub beta1: f64,
    pub beta2: f64,
}

impl MisoModel {
    pub fn new(snr: f64) -> Result<Self> {
        Ok(Self {
            snr,
            beta1: beta1(snr)?,
            beta2: beta2(snr)?,
        })
    }

    pub fn from_db(snr_db: f64) -> Result<Self> {
        Self::new(db_to_linear(snr_db))
    }

    /// `beta2 - beta1`, the coefficient of the `2^{-b}` quantization loss.
    pub fn loss_coefficient(&self) -> f64 {
        self.beta2 - self.beta1
    }

    pub fn ratio(&self) -> f64 {
        self.beta2 / self.beta1
    }

    /// Rate at a real-valued bit count.
    pub fn rate_at(&self, bits: f64) -> f64 {
        let frac = (-bits).exp2();
        self.beta2 * (1.0 - frac) + self.beta1 * frac
    }
}

/// `beta2 (1 - 2^{-b}) + beta1 2^{-b}`.
pub fn miso_rvq_rate(model: &MisoModel, bits: u32) -> f64 {
    let frac = 2f64.powi(-(bits.min(1100) as i32));
    model.beta2 * (1.0 - frac) + model.beta1 * frac
}

/// One row per SNR in `[lo_db, hi_db]` at `step_db` spacing: `(snr_db, beta1, beta2)`.
pub fn beta_ratio_curve(lo_db: f64, hi_db: f64, step_db: f64) -> Result<Vec<(f64, MisoModel)>> {
    if step_db.is_nan() || step_db <= 0.0 || hi_db < lo_db {
        return Err(Error::Domain(format!(
            "bad SNR grid [{lo_db}, {hi_db}] step {step_db}"
        )));
    }
    let n = ((hi_db - lo_db) / step_db + 1e-9).floor() as usize + 1;
    (0..n)
        .map(|i| {
            let db = lo_db + i as f64 * step_db;
            Ok((db, MisoModel::from_db(db)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn betas_at_unit_snr_match_frozen_oracles() {
        // closed form e E1(1) / ln 2 and a 1e7-draw Monte-Carlo (1.44280 +- 0.0002)
        let b1 = beta1(1.0).unwrap();
        let b2 = beta2(1.0).unwrap();
        assert!((b1 - 0.860_347_382_270_886_8).abs() < 1e-8);
        assert!((b1 - 0.86056).abs() < 1e-3);
        assert!((b2 - 1.442_80).abs() < 1e-3);
    }

    #[test]
    fn betas_vanish_at_low_snr() {
        assert!(beta1(1e-9).unwrap() < 1e-8);
        assert!(beta2(1e-9).unwrap() < 1e-8);
    }

    #[test]
    fn non_positive_snr_rejected() {
        assert!(beta1(0.0).is_err());
        assert!(beta2(-1.0).is_err());
        assert!(MisoModel::new(f64::NAN).is_err());
    }

    #[test]
    fn rate_limits() {
        let m = MisoModel::from_db(3.0).unwrap();
        assert_eq!(miso_rvq_rate(&m, 0), m.beta1);
        assert!((miso_rvq_rate(&m, 60) - m.beta2).abs() < 1e-15);
        assert_eq!(miso_rvq_rate(&m, u32::MAX), m.beta2);
    }

    #[test]
    fn forward_differences_halve() {
        let m = MisoModel::from_db(-4.0).unwrap();
        for b in 0..20 {
            let d = miso_rvq_rate(&m, b + 1) - miso_rvq_rate(&m, b);
            let expected = m.loss_coefficient() * 2f64.powi(-(b as i32 + 1));
            assert!((d - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn ratio_curve_has_61_points() {
        let curve = beta_ratio_curve(-15.0, 15.0, 0.5).unwrap();
        assert_eq!(curve.len(), 61);
        assert!(curve.iter().all(|(_, m)| m.beta2 >= m.beta1 && m.ratio() <= 2.0));
    }
}
