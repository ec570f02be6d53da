//! Single-antenna link with a `b`-bit uniform quantizer on the channel gain.
//!
//! The gain `|h|^2` follows an `Exp(1)` law truncated to `[0, sigma]`, with
//! density `C(sigma) e^{-x}` and `C(sigma) = 1 / (1 - e^{-sigma})`. The
//! support is split into `2^b` equal cells and the receiver reports the
//! lower edge of the cell it falls into.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Largest bit count for which the `2^b`-term sums are evaluated.
pub const MAX_SISO_BITS: u32 = 30;

pub const DEFAULT_SIGMA: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SisoModel {
    pub alpha: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
}

fn default_sigma() -> f64 {
    DEFAULT_SIGMA
}

impl SisoModel {
    pub fn new(alpha: f64, sigma: f64) -> Result<Self> {
        let m = Self { alpha, sigma };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::Domain(format!("alpha must be non-negative, got {}", self.alpha)));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::Domain(format!("sigma must be positive, got {}", self.sigma)));
        }
        Ok(())
    }

    /// `C(sigma)`.
    pub fn normalization(&self) -> f64 {
        1.0 / -(-self.sigma).exp_m1()
    }
}

/// Neumaier-compensated sum; the quantizer sums run to `2^30` terms.
fn compensated_sum(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    sum + comp
}

/// Expected rate `E[log2(1 + Q(sqrt(alpha) |h|^2))]` with a `b`-bit quantizer.
pub fn siso_rate(model: &SisoModel, bits: u32) -> Result<f64> {
    model.validate()?;
    if bits > MAX_SISO_BITS {
        return Err(Error::BudgetTooLarge {
            bits,
            max: MAX_SISO_BITS,
        });
    }
    let cells = 1u64 << bits;
    let step = model.sigma / cells as f64;
    let c = model.normalization();

    if model.alpha == 1.0 {
        let mass = -(-step).exp_m1();
        let s = compensated_sum(
            (0..cells).map(|i| (i as f64 * step).ln_1p() / std::f64::consts::LN_2 * (-(i as f64) * step).exp()),
        );
        return Ok(c * mass * s);
    }

    // Cell i collects gains g with sqrt(alpha) g in [i step, (i+1) step);
    // values beyond sigma saturate in the top cell.
    let scale = model.alpha.sqrt();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let s = compensated_sum((1..cells).map_while(|i| {
        let lo = i as f64 * step / scale;
        if lo >= model.sigma {
            return None;
        }
        let hi = if i + 1 == cells {
            model.sigma
        } else {
            ((i + 1) as f64 * step / scale).min(model.sigma)
        };
        let p = (-lo).exp() - (-hi).exp();
        Some((i as f64 * step).ln_1p() / std::f64::consts::LN_2 * p)
    }));
    Ok(c * s)
}

/// Normalised one-bit gain `C(sigma)^{-1} (r[1, b+1] - r[1, b])` in the
/// factored form
/// `[e^{-d/2} - e^{-d}] sum_j e^{-j d} log2(1 + 0.5 / (2^b / sigma + j))`,
/// `d = sigma / 2^b`. Only defined for `alpha = 1`.
pub fn siso_incremental_gain(model: &SisoModel, bits: u32) -> Result<f64> {
    model.validate()?;
    if model.alpha != 1.0 {
        return Err(Error::Domain(format!(
            "incremental gain closed form needs alpha = 1, got {}",
            model.alpha
        )));
    }
    if bits > MAX_SISO_BITS - 1 {
        return Err(Error::BudgetTooLarge {
            bits,
            max: MAX_SISO_BITS - 1,
        });
    }
    let cells = 1u64 << bits;
    let step = model.sigma / cells as f64;
    let inv_step = cells as f64 / model.sigma;
    let front = (-0.5 * step).exp() - (-step).exp();
    let s = compensated_sum((0..cells).map(|j| {
        let jf = j as f64;
        (-jf * step).exp() * (0.5 / (inv_step + jf)).ln_1p() / std::f64::consts::LN_2
    }));
    Ok(front * s)
}

/// Rate with an ideal (unquantized) receiver, `C(sigma) int_0^sigma log2(1 + sqrt(alpha) x) e^{-x} dx`.
pub fn siso_unquantized_rate(model: &SisoModel) -> Result<f64> {
    model.validate()?;
    let scale = model.alpha.sqrt();
    let v = quad::integrate(
        |x| (scale * x).ln_1p() / std::f64::consts::LN_2 * (-x).exp(),
        0.0,
        model.sigma,
        1e-12,
    );
    Ok(model.normalization() * v)
}
