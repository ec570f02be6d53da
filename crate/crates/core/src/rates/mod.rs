//! Physical-layer rate models and rate-table construction.

pub mod codebook;
pub mod miso;
pub mod siso;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::RateTable;

pub use codebook::{
    codebook_rate, ergodic_rate, generate_supercodebook, perfect_rate, Channel, Codebook,
    SuperCodebook,
};
pub use miso::{beta1, beta2, beta_ratio_curve, db_to_linear, miso_rvq_rate, MisoModel};
pub use siso::{siso_incremental_gain, siso_rate, SisoModel};

/// Rate model of one (virtual) user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum RateModel {
    Siso(SisoModel),
    MisoRvq { snr_db: f64 },
    Table { rates: Vec<f64> },
}

impl RateModel {
    fn row(&self, budget: u32) -> Result<Vec<f64>> {
        match self {
            RateModel::Siso(m) => (0..=budget).map(|b| siso_rate(m, b)).collect(),
            RateModel::MisoRvq { snr_db } => {
                let m = MisoModel::from_db(*snr_db)?;
                Ok((0..=budget).map(|b| miso_rvq_rate(&m, b)).collect())
            }
            RateModel::Table { rates } => {
                if rates.len() != budget as usize + 1 {
                    return Err(Error::InvalidProblem(format!(
                        "explicit rate row has {} entries, expected {}",
                        rates.len(),
                        budget as usize + 1
                    )));
                }
                Ok(rates.clone())
            }
        }
    }
}

/// One rate model per virtual user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelProfile {
    pub users: Vec<RateModel>,
}

impl ChannelProfile {
    pub fn miso_db(snr_db: &[f64]) -> Self {
        Self {
            users: snr_db
                .iter()
                .map(|&snr_db| RateModel::MisoRvq { snr_db })
                .collect(),
        }
    }

    /// Repeats each user's model `copies` times, one per held sub-band.
    pub fn replicated(&self, copies: usize) -> Self {
        Self {
            users: self
                .users
                .iter()
                .flat_map(|m| std::iter::repeat_n(m.clone(), copies))
                .collect(),
        }
    }
}

/// Dense `L x (B+1)` table; monotone/submodular tags are computed on
/// construction.
pub fn build_rate_table(profile: &ChannelProfile, budget: u32) -> Result<RateTable> {
    let rows = profile
        .users
        .iter()
        .map(|m| m.row(budget))
        .collect::<Result<Vec<_>>>()?;
    RateTable::new(rows)
}

/// Rate table of MISO users given their cached models.
pub fn miso_table(models: &[MisoModel], budget: u32) -> Result<RateTable> {
    RateTable::new(
        models
            .iter()
            .map(|m| (0..=budget).map(|b| miso_rvq_rate(m, b)).collect())
            .collect(),
    )
}

pub fn check_monotone(table: &RateTable) -> bool {
    table.is_monotone()
}

/// Per-row diminishing returns: forward differences never increase.
pub fn check_submodular(table: &RateTable) -> bool {
    table.is_submodular()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miso_rows_match_pointwise() {
        let t = build_rate_table(&ChannelProfile::miso_db(&[-3.0, 7.0]), 6).unwrap();
        let m = MisoModel::from_db(7.0).unwrap();
        for b in 0..=6 {
            assert_eq!(t.rate(1, b), miso_rvq_rate(&m, b as u32));
        }
        assert!(check_monotone(&t) && check_submodular(&t));
    }

    #[test]
    fn explicit_rows_pass_through() {
        let rates = vec![0.1, 0.30000000000000004, 0.7];
        let p = ChannelProfile {
            users: vec![RateModel::Table { rates: rates.clone() }],
        };
        let t = build_rate_table(&p, 2).unwrap();
        assert_eq!(t.row(0), rates.as_slice());
        assert!(build_rate_table(&p, 3).is_err());
    }

    #[test]
    fn non_submodular_row_detected() {
        let t = RateTable::new(vec![vec![0.0, 1.0, 3.0]]).unwrap();
        assert!(check_monotone(&t));
        assert!(!check_submodular(&t));
    }

    #[test]
    fn asymmetric_profile_table_shape() {
        let p = ChannelProfile::miso_db(&[-10.0, -8.0, 10.0, 10.0]).replicated(2);
        let t = build_rate_table(&p, 12).unwrap();
        assert_eq!((t.num_users(), t.num_columns()), (8, 13));
        assert_eq!(t.row(0), t.row(1));
        assert_eq!(t.row(6), t.row(7));
    }

    #[test]
    fn siso_rows_from_b3_are_submodular() {
        let m = SisoModel::new(1.0, 20.0).unwrap();
        let row_from = |lo: u32| {
            RateTable::new(vec![(lo..=25).map(|b| siso_rate(&m, b).unwrap()).collect()]).unwrap()
        };
        assert!(check_monotone(&row_from(1)));
        assert!(!check_submodular(&row_from(1)));
        assert!(check_submodular(&row_from(3)));
    }

    #[test]
    fn profile_json_shape() {
        let p: ChannelProfile = serde_json::from_str(
            r#"{"users":[{"model":"miso_rvq","snr_db":-10.0},{"model":"siso","alpha":1.0},{"model":"table","rates":[0.0,1.0]}]}"#,
        )
        .unwrap();
        assert_eq!(p.users.len(), 3);
        assert!(matches!(p.users[1], RateModel::Siso(SisoModel { sigma, .. }) if sigma == 20.0));
    }
}
