use fbq_core::rates::codebook::draw_channels;
use fbq_core::rates::{ergodic_rate, generate_supercodebook, miso_rvq_rate, MisoModel, SuperCodebook};
use fbq_core::rng;
use fbq_core::sim::CodebookParams;
use serde::{Deserialize, Serialize};

use crate::io::{load_json, OutDir};
use crate::{CliResult, ExperimentSpec};

/// Stream of the validation channels, disjoint from the selection streams.
const VALIDATION_STREAM: u64 = 0x0056_A11D;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatesConfig {
    /// SNRs in dB for the beta-ratio curve.
    pub snr_db: Vec<f64>,
    /// SNRs in dB at which codebook rates are compared with the model.
    pub rvq_snr_db: Vec<f64>,
    pub max_bits: u32,
    pub codebook: CodebookParams,
    pub validation_draws: usize,
}

impl Default for RatesConfig {
    fn default() -> Self {
        Self {
            snr_db: (0..=60).map(|i| -15.0 + 0.5 * i as f64).collect(),
            rvq_snr_db: vec![-10.0, 0.0, 10.0],
            max_bits: 12,
            codebook: CodebookParams::default(),
            validation_draws: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RvqRow {
    pub snr_db: f64,
    pub bits: u32,
    pub analytic: f64,
    pub monte_carlo: f64,
    pub rel_error: f64,
}

pub fn supercodebook(cfg: &RatesConfig) -> fbq_core::Result<SuperCodebook> {
    let p = &cfg.codebook;
    generate_supercodebook(cfg.max_bits, p.num_candidates, p.num_channels, p.seed)
}

/// Codebook rates on validation channels drawn independently of the
/// selection channels.
pub fn rvq_comparison(cfg: &RatesConfig, sc: &SuperCodebook) -> fbq_core::Result<Vec<RvqRow>> {
    let p = &cfg.codebook;
    let channels = draw_channels(cfg.validation_draws, &mut rng::stream(p.seed, VALIDATION_STREAM));
    let mut rows = Vec::new();
    for &db in &cfg.rvq_snr_db {
        let m = MisoModel::from_db(db)?;
        for bits in 0..=cfg.max_bits {
            let analytic = miso_rvq_rate(&m, bits);
            let monte_carlo = ergodic_rate(sc.get(bits)?, m.snr, &channels);
            rows.push(RvqRow {
                snr_db: db,
                bits,
                analytic,
                monte_carlo,
                rel_error: (monte_carlo - analytic).abs() / analytic,
            });
        }
    }
    Ok(rows)
}

pub fn run(spec: &ExperimentSpec) -> CliResult<()> {
    let mut cfg: RatesConfig = match &spec.config {
        Some(p) => load_json(p)?,
        None => RatesConfig::default(),
    };
    if let Some(seed) = spec.overrides.seed {
        cfg.codebook.seed = seed;
    }
    let out = OutDir::create(spec.out_dir())?;

    let curve = cfg
        .snr_db
        .iter()
        .map(|&db| MisoModel::from_db(db))
        .collect::<fbq_core::Result<Vec<_>>>()?;
    let path = out.write_csv("beta_ratio.csv", |w| {
        w.write_record(["snr_db", "beta1", "beta2", "ratio"])?;
        for (db, m) in cfg.snr_db.iter().zip(&curve) {
            w.write_record([db, &m.beta1, &m.beta2, &m.ratio()].map(|v| v.to_string()))?;
        }
        Ok(())
    })?;
    let max_ratio = curve.iter().map(MisoModel::ratio).fold(f64::NAN, f64::max);
    spec.say(format!("wrote {} ({} rows, max ratio {max_ratio:.4})", path.display(), curve.len()));

    let rows = if cfg.rvq_snr_db.is_empty() {
        Vec::new()
    } else {
        let sc = supercodebook(&cfg)?;
        out.write_json("supercodebook.json", &sc)?;
        rvq_comparison(&cfg, &sc)?
    };
    let path = out.write_csv("rvq_rates.csv", |w| {
        if rows.is_empty() {
            w.write_record(["snr_db", "bits", "analytic", "monte_carlo", "rel_error"])?;
        }
        for r in &rows {
            w.serialize(r)?;
        }
        Ok(())
    })?;
    let worst = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    spec.say(format!("wrote {} ({} rows, max rel error {worst:.4})", path.display(), rows.len()));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_curve_has_61_points() {
        let c = RatesConfig::default();
        assert_eq!(c.snr_db.len(), 61);
        assert_eq!(c.snr_db[0], -15.0);
        assert_eq!(c.snr_db[60], 15.0);
    }

    #[test]
    fn no_rvq_snrs_means_no_rows() {
        let c = RatesConfig {
            rvq_snr_db: Vec::new(),
            ..RatesConfig::default()
        };
        let sc = SuperCodebook {
            seed: 0,
            num_candidates: 1,
            num_channels: 1,
            codebooks: vec![fbq_core::rates::Codebook::trivial()],
        };
        assert!(rvq_comparison(&c, &sc).unwrap().is_empty());
    }
}
