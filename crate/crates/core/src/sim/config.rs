use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::Assignment;
use crate::rates::codebook::{generate_supercodebook, SuperCodebook};
use crate::solvers::SolverKind;

/// Feedback allocation policy driven by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    MaxweightDp,
    MaxweightGreedy,
    MaxweightRelaxation,
    EqualStatic,
    PerfectFeedback,
}

impl Policy {
    pub const ALL: [Policy; 5] = [
        Policy::MaxweightDp,
        Policy::MaxweightGreedy,
        Policy::MaxweightRelaxation,
        Policy::EqualStatic,
        Policy::PerfectFeedback,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::MaxweightDp => "maxweight-dp",
            Policy::MaxweightGreedy => "maxweight-greedy",
            Policy::MaxweightRelaxation => "maxweight-relaxation",
            Policy::EqualStatic => "equal-static",
            Policy::PerfectFeedback => "perfect-feedback",
        }
    }

    /// Solver backing a MaxWeight policy.
    pub fn solver(self) -> Option<SolverKind> {
        match self {
            Policy::MaxweightDp => Some(SolverKind::Dp),
            Policy::MaxweightGreedy => Some(SolverKind::Greedy),
            Policy::MaxweightRelaxation => Some(SolverKind::Relaxation),
            Policy::EqualStatic | Policy::PerfectFeedback => None,
        }
    }
}

impl std::fmt::Display for Policy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy `{s}`")))
    }
}

/// How the super-codebook is generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodebookParams {
    pub seed: u64,
    pub num_candidates: usize,
    pub num_channels: usize,
}

impl Default for CodebookParams {
    fn default() -> Self {
        Self {
            seed: 2012,
            num_candidates: 100,
            num_channels: 1000,
        }
    }
}

fn default_period() -> u64 {
    10
}

fn default_horizon() -> u64 {
    10_000
}

/// One simulation: a fixed slow schedule, traffic and feedback policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub num_users: usize,
    pub num_bands: usize,
    /// Zero-based sub-bands held by each user for the whole run.
    pub bands: Vec<Vec<usize>>,
    pub budget: u32,
    /// Slots between feedback re-allocations.
    #[serde(default = "default_period")]
    pub period: u64,
    /// Average SNR of each user in dB.
    pub snr_db: Vec<f64>,
    /// Deterministic arrivals in bits per slot, per user.
    pub arrival_rate: Vec<f64>,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    pub policy: Policy,
    #[serde(default)]
    pub codebook: CodebookParams,
    #[serde(default)]
    pub seed: u64,
    /// Queue lengths at slot 0; zeros when empty.
    #[serde(default)]
    pub initial_queues: Vec<f64>,
}

impl SimConfig {
    /// Four users on eight bands, user `i` on bands `2i, 2i+1`, `B = 12`,
    /// `T = 10`, `10^4` slots and symmetric arrivals `lambda`.
    pub fn reference(snr_db: [f64; 4], lambda: f64, policy: Policy) -> Self {
        Self {
            num_users: 4,
            num_bands: 8,
            bands: Assignment::paired_bands(4, vec![0.0; 4]).bands,
            budget: 12,
            period: 10,
            snr_db: snr_db.to_vec(),
            arrival_rate: vec![lambda; 4],
            horizon: 10_000,
            policy,
            codebook: CodebookParams::default(),
            seed: 1,
            initial_queues: Vec::new(),
        }
    }

    pub fn with_arrivals(&self, lambda: f64) -> Self {
        Self {
            arrival_rate: vec![lambda; self.num_users],
            ..self.clone()
        }
    }

    pub fn with_policy(&self, policy: Policy) -> Self {
        Self {
            policy,
            ..self.clone()
        }
    }

    pub fn initial_queues(&self) -> Vec<f64> {
        if self.initial_queues.is_empty() {
            vec![0.0; self.num_users]
        } else {
            self.initial_queues.clone()
        }
    }

    pub fn num_periods(&self) -> u64 {
        self.horizon / self.period
    }

    /// Super-codebook covering every per-band budget the policy can choose.
    pub fn supercodebook(&self) -> Result<SuperCodebook> {
        generate_supercodebook(
            self.budget,
            self.codebook.num_candidates,
            self.codebook.num_channels,
            self.codebook.seed,
        )
    }

    pub fn assignment(&self) -> Result<Assignment> {
        Assignment::new(self.bands.clone(), vec![0.0; self.num_users])
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_users;
        let check_len = |name: &str, len: usize| {
            if len == k {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} has {len} entries for {k} users")))
            }
        };
        check_len("bands", self.bands.len())?;
        check_len("snr_db", self.snr_db.len())?;
        check_len("arrival_rate", self.arrival_rate.len())?;
        if !self.initial_queues.is_empty() {
            check_len("initial_queues", self.initial_queues.len())?;
            if self.initial_queues.iter().any(|q| !q.is_finite() || *q < 0.0) {
                return Err(Error::Config("initial queues must be non-negative".into()));
            }
        }
        if self.period == 0 {
            return Err(Error::Config("period must be positive".into()));
        }
        if !self.horizon.is_multiple_of(self.period) {
            return Err(Error::Config(format!(
                "horizon {} is not a multiple of the period {}",
                self.horizon, self.period
            )));
        }
        if self.arrival_rate.iter().any(|l| !l.is_finite() || *l < 0.0) {
            return Err(Error::Config("arrival rates must be non-negative".into()));
        }
        if self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::Config("SNRs must be finite".into()));
        }
        if let Some(b) = self.bands.iter().flatten().find(|&&b| b >= self.num_bands) {
            return Err(Error::Config(format!(
                "band {b} is out of range for {} bands",
                self.num_bands
            )));
        }
        self.assignment()?;
        Ok(())
    }
}
