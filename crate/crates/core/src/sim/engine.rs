//! Slotted queue dynamics under a feedback allocation policy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{virtualize, Assignment, VirtualSystem};
use crate::rates::codebook::{codebook_rate, perfect_rate, Channel, SuperCodebook};
use crate::rates::{miso_table, MisoModel};
use crate::rng::{self, miso_channel};
use crate::solvers::{self, relax, SolverKind};

use super::config::{Policy, SimConfig};

/// Stream id of the per-slot channel draws.
const CHANNEL_STREAM: u64 = 0xC4A7;

/// Queues and service over one period of `T` slots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    /// First slot after the period.
    pub slot: u64,
    pub queues: Vec<f64>,
    /// Mean offered service per slot during the period.
    pub service: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub policy: Policy,
    pub samples: Vec<Sample>,
    /// Per-user queue length averaged over every slot.
    pub mean_queue: Vec<f64>,
    /// Per-user offered service averaged over every slot.
    pub mean_service: Vec<f64>,
    /// Per-band bits chosen at each re-allocation (empty for perfect feedback).
    pub allocations: Vec<Vec<u32>>,
    pub overhead_bits_per_slot: f64,
}

impl SimResult {
    pub fn mean_total_queue(&self) -> f64 {
        self.mean_queue.iter().sum()
    }

    /// Writes `slot, q_0.., s_0..` rows.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let k = self.mean_queue.len();
        let mut header = vec!["slot".to_string()];
        header.extend((0..k).map(|i| format!("queue_{i}")));
        header.extend((0..k).map(|i| format!("service_{i}")));
        w.write_record(&header)?;
        for s in &self.samples {
            let mut rec = vec![s.slot.to_string()];
            rec.extend(s.queues.iter().map(|v| format!("{v:.9}")));
            rec.extend(s.service.iter().map(|v| format!("{v:.9}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `log2 C(B + L - 1, L - 1) / T`: bits per slot needed to signal an allocation.
pub fn overhead_estimate(budget: u32, num_bands: usize, period: u64) -> f64 {
    if num_bands == 0 {
        return 0.0;
    }
    let count = solvers::brute::allocation_count(num_bands as u64, budget as u64) as f64;
    count.log2() / period as f64
}

/// `floor(B / K)` bits per user, remainder to the lowest-index users.
pub fn equal_user_shares(num_users: usize, budget: u32) -> Vec<u32> {
    if num_users == 0 {
        return Vec::new();
    }
    let base = budget / num_users as u32;
    let extra = (budget % num_users as u32) as usize;
    (0..num_users)
        .map(|k| base + u32::from(k < extra))
        .collect()
}

/// Time-invariant per-band bits of the equal-allocation baseline: each user's
/// share is split over its bands as evenly as possible, earlier bands first
/// (three bits over two bands gives `(2, 1)`).
pub fn equal_static_allocation(config: &SimConfig) -> Vec<u32> {
    let shares = equal_user_shares(config.num_users, config.budget);
    let mut per_band = vec![0u32; config.num_bands];
    for (set, share) in config.bands.iter().zip(shares) {
        let n = set.len() as u32;
        if n == 0 {
            continue;
        }
        for (i, &band) in set.iter().enumerate() {
            per_band[band] = share / n + u32::from((i as u32) < share % n);
        }
    }
    per_band
}

struct Runner<'a> {
    config: &'a SimConfig,
    codebook: Option<&'a SuperCodebook>,
    virt: VirtualSystem,
    models: Vec<MisoModel>,
    snr: Vec<f64>,
}

impl<'a> Runner<'a> {
    /// Per-virtual-user bits for the next period, `None` for perfect feedback.
    fn allocate(&self, queues: &[f64]) -> Result<Option<Vec<u32>>> {
        let bits = match self.config.policy {
            Policy::PerfectFeedback => return Ok(None),
            Policy::EqualStatic => {
                let per_band = equal_static_allocation(self.config);
                self.virt.band.iter().map(|&b| per_band[b]).collect()
            }
            Policy::MaxweightRelaxation => {
                let weights: Vec<f64> = self.virt.owner.iter().map(|&k| queues[k]).collect();
                match relax::relaxation_solve_miso(&self.models, &weights, self.config.budget) {
                    Ok(out) => relax::round_allocation(&out.fractional),
                    Err(Error::Degenerate(_)) => vec![0; self.virt.num_virtual()],
                    Err(e) => return Err(e),
                }
            }
            Policy::MaxweightDp | Policy::MaxweightGreedy => {
                let assignment = Assignment::new(self.config.bands.clone(), queues.to_vec())?;
                let virt = virtualize(&assignment, &self.snr)?;
                let table = miso_table(&self.models, self.config.budget)?;
                let problem = virt.problem(self.config.budget, table)?;
                let kind = self.config.policy.solver().unwrap_or(SolverKind::Greedy);
                solvers::solve(&problem, kind)?.bits
            }
        };
        Ok(Some(bits))
    }
}

/// Runs the slotted system. Channels are drawn for every band in every slot
/// from a stream that depends only on `config.seed`, so all policies see
/// the same fading.
pub fn run(config: &SimConfig, codebook: &SuperCodebook) -> Result<SimResult> {
    run_with(config, Some(codebook))
}

/// As [`run`]; the codebook may be omitted for perfect feedback.
pub fn run_with(config: &SimConfig, codebook: Option<&SuperCodebook>) -> Result<SimResult> {
    config.validate()?;
    let k = config.num_users;
    let snr: Vec<f64> = {
        let mut per_band = vec![f64::NAN; config.num_bands];
        for (user, set) in config.bands.iter().enumerate() {
            for &b in set {
                per_band[b] = crate::rates::db_to_linear(config.snr_db[user]);
            }
        }
        per_band
    };
    let virt = virtualize(&config.assignment()?, &snr)?;
    let models = virt
        .snr
        .iter()
        .map(|&s| MisoModel::new(s))
        .collect::<Result<Vec<_>>>()?;
    if config.policy != Policy::PerfectFeedback && codebook.is_none() {
        return Err(Error::Config(format!("policy {} needs a super-codebook", config.policy)));
    }
    let runner = Runner {
        config,
        codebook,
        virt,
        models,
        snr,
    };

    let mut rng = rng::stream(config.seed, CHANNEL_STREAM);
    let mut queues = config.initial_queues();
    let mut queue_acc = vec![0.0; k];
    let mut service_acc = vec![0.0; k];
    let mut samples = Vec::with_capacity(config.num_periods() as usize);
    let mut allocations = Vec::new();
    let mut channels: Vec<Channel> = vec![Default::default(); config.num_bands];

    for period in 0..config.num_periods() {
        let bits = runner.allocate(&queues)?;
        let books = match &bits {
            Some(bits) => {
                let cb = runner.codebook.expect("checked above");
                let books = bits.iter().map(|&b| cb.get(b)).collect::<Result<Vec<_>>>()?;
                let mut per_band = vec![0u32; config.num_bands];
                for (v, &b) in bits.iter().enumerate() {
                    per_band[runner.virt.band[v]] = b;
                }
                allocations.push(per_band);
                Some(books)
            }
            None => None,
        };

        let mut period_service = vec![0.0; k];
        for _ in 0..config.period {
            for h in channels.iter_mut() {
                *h = miso_channel(&mut rng);
            }
            let mut service = vec![0.0; k];
            for (v, &band) in runner.virt.band.iter().enumerate() {
                let s = runner.virt.snr[v];
                let h = &channels[band];
                service[runner.virt.owner[v]] += match &books {
                    Some(books) => codebook_rate(books[v], s, h)?,
                    None => perfect_rate(s, h),
                };
            }
            for u in 0..k {
                queues[u] = (queues[u] + config.arrival_rate[u] - service[u]).max(0.0);
                queue_acc[u] += queues[u];
                service_acc[u] += service[u];
                period_service[u] += service[u];
            }
        }
        samples.push(Sample {
            slot: (period + 1) * config.period,
            queues: queues.clone(),
            service: period_service
                .iter()
                .map(|s| s / config.period as f64)
                .collect(),
        });
    }

    let n = config.horizon.max(1) as f64;
    Ok(SimResult {
        policy: config.policy,
        samples,
        mean_queue: queue_acc.iter().map(|q| q / n).collect(),
        mean_service: service_acc.iter().map(|s| s / n).collect(),
        allocations,
        overhead_bits_per_slot: overhead_estimate(config.budget, runner.virt.num_virtual(), config.period),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::generate_supercodebook;

    fn small_codebook() -> SuperCodebook {
        generate_supercodebook(12, 4, 50, 5).unwrap()
    }

    fn short(policy: Policy, lambda: f64) -> SimConfig {
        let mut c = SimConfig::reference([-10.0, -8.0, 10.0, 10.0], lambda, policy);
        c.horizon = 500;
        c
    }

    #[test]
    fn no_arrivals_keep_queues_empty() {
        let cb = small_codebook();
        for p in Policy::ALL {
            let r = run(&short(p, 0.0), &cb).unwrap();
            assert!(r.samples.iter().all(|s| s.queues.iter().all(|&q| q == 0.0)), "{p}");
            assert_eq!(r.samples.len(), 50);
            assert_eq!(r.mean_total_queue(), 0.0);
        }
    }

    #[test]
    fn equal_static_reference_split() {
        let c = short(Policy::EqualStatic, 0.1);
        assert_eq!(equal_static_allocation(&c), vec![2, 1, 2, 1, 2, 1, 2, 1]);
        let r = run(&c, &small_codebook()).unwrap();
        assert!(r.allocations.iter().all(|a| a == &vec![2, 1, 2, 1, 2, 1, 2, 1]));
    }

    #[test]
    fn equal_shares() {
        assert_eq!(equal_user_shares(3, 12), vec![4, 4, 4]);
        assert_eq!(equal_user_shares(4, 10), vec![3, 3, 2, 2]);
        assert_eq!(equal_user_shares(4, 12), vec![3, 3, 3, 3]);
    }

    #[test]
    fn overhead_values() {
        assert!((overhead_estimate(12, 8, 10) - (50_388f64).log2() / 10.0).abs() < 1e-12);
        assert!((overhead_estimate(12, 8, 10) - 1.562).abs() < 1e-3);
        assert_eq!(overhead_estimate(0, 8, 10), 0.0);
        assert!(overhead_estimate(12, 8, 1_000_000_000) < 1e-7);
    }

    #[test]
    fn maxweight_spends_bits_on_backlogged_users() {
        let r = run(&short(Policy::MaxweightGreedy, 0.45), &small_codebook()).unwrap();
        let late = r.allocations.last().unwrap();
        assert!(late.iter().sum::<u32>() <= 12);
        assert!(late[0] + late[1] > 0);
        assert!(r.overhead_bits_per_slot > 1.5);
    }

    #[test]
    fn deterministic_given_seed() {
        let cb = small_codebook();
        let c = short(Policy::MaxweightDp, 0.4);
        assert_eq!(run(&c, &cb).unwrap(), run(&c, &cb).unwrap());
    }

    #[test]
    fn perfect_feedback_needs_no_codebook() {
        assert!(run_with(&short(Policy::PerfectFeedback, 0.2), None).is_ok());
        assert!(run_with(&short(Policy::EqualStatic, 0.2), None).is_err());
    }

    #[test]
    fn missing_codebook_entry_is_config_error() {
        let cb = generate_supercodebook(1, 2, 10, 5).unwrap();
        let err = run(&short(Policy::EqualStatic, 0.2), &cb).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn doubling_initial_queues_keeps_first_allocation() {
        let cb = small_codebook();
        for p in [Policy::MaxweightDp, Policy::MaxweightGreedy, Policy::MaxweightRelaxation] {
            let mut c = short(p, 0.3);
            c.initial_queues = vec![3.0, 1.5, 0.25, 0.5];
            let a = run(&c, &cb).unwrap().allocations[0].clone();
            c.initial_queues.iter_mut().for_each(|q| *q *= 2.0);
            let b = run(&c, &cb).unwrap().allocations[0].clone();
            assert_eq!(a, b, "{p}");
        }
    }
}
