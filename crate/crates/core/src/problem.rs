//! Allocation problem data model and the virtual-user reduction.
//!
//! A physical user holding several sub-bands is split into one virtual user
//! per sub-band. Each virtual user carries the physical user's queue length
//! as its weight, so every solver sees a flat list of `L` users competing
//! for a shared budget of `B` feedback bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used when comparing floating-point rate differences.
pub const TIE_SLACK: f64 = 1e-12;

/// Expected (unweighted) rate of each user for each bit count `0..=B`.
///
/// Row `i`, column `j` is the rate of user `i` when it receives `j` bits.
/// Weights are kept out of the table so a single table serves every queue
/// state of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct RateTable {
    rows: Vec<Vec<f64>>,
    monotone: bool,
    submodular: bool,
}

impl RateTable {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if let Some(first) = rows.first() {
            let width = first.len();
            if width == 0 {
                return Err(Error::InvalidProblem("rate table rows must have at least one column".into()));
            }
            for (i, row) in rows.iter().enumerate() {
                if row.len() != width {
                    return Err(Error::InvalidProblem(format!(
                        "rate table row {i} has {} columns, expected {width}",
                        row.len()
                    )));
                }
                if let Some(j) = row.iter().position(|v| !v.is_finite() || *v < 0.0) {
                    return Err(Error::InvalidProblem(format!(
                        "rate table entry ({i}, {j}) = {} is not a finite non-negative number",
                        row[j]
                    )));
                }
            }
        }
        let monotone = rows.iter().all(|r| row_is_monotone(r));
        let submodular = rows.iter().all(|r| row_is_submodular(r));
        Ok(Self {
            rows,
            monotone,
            submodular,
        })
    }

    pub fn num_users(&self) -> usize {
        self.rows.len()
    }

    /// Number of bit-count columns, i.e. `B + 1`. Zero for an empty table.
    pub fn num_columns(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn rate(&self, user: usize, bits: usize) -> f64 {
        self.rows[user][bits]
    }

    pub fn row(&self, user: usize) -> &[f64] {
        &self.rows[user]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Every row is non-decreasing in the bit count.
    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// Every row has non-increasing forward differences.
    pub fn is_submodular(&self) -> bool {
        self.submodular
    }

    /// Writes the table as CSV, one row per user and one column per bit count.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["user".to_string()];
        header.extend((0..self.num_columns()).map(|b| format!("b{b}")));
        w.write_record(&header)?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut rec = vec![i.to_string()];
            rec.extend(row.iter().map(|v| format!("{v:.12e}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl TryFrom<Vec<Vec<f64>>> for RateTable {
    type Error = Error;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        RateTable::new(rows)
    }
}

impl From<RateTable> for Vec<Vec<f64>> {
    fn from(table: RateTable) -> Self {
        table.rows
    }
}

pub(crate) fn row_is_monotone(row: &[f64]) -> bool {
    row.windows(2).all(|w| w[1] >= w[0] - TIE_SLACK)
}

pub(crate) fn row_is_submodular(row: &[f64]) -> bool {
    row.windows(3)
        .all(|w| (w[2] - w[1]) <= (w[1] - w[0]) + TIE_SLACK)
}

/// Weighted sum-rate maximisation over integer bit vectors with a total
/// budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem")]
pub struct AllocationProblem {
    num_users: usize,
    budget: u32,
    weights: Vec<f64>,
    rate_table: RateTable,
}

#[derive(Deserialize)]
struct RawProblem {
    num_users: usize,
    budget: u32,
    weights: Vec<f64>,
    rate_table: RateTable,
}

impl TryFrom<RawProblem> for AllocationProblem {
    type Error = Error;

    fn try_from(raw: RawProblem) -> Result<Self> {
        let p = AllocationProblem::new(raw.budget, raw.weights, raw.rate_table)?;
        if p.num_users != raw.num_users {
            return Err(Error::InvalidProblem(format!(
                "num_users is {} but weights has {} entries",
                raw.num_users, p.num_users
            )));
        }
        Ok(p)
    }
}

impl AllocationProblem {
    pub fn new(budget: u32, weights: Vec<f64>, rate_table: RateTable) -> Result<Self> {
        let num_users = weights.len();
        if let Some(k) = weights.iter().position(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidProblem(format!(
                "weight {k} = {} is not a finite non-negative number",
                weights[k]
            )));
        }
        if rate_table.num_users() != num_users {
            return Err(Error::InvalidProblem(format!(
                "rate table has {} rows but there are {num_users} weights",
                rate_table.num_users()
            )));
        }
        if num_users > 0 && rate_table.num_columns() != budget as usize + 1 {
            return Err(Error::InvalidProblem(format!(
                "rate table has {} columns, expected budget + 1 = {}",
                rate_table.num_columns(),
                budget as usize + 1
            )));
        }
        Ok(Self {
            num_users,
            budget,
            weights,
            rate_table,
        })
    }

    pub fn num_users(&self) -> usize {
        self.num_users
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rate_table(&self) -> &RateTable {
        &self.rate_table
    }

    /// `q_k * A[k][j]`.
    pub fn weighted_rate(&self, user: usize, bits: usize) -> f64 {
        self.weights[user] * self.rate_table.rate(user, bits)
    }

    /// Same problem with every weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.budget,
            self.weights.iter().map(|w| w * factor).collect(),
            self.rate_table.clone(),
        )
    }

    /// True when the weighted objective has non-increasing marginal gains.
    /// Non-negative weights preserve row submodularity, so this reduces to
    /// the table tags.
    pub fn is_monotone_submodular(&self) -> bool {
        self.rate_table.is_monotone() && self.rate_table.is_submodular()
    }
}

/// Integer bit allocation together with its recomputed objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub bits: Vec<u32>,
    pub objective: f64,
}

impl Allocation {
    /// Checks feasibility and evaluates the objective of `bits`.
    pub fn evaluate(problem: &AllocationProblem, bits: Vec<u32>) -> Result<Self> {
        let objective = weighted_sum_rate(problem, &bits)?;
        Ok(Self { bits, objective })
    }

    pub fn zeros(problem: &AllocationProblem) -> Self {
        let bits = vec![0; problem.num_users()];
        let objective = (0..problem.num_users())
            .map(|k| problem.weighted_rate(k, 0))
            .sum();
        Self { bits, objective }
    }

    pub fn total_bits(&self) -> u64 {
        self.bits.iter().map(|&b| b as u64).sum()
    }
}

/// Real-valued relaxation output: bits per user and the water level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalAllocation {
    pub bits: Vec<f64>,
    pub eta: f64,
}

impl FractionalAllocation {
    pub fn total_bits(&self) -> f64 {
        self.bits.iter().sum()
    }
}

/// `sum_k q_k * A[k][b_k]`.
pub fn weighted_sum_rate(problem: &AllocationProblem, bits: &[u32]) -> Result<f64> {
    if bits.len() != problem.num_users() {
        return Err(Error::InfeasibleAllocation(format!(
            "allocation has {} entries for {} users",
            bits.len(),
            problem.num_users()
        )));
    }
    let budget = problem.budget() as u64;
    if let Some(k) = bits.iter().position(|&b| b as u64 > budget) {
        return Err(Error::InfeasibleAllocation(format!(
            "user {k} gets {} bits, budget is {budget}",
            bits[k]
        )));
    }
    let total: u64 = bits.iter().map(|&b| b as u64).sum();
    if total > budget {
        return Err(Error::InfeasibleAllocation(format!(
            "allocation uses {total} bits, budget is {budget}"
        )));
    }
    Ok(bits
        .iter()
        .enumerate()
        .map(|(k, &b)| problem.weighted_rate(k, b as usize))
        .sum())
}

/// Slow-scheduler output: disjoint sub-band sets per physical user plus the
/// physical queue lengths. Band indices are zero-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub bands: Vec<Vec<usize>>,
    pub queues: Vec<f64>,
}

impl Assignment {
    pub fn new(bands: Vec<Vec<usize>>, queues: Vec<f64>) -> Result<Self> {
        let a = Self { bands, queues };
        a.validate()?;
        Ok(a)
    }

    /// User `i` holds bands `2i` and `2i + 1`.
    pub fn paired_bands(num_users: usize, queues: Vec<f64>) -> Self {
        Self {
            bands: (0..num_users).map(|i| vec![2 * i, 2 * i + 1]).collect(),
            queues,
        }
    }

    pub fn num_users(&self) -> usize {
        self.bands.len()
    }

    pub fn num_assigned_bands(&self) -> usize {
        self.bands.iter().map(Vec::len).sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.bands.len() != self.queues.len() {
            return Err(Error::InvalidProblem(format!(
                "{} band sets but {} queue lengths",
                self.bands.len(),
                self.queues.len()
            )));
        }
        if let Some(k) = self.queues.iter().position(|q| !q.is_finite() || *q < 0.0) {
            return Err(Error::InvalidProblem(format!(
                "queue length of user {k} is {}",
                self.queues[k]
            )));
        }
        let mut owner = std::collections::BTreeMap::new();
        for (k, set) in self.bands.iter().enumerate() {
            for &band in set {
                if let Some(&prev) = owner.get(&band) {
                    return Err(Error::InvalidAssignment {
                        band,
                        first: prev,
                        second: k,
                    });
                }
                owner.insert(band, k);
            }
        }
        Ok(())
    }
}

/// The flattened virtual system plus the map back to physical users.
#[derive(Debug, Clone, PartialEq)]
pub struct VirtualSystem {
    /// Physical owner of each virtual user.
    pub owner: Vec<usize>,
    /// Sub-band of each virtual user.
    pub band: Vec<usize>,
    /// Replicated queue length of each virtual user.
    pub weights: Vec<f64>,
    /// Average SNR of each virtual user's band.
    pub snr: Vec<f64>,
    /// For each physical user, the indices of its virtual users.
    pub back_map: Vec<Vec<usize>>,
}

impl VirtualSystem {
    pub fn num_virtual(&self) -> usize {
        self.owner.len()
    }

    pub fn problem(&self, budget: u32, table: RateTable) -> Result<AllocationProblem> {
        AllocationProblem::new(budget, self.weights.clone(), table)
    }

    /// Sums per-virtual-user quantities into per-physical-user totals.
    pub fn to_physical(&self, per_virtual: &[f64]) -> Vec<f64> {
        self.back_map
            .iter()
            .map(|vs| vs.iter().map(|&v| per_virtual[v]).sum())
            .collect()
    }
}

/// One virtual user per assigned sub-band, in physical-user order and then
/// in the order bands are listed for that user.
pub fn virtualize(assignment: &Assignment, per_band_snr: &[f64]) -> Result<VirtualSystem> {
    assignment.validate()?;
    let mut sys = VirtualSystem {
        owner: Vec::new(),
        band: Vec::new(),
        weights: Vec::new(),
        snr: Vec::new(),
        back_map: Vec::with_capacity(assignment.num_users()),
    };
    for (k, set) in assignment.bands.iter().enumerate() {
        let mut mine = Vec::with_capacity(set.len());
        for &band in set {
            let snr = *per_band_snr.get(band).ok_or_else(|| {
                Error::InvalidProblem(format!(
                    "no SNR for band {band} ({} bands given)",
                    per_band_snr.len()
                ))
            })?;
            mine.push(sys.owner.len());
            sys.owner.push(k);
            sys.band.push(band);
            sys.weights.push(assignment.queues[k]);
            sys.snr.push(snr);
        }
        sys.back_map.push(mine);
    }
    Ok(sys)
}
