//! Achievability checks: per-user LDoF by rank computation, the predicted
//! interference dimension of an alignment structure, and a seeded Monte Carlo
//! harness over random integer channels.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::{BiaError, Result};
use crate::linalg::RatMatrix;
use crate::model::{effective_columns, AntennaId, ChannelRealization, Scheme, SymbolId, SystemConfig};

pub const DEFAULT_FLOAT_TOLERANCE: f64 = 1e-9;

/// Largest channel coefficient drawn by [`sample_channel`].
pub const CHANNEL_MAX: u32 = 1_000_000;

/// Increment of the SplitMix64 sequence used to derive per-trial seeds.
pub const SEED_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum RankBackend {
    /// Fraction-free elimination over exact integers.
    #[default]
    Exact,
    /// Singular values above `tolerance × σ_max`.
    Float { tolerance: f64 },
}

impl RankBackend {
    pub fn float() -> Self {
        RankBackend::Float {
            tolerance: DEFAULT_FLOAT_TOLERANCE,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            RankBackend::Exact => "exact",
            RankBackend::Float { .. } => "float",
        }
    }
}

pub fn rank(matrix: &RatMatrix, backend: RankBackend) -> usize {
    match backend {
        RankBackend::Exact => matrix.rank(),
        RankBackend::Float { tolerance } => matrix.rank_float(tolerance),
    }
}

/// Generic channel draw: every coefficient uniform on `[1:10⁶]`, determined by `seed`.
pub fn sample_channel(config: SystemConfig, seed: u64) -> ChannelRealization {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    ChannelRealization::from_fn(config, |_, _, _| {
        BigRational::from_integer(BigInt::from(rng.random_range(1..=CHANNEL_MAX)))
    })
    .expect("draws are nonzero")
}

/// SplitMix64 finalizer applied to `master + (trial+1)·γ`.
pub fn trial_seed(master_seed: u64, trial: usize) -> u64 {
    let mut z = master_seed.wrapping_add(SEED_GAMMA.wrapping_mul(trial as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn is_desired(j: usize, id: &AntennaId) -> bool {
    id.transmitter == j
}

fn stack(
    scheme: &Scheme,
    channel: &ChannelRealization,
    j: usize,
    keep: impl Fn(&AntennaId) -> bool,
) -> Result<RatMatrix> {
    let blocks = scheme
        .config
        .antenna_ids()
        .filter(|id| keep(id))
        .map(|id| effective_columns(scheme, channel, j, id))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&RatMatrix> = blocks.iter().collect();
    Ok(RatMatrix::hcat(&refs, scheme.extension))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UserLdof {
    pub dof: usize,
    pub desired_rank: usize,
    pub interference_rank: usize,
}

/// `d_j = rank([I | D]) − rank(I)` with `I` the effective columns of every
/// other transmitter and `D` those of transmitter `j`.
pub fn measure_user_ldof(
    scheme: &Scheme,
    channel: &ChannelRealization,
    j: usize,
    backend: RankBackend,
) -> Result<UserLdof> {
    if j == 0 || j > scheme.config.users {
        return Err(BiaError::domain(format!(
            "receiver {j} outside [1:{}]",
            scheme.config.users
        )));
    }
    let interference = stack(scheme, channel, j, |id| !is_desired(j, id))?;
    let desired = stack(scheme, channel, j, |id| is_desired(j, id))?;
    let both = RatMatrix::hcat(&[&interference, &desired], scheme.extension);
    let interference_rank = rank(&interference, backend);
    Ok(UserLdof {
        dof: rank(&both, backend) - interference_rank,
        desired_rank: rank(&desired, backend),
        interference_rank,
    })
}

fn check_coverage(scheme: &Scheme) -> Result<()> {
    let index = scheme.set_index();
    match scheme.symbols().find(|s| !index.contains_key(s)) {
        Some(s) => Err(BiaError::domain(format!("symbol {s} is in no alignment set"))),
        None => Ok(()),
    }
}

/// One dimension per set not involving `j`, plus the foreign members of each
/// set that does.
pub fn expected_interference_rank(scheme: &Scheme, j: usize) -> Result<usize> {
    check_coverage(scheme)?;
    Ok(scheme
        .sets
        .iter()
        .map(|s| {
            let own = s.members.iter().filter(|m| m.transmitter() == j).count();
            if own == 0 {
                1
            } else {
                s.members.len() - own
            }
        })
        .sum())
}

/// Columns that must span the whole signal space for `j` to decode: every
/// desired symbol, every foreign member of an owned set, and the first member
/// of every foreign set.
pub fn decodability_symbols(scheme: &Scheme, j: usize) -> Vec<SymbolId> {
    let mut out: Vec<SymbolId> = scheme.symbols().filter(|s| s.transmitter() == j).collect();
    for set in &scheme.sets {
        if set.owns(j) {
            out.extend(set.members.iter().filter(|m| m.transmitter() != j));
        } else if let Some(first) = set.members.first() {
            out.push(*first);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Decodability {
    pub columns: usize,
    pub rank: usize,
    pub square_full_rank: bool,
}

pub fn decodability(
    scheme: &Scheme,
    channel: &ChannelRealization,
    j: usize,
    backend: RankBackend,
) -> Result<Decodability> {
    let m = scheme.extension;
    let symbols = decodability_symbols(scheme, j);
    let mut blocks = Vec::new();
    let mut cache: Vec<(AntennaId, RatMatrix)> = Vec::new();
    for s in &symbols {
        if !cache.iter().any(|(id, _)| *id == s.antenna) {
            cache.push((s.antenna, effective_columns(scheme, channel, j, s.antenna)?));
        }
        let full = &cache.iter().find(|(id, _)| *id == s.antenna).unwrap().1;
        if s.index == 0 || s.index > full.ncols() {
            return Err(BiaError::InvalidScheme(format!("symbol {s} does not exist")));
        }
        blocks.push(full.select_columns(&[s.index - 1]));
    }
    let refs: Vec<&RatMatrix> = blocks.iter().collect();
    let matrix = RatMatrix::hcat(&refs, m);
    let r = rank(&matrix, backend);
    Ok(Decodability {
        columns: symbols.len(),
        rank: r,
        square_full_rank: symbols.len() == m && r == m,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRow {
    pub receiver: usize,
    pub measured_dof: usize,
    pub expected_dof: usize,
    pub desired_rank: usize,
    pub interference_rank: usize,
    pub expected_interference: usize,
    pub decodability: Decodability,
}

impl UserRow {
    pub fn passed(&self) -> bool {
        self.measured_dof == self.expected_dof && self.interference_rank == self.expected_interference
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub extension: usize,
    pub per_user: Vec<UserRow>,
    pub sum_dof: Rational64,
    pub passed: bool,
}

pub const REPORT_HEADER: &str = "j,d_j,expected,interference_rank,expected_interference,pass";

impl VerificationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{REPORT_HEADER}");
        for r in &self.per_user {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                r.receiver,
                r.measured_dof,
                r.expected_dof,
                r.interference_rank,
                r.expected_interference,
                r.passed()
            );
        }
        let _ = writeln!(
            s,
            "m={} sum={} passed={}",
            self.extension,
            crate::fraction(self.sum_dof),
            self.passed
        );
        s
    }
}

pub fn verify(
    scheme: &Scheme,
    channel: &ChannelRealization,
    backend: RankBackend,
) -> Result<VerificationReport> {
    if scheme.extension == 0 {
        return Err(BiaError::InvalidScheme("symbol extension is zero".into()));
    }
    let mut per_user = Vec::with_capacity(scheme.config.users);
    for j in 1..=scheme.config.users {
        let measured = measure_user_ldof(scheme, channel, j, backend)?;
        per_user.push(UserRow {
            receiver: j,
            measured_dof: measured.dof,
            expected_dof: scheme.desired_symbols(j),
            desired_rank: measured.desired_rank,
            interference_rank: measured.interference_rank,
            expected_interference: expected_interference_rank(scheme, j)?,
            decodability: decodability(scheme, channel, j, backend)?,
        });
    }
    let total: usize = per_user.iter().map(|r| r.measured_dof).sum();
    let passed = per_user.iter().all(UserRow::passed);
    Ok(VerificationReport {
        extension: scheme.extension,
        sum_dof: Rational64::new(total as i64, scheme.extension as i64),
        per_user,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub seed: u64,
    pub report: VerificationReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonteCarloReport {
    pub master_seed: u64,
    pub trials: Vec<TrialOutcome>,
}

impl MonteCarloReport {
    pub fn passed(&self) -> usize {
        self.trials.iter().filter(|t| t.report.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.trials.len()
    }

    /// Distinct sum-DoF values seen across trials, ascending.
    pub fn sum_dofs(&self) -> Vec<Rational64> {
        let set: BTreeSet<Rational64> = self.trials.iter().map(|t| t.report.sum_dof).collect();
        set.into_iter().collect()
    }

    /// Smallest sum DoF over all trials.
    pub fn min_sum_dof(&self) -> Rational64 {
        self.sum_dofs()[0]
    }

    pub fn summary(&self) -> String {
        format!(
            "{}/{} pass, sum={}",
            self.passed(),
            self.trials.len(),
            crate::fraction(self.min_sum_dof())
        )
    }
}

/// Runs [`verify`] on `trials` channels drawn from [`trial_seed`]`(master_seed, t)`.
/// Trials run in parallel; the report lists them in trial order.
pub fn monte_carlo(
    scheme: &Scheme,
    trials: usize,
    master_seed: u64,
    backend: RankBackend,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(BiaError::domain("trials must be at least 1"));
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seed = trial_seed(master_seed, trial);
            let channel = sample_channel(scheme.config, seed);
            verify(scheme, &channel, backend).map(|report| TrialOutcome { trial, seed, report })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonteCarloReport {
        master_seed,
        trials: outcomes,
    })
}
