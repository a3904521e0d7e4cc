//! Linear sum-DoF upper bounds and the optimal number of preset modes.

use num_rational::Rational64;

use crate::error::{BiaError, Result};
use crate::model::{CellularConfig, Direction, SystemConfig};

/// Which rule produced `n_star`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `n* = MΓ`: the leftover `α` modes do not pay for themselves.
    MultipleOfM,
    /// `n* = N`: every available mode is used.
    AllModes,
    /// `n* = MΓ_opt`: more modes no longer help.
    Saturated,
    /// Degenerate threshold denominator; maximum found by enumeration.
    BruteForce,
}

impl Branch {
    pub fn label(&self) -> &'static str {
        match self {
            Branch::MultipleOfM => "n*=M*Gamma",
            Branch::AllModes => "n*=N",
            Branch::Saturated => "n*=M*Gamma_opt",
            Branch::BruteForce => "brute-force",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundResult {
    pub n_star: usize,
    pub bound: Rational64,
    /// `N_eff = MΓ + α` with `0 ≤ α < M`.
    pub gamma: usize,
    pub alpha: usize,
    pub gamma_opt: Option<usize>,
    pub branch: Branch,
}

/// `D(n) = nK / (K + ⌈n/M⌉(n-1))`.
pub fn ldof_function(antennas: usize, users: usize, n: usize) -> Result<Rational64> {
    if antennas == 0 || users == 0 {
        return Err(BiaError::domain("M and K must be at least 1"));
    }
    if n == 0 {
        return Err(BiaError::domain("n must be at least 1"));
    }
    let (m, k, n) = (antennas as i64, users as i64, n as i64);
    let groups = (n + m - 1) / m;
    Ok(Rational64::new(n * k, k + groups * (n - 1)))
}

/// Smallest `c ≥ 1` with `c²M ≥ K`, i.e. `⌈√(K/M)⌉`.
fn ceil_sqrt_ratio(k: usize, m: usize) -> usize {
    let mut c = 1;
    while c * c * m < k {
        c += 1;
    }
    c
}

/// Largest `f ≥ 0` with `f²M ≤ K`, i.e. `⌊√(K/M)⌋`.
fn floor_sqrt_ratio(k: usize, m: usize) -> usize {
    let mut f = 0;
    while (f + 1) * (f + 1) * m <= k {
        f += 1;
    }
    f
}

/// `argmin Mγ + K/γ` over `{⌊√(K/M)⌋, ⌈√(K/M)⌉} \ {0}`, ties to the smaller γ.
fn gamma_opt(k: usize, m: usize) -> usize {
    let lo = floor_sqrt_ratio(k, m);
    let hi = ceil_sqrt_ratio(k, m);
    if lo == 0 || lo == hi {
        return hi;
    }
    // g(γ)·γ = Mγ² + K; compare g(lo) ≤ g(hi) without division.
    let g_lo = (m * lo * lo + k) * hi;
    let g_hi = (m * hi * hi + k) * lo;
    if g_lo <= g_hi {
        lo
    } else {
        hi
    }
}

fn brute_force(antennas: usize, users: usize, n_max: usize) -> (usize, Rational64) {
    let mut best = (1, Rational64::from_integer(1));
    for n in 1..=n_max {
        let d = ldof_function(antennas, users, n).expect("valid arguments");
        if d > best.1 {
            best = (n, d);
        }
    }
    best
}

/// Maximum of `D` over `n ∈ [1:n_max]` by enumeration (ties to the smallest n).
pub fn brute_force_bound(antennas: usize, users: usize, n_max: usize) -> Result<(usize, Rational64)> {
    if antennas == 0 || users == 0 || n_max == 0 {
        return Err(BiaError::domain("M, K and the mode count must be at least 1"));
    }
    Ok(brute_force(antennas, users, n_max))
}

/// Closed-form selection for `M` antennas, `users` receivers and `n_eff` usable modes.
fn select(antennas: usize, n_eff: usize, users: usize) -> BoundResult {
    let m = antennas;
    let gamma = n_eff / m;
    let alpha = n_eff % m;
    let c = ceil_sqrt_ratio(users, m);
    let finish = |n_star: usize, gamma_opt, branch| BoundResult {
        n_star,
        bound: ldof_function(m, users, n_star).expect("valid arguments"),
        gamma,
        alpha,
        gamma_opt,
        branch,
    };

    if n_eff >= m * c {
        let g = gamma_opt(users, m);
        return finish(m * g, Some(g), Branch::Saturated);
    }
    if users <= gamma + 1 {
        let (n_star, _) = brute_force(m, users, n_eff);
        return finish(n_star, None, Branch::BruteForce);
    }
    // α ≤ N(MΓ-1)/(K-Γ-1), in integers; MΓ may be 0 when N < M.
    let lhs = (alpha * (users - gamma - 1)) as i64;
    let rhs = n_eff as i64 * (m * gamma) as i64 - n_eff as i64;
    if gamma > 0 && lhs <= rhs {
        finish(m * gamma, None, Branch::MultipleOfM)
    } else {
        finish(n_eff, None, Branch::AllModes)
    }
}

/// Optimal preset-mode count and the resulting bound for an `(M, N, K)` channel.
pub fn optimal_preset_modes(config: SystemConfig) -> Result<BoundResult> {
    if config.users < 2 {
        return Err(BiaError::domain("K must be at least 2"));
    }
    if config.antennas == 0 || config.modes == 0 {
        return Err(BiaError::domain("M and N must be at least 1"));
    }
    let n_eff = config.modes.min(config.total_antennas());
    Ok(select(config.antennas, n_eff, config.users))
}

/// Single-antenna transmitters with `modes` preset modes.
pub fn siso_bound(modes: usize, users: usize) -> Result<BoundResult> {
    optimal_preset_modes(SystemConfig::new(1, modes, users)?)
}

/// Downlink of `G` fully connected cells with `K` receivers each.
pub fn downlink_cell_bound(cfg: CellularConfig) -> Result<BoundResult> {
    if cfg.direction != Direction::Downlink {
        return Err(BiaError::domain("downlink bound requested for an uplink configuration"));
    }
    let receivers = cfg.users * cfg.cells;
    if receivers < 2 {
        return Err(BiaError::domain("at least two receivers are required"));
    }
    let n_bar = cfg.modes.min(cfg.antennas * cfg.cells);
    Ok(select(cfg.antennas, n_bar, receivers))
}

/// Uplink where cell `k` holds transmitters with the listed antenna counts.
pub fn uplink_cell_bound(antennas_per_cell: &[Vec<usize>], modes: usize) -> Result<BoundResult> {
    if antennas_per_cell.is_empty() || antennas_per_cell.iter().any(|c| c.is_empty()) {
        return Err(BiaError::domain("every cell needs at least one transmitter"));
    }
    if antennas_per_cell.iter().flatten().any(|&a| a == 0) {
        return Err(BiaError::domain("antenna counts must be positive"));
    }
    let sums: Vec<usize> = antennas_per_cell.iter().map(|c| c.iter().sum()).collect();
    if sums.iter().any(|&s| s != sums[0]) {
        return Err(BiaError::AsymmetricCells(sums));
    }
    optimal_preset_modes(SystemConfig::new(sums[0], modes, antennas_per_cell.len())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepRow {
    pub modes: usize,
    pub n_star: usize,
    pub bound: Rational64,
}

/// Bound for every `N ∈ [1:n_max]`.
pub fn sweep_bound(antennas: usize, users: usize, n_max: usize) -> Result<Vec<SweepRow>> {
    if n_max == 0 {
        return Err(BiaError::domain("n_max must be at least 1"));
    }
    (1..=n_max)
        .map(|n| {
            let r = optimal_preset_modes(SystemConfig::new(antennas, n, users)?)?;
            Ok(SweepRow {
                modes: n,
                n_star: r.n_star,
                bound: r.bound,
            })
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str = "N,n_star,bound_num,bound_den,bound_decimal";

/// Renders a sweep as CSV with the header above.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.modes,
            r.n_star,
            r.bound.numer(),
            r.bound.denom(),
            crate::decimal(r.bound)
        ));
    }
    out
}
