//! Alignment-set partitions: how transmit symbols are grouped so that each
//! group collapses to one dimension at every receiver that does not want it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;

use crate::bounds::optimal_preset_modes;
use crate::error::{BiaError, Result};
use crate::model::{AlignmentSet, AntennaId, SymbolId, SystemConfig};

/// Which construction produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionCase {
    /// `n* = 1`: every symbol is its own set.
    Singleton,
    /// `n*/M` and `MK/n*` integers: disjoint groups of `n*/M` transmitters.
    Grouped,
    /// `n*/M` integer only: cyclic windows of whole transmitters.
    TransmitterCirculant,
    /// `n*/M` fractional: cyclic windows of consecutive antennas.
    AntennaCirculant,
    /// Built by hand.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPlan {
    pub config: SystemConfig,
    pub eta: usize,
    pub symbols_per_antenna: BTreeMap<AntennaId, usize>,
    pub sets: Vec<AlignmentSet>,
    pub case: PartitionCase,
}

impl PartitionPlan {
    /// A plan from explicit sets; symbol counts are read off the members.
    pub fn from_sets(config: SystemConfig, sets: Vec<AlignmentSet>) -> Self {
        let mut symbols_per_antenna: BTreeMap<AntennaId, usize> =
            config.antenna_ids().map(|id| (id, 0)).collect();
        for m in sets.iter().flat_map(|s| &s.members) {
            let e = symbols_per_antenna.entry(m.antenna).or_insert(0);
            *e = (*e).max(m.index);
        }
        let eta = symbols_per_antenna.values().copied().max().unwrap_or(0);
        PartitionPlan {
            config,
            eta,
            symbols_per_antenna,
            sets,
            case: PartitionCase::Custom,
        }
    }

    pub fn total_symbols(&self) -> usize {
        self.symbols_per_antenna.values().sum()
    }
}

/// `⌈n/M⌉`: the fewest transmitters a cardinality-`n` set can span.
pub fn minimal_transmitter_count(n: usize, antennas: usize) -> Result<usize> {
    if n == 0 || antennas == 0 {
        return Err(BiaError::domain("n and M must be at least 1"));
    }
    Ok(n.div_ceil(antennas))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionViolation {
    /// A symbol sits in more than one set.
    Exclusivity { symbol: SymbolId },
    /// A declared symbol is in no set.
    Uncovered { symbol: SymbolId },
    /// A member refers to an antenna or symbol index that is not declared.
    UnknownSymbol { set: usize, symbol: SymbolId },
    /// Cardinality above `min(N, MK)`.
    CardinalityExceedsModes { set: usize, cardinality: usize },
    /// Corresponding transmitters differ from the members' transmitters.
    TransmitterMismatch { set: usize },
    /// Two members share an antenna, so they can never be separated.
    RepeatedAntenna { set: usize, antenna: AntennaId },
}

impl PartitionViolation {
    pub fn code(&self) -> &'static str {
        match self {
            PartitionViolation::Exclusivity { .. } => "EXCLUSIVITY",
            PartitionViolation::Uncovered { .. } => "UNCOVERED_SYMBOL",
            PartitionViolation::UnknownSymbol { .. } => "UNKNOWN_SYMBOL",
            PartitionViolation::CardinalityExceedsModes { .. } => "CARDINALITY_EXCEEDS_MODES",
            PartitionViolation::TransmitterMismatch { .. } => "TRANSMITTER_MISMATCH",
            PartitionViolation::RepeatedAntenna { .. } => "REPEATED_ANTENNA",
        }
    }
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let code = self.code();
        match self {
            PartitionViolation::Exclusivity { symbol } | PartitionViolation::Uncovered { symbol } => {
                write!(f, "{code} at {symbol}")
            }
            PartitionViolation::UnknownSymbol { set, symbol } => {
                write!(f, "{code}: set {set}, symbol {symbol}")
            }
            PartitionViolation::CardinalityExceedsModes { set, cardinality } => {
                write!(f, "{code}: set {set} has {cardinality} members")
            }
            PartitionViolation::TransmitterMismatch { set } => write!(f, "{code}: set {set}"),
            PartitionViolation::RepeatedAntenna { set, antenna } => {
                write!(f, "{code}: set {set}, antenna {antenna}")
            }
        }
    }
}

/// Structural checks on a plan; set numbers in the result are 1-based.
pub fn validate_partition(plan: &PartitionPlan, config: SystemConfig) -> Vec<PartitionViolation> {
    let mut out = Vec::new();
    let cap = config.modes.min(config.total_antennas());
    let mut seen = BTreeSet::new();
    for (s, set) in plan.sets.iter().enumerate() {
        let set_no = s + 1;
        if set.cardinality() > cap {
            out.push(PartitionViolation::CardinalityExceedsModes {
                set: set_no,
                cardinality: set.cardinality(),
            });
        }
        let txs: BTreeSet<usize> = set.members.iter().map(SymbolId::transmitter).collect();
        if txs != set.transmitters || set.transmitters.is_empty() {
            out.push(PartitionViolation::TransmitterMismatch { set: set_no });
        }
        let mut antennas = BTreeSet::new();
        for &m in &set.members {
            let declared = plan.symbols_per_antenna.get(&m.antenna).copied().unwrap_or(0);
            if !config.contains(m.antenna) || m.index == 0 || m.index > declared {
                out.push(PartitionViolation::UnknownSymbol { set: set_no, symbol: m });
            }
            if !antennas.insert(m.antenna) {
                out.push(PartitionViolation::RepeatedAntenna {
                    set: set_no,
                    antenna: m.antenna,
                });
            }
            if !seen.insert(m) {
                out.push(PartitionViolation::Exclusivity { symbol: m });
            }
        }
    }
    for (&id, &count) in &plan.symbols_per_antenna {
        for d in 1..=count {
            let symbol = SymbolId::new(id, d);
            if !seen.contains(&symbol) {
                out.push(PartitionViolation::Uncovered { symbol });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionReport {
    /// `m_j` for receivers `1..=K`, in order.
    pub per_receiver: Vec<usize>,
    pub balanced: bool,
}

/// `m_j = Σ_{S∋j} |set| + Σ_{S∌j} 1`: dimensions receiver `j` needs to see its
/// owned sets fully resolved and every other set collapsed to one dimension.
pub fn required_extension(plan: &PartitionPlan, config: SystemConfig) -> Result<ExtensionReport> {
    if plan.sets.iter().any(|s| s.transmitters.iter().any(|&t| t == 0 || t > config.users)) {
        return Err(BiaError::domain("set refers to a transmitter outside [1:K]"));
    }
    let per_receiver: Vec<usize> = (1..=config.users)
        .map(|j| {
            plan.sets
                .iter()
                .map(|s| if s.owns(j) { s.cardinality() } else { 1 })
                .sum()
        })
        .collect();
    let balanced = per_receiver.windows(2).all(|w| w[0] == w[1]);
    Ok(ExtensionReport {
        per_receiver,
        balanced,
    })
}

/// Mixed-radix enumeration of `[1:base]^len` in lexicographic order.
pub(crate) fn tuples(base: usize, len: usize) -> Vec<Vec<usize>> {
    let count = base.pow(len as u32);
    (0..count)
        .map(|mut x| {
            let mut t = vec![0; len];
            for k in (0..len).rev() {
                t[k] = x % base + 1;
                x /= base;
            }
            t
        })
        .collect()
}

/// Lexicographic rank (0-based) of a tuple over `[1:base]`.
pub(crate) fn tuple_rank(t: &[usize], base: usize) -> usize {
    t.iter().fold(0, |acc, &x| acc * base + (x - 1))
}

/// Builds the plan for `config` at its optimal `n*`.
pub fn construct_partition(config: SystemConfig) -> Result<PartitionPlan> {
    let n_star = optimal_preset_modes(config)?.n_star;
    construct_partition_for(config, n_star)
}

/// Builds a plan whose sets all have cardinality `n`.
pub fn construct_partition_for(config: SystemConfig, n: usize) -> Result<PartitionPlan> {
    let (m, k) = (config.antennas, config.users);
    let total = config.total_antennas();
    if n == 0 || n > config.modes.min(total) {
        return Err(BiaError::domain(format!("cardinality {n} not usable for {config}")));
    }
    if n == 1 {
        let sets = config
            .antenna_ids()
            .map(|id| AlignmentSet::from_members(vec![SymbolId::new(id, 1)]))
            .collect();
        return Ok(finish(config, 1, sets, PartitionCase::Singleton));
    }
    if n % m == 0 && total % n == 0 {
        return Ok(grouped(config, n));
    }
    if n % m == 0 {
        return Ok(transmitter_windows(config, n / m));
    }
    if k < 2 {
        return Err(BiaError::UnsupportedConfig { m, n: config.modes, k });
    }
    Ok(antenna_windows(config, n))
}

fn finish(config: SystemConfig, eta: usize, sets: Vec<AlignmentSet>, case: PartitionCase) -> PartitionPlan {
    PartitionPlan {
        config,
        eta,
        symbols_per_antenna: config.antenna_ids().map(|id| (id, eta)).collect(),
        sets,
        case,
    }
}

/// Group `g` (1-based) holds transmitters `(g-1)R₁+1 ..= gR₁`; set `(g, ℓ)`
/// takes symbol `rank(ℓ)+1` from each of the group's antennas.
fn grouped(config: SystemConfig, n: usize) -> PartitionPlan {
    let r1 = n / config.antennas;
    let r2 = config.total_antennas() / n;
    let eta = (n - 1).pow(r2 as u32 - 1);
    let mut sets = Vec::new();
    for g in 1..=r2 {
        for (d, _) in tuples(n - 1, r2 - 1).iter().enumerate() {
            let members = ((g - 1) * r1 + 1..=g * r1)
                .flat_map(|i| (1..=config.antennas).map(move |a| AntennaId::new(i, a)))
                .map(|id| SymbolId::new(id, d + 1))
                .collect();
            sets.push(AlignmentSet::from_members(members));
        }
    }
    finish(config, eta, sets, PartitionCase::Grouped)
}

/// Cyclic windows over `positions` items starting at every multiple of
/// `stride`; an item takes symbol 1 in the window where it sits last, counting
/// up as its offset in the window decreases.
fn windows(
    positions: usize,
    width: usize,
    stride: usize,
    item: impl Fn(usize) -> Vec<AntennaId>,
) -> Vec<AlignmentSet> {
    let eta = width / stride;
    (0..positions)
        .step_by(stride)
        .map(|p| {
            let members = (0..width)
                .flat_map(|r| {
                    let pos = (p + r) % positions;
                    // offsets of this position's windows, largest first
                    let index = (width - 1 - r) / stride + 1;
                    debug_assert!(index <= eta);
                    item(pos).into_iter().map(move |id| SymbolId::new(id, index))
                })
                .collect();
            AlignmentSet::from_members(members)
        })
        .collect()
}

fn transmitter_windows(config: SystemConfig, r1: usize) -> PartitionPlan {
    let k = config.users;
    let stride = r1.gcd(&k);
    let sets = windows(k, r1, stride, |pos| {
        (1..=config.antennas)
            .map(|a| AntennaId::new(pos + 1, a))
            .collect()
    });
    finish(config, r1 / stride, sets, PartitionCase::TransmitterCirculant)
}

fn antenna_windows(config: SystemConfig, n: usize) -> PartitionPlan {
    let stride = n.gcd(&config.antennas);
    let sets = windows(config.total_antennas(), n, stride, |pos| vec![config.antenna_at(pos)]);
    finish(config, n / stride, sets, PartitionCase::AntennaCirculant)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(m: usize, n: usize, k: usize) -> SystemConfig {
        SystemConfig::new(m, n, k).unwrap()
    }

    fn sym(i: usize, a: usize, d: usize) -> SymbolId {
        SymbolId::new(AntennaId::new(i, a), d)
    }

    fn member_sets(plan: &PartitionPlan) -> BTreeSet<BTreeSet<AntennaId>> {
        plan.sets
            .iter()
            .map(|s| s.members.iter().map(|m| m.antenna).collect())
            .collect()
    }

    #[test]
    fn minimal_transmitters() {
        assert_eq!(minimal_transmitter_count(3, 2).unwrap(), 2);
        assert_eq!(minimal_transmitter_count(2, 1).unwrap(), 2);
        assert_eq!(minimal_transmitter_count(4, 4).unwrap(), 1);
        assert!(minimal_transmitter_count(0, 2).is_err());
    }

    #[test]
    fn grouped_pairs_for_four_users() {
        let plan = construct_partition(cfg(1, 2, 4)).unwrap();
        assert_eq!(plan.case, PartitionCase::Grouped);
        assert_eq!(plan.eta, 1);
        let txs: Vec<Vec<usize>> = plan
            .sets
            .iter()
            .map(|s| s.transmitters.iter().copied().collect())
            .collect();
        assert_eq!(txs, vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(validate_partition(&plan, plan.config), vec![]);
    }

    #[test]
    fn circulant_five_users() {
        let plan = construct_partition(cfg(1, 2, 5)).unwrap();
        assert_eq!(plan.case, PartitionCase::TransmitterCirculant);
        assert_eq!(plan.eta, 2);
        assert_eq!(plan.sets.len(), 5);
        for (j, set) in plan.sets.iter().enumerate() {
            let i = j + 1;
            let next = i % 5 + 1;
            assert_eq!(set.members, vec![sym(i, 1, 2), sym(next, 1, 1)]);
        }
        let ext = required_extension(&plan, plan.config).unwrap();
        assert_eq!(ext.per_receiver, vec![7; 5]);
        assert!(ext.balanced);
    }

    #[test]
    fn six_user_two_antenna_template() {
        let plan = construct_partition(cfg(2, 3, 6)).unwrap();
        assert_eq!(plan.case, PartitionCase::AntennaCirculant);
        assert_eq!(plan.eta, 3);
        assert_eq!(plan.sets.len(), 12);
        assert_eq!(validate_partition(&plan, plan.config), vec![]);
        let ext = required_extension(&plan, plan.config).unwrap();
        assert_eq!(ext.per_receiver, vec![20; 6]);

        // the twelve windows listed for this configuration, as antenna sets
        let a = AntennaId::new;
        let listed: BTreeSet<BTreeSet<AntennaId>> = [
            [a(1, 1), a(1, 2), a(2, 1)],
            [a(2, 2), a(3, 1), a(3, 2)],
            [a(4, 1), a(4, 2), a(5, 1)],
            [a(5, 2), a(6, 1), a(6, 2)],
            [a(1, 2), a(2, 1), a(2, 2)],
            [a(3, 1), a(3, 2), a(4, 1)],
            [a(4, 2), a(5, 1), a(5, 2)],
            [a(6, 1), a(6, 2), a(1, 1)],
            [a(2, 1), a(2, 2), a(3, 1)],
            [a(3, 2), a(4, 1), a(4, 2)],
            [a(5, 1), a(5, 2), a(6, 1)],
            [a(6, 2), a(1, 1), a(1, 2)],
        ]
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();
        assert_eq!(member_sets(&plan), listed);
    }

    #[test]
    fn naive_six_user_plan_is_unbalanced() {
        let config = cfg(2, 3, 6);
        let sets = vec![
            AlignmentSet::from_members(vec![sym(1, 1, 1), sym(1, 2, 1), sym(2, 1, 1)]),
            AlignmentSet::from_members(vec![sym(2, 2, 1), sym(3, 1, 1), sym(3, 2, 1)]),
            AlignmentSet::from_members(vec![sym(4, 1, 1), sym(4, 2, 1), sym(5, 1, 1)]),
            AlignmentSet::from_members(vec![sym(5, 2, 1), sym(6, 1, 1), sym(6, 2, 1)]),
        ];
        let plan = PartitionPlan::from_sets(config, sets);
        assert_eq!(validate_partition(&plan, config), vec![]);
        let ext = required_extension(&plan, config).unwrap();
        assert_eq!(ext.per_receiver[0], 6);
        assert_eq!(ext.per_receiver[1], 8);
        assert!(!ext.balanced);
    }

    #[test]
    fn violations_are_reported() {
        let config = cfg(1, 2, 3);
        let mut plan = construct_partition(config).unwrap();
        let dup = plan.sets[0].members[0];
        plan.sets[1].members.push(dup);
        plan.sets[1].transmitters.insert(dup.transmitter());
        let codes: Vec<_> = validate_partition(&plan, config).iter().map(|v| v.code()).collect();
        assert!(codes.contains(&"EXCLUSIVITY"), "{codes:?}");
        assert!(codes.contains(&"CARDINALITY_EXCEEDS_MODES"), "{codes:?}");

        let sets = vec![AlignmentSet::from_members(vec![sym(1, 1, 1), sym(2, 1, 1), sym(3, 1, 1)])];
        let plan = PartitionPlan::from_sets(config, sets);
        let codes: Vec<_> = validate_partition(&plan, config).iter().map(|v| v.code()).collect();
        assert_eq!(codes, vec!["CARDINALITY_EXCEEDS_MODES"]);

        let mut plan = construct_partition(config).unwrap();
        plan.sets[0].transmitters.insert(3);
        let codes: Vec<_> = validate_partition(&plan, config).iter().map(|v| v.code()).collect();
        assert_eq!(codes, vec!["TRANSMITTER_MISMATCH"]);

        let mut plan = construct_partition(config).unwrap();
        let removed = plan.sets.pop().unwrap();
        let codes: Vec<_> = validate_partition(&plan, config).iter().map(|v| v.code()).collect();
        assert_eq!(codes.len(), removed.cardinality());
        assert!(codes.iter().all(|&c| c == "UNCOVERED_SYMBOL"));
    }

    #[test]
    fn tuple_helpers() {
        assert_eq!(tuples(2, 2), vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert_eq!(tuples(3, 0), vec![Vec::<usize>::new()]);
        for (r, t) in tuples(3, 3).iter().enumerate() {
            assert_eq!(tuple_rank(t, 3), r);
        }
    }
}
