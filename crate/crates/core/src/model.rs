//! Domain types shared by every module: system configurations, antenna and
//! symbol identifiers, alignment sets, schemes and channel realizations.
//!
//! All indices are 1-based. Antennas are ordered transmitter-major, so the
//! derived `Ord` on [`AntennaId`] walks `1(1), 1(2), ..., K(M)`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{BiaError, Result};
use crate::linalg::RatMatrix;

/// An `(M, N, K)` interference channel: `M` transmit antennas per
/// transmitter, `N` preset modes per receiver, `K` transmitter-receiver pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemConfig {
    pub antennas: usize,
    pub modes: usize,
    pub users: usize,
}

impl SystemConfig {
    pub fn new(antennas: usize, modes: usize, users: usize) -> Result<Self> {
        if antennas == 0 || modes == 0 {
            return Err(BiaError::domain("M and N must be at least 1"));
        }
        if users < 2 {
            return Err(BiaError::domain("K must be at least 2"));
        }
        Ok(SystemConfig {
            antennas,
            modes,
            users,
        })
    }

    /// Total number of transmit antennas `MK`.
    pub fn total_antennas(&self) -> usize {
        self.antennas * self.users
    }

    /// All antennas in network order.
    pub fn antenna_ids(&self) -> impl Iterator<Item = AntennaId> + '_ {
        (1..=self.users)
            .flat_map(move |i| (1..=self.antennas).map(move |a| AntennaId::new(i, a)))
    }

    /// 0-based position of an antenna in network order.
    pub fn flat_index(&self, id: AntennaId) -> usize {
        (id.transmitter - 1) * self.antennas + (id.antenna - 1)
    }

    pub fn antenna_at(&self, flat: usize) -> AntennaId {
        AntennaId::new(flat / self.antennas + 1, flat % self.antennas + 1)
    }

    pub fn contains(&self, id: AntennaId) -> bool {
        (1..=self.users).contains(&id.transmitter) && (1..=self.antennas).contains(&id.antenna)
    }
}

impl fmt::Display for SystemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.antennas, self.modes, self.users)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Downlink,
    Uplink,
}

/// A fully connected cellular network. For the downlink, `users` counts the
/// receivers in each cell; for the uplink it is the per-cell antenna total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellularConfig {
    pub cells: usize,
    pub users: usize,
    pub antennas: usize,
    pub modes: usize,
    pub direction: Direction,
}

impl CellularConfig {
    pub fn new(
        cells: usize,
        users: usize,
        antennas: usize,
        modes: usize,
        direction: Direction,
    ) -> Result<Self> {
        if cells == 0 || users == 0 || antennas == 0 || modes == 0 {
            return Err(BiaError::domain("all cellular counts must be at least 1"));
        }
        Ok(CellularConfig {
            cells,
            users,
            antennas,
            modes,
            direction,
        })
    }
}

/// The `a`-th antenna of transmitter `i`, written `i(a)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AntennaId {
    pub transmitter: usize,
    pub antenna: usize,
}

impl AntennaId {
    pub const fn new(transmitter: usize, antenna: usize) -> Self {
        AntennaId {
            transmitter,
            antenna,
        }
    }
}

impl fmt::Display for AntennaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.transmitter, self.antenna)
    }
}

impl FromStr for AntennaId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let bad = || format!("expected an antenna key of the form `i(a)`, got `{s}`");
        let (tx, rest) = s.split_once('(').ok_or_else(bad)?;
        let ant = rest.strip_suffix(')').ok_or_else(bad)?;
        let transmitter: usize = tx.trim().parse().map_err(|_| bad())?;
        let antenna: usize = ant.trim().parse().map_err(|_| bad())?;
        if transmitter == 0 || antenna == 0 {
            return Err(bad());
        }
        Ok(AntennaId::new(transmitter, antenna))
    }
}

/// The `index`-th data symbol (1-based) sent from `antenna`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId {
    pub antenna: AntennaId,
    pub index: usize,
}

impl SymbolId {
    pub const fn new(antenna: AntennaId, index: usize) -> Self {
        SymbolId { antenna, index }
    }

    pub fn transmitter(&self) -> usize {
        self.antenna.transmitter
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.antenna, self.index)
    }
}

/// Transmit symbols aligned into one dimension at every receiver outside
/// `transmitters` while staying separable at the receivers inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentSet {
    pub transmitters: BTreeSet<usize>,
    pub members: Vec<SymbolId>,
}

impl AlignmentSet {
    /// Builds a set whose corresponding transmitters are exactly those of its members.
    pub fn from_members(members: Vec<SymbolId>) -> Self {
        let transmitters = members.iter().map(SymbolId::transmitter).collect();
        AlignmentSet {
            transmitters,
            members,
        }
    }

    pub fn cardinality(&self) -> usize {
        self.members.len()
    }

    pub fn owns(&self, receiver: usize) -> bool {
        self.transmitters.contains(&receiver)
    }
}

/// A binary beamforming column over the symbol extension.
pub type BeamColumn = Vec<u8>;

/// A complete linear scheme over an `extension`-slot symbol extension.
///
/// `beamforming[i(a)]` lists the beamforming columns of antenna `i(a)`, one per
/// symbol; `patterns[j-1]` is the preset-mode sequence of receiver `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    pub config: SystemConfig,
    pub extension: usize,
    pub beamforming: BTreeMap<AntennaId, Vec<BeamColumn>>,
    pub patterns: Vec<Vec<usize>>,
    pub sets: Vec<AlignmentSet>,
}

impl Scheme {
    /// Empty scheme: every antenna silent, every receiver in mode 1.
    pub fn silent(config: SystemConfig, extension: usize) -> Self {
        Scheme {
            config,
            extension,
            beamforming: config.antenna_ids().map(|id| (id, Vec::new())).collect(),
            patterns: vec![vec![1; extension]; config.users],
            sets: Vec::new(),
        }
    }

    pub fn columns(&self, antenna: AntennaId) -> &[BeamColumn] {
        self.beamforming
            .get(&antenna)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn symbol_count(&self, antenna: AntennaId) -> usize {
        self.columns(antenna).len()
    }

    /// Number of symbols desired by receiver `j` (sent by transmitter `j`).
    pub fn desired_symbols(&self, receiver: usize) -> usize {
        (1..=self.config.antennas)
            .map(|a| self.symbol_count(AntennaId::new(receiver, a)))
            .sum()
    }

    pub fn total_symbols(&self) -> usize {
        self.beamforming.values().map(Vec::len).sum()
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        self.beamforming
            .iter()
            .flat_map(|(&id, cols)| (1..=cols.len()).map(move |d| SymbolId::new(id, d)))
    }

    pub fn column(&self, symbol: SymbolId) -> Option<&BeamColumn> {
        self.beamforming
            .get(&symbol.antenna)
            .and_then(|cols| cols.get(symbol.index.checked_sub(1)?))
    }

    pub fn pattern(&self, receiver: usize) -> &[usize] {
        &self.patterns[receiver - 1]
    }

    /// Index of the alignment set containing each symbol.
    pub fn set_index(&self) -> BTreeMap<SymbolId, usize> {
        let mut out = BTreeMap::new();
        for (s, set) in self.sets.iter().enumerate() {
            for &member in &set.members {
                out.entry(member).or_insert(s);
            }
        }
        out
    }
}

/// One structural problem found by [`validate_scheme`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    ZeroExtension,
    PatternCount { found: usize, expected: usize },
    PatternLength { receiver: usize, length: usize },
    PatternOutOfRange { receiver: usize, slot: usize, mode: usize },
    UnknownAntenna(AntennaId),
    ColumnLength { symbol: SymbolId, length: usize },
    NonBinaryEntry { symbol: SymbolId, slot: usize, value: u8 },
    EmptySet { set: usize },
    TransmitterOutOfRange { set: usize, transmitter: usize },
    UnknownSymbol { set: usize, symbol: SymbolId },
    MemberOutsideTransmitters { set: usize, symbol: SymbolId },
    DuplicateMember { set: usize, symbol: SymbolId },
    DuplicateSetMembership { symbol: SymbolId, first: usize, second: usize },
}

impl Violation {
    /// Stable upper-case code for reports.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::ZeroExtension => "ZERO_EXTENSION",
            Violation::PatternCount { .. } => "PATTERN_COUNT",
            Violation::PatternLength { .. } => "PATTERN_LENGTH",
            Violation::PatternOutOfRange { .. } => "PATTERN_OUT_OF_RANGE",
            Violation::UnknownAntenna(_) => "UNKNOWN_ANTENNA",
            Violation::ColumnLength { .. } => "COLUMN_LENGTH",
            Violation::NonBinaryEntry { .. } => "NON_BINARY_ENTRY",
            Violation::EmptySet { .. } => "EMPTY_SET",
            Violation::TransmitterOutOfRange { .. } => "TRANSMITTER_OUT_OF_RANGE",
            Violation::UnknownSymbol { .. } => "UNKNOWN_SYMBOL",
            Violation::MemberOutsideTransmitters { .. } => "MEMBER_OUTSIDE_TRANSMITTERS",
            Violation::DuplicateMember { .. } => "DUPLICATE_MEMBER",
            Violation::DuplicateSetMembership { .. } => "DUPLICATE_SET_MEMBERSHIP",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let code = self.code();
        match self {
            Violation::ZeroExtension => write!(f, "{code}: extension length is 0"),
            Violation::PatternCount { found, expected } => {
                write!(f, "{code}: {found} patterns for {expected} receivers")
            }
            Violation::PatternLength { receiver, length } => {
                write!(f, "{code} at receiver {receiver}: length {length}")
            }
            Violation::PatternOutOfRange {
                receiver,
                slot,
                mode,
            } => write!(f, "{code} at ({receiver},{slot}): mode {mode}"),
            Violation::UnknownAntenna(id) => write!(f, "{code}: {id}"),
            Violation::ColumnLength { symbol, length } => {
                write!(f, "{code} at {symbol}: length {length}")
            }
            Violation::NonBinaryEntry {
                symbol,
                slot,
                value,
            } => write!(f, "{code} at {symbol}, slot {slot}: {value}"),
            Violation::EmptySet { set } => write!(f, "{code}: set {set}"),
            Violation::TransmitterOutOfRange { set, transmitter } => {
                write!(f, "{code}: set {set}, transmitter {transmitter}")
            }
            Violation::UnknownSymbol { set, symbol }
            | Violation::MemberOutsideTransmitters { set, symbol }
            | Violation::DuplicateMember { set, symbol } => {
                write!(f, "{code}: set {set}, symbol {symbol}")
            }
            Violation::DuplicateSetMembership {
                symbol,
                first,
                second,
            } => write!(f, "{code}: {symbol} in sets {first} and {second}"),
        }
    }
}

/// Checks every structural invariant of a scheme. An empty result means the
/// scheme is well formed; set indices in the violations are 1-based.
pub fn validate_scheme(scheme: &Scheme) -> Vec<Violation> {
    let cfg = scheme.config;
    let m = scheme.extension;
    let mut out = Vec::new();

    if m == 0 {
        out.push(Violation::ZeroExtension);
    }
    if scheme.patterns.len() != cfg.users {
        out.push(Violation::PatternCount {
            found: scheme.patterns.len(),
            expected: cfg.users,
        });
    }
    for (j, pattern) in scheme.patterns.iter().enumerate() {
        let receiver = j + 1;
        if pattern.len() != m {
            out.push(Violation::PatternLength {
                receiver,
                length: pattern.len(),
            });
        }
        for (t, &mode) in pattern.iter().enumerate() {
            if mode == 0 || mode > cfg.modes {
                out.push(Violation::PatternOutOfRange {
                    receiver,
                    slot: t + 1,
                    mode,
                });
            }
        }
    }

    for (&id, cols) in &scheme.beamforming {
        if !cfg.contains(id) {
            out.push(Violation::UnknownAntenna(id));
        }
        for (d, col) in cols.iter().enumerate() {
            let symbol = SymbolId::new(id, d + 1);
            if col.len() != m {
                out.push(Violation::ColumnLength {
                    symbol,
                    length: col.len(),
                });
            }
            for (t, &v) in col.iter().enumerate() {
                if v > 1 {
                    out.push(Violation::NonBinaryEntry {
                        symbol,
                        slot: t + 1,
                        value: v,
                    });
                }
            }
        }
    }

    let mut seen: BTreeMap<SymbolId, usize> = BTreeMap::new();
    for (s, set) in scheme.sets.iter().enumerate() {
        let set_no = s + 1;
        if set.transmitters.is_empty() || set.members.is_empty() {
            out.push(Violation::EmptySet { set: set_no });
        }
        for &tx in &set.transmitters {
            if tx == 0 || tx > cfg.users {
                out.push(Violation::TransmitterOutOfRange {
                    set: set_no,
                    transmitter: tx,
                });
            }
        }
        let mut local = HashSet::new();
        for &symbol in &set.members {
            if scheme.column(symbol).is_none() {
                out.push(Violation::UnknownSymbol {
                    set: set_no,
                    symbol,
                });
            }
            if !set.transmitters.contains(&symbol.transmitter()) {
                out.push(Violation::MemberOutsideTransmitters {
                    set: set_no,
                    symbol,
                });
            }
            if !local.insert(symbol) {
                out.push(Violation::DuplicateMember {
                    set: set_no,
                    symbol,
                });
                continue;
            }
            if let Some(&first) = seen.get(&symbol) {
                out.push(Violation::DuplicateSetMembership {
                    symbol,
                    first,
                    second: set_no,
                });
            } else {
                seen.insert(symbol, set_no);
            }
        }
    }
    out
}

/// Channel coefficients `h_{j,i(a)}(mode)` for every receiver, antenna and
/// preset mode. All values are nonzero exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelRealization {
    config: SystemConfig,
    coeffs: Vec<BigRational>,
}

impl ChannelRealization {
    /// Builds a realization from `f(receiver, antenna, mode)`.
    pub fn from_fn<F>(config: SystemConfig, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, AntennaId, usize) -> BigRational,
    {
        let mut coeffs = Vec::with_capacity(config.users * config.total_antennas() * config.modes);
        for j in 1..=config.users {
            for id in config.antenna_ids() {
                for mode in 1..=config.modes {
                    let v = f(j, id, mode);
                    if v.is_zero() {
                        return Err(BiaError::domain(format!(
                            "channel coefficient h_{{{j},{id}}}({mode}) is zero"
                        )));
                    }
                    coeffs.push(v);
                }
            }
        }
        Ok(ChannelRealization { config, coeffs })
    }

    /// Unit channel: every coefficient equal to one.
    pub fn unit(config: SystemConfig) -> Self {
        Self::from_fn(config, |_, _, _| BigRational::from_integer(1.into()))
            .expect("unit coefficients are nonzero")
    }

    pub fn config(&self) -> SystemConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn offset(&self, receiver: usize, antenna: AntennaId, mode: usize) -> usize {
        let c = &self.config;
        ((receiver - 1) * c.total_antennas() + c.flat_index(antenna)) * c.modes + (mode - 1)
    }

    pub fn coeff(&self, receiver: usize, antenna: AntennaId, mode: usize) -> &BigRational {
        &self.coeffs[self.offset(receiver, antenna, mode)]
    }

    /// Replaces one coefficient; the new value must be nonzero.
    pub fn set_coeff(
        &mut self,
        receiver: usize,
        antenna: AntennaId,
        mode: usize,
        value: BigRational,
    ) -> Result<()> {
        if value.is_zero() {
            return Err(BiaError::domain("channel coefficients must be nonzero"));
        }
        let at = self.offset(receiver, antenna, mode);
        self.coeffs[at] = value;
        Ok(())
    }
}

/// The `m × d_{i(a)}` block `H_{j,i(a)} V_{i(a)}` seen by `receiver` from `antenna`.
pub fn effective_columns(
    scheme: &Scheme,
    channel: &ChannelRealization,
    receiver: usize,
    antenna: AntennaId,
) -> Result<RatMatrix> {
    let cfg = scheme.config;
    if receiver == 0 || receiver > cfg.users {
        return Err(BiaError::domain(format!("receiver {receiver} outside [1:{}]", cfg.users)));
    }
    if !cfg.contains(antenna) {
        return Err(BiaError::domain(format!("antenna {antenna} not in the network")));
    }
    let m = scheme.extension;
    let pattern = scheme.pattern(receiver);
    if pattern.len() != m {
        return Err(BiaError::InvalidScheme(format!(
            "pattern of receiver {receiver} has length {}, expected {m}",
            pattern.len()
        )));
    }
    for (t, &mode) in pattern.iter().enumerate() {
        if mode == 0 || mode > cfg.modes {
            return Err(BiaError::PatternOutOfRange {
                receiver,
                slot: t + 1,
                mode,
                modes: cfg.modes,
            });
        }
    }
    let cols = scheme.columns(antenna);
    let mut out = RatMatrix::zeros(m, cols.len());
    for (d, col) in cols.iter().enumerate() {
        if col.len() != m {
            return Err(BiaError::InvalidScheme(format!(
                "column {antenna},{} has length {}, expected {m}",
                d + 1,
                col.len()
            )));
        }
        for (t, &v) in col.iter().enumerate() {
            if v != 0 {
                let h = channel.coeff(receiver, antenna, pattern[t]);
                out.set(t, d, h * BigRational::from_integer(v.into()));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::golden_example;
    use num_bigint::BigInt;

    fn q(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn antenna_keys_round_trip_and_order() {
        let a: AntennaId = "10(2)".parse().unwrap();
        assert_eq!(a, AntennaId::new(10, 2));
        assert_eq!(a.to_string(), "10(2)");
        assert!(AntennaId::new(1, 2) < AntennaId::new(2, 1));
        assert!("1(0)".parse::<AntennaId>().is_err());
        assert!("x(1)".parse::<AntennaId>().is_err());
        assert!("12".parse::<AntennaId>().is_err());
    }

    #[test]
    fn config_rejects_single_user() {
        assert!(SystemConfig::new(1, 2, 1).is_err());
        assert!(SystemConfig::new(0, 2, 3).is_err());
        let cfg = SystemConfig::new(2, 3, 6).unwrap();
        let ids: Vec<_> = cfg.antenna_ids().collect();
        assert_eq!(ids.len(), 12);
        assert_eq!(ids[3], AntennaId::new(2, 2));
        assert_eq!(cfg.flat_index(ids[7]), 7);
        assert_eq!(cfg.antenna_at(7), ids[7]);
    }

    #[test]
    fn unit_channel_leaves_beamforming_unchanged() {
        let s = golden_example("ex3").unwrap();
        let h = ChannelRealization::unit(s.config);
        let block = effective_columns(&s, &h, 1, AntennaId::new(1, 1)).unwrap();
        assert_eq!(block.shape(), (3, 1));
        let col: Vec<_> = (0..3).map(|t| block.get(t, 0).clone()).collect();
        assert_eq!(col, vec![q(1), q(1), q(0)]);
    }

    #[test]
    fn effective_columns_scale_by_mode_coefficients() {
        let s = golden_example("ex3").unwrap();
        let mut h = ChannelRealization::unit(s.config);
        let a11 = AntennaId::new(1, 1);
        h.set_coeff(1, a11, 1, q(2)).unwrap();
        h.set_coeff(1, a11, 2, q(3)).unwrap();
        let block = effective_columns(&s, &h, 1, a11).unwrap();
        let col: Vec<_> = (0..3).map(|t| block.get(t, 0).clone()).collect();
        assert_eq!(col, vec![q(2), q(3), q(0)]);
    }

    #[test]
    fn silent_antenna_gives_empty_block() {
        let cfg = SystemConfig::new(1, 2, 3).unwrap();
        let s = Scheme::silent(cfg, 5);
        let h = ChannelRealization::unit(cfg);
        let block = effective_columns(&s, &h, 2, AntennaId::new(3, 1)).unwrap();
        assert_eq!(block.shape(), (5, 0));
    }

    #[test]
    fn out_of_range_pattern_is_an_error() {
        let mut s = golden_example("ex3").unwrap();
        s.patterns[0][1] = 3;
        let h = ChannelRealization::unit(s.config);
        let err = effective_columns(&s, &h, 1, AntennaId::new(1, 1)).unwrap_err();
        assert!(matches!(err, BiaError::PatternOutOfRange { receiver: 1, slot: 2, mode: 3, .. }));
    }

    #[test]
    fn zero_coefficients_are_rejected() {
        let cfg = SystemConfig::new(1, 2, 3).unwrap();
        assert_eq!(ChannelRealization::unit(cfg).len(), 18);
        assert!(ChannelRealization::from_fn(cfg, |j, _, _| q(j as i64 - 1)).is_err());
    }

    #[test]
    fn golden_schemes_validate() {
        for name in ["ex3", "ex4"] {
            assert_eq!(validate_scheme(&golden_example(name).unwrap()), vec![]);
        }
    }

    #[test]
    fn pattern_out_of_range_is_reported() {
        let mut s = golden_example("ex4").unwrap();
        s.patterns[1][4] = 3;
        let v = validate_scheme(&s);
        assert_eq!(
            v,
            vec![Violation::PatternOutOfRange {
                receiver: 2,
                slot: 5,
                mode: 3
            }]
        );
        assert_eq!(v[0].code(), "PATTERN_OUT_OF_RANGE");
    }

    #[test]
    fn duplicate_membership_is_reported() {
        let mut s = golden_example("ex4").unwrap();
        let sym = SymbolId::new(AntennaId::new(1, 1), 1);
        s.sets[0].members.push(sym);
        s.sets[0].transmitters.insert(1);
        let v = validate_scheme(&s);
        assert!(v.iter().any(|x| x.code() == "DUPLICATE_SET_MEMBERSHIP"), "{v:?}");
    }
}
