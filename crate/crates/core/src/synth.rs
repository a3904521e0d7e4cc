//! Scheme synthesis: beamforming columns and preset-mode patterns that realize
//! an alignment-set partition, plus the two hand-written reference schemes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::alignment::{tuple_rank, tuples};
use crate::bounds::optimal_preset_modes;
use crate::error::{BiaError, Result};
use crate::model::{AlignmentSet, AntennaId, BeamColumn, Scheme, SymbolId, SystemConfig};

/// Which construction [`synthesize`] picks for a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// `n* = 1`: one symbol per user, round robin.
    Tdma,
    /// Groups of `n*/M` transmitters, each set using every antenna of its group.
    FullGroups,
    /// Groups of `⌈n*/M⌉` transmitters, each set using `n*` of the group's antennas.
    Grouped,
    /// Single-antenna transmitters, pairs of neighbours on an odd cycle.
    CirculantSiso,
}

impl Route {
    pub fn label(&self) -> &'static str {
        match self {
            Route::Tdma => "tdma",
            Route::FullGroups => "full-groups",
            Route::Grouped => "grouped",
            Route::CirculantSiso => "circulant",
        }
    }
}

/// Slot layout of the grouped supersymbol: a first block indexed by tuples
/// `t ∈ [1:q]^R₂` (`q = n*-1`), then one segment per group indexed by
/// `ℓ ∈ [1:q]^{R₂-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupersymbolLayout {
    pub group_size: usize,
    pub groups: usize,
    pub n_star: usize,
}

impl SupersymbolLayout {
    fn q(&self) -> usize {
        self.n_star - 1
    }

    pub fn block1_len(&self) -> usize {
        self.q().pow(self.groups as u32)
    }

    pub fn segment_len(&self) -> usize {
        self.q().pow(self.groups as u32 - 1)
    }

    /// `m = q^R₂ + R₂ q^{R₂-1}`.
    pub fn extension(&self) -> usize {
        self.block1_len() + self.groups * self.segment_len()
    }

    /// 0-based slot of block-1 tuple `t`.
    pub fn block1_slot(&self, t: &[usize]) -> usize {
        tuple_rank(t, self.q())
    }

    /// 0-based slot of segment `g` (1-based), entry `ℓ`.
    pub fn segment_slot(&self, g: usize, l: &[usize]) -> usize {
        self.block1_len() + (g - 1) * self.segment_len() + tuple_rank(l, self.q())
    }
}

fn column(m: usize, support: &[usize]) -> BeamColumn {
    let mut c = vec![0u8; m];
    for &t in support {
        c[t] = 1;
    }
    c
}

/// Adds a symbol with the given column to `antenna` and returns its id.
fn push_symbol(scheme: &mut Scheme, antenna: AntennaId, col: BeamColumn) -> SymbolId {
    let cols = scheme.beamforming.entry(antenna).or_default();
    cols.push(col);
    SymbolId::new(antenna, cols.len())
}

/// One symbol per user from its first antenna, user `i` alone in slot `i`.
pub fn synthesize_tdma(config: SystemConfig) -> Scheme {
    let k = config.users;
    let mut scheme = Scheme::silent(config, k);
    for i in 1..=k {
        let sym = push_symbol(&mut scheme, AntennaId::new(i, 1), column(k, &[i - 1]));
        scheme.sets.push(AlignmentSet::from_members(vec![sym]));
    }
    scheme
}

fn grouped_supersymbol(config: SystemConfig, n: usize) -> Scheme {
    let m_ant = config.antennas;
    let group_size = n.div_ceil(m_ant);
    let layout = SupersymbolLayout {
        group_size,
        groups: config.users / group_size,
        n_star: n,
    };
    let (q, r2) = (layout.q(), layout.groups);
    let m = layout.extension();
    let mut scheme = Scheme::silent(config, m);
    let block1 = tuples(q, r2);
    let others = tuples(q, r2 - 1);

    for g in 1..=r2 {
        let antennas: Vec<AntennaId> = ((g - 1) * group_size + 1..=g * group_size)
            .flat_map(|i| (1..=m_ant).map(move |a| AntennaId::new(i, a)))
            .collect();
        let width = antennas.len();
        for (s, l) in others.iter().enumerate() {
            let mut support: Vec<usize> = block1
                .iter()
                .filter(|t| {
                    let mut rest = t.to_vec();
                    rest.remove(g - 1);
                    rest == *l
                })
                .map(|t| layout.block1_slot(t))
                .collect();
            support.push(layout.segment_slot(g, l));
            let col = column(m, &support);
            let mut chosen: Vec<AntennaId> = (0..n).map(|r| antennas[(s * n + r) % width]).collect();
            chosen.sort();
            let members = chosen
                .into_iter()
                .map(|id| push_symbol(&mut scheme, id, col.clone()))
                .collect();
            scheme.sets.push(AlignmentSet::from_members(members));
        }
    }

    for j in 1..=config.users {
        let g = (j - 1) / group_size + 1;
        let pattern = &mut scheme.patterns[j - 1];
        for t in &block1 {
            pattern[layout.block1_slot(t)] = t[g - 1];
        }
        for h in 1..=r2 {
            for l in &others {
                let mode = if h == g {
                    n
                } else {
                    // position of g's coordinate once h's has been removed
                    l[if g < h { g - 1 } else { g - 2 }]
                };
                pattern[layout.segment_slot(h, l)] = mode;
            }
        }
    }
    scheme
}

/// Supersymbol construction for `n*/M` and `MK/n*` both integral.
///
/// Group `g` holds transmitters `(g-1)R₁+1 ..= gR₁`. Set `(g, ℓ)` takes one
/// symbol from each antenna of the group; its column covers the block-1 tuples
/// that agree with `ℓ` off coordinate `g`, plus slot `ℓ` of segment `g`.
/// Receivers of group `g` use mode `t_g` on block-1 tuple `t`, mode `n*` on
/// their own segment and mode `ℓ_g` on slot `ℓ` of any other segment.
pub fn synthesize_full_groups(config: SystemConfig) -> Result<Scheme> {
    let n = optimal_preset_modes(config)?.n_star;
    if n == 1 {
        return Ok(synthesize_tdma(config));
    }
    let total = config.total_antennas();
    if n % config.antennas != 0 || total % n != 0 {
        let show = |a: usize, b: usize| {
            if a % b == 0 {
                (a / b).to_string()
            } else {
                format!("{a}/{b}")
            }
        };
        return Err(BiaError::NotIntegerCase {
            r1: show(n, config.antennas),
            r2: show(total, n),
        });
    }
    Ok(grouped_supersymbol(config, n))
}

/// The same supersymbol with groups of `⌈n*/M⌉` transmitters when that divides
/// `K`; each set takes `n*` of the group's antennas, rotating so every antenna
/// is used equally often when the counts allow.
pub fn synthesize_grouped(config: SystemConfig) -> Result<Scheme> {
    let n = optimal_preset_modes(config)?.n_star;
    if n == 1 {
        return Ok(synthesize_tdma(config));
    }
    let group_size = n.div_ceil(config.antennas);
    if config.users % group_size != 0 {
        return Err(BiaError::UnsupportedConfig {
            m: config.antennas,
            n: config.modes,
            k: config.users,
        });
    }
    Ok(grouped_supersymbol(config, n))
}

/// Slot supports (0-based) of `A_j = {v_{j,2}, v_{j+1,1}}` over `K + 2` slots.
fn circulant_supports(k: usize) -> Vec<Vec<usize>> {
    (1..=k)
        .map(|j| match j {
            1 => vec![0, 1, 2],
            _ if j == k => vec![0, 3],
            2 => vec![1, 4],
            3 => vec![2, 5],
            _ => vec![j, j + 2],
        })
        .collect()
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut x = x;
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a] = b;
        }
    }
}

/// Mode pattern of receiver `r`: slots tied together by any foreign set share
/// a mode; the two slots of each owned pair differ; the three-slot set splits
/// as `{1,2}|{3}` at receiver 1 and `{2,3}|{1}` at receiver 2.
fn circulant_pattern(k: usize, supports: &[Vec<usize>], r: usize) -> Result<Vec<usize>> {
    let m = k + 2;
    let owns = |j: usize| j == r || j % k + 1 == r;
    let mut dsu = Dsu((0..m).collect());
    for (idx, sup) in supports.iter().enumerate() {
        if !owns(idx + 1) {
            for &t in &sup[1..] {
                dsu.union(sup[0], t);
            }
        }
    }
    let mut differ: Vec<(usize, usize)> = Vec::new();
    for (idx, sup) in supports.iter().enumerate() {
        if owns(idx + 1) && sup.len() == 2 {
            differ.push((sup[0], sup[1]));
        }
    }
    match r {
        1 => {
            dsu.union(0, 1);
            differ.push((0, 2));
        }
        2 => {
            dsu.union(1, 2);
            differ.push((1, 0));
        }
        _ => {}
    }
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &differ {
        let (a, b) = (dsu.find(a), dsu.find(b));
        if a == b {
            return Err(BiaError::InvalidScheme(format!(
                "receiver {r}: owned slots forced into one mode"
            )));
        }
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut colour: BTreeMap<usize, usize> = BTreeMap::new();
    let mut roots: Vec<usize> = vec![dsu.find(0)];
    roots.extend((0..m).map(|t| dsu.find(t)));
    for root in roots {
        if colour.contains_key(&root) {
            continue;
        }
        colour.insert(root, 1);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let cx = colour[&x];
            for &y in adj.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                match colour.get(&y) {
                    Some(&cy) if cy == cx => {
                        return Err(BiaError::InvalidScheme(format!(
                            "receiver {r}: mode constraints are not two-colourable"
                        )))
                    }
                    Some(_) => {}
                    None => {
                        colour.insert(y, 3 - cx);
                        queue.push_back(y);
                    }
                }
            }
        }
    }
    Ok((0..m).map(|t| colour[&dsu.find(t)]).collect())
}

/// Odd `K ≥ 3` single-antenna users with two symbols each over `K + 2` slots.
/// Set `j` pairs the second symbol of user `j` with the first of user `j+1`.
pub fn synthesize_circulant_siso(users: usize, modes: usize) -> Result<Scheme> {
    if users < 3 || users % 2 == 0 {
        return Err(BiaError::domain(format!(
            "the circulant construction needs an odd number of users ≥ 3, got {users}"
        )));
    }
    if modes < 2 {
        return Err(BiaError::domain("the circulant construction needs at least 2 modes"));
    }
    let k = users;
    let m = k + 2;
    let config = SystemConfig::new(1, modes, k)?;
    let supports = circulant_supports(k);
    let mut scheme = Scheme::silent(config, m);
    for i in 1..=k {
        // symbol 1 of user i lives in set i-1, symbol 2 in set i
        let prev = if i == 1 { k } else { i - 1 };
        let cols = vec![column(m, &supports[prev - 1]), column(m, &supports[i - 1])];
        scheme.beamforming.insert(AntennaId::new(i, 1), cols);
    }
    for j in 1..=k {
        let next = j % k + 1;
        scheme.sets.push(AlignmentSet::from_members(vec![
            SymbolId::new(AntennaId::new(j, 1), 2),
            SymbolId::new(AntennaId::new(next, 1), 1),
        ]));
    }
    for r in 1..=k {
        scheme.patterns[r - 1] = circulant_pattern(k, &supports, r)?;
    }
    Ok(scheme)
}

fn bits(s: &str) -> Vec<u8> {
    s.bytes().map(|b| b - b'0').collect()
}

fn modes(s: &str) -> Vec<usize> {
    s.bytes().map(|b| (b - b'0') as usize).collect()
}

/// Hand-transcribed reference schemes: `ex3` for four single-antenna users over
/// three slots, `ex4` for five users over seven slots.
pub fn golden_example(name: &str) -> Result<Scheme> {
    let a = |i| AntennaId::new(i, 1);
    let s = |i, d| SymbolId::new(a(i), d);
    match name {
        "ex3" => {
            let config = SystemConfig::new(1, 2, 4)?;
            let mut scheme = Scheme::silent(config, 3);
            for (i, v) in [(1, "110"), (2, "110"), (3, "101"), (4, "101")] {
                scheme.beamforming.insert(a(i), vec![bits(v)]);
            }
            scheme.patterns = ["121", "121", "112", "112"].iter().map(|p| modes(p)).collect();
            scheme.sets = vec![
                AlignmentSet::from_members(vec![s(1, 1), s(2, 1)]),
                AlignmentSet::from_members(vec![s(3, 1), s(4, 1)]),
            ];
            Ok(scheme)
        }
        "ex4" => {
            let config = SystemConfig::new(1, 2, 5)?;
            let mut scheme = Scheme::silent(config, 7);
            let cols = [
                (1, ["1001000", "1110000"]),
                (2, ["1110000", "0100100"]),
                (3, ["0100100", "0010010"]),
                (4, ["0010010", "0000101"]),
                (5, ["0000101", "1001000"]),
            ];
            for (i, [v1, v2]) in cols {
                scheme.beamforming.insert(a(i), vec![bits(v1), bits(v2)]);
            }
            scheme.patterns = ["1122121", "1221121", "1111222", "1111122", "1112112"]
                .iter()
                .map(|p| modes(p))
                .collect();
            scheme.sets = vec![
                AlignmentSet::from_members(vec![s(1, 2), s(2, 1)]),
                AlignmentSet::from_members(vec![s(2, 2), s(3, 1)]),
                AlignmentSet::from_members(vec![s(3, 2), s(4, 1)]),
                AlignmentSet::from_members(vec![s(4, 2), s(5, 1)]),
                AlignmentSet::from_members(vec![s(5, 2), s(1, 1)]),
            ];
            Ok(scheme)
        }
        other => Err(BiaError::UnknownName(other.to_string())),
    }
}

/// The construction [`synthesize`] would use, without building it.
pub fn route(config: SystemConfig) -> Result<Route> {
    let n = optimal_preset_modes(config)?.n_star;
    if n == 1 {
        return Ok(Route::Tdma);
    }
    let group_size = n.div_ceil(config.antennas);
    if config.users % group_size == 0 {
        return Ok(if n % config.antennas == 0 {
            Route::FullGroups
        } else {
            Route::Grouped
        });
    }
    if config.antennas == 1 && n == 2 && config.users % 2 == 1 {
        return Ok(Route::CirculantSiso);
    }
    Err(BiaError::UnsupportedConfig {
        m: config.antennas,
        n: config.modes,
        k: config.users,
    })
}

/// Builds a scheme meeting the bound at `n*`, or reports that no construction applies.
pub fn synthesize(config: SystemConfig) -> Result<Scheme> {
    match route(config)? {
        Route::Tdma => Ok(synthesize_tdma(config)),
        Route::FullGroups => synthesize_full_groups(config),
        Route::Grouped => synthesize_grouped(config),
        Route::CirculantSiso => synthesize_circulant_siso(config.users, config.modes),
    }
}

/// A relabeling-invariant summary of a scheme: slots are described by their
/// receiver modes and active antennas, symbols by the slot descriptions they
/// cover. Two schemes that differ only by a permutation of slots or of symbol
/// indices within an antenna have equal signatures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeSignature {
    config: SystemConfig,
    extension: usize,
    slots: Vec<SlotKey>,
    antennas: BTreeMap<AntennaId, Vec<Vec<SlotKey>>>,
    sets: Vec<(Vec<usize>, Vec<(AntennaId, Vec<SlotKey>)>)>,
}

type SlotKey = (Vec<usize>, Vec<AntennaId>);

pub fn signature(scheme: &Scheme) -> SchemeSignature {
    let m = scheme.extension;
    let keys: Vec<SlotKey> = (0..m)
        .map(|t| {
            let modes = scheme.patterns.iter().map(|p| p.get(t).copied().unwrap_or(0)).collect();
            let mut active = Vec::new();
            for (id, cols) in &scheme.beamforming {
                for c in cols {
                    if c.get(t).copied().unwrap_or(0) != 0 {
                        active.push(*id);
                    }
                }
            }
            (modes, active)
        })
        .collect();
    let support = |c: &BeamColumn| -> Vec<SlotKey> {
        let mut v: Vec<SlotKey> = (0..m)
            .filter(|&t| c.get(t).copied().unwrap_or(0) != 0)
            .map(|t| keys[t].clone())
            .collect();
        v.sort();
        v
    };
    let antennas = scheme
        .beamforming
        .iter()
        .map(|(id, cols)| {
            let mut v: Vec<Vec<SlotKey>> = cols.iter().map(support).collect();
            v.sort();
            (*id, v)
        })
        .collect();
    let mut sets: Vec<(Vec<usize>, Vec<(AntennaId, Vec<SlotKey>)>)> = scheme
        .sets
        .iter()
        .map(|s| {
            let mut members: Vec<(AntennaId, Vec<SlotKey>)> = s
                .members
                .iter()
                .map(|m| (m.antenna, scheme.column(*m).map(support).unwrap_or_default()))
                .collect();
            members.sort();
            (s.transmitters.iter().copied().collect(), members)
        })
        .collect();
    sets.sort();
    let mut slots = keys;
    slots.sort();
    SchemeSignature {
        config: scheme.config,
        extension: m,
        slots,
        antennas,
        sets,
    }
}

/// Whether two schemes agree up to slot order and symbol numbering.
pub fn equivalent_up_to_relabeling(a: &Scheme, b: &Scheme) -> bool {
    signature(a) == signature(b)
}

/// Slots covered by each alignment set, for structural checks.
pub fn set_supports(scheme: &Scheme) -> Vec<BTreeSet<usize>> {
    scheme
        .sets
        .iter()
        .map(|s| {
            s.members
                .iter()
                .filter_map(|m| scheme.column(*m))
                .flat_map(|c| c.iter().enumerate().filter(|(_, &v)| v != 0).map(|(t, _)| t))
                .collect()
        })
        .collect()
}
