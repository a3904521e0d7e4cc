//! Scheme documents: a JSON file with one beamforming column or pattern per
//! line, so fixtures diff cleanly.
//!
//! ```text
//! {
//!   "version": 1,
//!   "config": {"M": 1, "N": 2, "K": 4},
//!   "m": 3,
//!   "beamforming": {
//!     "1(1)": [[1,1,0]],
//!     ...
//!   },
//!   "patterns": {
//!     "1": [1,2,1],
//!     ...
//!   },
//!   "sets": [
//!     {"transmitters": [1,2], "members": [{"antenna": "1(1)", "symbol": 1}, ...]},
//!     ...
//!   ]
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};

use serde_json::{Map, Value};

use crate::error::{BiaError, Result};
use crate::model::{AlignmentSet, AntennaId, Scheme, SymbolId, SystemConfig};

pub const SCHEMA_VERSION: u64 = 1;

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Canonical text: every antenna of the configuration in network order (silent
/// ones with `[]`), receivers in numeric order, sets in scheme order.
pub fn save(scheme: &Scheme) -> String {
    let cfg = scheme.config;
    let mut beams: BTreeMap<AntennaId, &[Vec<u8>]> =
        cfg.antenna_ids().map(|id| (id, &[][..])).collect();
    for (id, cols) in &scheme.beamforming {
        beams.insert(*id, cols.as_slice());
    }

    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"version\": {SCHEMA_VERSION},\n"));
    out.push_str(&format!(
        "  \"config\": {{\"M\": {}, \"N\": {}, \"K\": {}}},\n",
        cfg.antennas, cfg.modes, cfg.users
    ));
    out.push_str(&format!("  \"m\": {},\n", scheme.extension));

    out.push_str("  \"beamforming\": {\n");
    let n = beams.len();
    for (k, (id, cols)) in beams.iter().enumerate() {
        let cols = join(cols.iter().map(|c| format!("[{}]", join(c))));
        let comma = if k + 1 < n { "," } else { "" };
        out.push_str(&format!("    \"{id}\": [{cols}]{comma}\n"));
    }
    out.push_str("  },\n");

    out.push_str("  \"patterns\": {\n");
    let n = scheme.patterns.len();
    for (j, p) in scheme.patterns.iter().enumerate() {
        let comma = if j + 1 < n { "," } else { "" };
        out.push_str(&format!("    \"{}\": [{}]{comma}\n", j + 1, join(p)));
    }
    out.push_str("  },\n");

    if scheme.sets.is_empty() {
        out.push_str("  \"sets\": []\n");
    } else {
        out.push_str("  \"sets\": [\n");
        let n = scheme.sets.len();
        for (s, set) in scheme.sets.iter().enumerate() {
            let members: Vec<String> = set
                .members
                .iter()
                .map(|m| format!("{{\"antenna\": \"{}\", \"symbol\": {}}}", m.antenna, m.index))
                .collect();
            let members = members.join(", ");
            let comma = if s + 1 < n { "," } else { "" };
            out.push_str(&format!(
                "    {{\"transmitters\": [{}], \"members\": [{members}]}}{comma}\n",
                join(&set.transmitters)
            ));
        }
        out.push_str("  ]\n");
    }
    out.push_str("}\n");
    out
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    /// Line of the first occurrence of `"key"`, or 1 when absent.
    fn line_of(&self, key: &str) -> usize {
        let needle = format!("\"{key}\"");
        self.text
            .find(&needle)
            .map(|at| self.text[..at].matches('\n').count() + 1)
            .unwrap_or(1)
    }

    fn err(&self, key: &str, field: impl Into<String>, message: impl Into<String>) -> BiaError {
        BiaError::Parse {
            line: self.line_of(key),
            field: field.into(),
            message: message.into(),
        }
    }

    fn get<'v>(&self, obj: &'v Map<String, Value>, key: &str, path: &str) -> Result<&'v Value> {
        obj.get(key)
            .ok_or_else(|| self.err(path.rsplit('.').next().unwrap_or(key), path, "missing field"))
    }

    fn uint(&self, v: &Value, key: &str, path: &str) -> Result<usize> {
        v.as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| self.err(key, path, "expected a non-negative integer"))
    }

    fn array<'v>(&self, v: &'v Value, key: &str, path: &str) -> Result<&'v Vec<Value>> {
        v.as_array()
            .ok_or_else(|| self.err(key, path, "expected an array"))
    }

    fn object<'v>(&self, v: &'v Value, key: &str, path: &str) -> Result<&'v Map<String, Value>> {
        v.as_object()
            .ok_or_else(|| self.err(key, path, "expected an object"))
    }
}

/// Parses a scheme document. Only the document shape is checked here; use
/// [`validate_scheme`](crate::model::validate_scheme) for scheme invariants.
pub fn load(text: &str) -> Result<Scheme> {
    let root: Value = serde_json::from_str(text).map_err(|e| BiaError::Parse {
        line: e.line(),
        field: String::new(),
        message: e.to_string(),
    })?;
    let cx = Ctx { text };
    let root = root
        .as_object()
        .ok_or_else(|| cx.err("", "<root>", "expected an object"))?;

    let version = cx.get(root, "version", "version")?;
    let version = version
        .as_u64()
        .ok_or_else(|| cx.err("version", "version", "expected an integer"))?;
    if version != SCHEMA_VERSION {
        return Err(BiaError::SchemaVersionMismatch {
            found: version,
            expected: SCHEMA_VERSION,
        });
    }

    let config = cx.object(cx.get(root, "config", "config")?, "config", "config")?;
    let m_ant = cx.uint(cx.get(config, "M", "config.M")?, "M", "config.M")?;
    let n_modes = cx.uint(cx.get(config, "N", "config.N")?, "N", "config.N")?;
    let k_users = cx.uint(cx.get(config, "K", "config.K")?, "K", "config.K")?;
    let config = SystemConfig::new(m_ant, n_modes, k_users)
        .map_err(|e| cx.err("config", "config", e.to_string()))?;

    let extension = cx.uint(cx.get(root, "m", "m")?, "m", "m")?;

    let beams = cx.object(cx.get(root, "beamforming", "beamforming")?, "beamforming", "beamforming")?;
    let mut beamforming = BTreeMap::new();
    for (key, cols) in beams {
        let path = format!("beamforming.{key}");
        let id: AntennaId = key.parse().map_err(|e: String| cx.err(key, &path, e))?;
        let mut parsed = Vec::new();
        for (d, col) in cx.array(cols, key, &path)?.iter().enumerate() {
            let cpath = format!("{path}[{d}]");
            let entries = cx.array(col, key, &cpath)?;
            let mut c = Vec::with_capacity(entries.len());
            for v in entries {
                let x = v
                    .as_u64()
                    .filter(|&x| x <= u8::MAX as u64)
                    .ok_or_else(|| cx.err(key, &cpath, "expected entries in 0..=255"))?;
                c.push(x as u8);
            }
            parsed.push(c);
        }
        if beamforming.insert(id, parsed).is_some() {
            return Err(cx.err(key, &path, "duplicate antenna"));
        }
    }

    let pats = cx.object(cx.get(root, "patterns", "patterns")?, "patterns", "patterns")?;
    let mut by_receiver = BTreeMap::new();
    for (key, p) in pats {
        let path = format!("patterns.{key}");
        let j: usize = key
            .parse()
            .ok()
            .filter(|&j| j >= 1)
            .ok_or_else(|| cx.err(key, &path, "receiver keys must be positive integers"))?;
        let mut seq = Vec::new();
        for v in cx.array(p, key, &path)? {
            seq.push(cx.uint(v, key, &path)?);
        }
        by_receiver.insert(j, seq);
    }
    let expected: Vec<usize> = (1..=by_receiver.len()).collect();
    if by_receiver.keys().copied().collect::<Vec<_>>() != expected {
        return Err(cx.err("patterns", "patterns", "receivers must be numbered 1..K without gaps"));
    }
    let patterns: Vec<Vec<usize>> = by_receiver.into_values().collect();

    let sets_v = cx.array(cx.get(root, "sets", "sets")?, "sets", "sets")?;
    let mut sets = Vec::new();
    for (s, set) in sets_v.iter().enumerate() {
        let path = format!("sets[{s}]");
        let obj = cx.object(set, "sets", &path)?;
        let tpath = format!("{path}.transmitters");
        let mut transmitters = BTreeSet::new();
        for t in cx.array(cx.get(obj, "transmitters", &tpath)?, "transmitters", &tpath)? {
            transmitters.insert(cx.uint(t, "transmitters", &tpath)?);
        }
        let mpath = format!("{path}.members");
        let mut members = Vec::new();
        for (k, mem) in cx.array(cx.get(obj, "members", &mpath)?, "members", &mpath)?.iter().enumerate() {
            let epath = format!("{mpath}[{k}]");
            let mem = cx.object(mem, "members", &epath)?;
            let apath = format!("{epath}.antenna");
            let antenna: AntennaId = cx
                .get(mem, "antenna", &apath)?
                .as_str()
                .ok_or_else(|| cx.err("antenna", &apath, "expected a string"))?
                .parse()
                .map_err(|e: String| cx.err("antenna", &apath, e))?;
            let spath = format!("{epath}.symbol");
            let index = cx.uint(cx.get(mem, "symbol", &spath)?, "symbol", &spath)?;
            members.push(SymbolId::new(antenna, index));
        }
        sets.push(AlignmentSet {
            transmitters,
            members,
        });
    }

    Ok(Scheme {
        config,
        extension,
        beamforming,
        patterns,
        sets,
    })
}
