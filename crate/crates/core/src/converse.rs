//! Counting machinery behind the upper bound: per-set efficiency, the
//! multiset oracle for alignment-set cardinalities, and the converse
//! inequalities written out as an explicit linear program.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};

use crate::bounds::optimal_preset_modes;
use crate::error::{BiaError, Result};
use crate::lp::{LinearProgram, LpSolution};
use crate::model::{AntennaId, SystemConfig};

/// Dimensions a cardinality-`n` alignment set takes up: `f` desired, `h` interfering,
/// summed over all receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EfficiencyPair {
    pub f: usize,
    pub h: usize,
}

pub fn alignment_efficiency(antennas: usize, users: usize, n: usize) -> Result<EfficiencyPair> {
    if antennas == 0 || users == 0 {
        return Err(BiaError::domain("M and K must be at least 1"));
    }
    if n == 0 || n > antennas * users {
        return Err(BiaError::domain(format!(
            "cardinality {n} outside [1:{}]",
            antennas * users
        )));
    }
    let groups = n.div_ceil(antennas);
    Ok(EfficiencyPair {
        f: n,
        h: (groups - 1) * n + users - groups,
    })
}

/// `K·Σf / (Σf + Σh)` for a multiset of set cardinalities; 0 when empty.
pub fn bound_for_cardinalities(antennas: usize, users: usize, cards: &[usize]) -> Result<Rational64> {
    let (mut f, mut h) = (0i64, 0i64);
    for &n in cards {
        let e = alignment_efficiency(antennas, users, n)?;
        f += e.f as i64;
        h += e.h as i64;
    }
    if f == 0 {
        return Ok(Rational64::zero());
    }
    Ok(Rational64::new(users as i64 * f, f + h))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricCheck {
    pub best_multiset: Vec<usize>,
    pub best_value: Rational64,
    /// Uniform value at the closed-form `n*`.
    pub symmetric_value: Rational64,
    pub symmetric_is_max: bool,
}

fn for_each_multiset(max_card: usize, size: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(cur: &mut Vec<usize>, lo: usize, max_card: usize, size: usize, f: &mut impl FnMut(&[usize])) {
        if cur.len() == size {
            f(cur);
            return;
        }
        for c in lo..=max_card {
            cur.push(c);
            rec(cur, c, max_card, size, f);
            cur.pop();
        }
    }
    rec(&mut Vec::with_capacity(size), 1, max_card, size, f);
}

/// Enumerates every multiset of cardinalities in `[1:min(N, MK)]` with at most
/// `max_sets` elements and compares the best with the uniform multiset at `n*`.
/// Among maximizers the last one in (size, lexicographic) order is reported.
pub fn check_symmetric_optimality(config: SystemConfig, max_sets: usize) -> Result<SymmetricCheck> {
    if max_sets == 0 {
        return Err(BiaError::domain("max_sets must be at least 1"));
    }
    let (m, k) = (config.antennas, config.users);
    let max_card = config.modes.min(config.total_antennas());
    let mut best: Option<(Vec<usize>, Rational64)> = None;
    for size in 1..=max_sets {
        for_each_multiset(max_card, size, &mut |ms| {
            let v = bound_for_cardinalities(m, k, ms).expect("cardinalities in range");
            if best.as_ref().is_none_or(|(_, b)| v >= *b) {
                best = Some((ms.to_vec(), v));
            }
        });
    }
    let (best_multiset, best_value) = best.expect("at least one multiset");
    let n_star = optimal_preset_modes(config)?.n_star;
    let symmetric_value = bound_for_cardinalities(m, k, &[n_star])?;
    Ok(SymmetricCheck {
        best_multiset,
        best_value,
        symmetric_value,
        symmetric_is_max: symmetric_value == best_value,
    })
}

pub const DEFAULT_SUBSET_BUDGET: u128 = 1_000_000;

/// The converse inequalities for alignment sets of one cardinality `n`, with the
/// extension length normalized to one.
///
/// Variables are `d_{i(a)}` (fraction of dimensions carried by antenna `i(a)`)
/// followed by `x_T` for every `n`-subset `T` of antennas (dimensions in which
/// exactly the antennas of `T` are aligned).
#[derive(Debug, Clone)]
pub struct ConverseLp {
    pub config: SystemConfig,
    pub n: usize,
    pub antennas: Vec<AntennaId>,
    pub subsets: Vec<Vec<usize>>,
    pub program: LinearProgram,
    pub names: Vec<String>,
    pub row_names: Vec<String>,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

fn subsets_of(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - (k - cur.len()) {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn build_converse_lp(config: SystemConfig, n: usize) -> Result<ConverseLp> {
    build_converse_lp_with_budget(config, n, DEFAULT_SUBSET_BUDGET)
}

pub fn build_converse_lp_with_budget(config: SystemConfig, n: usize, budget: u128) -> Result<ConverseLp> {
    let total = config.total_antennas();
    let n_max = config.modes.min(total);
    if n == 0 || n > n_max {
        return Err(BiaError::domain(format!("n={n} outside [1:{n_max}]")));
    }
    let count = binomial(total, n);
    if count > budget {
        return Err(BiaError::BudgetExceeded {
            requested: count,
            budget,
        });
    }
    let antennas: Vec<AntennaId> = config.antenna_ids().collect();
    let subsets = subsets_of(total, n);
    let width = total + subsets.len();
    let one = BigRational::one();
    let zero = BigRational::zero();

    let mut names: Vec<String> = antennas
        .iter()
        .map(|id| format!("d_{}_{}", id.transmitter, id.antenna))
        .collect();
    for t in &subsets {
        let parts: Vec<String> = t
            .iter()
            .map(|&a| format!("{}_{}", antennas[a].transmitter, antennas[a].antenna))
            .collect();
        names.push(format!("x_{}", parts.join("__")));
    }

    let mut objective = vec![zero.clone(); width];
    for v in objective.iter_mut().take(total) {
        *v = one.clone();
    }
    let mut program = LinearProgram::new(objective);
    let mut row_names = Vec::new();
    let penalty = BigRational::from_integer(BigInt::from(n as i64 - 1));

    for j in 1..=config.users {
        let mut row = vec![zero.clone(); width];
        for v in row.iter_mut().take(total) {
            *v = one.clone();
        }
        for (s, t) in subsets.iter().enumerate() {
            if !t.iter().any(|&a| antennas[a].transmitter == j) && n > 1 {
                row[total + s] = -penalty.clone();
            }
        }
        program.add_le(row, one.clone());
        row_names.push(format!("rx_{j}"));
    }
    for (a, id) in antennas.iter().enumerate() {
        let mut row = vec![zero.clone(); width];
        row[a] = -one.clone();
        for (s, t) in subsets.iter().enumerate() {
            if t.contains(&a) {
                row[total + s] = one.clone();
            }
        }
        program.add_le(row, zero.clone());
        row_names.push(format!("ant_{}_{}", id.transmitter, id.antenna));
    }
    Ok(ConverseLp {
        config,
        n,
        antennas,
        subsets,
        program,
        names,
        row_names,
    })
}

impl ConverseLp {
    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.program.constraints.len()
    }

    /// CPLEX-style LP text.
    pub fn to_lp_text(&self) -> String {
        let term = |c: &BigRational, name: &str, first: bool| -> String {
            let neg = c < &BigRational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            let sign = match (first, neg) {
                (true, false) => "",
                (true, true) => "- ",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            if mag.is_one() {
                format!("{sign}{name}")
            } else {
                format!("{sign}{mag} {name}")
            }
        };
        let line = |coeffs: &[BigRational]| -> String {
            let mut s = String::new();
            for (c, name) in coeffs.iter().zip(&self.names) {
                if !c.is_zero() {
                    s.push_str(&term(c, name, s.is_empty()));
                }
            }
            if s.is_empty() {
                s.push('0');
            }
            s
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "\\ converse for (M,N,K)={} with alignment sets of cardinality {}",
            self.config, self.n
        );
        let _ = writeln!(out, "Maximize\n obj: {}", line(&self.program.objective));
        let _ = writeln!(out, "Subject To");
        for (c, name) in self.program.constraints.iter().zip(&self.row_names) {
            let _ = writeln!(out, " {name}: {} <= {}", line(&c.coeffs), c.rhs);
        }
        let _ = writeln!(out, "End");
        out
    }
}

pub fn solve_converse_lp(lp: &ConverseLp) -> Result<BigRational> {
    Ok(solve_converse_lp_full(lp)?.value)
}

pub fn solve_converse_lp_full(lp: &ConverseLp) -> Result<LpSolution> {
    lp.program.solve()
}
