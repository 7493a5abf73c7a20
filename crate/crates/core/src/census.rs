//! Exact weight and type censuses of linear codes.
//!
//! [`full_census`] walks every codeword in reflected Gray-code order so that
//! consecutive words differ by one signed generator row. [`bounded_weight_census`]
//! finds every word of weight at most `w_max` by enumerating low-weight
//! patterns on a family of disjoint information sets.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iso::for_each_combination;
use crate::linear::{reduce, FpVector, LinearCode, WeightType};

pub const DEFAULT_SHARD_BUDGET: u64 = 1_000_000_000;
pub const DEFAULT_VOLUME_LIMIT: u128 = 10_000_000_000;

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // Exact at every step: acc is C(n, i) before this line.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusKind {
    Hamming,
    Complete,
}

impl CensusKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CensusKind::Hamming => "hamming",
            CensusKind::Complete => "complete",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(CensusKind::Hamming),
            "complete" => Ok(CensusKind::Complete),
            _ => Err(Error::Malformed(format!("unknown census kind {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ShardSpec {
    pub index: u64,
    pub count: u64,
}

impl ShardSpec {
    pub const WHOLE: ShardSpec = ShardSpec { index: 0, count: 1 };

    pub fn new(index: u64, count: u64) -> Result<Self> {
        if count == 0 || index >= count {
            return Err(Error::InvalidArgument(format!("shard {index} of {count} is out of range")));
        }
        Ok(ShardSpec { index, count })
    }
}

/// Exact counts keyed by Hamming weight (`[w]`) or by weight type.
///
/// `weight_limit` is set for tables that only cover words of weight at most
/// the limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusTable {
    pub kind: CensusKind,
    pub p: u32,
    pub length: usize,
    pub dimension: usize,
    pub fingerprint: String,
    pub weight_limit: Option<usize>,
    pub shard: Option<ShardSpec>,
    pub entries: BTreeMap<Vec<u32>, BigUint>,
}

impl CensusTable {
    pub fn empty(code: &LinearCode, kind: CensusKind) -> Self {
        CensusTable {
            kind,
            p: code.p(),
            length: code.length(),
            dimension: code.dimension(),
            fingerprint: code.fingerprint(),
            weight_limit: None,
            shard: None,
            entries: BTreeMap::new(),
        }
    }

    pub fn total(&self) -> BigUint {
        self.entries.values().sum()
    }

    pub fn get_weight(&self, w: usize) -> BigUint {
        match self.kind {
            CensusKind::Hamming => self.entries.get(&vec![w as u32]).cloned().unwrap_or_default(),
            CensusKind::Complete => self.to_hamming().get_weight(w),
        }
    }

    pub fn get_type(&self, j: &WeightType) -> BigUint {
        debug_assert_eq!(self.kind, CensusKind::Complete);
        self.entries.get(&j.0).cloned().unwrap_or_default()
    }

    /// Nonzero weights in ascending order.
    pub fn support_weights(&self) -> Vec<usize> {
        let h = self.to_hamming();
        h.entries.iter().filter(|(_, c)| !c.is_zero()).map(|(k, _)| k[0] as usize).collect()
    }

    /// Pushes a complete table through `type ↦ weight`.
    pub fn to_hamming(&self) -> CensusTable {
        if self.kind == CensusKind::Hamming {
            return self.clone();
        }
        let mut entries: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
        for (j, c) in &self.entries {
            let w = self.length as u32 - j[0];
            *entries.entry(vec![w]).or_default() += c;
        }
        CensusTable { kind: CensusKind::Hamming, entries, ..self.clone() }
    }

    fn add_counts(&mut self, other: &CensusTable) {
        for (k, c) in &other.entries {
            *self.entries.entry(k.clone()).or_default() += c;
        }
    }

    /// `cwe p=.. v=.. k=.. kind=.. fingerprint=..` followed by one row per key.
    pub fn to_cwe(&self) -> String {
        let mut out = String::new();
        write!(
            out,
            "cwe p={} v={} k={} kind={} fingerprint={}",
            self.p,
            self.length,
            self.dimension,
            self.kind.as_str(),
            self.fingerprint
        )
        .unwrap();
        if let Some(w) = self.weight_limit {
            write!(out, " wmax={w}").unwrap();
        }
        out.push('\n');
        for (k, c) in &self.entries {
            let key: Vec<String> = k.iter().map(|x| x.to_string()).collect();
            writeln!(out, "{},{c}", key.join(",")).unwrap();
        }
        out
    }

    pub fn parse_cwe(text: &str) -> Result<CensusTable> {
        let mut rows = text.lines();
        let header = rows.next().ok_or_else(|| Error::Malformed("empty census file".into()))?;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("cwe") {
            return Err(Error::Malformed("census file must start with `cwe`".into()));
        }
        let mut fields: HashMap<&str, &str> = HashMap::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Malformed(format!("bad header token {tok:?}")))?;
            if fields.insert(k, v).is_some() {
                return Err(Error::Malformed(format!("repeated header key {k:?}")));
            }
        }
        let field = |k: &str| -> Result<&str> {
            fields.get(k).copied().ok_or_else(|| Error::Malformed(format!("missing header key {k:?}")))
        };
        let num = |k: &str| -> Result<usize> {
            field(k)?.parse().map_err(|_| Error::Malformed(format!("bad value for {k:?}")))
        };
        let p = num("p")? as u32;
        let length = num("v")?;
        let dimension = num("k")?;
        let kind = CensusKind::parse(field("kind")?)?;
        let fingerprint = field("fingerprint")?.to_string();
        let weight_limit = if fields.contains_key("wmax") { Some(num("wmax")?) } else { None };
        let key_len = match kind {
            CensusKind::Hamming => 1,
            CensusKind::Complete => p as usize,
        };
        let mut entries = BTreeMap::new();
        for row in rows.filter(|r| !r.trim().is_empty()) {
            let cells: Vec<&str> = row.split(',').collect();
            if cells.len() != key_len + 1 {
                return Err(Error::Malformed(format!("row {row:?} has {} cells", cells.len())));
            }
            let key = cells[..key_len]
                .iter()
                .map(|c| c.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Malformed(format!("bad key in row {row:?}")))?;
            let count: BigUint = cells[key_len]
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("bad count in row {row:?}")))?;
            if entries.insert(key, count).is_some() {
                return Err(Error::Malformed(format!("repeated key in row {row:?}")));
            }
        }
        Ok(CensusTable { kind, p, length, dimension, fingerprint, weight_limit, shard: None, entries })
    }
}

/// Pointwise sum of tables over the same code and kind.
pub fn merge(tables: &[CensusTable]) -> Result<CensusTable> {
    let first = tables.first().ok_or_else(|| Error::InvalidArgument("nothing to merge".into()))?;
    let mut out = CensusTable { shard: None, entries: BTreeMap::new(), ..first.clone() };
    for t in tables {
        let same = t.kind == first.kind
            && t.p == first.p
            && t.length == first.length
            && t.dimension == first.dimension
            && t.fingerprint == first.fingerprint
            && t.weight_limit == first.weight_limit;
        if !same {
            return Err(Error::InvalidArgument("cannot merge tables of different codes or kinds".into()));
        }
        out.add_counts(t);
    }
    Ok(out)
}

/// Additive increments for a signed row: `(column, delta)` over its support.
fn sparse(row: &[u8], p: u8, negate: bool) -> Vec<(u32, u8)> {
    row.iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| (i as u32, if negate { p - c } else { c }))
        .collect()
}

/// Running word with incremental Hamming weight and packed type key.
struct Walker {
    p: u8,
    add: Vec<u8>,
    word: Vec<u8>,
    weight: usize,
    /// `Σ_x 1 << (8·w(x))`, i.e. the type packed in base 256.
    key: u128,
}

impl Walker {
    fn new(p: u8, word: Vec<u8>) -> Self {
        let pp = p as usize;
        let add = (0..pp * pp).map(|i| ((i / pp + i % pp) % pp) as u8).collect();
        let weight = word.iter().filter(|&&c| c != 0).count();
        let key = word.iter().map(|&c| 1u128 << (8 * c as u32)).sum();
        Walker { p, add, word, weight, key }
    }

    #[inline]
    fn apply(&mut self, delta: &[(u32, u8)]) {
        let p = self.p as usize;
        for &(i, d) in delta {
            let old = self.word[i as usize];
            let new = self.add[old as usize * p + d as usize];
            self.word[i as usize] = new;
            self.weight = self.weight + (new != 0) as usize - (old != 0) as usize;
            self.key = self.key + (1u128 << (8 * new as u32)) - (1u128 << (8 * old as u32));
        }
    }
}

fn unpack_type(key: u128, p: usize) -> Vec<u32> {
    (0..p).map(|a| ((key >> (8 * a)) & 0xff) as u32).collect()
}

/// Counts accumulated by one worker.
#[derive(Default)]
struct Tally {
    weights: Vec<u64>,
    types: HashMap<u128, u64>,
}

impl Tally {
    fn new(length: usize) -> Self {
        Tally { weights: vec![0; length + 1], types: HashMap::new() }
    }

    fn absorb(mut self, other: Tally) -> Tally {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        for (k, c) in other.types {
            *self.types.entry(k).or_default() += c;
        }
        self
    }

    fn into_entries(self, kind: CensusKind, p: usize) -> BTreeMap<Vec<u32>, BigUint> {
        match kind {
            CensusKind::Hamming => self
                .weights
                .iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(w, &c)| (vec![w as u32], BigUint::from(c)))
                .collect(),
            CensusKind::Complete => {
                self.types.into_iter().map(|(k, c)| (unpack_type(k, p), BigUint::from(c))).collect()
            }
        }
    }
}

/// Reflected mixed-radix Gray walk. `radix[i]` values per digit; on each step
/// `step(i, up)` is called for the one digit that moved by ±1.
fn gray_walk(radix: &[u8], mut visit: impl FnMut(), mut step: impl FnMut(usize, bool)) {
    let n = radix.len();
    let mut digit = vec![0u8; n];
    let mut up = vec![true; n];
    loop {
        visit();
        let mut i = 0;
        while i < n {
            if up[i] && digit[i] + 1 < radix[i] {
                digit[i] += 1;
                step(i, true);
                break;
            }
            if !up[i] && digit[i] > 0 {
                digit[i] -= 1;
                step(i, false);
                break;
            }
            up[i] = !up[i];
            i += 1;
        }
        if i == n {
            return;
        }
    }
}

fn words_required(p: u32, dim: usize) -> BigUint {
    BigUint::from(p).pow(dim as u32)
}

/// Complete or Hamming census of one shard of the message space.
///
/// Shard `s` of `S` owns the messages whose leading `⌈log_p S⌉` symbols,
/// read as a base-`p` number, are congruent to `s` modulo `S`.
pub fn full_census(code: &LinearCode, kind: CensusKind, shard: ShardSpec, budget: u64) -> Result<CensusTable> {
    ShardSpec::new(shard.index, shard.count)?;
    let p = code.p();
    let k = code.dimension();
    let v = code.length();
    if v > 255 {
        return Err(Error::InvalidArgument("census supports lengths up to 255".into()));
    }
    let total = words_required(p, k);
    if total > BigUint::from(budget) * BigUint::from(shard.count) {
        let need = (&total + shard.count - 1u32) / shard.count;
        return Err(Error::Budget(format!(
            "{total} codewords need a per-shard budget of {need} with {} shard(s); budget is {budget}",
            shard.count
        )));
    }
    let mut lead = 0usize;
    while (p as u128).pow(lead as u32) < shard.count as u128 && lead < k {
        lead += 1;
    }
    // Split further so that there are enough independent units for threads.
    let threads = rayon::current_num_threads().max(1) as u128;
    let mut split = lead;
    while split < k && (p as u128).pow((split - lead) as u32) < 8 * threads && k - split > 4 {
        split += 1;
    }
    let pp = p as u8;
    let rows = code.rows();
    let plus: Vec<Vec<(u32, u8)>> = rows.iter().map(|r| sparse(r, pp, false)).collect();
    let minus: Vec<Vec<(u32, u8)>> = rows.iter().map(|r| sparse(r, pp, true)).collect();
    let units: Vec<u64> = (0..(p as u64).pow(split as u32))
        .filter(|&u| (u / (p as u64).pow((split - lead) as u32)) % shard.count == shard.index)
        .collect();
    let rest: Vec<u8> = vec![pp; k - split];
    let tally = units
        .par_iter()
        .map(|&unit| {
            // Message symbols 0..split come from the unit number, most
            // significant first.
            let mut word = vec![0u8; v];
            let mut u = unit;
            for sym in (0..split).rev() {
                let c = (u % p as u64) as u32;
                u /= p as u64;
                for (w, &g) in word.iter_mut().zip(&rows[sym]) {
                    *w = ((*w as u32 + c * g as u32) % p) as u8;
                }
            }
            let walker = std::cell::RefCell::new(Walker::new(pp, word));
            let mut tally = Tally::new(v);
            gray_walk(
                &rest,
                || {
                    let w = walker.borrow();
                    match kind {
                        CensusKind::Hamming => tally.weights[w.weight] += 1,
                        CensusKind::Complete => *tally.types.entry(w.key).or_default() += 1,
                    }
                },
                |i, up| {
                    let d = if up { &plus[split + i] } else { &minus[split + i] };
                    walker.borrow_mut().apply(d);
                },
            );
            tally
        })
        .reduce(|| Tally::new(v), Tally::absorb);
    let mut table = CensusTable::empty(code, kind);
    table.shard = Some(shard);
    table.entries = tally.into_entries(kind, p as usize);
    Ok(table)
}

/// Which words a bounded census keeps besides its counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordFilter {
    None,
    All,
    Weight(usize),
    Types(Vec<WeightType>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CensusStatus {
    /// Every word of weight at most `w_max` was counted exactly once.
    Proven,
    /// Thresholds were cut to fit the volume limit; counts are lower bounds.
    Heuristic,
}

#[derive(Clone, Debug, Serialize)]
pub struct InfoSetPlan {
    /// Columns of each disjoint information set, in pivot order.
    pub sets: Vec<Vec<usize>>,
    /// Per set: enumerate patterns of weight at most `threshold` (−1 skips the set).
    pub thresholds: Vec<i64>,
    /// Words generated per set.
    pub volumes: Vec<u128>,
    pub total_volume: u128,
}

#[derive(Clone, Debug)]
pub struct BoundedOptions {
    pub w_max: usize,
    pub seed: u64,
    pub volume_limit: u128,
    pub allow_heuristic: bool,
    pub words: WordFilter,
}

impl BoundedOptions {
    pub fn new(w_max: usize) -> Self {
        BoundedOptions {
            w_max,
            seed: 0,
            volume_limit: DEFAULT_VOLUME_LIMIT,
            allow_heuristic: false,
            words: WordFilter::None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BoundedCensus {
    pub w_max: usize,
    pub status: CensusStatus,
    pub plan: InfoSetPlan,
    pub complete: CensusTable,
    pub hamming: CensusTable,
    /// Kept words in lexicographic order.
    pub words: Vec<FpVector>,
}

impl BoundedCensus {
    pub fn min_nonzero_weight(&self) -> Option<usize> {
        self.hamming.support_weights().into_iter().find(|&w| w > 0)
    }
}

/// Splits the columns into disjoint information sets by repeated pivoting
/// over a seeded random column order.
fn information_sets(code: &LinearCode, seed: u64) -> Vec<Vec<usize>> {
    let n = code.length();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut remaining = order;
    let mut sets = Vec::new();
    while !remaining.is_empty() && code.dimension() > 0 {
        let mut rows: Vec<Vec<u8>> =
            code.rows().iter().map(|r| remaining.iter().map(|&c| r[c]).collect()).collect();
        let pivots = reduce(code.p() as u8, &mut rows, remaining.len());
        if pivots.is_empty() {
            break;
        }
        let set: Vec<usize> = pivots.iter().map(|&i| remaining[i]).collect();
        let mut taken = vec![false; remaining.len()];
        for &i in &pivots {
            taken[i] = true;
        }
        remaining = remaining.iter().zip(&taken).filter(|(_, &t)| !t).map(|(&c, _)| c).collect();
        sets.push(set);
    }
    sets
}

/// Words with a pattern of weight at most `t` on a rank-`r` set, times the
/// `p^(k-r)` kernel part.
fn set_volume(p: u32, k: usize, r: usize, t: i64) -> u128 {
    if t < 0 {
        return 0;
    }
    let patterns: u128 = (0..=t.min(r as i64) as u64)
        .map(|i| binomial(r as u64, i).saturating_mul(((p - 1) as u128).saturating_pow(i as u32)))
        .fold(0u128, |a, b| a.saturating_add(b));
    patterns.saturating_mul((p as u128).saturating_pow((k - r) as u32))
}

/// Cheapest thresholds with `Σ (t_i + 1) > w_max`.
fn choose_thresholds(p: u32, k: usize, ranks: &[usize], w_max: usize) -> (Vec<i64>, u128) {
    let need = w_max + 1;
    // best[c] = (cost, thresholds) reaching coverage c (capped at need).
    let mut best: Vec<Option<(u128, Vec<i64>)>> = vec![None; need + 1];
    best[0] = Some((0, Vec::new()));
    for &r in ranks {
        let mut next: Vec<Option<(u128, Vec<i64>)>> = vec![None; need + 1];
        for (c, entry) in best.iter().enumerate() {
            let Some((cost, ts)) = entry else { continue };
            for t in -1..=r as i64 {
                let c2 = (c + (t + 1) as usize).min(need);
                let cost2 = cost.saturating_add(set_volume(p, k, r, t));
                if next[c2].as_ref().is_none_or(|(b, _)| cost2 < *b) {
                    let mut ts2 = ts.clone();
                    ts2.push(t);
                    next[c2] = Some((cost2, ts2));
                }
            }
        }
        best = next;
    }
    match best[need].take() {
        Some((cost, ts)) => (ts, cost),
        // Unreachable while at least one set exists: t = r covers the code.
        None => (vec![-1; ranks.len()], 0),
    }
}

/// Largest coverage affordable within `limit`, used for heuristic runs.
fn heuristic_thresholds(p: u32, k: usize, ranks: &[usize], limit: u128) -> (Vec<i64>, u128) {
    let mut ts = vec![-1i64; ranks.len()];
    let mut cost = 0u128;
    loop {
        let mut improved = false;
        for i in 0..ranks.len() {
            if ts[i] < ranks[i] as i64 {
                let extra = set_volume(p, k, ranks[i], ts[i] + 1) - set_volume(p, k, ranks[i], ts[i]);
                if cost.saturating_add(extra) <= limit {
                    ts[i] += 1;
                    cost += extra;
                    improved = true;
                }
            }
        }
        if !improved {
            return (ts, cost);
        }
    }
}

pub fn plan_bounded(code: &LinearCode, opts: &BoundedOptions) -> Result<(InfoSetPlan, CensusStatus)> {
    let (p, k) = (code.p(), code.dimension());
    let sets = information_sets(code, opts.seed);
    let ranks: Vec<usize> = sets.iter().map(|s| s.len()).collect();
    let (mut thresholds, mut total) = choose_thresholds(p, k, &ranks, opts.w_max);
    let mut status = CensusStatus::Proven;
    if total > opts.volume_limit {
        if !opts.allow_heuristic {
            let blocking = thresholds
                .iter()
                .zip(&ranks)
                .enumerate()
                .map(|(i, (&t, &r))| format!("set {i}: rank {r}, threshold {t}, {} words", set_volume(p, k, r, t)))
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::Infeasible(format!(
                "weight <= {} needs {total} words, limit {} ({blocking})",
                opts.w_max, opts.volume_limit
            )));
        }
        (thresholds, total) = heuristic_thresholds(p, k, &ranks, opts.volume_limit);
        status = CensusStatus::Heuristic;
    }
    let volumes = thresholds.iter().zip(&ranks).map(|(&t, &r)| set_volume(p, k, r, t)).collect();
    Ok((InfoSetPlan { sets, thresholds, volumes, total_volume: total }, status))
}

struct SetTally {
    tally: Tally,
    words: Vec<Vec<u8>>,
}

pub fn bounded_weight_census(code: &LinearCode, opts: &BoundedOptions) -> Result<BoundedCensus> {
    let (p, k, n) = (code.p(), code.dimension(), code.length());
    if opts.w_max > n {
        return Err(Error::InvalidArgument(format!("w_max {} exceeds the length {n}", opts.w_max)));
    }
    if n > 255 {
        return Err(Error::InvalidArgument("census supports lengths up to 255".into()));
    }
    let (plan, status) = plan_bounded(code, opts)?;
    let pp = p as u8;
    let mut total = SetTally { tally: Tally::new(n), words: Vec::new() };
    for (si, set) in plan.sets.iter().enumerate() {
        let t = plan.thresholds[si];
        if t < 0 {
            continue;
        }
        let r = set.len();
        // Systematic rows on this set, then rows vanishing on it.
        let mut order: Vec<usize> = set.clone();
        let mut in_set = vec![false; n];
        for &c in set {
            in_set[c] = true;
        }
        order.extend((0..n).filter(|&c| !in_set[c]));
        let mut rows: Vec<Vec<u8>> = code.rows().iter().map(|row| order.iter().map(|&c| row[c]).collect()).collect();
        let pivots = reduce(pp, &mut rows, n);
        debug_assert!(pivots[..r].iter().enumerate().all(|(i, &c)| i == c));
        let rows: Vec<Vec<u8>> = rows
            .iter()
            .map(|row| {
                let mut out = vec![0u8; n];
                for (pos, &c) in order.iter().enumerate() {
                    out[c] = row[pos];
                }
                out
            })
            .collect();
        let plus: Vec<Vec<(u32, u8)>> = rows.iter().map(|r| sparse(r, pp, false)).collect();
        let minus: Vec<Vec<(u32, u8)>> = rows.iter().map(|r| sparse(r, pp, true)).collect();
        let earlier: Vec<(&[usize], i64)> =
            (0..si).filter(|&j| plan.thresholds[j] >= 0).map(|j| (&plan.sets[j][..], plan.thresholds[j])).collect();

        let mut supports: Vec<Vec<usize>> = Vec::new();
        for size in 0..=(t as usize).min(r) {
            for_each_combination(r, size, |c| supports.push(c.to_vec()));
        }
        let part = supports
            .par_iter()
            .map(|support| {
                let mut word = vec![0u8; n];
                for &s in support {
                    for (w, &g) in word.iter_mut().zip(&rows[s]) {
                        *w = ((*w as u32 + g as u32) % p) as u8;
                    }
                }
                // Pattern digits take values 1..p (radix p-1), kernel digits 0..p.
                let mut radix: Vec<u8> = vec![pp - 1; support.len()];
                radix.extend(std::iter::repeat_n(pp, k - r));
                let digit_row: Vec<usize> = support.iter().copied().chain(r..k).collect();
                let walker = std::cell::RefCell::new(Walker::new(pp, word));
                let mut out = SetTally { tally: Tally::new(n), words: Vec::new() };
                gray_walk(
                    &radix,
                    || {
                        let w = walker.borrow();
                        if w.weight > opts.w_max {
                            return;
                        }
                        // Count only at the first set whose threshold the word meets.
                        let seen_before = earlier
                            .iter()
                            .any(|(cols, tj)| cols.iter().filter(|&&c| w.word[c] != 0).count() as i64 <= *tj);
                        if seen_before {
                            return;
                        }
                        out.tally.weights[w.weight] += 1;
                        *out.tally.types.entry(w.key).or_default() += 1;
                        let keep = match &opts.words {
                            WordFilter::None => false,
                            WordFilter::All => true,
                            WordFilter::Weight(x) => w.weight == *x,
                            WordFilter::Types(js) => {
                                let ty = unpack_type(w.key, pp as usize);
                                js.iter().any(|j| j.0 == ty)
                            }
                        };
                        if keep {
                            out.words.push(w.word.clone());
                        }
                    },
                    |i, up| {
                        let d = if up { &plus[digit_row[i]] } else { &minus[digit_row[i]] };
                        walker.borrow_mut().apply(d);
                    },
                );
                out
            })
            .reduce(
                || SetTally { tally: Tally::new(n), words: Vec::new() },
                |mut a, b| {
                    a.tally = a.tally.absorb(b.tally);
                    a.words.extend(b.words);
                    a
                },
            );
        total.tally = std::mem::take(&mut total.tally).absorb(part.tally);
        total.words.extend(part.words);
    }
    let mut words = total.words;
    words.sort_unstable();
    let mut complete = CensusTable::empty(code, CensusKind::Complete);
    complete.weight_limit = Some(opts.w_max);
    let weights = total.tally.weights.clone();
    complete.entries = total.tally.into_entries(CensusKind::Complete, p as usize);
    let mut hamming = CensusTable::empty(code, CensusKind::Hamming);
    hamming.weight_limit = Some(opts.w_max);
    hamming.entries = Tally { weights, types: HashMap::new() }.into_entries(CensusKind::Hamming, p as usize);
    Ok(BoundedCensus {
        w_max: opts.w_max,
        status,
        plan,
        complete,
        hamming,
        words: words.into_iter().map(|w| FpVector::from_raw(pp, w)).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TypeStrategy {
    Full,
    BoundedWeight,
}

/// Number of codewords of type `j`.
pub fn type_census(code: &LinearCode, j: &WeightType, strategy: TypeStrategy, seed: u64) -> Result<BigUint> {
    if j.0.len() != code.p() as usize || j.total() != code.length() {
        return Err(Error::InvalidArgument(format!(
            "type {j} does not fit a code over F_{} of length {}",
            code.p(),
            code.length()
        )));
    }
    match strategy {
        TypeStrategy::Full => {
            let t = full_census(code, CensusKind::Complete, ShardSpec::WHOLE, DEFAULT_SHARD_BUDGET)?;
            Ok(t.get_type(j))
        }
        TypeStrategy::BoundedWeight => {
            let mut opts = BoundedOptions::new(j.weight());
            opts.seed = seed;
            let census = bounded_weight_census(code, &opts)?;
            Ok(census.complete.get_type(j))
        }
    }
}

/// Convenience for callers holding `u64`-sized answers.
pub fn to_u64(x: &BigUint) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::build_pg2;
    use crate::linear::code_from_system;

    fn brute_force(code: &LinearCode) -> BTreeMap<Vec<u32>, BigUint> {
        let (p, k) = (code.p(), code.dimension());
        let mut out: BTreeMap<Vec<u32>, BigUint> = BTreeMap::new();
        for m in 0..(p as u64).pow(k as u32) {
            let mut word = vec![0u32; code.length()];
            let mut x = m;
            for row in code.rows() {
                let c = (x % p as u64) as u32;
                x /= p as u64;
                for (w, &g) in word.iter_mut().zip(row) {
                    *w = (*w + c * g as u32) % p;
                }
            }
            let ty = FpVector::new(p, word).unwrap().type_of();
            *out.entry(ty.0).or_default() += 1u32;
        }
        out
    }

    fn pg_code(q: u32) -> LinearCode {
        code_from_system(build_pg2(q).unwrap().system(), q).unwrap()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(133, 3), 383_306);
        assert_eq!(binomial(5, 7), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn gray_walk_visits_every_word_once() {
        let radix = [3u8, 2, 4];
        let mut digits = vec![0u8; 3];
        let mut seen = std::collections::HashSet::new();
        let cell = std::cell::RefCell::new(&mut digits);
        gray_walk(
            &radix,
            || assert!(seen.insert(cell.borrow().clone())),
            |i, up| {
                let mut d = cell.borrow_mut();
                if up { d[i] += 1 } else { d[i] -= 1 }
            },
        );
        assert_eq!(seen.len(), 24);
    }

    #[test]
    fn fano_hamming() {
        let t = full_census(&pg_code(2), CensusKind::Hamming, ShardSpec::WHOLE, 1000).unwrap();
        let got: Vec<(u32, u64)> = t.entries.iter().map(|(k, c)| (k[0], to_u64(c).unwrap())).collect();
        assert_eq!(got, vec![(0, 1), (3, 7), (4, 7), (7, 1)]);
    }

    #[test]
    fn complete_matches_brute_force() {
        for q in [2, 3] {
            let code = pg_code(q);
            let t = full_census(&code, CensusKind::Complete, ShardSpec::WHOLE, 1 << 20).unwrap();
            assert_eq!(t.entries, brute_force(&code));
        }
    }

    #[test]
    fn all_ones_code() {
        let code = LinearCode::from_rows(3, 13, vec![vec![1; 13]]).unwrap();
        let t = full_census(&code, CensusKind::Complete, ShardSpec::WHOLE, 10).unwrap();
        let keys: Vec<Vec<u32>> = t.entries.keys().cloned().collect();
        assert_eq!(keys, vec![vec![0, 0, 13], vec![0, 13, 0], vec![13, 0, 0]]);
    }

    #[test]
    fn shards_partition_and_merge() {
        let code = pg_code(3);
        let whole = full_census(&code, CensusKind::Complete, ShardSpec::WHOLE, 1 << 20).unwrap();
        for s in [2u64, 4, 8, 100] {
            let parts: Vec<CensusTable> = (0..s)
                .map(|i| full_census(&code, CensusKind::Complete, ShardSpec::new(i, s).unwrap(), 1 << 20).unwrap())
                .collect();
            let merged = merge(&parts).unwrap();
            assert_eq!(merged.entries, whole.entries);
            assert_eq!(merged.to_cwe(), whole.to_cwe());
        }
    }

    #[test]
    fn budget_refusal() {
        let code = pg_code(3);
        let err = full_census(&code, CensusKind::Hamming, ShardSpec::WHOLE, 100).unwrap_err();
        assert!(matches!(err, Error::Budget(_)));
        assert!(full_census(&code, CensusKind::Hamming, ShardSpec { index: 3, count: 2 }, 1 << 20).is_err());
    }

    #[test]
    fn cwe_round_trip() {
        let code = pg_code(3);
        let t = full_census(&code, CensusKind::Complete, ShardSpec::WHOLE, 1 << 20).unwrap();
        let text = t.to_cwe();
        assert!(text.starts_with(&format!("cwe p=3 v=13 k=7 kind=complete fingerprint={}\n", code.fingerprint())));
        let back = CensusTable::parse_cwe(&text).unwrap();
        assert_eq!(back.entries, t.entries);
        assert_eq!(back.to_cwe(), text);
        assert!(CensusTable::parse_cwe("cwe p=3 v=13\n").is_err());
        assert!(CensusTable::parse_cwe(&text.replace("kind=complete", "kind=other")).is_err());
    }

    #[test]
    fn hamming_from_complete() {
        let code = pg_code(3);
        let c = full_census(&code, CensusKind::Complete, ShardSpec::WHOLE, 1 << 20).unwrap();
        let h = full_census(&code, CensusKind::Hamming, ShardSpec::WHOLE, 1 << 20).unwrap();
        assert_eq!(c.to_hamming().entries, h.entries);
        assert_eq!(h.get_weight(4), BigUint::from(26u32));
    }

    #[test]
    fn bounded_matches_full() {
        for q in [2u32, 3] {
            let code = pg_code(q);
            for dual in [false, true] {
                let code = if dual { code.dual() } else { code.clone() };
                let full = full_census(&code, CensusKind::Complete, ShardSpec::WHOLE, 1 << 22).unwrap();
                for w_max in [0, 3, 5, 7, code.length()] {
                    for seed in [0, 7] {
                        let mut opts = BoundedOptions::new(w_max);
                        opts.seed = seed;
                        let b = bounded_weight_census(&code, &opts).unwrap();
                        assert_eq!(b.status, CensusStatus::Proven);
                        let expect: BTreeMap<Vec<u32>, BigUint> = full
                            .entries
                            .iter()
                            .filter(|(j, _)| code.length() - j[0] as usize <= w_max)
                            .map(|(j, c)| (j.clone(), c.clone()))
                            .collect();
                        assert_eq!(b.complete.entries, expect, "q={q} dual={dual} w_max={w_max}");
                    }
                }
            }
        }
    }

    #[test]
    fn bounded_keeps_words() {
        let code = pg_code(3);
        let mut opts = BoundedOptions::new(4);
        opts.words = WordFilter::Weight(4);
        let b = bounded_weight_census(&code, &opts).unwrap();
        assert_eq!(b.words.len(), 26);
        assert!(b.words.windows(2).all(|w| w[0] < w[1]));
        assert!(b.words.iter().all(|w| code.contains(w).unwrap() && w.weight() == 4));
    }

    #[test]
    fn infeasible_and_heuristic() {
        let code = pg_code(5);
        let mut opts = BoundedOptions::new(31);
        opts.volume_limit = 1000;
        assert!(matches!(bounded_weight_census(&code, &opts), Err(Error::Infeasible(_))));
        opts.allow_heuristic = true;
        let b = bounded_weight_census(&code, &opts).unwrap();
        assert_eq!(b.status, CensusStatus::Heuristic);
        assert!(b.plan.total_volume <= 1000);
    }

    #[test]
    fn type_census_small() {
        let code = pg_code(3);
        let zero = WeightType(vec![13, 0, 0]);
        assert_eq!(type_census(&code, &zero, TypeStrategy::Full, 0).unwrap(), BigUint::from(1u32));
        let line = WeightType(vec![9, 4, 0]);
        assert_eq!(type_census(&code, &line, TypeStrategy::Full, 0).unwrap(), BigUint::from(13u32));
        assert_eq!(type_census(&code, &line, TypeStrategy::BoundedWeight, 3).unwrap(), BigUint::from(13u32));
    }
}
