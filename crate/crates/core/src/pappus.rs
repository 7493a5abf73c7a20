//! Counting Pappus configurations in a plane through closing witnesses, and an
//! optional Desargues counter.
//!
//! A Pappus witness is an ordered pair of lines `(ℓ₁, ℓ₂)` meeting in `m`,
//! 3-sets `α ⊂ ℓ₁∖{m}`, `β ⊂ ℓ₂∖{m}` and a bijection `f: α → β`. With
//! `y_i = f(x_i)` the witness closes when
//!
//! ```text
//! z₁ = (x₂∨y₃)∧(x₃∨y₂),  z₂ = (x₁∨y₃)∧(x₃∨y₁),  z₃ = (x₁∨y₂)∧(x₂∨y₁)
//! ```
//!
//! are collinear. Every copy of the configuration has 18 closing witnesses.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::builders::{build_desargues_config, build_pappus_config, build_pg2};
use crate::census::binomial;
use crate::error::{Error, Result};
use crate::incidence::{IncidenceSystem, Plane};
use crate::iso::{canonical_form, count_copies, for_each_combination, invariants};

pub const WITNESSES_PER_COPY: u64 = 18;
pub const DEFAULT_WITNESS_GUARD: u128 = 2_000_000_000;
pub const DEFAULT_SPOT_CHECKS: usize = 10_000;

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn ser_big<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// `(2/3)·C(n²+n+1, 2)·C(n, 3)²`.
pub fn pappus_bound(n: u64) -> BigUint {
    let v = n * n + n + 1;
    let num = BigUint::from(2u32) * binomial(v, 2) * BigUint::from(binomial(n, 3)).pow(2);
    let (q, r) = num.div_rem(&BigUint::from(3u32));
    debug_assert!(r.is_zero());
    q
}

/// Number of witnesses examined: `12·C(v,2)·C(n,3)²`.
pub fn pappus_witness_total(n: u64) -> BigUint {
    let v = n * n + n + 1;
    BigUint::from(12u32) * binomial(v, 2) * BigUint::from(binomial(n, 3)).pow(2)
}

#[derive(Clone, Debug, Serialize)]
pub struct SpotCheck {
    pub checked: usize,
    /// Closing witnesses whose nine points and nine lines are not a Pappus
    /// configuration.
    pub exceptions: usize,
    /// Closing witnesses where some `x_i, y_i, z_i` are collinear.
    pub extra_collinear: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PappusCount {
    pub order: usize,
    #[serde(serialize_with = "ser_big")]
    pub witnesses: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub witnesses_closing: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub copies: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub bound: BigUint,
    pub is_pappian: bool,
    pub spot_check: Option<SpotCheck>,
    pub runtime_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct PappusOptions {
    pub guard: u128,
    pub spot_checks: usize,
    pub seed: u64,
}

impl Default for PappusOptions {
    fn default() -> Self {
        PappusOptions { guard: DEFAULT_WITNESS_GUARD, spot_checks: DEFAULT_SPOT_CHECKS, seed: 0 }
    }
}

/// Table views used in the inner loops.
struct Tables<'a> {
    v: usize,
    b: usize,
    join: &'a [u32],
    meet: &'a [u32],
    plane: &'a Plane,
}

impl Tables<'_> {
    #[inline]
    fn join(&self, x: u32, y: u32) -> u32 {
        self.join[x as usize * self.v + y as usize]
    }

    #[inline]
    fn meet(&self, a: u32, c: u32) -> u32 {
        self.meet[a as usize * self.b + c as usize]
    }

    #[inline]
    fn on(&self, x: u32, l: u32) -> bool {
        self.plane.incident(x as usize, l as usize)
    }
}

/// The three `z` points of a witness, given the 3×3 join table
/// `j[a][b] = x_a ∨ y_b` and the bijection as `y_i = β[perm[i]]`.
#[inline]
fn z_points(t: &Tables, j: &[[u32; 3]; 3], perm: &[usize; 3]) -> [u32; 3] {
    let (p0, p1, p2) = (perm[0], perm[1], perm[2]);
    [
        t.meet(j[1][p2], j[2][p1]),
        t.meet(j[0][p2], j[2][p0]),
        t.meet(j[0][p1], j[1][p0]),
    ]
}

struct PairTally {
    closing: u64,
    degenerate: u64,
}

fn count_line_pair(t: &Tables, l1: usize, l2: usize) -> PairTally {
    let m = t.meet(l1 as u32, l2 as u32);
    let a: Vec<u32> = t.plane.line(l1).iter().map(|&x| x as u32).filter(|&x| x != m).collect();
    let b: Vec<u32> = t.plane.line(l2).iter().map(|&x| x as u32).filter(|&x| x != m).collect();
    let n = a.len();
    // Joins between every point of ℓ₁∖{m} and every point of ℓ₂∖{m}.
    let cross: Vec<u32> = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| t.join(x, y)).collect();
    let mut tally = PairTally { closing: 0, degenerate: 0 };
    let mut alphas = Vec::new();
    for_each_combination(n, 3, |c| alphas.push([c[0], c[1], c[2]]));
    for al in &alphas {
        for be in &alphas {
            let mut j = [[0u32; 3]; 3];
            for r in 0..3 {
                for s in 0..3 {
                    j[r][s] = cross[al[r] * n + be[s]];
                }
            }
            for perm in &PERMS3 {
                let z = z_points(t, &j, perm);
                if z[0] == z[1] || z[1] == z[2] || z[0] == z[2] {
                    tally.degenerate += 1;
                    continue;
                }
                if t.on(z[2], t.join(z[0], z[1])) {
                    tally.closing += 1;
                }
            }
        }
    }
    tally
}

/// Witness for the spot check: the nine points and the nine lines of the
/// would-be configuration.
fn witness_system(t: &Tables, x: [u32; 3], y: [u32; 3], z: [u32; 3], l1: usize, l2: usize) -> Result<IncidenceSystem> {
    let pts: Vec<usize> = x.iter().chain(&y).chain(&z).map(|&p| p as usize).collect();
    let mut lines = vec![l1, l2, t.join(z[0], z[1]) as usize];
    for r in 0..3 {
        for s in 0..3 {
            if r != s {
                lines.push(t.join(x[r], y[s]) as usize);
            }
        }
    }
    lines.sort_unstable();
    lines.dedup();
    let mut sorted = pts.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != 9 || lines.len() != 9 {
        return Err(Error::Invariant("closing witness with coincident points or lines".into()));
    }
    t.plane.system().induced(&sorted, &lines)
}

fn spot_check(t: &Tables, count: usize, closing_exist: bool, seed: u64) -> Result<SpotCheck> {
    let mut out = SpotCheck { checked: 0, exceptions: 0, extra_collinear: 0 };
    if count == 0 || !closing_exist {
        return Ok(out);
    }
    let pappus = build_pappus_config()?;
    let reference = (invariants(&pappus), canonical_form(&pappus)?.bytes);
    let mut seen: HashMap<IncidenceSystem, bool> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = t.plane.order();
    while out.checked < count {
        let l1 = rng.gen_range(0..t.b);
        let l2 = rng.gen_range(0..t.b);
        if l1 == l2 {
            continue;
        }
        let m = t.meet(l1 as u32, l2 as u32);
        let pick = |rng: &mut ChaCha8Rng, l: usize| -> [u32; 3] {
            let pts: Vec<u32> = t.plane.line(l).iter().map(|&x| x as u32).filter(|&x| x != m).collect();
            let mut idx = rand::seq::index::sample(rng, n, 3).into_vec();
            idx.sort_unstable();
            [pts[idx[0]], pts[idx[1]], pts[idx[2]]]
        };
        let x = pick(&mut rng, l1);
        let beta = pick(&mut rng, l2);
        let perm = PERMS3[rng.gen_range(0..6)];
        let y = [beta[perm[0]], beta[perm[1]], beta[perm[2]]];
        let mut j = [[0u32; 3]; 3];
        for r in 0..3 {
            for s in 0..3 {
                j[r][s] = t.join(x[r], y[s]);
            }
        }
        let z = z_points(t, &j, &[0, 1, 2]);
        if z[0] == z[1] || z[1] == z[2] || z[0] == z[2] || !t.on(z[2], t.join(z[0], z[1])) {
            continue;
        }
        out.checked += 1;
        if (0..3).any(|i| t.on(z[i], t.join(x[i], y[i]))) {
            out.extra_collinear += 1;
        }
        let sys = witness_system(t, x, y, z, l1, l2)?;
        let iso = match seen.get(&sys) {
            Some(&iso) => iso,
            None => {
                let iso = invariants(&sys) == reference.0 && canonical_form(&sys)?.bytes == reference.1;
                seen.insert(sys, iso);
                iso
            }
        };
        if !iso {
            out.exceptions += 1;
        }
    }
    Ok(out)
}

/// Counts closing Pappus witnesses over all ordered line pairs.
pub fn count_pappus(plane: &Plane, opts: &PappusOptions) -> Result<PappusCount> {
    let start = Instant::now();
    let n = plane.order() as u64;
    let total = pappus_witness_total(n);
    if total > BigUint::from(opts.guard) {
        return Err(Error::Budget(format!("{total} witnesses exceed the guard {}", opts.guard)));
    }
    let t = Tables {
        v: plane.num_points(),
        b: plane.num_lines(),
        join: plane.join_table(),
        meet: plane.meet_table(),
        plane,
    };
    let (closing, degenerate) = (0..t.b)
        .into_par_iter()
        .map(|l1| {
            let mut c = 0u64;
            let mut d = 0u64;
            for l2 in 0..t.b {
                if l1 != l2 {
                    let r = count_line_pair(&t, l1, l2);
                    c += r.closing;
                    d += r.degenerate;
                }
            }
            (c, d)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if degenerate > 0 {
        return Err(Error::Invariant(format!("{degenerate} witnesses with coincident z points")));
    }
    let closing = BigUint::from(closing);
    let (copies, rem) = closing.div_rem(&BigUint::from(WITNESSES_PER_COPY));
    if !rem.is_zero() {
        return Err(Error::Invariant(format!("{closing} closing witnesses is not a multiple of 18")));
    }
    let bound = pappus_bound(n);
    if copies > bound {
        return Err(Error::Invariant(format!("{copies} copies exceed the bound {bound}")));
    }
    let spot = spot_check(&t, opts.spot_checks, !closing.is_zero(), opts.seed)?;
    Ok(PappusCount {
        order: plane.order(),
        witnesses: total,
        is_pappian: copies == bound,
        witnesses_closing: closing,
        copies,
        bound,
        spot_check: Some(spot),
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Desargues witnesses: a center `c`, three lines through `c`, a point pair
/// off `c` on each, and one of the four splits of the six points into two
/// triangles. A witness closes when the three side intersections are
/// distinct new points on a line missing `c`.
pub fn count_desargues_witnesses(plane: &Plane, guard: u128) -> Result<BigUint> {
    let n = plane.order() as u64;
    let volume = plane.num_points() as u128 * binomial(n + 1, 3) * binomial(n, 2).pow(3) * 4;
    if volume > guard {
        return Err(Error::Budget(format!("{volume} Desargues witnesses exceed the guard {guard}")));
    }
    let t = Tables {
        v: plane.num_points(),
        b: plane.num_lines(),
        join: plane.join_table(),
        meet: plane.meet_table(),
        plane,
    };
    let total: u64 = (0..plane.num_points())
        .into_par_iter()
        .map(|c| {
            let c = c as u32;
            let pencil = plane.lines_through(c as usize);
            let off: Vec<Vec<u32>> = pencil
                .iter()
                .map(|&l| plane.line(l).iter().map(|&x| x as u32).filter(|&x| x != c).collect())
                .collect();
            let mut pairs_per_line: Vec<Vec<[u32; 2]>> = Vec::new();
            for pts in &off {
                let mut v = Vec::new();
                for_each_combination(pts.len(), 2, |s| v.push([pts[s[0]], pts[s[1]]]));
                pairs_per_line.push(v);
            }
            let mut closing = 0u64;
            for_each_combination(pencil.len(), 3, |ls| {
                for pa in &pairs_per_line[ls[0]] {
                    for pb in &pairs_per_line[ls[1]] {
                        for pc in &pairs_per_line[ls[2]] {
                            for split in 0..4 {
                                let (sb, sc) = (split & 1, split >> 1);
                                let tri = [pa[0], pb[sb], pc[sc]];
                                let tri2 = [pa[1], pb[1 - sb], pc[1 - sc]];
                                if desargues_closes(&t, c, tri, tri2) {
                                    closing += 1;
                                }
                            }
                        }
                    }
                }
            });
            closing
        })
        .sum();
    Ok(BigUint::from(total))
}

fn desargues_closes(t: &Tables, c: u32, a: [u32; 3], b: [u32; 3]) -> bool {
    let side = |tri: &[u32; 3], i: usize, j: usize| t.join(tri[i], tri[j]);
    // Nondegenerate triangles.
    if t.on(a[2], side(&a, 0, 1)) || t.on(b[2], side(&b, 0, 1)) {
        return false;
    }
    let mut axis = [0u32; 3];
    for (k, (i, j)) in [(0, 1), (1, 2), (0, 2)].into_iter().enumerate() {
        let (sa, sb) = (side(&a, i, j), side(&b, i, j));
        if sa == sb {
            return false;
        }
        axis[k] = t.meet(sa, sb);
    }
    let used = [c, a[0], a[1], a[2], b[0], b[1], b[2]];
    if axis.iter().any(|p| used.contains(p)) || axis[0] == axis[1] || axis[1] == axis[2] || axis[0] == axis[2] {
        return false;
    }
    let l = t.join(axis[0], axis[1]);
    t.on(axis[2], l) && !t.on(c, l)
}

#[derive(Clone, Debug, Serialize)]
pub struct DesarguesCalibration {
    pub plane_order: usize,
    #[serde(serialize_with = "ser_big")]
    pub witnesses: BigUint,
    #[serde(serialize_with = "ser_big")]
    pub copies: BigUint,
    pub witnesses_per_copy: u64,
}

/// Witnesses per copy of the Desargues configuration, from the smallest
/// `PG(2,q)` containing a copy.
pub fn calibrate_desargues() -> Result<DesarguesCalibration> {
    let d = build_desargues_config()?;
    for q in [3u32, 4, 5] {
        let plane = build_pg2(q)?;
        let copies = count_copies(&d, plane.system())?;
        if copies.is_zero() {
            continue;
        }
        let witnesses = count_desargues_witnesses(&plane, DEFAULT_WITNESS_GUARD)?;
        let (per, rem) = witnesses.div_rem(&copies);
        if !rem.is_zero() {
            return Err(Error::Invariant(format!("{witnesses} witnesses for {copies} copies")));
        }
        let per = per
            .to_u64_digits()
            .first()
            .copied()
            .ok_or_else(|| Error::Invariant("no closing witnesses".into()))?;
        return Ok(DesarguesCalibration { plane_order: q as usize, witnesses, copies, witnesses_per_copy: per });
    }
    Err(Error::Infeasible("no small plane contains the Desargues configuration".into()))
}
