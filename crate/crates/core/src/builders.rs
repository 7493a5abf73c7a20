//! Constructors for the planes and configurations used throughout the crate.

use crate::error::{Error, Result};
use crate::field::{FiniteField, NearField9};
use crate::incidence::{build_plane, intersection_size, IncidenceSystem, Plane};

/// Nonzero triples over `GF(q)` whose leftmost nonzero coordinate is 1, in
/// lexicographic order.
fn normalized_triples(q: u8) -> Vec<[u8; 3]> {
    let mut out = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                let t = [a, b, c];
                if t.iter().find(|&&x| x != 0) == Some(&1) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// The Desarguesian plane `PG(2,q)`: points are normalized homogeneous
/// triples, lines their orthogonal complements.
pub fn build_pg2(q: u32) -> Result<Plane> {
    let field = FiniteField::new(q)?;
    let triples = normalized_triples(q as u8);
    let lines = triples
        .iter()
        .map(|u| {
            triples
                .iter()
                .enumerate()
                .filter(|(_, x)| {
                    let dot = (0..3).fold(0u8, |acc, i| field.add(acc, field.mul(u[i], x[i])));
                    dot == 0
                })
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    build_plane(IncidenceSystem::new(triples.len(), lines)?)
}

/// The projective completion of the affine near-field plane of order 9.
///
/// Affine point `(x, y)` has index `9x + y`; ideal point `81 + m` closes the
/// lines of slope `m` and `90` closes the vertical lines.
pub fn build_hall9() -> Result<Plane> {
    let nf = NearField9::new()?;
    let check = nf.check();
    if !check.is_proper_near_field() {
        return Err(Error::Invariant(format!("near-field laws failed: {check:?}")));
    }
    let f = nf.field();
    let mut lines: Vec<Vec<usize>> = Vec::with_capacity(91);
    for m in 0..9u8 {
        for b in 0..9u8 {
            let mut line: Vec<usize> = (0..9u8)
                .map(|x| 9 * x as usize + f.add(nf.circ(x, m), b) as usize)
                .collect();
            line.push(81 + m as usize);
            lines.push(line);
        }
    }
    for c in 0..9usize {
        let mut line: Vec<usize> = (0..9).map(|y| 9 * c + y).collect();
        line.push(90);
        lines.push(line);
    }
    lines.push((81..91).collect());
    build_plane(IncidenceSystem::new(91, lines)?)
}

pub const DEFAULT_POINT_BUDGET: usize = 100_000;

/// Stage `X_n` of the free completion of the 4-cycle.
pub fn free_plane_stage(n: usize, point_budget: usize) -> Result<IncidenceSystem> {
    free_plane_stages(n, point_budget).map(|mut stages| stages.pop().unwrap())
}

/// Stages `X_1, ..., X_n`. Points keep their indices from stage to stage: the
/// points of `X_k` are exactly `0..v_k` in every later stage.
pub fn free_plane_stages(n: usize, point_budget: usize) -> Result<Vec<IncidenceSystem>> {
    if n == 0 {
        return Err(Error::InvalidArgument("free plane stages start at n = 1".into()));
    }
    let mut num_points = 4usize;
    let mut lines: Vec<Vec<usize>> = vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]];
    let mut stages = vec![IncidenceSystem::new(num_points, lines.clone())?];
    for _ in 1..n {
        let mut pencils = vec![Vec::new(); num_points];
        for (j, l) in lines.iter().enumerate() {
            for &x in l {
                pencils[x].push(j);
            }
        }
        let mut new_points = Vec::new();
        for a in 0..lines.len() {
            for b in a + 1..lines.len() {
                if intersection_size(&lines[a], &lines[b]) == 0 {
                    new_points.push((a, b));
                }
            }
        }
        let mut new_lines = Vec::new();
        for x in 0..num_points {
            for y in x + 1..num_points {
                if intersection_size(&pencils[x], &pencils[y]) == 0 {
                    new_lines.push(vec![x, y]);
                }
            }
        }
        let next_points = num_points + new_points.len();
        if next_points > point_budget {
            return Err(Error::Budget(format!(
                "free plane stage {} needs {next_points} points, budget {point_budget}",
                stages.len() + 1
            )));
        }
        for (i, &(a, b)) in new_points.iter().enumerate() {
            lines[a].push(num_points + i);
            lines[b].push(num_points + i);
        }
        lines.extend(new_lines);
        num_points = next_points;
        stages.push(IncidenceSystem::new(num_points, lines.clone())?);
    }
    Ok(stages)
}

/// Deletes the flag `(point, line)` from a plane: keeps the points off `line`
/// and the traces of the lines missing `point`.
pub fn flag_deletion(plane: &Plane, point: usize, line: usize) -> Result<IncidenceSystem> {
    if !plane.incident(point, line) {
        return Err(Error::InvalidArgument(format!("point {point} is not on line {line}")));
    }
    let kept: Vec<usize> = (0..plane.num_points()).filter(|&x| !plane.incident(x, line)).collect();
    let lines: Vec<usize> = (0..plane.num_lines()).filter(|&j| !plane.incident(point, j)).collect();
    plane.system().induced(&kept, &lines)
}

/// The Pappus configuration: `PG(2,3)` with the flag (point 0, first line
/// through it) deleted.
pub fn build_pappus_config() -> Result<IncidenceSystem> {
    let plane = build_pg2(3)?;
    let line = plane.lines_through(0)[0];
    flag_deletion(&plane, 0, line)
}

/// The Desargues configuration on the Petersen graph: points and lines are the
/// 2-subsets of a 5-set, line `x` contains point `y` iff they are disjoint.
pub fn build_desargues_config() -> Result<IncidenceSystem> {
    let pairs: Vec<(usize, usize)> =
        (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect();
    let disjoint = |s: (usize, usize), t: (usize, usize)| {
        s.0 != t.0 && s.0 != t.1 && s.1 != t.0 && s.1 != t.1
    };
    let lines = pairs
        .iter()
        .map(|&s| (0..pairs.len()).filter(|&y| disjoint(s, pairs[y])).collect())
        .collect();
    IncidenceSystem::new(pairs.len(), lines)
}

/// A random partial linear space on `v` points: `attempts` random lines of
/// 2 to `max_line` points, each kept only if it covers no already covered pair.
pub fn random_partial_linear_space(v: usize, attempts: usize, max_line: usize, seed: u64) -> Result<IncidenceSystem> {
    use rand::seq::index::sample;
    use rand::{Rng, SeedableRng};
    if v < 2 || max_line < 2 {
        return Err(Error::InvalidArgument("need at least two points and lines of size two".into()));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut covered = vec![false; v * v];
    let mut lines = Vec::new();
    for _ in 0..attempts {
        let size = rng.gen_range(2..=max_line.min(v));
        let mut line = sample(&mut rng, v, size).into_vec();
        line.sort_unstable();
        let clash = line.iter().enumerate().any(|(i, &a)| line[i + 1..].iter().any(|&b| covered[a * v + b]));
        if clash {
            continue;
        }
        for (i, &a) in line.iter().enumerate() {
            for &b in &line[i + 1..] {
                covered[a * v + b] = true;
            }
        }
        lines.push(line);
    }
    IncidenceSystem::new(v, lines)
}

/// Small inputs for the inclusion-number pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    /// One line through all `size` points.
    SingleLine(usize),
    /// A `p`-admissible system with two lines meeting in point 0.
    TwoFullLines(u32),
    /// Three points, three 2-point lines.
    Triangle,
    /// `k` lines of `PG(2,p)`, no three concurrent, on all `p²+p+1` points.
    KLinesGeneric { k: usize, p: u32 },
}

pub fn build_pattern(pattern: Pattern) -> Result<IncidenceSystem> {
    match pattern {
        Pattern::SingleLine(size) => {
            if size < 2 {
                return Err(Error::InvalidArgument("a line needs at least two points".into()));
            }
            IncidenceSystem::new(size, vec![(0..size).collect()])
        }
        Pattern::TwoFullLines(p) => {
            let p = p as usize;
            if p < 2 {
                return Err(Error::InvalidArgument("p must be at least 2".into()));
            }
            let v = p * p + p + 1;
            let a: Vec<usize> = (0..=p).collect();
            let mut b: Vec<usize> = vec![0];
            b.extend(p + 1..=2 * p);
            IncidenceSystem::new(v, vec![a, b])
        }
        Pattern::Triangle => IncidenceSystem::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]),
        Pattern::KLinesGeneric { k, p } => {
            let plane = build_pg2(p)?;
            let mut chosen: Vec<usize> = Vec::new();
            for j in 0..plane.num_lines() {
                if chosen.len() == k {
                    break;
                }
                let concurrent = chosen.iter().enumerate().any(|(i, &a)| {
                    chosen[i + 1..].iter().any(|&b| plane.incident(plane.meet(a, b), j))
                });
                if !concurrent {
                    chosen.push(j);
                }
            }
            if chosen.len() < k {
                return Err(Error::InvalidArgument(format!(
                    "PG(2,{p}) has no {k} lines in general position"
                )));
            }
            let lines = chosen.iter().map(|&j| plane.line(j).to_vec()).collect();
            IncidenceSystem::new(plane.num_points(), lines)
        }
    }
}
