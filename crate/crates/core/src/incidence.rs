//! Incidence systems, the projective-plane predicates and meet/join tables.
//!
//! Points are dense indices `0..num_points`. Every line is a strictly
//! ascending list of point indices and the line list itself is kept in
//! lexicographic order, so two systems with the same incidences compare
//! equal field by field.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IncidenceSystem {
    num_points: usize,
    lines: Vec<Vec<usize>>,
}

impl IncidenceSystem {
    /// Builds a system from arbitrary line lists. Each line is sorted; a point
    /// repeated within a line, an out-of-range index or a repeated line is an
    /// error.
    pub fn new(num_points: usize, lines: Vec<Vec<usize>>) -> Result<Self> {
        let mut lines = lines;
        for (i, line) in lines.iter_mut().enumerate() {
            line.sort_unstable();
            if let Some(&x) = line.iter().find(|&&x| x >= num_points) {
                return Err(Error::Malformed(format!(
                    "line {i} contains point {x} outside 0..{num_points}"
                )));
            }
            if line.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Malformed(format!("line {i} repeats a point")));
            }
        }
        lines.sort();
        if let Some(w) = lines.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Malformed(format!("repeated line {:?}", w[0])));
        }
        Ok(IncidenceSystem { num_points, lines })
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    pub fn line(&self, index: usize) -> &[usize] {
        &self.lines[index]
    }

    /// For each point, the ascending indices of the lines through it.
    pub fn lines_through(&self) -> Vec<Vec<usize>> {
        let mut pencils = vec![Vec::new(); self.num_points];
        for (j, line) in self.lines.iter().enumerate() {
            for &x in line {
                pencils[x].push(j);
            }
        }
        pencils
    }

    /// Applies a point relabeling: point `x` becomes `perm[x]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.num_points {
            return Err(Error::InvalidArgument(format!(
                "relabeling has length {}, expected {}",
                perm.len(),
                self.num_points
            )));
        }
        let mut seen = vec![false; self.num_points];
        for &y in perm {
            if y >= self.num_points || std::mem::replace(&mut seen[y], true) {
                return Err(Error::InvalidArgument("relabeling is not a permutation".into()));
            }
        }
        let lines = self
            .lines
            .iter()
            .map(|l| l.iter().map(|&x| perm[x]).collect())
            .collect();
        IncidenceSystem::new(self.num_points, lines)
    }

    /// The subsystem on `points` (in the given order) whose lines are the
    /// traces of the selected lines. Traces are taken as they are, so callers
    /// that need partial linear spaces should drop short traces themselves.
    pub fn induced(&self, points: &[usize], lines: &[usize]) -> Result<Self> {
        let mut index = vec![usize::MAX; self.num_points];
        for (i, &x) in points.iter().enumerate() {
            index[x] = i;
        }
        let traces = lines
            .iter()
            .map(|&j| {
                self.lines[j]
                    .iter()
                    .filter(|&&x| index[x] != usize::MAX)
                    .map(|&x| index[x])
                    .collect()
            })
            .collect();
        IncidenceSystem::new(points.len(), traces)
    }

    /// Hex SHA-256 of the `.inc` serialization.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(crate::format::write_inc(self).as_bytes()))
    }

    fn pair_lines(&self) -> HashMap<(usize, usize), usize> {
        let mut pairs = HashMap::new();
        for line in &self.lines {
            for (a, &x) in line.iter().enumerate() {
                for &y in &line[a + 1..] {
                    *pairs.entry((x, y)).or_insert(0) += 1;
                }
            }
        }
        pairs
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    Line(usize),
    Point(usize),
    PointPair(usize, usize),
    LinePair(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    PartialLinearSpace,
    LinearSpace,
    ProjectivePlane(usize),
    PAdmissible(u32),
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
}

impl ValidationReport {
    fn ok(verdict: Verdict) -> Self {
        ValidationReport { verdict, witness: None }
    }

    fn invalid(reason: impl Into<String>, witness: Witness) -> Self {
        ValidationReport {
            verdict: Verdict::Invalid(reason.into()),
            witness: Some(witness),
        }
    }

    /// True for every verdict that implies the partial-linear-space axioms.
    pub fn is_partial_linear(&self) -> bool {
        matches!(
            self.verdict,
            Verdict::PartialLinearSpace | Verdict::LinearSpace | Verdict::ProjectivePlane(_)
        )
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.verdict, Verdict::LinearSpace | Verdict::ProjectivePlane(_))
    }

    pub fn plane_order(&self) -> Option<usize> {
        match self.verdict {
            Verdict::ProjectivePlane(n) => Some(n),
            _ => None,
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.verdict {
            Verdict::Invalid(reason) => write!(f, "invalid ({reason})")?,
            v => write!(f, "{v:?}")?,
        }
        if let Some(w) = self.witness {
            write!(f, ", witness {w:?}")?;
        }
        Ok(())
    }
}

/// Checks that every line has at least two points and no pair of points lies
/// on two lines. Returns `LinearSpace` when every pair is covered exactly once.
pub fn validate_partial_linear(sys: &IncidenceSystem) -> ValidationReport {
    if let Some(j) = sys.lines.iter().position(|l| l.len() < 2) {
        return ValidationReport::invalid("line with fewer than two points", Witness::Line(j));
    }
    let pairs = sys.pair_lines();
    let mut repeated: Option<(usize, usize)> = None;
    for (&pair, &count) in &pairs {
        if count > 1 && repeated.is_none_or(|r| pair < r) {
            repeated = Some(pair);
        }
    }
    if let Some((x, y)) = repeated {
        return ValidationReport::invalid("two points on more than one line", Witness::PointPair(x, y));
    }
    let v = sys.num_points;
    if pairs.len() == v * v.saturating_sub(1) / 2 {
        ValidationReport::ok(Verdict::LinearSpace)
    } else {
        ValidationReport::ok(Verdict::PartialLinearSpace)
    }
}

/// Interchanges points and lines: dual point `j` is line `j` of `sys`, dual
/// lines are the pencils of the original points.
pub fn dual(sys: &IncidenceSystem) -> Result<IncidenceSystem> {
    if sys.lines.is_empty() {
        return Err(Error::InvalidArgument("dual of a system without lines".into()));
    }
    let pencils = sys.lines_through();
    if let Some(x) = pencils.iter().position(|p| p.is_empty()) {
        return Err(Error::InvalidArgument(format!("point {x} lies on no line")));
    }
    IncidenceSystem::new(sys.lines.len(), pencils)
}

/// Full classification: returns `ProjectivePlane(n)` iff the system and its
/// dual are linear spaces and any two lines miss a common point.
pub fn classify(sys: &IncidenceSystem) -> ValidationReport {
    let primal = validate_partial_linear(sys);
    if !primal.is_partial_linear() {
        return primal;
    }
    if primal.verdict != Verdict::LinearSpace {
        return primal;
    }
    let pencils = sys.lines_through();
    if let Some(x) = pencils.iter().position(|p| p.len() < 2) {
        return ValidationReport {
            verdict: Verdict::LinearSpace,
            witness: Some(Witness::Point(x)),
        };
    }
    let Ok(d) = dual(sys) else {
        return ValidationReport::ok(Verdict::LinearSpace);
    };
    let dual_report = validate_partial_linear(&d);
    if dual_report.verdict != Verdict::LinearSpace {
        // Two lines without a common point.
        let witness = disjoint_line_pair(sys);
        return ValidationReport {
            verdict: Verdict::LinearSpace,
            witness,
        };
    }
    let v = sys.num_points;
    for a in 0..sys.lines.len() {
        for b in a + 1..sys.lines.len() {
            let union = union_size(&sys.lines[a], &sys.lines[b]);
            if union >= v {
                return ValidationReport {
                    verdict: Verdict::LinearSpace,
                    witness: Some(Witness::LinePair(a, b)),
                };
            }
        }
    }
    let n = sys.lines[0].len() - 1;
    ValidationReport::ok(Verdict::ProjectivePlane(n))
}

fn disjoint_line_pair(sys: &IncidenceSystem) -> Option<Witness> {
    for a in 0..sys.lines.len() {
        for b in a + 1..sys.lines.len() {
            if intersection_size(&sys.lines[a], &sys.lines[b]) == 0 {
                return Some(Witness::LinePair(a, b));
            }
        }
    }
    None
}

pub(crate) fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn union_size(a: &[usize], b: &[usize]) -> usize {
    a.len() + b.len() - intersection_size(a, b)
}

/// Exactly `p²+p+1` points, lines of size `p+1`, any two lines meeting in
/// exactly one point.
pub fn is_p_admissible(sys: &IncidenceSystem, p: u32) -> bool {
    let p = p as usize;
    if sys.num_points != p * p + p + 1 || sys.lines.iter().any(|l| l.len() != p + 1) {
        return false;
    }
    (0..sys.lines.len()).all(|a| {
        (a + 1..sys.lines.len()).all(|b| intersection_size(&sys.lines[a], &sys.lines[b]) == 1)
    })
}

/// A validated projective plane with dense meet and join tables.
#[derive(Clone, Debug)]
pub struct Plane {
    system: IncidenceSystem,
    order: usize,
    lines_through: Vec<Vec<usize>>,
    incidence: Vec<bool>,
    meet: Vec<u32>,
    join: Vec<u32>,
}

pub const NO_ENTRY: u32 = u32::MAX;

impl Plane {
    pub fn system(&self) -> &IncidenceSystem {
        &self.system
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_points(&self) -> usize {
        self.system.num_points
    }

    pub fn num_lines(&self) -> usize {
        self.system.lines.len()
    }

    pub fn line(&self, index: usize) -> &[usize] {
        &self.system.lines[index]
    }

    pub fn lines_through(&self, point: usize) -> &[usize] {
        &self.lines_through[point]
    }

    pub fn incident(&self, point: usize, line: usize) -> bool {
        self.incidence[line * self.system.num_points + point]
    }

    /// The common point of two distinct lines.
    pub fn meet(&self, a: usize, b: usize) -> usize {
        debug_assert_ne!(a, b);
        self.meet[a * self.num_lines() + b] as usize
    }

    /// The line through two distinct points.
    pub fn join(&self, x: usize, y: usize) -> usize {
        debug_assert_ne!(x, y);
        self.join[x * self.num_points() + y] as usize
    }

    /// Raw row-major join table, `NO_ENTRY` on the diagonal.
    pub fn join_table(&self) -> &[u32] {
        &self.join
    }

    pub fn meet_table(&self) -> &[u32] {
        &self.meet
    }
}

/// Validates `sys` as a projective plane and precomputes its tables.
pub fn build_plane(sys: IncidenceSystem) -> Result<Plane> {
    let report = classify(&sys);
    let Some(order) = report.plane_order() else {
        return Err(Error::NotAPlane(report));
    };
    let v = sys.num_points;
    let b = sys.lines.len();
    let lines_through = sys.lines_through();
    let mut incidence = vec![false; v * b];
    let mut join = vec![NO_ENTRY; v * v];
    for (j, line) in sys.lines.iter().enumerate() {
        for &x in line {
            incidence[j * v + x] = true;
            for &y in line {
                if x != y {
                    join[x * v + y] = j as u32;
                }
            }
        }
    }
    let mut meet = vec![NO_ENTRY; b * b];
    for (x, pencil) in lines_through.iter().enumerate() {
        for &a in pencil {
            for &c in pencil {
                if a != c {
                    meet[a * b + c] = x as u32;
                }
            }
        }
    }
    Ok(Plane {
        system: sys,
        order,
        lines_through,
        incidence,
        meet,
        join,
    })
}
