//! Isomorphism, canonical forms, automorphism and copy counting.
//!
//! Canonical labeling is individualization/refinement on the bipartite
//! point/line graph. Points with identical pencils ("twins") are merged into a
//! single weighted vertex before the search, and only lines are ever
//! individualized: once the lines are totally ordered, every point is pinned
//! down by its pencil up to twin swaps. The canonical form is the
//! lexicographically least encoding over all leaves, and the automorphism
//! group order is the number of leaves attaining it times the product of the
//! twin-class factorials.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::incidence::{build_plane, classify, validate_partial_linear, IncidenceSystem, Plane};

pub type BigCount = BigUint;

pub const MAX_CANONICAL_POINTS: usize = 200;
pub const DEFAULT_NODE_BUDGET: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    /// `point_order[i]` is the original point placed at canonical position `i`.
    pub point_order: Vec<usize>,
    /// `line_order[i]` is the original line placed at canonical position `i`.
    pub line_order: Vec<usize>,
    pub bytes: Vec<u8>,
}

impl CanonicalForm {
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(&Sha256::digest(&self.bytes)[..8])
    }
}

/// Twin classes and the compressed bipartite graph.
struct Compressed {
    num_lines: usize,
    /// Pencil (ascending line indices) of each twin class.
    class_pencil: Vec<Vec<usize>>,
    /// Original points in each class, ascending.
    class_points: Vec<Vec<usize>>,
    /// Vertices `0..classes` are twin classes, then the lines.
    adj: Vec<Vec<u32>>,
    initial: Vec<u32>,
}

impl Compressed {
    fn new(sys: &IncidenceSystem) -> Self {
        let pencils = sys.lines_through();
        let mut classes: HashMap<&[usize], usize> = HashMap::new();
        let mut class_pencil: Vec<Vec<usize>> = Vec::new();
        let mut class_points: Vec<Vec<usize>> = Vec::new();
        for (x, pencil) in pencils.iter().enumerate() {
            let id = *classes.entry(pencil.as_slice()).or_insert_with(|| {
                class_pencil.push(pencil.clone());
                class_points.push(Vec::new());
                class_pencil.len() - 1
            });
            class_points[id].push(x);
        }
        let c = class_pencil.len();
        let b = sys.num_lines();
        let mut adj = vec![Vec::new(); c + b];
        for (id, pencil) in class_pencil.iter().enumerate() {
            for &j in pencil {
                adj[id].push((c + j) as u32);
                adj[c + j].push(id as u32);
            }
        }
        // Classes are colored by multiplicity, lines all alike.
        let mut keys: Vec<(u32, usize)> = class_points.iter().map(|p| (0, p.len())).collect();
        keys.extend(std::iter::repeat_n((1, 0), b));
        let initial = rank(&keys);
        Compressed {
            num_lines: b,
            class_pencil,
            class_points,
            adj,
            initial,
        }
    }

    fn num_classes(&self) -> usize {
        self.class_pencil.len()
    }

    /// Iterated color refinement to a stable ordered partition.
    fn refine(&self, colors: &mut Vec<u32>) {
        let n = colors.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut buf: Vec<u32> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        loop {
            let before = colors.iter().max().map_or(0, |m| m + 1);
            offsets.clear();
            buf.clear();
            for nbrs in &self.adj {
                offsets.push(buf.len());
                let start = buf.len();
                buf.extend(nbrs.iter().map(|&w| colors[w as usize]));
                buf[start..].sort_unstable();
            }
            offsets.push(buf.len());
            let sig = |i: usize| &buf[offsets[i]..offsets[i + 1]];
            order.sort_by(|&a, &b| colors[a].cmp(&colors[b]).then_with(|| sig(a).cmp(sig(b))));
            let mut next = vec![0u32; n];
            let mut c = 0u32;
            for w in 0..n {
                if w > 0 {
                    let (a, b) = (order[w - 1], order[w]);
                    if colors[a] != colors[b] || sig(a) != sig(b) {
                        c += 1;
                    }
                }
                next[order[w]] = c;
            }
            *colors = next;
            if c + 1 == before {
                return;
            }
        }
    }
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<u32> {
    let mut sorted: Vec<T> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter().map(|k| sorted.binary_search(k).unwrap() as u32).collect()
}

struct Leaf {
    bytes: Vec<u8>,
    line_order: Vec<usize>,
    class_order: Vec<usize>,
}

struct TreeSearch<'a> {
    g: &'a Compressed,
    num_points: usize,
    best: Option<Leaf>,
    best_count: u64,
    nodes: u64,
    budget: u64,
}

impl TreeSearch<'_> {
    fn run(&mut self, colors: Vec<u32>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget(format!(
                "canonical search exceeded {} nodes",
                self.budget
            )));
        }
        let mut colors = colors;
        self.g.refine(&mut colors);
        let c = self.g.num_classes();
        // First largest non-singleton line cell.
        let mut cells: HashMap<u32, Vec<usize>> = HashMap::new();
        for j in 0..self.g.num_lines {
            cells.entry(colors[c + j]).or_default().push(j);
        }
        let target = cells
            .iter()
            .filter(|(_, members)| members.len() > 1)
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(a.0)))
            .map(|(_, m)| m.clone());
        match target {
            None => {
                self.leaf(&colors);
                Ok(())
            }
            Some(members) => {
                for &j in &members {
                    let child: Vec<u32> = colors
                        .iter()
                        .enumerate()
                        .map(|(w, &col)| 2 * col + u32::from(w != c + j))
                        .collect();
                    self.run(child)?;
                }
                Ok(())
            }
        }
    }

    fn leaf(&mut self, colors: &[u32]) {
        let c = self.g.num_classes();
        let mut line_order: Vec<usize> = (0..self.g.num_lines).collect();
        line_order.sort_by_key(|&j| colors[c + j]);
        let mut position = vec![0u16; self.g.num_lines];
        for (i, &j) in line_order.iter().enumerate() {
            position[j] = i as u16;
        }
        let columns: Vec<Vec<u16>> = self
            .g
            .class_pencil
            .iter()
            .map(|pencil| {
                let mut col: Vec<u16> = pencil.iter().map(|&j| position[j]).collect();
                col.sort_unstable();
                col
            })
            .collect();
        let mut class_order: Vec<usize> = (0..c).collect();
        class_order.sort_by(|&a, &b| columns[a].cmp(&columns[b]));
        let mut bytes = Vec::with_capacity(4 + 4 * self.num_points);
        bytes.extend((self.num_points as u16).to_be_bytes());
        bytes.extend((self.g.num_lines as u16).to_be_bytes());
        for &id in &class_order {
            for _ in 0..self.g.class_points[id].len() {
                bytes.extend((columns[id].len() as u16).to_be_bytes());
                for &pos in &columns[id] {
                    bytes.extend(pos.to_be_bytes());
                }
            }
        }
        match &self.best {
            Some(best) if bytes > best.bytes => {}
            Some(best) if bytes == best.bytes => self.best_count += 1,
            _ => {
                self.best = Some(Leaf { bytes, line_order, class_order });
                self.best_count = 1;
            }
        }
    }
}

fn search(sys: &IncidenceSystem, budget: u64) -> Result<(Compressed, Leaf, u64)> {
    if sys.num_points() > MAX_CANONICAL_POINTS {
        return Err(Error::Budget(format!(
            "canonical form limited to {MAX_CANONICAL_POINTS} points, got {}",
            sys.num_points()
        )));
    }
    let g = Compressed::new(sys);
    let mut tree = TreeSearch {
        g: &g,
        num_points: sys.num_points(),
        best: None,
        best_count: 0,
        nodes: 0,
        budget,
    };
    tree.run(g.initial.clone())?;
    let leaf = tree.best.take().expect("the search tree has at least one leaf");
    let count = tree.best_count;
    Ok((g, leaf, count))
}

pub fn canonical_form(sys: &IncidenceSystem) -> Result<CanonicalForm> {
    canonical_form_with_budget(sys, DEFAULT_NODE_BUDGET)
}

pub fn canonical_form_with_budget(sys: &IncidenceSystem, budget: u64) -> Result<CanonicalForm> {
    let (g, leaf, _) = search(sys, budget)?;
    let point_order = leaf
        .class_order
        .iter()
        .flat_map(|&id| g.class_points[id].iter().copied())
        .collect();
    Ok(CanonicalForm {
        point_order,
        line_order: leaf.line_order,
        bytes: leaf.bytes,
    })
}

pub fn factorial(n: usize) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Order of the automorphism group (point permutations mapping lines onto
/// lines).
pub fn automorphism_count(sys: &IncidenceSystem) -> Result<BigCount> {
    let (g, _, leaves) = search(sys, DEFAULT_NODE_BUDGET)?;
    let twins = g
        .class_points
        .iter()
        .fold(BigUint::one(), |acc, pts| acc * factorial(pts.len()));
    Ok(twins * BigUint::from(leaves))
}

/// Cheap isomorphism invariants: sizes, degree and line-size histograms and,
/// for projective planes, the number of quadrangles whose diagonal points are
/// collinear.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub num_points: usize,
    pub num_lines: usize,
    pub point_degrees: Vec<usize>,
    pub line_sizes: Vec<usize>,
    pub fano_quadrangles: Option<u64>,
}

pub fn invariants(sys: &IncidenceSystem) -> Invariants {
    let mut point_degrees: Vec<usize> = sys.lines_through().iter().map(Vec::len).collect();
    point_degrees.sort_unstable();
    let mut line_sizes: Vec<usize> = sys.lines().iter().map(Vec::len).collect();
    line_sizes.sort_unstable();
    let fano_quadrangles = match classify(sys).plane_order() {
        Some(n) if n <= 16 => build_plane(sys.clone()).ok().map(|p| fano_quadrangle_count(&p)),
        _ => None,
    };
    Invariants {
        num_points: sys.num_points(),
        num_lines: sys.num_lines(),
        point_degrees,
        line_sizes,
        fano_quadrangles,
    }
}

/// Unordered quadrangles whose three diagonal points are collinear, i.e. the
/// quadrangles spanning a Fano subplane.
pub fn fano_quadrangle_count(plane: &Plane) -> u64 {
    let v = plane.num_points();
    let mut count = 0;
    for a in 0..v {
        for b in a + 1..v {
            let ab = plane.join(a, b);
            for c in b + 1..v {
                if plane.incident(c, ab) {
                    continue;
                }
                let (ac, bc) = (plane.join(a, c), plane.join(b, c));
                for d in c + 1..v {
                    if plane.incident(d, ab) || plane.incident(d, ac) || plane.incident(d, bc) {
                        continue;
                    }
                    let e = plane.meet(ab, plane.join(c, d));
                    let f = plane.meet(ac, plane.join(b, d));
                    let g = plane.meet(plane.join(a, d), bc);
                    if plane.incident(g, plane.join(e, f)) {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

/// Equality of canonical forms, short-circuited by the invariants above.
pub fn are_isomorphic(a: &IncidenceSystem, b: &IncidenceSystem) -> Result<bool> {
    if invariants(a) != invariants(b) {
        return Ok(false);
    }
    Ok(canonical_form(a)?.bytes == canonical_form(b)?.bytes)
}

fn require_partial_linear(sys: &IncidenceSystem, role: &str) -> Result<()> {
    let report = validate_partial_linear(sys);
    if report.is_partial_linear() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{role} is not a partial linear space: {report}")))
    }
}

fn falling(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    (0..k).try_fold(1u128, |acc, i| acc.checked_mul((n - i) as u128))
}

fn falling_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i))
}

struct MonoSearch<'a> {
    x_lines: &'a [Vec<usize>],
    x_points: usize,
    /// Required twin-class sizes per depth, keyed by restricted pencil mask.
    demand: Vec<Vec<(u64, usize)>>,
    depth_total: usize,
    x_mask: Vec<u64>,
    used: Vec<bool>,
    assigned: Vec<usize>,
    hist: HashMap<u64, usize>,
    small: u128,
    big: BigUint,
    nodes: u64,
    budget: u64,
}

impl MonoSearch<'_> {
    /// Region sizes for the current partial assignment; `None` if some twin
    /// class no longer fits.
    fn feasible(&mut self) -> bool {
        let d = self.assigned.len();
        self.hist.clear();
        let mut union = 0;
        for (bit, &j) in self.assigned.iter().enumerate() {
            for &x in &self.x_lines[j] {
                let m = self.x_mask[x];
                if m.trailing_zeros() as usize == bit {
                    union += 1;
                    *self.hist.entry(m).or_insert(0) += 1;
                }
            }
        }
        self.hist.insert(0, self.x_points - union);
        self.demand[d]
            .iter()
            .all(|(mask, need)| self.hist.get(mask).copied().unwrap_or(0) >= *need)
    }

    fn run(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget(format!(
                "monomorphism search exceeded {} nodes",
                self.budget
            )));
        }
        if !self.feasible() {
            return Ok(());
        }
        let d = self.assigned.len();
        if d == self.depth_total {
            let demand = &self.demand[d];
            let mut small = Some(1u128);
            for (mask, need) in demand {
                let have = self.hist.get(mask).copied().unwrap_or(0);
                small = small.and_then(|s| falling(have, *need).and_then(|f| s.checked_mul(f)));
            }
            match small.and_then(|s| self.small.checked_add(s)) {
                Some(total) => self.small = total,
                None => {
                    let mut term = BigUint::one();
                    for (mask, need) in demand {
                        term *= falling_big(self.hist.get(mask).copied().unwrap_or(0), *need);
                    }
                    self.big += term;
                }
            }
            return Ok(());
        }
        for j in 0..self.x_lines.len() {
            if self.used[j] {
                continue;
            }
            self.used[j] = true;
            self.assigned.push(j);
            for &x in &self.x_lines[j] {
                self.x_mask[x] |= 1 << d;
            }
            let r = self.run();
            for &x in &self.x_lines[j] {
                self.x_mask[x] &= !(1 << d);
            }
            self.assigned.pop();
            self.used[j] = false;
            r?;
        }
        Ok(())
    }
}

/// Order in which the lines of `y` are mapped: longest first, then the line
/// meeting the already placed ones the most.
fn line_order(y: &IncidenceSystem) -> Vec<usize> {
    let b = y.num_lines();
    let mut covered = vec![false; y.num_points()];
    let mut order = Vec::with_capacity(b);
    let mut placed = vec![false; b];
    for _ in 0..b {
        let next = (0..b)
            .filter(|&j| !placed[j])
            .max_by(|&a, &c| {
                let score = |j: usize| {
                    let l = y.line(j);
                    (l.iter().filter(|&&x| covered[x]).count(), l.len())
                };
                score(a).cmp(&score(c)).then(c.cmp(&a))
            })
            .unwrap();
        placed[next] = true;
        order.push(next);
        for &x in y.line(next) {
            covered[x] = true;
        }
    }
    order
}

/// Number of monomorphisms `I(y, x)`: injective point maps sending every line
/// of `y` onto the full trace of a distinct line of `x` on the image points.
///
/// The search assigns lines of `x` to the lines of `y` one at a time; point
/// images are then counted per twin class as falling factorials of the
/// matching regions, so structures with huge symmetric point sets stay cheap.
pub fn count_monomorphisms(y: &IncidenceSystem, x: &IncidenceSystem) -> Result<BigCount> {
    count_monomorphisms_with_budget(y, x, DEFAULT_NODE_BUDGET)
}

pub fn count_monomorphisms_with_budget(
    y: &IncidenceSystem,
    x: &IncidenceSystem,
    budget: u64,
) -> Result<BigCount> {
    require_partial_linear(y, "pattern")?;
    require_partial_linear(x, "target")?;
    if y.num_lines() > 64 {
        return Err(Error::InvalidArgument("patterns are limited to 64 lines".into()));
    }
    let order = line_order(y);
    let k = order.len();
    let mut y_mask = vec![0u64; y.num_points()];
    for (bit, &j) in order.iter().enumerate() {
        for &p in y.line(j) {
            y_mask[p] |= 1 << bit;
        }
    }
    let demand = (0..=k)
        .map(|d| {
            let keep = if d == 64 { u64::MAX } else { (1u64 << d) - 1 };
            let mut counts: HashMap<u64, usize> = HashMap::new();
            for &m in &y_mask {
                *counts.entry(m & keep).or_insert(0) += 1;
            }
            let mut v: Vec<(u64, usize)> = counts.into_iter().collect();
            v.sort_unstable();
            v
        })
        .collect();
    let mut s = MonoSearch {
        x_lines: x.lines(),
        x_points: x.num_points(),
        demand,
        depth_total: k,
        x_mask: vec![0; x.num_points()],
        used: vec![false; x.num_lines()],
        assigned: Vec::with_capacity(k),
        hist: HashMap::new(),
        small: 0,
        big: BigUint::zero(),
        nodes: 0,
        budget,
    };
    s.run()?;
    Ok(s.big + BigUint::from(s.small))
}

/// Number of subsystems of `x` isomorphic to `y`, as `I(y,x) / #Aut(y)`.
pub fn count_copies(y: &IncidenceSystem, x: &IncidenceSystem) -> Result<BigCount> {
    let monos = count_monomorphisms(y, x)?;
    let aut = automorphism_count(y)?;
    let (q, r) = monos.div_rem(&aut);
    if !r.is_zero() {
        return Err(Error::Invariant(format!(
            "monomorphism count {monos} is not divisible by #Aut = {aut}"
        )));
    }
    Ok(q)
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
pub(crate) fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for t in i + 1..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

/// Direct subsystem enumeration: point subsets of the right size, then line
/// subsets among the traces, each compared to `y` by canonical form. Only for
/// small inputs; `limit` caps the number of point subsets.
pub fn count_copies_direct(y: &IncidenceSystem, x: &IncidenceSystem, limit: u64) -> Result<BigCount> {
    require_partial_linear(y, "pattern")?;
    require_partial_linear(x, "target")?;
    let (vy, vx) = (y.num_points(), x.num_points());
    if vy > 12 {
        return Err(Error::InvalidArgument("direct enumeration is limited to 12-point patterns".into()));
    }
    let subsets = crate::census::binomial(vx as u64, vy as u64);
    if subsets > limit as u128 {
        return Err(Error::Budget(format!("{subsets} point subsets exceed limit {limit}")));
    }
    let target = canonical_form(y)?.bytes;
    let target_inv = invariants(y);
    let mut count = 0u64;
    let mut failure = None;
    for_each_combination(vx, vy, |pts| {
        if failure.is_some() {
            return;
        }
        let mut index = vec![usize::MAX; vx];
        for (i, &p) in pts.iter().enumerate() {
            index[p] = i;
        }
        let traces: Vec<Vec<usize>> = x
            .lines()
            .iter()
            .map(|l| l.iter().filter(|&&p| index[p] != usize::MAX).map(|&p| index[p]).collect::<Vec<_>>())
            .filter(|t| t.len() >= 2)
            .collect();
        for_each_combination(traces.len(), y.num_lines(), |chosen| {
            if failure.is_some() {
                return;
            }
            let lines = chosen.iter().map(|&t| traces[t].clone()).collect();
            let sub = match IncidenceSystem::new(vy, lines) {
                Ok(s) => s,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            };
            let inv = invariants(&sub);
            if inv.point_degrees != target_inv.point_degrees || inv.line_sizes != target_inv.line_sizes {
                return;
            }
            match canonical_form(&sub) {
                Ok(cf) if cf.bytes == target => count += 1,
                Ok(_) => {}
                Err(e) => failure = Some(e),
            }
        });
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(BigUint::from(count)),
    }
}
