//! Vectors and linear codes over a prime field `F_p`.
//!
//! Residues are stored one byte per coordinate as the integers `0..p`, which
//! also fixes the index order of [`WeightType`].

use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::incidence::{IncidenceSystem, Plane};

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

pub(crate) fn check_prime(p: u32) -> Result<u8> {
    if !is_prime(p) || p > 251 {
        return Err(Error::InvalidArgument(format!("{p} is not a prime below 256")));
    }
    Ok(p as u8)
}

#[inline]
pub(crate) fn inv_mod(a: u8, p: u8) -> u8 {
    // Fermat: a^(p-2).
    let (mut base, mut e, mut acc) = (a as u32, p as u32 - 2, 1u32);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u32;
        }
        base = base * base % p as u32;
        e >>= 1;
    }
    acc as u8
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FpVector {
    p: u8,
    coords: Vec<u8>,
}

impl FpVector {
    /// Reduces every coordinate modulo `p`.
    pub fn new(p: u32, coords: impl IntoIterator<Item = u32>) -> Result<Self> {
        let pp = check_prime(p)?;
        Ok(FpVector {
            p: pp,
            coords: coords.into_iter().map(|c| (c % p) as u8).collect(),
        })
    }

    pub(crate) fn from_raw(p: u8, coords: Vec<u8>) -> Self {
        debug_assert!(coords.iter().all(|&c| c < p));
        FpVector { p, coords }
    }

    pub fn zeros(p: u32, len: usize) -> Result<Self> {
        FpVector::new(p, std::iter::repeat_n(0, len))
    }

    /// Indicator vector of a point set.
    pub fn indicator(p: u32, len: usize, points: &[usize]) -> Result<Self> {
        let mut v = FpVector::zeros(p, len)?;
        for &x in points {
            if x >= len {
                return Err(Error::InvalidArgument(format!("point {x} outside 0..{len}")));
            }
            v.coords[x] = 1 % v.p;
        }
        Ok(v)
    }

    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn get(&self, i: usize) -> u8 {
        self.coords[i]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.coords[i] != 0).collect()
    }

    pub fn weight(&self) -> usize {
        self.coords.iter().filter(|&&c| c != 0).count()
    }

    pub fn type_of(&self) -> WeightType {
        let mut counts = vec![0u32; self.p as usize];
        for &c in &self.coords {
            counts[c as usize] += 1;
        }
        WeightType(counts)
    }

    fn check_compatible(&self, other: &FpVector) -> Result<()> {
        if self.p != other.p || self.len() != other.len() {
            return Err(Error::InvalidArgument(format!(
                "vectors over F_{} of length {} and F_{} of length {}",
                self.p,
                self.len(),
                other.p,
                other.len()
            )));
        }
        Ok(())
    }

    pub fn dot(&self, other: &FpVector) -> Result<u8> {
        self.check_compatible(other)?;
        let s: u32 = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| a as u32 * b as u32 % self.p as u32)
            .sum();
        Ok((s % self.p as u32) as u8)
    }

    /// `self + scale·other`.
    pub fn add_scaled(&self, other: &FpVector, scale: u32) -> Result<FpVector> {
        self.check_compatible(other)?;
        let p = self.p as u32;
        let s = scale % p;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| ((a as u32 + s * b as u32) % p) as u8)
            .collect();
        Ok(FpVector { p: self.p, coords })
    }

    pub fn scaled(&self, scale: u32) -> FpVector {
        let p = self.p as u32;
        FpVector {
            p: self.p,
            coords: self.coords.iter().map(|&a| (a as u32 * (scale % p) % p) as u8).collect(),
        }
    }
}

/// Value frequencies `(j_0, ..., j_{p-1})` of a vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightType(pub Vec<u32>);

impl WeightType {
    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    /// Hamming weight of any vector of this type.
    pub fn weight(&self) -> usize {
        self.total() - self.0.first().copied().unwrap_or(0) as usize
    }

    pub fn parse(text: &str) -> Result<Self> {
        let counts = text
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::Malformed(format!("bad weight type {text:?}")))?;
        if counts.is_empty() {
            return Err(Error::Malformed("empty weight type".into()));
        }
        Ok(WeightType(counts))
    }
}

impl fmt::Display for WeightType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A code stored as a generator matrix in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    p: u8,
    length: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

/// Gauss–Jordan elimination in place; returns pivot columns. The first
/// nonzero entry of each column is the pivot.
pub(crate) fn reduce(p: u8, rows: &mut Vec<Vec<u8>>, length: usize) -> Vec<usize> {
    let pp = p as u32;
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..length {
        let Some(found) = (r..rows.len()).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = inv_mod(rows[r][col], p) as u32;
        for c in &mut rows[r] {
            *c = (*c as u32 * inv % pp) as u8;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col] == 0 {
                continue;
            }
            let f = pp - row[col] as u32;
            for (c, &s) in row.iter_mut().zip(&pivot_row) {
                *c = ((*c as u32 + f * s as u32) % pp) as u8;
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

impl LinearCode {
    /// Row space of the given vectors.
    pub fn from_rows(p: u32, length: usize, rows: Vec<Vec<u8>>) -> Result<Self> {
        let pp = check_prime(p)?;
        let mut rows = rows;
        for row in &mut rows {
            if row.len() != length {
                return Err(Error::InvalidArgument(format!(
                    "row of length {} in a code of length {length}",
                    row.len()
                )));
            }
            for c in row.iter_mut() {
                *c %= pp;
            }
        }
        let pivots = reduce(pp, &mut rows, length);
        Ok(LinearCode { p: pp, length, rows, pivots })
    }

    pub fn p(&self) -> u32 {
        self.p as u32
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn row_vector(&self, i: usize) -> FpVector {
        FpVector::from_raw(self.p, self.rows[i].clone())
    }

    /// Kernel of the generator matrix, i.e. the orthogonal complement.
    pub fn dual(&self) -> LinearCode {
        let pp = self.p as u32;
        let is_pivot = {
            let mut m = vec![false; self.length];
            for &c in &self.pivots {
                m[c] = true;
            }
            m
        };
        let rows = (0..self.length)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![0u8; self.length];
                v[f] = 1;
                for (row, &pc) in self.rows.iter().zip(&self.pivots) {
                    v[pc] = ((pp - row[f] as u32) % pp) as u8;
                }
                v
            })
            .collect();
        LinearCode::from_rows(self.p as u32, self.length, rows).expect("same field and length")
    }

    /// Sum of two codes of the same length over the same field.
    pub fn sum(&self, other: &LinearCode) -> Result<LinearCode> {
        if self.p != other.p || self.length != other.length {
            return Err(Error::InvalidArgument("codes over different spaces".into()));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        LinearCode::from_rows(self.p as u32, self.length, rows)
    }

    /// `C ∩ C⊥`, computed as `(C + C⊥)⊥`.
    pub fn hull(&self) -> LinearCode {
        self.sum(&self.dual()).expect("dual lives in the same space").dual()
    }

    /// Membership by elimination against the reduced rows.
    pub fn contains(&self, w: &FpVector) -> Result<bool> {
        if w.p != self.p || w.len() != self.length {
            return Err(Error::InvalidArgument("vector outside the ambient space".into()));
        }
        let pp = self.p as u32;
        let mut rem: Vec<u32> = w.coords.iter().map(|&c| c as u32).collect();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let f = rem[pc];
            if f != 0 {
                for (r, &s) in rem.iter_mut().zip(row) {
                    *r = (*r + (pp - f) * s as u32) % pp;
                }
            }
        }
        Ok(rem.iter().all(|&r| r == 0))
    }

    /// Equality of row spaces (reduced echelon forms are unique).
    pub fn same_space(&self, other: &LinearCode) -> bool {
        self == other
    }

    /// Hex SHA-256 over `p`, the length and the reduced generator rows.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update([self.p]);
        h.update((self.length as u64).to_le_bytes());
        for row in &self.rows {
            h.update(row);
        }
        hex::encode(&h.finalize()[..16])
    }

    /// Generator rows as CSV, preceded by a `#` comment line.
    pub fn to_csv(&self, comment: &str) -> String {
        let mut out = String::new();
        writeln!(out, "# {comment}; p={} n={} k={}", self.p, self.length, self.dimension()).unwrap();
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(out, "{}", cells.join(",")).unwrap();
        }
        out
    }
}

/// The `F_p`-span of the line indicators of `sys`.
pub fn code_from_system(sys: &IncidenceSystem, p: u32) -> Result<LinearCode> {
    let pp = check_prime(p)?;
    let rows = sys
        .lines()
        .iter()
        .map(|l| {
            let mut v = vec![0u8; sys.num_points()];
            for &x in l {
                v[x] = 1 % pp;
            }
            v
        })
        .collect();
    LinearCode::from_rows(p, sys.num_points(), rows)
}

/// Membership in the code of a plane of prime order `p`: `⟨w,ℓ⟩ = ⟨w,1⟩` for
/// every line.
pub fn plane_membership(plane: &Plane, p: u32, w: &FpVector) -> Result<bool> {
    if plane.order() != p as usize || w.p() != p {
        return Err(Error::InvalidArgument(format!(
            "criterion needs p equal to the plane order {}",
            plane.order()
        )));
    }
    if w.len() != plane.num_points() {
        return Err(Error::InvalidArgument("vector length differs from the point count".into()));
    }
    let pp = p;
    let total = w.coords.iter().map(|&c| c as u32).sum::<u32>() % pp;
    Ok(plane
        .system()
        .lines()
        .iter()
        .all(|l| l.iter().map(|&x| w.coords[x] as u32).sum::<u32>() % pp == total))
}
