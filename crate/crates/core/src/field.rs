//! Small finite fields as lookup tables, plus the regular near-field of
//! order 9 used for the non-Desarguesian plane.
//!
//! An element of `GF(p^e)` is encoded as the integer whose base-`p` digits are
//! the coefficients of its polynomial representative, lowest degree first.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u32,
    degree: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

/// Monic irreducible modulus (coefficients lowest degree first) for each
/// supported order.
fn modulus_for(q: u32) -> Option<(u32, u32, Vec<u32>)> {
    Some(match q {
        2 | 3 | 5 | 7 | 11 => (q, 1, vec![0, 1]),
        4 => (2, 2, vec![1, 1, 1]),
        8 => (2, 3, vec![1, 1, 0, 1]),
        9 => (3, 2, vec![1, 0, 1]),
        _ => return None,
    })
}

fn digits(mut a: usize, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = (a % p as usize) as u32;
            a /= p as usize;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> usize {
    ds.iter().rev().fold(0, |acc, &d| acc * p as usize + d as usize)
}

impl FiniteField {
    /// Builds `GF(q)` for `q ∈ {2,3,4,5,7,8,9,11}` and checks the field axioms
    /// exhaustively.
    pub fn new(q: u32) -> Result<Self> {
        let (p, degree, modulus) = modulus_for(q).ok_or(Error::UnsupportedOrder(q))?;
        let q = q as usize;
        let e = degree as usize;
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            let da = digits(a, p, degree);
            for b in 0..q {
                let db = digits(b, p, degree);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&sum, p) as u8;

                let mut prod = vec![0u32; 2 * e];
                for i in 0..e {
                    for j in 0..e {
                        prod[i + j] = (prod[i + j] + da[i] * db[j]) % p;
                    }
                }
                // Reduce modulo the monic modulus from the top down.
                for top in (e..2 * e).rev() {
                    let c = prod[top];
                    if c != 0 {
                        prod[top] = 0;
                        for k in 0..e {
                            prod[top - e + k] = (prod[top - e + k] + (p - c) * modulus[k]) % p;
                        }
                    }
                }
                mul[a * q + b] = undigits(&prod[..e], p) as u8;
            }
        }
        let mut neg = vec![0u8; q];
        let mut inv = vec![0u8; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8;
            if a != 0 {
                inv[a] = (1..q)
                    .find(|&b| mul[a * q + b] == 1)
                    .ok_or_else(|| Error::Invariant(format!("GF({q}): {a} has no inverse")))?
                    as u8;
            }
        }
        let field = FiniteField { p, degree, q, modulus, add, mul, neg, inv };
        field.check_axioms()?;
        Ok(field)
    }

    fn check_axioms(&self) -> Result<()> {
        let q = self.q as u8;
        for a in 0..q {
            for b in 0..q {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return Err(Error::Invariant(format!("GF({}) not commutative", self.q)));
                }
                for c in 0..q {
                    let ok = self.add(self.add(a, b), c) == self.add(a, self.add(b, c))
                        && self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c))
                        && self.mul(a, self.add(b, c)) == self.add(self.mul(a, b), self.mul(a, c));
                    if !ok {
                        return Err(Error::Invariant(format!(
                            "GF({}) axiom failure at ({a},{b},{c})",
                            self.q
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.neg[b as usize])
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert_ne!(a, 0);
        self.inv[a as usize]
    }

    pub fn pow(&self, a: u8, mut e: u32) -> u8 {
        let (mut base, mut acc) = (a, 1u8);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_square(&self, a: u8) -> bool {
        a == 0 || (0..self.q as u8).any(|b| self.mul(b, b) == a)
    }
}

/// `GF(9)` with the twisted product `a∘b = a·b` if `b` is a square (or zero)
/// and `a³·b` otherwise.
#[derive(Clone, Debug)]
pub struct NearField9 {
    field: FiniteField,
    square: [bool; 9],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearFieldCheck {
    pub associative: bool,
    pub right_distributive: bool,
    pub multiplicative_group: bool,
    /// A triple with `a∘(b+c) ≠ a∘b + a∘c`, if one exists.
    pub left_distributivity_failure: Option<(u8, u8, u8)>,
}

impl NearFieldCheck {
    pub fn is_proper_near_field(&self) -> bool {
        self.associative
            && self.right_distributive
            && self.multiplicative_group
            && self.left_distributivity_failure.is_some()
    }
}

impl NearField9 {
    pub fn new() -> Result<Self> {
        let field = FiniteField::new(9)?;
        let mut square = [false; 9];
        for (a, s) in square.iter_mut().enumerate() {
            *s = field.is_square(a as u8);
        }
        Ok(NearField9 { field, square })
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    #[inline]
    pub fn circ(&self, a: u8, b: u8) -> u8 {
        if self.square[b as usize] {
            self.field.mul(a, b)
        } else {
            self.field.mul(self.field.pow(a, 3), b)
        }
    }

    /// Checks the near-field laws on all 729 triples.
    pub fn check(&self) -> NearFieldCheck {
        let f = &self.field;
        let mut associative = true;
        let mut right_distributive = true;
        let mut left_failure = None;
        for a in 0..9u8 {
            for b in 0..9u8 {
                for c in 0..9u8 {
                    associative &= self.circ(self.circ(a, b), c) == self.circ(a, self.circ(b, c));
                    right_distributive &=
                        self.circ(f.add(a, b), c) == f.add(self.circ(a, c), self.circ(b, c));
                    if left_failure.is_none()
                        && self.circ(a, f.add(b, c)) != f.add(self.circ(a, b), self.circ(a, c))
                    {
                        left_failure = Some((a, b, c));
                    }
                }
            }
        }
        let multiplicative_group = (1..9u8).all(|a| {
            self.circ(a, 1) == a
                && self.circ(1, a) == a
                && (1..9u8).any(|b| self.circ(a, b) == 1)
                && (1..9u8).all(|b| self.circ(a, b) != 0)
        });
        NearFieldCheck {
            associative,
            right_distributive,
            multiplicative_group,
            left_distributivity_failure: left_failure,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supported_orders_build() {
        for q in [2, 3, 4, 5, 7, 8, 9, 11] {
            let f = FiniteField::new(q).unwrap();
            assert_eq!(f.order(), q as usize);
            assert_eq!((f.characteristic() as usize).pow(f.degree()), q as usize);
        }
    }

    #[test]
    fn unsupported_orders_fail() {
        for q in [0, 1, 6, 10, 12, 13, 16] {
            assert!(matches!(FiniteField::new(q), Err(Error::UnsupportedOrder(_))));
        }
    }

    #[test]
    fn gf9_inverse_and_frobenius() {
        let f = FiniteField::new(9).unwrap();
        for a in 1..9u8 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            assert_eq!(f.pow(a, 8), 1);
        }
        // Four nonzero squares in GF(9).
        assert_eq!((1..9u8).filter(|&a| f.is_square(a)).count(), 4);
    }

    #[test]
    fn near_field_laws() {
        let nf = NearField9::new().unwrap();
        let check = nf.check();
        assert!(check.associative);
        assert!(check.right_distributive);
        assert!(check.multiplicative_group);
        let (a, b, c) = check.left_distributivity_failure.expect("must not be a field");
        let f = nf.field();
        assert_ne!(nf.circ(a, f.add(b, c)), f.add(nf.circ(a, b), nf.circ(a, c)));
        assert!(check.is_proper_near_field());
    }
}
