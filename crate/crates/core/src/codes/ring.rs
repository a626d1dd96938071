//! Matrices over the group algebra `F2[x]/(x^ℓ − 1)`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::f2::{BitMatrix, BitVec};
use crate::error::{Error, Result};

/// A polynomial over F2 modulo `x^ℓ − 1`, stored as its set of exponents.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly(pub BTreeSet<u32>);

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn monomial(a: u32, l: u32) -> Self {
        Poly(BTreeSet::from([a % l]))
    }

    pub fn from_exponents(exps: &[u32], l: u32) -> Self {
        let mut p = Poly::zero();
        for &a in exps {
            p.toggle(a % l);
        }
        p
    }

    fn toggle(&mut self, a: u32) {
        if !self.0.remove(&a) {
            self.0.insert(a);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        Poly(self.0.symmetric_difference(&other.0).copied().collect())
    }

    pub fn mul(&self, other: &Poly, l: u32) -> Poly {
        let mut p = Poly::zero();
        for &a in &self.0 {
            for &b in &other.0 {
                p.toggle((a + b) % l);
            }
        }
        p
    }

    /// The involution `x ↦ x^{-1}`.
    pub fn conj(&self, l: u32) -> Poly {
        Poly(self.0.iter().map(|&a| (l - a) % l).collect())
    }

    /// Parses sums like `1+x+x^3`; `0` is the zero polynomial.
    pub fn parse(s: &str, l: u32) -> Result<Poly> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s == "0" {
            return Ok(Poly::zero());
        }
        let mut exps = Vec::new();
        for term in s.split('+') {
            let a = match term {
                "1" => 0,
                "x" => 1,
                t => t
                    .strip_prefix("x^")
                    .and_then(|e| e.parse::<u32>().ok())
                    .ok_or_else(|| Error::Parse(format!("bad polynomial term {term:?}")))?,
            };
            exps.push(a);
        }
        Ok(Poly::from_exponents(&exps, l))
    }

    /// `ℓ×ℓ` circulant with a one at `(i + a, i)` for each exponent `a`.
    pub fn circulant(&self, l: u32) -> BitMatrix {
        let l = l as usize;
        let mut m = BitMatrix::zeros(l, l);
        for &a in &self.0 {
            for i in 0..l {
                m.set((i + a as usize) % l, i, !m.get((i + a as usize) % l, i));
            }
        }
        m
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .map(|&a| match a {
                0 => "1".to_string(),
                1 => "x".to_string(),
                a => format!("x^{a}"),
            })
            .collect();
        write!(f, "{}", terms.join("+"))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupAlgebraMatrix {
    l: u32,
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GroupAlgebraJson {
    pub l: u32,
    pub rows: Vec<Vec<String>>,
}

impl GroupAlgebraMatrix {
    pub fn zeros(l: u32, rows: usize, cols: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::Shape("ring modulus must be positive".into()));
        }
        Ok(GroupAlgebraMatrix {
            l,
            rows,
            cols,
            entries: vec![Poly::zero(); rows * cols],
        })
    }

    pub fn identity(l: u32, n: usize) -> Result<Self> {
        let mut m = GroupAlgebraMatrix::zeros(l, n, n)?;
        for i in 0..n {
            m.set(i, i, Poly::monomial(0, l));
        }
        Ok(m)
    }

    pub fn parse(l: u32, rows: &[Vec<&str>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = GroupAlgebraMatrix::zeros(l, rows.len(), cols)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape("ragged polynomial matrix".into()));
            }
            for (j, s) in row.iter().enumerate() {
                m.set(i, j, Poly::parse(s, l)?);
            }
        }
        Ok(m)
    }

    pub fn from_json(j: &GroupAlgebraJson) -> Result<Self> {
        let rows: Vec<Vec<&str>> = j.rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        GroupAlgebraMatrix::parse(j.l, &rows)
    }

    pub fn to_json(&self) -> GroupAlgebraJson {
        GroupAlgebraJson {
            l: self.l,
            rows: (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect())
                .collect(),
        }
    }

    pub fn modulus(&self) -> u32 {
        self.l
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[i * self.cols + j] = p;
    }

    /// `M*`: transpose with every entry conjugated.
    pub fn conj_transpose(&self) -> Self {
        let mut t = GroupAlgebraMatrix::zeros(self.l, self.cols, self.rows).unwrap();
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).conj(self.l));
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.l != other.l {
            return Err(Error::GroupMismatch);
        }
        if self.cols != other.rows {
            return Err(Error::Shape("ring matrix product shapes".into()));
        }
        let mut m = GroupAlgebraMatrix::zeros(self.l, self.rows, other.cols)?;
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j), self.l));
                }
                m.set(i, j, acc);
            }
        }
        Ok(m)
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        if self.l != other.l {
            return Err(Error::GroupMismatch);
        }
        let mut m = GroupAlgebraMatrix::zeros(self.l, self.rows * other.rows, self.cols * other.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..other.rows {
                    for t in 0..other.cols {
                        m.set(
                            i * other.rows + k,
                            j * other.cols + t,
                            self.get(i, j).mul(other.get(k, t), self.l),
                        );
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.l != other.l {
            return Err(Error::GroupMismatch);
        }
        if self.rows != other.rows {
            return Err(Error::Shape("ring hstack row counts".into()));
        }
        let mut m = GroupAlgebraMatrix::zeros(self.l, self.rows, self.cols + other.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(m)
    }

    /// Replaces each entry by its `ℓ×ℓ` circulant block.
    pub fn expand(&self) -> BitMatrix {
        let l = self.l as usize;
        let mut rows = vec![BitVec::zeros(self.cols * l); self.rows * l];
        for i in 0..self.rows {
            for j in 0..self.cols {
                for &a in &self.get(i, j).0 {
                    for c in 0..l {
                        rows[i * l + (c + a as usize) % l].flip(j * l + c);
                    }
                }
            }
        }
        BitMatrix::from_rows(self.cols * l, rows).expect("consistent widths")
    }
}
