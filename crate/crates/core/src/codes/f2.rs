//! Bit-packed vectors and matrices over F2.

use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in support {
            v.flip(i);
        }
        v
    }

    pub fn random<R: Rng>(len: usize, rng: &mut R) -> Self {
        let mut v = BitVec::zeros(len);
        for w in &mut v.words {
            *w = rng.gen();
        }
        v.trim();
        v
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn dot(&self, other: &BitVec) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        for i in self.support() {
            v.set(i, true);
        }
        for i in other.support() {
            v.set(self.len + i, true);
        }
        v
    }

    pub fn permuted(&self, perm: &[usize]) -> BitVec {
        let mut v = BitVec::zeros(self.len);
        for i in self.support() {
            v.set(perm[i], true);
        }
        v
    }

    /// Hex digits, most significant bit first; the last digit is zero-padded.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.len.div_ceil(4));
        for chunk in 0..self.len.div_ceil(4) {
            let mut nibble = 0u8;
            for b in 0..4 {
                let i = chunk * 4 + b;
                if i < self.len && self.get(i) {
                    nibble |= 8 >> b;
                }
            }
            write!(s, "{nibble:x}").unwrap();
        }
        s
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<BitVec> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Parse(format!("hex row of {} digits for {len} bits", hex.len())));
        }
        let mut v = BitVec::zeros(len);
        for (chunk, c) in hex.chars().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {c:?}")))?;
            for b in 0..4 {
                if nibble & (8 >> b) != 0 {
                    let i = chunk * 4 + b;
                    if i >= len {
                        return Err(Error::Parse("nonzero padding bit".into()));
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

/// Row-reduced echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Rref {
    pub matrix: BitMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the pivot rows; zero iff `v` lies in the row space.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (row, &p) in self.matrix.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Shape(format!(
                "row of length {} in a matrix with {cols} columns",
                r.len()
            )));
        }
        Ok(BitMatrix { cols, rows })
    }

    pub fn from_dense(cols: usize, rows: &[Vec<u8>]) -> Result<Self> {
        BitMatrix::from_rows(cols, rows.iter().map(|r| BitVec::from_bits(r)).collect())
    }

    pub fn random<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Self {
        BitMatrix {
            cols,
            rows: (0..rows).map(|_| BitVec::random(cols, rng)).collect(),
        }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn push_row(&mut self, row: BitVec) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::Shape(format!(
                "row of length {} for {} columns",
                row.len(),
                self.cols
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVec::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.support() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.num_rows() {
            return Err(Error::Shape(format!(
                "cannot multiply {}×{} by {}×{}",
                self.num_rows(),
                self.cols,
                other.num_rows(),
                other.cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc = BitVec::zeros(other.cols);
                for k in r.support() {
                    acc.xor_assign(&other.rows[k]);
                }
                acc
            })
            .collect();
        Ok(BitMatrix { cols: other.cols, rows })
    }

    /// `self · otherᵀ`, computed row against row.
    pub fn mul_transpose(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Shape(format!(
                "column counts {} and {} differ",
                self.cols, other.cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|a| {
                let mut v = BitVec::zeros(other.num_rows());
                for (j, b) in other.rows.iter().enumerate() {
                    if a.dot(b) {
                        v.set(j, true);
                    }
                }
                v
            })
            .collect();
        Ok(BitMatrix {
            cols: other.num_rows(),
            rows,
        })
    }

    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let cols = self.cols * other.cols;
        let mut rows = Vec::with_capacity(self.num_rows() * other.num_rows());
        for a in &self.rows {
            let support = a.support();
            for b in &other.rows {
                let mut v = BitVec::zeros(cols);
                for &j in &support {
                    for l in b.support() {
                        v.set(j * other.cols + l, true);
                    }
                }
                rows.push(v);
            }
        }
        BitMatrix { cols, rows }
    }

    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.num_rows() != other.num_rows() {
            return Err(Error::Shape(format!(
                "hstack of {} and {} rows",
                self.num_rows(),
                other.num_rows()
            )));
        }
        Ok(BitMatrix {
            cols: self.cols + other.cols,
            rows: self.rows.iter().zip(&other.rows).map(|(a, b)| a.concat(b)).collect(),
        })
    }

    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Shape(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(BitMatrix { cols: self.cols, rows })
    }

    pub fn permute_columns(&self, perm: &[usize]) -> BitMatrix {
        BitMatrix {
            cols: self.cols,
            rows: self.rows.iter().map(|r| r.permuted(perm)).collect(),
        }
    }

    pub fn rref(&self) -> Rref {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(c)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
        }
        rows.truncate(r);
        Rref {
            matrix: BitMatrix { cols: self.cols, rows },
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank()
    }

    /// A full-rank matrix with the same row space.
    pub fn row_basis(&self) -> BitMatrix {
        self.rref().matrix
    }

    /// Basis of `{x : self · x = 0}`, one vector per row.
    pub fn kernel(&self) -> BitMatrix {
        let rref = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &rref.pivots {
            is_pivot[p] = true;
        }
        let rows = (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = BitVec::zeros(self.cols);
                v.set(f, true);
                for (row, &p) in rref.matrix.rows.iter().zip(&rref.pivots) {
                    if row.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect();
        BitMatrix { cols: self.cols, rows }
    }

    pub fn same_row_space(&self, other: &BitMatrix) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let a = self.rref();
        let b = other.rref();
        a.pivots == b.pivots && a.matrix == b.matrix
    }

    pub fn max_row_weight(&self) -> usize {
        self.rows.iter().map(BitVec::weight).max().unwrap_or(0)
    }

    pub fn max_col_weight(&self) -> usize {
        let mut counts = vec![0usize; self.cols];
        for r in &self.rows {
            for j in r.support() {
                counts[j] += 1;
            }
        }
        counts.into_iter().max().unwrap_or(0)
    }

    pub fn to_hex_rows(&self) -> Vec<String> {
        self.rows.iter().map(BitVec::to_hex).collect()
    }

    pub fn from_hex_rows(cols: usize, rows: &[String]) -> Result<BitMatrix> {
        let rows = rows
            .iter()
            .map(|h| BitVec::from_hex(cols, h))
            .collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix { cols, rows })
    }

    /// MacKay alist text: `N M`, maximum column and row weights, the weight
    /// lists, then 1-based zero-padded adjacency for columns and rows.
    pub fn to_alist(&self) -> String {
        let t = self.transpose();
        let col_lists: Vec<Vec<usize>> = t.rows.iter().map(BitVec::support).collect();
        let row_lists: Vec<Vec<usize>> = self.rows.iter().map(BitVec::support).collect();
        let max_col = col_lists.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = row_lists.iter().map(Vec::len).max().unwrap_or(0);
        let join = |xs: &mut dyn Iterator<Item = usize>| xs.map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        writeln!(out, "{} {}", self.cols, self.num_rows()).unwrap();
        writeln!(out, "{max_col} {max_row}").unwrap();
        writeln!(out, "{}", join(&mut col_lists.iter().map(Vec::len))).unwrap();
        writeln!(out, "{}", join(&mut row_lists.iter().map(Vec::len))).unwrap();
        for (lists, width) in [(&col_lists, max_col), (&row_lists, max_row)] {
            for l in lists {
                let mut padded: Vec<usize> = l.iter().map(|x| x + 1).collect();
                padded.resize(width, 0);
                writeln!(out, "{}", join(&mut padded.into_iter())).unwrap();
            }
        }
        out
    }

    pub fn from_alist(text: &str) -> Result<BitMatrix> {
        let mut nums = text.split_whitespace().map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("alist token {t:?} is not a non-negative integer")))
        });
        let mut next = || {
            nums.next()
                .unwrap_or_else(|| Err(Error::Parse("alist ends early".into())))
        };
        let (n, m) = (next()?, next()?);
        let (max_col, max_row) = (next()?, next()?);
        let col_w = (0..n).map(|_| next()).collect::<Result<Vec<_>>>()?;
        let row_w = (0..m).map(|_| next()).collect::<Result<Vec<_>>>()?;
        let mut h = BitMatrix::zeros(m, n);
        for (j, &w) in col_w.iter().enumerate() {
            let mut seen = 0;
            for _ in 0..max_col {
                let i = next()?;
                if i == 0 {
                    continue;
                }
                if i > m {
                    return Err(Error::Parse(format!("row index {i} exceeds {m}")));
                }
                h.rows[i - 1].set(j, true);
                seen += 1;
            }
            if seen != w {
                return Err(Error::Parse(format!(
                    "column {} lists {seen} entries, weight says {w}",
                    j + 1
                )));
            }
        }
        for (i, &w) in row_w.iter().enumerate() {
            let mut listed = Vec::new();
            for _ in 0..max_row {
                let j = next()?;
                if j != 0 {
                    listed.push(j - 1);
                }
            }
            if listed.len() != w || listed.iter().any(|&j| j >= n || !h.rows[i].get(j)) {
                return Err(Error::Parse(format!("row {} adjacency disagrees with columns", i + 1)));
            }
            if h.rows[i].weight() != w {
                return Err(Error::Parse(format!("row {} weight mismatch", i + 1)));
            }
        }
        Ok(h)
    }
}
