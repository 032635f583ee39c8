//! Dense bit-packed linear algebra over GF(2).
//!
//! Vectors pack 64 bits per word, little-endian within a word. Bits past
//! `len` in the last word are always zero so that word-level comparisons,
//! hashing and popcounts are exact.

use std::fmt;

use crate::error::{AtgError, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = u64::MAX;
        }
        v.mask_tail();
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from a string of `0`/`1` characters (other characters are ignored).
    pub fn from_str01(s: &str) -> Self {
        Self::from_bits(s.chars().filter(|c| *c == '0' || *c == '1').map(|c| c == '1'))
    }

    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    /// Low `len` bits of `mask`.
    pub fn from_u64(len: usize, mask: u64) -> Self {
        assert!(len <= WORD);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = mask;
            v.mask_tail();
        }
        v
    }

    /// Packs the vector into a single word. Panics if `len > 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD, "vector of length {} does not fit a word", self.len);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        let bit = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= bit;
        } else {
            self.words[i / WORD] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in and");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn or_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in or");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.and_assign(other);
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    /// Number of positions set in both vectors.
    pub fn overlap(&self, other: &BitVector) -> usize {
        assert_eq!(self.len, other.len, "length mismatch in overlap");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// Indices of set bits, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let tz = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(wi, w)| wi * WORD + w.trailing_zeros() as usize)
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn to_u8s(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }

    /// Bits `start..start+len` as a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len);
        let mut out = BitVector::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl serde::Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != cols) {
            return Err(AtgError::Dimension(format!(
                "row {i} has {} columns, expected {cols}",
                r.len()
            )));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Parses rows of `0`/`1` strings. Panics on ragged input; intended for literals.
    pub fn from_str_rows(rows: &[&str]) -> Self {
        let data: Vec<BitVector> = rows.iter().map(|r| BitVector::from_str01(r)).collect();
        let cols = data.first().map_or(0, BitVector::len);
        Self::from_rows(cols, data).expect("ragged matrix literal")
    }

    pub fn from_u8_rows(rows: &[Vec<u8>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len());
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(AtgError::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            if let Some(bad) = r.iter().find(|&&b| b > 1) {
                return Err(AtgError::Dimension(format!("row {i} holds non-binary entry {bad}")));
            }
            data.push(BitVector::from_bits(r.iter().map(|&b| b == 1)));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVector> {
        self.data.iter()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_bits(self.data.iter().map(|r| r.get(c)))
    }

    /// Total number of ones.
    pub fn weight(&self) -> usize {
        self.data.iter().map(BitVector::weight).sum()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.iter_ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(AtgError::Dimension(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok(BitVector::from_bits(self.data.iter().map(|r| r.dot(v))))
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(AtgError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            for k in row.iter_ones() {
                out.data[r].xor_assign(&other.data[k]);
            }
        }
        Ok(out)
    }

    /// Kronecker product.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for r1 in 0..self.rows {
            for c1 in self.data[r1].iter_ones() {
                for r2 in 0..other.rows {
                    for c2 in other.data[r2].iter_ones() {
                        out.set(r1 * other.rows + r2, c1 * other.cols + c2, true);
                    }
                }
            }
        }
        out
    }

    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(AtgError::Dimension(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.concat(b))
            .collect();
        Ok(BitMatrix {
            rows: self.rows,
            cols: self.cols + other.cols,
            data,
        })
    }

    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(AtgError::Dimension(format!(
                "vstack of {} and {} columns",
                self.cols, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Ok(BitMatrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn push_row(&mut self, row: BitVector) -> Result<()> {
        if row.len() != self.cols {
            return Err(AtgError::Dimension(format!(
                "row of length {} pushed to {} columns",
                row.len(),
                self.cols
            )));
        }
        self.data.push(row);
        self.rows += 1;
        Ok(())
    }

    /// Reduced row echelon form together with the pivot column of each nonzero row.
    pub fn reduced(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.eliminate(None);
        (m, pivots)
    }

    /// In-place Gauss-Jordan elimination, scanning columns left to right.
    /// Row operations are mirrored onto `rhs` when given.
    fn eliminate(&mut self, mut rhs: Option<&mut BitVector>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| self.data[i].get(c)) else {
                continue;
            };
            self.data.swap(r, p);
            if let Some(rhs) = rhs.as_deref_mut() {
                let (a, b) = (rhs.get(r), rhs.get(p));
                rhs.set(r, b);
                rhs.set(p, a);
            }
            let pivot_row = self.data[r].clone();
            for i in 0..self.rows {
                if i != r && self.data[i].get(c) {
                    self.data[i].xor_assign(&pivot_row);
                    if let Some(rhs) = rhs.as_deref_mut() {
                        if rhs.get(r) {
                            rhs.flip(i);
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

pub fn rank(m: &BitMatrix) -> usize {
    m.reduced().1.len()
}

/// Solves `m x = y`. Free variables are set to zero, so the returned
/// solution is the one determined by the leftmost pivot columns.
pub fn solve(m: &BitMatrix, y: &BitVector) -> Result<Option<BitVector>> {
    if y.len() != m.rows() {
        return Err(AtgError::Dimension(format!(
            "right-hand side of length {} for {} rows",
            y.len(),
            m.rows()
        )));
    }
    let mut a = m.clone();
    let mut rhs = y.clone();
    let pivots = a.eliminate(Some(&mut rhs));
    if (pivots.len()..m.rows()).any(|i| rhs.get(i)) {
        return Ok(None);
    }
    let mut x = BitVector::zeros(m.cols());
    for (r, &c) in pivots.iter().enumerate() {
        if rhs.get(r) {
            x.set(c, true);
        }
    }
    Ok(Some(x))
}

/// Basis of the right kernel `{x : m x = 0}`, one vector per free column.
pub fn nullspace_basis(m: &BitMatrix) -> Vec<BitVector> {
    let (red, pivots) = m.reduced();
    let mut is_pivot = vec![false; m.cols()];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..m.cols())
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = BitVector::zeros(m.cols());
            v.set(free, true);
            for (r, &pc) in pivots.iter().enumerate() {
                if red.get(r, free) {
                    v.set(pc, true);
                }
            }
            v
        })
        .collect()
}

/// Whether `v` lies in the row space of `m`.
pub fn in_row_space(m: &BitMatrix, v: &BitVector) -> bool {
    if m.rows() == 0 {
        return v.is_zero();
    }
    solve(&m.transpose(), v)
        .expect("dimensions agree by construction")
        .is_some()
}

/// Inverse of a square matrix, if it exists.
pub fn inverse(m: &BitMatrix) -> Option<BitMatrix> {
    if m.rows() != m.cols() {
        return None;
    }
    let n = m.rows();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = BitVector::zeros(n);
        e.set(j, true);
        cols.push(solve(m, &e).ok()??);
    }
    let mut inv = BitMatrix::zeros(n, n);
    for (j, col) in cols.iter().enumerate() {
        for i in col.iter_ones() {
            inv.set(i, j, true);
        }
    }
    Some(inv)
}

/// Incrementally maintained echelon basis, used to test independence of a
/// stream of vectors against everything inserted so far.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    rows: Vec<(usize, BitVector)>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        Self {
            len,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; zero result means `v` is in the span.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.len);
        let mut r = v.clone();
        for (p, row) in &self.rows {
            if r.get(*p) {
                r.xor_assign(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v` and returns whether it was independent.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.first_one() else {
            return false;
        };
        for (_, row) in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&r);
            }
        }
        self.rows.push((p, r));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming() -> BitMatrix {
        BitMatrix::from_str_rows(&["1010101", "0110011", "0001111"])
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&BitMatrix::identity(3)), 3);
        assert_eq!(rank(&BitMatrix::zeros(2, 5)), 0);
        assert_eq!(rank(&hamming()), 3);
    }

    #[test]
    fn solve_identity() {
        let y = BitVector::from_str01("101");
        let x = solve(&BitMatrix::identity(3), &y).unwrap().unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn solve_picks_pivot_solution() {
        let m = BitMatrix::from_str_rows(&["1111"]);
        let y = BitVector::from_str01("1");
        // all 8 solutions of x0+x1+x2+x3 = 1 are valid; the pivot rule picks the
        // one with every free variable cleared
        let solutions: Vec<u64> = (0u64..16)
            .filter(|x| x.count_ones() % 2 == 1)
            .collect();
        assert_eq!(solutions.len(), 8);
        let x = solve(&m, &y).unwrap().unwrap();
        assert_eq!(x, BitVector::from_str01("1000"));
    }

    #[test]
    fn solve_inconsistent() {
        let m = BitMatrix::zeros(1, 3);
        assert!(solve(&m, &BitVector::from_str01("1")).unwrap().is_none());
    }

    #[test]
    fn solve_dimension_mismatch() {
        let m = BitMatrix::identity(3);
        assert!(matches!(
            solve(&m, &BitVector::zeros(2)),
            Err(AtgError::Dimension(_))
        ));
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace_basis(&BitMatrix::identity(2)).is_empty());

        let ones = BitMatrix::from_str_rows(&["1111"]);
        let basis = nullspace_basis(&ones);
        assert_eq!(basis.len(), 3);
        assert!(basis.iter().all(|v| v.weight() % 2 == 0));

        let h = hamming();
        let basis = nullspace_basis(&h);
        assert_eq!(basis.len(), 4);
        for v in &basis {
            assert!(h.mul_vec(v).unwrap().is_zero());
        }
        let stacked = BitMatrix::from_rows(7, basis).unwrap();
        assert_eq!(rank(&stacked), 4);
    }

    #[test]
    fn tail_bits_stay_clear() {
        let v = BitVector::ones(70);
        assert_eq!(v.weight(), 70);
        let w = BitVector::ones(70).xor(&BitVector::zeros(70));
        assert_eq!(v, w);
    }

    #[test]
    fn inverse_roundtrip() {
        let m = BitMatrix::from_str_rows(&["110", "011", "001"]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv).unwrap(), BitMatrix::identity(3));
        assert!(inverse(&BitMatrix::from_str_rows(&["11", "11"])).is_none());
    }

    #[test]
    fn kron_shape() {
        let a = BitMatrix::from_str_rows(&["11"]);
        let k = a.kron(&BitMatrix::identity(2));
        assert_eq!(k, BitMatrix::from_str_rows(&["1010", "0101"]));
    }
}
