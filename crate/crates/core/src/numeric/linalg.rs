use std::ops::Range;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rat::{sigma, Rat};
use crate::error::{check_dim, Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RatVec(Vec<Rat>);

impl RatVec {
    pub fn new(entries: Vec<Rat>) -> Self {
        RatVec(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RatVec(vec![Rat::zero(); dim])
    }

    /// Standard basis vector `e_i` of length `dim`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rat::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        RatVec(xs.iter().map(|&x| Rat::int(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> &Rat {
        &self.0[i]
    }

    pub fn as_slice(&self) -> &[Rat] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    pub fn into_vec(self) -> Vec<Rat> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rat::is_zero)
    }

    pub fn slice(&self, range: Range<usize>) -> RatVec {
        RatVec(self.0[range].to_vec())
    }

    /// Copy with entry `i` replaced.
    pub fn with(&self, i: usize, value: Rat) -> RatVec {
        let mut v = self.clone();
        v.0[i] = value;
        v
    }

    /// Copy with `block` written starting at `offset`.
    pub fn with_block(&self, offset: usize, block: &RatVec) -> RatVec {
        let mut v = self.clone();
        v.0[offset..offset + block.dim()].clone_from_slice(&block.0);
        v
    }

    pub fn concat(parts: &[&RatVec]) -> RatVec {
        RatVec(parts.iter().flat_map(|p| p.0.iter().cloned()).collect())
    }

    pub fn add(&self, other: &RatVec) -> Result<RatVec> {
        check_dim("vector add", self.dim(), other.dim())?;
        Ok(RatVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect()))
    }

    pub fn sub(&self, other: &RatVec) -> Result<RatVec> {
        check_dim("vector sub", self.dim(), other.dim())?;
        Ok(RatVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scale(&self, c: &Rat) -> RatVec {
        RatVec(self.0.iter().map(|x| x * c).collect())
    }

    pub fn dot(&self, other: &RatVec) -> Result<Rat> {
        check_dim("dot product", self.dim(), other.dim())?;
        let mut acc = Rat::zero();
        for (a, b) in self.0.iter().zip(&other.0) {
            if !a.is_zero() && !b.is_zero() {
                acc += &(a * b);
            }
        }
        Ok(acc)
    }

    pub fn map_sigma(&self) -> RatVec {
        RatVec(self.0.iter().map(sigma).collect())
    }

    pub(crate) fn add_assign(&mut self, other: &RatVec) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            if !b.is_zero() {
                *a += b;
            }
        }
    }
}

impl From<Vec<Rat>> for RatVec {
    fn from(v: Vec<Rat>) -> Self {
        RatVec(v)
    }
}

impl std::fmt::Debug for RatVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

impl std::fmt::Display for RatVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

/// Rational matrix. Rows are kept sparse internally; the serialized form is
/// the dense row-major list of rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMat {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Rat)>>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMat {
            rows,
            cols,
            data: vec![Vec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.into_iter().enumerate() {
            check_dim("matrix row length", cols, row.len())?;
            for (c, x) in row.into_iter().enumerate() {
                m.set(r, c, x);
            }
        }
        Ok(m)
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::int(x)).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Rat {
        assert!(r < self.rows && c < self.cols, "matrix index out of bounds");
        match self.data[r].binary_search_by_key(&c, |(j, _)| *j) {
            Ok(k) => self.data[r][k].1.clone(),
            Err(_) => Rat::zero(),
        }
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rat) {
        assert!(r < self.rows && c < self.cols, "matrix index out of bounds");
        let row = &mut self.data[r];
        match row.binary_search_by_key(&c, |(j, _)| *j) {
            Ok(k) if value.is_zero() => {
                row.remove(k);
            }
            Ok(k) => row[k].1 = value,
            Err(_) if value.is_zero() => {}
            Err(k) => row.insert(k, (c, value)),
        }
    }

    /// Adds `value` to entry `(r, c)`.
    pub fn add_to(&mut self, r: usize, c: usize, value: &Rat) {
        let cur = self.get(r, c);
        self.set(r, c, cur + value);
    }

    /// Nonzero entries of row `r` as `(column, value)` pairs in column order.
    pub fn row_entries(&self, r: usize) -> &[(usize, Rat)] {
        &self.data[r]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rat>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c)).collect())
            .collect()
    }

    pub fn matvec(&self, x: &RatVec) -> Result<RatVec> {
        check_dim("matrix-vector product", self.cols, x.dim())?;
        let xs = x.as_slice();
        let out = self
            .data
            .iter()
            .map(|row| {
                let mut acc = Rat::zero();
                for (c, w) in row {
                    let xc = &xs[*c];
                    if !xc.is_zero() {
                        acc += &(w * xc);
                    }
                }
                acc
            })
            .collect();
        Ok(RatVec::new(out))
    }

    pub fn matmul(&self, other: &RatMat) -> Result<RatMat> {
        check_dim("matrix product", self.cols, other.rows)?;
        let mut out = RatMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let mut acc = vec![Rat::zero(); other.cols];
            for (k, a) in &self.data[r] {
                for (c, b) in &other.data[*k] {
                    acc[*c] += &(a * b);
                }
            }
            for (c, x) in acc.into_iter().enumerate() {
                out.set(r, c, x);
            }
        }
        Ok(out)
    }
}

impl std::fmt::Debug for RatMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RatMat({}x{}) ", self.rows, self.cols)?;
        f.debug_list().entries(self.to_dense()).finish()
    }
}

impl Serialize for RatMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_dense().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<Rat>>::deserialize(d)?;
        RatMat::from_rows(rows).map_err(D::Error::custom)
    }
}

/// `W x + b`.
pub fn affine(w: &RatMat, x: &RatVec, b: &RatVec) -> Result<RatVec> {
    check_dim("affine bias", w.rows(), b.dim())?;
    let mut y = w.matvec(x)?;
    y.add_assign(b);
    Ok(y)
}

pub(crate) fn require_square(context: &str, m: &RatMat, d: usize) -> Result<()> {
    if m.rows() != d || m.cols() != d {
        return Err(Error::Dimension {
            context: format!("{context} ({}x{})", m.rows(), m.cols()),
            expected: d,
            found: if m.rows() != d { m.rows() } else { m.cols() },
        });
    }
    Ok(())
}
