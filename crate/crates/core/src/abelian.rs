//! Abelianization: exponent sums, integer matrices and Smith normal form.
//!
//! All arithmetic is on `i64` with checked operations; an overflow surfaces
//! as [`AbelError::Overflow`] instead of wrapping.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::hom::Homomorphism;
use crate::word::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelError {
    #[error("integer overflow during exact arithmetic")]
    Overflow,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

type Result<T> = std::result::Result<T, AbelError>;

fn add(a: i64, b: i64) -> Result<i64> {
    a.checked_add(b).ok_or(AbelError::Overflow)
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or(AbelError::Overflow)
}

/// Exponent sum per generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn zero(rank: usize) -> Self {
        ExponentVector(vec![0; rank])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn entries(&self) -> &[i64] {
        &self.0
    }
}

pub fn exponent_vector(w: &Word) -> ExponentVector {
    let mut v = vec![0i64; w.alphabet().rank()];
    for l in w.letters() {
        v[l.gen()] += l.sign();
    }
    ExponentVector(v)
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    /// `cols` is needed for matrices with no rows.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(AbelError::Dimension(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data: rows.concat() })
    }

    /// Rows must be nonempty and rectangular.
    pub fn from_nested(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows
            .first()
            .map(Vec::len)
            .ok_or_else(|| AbelError::Dimension("no rows".into()))?;
        Self::from_rows(rows, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[i64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(AbelError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0i64;
                for k in 0..self.cols {
                    acc = add(acc, mul(self[(i, k)], other[(k, j)])?)?;
                }
                out[(i, j)] = acc;
            }
        }
        Ok(out)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i64> {
        if self.rows != self.cols {
            return Err(AbelError::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|r| self.row(r).iter().map(|&x| x as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a[i][j]
                        .checked_mul(a[k][k])
                        .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                        .ok_or(AbelError::Overflow)?;
                    a[i][j] = num / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        i64::try_from(sign * a[n - 1][n - 1]).map_err(|_| AbelError::Overflow)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        for c in 0..self.cols {
            let v = add(self[(dst, c)], mul(k, self[(src, c)])?)?;
            self[(dst, c)] = v;
        }
        Ok(())
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: i64) -> Result<()> {
        for r in 0..self.rows {
            let v = add(self[(r, dst)], mul(k, self[(r, src)])?)?;
            self[(r, dst)] = v;
        }
        Ok(())
    }

    fn negate_row(&mut self, r: usize) -> Result<()> {
        for c in 0..self.cols {
            self[(r, c)] = self[(r, c)].checked_neg().ok_or(AbelError::Overflow)?;
        }
        Ok(())
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = i64;

    fn index(&self, (r, c): (usize, usize)) -> &i64 {
        assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut i64 {
        assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Row `k` is the exponent vector of the image of generator `k`.
pub fn image_matrix(h: &Homomorphism) -> IntMatrix {
    let cols = h.codomain().rank();
    let rows: Vec<Vec<i64>> = h.images().iter().map(|w| exponent_vector(w).0).collect();
    IntMatrix::from_rows(&rows, cols).expect("exponent vectors have codomain rank")
}

/// `u * m * v == d` with `u`, `v` unimodular and `d` diagonal, `d_1 | d_2 | ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)]).collect()
    }

    /// Recomputes `u * m * v` and the determinants of `u` and `v`, and
    /// checks the shape of `d`.
    pub fn verify(&self, m: &IntMatrix) -> Result<bool> {
        let product = self.u.mul(m)?.mul(&self.v)?;
        if product != self.d {
            return Ok(false);
        }
        if self.u.determinant()?.abs() != 1 || self.v.determinant()?.abs() != 1 {
            return Ok(false);
        }
        for r in 0..self.d.rows {
            for c in 0..self.d.cols {
                if r != c && self.d[(r, c)] != 0 {
                    return Ok(false);
                }
            }
        }
        let diag = self.diagonal();
        if diag.iter().any(|&x| x < 0) {
            return Ok(false);
        }
        Ok(diag.windows(2).all(|p| divides(p[0], p[1])))
    }
}

fn divides(a: i64, b: i64) -> bool {
    if a == 0 {
        b == 0
    } else {
        b % a == 0
    }
}

/// Smith normal form, pivoting on the least nonzero absolute value.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm> {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        let Some((pr, pc)) = least_entry(&d, t..rows, t..cols) else {
            break;
        };
        d.swap_rows(t, pr);
        u.swap_rows(t, pr);
        d.swap_cols(t, pc);
        v.swap_cols(t, pc);

        loop {
            let p = d[(t, t)];
            let mut clean = true;
            for i in t + 1..rows {
                let q = d[(i, t)].div_euclid(p);
                if q != 0 {
                    d.add_row(i, t, -q)?;
                    u.add_row(i, t, -q)?;
                }
                clean &= d[(i, t)] == 0;
            }
            for j in t + 1..cols {
                let q = d[(t, j)].div_euclid(p);
                if q != 0 {
                    d.add_col(j, t, -q)?;
                    v.add_col(j, t, -q)?;
                }
                clean &= d[(t, j)] == 0;
            }
            if !clean {
                // a remainder in the pivot row or column is smaller than p
                let in_col = (t + 1..rows)
                    .filter(|&i| d[(i, t)] != 0)
                    .map(|i| (d[(i, t)].unsigned_abs(), i, t));
                let in_row = (t + 1..cols)
                    .filter(|&j| d[(t, j)] != 0)
                    .map(|j| (d[(t, j)].unsigned_abs(), t, j));
                let (_, r, c) = in_col.chain(in_row).min().expect("nonzero remainder");
                d.swap_rows(t, r);
                u.swap_rows(t, r);
                d.swap_cols(t, c);
                v.swap_cols(t, c);
                continue;
            }
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| d[(i, j)] % p != 0);
            match bad {
                Some((i, _)) => {
                    d.add_row(t, i, 1)?;
                    u.add_row(t, i, 1)?;
                }
                None => break,
            }
        }
        if d[(t, t)] < 0 {
            d.negate_row(t)?;
            u.negate_row(t)?;
        }
    }
    Ok(SmithForm { u, d, v })
}

fn least_entry(
    d: &IntMatrix,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> Option<(usize, usize)> {
    rows.flat_map(|r| cols.clone().map(move |c| (r, c)))
        .filter(|&(r, c)| d[(r, c)] != 0)
        .min_by_key(|&(r, c)| d[(r, c)].unsigned_abs())
}

/// Order of `Z^ambient_rank / rowspace(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuotientOrder {
    Finite(u64),
    Infinite,
}

impl QuotientOrder {
    pub fn is_finite(self) -> bool {
        matches!(self, QuotientOrder::Finite(_))
    }
}

impl fmt::Display for QuotientOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientOrder::Finite(n) => write!(f, "{n}"),
            QuotientOrder::Infinite => f.write_str("INFINITE"),
        }
    }
}

impl Serialize for QuotientOrder {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            QuotientOrder::Finite(n) => s.serialize_u64(*n),
            QuotientOrder::Infinite => s.serialize_str("INFINITE"),
        }
    }
}

pub fn quotient_order(m: &IntMatrix, ambient_rank: usize) -> Result<QuotientOrder> {
    if m.cols != ambient_rank {
        return Err(AbelError::Dimension(format!(
            "matrix has {} columns, ambient rank is {ambient_rank}",
            m.cols
        )));
    }
    let snf = smith_normal_form(m)?;
    let nonzero: Vec<i64> = snf.diagonal().into_iter().filter(|&x| x != 0).collect();
    if nonzero.len() < ambient_rank {
        return Ok(QuotientOrder::Infinite);
    }
    let order = nonzero.iter().try_fold(1u64, |acc, &x| acc.checked_mul(x.unsigned_abs()));
    order.map(QuotientOrder::Finite).ok_or(AbelError::Overflow)
}
