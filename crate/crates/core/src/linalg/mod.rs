//! Exact linear algebra over arbitrary-precision rationals.
//!
//! Every graded-piece computation in the crate reduces to row reduction over
//! `Q`. The public dense [`Mat`] API (`rref`, `kernel_basis`, `solve`) fixes
//! the observable conventions; internally all elimination runs on sorted
//! sparse rows through [`Echelon`], since the coordinate matrices coming from
//! monomial multiples are very sparse.
//!
//! The reduced row echelon form of a matrix is unique, so the outputs do not
//! depend on the order in which rows are fed to the eliminator.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

mod modular;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn rational_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// A sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a vector from arbitrary entries; duplicates are summed.
    pub fn from_entries(mut entries: Vec<(usize, Rational)>) -> Self {
        entries.sort_by_key(|(i, _)| *i);
        let mut out: Vec<(usize, Rational)> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc += v,
                _ => out.push((i, v)),
            }
        }
        out.retain(|(_, v)| !v.is_zero());
        SparseVec { entries: out }
    }

    pub fn from_dense(v: &[Rational]) -> Self {
        SparseVec {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    pub fn unit(i: usize) -> Self {
        SparseVec {
            entries: vec![(i, Rational::one())],
        }
    }

    pub fn to_dense(&self, n: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); n];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn get(&self, i: usize) -> Rational {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn scale(&self, c: &Rational) -> SparseVec {
        if c.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// Re-indexes every entry through `f`; `f` must be injective.
    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> SparseVec {
        SparseVec::from_entries(self.entries.iter().map(|(i, v)| (f(*i), v.clone())).collect())
    }

    /// `self - c * other`.
    pub fn sub_scaled(&self, c: &Rational, other: &SparseVec) -> SparseVec {
        if c.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, -(c * &b[j].1)));
                j += 1;
            } else {
                let v = &a[i].1 - c * &b[j].1;
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.sub_scaled(&-Rational::one(), other)
    }

    pub fn dot_dense(&self, v: &[Rational]) -> Rational {
        self.entries
            .iter()
            .fold(Rational::zero(), |acc, (i, x)| acc + x * &v[*i])
    }
}

/// Incremental Gaussian elimination over sparse rows.
///
/// Rows are kept in semi-echelon form: each stored row has a distinct
/// leading column with coefficient one and no entries in the pivot columns
/// of rows inserted before it. [`Echelon::into_rref`] finishes the back
/// substitution.
#[derive(Clone, Debug)]
pub struct Echelon {
    ncols: usize,
    rows: Vec<SparseVec>,
    pivot_row: Vec<Option<usize>>,
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon {
            ncols,
            rows: Vec::new(),
            pivot_row: vec![None; ncols],
        }
    }

    /// Batch construction; the stored rows come out fully reduced.
    pub fn from_rows(ncols: usize, rows: impl IntoIterator<Item = SparseVec>) -> Self {
        let rows: Vec<SparseVec> = rows.into_iter().collect();
        match modular::rref(&rows, ncols) {
            Some((rref, pivots)) => {
                let mut pivot_row = vec![None; ncols];
                for (i, &p) in pivots.iter().enumerate() {
                    pivot_row[p] = Some(i);
                }
                Echelon {
                    ncols,
                    rows: rref,
                    pivot_row,
                }
            }
            None => Echelon::from_rows_incremental(ncols, rows),
        }
    }

    /// Row-by-row rational elimination, independent of the modular path.
    pub fn from_rows_incremental(ncols: usize, rows: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut e = Echelon::new(ncols);
        for r in rows {
            e.insert(r);
        }
        e
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.ncols).filter(|&c| self.pivot_row[c].is_some()).collect()
    }

    /// Eliminates every pivot column from `v`.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut cur = v.clone();
        let mut cursor = 0usize;
        loop {
            let hit = cur
                .entries
                .iter()
                .find(|(c, _)| *c >= cursor && self.pivot_row[*c].is_some())
                .map(|(c, x)| (*c, x.clone()));
            match hit {
                Some((c, x)) => {
                    let r = self.pivot_row[c].expect("pivot present");
                    cur = cur.sub_scaled(&x, &self.rows[r]);
                    cursor = c + 1;
                }
                None => return cur,
            }
        }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        debug_assert!(v.entries.last().is_none_or(|(c, _)| *c < self.ncols));
        let r = self.reduce(&v);
        let Some((lead, x)) = r.leading() else {
            return false;
        };
        let inv = x.recip();
        let r = r.scale(&inv);
        self.pivot_row[lead] = Some(self.rows.len());
        self.rows.push(r);
        true
    }

    /// Returns the fully reduced rows sorted by pivot, and the pivot columns.
    pub fn into_rref(self) -> (Vec<SparseVec>, Vec<usize>) {
        let mut order: Vec<(usize, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.leading().unwrap().0, i))
            .collect();
        order.sort();
        let mut done: Vec<Option<SparseVec>> = vec![None; self.ncols];
        for &(p, i) in order.iter().rev() {
            let mut row = self.rows[i].clone();
            let hits: Vec<(usize, Rational)> = row
                .entries
                .iter()
                .filter(|(c, _)| *c > p && done[*c].is_some())
                .map(|(c, x)| (*c, x.clone()))
                .collect();
            for (c, x) in hits {
                row = row.sub_scaled(&x, done[c].as_ref().unwrap());
            }
            done[p] = Some(row);
        }
        let pivots: Vec<usize> = order.iter().map(|(p, _)| *p).collect();
        let rows = pivots.iter().map(|&p| done[p].take().unwrap()).collect();
        (rows, pivots)
    }
}

/// Right null space of the matrix whose rows are given, as a canonical basis:
/// one vector per free column `f`, with a one at `f` and the negated rref
/// entries at the pivot positions.
pub fn kernel_of_rows(rows: impl IntoIterator<Item = SparseVec>, ncols: usize) -> Vec<SparseVec> {
    let (rref, pivots) = Echelon::from_rows(ncols, rows).into_rref();
    kernel_from_rref(&rref, &pivots, ncols)
}

pub(crate) fn kernel_from_rref(rref: &[SparseVec], pivots: &[usize], ncols: usize) -> Vec<SparseVec> {
    let mut is_pivot = vec![false; ncols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    // column -> list of (row, value) for non-pivot entries
    let mut by_col: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); ncols];
    for (r, row) in rref.iter().enumerate() {
        for (c, x) in row.iter() {
            if !is_pivot[c] {
                by_col[c].push((r, x.clone()));
            }
        }
    }
    (0..ncols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut e: Vec<(usize, Rational)> =
                by_col[f].iter().map(|(r, x)| (pivots[*r], -x.clone())).collect();
            e.push((f, Rational::one()));
            SparseVec::from_entries(e)
        })
        .collect()
}

/// Canonical particular solution of `A x = b` (free variables zero), with `A`
/// given by sparse rows over `ncols` columns.
pub fn solve_rows(
    rows: impl IntoIterator<Item = SparseVec>,
    ncols: usize,
    b: &[Rational],
) -> Result<Vec<Rational>> {
    let augmented = rows.into_iter().zip(b.iter()).map(|(r, bi)| {
        let mut e = r.entries;
        if !bi.is_zero() {
            e.push((ncols, bi.clone()));
        }
        SparseVec { entries: e }
    });
    let (rref, pivots) = Echelon::from_rows(ncols + 1, augmented).into_rref();
    if pivots.last() == Some(&ncols) {
        return Err(Error::NoSolution);
    }
    let mut x = vec![Rational::zero(); ncols];
    for (row, &p) in rref.iter().zip(&pivots) {
        x[p] = row.get(ncols);
    }
    Ok(x)
}

/// [`solve_rows`] for several right-hand sides at once, sharing one
/// elimination. Entry `j` is `Err(NoSolution)` exactly when `b_j` lies outside
/// the column space.
pub fn solve_rows_multi(rows: Vec<SparseVec>, ncols: usize, bs: &[Vec<Rational>]) -> Vec<Result<Vec<Rational>>> {
    let augmented = rows.into_iter().enumerate().map(|(i, r)| {
        let mut e = r.entries;
        for (j, b) in bs.iter().enumerate() {
            if !b[i].is_zero() {
                e.push((ncols + j, b[i].clone()));
            }
        }
        SparseVec { entries: e }
    });
    let (rref, pivots) = Echelon::from_rows(ncols + bs.len(), augmented).into_rref();
    // rows whose pivot lies among the right-hand sides read `0 = ...`
    let split = pivots.partition_point(|&p| p < ncols);
    (0..bs.len())
        .map(|j| {
            if rref[split..].iter().any(|r| !r.get(ncols + j).is_zero()) {
                return Err(Error::NoSolution);
            }
            let mut x = vec![Rational::zero(); ncols];
            for (row, &p) in rref[..split].iter().zip(&pivots) {
                x[p] = row.get(ncols + j);
            }
            Ok(x)
        })
        .collect()
}

/// Transpose of a sparse row matrix with `ncols` columns.
pub fn transpose_rows(rows: &[SparseVec], ncols: usize) -> Vec<SparseVec> {
    let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for (c, x) in row.iter() {
            cols[c].push((r, x.clone()));
        }
    }
    // row indices were pushed in increasing order
    cols.into_iter().map(|entries| SparseVec { entries }).collect()
}

/// Rank of the span of the given rows.
pub fn rank_of_rows(rows: impl IntoIterator<Item = SparseVec>, ncols: usize) -> usize {
    Echelon::from_rows(ncols, rows).rank()
}

/// Dense rational matrix in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Panics if the rows have unequal lengths.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        Mat {
            rows: nrows,
            cols,
            data,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Mat::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    pub fn from_sparse_rows(rows: &[SparseVec], cols: usize) -> Self {
        Mat::from_rows(rows.iter().map(|r| r.to_dense(cols)).collect()).with_cols(cols)
    }

    fn with_cols(mut self, cols: usize) -> Self {
        if self.rows == 0 {
            self.cols = cols;
        }
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn sparse_rows(&self) -> Vec<SparseVec> {
        (0..self.rows).map(|r| SparseVec::from_dense(self.row(r))).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let v = out.get(r, c) + a * b;
                        out.set(r, c, v);
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(rational_string).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Reduced row echelon form (same shape as `m`, zero rows last) and the
/// pivot columns in increasing order.
pub fn rref(m: &Mat) -> (Mat, Vec<usize>) {
    let (rows, pivots) = Echelon::from_rows(m.cols, m.sparse_rows()).into_rref();
    let mut out = Mat::zeros(m.rows, m.cols);
    for (r, row) in rows.iter().enumerate() {
        for (c, x) in row.iter() {
            out.set(r, c, x.clone());
        }
    }
    (out, pivots)
}

pub fn rank(m: &Mat) -> usize {
    if m.rows <= m.cols {
        rank_of_rows(m.sparse_rows(), m.cols)
    } else {
        rank_of_rows(m.transpose().sparse_rows(), m.rows)
    }
}

/// Canonical basis of the right null space, one row per basis vector.
pub fn kernel_basis(m: &Mat) -> Mat {
    let k = kernel_of_rows(m.sparse_rows(), m.cols);
    Mat::from_sparse_rows(&k, m.cols)
}

/// Canonical particular solution of `m x = b` with free variables zero.
pub fn solve(m: &Mat, b: &[Rational]) -> Result<Vec<Rational>> {
    assert_eq!(b.len(), m.rows, "right-hand side length must equal row count");
    solve_rows(m.sparse_rows(), m.cols, b)
}

/// Sign-normalized copy: the first nonzero entry becomes positive.
pub fn normalize_sign(v: &SparseVec) -> SparseVec {
    match v.leading() {
        Some((_, x)) if x.is_negative() => v.scale(&-Rational::one()),
        _ => v.clone(),
    }
}
