//! Sparse exact linear algebra.
//!
//! Matrices are stored by columns. [`QMatrix`] carries rational entries and
//! is used wherever coefficients may be fractional; [`IntMatrix`] carries
//! machine integers and is used for the (large, ±1-valued) geometric maps.
//! Ranks of integer matrices are computed by fraction-free column reduction
//! with content normalization; arithmetic is checked and falls back to exact
//! rationals on overflow.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

pub type SparseQ = Vec<(usize, Q)>;
pub type SparseZ = Vec<(u32, i64)>;

/// `a + c·b` for sorted sparse rational vectors.
pub fn axpy_q(a: &[(usize, Q)], c: &Q, b: &[(usize, Q)]) -> SparseQ {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + c * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Sorts and merges duplicate indices, dropping zeros.
pub fn normalize_q(mut v: Vec<(usize, Q)>) -> SparseQ {
    v.sort_by_key(|e| e.0);
    let mut out: SparseQ = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y += x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

/// Sorts and merges duplicate indices, dropping zeros.
pub fn normalize_z(mut v: Vec<(u32, i64)>) -> SparseZ {
    v.sort_unstable_by_key(|e| e.0);
    let mut out: SparseZ = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some((j, y)) if *j == i => *y += x,
            _ => out.push((i, x)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

/// A sparse rational matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: Vec<SparseQ>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        QMatrix {
            rows: n,
            cols: (0..n).map(|i| vec![(i, Q::one())]).collect(),
        }
    }

    /// Columns may be unsorted and contain repeated indices.
    pub fn from_columns(rows: usize, cols: Vec<Vec<(usize, Q)>>) -> Self {
        let cols: Vec<SparseQ> = cols.into_iter().map(normalize_q).collect();
        debug_assert!(cols.iter().all(|c| c.iter().all(|e| e.0 < rows)));
        QMatrix { rows, cols }
    }

    /// Builds from dense row-major data.
    pub fn from_rows(rows: &[Vec<Q>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut cols = vec![Vec::new(); ncols];
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), ncols);
            for (j, x) in r.iter().enumerate() {
                if !x.is_zero() {
                    cols[j].push((i, x.clone()));
                }
            }
        }
        QMatrix {
            rows: rows.len(),
            cols,
        }
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        QMatrix {
            rows: m.rows,
            cols: m
                .cols
                .iter()
                .map(|c| c.iter().map(|&(i, x)| (i as usize, Q::from_integer(x.into()))).collect())
                .collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, Q)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseQ] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        match self.cols[j].binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.cols[j][k].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn apply(&self, v: &[(usize, Q)]) -> SparseQ {
        let mut acc = Vec::new();
        for (j, x) in v {
            for (i, a) in &self.cols[*j] {
                acc.push((*i, a * x));
            }
        }
        normalize_q(acc)
    }

    /// `self · other`.
    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols() != other.rows {
            return Err(Error::SizeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        Ok(QMatrix {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        })
    }

    pub fn add(&self, other: &QMatrix) -> Result<QMatrix> {
        if (self.rows, self.cols()) != (other.rows, other.cols()) {
            return Err(Error::SizeMismatch("matrix sum".into()));
        }
        Ok(QMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .zip(&other.cols)
                .map(|(a, b)| axpy_q(a, &Q::one(), b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &QMatrix) -> Result<QMatrix> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> QMatrix {
        if c.is_zero() {
            return QMatrix::zeros(self.rows, self.cols());
        }
        QMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .map(|col| col.iter().map(|(i, x)| (*i, x * c)).collect())
                .collect(),
        }
    }

    pub fn transpose(&self) -> QMatrix {
        let mut cols = vec![Vec::new(); self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c {
                cols[*i].push((j, x.clone()));
            }
        }
        QMatrix {
            rows: self.cols(),
            cols,
        }
    }

    /// Columns of `self` followed by columns of `other`.
    pub fn hstack(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.rows != other.rows {
            return Err(Error::SizeMismatch("hstack row counts differ".into()));
        }
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        Ok(QMatrix {
            rows: self.rows,
            cols,
        })
    }

    /// Rows of `self` above rows of `other`.
    pub fn vstack(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols() != other.cols() {
            return Err(Error::SizeMismatch("vstack column counts differ".into()));
        }
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| {
                let mut c = a.clone();
                c.extend(b.iter().map(|(i, x)| (i + self.rows, x.clone())));
                c
            })
            .collect();
        Ok(QMatrix {
            rows: self.rows + other.rows,
            cols,
        })
    }

    /// Sub-matrix on the given columns.
    pub fn select_columns(&self, idx: &[usize]) -> QMatrix {
        QMatrix {
            rows: self.rows,
            cols: idx.iter().map(|&j| self.cols[j].clone()).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut out = vec![vec![Q::zero(); self.cols()]; self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for (i, x) in c {
                out[*i][j] = x.clone();
            }
        }
        out
    }

    pub fn trace(&self) -> Q {
        (0..self.cols().min(self.rows)).map(|i| self.get(i, i)).sum()
    }

    /// Rank, computed on the integer matrix obtained by clearing the
    /// denominators of each column.
    pub fn rank(&self) -> usize {
        use num_traits::ToPrimitive;
        let big: Vec<Vec<(u32, BigInt)>> = self
            .cols
            .iter()
            .map(|c| {
                let l = c.iter().fold(BigInt::one(), |l, (_, x)| l.lcm(x.denom()));
                c.iter()
                    .map(|(i, x)| (*i as u32, (x * Q::from_integer(l.clone())).to_integer()))
                    .collect()
            })
            .collect();
        let small: Option<Vec<SparseZ>> = big
            .iter()
            .map(|c| c.iter().map(|(i, x)| x.to_i64().map(|v| (*i, v))).collect())
            .collect();
        match small.and_then(|cols| int_rank_checked(&cols)) {
            Some(r) => r,
            None => big_rank(big),
        }
    }

    /// A basis of the null space.
    pub fn kernel(&self) -> Vec<SparseQ> {
        let mut r = Reducer::new();
        let mut out = Vec::new();
        for (j, c) in self.cols.iter().enumerate() {
            let (rem, coeffs) = r.reduce_lead(c);
            if rem.is_empty() {
                let mut v: Vec<(usize, Q)> = coeffs
                    .into_iter()
                    .map(|(k, x)| (r.origin[k], -x))
                    .collect();
                v.push((j, Q::one()));
                out.push(normalize_q(v));
            } else {
                r.insert_reduced(rem, coeffs);
                r.origin.push(j);
            }
        }
        out
    }

    /// Indices of a maximal independent set of columns (greedy from the left).
    pub fn independent_columns(&self) -> Vec<usize> {
        let mut r = Reducer::new();
        (0..self.cols())
            .filter(|&j| r.insert(&self.cols[j]).is_some())
            .collect()
    }

    /// Solves `self · x = b`, if solvable.
    pub fn solve(&self, b: &[(usize, Q)]) -> Option<SparseQ> {
        let mut r = Reducer::new();
        for (j, c) in self.cols.iter().enumerate() {
            if r.insert(c).is_some() {
                r.origin.push(j);
            }
        }
        let (rem, coeffs) = r.reduce_lead(b);
        if !rem.is_empty() {
            return None;
        }
        Some(normalize_q(
            coeffs.into_iter().map(|(k, x)| (r.origin[k], x)).collect(),
        ))
    }
}

/// Incremental echelon basis over the rationals.
///
/// Inserted vectors are reduced against the current pivots (keyed by their
/// largest index) and each stored pivot remembers, as a combination of the
/// inserted vectors, how it was obtained. `reduce` returns the remainder of
/// a vector together with the coefficients expressing `v - remainder` in
/// terms of inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct Reducer {
    pivots: HashMap<usize, (SparseQ, SparseQ)>,
    count: usize,
    /// Caller-owned labels for inserted vectors.
    pub origin: Vec<usize>,
}

impl Reducer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.count
    }

    /// Eliminates only the leading entry repeatedly; the remainder is zero
    /// iff `v` lies in the span.
    pub fn reduce_lead(&self, v: &[(usize, Q)]) -> (SparseQ, SparseQ) {
        let mut cur: SparseQ = v.to_vec();
        let mut coeffs: SparseQ = Vec::new();
        while let Some((lead, x)) = cur.last().cloned() {
            let Some((p, track)) = self.pivots.get(&lead) else { break };
            cur = axpy_q(&cur, &-&x, p);
            coeffs = axpy_q(&coeffs, &x, track);
        }
        (cur, coeffs)
    }

    /// Full reduction: the remainder has no entry in a pivot row, so it is
    /// a canonical representative of `v` modulo the span.
    pub fn reduce(&self, v: &[(usize, Q)]) -> (SparseQ, SparseQ) {
        let mut cur: SparseQ = v.to_vec();
        let mut coeffs: SparseQ = Vec::new();
        let mut pos = cur.len();
        while pos > 0 {
            pos -= 1;
            let (row, x) = cur[pos].clone();
            if let Some((p, track)) = self.pivots.get(&row) {
                cur = axpy_q(&cur, &-&x, p);
                coeffs = axpy_q(&coeffs, &x, track);
                pos = cur.partition_point(|e| e.0 < row);
            }
        }
        (cur, coeffs)
    }

    /// Inserts `v`; returns its id if it was independent.
    pub fn insert(&mut self, v: &[(usize, Q)]) -> Option<usize> {
        let (rem, coeffs) = self.reduce_lead(v);
        if rem.is_empty() {
            None
        } else {
            Some(self.insert_reduced(rem, coeffs))
        }
    }

    fn insert_reduced(&mut self, rem: SparseQ, coeffs: SparseQ) -> usize {
        let id = self.count;
        self.count += 1;
        let lead = rem.last().expect("nonzero").clone();
        let inv = Q::one() / &lead.1;
        let p: SparseQ = rem.into_iter().map(|(i, x)| (i, x * &inv)).collect();
        // rem = v - Σ coeffs·u  ⇒ p = (v_id - Σ coeffs·u)/lead
        let mut track = axpy_q(&[(id, Q::one())], &-Q::one(), &coeffs);
        track = track.into_iter().map(|(i, x)| (i, x * &inv)).collect();
        self.pivots.insert(lead.0, (p, track));
        id
    }

    pub fn contains(&self, v: &[(usize, Q)]) -> bool {
        self.reduce_lead(v).0.is_empty()
    }
}

/// A sparse integer matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: Vec<SparseZ>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix {
            rows: n,
            cols: (0..n as u32).map(|i| vec![(i, 1)]).collect(),
        }
    }

    pub fn from_columns(rows: usize, cols: Vec<Vec<(u32, i64)>>) -> Self {
        let cols: Vec<SparseZ> = cols.into_iter().map(normalize_z).collect();
        debug_assert!(cols.iter().all(|c| c.iter().all(|e| (e.0 as usize) < rows)));
        IntMatrix { rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }

    pub fn column(&self, j: usize) -> &[(u32, i64)] {
        &self.cols[j]
    }

    pub fn columns(&self) -> &[SparseZ] {
        &self.cols
    }

    pub fn into_columns(self) -> Vec<SparseZ> {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        match self.cols[j].binary_search_by_key(&(i as u32), |e| e.0) {
            Ok(k) => self.cols[j][k].1,
            Err(_) => 0,
        }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn apply(&self, v: &[(u32, i64)]) -> SparseZ {
        let mut acc = Vec::new();
        for &(j, x) in v {
            for &(i, a) in &self.cols[j as usize] {
                acc.push((i, a * x));
            }
        }
        normalize_z(acc)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols() != other.rows {
            return Err(Error::SizeMismatch(format!(
                "{}x{} times {}x{}",
                self.rows,
                self.cols(),
                other.rows,
                other.cols()
            )));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        })
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if (self.rows, self.cols()) != (other.rows, other.cols()) {
            return Err(Error::SizeMismatch("matrix sum".into()));
        }
        Ok(IntMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .zip(&other.cols)
                .map(|(a, b)| normalize_z(a.iter().chain(b.iter()).copied().collect()))
                .collect(),
        })
    }

    pub fn scale(&self, c: i64) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self
                .cols
                .iter()
                .map(|col| col.iter().map(|&(i, x)| (i, x * c)).filter(|e| e.1 != 0).collect())
                .collect(),
        }
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut cols = vec![Vec::new(); self.rows];
        for (j, c) in self.cols.iter().enumerate() {
            for &(i, x) in c {
                cols[i as usize].push((j as u32, x));
            }
        }
        IntMatrix {
            rows: self.cols(),
            cols,
        }
    }

    pub fn trace(&self) -> i64 {
        (0..self.cols().min(self.rows)).map(|i| self.get(i, i)).sum()
    }

    pub fn hstack(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows {
            return Err(Error::SizeMismatch("hstack row counts differ".into()));
        }
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        Ok(IntMatrix {
            rows: self.rows,
            cols,
        })
    }

    pub fn rank(&self) -> usize {
        int_rank(self.cols.clone())
    }
}

fn combine_i128(a: &[(u32, i128)], x: i128, b: &[(u32, i128)], y: i128) -> Option<Vec<(u32, i128)>> {
    // x·a − y·b, with the common leading entry cancelling
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push((a[i].0, a[i].1.checked_mul(x)?));
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, b[j].1.checked_mul(-y)?));
            j += 1;
        } else {
            let v = a[i].1.checked_mul(x)?.checked_sub(b[j].1.checked_mul(y)?)?;
            if v != 0 {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Some(out)
}

fn primitive(v: &mut [(u32, i128)]) {
    let mut g: i128 = 0;
    for (_, x) in v.iter() {
        g = g.gcd(x);
        if g == 1 {
            return;
        }
    }
    if g > 1 {
        for (_, x) in v.iter_mut() {
            *x /= g;
        }
    }
}

/// Rank of an integer matrix given by sparse columns.
pub fn int_rank(cols: Vec<SparseZ>) -> usize {
    match int_rank_checked(&cols) {
        Some(r) => r,
        None => big_rank(
            cols.iter()
                .map(|c| c.iter().map(|&(i, x)| (i, BigInt::from(x))).collect())
                .collect(),
        ),
    }
}

fn int_rank_checked(cols: &[SparseZ]) -> Option<usize> {
    let mut pivots: HashMap<u32, Vec<(u32, i128)>> = HashMap::new();
    let mut rank = 0;
    for c in cols {
        let mut cur: Vec<(u32, i128)> = c.iter().map(|&(i, x)| (i, x as i128)).collect();
        while let Some(&(lead, a)) = cur.last() {
            match pivots.get(&lead) {
                None => {
                    primitive(&mut cur);
                    pivots.insert(lead, cur);
                    rank += 1;
                    break;
                }
                Some(p) => {
                    let b = p.last().expect("pivot").1;
                    let g = a.gcd(&b);
                    cur = combine_i128(&cur, b / g, p, a / g)?;
                    primitive(&mut cur);
                }
            }
        }
    }
    Some(rank)
}

fn big_rank(cols: Vec<Vec<(u32, BigInt)>>) -> usize {
    let mut pivots: HashMap<u32, Vec<(u32, BigInt)>> = HashMap::new();
    let mut rank = 0;
    for mut cur in cols {
        while let Some((lead, a)) = cur.last().cloned() {
            match pivots.get(&lead) {
                None => {
                    let g = cur.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
                    if !g.is_one() {
                        for (_, x) in cur.iter_mut() {
                            *x = &*x / &g;
                        }
                    }
                    pivots.insert(lead, cur);
                    rank += 1;
                    break;
                }
                Some(p) => {
                    let b = p.last().expect("pivot").1.clone();
                    let g = a.gcd(&b);
                    let (x, y) = (&b / &g, &a / &g);
                    let mut acc: HashMap<u32, BigInt> = HashMap::new();
                    for (i, v) in &cur {
                        *acc.entry(*i).or_insert_with(BigInt::zero) += v * &x;
                    }
                    for (i, v) in p {
                        *acc.entry(*i).or_insert_with(BigInt::zero) -= v * &y;
                    }
                    let mut next: Vec<(u32, BigInt)> =
                        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                    next.sort_by_key(|e| e.0);
                    let g = next.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
                    if g > BigInt::one() {
                        for (_, v) in next.iter_mut() {
                            *v = &*v / &g;
                        }
                    }
                    cur = next;
                }
            }
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qfrac};

    fn qm(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(&rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn rank_and_kernel() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_empty());
    }

    #[test]
    fn solve_and_membership() {
        let m = qm(&[&[2, 0], &[0, 3], &[0, 0]]);
        let x = m.solve(&[(0, q(1)), (1, q(1))]).unwrap();
        assert_eq!(x, vec![(0, qfrac(1, 2)), (1, qfrac(1, 3))]);
        assert!(m.solve(&[(2, q(1))]).is_none());
    }

    #[test]
    fn integer_rank_matches_rational() {
        let rows: &[&[i64]] = &[&[3, 5, 8, 0], &[1, 1, 2, 4], &[0, 7, 7, 1], &[2, 2, 4, 8]];
        let m = qm(rows);
        let cols: Vec<SparseZ> = (0..4)
            .map(|j| {
                (0..4)
                    .filter(|&i| rows[i][j] != 0)
                    .map(|i| (i as u32, rows[i][j]))
                    .collect()
            })
            .collect();
        assert_eq!(int_rank(cols.clone()), m.rank());
        let big = cols.iter().map(|c| c.iter().map(|&(i, x)| (i, BigInt::from(x))).collect()).collect();
        assert_eq!(big_rank(big), m.rank());
    }

    #[test]
    fn reducer_tracks_combinations() {
        let mut r = Reducer::new();
        let a = vec![(0, q(1)), (2, q(1))];
        let b = vec![(1, q(1)), (2, q(2))];
        r.insert(&a);
        r.insert(&b);
        let v = axpy_q(&a, &q(3), &b);
        let (rem, coeffs) = r.reduce(&v);
        assert!(rem.is_empty());
        assert_eq!(coeffs, vec![(0, q(1)), (1, q(3))]);
    }
}
