//! Bigraded complexes: columns `C(n)_*` joined by external maps
//! `E: C(n)_q → C(n+1)_q`, and their total complexes in degree `t = q − n`
//! with differential `∂ + (−1)^q E`.

use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::homalg::complex::ChainComplex;
use crate::homalg::linalg::QMatrix;
use crate::rational::Q;

#[derive(Clone, Debug)]
pub struct BigradedComplex {
    columns: BTreeMap<i64, ChainComplex>,
    external: BTreeMap<(i64, i64), QMatrix>,
}

/// Position of a summand `C(n)_q` inside total degree `q − n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TotalBlock {
    pub n: i64,
    pub q: i64,
    pub offset: usize,
    pub len: usize,
}

impl BigradedComplex {
    /// `external[(n, q)]` is `E: C(n)_q → C(n+1)_q`; missing entries are
    /// zero. Checks shapes, `E E = 0` and `∂ E = E ∂`.
    pub fn new(columns: BTreeMap<i64, ChainComplex>, external: BTreeMap<(i64, i64), QMatrix>) -> Result<Self> {
        let b = BigradedComplex { columns, external };
        for (&(n, q), e) in &b.external {
            if e.cols() != b.col_dim(n, q) || e.rows() != b.col_dim(n + 1, q) {
                return Err(Error::SizeMismatch(format!(
                    "external map at ({n}, {q}) is {}x{}, expected {}x{}",
                    e.rows(),
                    e.cols(),
                    b.col_dim(n + 1, q),
                    b.col_dim(n, q)
                )));
            }
        }
        for &(n, q) in b.external.keys() {
            if !b.ext(n + 1, q).mul(&b.ext(n, q))?.is_zero() {
                return Err(Error::VerificationFailed(format!("external² ≠ 0 at ({n}, {q})")));
            }
            let lhs = b.internal(n + 1, q).mul(&b.ext(n, q))?;
            let rhs = b.ext(n, q - 1).mul(&b.internal(n, q))?;
            if lhs != rhs {
                return Err(Error::VerificationFailed(format!(
                    "internal and external differentials do not commute at ({n}, {q})"
                )));
            }
        }
        Ok(b)
    }

    fn col_dim(&self, n: i64, q: i64) -> usize {
        self.columns.get(&n).map_or(0, |c| c.dim(q))
    }

    fn internal(&self, n: i64, q: i64) -> QMatrix {
        match self.columns.get(&n) {
            Some(c) => c.boundary(q),
            None => QMatrix::zeros(0, 0),
        }
    }

    fn ext(&self, n: i64, q: i64) -> QMatrix {
        self.external
            .get(&(n, q))
            .cloned()
            .unwrap_or_else(|| QMatrix::zeros(self.col_dim(n + 1, q), self.col_dim(n, q)))
    }

    pub fn columns(&self) -> &BTreeMap<i64, ChainComplex> {
        &self.columns
    }

    /// Total degrees carrying a summand.
    pub fn total_range(&self) -> Option<(i64, i64)> {
        let lo = self.columns.iter().map(|(n, c)| c.lo() - n).min()?;
        let hi = self.columns.iter().map(|(n, c)| c.hi() - n).max()?;
        Some((lo, hi))
    }

    /// Summands of total degree `t` by increasing `n`.
    pub fn blocks(&self, t: i64) -> Vec<TotalBlock> {
        let mut out = Vec::new();
        let mut offset = 0;
        for &n in self.columns.keys() {
            let len = self.col_dim(n, t + n);
            if len > 0 {
                out.push(TotalBlock { n, q: t + n, offset, len });
                offset += len;
            }
        }
        out
    }

    /// The total complex; `∂∂ = 0` is verified on construction.
    pub fn total_complex(&self) -> Result<ChainComplex> {
        let Some((lo, hi)) = self.total_range() else {
            return Ok(ChainComplex::zero());
        };
        let mut boundaries = Vec::new();
        for t in lo..=hi {
            let src = self.blocks(t);
            let dst = self.blocks(t - 1);
            let rows: usize = if t == lo { 0 } else { dst.iter().map(|b| b.len).sum() };
            let off = |n: i64| dst.iter().find(|b| b.n == n).map(|b| b.offset);
            let mut cols = Vec::new();
            for b in &src {
                let d = self.internal(b.n, b.q);
                let e = self.ext(b.n, b.q);
                let sign = if b.q.rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
                for i in 0..b.len {
                    let mut col = Vec::new();
                    if t > lo {
                        if let Some(o) = off(b.n) {
                            col.extend(d.column(i).iter().map(|(k, x)| (k + o, x.clone())));
                        }
                        if let Some(o) = off(b.n + 1) {
                            col.extend(e.column(i).iter().map(|(k, x)| (k + o, &sign * x)));
                        }
                    }
                    col.sort_by_key(|e| e.0);
                    cols.push(col);
                }
            }
            boundaries.push(QMatrix::from_columns(rows, cols));
        }
        ChainComplex::new(lo, boundaries).map_err(|e| match e {
            Error::VerificationFailed(m) => Error::VerificationFailed(format!("total complex: {m}")),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn single_column_is_shifted() {
        // C_1 = <e>, C_0 = <a>, ∂ = 0, placed in column 2
        let c = ChainComplex::with_zero_differential(0, &[1, 1]);
        let b = BigradedComplex::new(BTreeMap::from([(2, c)]), BTreeMap::new()).unwrap();
        let t = b.total_complex().unwrap();
        assert_eq!(t.betti(), vec![(-2, 1), (-1, 1)]);
    }

    #[test]
    fn commuting_square() {
        // columns 1, 2 each Q in degree 0 and Q in degree 1 with ∂ = id; E = id
        let col = || {
            ChainComplex::new(0, vec![QMatrix::zeros(0, 1), QMatrix::identity(1)]).unwrap()
        };
        let ext = BTreeMap::from([((1, 0), QMatrix::identity(1)), ((1, 1), QMatrix::identity(1))]);
        let b = BigradedComplex::new(BTreeMap::from([(1, col()), (2, col())]), ext).unwrap();
        let t = b.total_complex().unwrap();
        assert!(t.betti().iter().all(|e| e.1 == 0));
        // a non-commuting external map is rejected
        let bad = BTreeMap::from([((1, 0), QMatrix::identity(1).scale(&q(2))), ((1, 1), QMatrix::identity(1))]);
        assert!(BigradedComplex::new(BTreeMap::from([(1, col()), (2, col())]), bad).is_err());
    }
}
