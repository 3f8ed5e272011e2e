//! Chain complexes of finite-dimensional rational vector spaces.

use std::ops::RangeInclusive;

use num_traits::One;

use crate::error::{Error, Result};
use crate::homalg::linalg::{QMatrix, Reducer, SparseQ};
use crate::rational::Q;

/// A bounded chain complex `C_lo, …, C_hi` (zero outside), with
/// `∂_d: C_d → C_{d-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    lo: i64,
    boundaries: Vec<QMatrix>,
}

/// Homology in one degree: its rank and cycles whose classes form a basis.
#[derive(Clone, Debug)]
pub struct Homology {
    pub degree: i64,
    pub rank: usize,
    pub representatives: Vec<SparseQ>,
}

impl ChainComplex {
    /// `boundaries[k]` is `∂_{lo+k}`; `boundaries[0]` must have no rows.
    pub fn new(lo: i64, boundaries: Vec<QMatrix>) -> Result<Self> {
        if let Some(b) = boundaries.first() {
            if b.rows() != 0 {
                return Err(Error::SizeMismatch("lowest boundary must map to zero".into()));
            }
        }
        for k in 1..boundaries.len() {
            if boundaries[k].rows() != boundaries[k - 1].cols() {
                return Err(Error::SizeMismatch(format!(
                    "∂_{} has {} rows but C_{} has dimension {}",
                    lo + k as i64,
                    boundaries[k].rows(),
                    lo + k as i64 - 1,
                    boundaries[k - 1].cols()
                )));
            }
            if !boundaries[k - 1].mul(&boundaries[k])?.is_zero() {
                return Err(Error::VerificationFailed(format!(
                    "∂∂ ≠ 0 at degree {}",
                    lo + k as i64
                )));
            }
        }
        Ok(ChainComplex { lo, boundaries })
    }

    pub fn zero() -> Self {
        ChainComplex {
            lo: 0,
            boundaries: vec![QMatrix::zeros(0, 0)],
        }
    }

    /// Complex with the given dimensions and zero differential.
    pub fn with_zero_differential(lo: i64, dims: &[usize]) -> Self {
        let boundaries = dims
            .iter()
            .enumerate()
            .map(|(k, &d)| QMatrix::zeros(if k == 0 { 0 } else { dims[k - 1] }, d))
            .collect();
        ChainComplex { lo, boundaries }
    }

    pub fn degrees(&self) -> RangeInclusive<i64> {
        self.lo..=self.lo + self.boundaries.len() as i64 - 1
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.boundaries.len() as i64 - 1
    }

    fn slot(&self, d: i64) -> Option<usize> {
        if self.degrees().contains(&d) {
            Some((d - self.lo) as usize)
        } else {
            None
        }
    }

    pub fn dim(&self, d: i64) -> usize {
        self.slot(d).map_or(0, |k| self.boundaries[k].cols())
    }

    /// `∂_d` as a `dim(d-1) × dim(d)` matrix (zero outside the range).
    pub fn boundary(&self, d: i64) -> QMatrix {
        match self.slot(d) {
            Some(k) => self.boundaries[k].clone(),
            None => QMatrix::zeros(self.dim(d - 1), self.dim(d)),
        }
    }

    fn check_degree(&self, d: i64) -> Result<()> {
        if self.slot(d).is_none() {
            return Err(Error::IndexOutOfRange(format!(
                "degree {d} outside {}..={}",
                self.lo,
                self.hi()
            )));
        }
        Ok(())
    }

    pub fn homology_rank(&self, d: i64) -> Result<usize> {
        self.check_degree(d)?;
        Ok(self.dim(d) - self.boundary(d).rank() - self.boundary(d + 1).rank())
    }

    /// Homology rank together with representative cycles.
    pub fn homology(&self, d: i64) -> Result<Homology> {
        self.check_degree(d)?;
        let cycles = self.boundary(d).kernel();
        let mut r = Reducer::new();
        for c in self.boundary(d + 1).columns() {
            r.insert(c);
        }
        let representatives: Vec<SparseQ> = cycles.into_iter().filter(|z| r.insert(z).is_some()).collect();
        let rank = representatives.len();
        debug_assert_eq!(rank, self.homology_rank(d).unwrap_or(rank));
        Ok(Homology {
            degree: d,
            rank,
            representatives,
        })
    }

    pub fn betti(&self) -> Vec<(i64, usize)> {
        self.degrees()
            .map(|d| (d, self.homology_rank(d).expect("in range")))
            .collect()
    }

    /// Whether per-degree matrices `f_d: self_d → other_d` commute with the
    /// differentials.
    pub fn is_chain_map(&self, other: &ChainComplex, f: &dyn Fn(i64) -> QMatrix) -> Result<bool> {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        for d in lo..=hi {
            let lhs = other.boundary(d).mul(&f(d))?;
            let rhs = f(d - 1).mul(&self.boundary(d))?;
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Rank of the map induced on `H_d` by a chain map.
    pub fn induced_rank(&self, other: &ChainComplex, f: &QMatrix, d: i64) -> Result<usize> {
        let cycles = self.boundary(d).kernel();
        let image = QMatrix::from_columns(other.dim(d), cycles.iter().map(|z| f.apply(z)).collect());
        let bounds = other.boundary(d + 1);
        Ok(image.hstack(&bounds)?.rank() - bounds.rank())
    }

    /// Whether a chain map induces isomorphisms on homology in every degree
    /// of `degrees`.
    pub fn is_quasi_isomorphism(
        &self,
        other: &ChainComplex,
        f: &dyn Fn(i64) -> QMatrix,
        degrees: RangeInclusive<i64>,
    ) -> Result<bool> {
        for d in degrees {
            let hs = if self.slot(d).is_some() { self.homology_rank(d)? } else { 0 };
            let ho = if other.slot(d).is_some() { other.homology_rank(d)? } else { 0 };
            if hs != ho || self.induced_rank(other, &f(d), d)? != hs {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Tensor product with Koszul differential
    /// `∂(x ⊗ y) = ∂x ⊗ y + (-1)^{|x|} x ⊗ ∂y`.
    ///
    /// In each degree the basis is ordered by the degree of the left factor
    /// and then lexicographically; see [`TensorLayout`].
    pub fn tensor(&self, other: &ChainComplex) -> (ChainComplex, TensorLayout) {
        let lo = self.lo + other.lo;
        let hi = self.hi() + other.hi();
        let layout = TensorLayout::new(self, other);
        let mut boundaries = Vec::new();
        for d in lo..=hi {
            let rows = layout.dim(d - 1);
            let mut cols = Vec::with_capacity(layout.dim(d));
            for a in self.degrees() {
                let b = d - a;
                if !other.degrees().contains(&b) {
                    continue;
                }
                let da = self.boundary(a);
                let db = other.boundary(b);
                let sign = if a.rem_euclid(2) == 0 { Q::one() } else { -Q::one() };
                for i in 0..self.dim(a) {
                    for j in 0..other.dim(b) {
                        let mut col = Vec::new();
                        for (k, x) in da.column(i) {
                            col.push((layout.index_in(a - 1, *k, j, d - 1), x.clone()));
                        }
                        for (k, x) in db.column(j) {
                            col.push((layout.index_in(a, i, *k, d - 1), &sign * x));
                        }
                        cols.push(col);
                    }
                }
            }
            boundaries.push(QMatrix::from_columns(if d == lo { 0 } else { rows }, cols));
        }
        let c = ChainComplex::new(lo, boundaries).expect("tensor product is a complex");
        (c, layout)
    }

    /// Degree-shifted copy: `C'_d = C_{d - shift}` (differential unchanged).
    pub fn shift(&self, shift: i64) -> ChainComplex {
        ChainComplex {
            lo: self.lo + shift,
            boundaries: self.boundaries.clone(),
        }
    }
}

/// Index bookkeeping for the basis of a tensor product of complexes.
#[derive(Clone, Debug)]
pub struct TensorLayout {
    left: Vec<(i64, usize)>,
    right: Vec<(i64, usize)>,
}

impl TensorLayout {
    fn new(a: &ChainComplex, b: &ChainComplex) -> Self {
        TensorLayout {
            left: a.degrees().map(|d| (d, a.dim(d))).collect(),
            right: b.degrees().map(|d| (d, b.dim(d))).collect(),
        }
    }

    fn right_dim(&self, d: i64) -> usize {
        self.right.iter().find(|e| e.0 == d).map_or(0, |e| e.1)
    }

    pub fn dim(&self, d: i64) -> usize {
        self.left.iter().map(|&(a, n)| n * self.right_dim(d - a)).sum()
    }

    /// Position of `x_i ⊗ y_j` with `|x_i| = a`, in degree `a + |y_j|`.
    pub fn index_in(&self, a: i64, i: usize, j: usize, d: i64) -> usize {
        let mut off = 0;
        for &(a2, n) in &self.left {
            if a2 == a {
                return off + i * self.right_dim(d - a) + j;
            }
            off += n * self.right_dim(d - a2);
        }
        unreachable!("left degree {a} not present")
    }
}

/// Checks `e ∘ e = e` and `e ∂ = ∂ e` in every degree.
pub fn check_idempotent_chain_map(c: &ChainComplex, e: &dyn Fn(i64) -> QMatrix) -> Result<()> {
    for d in c.degrees() {
        let ed = e(d);
        if ed.mul(&ed)? != ed {
            return Err(Error::VerificationFailed(format!("not idempotent in degree {d}")));
        }
        if d > c.lo() && c.boundary(d).mul(&ed)? != e(d - 1).mul(&c.boundary(d))? {
            return Err(Error::VerificationFailed(format!("not a chain map in degree {d}")));
        }
    }
    Ok(())
}

/// The image of an idempotent chain map, with its inclusion and projection.
#[derive(Clone, Debug)]
pub struct ImageSummand {
    pub complex: ChainComplex,
    /// Per degree (from `complex.lo()`), inclusion `im e → C`.
    pub inclusion: Vec<QMatrix>,
    /// Per degree, projection `C → im e` with `inclusion · projection = e`.
    pub projection: Vec<QMatrix>,
}

/// Splits off the image of an idempotent chain map `e` on `c`.
pub fn image_summand(c: &ChainComplex, e: &dyn Fn(i64) -> QMatrix) -> Result<ImageSummand> {
    check_idempotent_chain_map(c, e)?;
    let mut inclusion = Vec::new();
    let mut projection = Vec::new();
    for d in c.degrees() {
        let ed = e(d);
        let keep = ed.independent_columns();
        let inc = ed.select_columns(&keep);
        let proj_cols: Vec<SparseQ> = ed
            .columns()
            .iter()
            .map(|col| inc.solve(col).expect("columns of e lie in im e"))
            .collect();
        let proj = QMatrix::from_columns(inc.cols(), proj_cols);
        debug_assert_eq!(inc.mul(&proj).expect("shapes"), ed);
        inclusion.push(inc);
        projection.push(proj);
    }
    let mut boundaries = Vec::new();
    for (k, d) in c.degrees().enumerate() {
        if k == 0 {
            boundaries.push(QMatrix::zeros(0, inclusion[0].cols()));
        } else {
            let b = projection[k - 1].mul(&c.boundary(d))?.mul(&inclusion[k])?;
            boundaries.push(b);
        }
    }
    Ok(ImageSummand {
        complex: ChainComplex::new(c.lo(), boundaries)?,
        inclusion,
        projection,
    })
}

/// Matrix of `1 - e`.
pub fn complement(e: &QMatrix) -> QMatrix {
    QMatrix::identity(e.rows()).sub(e).expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn interval() -> ChainComplex {
        // C_1 = <e>, C_0 = <a, b>, ∂e = b - a
        ChainComplex::new(
            0,
            vec![
                QMatrix::zeros(0, 2),
                QMatrix::from_columns(2, vec![vec![(0, -Q::one()), (1, Q::one())]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn interval_homology() {
        let c = interval();
        assert_eq!(c.betti(), vec![(0, 1), (1, 0)]);
        let h = c.homology(0).unwrap();
        assert_eq!(h.representatives.len(), 1);
        assert!(ChainComplex::zero().homology_rank(0).unwrap() == 0);
        assert!(c.homology_rank(5).is_err());
    }

    #[test]
    fn tensor_of_intervals() {
        let c = interval();
        let (t, _) = c.tensor(&c);
        assert_eq!(t.betti(), vec![(0, 1), (1, 0), (2, 0)]);
    }

    #[test]
    fn summand_splitting() {
        let c = ChainComplex::with_zero_differential(0, &[2]);
        let e = QMatrix::from_rows(&[vec![q(1), q(1)], vec![q(0), q(0)]]);
        let s = image_summand(&c, &|_| e.clone()).unwrap();
        let s2 = image_summand(&c, &|_| complement(&e)).unwrap();
        assert_eq!(s.complex.dim(0) + s2.complex.dim(0), 2);
        let bad = QMatrix::from_rows(&[vec![q(2), q(0)], vec![q(0), q(0)]]);
        assert!(image_summand(&c, &|_| bad.clone()).is_err());
    }
}
