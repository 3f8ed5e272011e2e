//! Complexes with an increasing filtration spanned by basis elements, and
//! the comparison `A ← P → P/Q` with
//! `P_n = ker(F_nA_n → gr_n A_{n−1})` and `Q_n = ∂(F_nA_{n+1}) + F_{n−1}A_n`.
//! When `H_q(gr_p A) = 0` for `p ≠ q`, both maps are quasi-isomorphisms and
//! `P/Q` is the complex `… → H_n(gr_n A) → H_{n−1}(gr_{n−1} A) → …`.

use crate::error::{Error, Result};
use crate::homalg::complex::ChainComplex;
use crate::homalg::linalg::{QMatrix, Reducer, SparseQ};
use crate::rational::Q;
use num_traits::One;

/// A chain complex with a filtration level for every basis element;
/// `F_p A` is spanned by the elements of level `≤ p`.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    complex: ChainComplex,
    levels: Vec<Vec<i64>>,
}

impl FilteredComplex {
    /// `levels[k]` lists the levels of the basis of degree `lo + k`. Fails
    /// if some `F_p` is not a subcomplex.
    pub fn new(complex: ChainComplex, levels: Vec<Vec<i64>>) -> Result<Self> {
        let degs: Vec<i64> = complex.degrees().collect();
        if levels.len() != degs.len() {
            return Err(Error::SizeMismatch("one level list per degree".into()));
        }
        for (k, &d) in degs.iter().enumerate() {
            if levels[k].len() != complex.dim(d) {
                return Err(Error::SizeMismatch(format!("levels of degree {d}")));
            }
        }
        let f = FilteredComplex { complex, levels };
        for &d in degs.iter().skip(1) {
            let b = f.complex.boundary(d);
            for (i, col) in b.columns().iter().enumerate() {
                let p = f.level(d, i);
                if let Some((k, _)) = col.iter().find(|(k, _)| f.level(d - 1, *k) > p) {
                    return Err(Error::HypothesisFailed(format!(
                        "F_{p} is not a subcomplex: ∂ of element {i} in degree {d} meets level {}",
                        f.level(d - 1, *k)
                    )));
                }
            }
        }
        Ok(f)
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn level(&self, d: i64, i: usize) -> i64 {
        self.levels[(d - self.complex.lo()) as usize][i]
    }

    fn levels_of(&self, d: i64) -> &[i64] {
        if self.complex.degrees().contains(&d) {
            &self.levels[(d - self.complex.lo()) as usize]
        } else {
            &[]
        }
    }

    fn select(&self, d: i64, keep: impl Fn(i64) -> bool) -> Vec<usize> {
        self.levels_of(d)
            .iter()
            .enumerate()
            .filter(|(_, &l)| keep(l))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn level_range(&self) -> (i64, i64) {
        let all = self.levels.iter().flatten();
        (all.clone().copied().min().unwrap_or(0), all.copied().max().unwrap_or(0))
    }

    /// `gr_p A`: the basis elements of level `p` with the induced differential.
    pub fn gr(&self, p: i64) -> ChainComplex {
        let c = &self.complex;
        let idx: Vec<Vec<usize>> = c.degrees().map(|d| self.select(d, |l| l == p)).collect();
        let mut boundaries = Vec::new();
        for (k, d) in c.degrees().enumerate() {
            if k == 0 {
                boundaries.push(QMatrix::zeros(0, idx[0].len()));
                continue;
            }
            let b = c.boundary(d);
            let pos = |r: usize| idx[k - 1].binary_search(&r).ok();
            let cols = idx[k]
                .iter()
                .map(|&i| {
                    b.column(i)
                        .iter()
                        .filter_map(|(r, x)| pos(*r).map(|j| (j, x.clone())))
                        .collect()
                })
                .collect();
            boundaries.push(QMatrix::from_columns(idx[k - 1].len(), cols));
        }
        ChainComplex::new(c.lo(), boundaries).expect("graded pieces of a filtration are complexes")
    }

    /// Checks `H_q(gr_p A) = 0` for `p ≠ q`; reports the first offending pair.
    pub fn check_concentration(&self) -> Result<()> {
        let (lo, hi) = self.level_range();
        for p in lo..=hi {
            let g = self.gr(p);
            for q in g.degrees() {
                if q != p && g.homology_rank(q)? != 0 {
                    return Err(Error::HypothesisFailed(format!(
                        "H_{q}(gr_{p} A) ≠ 0 at (p, q) = ({p}, {q})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Output of [`lemma_pq`]. Subspaces are given by basis columns in `A`.
#[derive(Clone, Debug)]
pub struct LemmaPQ {
    pub p: ChainComplex,
    pub p_basis: Vec<QMatrix>,
    pub q_basis: Vec<QMatrix>,
    pub quotient: ChainComplex,
    /// `dim (P/Q)_n = rank H_n(gr_n A)` for every `n`.
    pub quotient_matches_gr: bool,
    pub p_to_a_quasi_iso: bool,
    pub p_to_quotient_quasi_iso: bool,
    /// `gr_r(A/P)` is `gr_r A` below `r`, `gr_r A_r / Z_r` at `r` and zero
    /// above; `gr_r Q` is zero below `r`, `B_r(gr_r A)` at `r` and `gr_r A`
    /// above (checked by dimension).
    pub truncations_hold: bool,
}

impl LemmaPQ {
    pub fn all_hold(&self) -> bool {
        self.quotient_matches_gr && self.p_to_a_quasi_iso && self.p_to_quotient_quasi_iso && self.truncations_hold
    }
}

/// `dim (V ∩ F_r)` for `V` spanned by the (independent) columns of `v`.
fn dim_in_level(f: &FilteredComplex, d: i64, v: &QMatrix, r: i64) -> usize {
    let above = f.select(d, |l| l > r);
    let rows: Vec<SparseQ> = v
        .columns()
        .iter()
        .map(|c| {
            c.iter()
                .filter_map(|(k, x)| above.binary_search(k).ok().map(|j| (j, x.clone())))
                .collect()
        })
        .collect();
    v.cols() - QMatrix::from_columns(above.len(), rows).rank()
}

fn gr_dim(f: &FilteredComplex, d: i64, v: &QMatrix, r: i64) -> usize {
    dim_in_level(f, d, v, r) - dim_in_level(f, d, v, r - 1)
}

/// Builds `P`, `Q` and `P/Q` after checking that `H(gr_p A)` is
/// concentrated in degree `p`.
pub fn lemma_pq(f: &FilteredComplex) -> Result<LemmaPQ> {
    f.check_concentration()?;
    let a = f.complex();
    let degs: Vec<i64> = a.degrees().collect();
    let mut p_basis = Vec::new();
    let mut q_basis = Vec::new();
    for &n in &degs {
        let dim = a.dim(n);
        // P_n: elements of F_n A_n whose boundary has no level-n component
        let fn_idx = f.select(n, |l| l <= n);
        let top_rows = f.select(n - 1, |l| l == n);
        let b = a.boundary(n);
        let restricted = QMatrix::from_columns(
            top_rows.len(),
            fn_idx
                .iter()
                .map(|&i| {
                    b.column(i)
                        .iter()
                        .filter_map(|(r, x)| top_rows.binary_search(r).ok().map(|j| (j, x.clone())))
                        .collect()
                })
                .collect(),
        );
        let ker: Vec<SparseQ> = restricted
            .kernel()
            .into_iter()
            .map(|v| v.into_iter().map(|(j, x)| (fn_idx[j], x)).collect())
            .collect();
        p_basis.push(QMatrix::from_columns(dim, ker));
        // Q_n = ∂(F_n A_{n+1}) + F_{n−1} A_n
        let mut spanning: Vec<SparseQ> = f.select(n, |l| l < n).into_iter().map(|i| vec![(i, Q::one())]).collect();
        let up = a.boundary(n + 1);
        for i in f.select(n + 1, |l| l <= n) {
            spanning.push(up.column(i).to_vec());
        }
        let sm = QMatrix::from_columns(dim, spanning);
        q_basis.push(sm.select_columns(&sm.independent_columns()));
    }
    let slot = |n: i64| (n - a.lo()) as usize;

    // P as a complex
    let mut p_bounds = Vec::new();
    for &n in &degs {
        let pb = &p_basis[slot(n)];
        if n == a.lo() {
            p_bounds.push(QMatrix::zeros(0, pb.cols()));
            continue;
        }
        let below = &p_basis[slot(n - 1)];
        let b = a.boundary(n);
        let cols = pb
            .columns()
            .iter()
            .map(|c| {
                below.solve(&b.apply(c)).ok_or_else(|| {
                    Error::VerificationFailed(format!("∂ P_{n} is not contained in P_{}", n - 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        p_bounds.push(QMatrix::from_columns(below.cols(), cols));
    }
    let p = ChainComplex::new(a.lo(), p_bounds)?;

    // P/Q: representatives of P modulo Q, and coordinates of P in them
    let mut reps: Vec<QMatrix> = Vec::new();
    for &n in &degs {
        let qb = &q_basis[slot(n)];
        let mut r = Reducer::new();
        for c in qb.columns() {
            r.insert(c);
        }
        let mut chosen = Vec::new();
        for c in p_basis[slot(n)].columns() {
            if r.insert(c).is_some() {
                chosen.push(c.clone());
            }
        }
        if !qb.columns().iter().all(|c| p_basis[slot(n)].solve(c).is_some()) {
            return Err(Error::VerificationFailed(format!("Q_{n} is not contained in P_{n}")));
        }
        reps.push(QMatrix::from_columns(a.dim(n), chosen));
    }
    // class of x ∈ P_n in the representative basis
    let class_of = |n: i64, x: &SparseQ| -> Result<SparseQ> {
        let r = &reps[slot(n)];
        let full = r.hstack(&q_basis[slot(n)])?;
        let sol = full
            .solve(x)
            .ok_or_else(|| Error::VerificationFailed(format!("element of P_{n} outside P/Q span")))?;
        Ok(sol.into_iter().filter(|(j, _)| *j < r.cols()).collect())
    };
    let mut quo_bounds = Vec::new();
    let mut proj = Vec::new();
    for &n in &degs {
        let r = &reps[slot(n)];
        if n == a.lo() {
            quo_bounds.push(QMatrix::zeros(0, r.cols()));
        } else {
            let b = a.boundary(n);
            let cols = r
                .columns()
                .iter()
                .map(|c| class_of(n - 1, &b.apply(c)))
                .collect::<Result<Vec<_>>>()?;
            quo_bounds.push(QMatrix::from_columns(reps[slot(n - 1)].cols(), cols));
        }
        let cols = p_basis[slot(n)]
            .columns()
            .iter()
            .map(|c| class_of(n, c))
            .collect::<Result<Vec<_>>>()?;
        proj.push(QMatrix::from_columns(r.cols(), cols));
    }
    let quotient = ChainComplex::new(a.lo(), quo_bounds)?;

    let mut quotient_matches_gr = true;
    for &n in &degs {
        let g = f.gr(n);
        let h = if g.degrees().contains(&n) { g.homology_rank(n)? } else { 0 };
        quotient_matches_gr &= quotient.dim(n) == h;
    }
    let degrees = a.degrees();
    let p_to_a_quasi_iso = p.is_quasi_isomorphism(a, &|d| p_basis[slot(d)].clone(), degrees.clone())?;
    let p_to_quotient_quasi_iso = p.is_quasi_isomorphism(&quotient, &|d| proj[slot(d)].clone(), degrees)?;

    let (lo, hi) = f.level_range();
    let mut truncations_hold = true;
    for r in lo..=hi {
        let g = f.gr(r);
        for &n in &degs {
            let gr_a = f.select(n, |l| l == r).len();
            let full = QMatrix::identity(a.dim(n));
            debug_assert_eq!(gr_dim(f, n, &full, r), gr_a);
            let gr_p = gr_dim(f, n, &p_basis[slot(n)], r);
            let gr_q = gr_dim(f, n, &q_basis[slot(n)], r);
            let cycles = if n == r && g.degrees().contains(&n) { g.dim(n) - g.boundary(n).rank() } else { 0 };
            let bounds = if n == r { g.boundary(n + 1).rank() } else { 0 };
            let (want_ap, want_q) = match n.cmp(&r) {
                std::cmp::Ordering::Less => (gr_a, 0),
                std::cmp::Ordering::Equal => (gr_a - cycles, bounds),
                std::cmp::Ordering::Greater => (0, gr_a),
            };
            truncations_hold &= gr_a - gr_p == want_ap && gr_q == want_q;
        }
    }

    Ok(LemmaPQ {
        p,
        p_basis,
        q_basis,
        quotient,
        quotient_matches_gr,
        p_to_a_quasi_iso,
        p_to_quotient_quasi_iso,
        truncations_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn trivial_filtration_in_degree_zero() {
        let a = ChainComplex::with_zero_differential(0, &[3]);
        let f = FilteredComplex::new(a, vec![vec![0, 0, 0]]).unwrap();
        let l = lemma_pq(&f).unwrap();
        assert_eq!(l.p.dim(0), 3);
        assert_eq!(l.q_basis[0].cols(), 0);
        assert!(l.all_hold());
    }

    #[test]
    fn rejects_non_subcomplex_and_bad_concentration() {
        // C_1 = <e>, C_0 = <a>, ∂e = a
        let a = ChainComplex::new(0, vec![QMatrix::zeros(0, 1), QMatrix::from_rows(&[vec![q(1)]])]).unwrap();
        assert!(FilteredComplex::new(a.clone(), vec![vec![1], vec![0]]).is_err());
        // a in level 0, e in level 1: gr_0 and gr_1 are each a single class in the right degree
        let f = FilteredComplex::new(a.clone(), vec![vec![0], vec![1]]).unwrap();
        assert!(lemma_pq(&f).is_ok());
        // a class in degree 1 at level 0
        let g = FilteredComplex::new(ChainComplex::with_zero_differential(0, &[1, 1]), vec![vec![0], vec![0]]).unwrap();
        assert!(matches!(lemma_pq(&g), Err(Error::HypothesisFailed(_))));
    }
}
