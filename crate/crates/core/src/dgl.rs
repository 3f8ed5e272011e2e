//! The cobar algebra `R^N` of a simplicial space, assembled from relative
//! chains of its powers, and the Lie summand `P^N` cut out by the
//! projectors `e_n = w_n / n`.
//!
//! A chain in `C_q(X^n)` has total degree `t = q − n`. The total
//! differential is `D = ∂ + (−1)^q F(f_n)` (the term leaving column `N` is
//! dropped), and the product of `x ∈ C_a(X^p)` and `y ∈ C_b(X^q)` is
//! `(−1)^{p·b} EZ(x, y)`, dropped when `p + q > N`.
//!
//! Vectors of a total degree use global coordinates: the blocks `(n, q)` of
//! that degree are laid out by increasing `n`.
//!
//! Inside one block `P ∩ C_q(X^n)` is spanned orbit by orbit: the images
//! `w_n·y` of the `Σ_n`-orbit of a basis tuple `y` span the part of `P`
//! supported on that orbit. An echelon basis of those images also yields
//! "key rows", on which restriction is injective on `P`; homology of `P` is
//! computed in these compressed coordinates.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fincat::{self, all_permutations, DMorphism, SetMap};
use crate::homalg::linalg::{int_rank, normalize_q, normalize_z, QMatrix, SparseQ, SparseZ};
use crate::homalg::reduce::{self, to_big, to_i128, IntReducer, Overflow, Vector};
use crate::rational::{self, as_i64, neg_one_pow, Q};
use crate::simplicial::{PowerChains, SimplicialSpace, SpaceTables};

/// Refuses `(N, q_max, T)` outside the range where truncation is known not
/// to affect `H_t` for `t ≤ T`: `N ≥ T` and `q_max ≥ T + N + 1`. This is
/// the rule for a space that is only known to be simply connected.
pub fn check_window(n: usize, q_max: usize, t: usize) -> Result<()> {
    check_window_connected(1, n, q_max, t)
}

/// Window rule for a rationally `c`-connected space. Columns above `N` only
/// carry homology in total degrees `≥ c(N+1)`, so `H_t` is unaffected for
/// `t ≤ c(N+1) − 1`; internal truncation needs `q_max ≥ T + N + 1`.
pub fn check_window_connected(c: usize, n: usize, q_max: usize, t: usize) -> Result<()> {
    let c = c.max(1);
    if t + 1 > c * (n + 1) {
        return Err(Error::WindowViolation(if c == 1 {
            format!("T = {t} exceeds N = {n}; degrees above N are not stable under truncation")
        } else {
            format!(
                "T = {t} exceeds {} = c(N+1) − 1 for a {c}-connected space with N = {n}",
                c * (n + 1) - 1
            )
        }));
    }
    if q_max < t + n + 1 {
        return Err(Error::WindowViolation(format!(
            "q_max = {q_max} is below T + N + 1 = {}",
            t + n + 1
        )));
    }
    Ok(())
}

/// Degree-zero piece of a `D`-morphism with integer coefficients.
type Terms = Vec<(SetMap, i64)>;

fn int_terms(d: &DMorphism) -> Result<Terms> {
    d.terms()
        .map(|(f, c)| {
            as_i64(c)
                .map(|c| (f.clone(), c))
                .ok_or_else(|| Error::InvalidArgument(format!("non-integral coefficient {c}")))
        })
        .collect()
}

/// One summand `C_q(X^n)` of a total degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub n: usize,
    pub q: usize,
    pub offset: usize,
    pub len: usize,
}

/// Splits a global vector into per-block local pieces.
fn split<T: Clone>(blocks: &[Block], v: &[(usize, T)]) -> Vec<(Block, Vec<(u32, T)>)> {
    let mut out: Vec<(Block, Vec<(u32, T)>)> = Vec::new();
    for (g, c) in v {
        let k = blocks.partition_point(|b| b.offset + b.len <= *g);
        let b = blocks[k];
        match out.last_mut() {
            Some((last, piece)) if last.n == b.n => piece.push(((*g - b.offset) as u32, c.clone())),
            _ => out.push((b, vec![((*g - b.offset) as u32, c.clone())])),
        }
    }
    out
}

/// The cobar d.g.a. `R^N`: columns `C_*(X^n)` relative to the fat wedge
/// for `1 ≤ n ≤ N`, linked by `F(f_n)`.
#[derive(Debug)]
pub struct CobarAlgebra {
    tables: Arc<SpaceTables>,
    columns: Vec<PowerChains>,
    f: Vec<Terms>,
}

impl CobarAlgebra {
    /// `budget` caps the number of basis elements of each column.
    pub fn build(space: &SimplicialSpace, n_max: usize, q_max: usize, budget: Option<usize>) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        let tables = SpaceTables::new(space, q_max)?;
        let columns = (1..=n_max)
            .into_par_iter()
            .map(|n| PowerChains::new(&tables, n, budget))
            .collect::<Result<Vec<_>>>()?;
        let f = (1..n_max)
            .map(|n| int_terms(&fincat::cobar_differential(n)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(CobarAlgebra { tables, columns, f })
    }

    pub fn n_max(&self) -> usize {
        self.columns.len()
    }

    pub fn q_max(&self) -> usize {
        self.tables.q_max()
    }

    pub fn space(&self) -> &SimplicialSpace {
        self.tables.space()
    }

    pub fn column(&self, n: usize) -> &PowerChains {
        &self.columns[n - 1]
    }

    /// Blocks of total degree `t`, by increasing `n`, empty ones omitted.
    pub fn blocks(&self, t: i64) -> Vec<Block> {
        let mut out = Vec::new();
        let mut offset = 0;
        for n in 1..=self.n_max() {
            let q = t + n as i64;
            if q < 0 || q > self.q_max() as i64 {
                continue;
            }
            let q = q as usize;
            let len = self.column(n).dim(q);
            if len > 0 {
                out.push(Block { n, q, offset, len });
                offset += len;
            }
        }
        out
    }

    pub fn dim(&self, t: i64) -> usize {
        self.blocks(t).iter().map(|b| b.len).sum()
    }

    /// Lowest and highest total degree with a nonzero summand.
    pub fn degree_range(&self) -> (i64, i64) {
        (-(self.n_max() as i64), self.q_max() as i64 - 1)
    }

    /// Pullback along integer combinations of surjections `[m] → [n]`.
    pub fn pull(&self, n: usize, m: usize, q: usize, terms: &[(SetMap, i64)], v: &[(u32, i64)]) -> SparseZ {
        let (src, dst) = (self.column(n), self.column(m));
        let mut out = Vec::with_capacity(v.len() * terms.len());
        for &(i, c) in v {
            for (f, a) in terms {
                out.push((src.pullback_index(f, dst, q, i), c * a));
            }
        }
        normalize_z(out)
    }

    /// `F(f_n)` applied to a chain of `C_q(X^n)`; zero on the last column.
    pub fn external(&self, n: usize, q: usize, v: &[(u32, i64)]) -> SparseZ {
        if n >= self.n_max() {
            return Vec::new();
        }
        self.pull(n, n + 1, q, &self.f[n - 1], v)
    }

    /// `D` on a chain of `C_q(X^n)`, as `(column, local vector)` pieces.
    pub fn d_local(&self, n: usize, q: usize, v: &[(u32, i64)]) -> Vec<(usize, SparseZ)> {
        let col = self.column(n);
        let mut inner = Vec::new();
        if q > 0 {
            for &(i, c) in v {
                for (k, a) in col.boundary_column(q, i) {
                    inner.push((k, a * c));
                }
            }
        }
        let mut out = vec![(n, normalize_z(inner))];
        if n < self.n_max() {
            let s = neg_one_pow(q as i64);
            let ext = self.external(n, q, v).into_iter().map(|(k, c)| (k, s * c)).collect();
            out.push((n + 1, ext));
        }
        out
    }

    /// `D: R_t → R_{t−1}` on an integer vector in global coordinates.
    pub fn d_global(&self, t: i64, v: &[(u32, i64)]) -> SparseZ {
        let wide: Vec<(usize, i64)> = v.iter().map(|&(i, c)| (i as usize, c)).collect();
        let target = self.blocks(t - 1);
        let offset_of = |n: usize| target.iter().find(|b| b.n == n).map(|b| b.offset);
        let mut out = Vec::new();
        for (b, piece) in split(&self.blocks(t), &wide) {
            for (m, w) in self.d_local(b.n, b.q, &piece) {
                if w.is_empty() {
                    continue;
                }
                let off = offset_of(m).expect("differential lands in a represented block");
                out.extend(w.into_iter().map(|(k, c)| (k + off as u32, c)));
            }
        }
        normalize_z(out)
    }

    /// `D` on a rational vector in global coordinates.
    pub fn d_global_q(&self, t: i64, v: &[(usize, Q)]) -> SparseQ {
        let (ints, denom) = clear_denominators(v);
        let mut out = Vec::new();
        for (i, c) in ints {
            let col = self.d_global(t, &[(i as u32, 1)]);
            out.extend(col.into_iter().map(|(k, a)| (k as usize, Q::from_integer(&c * BigInt::from(a)))));
        }
        normalize_q(out).into_iter().map(|(k, c)| (k, c / &denom)).collect()
    }

    /// The product `R_s ⊗ R_t → R_{s+t}` on rational vectors.
    pub fn product(&self, s: i64, x: &[(usize, Q)], t: i64, y: &[(usize, Q)]) -> SparseQ {
        let target = self.blocks(s + t);
        let mut out = Vec::new();
        let ys = split(&self.blocks(t), y);
        for (bx, xp) in split(&self.blocks(s), x) {
            for (by, yp) in &ys {
                let n = bx.n + by.n;
                if n > self.n_max() || bx.q + by.q > self.q_max() {
                    continue;
                }
                let off = target
                    .iter()
                    .find(|b| b.n == n)
                    .map_or(0, |b| b.offset);
                let sign = neg_one_pow((bx.n * by.q) as i64);
                let (cx, cy, cz) = (self.column(bx.n), self.column(by.n), self.column(n));
                for (i, a) in &xp {
                    for (j, b) in yp {
                        let ab = a * b;
                        for (k, e) in cx.ez_pair(cy, cz, bx.q, *i, by.q, *j) {
                            out.push((k as usize + off, &ab * rational::q(sign * e)));
                        }
                    }
                }
            }
        }
        normalize_q(out)
    }

    /// Ranks of `H_t(R^N)` for `t ∈ lo..=hi`.
    pub fn homology_ranks(&self, lo: i64, hi: i64) -> BTreeMap<i64, usize> {
        let rank_d = |t: i64| {
            let cols: Vec<SparseZ> = (0..self.dim(t) as u32)
                .into_par_iter()
                .map(|i| self.d_global(t, &[(i, 1)]))
                .collect();
            int_rank(cols)
        };
        let mut ranks: HashMap<i64, usize> = HashMap::new();
        for t in lo..=hi + 1 {
            ranks.insert(t, rank_d(t));
        }
        (lo..=hi)
            .map(|t| (t, self.dim(t) - ranks[&t] - ranks[&(t + 1)]))
            .collect()
    }

    /// Checks `F(f_{p+q}) EZ(x, y) = EZ(F(f_p) x, y) + (−1)^p EZ(x, F(f_q) y)`
    /// on all basis pairs with `a + b ≤ q_max`. Returns the first failing
    /// `(a, b, x, y)` if any.
    pub fn leibniz_check(&self, p: usize, q: usize) -> Result<Option<(usize, usize, u32, u32)>> {
        if p + q + 1 > self.n_max() {
            return Err(Error::InvalidArgument(format!(
                "Leibniz square for ({p}, {q}) needs N ≥ {}",
                p + q + 1
            )));
        }
        let (cp, cq, cpq) = (self.column(p), self.column(q), self.column(p + q));
        let (cp1, cq1, cpq1) = (self.column(p + 1), self.column(q + 1), self.column(p + q + 1));
        let sign = neg_one_pow(p as i64);
        for a in 0..=self.q_max() {
            for b in 0..=self.q_max() - a {
                for x in 0..cp.dim(a) as u32 {
                    let fx = self.external(p, a, &[(x, 1)]);
                    for y in 0..cq.dim(b) as u32 {
                        let lhs = self.external(p + q, a + b, &cp.ez_pair(cq, cpq, a, x, b, y));
                        let mut rhs = Vec::new();
                        for &(i, c) in &fx {
                            for (k, e) in cp1.ez_pair(cq, cpq1, a, i, b, y) {
                                rhs.push((k, c * e));
                            }
                        }
                        for (j, c) in self.external(q, b, &[(y, 1)]) {
                            for (k, e) in cp.ez_pair(cq1, cpq1, a, x, b, j) {
                                rhs.push((k, sign * c * e));
                            }
                        }
                        if lhs != normalize_z(rhs) {
                            return Ok(Some((a, b, x, y)));
                        }
                    }
                }
            }
        }
        Ok(None)
    }
}

fn clear_denominators(v: &[(usize, Q)]) -> (Vec<(usize, BigInt)>, BigInt) {
    let l = v.iter().fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
    let ints = v
        .iter()
        .map(|(i, c)| (*i, c.numer() * (&l / c.denom())))
        .collect();
    (ints, l)
}

/// `P ∩ C_q(X^n)`: a basis of `w_n`-images and the key rows.
#[derive(Clone, Debug)]
pub struct LieBlock {
    pub vectors: Vec<SparseZ>,
    pub keys: Vec<u32>,
    /// `trace(w_n)` on this block; `n · vectors.len()` must equal it.
    pub trace: i64,
    /// Whether `w_n w_n v = n v` held for every basis vector.
    pub idempotent: bool,
}

/// Outcome of one chain-level identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub passed: bool,
    pub checked: usize,
    pub total: usize,
}

impl Certificate {
    fn merge(&mut self, other: &Certificate) {
        self.passed &= other.passed;
        self.checked += other.checked;
        self.total += other.total;
    }

    fn empty() -> Self {
        Certificate {
            passed: true,
            checked: 0,
            total: 0,
        }
    }
}

/// Certificates are exhaustive on degrees with at most this many basis
/// elements and use a seeded sample of this size above it.
pub const CERTIFICATE_SAMPLE: usize = 40_000;

/// Homology of `P^N` in one degree with enough data to read off classes.
#[derive(Clone, Debug)]
pub struct LieHomology {
    pub t: i64,
    pub rank: usize,
    /// Cycles in global coordinates of degree `t` whose classes are a basis.
    pub representatives: Vec<SparseQ>,
    keys: HashMap<u32, u32>,
    boundaries: IntReducer<BigInt>,
    remainders: Vec<(Vector<BigInt>, BigInt)>,
}

impl LieHomology {
    /// Coordinates of the class of a cycle `z ∈ P_t` in the basis of
    /// representative classes.
    pub fn class_of(&self, z: &[(usize, Q)]) -> Result<Vec<Q>> {
        let (ints, l) = clear_denominators(z);
        let mut restricted: Vector<BigInt> = Vec::with_capacity(ints.len());
        for (i, c) in ints {
            match self.keys.get(&(i as u32)) {
                Some(&k) => restricted.push((k, c)),
                None => continue,
            }
        }
        restricted.sort_by_key(|e| e.0);
        let red = self.boundaries.reduce_full(&restricted).expect("big integers do not overflow");
        if red.remainder.is_empty() {
            return Ok(vec![Q::zero(); self.rank]);
        }
        let rows = self.keys.len();
        let to_q = |v: &Vector<BigInt>| -> SparseQ { v.iter().map(|(i, c)| (*i as usize, Q::from_integer(c.clone()))).collect() };
        let m = QMatrix::from_columns(rows, self.remainders.iter().map(|(r, _)| to_q(r)).collect());
        let a = m.solve(&to_q(&red.remainder)).ok_or_else(|| {
            Error::VerificationFailed(format!("chain in degree {} is not a cycle of P", self.t))
        })?;
        let mut out = vec![Q::zero(); self.rank];
        let denom = Q::from_integer(&red.scale * &l);
        for (i, c) in a {
            out[i] = c * Q::from_integer(self.remainders[i].1.clone()) / &denom;
        }
        Ok(out)
    }
}

/// The d.g. Lie algebra `P^N = ⊕_n e_n R` inside the cobar algebra.
#[derive(Debug)]
pub struct CobarLie {
    r: CobarAlgebra,
    w: Vec<Terms>,
    lie_blocks: Vec<Vec<OnceLock<LieBlock>>>,
    seed: u64,
}

impl CobarLie {
    pub fn build(space: &SimplicialSpace, n_max: usize, q_max: usize, budget: Option<usize>) -> Result<Self> {
        Self::from_algebra(CobarAlgebra::build(space, n_max, q_max, budget)?)
    }

    pub fn from_algebra(r: CobarAlgebra) -> Result<Self> {
        let w = (1..=r.n_max())
            .map(|n| int_terms(fincat::w_element(n)?.as_dmorphism()))
            .collect::<Result<Vec<_>>>()?;
        let lie_blocks = (0..r.n_max())
            .map(|_| (0..=r.q_max()).map(|_| OnceLock::new()).collect())
            .collect();
        Ok(CobarLie {
            r,
            w,
            lie_blocks,
            seed: 0,
        })
    }

    /// Window check using the rational connectivity of the space; an
    /// acyclic space has no homology to lose.
    pub fn check_window(&self, t_max: usize) -> Result<()> {
        match self.r.space().rational_connectivity() {
            Some(c) => check_window_connected(c, self.n_max(), self.q_max(), t_max),
            None => check_window_connected(usize::MAX / (self.n_max() + 2), self.n_max(), self.q_max(), t_max),
        }
    }

    /// Seed for sampled certificates and the representative probe.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn algebra(&self) -> &CobarAlgebra {
        &self.r
    }

    pub fn n_max(&self) -> usize {
        self.r.n_max()
    }

    pub fn q_max(&self) -> usize {
        self.r.q_max()
    }

    /// `w_n` acting on a chain of `C_q(X^n)` by coordinate permutations.
    pub fn apply_w(&self, n: usize, q: usize, v: &[(u32, i64)]) -> SparseZ {
        self.r.pull(n, n, q, &self.w[n - 1], v)
    }

    pub fn lie_block(&self, n: usize, q: usize) -> &LieBlock {
        self.lie_blocks[n - 1][q].get_or_init(|| self.compute_lie_block(n, q))
    }

    fn compute_lie_block(&self, n: usize, q: usize) -> LieBlock {
        let col = self.r.column(n);
        let dim = col.dim(q);
        let perms = all_permutations(n);
        let w = &self.w[n - 1];
        let mut seen = vec![false; dim];
        let mut vectors = Vec::new();
        let mut keys = Vec::new();
        let mut trace = 0i64;
        let mut idempotent = true;
        for i in 0..dim as u32 {
            if seen[i as usize] {
                continue;
            }
            let mut orbit: Vec<u32> = perms.iter().map(|p| col.pullback_index(p, col, q, i)).collect();
            orbit.sort_unstable();
            orbit.dedup();
            // action[j][k]: position in the orbit of the k-th term of w applied to orbit[j]
            let pos = |g: u32| orbit.binary_search(&g).expect("orbits are closed");
            let action: Vec<Vec<usize>> = orbit
                .iter()
                .map(|&y| w.iter().map(|(g, _)| pos(col.pullback_index(g, col, q, y))).collect())
                .collect();
            let apply = |v: &[(usize, i64)]| -> Vec<(usize, i64)> {
                let mut acc = vec![0i64; orbit.len()];
                for &(j, c) in v {
                    for (k, (_, a)) in w.iter().enumerate() {
                        acc[action[j][k]] += c * a;
                    }
                }
                acc.into_iter().enumerate().filter(|e| e.1 != 0).collect()
            };
            let mut red = IntReducer::<i128>::new(false);
            for (j, &y) in orbit.iter().enumerate() {
                seen[y as usize] = true;
                for (k, (_, a)) in w.iter().enumerate() {
                    if action[j][k] == j {
                        trace += a;
                    }
                }
                let v = apply(&[(j, 1)]);
                if v.is_empty() {
                    continue;
                }
                let ww = apply(&v);
                if ww.len() != v.len() || ww.iter().zip(&v).any(|(a, b)| a.0 != b.0 || a.1 != n as i64 * b.1) {
                    idempotent = false;
                }
                let global: SparseZ = v.iter().map(|&(k, c)| (orbit[k], c)).collect();
                let global = normalize_z(global);
                if red.insert(to_i128(&global), None).expect("orbit vectors are small").is_some() {
                    vectors.push(global);
                }
            }
            keys.extend(red.pivot_rows());
        }
        keys.sort_unstable();
        LieBlock {
            vectors,
            keys,
            trace,
            idempotent,
        }
    }

    /// Basis of `P_t` in global coordinates of `R_t`.
    pub fn basis(&self, t: i64) -> Vec<SparseZ> {
        let mut out = Vec::new();
        for b in self.r.blocks(t) {
            let lb = self.lie_block(b.n, b.q);
            out.extend(
                lb.vectors
                    .iter()
                    .map(|v| v.iter().map(|&(i, c)| (i + b.offset as u32, c)).collect::<SparseZ>()),
            );
        }
        out
    }

    pub fn dim(&self, t: i64) -> usize {
        self.r
            .blocks(t)
            .iter()
            .map(|b| self.lie_block(b.n, b.q).vectors.len())
            .sum()
    }

    /// Global index of each key row of degree `t` → compressed coordinate.
    fn key_map(&self, t: i64) -> HashMap<u32, u32> {
        let mut out = HashMap::new();
        for b in self.r.blocks(t) {
            for &k in &self.lie_block(b.n, b.q).keys {
                let next = out.len() as u32;
                out.insert(k + b.offset as u32, next);
            }
        }
        out
    }

    fn restrict(keys: &HashMap<u32, u32>, v: &[(u32, i64)]) -> SparseZ {
        let mut out: SparseZ = v.iter().filter_map(|&(i, c)| keys.get(&i).map(|&k| (k, c))).collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    /// Columns of `D: P_t → P_{t−1}` in key coordinates.
    fn d_columns(&self, t: i64) -> Vec<SparseZ> {
        let keys = self.key_map(t - 1);
        let basis = self.basis(t);
        basis
            .par_iter()
            .map(|p| Self::restrict(&keys, &self.r.d_global(t, p)))
            .collect()
    }

    /// `rank(D: P_t → P_{t−1})`.
    pub fn rank_d(&self, t: i64) -> usize {
        int_rank(self.d_columns(t))
    }

    /// Ranks of `H_t(P^N)` for `1 ≤ t ≤ t_max`, after the window check.
    pub fn homotopy_ranks(&self, t_max: usize) -> Result<BTreeMap<i64, usize>> {
        self.check_window(t_max)?;
        Ok(self.ranks_unchecked(1, t_max as i64))
    }

    /// Ranks of `H_t(P^N)` without the window check.
    pub fn ranks_unchecked(&self, lo: i64, hi: i64) -> BTreeMap<i64, usize> {
        let ranks: BTreeMap<i64, usize> = (lo..=hi + 1).map(|t| (t, self.rank_d(t))).collect();
        (lo..=hi)
            .map(|t| (t, self.dim(t) - ranks[&t] - ranks[&(t + 1)]))
            .collect()
    }

    /// Homology in degree `t` with representatives.
    pub fn homology(&self, t: i64) -> Result<LieHomology> {
        match self.homology_with::<i128>(t) {
            Ok(h) => Ok(h),
            Err(Overflow) => self.homology_with::<BigInt>(t).map_err(|_| unreachable!()),
        }
    }

    fn homology_with<T: reduce::Coeff + IntoBig>(&self, t: i64) -> std::result::Result<LieHomology, Overflow> {
        let basis = self.basis(t);
        let keys = self.key_map(t);
        let lift = |v: &SparseZ| -> Vector<T> { v.iter().map(|&(i, c)| (i, T::from_i64(c))).collect() };
        let mut cycles_red = IntReducer::<T>::new(true);
        let mut kernel = Vec::new();
        for col in self.d_columns(t) {
            cycles_red.insert(lift(&col), Some(&mut kernel))?;
        }
        let mut bounds = IntReducer::<BigInt>::new(false);
        for col in self.d_columns(t + 1) {
            bounds.insert(to_big(&col), None).expect("big integers do not overflow");
        }
        let rank = kernel.len() - bounds.rank();
        let mut probe = bounds.clone();
        let mut representatives = Vec::new();
        let mut remainders = Vec::new();
        for k in kernel {
            if representatives.len() == rank {
                break;
            }
            let mut full: BTreeMap<u32, BigInt> = BTreeMap::new();
            for (i, c) in &k {
                let c = c.to_big();
                for &(j, a) in &basis[*i as usize] {
                    *full.entry(j).or_insert_with(BigInt::zero) += &c * BigInt::from(a);
                }
            }
            full.retain(|_, c| !c.is_zero());
            let g = full.values().fold(BigInt::zero(), |g, c| g.gcd(c));
            let full: Vector<BigInt> = full.into_iter().map(|(i, c)| (i, c / &g)).collect();
            let mut restricted: Vector<BigInt> =
                full.iter().filter_map(|(i, c)| keys.get(i).map(|&k| (k, c.clone()))).collect();
            restricted.sort_by_key(|e| e.0);
            if probe.insert(restricted.clone(), None).expect("big").is_some() {
                let red = bounds.reduce_full(&restricted).expect("big");
                remainders.push((red.remainder, red.scale));
                representatives.push(full.iter().map(|(i, c)| (*i as usize, Q::from_integer(c.clone()))).collect());
            }
        }
        assert_eq!(representatives.len(), rank, "representatives complete the boundaries");
        Ok(LieHomology {
            t,
            rank,
            representatives,
            keys,
            boundaries: bounds,
            remainders,
        })
    }

    /// The bracket `[x, y] = μ(x, y) − (−1)^{st} μ(y, x)` on chains.
    pub fn bracket(&self, s: i64, x: &[(usize, Q)], t: i64, y: &[(usize, Q)]) -> SparseQ {
        let xy = self.r.product(s, x, t, y);
        let yx = self.r.product(t, y, s, x);
        let sign = Q::from_integer(BigInt::from(neg_one_pow(s * t)));
        normalize_q(xy.into_iter().chain(yx.into_iter().map(|(i, c)| (i, -(c * &sign)))).collect())
    }

    /// Whether a rational chain of degree `t` lies in `P`.
    pub fn in_lie(&self, t: i64, v: &[(usize, Q)]) -> bool {
        let (ints, _) = clear_denominators(v);
        let wide: Vec<(usize, BigInt)> = ints;
        for (b, piece) in split(&self.r.blocks(t), &wide) {
            // e_n fixes exactly the elements of P
            let mut acc: BTreeMap<u32, BigInt> = BTreeMap::new();
            for (i, c) in &piece {
                for (g, a) in &self.w[b.n - 1] {
                    let k = self.r.column(b.n).pullback_index(g, self.r.column(b.n), b.q, *i);
                    *acc.entry(k).or_insert_with(BigInt::zero) += c * BigInt::from(*a);
                }
            }
            let n = BigInt::from(b.n);
            let mut expect: BTreeMap<u32, BigInt> = piece.iter().map(|(i, c)| (*i, c * &n)).collect();
            acc.retain(|_, c| !c.is_zero());
            expect.retain(|_, c| !c.is_zero());
            if acc != expect {
                return false;
            }
        }
        true
    }

    /// Matrix of the bracket `H_s × H_t → H_{s+t}`: entry `(i, j)` holds the
    /// class coordinates of `[x_i, y_j]`.
    pub fn bracket_table(&self, hs: &LieHomology, ht: &LieHomology, hst: &LieHomology) -> Result<BracketTable> {
        let (s, t) = (hs.t, ht.t);
        if hst.t != s + t {
            return Err(Error::InvalidArgument("target homology has the wrong degree".into()));
        }
        let mut matrix = Vec::new();
        for x in &hs.representatives {
            let mut row = Vec::new();
            for y in &ht.representatives {
                let z = self.bracket(s, x, t, y);
                if !self.in_lie(s + t, &z) {
                    return Err(Error::VerificationFailed(format!(
                        "bracket of degrees {s}, {t} left the Lie summand"
                    )));
                }
                row.push(hst.class_of(&z)?);
            }
            matrix.push(row);
        }
        Ok(BracketTable { s, t, matrix })
    }

    /// Recomputes a bracket table after adding random boundaries to every
    /// representative; returns whether all class coordinates agree.
    pub fn probe_representatives(&self, hs: &LieHomology, ht: &LieHomology, hst: &LieHomology, table: &BracketTable) -> Result<bool> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ ((hs.t as u64) << 32 | ht.t as u64));
        let mut perturb = |h: &LieHomology| -> Vec<SparseQ> {
            let up = self.basis(h.t + 1);
            h.representatives
                .iter()
                .map(|x| {
                    if up.is_empty() {
                        return x.clone();
                    }
                    let picks = sample(&mut rng, up.len(), up.len().min(3));
                    let mut b = Vec::new();
                    for (k, i) in picks.into_iter().enumerate() {
                        b.extend(up[i].iter().map(|&(j, c)| (j, c * (k as i64 + 1))));
                    }
                    let db = self.r.d_global(h.t + 1, &normalize_z(b));
                    let db: SparseQ = db.into_iter().map(|(j, c)| (j as usize, rational::q(c))).collect();
                    normalize_q(x.iter().cloned().chain(db).collect())
                })
                .collect()
        };
        let xs = perturb(hs);
        let ys = perturb(ht);
        for (i, x) in xs.iter().enumerate() {
            for (j, y) in ys.iter().enumerate() {
                let z = self.bracket(hs.t, x, ht.t, y);
                if hst.class_of(&z)? != table.matrix[i][j] {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    fn sample_indices(&self, dim: usize, salt: u64) -> Vec<u32> {
        if dim <= CERTIFICATE_SAMPLE {
            return (0..dim as u32).collect();
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt);
        let mut v: Vec<u32> = sample(&mut rng, dim, CERTIFICATE_SAMPLE).into_iter().map(|i| i as u32).collect();
        v.sort_unstable();
        v
    }

    /// `F(f_n) F(w_n) x = F(w_{n+1}) F(φ_n) x` (scaled by `n+1`) for basis
    /// chains `x` of every column `n < N` in internal degrees `≤ q_hi`.
    pub fn closure_certificate(&self, q_hi: usize) -> Result<Certificate> {
        let mut cert = Certificate::empty();
        for n in 1..self.n_max() {
            let phi = int_terms(&fincat::phi(n)?.scale(&rational::q(n as i64 + 1)))?;
            for q in 0..=q_hi.min(self.q_max()) {
                let dim = self.r.column(n).dim(q);
                let idx = self.sample_indices(dim, (n * 64 + q) as u64);
                let ok = idx.par_iter().all(|&x| {
                    let lhs = self.r.external(n, q, &self.apply_w(n, q, &[(x, 1)]));
                    let lhs: SparseZ = lhs.into_iter().map(|(i, c)| (i, c * (n as i64 + 1))).collect();
                    let rhs = self.apply_w(n + 1, q, &self.r.pull(n, n + 1, q, &phi, &[(x, 1)]));
                    lhs == rhs
                });
                cert.merge(&Certificate {
                    passed: ok,
                    checked: idx.len(),
                    total: dim,
                });
            }
        }
        Ok(cert)
    }

    /// `F(B) F(w_p ⨿ w_q) x = F(w_{p+q}) F((p+q) ψ) x` for basis chains of
    /// every column `p + q ≤ N` in internal degrees `≤ q_hi`.
    pub fn bracket_certificate(&self, q_hi: usize) -> Result<Certificate> {
        let mut cert = Certificate::empty();
        for m in 2..=self.n_max() {
            for p in 1..m {
                let qq = m - p;
                let wpq = int_terms(
                    fincat::w_element(p)?
                        .disjoint_union(&fincat::w_element(qq)?)
                        .as_dmorphism(),
                )?;
                let b = int_terms(fincat::bracket_element(p, qq)?.as_dmorphism())?;
                let psi = int_terms(fincat::psi(p, qq)?.scale(&rational::q(m as i64)).as_dmorphism())?;
                for q in 0..=q_hi.min(self.q_max()) {
                    let dim = self.r.column(m).dim(q);
                    let idx = self.sample_indices(dim, (m * 4096 + p * 64 + q) as u64);
                    let ok = idx.par_iter().all(|&x| {
                        let lhs = self.r.pull(m, m, q, &b, &self.r.pull(m, m, q, &wpq, &[(x, 1)]));
                        let lhs: SparseZ = lhs.into_iter().map(|(i, c)| (i, c * m as i64)).collect();
                        let rhs = self.apply_w(m, q, &self.r.pull(m, m, q, &psi, &[(x, 1)]));
                        lhs == rhs
                    });
                    cert.merge(&Certificate {
                        passed: ok,
                        checked: idx.len(),
                        total: dim,
                    });
                }
            }
        }
        Ok(cert)
    }

    /// `w_n² = n w_n` on every `w_n`-image used, and `rank = trace / n`.
    pub fn idempotent_certificate(&self, t_lo: i64, t_hi: i64) -> Certificate {
        let mut cert = Certificate::empty();
        for t in t_lo..=t_hi {
            for b in self.r.blocks(t) {
                let lb = self.lie_block(b.n, b.q);
                cert.merge(&Certificate {
                    passed: lb.idempotent && lb.trace == (b.n * lb.vectors.len()) as i64,
                    checked: b.len,
                    total: b.len,
                });
            }
        }
        cert
    }

    /// `D D p = 0` and `D p ∈ P` for basis vectors of `P_t`, `t_lo ≤ t ≤ t_hi`.
    pub fn differential_certificate(&self, t_lo: i64, t_hi: i64) -> Certificate {
        let mut cert = Certificate::empty();
        for t in t_lo..=t_hi {
            let basis = self.basis(t);
            let idx = self.sample_indices(basis.len(), 0xd0d0 + t as u64);
            let ok = idx.par_iter().all(|&i| {
                let dp = self.r.d_global(t, &basis[i as usize]);
                let ddp = self.r.d_global(t - 1, &dp);
                let dq: SparseQ = dp.iter().map(|&(j, c)| (j as usize, rational::q(c))).collect();
                ddp.is_empty() && self.in_lie(t - 1, &dq)
            });
            cert.merge(&Certificate {
                passed: ok,
                checked: idx.len(),
                total: basis.len(),
            });
        }
        cert
    }

    /// Full report: ranks for `1 ≤ t ≤ t_max`, brackets between nonzero
    /// degrees with `s ≤ t`, `s + t ≤ t_max`, and all certificates.
    pub fn report(&self, t_max: usize) -> Result<HomotopyReport> {
        let ranks = self.homotopy_ranks(t_max)?;
        let q_hi = self.q_max();
        let mut certificates = BTreeMap::new();
        certificates.insert("closure".to_string(), self.closure_certificate(q_hi)?);
        certificates.insert("bracket_closure".to_string(), self.bracket_certificate(q_hi)?);
        certificates.insert("idempotent".to_string(), self.idempotent_certificate(0, t_max as i64 + 1));
        certificates.insert(
            "differential".to_string(),
            self.differential_certificate(1, t_max as i64 + 1),
        );
        let mut homology: BTreeMap<i64, LieHomology> = BTreeMap::new();
        let mut brackets = Vec::new();
        let mut probe = Certificate::empty();
        for s in 1..=t_max as i64 {
            for t in s..=t_max as i64 - s {
                if ranks[&s] == 0 || ranks[&t] == 0 {
                    continue;
                }
                for d in [s, t, s + t] {
                    if let std::collections::btree_map::Entry::Vacant(e) = homology.entry(d) {
                        e.insert(self.homology(d)?);
                    }
                }
                let table = self.bracket_table(&homology[&s], &homology[&t], &homology[&(s + t)])?;
                let stable = self.probe_representatives(&homology[&s], &homology[&t], &homology[&(s + t)], &table)?;
                probe.merge(&Certificate {
                    passed: stable,
                    checked: 1,
                    total: 1,
                });
                brackets.push(table);
            }
        }
        certificates.insert("representative_independence".to_string(), probe);
        let representatives = homology
            .iter()
            .map(|(t, h)| (*t, h.representatives.clone()))
            .collect();
        Ok(HomotopyReport {
            space: self.r.space().name().to_string(),
            n: self.n_max(),
            q_max: self.q_max(),
            t_max,
            ranks,
            representatives,
            brackets,
            certificates,
        })
    }
}

/// Arithmetic types whose values convert to big integers.
pub trait IntoBig {
    fn to_big(&self) -> BigInt;
}

impl IntoBig for i128 {
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl IntoBig for BigInt {
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// The pairing `H_s × H_t → H_{s+t}` in representative bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketTable {
    pub s: i64,
    pub t: i64,
    pub matrix: Vec<Vec<Vec<Q>>>,
}

impl BracketTable {
    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().flatten().all(|c| c.is_zero())
    }

    /// `[x_i, x_j] = −(−1)^{s s}[x_j, x_i]` when `s = t`.
    pub fn is_graded_antisymmetric(&self) -> bool {
        if self.s != self.t {
            return true;
        }
        let sign = -neg_one_pow(self.s * self.s);
        let k = self.matrix.len();
        (0..k).all(|i| {
            (0..k).all(|j| {
                self.matrix[i][j]
                    .iter()
                    .zip(&self.matrix[j][i])
                    .all(|(a, b)| *a == b * rational::q(sign))
            })
        })
    }

    fn to_json(&self) -> serde_json::Value {
        let m: Vec<Vec<Vec<String>>> = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|v| v.iter().map(rational::to_string).collect()).collect())
            .collect();
        serde_json::json!({ "s": self.s, "t": self.t, "matrix": m })
    }
}

/// Ranks, representatives, brackets and certificates for one run.
#[derive(Clone, Debug)]
pub struct HomotopyReport {
    pub space: String,
    pub n: usize,
    pub q_max: usize,
    pub t_max: usize,
    pub ranks: BTreeMap<i64, usize>,
    pub representatives: BTreeMap<i64, Vec<SparseQ>>,
    pub brackets: Vec<BracketTable>,
    pub certificates: BTreeMap<String, Certificate>,
}

impl HomotopyReport {
    pub fn certificates_pass(&self) -> bool {
        self.certificates.values().all(|c| c.passed)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ranks: serde_json::Map<String, serde_json::Value> =
            self.ranks.iter().map(|(t, r)| (t.to_string(), (*r).into())).collect();
        let reps: serde_json::Map<String, serde_json::Value> = self
            .representatives
            .iter()
            .map(|(t, v)| {
                let list: Vec<Vec<(usize, String)>> = v
                    .iter()
                    .map(|r| r.iter().map(|(i, c)| (*i, rational::to_string(c))).collect())
                    .collect();
                (t.to_string(), serde_json::json!(list))
            })
            .collect();
        let certs: serde_json::Map<String, serde_json::Value> =
            self.certificates.iter().map(|(k, c)| (k.clone(), c.passed.into())).collect();
        let coverage: serde_json::Map<String, serde_json::Value> = self
            .certificates
            .iter()
            .map(|(k, c)| (k.clone(), serde_json::json!({ "checked": c.checked, "total": c.total })))
            .collect();
        serde_json::json!({
            "space": self.space,
            "N": self.n,
            "q_max": self.q_max,
            "T": self.t_max,
            "ranks": ranks,
            "representatives": reps,
            "brackets": self.brackets.iter().map(BracketTable::to_json).collect::<Vec<_>>(),
            "certificates": certs,
            "certificate_coverage": coverage,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s2() -> SimplicialSpace {
        SimplicialSpace::sphere(2).unwrap()
    }

    #[test]
    fn window_rule() {
        assert!(check_window(4, 8, 3).is_ok());
        assert!(check_window(2, 8, 3).is_err());
        assert!(check_window(4, 7, 3).is_err());
        // a 2-connected space is stable further out
        assert!(check_window_connected(2, 3, 9, 4).is_ok());
        assert!(check_window_connected(2, 3, 12, 8).is_err());
    }

    #[test]
    fn single_column_is_reduced_homology() {
        let r = CobarAlgebra::build(&s2(), 1, 4, None).unwrap();
        let h = r.homology_ranks(-1, 3);
        assert_eq!(h.into_iter().collect::<Vec<_>>(), vec![(-1, 0), (0, 0), (1, 1), (2, 0), (3, 0)]);
    }

    #[test]
    fn total_differential_squares_to_zero() {
        let r = CobarAlgebra::build(&s2(), 3, 6, None).unwrap();
        for t in -1..=4 {
            for i in 0..r.dim(t) as u32 {
                let d = r.d_global(t, &[(i, 1)]);
                assert!(r.d_global(t - 1, &d).is_empty(), "t={t} i={i}");
            }
        }
    }

    #[test]
    fn leibniz_square_low_degrees() {
        let r = CobarAlgebra::build(&s2(), 3, 5, None).unwrap();
        assert_eq!(r.leibniz_check(1, 1).unwrap(), None);
    }

    #[test]
    fn lie_blocks_have_trace_rank() {
        let p = CobarLie::build(&s2(), 3, 6, None).unwrap();
        for q in 2..=6 {
            let b = p.lie_block(3, q);
            assert!(b.idempotent);
            assert_eq!(b.trace, 3 * b.vectors.len() as i64);
            assert_eq!(b.keys.len(), b.vectors.len());
        }
        assert_eq!(p.lie_block(1, 2).vectors.len(), 1);
    }

    #[test]
    fn sphere_low_ranks() {
        let p = CobarLie::build(&s2(), 2, 5, None).unwrap();
        let r = p.homotopy_ranks(2).unwrap();
        assert_eq!(r.into_iter().collect::<Vec<_>>(), vec![(1, 1), (2, 1)]);
    }
}
