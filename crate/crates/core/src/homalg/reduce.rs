//! Fraction-free incremental column reduction over the integers.
//!
//! Vectors are reduced against stored pivots keyed by their largest row.
//! A step replaces `v` by `b·v − a·p` where `a`, `b` are the leading entries
//! of `v` and `p` divided by their gcd, followed by division by the content,
//! so all arithmetic stays integral. The reducer optionally tracks each
//! pivot as a combination of the inserted vectors, which yields kernels, and
//! reports for any probe vector `z` a remainder `r ≡ s·z` modulo the span.
//!
//! Arithmetic is generic: `i128` with checked operations is tried first and
//! callers fall back to `BigInt` when it reports [`Overflow`].

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::rational::Q;

/// Integer arithmetic left the range of the chosen representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Overflow;

pub trait Coeff: Clone + std::fmt::Debug + PartialEq {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(x: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn mul(&self, o: &Self) -> Result<Self, Overflow>;
    fn sub(&self, o: &Self) -> Result<Self, Overflow>;
    fn gcd(&self, o: &Self) -> Self;
    fn div_exact(&self, o: &Self) -> Self;
    fn is_unit(&self) -> bool;
    fn to_q(&self) -> Q;
}

impl Coeff for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn from_i64(x: i64) -> Self {
        x as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_mul(*o).ok_or(Overflow)
    }
    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        self.checked_sub(*o).ok_or(Overflow)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }
    fn to_q(&self) -> Q {
        Q::from_integer(BigInt::from(*self))
    }
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(x: i64) -> Self {
        BigInt::from(x)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self * o)
    }
    fn sub(&self, o: &Self) -> Result<Self, Overflow> {
        Ok(self - o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn div_exact(&self, o: &Self) -> Self {
        self / o
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn to_q(&self) -> Q {
        Q::from_integer(self.clone())
    }
}

pub type Vector<T> = Vec<(u32, T)>;

/// `x·a − y·b` on sorted sparse vectors.
fn lincomb<T: Coeff>(a: &[(u32, T)], x: &T, b: &[(u32, T)], y: &T) -> Result<Vector<T>, Overflow> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push((a[i].0, a[i].1.mul(x)?));
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, T::zero().sub(&b[j].1.mul(y)?)?));
            j += 1;
        } else {
            let v = a[i].1.mul(x)?.sub(&b[j].1.mul(y)?)?;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

fn content<T: Coeff>(g: T, v: &[(u32, T)]) -> T {
    let mut g = g;
    for (_, x) in v {
        if g.is_unit() {
            break;
        }
        g = g.gcd(x);
    }
    g
}

fn divide<T: Coeff>(v: &mut [(u32, T)], g: &T) {
    for (_, x) in v.iter_mut() {
        *x = x.div_exact(g);
    }
}

#[derive(Clone, Debug)]
struct Pivot<T> {
    vector: Vector<T>,
    track: Vector<T>,
}

/// Result of reducing a probe vector `z`: `remainder = scale·z − Σ coeffs_k·u_k`
/// where `u_k` are the inserted vectors.
#[derive(Clone, Debug)]
pub struct Reduction<T> {
    pub remainder: Vector<T>,
    pub scale: T,
    pub coeffs: Vector<T>,
}

/// Incremental fraction-free echelon basis.
#[derive(Clone, Debug)]
pub struct IntReducer<T> {
    pivots: HashMap<u32, Pivot<T>>,
    tracking: bool,
    inserted: u32,
}

impl<T: Coeff> IntReducer<T> {
    /// With `tracking`, each pivot remembers its combination of inserted
    /// vectors (needed for kernels and coefficients).
    pub fn new(tracking: bool) -> Self {
        IntReducer {
            pivots: HashMap::new(),
            tracking,
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn inserted(&self) -> u32 {
        self.inserted
    }

    /// Leading rows of the stored pivots, ascending. Restricting vectors to
    /// these rows is injective on the span.
    pub fn pivot_rows(&self) -> Vec<u32> {
        let mut rows: Vec<u32> = self.pivots.keys().copied().collect();
        rows.sort_unstable();
        rows
    }

    fn step(
        &self,
        cur: &mut Vector<T>,
        mut scale: Option<&mut T>,
        track: &mut Vector<T>,
        row: u32,
        at: &T,
    ) -> Result<(), Overflow> {
        let p = &self.pivots[&row];
        let lead = &p.vector.last().expect("pivot").1;
        let g = at.gcd(lead);
        let (x, y) = (lead.div_exact(&g), at.div_exact(&g));
        *cur = lincomb(cur, &x, &p.vector, &y)?;
        if let Some(s) = scale.as_deref_mut() {
            *s = s.mul(&x)?;
        }
        if self.tracking {
            *track = lincomb(track, &x, &p.track, &y)?;
        }
        let g = scale.as_deref().cloned().unwrap_or_else(T::zero);
        let g = content(content(g, cur), track);
        if !g.is_unit() && !g.is_zero() {
            divide(cur, &g);
            divide(track, &g);
            if let Some(s) = scale {
                *s = s.div_exact(&g);
            }
        }
        Ok(())
    }

    /// Inserts `v`; returns `Ok(None)` if `v` was dependent, in which case
    /// (with tracking) `kernel` receives the relation as a combination of
    /// inserted vectors, including `v` itself with id `inserted() - 1`.
    pub fn insert(&mut self, v: Vector<T>, kernel: Option<&mut Vec<Vector<T>>>) -> Result<Option<u32>, Overflow> {
        let id = self.inserted;
        self.inserted += 1;
        let mut cur = v;
        let mut track: Vector<T> = if self.tracking { vec![(id, T::one())] } else { Vec::new() };
        while let Some((row, at)) = cur.last().cloned() {
            if !self.pivots.contains_key(&row) {
                let g = content(T::zero(), &cur);
                let g = if self.tracking { content(g, &track) } else { g };
                if !g.is_unit() {
                    divide(&mut cur, &g);
                    divide(&mut track, &g);
                }
                self.pivots.insert(row, Pivot { vector: cur, track });
                return Ok(Some(id));
            }
            self.step(&mut cur, None, &mut track, row, &at)?;
        }
        if let Some(k) = kernel {
            if self.tracking {
                k.push(track);
            }
        }
        Ok(None)
    }

    /// Reduces every entry lying in a pivot row, so the remainder is
    /// supported off the pivot rows and is zero iff `z` is in the span.
    pub fn reduce_full(&self, z: &[(u32, T)]) -> Result<Reduction<T>, Overflow> {
        let mut cur = z.to_vec();
        let mut scale = T::one();
        let mut track = Vec::new();
        let mut pos = cur.len();
        while pos > 0 {
            pos -= 1;
            let (row, at) = cur[pos].clone();
            if self.pivots.contains_key(&row) {
                self.step(&mut cur, Some(&mut scale), &mut track, row, &at)?;
                pos = cur.partition_point(|e| e.0 < row);
            }
        }
        // track holds the negated combination scaled along with cur
        let coeffs = track.into_iter().map(|(i, x)| (i, T::zero().sub(&x).expect("negation"))).collect();
        Ok(Reduction {
            remainder: cur,
            scale,
            coeffs,
        })
    }

    /// Whether `z` lies in the span (leading-entry reduction only).
    pub fn contains(&self, z: &[(u32, T)]) -> Result<bool, Overflow> {
        let mut cur = z.to_vec();
        let mut track = Vec::new();
        while let Some((row, at)) = cur.last().cloned() {
            if !self.pivots.contains_key(&row) {
                return Ok(false);
            }
            self.step(&mut cur, None, &mut track, row, &at)?;
        }
        Ok(true)
    }
}

pub fn to_i128(v: &[(u32, i64)]) -> Vector<i128> {
    v.iter().map(|&(i, x)| (i, x as i128)).collect()
}

pub fn to_big(v: &[(u32, i64)]) -> Vector<BigInt> {
    v.iter().map(|&(i, x)| (i, BigInt::from(x))).collect()
}

pub fn vector_to_q<T: Coeff>(v: &[(u32, T)]) -> Vec<(usize, Q)> {
    v.iter().map(|(i, x)| (*i as usize, x.to_q())).collect()
}

/// `i128` entries as `i64` when they fit.
pub fn narrow(v: &[(u32, i128)]) -> Option<Vec<(u32, i64)>> {
    v.iter().map(|&(i, x)| x.to_i64().map(|y| (i, y))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_reduction() {
        // columns (1,1,0), (0,1,1), (1,2,1)
        let cols: Vec<Vector<i128>> = vec![
            vec![(0, 1), (1, 1)],
            vec![(1, 1), (2, 1)],
            vec![(0, 1), (1, 2), (2, 1)],
        ];
        let mut r = IntReducer::<i128>::new(true);
        let mut ker = Vec::new();
        for c in cols {
            r.insert(c, Some(&mut ker)).unwrap();
        }
        assert_eq!(r.rank(), 2);
        assert_eq!(ker.len(), 1);
        let k = &ker[0];
        // k·cols = 0: k ∝ (1, 1, -1)
        assert_eq!(k.len(), 3);
        assert_eq!(k[0].1, k[1].1);
        assert_eq!(k[0].1, -k[2].1);
        let red = r.reduce_full(&[(0, 2), (1, 3), (2, 1)]).unwrap();
        assert!(red.remainder.is_empty());
        let red = r.reduce_full(&[(0, 1)]).unwrap();
        assert!(!red.remainder.is_empty());
        assert!(r.contains(&[(1, 2), (2, 2)]).unwrap());
        assert!(!r.contains(&[(2, 1)]).unwrap());
    }

    #[test]
    fn reduction_identity_holds() {
        let cols: Vec<Vector<i128>> = vec![vec![(0, 2), (2, 3)], vec![(1, 5), (2, 7)]];
        let mut r = IntReducer::<i128>::new(true);
        for c in &cols {
            r.insert(c.clone(), None).unwrap();
        }
        let z: Vector<i128> = vec![(0, 1), (1, 1), (2, 1), (3, 4)];
        let red = r.reduce_full(&z).unwrap();
        // remainder = scale·z − Σ coeffs·cols
        let mut acc: HashMap<u32, i128> = HashMap::new();
        for (i, x) in &z {
            *acc.entry(*i).or_default() += red.scale * x;
        }
        for (k, c) in &red.coeffs {
            for (i, x) in &cols[*k as usize] {
                *acc.entry(*i).or_default() -= c * x;
            }
        }
        let mut lhs: Vec<(u32, i128)> = acc.into_iter().filter(|e| e.1 != 0).collect();
        lhs.sort();
        assert_eq!(lhs, red.remainder);
    }
}
