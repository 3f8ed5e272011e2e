//! Finite sets with all set maps, their rational linearization, and the
//! named elements of the symmetric group algebras used by the construction.
//!
//! Conventions:
//! - `[n]` is `{1, …, n}`; a [`SetMap`] stores its images zero-based.
//! - `a.compose(&b)` is `a ∘ b` (apply `b` first). Group-ring products use
//!   the same order, so `x · (g h) = (x · g) · h` for the pullback action and
//!   right-multiplication realizations satisfy `R_h ∘ R_g = R_{gh}`.
//! - The cycle `c_i ∈ Σ_n` is the map `1 ↦ i, j ↦ j-1 (2 ≤ j ≤ i)`; pulling a
//!   tuple back along it moves the `i`-th entry to the front. With this
//!   choice `w_n = ∏_{i=2}^{n} (1 + (-1)^i c_i)` acts on words as the
//!   left-normed bracket.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::freelie::{GradedGenerators, TensorElement};
use crate::rational::{self, q, qfrac, Q};

/// A map of finite sets `[domain] → [codomain]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetMap {
    codomain: usize,
    images: Vec<usize>,
}

impl fmt::Debug for SetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imgs: Vec<usize> = self.images.iter().map(|i| i + 1).collect();
        write!(f, "[{}]→[{}]{:?}", self.domain(), self.codomain, imgs)
    }
}

impl SetMap {
    /// Builds a map from one-based images.
    pub fn new(codomain: usize, images: &[usize]) -> Result<Self> {
        if codomain == 0 || images.is_empty() {
            return Err(Error::InvalidArgument(
                "set maps need positive domain and codomain".into(),
            ));
        }
        if let Some(bad) = images.iter().find(|&&i| i == 0 || i > codomain) {
            return Err(Error::IndexOutOfRange(format!(
                "image {bad} not in 1..={codomain}"
            )));
        }
        Ok(SetMap {
            codomain,
            images: images.iter().map(|i| i - 1).collect(),
        })
    }

    pub(crate) fn from_zero_based(codomain: usize, images: Vec<usize>) -> Self {
        debug_assert!(images.iter().all(|&i| i < codomain));
        SetMap { codomain, images }
    }

    pub fn identity(n: usize) -> Self {
        SetMap::from_zero_based(n, (0..n).collect())
    }

    pub fn domain(&self) -> usize {
        self.images.len()
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    /// Zero-based image of the zero-based point `j`.
    pub fn apply(&self, j: usize) -> usize {
        self.images[j]
    }

    /// One-based images.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    pub(crate) fn images0(&self) -> &[usize] {
        &self.images
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SetMap) -> Result<SetMap> {
        if other.codomain != self.domain() {
            return Err(Error::SizeMismatch(format!(
                "cannot compose {self:?} after {other:?}"
            )));
        }
        Ok(SetMap::from_zero_based(
            self.codomain,
            other.images.iter().map(|&j| self.images[j]).collect(),
        ))
    }

    /// `self ⨿ other`, with `self` on the low indices.
    pub fn disjoint_union(&self, other: &SetMap) -> SetMap {
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&j| j + self.codomain));
        SetMap::from_zero_based(self.codomain + other.codomain, images)
    }

    pub fn is_bijection(&self) -> bool {
        self.domain() == self.codomain && self.is_surjective()
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.codomain];
        for &i in &self.images {
            hit[i] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Sign of a permutation.
    pub fn sign(&self) -> Result<i64> {
        if !self.is_bijection() {
            return Err(Error::InvalidArgument(format!("{self:?} is not a permutation")));
        }
        let mut inversions = 0usize;
        for i in 0..self.images.len() {
            for j in i + 1..self.images.len() {
                if self.images[i] > self.images[j] {
                    inversions += 1;
                }
            }
        }
        Ok(if inversions % 2 == 0 { 1 } else { -1 })
    }

    /// Koszul sign of pulling a word with letter degrees `degrees`
    /// (indexed by the codomain) back along this map: one factor
    /// `(-1)^{|a||b|}` for every pair of output letters whose sources appear
    /// in the opposite order. Duplicated letters contribute nothing.
    pub fn koszul_sign(&self, degrees: &[i64]) -> i64 {
        let mut odd = false;
        for a in 0..self.images.len() {
            for b in a + 1..self.images.len() {
                let (ia, ib) = (self.images[a], self.images[b]);
                if ia > ib && degrees[ia] * degrees[ib] % 2 != 0 {
                    odd = !odd;
                }
            }
        }
        if odd {
            -1
        } else {
            1
        }
    }
}

/// The cycle `c_i ∈ Σ_n` (see module docs).
pub fn cycle(n: usize, i: usize) -> SetMap {
    assert!(1 <= i && i <= n);
    let mut images: Vec<usize> = (0..n).collect();
    images[0] = i - 1;
    for (j, img) in images.iter_mut().enumerate().take(i).skip(1) {
        *img = j - 1;
    }
    SetMap::from_zero_based(n, images)
}

/// The block swap in `Σ_{p+q}` whose pullback sends `(x_1..x_p, y_1..y_q)`
/// to `(y_1..y_q, x_1..x_p)`.
pub fn block_swap(p: usize, q: usize) -> SetMap {
    let images = (0..q).map(|j| p + j).chain(0..p).collect();
    SetMap::from_zero_based(p + q, images)
}

/// The transposition of `a` and `b` (one-based) in `Σ_n`.
pub fn transposition(n: usize, a: usize, b: usize) -> SetMap {
    let mut images: Vec<usize> = (0..n).collect();
    images.swap(a - 1, b - 1);
    SetMap::from_zero_based(n, images)
}

/// All permutations of `[n]` in lexicographic order of images.
pub fn all_permutations(n: usize) -> Vec<SetMap> {
    fn rec(n: usize, cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<SetMap>) {
        if cur.len() == n {
            out.push(SetMap::from_zero_based(n, cur.clone()));
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(n, cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// A formal rational combination of set maps `[domain] → [codomain]`.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct DMorphism {
    domain: usize,
    codomain: usize,
    terms: BTreeMap<SetMap, Q>,
}

impl fmt::Debug for DMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D([{}]→[{}])", self.domain, self.codomain)?;
        let mut first = true;
        for (m, c) in &self.terms {
            write!(f, "{}{}·{:?}", if first { " " } else { " + " }, rational::to_string(c), m.images())?;
            first = false;
        }
        if first {
            write!(f, " 0")?;
        }
        Ok(())
    }
}

impl DMorphism {
    pub fn zero(domain: usize, codomain: usize) -> Self {
        DMorphism {
            domain,
            codomain,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_map(map: SetMap) -> Self {
        Self::from_term(map, Q::one())
    }

    pub fn from_term(map: SetMap, coeff: Q) -> Self {
        let mut d = DMorphism::zero(map.domain(), map.codomain());
        d.add_term(map, coeff);
        d
    }

    pub fn identity(n: usize) -> Self {
        Self::from_map(SetMap::identity(n))
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn codomain(&self) -> usize {
        self.codomain
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SetMap, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, map: &SetMap) -> Q {
        self.terms.get(map).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, map: SetMap, coeff: Q) {
        assert_eq!((map.domain(), map.codomain()), (self.domain, self.codomain));
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(map);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_same_shape(&self, other: &DMorphism) -> Result<()> {
        if (self.domain, self.codomain) != (other.domain, other.codomain) {
            return Err(Error::SizeMismatch(format!(
                "[{}]→[{}] vs [{}]→[{}]",
                self.domain, self.codomain, other.domain, other.codomain
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &DMorphism) -> Result<DMorphism> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DMorphism) -> Result<DMorphism> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> DMorphism {
        let mut out = DMorphism::zero(self.domain, self.codomain);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a * c);
        }
        out
    }

    /// Bilinear composition `self ∘ other`.
    pub fn compose(&self, other: &DMorphism) -> Result<DMorphism> {
        if other.codomain != self.domain {
            return Err(Error::SizeMismatch(format!(
                "cannot compose [{}]→[{}] after [{}]→[{}]",
                self.domain, self.codomain, other.domain, other.codomain
            )));
        }
        let mut out = DMorphism::zero(other.domain, self.codomain);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.compose(b)?, ca * cb);
            }
        }
        Ok(out)
    }

    /// Bilinear extension of `⨿`; `self` occupies the low indices.
    pub fn disjoint_union(&self, other: &DMorphism) -> DMorphism {
        let mut out = DMorphism::zero(self.domain + other.domain, self.codomain + other.codomain);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.disjoint_union(b), ca * cb);
            }
        }
        out
    }

    /// First term (map, coefficient) where `self` and `other` differ.
    pub fn first_difference(&self, other: &DMorphism) -> Option<(SetMap, Q, Q)> {
        let keys: std::collections::BTreeSet<&SetMap> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().find_map(|k| {
            let (a, b) = (self.coefficient(k), other.coefficient(k));
            (a != b).then(|| (k.clone(), a, b))
        })
    }
}

/// An element of `Q[Σ_n]`, embedded in `Hom_D([n],[n])`.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    inner: DMorphism,
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q[Σ_{}]", self.n())?;
        let mut first = true;
        for (m, c) in self.inner.terms() {
            write!(f, "{}{}·{:?}", if first { " " } else { " + " }, rational::to_string(c), m.images())?;
            first = false;
        }
        Ok(())
    }
}

impl GroupRingElement {
    pub fn zero(n: usize) -> Self {
        GroupRingElement {
            inner: DMorphism::zero(n, n),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::from_permutation(SetMap::identity(n)).expect("identity is a bijection")
    }

    pub fn from_permutation(p: SetMap) -> Result<Self> {
        Self::from_term(p, Q::one())
    }

    pub fn from_term(p: SetMap, c: Q) -> Result<Self> {
        if !p.is_bijection() {
            return Err(Error::InvalidArgument(format!("{p:?} is not a permutation")));
        }
        Ok(GroupRingElement {
            inner: DMorphism::from_term(p, c),
        })
    }

    /// Wraps a morphism all of whose terms are permutations.
    pub fn from_dmorphism(d: DMorphism) -> Result<Self> {
        if d.domain() != d.codomain() || d.terms().any(|(m, _)| !m.is_bijection()) {
            return Err(Error::InvalidArgument(
                "not an element of a symmetric group algebra".into(),
            ));
        }
        Ok(GroupRingElement { inner: d })
    }

    pub fn n(&self) -> usize {
        self.inner.domain()
    }

    pub fn as_dmorphism(&self) -> &DMorphism {
        &self.inner
    }

    pub fn into_dmorphism(self) -> DMorphism {
        self.inner
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SetMap, &Q)> {
        self.inner.terms()
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    pub fn coefficient(&self, p: &SetMap) -> Q {
        self.inner.coefficient(p)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(GroupRingElement {
            inner: self.inner.add(&other.inner)?,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(GroupRingElement {
            inner: self.inner.sub(&other.inner)?,
        })
    }

    pub fn scale(&self, c: &Q) -> Self {
        GroupRingElement {
            inner: self.inner.scale(c),
        }
    }

    /// Ring product `self · other`, i.e. `self ∘ other` in `D`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        Ok(GroupRingElement {
            inner: self.inner.compose(&other.inner)?,
        })
    }

    pub fn disjoint_union(&self, other: &Self) -> Self {
        GroupRingElement {
            inner: self.inner.disjoint_union(&other.inner),
        }
    }

    /// `Σ c_π ε(π) π`.
    pub fn sign_twist(&self) -> Self {
        let mut out = DMorphism::zero(self.n(), self.n());
        for (p, c) in self.terms() {
            out.add_term(p.clone(), c * q(p.sign().expect("permutation")));
        }
        GroupRingElement { inner: out }
    }

    /// Sum of the coefficients of `π` weighted by `chi(π)`.
    pub fn trace_against(&self, chi: impl Fn(&SetMap) -> i64) -> Q {
        self.terms().map(|(p, c)| c * q(chi(p))).sum()
    }
}

/// The coordinate-duplication map `δ_i: [n+1] → [n]`.
///
/// `δ_i(j) = j` for `j ≤ i` and `j - 1` for `j > i`, clamped to `[n]`; so
/// `δ_i` identifies `i` and `i+1` for `i ≤ n`, and `δ_{n+1} = δ_n`.
pub fn delta(i: usize, n: usize) -> Result<SetMap> {
    if n == 0 {
        return Err(Error::InvalidArgument("delta needs n ≥ 1".into()));
    }
    if i == 0 || i > n + 1 {
        return Err(Error::IndexOutOfRange(format!("delta index {i} not in 1..={}", n + 1)));
    }
    let images: Vec<usize> = (1..=n + 1)
        .map(|j| if j <= i { j } else { j - 1 }.min(n))
        .collect();
    SetMap::new(n, &images)
}

/// `f_n = Σ_{i=1}^{n} (-1)^{i-1} δ_i ∈ Hom_D([n+1],[n])`.
pub fn cobar_differential(n: usize) -> Result<DMorphism> {
    if n == 0 {
        return Err(Error::InvalidArgument("cobar differential needs n ≥ 1".into()));
    }
    let mut f = DMorphism::zero(n + 1, n);
    for i in 1..=n {
        f.add_term(delta(i, n)?, q(if i % 2 == 1 { 1 } else { -1 }));
    }
    Ok(f)
}

fn product_of_factors(n: usize, factor_sign: impl Fn(usize) -> i64) -> Result<GroupRingElement> {
    if n == 0 {
        return Err(Error::InvalidArgument("group ring elements need n ≥ 1".into()));
    }
    let mut acc = GroupRingElement::one(n);
    for i in 2..=n {
        let mut factor = GroupRingElement::one(n);
        factor = factor.add(&GroupRingElement::from_term(cycle(n, i), q(factor_sign(i)))?)?;
        acc = acc.multiply(&factor)?;
    }
    Ok(acc)
}

/// `s_n = (1 - c_2)(1 - c_3)⋯(1 - c_n)`, `s_1 = 1`.
pub fn s_element(n: usize) -> Result<GroupRingElement> {
    product_of_factors(n, |_| -1)
}

/// `w_n = ∏_{i=2}^{n} (1 - ε(c_i) c_i) = (1 + c_2)(1 - c_3)⋯(1 + (-1)^n c_n)`.
pub fn w_element(n: usize) -> Result<GroupRingElement> {
    product_of_factors(n, |i| if i % 2 == 0 { 1 } else { -1 })
}

/// `w_n` with the sign of every factor from `i = 3` on reversed. Used only
/// to check that the identity suite detects a sign-convention fault.
pub fn w_element_flipped(n: usize) -> Result<GroupRingElement> {
    product_of_factors(n, |i| match i {
        2 => 1,
        _ if i % 2 == 0 => -1,
        _ => 1,
    })
}

/// `B_{p,q} = 1 - (-1)^{pq} τ_{p,q}` with `τ_{p,q}` the block swap; this is
/// the `p`-th power of the descending `(p+q)`-cycle.
pub fn bracket_element(p: usize, qq: usize) -> Result<GroupRingElement> {
    if p == 0 || qq == 0 {
        return Err(Error::InvalidArgument("bracket element needs p, q ≥ 1".into()));
    }
    let sign = if (p * qq) % 2 == 0 { -1 } else { 1 };
    GroupRingElement::one(p + qq).add(&GroupRingElement::from_term(block_swap(p, qq), q(sign))?)
}

/// `φ_n = (1/(n+1)) · w_n ∘ f_n`, returned only after checking
/// `w_n ∘ f_n = φ_n ∘ w_{n+1}` exactly.
pub fn phi(n: usize) -> Result<DMorphism> {
    let wf = w_element(n)?.as_dmorphism().compose(&cobar_differential(n)?)?;
    let phi = wf.scale(&qfrac(1, n as i64 + 1));
    let rhs = phi.compose(w_element(n + 1)?.as_dmorphism())?;
    if rhs != wf {
        let diff = wf.first_difference(&rhs);
        return Err(Error::VerificationFailed(format!(
            "phi diagram fails for n = {n}: first differing term {diff:?}"
        )));
    }
    Ok(phi)
}

/// `ψ_{p,q} = (1/(p+q)) · (w_p ⨿ w_q) · B_{p,q}`, returned only after
/// checking `ψ ∘ w_{p+q} = (w_p ⨿ w_q) ∘ B_{p,q}` exactly.
pub fn psi(p: usize, qq: usize) -> Result<GroupRingElement> {
    let wb = w_element(p)?
        .disjoint_union(&w_element(qq)?)
        .multiply(&bracket_element(p, qq)?)?;
    let psi = wb.scale(&qfrac(1, (p + qq) as i64));
    let lhs = psi.multiply(&w_element(p + qq)?)?;
    if lhs != wb {
        let diff = wb.as_dmorphism().first_difference(lhs.as_dmorphism());
        return Err(Error::VerificationFailed(format!(
            "psi diagram fails for (p, q) = ({p}, {qq}): first differing term {diff:?}"
        )));
    }
    Ok(psi)
}

/// Contravariant tensor realization of `m: [a] → [b]` as a linear map
/// `Q[S]^{⊗b} → Q[S]^{⊗a}`: a set map pulls coordinates back and carries
/// the Koszul sign of the induced rearrangement of graded letters.
pub fn realize(m: &DMorphism, gens: &GradedGenerators, t: &TensorElement) -> Result<TensorElement> {
    if t.weight() != m.codomain() {
        return Err(Error::SizeMismatch(format!(
            "realization of [{}]→[{}] applied to weight {}",
            m.domain(),
            m.codomain(),
            t.weight()
        )));
    }
    let mut out = TensorElement::zero(m.domain());
    for (map, c) in m.terms() {
        for (word, a) in t.terms() {
            let degrees: Vec<i64> = word.iter().map(|&g| gens.degree(g as usize)).collect();
            let sign = map.koszul_sign(&degrees);
            let pulled: Vec<u16> = map.images0().iter().map(|&j| word[j]).collect();
            out.add_term(pulled, c * a * q(sign));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gr(terms: &[(&[usize], i64)]) -> GroupRingElement {
        let n = terms[0].0.len();
        let mut acc = GroupRingElement::zero(n);
        for (imgs, c) in terms {
            acc = acc
                .add(&GroupRingElement::from_term(SetMap::new(n, imgs).unwrap(), q(*c)).unwrap())
                .unwrap();
        }
        acc
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(1, 1).unwrap().images(), vec![1, 1]);
        assert_eq!(delta(1, 2).unwrap().images(), vec![1, 1, 2]);
        assert_eq!(delta(2, 2).unwrap().images(), vec![1, 2, 2]);
        assert_eq!(delta(3, 2).unwrap().images(), vec![1, 2, 2]);
        assert!(matches!(delta(0, 2), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(delta(4, 2), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn set_map_validation() {
        assert!(SetMap::new(2, &[1, 3]).is_err());
        assert!(SetMap::new(2, &[0]).is_err());
        let a = SetMap::new(2, &[2, 1, 1]).unwrap();
        let b = SetMap::new(3, &[3, 1]).unwrap();
        assert_eq!(a.compose(&b).unwrap().images(), vec![1, 2]);
        assert!(b.compose(&b).is_err());
    }

    #[test]
    fn f1_is_single_delta() {
        let f1 = cobar_differential(1).unwrap();
        assert_eq!(f1, DMorphism::from_map(delta(1, 1).unwrap()));
    }

    #[test]
    fn small_group_ring_elements() {
        assert_eq!(s_element(1).unwrap(), GroupRingElement::one(1));
        assert_eq!(w_element(1).unwrap(), GroupRingElement::one(1));
        assert_eq!(s_element(2).unwrap(), gr(&[(&[1, 2], 1), (&[2, 1], -1)]));
        assert_eq!(w_element(2).unwrap(), gr(&[(&[1, 2], 1), (&[2, 1], 1)]));
        assert_eq!(bracket_element(1, 1).unwrap(), gr(&[(&[1, 2], 1), (&[2, 1], 1)]));
        let w3 = w_element(3).unwrap();
        assert!(w3.len() <= 4);
        assert!(w3.terms().all(|(_, c)| c == &q(1) || c == &q(-1)));
    }

    #[test]
    fn disjoint_union_blocks() {
        let s = DMorphism::from_map(transposition(2, 1, 2));
        let u = s.disjoint_union(&DMorphism::identity(1));
        assert_eq!(u, DMorphism::from_map(SetMap::new(3, &[2, 1, 3]).unwrap()));
        assert_eq!(
            DMorphism::identity(2).disjoint_union(&DMorphism::identity(3)),
            DMorphism::identity(5)
        );
    }

    #[test]
    fn phi_one_and_psi_one_one() {
        assert_eq!(
            phi(1).unwrap(),
            DMorphism::from_term(delta(1, 1).unwrap(), qfrac(1, 2))
        );
        assert_eq!(psi(1, 1).unwrap(), w_element(2).unwrap().scale(&qfrac(1, 2)));
    }

    #[test]
    fn flipped_w_breaks_at_three() {
        for n in 1..=2 {
            let w = w_element_flipped(n).unwrap();
            assert_eq!(w.multiply(&w).unwrap(), w.scale(&q(n as i64)));
        }
        let w = w_element_flipped(3).unwrap();
        assert_ne!(w.multiply(&w).unwrap(), w.scale(&q(3)));
    }

    #[test]
    fn cycles_and_signs() {
        let c3 = cycle(3, 3);
        assert_eq!(c3.images(), vec![3, 1, 2]);
        assert_eq!(c3.sign().unwrap(), 1);
        assert_eq!(cycle(4, 2), transposition(4, 1, 2));
        assert_eq!(block_swap(1, 2).images(), vec![2, 3, 1]);
        assert_eq!(all_permutations(4).len(), 24);
    }
}
