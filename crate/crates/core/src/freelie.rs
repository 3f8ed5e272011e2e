//! Graded tensor algebra and the free graded Lie algebra on a finite set of
//! generators.
//!
//! Words are stored over a fixed generator order. The right action of
//! `Q[Σ_n]` on weight-`n` tensors is `(x·g)_j = x_{g(j)}` twisted by the sign
//! character and the Koszul sign of the rearrangement; under this action
//! `w_n` sends a word to its left-normed graded bracket and `B_{p,q}` sends
//! `a ⊗ b` to the graded commutator `ab - (-1)^{|a||b|} ba`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::fincat::{self, GroupRingElement, SetMap};
use crate::homalg::linalg::QMatrix;
use crate::rational::{q, qfrac, Q};

pub type Word = Vec<u16>;

/// An ordered list of named generators with integer degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedGenerators {
    names: Vec<String>,
    degrees: Vec<i64>,
}

impl GradedGenerators {
    pub fn new(names: &[&str], degrees: &[i64]) -> Result<Self> {
        if names.len() != degrees.len() {
            return Err(Error::SizeMismatch("one degree per generator".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for n in names {
            if !seen.insert(*n) {
                return Err(Error::InvalidArgument(format!("duplicate generator {n}")));
            }
        }
        if degrees.iter().any(|&d| d < 0) {
            return Err(Error::InvalidArgument("negative generator degree".into()));
        }
        Ok(GradedGenerators {
            names: names.iter().map(|s| s.to_string()).collect(),
            degrees: degrees.to_vec(),
        })
    }

    /// `m` generators `v1, …, vm`, all of degree `degree`.
    pub fn uniform(m: usize, degree: i64) -> Self {
        let names: Vec<String> = (1..=m).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        Self::new(&refs, &vec![degree; m]).expect("valid uniform generators")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, g: usize) -> &str {
        &self.names[g]
    }

    pub fn degree(&self, g: usize) -> i64 {
        self.degrees[g]
    }

    pub fn word_degree(&self, w: &[u16]) -> i64 {
        w.iter().map(|&g| self.degrees[g as usize]).sum()
    }

    /// All words of length `n`, in lexicographic order.
    pub fn words(&self, n: usize) -> Vec<Word> {
        let m = self.len();
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w: Word| {
                    (0..m as u16).map(move |g| {
                        let mut v = w.clone();
                        v.push(g);
                        v
                    })
                })
                .collect();
        }
        out
    }

    pub fn format_word(&self, w: &[u16]) -> String {
        w.iter().map(|&g| self.names[g as usize].as_str()).collect::<Vec<_>>().join("⊗")
    }
}

/// A homogeneous-weight element of the tensor algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorElement {
    weight: usize,
    terms: BTreeMap<Word, Q>,
}

impl TensorElement {
    pub fn zero(weight: usize) -> Self {
        TensorElement {
            weight,
            terms: BTreeMap::new(),
        }
    }

    pub fn word(w: &[u16]) -> Self {
        let mut t = TensorElement::zero(w.len());
        t.add_term(w.to_vec(), Q::one());
        t
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &[u16]) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        assert_eq!(w.len(), self.weight, "word length must equal weight");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &TensorElement) -> Result<TensorElement> {
        if self.weight != other.weight {
            return Err(Error::SizeMismatch(format!(
                "weights {} and {}",
                self.weight, other.weight
            )));
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorElement) -> Result<TensorElement> {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> TensorElement {
        let mut out = TensorElement::zero(self.weight);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    /// Concatenation product.
    pub fn tensor(&self, other: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero(self.weight + other.weight);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, x * y);
            }
        }
        out
    }

    /// Coordinates against `basis` (words of this weight, indexed).
    pub fn coordinates(&self, index: &BTreeMap<Word, usize>) -> Vec<(usize, Q)> {
        let mut v: Vec<(usize, Q)> = self
            .terms
            .iter()
            .map(|(w, c)| (index[w], c.clone()))
            .collect();
        v.sort_by_key(|e| e.0);
        v
    }

    pub fn format(&self, gens: &GradedGenerators) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(w, c)| format!("{}·{}", crate::rational::to_string(c), gens.format_word(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Sign with which the permutation `p` acts on the word `w`: the sign
/// character times the Koszul sign of the rearrangement.
fn action_sign(p: &SetMap, gens: &GradedGenerators, w: &[u16]) -> i64 {
    let degrees: Vec<i64> = w.iter().map(|&g| gens.degree(g as usize)).collect();
    p.sign().expect("permutation") * p.koszul_sign(&degrees)
}

/// The signed right action `t · g`.
pub fn right_action(g: &GroupRingElement, gens: &GradedGenerators, t: &TensorElement) -> Result<TensorElement> {
    if g.n() != t.weight() {
        return Err(Error::SizeMismatch(format!(
            "group ring of Σ_{} acting on weight {}",
            g.n(),
            t.weight()
        )));
    }
    let mut out = TensorElement::zero(t.weight());
    for (p, c) in g.terms() {
        for (w, a) in t.terms() {
            let pulled: Word = p.images0().iter().map(|&j| w[j]).collect();
            out.add_term(pulled, c * a * q(action_sign(p, gens, w)));
        }
    }
    Ok(out)
}

/// Matrix of `x ↦ x · g` on the full weight-`n` tensor space, in the word
/// order of [`GradedGenerators::words`].
pub fn action_matrix(g: &GroupRingElement, gens: &GradedGenerators) -> QMatrix {
    let n = g.n();
    let words = gens.words(n);
    let index: BTreeMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let cols = words
        .iter()
        .map(|w| {
            right_action(g, gens, &TensorElement::word(w))
                .expect("weights agree")
                .coordinates(&index)
        })
        .collect();
    QMatrix::from_columns(words.len(), cols)
}

/// Graded commutator `ab - (-1)^{|a||b|} ba`, extended bilinearly over
/// homogeneous terms.
pub fn bracket(gens: &GradedGenerators, a: &TensorElement, b: &TensorElement) -> TensorElement {
    let mut out = TensorElement::zero(a.weight() + b.weight());
    for (x, c) in a.terms() {
        for (y, d) in b.terms() {
            let s = (gens.word_degree(x) * gens.word_degree(y)).rem_euclid(2);
            let mut xy = x.clone();
            xy.extend_from_slice(y);
            let mut yx = y.clone();
            yx.extend_from_slice(x);
            out.add_term(xy, c * d);
            out.add_term(yx, c * d * q(if s == 0 { -1 } else { 1 }));
        }
    }
    out
}

/// Left-normed bracket `[[…[x_1, x_2], …], x_n]` of a word.
pub fn left_normed(gens: &GradedGenerators, w: &[u16]) -> TensorElement {
    let mut acc = TensorElement::word(&w[..1]);
    for &g in &w[1..] {
        acc = bracket(gens, &acc, &TensorElement::word(&[g]));
    }
    acc
}

/// Right-normed bracket `[x_1, [x_2, …[x_{n-1}, x_n]]]` of a word.
pub fn right_normed(gens: &GradedGenerators, w: &[u16]) -> TensorElement {
    let n = w.len();
    let mut acc = TensorElement::word(&w[n - 1..]);
    for &g in w[..n - 1].iter().rev() {
        acc = bracket(gens, &TensorElement::word(&[g]), &acc);
    }
    acc
}

fn require_odd(gens: &GradedGenerators, t: &TensorElement) -> Result<()> {
    for (w, _) in t.terms() {
        if let Some(&g) = w.iter().find(|&&g| gens.degree(g as usize) % 2 == 0) {
            return Err(Error::InvalidArgument(format!(
                "generator {} has even degree; the diagonal derivation needs odd generators",
                gens.name(g as usize)
            )));
        }
    }
    Ok(())
}

/// The derivation extending `v ↦ v ⊗ v`:
/// `v_{i1}…v_{in} ↦ Σ_k (-1)^{|v_{i1}…v_{i(k-1)}|} v_{i1}…v_{ik}v_{ik}…v_{in}`.
pub fn derivation_d(gens: &GradedGenerators, t: &TensorElement) -> Result<TensorElement> {
    require_odd(gens, t)?;
    let mut out = TensorElement::zero(t.weight() + 1);
    for (w, c) in t.terms() {
        let mut prefix = 0i64;
        for k in 0..w.len() {
            let mut v = w.clone();
            v.insert(k, w[k]);
            out.add_term(v, c * q(if prefix % 2 == 0 { 1 } else { -1 }));
            prefix += gens.degree(w[k] as usize);
        }
    }
    Ok(out)
}

/// The same derivation obtained by realizing the cobar differential `f_n`.
pub fn derivation_via_realize(gens: &GradedGenerators, t: &TensorElement) -> Result<TensorElement> {
    require_odd(gens, t)?;
    fincat::realize(&fincat::cobar_differential(t.weight())?, gens, t)
}

/// Whether `t` lies in `L_n`, the image of the `w_n` action (rank test).
pub fn in_lie(gens: &GradedGenerators, t: &TensorElement) -> Result<bool> {
    let n = t.weight();
    if n == 0 {
        return Ok(t.is_zero());
    }
    let w = action_matrix(&fincat::w_element(n)?, gens);
    let words = gens.words(n);
    let index: BTreeMap<Word, usize> = words.into_iter().enumerate().map(|(i, w)| (w, i)).collect();
    Ok(w.solve(&t.coordinates(&index)).is_some())
}

/// The degree derivation `D x = n x` on `L_n`; refuses inputs outside `L_n`.
pub fn degree_derivation_d(gens: &GradedGenerators, t: &TensorElement) -> Result<TensorElement> {
    if !in_lie(gens, t)? {
        return Err(Error::InvalidArgument(format!(
            "element of weight {} is not in the free Lie algebra",
            t.weight()
        )));
    }
    Ok(t.scale(&q(t.weight() as i64)))
}

/// Quillen's retraction `a_1…a_n ↦ (1/n)[a_1,[a_2,…[a_{n-1},a_n]]]`.
pub fn quillen_rho(gens: &GradedGenerators, t: &TensorElement) -> TensorElement {
    let n = t.weight();
    if n == 0 {
        return TensorElement::zero(0);
    }
    let mut out = TensorElement::zero(n);
    for (w, c) in t.terms() {
        out = out.add(&right_normed(gens, w).scale(c)).expect("same weight");
    }
    out.scale(&qfrac(1, n as i64))
}

/// Rank of the `w_n` action on weight-`n` tensors in `m` generators of the
/// given parity, computed as a matrix rank and as `trace / n`; the two must
/// agree.
pub fn lie_rank(n: usize, m: usize, odd: bool) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("lie_rank needs n ≥ 1".into()));
    }
    let gens = GradedGenerators::uniform(m, if odd { 1 } else { 2 });
    let w = action_matrix(&fincat::w_element(n)?, &gens);
    let rank = w.rank();
    let by_trace = w.trace() / q(n as i64);
    if by_trace != q(rank as i64) {
        return Err(Error::VerificationFailed(format!(
            "rank {rank} of w_{n} differs from trace/n = {}",
            crate::rational::to_string(&by_trace)
        )));
    }
    Ok(rank)
}

/// Witt's necklace formula `(1/n) Σ_{d|n} μ(d) m^{n/d}`.
pub fn witt_dimension(n: usize, m: usize) -> usize {
    fn mobius(mut d: usize) -> i64 {
        let mut r = 1;
        let mut p = 2;
        while p * p <= d {
            if d % p == 0 {
                d /= p;
                if d % p == 0 {
                    return 0;
                }
                r = -r;
            }
            p += 1;
        }
        if d > 1 {
            r = -r;
        }
        r
    }
    let s: i64 = (1..=n)
        .filter(|d| n % d == 0)
        .map(|d| mobius(d) * (m as i64).pow((n / d) as u32))
        .sum();
    (s / n as i64) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fincat::{bracket_element, w_element};

    #[test]
    fn w2_is_symmetric_on_odd_letters() {
        let g = GradedGenerators::uniform(2, 1);
        let t = right_action(&w_element(2).unwrap(), &g, &TensorElement::word(&[0, 1])).unwrap();
        let expect = TensorElement::word(&[0, 1]).add(&TensorElement::word(&[1, 0])).unwrap();
        assert_eq!(t, expect);
        let t1 = right_action(&w_element(1).unwrap(), &g, &TensorElement::word(&[1])).unwrap();
        assert_eq!(t1, TensorElement::word(&[1]));
    }

    #[test]
    fn w_acts_as_left_normed_bracket() {
        for deg in [1, 2] {
            let g = GradedGenerators::uniform(3, deg);
            for n in 1..=4 {
                let w = w_element(n).unwrap();
                for word in g.words(n) {
                    let lhs = right_action(&w, &g, &TensorElement::word(&word)).unwrap();
                    assert_eq!(lhs, left_normed(&g, &word), "n={n} deg={deg} {word:?}");
                }
            }
        }
    }

    #[test]
    fn derivation_examples() {
        let g = GradedGenerators::uniform(2, 1);
        let d = derivation_d(&g, &TensorElement::word(&[0, 1])).unwrap();
        let expect = TensorElement::word(&[0, 0, 1]).sub(&TensorElement::word(&[0, 1, 1])).unwrap();
        assert_eq!(d, expect);
        assert_eq!(derivation_d(&g, &TensorElement::word(&[0])).unwrap(), TensorElement::word(&[0, 0]));
        assert_eq!(derivation_via_realize(&g, &TensorElement::word(&[0, 1])).unwrap(), expect);
        let even = GradedGenerators::uniform(1, 2);
        assert!(derivation_d(&even, &TensorElement::word(&[0])).is_err());
    }

    #[test]
    fn bracket_element_is_graded_commutator() {
        for deg in [1, 2] {
            let g = GradedGenerators::uniform(2, deg);
            let b = bracket_element(1, 1).unwrap();
            let lhs = right_action(&b, &g, &TensorElement::word(&[0, 1])).unwrap();
            assert_eq!(lhs, bracket(&g, &TensorElement::word(&[0]), &TensorElement::word(&[1])));
        }
    }

    #[test]
    fn small_lie_ranks() {
        assert_eq!(lie_rank(2, 2, true).unwrap(), 3);
        assert_eq!(lie_rank(2, 1, false).unwrap(), 0);
        assert_eq!(lie_rank(1, 4, true).unwrap(), 4);
        assert_eq!(witt_dimension(4, 2), 3);
        assert_eq!(witt_dimension(6, 2), 9);
    }

    #[test]
    fn degree_derivation_refuses_non_lie() {
        let g = GradedGenerators::uniform(2, 2);
        assert!(degree_derivation_d(&g, &TensorElement::word(&[0, 1])).is_err());
        let l = left_normed(&g, &[0, 1]);
        assert_eq!(degree_derivation_d(&g, &l).unwrap(), l.scale(&q(2)));
    }
}
