//! Bar construction on a finite-dimensional augmented commutative d.g.
//! algebra, its shuffle product and the Lie coalgebra of indecomposables.
//!
//! Algebras are cohomologically graded with `A^0 = Q·1`; only the
//! augmentation ideal `IA` is stored. A bar word `[a_1|…|a_s]` has weight
//! `s`, internal degree `t = Σ|a_i|` and total degree `t − s`, which lines
//! up with the total degree of the cobar side.
//!
//! The indecomposables `QBar = J/J²` (`J` the words of positive weight,
//! `J²` the span of shuffles) are computed twice: as the cokernel of the
//! shuffle product, and as the image of the projector `w_n` acting on
//! `IA^{⊗n}` through the functor that permutes tensor factors with Koszul
//! signs and multiplies factors sent to the same point.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fincat::{self, SetMap};
use crate::homalg::linalg::{normalize_q, QMatrix, Reducer, SparseQ};
use crate::rational::{self, neg_one_pow, Q};

/// A finite-dimensional connected commutative d.g. algebra, given by a
/// basis of its augmentation ideal.
#[derive(Clone, Debug, PartialEq)]
pub struct CDGAlgebra {
    name: String,
    names: Vec<String>,
    degrees: Vec<usize>,
    mult: BTreeMap<(usize, usize), SparseQ>,
    diff: Vec<SparseQ>,
}

#[derive(Deserialize)]
struct JsonGenerator {
    name: String,
    degree: usize,
}

#[derive(Deserialize)]
struct JsonRelation {
    left: String,
    right: String,
    result: BTreeMap<String, String>,
}

#[derive(Deserialize)]
struct JsonAlgebra {
    #[serde(default)]
    name: Option<String>,
    generators: Vec<JsonGenerator>,
    #[serde(default)]
    relations: Vec<JsonRelation>,
    #[serde(default)]
    differential: BTreeMap<String, BTreeMap<String, String>>,
}

fn invalid(law: &str, detail: String) -> Error {
    Error::InvalidInput(format!("{law} violated: {detail}"))
}

impl CDGAlgebra {
    /// `products` lists nonzero products `(i, j, x_i x_j)` of basis elements
    /// of `IA`; a product given in one order only is completed by graded
    /// commutativity. `differential` lists nonzero `d x_i`.
    pub fn new(
        name: impl Into<String>,
        generators: Vec<(String, usize)>,
        products: Vec<(usize, usize, SparseQ)>,
        differential: Vec<(usize, SparseQ)>,
    ) -> Result<Self> {
        let n = generators.len();
        let (names, degrees): (Vec<String>, Vec<usize>) = generators.into_iter().unzip();
        for (i, name) in names.iter().enumerate() {
            if degrees[i] == 0 {
                return Err(invalid(
                    "augmentation",
                    format!("{name} has degree 0; the algebra must be connected"),
                ));
            }
            if names[..i].contains(name) {
                return Err(Error::InvalidInput(format!("duplicate generator {name}")));
            }
        }
        let check_index = |v: &SparseQ| -> Result<()> {
            if v.iter().any(|(k, _)| *k >= n) {
                return Err(Error::InvalidInput("basis index out of range".into()));
            }
            Ok(())
        };
        let mut mult: BTreeMap<(usize, usize), SparseQ> = BTreeMap::new();
        for (i, j, v) in products {
            check_index(&v)?;
            let v = normalize_q(v);
            if v.is_empty() {
                continue;
            }
            if let Some(old) = mult.get(&(i, j)) {
                if *old != v {
                    return Err(Error::InvalidInput(format!(
                        "product {}·{} given twice with different values",
                        names[i], names[j]
                    )));
                }
            }
            mult.insert((i, j), v);
        }
        // complete by graded commutativity and check it where both orders are given
        let keys: Vec<(usize, usize)> = mult.keys().copied().collect();
        for (i, j) in keys {
            let sign = rational::q(neg_one_pow((degrees[i] * degrees[j]) as i64));
            let swapped: SparseQ = mult[&(i, j)].iter().map(|(k, c)| (*k, c * &sign)).collect();
            match mult.get(&(j, i)) {
                Some(v) if *v != swapped => {
                    return Err(invalid(
                        "graded commutativity",
                        format!("{}·{} ≠ (−1)^{{|a||b|}} {}·{}", names[i], names[j], names[j], names[i]),
                    ))
                }
                Some(_) => {}
                None => {
                    mult.insert((j, i), swapped);
                }
            }
        }
        let mut diff = vec![Vec::new(); n];
        for (i, v) in differential {
            check_index(&v)?;
            if i >= n {
                return Err(Error::InvalidInput("differential source out of range".into()));
            }
            diff[i] = normalize_q(v);
        }
        let a = CDGAlgebra {
            name: name.into(),
            names,
            degrees,
            mult,
            diff,
        };
        a.validate()?;
        Ok(a)
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        for ((i, j), v) in &self.mult {
            for (k, _) in v {
                if self.degrees[*k] != self.degrees[*i] + self.degrees[*j] {
                    return Err(invalid(
                        "degree additivity",
                        format!("{}·{} has a term {} of the wrong degree", self.names[*i], self.names[*j], self.names[*k]),
                    ));
                }
            }
        }
        for i in 0..n {
            for (k, _) in &self.diff[i] {
                if self.degrees[*k] != self.degrees[i] + 1 {
                    return Err(invalid(
                        "differential degree",
                        format!("d {} has a term {} not of degree {}", self.names[i], self.names[*k], self.degrees[i] + 1),
                    ));
                }
            }
            if !self.d_vec(&self.diff[i]).is_empty() {
                return Err(invalid("d² = 0", format!("d d {} ≠ 0", self.names[i])));
            }
        }
        let e = |i: usize| vec![(i, Q::one())];
        for i in 0..n {
            for j in 0..n {
                let xy = self.mul_vec(&e(i), &e(j));
                for k in 0..n {
                    let left = self.mul_vec(&xy, &e(k));
                    let right = self.mul_vec(&e(i), &self.mul_vec(&e(j), &e(k)));
                    if left != right {
                        return Err(invalid(
                            "associativity",
                            format!("({}·{})·{} ≠ {}·({}·{})", self.names[i], self.names[j], self.names[k], self.names[i], self.names[j], self.names[k]),
                        ));
                    }
                }
                // d(xy) = dx·y + (−1)^{|x|} x·dy
                let lhs = self.d_vec(&xy);
                let sign = rational::q(neg_one_pow(self.degrees[i] as i64));
                let mut rhs = self.mul_vec(&self.diff[i], &e(j));
                rhs.extend(self.mul_vec(&e(i), &self.diff[j]).into_iter().map(|(k, c)| (k, c * &sign)));
                if lhs != normalize_q(rhs) {
                    return Err(invalid(
                        "Leibniz rule",
                        format!("d({}·{}) ≠ d{}·{} ± {}·d{}", self.names[i], self.names[j], self.names[i], self.names[j], self.names[i], self.names[j]),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Parses `{"generators":[{"name","degree"}], "relations":[{"left",
    /// "right","result":{name: "p/q"}}], "differential":{src:{tgt:"p/q"}}}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let j: JsonAlgebra =
            serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("algebra JSON: {e}")))?;
        let index: HashMap<&str, usize> = j.generators.iter().enumerate().map(|(i, g)| (g.name.as_str(), i)).collect();
        let look = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("unknown generator {s}")))
        };
        let coeffs = |m: &BTreeMap<String, String>| -> Result<SparseQ> {
            m.iter()
                .map(|(k, v)| {
                    let c = rational::parse(v).ok_or_else(|| Error::InvalidInput(format!("bad coefficient {v}")))?;
                    Ok((look(k)?, c))
                })
                .collect()
        };
        let products = j
            .relations
            .iter()
            .map(|r| Ok((look(&r.left)?, look(&r.right)?, coeffs(&r.result)?)))
            .collect::<Result<Vec<_>>>()?;
        let differential = j
            .differential
            .iter()
            .map(|(k, m)| Ok((look(k)?, coeffs(m)?)))
            .collect::<Result<Vec<_>>>()?;
        CDGAlgebra::new(
            j.name.unwrap_or_else(|| "A".into()),
            j.generators.into_iter().map(|g| (g.name, g.degree)).collect(),
            products,
            differential,
        )
    }

    pub fn to_json(&self) -> String {
        let coeffs = |v: &SparseQ| -> serde_json::Map<String, serde_json::Value> {
            v.iter()
                .map(|(k, c)| (self.names[*k].clone(), rational::to_string(c).into()))
                .collect()
        };
        let relations: Vec<serde_json::Value> = self
            .mult
            .iter()
            .filter(|((i, j), _)| i <= j)
            .map(|((i, j), v)| {
                serde_json::json!({ "left": self.names[*i], "right": self.names[*j], "result": coeffs(v) })
            })
            .collect();
        let differential: serde_json::Map<String, serde_json::Value> = self
            .diff
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_empty())
            .map(|(i, v)| (self.names[i].clone(), coeffs(v).into()))
            .collect();
        let generators: Vec<serde_json::Value> = self
            .names
            .iter()
            .zip(&self.degrees)
            .map(|(n, d)| serde_json::json!({ "name": n, "degree": d }))
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "name": self.name,
            "generators": generators,
            "relations": relations,
            "differential": differential,
        }))
        .expect("serializable")
    }

    /// The ground field.
    pub fn trivial() -> Self {
        CDGAlgebra::new("trivial", vec![], vec![], vec![]).expect("valid")
    }

    /// `H^*(S^k) = Q[x]/x²`, `|x| = k`.
    pub fn sphere(k: usize) -> Result<Self> {
        CDGAlgebra::new(format!("H(S{k})"), vec![("x".into(), k)], vec![], vec![])
    }

    /// Cohomology of a wedge: the product algebra, mixed products zero.
    pub fn wedge(a: &CDGAlgebra, b: &CDGAlgebra) -> Result<Self> {
        let off = a.dim();
        let mut gens: Vec<(String, usize)> = Vec::new();
        for (n, d) in a.names.iter().zip(&a.degrees) {
            gens.push((format!("{n}1"), *d));
        }
        for (n, d) in b.names.iter().zip(&b.degrees) {
            gens.push((format!("{n}2"), *d));
        }
        let shift = |v: &SparseQ| -> SparseQ { v.iter().map(|(k, c)| (k + off, c.clone())).collect() };
        let mut products: Vec<(usize, usize, SparseQ)> =
            a.mult.iter().map(|((i, j), v)| (*i, *j, v.clone())).collect();
        products.extend(b.mult.iter().map(|((i, j), v)| (i + off, j + off, shift(v))));
        let mut differential: Vec<(usize, SparseQ)> = a.diff.iter().cloned().enumerate().collect();
        differential.extend(b.diff.iter().enumerate().map(|(i, v)| (i + off, shift(v))));
        let name = format!("{}v{}", a.name.trim_end_matches(')'), b.name.trim_start_matches("H("));
        CDGAlgebra::new(name, gens, products, differential)
    }

    /// `H^*(S^k × S^l)`: classes `x`, `y` and `z = x·y`.
    pub fn sphere_product(k: usize, l: usize) -> Result<Self> {
        let sign = neg_one_pow((k * l) as i64);
        CDGAlgebra::new(
            format!("H(S{k}xS{l})"),
            vec![("x".into(), k), ("y".into(), l), ("z".into(), k + l)],
            vec![(0, 1, vec![(2, Q::one())]), (1, 0, vec![(2, rational::q(sign))])],
            vec![],
        )
    }

    /// Adds an acyclic pair `u`, `v = du` in degrees `k`, `k+1` with all
    /// products involving them zero. The inclusion of `self` is a
    /// quasi-isomorphism of algebras.
    pub fn acyclic_extension(&self, k: usize) -> Result<Self> {
        let mut gens: Vec<(String, usize)> = self.names.iter().cloned().zip(self.degrees.iter().copied()).collect();
        let u = gens.len();
        gens.push(("u".into(), k));
        gens.push(("du".into(), k + 1));
        let products = self.mult.iter().map(|((i, j), v)| (*i, *j, v.clone())).collect();
        let mut differential: Vec<(usize, SparseQ)> = self.diff.iter().cloned().enumerate().collect();
        differential.push((u, vec![(u + 1, Q::one())]));
        CDGAlgebra::new(format!("{}+acyclic", self.name), gens, products, differential)
    }

    /// Built-in algebras: `trivial`, `H(Sk)`, `H(SkvSl)`, `H(SkxSl)`.
    pub fn builtin(name: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown built-in algebra {name}"));
        if name == "trivial" {
            return Ok(Self::trivial());
        }
        let inner = name
            .strip_prefix("H(")
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(bad)?;
        let sphere_dim = |s: &str| -> Result<usize> {
            s.strip_prefix('S').and_then(|d| d.parse().ok()).ok_or_else(bad)
        };
        if let Some((a, b)) = inner.split_once('v') {
            return Self::wedge(&Self::sphere(sphere_dim(a)?)?, &Self::sphere(sphere_dim(b)?)?);
        }
        if let Some((a, b)) = inner.split_once('x') {
            return Self::sphere_product(sphere_dim(a)?, sphere_dim(b)?);
        }
        Self::sphere(sphere_dim(inner)?)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn generator_name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn top_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    pub fn product(&self, i: usize, j: usize) -> &[(usize, Q)] {
        self.mult.get(&(i, j)).map_or(&[], |v| v.as_slice())
    }

    pub fn differential(&self, i: usize) -> &[(usize, Q)] {
        &self.diff[i]
    }

    pub fn mul_vec(&self, x: &[(usize, Q)], y: &[(usize, Q)]) -> SparseQ {
        let mut out = Vec::new();
        for (i, a) in x {
            for (j, b) in y {
                let ab = a * b;
                out.extend(self.product(*i, *j).iter().map(|(k, c)| (*k, c * &ab)));
            }
        }
        normalize_q(out)
    }

    pub fn d_vec(&self, x: &[(usize, Q)]) -> SparseQ {
        let mut out = Vec::new();
        for (i, a) in x {
            out.extend(self.diff[*i].iter().map(|(k, c)| (*k, c * a)));
        }
        normalize_q(out)
    }
}

/// A bar word: indices into the basis of `IA`.
pub type Word = Vec<usize>;

/// A linear combination of words.
pub type Chain = BTreeMap<Word, Q>;

fn add_to(c: &mut Chain, w: Word, x: Q) {
    if x.is_zero() {
        return;
    }
    let e = c.entry(w).or_insert_with(Q::zero);
    *e += x;
    if e.is_zero() {
        let key: Vec<usize> = c.iter().find(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).expect("just zeroed");
        c.remove(&key);
    }
}

/// The bar construction truncated to weights `1..=N`.
#[derive(Clone, Debug)]
pub struct BarComplex<'a> {
    a: &'a CDGAlgebra,
    n_max: usize,
}

impl<'a> BarComplex<'a> {
    /// Builds the truncated bar complex and checks, on every basis word,
    /// `d_B² = 0` and that the classical external differential agrees with
    /// the one obtained functorially from `f_n`.
    pub fn new(a: &'a CDGAlgebra, n_max: usize) -> Result<Self> {
        let b = BarComplex { a, n_max };
        for s in 1..=n_max {
            for w in b.words_of_weight(s) {
                let dd = b.apply(&b.apply(&single(&w), |x| b.d_bar(x)), |x| b.d_bar(x));
                if !dd.is_empty() {
                    return Err(Error::VerificationFailed(format!("d_B² ≠ 0 on {}", b.format(&w))));
                }
                if s >= 2 && b.d_external(&w) != b.d_external_functorial(&w)? {
                    return Err(Error::VerificationFailed(format!(
                        "classical and functorial external differentials differ on {}",
                        b.format(&w)
                    )));
                }
            }
        }
        b.check_shuffle_chain_map()?;
        Ok(b)
    }

    /// `d_B sh(u, v) = sh(d_B u, v) + (−1)^{|u|} sh(u, d_B v)` on all pairs of
    /// basis words of total weight at most `N`.
    fn check_shuffle_chain_map(&self) -> Result<()> {
        for s in 1..self.n_max {
            for r in 1..=self.n_max - s {
                for u in self.words_of_weight(s) {
                    for v in self.words_of_weight(r) {
                        let lhs = self.apply(&self.shuffle(&u, &v), |w| self.d_bar(w));
                        let sign = rational::q(neg_one_pow(self.total_degree(&u)));
                        let mut rhs = Chain::new();
                        for (du, c) in self.d_bar(&u) {
                            for (w, x) in self.shuffle(&du, &v) {
                                add_to(&mut rhs, w, &c * x);
                            }
                        }
                        for (dv, c) in self.d_bar(&v) {
                            for (w, x) in self.shuffle(&u, &dv) {
                                add_to(&mut rhs, w, &c * x * &sign);
                            }
                        }
                        if lhs != rhs {
                            return Err(Error::VerificationFailed(format!(
                                "shuffle product is not a chain map on {} ⊗ {}",
                                self.format(&u),
                                self.format(&v)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Dimensions of the bar complex by `(weight, internal degree)`, the
    /// unit `[]` included in `(0, 0)`.
    pub fn bidegree_dims(&self) -> BTreeMap<(usize, usize), usize> {
        let mut out = BTreeMap::from([((0, 0), 1)]);
        for s in 1..=self.n_max {
            for w in self.words_of_weight(s) {
                *out.entry((s, self.internal_degree(&w))).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn algebra(&self) -> &CDGAlgebra {
        self.a
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn format(&self, w: &[usize]) -> String {
        let parts: Vec<&str> = w.iter().map(|&i| self.a.generator_name(i)).collect();
        format!("[{}]", parts.join("|"))
    }

    pub fn internal_degree(&self, w: &[usize]) -> usize {
        w.iter().map(|&i| self.a.degree(i)).sum()
    }

    /// `t − s`, also the Koszul degree of the word.
    pub fn total_degree(&self, w: &[usize]) -> i64 {
        self.internal_degree(w) as i64 - w.len() as i64
    }

    fn shifted(&self, i: usize) -> i64 {
        self.a.degree(i) as i64 - 1
    }

    /// All words of weight `s`, lexicographic.
    pub fn words_of_weight(&self, s: usize) -> Vec<Word> {
        let mut out: Vec<Word> = vec![Vec::new()];
        for _ in 0..s {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..self.a.dim()).map(move |i| {
                        let mut v = w.clone();
                        v.push(i);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// Words of weight `s` and internal degree `t`.
    pub fn words(&self, s: usize, t: usize) -> Vec<Word> {
        self.words_of_weight(s)
            .into_iter()
            .filter(|w| self.internal_degree(w) == t)
            .collect()
    }

    /// Words of weights `1..=N` in total degree `k`, by weight then
    /// lexicographically.
    pub fn total_basis(&self, k: i64) -> Vec<Word> {
        (1..=self.n_max)
            .flat_map(|s| self.words_of_weight(s))
            .filter(|w| self.total_degree(w) == k)
            .collect()
    }

    /// Range of total degrees with nonzero words.
    pub fn total_range(&self) -> (i64, i64) {
        if self.a.dim() == 0 {
            return (0, -1);
        }
        let lo = self.a.degrees.iter().map(|&d| d as i64 - 1).min().expect("nonempty");
        let hi = (self.a.top_degree() as i64 - 1) * self.n_max as i64;
        (lo.min(0), hi.max(lo))
    }

    pub fn apply(&self, c: &Chain, f: impl Fn(&Word) -> Chain) -> Chain {
        let mut out = Chain::new();
        for (w, x) in c {
            for (v, y) in f(w) {
                add_to(&mut out, v, x * &y);
            }
        }
        out
    }

    /// `d_I[a_1|…|a_s] = −Σ (−1)^{ε_i} [a_1|…|d a_i|…|a_s]` with
    /// `ε_i = Σ_{j<i} (|a_j| − 1)`.
    pub fn d_internal(&self, w: &Word) -> Chain {
        let mut out = Chain::new();
        let mut eps = 0;
        for (i, &a) in w.iter().enumerate() {
            for (b, c) in self.a.differential(a) {
                let mut v = w.clone();
                v[i] = *b;
                add_to(&mut out, v, c * rational::q(-neg_one_pow(eps)));
            }
            eps += self.shifted(a);
        }
        out
    }

    /// `d_E[a_1|…|a_s] = Σ_i (−1)^{ε_{i+1}} [a_1|…|a_i a_{i+1}|…|a_s]`.
    pub fn d_external(&self, w: &Word) -> Chain {
        let mut out = Chain::new();
        let mut eps = 0;
        for i in 0..w.len().saturating_sub(1) {
            eps += self.shifted(w[i]);
            for (b, c) in self.a.product(w[i], w[i + 1]) {
                let mut v = w[..i].to_vec();
                v.push(*b);
                v.extend_from_slice(&w[i + 2..]);
                add_to(&mut out, v, c * rational::q(neg_one_pow(eps)));
            }
        }
        out
    }

    pub fn d_bar(&self, w: &Word) -> Chain {
        let mut out = self.d_internal(w);
        for (v, c) in self.d_external(w) {
            add_to(&mut out, v, c);
        }
        out
    }

    /// Sign of `s a_1 ⊗ … ⊗ s a_m = ± s^m (a_1 ⊗ … ⊗ a_m)`.
    fn suspension_sign(&self, w: &[usize]) -> i64 {
        let m = w.len();
        neg_one_pow(w.iter().enumerate().map(|(i, &a)| ((m - 1 - i) * self.a.degree(a)) as i64).sum())
    }

    /// The tensor functor on a morphism `f: [m] → [n]` of `D`: factor `j`
    /// of the output is the ordered product of the inputs sent to `j`, with
    /// the Koszul sign of the regrouping.
    pub fn tensor_functor(&self, f: &SetMap, w: &[usize]) -> Chain {
        let order: Vec<usize> = {
            let mut idx: Vec<usize> = (0..w.len()).collect();
            idx.sort_by_key(|&k| f.apply(k));
            idx
        };
        // Koszul sign of moving w[order[0]], w[order[1]], … into place
        let mut sign = 1;
        for x in 0..order.len() {
            for y in x + 1..order.len() {
                if order[x] > order[y] && self.a.degree(w[order[x]]) * self.a.degree(w[order[y]]) % 2 == 1 {
                    sign = -sign;
                }
            }
        }
        let mut partial: Vec<(Word, Q)> = vec![(Vec::new(), rational::q(sign))];
        let mut k = 0;
        for j in 0..f.codomain() {
            let group: Vec<usize> = order[k..].iter().take_while(|&&x| f.apply(x) == j).copied().collect();
            if group.is_empty() {
                return Chain::new();
            }
            k += group.len();
            // product of the group, as a combination of basis elements
            let mut prod: SparseQ = vec![(w[group[0]], Q::one())];
            for &g in &group[1..] {
                prod = self.a.mul_vec(&prod, &[(w[g], Q::one())]);
            }
            let mut next = Vec::new();
            for (v, c) in &partial {
                for (b, x) in &prod {
                    let mut v2 = v.clone();
                    v2.push(*b);
                    next.push((v2, c * x));
                }
            }
            partial = next;
        }
        let mut out = Chain::new();
        for (v, c) in partial {
            add_to(&mut out, v, c);
        }
        out
    }

    /// `−σ⁻¹ F(f_{s−1}) σ`, with `σ` the suspension sign: the external
    /// differential read off from the functor applied to `f_n`.
    pub fn d_external_functorial(&self, w: &Word) -> Result<Chain> {
        let f = fincat::cobar_differential(w.len() - 1)?;
        let mut out = Chain::new();
        let s_in = self.suspension_sign(w);
        for (m, c) in f.terms() {
            for (v, x) in self.tensor_functor(m, w) {
                let sign = -s_in * self.suspension_sign(&v);
                add_to(&mut out, v, c * x * rational::q(sign));
            }
        }
        Ok(out)
    }

    /// Shuffle product with the Koszul sign of the interleaving, in
    /// shifted degrees.
    pub fn shuffle(&self, u: &[usize], v: &[usize]) -> Chain {
        let mut out = Chain::new();
        for (tx, ty, _) in crate::simplicial::shuffle_paths(u.len(), v.len()) {
            // tx, ty are lattice paths; step k takes from u when tx increases
            let mut word = Vec::with_capacity(u.len() + v.len());
            let mut sign = 1i64;
            let mut passed_v = 0i64;
            for k in 1..tx.len() {
                if tx[k] > tx[k - 1] {
                    let a = u[tx[k] as usize - 1];
                    word.push(a);
                    if self.shifted(a) % 2 != 0 && passed_v % 2 != 0 {
                        sign = -sign;
                    }
                } else {
                    let b = v[ty[k] as usize - 1];
                    word.push(b);
                    passed_v += self.shifted(b);
                }
            }
            add_to(&mut out, word, rational::q(sign));
        }
        out
    }

    /// Reduced deconcatenation: `Σ_{0<i<s} [a_1|…|a_i] ⊗ [a_{i+1}|…|a_s]`.
    pub fn deconcatenate(&self, w: &[usize]) -> Vec<(Word, Word)> {
        (1..w.len()).map(|i| (w[..i].to_vec(), w[i..].to_vec())).collect()
    }
}

fn single(w: &Word) -> Chain {
    Chain::from([(w.clone(), Q::one())])
}

/// Entries of an element of `⊕ QBar_{k_1} ⊗ QBar_{k_2}`, by `(k_1, k_2)`.
type TensorBlocks = BTreeMap<(i64, i64), BTreeMap<(usize, usize), Q>>;

/// Per-degree linear-algebra data of `QBar` in total degree `k`.
#[derive(Clone, Debug)]
struct Degree {
    basis: Vec<Word>,
    index: HashMap<Word, usize>,
    /// Independent spanning set of the shuffles `J²`.
    shuffles: QMatrix,
    /// Unit vectors completing `shuffles` to a basis of `J_k`.
    complement: Vec<usize>,
    /// `[shuffles | complement]`, for quotient coordinates.
    frame: QMatrix,
}

/// Certified dimensions of one weight/internal-degree piece of `QBar`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectorCheck {
    pub weight: usize,
    pub internal: usize,
    pub dim_tensor: usize,
    pub rank_shuffles: usize,
    pub rank_projector: usize,
    /// `w_n` kills every shuffle and `rank w_n = dim − rank shuffles`.
    pub agrees: bool,
}

/// The complex of indecomposables `QBar^{≤N}` with its cohomology.
#[derive(Clone, Debug)]
pub struct QBar<'a> {
    bar: BarComplex<'a>,
    degrees: BTreeMap<i64, Degree>,
    pub projector_checks: Vec<ProjectorCheck>,
}

/// Cohomology of `QBar` in one degree with a projection onto it.
#[derive(Clone, Debug)]
pub struct QBarCohomology {
    pub k: i64,
    pub rank: usize,
    /// Representatives in quotient coordinates.
    pub representatives: Vec<SparseQ>,
    frame: QMatrix,
    boundary_rank: usize,
}

impl QBarCohomology {
    /// Class of a cocycle given in quotient coordinates.
    fn project(&self, v: &[(usize, Q)]) -> Result<Vec<Q>> {
        let sol = self
            .frame
            .solve(v)
            .ok_or_else(|| Error::VerificationFailed("quotient frame is not a basis".into()))?;
        let mut out = vec![Q::zero(); self.rank];
        for (j, c) in sol {
            if j >= self.boundary_rank && j < self.boundary_rank + self.rank {
                out[j - self.boundary_rank] = c;
            }
        }
        Ok(out)
    }
}

impl<'a> QBar<'a> {
    /// Builds `QBar^{≤N}` and certifies, for every weight `n` and internal
    /// degree, that the shuffle cokernel and the image of `w_n` agree.
    pub fn new(a: &'a CDGAlgebra, n_max: usize) -> Result<Self> {
        let bar = BarComplex::new(a, n_max)?;
        let (lo, hi) = bar.total_range();
        let mut degrees = BTreeMap::new();
        for k in lo..=hi + 1 {
            degrees.insert(k, Self::degree_data(&bar, k));
        }
        let mut q = QBar {
            bar,
            degrees,
            projector_checks: Vec::new(),
        };
        q.projector_checks = q.check_projectors()?;
        if let Some(bad) = q.projector_checks.iter().find(|c| !c.agrees) {
            return Err(Error::VerificationFailed(format!(
                "shuffle cokernel and w_n image differ in weight {}, internal degree {}",
                bad.weight, bad.internal
            )));
        }
        Ok(q)
    }

    fn shuffle_span(bar: &BarComplex, words: &[Word], index: &HashMap<Word, usize>, k: Option<i64>) -> QMatrix {
        let n_max = bar.n_max();
        let mut cols = Vec::new();
        let weights: Vec<usize> = words.iter().map(|w| w.len()).collect();
        let (min_w, max_w) = (
            weights.iter().copied().min().unwrap_or(0),
            weights.iter().copied().max().unwrap_or(0),
        );
        let internal: Vec<usize> = words.iter().map(|w| bar.internal_degree(w)).collect();
        for s in 1..n_max {
            for r in 1..=n_max - s {
                if s + r < min_w || s + r > max_w {
                    continue;
                }
                for u in bar.words_of_weight(s) {
                    for v in bar.words_of_weight(r) {
                        let total = bar.total_degree(&u) + bar.total_degree(&v);
                        if let Some(k) = k {
                            if total != k {
                                continue;
                            }
                        }
                        let t = bar.internal_degree(&u) + bar.internal_degree(&v);
                        if !internal.contains(&t) {
                            continue;
                        }
                        if u > v {
                            continue;
                        }
                        let col: SparseQ = bar
                            .shuffle(&u, &v)
                            .into_iter()
                            .filter_map(|(w, c)| index.get(&w).map(|&i| (i, c)))
                            .collect();
                        cols.push(normalize_q(col));
                    }
                }
            }
        }
        let m = QMatrix::from_columns(words.len(), cols);
        m.select_columns(&m.independent_columns())
    }

    fn degree_data(bar: &BarComplex, k: i64) -> Degree {
        let basis = bar.total_basis(k);
        let index: HashMap<Word, usize> = basis.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let shuffles = Self::shuffle_span(bar, &basis, &index, Some(k));
        let mut r = Reducer::new();
        for c in shuffles.columns() {
            r.insert(c);
        }
        let complement: Vec<usize> = (0..basis.len())
            .filter(|&i| r.insert(&[(i, Q::one())]).is_some())
            .collect();
        let mut cols: Vec<SparseQ> = shuffles.columns().to_vec();
        cols.extend(complement.iter().map(|&i| vec![(i, Q::one())]));
        let frame = QMatrix::from_columns(basis.len(), cols);
        Degree {
            basis,
            index,
            shuffles,
            complement,
            frame,
        }
    }

    fn check_projectors(&self) -> Result<Vec<ProjectorCheck>> {
        let bar = &self.bar;
        let mut out = Vec::new();
        for n in 1..=bar.n_max() {
            let w = fincat::w_element(n)?;
            let all = bar.words_of_weight(n);
            let mut ts: Vec<usize> = all.iter().map(|v| bar.internal_degree(v)).collect();
            ts.sort_unstable();
            ts.dedup();
            for t in ts {
                let words = bar.words(n, t);
                let index: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
                let shuffles = Self::shuffle_span(bar, &words, &index, None);
                // w_n through the tensor functor, conjugated into bar words
                let cols: Vec<SparseQ> = words
                    .iter()
                    .map(|v| {
                        let s_in = bar.suspension_sign(v);
                        let mut col = Vec::new();
                        for (p, c) in w.terms() {
                            for (u, x) in bar.tensor_functor(p, v) {
                                let sign = s_in * bar.suspension_sign(&u);
                                col.push((index[&u], c * x * rational::q(sign)));
                            }
                        }
                        normalize_q(col)
                    })
                    .collect();
                let proj = QMatrix::from_columns(words.len(), cols);
                let kills = proj.mul(&shuffles)?.is_zero();
                let rank_projector = proj.rank();
                let rank_shuffles = shuffles.cols();
                out.push(ProjectorCheck {
                    weight: n,
                    internal: t,
                    dim_tensor: words.len(),
                    rank_shuffles,
                    rank_projector,
                    agrees: kills && rank_projector + rank_shuffles == words.len(),
                });
            }
        }
        Ok(out)
    }

    pub fn bar(&self) -> &BarComplex<'a> {
        &self.bar
    }

    /// `dim QBar` in total degree `k`.
    pub fn dim(&self, k: i64) -> usize {
        self.degrees.get(&k).map_or(0, |d| d.complement.len())
    }

    /// Coordinates in `J_k/J²_k` of a chain of `J_k`.
    fn quotient_coords(&self, k: i64, c: &Chain) -> Result<SparseQ> {
        let Some(d) = self.degrees.get(&k) else {
            return Ok(Vec::new());
        };
        let v: SparseQ = normalize_q(
            c.iter()
                .map(|(w, x)| (d.index[w], x.clone()))
                .collect(),
        );
        let sol = d
            .frame
            .solve(&v)
            .ok_or_else(|| Error::VerificationFailed("quotient frame is not a basis".into()))?;
        let s = d.shuffles.cols();
        Ok(sol.into_iter().filter(|(j, _)| *j >= s).map(|(j, c)| (j - s, c)).collect())
    }

    fn lift(&self, k: i64, v: &[(usize, Q)]) -> Chain {
        let d = &self.degrees[&k];
        let mut out = Chain::new();
        for (j, c) in v {
            add_to(&mut out, d.basis[d.complement[*j]].clone(), c.clone());
        }
        out
    }

    /// Induced differential `QBar_k → QBar_{k+1}`.
    pub fn differential(&self, k: i64) -> Result<QMatrix> {
        let cols = (0..self.dim(k))
            .map(|j| {
                let c = self.lift(k, &[(j, Q::one())]);
                let dc = self.bar.apply(&c, |w| self.bar.d_bar(w));
                self.quotient_coords(k + 1, &dc)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(QMatrix::from_columns(self.dim(k + 1), cols))
    }

    pub fn cohomology_rank(&self, k: i64) -> Result<usize> {
        Ok(self.dim(k) - self.differential(k)?.rank() - self.differential(k - 1)?.rank())
    }

    /// Cohomology ranks for `k ∈ lo..=hi`.
    pub fn cohomology_ranks(&self, lo: i64, hi: i64) -> Result<BTreeMap<i64, usize>> {
        (lo..=hi).map(|k| Ok((k, self.cohomology_rank(k)?))).collect()
    }

    pub fn cohomology(&self, k: i64) -> Result<QBarCohomology> {
        let dk = self.differential(k)?;
        let prev = self.differential(k - 1)?;
        let mut r = Reducer::new();
        let mut frame_cols = Vec::new();
        for c in prev.columns() {
            if r.insert(c).is_some() {
                frame_cols.push(c.clone());
            }
        }
        let boundary_rank = frame_cols.len();
        let mut representatives = Vec::new();
        for z in dk.kernel() {
            if r.insert(&z).is_some() {
                frame_cols.push(z.clone());
                representatives.push(z);
            }
        }
        for i in 0..self.dim(k) {
            let e = vec![(i, Q::one())];
            if r.insert(&e).is_some() {
                frame_cols.push(e);
            }
        }
        Ok(QBarCohomology {
            k,
            rank: representatives.len(),
            representatives,
            frame: QMatrix::from_columns(self.dim(k), frame_cols),
            boundary_rank,
        })
    }

    /// `δ = (1 − τ) Δ̄` on a chain of `J`, as `(k_1, left, k_2, right, c)`
    /// terms with `τ(u ⊗ v) = (−1)^{k_u k_v} v ⊗ u`.
    fn cobracket_chain(&self, c: &Chain) -> Vec<(i64, Word, i64, Word, Q)> {
        let mut out = Vec::new();
        for (w, x) in c {
            for (u, v) in self.bar.deconcatenate(w) {
                let (ku, kv) = (self.bar.total_degree(&u), self.bar.total_degree(&v));
                out.push((ku, u.clone(), kv, v.clone(), x.clone()));
                out.push((kv, v, ku, u, -x * rational::q(neg_one_pow(ku * kv))));
            }
        }
        out
    }

    /// The induced cobracket `QBar_k → ⊕ QBar_{k_1} ⊗ QBar_{k_2}` on a
    /// quotient vector, as a map `(k_1, k_2) → matrix entries`.
    fn cobracket_quotient(&self, k: i64, v: &[(usize, Q)]) -> Result<TensorBlocks> {
        let c = self.lift(k, v);
        let mut out = TensorBlocks::new();
        for (k1, u, k2, w, x) in self.cobracket_chain(&c) {
            let qu = self.quotient_coords(k1, &single(&u))?;
            let qw = self.quotient_coords(k2, &single(&w))?;
            let slot = out.entry((k1, k2)).or_default();
            for (i, a) in &qu {
                for (j, b) in &qw {
                    *slot.entry((*i, *j)).or_insert_with(Q::zero) += a * b * &x;
                }
            }
        }
        for m in out.values_mut() {
            m.retain(|_, c| !c.is_zero());
        }
        out.retain(|_, m| !m.is_empty());
        Ok(out)
    }

    /// Checks that `δ` vanishes on shuffles (so it descends to `QBar`) and
    /// that `τ δ = −δ` on `QBar_k`.
    pub fn cobracket_well_defined(&self, k: i64) -> Result<bool> {
        let Some(d) = self.degrees.get(&k) else {
            return Ok(true);
        };
        for col in d.shuffles.columns() {
            let mut c = Chain::new();
            for (i, x) in col {
                add_to(&mut c, d.basis[*i].clone(), x.clone());
            }
            let mut acc: BTreeMap<(i64, i64, usize, usize), Q> = BTreeMap::new();
            for (k1, u, k2, w, x) in self.cobracket_chain(&c) {
                let qu = self.quotient_coords(k1, &single(&u))?;
                let qw = self.quotient_coords(k2, &single(&w))?;
                for (i, a) in &qu {
                    for (j, b) in &qw {
                        *acc.entry((k1, k2, *i, *j)).or_insert_with(Q::zero) += a * b * &x;
                    }
                }
            }
            if acc.values().any(|c| !c.is_zero()) {
                return Ok(false);
            }
        }
        for j in 0..self.dim(k) {
            let m = self.cobracket_quotient(k, &[(j, Q::one())])?;
            for (&(k1, k2), entries) in &m {
                let sign = rational::q(neg_one_pow(k1 * k2));
                let empty = BTreeMap::new();
                let other = m.get(&(k2, k1)).unwrap_or(&empty);
                for (&(a, b), c) in entries {
                    let swapped = other.get(&(b, a)).cloned().unwrap_or_else(Q::zero);
                    if swapped != -(c * &sign) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Matrix of the cobracket on cohomology `H^{k_1+k_2} → H^{k_1} ⊗ H^{k_2}`:
    /// one row per class, columns `i · rank H^{k_2} + j`.
    pub fn cobracket_on_cohomology(&self, k1: i64, k2: i64) -> Result<QMatrix> {
        let h = self.cohomology(k1 + k2)?;
        let h1 = self.cohomology(k1)?;
        let h2 = self.cohomology(k2)?;
        let mut rows = Vec::new();
        for z in &h.representatives {
            let m = self.cobracket_quotient(k1 + k2, z)?;
            let mut row = vec![Q::zero(); h1.rank * h2.rank];
            if let Some(entries) = m.get(&(k1, k2)) {
                // (π ⊗ π) applied to Σ c e_a ⊗ e_b
                let mut by_left: BTreeMap<usize, SparseQ> = BTreeMap::new();
                for (&(a, b), c) in entries {
                    by_left.entry(a).or_default().push((b, c.clone()));
                }
                for (a, right) in by_left {
                    let pa = h1.project(&[(a, Q::one())])?;
                    let pb = h2.project(&normalize_q(right))?;
                    for (i, x) in pa.iter().enumerate() {
                        for (j, y) in pb.iter().enumerate() {
                            row[i * h2.rank + j] += x * y;
                        }
                    }
                }
            }
            rows.push(row);
        }
        Ok(QMatrix::from_rows(&rows))
    }
}

/// Side-by-side ranks of the bar and cobar computations.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub space: String,
    pub algebra: String,
    pub n: usize,
    pub t_max: usize,
    pub bar_ranks: BTreeMap<i64, usize>,
    pub cobar_ranks: BTreeMap<i64, usize>,
    /// `(s, t, rank of cobracket, rank of bracket)`.
    pub structure_ranks: Vec<(i64, i64, usize, usize)>,
}

impl Comparison {
    pub fn ranks_match(&self) -> bool {
        self.bar_ranks == self.cobar_ranks
    }

    pub fn structure_matches(&self) -> bool {
        self.structure_ranks.iter().all(|e| e.2 == e.3)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let m = |r: &BTreeMap<i64, usize>| -> serde_json::Map<String, serde_json::Value> {
            r.iter().map(|(k, v)| (k.to_string(), (*v).into())).collect()
        };
        let structure: Vec<serde_json::Value> = self
            .structure_ranks
            .iter()
            .map(|(s, t, a, b)| serde_json::json!({ "s": s, "t": t, "cobracket_rank": a, "bracket_rank": b }))
            .collect();
        serde_json::json!({
            "space": self.space,
            "cdga": self.algebra,
            "N": self.n,
            "T": self.t_max,
            "bar_ranks": m(&self.bar_ranks),
            "cobar_ranks": m(&self.cobar_ranks),
            "structure": structure,
            "match": self.ranks_match() && self.structure_matches(),
        })
    }
}

/// Ranks of `H^t(QBar^{≤N})` and `H_t(P^N)` for `1 ≤ t ≤ T`, together with
/// ranks of the cobracket and bracket in every degree pair. The cobar side
/// uses the smallest admissible `q_max`.
pub fn compare(space: &crate::simplicial::SimplicialSpace, a: &CDGAlgebra, n: usize, t_max: usize, budget: Option<usize>, seed: u64) -> Result<Comparison> {
    let lie = crate::dgl::CobarLie::build(space, n, t_max + n + 1, budget)?.with_seed(seed);
    let cobar_ranks = lie.homotopy_ranks(t_max)?;
    let q = QBar::new(a, n)?;
    let bar_ranks = q.cohomology_ranks(1, t_max as i64)?;
    let mut structure_ranks = Vec::new();
    for s in 1..=t_max as i64 {
        for t in s..=t_max as i64 - s {
            if cobar_ranks[&s] == 0 || cobar_ranks[&t] == 0 || cobar_ranks[&(s + t)] == 0 {
                continue;
            }
            let (hs, ht, hst) = (lie.homology(s)?, lie.homology(t)?, lie.homology(s + t)?);
            let table = lie.bracket_table(&hs, &ht, &hst)?;
            let rows: Vec<Vec<Q>> = table.matrix.iter().flatten().cloned().collect();
            let bracket_rank = QMatrix::from_rows(&rows).rank();
            let cobracket_rank = q.cobracket_on_cohomology(s, t)?.rank();
            structure_ranks.push((s, t, cobracket_rank, bracket_rank));
        }
    }
    Ok(Comparison {
        space: space.name().to_string(),
        algebra: a.name().to_string(),
        n,
        t_max,
        bar_ranks,
        cobar_ranks,
        structure_ranks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_and_json() {
        let s2 = CDGAlgebra::builtin("H(S2)").unwrap();
        assert_eq!(s2.dim(), 1);
        let w = CDGAlgebra::builtin("H(S2vS2)").unwrap();
        assert_eq!(w.dim(), 2);
        let p = CDGAlgebra::builtin("H(S2xS2)").unwrap();
        assert_eq!(CDGAlgebra::from_json(&p.to_json()).unwrap(), p);
        assert!(CDGAlgebra::builtin("H(T2)").is_err());
    }

    #[test]
    fn violated_laws_are_named() {
        let bad = r#"{"generators":[{"name":"x","degree":1},{"name":"y","degree":1},{"name":"z","degree":2}],
            "relations":[{"left":"x","right":"y","result":{"z":"1"}},{"left":"y","right":"x","result":{"z":"1"}}]}"#;
        let e = CDGAlgebra::from_json(bad).unwrap_err().to_string();
        assert!(e.contains("graded commutativity"), "{e}");
        let bad = r#"{"generators":[{"name":"x","degree":2},{"name":"y","degree":3}],
            "differential":{"x":{"y":"1"}},
            "relations":[{"left":"x","right":"x","result":{}}]}"#;
        assert!(CDGAlgebra::from_json(bad).is_ok());
        let bad = r#"{"generators":[{"name":"x","degree":2},{"name":"y","degree":4}],
            "differential":{"x":{"y":"1"}}}"#;
        assert!(CDGAlgebra::from_json(bad).unwrap_err().to_string().contains("differential degree"));
    }

    #[test]
    fn sphere_bar_is_diagonal() {
        let a = CDGAlgebra::sphere(2).unwrap();
        let b = BarComplex::new(&a, 4).unwrap();
        for s in 1..=4 {
            for t in 0..=10 {
                assert_eq!(b.words(s, t).len(), usize::from(t == 2 * s));
            }
        }
        assert!(b.d_external(&vec![0, 0]).is_empty());
    }

    #[test]
    fn shuffle_of_letters() {
        let a = CDGAlgebra::builtin("H(S2vS3)").unwrap();
        let b = BarComplex::new(&a, 3).unwrap();
        // shifted degrees 1 and 2: [a]*[b] = [a|b] + [b|a]
        let s = b.shuffle(&[0], &[1]);
        assert_eq!(s.get(&vec![0, 1]), Some(&Q::one()));
        assert_eq!(s.get(&vec![1, 0]), Some(&Q::one()));
        // two odd letters anticommute
        let s = b.shuffle(&[0], &[0]);
        assert!(s.is_empty());
    }

    #[test]
    fn product_algebra_bar_differential() {
        let a = CDGAlgebra::builtin("H(S2xS3)").unwrap();
        let b = BarComplex::new(&a, 3).unwrap();
        assert!(!b.d_external(&vec![0, 1]).is_empty());
    }

    #[test]
    fn sphere_qbar() {
        let a = CDGAlgebra::sphere(2).unwrap();
        let q = QBar::new(&a, 4).unwrap();
        let r = q.cohomology_ranks(1, 3).unwrap();
        assert_eq!(r.into_iter().collect::<Vec<_>>(), vec![(1, 1), (2, 1), (3, 0)]);
        assert!(q.projector_checks.iter().all(|c| c.agrees));
        assert_eq!(q.cobracket_on_cohomology(1, 1).unwrap().rank(), 1);
        assert!(q.cobracket_well_defined(2).unwrap());
    }

    #[test]
    fn trivial_algebra() {
        let a = CDGAlgebra::trivial();
        let q = QBar::new(&a, 3).unwrap();
        assert!(q.cohomology_ranks(0, 3).unwrap().values().all(|&r| r == 0));
        assert_eq!(q.bar().bidegree_dims(), BTreeMap::from([((0, 0), 1)]));
    }

    #[test]
    fn qbar_of_wedges_and_products() {
        let w = CDGAlgebra::builtin("H(S2vS2)").unwrap();
        let q = QBar::new(&w, 3).unwrap();
        // free Lie algebra on two degree-one classes: 2, 3, 2·3·... (Witt: 2, 1 even part + ...)
        let r = q.cohomology_ranks(1, 3).unwrap();
        assert_eq!(r[&1], 2);
        assert_eq!(r[&2], 3);
        assert_eq!(q.cobracket_on_cohomology(1, 1).unwrap().rank(), 3);
        let p = CDGAlgebra::builtin("H(S2xS3)").unwrap();
        let q = QBar::new(&p, 4).unwrap();
        let r = q.cohomology_ranks(1, 4).unwrap();
        // π_* ⊗ Q of S² × S³: degrees 1, 2 (from S²) and 2 (from S³)
        assert_eq!((r[&1], r[&2], r[&3], r[&4]), (1, 2, 0, 0));
        for k in 0..=4 {
            assert!(q.cobracket_well_defined(k).unwrap());
        }
    }

    #[test]
    fn mixed_parity_projectors() {
        for name in ["H(S3vS4)", "H(S3xS3)", "H(S2vS3)", "H(S3)"] {
            let a = CDGAlgebra::builtin(name).unwrap();
            let q = QBar::new(&a, 4).unwrap();
            assert!(q.projector_checks.iter().all(|c| c.agrees), "{name}");
        }
    }

    #[test]
    fn acyclic_extension_is_invisible() {
        let a = CDGAlgebra::builtin("H(S2vS3)").unwrap();
        let e = a.acyclic_extension(3).unwrap();
        let (qa, qe) = (QBar::new(&a, 3).unwrap(), QBar::new(&e, 3).unwrap());
        assert_eq!(qa.cohomology_ranks(0, 4).unwrap(), qe.cohomology_ranks(0, 4).unwrap());
    }

    #[test]
    fn sign_errors_are_detected() {
        // dropping the suspension sign breaks the comparison with f_n
        let a = CDGAlgebra::builtin("H(S2xS3)").unwrap();
        let b = BarComplex::new(&a, 3).unwrap();
        let w = vec![0, 1];
        let flipped: Chain = b.d_external(&w).into_iter().map(|(k, c)| (k, -c)).collect();
        assert_ne!(flipped, b.d_external_functorial(&w).unwrap());
        // the shuffle cokernel has the dimension of the image of w_2, not of 1 + τ
        let q = QBar::new(&a, 2).unwrap();
        let c = q.projector_checks.iter().find(|c| c.weight == 2 && c.internal == 5).unwrap();
        assert_eq!((c.dim_tensor, c.rank_shuffles, c.rank_projector), (2, 1, 1));
    }
}
