//! Finite reduced simplicial sets, their powers relative to the fat wedge,
//! and the Eilenberg–Zilber shuffle map.
//!
//! A `q`-simplex is a pair of a nondegenerate cell and a monotone surjection
//! `θ: [q] → [dim cell]`. The surjection is stored as a bit mask whose bit
//! `i` is set when `θ(i) = θ(i+1)`, so a simplex is degenerate exactly when
//! its mask is nonzero, and a tuple of simplices is degenerate exactly when
//! the bitwise AND of the masks is nonzero.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fincat::{DMorphism, SetMap};
use crate::homalg::complex::ChainComplex;
use crate::homalg::linalg::{normalize_z, IntMatrix, QMatrix, SparseZ};
use crate::rational::Q;

pub type Mask = u32;

/// Largest simplicial dimension handled (masks are 32-bit).
pub const MAX_DIM: usize = 30;

/// Values `θ(0), …, θ(q)` of the surjection encoded by `mask`.
pub fn theta(mask: Mask, q: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(q + 1);
    let mut v = 0u8;
    out.push(0);
    for i in 0..q {
        if mask & (1 << i) == 0 {
            v += 1;
        }
        out.push(v);
    }
    out
}

/// Mask of a monotone surjection given by its values.
pub fn mask_of(values: &[u8]) -> Mask {
    debug_assert_eq!(values.first(), Some(&0));
    let mut m = 0;
    for i in 0..values.len().saturating_sub(1) {
        debug_assert!(values[i + 1] == values[i] || values[i + 1] == values[i] + 1);
        if values[i + 1] == values[i] {
            m |= 1 << i;
        }
    }
    m
}

fn full_mask(q: usize) -> Mask {
    if q == 0 {
        0
    } else {
        (1u32 << q) - 1
    }
}

/// A simplex in some dimension `q` known from context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    pub cell: u32,
    pub mask: Mask,
}

impl Simplex {
    pub fn nondegenerate(cell: u32) -> Self {
        Simplex { cell, mask: 0 }
    }

    pub fn is_degenerate(&self) -> bool {
        self.mask != 0
    }
}

/// A nondegenerate simplex and its faces, each a (possibly degenerate)
/// simplex of one dimension lower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    pub faces: Vec<Simplex>,
}

/// A finite reduced simplicial set. Cell `0` is the unique vertex.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialSpace {
    name: String,
    cells: Vec<Cell>,
}

impl fmt::Debug for SimplicialSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SimplicialSpace({}, {} cells)", self.name, self.cells.len())
    }
}

#[derive(Serialize, Deserialize)]
struct JsonFace {
    #[serde(default)]
    degeneracies: Vec<usize>,
    cell: String,
}

#[derive(Serialize, Deserialize)]
struct JsonCell {
    id: String,
    dim: usize,
    faces: Vec<JsonFace>,
}

#[derive(Serialize, Deserialize)]
struct JsonSpace {
    vertices: usize,
    cells: Vec<JsonCell>,
}

/// Identifier used for the vertex in JSON descriptions.
pub const VERTEX_ID: &str = "*";

impl SimplicialSpace {
    /// Builds and validates a space from its cells; `cells[0]` must be the
    /// vertex.
    pub fn from_cells(name: impl Into<String>, cells: Vec<Cell>) -> Result<Self> {
        let s = SimplicialSpace {
            name: name.into(),
            cells,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidInput(m));
        if self.cells.first().map(|c| c.dim) != Some(0) {
            return bad("the first cell must be the vertex".into());
        }
        for (ci, c) in self.cells.iter().enumerate() {
            if ci > 0 && c.dim == 0 {
                return bad(format!("cell {} is a second vertex; spaces must be reduced", c.id));
            }
            if c.dim == 1 {
                return bad(format!("cell {} is a nondegenerate 1-simplex; spaces must be reduced", c.id));
            }
            if c.dim > MAX_DIM {
                return bad(format!("cell {} exceeds dimension {MAX_DIM}", c.id));
            }
            let expected = if c.dim == 0 { 0 } else { c.dim + 1 };
            if c.faces.len() != expected {
                return bad(format!("cell {} has {} faces, expected {expected}", c.id, c.faces.len()));
            }
            for f in &c.faces {
                let Some(fc) = self.cells.get(f.cell as usize) else {
                    return bad(format!("cell {} has a face on an unknown cell", c.id));
                };
                if fc.dim + f.mask.count_ones() as usize != c.dim - 1 || (f.mask >> (c.dim - 1)) != 0 {
                    return bad(format!("cell {} has a face of the wrong dimension", c.id));
                }
            }
        }
        // simplicial identities d_i d_j = d_{j-1} d_i for i < j
        for (ci, c) in self.cells.iter().enumerate() {
            if c.dim < 2 {
                continue;
            }
            let s = Simplex::nondegenerate(ci as u32);
            for j in 1..=c.dim {
                for i in 0..j {
                    let a = self.face(self.face(s, c.dim, j), c.dim - 1, i);
                    let b = self.face(self.face(s, c.dim, i), c.dim - 1, j - 1);
                    if a != b {
                        return bad(format!(
                            "cell {} violates the simplicial identity d_{i} d_{j} = d_{} d_{i}",
                            c.id,
                            j - 1
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn point() -> Self {
        SimplicialSpace {
            name: "pt".into(),
            cells: vec![Cell {
                id: VERTEX_ID.into(),
                dim: 0,
                faces: vec![],
            }],
        }
    }

    /// `Δ^k / ∂Δ^k` with one vertex and one nondegenerate `k`-simplex.
    pub fn sphere(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "sphere({k}) would not be reduced and simply connected; need k ≥ 2"
            )));
        }
        let base = Simplex {
            cell: 0,
            mask: full_mask(k - 1),
        };
        let mut s = Self::point();
        s.name = format!("S{k}");
        s.cells.push(Cell {
            id: format!("e{k}"),
            dim: k,
            faces: vec![base; k + 1],
        });
        s.validate()?;
        Ok(s)
    }

    /// One-point union.
    pub fn wedge(x: &SimplicialSpace, y: &SimplicialSpace) -> Self {
        let mut cells = x.cells.clone();
        let off = (x.cells.len() - 1) as u32;
        for c in &y.cells[1..] {
            cells.push(Cell {
                id: unique_id(&cells, &c.id),
                dim: c.dim,
                faces: c
                    .faces
                    .iter()
                    .map(|f| Simplex {
                        cell: if f.cell == 0 { 0 } else { f.cell + off },
                        mask: f.mask,
                    })
                    .collect(),
            });
        }
        SimplicialSpace {
            name: format!("({} v {})", x.name, y.name),
            cells,
        }
    }

    /// Degreewise product; its nondegenerate simplices are the pairs with no
    /// common degeneracy.
    pub fn product(x: &SimplicialSpace, y: &SimplicialSpace) -> Result<Self> {
        let top = x.max_dim() + y.max_dim();
        if top > MAX_DIM {
            return Err(Error::InvalidArgument("product dimension too large".into()));
        }
        let mut cells = vec![Cell {
            id: VERTEX_ID.into(),
            dim: 0,
            faces: vec![],
        }];
        let mut lookup: HashMap<(Simplex, Simplex), u32> = HashMap::new();
        let vertex = |q: usize| Simplex {
            cell: 0,
            mask: full_mask(q),
        };
        lookup.insert((vertex(0), vertex(0)), 0);
        for d in 1..=top {
            let xs = x.simplices(d);
            let ys = y.simplices(d);
            for a in &xs {
                for b in &ys {
                    if a.mask & b.mask != 0 || (a.cell == 0 && b.cell == 0) {
                        continue;
                    }
                    let mut faces = Vec::with_capacity(d + 1);
                    for j in 0..=d {
                        let fa = x.face(*a, d, j);
                        let fb = y.face(*b, d, j);
                        let common = fa.mask & fb.mask;
                        let (ra, rb) = (squeeze(fa, common, d - 1), squeeze(fb, common, d - 1));
                        let cell = *lookup.get(&(ra, rb)).ok_or_else(|| {
                            Error::VerificationFailed("product face not found".into())
                        })?;
                        faces.push(Simplex { cell, mask: common });
                    }
                    let idx = cells.len() as u32;
                    cells.push(Cell {
                        id: format!("{}|{}", simplex_label(x, *a, d), simplex_label(y, *b, d)),
                        dim: d,
                        faces,
                    });
                    lookup.insert((*a, *b), idx);
                }
            }
        }
        Self::from_cells(format!("({} x {})", x.name, y.name), cells)
    }

    /// Parses expressions such as `S2`, `S2 v S2`, `S2 x S3`, `pt` with
    /// parentheses; `x` binds tighter than `v`.
    pub fn parse_expression(expr: &str) -> Result<Self> {
        let tokens = tokenize(expr)?;
        let mut pos = 0;
        let s = parse_wedge(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::InvalidInput(format!("unexpected trailing input in {expr:?}")));
        }
        let mut s = s;
        s.name = expr.trim().to_string();
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let js: JsonSpace = serde_json::from_str(text)
            .map_err(|e| Error::InvalidInput(format!("space JSON: {e}")))?;
        if js.vertices != 1 {
            return Err(Error::InvalidInput(format!(
                "spaces must be reduced: {} vertices given",
                js.vertices
            )));
        }
        let mut ids: HashMap<String, u32> = HashMap::new();
        ids.insert(VERTEX_ID.into(), 0);
        let mut cells = vec![Cell {
            id: VERTEX_ID.into(),
            dim: 0,
            faces: vec![],
        }];
        for (k, c) in js.cells.iter().enumerate() {
            if ids.insert(c.id.clone(), k as u32 + 1).is_some() {
                return Err(Error::InvalidInput(format!("duplicate cell id {}", c.id)));
            }
            cells.push(Cell {
                id: c.id.clone(),
                dim: c.dim,
                faces: vec![],
            });
        }
        let dims: Vec<usize> = cells.iter().map(|c| c.dim).collect();
        for (k, c) in js.cells.iter().enumerate() {
            let mut faces = Vec::new();
            for f in &c.faces {
                let &cell = ids
                    .get(&f.cell)
                    .ok_or_else(|| Error::InvalidInput(format!("unknown face cell {}", f.cell)))?;
                let mut s = Simplex::nondegenerate(cell);
                let mut q = dims[cell as usize];
                for &j in f.degeneracies.iter().rev() {
                    if j > q {
                        return Err(Error::InvalidInput(format!(
                            "degeneracy s_{j} applied to a {q}-simplex in cell {}",
                            c.id
                        )));
                    }
                    s = degenerate(s, q, j);
                    q += 1;
                }
                faces.push(s);
            }
            cells[k + 1].faces = faces;
        }
        Self::from_cells("json", cells)
    }

    pub fn to_json(&self) -> String {
        let js = JsonSpace {
            vertices: 1,
            cells: self.cells[1..]
                .iter()
                .map(|c| JsonCell {
                    id: c.id.clone(),
                    dim: c.dim,
                    faces: c
                        .faces
                        .iter()
                        .map(|f| JsonFace {
                            degeneracies: (0..32).rev().filter(|i| f.mask & (1 << i) != 0).collect(),
                            cell: self.cells[f.cell as usize].id.clone(),
                        })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&js).expect("serializable")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn cell_dim(&self, c: u32) -> usize {
        self.cells[c as usize].dim
    }

    /// Cells of dimension `q`.
    pub fn nondegenerate(&self, q: usize) -> Vec<u32> {
        (0..self.cells.len() as u32)
            .filter(|&c| self.cells[c as usize].dim == q)
            .collect()
    }

    /// All `q`-simplices, ordered by cell then mask.
    pub fn simplices(&self, q: usize) -> Vec<Simplex> {
        let mut out = Vec::new();
        for (ci, c) in self.cells.iter().enumerate() {
            if c.dim > q {
                continue;
            }
            let r = q - c.dim;
            for mask in 0..(1u32 << q) {
                if mask.count_ones() as usize == r {
                    out.push(Simplex {
                        cell: ci as u32,
                        mask,
                    });
                }
            }
        }
        out
    }

    /// Face `d_j` of a `q`-simplex.
    pub fn face(&self, s: Simplex, q: usize, j: usize) -> Simplex {
        assert!(q >= 1 && j <= q, "face d_{j} of a {q}-simplex");
        let vals = theta(s.mask, q);
        let v = vals[j];
        let mut rest: Vec<u8> = vals[..j].iter().chain(&vals[j + 1..]).copied().collect();
        let kept = (j > 0 && vals[j - 1] == v) || (j < q && vals[j + 1] == v);
        if kept {
            return Simplex {
                cell: s.cell,
                mask: mask_of(&rest),
            };
        }
        for x in rest.iter_mut() {
            if *x > v {
                *x -= 1;
            }
        }
        let k = self.cells[s.cell as usize].dim;
        let f = self.cells[s.cell as usize].faces[v as usize];
        let inner = theta(f.mask, k - 1);
        let composed: Vec<u8> = rest.iter().map(|&x| inner[x as usize]).collect();
        Simplex {
            cell: f.cell,
            mask: mask_of(&composed),
        }
    }

    /// Degeneracy `s_j` of a `q`-simplex.
    pub fn degeneracy(&self, s: Simplex, q: usize, j: usize) -> Simplex {
        degenerate(s, q, j)
    }

    /// Normalized chains (nondegenerate simplices, basepoint included)
    /// through dimension `q_max`.
    pub fn normalized_chains(&self, q_max: usize) -> ChainComplex {
        let basis: Vec<Vec<u32>> = (0..=q_max).map(|q| self.nondegenerate(q)).collect();
        let mut boundaries = Vec::new();
        for q in 0..=q_max {
            let rows = if q == 0 { 0 } else { basis[q - 1].len() };
            let cols = basis[q]
                .iter()
                .map(|&c| {
                    if q == 0 {
                        return Vec::new();
                    }
                    let s = Simplex::nondegenerate(c);
                    let mut col: Vec<(usize, Q)> = Vec::new();
                    for j in 0..=q {
                        let f = self.face(s, q, j);
                        if f.mask == 0 {
                            let i = basis[q - 1].iter().position(|&b| b == f.cell).expect("face cell");
                            col.push((i, crate::rational::q(if j % 2 == 0 { 1 } else { -1 })));
                        }
                    }
                    col
                })
                .collect();
            boundaries.push(QMatrix::from_columns(rows, cols));
        }
        ChainComplex::new(0, boundaries).expect("normalized chains form a complex")
    }

    /// Largest `c` with `H̃_i(X; Q) = 0` for all `i ≤ c`, or `None` when `X`
    /// is rationally acyclic.
    pub fn rational_connectivity(&self) -> Option<usize> {
        let top = self.max_dim();
        let c = self.normalized_chains(top + 1);
        (1..=top)
            .find(|&d| c.homology_rank(d as i64).expect("degree in range") > 0)
            .map(|d| d - 1)
    }
}

fn degenerate(s: Simplex, q: usize, j: usize) -> Simplex {
    assert!(j <= q);
    let vals = theta(s.mask, q);
    let mut v = Vec::with_capacity(q + 2);
    v.extend_from_slice(&vals[..=j]);
    v.extend_from_slice(&vals[j..]);
    Simplex {
        cell: s.cell,
        mask: mask_of(&v),
    }
}

/// Removes the repeats listed in `common` from a `q`-simplex.
fn squeeze(s: Simplex, common: Mask, q: usize) -> Simplex {
    let vals = theta(s.mask, q);
    let kept: Vec<u8> = (0..=q)
        .filter(|&i| i == 0 || common & (1 << (i - 1)) == 0)
        .map(|i| vals[i])
        .collect();
    Simplex {
        cell: s.cell,
        mask: mask_of(&kept),
    }
}

fn simplex_label(x: &SimplicialSpace, s: Simplex, q: usize) -> String {
    let id = &x.cells[s.cell as usize].id;
    if s.mask == 0 {
        id.clone()
    } else {
        let degs: Vec<String> = (0..q).rev().filter(|i| s.mask & (1 << i) != 0).map(|i| i.to_string()).collect();
        format!("s{}({id})", degs.join(""))
    }
}

fn unique_id(cells: &[Cell], id: &str) -> String {
    let taken = |s: &str| cells.iter().any(|c| c.id == s);
    if !taken(id) {
        return id.to_string();
    }
    (1..).map(|k| format!("{id}'{k}")).find(|s| !taken(s)).expect("fresh id")
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Sphere(usize),
    Point,
    Wedge,
    Times,
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                out.push(Token::Open);
                i += 1
            }
            ')' => {
                out.push(Token::Close);
                i += 1
            }
            'v' | '∨' => {
                out.push(Token::Wedge);
                i += 1
            }
            'x' | '×' | '*' => {
                out.push(Token::Times);
                i += 1
            }
            'S' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let k: usize = chars[start..j]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("expected a dimension after S in {s:?}")))?;
                out.push(Token::Sphere(k));
                i = j;
            }
            'p' if chars.get(i + 1) == Some(&'t') => {
                out.push(Token::Point);
                i += 2
            }
            _ => return Err(Error::InvalidInput(format!("unexpected character {c:?} in {s:?}"))),
        }
    }
    Ok(out)
}

fn parse_wedge(t: &[Token], pos: &mut usize) -> Result<SimplicialSpace> {
    let mut acc = parse_product(t, pos)?;
    while t.get(*pos) == Some(&Token::Wedge) {
        *pos += 1;
        let rhs = parse_product(t, pos)?;
        acc = SimplicialSpace::wedge(&acc, &rhs);
    }
    Ok(acc)
}

fn parse_product(t: &[Token], pos: &mut usize) -> Result<SimplicialSpace> {
    let mut acc = parse_atom(t, pos)?;
    while t.get(*pos) == Some(&Token::Times) {
        *pos += 1;
        let rhs = parse_atom(t, pos)?;
        acc = SimplicialSpace::product(&acc, &rhs)?;
    }
    Ok(acc)
}

fn parse_atom(t: &[Token], pos: &mut usize) -> Result<SimplicialSpace> {
    let tok = t
        .get(*pos)
        .ok_or_else(|| Error::InvalidInput("unexpected end of space expression".into()))?;
    *pos += 1;
    match tok {
        Token::Sphere(k) => SimplicialSpace::sphere(*k).map_err(|e| Error::InvalidInput(e.to_string())),
        Token::Point => Ok(SimplicialSpace::point()),
        Token::Open => {
            let s = parse_wedge(t, pos)?;
            if t.get(*pos) != Some(&Token::Close) {
                return Err(Error::InvalidInput("unbalanced parenthesis".into()));
            }
            *pos += 1;
            Ok(s)
        }
        other => Err(Error::InvalidInput(format!("unexpected token {other:?}"))),
    }
}

/// All `q`-simplices of a space with face lookups, shared by every power.
#[derive(Debug)]
pub struct SimplexTable {
    pub q: usize,
    pub list: Vec<Simplex>,
    index: HashMap<Simplex, u16>,
    /// `faces[s][j]` is the index of `d_j s` in the table one dimension down.
    pub faces: Vec<Vec<u16>>,
    nonbase: Vec<u16>,
}

impl SimplexTable {
    pub fn index_of(&self, s: &Simplex) -> u16 {
        self.index[s]
    }

    pub fn is_base(&self, i: u16) -> bool {
        self.list[i as usize].cell == 0
    }

    pub fn mask(&self, i: u16) -> Mask {
        self.list[i as usize].mask
    }
}

/// Simplex tables of one space for dimensions `0..=q_max`.
#[derive(Debug)]
pub struct SpaceTables {
    space: SimplicialSpace,
    tables: Vec<SimplexTable>,
}

impl SpaceTables {
    pub fn new(space: &SimplicialSpace, q_max: usize) -> Result<Arc<Self>> {
        if q_max > MAX_DIM {
            return Err(Error::InvalidArgument(format!("q_max above {MAX_DIM}")));
        }
        let mut tables: Vec<SimplexTable> = Vec::new();
        for q in 0..=q_max {
            let list = space.simplices(q);
            if list.len() > u16::MAX as usize {
                return Err(Error::BudgetExceeded(format!(
                    "{} simplices of dimension {q}",
                    list.len()
                )));
            }
            let index: HashMap<Simplex, u16> =
                list.iter().enumerate().map(|(i, s)| (*s, i as u16)).collect();
            let faces = if q == 0 {
                vec![Vec::new(); list.len()]
            } else {
                list.iter()
                    .map(|s| (0..=q).map(|j| tables[q - 1].index[&space.face(*s, q, j)]).collect())
                    .collect()
            };
            let nonbase = (0..list.len() as u16).filter(|&i| list[i as usize].cell != 0).collect();
            tables.push(SimplexTable {
                q,
                list,
                index,
                faces,
                nonbase,
            });
        }
        Ok(Arc::new(SpaceTables {
            space: space.clone(),
            tables,
        }))
    }

    pub fn space(&self) -> &SimplicialSpace {
        &self.space
    }

    pub fn q_max(&self) -> usize {
        self.tables.len() - 1
    }

    pub fn table(&self, q: usize) -> &SimplexTable {
        &self.tables[q]
    }
}

/// A simplex of a power `X^n`, packed as sixteen bits per coordinate.
pub type Key = u128;

/// Largest supported exponent.
pub const MAX_POWER: usize = 8;

pub fn pack(coords: &[u16]) -> Key {
    coords
        .iter()
        .enumerate()
        .fold(0, |k, (i, &c)| k | ((c as Key) << (16 * i)))
}

pub fn unpack(key: Key, n: usize) -> Vec<u16> {
    (0..n).map(|i| ((key >> (16 * i)) & 0xffff) as u16).collect()
}

/// Normalized chains of `X^n` relative to the fat wedge, through dimension
/// `q_max`. The basis in dimension `q` is the set of nondegenerate `q`-simplex
/// tuples none of whose coordinates is the basepoint, in lexicographic order
/// of table indices.
#[derive(Debug)]
pub struct PowerChains {
    tables: Arc<SpaceTables>,
    n: usize,
    bases: Vec<Vec<Key>>,
    index: Vec<HashMap<Key, u32>>,
}

impl PowerChains {
    /// `budget` caps the total number of basis elements.
    pub fn new(tables: &Arc<SpaceTables>, n: usize, budget: Option<usize>) -> Result<Self> {
        Self::with_range(tables, n, 0, tables.q_max(), budget)
    }

    /// Only dimensions `q_lo..=q_hi` are enumerated; others are left empty.
    pub fn with_range(
        tables: &Arc<SpaceTables>,
        n: usize,
        q_lo: usize,
        q_hi: usize,
        budget: Option<usize>,
    ) -> Result<Self> {
        if n > MAX_POWER {
            return Err(Error::InvalidArgument(format!("powers above {MAX_POWER} are not supported")));
        }
        let q_hi = q_hi.min(tables.q_max());
        let mut bases = Vec::new();
        let mut total = 0usize;
        for q in 0..=tables.q_max() {
            let b = if q >= q_lo && q <= q_hi {
                enumerate_power(tables.table(q), n, budget.map(|b| b.saturating_sub(total)))?
            } else {
                Vec::new()
            };
            total += b.len();
            if let Some(limit) = budget {
                if total > limit {
                    return Err(Error::BudgetExceeded(format!(
                        "power {n} needs more than {limit} basis elements (dimension {q})"
                    )));
                }
            }
            bases.push(b);
        }
        let index = bases
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, k)| (*k, i as u32)).collect())
            .collect();
        Ok(PowerChains {
            tables: tables.clone(),
            n,
            bases,
            index,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q_max(&self) -> usize {
        self.bases.len() - 1
    }

    pub fn tables(&self) -> &Arc<SpaceTables> {
        &self.tables
    }

    pub fn dim(&self, q: usize) -> usize {
        self.bases.get(q).map_or(0, |b| b.len())
    }

    pub fn basis(&self, q: usize) -> &[Key] {
        &self.bases[q]
    }

    pub fn index_of(&self, q: usize, key: Key) -> Option<u32> {
        self.index.get(q)?.get(&key).copied()
    }

    pub fn coordinates(&self, q: usize, i: u32) -> Vec<u16> {
        unpack(self.bases[q][i as usize], self.n)
    }

    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(|b| b.len()).sum()
    }

    /// Index of a tuple in the relative basis, or `None` if the tuple is
    /// degenerate or lies in the fat wedge.
    pub fn lookup(&self, q: usize, coords: &[u16]) -> Option<u32> {
        let t = self.tables.table(q);
        let mut and = full_mask(q);
        for &c in coords {
            if t.is_base(c) {
                return None;
            }
            and &= t.mask(c);
        }
        if and != 0 {
            return None;
        }
        Some(
            *self.index[q]
                .get(&pack(coords))
                .expect("nondegenerate non-fat tuple missing from basis"),
        )
    }

    /// `∂` of the `i`-th basis element in dimension `q`.
    pub fn boundary_column(&self, q: usize, i: u32) -> SparseZ {
        if q == 0 {
            return Vec::new();
        }
        let t = self.tables.table(q);
        let coords = self.coordinates(q, i);
        let mut out = Vec::with_capacity(q + 1);
        let mut face = vec![0u16; self.n];
        for j in 0..=q {
            for (f, &c) in face.iter_mut().zip(&coords) {
                *f = t.faces[c as usize][j];
            }
            if let Some(k) = self.lookup(q - 1, &face) {
                out.push((k, if j % 2 == 0 { 1 } else { -1 }));
            }
        }
        normalize_z(out)
    }

    /// `∂_q: C_q → C_{q-1}`.
    pub fn boundary_matrix(&self, q: usize) -> IntMatrix {
        let rows = if q == 0 { 0 } else { self.dim(q - 1) };
        IntMatrix::from_columns(
            rows,
            (0..self.dim(q) as u32).map(|i| self.boundary_column(q, i)).collect(),
        )
    }

    /// The relative chain complex over the rationals.
    pub fn to_chain_complex(&self) -> ChainComplex {
        let boundaries = (0..=self.q_max())
            .map(|q| QMatrix::from_int(&self.boundary_matrix(q)))
            .collect();
        ChainComplex::new(0, boundaries).expect("relative chains form a complex")
    }

    /// Image under pullback along a surjection `f: [m] → [n]` of the `i`-th
    /// basis element in dimension `q`, as an index in `target` (which must
    /// be the `m`-th power).
    pub fn pullback_index(&self, f: &SetMap, target: &PowerChains, q: usize, i: u32) -> u32 {
        let coords = self.coordinates(q, i);
        let out: Vec<u16> = f.images0().iter().map(|&j| coords[j]).collect();
        target
            .lookup(q, &out)
            .expect("surjections preserve nondegenerate non-fat tuples")
    }

    fn check_map(&self, f: &SetMap, target: &PowerChains) -> Result<()> {
        if f.codomain() != self.n || f.domain() != target.n {
            return Err(Error::SizeMismatch(format!(
                "map {f:?} between powers {} and {}",
                self.n, target.n
            )));
        }
        if !f.is_surjective() {
            return Err(Error::InvalidArgument(format!(
                "{f:?} is not surjective; only surjections preserve the fat wedge"
            )));
        }
        Ok(())
    }

    /// Chain map `C_q(X^n) → C_q(X^m)` induced by a surjection `f: [m] → [n]`.
    pub fn induced_map(&self, f: &SetMap, target: &PowerChains, q: usize) -> Result<IntMatrix> {
        self.check_map(f, target)?;
        let cols = (0..self.dim(q) as u32)
            .map(|i| vec![(self.pullback_index(f, target, q, i), 1)])
            .collect();
        Ok(IntMatrix::from_columns(target.dim(q), cols))
    }

    /// Chain map induced by a morphism of `D` whose terms are surjections
    /// with integer coefficients.
    pub fn induced_int(&self, d: &DMorphism, target: &PowerChains, q: usize) -> Result<IntMatrix> {
        let mut cols: Vec<Vec<(u32, i64)>> = vec![Vec::new(); self.dim(q)];
        for (f, c) in d.terms() {
            self.check_map(f, target)?;
            let c = crate::rational::as_i64(c).ok_or_else(|| {
                Error::InvalidArgument("induced_int needs integer coefficients".into())
            })?;
            for (i, col) in cols.iter_mut().enumerate() {
                col.push((self.pullback_index(f, target, q, i as u32), c));
            }
        }
        Ok(IntMatrix::from_columns(target.dim(q), cols))
    }

    /// Chain map induced by an arbitrary morphism of `D` (all terms
    /// surjective).
    pub fn induced_q(&self, d: &DMorphism, target: &PowerChains, q: usize) -> Result<QMatrix> {
        let mut cols: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.dim(q)];
        for (f, c) in d.terms() {
            self.check_map(f, target)?;
            for (i, col) in cols.iter_mut().enumerate() {
                col.push((self.pullback_index(f, target, q, i as u32) as usize, c.clone()));
            }
        }
        Ok(QMatrix::from_columns(target.dim(q), cols))
    }

    /// Shuffle map on one pair of basis elements:
    /// `x ⊗ y ↦ Σ ± (s_ν x, s_μ y)` into `target` (the `(p+q)`-th power).
    pub fn ez_pair(
        &self,
        other: &PowerChains,
        target: &PowerChains,
        a: usize,
        x: u32,
        b: usize,
        y: u32,
    ) -> SparseZ {
        let xs = self.coordinates(a, x);
        let ys = other.coordinates(b, y);
        let t = self.tables.as_ref();
        let mut out = Vec::new();
        for (tx, ty, sign) in shuffle_paths(a, b) {
            let mut coords = Vec::with_capacity(xs.len() + ys.len());
            for &c in &xs {
                coords.push(compose_coord(t, a, c, &tx));
            }
            for &c in &ys {
                coords.push(compose_coord(t, b, c, &ty));
            }
            let k = target
                .lookup(a + b, &coords)
                .expect("shuffles of nondegenerate non-fat tuples are nondegenerate and non-fat");
            out.push((k, sign));
        }
        normalize_z(out)
    }

    /// Matrix of the shuffle map `C_a(X^p) ⊗ C_b(X^q) → C_{a+b}(X^{p+q})`;
    /// the column of `x_i ⊗ y_j` is `i · dim C_b(X^q) + j`.
    pub fn ez_matrix(&self, other: &PowerChains, target: &PowerChains, a: usize, b: usize) -> Result<IntMatrix> {
        if target.n != self.n + other.n {
            return Err(Error::SizeMismatch("shuffle target must be the sum power".into()));
        }
        if a + b > target.q_max() {
            return Err(Error::IndexOutOfRange(format!(
                "shuffle of degrees {a} and {b} exceeds q_max {}",
                target.q_max()
            )));
        }
        let mut cols = Vec::with_capacity(self.dim(a) * other.dim(b));
        for x in 0..self.dim(a) as u32 {
            for y in 0..other.dim(b) as u32 {
                cols.push(self.ez_pair(other, target, a, x, b, y));
            }
        }
        Ok(IntMatrix::from_columns(target.dim(a + b), cols))
    }
}

fn compose_coord(t: &SpaceTables, q: usize, c: u16, path: &[u8]) -> u16 {
    let s = t.table(q).list[c as usize];
    let vals = theta(s.mask, q);
    let composed: Vec<u8> = path.iter().map(|&k| vals[k as usize]).collect();
    t.table(path.len() - 1).index_of(&Simplex {
        cell: s.cell,
        mask: mask_of(&composed),
    })
}

/// The `(a, b)`-shuffles as lattice paths: for each, the surjections
/// `[a+b] → [a]`, `[a+b] → [b]` and the shuffle sign.
pub fn shuffle_paths(a: usize, b: usize) -> Vec<(Vec<u8>, Vec<u8>, i64)> {
    let mut out = Vec::new();
    let mut steps = Vec::with_capacity(a + b);
    fn rec(a: usize, b: usize, steps: &mut Vec<bool>, out: &mut Vec<(Vec<u8>, Vec<u8>, i64)>) {
        if a == 0 && b == 0 {
            let (mut tx, mut ty) = (vec![0u8], vec![0u8]);
            let (mut i, mut j) = (0u8, 0u8);
            let mut inversions = 0usize;
            let mut ys_seen = 0usize;
            for &is_x in steps.iter() {
                if is_x {
                    i += 1;
                    inversions += ys_seen;
                } else {
                    j += 1;
                    ys_seen += 1;
                }
                tx.push(i);
                ty.push(j);
            }
            out.push((tx, ty, if inversions % 2 == 0 { 1 } else { -1 }));
            return;
        }
        if a > 0 {
            steps.push(true);
            rec(a - 1, b, steps, out);
            steps.pop();
        }
        if b > 0 {
            steps.push(false);
            rec(a, b - 1, steps, out);
            steps.pop();
        }
    }
    rec(a, b, &mut steps, &mut out);
    out
}

fn enumerate_power(t: &SimplexTable, n: usize, budget: Option<usize>) -> Result<Vec<Key>> {
    let mut out = Vec::new();
    let full = full_mask(t.q);
    let masks: Vec<Mask> = t.nonbase.iter().map(|&i| t.mask(i)).collect();
    let mut coords = vec![0u16; n];
    fn rec(
        t: &SimplexTable,
        masks: &[Mask],
        depth: usize,
        and: Mask,
        coords: &mut Vec<u16>,
        out: &mut Vec<Key>,
        budget: Option<usize>,
    ) -> bool {
        if depth == coords.len() {
            if and == 0 {
                out.push(pack(coords));
                if let Some(b) = budget {
                    if out.len() > b {
                        return false;
                    }
                }
            }
            return true;
        }
        for (k, &i) in t.nonbase.iter().enumerate() {
            coords[depth] = i;
            if !rec(t, masks, depth + 1, and & masks[k], coords, out, budget) {
                return false;
            }
        }
        true
    }
    if !rec(t, &masks, 0, full, &mut coords, &mut out, budget) {
        return Err(Error::BudgetExceeded(format!(
            "power {n} in dimension {} exceeds the basis budget",
            t.q
        )));
    }
    out.sort_unstable_by_key(|k| unpack(*k, n));
    Ok(out)
}

/// Betti numbers by dimension of a chain complex, for reporting.
pub fn betti_numbers(c: &ChainComplex) -> BTreeMap<i64, usize> {
    c.degrees()
        .map(|d| (d, c.homology_rank(d).expect("degree in range")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_round_trip() {
        for q in 0..6 {
            for m in 0..(1u32 << q) {
                assert_eq!(mask_of(&theta(m, q)), m);
            }
        }
    }

    #[test]
    fn sphere_structure() {
        let s2 = SimplicialSpace::sphere(2).unwrap();
        assert_eq!(s2.nondegenerate(0).len(), 1);
        assert_eq!(s2.nondegenerate(2).len(), 1);
        assert!(SimplicialSpace::sphere(1).is_err());
        let s3 = SimplicialSpace::sphere(3).unwrap();
        for q in 3..8 {
            let binom = (q * (q - 1) * (q - 2)) / 6;
            assert_eq!(s3.simplices(q).len(), 1 + binom);
        }
    }

    #[test]
    fn faces_of_degenerate_simplices() {
        let s2 = SimplicialSpace::sphere(2).unwrap();
        let x = Simplex::nondegenerate(1);
        let sx = s2.degeneracy(x, 2, 0);
        // d_0 s_0 = d_1 s_0 = id, d_2 s_0 = s_0 d_1
        assert_eq!(s2.face(sx, 3, 0), x);
        assert_eq!(s2.face(sx, 3, 1), x);
        let base1 = Simplex { cell: 0, mask: 1 };
        assert_eq!(s2.face(x, 2, 1), base1);
        assert_eq!(s2.face(sx, 3, 3), s2.degeneracy(base1, 1, 0));
    }

    #[test]
    fn expressions_and_json() {
        let w = SimplicialSpace::parse_expression("S2 v S2").unwrap();
        assert_eq!(w.nondegenerate(2).len(), 2);
        let p = SimplicialSpace::parse_expression("S2 x pt").unwrap();
        assert_eq!(p.cells().len(), 2);
        let round = SimplicialSpace::from_json(&w.to_json()).unwrap();
        assert_eq!(round.cells(), w.cells());
        assert!(SimplicialSpace::parse_expression("S2 v").is_err());
        assert!(SimplicialSpace::parse_expression("S1").is_err());
        let bad = r#"{"vertices":1,"cells":[{"id":"a","dim":1,"faces":[{"cell":"*"},{"cell":"*"}]}]}"#;
        assert!(SimplicialSpace::from_json(bad).is_err());
    }

    #[test]
    fn product_is_reduced_and_has_cells() {
        let p = SimplicialSpace::parse_expression("S2 x S2").unwrap();
        assert!(p.nondegenerate(1).is_empty());
        // nondegenerate simplices of the product in dimension 4: (s_i s_j x, s_k s_l y) pairs
        assert_eq!(p.nondegenerate(4).len(), 6);
        let c = p.normalized_chains(4);
        assert_eq!(betti_numbers(&c).into_iter().collect::<Vec<_>>(), vec![(0, 1), (1, 0), (2, 2), (3, 0), (4, 1)]);
    }

    #[test]
    fn shuffle_path_counts() {
        assert_eq!(shuffle_paths(2, 2).len(), 6);
        assert_eq!(shuffle_paths(0, 3).len(), 1);
        let signs: i64 = shuffle_paths(1, 1).iter().map(|p| p.2).sum();
        assert_eq!(signs, 0);
    }

    fn s2_tables(q_max: usize) -> Arc<SpaceTables> {
        SpaceTables::new(&SimplicialSpace::sphere(2).unwrap(), q_max).unwrap()
    }

    #[test]
    fn relative_chains_of_sphere_powers() {
        let t = s2_tables(6);
        for (n, top) in [(1usize, 2i64), (2, 4), (3, 6)] {
            let c = PowerChains::new(&t, n, None).unwrap().to_chain_complex();
            for (d, r) in c.betti() {
                assert_eq!(r, usize::from(d == top), "n={n} d={d}");
            }
        }
        let c3 = PowerChains::new(&t, 3, None).unwrap();
        assert_eq!((2..=6).map(|q| c3.dim(q)).collect::<Vec<_>>(), vec![1, 24, 114, 180, 90]);
    }

    #[test]
    fn shuffle_map_is_a_chain_map() {
        let t = s2_tables(6);
        let c1 = PowerChains::new(&t, 1, None).unwrap();
        let c2 = PowerChains::new(&t, 2, None).unwrap();
        let c3 = PowerChains::new(&t, 3, None).unwrap();
        for a in 2..=3 {
            for b in 2..=(6 - a) {
                for x in 0..c1.dim(a) as u32 {
                    for y in 0..c2.dim(b) as u32 {
                        let lhs = c3.boundary_matrix(a + b).apply(&c1.ez_pair(&c2, &c3, a, x, b, y));
                        let mut rhs = Vec::new();
                        for (fx, cx) in c1.boundary_column(a, x) {
                            for (k, c) in c1.ez_pair(&c2, &c3, a - 1, fx, b, y) {
                                rhs.push((k, c * cx));
                            }
                        }
                        let sign = if a % 2 == 0 { 1 } else { -1 };
                        for (fy, cy) in c2.boundary_column(b, y) {
                            for (k, c) in c1.ez_pair(&c2, &c3, a, x, b - 1, fy) {
                                rhs.push((k, sign * c * cy));
                            }
                        }
                        assert_eq!(lhs, normalize_z(rhs), "a={a} b={b}");
                    }
                }
            }
        }
    }

    #[test]
    fn shuffle_map_is_graded_commutative() {
        let t = s2_tables(6);
        let c1 = PowerChains::new(&t, 1, None).unwrap();
        let c2 = PowerChains::new(&t, 2, None).unwrap();
        let c3 = PowerChains::new(&t, 3, None).unwrap();
        let swap = crate::fincat::block_swap(1, 2);
        for a in 2..=3 {
            for b in 2..=(6 - a) {
                for x in 0..c1.dim(a) as u32 {
                    for y in 0..c2.dim(b) as u32 {
                        let v: Vec<(u32, i64)> = c1
                            .ez_pair(&c2, &c3, a, x, b, y)
                            .into_iter()
                            .map(|(k, c)| (c3.pullback_index(&swap, &c3, a + b, k), c))
                            .collect();
                        let sign = if (a * b) % 2 == 0 { 1 } else { -1 };
                        let w: Vec<(u32, i64)> =
                            c2.ez_pair(&c1, &c3, b, y, a, x).into_iter().map(|(k, c)| (k, sign * c)).collect();
                        assert_eq!(normalize_z(v), normalize_z(w));
                    }
                }
            }
        }
    }

    #[test]
    fn shuffle_map_is_associative() {
        let t = s2_tables(6);
        let c1 = PowerChains::new(&t, 1, None).unwrap();
        let c2 = PowerChains::new(&t, 2, None).unwrap();
        let c3 = PowerChains::new(&t, 3, None).unwrap();
        for (a, b, c) in [(2, 2, 2)] {
            for x in 0..c1.dim(a) as u32 {
                for y in 0..c1.dim(b) as u32 {
                    for z in 0..c1.dim(c) as u32 {
                        let mut left = Vec::new();
                        for (k, s) in c1.ez_pair(&c1, &c2, a, x, b, y) {
                            for (m, r) in c2.ez_pair(&c1, &c3, a + b, k, c, z) {
                                left.push((m, s * r));
                            }
                        }
                        let mut right = Vec::new();
                        for (k, s) in c1.ez_pair(&c1, &c2, b, y, c, z) {
                            for (m, r) in c1.ez_pair(&c2, &c3, a, x, b + c, k) {
                                right.push((m, s * r));
                            }
                        }
                        assert_eq!(normalize_z(left), normalize_z(right));
                    }
                }
            }
        }
    }
}
