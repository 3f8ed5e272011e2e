#![allow(dead_code)]

use std::sync::Arc;

use cobarlie::homalg::{ChainComplex, FilteredComplex, QMatrix};
use cobarlie::simplicial::{PowerChains, SimplicialSpace, SpaceTables};

pub fn tables(expr: &str, q_max: usize) -> Arc<SpaceTables> {
    SpaceTables::new(&SimplicialSpace::parse_expression(expr).unwrap(), q_max).unwrap()
}

pub fn power(t: &Arc<SpaceTables>, n: usize) -> PowerChains {
    PowerChains::new(t, n, None).unwrap()
}

/// The shuffle map `C(X^∧p) ⊗ C(X^∧q) → C(X^∧(p+q))` as a chain map out of
/// the tensor product complex, in degrees up to the target's `q_max`.
pub struct ShuffleMap {
    pub source: ChainComplex,
    pub target: ChainComplex,
    pub matrices: Vec<QMatrix>,
}

impl ShuffleMap {
    pub fn new(left: &PowerChains, right: &PowerChains, target: &PowerChains) -> Self {
        let (cl, cr) = (left.to_chain_complex(), right.to_chain_complex());
        let (source, layout) = cl.tensor(&cr);
        let q_max = target.q_max() as i64;
        let matrices = (0..=q_max)
            .map(|d| {
                let mut cols = vec![Vec::new(); layout.dim(d)];
                for a in 0..=d {
                    let b = d - a;
                    if a > left.q_max() as i64 || b > right.q_max() as i64 {
                        continue;
                    }
                    for x in 0..left.dim(a as usize) {
                        for y in 0..right.dim(b as usize) {
                            let col = left.ez_pair(right, target, a as usize, x as u32, b as usize, y as u32);
                            cols[layout.index_in(a, x, y, d)] = col
                                .into_iter()
                                .map(|(k, c)| (k as usize, cobarlie::rational::q(c)))
                                .collect();
                        }
                    }
                }
                QMatrix::from_columns(target.dim(d as usize), cols)
            })
            .collect();
        ShuffleMap {
            source,
            target: target.to_chain_complex(),
            matrices,
        }
    }

    pub fn at(&self, d: i64) -> QMatrix {
        match self.matrices.get(d as usize) {
            Some(m) if d >= 0 => m.clone(),
            _ => QMatrix::zeros(self.target.dim(d), self.source.dim(d)),
        }
    }

    /// Chain-map property and homology isomorphism in degrees `0..=top`.
    pub fn is_quasi_iso_through(&self, top: i64) -> bool {
        for d in 1..=top {
            let lhs = self.target.boundary(d).mul(&self.at(d)).unwrap();
            let rhs = self.at(d - 1).mul(&self.source.boundary(d)).unwrap();
            if lhs != rhs {
                return false;
            }
        }
        self.source
            .is_quasi_isomorphism(&self.target, &|d| self.at(d), 0..=top)
            .unwrap()
    }
}

/// Normalized chains of a space with the skeletal filtration: a simplex
/// sits at the level of its dimension.
pub fn skeletal(space: &SimplicialSpace) -> FilteredComplex {
    let c = space.normalized_chains(space.max_dim());
    let levels = c.degrees().map(|d| vec![d; c.dim(d)]).collect();
    FilteredComplex::new(c, levels).unwrap()
}

/// Normalized chains of a product of spheres filtered by the product cell
/// a simplex lies in: the sum of the dimensions of its factor cells.
pub fn cellular_product(space: &SimplicialSpace, factor_dim: &dyn Fn(&str) -> i64) -> FilteredComplex {
    let c = space.normalized_chains(space.max_dim());
    let levels = c
        .degrees()
        .map(|d| {
            space
                .nondegenerate(d as usize)
                .iter()
                .map(|&cell| {
                    space.cells()[cell as usize]
                        .id
                        .split('|')
                        .map(factor_dim)
                        .sum()
                })
                .collect()
        })
        .collect();
    FilteredComplex::new(c, levels).unwrap()
}
