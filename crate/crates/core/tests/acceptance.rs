//! Acceptance suite: one line per criterion, then a single assertion that
//! all of them passed.

mod common;

use std::time::Instant;

use cobarlie::bar::{compare, CDGAlgebra, QBar};
use cobarlie::dgl::{CobarAlgebra, CobarLie};
use cobarlie::fincat::{self, DMorphism};
use cobarlie::freelie;
use cobarlie::homalg::lemma_pq;
use cobarlie::rational::q;
use cobarlie::simplicial::SimplicialSpace;
use common::{cellular_product, power, skeletal, tables, ShuffleMap};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn space(expr: &str) -> SimplicialSpace {
    SimplicialSpace::parse_expression(expr).expect("space expression")
}

fn idempotents() -> Outcome {
    for n in 1..=6 {
        for (name, x) in [("s", fincat::s_element(n).map_err(err)?), ("w", fincat::w_element(n).map_err(err)?)] {
            let sq = x.multiply(&x).map_err(err)?;
            ensure(sq == x.scale(&q(n as i64)), format!("{name}_{n}^2 ≠ {n} {name}_{n}"))?;
        }
    }
    Ok("s_n^2 = n s_n and w_n^2 = n w_n for n ≤ 6".into())
}

fn complex_identity() -> Outcome {
    for n in 1..=6 {
        let ff = fincat::cobar_differential(n)
            .and_then(|f| f.compose(&fincat::cobar_differential(n + 1)?))
            .map_err(err)?;
        ensure(ff.is_zero(), format!("f_{n} f_{} ≠ 0", n + 1))?;
    }
    Ok("f_n f_{n+1} = 0 for n ≤ 6".into())
}

fn leibniz_in_d() -> Outcome {
    let mut count = 0;
    for total in 2..=6 {
        for p in 1..total {
            let qq = total - p;
            let f = |n| fincat::cobar_differential(n).map_err(err);
            let left = f(p)?.disjoint_union(&DMorphism::identity(qq));
            let right = DMorphism::identity(p)
                .disjoint_union(&f(qq)?)
                .scale(&q(if p % 2 == 0 { 1 } else { -1 }));
            ensure(left.add(&right).map_err(err)? == f(total)?, format!("fails at p={p}, q={qq}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs with p+q ≤ 6"))
}

fn phi_psi() -> Outcome {
    for n in 1..=4 {
        fincat::phi(n).map_err(err)?;
    }
    let mut pairs = 0;
    for total in 2..=5 {
        for p in 1..total {
            fincat::psi(p, total - p).map_err(err)?;
            pairs += 1;
        }
    }
    Ok(format!("phi_n for n ≤ 4 and psi_(p,q) for {pairs} pairs with p+q ≤ 5"))
}

fn ez_axioms() -> Outcome {
    let mut checked = Vec::new();
    for sphere in ["S2", "S3"] {
        let t = tables(sphere, 6);
        let c: Vec<_> = (0..=3).map(|n| power(&t, n)).collect();
        // unit: the empty tuple is a two-sided unit
        for b in 0..=5 {
            for y in 0..c[2].dim(b) as u32 {
                ensure(c[0].ez_pair(&c[2], &c[2], 0, 0, b, y) == vec![(y, 1)], "left unit")?;
                ensure(c[2].ez_pair(&c[0], &c[2], b, y, 0, 0) == vec![(y, 1)], "right unit")?;
            }
        }
        // commutativity: τ^* EZ(x, y) = (−1)^{ab} EZ(y, x) for p = 1, q = 2
        let swap = fincat::block_swap(1, 2);
        for a in 0..=5 {
            for b in 0..=5 - a {
                for x in 0..c[1].dim(a) as u32 {
                    for y in 0..c[2].dim(b) as u32 {
                        let mut v: Vec<(u32, i64)> = c[1]
                            .ez_pair(&c[2], &c[3], a, x, b, y)
                            .into_iter()
                            .map(|(k, s)| (c[3].pullback_index(&swap, &c[3], a + b, k), s))
                            .collect();
                        v.sort_unstable();
                        let sign = if a * b % 2 == 0 { 1 } else { -1 };
                        let mut w: Vec<(u32, i64)> =
                            c[2].ez_pair(&c[1], &c[3], b, y, a, x).into_iter().map(|(k, s)| (k, sign * s)).collect();
                        w.sort_unstable();
                        ensure(v == w, format!("{sphere}: commutativity at a={a}, b={b}"))?;
                    }
                }
            }
        }
        // associativity on triples of single factors
        for a in 0..=5 {
            for b in 0..=5 - a {
                for cdeg in 0..=5 - a - b {
                    for x in 0..c[1].dim(a) as u32 {
                        for y in 0..c[1].dim(b) as u32 {
                            for z in 0..c[1].dim(cdeg) as u32 {
                                let mut left = std::collections::BTreeMap::new();
                                for (k, s) in c[1].ez_pair(&c[1], &c[2], a, x, b, y) {
                                    for (m, r) in c[2].ez_pair(&c[1], &c[3], a + b, k, cdeg, z) {
                                        *left.entry(m).or_insert(0) += s * r;
                                    }
                                }
                                let mut right = std::collections::BTreeMap::new();
                                for (k, s) in c[1].ez_pair(&c[1], &c[2], b, y, cdeg, z) {
                                    for (m, r) in c[1].ez_pair(&c[2], &c[3], a, x, b + cdeg, k) {
                                        *right.entry(m).or_insert(0) += s * r;
                                    }
                                }
                                left.retain(|_, v| *v != 0);
                                right.retain(|_, v| *v != 0);
                                ensure(left == right, format!("{sphere}: associativity at ({a},{b},{cdeg})"))?;
                            }
                        }
                    }
                }
            }
        }
        // Σ_2 × Σ_1 equivariance
        for sigma in fincat::all_permutations(2) {
            let st = sigma.disjoint_union(&fincat::SetMap::identity(1));
            for a in 0..=5 {
                for b in 0..=5 - a {
                    for x in 0..c[2].dim(a) as u32 {
                        for y in 0..c[1].dim(b) as u32 {
                            let sx = c[2].pullback_index(&sigma, &c[2], a, x);
                            let mut lhs = c[2].ez_pair(&c[1], &c[3], a, sx, b, y);
                            lhs.sort_unstable();
                            let mut rhs: Vec<(u32, i64)> = c[2]
                                .ez_pair(&c[1], &c[3], a, x, b, y)
                                .into_iter()
                                .map(|(k, s)| (c[3].pullback_index(&st, &c[3], a + b, k), s))
                                .collect();
                            rhs.sort_unstable();
                            ensure(lhs == rhs, format!("{sphere}: equivariance at a={a}, b={b}"))?;
                        }
                    }
                }
            }
        }
        // quasi-isomorphism through degree 5
        for (p, qq) in [(1, 1), (1, 2), (2, 1)] {
            let m = ShuffleMap::new(&c[p], &c[qq], &c[p + qq]);
            ensure(m.is_quasi_iso_through(5), format!("{sphere}: not a quasi-isomorphism for ({p},{qq})"))?;
        }
        checked.push(sphere);
    }
    Ok(format!("unit, commutativity, associativity, equivariance, quasi-iso on {checked:?} through degree 5"))
}

fn dga_square() -> Outcome {
    let r = CobarAlgebra::build(&space("S2"), 4, 7, None).map_err(err)?;
    for (p, qq) in [(1, 1), (1, 2), (2, 1)] {
        if let Some(bad) = r.leibniz_check(p, qq).map_err(err)? {
            return Err(format!("square fails at (p,q)=({p},{qq}): {bad:?}"));
        }
    }
    Ok("Leibniz square exact on S2 for p+q ≤ 3, internal degree ≤ 7".into())
}

fn ranks_of(r: &std::collections::BTreeMap<i64, usize>) -> Vec<usize> {
    r.values().copied().collect()
}

fn sphere2() -> Outcome {
    let lie = CobarLie::build(&space("S2"), 4, 8, None).map_err(err)?;
    let report = lie.report(3).map_err(err)?;
    ensure(ranks_of(&report.ranks) == vec![1, 1, 0], format!("ranks {:?}", report.ranks))?;
    let square = report
        .brackets
        .iter()
        .find(|b| b.s == 1 && b.t == 1)
        .ok_or("no [g1, g1] table")?;
    ensure(!square.is_zero(), "Whitehead square vanishes")?;
    ensure(report.certificates_pass(), format!("certificates {:?}", report.certificates))?;
    Ok(format!(
        "ranks (1,1,0); [g1,g1] = {} g2; all certificates pass",
        cobarlie::rational::to_string(&square.matrix[0][0][0])
    ))
}

fn sphere3() -> Outcome {
    let lie = CobarLie::build(&space("S3"), 3, 9, None).map_err(err)?;
    let r = lie.homotopy_ranks(4).map_err(err)?;
    ensure(ranks_of(&r) == vec![0, 1, 0, 0], format!("ranks {r:?}"))?;
    Ok("ranks (0,1,0,0)".into())
}

fn wedge() -> Outcome {
    let lie = CobarLie::build(&space("S2vS2"), 3, 6, None).map_err(err)?;
    let r = lie.homotopy_ranks(2).map_err(err)?;
    let oracle = vec![
        freelie::lie_rank(1, 2, true).map_err(err)?,
        freelie::lie_rank(2, 2, true).map_err(err)?,
    ];
    ensure(ranks_of(&r) == oracle, format!("ranks {r:?}, free Lie oracle {oracle:?}"))?;
    ensure(oracle == vec![2, 3], "oracle")?;
    Ok("ranks (2,3) = free Lie algebra on two odd generators".into())
}

fn bar_cobar() -> Outcome {
    let mut lines = Vec::new();
    for (sp, alg, n, t) in [("S2", "H(S2)", 4, 3), ("S3", "H(S3)", 3, 4), ("S2vS2", "H(S2vS2)", 3, 2)] {
        let a = CDGAlgebra::builtin(alg).map_err(err)?;
        let c = compare(&space(sp), &a, n, t, None, 0).map_err(err)?;
        ensure(c.ranks_match(), format!("{sp}: bar {:?} vs cobar {:?}", c.bar_ranks, c.cobar_ranks))?;
        ensure(c.structure_matches(), format!("{sp}: cobracket/bracket ranks {:?}", c.structure_ranks))?;
        lines.push(format!("{sp} {:?}", ranks_of(&c.bar_ranks)));
    }
    Ok(lines.join(", "))
}

fn dual_projector() -> Outcome {
    let a = CDGAlgebra::builtin("H(S2)").map_err(err)?;
    let qb = QBar::new(&a, 4).map_err(err)?;
    for n in 1..=4 {
        let checks: Vec<_> = qb.projector_checks.iter().filter(|c| c.weight == n).collect();
        ensure(!checks.is_empty() && checks.iter().all(|c| c.agrees), format!("weight {n}"))?;
    }
    let dims: Vec<usize> = (1..=4)
        .map(|n| qb.projector_checks.iter().filter(|c| c.weight == n).map(|c| c.rank_projector).sum())
        .collect();
    Ok(format!("image of w_n = shuffle cokernel for n ≤ 4, dims {dims:?}"))
}

fn homological_lemma() -> Outcome {
    let f = skeletal(&space("S2"));
    let l = lemma_pq(&f).map_err(err)?;
    ensure(l.all_hold(), "conclusions fail on S2")?;
    // a filtration with nontrivial P and Q: cells of S2 × S2
    let prod = space("S2xS2");
    let g = cellular_product(&prod, &|part| if part.contains("e2") { 2 } else { 0 });
    let m = lemma_pq(&g).map_err(err)?;
    ensure(m.all_hold(), "conclusions fail on S2 x S2")?;
    let dims: Vec<usize> = m.quotient.degrees().map(|d| m.quotient.dim(d)).collect();
    Ok(format!("hypotheses hold, P → A and P → P/Q quasi-isomorphisms; P/Q of S2xS2 has dims {dims:?}"))
}

fn truncation_stability() -> Outcome {
    let mut all = Vec::new();
    for n in 3..=5 {
        let lie = CobarLie::build(&space("S2"), n, n + 3, None).map_err(err)?;
        all.push(ranks_of(&lie.homotopy_ranks(2).map_err(err)?));
    }
    ensure(all.iter().all(|r| *r == all[0]), format!("ranks differ: {all:?}"))?;
    Ok(format!("ranks at t ≤ 2 for N = 3, 4, 5: {all:?}"))
}

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        ("group-ring idempotents", idempotents),
        ("f_n f_{n+1} = 0", complex_identity),
        ("Leibniz identity in D", leibniz_in_d),
        ("phi and psi diagrams", phi_psi),
        ("shuffle map axioms", ez_axioms),
        ("d.g.a. square on S2", dga_square),
        ("homotopy of S2", sphere2),
        ("homotopy of S3", sphere3),
        ("homotopy of S2 v S2", wedge),
        ("bar/cobar comparison", bar_cobar),
        ("dual projector = shuffle cokernel", dual_projector),
        ("homological algebra lemma", homological_lemma),
        ("truncation stability", truncation_stability),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.1}s] {name}: {detail}", i + 1),
            Err(why) => {
                println!("criterion {:>2} FAIL [{secs:.1}s] {name}: {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
