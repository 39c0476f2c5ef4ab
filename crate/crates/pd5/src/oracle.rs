//! Independent checks on the pipeline: every claim is reassembled as a
//! cellular chain complex and its homology recomputed by Smith normal form.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use rand::Rng;
use serde::Serialize;

use crate::abgroup::{FgAbGroup, GradedGroup};
use crate::blocks::{block_chain_complex, Block, ChainComplex};
use crate::splitter::{
    apply_move, attach_5cell, build_w4, normalize_coeffs5, reduce_on_w4, split, Coeffs4, Coeffs5,
    HomologyTable, Move5, SplitError, SplitResult, WedgeClass,
};

fn sum_of(blocks: &[Block]) -> ChainComplex {
    blocks.iter().fold(ChainComplex::new(), |acc, b| acc.direct_sum(&block_chain_complex(b)))
}

pub fn complex_of_wedge(w: &WedgeClass) -> ChainComplex {
    sum_of(&w.blocks())
}

/// Mapping cone of a map `S^{d-1} -> W` that is zero on homology: the new
/// `d`-cell has zero cellular boundary.
pub fn complex_of_cone(w: &WedgeClass, d: i32) -> ChainComplex {
    let mut c = complex_of_wedge(w);
    c.add_cell(d, &[]);
    c
}

pub fn complex_of_result(s: &SplitResult) -> ChainComplex {
    let mut c = sum_of(&s.free_blocks());
    if let Some(f) = &s.f {
        c = c.direct_sum(&sum_of(&f.target_blocks()));
        // Every component of f is torsion, so the top cell has zero boundary.
        c.add_cell(6, &[]);
    }
    c
}

/// Homology of `Sigma X` read off the input table.
pub fn expected_homology(h: &HomologyTable) -> GradedGroup {
    let mut orders: Vec<BigInt> = h.torsion.iter().map(|t| BigInt::from(*t)).collect();
    orders.extend(std::iter::repeat_n(BigInt::from(0), h.n));
    GradedGroup::from_pairs([
        (2, FgAbGroup::free(h.m)),
        (3, FgAbGroup::from_cyclic_orders(&orders)),
        (4, FgAbGroup::free(h.n)),
        (5, FgAbGroup::free(h.m)),
        (6, FgAbGroup::free(1)),
    ])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub first_mismatch: Option<i32>,
    pub expected: String,
    pub actual: String,
    pub boundary_ok: bool,
}

pub fn verify_split(h: &HomologyTable, s: &SplitResult) -> VerifyReport {
    let c = complex_of_result(s);
    let boundary_ok = c.boundary_squares_vanish();
    let expected = expected_homology(h);
    let actual = c.homology();
    let degrees: BTreeSet<i32> =
        expected.degrees().map(|(d, _)| *d).chain(actual.degrees().map(|(d, _)| *d)).collect();
    let first_mismatch = degrees.into_iter().find(|&d| expected.get(d) != actual.get(d));
    VerifyReport {
        pass: boundary_ok && first_mismatch.is_none(),
        first_mismatch,
        expected: expected.to_string(),
        actual: actual.to_string(),
        boundary_ok,
    }
}

/// Does a 5-cell attachment reproduce the homology of the mapping cone?
pub fn attachment_preserves_homology(w: &WedgeClass, c: &Coeffs4) -> Result<bool, SplitError> {
    let out = attach_5cell(w, c)?;
    Ok(complex_of_wedge(&out).homology() == complex_of_cone(w, 5).homology())
}

/// Homology of the 6-cell cone assembled from reduced data on `w4`.
pub fn reduced_cone_homology(w4: &WedgeClass, phi5: &Coeffs5) -> Result<GradedGroup, SplitError> {
    let (f, rest) = reduce_on_w4(w4, phi5)?;
    let mut c = complex_of_wedge(&rest);
    if let Some(f) = f {
        c = c.direct_sum(&sum_of(&f.target_blocks()));
    }
    c.add_cell(6, &[]);
    Ok(c.homology())
}

/// Apply a single move and check the reduced cone keeps the homology of the
/// unreduced cone on `w4`.
pub fn move_preserves_homology(w4: &WedgeClass, phi5: &Coeffs5, mv: &Move5) -> Result<bool, SplitError> {
    let moved = apply_move(w4, phi5, mv)?;
    let target = complex_of_cone(w4, 6).homology();
    Ok(reduced_cone_homology(w4, phi5)? == target && reduced_cone_homology(w4, &moved)? == target)
}

/// Scripted moves followed by reduction agree with direct reduction.
pub fn confluence_probe(
    h: &HomologyTable,
    phi4: &[Coeffs4],
    phi5: &Coeffs5,
    script: &[Move5],
) -> Result<bool, SplitError> {
    let direct = split(h, phi4, phi5)?;
    let (_, w3, stages) = build_w4(h, phi4)?;
    let w4 = stages.last().cloned().unwrap_or(w3);
    let mut c = normalize_coeffs5(&w4, phi5)?;
    for mv in script {
        c = apply_move(&w4, &c, mv)?;
    }
    let scripted = split(h, phi4, &c)?;
    Ok(scripted.normal_form() == direct.normal_form())
}

/// Same as `confluence_probe` but starting from a given `W4`.
pub fn confluence_probe_w4(w4: &WedgeClass, phi5: &Coeffs5, script: &[Move5]) -> Result<bool, SplitError> {
    let direct = reduce_on_w4(w4, phi5)?;
    let mut c = normalize_coeffs5(w4, phi5)?;
    for mv in script {
        c = apply_move(w4, &c, mv)?;
    }
    Ok(reduce_on_w4(w4, &c)? == direct)
}

/// Sizes for randomly generated inputs.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub max_m: usize,
    pub max_n: usize,
    pub max_torsion: usize,
    pub max_exponent: u32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_m: 3, max_n: 3, max_torsion: 4, max_exponent: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub homology: HomologyTable,
    pub phi4: Vec<Coeffs4>,
    pub phi5: Coeffs5,
}

fn bits<R: Rng>(rng: &mut R, n: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..=1)).collect()
}

/// A valid input whose records are generated against each stage's basis.
pub fn random_instance<R: Rng>(rng: &mut R, b: &Bounds) -> Instance {
    let m = rng.gen_range(0..=b.max_m);
    let n = rng.gen_range(0..=b.max_n);
    let k = rng.gen_range(0..=b.max_torsion);
    let torsion = (0..k)
        .map(|_| {
            let p = [2u64, 2, 3, 5][rng.gen_range(0..4)];
            p.pow(rng.gen_range(1..=b.max_exponent))
        })
        .collect();
    let homology = HomologyTable { m, n, torsion };
    let mut cur = crate::splitter::build_w3(&crate::splitter::build_w2(&homology).unwrap(), n);
    let mut phi4 = Vec::with_capacity(m);
    for _ in 0..m {
        // Bias toward zero records so every attachment case shows up.
        let rec = if rng.gen_bool(0.3) {
            Coeffs4::zeros(&cur)
        } else {
            Coeffs4 { x: bits(rng, cur.n3), y: bits(rng, cur.a()) }
        };
        cur = attach_5cell(&cur, &rec).unwrap();
        phi4.push(rec);
    }
    let y = cur.evens.iter().map(|&r| if r == 1 { rng.gen_range(0..=3) } else { rng.gen_range(0..=1) }).collect();
    let phi5 = Coeffs5 { x: bits(rng, cur.a() + cur.n3 + cur.n4), y, z: bits(rng, cur.c()) };
    Instance { homology, phi4, phi5 }
}

/// A random legal script of up to `len` moves on `w4`.
pub fn random_script<R: Rng>(rng: &mut R, w4: &WedgeClass, len: usize) -> Vec<Move5> {
    let legal = Move5::all_legal(w4);
    if legal.is_empty() {
        return Vec::new();
    }
    (0..rng.gen_range(0..=len)).map(|_| legal[rng.gen_range(0..legal.len())]).collect()
}

/// Every wedge with at most `max_a` even Moore slots (exponents up to
/// `max_r`), `n3, n4 <= 1`, and at most `max_c` twisted slots.
pub fn small_w4_shapes(max_a: usize, max_r: u32, max_c: usize) -> Vec<WedgeClass> {
    fn multisets(len: usize, max: u32) -> Vec<Vec<u32>> {
        if len == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for tail in multisets(len - 1, max) {
            let lo = tail.last().copied().unwrap_or(1);
            for r in lo..=max {
                let mut v = tail.clone();
                v.push(r);
                out.push(v);
            }
        }
        out
    }
    let mut out = Vec::new();
    for a in 0..=max_a {
        for evens in multisets(a, max_r) {
            for c in 0..=max_c {
                for tw in multisets(c, max_r + 1) {
                    for n3 in 0..=1 {
                        for n4 in 0..=1 {
                            out.push(WedgeClass {
                                n3,
                                n4,
                                evens: evens.clone(),
                                tw: tw.clone(),
                                ..Default::default()
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// All bit-valued 6-cell data on `w4`.
pub fn all_coeffs5(w4: &WedgeClass) -> Vec<Coeffs5> {
    let (nx, ny, nz) = (w4.a() + w4.n3 + w4.n4, w4.a(), w4.c());
    let total = nx + ny + nz;
    (0u32..1 << total)
        .map(|mask| {
            let bit = |i: usize| ((mask >> i) & 1) as u8;
            Coeffs5 {
                x: (0..nx).map(bit).collect(),
                y: (nx..nx + ny).map(bit).collect(),
                z: (nx + ny..total).map(bit).collect(),
            }
        })
        .collect()
}

/// Counterexamples to confluence among all data on `w4`: the endpoints of all
/// legal scripts of length `<= depth` are explored breadth first.
pub fn exhaustive_confluence(w4: &WedgeClass, depth: usize) -> Vec<(Coeffs5, Coeffs5)> {
    let moves = Move5::all_legal(w4);
    let mut bad = Vec::new();
    for start in all_coeffs5(w4) {
        let target = reduce_on_w4(w4, &start).expect("valid data");
        let mut seen = BTreeSet::new();
        seen.insert((start.x.clone(), start.y.clone(), start.z.clone()));
        let mut frontier = vec![start.clone()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for c in &frontier {
                for mv in &moves {
                    let d = apply_move(w4, c, mv).expect("legal move");
                    if seen.insert((d.x.clone(), d.y.clone(), d.z.clone())) {
                        if reduce_on_w4(w4, &d).expect("valid data") != target {
                            bad.push((start.clone(), d.clone()));
                        }
                        next.push(d);
                    }
                }
            }
            frontier = next;
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitter::{split, Coeffs5};
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn wu() -> (HomologyTable, SplitResult) {
        let h = HomologyTable::new(0, 0, vec![2]).unwrap();
        let s = split(&h, &[], &Coeffs5 { x: vec![0], y: vec![1], z: vec![] }).unwrap();
        (h, s)
    }

    #[test]
    fn result_complexes() {
        let h = HomologyTable::new(1, 0, vec![]).unwrap();
        let s = split(&h, &[Coeffs4::default()], &Coeffs5::default()).unwrap();
        let c = complex_of_result(&s);
        assert_eq!(c.rank(2), 1);

        let (_, s) = wu();
        let c = complex_of_result(&s);
        assert_eq!(c.degrees(), vec![3, 4, 6]);
        assert_eq!(c.boundary(4).get(0, 0), &BigInt::from(2));
        assert!(c.boundary(6).is_zero());
        let hom = c.homology();
        assert_eq!(hom.get(3), FgAbGroup::cyclic(2u32));
        assert_eq!(hom.get(6), FgAbGroup::free(1));
    }

    #[test]
    fn verify_reports() {
        let (h, s) = wu();
        assert!(verify_split(&h, &s).pass);
        let h = HomologyTable::new(0, 2, vec![]).unwrap();
        let mut s = split(&h, &[], &Coeffs5 { x: vec![0; 4], y: vec![], z: vec![] }).unwrap();
        assert!(verify_split(&h, &s).pass);
        s.wedge.n3 -= 1;
        let r = verify_split(&h, &s);
        assert!(!r.pass);
        assert_eq!(r.first_mismatch, Some(3));
    }

    #[test]
    fn small_confluence() {
        let w = WedgeClass { evens: vec![1, 2], tw: vec![2], ..Default::default() };
        assert!(exhaustive_confluence(&w, 3).is_empty());
        let h = HomologyTable::new(0, 0, vec![2, 4]).unwrap();
        let c = Coeffs5 { x: vec![0, 0], y: vec![1, 1], z: vec![] };
        assert!(confluence_probe(&h, &[], &c, &[]).unwrap());
        assert!(confluence_probe(&h, &[], &c, &[Move5::Y { from: 0, to: 1 }]).unwrap());
    }

    #[test]
    fn random_instances_verify() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, &Bounds::default());
            let s = split(&inst.homology, &inst.phi4, &inst.phi5).unwrap();
            assert!(verify_split(&inst.homology, &s).pass, "{inst:?}");
        }
    }
}
