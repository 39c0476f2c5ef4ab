//! Acceptance criteria, one PASS/FAIL line each. Run with `--nocapture` to
//! see the lines; the test fails if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use pd5::abgroup::{direct_sum, uct_cohomology, Coefficients, FgAbGroup, GradedGroup};
use pd5::blocks::{stable_cohomotopy_block, Block};
use pd5::invariants::{
    classify_spin, generalized_cohomology, pi4, pi4_mod_k, sq2_onto, sq_module, BlockTheory,
};
use pd5::manifolds::{builtin, InputData};
use pd5::oracle::{
    attachment_preserves_homology, complex_of_result, exhaustive_confluence, move_preserves_homology,
    random_instance, small_w4_shapes, verify_split, Bounds, Instance,
};
use pd5::splitter::{build_w4, normalize_coeffs5, split, HomologyTable, Move5, SplitResult};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn run(d: &InputData) -> SplitResult {
    split(&d.homology, &d.phi4, &d.phi5).expect("builtin data is valid")
}

fn library() -> Vec<InputData> {
    let mut names: Vec<String> = ["X0", "X-1", "Xinf", "Minf", "M'inf"].iter().map(|s| s.to_string()).collect();
    for k in 2..=12 {
        names.push(format!("M{k}"));
        names.push(format!("M'{k}"));
    }
    for k in 1..=5 {
        names.push(format!("X{k}"));
        names.push(format!("X'{k}"));
    }
    names.iter().map(|n| builtin(n).unwrap()).collect()
}

fn corpus(n: usize, seed: u64) -> Vec<Instance> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n).map(|_| random_instance(&mut rng, &Bounds::default())).collect()
}

/// Reduced homology of `X` from the oracle's complex for `Sigma X`.
fn oracle_homology_of_x(s: &SplitResult) -> GradedGroup {
    complex_of_result(s).homology().shifted(-1)
}

fn z2() -> FgAbGroup {
    FgAbGroup::cyclic(2u32)
}

fn c1_wu() -> Result<(), String> {
    let s = run(&builtin("X-1").unwrap());
    let f = s.f.ok_or("no f")?;
    check(s.wedge.is_empty() && s.s2_count == 0 && !s.top_sphere, format!("extra summands: {s}"))?;
    check((f.family, f.x, f.y, f.z, f.r) == (1, 0, 1, 0, Some(1)), format!("f = {f}"))?;
    let h = complex_of_result(&s).homology();
    let want = GradedGroup::from_pairs([(3, z2()), (6, FgAbGroup::free(1))]);
    check(h == want, format!("oracle homology {h}"))
}

fn c2_xinf() -> Result<(), String> {
    let s = run(&builtin("Xinf").unwrap());
    let f = s.f.ok_or("no f")?;
    let mut rest = s.wedge.clone();
    rest.n3 -= 1;
    check(s.wedge.n3 == 1 && rest.is_empty() && s.s2_count == 0, format!("wedge {}", s.wedge))?;
    check((f.family, f.x, f.y, f.z) == (1, 1, 0, 0) && f.expression() == "eta", format!("f = {f}"))
}

fn c3_xprime() -> Result<(), String> {
    for k in 1..=8 {
        let s = run(&builtin(&format!("X'{k}")).unwrap());
        let f = s.f.ok_or(format!("X'{k}: no f"))?;
        check((f.family, f.y, f.r) == (4, 1, Some(k)), format!("X'{k}: f = {f}"))?;
    }
    Ok(())
}

fn c4_spheres() -> Result<(), String> {
    // S_g x Y with Y a connected sum of k copies of S^1 x S^2.
    for g in 0..=3usize {
        for k in 0..=3usize {
            let h = HomologyTable::new(2 * g + k, 1 + 2 * g * k + k, vec![]).unwrap();
            let d = InputData::trivial(h.clone(), "product").unwrap();
            let s = run(&d);
            check(s.is_wedge_of_spheres(), format!("g={g} k={k}: {s}"))?;
            check(verify_split(&h, &s).pass, format!("g={g} k={k}: oracle"))?;
        }
    }
    Ok(())
}

fn expected_pi4(h: &HomologyTable, s: &SplitResult) -> FgAbGroup {
    let base = FgAbGroup::free(h.m);
    if classify_spin(s).spin {
        direct_sum([&base, &z2()])
    } else {
        base
    }
}

fn c5_pi4() -> Result<(), String> {
    for d in library() {
        let s = run(&d);
        check(pi4(&s, &d.homology) == expected_pi4(&d.homology, &s), d.provenance.to_string())?;
        if let Some(spin) = d.declared.spin {
            check(classify_spin(&s).spin == spin, format!("{}: declared spin {spin}", d.provenance))?;
        }
    }
    for inst in corpus(100, 5) {
        let s = split(&inst.homology, &inst.phi4, &inst.phi5).map_err(|e| e.to_string())?;
        check(pi4(&s, &inst.homology) == expected_pi4(&inst.homology, &s), format!("{inst:?}"))?;
    }
    Ok(())
}

fn c6_block_table() -> Result<(), String> {
    let cases: Vec<(Block, FgAbGroup)> = [
        (Block::Sphere(4), FgAbGroup::free(1)),
        (Block::Sphere(5), z2()),
        (Block::SigmaCP2, FgAbGroup::zero()),
    ]
    .into_iter()
    .chain([2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27].map(|t| (Block::Moore(t), FgAbGroup::cyclic(t))))
    .chain((1..=6u32).map(|r| (Block::SigmaCP2Tw(r), FgAbGroup::cyclic(1u64 << (r + 1)))))
    .collect();
    for (b, want) in cases {
        let got = stable_cohomotopy_block(&b, 3).map_err(|e| e.to_string())?;
        check(got == want, format!("{}: {got} != {want}", b.desuspended_name()))?;
    }
    Ok(())
}

fn c7_pi4_mod_k() -> Result<(), String> {
    for d in library() {
        let s = run(&d);
        let hx = oracle_homology_of_x(&s);
        let t = sq_module(&s);
        let quotient = t.dim(5) - t.sq2(3).rank();
        for k in [2u64, 3, 4, 6] {
            let h4 = uct_cohomology(&hx, &Coefficients::Mod(k)).get(4);
            let want = if k % 2 == 1 || quotient == 0 { h4 } else { direct_sum([&h4, &z2()]) };
            let got = pi4_mod_k(&s, &d.homology, k).map_err(|e| e.to_string())?;
            check(got == want, format!("{} k={k}: {got} != {want}", d.provenance))?;
        }
    }
    Ok(())
}

fn c8_oracle() -> Result<(), String> {
    for inst in corpus(500, 8) {
        let s = split(&inst.homology, &inst.phi4, &inst.phi5).map_err(|e| e.to_string())?;
        let v = verify_split(&inst.homology, &s);
        check(v.pass, format!("{inst:?}: {v:?}"))?;
        let (_, w3, stages) = build_w4(&inst.homology, &inst.phi4).unwrap();
        let mut cur = w3.clone();
        for (rec, next) in inst.phi4.iter().zip(&stages) {
            check(attachment_preserves_homology(&cur, rec).unwrap(), format!("{inst:?}: 5-cell"))?;
            cur = next.clone();
        }
        let c = normalize_coeffs5(&cur, &inst.phi5).unwrap();
        for mv in Move5::all_legal(&cur) {
            check(move_preserves_homology(&cur, &c, &mv).unwrap(), format!("{inst:?}: {mv}"))?;
        }
    }
    Ok(())
}

fn c9_confluence() -> Result<(), String> {
    let shapes = small_w4_shapes(2, 3, 1);
    for w in &shapes {
        let bad = exhaustive_confluence(w, 3);
        check(bad.is_empty(), format!("{w}: {:?}", bad.first()))?;
    }
    Ok(())
}

fn c10_cross_paths() -> Result<(), String> {
    for inst in corpus(500, 8) {
        let s = split(&inst.homology, &inst.phi4, &inst.phi5).map_err(|e| e.to_string())?;
        check(classify_spin(&s).spin == !sq2_onto(&sq_module(&s)), format!("{inst:?}: spin"))?;
        let coh = generalized_cohomology(&s, &BlockTheory::integral()).map_err(|e| e.to_string())?;
        let uct = uct_cohomology(&oracle_homology_of_x(&s), &Coefficients::Integers);
        for d in 0..=6 {
            check(coh.get(d) == uct.get(d), format!("{inst:?}: H^{d} {} != {}", coh.get(d), uct.get(d)))?;
        }
    }
    Ok(())
}

fn c11_fmap_constraint() -> Result<(), String> {
    for inst in corpus(500, 8) {
        let s = split(&inst.homology, &inst.phi4, &inst.phi5).map_err(|e| e.to_string())?;
        if let Some(f) = s.f {
            if f.y == 1 && f.z == 1 {
                check(f.s < f.r, format!("{inst:?}: {f}"))?;
            }
        }
    }
    Ok(())
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

type Criterion = (&'static str, fn() -> Result<(), String>);

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("1 Wu manifold splits as SigmaC_f with f = xi_1", c1_wu),
        ("2 Xinf splits as S^3 v SigmaC_eta", c2_xinf),
        ("3 X'k gives family (4) with y = 1, r = k", c3_xprime),
        ("4 trivial torsion-free data splits into spheres", c4_spheres),
        ("5 pi^4 spin/nonspin dichotomy", c5_pi4),
        ("6 pi^3 block values", c6_block_table),
        ("7 pi^4 with Z/k coefficients", c7_pi4_mod_k),
        ("8 oracle invariance on 500 random inputs", c8_oracle),
        ("9 exhaustive confluence, scripts of length <= 3", c9_confluence),
        ("10 cross-path agreement", c10_cross_paths),
        ("11 y = z = 1 forces s < r", c11_fmap_constraint),
    ];
    let mut failures = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("PASS  {name}  ({ms} ms)"),
            Err(e) => {
                failures += 1;
                println!("FAIL  {name}  ({ms} ms): {e}");
            }
        }
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
