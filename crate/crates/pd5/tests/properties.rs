use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use pd5::abgroup::{
    direct_sum, extensions_by_z2, group_from_presentation, kernel_to_z2, smith_normal_form, uct_cohomology,
    Coefficients, FgAbGroup, IntMatrix,
};
use pd5::blocks::{stable_cohomotopy_block, GeneratorSymbol};
use pd5::invariants::{classify_spin, generalized_cohomology, pi3, BlockTheory};
use pd5::manifolds::{builtin, connected_sum};
use pd5::oracle::{complex_of_result, confluence_probe, random_instance, random_script, verify_split, Bounds, Instance};
use pd5::splitter::{apply_move, build_w4, normalize_coeffs5, split, Move5};

fn instance(seed: u64) -> Instance {
    random_instance(&mut StdRng::seed_from_u64(seed), &Bounds::default())
}

/// Number of elements killed by `d` in the torsion part; determines a finite
/// abelian group up to isomorphism.
fn killed_by(g: &FgAbGroup, d: u64) -> u64 {
    g.invariant_factors().iter().map(|n| n.gcd(&BigInt::from(d)).to_u64().unwrap()).product()
}

fn same_torsion_counts(a: &FgAbGroup, b_counts: impl Fn(u64) -> u64, exponent: u64) -> bool {
    (1..=exponent).all(|d| killed_by(a, d) == b_counts(d))
}

fn small_orders() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(prop::sample::select(vec![0u64, 2, 3, 4, 5, 6, 8, 9, 12]), 0..4)
}

fn group(orders: &[u64]) -> FgAbGroup {
    FgAbGroup::from_cyclic_orders(&orders.iter().map(|o| BigInt::from(*o)).collect::<Vec<_>>())
}

/// All abelian groups of order `n` (finite), as sorted cyclic-order lists.
fn groups_of_order(n: u64) -> Vec<FgAbGroup> {
    fn partitions(k: u32, max: u32) -> Vec<Vec<u32>> {
        if k == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in (1..=k.min(max)).rev() {
            for mut rest in partitions(k - first, first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut per_prime: Vec<Vec<Vec<u64>>> = Vec::new();
    let mut rest = n;
    let mut p = 2;
    while rest > 1 {
        let mut k = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        if k > 0 {
            per_prime.push(partitions(k, k).into_iter().map(|part| part.iter().map(|e| p.pow(*e)).collect()).collect());
        }
        p += 1;
    }
    let mut out = vec![Vec::new()];
    for options in per_prime {
        out = out
            .iter()
            .flat_map(|acc: &Vec<u64>| {
                options.iter().map(move |o| {
                    let mut v = acc.clone();
                    v.extend(o);
                    v
                })
            })
            .collect();
    }
    out.iter().map(|v| group(v)).collect()
}

/// Elements of order 2 in `Z/n_1 + ... + Z/n_k`, as coordinate vectors.
fn involutions(orders: &[u64]) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for &n in orders {
        let choices: Vec<u64> = if n % 2 == 0 { vec![0, n / 2] } else { vec![0] };
        out = out
            .iter()
            .flat_map(|v: &Vec<u64>| {
                choices.iter().map(move |c| {
                    let mut w = v.clone();
                    w.push(*c);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|c| *c != 0));
    out
}

fn finite_orders(g: &FgAbGroup) -> Vec<u64> {
    g.invariant_factors().iter().map(|n| n.to_u64().unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_is_a_unimodular_diagonalization(
        rows in 1usize..5, cols in 1usize..5,
        entries in prop::collection::vec(-9i64..10, 25),
    ) {
        let m = IntMatrix::from_i64(rows, cols, &entries[..rows * cols]);
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.d.clone());
        prop_assert_eq!(snf.u.determinant().abs(), BigInt::one());
        prop_assert_eq!(snf.v.determinant().abs(), BigInt::one());
        for i in 0..rows {
            for j in 0..cols {
                if i != j {
                    prop_assert!(snf.d.get(i, j).is_zero());
                }
            }
        }
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative());
            if !w[0].is_zero() {
                prop_assert!(w[1].is_multiple_of(&w[0]));
            } else {
                prop_assert!(w[1].is_zero());
            }
        }
    }

    #[test]
    fn cyclic_decompositions_ignore_order(orders in small_orders(), seed in any::<u64>()) {
        let mut shuffled = orders.clone();
        let k = shuffled.len().max(1);
        shuffled.rotate_left((seed as usize) % k);
        prop_assert_eq!(group(&orders), group(&shuffled));
        let g = group(&orders);
        let finite: Vec<u64> = orders.iter().copied().filter(|o| *o > 0).collect();
        let exp = finite.iter().product::<u64>().max(1);
        let direct = |d: u64| finite.iter().map(|n| n.gcd(&d)).product::<u64>();
        prop_assert!(same_torsion_counts(&g, direct, exp));
        prop_assert_eq!(g.rank(), orders.iter().filter(|o| **o == 0).count());
    }

    #[test]
    fn coefficient_functors_agree(orders in small_orders(), k in 2u64..13) {
        let g = group(&orders);
        let c = Coefficients::Mod(k);
        let t = g.tensor(&c);
        let free_part = FgAbGroup::free(g.rank()).tensor(&c);
        let torsion = group(&finite_orders(&g));
        prop_assert_eq!(torsion.tensor(&c), torsion.tor(&c));
        prop_assert_eq!(torsion.tensor(&c), torsion.ext_into(&c));
        prop_assert_eq!(&t, &direct_sum([&free_part, &torsion.tensor(&c)]));
        prop_assert_eq!(g.hom_into(&c), direct_sum([&free_part, &torsion.hom_into(&c)]));
        let bound: BigInt = finite_orders(&g).iter().map(|n| BigInt::from(n.gcd(&k))).product();
        prop_assert_eq!(torsion.tensor(&c).torsion_order(), bound);
    }

    #[test]
    fn kernel_to_z2_matches_enumeration(
        parts in prop::collection::vec((prop::sample::select(vec![2u64, 3, 4, 6, 8]), any::<bool>()), 1..4),
    ) {
        let gens: Vec<(BigInt, bool)> = parts.iter().map(|(o, h)| (BigInt::from(*o), *h && o % 2 == 0)).collect();
        let k = kernel_to_z2(&gens);
        let orders: Vec<u64> = parts.iter().map(|(o, _)| *o).collect();
        let hits: Vec<bool> = gens.iter().map(|(_, h)| *h).collect();
        let total: u64 = orders.iter().product();
        let mut counts = std::collections::BTreeMap::new();
        for idx in 0..total {
            let mut rest = idx;
            let coords: Vec<u64> = orders.iter().map(|o| { let c = rest % o; rest /= o; c }).collect();
            let image: u64 = coords.iter().zip(&hits).filter(|(_, h)| **h).map(|(c, _)| c).sum();
            if !image.is_multiple_of(2) {
                continue;
            }
            for d in 1..=total {
                if coords.iter().zip(&orders).all(|(c, o)| (c * d) % o == 0) {
                    *counts.entry(d).or_insert(0u64) += 1;
                }
            }
        }
        prop_assert!(same_torsion_counts(&k, |d| counts.get(&d).copied().unwrap_or(0), total));
        prop_assert_eq!(k.rank(), 0);
    }

    #[test]
    fn extensions_by_z2_are_exactly_the_extensions(orders in prop::collection::vec(prop::sample::select(vec![2u64, 3, 4, 8]), 0..3)) {
        let q = group(&orders);
        let n: u64 = orders.iter().product();
        let mut want: Vec<FgAbGroup> = groups_of_order(2 * n)
            .into_iter()
            .filter(|e| {
                let eo = finite_orders(e);
                involutions(&eo).iter().any(|t| {
                    let mut rels: Vec<BigInt> = Vec::new();
                    for (i, o) in eo.iter().enumerate() {
                        let mut row = vec![BigInt::zero(); eo.len()];
                        row[i] = BigInt::from(*o);
                        rels.extend(row);
                    }
                    rels.extend(t.iter().map(|c| BigInt::from(*c)));
                    let m = IntMatrix::new(eo.len() + 1, eo.len(), rels);
                    group_from_presentation(eo.len(), &m) == q
                })
            })
            .collect();
        want.sort();
        prop_assert_eq!(extensions_by_z2(&q), want);
    }

    #[test]
    fn splittings_pass_the_oracle(seed in any::<u64>()) {
        let inst = instance(seed);
        let s = split(&inst.homology, &inst.phi4, &inst.phi5).unwrap();
        let v = verify_split(&inst.homology, &s);
        prop_assert!(v.pass, "{:?}", v);
        let again = split(&inst.homology, &inst.phi4, &inst.phi5).unwrap();
        prop_assert_eq!(s, again);
    }

    #[test]
    fn move_scripts_do_not_change_the_normal_form(seed in any::<u64>(), script_seed in any::<u64>()) {
        let inst = instance(seed);
        let (_, w3, stages) = build_w4(&inst.homology, &inst.phi4).unwrap();
        let w4 = stages.last().cloned().unwrap_or(w3);
        let script = random_script(&mut StdRng::seed_from_u64(script_seed), &w4, 8);
        prop_assert!(confluence_probe(&inst.homology, &inst.phi4, &inst.phi5, &script).unwrap());
    }

    #[test]
    fn moves_are_involutions(seed in any::<u64>()) {
        let inst = instance(seed);
        let (_, w3, stages) = build_w4(&inst.homology, &inst.phi4).unwrap();
        let w4 = stages.last().cloned().unwrap_or(w3);
        let c = normalize_coeffs5(&w4, &inst.phi5).unwrap();
        for mv in Move5::all_legal(&w4) {
            let once = apply_move(&w4, &c, &mv).unwrap();
            prop_assert_eq!(apply_move(&w4, &once, &mv).unwrap(), c.clone(), "{}", mv);
        }
    }

    #[test]
    fn mod_k_cohomology_matches_uct(seed in any::<u64>(), k in 2u64..9) {
        let inst = instance(seed);
        let s = split(&inst.homology, &inst.phi4, &inst.phi5).unwrap();
        let hx = complex_of_result(&s).homology().shifted(-1);
        let uct = uct_cohomology(&hx, &Coefficients::Mod(k));
        let got = generalized_cohomology(&s, &BlockTheory::mod_k(k)).unwrap();
        for d in 0..=6 {
            prop_assert_eq!(got.get(d), uct.get(d), "degree {}", d);
        }
    }

    /// pi^3 of a nonspin C_f is the kernel of f^*, enumerated by hand.
    #[test]
    fn nonspin_pi3_matches_enumerated_kernel(seed in any::<u64>()) {
        let inst = instance(seed);
        let s = split(&inst.homology, &inst.phi4, &inst.phi5).unwrap();
        let Some(f) = s.f else { return Ok(()) };
        prop_assume!(!classify_spin(&s).spin);
        let parts: Vec<(FgAbGroup, bool)> = f.components().iter().map(|c| {
            let hit = c.symbols.iter().flatten().any(|g| matches!(g, GeneratorSymbol::Eta | GeneratorSymbol::Xi(_) | GeneratorSymbol::Epsilon(_)));
            (stable_cohomotopy_block(&c.block, 3).unwrap(), hit)
        }).collect();
        prop_assume!(parts.iter().all(|(g, _)| g.rank() == 0));
        let orders: Vec<u64> = parts.iter().filter(|(g, _)| !g.is_trivial()).map(|(g, _)| finite_orders(g)[0]).collect();
        let hits: Vec<bool> = parts.iter().filter(|(g, _)| !g.is_trivial()).map(|(_, h)| *h).collect();
        let total: u64 = orders.iter().product();
        let rest: Vec<FgAbGroup> = s.free_blocks().iter().map(|b| stable_cohomotopy_block(b, 3).unwrap()).collect();
        let rest = direct_sum(rest.iter());
        let got = pi3(&s).exact().cloned().expect("nonspin is exact");
        prop_assert_eq!(got.rank(), rest.rank());
        let exponent = total * finite_orders(&rest).iter().product::<u64>();
        let kernel_count = |d: u64| -> u64 {
            (0..total).filter(|idx| {
                let mut r = *idx;
                let coords: Vec<u64> = orders.iter().map(|o| { let c = r % o; r /= o; c }).collect();
                let image: u64 = coords.iter().zip(&hits).filter(|(_, h)| **h).map(|(c, _)| c).sum();
                image.is_multiple_of(2) && coords.iter().zip(&orders).all(|(c, o)| (c * d).is_multiple_of(*o))
            }).count() as u64
        };
        prop_assert!(same_torsion_counts(&got, |d| killed_by(&rest, d) * kernel_count(d), exponent.min(512)));
    }

    #[test]
    fn connected_sum_is_commutative_and_associative(picks in prop::collection::vec(0usize..14, 3)) {
        let names = ["X0", "X-1", "Xinf", "Minf", "M'inf", "M2", "M'2", "M6", "M'4", "X1", "X2", "X'1", "X'2", "M'12"];
        let d: Vec<_> = picks.iter().map(|i| builtin(names[*i]).unwrap()).collect();
        let nf = |x: &pd5::manifolds::InputData| split(&x.homology, &x.phi4, &x.phi5).unwrap().normal_form();
        let ab_c = connected_sum(&[connected_sum(&d[..2]).unwrap(), d[2].clone()]).unwrap();
        let a_bc = connected_sum(&[d[0].clone(), connected_sum(&d[1..]).unwrap()]).unwrap();
        let cba = connected_sum(&[d[2].clone(), d[1].clone(), d[0].clone()]).unwrap();
        prop_assert_eq!(nf(&ab_c), nf(&a_bc));
        prop_assert_eq!(nf(&ab_c), nf(&cba));
    }
}
