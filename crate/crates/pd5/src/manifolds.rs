//! Named examples from the Barden and Stocker catalogs as input data, and
//! connected sums of inputs.
//!
//! Whitehead-product parts of the catalog attaching maps vanish after one
//! suspension, so only the remaining coefficients are recorded.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::Declared;
use crate::splitter::{attach_5cell, build_w2, build_w3, build_w4, Coeffs4, Coeffs5, HomologyTable, SplitError, WedgeClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LibraryError {
    #[error("unknown manifold {0:?}; try one of {}", NAMES.join(", "))]
    Unknown(String),
    #[error("{name}: parameter {k} out of range ({range})")]
    Range { name: String, k: u64, range: &'static str },
    #[error("connected sum of no parts")]
    EmptySum,
    #[error(transparent)]
    Split(#[from] SplitError),
}

/// Accepted name patterns.
pub const NAMES: &[&str] = &["X0", "X-1", "Xinf", "Minf", "M'inf", "M{k}", "M'{k}", "X{k}", "X'{k}"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputData {
    pub homology: HomologyTable,
    pub phi4: Vec<Coeffs4>,
    pub phi5: Coeffs5,
    pub provenance: String,
    pub declared: Declared,
}

impl InputData {
    /// Input with all attaching coefficients zero.
    pub fn trivial(homology: HomologyTable, provenance: &str) -> Result<Self, LibraryError> {
        homology.validate()?;
        let mut cur = build_w3(&build_w2(&homology)?, homology.n);
        let mut phi4 = Vec::new();
        for _ in 0..homology.m {
            let c = Coeffs4::zeros(&cur);
            cur = attach_5cell(&cur, &c)?;
            phi4.push(c);
        }
        Ok(InputData {
            phi5: Coeffs5::zeros(&cur),
            homology,
            phi4,
            provenance: provenance.into(),
            declared: Declared::default(),
        })
    }
}

fn table(n: usize, torsion: Vec<u64>) -> HomologyTable {
    HomologyTable { m: 0, n, torsion }
}

fn simple(name: &str, n: usize, torsion: Vec<u64>, phi5: Coeffs5, spin: bool) -> InputData {
    InputData {
        homology: table(n, torsion),
        phi4: Vec::new(),
        phi5,
        provenance: name.into(),
        declared: Declared { spin: Some(spin), ..Default::default() },
    }
}

/// Prime-power factors of `k`, each listed twice, sorted.
fn doubled_factors(k: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rest = k;
    let mut p = 2;
    while rest > 1 {
        if p * p > rest {
            p = rest;
        }
        if rest.is_multiple_of(p) {
            let mut q = 1;
            while rest.is_multiple_of(p) {
                rest /= p;
                q *= p;
            }
            out.extend([q, q]);
        }
        p += 1;
    }
    out.sort_unstable();
    out
}

fn parse_param(name: &str, digits: &str, min: u64, max: u64, range: &'static str) -> Result<u64, LibraryError> {
    let k: u64 = digits.parse().map_err(|_| LibraryError::Unknown(name.into()))?;
    if k < min || k > max {
        return Err(LibraryError::Range { name: name.into(), k, range });
    }
    Ok(k)
}

/// Strip decorations so `X_{-1}`, `X_inf` and `X-1` all parse.
fn normalize_name(name: &str) -> String {
    name.chars().filter(|c| !matches!(c, '_' | '{' | '}' | ' ')).collect::<String>().replace("infty", "inf")
}

pub fn builtin(name: &str) -> Result<InputData, LibraryError> {
    let key = normalize_name(name);
    let zero = |n: usize, t: &[u64]| {
        let w = build_w4(&table(n, t.to_vec()), &[]).expect("valid").1;
        Coeffs5::zeros(&w)
    };
    let data = match key.as_str() {
        "X0" => simple("X0", 0, vec![], Coeffs5::default(), true),
        "X-1" => {
            let mut d = simple("X-1", 0, vec![2], Coeffs5 { x: vec![0], y: vec![1], z: vec![] }, false);
            d.declared.w3_nonzero = Some(true);
            d
        }
        // S^3 slot then S^4 slot; eta lands on S^4.
        "Xinf" => simple("Xinf", 1, vec![], Coeffs5 { x: vec![0, 1], y: vec![], z: vec![] }, false),
        "Minf" => simple("Minf", 1, vec![], zero(1, &[]), true),
        "M'inf" => simple("M'inf", 1, vec![], Coeffs5 { x: vec![1, 0], y: vec![], z: vec![] }, true),
        _ => {
            let (head, digits) = match key.find(|c: char| c.is_ascii_digit()) {
                Some(i) => key.split_at(i),
                None => return Err(LibraryError::Unknown(name.into())),
            };
            match head {
                "M" | "M'" => {
                    let label = format!("{head}{digits}");
                    let k = parse_param(&label, digits, 2, u32::MAX as u64, "k > 1")?;
                    let t = doubled_factors(k);
                    let mut phi5 = zero(0, &t);
                    // iota_k . eta^2 only survives on the 2-part of k.
                    if head == "M'" && k % 2 == 0 {
                        let r = k.trailing_zeros();
                        let w = build_w4(&table(0, t.clone()), &[])?.1;
                        let slot = w.evens.iter().position(|e| *e == r).expect("2-part present");
                        phi5.x[slot] = 1;
                    }
                    simple(&label, 0, t, phi5, true)
                }
                "X" | "X'" => {
                    let label = format!("{head}{digits}");
                    let k = parse_param(&label, digits, 1, 62, "1 <= k <= 62")?;
                    let q = 1u64 << k;
                    let phi5 = if head == "X" {
                        Coeffs5 { x: vec![0, 0], y: vec![1, 0], z: vec![] }
                    } else {
                        Coeffs5 { x: vec![1, 0], y: vec![1, 0], z: vec![] }
                    };
                    simple(&label, 0, vec![q, q], phi5, false)
                }
                _ => return Err(LibraryError::Unknown(name.into())),
            }
        }
    };
    Ok(data)
}

/// A slot of a stage basis, tagged by the part it came from.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Slot {
    value: u32,
    part: usize,
    local: usize,
}

fn sorted_slots(values: impl Fn(usize) -> Vec<u32>, parts: usize) -> Vec<Slot> {
    let mut out: Vec<Slot> = (0..parts)
        .flat_map(|p| values(p).into_iter().enumerate().map(move |(local, value)| Slot { value, part: p, local }))
        .collect();
    out.sort();
    out
}

fn position(slots: &[Slot], part: usize, local: usize) -> usize {
    slots.iter().position(|s| s.part == part && s.local == local).expect("slot present")
}

fn offset(counts: &[usize], part: usize) -> usize {
    counts[..part].iter().sum()
}

/// Connected sum, additive on the data model. Coefficient vectors of each
/// part are placed at the combined basis positions of that part's slots.
pub fn connected_sum(parts: &[InputData]) -> Result<InputData, LibraryError> {
    if parts.is_empty() {
        return Err(LibraryError::EmptySum);
    }
    let mut states: Vec<WedgeClass> = Vec::with_capacity(parts.len());
    let mut stage_lists = Vec::with_capacity(parts.len());
    for p in parts {
        let (_, w3, stages) = build_w4(&p.homology, &p.phi4)?;
        states.push(w3);
        stage_lists.push(stages);
    }
    let k = parts.len();

    let mut phi4 = Vec::new();
    for (p, part) in parts.iter().enumerate() {
        for (i, rec) in part.phi4.iter().enumerate() {
            let n3: Vec<usize> = states.iter().map(|w| w.n3).collect();
            let evens = sorted_slots(|q| states[q].evens.clone(), k);
            let mut c = Coeffs4 { x: vec![0; n3.iter().sum()], y: vec![0; evens.len()] };
            let off = offset(&n3, p);
            for (j, b) in rec.x.iter().enumerate() {
                c.x[off + j] = *b;
            }
            for (j, b) in rec.y.iter().enumerate() {
                c.y[position(&evens, p, j)] = *b;
            }
            phi4.push(c);
            states[p] = stage_lists[p][i].clone();
        }
    }

    let evens = sorted_slots(|q| states[q].evens.clone(), k);
    let tw = sorted_slots(|q| states[q].tw.clone(), k);
    let n3: Vec<usize> = states.iter().map(|w| w.n3).collect();
    let n4: Vec<usize> = states.iter().map(|w| w.n4).collect();
    let a = evens.len();
    let (t3, t4) = (n3.iter().sum::<usize>(), n4.iter().sum::<usize>());
    let mut phi5 = Coeffs5 { x: vec![0; a + t3 + t4], y: vec![0; a], z: vec![0; tw.len()] };
    for (p, part) in parts.iter().enumerate() {
        let w = &states[p];
        let c = &part.phi5;
        for j in 0..w.a() {
            let pos = position(&evens, p, j);
            phi5.x[pos] = c.x[j];
            phi5.y[pos] = c.y[j];
        }
        for j in 0..w.n3 {
            phi5.x[a + offset(&n3, p) + j] = c.x[w.a() + j];
        }
        for j in 0..w.n4 {
            phi5.x[a + t3 + offset(&n4, p) + j] = c.x[w.a() + w.n3 + j];
        }
        for j in 0..w.c() {
            phi5.z[position(&tw, p, j)] = c.z[j];
        }
    }

    let all = |get: fn(&Declared) -> Option<bool>| -> Option<Vec<bool>> { parts.iter().map(|p| get(&p.declared)).collect() };
    let declared = Declared {
        spin: all(|d| d.spin).map(|v| v.iter().all(|b| *b)),
        w3_nonzero: all(|d| d.w3_nonzero).map(|v| v.iter().any(|b| *b)),
        p1_odd: None,
    };
    let homology = HomologyTable {
        m: parts.iter().map(|p| p.homology.m).sum(),
        n: parts.iter().map(|p| p.homology.n).sum(),
        torsion: parts.iter().flat_map(|p| p.homology.torsion.iter().copied()).collect(),
    };
    let provenance = parts.iter().map(|p| p.provenance.as_str()).collect::<Vec<_>>().join(" # ");
    Ok(InputData { homology, phi4, phi5, provenance, declared })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitter::split;

    fn run(d: &InputData) -> crate::splitter::SplitResult {
        split(&d.homology, &d.phi4, &d.phi5).unwrap()
    }

    #[test]
    fn catalog_splittings() {
        let wu = run(&builtin("X_{-1}").unwrap());
        assert_eq!(wu.f.unwrap().expression(), "xi_1");
        assert!(wu.wedge.is_empty());
        let xinf = run(&builtin("X_inf").unwrap());
        assert_eq!((xinf.wedge.n3, xinf.f.unwrap().expression().as_str()), (1, "eta"));
        let xp = run(&builtin("X'3").unwrap()).f.unwrap();
        assert_eq!((xp.family, xp.y, xp.r), (4, 1, Some(3)));
        let mp = run(&builtin("M'12").unwrap()).f.unwrap();
        assert_eq!((mp.family, mp.rho), (3, Some(2)));
        assert!(run(&builtin("M'9").unwrap()).f.is_none());
        assert_eq!(builtin("M6").unwrap().homology.torsion, vec![2, 2, 3, 3]);
        assert!(matches!(builtin("M1"), Err(LibraryError::Range { .. })));
        assert!(matches!(builtin("Q7"), Err(LibraryError::Unknown(_))));
    }

    #[test]
    fn sums() {
        let s = connected_sum(&[builtin("X-1").unwrap(), builtin("Minf").unwrap()]).unwrap();
        assert_eq!(s.homology, HomologyTable { m: 0, n: 1, torsion: vec![2] });
        assert_eq!(s.phi5, Coeffs5 { x: vec![0, 0, 0], y: vec![1], z: vec![] });
        let x0 = connected_sum(&[builtin("X0").unwrap(), builtin("X0").unwrap()]).unwrap();
        assert_eq!(run(&x0).normal_form(), run(&builtin("X0").unwrap()).normal_form());
        // slots interleave by exponent
        let mix = connected_sum(&[builtin("X2").unwrap(), builtin("X'1").unwrap()]).unwrap();
        assert_eq!(mix.phi5.y, vec![1, 0, 1, 0]);
        assert_eq!(&mix.phi5.x[..4], &[1, 0, 0, 0]);
    }

    #[test]
    fn sums_with_5cells() {
        let h = HomologyTable { m: 1, n: 1, torsion: vec![4] };
        let a = InputData {
            phi4: vec![Coeffs4 { x: vec![0], y: vec![1] }],
            phi5: Coeffs5 { x: vec![0, 1], y: vec![], z: vec![1] },
            homology: h,
            provenance: "A".into(),
            declared: Declared::default(),
        };
        let b = builtin("X1").unwrap();
        let ab = run(&connected_sum(&[a.clone(), b.clone()]).unwrap()).normal_form();
        let ba = run(&connected_sum(&[b, a]).unwrap()).normal_form();
        assert_eq!(ab, ba);
    }
}
