//! Invariants of `X` read off a splitting of `Sigma X`: generalized
//! cohomology, low cohomotopy groups, the mod-2 Steenrod module, spin
//! classification and characteristic-class consistency checks.
//!
//! All degrees here are degrees of `X`, one below those of the blocks.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{
    direct_sum, extensions_by_z2, kernel_to_z2, uct_cohomology, Coefficients, FgAbGroup, GradedGroup,
};
use crate::blocks::{advertised_homology, stable_cohomotopy_block, steenrod_action, Block, GeneratorSymbol, SteenrodTable};
use crate::splitter::{FMap, HomologyTable, SplitResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InvariantError {
    #[error("theory {theory} has no entry for {block} in degree {degree}")]
    TheoryGap { theory: String, block: String, degree: i32 },
    #[error("ambiguous value: {0}")]
    Ambiguous(String),
    #[error("unsupported query: {0}")]
    Unsupported(String),
    #[error("theory table: {0}")]
    Table(String),
}

type Result<T> = std::result::Result<T, InvariantError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryEntry {
    pub block: String,
    #[serde(default)]
    pub degree: i32,
    #[serde(default)]
    pub rank: usize,
    #[serde(default)]
    pub torsion: Vec<u64>,
    /// Only meaningful for `Cf`: compute from `B_f` and the top cell.
    #[serde(default)]
    pub derive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct TheoryFile {
    name: String,
    entries: Vec<TheoryEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Kind {
    Integral,
    ModK(u64),
    StableCohomotopy,
    Table(Vec<TheoryEntry>),
}

/// A reduced cohomology theory given by its values on the building blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTheory {
    pub name: String,
    kind: Kind,
}

/// Degrees at which `generalized_cohomology` evaluates.
const DEGREES: std::ops::RangeInclusive<i32> = 0..=6;

impl BlockTheory {
    pub fn integral() -> Self {
        BlockTheory { name: "integral".into(), kind: Kind::Integral }
    }

    pub fn mod_k(k: u64) -> Self {
        assert!(k >= 2, "mod-k theory needs k >= 2");
        BlockTheory { name: format!("mod {k}"), kind: Kind::ModK(k) }
    }

    /// Stable cohomotopy in degrees 3 and 4.
    pub fn stable_cohomotopy() -> Self {
        BlockTheory { name: "stable cohomotopy".into(), kind: Kind::StableCohomotopy }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TheoryFile = serde_json::from_str(text).map_err(|e| InvariantError::Table(e.to_string()))?;
        for e in &file.entries {
            if e.torsion.iter().any(|t| *t < 2) {
                return Err(InvariantError::Table(format!("{}: torsion orders must be >= 2", e.block)));
            }
        }
        Ok(BlockTheory { name: file.name, kind: Kind::Table(file.entries) })
    }

    fn degrees(&self) -> Vec<i32> {
        match self.kind {
            Kind::StableCohomotopy => vec![3, 4],
            _ => DEGREES.collect(),
        }
    }

    /// Value on the desuspension of `b`.
    pub fn block_value(&self, b: &Block, degree: i32) -> Result<FgAbGroup> {
        match &self.kind {
            Kind::Integral => Ok(integral_block(b, degree)),
            Kind::ModK(k) => {
                let h = advertised_homology(b).shifted(-1);
                Ok(uct_cohomology(&h, &Coefficients::Mod(*k)).get(degree))
            }
            Kind::StableCohomotopy => match degree {
                3 | 4 => stable_cohomotopy_block(b, degree as u32).map_err(|e| InvariantError::Unsupported(e.to_string())),
                _ => Err(self.gap(&b.desuspended_name(), degree)),
            },
            Kind::Table(entries) => table_value(entries, &b.desuspended_name(), degree)
                .ok_or_else(|| self.gap(&b.desuspended_name(), degree)),
        }
    }

    /// Value on `C_f` (desuspended).
    pub fn cf_value(&self, s: &SplitResult, f: &FMap, degree: i32) -> Result<FgAbGroup> {
        let via_parts = || -> Result<FgAbGroup> {
            let mut parts = Vec::new();
            for b in f.target_blocks() {
                parts.push(self.block_value(&b, degree)?);
            }
            parts.push(self.block_value(&Block::Sphere(6), degree)?);
            Ok(direct_sum(parts.iter()))
        };
        match &self.kind {
            // For ordinary theories f is zero on cohomology and C_f splits additively.
            Kind::Integral | Kind::ModK(_) => via_parts(),
            Kind::StableCohomotopy => match degree {
                3 => match pi3_cf(s, f, None) {
                    Pi3Value::Exact(g) => Ok(g),
                    Pi3Value::Ambiguous(c) => Err(InvariantError::Ambiguous(render_candidates(&c))),
                },
                4 => Ok(pi4_cf(f, is_spin(f))),
                _ => Err(self.gap("Cf", degree)),
            },
            Kind::Table(entries) => {
                if entries.iter().any(|e| e.block == "Cf" && e.derive) {
                    via_parts()
                } else {
                    table_value(entries, "Cf", degree).ok_or_else(|| self.gap("Cf", degree))
                }
            }
        }
    }

    fn gap(&self, block: &str, degree: i32) -> InvariantError {
        InvariantError::TheoryGap { theory: self.name.clone(), block: block.into(), degree }
    }
}

/// A block with entries takes the trivial value in unlisted degrees; a block
/// with no entries at all is a gap.
fn table_value(entries: &[TheoryEntry], block: &str, degree: i32) -> Option<FgAbGroup> {
    let rows: Vec<&TheoryEntry> = entries.iter().filter(|e| e.block == block && !e.derive).collect();
    if rows.is_empty() {
        return None;
    }
    let parts: Vec<FgAbGroup> = rows
        .iter()
        .filter(|e| e.degree == degree)
        .map(|e| FgAbGroup::from_parts(e.rank, &e.torsion))
        .collect();
    Some(direct_sum(parts.iter()))
}

fn integral_block(b: &Block, degree: i32) -> FgAbGroup {
    let z = || FgAbGroup::free(1);
    match (*b, degree) {
        (Block::Sphere(d), k) if k == d as i32 - 1 => z(),
        (Block::Moore(t), 3) => FgAbGroup::cyclic(t),
        (Block::SigmaCP2, 2) | (Block::SigmaCP2, 4) => z(),
        (Block::SigmaCP2Tw(r), 3) => FgAbGroup::cyclic(BigInt::from(2u32).pow(r)),
        (Block::SigmaCP2Tw(_), 4) => z(),
        _ => FgAbGroup::zero(),
    }
}

pub fn generalized_cohomology(s: &SplitResult, th: &BlockTheory) -> Result<GradedGroup> {
    let mut out = GradedGroup::new();
    for d in th.degrees() {
        let mut parts = Vec::new();
        for b in s.free_blocks() {
            parts.push(th.block_value(&b, d)?);
        }
        if let Some(f) = &s.f {
            parts.push(th.cf_value(s, f, d)?);
        }
        out.add(d, &direct_sum(parts.iter()));
    }
    Ok(out)
}

fn is_spin(f: &FMap) -> bool {
    !f.components().iter().any(|c| {
        c.symbols.iter().flatten().any(|g| matches!(g, GeneratorSymbol::Eta | GeneratorSymbol::Xi(_) | GeneratorSymbol::Epsilon(_)))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detection {
    pub component: String,
    pub operation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinReport {
    pub spin: bool,
    pub w3_nonzero: bool,
    pub detected_components: Vec<Detection>,
}

pub fn classify_spin(s: &SplitResult) -> SpinReport {
    let Some(f) = &s.f else {
        return SpinReport { spin: true, w3_nonzero: false, detected_components: Vec::new() };
    };
    let mut detected = Vec::new();
    let mut w3 = false;
    for c in f.components() {
        for g in c.symbols.iter().flatten() {
            let operation = match g {
                GeneratorSymbol::Eta => "Sq^2".to_string(),
                GeneratorSymbol::Xi(r) | GeneratorSymbol::Epsilon(r) => {
                    w3 |= *r == 1;
                    if *r == 1 {
                        "Sq^2 Sq^1".to_string()
                    } else {
                        format!("Sq^2 beta_{r}")
                    }
                }
                GeneratorSymbol::EtaSq => "secondary operation".to_string(),
                GeneratorSymbol::IotaEtaSq(r) => format!("secondary operation + beta_{r}"),
                other => unreachable!("{other} is not a component of f"),
            };
            detected.push(Detection { component: desuspended_symbol(g), operation });
        }
    }
    SpinReport { spin: is_spin(f), w3_nonzero: w3, detected_components: detected }
}

fn desuspended_symbol(g: &GeneratorSymbol) -> String {
    match g {
        GeneratorSymbol::IotaEtaSq(r) => format!("eta_{r}"),
        other => other.to_string(),
    }
}

/// Mod-2 Steenrod module of `X`, basis classes in summand order with the
/// top class of `C_f` last.
pub fn sq_module(s: &SplitResult) -> SteenrodTable {
    let mut t = SteenrodTable::default();
    for b in s.free_blocks() {
        t = t.direct_sum(&steenrod_action(&b).shifted(-1));
    }
    let Some(f) = &s.f else { return t };
    let mut sources = Vec::new();
    for c in f.components() {
        let offset = t.dim(3);
        t = t.direct_sum(&steenrod_action(&c.block).shifted(-1));
        // eta, xi and epsilon are detected by Sq^2 on the degree-3 class.
        let detected = c.symbols.iter().flatten().any(|g| {
            matches!(g, GeneratorSymbol::Eta | GeneratorSymbol::Xi(_) | GeneratorSymbol::Epsilon(_))
        });
        if detected {
            sources.push(offset);
        }
    }
    t = t.direct_sum(&steenrod_action(&Block::Sphere(6)).shifted(-1));
    let top = t.dim(5) - 1;
    for j in sources {
        t.set_op(2, 3, top, j);
    }
    t
}

/// Is `Sq^2: H^3(X; Z/2) -> H^5(X; Z/2)` onto?
pub fn sq2_onto(t: &SteenrodTable) -> bool {
    t.sq2(3).rank() == t.dim(5)
}

pub fn pi4(s: &SplitResult, h: &HomologyTable) -> FgAbGroup {
    let base = FgAbGroup::free(h.m);
    if sq2_onto(&sq_module(s)) {
        base
    } else {
        direct_sum([&base, &FgAbGroup::cyclic(2u32)])
    }
}

pub fn pi4_mod_k(s: &SplitResult, h: &HomologyTable, k: u64) -> Result<FgAbGroup> {
    if k < 2 {
        return Err(InvariantError::Unsupported(format!("coefficients Z/{k}")));
    }
    let base = FgAbGroup::free(h.m).tensor(&Coefficients::Mod(k));
    if k.is_multiple_of(2) && !sq2_onto(&sq_module(s)) {
        Ok(direct_sum([&base, &FgAbGroup::cyclic(2u32)]))
    } else {
        Ok(base)
    }
}

/// Value of the secondary operation on `H^2(X; Z/2)` in the spin case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SecondaryOp {
    Trivial,
    Nontrivial,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pi3Value {
    Exact(FgAbGroup),
    /// Candidate isomorphism classes, sorted.
    Ambiguous(Vec<FgAbGroup>),
}

impl Pi3Value {
    pub fn exact(&self) -> Option<&FgAbGroup> {
        match self {
            Pi3Value::Exact(g) => Some(g),
            Pi3Value::Ambiguous(_) => None,
        }
    }

    pub fn candidates(&self) -> Vec<FgAbGroup> {
        match self {
            Pi3Value::Exact(g) => vec![g.clone()],
            Pi3Value::Ambiguous(c) => c.clone(),
        }
    }

    fn map(&self, op: impl Fn(&FgAbGroup) -> FgAbGroup) -> Pi3Value {
        let mut c: Vec<FgAbGroup> = self.candidates().iter().map(op).collect();
        c.sort();
        c.dedup();
        if c.len() == 1 {
            Pi3Value::Exact(c.pop().unwrap())
        } else {
            Pi3Value::Ambiguous(c)
        }
    }
}

fn render_candidates(c: &[FgAbGroup]) -> String {
    let parts: Vec<String> = c.iter().map(|g| g.to_string()).collect();
    format!("one of {{{}}}", parts.join("; "))
}

impl fmt::Display for Pi3Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pi3Value::Exact(g) => write!(f, "{g}"),
            Pi3Value::Ambiguous(c) => write!(f, "ambiguous: {}", render_candidates(c)),
        }
    }
}

fn stable3(b: &Block) -> FgAbGroup {
    stable_cohomotopy_block(b, 3).expect("degree 3 is tabulated")
}

/// `pi^3_S(B_f)` summand by summand, with whether `f^*` hits its generator.
fn bf_pi3(f: &FMap) -> Vec<(FgAbGroup, bool)> {
    f.components()
        .iter()
        .map(|c| {
            let hit = c.symbols.iter().flatten().any(|g| {
                matches!(g, GeneratorSymbol::Eta | GeneratorSymbol::Xi(_) | GeneratorSymbol::Epsilon(_))
            });
            (stable3(&c.block), hit)
        })
        .collect()
}

fn pi3_cf(_s: &SplitResult, f: &FMap, secondary: Option<SecondaryOp>) -> Pi3Value {
    let parts = bf_pi3(f);
    if !is_spin(f) {
        // 0 <- Z/2 <- pi^3_S(B_f) <- pi^3_S(C_f) <- 0
        let gens: Vec<(BigInt, bool)> = parts
            .iter()
            .filter(|(g, _)| !g.is_trivial())
            .map(|(g, hit)| (if g.rank() > 0 { BigInt::from(0) } else { g.torsion_order() }, *hit))
            .collect();
        return Pi3Value::Exact(kernel_to_z2(&gens));
    }
    let bf = direct_sum(parts.iter().map(|(g, _)| g));
    // A nonzero spin f has an eta^2 or iota.eta^2 component, which the
    // secondary operation detects.
    let op = secondary.unwrap_or(SecondaryOp::Nontrivial);
    let mut c = match op {
        SecondaryOp::Nontrivial => vec![bf],
        SecondaryOp::Trivial => extensions_by_z2(&bf),
        SecondaryOp::Unknown => {
            let mut v = extensions_by_z2(&bf);
            v.push(bf);
            v
        }
    };
    c.sort();
    c.dedup();
    if c.len() == 1 {
        Pi3Value::Exact(c.pop().unwrap())
    } else {
        Pi3Value::Ambiguous(c)
    }
}

/// `pi^4_S(C_f) = pi^4_S(B_f) (+) coker(f^*: pi^3_S(B_f) -> Z/2)`.
fn pi4_cf(f: &FMap, spin: bool) -> FgAbGroup {
    let mut parts: Vec<FgAbGroup> =
        f.target_blocks().iter().map(|b| stable_cohomotopy_block(b, 4).expect("tabulated")).collect();
    if spin {
        parts.push(FgAbGroup::cyclic(2u32));
    }
    direct_sum(parts.iter())
}

pub fn pi3(s: &SplitResult) -> Pi3Value {
    pi3_with(s, None)
}

pub fn pi3_with(s: &SplitResult, secondary: Option<SecondaryOp>) -> Pi3Value {
    let rest: Vec<FgAbGroup> = s.free_blocks().iter().map(stable3).collect();
    let rest = direct_sum(rest.iter());
    match &s.f {
        None => Pi3Value::Exact(rest),
        Some(f) => pi3_cf(s, f, secondary).map(|g| direct_sum([&rest, g])),
    }
}

/// `pi^3(X; Z/k)` for odd `k`, from `pi^3 (x) Z/k` and `Tor(pi^4, Z/k)`.
pub fn pi3_mod_k(s: &SplitResult, h: &HomologyTable, k: u64, secondary: Option<SecondaryOp>) -> Result<FgAbGroup> {
    if k.is_multiple_of(2) || k < 3 {
        return Err(InvariantError::Unsupported(format!("pi^3 with Z/{k} coefficients needs odd k >= 3")));
    }
    let c = Coefficients::Mod(k);
    let tor = pi4(s, h).tor(&c);
    match pi3_with(s, secondary).map(|g| direct_sum([&g.tensor(&c), &tor])) {
        Pi3Value::Exact(g) => Ok(g),
        Pi3Value::Ambiguous(v) => Err(InvariantError::Ambiguous(render_candidates(&v))),
    }
}

/// `pi^1` and `pi^5`, where the Hopf theorem and `S^1 = K(Z, 1)` apply.
pub fn pi_simple(h: &HomologyTable, n: u32, k: Option<u64>) -> Result<FgAbGroup> {
    match (n, k) {
        (5, None) => Ok(FgAbGroup::free(1)),
        (5, Some(k)) if k >= 2 => Ok(FgAbGroup::cyclic(k)),
        (1, None) => Ok(FgAbGroup::free(h.m)),
        _ => Err(InvariantError::Unsupported(format!("pi^{n} with coefficients {k:?}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sq2Regime {
    /// `Sq^2: H^3 -> H^5` onto.
    Onto,
    /// `Sq^2: H^3 -> H^5` zero.
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi2Report {
    pub simply_connected_product: Option<(FgAbGroup, Pi3Value)>,
    pub fiber_description: String,
    pub regime: Sq2Regime,
}

pub fn pi2_structure(s: &SplitResult, h: &HomologyTable) -> Pi2Report {
    let regime = if sq2_onto(&sq_module(s)) { Sq2Regime::Onto } else { Sq2Regime::Trivial };
    let h2 = FgAbGroup::free(h.n);
    let p3 = pi3(s);
    let condition = match regime {
        Sq2Regime::Onto => "u^2 = 0",
        Sq2Regime::Trivial => "u^2 = 0 and Sq^2_u(x^2) = 0",
    };
    let fiber_description = format!(
        "pi^2(X) is the disjoint union of h^-1(u) over u in H^2(X) = {h2} with {condition}; \
         each h^-1(u) is nonempty and isomorphic to pi^3(X)/psi_u(H^1(X)), pi^3(X) = {p3}, \
         H^1(X) = {}, psi_u not evaluated",
        FgAbGroup::free(h.m)
    );
    let product = (h.m == 0).then_some((h2, p3));
    Pi2Report { simply_connected_product: product, fiber_description, regime }
}

/// Declared characteristic-class data, any of which may be absent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declared {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w3_nonzero: Option<bool>,
    /// Whether `p_1` reduces to a nonzero class mod 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1_odd: Option<bool>,
}

pub fn char_class_consistency(h: &HomologyTable, s: &SplitResult, declared: &Declared) -> Vec<String> {
    let report = classify_spin(s);
    let mut warnings = Vec::new();

    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for t in &h.torsion {
        *counts.entry(*t).or_insert(0) += 1;
    }
    let extra_two = report.w3_nonzero;
    for (t, k) in &counts {
        let want_odd = *t == 2 && extra_two;
        if (k % 2 == 1) != want_odd {
            warnings.push(if want_odd {
                format!("w3 != 0 calls for an unpaired Z/2 in H_2, found {k} copies")
            } else {
                format!("torsion Z/{t} occurs {k} times; H_2 torsion should be doubled")
            });
        }
    }
    if extra_two && !counts.contains_key(&2) {
        warnings.push("w3 != 0 calls for an unpaired Z/2 in H_2, found none".into());
    }
    if let Some(d) = declared.spin {
        if d != report.spin {
            warnings.push(format!("declared spin = {d} but f gives spin = {}", report.spin));
        }
    }
    if let Some(d) = declared.w3_nonzero {
        if d != report.w3_nonzero {
            warnings.push(format!("declared w3 != 0 is {d} but f gives {}", report.w3_nonzero));
        }
    }
    if declared.p1_odd == Some(true) && report.spin {
        warnings.push("p1 is odd mod 2 but w2 = 0 forces w2^2 = 0".into());
    }
    warnings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::splitter::{build_w4, split, Coeffs4, Coeffs5};

    fn wu() -> (HomologyTable, SplitResult) {
        let h = HomologyTable::new(0, 0, vec![2]).unwrap();
        let s = split(&h, &[], &Coeffs5 { x: vec![0], y: vec![1], z: vec![] }).unwrap();
        (h, s)
    }

    fn minf() -> (HomologyTable, SplitResult) {
        let h = HomologyTable::new(0, 1, vec![]).unwrap();
        let s = split(&h, &[], &Coeffs5 { x: vec![0, 0], y: vec![], z: vec![] }).unwrap();
        (h, s)
    }

    #[test]
    fn wu_invariants() {
        let (h, s) = wu();
        let coh = generalized_cohomology(&s, &BlockTheory::integral()).unwrap();
        assert_eq!(coh, GradedGroup::from_pairs([(3, FgAbGroup::cyclic(2u32)), (5, FgAbGroup::free(1))]));
        assert!(pi4(&s, &h).is_trivial());
        assert_eq!(pi3(&s), Pi3Value::Exact(FgAbGroup::zero()));
        assert!(pi3_mod_k(&s, &h, 3, None).unwrap().is_trivial());
        let spin = classify_spin(&s);
        assert!(!spin.spin && spin.w3_nonzero);
        let p2 = pi2_structure(&s, &h);
        assert_eq!(p2.simply_connected_product, Some((FgAbGroup::zero(), Pi3Value::Exact(FgAbGroup::zero()))));
    }

    #[test]
    fn product_invariants() {
        let (h, s) = minf();
        assert_eq!(pi3(&s), Pi3Value::Exact(FgAbGroup::from_parts(1, &[2])));
        assert_eq!(pi3_mod_k(&s, &h, 3, None).unwrap(), FgAbGroup::cyclic(3u32));
        assert_eq!(pi4(&s, &h), FgAbGroup::cyclic(2u32));
        assert_eq!(pi4_mod_k(&s, &h, 2).unwrap(), FgAbGroup::cyclic(2u32));
        let m2 = generalized_cohomology(&s, &BlockTheory::mod_k(2)).unwrap();
        let z2 = FgAbGroup::cyclic(2u32);
        assert_eq!(m2, GradedGroup::from_pairs([(2, z2.clone()), (3, z2.clone()), (5, z2)]));
        let st = generalized_cohomology(&s, &BlockTheory::stable_cohomotopy()).unwrap();
        assert_eq!(st.get(3), pi3(&s).exact().unwrap().clone());
        assert_eq!(st.get(4), pi4(&s, &h));
    }

    #[test]
    fn twisted_summand_in_pi3() {
        let h = HomologyTable::new(1, 0, vec![4]).unwrap();
        let phi4 = [Coeffs4 { x: vec![], y: vec![1] }];
        let w4 = build_w4(&h, &phi4).unwrap().2.last().unwrap().clone();
        let s = split(&h, &phi4, &Coeffs5::zeros(&w4)).unwrap();
        assert_eq!(s.wedge.tw, vec![2]);
        let p = pi3(&s);
        assert!(p.exact().unwrap().invariant_factors().contains(&BigInt::from(8)));
        assert_eq!(pi4_mod_k(&s, &h, 4).unwrap(), FgAbGroup::from_parts(0, &[2, 4]));
    }

    #[test]
    fn spin_family_candidates() {
        // iota_2 . eta^2 alone: spin, B_f = P^3(4).
        let h = HomologyTable::new(0, 0, vec![4]).unwrap();
        let s = split(&h, &[], &Coeffs5 { x: vec![1], y: vec![0], z: vec![] }).unwrap();
        assert_eq!(s.f.unwrap().family, 3);
        let rep = classify_spin(&s);
        assert!(rep.spin);
        assert_eq!(rep.detected_components[0].operation, "secondary operation + beta_2");
        assert_eq!(pi3(&s), Pi3Value::Exact(FgAbGroup::cyclic(4u32)));
        let amb = pi3_with(&s, Some(SecondaryOp::Unknown));
        assert_eq!(amb.candidates().len(), 3);
        assert!(sq_module(&s).sq2(3).is_zero());
    }

    #[test]
    fn consistency_warnings() {
        let h = HomologyTable::new(0, 0, vec![2, 2]).unwrap();
        let s = split(&h, &[], &Coeffs5 { x: vec![0, 0], y: vec![0, 0], z: vec![] }).unwrap();
        assert!(char_class_consistency(&h, &s, &Declared { spin: Some(true), ..Default::default() }).is_empty());
        let h3 = HomologyTable::new(0, 0, vec![3]).unwrap();
        let s3 = split(&h3, &[], &Coeffs5::default()).unwrap();
        assert_eq!(char_class_consistency(&h3, &s3, &Declared::default()).len(), 1);
        let h4 = HomologyTable::new(0, 0, vec![4, 4]).unwrap();
        let s4 = split(&h4, &[], &Coeffs5 { x: vec![0, 0], y: vec![1, 0], z: vec![] }).unwrap();
        let w = char_class_consistency(&h4, &s4, &Declared { spin: Some(true), ..Default::default() });
        assert_eq!(w.len(), 1, "{w:?}");
    }

    #[test]
    fn table_theory() {
        let text = r#"{"name": "toy", "entries": [
            {"block": "S5", "degree": 5, "rank": 1, "torsion": []},
            {"block": "P3(2)", "degree": 3, "rank": 0, "torsion": [2]},
            {"block": "Cf", "derive": true}
        ]}"#;
        let th = BlockTheory::from_json(text).unwrap();
        let (_, s) = wu();
        let g = generalized_cohomology(&s, &th).unwrap();
        assert_eq!(g.get(3), FgAbGroup::cyclic(2u32));
        let (_, m) = minf();
        assert!(matches!(generalized_cohomology(&m, &th), Err(InvariantError::TheoryGap { .. })));
    }
}
