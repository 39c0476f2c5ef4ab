//! Building blocks of the splitting: spheres, Moore spaces `P^4(t)`,
//! `SigmaCP2` and the twisted `SigmaCP2(2^r)`, with their cellular chain
//! complexes, low homotopy groups, transfer maps, stable cohomotopy and
//! Steenrod actions.
//!
//! Blocks are stored at the suspension level where they occur in the
//! splitting of `Sigma X`. The stable cohomotopy table is indexed by the same
//! blocks but reports values of their desuspensions, since that is how the
//! cohomotopy of `X` decomposes.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abgroup::{direct_sum, smith_normal_form, FgAbGroup, GradedGroup, IntMatrix};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BlockError {
    #[error("sphere dimension {0} outside 2..=6")]
    SphereDim(u32),
    #[error("Moore space order {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("twisted exponent must be positive")]
    ZeroExponent,
    #[error("no catalog entry for pi_{n}({block})")]
    OutOfCatalog { block: String, n: u32 },
    #[error("{0} is not a generator of the source group")]
    ForeignGenerator(String),
    #[error("map {tag} does not go from {source_block} to {target}")]
    Incompatible { tag: String, source_block: String, target: String },
    #[error("stable cohomotopy degree {0} not tabulated (expected 3 or 4)")]
    Degree(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    Sphere(u32),
    Moore(u64),
    SigmaCP2,
    SigmaCP2Tw(u32),
}

impl Block {
    pub fn sphere(d: u32) -> Result<Block, BlockError> {
        if (2..=6).contains(&d) {
            Ok(Block::Sphere(d))
        } else {
            Err(BlockError::SphereDim(d))
        }
    }

    pub fn moore(t: u64) -> Result<Block, BlockError> {
        match prime_power_u64(t) {
            Some(_) => Ok(Block::Moore(t)),
            None => Err(BlockError::NotPrimePower(t)),
        }
    }

    pub fn twisted(r: u32) -> Result<Block, BlockError> {
        if r == 0 {
            Err(BlockError::ZeroExponent)
        } else {
            Ok(Block::SigmaCP2Tw(r))
        }
    }

    /// `Some(r)` for `P^4(2^r)`.
    pub fn two_exponent(&self) -> Option<u32> {
        match self {
            Block::Moore(t) if t.is_power_of_two() => Some(t.trailing_zeros()),
            _ => None,
        }
    }

    /// Name of the block one suspension down, as used in theory tables.
    pub fn desuspended_name(&self) -> String {
        match self {
            Block::Sphere(d) => format!("S{}", d - 1),
            Block::Moore(t) => format!("P3({t})"),
            Block::SigmaCP2 => "CP2".into(),
            Block::SigmaCP2Tw(r) => format!("CP2(2^{r})"),
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Block::Sphere(d) => write!(f, "S^{d}"),
            Block::Moore(t) => write!(f, "P^4({t})"),
            Block::SigmaCP2 => write!(f, "SigmaCP2"),
            Block::SigmaCP2Tw(r) => write!(f, "SigmaCP2(2^{r})"),
        }
    }
}

pub(crate) fn prime_power_u64(t: u64) -> Option<(u64, u32)> {
    if t < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= t {
        if t.is_multiple_of(p) {
            break;
        }
        p += 1;
    }
    if !t.is_multiple_of(p) {
        p = t;
    }
    let (mut n, mut e) = (t, 0);
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    (n == 1).then_some((p, e))
}

/// Cellular chain complex; `boundaries[d]` maps degree `d` to `d - 1`
/// (rows indexed by `d - 1` cells, columns by `d` cells).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChainComplex {
    ranks: BTreeMap<i32, usize>,
    boundaries: BTreeMap<i32, IntMatrix>,
}

impl ChainComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self, d: i32) -> usize {
        self.ranks.get(&d).copied().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<i32> {
        self.ranks.iter().filter(|(_, &r)| r > 0).map(|(d, _)| *d).collect()
    }

    pub fn boundary(&self, d: i32) -> IntMatrix {
        self.boundaries
            .get(&d)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.rank(d - 1), self.rank(d)))
    }

    /// Append one cell in degree `d` whose boundary is `coeffs` on the
    /// existing `(d-1)`-cells. Cells of degree `d+1` must not exist yet.
    pub fn add_cell(&mut self, d: i32, coeffs: &[i64]) {
        assert_eq!(self.rank(d + 1), 0, "add cells bottom-up");
        let below = self.rank(d - 1);
        assert!(coeffs.len() <= below, "boundary refers to a missing cell");
        let old = self.boundary(d);
        let n = self.rank(d);
        let mut m = IntMatrix::zeros(below, n + 1);
        for i in 0..below {
            for j in 0..n {
                m.set(i, j, old.get(i, j).clone());
            }
        }
        for (i, c) in coeffs.iter().enumerate() {
            m.set(i, n, BigInt::from(*c));
        }
        self.ranks.insert(d, n + 1);
        if below > 0 {
            self.boundaries.insert(d, m);
        }
    }

    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        let mut out = ChainComplex::new();
        let degrees: std::collections::BTreeSet<i32> =
            self.ranks.keys().chain(other.ranks.keys()).copied().collect();
        for &d in &degrees {
            out.ranks.insert(d, self.rank(d) + other.rank(d));
        }
        for &d in &degrees {
            let m = self.boundary(d).block_sum(&other.boundary(d));
            if m.rows() > 0 && m.cols() > 0 {
                out.boundaries.insert(d, m);
            }
        }
        out
    }

    pub fn boundary_squares_vanish(&self) -> bool {
        self.degrees().iter().all(|&d| {
            let a = self.boundary(d - 1);
            let b = self.boundary(d);
            a.rows() == 0 || b.cols() == 0 || a.mul(&b).is_zero()
        })
    }

    /// Integral homology through Smith normal form of each boundary.
    pub fn homology(&self) -> GradedGroup {
        let mut out = GradedGroup::new();
        for d in self.degrees() {
            let n = self.rank(d);
            let out_rank = snf_rank(&self.boundary(d));
            let incoming = self.boundary(d + 1);
            let snf = smith_normal_form(&incoming);
            let diag: Vec<BigInt> =
                snf.diagonal().into_iter().filter(|x| x != &BigInt::from(0)).collect();
            let free = n - out_rank - diag.len();
            let mut orders = diag;
            orders.extend(std::iter::repeat_n(BigInt::from(0), free));
            out.add(d, &FgAbGroup::from_cyclic_orders(&orders));
        }
        out
    }
}

fn snf_rank(m: &IntMatrix) -> usize {
    if m.rows() == 0 || m.cols() == 0 {
        return 0;
    }
    smith_normal_form(m).diagonal().iter().filter(|x| **x != BigInt::from(0)).count()
}

/// Reduced cellular chain complex of a block.
pub fn block_chain_complex(b: &Block) -> ChainComplex {
    let mut c = ChainComplex::new();
    match *b {
        Block::Sphere(d) => c.add_cell(d as i32, &[]),
        Block::Moore(t) => {
            c.add_cell(3, &[]);
            c.add_cell(4, &[t as i64]);
        }
        Block::SigmaCP2 => {
            c.add_cell(3, &[]);
            c.add_cell(5, &[]);
        }
        Block::SigmaCP2Tw(r) => {
            c.add_cell(3, &[]);
            c.add_cell(4, &[1i64 << r]);
            c.add_cell(5, &[0]);
        }
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorSymbol {
    /// Fundamental class of a sphere in its own dimension.
    Iota,
    Eta,
    EtaSq,
    IotaEta(u32),
    IotaEtaSq(u32),
    Xi(u32),
    Epsilon(u32),
    Alpha,
    AlphaR(u32),
}

impl fmt::Display for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorSymbol::Iota => write!(f, "iota"),
            GeneratorSymbol::Eta => write!(f, "eta"),
            GeneratorSymbol::EtaSq => write!(f, "eta^2"),
            GeneratorSymbol::IotaEta(r) => write!(f, "iota_{r}.eta"),
            GeneratorSymbol::IotaEtaSq(r) => write!(f, "iota_{r}.eta^2"),
            GeneratorSymbol::Xi(r) => write!(f, "xi_{r}"),
            GeneratorSymbol::Epsilon(s) => write!(f, "epsilon_{s}"),
            GeneratorSymbol::Alpha => write!(f, "alpha"),
            GeneratorSymbol::AlphaR(r) => write!(f, "alpha_{r}"),
        }
    }
}

/// Formal integer combination of generator symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Combo(BTreeMap<GeneratorSymbol, i64>);

impl Combo {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn single(g: GeneratorSymbol) -> Self {
        Self::term(g, 1)
    }

    pub fn term(g: GeneratorSymbol, c: i64) -> Self {
        let mut m = BTreeMap::new();
        if c != 0 {
            m.insert(g, c);
        }
        Combo(m)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, g: &GeneratorSymbol) -> i64 {
        self.0.get(g).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GeneratorSymbol, &i64)> {
        self.0.iter()
    }

    pub fn add(&self, other: &Combo) -> Combo {
        let mut m = self.0.clone();
        for (g, c) in &other.0 {
            *m.entry(*g).or_insert(0) += c;
        }
        m.retain(|_, c| *c != 0);
        Combo(m)
    }

    pub fn scale(&self, k: i64) -> Combo {
        let mut m: BTreeMap<_, _> = self.0.iter().map(|(g, c)| (*g, c * k)).collect();
        m.retain(|_, c| *c != 0);
        Combo(m)
    }
}

impl fmt::Display for Combo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(g, c)| if *c == 1 { g.to_string() } else { format!("{c}{g}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A homotopy group presented by basis generators with their orders
/// (0 for infinite) plus rewrite rules for redundant symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomotopyGroup {
    pub basis: Vec<(GeneratorSymbol, u64)>,
    pub rewrites: Vec<(GeneratorSymbol, Combo)>,
}

impl HomotopyGroup {
    fn trivial() -> Self {
        HomotopyGroup { basis: Vec::new(), rewrites: Vec::new() }
    }

    fn cyclic(g: GeneratorSymbol, order: u64) -> Self {
        HomotopyGroup { basis: vec![(g, order)], rewrites: Vec::new() }
    }

    pub fn group(&self) -> FgAbGroup {
        let orders: Vec<BigInt> = self.basis.iter().map(|(_, o)| BigInt::from(*o)).collect();
        FgAbGroup::from_cyclic_orders(&orders)
    }

    pub fn generators(&self) -> Vec<GeneratorSymbol> {
        self.basis.iter().map(|(g, _)| *g).collect()
    }

    pub fn contains_symbol(&self, g: &GeneratorSymbol) -> bool {
        self.basis.iter().any(|(b, _)| b == g) || self.rewrites.iter().any(|(b, _)| b == g)
    }

    /// Canonical form of a combination in this group.
    pub fn reduce(&self, c: &Combo) -> Result<Combo, BlockError> {
        let mut acc = Combo::zero();
        for (g, k) in c.terms() {
            if let Some((_, rw)) = self.rewrites.iter().find(|(s, _)| s == g) {
                acc = acc.add(&rw.scale(*k));
            } else if self.basis.iter().any(|(b, _)| b == g) {
                acc = acc.add(&Combo::term(*g, *k));
            } else {
                return Err(BlockError::ForeignGenerator(g.to_string()));
            }
        }
        let mut out = Combo::zero();
        for (g, order) in &self.basis {
            let k = acc.coeff(g);
            let k = if *order == 0 { k } else { k.rem_euclid(*order as i64) };
            out = out.add(&Combo::term(*g, k));
        }
        Ok(out)
    }

    /// Additive order of a generator symbol (0 for infinite).
    pub fn order_of(&self, g: &GeneratorSymbol) -> Result<u64, BlockError> {
        let c = self.reduce(&Combo::single(*g))?;
        if c.is_zero() {
            return Ok(1);
        }
        for k in 1..=64i64 {
            if self.reduce(&c.scale(k))?.is_zero() {
                return Ok(k as u64);
            }
        }
        Ok(0)
    }
}

/// `pi_n(b)` for `n` in {4, 5}, with labelled generators.
pub fn homotopy_group(b: &Block, n: u32) -> Result<HomotopyGroup, BlockError> {
    use GeneratorSymbol as G;
    let oob = || BlockError::OutOfCatalog { block: b.to_string(), n };
    if n != 4 && n != 5 {
        return Err(oob());
    }
    let g = match (*b, n) {
        (Block::Sphere(3), 4) => HomotopyGroup::cyclic(G::Eta, 2),
        (Block::Sphere(3), 5) => HomotopyGroup::cyclic(G::EtaSq, 2),
        (Block::Sphere(4), 4) => HomotopyGroup::cyclic(G::Iota, 0),
        (Block::Sphere(4), 5) => HomotopyGroup::cyclic(G::Eta, 2),
        (Block::Sphere(5), 4) => HomotopyGroup::trivial(),
        (Block::Sphere(5), 5) => HomotopyGroup::cyclic(G::Iota, 0),
        (Block::Sphere(6), _) => HomotopyGroup::trivial(),
        (Block::Sphere(_), _) => return Err(oob()),
        (Block::Moore(t), _) if t % 2 == 1 => HomotopyGroup::trivial(),
        (Block::Moore(t), 4) => {
            let r = t.trailing_zeros();
            HomotopyGroup::cyclic(G::IotaEta(r), 2)
        }
        (Block::Moore(t), _) => {
            let r = t.trailing_zeros();
            if r == 1 {
                HomotopyGroup {
                    basis: vec![(G::Xi(1), 4)],
                    rewrites: vec![(G::IotaEtaSq(1), Combo::term(G::Xi(1), 2))],
                }
            } else {
                HomotopyGroup { basis: vec![(G::Xi(r), 2), (G::IotaEtaSq(r), 2)], rewrites: Vec::new() }
            }
        }
        (Block::SigmaCP2, 4) | (Block::SigmaCP2Tw(_), 4) => HomotopyGroup::trivial(),
        (Block::SigmaCP2, _) => HomotopyGroup::cyclic(G::Alpha, 0),
        (Block::SigmaCP2Tw(r), _) => HomotopyGroup {
            basis: vec![(G::AlphaR(r), 0), (G::Epsilon(r), 2)],
            rewrites: Vec::new(),
        },
    };
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransferTag {
    Identity,
    HopfEta,
    InclIota,
    IotaRS,
    JS,
    JRS,
    JSIotaRS,
    IotaEta,
}

impl fmt::Display for TransferTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TransferTag::Identity => "identity",
            TransferTag::HopfEta => "hopf_eta",
            TransferTag::InclIota => "incl_iota_r",
            TransferTag::IotaRS => "iota_rs",
            TransferTag::JS => "j_s",
            TransferTag::JRS => "j_rs",
            TransferTag::JSIotaRS => "j_s.iota_rs",
            TransferTag::IotaEta => "iota_r.eta",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransferMap {
    pub tag: TransferTag,
    pub source: Block,
    pub target: Block,
}

impl TransferMap {
    pub fn new(tag: TransferTag, source: Block, target: Block) -> Result<Self, BlockError> {
        let m = TransferMap { tag, source, target };
        if m.compatible() {
            Ok(m)
        } else {
            Err(BlockError::Incompatible {
                tag: tag.to_string(),
                source_block: source.to_string(),
                target: target.to_string(),
            })
        }
    }

    fn compatible(&self) -> bool {
        use Block::*;
        let even = |b: &Block| b.two_exponent().is_some();
        match self.tag {
            TransferTag::Identity => self.source == self.target,
            TransferTag::HopfEta => self.source == Sphere(4) && self.target == Sphere(3),
            TransferTag::InclIota => self.source == Sphere(3) && even(&self.target),
            TransferTag::IotaEta => self.source == Sphere(4) && even(&self.target),
            TransferTag::IotaRS => even(&self.source) && even(&self.target),
            TransferTag::JS => match (self.source.two_exponent(), self.target) {
                (Some(r), SigmaCP2Tw(s)) => r == s,
                _ => false,
            },
            TransferTag::JRS => matches!((self.source, self.target), (SigmaCP2Tw(_), SigmaCP2Tw(_))),
            TransferTag::JSIotaRS => even(&self.source) && matches!(self.target, SigmaCP2Tw(_)),
        }
    }
}

fn pow2(e: u32) -> i64 {
    1i64 << e.min(62)
}

/// Image of a generator under a catalog map, reduced in the target group.
pub fn transfer(g: &GeneratorSymbol, via: &TransferMap) -> Result<Combo, BlockError> {
    use GeneratorSymbol as G;
    if !via.compatible() {
        return Err(BlockError::Incompatible {
            tag: via.tag.to_string(),
            source_block: via.source.to_string(),
            target: via.target.to_string(),
        });
    }
    let degree = [4u32, 5]
        .into_iter()
        .find(|&n| homotopy_group(&via.source, n).is_ok_and(|h| h.contains_symbol(g)))
        .ok_or_else(|| BlockError::ForeignGenerator(g.to_string()))?;
    let target_group = homotopy_group(&via.target, degree)?;
    let foreign = || BlockError::ForeignGenerator(g.to_string());
    let r_src = via.source.two_exponent();
    let image = match via.tag {
        TransferTag::Identity => Combo::single(*g),
        TransferTag::HopfEta => match g {
            G::Iota => Combo::single(G::Eta),
            G::Eta => Combo::single(G::EtaSq),
            _ => return Err(foreign()),
        },
        TransferTag::InclIota => {
            let s = via.target.two_exponent().unwrap();
            match g {
                G::Eta => Combo::single(G::IotaEta(s)),
                G::EtaSq => Combo::single(G::IotaEtaSq(s)),
                _ => return Err(foreign()),
            }
        }
        TransferTag::IotaEta => {
            let s = via.target.two_exponent().unwrap();
            match g {
                G::Iota => Combo::single(G::IotaEta(s)),
                G::Eta => Combo::single(G::IotaEtaSq(s)),
                _ => return Err(foreign()),
            }
        }
        TransferTag::IotaRS => {
            let (r, s) = (r_src.unwrap(), via.target.two_exponent().unwrap());
            // On the bottom cell the map has degree 1 when r >= s and
            // 2^(s-r) otherwise; xi_r = iota_1r . xi_1 picks up 2^(r-s) when r > s.
            let bottom = if r >= s { 1 } else { pow2(s - r) };
            match g {
                G::IotaEta(_) => Combo::term(G::IotaEta(s), bottom),
                G::IotaEtaSq(_) => Combo::term(G::IotaEtaSq(s), bottom),
                G::Xi(_) if r <= s => Combo::single(G::Xi(s)),
                G::Xi(_) => Combo::term(G::Xi(s), pow2(r - s)),
                _ => return Err(foreign()),
            }
        }
        TransferTag::JS => match g {
            G::IotaEta(_) | G::IotaEtaSq(_) => Combo::zero(),
            G::Xi(r) => Combo::single(G::Epsilon(*r)),
            _ => return Err(foreign()),
        },
        TransferTag::JRS => {
            let (Block::SigmaCP2Tw(r), Block::SigmaCP2Tw(s)) = (via.source, via.target) else {
                unreachable!()
            };
            match g {
                G::Epsilon(_) if r > s => Combo::zero(),
                G::Epsilon(_) => Combo::single(G::Epsilon(s)),
                _ => {
                    return Err(BlockError::OutOfCatalog { block: format!("{} via j_rs", g), n: degree })
                }
            }
        }
        TransferTag::JSIotaRS => {
            let r = r_src.unwrap();
            let Block::SigmaCP2Tw(s) = via.target else { unreachable!() };
            match g {
                G::IotaEta(_) | G::IotaEtaSq(_) => Combo::zero(),
                G::Xi(_) if r <= s => Combo::single(G::Epsilon(s)),
                G::Xi(_) => Combo::term(G::Epsilon(s), pow2(r - s)),
                _ => return Err(foreign()),
            }
        }
    };
    target_group.reduce(&image)
}

/// Transfer of a formal combination, term by term.
pub fn transfer_combo(c: &Combo, via: &TransferMap) -> Result<Combo, BlockError> {
    let mut acc = Combo::zero();
    let mut degree = None;
    for (g, k) in c.terms() {
        acc = acc.add(&transfer(g, via)?.scale(*k));
        if degree.is_none() {
            degree = [4u32, 5]
                .into_iter()
                .find(|&n| homotopy_group(&via.source, n).is_ok_and(|h| h.contains_symbol(g)));
        }
    }
    match degree {
        Some(n) => homotopy_group(&via.target, n)?.reduce(&acc),
        None => Ok(acc),
    }
}

/// Stable stems `pi_0^S .. pi_3^S`.
pub fn stable_stem(k: i32) -> FgAbGroup {
    match k {
        0 => FgAbGroup::free(1),
        1 | 2 => FgAbGroup::cyclic(2u32),
        3 => FgAbGroup::cyclic(24u32),
        k if k < 0 => FgAbGroup::zero(),
        _ => panic!("stable stem {k} not tabulated"),
    }
}

/// `pi^n_S` of the desuspension of `b`, for `n` in {3, 4}.
pub fn stable_cohomotopy_block(b: &Block, n: u32) -> Result<FgAbGroup, BlockError> {
    if n != 3 && n != 4 {
        return Err(BlockError::Degree(n));
    }
    Ok(match (*b, n) {
        (Block::Sphere(d), _) => stable_stem(d as i32 - 1 - n as i32),
        (Block::Moore(t), 3) => FgAbGroup::cyclic(t),
        (Block::Moore(_), _) => FgAbGroup::zero(),
        (Block::SigmaCP2, 3) => FgAbGroup::zero(),
        (Block::SigmaCP2Tw(r), 3) => FgAbGroup::cyclic(BigInt::from(2u32).pow(r + 1)),
        (Block::SigmaCP2, _) | (Block::SigmaCP2Tw(_), _) => FgAbGroup::free(1),
    })
}

/// Dense matrix over Z/2; rows index the target, columns the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Z2Matrix {
    pub rows: usize,
    pub cols: usize,
    bits: Vec<u8>,
}

impl Z2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Z2Matrix { rows, cols, bits: vec![0; rows * cols] }
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.bits[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.bits[i * self.cols + j] = v & 1;
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn mul(&self, other: &Z2Matrix) -> Z2Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Z2Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let s = (0..self.cols).map(|k| self.get(i, k) & other.get(k, j)).fold(0, |a, b| a ^ b);
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<u8>> = (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&i| m[i][c] == 1) else { continue };
            m.swap(rank, p);
            for i in 0..self.rows {
                if i != rank && m[i][c] == 1 {
                    for k in 0..self.cols {
                        m[i][k] ^= m[rank][k];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn block_sum(&self, other: &Z2Matrix) -> Z2Matrix {
        let mut out = Z2Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }
}

/// A higher Bockstein `beta_r` acting nontrivially out of `degree`, on the
/// basis class with the given index in that degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BocksteinFlag {
    pub degree: i32,
    pub index: usize,
    pub r: u32,
}

/// Mod-2 cohomology dimensions with `Sq^1`, `Sq^2` out of each degree.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteenrodTable {
    pub dims: BTreeMap<i32, usize>,
    pub sq1: BTreeMap<i32, Z2Matrix>,
    pub sq2: BTreeMap<i32, Z2Matrix>,
    pub bockstein: Vec<BocksteinFlag>,
}

impl SteenrodTable {
    pub fn dim(&self, d: i32) -> usize {
        self.dims.get(&d).copied().unwrap_or(0)
    }

    fn op(&self, which: u8, d: i32) -> Z2Matrix {
        let table = if which == 1 { &self.sq1 } else { &self.sq2 };
        table
            .get(&d)
            .cloned()
            .unwrap_or_else(|| Z2Matrix::zeros(self.dim(d + which as i32), self.dim(d)))
    }

    /// `Sq^1` out of degree `d`.
    pub fn sq1(&self, d: i32) -> Z2Matrix {
        self.op(1, d)
    }

    /// `Sq^2` out of degree `d`.
    pub fn sq2(&self, d: i32) -> Z2Matrix {
        self.op(2, d)
    }

    pub fn sq1_squares_vanish(&self) -> bool {
        self.dims.keys().all(|&d| {
            let a = self.sq1(d + 1);
            let b = self.sq1(d);
            a.cols == 0 || b.cols == 0 || a.mul(&b).is_zero()
        })
    }

    pub fn is_zero(&self) -> bool {
        self.sq1.values().all(Z2Matrix::is_zero) && self.sq2.values().all(Z2Matrix::is_zero)
    }

    /// Direct sum; basis classes of `other` follow those of `self`.
    pub fn direct_sum(&self, other: &SteenrodTable) -> SteenrodTable {
        let mut out = SteenrodTable::default();
        let degrees: std::collections::BTreeSet<i32> =
            self.dims.keys().chain(other.dims.keys()).copied().collect();
        for &d in &degrees {
            out.dims.insert(d, self.dim(d) + other.dim(d));
        }
        for &d in &degrees {
            out.sq1.insert(d, self.sq1(d).block_sum(&other.sq1(d)));
            out.sq2.insert(d, self.sq2(d).block_sum(&other.sq2(d)));
        }
        out.bockstein = self.bockstein.clone();
        for b in &other.bockstein {
            out.bockstein.push(BocksteinFlag { index: b.index + self.dim(b.degree), ..*b });
        }
        out.prune();
        out
    }

    /// Shift all degrees by `by` (stable operations commute with suspension).
    pub fn shifted(&self, by: i32) -> SteenrodTable {
        SteenrodTable {
            dims: self.dims.iter().map(|(d, n)| (d + by, *n)).collect(),
            sq1: self.sq1.iter().map(|(d, m)| (d + by, m.clone())).collect(),
            sq2: self.sq2.iter().map(|(d, m)| (d + by, m.clone())).collect(),
            bockstein: self.bockstein.iter().map(|b| BocksteinFlag { degree: b.degree + by, ..*b }).collect(),
        }
    }

    /// Set one entry of `Sq^which` from class `(d, j)` to class `(d + which, i)`.
    pub fn set_op(&mut self, which: u8, d: i32, i: usize, j: usize) {
        let mut m = self.op(which, d);
        m.set(i, j, 1);
        if which == 1 {
            self.sq1.insert(d, m);
        } else {
            self.sq2.insert(d, m);
        }
    }

    fn prune(&mut self) {
        self.dims.retain(|_, n| *n > 0);
        self.sq1.retain(|_, m| m.rows > 0 && m.cols > 0);
        self.sq2.retain(|_, m| m.rows > 0 && m.cols > 0);
    }
}

/// Mod-2 Steenrod action on a block, in the block's own degrees.
pub fn steenrod_action(b: &Block) -> SteenrodTable {
    let mut t = SteenrodTable::default();
    match *b {
        Block::Sphere(d) => {
            t.dims.insert(d as i32, 1);
        }
        Block::Moore(q) => {
            if let Some(r) = b.two_exponent() {
                t.dims.insert(3, 1);
                t.dims.insert(4, 1);
                if r == 1 {
                    t.set_op(1, 3, 0, 0);
                }
                t.bockstein.push(BocksteinFlag { degree: 3, index: 0, r });
            } else {
                debug_assert!(q % 2 == 1);
            }
        }
        Block::SigmaCP2 => {
            t.dims.insert(3, 1);
            t.dims.insert(5, 1);
            t.set_op(2, 3, 0, 0);
        }
        Block::SigmaCP2Tw(r) => {
            t.dims.insert(3, 1);
            t.dims.insert(4, 1);
            t.dims.insert(5, 1);
            if r == 1 {
                t.set_op(1, 3, 0, 0);
            }
            t.set_op(2, 3, 0, 0);
            t.bockstein.push(BocksteinFlag { degree: 3, index: 0, r });
        }
    }
    t.prune();
    t
}

/// Homology each block is defined to have, for cross-checking the complexes.
pub fn advertised_homology(b: &Block) -> GradedGroup {
    let z = FgAbGroup::free(1);
    match *b {
        Block::Sphere(d) => GradedGroup::from_pairs([(d as i32, z)]),
        Block::Moore(t) => GradedGroup::from_pairs([(3, FgAbGroup::cyclic(t))]),
        Block::SigmaCP2 => GradedGroup::from_pairs([(3, z.clone()), (5, z)]),
        Block::SigmaCP2Tw(r) => {
            GradedGroup::from_pairs([(3, FgAbGroup::cyclic(1u64 << r)), (5, z)])
        }
    }
}

/// Sum of a list of block groups.
pub fn sum_groups(gs: &[FgAbGroup]) -> FgAbGroup {
    direct_sum(gs.iter())
}
