//! The splitting pipeline `W2 -> W3 -> W4 -> W5` and the move system that
//! reduces the 6-cell attaching data to a single exceptional map `f`.
//!
//! Basis conventions. A `WedgeClass` lists its summands as S^3, S^4, S^5,
//! even Moore (sorted by exponent), odd Moore, SigmaCP2, twisted (sorted by
//! exponent). A `Coeffs4` record addresses the S^3 and even Moore slots of the
//! wedge it is attached to. A `Coeffs5` record uses the ladder order: even
//! Moore slots, then S^3 slots, then S^4 slots for `x`; even Moore slots for
//! `y`; twisted slots for `z`. All indices are 0-based.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blocks::{prime_power_u64, Block, GeneratorSymbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SplitError {
    #[error("torsion entry {0} is not a prime power")]
    NotPrimePower(u64),
    #[error("expected {expected} phi4 records (one per 5-cell), found {found}")]
    RecordCount { expected: usize, found: usize },
    #[error("{path}: expected length {expected}, found {found}")]
    Length { path: String, expected: usize, found: usize },
    #[error("{path}: value {value} out of range")]
    Value { path: String, value: u8 },
    #[error("{path}: y = {value} needs r = 1, slot has r = {r}")]
    HigherRung { path: String, value: u8, r: u32 },
    #[error("{path}: index {index} out of range (length {len})")]
    Index { path: String, index: usize, len: usize },
    #[error("illegal move {mv}: {reason}")]
    IllegalMove { mv: String, reason: String },
}

type Result<T> = std::result::Result<T, SplitError>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyTable {
    pub m: usize,
    pub n: usize,
    /// Torsion of H_2 as a multiset of prime powers.
    pub torsion: Vec<u64>,
}

impl HomologyTable {
    pub fn new(m: usize, n: usize, torsion: Vec<u64>) -> Result<Self> {
        let h = HomologyTable { m, n, torsion };
        h.validate()?;
        Ok(h)
    }

    pub fn validate(&self) -> Result<()> {
        match self.torsion.iter().find(|t| prime_power_u64(**t).is_none()) {
            Some(t) => Err(SplitError::NotPrimePower(*t)),
            None => Ok(()),
        }
    }

    pub fn sorted_torsion(&self) -> Vec<u64> {
        let mut t = self.torsion.clone();
        t.sort_unstable();
        t
    }
}

/// Canonical element of the class of wedges the pipeline stays inside.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WedgeClass {
    pub n3: usize,
    pub n4: usize,
    pub n5: usize,
    /// Exponents r of the P^4(2^r) summands, nondecreasing.
    pub evens: Vec<u32>,
    /// Odd prime powers t of the P^4(t) summands, nondecreasing.
    pub odds: Vec<u64>,
    pub b: usize,
    /// Exponents s of the SigmaCP2(2^s) summands, nondecreasing.
    pub tw: Vec<u32>,
}

impl WedgeClass {
    pub fn canonicalize(&mut self) {
        self.evens.sort_unstable();
        self.odds.sort_unstable();
        self.tw.sort_unstable();
    }

    pub fn a(&self) -> usize {
        self.evens.len()
    }

    pub fn c(&self) -> usize {
        self.tw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks().is_empty()
    }

    /// Summands in canonical basis order.
    pub fn blocks(&self) -> Vec<Block> {
        let mut out = Vec::new();
        out.extend(std::iter::repeat_n(Block::Sphere(3), self.n3));
        out.extend(std::iter::repeat_n(Block::Sphere(4), self.n4));
        out.extend(std::iter::repeat_n(Block::Sphere(5), self.n5));
        out.extend(self.evens.iter().map(|r| Block::Moore(1u64 << r)));
        out.extend(self.odds.iter().map(|t| Block::Moore(*t)));
        out.extend(std::iter::repeat_n(Block::SigmaCP2, self.b));
        out.extend(self.tw.iter().map(|s| Block::SigmaCP2Tw(*s)));
        out
    }

    /// Ladder value of each `Coeffs5::x` slot.
    pub fn ladder(&self) -> Vec<Rung> {
        let mut out: Vec<Rung> = self.evens.iter().map(|r| Rung::Finite(*r)).collect();
        out.extend(std::iter::repeat_n(Rung::Omega, self.n3));
        out.extend(std::iter::repeat_n(Rung::OmegaPlusOne, self.n4));
        out
    }

    fn remove_even(&mut self, r: u32) {
        let i = self.evens.iter().position(|e| *e == r).expect("even slot present");
        self.evens.remove(i);
    }

    fn remove_tw(&mut self, s: u32) {
        let i = self.tw.iter().position(|e| *e == s).expect("twisted slot present");
        self.tw.remove(i);
    }
}

fn render_power(name: &str, k: usize, out: &mut Vec<String>) {
    match k {
        0 => {}
        1 => out.push(name.to_string()),
        _ => out.push(format!("({name})^{k}")),
    }
}

impl fmt::Display for WedgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        render_power("S^3", self.n3, &mut parts);
        render_power("S^4", self.n4, &mut parts);
        render_power("S^5", self.n5, &mut parts);
        for r in &self.evens {
            parts.push(format!("P^4(2^{r})"));
        }
        for t in &self.odds {
            parts.push(format!("P^4({t})"));
        }
        render_power("SigmaCP2", self.b, &mut parts);
        for s in &self.tw {
            parts.push(format!("SigmaCP2(2^{s})"));
        }
        if parts.is_empty() {
            write!(f, "*")
        } else {
            write!(f, "{}", parts.join(" v "))
        }
    }
}

/// Ladder value of a `Coeffs5::x` slot; the two infinite rungs sit above
/// every finite exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rung {
    Finite(u32),
    Omega,
    OmegaPlusOne,
}

impl fmt::Display for Rung {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rung::Finite(r) => write!(f, "{r}"),
            Rung::Omega => write!(f, "w"),
            Rung::OmegaPlusOne => write!(f, "w+1"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coeffs4 {
    #[serde(default)]
    pub x: Vec<u8>,
    #[serde(default)]
    pub y: Vec<u8>,
}

impl Coeffs4 {
    pub fn zeros(w: &WedgeClass) -> Self {
        Coeffs4 { x: vec![0; w.n3], y: vec![0; w.a()] }
    }

    pub fn validate(&self, w: &WedgeClass, path: &str) -> Result<()> {
        check_len(&self.x, w.n3, &format!("{path}.x"))?;
        check_len(&self.y, w.a(), &format!("{path}.y"))?;
        check_bits(&self.x, 1, &format!("{path}.x"))?;
        check_bits(&self.y, 1, &format!("{path}.y"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coeffs5 {
    #[serde(default)]
    pub x: Vec<u8>,
    #[serde(default)]
    pub y: Vec<u8>,
    #[serde(default)]
    pub z: Vec<u8>,
}

impl Coeffs5 {
    pub fn zeros(w: &WedgeClass) -> Self {
        Coeffs5 { x: vec![0; w.a() + w.n3 + w.n4], y: vec![0; w.a()], z: vec![0; w.c()] }
    }

    pub fn validate(&self, w: &WedgeClass, path: &str) -> Result<()> {
        check_len(&self.x, w.a() + w.n3 + w.n4, &format!("{path}.x"))?;
        check_len(&self.y, w.a(), &format!("{path}.y"))?;
        check_len(&self.z, w.c(), &format!("{path}.z"))?;
        check_bits(&self.x, 1, &format!("{path}.x"))?;
        check_bits(&self.z, 1, &format!("{path}.z"))?;
        check_bits(&self.y, 3, &format!("{path}.y"))?;
        for (j, (&v, &r)) in self.y.iter().zip(&w.evens).enumerate() {
            if v >= 2 && r > 1 {
                return Err(SplitError::HigherRung { path: format!("{path}.y[{j}]"), value: v, r });
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.x.iter().chain(&self.y).chain(&self.z).all(|v| *v == 0)
    }
}

fn check_len(v: &[u8], expected: usize, path: &str) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(SplitError::Length { path: path.to_string(), expected, found: v.len() })
    }
}

fn check_bits(v: &[u8], max: u8, path: &str) -> Result<()> {
    match v.iter().position(|b| *b > max) {
        Some(i) => Err(SplitError::Value { path: format!("{path}[{i}]"), value: v[i] }),
        None => Ok(()),
    }
}

pub fn build_w2(h: &HomologyTable) -> Result<WedgeClass> {
    h.validate()?;
    let mut w = WedgeClass { n3: h.n, ..Default::default() };
    for &t in &h.torsion {
        if t.is_power_of_two() {
            w.evens.push(t.trailing_zeros());
        } else {
            w.odds.push(t);
        }
    }
    w.canonicalize();
    Ok(w)
}

pub fn build_w3(w2: &WedgeClass, n: usize) -> WedgeClass {
    WedgeClass { n4: w2.n4 + n, ..w2.clone() }
}

/// Cone on a 5-cell attached by `c`.
pub fn attach_5cell(w: &WedgeClass, c: &Coeffs4) -> Result<WedgeClass> {
    c.validate(w, "phi4")?;
    let mut out = w.clone();
    if c.x.contains(&1) {
        out.n3 -= 1;
        out.b += 1;
    } else if let Some(mu) = c.y.iter().rposition(|b| *b == 1) {
        let r = out.evens.remove(mu);
        out.tw.push(r);
    } else {
        out.n5 += 1;
    }
    out.canonicalize();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move4 {
    /// `x'[i] = x[perm[i]]`.
    Permute(Vec<usize>),
    XX { from: usize, to: usize },
    XY { from: usize, to: usize },
    /// Needs `from >= to`.
    YY { from: usize, to: usize },
}

impl fmt::Display for Move4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move4::Permute(p) => write!(f, "permute{p:?}"),
            Move4::XX { from, to } => write!(f, "x{from}->x{to}"),
            Move4::XY { from, to } => write!(f, "x{from}->y{to}"),
            Move4::YY { from, to } => write!(f, "y{from}->y{to}"),
        }
    }
}

pub fn apply_move4(w: &WedgeClass, c: &Coeffs4, mv: &Move4) -> Result<Coeffs4> {
    c.validate(w, "phi4")?;
    let illegal = |reason: &str| SplitError::IllegalMove { mv: mv.to_string(), reason: reason.into() };
    let idx = |path: &str, i: usize, len: usize| {
        if i < len {
            Ok(())
        } else {
            Err(SplitError::Index { path: path.into(), index: i, len })
        }
    };
    let mut out = c.clone();
    match mv {
        Move4::Permute(p) => {
            let mut seen = p.clone();
            seen.sort_unstable();
            if seen != (0..c.x.len()).collect::<Vec<_>>() {
                return Err(illegal("not a permutation of the S^3 slots"));
            }
            out.x = p.iter().map(|&i| c.x[i]).collect();
        }
        Move4::XX { from, to } => {
            idx("phi4.x", *from, c.x.len())?;
            idx("phi4.x", *to, c.x.len())?;
            if from == to {
                return Err(illegal("source and target coincide"));
            }
            out.x[*to] ^= c.x[*from];
        }
        Move4::XY { from, to } => {
            idx("phi4.x", *from, c.x.len())?;
            idx("phi4.y", *to, c.y.len())?;
            out.y[*to] ^= c.x[*from];
        }
        Move4::YY { from, to } => {
            idx("phi4.y", *from, c.y.len())?;
            idx("phi4.y", *to, c.y.len())?;
            if from <= to {
                return Err(illegal("needs from > to"));
            }
            out.y[*to] ^= c.y[*from];
        }
    }
    Ok(out)
}

/// Rewrites `y = 2, 3` on exponent-1 slots using `2 xi_1 = iota_1 eta^2`.
pub fn normalize_coeffs5(w: &WedgeClass, c: &Coeffs5) -> Result<Coeffs5> {
    c.validate(w, "phi5")?;
    let mut out = c.clone();
    for j in 0..out.y.len() {
        if out.y[j] >= 2 {
            out.y[j] -= 2;
            out.x[j] ^= 1;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move5 {
    X { from: usize, to: usize },
    Y { from: usize, to: usize },
    Z { from: usize, to: usize },
    YZ { from: usize, to: usize },
}

impl fmt::Display for Move5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move5::X { from, to } => write!(f, "x{from}->x{to}"),
            Move5::Y { from, to } => write!(f, "y{from}->y{to}"),
            Move5::Z { from, to } => write!(f, "z{from}->z{to}"),
            Move5::YZ { from, to } => write!(f, "y{from}->z{to}"),
        }
    }
}

impl Move5 {
    /// Every move whose side condition holds on `w`.
    pub fn all_legal(w: &WedgeClass) -> Vec<Move5> {
        let ladder = w.ladder();
        let mut out = Vec::new();
        for k in 0..ladder.len() {
            for l in 0..ladder.len() {
                if k != l && ladder[k] >= ladder[l] {
                    out.push(Move5::X { from: k, to: l });
                }
            }
        }
        for k in 0..w.a() {
            for l in 0..w.a() {
                if k != l && w.evens[k] <= w.evens[l] {
                    out.push(Move5::Y { from: k, to: l });
                }
            }
            for l in 0..w.c() {
                if w.evens[k] <= w.tw[l] {
                    out.push(Move5::YZ { from: k, to: l });
                }
            }
        }
        for k in 0..w.c() {
            for l in 0..w.c() {
                if k != l && w.tw[k] <= w.tw[l] {
                    out.push(Move5::Z { from: k, to: l });
                }
            }
        }
        out
    }
}

/// Apply one move to normalized 6-cell data. Sources act on targets by
/// addition mod 2; on exponent-1 Moore slots the y-move uses the sign of
/// the identity that keeps the `xi_1` coefficient in {0, 1}.
pub fn apply_move(w: &WedgeClass, c: &Coeffs5, mv: &Move5) -> Result<Coeffs5> {
    let mut out = normalize_coeffs5(w, c)?;
    let illegal = |reason: String| SplitError::IllegalMove { mv: mv.to_string(), reason };
    let idx = |path: &str, i: usize, len: usize| {
        if i < len {
            Ok(())
        } else {
            Err(SplitError::Index { path: path.into(), index: i, len })
        }
    };
    let ladder = w.ladder();
    match *mv {
        Move5::X { from, to } => {
            idx("phi5.x", from, ladder.len())?;
            idx("phi5.x", to, ladder.len())?;
            if from == to || ladder[from] < ladder[to] {
                return Err(illegal(format!("needs r(from) >= r(to), have {} < {}", ladder[from], ladder[to])));
            }
            out.x[to] ^= out.x[from];
        }
        Move5::Y { from, to } => {
            idx("phi5.y", from, w.a())?;
            idx("phi5.y", to, w.a())?;
            if from == to || w.evens[from] > w.evens[to] {
                return Err(illegal(format!("needs r(from) <= r(to), have {} > {}", w.evens[from], w.evens[to])));
            }
            out.y[to] ^= out.y[from];
        }
        Move5::Z { from, to } => {
            idx("phi5.z", from, w.c())?;
            idx("phi5.z", to, w.c())?;
            if from == to || w.tw[from] > w.tw[to] {
                return Err(illegal(format!("needs s(from) <= s(to), have {} > {}", w.tw[from], w.tw[to])));
            }
            out.z[to] ^= out.z[from];
        }
        Move5::YZ { from, to } => {
            idx("phi5.y", from, w.a())?;
            idx("phi5.z", to, w.c())?;
            if w.evens[from] > w.tw[to] {
                return Err(illegal(format!("needs r(from) <= s(to), have {} > {}", w.evens[from], w.tw[to])));
            }
            out.z[to] ^= out.y[from];
        }
    }
    Ok(out)
}

/// Surviving slots of the reduced 6-cell attaching map.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Picks {
    pub u: Option<usize>,
    pub v: Option<usize>,
    pub w: Option<usize>,
}

impl Picks {
    pub fn is_empty(&self) -> bool {
        self.u.is_none() && self.v.is_none() && self.w.is_none()
    }

    pub fn to_coeffs(&self, w4: &WedgeClass) -> Coeffs5 {
        let mut c = Coeffs5::zeros(w4);
        if let Some(u) = self.u {
            c.x[u] = 1;
        }
        if let Some(v) = self.v {
            c.y[v] = 1;
        }
        if let Some(k) = self.w {
            c.z[k] = 1;
        }
        c
    }
}

pub fn reduce_phi5(w4: &WedgeClass, c: &Coeffs5) -> Result<Picks> {
    let c = normalize_coeffs5(w4, c)?;
    let ladder = w4.ladder();
    let set = |v: &[u8]| -> Vec<usize> { (0..v.len()).filter(|&i| v[i] == 1).collect() };

    // Largest rung, then largest position.
    let mut u = set(&c.x).into_iter().max_by(|&i, &j| ladder[i].cmp(&ladder[j]).then(i.cmp(&j)));
    // Smallest rung, then smallest position.
    let v = set(&c.y).into_iter().min_by(|&i, &j| w4.evens[i].cmp(&w4.evens[j]).then(i.cmp(&j)));
    let mut w = set(&c.z).into_iter().min_by(|&i, &j| w4.tw[i].cmp(&w4.tw[j]).then(i.cmp(&j)));

    if let (Some(ui), Some(vi)) = (u, v) {
        if ladder[ui] == Rung::Finite(w4.evens[vi]) {
            u = Some(vi);
        }
    }
    if let (Some(vi), Some(wi)) = (v, w) {
        if w4.tw[wi] >= w4.evens[vi] {
            w = None;
        }
    }
    Ok(Picks { u, v, w })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FMap {
    pub family: u8,
    pub x: u8,
    pub y: u8,
    pub z: u8,
    pub rho: Option<u32>,
    pub r: Option<u32>,
    pub s: Option<u32>,
}

/// One summand of `f`, with the (suspended) block it maps into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub symbols: [Option<GeneratorSymbol>; 2],
    pub block: Block,
}

impl FMap {
    /// Summands of `B_f`, at the suspension level of `Sigma X`.
    pub fn target_blocks(&self) -> Vec<Block> {
        self.components().into_iter().map(|c| c.block).collect()
    }

    pub fn components(&self) -> Vec<Component> {
        use GeneratorSymbol as G;
        let mut out = Vec::new();
        let one = |g, block| Component { symbols: [Some(g), None], block };
        if self.family == 4 {
            let r = self.r.unwrap();
            out.push(Component { symbols: [Some(G::IotaEtaSq(r)), Some(G::Xi(r))], block: Block::Moore(1 << r) });
        } else {
            if self.x == 1 {
                out.push(match self.family {
                    1 => one(G::Eta, Block::Sphere(4)),
                    2 => one(G::EtaSq, Block::Sphere(3)),
                    _ => {
                        let rho = self.rho.unwrap();
                        one(G::IotaEtaSq(rho), Block::Moore(1 << rho))
                    }
                });
            }
            if self.y == 1 {
                let r = self.r.unwrap();
                out.push(one(G::Xi(r), Block::Moore(1 << r)));
            }
        }
        if self.z == 1 {
            let s = self.s.unwrap();
            out.push(one(G::Epsilon(s), Block::SigmaCP2Tw(s)));
        }
        out
    }

    /// Desuspended description in the usual notation.
    pub fn expression(&self) -> String {
        let mut parts = Vec::new();
        if self.family == 4 {
            let r = self.r.unwrap();
            parts.push(format!("(eta_{r} + xi_{r})"));
        } else if self.x == 1 {
            parts.push(match self.family {
                1 => "eta".to_string(),
                2 => "eta^2".to_string(),
                _ => format!("eta_{}", self.rho.unwrap()),
            });
        }
        if self.family != 4 && self.y == 1 {
            parts.push(format!("xi_{}", self.r.unwrap()));
        }
        if self.z == 1 {
            parts.push(format!("epsilon_{}", self.s.unwrap()));
        }
        parts.join(" _|_ ")
    }
}

impl fmt::Display for FMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "family ({}) x={} y={} z={}", self.family, self.x, self.y, self.z)?;
        for (name, v) in [("rho", self.rho), ("r", self.r), ("s", self.s)] {
            if let Some(v) = v {
                write!(f, " {name}={v}")?;
            }
        }
        write!(f, ": f = {}", self.expression())
    }
}

pub fn classify_f(w4: &WedgeClass, picks: &Picks) -> Option<FMap> {
    if picks.is_empty() {
        return None;
    }
    let ladder = w4.ladder();
    let r = picks.v.map(|v| w4.evens[v]);
    let s = picks.w.map(|k| w4.tw[k]);
    let mut f = FMap {
        family: 1,
        x: picks.u.is_some() as u8,
        y: r.is_some() as u8,
        z: s.is_some() as u8,
        rho: None,
        r,
        s,
    };
    if let Some(u) = picks.u {
        match ladder[u] {
            Rung::OmegaPlusOne => f.family = 1,
            Rung::Omega => f.family = 2,
            Rung::Finite(rho) if picks.v == Some(u) => {
                f.family = 4;
                f.x = 0;
                f.r = Some(rho);
            }
            Rung::Finite(rho) => {
                f.family = 3;
                f.rho = Some(rho);
            }
        }
    }
    Some(f)
}

/// Per-stage record of the pipeline, for echoing bases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub w2: WedgeClass,
    pub w3: WedgeClass,
    /// Wedge after each 5-cell, in attachment order; the last is W4.
    pub after_5cells: Vec<WedgeClass>,
    pub w4: WedgeClass,
    pub phi5_normalized: Coeffs5,
    pub picks: Picks,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitResult {
    pub s2_count: usize,
    /// Summands other than `S^2` and `Sigma C_f`.
    pub wedge: WedgeClass,
    pub f: Option<FMap>,
    /// When `f` reduces to zero the 6-cell splits off as an `S^6` summand.
    pub top_sphere: bool,
    pub trace: Trace,
}

impl SplitResult {
    /// The splitting without the trace, for comparing normal forms.
    pub fn normal_form(&self) -> (usize, WedgeClass, Option<FMap>, bool) {
        (self.s2_count, self.wedge.clone(), self.f, self.top_sphere)
    }

    /// All summands in `Sigma X` outside `Sigma C_f` (including `S^2`, `S^6`).
    pub fn free_blocks(&self) -> Vec<Block> {
        let mut out = vec![Block::Sphere(2); self.s2_count];
        out.extend(self.wedge.blocks());
        if self.top_sphere {
            out.push(Block::Sphere(6));
        }
        out
    }

    pub fn is_wedge_of_spheres(&self) -> bool {
        self.f.is_none()
            && self.wedge.evens.is_empty()
            && self.wedge.odds.is_empty()
            && self.wedge.b == 0
            && self.wedge.tw.is_empty()
    }
}

impl fmt::Display for SplitResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        render_power("S^2", self.s2_count, &mut parts);
        if !self.wedge.is_empty() {
            parts.push(self.wedge.to_string());
        }
        if self.top_sphere {
            parts.push("S^6".into());
        }
        if self.f.is_some() {
            parts.push("SigmaC_f".into());
        }
        write!(f, "SigmaX = {}", if parts.is_empty() { "*".to_string() } else { parts.join(" v ") })?;
        if let Some(fm) = &self.f {
            write!(f, "\n  {fm}")?;
        }
        Ok(())
    }
}

/// Remove the slots consumed by `f` from `w4`.
fn residual_wedge(w4: &WedgeClass, f: &FMap) -> WedgeClass {
    let mut w = w4.clone();
    for b in f.target_blocks() {
        match b {
            Block::Sphere(3) => w.n3 -= 1,
            Block::Sphere(4) => w.n4 -= 1,
            Block::Moore(t) => w.remove_even(t.trailing_zeros()),
            Block::SigmaCP2Tw(s) => w.remove_tw(s),
            _ => unreachable!("f never maps into {b}"),
        }
    }
    w
}

/// Wedge after the 5-cells, checking each record against its stage.
pub fn build_w4(h: &HomologyTable, phi4: &[Coeffs4]) -> Result<(WedgeClass, WedgeClass, Vec<WedgeClass>)> {
    let w2 = build_w2(h)?;
    let w3 = build_w3(&w2, h.n);
    if phi4.len() != h.m {
        return Err(SplitError::RecordCount { expected: h.m, found: phi4.len() });
    }
    let mut stages = Vec::with_capacity(h.m);
    let mut cur = w3.clone();
    for (i, rec) in phi4.iter().enumerate() {
        rec.validate(&cur, &format!("phi4[{i}]"))?;
        cur = attach_5cell(&cur, rec)?;
        stages.push(cur.clone());
    }
    Ok((w2, w3, stages))
}

/// Reduce the 6-cell data on `w4` to `f` and the summands left over.
pub fn reduce_on_w4(w4: &WedgeClass, phi5: &Coeffs5) -> Result<(Option<FMap>, WedgeClass)> {
    let picks = reduce_phi5(w4, phi5)?;
    let f = classify_f(w4, &picks);
    let wedge = match &f {
        Some(fm) => residual_wedge(w4, fm),
        None => w4.clone(),
    };
    Ok((f, wedge))
}

pub fn split(h: &HomologyTable, phi4: &[Coeffs4], phi5: &Coeffs5) -> Result<SplitResult> {
    let (w2, w3, stages) = build_w4(h, phi4)?;
    let w4 = stages.last().cloned().unwrap_or_else(|| w3.clone());
    let normalized = normalize_coeffs5(&w4, phi5)?;
    let picks = reduce_phi5(&w4, &normalized)?;
    let (f, wedge) = reduce_on_w4(&w4, &normalized)?;
    Ok(SplitResult {
        s2_count: h.m,
        wedge,
        top_sphere: f.is_none(),
        f,
        trace: Trace { w2, w3, after_5cells: stages, w4, phi5_normalized: normalized, picks },
    })
}

/// Order of rungs used by the pick rule, exposed for tests.
pub fn compare_rungs(a: Rung, b: Rung) -> Ordering {
    a.cmp(&b)
}
