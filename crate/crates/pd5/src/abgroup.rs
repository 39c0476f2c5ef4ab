//! Finitely generated abelian groups over arbitrary-precision integers.
//!
//! Groups are kept in invariant-factor form `Z^r + Z/d1 + ... + Z/dk` with
//! `d1 | d2 | ... | dk` and every `di >= 2`. Everything else (presentations,
//! universal coefficients, kernels and extensions used by the cohomotopy
//! evaluators) funnels through [`smith_normal_form`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    /// Panics if `entries.len() != rows * cols`.
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        IntMatrix { rows, cols, entries }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::new(rows, cols, entries.iter().map(|&e| BigInt::from(e)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn diagonal(rows: usize, cols: usize, diag: &[BigInt]) -> Self {
        let mut m = Self::zeros(rows, cols);
        for (i, d) in diag.iter().enumerate().take(rows.min(cols)) {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Block-diagonal sum.
    pub fn block_sum(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> =
            (0..n).map(|i| (0..n).map(|j| self.get(i, j).clone()).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(src, j) * q;
            self.entries[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, src) * q;
            self.entries[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let idx = r * self.cols + j;
            self.entries[idx] = -&self.entries[idx];
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Snf {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }
}

/// Smith normal form `D = U * M * V` with `U`, `V` unimodular.
///
/// Pivots are the nonzero entry of smallest absolute value in the active
/// submatrix, ties broken in row-major order, so the output is deterministic.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        loop {
            let Some((pi, pj)) = smallest_pivot(&d, t) else {
                fix_sign(&mut d, &mut u, t);
                return Snf { d, u, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let p = d.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = -(d.get(i, t) / &p);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                dirty |= !d.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = -(d.get(t, j) / &p);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                dirty |= !d.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d.get(i, j).is_multiple_of(&p));
            match bad {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        fix_sign(&mut d, &mut u, t);
    }
    Snf { d, u, v }
}

fn smallest_pivot(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..d.rows {
        for j in t..d.cols {
            let a = d.get(i, j).abs();
            if a.is_zero() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

fn fix_sign(d: &mut IntMatrix, u: &mut IntMatrix, t: usize) {
    if t < d.rows && t < d.cols && d.get(t, t).is_negative() {
        d.negate_row(t);
        u.negate_row(t);
    }
}

/// Finitely generated abelian group `Z^rank + Z/d1 + ... + Z/dk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FgAbGroup {
    rank: usize,
    factors: Vec<BigInt>,
}

impl FgAbGroup {
    pub fn zero() -> Self {
        FgAbGroup { rank: 0, factors: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        FgAbGroup { rank, factors: Vec::new() }
    }

    /// `Z/n`; `n = 0` gives `Z`, `n = 1` the trivial group.
    pub fn cyclic<N: Into<BigInt>>(n: N) -> Self {
        let n: BigInt = n.into();
        Self::from_cyclic_orders(&[n])
    }

    /// Direct sum of cyclic groups of the given orders (0 means infinite).
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        let mut rank = 0;
        let mut finite = Vec::new();
        for o in orders {
            let o = o.abs();
            if o.is_zero() {
                rank += 1;
            } else if !o.is_one() {
                finite.push(o);
            }
        }
        FgAbGroup { rank, factors: invariant_factors(finite) }
    }

    pub fn from_parts(rank: usize, torsion: &[u64]) -> Self {
        let mut orders: Vec<BigInt> = torsion.iter().map(|&t| BigInt::from(t)).collect();
        orders.extend(std::iter::repeat_n(BigInt::zero(), rank));
        Self::from_cyclic_orders(&orders)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.factors.iter().product()
    }

    /// Cyclic orders of a decomposition, free summands as 0.
    pub fn cyclic_orders(&self) -> Vec<BigInt> {
        let mut v: Vec<BigInt> = std::iter::repeat_n(BigInt::zero(), self.rank).collect();
        v.extend(self.factors.iter().cloned());
        v
    }

    /// Primary decomposition: the prime powers `p^e` of the torsion part.
    pub fn primary_parts(&self) -> Vec<BigInt> {
        let mut out = Vec::new();
        for d in &self.factors {
            for (p, e) in factorize(d) {
                out.push(p.pow(e));
            }
        }
        out.sort();
        out
    }

    pub fn tensor(&self, c: &Coefficients) -> FgAbGroup {
        match c {
            Coefficients::Integers => self.clone(),
            Coefficients::Mod(k) => {
                let k = BigInt::from(*k);
                let mut orders: Vec<BigInt> =
                    std::iter::repeat_n(k.clone(), self.rank).collect();
                orders.extend(self.factors.iter().map(|d| d.gcd(&k)));
                Self::from_cyclic_orders(&orders)
            }
        }
    }

    pub fn tor(&self, c: &Coefficients) -> FgAbGroup {
        match c {
            Coefficients::Integers => FgAbGroup::zero(),
            Coefficients::Mod(k) => {
                let k = BigInt::from(*k);
                let orders: Vec<BigInt> = self.factors.iter().map(|d| d.gcd(&k)).collect();
                Self::from_cyclic_orders(&orders)
            }
        }
    }

    pub fn hom_into(&self, c: &Coefficients) -> FgAbGroup {
        match c {
            Coefficients::Integers => FgAbGroup::free(self.rank),
            Coefficients::Mod(_) => self.tensor(c),
        }
    }

    pub fn ext_into(&self, c: &Coefficients) -> FgAbGroup {
        match c {
            Coefficients::Integers => {
                Self::from_cyclic_orders(&self.factors)
            }
            Coefficients::Mod(_) => self.tor(c),
        }
    }
}

impl fmt::Display for FgAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.factors.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" (+) "))
        }
    }
}

/// Coefficient group for (co)homology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Coefficients {
    Integers,
    Mod(u64),
}

fn invariant_factors(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let n = v.len();
    for i in 0..n {
        for j in i + 1..n {
            let g = v[i].gcd(&v[j]);
            let l = v[i].lcm(&v[j]);
            v[i] = g;
            v[j] = l;
        }
    }
    v.retain(|d| !d.is_one());
    v
}

/// Trial-division factorization; inputs here are small torsion orders.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

/// `Some((p, e))` when `n = p^e` with `p` prime and `e >= 1`.
pub fn prime_power(n: &BigInt) -> Option<(BigInt, u32)> {
    let f = factorize(n);
    if f.len() == 1 {
        f.into_iter().next()
    } else {
        None
    }
}

/// Cokernel of the relation matrix: rows are relations among `generators`.
pub fn group_from_presentation(generators: usize, relations: &IntMatrix) -> FgAbGroup {
    assert_eq!(relations.cols(), generators, "relation width must equal generator count");
    let snf = smith_normal_form(relations);
    let mut orders: Vec<BigInt> = snf.diagonal();
    orders.resize(generators, BigInt::zero());
    FgAbGroup::from_cyclic_orders(&orders)
}

pub fn direct_sum<'a, I: IntoIterator<Item = &'a FgAbGroup>>(gs: I) -> FgAbGroup {
    let mut orders = Vec::new();
    for g in gs {
        orders.extend(g.cyclic_orders());
    }
    FgAbGroup::from_cyclic_orders(&orders)
}

/// Degree-indexed groups; degrees not present are trivial.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedGroup(BTreeMap<i32, FgAbGroup>);

impl GradedGroup {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<I: IntoIterator<Item = (i32, FgAbGroup)>>(it: I) -> Self {
        let mut g = Self::new();
        for (d, x) in it {
            g.add(d, &x);
        }
        g
    }

    pub fn get(&self, degree: i32) -> FgAbGroup {
        self.0.get(&degree).cloned().unwrap_or_else(FgAbGroup::zero)
    }

    /// Sum `x` into the given degree.
    pub fn add(&mut self, degree: i32, x: &FgAbGroup) {
        let cur = self.get(degree);
        let s = direct_sum([&cur, x]);
        if s.is_trivial() {
            self.0.remove(&degree);
        } else {
            self.0.insert(degree, s);
        }
    }

    pub fn add_graded(&mut self, other: &GradedGroup) {
        for (d, x) in &other.0 {
            self.add(*d, x);
        }
    }

    pub fn shifted(&self, by: i32) -> GradedGroup {
        GradedGroup(self.0.iter().map(|(d, x)| (d + by, x.clone())).collect())
    }

    pub fn degrees(&self) -> impl Iterator<Item = (&i32, &FgAbGroup)> {
        self.0.iter()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for GradedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(d, g)| format!("{d}: {g}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `H^n(-; G) = Hom(H_n, G) + Ext(H_{n-1}, G)`.
pub fn uct_cohomology(h: &GradedGroup, coeff: &Coefficients) -> GradedGroup {
    let mut out = GradedGroup::new();
    for (d, g) in h.degrees() {
        out.add(*d, &g.hom_into(coeff));
        out.add(*d + 1, &g.ext_into(coeff));
    }
    out
}

/// Kernel of a homomorphism `G -> Z/2` given on a cyclic decomposition of
/// `G`: each generator has an order (0 for infinite) and a bit saying whether
/// it maps to the nonzero element. A generator of odd finite order cannot
/// map nontrivially; such a bit is ignored.
pub fn kernel_to_z2(gens: &[(BigInt, bool)]) -> FgAbGroup {
    let two = BigInt::from(2);
    let hits: Vec<bool> = gens
        .iter()
        .map(|(o, b)| *b && (o.is_zero() || o.is_multiple_of(&two)))
        .collect();
    let Some(j) = hits.iter().position(|&b| b) else {
        return FgAbGroup::from_cyclic_orders(&gens.iter().map(|(o, _)| o.clone()).collect::<Vec<_>>());
    };
    // Sublattice basis: b_i = e_i (no hit), b_i = e_i + e_j (hit, i != j), b_j = 2 e_j.
    // Each relation o_i e_i is rewritten in that basis.
    let n = gens.len();
    let mut rels: Vec<Vec<BigInt>> = Vec::new();
    for (i, (o, _)) in gens.iter().enumerate() {
        if o.is_zero() {
            continue;
        }
        let mut row = vec![BigInt::zero(); n];
        if i == j {
            row[j] = o / &two;
        } else if hits[i] {
            row[i] = o.clone();
            row[j] = -(o / &two);
        } else {
            row[i] = o.clone();
        }
        rels.push(row);
    }
    let m = IntMatrix::new(rels.len(), n, rels.into_iter().flatten().collect());
    group_from_presentation(n, &m)
}

/// All isomorphism types `E` fitting in `0 -> Z/2 -> E -> q -> 0`.
pub fn extensions_by_z2(q: &FgAbGroup) -> Vec<FgAbGroup> {
    let two = BigInt::from(2);
    let mut out = vec![direct_sum([q, &FgAbGroup::cyclic(2)])];
    let parts = q.primary_parts();
    let mut seen = Vec::new();
    for (idx, p) in parts.iter().enumerate() {
        if !p.is_multiple_of(&two) || seen.contains(p) {
            continue;
        }
        seen.push(p.clone());
        let mut orders: Vec<BigInt> = std::iter::repeat_n(BigInt::zero(), q.rank()).collect();
        for (k, other) in parts.iter().enumerate() {
            orders.push(if k == idx { other * &two } else { other.clone() });
        }
        out.push(FgAbGroup::from_cyclic_orders(&orders));
    }
    out.sort();
    out.dedup();
    out
}

/// Small helper for rendering and tests.
pub fn to_u64(n: &BigInt) -> Option<u64> {
    n.to_u64()
}
