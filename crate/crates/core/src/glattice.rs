//! Integral representations of finite groups and their low-degree cohomology.
//!
//! Actions are left actions on column vectors: `action(g) * action(h) =
//! action(g∘h)`. Cohomology is computed on the bar complex truncated at
//! `C^2 = M^(|G|^2)`; cyclic groups also have a fast path through the norm map.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::autgroups::FiniteMatrixGroup;

/// Largest group order accepted by the bar-complex path.
pub const MAX_BAR_ORDER: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("invalid group table: {0}")]
    InvalidTable(String),
    #[error("action is not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("action matrix for element {0} is not unimodular")]
    NotUnimodular(usize),
    #[error("quotient has torsion (invariant factors {0:?})")]
    TorsionQuotient(Vec<String>),
    #[error("relations are not preserved by the action of element {0}")]
    RelationNotPreserved(usize),
    #[error("group of order {0} is too large for the bar complex (limit {MAX_BAR_ORDER})")]
    GroupTooLarge(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cohomology group has positive rank {0}")]
    NotTorsion(usize),
    #[error("cyclic fast path and bar complex disagree: {0} vs {1}")]
    CrossCheckMismatch(String, String),
}

/// Dense integer matrix.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Mat<BigInt>;

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Clone> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let c = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == c), "ragged matrix");
        Mat { rows: rows.len(), cols: c, data: rows.iter().flatten().cloned().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for c in 0..self.cols {
                self.data.swap(a * self.cols + c, b * self.cols + c);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for r in 0..self.rows {
                self.data.swap(r * self.cols + a, r * self.cols + b);
            }
        }
    }
}

impl Mat<i64> {
    pub fn identity(n: usize) -> Self {
        Mat::from_fn(n, n, |r, c| i64::from(r == c))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |_, _| 0)
    }

    pub fn mul(&self, o: &Mat<i64>) -> Mat<i64> {
        assert_eq!(self.cols, o.rows, "dimension mismatch in matrix product");
        let mut out = Mat::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == 0 {
                    continue;
                }
                for c in 0..o.cols {
                    out[(r, c)] += a * o[(k, c)];
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &Mat<i64>) -> Mat<i64> {
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] - o[(r, c)])
    }

    pub fn add(&self, o: &Mat<i64>) -> Mat<i64> {
        Mat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] + o[(r, c)])
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self[(r, c)] * v[c]).sum()).collect()
    }

    pub fn to_big(&self) -> IntMatrix {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| BigInt::from(x)).collect() }
    }

    /// Determinant by fraction-free elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m: Vec<Vec<BigInt>> = self.to_rows().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else { return BigInt::zero() };
            if p != k {
                m.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                    m[i][j] = v;
                }
            }
            prev = m[k][k].clone();
        }
        if n == 0 {
            return BigInt::one();
        }
        sign * &m[n - 1][n - 1]
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        Mat::from_rows(rows).to_big()
    }

    pub fn to_i64(&self) -> Option<Mat<i64>> {
        let data = self.data.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>()?;
        Some(Mat { rows: self.rows, cols: self.cols, data })
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch in matrix product");
        let mut out = Mat::from_fn(self.rows, o.cols, |_, _| BigInt::zero());
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let t = a * &o[(k, c)];
                    out[(r, c)] += t;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }
}

/// `U * A * V = D` with `U`, `V` unimodular and `D` diagonal,
/// `d_1 | d_2 | ...`, nonzero entries positive and first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub rank: usize,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().take(self.rank).collect()
    }
}

mod snf {
    use super::*;

    /// Scalars usable by the Smith normal form routine. `None` signals overflow.
    pub(super) trait SnfScalar: Clone + PartialEq {
        fn zero() -> Self;
        fn one() -> Self;
        fn is_zero(&self) -> bool;
        fn abs_lt(&self, o: &Self) -> bool;
        fn is_neg(&self) -> bool;
        fn add(&self, o: &Self) -> Option<Self>;
        fn sub(&self, o: &Self) -> Option<Self>;
        fn mul(&self, o: &Self) -> Option<Self>;
        fn neg(&self) -> Option<Self>;
        fn div_floor(&self, o: &Self) -> Option<Self>;
        fn divides(&self, o: &Self) -> bool;
    }

    impl SnfScalar for i64 {
        fn zero() -> Self {
            0
        }
        fn one() -> Self {
            1
        }
        fn is_zero(&self) -> bool {
            *self == 0
        }
        fn abs_lt(&self, o: &Self) -> bool {
            self.unsigned_abs() < o.unsigned_abs()
        }
        fn is_neg(&self) -> bool {
            *self < 0
        }
        fn add(&self, o: &Self) -> Option<Self> {
            self.checked_add(*o)
        }
        fn sub(&self, o: &Self) -> Option<Self> {
            self.checked_sub(*o)
        }
        fn mul(&self, o: &Self) -> Option<Self> {
            self.checked_mul(*o)
        }
        fn neg(&self) -> Option<Self> {
            self.checked_neg()
        }
        fn div_floor(&self, o: &Self) -> Option<Self> {
            if *self == i64::MIN && *o == -1 {
                return None;
            }
            Some(Integer::div_floor(self, o))
        }
        fn divides(&self, o: &Self) -> bool {
            o.checked_rem(*self).is_none_or(|r| r == 0)
        }
    }

    impl SnfScalar for BigInt {
        fn zero() -> Self {
            Zero::zero()
        }
        fn one() -> Self {
            One::one()
        }
        fn is_zero(&self) -> bool {
            Zero::is_zero(self)
        }
        fn abs_lt(&self, o: &Self) -> bool {
            self.magnitude() < o.magnitude()
        }
        fn is_neg(&self) -> bool {
            Signed::is_negative(self)
        }
        fn add(&self, o: &Self) -> Option<Self> {
            Some(self + o)
        }
        fn sub(&self, o: &Self) -> Option<Self> {
            Some(self - o)
        }
        fn mul(&self, o: &Self) -> Option<Self> {
            Some(self * o)
        }
        fn neg(&self) -> Option<Self> {
            Some(-self)
        }
        fn div_floor(&self, o: &Self) -> Option<Self> {
            Some(Integer::div_floor(self, o))
        }
        fn divides(&self, o: &Self) -> bool {
            Zero::is_zero(&(o % self))
        }
    }

    pub(super) struct SnfWork<T> {
        pub a: Mat<T>,
        pub u: Option<Mat<T>>,
        pub v: Mat<T>,
        pub v_inv: Mat<T>,
    }

    pub(super) fn eye<T: SnfScalar>(n: usize) -> Mat<T> {
        Mat::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    impl<T: SnfScalar> SnfWork<T> {
        fn row_axpy(&mut self, target: usize, src: usize, q: &T) -> Option<()> {
            // row_target -= q * row_src
            for m in std::iter::once(&mut self.a).chain(self.u.as_mut()) {
                for c in 0..m.cols {
                    let t = q.mul(&m[(src, c)])?;
                    m[(target, c)] = m[(target, c)].sub(&t)?;
                }
            }
            Some(())
        }

        fn col_axpy(&mut self, target: usize, src: usize, q: &T) -> Option<()> {
            // col_target -= q * col_src; inverse: row_src of v_inv += q * row_target
            for m in [&mut self.a, &mut self.v] {
                for r in 0..m.rows {
                    let t = q.mul(&m[(r, src)])?;
                    m[(r, target)] = m[(r, target)].sub(&t)?;
                }
            }
            let vi = &mut self.v_inv;
            for c in 0..vi.cols {
                let t = q.mul(&vi[(target, c)])?;
                vi[(src, c)] = vi[(src, c)].add(&t)?;
            }
            Some(())
        }

        fn swap_rows(&mut self, i: usize, j: usize) {
            self.a.swap_rows(i, j);
            if let Some(u) = self.u.as_mut() {
                u.swap_rows(i, j);
            }
        }

        fn swap_cols(&mut self, i: usize, j: usize) {
            self.a.swap_cols(i, j);
            self.v.swap_cols(i, j);
            self.v_inv.swap_rows(i, j);
        }

        fn negate_row(&mut self, i: usize) -> Option<()> {
            for m in std::iter::once(&mut self.a).chain(self.u.as_mut()) {
                for c in 0..m.cols {
                    m[(i, c)] = m[(i, c)].neg()?;
                }
            }
            Some(())
        }
    }

    pub(super) fn snf_generic<T: SnfScalar>(a: Mat<T>, want_u: bool) -> Option<(SnfWork<T>, usize)> {
        let (rows, cols) = (a.rows, a.cols);
        let mut w = SnfWork { u: want_u.then(|| eye(rows)), v: eye(cols), v_inv: eye(cols), a };
        let mut rank = 0;
        for k in 0..rows.min(cols) {
            loop {
                // smallest nonzero entry of the trailing block
                let mut best: Option<(usize, usize)> = None;
                for r in k..rows {
                    for c in k..cols {
                        let x = &w.a[(r, c)];
                        if !x.is_zero() && best.is_none_or(|(br, bc)| x.abs_lt(&w.a[(br, bc)])) {
                            best = Some((r, c));
                        }
                    }
                }
                let Some((pr, pc)) = best else {
                    return Some((w, rank));
                };
                w.swap_rows(k, pr);
                w.swap_cols(k, pc);
                let piv = w.a[(k, k)].clone();
                let mut clean = true;
                for r in k + 1..rows {
                    if !w.a[(r, k)].is_zero() {
                        let q = w.a[(r, k)].div_floor(&piv)?;
                        w.row_axpy(r, k, &q)?;
                        clean &= w.a[(r, k)].is_zero();
                    }
                }
                for c in k + 1..cols {
                    if !w.a[(k, c)].is_zero() {
                        let q = w.a[(k, c)].div_floor(&piv)?;
                        w.col_axpy(c, k, &q)?;
                        clean &= w.a[(k, c)].is_zero();
                    }
                }
                if !clean {
                    continue;
                }
                let bad = (k + 1..rows).find(|&r| (k + 1..cols).any(|c| !piv.divides(&w.a[(r, c)])));
                if let Some(r) = bad {
                    // row_k += row_r brings a non-multiple into row k
                    let minus_one = T::one().neg()?;
                    w.row_axpy(k, r, &minus_one)?;
                    continue;
                }
                if piv.is_neg() {
                    w.negate_row(k)?;
                }
                rank += 1;
                break;
            }
        }
        Some((w, rank))
    }
}

use snf::{eye, snf_generic};

fn work_to_big<T: Clone + Into<BigInt>>(m: Mat<T>) -> IntMatrix {
    Mat { rows: m.rows, cols: m.cols, data: m.data.into_iter().map(Into::into).collect() }
}

/// Smith normal form with transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    snf_impl(a, true)
}

fn snf_impl(a: &IntMatrix, want_u: bool) -> SmithForm {
    if let Some(small) = a.to_i64() {
        if let Some((w, rank)) = snf_generic(small, want_u) {
            return SmithForm {
                u: w.u.map(work_to_big).unwrap_or_else(|| eye::<BigInt>(0)),
                d: work_to_big(w.a),
                v: work_to_big(w.v),
                v_inv: work_to_big(w.v_inv),
                rank,
            };
        }
    }
    let (w, rank) = snf_generic(a.clone(), want_u).expect("bigint arithmetic does not overflow");
    SmithForm { u: w.u.unwrap_or_else(|| eye::<BigInt>(0)), d: w.a, v: w.v, v_inv: w.v_inv, rank }
}

/// A finite abelian group `Z/d_1 x ... x Z/d_k` with `1 < d_1 | ... | d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_factors(&[n])
    }

    /// Drops unit factors and normalizes to the divisibility chain.
    pub fn from_factors(f: &[u64]) -> Self {
        // via primary decomposition so any input list is accepted
        let mut primary: std::collections::BTreeMap<u64, Vec<u64>> = Default::default();
        for &x in f {
            let mut m = x;
            let mut p = 2;
            while m > 1 {
                if m % p == 0 {
                    let mut q = 1;
                    while m % p == 0 {
                        m /= p;
                        q *= p;
                    }
                    primary.entry(p).or_default().push(q);
                }
                p += 1;
            }
        }
        let k = primary.values().map(|v| v.len()).max().unwrap_or(0);
        for v in primary.values_mut() {
            v.sort_unstable_by(|a, b| b.cmp(a));
        }
        let mut factors: Vec<u64> = (0..k).map(|i| primary.values().map(|v| v.get(i).copied().unwrap_or(1)).product()).collect();
        factors.reverse();
        FiniteAbelianGroup { invariant_factors: factors }
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl FromStr for FiniteAbelianGroup {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "0" || s == "1" {
            return Ok(Self::trivial());
        }
        let mut f = Vec::new();
        for part in s.split('x') {
            let d = part.trim().strip_prefix("Z/").ok_or_else(|| format!("bad group {s:?}"))?;
            f.push(d.trim().parse::<u64>().map_err(|_| format!("bad group {s:?}"))?);
        }
        Ok(Self::from_factors(&f))
    }
}

impl Serialize for FiniteAbelianGroup {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FiniteAbelianGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn abelian_from_factors(f: &[BigInt]) -> FiniteAbelianGroup {
    let v: Vec<u64> = f.iter().filter(|d| !d.is_one()).map(|d| d.to_u64().expect("invariant factor fits u64")).collect();
    FiniteAbelianGroup::from_factors(&v)
}

/// `ker(a) / im(b)` for integer matrices with `a * b = 0`. Errors if the
/// quotient is infinite.
pub fn subquotient(a: &IntMatrix, b: &IntMatrix) -> Result<FiniteAbelianGroup, LatticeError> {
    if a.cols != b.rows {
        return Err(LatticeError::DimensionMismatch(format!("{}x{} after {}x{}", a.rows, a.cols, b.rows, b.cols)));
    }
    let sa = snf_impl(a, false);
    subquotient_with(&sa, b)
}

fn subquotient_with(sa: &SmithForm, b: &IntMatrix) -> Result<FiniteAbelianGroup, LatticeError> {
    // a V = U^-1 D, so ker a = V * {y : y_i = 0 for i < rank}
    let n = sa.v.rows;
    let r = sa.rank;
    let coords = sa.v_inv.mul(b);
    if (0..r).any(|i| (0..b.cols).any(|c| !coords[(i, c)].is_zero())) {
        return Err(LatticeError::DimensionMismatch("image is not contained in the kernel".into()));
    }
    let sub = Mat::from_fn(n - r, b.cols, |i, c| coords[(r + i, c)].clone());
    let ss = snf_impl(&sub, false);
    let free = (n - r) - ss.rank;
    if free > 0 {
        return Err(LatticeError::NotTorsion(free));
    }
    Ok(abelian_from_factors(&ss.invariant_factors()))
}

/// Torsion subgroup of `coker(a)`.
pub fn cokernel_torsion(a: &IntMatrix) -> FiniteAbelianGroup {
    abelian_from_factors(&snf_impl(a, false).invariant_factors())
}

/// A finite group given by its multiplication table; element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinGroup {
    table: Vec<Vec<usize>>,
    inverse: Vec<usize>,
}

impl FinGroup {
    /// Validates closure, identity at index 0, inverses and associativity.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, LatticeError> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(LatticeError::InvalidTable("not a square table over 0..n".into()));
        }
        if (0..n).any(|i| table[0][i] != i || table[i][0] != i) {
            return Err(LatticeError::InvalidTable("element 0 is not the identity".into()));
        }
        let mut inverse = vec![usize::MAX; n];
        for i in 0..n {
            let mut seen = vec![false; n];
            for &x in &table[i] {
                if std::mem::replace(&mut seen[x], true) {
                    return Err(LatticeError::InvalidTable(format!("row {i} is not a permutation")));
                }
            }
            inverse[i] = (0..n).find(|&j| table[i][j] == 0).unwrap();
        }
        for a in 0..n {
            for b in 0..n {
                let ab = table[a][b];
                for c in 0..n {
                    if table[ab][c] != table[a][table[b][c]] {
                        return Err(LatticeError::InvalidTable(format!("({a}{b}){c} != {a}({b}{c})")));
                    }
                }
            }
        }
        Ok(FinGroup { table, inverse })
    }

    /// Cyclic group of order `m`, element `k` being the k-th power of the generator.
    pub fn cyclic(m: usize) -> Self {
        let table = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
        let inverse = (0..m).map(|a| (m - a) % m).collect();
        FinGroup { table, inverse }
    }

    /// The abstract group of a matrix group, with `g∘h` the transformation
    /// "first h, then g" on points. Under `p -> p*M` this is the matrix
    /// product `M_h * M_g`, which makes push-forward of divisors a left action.
    pub fn from_matrix_group(g: &FiniteMatrixGroup) -> Self {
        let t = g.table();
        let n = t.len();
        let table: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| t[j][i]).collect()).collect();
        let inverse = (0..n).map(|i| (0..n).find(|&j| table[i][j] == 0).unwrap()).collect();
        FinGroup { table, inverse }
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.table[x][a];
            k += 1;
        }
        k
    }

    /// An element generating the group, if it is cyclic.
    pub fn cyclic_generator(&self) -> Option<usize> {
        (0..self.order()).find(|&a| self.element_order(a) == self.order())
    }
}

/// A free `Z`-module with a left action of a finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GLattice {
    group: FinGroup,
    rank: usize,
    action: Vec<Mat<i64>>,
}

impl GLattice {
    /// Validates unimodularity and the homomorphism property.
    pub fn new(group: FinGroup, action: Vec<Mat<i64>>) -> Result<Self, LatticeError> {
        if action.len() != group.order() {
            return Err(LatticeError::DimensionMismatch(format!("{} matrices for a group of order {}", action.len(), group.order())));
        }
        let rank = action.first().map_or(0, |m| m.rows);
        for (i, m) in action.iter().enumerate() {
            if m.rows != rank || m.cols != rank {
                return Err(LatticeError::DimensionMismatch(format!("matrix {i} is not {rank}x{rank}")));
            }
            if !m.determinant().abs().is_one() {
                return Err(LatticeError::NotUnimodular(i));
            }
        }
        if action.first().is_some_and(|m| *m != Mat::identity(rank)) {
            return Err(LatticeError::NotHomomorphism("identity does not act trivially".into()));
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                if action[a].mul(&action[b]) != action[group.mul(a, b)] {
                    return Err(LatticeError::NotHomomorphism(format!("action({a})*action({b}) != action({})", group.mul(a, b))));
                }
            }
        }
        Ok(GLattice { group, rank, action })
    }

    /// Extends matrices given on generating elements to the whole group.
    pub fn from_generators(group: FinGroup, gens: &[(usize, Mat<i64>)]) -> Result<Self, LatticeError> {
        let n = group.order();
        let rank = gens.first().map_or(0, |(_, m)| m.rows);
        let mut action: Vec<Option<Mat<i64>>> = vec![None; n];
        action[0] = Some(Mat::identity(rank));
        let mut queue = vec![0usize];
        while let Some(x) = queue.pop() {
            for (s, m) in gens {
                if m.rows != rank || m.cols != rank {
                    return Err(LatticeError::DimensionMismatch("generator matrices of different sizes".into()));
                }
                let y = group.mul(x, *s);
                if action[y].is_none() {
                    action[y] = Some(action[x].as_ref().unwrap().mul(m));
                    queue.push(y);
                }
            }
        }
        let action = action
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| LatticeError::NotHomomorphism("given elements do not generate the group".into()))?;
        Self::new(group, action)
    }

    /// `Z^rank` with trivial action.
    pub fn trivial(group: FinGroup, rank: usize) -> Self {
        let action = vec![Mat::identity(rank); group.order()];
        GLattice { group, rank, action }
    }

    pub fn group(&self) -> &FinGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self, g: usize) -> &Mat<i64> {
        &self.action[g]
    }

    /// Same group and action, restricted along an index map into a subgroup.
    pub fn restrict(&self, sub: FinGroup, embed: &[usize]) -> Result<Self, LatticeError> {
        Self::new(sub, embed.iter().map(|&g| self.action[g].clone()).collect())
    }
}

/// A lattice presented as `Z^ambient / relations` with an action on the ambient lattice.
#[derive(Clone, Debug)]
pub struct FPLattice {
    pub ambient: GLattice,
    /// Relation vectors, one per row, in ambient coordinates.
    pub relations: Vec<Vec<i64>>,
}

/// A quotient lattice with its projection and a section.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub lattice: GLattice,
    /// `rank x ambient` matrix of the projection.
    pub projection: Mat<i64>,
    /// `ambient x rank` matrix whose columns lift the quotient basis.
    pub lift: Mat<i64>,
}

pub fn quotient_lattice(l: &FPLattice) -> Result<Quotient, LatticeError> {
    let n = l.ambient.rank;
    if l.relations.iter().any(|r| r.len() != n) {
        return Err(LatticeError::DimensionMismatch(format!("relation of wrong length for ambient rank {n}")));
    }
    let rel = if l.relations.is_empty() { Mat::from_fn(0, n, |_, _| BigInt::zero()) } else { IntMatrix::from_i64(&l.relations) };
    let s = smith_normal_form(&rel);
    let facs = s.invariant_factors();
    if facs.iter().any(|d| !d.is_one()) {
        return Err(LatticeError::TorsionQuotient(facs.iter().map(|d| d.to_string()).collect()));
    }
    let k = s.rank;
    let q = n - k;
    let small = |m: &IntMatrix| m.to_i64().ok_or_else(|| LatticeError::DimensionMismatch("transform entries too large".into()));
    let vt = small(&s.v.transpose())?;
    let vinv_t = small(&s.v_inv.transpose())?;
    let projection = Mat::from_fn(q, n, |r, c| vt[(k + r, c)]);
    let lift = Mat::from_fn(n, q, |r, c| vinv_t[(r, k + c)]);
    let mut action = Vec::with_capacity(l.ambient.group.order());
    for (g, a) in l.ambient.action.iter().enumerate() {
        for r in &l.relations {
            let img = vt.apply(&a.apply(r));
            if img[k..].iter().any(|&x| x != 0) {
                return Err(LatticeError::RelationNotPreserved(g));
            }
        }
        action.push(projection.mul(&a.mul(&lift)));
    }
    let lattice = GLattice::new(l.ambient.group.clone(), action)?;
    Ok(Quotient { lattice, projection, lift })
}

/// `d^0: M -> C^1`, `m -> (g m - m)_g`.
fn bar_d0(m: &GLattice) -> IntMatrix {
    let (g, n) = (m.group.order(), m.rank);
    let mut d = Mat::from_fn(g * n, n, |_, _| BigInt::zero());
    for e in 0..g {
        for r in 0..n {
            for c in 0..n {
                d[(e * n + r, c)] = BigInt::from(m.action[e][(r, c)] - i64::from(r == c));
            }
        }
    }
    d
}

/// `d^1: C^1 -> C^2`, `phi -> ((g,h) -> g phi(h) - phi(gh) + phi(g))`.
fn bar_d1(m: &GLattice) -> IntMatrix {
    let (g, n) = (m.group.order(), m.rank);
    let mut d = Mat::from_fn(g * g * n, g * n, |_, _| BigInt::zero());
    for a in 0..g {
        for b in 0..g {
            let row0 = (a * g + b) * n;
            let ab = m.group.mul(a, b);
            for r in 0..n {
                for c in 0..n {
                    let x = m.action[a][(r, c)];
                    if x != 0 {
                        d[(row0 + r, b * n + c)] += x;
                    }
                }
                d[(row0 + r, ab * n + r)] -= 1;
                d[(row0 + r, a * n + r)] += 1;
            }
        }
    }
    d
}

fn check_bar_size(m: &GLattice) -> Result<(), LatticeError> {
    if m.group.order() > MAX_BAR_ORDER {
        return Err(LatticeError::GroupTooLarge(m.group.order()));
    }
    Ok(())
}

/// `H^1` as `ker d^1 / im d^0` on the bar complex.
pub fn h1_bar(m: &GLattice) -> Result<FiniteAbelianGroup, LatticeError> {
    check_bar_size(m)?;
    subquotient(&bar_d1(m), &bar_d0(m))
}

/// `H^2` as the torsion of `coker d^1`. This equals `ker d^2 / im d^1`
/// because `C^3` is torsion-free and `H^2` of a finite group is finite.
pub fn h2_bar(m: &GLattice) -> Result<FiniteAbelianGroup, LatticeError> {
    check_bar_size(m)?;
    Ok(cokernel_torsion(&bar_d1(m)))
}

fn norm_and_delta(m: &GLattice, sigma: usize) -> (IntMatrix, IntMatrix) {
    let a = &m.action[sigma];
    let order = m.group.element_order(sigma);
    let mut norm = Mat::<i64>::zeros(m.rank, m.rank);
    let mut pw = Mat::<i64>::identity(m.rank);
    for _ in 0..order {
        norm = norm.add(&pw);
        pw = pw.mul(a);
    }
    let delta = a.sub(&Mat::identity(m.rank));
    (norm.to_big(), delta.to_big())
}

/// `H^1` of the cyclic group generated by `sigma` as `ker N / im(sigma - 1)`.
pub fn h1_cyclic(m: &GLattice, sigma: usize) -> Result<FiniteAbelianGroup, LatticeError> {
    let (norm, delta) = norm_and_delta(m, sigma);
    subquotient(&norm, &delta)
}

/// `H^2` of the cyclic group generated by `sigma` as `M^G / N M`.
pub fn h2_cyclic(m: &GLattice, sigma: usize) -> Result<FiniteAbelianGroup, LatticeError> {
    let (norm, delta) = norm_and_delta(m, sigma);
    subquotient(&delta, &norm)
}

fn with_cross_check(
    m: &GLattice,
    bar: fn(&GLattice) -> Result<FiniteAbelianGroup, LatticeError>,
    cyc: fn(&GLattice, usize) -> Result<FiniteAbelianGroup, LatticeError>,
) -> Result<FiniteAbelianGroup, LatticeError> {
    let gen = m.group.cyclic_generator();
    match gen {
        Some(s) => {
            let fast = cyc(m, s)?;
            if m.group.order() <= MAX_BAR_ORDER {
                let slow = bar(m)?;
                if slow != fast {
                    return Err(LatticeError::CrossCheckMismatch(slow.to_string(), fast.to_string()));
                }
            }
            Ok(fast)
        }
        None => bar(m),
    }
}

/// First cohomology. Cyclic groups use the norm-map formula, cross-checked
/// against the bar complex when the order allows it.
pub fn h1(m: &GLattice) -> Result<FiniteAbelianGroup, LatticeError> {
    with_cross_check(m, h1_bar, h1_cyclic)
}

/// Second cohomology, with the same strategy as [`h1`].
pub fn h2(m: &GLattice) -> Result<FiniteAbelianGroup, LatticeError> {
    with_cross_check(m, h2_bar, h2_cyclic)
}

/// `Z[Omega]` for an action on a finite set; `perms[g][i]` is the image of `i`.
pub fn permutation_module(group: FinGroup, perms: &[Vec<usize>]) -> Result<GLattice, LatticeError> {
    let action = perms
        .iter()
        .map(|p| {
            let n = p.len();
            let mut m = Mat::<i64>::zeros(n, n);
            for (i, &j) in p.iter().enumerate() {
                m[(j, i)] = 1;
            }
            m
        })
        .collect();
    GLattice::new(group, action)
}

/// `Hom(M, Z)` with the contragredient action `g -> action(g^-1)^T`.
pub fn dual_lattice(m: &GLattice) -> GLattice {
    let action = (0..m.group.order()).map(|g| m.action[m.group.inv(g)].transpose()).collect();
    GLattice { group: m.group.clone(), rank: m.rank, action }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2_lattice(m: &[Vec<i64>]) -> GLattice {
        GLattice::from_generators(FinGroup::cyclic(2), &[(1, Mat::from_rows(m))]).unwrap()
    }

    #[test]
    fn snf_examples() {
        let s = smith_normal_form(&IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(s.u.mul(&IntMatrix::from_i64(&[vec![2, 4], vec![6, 8]])).mul(&s.v), s.d);
        let s = smith_normal_form(&IntMatrix::from_i64(&[vec![3, 0], vec![0, 1]]));
        assert_eq!(s.diagonal(), vec![BigInt::from(1), BigInt::from(3)]);
        let s = smith_normal_form(&IntMatrix::from_i64(&[vec![0, 0, 0], vec![0, 0, 0]]));
        assert_eq!(s.rank, 0);
        assert!(s.d.is_zero());
    }

    #[test]
    fn small_cohomology() {
        let neg = c2_lattice(&[vec![-1]]);
        assert_eq!(h1(&neg).unwrap(), FiniteAbelianGroup::cyclic(2));
        let swap = c2_lattice(&[vec![0, 1], vec![1, 0]]);
        assert!(h1(&swap).unwrap().is_trivial());
        assert!(h2(&swap).unwrap().is_trivial());
        let triv = GLattice::trivial(FinGroup::cyclic(2), 1);
        assert_eq!(h2(&triv).unwrap(), FiniteAbelianGroup::cyclic(2));
        assert!(h1(&triv).unwrap().is_trivial());
    }

    #[test]
    fn quadric_relation_basis() {
        // basis {H, R1}, sigma: H -> H, R1 -> 2H - R1
        let m = c2_lattice(&[vec![1, 2], vec![0, -1]]);
        assert_eq!(h1(&m).unwrap(), FiniteAbelianGroup::cyclic(2));
    }

    #[test]
    fn torsion_quotient_rejected() {
        let amb = GLattice::trivial(FinGroup::cyclic(1), 2);
        let l = FPLattice { ambient: amb, relations: vec![vec![2, 0]] };
        assert!(matches!(quotient_lattice(&l), Err(LatticeError::TorsionQuotient(_))));
    }

    #[test]
    fn group_strings() {
        let g: FiniteAbelianGroup = "Z/2 x Z/3".parse().unwrap();
        assert_eq!(g, FiniteAbelianGroup::cyclic(6));
        assert_eq!(FiniteAbelianGroup::from_factors(&[4, 6]).to_string(), "Z/2 x Z/12");
        assert_eq!("0".parse::<FiniteAbelianGroup>().unwrap(), FiniteAbelianGroup::trivial());
    }

    #[test]
    fn bad_table() {
        assert!(FinGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FinGroup::from_table(FinGroup::cyclic(4).table().to_vec()).is_ok());
    }

    #[test]
    fn bar_too_large() {
        let m = GLattice::trivial(FinGroup::cyclic(30), 1);
        assert!(matches!(h1_bar(&m), Err(LatticeError::GroupTooLarge(30))));
        assert!(h1(&m).unwrap().is_trivial());
    }
}
