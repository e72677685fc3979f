//! Sparse multivariate polynomials over a number field.
//!
//! Terms are kept in graded-lex order. Linear substitutions use the
//! row-vector convention: `substitute(f, M)` is the polynomial `x -> f(x*M)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{EchelonSpan, FieldMatrix};
use crate::numfield::{self, AlgebraicNumber, FieldRef, NumFieldError, PrimeField};

pub const DEFAULT_NVARS: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("polynomial is not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] NumFieldError),
}

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Exponent(pub Vec<u16>);

impl Exponent {
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn zero(nvars: usize) -> Self {
        Exponent(vec![0; nvars])
    }

    pub fn unit(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Exponent(e)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Exponent) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of total degree `d` in `n` variables, ascending.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Exponent> {
    fn rec(n: usize, i: usize, left: u32, cur: &mut Vec<u16>, out: &mut Vec<Exponent>) {
        if i == n - 1 {
            cur.push(left as u16);
            out.push(Exponent(cur.clone()));
            cur.pop();
            return;
        }
        for e in 0..=left {
            cur.push(e as u16);
            rec(n, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    rec(n, 0, d, &mut Vec::with_capacity(n), &mut out);
    out.sort();
    out
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: FieldRef,
    nvars: usize,
    terms: BTreeMap<Exponent, AlgebraicNumber>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> =
                e.0.iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, k) })
                    .collect();
            let mono = mono.join("*");
            let (neg, body) = match c.as_rational() {
                Some(q) => {
                    let neg = q < &BigRational::zero();
                    let a = if neg { -q.clone() } else { q.clone() };
                    let body = if mono.is_empty() {
                        a.to_string()
                    } else if a.is_one() {
                        mono.clone()
                    } else {
                        format!("{a}*{mono}")
                    };
                    (neg, body)
                }
                None => {
                    let body = if mono.is_empty() { format!("({c})") } else { format!("({c})*{mono}") };
                    (false, body)
                }
            };
            if first {
                write!(f, "{}{}", if neg { "-" } else { "" }, body)?;
            } else {
                write!(f, " {} {}", if neg { "-" } else { "+" }, body)?;
            }
            first = false;
        }
        Ok(())
    }
}

impl MultiPoly {
    pub fn zero(field: &FieldRef, nvars: usize) -> Self {
        MultiPoly { field: field.clone(), nvars, terms: BTreeMap::new() }
    }

    pub fn constant(c: AlgebraicNumber, nvars: usize) -> Self {
        let field = c.field().clone();
        let mut p = Self::zero(&field, nvars);
        p.add_term(Exponent::zero(nvars), c);
        p
    }

    /// The variable `x_{i+1}` (0-based index `i`).
    pub fn var(field: &FieldRef, nvars: usize, i: usize) -> Self {
        Self::monomial(AlgebraicNumber::one(field), Exponent::unit(nvars, i))
    }

    pub fn monomial(c: AlgebraicNumber, e: Exponent) -> Self {
        let nvars = e.0.len();
        let field = c.field().clone();
        let mut p = Self::zero(&field, nvars);
        p.add_term(e, c);
        p
    }

    /// Linear form `sum c_i x_i`.
    pub fn linear_form(coeffs: &[AlgebraicNumber]) -> Self {
        let field = coeffs[0].field().clone();
        let n = coeffs.len();
        let mut p = Self::zero(&field, n);
        for (i, c) in coeffs.iter().enumerate() {
            p.add_term(Exponent::unit(n, i), c.clone());
        }
        p
    }

    pub fn from_terms(field: &FieldRef, nvars: usize, terms: impl IntoIterator<Item = (Exponent, AlgebraicNumber)>) -> Self {
        let mut p = Self::zero(field, nvars);
        for (e, c) in terms {
            assert_eq!(e.0.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponent, AlgebraicNumber> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &Exponent) -> AlgebraicNumber {
        self.terms.get(e).cloned().unwrap_or_else(|| AlgebraicNumber::zero(&self.field))
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&Exponent, &AlgebraicNumber)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, e: Exponent, c: AlgebraicNumber) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|e| e.degree());
        match it.next() {
            None => true,
            Some(d) => it.all(|x| x == d),
        }
    }

    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut p = Self::zero(&self.field, self.nvars);
        for (e, c) in &self.terms {
            if e.degree() == d {
                p.terms.insert(e.clone(), c.clone());
            }
        }
        p
    }

    /// Drops all terms of degree above `d`.
    pub fn truncate(&self, d: u32) -> Self {
        let mut p = Self::zero(&self.field, self.nvars);
        for (e, c) in &self.terms {
            if e.degree() <= d {
                p.terms.insert(e.clone(), c.clone());
            }
        }
        p
    }

    pub fn scale(&self, s: &AlgebraicNumber) -> Self {
        if s.is_zero() {
            return Self::zero(&self.field, self.nvars);
        }
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c = &*c * s;
        }
        p
    }

    /// Product truncated above total degree `max_deg`.
    pub fn mul_truncated(&self, other: &Self, max_deg: Option<u32>) -> Self {
        assert_eq!(self.nvars, other.nvars);
        let mut p = Self::zero(&self.field, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                if let Some(m) = max_deg {
                    if e1.degree() + e2.degree() > m {
                        continue;
                    }
                }
                p.add_term(e1.add(e2), c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(AlgebraicNumber::one(&self.field), self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Partial derivative with respect to `x_{i+1}`.
    pub fn partial(&self, i: usize) -> Self {
        let mut p = Self::zero(&self.field, self.nvars);
        for (e, c) in &self.terms {
            let k = e.0[i];
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.0[i] -= 1;
            p.add_term(e2, c * &AlgebraicNumber::from_int(&self.field, k as i64));
        }
        p
    }

    pub fn eval(&self, x: &[AlgebraicNumber]) -> AlgebraicNumber {
        assert_eq!(x.len(), self.nvars);
        let mut acc = AlgebraicNumber::zero(&self.field);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(&e.0) {
                if k > 0 {
                    t = &t * &xi.pow(k as i64);
                }
            }
            acc += &t;
        }
        acc
    }

    /// Replaces each variable `x_i` by `images[i]`, dropping terms above
    /// `max_deg` when given.
    pub fn compose(&self, images: &[MultiPoly], max_deg: Option<u32>) -> Self {
        assert_eq!(images.len(), self.nvars);
        let out_n = images[0].nvars;
        let mut cache: HashMap<(usize, u16), MultiPoly> = HashMap::new();
        let mut out = Self::zero(&self.field, out_n);
        let min_deg: Vec<u32> = images.iter().map(|g| g.min_degree().unwrap_or(u32::MAX)).collect();
        for (e, c) in &self.terms {
            if let Some(m) = max_deg {
                let lower: u64 = e.0.iter().zip(&min_deg).map(|(&k, &d)| k as u64 * d as u64).sum();
                if lower > m as u64 {
                    continue;
                }
            }
            let mut t = Self::constant(c.clone(), out_n);
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = power_cached(&mut cache, images, i, k, max_deg);
                t = t.mul_truncated(&pw, max_deg);
                if t.is_zero() {
                    break;
                }
            }
            out = &out + &t;
        }
        out
    }

    /// `x -> f(x*M)` for an `nvars x nvars` matrix `M`.
    pub fn substitute(&self, m: &FieldMatrix) -> Result<Self, PolyError> {
        if m.rows() != self.nvars || m.cols() != self.nvars {
            return Err(PolyError::DimensionMismatch(format!("{}x{} matrix for {} variables", m.rows(), m.cols(), self.nvars)));
        }
        numfield::ensure_same_field(&self.field, m.field())?;
        let images: Vec<MultiPoly> =
            (0..self.nvars).map(|j| MultiPoly::linear_form(&(0..self.nvars).map(|i| m[(i, j)].clone()).collect::<Vec<_>>())).collect();
        Ok(self.compose(&images, None))
    }

    /// Sets variable `i` to the constant 1 (dehomogenization).
    pub fn set_var_one(&self, i: usize) -> Self {
        let mut p = Self::zero(&self.field, self.nvars);
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            e2.0[i] = 0;
            p.add_term(e2, c.clone());
        }
        p
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e.0[i] > 0)
    }

    /// Coefficient vector of a homogeneous polynomial in the basis of degree-`d`
    /// monomials given by `index`.
    fn coeff_vector(&self, index: &HashMap<Exponent, usize>) -> Vec<AlgebraicNumber> {
        let mut v = vec![AlgebraicNumber::zero(&self.field); index.len()];
        for (e, c) in &self.terms {
            v[index[e]] = c.clone();
        }
        v
    }

    /// Parses an expression such as `"x1*x2*x3 - 2*x4^3 + (z+1)/3*x5^3"`,
    /// where `z` is the field generator.
    pub fn parse(field: &FieldRef, nvars: usize, s: &str) -> Result<Self, PolyError> {
        let mut p = Parser { s: s.as_bytes(), pos: 0, field, nvars };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(PolyError::Parse(format!("trailing input at {} in {s:?}", p.pos)));
        }
        Ok(v)
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms.iter().rev().map(|(e, c)| TermJson { exp: e.0.clone(), coeff: c.to_strings() }).collect()
    }

    pub fn from_json(field: &FieldRef, nvars: usize, t: &[TermJson]) -> Result<Self, PolyError> {
        let mut p = Self::zero(field, nvars);
        for term in t {
            if term.exp.len() != nvars {
                return Err(PolyError::DimensionMismatch(format!("exponent of length {} for {nvars} variables", term.exp.len())));
            }
            if term.coeff.len() != field.degree() {
                return Err(PolyError::DimensionMismatch(format!("coefficient of length {} in a degree-{} field", term.coeff.len(), field.degree())));
            }
            p.add_term(Exponent(term.exp.clone()), AlgebraicNumber::from_strings(field, &term.coeff)?);
        }
        Ok(p)
    }
}

fn power_cached(cache: &mut HashMap<(usize, u16), MultiPoly>, images: &[MultiPoly], i: usize, k: u16, max_deg: Option<u32>) -> MultiPoly {
    if let Some(p) = cache.get(&(i, k)) {
        return p.clone();
    }
    let p = if k == 1 {
        match max_deg {
            Some(m) => images[i].truncate(m),
            None => images[i].clone(),
        }
    } else {
        let prev = power_cached(cache, images, i, k - 1, max_deg);
        prev.mul_truncated(&images[i], max_deg)
    };
    cache.insert((i, k), p.clone());
    p
}

/// Serialized term: exponent vector and power-basis coefficient strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u16>,
    pub coeff: Vec<String>,
}

impl<'b> std::ops::Add<&'b MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &'b MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }
}

impl<'b> std::ops::Sub<&'b MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &'b MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            p.add_term(e.clone(), -c);
        }
        p
    }
}

impl<'b> std::ops::Mul<&'b MultiPoly> for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &'b MultiPoly) -> MultiPoly {
        self.mul_truncated(rhs, None)
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        let mut p = self.clone();
        for c in p.terms.values_mut() {
            *c = -&*c;
        }
        p
    }
}

fn check_homogeneous(p: &MultiPoly, what: &str) -> Result<u32, PolyError> {
    if !p.is_homogeneous() {
        return Err(PolyError::NotHomogeneous(format!("{what}: {p}")));
    }
    Ok(p.total_degree().unwrap_or(0))
}

/// Echelon basis of the degree-`d` part of the ideal generated by `gens`,
/// together with the monomial index it is expressed in.
pub fn graded_piece(gens: &[MultiPoly], d: u32, nvars: usize) -> Result<(EchelonSpan, HashMap<Exponent, usize>), PolyError> {
    let mons = monomials_of_degree(nvars, d);
    let index: HashMap<Exponent, usize> = mons.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let mut span = EchelonSpan::new(mons.len());
    for g in gens {
        if g.nvars != nvars {
            return Err(PolyError::DimensionMismatch("generators with different numbers of variables".into()));
        }
        let e = check_homogeneous(g, "generator")?;
        if g.is_zero() || e > d {
            continue;
        }
        for m in monomials_of_degree(nvars, d - e) {
            let shifted = MultiPoly { field: g.field.clone(), nvars, terms: g.terms.iter().map(|(ge, c)| (ge.add(&m), c.clone())).collect() };
            span.insert(shifted.coeff_vector(&index));
            if span.dim() == mons.len() {
                return Ok((span, index));
            }
        }
    }
    Ok((span, index))
}

/// Whether `g` lies in the degree-`d` part of the ideal generated by `gens`.
/// Decided by exact linear algebra on monomial multiples of the generators.
pub fn graded_membership(g: &MultiPoly, gens: &[MultiPoly], d: u32) -> Result<bool, PolyError> {
    let dg = check_homogeneous(g, "target")?;
    for h in gens {
        check_homogeneous(h, "generator")?;
        numfield::ensure_same_field(&g.field, &h.field)?;
    }
    if g.is_zero() {
        return Ok(true);
    }
    if dg != d {
        return Ok(false);
    }
    let (span, index) = graded_piece(gens, d, g.nvars)?;
    Ok(span.contains(&g.coeff_vector(&index)))
}

/// Dimension of `I_d` for the ideal generated by `gens`.
pub fn graded_dim(gens: &[MultiPoly], d: u32, nvars: usize) -> Result<usize, PolyError> {
    Ok(graded_piece(gens, d, nvars)?.0.dim())
}

/// Dimension of `I_d ∩ J_d`.
pub fn graded_intersection_dim(a: &[MultiPoly], b: &[MultiPoly], d: u32, nvars: usize) -> Result<usize, PolyError> {
    let (sa, _) = graded_piece(a, d, nvars)?;
    let (sb, _) = graded_piece(b, d, nvars)?;
    let mut sum = sa.clone();
    for v in sb.basis() {
        sum.insert(v.clone());
    }
    Ok(sa.dim() + sb.dim() - sum.dim())
}

/// Whether two homogeneous generating sets generate the same ideal.
pub fn same_ideal(a: &[MultiPoly], b: &[MultiPoly]) -> Result<bool, PolyError> {
    for (x, y) in [(a, b), (b, a)] {
        for g in x {
            let d = g.total_degree().unwrap_or(0);
            if !graded_membership(g, y, d)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A polynomial with coefficients in `F_p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModpPoly {
    pub p: u64,
    pub nvars: usize,
    pub terms: Vec<(Vec<u16>, u64)>,
}

impl ModpPoly {
    pub fn eval(&self, x: &[u64]) -> u64 {
        let p = self.p;
        let mut acc: u64 = 0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = t * xi % p;
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Reduces every coefficient into `F_p`.
pub fn reduce_poly_mod(f: &MultiPoly, pf: &PrimeField) -> Result<ModpPoly, PolyError> {
    let mut terms = Vec::new();
    for (e, c) in &f.terms {
        let r = numfield::reduce_mod(c, pf)?;
        if r != 0 {
            terms.push((e.0.clone(), r));
        }
    }
    Ok(ModpPoly { p: pf.p, nvars: f.nvars, terms })
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    field: &'a FieldRef,
    nvars: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: &str) -> PolyError {
        PolyError::Parse(format!("{msg} at {} in {:?}", self.pos, String::from_utf8_lossy(self.s)))
    }

    fn expr(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                b'-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, PolyError> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                b'/' => {
                    self.pos += 1;
                    let d = self.unary()?;
                    let dc = if d.terms.keys().all(|e| e.degree() == 0) {
                        d.coeff(&Exponent::zero(self.nvars))
                    } else {
                        return Err(self.err("division by a non-constant"));
                    };
                    let inv = dc.inv().ok_or_else(|| self.err("division by zero"))?;
                    acc = acc.scale(&inv);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            let k: u32 = k.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos]).unwrap().parse().map_err(|_| self.err("bad integer"))
    }

    fn atom(&mut self) -> Result<MultiPoly, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(MultiPoly::constant(AlgebraicNumber::from_rational(self.field, BigRational::from_integer(n)), self.nvars))
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(MultiPoly::constant(AlgebraicNumber::theta(self.field), self.nvars))
            }
            Some(b'x') => {
                self.pos += 1;
                let i = self.integer()?;
                let i: usize = i.try_into().map_err(|_| self.err("bad variable"))?;
                if i == 0 || i > self.nvars {
                    return Err(self.err("variable index out of range"));
                }
                Ok(MultiPoly::var(self.field, self.nvars, i - 1))
            }
            _ => Err(self.err("unexpected token")),
        }
    }
}

/// Parses a field constant written in the polynomial expression syntax.
pub fn parse_number(field: &FieldRef, s: &str) -> Result<AlgebraicNumber, PolyError> {
    let p = MultiPoly::parse(field, 1, s)?;
    if p.terms.keys().any(|e| e.degree() > 0) {
        return Err(PolyError::Parse(format!("{s:?} is not a constant")));
    }
    Ok(p.coeff(&Exponent::zero(1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::NumberField;

    fn poly(f: &FieldRef, s: &str) -> MultiPoly {
        MultiPoly::parse(f, 5, s).unwrap()
    }

    #[test]
    fn parse_and_display() {
        let q = NumberField::rational();
        let f = poly(&q, "x1*x2*x3 + x4^3 - 2*x5^3/3");
        assert_eq!(f.to_string(), "x1*x2*x3 + x4^3 - 2/3*x5^3");
        assert_eq!(f.total_degree(), Some(3));
        assert!(f.is_homogeneous());
        assert!(MultiPoly::parse(&q, 5, "x6").is_err());
        assert!(MultiPoly::parse(&q, 5, "x1 / x2").is_err());
    }

    #[test]
    fn derivative_and_eval() {
        let k = NumberField::cyclotomic(3).unwrap();
        let f = poly(&k, "x1*x2*x3 + x4^3 + x5^3");
        assert_eq!(f.partial(3), poly(&k, "3*x4^2"));
        let z = AlgebraicNumber::theta(&k);
        let one = AlgebraicNumber::one(&k);
        let zero = AlgebraicNumber::zero(&k);
        let pt = vec![zero.clone(), zero.clone(), zero, one.clone(), -&z];
        assert!(f.eval(&pt).is_zero());
        let pt2 = vec![one.clone(), one.clone(), one.clone(), one.clone(), one];
        assert_eq!(f.eval(&pt2), AlgebraicNumber::from_int(&k, 3));
    }

    #[test]
    fn membership_examples() {
        let q = NumberField::rational();
        let g = poly(&q, "x2*x3 + x4^2");
        let gens = vec![poly(&q, "x2"), poly(&q, "x3*x4 + x2*x5"), poly(&q, "x3^2 - x4*x5")];
        assert!(!graded_membership(&g, &gens, 2).unwrap());
        assert!(graded_membership(&poly(&q, "x2*x3"), &[poly(&q, "x2")], 2).unwrap());
        let r1 = vec![poly(&q, "x2*x3 + x4^2"), poly(&q, "x3^2 - x4*x5"), poly(&q, "x3*x4 + x2*x5")];
        assert!(graded_membership(&g, &r1, 2).unwrap());
        let f3 = poly(&q, "x2*x5^2 + x3^3");
        assert!(graded_membership(&f3, &r1, 3).unwrap());
        assert!(matches!(graded_membership(&poly(&q, "x2 + x3^2"), &r1, 2), Err(PolyError::NotHomogeneous(_))));
    }

    #[test]
    fn substitute_dimension_check() {
        let q = NumberField::rational();
        let f = poly(&q, "x1^2");
        let m = FieldMatrix::identity(&q, 4);
        assert!(matches!(f.substitute(&m), Err(PolyError::DimensionMismatch(_))));
    }

    #[test]
    fn json_round_trip() {
        let k = NumberField::cyclotomic(3).unwrap();
        let f = poly(&k, "x1*x2*x3 + z*x4^3 - (z+2)/5*x5^3");
        let j = f.to_json();
        assert_eq!(j[0].exp, vec![1, 1, 1, 0, 0]);
        let g = MultiPoly::from_json(&k, 5, &j).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn modp_reduction() {
        let k = NumberField::cyclotomic(3).unwrap();
        let f = poly(&k, "x1*x2*x3 + z*x4^3 + x5^3/2");
        let pf = PrimeField::with_theta(&k, 7, 2).unwrap();
        let r = reduce_poly_mod(&f, &pf).unwrap();
        assert_eq!(r.eval(&[1, 1, 1, 1, 1]), (1 + 2 + 4) % 7);
    }
}
