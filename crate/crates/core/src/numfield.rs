//! Exact arithmetic in number fields `Q(theta)` given by a monic minimal
//! polynomial, plus reduction modulo primes where the minimal polynomial
//! splits off a root.
//!
//! Elements are coefficient vectors in the power basis `1, theta, ...,
//! theta^(d-1)`. Arithmetic between elements of different fields panics;
//! boundaries that accept user input should call [`ensure_same_field`] first.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumFieldError {
    #[error("cyclotomic order {0} is not supported")]
    UnsupportedOrder(u32),
    #[error("bad prime {p}: {reason}")]
    BadPrime { p: u64, reason: String },
    #[error("elements belong to different number fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("invalid minimal polynomial: {0}")]
    InvalidMinPoly(String),
    #[error("cannot parse rational {0:?}")]
    BadRational(String),
    #[error("division by zero")]
    DivisionByZero,
}

/// Cyclotomic orders that can be requested.
pub const SUPPORTED_CYCLOTOMIC: [u32; 8] = [1, 2, 3, 4, 6, 8, 12, 24];

/// A number field presented by a monic minimal polynomial.
#[derive(Debug, Clone)]
pub struct NumberField {
    /// Monic minimal polynomial, lowest degree first.
    min_poly: Vec<BigRational>,
    label: String,
    descriptor: FieldDescriptor,
}

pub type FieldRef = Arc<NumberField>;

/// Serialized description of a field, as found in scenario files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldDescriptor {
    Rational,
    Cyclotomic { n: u32 },
    Quadratic { d: i64 },
    Minpoly { coeffs: Vec<String> },
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.min_poly == other.min_poly
    }
}
impl Eq for NumberField {}

impl NumberField {
    /// The rational numbers, with `theta = 0`.
    pub fn rational() -> FieldRef {
        Arc::new(NumberField { min_poly: vec![BigRational::zero(), BigRational::one()], label: "Q".into(), descriptor: FieldDescriptor::Rational })
    }

    /// `Q(zeta_n)` with `theta = zeta_n`. For `n <= 2` this is `Q` with
    /// `theta = 1` or `-1`.
    pub fn cyclotomic(n: u32) -> Result<FieldRef, NumFieldError> {
        if !SUPPORTED_CYCLOTOMIC.contains(&n) {
            return Err(NumFieldError::UnsupportedOrder(n));
        }
        let phi = cyclotomic_poly(n);
        Ok(Arc::new(NumberField {
            min_poly: phi.into_iter().map(BigRational::from_integer).collect(),
            label: format!("Q(zeta_{n})"),
            descriptor: FieldDescriptor::Cyclotomic { n },
        }))
    }

    /// `Q(sqrt d)` with minimal polynomial `x^2 - d`. `d` must not be a square.
    pub fn quadratic(d: i64) -> Result<FieldRef, NumFieldError> {
        if d >= 0 {
            let r = (d as f64).sqrt().round() as i64;
            if r * r == d {
                return Err(NumFieldError::InvalidMinPoly(format!("x^2 - {d} is reducible")));
            }
        }
        Ok(Arc::new(NumberField {
            min_poly: vec![BigRational::from_integer(BigInt::from(-d)), BigRational::zero(), BigRational::one()],
            label: format!("Q(sqrt({d}))"),
            descriptor: FieldDescriptor::Quadratic { d },
        }))
    }

    /// Field from an explicit monic minimal polynomial (lowest degree first).
    /// Irreducibility is the caller's responsibility.
    pub fn from_min_poly(coeffs: Vec<BigRational>) -> Result<FieldRef, NumFieldError> {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(NumFieldError::InvalidMinPoly("degree must be at least 1".into()));
        }
        if !coeffs.last().unwrap().is_one() {
            return Err(NumFieldError::InvalidMinPoly("polynomial is not monic".into()));
        }
        let desc = FieldDescriptor::Minpoly { coeffs: coeffs.iter().map(|c| c.to_string()).collect() };
        let label = format!("Q[z]/({})", format_upoly(&coeffs, "z"));
        Ok(Arc::new(NumberField { min_poly: coeffs, label, descriptor: desc }))
    }

    pub fn from_descriptor(desc: &FieldDescriptor) -> Result<FieldRef, NumFieldError> {
        match desc {
            FieldDescriptor::Rational => Ok(Self::rational()),
            FieldDescriptor::Cyclotomic { n } => Self::cyclotomic(*n),
            FieldDescriptor::Quadratic { d } => Self::quadratic(*d),
            FieldDescriptor::Minpoly { coeffs } => {
                let c = coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?;
                Self::from_min_poly(c)
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[BigRational] {
        &self.min_poly
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.descriptor
    }

    /// Order of `theta` when the field was built as cyclotomic.
    pub fn cyclotomic_order(&self) -> Option<u32> {
        match self.descriptor {
            FieldDescriptor::Cyclotomic { n } => Some(n),
            _ => None,
        }
    }
}

/// Integer coefficients of the n-th cyclotomic polynomial, lowest first.
fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let den = cyclotomic_poly(d);
            num = exact_int_div(&num, &den);
        }
    }
    num
}

fn exact_int_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![BigInt::zero(); num.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd].clone();
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|r| r.is_zero()));
    q
}

/// Checks that two field handles describe the same field.
pub fn ensure_same_field(a: &NumberField, b: &NumberField) -> Result<(), NumFieldError> {
    if a == b {
        Ok(())
    } else {
        Err(NumFieldError::FieldMismatch(a.label.clone(), b.label.clone()))
    }
}

/// Parses `"p"`, `"-p"` or `"p/q"` into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational, NumFieldError> {
    let bad = || NumFieldError::BadRational(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = t.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

/// An element of a number field.
#[derive(Clone)]
pub struct AlgebraicNumber {
    field: FieldRef,
    coeffs: Vec<BigRational>,
}

impl PartialEq for AlgebraicNumber {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.field == *other.field
    }
}
impl Eq for AlgebraicNumber {}

impl Hash for AlgebraicNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_upoly(&self.coeffs, "z"))
    }
}

impl AlgebraicNumber {
    pub fn zero(field: &FieldRef) -> Self {
        AlgebraicNumber { field: field.clone(), coeffs: vec![BigRational::zero(); field.degree()] }
    }

    pub fn one(field: &FieldRef) -> Self {
        Self::from_rational(field, BigRational::one())
    }

    pub fn from_int(field: &FieldRef, n: i64) -> Self {
        Self::from_rational(field, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_rational(field: &FieldRef, q: BigRational) -> Self {
        let mut c = vec![BigRational::zero(); field.degree()];
        c[0] = q;
        AlgebraicNumber { field: field.clone(), coeffs: c }
    }

    /// The generator `theta` of the field.
    pub fn theta(field: &FieldRef) -> Self {
        Self::from_coeffs(field, vec![BigRational::zero(), BigRational::one()])
    }

    /// Builds `sum c_i theta^i`, reducing modulo the minimal polynomial.
    pub fn from_coeffs(field: &FieldRef, coeffs: Vec<BigRational>) -> Self {
        AlgebraicNumber { field: field.clone(), coeffs: reduce(&field.min_poly, coeffs) }
    }

    pub fn field(&self) -> &FieldRef {
        &self.field
    }

    /// Power-basis coefficients, length equal to the field degree.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    fn check(&self, other: &Self) {
        if !Arc::ptr_eq(&self.field, &other.field) && *self.field != *other.field {
            panic!("mixed-field arithmetic: {} vs {}", self.field.label, other.field.label);
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.field.degree() == 1 {
            return Some(Self::from_rational(&self.field, self.coeffs[0].recip()));
        }
        // s*a + t*m = g, g a nonzero constant since m is irreducible
        let (g, s) = upoly_ext_gcd(&trim(self.coeffs.clone()), &self.field.min_poly);
        assert!(g.len() == 1, "minimal polynomial is not irreducible");
        let ginv = g[0].recip();
        let s: Vec<BigRational> = s.into_iter().map(|c| c * &ginv).collect();
        Some(Self::from_coeffs(&self.field, s))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, NumFieldError> {
        let inv = other.inv().ok_or(NumFieldError::DivisionByZero)?;
        Ok(self * &inv)
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inv().expect("negative power of zero") } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one(&self.field);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        acc
    }

    /// Serialized form: one `"num/den"` string per power-basis coefficient.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_strings(field: &FieldRef, s: &[String]) -> Result<Self, NumFieldError> {
        let c = s.iter().map(|x| parse_rational(x)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_coeffs(field, c))
    }
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.len() > 1 && v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Reduces a polynomial in theta modulo the monic minimal polynomial and pads
/// to the field degree.
fn reduce(m: &[BigRational], mut c: Vec<BigRational>) -> Vec<BigRational> {
    let d = m.len() - 1;
    if c.len() > d {
        for i in (d..c.len()).rev() {
            if c[i].is_zero() {
                continue;
            }
            let lead = std::mem::replace(&mut c[i], BigRational::zero());
            for j in 0..d {
                if !m[j].is_zero() {
                    let t = &lead * &m[j];
                    c[i - d + j] -= t;
                }
            }
        }
        c.truncate(d);
    }
    c.resize(d, BigRational::zero());
    c
}

fn upoly_divmod(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (vec![BigRational::zero()], r);
    }
    let lead_inv = b.last().unwrap().recip();
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let c = &r[i + b.len() - 1] * &lead_inv;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    r.truncate(b.len() - 1);
    if r.is_empty() {
        r.push(BigRational::zero());
    }
    (q, trim(r))
}

fn upoly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn upoly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    trim(out)
}

/// Returns `(g, s)` with `s*a = g (mod m)` and `g = gcd(a, m)`.
fn upoly_ext_gcd(a: &[BigRational], m: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    let (mut s0, mut s1) = (vec![BigRational::zero()], vec![BigRational::one()]);
    while !(r1.len() == 1 && r1[0].is_zero()) {
        let (q, r) = upoly_divmod(&r0, &r1);
        let s = upoly_sub(&s0, &upoly_mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

fn format_upoly(c: &[BigRational], var: &str) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, ci) in c.iter().enumerate().rev() {
        if ci.is_zero() {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        let coef = if mono.is_empty() {
            ci.abs().to_string()
        } else if ci.abs().is_one() {
            String::new()
        } else {
            format!("{}*", ci.abs())
        };
        let sign = if ci.is_negative() { "-" } else { "+" };
        parts.push(format!("{sign}{coef}{mono}"));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = parts.join(" ");
    s = s.replace(" +", " + ").replace(" -", " - ");
    if let Some(rest) = s.strip_prefix('+') {
        rest.to_string()
    } else {
        s
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, 'b> std::ops::$tr<&'b AlgebraicNumber> for &'a AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, rhs: &'b AlgebraicNumber) -> AlgebraicNumber {
                self.check(rhs);
                #[allow(clippy::redundant_closure_call)]
                ($body)(self, rhs)
            }
        }
        impl std::ops::$tr<AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
                std::ops::$tr::$m(&self, &rhs)
            }
        }
        impl<'b> std::ops::$tr<&'b AlgebraicNumber> for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $m(self, rhs: &'b AlgebraicNumber) -> AlgebraicNumber {
                std::ops::$tr::$m(&self, rhs)
            }
        }
    };
}

binop!(Add, add, |a: &AlgebraicNumber, b: &AlgebraicNumber| AlgebraicNumber {
    field: a.field.clone(),
    coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
});
binop!(Sub, sub, |a: &AlgebraicNumber, b: &AlgebraicNumber| AlgebraicNumber {
    field: a.field.clone(),
    coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
});
binop!(Mul, mul, |a: &AlgebraicNumber, b: &AlgebraicNumber| {
    if a.coeffs.len() == 1 {
        AlgebraicNumber { field: a.field.clone(), coeffs: vec![&a.coeffs[0] * &b.coeffs[0]] }
    } else {
        let prod = upoly_mul(&a.coeffs, &b.coeffs);
        AlgebraicNumber { field: a.field.clone(), coeffs: reduce(&a.field.min_poly, prod) }
    }
});
binop!(Div, div, |a: &AlgebraicNumber, b: &AlgebraicNumber| { a.checked_div(b).expect("division by zero") });

impl std::ops::Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        AlgebraicNumber { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}
impl std::ops::Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}
impl std::ops::AddAssign<&AlgebraicNumber> for AlgebraicNumber {
    fn add_assign(&mut self, rhs: &AlgebraicNumber) {
        self.check(rhs);
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *x += y;
        }
    }
}
impl std::ops::SubAssign<&AlgebraicNumber> for AlgebraicNumber {
    fn sub_assign(&mut self, rhs: &AlgebraicNumber) {
        self.check(rhs);
        for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *x -= y;
        }
    }
}

/// A residue field `F_p` together with the image of `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    pub p: u64,
    pub theta_image: u64,
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `a^-1 mod p` for `p` prime, `a` nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = ((acc as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    acc
}

/// Reduces a rational mod `p`; `None` if `p` divides the denominator.
pub fn rational_mod(q: &BigRational, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let den = q.denom().mod_floor(&pb).to_u64()?;
    if den == 0 {
        return None;
    }
    let num = q.numer().mod_floor(&pb).to_u64()?;
    Some(((num as u128 * inv_mod(den, p) as u128) % p as u128) as u64)
}

impl PrimeField {
    /// Uses the smallest root of the minimal polynomial mod `p`.
    pub fn new(field: &NumberField, p: u64) -> Result<Self, NumFieldError> {
        let roots = Self::roots(field, p)?;
        match roots.first() {
            Some(&t) => Ok(PrimeField { p, theta_image: t }),
            None => Err(NumFieldError::BadPrime { p, reason: format!("minimal polynomial of {} has no root mod {p}", field.label) }),
        }
    }

    /// Uses a caller-chosen root, which is validated.
    pub fn with_theta(field: &NumberField, p: u64, theta_image: u64) -> Result<Self, NumFieldError> {
        let m = Self::reduced_min_poly(field, p)?;
        if eval_mod(&m, theta_image % p, p) != 0 {
            return Err(NumFieldError::BadPrime { p, reason: format!("{theta_image} is not a root of the minimal polynomial") });
        }
        Ok(PrimeField { p, theta_image: theta_image % p })
    }

    /// All roots of the minimal polynomial mod `p`, ascending.
    pub fn roots(field: &NumberField, p: u64) -> Result<Vec<u64>, NumFieldError> {
        let m = Self::reduced_min_poly(field, p)?;
        Ok((0..p).filter(|&t| eval_mod(&m, t, p) == 0).collect())
    }

    fn reduced_min_poly(field: &NumberField, p: u64) -> Result<Vec<u64>, NumFieldError> {
        if !is_prime(p) {
            return Err(NumFieldError::BadPrime { p, reason: "not prime".into() });
        }
        field
            .min_poly
            .iter()
            .map(|c| {
                rational_mod(c, p).ok_or_else(|| NumFieldError::BadPrime { p, reason: "divides a denominator of the minimal polynomial".into() })
            })
            .collect()
    }
}

fn eval_mod(c: &[u64], t: u64, p: u64) -> u64 {
    c.iter().rev().fold(0u64, |acc, &ci| ((acc as u128 * t as u128 + ci as u128) % p as u128) as u64)
}

/// The image of `a` in `F_p` under `theta -> theta_image`.
pub fn reduce_mod(a: &AlgebraicNumber, pf: &PrimeField) -> Result<u64, NumFieldError> {
    let p = pf.p;
    if !is_prime(p) {
        return Err(NumFieldError::BadPrime { p, reason: "not prime".into() });
    }
    let mut cs = Vec::with_capacity(a.coeffs.len());
    for c in &a.coeffs {
        cs.push(rational_mod(c, p).ok_or_else(|| NumFieldError::BadPrime { p, reason: format!("divides the denominator of {c}") })?);
    }
    Ok(eval_mod(&cs, pf.theta_image, p))
}
