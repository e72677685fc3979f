//! Singular points of cubic hypersurfaces and their ADE types.
//!
//! Classification works in the affine chart of the first nonzero coordinate
//! of the point: Hessian corank, then the splitting lemma by repeated
//! completion of squares, truncated at a fixed degree. The residual function
//! in the kernel variables decides the type.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::multipoly::{reduce_poly_mod, Exponent, MultiPoly, PolyError};
use crate::numfield::{is_prime, reduce_mod, AlgebraicNumber, NumFieldError, PrimeField};

pub const DEFAULT_TRUNCATION: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SingularityError {
    #[error("point is not a singular point of the hypersurface")]
    NotSingular,
    #[error("residual series vanishes up to degree {0}; raise the truncation")]
    TruncationInsufficient(u32),
    #[error("unsupported singularity type: {0}")]
    UnsupportedType(String),
    #[error("bad prime {0}")]
    BadPrime(u64),
    #[error("point has {0} coordinates, polynomial has {1} variables")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] NumFieldError),
}

/// A point of projective space, normalized so its first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ProjPoint(Vec<AlgebraicNumber>);

impl ProjPoint {
    /// Normalizes the given coordinates. Returns `None` for the zero vector.
    pub fn new(coords: Vec<AlgebraicNumber>) -> Option<Self> {
        let lead = coords.iter().position(|c| !c.is_zero())?;
        let inv = coords[lead].inv().unwrap();
        Some(ProjPoint(coords.iter().map(|c| c * &inv).collect()))
    }

    pub fn coords(&self) -> &[AlgebraicNumber] {
        &self.0
    }

    /// 0-based index of the first nonzero coordinate.
    pub fn chart(&self) -> usize {
        self.0.iter().position(|c| !c.is_zero()).unwrap()
    }

    /// Coordinate `i` is one and all others vanish.
    pub fn coordinate(field: &crate::numfield::FieldRef, n: usize, i: usize) -> Self {
        let mut v = vec![AlgebraicNumber::zero(field); n];
        v[i] = AlgebraicNumber::one(field);
        ProjPoint(v)
    }

    pub fn to_json(&self) -> Vec<Vec<String>> {
        self.0.iter().map(|c| c.to_strings()).collect()
    }

    /// Reduction mod `p`, normalized again over `F_p`.
    pub fn reduce_mod(&self, pf: &PrimeField) -> Result<Vec<u64>, NumFieldError> {
        let v: Vec<u64> = self.0.iter().map(|c| reduce_mod(c, pf)).collect::<Result<_, _>>()?;
        Ok(normalize_modp(v, pf.p))
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(":"))
    }
}

/// Scales a nonzero vector over `F_p` so that its first nonzero entry is 1.
pub fn normalize_modp(v: Vec<u64>, p: u64) -> Vec<u64> {
    match v.iter().position(|&x| x % p != 0) {
        None => v,
        Some(i) => {
            let inv = crate::numfield::inv_mod(v[i], p);
            v.iter().map(|&x| x % p * inv % p).collect()
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum AdeType {
    A(u32),
    D(u32),
    E(u32),
}

impl AdeType {
    /// Milnor number, equal to the index.
    pub fn milnor(&self) -> u32 {
        match *self {
            AdeType::A(n) | AdeType::D(n) | AdeType::E(n) => n,
        }
    }
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeType::A(n) => write!(f, "A{n}"),
            AdeType::D(n) => write!(f, "D{n}"),
            AdeType::E(n) => write!(f, "E{n}"),
        }
    }
}

impl FromStr for AdeType {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (fam, idx) = s.split_at(1.min(s.len()));
        let n: u32 = idx.parse().map_err(|_| format!("bad ADE type {s:?}"))?;
        let t = match fam {
            "A" if n >= 1 => AdeType::A(n),
            "D" if n >= 4 => AdeType::D(n),
            "E" if (6..=8).contains(&n) => AdeType::E(n),
            _ => return Err(format!("bad ADE type {s:?}")),
        };
        Ok(t)
    }
}

impl Serialize for AdeType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AdeType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularReport {
    pub point: ProjPoint,
    pub ade_type: AdeType,
    pub corank: usize,
    /// Order of the residual series: `n+1` for `A_n`, 3 for `D_4`.
    pub residual_order: u32,
    /// 0-based index of the affine chart used.
    pub chart: usize,
}

#[derive(Serialize)]
struct ReportJson {
    point: Vec<Vec<String>>,
    #[serde(rename = "type")]
    ade_type: AdeType,
    chart: usize,
    corank: usize,
    residual_order: u32,
}

impl SingularReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(ReportJson {
            point: self.point.to_json(),
            ade_type: self.ade_type,
            chart: self.chart + 1,
            corank: self.corank,
            residual_order: self.residual_order,
        })
        .unwrap()
    }
}

pub fn is_singular_at(f: &MultiPoly, p: &ProjPoint) -> Result<bool, SingularityError> {
    if p.0.len() != f.nvars() {
        return Err(SingularityError::DimensionMismatch(p.0.len(), f.nvars()));
    }
    if !f.eval(&p.0).is_zero() {
        return Ok(false);
    }
    Ok((0..f.nvars()).all(|i| f.partial(i).eval(&p.0).is_zero()))
}

/// Germ of `f` at `p` in the chart `x_c = 1`, with `y_i = x_i - p_i`.
/// Variable `c` does not occur in the result.
pub fn local_germ(f: &MultiPoly, p: &ProjPoint) -> MultiPoly {
    let n = f.nvars();
    let c = p.chart();
    let field = f.field();
    let images: Vec<MultiPoly> = (0..n)
        .map(|i| {
            let shift = MultiPoly::constant(p.0[i].clone(), n);
            if i == c {
                shift
            } else {
                &MultiPoly::var(field, n, i) + &shift
            }
        })
        .collect();
    f.compose(&images, None)
}

fn var_exp(n: usize, i: usize, j: usize) -> Exponent {
    let mut e = Exponent::zero(n);
    e.0[i] += 1;
    e.0[j] += 1;
    e
}

/// Classifies the singularity of `f` at `p` with the splitting lemma truncated
/// at degree `truncation`. Supports `A_1..A_7` and `D_4`.
pub fn classify_ade(f: &MultiPoly, p: &ProjPoint, truncation: u32) -> Result<SingularReport, SingularityError> {
    if !is_singular_at(f, p)? {
        return Err(SingularityError::NotSingular);
    }
    if truncation < 3 {
        return Err(SingularityError::TruncationInsufficient(truncation));
    }
    let n = f.nvars();
    let field = f.field().clone();
    let chart = p.chart();
    let mut h = local_germ(f, p);
    debug_assert!(h.min_degree().is_none_or(|d| d >= 2));

    let mut remaining: Vec<usize> = (0..n).filter(|&i| i != chart).collect();
    let mut processed: Vec<(usize, AlgebraicNumber)> = Vec::new();
    let two = AlgebraicNumber::from_int(&field, 2);
    loop {
        let pivot = remaining.iter().position(|&i| !h.coeff(&var_exp(n, i, i)).is_zero());
        if let Some(pos) = pivot {
            let i = remaining.remove(pos);
            let a = h.coeff(&var_exp(n, i, i));
            // y_i -> y_i - sum_j b_j/(2a) y_j removes the cross terms y_i y_j
            let mut image = MultiPoly::var(&field, n, i);
            let denom = (&two * &a).inv().unwrap();
            for &j in &remaining {
                let b = h.coeff(&var_exp(n, i, j));
                if !b.is_zero() {
                    image = &image - &MultiPoly::var(&field, n, j).scale(&(&b * &denom));
                }
            }
            let images: Vec<MultiPoly> = (0..n).map(|k| if k == i { image.clone() } else { MultiPoly::var(&field, n, k) }).collect();
            h = h.compose(&images, None);
            processed.push((i, a));
            continue;
        }
        let cross = remaining
            .iter()
            .enumerate()
            .flat_map(|(a, &i)| remaining[a + 1..].iter().map(move |&j| (i, j)))
            .find(|&(i, j)| !h.coeff(&var_exp(n, i, j)).is_zero());
        match cross {
            Some((i, j)) => {
                // y_i = u + v, y_j = u - v turns y_i y_j into u^2 - v^2
                let (vi, vj) = (MultiPoly::var(&field, n, i), MultiPoly::var(&field, n, j));
                let images: Vec<MultiPoly> = (0..n)
                    .map(|k| {
                        if k == i {
                            &vi + &vj
                        } else if k == j {
                            &vi - &vj
                        } else {
                            MultiPoly::var(&field, n, k)
                        }
                    })
                    .collect();
                h = h.compose(&images, None);
            }
            None => break,
        }
    }

    let corank = remaining.len();
    if corank == 0 {
        return Ok(SingularReport { point: p.clone(), ade_type: AdeType::A(1), corank, residual_order: 2, chart });
    }
    if corank >= 3 {
        return Err(SingularityError::UnsupportedType(format!("Hessian corank {corank}")));
    }

    if corank == 1 {
        // Terms up to the working depth are exact, so the first depth with a
        // nonzero residual gives its order. Shallow passes are much cheaper.
        let order = (3..=truncation).find_map(|depth| split_residual(h.clone(), &processed, &remaining, depth).min_degree());
        let Some(k) = order else {
            return Err(SingularityError::TruncationInsufficient(truncation));
        };
        if k - 1 > 7 {
            return Err(SingularityError::UnsupportedType(format!("A{}", k - 1)));
        }
        return Ok(SingularReport { point: p.clone(), ade_type: AdeType::A(k - 1), corank, residual_order: k, chart });
    }

    // In corank 2 only the cubic part of the residual matters, and the
    // splitting steps never change it.
    let residual = split_residual(h, &processed, &remaining, truncation.min(4));
    let cubic = residual.homogeneous_part(3);
    let (u, v) = (remaining[0], remaining[1]);
    // coefficients of u^j v^(3-j)
    let coeffs: Vec<AlgebraicNumber> = (0..=3)
        .map(|j| {
            let mut e = Exponent::zero(n);
            e.0[u] = j as u16;
            e.0[v] = 3 - j as u16;
            cubic.coeff(&e)
        })
        .collect();
    if binary_cubic_has_three_factors(&coeffs) {
        Ok(SingularReport { point: p.clone(), ade_type: AdeType::D(4), corank, residual_order: 3, chart })
    } else {
        Err(SingularityError::UnsupportedType("corank 2 with degenerate cubic term (D5 or worse)".into()))
    }
}

/// Runs the truncated splitting lemma and returns the residual in the kernel
/// variables.
fn split_residual(mut h: MultiPoly, processed: &[(usize, AlgebraicNumber)], kernel: &[usize], truncation: u32) -> MultiPoly {
    let n = h.nvars();
    let field = h.field().clone();
    h = h.truncate(truncation);
    let two = AlgebraicNumber::from_int(&field, 2);
    // Degree-k terms are final once all steps below k are done, so the last
    // step needed is truncation - 1.
    for k in 3..truncation {
        let mut shifts: Vec<MultiPoly> = processed.iter().map(|_| MultiPoly::zero(&field, n)).collect();
        let mut any = false;
        for (e, c) in h.terms() {
            if e.degree() != k {
                continue;
            }
            if let Some(slot) = processed.iter().position(|(i, _)| e.0[*i] > 0) {
                let mut m = e.clone();
                m.0[processed[slot].0] -= 1;
                shifts[slot].add_term(m, c.clone());
                any = true;
            }
        }
        if !any {
            continue;
        }
        let images: Vec<MultiPoly> = (0..n)
            .map(|var| match processed.iter().position(|(i, _)| *i == var) {
                Some(slot) if !shifts[slot].is_zero() => {
                    let lam = &processed[slot].1;
                    let s = (&two * lam).inv().unwrap();
                    &MultiPoly::var(&field, n, var) - &shifts[slot].scale(&s)
                }
                _ => MultiPoly::var(&field, n, var),
            })
            .collect();
        h = h.compose(&images, Some(truncation));
    }
    let mut r = MultiPoly::zero(&field, n);
    for (e, c) in h.terms() {
        if e.0.iter().enumerate().all(|(i, &x)| x == 0 || kernel.contains(&i)) {
            r.add_term(e.clone(), c.clone());
        }
    }
    r
}

/// Whether the binary cubic `sum c_j u^j v^(3-j)` has three distinct linear
/// factors, decided by a gcd with the derivative of its dehomogenization.
pub fn binary_cubic_has_three_factors(c: &[AlgebraicNumber]) -> bool {
    let p = trim_u(c.to_vec());
    let deg = p.len() - 1;
    if p.len() == 1 && p[0].is_zero() {
        return false;
    }
    // roots of p(t) = c(t, 1) plus a simple root at infinity when deg = 2
    if deg < 2 {
        return false;
    }
    let dp: Vec<AlgebraicNumber> = p[1..].iter().enumerate().map(|(i, x)| x * &AlgebraicNumber::from_int(x.field(), i as i64 + 1)).collect();
    let g = upoly_gcd(p, dp);
    g.len() == 1
}

fn trim_u(mut v: Vec<AlgebraicNumber>) -> Vec<AlgebraicNumber> {
    while v.len() > 1 && v.last().is_some_and(|x| x.is_zero()) {
        v.pop();
    }
    v
}

fn upoly_gcd(a: Vec<AlgebraicNumber>, b: Vec<AlgebraicNumber>) -> Vec<AlgebraicNumber> {
    let (mut a, mut b) = (trim_u(a), trim_u(b));
    while !(b.len() == 1 && b[0].is_zero()) {
        let r = upoly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

fn upoly_rem(a: &[AlgebraicNumber], b: &[AlgebraicNumber]) -> Vec<AlgebraicNumber> {
    let mut r = a.to_vec();
    let inv = b.last().unwrap().inv().unwrap();
    while r.len() >= b.len() && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() * &inv;
        for (j, bj) in b.iter().enumerate() {
            let t = &f * bj;
            r[shift + j] -= &t;
        }
        r.pop();
        if r.is_empty() {
            r.push(AlgebraicNumber::zero(a[0].field()));
        }
        r = trim_u(r);
        if r.len() < b.len() {
            break;
        }
    }
    r
}

/// All singular points of `f` over `F_p`, using the smallest root of the
/// minimal polynomial as the image of the field generator.
pub fn modp_singular_scan(f: &MultiPoly, p: u64) -> Result<Vec<Vec<u64>>, SingularityError> {
    if p == 2 || p == 3 || !is_prime(p) {
        return Err(SingularityError::BadPrime(p));
    }
    let pf = PrimeField::new(f.field(), p)?;
    modp_singular_scan_with(f, &pf)
}

/// As [`modp_singular_scan`] with an explicit residue field. Points are
/// normalized and returned in lexicographic order.
pub fn modp_singular_scan_with(f: &MultiPoly, pf: &PrimeField) -> Result<Vec<Vec<u64>>, SingularityError> {
    let p = pf.p;
    if p == 2 || p == 3 || !is_prime(p) {
        return Err(SingularityError::BadPrime(p));
    }
    let n = f.nvars();
    let partials = (0..n).map(|i| reduce_poly_mod(&f.partial(i), pf)).collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for_each_projective_point(n, p, |x| {
        if partials.iter().all(|d| d.eval(x) == 0) {
            out.push(x.to_vec());
        }
    });
    out.sort();
    Ok(out)
}

/// Visits every normalized point of `P^{n-1}(F_p)`.
pub fn for_each_projective_point(n: usize, p: u64, mut visit: impl FnMut(&[u64])) {
    let mut x = vec![0u64; n];
    for lead in 0..n {
        for v in x.iter_mut() {
            *v = 0;
        }
        x[lead] = 1;
        let free = n - lead - 1;
        let total = p.pow(free as u32);
        for idx in 0..total {
            let mut r = idx;
            for j in (lead + 1..n).rev() {
                x[j] = r % p;
                r /= p;
            }
            visit(&x);
        }
    }
}
