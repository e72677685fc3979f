//! Projection from a singular point. With the point moved to `[1:0:0:0:0]`
//! the cubic reads `x1*f2 + f3`; the curve `C_q = {f2 = f3 = 0}` in the
//! hyperplane `x1 = 0` controls the defect.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::FieldMatrix;
use crate::multipoly::{graded_membership, reduce_poly_mod, Exponent, ModpPoly, MultiPoly, PolyError};
use crate::numfield::{AlgebraicNumber, FieldRef, NumFieldError, PrimeField};
use crate::singularities::{classify_ade, for_each_projective_point, AdeType, ProjPoint, SingularityError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectionError {
    #[error("the coordinate change does not move the point to [1:0:...:0]")]
    NotAtOrigin,
    #[error("moved cubic has terms divisible by x1^2; the point is not singular")]
    HasX1Square,
    #[error("defect formula not applicable to {0}")]
    FormulaNotApplicable(AdeType),
    #[error("coordinate change is not invertible")]
    NotInvertible,
    #[error("component {0} has no generators")]
    EmptyComponent(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Singularity(#[from] SingularityError),
    #[error(transparent)]
    Field(#[from] NumFieldError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionData {
    pub q_type: AdeType,
    /// The cubic after the coordinate change.
    pub moved: MultiPoly,
    /// Quadric in `x2..x5` (stored in the full ring, free of `x1`).
    pub f2: MultiPoly,
    /// Cubic in `x2..x5`.
    pub f3: MultiPoly,
}

/// Matrix `M` with first row `q` and the remaining rows standard basis
/// vectors, so that `f(x*M)` has the point at `[1:0:...:0]`.
pub fn move_to_origin(q: &ProjPoint) -> FieldMatrix {
    let n = q.coords().len();
    let field = q.coords()[0].field().clone();
    let c = q.chart();
    let mut rows = vec![q.coords().to_vec()];
    for j in (0..n).filter(|&j| j != c) {
        let mut r = vec![AlgebraicNumber::zero(&field); n];
        r[j] = AlgebraicNumber::one(&field);
        rows.push(r);
    }
    FieldMatrix::from_rows(rows)
}

/// Permutation matrix exchanging `x1` and `x_{i+1}`.
pub fn swap_with_first(field: &FieldRef, n: usize, i: usize) -> FieldMatrix {
    let rows = (0..n)
        .map(|r| {
            let target = if r == 0 {
                i
            } else if r == i {
                0
            } else {
                r
            };
            (0..n).map(|c| if c == target { AlgebraicNumber::one(field) } else { AlgebraicNumber::zero(field) }).collect()
        })
        .collect();
    FieldMatrix::from_rows(rows)
}

/// Splits `f(x*M)` as `x1*f2 + f3`. `M` must send `[1:0:...:0]` to `q`,
/// i.e. its first row is proportional to `q`.
pub fn extract_projection(f: &MultiPoly, q: &ProjPoint, change: Option<&FieldMatrix>, truncation: u32) -> Result<ProjectionData, ProjectionError> {
    let n = f.nvars();
    let field = f.field();
    let moved = match change {
        None => f.clone(),
        Some(m) => {
            if m.inverse().is_none() {
                return Err(ProjectionError::NotInvertible);
            }
            f.substitute(m)?
        }
    };
    let image = match change {
        None => ProjPoint::coordinate(field, n, 0),
        Some(m) => ProjPoint::new(m.row(0).to_vec()).ok_or(ProjectionError::NotInvertible)?,
    };
    if &image != q {
        return Err(ProjectionError::NotAtOrigin);
    }
    let mut f2 = MultiPoly::zero(field, n);
    let mut f3 = MultiPoly::zero(field, n);
    for (e, c) in moved.terms() {
        match e.0[0] {
            0 => f3.add_term(e.clone(), c.clone()),
            1 => {
                let mut e2: Exponent = e.clone();
                e2.0[0] = 0;
                f2.add_term(e2, c.clone());
            }
            _ => return Err(ProjectionError::HasX1Square),
        }
    }
    let origin = ProjPoint::coordinate(field, n, 0);
    let q_type = classify_ade(&moved, &origin, truncation)?.ade_type;
    Ok(ProjectionData { q_type, moved, f2, f3 })
}

/// Rank of the symmetric Gram matrix of a quadratic form.
pub fn qq_rank(f2: &MultiPoly) -> usize {
    let n = f2.nvars();
    let field = f2.field();
    let two = AlgebraicNumber::from_int(field, 2);
    let mut g = vec![vec![AlgebraicNumber::zero(field); n]; n];
    for (e, c) in f2.terms() {
        let idx: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, e.0[i] as usize)).collect();
        match idx[..] {
            [i, j] if i == j => g[i][i] = c * &two,
            [i, j] => {
                g[i][j] = c.clone();
                g[j][i] = c.clone();
            }
            _ => {}
        }
    }
    FieldMatrix::from_rows(g).rank()
}

/// Defect from the number of irreducible components of `C_q`.
pub fn defect_from_components(q_type: AdeType, components: usize) -> Result<i64, ProjectionError> {
    let n = components as i64;
    match q_type {
        AdeType::D(4) => Ok(n - 2),
        AdeType::A(k) if k >= 2 => Ok(n - 1),
        t => Err(ProjectionError::FormulaNotApplicable(t)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DecompositionStatus {
    Verified,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeCheck {
    pub p: u64,
    /// Number of `F_p` points of `C_q` in `P^3`.
    pub curve_points: usize,
    pub union_points: usize,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionVerdict {
    pub status: DecompositionStatus,
    /// Set when the covering check ran at a single prime only.
    pub single_prime_caveat: bool,
    pub primes: Vec<PrimeCheck>,
    pub failures: Vec<String>,
}

/// Checks that each claimed component lies on `C_q` (both `f2` and `f3`
/// lie in its ideal in degrees 2 and 3) and that the components cover the
/// `F_p` points of `C_q` at every listed prime.
pub fn verify_decomposition(pd: &ProjectionData, components: &[Vec<MultiPoly>], primes: &[u64]) -> Result<DecompositionVerdict, ProjectionError> {
    let mut failures = Vec::new();
    for (k, comp) in components.iter().enumerate() {
        if comp.iter().all(|g| g.is_zero()) {
            return Err(ProjectionError::EmptyComponent(k));
        }
        if !graded_membership(&pd.f2, comp, 2)? {
            failures.push(format!("f2 not in component {}", k + 1));
        }
        if !graded_membership(&pd.f3, comp, 3)? {
            failures.push(format!("f3 not in component {}", k + 1));
        }
    }
    let field = pd.f2.field();
    let mut checks = Vec::new();
    for &p in primes {
        if p == 2 || p == 3 {
            return Err(SingularityError::BadPrime(p).into());
        }
        let pf = PrimeField::new(field, p)?;
        let check = covering_check(pd, components, &pf)?;
        if !check.agree {
            failures.push(format!("components do not cover C_q over F_{p}"));
        }
        checks.push(check);
    }
    let status = if !failures.is_empty() {
        DecompositionStatus::Refuted
    } else if primes.is_empty() {
        DecompositionStatus::Inconclusive
    } else {
        DecompositionStatus::Verified
    };
    Ok(DecompositionVerdict { status, single_prime_caveat: primes.len() == 1, primes: checks, failures })
}

fn covering_check(pd: &ProjectionData, components: &[Vec<MultiPoly>], pf: &PrimeField) -> Result<PrimeCheck, ProjectionError> {
    let n = pd.f2.nvars();
    let curve = [reduce_poly_mod(&pd.f2, pf)?, reduce_poly_mod(&pd.f3, pf)?];
    let comps: Vec<Vec<ModpPoly>> =
        components.iter().map(|c| c.iter().map(|g| reduce_poly_mod(g, pf)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
    let (mut curve_points, mut union_points, mut agree) = (0, 0, true);
    let mut x = vec![0u64; n];
    for_each_projective_point(n - 1, pf.p, |pt| {
        x[1..].copy_from_slice(pt);
        let on_curve = curve.iter().all(|g| g.eval(&x) == 0);
        let on_union = comps.iter().any(|c| c.iter().all(|g| g.eval(&x) == 0));
        curve_points += on_curve as usize;
        union_points += on_union as usize;
        agree &= on_curve == on_union;
    });
    Ok(PrimeCheck { p: pf.p, curve_points, union_points, agree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::NumberField;
    use std::sync::Arc;

    fn poly(k: &FieldRef, s: &str) -> MultiPoly {
        MultiPoly::parse(k, 5, s).unwrap()
    }

    #[test]
    fn three_d4_split_and_lines() {
        let k = Arc::new(NumberField::cyclotomic(3).unwrap());
        let f = poly(&k, "x1*x2*x3 + x4^3 + x5^3");
        let q = ProjPoint::coordinate(&k, 5, 0);
        let pd = extract_projection(&f, &q, None, 8).unwrap();
        assert_eq!(pd.q_type, AdeType::D(4));
        assert_eq!(pd.f2, poly(&k, "x2*x3"));
        assert_eq!(pd.f3, poly(&k, "x4^3 + x5^3"));
        assert_eq!(qq_rank(&pd.f2), 2);
        let mut comps = Vec::new();
        for a in ["x2", "x3"] {
            for l in ["x4 + x5", "x4 + z*x5", "x4 + z^2*x5"] {
                comps.push(vec![poly(&k, a), poly(&k, l)]);
            }
        }
        let v = verify_decomposition(&pd, &comps, &[7]).unwrap();
        assert_eq!(v.status, DecompositionStatus::Verified);
        assert!(v.single_prime_caveat);
        assert_eq!(defect_from_components(pd.q_type, comps.len()).unwrap(), 4);
        comps.pop();
        let v = verify_decomposition(&pd, &comps, &[7]).unwrap();
        assert_eq!(v.status, DecompositionStatus::Refuted);
        assert_eq!(verify_decomposition(&pd, &comps, &[]).unwrap().status, DecompositionStatus::Inconclusive);
    }

    #[test]
    fn two_a5_quadric_components() {
        let k = Arc::new(NumberField::rational());
        let f = poly(&k, "x1*x2*x3 + x1*x4^2 + x2*x5^2 + x3^3");
        let q = ProjPoint::coordinate(&k, 5, 0);
        let pd = extract_projection(&f, &q, None, 8).unwrap();
        assert_eq!(pd.f2, poly(&k, "x2*x3 + x4^2"));
        assert_eq!(qq_rank(&pd.f2), 3);
        let r1 = vec![poly(&k, "x2*x3 + x4^2"), poly(&k, "x3^2 - x4*x5"), poly(&k, "x3*x4 + x2*x5")];
        let r2 = vec![poly(&k, "x2*x3 + x4^2"), poly(&k, "x3^2 + x4*x5"), poly(&k, "x3*x4 - x2*x5")];
        let v = verify_decomposition(&pd, &[r1, r2], &[7, 11]).unwrap();
        assert_eq!(v.status, DecompositionStatus::Verified, "{:?}", v.failures);
        assert!(!v.single_prime_caveat);
        assert_eq!(defect_from_components(AdeType::A(5), 2).unwrap(), 1);
    }

    #[test]
    fn errors_and_ranks() {
        let k = Arc::new(NumberField::rational());
        let fermat = poly(&k, "x1^3 + x2^3 + x3^3 + x4^3 + x5^3");
        let q = ProjPoint::coordinate(&k, 5, 0);
        assert_eq!(extract_projection(&fermat, &q, None, 8), Err(ProjectionError::HasX1Square));
        let f = poly(&k, "x1*x2*x3 + x4^3 + x5^3");
        let other = ProjPoint::coordinate(&k, 5, 1);
        assert_eq!(extract_projection(&f, &other, None, 8), Err(ProjectionError::NotAtOrigin));
        let pd = extract_projection(&f, &other, Some(&swap_with_first(&k, 5, 1)), 8).unwrap();
        assert_eq!(pd.f2, poly(&k, "x2*x3"));
        let pd2 = extract_projection(&f, &other, Some(&move_to_origin(&other)), 8).unwrap();
        assert_eq!(pd2.q_type, AdeType::D(4));
        assert_eq!(qq_rank(&poly(&k, "x2*x3 + x4*x5")), 4);
        assert_eq!(qq_rank(&poly(&k, "x2*x3 + x4^2")), 3);
        assert_eq!(defect_from_components(AdeType::A(2), 1).unwrap(), 0);
        assert!(matches!(defect_from_components(AdeType::A(1), 3), Err(ProjectionError::FormulaNotApplicable(_))));
    }
}
