//! Finite groups of projective linear automorphisms of a hypersurface.
//!
//! Matrices act on points by `p -> p*M`. Projective matrices are stored
//! normalized with the first nonzero entry (row-major) equal to 1, so equal
//! projective transformations compare equal.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::FieldMatrix;
use crate::multipoly::{MultiPoly, PolyError};
use crate::numfield::AlgebraicNumber;
use crate::singularities::ProjPoint;

pub const DEFAULT_CAP: usize = 2000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error("matrix is singular")]
    Singular,
    #[error("polynomial is not mapped to a scalar multiple of itself")]
    NotInvariant,
    #[error("group closure exceeds the cap of {0} elements")]
    ExceedsCap(usize),
    #[error("point set is not stable under the group: {0}")]
    NotStable(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// An invertible matrix up to scalars, in normalized form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ProjMatrix(FieldMatrix);

impl ProjMatrix {
    pub fn new(m: FieldMatrix) -> Result<Self, AutError> {
        if m.rows() != m.cols() || m.determinant().is_zero() {
            return Err(AutError::Singular);
        }
        Ok(Self::normalized(m))
    }

    fn normalized(m: FieldMatrix) -> Self {
        let lead = m.entries().iter().find(|x| !x.is_zero()).expect("zero matrix").clone();
        if lead.is_one() {
            ProjMatrix(m)
        } else {
            ProjMatrix(m.scale(&lead.inv().unwrap()))
        }
    }

    pub fn identity(field: &crate::numfield::FieldRef, n: usize) -> Self {
        ProjMatrix(FieldMatrix::identity(field, n))
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    pub fn mul(&self, other: &ProjMatrix) -> ProjMatrix {
        Self::normalized(&self.0 * &other.0)
    }

    pub fn inverse(&self) -> ProjMatrix {
        Self::normalized(self.0.inverse().expect("invertible"))
    }

    /// Image of a point under `p -> p*M`.
    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        ProjPoint::new(self.0.apply_row(p.coords())).expect("invertible")
    }

    /// Projective order, if at most `limit`.
    pub fn order(&self, limit: usize) -> Option<usize> {
        let mut acc = self.clone();
        for k in 1..=limit {
            if acc.is_identity() {
                return Some(k);
            }
            acc = acc.mul(self);
        }
        None
    }
}

/// The scalar `lambda` with `f(x*M) = lambda * f(x)`.
pub fn invariance_scalar(m: &FieldMatrix, f: &MultiPoly) -> Result<AlgebraicNumber, AutError> {
    let g = f.substitute(m)?;
    let Some((e, c)) = f.leading() else {
        return Err(AutError::NotInvariant);
    };
    let lambda = g.coeff(e).checked_div(c).map_err(|_| AutError::NotInvariant)?;
    if lambda.is_zero() || g != f.scale(&lambda) {
        return Err(AutError::NotInvariant);
    }
    Ok(lambda)
}

/// A finite group of projective matrices with its multiplication table.
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    elements: Vec<ProjMatrix>,
    index: HashMap<ProjMatrix, usize>,
    generators: Vec<ProjMatrix>,
    /// `elements[i] = elements[parent] * generators[gen]`; `None` for the identity.
    words: Vec<Option<(usize, usize)>>,
    /// `right[i][s]` is the index of `elements[i] * generators[s]`.
    right: Vec<Vec<usize>>,
    table: Vec<Vec<usize>>,
}

/// Closes the generators under multiplication, failing once more than `cap`
/// elements have been found.
pub fn group_closure(gens: &[ProjMatrix], cap: usize) -> Result<FiniteMatrixGroup, AutError> {
    let (field, n) = match gens.first() {
        Some(g) => (g.0.field().clone(), g.0.rows()),
        None => (crate::numfield::NumberField::rational(), 1),
    };
    let id = ProjMatrix::identity(&field, n);
    let mut elements = vec![id.clone()];
    let mut index = HashMap::from([(id, 0usize)]);
    let mut words = vec![None];
    let mut right: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let mut row = Vec::with_capacity(gens.len());
        for (s, g) in gens.iter().enumerate() {
            let prod = elements[i].mul(g);
            let j = match index.get(&prod) {
                Some(&j) => j,
                None => {
                    let j = elements.len();
                    if j >= cap {
                        return Err(AutError::ExceedsCap(cap));
                    }
                    index.insert(prod.clone(), j);
                    elements.push(prod);
                    words.push(Some((i, s)));
                    queue.push_back(j);
                    j
                }
            };
            row.push(j);
        }
        right.push(row);
    }
    let order = elements.len();
    // table[i][j] follows the word of j: j = parent * g_s
    let mut table = vec![vec![0usize; order]; order];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
        for j in 1..order {
            let (parent, s) = words[j].unwrap();
            row[j] = right[row[parent]][s];
        }
    }
    Ok(FiniteMatrixGroup { elements, index, generators: gens.to_vec(), words, right, table })
}

impl FiniteMatrixGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ProjMatrix] {
        &self.elements
    }

    pub fn generators(&self) -> &[ProjMatrix] {
        &self.generators
    }

    pub fn index_of(&self, m: &ProjMatrix) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// `table()[i][j]` is the index of the matrix product `elements[i] * elements[j]`.
    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Generator indices whose product, left to right, equals element `i`.
    pub fn word(&self, i: usize) -> Vec<usize> {
        let mut w = Vec::new();
        let mut cur = i;
        while let Some((parent, s)) = self.words[cur] {
            w.push(s);
            cur = parent;
        }
        w.reverse();
        w
    }

    pub fn right_multiplication(&self) -> &[Vec<usize>] {
        &self.right
    }
}

/// Isomorphism invariants of a finite group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureInvariants {
    pub order: usize,
    /// Element order -> number of elements of that order.
    pub element_orders: BTreeMap<usize, usize>,
    pub abelian: bool,
    /// Invariant factors of the abelianization.
    pub abelian_invariants: Vec<u64>,
    pub center_order: usize,
    pub derived_order: usize,
    pub class_count: usize,
}

pub fn structure_invariants(g: &FiniteMatrixGroup) -> StructureInvariants {
    table_invariants(&g.table)
}

/// Invariants computed from a multiplication table whose identity is index 0.
pub fn table_invariants(table: &[Vec<usize>]) -> StructureInvariants {
    let n = table.len();
    let inv: Vec<usize> = (0..n).map(|i| (0..n).find(|&j| table[i][j] == 0).unwrap()).collect();
    let orders: Vec<usize> = (0..n).map(|i| element_order(table, i)).collect();
    let mut element_orders = BTreeMap::new();
    for &o in &orders {
        *element_orders.entry(o).or_insert(0) += 1;
    }
    let abelian = (0..n).all(|i| (0..n).all(|j| table[i][j] == table[j][i]));
    let center_order = (0..n).filter(|&i| (0..n).all(|j| table[i][j] == table[j][i])).count();

    let commutators: Vec<usize> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| table[table[inv[a]][inv[b]]][table[a][b]]).collect();
    let derived = subgroup_closure(table, &commutators);

    let mut seen = vec![false; n];
    let mut class_count = 0;
    for x in 0..n {
        if seen[x] {
            continue;
        }
        class_count += 1;
        for g in 0..n {
            seen[table[table[g][x]][inv[g]]] = true;
        }
    }

    // abelianization: cosets of the derived subgroup
    let mut coset_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for &d in &derived {
            coset_of[table[x][d]] = c;
        }
    }
    let q = reps.len();
    let qtable: Vec<Vec<usize>> = (0..q).map(|a| (0..q).map(|b| coset_of[table[reps[a]][reps[b]]]).collect()).collect();
    let abelian_invariants = abelian_invariants_of(&qtable);

    StructureInvariants { order: n, element_orders, abelian, abelian_invariants, center_order, derived_order: derived.len(), class_count }
}

fn element_order(table: &[Vec<usize>], i: usize) -> usize {
    let mut k = 1;
    let mut acc = i;
    while acc != 0 {
        acc = table[acc][i];
        k += 1;
    }
    k
}

fn subgroup_closure(table: &[Vec<usize>], gens: &[usize]) -> Vec<usize> {
    let gens: Vec<usize> = gens.iter().copied().collect::<HashSet<_>>().into_iter().collect();
    let mut members = vec![0usize];
    let mut seen: HashSet<usize> = HashSet::from([0]);
    let mut k = 0;
    while k < members.len() {
        let x = members[k];
        for &g in &gens {
            let y = table[x][g];
            if seen.insert(y) {
                members.push(y);
            }
        }
        k += 1;
    }
    members.sort_unstable();
    members
}

/// Invariant factors `d_1 | d_2 | ...` of an abelian group given by its table.
fn abelian_invariants_of(table: &[Vec<usize>]) -> Vec<u64> {
    let n = table.len() as u64;
    if n == 1 {
        return Vec::new();
    }
    let orders: Vec<u64> = (0..table.len()).map(|i| element_order(table, i) as u64).collect();
    // for each prime p: number of cyclic factors of order >= p^j is
    // log_p |G[p^j]| - log_p |G[p^(j-1)]|
    let mut primary: Vec<Vec<u64>> = Vec::new();
    let mut m = n;
    let mut p = 2;
    while m > 1 {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            let mut logs = vec![0u32];
            let mut pj = 1u64;
            loop {
                pj *= p;
                let count = orders.iter().filter(|&&o| pj.is_multiple_of(o)).count() as u64;
                let mut l = 0;
                let mut c = count;
                while c > 1 {
                    c /= p;
                    l += 1;
                }
                if l == *logs.last().unwrap() {
                    break;
                }
                logs.push(l);
            }
            // at_least[j] = number of factors of order >= p^j
            let at_least: Vec<u32> = (1..logs.len()).map(|j| logs[j] - logs[j - 1]).collect();
            let mut powers = Vec::new();
            for j in 0..at_least.len() {
                let next = at_least.get(j + 1).copied().unwrap_or(0);
                for _ in 0..(at_least[j] - next) {
                    powers.push(p.pow(j as u32 + 1));
                }
            }
            powers.sort_unstable_by(|a, b| b.cmp(a));
            primary.push(powers);
        }
        p += 1;
    }
    let k = primary.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut factors: Vec<u64> = (0..k).map(|i| primary.iter().map(|v| v.get(i).copied().unwrap_or(1)).product()).collect();
    factors.reverse();
    factors
}

/// A permutation of `0..n`, mapping `i` to `self.0[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(pub Vec<usize>);

impl Perm {
    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycle notation with 1-based labels, `()` for the identity.
    pub fn cycle_string(&self) -> String {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = String::new();
        for s in 0..n {
            if seen[s] || self.0[s] == s {
                continue;
            }
            let mut cyc = vec![s + 1];
            seen[s] = true;
            let mut x = self.0[s];
            while x != s {
                cyc.push(x + 1);
                seen[x] = true;
                x = self.0[x];
            }
            out.push('(');
            out.push_str(&cyc.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "));
            out.push(')');
        }
        if out.is_empty() {
            "()".into()
        } else {
            out
        }
    }
}

/// Permutation of the given points induced by each group element, and the
/// indices of elements acting trivially.
pub fn singular_point_action(g: &FiniteMatrixGroup, pts: &[ProjPoint]) -> Result<(Vec<Perm>, Vec<usize>), AutError> {
    let pos: HashMap<&ProjPoint, usize> = pts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut perms = Vec::with_capacity(g.order());
    for m in &g.elements {
        let mut img = Vec::with_capacity(pts.len());
        for p in pts {
            let q = m.apply(p);
            match pos.get(&q) {
                Some(&j) => img.push(j),
                None => return Err(AutError::NotStable(format!("{p} maps to {q}"))),
            }
        }
        perms.push(Perm(img));
    }
    let kernel = perms.iter().enumerate().filter(|(_, p)| p.is_identity()).map(|(i, _)| i).collect();
    Ok((perms, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::{FieldRef, NumberField};

    fn perm_matrix(k: &FieldRef, images: &[usize], scales: &[AlgebraicNumber]) -> ProjMatrix {
        // x -> (s_0 x_{images[0]}, ...)
        let n = images.len();
        let mut m = FieldMatrix::zeros(k, n, n);
        for (j, (&i, s)) in images.iter().zip(scales).enumerate() {
            m[(i, j)] = s.clone();
        }
        ProjMatrix::new(m).unwrap()
    }

    #[test]
    fn abelian_invariants_examples() {
        let cyclic = |n: usize| (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect::<Vec<Vec<usize>>>();
        assert_eq!(abelian_invariants_of(&cyclic(12)), vec![12]);
        // C2 x C4
        let t: Vec<Vec<usize>> = (0..8).map(|a| (0..8).map(|b| ((a / 4 + b / 4) % 2) * 4 + (a % 4 + b % 4) % 4).collect()).collect();
        assert_eq!(abelian_invariants_of(&t), vec![2, 4]);
        assert_eq!(table_invariants(&t).abelian_invariants, vec![2, 4]);
    }

    #[test]
    fn s3_on_three_d4() {
        let k = NumberField::cyclotomic(3).unwrap();
        let one = AlgebraicNumber::one(&k);
        let ones = vec![one.clone(); 5];
        let s123 = perm_matrix(&k, &[2, 0, 1, 3, 4], &ones);
        let s12 = perm_matrix(&k, &[1, 0, 2, 3, 4], &ones);
        let f = MultiPoly::parse(&k, 5, "x1*x2*x3 + x4^3 + x5^3").unwrap();
        assert!(invariance_scalar(s123.matrix(), &f).unwrap().is_one());
        let g = group_closure(&[s123, s12], DEFAULT_CAP).unwrap();
        let inv = structure_invariants(&g);
        assert_eq!(inv.order, 6);
        assert_eq!(inv.derived_order, 3);
        assert_eq!(inv.class_count, 3);
        assert_eq!(inv.abelian_invariants, vec![2]);
        let pts: Vec<ProjPoint> = (0..3).map(|i| ProjPoint::coordinate(&k, 5, i)).collect();
        let (perms, kernel) = singular_point_action(&g, &pts).unwrap();
        assert_eq!(kernel, vec![0]);
        assert!(perms.iter().any(|p| p.cycle_string() == "(1 2 3)" || p.cycle_string() == "(1 3 2)"));
    }

    #[test]
    fn infinite_order_exceeds_cap() {
        let q = NumberField::rational();
        let d = |x: i64, y: i64| AlgebraicNumber::from_rational(&q, num_rational::BigRational::new(x.into(), y.into()));
        let m = FieldMatrix::diagonal(&[d(2, 1), d(1, 2), d(1, 1), d(1, 1), d(1, 1)]);
        let g = ProjMatrix::new(m).unwrap();
        assert!(matches!(group_closure(&[g], 50), Err(AutError::ExceedsCap(50))));
    }

    #[test]
    fn cycle_strings() {
        assert_eq!(Perm(vec![1, 0, 3, 2]).cycle_string(), "(1 2)(3 4)");
        assert_eq!(Perm(vec![0, 1]).cycle_string(), "()");
    }
}
