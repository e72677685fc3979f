//! Independent oracles and property checks shared by the property suites and
//! the acceptance harness.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use cubicsing::autgroups::StructureInvariants;
use cubicsing::glattice::{h1, h1_bar, h1_cyclic, h2_bar, h2_cyclic, permutation_module, smith_normal_form, FinGroup, GLattice, IntMatrix, Mat};
use cubicsing::multipoly::{graded_membership, monomials_of_degree, Exponent, MultiPoly};
use cubicsing::numfield::{FieldRef, NumberField};
use cubicsing::singularities::AdeType;

// ---------------------------------------------------------------------------
// Permutation groups

pub type Perm = Vec<usize>;

/// `a` after `b`.
pub fn compose(a: &Perm, b: &Perm) -> Perm {
    b.iter().map(|&i| a[i]).collect()
}

pub fn perm_inverse(a: &Perm) -> Perm {
    let mut out = vec![0; a.len()];
    for (i, &j) in a.iter().enumerate() {
        out[j] = i;
    }
    out
}

/// All elements of the generated group, identity first.
pub fn perm_closure(gens: &[Perm], n: usize) -> Vec<Perm> {
    let id: Perm = (0..n).collect();
    let mut seen: BTreeSet<Perm> = BTreeSet::from([id.clone()]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        for g in gens {
            let h = compose(g, &out[i]);
            if seen.insert(h.clone()) {
                out.push(h);
            }
        }
        i += 1;
    }
    out
}

/// Multiplication table with `table[a][b] = index(a∘b)`.
pub fn perm_table(elems: &[Perm]) -> Vec<Vec<usize>> {
    let idx: HashMap<&Perm, usize> = elems.iter().enumerate().map(|(i, p)| (p, i)).collect();
    elems.iter().map(|a| elems.iter().map(|b| idx[&compose(a, b)]).collect()).collect()
}

/// Invariant factors of a finite abelian group of the given order, from the
/// number of elements killed by each `p^k`.
fn abelian_invariants(order: usize, pow_is_identity: impl Fn(usize, u64) -> usize) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut m = order;
    let mut p = 2;
    while m > 1 {
        if m.is_multiple_of(p) {
            primes.push(p as u64);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        p += 1;
    }
    let mut parts: Vec<(u64, Vec<u32>)> = Vec::new();
    for &p in &primes {
        let mut counts = vec![0u32];
        let mut k = 1u32;
        loop {
            let c = pow_is_identity(order, p.pow(k));
            let e = (c as f64).log(p as f64).round() as u32;
            counts.push(e);
            if counts[k as usize] == counts[k as usize - 1] {
                break;
            }
            k += 1;
        }
        // number of cyclic factors of order >= p^k is counts[k] - counts[k-1]
        let at_least: Vec<u32> = (1..counts.len()).map(|k| counts[k] - counts[k - 1]).collect();
        let mut exps = Vec::new();
        let factors = at_least.first().copied().unwrap_or(0);
        for f in 0..factors {
            exps.push(at_least.iter().filter(|&&c| c > f).count() as u32);
        }
        parts.push((p, exps));
    }
    let len = parts.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut out: Vec<u64> = (0..len).map(|i| parts.iter().map(|(p, e)| e.get(i).map_or(1, |&x| p.pow(x))).product()).collect();
    out.sort();
    out
}

/// Structure invariants of a permutation group, computed by brute force.
pub fn oracle_invariants(gens: &[Perm], n: usize) -> StructureInvariants {
    let elems = perm_closure(gens, n);
    let order = elems.len();
    let id: Perm = (0..n).collect();
    let elem_order = |g: &Perm| {
        let mut k = 1;
        let mut x = g.clone();
        while x != id {
            x = compose(g, &x);
            k += 1;
        }
        k
    };
    let mut element_orders = BTreeMap::new();
    for g in &elems {
        *element_orders.entry(elem_order(g)).or_insert(0) += 1;
    }
    let commutes = |a: &Perm, b: &Perm| compose(a, b) == compose(b, a);
    let abelian = elems.iter().all(|a| elems.iter().all(|b| commutes(a, b)));
    let center_order = elems.iter().filter(|a| elems.iter().all(|b| commutes(a, b))).count();
    let commutators: Vec<Perm> = elems
        .iter()
        .flat_map(|a| elems.iter().map(move |b| compose(&perm_inverse(a), &compose(&perm_inverse(b), &compose(a, b)))))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let derived = perm_closure(&commutators, n);
    let derived_order = derived.len();
    let mut class_of: HashMap<Perm, usize> = HashMap::new();
    let mut class_count = 0;
    for g in &elems {
        if class_of.contains_key(g) {
            continue;
        }
        for h in &elems {
            class_of.insert(compose(h, &compose(g, &perm_inverse(h))), class_count);
        }
        class_count += 1;
    }
    // G/G' through coset representatives
    let derived_set: BTreeSet<Perm> = derived.iter().cloned().collect();
    let coset_key = |g: &Perm| -> Perm { derived_set.iter().map(|d| compose(g, d)).min().unwrap() };
    let quotient: Vec<Perm> = elems.iter().map(coset_key).collect::<BTreeSet<_>>().into_iter().collect();
    let q_order = quotient.len();
    let abelian_invariants = abelian_invariants(q_order, |_, e| {
        quotient
            .iter()
            .filter(|g| {
                let mut x = id.clone();
                for _ in 0..e {
                    x = compose(g, &x);
                }
                derived_set.contains(&x)
            })
            .count()
    });
    StructureInvariants { order, element_orders, abelian, abelian_invariants, center_order, derived_order, class_count }
}

/// Cycle of the given points, as a permutation of `0..n`.
pub fn cycle(n: usize, pts: &[usize]) -> Perm {
    let mut p: Perm = (0..n).collect();
    for (k, &i) in pts.iter().enumerate() {
        p[i] = pts[(k + 1) % pts.len()];
    }
    p
}

/// Permutation of `0..n` acting on disjoint blocks: `parts[i]` acts on the
/// `i`-th block of `sizes[i]` points.
pub fn direct_product(parts: &[(usize, Perm)]) -> Perm {
    let mut out = Vec::new();
    let mut base = 0;
    for (size, p) in parts {
        out.extend(p.iter().map(|&x| x + base));
        base += size;
    }
    out
}

// ---------------------------------------------------------------------------
// Linear algebra over Q

pub fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &pivot;
                let prow = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(&prow) {
                    *x -= y * &f;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Whether `g` lies in the degree-`d` part of the ideal, by spanning the
/// products of generators with all monomials of complementary degree.
pub fn membership_oracle(g: &MultiPoly, gens: &[MultiPoly], d: u32) -> bool {
    let n = g.nvars();
    let monos = monomials_of_degree(n, d);
    let vec_of = |p: &MultiPoly| -> Vec<BigRational> { monos.iter().map(|m| p.coeff(m).coeffs()[0].clone()).collect() };
    let mut rows = Vec::new();
    for h in gens {
        let Some(dh) = h.total_degree() else { continue };
        if dh > d {
            continue;
        }
        for m in monomials_of_degree(n, d - dh) {
            let mono = MultiPoly::monomial(cubicsing::numfield::AlgebraicNumber::one(g.field()), m);
            rows.push(vec_of(&(&mono * h)));
        }
    }
    let r0 = rational_rank(rows.clone());
    rows.push(vec_of(g));
    rational_rank(rows) == r0
}

// ---------------------------------------------------------------------------
// Dynkin diagrams

/// Adjacency lists of the Dynkin diagram of a configuration.
pub fn dynkin(types: &[AdeType]) -> Vec<Vec<bool>> {
    let mut edges = Vec::new();
    let mut n = 0;
    for t in types {
        match *t {
            AdeType::A(k) => {
                for i in 1..k as usize {
                    edges.push((n + i - 1, n + i));
                }
                n += k as usize;
            }
            AdeType::D(k) => {
                // path 0..k-2 plus a leaf attached to vertex 1
                for i in 1..k as usize - 1 {
                    edges.push((n + i - 1, n + i));
                }
                edges.push((n + 1, n + k as usize - 1));
                n += k as usize;
            }
            AdeType::E(k) => {
                for i in 1..k as usize - 1 {
                    edges.push((n + i - 1, n + i));
                }
                edges.push((n + 2, n + k as usize - 1));
                n += k as usize;
            }
        }
    }
    let mut adj = vec![vec![false; n]; n];
    for (a, b) in edges {
        adj[a][b] = true;
        adj[b][a] = true;
    }
    adj
}

/// Whether `pat` is an induced subgraph of `host`, by exhaustive search over
/// injective vertex maps.
pub fn induced_subgraph_oracle(pat: &[Vec<bool>], host: &[Vec<bool>]) -> bool {
    fn go(k: usize, pat: &[Vec<bool>], host: &[Vec<bool>], map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        if k == pat.len() {
            return true;
        }
        for v in 0..host.len() {
            if used[v] {
                continue;
            }
            if (0..k).all(|j| pat[k][j] == host[v][map[j]]) {
                used[v] = true;
                map.push(v);
                if go(k + 1, pat, host, map, used) {
                    return true;
                }
                map.pop();
                used[v] = false;
            }
        }
        false
    }
    if pat.len() > host.len() {
        return false;
    }
    go(0, pat, host, &mut Vec::new(), &mut vec![false; host.len()])
}

// ---------------------------------------------------------------------------
// Random data

/// Elementary row operations `row_i += c * row_j`.
pub type ElemOps = Vec<(usize, usize, i64)>;

pub fn elem_ops(n: usize, len: usize) -> impl Strategy<Value = ElemOps> {
    proptest::collection::vec((0..n.max(1), 0..n.max(1), -2i64..=2), 0..=len).prop_map(|v| v.into_iter().filter(|(i, j, _)| i != j).collect())
}

/// Unimodular matrix and its inverse from elementary operations.
pub fn unimodular(n: usize, ops: &ElemOps) -> (Mat<i64>, Mat<i64>) {
    let mut u = Mat::<i64>::identity(n);
    let mut inv = Mat::<i64>::identity(n);
    for &(i, j, c) in ops {
        if i >= n || j >= n {
            continue;
        }
        let e = Mat::from_fn(n, n, |r, s| i64::from(r == s) + if r == i && s == j { c } else { 0 });
        let einv = Mat::from_fn(n, n, |r, s| i64::from(r == s) - if r == i && s == j { c } else { 0 });
        u = e.mul(&u);
        inv = inv.mul(&einv);
    }
    (u, inv)
}

/// Building blocks of a finite-order integral matrix.
#[derive(Clone, Debug)]
pub enum Block {
    Trivial,
    Sign,
    Cycle(usize),
    /// Companion matrix of the `k`-th cyclotomic polynomial, `k` in 3, 4, 6.
    Rotation(usize),
}

impl Block {
    fn size(&self) -> usize {
        match self {
            Block::Trivial | Block::Sign => 1,
            Block::Cycle(l) => *l,
            Block::Rotation(_) => 2,
        }
    }

    fn order(&self) -> usize {
        match self {
            Block::Trivial => 1,
            Block::Sign => 2,
            Block::Cycle(l) => *l,
            Block::Rotation(k) => *k,
        }
    }

    fn matrix(&self) -> Vec<Vec<i64>> {
        match self {
            Block::Trivial => vec![vec![1]],
            Block::Sign => vec![vec![-1]],
            Block::Cycle(l) => (0..*l).map(|r| (0..*l).map(|c| i64::from((c + 1) % l == r)).collect()).collect(),
            Block::Rotation(3) => vec![vec![0, -1], vec![1, -1]],
            Block::Rotation(4) => vec![vec![0, -1], vec![1, 0]],
            Block::Rotation(6) => vec![vec![0, -1], vec![1, 1]],
            Block::Rotation(_) => unreachable!(),
        }
    }
}

/// Matrix of order dividing `m` built from blocks whose order divides `m`,
/// with total rank at most `max_rank`.
pub fn block_matrix(m: usize, choices: &[u8], max_rank: usize) -> Mat<i64> {
    let mut blocks = Vec::new();
    let mut rank = 0;
    for &c in choices {
        let b = match c % 8 {
            0 => Block::Trivial,
            1 => Block::Sign,
            2 => Block::Cycle(2),
            3 => Block::Cycle(3),
            4 => Block::Cycle(m.min(6)),
            5 => Block::Rotation(3),
            6 => Block::Rotation(4),
            _ => Block::Rotation(6),
        };
        let b = if m.is_multiple_of(b.order()) { b } else { Block::Trivial };
        if rank + b.size() > max_rank {
            break;
        }
        rank += b.size();
        blocks.push(b);
    }
    if blocks.is_empty() {
        blocks.push(Block::Trivial);
        rank = 1;
    }
    let mut out = Mat::<i64>::zeros(rank, rank);
    let mut base = 0;
    for b in &blocks {
        let bm = b.matrix();
        for (r, row) in bm.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                out[(base + r, base + c)] = x;
            }
        }
        base += b.size();
    }
    out
}

/// A lattice for the cyclic group of order `m` whose generator acts by a
/// conjugated block matrix.
pub fn cyclic_lattice(m: usize, choices: &[u8], ops: &ElemOps) -> GLattice {
    let a = block_matrix(m, choices, 6);
    let n = a.rows();
    let (u, uinv) = unimodular(n, ops);
    let conj = u.mul(&a).mul(&uinv);
    let gen = usize::from(m > 1);
    GLattice::from_generators(FinGroup::cyclic(m), &[(gen, conj)]).expect("finite order action")
}

pub fn lattice_strategy() -> impl Strategy<Value = (usize, Vec<u8>, ElemOps)> {
    (1usize..=12, proptest::collection::vec(any::<u8>(), 1..6), elem_ops(6, 8))
}

pub fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| proptest::collection::vec(proptest::collection::vec(-20i64..=20, c), r))
}

/// Random subgroup of `S_4` or `S_5` (order at most 24) given by generators.
pub fn perm_group_strategy() -> impl Strategy<Value = (usize, Vec<Perm>)> {
    (4usize..=5)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), 1..3)))
        .prop_filter("order at most 24", |(n, g)| perm_closure(g, *n).len() <= 24)
}

// ---------------------------------------------------------------------------
// Property checks

pub fn check_snf(rows: &[Vec<i64>]) -> Result<(), String> {
    let a = IntMatrix::from_i64(rows);
    let s = smith_normal_form(&a);
    let uav = s.u.mul(&a).mul(&s.v);
    if uav != s.d {
        return Err("U*A*V != D".into());
    }
    for (name, m) in [("U", &s.u), ("V", &s.v)] {
        let det = m.to_i64().ok_or("entries overflow")?.determinant();
        if !det.abs().is_one() {
            return Err(format!("{name} is not unimodular (det {det})"));
        }
    }
    if s.v.mul(&s.v_inv) != IntMatrix::from_i64(&Mat::<i64>::identity(s.v.rows()).to_rows()) {
        return Err("V * V^-1 != I".into());
    }
    let diag = s.diagonal();
    for r in 0..s.d.rows() {
        for c in 0..s.d.cols() {
            if r != c && !s.d[(r, c)].is_zero() {
                return Err("off-diagonal entry".into());
            }
        }
    }
    for (i, d) in diag.iter().enumerate() {
        if (i < s.rank) != d.is_positive() {
            return Err(format!("diagonal entry {i} = {d} inconsistent with rank {}", s.rank));
        }
    }
    for w in diag[..s.rank].windows(2) {
        if !(&w[1] % &w[0]).is_zero() {
            return Err(format!("{} does not divide {}", w[0], w[1]));
        }
    }
    let q_rows = rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    if rational_rank(q_rows) != s.rank {
        return Err("rank differs from the rational rank".into());
    }
    Ok(())
}

pub fn check_bar_vs_cyclic(m: usize, choices: &[u8], ops: &ElemOps) -> Result<(), String> {
    let l = cyclic_lattice(m, choices, ops);
    let gen = usize::from(m > 1);
    let e = |x: cubicsing::glattice::LatticeError| x.to_string();
    let (b1, c1) = (h1_bar(&l).map_err(e)?, h1_cyclic(&l, gen).map_err(e)?);
    let (b2, c2) = (h2_bar(&l).map_err(e)?, h2_cyclic(&l, gen).map_err(e)?);
    if b1 != c1 || b2 != c2 {
        return Err(format!("order {m}: bar H1 {b1} H2 {b2}, cyclic H1 {c1} H2 {c2}"));
    }
    Ok(())
}

pub fn check_permutation_h1(n: usize, gens: &[Perm]) -> Result<(), String> {
    let elems = perm_closure(gens, n);
    let group = FinGroup::from_table(perm_table(&elems)).map_err(|e| e.to_string())?;
    let mut modules = vec![("natural", permutation_module(group.clone(), &elems).map_err(|e| e.to_string())?)];
    // the bar complex of the regular module grows like |G|^3
    if elems.len() <= 8 {
        modules.push(("regular", permutation_module(group, &perm_table(&elems)).map_err(|e| e.to_string())?));
    }
    for (name, m) in modules {
        let g = h1(&m).map_err(|e| e.to_string())?;
        if !g.is_trivial() {
            return Err(format!("H1 of the {name} permutation module of a group of order {} is {g}", elems.len()));
        }
    }
    Ok(())
}

pub fn check_euler(field: &FieldRef, terms: &[(Vec<u16>, i64)]) -> Result<(), String> {
    let f = homogeneous(field, terms);
    let Some(d) = f.total_degree() else { return Ok(()) };
    let mut lhs = MultiPoly::zero(field, f.nvars());
    for i in 0..f.nvars() {
        lhs = &lhs + &(&MultiPoly::var(field, f.nvars(), i) * &f.partial(i));
    }
    let rhs = f.scale(&cubicsing::numfield::AlgebraicNumber::from_int(field, d as i64));
    if lhs != rhs {
        return Err(format!("sum x_i df/dx_i != {d} f for f = {f}"));
    }
    Ok(())
}

/// Degree-3 polynomial in 5 variables from exponent seeds; exponents are
/// reduced to total degree 3.
pub fn homogeneous(field: &FieldRef, terms: &[(Vec<u16>, i64)]) -> MultiPoly {
    let monos = monomials_of_degree(5, 3);
    MultiPoly::from_terms(
        field,
        5,
        terms.iter().map(|(e, c)| {
            let k = e.iter().map(|&x| x as usize).sum::<usize>() % monos.len();
            (monos[k].clone(), cubicsing::numfield::AlgebraicNumber::from_int(field, *c))
        }),
    )
}

pub fn poly_terms() -> impl Strategy<Value = Vec<(Vec<u16>, i64)>> {
    proptest::collection::vec((proptest::collection::vec(0u16..40, 5), -5i64..=5), 1..8)
}

/// Membership of a random form against random generators, compared with the
/// linear-algebra oracle; also checks that explicit combinations are members.
pub fn check_membership(gen_seeds: &[(Vec<u16>, i64)], mult_seeds: &[(usize, i64)], g_seed: &[(usize, i64)], d: u32) -> Result<(), String> {
    let q = NumberField::rational();
    let n = 4;
    let lin = monomials_of_degree(n, 1);
    let quad = monomials_of_degree(n, 2);
    // generators: a linear form and a quadric
    let mut l = MultiPoly::zero(&q, n);
    let mut qd = MultiPoly::zero(&q, n);
    for (e, c) in gen_seeds {
        let k = e.iter().map(|&x| x as usize).sum::<usize>();
        l.add_term(lin[k % lin.len()].clone(), cubicsing::numfield::AlgebraicNumber::from_int(&q, *c));
        qd.add_term(quad[(k * 7 + 3) % quad.len()].clone(), cubicsing::numfield::AlgebraicNumber::from_int(&q, *c + 1));
    }
    let gens: Vec<MultiPoly> = [l, qd].into_iter().filter(|p| !p.is_zero()).collect();
    if gens.is_empty() {
        return Ok(());
    }
    let dmonos = monomials_of_degree(n, d);
    let g = MultiPoly::from_terms(
        &q,
        n,
        g_seed.iter().map(|(k, c)| (dmonos[k % dmonos.len()].clone(), cubicsing::numfield::AlgebraicNumber::from_int(&q, *c))),
    );
    let got = graded_membership(&g, &gens, d).map_err(|e| e.to_string())?;
    let want = membership_oracle(&g, &gens, d);
    if got != want {
        return Err(format!("membership of {g} in {gens:?} at degree {d}: got {got}, oracle {want}"));
    }
    // an explicit combination is a member
    let mut comb = MultiPoly::zero(&q, n);
    for (i, h) in gens.iter().enumerate() {
        let dh = h.total_degree().unwrap();
        if dh > d {
            continue;
        }
        let ms = monomials_of_degree(n, d - dh);
        for (k, c) in mult_seeds.iter().skip(i).step_by(2) {
            let m = MultiPoly::monomial(cubicsing::numfield::AlgebraicNumber::from_int(&q, *c), ms[k % ms.len()].clone());
            comb = &comb + &(&m * h);
        }
    }
    if !graded_membership(&comb, &gens, d).map_err(|e| e.to_string())? {
        return Err(format!("combination {comb} not recognised as a member"));
    }
    Ok(())
}

/// Generator seeds, multiplier seeds, target seeds and degree.
pub type MembershipCase = (Vec<(Vec<u16>, i64)>, Vec<(usize, i64)>, Vec<(usize, i64)>, u32);

pub fn membership_strategy() -> impl Strategy<Value = MembershipCase> {
    (
        proptest::collection::vec((proptest::collection::vec(0u16..10, 4), -3i64..=3), 1..4),
        proptest::collection::vec((0usize..100, -3i64..=3), 0..6),
        proptest::collection::vec((0usize..100, -3i64..=3), 0..6),
        2u32..=3,
    )
}

pub fn exponent(v: &[u16]) -> Exponent {
    Exponent(v.to_vec())
}

// ---------------------------------------------------------------------------
// Permutation models of the groups named in the bundled scenarios

fn cyc(n: usize) -> (usize, Perm) {
    (n, cycle(n, &(0..n).collect::<Vec<_>>()))
}

fn id(n: usize) -> (usize, Perm) {
    (n, (0..n).collect())
}

/// Generators of the product of the given factors, acting on disjoint blocks.
fn product(factors: &[Vec<(usize, Perm)>]) -> (usize, Vec<Perm>) {
    let sizes: Vec<usize> = factors.iter().map(|f| f[0].0).collect();
    let mut gens = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        for (_, g) in f {
            let parts: Vec<(usize, Perm)> = sizes.iter().enumerate().map(|(j, &s)| if i == j { (s, g.clone()) } else { id(s) }).collect();
            gens.push(direct_product(&parts));
        }
    }
    (sizes.iter().sum(), gens)
}

fn sym(n: usize) -> Vec<(usize, Perm)> {
    vec![cyc(n), (n, cycle(n, &[0, 1]))]
}

/// Permutation model of a group given by a scenario name such as `C3 x S3`.
pub fn group_model(name: &str) -> Option<(usize, Vec<Perm>)> {
    let factor = |s: &str| -> Option<Vec<(usize, Perm)>> {
        match s {
            "S3" => Some(sym(3)),
            "S4" => Some(sym(4)),
            "A5" => Some(vec![cyc(5), (5, cycle(5, &[0, 1, 2]))]),
            "D4" => Some(vec![cyc(4), (4, cycle(4, &[0, 2]))]),
            "C2^2" => Some(vec![(4, cycle(4, &[0, 1])), (4, cycle(4, &[2, 3]))]),
            _ => s.strip_prefix('C')?.parse().ok().map(|n| vec![cyc(n)]),
        }
    };
    let factors = name.split(" x ").map(factor).collect::<Option<Vec<_>>>()?;
    Some(product(&factors))
}

/// Permutation matrix of `p` over the rationals, as a projective matrix.
pub fn perm_matrix(p: &Perm) -> cubicsing::autgroups::ProjMatrix {
    let q = NumberField::rational();
    let n = p.len();
    let rows = (0..n).map(|r| (0..n).map(|c| cubicsing::numfield::AlgebraicNumber::from_int(&q, i64::from(p[r] == c))).collect()).collect();
    cubicsing::autgroups::ProjMatrix::new(cubicsing::linalg::FieldMatrix::from_rows(rows)).expect("invertible")
}
