//! Dense matrices over a number field and exact Gaussian elimination.

use std::fmt;

use crate::numfield::{AlgebraicNumber, FieldRef};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<AlgebraicNumber>,
}

impl fmt::Debug for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = (0..self.cols).map(|c| self[(r, c)].to_string()).collect();
            write!(f, "{}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for FieldMatrix {
    type Output = AlgebraicNumber;
    fn index(&self, (r, c): (usize, usize)) -> &AlgebraicNumber {
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for FieldMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut AlgebraicNumber {
        &mut self.data[r * self.cols + c]
    }
}

impl FieldMatrix {
    pub fn zeros(field: &FieldRef, rows: usize, cols: usize) -> Self {
        FieldMatrix { rows, cols, data: vec![AlgebraicNumber::zero(field); rows * cols] }
    }

    pub fn identity(field: &FieldRef, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = AlgebraicNumber::one(field);
        }
        m
    }

    pub fn diagonal(entries: &[AlgebraicNumber]) -> Self {
        let field = entries[0].field().clone();
        let mut m = Self::zeros(&field, entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<AlgebraicNumber>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        FieldMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// The matrix `M` with `x*M = (images)`: column `j` holds the linear form
    /// sent to position `j`. Row-vector convention for point maps.
    pub fn from_images(field: &FieldRef, images: &[Vec<AlgebraicNumber>]) -> Self {
        let n = images.len();
        let mut m = Self::zeros(field, n, n);
        for (j, form) in images.iter().enumerate() {
            for (i, c) in form.iter().enumerate() {
                m[(i, j)] = c.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> &FieldRef {
        self.data[0].field()
    }

    pub fn row(&self, r: usize) -> &[AlgebraicNumber] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn entries(&self) -> &[AlgebraicNumber] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<AlgebraicNumber>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self[(r, c)].clone());
            }
        }
        FieldMatrix { rows: self.cols, cols: self.rows, data }
    }

    pub fn scale(&self, s: &AlgebraicNumber) -> Self {
        FieldMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|r| (0..self.cols).all(|c| if r == c { self[(r, c)].is_one() } else { self[(r, c)].is_zero() }))
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[AlgebraicNumber]) -> Vec<AlgebraicNumber> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols)
            .map(|c| {
                let mut acc = AlgebraicNumber::zero(self.field());
                for (r, vr) in v.iter().enumerate() {
                    if !vr.is_zero() && !self[(r, c)].is_zero() {
                        acc += &(vr * &self[(r, c)]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn determinant(&self) -> AlgebraicNumber {
        assert_eq!(self.rows, self.cols);
        let mut m = self.clone();
        let n = self.rows;
        let mut det = AlgebraicNumber::one(self.field());
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !m[(r, k)].is_zero()) else {
                return AlgebraicNumber::zero(self.field());
            };
            if p != k {
                m.swap_rows(p, k);
                det = -det;
            }
            let piv = m[(k, k)].clone();
            det = &det * &piv;
            let inv = piv.inv().unwrap();
            for r in k + 1..n {
                if m[(r, k)].is_zero() {
                    continue;
                }
                let f = &m[(r, k)] * &inv;
                for c in k..n {
                    let t = &f * &m[(k, c)];
                    m[(r, c)] -= &t;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let field = self.field().clone();
        let mut a = self.clone();
        let mut inv = Self::identity(&field, n);
        for k in 0..n {
            let p = (k..n).find(|&r| !a[(r, k)].is_zero())?;
            a.swap_rows(p, k);
            inv.swap_rows(p, k);
            let pinv = a[(k, k)].inv().unwrap();
            for c in 0..n {
                a[(k, c)] = &a[(k, c)] * &pinv;
                inv[(k, c)] = &inv[(k, c)] * &pinv;
            }
            for r in 0..n {
                if r == k || a[(r, k)].is_zero() {
                    continue;
                }
                let f = a[(r, k)].clone();
                for c in 0..n {
                    let t = &f * &a[(k, c)];
                    a[(r, c)] -= &t;
                    let t = &f * &inv[(k, c)];
                    inv[(r, c)] -= &t;
                }
            }
        }
        Some(inv)
    }

    pub fn rank(&self) -> usize {
        let mut span = EchelonSpan::new(self.cols);
        for r in 0..self.rows {
            span.insert(self.row(r).to_vec());
        }
        span.dim()
    }
}

impl std::ops::Mul<&FieldMatrix> for &FieldMatrix {
    type Output = FieldMatrix;
    fn mul(self, rhs: &FieldMatrix) -> FieldMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let field = self.field().clone();
        let mut out = FieldMatrix::zeros(&field, self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = &rhs[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] += &(a * b);
                    }
                }
            }
        }
        out
    }
}

/// Incrementally maintained row-echelon basis of a subspace of `K^n`.
#[derive(Clone, Debug)]
pub struct EchelonSpan {
    n: usize,
    /// Rows normalized so the pivot entry is 1, with their pivot columns.
    basis: Vec<(usize, Vec<AlgebraicNumber>)>,
}

impl EchelonSpan {
    pub fn new(n: usize) -> Self {
        EchelonSpan { n, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// Reduces `v` against the basis and returns the remainder.
    pub fn reduce(&self, mut v: Vec<AlgebraicNumber>) -> Vec<AlgebraicNumber> {
        for (p, row) in &self.basis {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone();
            for (c, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    let t = &f * x;
                    v[c] -= &t;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[AlgebraicNumber]) -> bool {
        self.reduce(v.to_vec()).iter().all(|x| x.is_zero())
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<AlgebraicNumber>) -> bool {
        assert_eq!(v.len(), self.n);
        let r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].inv().unwrap();
        let r: Vec<AlgebraicNumber> = r.iter().map(|x| x * &inv).collect();
        // keep existing rows reduced at the new pivot so reduce() stays single-pass
        for (_, row) in self.basis.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (c, x) in r.iter().enumerate() {
                    if !x.is_zero() {
                        let t = &f * x;
                        row[c] -= &t;
                    }
                }
            }
        }
        self.basis.push((p, r));
        true
    }

    pub fn basis(&self) -> impl Iterator<Item = &Vec<AlgebraicNumber>> {
        self.basis.iter().map(|(_, r)| r)
    }
}

/// Basis of the right kernel `{v : A v = 0}`.
pub fn kernel(a: &FieldMatrix) -> Vec<Vec<AlgebraicNumber>> {
    let field = a.field().clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
        m.swap_rows(p, r);
        let inv = m[(r, c)].inv().unwrap();
        for cc in 0..cols {
            m[(r, cc)] = &m[(r, cc)] * &inv;
        }
        for i in 0..rows {
            if i != r && !m[(i, c)].is_zero() {
                let f = m[(i, c)].clone();
                for cc in 0..cols {
                    let t = &f * &m[(r, cc)];
                    m[(i, cc)] -= &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![AlgebraicNumber::zero(&field); cols];
            v[f] = AlgebraicNumber::one(&field);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[(i, f)];
            }
            v
        })
        .collect()
}
