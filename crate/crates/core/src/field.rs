//! Prime-field arithmetic and dense matrices over F_q.
//!
//! Entries are stored as `u16` and reduced modulo `q` after every operation, so
//! every `Matrix` value holds entries in `[0, q)`. Products are formed in `u32`,
//! which bounds `q` below 2^16. For `q = 2` the row-combination kernel degrades to
//! XOR; results are identical to the general path.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A field element, always in `[0, q)`.
pub type Elem = u16;

/// The prime field F_q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Field {
    q: u32,
}

impl Field {
    pub fn new(q: u32) -> Result<Field> {
        if q >= 1 << 16 {
            return Err(Error::Parameter(format!(
                "field size q = {q} exceeds the supported maximum 65535"
            )));
        }
        if !is_prime(q) {
            return Err(Error::Parameter(format!("field size q = {q} is not prime")));
        }
        Ok(Field { q })
    }

    #[inline]
    pub fn q(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(self, a: Elem, b: Elem) -> Elem {
        let s = a as u32 + b as u32;
        (if s >= self.q { s - self.q } else { s }) as Elem
    }

    #[inline]
    pub fn sub(self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(self, a: Elem) -> Elem {
        if a == 0 {
            0
        } else {
            (self.q - a as u32) as Elem
        }
    }

    #[inline]
    pub fn mul(self, a: Elem, b: Elem) -> Elem {
        ((a as u32 * b as u32) % self.q) as Elem
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(self, a: Elem) -> Elem {
        assert!(a != 0, "inverse of zero in F_{}", self.q);
        // extended Euclid on (a, q)
        let (mut r0, mut r1) = (self.q as i64, a as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let quot = r0 / r1;
            (r0, r1) = (r1, r0 - quot * r1);
            (t0, t1) = (t1, t0 - quot * t1);
        }
        t0.rem_euclid(self.q as i64) as Elem
    }

    /// Uniformly random element.
    pub fn random<R: Rng + ?Sized>(self, rng: &mut R) -> Elem {
        rng.gen_range(0..self.q) as Elem
    }

    pub fn random_vector<R: Rng + ?Sized>(self, len: usize, rng: &mut R) -> Vec<Elem> {
        (0..len).map(|_| self.random(rng)).collect()
    }

    /// Reduce an arbitrary integer into the field.
    pub fn reduce(self, v: i64) -> Elem {
        v.rem_euclid(self.q as i64) as Elem
    }

    /// `dst += factor * src`, entrywise.
    #[inline]
    pub fn axpy(self, dst: &mut [Elem], factor: Elem, src: &[Elem]) {
        debug_assert_eq!(dst.len(), src.len());
        if factor == 0 {
            return;
        }
        if self.q == 2 {
            for (d, s) in dst.iter_mut().zip(src) {
                *d ^= *s;
            }
        } else if factor == 1 {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = self.add(*d, *s);
            }
        } else {
            let q = self.q;
            let f = factor as u32;
            for (d, s) in dst.iter_mut().zip(src) {
                *d = ((*d as u32 + f * *s as u32) % q) as Elem;
            }
        }
    }

    #[inline]
    pub fn scale(self, v: &mut [Elem], factor: Elem) {
        if factor == 1 {
            return;
        }
        for x in v.iter_mut() {
            *x = self.mul(*x, factor);
        }
    }

    pub fn add_vec(self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn neg_vec(self, a: &[Elem]) -> Vec<Elem> {
        a.iter().map(|&x| self.neg(x)).collect()
    }
}

impl TryFrom<u32> for Field {
    type Error = Error;

    fn try_from(q: u32) -> Result<Field> {
        Field::new(q)
    }
}

impl From<Field> for u32 {
    fn from(f: Field) -> u32 {
        f.q
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense row-major matrix over a prime field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

/// Reduced row echelon form together with rank and pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Solution set `particular + rowspace(kernel)` of a consistent linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Elem>,
    pub kernel: Matrix,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from explicit rows. Entries must already lie in `[0, q)`.
    pub fn from_rows<R: AsRef<[Elem]>>(field: Field, cols: usize, rows: &[R]) -> Result<Matrix> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has length {}, expected {cols}",
                    r.len()
                )));
            }
            if let Some(&bad) = r.iter().find(|&&e| e as u32 >= field.q()) {
                return Err(Error::Domain(format!(
                    "entry {bad} in row {i} is not in [0, {})",
                    field.q()
                )));
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix from a flat row-major buffer whose entries are already reduced.
    pub(crate) fn from_raw(field: Field, rows: usize, cols: usize, data: Vec<Elem>) -> Matrix {
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|&e| (e as u32) < field.q()));
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn random<R: Rng + ?Sized>(field: Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
        Matrix::from_raw(field, rows, cols, field.random_vector(rows * cols, rng))
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Elem {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Elem) {
        assert!((v as u32) < self.field.q());
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Elem] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Elem]> + '_ {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        self.row_iter().map(|r| r.to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    /// Standard product `self · rhs`.
    pub fn mul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.field != rhs.field {
            return Err(Error::Shape(format!(
                "field mismatch: F_{} vs F_{}",
                self.field.q(),
                rhs.field.q()
            )));
        }
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Matrix::zeros(self.field, self.rows, rhs.cols);
        for r in 0..self.rows {
            let (dst_start, dst_end) = (r * rhs.cols, (r + 1) * rhs.cols);
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a != 0 {
                    self.field
                        .axpy(&mut out.data[dst_start..dst_end], a, rhs.row(k));
                }
            }
        }
        Ok(out)
    }

    /// `self · v` for a column vector `v`.
    pub fn mul_vec(&self, v: &[Elem]) -> Result<Vec<Elem>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        let q = self.field.q() as u64;
        Ok(self
            .row_iter()
            .map(|row| {
                let acc: u64 = row
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a as u64 * b as u64)
                    .sum();
                (acc % q) as Elem
            })
            .collect())
    }

    /// Reduced row echelon form. Pivots are the first nonzero entries found
    /// scanning columns left to right and rows top to bottom.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        Rref {
            rank: pivots.len(),
            matrix: m,
            pivots,
        }
    }

    /// Row-reduces in place and returns the pivot columns.
    pub(crate) fn rref_in_place(&mut self) -> Vec<usize> {
        let field = self.field;
        let cols = self.cols;
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = (rank..self.rows).find(|&r| self.data[r * cols + c] != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..cols {
                    self.data.swap(p * cols + k, rank * cols + k);
                }
            }
            let lead = self.data[rank * cols + c];
            if lead != 1 {
                let inv = field.inv(lead);
                field.scale(&mut self.data[rank * cols..(rank + 1) * cols], inv);
            }
            let pivot_row = self.data[rank * cols..(rank + 1) * cols].to_vec();
            for r in 0..self.rows {
                if r == rank {
                    continue;
                }
                let f = self.data[r * cols + c];
                if f != 0 {
                    field.axpy(
                        &mut self.data[r * cols..(r + 1) * cols],
                        field.neg(f),
                        &pivot_row,
                    );
                }
            }
            pivots.push(c);
            rank += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Keeps only the first `n` rows.
    pub(crate) fn truncate_rows(&mut self, n: usize) {
        debug_assert!(n <= self.rows);
        self.rows = n;
        self.data.truncate(n * self.cols);
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.field != other.field || self.cols != other.cols {
            return Err(Error::Shape(format!(
                "cannot stack {}x{} over {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix::from_raw(
            self.field,
            self.rows + other.rows,
            self.cols,
            data,
        ))
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "inverse of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        // Gauss-Jordan on [A | I]
        let mut aug = Matrix::zeros(self.field, n, 2 * n);
        for r in 0..n {
            aug.data[r * 2 * n..r * 2 * n + n].copy_from_slice(self.row(r));
            aug.data[r * 2 * n + n + r] = 1;
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Singular);
        }
        let mut inv = Matrix::zeros(self.field, n, n);
        for r in 0..n {
            inv.data[r * n..(r + 1) * n].copy_from_slice(&aug.data[r * 2 * n + n..(r + 1) * 2 * n]);
        }
        Ok(inv)
    }

    /// Basis (as rows) of the right null space `{x : A·xᵀ = 0}`.
    pub fn kernel_basis(&self) -> Matrix {
        let Rref { matrix: r, pivots, .. } = self.rref();
        kernel_from_rref(&r, &pivots)
    }

    /// Solves `A·x = b`. Returns `None` when the system is inconsistent.
    pub fn solve_affine(&self, b: &[Elem]) -> Result<Option<AffineSolution>> {
        if b.len() != self.rows {
            return Err(Error::Shape(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let n = self.cols;
        let mut aug = Matrix::zeros(self.field, self.rows, n + 1);
        for r in 0..self.rows {
            aug.data[r * (n + 1)..r * (n + 1) + n].copy_from_slice(self.row(r));
            aug.data[r * (n + 1) + n] = b[r];
        }
        let pivots = aug.rref_in_place();
        if pivots.last() == Some(&n) {
            return Ok(None);
        }
        let mut particular = vec![0; n];
        for (i, &p) in pivots.iter().enumerate() {
            particular[p] = aug.get(i, n);
        }
        // the reduced coefficient part is the RREF of A itself
        let mut coeffs = Matrix::zeros(self.field, pivots.len(), n);
        for i in 0..pivots.len() {
            coeffs.data[i * n..(i + 1) * n].copy_from_slice(&aug.data[i * (n + 1)..i * (n + 1) + n]);
        }
        Ok(Some(AffineSolution {
            particular,
            kernel: kernel_from_rref(&coeffs, &pivots),
        }))
    }
}

/// Null-space basis read off an RREF matrix: one row per free column.
pub(crate) fn kernel_from_rref(r: &Matrix, pivots: &[usize]) -> Matrix {
    let n = r.cols;
    let field = r.field;
    let mut is_pivot = vec![false; n];
    for &p in pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
    let mut k = Matrix::zeros(field, free.len(), n);
    for (i, &f) in free.iter().enumerate() {
        k.data[i * n + f] = 1;
        for (row, &p) in pivots.iter().enumerate() {
            k.data[i * n + p] = field.neg(r.get(row, f));
        }
    }
    k
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<F_{}>{:?}", self.field.q(), self.to_rows())
    }
}

/// Uniform element of GL(m, F_q).
///
/// Rows are drawn one at a time, each uniform over the vectors outside the span of
/// the rows already chosen. A candidate is rejected only when its remainder after
/// reduction against that span is zero, which happens with probability at most 1/2.
pub fn random_gl<R: Rng + ?Sized>(field: Field, m: usize, rng: &mut R) -> Matrix {
    assert!(m >= 1, "GL(0) is not supported");
    let mut echelon: Vec<(usize, Vec<Elem>)> = Vec::with_capacity(m);
    let mut out = Vec::with_capacity(m * m);
    while echelon.len() < m {
        let x = field.random_vector(m, rng);
        let mut rem = x.clone();
        for (p, row) in &echelon {
            let f = rem[*p];
            if f != 0 {
                field.axpy(&mut rem, field.neg(f), row);
            }
        }
        let Some(p) = rem.iter().position(|&e| e != 0) else {
            continue;
        };
        let inv = field.inv(rem[p]);
        field.scale(&mut rem, inv);
        for (_, row) in echelon.iter_mut() {
            let f = row[p];
            if f != 0 {
                field.axpy(row, field.neg(f), &rem);
            }
        }
        echelon.push((p, rem));
        out.extend_from_slice(&x);
    }
    Matrix::from_raw(field, m, m, out)
}

/// Uniform `n × n` permutation matrix.
pub fn random_permutation_matrix<R: Rng + ?Sized>(field: Field, n: usize, rng: &mut R) -> Matrix {
    let perm = random_permutation(n, rng);
    let mut p = Matrix::zeros(field, n, n);
    for (r, &c) in perm.iter().enumerate() {
        p.data[r * n + c] = 1;
    }
    p
}

/// Uniform permutation of `0..n` (Fisher-Yates).
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// An element of GL(m, F_q), stored with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlMatrix {
    mat: Matrix,
    inv: Matrix,
}

impl GlMatrix {
    pub fn new(mat: Matrix) -> Result<GlMatrix> {
        let inv = mat.inverse()?;
        Ok(GlMatrix { mat, inv })
    }

    pub fn identity(field: Field, m: usize) -> GlMatrix {
        let id = Matrix::identity(field, m);
        GlMatrix {
            mat: id.clone(),
            inv: id,
        }
    }

    pub fn random<R: Rng + ?Sized>(field: Field, m: usize, rng: &mut R) -> GlMatrix {
        GlMatrix::new(random_gl(field, m, rng)).expect("random_gl produced a singular matrix")
    }

    pub fn matrix(&self) -> &Matrix {
        &self.mat
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inv
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn field(&self) -> Field {
        self.mat.field()
    }

    pub fn apply(&self, v: &[Elem]) -> Vec<Elem> {
        self.mat.mul_vec(v).expect("dimension checked by caller")
    }

    pub fn apply_inverse(&self, v: &[Elem]) -> Vec<Elem> {
        self.inv.mul_vec(v).expect("dimension checked by caller")
    }

    /// The group inverse as a new element.
    pub fn inverted(&self) -> GlMatrix {
        GlMatrix {
            mat: self.inv.clone(),
            inv: self.mat.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(q: u32) -> Field {
        Field::new(q).unwrap()
    }

    fn mat(q: u32, rows: &[&[Elem]]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        Matrix::from_rows(f(q), cols, rows).unwrap()
    }

    #[test]
    fn field_rejects_composites() {
        assert!(Field::new(4).is_err());
        assert!(Field::new(1).is_err());
        assert!(Field::new(0).is_err());
        assert!(Field::new(2).is_ok());
        assert!(Field::new(65521).is_ok());
        assert!(Field::new(65537).is_err());
    }

    #[test]
    fn field_inverse_table() {
        for q in [2, 3, 5, 7, 11, 13, 251] {
            let fq = f(q);
            for a in 1..q as Elem {
                assert_eq!(fq.mul(a, fq.inv(a)), 1, "q={q} a={a}");
            }
        }
    }

    #[test]
    fn rref_duplicate_rows() {
        let r = mat(2, &[&[1, 1], &[1, 1]]).rref();
        assert_eq!(r.matrix, mat(2, &[&[1, 1], &[0, 0]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn rref_identity() {
        let id = Matrix::identity(f(3), 3);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivots, vec![0, 1, 2]);
    }

    #[test]
    fn rref_mod3_dependent() {
        let r = mat(3, &[&[2, 1], &[1, 2]]).rref();
        assert_eq!(r.matrix, mat(3, &[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn mul_examples() {
        let a = mat(2, &[&[1, 1], &[0, 1]]);
        let b = mat(2, &[&[1], &[1]]);
        assert_eq!(a.mul(&b).unwrap(), mat(2, &[&[0], &[1]]));
        let x = mat(5, &[&[1, 2, 3], &[4, 0, 1]]);
        assert_eq!(Matrix::identity(f(5), 2).mul(&x).unwrap(), x);
        assert!(Matrix::zeros(f(5), 3, 2).mul(&x).unwrap().is_zero());
        assert!(matches!(x.mul(&x), Err(Error::Shape(_))));
    }

    #[test]
    fn inverse_examples() {
        let id = Matrix::identity(f(2), 4);
        assert_eq!(id.inverse().unwrap(), id);
        let swap = mat(2, &[&[0, 1], &[1, 0]]);
        assert_eq!(swap.inverse().unwrap(), swap);
        let a = mat(2, &[&[1, 1], &[1, 0]]);
        let inv = a.inverse().unwrap();
        assert_eq!(inv, mat(2, &[&[0, 1], &[1, 1]]));
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(f(2), 2));
        assert!(matches!(
            mat(3, &[&[1, 2], &[2, 1]]).inverse(),
            Err(Error::Singular)
        ));
        assert!(matches!(
            mat(2, &[&[1, 1, 0]]).inverse(),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Matrix::identity(f(3), 3).kernel_basis().rows(), 0);
        let k = Matrix::zeros(f(2), 2, 3).kernel_basis();
        assert_eq!(k.rows(), 3);
        assert_eq!(k.rank(), 3);

        // {x in F_2^3 : x0 + x1 = 0} = {000, 110, 001, 111}
        let a = mat(2, &[&[1, 1, 0]]);
        let k = a.kernel_basis();
        assert_eq!(k.rows(), 2);
        let mut span = std::collections::BTreeSet::new();
        for c0 in 0..2 {
            for c1 in 0..2 {
                let v: Vec<Elem> = (0..3)
                    .map(|j| ((c0 * k.get(0, j) + c1 * k.get(1, j)) % 2) as Elem)
                    .collect();
                span.insert(v);
            }
        }
        let expected: std::collections::BTreeSet<Vec<Elem>> =
            [vec![0, 0, 0], vec![1, 1, 0], vec![0, 0, 1], vec![1, 1, 1]]
                .into_iter()
                .collect();
        assert_eq!(span, expected);
    }

    #[test]
    fn solve_affine_examples() {
        let fq = f(5);
        let b = vec![3, 1, 4];
        let sol = Matrix::identity(fq, 3).solve_affine(&b).unwrap().unwrap();
        assert_eq!(sol.particular, b);
        assert_eq!(sol.kernel.rows(), 0);

        assert!(Matrix::zeros(fq, 2, 2).solve_affine(&[0, 1]).unwrap().is_none());

        let a = mat(2, &[&[1, 1]]);
        let sol = a.solve_affine(&[1]).unwrap().unwrap();
        assert!(sol.particular == vec![1, 0] || sol.particular == vec![0, 1]);
        assert_eq!(sol.kernel, mat(2, &[&[1, 1]]));

        assert!(matches!(a.solve_affine(&[1, 0]), Err(Error::Shape(_))));
    }

    #[test]
    fn random_gl_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(random_gl(f(2), 1, &mut rng), Matrix::identity(f(2), 1));
        }
        for q in [2, 3, 7] {
            for m in 1..6 {
                let g = random_gl(f(q), m, &mut rng);
                assert!(g.inverse().is_ok());
            }
        }
    }

    #[test]
    fn permutation_matrix_rows_and_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(
            random_permutation_matrix(f(2), 1, &mut rng),
            Matrix::identity(f(2), 1)
        );
        let p = random_permutation_matrix(f(3), 9, &mut rng);
        for i in 0..9 {
            assert_eq!((0..9).map(|j| p.get(i, j) as u32).sum::<u32>(), 1);
            assert_eq!((0..9).map(|j| p.get(j, i) as u32).sum::<u32>(), 1);
        }
        let mut swaps = 0;
        let n = 10_000;
        for _ in 0..n {
            if random_permutation_matrix(f(2), 2, &mut rng).get(0, 0) == 0 {
                swaps += 1;
            }
        }
        // binomial(1e4, 1/2): sd = 50
        assert!((swaps as i64 - 5000).abs() < 250, "swaps = {swaps}");
    }

    #[test]
    fn gl_matrix_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = GlMatrix::random(f(3), 4, &mut rng);
        let v = vec![1, 2, 0, 1];
        assert_eq!(g.apply_inverse(&g.apply(&v)), v);
        assert!(GlMatrix::new(Matrix::zeros(f(3), 2, 2)).is_err());
    }
}
