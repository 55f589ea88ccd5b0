//! Linear and affine subspaces of F_q^m in canonical form.
//!
//! A [`Subspace`] keeps its basis in reduced row echelon form without zero rows, so
//! two subspaces are equal exactly when their bases are entry-identical. An
//! [`AffineSubspace`] additionally keeps its offset reduced against that basis
//! (zero at every pivot column), giving the same property for cosets.

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{kernel_from_rref, Elem, Field, GlMatrix, Matrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// The zero subspace `{0}` of F_q^m.
    pub fn zero(field: Field, m: usize) -> Subspace {
        Subspace {
            basis: Matrix::zeros(field, 0, m),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: Field, m: usize) -> Subspace {
        Subspace {
            basis: Matrix::identity(field, m),
            pivots: (0..m).collect(),
        }
    }

    /// Span of `vectors`, each of length `m`.
    pub fn from_generators<V: AsRef<[Elem]>>(field: Field, m: usize, vectors: &[V]) -> Result<Subspace> {
        let mat = Matrix::from_rows(field, m, vectors)?;
        Ok(Subspace::row_space(mat))
    }

    /// Row space of `mat`.
    pub fn row_space(mut mat: Matrix) -> Subspace {
        let pivots = mat.rref_in_place();
        mat.truncate_rows(pivots.len());
        Subspace { basis: mat, pivots }
    }

    /// Uniformly random subspace of dimension `d`.
    ///
    /// Draws `d × m` matrices with independent uniform entries until one has full
    /// row rank. Every `d`-dimensional subspace is the row space of exactly
    /// |GL(d, q)| such matrices, so the result is uniform on the Grassmannian.
    pub fn random<R: Rng + ?Sized>(field: Field, m: usize, d: usize, rng: &mut R) -> Result<Subspace> {
        if d > m {
            return Err(Error::Domain(format!(
                "subspace dimension {d} exceeds ambient dimension {m}"
            )));
        }
        loop {
            let s = Subspace::row_space(Matrix::random(field, d, m, rng));
            if s.dim() == d {
                return Ok(s);
            }
        }
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.basis.field()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.basis.cols()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.field() != other.field() || self.ambient_dim() != other.ambient_dim() {
            return Err(Error::Shape(format!(
                "subspaces of F_{}^{} and F_{}^{}",
                self.field().q(),
                self.ambient_dim(),
                other.field().q(),
                other.ambient_dim()
            )));
        }
        Ok(())
    }

    fn check_vector(&self, x: &[Elem]) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::Shape(format!(
                "vector of length {} in ambient dimension {}",
                x.len(),
                self.ambient_dim()
            )));
        }
        Ok(())
    }

    /// Subtracts basis rows so that `x` is zero at every pivot column. The result is
    /// zero iff the original `x` was in the subspace.
    pub fn reduce(&self, x: &mut [Elem]) {
        let field = self.field();
        for (i, &p) in self.pivots.iter().enumerate() {
            let f = x[p];
            if f != 0 {
                field.axpy(x, field.neg(f), self.basis.row(i));
            }
        }
    }

    pub fn contains(&self, x: &[Elem]) -> Result<bool> {
        self.check_vector(x)?;
        let mut r = x.to_vec();
        self.reduce(&mut r);
        Ok(r.iter().all(|&e| e == 0))
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_compatible(other)?;
        for row in self.basis.row_iter() {
            if !other.contains(row)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        if other.is_zero() || self.is_full() {
            return Ok(self.clone());
        }
        if self.is_zero() || other.is_full() {
            return Ok(other.clone());
        }
        Ok(Subspace::row_space(self.basis.vstack(&other.basis)?))
    }

    /// Span of all the given subspaces.
    pub fn sum_all<'a, I>(field: Field, m: usize, spaces: I) -> Result<Subspace>
    where
        I: IntoIterator<Item = &'a Subspace>,
    {
        let mut rows: Vec<Elem> = Vec::new();
        let mut n = 0;
        for s in spaces {
            if s.field() != field || s.ambient_dim() != m {
                return Err(Error::Shape("summands live in different spaces".into()));
            }
            if s.is_full() {
                return Ok(Subspace::full(field, m));
            }
            for row in s.basis.row_iter() {
                rows.extend_from_slice(row);
            }
            n += s.dim();
        }
        Ok(Subspace::row_space(Matrix::from_raw(field, n, m, rows)))
    }

    /// Rows spanning the annihilator, so that the subspace is `{x : C·xᵀ = 0}`.
    pub fn constraints(&self) -> Matrix {
        kernel_from_rref(&self.basis, &self.pivots)
    }

    /// Intersection, computed as the common kernel of both constraint systems.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_compatible(other)?;
        if self.is_zero() || other.is_full() {
            return Ok(self.clone());
        }
        if other.is_zero() || self.is_full() {
            return Ok(other.clone());
        }
        let stacked = self.constraints().vstack(&other.constraints())?;
        Ok(Subspace::row_space(stacked.kernel_basis()))
    }

    /// Image `{A·v : v ∈ V}` under an invertible `A`.
    pub fn apply_map(&self, a: &Matrix) -> Result<Subspace> {
        if a.field() != self.field() || a.rows() != self.ambient_dim() || !a.is_square() {
            return Err(Error::Shape(format!(
                "{}x{} map on ambient dimension {}",
                a.rows(),
                a.cols(),
                self.ambient_dim()
            )));
        }
        if a.rank() < a.rows() {
            return Err(Error::Singular);
        }
        Ok(self.image_unchecked(a))
    }

    /// Image under a group element.
    pub fn image(&self, g: &GlMatrix) -> Subspace {
        assert_eq!(g.dim(), self.ambient_dim(), "map dimension");
        self.image_unchecked(g.matrix())
    }

    fn image_unchecked(&self, a: &Matrix) -> Subspace {
        if self.is_zero() || self.is_full() {
            return self.clone();
        }
        // rows are vectors, so the image is B·Aᵀ
        let gens = self.basis.mul(&a.transpose()).expect("shapes checked");
        Subspace::row_space(gens)
    }

    /// All `q^dim` members. Intended for small instances only.
    pub fn elements(&self) -> Vec<Vec<Elem>> {
        let field = self.field();
        let m = self.ambient_dim();
        let mut out = vec![vec![0; m]];
        for row in self.basis.row_iter() {
            let mut next = Vec::with_capacity(out.len() * field.q() as usize);
            for v in &out {
                for c in 0..field.q() as Elem {
                    let mut w = v.clone();
                    field.axpy(&mut w, c, row);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }

    /// Uniform member.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Elem> {
        let field = self.field();
        let mut v = vec![0; self.ambient_dim()];
        for row in self.basis.row_iter() {
            field.axpy(&mut v, field.random(rng), row);
        }
        v
    }
}

/// A coset `offset + direction` with the offset in canonical reduced form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineSubspace {
    offset: Vec<Elem>,
    direction: Subspace,
}

impl AffineSubspace {
    pub fn new(offset: Vec<Elem>, direction: Subspace) -> Result<AffineSubspace> {
        direction.check_vector(&offset)?;
        if let Some(&bad) = offset.iter().find(|&&e| e as u32 >= direction.field().q()) {
            return Err(Error::Domain(format!("offset entry {bad} out of range")));
        }
        Ok(AffineSubspace::canonical(offset, direction))
    }

    fn canonical(mut offset: Vec<Elem>, direction: Subspace) -> AffineSubspace {
        direction.reduce(&mut offset);
        AffineSubspace { offset, direction }
    }

    pub fn linear(direction: Subspace) -> AffineSubspace {
        let m = direction.ambient_dim();
        AffineSubspace {
            offset: vec![0; m],
            direction,
        }
    }

    pub fn point(field: Field, x: Vec<Elem>) -> AffineSubspace {
        let m = x.len();
        AffineSubspace {
            offset: x,
            direction: Subspace::zero(field, m),
        }
    }

    pub fn full(field: Field, m: usize) -> AffineSubspace {
        AffineSubspace::linear(Subspace::full(field, m))
    }

    pub fn offset(&self) -> &[Elem] {
        &self.offset
    }

    pub fn direction(&self) -> &Subspace {
        &self.direction
    }

    pub fn field(&self) -> Field {
        self.direction.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.direction.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.direction.dim()
    }

    /// True when the coset passes through the origin.
    pub fn is_linear(&self) -> bool {
        self.offset.iter().all(|&e| e == 0)
    }

    pub fn is_full(&self) -> bool {
        self.direction.is_full()
    }

    /// The single member of a zero-dimensional coset.
    pub fn as_point(&self) -> Option<&[Elem]> {
        (self.dim() == 0).then_some(self.offset.as_slice())
    }

    pub fn contains(&self, x: &[Elem]) -> Result<bool> {
        self.direction.check_vector(x)?;
        let field = self.field();
        let diff: Vec<Elem> = x
            .iter()
            .zip(&self.offset)
            .map(|(&a, &b)| field.sub(a, b))
            .collect();
        self.direction.contains(&diff)
    }

    pub fn neg(&self) -> AffineSubspace {
        AffineSubspace::canonical(self.field().neg_vec(&self.offset), self.direction.clone())
    }

    /// Minkowski sum `(o1 + D1) + (o2 + D2) = (o1 + o2) + (D1 + D2)`.
    pub fn sum(&self, other: &AffineSubspace) -> Result<AffineSubspace> {
        let direction = self.direction.sum(&other.direction)?;
        let offset = self.field().add_vec(&self.offset, &other.offset);
        Ok(AffineSubspace::canonical(offset, direction))
    }

    /// Minkowski sum of several cosets.
    pub fn sum_all<'a, I>(field: Field, m: usize, parts: I) -> Result<AffineSubspace>
    where
        I: IntoIterator<Item = &'a AffineSubspace>,
    {
        let parts: Vec<&AffineSubspace> = parts.into_iter().collect();
        let direction = Subspace::sum_all(field, m, parts.iter().map(|a| &a.direction))?;
        let mut offset = vec![0; m];
        for a in &parts {
            field.axpy(&mut offset, 1, &a.offset);
        }
        Ok(AffineSubspace::canonical(offset, direction))
    }

    /// Exact intersection. `None` when the cosets are disjoint.
    pub fn intersect(&self, other: &AffineSubspace) -> Result<Option<AffineSubspace>> {
        self.direction.check_compatible(&other.direction)?;
        if other.is_full() {
            return Ok(Some(self.clone()));
        }
        if self.is_full() {
            return Ok(Some(other.clone()));
        }
        if let Some(p) = self.as_point() {
            return Ok(other.contains(p)?.then(|| self.clone()));
        }
        if let Some(p) = other.as_point() {
            return Ok(self.contains(p)?.then(|| other.clone()));
        }
        // x ∈ both  ⇔  C1·x = C1·o1  and  C2·x = C2·o2
        let c1 = self.direction.constraints();
        let c2 = other.direction.constraints();
        let mut rhs = c1.mul_vec(&self.offset)?;
        rhs.extend(c2.mul_vec(&other.offset)?);
        let stacked = c1.vstack(&c2)?;
        Ok(stacked.solve_affine(&rhs)?.map(|sol| {
            AffineSubspace::canonical(sol.particular, Subspace::row_space(sol.kernel))
        }))
    }

    /// Image `A·offset + A·direction` under an invertible `A`.
    pub fn apply_map(&self, a: &Matrix) -> Result<AffineSubspace> {
        let direction = self.direction.apply_map(a)?;
        let offset = a.mul_vec(&self.offset)?;
        Ok(AffineSubspace::canonical(offset, direction))
    }

    /// Image under a group element.
    pub fn image(&self, g: &GlMatrix) -> AffineSubspace {
        AffineSubspace::canonical(g.apply(&self.offset), self.direction.image(g))
    }

    /// Preimage, i.e. the image under `g⁻¹`.
    pub fn preimage(&self, g: &GlMatrix) -> AffineSubspace {
        self.image(&g.inverted())
    }

    /// All `q^dim` members. Small instances only.
    pub fn elements(&self) -> Vec<Vec<Elem>> {
        let field = self.field();
        self.direction
            .elements()
            .into_iter()
            .map(|v| field.add_vec(&v, &self.offset))
            .collect()
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Elem> {
        let v = self.direction.random_element(rng);
        self.field().add_vec(&v, &self.offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn f(q: u32) -> Field {
        Field::new(q).unwrap()
    }

    fn span(q: u32, m: usize, gens: &[&[Elem]]) -> Subspace {
        Subspace::from_generators(f(q), m, gens).unwrap()
    }

    const E1: &[Elem] = &[1, 0, 0];
    const E2: &[Elem] = &[0, 1, 0];
    const E3: &[Elem] = &[0, 0, 1];

    #[test]
    fn from_generators_examples() {
        let empty: [&[Elem]; 0] = [];
        let z = Subspace::from_generators(f(2), 3, &empty).unwrap();
        assert_eq!(z.dim(), 0);
        assert_eq!(z, Subspace::zero(f(2), 3));

        let s = span(2, 3, &[E1, &[1, 1, 0], E2]);
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis().to_rows(), vec![E1.to_vec(), E2.to_vec()]);

        let s = span(3, 2, &[&[1, 2]]);
        assert_eq!(s.basis().to_rows(), vec![vec![1, 2]]);
        let s2 = span(3, 2, &[&[2, 1]]);
        assert_eq!(s, s2);

        assert!(matches!(
            Subspace::from_generators(f(2), 3, &[[1u16, 0]]),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn sum_examples() {
        let a = span(2, 3, &[E1, E2]);
        let b = span(2, 3, &[E2, E3]);
        let s = a.sum(&b).unwrap();
        assert_eq!(s.dim(), 3);
        assert!(s.is_full());
        assert_eq!(a.sum(&Subspace::zero(f(2), 3)).unwrap(), a);
        assert_eq!(a.sum(&a).unwrap(), a);
        assert!(a.sum(&Subspace::zero(f(2), 4)).is_err());
    }

    #[test]
    fn intersect_examples() {
        let a = span(2, 3, &[E1, E2]);
        let b = span(2, 3, &[E2, E3]);
        assert_eq!(a.intersect(&b).unwrap(), span(2, 3, &[E2]));
        assert_eq!(a.intersect(&Subspace::full(f(2), 3)).unwrap(), a);

        let c = span(2, 3, &[&[1, 1, 0], E3]);
        let d = span(2, 3, &[&[1, 1, 1]]);
        let i = c.intersect(&d).unwrap();
        assert_eq!(i.dim(), 1);
        assert_eq!(i, d);
        // cross-check by enumeration
        let ec: BTreeSet<_> = c.elements().into_iter().collect();
        let ed: BTreeSet<_> = d.elements().into_iter().collect();
        let ei: BTreeSet<_> = i.elements().into_iter().collect();
        assert_eq!(ei, ec.intersection(&ed).cloned().collect());
    }

    #[test]
    fn contains_examples() {
        let v = span(2, 3, &[E1]);
        assert!(v.contains(&[0, 0, 0]).unwrap());
        assert!(!Subspace::zero(f(2), 3).contains(E1).unwrap());
        assert!(span(2, 2, &[&[1, 1]]).contains(&[1, 1]).unwrap());
        assert!(v.contains(&[0, 0]).is_err());
    }

    #[test]
    fn random_subspace_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(Subspace::random(f(2), 4, 0, &mut rng).unwrap().is_zero());
        assert!(Subspace::random(f(2), 4, 4, &mut rng).unwrap().is_full());
        for _ in 0..100 {
            assert_eq!(Subspace::random(f(2), 4, 2, &mut rng).unwrap().dim(), 2);
        }
        assert!(matches!(
            Subspace::random(f(2), 4, 5, &mut rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn apply_map_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = span(2, 3, &[E1]);
        assert_eq!(v.apply_map(&Matrix::identity(f(2), 3)).unwrap(), v);
        let swap = Matrix::from_rows(f(2), 3, &[E2, E1, E3]).unwrap();
        assert_eq!(v.apply_map(&swap).unwrap(), span(2, 3, &[E2]));
        for _ in 0..50 {
            let g = crate::field::random_gl(f(3), 5, &mut rng);
            let s = Subspace::random(f(3), 5, 2, &mut rng).unwrap();
            assert_eq!(s.apply_map(&g).unwrap().dim(), 2);
        }
        assert!(matches!(
            v.apply_map(&Matrix::zeros(f(2), 3, 3)),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn affine_sum_examples() {
        let fq = f(2);
        let a = AffineSubspace::new(vec![1, 0], span(2, 2, &[&[0, 1]])).unwrap();
        let zero = AffineSubspace::point(fq, vec![0, 0]);
        assert_eq!(a.sum(&zero).unwrap(), a);

        let p = AffineSubspace::point(f(3), vec![1, 2, 0]);
        let r = AffineSubspace::point(f(3), vec![1, 2, 2]);
        assert_eq!(
            p.sum(&r).unwrap(),
            AffineSubspace::point(f(3), vec![2, 1, 2])
        );

        let a1 = AffineSubspace::new(vec![0, 1], span(2, 2, &[&[1, 0]])).unwrap();
        let a2 = AffineSubspace::new(vec![1, 1], span(2, 2, &[&[0, 1]])).unwrap();
        assert!(a1.sum(&a2).unwrap().is_full());
    }

    #[test]
    fn affine_intersect_examples() {
        let fq = f(2);
        let a = AffineSubspace::new(vec![1, 0, 1], span(2, 3, &[E1, E2])).unwrap();
        assert_eq!(a.intersect(&a).unwrap(), Some(a.clone()));

        let l0 = AffineSubspace::linear(span(2, 2, &[&[1, 0]]));
        let l1 = AffineSubspace::new(vec![0, 1], span(2, 2, &[&[1, 0]])).unwrap();
        assert_eq!(l0.intersect(&l1).unwrap(), None);

        let x = AffineSubspace::linear(span(2, 3, &[E1, E2]));
        let y = AffineSubspace::linear(span(2, 3, &[E2, E3]));
        assert_eq!(
            x.intersect(&y).unwrap(),
            Some(AffineSubspace::linear(span(2, 3, &[E2])))
        );
        let _ = fq;
    }

    #[test]
    fn affine_canonical_offset() {
        // same coset, different representatives
        let d = span(3, 3, &[&[1, 2, 0]]);
        let a = AffineSubspace::new(vec![0, 1, 1], d.clone()).unwrap();
        let b = AffineSubspace::new(vec![1, 0, 1], d.clone()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.offset()[0], 0);
    }

    #[test]
    fn affine_map_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let fq = f(3);
        let x = AffineSubspace::new(vec![1, 2, 0], span(3, 3, &[E3])).unwrap();
        assert_eq!(x.apply_map(&Matrix::identity(fq, 3)).unwrap(), x);
        let a = crate::field::random_gl(fq, 3, &mut rng);
        let p = AffineSubspace::point(fq, vec![2, 0, 1]);
        assert_eq!(
            p.apply_map(&a).unwrap(),
            AffineSubspace::point(fq, a.mul_vec(&[2, 0, 1]).unwrap())
        );
        let g = GlMatrix::new(a.clone()).unwrap();
        assert_eq!(x.image(&g), x.apply_map(&a).unwrap());
        assert_eq!(x.image(&g).preimage(&g), x);
        assert_eq!(x.image(&g).dim(), x.dim());
    }

    #[test]
    fn coset_enumeration_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for q in [2, 3] {
            for d in 0..=3 {
                let v = Subspace::random(f(q), 3, d, &mut rng).unwrap();
                let a = AffineSubspace::new(f(q).random_vector(3, &mut rng), v).unwrap();
                let members: BTreeSet<_> = a.elements().into_iter().collect();
                assert_eq!(members.len(), (q as usize).pow(d as u32));
                assert!(members.iter().all(|x| a.contains(x).unwrap()));
            }
        }
    }
}
