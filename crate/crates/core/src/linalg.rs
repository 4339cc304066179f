//! Dense exact linear algebra: reduced row echelon forms, kernels, subspace
//! intersections and linear solves. Every basis produced here is RREF-canonical,
//! so downstream certificates are reproducible bit for bit.

use crate::error::{Error, Result};
use crate::field::Field;

#[derive(Clone, Debug)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> PartialEq for Matrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

/// Output of [`Matrix::rref`].
#[derive(Clone, Debug)]
pub struct Rref<F: Field> {
    pub matrix: Matrix<F>,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_rows(field: &F, cols: usize, rows: &[Vec<F::Elem>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend(r.iter().cloned());
        }
        Matrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(field: &F, rows: usize, columns: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "ragged columns");
            for (i, x) in c.iter().enumerate() {
                m.data[i * m.cols + j] = x.clone();
            }
        }
        m
    }

    pub fn from_i64(field: &F, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows: Vec<Vec<F::Elem>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Self::from_rows(field, cols, &rows)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: F::Elem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.field.is_zero_vec(&self.data)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if !f.is_zero(a) {
                    f.add_scaled(dst, a, other.row(k));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        let f = &self.field;
        let mut out = f.zeros(self.rows);
        for (j, x) in v.iter().enumerate() {
            if f.is_zero(x) {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                let a = &self.data[i * self.cols + j];
                if !f.is_zero(a) {
                    *o = f.add(o, &f.mul(a, x));
                }
            }
        }
        out
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }

    /// Unique reduced row echelon form, with its pivot columns and rank.
    pub fn rref(&self) -> Rref<F> {
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.get(r, c));
            f.scale(&mut m.data[r * m.cols..(r + 1) * m.cols], &inv);
            let pivot_row = m.row(r).to_vec();
            for i in 0..m.rows {
                if i != r {
                    let c_i = m.get(i, c).clone();
                    if !f.is_zero(&c_i) {
                        let cols = m.cols;
                        f.sub_scaled(&mut m.data[i * cols..(i + 1) * cols], &c_i, &pivot_row);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rank = pivots.len();
        Rref {
            matrix: m,
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Null space `{v : m v = 0}` as a subspace of `k^cols`.
    pub fn kernel(&self) -> Subspace<F> {
        let f = &self.field;
        let Rref { matrix, pivots, .. } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut vectors = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = f.zeros(self.cols);
            v[free] = f.one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = f.neg(matrix.get(r, free));
            }
            vectors.push(v);
        }
        Subspace::span(f, self.cols, vectors)
    }

    /// Column space as a subspace of `k^rows`.
    pub fn image(&self) -> Subspace<F> {
        Subspace::from_rref(self.transpose())
    }

    /// Some `x` with `m x = b` (free variables set to zero), or `None`.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        self.solver().solve(b)
    }

    /// Precomputes an elimination so that repeated solves cost one
    /// matrix-vector product each.
    pub fn solver(&self) -> Solver<F> {
        let f = &self.field;
        let mut aug = Self::zeros(f, self.rows, self.cols + self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols + i, f.one());
        }
        // Pivot only on the original columns.
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == aug.rows {
                break;
            }
            let Some(p) = (r..aug.rows).find(|&i| !f.is_zero(aug.get(i, c))) else {
                continue;
            };
            aug.swap_rows(r, p);
            let inv = f.inv(aug.get(r, c));
            let w = aug.cols;
            f.scale(&mut aug.data[r * w..(r + 1) * w], &inv);
            let pivot_row = aug.row(r).to_vec();
            for i in 0..aug.rows {
                if i != r {
                    let c_i = aug.get(i, c).clone();
                    if !f.is_zero(&c_i) {
                        f.sub_scaled(&mut aug.data[i * w..(i + 1) * w], &c_i, &pivot_row);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let mut transform = Self::zeros(f, self.rows, self.rows);
        for i in 0..self.rows {
            for j in 0..self.rows {
                transform.set(i, j, aug.get(i, self.cols + j).clone());
            }
        }
        Solver {
            cols: self.cols,
            transform,
            pivots,
        }
    }
}

/// A factored system `T m = R` (R in RREF) for repeated right-hand sides.
#[derive(Clone, Debug)]
pub struct Solver<F: Field> {
    cols: usize,
    transform: Matrix<F>,
    pivots: Vec<usize>,
}

impl<F: Field> Solver<F> {
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let f = self.transform.field();
        assert_eq!(b.len(), self.transform.rows(), "right-hand side length");
        let c = self.transform.mul_vec(b);
        let rank = self.pivots.len();
        if c[rank..].iter().any(|x| !f.is_zero(x)) {
            return None;
        }
        let mut x = f.zeros(self.cols);
        for (r, &p) in self.pivots.iter().enumerate() {
            x[p] = c[r].clone();
        }
        Some(x)
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// A subspace of `k^n` held by its RREF basis (rows sorted by pivot).
#[derive(Clone, Debug)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

impl<F: Field> PartialEq for Subspace<F> {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.rows == other.rows
    }
}

impl<F: Field> Subspace<F> {
    pub fn zero(field: &F, ambient: usize) -> Self {
        Subspace {
            field: field.clone(),
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        let rows = (0..ambient).map(|i| field.unit_vector(ambient, i)).collect();
        Subspace {
            field: field.clone(),
            ambient,
            rows,
            pivots: (0..ambient).collect(),
        }
    }

    /// Span of the given vectors.
    pub fn span<I>(field: &F, ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<F::Elem>>,
    {
        let vectors: Vec<Vec<F::Elem>> = vectors.into_iter().collect();
        if vectors.is_empty() {
            return Self::zero(field, ambient);
        }
        Self::from_rref(Matrix::from_rows(field, ambient, &vectors))
    }

    fn from_rref(m: Matrix<F>) -> Self {
        let field = m.field().clone();
        let ambient = m.cols();
        let Rref {
            matrix,
            pivots,
            rank,
        } = m.rref();
        let rows = (0..rank).map(|i| matrix.row(i).to_vec()).collect();
        Subspace {
            field,
            ambient,
            rows,
            pivots,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }
    pub fn basis(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_matrix(&self) -> Matrix<F> {
        Matrix::from_rows(&self.field, self.ambient, &self.rows)
    }

    /// Columns that are not pivots: the unit vectors at these positions span a
    /// canonical complement.
    pub fn free_columns(&self) -> Vec<usize> {
        let mut is_pivot = vec![false; self.ambient];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ambient).filter(|&c| !is_pivot[c]).collect()
    }

    /// Remainder of `v` modulo the subspace; zero exactly on members.
    pub fn reduce(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        let mut v = v.to_vec();
        self.reduce_in_place(&mut v);
        v
    }

    fn reduce_in_place(&self, v: &mut [F::Elem]) {
        assert_eq!(v.len(), self.ambient, "vector length");
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !self.field.is_zero(&v[p]) {
                let c = v[p].clone();
                self.field.sub_scaled(v, &c, row);
            }
        }
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.field.is_zero_vec(&self.reduce(v))
    }

    /// Coordinates of `v` in the RREF basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let coords: Vec<F::Elem> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut rebuilt = self.field.zeros(self.ambient);
        for (c, row) in coords.iter().zip(&self.rows) {
            self.field.add_scaled(&mut rebuilt, c, row);
        }
        (rebuilt == v).then_some(coords)
    }

    /// Inserts `v`, keeping the basis in RREF. Returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<F::Elem>) -> bool {
        let f = self.field.clone();
        let mut v = v;
        self.reduce_in_place(&mut v);
        let Some(p) = v.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&v[p]);
        f.scale(&mut v, &inv);
        for row in self.rows.iter_mut() {
            if !f.is_zero(&row[p]) {
                let c = row[p].clone();
                f.sub_scaled(row, &c, &v);
            }
        }
        let pos = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(pos, p);
        self.rows.insert(pos, v);
        true
    }

    pub fn sum(&self, other: &Subspace<F>) -> Result<Subspace<F>> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        for r in &other.rows {
            out.insert(r.clone());
        }
        Ok(out)
    }

    /// `u ∩ w`: solve for combinations of `u`'s basis whose remainder modulo
    /// `w` vanishes.
    pub fn intersect(&self, other: &Subspace<F>) -> Result<Subspace<F>> {
        self.check_ambient(other)?;
        let f = &self.field;
        if self.is_zero() || other.is_zero() {
            return Ok(Subspace::zero(f, self.ambient));
        }
        let remainders: Vec<Vec<F::Elem>> = self.rows.iter().map(|u| other.reduce(u)).collect();
        // Columns of this matrix are the remainders; its kernel gives the
        // coefficient vectors a with sum a_i rem(u_i) = 0.
        let m = Matrix::from_columns(f, self.ambient, &remainders);
        let kernel = m.kernel();
        let vectors = kernel.rows.iter().map(|a| {
            let mut x = f.zeros(self.ambient);
            for (c, u) in a.iter().zip(&self.rows) {
                f.add_scaled(&mut x, c, u);
            }
            x
        });
        Ok(Subspace::span(f, self.ambient, vectors.collect::<Vec<_>>()))
    }

    pub fn is_subspace_of(&self, other: &Subspace<F>) -> bool {
        self.ambient == other.ambient && self.rows.iter().all(|r| other.contains(r))
    }

    /// First basis vector of `self` that is not in `other`.
    pub fn witness_outside(&self, other: &Subspace<F>) -> Option<Vec<F::Elem>> {
        self.rows.iter().find(|r| !other.contains(r)).cloned()
    }

    fn check_ambient(&self, other: &Subspace<F>) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::Dimension(format!(
                "ambient dimensions {} and {} differ",
                self.ambient, other.ambient
            )));
        }
        Ok(())
    }

    /// Image of this subspace under a linear map given by a matrix acting on
    /// column vectors.
    pub fn map(&self, m: &Matrix<F>) -> Subspace<F> {
        let vectors: Vec<_> = self.rows.iter().map(|r| m.mul_vec(r)).collect();
        Subspace::span(&self.field, m.rows(), vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};

    #[test]
    fn rref_identity_and_zero() {
        let q = Rationals;
        let id = Matrix::identity(&q, 2);
        let r = id.rref();
        assert_eq!(r.matrix, id);
        assert_eq!(r.pivots, vec![0, 1]);
        assert_eq!(r.rank, 2);

        let z = Matrix::zeros(&q, 2, 3);
        let r = z.rref();
        assert_eq!(r.matrix, z);
        assert!(r.pivots.is_empty());
        assert_eq!(r.rank, 0);
    }

    #[test]
    fn rref_over_f5() {
        let f = PrimeField::new(5).unwrap();
        let m = Matrix::from_i64(&f, &[&[2, 4], &[1, 2]]);
        let r = m.rref();
        assert_eq!(r.matrix, Matrix::from_i64(&f, &[&[1, 2], &[0, 0]]));
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn kernel_examples() {
        let q = Rationals;
        assert!(Matrix::identity(&q, 3).kernel().is_zero());

        let k = Matrix::from_i64(&q, &[&[1, 1]]).kernel();
        assert_eq!(k.dim(), 1);
        assert!(k.contains(&[q.from_i64(1), q.from_i64(-1)]));

        let m = Matrix::from_i64(&q, &[&[1, 2], &[2, 4]]);
        let k = m.kernel();
        assert_eq!(k.dim(), 1);
        let v = vec![q.from_i64(2), q.from_i64(-1)];
        assert!(k.contains(&v));
        assert!(q.is_zero_vec(&m.mul_vec(&v)));
        // RREF-normalized representative
        assert_eq!(k.basis()[0], vec![q.one(), q.parse("-1/2").unwrap()]);
    }

    #[test]
    fn intersect_examples() {
        let q = Rationals;
        let e = |i| q.unit_vector(3, i);
        let u = Subspace::span(&q, 3, vec![e(0), e(1)]);
        let w = Subspace::span(&q, 3, vec![e(1), e(2)]);
        let i = u.intersect(&w).unwrap();
        assert_eq!(i, Subspace::span(&q, 3, vec![e(1)]));
        assert_eq!(u.intersect(&u).unwrap(), u);

        let a = Subspace::span(&q, 2, vec![q.unit_vector(2, 0)]);
        let b = Subspace::span(&q, 2, vec![q.unit_vector(2, 1)]);
        assert!(a.intersect(&b).unwrap().is_zero());

        let bad = Subspace::zero(&q, 4);
        assert!(matches!(a.intersect(&bad), Err(Error::Dimension(_))));
    }

    #[test]
    fn solve_examples() {
        let q = Rationals;
        let b = vec![q.from_i64(3), q.from_i64(-2)];
        assert_eq!(Matrix::identity(&q, 2).solve(&b), Some(b.clone()));
        assert_eq!(Matrix::zeros(&q, 2, 2).solve(&b), None);
        let m = Matrix::from_i64(&q, &[&[1, 1]]);
        assert_eq!(m.solve(&[q.from_i64(3)]), Some(vec![q.from_i64(3), q.zero()]));
    }

    #[test]
    fn insert_keeps_rref() {
        let q = Rationals;
        let mut s = Subspace::zero(&q, 3);
        assert!(s.insert(vec![q.from_i64(0), q.from_i64(2), q.from_i64(4)]));
        assert!(s.insert(vec![q.from_i64(1), q.from_i64(1), q.from_i64(1)]));
        assert!(!s.insert(vec![q.from_i64(1), q.from_i64(2), q.from_i64(3)]));
        let direct = Subspace::span(
            &q,
            3,
            vec![
                vec![q.from_i64(0), q.from_i64(2), q.from_i64(4)],
                vec![q.from_i64(1), q.from_i64(1), q.from_i64(1)],
            ],
        );
        assert_eq!(s, direct);
    }
}
