//! Truncated graded algebras: bases per internal degree, multiplication
//! tables, idempotents and the graded Jacobson radical with its powers.
//!
//! Multiplication is function composition. A basis element `b` sits in
//! `e_target A e_source`, and `b1 * b2` can only be nonzero when
//! `source(b1) == target(b2)`. For algebras built from a presentation, the
//! product of path words `p1 * p2` is the word `p2` followed by `p1`.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::linalg::Subspace;
use crate::presentation::{Presentation, Quiver};

pub type SparseVec<E> = Vec<(usize, E)>;

/// Default cap on the number of enumerated paths when building from a presentation.
pub const DEFAULT_PATH_CAP: usize = 250_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub label: String,
    pub source: usize,
    pub target: usize,
    /// Secondary grading carried along for bookkeeping (for algebras built
    /// from a presentation this equals the degree).
    pub weight: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Presentation,
    StructureConstants,
    AssociatedGraded,
    ExtDual,
    Opposite,
}

/// Evidence that the declared weight-0 nilpotency bound is consistent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilization {
    pub bound: usize,
    pub dims_at_bound: Vec<usize>,
    /// `None` when the quiver has no weight-0 arrows and the bound is irrelevant.
    pub dims_at_bound_plus_one: Option<Vec<usize>>,
    /// Smallest `m` with `J(A_0)^m = 0`.
    pub radical_nilpotency: usize,
}

#[derive(Clone, Debug)]
pub struct TruncatedAlgebra<F: Field> {
    field: F,
    vertex_names: Vec<String>,
    window: usize,
    finite_top: Option<usize>,
    generator_weight: usize,
    basis: Vec<Vec<BasisElement>>,
    idempotents: Vec<usize>,
    /// `mult[t1][t2 - 0][i * dim(t2) + j]`, present for `t1 + t2 <= window`.
    mult: Vec<Vec<Vec<SparseVec<F::Elem>>>>,
    /// `radical[k][t]` is `(J^k)_t`; the last entry is zero in every degree.
    radical: Vec<Vec<Subspace<F>>>,
    by_source: Vec<Vec<Vec<usize>>>,
    local_index: Vec<Vec<usize>>,
    provenance: Provenance,
    stabilization: Option<Stabilization>,
}

impl<F: Field> TruncatedAlgebra<F> {
    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn field_spec(&self) -> FieldSpec {
        self.field.spec()
    }
    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }
    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }
    /// Largest internal degree held.
    pub fn window(&self) -> usize {
        self.window
    }
    /// `Some(T)` when `A_t = 0` is certified for every `t > T`.
    pub fn finite_top(&self) -> Option<usize> {
        self.finite_top
    }
    pub fn is_finite(&self) -> bool {
        self.finite_top.is_some()
    }
    /// Every element of `A_t` lies in `J^ceil(t / w)`, with `w` this value.
    pub fn generator_weight(&self) -> usize {
        self.generator_weight
    }
    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
    pub fn stabilization(&self) -> Option<&Stabilization> {
        self.stabilization.as_ref()
    }

    pub fn dim(&self, t: usize) -> usize {
        self.basis.get(t).map_or(0, Vec::len)
    }

    pub fn dims(&self) -> Vec<usize> {
        (0..=self.window).map(|t| self.dim(t)).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.basis.iter().map(Vec::len).sum()
    }

    pub fn basis(&self, t: usize) -> &[BasisElement] {
        self.basis.get(t).map_or(&[], |b| b.as_slice())
    }

    pub fn element(&self, t: usize, i: usize) -> &BasisElement {
        &self.basis[t][i]
    }

    /// Degree-0 index of the idempotent at vertex `v`.
    pub fn idempotent(&self, v: usize) -> usize {
        self.idempotents[v]
    }

    pub fn idempotents(&self) -> &[usize] {
        &self.idempotents
    }

    pub fn is_idempotent(&self, t: usize, i: usize) -> bool {
        t == 0 && self.idempotents.contains(&i)
    }

    /// Indices of degree-`t` basis elements with the given source vertex.
    pub fn by_source(&self, t: usize, v: usize) -> &[usize] {
        self.by_source
            .get(t)
            .map_or(&[], |per_vertex| per_vertex[v].as_slice())
    }

    /// Position of basis element `(t, i)` inside `by_source(t, source)`.
    pub fn local_index(&self, t: usize, i: usize) -> usize {
        self.local_index[t][i]
    }

    /// Structure constants of `b_(t1,i) * b_(t2,j)`; empty outside the window.
    pub fn product(&self, t1: usize, i: usize, t2: usize, j: usize) -> &[(usize, F::Elem)] {
        if t1 + t2 > self.window {
            return &[];
        }
        &self.mult[t1][t2][i * self.dim(t2) + j]
    }

    /// Product of two vectors of degrees `t1` and `t2`.
    pub fn mul_vec(&self, t1: usize, x: &[F::Elem], t2: usize, y: &[F::Elem]) -> Vec<F::Elem> {
        let f = &self.field;
        let t = t1 + t2;
        let mut out = f.zeros(self.dim(t));
        if t > self.window {
            return out;
        }
        for (i, a) in x.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if f.is_zero(b) {
                    continue;
                }
                let ab = f.mul(a, b);
                for (k, c) in self.product(t1, i, t2, j) {
                    out[*k] = f.add(&out[*k], &f.mul(&ab, c));
                }
            }
        }
        out
    }

    /// `(J^k)_t`. Beyond the computed chain this is the zero subspace.
    pub fn radical(&self, k: usize, t: usize) -> &Subspace<F> {
        let k = k.min(self.radical.len() - 1);
        &self.radical[k][t]
    }

    /// Smallest `k` with `J^k = 0` in every degree of the window.
    pub fn radical_length(&self) -> usize {
        self.radical.len() - 1
    }

    /// `dim (J^k)_t` for `k = 0..=radical_length()`.
    pub fn radical_dims(&self) -> Vec<Vec<usize>> {
        self.radical
            .iter()
            .map(|per_t| per_t.iter().map(Subspace::dim).collect())
            .collect()
    }

    /// Basis elements spanning `J_t`: non-idempotents in degree 0, everything above.
    pub fn radical_basis(&self, t: usize) -> Vec<usize> {
        (0..self.dim(t)).filter(|&i| !self.is_idempotent(t, i)).collect()
    }

    /// The opposite algebra: same basis, reversed products and typing.
    pub fn opposite(&self) -> TruncatedAlgebra<F> {
        let basis: Vec<Vec<BasisElement>> = self
            .basis
            .iter()
            .map(|per_t| {
                per_t
                    .iter()
                    .map(|b| BasisElement {
                        label: b.label.clone(),
                        source: b.target,
                        target: b.source,
                        weight: b.weight,
                    })
                    .collect()
            })
            .collect();
        let mut mult = Vec::with_capacity(self.mult.len());
        for t1 in 0..=self.window {
            let mut row = Vec::new();
            for t2 in 0..=self.window - t1 {
                let (n1, n2) = (self.dim(t1), self.dim(t2));
                let mut table = Vec::with_capacity(n1 * n2);
                for i in 0..n1 {
                    for j in 0..n2 {
                        table.push(self.product(t2, j, t1, i).to_vec());
                    }
                }
                row.push(table);
            }
            mult.push(row);
        }
        let mut out = TruncatedAlgebra {
            field: self.field.clone(),
            vertex_names: self.vertex_names.clone(),
            window: self.window,
            finite_top: self.finite_top,
            generator_weight: self.generator_weight,
            basis,
            idempotents: self.idempotents.clone(),
            mult,
            radical: Vec::new(),
            by_source: Vec::new(),
            local_index: Vec::new(),
            provenance: Provenance::Opposite,
            stabilization: self.stabilization.clone(),
        };
        out.index_sources();
        out.compute_radical_chain();
        out
    }

    fn index_sources(&mut self) {
        let nv = self.num_vertices();
        self.by_source = self
            .basis
            .iter()
            .map(|per_t| {
                let mut lists = vec![Vec::new(); nv];
                for (i, b) in per_t.iter().enumerate() {
                    lists[b.source].push(i);
                }
                lists
            })
            .collect();
        self.local_index = self
            .basis
            .iter()
            .enumerate()
            .map(|(t, per_t)| {
                per_t
                    .iter()
                    .enumerate()
                    .map(|(i, b)| {
                        self.by_source[t][b.source]
                            .iter()
                            .position(|&x| x == i)
                            .expect("indexed")
                    })
                    .collect()
            })
            .collect();
    }

    /// Iterated products `J^k = J * J^(k-1)`, degree by degree, until zero.
    fn compute_radical_chain(&mut self) {
        let f = self.field.clone();
        let window = self.window;
        let full: Vec<Subspace<F>> = (0..=window)
            .map(|t| Subspace::full(&f, self.dim(t)))
            .collect();
        let j1: Vec<Subspace<F>> = (0..=window)
            .map(|t| {
                let vectors = self
                    .radical_basis(t)
                    .into_iter()
                    .map(|i| f.unit_vector(self.dim(t), i))
                    .collect::<Vec<_>>();
                Subspace::span(&f, self.dim(t), vectors)
            })
            .collect();
        let mut chain = vec![full, j1];
        while chain.last().unwrap().iter().any(|s| !s.is_zero()) {
            let prev = chain.last().unwrap();
            let next: Vec<Subspace<F>> = (0..=window)
                .into_par_iter()
                .map(|t| {
                    let mut acc = Subspace::zero(&f, self.dim(t));
                    for t1 in 0..=t {
                        let t2 = t - t1;
                        for i in self.radical_basis(t1) {
                            for y in prev[t2].basis() {
                                let unit = f.unit_vector(self.dim(t1), i);
                                acc.insert(self.mul_vec(t1, &unit, t2, y));
                            }
                        }
                    }
                    acc
                })
                .collect();
            chain.push(next);
        }
        self.radical = chain;
    }

    fn check_associativity(&self) -> Result<()> {
        let f = &self.field;
        let w = self.window;
        let mut triples = Vec::new();
        for t1 in 0..=w {
            for t2 in 0..=w - t1 {
                for t3 in 0..=w - t1 - t2 {
                    triples.push((t1, t2, t3));
                }
            }
        }
        let failure = triples.par_iter().find_map_first(|&(t1, t2, t3)| {
            for a in 0..self.dim(t1) {
                for b in 0..self.dim(t2) {
                    let ab = self.product(t1, a, t2, b);
                    for c in 0..self.dim(t3) {
                        let mut left = f.zeros(self.dim(t1 + t2 + t3));
                        for (k, x) in ab {
                            for (m, y) in self.product(t1 + t2, *k, t3, c) {
                                left[*m] = f.add(&left[*m], &f.mul(x, y));
                            }
                        }
                        let mut right = f.zeros(self.dim(t1 + t2 + t3));
                        for (k, x) in self.product(t2, b, t3, c) {
                            for (m, y) in self.product(t1, a, t2 + t3, *k) {
                                right[*m] = f.add(&right[*m], &f.mul(x, y));
                            }
                        }
                        if left != right {
                            return Some(format!(
                                "({}, {}, {}) in degrees ({t1}, {t2}, {t3})",
                                self.basis[t1][a].label, self.basis[t2][b].label, self.basis[t3][c].label
                            ));
                        }
                    }
                }
            }
            None
        });
        match failure {
            Some(w) => Err(Error::NotAssociative(w)),
            None => Ok(()),
        }
    }

    /// Exports the structure constants (scalars rendered exactly).
    pub fn to_document(&self) -> AlgebraDocument {
        let f = &self.field;
        let mut mult = Vec::new();
        for t1 in 0..=self.window {
            for t2 in 0..=self.window - t1 {
                for i in 0..self.dim(t1) {
                    for j in 0..self.dim(t2) {
                        let p = self.product(t1, i, t2, j);
                        if p.is_empty() {
                            continue;
                        }
                        let mut dense = vec!["0".to_string(); self.dim(t1 + t2)];
                        for (k, c) in p {
                            dense[*k] = f.render(c);
                        }
                        let mut entry: Vec<serde_json::Value> =
                            vec![t1.into(), t2.into(), i.into(), j.into()];
                        entry.extend(dense.into_iter().map(serde_json::Value::from));
                        mult.push(entry);
                    }
                }
            }
        }
        AlgebraDocument {
            field: Some(self.field.spec()),
            vertices: Some(self.vertex_names.clone()),
            dims: self.dims(),
            idempotents: self.idempotents.clone(),
            mult,
            labels: Some(
                self.basis
                    .iter()
                    .map(|b| b.iter().map(|e| e.label.clone()).collect())
                    .collect(),
            ),
            weights: Some(
                self.basis
                    .iter()
                    .map(|b| b.iter().map(|e| e.weight).collect())
                    .collect(),
            ),
            finite_top: self.finite_top,
        }
    }

    /// One-line dimension summary, e.g. `1 2 1 1`.
    pub fn dims_string(&self) -> String {
        let mut s = String::new();
        for (t, d) in self.dims().iter().enumerate() {
            if t > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{d}");
        }
        s
    }
}

/// JSON form of an algebra given by structure constants. Products are rows
/// `[t1, t2, i, j, c_0, c_1, ...]` with the dense coefficient vector of
/// `b_(t1,i) * b_(t2,j)` in degree `t1 + t2`; omitted pairs multiply to zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<String>>,
    pub dims: Vec<usize>,
    pub idempotents: Vec<usize>,
    pub mult: Vec<Vec<serde_json::Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finite_top: Option<usize>,
}

impl AlgebraDocument {
    /// Parses the document's products into sparse tables over `field`.
    pub fn into_algebra<F: Field>(&self, field: &F) -> Result<TruncatedAlgebra<F>> {
        let window = self
            .dims
            .len()
            .checked_sub(1)
            .ok_or_else(|| Error::Import("empty dims".into()))?;
        let mut products = Vec::new();
        for row in &self.mult {
            if row.len() < 4 {
                return Err(Error::Import(format!("short product row {row:?}")));
            }
            let idx = |k: usize| {
                row[k]
                    .as_u64()
                    .map(|x| x as usize)
                    .ok_or_else(|| Error::Import(format!("bad index in row {row:?}")))
            };
            let (t1, t2, i, j) = (idx(0)?, idx(1)?, idx(2)?, idx(3)?);
            if t1 + t2 > window || i >= self.dims[t1] || j >= self.dims[t2] {
                return Err(Error::Import(format!("index out of range in row {row:?}")));
            }
            let coeffs = &row[4..];
            if coeffs.len() != self.dims[t1 + t2] {
                return Err(Error::Import(format!(
                    "row {row:?} needs {} coefficients",
                    self.dims[t1 + t2]
                )));
            }
            let mut sparse = Vec::new();
            for (k, c) in coeffs.iter().enumerate() {
                let text = match c {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) => n.to_string(),
                    other => return Err(Error::Import(format!("bad scalar {other}"))),
                };
                let x = field.parse(&text)?;
                if !field.is_zero(&x) {
                    sparse.push((k, x));
                }
            }
            products.push(((t1, i, t2, j), sparse));
        }
        let n_vertices = self.idempotents.len();
        let vertices = self
            .vertices
            .clone()
            .unwrap_or_else(|| (0..n_vertices).map(|v| format!("v{v}")).collect());
        let spec = StructureConstants {
            vertex_names: vertices,
            dims: self.dims.clone(),
            idempotents: self.idempotents.clone(),
            products,
            labels: self.labels.clone(),
            weights: self.weights.clone(),
            finite_top: self.finite_top,
        };
        from_structure_constants(field, spec, Provenance::StructureConstants)
    }
}

/// Raw input for [`from_structure_constants`].
#[derive(Clone, Debug)]
pub struct StructureConstants<E> {
    pub vertex_names: Vec<String>,
    /// Dimension per degree `0..=window`.
    pub dims: Vec<usize>,
    /// Degree-0 index of the idempotent of each vertex.
    pub idempotents: Vec<usize>,
    /// Nonzero products `((t1, i, t2, j), sparse coefficients in degree t1 + t2)`.
    pub products: Vec<((usize, usize, usize, usize), SparseVec<E>)>,
    pub labels: Option<Vec<Vec<String>>>,
    pub weights: Option<Vec<Vec<usize>>>,
    pub finite_top: Option<usize>,
}

/// Builds an algebra from structure constants, deriving the typing of basis
/// elements from the idempotents and verifying associativity in-window.
pub fn from_structure_constants<F: Field>(
    field: &F,
    sc: StructureConstants<F::Elem>,
    provenance: Provenance,
) -> Result<TruncatedAlgebra<F>> {
    let window = sc
        .dims
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::Import("no degrees".into()))?;
    let nv = sc.idempotents.len();
    if sc.vertex_names.len() != nv {
        return Err(Error::Idempotents(format!(
            "{} vertex names for {} idempotents",
            sc.vertex_names.len(),
            nv
        )));
    }
    let mut seen = vec![false; sc.dims[0]];
    for &e in &sc.idempotents {
        if e >= sc.dims[0] || seen[e] {
            return Err(Error::Idempotents(format!("bad idempotent index {e}")));
        }
        seen[e] = true;
    }
    let mut mult: Vec<Vec<Vec<SparseVec<F::Elem>>>> = (0..=window)
        .map(|t1| {
            (0..=window - t1)
                .map(|t2| vec![Vec::new(); sc.dims[t1] * sc.dims[t2]])
                .collect()
        })
        .collect();
    for ((t1, i, t2, j), v) in sc.products {
        if t1 + t2 > window {
            continue;
        }
        let mut v: SparseVec<F::Elem> = v.into_iter().filter(|(_, c)| !field.is_zero(c)).collect();
        v.sort_by_key(|(k, _)| *k);
        mult[t1][t2][i * sc.dims[t2] + j] = v;
    }
    let label = |t: usize, i: usize| -> String {
        sc.labels
            .as_ref()
            .and_then(|l| l.get(t))
            .and_then(|l| l.get(i))
            .cloned()
            .unwrap_or_else(|| format!("b{t}_{i}"))
    };
    let is_unit = |v: &SparseVec<F::Elem>, k: usize| v.len() == 1 && v[0].0 == k && field.is_one(&v[0].1);

    // Orthogonality of the idempotents.
    for (a, &ea) in sc.idempotents.iter().enumerate() {
        for (b, &eb) in sc.idempotents.iter().enumerate() {
            let p = &mult[0][0][ea * sc.dims[0] + eb];
            let ok = if a == b { is_unit(p, ea) } else { p.is_empty() };
            if !ok {
                return Err(Error::Idempotents(format!(
                    "e_{} * e_{} is wrong",
                    sc.vertex_names[a], sc.vertex_names[b]
                )));
            }
        }
    }
    // Typing: each basis element must be fixed by exactly one idempotent on
    // each side and killed by the others.
    let mut basis = Vec::with_capacity(window + 1);
    for t in 0..=window {
        let mut per_t = Vec::with_capacity(sc.dims[t]);
        for i in 0..sc.dims[t] {
            let mut target = None;
            let mut source = None;
            for (v, &e) in sc.idempotents.iter().enumerate() {
                let left = &mult[0][t][e * sc.dims[t] + i];
                let right = &mult[t][0][i * sc.dims[0] + e];
                if is_unit(left, i) {
                    if target.replace(v).is_some() {
                        return Err(Error::Idempotents(format!("{} has two targets", label(t, i))));
                    }
                } else if !left.is_empty() {
                    return Err(Error::Idempotents(format!(
                        "{} is not homogeneous for the idempotents",
                        label(t, i)
                    )));
                }
                if is_unit(right, i) {
                    if source.replace(v).is_some() {
                        return Err(Error::Idempotents(format!("{} has two sources", label(t, i))));
                    }
                } else if !right.is_empty() {
                    return Err(Error::Idempotents(format!(
                        "{} is not homogeneous for the idempotents",
                        label(t, i)
                    )));
                }
            }
            let (Some(source), Some(target)) = (source, target) else {
                return Err(Error::Idempotents(format!(
                    "idempotents do not sum to the identity on {}",
                    label(t, i)
                )));
            };
            let weight = sc
                .weights
                .as_ref()
                .and_then(|w| w.get(t))
                .and_then(|w| w.get(i))
                .copied()
                .unwrap_or(t);
            per_t.push(BasisElement {
                label: label(t, i),
                source,
                target,
                weight,
            });
        }
        basis.push(per_t);
    }
    let mut alg = TruncatedAlgebra {
        field: field.clone(),
        vertex_names: sc.vertex_names,
        window,
        finite_top: sc.finite_top,
        generator_weight: 1,
        basis,
        idempotents: sc.idempotents,
        mult,
        radical: Vec::new(),
        by_source: Vec::new(),
        local_index: Vec::new(),
        provenance,
        stabilization: None,
    };
    alg.check_associativity()?;
    check_degree_zero_radical(&alg)?;
    alg.index_sources();
    alg.compute_radical_chain();
    alg.generator_weight = empirical_generator_weight(&alg);
    Ok(alg)
}

/// The non-idempotent degree-0 elements must span a nilpotent ideal of `A_0`.
fn check_degree_zero_radical<F: Field>(alg: &TruncatedAlgebra<F>) -> Result<()> {
    let f = &alg.field;
    let n0 = alg.dim(0);
    let rad = alg.radical_basis(0);
    let in_radical = |v: &[(usize, F::Elem)]| v.iter().all(|(k, _)| !alg.is_idempotent(0, *k));
    for &r in &rad {
        for i in 0..n0 {
            if !in_radical(alg.product(0, r, 0, i)) || !in_radical(alg.product(0, i, 0, r)) {
                return Err(Error::Idempotents(format!(
                    "non-idempotent degree-0 elements do not span an ideal (at {})",
                    alg.basis[0][r].label
                )));
            }
        }
    }
    // Nilpotency: powers of the span shrink to zero within dim A_0 steps.
    let mut power: Vec<Vec<F::Elem>> = rad.iter().map(|&r| f.unit_vector(n0, r)).collect();
    let mut space = Subspace::span(f, n0, power.clone());
    for _ in 0..=n0 {
        if space.is_zero() {
            return Ok(());
        }
        let mut next = Subspace::zero(f, n0);
        for &r in &rad {
            for y in &power {
                next.insert(alg.mul_vec(0, &f.unit_vector(n0, r), 0, y));
            }
        }
        power = next.basis().to_vec();
        space = next;
    }
    Err(Error::Idempotents(
        "degree-0 radical is not nilpotent (the degree-0 part is not basic)".into(),
    ))
}

/// Smallest `w >= 1` with `A_t ⊆ J^ceil(t/w)` for every `t` in the window.
fn empirical_generator_weight<F: Field>(alg: &TruncatedAlgebra<F>) -> usize {
    (1..=alg.window.max(1))
        .find(|&w| {
            (1..=alg.window).all(|t| alg.radical(t.div_ceil(w), t).dim() == alg.dim(t))
        })
        .unwrap_or(alg.window.max(1))
}

/// A nonempty or trivial path: source vertex plus arrows in diagrammatic order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Path {
    source: usize,
    arrows: Vec<usize>,
}

struct PathSpace<'q> {
    quiver: &'q Quiver,
    window: usize,
    bound: usize,
    /// Blocks keyed by (weight, source, target), columns sorted canonically.
    blocks: Vec<(usize, usize, usize)>,
    block_of: HashMap<(usize, usize, usize), usize>,
    columns: Vec<Vec<Path>>,
    locate: HashMap<Path, (usize, usize)>,
}

impl<'q> PathSpace<'q> {
    fn new(quiver: &'q Quiver, window: usize, bound: usize, cap: usize) -> Result<Self> {
        let mut all: Vec<(Path, usize, usize)> = Vec::new(); // path, weight, trailing weight-0 run
        let mut frontier: Vec<(Path, usize, usize)> = (0..quiver.num_vertices())
            .map(|v| (Path { source: v, arrows: vec![] }, 0, 0))
            .collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (p, w, run) in &frontier {
                let end = path_target(quiver, p);
                for (a, arrow) in quiver.arrows.iter().enumerate() {
                    if arrow.source != end || w + arrow.weight > window {
                        continue;
                    }
                    let run2 = if arrow.weight == 0 { run + 1 } else { 0 };
                    if run2 >= bound {
                        continue;
                    }
                    let mut arrows = p.arrows.clone();
                    arrows.push(a);
                    next.push((Path { source: p.source, arrows }, w + arrow.weight, run2));
                }
            }
            all.append(&mut frontier);
            if all.len() + next.len() > cap {
                return Err(Error::Explosion(format!(
                    "more than {cap} paths of weight <= {window}; lower weight_max or nilpotency_bound"
                )));
            }
            frontier = next;
        }
        let key = |p: &Path| -> (usize, Vec<&str>, usize) {
            (
                p.arrows.len(),
                p.arrows.iter().map(|&a| quiver.arrows[a].name.as_str()).collect(),
                p.source,
            )
        };
        all.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| key(&a.0).cmp(&key(&b.0))));
        let mut space = PathSpace {
            quiver,
            window,
            bound,
            blocks: Vec::new(),
            block_of: HashMap::new(),
            columns: Vec::new(),
            locate: HashMap::new(),
        };
        for (p, w, _) in all {
            let k = (w, p.source, path_target(quiver, &p));
            let b = *space.block_of.entry(k).or_insert_with(|| {
                space.blocks.push(k);
                space.columns.push(Vec::new());
                space.blocks.len() - 1
            });
            space.locate.insert(p.clone(), (b, space.columns[b].len()));
            space.columns[b].push(p);
        }
        Ok(space)
    }

    fn weight(&self, p: &Path) -> usize {
        p.arrows.iter().map(|&a| self.quiver.arrows[a].weight).sum()
    }

    /// Whether `p` contains `bound` consecutive weight-0 arrows (so lies in the
    /// truncation ideal).
    fn truncated(&self, p: &Path) -> bool {
        let mut run = 0;
        for &a in &p.arrows {
            if self.quiver.arrows[a].weight == 0 {
                run += 1;
                if run >= self.bound {
                    return true;
                }
            } else {
                run = 0;
            }
        }
        false
    }

    /// Location of `p`, or `None` if it is zero modulo the truncation ideal.
    /// Paths above the window are the caller's responsibility.
    fn find(&self, p: &Path) -> Option<(usize, usize)> {
        debug_assert!(self.weight(p) <= self.window);
        if self.truncated(p) {
            return None;
        }
        self.locate.get(p).copied()
    }
}

fn path_target(q: &Quiver, p: &Path) -> usize {
    p.arrows.last().map_or(p.source, |&a| q.arrows[a].target)
}

fn path_label(q: &Quiver, p: &Path) -> String {
    if p.arrows.is_empty() {
        format!("e_{}", q.vertices[p.source])
    } else {
        p.arrows
            .iter()
            .map(|&a| q.arrows[a].name.as_str())
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Quotient of the truncated path space by the ideal generated by the relations.
struct Quotient<'q, F: Field> {
    space: PathSpace<'q>,
    ideal: Vec<Subspace<F>>,
    /// For each block, the columns that survive as basis elements.
    free: Vec<Vec<usize>>,
}

fn quotient<'q, F: Field>(
    p: &'q Presentation,
    field: &F,
    window: usize,
    bound: usize,
    cap: usize,
) -> Result<Quotient<'q, F>> {
    let q = &p.quiver;
    let space = PathSpace::new(q, window, bound, cap)?;
    let mut ideal: Vec<Subspace<F>> = space
        .columns
        .iter()
        .map(|c| Subspace::zero(field, c.len()))
        .collect();
    let mut queue: VecDeque<(usize, Vec<F::Elem>)> = VecDeque::new();
    let push = |ideal: &mut Vec<Subspace<F>>, queue: &mut VecDeque<_>, b: usize, v: Vec<F::Elem>| {
        if ideal[b].insert(v.clone()) {
            queue.push_back((b, v));
        }
    };

    for rel in &p.relations {
        if rel.weight(q) > window {
            continue;
        }
        let coeffs = rel.coefficients_in(field)?;
        let key = (rel.weight(q), rel.source(q), rel.target(q));
        let Some(&b) = space.block_of.get(&key) else {
            continue;
        };
        let mut v = field.zeros(space.columns[b].len());
        for (c, (_, word)) in coeffs.iter().zip(&rel.terms) {
            let path = Path {
                source: word.source(q),
                arrows: word.0.clone(),
            };
            if let Some((_, col)) = space.find(&path) {
                v[col] = field.add(&v[col], c);
            }
        }
        if !field.is_zero_vec(&v) {
            push(&mut ideal, &mut queue, b, v);
        }
    }

    while let Some((b, v)) = queue.pop_front() {
        let (w, s, t) = space.blocks[b];
        for (a, arrow) in q.arrows.iter().enumerate() {
            if w + arrow.weight > window {
                continue;
            }
            // v followed by the arrow, and the arrow followed by v.
            for append in [true, false] {
                let (ns, nt) = if append {
                    if arrow.source != t {
                        continue;
                    }
                    (s, arrow.target)
                } else {
                    if arrow.target != s {
                        continue;
                    }
                    (arrow.source, t)
                };
                let Some(&nb) = space.block_of.get(&(w + arrow.weight, ns, nt)) else {
                    continue;
                };
                let mut nv = field.zeros(space.columns[nb].len());
                for (col, c) in v.iter().enumerate() {
                    if field.is_zero(c) {
                        continue;
                    }
                    let old = &space.columns[b][col];
                    let path = if append {
                        let mut arrows = old.arrows.clone();
                        arrows.push(a);
                        Path { source: s, arrows }
                    } else {
                        let mut arrows = vec![a];
                        arrows.extend_from_slice(&old.arrows);
                        Path { source: ns, arrows }
                    };
                    if let Some((_, ncol)) = space.find(&path) {
                        nv[ncol] = field.add(&nv[ncol], c);
                    }
                }
                if !field.is_zero_vec(&nv) {
                    push(&mut ideal, &mut queue, nb, nv);
                }
            }
        }
    }

    let free = ideal.iter().map(Subspace::free_columns).collect();
    Ok(Quotient { space, ideal, free })
}

impl<F: Field> Quotient<'_, F> {
    fn dims(&self) -> Vec<usize> {
        let mut dims = vec![0; self.space.window + 1];
        for (b, &(w, _, _)) in self.space.blocks.iter().enumerate() {
            dims[w] += self.free[b].len();
        }
        dims
    }
}

/// Builds the truncated algebra `kQ/I` in weights `0..=weight_max`.
pub fn build_algebra<F: Field>(p: &Presentation, field: &F) -> Result<TruncatedAlgebra<F>> {
    build_algebra_with_cap(p, field, DEFAULT_PATH_CAP)
}

pub fn build_algebra_with_cap<F: Field>(
    p: &Presentation,
    field: &F,
    cap: usize,
) -> Result<TruncatedAlgebra<F>> {
    p.validate_homogeneity()?;
    let q = &p.quiver;
    let window = p.limits.weight_max;
    let bound = p.limits.nilpotency_bound;
    let quot = quotient(p, field, window, bound, cap)?;
    let dims = quot.dims();

    let has_weight_zero_arrow = q.arrows.iter().any(|a| a.weight == 0);
    let dims_plus = if has_weight_zero_arrow {
        let check = quotient(p, field, window, bound + 1, cap)?.dims();
        if check != dims {
            return Err(Error::Admissibility(format!(
                "dimensions per weight change from {dims:?} to {check:?} when nilpotency_bound goes from {bound} to {}; \
                 the declared bound does not hold",
                bound + 1
            )));
        }
        Some(check)
    } else {
        None
    };

    // Basis per weight, in canonical order (length, arrow names, source).
    let space = &quot.space;
    let mut per_weight: Vec<Vec<(usize, usize)>> = vec![Vec::new(); window + 1];
    for (b, &(w, _, _)) in space.blocks.iter().enumerate() {
        for &col in &quot.free[b] {
            per_weight[w].push((b, col));
        }
    }
    let key = |&(b, col): &(usize, usize)| {
        let path = &space.columns[b][col];
        (
            path.arrows.len(),
            path.arrows
                .iter()
                .map(|&a| q.arrows[a].name.clone())
                .collect::<Vec<_>>(),
            path.source,
        )
    };
    for list in per_weight.iter_mut() {
        list.sort_by_key(key);
    }
    let mut index_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut basis = Vec::with_capacity(window + 1);
    for (w, list) in per_weight.iter().enumerate() {
        let mut per_t = Vec::with_capacity(list.len());
        for (i, &(b, col)) in list.iter().enumerate() {
            index_of.insert((b, col), i);
            let path = &space.columns[b][col];
            per_t.push(BasisElement {
                label: path_label(q, path),
                source: path.source,
                target: path_target(q, path),
                weight: w,
            });
        }
        basis.push(per_t);
    }
    let idempotents: Vec<usize> = (0..q.num_vertices())
        .map(|v| {
            let (b, col) = space
                .find(&Path { source: v, arrows: vec![] })
                .expect("trivial paths are enumerated");
            index_of[&(b, col)]
        })
        .collect();

    // Normal form of a path: reduce modulo the ideal, read off free columns.
    let normal_form = |path: &Path| -> SparseVec<F::Elem> {
        let Some((b, col)) = space.find(path) else {
            return Vec::new();
        };
        let unit = field.unit_vector(space.columns[b].len(), col);
        let reduced = quot.ideal[b].reduce(&unit);
        let mut out: SparseVec<F::Elem> = quot.free[b]
            .iter()
            .filter(|&&c| !field.is_zero(&reduced[c]))
            .map(|&c| (index_of[&(b, c)], reduced[c].clone()))
            .collect();
        out.sort_by_key(|(k, _)| *k);
        out
    };

    let paths: Vec<Vec<&Path>> = per_weight
        .iter()
        .map(|list| list.iter().map(|&(b, c)| &space.columns[b][c]).collect())
        .collect();
    let mut mult = Vec::with_capacity(window + 1);
    for t1 in 0..=window {
        let row: Vec<Vec<SparseVec<F::Elem>>> = (0..=window - t1)
            .into_par_iter()
            .map(|t2| {
                let mut table = Vec::with_capacity(paths[t1].len() * paths[t2].len());
                for p1 in &paths[t1] {
                    for p2 in &paths[t2] {
                        // p1 * p2 = "p2 then p1".
                        if path_target(q, p2) != p1.source {
                            table.push(Vec::new());
                            continue;
                        }
                        let mut arrows = p2.arrows.clone();
                        arrows.extend_from_slice(&p1.arrows);
                        table.push(normal_form(&Path {
                            source: p2.source,
                            arrows,
                        }));
                    }
                }
                table
            })
            .collect();
        mult.push(row);
    }

    let max_weight = q.max_weight();
    let finite_top = if max_weight == 0 {
        Some(0)
    } else {
        (1..=window)
            .find(|&t0| t0 + max_weight - 1 <= window && (t0..t0 + max_weight).all(|t| dims[t] == 0))
            .map(|t0| (0..t0).rev().find(|&t| dims[t] > 0).unwrap_or(0))
    };

    let mut alg = TruncatedAlgebra {
        field: field.clone(),
        vertex_names: q.vertices.clone(),
        window,
        finite_top,
        generator_weight: max_weight.max(1),
        basis,
        idempotents,
        mult,
        radical: Vec::new(),
        by_source: Vec::new(),
        local_index: Vec::new(),
        provenance: Provenance::Presentation,
        stabilization: None,
    };
    alg.index_sources();
    alg.compute_radical_chain();
    let radical_nilpotency = (0..alg.radical.len())
        .find(|&k| alg.radical(k, 0).is_zero())
        .unwrap_or(alg.radical.len());
    alg.stabilization = Some(Stabilization {
        bound,
        dims_at_bound: dims,
        dims_at_bound_plus_one: dims_plus,
        radical_nilpotency,
    });
    Ok(alg)
}

/// `Gr_J A = ⊕ J^i / J^(i+1)`, graded by radical degree `i`; each basis
/// element remembers its internal degree in the source algebra as `weight`.
#[derive(Clone, Debug)]
pub struct GrAlgebra<F: Field> {
    pub algebra: TruncatedAlgebra<F>,
    /// `bidegree[i][t] = dim (J^i / J^(i+1))_t` of the source algebra.
    pub bidegree: Vec<Vec<usize>>,
    /// Representatives in the source algebra: `reps[i][t]` spans a canonical
    /// complement of `J^(i+1)_t` in `J^i_t`.
    pub reps: Vec<Vec<Subspace<F>>>,
    /// Offsets of the internal-degree blocks inside each `Gr_i`.
    pub offsets: Vec<Vec<usize>>,
}

impl<F: Field> GrAlgebra<F> {
    pub fn dims(&self) -> Vec<usize> {
        self.algebra.dims()
    }

    /// Class of `x ∈ J^i_t` in `Gr_i`, as a coordinate vector.
    pub fn class_of(&self, source: &TruncatedAlgebra<F>, i: usize, t: usize, x: &[F::Elem]) -> Vec<F::Elem> {
        let f = source.field();
        let mut out = f.zeros(self.algebra.dim(i));
        let r = source.radical(i + 1, t).reduce(x);
        if let Some(coords) = self.reps[i][t].coordinates(&r) {
            for (k, c) in coords.into_iter().enumerate() {
                out[self.offsets[i][t] + k] = c;
            }
        }
        out
    }
}

/// Associated graded algebra of `a` with respect to its radical filtration.
pub fn associated_graded<F: Field>(a: &TruncatedAlgebra<F>) -> Result<GrAlgebra<F>> {
    let f = a.field();
    let levels = a.radical_length();
    let reps: Vec<Vec<Subspace<F>>> = (0..levels)
        .map(|i| {
            (0..=a.window())
                .map(|t| {
                    let lower = a.radical(i + 1, t);
                    let vectors: Vec<_> = a.radical(i, t).basis().iter().map(|v| lower.reduce(v)).collect();
                    Subspace::span(f, a.dim(t), vectors)
                })
                .collect()
        })
        .collect();
    let bidegree: Vec<Vec<usize>> = reps
        .iter()
        .map(|per_t| per_t.iter().map(Subspace::dim).collect())
        .collect();
    let top_gr = bidegree
        .iter()
        .rposition(|row| row.iter().any(|&d| d > 0))
        .unwrap_or(0);
    let (window, finite_top) = if a.is_finite() {
        (top_gr, Some(top_gr))
    } else {
        let w = a.window() / a.generator_weight();
        (w, if top_gr < w { Some(top_gr) } else { None })
    };
    let window = window.min(levels.saturating_sub(1));

    let mut offsets = Vec::with_capacity(window + 1);
    let mut dims = Vec::with_capacity(window + 1);
    let mut basis_origin: Vec<Vec<(usize, usize)>> = Vec::with_capacity(window + 1);
    let mut labels = Vec::new();
    let mut weights = Vec::new();
    for i in 0..=window {
        let mut off = Vec::with_capacity(a.window() + 1);
        let mut origin = Vec::new();
        let mut lab = Vec::new();
        let mut wts = Vec::new();
        for t in 0..=a.window() {
            off.push(origin.len());
            for (r, &pivot) in reps[i][t].pivots().iter().enumerate() {
                origin.push((t, r));
                lab.push(a.element(t, pivot).label.clone());
                wts.push(t);
            }
        }
        dims.push(origin.len());
        offsets.push(off);
        basis_origin.push(origin);
        labels.push(lab);
        weights.push(wts);
    }

    let idempotents: Vec<usize> = (0..a.num_vertices())
        .map(|v| {
            let e = a.idempotent(v);
            reps[0][0]
                .pivots()
                .iter()
                .position(|&p| p == e)
                .map(|r| offsets[0][0] + r)
                .ok_or_else(|| Error::Idempotents(format!("idempotent {v} lies in the radical")))
        })
        .collect::<Result<_>>()?;

    let mut products = Vec::new();
    for i1 in 0..=window {
        for i2 in 0..=window - i1 {
            let i = i1 + i2;
            for (x, &(t1, r1)) in basis_origin[i1].iter().enumerate() {
                for (y, &(t2, r2)) in basis_origin[i2].iter().enumerate() {
                    let t = t1 + t2;
                    if t > a.window() {
                        continue;
                    }
                    let z = a.mul_vec(t1, &reps[i1][t1].basis()[r1], t2, &reps[i2][t2].basis()[r2]);
                    if f.is_zero_vec(&z) {
                        continue;
                    }
                    let r = a.radical(i + 1, t).reduce(&z);
                    if f.is_zero_vec(&r) {
                        continue;
                    }
                    let coords = reps[i][t].coordinates(&r).ok_or_else(|| {
                        Error::Dimension(format!("product escapes J^{i} in degree {t}"))
                    })?;
                    let sparse: SparseVec<F::Elem> = coords
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !f.is_zero(c))
                        .map(|(k, c)| (offsets[i][t] + k, c))
                        .collect();
                    products.push(((i1, x, i2, y), sparse));
                }
            }
        }
    }
    let sc = StructureConstants {
        vertex_names: a.vertex_names().to_vec(),
        dims,
        idempotents,
        products,
        labels: Some(labels),
        weights: Some(weights),
        finite_top,
    };
    let algebra = from_structure_constants(f, sc, Provenance::AssociatedGraded)?;
    Ok(GrAlgebra {
        algebra,
        bidegree,
        reps,
        offsets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::presentation::parse_presentation;

    pub(crate) fn presentation(vertices: &str, arrows: &str, rules: &str, d: usize, n: usize) -> Presentation {
        let text = format!(
            "format = 1\n[field]\nkind = \"Q\"\n[quiver]\nvertices = [{vertices}]\narrows = [{arrows}]\n\
             [relations]\nrules = [{rules}]\n[limits]\nweight_max = {d}\nnilpotency_bound = {n}\nhom_max = 3\njpower_max = 4\n"
        );
        parse_presentation(&text).unwrap()
    }

    fn sjodin() -> Presentation {
        presentation(
            r#""v""#,
            r#"{name="x", from="v", to="v", weight=0}, {name="y", from="v", to="v", weight=0}"#,
            r#""x*x + y*y*y", "x*y", "y*x""#,
            1,
            4,
        )
    }

    #[test]
    fn dual_numbers_graded() {
        let p = presentation(r#""v""#, r#"{name="x", from="v", to="v", weight=1}"#, r#""x*x""#, 5, 1);
        let a = build_algebra(&p, &Rationals).unwrap();
        assert_eq!(a.dims(), vec![1, 1, 0, 0, 0, 0]);
        assert_eq!(a.finite_top(), Some(1));
        assert_eq!(a.radical_dims(), vec![vec![1, 1, 0, 0, 0, 0], vec![0, 1, 0, 0, 0, 0], vec![0; 6]]);
    }

    #[test]
    fn sjodin_basis() {
        let a = build_algebra(&sjodin(), &Rationals).unwrap();
        assert_eq!(a.dims(), vec![5, 0]);
        let labels: Vec<_> = a.basis(0).iter().map(|b| b.label.as_str()).collect();
        assert_eq!(labels, vec!["e_v", "x", "y", "y*y", "y*y*y"]);
        // x*x = -y^3
        let q = Rationals;
        assert_eq!(a.product(0, 1, 0, 1), &[(4, q.from_i64(-1))]);
        // x * y^3 = 0
        assert!(a.product(0, 1, 0, 4).is_empty());
        let dims: Vec<usize> = (1..=4).map(|k| a.radical(k, 0).dim()).collect();
        assert_eq!(dims, vec![4, 2, 1, 0]);
        let st = a.stabilization().unwrap();
        assert_eq!(st.radical_nilpotency, 4);
    }

    #[test]
    fn wrong_bound_rejected() {
        let mut p = sjodin();
        p.limits.nilpotency_bound = 3;
        assert!(matches!(build_algebra(&p, &Rationals), Err(Error::Admissibility(_))));
        // k<x> with no relations: the weight-0 radical never dies.
        let free = presentation(r#""v""#, r#"{name="x", from="v", to="v", weight=0}"#, "", 1, 3);
        assert!(matches!(build_algebra(&free, &Rationals), Err(Error::Admissibility(_))));
    }

    #[test]
    fn a2_path_count() {
        let p = presentation(r#""a", "b""#, r#"{name="al", from="a", to="b", weight=1}"#, "", 3, 1);
        let a = build_algebra(&p, &PrimeField::new(7).unwrap()).unwrap();
        assert_eq!(a.dims(), vec![2, 1, 0, 0]);
        assert_eq!(a.finite_top(), Some(1));
        let op = a.opposite();
        assert_eq!(op.element(1, 0).source, 1);
    }

    #[test]
    fn explosion_cap() {
        let p = presentation(
            r#""v""#,
            r#"{name="x", from="v", to="v", weight=1}, {name="y", from="v", to="v", weight=1}"#,
            "",
            20,
            1,
        );
        assert!(matches!(build_algebra_with_cap(&p, &Rationals, 1000), Err(Error::Explosion(_))));
    }

    #[test]
    fn sjodin_associated_graded() {
        let a = build_algebra(&sjodin(), &Rationals).unwrap();
        let gr = associated_graded(&a).unwrap();
        assert_eq!(gr.dims(), vec![1, 2, 1, 1]);
        let g = &gr.algebra;
        // Labels of J/J^2 are x and y; x*x, x*y, y*x vanish in Gr, y^4 = 0.
        let labels: Vec<_> = g.basis(1).iter().map(|b| b.label.as_str()).collect();
        assert_eq!(labels, vec!["x", "y"]);
        assert!(g.product(1, 0, 1, 0).is_empty());
        assert!(g.product(1, 0, 1, 1).is_empty());
        assert!(g.product(1, 1, 1, 0).is_empty());
        assert_eq!(g.product(1, 1, 1, 1).len(), 1);
        assert_eq!(g.product(1, 1, 2, 0).len(), 1);
        assert_eq!(g.finite_top(), Some(3));
    }

    #[test]
    fn truncated_cube_gr() {
        let p = presentation(r#""v""#, r#"{name="x", from="v", to="v", weight=0}"#, r#""x*x*x""#, 1, 3);
        let a = build_algebra(&p, &Rationals).unwrap();
        let gr = associated_graded(&a).unwrap();
        assert_eq!(gr.dims(), vec![1, 1, 1]);
    }

    #[test]
    fn document_round_trip() {
        let a = build_algebra(&sjodin(), &Rationals).unwrap();
        let doc = a.to_document();
        let json = serde_json::to_string(&doc).unwrap();
        let back: AlgebraDocument = serde_json::from_str(&json).unwrap();
        let b = back.into_algebra(&Rationals).unwrap();
        assert_eq!(b.dims(), a.dims());
        assert_eq!(b.radical_dims(), a.radical_dims());
        assert_eq!(b.to_document(), doc);
    }

    #[test]
    fn non_associative_rejected() {
        // Degree 0: e; degree 1: u with u*u = 0, but e*u = u only on the left.
        let q = Rationals;
        let one = q.one();
        let sc = StructureConstants {
            vertex_names: vec!["v".into()],
            dims: vec![1, 1, 1],
            idempotents: vec![0],
            products: vec![
                ((0, 0, 0, 0), vec![(0, one.clone())]),
                ((0, 0, 1, 0), vec![(0, one.clone())]),
                ((1, 0, 0, 0), vec![(0, one.clone())]),
                ((0, 0, 2, 0), vec![(0, one.clone())]),
                ((2, 0, 0, 0), vec![(0, one.clone())]),
                ((1, 0, 1, 0), vec![(0, one.clone())]),
            ],
            labels: None,
            weights: None,
            finite_top: Some(2),
        };
        // associative: u*u = w, fine
        assert!(from_structure_constants(&q, sc.clone(), Provenance::StructureConstants).is_ok());
        let mut bad = sc;
        // e * w = 2w breaks (e*e)*w = e*(e*w)
        bad.products[3] = ((0, 0, 2, 0), vec![(0, q.from_i64(2))]);
        let err = from_structure_constants(&q, bad, Provenance::StructureConstants).unwrap_err();
        assert!(matches!(err, Error::NotAssociative(_) | Error::Idempotents(_)), "{err:?}");
    }
}
