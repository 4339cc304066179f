//! Graded left modules over a truncated algebra.
//!
//! A module is held degree by degree inside a window `0..=window`. Every basis
//! vector of `M_t` lies at a single vertex (`e_v m = m`) and carries a weight
//! label. Two representations share the [`ModuleLike`] interface: general
//! modules with explicit action tables, and free modules `⊕ A e_v(-d)` whose
//! action is read off the algebra's multiplication table.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{GrAlgebra, SparseVec, TruncatedAlgebra};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};

/// Vertex and weight of one basis vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub vertex: usize,
    pub weight: usize,
}

pub trait ModuleLike<F: Field>: Sync {
    fn algebra_arc(&self) -> &Arc<TruncatedAlgebra<F>>;
    fn algebra(&self) -> &TruncatedAlgebra<F> {
        self.algebra_arc()
    }
    fn window(&self) -> usize;
    fn dim(&self, t: usize) -> usize;
    fn slot(&self, t: usize, i: usize) -> Slot;
    /// `b · x` for the algebra basis element `b = (s, j)` and `x ∈ M_t`,
    /// with `t + s <= window`.
    fn act(&self, s: usize, j: usize, t: usize, x: &[F::Elem]) -> Vec<F::Elem>;

    fn dims(&self) -> Vec<usize> {
        (0..=self.window()).map(|t| self.dim(t)).collect()
    }

    fn total_dim(&self) -> usize {
        (0..=self.window()).map(|t| self.dim(t)).sum()
    }

    /// Action of an arbitrary algebra vector of degree `s`.
    fn act_vec(&self, s: usize, a: &[F::Elem], t: usize, x: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.algebra().field();
        let mut out = f.zeros(self.dim(t + s));
        for (j, c) in a.iter().enumerate() {
            if !f.is_zero(c) {
                let y = self.act(s, j, t, x);
                f.add_scaled(&mut out, c, &y);
            }
        }
        out
    }

    /// Keeps only the coordinates at vertex `v` (the action of `e_v`).
    fn project_to_vertex(&self, t: usize, v: usize, x: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.algebra().field();
        x.iter()
            .enumerate()
            .map(|(i, c)| if self.slot(t, i).vertex == v { c.clone() } else { f.zero() })
            .collect()
    }
}

/// A module with explicit action tables: `actions[s][j][t][i]` is the image
/// of basis vector `i` of `M_t` under algebra basis element `(s, j)`.
#[derive(Clone, Debug)]
pub struct GradedModule<F: Field> {
    algebra: Arc<TruncatedAlgebra<F>>,
    window: usize,
    slots: Vec<Vec<Slot>>,
    labels: Vec<Vec<String>>,
    actions: Vec<Vec<Vec<Vec<SparseVec<F::Elem>>>>>,
}

impl<F: Field> ModuleLike<F> for GradedModule<F> {
    fn algebra_arc(&self) -> &Arc<TruncatedAlgebra<F>> {
        &self.algebra
    }
    fn window(&self) -> usize {
        self.window
    }
    fn dim(&self, t: usize) -> usize {
        self.slots.get(t).map_or(0, Vec::len)
    }
    fn slot(&self, t: usize, i: usize) -> Slot {
        self.slots[t][i]
    }
    fn act(&self, s: usize, j: usize, t: usize, x: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.algebra.field();
        let mut out = f.zeros(self.dim(t + s));
        if s >= self.actions.len() || t + s > self.window {
            return out;
        }
        let cols = &self.actions[s][j][t];
        for (i, c) in x.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            for (k, a) in &cols[i] {
                out[*k] = f.add(&out[*k], &f.mul(c, a));
            }
        }
        out
    }
}

/// Module windows must not reach past what the algebra can certify.
fn check_window<F: Field>(alg: &TruncatedAlgebra<F>, window: usize) -> Result<()> {
    if !alg.is_finite() && window > alg.window() {
        return Err(Error::Window(format!(
            "module window {window} exceeds the algebra window {} of an infinite algebra",
            alg.window()
        )));
    }
    Ok(())
}

impl<F: Field> GradedModule<F> {
    /// Builds a module from slot data and an action callback
    /// `(s, j, t, i) -> image of basis vector i of M_t under b_(s,j)`.
    pub fn from_action<A>(
        algebra: Arc<TruncatedAlgebra<F>>,
        window: usize,
        slots: Vec<Vec<Slot>>,
        labels: Vec<Vec<String>>,
        action: A,
    ) -> Result<Self>
    where
        A: Fn(usize, usize, usize, usize) -> SparseVec<F::Elem> + Sync,
    {
        check_window(&algebra, window)?;
        if slots.len() != window + 1 || labels.len() != window + 1 {
            return Err(Error::Module("slot table does not match the window".into()));
        }
        let smax = window.min(algebra.window());
        let actions: Vec<Vec<Vec<Vec<SparseVec<F::Elem>>>>> = (0..=smax)
            .into_par_iter()
            .map(|s| {
                (0..algebra.dim(s))
                    .map(|j| {
                        (0..=window - s)
                            .map(|t| (0..slots[t].len()).map(|i| action(s, j, t, i)).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(GradedModule {
            algebra,
            window,
            slots,
            labels,
            actions,
        })
    }

    pub fn labels(&self, t: usize) -> &[String] {
        &self.labels[t]
    }

    pub fn is_zero(&self) -> bool {
        self.slots.iter().all(Vec::is_empty)
    }

    /// Lowest nonzero degree `l(M)`.
    pub fn lowest_degree(&self) -> Option<usize> {
        self.slots.iter().position(|s| !s.is_empty())
    }

    /// Highest nonzero degree.
    pub fn highest_degree(&self) -> Option<usize> {
        self.slots.iter().rposition(|s| !s.is_empty())
    }

    /// The zero module.
    pub fn zero(algebra: Arc<TruncatedAlgebra<F>>, window: usize) -> Result<Self> {
        let slots = vec![Vec::new(); window + 1];
        let labels = vec![Vec::new(); window + 1];
        Self::from_action(algebra, window, slots, labels, |_, _, _, _| Vec::new())
    }

    /// The simple module at vertex `v`, concentrated in degree `shift`.
    pub fn simple(algebra: Arc<TruncatedAlgebra<F>>, v: usize, shift: usize, window: usize) -> Result<Self> {
        if v >= algebra.num_vertices() {
            return Err(Error::Module(format!("no vertex {v}")));
        }
        if shift > window {
            return Err(Error::Window(format!("shift {shift} is outside the window {window}")));
        }
        let mut slots = vec![Vec::new(); window + 1];
        let mut labels = vec![Vec::new(); window + 1];
        slots[shift].push(Slot { vertex: v, weight: shift });
        labels[shift].push(format!("S_{}", algebra.vertex_names()[v]));
        let one = algebra.field().one();
        let e = algebra.idempotent(v);
        Self::from_action(algebra, window, slots, labels, move |s, j, _, _| {
            if s == 0 && j == e {
                vec![(0, one.clone())]
            } else {
                Vec::new()
            }
        })
    }

    /// `S = A/J`: all simples in degree 0.
    pub fn semisimple_top(algebra: Arc<TruncatedAlgebra<F>>, window: usize) -> Result<Self> {
        let n = algebra.num_vertices();
        let mut slots = vec![Vec::new(); window + 1];
        let mut labels = vec![Vec::new(); window + 1];
        for v in 0..n {
            slots[0].push(Slot { vertex: v, weight: 0 });
            labels[0].push(format!("S_{}", algebra.vertex_names()[v]));
        }
        let one = algebra.field().one();
        let idem: Vec<usize> = algebra.idempotents().to_vec();
        Self::from_action(algebra, window, slots, labels, move |s, j, _, i| {
            if s == 0 && idem[i] == j {
                vec![(i, one.clone())]
            } else {
                Vec::new()
            }
        })
    }

    /// `A` as a left module over itself.
    pub fn regular(algebra: Arc<TruncatedAlgebra<F>>, window: usize) -> Result<Self> {
        let slots = (0..=window)
            .map(|t| {
                algebra
                    .basis(t)
                    .iter()
                    .map(|b| Slot { vertex: b.target, weight: b.weight })
                    .collect()
            })
            .collect();
        let labels = (0..=window)
            .map(|t| algebra.basis(t).iter().map(|b| b.label.clone()).collect())
            .collect();
        let alg = algebra.clone();
        Self::from_action(algebra, window, slots, labels, move |s, j, t, i| {
            alg.product(s, j, t, i).to_vec()
        })
    }

    /// `A e_v (-shift)` as a general module.
    pub fn projective(algebra: Arc<TruncatedAlgebra<F>>, v: usize, shift: usize, window: usize) -> Result<Self> {
        let free = FreeModule::new(
            algebra.clone(),
            window,
            vec![Generator { vertex: v, degree: shift, weight: shift }],
        )?;
        free.to_graded()
    }

    /// Checks the module axioms on every in-window triple: idempotents act as
    /// the vertex projections and `(ab)x = a(bx)`.
    pub fn validate(&self) -> Result<()> {
        let alg = &self.algebra;
        let f = alg.field();
        for t in 0..=self.window {
            for i in 0..self.dim(t) {
                let x = f.unit_vector(self.dim(t), i);
                for v in 0..alg.num_vertices() {
                    let y = self.act(0, alg.idempotent(v), t, &x);
                    let expect = if self.slot(t, i).vertex == v { x.clone() } else { f.zeros(x.len()) };
                    if y != expect {
                        return Err(Error::Module(format!("idempotent {v} misbehaves on degree {t} vector {i}")));
                    }
                }
                for s2 in 0..=(self.window - t).min(alg.window()) {
                    for b in 0..alg.dim(s2) {
                        let bx = self.act(s2, b, t, &x);
                        for s1 in 0..=(self.window - t - s2).min(alg.window() - s2) {
                            for a in 0..alg.dim(s1) {
                                let lhs = self.act(s1, a, t + s2, &bx);
                                let ab = {
                                    let mut v = f.zeros(alg.dim(s1 + s2));
                                    for (k, c) in alg.product(s1, a, s2, b) {
                                        v[*k] = c.clone();
                                    }
                                    v
                                };
                                let rhs = self.act_vec(s1 + s2, &ab, t, &x);
                                if lhs != rhs {
                                    return Err(Error::Module(format!(
                                        "action is not associative at ({}, {}, degree {t} vector {i})",
                                        alg.element(s1, a).label,
                                        alg.element(s2, b).label
                                    )));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The submodule spanned degreewise by `u`, with RREF basis.
    pub fn submodule(&self, u: &[Subspace<F>]) -> Result<Self> {
        let f = self.algebra.field().clone();
        for t in 0..=self.window {
            for s in 0..=(self.window - t).min(self.algebra.window()) {
                for j in 0..self.algebra.dim(s) {
                    for x in u[t].basis() {
                        if !u[t + s].contains(&self.act(s, j, t, x)) {
                            return Err(Error::Module("subspace family is not closed under the action".into()));
                        }
                    }
                }
            }
        }
        let slots = (0..=self.window)
            .map(|t| u[t].pivots().iter().map(|&p| self.slot(t, p)).collect())
            .collect();
        let labels = (0..=self.window)
            .map(|t| u[t].pivots().iter().map(|&p| self.labels[t][p].clone()).collect())
            .collect();
        Self::from_action(self.algebra.clone(), self.window, slots, labels, |s, j, t, i| {
            let y = self.act(s, j, t, &u[t].basis()[i]);
            let coords = u[t + s].coordinates(&y).expect("closed under the action");
            sparse(&f, coords)
        })
    }

    /// `M / U` with basis the unit vectors at the free columns of `U`.
    pub fn quotient(&self, u: &[Subspace<F>]) -> Result<Self> {
        let f = self.algebra.field().clone();
        let free: Vec<Vec<usize>> = u.iter().map(Subspace::free_columns).collect();
        let slots = (0..=self.window)
            .map(|t| free[t].iter().map(|&c| self.slot(t, c)).collect())
            .collect();
        let labels = (0..=self.window)
            .map(|t| free[t].iter().map(|&c| self.labels[t][c].clone()).collect())
            .collect();
        Self::from_action(self.algebra.clone(), self.window, slots, labels, |s, j, t, i| {
            let x = f.unit_vector(self.dim(t), free[t][i]);
            let y = u[t + s].reduce(&self.act(s, j, t, &x));
            free[t + s]
                .iter()
                .enumerate()
                .filter(|(_, &c)| !f.is_zero(&y[c]))
                .map(|(k, &c)| (k, y[c].clone()))
                .collect()
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.window != other.window {
            return Err(Error::Window("direct sum of modules with different windows".into()));
        }
        let slots = (0..=self.window)
            .map(|t| self.slots[t].iter().chain(&other.slots[t]).copied().collect())
            .collect();
        let labels = (0..=self.window)
            .map(|t| self.labels[t].iter().chain(&other.labels[t]).cloned().collect())
            .collect();
        Self::from_action(self.algebra.clone(), self.window, slots, labels, |s, j, t, i| {
            let n = self.dim(t);
            if i < n {
                if s >= self.actions.len() {
                    return Vec::new();
                }
                self.actions[s][j][t][i].clone()
            } else {
                if s >= other.actions.len() {
                    return Vec::new();
                }
                let off = self.dim(t + s);
                other.actions[s][j][t][i - n]
                    .iter()
                    .map(|(k, c)| (k + off, c.clone()))
                    .collect()
            }
        })
    }

    /// `M(-s)`: every degree moves up by `s`, the window grows by `s`.
    pub fn shift(&self, s: usize) -> Result<Self> {
        let window = self.window + s;
        let mut slots = vec![Vec::new(); s];
        let mut labels = vec![Vec::new(); s];
        for t in 0..=self.window {
            slots.push(
                self.slots[t]
                    .iter()
                    .map(|sl| Slot { vertex: sl.vertex, weight: sl.weight + s })
                    .collect(),
            );
            labels.push(self.labels[t].clone());
        }
        Self::from_action(self.algebra.clone(), window, slots, labels, |a, j, t, i| {
            if t < s || a >= self.actions.len() || t - s + a > self.window {
                return Vec::new();
            }
            self.actions[a][j][t - s][i].clone()
        })
    }

    /// Restricts to degrees `0..=window` (a quotient by the part above).
    pub fn truncate(&self, window: usize) -> Result<Self> {
        let window = window.min(self.window);
        let slots = self.slots[..=window].to_vec();
        let labels = self.labels[..=window].to_vec();
        Self::from_action(self.algebra.clone(), window, slots, labels, |s, j, t, i| {
            self.actions[s][j][t][i].clone()
        })
    }

    /// The linear dual `D(Λ) = Hom_k(Λ, k)` of a finite algebra as a left
    /// module: `(a·φ)(x) = φ(x a)`. The dual of a degree-`d` element sits in
    /// degree `T - d`, where `T` is the algebra's top degree.
    pub fn linear_dual(algebra: Arc<TruncatedAlgebra<F>>) -> Result<Self> {
        let top = algebra.finite_top().ok_or_else(|| {
            Error::Precondition("the linear dual needs a finite-dimensional algebra".into())
        })?;
        let slots = (0..=top)
            .map(|t| {
                algebra
                    .basis(top - t)
                    .iter()
                    .map(|b| Slot { vertex: b.source, weight: b.weight })
                    .collect()
            })
            .collect();
        let labels = (0..=top)
            .map(|t| algebra.basis(top - t).iter().map(|b| format!("D({})", b.label)).collect())
            .collect();
        let alg = algebra.clone();
        Self::from_action(algebra, top, slots, labels, move |s, a, t, i| {
            // δ_c with c of degree top - t; a·δ_c = Σ_d coeff_c(d a) δ_d, deg d = deg c - s.
            let dc = top - t;
            if s > dc {
                return Vec::new();
            }
            let dd = dc - s;
            let mut out = Vec::new();
            for d in 0..alg.dim(dd) {
                for (k, c) in alg.product(dd, d, s, a) {
                    if *k == i {
                        out.push((d, c.clone()));
                    }
                }
            }
            out
        })
    }

    /// `J M` as a submodule.
    pub fn radical_submodule(&self) -> Result<Self> {
        let full: Vec<Subspace<F>> = (0..=self.window)
            .map(|t| Subspace::full(self.algebra.field(), self.dim(t)))
            .collect();
        self.submodule(&radical_image(self, &full))
    }

    /// `M / J M`.
    pub fn top_quotient(&self) -> Result<Self> {
        let full: Vec<Subspace<F>> = (0..=self.window)
            .map(|t| Subspace::full(self.algebra.field(), self.dim(t)))
            .collect();
        self.quotient(&radical_image(self, &full))
    }
}

fn sparse<F: Field>(f: &F, v: Vec<F::Elem>) -> SparseVec<F::Elem> {
    v.into_iter()
        .enumerate()
        .filter(|(_, c)| !f.is_zero(c))
        .collect()
}

/// `(J U)_t = span { b u : b ∈ J_s, u ∈ U_(t-s) }` for a submodule family `U`.
pub fn radical_image<F: Field, M: ModuleLike<F>>(m: &M, u: &[Subspace<F>]) -> Vec<Subspace<F>> {
    let alg = m.algebra();
    let f = alg.field();
    (0..=m.window())
        .into_par_iter()
        .map(|t| {
            let mut acc = Subspace::zero(f, m.dim(t));
            for s in 0..=t.min(alg.window()) {
                for j in alg.radical_basis(s) {
                    for x in u[t - s].basis() {
                        acc.insert(m.act(s, j, t - s, x));
                    }
                }
            }
            acc
        })
        .collect()
}

/// Radical layers `J^k M` for `k = 0..=kmax`.
pub fn radical_layers<F: Field, M: ModuleLike<F>>(m: &M, kmax: usize) -> Vec<Vec<Subspace<F>>> {
    let f = m.algebra().field();
    let mut layers = vec![(0..=m.window())
        .map(|t| Subspace::full(f, m.dim(t)))
        .collect::<Vec<_>>()];
    for _ in 0..kmax {
        let next = radical_image(m, layers.last().unwrap());
        layers.push(next);
    }
    layers
}

/// One generator `A e_vertex (-degree)` of a free module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Generator {
    pub vertex: usize,
    pub degree: usize,
    pub weight: usize,
}

/// `⊕_g A e_(v_g) (-d_g)` inside a window. Coordinates of `P_t` run over the
/// generators in order, each block listing the algebra basis elements of
/// degree `t - d_g` with source `v_g`.
#[derive(Clone, Debug)]
pub struct FreeModule<F: Field> {
    algebra: Arc<TruncatedAlgebra<F>>,
    window: usize,
    gens: Vec<Generator>,
    /// `offsets[t][g]` = first coordinate of generator `g` in `P_t`; the last
    /// entry is `dim P_t`.
    offsets: Vec<Vec<usize>>,
}

impl<F: Field> FreeModule<F> {
    pub fn new(algebra: Arc<TruncatedAlgebra<F>>, window: usize, gens: Vec<Generator>) -> Result<Self> {
        check_window(&algebra, window)?;
        let offsets = (0..=window)
            .map(|t| {
                let mut off = Vec::with_capacity(gens.len() + 1);
                let mut acc = 0;
                for g in &gens {
                    off.push(acc);
                    if t >= g.degree {
                        acc += algebra.by_source(t - g.degree, g.vertex).len();
                    }
                }
                off.push(acc);
                off
            })
            .collect();
        Ok(FreeModule {
            algebra,
            window,
            gens,
            offsets,
        })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// Coordinate of `c · g` in `P_(d_g + deg c)`.
    pub fn coordinate(&self, g: usize, s: usize, c: usize) -> usize {
        self.offsets[self.gens[g].degree + s][g] + self.algebra.local_index(s, c)
    }

    /// Generator and algebra element behind coordinate `i` of `P_t`.
    pub fn decode(&self, t: usize, i: usize) -> (usize, usize, usize) {
        let off = &self.offsets[t];
        let g = off.partition_point(|&o| o <= i) - 1;
        let s = t - self.gens[g].degree;
        let c = self.algebra.by_source(s, self.gens[g].vertex)[i - off[g]];
        (g, s, c)
    }

    /// The generator itself, as a vector of `P_(d_g)`.
    pub fn generator_vector(&self, g: usize) -> Vec<F::Elem> {
        let gen = self.gens[g];
        let f = self.algebra.field();
        let mut v = f.zeros(self.dim(gen.degree));
        v[self.coordinate(g, 0, self.algebra.idempotent(gen.vertex))] = f.one();
        v
    }

    /// `(J^k P)_t = ⊕_g (J^k e_(v_g))_(t - d_g)`.
    pub fn radical_power(&self, k: usize, t: usize) -> Subspace<F> {
        let alg = &self.algebra;
        let f = alg.field();
        let n = self.dim(t);
        let mut rows = Vec::new();
        for (g, gen) in self.gens.iter().enumerate() {
            if t < gen.degree {
                continue;
            }
            let s = t - gen.degree;
            if s > alg.window() {
                continue;
            }
            let space = alg.radical(k, s);
            for (row, &p) in space.basis().iter().zip(space.pivots()) {
                if alg.element(s, p).source != gen.vertex {
                    continue;
                }
                let mut v = f.zeros(n);
                for (local, &c) in alg.by_source(s, gen.vertex).iter().enumerate() {
                    v[self.offsets[t][g] + local] = row[c].clone();
                }
                rows.push(v);
            }
        }
        Subspace::span(f, n, rows)
    }

    /// The same module with explicit action tables.
    pub fn to_graded(&self) -> Result<GradedModule<F>> {
        let slots = (0..=self.window)
            .map(|t| (0..self.dim(t)).map(|i| self.slot(t, i)).collect())
            .collect();
        let labels = (0..=self.window)
            .map(|t| {
                (0..self.dim(t))
                    .map(|i| {
                        let (g, s, c) = self.decode(t, i);
                        format!("{}·g{g}", self.algebra.element(s, c).label)
                    })
                    .collect()
            })
            .collect();
        let f = self.algebra.field().clone();
        GradedModule::from_action(self.algebra.clone(), self.window, slots, labels, |s, j, t, i| {
            let x = f.unit_vector(self.dim(t), i);
            sparse(&f, self.act(s, j, t, &x))
        })
    }

    /// Matrix of the module map sending generator `g` to `images[g] ∈ N_(d_g)`,
    /// in degree `t`.
    pub fn map_matrix<N: ModuleLike<F>>(&self, target: &N, images: &[Vec<F::Elem>], t: usize) -> Matrix<F> {
        let f = self.algebra.field();
        let cols: Vec<Vec<F::Elem>> = (0..self.dim(t))
            .map(|i| {
                let (g, s, c) = self.decode(t, i);
                target.act(s, c, self.gens[g].degree, &images[g])
            })
            .collect();
        Matrix::from_columns(f, target.dim(t), &cols)
    }

    /// Image of `x ∈ P_t` under the map with generator images `images`.
    pub fn apply_map<N: ModuleLike<F>>(&self, target: &N, images: &[Vec<F::Elem>], t: usize, x: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.algebra.field();
        let mut out = f.zeros(target.dim(t));
        for (i, c) in x.iter().enumerate() {
            if f.is_zero(c) {
                continue;
            }
            let (g, s, a) = self.decode(t, i);
            let y = target.act(s, a, self.gens[g].degree, &images[g]);
            f.add_scaled(&mut out, c, &y);
        }
        out
    }
}

impl<F: Field> ModuleLike<F> for FreeModule<F> {
    fn algebra_arc(&self) -> &Arc<TruncatedAlgebra<F>> {
        &self.algebra
    }
    fn window(&self) -> usize {
        self.window
    }
    fn dim(&self, t: usize) -> usize {
        self.offsets.get(t).map_or(0, |o| *o.last().unwrap())
    }
    fn slot(&self, t: usize, i: usize) -> Slot {
        let (g, s, c) = self.decode(t, i);
        let b = self.algebra.element(s, c);
        Slot {
            vertex: b.target,
            weight: self.gens[g].weight + b.weight,
        }
    }
    fn act(&self, s: usize, j: usize, t: usize, x: &[F::Elem]) -> Vec<F::Elem> {
        let alg = &self.algebra;
        let f = alg.field();
        let tt = t + s;
        let mut out = f.zeros(self.dim(tt));
        if tt > self.window {
            return out;
        }
        let b_source = alg.element(s, j).source;
        for (g, gen) in self.gens.iter().enumerate() {
            if t < gen.degree {
                continue;
            }
            let d = t - gen.degree;
            let lo = self.offsets[t][g];
            for (local, &c) in alg.by_source(d, gen.vertex).iter().enumerate() {
                let xc = &x[lo + local];
                if f.is_zero(xc) || alg.element(d, c).target != b_source {
                    continue;
                }
                for (m, coef) in alg.product(s, j, d, c) {
                    let k = self.offsets[tt][g] + alg.local_index(d + s, *m);
                    out[k] = f.add(&out[k], &f.mul(xc, coef));
                }
            }
        }
        out
    }
}

/// Top generators of a submodule family `U` of `M`: per degree, the RREF
/// basis of the canonical complement of `(JU)_t` in `U_t`.
pub fn top_generators<F: Field, M: ModuleLike<F>>(
    m: &M,
    u: &[Subspace<F>],
    ju: &[Subspace<F>],
) -> Vec<(Generator, Vec<F::Elem>)> {
    let f = m.algebra().field();
    let mut out = Vec::new();
    for t in 0..=m.window() {
        let reduced: Vec<_> = u[t].basis().iter().map(|x| ju[t].reduce(x)).collect();
        let top = Subspace::span(f, m.dim(t), reduced);
        for (row, &p) in top.basis().iter().zip(top.pivots()) {
            let slot = m.slot(t, p);
            out.push((
                Generator {
                    vertex: slot.vertex,
                    degree: t,
                    weight: slot.weight,
                },
                row.clone(),
            ));
        }
    }
    out
}

/// A graded projective cover `π: P → U` of a submodule family of `M`.
#[derive(Clone, Debug)]
pub struct Cover<F: Field> {
    pub projective: FreeModule<F>,
    /// `π(g)` for each generator, as a vector of `M_(d_g)`.
    pub images: Vec<Vec<F::Elem>>,
    /// `π` degree by degree.
    pub matrices: Vec<Matrix<F>>,
    /// `Ker π` degree by degree.
    pub kernel: Vec<Subspace<F>>,
}

/// Projective cover of the submodule `U ⊆ M`, with the surjectivity and
/// minimality (`Ker π ⊆ JP`) certificates checked in every degree.
pub fn cover_of<F: Field, M: ModuleLike<F>>(m: &M, u: &[Subspace<F>]) -> Result<Cover<F>> {
    let ju = radical_image(m, u);
    let gens = top_generators(m, u, &ju);
    let (generators, images): (Vec<Generator>, Vec<Vec<F::Elem>>) = gens.into_iter().unzip();
    let projective = FreeModule::new(m.algebra_arc().clone(), m.window(), generators)?;
    let checks: Vec<Result<(Matrix<F>, Subspace<F>)>> = (0..=m.window())
        .into_par_iter()
        .map(|t| {
            let mat = projective.map_matrix(m, &images, t);
            if mat.image() != u[t] {
                return Err(Error::Window(format!(
                    "cover is not onto in degree {t}: the top lies outside the window"
                )));
            }
            let kernel = mat.kernel();
            let jp = projective.radical_power(1, t);
            if !kernel.is_subspace_of(&jp) {
                return Err(Error::Module(format!("cover is not minimal in degree {t}")));
            }
            Ok((mat, kernel))
        })
        .collect();
    let mut matrices = Vec::new();
    let mut kernel = Vec::new();
    for c in checks {
        let (m, k) = c?;
        matrices.push(m);
        kernel.push(k);
    }
    Ok(Cover {
        projective,
        images,
        matrices,
        kernel,
    })
}

/// Projective cover of a whole module.
pub fn projective_cover<F: Field, M: ModuleLike<F>>(m: &M) -> Result<Cover<F>> {
    if m.total_dim() == 0 {
        return Err(Error::Module("the zero module has no projective cover".into()));
    }
    let f = m.algebra().field();
    let full: Vec<Subspace<F>> = (0..=m.window()).map(|t| Subspace::full(f, m.dim(t))).collect();
    cover_of(m, &full)
}

/// Kernel of a degree-preserving module map given by per-degree matrices, as
/// a submodule of the source together with its inclusion. The map is checked
/// against the actions.
pub fn kernel_module<F: Field>(
    source: &GradedModule<F>,
    target: &GradedModule<F>,
    matrices: &[Matrix<F>],
) -> Result<(GradedModule<F>, Vec<Matrix<F>>)> {
    let alg = source.algebra();
    let f = alg.field();
    for t in 0..=source.window() {
        for s in 0..=(source.window() - t).min(alg.window()) {
            for j in 0..alg.dim(s) {
                for i in 0..source.dim(t) {
                    let x = f.unit_vector(source.dim(t), i);
                    let lhs = matrices[t + s].mul_vec(&source.act(s, j, t, &x));
                    let rhs = target.act(s, j, t, &matrices[t].mul_vec(&x));
                    if lhs != rhs {
                        return Err(Error::Module(format!(
                            "map does not commute with {} in degree {t}",
                            alg.element(s, j).label
                        )));
                    }
                }
            }
        }
    }
    let kernels: Vec<Subspace<F>> = matrices.iter().map(Matrix::kernel).collect();
    let inclusion = kernels
        .iter()
        .map(|k| Matrix::from_columns(f, k.ambient_dim(), k.basis()))
        .collect();
    Ok((source.submodule(&kernels)?, inclusion))
}

/// `Gr_J M = ⊕ J^i M / J^(i+1) M` as a module over `Gr_J A`, graded by `i`.
pub fn associated_graded_module<F: Field>(
    m: &GradedModule<F>,
    gr: &GrAlgebra<F>,
    gr_arc: Arc<TruncatedAlgebra<F>>,
) -> Result<(GradedModule<F>, Vec<Vec<usize>>)> {
    let f = m.algebra().field().clone();
    let mut layers = vec![(0..=m.window()).map(|t| Subspace::full(&f, m.dim(t))).collect::<Vec<_>>()];
    while layers.last().unwrap().iter().any(|s| !s.is_zero()) {
        let next = radical_image(m, layers.last().unwrap());
        layers.push(next);
    }
    let levels = layers.len() - 1;
    let reps: Vec<Vec<Subspace<F>>> = (0..levels)
        .map(|i| {
            (0..=m.window())
                .map(|t| {
                    let v: Vec<_> = layers[i][t].basis().iter().map(|x| layers[i + 1][t].reduce(x)).collect();
                    Subspace::span(&f, m.dim(t), v)
                })
                .collect()
        })
        .collect();
    let bidegree: Vec<Vec<usize>> = reps.iter().map(|r| r.iter().map(Subspace::dim).collect()).collect();
    let window = levels.saturating_sub(1);
    if !gr_arc.is_finite() && window > gr_arc.window() {
        return Err(Error::Window("Gr_J M needs more radical degrees than Gr_J A holds".into()));
    }
    let mut origin: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut offsets: Vec<Vec<usize>> = Vec::new();
    let mut slots = Vec::new();
    let mut labels = Vec::new();
    for i in 0..=window {
        let mut o = Vec::new();
        let mut off = Vec::new();
        let mut sl = Vec::new();
        let mut lab = Vec::new();
        for t in 0..=m.window() {
            off.push(o.len());
            if i < levels {
                for (r, &p) in reps[i][t].pivots().iter().enumerate() {
                    o.push((t, r));
                    let slot = m.slot(t, p);
                    sl.push(Slot { vertex: slot.vertex, weight: t });
                    lab.push(m.labels(t)[p].clone());
                }
            }
        }
        origin.push(o);
        offsets.push(off);
        slots.push(sl);
        labels.push(lab);
    }
    let module = GradedModule::from_action(gr_arc.clone(), window, slots, labels, |s, j, i, x| {
        // Gr element (s, j) comes from (t1, r1) in J^s/J^(s+1) of A.
        let (t1, r1) = {
            let off = &gr.offsets[s];
            let t1 = off.partition_point(|&o| o <= j) - 1;
            (t1, j - off[t1])
        };
        let a = &gr.reps[s][t1].basis()[r1];
        let (t2, r2) = origin[i][x];
        let t = t1 + t2;
        if t > m.window() || i + s > window || i + s >= levels {
            return Vec::new();
        }
        let y = m.act_vec(t1, a, t2, &reps[i][t2].basis()[r2]);
        let y = layers[i + s + 1][t].reduce(&y);
        let coords = reps[i + s][t].coordinates(&y).expect("product stays in the layer");
        coords
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !f.is_zero(c))
            .map(|(k, c)| (offsets[i + s][t] + k, c))
            .collect()
    })?;
    Ok((module, bidegree))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{associated_graded, build_algebra};
    use crate::field::Rationals;
    use crate::presentation::parse_presentation;

    fn alg(vertices: &str, arrows: &str, rules: &str, d: usize, n: usize) -> Arc<TruncatedAlgebra<Rationals>> {
        let text = format!(
            "format = 1\n[field]\nkind = \"Q\"\n[quiver]\nvertices = [{vertices}]\narrows = [{arrows}]\n\
             [relations]\nrules = [{rules}]\n[limits]\nweight_max = {d}\nnilpotency_bound = {n}\nhom_max = 3\njpower_max = 4\n"
        );
        Arc::new(build_algebra(&parse_presentation(&text).unwrap(), &Rationals).unwrap())
    }

    fn sjodin() -> Arc<TruncatedAlgebra<Rationals>> {
        alg(
            r#""v""#,
            r#"{name="x", from="v", to="v", weight=0}, {name="y", from="v", to="v", weight=0}"#,
            r#""x*x + y*y*y", "x*y", "y*x""#,
            1,
            4,
        )
    }

    fn dual_numbers() -> Arc<TruncatedAlgebra<Rationals>> {
        alg(r#""v""#, r#"{name="x", from="v", to="v", weight=1}"#, r#""x*x""#, 4, 1)
    }

    fn a2() -> Arc<TruncatedAlgebra<Rationals>> {
        alg(r#""a", "b""#, r#"{name="al", from="a", to="b", weight=1}"#, "", 3, 1)
    }

    #[test]
    fn simple_modules() {
        let a = a2();
        let s = GradedModule::simple(a.clone(), 0, 0, 2).unwrap();
        assert_eq!(s.dims(), vec![1, 0, 0]);
        assert_eq!(s.slot(0, 0).vertex, 0);
        s.validate().unwrap();
        let s2 = GradedModule::simple(a.clone(), 1, 2, 3).unwrap();
        assert_eq!(s2.dims(), vec![0, 0, 1, 0]);
        let top = GradedModule::semisimple_top(a.clone(), 1).unwrap();
        assert_eq!(top.dim(0), 2);
        assert!(top.radical_submodule().unwrap().is_zero());
    }

    #[test]
    fn free_module_matches_general() {
        let a = a2();
        let p = FreeModule::new(
            a.clone(),
            3,
            vec![
                Generator { vertex: 0, degree: 0, weight: 0 },
                Generator { vertex: 1, degree: 1, weight: 1 },
            ],
        )
        .unwrap();
        assert_eq!(p.dims(), vec![1, 2, 0, 0]);
        let g = p.to_graded().unwrap();
        g.validate().unwrap();
        assert_eq!(p.radical_power(1, 1).dim(), 1);
    }

    #[test]
    fn radical_layers_sjodin() {
        let a = sjodin();
        let m = GradedModule::regular(a.clone(), 0).unwrap();
        m.validate().unwrap();
        let layers = radical_layers(&m, 4);
        let dims: Vec<usize> = layers.iter().map(|l| l[0].dim()).collect();
        assert_eq!(dims, vec![5, 4, 2, 1, 0]);
        let j = m.radical_submodule().unwrap();
        let jl: Vec<usize> = radical_layers(&j, 3).iter().map(|l| l[0].dim()).collect();
        assert_eq!(jl, vec![4, 2, 1, 0]);
    }

    #[test]
    fn covers() {
        let a = sjodin();
        let m = GradedModule::regular(a.clone(), 0).unwrap();
        let j = m.radical_submodule().unwrap();
        let cover = projective_cover(&j).unwrap();
        assert_eq!(cover.projective.generators().len(), 2);

        let d = dual_numbers();
        let reg = GradedModule::regular(d.clone(), 4).unwrap();
        let jd = reg.radical_submodule().unwrap();
        let c = projective_cover(&jd).unwrap();
        assert_eq!(c.projective.generators(), &[Generator { vertex: 0, degree: 1, weight: 1 }]);

        let s = GradedModule::simple(d.clone(), 0, 0, 4).unwrap();
        let c = projective_cover(&s).unwrap();
        assert_eq!(c.projective.generators().len(), 1);
        let kdims: Vec<usize> = c.kernel.iter().map(Subspace::dim).collect();
        assert_eq!(kdims, vec![0, 1, 0, 0, 0]);

        let z = GradedModule::zero(d, 2).unwrap();
        assert!(projective_cover(&z).is_err());
    }

    #[test]
    fn kernel_of_projection() {
        let d = dual_numbers();
        let reg = GradedModule::regular(d.clone(), 4).unwrap();
        let s = GradedModule::simple(d.clone(), 0, 0, 4).unwrap();
        let c = projective_cover(&s).unwrap();
        let p = c.projective.to_graded().unwrap();
        let (k, inc) = kernel_module(&p, &s, &c.matrices).unwrap();
        assert_eq!(k.dims(), vec![0, 1, 0, 0, 0]);
        assert_eq!(inc[1].cols(), 1);
        assert!(c.matrices[1].mul(&inc[1]).is_zero());
        let id: Vec<Matrix<Rationals>> = (0..=4).map(|t| Matrix::identity(&Rationals, reg.dim(t))).collect();
        assert!(kernel_module(&reg, &reg, &id).unwrap().0.is_zero());
    }

    #[test]
    fn linear_dual_of_dual_numbers() {
        let d = dual_numbers();
        let dual = GradedModule::linear_dual(d.clone()).unwrap();
        dual.validate().unwrap();
        assert_eq!(dual.dims(), vec![1, 1]);
        let c = projective_cover(&dual).unwrap();
        assert!(c.kernel.iter().all(Subspace::is_zero));
    }

    #[test]
    fn gr_of_regular_sjodin() {
        let a = sjodin();
        let gr = associated_graded(&a).unwrap();
        let arc = Arc::new(gr.algebra.clone());
        let m = GradedModule::regular(a.clone(), 0).unwrap();
        let (g, bideg) = associated_graded_module(&m, &gr, arc).unwrap();
        assert_eq!(g.dims(), vec![1, 2, 1, 1]);
        assert_eq!(bideg.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![1, 2, 1, 1]);
        g.validate().unwrap();
        let s = GradedModule::semisimple_top(a, 0).unwrap();
        let (gs, _) = associated_graded_module(&s, &gr, Arc::new(gr.algebra.clone())).unwrap();
        assert_eq!(gs.dims(), vec![1]);
    }

    #[test]
    fn shift_and_sum() {
        let d = dual_numbers();
        let s = GradedModule::simple(d.clone(), 0, 0, 2).unwrap();
        let sh = s.shift(2).unwrap();
        assert_eq!(sh.dims(), vec![0, 0, 1, 0, 0]);
        let reg = GradedModule::regular(d.clone(), 2).unwrap();
        let sum = reg.direct_sum(&GradedModule::simple(d, 0, 1, 2).unwrap()).unwrap();
        sum.validate().unwrap();
        assert_eq!(sum.dims(), vec![1, 2, 0]);
    }
}
