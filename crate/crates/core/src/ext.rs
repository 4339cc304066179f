//! Ext groups `Ext^n(M, S)`, Yoneda products by chain-map lifting, the Ext
//! algebra `E(A) = Ext(S, S)` and the comparisons built on it.
//!
//! A minimal resolution makes `Hom(P_n, S)` equal to `Ext^n(M, S)`, so the
//! classes of degree `n` are the generators of `P_n`: class `g` is the
//! functional reading off the top coefficient of `g`. To multiply class `a`
//! (a generator of `P_i` at vertex `v`) by `b ∈ Ext^j(S_v, S)` the projection
//! `P_i → S_v` picked out by `a` is lifted to a chain map into the resolution
//! of `S_v`, and `b` is read off at level `j`.

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{associated_graded, from_structure_constants, Provenance, SparseVec, StructureConstants, TruncatedAlgebra};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Subspace;
use crate::module::{associated_graded_module, radical_layers, GradedModule, ModuleLike, Slot};
use crate::resolution::{resolution_window, LinearityReport, ProjectiveDimension, Resolution};

/// Minimal resolutions of every simple `S_v` (in degree 0), up to `n_max`.
#[derive(Debug)]
pub struct SimpleResolutions<F: Field> {
    algebra: Arc<TruncatedAlgebra<F>>,
    n_max: usize,
    window: usize,
    resolutions: Vec<Arc<Resolution<F>>>,
}

impl<F: Field> SimpleResolutions<F> {
    pub fn build(algebra: Arc<TruncatedAlgebra<F>>, n_max: usize) -> Result<Self> {
        Self::build_in_window(algebra.clone(), n_max, resolution_window(&algebra, 0, n_max))
    }

    pub fn build_in_window(algebra: Arc<TruncatedAlgebra<F>>, n_max: usize, window: usize) -> Result<Self> {
        let resolutions = (0..algebra.num_vertices())
            .into_par_iter()
            .map(|v| {
                let s = GradedModule::simple(algebra.clone(), v, 0, window)?;
                Resolution::build(Arc::new(s), n_max).map(Arc::new)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SimpleResolutions {
            algebra,
            n_max,
            window,
            resolutions,
        })
    }

    pub fn algebra(&self) -> &Arc<TruncatedAlgebra<F>> {
        &self.algebra
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn get(&self, v: usize) -> &Arc<Resolution<F>> {
        &self.resolutions[v]
    }

    /// Global dimension: exact when every simple has a finite resolution.
    pub fn global_dimension(&self) -> ProjectiveDimension {
        let mut max = 0;
        for r in &self.resolutions {
            match r.projective_dimension() {
                ProjectiveDimension::Exact(d) => max = max.max(d),
                other => return other,
            }
        }
        ProjectiveDimension::Exact(max)
    }
}

/// One basis class of `Ext^n(M, S)`: the functional dual to a generator of `P_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtClass {
    pub n: usize,
    pub t: usize,
    /// The simple being resolved, when `M = S_source`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<usize>,
    /// Target simple `S_target` of the functional.
    pub target: usize,
    pub generator: usize,
}

/// Bigraded dimensions and bases of `Ext^n(M, S)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtGroups {
    pub classes: Vec<Vec<ExtClass>>,
    /// `(n, t) → dim Ext^n(M, S)_t`.
    pub dims: BTreeMap<(usize, usize), usize>,
}

impl ExtGroups {
    pub fn dim(&self, n: usize, t: usize) -> usize {
        self.dims.get(&(n, t)).copied().unwrap_or(0)
    }

    pub fn total(&self, n: usize) -> usize {
        self.classes.get(n).map_or(0, Vec::len)
    }
}

pub fn ext_groups<F: Field>(r: &Resolution<F>, source: Option<usize>) -> ExtGroups {
    let mut classes = Vec::new();
    let mut dims = BTreeMap::new();
    for n in 0..=r.n_max() {
        let row: Vec<ExtClass> = r
            .generators(n)
            .iter()
            .enumerate()
            .map(|(g, gen)| ExtClass {
                n,
                t: gen.degree,
                source,
                target: gen.vertex,
                generator: g,
            })
            .collect();
        for c in &row {
            *dims.entry((n, c.t)).or_insert(0) += 1;
        }
        classes.push(row);
    }
    ExtGroups { classes, dims }
}

/// A chain map lifting one class: `levels[k][g']` is the image of generator
/// `g'` of `P_(i+k)` in the resolution of the target simple. `None` marks
/// images whose degree lies beyond the window of that resolution.
#[derive(Debug)]
pub struct Lift<E> {
    pub levels: Vec<Vec<Option<Vec<E>>>>,
}

fn compute_lift<F: Field>(
    r: &Resolution<F>,
    i: usize,
    g: usize,
    q: &Resolution<F>,
    kmax: usize,
    perturb: bool,
) -> Result<Lift<F::Elem>> {
    let f = r.algebra().field();
    let tg = r.generators(i)[g].degree;
    let wq = q.window();
    let q0 = &q.step(0).expect("simple resolutions are nonempty").projective;
    let level0: Vec<Option<Vec<F::Elem>>> = r
        .generators(i)
        .iter()
        .enumerate()
        .map(|(gi, gen)| {
            if gen.degree < tg {
                return Some(Vec::new());
            }
            let tau = gen.degree - tg;
            if tau > wq {
                None
            } else if gi == g {
                Some(q0.generator_vector(0))
            } else {
                Some(f.zeros(q0.dim(tau)))
            }
        })
        .collect();
    let mut levels = vec![level0];
    for k in 0..kmax {
        let (Some(rstep), Some(qstep)) = (r.step(i + k + 1), q.step(k + 1)) else {
            break;
        };
        let rp = &r.step(i + k).unwrap().projective;
        let qk = &q.step(k).unwrap().projective;
        let prev = &levels[k];
        let mut level = Vec::with_capacity(rstep.generators().len());
        for (gi, gen) in rstep.generators().iter().enumerate() {
            if gen.degree < tg {
                level.push(Some(Vec::new()));
                continue;
            }
            let tau = gen.degree - tg;
            if tau > wq {
                level.push(None);
                continue;
            }
            let mut y = f.zeros(qk.dim(tau));
            for (idx, c) in rstep.images[gi].iter().enumerate() {
                if f.is_zero(c) {
                    continue;
                }
                let (g2, s, a) = rp.decode(gen.degree, idx);
                let d2 = rp.generators()[g2].degree;
                if d2 < tg {
                    continue;
                }
                let image = prev[g2].as_ref().expect("lower degrees lie in the window");
                f.add_scaled(&mut y, c, &qk.act(s, a, d2 - tg, image));
            }
            let x = q.solver(k + 1, tau).solve(&y).ok_or_else(|| {
                Error::Lifting(format!("no lift at level {} for generator {gi} in degree {tau}", k + 1))
            })?;
            let mut x = qstep.projective.project_to_vertex(tau, gen.vertex, &x);
            if perturb {
                let extra = qstep.kernel[tau]
                    .basis()
                    .iter()
                    .map(|v| qstep.projective.project_to_vertex(tau, gen.vertex, v))
                    .find(|v| !f.is_zero_vec(v));
                if let Some(e) = extra {
                    f.add_scaled(&mut x, &f.one(), &e);
                }
            }
            level.push(Some(x));
        }
        levels.push(level);
    }
    Ok(Lift { levels })
}

/// A resolution of `M` together with the simple resolutions its classes lift
/// into, and a write-once cache of lifts.
#[derive(Debug)]
pub struct ExtModule<F: Field> {
    resolution: Arc<Resolution<F>>,
    simples: Arc<SimpleResolutions<F>>,
    source: Option<usize>,
    lifts: Vec<Vec<OnceLock<std::result::Result<Arc<Lift<F::Elem>>, Error>>>>,
}

impl<F: Field> ExtModule<F> {
    pub fn new(resolution: Arc<Resolution<F>>, simples: Arc<SimpleResolutions<F>>, source: Option<usize>) -> Self {
        let lifts = (0..resolution.len())
            .map(|n| (0..resolution.generators(n).len()).map(|_| OnceLock::new()).collect())
            .collect();
        ExtModule {
            resolution,
            simples,
            source,
            lifts,
        }
    }

    pub fn resolution(&self) -> &Arc<Resolution<F>> {
        &self.resolution
    }

    pub fn simples(&self) -> &Arc<SimpleResolutions<F>> {
        &self.simples
    }

    pub fn n_max(&self) -> usize {
        self.resolution.n_max().min(self.simples.n_max())
    }

    pub fn groups(&self) -> ExtGroups {
        ext_groups(&self.resolution, self.source)
    }

    fn kmax(&self, i: usize) -> usize {
        self.n_max().saturating_sub(i)
    }

    pub fn lift(&self, i: usize, g: usize) -> Result<Arc<Lift<F::Elem>>> {
        self.lifts[i][g]
            .get_or_init(|| {
                let v = self.resolution.generators(i)[g].vertex;
                compute_lift(&self.resolution, i, g, self.simples.get(v), self.kmax(i), false).map(Arc::new)
            })
            .clone()
    }

    /// `b · a` for `a` = generator `g` of `P_i` and `b` = generator `h` of
    /// `P_j` in the resolution of `S_v`, `v` the vertex of `a`. The result is
    /// a coordinate vector over the generators of `P_(i+j)`.
    pub fn product(&self, j: usize, h: usize, i: usize, g: usize) -> Result<Vec<F::Elem>> {
        let lift = self.lift(i, g)?;
        Ok(self.read_product(&lift, j, h, i, g))
    }

    /// The same product through a deliberately different valid lift.
    pub fn product_with_perturbed_lift(&self, j: usize, h: usize, i: usize, g: usize) -> Result<Vec<F::Elem>> {
        let v = self.resolution.generators(i)[g].vertex;
        let lift = compute_lift(&self.resolution, i, g, self.simples.get(v), self.kmax(i), true)?;
        Ok(self.read_product(&lift, j, h, i, g))
    }

    fn read_product(&self, lift: &Lift<F::Elem>, j: usize, h: usize, i: usize, g: usize) -> Vec<F::Elem> {
        let alg = self.resolution.algebra();
        let f = alg.field();
        let targets = self.resolution.generators(i + j);
        let mut out = f.zeros(targets.len());
        let Some(level) = lift.levels.get(j) else {
            return out;
        };
        let tg = self.resolution.generators(i)[g].degree;
        let q = self.simples.get(self.resolution.generators(i)[g].vertex);
        let qj = &q.step(j).expect("class h exists").projective;
        let hgen = qj.generators()[h];
        for (gi, gen) in targets.iter().enumerate() {
            if gen.degree < tg || gen.degree - tg != hgen.degree {
                continue;
            }
            if let Some(x) = &level[gi] {
                out[gi] = x[qj.coordinate(h, 0, alg.idempotent(hgen.vertex))].clone();
            }
        }
        out
    }
}

/// `E(A) = Ext(S, S)` with Yoneda products, both as raw class data and as a
/// truncated algebra graded by homological degree.
#[derive(Debug)]
pub struct ExtAlgebra<F: Field> {
    base: Arc<TruncatedAlgebra<F>>,
    simples: Arc<SimpleResolutions<F>>,
    modules: Vec<ExtModule<F>>,
    n_max: usize,
    /// Classes of degree `n`, ordered by resolved simple then generator.
    classes: Vec<Vec<ExtClass>>,
    /// `offsets[n][w]` = index of the first class of `S_w` in degree `n`.
    offsets: Vec<Vec<usize>>,
    algebra: Arc<TruncatedAlgebra<F>>,
}

impl<F: Field> ExtAlgebra<F> {
    pub fn build(base: Arc<TruncatedAlgebra<F>>, n_max: usize) -> Result<Self> {
        let simples = Arc::new(SimpleResolutions::build(base.clone(), n_max)?);
        Self::from_resolutions(simples)
    }

    pub fn from_resolutions(simples: Arc<SimpleResolutions<F>>) -> Result<Self> {
        let base = simples.algebra().clone();
        let n_max = simples.n_max();
        let nv = base.num_vertices();
        let modules: Vec<ExtModule<F>> = (0..nv)
            .map(|w| ExtModule::new(simples.get(w).clone(), simples.clone(), Some(w)))
            .collect();
        let mut classes = Vec::new();
        let mut offsets = Vec::new();
        for n in 0..=n_max {
            let mut row = Vec::new();
            let mut off = Vec::new();
            for (w, m) in modules.iter().enumerate() {
                off.push(row.len());
                for (g, gen) in m.resolution().generators(n).iter().enumerate() {
                    row.push(ExtClass {
                        n,
                        t: gen.degree,
                        source: Some(w),
                        target: gen.vertex,
                        generator: g,
                    });
                }
            }
            off.push(row.len());
            classes.push(row);
            offsets.push(off);
        }

        // Products b·a for every pair with matching vertices, a driving the lift.
        let all_a: Vec<(usize, usize)> = (0..=n_max).flat_map(|i| (0..classes[i].len()).map(move |a| (i, a))).collect();
        let products: Vec<Vec<((usize, usize, usize, usize), SparseVec<F::Elem>)>> = all_a
            .par_iter()
            .map(|&(i, a)| {
                let ca = classes[i][a];
                let w = ca.source.unwrap();
                let m = &modules[w];
                let mut out = Vec::new();
                for j in 0..=n_max - i {
                    let lo = offsets[j][ca.target];
                    let hi = offsets[j][ca.target + 1];
                    for b in lo..hi {
                        let h = classes[j][b].generator;
                        let coeffs = m.product(j, h, i, ca.generator)?;
                        let sparse: SparseVec<F::Elem> = coeffs
                            .into_iter()
                            .enumerate()
                            .filter(|(_, c)| !base.field().is_zero(c))
                            .map(|(g2, c)| (offsets[i + j][w] + g2, c))
                            .collect();
                        if !sparse.is_empty() {
                            out.push(((j, b, i, a), sparse));
                        }
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;

        let dims: Vec<usize> = classes.iter().map(Vec::len).collect();
        let idempotents: Vec<usize> = (0..nv).map(|w| offsets[0][w]).collect();
        if dims[0] != nv {
            return Err(Error::Module("Hom(S, S) is not one-dimensional per vertex".into()));
        }
        let labels = classes
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| {
                        let names = base.vertex_names();
                        if c.n == 0 {
                            format!("e_{}", names[c.target])
                        } else {
                            format!("[{}>{}]{}.{}#{}", names[c.source.unwrap()], names[c.target], c.n, c.t, c.generator)
                        }
                    })
                    .collect()
            })
            .collect();
        let weights = classes.iter().map(|row| row.iter().map(|c| c.t).collect()).collect();
        let finite_top = match simples.global_dimension() {
            ProjectiveDimension::Exact(d) => Some(d),
            ProjectiveDimension::AtLeast(_) => None,
        };
        let sc = StructureConstants {
            vertex_names: base.vertex_names().to_vec(),
            dims,
            idempotents,
            products: products.into_iter().flatten().collect(),
            labels: Some(labels),
            weights: Some(weights),
            finite_top,
        };
        let algebra = Arc::new(from_structure_constants(base.field(), sc, Provenance::ExtDual)?);
        Ok(ExtAlgebra {
            base,
            simples,
            modules,
            n_max,
            classes,
            offsets,
            algebra,
        })
    }

    pub fn base(&self) -> &Arc<TruncatedAlgebra<F>> {
        &self.base
    }

    pub fn simples(&self) -> &Arc<SimpleResolutions<F>> {
        &self.simples
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `E(A)` as a truncated algebra graded by homological degree.
    pub fn algebra(&self) -> &Arc<TruncatedAlgebra<F>> {
        &self.algebra
    }

    pub fn classes(&self, n: usize) -> &[ExtClass] {
        &self.classes[n]
    }

    /// Index in degree `n` of generator `g` of the resolution of `S_w`.
    pub fn class_index(&self, n: usize, w: usize, g: usize) -> usize {
        self.offsets[n][w] + g
    }

    pub fn module_of_simple(&self, w: usize) -> &ExtModule<F> {
        &self.modules[w]
    }

    /// `(n, t) → dim Ext^n(S, S)_t`.
    pub fn bigraded_dims(&self) -> BTreeMap<(usize, usize), usize> {
        let mut dims = BTreeMap::new();
        for row in &self.classes {
            for c in row {
                *dims.entry((c.n, c.t)).or_insert(0) += 1;
            }
        }
        dims
    }

    /// Product `b · a` of two classes as a vector of degree `j + i`.
    pub fn multiply(&self, j: usize, b: usize, i: usize, a: usize) -> Vec<F::Elem> {
        let f = self.algebra.field();
        let mut out = f.zeros(self.algebra.dim(i + j));
        for (k, c) in self.algebra.product(j, b, i, a) {
            out[*k] = c.clone();
        }
        out
    }
}

/// Outcome of a generation test, with the first class outside the span.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationReport {
    pub n_max: usize,
    /// `(n, dim of span, dim of Ext^n)` for each checked degree.
    pub rows: Vec<(usize, usize, usize)>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<ExtClass>,
}

/// Whether `Ext¹ · Ext^(n-1) = Ext^n` in `E(A)` for `2 ≤ n ≤ n_max`.
pub fn generated_in_degree_one<F: Field>(e: &ExtAlgebra<F>) -> GenerationReport {
    let alg = e.algebra();
    let f = alg.field();
    let mut rows = Vec::new();
    let mut witness = None;
    for n in 2..=e.n_max() {
        let mut span = Subspace::zero(f, alg.dim(n));
        for b in 0..alg.dim(1) {
            for a in 0..alg.dim(n - 1) {
                span.insert(e.multiply(1, b, n - 1, a));
            }
        }
        rows.push((n, span.dim(), alg.dim(n)));
        if witness.is_none() {
            if let Some(c) = (0..alg.dim(n)).find(|&c| !span.contains(&f.unit_vector(alg.dim(n), c))) {
                witness = Some(e.classes(n)[c]);
            }
        }
    }
    GenerationReport {
        n_max: e.n_max(),
        rows,
        pass: witness.is_none(),
        witness,
    }
}

/// Whether `Ext¹(S, S) · Ext^(n-1)(M, S) = Ext^n(M, S)` for `1 ≤ n ≤ n_max`.
pub fn ext_module_generated_in_degree_zero<F: Field>(m: &ExtModule<F>) -> Result<GenerationReport> {
    let r = m.resolution();
    let f = r.algebra().field();
    let n_max = m.n_max();
    let mut rows = Vec::new();
    let mut witness = None;
    for n in 1..=n_max {
        let dim_n = r.generators(n).len();
        let mut span = Subspace::zero(f, dim_n);
        for (g, gen) in r.generators(n - 1).iter().enumerate() {
            let q = m.simples().get(gen.vertex);
            for h in 0..q.generators(1).len() {
                span.insert(m.product(1, h, n - 1, g)?);
            }
        }
        rows.push((n, span.dim(), dim_n));
        if witness.is_none() {
            if let Some(c) = (0..dim_n).find(|&c| !span.contains(&f.unit_vector(dim_n, c))) {
                let gen = r.generators(n)[c];
                witness = Some(ExtClass {
                    n,
                    t: gen.degree,
                    source: None,
                    target: gen.vertex,
                    generator: c,
                });
            }
        }
    }
    Ok(GenerationReport {
        n_max,
        rows,
        pass: witness.is_none(),
        witness,
    })
}

/// `E(M) = Ext(M, S)` as a left module over `E(A)`, graded by homological
/// degree and truncated at `n_max`. Basis vectors carry the internal degree
/// of their class as weight.
pub fn ext_module<F: Field>(m: &ExtModule<F>, e: &ExtAlgebra<F>) -> Result<GradedModule<F>> {
    let r = m.resolution();
    let window = m.n_max().min(e.n_max());
    let names = r.algebra().vertex_names();
    let slots: Vec<Vec<Slot>> = (0..=window)
        .map(|n| {
            r.generators(n)
                .iter()
                .map(|g| Slot {
                    vertex: g.vertex,
                    weight: g.degree,
                })
                .collect()
        })
        .collect();
    let labels = (0..=window)
        .map(|n| {
            r.generators(n)
                .iter()
                .enumerate()
                .map(|(k, g)| format!("[>{}]{n}.{}#{k}", names[g.vertex], g.degree))
                .collect()
        })
        .collect();
    let f = r.algebra().field().clone();
    let failure: OnceLock<Error> = OnceLock::new();
    let module = GradedModule::from_action(e.algebra().clone(), window, slots, labels, |j, b, i, a| {
        let cb = e.classes(j)[b];
        let ga = r.generators(i)[a];
        if cb.source != Some(ga.vertex) || i + j > window {
            return Vec::new();
        }
        match m.product(j, cb.generator, i, a) {
            Ok(v) => v.into_iter().enumerate().filter(|(_, c)| !f.is_zero(c)).collect(),
            Err(err) => {
                let _ = failure.set(err);
                Vec::new()
            }
        }
    })?;
    match failure.into_inner() {
        Some(err) => Err(err),
        None => Ok(module),
    }
}

/// One row of a bigraded comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimEntry {
    pub degree: usize,
    pub weight: usize,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityWindow {
    /// Homological bound used for `E(A)` and for the resolutions over it.
    pub n_max: usize,
    /// Highest degree `h` compared.
    pub compared_degrees: usize,
    /// Internal degrees over `E(A)` are certified up to this bound.
    pub internal: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductOrder {
    Direct,
    Reversed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureComparison {
    /// Degrees `h ≥ 2` whose products were compared.
    pub degrees: Vec<usize>,
    pub words: usize,
    /// Order of the Gr_J A products that reproduces E(E(A)), if any.
    pub order: Option<ProductOrder>,
    pub matches: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub window: DualityWindow,
    /// Ext over `E(A)`: `degree = h`, `weight = internal degree over A`.
    pub double_dual: Vec<DimEntry>,
    /// `(J^i/J^(i+1))_t`: `degree = i`, `weight = t`.
    pub graded: Vec<DimEntry>,
    /// Ext over `E(A)` off the diagonal `τ = h` (internal degree over `E(A)`).
    pub off_diagonal: Vec<(usize, usize, usize)>,
    pub dims_match: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<(usize, usize, usize, usize)>,
    /// Linearity of `E(A)_0` over `E(A)`.
    pub dual_linearity: Vec<LinearityReport>,
    /// Betti column totals over `E(A)` against `dim J^k A / J^(k+1) A`.
    pub layer_shadow: Vec<(usize, usize, usize)>,
    pub structure: StructureComparison,
}

fn dim_table(entries: &BTreeMap<(usize, usize), usize>, h_max: usize) -> Vec<DimEntry> {
    entries
        .iter()
        .filter(|((h, _), d)| *h <= h_max && **d > 0)
        .map(|(&(degree, weight), &dim)| DimEntry { degree, weight, dim })
        .collect()
}

/// Compares `E(E(A))` with `Gr_J A`, degree by degree and on products of
/// degree-one generators.
pub fn koszul_dual_double<F: Field>(e: &ExtAlgebra<F>) -> Result<DualityReport> {
    let a = e.base();
    let n_max = e.n_max();
    let gr = associated_graded(a)?;
    let h_cmp = n_max.min(gr.algebra.window());
    if h_cmp == 0 && gr.algebra.dim(1) > 0 {
        return Err(Error::Window("no degree above 0 can be compared".into()));
    }
    let ea = e.algebra().clone();
    let inner = Arc::new(SimpleResolutions::build_in_window(ea.clone(), n_max, n_max.min(resolution_window(&ea, 0, n_max)))?);
    let ee = ExtAlgebra::from_resolutions(inner.clone())?;

    // Dimensions, refined by the A-weight of E(E(A)) classes.
    let mut ee_weighted: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut off_diagonal: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for h in 0..=n_max {
        for w in 0..ea.num_vertices() {
            let step = inner.get(w).step(h);
            let Some(step) = step else { continue };
            for gen in step.generators() {
                *ee_weighted.entry((h, gen.weight)).or_insert(0) += 1;
                if gen.degree != h {
                    *off_diagonal.entry((h, gen.degree)).or_insert(0) += 1;
                }
            }
        }
    }
    let mut gr_dims: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, row) in gr.bidegree.iter().enumerate() {
        for (t, &d) in row.iter().enumerate() {
            if d > 0 {
                gr_dims.insert((i, t), d);
            }
        }
    }
    let mut first_mismatch = None;
    let keys: std::collections::BTreeSet<(usize, usize)> = ee_weighted
        .keys()
        .chain(gr_dims.keys())
        .filter(|(h, _)| *h <= h_cmp)
        .copied()
        .collect();
    for (h, t) in keys {
        let x = ee_weighted.get(&(h, t)).copied().unwrap_or(0);
        let y = gr_dims.get(&(h, t)).copied().unwrap_or(0);
        if x != y {
            first_mismatch = Some((h, t, x, y));
            break;
        }
    }

    let dual_linearity = (0..ea.num_vertices())
        .map(|w| inner.get(w).linearity_check())
        .collect::<Result<Vec<_>>>()?;

    // J^k A / J^(k+1) A from the regular module.
    let reg_window = if a.is_finite() { a.finite_top().unwrap() } else { a.window() };
    let reg = GradedModule::regular(a.clone(), reg_window)?;
    let layers = radical_layers(&reg, h_cmp + 1);
    let layer_shadow = (0..=h_cmp)
        .map(|k| {
            let betti: usize = (0..ea.num_vertices()).map(|w| inner.get(w).generators(k).len()).sum();
            let layer: usize = (0..=reg_window).map(|t| layers[k][t].dim() - layers[k + 1][t].dim()).sum();
            (k, betti, layer)
        })
        .collect();

    let structure = compare_structure(e, &ee, &gr, h_cmp)?;
    Ok(DualityReport {
        window: DualityWindow {
            n_max,
            compared_degrees: h_cmp,
            internal: n_max,
        },
        double_dual: dim_table(&ee_weighted, n_max),
        graded: dim_table(&gr_dims, h_cmp),
        off_diagonal: off_diagonal.into_iter().map(|((h, t), d)| (h, t, d)).collect(),
        dims_match: first_mismatch.is_none(),
        first_mismatch,
        dual_linearity,
        layer_shadow,
        structure,
    })
}

const WORD_CAP: usize = 20_000;

/// Matches degree-one classes of `E(E(A))` with `J/J²` and compares the
/// linear relations among products of them on both sides.
fn compare_structure<F: Field>(
    e: &ExtAlgebra<F>,
    ee: &ExtAlgebra<F>,
    gr: &crate::algebra::GrAlgebra<F>,
    h_cmp: usize,
) -> Result<StructureComparison> {
    let a = e.base();
    let f = a.field();
    let eea = ee.algebra();
    let g = &gr.algebra;
    let skip = |why: &str| StructureComparison {
        degrees: Vec::new(),
        words: 0,
        order: None,
        matches: false,
        skipped: Some(why.to_string()),
    };
    if ee.n_max() < 1 || eea.dim(1) == 0 {
        return Ok(StructureComparison {
            degrees: Vec::new(),
            words: 0,
            order: Some(ProductOrder::Direct),
            matches: eea.dim(1) == g.dim(1),
            skipped: None,
        });
    }
    // θ on degree one: the generator of a class over E(A) is a vector of
    // E(A)_1, i.e. a combination of classes c; class c is dual to j_c ∈ J/J².
    let mut theta = Vec::new();
    for c in ee.classes(1) {
        if c.t != 1 {
            return Ok(skip("E(A) is not generated in degree one"));
        }
        let w = c.source.unwrap();
        let step = ee.simples().get(w).step(1).unwrap();
        let phi = &step.images[c.generator];
        let p0 = &ee.simples().get(w).step(0).unwrap().projective;
        let mut out = f.zeros(g.dim(1));
        for (idx, coef) in phi.iter().enumerate() {
            if f.is_zero(coef) {
                continue;
            }
            let (_, s, ec) = p0.decode(1, idx);
            debug_assert_eq!(s, 1);
            let class = e.classes(1)[ec];
            let src = class.source.unwrap();
            let rs = e.simples().get(src);
            let jvec = &rs.step(1).unwrap().images[class.generator];
            let q0 = &rs.step(0).unwrap().projective;
            let mut avec = f.zeros(a.dim(class.t));
            for (k, x) in jvec.iter().enumerate() {
                if !f.is_zero(x) {
                    let (_, s2, b) = q0.decode(class.t, k);
                    debug_assert_eq!(s2, class.t);
                    avec[b] = x.clone();
                }
            }
            let grv = gr.class_of(a, 1, class.t, &avec);
            f.add_scaled(&mut out, coef, &grv);
        }
        theta.push(out);
    }
    let mut order_ok = [true, true];
    let mut degrees = Vec::new();
    let mut words_total = 0;
    let n1 = ee.classes(1).len();
    let typing: Vec<(usize, usize)> = ee.classes(1).iter().map(|c| (c.source.unwrap(), c.target)).collect();
    // words as (last class, ee vector, gr vectors for both orders)
    type Word<E> = (usize, usize, Vec<E>, [Vec<E>; 2]);
    let mut words: Vec<Word<F::Elem>> = (0..n1)
        .map(|c| {
            (
                typing[c].0,
                typing[c].1,
                f.unit_vector(n1, c),
                [theta[c].clone(), theta[c].clone()],
            )
        })
        .collect();
    for h in 2..=h_cmp.min(ee.n_max()) {
        let mut next: Vec<Word<F::Elem>> = Vec::new();
        for (src, tgt, x, y) in &words {
            for c in 0..n1 {
                let (cs, ct) = typing[c];
                let unit = f.unit_vector(n1, c);
                let ex = eea.mul_vec(1, &unit, h - 1, x);
                let direct = if cs == *tgt { g.mul_vec(1, &theta[c], h - 1, &y[0]) } else { f.zeros(g.dim(h)) };
                let reversed = g.mul_vec(h - 1, &y[1], 1, &theta[c]);
                if cs != *tgt && f.is_zero_vec(&reversed) && f.is_zero_vec(&ex) {
                    continue;
                }
                next.push((*src, ct, ex, [direct, reversed]));
            }
        }
        if next.len() > WORD_CAP {
            break;
        }
        words_total += next.len();
        degrees.push(h);
        for (o, ok) in order_ok.iter_mut().enumerate() {
            if !*ok {
                continue;
            }
            let mut left = Subspace::zero(f, eea.dim(h));
            let mut right = Subspace::zero(f, g.dim(h));
            let mut both = Subspace::zero(f, eea.dim(h) + g.dim(h));
            for (_, _, x, y) in &next {
                left.insert(x.clone());
                right.insert(y[o].clone());
                both.insert(x.iter().chain(y[o].iter()).cloned().collect());
            }
            if !(left.dim() == right.dim() && right.dim() == both.dim()) {
                *ok = false;
            }
        }
        words = next;
    }
    let order = if order_ok[0] {
        Some(ProductOrder::Direct)
    } else if order_ok[1] {
        Some(ProductOrder::Reversed)
    } else {
        None
    };
    Ok(StructureComparison {
        degrees,
        words: words_total,
        order,
        matches: order.is_some(),
        skipped: None,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualModuleReport {
    pub n_max: usize,
    pub compared_degrees: usize,
    /// Ext of `E(M)` over `E(A)`, by degree and A-weight.
    pub double_dual: Vec<DimEntry>,
    /// `Gr_J M` by J-degree and weight.
    pub graded: Vec<DimEntry>,
    pub dims_match: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<(usize, usize, usize, usize)>,
}

/// Resolves `E(M)` over `E(A)` and compares its Ext dimensions with `Gr_J M`.
pub fn dual_module_check<F: Field>(m: &ExtModule<F>, e: &ExtAlgebra<F>) -> Result<DualModuleReport> {
    let em = ext_module(m, e)?;
    let n_max = em.window();
    let target = m.resolution().target();
    let gr = associated_graded(target.algebra())?;
    let (grm, bidegree) = associated_graded_module(target, &gr, Arc::new(gr.algebra.clone()))?;
    let h_cmp = n_max.min(grm.window());
    let mut ee: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    if !em.is_zero() {
        let r = Resolution::build(Arc::new(em), n_max)?;
        for h in 0..=n_max {
            for gen in r.generators(h) {
                *ee.entry((h, gen.weight)).or_insert(0) += 1;
            }
        }
    }
    let mut gd: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, row) in bidegree.iter().enumerate() {
        for (t, &d) in row.iter().enumerate() {
            if d > 0 {
                gd.insert((i, t), d);
            }
        }
    }
    let keys: std::collections::BTreeSet<(usize, usize)> =
        ee.keys().chain(gd.keys()).filter(|(h, _)| *h <= h_cmp).copied().collect();
    let mut first_mismatch = None;
    for (h, t) in keys {
        let x = ee.get(&(h, t)).copied().unwrap_or(0);
        let y = gd.get(&(h, t)).copied().unwrap_or(0);
        if x != y {
            first_mismatch = Some((h, t, x, y));
            break;
        }
    }
    Ok(DualModuleReport {
        n_max,
        compared_degrees: h_cmp,
        double_dual: dim_table(&ee, h_cmp),
        graded: dim_table(&gd, h_cmp),
        dims_match: first_mismatch.is_none(),
        first_mismatch,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerRow {
    pub n: usize,
    pub t: usize,
    /// `dim Ext^(n-1)(JM, S)_t`.
    pub radical: usize,
    /// `dim Ext^n(M, S)_t`.
    pub module: usize,
    /// `dim Ext^n(M/JM, S)_t`.
    pub top: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerExactnessReport {
    pub n_max: usize,
    pub rows: Vec<LayerRow>,
    pub holds: bool,
}

fn betti_dims<F: Field>(m: GradedModule<F>, n_max: usize) -> Result<BTreeMap<(usize, usize), usize>> {
    if m.is_zero() {
        return Ok(BTreeMap::new());
    }
    let r = Resolution::build(Arc::new(m), n_max)?;
    Ok(ext_groups(&r, None).dims)
}

/// Checks `dim Ext^(n-1)(JM,S)_t + dim Ext^n(M,S)_t = dim Ext^n(M/JM,S)_t`.
pub fn radical_layer_exactness<F: Field>(m: &GradedModule<F>, n_max: usize) -> Result<LayerExactnessReport> {
    let jm = m.radical_submodule()?;
    let top = m.top_quotient()?;
    let (dm, (dj, dt)) = rayon::join(
        || betti_dims(m.clone(), n_max),
        || rayon::join(|| betti_dims(jm, n_max), || betti_dims(top, n_max)),
    );
    let (dm, dj, dt) = (dm?, dj?, dt?);
    let mut rows = Vec::new();
    for n in 1..=n_max {
        for t in 0..=m.window() {
            let radical = dj.get(&(n - 1, t)).copied().unwrap_or(0);
            let module = dm.get(&(n, t)).copied().unwrap_or(0);
            let topd = dt.get(&(n, t)).copied().unwrap_or(0);
            if radical + module + topd == 0 {
                continue;
            }
            rows.push(LayerRow {
                n,
                t,
                radical,
                module,
                top: topd,
                holds: radical + module == topd,
            });
        }
    }
    let holds = rows.iter().all(|r| r.holds);
    Ok(LayerExactnessReport { n_max, rows, holds })
}
