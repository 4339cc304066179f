//! Generalized Artin–Schelter regularity and self-injectivity.
//!
//! `Ext^i(S_j, A)` is the cohomology of `Hom(P_•, A)` for the minimal
//! resolution of `S_j`. A map out of the generator `g` of `A e_v(-s)` is an
//! element of `e_v A` in degree `s + q`, so the complex splits by internal
//! degree `q` and by the source vertex of those elements.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{associated_graded, TruncatedAlgebra};
use crate::error::{Error, Result};
use crate::ext::{ExtAlgebra, SimpleResolutions};
use crate::field::Field;
use crate::linalg::{Matrix, Subspace};
use crate::module::{projective_cover, GradedModule, ModuleLike};
use crate::resolution::{ProjectiveDimension, Resolution};

/// `dim Ext^i(S_j, A)` in internal degree `q`, restricted to source vertex `w`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtAgainstAlgebraEntry {
    pub simple: String,
    pub i: usize,
    pub q: i64,
    pub vertex: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtAgainstAlgebra {
    /// Homological degrees computed for each simple.
    pub degrees: usize,
    /// Sound internal-degree range per simple: `[q_min, q_max]`.
    pub sound: Vec<(i64, i64)>,
    pub entries: Vec<ExtAgainstAlgebraEntry>,
}

impl ExtAgainstAlgebra {
    /// Total dimension of `Ext^i(S_simple, A)` in the sound window.
    pub fn total(&self, simple: &str, i: usize) -> usize {
        self.entries
            .iter()
            .filter(|e| e.simple == simple && e.i == i)
            .map(|e| e.dim)
            .sum()
    }
}

/// Nonzero dimensions keyed by `(simple, i, q, vertex)`.
type ExtTable = BTreeMap<(usize, usize, i64, usize), usize>;

/// Coordinates of `Hom(P_n, A)_q` at source vertex `w`: pairs
/// `(generator, algebra basis index)`.
fn cochain_basis<F: Field>(r: &Resolution<F>, n: usize, q: i64, w: usize) -> Vec<(usize, usize)> {
    let alg = r.algebra();
    let mut out = Vec::new();
    for (g, gen) in r.generators(n).iter().enumerate() {
        let deg = gen.degree as i64 + q;
        if deg < 0 {
            continue;
        }
        let deg = deg as usize;
        for &e in alg.by_source(deg, w) {
            if alg.element(deg, e).target == gen.vertex {
                out.push((g, e));
            }
        }
    }
    out
}

/// `δ: Hom(P_n, A)_q → Hom(P_(n+1), A)_q` at source vertex `w`.
fn coboundary<F: Field>(r: &Resolution<F>, n: usize, q: i64, w: usize) -> Matrix<F> {
    let alg = r.algebra();
    let f = alg.field();
    let src = cochain_basis(r, n, q, w);
    let dst = cochain_basis(r, n + 1, q, w);
    let mut m = Matrix::zeros(f, dst.len(), src.len());
    let Some(step) = r.step(n + 1) else {
        return m;
    };
    let lower = &r.step(n).unwrap().projective;
    let index: BTreeMap<(usize, usize), usize> = dst.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    for (col, &(g, e)) in src.iter().enumerate() {
        let sg = r.generators(n)[g].degree;
        let edeg = (sg as i64 + q) as usize;
        for (g2, gen2) in step.generators().iter().enumerate() {
            let image = &step.images[g2];
            for (idx, coef) in image.iter().enumerate() {
                if f.is_zero(coef) {
                    continue;
                }
                let (gg, s, c) = lower.decode(gen2.degree, idx);
                if gg != g {
                    continue;
                }
                for (out, x) in alg.product(s, c, edeg, e) {
                    let row = index[&(g2, *out)];
                    let v = f.add(m.get(row, col), &f.mul(coef, x));
                    m.set(row, col, v);
                }
            }
        }
    }
    m
}

/// Cohomology of `Hom(P_•, A)` for every simple, inside the sound window.
pub fn ext_against_algebra<F: Field>(simples: &SimpleResolutions<F>) -> Result<ExtAgainstAlgebra> {
    Ok(ext_table(simples)?.0)
}

fn ext_table<F: Field>(simples: &SimpleResolutions<F>) -> Result<(ExtAgainstAlgebra, ExtTable)> {
    let alg = simples.algebra();
    let nv = alg.num_vertices();
    let top = match alg.finite_top() {
        Some(t) => t as i64,
        None => alg.window() as i64,
    };
    let per_simple: Vec<(Vec<((usize, usize, i64, usize), usize)>, (i64, i64), usize)> = (0..nv)
        .into_par_iter()
        .map(|j| {
            let r = simples.get(j);
            // Cohomology in degree n needs P_(n+1); unknown past the last step
            // of an unfinished resolution.
            let degrees = if r.is_finite() { r.len() } else { r.len().saturating_sub(1) };
            let smax = (0..r.len())
                .flat_map(|n| r.generators(n).iter().map(|g| g.degree))
                .max()
                .unwrap_or(0) as i64;
            let qmin = -smax;
            let qmax = if alg.is_finite() { top } else { top - smax };
            let mut out = Vec::new();
            for n in 0..degrees {
                for q in qmin..=qmax {
                    for w in 0..nv {
                        let dim = cochain_basis(r, n, q, w).len();
                        if dim == 0 {
                            continue;
                        }
                        let rank_out = coboundary(r, n, q, w).rank();
                        let rank_in = if n == 0 { 0 } else { coboundary(r, n - 1, q, w).rank() };
                        let h = dim - rank_out - rank_in;
                        if h > 0 {
                            out.push(((j, n, q, w), h));
                        }
                    }
                }
            }
            (out, (qmin, qmax), degrees)
        })
        .collect();
    let mut table = BTreeMap::new();
    let mut sound = Vec::new();
    let mut degrees = usize::MAX;
    for (entries, window, d) in per_simple {
        if window.0 > window.1 {
            return Err(Error::Window("no internal degree is sound for Hom(P, A)".into()));
        }
        sound.push(window);
        degrees = degrees.min(d);
        table.extend(entries);
    }
    let names = alg.vertex_names();
    let entries = table
        .iter()
        .map(|(&(j, i, q, w), &dim)| ExtAgainstAlgebraEntry {
            simple: names[j].clone(),
            i,
            q,
            vertex: names[w].clone(),
            dim,
        })
        .collect();
    Ok((
        ExtAgainstAlgebra {
            degrees,
            sound,
            entries,
        },
        table,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularityVerdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationEntry {
    pub simple: String,
    pub vertex: String,
    pub shift: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub global_dimension: ProjectiveDimension,
    pub internal_window: usize,
    pub ext: ExtAgainstAlgebra,
    pub verdict: RegularityVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<PermutationEntry>>,
    /// `(simple, i)` where the conditions break.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<(String, usize, String)>,
}

impl RegularityReport {
    pub fn dimension(&self) -> Option<usize> {
        match self.global_dimension {
            ProjectiveDimension::Exact(d) => Some(d),
            ProjectiveDimension::AtLeast(_) => None,
        }
    }
}

/// Pass iff `Ext^i(S_j, A) = 0` for `i ≠ d` and each `Ext^d(S_j, A)` is one
/// simple piece, with `j ↦` its vertex a bijection.
pub fn as_regular_certificate<F: Field>(simples: &SimpleResolutions<F>) -> Result<RegularityReport> {
    let alg = simples.algebra();
    let names = alg.vertex_names();
    let gldim = simples.global_dimension();
    let (ext, table) = ext_table(simples)?;
    let internal_window = if alg.is_finite() { alg.finite_top().unwrap() } else { alg.window() };
    let ProjectiveDimension::Exact(d) = gldim else {
        return Ok(RegularityReport {
            global_dimension: gldim,
            internal_window,
            ext,
            verdict: RegularityVerdict::Inconclusive,
            permutation: None,
            failure: None,
        });
    };
    let mut failure = None;
    let mut perm = Vec::new();
    'simples: for j in 0..alg.num_vertices() {
        for i in 0..=d {
            let pieces: Vec<(&(usize, usize, i64, usize), &usize)> =
                table.iter().filter(|((s, k, _, _), _)| *s == j && *k == i).collect();
            if i != d {
                if !pieces.is_empty() {
                    failure = Some((names[j].clone(), i, "nonzero Ext below the top degree".to_string()));
                    break 'simples;
                }
            } else if pieces.len() != 1 || *pieces[0].1 != 1 {
                failure = Some((names[j].clone(), i, "top Ext is not one simple piece".to_string()));
                break 'simples;
            } else {
                let &(_, _, q, w) = pieces[0].0;
                perm.push((j, w, q));
            }
        }
    }
    if failure.is_none() {
        let mut seen = vec![false; alg.num_vertices()];
        for &(j, w, _) in &perm {
            if std::mem::replace(&mut seen[w], true) {
                failure = Some((names[j].clone(), d, "two simples share a vertex".to_string()));
                break;
            }
        }
    }
    let verdict = if failure.is_some() {
        RegularityVerdict::Fail
    } else {
        RegularityVerdict::Pass
    };
    let permutation = (verdict == RegularityVerdict::Pass).then(|| {
        perm.iter()
            .map(|&(j, w, q)| PermutationEntry {
                simple: names[j].clone(),
                vertex: names[w].clone(),
                shift: q,
            })
            .collect()
    });
    Ok(RegularityReport {
        global_dimension: gldim,
        internal_window,
        ext,
        verdict,
        permutation,
        failure,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummandReport {
    /// `D(e_j Λ)` for vertex `j`.
    pub vertex: String,
    pub dims: Vec<usize>,
    /// Cover generators as `(vertex, degree)`.
    pub top: Vec<(String, usize)>,
    pub projective: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfInjectivityReport {
    pub dims: Vec<usize>,
    pub summands: Vec<SummandReport>,
    /// `j ↦ π(j)` with `D(e_j Λ) ≅ Λ e_π(j)` up to shift, when every summand is projective.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<(String, String)>>,
    pub pass: bool,
}

/// `Λ` is self-injective iff its linear dual is projective: each summand
/// `D(e_j Λ)` must be covered by one indecomposable projective with zero kernel.
pub fn self_injective_check<F: Field>(lam: &Arc<TruncatedAlgebra<F>>) -> Result<SelfInjectivityReport> {
    if !lam.is_finite() {
        return Err(Error::Precondition(
            "self-injectivity needs a finite-dimensional algebra in the window".into(),
        ));
    }
    let f = lam.field();
    let names = lam.vertex_names();
    let dual = GradedModule::linear_dual(lam.clone())?;
    let top = lam.finite_top().unwrap();
    let mut summands = Vec::new();
    let mut perm = Vec::new();
    for j in 0..lam.num_vertices() {
        let spaces: Vec<Subspace<F>> = (0..=top)
            .map(|t| {
                let n = dual.dim(t);
                Subspace::span(
                    f,
                    n,
                    lam.basis(top - t)
                        .iter()
                        .enumerate()
                        .filter(|(_, b)| b.target == j)
                        .map(|(c, _)| f.unit_vector(n, c)),
                )
            })
            .collect();
        let summand = dual.submodule(&spaces)?;
        let cover = projective_cover(&summand)?;
        let gens = cover.projective.generators();
        let projective = gens.len() == 1 && cover.kernel.iter().all(Subspace::is_zero);
        if projective {
            perm.push((names[j].clone(), names[gens[0].vertex].clone(), gens[0].vertex));
        }
        summands.push(SummandReport {
            vertex: names[j].clone(),
            dims: summand.dims(),
            top: gens.iter().map(|g| (names[g.vertex].clone(), g.degree)).collect(),
            projective,
        });
    }
    let mut pass = summands.iter().all(|s| s.projective);
    if pass {
        let mut targets: Vec<usize> = perm.iter().map(|p| p.2).collect();
        targets.sort_unstable();
        targets.dedup();
        pass = targets.len() == lam.num_vertices();
    }
    Ok(SelfInjectivityReport {
        dims: dual.dims(),
        summands,
        permutation: pass.then(|| perm.into_iter().map(|(a, b, _)| (a, b)).collect()),
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityTransfer {
    pub algebra: RegularityReport,
    pub graded: RegularityReport,
    pub agree: bool,
    /// Self-injectivity of `E(A)`, when `E(A)` is finite in the window.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_self_injective: Option<SelfInjectivityReport>,
    /// All three verdicts coincide.
    pub triangle: bool,
}

/// AS-regularity of `A` and `Gr_J A`, and self-injectivity of `E(A)`.
pub fn gr_regularity_transfer<F: Field>(e: &ExtAlgebra<F>) -> Result<RegularityTransfer> {
    let a = e.base();
    let n_max = e.n_max();
    let algebra = as_regular_certificate(e.simples())?;
    let gr = Arc::new(associated_graded(a)?.algebra);
    let graded = as_regular_certificate(&SimpleResolutions::build(gr, n_max)?)?;
    if algebra.verdict == RegularityVerdict::Inconclusive || graded.verdict == RegularityVerdict::Inconclusive {
        return Err(Error::Inconclusive(
            "global dimension is not certified inside the homological bound".into(),
        ));
    }
    let agree = algebra.verdict == graded.verdict && algebra.global_dimension == graded.global_dimension;
    let dual_self_injective = if e.algebra().is_finite() {
        Some(self_injective_check(e.algebra())?)
    } else {
        None
    };
    let as_pass = algebra.verdict == RegularityVerdict::Pass;
    let triangle = agree && dual_self_injective.as_ref().is_some_and(|s| s.pass == as_pass);
    Ok(RegularityTransfer {
        algebra,
        graded,
        agree,
        dual_self_injective,
        triangle,
    })
}
