//! Property checks shared by the integration tests and the acceptance runner.
//! Each returns a short description on success and the reason on failure.

use std::collections::BTreeMap;
use std::sync::Arc;

use koszulkit_core::algebra::associated_graded;
use koszulkit_core::ext::{generated_in_degree_one, radical_layer_exactness, ExtAlgebra, SimpleResolutions};
use koszulkit_core::koszul::{koszul_certificate, quasi_koszul_certificate};
use koszulkit_core::linalg::{Matrix, Subspace};
use koszulkit_core::module::{radical_layers, FreeModule, Generator, GradedModule, ModuleLike};
use koszulkit_core::resolution::{resolution_window, Resolution};
use koszulkit_core::{Field, Rationals};

use super::{resolve_top, Alg};

pub type Check = Result<String, String>;

type Elem = <Rationals as Field>::Elem;

/// Quasi-Koszul certificate of `A/J` against generation of `E(A)` in degree one.
pub fn quasi_koszul_iff_generated(a: &Alg, n: usize) -> Result<bool, String> {
    let quasi = quasi_koszul_certificate(&resolve_top(a, n), n).map_err(|e| e.to_string())?;
    let e = ExtAlgebra::build(a.clone(), n).map_err(|e| e.to_string())?;
    let gen = generated_in_degree_one(&e);
    if quasi.passes() == gen.pass {
        Ok(gen.pass)
    } else {
        Err(format!("certificate {:?} vs generation {}", quasi.verdict, gen.pass))
    }
}

/// Koszul certificate of `A/J` against linearity of `E(A)_0` over `E(A)`.
pub fn koszul_iff_dual_linear(a: &Alg, n: usize, k: usize) -> Result<bool, String> {
    let cert = koszul_certificate(&resolve_top(a, n), n, k).map_err(|e| e.to_string())?;
    let e = ExtAlgebra::build(a.clone(), n).map_err(|e| e.to_string())?;
    let ea = e.algebra().clone();
    let w = n.min(resolution_window(&ea, 0, n));
    let over_dual = SimpleResolutions::build_in_window(ea, n, w).map_err(|e| e.to_string())?;
    let mut linear = true;
    for v in 0..a.num_vertices() {
        linear &= over_dual.get(v).linearity_check().map_err(|e| e.to_string())?.pass;
    }
    if cert.passes() == linear {
        Ok(linear)
    } else {
        Err(format!("certificate {:?} vs linearity of E(A)_0 {linear}", cert.verdict))
    }
}

/// Modules that are certified quasi-Koszul in the window: the indecomposable
/// projectives and their quotients by `J^2`.
fn quasi_koszul_modules(a: &Alg, n: usize) -> Result<Vec<GradedModule<Rationals>>, String> {
    let w = resolution_window(a, 0, n);
    let mut out = Vec::new();
    for v in 0..a.num_vertices() {
        let p = GradedModule::projective(a.clone(), v, 0, w).map_err(|e| e.to_string())?;
        let j2 = radical_layers(&p, 2).pop().unwrap();
        let q = p.quotient(&j2).map_err(|e| e.to_string())?;
        for m in [p, q] {
            let r = Resolution::build(Arc::new(m.clone()), n).map_err(|e| e.to_string())?;
            if quasi_koszul_certificate(&r, n).map_err(|e| e.to_string())?.passes() {
                out.push(m);
            }
        }
    }
    Ok(out)
}

/// `dim Ext^(n-1)(JM,S) + dim Ext^n(M,S) = dim Ext^n(M/JM,S)` on
/// quasi-Koszul modules.
pub fn layer_additivity(a: &Alg, n: usize) -> Check {
    let mods = quasi_koszul_modules(a, n)?;
    let mut rows = 0;
    for m in &mods {
        let rep = radical_layer_exactness(m, n).map_err(|e| e.to_string())?;
        if !rep.holds {
            let bad = rep.rows.iter().find(|r| !r.holds).unwrap();
            return Err(format!(
                "n={} t={}: {} + {} != {}",
                bad.n, bad.t, bad.radical, bad.module, bad.top
            ));
        }
        rows += rep.rows.len();
    }
    Ok(format!("{} modules, {rows} rows", mods.len()))
}

/// Generators covering a full basis of each vertex component of `u`.
fn fat_generators(a: &Alg, m: &impl ModuleLike<Rationals>, u: &[Subspace<Rationals>]) -> (Vec<Generator>, Vec<Vec<Elem>>) {
    let f = a.field();
    let mut gens = Vec::new();
    let mut images = Vec::new();
    for (t, space) in u.iter().enumerate() {
        for v in 0..a.num_vertices() {
            let part = Subspace::span(f, m.dim(t), space.basis().iter().map(|x| m.project_to_vertex(t, v, x)));
            for x in part.basis() {
                gens.push(Generator {
                    vertex: v,
                    degree: t,
                    weight: t,
                });
                images.push(x.clone());
            }
        }
    }
    (gens, images)
}

fn kernels(p: &FreeModule<Rationals>, target: &impl ModuleLike<Rationals>, images: &[Vec<Elem>]) -> Vec<Subspace<Rationals>> {
    (0..=p.window()).map(|t| p.map_matrix(target, images, t).kernel()).collect()
}

/// `dim Ext^n(A/J, S_v)_t` for `n <= 2` from a resolution that covers every
/// kernel by a full basis instead of its top.
pub fn ext_from_fat_resolution(a: &Alg, w: usize) -> BTreeMap<(usize, usize, usize), usize> {
    let f = a.field();
    let m = GradedModule::semisimple_top(a.clone(), w).unwrap();
    let full: Vec<Subspace<Rationals>> = (0..=w).map(|t| Subspace::full(f, m.dim(t))).collect();
    let (g0, i0) = fat_generators(a, &m, &full);
    let p0 = FreeModule::new(a.clone(), w, g0).unwrap();
    let k0 = kernels(&p0, &m, &i0);
    let (g1, i1) = fat_generators(a, &p0, &k0);
    let p1 = FreeModule::new(a.clone(), w, g1).unwrap();
    let k1 = kernels(&p1, &p0, &i1);
    let (g2, i2) = fat_generators(a, &p1, &k1);
    let p2 = FreeModule::new(a.clone(), w, g2).unwrap();
    let k2 = kernels(&p2, &p1, &i2);
    let (g3, i3) = fat_generators(a, &p2, &k2);

    // δ: Hom(P_n, S)_t → Hom(P_(n+1), S)_t picks the idempotent coefficient
    // of each generator of P_n in the images of generators of P_(n+1).
    let coboundary = |lower: &FreeModule<Rationals>, upper: &[Generator], images: &[Vec<Elem>], t: usize, v: usize| {
        let cols: Vec<usize> = (0..lower.generators().len())
            .filter(|&g| lower.generators()[g].degree == t && lower.generators()[g].vertex == v)
            .collect();
        let rows: Vec<usize> = (0..upper.len()).filter(|&h| upper[h].degree == t && upper[h].vertex == v).collect();
        let mut mat = Matrix::zeros(f, rows.len(), cols.len());
        for (r, &h) in rows.iter().enumerate() {
            for (c, &g) in cols.iter().enumerate() {
                mat.set(r, c, images[h][lower.coordinate(g, 0, a.idempotent(v))].clone());
            }
        }
        (cols.len(), mat.rank())
    };
    let levels: [(&FreeModule<Rationals>, &[Generator], &[Vec<Elem>]); 3] =
        [(&p0, p1.generators(), &i1), (&p1, p2.generators(), &i2), (&p2, &g3, &i3)];
    let mut out = BTreeMap::new();
    for t in 0..=w {
        for v in 0..a.num_vertices() {
            let mut prev_rank = 0;
            for (n, (lower, upper, images)) in levels.iter().enumerate() {
                let (dim, rank) = coboundary(lower, upper, images, t, v);
                let h = dim - rank - prev_rank;
                if h > 0 {
                    out.insert((n, t, v), h);
                }
                prev_rank = rank;
            }
        }
    }
    out
}

/// Betti numbers of the minimal resolution against the non-minimal oracle.
pub fn ext_matches_oracle(a: &Alg) -> Check {
    let n = 3;
    let r = resolve_top(a, n);
    let w = r.window();
    let oracle = ext_from_fat_resolution(a, w);
    let mut minimal = BTreeMap::new();
    for (&(k, t, v), &c) in &r.betti_table().entries {
        if k <= 2 && c > 0 {
            minimal.insert((k, t, v), c);
        }
    }
    if minimal == oracle {
        Ok(format!("{} nonzero entries up to degree {w}", oracle.len()))
    } else {
        Err(format!("minimal {minimal:?} vs oracle {oracle:?}"))
    }
}

/// Koszul verdicts of `A` and `A^op`.
pub fn opposite_agrees(a: &Alg, n: usize, k: usize) -> Result<bool, String> {
    let here = koszul_certificate(&resolve_top(a, n), n, k).map_err(|e| e.to_string())?;
    let op = Arc::new(a.opposite());
    let there = koszul_certificate(&resolve_top(&op, n), n, k).map_err(|e| e.to_string())?;
    if here.verdict == there.verdict {
        Ok(here.passes())
    } else {
        Err(format!("A {:?} vs A^op {:?}", here.verdict, there.verdict))
    }
}

/// `pdim A/J` over `A` against `pdim` of its associated graded module over
/// `Gr_J A`, for algebras certified Koszul. `Ok(None)` when not Koszul.
pub fn pdim_matches_gr(a: &Alg, n: usize, k: usize) -> Result<Option<String>, String> {
    let r = resolve_top(a, n);
    if !koszul_certificate(&r, n, k).map_err(|e| e.to_string())?.passes() {
        return Ok(None);
    }
    let gr = Arc::new(associated_graded(a).map_err(|e| e.to_string())?.algebra);
    let rg = resolve_top(&gr, n);
    if r.projective_dimension() == rg.projective_dimension() {
        Ok(Some(r.projective_dimension().to_string()))
    } else {
        Err(format!("{} over A vs {} over Gr", r.projective_dimension(), rg.projective_dimension()))
    }
}
