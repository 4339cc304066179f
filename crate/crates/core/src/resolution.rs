//! Minimal graded projective resolutions, built one projective cover at a time.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::algebra::TruncatedAlgebra;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Matrix, Solver, Subspace};
use crate::module::{cover_of, projective_cover, FreeModule, Generator, GradedModule, ModuleLike};

/// Internal-degree window needed to resolve a module living in degrees
/// `0..=top_degree` up to homological degree `n_max`. Over a finite algebra
/// with top degree `T`, every generator of `P_n` sits in degree at most
/// `top_degree + n T`, and `P_n` itself reaches `T` further. Over an infinite
/// algebra the algebra window is the hard limit.
pub fn resolution_window<F: Field>(alg: &TruncatedAlgebra<F>, top_degree: usize, n_max: usize) -> usize {
    match alg.finite_top() {
        Some(t) => top_degree + (n_max + 1) * t,
        None => alg.window(),
    }
}

/// One step `d_n: P_n → P_(n-1)` (or `P_0 → M`).
#[derive(Debug)]
pub struct Step<F: Field> {
    pub projective: FreeModule<F>,
    /// `d_n(g)` for each generator of `P_n`.
    pub images: Vec<Vec<F::Elem>>,
    /// `d_n` degree by degree.
    pub matrices: Vec<Matrix<F>>,
    /// `Ker d_n = Ω^(n+1)` degree by degree, inside `P_n`.
    pub kernel: Vec<Subspace<F>>,
    solvers: Vec<OnceLock<Solver<F>>>,
}

impl<F: Field> Step<F> {
    pub fn kernel_is_zero(&self) -> bool {
        self.kernel.iter().all(Subspace::is_zero)
    }

    pub fn generators(&self) -> &[Generator] {
        self.projective.generators()
    }
}

/// Minimal graded projective resolution of `target` through `P_(n_max)`.
#[derive(Debug)]
pub struct Resolution<F: Field> {
    target: Arc<GradedModule<F>>,
    n_max: usize,
    steps: Vec<Step<F>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ProjectiveDimension {
    Exact(usize),
    AtLeast(usize),
}

impl fmt::Display for ProjectiveDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectiveDimension::Exact(n) => write!(f, "{n}"),
            ProjectiveDimension::AtLeast(n) => write!(f, ">= {n}"),
        }
    }
}

/// Results of re-checking a finished resolution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionCertificate {
    pub d_squared_zero: bool,
    pub exact: bool,
    pub minimal: bool,
}

impl ResolutionCertificate {
    pub fn holds(&self) -> bool {
        self.d_squared_zero && self.exact && self.minimal
    }
}

impl<F: Field> Resolution<F> {
    /// Resolves `target` inside its own window. Every cover is checked for
    /// surjectivity and minimality as it is built.
    pub fn build(target: Arc<GradedModule<F>>, n_max: usize) -> Result<Self> {
        let first = projective_cover(target.as_ref())?;
        let mut steps = vec![step(first)];
        while steps.len() <= n_max && !steps.last().unwrap().kernel_is_zero() {
            let prev = steps.last().unwrap();
            let cover = cover_of(&prev.projective, &prev.kernel)?;
            steps.push(step(cover));
        }
        Ok(Resolution { target, n_max, steps })
    }

    pub fn target(&self) -> &GradedModule<F> {
        &self.target
    }

    pub fn target_arc(&self) -> &Arc<GradedModule<F>> {
        &self.target
    }

    pub fn algebra(&self) -> &TruncatedAlgebra<F> {
        self.target.algebra()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn window(&self) -> usize {
        self.target.window()
    }

    /// Number of computed steps; `P_n` for `n >= len()` is zero or unknown.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn step(&self, n: usize) -> Option<&Step<F>> {
        self.steps.get(n)
    }

    pub fn steps(&self) -> &[Step<F>] {
        &self.steps
    }

    /// Generators of `P_n`; empty when `P_n = 0`.
    pub fn generators(&self, n: usize) -> &[Generator] {
        self.steps.get(n).map_or(&[], |s| s.generators())
    }

    /// `Ker d_n` in degree `t`, or `None` when `P_n = 0`.
    pub fn kernel(&self, n: usize, t: usize) -> Option<&Subspace<F>> {
        self.steps.get(n).map(|s| &s.kernel[t])
    }

    /// Cached solver for `d_n` in degree `t`.
    pub fn solver(&self, n: usize, t: usize) -> &Solver<F> {
        let s = &self.steps[n];
        s.solvers[t].get_or_init(|| s.matrices[t].solver())
    }

    /// True once a zero syzygy has been reached inside the homological bound.
    pub fn is_finite(&self) -> bool {
        self.steps.last().is_some_and(Step::kernel_is_zero)
    }

    pub fn projective_dimension(&self) -> ProjectiveDimension {
        if self.is_finite() {
            ProjectiveDimension::Exact(self.steps.len() - 1)
        } else {
            ProjectiveDimension::AtLeast(self.n_max + 1)
        }
    }

    /// The syzygy `Ω^n = Ker d_(n-1)` as a module (`Ω^0 = M`).
    pub fn syzygy(&self, n: usize) -> Result<GradedModule<F>> {
        if n == 0 {
            return Ok(self.target.as_ref().clone());
        }
        match self.steps.get(n - 1) {
            Some(s) => s.projective.to_graded()?.submodule(&s.kernel),
            None => GradedModule::zero(self.target.algebra_arc().clone(), self.window()),
        }
    }

    pub fn betti_table(&self) -> BettiTable {
        let mut entries = BTreeMap::new();
        for (n, s) in self.steps.iter().enumerate() {
            for g in s.generators() {
                *entries.entry((n, g.degree, g.vertex)).or_insert(0) += 1;
            }
        }
        BettiTable {
            vertex_names: self.algebra().vertex_names().to_vec(),
            entries,
        }
    }

    /// Re-checks `d∘d = 0`, degreewise exactness by rank, and `Im d_(n+1) ⊆ J P_n`.
    pub fn certify(&self) -> ResolutionCertificate {
        let mut cert = ResolutionCertificate {
            d_squared_zero: true,
            exact: true,
            minimal: true,
        };
        for t in 0..=self.window() {
            let target_dim = self.target.dim(t);
            if self.steps[0].matrices[t].rank() != target_dim {
                cert.exact = false;
            }
            for n in 1..self.steps.len() {
                let (lower, upper) = (&self.steps[n - 1], &self.steps[n]);
                if !lower.matrices[t].mul(&upper.matrices[t]).is_zero() {
                    cert.d_squared_zero = false;
                }
                let rank = upper.matrices[t].rank();
                if rank != lower.kernel[t].dim() {
                    cert.exact = false;
                }
                if !upper.matrices[t].image().is_subspace_of(&lower.projective.radical_power(1, t)) {
                    cert.minimal = false;
                }
            }
        }
        cert
    }

    /// Pass iff every `P_n` is generated in degree `n + l`, where `l` is the
    /// single generating degree of the target.
    pub fn linearity_check(&self) -> Result<LinearityReport> {
        let degrees: Vec<usize> = self.generators(0).iter().map(|g| g.degree).collect();
        let l = degrees[0];
        if degrees.iter().any(|&d| d != l) {
            return Err(Error::Precondition("target is not generated in a single degree".into()));
        }
        let mut witness = None;
        'outer: for (n, s) in self.steps.iter().enumerate() {
            let mut degs: Vec<usize> = s.generators().iter().map(|g| g.degree).collect();
            degs.sort_unstable();
            for t in degs {
                if t != n + l {
                    witness = Some((n, t));
                    break 'outer;
                }
            }
        }
        Ok(LinearityReport {
            generated_in: l,
            pass: witness.is_none(),
            witness,
        })
    }
}

fn step<F: Field>(cover: crate::module::Cover<F>) -> Step<F> {
    let solvers = (0..cover.matrices.len()).map(|_| OnceLock::new()).collect();
    Step {
        projective: cover.projective,
        images: cover.images,
        matrices: cover.matrices,
        kernel: cover.kernel,
        solvers,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearityReport {
    pub generated_in: usize,
    pub pass: bool,
    /// First Betti entry `(n, t)` off the line `t = n + l`.
    pub witness: Option<(usize, usize)>,
}

/// Cover multiplicities `(n, t, vertex) → count`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "BettiRepr", from = "BettiRepr")]
pub struct BettiTable {
    pub vertex_names: Vec<String>,
    pub entries: BTreeMap<(usize, usize, usize), usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct BettiEntry {
    n: usize,
    t: usize,
    vertex: String,
    multiplicity: usize,
}

#[derive(Clone, Serialize, Deserialize)]
struct BettiRepr {
    vertices: Vec<String>,
    entries: Vec<BettiEntry>,
}

impl From<BettiTable> for BettiRepr {
    fn from(b: BettiTable) -> Self {
        let entries = b
            .entries
            .iter()
            .map(|(&(n, t, v), &m)| BettiEntry {
                n,
                t,
                vertex: b.vertex_names[v].clone(),
                multiplicity: m,
            })
            .collect();
        BettiRepr {
            vertices: b.vertex_names,
            entries,
        }
    }
}

impl From<BettiRepr> for BettiTable {
    fn from(r: BettiRepr) -> Self {
        let entries = r
            .entries
            .iter()
            .map(|e| {
                let v = r.vertices.iter().position(|x| *x == e.vertex).unwrap_or(usize::MAX);
                ((e.n, e.t, v), e.multiplicity)
            })
            .collect();
        BettiTable {
            vertex_names: r.vertices,
            entries,
        }
    }
}

impl BettiTable {
    pub fn get(&self, n: usize, t: usize, vertex: usize) -> usize {
        self.entries.get(&(n, t, vertex)).copied().unwrap_or(0)
    }

    /// Multiplicity summed over vertices.
    pub fn total(&self, n: usize, t: usize) -> usize {
        self.entries
            .iter()
            .filter(|((m, s, _), _)| *m == n && *s == t)
            .map(|(_, c)| c)
            .sum()
    }

    /// Grid with internal degrees down and homological degrees across;
    /// entries are totals over vertices.
    pub fn to_text(&self) -> String {
        let nmax = self.entries.keys().map(|k| k.0).max().unwrap_or(0);
        let tmax = self.entries.keys().map(|k| k.1).max().unwrap_or(0);
        let width = self
            .entries
            .values()
            .map(|c| c.to_string().len())
            .max()
            .unwrap_or(1)
            .max(nmax.to_string().len())
            .max(1);
        let tw = tmax.to_string().len().max(1);
        let mut out = format!("{:>tw$} |", "t");
        for n in 0..=nmax {
            out.push_str(&format!(" {n:>width$}"));
        }
        out.push('\n');
        out.push_str(&"-".repeat(tw + 2 + (nmax + 1) * (width + 1)));
        out.push('\n');
        for t in 0..=tmax {
            out.push_str(&format!("{t:>tw$} |"));
            for n in 0..=nmax {
                let c = self.total(n, t);
                let cell = if c == 0 { ".".to_string() } else { c.to_string() };
                out.push_str(&format!(" {cell:>width$}"));
            }
            out.push('\n');
        }
        out
    }
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

    fn resolve_s(a: &Arc<TruncatedAlgebra<Rationals>>, n_max: usize) -> Resolution<Rationals> {
        let w = resolution_window(a, 0, n_max);
        let s = GradedModule::semisimple_top(a.clone(), w).unwrap();
        Resolution::build(Arc::new(s), n_max).unwrap()
    }

    #[test]
    fn dual_numbers_diagonal() {
        let a = alg(r#""v""#, r#"{name="x", from="v", to="v", weight=1}"#, r#""x*x""#, 4, 1);
        let r = resolve_s(&a, 3);
        assert!(r.certify().holds());
        let b = r.betti_table();
        assert_eq!(b.entries.len(), 4);
        for n in 0..=3 {
            assert_eq!(b.get(n, n, 0), 1);
        }
        assert_eq!(r.projective_dimension(), ProjectiveDimension::AtLeast(4));
        assert!(r.linearity_check().unwrap().pass);
        assert!(b.to_text().contains("3 |"));
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(serde_json::from_str::<BettiTable>(&json).unwrap(), b);
    }

    #[test]
    fn hereditary_a2() {
        let a = alg(r#""a", "b""#, r#"{name="al", from="a", to="b", weight=1}"#, "", 3, 1);
        let s = GradedModule::simple(a.clone(), 0, 0, 2).unwrap();
        let r = Resolution::build(Arc::new(s), 4).unwrap();
        assert_eq!(r.projective_dimension(), ProjectiveDimension::Exact(1));
        assert_eq!(r.generators(1), &[Generator { vertex: 1, degree: 1, weight: 1 }]);
        let b = r.betti_table();
        assert!(b.entries.keys().all(|k| k.0 <= 1));
        let p = GradedModule::projective(a.clone(), 0, 0, 2).unwrap();
        let rp = Resolution::build(Arc::new(p), 4).unwrap();
        assert_eq!(rp.projective_dimension(), ProjectiveDimension::Exact(0));
    }

    #[test]
    fn ungraded_cubic() {
        let a = alg(r#""v""#, r#"{name="x", from="v", to="v", weight=0}"#, r#""x*x*x""#, 1, 3);
        let r = resolve_s(&a, 4);
        assert!(r.certify().holds());
        for n in 0..=4 {
            assert_eq!(r.generators(n).len(), 1);
        }
        // d_1 is multiplication by x, d_2 by x².
        let x_col = r.step(1).unwrap().images[0].clone();
        let rad2 = r.step(0).unwrap().projective.radical_power(2, 0);
        let rad1 = r.step(0).unwrap().projective.radical_power(1, 0);
        assert!(rad1.contains(&x_col) && !rad2.contains(&x_col));
        let x2_col = r.step(2).unwrap().images[0].clone();
        assert!(rad2.contains(&x2_col));
    }

    #[test]
    fn gr_sjodin_fails_linearity() {
        let a = alg(
            r#""v""#,
            r#"{name="x", from="v", to="v", weight=0}, {name="y", from="v", to="v", weight=0}"#,
            r#""x*x + y*y*y", "x*y", "y*x""#,
            1,
            4,
        );
        let gr = Arc::new(associated_graded(&a).unwrap().algebra);
        let r = resolve_s(&gr, 2);
        let b = r.betti_table();
        assert_eq!(b.get(2, 4, 0), 1);
        assert_eq!(b.get(2, 2, 0), 3);
        let lin = r.linearity_check().unwrap();
        assert_eq!(lin.witness, Some((2, 4)));
        assert!(r.certify().holds());
    }

    #[test]
    fn semisimple_is_linear() {
        let a = alg(r#""a", "b""#, "", "", 2, 1);
        let r = resolve_s(&a, 3);
        assert_eq!(r.projective_dimension(), ProjectiveDimension::Exact(0));
        assert!(r.linearity_check().unwrap().pass);
    }
}
