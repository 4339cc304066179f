//! Quasi-Koszul and Koszul certificates on minimal resolutions.
//!
//! Cell `(n, k)` compares `J^k Ker d_n` with `Ker d_n ∩ J^(k+1) P_n`. The
//! first is always contained in the second for a minimal resolution; the
//! module is Koszul in the window when they agree everywhere, quasi-Koszul
//! when they agree for `k = 1`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::TruncatedAlgebra;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Subspace;
use crate::module::{radical_image, GradedModule, ModuleLike};
use crate::resolution::{resolution_window, LinearityReport, Resolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Quasi,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PassInWindow,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub n: usize,
    pub k: usize,
    pub lhs: usize,
    pub rhs: usize,
    pub eq: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateWindow {
    pub n_max: usize,
    pub k_max: usize,
    #[serde(rename = "D")]
    pub degree: usize,
}

/// A vector of `Ker d_n ∩ J^(k+1) P_n` outside `J^k Ker d_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub vertex: String,
    /// Coordinates in `(P_n)_t`, rendered in the working field.
    pub vector: Vec<String>,
    /// The same vector as a combination of `algebra element · generator`.
    pub expression: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KoszulCertificate {
    pub mode: Mode,
    pub window: CertificateWindow,
    pub cells: Vec<Cell>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl KoszulCertificate {
    pub fn passes(&self) -> bool {
        self.verdict == Verdict::PassInWindow
    }

    pub fn cell(&self, n: usize, k: usize) -> Option<&Cell> {
        self.cells.iter().find(|c| c.n == n && c.k == k)
    }

    /// First failing cell in `(n, k)` order.
    pub fn first_failure(&self) -> Option<&Cell> {
        self.cells.iter().find(|c| !c.eq)
    }
}

struct CellData {
    cell: Cell,
    witness: Option<Witness>,
}

fn cells_for_degree<F: Field>(r: &Resolution<F>, n: usize, k_max: usize) -> Result<Vec<CellData>> {
    let f = r.algebra().field();
    let window = r.window();
    let Some(step) = r.step(n) else {
        return Ok((1..=k_max)
            .map(|k| CellData {
                cell: Cell { n, k, lhs: 0, rhs: 0, eq: true },
                witness: None,
            })
            .collect());
    };
    let p = &step.projective;
    let mut lhs_layer: Vec<Subspace<F>> = step.kernel.clone();
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        lhs_layer = radical_image(p, &lhs_layer);
        let rhs: Vec<Subspace<F>> = (0..=window)
            .into_par_iter()
            .map(|t| step.kernel[t].intersect(&p.radical_power(k + 1, t)))
            .collect::<Result<_>>()?;
        let mut lhs_dim = 0;
        let mut rhs_dim = 0;
        let mut witness = None;
        for t in 0..=window {
            if !lhs_layer[t].is_subspace_of(&rhs[t]) {
                return Err(Error::Module(format!(
                    "J^{k} Ker d_{n} is not inside Ker d_{n} ∩ J^{} P_{n} in degree {t}; the resolution is not minimal",
                    k + 1
                )));
            }
            lhs_dim += lhs_layer[t].dim();
            rhs_dim += rhs[t].dim();
            if witness.is_none() {
                if let Some(v) = rhs[t].witness_outside(&lhs_layer[t]) {
                    let pivot = v.iter().position(|c| !f.is_zero(c)).expect("nonzero witness");
                    let slot = p.slot(t, pivot);
                    let expression = v
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !f.is_zero(c))
                        .map(|(i, c)| {
                            let (g, s, a) = p.decode(t, i);
                            format!("{}*{}·g{g}", f.render(c), r.algebra().element(s, a).label)
                        })
                        .collect::<Vec<_>>()
                        .join(" + ");
                    witness = Some(Witness {
                        n,
                        k,
                        t,
                        vertex: r.algebra().vertex_names()[slot.vertex].clone(),
                        vector: v.iter().map(|c| f.render(c)).collect(),
                        expression,
                    });
                }
            }
        }
        out.push(CellData {
            cell: Cell {
                n,
                k,
                lhs: lhs_dim,
                rhs: rhs_dim,
                eq: lhs_dim == rhs_dim,
            },
            witness,
        });
    }
    Ok(out)
}

fn certificate<F: Field>(r: &Resolution<F>, mode: Mode, n_max: usize, k_max: usize) -> Result<KoszulCertificate> {
    let n_max = n_max.min(r.n_max());
    let per_n: Vec<Vec<CellData>> = (0..=n_max)
        .into_par_iter()
        .map(|n| cells_for_degree(r, n, k_max))
        .collect::<Result<_>>()?;
    let mut cells = Vec::new();
    let mut witness = None;
    for data in per_n.into_iter().flatten() {
        if witness.is_none() && !data.cell.eq {
            witness = data.witness;
        }
        cells.push(data.cell);
    }
    let verdict = if cells.iter().all(|c| c.eq) {
        Verdict::PassInWindow
    } else {
        Verdict::Fail
    };
    Ok(KoszulCertificate {
        mode,
        window: CertificateWindow {
            n_max,
            k_max,
            degree: r.window(),
        },
        cells,
        verdict,
        witness,
    })
}

/// `J Ker d_n = Ker d_n ∩ J² P_n` for `n ≤ n_max`.
pub fn quasi_koszul_certificate<F: Field>(r: &Resolution<F>, n_max: usize) -> Result<KoszulCertificate> {
    certificate(r, Mode::Quasi, n_max, 1)
}

/// `J^k Ker d_n = Ker d_n ∩ J^(k+1) P_n` for `n ≤ n_max`, `1 ≤ k ≤ k_max`.
pub fn koszul_certificate<F: Field>(r: &Resolution<F>, n_max: usize, k_max: usize) -> Result<KoszulCertificate> {
    certificate(r, Mode::Full, n_max, k_max)
}

/// Linearity of the resolution of `S` against the full certificate, for
/// algebras whose degree-0 part is semisimple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalCrossCheck {
    pub linearity: LinearityReport,
    pub certificate: KoszulCertificate,
    pub agree: bool,
}

pub fn classical_cross_check<F: Field>(
    a: &Arc<TruncatedAlgebra<F>>,
    n_max: usize,
    k_max: usize,
) -> Result<ClassicalCrossCheck> {
    if a.dim(0) != a.num_vertices() {
        return Err(Error::Precondition(
            "the degree-0 part is not semisimple; linearity is not comparable".into(),
        ));
    }
    let w = resolution_window(a, 0, n_max);
    let s = GradedModule::semisimple_top(a.clone(), w)?;
    let r = Resolution::build(Arc::new(s), n_max)?;
    let linearity = r.linearity_check()?;
    let certificate = koszul_certificate(&r, n_max, k_max)?;
    let agree = linearity.pass == certificate.passes();
    Ok(ClassicalCrossCheck {
        linearity,
        certificate,
        agree,
    })
}
