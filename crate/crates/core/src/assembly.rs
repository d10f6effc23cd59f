//! Finite-difference pencils `K x = λ M x` for the scalar, coupled-system and clamped
//! fourth-order problems.
//!
//! The operator is discretized in flux form, `𝓛u = e^η div(e^{-η} T∇u)`, with the face
//! coefficients of `e^{-η}T` averaged arithmetically between adjacent nodes and the mixed
//! derivatives handled by the nine-point cross stencil. With that choice `W·𝓛_h` is
//! symmetric (`W` the nodal weights `e^{-η}·volume`), which is the discrete weighted
//! integration by parts identity. Stiffness matrices therefore carry the weight and
//! cell volume; the mass matrix is `M = diag(e^{-η}·h^n)` over interior unknowns.

use serde::{Deserialize, Serialize};

use crate::domain::{DiscreteDomain, GridScalarField, GridTensorField, SymTensor};
use crate::sparse::{CsrMatrix, Triplets};
use crate::{Error, Result};

/// Symmetrization defect tolerated for second-order pencils.
pub const SECOND_ORDER_DEFECT_LIMIT: f64 = 1e-10;
/// Symmetrization defect tolerated for the composed fourth-order pencil.
pub const FOURTH_ORDER_DEFECT_LIMIT: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    ScalarSecondOrder,
    #[serde(alias = "vector_system")]
    SecondOrderSystem,
    FourthOrderClamped,
}

impl ProblemKind {
    pub fn is_second_order(self) -> bool {
        !matches!(self, ProblemKind::FourthOrderClamped)
    }
}

/// Symmetric stiffness `K` and positive diagonal mass `M`.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub k: CsrMatrix,
    pub m: Vec<f64>,
    pub kind: ProblemKind,
    pub alpha: f64,
    /// Unknowns per interior node (n for the coupled system, 1 otherwise).
    pub components: usize,
    pub domain: DiscreteDomain,
    /// Relative defect `max|K − Kᵀ|/max|K|` removed by symmetrization; for the fourth-order
    /// problem, the larger of that and the mismatch between the Gram form and the direct
    /// composition of the discrete operator with itself.
    pub symmetry_defect: f64,
}

impl Pencil {
    pub fn dim(&self) -> usize {
        self.m.len()
    }

    /// Self-adjointness defect `|xᵀKy − yᵀKx|` for the given vectors.
    pub fn bilinear_defect(&self, x: &[f64], y: &[f64]) -> f64 {
        let kx = self.k.matvec(x);
        let ky = self.k.matvec(y);
        let a: f64 = y.iter().zip(&kx).map(|(u, v)| u * v).sum();
        let b: f64 = x.iter().zip(&ky).map(|(u, v)| u * v).sum();
        (a - b).abs()
    }

    /// Coordinate triplets of `K` and `M`.
    pub fn triplet_dumps(&self) -> (String, String) {
        (
            self.k.to_triplet_text(),
            CsrMatrix::diagonal(&self.m).to_triplet_text(),
        )
    }
}

struct Coefficients {
    /// `e^{-η}T` per node.
    c: Vec<SymTensor>,
    /// `e^{-η}` per node.
    w: Vec<f64>,
}

fn coefficients(t: &GridTensorField, eta: &GridScalarField, dom: &DiscreteDomain) -> Result<Coefficients> {
    if t.values().len() != dom.node_count() || t.dim() != dom.dim() {
        return Err(Error::DimensionMismatch("tensor field does not match domain".into()));
    }
    if eta.values().len() != dom.node_count() {
        return Err(Error::DimensionMismatch("η field does not match domain".into()));
    }
    let w: Vec<f64> = eta.values().iter().map(|e| (-e).exp()).collect();
    let c = t.values().iter().zip(&w).map(|(m, &wi)| m.scaled(wi)).collect();
    Ok(Coefficients { c, w })
}

/// Nodal stencil of `div(e^{-η}T∇u)` at node `p`. A missing neighbour across a face is
/// replaced by its mirror image (even reflection of both `u` and the coefficient).
fn flux_stencil(dom: &DiscreteDomain, coef: &Coefficients, p: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(9);
    let n = dom.dim();
    for a in 0..n {
        let h2 = dom.spacing()[a].powi(2);
        let plus = dom.neighbor(p, a, 1);
        let minus = dom.neighbor(p, a, -1);
        let (plus, minus) = match (plus, minus) {
            (Some(q), Some(r)) => (q, r),
            (None, Some(r)) => (r, r),
            (Some(q), None) => (q, q),
            (None, None) => unreachable!("resolution ≥ 4"),
        };
        let caa = |node: usize| coef.c[node].entry(a, a);
        let a_plus = 0.5 * (caa(p) + caa(plus));
        let a_minus = 0.5 * (caa(p) + caa(minus));
        out.push((plus, a_plus / h2));
        out.push((minus, a_minus / h2));
        out.push((p, -(a_plus + a_minus) / h2));
    }
    if n == 2 && !dom.is_boundary(p) {
        let hxy = 4.0 * dom.spacing()[0] * dom.spacing()[1];
        let sx = dom.stride(0) as isize;
        let sy = dom.stride(1) as isize;
        let at = |dx: isize, dy: isize| (p as isize + dx * sx + dy * sy) as usize;
        let cxy = |node: usize| coef.c[node].xy;
        // ∂x(c ∂y u) + ∂y(c ∂x u)
        for (dx, dy) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let sign = (dx * dy) as f64;
            let v = sign * (cxy(at(dx, 0)) + cxy(at(0, dy))) / hxy;
            out.push((at(dx, dy), v));
        }
    }
    out
}

fn finish(k: CsrMatrix, limit: f64) -> Result<(CsrMatrix, f64)> {
    let (k, defect) = k.symmetrized();
    if defect > limit {
        return Err(Error::SymmetryDefect { defect, limit });
    }
    Ok((k, defect))
}

fn interior_mass(dom: &DiscreteDomain, coef: &Coefficients, components: usize) -> Vec<f64> {
    let vol = dom.cell_volume();
    dom.interior_nodes()
        .iter()
        .flat_map(|&node| std::iter::repeat_n(coef.w[node] * vol, components))
        .collect()
}

/// Dirichlet stiffness `a(u, v) = ∫⟨T∇u, ∇v⟩e^{-η}` over interior unknowns, spread over
/// `components` interleaved copies.
fn scalar_stiffness(dom: &DiscreteDomain, coef: &Coefficients, components: usize) -> CsrMatrix {
    let n = dom.interior_count() * components;
    let vol = dom.cell_volume();
    let mut t = Triplets::new(n, n);
    for (row, &p) in dom.interior_nodes().iter().enumerate() {
        for (q, v) in flux_stencil(dom, coef, p) {
            if let Some(col) = dom.interior_index(q) {
                for c in 0..components {
                    t.push(row * components + c, col * components + c, -v * vol);
                }
            }
        }
    }
    t.into_csr()
}

pub fn assemble_scalar(t: &GridTensorField, eta: &GridScalarField, dom: &DiscreteDomain) -> Result<Pencil> {
    let coef = coefficients(t, eta, dom)?;
    let (k, defect) = finish(scalar_stiffness(dom, &coef, 1), SECOND_ORDER_DEFECT_LIMIT)?;
    Ok(Pencil {
        k,
        m: interior_mass(dom, &coef, 1),
        kind: ProblemKind::ScalarSecondOrder,
        alpha: 0.0,
        components: 1,
        domain: dom.clone(),
        symmetry_defect: defect,
    })
}

/// Discrete `div_η` on cell midpoints, mapping interleaved interior unknowns to one
/// value per cell (cells ordered like nodes, first axis fastest), and the quadrature
/// weights `e^{-η(c)}·cell volume`.
///
/// Each derivative is the centered difference across the cell averaged over the
/// opposite faces, and `u`, `η` at the midpoint are corner averages, so the midpoint
/// rule makes `Σ w (div_η u)²` a second-order approximation of `‖div_η u‖²` in
/// `L²(e^{-η})` with a consistent Euler-Lagrange stencil up to the boundary.
pub fn div_eta_operator(dom: &DiscreteDomain, eta: &GridScalarField) -> Result<(CsrMatrix, Vec<f64>)> {
    if eta.values().len() != dom.node_count() {
        return Err(Error::DimensionMismatch("η field does not match domain".into()));
    }
    let n = dom.dim();
    let cells_per_axis = dom.resolution();
    let cell_count = cells_per_axis.pow(n as u32);
    let corners = 1usize << n;
    let share = 1.0 / corners as f64;
    let mut t = Triplets::new(cell_count, dom.interior_count() * n);
    let mut weights = Vec::with_capacity(cell_count);
    let mut idx = vec![0usize; n];
    for cell in 0..cell_count {
        let mut rem = cell;
        for slot in idx.iter_mut() {
            *slot = rem % cells_per_axis;
            rem /= cells_per_axis;
        }
        let corner_nodes: Vec<usize> = (0..corners)
            .map(|mask| {
                let c: Vec<usize> = (0..n).map(|a| idx[a] + (mask >> a & 1)).collect();
                dom.node_at(&c)
            })
            .collect();
        let eta_mid: f64 = corner_nodes.iter().map(|&p| eta.at(p)).sum::<f64>() * share;
        let grad_eta: Vec<f64> = (0..n)
            .map(|a| {
                let h = dom.spacing()[a];
                corner_nodes
                    .iter()
                    .enumerate()
                    .map(|(mask, &p)| if mask >> a & 1 == 1 { eta.at(p) } else { -eta.at(p) })
                    .sum::<f64>()
                    * 2.0
                    * share
                    / h
            })
            .collect();
        for (mask, &p) in corner_nodes.iter().enumerate() {
            let Some(col) = dom.interior_index(p) else { continue };
            for a in 0..n {
                let h = dom.spacing()[a];
                let sign = if mask >> a & 1 == 1 { 1.0 } else { -1.0 };
                t.push(cell, col * n + a, sign * 2.0 * share / h - share * grad_eta[a]);
            }
        }
        weights.push((-eta_mid).exp() * dom.cell_volume());
    }
    Ok((t.into_csr(), weights))
}

/// Coupled system `𝓛u + α∇(div_η u) = −σu` on a box, `u` vanishing on the boundary.
/// Unknowns are interleaved per node: index `p·n + a` for component `a`.
pub fn assemble_vector_system(
    t: &GridTensorField,
    eta: &GridScalarField,
    dom: &DiscreteDomain,
    alpha: f64,
) -> Result<Pencil> {
    if dom.is_arc() {
        return Err(Error::Unsupported(
            "the coupled system is posed on flat boxes only".into(),
        ));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("α must be non-negative, got {alpha}")));
    }
    let coef = coefficients(t, eta, dom)?;
    let n = dom.dim();
    let mut k = scalar_stiffness(dom, &coef, n);
    if alpha > 0.0 {
        let (d, w) = div_eta_operator(dom, eta)?;
        let scaled: Vec<f64> = w.iter().map(|v| alpha * v).collect();
        k = k.add(&d.gram(&scaled));
    }
    let (k, defect) = finish(k, SECOND_ORDER_DEFECT_LIMIT)?;
    Ok(Pencil {
        k,
        m: interior_mass(dom, &coef, n),
        kind: ProblemKind::SecondOrderSystem,
        alpha,
        components: n,
        domain: dom.clone(),
        symmetry_defect: defect,
    })
}

/// Clamped problem `𝓛²u = Γu`, `u = ∂u/∂ν_T = 0`.
///
/// The discrete `𝓛` is applied to interior unknowns on the extended grid: boundary nodes
/// carry `u = 0` and ghost nodes carry the even reflection `u_ghost = u_mirror`, which
/// imposes `∂u/∂ν_T = T_νν ∂u/∂ν = 0` to second order when `T` is diagonal next to the
/// boundary. With `L` that map (all nodes ← interior unknowns) the stiffness is the Gram
/// form `K = Lᵀ W̃ L`, `W̃ = e^{-η}·dual volume`; it coincides with the direct composition
/// `W 𝓛_h (L u)` and the mismatch is recorded as the defect.
pub fn assemble_fourth_order_clamped(
    t: &GridTensorField,
    eta: &GridScalarField,
    dom: &DiscreteDomain,
) -> Result<Pencil> {
    let coef = coefficients(t, eta, dom)?;
    if dom.dim() == 2 {
        for node in 0..dom.node_count() {
            let near_boundary = dom.is_boundary(node)
                || (0..2).any(|a| {
                    [-1, 1].iter().any(|&o| {
                        dom.neighbor(node, a, o).is_some_and(|q| dom.is_boundary(q))
                    })
                });
            if near_boundary && !t.is_diagonal_at(node) {
                return Err(Error::Unsupported(format!(
                    "clamped problem needs T diagonal in the band next to the boundary; node {node} at {:?} has T_xy = {}",
                    dom.coords(node),
                    t.at(node).xy
                )));
            }
        }
    }

    let ni = dom.interior_count();
    let mut lt = Triplets::new(dom.node_count(), ni);
    for p in 0..dom.node_count() {
        for (q, v) in flux_stencil(dom, &coef, p) {
            if let Some(col) = dom.interior_index(q) {
                lt.push(p, col, v / coef.w[p]);
            }
        }
    }
    let l = lt.into_csr();
    let weights: Vec<f64> = (0..dom.node_count())
        .map(|p| coef.w[p] * dom.dual_volume(p))
        .collect();
    let gram = l.gram(&weights);

    // direct composition W·𝓛_h(Lu) on interior rows
    let vol = dom.cell_volume();
    let mut ct = Triplets::new(ni, ni);
    for (row, &p) in dom.interior_nodes().iter().enumerate() {
        for (q, v) in flux_stencil(dom, &coef, p) {
            for (col, lv) in l.row(q) {
                ct.push(row, col, vol * v * lv);
            }
        }
    }
    let composed = ct.into_csr();
    let scale = gram.max_abs();
    let mismatch = gram
        .iter()
        .map(|(r, c, v)| (v - composed.get(r, c)).abs())
        .chain(composed.iter().map(|(r, c, v)| (v - gram.get(r, c)).abs()))
        .fold(0.0, f64::max)
        / scale;

    let (k, defect) = finish(gram, FOURTH_ORDER_DEFECT_LIMIT)?;
    let defect = defect.max(mismatch);
    if defect > FOURTH_ORDER_DEFECT_LIMIT {
        return Err(Error::SymmetryDefect {
            defect,
            limit: FOURTH_ORDER_DEFECT_LIMIT,
        });
    }
    Ok(Pencil {
        k,
        m: interior_mass(dom, &coef, 1),
        kind: ProblemKind::FourthOrderClamped,
        alpha: 0.0,
        components: 1,
        domain: dom.clone(),
        symmetry_defect: defect,
    })
}

/// Dispatches on the problem kind; `alpha` is used by the coupled system only.
pub fn assemble(
    kind: ProblemKind,
    t: &GridTensorField,
    eta: &GridScalarField,
    dom: &DiscreteDomain,
    alpha: f64,
) -> Result<Pencil> {
    match kind {
        ProblemKind::ScalarSecondOrder => assemble_scalar(t, eta, dom),
        ProblemKind::SecondOrderSystem => assemble_vector_system(t, eta, dom, alpha),
        ProblemKind::FourthOrderClamped => assemble_fourth_order_clamped(t, eta, dom),
    }
}
