//! Sup/inf quantities of the coefficient fields that enter every eigenvalue bound.
//!
//! Suprema over the closed domain are taken over all grid nodes, boundary included.
//! Derivatives use centered differences in the interior and second-order one-sided
//! differences on the faces, so nodal suprema converge at O(h²).

use serde::{Deserialize, Serialize};

use crate::domain::{DiscreteDomain, EtaPreset, GridScalarField, GridTensorField, TensorPreset};
use crate::{Error, Result};

/// `ε, δ, T₀, η₀, C₀, H₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorConstants {
    /// Infimum of the smallest eigenvalue of T.
    pub epsilon: f64,
    /// Supremum of the largest eigenvalue of T.
    pub delta: f64,
    /// `sup |tr(∇T)|`.
    pub t0: f64,
    /// `sup |∇η|`.
    pub eta0: f64,
    /// `sup {½ div(T(T∇η − tr∇T)) − ¼|T∇η|²}`; any sign.
    pub c0: f64,
    /// Supremum of the generalized mean curvature `|𝐇_T|`; zero for flat boxes.
    pub h0: f64,
}

impl OperatorConstants {
    /// Constants of `T = I`, `η` constant on a flat domain.
    pub fn flat_identity() -> Self {
        Self {
            epsilon: 1.0,
            delta: 1.0,
            t0: 0.0,
            eta0: 0.0,
            c0: 0.0,
            h0: 0.0,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= self.delta) {
            return Err(Error::InvalidInput(format!(
                "constants require 0 < ε ≤ δ, got ε = {}, δ = {}",
                self.epsilon, self.delta
            )));
        }
        if self.t0 < 0.0 || self.eta0 < 0.0 || self.h0 < 0.0 {
            return Err(Error::InvalidInput("T₀, η₀, H₀ must be non-negative".into()));
        }
        Ok(())
    }
}

fn check_sizes(t: &GridTensorField, eta: Option<&GridScalarField>, dom: &DiscreteDomain) -> Result<()> {
    if t.values().len() != dom.node_count() || t.dim() != dom.dim() {
        return Err(Error::DimensionMismatch("tensor field does not match domain".into()));
    }
    if let Some(eta) = eta {
        if eta.values().len() != dom.node_count() {
            return Err(Error::DimensionMismatch("η field does not match domain".into()));
        }
    }
    Ok(())
}

/// The vector `tr(∇T)` at each node, with components `Σ_j ∂_j T_ij`.
pub fn trace_nabla_t(t: &GridTensorField, dom: &DiscreteDomain) -> Result<Vec<Vec<f64>>> {
    check_sizes(t, None, dom)?;
    let n = dom.dim();
    let entry: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| t.values().iter().map(|m| m.entry(i, j)).collect())
                .collect()
        })
        .collect();
    Ok((0..dom.node_count())
        .map(|node| {
            (0..n)
                .map(|i| (0..n).map(|j| dom.derivative(&entry[i][j], node, j)).sum())
                .collect()
        })
        .collect())
}

/// The bracket `½ div(T(T∇η − tr∇T)) − ¼|T∇η|²` at every node.
pub fn c0_pointwise(t: &GridTensorField, eta: &GridScalarField, dom: &DiscreteDomain) -> Result<Vec<f64>> {
    check_sizes(t, Some(eta), dom)?;
    let n = dom.dim();
    let tr = trace_nabla_t(t, dom)?;
    let t_grad_eta: Vec<Vec<f64>> = (0..dom.node_count())
        .map(|node| t.at(node).apply(n, &dom.gradient(eta.values(), node)))
        .collect();
    // components of the flux T(T∇η − tr∇T), stored per axis for differentiation
    let mut flux = vec![vec![0.0; dom.node_count()]; n];
    for node in 0..dom.node_count() {
        let w: Vec<f64> = (0..n).map(|a| t_grad_eta[node][a] - tr[node][a]).collect();
        let v = t.at(node).apply(n, &w);
        for a in 0..n {
            flux[a][node] = v[a];
        }
    }
    Ok((0..dom.node_count())
        .map(|node| {
            let div: f64 = (0..n).map(|a| dom.derivative(&flux[a], node, a)).sum();
            let sq: f64 = t_grad_eta[node].iter().map(|v| v * v).sum();
            0.5 * div - 0.25 * sq
        })
        .collect())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn compute_constants(
    t: &GridTensorField,
    eta: &GridScalarField,
    dom: &DiscreteDomain,
) -> Result<OperatorConstants> {
    check_sizes(t, Some(eta), dom)?;
    let n = dom.dim();
    let mut epsilon = f64::INFINITY;
    let mut delta = f64::NEG_INFINITY;
    for (node, m) in t.values().iter().enumerate() {
        let (lo, hi) = m.eigenvalues(n);
        if !(lo > 0.0) {
            return Err(Error::NotSpd {
                node,
                coords: dom.coords(node),
                min_eigenvalue: lo,
            });
        }
        epsilon = epsilon.min(lo);
        delta = delta.max(hi);
    }
    let t0 = trace_nabla_t(t, dom)?
        .iter()
        .map(|v| norm(v))
        .fold(0.0, f64::max);
    let eta0 = (0..dom.node_count())
        .map(|node| norm(&dom.gradient(eta.values(), node)))
        .fold(0.0, f64::max);
    let c0 = c0_pointwise(t, eta, dom)?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    // an arc of curvature κ has 𝐇_T = t(s)·κ·ν in intrinsic dimension one
    let h0 = if dom.is_arc() {
        t.values().iter().map(|m| m.xx.abs()).fold(0.0, f64::max) * dom.curvature()
    } else {
        0.0
    };
    Ok(OperatorConstants {
        epsilon,
        delta,
        t0,
        eta0,
        c0,
        h0,
    })
}

/// Closed-form constants for the preset combinations where they are elementary.
pub fn closed_form_constants(
    eta: &EtaPreset,
    tensor: &TensorPreset,
    dom: &DiscreteDomain,
) -> Option<OperatorConstants> {
    let n = dom.dim();
    let lengths = dom.lengths();
    let corners: Vec<Vec<f64>> = (0..(1usize << n))
        .map(|mask| (0..n).map(|a| if mask >> a & 1 == 1 { lengths[a] } else { 0.0 }).collect())
        .collect();

    // constant tensor as (xx, xy, yy)
    let constant: Option<[f64; 3]> = match tensor {
        TensorPreset::Identity {} => Some([1.0, 0.0, 1.0]),
        TensorPreset::ConstantDiagonal { diag } if diag.len() == n => {
            Some([diag[0], 0.0, *diag.get(1).unwrap_or(&0.0)])
        }
        TensorPreset::RotatedDiagonal { a, b, angle } if n == 2 => {
            let (s, c) = angle.sin_cos();
            Some([a * c * c + b * s * s, (a - b) * c * s, a * s * s + b * c * c])
        }
        TensorPreset::ScalarFunction { coeffs } if n == 1 && tensor.is_constant() => {
            Some([coeffs[0], 0.0, 0.0])
        }
        TensorPreset::VaryingDiagonal { beta } if *beta == 0.0 => Some([1.0, 0.0, 1.0]),
        _ => None,
    };

    if let Some([xx, xy, yy]) = constant {
        let tm = crate::domain::SymTensor { xx, xy, yy };
        let (epsilon, delta) = tm.eigenvalues(n);
        let tr_t2 = if n == 1 { xx * xx } else { xx * xx + 2.0 * xy * xy + yy * yy };
        let (eta0, c0) = match eta {
            EtaPreset::Zero {} => (0.0, 0.0),
            EtaPreset::Linear { a } if a.len() == n => {
                let ta = tm.apply(n, a);
                (norm(a), -0.25 * ta.iter().map(|v| v * v).sum::<f64>())
            }
            EtaPreset::Quadratic { c, center } => {
                let center = center.clone().unwrap_or_else(|| vec![0.0; n]);
                if center.len() != n || center.iter().zip(lengths).any(|(&x, &l)| x < 0.0 || x > l) {
                    return None;
                }
                let far = corners
                    .iter()
                    .map(|p| norm(&p.iter().zip(&center).map(|(a, b)| a - b).collect::<Vec<_>>()))
                    .fold(0.0, f64::max);
                (2.0 * c.abs() * far, c * tr_t2)
            }
            _ => return None,
        };
        return Some(OperatorConstants {
            epsilon,
            delta,
            t0: 0.0,
            eta0,
            c0,
            h0: xx.abs() * dom.curvature(),
        });
    }

    match (tensor, eta) {
        (TensorPreset::VaryingDiagonal { beta }, EtaPreset::Zero {}) if !dom.is_arc() => {
            let ends: Vec<f64> = lengths.iter().map(|l| 1.0 + beta * l * l).collect();
            let epsilon = ends.iter().copied().fold(1.0, f64::min);
            let delta = ends.iter().copied().fold(1.0, f64::max);
            Some(OperatorConstants {
                epsilon,
                delta,
                t0: 2.0 * beta.abs() * norm(lengths),
                eta0: 0.0,
                // −nβ − 3β²|x|², maximal at the origin
                c0: -(n as f64) * beta,
                h0: 0.0,
            })
        }
        _ => None,
    }
}
