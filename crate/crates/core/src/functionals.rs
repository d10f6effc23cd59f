//! Eigenvector-dependent quantities in the second-order bounds: `‖div_η u_i‖²` and the
//! shifts `D₀`, `D₁`.

use serde::{Deserialize, Serialize};

use crate::assembly::div_eta_operator;
use crate::constants::OperatorConstants;
use crate::domain::{DiscreteDomain, GridScalarField};
use crate::{Error, Exec, Result};

/// Power of `T₀` in the constant term of the shifts.
///
/// The shifts `D₀`, `D₁` are printed with `(T₀ + 4C₀)/(4δ)` while the quadratic
/// inequality they derive from carries `(T₀² + 4C₀)/(4δ)`. Both readings are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum T0Variant {
    #[default]
    AsPrinted,
    SquaredT0,
}

impl T0Variant {
    pub fn from_power(p: u8) -> Result<Self> {
        match p {
            1 => Ok(T0Variant::AsPrinted),
            2 => Ok(T0Variant::SquaredT0),
            _ => Err(Error::Config(format!("t0_power must be 1 or 2, got {p}"))),
        }
    }

    pub fn power(self) -> u8 {
        match self {
            T0Variant::AsPrinted => 1,
            T0Variant::SquaredT0 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shifts {
    pub d0: f64,
    pub d1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSet {
    /// `‖div_η u_i‖²` per eigenpair, in eigenvalue order.
    pub div_eta_norm_sq: Vec<f64>,
    pub shifts: Shifts,
    pub variant: T0Variant,
}

/// `Σ_nodes (div_η u)² e^{-η}·dual volume` for one interleaved vector field given on
/// interior nodes (zero on the boundary).
pub fn div_eta_norm_sq(dom: &DiscreteDomain, eta: &GridScalarField, field: &[f64]) -> Result<f64> {
    Ok(div_eta_norms(dom, eta, &[field.to_vec()], Exec::Sequential)?[0])
}

pub fn div_eta_norms(
    dom: &DiscreteDomain,
    eta: &GridScalarField,
    fields: &[Vec<f64>],
    exec: Exec,
) -> Result<Vec<f64>> {
    let expected = dom.interior_count() * dom.dim();
    if let Some(f) = fields.iter().find(|f| f.len() != expected) {
        return Err(Error::DimensionMismatch(format!(
            "vector field has {} entries, expected {expected} (n × interior nodes)",
            f.len()
        )));
    }
    let (d, w) = div_eta_operator(dom, eta)?;
    Ok(exec.map(fields.len(), |i| {
        d.matvec(&fields[i])
            .iter()
            .zip(&w)
            .map(|(v, wi)| v * v * wi)
            .sum()
    }))
}

fn constant_term(consts: &OperatorConstants, variant: T0Variant) -> f64 {
    let t0 = match variant {
        T0Variant::AsPrinted => consts.t0,
        T0Variant::SquaredT0 => consts.t0 * consts.t0,
    };
    (t0 + 4.0 * consts.c0) / (4.0 * consts.delta)
}

/// `D₀ = −α min_{j≤k} ‖div_η u_j‖² + c`, `D₁ = −α‖div_η u_1‖² + c`, with `c` the
/// constant term of the chosen variant.
pub fn shifts(
    alpha: f64,
    div_norms: &[f64],
    consts: &OperatorConstants,
    k: usize,
    variant: T0Variant,
) -> Result<Shifts> {
    if k == 0 || div_norms.len() < k {
        return Err(Error::InvalidInput(format!(
            "shifts need ‖div_η u_j‖² for j = 1..{k}, got {} values",
            div_norms.len()
        )));
    }
    let c = constant_term(consts, variant);
    let min = div_norms[..k].iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Shifts {
        d0: -alpha * min + c,
        d1: -alpha * div_norms[0] + c,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_domain, sample_eta, DomainSpec, EtaPreset};
    use proptest::prelude::*;

    fn consts(t0: f64, c0: f64, delta: f64) -> OperatorConstants {
        OperatorConstants {
            epsilon: delta.min(1.0),
            delta,
            t0,
            eta0: 0.0,
            c0,
            h0: 0.0,
        }
    }

    #[test]
    fn shift_examples() {
        let s = shifts(0.0, &[0.7], &OperatorConstants::flat_identity(), 1, T0Variant::AsPrinted).unwrap();
        assert_eq!((s.d0, s.d1), (0.0, 0.0));

        let s = shifts(0.0, &[0.7, 0.1], &consts(0.0, 2.0, 1.0), 2, T0Variant::AsPrinted).unwrap();
        assert_eq!((s.d0, s.d1), (2.0, 2.0));

        let s = shifts(1.0, &[0.5, 0.3], &consts(0.0, 0.0, 1.0), 2, T0Variant::AsPrinted).unwrap();
        assert!((s.d0 + 0.3).abs() < 1e-15);
        assert!((s.d1 + 0.5).abs() < 1e-15);
    }

    #[test]
    fn variants_agree_for_unit_and_zero_t0() {
        for t0 in [0.0, 1.0] {
            let c = consts(t0, 0.4, 1.5);
            let a = shifts(0.5, &[0.2], &c, 1, T0Variant::AsPrinted).unwrap();
            let b = shifts(0.5, &[0.2], &c, 1, T0Variant::SquaredT0).unwrap();
            assert_eq!(a, b);
        }
        let c = consts(3.0, 0.0, 1.0);
        let a = shifts(0.0, &[0.0], &c, 1, T0Variant::AsPrinted).unwrap();
        let b = shifts(0.0, &[0.0], &c, 1, T0Variant::SquaredT0).unwrap();
        assert_eq!((a.d0, b.d0), (0.75, 2.25));
    }

    proptest! {
        #[test]
        fn d0_nondecreasing_in_k(norms in proptest::collection::vec(0.0..10.0f64, 1..12), alpha in 0.01..5.0f64) {
            // the minimum over a growing set cannot increase, so −α·min cannot decrease
            let c = consts(0.3, -0.2, 2.0);
            let mut prev = f64::NEG_INFINITY;
            for k in 1..=norms.len() {
                let s = shifts(alpha, &norms, &c, k, T0Variant::AsPrinted).unwrap();
                prop_assert!(s.d0 >= prev);
                prev = s.d0;
            }
        }

        #[test]
        fn zero_alpha_ignores_eigenvectors(a in proptest::collection::vec(0.0..10.0f64, 3), b in proptest::collection::vec(0.0..10.0f64, 3)) {
            let c = consts(0.3, 0.7, 2.0);
            prop_assert_eq!(
                shifts(0.0, &a, &c, 3, T0Variant::SquaredT0).unwrap(),
                shifts(0.0, &b, &c, 3, T0Variant::SquaredT0).unwrap()
            );
        }
    }

    fn square(n: usize) -> (DiscreteDomain, GridScalarField) {
        let d = build_domain(&DomainSpec::unit_square(n)).unwrap();
        let e = sample_eta(&EtaPreset::Zero {}, &d).unwrap();
        (d, e)
    }

    #[test]
    fn divergence_free_field_has_small_norm() {
        // ψ = (x(1−x)y(1−y))², u = (∂ψ/∂y, −∂ψ/∂x) vanishes on the boundary
        let psi_x = |x: f64, y: f64| {
            let (p, q) = (x * (1.0 - x), y * (1.0 - y));
            2.0 * p * (1.0 - 2.0 * x) * q * q
        };
        let psi_y = |x: f64, y: f64| {
            let (p, q) = (x * (1.0 - x), y * (1.0 - y));
            2.0 * q * (1.0 - 2.0 * y) * p * p
        };
        let mut prev = f64::INFINITY;
        for n in [16, 32, 64] {
            let (d, e) = square(n);
            let field: Vec<f64> = d
                .interior_nodes()
                .iter()
                .flat_map(|&node| {
                    let x = d.coords(node);
                    [psi_y(x[0], x[1]), -psi_x(x[0], x[1])]
                })
                .collect();
            let v = div_eta_norm_sq(&d, &e, &field).unwrap();
            let h = 1.0 / n as f64;
            assert!(v >= 0.0 && v < 0.05 * h.powi(4), "n = {n}: {v}");
            assert!(prev / v > 12.0, "n = {n}: {v} after {prev}");
            prev = v;
        }
    }

    #[test]
    fn constant_field_divergence_vanishes_away_from_boundary() {
        let n = 32;
        let (d, e) = square(n);
        let field: Vec<f64> = d.interior_nodes().iter().flat_map(|_| [1.5, 0.0]).collect();
        let (op, _) = div_eta_operator(&d, &e).unwrap();
        let div = op.matvec(&field);
        assert_eq!(div.len(), n * n);
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                assert_eq!(div[i + n * j], 0.0);
            }
        }
        assert!(div_eta_norm_sq(&d, &e, &field).unwrap() > 0.0);
    }

    #[test]
    fn weighted_divergence_includes_drift() {
        // u = (1, 0) with η = x, away from the boundary div_η u = −1
        let n = 16;
        let d = build_domain(&DomainSpec::unit_square(n)).unwrap();
        let e = sample_eta(&EtaPreset::Linear { a: vec![1.0, 0.0] }, &d).unwrap();
        let field: Vec<f64> = d.interior_nodes().iter().flat_map(|_| [1.0, 0.0]).collect();
        let (op, w) = div_eta_operator(&d, &e).unwrap();
        let div = op.matvec(&field);
        assert!((div[8 + n * 8] + 1.0).abs() < 1e-12);
        // midpoint weight e^{−η(c)}·h²
        let h = 1.0 / n as f64;
        assert!((w[8 + n * 8] - (-(8.5 * h)).exp() * h * h).abs() < 1e-15);
    }

    #[test]
    fn linear_field_divergence_is_exact() {
        // u = (x(1−x), 0) vanishes on x = 0, 1; interior cells see div u = 1 − 2x exactly
        let n = 8;
        let d = build_domain(&DomainSpec::Box { lengths: vec![1.0], resolution: n }).unwrap();
        let e = sample_eta(&EtaPreset::Zero {}, &d).unwrap();
        let field: Vec<f64> = d.interior_nodes().iter().map(|&p| { let x = d.coords(p)[0]; x * (1.0 - x) }).collect();
        let (op, _) = div_eta_operator(&d, &e).unwrap();
        for (c, v) in op.matvec(&field).iter().enumerate() {
            let x = (c as f64 + 0.5) / n as f64;
            assert!((v - (1.0 - 2.0 * x)).abs() < 1e-13);
        }
    }

    #[test]
    fn wrong_length_rejected() {
        let (d, e) = square(8);
        assert!(div_eta_norm_sq(&d, &e, &[0.0; 3]).is_err());
    }
}
