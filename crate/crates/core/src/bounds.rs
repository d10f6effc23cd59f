//! Universal eigenvalue inequalities and the explicit bounds derived from them.
//!
//! Second-order family (σ, eigenvalues of the coupled system or scalar problem):
//!
//! * `quadratic_sum`: `Σ(σ_{k+1}−σ_i)² ≤ 4δ(nδ+α)/(n²ε²) Σ(σ_{k+1}−σ_i)(σ_i − α‖div_η u_i‖² + (T₀²+4C₀)/(4δ))`
//! * `lower_order_sum`: `Σ_{i≤n}(σ_{i+1}−σ₁) ≤ 4δ(δ+α)/ε² (σ₁ + D₁)`
//! * `next_eigenvalue_bound`: upper bound on `σ_{k+1}` and on the gap `σ_{k+1} − σ_k`
//! * `recursive_growth_bound`: `σ_{k+1} + D₀ ≤ (1 + 2c)·k^c·(σ₁ + D₀)`, `c = 2δ(nδ+α)/(ε²n²)`
//!
//! Clamped fourth-order family (Γ), with brackets `P_i = (2n+4)δΓ_i^{1/2} + κ` and
//! `Q_i = 4δΓ_i^{1/2} + κ`, `κ = n²H₀² + T₀² + 4C₀`:
//!
//! * `clamped_product_form`: `ΣΛ_i² ≤ (nε)^{-1} (ΣΛ_i²P_i)^{1/2} (ΣΛ_iQ_i)^{1/2}`, `Λ_i = Γ_{k+1} − Γ_i`
//! * `clamped_lower_order_*`: lower-order sums against `ε^{-1}(Q₁P₁)^{1/2}`
//! * `clamped_quadratic_form`: `ΣΛ_i² ≤ (nε)^{-2} ΣΛ_iP_iQ_i`
//! * `clamped_next_eigenvalue_bound`: `Γ_{k+1} ≤ A_k + (A_k² − B_k)^{1/2}`, gap `≤ 2(A_k² − B_k)^{1/2}`
//!
//! Every record carries `slack = rhs − lhs` and the margin used; a check passes when
//! `slack ≥ −margin`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constants::OperatorConstants;
use crate::{Error, Result};

/// Relative margin used for exact (analytic) spectra.
pub const ANALYTIC_REL_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub margin: f64,
    pub pass: bool,
    pub inputs: BTreeMap<String, f64>,
}

impl CheckRecord {
    fn new(name: &str, k: usize, lhs: f64, rhs: f64, margin: f64, inputs: BTreeMap<String, f64>) -> Self {
        let slack = rhs - lhs;
        Self {
            name: name.into(),
            k,
            lhs,
            rhs,
            slack,
            margin,
            pass: slack >= -margin,
            inputs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub name: String,
    pub k: usize,
    /// Upper bound on the (k+1)-th eigenvalue.
    pub predicted: Option<f64>,
    pub observed: Option<f64>,
    pub gap_bound: Option<f64>,
    pub observed_gap: Option<f64>,
    /// Radicand of the square root in the bound, before clamping.
    pub discriminant: Option<f64>,
    /// Set when the radicand was negative and clamped to zero.
    pub discriminant_clamped: bool,
    pub margin: f64,
    pub pass: bool,
    /// Reason the bound was not evaluated.
    pub skipped: Option<String>,
    pub inputs: BTreeMap<String, f64>,
}

impl BoundRecord {
    fn skipped(name: &str, k: usize, reason: String, inputs: BTreeMap<String, f64>) -> Self {
        Self {
            name: name.into(),
            k,
            predicted: None,
            observed: None,
            gap_bound: None,
            observed_gap: None,
            discriminant: None,
            discriminant_clamped: false,
            margin: 0.0,
            pass: true,
            skipped: Some(reason),
            inputs,
        }
    }
}

/// Absolute uncertainty per eigenvalue plus a relative floor on the compared quantities.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Uncertainty {
    pub abs: Vec<f64>,
    pub rel: f64,
}

impl Uncertainty {
    pub fn analytic() -> Self {
        Self {
            abs: Vec::new(),
            rel: ANALYTIC_REL_MARGIN,
        }
    }

    pub fn computed(abs: Vec<f64>) -> Self {
        Self {
            abs,
            rel: ANALYTIC_REL_MARGIN,
        }
    }

    /// First-order propagation of the eigenvalue uncertainty through `f`, plus the
    /// relative floor times `scale`.
    fn margin(&self, values: &[f64], scale: f64, f: impl Fn(&[f64]) -> f64) -> f64 {
        let base = f(values);
        let mut total = self.rel * scale.abs();
        let mut v = values.to_vec();
        for (i, &e) in self.abs.iter().enumerate().take(values.len()) {
            if e == 0.0 {
                continue;
            }
            let mut worst: f64 = 0.0;
            for s in [e, -e] {
                v[i] = values[i] + s;
                let d = f(&v) - base;
                if d.is_finite() {
                    worst = worst.max(d.abs());
                }
            }
            v[i] = values[i];
            total += worst;
        }
        total
    }
}

fn check_sorted_positive(values: &[f64], what: &str) -> Result<()> {
    if values.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput(format!("{what}: eigenvalues must be positive")));
    }
    if values.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput(format!("{what}: eigenvalues must be ascending")));
    }
    Ok(())
}

fn need(values: &[f64], count: usize, what: &str) -> Result<()> {
    if values.len() < count {
        return Err(Error::InvalidInput(format!(
            "{what} needs {count} eigenvalues, got {}",
            values.len()
        )));
    }
    Ok(())
}

fn echo(consts: &OperatorConstants, extra: &[(&str, f64)]) -> BTreeMap<String, f64> {
    let mut m: BTreeMap<String, f64> = [
        ("epsilon", consts.epsilon),
        ("delta", consts.delta),
        ("t0", consts.t0),
        ("c0", consts.c0),
        ("h0", consts.h0),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), *v))
    .collect();
    for (k, v) in extra {
        m.insert(k.to_string(), *v);
    }
    m
}

/// `4δ(nδ+α)/(n²ε²)`.
pub fn quadratic_sum_coefficient(consts: &OperatorConstants, alpha: f64, n: usize) -> f64 {
    let n = n as f64;
    4.0 * consts.delta * (n * consts.delta + alpha) / (n * n * consts.epsilon * consts.epsilon)
}

/// Quadratic sum inequality for the first `k+1` eigenvalues. `div_norms[i]` is
/// `‖div_η u_i‖²` (pass zeros for the relaxed form or when `α = 0`).
pub fn quadratic_sum_check(
    sigma: &[f64],
    k: usize,
    consts: &OperatorConstants,
    alpha: f64,
    n: usize,
    div_norms: &[f64],
    unc: &Uncertainty,
) -> Result<CheckRecord> {
    quadratic_sum_named("quadratic_sum", sigma, k, consts, alpha, n, div_norms, unc)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn quadratic_sum_named(
    name: &str,
    sigma: &[f64],
    k: usize,
    consts: &OperatorConstants,
    alpha: f64,
    n: usize,
    div_norms: &[f64],
    unc: &Uncertainty,
) -> Result<CheckRecord> {
    consts.validate()?;
    need(sigma, k + 1, name)?;
    need(div_norms, k, name)?;
    check_sorted_positive(&sigma[..=k], name)?;
    let coef = quadratic_sum_coefficient(consts, alpha, n);
    let shift = (consts.t0 * consts.t0 + 4.0 * consts.c0) / (4.0 * consts.delta);
    let sides = |s: &[f64]| {
        let top = s[k];
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for i in 0..k {
            let gap = top - s[i];
            lhs += gap * gap;
            rhs += gap * (s[i] - alpha * div_norms[i] + shift);
        }
        (lhs, coef * rhs)
    };
    let (lhs, rhs) = sides(sigma);
    let margin = unc.margin(&sigma[..=k], lhs.abs().max(rhs.abs()), |s| {
        let (l, r) = sides(s);
        r - l
    });
    Ok(CheckRecord::new(
        name,
        k,
        lhs,
        rhs,
        margin,
        echo(consts, &[("alpha", alpha), ("n", n as f64), ("coefficient", coef)]),
    ))
}

/// Sum of the first `n` gaps against the first eigenvalue; `d1` is the shift `D₁`.
pub fn lower_order_sum_check(
    sigma: &[f64],
    d1: f64,
    consts: &OperatorConstants,
    alpha: f64,
    n: usize,
    unc: &Uncertainty,
) -> Result<CheckRecord> {
    lower_order_sum_named("lower_order_sum", sigma, d1, consts, alpha, n, unc)
}

pub(crate) fn lower_order_sum_named(
    name: &str,
    sigma: &[f64],
    d1: f64,
    consts: &OperatorConstants,
    alpha: f64,
    n: usize,
    unc: &Uncertainty,
) -> Result<CheckRecord> {
    consts.validate()?;
    need(sigma, n + 1, name)?;
    check_sorted_positive(&sigma[..=n], name)?;
    let coef = 4.0 * consts.delta * (consts.delta + alpha) / (consts.epsilon * consts.epsilon);
    let sides = |s: &[f64]| {
        let lhs: f64 = (1..=n).map(|i| s[i] - s[0]).sum();
        (lhs, coef * (s[0] + d1))
    };
    let (lhs, rhs) = sides(sigma);
    let margin = unc.margin(&sigma[..=n], lhs.abs().max(rhs.abs()), |s| {
        let (l, r) = sides(s);
        r - l
    });
    Ok(CheckRecord::new(
        name,
        n,
        lhs,
        rhs,
        margin,
        echo(consts, &[("alpha", alpha), ("n", n as f64), ("coefficient", coef), ("d1", d1)]),
    ))
}

/// `2δ(nδ+α)/(ε²n²)`.
fn growth_exponent(consts: &OperatorConstants, alpha: f64, n: usize) -> f64 {
    let n = n as f64;
    2.0 * consts.delta * (n * consts.delta + alpha) / (consts.epsilon * consts.epsilon * n * n)
}

/// Upper bound on `σ_{k+1}` and on `σ_{k+1} − σ_k` from `σ_1..σ_k` and the shift `D₀`.
/// `sigma` may include `σ_{k+1}`, which is then compared against the bound.
pub fn next_eigenvalue_bound(
    sigma: &[f64],
    k: usize,
    d0: f64,
    consts: &OperatorConstants,
    alpha: f64,
    n: usize,
    unc: &Uncertainty,
) -> Result<BoundRecord> {
    next_eigenvalue_bound_named("next_eigenvalue_bound", sigma, k, d0, consts, alpha, n, unc)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn next_eigenvalue_bound_named(
    name: &str,
    sigma: &[f64],
    k: usize,
    d0: f64,
    consts: &OperatorConstants,
    alpha: f64,
    n: usize,
    unc: &Uncertainty,
) -> Result<BoundRecord> {
    consts.validate()?;
    need(sigma, k, name)?;
    let top = sigma.len().min(k + 1);
    check_sorted_positive(&sigma[..top], name)?;
    let c = growth_exponent(consts, alpha, n);
    let inputs = echo(consts, &[("alpha", alpha), ("n", n as f64), ("d0", d0), ("c", c)]);
    if let Some(i) = sigma[..k].iter().position(|&s| !(s + d0 > 0.0)) {
        return Ok(BoundRecord::skipped(
            name,
            k,
            format!("σ_{} + D₀ = {} is not positive", i + 1, sigma[i] + d0),
            inputs,
        ));
    }
    let kf = k as f64;
    let parts = |s: &[f64]| {
        let mean_sigma = s[..k].iter().sum::<f64>() / kf;
        let avg = mean_sigma + d0;
        let var = s[..k].iter().map(|v| (v - mean_sigma).powi(2)).sum::<f64>() / kf;
        let disc = (c * avg).powi(2) - (1.0 + 2.0 * c) * var;
        let root = disc.max(0.0).sqrt();
        ((1.0 + c) * avg + root - d0, 2.0 * root, disc)
    };
    let (predicted, gap_bound, disc) = parts(sigma);
    let mut record = BoundRecord {
        name: name.into(),
        k,
        predicted: Some(predicted),
        observed: None,
        gap_bound: Some(gap_bound),
        observed_gap: None,
        discriminant: Some(disc),
        discriminant_clamped: disc < 0.0,
        margin: 0.0,
        pass: true,
        skipped: None,
        inputs,
    };
    if sigma.len() > k {
        let obs = sigma[k];
        let obs_gap = sigma[k] - sigma[k - 1];
        let slack = |s: &[f64]| {
            let (p, g, _) = parts(s);
            (p - s[k]).min(g - (s[k] - s[k - 1]))
        };
        let margin = unc.margin(&sigma[..=k], predicted, slack);
        record.observed = Some(obs);
        record.observed_gap = Some(obs_gap);
        record.margin = margin;
        record.pass = slack(sigma) >= -margin;
    }
    Ok(record)
}

/// `σ_{k+1} + D₀ ≤ (1 + 2c)·k^c·(σ₁ + D₀)`. `observed` is `σ_{k+1}` when available.
pub fn recursive_growth_bound(
    sigma1: f64,
    k: usize,
    d0: f64,
    consts: &OperatorConstants,
    alpha: f64,
    n: usize,
    observed: Option<f64>,
    unc: &Uncertainty,
) -> Result<BoundRecord> {
    recursive_growth_named("recursive_growth_bound", sigma1, k, d0, consts, alpha, n, observed, unc)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn recursive_growth_named(
    name: &str,
    sigma1: f64,
    k: usize,
    d0: f64,
    consts: &OperatorConstants,
    alpha: f64,
    n: usize,
    observed: Option<f64>,
    unc: &Uncertainty,
) -> Result<BoundRecord> {
    consts.validate()?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let c = growth_exponent(consts, alpha, n);
    let coef = 1.0 + 2.0 * c;
    let inputs = echo(
        consts,
        &[("alpha", alpha), ("n", n as f64), ("d0", d0), ("coefficient", coef), ("exponent", c)],
    );
    if !(sigma1 + d0 > 0.0) {
        return Ok(BoundRecord::skipped(
            name,
            k,
            format!("σ₁ + D₀ = {} is not positive", sigma1 + d0),
            inputs,
        ));
    }
    let bound = |s: &[f64]| coef * (k as f64).powf(c) * (s[0] + d0) - d0;
    let predicted = bound(&[sigma1]);
    let mut record = BoundRecord {
        name: name.into(),
        k,
        predicted: Some(predicted),
        observed,
        gap_bound: None,
        observed_gap: None,
        discriminant: None,
        discriminant_clamped: false,
        margin: 0.0,
        pass: true,
        skipped: None,
        inputs,
    };
    if let Some(obs) = observed {
        // uncertainty of σ₁ at index 0 and of σ_{k+1} at index k
        let abs = [unc.abs.first().copied().unwrap_or(0.0), unc.abs.get(k).copied().unwrap_or(0.0)];
        let local = Uncertainty { abs: abs.to_vec(), rel: unc.rel };
        let slack = |s: &[f64]| bound(s) - s[1];
        record.margin = local.margin(&[sigma1, obs], predicted, slack);
        record.pass = slack(&[sigma1, obs]) >= -record.margin;
    }
    Ok(record)
}

/// `κ = n²H₀² + T₀² + 4C₀`.
fn clamped_kappa(consts: &OperatorConstants, n: usize) -> f64 {
    let nf = n as f64;
    nf * nf * consts.h0 * consts.h0 + consts.t0 * consts.t0 + 4.0 * consts.c0
}

fn brackets(gamma: f64, consts: &OperatorConstants, n: usize) -> (f64, f64) {
    let kappa = clamped_kappa(consts, n);
    let r = gamma.sqrt();
    (
        (2.0 * n as f64 + 4.0) * consts.delta * r + kappa,
        4.0 * consts.delta * r + kappa,
    )
}

fn check_brackets(gamma: &[f64], consts: &OperatorConstants, n: usize, what: &str) -> Result<()> {
    for &g in gamma {
        let (p, q) = brackets(g, consts, n);
        if p < 0.0 || q < 0.0 {
            return Err(Error::InvalidInput(format!(
                "{what}: bracket negative at Γ = {g} (P = {p}, Q = {q})"
            )));
        }
    }
    Ok(())
}

/// Product form for the clamped problem.
pub fn clamped_product_check(
    gamma: &[f64],
    k: usize,
    consts: &OperatorConstants,
    n: usize,
    unc: &Uncertainty,
) -> Result<CheckRecord> {
    let name = "clamped_product_form";
    consts.validate()?;
    need(gamma, k + 1, name)?;
    check_sorted_positive(&gamma[..=k], name)?;
    check_brackets(&gamma[..k], consts, n, name)?;
    let pre = 1.0 / (n as f64 * consts.epsilon);
    let sides = |g: &[f64]| {
        let (mut lhs, mut s1, mut s2) = (0.0, 0.0, 0.0);
        for i in 0..k {
            let lam = g[k] - g[i];
            let (p, q) = brackets(g[i], consts, n);
            lhs += lam * lam;
            s1 += lam * lam * p;
            s2 += lam * q;
        }
        (lhs, pre * s1.max(0.0).sqrt() * s2.max(0.0).sqrt())
    };
    let (lhs, rhs) = sides(gamma);
    let margin = unc.margin(&gamma[..=k], lhs.abs().max(rhs.abs()), |g| {
        let (l, r) = sides(g);
        r - l
    });
    Ok(CheckRecord::new(name, k, lhs, rhs, margin, echo(consts, &[("n", n as f64)])))
}

/// Index reading of the lower-order clamped inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LowerOrderReading {
    /// `Σ_{i=1}^{k} (Γ_{k+1} − Γ₁)^{1/2} = k (Γ_{k+1} − Γ₁)^{1/2}`.
    #[default]
    Printed,
    /// `Σ_{i=1}^{k} (Γ_{i+1} − Γ₁)^{1/2}`.
    Shifted,
}

impl LowerOrderReading {
    pub fn record_name(self) -> &'static str {
        match self {
            LowerOrderReading::Printed => "clamped_lower_order_fixed_top",
            LowerOrderReading::Shifted => "clamped_lower_order_consecutive",
        }
    }
}

/// Lower-order clamped inequality with right-hand side `ε^{-1}(Q₁P₁)^{1/2}`.
pub fn clamped_lower_order_check(
    gamma: &[f64],
    k: usize,
    consts: &OperatorConstants,
    n: usize,
    reading: LowerOrderReading,
    unc: &Uncertainty,
) -> Result<CheckRecord> {
    let name = reading.record_name();
    consts.validate()?;
    need(gamma, k + 1, name)?;
    check_sorted_positive(&gamma[..=k], name)?;
    check_brackets(&gamma[..1], consts, n, name)?;
    let sides = |g: &[f64]| {
        let lhs = match reading {
            LowerOrderReading::Printed => k as f64 * (g[k] - g[0]).sqrt(),
            LowerOrderReading::Shifted => (1..=k).map(|i| (g[i] - g[0]).sqrt()).sum(),
        };
        let (p, q) = brackets(g[0], consts, n);
        (lhs, (q * p).sqrt() / consts.epsilon)
    };
    let (lhs, rhs) = sides(gamma);
    let margin = unc.margin(&gamma[..=k], lhs.abs().max(rhs.abs()), |g| {
        let (l, r) = sides(g);
        r - l
    });
    Ok(CheckRecord::new(name, k, lhs, rhs, margin, echo(consts, &[("n", n as f64)])))
}

/// Quadratic form for the clamped problem, `ΣΛ² ≤ (nε)^{-2} ΣΛPQ`.
pub fn clamped_quadratic_check(
    gamma: &[f64],
    k: usize,
    consts: &OperatorConstants,
    n: usize,
    unc: &Uncertainty,
) -> Result<CheckRecord> {
    let name = "clamped_quadratic_form";
    consts.validate()?;
    need(gamma, k + 1, name)?;
    check_sorted_positive(&gamma[..=k], name)?;
    let nf = n as f64;
    let pre = 1.0 / (nf * nf * consts.epsilon * consts.epsilon);
    let sides = |g: &[f64]| {
        let (mut lhs, mut rhs) = (0.0, 0.0);
        for i in 0..k {
            let lam = g[k] - g[i];
            let (p, q) = brackets(g[i], consts, n);
            lhs += lam * lam;
            rhs += lam * p * q;
        }
        (lhs, pre * rhs)
    };
    let (lhs, rhs) = sides(gamma);
    let margin = unc.margin(&gamma[..=k], lhs.abs().max(rhs.abs()), |g| {
        let (l, r) = sides(g);
        r - l
    });
    Ok(CheckRecord::new(name, k, lhs, rhs, margin, echo(consts, &[("n", n as f64)])))
}

/// `A_k` and `B_k` of the clamped next-eigenvalue bound.
pub fn clamped_ab(gamma: &[f64], k: usize, consts: &OperatorConstants, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let kf = k as f64;
    let e2 = consts.epsilon * consts.epsilon;
    let (mut spq, mut sgpq, mut sg, mut sg2) = (0.0, 0.0, 0.0, 0.0);
    for &g in &gamma[..k] {
        let (p, q) = brackets(g, consts, n);
        spq += p * q;
        sgpq += g * p * q;
        sg += g;
        sg2 += g * g;
    }
    (
        spq / (2.0 * nf * nf * e2 * kf) + sg / kf,
        sgpq / (nf * nf * e2 * kf) + sg2 / kf,
    )
}

/// `Γ_{k+1} ≤ A_k + (A_k² − B_k)^{1/2}` and `Γ_{k+1} − Γ_k ≤ 2(A_k² − B_k)^{1/2}`.
/// A negative radicand is flagged and clamped to zero.
pub fn clamped_next_eigenvalue_bound(
    gamma: &[f64],
    k: usize,
    consts: &OperatorConstants,
    n: usize,
    unc: &Uncertainty,
) -> Result<BoundRecord> {
    let name = "clamped_next_eigenvalue_bound";
    consts.validate()?;
    need(gamma, k, name)?;
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let top = gamma.len().min(k + 1);
    check_sorted_positive(&gamma[..top], name)?;
    let parts = |g: &[f64]| {
        let (a, b) = clamped_ab(g, k, consts, n);
        let disc = a * a - b;
        let root = disc.max(0.0).sqrt();
        (a + root, 2.0 * root, disc, a, b)
    };
    let (predicted, gap_bound, disc, a, b) = parts(gamma);
    let mut record = BoundRecord {
        name: name.into(),
        k,
        predicted: Some(predicted),
        observed: None,
        gap_bound: Some(gap_bound),
        observed_gap: None,
        discriminant: Some(disc),
        discriminant_clamped: disc < 0.0,
        margin: 0.0,
        pass: true,
        skipped: None,
        inputs: echo(consts, &[("n", n as f64), ("a_k", a), ("b_k", b)]),
    };
    if gamma.len() > k {
        let slack = |g: &[f64]| {
            let (p, gb, ..) = parts(g);
            (p - g[k]).min(gb - (g[k] - g[k - 1]))
        };
        record.observed = Some(gamma[k]);
        record.observed_gap = Some(gamma[k] - gamma[k - 1]);
        record.margin = unc.margin(&gamma[..=k], predicted, slack);
        record.pass = slack(gamma) >= -record.margin;
    }
    Ok(record)
}

/// `(Σa²b)(Σac) ≤ (Σa²)(Σabc)` for non-negative `a` non-increasing and `b`, `c`
/// non-decreasing.
pub fn jost_check(a: &[f64], b: &[f64], c: &[f64]) -> Result<CheckRecord> {
    if a.len() != b.len() || a.len() != c.len() || a.is_empty() {
        return Err(Error::InvalidInput("sequences must be non-empty and of equal length".into()));
    }
    if a.iter().chain(b).chain(c).any(|&v| !(v >= 0.0)) {
        return Err(Error::InvalidInput("sequences must be non-negative".into()));
    }
    if a.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::InvalidInput("first sequence must be non-increasing".into()));
    }
    if b.windows(2).any(|w| w[1] < w[0]) || c.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidInput("second and third sequences must be non-decreasing".into()));
    }
    let sum = |f: &dyn Fn(usize) -> f64| (0..a.len()).map(f).sum::<f64>();
    let lhs = sum(&|i| a[i] * a[i] * b[i]) * sum(&|i| a[i] * c[i]);
    let rhs = sum(&|i| a[i] * a[i]) * sum(&|i| a[i] * b[i] * c[i]);
    let margin = 1e-12 * lhs.abs().max(rhs.abs());
    Ok(CheckRecord::new(
        "jost",
        a.len(),
        lhs,
        rhs,
        margin,
        BTreeMap::from([("m".to_string(), a.len() as f64)]),
    ))
}

/// The two classical clamped-plate inequalities (`T = I`, `η` constant) and their
/// ordering: returns `(cheng_etal, wang_xia, ordering)` where the ordering record has
/// `lhs = ` Wang–Xia right-hand side and `rhs = ` Cheng et al. right-hand side.
pub fn baseline_checks(
    gamma: &[f64],
    k: usize,
    consts: &OperatorConstants,
    n: usize,
    unc: &Uncertainty,
) -> Result<(CheckRecord, CheckRecord, CheckRecord)> {
    if consts.epsilon != 1.0 || consts.delta != 1.0 || consts.t0 != 0.0 || consts.c0 != 0.0 || consts.eta0 != 0.0 {
        return Err(Error::InvalidInput(
            "classical clamped-plate inequalities apply only to T = I with constant η".into(),
        ));
    }
    need(gamma, k + 1, "baseline")?;
    check_sorted_positive(&gamma[..=k], "baseline")?;
    let nf = n as f64;
    let hh = nf * nf * consts.h0 * consts.h0;
    let sides = |g: &[f64]| {
        let (mut lhs, mut cheng, mut s1, mut s2) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..k {
            let lam = g[k] - g[i];
            let r = g[i].sqrt();
            let p = (2.0 * nf + 4.0) * r + hh;
            let q = 4.0 * r + hh;
            lhs += lam * lam;
            cheng += lam * p * q;
            s1 += lam * lam * p;
            s2 += lam * q;
        }
        (lhs, cheng / (nf * nf), (s1 * s2).sqrt() / nf)
    };
    let (lhs, cheng, wx) = sides(gamma);
    let inputs = BTreeMap::from([("n".to_string(), nf), ("h0".to_string(), consts.h0)]);
    let m = |f: &dyn Fn(&[f64]) -> f64, scale: f64| unc.margin(&gamma[..=k], scale, f);
    let cheng_rec = CheckRecord::new(
        "cheng_etal",
        k,
        lhs,
        cheng,
        m(&|g| { let s = sides(g); s.1 - s.0 }, lhs.max(cheng)),
        inputs.clone(),
    );
    let wx_rec = CheckRecord::new(
        "wang_xia",
        k,
        lhs,
        wx,
        m(&|g| { let s = sides(g); s.2 - s.0 }, lhs.max(wx)),
        inputs.clone(),
    );
    let order = CheckRecord::new(
        "baseline_order",
        k,
        wx,
        cheng,
        m(&|g| { let s = sides(g); s.1 - s.2 }, cheng.max(wx)),
        inputs,
    );
    Ok((cheng_rec, wx_rec, order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{clamped_beam_spectrum, dirichlet_box_spectrum};
    use std::f64::consts::PI;

    const P2: f64 = PI * PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn diag(eps: f64, delta: f64) -> OperatorConstants {
        OperatorConstants {
            epsilon: eps,
            delta,
            ..OperatorConstants::flat_identity()
        }
    }

    fn beam() -> Vec<f64> {
        clamped_beam_spectrum(1.0, 4).unwrap().values
    }

    #[test]
    fn quadratic_sum_unit_square() {
        let s = [2.0 * P2, 5.0 * P2];
        let r = quadratic_sum_check(&s, 1, &OperatorConstants::flat_identity(), 0.0, 2, &[0.0], &Uncertainty::analytic()).unwrap();
        assert_eq!(r.inputs["coefficient"], 2.0);
        assert!(rel(r.lhs, 876.6818193060219) < 1e-12);
        assert!(rel(r.rhs, 1168.9090924080292) < 1e-12);
        assert!(r.pass && r.slack > 0.0);
    }

    #[test]
    fn quadratic_sum_degenerate_top() {
        let s = [2.0 * P2, 5.0 * P2, 5.0 * P2, 8.0 * P2];
        let c = OperatorConstants::flat_identity();
        let k1 = quadratic_sum_check(&s, 1, &c, 0.0, 2, &[0.0; 3], &Uncertainty::analytic()).unwrap();
        let k2 = quadratic_sum_check(&s, 2, &c, 0.0, 2, &[0.0; 3], &Uncertainty::analytic()).unwrap();
        // σ₃ = σ₂: the extra term is zero on both sides, the rest equals the k = 1 case
        assert!(rel(k2.lhs, k1.lhs) < 1e-15 && rel(k2.rhs, k1.rhs) < 1e-15 && k2.pass);
    }

    #[test]
    fn anisotropic_coefficients() {
        let c = diag(0.5, 2.0);
        assert_eq!(quadratic_sum_coefficient(&c, 0.0, 2), 32.0);
        let s = [1.0, 2.0, 3.0];
        let r = lower_order_sum_check(&s, 0.0, &c, 0.0, 2, &Uncertainty::analytic()).unwrap();
        assert_eq!(r.inputs["coefficient"], 64.0);
        assert_eq!(r.rhs, 64.0);
        let g = recursive_growth_bound(1.0, 3, 0.0, &c, 0.0, 2, None, &Uncertainty::analytic()).unwrap();
        assert_eq!(g.inputs["coefficient"], 33.0);
        assert_eq!(g.inputs["exponent"], 16.0);
        assert!(rel(g.predicted.unwrap(), 33.0 * 3f64.powi(16)) < 1e-15);
    }

    #[test]
    fn lower_order_sum_unit_square() {
        // scalar spectrum {2, 5, 5}π²
        let s = [2.0 * P2, 5.0 * P2, 5.0 * P2];
        let r = lower_order_sum_check(&s, 0.0, &OperatorConstants::flat_identity(), 0.0, 2, &Uncertainty::analytic()).unwrap();
        assert!(rel(r.lhs, 6.0 * P2) < 1e-12 && rel(r.rhs, 8.0 * P2) < 1e-12 && r.pass);
        let flat = [3.0, 3.0, 3.0];
        assert!(lower_order_sum_check(&flat, 0.0, &OperatorConstants::flat_identity(), 0.0, 2, &Uncertainty::analytic()).unwrap().pass);
        assert!(lower_order_sum_check(&s[..2], 0.0, &OperatorConstants::flat_identity(), 0.0, 2, &Uncertainty::analytic()).is_err());
    }

    #[test]
    fn next_eigenvalue_unit_square() {
        let c = OperatorConstants::flat_identity();
        let s = dirichlet_box_spectrum(&[1.0, 1.0], 4).values;
        let b = next_eigenvalue_bound(&s, 1, 0.0, &c, 0.0, 2, &Uncertainty::analytic()).unwrap();
        assert!(rel(b.predicted.unwrap(), 6.0 * P2) < 1e-12);
        assert!(rel(b.gap_bound.unwrap(), 4.0 * P2) < 1e-12);
        assert!(b.pass && !b.discriminant_clamped);

        let b = next_eigenvalue_bound(&s, 3, 0.0, &c, 0.0, 2, &Uncertainty::analytic()).unwrap();
        assert!(rel(b.predicted.unwrap(), 110.16726472097926) < 1e-12);
        assert!(b.predicted.unwrap() >= 8.0 * P2 && b.pass);

        let skipped = next_eigenvalue_bound(&s, 2, -100.0, &c, 0.0, 2, &Uncertainty::analytic()).unwrap();
        assert!(skipped.skipped.is_some() && skipped.predicted.is_none());
    }

    #[test]
    fn recursive_growth_unit_square() {
        let c = OperatorConstants::flat_identity();
        for k in 1..6 {
            let b = recursive_growth_bound(2.0 * P2, k, 0.0, &c, 0.0, 2, None, &Uncertainty::analytic()).unwrap();
            assert!(rel(b.predicted.unwrap(), 3.0 * k as f64 * 2.0 * P2) < 1e-12);
        }
        let b = recursive_growth_bound(2.0 * P2, 1, 0.0, &c, 0.0, 2, Some(5.0 * P2), &Uncertainty::analytic()).unwrap();
        assert!(b.pass);
    }

    #[test]
    fn beam_reductions() {
        let g = beam();
        let c = OperatorConstants::flat_identity();
        let u = Uncertainty::analytic();
        let t = clamped_product_check(&g, 1, &c, 1, &u).unwrap();
        assert!(rel(t.lhs, 10909631.819590993) < 1e-9);
        assert!(rel(t.rhs, 20806208.92246228) < 1e-9);
        assert!(t.pass);

        for reading in [LowerOrderReading::Printed, LowerOrderReading::Shifted] {
            let l = clamped_lower_order_check(&g, 1, &c, 1, reading, &u).unwrap();
            assert!(rel(l.lhs, 57.47149883861943) < 1e-9);
            assert!(rel(l.rhs, 109.60626643477269) < 1e-9);
            assert!(l.pass);
        }

        // k = 1 reduces to (Γ₂ − Γ₁)² ≤ 24Γ₁(Γ₂ − Γ₁), i.e. Γ₂ ≤ 25Γ₁
        let q = clamped_quadratic_check(&g, 1, &c, 1, &u).unwrap();
        assert!(rel(q.rhs, 24.0 * g[0] * (g[1] - g[0])) < 1e-12);
        assert!(q.pass && g[1] <= 25.0 * g[0]);

        let b = clamped_next_eigenvalue_bound(&g, 1, &c, 1, &u).unwrap();
        assert!(rel(b.inputs["a_k"], 13.0 * g[0]) < 1e-12);
        assert!(rel(b.inputs["b_k"], 25.0 * g[0] * g[0]) < 1e-12);
        assert!(rel(b.predicted.unwrap(), 25.0 * g[0]) < 1e-9);
        assert!(rel(b.gap_bound.unwrap(), 24.0 * g[0]) < 1e-9);
        assert!(b.pass);
    }

    #[test]
    fn product_form_implies_quadratic_form() {
        // Jost ordering: (product RHS)² ≤ LHS · (quadratic RHS)
        let g = beam();
        let c = OperatorConstants { h0: 0.7, ..OperatorConstants::flat_identity() };
        for k in 1..4 {
            let t = clamped_product_check(&g, k, &c, 1, &Uncertainty::analytic()).unwrap();
            let q = clamped_quadratic_check(&g, k, &c, 1, &Uncertainty::analytic()).unwrap();
            assert!(t.rhs * t.rhs <= t.lhs * q.rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn curvature_enlarges_right_hand_sides() {
        let g = beam();
        let flat = OperatorConstants::flat_identity();
        let curved = OperatorConstants { h0: 1.0, ..flat };
        let u = Uncertainty::analytic();
        let a = clamped_product_check(&g, 1, &flat, 1, &u).unwrap();
        let b = clamped_product_check(&g, 1, &curved, 1, &u).unwrap();
        assert!(b.rhs > a.rhs && b.lhs == a.lhs);
        let a = clamped_quadratic_check(&g, 2, &flat, 1, &u).unwrap();
        let b = clamped_quadratic_check(&g, 2, &curved, 1, &u).unwrap();
        assert!(b.rhs > a.rhs);
    }

    #[test]
    fn printed_lower_order_reading_tightens_with_k() {
        // k (Γ_{k+1} − Γ₁)^{1/2} outgrows the right-hand side on beam data
        let g = beam();
        let c = OperatorConstants::flat_identity();
        let printed = clamped_lower_order_check(&g, 2, &c, 1, LowerOrderReading::Printed, &Uncertainty::analytic()).unwrap();
        assert!(!printed.pass);
    }

    #[test]
    fn jost_examples() {
        let r = jost_check(&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]).unwrap();
        assert_eq!((r.lhs, r.rhs, r.slack), (4.0, 4.0, 0.0));
        assert!(r.pass);
        let r = jost_check(&[2.0, 1.0], &[1.0, 2.0], &[1.0, 3.0]).unwrap();
        assert_eq!((r.lhs, r.rhs), (30.0, 40.0));
        let r = jost_check(&[3.0, 2.0, 1.0], &[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!((r.lhs, r.rhs), (36.0, 56.0));
        assert!(jost_check(&[1.0, 2.0], &[1.0, 1.0], &[1.0, 1.0]).is_err());
        assert!(jost_check(&[2.0, 1.0], &[2.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn baselines_on_beam() {
        let g = beam();
        let c = OperatorConstants::flat_identity();
        let (ch, wx, order) = baseline_checks(&g, 1, &c, 1, &Uncertainty::analytic()).unwrap();
        assert!(rel(ch.rhs, 24.0 * g[0] * (g[1] - g[0])) < 1e-12);
        assert!(ch.pass && wx.pass && order.pass);
        assert!(wx.rhs <= ch.rhs);
        let flat = [5.0; 3];
        let (ch, wx, _) = baseline_checks(&flat, 2, &c, 1, &Uncertainty::analytic()).unwrap();
        assert_eq!((ch.lhs, ch.rhs, wx.rhs), (0.0, 0.0, 0.0));
        assert!(baseline_checks(&g, 1, &diag(1.0, 2.0), 1, &Uncertainty::analytic()).is_err());
    }

    #[test]
    fn unsorted_rejected() {
        let c = OperatorConstants::flat_identity();
        assert!(quadratic_sum_check(&[3.0, 1.0], 1, &c, 0.0, 2, &[0.0], &Uncertainty::analytic()).is_err());
        assert!(clamped_product_check(&[3.0, 1.0], 1, &c, 1, &Uncertainty::analytic()).is_err());
    }

    #[test]
    fn margin_propagates_eigenvalue_uncertainty() {
        let s = [2.0 * P2, 5.0 * P2];
        let c = OperatorConstants::flat_identity();
        let exact = quadratic_sum_check(&s, 1, &c, 0.0, 2, &[0.0], &Uncertainty::analytic()).unwrap();
        let fuzzy = quadratic_sum_check(&s, 1, &c, 0.0, 2, &[0.0], &Uncertainty::computed(vec![0.01, 0.01])).unwrap();
        assert!(fuzzy.margin > exact.margin);
        // d(slack)/dσ₁ ≈ 2(σ₂−σ₁) + 2(σ₂ − 2σ₁), d(slack)/dσ₂ ≈ −2(σ₂−σ₁) + 2σ₁
        let d1 = (2.0 * 3.0 * P2 + 2.0 * (5.0 * P2 - 4.0 * P2)).abs();
        let d2 = (-2.0 * 3.0 * P2 + 2.0 * 2.0 * P2).abs();
        assert!(rel(fuzzy.margin - exact.margin, 0.01 * (d1 + d2)) < 1e-3);
    }

    fn ascending(v: Vec<f64>) -> Vec<f64> {
        let mut v = v;
        v.sort_by(f64::total_cmp);
        v
    }

    proptest::proptest! {
        #[test]
        fn only_first_k_plus_one_values_enter(
            base in proptest::collection::vec(1.0..1e3f64, 2..8),
            extra in proptest::collection::vec(0.0..1e3f64, 1..5),
        ) {
            let s = ascending(base);
            let k = s.len() - 1;
            let top = s[k];
            let mut longer = s.clone();
            longer.extend(extra.iter().map(|e| top + e));
            let c = OperatorConstants { h0: 0.3, ..OperatorConstants::flat_identity() };
            let u = Uncertainty::analytic();
            let z = vec![0.0; longer.len()];
            let a = quadratic_sum_check(&s, k, &c, 0.5, 2, &z, &u).unwrap();
            let b = quadratic_sum_check(&longer, k, &c, 0.5, 2, &z, &u).unwrap();
            proptest::prop_assert_eq!((a.lhs, a.rhs), (b.lhs, b.rhs));
            let a = clamped_product_check(&s, k, &c, 2, &u).unwrap();
            let b = clamped_product_check(&longer, k, &c, 2, &u).unwrap();
            proptest::prop_assert_eq!((a.lhs, a.rhs), (b.lhs, b.rhs));
            let a = clamped_quadratic_check(&s, k, &c, 2, &u).unwrap();
            let b = clamped_quadratic_check(&longer, k, &c, 2, &u).unwrap();
            proptest::prop_assert_eq!((a.lhs, a.rhs), (b.lhs, b.rhs));
        }

        #[test]
        fn clamped_bound_monotone_in_each_value(
            base in proptest::collection::vec(1.0..1e4f64, 1..8),
            which in 0usize..8,
            bump in 1e-3..10.0f64,
        ) {
            let g = ascending(base);
            let k = g.len();
            let i = which % k;
            let mut h = g.clone();
            h[i] += bump;
            let h = ascending(h);
            let c = OperatorConstants { h0: 0.5, ..OperatorConstants::flat_identity() };
            let a = clamped_next_eigenvalue_bound(&g, k, &c, 2, &Uncertainty::analytic()).unwrap();
            let b = clamped_next_eigenvalue_bound(&h, k, &c, 2, &Uncertainty::analytic()).unwrap();
            let (pa, pb) = (a.predicted.unwrap(), b.predicted.unwrap());
            proptest::prop_assert!(pb >= pa * (1.0 - 1e-12), "{} < {}", pb, pa);
        }

        #[test]
        fn quadratic_sum_verdict_invariant_under_joint_scaling(
            base in proptest::collection::vec(1.0..1e3f64, 2..8),
            norms in proptest::collection::vec(0.0..1.0f64, 8),
            scale in 0.1..10.0f64,
            alpha in 0.0..2.0f64,
        ) {
            // (T, α) → (cT, cα): σ → cσ, ε, δ, T₀ → c·, C₀ → c²·, ‖div_η u‖² unchanged
            let s = ascending(base);
            let k = s.len() - 1;
            let c = OperatorConstants { epsilon: 0.5, delta: 2.0, t0: 0.3, eta0: 0.0, c0: -0.1, h0: 0.0 };
            let cs = OperatorConstants {
                epsilon: scale * c.epsilon,
                delta: scale * c.delta,
                t0: scale * c.t0,
                c0: scale * scale * c.c0,
                ..c
            };
            let scaled: Vec<f64> = s.iter().map(|v| v * scale).collect();
            let u = Uncertainty { abs: Vec::new(), rel: 0.0 };
            let a = quadratic_sum_check(&s, k, &c, alpha, 2, &norms, &u).unwrap();
            let b = quadratic_sum_check(&scaled, k, &cs, scale * alpha, 2, &norms, &u).unwrap();
            if a.slack.abs() > 1e-9 * a.rhs.abs().max(a.lhs) {
                proptest::prop_assert_eq!(a.pass, b.pass);
            }
        }

        #[test]
        fn jost_lemma_holds(
            a in proptest::collection::vec(0.0..10.0f64, 1..20),
            b in proptest::collection::vec(0.0..10.0f64, 20),
            c in proptest::collection::vec(0.0..10.0f64, 20),
        ) {
            let m = a.len();
            let mut a = ascending(a);
            a.reverse();
            let r = jost_check(&a, &ascending(b[..m].to_vec()), &ascending(c[..m].to_vec())).unwrap();
            proptest::prop_assert!(r.pass, "slack {}", r.slack);
        }
    }
}
