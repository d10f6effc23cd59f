//! Structured grids over boxes and circle arcs, and the coefficient fields sampled on them.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Smallest accepted number of cells per axis.
pub const MIN_RESOLUTION: usize = 4;

/// Domain description as it appears in a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    /// `[0, ℓ₁] × … × [0, ℓₙ]` with `n ∈ {1, 2}`.
    Box { lengths: Vec<f64>, resolution: usize },
    /// Circle arc of radius `radius` spanning `angle` radians, parametrized by arclength.
    Arc {
        radius: f64,
        angle: f64,
        resolution: usize,
    },
}

impl DomainSpec {
    pub fn unit_square(resolution: usize) -> Self {
        DomainSpec::Box {
            lengths: vec![1.0, 1.0],
            resolution,
        }
    }

    pub fn unit_interval(resolution: usize) -> Self {
        DomainSpec::Box {
            lengths: vec![1.0],
            resolution,
        }
    }

    pub fn resolution(&self) -> usize {
        match self {
            DomainSpec::Box { resolution, .. } | DomainSpec::Arc { resolution, .. } => *resolution,
        }
    }

    pub fn with_resolution(&self, n: usize) -> Self {
        let mut s = self.clone();
        match &mut s {
            DomainSpec::Box { resolution, .. } | DomainSpec::Arc { resolution, .. } => *resolution = n,
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DomainKind {
    Box,
    Arc { radius: f64, angle: f64 },
}

/// Uniform tensor-product grid. Nodes are numbered with the first axis fastest;
/// the outer layer of nodes (corners included) is the boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDomain {
    kind: DomainKind,
    resolution: usize,
    lengths: Vec<f64>,
    spacing: Vec<f64>,
    interior_of: Vec<Option<usize>>,
    interior_nodes: Vec<usize>,
}

pub fn build_domain(spec: &DomainSpec) -> Result<DiscreteDomain> {
    DiscreteDomain::new(spec)
}

impl DiscreteDomain {
    pub fn new(spec: &DomainSpec) -> Result<Self> {
        let resolution = spec.resolution();
        if resolution < MIN_RESOLUTION {
            return Err(Error::InvalidDomain(format!(
                "resolution {resolution} below minimum {MIN_RESOLUTION}"
            )));
        }
        let (kind, lengths) = match spec {
            DomainSpec::Box { lengths, .. } => {
                if lengths.is_empty() || lengths.len() > 2 {
                    return Err(Error::InvalidDomain(format!(
                        "box dimension must be 1 or 2, got {}",
                        lengths.len()
                    )));
                }
                if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
                    return Err(Error::InvalidDomain(format!(
                        "side lengths must be positive, got {lengths:?}"
                    )));
                }
                (DomainKind::Box, lengths.clone())
            }
            DomainSpec::Arc { radius, angle, .. } => {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidDomain(format!("radius must be positive, got {radius}")));
                }
                if !(*angle > 0.0 && *angle < 2.0 * std::f64::consts::PI) {
                    return Err(Error::InvalidDomain(format!(
                        "angular span must lie in (0, 2π), got {angle}"
                    )));
                }
                (
                    DomainKind::Arc {
                        radius: *radius,
                        angle: *angle,
                    },
                    vec![radius * angle],
                )
            }
        };

        let spacing: Vec<f64> = lengths.iter().map(|l| l / resolution as f64).collect();
        let per_axis = resolution + 1;
        let node_count = per_axis.pow(lengths.len() as u32);
        let mut interior_of = vec![None; node_count];
        let mut interior_nodes = Vec::new();
        for node in 0..node_count {
            let on_boundary = (0..lengths.len()).any(|a| {
                let i = (node / per_axis.pow(a as u32)) % per_axis;
                i == 0 || i == resolution
            });
            if !on_boundary {
                interior_of[node] = Some(interior_nodes.len());
                interior_nodes.push(node);
            }
        }

        Ok(Self {
            kind,
            resolution,
            lengths,
            spacing,
            interior_of,
            interior_nodes,
        })
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn is_arc(&self) -> bool {
        matches!(self.kind, DomainKind::Arc { .. })
    }

    /// Intrinsic dimension (1 for arcs).
    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.resolution + 1
    }

    pub fn node_count(&self) -> usize {
        self.interior_of.len()
    }

    pub fn interior_count(&self) -> usize {
        self.interior_nodes.len()
    }

    /// Volume of one grid cell, `∏ hₐ`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Dual-cell volume of a node: the cell volume halved once per axis on which the
    /// node sits on the boundary (trapezoidal weights).
    pub fn dual_volume(&self, node: usize) -> f64 {
        let mut v = self.cell_volume();
        for a in 0..self.dim() {
            let i = self.axis_index(node, a);
            if i == 0 || i == self.resolution {
                v *= 0.5;
            }
        }
        v
    }

    pub fn axis_index(&self, node: usize, axis: usize) -> usize {
        (node / self.nodes_per_axis().pow(axis as u32)) % self.nodes_per_axis()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.nodes_per_axis().pow(axis as u32)
    }

    pub fn node_at(&self, idx: &[usize]) -> usize {
        idx.iter()
            .enumerate()
            .map(|(a, &i)| i * self.stride(a))
            .sum()
    }

    /// Neighbour along `axis` at signed offset, or `None` if it would leave the grid.
    pub fn neighbor(&self, node: usize, axis: usize, offset: isize) -> Option<usize> {
        let i = self.axis_index(node, axis) as isize + offset;
        if i < 0 || i > self.resolution as isize {
            return None;
        }
        let s = self.stride(axis) as isize;
        Some((node as isize + offset * s) as usize)
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|a| self.axis_index(node, a) as f64 * self.spacing[a])
            .collect()
    }

    pub fn is_boundary(&self, node: usize) -> bool {
        self.interior_of[node].is_none()
    }

    /// Boundary along a specific axis (the node is on a face normal to `axis`).
    pub fn is_boundary_along(&self, node: usize, axis: usize) -> bool {
        let i = self.axis_index(node, axis);
        i == 0 || i == self.resolution
    }

    pub fn interior_index(&self, node: usize) -> Option<usize> {
        self.interior_of[node]
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior_nodes
    }

    /// Scatters interior values into a full nodal vector with zeros on the boundary.
    pub fn extend_by_zero(&self, interior: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.node_count()];
        for (k, &node) in self.interior_nodes.iter().enumerate() {
            full[node] = interior[k];
        }
        full
    }

    /// Curvature of the embedding (arcs only).
    pub fn curvature(&self) -> f64 {
        match self.kind {
            DomainKind::Box => 0.0,
            DomainKind::Arc { radius, .. } => 1.0 / radius,
        }
    }

    /// First derivative of nodal data along `axis`: centered at nodes interior to that
    /// axis, second-order one-sided on the faces normal to it.
    pub fn derivative(&self, values: &[f64], node: usize, axis: usize) -> f64 {
        let h = self.spacing[axis];
        let i = self.axis_index(node, axis);
        let s = self.stride(axis);
        if i == 0 {
            (-3.0 * values[node] + 4.0 * values[node + s] - values[node + 2 * s]) / (2.0 * h)
        } else if i == self.resolution {
            (3.0 * values[node] - 4.0 * values[node - s] + values[node - 2 * s]) / (2.0 * h)
        } else {
            (values[node + s] - values[node - s]) / (2.0 * h)
        }
    }

    pub fn gradient(&self, values: &[f64], node: usize) -> Vec<f64> {
        (0..self.dim()).map(|a| self.derivative(values, node, a)).collect()
    }
}

/// Real value per node (the drift η).
#[derive(Debug, Clone, PartialEq)]
pub struct GridScalarField {
    values: Vec<f64>,
}

impl GridScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at node {i}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, node: usize) -> f64 {
        self.values[node]
    }
}

/// Symmetric matrix of order ≤ 2; `xy` and `yy` are zero in one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymTensor {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl SymTensor {
    pub fn scalar(t: f64) -> Self {
        Self {
            xx: t,
            xy: 0.0,
            yy: 0.0,
        }
    }

    pub fn entry(&self, a: usize, b: usize) -> f64 {
        match (a, b) {
            (0, 0) => self.xx,
            (1, 1) => self.yy,
            _ => self.xy,
        }
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self, dim: usize) -> (f64, f64) {
        if dim == 1 {
            return (self.xx, self.xx);
        }
        let mean = 0.5 * (self.xx + self.yy);
        let r = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        (mean - r, mean + r)
    }

    pub fn apply(&self, dim: usize, v: &[f64]) -> Vec<f64> {
        if dim == 1 {
            vec![self.xx * v[0]]
        } else {
            vec![self.xx * v[0] + self.xy * v[1], self.xy * v[0] + self.yy * v[1]]
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            xx: c * self.xx,
            xy: c * self.xy,
            yy: c * self.yy,
        }
    }
}

/// Symmetric positive definite tensor per node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridTensorField {
    dim: usize,
    values: Vec<SymTensor>,
}

impl GridTensorField {
    /// Validates full matrices (row-major, `dim × dim` per node): symmetry to 1e-14 of the
    /// entry magnitude and positive definiteness. Failure names the offending node.
    pub fn from_matrices(dom: &DiscreteDomain, matrices: &[Vec<f64>]) -> Result<Self> {
        let dim = dom.dim();
        if matrices.len() != dom.node_count() {
            return Err(Error::DimensionMismatch(format!(
                "{} tensors for {} nodes",
                matrices.len(),
                dom.node_count()
            )));
        }
        let mut values = Vec::with_capacity(matrices.len());
        for (node, m) in matrices.iter().enumerate() {
            if m.len() != dim * dim {
                return Err(Error::DimensionMismatch(format!(
                    "tensor at node {node} has {} entries, expected {}",
                    m.len(),
                    dim * dim
                )));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidField(format!("non-finite tensor entry at node {node}")));
            }
            let t = if dim == 1 {
                SymTensor::scalar(m[0])
            } else {
                let scale = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
                if (m[1] - m[2]).abs() > 1e-14 * scale {
                    return Err(Error::InvalidField(format!(
                        "tensor at node {node} not symmetric: {} vs {}",
                        m[1], m[2]
                    )));
                }
                SymTensor {
                    xx: m[0],
                    xy: 0.5 * (m[1] + m[2]),
                    yy: m[3],
                }
            };
            values.push(t);
        }
        let field = Self { dim, values };
        field.check_spd(dom)?;
        Ok(field)
    }

    fn check_spd(&self, dom: &DiscreteDomain) -> Result<()> {
        for (node, t) in self.values.iter().enumerate() {
            let (lo, _) = t.eigenvalues(self.dim);
            if !(lo > 0.0) {
                return Err(Error::NotSpd {
                    node,
                    coords: dom.coords(node),
                    min_eigenvalue: lo,
                });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, node: usize) -> SymTensor {
        self.values[node]
    }

    pub fn values(&self) -> &[SymTensor] {
        &self.values
    }

    /// `cT`, for scaling studies.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            values: self.values.iter().map(|t| t.scaled(c)).collect(),
        }
    }

    pub fn is_diagonal_at(&self, node: usize) -> bool {
        let t = self.values[node];
        t.xy.abs() <= 1e-14 * t.xx.abs().max(t.yy.abs())
    }
}

/// Drift presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum EtaPreset {
    Zero {},
    /// `c·|x − center|²`; the center defaults to the origin.
    Quadratic {
        c: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
    },
    /// `⟨a, x⟩`.
    Linear { a: Vec<f64> },
    /// One value per node, at the grid's exact resolution.
    Tabulated { values: Vec<f64> },
}

/// Tensor presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum TensorPreset {
    Identity {},
    ConstantDiagonal { diag: Vec<f64> },
    /// `R(angle)·diag(a, b)·R(angle)ᵀ`, two dimensions only.
    RotatedDiagonal { a: f64, b: f64, angle: f64 },
    /// `T_ii(x) = 1 + β·x_i²`, off-diagonal zero.
    VaryingDiagonal { beta: f64 },
    /// One-dimensional `t(s) = Σ coeffs[k]·s^k` in the arclength (or x) coordinate.
    ScalarFunction { coeffs: Vec<f64> },
}

impl TensorPreset {
    /// Constant presets are node-independent and hence divergence-free.
    pub fn is_constant(&self) -> bool {
        match self {
            TensorPreset::Identity {}
            | TensorPreset::ConstantDiagonal { .. }
            | TensorPreset::RotatedDiagonal { .. } => true,
            TensorPreset::VaryingDiagonal { beta } => *beta == 0.0,
            TensorPreset::ScalarFunction { coeffs } => coeffs.iter().skip(1).all(|&c| c == 0.0),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            TensorPreset::Identity {} => true,
            TensorPreset::ConstantDiagonal { diag } => diag.iter().all(|&d| d == 1.0),
            TensorPreset::VaryingDiagonal { beta } => *beta == 0.0,
            TensorPreset::ScalarFunction { coeffs } => {
                coeffs.first() == Some(&1.0) && coeffs.iter().skip(1).all(|&c| c == 0.0)
            }
            TensorPreset::RotatedDiagonal { a, b, .. } => *a == 1.0 && *b == 1.0,
        }
    }
}

impl EtaPreset {
    pub fn is_constant(&self) -> bool {
        match self {
            EtaPreset::Zero {} => true,
            EtaPreset::Quadratic { c, .. } => *c == 0.0,
            EtaPreset::Linear { a } => a.iter().all(|&v| v == 0.0),
            EtaPreset::Tabulated { values } => values.windows(2).all(|w| w[0] == w[1]),
        }
    }
}

fn check_vector_dim(what: &str, v: &[f64], dom: &DiscreteDomain) -> Result<()> {
    if v.len() != dom.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{what} has {} components on a {}-dimensional domain",
            v.len(),
            dom.dim()
        )));
    }
    Ok(())
}

pub fn sample_eta(preset: &EtaPreset, dom: &DiscreteDomain) -> Result<GridScalarField> {
    let values = match preset {
        EtaPreset::Zero {} => vec![0.0; dom.node_count()],
        EtaPreset::Quadratic { c, center } => {
            let center = center.clone().unwrap_or_else(|| vec![0.0; dom.dim()]);
            check_vector_dim("quadratic center", &center, dom)?;
            (0..dom.node_count())
                .map(|node| {
                    let x = dom.coords(node);
                    c * x.iter().zip(&center).map(|(xi, ci)| (xi - ci).powi(2)).sum::<f64>()
                })
                .collect()
        }
        EtaPreset::Linear { a } => {
            check_vector_dim("linear coefficient", a, dom)?;
            (0..dom.node_count())
                .map(|node| dom.coords(node).iter().zip(a).map(|(x, ai)| x * ai).sum())
                .collect()
        }
        EtaPreset::Tabulated { values } => {
            if values.len() != dom.node_count() {
                return Err(Error::DimensionMismatch(format!(
                    "tabulated η has {} values, grid has {} nodes",
                    values.len(),
                    dom.node_count()
                )));
            }
            values.clone()
        }
    };
    GridScalarField::new(values)
}

pub fn sample_tensor(preset: &TensorPreset, dom: &DiscreteDomain) -> Result<GridTensorField> {
    let dim = dom.dim();
    let constant = |m: Vec<f64>| vec![m; dom.node_count()];
    let matrices: Vec<Vec<f64>> = match preset {
        TensorPreset::Identity {} => {
            if dim == 1 {
                constant(vec![1.0])
            } else {
                constant(vec![1.0, 0.0, 0.0, 1.0])
            }
        }
        TensorPreset::ConstantDiagonal { diag } => {
            check_vector_dim("constant diagonal", diag, dom)?;
            if dim == 1 {
                constant(vec![diag[0]])
            } else {
                constant(vec![diag[0], 0.0, 0.0, diag[1]])
            }
        }
        TensorPreset::RotatedDiagonal { a, b, angle } => {
            if dim != 2 {
                return Err(Error::DimensionMismatch(
                    "rotated diagonal tensor requires a two-dimensional box".into(),
                ));
            }
            let (s, c) = angle.sin_cos();
            let xx = a * c * c + b * s * s;
            let yy = a * s * s + b * c * c;
            let xy = (a - b) * c * s;
            constant(vec![xx, xy, xy, yy])
        }
        TensorPreset::VaryingDiagonal { beta } => (0..dom.node_count())
            .map(|node| {
                let x = dom.coords(node);
                if dim == 1 {
                    vec![1.0 + beta * x[0] * x[0]]
                } else {
                    vec![1.0 + beta * x[0] * x[0], 0.0, 0.0, 1.0 + beta * x[1] * x[1]]
                }
            })
            .collect(),
        TensorPreset::ScalarFunction { coeffs } => {
            if dim != 1 {
                return Err(Error::DimensionMismatch(
                    "scalar tensor function requires a one-dimensional domain".into(),
                ));
            }
            if coeffs.is_empty() {
                return Err(Error::InvalidField("empty polynomial for t(s)".into()));
            }
            (0..dom.node_count())
                .map(|node| {
                    let s = dom.coords(node)[0];
                    vec![coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)]
                })
                .collect()
        }
    };
    GridTensorField::from_matrices(dom, &matrices)
}
