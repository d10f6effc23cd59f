//! Run configuration and orchestration: assemble, solve, evaluate functionals, run the
//! inequality checks and collect everything into a serializable report.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::assembly::{assemble, Pencil, ProblemKind};
use crate::bounds::{
    baseline_checks, clamped_lower_order_check, clamped_next_eigenvalue_bound, clamped_product_check,
    clamped_quadratic_check, lower_order_sum_named, next_eigenvalue_bound_named, quadratic_sum_named,
    recursive_growth_named, BoundRecord, CheckRecord, LowerOrderReading, Uncertainty,
};
use crate::constants::{closed_form_constants, compute_constants, OperatorConstants};
use crate::domain::{
    build_domain, sample_eta, sample_tensor, DiscreteDomain, DomainSpec, EtaPreset, GridScalarField,
    GridTensorField, TensorPreset, MIN_RESOLUTION,
};
use crate::eigen::{smallest_eigenpairs_with, Method, SolverOptions, Spectrum, DEFAULT_TOL};
use crate::functionals::{div_eta_norms, shifts, Shifts, T0Variant};
use crate::{Error, Exec, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainSpec,
    #[serde(default = "default_eta")]
    pub eta: EtaPreset,
    #[serde(default = "default_tensor")]
    pub tensor: TensorPreset,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

fn default_eta() -> EtaPreset {
    EtaPreset::Zero {}
}

fn default_tensor() -> TensorPreset {
    TensorPreset::Identity {}
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    /// Coupling strength of the `∇div_η` term; used by the coupled system only.
    #[serde(default)]
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub k: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            k: 5,
            tol: DEFAULT_TOL,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    /// Power of `T₀` in the shifts `D₀`, `D₁`: 1 as printed, 2 matching the quadratic inequality.
    pub t0_power: u8,
    /// Which reading of the lower-order clamped inequality gates the exit status.
    pub lower_order_reading: LowerOrderReading,
    /// Also evaluate every second-order check with `‖div_η u_i‖²` replaced by zero.
    pub relax_div_term: bool,
    /// Number of grids (halving the resolution each time) used for Richardson estimates.
    pub refinement_levels: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            t0_power: 1,
            lower_order_reading: LowerOrderReading::Printed,
            relax_div_term: true,
            refinement_levels: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigFormat {
    Toml,
    Json,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub resolution: Option<usize>,
    pub k: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn parse(text: &str, format: ConfigFormat) -> Result<Self> {
        let cfg: RunConfig = match format {
            ConfigFormat::Json => serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?,
            ConfigFormat::Toml => toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a `.json` or TOML file; other extensions are sniffed by the first character.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).context(path.display().to_string()))?;
        let format = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => ConfigFormat::Json,
            Some("toml") => ConfigFormat::Toml,
            _ if text.trim_start().starts_with('{') => ConfigFormat::Json,
            _ => ConfigFormat::Toml,
        };
        Self::parse(&text, format).map_err(|e| e.context(path.display().to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.problem.alpha >= 0.0 && self.problem.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be non-negative, got {}", self.problem.alpha)));
        }
        if self.solve.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.solve.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.solve.tol)));
        }
        T0Variant::from_power(self.verify.t0_power)?;
        if self.verify.refinement_levels == 0 {
            return Err(Error::Config("refinement_levels must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self> {
        if let Some(n) = o.resolution {
            self.domain = self.domain.with_resolution(n);
        }
        if let Some(k) = o.k {
            self.solve.k = k;
        }
        if let Some(t) = o.tol {
            self.solve.tol = t;
        }
        if let Some(s) = o.seed {
            self.solve.seed = s;
        }
        self.validate()?;
        Ok(self)
    }

    /// Copy with the numeric field at the dotted `path` (e.g. `problem.alpha`,
    /// `tensor.diag.0`) set to `value`.
    pub fn with_param(&self, path: &str, value: f64) -> Result<Self> {
        let unknown = || Error::Config(format!("unknown parameter path `{path}`"));
        let mut root = serde_json::to_value(self)?;
        let mut cur = &mut root;
        for key in path.split('.') {
            cur = match cur {
                Value::Object(map) => map.get_mut(key).ok_or_else(unknown)?,
                Value::Array(items) => key
                    .parse::<usize>()
                    .ok()
                    .and_then(|i| items.get_mut(i))
                    .ok_or_else(unknown)?,
                _ => return Err(unknown()),
            };
        }
        match cur {
            Value::Number(n) if n.is_f64() => *cur = Value::from(value),
            Value::Number(_) => {
                if !(value >= 0.0 && value.fract() == 0.0) {
                    return Err(Error::Config(format!("`{path}` takes a non-negative integer, got {value}")));
                }
                *cur = Value::from(value as u64);
            }
            _ => return Err(Error::Config(format!("`{path}` is not a numeric field"))),
        }
        let cfg: RunConfig = serde_json::from_value(root).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Domain, sampled coefficients and the assembled pencil for one resolution.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub domain: DiscreteDomain,
    pub tensor: GridTensorField,
    pub eta: GridScalarField,
    pub pencil: Pencil,
}

pub fn prepare(config: &RunConfig) -> Result<Prepared> {
    prepare_at(config, config.domain.resolution())
}

fn prepare_at(config: &RunConfig, resolution: usize) -> Result<Prepared> {
    let ctx = format!("{:?} at resolution {resolution}", config.problem.kind);
    let build = || -> Result<Prepared> {
        let domain = build_domain(&config.domain.with_resolution(resolution))?;
        let tensor = sample_tensor(&config.tensor, &domain)?;
        let eta = sample_eta(&config.eta, &domain)?;
        let pencil = assemble(config.problem.kind, &tensor, &eta, &domain, config.problem.alpha)?;
        Ok(Prepared {
            domain,
            tensor,
            eta,
            pencil,
        })
    };
    build().map_err(|e| e.context(ctx))
}

/// Coordinate-triplet text of `K` and `M` for the configured problem.
pub fn matrix_dumps(config: &RunConfig) -> Result<(String, String)> {
    Ok(prepare(config)?.pencil.triplet_dumps())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub index: usize,
    pub value: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverInfo {
    pub method: String,
    pub dimension: usize,
    pub iterations: usize,
    pub seed: u64,
    pub symmetry_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftRow {
    pub k: usize,
    pub as_printed: Shifts,
    pub squared_t0: Shifts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTable {
    /// `‖div_η u_i‖²` per eigenpair; empty for scalar problems.
    pub div_eta_norm_sq: Vec<f64>,
    pub shifts: Vec<ShiftRow>,
    /// Variant used by the gating checks.
    pub variant: T0Variant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    /// Coarse to fine.
    pub resolutions: Vec<usize>,
    pub eigenvalues: Vec<Vec<f64>>,
    /// `(λ_coarse − λ_fine)/3` for the two finest grids.
    pub richardson_error: Vec<f64>,
    pub extrapolated: Vec<f64>,
    /// `(λ_{N/4} − λ_{N/2}) / (λ_{N/2} − λ_N)` per eigenvalue for each triple of grids.
    pub ratios: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub command: String,
    pub config: RunConfig,
    /// Constants used by the checks.
    pub constants: OperatorConstants,
    pub constants_source: String,
    pub computed_constants: OperatorConstants,
    pub closed_form_constants: Option<OperatorConstants>,
    pub solver: SolverInfo,
    pub spectrum: Vec<SpectrumRow>,
    pub functionals: Option<FunctionalTable>,
    pub checks: Vec<CheckRecord>,
    /// Evaluated and reported, but not part of the exit status.
    pub informational_checks: Vec<CheckRecord>,
    pub bounds: Vec<BoundRecord>,
    pub convergence: Option<ConvergenceTable>,
    pub warnings: Vec<String>,
    pub all_passed: bool,
    pub wall_time_seconds: f64,
}

impl Report {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.spectrum.iter().map(|r| r.value).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Smallest `rhs − lhs` over the gating checks and `predicted − observed` over the
    /// evaluated bounds.
    pub fn tightest_slack(&self) -> Option<f64> {
        let checks = self.checks.iter().map(|c| c.slack);
        let bounds = self
            .bounds
            .iter()
            .filter_map(|b| Some(b.predicted? - b.observed?));
        checks.chain(bounds).reduce(f64::min)
    }

    pub fn failures(&self) -> Vec<String> {
        let checks = self.checks.iter().filter(|c| !c.pass).map(|c| format!("{} (k = {})", c.name, c.k));
        let bounds = self.bounds.iter().filter(|b| !b.pass).map(|b| format!("{} (k = {})", b.name, b.k));
        checks.chain(bounds).collect()
    }

    /// Equality ignoring the wall time.
    pub fn same_results(&self, other: &Report) -> bool {
        let mut a = self.clone();
        a.wall_time_seconds = other.wall_time_seconds;
        &a == other
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Dense => "dense",
        Method::SubspaceIteration => "shift_invert_subspace_iteration",
    }
}

fn solve_prepared(prep: &Prepared, nev: usize, config: &RunConfig, exec: Exec) -> Result<Spectrum> {
    let opts = SolverOptions {
        tol: config.solve.tol,
        seed: config.solve.seed,
        exec,
        max_iterations: None,
    };
    smallest_eigenpairs_with(&prep.pencil, nev, &opts).map_err(|e| {
        e.context(format!(
            "solving {:?} at resolution {}",
            config.problem.kind,
            prep.domain.resolution()
        ))
    })
}

struct ConstantsChoice {
    used: OperatorConstants,
    source: &'static str,
    computed: OperatorConstants,
    closed: Option<OperatorConstants>,
}

fn choose_constants(config: &RunConfig, prep: &Prepared) -> Result<ConstantsChoice> {
    let computed = compute_constants(&prep.tensor, &prep.eta, &prep.domain)?;
    let closed = closed_form_constants(&config.eta, &config.tensor, &prep.domain);
    Ok(match closed {
        Some(c) => ConstantsChoice {
            used: c,
            source: "closed_form",
            computed,
            closed,
        },
        None => ConstantsChoice {
            used: computed,
            source: "grid",
            computed,
            closed,
        },
    })
}

fn spectrum_rows(s: &Spectrum) -> Vec<SpectrumRow> {
    s.values
        .iter()
        .zip(&s.residuals)
        .enumerate()
        .map(|(i, (&value, &residual))| SpectrumRow {
            index: i + 1,
            value,
            residual,
        })
        .collect()
}

fn solver_info(s: &Spectrum, p: &Pencil) -> SolverInfo {
    SolverInfo {
        method: method_name(s.method).into(),
        dimension: p.dim(),
        iterations: s.iterations,
        seed: s.seed,
        symmetry_defect: p.symmetry_defect,
    }
}

pub fn run_spectrum(config: &RunConfig) -> Result<Report> {
    run_spectrum_with(config, Exec::default())
}

/// Eigenpairs and constants only.
pub fn run_spectrum_with(config: &RunConfig, exec: Exec) -> Result<Report> {
    let start = Instant::now();
    config.validate()?;
    let prep = prepare(config)?;
    let spectrum = solve_prepared(&prep, config.solve.k, config, exec)?;
    let consts = choose_constants(config, &prep)?;
    Ok(Report {
        tool_version: TOOL_VERSION.into(),
        command: "spectrum".into(),
        config: config.clone(),
        constants: consts.used,
        constants_source: consts.source.into(),
        computed_constants: consts.computed,
        closed_form_constants: consts.closed,
        solver: solver_info(&spectrum, &prep.pencil),
        spectrum: spectrum_rows(&spectrum),
        functionals: None,
        checks: Vec::new(),
        informational_checks: Vec::new(),
        bounds: Vec::new(),
        convergence: None,
        warnings: Vec::new(),
        all_passed: true,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Solves on successively halved grids; returns the table (if at least two grids
/// were usable) and warnings for the grids that were not.
fn refine(
    config: &RunConfig,
    fine: &[f64],
    nev: usize,
    exec: Exec,
    warnings: &mut Vec<String>,
) -> Result<Option<ConvergenceTable>> {
    let levels = config.verify.refinement_levels;
    if levels < 2 {
        return Ok(None);
    }
    if matches!(config.eta, EtaPreset::Tabulated { .. }) {
        warnings.push("tabulated η has a fixed resolution; Richardson estimates skipped".into());
        return Ok(None);
    }
    let n = config.domain.resolution();
    let mut resolutions = vec![n];
    let mut eigenvalues = vec![fine.to_vec()];
    for l in 1..levels {
        let div = 1usize << l;
        let coarse = n / div;
        if n % div != 0 || coarse < MIN_RESOLUTION {
            warnings.push(format!(
                "refinement level {l} skipped: resolution {n} does not halve to a grid of at least {MIN_RESOLUTION} cells"
            ));
            break;
        }
        let prep = prepare_at(config, coarse)?;
        if prep.pencil.dim() < nev {
            warnings.push(format!("refinement level {l} skipped: coarse pencil smaller than {nev}"));
            break;
        }
        let s = solve_prepared(&prep, nev, config, exec)?;
        resolutions.insert(0, coarse);
        eigenvalues.insert(0, s.values);
    }
    if resolutions.len() < 2 {
        return Ok(None);
    }
    let m = resolutions.len();
    let (coarse, fine) = (&eigenvalues[m - 2], &eigenvalues[m - 1]);
    let richardson_error: Vec<f64> = coarse.iter().zip(fine).map(|(c, f)| (c - f) / 3.0).collect();
    let extrapolated = coarse.iter().zip(fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    let ratios = (0..m.saturating_sub(2))
        .map(|l| {
            (0..nev)
                .map(|i| {
                    let r = (eigenvalues[l][i] - eigenvalues[l + 1][i]) / (eigenvalues[l + 1][i] - eigenvalues[l + 2][i]);
                    r.is_finite().then_some(r)
                })
                .collect()
        })
        .collect();
    Ok(Some(ConvergenceTable {
        resolutions,
        eigenvalues,
        richardson_error,
        extrapolated,
        ratios,
    }))
}

pub fn run_verify(config: &RunConfig) -> Result<Report> {
    run_verify_with(config, Exec::default())
}

/// Solves for `k + 1` eigenpairs and runs every inequality applicable to the problem
/// kind for each `j = 1..k`.
pub fn run_verify_with(config: &RunConfig, exec: Exec) -> Result<Report> {
    let start = Instant::now();
    config.validate()?;
    let k = config.solve.k;
    let nev = k + 1;
    let prep = prepare(config)?;
    let spectrum = solve_prepared(&prep, nev, config, exec)?;
    let consts = choose_constants(config, &prep)?;
    let c = consts.used;
    let mut warnings = Vec::new();
    let convergence = refine(config, &spectrum.values, nev, exec, &mut warnings)?;

    let abs: Vec<f64> = (0..nev)
        .map(|i| {
            let rich = convergence.as_ref().map_or(0.0, |t| t.richardson_error[i].abs());
            3.0 * spectrum.residuals[i] * spectrum.values[i] + 3.0 * rich
        })
        .collect();
    let unc = Uncertainty::computed(abs);
    let values = &spectrum.values;
    let n = prep.domain.dim();

    let mut checks = Vec::new();
    let mut informational = Vec::new();
    let mut bounds = Vec::new();
    let mut functionals = None;

    if config.problem.kind.is_second_order() {
        let system = config.problem.kind == ProblemKind::SecondOrderSystem;
        let alpha = if system { config.problem.alpha } else { 0.0 };
        if !system && config.problem.alpha != 0.0 {
            warnings.push("alpha is ignored for the scalar problem".into());
        }
        let div = if system {
            div_eta_norms(&prep.domain, &prep.eta, &spectrum.vectors, exec)?
        } else {
            Vec::new()
        };
        let div_or_zero = if system { div.clone() } else { vec![0.0; nev] };
        let zeros = vec![0.0; nev];
        let variant = T0Variant::from_power(config.verify.t0_power)?;
        let relax = config.verify.relax_div_term && alpha > 0.0;

        let mut rows = Vec::new();
        for j in 1..=k {
            let printed = shifts(alpha, &div_or_zero, &c, j, T0Variant::AsPrinted)?;
            let squared = shifts(alpha, &div_or_zero, &c, j, T0Variant::SquaredT0)?;
            rows.push(ShiftRow {
                k: j,
                as_printed: printed,
                squared_t0: squared,
            });
            let d0 = if variant == T0Variant::AsPrinted { printed.d0 } else { squared.d0 };
            let d0_relaxed = shifts(0.0, &div_or_zero, &c, j, variant)?.d0;

            checks.push(quadratic_sum_named("quadratic_sum", values, j, &c, alpha, n, &div_or_zero, &unc)?);
            if relax {
                checks.push(quadratic_sum_named("quadratic_sum_relaxed", values, j, &c, alpha, n, &zeros, &unc)?);
            }
            let mut next = vec![("next_eigenvalue_bound", d0)];
            let mut growth = vec![("recursive_growth_bound", d0)];
            if relax {
                next.push(("next_eigenvalue_bound_relaxed", d0_relaxed));
                growth.push(("recursive_growth_bound_relaxed", d0_relaxed));
            }
            for (name, d) in next {
                bounds.push(next_eigenvalue_bound_named(name, &values[..=j], j, d, &c, alpha, n, &unc)?);
            }
            for (name, d) in growth {
                bounds.push(recursive_growth_named(name, values[0], j, d, &c, alpha, n, Some(values[j]), &unc)?);
            }
        }
        if nev > n {
            let d1 = shifts(alpha, &div_or_zero, &c, 1, variant)?.d1;
            checks.push(lower_order_sum_named("lower_order_sum", values, d1, &c, alpha, n, &unc)?);
            if relax {
                let d1 = shifts(0.0, &div_or_zero, &c, 1, variant)?.d1;
                checks.push(lower_order_sum_named("lower_order_sum_relaxed", values, d1, &c, alpha, n, &unc)?);
            }
        } else {
            warnings.push(format!("lower_order_sum needs k ≥ {n}"));
        }
        functionals = Some(FunctionalTable {
            div_eta_norm_sq: div,
            shifts: rows,
            variant,
        });
    } else {
        let baseline = config.tensor.is_identity() && config.eta.is_constant();
        for j in 1..=k {
            checks.push(clamped_product_check(values, j, &c, n, &unc)?);
            checks.push(clamped_quadratic_check(values, j, &c, n, &unc)?);
            bounds.push(clamped_next_eigenvalue_bound(&values[..=j], j, &c, n, &unc)?);
            if baseline {
                let (cheng, wang_xia, order) = baseline_checks(values, j, &c, n, &unc)?;
                checks.extend([cheng, wang_xia, order]);
            }
        }
        if nev > n {
            for reading in [LowerOrderReading::Printed, LowerOrderReading::Shifted] {
                let rec = clamped_lower_order_check(values, n, &c, n, reading, &unc)?;
                if reading == config.verify.lower_order_reading {
                    checks.push(rec);
                } else {
                    informational.push(rec);
                }
            }
        } else {
            warnings.push(format!("lower-order clamped checks need k ≥ {n}"));
        }
    }

    for b in bounds.iter().filter(|b| b.skipped.is_some()) {
        warnings.push(format!("{} (k = {}) skipped: {}", b.name, b.k, b.skipped.as_deref().unwrap_or("")));
    }
    for b in bounds.iter().filter(|b| b.discriminant_clamped) {
        warnings.push(format!("{} (k = {}): negative discriminant clamped to zero", b.name, b.k));
    }
    let all_passed = checks.iter().all(|r| r.pass) && bounds.iter().all(|b| b.pass);

    Ok(Report {
        tool_version: TOOL_VERSION.into(),
        command: "verify".into(),
        config: config.clone(),
        constants: c,
        constants_source: consts.source.into(),
        computed_constants: consts.computed,
        closed_form_constants: consts.closed,
        solver: solver_info(&spectrum, &prep.pencil),
        spectrum: spectrum_rows(&spectrum),
        functionals,
        checks,
        informational_checks: informational,
        bounds,
        convergence,
        warnings,
        all_passed,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs independent verifications, in parallel when `exec` allows.
pub fn run_many(configs: &[RunConfig], exec: Exec) -> Vec<Result<Report>> {
    exec.map(configs.len(), |i| run_verify_with(&configs[i], exec))
}

/// One verification per value of the numeric field at `path`.
pub fn run_sweep(config: &RunConfig, path: &str, values: &[f64], exec: Exec) -> Result<Vec<Report>> {
    let configs = values
        .iter()
        .map(|&v| config.with_param(path, v))
        .collect::<Result<Vec<_>>>()?;
    run_many(&configs, exec).into_iter().collect()
}

/// `index,eigenvalue,residual`, one row per eigenpair.
pub fn spectrum_csv(report: &Report) -> String {
    let mut out = String::from("index,eigenvalue,residual\n");
    for r in &report.spectrum {
        out.push_str(&format!("{},{:.16e},{:.16e}\n", r.index, r.value, r.residual));
    }
    out
}

/// `value,sigma_1..sigma_k,tightest_slack`, one row per sweep point.
pub fn sweep_summary_csv(values: &[f64], reports: &[Report]) -> String {
    let k = reports.iter().map(|r| r.config.solve.k).max().unwrap_or(0);
    let mut out = String::from("value");
    for i in 1..=k {
        out.push_str(&format!(",sigma_{i}"));
    }
    out.push_str(",tightest_slack\n");
    for (v, r) in values.iter().zip(reports) {
        out.push_str(&format!("{v}"));
        for i in 0..k {
            match r.spectrum.get(i) {
                Some(row) => out.push_str(&format!(",{:.16e}", row.value)),
                None => out.push(','),
            }
        }
        match r.tightest_slack() {
            Some(s) => out.push_str(&format!(",{s:.16e}\n")),
            None => out.push_str(",\n"),
        }
    }
    out
}
