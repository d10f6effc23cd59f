//! Smallest eigenpairs of a symmetric pencil `K x = λ M x` with `M` positive diagonal.
//!
//! Small pencils are reduced to the dense standard problem `M^{-1/2} K M^{-1/2}`. Larger
//! ones use block subspace iteration on the shift-invert operator `K^{-1}M` (banded
//! Cholesky of `K`) with a Rayleigh–Ritz step every sweep. The block is wider than the
//! number of wanted pairs, so clusters of equal eigenvalues are resolved together.
//! Every returned pair carries its relative residual `‖Kx − λMx‖ / (λ‖Mx‖)`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::Pencil;
use crate::sparse::{BandCholesky, CsrMatrix};
use crate::{Error, Exec, Result};

pub const DEFAULT_TOL: f64 = 1e-8;
/// Pencils up to this size are solved densely.
pub const DENSE_LIMIT: usize = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Dense,
    SubspaceIteration,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Ascending.
    pub values: Vec<f64>,
    /// M-orthonormal.
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub seed: u64,
    pub method: Method,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub tol: f64,
    pub seed: u64,
    pub exec: Exec,
    /// Defaults to `500·k` sweeps.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            seed: 0,
            exec: Exec::default(),
            max_iterations: None,
        }
    }
}

pub fn smallest_eigenpairs(pencil: &Pencil, k: usize, tol: f64, seed: u64) -> Result<Spectrum> {
    solve(
        &pencil.k,
        &pencil.m,
        k,
        &SolverOptions {
            tol,
            seed,
            ..Default::default()
        },
    )
}

pub fn smallest_eigenpairs_with(pencil: &Pencil, k: usize, opts: &SolverOptions) -> Result<Spectrum> {
    solve(&pencil.k, &pencil.m, k, opts)
}

/// Relative residual `‖Kx − λMx‖ / (λ‖Mx‖)`.
pub fn residual(k: &CsrMatrix, m: &[f64], lambda: f64, x: &[f64]) -> f64 {
    let kx = k.matvec(x);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..x.len() {
        let mx = m[i] * x[i];
        num += (kx[i] - lambda * mx).powi(2);
        den += mx * mx;
    }
    num.sqrt() / (lambda.abs() * den.sqrt())
}

pub fn pencil_residual(pencil: &Pencil, lambda: f64, x: &[f64]) -> f64 {
    residual(&pencil.k, &pencil.m, lambda, x)
}

/// Solves the pencil given by a general sparse `K` and diagonal `M`.
pub fn solve(k: &CsrMatrix, m: &[f64], nev: usize, opts: &SolverOptions) -> Result<Spectrum> {
    let n = m.len();
    if k.nrows() != n || k.ncols() != n {
        return Err(Error::InvalidRequest(format!(
            "K is {}×{} but M has {n} entries",
            k.nrows(),
            k.ncols()
        )));
    }
    if nev == 0 || nev > n {
        return Err(Error::InvalidRequest(format!(
            "requested {nev} eigenpairs of a pencil of dimension {n}"
        )));
    }
    if !(opts.tol > 0.0 && opts.tol <= 1e-4) {
        return Err(Error::InvalidRequest(format!(
            "tolerance must lie in (0, 1e-4], got {}",
            opts.tol
        )));
    }
    if let Some(i) = m.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidRequest(format!(
            "mass matrix not positive definite: M[{i}] = {}",
            m[i]
        )));
    }

    if n <= DENSE_LIMIT || nev + 5 > n {
        let dense = dense_solve(k, m, nev)?;
        if dense.residuals.iter().all(|&r| r <= opts.tol) {
            return Ok(Spectrum {
                seed: opts.seed,
                ..dense
            });
        }
        if nev + 5 > n {
            return Err(Error::NotConverged {
                iterations: 0,
                best_residuals: dense.residuals,
            });
        }
        // polish the dense vectors by shift-invert sweeps
        return subspace_iteration(k, m, nev, opts, Some(dense.vectors));
    }
    subspace_iteration(k, m, nev, opts, None)
}

fn dense_solve(k: &CsrMatrix, m: &[f64], nev: usize) -> Result<Spectrum> {
    let n = m.len();
    let s: Vec<f64> = m.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut c = DMatrix::<f64>::zeros(n, n);
    for (r, col, v) in k.iter() {
        c[(r, col)] = v * s[r] * s[col];
    }
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut values = Vec::with_capacity(nev);
    let mut vectors = Vec::with_capacity(nev);
    for &j in order.iter().take(nev) {
        let lambda = eig.eigenvalues[j];
        if !(lambda > 0.0) {
            return Err(Error::NotPositiveDefinite { row: j, pivot: lambda });
        }
        values.push(lambda);
        vectors.push((0..n).map(|i| eig.eigenvectors[(i, j)] * s[i]).collect::<Vec<f64>>());
    }
    let residuals = values
        .iter()
        .zip(&vectors)
        .map(|(&l, x)| residual(k, m, l, x))
        .collect();
    Ok(Spectrum {
        values,
        vectors,
        residuals,
        iterations: 0,
        seed: 0,
        method: Method::Dense,
    })
}

fn m_dot(m: &[f64], x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).zip(m).map(|((a, b), w)| a * b * w).sum()
}

/// Modified Gram–Schmidt in the M-inner product, applied twice. Columns that collapse
/// are replaced by fresh random directions.
fn m_orthonormalize(m: &[f64], cols: &mut [Vec<f64>], rng: &mut ChaCha8Rng) {
    for j in 0..cols.len() {
        let mut attempts = 0;
        loop {
            let before = m_dot(m, &cols[j], &cols[j]).sqrt();
            for _ in 0..2 {
                for i in 0..j {
                    let (head, tail) = cols.split_at_mut(j);
                    let proj = m_dot(m, &head[i], &tail[0]);
                    for (t, h) in tail[0].iter_mut().zip(&head[i]) {
                        *t -= proj * h;
                    }
                }
            }
            let after = m_dot(m, &cols[j], &cols[j]).sqrt();
            if after > 1e-10 * before && after > 0.0 {
                cols[j].iter_mut().for_each(|v| *v /= after);
                break;
            }
            attempts += 1;
            assert!(attempts < 10, "unable to extend M-orthonormal basis");
            cols[j].iter_mut().for_each(|v| *v = rng.random_range(-1.0..1.0));
        }
    }
}

fn subspace_iteration(
    k: &CsrMatrix,
    m: &[f64],
    nev: usize,
    opts: &SolverOptions,
    start: Option<Vec<Vec<f64>>>,
) -> Result<Spectrum> {
    let n = m.len();
    let block = (2 * nev).max(nev + 8).min(n);
    let budget = opts.max_iterations.unwrap_or(500 * nev);
    let exec = opts.exec;
    let chol = BandCholesky::factor(k)?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut x: Vec<Vec<f64>> = start.unwrap_or_default();
    x.truncate(block);
    while x.len() < block {
        x.push((0..n).map(|_| rng.random_range(-1.0..1.0)).collect());
    }
    m_orthonormalize(m, &mut x, &mut rng);

    let mut best: Option<Spectrum> = None;
    let mut best_worst = f64::INFINITY;
    let mut last_gain = 0;
    for it in 1..=budget {
        let mut y: Vec<Vec<f64>> = exec.map(block, |j| {
            let mut v: Vec<f64> = x[j].iter().zip(m).map(|(a, w)| a * w).collect();
            chol.solve_in_place(&mut v);
            v
        });
        m_orthonormalize(m, &mut y, &mut rng);
        let ky: Vec<Vec<f64>> = exec.map(block, |j| k.matvec(&y[j]));

        let mut h = DMatrix::<f64>::zeros(block, block);
        for i in 0..block {
            for j in 0..=i {
                let v: f64 = y[i].iter().zip(&ky[j]).map(|(a, b)| a * b).sum();
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let combine = |src: &[Vec<f64>], col: usize| -> Vec<f64> {
            let mut out = vec![0.0; n];
            for (i, s) in src.iter().enumerate() {
                let z = eig.eigenvectors[(i, col)];
                out.iter_mut().zip(s).for_each(|(o, v)| *o += z * v);
            }
            out
        };
        let new_x: Vec<Vec<f64>> = exec.map(block, |j| combine(&y, order[j]));
        let new_kx: Vec<Vec<f64>> = exec.map(nev, |j| combine(&ky, order[j]));
        let theta: Vec<f64> = order.iter().map(|&j| eig.eigenvalues[j]).collect();
        if let Some(i) = theta.iter().take(nev).position(|&t| !(t > 0.0)) {
            return Err(Error::NotPositiveDefinite { row: i, pivot: theta[i] });
        }
        let residuals: Vec<f64> = (0..nev)
            .map(|i| {
                let (mut num, mut den) = (0.0, 0.0);
                for r in 0..n {
                    let mx = m[r] * new_x[i][r];
                    num += (new_kx[i][r] - theta[i] * mx).powi(2);
                    den += mx * mx;
                }
                num.sqrt() / (theta[i] * den.sqrt())
            })
            .collect();
        x = new_x;

        let worst = residuals.iter().copied().fold(0.0, f64::max);
        if worst < 0.9 * best_worst {
            best_worst = worst;
            last_gain = it;
            best = Some(Spectrum {
                values: theta[..nev].to_vec(),
                vectors: x[..nev].to_vec(),
                residuals: residuals.clone(),
                iterations: it,
                seed: opts.seed,
                method: Method::SubspaceIteration,
            });
        }
        if worst <= opts.tol {
            return Ok(Spectrum {
                values: theta[..nev].to_vec(),
                vectors: x[..nev].to_vec(),
                residuals,
                iterations: it,
                seed: opts.seed,
                method: Method::SubspaceIteration,
            });
        }
        // residuals at the floating-point floor stop improving
        if it - last_gain > 40 {
            break;
        }
    }
    Err(Error::NotConverged {
        iterations: best.as_ref().map_or(0, |b| b.iterations),
        best_residuals: best.map(|b| b.residuals).unwrap_or_default(),
    })
}
