//! Closed-form and root-finding spectra used as ground truth.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSpectrum {
    pub problem: String,
    /// Ascending, positive, repeated by multiplicity.
    pub values: Vec<f64>,
    pub provenance: String,
}

/// Dirichlet Laplacian on a box: `π² Σ (p_j/ℓ_j)²`, `p_j ≥ 1`.
pub fn dirichlet_box_spectrum(lengths: &[f64], count: usize) -> OracleSpectrum {
    assert!(count >= 1 && !lengths.is_empty());
    // enough modes per axis to contain the first `count` values
    let per_axis = count + 1;
    let mut values: Vec<f64> = Vec::new();
    let mut idx = vec![1usize; lengths.len()];
    loop {
        let v: f64 = idx
            .iter()
            .zip(lengths)
            .map(|(&p, &l)| (p as f64 / l).powi(2))
            .sum();
        values.push(PI * PI * v);
        let mut a = 0;
        loop {
            if a == idx.len() {
                values.sort_by(f64::total_cmp);
                values.truncate(count);
                return OracleSpectrum {
                    problem: format!("dirichlet_box {lengths:?}"),
                    values,
                    provenance: "separation of variables".into(),
                };
            }
            idx[a] += 1;
            if idx[a] <= per_axis {
                break;
            }
            idx[a] = 1;
            a += 1;
        }
    }
}

/// `cos k · cosh k − 1`, scaled by `sech k` so it stays finite for large `k`.
fn beam_frequency_fn(k: f64) -> f64 {
    // cos k − sech k, with sech k = 2e^{−k}/(1 + e^{−2k})
    let e = (-k).exp();
    k.cos() - 2.0 * e / (1.0 + e * e)
}

/// Roots of `cos k · cosh k = 1` on `(0, ∞)` by bisection; root `i` lies in `(iπ, (i+1)π)`.
pub fn beam_roots(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| {
            let (mut a, mut b) = (i as f64 * PI, (i + 1) as f64 * PI);
            let fa = beam_frequency_fn(a);
            // run to floating-point adjacency
            for _ in 0..128 {
                let mid = 0.5 * (a + b);
                if (beam_frequency_fn(mid) > 0.0) == (fa > 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Clamped beam on `(0, L)`: `Γ_i = k_i⁴ / L⁴`.
pub fn clamped_beam_spectrum(length: f64, count: usize) -> Result<OracleSpectrum> {
    if !(length > 0.0) {
        return Err(Error::InvalidInput(format!("beam length must be positive, got {length}")));
    }
    Ok(OracleSpectrum {
        problem: format!("clamped_beam L={length}"),
        values: beam_roots(count).iter().map(|k| (k / length).powi(4)).collect(),
        provenance: "bisection on cos k cosh k = 1".into(),
    })
}

/// Exact eigenvalues of the assembled 1-D Dirichlet pencil with constant `t`, `η = 0`:
/// `t (4/h²) sin²(pπh/(2L))`, `p = 1..N−1`.
pub fn fd1d_dirichlet_spectrum(resolution: usize, t: f64, length: f64) -> OracleSpectrum {
    let h = length / resolution as f64;
    OracleSpectrum {
        problem: format!("fd1d_dirichlet N={resolution} t={t} L={length}"),
        values: (1..resolution)
            .map(|p| t * 4.0 / (h * h) * (p as f64 * PI * h / (2.0 * length)).sin().powi(2))
            .collect(),
        provenance: "closed-form tridiagonal eigenvalues".into(),
    }
}

/// As [`fd1d_dirichlet_spectrum`] for a tensor given per node; rejects non-constant `t`.
pub fn fd1d_dirichlet_spectrum_checked(resolution: usize, t_values: &[f64], length: f64) -> Result<OracleSpectrum> {
    let t = t_values.first().copied().unwrap_or(0.0);
    if t_values.iter().any(|&v| v != t) {
        return Err(Error::InvalidInput("closed-form stencil spectrum needs constant t".into()));
    }
    Ok(fd1d_dirichlet_spectrum(resolution, t, length))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_values() {
        let s = dirichlet_box_spectrum(&[1.0, 1.0], 4);
        let p2 = PI * PI;
        for (v, e) in s.values.iter().zip([2.0, 5.0, 5.0, 8.0]) {
            assert!((v - e * p2).abs() < 1e-12);
        }
        let s = dirichlet_box_spectrum(&[1.0], 3);
        for (v, e) in s.values.iter().zip([1.0, 4.0, 9.0]) {
            assert!((v - e * p2).abs() < 1e-12);
        }
        let s = dirichlet_box_spectrum(&[1.0, 2.0], 1);
        assert!((s.values[0] - 1.25 * p2).abs() < 1e-12);
    }

    #[test]
    fn beam_roots_match_reference() {
        let r = beam_roots(4);
        let reference = [4.730040744862704, 7.853204624095838, 10.995607838001671, 14.137165491257464];
        for (a, b) in r.iter().zip(reference) {
            assert!((a - b).abs() < 1e-11, "{a} vs {b}");
            assert!((a.cos() * a.cosh() - 1.0).abs() <= 1e-9 * a.cosh().max(1.0));
        }
        // root-finder residual on the unscaled function for the first roots
        for k in &r[..2] {
            assert!((k.cos() * k.cosh() - 1.0).abs() <= 1e-9);
        }
        let s = clamped_beam_spectrum(1.0, 2).unwrap();
        assert!((s.values[0] - 500.56390174043247).abs() < 1e-8);
        assert!((s.values[1] - 3803.537080497867).abs() < 1e-7);
        let s = clamped_beam_spectrum(PI / 2.0, 1).unwrap();
        assert!((s.values[0] - 82.22048212164535).abs() < 1e-9);
        // large roots stay finite
        assert!(beam_roots(400).iter().all(|k| k.is_finite()));
        assert!(clamped_beam_spectrum(0.0, 1).is_err());
    }

    #[test]
    fn stencil_spectrum() {
        let s = fd1d_dirichlet_spectrum(4, 1.0, 1.0);
        let expect = [9.37258300203048, 32.0, 54.62741699796952];
        for (v, e) in s.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        let d = fd1d_dirichlet_spectrum(4, 2.0, 1.0);
        for (a, b) in d.values.iter().zip(&s.values) {
            assert_eq!(*a, 2.0 * b);
        }
        let fine = fd1d_dirichlet_spectrum(4096, 1.0, 1.0);
        assert!((fine.values[0] - PI * PI).abs() < 1e-5);
        assert!(fd1d_dirichlet_spectrum_checked(4, &[1.0, 1.0, 2.0], 1.0).is_err());
    }
}
