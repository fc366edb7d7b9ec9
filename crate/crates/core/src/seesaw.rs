//! Local search for `min ⟨v|X|v⟩` over unit vectors of Schmidt rank at most `k`.
//!
//! A rank-`k` vector is written `v = Σ_a x_a ⊗ r_a` with an orthonormal right
//! frame `(r_a)`. For a fixed frame the map `x ↦ v` is an isometry, so the
//! best `x` is the lowest eigenvector of the compressed `mk × mk` operator.
//! The new vector's Schmidt decomposition then supplies an orthonormal left
//! frame and the same step is repeated on the other factor. Each half-step is
//! an exact minimization, so the value never increases.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::random::gaussian_matrix;
use crate::tensor::{thin_svd, BipartiteOperator, BipartiteVector, Dims, PureStateVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeeSawConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// A restart stops once the value has improved by less than this over
    /// `stall_iters` consecutive iterations.
    pub step_tol: f64,
    pub stall_iters: usize,
    pub seed: u64,
    /// Report non-exhaustive blockpositivity as `Unknown` instead of `In`.
    pub strict: bool,
}

impl Default for SeeSawConfig {
    fn default() -> Self {
        Self { restarts: 64, max_iters: 500, step_tol: 1e-12, stall_iters: 10, seed: 0, strict: false }
    }
}

impl SeeSawConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::OutOfRange("see-saw needs at least one restart and one iteration".into()));
        }
        Ok(())
    }
}

/// Best vector found and its expectation value.
#[derive(Debug, Clone)]
pub struct SchmidtKMinimum {
    pub value: f64,
    pub vector: PureStateVector,
    pub restart: usize,
}

pub fn check_rank(dims: Dims, k: usize) -> Result<()> {
    if k == 0 || k > dims.min_factor() {
        return Err(Error::OutOfRange(format!("Schmidt rank k = {k} must lie in 1..={}", dims.min_factor())));
    }
    Ok(())
}

/// Smallest eigenpair of a Hermitian matrix.
fn lowest_eigenpair(h: DMatrix<Complex64>) -> Result<(f64, DVector<Complex64>)> {
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = h.try_symmetric_eigen(1e-15, 10_000).ok_or(Error::EigenNotConverged { residual: f64::INFINITY })?;
    let (idx, value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &v)| if v < best.1 { (i, v) } else { best });
    let vec = eig.eigenvectors.column(idx).into_owned();
    let norm = vec.norm();
    Ok((value, vec / Complex64::new(norm, 0.0)))
}

/// Orthonormal frames spanning the top-`k` Schmidt terms of the coefficient
/// matrix `C = L·Rᵗ`: returns `(left m×k, right n×k)`.
fn frames(coeffs: &DMatrix<Complex64>, k: usize) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
    let (_, u, r) = thin_svd(coeffs);
    (u.columns(0, k).into_owned(), r.columns(0, k).into_owned())
}

/// Minimizes over the left factors with the right frame fixed; returns the
/// value and the new coefficient matrix.
fn optimize_left(x: &DMatrix<Complex64>, dims: Dims, right: &DMatrix<Complex64>) -> Result<(f64, DMatrix<Complex64>)> {
    let k = right.ncols();
    let (m, n) = (dims.m(), dims.n());
    // Isometry B: |i⟩⊗e_a ↦ |i⟩ ⊗ r_a.
    let b = DMatrix::from_fn(m * n, m * k, |row, col| {
        let (i, j) = dims.split(row);
        let (i2, a) = (col / k, col % k);
        if i == i2 {
            right[(j, a)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let (value, w) = lowest_eigenpair(b.adjoint() * x * &b)?;
    let left = DMatrix::from_fn(m, k, |i, a| w[i * k + a]);
    Ok((value, left * right.transpose()))
}

fn optimize_right(x: &DMatrix<Complex64>, dims: Dims, left: &DMatrix<Complex64>) -> Result<(f64, DMatrix<Complex64>)> {
    let k = left.ncols();
    let (m, n) = (dims.m(), dims.n());
    let b = DMatrix::from_fn(m * n, n * k, |row, col| {
        let (i, j) = dims.split(row);
        let (j2, a) = (col / k, col % k);
        if j == j2 {
            left[(i, a)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let (value, w) = lowest_eigenpair(b.adjoint() * x * &b)?;
    let right = DMatrix::from_fn(n, k, |j, a| w[j * k + a]);
    Ok((value, left * right.transpose()))
}

fn single_restart(x: &BipartiteOperator, k: usize, cfg: &SeeSawConfig, restart: usize) -> Result<(f64, DMatrix<Complex64>)> {
    let dims = x.dims();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let mut right = gaussian_matrix(dims.n(), k, &mut rng).qr().q();
    let (mut best, mut coeffs) = optimize_left(x.matrix(), dims, &right)?;
    let mut stalled = 0;
    for _ in 0..cfg.max_iters {
        let (left, _) = frames(&coeffs, k);
        let (_, c_mid) = optimize_right(x.matrix(), dims, &left)?;
        (_, right) = frames(&c_mid, k);
        let (value, c_new) = optimize_left(x.matrix(), dims, &right)?;
        coeffs = c_new;
        if best - value < cfg.step_tol {
            stalled += 1;
            if stalled >= cfg.stall_iters {
                best = best.min(value);
                break;
            }
        } else {
            stalled = 0;
        }
        best = best.min(value);
    }
    Ok((best, coeffs))
}

/// Lowest `⟨v|X|v⟩` found over unit vectors of Schmidt rank `≤ k`.
///
/// The returned value is attained by the returned vector and so is an upper
/// bound on the true minimum. Restarts run in parallel; the reduction picks
/// the smallest value with ties going to the lowest restart index, so the
/// result does not depend on scheduling.
pub fn min_schmidt_k_expectation(x: &BipartiteOperator, k: usize, cfg: &SeeSawConfig) -> Result<SchmidtKMinimum> {
    x.require_hermitian()?;
    check_rank(x.dims(), k)?;
    cfg.validate()?;
    let runs: Vec<Result<(f64, DMatrix<Complex64>)>> =
        (0..cfg.restarts).into_par_iter().map(|r| single_restart(x, k, cfg, r)).collect();
    let mut best: Option<(usize, f64, DMatrix<Complex64>)> = None;
    for (restart, run) in runs.into_iter().enumerate() {
        let (value, coeffs) = run?;
        if best.as_ref().is_none_or(|(_, v, _)| value < *v) {
            best = Some((restart, value, coeffs));
        }
    }
    let (restart, _, coeffs) = best.expect("at least one restart");
    let (_, vector) = BipartiteVector::from_coefficient_matrix(&coeffs)?.normalize()?;
    // Report the value of the normalized vector itself so certificates re-verify exactly.
    let value = x.expectation(vector.as_vector())?;
    Ok(SchmidtKMinimum { value, vector, restart })
}

/// Largest `⟨v|X|v⟩` found over Schmidt-rank-`≤ k` unit vectors, a lower
/// bound on the S(k) norm (exact for `k = m ∧ n`).
pub fn schmidt_k_norm(x: &BipartiteOperator, k: usize, cfg: &SeeSawConfig) -> Result<f64> {
    check_rank(x.dims(), k)?;
    if k == x.dims().min_factor() {
        return Ok(crate::tensor::hermitian_eigen(x)?.max_value());
    }
    Ok(-min_schmidt_k_expectation(&(x * -1.0), k, cfg)?.value)
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::*;

    /// Product-vector grid over the Bloch angles of both qubits.
    pub(crate) fn grid_min_product(x: &BipartiteOperator, steps: usize) -> f64 {
        let qubit = |theta: f64, phi: f64| [Complex64::new((theta / 2.0).cos(), 0.0), Complex64::from_polar((theta / 2.0).sin(), phi)];
        let mut best = f64::INFINITY;
        let pi = std::f64::consts::PI;
        for a in 0..=steps {
            for b in 0..steps {
                let u = qubit(pi * a as f64 / steps as f64, 2.0 * pi * b as f64 / steps as f64);
                for c in 0..=steps {
                    for d in 0..steps {
                        let w = qubit(pi * c as f64 / steps as f64, 2.0 * pi * d as f64 / steps as f64);
                        let v = BipartiteVector::product(&u, &w).unwrap();
                        best = best.min(x.expectation(&v).unwrap());
                    }
                }
            }
        }
        best
    }

    /// Coarse grid followed by repeated local re-gridding around the best
    /// angles; independent of the see-saw.
    pub(crate) fn refined_grid_min_product(x: &BipartiteOperator) -> f64 {
        let pi = std::f64::consts::PI;
        let eval = |t: [f64; 4]| {
            let u = [Complex64::new((t[0] / 2.0).cos(), 0.0), Complex64::from_polar((t[0] / 2.0).sin(), t[1])];
            let w = [Complex64::new((t[2] / 2.0).cos(), 0.0), Complex64::from_polar((t[2] / 2.0).sin(), t[3])];
            x.expectation(&BipartiteVector::product(&u, &w).unwrap()).unwrap()
        };
        let steps = 12;
        let mut candidates = Vec::new();
        for a in 0..=steps {
            for b in 0..steps {
                for c in 0..=steps {
                    for d in 0..steps {
                        let t = [
                            pi * a as f64 / steps as f64,
                            2.0 * pi * b as f64 / steps as f64,
                            pi * c as f64 / steps as f64,
                            2.0 * pi * d as f64 / steps as f64,
                        ];
                        candidates.push((eval(t), t));
                    }
                }
            }
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut overall = f64::INFINITY;
        for &(mut best, mut centre) in candidates.iter().take(4) {
            let mut width = pi / steps as f64;
            for _ in 0..60 {
                let mut improved = centre;
                for a in -2i32..=2 {
                    for b in -2i32..=2 {
                        for c in -2i32..=2 {
                            for d in -2i32..=2 {
                                let t = [
                                    centre[0] + width * a as f64 / 2.0,
                                    centre[1] + width * b as f64 / 2.0,
                                    centre[2] + width * c as f64 / 2.0,
                                    centre[3] + width * d as f64 / 2.0,
                                ];
                                let v = eval(t);
                                if v < best {
                                    best = v;
                                    improved = t;
                                }
                            }
                        }
                    }
                }
                if improved == centre {
                    width *= 0.5;
                }
                centre = improved;
            }
            overall = overall.min(best);
        }
        overall
    }
}
