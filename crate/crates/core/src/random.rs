//! Seeded random operators, vectors and spectra for tests and sampling.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::tensor::{BipartiteOperator, BipartiteVector, Dims, PureStateVector, SchmidtSpectrum};

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Hermitian matrix with Gaussian entries (not trace-normalized).
pub fn random_hermitian(dims: Dims, rng: &mut impl Rng) -> BipartiteOperator {
    let g = gaussian_matrix(dims.total(), dims.total(), rng);
    let h = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    BipartiteOperator::new(dims, h).expect("square by construction")
}

/// Random Hermitian matrix with trace one.
pub fn random_trace_one_hermitian(dims: Dims, rng: &mut impl Rng) -> BipartiteOperator {
    let h = random_hermitian(dims, rng);
    let shift = (1.0 - h.trace()) / dims.total() as f64;
    &h + &(&BipartiteOperator::identity(dims) * shift)
}

/// Haar-distributed unit vector.
pub fn random_unit_vector(dims: Dims, rng: &mut impl Rng) -> PureStateVector {
    let v = DVector::from_fn(dims.total(), |_, _| gaussian(rng));
    BipartiteVector::new(dims, v).and_then(|v| v.normalize()).expect("nonzero Gaussian vector").1
}

/// Full-rank mixed state `G G^† / Tr(G G^†)`.
pub fn random_state(dims: Dims, rng: &mut impl Rng) -> BipartiteOperator {
    let g = gaussian_matrix(dims.total(), dims.total(), rng);
    let gg = &g * g.adjoint();
    let trace = gg.trace().re;
    BipartiteOperator::new(dims, gg / Complex64::new(trace, 0.0)).expect("square by construction")
}

/// Random descending Schmidt spectrum of length `n` with all coefficients positive.
pub fn random_spectrum(n: usize, rng: &mut impl Rng) -> SchmidtSpectrum {
    let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let squared: Vec<f64> = weights.iter().map(|w| w / total).collect();
    SchmidtSpectrum::from_squared(&squared, 1e-9).expect("normalized by construction")
}

/// Projection states `(P_E / d, P_{E⊥} / (mn − d))` for a random `d`-dimensional subspace `E`.
pub fn random_subspace_projections(
    dims: Dims,
    d: usize,
    rng: &mut impl Rng,
) -> (BipartiteOperator, BipartiteOperator) {
    let total = dims.total();
    assert!(d >= 1 && d < total, "subspace dimension out of range");
    let q = gaussian_matrix(total, d, rng).qr().q();
    let p = &q * q.adjoint();
    let complement = DMatrix::identity(total, total) - &p;
    (
        BipartiteOperator::new(dims, p / Complex64::new(d as f64, 0.0)).expect("square"),
        BipartiteOperator::new(dims, complement / Complex64::new((total - d) as f64, 0.0)).expect("square"),
    )
}
