//! Dense complex linear algebra on bipartite spaces `C^m ⊗ C^n`.
//!
//! The composite index of the basis vector `|ij⟩` is `i * n + j`, so an
//! operator on the product space is laid out as an `m × m` grid of `n × n`
//! blocks. Partial transposition always acts on the first factor.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Entrywise tolerance for the Hermitian flag.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Maximal entrywise residual accepted for an eigen-reconstruction.
pub const EIGEN_RECONSTRUCTION_TOL: f64 = 1e-10;
/// Tolerance on `Σ p_i² = 1` and on vector norms.
pub const NORM_TOL: f64 = 1e-12;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITERS: usize = 10_000;

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dimensions of the two tensor factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    m: usize,
    n: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::OutOfRange(format!("factor dimensions must be positive, got ({m}, {n})")));
        }
        Ok(Self { m, n })
    }

    /// Square system `C^n ⊗ C^n`.
    pub fn square(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Side length `m·n` of operators on the product space.
    pub fn total(&self) -> usize {
        self.m * self.n
    }

    /// `m ∧ n`, the largest possible Schmidt rank.
    pub fn min_factor(&self) -> usize {
        self.m.min(self.n)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.m && j < self.n);
        i * self.n + j
    }

    #[inline]
    pub fn split(&self, a: usize) -> (usize, usize) {
        (a / self.n, a % self.n)
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.m, self.n)
    }
}

fn mismatch(expected: impl fmt::Display, actual: impl fmt::Display) -> Error {
    Error::DimensionMismatch { expected: expected.to_string(), actual: actual.to_string() }
}

/// Square matrix on `C^m ⊗ C^n` with its bipartition recorded.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteOperator {
    dims: Dims,
    entries: DMatrix<Complex64>,
    hermitian: bool,
}

fn hermitian_deviation(a: &DMatrix<Complex64>) -> f64 {
    let mut dev = 0.0f64;
    for r in 0..a.nrows() {
        for s in r..a.ncols() {
            dev = dev.max((a[(r, s)] - a[(s, r)].conj()).norm());
        }
    }
    dev
}

fn max_abs(a: &DMatrix<Complex64>) -> f64 {
    a.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

impl BipartiteOperator {
    pub fn new(dims: Dims, entries: DMatrix<Complex64>) -> Result<Self> {
        let side = dims.total();
        if entries.nrows() != side || entries.ncols() != side {
            return Err(mismatch(
                format!("{side}x{side} for dims {dims}"),
                format!("{}x{}", entries.nrows(), entries.ncols()),
            ));
        }
        let hermitian = hermitian_deviation(&entries) <= HERMITIAN_TOL * max_abs(&entries).max(1.0);
        Ok(Self { dims, entries, hermitian })
    }

    pub fn from_fn(dims: Dims, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let side = dims.total();
        Self::new(dims, DMatrix::from_fn(side, side, f)).expect("shape fixed by dims")
    }

    pub fn zeros(dims: Dims) -> Self {
        Self::from_fn(dims, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn identity(dims: Dims) -> Self {
        Self::new(dims, DMatrix::identity(dims.total(), dims.total())).expect("square identity")
    }

    /// The maximally mixed state `I / mn`.
    pub fn maximally_mixed(dims: Dims) -> Self {
        Self::identity(dims) * (1.0 / dims.total() as f64)
    }

    /// Real diagonal operator.
    pub fn diagonal(dims: Dims, diag: &[f64]) -> Result<Self> {
        if diag.len() != dims.total() {
            return Err(mismatch(dims.total(), diag.len()));
        }
        Ok(Self::from_fn(dims, |r, s| if r == s { c(diag[r], 0.0) } else { c(0.0, 0.0) }))
    }

    /// Rank-one operator `|v⟩⟨v|`.
    pub fn projector(v: &BipartiteVector) -> Self {
        let a = v.amplitudes();
        Self::new(v.dims(), a * a.adjoint()).expect("outer product has the vector's dims")
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian { deviation: hermitian_deviation(&self.entries) })
        }
    }

    /// Entry `⟨ij|X|kl⟩`.
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.entries[(self.dims.index(i, j), self.dims.index(k, l))]
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Errors unless the trace is one within `tol`.
    pub fn require_unit_trace(&self, tol: f64) -> Result<()> {
        let trace = self.trace();
        if (trace - 1.0).abs() > tol || self.entries.trace().im.abs() > tol {
            return Err(Error::TraceNotOne { trace });
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(&self.entries - &other.entries))
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_off_diagonal(&self) -> f64 {
        let side = self.dims.total();
        let mut worst = 0.0f64;
        for r in 0..side {
            for s in 0..side {
                if r != s {
                    worst = worst.max(self.entries[(r, s)].norm());
                }
            }
        }
        worst
    }

    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.dims.total()).map(|r| self.entries[(r, r)].re).collect()
    }

    /// `⟨v|X|v⟩`, real part.
    pub fn expectation(&self, v: &BipartiteVector) -> Result<f64> {
        if v.dims() != self.dims {
            return Err(mismatch(self.dims, v.dims()));
        }
        let a = v.amplitudes();
        Ok(a.dotc(&(&self.entries * a)).re)
    }

    fn require_same_dims(&self, other: &Self) {
        assert_eq!(self.dims, other.dims, "operator dims differ");
    }
}

impl Add for &BipartiteOperator {
    type Output = BipartiteOperator;

    /// Panics if the dims differ.
    fn add(self, rhs: Self) -> BipartiteOperator {
        self.require_same_dims(rhs);
        BipartiteOperator::new(self.dims, &self.entries + &rhs.entries).expect("same dims")
    }
}

impl Sub for &BipartiteOperator {
    type Output = BipartiteOperator;

    /// Panics if the dims differ.
    fn sub(self, rhs: Self) -> BipartiteOperator {
        self.require_same_dims(rhs);
        BipartiteOperator::new(self.dims, &self.entries - &rhs.entries).expect("same dims")
    }
}

impl Mul<f64> for &BipartiteOperator {
    type Output = BipartiteOperator;

    fn mul(self, rhs: f64) -> BipartiteOperator {
        BipartiteOperator::new(self.dims, &self.entries * c(rhs, 0.0)).expect("same dims")
    }
}

impl Mul<f64> for BipartiteOperator {
    type Output = BipartiteOperator;

    fn mul(self, rhs: f64) -> BipartiteOperator {
        &self * rhs
    }
}

/// Unnormalized vector in `C^m ⊗ C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteVector {
    dims: Dims,
    amplitudes: DVector<Complex64>,
}

impl BipartiteVector {
    pub fn new(dims: Dims, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != dims.total() {
            return Err(mismatch(dims.total(), amplitudes.len()));
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn from_slice(dims: Dims, amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(dims, DVector::from_column_slice(amplitudes))
    }

    /// `|a⟩ ⊗ |b⟩`.
    pub fn product(a: &[Complex64], b: &[Complex64]) -> Result<Self> {
        let dims = Dims::new(a.len(), b.len())?;
        Ok(Self {
            dims,
            amplitudes: DVector::from_fn(dims.total(), |r, _| {
                let (i, j) = dims.split(r);
                a[i] * b[j]
            }),
        })
    }

    /// Computational basis vector `|ij⟩`.
    pub fn basis(dims: Dims, i: usize, j: usize) -> Self {
        let mut amplitudes = DVector::zeros(dims.total());
        amplitudes[dims.index(i, j)] = c(1.0, 0.0);
        Self { dims, amplitudes }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    /// Splits off the norm: returns `(‖v‖², v/‖v‖)`.
    pub fn normalize(&self) -> Result<(f64, PureStateVector)> {
        let norm_sq = self.norm_squared();
        if norm_sq == 0.0 {
            return Err(Error::OutOfRange("cannot normalize the zero vector".into()));
        }
        let unit = Self { dims: self.dims, amplitudes: &self.amplitudes / c(norm_sq.sqrt(), 0.0) };
        Ok((norm_sq, PureStateVector(unit)))
    }

    /// `m × n` coefficient matrix `C_{ij} = ⟨ij|v⟩`.
    pub fn coefficient_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dims.m, self.dims.n, |i, j| self.amplitudes[self.dims.index(i, j)])
    }

    pub fn from_coefficient_matrix(coeffs: &DMatrix<Complex64>) -> Result<Self> {
        let dims = Dims::new(coeffs.nrows(), coeffs.ncols())?;
        Ok(Self {
            dims,
            amplitudes: DVector::from_fn(dims.total(), |r, _| {
                let (i, j) = dims.split(r);
                coeffs[(i, j)]
            }),
        })
    }
}

/// Unit vector in `C^m ⊗ C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateVector(BipartiteVector);

impl PureStateVector {
    pub fn new(v: BipartiteVector) -> Result<Self> {
        let norm = v.norm_squared().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::OutOfRange(format!("state vector must have unit norm, got {norm}")));
        }
        Ok(Self(v))
    }

    pub fn basis(dims: Dims, i: usize, j: usize) -> Self {
        Self(BipartiteVector::basis(dims, i, j))
    }

    pub fn dims(&self) -> Dims {
        self.0.dims
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.0.amplitudes
    }

    pub fn as_vector(&self) -> &BipartiteVector {
        &self.0
    }

    pub fn projector(&self) -> BipartiteOperator {
        BipartiteOperator::projector(&self.0)
    }
}

/// Schmidt coefficients `p_0 ≥ … ≥ p_{n-1} ≥ 0` with `Σ p_i² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtSpectrum {
    p: Vec<f64>,
}

impl SchmidtSpectrum {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidSpectrum("empty coefficient list".into()));
        }
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidSpectrum(format!("coefficients must be finite and nonnegative: {p:?}")));
        }
        if p.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpectrum(format!("coefficients must be descending: {p:?}")));
        }
        let sum_sq: f64 = p.iter().map(|x| x * x).sum();
        if (sum_sq - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidSpectrum(format!("squared coefficients sum to {sum_sq}, expected 1")));
        }
        Ok(Self { p })
    }

    /// Builds a spectrum from squared coefficients `p_i²` in any order,
    /// accepting a sum within `tol` of one and renormalizing exactly.
    pub fn from_squared(squared: &[f64], tol: f64) -> Result<Self> {
        if squared.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidSpectrum(format!("squared coefficients must be nonnegative: {squared:?}")));
        }
        let sum: f64 = squared.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(Error::InvalidSpectrum(format!("squared coefficients sum to {sum}, expected 1")));
        }
        let mut p: Vec<f64> = squared.iter().map(|x| (x / sum).sqrt()).collect();
        p.sort_by(|a, b| b.total_cmp(a));
        Self::renormalized(p)
    }

    /// Same as [`Self::from_squared`] for raw amplitudes `p_i`.
    pub fn from_amplitudes(amplitudes: &[f64], tol: f64) -> Result<Self> {
        let squared: Vec<f64> = amplitudes.iter().map(|x| x * x).collect();
        if amplitudes.iter().any(|x| *x < 0.0) {
            return Err(Error::InvalidSpectrum(format!("amplitudes must be nonnegative: {amplitudes:?}")));
        }
        Self::from_squared(&squared, tol)
    }

    fn renormalized(mut p: Vec<f64>) -> Result<Self> {
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut p {
            *x /= norm;
        }
        Self::new(p)
    }

    /// Maximally entangled spectrum `p_i = 1/√n`.
    pub fn isotropic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpectrum("n must be positive".into()));
        }
        Self::new(vec![1.0 / (n as f64).sqrt(); n])
    }

    /// Product spectrum `(1, 0, …, 0)`.
    pub fn product(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSpectrum("n must be positive".into()));
        }
        let mut p = vec![0.0; n];
        p[0] = 1.0;
        Self::new(p)
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, i: usize) -> f64 {
        self.p[i]
    }

    /// `p_1`, zero when `n = 1`.
    pub fn second(&self) -> f64 {
        self.p.get(1).copied().unwrap_or(0.0)
    }

    pub fn squared(&self) -> Vec<f64> {
        self.p.iter().map(|x| x * x).collect()
    }

    pub fn dims(&self) -> Dims {
        Dims::square(self.p.len()).expect("nonempty spectrum")
    }

    /// `|ξ⟩ = Σ p_i |ii⟩`.
    pub fn pure_state(&self) -> PureStateVector {
        let dims = self.dims();
        let mut amplitudes = DVector::zeros(dims.total());
        for (i, &p) in self.p.iter().enumerate() {
            amplitudes[dims.index(i, i)] = c(p, 0.0);
        }
        PureStateVector(BipartiteVector { dims, amplitudes })
    }

    /// `ϱ = |ξ⟩⟨ξ|`.
    pub fn density(&self) -> BipartiteOperator {
        self.pure_state().projector()
    }
}

/// `Tr(A·B)` for Hermitian `A`, `B`.
pub fn hs_inner(a: &BipartiteOperator, b: &BipartiteOperator) -> Result<f64> {
    if a.dims != b.dims {
        return Err(mismatch(a.dims, b.dims));
    }
    a.require_hermitian()?;
    b.require_hermitian()?;
    Ok(a.entries.iter().zip(b.entries.iter()).map(|(x, y)| (x * y.conj()).re).sum())
}

/// Transpose on the first tensor factor: `⟨ij|X^Γ|kl⟩ = ⟨kj|X|il⟩`.
pub fn partial_transpose(x: &BipartiteOperator) -> BipartiteOperator {
    let dims = x.dims;
    BipartiteOperator::from_fn(dims, |r, s| {
        let (i, j) = dims.split(r);
        let (k, l) = dims.split(s);
        x.entries[(dims.index(k, j), dims.index(i, l))]
    })
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
    pub residual: f64,
}

impl EigenDecomposition {
    pub fn min_value(&self) -> f64 {
        *self.values.last().expect("nonempty spectrum")
    }

    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    pub fn vector(&self, idx: usize, dims: Dims) -> PureStateVector {
        let v = self.vectors.column(idx).into_owned();
        let norm = v.norm();
        PureStateVector(BipartiteVector { dims, amplitudes: v / c(norm, 0.0) })
    }
}

pub fn hermitian_eigen(x: &BipartiteOperator) -> Result<EigenDecomposition> {
    x.require_hermitian()?;
    // Symmetrize so tiny anti-Hermitian noise does not leak into the solver.
    let sym = (&x.entries + x.entries.adjoint()) * c(0.5, 0.0);
    let eig = sym
        .clone()
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITERS)
        .ok_or(Error::EigenNotConverged { residual: f64::INFINITY })?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(sym.nrows(), order.len(), |r, col| eig.eigenvectors[(r, order[col])]);
    let diag = DMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| c(v, 0.0))));
    let rebuilt = &vectors * diag * vectors.adjoint();
    let residual = max_abs(&(rebuilt - &x.entries));
    if residual > EIGEN_RECONSTRUCTION_TOL * max_abs(&x.entries).max(1.0) {
        return Err(Error::EigenNotConverged { residual });
    }
    Ok(EigenDecomposition { values, vectors, residual })
}

/// `v = Σ_a c_a · left_a ⊗ right_a`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left: Vec<DVector<Complex64>>,
    pub right: Vec<DVector<Complex64>>,
}

impl SchmidtDecomposition {
    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&c| c > tol).count()
    }

    pub fn reconstruct(&self, dims: Dims) -> BipartiteVector {
        let mut amplitudes = DVector::zeros(dims.total());
        for ((coef, l), r) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for i in 0..dims.m() {
                for j in 0..dims.n() {
                    amplitudes[dims.index(i, j)] += l[i] * r[j] * c(*coef, 0.0);
                }
            }
        }
        BipartiteVector { dims, amplitudes }
    }
}

/// Thin SVD `c = U · diag(σ) · Rᵀ` with `σ` descending, `U` (`m × r`) and `R`
/// (`n × r`) having orthonormal columns, `r = m ∧ n`.
///
/// Built on the Hermitian eigensolver: with `u_a` the eigenvectors of `c c†`
/// (on the smaller side), `c = Σ_a u_a w_aᵀ` with `w_a = cᵀ ū_a`, and the `w_a`
/// are mutually orthogonal. Taking `σ_a = ‖w_a‖` directly keeps tiny
/// coefficients at rounding level instead of the square root of it. nalgebra's
/// own SVD is avoided: it mis-converges on some exactly rank-deficient inputs
/// (e.g. the constant 5 × 5 matrix).
pub fn thin_svd(c: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>, DMatrix<Complex64>) {
    if c.nrows() > c.ncols() {
        let (sigma, left, right) = thin_svd(&c.transpose());
        return (sigma, right, left);
    }
    let gram = c * c.adjoint();
    let eig = gram.try_symmetric_eigen(f64::EPSILON, 0).expect("unbounded iterations always return");
    let u = eig.eigenvectors;
    let w = c.transpose() * u.map(|z| z.conj());
    let norms: Vec<f64> = (0..w.ncols()).map(|a| w.column(a).norm()).collect();
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
    let u = DMatrix::from_fn(u.nrows(), order.len(), |i, a| u[(i, order[a])]);
    let w = DMatrix::from_fn(w.nrows(), order.len(), |j, a| w[(j, order[a])]);
    // Orthonormalize in descending order so the dominant directions are kept
    // as computed and the negligible ones are completed to a basis.
    let qr = w.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut sigma = Vec::with_capacity(order.len());
    let mut right = q;
    for a in 0..order.len() {
        let diag = r[(a, a)];
        sigma.push(diag.norm());
        if diag.norm() > 0.0 {
            let phase = diag / diag.norm();
            for j in 0..right.nrows() {
                right[(j, a)] *= phase;
            }
        }
    }
    (sigma, u, right)
}

/// Schmidt decomposition of an arbitrary (not necessarily normalized) vector.
pub fn schmidt_decompose_vector(v: &BipartiteVector) -> SchmidtDecomposition {
    let (sigma, left, right) = thin_svd(&v.coefficient_matrix());
    SchmidtDecomposition {
        left: (0..sigma.len()).map(|a| left.column(a).into_owned()).collect(),
        right: (0..sigma.len()).map(|a| right.column(a).into_owned()).collect(),
        coefficients: sigma,
    }
}

pub fn schmidt_decompose(v: &PureStateVector) -> SchmidtDecomposition {
    schmidt_decompose_vector(&v.0)
}

/// Choi matrix `Σ_{i,j} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` of `Φ(a) = s^* a s`, or of
/// `Φ(a) = s^* aᵗ s` when `transpose_input` is set. `s` is `m × n`.
pub fn choi_of_conjugation(s: &DMatrix<Complex64>, transpose_input: bool, dims: Dims) -> Result<BipartiteOperator> {
    if s.nrows() != dims.m() || s.ncols() != dims.n() {
        return Err(mismatch(format!("{}x{}", dims.m(), dims.n()), format!("{}x{}", s.nrows(), s.ncols())));
    }
    let s_adj = s.adjoint();
    let mut out = DMatrix::zeros(dims.total(), dims.total());
    for i in 0..dims.m() {
        for j in 0..dims.m() {
            // s^* |a⟩⟨b| s = (s^*|a⟩)(s^*|b⟩)^*
            let (a, b) = if transpose_input { (j, i) } else { (i, j) };
            let col_a = s_adj.column(a);
            let col_b = s_adj.column(b);
            for k in 0..dims.n() {
                for l in 0..dims.n() {
                    out[(dims.index(i, k), dims.index(j, l))] = col_a[k] * col_b[l].conj();
                }
            }
        }
    }
    BipartiteOperator::new(dims, out)
}

// ---------------------------------------------------------------------------
// JSON exchange formats.

/// `[[re, im], …]`.
pub type ComplexList = Vec<[f64; 2]>;

pub fn to_complex_list<'a>(values: impl IntoIterator<Item = &'a Complex64>) -> ComplexList {
    values.into_iter().map(|z| [z.re, z.im]).collect()
}

pub fn from_complex_list(values: &[[f64; 2]]) -> Vec<Complex64> {
    values.iter().map(|[re, im]| c(*re, *im)).collect()
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    m: usize,
    n: usize,
    entries: ComplexList,
}

impl Serialize for BipartiteOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let side = self.dims.total();
        let mut entries = Vec::with_capacity(side * side);
        for r in 0..side {
            for s in 0..side {
                let z = self.entries[(r, s)];
                entries.push([z.re, z.im]);
            }
        }
        MatrixWire { m: self.dims.m, n: self.dims.n, entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BipartiteOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = MatrixWire::deserialize(deserializer)?;
        let dims = Dims::new(wire.m, wire.n).map_err(D::Error::custom)?;
        let side = dims.total();
        if wire.entries.len() != side * side {
            return Err(D::Error::custom(format!(
                "expected {} entries for dims {dims}, got {}",
                side * side,
                wire.entries.len()
            )));
        }
        let values = from_complex_list(&wire.entries);
        BipartiteOperator::new(dims, DMatrix::from_row_slice(side, side, &values)).map_err(D::Error::custom)
    }
}

impl Serialize for PureStateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        to_complex_list(self.amplitudes().iter()).serialize(serializer)
    }
}

impl PureStateVector {
    /// Parses the `[[re, im], …]` vector format for the given dims.
    pub fn from_complex_list(dims: Dims, values: &[[f64; 2]]) -> Result<Self> {
        Self::new(BipartiteVector::from_slice(dims, &from_complex_list(values))?)
    }
}
