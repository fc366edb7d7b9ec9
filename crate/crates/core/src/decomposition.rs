//! Constructive separability certificates and the blockpositive witnesses
//! that pin down the endpoints of pure Schmidt-form families.
//!
//! A [`ProductDecomposition`] writes a target as `Σ w_t |v_t⟩⟨v_t| + D` with
//! product unit vectors `v_t`, positive weights and a nonnegative diagonal
//! `D` in the product basis. Such a certificate is checkable without trusting
//! the code that produced it: see [`verify_decomposition`].

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::OneParamFamily;
use crate::tensor::{
    partial_transpose, schmidt_decompose, BipartiteOperator, BipartiteVector, ComplexList, Dims, PureStateVector,
    SchmidtSpectrum,
};

pub const RECONSTRUCTION_TOL: f64 = 1e-10;
pub const REMAINDER_TOL: f64 = -1e-12;
pub const RANK_ONE_TOL: f64 = 1e-10;
const DIAGONAL_TOL: f64 = 1e-12;

/// `{1, i, −1, −i}` in the order used to enumerate phase tuples.
pub const QUARTER_PHASES: [Complex64; 4] =
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)];

#[derive(Debug, Clone, PartialEq)]
pub struct ProductTerm {
    pub weight: f64,
    pub vector: PureStateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductDecomposition {
    target: BipartiteOperator,
    terms: Vec<ProductTerm>,
    remainder: Vec<f64>,
}

impl ProductDecomposition {
    pub fn new(target: BipartiteOperator, terms: Vec<ProductTerm>, remainder: Vec<f64>) -> Result<Self> {
        let dims = target.dims();
        if remainder.len() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: format!("{} remainder entries", dims.total()),
                actual: remainder.len().to_string(),
            });
        }
        if let Some(bad) = terms.iter().find(|t| t.vector.dims() != dims) {
            return Err(Error::DimensionMismatch { expected: dims.to_string(), actual: bad.vector.dims().to_string() });
        }
        Ok(Self { target, terms, remainder })
    }

    /// A diagonal target written as pure remainder.
    pub fn diagonal(target: BipartiteOperator) -> Result<Self> {
        let remainder = target.diagonal_real();
        Self::new(target, Vec::new(), remainder)
    }

    /// Adds `weight · |v⟩⟨v|` after splitting the norm of `v` into the weight.
    fn push_unnormalized(&mut self, weight: f64, v: &BipartiteVector) -> Result<()> {
        if v.norm_squared() == 0.0 {
            return Ok(());
        }
        let (norm_sq, vector) = v.normalize()?;
        self.terms.push(ProductTerm { weight: weight * norm_sq, vector });
        Ok(())
    }

    pub fn dims(&self) -> Dims {
        self.target.dims()
    }

    pub fn target(&self) -> &BipartiteOperator {
        &self.target
    }

    pub fn terms(&self) -> &[ProductTerm] {
        &self.terms
    }

    pub fn terms_mut(&mut self) -> &mut Vec<ProductTerm> {
        &mut self.terms
    }

    pub fn remainder(&self) -> &[f64] {
        &self.remainder
    }

    /// `Σ w_t |v_t⟩⟨v_t| + diag(remainder)`.
    pub fn reconstruct(&self) -> BipartiteOperator {
        let dims = self.dims();
        let mut acc = BipartiteOperator::diagonal(dims, &self.remainder).expect("length checked").into_matrix();
        for term in &self.terms {
            let a = term.vector.amplitudes();
            acc += a * a.adjoint() * Complex64::new(term.weight, 0.0);
        }
        BipartiteOperator::new(dims, acc).expect("dims fixed")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationReport {
    pub residual: f64,
    pub min_remainder: f64,
    pub all_rank_one: bool,
    pub min_weight: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.residual <= RECONSTRUCTION_TOL
            && self.min_remainder >= REMAINDER_TOL
            && self.all_rank_one
            && self.min_weight >= 0.0
    }
}

/// Recomputes the reconstruction residual, the smallest remainder entry and
/// the Schmidt rank of every term.
pub fn verify_decomposition(d: &ProductDecomposition) -> VerificationReport {
    let residual = d.reconstruct().max_abs_diff(&d.target);
    let min_remainder = d.remainder.iter().copied().fold(f64::INFINITY, f64::min);
    let all_rank_one = d.terms.iter().all(|t| {
        let coeffs = schmidt_decompose(&t.vector).coefficients;
        (coeffs[0] - 1.0).abs() <= RANK_ONE_TOL && coeffs[1..].iter().all(|c| *c <= RANK_ONE_TOL)
    });
    let min_weight = d.terms.iter().map(|t| t.weight).fold(f64::INFINITY, f64::min);
    VerificationReport { residual, min_remainder, all_rank_one, min_weight }
}

fn verified(d: ProductDecomposition) -> Result<ProductDecomposition> {
    let report = verify_decomposition(&d);
    if !report.passed() {
        return Err(Error::VerificationFailed { residual: report.residual, min_remainder: report.min_remainder });
    }
    Ok(d)
}

fn require_pairs(spectrum: &SchmidtSpectrum) -> Result<()> {
    if spectrum.len() < 2 {
        return Err(Error::InvalidSpectrum("constructions need n ≥ 2".into()));
    }
    Ok(())
}

fn require_unimodular(phase: Complex64) -> Result<()> {
    if (phase.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::OutOfRange(format!("phase {phase} is not unimodular")));
    }
    Ok(())
}

/// `|η_α⟩ = |ξ_α⟩ ⊗ |ξ̄_α⟩` with `|ξ_α⟩ = Σ √p_i α_i |i⟩` (unnormalized).
pub fn eta_alpha(spectrum: &SchmidtSpectrum, phases: &[Complex64]) -> Result<BipartiteVector> {
    if phases.len() != spectrum.len() {
        return Err(Error::DimensionMismatch { expected: spectrum.len().to_string(), actual: phases.len().to_string() });
    }
    for &phase in phases {
        require_unimodular(phase)?;
    }
    let xi: Vec<Complex64> = spectrum.coefficients().iter().zip(phases).map(|(p, a)| a * p.sqrt()).collect();
    let xi_bar: Vec<Complex64> = xi.iter().map(|z| z.conj()).collect();
    BipartiteVector::product(&xi, &xi_bar)
}

/// `(√p_j|i⟩ + α√p_i|j⟩) ⊗ (√p_j|i⟩ − ᾱ√p_i|j⟩)` for `i > j` (unnormalized).
pub fn eta_ij_alpha(spectrum: &SchmidtSpectrum, i: usize, j: usize, phase: Complex64) -> Result<BipartiteVector> {
    let n = spectrum.len();
    if i <= j || i >= n {
        return Err(Error::OutOfRange(format!("need n > i > j, got i = {i}, j = {j}, n = {n}")));
    }
    require_unimodular(phase)?;
    let (sp_i, sp_j) = (spectrum.get(i).sqrt(), spectrum.get(j).sqrt());
    let mut left = vec![Complex64::new(0.0, 0.0); n];
    let mut right = left.clone();
    left[i] = Complex64::new(sp_j, 0.0);
    left[j] = phase * sp_i;
    right[i] = Complex64::new(sp_j, 0.0);
    right[j] = -phase.conj() * sp_i;
    BipartiteVector::product(&left, &right)
}

/// Phase tuples in `{1, i, −1, −i}^len`, lexicographic.
fn phase_tuples(len: usize) -> impl Iterator<Item = Vec<Complex64>> {
    (0..4usize.pow(len as u32)).map(move |mut code| {
        let mut tuple = vec![Complex64::new(0.0, 0.0); len];
        for slot in tuple.iter_mut().rev() {
            *slot = QUARTER_PHASES[code % 4];
            code /= 4;
        }
        tuple
    })
}

/// Separable decomposition of `X_μ` at `μ = 1/(1 + n²p₀p₁)`, the upper
/// separability endpoint of the pure family.
///
/// Terms are the phase-averaged product vectors `η_α` over
/// `α ∈ {±1, ±i}ⁿ` with `α₀ = 1`; `|η_α⟩⟨η_α|` only depends on relative
/// phases, so this loses nothing against the full `4ⁿ` average.
pub fn decompose_sigma_plus(spectrum: &SchmidtSpectrum) -> Result<ProductDecomposition> {
    require_pairs(spectrum)?;
    let n = spectrum.len();
    let p = spectrum.coefficients();
    let p01 = p[0] * p[1];
    let denom = 1.0 + (n * n) as f64 * p01;
    let mu = 1.0 / denom;
    let family = OneParamFamily::pure(spectrum)?;
    let target = family.state_at(mu);
    let dims = spectrum.dims();

    let mut remainder = vec![0.0; dims.total()];
    for i in 0..n {
        for j in 0..n {
            let gap = if i == j { p01 } else { p01 - p[i] * p[j] };
            remainder[dims.index(i, j)] = gap / denom;
        }
    }
    let count = 4usize.pow((n - 1) as u32);
    let weight = 1.0 / (count as f64 * denom);
    let mut d = ProductDecomposition::new(target, Vec::with_capacity(count), remainder)?;
    for rest in phase_tuples(n - 1) {
        let mut phases = Vec::with_capacity(n);
        phases.push(QUARTER_PHASES[0]);
        phases.extend(rest);
        d.push_unnormalized(weight, &eta_alpha(spectrum, &phases)?)?;
    }
    verified(d)
}

/// Separable decomposition of `X_{δ⁻} = (I − ϱ)/(n² − 1)`, the lower end of
/// the pure family's state interval.
pub fn decompose_delta_minus(spectrum: &SchmidtSpectrum) -> Result<ProductDecomposition> {
    require_pairs(spectrum)?;
    let n = spectrum.len();
    let p = spectrum.coefficients();
    let scale = (n * n - 1) as f64;
    let family = OneParamFamily::pure(spectrum)?;
    let target = family.state_at(-1.0 / scale);
    let dims = spectrum.dims();

    let mut remainder = vec![0.0; dims.total()];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                remainder[dims.index(i, j)] = (1.0 - p[i] * p[j]) / scale;
            }
        }
    }
    let weight = 1.0 / (4.0 * scale);
    let mut d = ProductDecomposition::new(target, Vec::with_capacity(2 * n * (n - 1)), remainder)?;
    for i in 0..n {
        for j in 0..i {
            for phase in QUARTER_PHASES {
                d.push_unnormalized(weight, &eta_ij_alpha(spectrum, i, j, phase)?)?;
            }
        }
    }
    verified(d)
}

/// `ϱ_{ij} = |ξ_{ij}⟩⟨ξ_{ij}|` with `ξ_{ij} = √(p_i p_j)(|ij⟩ − |ji⟩)`.
fn antisymmetric_pair(spectrum: &SchmidtSpectrum, i: usize, j: usize) -> BipartiteOperator {
    let dims = spectrum.dims();
    let amp = (spectrum.get(i) * spectrum.get(j)).sqrt();
    let mut v = vec![Complex64::new(0.0, 0.0); dims.total()];
    v[dims.index(i, j)] = Complex64::new(amp, 0.0);
    v[dims.index(j, i)] = Complex64::new(-amp, 0.0);
    BipartiteOperator::projector(&BipartiteVector::from_slice(dims, &v).expect("length matches"))
}

/// `½(|ij⟩⟨ij| + |ji⟩⟨ji| − |ii⟩⟨jj| − |jj⟩⟨ii|)` together with the
/// parameter of the perpendicular hyperplane through it.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessBundle {
    pub pair: (usize, usize),
    pub witness: BipartiteOperator,
    pub nu: f64,
    /// `⟨W − X_ν|ϱ⟩`.
    pub residual: f64,
}

pub fn witness_bundle(spectrum: &SchmidtSpectrum, i: usize, j: usize) -> Result<WitnessBundle> {
    let n = spectrum.len();
    if i <= j || i >= n {
        return Err(Error::OutOfRange(format!("need n > i > j, got i = {i}, j = {j}, n = {n}")));
    }
    let pp = spectrum.get(i) * spectrum.get(j);
    if pp <= 0.0 {
        return Err(Error::OutOfRange(format!("witness undefined: p_{i} p_{j} = 0")));
    }
    let witness = partial_transpose(&antisymmetric_pair(spectrum, i, j)) * (1.0 / (2.0 * pp));
    let n_sq = (n * n) as f64;
    let nu = -(n_sq * pp + 1.0) / (n_sq - 1.0);
    let family = OneParamFamily::pure(spectrum)?;
    let residual = family.side_value(nu, &witness)?;
    if residual.abs() > 1e-12 {
        return Err(Error::VerificationFailed { residual: residual.abs(), min_remainder: 0.0 });
    }
    Ok(WitnessBundle { pair: (i, j), witness, nu, residual })
}

/// `(n²p₀² − 1)·X_{β₁⁻} = Σ_{i>j} ϱ_{ij}^Γ + D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaWitnessDecomposition {
    /// `n²p₀² − 1`.
    pub scale: f64,
    /// `X_{β₁⁻}`.
    pub target: BipartiteOperator,
    pub terms: Vec<PairTerm>,
    pub diagonal: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub pair: (usize, usize),
    pub matrix: BipartiteOperator,
}

impl BetaWitnessDecomposition {
    /// Max entry of `scale·target − Σ terms − diag(D)`.
    pub fn residual(&self) -> f64 {
        let mut rebuilt = BipartiteOperator::diagonal(self.target.dims(), &self.diagonal).expect("length fixed");
        for t in &self.terms {
            rebuilt = &rebuilt + &t.matrix;
        }
        (&self.target * self.scale).max_abs_diff(&rebuilt)
    }

    pub fn min_diagonal(&self) -> f64 {
        self.diagonal.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

pub fn beta_witness_decomposition(spectrum: &SchmidtSpectrum) -> Result<BetaWitnessDecomposition> {
    require_pairs(spectrum)?;
    let n = spectrum.len();
    let scale = (n * n) as f64 * spectrum.get(0).powi(2) - 1.0;
    if scale <= 0.0 {
        return Err(Error::InvalidSpectrum(format!("n²p₀² − 1 = {scale} must be positive")));
    }
    let family = OneParamFamily::pure(spectrum)?;
    let target = family.state_at(-1.0 / scale);
    let mut terms = Vec::with_capacity(n * (n - 1) / 2);
    let mut rest = &target * scale;
    for i in 0..n {
        for j in 0..i {
            let matrix = partial_transpose(&antisymmetric_pair(spectrum, i, j));
            rest = &rest - &matrix;
            terms.push(PairTerm { pair: (i, j), matrix });
        }
    }
    let off = rest.max_off_diagonal();
    let diagonal = rest.diagonal_real();
    let min = diagonal.iter().copied().fold(f64::INFINITY, f64::min);
    if off > DIAGONAL_TOL || min < REMAINDER_TOL {
        return Err(Error::VerificationFailed { residual: off, min_remainder: min });
    }
    Ok(BetaWitnessDecomposition { scale, target, terms, diagonal })
}

// ---------------------------------------------------------------------------
// JSON certificate format.

#[derive(Serialize, Deserialize)]
struct TermWire {
    weight: f64,
    vector: ComplexList,
}

#[derive(Serialize, Deserialize)]
struct DecompositionWire {
    target: BipartiteOperator,
    terms: Vec<TermWire>,
    remainder: Vec<f64>,
}

impl Serialize for ProductDecomposition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DecompositionWire {
            target: self.target.clone(),
            terms: self
                .terms
                .iter()
                .map(|t| TermWire { weight: t.weight, vector: crate::tensor::to_complex_list(t.vector.amplitudes().iter()) })
                .collect(),
            remainder: self.remainder.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProductDecomposition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = DecompositionWire::deserialize(deserializer)?;
        let dims = wire.target.dims();
        let terms = wire
            .terms
            .iter()
            .map(|t| {
                PureStateVector::from_complex_list(dims, &t.vector).map(|vector| ProductTerm { weight: t.weight, vector })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        ProductDecomposition::new(wire.target, terms, wire.remainder).map_err(D::Error::custom)
    }
}
