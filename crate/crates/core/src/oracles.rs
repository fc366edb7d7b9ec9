//! Membership tests, with certificates, for states, PPT states, states of
//! Schmidt number ≤ k, and k-blockpositive matrices of trace one.

use serde::Serialize;

use crate::decomposition::{
    decompose_delta_minus, decompose_sigma_plus, verify_decomposition, ProductDecomposition, RECONSTRUCTION_TOL,
};
use crate::error::{Error, Result};
use crate::seesaw::{check_rank, min_schmidt_k_expectation, SeeSawConfig};
use crate::tensor::{
    hermitian_eigen, hs_inner, partial_transpose, schmidt_decompose, BipartiteOperator, Dims, PureStateVector,
    SchmidtSpectrum,
};

/// Smallest eigenvalue still counted as nonnegative.
pub const PSD_TOL: f64 = -1e-10;
/// Expectation values below this count as a definite violation.
pub const WITNESS_TOL: f64 = -1e-9;
/// Slack allowed when re-evaluating a certificate.
pub const CERTIFICATE_TOL: f64 = 1e-10;

const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    In,
    Out,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PptSide {
    Operator,
    PartialTranspose,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `⟨v|X|v⟩ = value < 0`.
    EigenvectorWitness { vector: PureStateVector, value: f64 },
    /// `⟨v|X|v⟩ = value < 0` with `v` of Schmidt rank at most `schmidt_rank`.
    ProductVectorWitness { vector: PureStateVector, schmidt_rank: usize, value: f64 },
    /// Negative eigenvector of `X` or of `X^Γ`.
    PptEigenvectorWitness { side: PptSide, vector: PureStateVector, value: f64 },
    /// 1-blockpositive `W` with `⟨W|X⟩ = value < 0`.
    BlockPositiveWitness { witness: BipartiteOperator, value: f64 },
    DecompositionRef { decomposition: Box<ProductDecomposition> },
    ClosedFormRef { name: String },
}

impl Certificate {
    pub fn named(name: &str) -> Self {
        Self::ClosedFormRef { name: name.to_owned() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipVerdict {
    pub status: Status,
    pub margin: f64,
    pub certificate: Certificate,
}

impl MembershipVerdict {
    fn new(status: Status, margin: f64, certificate: Certificate) -> Self {
        Self { status, margin, certificate }
    }

    pub fn is_in(&self) -> bool {
        self.status == Status::In
    }

    pub fn is_out(&self) -> bool {
        self.status == Status::Out
    }

    /// Re-evaluates the attached certificate against `x`.
    ///
    /// Out certificates must reproduce a strictly negative value; decomposition
    /// certificates must verify and reconstruct `x`. Named closed-form
    /// references carry nothing to check and pass.
    pub fn verify(&self, x: &BipartiteOperator) -> Result<bool> {
        let negative = |recomputed: f64, stored: f64| recomputed < 0.0 && (recomputed - stored).abs() <= CERTIFICATE_TOL;
        Ok(match &self.certificate {
            Certificate::EigenvectorWitness { vector, value } => negative(x.expectation(vector.as_vector())?, *value),
            Certificate::ProductVectorWitness { vector, schmidt_rank, value } => {
                let rank = schmidt_decompose(vector).rank(1e-10);
                rank <= *schmidt_rank && negative(x.expectation(vector.as_vector())?, *value)
            }
            Certificate::PptEigenvectorWitness { side, vector, value } => {
                let target = match side {
                    PptSide::Operator => x.clone(),
                    PptSide::PartialTranspose => partial_transpose(x),
                };
                negative(target.expectation(vector.as_vector())?, *value)
            }
            Certificate::BlockPositiveWitness { witness, value } => negative(hs_inner(witness, x)?, *value),
            Certificate::DecompositionRef { decomposition } => {
                verify_decomposition(decomposition).passed()
                    && decomposition.target().max_abs_diff(x) <= RECONSTRUCTION_TOL
            }
            Certificate::ClosedFormRef { .. } => true,
        })
    }
}

fn require_trace_one_hermitian(x: &BipartiteOperator) -> Result<()> {
    x.require_hermitian()?;
    x.require_unit_trace(TRACE_TOL)
}

/// Lowest eigenpair as a verdict on positive semidefiniteness.
fn psd_verdict(x: &BipartiteOperator, side: Option<PptSide>) -> Result<MembershipVerdict> {
    let eig = hermitian_eigen(x)?;
    let min = eig.min_value();
    if min >= PSD_TOL {
        return Ok(MembershipVerdict::new(Status::In, min, Certificate::named("psd")));
    }
    let vector = eig.vector(eig.values.len() - 1, x.dims());
    let value = x.expectation(vector.as_vector())?;
    let certificate = match side {
        None => Certificate::EigenvectorWitness { vector, value },
        Some(side) => Certificate::PptEigenvectorWitness { side, vector, value },
    };
    Ok(MembershipVerdict::new(Status::Out, min, certificate))
}

/// Membership in the set of states.
pub fn is_density(x: &BipartiteOperator) -> Result<MembershipVerdict> {
    require_trace_one_hermitian(x)?;
    psd_verdict(x, None)
}

/// Membership in the set of PPT states.
pub fn is_ppt(x: &BipartiteOperator) -> Result<MembershipVerdict> {
    require_trace_one_hermitian(x)?;
    let direct = psd_verdict(x, Some(PptSide::Operator))?;
    if direct.is_out() {
        return Ok(direct);
    }
    let transposed = psd_verdict(&partial_transpose(x), Some(PptSide::PartialTranspose))?;
    if transposed.is_out() {
        return Ok(transposed);
    }
    Ok(MembershipVerdict::new(Status::In, direct.margin.min(transposed.margin), Certificate::named("ppt")))
}

/// Membership in the trace-one k-blockpositive matrices.
///
/// `Out` is definitive (a Schmidt-rank-k vector with negative expectation).
/// `In` is definitive for PSD input or `k = m ∧ n`; otherwise it rests on the
/// see-saw search and is tagged `see-saw-nonnegative`, or reported as
/// `Unknown` when `cfg.strict` is set.
pub fn is_blockpositive_k(x: &BipartiteOperator, k: usize, cfg: &SeeSawConfig) -> Result<MembershipVerdict> {
    require_trace_one_hermitian(x)?;
    check_rank(x.dims(), k)?;
    let density = psd_verdict(x, None)?;
    if density.is_in() {
        return Ok(density);
    }
    if k == x.dims().min_factor() {
        // Every vector has Schmidt rank ≤ m ∧ n.
        let Certificate::EigenvectorWitness { vector, value } = density.certificate else {
            unreachable!("psd_verdict without side yields an eigenvector witness")
        };
        return Ok(MembershipVerdict::new(
            Status::Out,
            density.margin,
            Certificate::ProductVectorWitness { vector, schmidt_rank: k, value },
        ));
    }
    let found = min_schmidt_k_expectation(x, k, cfg)?;
    if found.value < WITNESS_TOL {
        return Ok(MembershipVerdict::new(
            Status::Out,
            found.value,
            Certificate::ProductVectorWitness { vector: found.vector, schmidt_rank: k, value: found.value },
        ));
    }
    let status = if cfg.strict { Status::Unknown } else { Status::In };
    Ok(MembershipVerdict::new(status, found.value, Certificate::named("see-saw-nonnegative")))
}

/// How [`separability_oracle`] decides.
#[derive(Debug, Clone)]
pub enum SeparabilityStrategy {
    /// PPT is equivalent to separability in `2 ⊗ 2` and `2 ⊗ 3`.
    LowDim,
    /// Match `X` against the constructive decompositions for a pure Schmidt-form family.
    Certificate(SchmidtSpectrum),
    /// Look for a 1-blockpositive `W` with `⟨W|X⟩ < 0`. The partial transpose
    /// of a negative eigenvector of `X^Γ` is always tried first.
    WitnessSearch { candidates: Vec<BipartiteOperator>, cfg: SeeSawConfig },
}

fn is_low_dim(dims: Dims) -> bool {
    matches!((dims.m(), dims.n()), (2, 2) | (2, 3) | (3, 2))
}

/// Diagonal states are mixtures of product basis states.
fn diagonal_certificate(x: &BipartiteOperator) -> Result<Option<MembershipVerdict>> {
    if x.max_off_diagonal() > RECONSTRUCTION_TOL {
        return Ok(None);
    }
    let decomposition = ProductDecomposition::diagonal(x.clone())?;
    let report = verify_decomposition(&decomposition);
    if !report.passed() {
        return Ok(None);
    }
    Ok(Some(MembershipVerdict::new(
        Status::In,
        report.min_remainder,
        Certificate::DecompositionRef { decomposition: Box::new(decomposition) },
    )))
}

/// Separability test for a state `X`.
pub fn separability_oracle(x: &BipartiteOperator, strategy: &SeparabilityStrategy) -> Result<MembershipVerdict> {
    let density = is_density(x)?;
    if density.is_out() {
        return Err(Error::OutOfRange(format!(
            "separability is only defined for states (min eigenvalue {:e})",
            density.margin
        )));
    }
    if let Some(verdict) = diagonal_certificate(x)? {
        return Ok(verdict);
    }
    let ppt = is_ppt(x)?;
    match strategy {
        SeparabilityStrategy::LowDim => {
            if !is_low_dim(x.dims()) {
                return Ok(MembershipVerdict::new(
                    Status::Unknown,
                    ppt.margin,
                    Certificate::named("low-dim-rule-not-applicable"),
                ));
            }
            if ppt.is_out() {
                return Ok(ppt);
            }
            Ok(MembershipVerdict::new(Status::In, ppt.margin, Certificate::named("ppt-equals-separable-low-dim")))
        }
        SeparabilityStrategy::Certificate(spectrum) => {
            if ppt.is_out() {
                return Ok(ppt);
            }
            if spectrum.dims() != x.dims() {
                return Err(Error::DimensionMismatch {
                    expected: x.dims().to_string(),
                    actual: spectrum.dims().to_string(),
                });
            }
            for decomposition in [decompose_sigma_plus(spectrum), decompose_delta_minus(spectrum)] {
                let Ok(decomposition) = decomposition else { continue };
                if decomposition.target().max_abs_diff(x) <= RECONSTRUCTION_TOL {
                    let report = verify_decomposition(&decomposition);
                    if report.passed() {
                        return Ok(MembershipVerdict::new(
                            Status::In,
                            report.min_remainder,
                            Certificate::DecompositionRef { decomposition: Box::new(decomposition) },
                        ));
                    }
                }
            }
            Ok(MembershipVerdict::new(Status::Unknown, ppt.margin, Certificate::named("no-matching-construction")))
        }
        SeparabilityStrategy::WitnessSearch { candidates, cfg } => {
            let mut pool = Vec::with_capacity(candidates.len() + 1);
            if let Certificate::PptEigenvectorWitness { side: PptSide::PartialTranspose, vector, .. } = &ppt.certificate {
                // (|v⟩⟨v|)^Γ pairs with X like |v⟩⟨v| pairs with X^Γ.
                pool.push(partial_transpose(&vector.projector()));
            }
            pool.extend(candidates.iter().cloned());
            for witness in pool {
                if witness.dims() != x.dims() {
                    return Err(Error::DimensionMismatch {
                        expected: x.dims().to_string(),
                        actual: witness.dims().to_string(),
                    });
                }
                let value = hs_inner(&witness, x)?;
                if value >= WITNESS_TOL {
                    continue;
                }
                let positivity = min_schmidt_k_expectation(&witness, 1, cfg)?;
                if positivity.value >= WITNESS_TOL {
                    return Ok(MembershipVerdict::new(
                        Status::Out,
                        value,
                        Certificate::BlockPositiveWitness { witness, value },
                    ));
                }
            }
            Ok(MembershipVerdict::new(Status::Unknown, ppt.margin, Certificate::named("no-witness-found")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::OneParamFamily;
    use crate::random::{random_spectrum, random_state, random_trace_one_hermitian};
    use crate::tensor::BipartiteVector;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spectrum(sq: &[f64]) -> SchmidtSpectrum {
        SchmidtSpectrum::from_squared(sq, 1e-12).unwrap()
    }

    #[test]
    fn density_examples() {
        let dims = Dims::square(3).unwrap();
        let mixed = BipartiteOperator::maximally_mixed(dims);
        let v = is_density(&mixed).unwrap();
        assert!(v.is_in());
        assert_abs_diff_eq!(v.margin, 1.0 / 9.0, epsilon = 1e-14);

        let f = OneParamFamily::pure(&spectrum(&[0.5, 0.3, 0.2])).unwrap();
        let out = is_density(&f.state_at(1.01)).unwrap();
        assert!(out.is_out());
        assert!(out.verify(&f.state_at(1.01)).unwrap());

        let boundary = is_density(&f.state_at(-1.0 / 8.0)).unwrap();
        assert!(boundary.is_in());
        assert_abs_diff_eq!(boundary.margin, 0.0, epsilon = 1e-12);

        assert!(matches!(is_density(&(&mixed * 2.0)), Err(Error::TraceNotOne { .. })));
    }

    #[test]
    fn ppt_examples() {
        let s = spectrum(&[0.8, 0.2]);
        let f = OneParamFamily::pure(&s).unwrap();
        let sigma_plus = 1.0 / 2.6;
        let x = f.state_at(sigma_plus + 0.01);
        let v = is_ppt(&x).unwrap();
        assert!(v.is_out());
        assert!(matches!(v.certificate, Certificate::PptEigenvectorWitness { side: PptSide::PartialTranspose, .. }));
        assert!(v.verify(&x).unwrap());
        assert!(is_ppt(&f.state_at(sigma_plus - 1e-6)).unwrap().is_in());
        assert!(is_ppt(f.rho_star()).unwrap().is_in());
    }

    #[test]
    fn psd_is_blockpositive_for_every_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random_state(Dims::new(3, 3).unwrap(), &mut rng);
        for k in 1..=3 {
            assert!(is_blockpositive_k(&x, k, &SeeSawConfig::default()).unwrap().is_in());
        }
    }

    #[test]
    fn blockpositivity_boundary_of_pure_family() {
        let s = spectrum(&[0.8, 0.2]);
        let f = OneParamFamily::pure(&s).unwrap();
        let beta_minus = -1.0 / 2.2;
        let cfg = SeeSawConfig::default();
        let at = is_blockpositive_k(&f.state_at(beta_minus), 1, &cfg).unwrap();
        assert!(at.is_in());
        assert_abs_diff_eq!(at.margin, 0.0, epsilon = 1e-9);
        assert_eq!(at.certificate, Certificate::named("see-saw-nonnegative"));

        let x = f.state_at(beta_minus - 0.05);
        let out = is_blockpositive_k(&x, 1, &cfg).unwrap();
        assert!(out.is_out());
        assert!(out.verify(&x).unwrap());
        assert!(crate::seesaw::tests_support::grid_min_product(&x, 24) < 0.0);

        let strict = SeeSawConfig { strict: true, ..cfg };
        assert_eq!(is_blockpositive_k(&f.state_at(beta_minus), 1, &strict).unwrap().status, Status::Unknown);
    }

    #[test]
    fn closed_form_x_beta_is_blockpositive_boundary() {
        let s = spectrum(&[0.5, 0.3, 0.2]);
        let f = OneParamFamily::pure(&s).unwrap();
        let n2p0 = 9.0 * 0.5;
        let x_beta = &(&BipartiteOperator::identity(s.dims()) * 0.5) - &s.density();
        let x_beta = x_beta * (1.0 / (n2p0 - 1.0));
        assert!(x_beta.max_abs_diff(&f.state_at(-1.0 / (n2p0 - 1.0))) < 1e-14);
        let v = is_blockpositive_k(&x_beta, 1, &SeeSawConfig::default()).unwrap();
        assert!(v.is_in());
        assert_abs_diff_eq!(v.margin, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn separability_examples() {
        let s = spectrum(&[0.8, 0.2]);
        let f = OneParamFamily::pure(&s).unwrap();
        let mu = 1.0 / 2.6;
        let certified = separability_oracle(&f.state_at(mu), &SeparabilityStrategy::Certificate(s.clone())).unwrap();
        assert!(certified.is_in());
        assert!(matches!(certified.certificate, Certificate::DecompositionRef { .. }));
        assert!(certified.verify(&f.state_at(mu)).unwrap());

        let beyond = f.state_at(mu + 0.01);
        let low = separability_oracle(&beyond, &SeparabilityStrategy::LowDim).unwrap();
        assert!(low.is_out());
        assert!(low.verify(&beyond).unwrap());
        assert!(separability_oracle(&f.state_at(mu - 0.01), &SeparabilityStrategy::LowDim).unwrap().is_in());

        let mixed = BipartiteOperator::maximally_mixed(s.dims());
        for strategy in [
            SeparabilityStrategy::LowDim,
            SeparabilityStrategy::Certificate(s.clone()),
            SeparabilityStrategy::WitnessSearch { candidates: vec![], cfg: SeeSawConfig::default() },
        ] {
            assert!(separability_oracle(&mixed, &strategy).unwrap().is_in());
        }
        assert!(separability_oracle(&f.state_at(1.5), &SeparabilityStrategy::LowDim).is_err());
    }

    #[test]
    fn low_dim_rule_does_not_apply_in_three_by_three() {
        let s = spectrum(&[0.5, 0.3, 0.2]);
        let f = OneParamFamily::pure(&s).unwrap();
        let v = separability_oracle(&f.state_at(0.1), &SeparabilityStrategy::LowDim).unwrap();
        assert_eq!(v.status, Status::Unknown);
    }

    #[test]
    fn witness_search_finds_entangled_states() {
        let s = spectrum(&[0.5, 0.3, 0.2]);
        let f = OneParamFamily::pure(&s).unwrap();
        let x = f.state_at(0.5);
        let cfg = SeeSawConfig { restarts: 16, ..Default::default() };
        let v = separability_oracle(&x, &SeparabilityStrategy::WitnessSearch { candidates: vec![], cfg }).unwrap();
        assert!(v.is_out());
        assert!(v.verify(&x).unwrap());

        // A supplied flip witness also detects it, even with the automatic one absent.
        let dims = s.dims();
        let mut w = BipartiteOperator::zeros(dims).into_matrix();
        let half = num_complex::Complex64::new(0.5, 0.0);
        w[(dims.index(1, 0), dims.index(1, 0))] = half;
        w[(dims.index(0, 1), dims.index(0, 1))] = half;
        w[(dims.index(0, 0), dims.index(1, 1))] = -half;
        w[(dims.index(1, 1), dims.index(0, 0))] = -half;
        let w = BipartiteOperator::new(dims, w).unwrap();
        assert!(hs_inner(&w, &x).unwrap() < 0.0);
    }

    #[test]
    fn nesting_of_verdicts() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cfg = SeeSawConfig { restarts: 16, ..Default::default() };
        for trial in 0..12 {
            let dims = Dims::new(2, 2 + trial % 2).unwrap();
            let x = if trial % 3 == 0 {
                random_trace_one_hermitian(dims, &mut rng)
            } else {
                let f = OneParamFamily::pure(&random_spectrum(2, &mut rng)).ok();
                match (trial % 2, f) {
                    (0, Some(f)) => f.state_at(-0.8 + 0.2 * trial as f64),
                    _ => random_state(dims, &mut rng),
                }
            };
            let density = is_density(&x).unwrap();
            let ppt = is_ppt(&x).unwrap();
            if ppt.is_in() {
                assert!(density.is_in());
            }
            if density.is_in() {
                let sep = separability_oracle(&x, &SeparabilityStrategy::LowDim).unwrap();
                if sep.is_in() {
                    assert!(ppt.is_in());
                }
                for k in 1..=dims.min_factor() {
                    assert!(is_blockpositive_k(&x, k, &cfg).unwrap().is_in());
                }
            }
            for verdict in [&density, &ppt] {
                if verdict.is_out() {
                    assert!(verdict.verify(&x).unwrap());
                }
            }
        }
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let dims = Dims::square(2).unwrap();
        let x = BipartiteOperator::maximally_mixed(dims);
        let fake = MembershipVerdict::new(
            Status::Out,
            -1.0,
            Certificate::EigenvectorWitness { vector: PureStateVector::basis(dims, 0, 0), value: -1.0 },
        );
        assert!(!fake.verify(&x).unwrap());
        let entangled = PureStateVector::new(
            BipartiteVector::from_slice(
                dims,
                &[0.5f64.sqrt(), 0.0, 0.0, 0.5f64.sqrt()].map(|a| num_complex::Complex64::new(a, 0.0)),
            )
            .unwrap(),
        )
        .unwrap();
        let bad_rank = MembershipVerdict::new(
            Status::Out,
            -0.5,
            Certificate::ProductVectorWitness { vector: entangled, schmidt_rank: 1, value: -0.5 },
        );
        assert!(!bad_rank.verify(&x).unwrap());
    }
}
