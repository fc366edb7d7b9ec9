//! Endpoints of the intervals `{λ : X_λ ∈ C}` along a family and of the
//! perpendicular supporting hyperplanes of the dual cones.
//!
//! For a closed convex cone `C` containing `ϱ*` in its interior,
//! `X_λ ∈ C ⇔ γ⁻[C] ≤ λ ≤ γ⁺[C]`. The hyperplane perpendicular to the family
//! at `X_ν` supports `C°` exactly when `X_ν` is orthogonal to an endpoint of
//! `C`, so `γ̃±[C°] = partner(γ∓[C])`.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::OneParamFamily;
use crate::oracles::{is_blockpositive_k, is_density, separability_oracle, MembershipVerdict, SeparabilityStrategy, Status};
use crate::seesaw::{check_rank, SeeSawConfig};
use crate::tensor::{hermitian_eigen, partial_transpose, BipartiteOperator, SchmidtSpectrum};

/// Eigenvalue shifts below this magnitude are treated as zero.
pub const SPECTRAL_ZERO_TOL: f64 = 1e-14;
/// Bisection tolerance for exactly decided oracles.
pub const EXACT_BISECTION_TOL: f64 = 1e-9;
/// Bisection tolerance for see-saw-backed oracles.
pub const SEESAW_BISECTION_TOL: f64 = 1e-5;
/// Outside points are searched up to this `|λ|`.
pub const BRACKET_CAP: f64 = 1e3;
const SPECTRAL_ERROR: f64 = 1e-12;
const CHAIN_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    Identity,
    PartialTranspose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Spectral,
    Bisection,
    ClosedForm,
    Duality,
    /// A spectral bound of a larger cone, attained by a verified certificate.
    Certified,
    Unresolved,
}

/// `(γ⁻, γ⁺)` for the states among `T(X_λ)`.
///
/// `T` fixes `ϱ*`, so the eigenvalues of `T(X_λ)` are `1/mn + λ h_i` with
/// `h_i` the eigenvalues of `T(ϱ) − ϱ*`. A missing sign gives `∓∞`.
pub fn spectral_interval(f: &OneParamFamily, transform: Transform) -> Result<(f64, f64)> {
    let image = match transform {
        Transform::Identity => f.rho().clone(),
        Transform::PartialTranspose => partial_transpose(f.rho()),
    };
    let base = 1.0 / f.dims().total() as f64;
    let shifts: Vec<f64> = hermitian_eigen(&image)?.values.iter().map(|v| v - base).collect();
    if shifts.iter().all(|h| h.abs() <= SPECTRAL_ZERO_TOL) {
        return Err(Error::InvalidFamily("transformed ϱ equals ϱ*".into()));
    }
    let plus = shifts.iter().filter(|h| **h < -SPECTRAL_ZERO_TOL).map(|h| base / -h).fold(f64::INFINITY, f64::min);
    let minus = -shifts.iter().filter(|h| **h > SPECTRAL_ZERO_TOL).map(|h| base / h).fold(f64::INFINITY, f64::min);
    Ok((minus, plus))
}

/// Wraps a cone oracle defined on states so that non-states count as `Out`.
pub fn restricted_to_states<'a>(
    oracle: impl Fn(&BipartiteOperator) -> Result<MembershipVerdict> + 'a,
) -> impl Fn(&BipartiteOperator) -> Result<MembershipVerdict> + 'a {
    move |x| {
        let density = is_density(x)?;
        if density.is_out() {
            return Ok(density);
        }
        oracle(x)
    }
}

fn probe(f: &OneParamFamily, oracle: &dyn Fn(&BipartiteOperator) -> Result<MembershipVerdict>, lambda: f64) -> Result<bool> {
    match oracle(&f.state_at(lambda))?.status {
        Status::In => Ok(true),
        Status::Out => Ok(false),
        Status::Unknown => Err(Error::OracleUnknown { lambda }),
    }
}

/// Locates the boundary of a convex cone along the family by bisection.
///
/// `bracket = (inside, outside)` must straddle the endpoint on the side
/// given by `direction`. The result is within `tol / 2` of the crossing.
pub fn bisect_endpoint(
    f: &OneParamFamily,
    oracle: &dyn Fn(&BipartiteOperator) -> Result<MembershipVerdict>,
    direction: Direction,
    bracket: (f64, f64),
    tol: f64,
) -> Result<f64> {
    let (mut inside, mut outside) = bracket;
    if tol.is_nan() || tol <= 0.0 || !inside.is_finite() || !outside.is_finite() {
        return Err(Error::InvalidBracket(format!("bracket {bracket:?} with tol {tol}")));
    }
    let ordered = match direction {
        Direction::Plus => outside > inside,
        Direction::Minus => outside < inside,
    };
    if !ordered {
        return Err(Error::InvalidBracket(format!("{bracket:?} is not ordered for {direction:?}")));
    }
    if !probe(f, oracle, inside)? {
        return Err(Error::InvalidBracket(format!("λ = {inside} is not inside")));
    }
    if probe(f, oracle, outside)? {
        return Err(Error::InvalidBracket(format!("λ = {outside} is not outside")));
    }
    while (outside - inside).abs() > tol {
        let mid = 0.5 * (inside + outside);
        if probe(f, oracle, mid)? {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    Ok(0.5 * (inside + outside))
}

/// Walks away from a known inside point with doubling steps until the
/// oracle reports `Out`; returns the tightened `(inside, outside)` pair.
pub fn seed_bracket(
    f: &OneParamFamily,
    oracle: &dyn Fn(&BipartiteOperator) -> Result<MembershipVerdict>,
    direction: Direction,
    inside: f64,
) -> Result<(f64, f64)> {
    let sign = match direction {
        Direction::Plus => 1.0,
        Direction::Minus => -1.0,
    };
    let mut inside = inside;
    let mut step = inside.abs().max(0.5);
    loop {
        let candidate = inside + sign * step;
        if candidate.abs() > BRACKET_CAP {
            return Err(Error::InvalidBracket(format!("no outside point within |λ| ≤ {BRACKET_CAP}")));
        }
        if !probe(f, oracle, candidate)? {
            return Ok((inside, candidate));
        }
        inside = candidate;
        step *= 2.0;
    }
}

/// `γ̃±[C°]` from the opposite endpoint `γ∓[C]`.
pub fn tilde_endpoint(f: &OneParamFamily, opposite_gamma: f64) -> Result<f64> {
    f.orthogonal_partner(opposite_gamma)
}

fn require_pure_n(spectrum: &SchmidtSpectrum) -> Result<usize> {
    let n = spectrum.len();
    if n < 2 {
        return Err(Error::InvalidSpectrum("closed forms need n ≥ 2".into()));
    }
    Ok(n)
}

/// The eight endpoints of a pure Schmidt-form family for `k = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PureFamilyClosedForms {
    pub n: usize,
    pub spectrum: SchmidtSpectrum,
    pub beta_tilde_minus: f64,
    pub beta_minus: f64,
    /// `δ⁻ = σ₁⁻ = σ̃₁⁻`.
    pub delta_minus: f64,
    pub sigma_plus: f64,
    pub sigma_tilde_plus: f64,
    /// `δ⁺ = β₁⁺ = β̃₁⁺`.
    pub delta_plus: f64,
}

impl PureFamilyClosedForms {
    pub fn row(&self) -> TheoremRow {
        TheoremRow([
            Some(self.beta_tilde_minus),
            Some(self.beta_minus),
            Some(self.delta_minus),
            Some(self.delta_minus),
            Some(self.sigma_plus),
            Some(self.sigma_tilde_plus),
            Some(self.delta_plus),
            Some(self.delta_plus),
        ])
    }
}

pub fn closed_forms_pure(spectrum: &SchmidtSpectrum) -> Result<PureFamilyClosedForms> {
    let n = require_pure_n(spectrum)?;
    let n_sq = (n * n) as f64;
    let p0 = spectrum.get(0);
    let p01 = p0 * spectrum.get(1);
    let lead = n_sq * p0 * p0 - 1.0;
    let forms = PureFamilyClosedForms {
        n,
        spectrum: spectrum.clone(),
        beta_tilde_minus: -(n_sq * p01 + 1.0) / (n_sq - 1.0),
        beta_minus: -1.0 / lead,
        delta_minus: -1.0 / (n_sq - 1.0),
        sigma_plus: 1.0 / (n_sq * p01 + 1.0),
        sigma_tilde_plus: lead / (n_sq - 1.0),
        delta_plus: 1.0,
    };
    let product = -1.0 / (n_sq - 1.0);
    for (a, b) in [(forms.beta_tilde_minus, forms.sigma_plus), (forms.beta_minus, forms.sigma_tilde_plus)] {
        if (a * b - product).abs() > 1e-12 {
            return Err(Error::ChainViolated(format!("{a} · {b} ≠ {product}")));
        }
    }
    forms.row().check_chain(CHAIN_SLACK)?;
    Ok(forms)
}

/// `(δ⁻, δ⁺, δ̃⁻, δ̃⁺)` for the family through `P_E / d`.
pub fn closed_form_projection(d: usize, m: usize, n: usize) -> Result<(f64, f64, f64, f64)> {
    let total = m * n;
    if d == 0 || d >= total {
        return Err(Error::OutOfRange(format!("subspace dimension {d} must lie in [1, {total})")));
    }
    let minus = -(d as f64) / (total - d) as f64;
    Ok((minus, 1.0, minus, 1.0))
}

/// `ϱ = p|00⟩⟨00| + (1 − p)|01⟩⟨01|` on two qubits.
pub fn diag2qubit_state(p: f64) -> Result<BipartiteOperator> {
    require_diag_regime(p)?;
    BipartiteOperator::diagonal(crate::tensor::Dims::square(2)?, &[p, 1.0 - p, 0.0, 0.0])
}

fn require_diag_regime(p: f64) -> Result<()> {
    if !(p > 0.5 && p < 1.0) {
        return Err(Error::OutOfRange(format!("p = {p} must lie in (1/2, 1)")));
    }
    Ok(())
}

/// `(β₁⁻, σ̃₁⁻)` for the two-qubit diagonal family.
pub fn closed_form_diag2qubit(p: f64) -> Result<(f64, f64)> {
    require_diag_regime(p)?;
    let beta_minus = -1.0 / (4.0 * p - 1.0);
    let sigma_tilde_minus = -1.0 / (8.0 * p * p - 8.0 * p + 3.0);
    if sigma_tilde_minus >= beta_minus {
        return Err(Error::ChainViolated(format!("σ̃₁⁻ = {sigma_tilde_minus} is not below β₁⁻ = {beta_minus}")));
    }
    Ok((beta_minus, sigma_tilde_minus))
}

// ---------------------------------------------------------------------------
// Reports.

fn serialize_endpoint<S: Serializer>(value: &Option<f64>, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    match value {
        None => serializer.serialize_none(),
        Some(v) if v.is_finite() => serializer.serialize_f64(*v),
        Some(v) if *v > 0.0 => serializer.serialize_str("+inf"),
        Some(_) => serializer.serialize_str("-inf"),
    }
}

/// Formats an endpoint for tables: empty when unresolved.
pub fn format_endpoint(value: Option<f64>) -> String {
    match value {
        None => String::new(),
        Some(v) if v == f64::INFINITY => "+inf".into(),
        Some(v) if v == f64::NEG_INFINITY => "-inf".into(),
        Some(v) => format!("{v:.12}"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Endpoint {
    #[serde(serialize_with = "serialize_endpoint")]
    pub value: Option<f64>,
    pub method: Method,
    /// Estimated absolute error.
    pub tol: f64,
}

impl Endpoint {
    pub fn known(value: f64, method: Method, tol: f64) -> Self {
        Self { value: Some(value), method, tol }
    }

    pub fn unresolved() -> Self {
        Self { value: None, method: Method::Unresolved, tol: f64::NAN }
    }

    pub fn is_resolved(&self) -> bool {
        self.value.is_some()
    }

    /// `partner(self)`, with the error propagated to first order.
    fn dual(&self, f: &OneParamFamily) -> Result<Self> {
        let Some(v) = self.value else { return Ok(Self::unresolved()) };
        if !v.is_finite() {
            return Ok(Self::known(0.0, Method::Duality, 0.0));
        }
        let partner = tilde_endpoint(f, v)?;
        Ok(Self::known(partner, Method::Duality, (partner / v).abs() * self.tol + SPECTRAL_ERROR))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    Density,
    Ppt,
    /// States of Schmidt number at most k (`k = 1`: separable states).
    SchmidtNumber(usize),
    /// Trace-one k-blockpositive matrices.
    BlockPositive(usize),
}

impl std::fmt::Display for Cone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cone::Density => write!(f, "density"),
            Cone::Ppt => write!(f, "ppt"),
            Cone::SchmidtNumber(k) => write!(f, "schmidt_number_{k}"),
            Cone::BlockPositive(k) => write!(f, "blockpositive_{k}"),
        }
    }
}

impl Serialize for Cone {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Interval of one cone and the perpendicular supporting hyperplanes of its dual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalReport {
    pub cone: Cone,
    pub gamma_minus: Endpoint,
    pub gamma_plus: Endpoint,
    pub tilde_minus: Endpoint,
    pub tilde_plus: Endpoint,
}

/// Columns `β̃₁⁻, β₁⁻, σ₁⁻, σ̃₁⁻, σ₁⁺, σ̃₁⁺, β₁⁺, β̃₁⁺`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremRow(pub [Option<f64>; 8]);

impl TheoremRow {
    pub const COLUMNS: [&'static str; 8] = [
        "beta_tilde_minus",
        "beta_minus",
        "sigma_minus",
        "sigma_tilde_minus",
        "sigma_plus",
        "sigma_tilde_plus",
        "beta_plus",
        "beta_tilde_plus",
    ];

    /// Largest entrywise gap; `None` if either side has an unresolved entry.
    pub fn max_discrepancy(&self, other: &TheoremRow) -> Option<f64> {
        self.0.iter().zip(other.0.iter()).try_fold(0.0f64, |acc, (a, b)| Some(acc.max((a.as_ref()? - b.as_ref()?).abs())))
    }

    /// `β̃⁻ ≤ β⁻ ≤ σ⁻ < 0 < σ⁺ ≤ β⁺ ≤ β̃⁺` on the resolved entries.
    pub fn check_chain(&self, slack: f64) -> Result<()> {
        let [bt_m, b_m, s_m, _, s_p, _, b_p, bt_p] = self.0;
        let chain = [bt_m, b_m, s_m, Some(0.0), s_p, b_p, bt_p];
        let resolved: Vec<(usize, f64)> = chain.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
        for pair in resolved.windows(2) {
            let ((i, a), (j, b)) = (pair[0], pair[1]);
            let strict = i == 2 || j == 4 || i == 3;
            let ok = if strict { a < b } else { a <= b + slack };
            if !ok {
                return Err(Error::ChainViolated(format!("position {i} ({a}) exceeds position {j} ({b})")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyReport {
    pub label: String,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub pure: bool,
    pub cones: Vec<IntervalReport>,
    /// States among `X_λ^Γ`; for the maximally entangled `ϱ` this is the Werner family.
    pub transposed_states: (Endpoint, Endpoint),
}

impl FamilyReport {
    pub fn cone(&self, cone: Cone) -> Option<&IntervalReport> {
        self.cones.iter().find(|c| c.cone == cone)
    }

    /// The `k = 1` theorem columns assembled from the separable and
    /// 1-blockpositive intervals.
    pub fn theorem_row(&self) -> TheoremRow {
        let s = self.cone(Cone::SchmidtNumber(1)).expect("k = 1 cones are always present");
        let b = self.cone(Cone::BlockPositive(1)).expect("k = 1 cones are always present");
        TheoremRow([
            b.tilde_minus.value,
            b.gamma_minus.value,
            s.gamma_minus.value,
            s.tilde_minus.value,
            s.gamma_plus.value,
            s.tilde_plus.value,
            b.gamma_plus.value,
            b.tilde_plus.value,
        ])
    }

    pub fn has_unresolved(&self) -> bool {
        self.cones.iter().any(|c| {
            [c.gamma_minus, c.gamma_plus, c.tilde_minus, c.tilde_plus].iter().any(|e| !e.is_resolved())
        })
    }

    pub fn csv_header() -> Vec<String> {
        let mut header: Vec<String> = ["family", "m", "n", "k"].iter().map(|s| s.to_string()).collect();
        header.extend(TheoremRow::COLUMNS.iter().map(|s| s.to_string()));
        header.extend(
            ["delta_minus", "delta_plus", "ppt_minus", "ppt_plus", "transposed_minus", "transposed_plus"]
                .iter()
                .map(|s| s.to_string()),
        );
        header
    }

    pub fn csv_record(&self) -> Vec<String> {
        let mut record = vec![self.label.clone(), self.m.to_string(), self.n.to_string(), self.k.to_string()];
        record.extend(self.theorem_row().0.iter().map(|v| format_endpoint(*v)));
        let density = self.cone(Cone::Density).expect("density is always present");
        let ppt = self.cone(Cone::Ppt).expect("ppt is always present");
        for e in [density.gamma_minus, density.gamma_plus, ppt.gamma_minus, ppt.gamma_plus] {
            record.push(format_endpoint(e.value));
        }
        record.push(format_endpoint(self.transposed_states.0.value));
        record.push(format_endpoint(self.transposed_states.1.value));
        record
    }
}

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub k: usize,
    pub seesaw: SeeSawConfig,
    pub seesaw_tol: f64,
    /// Take the pure-family closed forms for `β₁±` instead of bisecting.
    pub prefer_closed_forms: bool,
    pub label: String,
}

impl ReportOptions {
    pub fn new(k: usize, seesaw: SeeSawConfig) -> Self {
        Self { k, seesaw, seesaw_tol: SEESAW_BISECTION_TOL, prefer_closed_forms: false, label: "family".into() }
    }
}

fn spectral_pair(f: &OneParamFamily, transform: Transform) -> Result<(Endpoint, Endpoint)> {
    let (minus, plus) = spectral_interval(f, transform)?;
    Ok((Endpoint::known(minus, Method::Spectral, SPECTRAL_ERROR), Endpoint::known(plus, Method::Spectral, SPECTRAL_ERROR)))
}

/// Accepts the PPT endpoint as a separability endpoint when `X` there is
/// certified separable: the separable interval sits inside the PPT one.
fn certified_separable(f: &OneParamFamily, ppt: Endpoint) -> Result<Endpoint> {
    let Some(lambda) = ppt.value.filter(|v| v.is_finite()) else { return Ok(Endpoint::unresolved()) };
    let x = f.state_at(lambda);
    let strategy = match f.spectrum() {
        Some(spectrum) => SeparabilityStrategy::Certificate(spectrum.clone()),
        None => SeparabilityStrategy::LowDim,
    };
    let verdict = separability_oracle(&x, &strategy)?;
    let method = match (verdict.status, &strategy) {
        (Status::In, SeparabilityStrategy::LowDim) => Method::Spectral,
        (Status::In, _) => Method::Certified,
        _ => return Ok(Endpoint::unresolved()),
    };
    Ok(Endpoint::known(lambda, method, ppt.tol))
}

fn blockpositive_endpoint(
    f: &OneParamFamily,
    k: usize,
    options: &ReportOptions,
    direction: Direction,
    inside: f64,
) -> Result<Endpoint> {
    let cfg = options.seesaw;
    let oracle = move |x: &BipartiteOperator| is_blockpositive_k(x, k, &cfg);
    let resolved = seed_bracket(f, &oracle, direction, inside)
        .and_then(|bracket| bisect_endpoint(f, &oracle, direction, bracket, options.seesaw_tol));
    match resolved {
        Ok(value) => Ok(Endpoint::known(value, Method::Bisection, options.seesaw_tol)),
        Err(Error::OracleUnknown { .. }) | Err(Error::InvalidBracket(_)) => Ok(Endpoint::unresolved()),
        Err(e) => Err(e),
    }
}

fn assemble(cone: Cone, f: &OneParamFamily, minus: Endpoint, plus: Endpoint, dual: (Endpoint, Endpoint)) -> Result<IntervalReport> {
    let (dual_minus, dual_plus) = dual;
    Ok(IntervalReport {
        cone,
        gamma_minus: minus,
        gamma_plus: plus,
        tilde_minus: dual_plus.dual(f)?,
        tilde_plus: dual_minus.dual(f)?,
    })
}

/// Every interval along `f` for the density, PPT, Schmidt-number-`k` and
/// `k`-blockpositive cones (plus `k = 1` when `k > 1`).
pub fn full_report_with(f: &OneParamFamily, options: &ReportOptions) -> Result<FamilyReport> {
    let dims = f.dims();
    check_rank(dims, options.k)?;
    options.seesaw.validate()?;
    let full_rank = dims.min_factor();

    let (d_minus, d_plus) = spectral_pair(f, Transform::Identity)?;
    let (t_minus, t_plus) = spectral_pair(f, Transform::PartialTranspose)?;
    let p_minus = if t_minus.value > d_minus.value { t_minus } else { d_minus };
    let p_plus = if t_plus.value < d_plus.value { t_plus } else { d_plus };

    let mut cones = vec![
        assemble(Cone::Density, f, d_minus, d_plus, (d_minus, d_plus))?,
        IntervalReport {
            cone: Cone::Ppt,
            gamma_minus: p_minus,
            gamma_plus: p_plus,
            // The dual of PPT is the decomposable cone, whose interval is not computed.
            tilde_minus: Endpoint::unresolved(),
            tilde_plus: Endpoint::unresolved(),
        },
    ];

    let mut ks = vec![1];
    if options.k > 1 {
        ks.push(options.k);
    }
    let closed = match (options.prefer_closed_forms, f.spectrum()) {
        (true, Some(spectrum)) => Some(closed_forms_pure(spectrum)?),
        _ => None,
    };
    for k in ks {
        let (s_minus, s_plus) = if k == full_rank {
            (d_minus, d_plus)
        } else if k == 1 {
            (certified_separable(f, p_minus)?, certified_separable(f, p_plus)?)
        } else {
            (Endpoint::unresolved(), Endpoint::unresolved())
        };
        let (b_minus, b_plus) = if k == full_rank {
            (d_minus, d_plus)
        } else if let (Some(forms), 1) = (&closed, k) {
            (Endpoint::known(forms.beta_minus, Method::ClosedForm, 0.0), Endpoint::known(forms.delta_plus, Method::ClosedForm, 0.0))
        } else {
            let inside_minus = d_minus.value.expect("spectral endpoints are resolved");
            let inside_plus = d_plus.value.expect("spectral endpoints are resolved");
            (
                blockpositive_endpoint(f, k, options, Direction::Minus, inside_minus)?,
                blockpositive_endpoint(f, k, options, Direction::Plus, inside_plus)?,
            )
        };
        cones.push(assemble(Cone::SchmidtNumber(k), f, s_minus, s_plus, (b_minus, b_plus))?);
        cones.push(assemble(Cone::BlockPositive(k), f, b_minus, b_plus, (s_minus, s_plus))?);
    }

    let report = FamilyReport {
        label: options.label.clone(),
        m: dims.m(),
        n: dims.n(),
        k: options.k,
        pure: f.spectrum().is_some(),
        cones,
        transposed_states: (t_minus, t_plus),
    };
    check_report_chain(&report)?;
    Ok(report)
}

pub fn full_report(f: &OneParamFamily, k: usize, cfg: &SeeSawConfig) -> Result<FamilyReport> {
    full_report_with(f, &ReportOptions::new(k, *cfg))
}

fn check_report_chain(report: &FamilyReport) -> Result<()> {
    let ks: Vec<usize> = report
        .cones
        .iter()
        .filter_map(|c| if let Cone::SchmidtNumber(k) = c.cone { Some(k) } else { None })
        .collect();
    for k in ks {
        let s = report.cone(Cone::SchmidtNumber(k)).expect("present");
        let b = report.cone(Cone::BlockPositive(k)).expect("present");
        let row = TheoremRow([
            b.tilde_minus.value,
            b.gamma_minus.value,
            s.gamma_minus.value,
            s.tilde_minus.value,
            s.gamma_plus.value,
            s.tilde_plus.value,
            b.gamma_plus.value,
            b.tilde_plus.value,
        ]);
        let slack = [b.tilde_minus, b.gamma_minus, s.gamma_minus, s.gamma_plus, b.gamma_plus, b.tilde_plus]
            .iter()
            .filter(|e| e.is_resolved())
            .map(|e| e.tol)
            .fold(CHAIN_SLACK, |acc, t| acc + t);
        row.check_chain(slack)?;
    }
    for c in &report.cones {
        for (lo, hi) in [(c.tilde_minus, c.gamma_minus), (c.gamma_plus, c.tilde_plus)] {
            if let (Some(a), Some(b)) = (lo.value, hi.value) {
                if a > b + lo.tol + hi.tol + CHAIN_SLACK {
                    return Err(Error::ChainViolated(format!("{}: {a} > {b}", c.cone)));
                }
            }
        }
    }
    Ok(())
}
