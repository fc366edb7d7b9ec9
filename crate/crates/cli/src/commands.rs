//! The subcommands. Each returns an exit code; errors carry their own.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use schmidt_frontier::decomposition::{
    beta_witness_decomposition, decompose_delta_minus, decompose_sigma_plus, verify_decomposition, witness_bundle,
    BetaWitnessDecomposition, ProductDecomposition, RECONSTRUCTION_TOL, REMAINDER_TOL,
};
use schmidt_frontier::intervals::{
    closed_form_diag2qubit, closed_form_projection, closed_forms_pure, format_endpoint, full_report_with, Cone,
    Endpoint, FamilyReport, ReportOptions, TheoremRow,
};
use schmidt_frontier::seesaw::min_schmidt_k_expectation;
use schmidt_frontier::tensor::SchmidtSpectrum;

use crate::config::{parse_pair, CertifyTarget, Command, FamilySource, Format, RunConfig};
use crate::{CliError, EXIT_FAILED, EXIT_OK, EXIT_UNRESOLVED};

/// Default acceptance tolerance of `theorem-table`.
pub const THEOREM_TABLE_TOL: f64 = 1e-3;

pub fn dispatch(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::TheoremTable(args) => cmd_theorem_table(&RunConfig::from_args(args)?, stdout),
        Command::Intervals(args) => cmd_intervals(&RunConfig::from_args(args)?, stdout),
        Command::Certify { common, target, verify } => {
            let cfg = RunConfig::from_args(common)?;
            match (target, verify) {
                (_, Some(path)) => cmd_verify(path, stdout, stderr),
                (Some(target), None) => cmd_certify(&cfg, *target, stdout, stderr),
                (None, None) => Err(CliError::usage("certify needs --target or --verify")),
            }
        }
        Command::Witness { common, pair } => cmd_witness(&RunConfig::from_args(common)?, parse_pair(pair)?, stdout),
        Command::Pairing { common, nu, lambda } => cmd_pairing(&RunConfig::from_args(common)?, *nu, *lambda, stdout),
    }
}

/// Writes to `--out` when given, otherwise to stdout.
fn emit(cfg: &RunConfig, content: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => std::fs::write(path, content)?,
        None => stdout.write_all(content.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn csv_text(rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.write_record(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::failed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::failed(e.to_string()))
}

fn row_values(row: &TheoremRow) -> Vec<Value> {
    row.0.iter().map(|v| v.map_or(Value::Null, |x| json!(x))).collect()
}

pub fn cmd_theorem_table(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let spectrum = cfg.require_spectrum()?;
    let tol = cfg.tol.unwrap_or(THEOREM_TABLE_TOL);
    let closed = closed_forms_pure(spectrum)?.row();
    let family = cfg.family()?;
    let options = ReportOptions { label: cfg.label(), ..ReportOptions::new(1, cfg.seesaw()) };
    let numeric = full_report_with(&family, &options)?.theorem_row();
    let discrepancy = numeric.max_discrepancy(&closed);
    let code = match discrepancy {
        None => EXIT_UNRESOLVED,
        Some(d) if d <= tol => EXIT_OK,
        Some(_) => EXIT_FAILED,
    };

    let content = match cfg.format {
        Format::Json => to_json(&json!({
            "family": cfg.label(),
            "columns": TheoremRow::COLUMNS,
            "closed_form": row_values(&closed),
            "numeric": row_values(&numeric),
            "max_discrepancy": discrepancy,
            "tol": tol,
            "passed": code == EXIT_OK,
        }))?,
        Format::Csv => {
            let mut header = vec!["family".to_string(), "row".to_string()];
            header.extend(TheoremRow::COLUMNS.iter().map(|c| c.to_string()));
            let line = |name: &str, row: &TheoremRow| {
                let mut r = vec![cfg.label(), name.to_string()];
                r.extend(row.0.iter().map(|v| format_endpoint(*v)));
                r
            };
            let gaps = TheoremRow(std::array::from_fn(|i| Some((numeric.0[i]? - closed.0[i]?).abs())));
            csv_text(&[header, line("closed_form", &closed), line("numeric", &numeric), line("abs_diff", &gaps)])?
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "family: {}", cfg.label()).unwrap();
            write!(out, "{:<12}", "").unwrap();
            for c in TheoremRow::COLUMNS {
                write!(out, " {c:>17}").unwrap();
            }
            out.push('\n');
            for (name, row) in [("closed_form", &closed), ("numeric", &numeric)] {
                write!(out, "{name:<12}").unwrap();
                for v in row.0 {
                    write!(out, " {:>17}", v.map_or("unresolved".to_string(), |x| format!("{x:.10}"))).unwrap();
                }
                out.push('\n');
            }
            match discrepancy {
                Some(d) => writeln!(out, "max discrepancy {d:.3e} (tol {tol:.1e}): {}", if code == EXIT_OK { "ok" } else { "FAIL" }),
                None => writeln!(out, "unresolved endpoints in the numeric row"),
            }
            .unwrap();
            out
        }
    };
    emit(cfg, &content, stdout)?;
    Ok(code)
}

fn closed_form_summary(cfg: &RunConfig) -> Result<Value, CliError> {
    Ok(match cfg.require_source()? {
        FamilySource::Pure(s) => {
            let forms = closed_forms_pure(s)?;
            json!({ "columns": TheoremRow::COLUMNS, "values": row_values(&forms.row()) })
        }
        FamilySource::Projection { dims, d } => {
            let (dm, dp, tm, tp) = closed_form_projection(*d, dims.m(), dims.n())?;
            json!({ "delta_minus": dm, "delta_plus": dp, "delta_tilde_minus": tm, "delta_tilde_plus": tp })
        }
        FamilySource::Diag2Qubit(p) => {
            let (b, s) = closed_form_diag2qubit(*p)?;
            json!({ "beta_minus": b, "sigma_tilde_minus": s })
        }
        FamilySource::Matrix(_) => Value::Null,
    })
}

fn is_isotropic(cfg: &RunConfig) -> bool {
    match &cfg.source {
        Some(FamilySource::Pure(s)) => {
            let iso = SchmidtSpectrum::isotropic(s.len()).expect("length ≥ 1");
            s.coefficients().iter().zip(iso.coefficients()).all(|(a, b)| (a - b).abs() <= 1e-12)
        }
        _ => false,
    }
}

fn endpoint_cell(e: &Endpoint) -> String {
    match e.value {
        None => "unresolved".into(),
        Some(v) => format!("{} ({:?})", format_endpoint(Some(v)), e.method).to_lowercase(),
    }
}

fn report_text(cfg: &RunConfig, report: &FamilyReport, closed: &Value) -> String {
    let mut out = String::new();
    writeln!(out, "family: {} ({}x{}, k = {})", report.label, report.m, report.n, report.k).unwrap();
    writeln!(out, "{:<20} {:>34} {:>34} {:>34} {:>34}", "cone", "gamma_minus", "gamma_plus", "tilde_minus", "tilde_plus")
        .unwrap();
    for c in &report.cones {
        writeln!(
            out,
            "{:<20} {:>34} {:>34} {:>34} {:>34}",
            c.cone.to_string(),
            endpoint_cell(&c.gamma_minus),
            endpoint_cell(&c.gamma_plus),
            endpoint_cell(&c.tilde_minus),
            endpoint_cell(&c.tilde_plus)
        )
        .unwrap();
    }
    if cfg.gamma {
        let (lo, hi) = report.transposed_states;
        let name = if is_isotropic(cfg) { "Werner family" } else { "partial-transpose family" };
        writeln!(
            out,
            "{name}: X_lambda^T is a state for {} <= lambda <= {}",
            format_endpoint(lo.value),
            format_endpoint(hi.value)
        )
        .unwrap();
    }
    if !closed.is_null() {
        writeln!(out, "closed form: {closed}").unwrap();
    }
    out
}

pub fn cmd_intervals(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let family = cfg.family()?;
    let mut options = ReportOptions { label: cfg.label(), ..ReportOptions::new(cfg.k, cfg.seesaw()) };
    if let Some(tol) = cfg.tol {
        options.seesaw_tol = tol;
    }
    let report = full_report_with(&family, &options)?;
    let closed = closed_form_summary(cfg)?;
    let content = match cfg.format {
        Format::Json => {
            let mut value = json!({ "report": report, "closed_form": closed });
            if !cfg.gamma {
                value["report"].as_object_mut().expect("object").remove("transposed_states");
            }
            to_json(&value)?
        }
        Format::Csv => csv_text(&[FamilyReport::csv_header(), report.csv_record()])?,
        Format::Text => report_text(cfg, &report, &closed),
    };
    emit(cfg, &content, stdout)?;
    // The dual of the PPT cone is never computed, so it does not count.
    let unresolved = report.cones.iter().filter(|c| c.cone != Cone::Ppt).any(|c| {
        [c.gamma_minus, c.gamma_plus, c.tilde_minus, c.tilde_plus].iter().any(|e| !e.is_resolved())
    });
    Ok(if unresolved { EXIT_UNRESOLVED } else { EXIT_OK })
}

fn check_beta(b: &BetaWitnessDecomposition) -> (f64, f64, bool) {
    let residual = b.residual();
    let min = b.min_diagonal();
    (residual, min, residual <= RECONSTRUCTION_TOL && min >= REMAINDER_TOL)
}

pub fn cmd_certify(
    cfg: &RunConfig,
    target: CertifyTarget,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32, CliError> {
    let spectrum = cfg.require_spectrum()?;
    let (certificate, summary) = match target {
        CertifyTarget::SigmaPlus | CertifyTarget::DeltaMinus => {
            let d = match target {
                CertifyTarget::SigmaPlus => decompose_sigma_plus(spectrum)?,
                _ => decompose_delta_minus(spectrum)?,
            };
            let text = to_json(&d)?;
            // Check what will actually be written, not the in-memory value.
            let report = verify_decomposition(&serde_json::from_str::<ProductDecomposition>(&text)?);
            if !report.passed() {
                writeln!(stderr, "verification failed: {}", serde_json::to_string(&report)?)?;
                return Ok(EXIT_FAILED);
            }
            let summary = format!(
                "verified separable decomposition: {} product terms, residual {:.3e}, min remainder {:.3e}\n",
                d.terms().len(),
                report.residual,
                report.min_remainder
            );
            (text, summary)
        }
        CertifyTarget::BetaWitness => {
            let b = beta_witness_decomposition(spectrum)?;
            let text = to_json(&b)?;
            let (residual, min, ok) = check_beta(&serde_json::from_str(&text)?);
            if !ok {
                writeln!(stderr, "verification failed: residual {residual:e}, min diagonal {min:e}")?;
                return Ok(EXIT_FAILED);
            }
            let cells: Vec<String> = b.diagonal.iter().map(|x| format!("{x:.6}")).collect();
            let summary = format!(
                "verified witness decomposition: scale {:.6}, {} pair terms, residual {residual:.3e}, D = [{}]\n",
                b.scale,
                b.terms.len(),
                cells.join(", ")
            );
            (text, summary)
        }
    };
    match (&cfg.out, cfg.format) {
        (Some(path), _) => {
            std::fs::write(path, &certificate)?;
            stdout.write_all(summary.as_bytes())?;
        }
        (None, Format::Json) => stdout.write_all(certificate.as_bytes())?,
        (None, _) => stdout.write_all(summary.as_bytes())?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(path: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let malformed = |e: serde_json::Error| CliError::usage(format!("{}: {e}", path.display()));
    let (passed, line) = if value.get("remainder").is_some() {
        let d: ProductDecomposition = serde_json::from_value(value).map_err(malformed)?;
        let report = verify_decomposition(&d);
        (report.passed(), serde_json::to_string(&report)?)
    } else if value.get("scale").is_some() {
        let b: BetaWitnessDecomposition = serde_json::from_value(value).map_err(malformed)?;
        let (residual, min, ok) = check_beta(&b);
        (ok, json!({ "residual": residual, "min_diagonal": min }).to_string())
    } else {
        return Err(CliError::usage(format!("{} is not a certificate", path.display())));
    };
    if passed {
        writeln!(stdout, "PASS {line}")?;
        Ok(EXIT_OK)
    } else {
        writeln!(stderr, "FAIL {line}")?;
        Ok(EXIT_FAILED)
    }
}

pub fn cmd_witness(cfg: &RunConfig, pair: (usize, usize), stdout: &mut dyn Write) -> Result<i32, CliError> {
    let spectrum = cfg.require_spectrum()?;
    let bundle = witness_bundle(spectrum, pair.0, pair.1)?;
    let seesaw = cfg.seesaw();
    let top = spectrum.len().min(2);
    let margins: Vec<(usize, f64)> = (1..=top)
        .map(|k| Ok((k, min_schmidt_k_expectation(&bundle.witness, k, &seesaw)?.value)))
        .collect::<Result<_, CliError>>()?;
    let content = match cfg.format {
        Format::Json => to_json(&json!({
            "pair": [bundle.pair.0, bundle.pair.1],
            "nu": bundle.nu,
            "hyperplane_residual": bundle.residual,
            "margins": margins.iter().map(|(k, v)| json!({ "k": k, "min_expectation": v })).collect::<Vec<_>>(),
            "witness": bundle.witness,
        }))?,
        Format::Csv => {
            let mut header = vec!["i".to_string(), "j".into(), "nu".into(), "hyperplane_residual".into()];
            let mut row = vec![pair.0.to_string(), pair.1.to_string(), format!("{}", bundle.nu), format!("{}", bundle.residual)];
            for (k, v) in &margins {
                header.push(format!("margin_k{k}"));
                row.push(format!("{v}"));
            }
            csv_text(&[header, row])?
        }
        Format::Text => {
            let mut out = format!(
                "pair ({}, {}): nu = {:.12}, hyperplane residual {:.3e}\n",
                pair.0, pair.1, bundle.nu, bundle.residual
            );
            for (k, v) in &margins {
                writeln!(out, "min over Schmidt rank <= {k}: {v:.12}").unwrap();
            }
            out
        }
    };
    emit(cfg, &content, stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_pairing(cfg: &RunConfig, nu: f64, lambda: Option<f64>, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let family = cfg.family()?;
    let partner = family.orthogonal_partner(nu)?;
    let pairing = lambda.map(|l| family.pairing(nu, l));
    let content = match cfg.format {
        Format::Json => to_json(&json!({ "nu": nu, "partner": partner, "lambda": lambda, "pairing": pairing }))?,
        Format::Csv => csv_text(&[
            vec!["nu".into(), "partner".into(), "lambda".into(), "pairing".into()],
            vec![
                format!("{nu}"),
                format!("{partner}"),
                lambda.map_or(String::new(), |l| format!("{l}")),
                pairing.map_or(String::new(), |p| format!("{p}")),
            ],
        ])?,
        Format::Text => {
            let mut out = format!("orthogonal partner of nu = {nu}: {partner:.15}\n");
            if let (Some(l), Some(p)) = (lambda, pairing) {
                writeln!(out, "<X_nu|X_lambda> at lambda = {l}: {p:.15}").unwrap();
            }
            out
        }
    };
    emit(cfg, &content, stdout)?;
    Ok(EXIT_OK)
}
