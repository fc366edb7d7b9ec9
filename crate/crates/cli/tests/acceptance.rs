//! Acceptance gate: every criterion at its stated tolerance, one line each.
//! Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schmidt_frontier::decomposition::{
    beta_witness_decomposition, decompose_delta_minus, decompose_sigma_plus, verify_decomposition, REMAINDER_TOL,
};
use schmidt_frontier::family::OneParamFamily;
use schmidt_frontier::intervals::{
    closed_form_diag2qubit, closed_forms_pure, diag2qubit_state, full_report, spectral_interval, Cone, FamilyReport,
    Transform,
};
use schmidt_frontier::oracles::{
    is_blockpositive_k, is_density, is_ppt, separability_oracle, Certificate, SeparabilityStrategy, Status,
};
use schmidt_frontier::random::{random_hermitian, random_spectrum, random_state, random_subspace_projections};
use schmidt_frontier::seesaw::{min_schmidt_k_expectation, SeeSawConfig};
use schmidt_frontier::tensor::{hs_inner, partial_transpose, BipartiteOperator, Dims, SchmidtSpectrum};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spectra_for(n: usize) -> Vec<(String, SchmidtSpectrum)> {
    let mut out = vec![
        ("isotropic".to_string(), SchmidtSpectrum::isotropic(n).unwrap()),
        ("product".to_string(), SchmidtSpectrum::product(n).unwrap()),
    ];
    for seed in 0..3u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 * n as u64 + seed);
        out.push((format!("random#{seed}"), random_spectrum(n, &mut rng)));
    }
    out
}

struct PureCase {
    name: String,
    family: OneParamFamily,
    spectrum: SchmidtSpectrum,
    report: FamilyReport,
}

/// Columns fed by the k = 1 see-saw bisection, directly or through duality.
const SEESAW_COLUMNS: [usize; 4] = [1, 3, 5, 6];
const SEESAW_TOL: f64 = 1e-3;
const EXACT_TOL: f64 = 1e-9;

fn criterion_1(cases: &mut Vec<PureCase>) -> Outcome {
    let start = Instant::now();
    let cfg = SeeSawConfig::default();
    let (mut worst_exact, mut worst_seesaw) = (0.0f64, 0.0f64);
    for n in 2..=4 {
        for (name, spectrum) in spectra_for(n) {
            let family = OneParamFamily::pure(&spectrum).map_err(|e| e.to_string())?;
            let report = full_report(&family, 1, &cfg).map_err(|e| format!("n={n} {name}: {e}"))?;
            let numeric = report.theorem_row().0;
            let closed = closed_forms_pure(&spectrum).map_err(|e| e.to_string())?.row().0;
            for col in 0..8 {
                let got = numeric[col].ok_or_else(|| format!("n={n} {name}: column {col} unresolved"))?;
                let want = closed[col].unwrap();
                let gap = (got - want).abs();
                let (tol, worst) =
                    if SEESAW_COLUMNS.contains(&col) { (SEESAW_TOL, &mut worst_seesaw) } else { (EXACT_TOL, &mut worst_exact) };
                *worst = worst.max(gap);
                ensure(gap <= tol, || format!("n={n} {name}: column {col} off by {gap:e} (tol {tol:e})"))?;
            }
            cases.push(PureCase { name: format!("n={n} {name}"), family, spectrum, report });
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}, budget 60 s"))?;
    Ok(format!(
        "15 families, worst exact gap {worst_exact:.1e}, worst see-saw gap {worst_seesaw:.1e}, {:.2} s",
        elapsed.as_secs_f64()
    ))
}

fn criterion_2(cases: &[PureCase]) -> Outcome {
    ensure(!cases.is_empty(), || "no families from criterion 1".into())?;
    let mut worst = 0.0f64;
    for case in cases {
        let closed = closed_forms_pure(&case.spectrum).map_err(|e| e.to_string())?;
        let row = case.report.theorem_row().0.map(|v| v.unwrap());
        let pairs = [
            (closed.beta_tilde_minus, closed.sigma_plus),
            (closed.beta_minus, closed.sigma_tilde_plus),
            (row[0], row[4]),
            (row[1], row[5]),
        ];
        for (a, b) in pairs {
            let value = case.family.pairing(a, b).abs();
            worst = worst.max(value);
            ensure(value <= 1e-10, || format!("{}: pairing({a}, {b}) = {value:e}", case.name))?;
        }
    }
    Ok(format!("{} families, worst |pairing| {worst:.1e}", cases.len()))
}

fn criterion_3() -> Outcome {
    let mut summary = Vec::new();
    for n in 2..=6 {
        let mut rng = ChaCha8Rng::seed_from_u64(300 + n as u64);
        for (kind, spectrum) in [("random", random_spectrum(n, &mut rng)), ("isotropic", SchmidtSpectrum::isotropic(n).unwrap())] {
            let start = Instant::now();
            let sigma = decompose_sigma_plus(&spectrum).map_err(|e| format!("n={n} σ⁺: {e}"))?;
            let elapsed = start.elapsed();
            let delta = decompose_delta_minus(&spectrum).map_err(|e| format!("n={n} δ⁻: {e}"))?;
            for (name, d) in [("sigma_plus", &sigma), ("delta_minus", &delta)] {
                let r = verify_decomposition(d);
                ensure(r.residual <= 1e-10 && r.min_remainder >= -1e-12 && r.all_rank_one && r.passed(), || {
                    format!("n={n} {name}: {r:?}")
                })?;
            }
            let expected_terms = 4usize.pow((n - 1) as u32);
            ensure(sigma.terms().len() == expected_terms, || {
                format!("n={n}: {} σ⁺ terms, expected {expected_terms}", sigma.terms().len())
            })?;
            if n == 6 {
                ensure(elapsed < Duration::from_secs(10), || format!("n=6 σ⁺ took {elapsed:?}"))?;
                summary.push(format!("n=6 {kind} σ⁺ {} terms in {:.3} s", sigma.terms().len(), elapsed.as_secs_f64()));
            }
        }
    }
    Ok(format!("n = 2..6 verified; {}", summary.join(", ")))
}

fn criterion_4() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for n in 2..=4 {
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(4000 + 100 * n as u64 + seed);
            let spectrum = random_spectrum(n, &mut rng);
            let b = beta_witness_decomposition(&spectrum).map_err(|e| format!("n={n} seed {seed}: {e}"))?;
            ensure(b.residual() <= 1e-10, || format!("n={n} seed {seed}: residual {:e}", b.residual()))?;
            ensure(b.min_diagonal() >= REMAINDER_TOL, || format!("n={n} seed {seed}: D min {:e}", b.min_diagonal()))?;
            worst = worst.min(b.min_diagonal());
            count += 1;
        }
    }
    Ok(format!("{count} spectra, smallest D entry {worst:.3e}"))
}

fn criterion_5() -> Outcome {
    for p in [0.6, 0.75, 0.9] {
        let (beta, sigma_tilde) = closed_form_diag2qubit(p).map_err(|e| e.to_string())?;
        ensure(sigma_tilde < beta, || format!("p={p}: {sigma_tilde} ≮ {beta}"))?;
        let f = OneParamFamily::new(diag2qubit_state(p).unwrap()).unwrap();
        let corner = BipartiteOperator::diagonal(f.dims(), &[0.0, 0.0, 0.0, 1.0]).unwrap();
        let side = f.side_value(sigma_tilde, &corner).unwrap();
        ensure(side.abs() <= 1e-12, || format!("p={p}: ⟨|11⟩⟨11| − X_ν|ϱ⟩ = {side:e}"))?;
    }
    Ok("p ∈ {0.6, 0.75, 0.9}".into())
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let shapes = [(2, 2), (2, 3), (3, 3)];
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let (m, n) = shapes[trial % 3];
        let dims = Dims::new(m, n).unwrap();
        let d = rng.random_range(1..m * n);
        let (e, perp) = random_subspace_projections(dims, d, &mut rng);
        let f = OneParamFamily::new(e).map_err(|e| e.to_string())?;
        let (lo, hi) = spectral_interval(&f, Transform::Identity).map_err(|e| e.to_string())?;
        let want = -(d as f64) / (m * n - d) as f64;
        let gaps = [(lo - want).abs(), (hi - 1.0).abs(), f.state_at(lo).max_abs_diff(&perp)];
        worst = gaps.iter().copied().fold(worst, f64::max);
        ensure(gaps.iter().all(|g| *g <= 1e-10), || format!("trial {trial} ({m}x{n}, d={d}): gaps {gaps:?}"))?;
    }
    Ok(format!("10 subspaces, worst gap {worst:.1e}"))
}

/// `min ⟨a⊗b|X|a⊗b⟩` on two qubits by an angle grid plus compass refinement.
fn grid_product_min(x: &BipartiteOperator) -> f64 {
    let eval = |t: [f64; 4]| {
        let a = [Complex64::new(t[0].cos(), 0.0), Complex64::from_polar(t[0].sin(), t[1])];
        let b = [Complex64::new(t[2].cos(), 0.0), Complex64::from_polar(t[2].sin(), t[3])];
        let v: Vec<Complex64> = (0..4).map(|i| a[i / 2] * b[i % 2]).collect();
        let m = x.matrix();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                acc += v[r].conj() * m[(r, c)] * v[c];
            }
        }
        acc.re
    };
    let steps = 16;
    let mut seeds: Vec<(f64, [f64; 4])> = Vec::new();
    for i in 0..=steps {
        for j in 0..steps {
            for k in 0..=steps {
                for l in 0..steps {
                    let t = [
                        std::f64::consts::FRAC_PI_2 * i as f64 / steps as f64,
                        std::f64::consts::TAU * j as f64 / steps as f64,
                        std::f64::consts::FRAC_PI_2 * k as f64 / steps as f64,
                        std::f64::consts::TAU * l as f64 / steps as f64,
                    ];
                    seeds.push((eval(t), t));
                }
            }
        }
    }
    seeds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = f64::INFINITY;
    for (mut value, mut t) in seeds.into_iter().take(8) {
        let mut step = 0.2;
        while step > 1e-9 {
            let mut moved = false;
            for axis in 0..4 {
                for sign in [-1.0, 1.0] {
                    let mut trial = t;
                    trial[axis] += sign * step;
                    let v = eval(trial);
                    if v < value {
                        value = v;
                        t = trial;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        best = best.min(value);
    }
    best
}

fn criterion_7(cases: &[PureCase]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // Pairing affine identity.
    for trial in 0..100 {
        let n = 2 + trial % 3;
        let f = OneParamFamily::pure(&random_spectrum(n, &mut rng)).unwrap();
        let (nu, lambda) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let direct = hs_inner(&f.state_at(nu), &f.state_at(lambda)).unwrap();
        let gap = (f.pairing(nu, lambda) - direct).abs();
        ensure(gap <= 1e-12, || format!("pairing identity off by {gap:e}"))?;
    }

    // Partial-transpose isometry and involution.
    for trial in 0..100 {
        let dims = if trial % 2 == 0 { Dims::square(2).unwrap() } else { Dims::square(3).unwrap() };
        let x = random_hermitian(dims, &mut rng);
        let t = partial_transpose(&x);
        let norms = (hs_inner(&x, &x).unwrap() - hs_inner(&t, &t).unwrap()).abs();
        ensure(norms <= 1e-12 && partial_transpose(&t).max_abs_diff(&x) == 0.0, || "partial transpose".into())?;
    }

    // See-saw against an independent grid on two qubits.
    let cfg = SeeSawConfig::default();
    let mut worst_grid = 0.0f64;
    for _ in 0..5 {
        let x = random_hermitian(Dims::square(2).unwrap(), &mut rng);
        let seesaw = min_schmidt_k_expectation(&x, 1, &cfg).unwrap().value;
        let grid = grid_product_min(&x);
        worst_grid = worst_grid.max((seesaw - grid).abs());
        ensure((seesaw - grid).abs() <= 1e-6, || format!("see-saw {seesaw} vs grid {grid}"))?;
    }

    // Chain inequality on every report.
    for case in cases {
        let s = case.report.cone(Cone::SchmidtNumber(1)).unwrap();
        let b = case.report.cone(Cone::BlockPositive(1)).unwrap();
        let slack = [b.tilde_minus, b.gamma_minus, s.gamma_minus, s.gamma_plus, b.gamma_plus, b.tilde_plus]
            .iter()
            .map(|e| e.tol)
            .sum::<f64>()
            + 1e-10;
        case.report.theorem_row().check_chain(slack).map_err(|e| format!("{}: {e}", case.name))?;
    }

    // Certificate soundness on every Out verdict.
    let mut outs = 0;
    for trial in 0..40 {
        let dims = [Dims::square(2).unwrap(), Dims::new(2, 3).unwrap(), Dims::square(3).unwrap()][trial % 3];
        let f = OneParamFamily::pure(&random_spectrum(dims.m().min(dims.n()), &mut rng));
        let candidates: Vec<BipartiteOperator> = match f {
            Ok(f) if dims.m() == dims.n() => vec![f.state_at(rng.random_range(-1.0..1.5))],
            _ => vec![],
        };
        let state = random_state(dims, &mut rng);
        let mut pool = candidates;
        pool.push(state.clone());
        let mixed = &(&state * 0.3) + &(&BipartiteOperator::maximally_mixed(dims) * 0.7);
        pool.push(mixed);
        for x in pool {
            let mut verdicts = vec![is_density(&x).unwrap(), is_blockpositive_k(&x, 1, &cfg).unwrap()];
            if verdicts[0].is_in() {
                verdicts.push(is_ppt(&x).unwrap());
                let search = SeparabilityStrategy::WitnessSearch { candidates: vec![], cfg };
                verdicts.push(separability_oracle(&x, &search).unwrap());
            }
            for v in verdicts.iter().filter(|v| v.is_out()) {
                outs += 1;
                ensure(v.verify(&x).unwrap(), || format!("unsound Out certificate {:?}", v.certificate))?;
            }
        }
    }

    // Byte-for-byte determinism of the command line.
    for args in [
        &["schmidt-frontier", "intervals", "--spectrum", "0.5,0.3,0.2", "--format", "json"][..],
        &["schmidt-frontier", "theorem-table", "--n", "3", "--format", "csv", "--seed", "11"][..],
        &["schmidt-frontier", "certify", "--target", "delta-minus", "--n", "3", "--format", "json"][..],
    ] {
        let once = || {
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let code = schmidt_frontier_cli::run(args.iter().copied(), &mut out, &mut err);
            (code, out, err)
        };
        let (a, b) = (once(), once());
        ensure(a == b, || format!("{args:?} is not deterministic"))?;
    }

    Ok(format!("pairing, Γ isometry, grid (worst {worst_grid:.1e}), chain, {outs} Out certificates, determinism"))
}

fn criterion_8(criterion_1_passed: bool) -> Outcome {
    // A non-PSD 1-blockpositive matrix: its In verdict must be flagged heuristic.
    let s = SchmidtSpectrum::from_squared(&[0.5, 0.3, 0.2], 1e-12).unwrap();
    let f = OneParamFamily::pure(&s).unwrap();
    let forms = closed_forms_pure(&s).unwrap();
    let x = f.state_at(0.5 * (forms.beta_minus + forms.delta_minus));
    let lax = is_blockpositive_k(&x, 1, &SeeSawConfig::default()).unwrap();
    let strict = is_blockpositive_k(&x, 1, &SeeSawConfig { strict: true, ..SeeSawConfig::default() }).unwrap();
    ensure(lax.is_in() && lax.certificate == Certificate::named("see-saw-nonnegative"), || format!("{lax:?}"))?;
    ensure(strict.status == Status::Unknown, || format!("strict verdict {:?}", strict.status))?;
    ensure(criterion_1_passed, || "heuristic In verdicts are only accepted through criterion 1".into())?;
    Ok("k < m∧n In verdicts are tagged heuristic (Unknown under strict) and validated via criterion 1".into())
}

fn main() {
    let mut cases = Vec::new();
    let c1 = criterion_1(&mut cases);
    let c1_ok = c1.is_ok();
    let results: Vec<(usize, &str, Outcome)> = vec![
        (1, "endpoint table reproduction", c1),
        (2, "duality zeros", criterion_2(&cases)),
        (3, "separability certificates", criterion_3()),
        (4, "witness decomposition diagonal", criterion_4()),
        (5, "two-qubit diagonal example", criterion_5()),
        (6, "projection families", criterion_6()),
        (7, "property suites", criterion_7(&cases)),
        (8, "heuristic verdicts acknowledged", criterion_8(c1_ok)),
    ];
    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {id} ({name}): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL criterion {id} ({name}): {reason}");
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
