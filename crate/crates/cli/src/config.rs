//! Command-line arguments and their validation into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use schmidt_frontier::family::OneParamFamily;
use schmidt_frontier::intervals::diag2qubit_state;
use schmidt_frontier::random::random_subspace_projections;
use schmidt_frontier::seesaw::SeeSawConfig;
use schmidt_frontier::tensor::{BipartiteOperator, Dims, SchmidtSpectrum};

use crate::CliError;

/// Sum tolerance applied to a user-supplied spectrum before renormalizing.
pub const SPECTRUM_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "schmidt-frontier", version, about = "Intervals, witnesses and separability certificates along lines through the maximally mixed state")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form and numeric endpoint rows for a pure Schmidt-form family.
    TheoremTable(CommonArgs),
    /// Full interval report for a family.
    Intervals(CommonArgs),
    /// Build or check a separability / witness certificate.
    Certify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        target: Option<CertifyTarget>,
        /// Verify an existing certificate file instead of building one.
        #[arg(long, value_name = "FILE")]
        verify: Option<PathBuf>,
    },
    /// The witness attached to a pair of Schmidt indices.
    Witness {
        #[command(flatten)]
        common: CommonArgs,
        /// Indices `i,j` with `i > j`.
        #[arg(long, default_value = "1,0")]
        pair: String,
    },
    /// Pairing `⟨X_ν|X_λ⟩` and the orthogonal partner of `ν`.
    Pairing {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertifyTarget {
    SigmaPlus,
    DeltaMinus,
    BetaWitness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Local dimension of the second factor (Schmidt length for pure families).
    #[arg(long)]
    pub n: Option<usize>,
    /// Local dimension of the first factor; defaults to `n`.
    #[arg(long)]
    pub m: Option<usize>,
    /// Comma-separated squared Schmidt coefficients (`a/b` fractions allowed).
    #[arg(long, allow_hyphen_values = true)]
    pub spectrum: Option<String>,
    /// Read `--spectrum` as amplitudes instead of squares.
    #[arg(long)]
    pub raw: bool,
    /// Family through the projection state of a random subspace of this dimension.
    #[arg(long)]
    pub projection_d: Option<usize>,
    /// Family through `p|00⟩⟨00| + (1 − p)|01⟩⟨01|`.
    #[arg(long)]
    pub diag2qubit: Option<f64>,
    /// Family through the state stored in a JSON matrix file.
    #[arg(long, value_name = "FILE")]
    pub matrix: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Acceptance tolerance (theorem-table) or bisection tolerance (intervals).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Also report the states among the partial transposes of the family.
    #[arg(long)]
    pub gamma: bool,
}

/// Where the family's `ϱ` comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySource {
    Pure(SchmidtSpectrum),
    Projection { dims: Dims, d: usize },
    Diag2Qubit(f64),
    Matrix(PathBuf),
}

/// Validated settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: Option<FamilySource>,
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub tol: Option<f64>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub gamma: bool,
}

impl RunConfig {
    pub fn from_args(args: &CommonArgs) -> Result<Self, CliError> {
        let restarts = args.restarts.unwrap_or(SeeSawConfig::default().restarts);
        if restarts == 0 {
            return Err(CliError::usage("--restarts must be positive"));
        }
        if let Some(tol) = args.tol {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::usage("--tol must be a positive number"));
            }
        }
        if args.k == 0 {
            return Err(CliError::usage("--k must be at least 1"));
        }
        Ok(Self {
            source: family_source(args)?,
            k: args.k,
            seed: args.seed,
            restarts,
            tol: args.tol,
            format: args.format,
            out: args.out.clone(),
            gamma: args.gamma,
        })
    }

    pub fn seesaw(&self) -> SeeSawConfig {
        SeeSawConfig { restarts: self.restarts, seed: self.seed, ..SeeSawConfig::default() }
    }

    pub fn require_source(&self) -> Result<&FamilySource, CliError> {
        self.source.as_ref().ok_or_else(|| {
            CliError::usage("a family is required: --spectrum/--n, --projection-d, --diag2qubit or --matrix")
        })
    }

    pub fn require_spectrum(&self) -> Result<&SchmidtSpectrum, CliError> {
        match self.require_source()? {
            FamilySource::Pure(s) => Ok(s),
            _ => Err(CliError::usage("this command needs a pure family (--spectrum or --n)")),
        }
    }

    pub fn family(&self) -> Result<OneParamFamily, CliError> {
        let rho = match self.require_source()? {
            FamilySource::Pure(s) => return Ok(OneParamFamily::pure(s)?),
            FamilySource::Projection { dims, d } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                random_subspace_projections(*dims, *d, &mut rng).0
            }
            FamilySource::Diag2Qubit(p) => diag2qubit_state(*p)?,
            FamilySource::Matrix(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<BipartiteOperator>(&text)
                    .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?
            }
        };
        Ok(OneParamFamily::new(rho)?)
    }

    pub fn label(&self) -> String {
        match &self.source {
            Some(FamilySource::Pure(s)) => {
                let squares: Vec<String> = s.squared().iter().map(|x| format!("{x:.6}")).collect();
                format!("pure[{}]", squares.join(";"))
            }
            Some(FamilySource::Projection { dims, d }) => format!("projection[d={d};{dims};seed={}]", self.seed),
            Some(FamilySource::Diag2Qubit(p)) => format!("diag2qubit[p={p}]"),
            Some(FamilySource::Matrix(path)) => format!("matrix[{}]", path.display()),
            None => "none".into(),
        }
    }
}

fn family_source(args: &CommonArgs) -> Result<Option<FamilySource>, CliError> {
    let chosen = [args.spectrum.is_some(), args.projection_d.is_some(), args.diag2qubit.is_some(), args.matrix.is_some()]
        .iter()
        .filter(|x| **x)
        .count();
    if chosen > 1 {
        return Err(CliError::usage("choose one of --spectrum, --projection-d, --diag2qubit, --matrix"));
    }
    if let Some(text) = &args.spectrum {
        let values = parse_list(text)?;
        if let Some(n) = args.n {
            if n != values.len() {
                return Err(CliError::usage(format!("--n {n} does not match {} spectrum entries", values.len())));
            }
        }
        if args.m.is_some_and(|m| m != values.len()) {
            return Err(CliError::usage("pure families are square: --m must equal the spectrum length"));
        }
        let spectrum = if args.raw {
            SchmidtSpectrum::from_amplitudes(&values, SPECTRUM_SUM_TOL)?
        } else {
            SchmidtSpectrum::from_squared(&values, SPECTRUM_SUM_TOL)?
        };
        return Ok(Some(FamilySource::Pure(spectrum)));
    }
    if let Some(d) = args.projection_d {
        let n = args.n.ok_or_else(|| CliError::usage("--projection-d needs --n (and optionally --m)"))?;
        let dims = Dims::new(args.m.unwrap_or(n), n)?;
        if d == 0 || d >= dims.total() {
            return Err(CliError::usage(format!("--projection-d must lie in [1, {})", dims.total())));
        }
        return Ok(Some(FamilySource::Projection { dims, d }));
    }
    if let Some(p) = args.diag2qubit {
        if !(p > 0.5 && p < 1.0) {
            return Err(CliError::usage("--diag2qubit needs 1/2 < p < 1"));
        }
        return Ok(Some(FamilySource::Diag2Qubit(p)));
    }
    if let Some(path) = &args.matrix {
        return Ok(Some(FamilySource::Matrix(path.clone())));
    }
    if let Some(n) = args.n {
        if args.m.is_some_and(|m| m != n) {
            return Err(CliError::usage("--n alone selects the square isotropic family; --m must match"));
        }
        return Ok(Some(FamilySource::Pure(SchmidtSpectrum::isotropic(n)?)));
    }
    Ok(None)
}

/// Parses `0.5,0.3,0.2` or `1/3,1/3,1/3`.
pub fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            let value = match item.split_once('/') {
                Some((a, b)) => parse_number(a)? / parse_number(b)?,
                None => parse_number(item)?,
            };
            if !value.is_finite() {
                return Err(CliError::usage(format!("'{item}' is not a finite number")));
            }
            Ok(value)
        })
        .collect()
}

fn parse_number(s: &str) -> Result<f64, CliError> {
    s.trim().parse::<f64>().map_err(|_| CliError::usage(format!("'{s}' is not a number")))
}

/// Parses `i,j`.
pub fn parse_pair(text: &str) -> Result<(usize, usize), CliError> {
    let (a, b) = text.split_once(',').ok_or_else(|| CliError::usage("--pair expects i,j"))?;
    let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| CliError::usage(format!("'{s}' is not an index")));
    Ok((parse(a)?, parse(b)?))
}
