//! Verification pipeline behind the `hardyshift` command.
//!
//! A [`RunConfig`] selects one command; [`run`] assembles a [`Report`] whose
//! `passed` flag drives the exit code, and [`emit_report`] serializes it.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hardyshift::lattice::DEFAULT_CAP_BITS;
use hardyshift::{
    channels, check_minimal, commutant_basis, commutes, commutes_with_shift_on_window,
    distinct_supports, enumerate_lattice, is_lower_toeplitz, lattice_closure_check, power_symbol,
    scalar_shift, selfadjoint_commutant_dim, toeplitz_matrix, verify_equivalence, ChannelBasis,
    DenseMatrix, EnumerationOptions, GaussRational, LatticeCounts, LatticeEntry, MatrixSymbol,
    Minimality, Mode, Sampling, Scalar, TruncationParams, DEFAULT_TOL,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

/// Widest family for which the all-pairs closure check is run.
pub const CLOSURE_MAX_BITS: usize = 12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    RankAmbiguity(hardyshift::Error),

    #[error("verification aborted: {0}")]
    Verification(hardyshift::Error),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::RankAmbiguity(_) => 3,
            CliError::Verification(_) => 1,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<hardyshift::Error> for CliError {
    fn from(e: hardyshift::Error) -> Self {
        use hardyshift::Error as E;
        match e {
            E::RankAmbiguity { .. } => CliError::RankAmbiguity(e),
            E::InvalidParams(_) | E::Cap { .. } | E::Symbol(_) | E::Shape(_) => {
                CliError::Config(e.to_string())
            }
            E::Index(_) | E::Invariance(_) => CliError::Verification(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build the operator matrix and check it against the shift
    Build,
    /// Check the permutation equivalence with a direct sum of shifts
    VerifyEquivalence,
    /// Exact commutant and self-adjoint commutant dimensions
    Commutant,
    /// Enumerate and verify the channel-mask reducing subspaces
    Lattice,
    /// Certify that every channel is a minimal reducing subspace
    Minimality,
    /// Equivalence, commutant, lattice and minimality together
    FullReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum CommandArg {
    /// Build the operator matrix and check it against the shift
    Build,
    /// Check the permutation equivalence with a direct sum of shifts
    VerifyEquivalence,
    /// Exact commutant and self-adjoint commutant dimensions
    Commutant,
    /// Enumerate and verify the channel-mask reducing subspaces
    Lattice,
    /// Certify that every channel is a minimal reducing subspace
    Minimality,
    /// Equivalence, commutant, lattice and minimality together
    FullReport,
}

impl From<&CommandArg> for Command {
    fn from(c: &CommandArg) -> Self {
        match c {
            CommandArg::Build => Command::Build,
            CommandArg::VerifyEquivalence => Command::VerifyEquivalence,
            CommandArg::Commutant => Command::Commutant,
            CommandArg::Lattice => Command::Lattice,
            CommandArg::Minimality => Command::Minimality,
            CommandArg::FullReport => Command::FullReport,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hardyshift", version)]
#[command(about = "Verify truncated models of z^n on the C^m-valued Hardy space")]
struct Cli {
    #[command(subcommand)]
    command: CommandArg,

    /// Vector dimension m
    #[arg(long = "m", global = true)]
    m: Option<usize>,

    /// Power n in z^n
    #[arg(long = "n", global = true)]
    n: Option<usize>,

    /// Blocks per channel K (degrees below n*K are kept)
    #[arg(long, global = true)]
    blocks: Option<usize>,

    #[arg(long, value_enum, default_value = "exact", global = true)]
    mode: ModeArg,

    /// Relative tolerance (float mode only; default 1e-9)
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Matrix-polynomial symbol JSON (build and commutant)
    #[arg(long, global = true)]
    symbol: Option<PathBuf>,

    /// Output file (stdout if omitted)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,

    /// Worker threads for mask checks (default: available parallelism)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Enumeration cap in channel bits
    #[arg(long, default_value_t = DEFAULT_CAP_BITS, global = true)]
    cap: usize,

    /// Check this many uniformly sampled masks instead of all of them
    #[arg(long, global = true)]
    sample: Option<u64>,

    /// Seed for --sample
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: TruncationParams,
    pub mode: Mode,
    /// Present iff `mode` is float.
    pub tol: Option<f64>,
    pub command: Command,
    pub symbol_path: Option<PathBuf>,
    pub out_path: Option<PathBuf>,
    pub format: Format,
    pub cap_bits: usize,
    pub sampling: Option<Sampling>,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command, params: TruncationParams) -> Self {
        RunConfig {
            params,
            mode: Mode::Exact,
            tol: None,
            command,
            symbol_path: None,
            out_path: None,
            format: Format::Json,
            cap_bits: DEFAULT_CAP_BITS,
            sampling: None,
            jobs: None,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match (self.mode, self.tol) {
            (Mode::Exact, Some(_)) => {
                return Err(CliError::Config("--tol only applies in float mode".into()))
            }
            (Mode::Float, None) => {
                return Err(CliError::Config("float mode requires a tolerance".into()))
            }
            (Mode::Float, Some(t)) if !(t.is_finite() && t > 0.0) => {
                return Err(CliError::Config(format!(
                    "tolerance must be positive, got {t}"
                )))
            }
            _ => {}
        }
        if self.format == Format::Csv && self.command != Command::Lattice {
            return Err(CliError::Config(
                "CSV output is only available for the lattice command".into(),
            ));
        }
        if self.symbol_path.is_some()
            && !matches!(self.command, Command::Build | Command::Commutant)
        {
            return Err(CliError::Config(
                "--symbol applies to build and commutant only".into(),
            ));
        }
        let bits = self.params.channel_count();
        let enumerates = matches!(self.command, Command::Lattice | Command::FullReport);
        if enumerates && self.sampling.is_none() && bits > self.cap_bits {
            return Err(CliError::Config(format!(
                "m*n = {bits} exceeds the enumeration cap of {} bits (2^{bits} masks); use --sample",
                self.cap_bits
            )));
        }
        if self.jobs == Some(0) {
            return Err(CliError::Config("--jobs must be positive".into()));
        }
        Ok(())
    }

    fn tol(&self) -> f64 {
        self.tol.unwrap_or(0.0)
    }
}

fn config_from_cli(cli: Cli) -> Result<RunConfig, CliError> {
    let missing = |name: &str| CliError::Config(format!("--{name} is required"));
    let params = TruncationParams::new(
        cli.m.ok_or_else(|| missing("m"))?,
        cli.n.ok_or_else(|| missing("n"))?,
        cli.blocks.ok_or_else(|| missing("blocks"))?,
    )?;
    let mode = match cli.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    };
    let tol = match mode {
        Mode::Exact => cli.tol,
        Mode::Float => Some(cli.tol.unwrap_or(DEFAULT_TOL)),
    };
    let config = RunConfig {
        params,
        mode,
        tol,
        command: Command::from(&cli.command),
        symbol_path: cli.symbol,
        out_path: cli.out,
        format: cli.format,
        cap_bits: cli.cap,
        sampling: cli.sample.map(|samples| Sampling {
            samples,
            seed: cli.seed,
        }),
        jobs: cli.jobs,
    };
    config.validate()?;
    Ok(config)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub m: usize,
    pub n: usize,
    #[serde(rename = "K")]
    pub blocks: usize,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSection {
    /// `"power"` for T_{z^n}, `"symbol"` for a user symbol.
    pub source: String,
    pub dim: usize,
    pub nonzero_entries: usize,
    pub rank: usize,
    pub commutes_with_shift_on_window: bool,
    pub commutes_with_shift: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceSection {
    pub unitary: bool,
    pub intertwines: bool,
    pub channels: Vec<ChannelBasis>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutantSection {
    pub source: String,
    pub dim: usize,
    pub selfadjoint_dim: usize,
    pub basis_commutes: bool,
    pub lemma3_structure_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LatticeSection {
    pub counts: LatticeCounts,
    pub entries: Vec<LatticeEntry>,
    pub distinct_supports: bool,
    /// `None` when sampled or wider than [`CLOSURE_MAX_BITS`].
    pub closure_ok: Option<bool>,
    pub full_selfadjoint_commutant_dim: usize,
    pub diagonal_family_generators: usize,
    /// The measured self-adjoint commutant is larger than the span of the channel projections.
    pub exceeds_diagonal_family: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<Sampling>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MinimalitySection {
    pub channels: Vec<Minimality>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub command: Command,
    pub params: ReportParams,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<OperatorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub commutant: Option<CommutantSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minimality: Option<MinimalitySection>,
}

impl Report {
    pub fn new(command: Command, params: &TruncationParams, mode: Mode, tol: Option<f64>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION.to_string(),
            command,
            params: ReportParams {
                m: params.m(),
                n: params.n(),
                blocks: params.blocks(),
                mode,
                tol,
            },
            passed: true,
            operator: None,
            equivalence: None,
            commutant: None,
            lattice: None,
            minimality: None,
        }
    }
}

/// Lower-triangular Toeplitz structure of the shift commutant at block length `len`:
/// the basis has `len` elements, all lower Toeplitz, and the generators `J^k` commute.
pub fn lemma3_structure<T: Scalar>(len: usize, tol: f64) -> Result<bool, CliError> {
    let shift = scalar_shift::<T>(len);
    let basis = commutant_basis(&shift, tol)?;
    let structured = basis.dim() == len && basis.basis.iter().all(|b| is_lower_toeplitz(b, tol));
    let mut generator = DenseMatrix::identity(len);
    let mut converse = true;
    for _ in 0..len {
        converse &= commutes(&shift, &generator, tol)?;
        generator = generator.matmul(&shift)?;
    }
    Ok(structured && converse)
}

fn load_symbol<T: Scalar>(path: &Path) -> Result<MatrixSymbol<T>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read symbol {}: {e}", path.display())))?;
    Ok(MatrixSymbol::from_json(&text)?)
}

fn operator_for<T: Scalar>(
    config: &RunConfig,
) -> Result<(String, DenseMatrix<T>, usize), CliError> {
    match &config.symbol_path {
        Some(path) => {
            let symbol = load_symbol::<T>(path)?;
            let matrix = toeplitz_matrix(&symbol, &config.params)?;
            Ok(("symbol".into(), matrix, symbol.degree()))
        }
        None => Ok((
            "power".into(),
            power_symbol(&config.params),
            config.params.n(),
        )),
    }
}

fn operator_section<T: Scalar>(config: &RunConfig) -> Result<OperatorSection, CliError> {
    let tol = config.tol();
    let (source, matrix, degree) = operator_for::<T>(config)?;
    let shift = hardyshift::vector_shift::<T>(&config.params);
    Ok(OperatorSection {
        source,
        dim: matrix.rows(),
        nonzero_entries: matrix.nonzero_count(tol),
        rank: matrix.rank(tol)?,
        commutes_with_shift_on_window: commutes_with_shift_on_window(
            &matrix,
            degree,
            &config.params,
            tol,
        )?,
        commutes_with_shift: commutes(&shift, &matrix, tol)?,
    })
}

fn commutant_section<T: Scalar>(config: &RunConfig) -> Result<CommutantSection, CliError> {
    let tol = config.tol();
    let (source, matrix, _) = operator_for::<T>(config)?;
    let basis = commutant_basis(&matrix, tol)?;
    let mut basis_commutes = true;
    for b in &basis.basis {
        basis_commutes &= commutes(&matrix, b, tol)?;
    }
    Ok(CommutantSection {
        source,
        dim: basis.dim(),
        selfadjoint_dim: selfadjoint_commutant_dim(&matrix, tol)?,
        basis_commutes,
        lemma3_structure_ok: lemma3_structure::<T>(config.params.blocks(), tol)?,
    })
}

fn lattice_sections<T: Scalar>(
    config: &RunConfig,
) -> Result<(LatticeSection, MinimalitySection), CliError> {
    let opts = EnumerationOptions {
        cap_bits: config.cap_bits,
        sampling: config.sampling,
        tol: config.tol(),
    };
    let report = enumerate_lattice::<T>(&config.params, &opts)?;
    let generators = config.params.channel_count();
    let closure_ok = (report.sampling.is_none() && generators <= CLOSURE_MAX_BITS)
        .then(|| lattice_closure_check::<T>(&report));
    let lattice = LatticeSection {
        counts: report.counts,
        distinct_supports: distinct_supports(&report)?,
        closure_ok,
        full_selfadjoint_commutant_dim: report.full_selfadjoint_commutant_dim,
        diagonal_family_generators: generators,
        exceeds_diagonal_family: report.full_selfadjoint_commutant_dim > generators,
        sampling: report.sampling,
        entries: report.entries,
    };
    Ok((
        lattice,
        MinimalitySection {
            channels: report.minimal_channels,
        },
    ))
}

fn lattice_passed(section: &LatticeSection) -> bool {
    section.counts.reducing_count == section.counts.checked_masks
        && section.distinct_supports
        && section.closure_ok != Some(false)
}

fn minimality_passed(section: &MinimalitySection) -> bool {
    section.channels.iter().all(|c| c.is_minimal)
}

fn run_typed<T: Scalar>(config: &RunConfig) -> Result<Report, CliError> {
    let tol = config.tol();
    let params = &config.params;
    let mut report = Report::new(config.command, params, config.mode, config.tol);
    let wants = |c: Command| config.command == c || config.command == Command::FullReport;

    if config.command == Command::Build {
        let section = operator_section::<T>(config)?;
        report.passed &= section.commutes_with_shift_on_window;
        report.operator = Some(section);
    }
    if wants(Command::VerifyEquivalence) {
        let eq = verify_equivalence::<T>(params, tol)?;
        report.passed &= eq.passed();
        report.equivalence = Some(EquivalenceSection {
            unitary: eq.unitary,
            intertwines: eq.intertwines,
            channels: eq.channels,
        });
    }
    if wants(Command::Commutant) {
        let section = commutant_section::<T>(config)?;
        report.passed &= section.basis_commutes && section.lemma3_structure_ok;
        report.commutant = Some(section);
    }
    if wants(Command::Lattice) {
        let (lattice, minimality) = lattice_sections::<T>(config)?;
        report.passed &= lattice_passed(&lattice) && minimality_passed(&minimality);
        report.lattice = Some(lattice);
        if config.command == Command::FullReport {
            report.minimality = Some(minimality);
        }
    } else if config.command == Command::Minimality {
        let channels = channels(params)
            .into_iter()
            .map(|ch| check_minimal::<T>(ch, params, tol))
            .collect::<hardyshift::Result<Vec<_>>>()?;
        let section = MinimalitySection { channels };
        report.passed &= minimality_passed(&section);
        report.minimality = Some(section);
    }
    Ok(report)
}

/// Runs the selected command in the configured arithmetic mode.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    match config.mode {
        Mode::Exact => run_typed::<GaussRational>(config),
        Mode::Float => run_typed::<Complex64>(config),
    }
}

/// One CSV row per lattice entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub mask_bitstring: String,
    pub dim: usize,
    pub is_reducing: bool,
    /// The mask selects exactly one channel and that channel was certified minimal.
    pub is_minimal_channel_union: bool,
}

pub fn csv_rows(lattice: &LatticeSection, minimality: &MinimalitySection) -> Vec<CsvRow> {
    lattice
        .entries
        .iter()
        .map(|e| {
            let single = (e.mask.popcount() == 1).then(|| e.mask.bits().trailing_zeros() as usize);
            let minimal = single.is_some_and(|c| {
                minimality
                    .channels
                    .iter()
                    .any(|m| m.channel.ordinal == c && m.is_minimal)
            });
            CsvRow {
                mask_bitstring: e.mask.bitstring(),
                dim: e.subspace_dim,
                is_reducing: e.is_reducing,
                is_minimal_channel_union: minimal,
            }
        })
        .collect()
}

/// Serializes a report. JSON keys are sorted; CSV is only defined for lattice reports.
pub fn emit_report(report: &Report, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let value =
                serde_json::to_value(report).map_err(|e| CliError::Config(e.to_string()))?;
            let mut bytes =
                serde_json::to_vec_pretty(&value).map_err(|e| CliError::Config(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let lattice = report
                .lattice
                .as_ref()
                .filter(|_| report.command == Command::Lattice)
                .ok_or_else(|| {
                    CliError::Config("CSV output is only available for lattice reports".into())
                })?;
            let minimality = match &report.minimality {
                Some(m) => m.clone(),
                None => recompute_minimality(report)?,
            };
            let mut writer = csv::Writer::from_writer(Vec::new());
            for row in csv_rows(lattice, &minimality) {
                writer
                    .serialize(row)
                    .map_err(|e| CliError::Config(e.to_string()))?;
            }
            writer
                .into_inner()
                .map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn recompute_minimality(report: &Report) -> Result<MinimalitySection, CliError> {
    let params = TruncationParams::new(report.params.m, report.params.n, report.params.blocks)?;
    let tol = report.params.tol.unwrap_or(0.0);
    let channels = channels(&params)
        .into_iter()
        .map(|ch| match report.params.mode {
            Mode::Exact => check_minimal::<GaussRational>(ch, &params, tol),
            Mode::Float => check_minimal::<Complex64>(ch, &params, tol),
        })
        .collect::<hardyshift::Result<Vec<_>>>()?;
    Ok(MinimalitySection { channels })
}

/// Writes through a temporary file in the target directory, then renames it into place.
pub fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Runs and emits; returns the process exit code.
pub fn execute(config: &RunConfig) -> i32 {
    let work = || -> Result<bool, CliError> {
        let report = run(config)?;
        let bytes = emit_report(&report, config.format)?;
        match &config.out_path {
            Some(path) => write_atomically(path, &bytes)?,
            None => std::io::stdout()
                .write_all(&bytes)
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?,
        }
        Ok(report.passed)
    };
    let outcome = match config.jobs {
        Some(jobs) => match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(CliError::Config(format!(
                "cannot start {jobs} workers: {e}"
            ))),
        },
        None => work(),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point for the binary: parses arguments and runs.
pub fn main_with_args<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match config_from_cli(cli) {
        Ok(config) => execute(&config),
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(m: usize, n: usize, k: usize) -> TruncationParams {
        TruncationParams::new(m, n, k).unwrap()
    }

    #[test]
    fn exit_codes_for_errors() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        let amb = hardyshift::Error::RankAmbiguity {
            sigma: 1e-9,
            threshold: 1e-9,
        };
        assert_eq!(CliError::from(amb).exit_code(), 3);
        assert_eq!(
            CliError::from(hardyshift::Error::Cap { bits: 25, cap: 20 }).exit_code(),
            2
        );
    }

    #[test]
    fn validation_rules() {
        let mut c = RunConfig::new(Command::VerifyEquivalence, params(2, 2, 2));
        assert!(c.validate().is_ok());
        c.tol = Some(1e-9);
        assert!(c.validate().is_err());
        c.mode = Mode::Float;
        assert!(c.validate().is_ok());
        c.tol = None;
        assert!(c.validate().is_err());
        c.tol = Some(-1.0);
        assert!(c.validate().is_err());

        let mut csv = RunConfig::new(Command::VerifyEquivalence, params(1, 1, 1));
        csv.format = Format::Csv;
        assert_eq!(csv.validate().unwrap_err().exit_code(), 2);
        csv.command = Command::Lattice;
        assert!(csv.validate().is_ok());

        let capped = RunConfig::new(Command::Lattice, params(5, 5, 2));
        assert_eq!(capped.validate().unwrap_err().exit_code(), 2);
        let mut sampled = capped.clone();
        sampled.sampling = Some(Sampling {
            samples: 4,
            seed: 1,
        });
        assert!(sampled.validate().is_ok());
        // minimality does not enumerate masks
        assert!(RunConfig::new(Command::Minimality, params(5, 5, 1))
            .validate()
            .is_ok());
    }

    #[test]
    fn verify_equivalence_report() {
        let report = run(&RunConfig::new(Command::VerifyEquivalence, params(2, 2, 3))).unwrap();
        let eq = report.equivalence.unwrap();
        assert!(report.passed && eq.unitary && eq.intertwines);
        assert!(report.lattice.is_none());
    }

    #[test]
    fn lattice_report_counts() {
        let report = run(&RunConfig::new(Command::Lattice, params(1, 1, 3))).unwrap();
        let lattice = report.lattice.unwrap();
        assert_eq!(lattice.counts.total_masks, 2);
        assert_eq!(lattice.counts.reducing_count, 2);
        assert_eq!(lattice.closure_ok, Some(true));
        assert!(!lattice.exceeds_diagonal_family);
    }

    #[test]
    fn full_report_has_all_sections() {
        let report = run(&RunConfig::new(Command::FullReport, params(2, 2, 2))).unwrap();
        assert!(report.passed);
        assert!(report.equivalence.is_some());
        assert!(report.commutant.is_some());
        assert!(report.minimality.is_some());
        let lattice = report.lattice.unwrap();
        assert_eq!(lattice.full_selfadjoint_commutant_dim, 16);
        assert!(lattice.exceeds_diagonal_family);
        let commutant = report.commutant.unwrap();
        // ⊕ of 4 shifts of length 2: each of the 16 blocks is lower Toeplitz
        assert_eq!(commutant.dim, 4 * 4 * 2);
        assert_eq!(commutant.selfadjoint_dim, 16);
    }

    #[test]
    fn empty_lattice_report_serializes() {
        let mut report = Report::new(Command::Lattice, &params(1, 1, 1), Mode::Exact, None);
        report.lattice = Some(LatticeSection::default());
        let bytes = emit_report(&report, Format::Json).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(value["lattice"]["counts"]["total_masks"], 0);
        assert_eq!(value["lattice"]["counts"]["reducing_count"], 0);
        assert_eq!(value["schema_version"], "1");
    }

    #[test]
    fn csv_rejected_for_equivalence() {
        let report = run(&RunConfig::new(Command::VerifyEquivalence, params(1, 1, 1))).unwrap();
        assert_eq!(
            emit_report(&report, Format::Csv).unwrap_err().exit_code(),
            2
        );
    }

    #[test]
    fn csv_marks_single_minimal_channels() {
        let report = run(&RunConfig::new(Command::Lattice, params(1, 2, 2))).unwrap();
        let text = String::from_utf8(emit_report(&report, Format::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "mask_bitstring,dim,is_reducing,is_minimal_channel_union"
        );
        assert_eq!(lines[1], "00,0,true,false");
        assert_eq!(lines[2], "10,2,true,true");
        assert_eq!(lines[3], "01,2,true,true");
        assert_eq!(lines[4], "11,4,true,false");
    }

    #[test]
    fn build_with_power_symbol() {
        let report = run(&RunConfig::new(Command::Build, params(2, 3, 2))).unwrap();
        let op = report.operator.unwrap();
        assert_eq!(op.dim, 12);
        assert_eq!(op.rank, 2 * (6 - 3));
        assert!(op.commutes_with_shift && op.commutes_with_shift_on_window);
    }

    #[test]
    fn float_mode_pipeline() {
        let mut config = RunConfig::new(Command::FullReport, params(2, 1, 2));
        config.mode = Mode::Float;
        config.tol = Some(1e-9);
        let report = run(&config).unwrap();
        assert!(report.passed);
        assert_eq!(report.lattice.unwrap().full_selfadjoint_commutant_dim, 4);
    }
}
