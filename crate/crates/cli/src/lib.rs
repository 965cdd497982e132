//! Command-line front end for `schur-core`.
//!
//! Exit codes: 0 ok, 1 a theorem-backed check failed, 2 usage or parse
//! error, 3 input not bona fide.

pub mod cmfile;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use schur_core::measures::{
    e2_estimate, e2_upper, g_minus, g_plus, log_negativity, mutual_info_2, purity, renyi_entropy,
    steerability, E2SearchConfig,
};
use schur_core::symplectic::{
    is_bona_fide, random_quantum_cm, symplectic_spectrum, symplectic_spectrum_moduli, TOL_BONA,
};
use schur_core::verify::{reproduce_counterexample, run_all, run_check, write_csv, CheckConfig};
use schur_core::{CmError, CovarianceMatrix, MeasureKind, ModePartition, PartySelector, SeededRng};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NOT_BONA_FIDE: u8 = 3;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "schur", version, about = "Schur-complement tools for Gaussian covariance matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the symplectic spectrum and bona fide margin of a CM file.
    Spectrum {
        path: PathBuf,
        /// Bona fide tolerance on the smallest symplectic eigenvalue.
        #[arg(long, default_value_t = TOL_BONA)]
        tol: f64,
    },
    /// Evaluate one correlation measure on a CM file.
    Measure(MeasureArgs),
    /// Run property checks: a check id, `all`, or `counterexample`.
    Verify(VerifyArgs),
    /// Write a random quantum CM file.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    pub path: PathBuf,
    /// One of g_plus, g_minus, steerability, log_negativity, renyi_entropy,
    /// mutual_info_2, e2_upper, e2_estimate, purity.
    pub measure: MeasureKind,
    /// Parties on one side of the cut, e.g. `A` or `B1,B2`.
    #[arg(long)]
    pub cut: Option<String>,
    #[arg(long)]
    pub steering: Option<String>,
    /// Defaults to every party not in --steering.
    #[arg(long)]
    pub steered: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Seed of the e2_estimate search.
    #[arg(long, env = "SCHUR_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub check: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, env = "SCHUR_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 2)]
    pub max_modes: usize,
    #[arg(long, default_value_t = 3.0)]
    pub nu_max: f64,
    #[arg(long, default_value_t = 0.7)]
    pub strength: f64,
    /// Also write the reports as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Partition such as `A:2,B1:1,B2:1`.
    pub partition: String,
    #[arg(long, default_value_t = 3.0)]
    pub nu_max: f64,
    #[arg(long, default_value_t = 0.7)]
    pub strength: f64,
    #[arg(long, env = "SCHUR_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

/// Formats `x` with `digits` significant digits, switching to exponent
/// form outside `[1e-4, 1e6)`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.*}", digits.saturating_sub(1), x.abs());
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..6).contains(&e) {
        let decimals = (digits as i32 - 1 - e).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{:.*e}", digits.saturating_sub(1), x)
    }
}

/// Nine decimals, without a sign on values that round to zero.
pub fn fmt_measure(x: f64) -> String {
    let s = format!("{x:.9}");
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn core_exit(e: &CmError) -> u8 {
    match e {
        CmError::NotBonaFide { .. } | CmError::NotPd { .. } | CmError::NotPsd { .. } => {
            EXIT_NOT_BONA_FIDE
        }
        _ => EXIT_USAGE,
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: u8, msg: impl std::fmt::Display) -> u8 {
        let _ = writeln!(self.err, "error: {msg}");
        code
    }
}

/// Runs a parsed command line, writing data to `out` and diagnostics to
/// `err`; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let mut io = Io { out, err };
    match cli.command {
        Command::Spectrum { path, tol } => cmd_spectrum(&mut io, &path, tol),
        Command::Measure(a) => cmd_measure(&mut io, &a),
        Command::Verify(a) => cmd_verify(&mut io, &a),
        Command::Gen(a) => cmd_gen(&mut io, &a),
    }
}

fn load(io: &mut Io<'_>, path: &std::path::Path) -> Result<CovarianceMatrix, u8> {
    cmfile::load_cm(path).map_err(|e| io.fail(EXIT_USAGE, e))
}

fn cmd_spectrum(io: &mut Io<'_>, path: &std::path::Path, tol: f64) -> u8 {
    let v = match load(io, path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let (nus, positive) = match symplectic_spectrum(v.matrix()) {
        Ok(nus) => (nus, true),
        Err(CmError::NotPd { min_eig }) => {
            let _ = writeln!(
                io.err,
                "note: matrix is not positive definite (min eigenvalue {min_eig:e}); \
                 spectrum taken from eigenvalue moduli of i*Omega*V"
            );
            match symplectic_spectrum_moduli(v.matrix()) {
                Ok(nus) => (nus, false),
                Err(e) => return io.fail(core_exit(&e), e),
            }
        }
        Err(e) => return io.fail(core_exit(&e), e),
    };
    for nu in &nus {
        let _ = writeln!(io.out, "{}", fmt_sig(*nu, 6));
    }
    let bona = positive
        && match is_bona_fide(v.matrix()) {
            Ok(b) => b.margin >= -tol,
            Err(_) => false,
        };
    let margin = nus[0] - 1.0;
    let _ = writeln!(io.out, "margin {}", fmt_sig(margin, 6));
    let _ = writeln!(io.out, "bona_fide {bona}");
    if bona {
        EXIT_OK
    } else {
        EXIT_NOT_BONA_FIDE
    }
}

fn selector(io: &mut Io<'_>, flag: &str, value: &Option<String>) -> Result<PartySelector, u8> {
    let s = value
        .as_deref()
        .ok_or_else(|| io.fail(EXIT_USAGE, format!("this measure needs --{flag}")))?;
    PartySelector::parse(s).map_err(|e| io.fail(EXIT_USAGE, format!("--{flag}: {e}")))
}

fn cmd_measure(io: &mut Io<'_>, a: &MeasureArgs) -> u8 {
    let v = match load(io, &a.path) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let value = match measure_value(io, &v, a) {
        Ok(Ok(x)) => x,
        Ok(Err(e)) => return io.fail(core_exit(&e), e),
        Err(code) => return code,
    };
    let _ = writeln!(io.out, "{}", fmt_measure(value));
    EXIT_OK
}

/// Outer error: usage problem already reported. Inner error: failure of the
/// computation itself.
fn measure_value(
    io: &mut Io<'_>,
    v: &CovarianceMatrix,
    a: &MeasureArgs,
) -> Result<schur_core::Result<f64>, u8> {
    Ok(match a.measure {
        MeasureKind::GPlus => g_plus(v),
        MeasureKind::GMinus => g_minus(v),
        MeasureKind::Purity => purity(v),
        MeasureKind::Steerability => {
            let steering = selector(io, "steering", &a.steering)?;
            let steered = match &a.steered {
                Some(_) => selector(io, "steered", &a.steered)?,
                None => match v.partition().complement(&steering) {
                    Ok(Some(s)) => s,
                    Ok(None) => {
                        return Err(io.fail(EXIT_USAGE, "--steering covers every party"))
                    }
                    Err(e) => return Err(io.fail(EXIT_USAGE, e)),
                },
            };
            steerability(v, &steering, &steered)
        }
        MeasureKind::LogNegativity => log_negativity(v, &selector(io, "cut", &a.cut)?),
        MeasureKind::MutualInfo2 => mutual_info_2(v, &selector(io, "cut", &a.cut)?),
        MeasureKind::E2Upper => e2_upper(v, &selector(io, "cut", &a.cut)?).map(|u| u.bound),
        MeasureKind::E2Estimate => {
            let cut = selector(io, "cut", &a.cut)?;
            e2_estimate(v, &cut, &E2SearchConfig::new(a.seed))
        }
        MeasureKind::RenyiEntropy => {
            let alpha = a
                .alpha
                .ok_or_else(|| io.fail(EXIT_USAGE, "renyi_entropy needs --alpha"))?;
            match renyi_entropy(v, alpha) {
                Err(CmError::BadAlpha(x)) => {
                    return Err(io.fail(EXIT_USAGE, format!("--alpha {x}: need alpha >= 1")))
                }
                r => r,
            }
        }
    })
}

fn cmd_verify(io: &mut Io<'_>, a: &VerifyArgs) -> u8 {
    if a.check == "counterexample" {
        return match reproduce_counterexample() {
            Ok(r) => {
                let _ = writeln!(io.out, "nu_min {:.8}", r.nu_min);
                let _ = writeln!(io.out, "gap {:.8}", r.gap);
                let _ = writeln!(io.out, "g_joint {:.8}", r.g_joint);
                let _ = writeln!(io.out, "g_b1 {:.8}", r.g_b1);
                let _ = writeln!(io.out, "g_b2 {:.8}", r.g_b2);
                let _ = writeln!(io.out, "min_eigenvalue {:.8}", r.min_eigenvalue);
                EXIT_OK
            }
            Err(e) => io.fail(EXIT_CHECK_FAILED, e),
        };
    }
    let cfg = CheckConfig {
        trials: a.trials,
        seed: a.seed,
        max_modes_per_party: a.max_modes,
        nu_max: a.nu_max,
        strength: a.strength,
        tol: a.tol,
    };
    let reports = if a.check == "all" {
        run_all(&cfg)
    } else {
        run_check(&a.check, &cfg).map(|r| vec![r])
    };
    let reports = match reports {
        Ok(r) => r,
        Err(e) => return io.fail(EXIT_USAGE, e),
    };
    for r in &reports {
        let _ = writeln!(io.out, "{r}");
    }
    if let Some(path) = &a.csv {
        let written = std::fs::File::create(path).and_then(|f| write_csv(&reports, f));
        if let Err(e) = written {
            return io.fail(EXIT_USAGE, format!("{}: {e}", path.display()));
        }
    }
    let failed: Vec<&str> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.as_str())
        .collect();
    if failed.is_empty() {
        EXIT_OK
    } else {
        let _ = writeln!(io.err, "failed checks: {}", failed.join(", "));
        EXIT_CHECK_FAILED
    }
}

fn cmd_gen(io: &mut Io<'_>, a: &GenArgs) -> u8 {
    let partition = match ModePartition::parse(&a.partition) {
        Ok(p) => p,
        Err(e) => return io.fail(EXIT_USAGE, e),
    };
    if !(a.nu_max >= 1.0) || !(a.strength > 0.0) {
        return io.fail(EXIT_USAGE, "need --nu-max >= 1 and --strength > 0");
    }
    let v = random_quantum_cm(&partition, a.nu_max, a.strength, &mut SeededRng::new(a.seed));
    let text = cmfile::to_json(&v);
    match &a.out {
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => EXIT_OK,
            Err(e) => io.fail(EXIT_USAGE, format!("{}: {e}", path.display())),
        },
        None => {
            let _ = io.out.write_all(text.as_bytes());
            EXIT_OK
        }
    }
}
