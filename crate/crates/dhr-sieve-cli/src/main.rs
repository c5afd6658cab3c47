//! Command-line front end for the weighted-sieve tables.
//!
//! Five modes, selected with `--mode` or a leading bare word:
//!
//! - `single`: the certified admissible exponent r for one (kappa, h).
//! - `table`: every populated cell with h <= hmax, as TSV/CSV/pretty text.
//! - `alphabeta`: the sieving-limit pair for one dimension, 20 decimals.
//! - `verify`: admissibility report for a polynomial system given as JSON.
//! - `census`: brute-force count of square-free r-almost-prime values.
//!
//! Output on stdout is deterministic for fixed flags; diagnostics and
//! precision-escalation notices go to stderr. Exit status is 0 only when
//! every requested quantity was certified.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use dhr_sieve::optimize;
use dhr_sieve::pipeline::{self, ColumnReport, SolvedKappa};
use dhr_sieve::polyverify::{census, IntPoly, PolySystem};
use dhr_sieve::{Error, Result};
use serde::Deserialize;

/// Largest polynomial degree the front end accepts.
const H_MAX: u32 = 50;

/// What one invocation should compute.
#[derive(Parser, Debug)]
#[command(
    name = "dhr-sieve",
    version,
    about = "Certified almost-prime exponents for polynomial values via the weighted sieve"
)]
struct JobSpec {
    /// What to compute.
    #[arg(long, value_enum)]
    mode: Option<Mode>,

    /// Mode as a bare word, e.g. `dhr-sieve table --hmax 20`.
    #[arg(value_enum, value_name = "MODE")]
    mode_word: Option<Mode>,

    /// Sieve dimension: the number of irreducible factors.
    #[arg(long)]
    kappa: Option<u32>,

    /// Total degree of the polynomial.
    #[arg(long)]
    h: Option<u32>,

    /// Largest degree in table mode.
    #[arg(long, default_value_t = 20)]
    hmax: u32,

    /// Working precision in bits; the default grows with kappa.
    #[arg(long)]
    bits: Option<u32>,

    /// Upper bound for the v search in the minimisation.
    #[arg(long)]
    vmax: Option<f64>,

    /// Output layout.
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,

    /// Polynomial system as JSON: {"factors": [[a0, a1, ...], ...]}.
    #[arg(long, value_name = "FILE")]
    poly: Option<PathBuf>,

    /// Census range: count arguments n with 1 <= n <= x.
    #[arg(long)]
    x: Option<u64>,

    /// Census exponent: admit values with at most r prime factors.
    #[arg(long)]
    r: Option<u32>,

    /// Census roughness cutoff: also count values free of primes below z.
    #[arg(long)]
    z: Option<u64>,

    /// Worker threads; 1 forces a fully serial run.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Single,
    Table,
    Alphabeta,
    Verify,
    Census,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Tsv,
    Csv,
    Pretty,
}

impl Format {
    fn sep(self) -> &'static str {
        match self {
            Format::Tsv => "\t",
            Format::Csv => ",",
            Format::Pretty => "  ",
        }
    }
}

/// On-disk shape of a polynomial system: factor coefficients low to high.
#[derive(Deserialize)]
struct PolyFile {
    factors: Vec<Vec<i64>>,
}

fn main() -> ExitCode {
    let job = JobSpec::parse();
    if let Some(n) = job.threads {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        if let Err(e) = pool {
            eprintln!("dhr-sieve: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&job) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dhr-sieve: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(job: &JobSpec) -> Result<()> {
    let mode = match (job.mode, job.mode_word) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Usage(
                "conflicting modes given as --mode and a bare word".into(),
            ))
        }
        (Some(m), _) | (None, Some(m)) => m,
        (None, None) => {
            return Err(Error::Usage(
                "choose a mode: single, table, alphabeta, verify, or census".into(),
            ))
        }
    };
    match mode {
        Mode::Single => run_single(job),
        Mode::Table => run_table(job),
        Mode::Alphabeta => run_alphabeta(job),
        Mode::Verify => run_verify(job),
        Mode::Census => run_census(job),
    }
}

fn need<T: Clone>(value: &Option<T>, flag: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| Error::Usage(format!("this mode needs {flag}")))
}

fn check_pair(kappa: u32, h: u32) -> Result<()> {
    if kappa == 0 {
        return Err(Error::Usage("--kappa must be at least 1".into()));
    }
    if h < kappa {
        return Err(Error::Usage(format!(
            "a degree-{h} polynomial cannot have {kappa} factors; need kappa <= h"
        )));
    }
    if h > H_MAX {
        return Err(Error::Usage(format!(
            "h = {h} is beyond the supported range (h <= {H_MAX})"
        )));
    }
    Ok(())
}

fn log_escalations(kappa: u32, escalations: u32, prec: u32) {
    if escalations > 0 {
        eprintln!(
            "dhr-sieve: kappa={kappa}: precision escalated {escalations}x to {prec} bits"
        );
    }
}

/// Certified floor exponent for one cell, honouring the overrides.
fn single_r(kappa: u32, h: u32, bits: Option<u32>, vmax: Option<f64>) -> Result<u32> {
    if kappa == 1 {
        return optimize::admissible_r(1, h);
    }
    let mut solved = match bits {
        Some(b) => SolvedKappa::with_prec(kappa, b),
        None => SolvedKappa::new(kappa),
    }?;
    if let Some(v) = vmax {
        solved.set_vmax(v);
    }
    let res = solved.minimize(h)?;
    log_escalations(kappa, solved.escalations(), solved.prec());
    Ok(res.r)
}

fn run_single(job: &JobSpec) -> Result<()> {
    let kappa = need(&job.kappa, "--kappa")?;
    let h = need(&job.h, "--h")?;
    check_pair(kappa, h)?;
    let r = single_r(kappa, h, job.bits, job.vmax)?;
    match job.format {
        Format::Pretty => println!("r_min(\u{3ba}={kappa}, h={h}) = {r}"),
        _ => println!("{r}"),
    }
    Ok(())
}

fn run_table(job: &JobSpec) -> Result<()> {
    if job.hmax == 0 || job.hmax > H_MAX {
        return Err(Error::Usage(format!(
            "--hmax must lie in 1..={H_MAX}, got {}",
            job.hmax
        )));
    }
    let cols = pipeline::table_columns(job.hmax, job.bits, job.vmax)?;
    for col in &cols {
        log_escalations(col.kappa, col.escalations, col.prec);
    }
    print!("{}", render_table(&cols, job.hmax, job.format));
    Ok(())
}

/// Lays the solved columns out as rows h = 1..=hmax, columns kappa. Cells
/// the sieve does not populate (kappa > h or h > 3 kappa) stay empty, so
/// every row carries the same field count.
fn render_table(cols: &[ColumnReport], hmax: u32, format: Format) -> String {
    let n = hmax as usize;
    let mut grid = vec![vec![None; n + 1]; n + 1];
    for col in cols {
        for cell in &col.cells {
            grid[cell.h as usize][cell.kappa as usize] = Some(cell.r);
        }
    }
    let mut rows: Vec<Vec<String>> = Vec::with_capacity(n + 1);
    let mut header = vec!["h".to_string()];
    header.extend((1..=n).map(|k| k.to_string()));
    rows.push(header);
    for h in 1..=n {
        let mut row = vec![h.to_string()];
        row.extend((1..=n).map(|k| match grid[h][k] {
            Some(r) => r.to_string(),
            None => String::new(),
        }));
        rows.push(row);
    }
    let mut out = String::new();
    if format == Format::Pretty {
        let mut widths = vec![0usize; n + 1];
        for row in &rows {
            for (j, field) in row.iter().enumerate() {
                widths[j] = widths[j].max(field.len());
            }
        }
        for row in &rows {
            let line = row
                .iter()
                .enumerate()
                .map(|(j, field)| format!("{field:>width$}", width = widths[j]))
                .collect::<Vec<_>>()
                .join(format.sep());
            out.push_str(line.trim_end());
            out.push('\n');
        }
    } else {
        for row in &rows {
            out.push_str(&row.join(format.sep()));
            out.push('\n');
        }
    }
    out
}

fn run_alphabeta(job: &JobSpec) -> Result<()> {
    let kappa = need(&job.kappa, "--kappa")?;
    if kappa < 2 {
        return Err(Error::Usage(
            "kappa = 1 is the classical linear sieve with (alpha, beta) = (3, 2); \
             the solver starts at kappa = 2"
                .into(),
        ));
    }
    if kappa > H_MAX {
        return Err(Error::Usage(format!(
            "--kappa must lie in 2..={H_MAX}, got {kappa}"
        )));
    }
    // Twenty printed decimals need enclosures narrower than 1e-21. The
    // pair solver refines widths to 2^(-prec/4), so hold at least 288 bits
    // whatever the dimension default would be.
    let prec = job.bits.unwrap_or(12 * (kappa + 10)).max(288);
    let solved = SolvedKappa::with_prec(kappa, prec)?;
    log_escalations(kappa, solved.escalations(), solved.prec());
    let digits = |x: &dhr_sieve::interval::Interval| x.midpoint(solved.prec()).to_decimal(20);
    let alpha = digits(solved.alpha());
    let beta = digits(solved.beta());
    match job.format {
        Format::Pretty => {
            println!("\u{3ba} = {kappa}");
            println!("\u{3b1} = {alpha}");
            println!("\u{3b2} = {beta}");
        }
        f => {
            let sep = f.sep();
            println!("kappa{sep}alpha{sep}beta");
            println!("{kappa}{sep}{alpha}{sep}{beta}");
        }
    }
    Ok(())
}

fn load_system(path: &Path) -> Result<PolySystem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: PolyFile = serde_json::from_str(&text)
        .map_err(|e| Error::Usage(format!("{}: not a polynomial file: {e}", path.display())))?;
    let factors = file.factors.iter().map(|c| IntPoly::new(c)).collect();
    PolySystem::new(factors)
}

fn run_verify(job: &JobSpec) -> Result<()> {
    let path = need(&job.poly, "--poly")?;
    let sys = load_system(&path)?;
    for factor in sys.factors() {
        if factor.degree() > 3 {
            eprintln!(
                "dhr-sieve: warning: a degree-{} factor is taken as irreducible unchecked",
                factor.degree()
            );
        }
    }
    let kappa = sys.kappa();
    let h = sys.h();
    check_pair(kappa, h)?;
    let fpd = sys.fixed_prime_divisor()?;
    let r = single_r(kappa, h, job.bits, job.vmax)?;
    let head = match fpd {
        None => "no fixed prime divisor".to_string(),
        Some(p) => format!("fixed prime divisor {p}"),
    };
    println!(
        "{head}; \u{394} = {}; \u{3ba}={kappa}, h={h}, r={r}",
        sys.delta()
    );
    Ok(())
}

fn run_census(job: &JobSpec) -> Result<()> {
    let path = need(&job.poly, "--poly")?;
    let sys = load_system(&path)?;
    let x = need(&job.x, "--x")?;
    let r = need(&job.r, "--r")?;
    let z = job.z.unwrap_or(2);
    let report = census(&sys, x, r, z)?;
    match job.format {
        Format::Pretty => {
            println!(
                "census up to x = {x}: {} square-free values with \u{3a9} \u{2264} {r} \
                 ({} of them free of primes below {z})",
                report.total, report.rough
            );
        }
        f => {
            let sep = f.sep();
            println!("x{sep}r{sep}z{sep}total{sep}rough");
            println!(
                "{x}{sep}{r}{sep}{z}{sep}{}{sep}{}",
                report.total, report.rough
            );
        }
    }
    Ok(())
}
