use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use harper_core::absorbing::{
    dense_lambda_star, estimate_lambda_star, harper_walk_rates, simulate_killed_walk, survival_bound_check,
    AbsorbReport, WALK_CLOCK_FACTOR,
};
use harper_core::bulk::{bulk_report, density_table};
use harper_core::groups::{
    affine_chi_square_bound, affine_step, distance_curve, distance_curve_csv, heisenberg_chi_square,
    heisenberg_step, mixing_step,
};
use harper_core::oscillator::{convergence_csv, convergence_table};
use harper_core::report::{record_table, to_json, write_atomic, Format};
use harper_core::selftest::{self, SelfTestOptions};
use harper_core::spectral::{build_affine_transform, build_harper, build_mp3_diagonal, spectrum_table};
use harper_core::uncertainty::{improved_bound, optimize_bound, smallest_eigenvalue_bound, theorem1_bound};
use harper_core::{Error, Result};

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
/// Dense substochastic eigensolve in `absorb`.
const MAX_ABSORB_N: usize = 2048;
const MIXING_THRESHOLD: f64 = 0.04;

#[derive(Parser)]
#[command(name = "harper", version, about = "Spectra of circulant-plus-diagonal matrices and related random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output file, written atomically; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Family {
    Harper,
    Affine,
    Mp3,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Theorem1,
    Improved,
    Smallest,
    Optimize,
}

#[derive(Subcommand)]
enum Command {
    /// Sorted eigenvalues of one matrix family member.
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        a: usize,
        #[arg(long, value_enum, default_value_t = Family::Harper)]
        family: Family,
        #[command(flatten)]
        output: Output,
    },
    /// Uncertainty bound on the top (or bottom) eigenvalue of M_n(a).
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        a: usize,
        /// Defaults to floor(sqrt(n) / 2).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        k_prime: Option<usize>,
        #[arg(long, value_enum, default_value_t = VariantArg::Theorem1)]
        variant: VariantArg,
        #[command(flatten)]
        output: Output,
    },
    /// Edge eigenvalues of M_n(1) against the oscillator levels.
    Oscillator {
        /// Comma-separated sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Killed continuous-time walk with Harper rates.
    Absorb {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        a: usize,
        /// Exit radius minus one; defaults to floor(sqrt(n)).
        #[arg(long)]
        b: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Fit horizon for the decay rate; defaults to 4 mean lifetimes.
        #[arg(long)]
        horizon: Option<f64>,
        /// Also write one recorded trajectory as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Random walks on finite groups.
    Walk {
        #[command(subcommand)]
        group: WalkGroup,
    },
    /// Histogram of the spectrum against the limiting density.
    Bulk {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        a: usize,
        #[arg(long, default_value_t = 100)]
        bins: usize,
        /// Accepted for uniformity; the computation is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the density table `(x, f2)` with this many points instead.
        #[arg(long)]
        density_points: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Every acceptance criterion at its smallest listed size.
    SelfTest {
        /// Print the command-to-operation coverage map and exit.
        #[arg(long)]
        coverage: bool,
        #[arg(long, hide = true)]
        corrupt_f2: bool,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum WalkGroup {
    /// Heisenberg group mod n, steps (+-1, 0, 0) and (0, +-1, 0).
    Heisenberg {
        /// Odd prime modulus.
        #[arg(long)]
        n: usize,
        /// Largest step count.
        #[arg(long, default_value_t = 50)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Affine group x -> a x + b mod p.
    Affine {
        /// Prime modulus, at least 5.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        k: usize,
        #[command(flatten)]
        output: Output,
    },
}

fn emit(output: &Output, default: Format, csv: impl FnOnce() -> Result<String>, json: impl FnOnce() -> Result<String>) -> Result<()> {
    let format = match output.format {
        Some(FormatArg::Csv) => Format::Csv,
        Some(FormatArg::Json) => Format::Json,
        None => default,
    };
    let text = match format {
        Format::Csv => csv()?,
        Format::Json => json()?,
    };
    match &output.out {
        Some(path) => write_atomic(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct SpectrumOut {
    n: usize,
    a: usize,
    family: Family,
    eigenvalues: Vec<f64>,
}

fn spectrum(n: usize, a: usize, family: Family, output: &Output) -> Result<()> {
    let m = match family {
        Family::Harper => build_harper(n, a)?,
        Family::Affine => build_affine_transform(n)?,
        Family::Mp3 => build_mp3_diagonal(n, a)?,
    };
    let ev = m.eigenvalues()?;
    let trace: f64 = ev.iter().sum();
    eprintln!("spectrum: n={n} a={a} size={} top={:.12} trace={trace:.3e}", ev.len(), ev[0]);
    emit(
        output,
        Format::Csv,
        || Ok(spectrum_table(&ev).to_csv()),
        || {
            to_json(&SpectrumOut {
                n,
                a,
                family,
                eigenvalues: ev.clone(),
            })
        },
    )
}

fn bound(n: usize, a: usize, k: Option<usize>, k_prime: Option<usize>, variant: VariantArg, output: &Output) -> Result<()> {
    let m = build_harper(n, a)?;
    let default_k = ((n as f64).sqrt() / 2.0) as usize;
    let (k, kp) = (k.unwrap_or(default_k), k_prime.unwrap_or(default_k));
    let (c, d) = (&m.circulant, &m.diagonal);
    let report = match variant {
        VariantArg::Theorem1 => theorem1_bound(c, d, k, kp)?,
        VariantArg::Improved => improved_bound(c, d, k, kp)?,
        VariantArg::Smallest => smallest_eigenvalue_bound(c, d, k, kp)?,
        VariantArg::Optimize => optimize_bound(c, d)?,
    };
    eprintln!(
        "bound: n={n} a={a} k={} k'={} bound={:.12}",
        report.k, report.k_prime, report.bound
    );
    emit(output, Format::Json, || Ok(record_table(&report)?.to_csv()), || to_json(&report))
}

fn oscillator(ns: &[usize], k: usize, output: &Output) -> Result<()> {
    let rows = convergence_table(ns, k)?;
    let worst = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
    eprintln!("oscillator: sizes={ns:?} levels={k} max_abs_error={worst:.6}");
    emit(output, Format::Csv, || Ok(convergence_csv(&rows).to_csv()), || to_json(&rows))
}

#[allow(clippy::too_many_arguments)]
fn absorb(
    n: usize,
    a: usize,
    b: Option<usize>,
    trials: usize,
    seed: u64,
    start: usize,
    horizon: Option<f64>,
    trace: Option<&PathBuf>,
    output: &Output,
) -> Result<()> {
    if n > MAX_ABSORB_N {
        return Err(Error::Domain(format!("absorb needs n <= {MAX_ABSORB_N}, got {n}")));
    }
    if start >= n {
        return Err(Error::Domain(format!("start {start} outside 0..{n}")));
    }
    let b = b.unwrap_or((n as f64).sqrt() as usize);
    let rates = harper_walk_rates(n, a)?;
    let survival = survival_bound_check(&rates, b, start, trials, seed)?;
    let exact = dense_lambda_star(n, a)?;
    let horizon = horizon.unwrap_or(4.0 / exact);
    let estimate = match estimate_lambda_star(&rates, trials, horizon, seed) {
        Ok(e) => Some(e.estimate),
        Err(Error::InsufficientData(msg)) => {
            eprintln!("absorb: decay-rate fit skipped: {msg}");
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(path) = trace {
        let t = simulate_killed_walk(n, &rates, b as u64, seed)?;
        write_atomic(path, &t.trace_csv().to_csv())?;
    }
    let report = AbsorbReport {
        n,
        a,
        b,
        trials,
        seed,
        start,
        clock_factor: WALK_CLOCK_FACTOR,
        survival: survival.survival.mean,
        survival_std_error: survival.survival.std_error,
        g_b: survival.g_b,
        lambda_star_estimate: estimate,
        lambda_star_exact: exact,
    };
    eprintln!(
        "absorb: n={n} a={a} b={b} seed={seed} survival={:.4} G_b={:.4} rate_exact={exact:.6}",
        report.survival, report.g_b
    );
    emit(output, Format::Json, || Ok(record_table(&report)?.to_csv()), || to_json(&report))
}

fn walk(group: &WalkGroup) -> Result<()> {
    match group {
        WalkGroup::Heisenberg { n, k, output } => {
            let step = heisenberg_step(*n)?;
            let pts = distance_curve(|j| heisenberg_chi_square(*n, j), Some(&step), *k)?;
            let mix = mixing_step(|j| heisenberg_chi_square(*n, j), MIXING_THRESHOLD, *k)?;
            eprintln!("walk heisenberg: n={n} steps={k} chi_square<={MIXING_THRESHOLD} at k={mix:?}");
            emit(output, Format::Csv, || Ok(distance_curve_csv(&pts).to_csv()), || to_json(&pts))
        }
        WalkGroup::Affine { n, k, output } => {
            let step = affine_step(*n)?;
            let pts = distance_curve(|j| affine_chi_square_bound(*n, j), Some(&step), *k)?;
            let mix = mixing_step(|j| affine_chi_square_bound(*n, j), MIXING_THRESHOLD, *k)?;
            eprintln!("walk affine: p={n} steps={k} chi_square<={MIXING_THRESHOLD} at k={mix:?}");
            emit(output, Format::Csv, || Ok(distance_curve_csv(&pts).to_csv()), || to_json(&pts))
        }
    }
}

#[derive(Serialize)]
struct BulkOut<'a> {
    report: &'a harper_core::bulk::BulkReport,
    bins: &'a [harper_core::bulk::HistogramBin],
}

fn bulk(n: usize, a: usize, bins: usize, seed: u64, density_points: Option<usize>, output: &Output) -> Result<()> {
    if let Some(points) = density_points {
        eprintln!("bulk: density table with {points} points");
        return emit(output, Format::Csv, || Ok(density_table(points).to_csv()), || {
            Err(Error::Unsupported("the density table is CSV only".into()))
        });
    }
    let (report, fig) = bulk_report(n, a, bins)?;
    eprintln!(
        "bulk: n={n} a={a} bins={bins} seed={seed} w2={:.6} max_bin_error={:.4}",
        report.wasserstein2, report.max_bin_error
    );
    emit(
        output,
        Format::Csv,
        || Ok(fig.to_table().to_csv()),
        || to_json(&BulkOut { report: &report, bins: &fig.bins }),
    )
}

/// Returns whether every criterion passed.
fn self_test(coverage: bool, corrupt_f2: bool, output: &Output) -> Result<bool> {
    if coverage {
        let map = selftest::coverage_map();
        emit(
            output,
            Format::Json,
            || {
                let mut t = harper_core::report::Table::new(&["command", "operations"]);
                for e in &map {
                    t.push(vec![e.command.to_string(), e.operations.join(";")]);
                }
                Ok(t.to_csv())
            },
            || to_json(&map),
        )?;
        return Ok(true);
    }
    let summary = selftest::run(SelfTestOptions { corrupt_f2 });
    for o in &summary.outcomes {
        eprintln!("{}", o.line());
        for c in &o.checks {
            let mark = if c.passed { "ok" } else if c.known_gap { "gap" } else { "FAILED" };
            eprintln!("       {mark:<6} {}: {}", c.name, c.detail);
        }
    }
    if output.out.is_some() || output.format.is_some() {
        emit(output, Format::Json, || Err(Error::Unsupported("self-test reports are JSON only".into())), || {
            to_json(&summary)
        })?;
    }
    Ok(summary.passed())
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("HARPER_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| Error::Domain(format!("HARPER_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Numerical(e.to_string()))
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads()?;
    match &cli.command {
        Command::Spectrum { n, a, family, output } => spectrum(*n, *a, *family, output)?,
        Command::Bound {
            n,
            a,
            k,
            k_prime,
            variant,
            output,
        } => bound(*n, *a, *k, *k_prime, *variant, output)?,
        Command::Oscillator { n, k, output } => oscillator(n, *k, output)?,
        Command::Absorb {
            n,
            a,
            b,
            trials,
            seed,
            start,
            horizon,
            trace,
            output,
        } => absorb(*n, *a, *b, *trials, *seed, *start, *horizon, trace.as_ref(), output)?,
        Command::Walk { group } => walk(group)?,
        Command::Bulk {
            n,
            a,
            bins,
            seed,
            density_points,
            output,
        } => bulk(*n, *a, *bins, *seed, *density_points, output)?,
        Command::SelfTest {
            coverage,
            corrupt_f2,
            output,
        } => return self_test(*coverage, *corrupt_f2, output),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_NUMERICAL),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() || matches!(e, Error::Io(_)) {
                ExitCode::from(EXIT_VALIDATION)
            } else {
                ExitCode::from(EXIT_NUMERICAL)
            }
        }
    }
}
