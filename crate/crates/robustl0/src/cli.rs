//! The `robustl0` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O or file-format error, 2 usage error,
//! 3 decode finished but failed the success criterion, 4 decoder variant
//! does not match the noise level, 5 estimator degenerate.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use robustl0_core::bench::{
    delta_grid, success_check, transition_point, SuccessCriterion, SweepConfig, TransitionRecord,
    DEFAULT_CLIP, DEFAULT_FLOOR,
};
use robustl0_core::decode::{decode_variant, DecoderOptions, Variant};
use robustl0_core::estimate::{
    em_estimate, quantile_noise_estimate, EmConfig, EstimateFlag, EstimateResult,
    DEFAULT_QUANTILE_ITERATIONS,
};
use robustl0_core::model::{generate_problem, GenParams};
use robustl0_core::posterior::{empirical_posteriors, GaussianPosterior};
use robustl0_core::rng::seeded;

use crate::exec::{build_pool, resolve_jobs, RayonExecutor};
use crate::formats::{
    read_curve, read_estimate, read_problem, read_records, read_report, write_curve,
    write_estimate, write_problem, write_report, CurveRow,
};
use crate::harness::SweepRunner;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DECODE_FAILED: u8 = 3;
pub const EXIT_NOISE_MISMATCH: u8 = 4;
pub const EXIT_DEGENERATE: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "robustl0",
    version,
    about = "Sparse recovery from noisy expander sketches"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a problem instance and write it as JSON.
    Gen(GenArgs),
    /// Decode a problem file and write the report as JSON.
    Decode(DecodeArgs),
    /// Write analytical (and optionally empirical) posterior curves as CSV.
    Probs(ProbsArgs),
    /// Estimate noise level (and signal level, sparsity) from a sketch.
    Estimate(EstimateArgs),
    /// Phase-transition sweep over the undersampling grid.
    Phase(PhaseArgs),
    /// Transition sweep over the noise-level grid at fixed undersampling.
    SigmaSweep(SigmaSweepArgs),
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    sigma_s: f64,
    #[arg(long)]
    sigma_n: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Re-read and check the written file.
    #[arg(long)]
    validate: bool,
}

#[derive(Debug, Args)]
struct DecoderFlags {
    /// Minimum n_e - n_z for an update [default: 2.5, capped at d].
    #[arg(long)]
    alpha: Option<f64>,
    /// Sweep decrement for the robust variants [default: from the schedule].
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Noise standard deviations allowed in the success threshold.
    #[arg(long, default_value_t = 1.0)]
    c1: f64,
    /// Cap on the relative-error threshold.
    #[arg(long, default_value_t = DEFAULT_CLIP)]
    clip: f64,
}

impl DecoderFlags {
    fn options(&self) -> DecoderOptions {
        DecoderOptions {
            alpha: self.alpha,
            c: self.c,
            max_iters: self.max_iters,
        }
    }

    fn criterion(&self) -> Result<SuccessCriterion, Failure> {
        if !(self.c1 >= 0.0) || !(self.clip > 0.0 && self.clip <= 1.0) {
            return Err(Failure::usage("--c1 must be >= 0 and --clip in (0, 1]"));
        }
        Ok(SuccessCriterion {
            c1: self.c1,
            clip: self.clip,
            floor: DEFAULT_FLOOR,
        })
    }
}

#[derive(Debug, Args)]
struct DecodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    decoder: DecoderFlags,
    /// Worker threads [default: $ROBUSTL0_JOBS or all cores].
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    validate: bool,
}

#[derive(Debug, Args)]
struct ProbsArgs {
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    sigma_s: f64,
    #[arg(long)]
    sigma_n: f64,
    /// Half-width of the symmetric grid.
    #[arg(long)]
    omega_max: f64,
    #[arg(long)]
    points: usize,
    /// Instances for the empirical columns; needs --n and --seed.
    #[arg(long, requires_all = ["n", "seed"])]
    empirical_instances: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    validate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum MethodArg {
    Quantile,
    Em,
}

#[derive(Debug, Args)]
struct EstimateArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Column degree [default: from the file].
    #[arg(long)]
    d: Option<usize>,
    /// Known sparsity ratio (quantile).
    #[arg(long)]
    rho: Option<f64>,
    /// Known signal level (quantile).
    #[arg(long, default_value_t = 1.0)]
    sigma_s: f64,
    /// Refinement steps (quantile).
    #[arg(long, default_value_t = DEFAULT_QUANTILE_ITERATIONS)]
    iterations: usize,
    /// EM iteration cap.
    #[arg(long, default_value_t = EmConfig::default().max_iters)]
    max_em_iters: usize,
    /// EM relative log-likelihood tolerance.
    #[arg(long, default_value_t = EmConfig::default().tol)]
    tol: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    validate: bool,
}

#[derive(Debug, Args)]
struct SweepFlags {
    #[arg(long, value_parser = parse_variant)]
    variant: Variant,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    sigma_s: f64,
    #[arg(long)]
    trials: usize,
    #[arg(long)]
    seed_base: u64,
    /// Results CSV; existing cells are reused and new ones appended.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    decoder: DecoderFlags,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    validate: bool,
}

#[derive(Debug, Args)]
struct PhaseArgs {
    #[command(flatten)]
    sweep: SweepFlags,
    #[arg(long)]
    sigma_n: f64,
    /// Comma-separated subset of undersampling ratios [default: the 24-point grid].
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
struct SigmaSweepArgs {
    #[command(flatten)]
    sweep: SweepFlags,
    #[arg(long)]
    delta: f64,
    /// Optional CSV of per-noise-level summaries (sigma_n, rho_star, tol_rho).
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|_| {
        let names: Vec<&str> = Variant::ALL.iter().map(|v| v.name()).collect();
        format!("expected one of: {}", names.join(", "))
    })
}

/// An error with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn new(code: u8, msg: impl Display) -> Self {
        Failure {
            code,
            msg: msg.to_string(),
        }
    }

    fn usage(msg: impl Display) -> Self {
        Failure::new(EXIT_USAGE, msg)
    }
}

impl From<crate::Error> for Failure {
    fn from(e: crate::Error) -> Self {
        match e {
            crate::Error::Core(c) => c.into(),
            other => Failure::new(EXIT_IO, other),
        }
    }
}

impl From<robustl0_core::Error> for Failure {
    fn from(e: robustl0_core::Error) -> Self {
        use robustl0_core::Error as E;
        let code = match e {
            E::DegenerateNoise | E::NoisySketch => EXIT_NOISE_MISMATCH,
            E::Degenerate(_) | E::EmptyInput => EXIT_DEGENERATE,
            _ => EXIT_USAGE,
        };
        Failure::new(code, e)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Probs(a) => cmd_probs(a),
        Command::Estimate(a) => cmd_estimate(a),
        Command::Phase(a) => cmd_phase(a),
        Command::SigmaSweep(a) => cmd_sigma_sweep(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            f.code
        }
    }
}

fn jobs(flag: Option<usize>) -> Result<usize, Failure> {
    resolve_jobs(flag).map_err(Failure::usage)
}

fn cmd_gen(a: GenArgs) -> Result<u8, Failure> {
    let params = GenParams {
        n: a.n,
        m: a.m,
        k: a.k,
        d: a.d,
        sigma_s: a.sigma_s,
        sigma_n: a.sigma_n,
        seed: a.seed,
    };
    params.validate()?;
    let problem = generate_problem(&params, &mut seeded(a.seed))?;
    write_problem(&a.out, &problem)?;
    if a.validate {
        let back = read_problem(&a.out)?.into_instance();
        if back.as_ref() != Some(&problem) {
            return Err(Failure::new(
                EXIT_IO,
                format!("{}: re-read differs from written problem", a.out.display()),
            ));
        }
    }
    println!(
        "gen n={} m={} k={} d={} sigma_s={} sigma_n={} seed={} noise_l1={:.6e} -> {}",
        a.n,
        a.m,
        a.k,
        a.d,
        a.sigma_s,
        a.sigma_n,
        a.seed,
        problem.noise_l1(),
        a.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_decode(a: DecodeArgs) -> Result<u8, Failure> {
    let criterion = a.decoder.criterion()?;
    let pool = build_pool(jobs(a.jobs)?);
    let data = read_problem(&a.input)?;
    let p = data.params;
    let start = Instant::now();
    let mut report = pool.install(|| {
        decode_variant(
            &data.matrix,
            &data.yhat,
            a.variant,
            p.k,
            p.sigma_s,
            p.sigma_n,
            &a.decoder.options(),
            &RayonExecutor,
        )
    })?;
    report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    write_report(&a.out, &report, a.variant)?;
    if a.validate {
        let (back, _) = read_report(&a.out)?.to_report(p.n, &a.out)?;
        if back != report {
            return Err(Failure::new(
                EXIT_IO,
                format!("{}: re-read differs from written report", a.out.display()),
            ));
        }
    }
    let success = match &data.x {
        Some(x) if x.nnz() > 0 => success_check(x, &report.xhat, &criterion, p.m, p.sigma_n)?,
        Some(_) => report.xhat.nnz() == 0,
        None => report.converged,
    };
    println!(
        "decode variant={} iterations={} converged={} success={} residual_l1={:.6e} wall_ms={:.1} -> {}",
        a.variant,
        report.iterations,
        report.converged,
        success,
        report.final_residual_l1(),
        report.wall_ms,
        a.out.display()
    );
    Ok(if success { EXIT_OK } else { EXIT_DECODE_FAILED })
}

/// `points` equally spaced values on `[-omega_max, omega_max]` and the bin
/// edges halfway between them.
fn omega_grid(omega_max: f64, points: usize) -> (Vec<f64>, Vec<f64>) {
    if points == 1 {
        return (vec![0.0], vec![-omega_max, omega_max]);
    }
    let span = (points - 1) as f64;
    let at = |twice: f64| omega_max * (twice - span) / span;
    let grid = (0..points).map(|i| at(2.0 * i as f64)).collect();
    let edges = (0..=points).map(|i| at(2.0 * i as f64 - 1.0)).collect();
    (grid, edges)
}

fn cmd_probs(a: ProbsArgs) -> Result<u8, Failure> {
    if a.points == 0 {
        return Err(Failure::usage("--points must be at least 1"));
    }
    if !(a.omega_max > 0.0 && a.omega_max.is_finite()) {
        return Err(Failure::usage("--omega-max must be positive"));
    }
    if !(a.delta > 0.0 && a.delta < 1.0) {
        return Err(Failure::usage("--delta must lie in (0, 1)"));
    }
    if a.sigma_n == 0.0 {
        return Err(Failure::usage(
            "--sigma-n must be positive for the posterior curves",
        ));
    }
    let post = GaussianPosterior::new(a.sigma_s, a.sigma_n, a.d, a.rho)?;
    let (grid, edges) = omega_grid(a.omega_max, a.points);

    let empirical = match a.empirical_instances {
        None | Some(0) => None,
        Some(count) => {
            let (n, seed) = (a.n.unwrap_or_default(), a.seed.unwrap_or_default());
            let pool = build_pool(jobs(a.jobs)?);
            let instances = pool.install(|| {
                (0..count)
                    .into_par_iter()
                    .map(|i| {
                        let s = seed.wrapping_add(i as u64);
                        let params =
                            GenParams::from_ratios(n, a.delta, a.rho, a.d, a.sigma_s, a.sigma_n, s);
                        generate_problem(&params, &mut seeded(s))
                    })
                    .collect::<robustl0_core::Result<Vec<_>>>()
            })?;
            let mut rng = seeded(seed.wrapping_add(count as u64));
            Some(empirical_posteriors(&instances, &edges, &mut rng)?)
        }
    };

    let rows: Vec<CurveRow> = grid
        .iter()
        .enumerate()
        .map(|(b, &omega)| CurveRow {
            omega,
            pz: post.pz(omega),
            pe: post.pe(omega),
            pz_scaled: post.pz_scaled(omega),
            pe_scaled: post.pe_scaled(omega),
            pz_hat: empirical.as_ref().and_then(|e| e.pz_hat[b]),
            pe_hat: empirical.as_ref().and_then(|e| e.pe_hat[b]),
            bin_count: empirical.as_ref().map(|e| e.counts_z[b]),
        })
        .collect();
    write_curve(&a.out, &rows)?;
    if a.validate && read_curve(&a.out)?.len() != rows.len() {
        return Err(Failure::new(
            EXIT_IO,
            format!("{}: row count differs on re-read", a.out.display()),
        ));
    }
    println!(
        "probs points={} ell={} peak_pz={:.6} peak_pe={:.6} empirical={} -> {}",
        rows.len(),
        post.ell(),
        post.peak_pz(),
        post.peak_pe(),
        empirical.is_some(),
        a.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_estimate(a: EstimateArgs) -> Result<u8, Failure> {
    let data = read_problem(&a.input)?;
    let d = a.d.unwrap_or(data.params.d);
    let result: EstimateResult = match a.method {
        MethodArg::Quantile => {
            let rho = a
                .rho
                .ok_or_else(|| Failure::usage("--method quantile needs --rho"))?;
            quantile_noise_estimate(&data.yhat, d, rho, a.sigma_s, a.iterations)?
        }
        MethodArg::Em => {
            let config = EmConfig {
                max_iters: a.max_em_iters,
                tol: a.tol,
                ..EmConfig::default()
            };
            em_estimate(&data.yhat, d, &config)?.0
        }
    };
    write_estimate(&a.out, &result)?;
    if a.validate {
        read_estimate(&a.out)?;
    }
    let fmt_opt = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.6e}"));
    println!(
        "estimate method={} sigma_n_hat={:.6e} sigma_s_hat={} rho_hat={} iterations={} -> {}",
        result.method.name(),
        result.sigma_n_hat,
        fmt_opt(result.sigma_s_hat),
        fmt_opt(result.rho_hat),
        result.iterations,
        a.out.display()
    );
    if result.flags.contains(&EstimateFlag::SingleComponent) {
        eprintln!(
            "error: estimator degenerate: {}",
            EstimateFlag::SingleComponent.name()
        );
        return Ok(EXIT_DEGENERATE);
    }
    Ok(EXIT_OK)
}

fn sweep_config(f: &SweepFlags, delta: f64, sigma_n: f64) -> Result<SweepConfig, Failure> {
    if f.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    match (f.variant, sigma_n > 0.0) {
        (Variant::ParallelL0, true) => return Err(robustl0_core::Error::NoisySketch.into()),
        (v, false) if v != Variant::ParallelL0 => {
            return Err(robustl0_core::Error::DegenerateNoise.into())
        }
        _ => {}
    }
    Ok(SweepConfig {
        variant: f.variant,
        n: f.n,
        delta,
        d: f.d,
        sigma_s: f.sigma_s,
        sigma_n,
        criterion: f.decoder.criterion()?,
        trials: f.trials,
        seed_base: f.seed_base,
        options: f.decoder.options(),
    })
}

fn validate_records(path: &Path, expected: usize) -> Result<(), Failure> {
    let got = read_records(path)?.len();
    if got < expected {
        return Err(Failure::new(
            EXIT_IO,
            format!(
                "{}: {got} rows, expected at least {expected}",
                path.display()
            ),
        ));
    }
    Ok(())
}

fn fractions(records: &[TransitionRecord]) -> Vec<(f64, f64)> {
    records.iter().map(|r| (r.rho, r.fraction())).collect()
}

fn cmd_phase(a: PhaseArgs) -> Result<u8, Failure> {
    let deltas = a.deltas.clone().unwrap_or_else(delta_grid);
    if deltas.is_empty() || deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(Failure::usage("--deltas must lie in (0, 1)"));
    }
    let base = sweep_config(&a.sweep, deltas[0], a.sigma_n)?;
    let mut runner = SweepRunner::new(jobs(a.sweep.jobs)?, Some(&a.sweep.out))?;
    let mut total = 0;
    let stdout = std::io::stdout();
    for &delta in &deltas {
        let records = runner.rho_sweep(&SweepConfig { delta, ..base })?;
        total += records.len();
        let tp = transition_point(&fractions(&records), 0.5)?;
        let _ = writeln!(
            stdout.lock(),
            "phase variant={} delta={delta:.6} cells={} rho_star={:.4}{}",
            base.variant,
            records.len(),
            tp.rho_star,
            if tp.undefined { " (boundary)" } else { "" }
        );
    }
    if a.sweep.validate {
        validate_records(&a.sweep.out, total)?;
    }
    println!(
        "phase cells={total} computed={} -> {}",
        runner.computed,
        a.sweep.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_sigma_sweep(a: SigmaSweepArgs) -> Result<u8, Failure> {
    if !(a.delta > 0.0 && a.delta < 1.0) {
        return Err(Failure::usage("--delta must lie in (0, 1)"));
    }
    if a.sweep.variant == Variant::ParallelL0 {
        return Err(robustl0_core::Error::DegenerateNoise.into());
    }
    // any positive level passes the variant check; the sweep sets its own
    let base = sweep_config(&a.sweep, a.delta, 1.0)?;
    let mut runner = SweepRunner::new(jobs(a.sweep.jobs)?, Some(&a.sweep.out))?;
    let (records, points) = runner.sigma_sweep(&base)?;
    for p in &points {
        println!(
            "sigma-sweep sigma_n={:.6e} rho_star={} tol_rho={:.6}",
            p.sigma_n,
            p.rho_star.map_or("none".to_string(), |r| format!("{r:.2}")),
            p.tol_rho
        );
    }
    if let Some(path) = &a.summary {
        let err = |source| crate::Error::Csv {
            path: path.clone(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(err)?;
        w.write_record(["sigma_n", "rho_star", "tol_rho"])
            .map_err(err)?;
        for p in &points {
            let rho = p.rho_star.map_or(String::new(), |r| r.to_string());
            w.write_record([p.sigma_n.to_string(), rho, p.tol_rho.to_string()])
                .map_err(err)?;
        }
        w.flush().map_err(|e| crate::Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    if a.sweep.validate {
        validate_records(&a.sweep.out, records.len())?;
    }
    println!(
        "sigma-sweep cells={} computed={} -> {}",
        records.len(),
        runner.computed,
        a.sweep.out.display()
    );
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_and_edges() {
        let (g, e) = omega_grid(1.0, 5);
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(e.len(), 6);
        assert!(g.iter().enumerate().all(|(i, &w)| e[i] < w && w < e[i + 1]));
        assert_eq!(omega_grid(2.0, 1), (vec![0.0], vec![-2.0, 2.0]));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["robustl0", "gen", "--n", "10"]), EXIT_USAGE);
        assert_eq!(run(["robustl0", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["robustl0", "--help"]), EXIT_OK);
    }
}
