//! Command-line front end: `pack`, `verify`, `render`, `sweep` and
//! `bounds-check`.
//!
//! Exit codes: 0 success, 1 internal or I/O error, 2 packing or verification
//! failure, 64 usage error, 65 unreadable log.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Error;
use crate::geometry::DEFAULT_OVERLAP_TOL;
use crate::io::{
    read_log, render_svg, write_log, write_summary_csv, LogError, PlacementLog, SvgOptions,
    SweepRow,
};
use crate::numerics::{
    bracket_power_sum, bracket_square_sum, partial_power_sum, seed_height_margin, Exponent,
};
use crate::packer::{pack, PackOptions, PackingReport};
use crate::verifier::{
    verify_bruteforce, verify_sweepline, Tolerances, BRUTEFORCE_LIMIT, DEFAULT_AREA_TOL,
};

/// `println!` that ignores a closed stdout.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(io::stdout(), $($arg)*);
    }};
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Debug, Parser)]
#[command(
    name = "zetapack",
    version,
    about = "Pack the squares of side n^-t into a zeta(2t) x 1 rectangle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pack S_1 .. S_n and verify the result.
    Pack(PackArgs),
    /// Re-verify a placement log.
    Verify(VerifyArgs),
    /// Render a placement log as SVG.
    Render(RenderArgs),
    /// Pack over a grid of exponents and write a CSV summary.
    Sweep(SweepArgs),
    /// Randomized check of the integral bounds on power sums.
    BoundsCheck(BoundsArgs),
}

#[derive(Debug, Clone, Copy, Args)]
pub struct TolArgs {
    /// Largest acceptable area defect, container units.
    #[arg(long, default_value_t = DEFAULT_AREA_TOL)]
    pub tol_area: f64,
    /// Interior penetration below which rectangles count as touching.
    #[arg(long, default_value_t = DEFAULT_OVERLAP_TOL)]
    pub tol_overlap: f64,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            overlap: self.tol_overlap,
            area: self.tol_area,
        }
    }
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse::<Exponent>().map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct PackArgs {
    /// Exponent t in (1/2, 1]; also `two-thirds` or `log3-2`.
    #[arg(long, value_parser = parse_exponent)]
    pub t: Exponent,
    /// Index of the last square to place (at least 4).
    #[arg(long, value_parser = clap::value_parser!(u64).range(4..))]
    pub n: u64,
    /// Placement log destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG rendering destination.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Verify the partial packing every this many outer steps (0: only at the end).
    #[arg(long, default_value_t = 0)]
    pub verify_interval: u64,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Placement log to check.
    pub log: PathBuf,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Placement log to draw.
    pub log: PathBuf,
    /// SVG destination.
    #[arg(long)]
    pub svg: PathBuf,
    /// Draw at most this many squares.
    #[arg(long, default_value_t = 20_000)]
    pub max_squares: usize,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_exponent)]
    pub sweep_min: Exponent,
    #[arg(long, value_parser = parse_exponent)]
    pub sweep_max: Exponent,
    /// Number of grid points, endpoints included (at least 2).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub sweep_steps: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(4..))]
    pub n: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// PRNG seed; the same seed draws the same samples.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion
                | clap::error::ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match cli.command {
        Command::Pack(a) => cmd_pack(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Render(a) => cmd_render(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::BoundsCheck(a) => cmd_bounds_check(&a),
    }
}

fn describe(report: &PackingReport) -> String {
    let s = &report.summary;
    let status = match report.failed_at {
        None => "complete".to_string(),
        Some(n) => format!("FAILED at n = {n}"),
    };
    format!(
        "t = {}  n_max = {}  {status}\n  placed {} squares, {} residual boxes, conservation defect {:e}\n  \
         outer steps {} (snug {}, cut {}), seed height {}, max height {}\n  \
         monitor violations: area tail {}, height growth {}, area bound {}, fit height {}, slab frames {}/{}",
        report.t,
        report.n_max,
        report.placements.len(),
        report.residuals.len(),
        report.conservation_defect,
        s.steps,
        s.snug_steps,
        s.cut_steps,
        s.seed_height,
        s.max_height,
        s.area_tail_violations,
        s.height_growth_violations,
        s.area_bound_violations,
        s.fit_height_violations,
        s.frame_violations,
        s.frames_checked,
    )
}

pub fn cmd_pack(args: &PackArgs) -> i32 {
    let opts = PackOptions {
        verify_interval: args.verify_interval,
        tolerances: args.tol.tolerances(),
        ..PackOptions::new(args.n)
    };
    let report = match pack(args.t, &opts) {
        Ok(r) => r,
        Err(e @ Error::SeedInfeasible { .. }) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INTERNAL;
        }
    };
    let check = verify_sweepline(
        &report.placements,
        &report.residuals,
        &report.container,
        opts.tolerances,
    );
    say!("{}", describe(&report));
    say!(
        "  verification: {} (area defect {:e}, overlaps {}, conflicts {}, outside {})",
        if check.passed { "passed" } else { "FAILED" },
        check.area_defect,
        check.overlap_pairs.len(),
        check.residual_conflicts.len(),
        check.out_of_container.len()
    );

    if let Some(path) = &args.out {
        if let Err(e) = write_log(&report, path) {
            eprintln!("error: writing {}: {e}", path.display());
            return EXIT_INTERNAL;
        }
    }
    if let Some(path) = &args.svg {
        if let Err(e) = fs::write(path, render_svg(&report, &SvgOptions::default())) {
            eprintln!("error: writing {}: {e}", path.display());
            return EXIT_INTERNAL;
        }
    }
    if report.succeeded() && check.passed {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

fn log_error_code(e: &LogError) -> i32 {
    match e {
        LogError::Io(_) => EXIT_INTERNAL,
        _ => EXIT_DATA,
    }
}

pub fn cmd_verify(args: &VerifyArgs) -> i32 {
    let log = match fs::File::open(&args.log)
        .map_err(LogError::from)
        .and_then(crate::io::log::read_placement_log)
    {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {}: {e}", args.log.display());
            return log_error_code(&e);
        }
    };
    let report = match log.to_report() {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", args.log.display());
            return log_error_code(&e);
        }
    };
    let issues = log.consistency_issues();
    for issue in issues.iter().take(10) {
        say!("  record issue: {issue}");
    }

    let tol = args.tol.tolerances();
    let sweep = verify_sweepline(
        &report.placements,
        &report.residuals,
        &report.container,
        tol,
    );
    if report.placements.len() + report.residuals.len() <= BRUTEFORCE_LIMIT {
        match verify_bruteforce(
            &report.placements,
            &report.residuals,
            &report.container,
            tol,
        ) {
            Ok(brute) if brute != sweep => {
                eprintln!("error: verifiers disagree");
                return EXIT_INTERNAL;
            }
            Ok(_) => say!("  brute-force verifier agrees"),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_INTERNAL;
            }
        }
    }
    say!(
        "{}: {} squares, {} residual boxes, area defect {:e}, overlaps {}, conflicts {}, outside {}, malformed {}",
        args.log.display(),
        report.placements.len(),
        report.residuals.len(),
        sweep.area_defect,
        sweep.overlap_pairs.len(),
        sweep.residual_conflicts.len(),
        sweep.out_of_container.len(),
        sweep.malformed.len(),
    );
    if let Some(n) = report.failed_at {
        say!("  note: run failed at n = {n}");
    }
    if sweep.passed && issues.is_empty() {
        say!("  passed");
        EXIT_OK
    } else {
        say!("  FAILED");
        EXIT_FAILURE
    }
}

pub fn cmd_render(args: &RenderArgs) -> i32 {
    let report = match read_log(&args.log) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", args.log.display());
            return log_error_code(&e);
        }
    };
    let opts = SvgOptions {
        max_squares_drawn: args.max_squares,
        ..SvgOptions::default()
    };
    match fs::write(&args.svg, render_svg(&report, &opts)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: writing {}: {e}", args.svg.display());
            EXIT_INTERNAL
        }
    }
}

/// Grid of `steps` exponents from `lo` to `hi`; both endpoints exact.
pub fn sweep_grid(lo: Exponent, hi: Exponent, steps: u64) -> Vec<f64> {
    let (a, b) = (lo.get(), hi.get());
    (0..steps)
        .map(|i| match i {
            0 => a,
            i if i + 1 == steps => b,
            i => a + (b - a) * i as f64 / (steps - 1) as f64,
        })
        .collect()
}

pub fn in_proven_range(t: f64) -> bool {
    t >= Exponent::LOG3_2.get() && t <= Exponent::TWO_THIRDS.get()
}

/// Packs and verifies one grid point.
pub fn sweep_point(t: f64, n_max: u64, tol: Tolerances) -> SweepRow {
    let mut row = SweepRow {
        t,
        n_max,
        status: "error".into(),
        failed_at: None,
        placed: 0,
        conservation_defect: None,
        max_height: None,
        f: None,
        g: None,
        verified: false,
        monitors_clean: false,
        in_proven_range: in_proven_range(t),
    };
    let Ok(exp) = Exponent::new(t) else {
        return row;
    };
    if let Ok(m) = seed_height_margin(exp) {
        row.f = Some(m.height);
        row.g = Some(m.budget);
    }
    let opts = PackOptions {
        tolerances: tol,
        ..PackOptions::new(n_max)
    };
    match pack(exp, &opts) {
        Ok(report) => {
            let check = verify_sweepline(
                &report.placements,
                &report.residuals,
                &report.container,
                tol,
            );
            row.status = if report.succeeded() { "ok" } else { "failed" }.into();
            row.failed_at = report.failed_at;
            row.placed = report.placements.len() as u64;
            row.conservation_defect = Some(report.conservation_defect);
            row.max_height = Some(report.summary.max_height);
            row.verified = check.passed;
            row.monitors_clean = report.summary.clean();
        }
        Err(Error::SeedInfeasible { .. }) => row.status = "seed-infeasible".into(),
        Err(e) => log::error!("t = {t}: {e}"),
    }
    row
}

pub fn cmd_sweep(args: &SweepArgs) -> i32 {
    if args.sweep_min >= args.sweep_max {
        eprintln!("error: --sweep-min must be below --sweep-max");
        return EXIT_USAGE;
    }
    let grid = sweep_grid(args.sweep_min, args.sweep_max, args.sweep_steps);
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INTERNAL;
        }
    };
    let tol = args.tol.tolerances();
    let mut rows: Vec<SweepRow> = pool.install(|| {
        grid.par_iter()
            .map(|&t| sweep_point(t, args.n, tol))
            .collect()
    });
    rows.sort_by(|a, b| a.t.total_cmp(&b.t));

    let written = match &args.out {
        Some(path) => fs::File::create(path)
            .map_err(csv::Error::from)
            .and_then(|f| write_summary_csv(&rows, f)),
        None => write_summary_csv(&rows, io::stdout().lock()),
    };
    if let Err(e) = written {
        eprintln!("error: writing summary: {e}");
        return EXIT_INTERNAL;
    }
    let bad: Vec<f64> = rows
        .iter()
        .filter(|r| r.in_proven_range && !(r.status == "ok" && r.verified))
        .map(|r| r.t)
        .collect();
    if bad.is_empty() {
        EXIT_OK
    } else {
        eprintln!("packing failed inside [log3 2, 2/3] at t = {bad:?}");
        EXIT_FAILURE
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsSample {
    pub a: u64,
    pub b: u64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsOutcome {
    pub samples: Vec<BoundsSample>,
    /// Samples where the `j^-t` bracket failed to contain the direct sum.
    pub power_violations: Vec<BoundsSample>,
    /// Samples where the `j^-2t` bracket failed to contain the direct sum.
    pub square_violations: Vec<BoundsSample>,
}

impl BoundsOutcome {
    pub fn passed(&self) -> bool {
        self.power_violations.is_empty() && self.square_violations.is_empty()
    }
}

/// Draws `samples` triples `1 <= a <= b <= 10^4`, `t in [0.51, 0.99)`, every
/// tenth with `a = b`, and checks both brackets against direct sums.
pub fn bounds_check(samples: u64, seed: u64) -> BoundsOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = BoundsOutcome {
        samples: Vec::new(),
        power_violations: Vec::new(),
        square_violations: Vec::new(),
    };
    for k in 0..samples {
        let a = rng.gen_range(1..=10_000u64);
        let b = if k % 10 == 0 {
            a
        } else {
            rng.gen_range(a..=10_000u64)
        };
        let t = rng.gen_range(0.51..0.99);
        let sample = BoundsSample { a, b, t };
        out.samples.push(sample);

        let exp = Exponent::new(t).expect("sampled inside (1/2, 1)");
        let direct = partial_power_sum(a, b, t).expect("range within guard");
        if !bracket_power_sum(a, b, exp).is_ok_and(|br| br.contains_strict(direct)) {
            out.power_violations.push(sample);
        }
        let direct = partial_power_sum(a, b, 2.0 * t).expect("range within guard");
        if !bracket_square_sum(a, Some(b), exp).is_ok_and(|br| br.contains_strict(direct)) {
            out.square_violations.push(sample);
        }
    }
    out
}

pub fn cmd_bounds_check(args: &BoundsArgs) -> i32 {
    let outcome = bounds_check(args.samples, args.seed);
    let mut stdout = io::stdout().lock();
    let _ = writeln!(
        stdout,
        "{} samples (seed {}): {} power-sum violations, {} square-sum violations",
        outcome.samples.len(),
        args.seed,
        outcome.power_violations.len(),
        outcome.square_violations.len()
    );
    for s in outcome
        .power_violations
        .iter()
        .chain(&outcome.square_violations)
        .take(10)
    {
        let _ = writeln!(
            stdout,
            "  violation at a = {}, b = {}, t = {}",
            s.a, s.b, s.t
        );
    }
    if outcome.passed() {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

/// Reads a log into its raw form; used by tests and tooling.
pub fn load_log(path: &std::path::Path) -> Result<PlacementLog, LogError> {
    crate::io::log::read_placement_log(fs::File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_exact() {
        let g = sweep_grid(Exponent::LOG3_2, Exponent::TWO_THIRDS, 8);
        assert_eq!(g.len(), 8);
        assert_eq!(g[0], Exponent::LOG3_2.get());
        assert_eq!(g[7], 2.0 / 3.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().all(|&t| in_proven_range(t)));
    }

    #[test]
    fn bounds_check_is_reproducible() {
        let a = bounds_check(200, 7);
        let b = bounds_check(200, 7);
        assert_eq!(a, b);
        assert!(a.passed());
        assert!(a.samples.iter().any(|s| s.a == s.b));
        assert_ne!(a.samples, bounds_check(200, 8).samples);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(
            run(["zetapack", "pack", "--t", "0.4", "--n", "10"]),
            EXIT_USAGE
        );
        assert_eq!(
            run(["zetapack", "pack", "--t", "0.6", "--n", "3"]),
            EXIT_USAGE
        );
        assert_eq!(
            run(["zetapack", "pack", "--t", "0.6", "--n", "10", "--bogus"]),
            EXIT_USAGE
        );
        assert_eq!(run(["zetapack", "--help"]), EXIT_OK);
    }

    #[test]
    fn seed_infeasible_is_failure() {
        assert_eq!(
            run(["zetapack", "pack", "--t", "0.99", "--n", "10"]),
            EXIT_FAILURE
        );
    }
}
