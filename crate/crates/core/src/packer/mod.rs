//! The packing procedure: a recursive slab filler (Algorithm b) driven by an
//! outer loop over the residual box set (Algorithm c), started from a fixed
//! three-square seed.
//!
//! Both loops run until square `n_max` has been placed. Anything still in
//! flight at that point, including slabs that were cut but not yet filled, is
//! returned as residual boxes so the placements and residuals always tile
//! the region exactly.

mod monitor;
mod seed;

pub use monitor::{
    monitor_area_bound, monitor_area_tail, monitor_fit_height, monitor_height_growth, Branch,
    FrameCheck, FrameStats, MonitorSummary, TraceRecord, MONITOR_TOL,
};
pub use seed::{seed_container, Seed};

use crate::boxset::BoxSet;
use crate::error::{Error, Result};
use crate::geometry::{
    place_square_snug, split_along, split_long, Axis, BoxIds, OrientedBox, PlacedSquare, Rect,
};
use crate::numerics::{
    compensated_sum, power_neg, tail_area_lower, CompensatedSum, Exponent, DEFAULT_ZETA_TOL,
};
use crate::verifier::{verify_sweepline, Tolerances};

/// Index of the first square the outer loop places after seeding.
pub const FIRST_UNSEEDED: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PackOptions {
    /// Stop once this square is placed.
    pub n_max: u64,
    /// Run the geometric verifier every this many outer steps; 0 disables.
    pub verify_interval: u64,
    pub tolerances: Tolerances,
    pub zeta_tol: f64,
}

impl PackOptions {
    pub fn new(n_max: u64) -> Self {
        PackOptions {
            n_max,
            verify_interval: 0,
            tolerances: Tolerances::default(),
            zeta_tol: DEFAULT_ZETA_TOL,
        }
    }
}

/// Result of filling one slab.
#[derive(Debug, Clone)]
pub struct BResult {
    /// One past the last square packed; `None` when the budget cut the run
    /// short.
    pub m: Option<u64>,
    pub residuals: Vec<OrientedBox>,
    pub placements: Vec<PlacedSquare>,
    pub terminated_naturally: bool,
    pub frames: FrameStats,
}

#[derive(Debug, Clone)]
pub struct PackingReport {
    pub t: Exponent,
    pub n_max: u64,
    pub container: Rect,
    /// `zeta(2t)` when the container was seeded.
    pub zeta: Option<f64>,
    /// In index order.
    pub placements: Vec<PlacedSquare>,
    /// In id order.
    pub residuals: Vec<OrientedBox>,
    pub failed_at: Option<u64>,
    /// Empty for reports read back from a log.
    pub trace: Vec<TraceRecord>,
    pub frames: FrameStats,
    pub summary: MonitorSummary,
    /// `|region area - placed area - residual area|`.
    pub conservation_defect: f64,
}

impl PackingReport {
    pub fn succeeded(&self) -> bool {
        self.failed_at.is_none()
    }

    pub fn residual_area(&self) -> f64 {
        compensated_sum(self.residuals.iter().map(|b| b.area()))
    }

    pub fn placed_area(&self) -> f64 {
        compensated_sum(self.placements.iter().map(|p| p.rect.area()))
    }
}

struct Frame {
    n: u64,
    /// Direction the strip runs in: the input box's long axis.
    axis: Axis,
    /// The unfilled strip `B_i`; `None` once it is used up exactly.
    strip: Option<OrientedBox>,
    /// Total height of the residuals this frame has emitted so far.
    height: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Exit {
    Natural,
    Truncated,
}

struct SlabOutcome {
    m: Option<u64>,
}

struct Engine {
    t: Exponent,
    // sides[k] = k^-t, prefix[k] = sum_{j<=k} j^-t
    sides: Vec<f64>,
    prefix: Vec<f64>,
    prefix_acc: CompensatedSum,
    ids: BoxIds,
    placements: Vec<PlacedSquare>,
    next: u64,
    budget: Option<u64>,
    frames: FrameStats,
}

impl Engine {
    fn new(t: Exponent, ids: BoxIds, budget: Option<u64>) -> Self {
        Engine {
            t,
            sides: vec![f64::NAN],
            prefix: vec![0.0],
            prefix_acc: CompensatedSum::default(),
            ids,
            placements: Vec::new(),
            next: 1,
            budget,
            frames: FrameStats::default(),
        }
    }

    fn extend_to(&mut self, n: u64) {
        while self.sides.len() as u64 <= n {
            let s = power_neg(self.sides.len() as u64, self.t);
            self.sides.push(s);
            self.prefix_acc.add(s);
            self.prefix.push(self.prefix_acc.value());
        }
    }

    fn side(&mut self, n: u64) -> f64 {
        self.extend_to(n);
        self.sides[n as usize]
    }

    /// `sum_{j=a}^{b} j^-t`, zero for `b < a`.
    fn power_sum(&mut self, a: u64, b: u64) -> f64 {
        if b < a {
            return 0.0;
        }
        self.extend_to(b);
        self.prefix[b as usize] - self.prefix[a as usize - 1]
    }

    fn over_budget(&self, n: u64) -> bool {
        self.budget.is_some_and(|b| n > b)
    }

    // Puts S_n snugly at the near end of `bx` and opens the frame for the
    // strip left behind.
    fn open_frame(&mut self, n: u64, bx: OrientedBox) -> Result<Frame> {
        debug_assert_eq!(n, self.next);
        let side = self.side(n);
        let (square, strip) = place_square_snug(&bx, side, &mut self.ids)?;
        self.placements.push(PlacedSquare {
            n,
            side,
            rect: square,
        });
        self.next = n + 1;
        Ok(Frame {
            n,
            axis: bx.long_axis(),
            strip,
            height: 0.0,
        })
    }

    /// Packs `S_n, S_{n+1}, ...` into `bx`, whose width must be `n^-t`.
    /// Boxes left empty are appended to `out`.
    fn fill_slab(
        &mut self,
        n: u64,
        bx: OrientedBox,
        out: &mut Vec<OrientedBox>,
    ) -> Result<SlabOutcome> {
        let mut stack = vec![self.open_frame(n, bx)?];
        loop {
            let frame = stack.last_mut().expect("stack non-empty while filling");
            let exit = match frame.strip {
                None => Exit::Natural,
                Some(strip) => {
                    let x = strip.rect.extent(frame.axis);
                    let side = self.side(self.next);
                    if x < side {
                        out.push(strip);
                        frame.height += strip.height();
                        frame.strip = None;
                        Exit::Natural
                    } else if self.over_budget(self.next) {
                        out.push(strip);
                        frame.strip = None;
                        Exit::Truncated
                    } else {
                        let slab = if x - side == 0.0 {
                            frame.strip = None;
                            strip
                        } else {
                            let (near, far) = split_along(&strip, frame.axis, side, &mut self.ids)?;
                            frame.strip = Some(far);
                            near
                        };
                        let child = self.open_frame(self.next, slab)?;
                        stack.push(child);
                        continue;
                    }
                }
            };

            // Unwind. A natural exit hands control back to the parent's loop;
            // a truncated one flushes every ancestor's strip as well.
            loop {
                let done = stack.pop().expect("frame to close");
                match exit {
                    Exit::Natural => {
                        let m = self.next;
                        let bound = self.power_sum(done.n, m - 1);
                        self.frames.record(FrameCheck {
                            n: done.n,
                            m,
                            height: done.height,
                            bound,
                        });
                        match stack.last_mut() {
                            None => return Ok(SlabOutcome { m: Some(m) }),
                            Some(parent) => {
                                parent.height += done.height;
                                break;
                            }
                        }
                    }
                    Exit::Truncated => {
                        self.frames.truncated += 1;
                        match stack.last_mut() {
                            None => return Ok(SlabOutcome { m: None }),
                            Some(parent) => {
                                parent.height += done.height;
                                if let Some(strip) = parent.strip.take() {
                                    parent.height += strip.height();
                                    out.push(strip);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    /// Outer loop starting with square `n + 1`.
    fn run_c(
        &mut self,
        n: u64,
        set: &mut BoxSet,
        n_max: u64,
        check: Option<(u64, Rect, Tolerances)>,
    ) -> Result<OuterRun> {
        let t = self.t;
        let h_seed = set.height();
        let n_start = n + 1;
        self.next = n_start;

        let mut trace = Vec::new();
        let mut run = OuterRun::default();
        let mut growth = 0.0_f64;
        let mut growth_next = n_start;
        let mut scratch = Vec::new();
        let mut step = 0;

        while self.next <= n_max {
            step += 1;
            let ni = self.next;
            let side = self.side(ni);
            while growth_next < ni {
                growth += self.side(growth_next);
                growth_next += 1;
            }
            let mut rec = TraceRecord {
                step,
                n: ni,
                width: set.width(),
                area: set.area(),
                height: set.height(),
                branch: Branch::Fail,
                area_slack: set.area() - tail_area_lower(ni, t),
                height_slack: h_seed + growth - set.height(),
            };

            if let Some((interval, container, tol)) = check {
                if interval > 0 && step % interval == 0 {
                    let residuals: Vec<_> = set.iter().copied().collect();
                    run.interim_checks += 1;
                    if !verify_sweepline(&self.placements, &residuals, &container, tol).passed {
                        run.interim_failures += 1;
                    }
                }
            }

            let Some(chosen) = set.select_candidate(side).copied() else {
                trace.push(rec);
                run.failed_at = Some(ni);
                break;
            };
            set.remove(chosen.id)?;

            if chosen.width() == side && chosen.height() == side {
                rec.branch = Branch::Snug;
                let (square, rest) = place_square_snug(&chosen, side, &mut self.ids)?;
                debug_assert!(rest.is_none());
                self.placements.push(PlacedSquare {
                    n: ni,
                    side,
                    rect: square,
                });
                self.next = ni + 1;
            } else {
                rec.branch = Branch::Cut;
                let (slab, rest) = split_long(&chosen, side, &mut self.ids)?;
                scratch.clear();
                self.fill_slab(ni, slab, &mut scratch)?;
                for b in scratch.drain(..) {
                    set.insert(b);
                }
                set.insert(rest);
            }
            trace.push(rec);
        }
        run.trace = trace;
        run.h_seed = h_seed;
        run.n_start = n_start;
        Ok(run)
    }
}

#[derive(Default)]
struct OuterRun {
    trace: Vec<TraceRecord>,
    failed_at: Option<u64>,
    h_seed: f64,
    n_start: u64,
    interim_checks: u64,
    interim_failures: u64,
}

/// Packs `S_n, S_{n+1}, ...` into `bx` (width exactly `n^-t`), stopping
/// before any square past `budget`.
pub fn algorithm_b(n: u64, bx: OrientedBox, t: Exponent, budget: Option<u64>) -> Result<BResult> {
    if n == 0 {
        return Err(Error::Precondition("square indices start at 1".into()));
    }
    if budget.is_some_and(|b| b < n) {
        return Err(Error::Precondition(format!(
            "budget {budget:?} below n = {n}"
        )));
    }
    let side = power_neg(n, t);
    if bx.width() != side {
        return Err(Error::Precondition(format!(
            "box width {} is not {n}^-t = {side}",
            bx.width()
        )));
    }
    let mut engine = Engine::new(t, BoxIds::starting_at(bx.id + 1), budget);
    engine.next = n;
    let mut residuals = Vec::new();
    let outcome = engine.fill_slab(n, bx, &mut residuals)?;
    Ok(BResult {
        m: outcome.m,
        residuals,
        placements: engine.placements,
        terminated_naturally: outcome.m.is_some(),
        frames: engine.frames,
    })
}

/// Runs the outer loop on `set` starting with square `n + 1` and stopping
/// after square `opts.n_max` or at the first square no box can take.
///
/// The reported container is the bounding box of `set` and conservation is
/// measured against `set`'s area.
pub fn algorithm_c(n: u64, set: BoxSet, t: Exponent, opts: &PackOptions) -> Result<PackingReport> {
    if set.is_empty() {
        return Err(Error::Precondition(
            "outer loop needs a non-empty box set".into(),
        ));
    }
    if opts.n_max < n {
        return Err(Error::Precondition(format!(
            "n_max {} below n = {n}",
            opts.n_max
        )));
    }
    let bounds = bounding_rect(set.iter().map(|b| &b.rect));
    let region = set.area();
    let next_id = set.iter().map(|b| b.id).max().map_or(0, |m| m + 1);
    let engine = Engine::new(t, BoxIds::starting_at(next_id), Some(opts.n_max));
    run_outer(engine, n, set, t, opts, bounds, region, None)
}

/// Seeds the `zeta(2t) x 1` container with `S_1, S_2, S_3` and packs
/// `S_4 .. S_{n_max}` into what is left.
pub fn pack(t: Exponent, opts: &PackOptions) -> Result<PackingReport> {
    if opts.n_max < FIRST_UNSEEDED {
        return Err(Error::Precondition(format!(
            "n_max = {} must be at least {FIRST_UNSEEDED}",
            opts.n_max
        )));
    }
    let seed = seed_container(t, opts.zeta_tol)?;
    let mut engine = Engine::new(t, BoxIds::starting_at(seed.next_id), Some(opts.n_max));
    engine.placements = seed.placements;
    let region = seed.container.area();
    run_outer(
        engine,
        FIRST_UNSEEDED - 1,
        seed.set,
        t,
        opts,
        seed.container,
        region,
        Some(seed.zeta),
    )
}

#[allow(clippy::too_many_arguments)]
fn run_outer(
    mut engine: Engine,
    n: u64,
    mut set: BoxSet,
    t: Exponent,
    opts: &PackOptions,
    container: Rect,
    region: f64,
    zeta: Option<f64>,
) -> Result<PackingReport> {
    let check =
        (opts.verify_interval > 0).then_some((opts.verify_interval, container, opts.tolerances));
    let run = engine.run_c(n, &mut set, opts.n_max, check)?;

    let mut residuals: Vec<OrientedBox> = set.iter().copied().collect();
    residuals.sort_by_key(|b| b.id);

    let mut summary =
        MonitorSummary::from_trace(&run.trace, &engine.frames, run.h_seed, t, run.n_start);
    summary.interim_checks = run.interim_checks;
    summary.interim_failures = run.interim_failures;

    let mut report = PackingReport {
        t,
        n_max: opts.n_max,
        container,
        zeta,
        placements: engine.placements,
        residuals,
        failed_at: run.failed_at,
        trace: run.trace,
        frames: engine.frames,
        summary,
        conservation_defect: 0.0,
    };
    report.conservation_defect = (region - report.placed_area() - report.residual_area()).abs();
    Ok(report)
}

fn bounding_rect<'a>(rects: impl Iterator<Item = &'a Rect>) -> Rect {
    let (mut x0, mut y0, mut x1, mut y1) = (
        f64::INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::NEG_INFINITY,
    );
    for r in rects {
        x0 = x0.min(r.x0);
        y0 = y0.min(r.y0);
        x1 = x1.max(r.x1());
        y1 = y1.max(r.y1());
    }
    Rect::new(x0, y0, x1 - x0, y1 - y0)
}
