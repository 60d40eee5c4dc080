//! Per-step trace of the outer packing loop and the checks run over it.
//!
//! Each check recomputes its bound from the raw `(n_i, w, a, h)` values in the
//! trace, independent of the slack values the packer recorded on the fly.

use serde::{Deserialize, Serialize};

use crate::numerics::{bracket_square_sum, power_neg, Exponent};

/// Absolute tolerance for every monitor, container units.
pub const MONITOR_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// The chosen box was exactly the next square.
    Snug,
    /// The chosen box was cut and its near slab filled recursively.
    Cut,
    /// No box was wide enough for the next square.
    Fail,
}

/// State of the residual set just before square `n` is placed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub step: u64,
    pub n: u64,
    /// Widest residual width.
    pub width: f64,
    /// Total residual area.
    pub area: f64,
    /// Total residual height.
    pub height: f64,
    pub branch: Branch,
    /// `area` minus the lower bound on the area of squares `n, n+1, ...`.
    pub area_slack: f64,
    /// Height budget `h_seed + sum_{j=n_start}^{n-1} j^-t` minus `height`.
    pub height_slack: f64,
}

/// One naturally terminated slab-filling frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameCheck {
    /// First square packed into the slab.
    pub n: u64,
    /// One past the last square packed into the slab.
    pub m: u64,
    /// Total height of the boxes the frame left behind.
    pub height: f64,
    /// `sum_{j=n}^{m-1} j^-t`.
    pub bound: f64,
}

impl FrameCheck {
    pub fn holds(&self) -> bool {
        self.height <= self.bound + MONITOR_TOL
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameStats {
    pub frames: u64,
    pub truncated: u64,
    pub violations: Vec<FrameCheck>,
    /// Smallest `bound - height` seen.
    pub min_slack: Option<f64>,
}

impl FrameStats {
    pub fn record(&mut self, check: FrameCheck) {
        self.frames += 1;
        let slack = check.bound - check.height;
        self.min_slack = Some(self.min_slack.map_or(slack, |s| s.min(slack)));
        if !check.holds() {
            self.violations.push(check);
        }
    }

    pub fn merge(&mut self, other: &FrameStats) {
        self.frames += other.frames;
        self.truncated += other.truncated;
        self.violations.extend_from_slice(&other.violations);
        self.min_slack = match (self.min_slack, other.min_slack) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
}

/// Records whose height exceeds `h_seed + sum_{j=n_start}^{n_i-1} j^-t`.
///
/// The partial sum is accumulated in ascending `j`, the same order
/// [`crate::numerics::partial_power_sum`] uses, so each bound is that sum
/// bit for bit.
pub fn monitor_height_growth(
    trace: &[TraceRecord],
    h_seed: f64,
    t: Exponent,
    n_start: u64,
) -> Vec<usize> {
    let mut sum = 0.0_f64;
    let mut next_j = n_start;
    let mut out = Vec::new();
    for (idx, rec) in trace.iter().enumerate() {
        while next_j < rec.n {
            sum += power_neg(next_j, t);
            next_j += 1;
        }
        if rec.height > h_seed + sum + MONITOR_TOL {
            out.push(idx);
        }
    }
    out
}

/// Records whose residual area falls below the integral lower bound on the
/// area of the squares still to come.
pub fn monitor_area_tail(trace: &[TraceRecord], t: Exponent) -> Vec<usize> {
    trace
        .iter()
        .enumerate()
        .filter(|(_, rec)| {
            let lower = bracket_square_sum(rec.n, None, t)
                .expect("trace indices start at 1")
                .lower;
            rec.area < lower - MONITOR_TOL || rec.area < 0.0
        })
        .map(|(i, _)| i)
        .collect()
}

/// Records breaking `a <= w * h`.
pub fn monitor_area_bound(trace: &[TraceRecord]) -> Vec<usize> {
    trace
        .iter()
        .enumerate()
        .filter(|(_, rec)| rec.area > rec.width * rec.height + MONITOR_TOL)
        .map(|(i, _)| i)
        .collect()
}

/// Records breaking `h < n_i^(1-t) / (2t - 1)`, the height under which the
/// next square is guaranteed a wide enough box.
pub fn monitor_fit_height(trace: &[TraceRecord], t: Exponent) -> Vec<usize> {
    let tv = t.get();
    trace
        .iter()
        .enumerate()
        .filter(|(_, rec)| rec.height >= (rec.n as f64).powf(1.0 - tv) / (2.0 * tv - 1.0))
        .map(|(i, _)| i)
        .collect()
}

/// Aggregate monitor counts for one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MonitorSummary {
    pub steps: u64,
    pub snug_steps: u64,
    pub cut_steps: u64,
    pub seed_height: f64,
    pub max_height: f64,
    pub min_area_slack: Option<f64>,
    pub min_height_slack: Option<f64>,
    pub area_tail_violations: u64,
    pub height_growth_violations: u64,
    pub area_bound_violations: u64,
    pub fit_height_violations: u64,
    pub frames_checked: u64,
    pub frame_violations: u64,
    pub interim_checks: u64,
    pub interim_failures: u64,
}

impl MonitorSummary {
    pub fn from_trace(
        trace: &[TraceRecord],
        frames: &FrameStats,
        h_seed: f64,
        t: Exponent,
        n_start: u64,
    ) -> Self {
        let min = |f: fn(&TraceRecord) -> f64| trace.iter().map(f).reduce(f64::min);
        MonitorSummary {
            steps: trace.len() as u64,
            snug_steps: trace.iter().filter(|r| r.branch == Branch::Snug).count() as u64,
            cut_steps: trace.iter().filter(|r| r.branch == Branch::Cut).count() as u64,
            seed_height: h_seed,
            max_height: trace.iter().map(|r| r.height).fold(0.0, f64::max),
            min_area_slack: min(|r| r.area_slack),
            min_height_slack: min(|r| r.height_slack),
            area_tail_violations: monitor_area_tail(trace, t).len() as u64,
            height_growth_violations: monitor_height_growth(trace, h_seed, t, n_start).len() as u64,
            area_bound_violations: monitor_area_bound(trace).len() as u64,
            fit_height_violations: monitor_fit_height(trace, t).len() as u64,
            frames_checked: frames.frames,
            frame_violations: frames.violations.len() as u64,
            interim_checks: 0,
            interim_failures: 0,
        }
    }

    pub fn clean(&self) -> bool {
        self.area_tail_violations == 0
            && self.height_growth_violations == 0
            && self.area_bound_violations == 0
            && self.fit_height_violations == 0
            && self.frame_violations == 0
            && self.interim_failures == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: u64, height: f64) -> TraceRecord {
        TraceRecord {
            step: n,
            n,
            width: 1.0,
            area: 1.0,
            height,
            branch: Branch::Cut,
            area_slack: 0.0,
            height_slack: 0.0,
        }
    }

    #[test]
    fn first_record_uses_empty_sum() {
        let t = Exponent::TWO_THIRDS;
        assert!(monitor_height_growth(&[rec(4, 2.5)], 2.5, t, 4).is_empty());
        assert_eq!(monitor_height_growth(&[rec(4, 2.6)], 2.5, t, 4), vec![0]);
    }

    #[test]
    fn growth_bound_accumulates() {
        let t = Exponent::TWO_THIRDS;
        let s4 = power_neg(4, t);
        let s5 = power_neg(5, t);
        let trace = [
            rec(4, 2.0),
            rec(6, 2.0 + s4 + s5),
            rec(7, 2.0 + s4 + s5 + 0.5),
        ];
        assert_eq!(monitor_height_growth(&trace, 2.0, t, 4), vec![2]);
    }

    #[test]
    fn area_checks() {
        let t = Exponent::TWO_THIRDS;
        let mut r = rec(4, 1.0);
        r.area = 3.0 * 4f64.powf(-1.0 / 3.0) - 1e-6;
        assert_eq!(monitor_area_tail(&[r], t), vec![0]);
        r.area = 3.0 * 4f64.powf(-1.0 / 3.0);
        assert!(monitor_area_tail(&[r], t).is_empty());
        // a = 1.0 > w * h = 0.5
        let mut r = rec(4, 0.5);
        assert_eq!(monitor_area_bound(&[r]), vec![0]);
        r.height = 1.0;
        assert!(monitor_area_bound(&[r]).is_empty());
    }

    #[test]
    fn frame_stats() {
        let mut s = FrameStats::default();
        s.record(FrameCheck {
            n: 2,
            m: 3,
            height: 0.5,
            bound: 0.6,
        });
        s.record(FrameCheck {
            n: 3,
            m: 4,
            height: 0.7,
            bound: 0.6,
        });
        assert_eq!(s.frames, 2);
        assert_eq!(s.violations.len(), 1);
        assert!((s.min_slack.unwrap() + 0.1).abs() < 1e-12);
    }
}
