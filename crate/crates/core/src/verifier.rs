//! Geometric soundness checks for a packing: no two rectangles overlap, all
//! of them sit inside the container, and their areas add up to the
//! container's.
//!
//! Squares and residual boxes are checked as one pool. [`verify_bruteforce`]
//! tests every pair; [`verify_sweepline`] sweeps along x with a max-segment
//! tree over y. Both produce the same report.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::geometry::{
    rects_interior_overlap, OrientedBox, PlacedSquare, Rect, DEFAULT_OVERLAP_TOL,
};
use crate::numerics::compensated_sum;

/// Most rectangles [`verify_bruteforce`] accepts.
pub const BRUTEFORCE_LIMIT: usize = 5000;

pub const DEFAULT_AREA_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Interior penetration, per axis, that still counts as touching.
    /// Also the slack allowed when testing containment.
    pub overlap: f64,
    /// Largest acceptable `|container area - total area|`.
    pub area: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            overlap: DEFAULT_OVERLAP_TOL,
            area: DEFAULT_AREA_TOL,
        }
    }
}

/// A rectangle in the verified pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Item {
    Square(usize),
    Residual(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// Overlapping square pairs `(i, j)`, `i < j`, as placement indices.
    pub overlap_pairs: Vec<(usize, usize)>,
    pub out_of_container: Vec<Item>,
    /// Overlapping pairs involving at least one residual box.
    pub residual_conflicts: Vec<(Item, Item)>,
    /// Rectangles with a non-positive or non-finite dimension; left out of
    /// the overlap tests.
    pub malformed: Vec<Item>,
    pub area_defect: f64,
    pub passed: bool,
}

struct Pool<'a> {
    squares: &'a [PlacedSquare],
    residuals: &'a [OrientedBox],
}

impl Pool<'_> {
    fn len(&self) -> usize {
        self.squares.len() + self.residuals.len()
    }

    fn rect(&self, i: usize) -> &Rect {
        match i.checked_sub(self.squares.len()) {
            None => &self.squares[i].rect,
            Some(j) => &self.residuals[j].rect,
        }
    }

    fn item(&self, i: usize) -> Item {
        match i.checked_sub(self.squares.len()) {
            None => Item::Square(i),
            Some(j) => Item::Residual(j),
        }
    }
}

fn assemble(
    pool: &Pool,
    container: &Rect,
    tol: Tolerances,
    mut pairs: Vec<(usize, usize)>,
) -> VerificationReport {
    pairs.sort_unstable();
    pairs.dedup();
    let n_sq = pool.squares.len();
    let mut overlap_pairs = Vec::new();
    let mut residual_conflicts = Vec::new();
    for (i, j) in pairs {
        if j < n_sq {
            overlap_pairs.push((i, j));
        } else {
            residual_conflicts.push((pool.item(i), pool.item(j)));
        }
    }

    let mut out_of_container = Vec::new();
    let mut malformed = Vec::new();
    for i in 0..pool.len() {
        let r = pool.rect(i);
        if !r.is_valid() {
            malformed.push(pool.item(i));
        } else if !r.within(container, tol.overlap) {
            out_of_container.push(pool.item(i));
        }
    }

    let total = compensated_sum((0..pool.len()).map(|i| pool.rect(i).area()));
    let area_defect = (container.area() - total).abs();
    let passed = overlap_pairs.is_empty()
        && residual_conflicts.is_empty()
        && out_of_container.is_empty()
        && malformed.is_empty()
        && area_defect <= tol.area;
    VerificationReport {
        overlap_pairs,
        out_of_container,
        residual_conflicts,
        malformed,
        area_defect,
        passed,
    }
}

/// Tests all pairs. Refuses pools above [`BRUTEFORCE_LIMIT`].
pub fn verify_bruteforce(
    placements: &[PlacedSquare],
    residuals: &[OrientedBox],
    container: &Rect,
    tol: Tolerances,
) -> Result<VerificationReport> {
    let pool = Pool {
        squares: placements,
        residuals,
    };
    let n = pool.len();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::GuardExceeded {
            got: n,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let mut pairs = Vec::new();
    for i in 0..n {
        let a = pool.rect(i);
        if !a.is_valid() {
            continue;
        }
        for j in i + 1..n {
            let b = pool.rect(j);
            if b.is_valid() && rects_interior_overlap(a, b, tol.overlap) {
                pairs.push((i, j));
            }
        }
    }
    Ok(assemble(&pool, container, tol, pairs))
}

#[derive(PartialEq)]
struct ByX1(f64, usize);

impl Eq for ByX1 {}

impl PartialOrd for ByX1 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ByX1 {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Max-tree over rectangles ranked by `y0`; a leaf holds the active
/// rectangle's `y1`, or `-inf` when inactive.
struct MaxTree {
    size: usize,
    max: Vec<f64>,
}

impl MaxTree {
    fn new(n: usize) -> Self {
        let size = n.next_power_of_two().max(1);
        MaxTree {
            size,
            max: vec![f64::NEG_INFINITY; 2 * size],
        }
    }

    fn set(&mut self, leaf: usize, value: f64) {
        let mut i = leaf + self.size;
        self.max[i] = value;
        while i > 1 {
            i /= 2;
            self.max[i] = self.max[2 * i].max(self.max[2 * i + 1]);
        }
    }

    /// Leaves below `limit` whose value exceeds `floor`.
    fn collect(&self, limit: usize, floor: f64, out: &mut Vec<usize>) {
        let mut stack = vec![(1usize, 0usize, self.size)];
        while let Some((node, lo, hi)) = stack.pop() {
            if lo >= limit || self.max[node] <= floor {
                continue;
            }
            if hi - lo == 1 {
                out.push(lo);
            } else {
                let mid = (lo + hi) / 2;
                stack.push((2 * node + 1, mid, hi));
                stack.push((2 * node, lo, mid));
            }
        }
    }
}

/// Sweep along x; `O((N + K) log N)` for `K` candidate pairs.
pub fn verify_sweepline(
    placements: &[PlacedSquare],
    residuals: &[OrientedBox],
    container: &Rect,
    tol: Tolerances,
) -> VerificationReport {
    let pool = Pool {
        squares: placements,
        residuals,
    };
    let valid: Vec<usize> = (0..pool.len())
        .filter(|&i| pool.rect(i).is_valid())
        .collect();

    let mut by_y = valid.clone();
    by_y.sort_by(|&a, &b| pool.rect(a).y0.total_cmp(&pool.rect(b).y0).then(a.cmp(&b)));
    let y0s: Vec<f64> = by_y.iter().map(|&i| pool.rect(i).y0).collect();
    let mut rank = vec![usize::MAX; pool.len()];
    for (r, &i) in by_y.iter().enumerate() {
        rank[i] = r;
    }

    let mut by_x = valid;
    by_x.sort_by(|&a, &b| pool.rect(a).x0.total_cmp(&pool.rect(b).x0).then(a.cmp(&b)));

    let mut tree = MaxTree::new(by_y.len());
    let mut active: BinaryHeap<Reverse<ByX1>> = BinaryHeap::new();
    let mut hits = Vec::new();
    let mut pairs = Vec::new();

    for &b in &by_x {
        let rb = pool.rect(b);
        while let Some(Reverse(ByX1(x1, a))) = active.peek() {
            if *x1 > rb.x0 {
                break;
            }
            tree.set(rank[*a], f64::NEG_INFINITY);
            active.pop();
        }

        let limit = y0s.partition_point(|&y| y < rb.y1());
        hits.clear();
        tree.collect(limit, rb.y0, &mut hits);
        for &leaf in &hits {
            let a = by_y[leaf];
            if rects_interior_overlap(pool.rect(a), rb, tol.overlap) {
                pairs.push((a.min(b), a.max(b)));
            }
        }

        tree.set(rank[b], rb.y1());
        active.push(Reverse(ByX1(rb.x1(), b)));
    }
    assemble(&pool, container, tol, pairs)
}
