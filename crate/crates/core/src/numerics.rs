//! Powers `n^-t`, certified evaluation of `zeta(2t)` and two-sided bounds for
//! the power sums that drive the packing's height and area budgets.
//!
//! Every side length in the engine goes through [`power_neg`], so two
//! evaluations of the same `(n, t)` anywhere in a run are bit-identical and
//! exact floating comparisons between sides and box widths are meaningful.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest number of terms [`partial_power_sum`] will add up.
pub const MAX_SUM_TERMS: u64 = 10_000_000;

/// Default absolute tolerance for the container length `zeta(2t)`.
pub const DEFAULT_ZETA_TOL: f64 = 1e-12;

/// Exponent `t` of the side lengths `n^-t`, restricted to `1/2 < t <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Exponent(f64);

impl Exponent {
    /// `2/3`, the nearest double.
    pub const TWO_THIRDS: Exponent = Exponent(2.0 / 3.0);
    /// `log_3 2`, the nearest double.
    pub const LOG3_2: Exponent = Exponent(0.630_929_753_571_457_4);

    pub fn new(t: f64) -> Result<Self> {
        if t.is_finite() && t > 0.5 && t <= 1.0 {
            Ok(Exponent(t))
        } else {
            Err(Error::Domain(format!("exponent t = {t} outside (1/2, 1]")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Accepts a decimal literal or one of the named constants `two-thirds`
/// and `log3-2`.
impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "two-thirds" | "2/3" => Ok(Exponent::TWO_THIRDS),
            "log3-2" | "log3(2)" => Ok(Exponent::LOG3_2),
            other => {
                let t: f64 = other
                    .parse()
                    .map_err(|_| Error::Domain(format!("cannot parse exponent {other:?}")))?;
                Exponent::new(t)
            }
        }
    }
}

/// `n^-t`. The single routine every module uses for side lengths.
#[inline]
pub fn power_neg(n: u64, t: Exponent) -> f64 {
    (n as f64).powf(-t.0)
}

/// `sum_{j=a..=b} j^-s`, added in ascending `j`. An empty range (`b < a`)
/// sums to zero.
pub fn partial_power_sum(a: u64, b: u64, s: f64) -> Result<f64> {
    if a == 0 {
        return Err(Error::Domain("summation index must start at 1".into()));
    }
    if b < a {
        return Ok(0.0);
    }
    let len = b - a;
    if len > MAX_SUM_TERMS {
        return Err(Error::RangeTooLarge {
            len,
            limit: MAX_SUM_TERMS,
        });
    }
    Ok((a..=b).map(|j| (j as f64).powf(-s)).sum())
}

/// Closed interval `[lower, upper]`. `upper` may be `+inf` when no finite
/// upper bound is available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn new(lower: f64, upper: f64) -> Self {
        debug_assert!(lower <= upper, "bracket [{lower}, {upper}] inverted");
        Bracket { lower, upper }
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    /// `lower < x < upper`; an infinite upper end exceeds every finite `x`.
    pub fn contains_strict(&self, x: f64) -> bool {
        self.lower < x && x < self.upper
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn shift(self, by: f64) -> Bracket {
        Bracket::new(self.lower + by, self.upper + by)
    }
}

/// Integral-test bounds on `sum_{j=a..=b} j^-t` for `1/2 < t < 1`:
/// `((b+1)^(1-t) - a^(1-t)) / (1-t)` below, `(b^(1-t) - (a-1)^(1-t)) / (1-t)`
/// above.
pub fn bracket_power_sum(a: u64, b: u64, t: Exponent) -> Result<Bracket> {
    if a == 0 || b < a {
        return Err(Error::Domain(format!(
            "need 1 <= a <= b, got a = {a}, b = {b}"
        )));
    }
    let t = t.get();
    if t >= 1.0 {
        return Err(Error::Domain("power-sum bracket needs t < 1".into()));
    }
    let e = 1.0 - t;
    let (a, b) = (a as f64, b as f64);
    let lower = ((b + 1.0).powf(e) - a.powf(e)) / e;
    let upper = (b.powf(e) - (a - 1.0).powf(e)) / e;
    Ok(Bracket::new(lower, upper))
}

/// Integral-test bounds on `sum_{j=a..=b} j^-2t`; `b = None` means the
/// infinite tail.
///
/// With `a = 1` the upper bound involves `0^(1-2t)`, which diverges, so the
/// returned bracket is unbounded above.
pub fn bracket_square_sum(a: u64, b: Option<u64>, t: Exponent) -> Result<Bracket> {
    if a == 0 || b.is_some_and(|b| b < a) {
        return Err(Error::Domain(format!(
            "need 1 <= a <= b, got a = {a}, b = {b:?}"
        )));
    }
    let d = 2.0 * t.get() - 1.0;
    if d <= 0.0 {
        return Err(Error::Domain("square-sum bracket needs t > 1/2".into()));
    }
    let e = -d;
    let af = a as f64;
    let (far_lo, far_hi) = match b {
        Some(b) => ((b as f64 + 1.0).powf(e), (b as f64).powf(e)),
        None => (0.0, 0.0),
    };
    let lower = (af.powf(e) - far_lo) / d;
    let upper = if a == 1 {
        f64::INFINITY
    } else {
        ((af - 1.0).powf(e) - far_hi) / d
    };
    Ok(Bracket::new(lower, upper))
}

/// Lower bound on the total area `sum_{j>=n} j^-2t` of the squares still to
/// be packed.
pub fn tail_area_lower(n: u64, t: Exponent) -> f64 {
    let d = 2.0 * t.get() - 1.0;
    (n as f64).powf(-d) / d
}

// Convexity bounds on sum_{j>=a} j^-s for s > 1. Midpoint rule from above,
// trapezoid rule from below; both sit inside the integral-test bracket.
fn convex_tail_bracket(a: u64, s: f64) -> Bracket {
    let d = s - 1.0;
    let af = a as f64;
    let lower = af.powf(-d) / d + 0.5 * af.powf(-s);
    let upper = (af - 0.5).powf(-d) / d;
    Bracket::new(lower.min(upper), upper)
}

/// `zeta(2t)` with absolute error below `abs_tol`.
///
/// Adds `j^-2t` for `j <= M` with compensated summation and brackets the tail
/// from `M + 1`; `M` is doubled until the tail bracket is narrower than
/// `abs_tol / 2`. Returns the midpoint of the resulting bracket.
pub fn zeta_2t(t: Exponent, abs_tol: f64) -> Result<f64> {
    zeta_2t_bracket(t, abs_tol).map(|b| b.midpoint())
}

/// The bracket whose midpoint [`zeta_2t`] returns.
pub fn zeta_2t_bracket(t: Exponent, abs_tol: f64) -> Result<Bracket> {
    if !(abs_tol > 0.0 && abs_tol.is_finite()) {
        return Err(Error::Domain(format!(
            "tolerance {abs_tol} must be positive"
        )));
    }
    let s = 2.0 * t.get();
    if s <= 1.0 {
        return Err(Error::Domain("zeta(2t) diverges for t <= 1/2".into()));
    }
    let mut m: u64 = 16;
    let tail = loop {
        let tail = convex_tail_bracket(m + 1, s);
        if tail.width() < 0.5 * abs_tol {
            break tail;
        }
        if m >= MAX_SUM_TERMS {
            return Err(Error::Domain(format!(
                "zeta(2t) tolerance {abs_tol} unattainable within {MAX_SUM_TERMS} terms"
            )));
        }
        m = (2 * m).min(MAX_SUM_TERMS);
    };

    // smallest terms first
    let head = compensated_sum((1..=m).rev().map(|j| (j as f64).powf(-s)));
    Ok(tail.shift(head))
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let next = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - next) + x;
        } else {
            self.comp += (x - next) + self.sum;
        }
        self.sum = next;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    for x in values {
        acc.add(x);
    }
    acc.value()
}

/// Seeded residual height `f(t) = zeta(2t) - 2*3^-t` against the height budget
/// `g(t) = 3^(1-t) / (1-t)` available when the run starts at square 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedMargin {
    pub height: f64,
    pub budget: f64,
}

impl SeedMargin {
    /// `true` when the seeded height fits the budget strictly.
    pub fn holds(&self) -> bool {
        self.height < self.budget
    }
}

pub fn seed_height_margin(t: Exponent) -> Result<SeedMargin> {
    let tv = t.get();
    if tv >= 1.0 {
        return Err(Error::Domain("seed margin needs t < 1".into()));
    }
    let zeta = zeta_2t(t, DEFAULT_ZETA_TOL)?;
    let height = zeta - 2.0 * power_neg(3, t);
    let budget = 3f64.powf(1.0 - tv) / (1.0 - tv);
    Ok(SeedMargin { height, budget })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn exponent_range() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(1.0).is_ok());
        assert!(Exponent::new(1.0 + 1e-12).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert_eq!(
            "two-thirds".parse::<Exponent>().unwrap(),
            Exponent::TWO_THIRDS
        );
        assert_eq!("log3-2".parse::<Exponent>().unwrap(), Exponent::LOG3_2);
        assert_eq!("0.6".parse::<Exponent>().unwrap().get(), 0.6);
        assert!("abc".parse::<Exponent>().is_err());
    }

    #[test]
    fn log3_2_is_nearest_double() {
        let approx = 2f64.ln() / 3f64.ln();
        assert!((Exponent::LOG3_2.get() - approx).abs() <= f64::EPSILON);
    }

    #[test]
    fn power_neg_examples() {
        assert_eq!(power_neg(1, Exponent::TWO_THIRDS), 1.0);
        assert_eq!(power_neg(1, t(0.51)), 1.0);
        // exp(-(2/3) ln 2) to 20 digits: 0.62996052494743658238
        assert!((power_neg(2, Exponent::TWO_THIRDS) - 0.629_960_524_947_436_6).abs() < 1e-15);
        assert!((power_neg(3, Exponent::LOG3_2) - 0.5).abs() < 4.0 * f64::EPSILON);
    }

    #[test]
    fn partial_sum_examples() {
        assert_eq!(partial_power_sum(5, 5, 1.0).unwrap(), 0.2);
        let want = 1.0 + 2f64.powf(-4.0 / 3.0) + 3f64.powf(-4.0 / 3.0);
        assert_eq!(partial_power_sum(1, 3, 4.0 / 3.0).unwrap(), want);
        assert!((want - 1.627_970_687_775_594_8).abs() < 1e-15);
        assert_eq!(partial_power_sum(2, 1, 1.0).unwrap(), 0.0);
        assert!(matches!(
            partial_power_sum(1, MAX_SUM_TERMS + 2, 1.0),
            Err(Error::RangeTooLarge { .. })
        ));
    }

    #[test]
    fn power_sum_bracket_examples() {
        let tt = Exponent::TWO_THIRDS;
        let br = bracket_power_sum(4, 10, tt).unwrap();
        assert!(br.contains_strict(partial_power_sum(4, 10, 2.0 / 3.0).unwrap()));

        let br = bracket_power_sum(1, 1, tt).unwrap();
        // 3 (2^(1/3) - 1) = 0.77976314968461949430
        assert!((br.lower - 0.779_763_149_684_619_5).abs() < 1e-14);
        assert!((br.upper - 3.0).abs() < 1e-14);
        assert!(br.contains_strict(1.0));

        let br = bracket_power_sum(100, 100, t(0.6)).unwrap();
        assert!(br.contains_strict(100f64.powf(-0.6)));

        assert!(bracket_power_sum(1, 3, t(1.0)).is_err());
        assert!(bracket_power_sum(3, 2, tt).is_err());
    }

    #[test]
    fn square_sum_bracket_examples() {
        let tt = Exponent::TWO_THIRDS;
        let br = bracket_square_sum(4, None, tt).unwrap();
        assert!((br.lower - 3.0 * 4f64.powf(-1.0 / 3.0)).abs() < 1e-14);
        assert!((br.upper - 3.0 * 3f64.powf(-1.0 / 3.0)).abs() < 1e-14);

        let br = bracket_square_sum(10, Some(20), t(0.6)).unwrap();
        assert!(br.contains_strict(partial_power_sum(10, 20, 1.2).unwrap()));

        let br = bracket_square_sum(2, Some(2), tt).unwrap();
        let v = 2f64.powf(-4.0 / 3.0);
        assert!((v - 0.396_850_262_992_049_9).abs() < 1e-15);
        assert!(br.contains_strict(v));

        let br = bracket_square_sum(1, Some(5), tt).unwrap();
        assert!(!br.is_bounded());
        assert!(br.contains_strict(partial_power_sum(1, 5, 4.0 / 3.0).unwrap()));
        assert!(bracket_square_sum(0, None, tt).is_err());
    }

    #[test]
    fn zeta_known_values() {
        // zeta(4/3) = 3.6009377504588624213 (mpmath, 40 digits)
        let z = zeta_2t(Exponent::TWO_THIRDS, 1e-9).unwrap();
        assert!((z - 3.600_937_750_458_862).abs() < 1e-9);
        let seed = z - 2.0 * power_neg(3, Exponent::TWO_THIRDS);
        assert!((seed - 2.639).abs() < 5e-4);

        let z2 = zeta_2t(t(1.0), 1e-9).unwrap();
        let pi2_6 = std::f64::consts::PI.powi(2) / 6.0;
        assert!((z2 - pi2_6).abs() < 1e-9);

        let z = zeta_2t(t(0.75), 1e-9).unwrap();
        let head = partial_power_sum(1, 1_000_000, 1.5).unwrap();
        let tail = bracket_square_sum(1_000_001, None, t(0.75)).unwrap();
        assert!(tail.shift(head).contains(z));
    }

    #[test]
    fn zeta_tolerance_is_honoured_near_half() {
        // zeta(1.1) = 10.584448464950809826 (mpmath)
        let z = zeta_2t(t(0.55), 1e-10).unwrap();
        assert!((z - 10.584_448_464_950_81).abs() < 1e-10);
        assert!(zeta_2t(t(0.55), 0.0).is_err());
    }

    #[test]
    fn margin_values() {
        let m = seed_height_margin(Exponent::TWO_THIRDS).unwrap();
        assert!((m.height - 2.639).abs() < 1e-3);
        assert!((m.budget - 4.327).abs() < 1e-3);
        assert!(m.holds());

        let m = seed_height_margin(Exponent::LOG3_2).unwrap();
        assert!((m.height - 3.41).abs() < 0.01);
        assert!((m.budget - 4.06).abs() < 0.01);

        let lo = seed_height_margin(t(0.64)).unwrap();
        let hi = seed_height_margin(Exponent::TWO_THIRDS).unwrap();
        assert!(lo.height > hi.height);
        assert!(lo.budget < hi.budget);
        assert!(seed_height_margin(t(1.0)).is_err());
    }
}
