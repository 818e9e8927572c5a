//! Trapezoidal fuzzy numbers and the possibility, necessity and credibility
//! measures of the events `{μ ≤ γ}` and `{μ ≥ γ}`.
//!
//! The measures are total functions. Shoulders may be degenerate
//! (`mu1 == mu2` or `mu3 == mu4`), in which case the measure steps at the knot
//! instead of ramping, so a crisp value `c` embeds as `(c, c, c, c)`.
//!
//! Piecewise cases are evaluated on half-open intervals. Neighbouring cases
//! agree at every non-degenerate knot, so the choice of which side owns a knot
//! never changes a value.
use std::fmt;

use thiserror::Error;

/// Errors raised when constructing fuzzy values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("trapezoid components must be finite, got {0:?}")]
    NonFinite([f64; 4]),
    #[error("trapezoid must satisfy mu1 ≤ mu2 ≤ mu3 ≤ mu4, got {0:?}")]
    Unordered([f64; 4]),
    #[error("confidence level must lie in [0, 1], got {0}")]
    Confidence(f64),
    #[error("product is only defined for nonnegative trapezoids, got {0:?}")]
    NegativeComponent([f64; 4]),
}

/// A trapezoidal fuzzy number `(mu1, mu2, mu3, mu4)`.
///
/// Membership is zero outside `[mu1, mu4]`, one on the core `[mu2, mu3]` and
/// linear on the two shoulders.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapezoidalFuzzy {
    mu: [f64; 4],
}

impl TrapezoidalFuzzy {
    pub fn new(mu1: f64, mu2: f64, mu3: f64, mu4: f64) -> Result<Self, FuzzyError> {
        Self::from_array([mu1, mu2, mu3, mu4])
    }

    pub fn from_array(mu: [f64; 4]) -> Result<Self, FuzzyError> {
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(FuzzyError::NonFinite(mu));
        }
        if !(mu[0] <= mu[1] && mu[1] <= mu[2] && mu[2] <= mu[3]) {
            return Err(FuzzyError::Unordered(mu));
        }
        Ok(Self { mu })
    }

    /// The crisp number `c` as the degenerate trapezoid `(c, c, c, c)`.
    pub fn crisp(c: f64) -> Result<Self, FuzzyError> {
        Self::from_array([c; 4])
    }

    pub fn mu1(&self) -> f64 {
        self.mu[0]
    }

    pub fn mu2(&self) -> f64 {
        self.mu[1]
    }

    pub fn mu3(&self) -> f64 {
        self.mu[2]
    }

    pub fn mu4(&self) -> f64 {
        self.mu[3]
    }

    pub fn to_array(&self) -> [f64; 4] {
        self.mu
    }

    pub fn is_crisp(&self) -> bool {
        self.mu[0] == self.mu[3]
    }

    /// Membership grade of `x`.
    ///
    /// A degenerate shoulder makes the grade jump straight to one at that
    /// edge of the core.
    pub fn membership(&self, x: f64) -> f64 {
        let [m1, m2, m3, m4] = self.mu;
        if (m2..=m3).contains(&x) {
            1.0
        } else if x > m1 && x < m2 {
            (x - m1) / (m2 - m1)
        } else if x > m3 && x < m4 {
            (m4 - x) / (m4 - m3)
        } else {
            0.0
        }
    }

    /// Component-wise product of two nonnegative trapezoids.
    ///
    /// Support and core endpoints are exact; the shoulders of the true product
    /// are slightly convex and are replaced by straight lines.
    pub fn product_nonneg(&self, other: &Self) -> Result<Self, FuzzyError> {
        for t in [self, other] {
            if t.mu[0] < 0.0 {
                return Err(FuzzyError::NegativeComponent(t.mu));
            }
        }
        let mut mu = [0.0; 4];
        for (k, slot) in mu.iter_mut().enumerate() {
            *slot = self.mu[k] * other.mu[k];
        }
        Self::from_array(mu)
    }
}

impl fmt::Display for TrapezoidalFuzzy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.mu;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

/// Which fuzzy measure grades an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MeasureKind {
    /// Optimistic grading.
    Possibility,
    /// Moderate grading, the mean of possibility and necessity.
    Credibility,
    /// Pessimistic grading.
    Necessity,
}

impl MeasureKind {
    /// All kinds in the conventional report order.
    pub const ALL: [MeasureKind; 3] = [
        MeasureKind::Possibility,
        MeasureKind::Credibility,
        MeasureKind::Necessity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Possibility => "possibility",
            MeasureKind::Credibility => "credibility",
            MeasureKind::Necessity => "necessity",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            MeasureKind::Possibility => "poss",
            MeasureKind::Credibility => "cred",
            MeasureKind::Necessity => "nece",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "poss" | "possibility" => Ok(MeasureKind::Possibility),
            "cred" | "credibility" => Ok(MeasureKind::Credibility),
            "nece" | "necessity" => Ok(MeasureKind::Necessity),
            other => Err(format!(
                "unknown measure kind `{other}` (expected poss, cred or nece)"
            )),
        }
    }
}

/// The event a chance constraint talks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `{μ ≤ γ}`
    LessOrEqual,
    /// `{μ ≥ γ}`
    GreaterOrEqual,
}

/// A confidence level `α ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Confidence(f64);

impl Confidence {
    pub fn new(alpha: f64) -> Result<Self, FuzzyError> {
        if (0.0..=1.0).contains(&alpha) {
            Ok(Self(alpha))
        } else {
            Err(FuzzyError::Confidence(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Confidence {
    type Error = FuzzyError;

    fn try_from(alpha: f64) -> Result<Self, Self::Error> {
        Self::new(alpha)
    }
}

/// Grade of the event `{μ ≤ γ}` under `kind`. Nondecreasing in `gamma`.
pub fn measure_le(f: &TrapezoidalFuzzy, gamma: f64, kind: MeasureKind) -> f64 {
    let [m1, m2, m3, m4] = f.mu;
    match kind {
        MeasureKind::Possibility => {
            if gamma >= m2 {
                1.0
            } else if gamma > m1 {
                ((gamma - m1) / (m2 - m1)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        }
        MeasureKind::Necessity => {
            if gamma >= m4 {
                1.0
            } else if gamma > m3 {
                ((gamma - m3) / (m4 - m3)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        }
        MeasureKind::Credibility => {
            if gamma >= m4 {
                1.0
            } else if gamma > m3 {
                ((gamma - 2.0 * m3 + m4) / (2.0 * (m4 - m3))).clamp(0.5, 1.0)
            } else if gamma >= m2 {
                0.5
            } else if gamma > m1 {
                ((gamma - m1) / (2.0 * (m2 - m1))).clamp(0.0, 0.5)
            } else {
                0.0
            }
        }
    }
}

/// Grade of the event `{μ ≥ γ}` under `kind`. Nonincreasing in `gamma`.
pub fn measure_ge(f: &TrapezoidalFuzzy, gamma: f64, kind: MeasureKind) -> f64 {
    let [m1, m2, m3, m4] = f.mu;
    match kind {
        MeasureKind::Possibility => {
            if gamma <= m3 {
                1.0
            } else if gamma < m4 {
                ((m4 - gamma) / (m4 - m3)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        }
        MeasureKind::Necessity => {
            if gamma <= m1 {
                1.0
            } else if gamma < m2 {
                ((m2 - gamma) / (m2 - m1)).clamp(0.0, 1.0)
            } else {
                0.0
            }
        }
        MeasureKind::Credibility => {
            if gamma <= m1 {
                1.0
            } else if gamma < m2 {
                ((2.0 * m2 - m1 - gamma) / (2.0 * (m2 - m1))).clamp(0.5, 1.0)
            } else if gamma <= m3 {
                0.5
            } else if gamma < m4 {
                ((m4 - gamma) / (2.0 * (m4 - m3))).clamp(0.0, 0.5)
            } else {
                0.0
            }
        }
    }
}

/// Grade of the event selected by `dir`.
pub fn measure(f: &TrapezoidalFuzzy, gamma: f64, kind: MeasureKind, dir: Direction) -> f64 {
    match dir {
        Direction::LessOrEqual => measure_le(f, gamma, kind),
        Direction::GreaterOrEqual => measure_ge(f, gamma, kind),
    }
}

/// Crisp threshold `v` of the chance constraint `measure{event} ≥ α`.
///
/// For [`Direction::LessOrEqual`] the constraint holds iff `v ≤ γ`; for
/// [`Direction::GreaterOrEqual`] it holds iff `v ≥ γ`. This is exact for
/// `α ∈ (0, 1]`; at `α = 0` the loosest bound (`mu1` or `mu4`) is returned.
///
/// Credibility switches branch at `α = 0.5`, which belongs to the lower
/// branch. The bound jumps there from the `mu3`/`mu4` side to the `mu1`/`mu2`
/// side (`GreaterOrEqual`) or vice versa (`LessOrEqual`).
pub fn crisp_bound(
    f: &TrapezoidalFuzzy,
    kind: MeasureKind,
    dir: Direction,
    alpha: Confidence,
) -> f64 {
    let a = alpha.value();
    let [m1, m2, m3, m4] = f.mu;
    // Each bound walks from one knot towards its neighbour. Written as
    // `start ± w·(gap)` and clamped to the far knot, the result is monotone in
    // `α` under floating-point rounding and exact for crisp trapezoids.
    let up = |from: f64, w: f64, to: f64| (from + w * (to - from)).min(to);
    let down = |from: f64, w: f64, to: f64| (from - w * (from - to)).max(to);
    match (kind, dir) {
        (MeasureKind::Possibility, Direction::LessOrEqual) => up(m1, a, m2),
        (MeasureKind::Possibility, Direction::GreaterOrEqual) => down(m4, a, m3),
        (MeasureKind::Necessity, Direction::LessOrEqual) => up(m3, a, m4),
        (MeasureKind::Necessity, Direction::GreaterOrEqual) => down(m2, a, m1),
        (MeasureKind::Credibility, Direction::LessOrEqual) => {
            if a > 0.5 {
                up(m3, 2.0 * a - 1.0, m4)
            } else {
                up(m1, 2.0 * a, m2)
            }
        }
        (MeasureKind::Credibility, Direction::GreaterOrEqual) => {
            if a > 0.5 {
                down(m2, 2.0 * a - 1.0, m1)
            } else {
                down(m4, 2.0 * a, m3)
            }
        }
    }
}

/// Free-function form of [`TrapezoidalFuzzy::product_nonneg`].
pub fn product_nonneg(
    a: &TrapezoidalFuzzy,
    b: &TrapezoidalFuzzy,
) -> Result<TrapezoidalFuzzy, FuzzyError> {
    a.product_nonneg(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use MeasureKind::*;

    fn tz(a: f64, b: f64, c: f64, d: f64) -> TrapezoidalFuzzy {
        TrapezoidalFuzzy::new(a, b, c, d).unwrap()
    }

    fn alpha(a: f64) -> Confidence {
        Confidence::new(a).unwrap()
    }

    #[test]
    fn membership_examples() {
        let f = tz(1.0, 2.0, 3.0, 4.0);
        assert_eq!(f.membership(2.5), 1.0);
        assert_eq!(f.membership(1.5), 0.5);
        assert_eq!(f.membership(0.0), 0.0);
        assert_eq!(f.membership(3.75), 0.25);
        assert_eq!(f.membership(4.0), 0.0);
    }

    #[test]
    fn membership_degenerate_shoulder_jumps() {
        let f = tz(2.0, 2.0, 3.0, 3.0);
        assert_eq!(f.membership(1.999), 0.0);
        assert_eq!(f.membership(2.0), 1.0);
        assert_eq!(f.membership(3.0), 1.0);
        assert_eq!(f.membership(3.001), 0.0);
    }

    #[test]
    fn rejects_bad_trapezoids() {
        assert!(matches!(
            TrapezoidalFuzzy::new(4.0, 3.0, 2.0, 1.0),
            Err(FuzzyError::Unordered(_))
        ));
        assert!(matches!(
            TrapezoidalFuzzy::new(0.0, f64::NAN, 1.0, 2.0),
            Err(FuzzyError::NonFinite(_))
        ));
        assert!(Confidence::new(1.01).is_err());
        assert!(Confidence::new(-0.1).is_err());
        assert!(Confidence::new(f64::NAN).is_err());
    }

    #[test]
    fn measure_le_examples() {
        let f = tz(1.0, 2.0, 3.0, 4.0);
        assert_eq!(measure_le(&f, 1.5, Possibility), 0.5);
        assert_eq!(measure_le(&f, 3.5, Necessity), 0.5);
        assert_eq!(measure_le(&f, 3.5, Credibility), 0.75);
        assert_eq!(measure_le(&f, 2.5, Credibility), 0.5);
    }

    #[test]
    fn measure_ge_examples() {
        let f = tz(1.0, 2.0, 3.0, 4.0);
        assert_eq!(measure_ge(&f, 3.5, Possibility), 0.5);
        assert_eq!(measure_ge(&f, 1.5, Necessity), 0.5);
        assert_eq!(measure_ge(&f, 1.5, Credibility), 0.75);
    }

    #[test]
    fn knots_agree_from_both_sides() {
        let f = tz(1.0, 2.0, 3.0, 4.0);
        for kind in MeasureKind::ALL {
            for &knot in &f.to_array() {
                for dir in [Direction::LessOrEqual, Direction::GreaterOrEqual] {
                    let at = measure(&f, knot, kind, dir);
                    let below = measure(&f, knot - 1e-9, kind, dir);
                    let above = measure(&f, knot + 1e-9, kind, dir);
                    assert!((at - below).abs() < 1e-8, "{kind} {dir:?} at {knot}");
                    assert!((at - above).abs() < 1e-8, "{kind} {dir:?} at {knot}");
                }
            }
        }
    }

    #[test]
    fn crisp_bound_examples() {
        let f = tz(1.0, 2.0, 3.0, 4.0);
        let ge = Direction::GreaterOrEqual;
        assert_eq!(crisp_bound(&f, Possibility, ge, alpha(0.5)), 3.5);
        assert_eq!(crisp_bound(&f, Necessity, ge, alpha(0.5)), 1.5);
        assert_eq!(crisp_bound(&f, Credibility, ge, alpha(0.75)), 1.5);
        assert_eq!(crisp_bound(&f, Credibility, ge, alpha(0.25)), 3.5);
    }

    #[test]
    fn crisp_bound_endpoints() {
        let f = tz(1.0, 2.0, 3.0, 4.0);
        let le = Direction::LessOrEqual;
        let ge = Direction::GreaterOrEqual;
        assert_eq!(crisp_bound(&f, Possibility, le, alpha(0.0)), 1.0);
        assert_eq!(crisp_bound(&f, Possibility, le, alpha(1.0)), 2.0);
        assert_eq!(crisp_bound(&f, Necessity, le, alpha(1.0)), 4.0);
        assert_eq!(crisp_bound(&f, Possibility, ge, alpha(0.0)), 4.0);
        assert_eq!(crisp_bound(&f, Necessity, ge, alpha(1.0)), 1.0);
        assert_eq!(crisp_bound(&f, Credibility, le, alpha(0.75)), 3.5);
        assert_eq!(crisp_bound(&f, Credibility, le, alpha(0.25)), 1.5);
    }

    #[test]
    fn credibility_half_uses_lower_branch() {
        let f = tz(1.0, 2.0, 3.0, 4.0);
        let ge = Direction::GreaterOrEqual;
        let le = Direction::LessOrEqual;
        assert_eq!(crisp_bound(&f, Credibility, ge, alpha(0.5)), 3.0);
        assert_eq!(crisp_bound(&f, Credibility, le, alpha(0.5)), 2.0);
        // jump just above one half
        let ge_above = crisp_bound(&f, Credibility, ge, alpha(0.5 + 1e-12));
        assert!((ge_above - 2.0).abs() < 1e-9);
        let le_above = crisp_bound(&f, Credibility, le, alpha(0.5 + 1e-12));
        assert!((le_above - 3.0).abs() < 1e-9);
    }

    #[test]
    fn crisp_trapezoid_is_fixed_point() {
        let c = 7.3;
        let f = TrapezoidalFuzzy::crisp(c).unwrap();
        for kind in MeasureKind::ALL {
            for dir in [Direction::LessOrEqual, Direction::GreaterOrEqual] {
                for a in [0.0, 0.1, 0.25, 0.5, 0.5001, 0.75, 0.9, 1.0] {
                    assert_eq!(crisp_bound(&f, kind, dir, alpha(a)), c);
                }
            }
            assert_eq!(measure_le(&f, c, kind), 1.0);
            assert_eq!(measure_ge(&f, c, kind), 1.0);
            assert_eq!(measure_le(&f, c - 1.0, kind), 0.0);
            assert_eq!(measure_ge(&f, c + 1.0, kind), 0.0);
        }
    }

    #[test]
    fn product_examples() {
        let a = tz(1.0, 2.0, 3.0, 4.0);
        assert_eq!(a.product_nonneg(&tz(1.0, 1.0, 1.0, 1.0)).unwrap(), a);
        assert_eq!(
            tz(2.0, 4.0, 6.0, 8.0)
                .product_nonneg(&TrapezoidalFuzzy::crisp(0.5).unwrap())
                .unwrap(),
            a
        );
        assert_eq!(
            a.product_nonneg(&a).unwrap().to_array(),
            [1.0, 4.0, 9.0, 16.0]
        );
        assert!(matches!(
            a.product_nonneg(&tz(-1.0, 0.0, 1.0, 2.0)),
            Err(FuzzyError::NegativeComponent(_))
        ));
    }

    #[test]
    fn product_matches_interval_endpoints() {
        // Support and core of a product of nonnegative intervals are
        // [lo·lo', hi·hi']; check against the four-corner interval product.
        let a = tz(0.5, 1.0, 2.0, 3.5);
        let b = tz(0.2, 0.4, 0.9, 1.0);
        let corners = |x: (f64, f64), y: (f64, f64)| {
            let c = [x.0 * y.0, x.0 * y.1, x.1 * y.0, x.1 * y.1];
            let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        };
        let p = a.product_nonneg(&b).unwrap();
        let support = corners((a.mu1(), a.mu4()), (b.mu1(), b.mu4()));
        let core = corners((a.mu2(), a.mu3()), (b.mu2(), b.mu3()));
        assert_eq!((p.mu1(), p.mu4()), support);
        assert_eq!((p.mu2(), p.mu3()), core);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("poss".parse::<MeasureKind>().unwrap(), Possibility);
        assert_eq!("Necessity".parse::<MeasureKind>().unwrap(), Necessity);
        assert_eq!("cred".parse::<MeasureKind>().unwrap(), Credibility);
        assert!("robust".parse::<MeasureKind>().is_err());
    }
}
