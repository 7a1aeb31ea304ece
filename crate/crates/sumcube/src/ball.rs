//! Midpoint–radius validated arithmetic in double precision.
//!
//! Every operation returns a ball guaranteed to contain the exact result
//! for any members of the input balls: propagated radii are accumulated
//! with upward-rounded surrogates (`next_up` after each rounded-to-nearest
//! step bounds the true value from above) and the midpoint's own rounding
//! error is absorbed by one extra ulp. Comparisons are three-valued; an
//! overlap is reported as undecided, never silently resolved.

use std::fmt;

use crate::Error;

#[inline]
fn up(x: f64) -> f64 {
    x.next_up()
}

/// Upper bound on a+b under round-to-nearest.
#[inline]
fn add_up(a: f64, b: f64) -> f64 {
    up(a + b)
}

#[inline]
fn sub_up(a: f64, b: f64) -> f64 {
    up(a - b)
}

#[inline]
fn mul_up(a: f64, b: f64) -> f64 {
    up(a * b)
}

#[inline]
fn div_up(a: f64, b: f64) -> f64 {
    up(a / b)
}

/// Upper bound on the rounding error committed when an operation rounded
/// to `m`: one ulp of |m| dominates the half-ulp round-off.
#[inline]
fn round_err(m: f64) -> f64 {
    let a = m.abs();
    up(a) - a
}

/// Outcome of comparing two balls.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BallCmp {
    Less,
    Greater,
    /// The balls overlap; the comparison cannot be certified.
    Undecided,
}

/// A validated real: every member of [mid−rad, mid+rad] is a candidate for
/// the exact value.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Ball {
    mid: f64,
    rad: f64,
}

impl Ball {
    pub const ZERO: Ball = Ball { mid: 0.0, rad: 0.0 };
    pub const ONE: Ball = Ball { mid: 1.0, rad: 0.0 };

    /// Ball containing exactly `x`.
    pub fn exact(x: f64) -> Ball {
        assert!(x.is_finite());
        Ball { mid: x, rad: 0.0 }
    }

    pub fn from_int(n: i64) -> Ball {
        // i64 values up to 2^53 are exact in f64; everything in this
        // pipeline stays far below that.
        debug_assert!(n.abs() < (1i64 << 53));
        Ball::exact(n as f64)
    }

    pub fn from_interval(lo: f64, hi: f64) -> Ball {
        assert!(lo <= hi);
        let mid = 0.5 * (lo + hi);
        let rad = f64::max(sub_up(hi, mid), sub_up(mid, lo));
        Ball { mid, rad }
    }

    pub fn mid(&self) -> f64 {
        self.mid
    }

    pub fn rad(&self) -> f64 {
        self.rad
    }

    pub fn lo(&self) -> f64 {
        (self.mid - self.rad).next_down()
    }

    pub fn hi(&self) -> f64 {
        add_up(self.mid, self.rad)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// |·| of the enclosed set.
    pub fn abs(&self) -> Ball {
        if self.lo() >= 0.0 {
            *self
        } else if self.hi() <= 0.0 {
            -*self
        } else {
            Ball::from_interval(0.0, f64::max(-self.lo(), self.hi()))
        }
    }

    /// Square root; the enclosure may dip below zero by rounding only,
    /// in which case it is clamped (valid whenever the exact value is
    /// known to be nonnegative, as for squared magnitudes).
    pub fn sqrt_nonneg(&self) -> Result<Ball, Error> {
        let hi = self.hi();
        if hi < 0.0 {
            return Err(Error::NegativeSqrt { hi });
        }
        let lo = self.lo().max(0.0);
        Ok(Ball::from_interval(lo.sqrt().next_down(), up(hi.sqrt())))
    }

    pub fn recip(&self) -> Result<Ball, Error> {
        if self.contains_zero() {
            return Err(Error::DivisorContainsZero);
        }
        let (lo, hi) = (self.lo(), self.hi());
        // 1/x is monotone decreasing on an interval excluding 0.
        Ok(Ball::from_interval((1.0 / hi).next_down(), div_up(1.0, lo)))
    }

    pub fn div(&self, rhs: &Ball) -> Result<Ball, Error> {
        Ok(*self * rhs.recip()?)
    }

    /// Three-valued comparison; decisive only when the balls are disjoint.
    pub fn compare(&self, other: &Ball) -> BallCmp {
        if self.hi() < other.lo() {
            BallCmp::Less
        } else if self.lo() > other.hi() {
            BallCmp::Greater
        } else {
            BallCmp::Undecided
        }
    }

    /// Enclosure of max(a, b): exact maxima of the endpoint bounds.
    pub fn max(&self, other: &Ball) -> Ball {
        Ball::from_interval(self.lo().max(other.lo()), self.hi().max(other.hi()))
    }
}

impl std::ops::Add for Ball {
    type Output = Ball;
    fn add(self, rhs: Ball) -> Ball {
        let mid = self.mid + rhs.mid;
        let rad = add_up(add_up(self.rad, rhs.rad), round_err(mid));
        Ball { mid, rad }
    }
}

impl std::ops::Sub for Ball {
    type Output = Ball;
    fn sub(self, rhs: Ball) -> Ball {
        self + (-rhs)
    }
}

impl std::ops::Neg for Ball {
    type Output = Ball;
    fn neg(self) -> Ball {
        Ball {
            mid: -self.mid,
            rad: self.rad,
        }
    }
}

impl std::ops::Mul for Ball {
    type Output = Ball;
    fn mul(self, rhs: Ball) -> Ball {
        let mid = self.mid * rhs.mid;
        let rad = add_up(
            add_up(
                add_up(
                    mul_up(self.mid.abs(), rhs.rad),
                    mul_up(rhs.mid.abs(), self.rad),
                ),
                mul_up(self.rad, rhs.rad),
            ),
            round_err(mid),
        );
        Ball { mid, rad }
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {:e}", self.mid, self.rad)
    }
}

/// A validated complex number as a rectangle of two balls.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct CBall {
    pub re: Ball,
    pub im: Ball,
}

impl CBall {
    pub const ZERO: CBall = CBall {
        re: Ball::ZERO,
        im: Ball::ZERO,
    };

    pub fn new(re: Ball, im: Ball) -> CBall {
        CBall { re, im }
    }

    pub fn from_real(re: Ball) -> CBall {
        CBall {
            re,
            im: Ball::ZERO,
        }
    }

    pub fn exact(re: f64, im: f64) -> CBall {
        CBall {
            re: Ball::exact(re),
            im: Ball::exact(im),
        }
    }

    pub fn conj(&self) -> CBall {
        CBall {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn scale(&self, s: Ball) -> CBall {
        CBall {
            re: self.re * s,
            im: self.im * s,
        }
    }

    /// |z|² as a ball.
    pub fn abs_sq(&self) -> Ball {
        self.re * self.re + self.im * self.im
    }

    /// |z| as a ball enclosing the true modulus.
    pub fn magnitude(&self) -> Ball {
        self.abs_sq()
            .sqrt_nonneg()
            .expect("squared magnitude is nonnegative")
    }

    pub fn div(&self, rhs: &CBall) -> Result<CBall, Error> {
        let d = rhs.abs_sq();
        if d.contains_zero() {
            return Err(Error::DivisorContainsZero);
        }
        let num = *self * rhs.conj();
        Ok(CBall {
            re: num.re.div(&d)?,
            im: num.im.div(&d)?,
        })
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }
}

impl std::ops::Add for CBall {
    type Output = CBall;
    fn add(self, rhs: CBall) -> CBall {
        CBall {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl std::ops::Sub for CBall {
    type Output = CBall;
    fn sub(self, rhs: CBall) -> CBall {
        CBall {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl std::ops::Neg for CBall {
    type Output = CBall;
    fn neg(self) -> CBall {
        CBall {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl std::ops::Mul for CBall {
    type Output = CBall;
    fn mul(self, rhs: CBall) -> CBall {
        CBall {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl fmt::Display for CBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i", self.re, self.im)
    }
}

/// Maps a decisive `≤ bound` test to membership, surfacing overlaps.
pub fn decide_le(value: &Ball, bound: &Ball, context: impl FnOnce() -> String) -> Result<bool, Error> {
    match value.compare(bound) {
        BallCmp::Less => Ok(true),
        BallCmp::Greater => Ok(false),
        BallCmp::Undecided => Err(Error::Undecided {
            context: context(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_endpoints_cover_midrad() {
        let b = Ball::from_interval(1.0, 2.0);
        assert!(b.contains(1.0) && b.contains(2.0) && b.contains(1.5));
        assert!(!b.contains(0.999) && !b.contains(2.001));
    }

    #[test]
    fn arithmetic_contains_exact_values() {
        let a = Ball::exact(0.1);
        let b = Ball::exact(0.2);
        let c = a + b;
        assert!(c.contains(0.1 + 0.2));
        assert!(c.rad() > 0.0); // 0.1 + 0.2 is inexact, the radius must say so
        let d = a * b;
        assert!(d.contains(0.1 * 0.2));
    }

    #[test]
    fn division_by_zero_ball_fails() {
        let z = Ball::from_interval(-1.0, 1.0);
        assert!(matches!(Ball::ONE.div(&z), Err(Error::DivisorContainsZero)));
    }

    #[test]
    fn compare_is_three_valued() {
        let a = Ball::from_interval(0.0, 1.0);
        let b = Ball::from_interval(2.0, 3.0);
        assert_eq!(a.compare(&b), BallCmp::Less);
        assert_eq!(b.compare(&a), BallCmp::Greater);
        assert_eq!(a.compare(&Ball::from_interval(0.5, 2.5)), BallCmp::Undecided);
    }

    #[test]
    fn magnitude_encloses_modulus() {
        let z = CBall::exact(3.0, 4.0);
        let m = z.magnitude();
        assert!(m.contains(5.0));
        assert!(m.rad() < 1e-13);
    }

    #[test]
    fn complex_division_round_trip() {
        let a = CBall::exact(1.25, -2.5);
        let b = CBall::exact(0.5, 3.0);
        let q = a.div(&b).unwrap();
        let back = q * b;
        assert!(back.re.contains(1.25));
        assert!(back.im.contains(-2.5));
    }

    #[test]
    fn max_encloses_maximum() {
        let a = Ball::from_interval(0.0, 1.0);
        let b = Ball::from_interval(0.5, 0.75);
        let m = a.max(&b);
        assert!(m.lo() <= 1.0 && m.hi() >= 1.0);
        assert!(m.lo() >= 0.4999);
    }
}
