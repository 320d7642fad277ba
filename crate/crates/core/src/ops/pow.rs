//! `pow(x, y)` over the real domain: `x > 0`, `x = 0` with `y > 0`, and
//! `x < 0` with integral `y`.

use rug::Float;

use super::{is_singleton, pick, Ctx};
use crate::backend::{RoundDir, ScalarOp};
use crate::interval::{Endpoint, ErrorInterval, Interval};

fn class_around(iv: &Interval, pivot: u32) -> i8 {
    if iv.lo.value >= pivot {
        1
    } else if iv.hi.value <= pivot {
        -1
    } else {
        0
    }
}

fn is_odd(n: &Float) -> bool {
    let half = Float::with_val(n.prec(), n / 2u32);
    !half.is_integer()
}

impl Ctx<'_> {
    pub fn pow(&self, x: &Interval, y: &Interval) -> Interval {
        let mut parts: Vec<Interval> = Vec::new();
        let mut err = ErrorInterval::NONE;
        let zero = Float::new(self.prec);

        if x.hi.value > 0 {
            let xp = if x.lo.value > 0 {
                x.clone()
            } else {
                Interval::new(Endpoint::movable(zero.clone()), x.hi.clone(), ErrorInterval::NONE)
            };
            parts.push(self.pow_pos(&xp, y));
        }

        if x.lo.value <= 0 && x.hi.value >= 0 {
            if y.hi.value > 0 {
                let pinned = is_singleton(x) && x.lo.immovable && x.hi.immovable;
                parts.push(Interval::from_bounds(zero.clone(), zero.clone(), pinned, pinned));
            }
            if y.lo.value <= 0 {
                err.possible = true;
            }
        }

        if x.lo.value < 0 {
            let abs_lo = if x.hi.value < 0 {
                Endpoint::new(-x.hi.value.clone(), x.hi.immovable)
            } else {
                Endpoint::movable(zero.clone())
            };
            let abs_hi = Endpoint::new(-x.lo.value.clone(), x.lo.immovable);
            let xa = Interval::new(abs_lo, abs_hi, ErrorInterval::NONE);
            if is_singleton(y) && y.lo.value.is_integer() {
                let r = self.pow_pos(&xa, y);
                parts.push(if is_odd(&y.lo.value) { self.neg(&r) } else { r });
            } else {
                err.possible = true;
                let klo = y.lo.value.clone().ceil();
                let khi = y.hi.value.clone().floor();
                if klo <= khi {
                    let ks = Interval::movable(klo, khi);
                    let m = self.pow_pos(&xa, &ks).hi.value;
                    parts.push(Interval::movable(-m.clone(), m));
                }
            }
        }

        let Some(first) = parts.first() else {
            return Interval::guaranteed_error();
        };
        let mut out = first.clone();
        for p in &parts[1..] {
            out = Interval::hull(&out, p);
        }
        let err = out.err.join(err);
        out.with_err(err)
    }

    /// `pow` on `x >= 0`, where a zero lower bound stands for the limit
    /// from the right.
    fn pow_pos(&self, x: &Interval, y: &Interval) -> Interval {
        let (cx, cy) = (class_around(x, 1), class_around(y, 0));
        let e = |xw: &Endpoint, yw: &Endpoint, dir: RoundDir| self.pow_endpoint(xw, yw, dir);
        let down = RoundDir::Down;
        let up = RoundDir::Up;
        let (mut lo, mut hi) = match (cx, cy) {
            (1, 1) => (e(&x.lo, &y.lo, down), e(&x.hi, &y.hi, up)),
            (1, 0) => (e(&x.hi, &y.lo, down), e(&x.hi, &y.hi, up)),
            (1, -1) => (e(&x.hi, &y.lo, down), e(&x.lo, &y.hi, up)),
            (0, 1) => (e(&x.lo, &y.hi, down), e(&x.hi, &y.hi, up)),
            (0, -1) => (e(&x.hi, &y.lo, down), e(&x.lo, &y.lo, up)),
            (-1, 1) => (e(&x.lo, &y.hi, down), e(&x.hi, &y.lo, up)),
            (-1, 0) => (e(&x.lo, &y.hi, down), e(&x.lo, &y.lo, up)),
            (-1, -1) => (e(&x.hi, &y.hi, down), e(&x.lo, &y.lo, up)),
            _ => (
                pick(e(&x.lo, &y.hi, down), e(&x.hi, &y.lo, down), true),
                pick(e(&x.lo, &y.lo, up), e(&x.hi, &y.hi, up), false),
            ),
        };
        // Extreme values take their movability from exp(y * log x), whose
        // overflow and underflow analysis is precise.
        let extreme = |v: &Float| v.is_zero() || v.is_infinite() || *v == self.backend.min_positive(self.prec);
        if (!lo.immovable && extreme(&lo.value)) || (!hi.immovable && extreme(&hi.value)) {
            let lg = self.monotone(ScalarOp::Log, x);
            let prod = self.mul(y, &lg);
            if !lg.err.possible && !prod.err.possible {
                let ident = self.monotone(ScalarOp::Exp, &prod);
                if ident.lo.immovable && ident.lo.value == lo.value {
                    lo.immovable = true;
                }
                if ident.hi.immovable && ident.hi.value == hi.value {
                    hi.immovable = true;
                }
            }
        }
        Interval::new(lo, hi, ErrorInterval::NONE)
    }

    fn pow_endpoint(&self, x: &Endpoint, y: &Endpoint, dir: RoundDir) -> Endpoint {
        let r = self
            .round(ScalarOp::Pow, &[&x.value, &y.value], dir)
            .expect("pow of a non-negative base is never NaN");
        let fixed = (r.exact && x.immovable && y.immovable)
            || (x.immovable && x.value == 1 && y.value.is_finite())
            || (y.immovable && y.value.is_zero());
        Endpoint::new(r.value, fixed)
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::*;
    use crate::backend::Backend;

    fn pow(x: Interval, y: Interval) -> Interval {
        let b = Backend::default();
        Ctx::new(&b, 80).apply(ScalarOp::Pow, &[x, y])
    }

    #[test]
    fn mixed_sign_base() {
        let r = pow(iv(-1.0, 2.0), iv(1.0, 5.0));
        assert_eq!(bounds(&r), (-1.0, 32.0));
        assert_eq!(r.err, ErrorInterval::POSSIBLE);
    }

    #[test]
    fn exact_integer_power() {
        let r = pow(fixed(2.0, 2.0), fixed(3.0, 3.0));
        assert_eq!(bounds(&r), (8.0, 8.0));
        assert_eq!(fl(&r), (true, true));
    }

    #[test]
    fn negative_base_integer_exponent() {
        let r = pow(fixed(-2.0, -2.0), fixed(3.0, 3.0));
        assert_eq!(bounds(&r), (-8.0, -8.0));
        assert_eq!(fl(&r), (true, true));
        assert_eq!(r.err, ErrorInterval::NONE);
        let r = pow(fixed(-3.0, -2.0), fixed(2.0, 2.0));
        assert_eq!(bounds(&r), (4.0, 9.0));
        assert!(pow(iv(-3.0, -2.0), iv(0.25, 0.75)).err.guaranteed);
    }

    #[test]
    fn zero_base() {
        assert!(pow(fixed(0.0, 0.0), iv(-2.0, -1.0)).err.guaranteed);
        let r = pow(fixed(0.0, 0.0), iv(1.0, 2.0));
        assert_eq!(bounds(&r), (0.0, 0.0));
        assert_eq!(fl(&r), (true, true));
        let r = pow(iv(0.0, 4.0), iv(-1.0, 1.0));
        assert!(r.err.possible && !r.err.guaranteed);
        assert_eq!(bounds(&r).1, f64::INFINITY);
    }

    #[test]
    fn overflow_and_underflow_via_identity() {
        let r = pow(fixed(1e10, 1e10), fixed(1e10, 1e10));
        assert_eq!(bounds(&r).1, f64::INFINITY);
        assert!(r.hi.immovable);
        let r = pow(fixed(0.5, 0.5), fixed(1e10, 1e10));
        assert!(r.lo.value.is_zero());
        assert_eq!(fl(&r), (true, true));
    }

    #[test]
    fn fractional_exponent_of_positive_base() {
        let r = pow(fixed(4.0, 9.0), fixed(0.5, 0.5));
        assert_eq!(bounds(&r), (2.0, 3.0));
        assert_eq!(fl(&r), (true, true));
    }
}
