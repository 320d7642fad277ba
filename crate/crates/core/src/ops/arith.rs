//! Negation, field operations and absolute value.

use rug::Float;

use super::{class, is_singleton, pick, Ctx};
use crate::backend::{RoundDir, ScalarOp};
use crate::interval::{Endpoint, ErrorInterval, Interval};

impl Ctx<'_> {
    pub fn neg(&self, a: &Interval) -> Interval {
        let lo = self.endpoint(ScalarOp::Neg, &[&a.hi], RoundDir::Down).expect("neg is total");
        let hi = self.endpoint(ScalarOp::Neg, &[&a.lo], RoundDir::Up).expect("neg is total");
        Interval::new(lo, hi, ErrorInterval::NONE)
    }

    pub fn add(&self, a: &Interval, b: &Interval) -> Interval {
        self.additive(ScalarOp::Add, a, b)
    }

    pub fn sub(&self, a: &Interval, b: &Interval) -> Interval {
        self.additive(ScalarOp::Sub, a, b)
    }

    fn additive(&self, op: ScalarOp, a: &Interval, b: &Interval) -> Interval {
        let (b_lo, b_hi) = match op {
            ScalarOp::Add => (&b.lo, &b.hi),
            _ => (&b.hi, &b.lo),
        };
        let mut err = ErrorInterval::NONE;
        let mut end = |x: &Endpoint, y: &Endpoint, dir: RoundDir| -> Endpoint {
            match self.round(op, &[&x.value, &y.value], dir) {
                Some(r) => {
                    let absorbed = r.value.is_infinite()
                        && ((x.immovable && x.value == r.value) || (y.immovable && y.value == r.value));
                    let fixed = (r.exact && x.immovable && y.immovable) || absorbed;
                    Endpoint::new(r.value, fixed)
                }
                None => {
                    // inf - inf: widen to the whole line on this side.
                    err.possible = true;
                    Endpoint::movable(self.inf(dir == RoundDir::Down))
                }
            }
        };
        let lo = end(&a.lo, b_lo, RoundDir::Down);
        let hi = end(&a.hi, b_hi, RoundDir::Up);
        // The endpoint pairs above can miss an inf - inf inside the inputs,
        // as in x - x with x = [-inf, 1].
        let clash = match op {
            ScalarOp::Add => (has_pos_inf(a) && has_neg_inf(b)) || (has_neg_inf(a) && has_pos_inf(b)),
            _ => (has_pos_inf(a) && has_pos_inf(b)) || (has_neg_inf(a) && has_neg_inf(b)),
        };
        err.possible |= clash;
        if err.possible && is_singleton(a) && is_singleton(b) {
            return Interval::guaranteed_error();
        }
        Interval::new(lo, hi, err)
    }

    pub fn mul(&self, a: &Interval, b: &Interval) -> Interval {
        let a_zero = is_singleton(a) && a.lo.value.is_zero();
        let b_zero = is_singleton(b) && b.lo.value.is_zero();
        if a_zero || b_zero {
            let (z, other) = if a_zero { (a, b) } else { (b, a) };
            if is_singleton(other) && other.lo.value.is_infinite() {
                return Interval::guaranteed_error();
            }
            let err = if other.lo.value.is_infinite() || other.hi.value.is_infinite() {
                ErrorInterval::POSSIBLE
            } else {
                ErrorInterval::NONE
            };
            return Interval::new(
                Endpoint::new(self.zero(), z.lo.immovable),
                Endpoint::new(self.zero(), z.hi.immovable),
                err,
            );
        }
        let (ca, cb) = (class(a), class(b));
        let mut err = ErrorInterval::NONE;
        let mut prod = |x: &Endpoint, xo: &Interval, y: &Endpoint, yo: &Interval, dir: RoundDir| {
            self.mul_endpoint(x, xo, y, yo, dir).unwrap_or_else(|| {
                err.possible = true;
                Endpoint::movable(self.inf(dir == RoundDir::Down))
            })
        };
        let (lo, hi) = match (ca, cb) {
            (1, 1) => (prod(&a.lo, a, &b.lo, b, RoundDir::Down), prod(&a.hi, a, &b.hi, b, RoundDir::Up)),
            (1, 0) => (prod(&a.hi, a, &b.lo, b, RoundDir::Down), prod(&a.hi, a, &b.hi, b, RoundDir::Up)),
            (1, -1) => (prod(&a.hi, a, &b.lo, b, RoundDir::Down), prod(&a.lo, a, &b.hi, b, RoundDir::Up)),
            (0, 1) => (prod(&a.lo, a, &b.hi, b, RoundDir::Down), prod(&a.hi, a, &b.hi, b, RoundDir::Up)),
            (0, -1) => (prod(&a.hi, a, &b.lo, b, RoundDir::Down), prod(&a.lo, a, &b.lo, b, RoundDir::Up)),
            (-1, 1) => (prod(&a.lo, a, &b.hi, b, RoundDir::Down), prod(&a.hi, a, &b.lo, b, RoundDir::Up)),
            (-1, 0) => (prod(&a.lo, a, &b.hi, b, RoundDir::Down), prod(&a.lo, a, &b.lo, b, RoundDir::Up)),
            (-1, -1) => (prod(&a.hi, a, &b.hi, b, RoundDir::Down), prod(&a.lo, a, &b.lo, b, RoundDir::Up)),
            _ => {
                let l1 = prod(&a.lo, a, &b.hi, b, RoundDir::Down);
                let l2 = prod(&a.hi, a, &b.lo, b, RoundDir::Down);
                let h1 = prod(&a.lo, a, &b.lo, b, RoundDir::Up);
                let h2 = prod(&a.hi, a, &b.hi, b, RoundDir::Up);
                (pick(l1, l2, true), pick(h1, h2, false))
            }
        };
        err.possible |= (has_zero(a) && has_inf(b)) || (has_inf(a) && has_zero(b));
        Interval::new(lo, hi, err)
    }

    /// Product of witness endpoints `x` (from `xo`) and `y` (from `yo`).
    /// `None` for `0 * inf`.
    fn mul_endpoint(&self, x: &Endpoint, xo: &Interval, y: &Endpoint, yo: &Interval, dir: RoundDir) -> Option<Endpoint> {
        let r = self.round(ScalarOp::Mul, &[&x.value, &y.value], dir)?;
        let excludes_zero = |iv: &Interval| {
            let l = &iv.lo.value;
            let h = &iv.hi.value;
            (!l.is_zero() && !l.is_sign_negative()) || (!h.is_zero() && h.is_sign_negative())
        };
        let fixed = (x.immovable && y.immovable && r.exact)
            || (x.immovable && x.value.is_zero())
            || (y.immovable && y.value.is_zero())
            || (x.immovable && x.value.is_infinite() && excludes_zero(yo))
            || (y.immovable && y.value.is_infinite() && excludes_zero(xo));
        Some(Endpoint::new(r.value, fixed))
    }

    pub fn div(&self, a: &Interval, b: &Interval) -> Interval {
        let b_lo_zero = b.lo.value.is_zero();
        let b_hi_zero = b.hi.value.is_zero();
        if b_lo_zero && b_hi_zero {
            return Interval::guaranteed_error();
        }
        let straddles = b.lo.value < 0 && b.hi.value > 0;
        if straddles {
            return self.full_real().with_err(ErrorInterval::POSSIBLE);
        }
        let mut err = if b_lo_zero || b_hi_zero { ErrorInterval::POSSIBLE } else { ErrorInterval::NONE };
        if is_singleton(a) && a.lo.value.is_zero() {
            return Interval::new(
                Endpoint::new(self.zero(), a.lo.immovable),
                Endpoint::new(self.zero(), a.hi.immovable),
                err,
            );
        }
        let cb: i8 = if b.lo.value.is_zero() || !b.lo.value.is_sign_negative() { 1 } else { -1 };
        let ca = class(a);
        let (lo_w, hi_w) = match (ca, cb) {
            (1, 1) => ((&a.lo, &b.hi), (&a.hi, &b.lo)),
            (0, 1) => ((&a.lo, &b.lo), (&a.hi, &b.lo)),
            (-1, 1) => ((&a.lo, &b.lo), (&a.hi, &b.hi)),
            (1, -1) => ((&a.hi, &b.hi), (&a.lo, &b.lo)),
            (0, -1) => ((&a.hi, &b.hi), (&a.lo, &b.hi)),
            _ => ((&a.hi, &b.lo), (&a.lo, &b.hi)),
        };
        let mut quot = |x: &Endpoint, y: &Endpoint, dir: RoundDir| -> Endpoint {
            if y.value.is_zero() {
                // Division by a zero endpoint: the limit from inside `b`.
                if x.value.is_zero() {
                    err.possible = true;
                    return Endpoint::movable(self.inf(dir == RoundDir::Down));
                }
                let negative = x.value.is_sign_negative() != (cb < 0);
                return Endpoint::movable(self.inf(negative));
            }
            match self.round(ScalarOp::Div, &[&x.value, &y.value], dir) {
                Some(r) => {
                    let fixed = (x.immovable && y.immovable && r.exact)
                        || (x.immovable && (x.value.is_zero() || x.value.is_infinite()))
                        || (y.immovable && y.value.is_infinite() && ca != 0);
                    Endpoint::new(r.value, fixed)
                }
                None => {
                    err.possible = true;
                    Endpoint::movable(self.inf(dir == RoundDir::Down))
                }
            }
        };
        let lo = quot(lo_w.0, lo_w.1, RoundDir::Down);
        let hi = quot(hi_w.0, hi_w.1, RoundDir::Up);
        err.possible |= has_inf(a) && has_inf(b);
        if err.possible && is_singleton(a) && is_singleton(b) {
            return Interval::guaranteed_error();
        }
        Interval::new(lo, hi, err)
    }

    pub fn fabs(&self, a: &Interval) -> Interval {
        match class(a) {
            1 => {
                let lo = self.endpoint(ScalarOp::Fabs, &[&a.lo], RoundDir::Down).expect("fabs is total");
                let hi = self.endpoint(ScalarOp::Fabs, &[&a.hi], RoundDir::Up).expect("fabs is total");
                Interval::new(lo, hi, ErrorInterval::NONE)
            }
            -1 => self.neg(a),
            _ => {
                let l = self.endpoint(ScalarOp::Fabs, &[&a.lo], RoundDir::Up).expect("fabs is total");
                let h = self.endpoint(ScalarOp::Fabs, &[&a.hi], RoundDir::Up).expect("fabs is total");
                let zero = Endpoint::new(Float::new(self.prec), a.lo.immovable && a.hi.immovable);
                Interval::new(zero, pick(l, h, false), ErrorInterval::NONE)
            }
        }
    }
}

fn has_pos_inf(iv: &Interval) -> bool {
    iv.hi.value.is_infinite() && iv.hi.value > 0
}

fn has_neg_inf(iv: &Interval) -> bool {
    iv.lo.value.is_infinite() && iv.lo.value < 0
}

fn has_inf(iv: &Interval) -> bool {
    has_pos_inf(iv) || has_neg_inf(iv)
}

fn has_zero(iv: &Interval) -> bool {
    iv.lo.value <= 0 && iv.hi.value >= 0
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::*;
    use crate::backend::Backend;
    use crate::interval::NamedConstant;

    fn ctx(b: &Backend) -> Ctx<'_> {
        Ctx::new(b, 80)
    }

    #[test]
    fn addition_absorbs_immovable_infinity() {
        let b = Backend::default();
        let r = ctx(&b).add(&flags(1.0, f64::INFINITY, false, true), &iv(1.0, 2.0));
        assert_eq!(bounds(&r), (2.0, f64::INFINITY));
        assert_eq!(fl(&r), (false, true));
    }

    #[test]
    fn exact_sums_of_immovables() {
        let b = Backend::default();
        let r = ctx(&b).add(&fixed(1.0, 2.0), &fixed(3.0, 4.0));
        assert_eq!(bounds(&r), (4.0, 6.0));
        assert_eq!(fl(&r), (true, true));
        let pi = crate::interval::make_constant(NamedConstant::Pi, 80, &b);
        let r = ctx(&b).add(&fixed(1.0, 2.0), &pi);
        assert_eq!(fl(&r), (false, false));
    }

    #[test]
    fn opposite_infinities() {
        let b = Backend::default();
        let c = ctx(&b);
        let r = c.add(&fixed(f64::INFINITY, f64::INFINITY), &fixed(f64::NEG_INFINITY, f64::NEG_INFINITY));
        assert!(r.err.guaranteed);
        let r = c.add(&fixed(f64::INFINITY, f64::INFINITY), &iv(f64::NEG_INFINITY, 3.0));
        assert!(r.err.possible && !r.err.guaranteed);
        // No endpoint pair clashes, but -inf - -inf is inside.
        let x = iv(f64::NEG_INFINITY, 1.0);
        let r = c.sub(&x, &x);
        assert!(r.err.possible && !r.err.guaranteed);
        assert!(c.mul(&iv(0.0, 1.0), &iv(2.0, f64::INFINITY)).err.possible);
        assert!(c.div(&iv(1.0, f64::INFINITY), &iv(2.0, f64::INFINITY)).err.possible);
        assert!(!c.mul(&iv(1.0, 2.0), &iv(2.0, f64::INFINITY)).err.possible);
    }

    #[test]
    fn multiplication_cases() {
        let b = Backend::default();
        let c = ctx(&b);
        let r = c.mul(&iv(-1.0, 1.0), &fixed(1.0, f64::INFINITY));
        assert_eq!(bounds(&r), (f64::NEG_INFINITY, f64::INFINITY));
        assert_eq!(fl(&r), (false, false));
        let r = c.mul(&fixed(0.0, 0.0), &iv(5.0, 9.0));
        assert_eq!(bounds(&r), (0.0, 0.0));
        assert_eq!(fl(&r), (true, true));
        let r = c.mul(&flags(2.0, 3.0, true, false), &flags(4.0, 5.0, true, false));
        assert_eq!(bounds(&r), (8.0, 15.0));
        assert_eq!(fl(&r), (true, false));
        let r = c.mul(&iv(-2.0, 3.0), &iv(-5.0, 4.0));
        assert_eq!(bounds(&r), (-15.0, 12.0));
    }

    #[test]
    fn division_cases() {
        let b = Backend::default();
        let c = ctx(&b);
        let r = c.div(&iv(1.0, 1.0), &iv(-1.0, 1.0));
        assert_eq!(bounds(&r), (f64::NEG_INFINITY, f64::INFINITY));
        assert_eq!(r.err, ErrorInterval::POSSIBLE);
        let r = c.div(&iv(1.0, 2.0), &iv(4.0, 8.0));
        assert_eq!(bounds(&r), (0.125, 0.5));
        assert!(c.div(&iv(1.0, 2.0), &fixed(0.0, 0.0)).err.guaranteed);
        let r = c.div(&iv(1.0, 2.0), &iv(0.0, 4.0));
        assert_eq!(bounds(&r), (0.25, f64::INFINITY));
        assert!(r.err.possible && !r.hi.immovable);
        let r = c.div(&iv(1.0, 2.0), &iv(-4.0, 0.0));
        assert_eq!(bounds(&r), (f64::NEG_INFINITY, -0.25));
        let r = c.div(&iv(-3.0, 2.0), &iv(-4.0, -1.0));
        assert_eq!(bounds(&r), (-2.0, 3.0));
    }

    #[test]
    fn overflowed_quotient_is_stuck() {
        let b = Backend::default();
        let c = ctx(&b);
        let big = Float::with_val(80, 1) << 2000u32;
        let num = Interval::new(Endpoint::movable(big.clone()), Endpoint::fixed(c.inf(false)), ErrorInterval::NONE);
        let r = c.div(&num, &num);
        assert_eq!(bounds(&r), (0.0, f64::INFINITY));
        assert_eq!(fl(&r), (true, true));
    }

    #[test]
    fn absolute_value() {
        let b = Backend::default();
        let c = ctx(&b);
        let r = c.fabs(&iv(-3.0, 2.0));
        assert_eq!(bounds(&r), (0.0, 3.0));
        assert!(!r.lo.immovable);
        let r = c.fabs(&fixed(-3.0, -1.0));
        assert_eq!(bounds(&r), (1.0, 3.0));
        assert_eq!(fl(&r), (true, true));
        let r = c.fabs(&flags(-2.0, 5.0, true, true));
        assert_eq!(bounds(&r), (0.0, 5.0));
        assert_eq!(fl(&r), (true, true));
    }
}
