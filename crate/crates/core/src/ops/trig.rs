//! Periodic functions and `atan2`.
//!
//! `sin`, `cos` and `tan` locate each endpoint's half-period by bounding
//! `floor(x / pi)` from both sides with directed roundings of `pi`. When the
//! interval spans at most one extremum the result is tight; otherwise the
//! full range is returned.

use rug::Float;

use super::{pick, Ctx};
use crate::backend::{RoundDir, ScalarOp};
use crate::interval::{Endpoint, ErrorInterval, Interval};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Periodic {
    Sin,
    Cos,
}

impl Ctx<'_> {
    /// A bound on `floor(x / pi - shift)`: a lower bound when `dir` is
    /// `Down`, an upper bound when `Up`.
    fn half_period(&self, x: &Float, shift: f64, dir: RoundDir) -> Float {
        // x / pi decreases in pi for x >= 0, so pick pi's rounding to push the
        // quotient in `dir`.
        let toward = if (*x >= 0) == (dir == RoundDir::Down) { RoundDir::Up } else { RoundDir::Down };
        let pi = self.backend.pi(self.prec, toward);
        let q = Float::with_val_round(self.prec, x / &pi, dir.to_rug()).0;
        let q = Float::with_val_round(self.prec, &q - shift, dir.to_rug()).0;
        q.floor()
    }

    /// `(lower bound of floor(lo/pi - shift), upper bound of floor(hi/pi - shift), both exact)`.
    fn regions(&self, a: &Interval, shift: f64) -> (Float, Float, bool) {
        let lo_d = self.half_period(&a.lo.value, shift, RoundDir::Down);
        let lo_u = self.half_period(&a.lo.value, shift, RoundDir::Up);
        let hi_d = self.half_period(&a.hi.value, shift, RoundDir::Down);
        let hi_u = self.half_period(&a.hi.value, shift, RoundDir::Up);
        let certain = lo_d == lo_u && hi_d == hi_u;
        (lo_d, hi_u, certain)
    }

    fn infinite_trig_input(&self, a: &Interval) -> Option<Interval> {
        if !a.lo.value.is_finite() || !a.hi.value.is_finite() {
            if super::is_singleton(a) {
                return Some(Interval::guaranteed_error());
            }
            return Some(self.unit_range().with_err(ErrorInterval::POSSIBLE));
        }
        None
    }

    fn unit_range(&self) -> Interval {
        Interval::movable(Float::with_val(self.prec, -1), Float::with_val(self.prec, 1))
    }

    pub fn sin(&self, a: &Interval) -> Interval {
        if let Some(r) = self.infinite_trig_input(a) {
            return r;
        }
        self.periodic(Periodic::Sin, a)
    }

    pub fn cos(&self, a: &Interval) -> Interval {
        if let Some(r) = self.infinite_trig_input(a) {
            return r;
        }
        self.periodic(Periodic::Cos, a)
    }

    fn periodic(&self, f: Periodic, a: &Interval) -> Interval {
        // On [k pi, (k+1) pi] cos decreases for even k; sin behaves the same
        // on [(k + 1/2) pi, (k + 3/2) pi].
        let (op, shift) = match f {
            Periodic::Cos => (ScalarOp::Cos, 0.0),
            Periodic::Sin => (ScalarOp::Sin, 0.5),
        };
        let (k_lo, k_hi, certain) = self.regions(a, shift);
        let even = Float::with_val(k_lo.prec(), &k_lo / 2u32).is_integer();
        let width = Float::with_val(k_lo.prec().max(k_hi.prec()) + 2, &k_hi - &k_lo);
        let ep = |w: &Endpoint, dir| self.endpoint(op, &[w], dir).expect("finite argument");
        if width == 0 {
            let (lo, hi) = if even {
                (ep(&a.hi, RoundDir::Down), ep(&a.lo, RoundDir::Up))
            } else {
                (ep(&a.lo, RoundDir::Down), ep(&a.hi, RoundDir::Up))
            };
            Interval::new(lo, hi, ErrorInterval::NONE)
        } else if width == 1 {
            // One interior extremum, which is exactly -1 or 1.
            let pinned = certain && a.lo.immovable && a.hi.immovable;
            if even {
                let hi = pick(ep(&a.lo, RoundDir::Up), ep(&a.hi, RoundDir::Up), false);
                Interval::new(Endpoint::new(Float::with_val(self.prec, -1), pinned), hi, ErrorInterval::NONE)
            } else {
                let lo = pick(ep(&a.lo, RoundDir::Down), ep(&a.hi, RoundDir::Down), true);
                Interval::new(lo, Endpoint::new(Float::with_val(self.prec, 1), pinned), ErrorInterval::NONE)
            }
        } else {
            self.unit_range()
        }
    }

    pub fn tan(&self, a: &Interval) -> Interval {
        if !a.lo.value.is_finite() || !a.hi.value.is_finite() {
            if super::is_singleton(a) {
                return Interval::guaranteed_error();
            }
            return self.full_real().with_err(ErrorInterval::POSSIBLE);
        }
        // tan increases on ((k - 1/2) pi, (k + 1/2) pi).
        let (k_lo, k_hi, _) = self.regions(a, -0.5);
        if k_lo == k_hi {
            let lo = self.endpoint(ScalarOp::Tan, &[&a.lo], RoundDir::Down).expect("finite argument");
            let hi = self.endpoint(ScalarOp::Tan, &[&a.hi], RoundDir::Up).expect("finite argument");
            Interval::new(lo, hi, ErrorInterval::NONE)
        } else {
            self.full_real().with_err(ErrorInterval::POSSIBLE)
        }
    }

    /// `atan2(y, x)`: the angle of the point `(x, y)`.
    pub fn atan2(&self, y: &Interval, x: &Interval) -> Interval {
        let contains_zero = |iv: &Interval| iv.lo.value <= 0 && iv.hi.value >= 0;
        let origin_in = contains_zero(y) && contains_zero(x);
        let only_origin = y.lo.value.is_zero() && y.hi.value.is_zero() && x.lo.value.is_zero() && x.hi.value.is_zero();
        if only_origin {
            return Interval::guaranteed_error();
        }
        let err = if origin_in { ErrorInterval::POSSIBLE } else { ErrorInterval::NONE };
        let interior = y.lo.value < 0 && y.hi.value > 0 && x.lo.value < 0 && x.hi.value > 0;
        let crosses_cut = x.lo.value < 0 && y.lo.value < 0 && y.hi.value >= 0;
        if interior || crosses_cut {
            let lo = -self.backend.pi(self.prec, RoundDir::Up);
            let hi = self.backend.pi(self.prec, RoundDir::Up);
            return Interval::movable(lo, hi).with_err(err);
        }
        let mut lo: Option<Endpoint> = None;
        let mut hi: Option<Endpoint> = None;
        for yw in [&y.lo, &y.hi] {
            for xw in [&x.lo, &x.hi] {
                if yw.value.is_zero() && xw.value.is_zero() {
                    continue;
                }
                let l = self.atan2_endpoint(yw, xw, x, RoundDir::Down);
                let h = self.atan2_endpoint(yw, xw, x, RoundDir::Up);
                lo = Some(match lo {
                    Some(p) => pick(p, l, true),
                    None => l,
                });
                hi = Some(match hi {
                    Some(p) => pick(p, h, false),
                    None => h,
                });
            }
        }
        Interval::new(lo.expect("a corner off the origin"), hi.expect("a corner off the origin"), err)
    }

    fn atan2_endpoint(&self, yw: &Endpoint, xw: &Endpoint, x: &Interval, dir: RoundDir) -> Endpoint {
        let r = self.round(ScalarOp::Atan2, &[&yw.value, &xw.value], dir).expect("not at the origin");
        // A zero angle from an immovable y = 0 stays put while x keeps a
        // positive sign.
        let positive_x = x.lo.value > 0;
        let fixed = (r.exact && yw.immovable && xw.immovable)
            || (yw.immovable && yw.value.is_zero() && r.value.is_zero() && positive_x);
        Endpoint::new(r.value, fixed)
    }
}
