//! `fmod(x, y)`, analysed on the regions `k|y| <= x < (k+1)|y|` where it is
//! monotone, rather than through `x - trunc(x/y) * y`.

use rug::Float;

use super::Ctx;
use crate::backend::{RoundDir, ScalarOp};
use crate::interval::{Endpoint, ErrorInterval, Interval};

impl Ctx<'_> {
    pub fn fmod(&self, x: &Interval, y: &Interval) -> Interval {
        if y.lo.value.is_zero() && y.hi.value.is_zero() {
            return Interval::guaranteed_error();
        }
        if !x.lo.value.is_finite() && x.lo.value == x.hi.value {
            return Interval::guaranteed_error();
        }
        let mut err = ErrorInterval::NONE;
        if y.lo.value <= 0 && y.hi.value >= 0 {
            err.possible = true;
        }
        if !x.lo.value.is_finite() || !x.hi.value.is_finite() {
            err.possible = true;
        }
        // fmod depends on |y| only. Taken exactly, not at working precision.
        let ya = exact_abs(y);

        let mut parts = Vec::new();
        if x.hi.value > 0 || (x.hi.value.is_zero() && x.lo.value.is_zero()) {
            let xp = if x.lo.value >= 0 {
                x.clone()
            } else {
                Interval::new(Endpoint::new(Float::new(self.prec), false), x.hi.clone(), ErrorInterval::NONE)
            };
            parts.push(self.fmod_pos(&xp, &ya));
        }
        if x.lo.value < 0 {
            let xn = if x.hi.value <= 0 {
                self.neg(x)
            } else {
                let neg_lo = Endpoint::new(-x.lo.value.clone(), x.lo.immovable);
                Interval::new(Endpoint::new(Float::new(self.prec), false), neg_lo, ErrorInterval::NONE)
            };
            parts.push(self.neg(&self.fmod_pos(&xn, &ya)));
        }
        let mut out = parts[0].clone();
        if let Some(p) = parts.get(1) {
            out = Interval::hull(&out, p);
        }
        Interval::new(out.lo, out.hi, err)
    }

    /// `x >= 0`, `y >= 0` with `y` not identically zero.
    fn fmod_pos(&self, x: &Interval, y: &Interval) -> Interval {
        let (x0, x1) = (&x.lo, &x.hi);
        let (y0, y1) = (&y.lo, &y.hi);
        let fallback = || {
            let hi = if x1.value <= y1.value { x1.value.clone() } else { y1.value.clone() };
            Interval::movable(Float::new(self.prec), hi)
        };
        if !x1.value.is_finite() {
            return fallback();
        }
        let Some(k_lo) = self.trunc_ratio(&x0.value, &y1.value) else {
            // Any lower estimate of the quotient keeps the bound sound.
            return match self.round(ScalarOp::Div, &[&x0.value, &y1.value], RoundDir::Down) {
                Some(q) if q.value.is_finite() => {
                    Interval::movable(Float::new(self.prec), self.quotient_bound(x1, y1, &q.value.trunc()))
                }
                _ => fallback(),
            };
        };
        // With arbitrarily small divisors, or too many regions to count at
        // this precision, only the bound x / (k + 1) survives.
        let k_hi = if y0.value.is_zero() { None } else { self.trunc_ratio(&x1.value, &y0.value) };
        let Some(k_hi) = k_hi else {
            return Interval::movable(Float::new(self.prec), self.quotient_bound(x1, y1, &k_lo));
        };
        if k_lo == k_hi {
            // Single region: x - k y, increasing in x and decreasing in y.
            let lo = self.fmod_endpoint(x0, y1, RoundDir::Down);
            let hi = self.fmod_endpoint(x1, y0, RoundDir::Up);
            return Interval::new(lo, hi, ErrorInterval::NONE);
        }
        // Several regions: the infimum is 0 (at some x = m y) and the
        // supremum approaches y from below wherever m y lands in (x0, x1].
        let mut hi = self.fmod_endpoint(x1, y0, RoundDir::Up).value;
        let m = Float::with_val(k_lo.prec() + 1, &k_lo + 1u32);
        let m_y0 = Float::with_val_round(self.prec, &m * &y0.value, rug::float::Round::Down).0;
        if m_y0 <= x1.value {
            let cand = self.quotient_bound(x1, y1, &k_lo);
            if cand > hi {
                hi = cand;
            }
        }
        Interval::movable(Float::new(self.prec), hi)
    }

    /// `min(x1, y1, x1 / (k + 1))`, rounded up. For `x` in the inputs,
    /// `fmod(x, y) = x - k y < y` with `k >= trunc(x0 / y1)`, so the
    /// result is below both `y` and `x / (k + 1)`.
    fn quotient_bound(&self, x1: &Endpoint, y1: &Endpoint, k_lo: &Float) -> Float {
        let m = Float::with_val(k_lo.prec() + 1, k_lo + 1u32);
        let q = self
            .round(ScalarOp::Div, &[&x1.value, &m], RoundDir::Up)
            .expect("m is positive")
            .value;
        let mut best = if q <= y1.value { q } else { y1.value.clone() };
        if x1.value < best {
            best = x1.value.clone();
        }
        best
    }

    /// `trunc(a / b)` for `a >= 0`, `b > 0`, or `None` when the working
    /// precision cannot decide it.
    fn trunc_ratio(&self, a: &Float, b: &Float) -> Option<Float> {
        let d = self.round(ScalarOp::Div, &[a, b], RoundDir::Down)?.value.trunc();
        let u = self.round(ScalarOp::Div, &[a, b], RoundDir::Up)?.value.trunc();
        (d == u && d.is_finite()).then_some(d)
    }

    fn fmod_endpoint(&self, x: &Endpoint, y: &Endpoint, dir: RoundDir) -> Endpoint {
        match self.round(ScalarOp::Fmod, &[&x.value, &y.value], dir) {
            Some(r) => Endpoint::new(r.value, r.exact && x.immovable && y.immovable),
            None => Endpoint::movable(if dir == RoundDir::Down { Float::new(self.prec) } else { y.value.clone() }),
        }
    }
}

fn exact_abs(y: &Interval) -> Interval {
    let abs = |e: &Endpoint| Endpoint::new(Float::with_val(e.value.prec(), e.value.abs_ref()), e.immovable);
    if y.lo.value >= 0 {
        y.clone()
    } else if y.hi.value <= 0 {
        Interval::new(abs(&y.hi), abs(&y.lo), ErrorInterval::NONE)
    } else {
        let (l, h) = (abs(&y.lo), abs(&y.hi));
        let top = if l.value >= h.value { l } else { h };
        Interval::new(Endpoint::movable(Float::new(2)), top, ErrorInterval::NONE)
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::*;
    use crate::backend::Backend;

    fn fmod(x: Interval, y: Interval) -> Interval {
        let b = Backend::default();
        Ctx::new(&b, 80).apply(ScalarOp::Fmod, &[x, y])
    }

    #[test]
    fn single_region() {
        assert_eq!(bounds(&fmod(iv(7.0, 8.0), iv(3.0, 3.0))), (1.0, 2.0));
        assert_eq!(bounds(&fmod(iv(1.0, 2.0), iv(4.0, 5.0))), (1.0, 2.0));
        assert_eq!(bounds(&fmod(iv(-2.0, -1.0), iv(4.0, 5.0))), (-2.0, -1.0));
        assert_eq!(bounds(&fmod(iv(7.0, 8.0), iv(-3.0, -3.0))), (1.0, 2.0));
        let r = fmod(fixed(7.0, 8.0), fixed(3.0, 3.0));
        assert_eq!(fl(&r), (true, true));
    }

    #[test]
    fn several_regions() {
        let r = fmod(iv(7.0, 8.0), iv(2.0, 3.0));
        let (lo, hi) = bounds(&r);
        assert_eq!(lo, 0.0);
        assert!((hi - 8.0 / 3.0).abs() < 1e-15 && hi >= 8.0 / 3.0);
        let r = fmod(iv(0.0, 10.0), iv(3.0, 3.0));
        assert_eq!(bounds(&r), (0.0, 3.0));
    }

    #[test]
    fn errors() {
        assert!(fmod(iv(1.0, 2.0), fixed(0.0, 0.0)).err.guaranteed);
        assert_eq!(fmod(iv(1.0, 2.0), iv(-1.0, 1.0)).err, ErrorInterval::POSSIBLE);
        assert!(fmod(fixed(f64::INFINITY, f64::INFINITY), iv(1.0, 2.0)).err.guaranteed);
    }

    #[test]
    fn straddling_zero() {
        let r = fmod(iv(-5.0, 5.0), iv(3.0, 3.0));
        assert_eq!(bounds(&r), (-3.0, 3.0));
    }

    #[test]
    fn divisor_reaching_zero() {
        // fmod(x, y) < y and <= x / 2 once y <= x: the bound is x1 / 2, not y1.
        let r = fmod(iv(17.0, 17.5), iv(-1e-300, 9.0));
        let (lo, hi) = bounds(&r);
        assert_eq!(lo, 0.0);
        assert_eq!(hi, 8.75);
        assert!(r.err.possible);
    }

    #[test]
    fn bound_does_not_exceed_dividend() {
        let b = Backend::default();
        let (a, top) = (0.5915415010397327, 0.5915415010397335);
        for p in [24, 48, 80] {
            let r = Ctx::new(&b, p).apply(ScalarOp::Fmod, &[iv(a, top), iv(a, top)]);
            assert!(r.hi.value <= top, "{p}: {r}");
        }
    }
}
