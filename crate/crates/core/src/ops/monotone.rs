//! Monotone unary functions, with domain clipping and persistent
//! over/underflow detection for the exponentials.

use rug::Float;

use super::Ctx;
use crate::backend::{ExpKind, RoundDir, ScalarOp};
use crate::interval::{Endpoint, ErrorInterval, Interval};

/// Closed or open domain bounds for a unary function.
struct Domain {
    lo: Option<(f64, bool)>,
    hi: Option<(f64, bool)>,
}

fn domain(op: ScalarOp) -> Domain {
    match op {
        ScalarOp::Log | ScalarOp::Log2 => Domain { lo: Some((0.0, false)), hi: None },
        ScalarOp::Sqrt => Domain { lo: Some((0.0, true)), hi: None },
        ScalarOp::Asin | ScalarOp::Acos => Domain { lo: Some((-1.0, true)), hi: Some((1.0, true)) },
        _ => Domain { lo: None, hi: None },
    }
}

impl Ctx<'_> {
    pub(crate) fn monotone(&self, op: ScalarOp, a: &Interval) -> Interval {
        let dom = domain(op);
        let mut lo = a.lo.clone();
        let mut hi = a.hi.clone();
        let mut err = ErrorInterval::NONE;
        if let Some((d, closed)) = dom.lo {
            let d = Float::with_val(53, d);
            let outside = |x: &Float| if closed { *x < d } else { *x <= d };
            if outside(&hi.value) {
                return Interval::guaranteed_error();
            }
            if outside(&lo.value) {
                lo = Endpoint::movable(d);
                err = ErrorInterval::POSSIBLE;
            }
        }
        if let Some((d, _)) = dom.hi {
            let d = Float::with_val(53, d);
            if lo.value > d {
                return Interval::guaranteed_error();
            }
            if hi.value > d {
                hi = Endpoint::movable(d);
                err = ErrorInterval::POSSIBLE;
            }
        }
        let increasing = op != ScalarOp::Acos;
        let (wl, wh) = if increasing { (&lo, &hi) } else { (&hi, &lo) };
        let mut out_lo = self.endpoint(op, &[wl], RoundDir::Down).expect("clipped into the domain");
        let mut out_hi = self.endpoint(op, &[wh], RoundDir::Up).expect("clipped into the domain");
        match op {
            ScalarOp::Exp => self.exp_hooks(ExpKind::Exp, a, &mut out_lo, &mut out_hi),
            ScalarOp::Exp2 => self.exp_hooks(ExpKind::Exp2, a, &mut out_lo, &mut out_hi),
            ScalarOp::Trunc | ScalarOp::Floor | ScalarOp::Ceil => {
                // Piecewise constant: equal images pin the whole interval.
                if out_lo.value == out_hi.value && !out_lo.value.is_infinite() {
                    out_lo.immovable = true;
                    out_hi.immovable = true;
                }
            }
            _ => {}
        }
        Interval::new(out_lo, out_hi, err)
    }

    /// Overflow to `+inf` and underflow to `0`/`minpos` that no precision
    /// can undo are marked immovable.
    fn exp_hooks(&self, kind: ExpKind, a: &Interval, lo: &mut Endpoint, hi: &mut Endpoint) {
        let b = self.backend;
        if hi.value.is_infinite()
            && (b.overflows(kind, &a.lo.value) || (a.hi.immovable && b.overflows(kind, &a.hi.value)))
        {
            hi.immovable = true;
        }
        if lo.value.is_zero()
            && (b.underflows(kind, &a.hi.value) || (a.lo.immovable && b.underflows(kind, &a.lo.value)))
        {
            lo.immovable = true;
        }
        if hi.value == b.min_positive(self.prec) && b.underflows(kind, &a.hi.value) {
            hi.immovable = true;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::*;
    use crate::backend::Backend;

    fn apply(op: ScalarOp, a: Interval) -> Interval {
        let b = Backend::default();
        Ctx::new(&b, 80).apply(op, &[a])
    }

    #[test]
    fn exp_overflow_is_immovable() {
        let r = apply(ScalarOp::Exp, flags(0.0, 1e10, false, true));
        assert_eq!(bounds(&r), (1.0, f64::INFINITY));
        assert_eq!(fl(&r), (false, true));
        // Movable upper input, but every point above the threshold.
        let r = apply(ScalarOp::Exp, iv(1e10, 1e11));
        assert!(r.hi.immovable);
        // Movable input straddling the threshold: not provable.
        let r = apply(ScalarOp::Exp, iv(0.0, 1e10));
        assert!(!r.hi.immovable);
    }

    #[test]
    fn exp_underflow_is_immovable() {
        let r = apply(ScalarOp::Exp, iv(-1e11, -1e10));
        assert_eq!(bounds(&r).0, 0.0);
        assert_eq!(fl(&r), (true, true));
        let r = apply(ScalarOp::Exp2, flags(-1e10, 0.0, true, false));
        assert_eq!(fl(&r), (true, false));
    }

    #[test]
    fn sqrt_exactness_and_clipping() {
        let r = apply(ScalarOp::Sqrt, flags(0.0, 4.0, false, true));
        assert_eq!(bounds(&r), (0.0, 2.0));
        assert_eq!(fl(&r), (false, true));
        let r = apply(ScalarOp::Sqrt, flags(0.0, 2.0, false, true));
        assert!(!r.hi.immovable);
        let r = apply(ScalarOp::Sqrt, iv(-4.0, 4.0));
        assert_eq!(bounds(&r), (0.0, 2.0));
        assert_eq!(r.err, ErrorInterval::POSSIBLE);
        assert!(apply(ScalarOp::Sqrt, iv(-4.0, -1.0)).err.guaranteed);
    }

    #[test]
    fn log_domain() {
        let r = apply(ScalarOp::Log, iv(0.0, 1.0));
        assert_eq!(bounds(&r), (f64::NEG_INFINITY, 0.0));
        assert_eq!(r.err, ErrorInterval::POSSIBLE);
        assert!(apply(ScalarOp::Log2, iv(-2.0, 0.0)).err.guaranteed);
        let r = apply(ScalarOp::Log2, fixed(8.0, 8.0));
        assert_eq!(bounds(&r), (3.0, 3.0));
        assert_eq!(fl(&r), (true, true));
    }

    #[test]
    fn inverse_sine_clipping() {
        let r = apply(ScalarOp::Asin, iv(-2.0, -0.5));
        let (lo, hi) = bounds(&r);
        assert!((lo + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((hi + 0.5235987755982989).abs() < 1e-15);
        assert_eq!(r.err, ErrorInterval::POSSIBLE);
        assert!(apply(ScalarOp::Asin, iv(2.0, 3.0)).err.guaranteed);
        let r = apply(ScalarOp::Asin, fixed(0.0, 0.0));
        assert_eq!(bounds(&r), (0.0, 0.0));
        assert_eq!(fl(&r), (true, true));
        let r = apply(ScalarOp::Acos, iv(0.0, 1.0));
        assert_eq!(bounds(&r).0, 0.0);
        assert!(bounds(&r).1 > 1.57);
    }

    #[test]
    fn floor_pins_constant_images() {
        let r = apply(ScalarOp::Floor, iv(1.2, 1.7));
        assert_eq!(bounds(&r), (1.0, 1.0));
        assert_eq!(fl(&r), (true, true));
        let r = apply(ScalarOp::Ceil, iv(1.2, 2.7));
        assert_eq!(bounds(&r), (2.0, 3.0));
        assert_eq!(fl(&r), (false, false));
        let r = apply(ScalarOp::Trunc, iv(-1.5, 1.5));
        assert_eq!(bounds(&r), (-1.0, 1.0));
    }
}
