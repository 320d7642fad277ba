//! Bugs that randomized testing is known to find in this kind of library.

use rivalkit::{Backend, Ctx, ErrorInterval, Interval, ScalarOp};
use rug::float::{Constant, Round};
use rug::Float;

fn fixed(lo: f64, hi: f64) -> Interval {
    Interval::from_bounds(Float::with_val(53, lo), Float::with_val(53, hi), true, true)
}

/// `[R_down(c), R_up(c)]` at `p` bits for `c = (k + offset) * pi`.
fn around_pi_multiple(k: u64, half: bool, p: u32) -> Interval {
    let work = p + 128 + 64;
    let mut c = Float::with_val(work, Constant::Pi) * k;
    if half {
        c += Float::with_val(work, Constant::Pi) / 2u32;
    }
    let lo = Float::with_val_round(p, &c, Round::Down).0;
    let hi = Float::with_val_round(p, &c, Round::Up).0;
    assert!(lo < hi);
    Interval::movable(lo, hi)
}

#[test]
fn trig_extrema_next_to_rounded_multiples_of_pi() {
    // If pi were rounded to nearest when locating the extrema, some of
    // these tiny intervals would be judged monotone and miss the peak.
    let b = Backend::default();
    for p in [11, 17, 24, 37, 53, 64, 80, 113] {
        let c = Ctx::new(&b, p);
        for k in (0..2000u64).chain([10_007, 123_457, 999_983]) {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let s = c.apply(ScalarOp::Sin, &[around_pi_multiple(k, true, p)]);
            let peak = Float::with_val(2, sign);
            assert!(s.contains(&peak), "sin near ({k} + 1/2)pi at {p} bits: {s}");
            if k > 0 {
                let s = c.apply(ScalarOp::Cos, &[around_pi_multiple(k, false, p)]);
                assert!(s.contains(&peak), "cos near {k}pi at {p} bits: {s}");
            }
        }
    }
}

#[test]
fn fmod_on_a_single_region_is_exact() {
    let b = Backend::default();
    let r = Ctx::new(&b, 80).apply(ScalarOp::Fmod, &[fixed(7.0, 8.0), fixed(3.0, 3.0)]);
    assert_eq!((r.lo.value.to_f64(), r.hi.value.to_f64()), (1.0, 2.0));
    assert!(r.lo.immovable && r.hi.immovable);
    assert_eq!(r.err, ErrorInterval::NONE);
}

#[test]
fn pow_underflow_to_zero_is_immovable() {
    let b = Backend::default();
    for p in [53, 80, 160, 1280] {
        let r = Ctx::new(&b, p).apply(ScalarOp::Pow, &[fixed(0.5, 0.5), fixed(1e10, 1e10)]);
        assert!(r.lo.value.is_zero() && r.lo.immovable, "{p}: {r}");
        // Below the smallest positive value at every precision.
        assert!(r.hi.value > 0 && r.hi.value == b.min_positive(p), "{p}: {r}");
    }
    let r = Ctx::new(&b, 80).apply(ScalarOp::Exp, &[fixed(-1e10, -1e10)]);
    assert!(r.lo.value.is_zero() && r.lo.immovable, "{r}");
}

#[test]
fn pow_with_negative_bases() {
    let b = Backend::default();
    let r = Ctx::new(&b, 80).apply(ScalarOp::Pow, &[fixed(-1.0, 2.0), fixed(1.0, 5.0)]);
    assert_eq!((r.lo.value.to_f64(), r.hi.value.to_f64()), (-1.0, 32.0), "{r}");
    assert_eq!(r.err, ErrorInterval::POSSIBLE);
}

#[test]
fn possible_error_with_immovable_bounds_is_not_stuck() {
    // pow(sin x, 0) at a huge x: at low precision sin x may be 0, so 0^0 is
    // possible, yet the bounds are already the immovable point 1.
    let b = Backend::default();
    let x = Interval::point(Float::with_val(53, -1.3582125328765071e100));
    let c = Ctx::new(&b, 80);
    let s = c.apply(ScalarOp::Sin, &[x]);
    let r = c.apply(ScalarOp::Pow, &[s, fixed(0.0, 0.0)]);
    assert!(r.err.possible && !r.err.guaranteed, "{r}");
    assert!(!r.is_stuck(rivalkit::TargetFormat::Binary64, false), "{r}");
}
