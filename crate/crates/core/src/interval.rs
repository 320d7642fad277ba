//! Interval values: endpoints with movability flags, error intervals, and
//! three-valued booleans.

use std::fmt;

use rug::float::Special;
use rug::Float;

use crate::backend::{Backend, RoundDir, ScalarOp};
use crate::target::TargetFormat;

/// One end of an interval. An immovable endpoint is reproduced exactly by
/// every recomputation at a higher precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Endpoint {
    pub value: Float,
    pub immovable: bool,
}

impl Endpoint {
    pub fn new(value: Float, immovable: bool) -> Endpoint {
        debug_assert!(!value.is_nan(), "NaN endpoint");
        let value = if value.is_zero() && value.is_sign_negative() { -value } else { value };
        Endpoint { value, immovable }
    }

    pub fn movable(value: Float) -> Endpoint {
        Endpoint::new(value, false)
    }

    pub fn fixed(value: Float) -> Endpoint {
        Endpoint::new(value, true)
    }
}

/// Whether a domain error must (`guaranteed`) or may (`possible`) occur.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ErrorInterval {
    pub guaranteed: bool,
    pub possible: bool,
}

impl ErrorInterval {
    pub const NONE: ErrorInterval = ErrorInterval { guaranteed: false, possible: false };
    pub const POSSIBLE: ErrorInterval = ErrorInterval { guaranteed: false, possible: true };
    pub const GUARANTEED: ErrorInterval = ErrorInterval { guaranteed: true, possible: true };

    /// Errors from sibling computations that all happen: any guaranteed
    /// error is guaranteed overall.
    pub fn join(self, other: ErrorInterval) -> ErrorInterval {
        ErrorInterval {
            guaranteed: self.guaranteed || other.guaranteed,
            possible: self.possible || other.possible,
        }
    }

    /// Errors from alternatives of which only one happens.
    pub fn either(self, other: ErrorInterval) -> ErrorInterval {
        ErrorInterval {
            guaranteed: self.guaranteed && other.guaranteed,
            possible: self.possible || other.possible,
        }
    }

    pub fn label(self) -> &'static str {
        if self.guaranteed {
            "guaranteed"
        } else if self.possible {
            "possible"
        } else {
            "none"
        }
    }

    /// The error status as a boolean interval. A decided status cannot
    /// change at higher precision, so its ends are marked immovable.
    pub fn as_bool(self) -> BoolInterval {
        let decided = self.guaranteed || !self.possible;
        BoolInterval { must: self.guaranteed, may: self.possible, must_fixed: decided, may_fixed: decided }
    }
}

/// A three-valued truth value `[must, may]`: `[F,F]`, `[F,T]` or `[T,T]`.
///
/// Each end carries a movability flag, like real endpoints, so that a
/// validity condition stuck at `[F,T]` can be recognised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoolInterval {
    pub must: bool,
    pub may: bool,
    pub must_fixed: bool,
    pub may_fixed: bool,
}

impl BoolInterval {
    pub const TRUE: BoolInterval = BoolInterval { must: true, may: true, must_fixed: true, may_fixed: true };
    pub const FALSE: BoolInterval = BoolInterval { must: false, may: false, must_fixed: true, may_fixed: true };
    pub const UNKNOWN: BoolInterval = BoolInterval { must: false, may: true, must_fixed: false, may_fixed: false };

    pub fn new(must: bool, may: bool) -> BoolInterval {
        debug_assert!(!must || may, "[T,F] is not a boolean interval");
        BoolInterval { must, may, must_fixed: false, may_fixed: false }
    }

    pub fn constant(b: bool) -> BoolInterval {
        if b {
            BoolInterval::TRUE
        } else {
            BoolInterval::FALSE
        }
    }

    pub fn is_true(self) -> bool {
        self.must
    }

    pub fn is_false(self) -> bool {
        !self.may
    }

    pub fn is_unknown(self) -> bool {
        !self.must && self.may
    }

    /// Indeterminate, and no recomputation can change that.
    pub fn is_stuck(self) -> bool {
        self.is_unknown() && self.must_fixed && self.may_fixed
    }

    pub fn and(self, other: BoolInterval) -> BoolInterval {
        // Each end is a minimum; an immovable false end absorbs.
        let end = |a: bool, af: bool, b: bool, bf: bool| {
            let v = a && b;
            let fixed = (!a && af) || (!b && bf) || (af && bf);
            (v, fixed)
        };
        let (must, must_fixed) = end(self.must, self.must_fixed, other.must, other.must_fixed);
        let (may, may_fixed) = end(self.may, self.may_fixed, other.may, other.may_fixed);
        BoolInterval { must, may, must_fixed, may_fixed }
    }

    pub fn or(self, other: BoolInterval) -> BoolInterval {
        self.not().and(other.not()).not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> BoolInterval {
        BoolInterval { must: !self.may, may: !self.must, must_fixed: self.may_fixed, may_fixed: self.must_fixed }
    }

    /// Same truth values, all ends movable.
    pub fn movable(self) -> BoolInterval {
        BoolInterval { must_fixed: false, may_fixed: false, ..self }
    }
}

impl fmt::Display for BoolInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = |b: bool| if b { "T" } else { "F" };
        write!(
            f,
            "[{}{}, {}{}]",
            if self.must_fixed { "!" } else { "" },
            t(self.must),
            t(self.may),
            if self.may_fixed { "!" } else { "" }
        )
    }
}

/// A real interval `[lo, hi]` with its error interval.
///
/// When the error is guaranteed the bounds carry no information and are
/// set to the inverted pair `[+inf, -inf]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Endpoint,
    pub hi: Endpoint,
    pub err: ErrorInterval,
}

impl Interval {
    pub fn new(lo: Endpoint, hi: Endpoint, err: ErrorInterval) -> Interval {
        debug_assert!(err.guaranteed || lo.value <= hi.value, "inverted interval [{}, {}]", lo.value, hi.value);
        Interval { lo, hi, err }
    }

    pub fn from_bounds(lo: Float, hi: Float, lo_fixed: bool, hi_fixed: bool) -> Interval {
        Interval::new(Endpoint::new(lo, lo_fixed), Endpoint::new(hi, hi_fixed), ErrorInterval::NONE)
    }

    /// An input value, known exactly: `[!x, x!]`.
    pub fn point(x: Float) -> Interval {
        Interval::from_bounds(x.clone(), x, true, true)
    }

    /// A target-format value as an exact point interval.
    ///
    /// Returns `None` for NaN.
    pub fn make_point(x: f64) -> Option<Interval> {
        if x.is_nan() {
            return None;
        }
        Some(Interval::point(Float::with_val(53, x)))
    }

    /// Both endpoints movable.
    pub fn movable(lo: Float, hi: Float) -> Interval {
        Interval::from_bounds(lo, hi, false, false)
    }

    /// The canonical interval for a guaranteed error.
    pub fn guaranteed_error() -> Interval {
        Interval {
            lo: Endpoint::movable(Float::with_val(2, Special::Infinity)),
            hi: Endpoint::movable(Float::with_val(2, Special::NegInfinity)),
            err: ErrorInterval::GUARANTEED,
        }
    }

    pub fn with_err(mut self, err: ErrorInterval) -> Interval {
        if err.guaranteed {
            return Interval::guaranteed_error();
        }
        self.err = err;
        self
    }

    pub fn is_error(&self) -> bool {
        self.err.guaranteed
    }

    /// Both endpoints round to the same target value and no error is
    /// possible, so the interval certifies the correctly rounded result.
    pub fn is_one_value(&self, target: TargetFormat) -> bool {
        !self.err.possible && self.bounds_agree(target)
    }

    fn bounds_agree(&self, target: TargetFormat) -> bool {
        target.round(&self.lo.value, RoundDir::Nearest) == target.round(&self.hi.value, RoundDir::Nearest)
    }

    /// Both endpoints immovable but not one value: recomputation can never
    /// produce a ground truth. In `strict_finite` mode a single immovable
    /// infinite endpoint also counts.
    ///
    /// A merely possible error does not make an interval stuck: errors carry
    /// no movability, so a higher precision may still rule them out.
    pub fn is_stuck(&self, target: TargetFormat, strict_finite: bool) -> bool {
        if self.err.guaranteed || self.bounds_agree(target) {
            return false;
        }
        let both = self.lo.immovable && self.hi.immovable;
        let inf_end = (self.lo.immovable && self.lo.value.is_infinite())
            || (self.hi.immovable && self.hi.value.is_infinite());
        both || (strict_finite && inf_end)
    }

    /// `self`, computed at a higher precision, is a refinement of `wide`.
    pub fn refines(&self, wide: &Interval) -> bool {
        if wide.err.guaranteed && !self.err.guaranteed {
            return false;
        }
        if self.err.possible && !wide.err.possible {
            return false;
        }
        if self.err.guaranteed || wide.err.guaranteed {
            return true;
        }
        let hi_ok = if wide.hi.immovable {
            self.hi.immovable && self.hi.value == wide.hi.value
        } else {
            self.hi.value <= wide.hi.value
        };
        let lo_ok = if wide.lo.immovable {
            self.lo.immovable && self.lo.value == wide.lo.value
        } else {
            self.lo.value >= wide.lo.value
        };
        hi_ok && lo_ok
    }

    /// The smallest interval containing both; used when a branch is
    /// undecided. Each end stays immovable only if it is immovable in both.
    pub fn hull(a: &Interval, b: &Interval) -> Interval {
        debug_assert!(!a.err.guaranteed && !b.err.guaranteed);
        let lo = if a.lo.value <= b.lo.value { &a.lo } else { &b.lo };
        let hi = if a.hi.value >= b.hi.value { &a.hi } else { &b.hi };
        Interval::new(
            Endpoint::new(lo.value.clone(), a.lo.immovable && b.lo.immovable),
            Endpoint::new(hi.value.clone(), a.hi.immovable && b.hi.immovable),
            a.err.either(b.err),
        )
    }

    pub fn contains(&self, x: &Float) -> bool {
        !self.err.guaranteed && self.lo.value <= *x && *x <= self.hi.value
    }
}

/// Named constants. `PI` and `E` evaluate to movable one-ulp enclosures;
/// `INFINITY` is an exact point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedConstant {
    Pi,
    E,
    Infinity,
}

impl NamedConstant {
    pub fn name(self) -> &'static str {
        match self {
            NamedConstant::Pi => "PI",
            NamedConstant::E => "E",
            NamedConstant::Infinity => "INFINITY",
        }
    }

    pub fn from_name(s: &str) -> Option<NamedConstant> {
        match s {
            "PI" => Some(NamedConstant::Pi),
            "E" => Some(NamedConstant::E),
            "INFINITY" => Some(NamedConstant::Infinity),
            _ => None,
        }
    }
}

/// `[R_down(c), R_up(c)]` at `prec`.
pub fn make_constant(c: NamedConstant, prec: u32, backend: &Backend) -> Interval {
    if c == NamedConstant::Infinity {
        return Interval::point(Float::with_val(prec, Special::Infinity));
    }
    let bound = |dir: RoundDir| match c {
        NamedConstant::Pi => backend.pi(prec, dir),
        NamedConstant::E => {
            let one = Float::with_val(2, 1);
            backend.rounded_op(ScalarOp::Exp, &[one], prec, dir).expect("exp(1) is defined").value
        }
        NamedConstant::Infinity => unreachable!(),
    };
    Interval::movable(bound(RoundDir::Down), bound(RoundDir::Up))
}

fn fmt_float(f: &mut fmt::Formatter<'_>, x: &Float) -> fmt::Result {
    if x.is_infinite() {
        f.write_str(if x.is_sign_negative() { "-inf" } else { "+inf" })
    } else if x.is_zero() {
        f.write_str("0")
    } else {
        let d = x.to_f64();
        if d.is_finite() && d != 0.0 && Float::with_val(x.prec().max(53), d) == *x {
            write!(f, "{d:?}")
        } else {
            f.write_str(&x.to_string_radix(10, Some(20)))
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.err.guaranteed {
            return f.write_str("[error]");
        }
        f.write_str("[")?;
        if self.lo.immovable {
            f.write_str("!")?;
        }
        fmt_float(f, &self.lo.value)?;
        f.write_str(", ")?;
        fmt_float(f, &self.hi.value)?;
        if self.hi.immovable {
            f.write_str("!")?;
        }
        f.write_str("]")
    }
}

/// The result of evaluating an expression node.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Real(Interval),
    Bool(BoolInterval, ErrorInterval),
}

impl Value {
    pub fn err(&self) -> ErrorInterval {
        match self {
            Value::Real(iv) => iv.err,
            Value::Bool(_, e) => *e,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rug::float::Constant;

    fn iv(lo: f64, hi: f64, lf: bool, hf: bool) -> Interval {
        Interval::from_bounds(Float::with_val(53, lo), Float::with_val(53, hi), lf, hf)
    }

    const ALL: [BoolInterval; 3] = [BoolInterval::FALSE, BoolInterval::UNKNOWN, BoolInterval::TRUE];

    fn vals(b: BoolInterval) -> (bool, bool) {
        (b.must, b.may)
    }

    #[test]
    fn kleene_tables() {
        let u = BoolInterval::UNKNOWN;
        assert_eq!(vals(u.and(BoolInterval::FALSE)), (false, false));
        assert_eq!(vals(u.not()), (false, true));
        assert_eq!(vals(u.or(BoolInterval::TRUE)), (true, true));
        for a in ALL {
            assert_eq!(vals(a.not().not()), vals(a));
            assert_eq!(vals(a.and(BoolInterval::TRUE)), vals(a));
            assert_eq!(vals(a.or(BoolInterval::FALSE)), vals(a));
            for b in ALL {
                assert_eq!(vals(a.and(b).not()), vals(a.not().or(b.not())));
                assert_eq!(vals(a.or(b).not()), vals(a.not().and(b.not())));
                let r = a.and(b);
                assert!(!r.must || r.may);
            }
        }
    }

    #[test]
    fn immovable_false_absorbs() {
        let stuck = BoolInterval { must: false, may: true, must_fixed: true, may_fixed: true };
        assert!(stuck.is_stuck());
        assert!(stuck.and(BoolInterval::TRUE).is_stuck());
        assert!(!stuck.and(BoolInterval::UNKNOWN).is_stuck());
        assert!(stuck.and(BoolInterval::FALSE).is_false());
        assert!(BoolInterval::UNKNOWN.and(BoolInterval::FALSE).may_fixed);
    }

    #[test]
    fn error_as_bool() {
        assert_eq!(ErrorInterval::POSSIBLE.as_bool().is_unknown(), true);
        assert!(ErrorInterval::GUARANTEED.as_bool().is_true());
        assert!(ErrorInterval::NONE.as_bool().is_false());
    }

    #[test]
    fn points() {
        let p = Interval::make_point(3.0).unwrap();
        assert_eq!(p.to_string(), "[!3.0, 3.0!]");
        assert_eq!(p.err, ErrorInterval::NONE);
        let inf = Interval::make_point(f64::INFINITY).unwrap();
        assert_eq!(inf.to_string(), "[!+inf, +inf!]");
        assert!(Interval::make_point(f64::NAN).is_none());
        assert!(p.refines(&p));
        assert!(p.is_one_value(TargetFormat::Binary64));
    }

    #[test]
    fn constants_are_one_ulp_and_refine() {
        let b = Backend::default();
        for c in [NamedConstant::Pi, NamedConstant::E] {
            let lo = make_constant(c, 80, &b);
            let hi = make_constant(c, 160, &b);
            let mut up = lo.lo.value.clone();
            up.next_up();
            assert_eq!(up, lo.hi.value);
            assert!(!lo.lo.immovable && !lo.hi.immovable);
            assert!(hi.refines(&lo));
            let wide = Float::with_val(400, Constant::Pi);
            if c == NamedConstant::Pi {
                assert!(lo.contains(&wide));
            }
        }
    }

    #[test]
    fn one_value_and_stuck() {
        let t = TargetFormat::Binary64;
        assert!(!iv(1.0, 2.0, false, false).is_one_value(t));
        let a = Float::with_val(80, 0.1) - Float::with_val(80, 1e-30);
        let b = Float::with_val(80, 0.1) + Float::with_val(80, 1e-30);
        assert!(Interval::movable(a, b).is_one_value(t));
        assert!(iv(0.0, f64::INFINITY, true, true).is_stuck(t, false));
        assert!(!iv(3.0, 3.0, true, true).is_stuck(t, false));
        let half = iv(0.0, f64::INFINITY, false, true);
        assert!(!half.is_stuck(t, false));
        assert!(half.is_stuck(t, true));
    }

    #[test]
    fn refinement_cases() {
        assert!(iv(1.1, 1.9, false, false).refines(&iv(1.0, 2.0, false, false)));
        assert!(iv(0.0, 5.0, true, false).refines(&iv(0.0, 9.0, true, false)));
        assert!(!iv(0.0, 5.0, false, false).refines(&iv(0.0, 9.0, true, false)));
        assert!(!iv(0.5, 5.0, true, false).refines(&iv(0.0, 9.0, true, false)));
        assert!(!iv(0.0, 10.0, false, false).refines(&iv(0.0, 9.0, false, false)));
        let possible = iv(1.0, 2.0, false, false).with_err(ErrorInterval::POSSIBLE);
        assert!(!possible.refines(&iv(1.0, 2.0, false, false)));
        assert!(Interval::guaranteed_error().refines(&possible));
        assert!(!possible.refines(&Interval::guaranteed_error()));
    }

    #[test]
    fn hull_rules() {
        let h = Interval::hull(&iv(1.0, 2.0, false, false), &iv(5.0, 6.0, false, false));
        assert_eq!((h.lo.value.to_f64(), h.hi.value.to_f64()), (1.0, 6.0));
        let x = iv(1.0, 2.0, true, true);
        assert_eq!(Interval::hull(&x, &x), x);
        let h = Interval::hull(&iv(1.0, 2.0, true, false), &iv(3.0, 4.0, false, false));
        assert!(!h.lo.immovable);
        let h = Interval::hull(&iv(1.0, 2.0, true, false), &iv(3.0, 4.0, true, false));
        assert!(h.lo.immovable);
        let e = Interval::hull(&iv(1.0, 2.0, false, false).with_err(ErrorInterval::POSSIBLE), &x);
        assert_eq!(e.err, ErrorInterval::POSSIBLE);
    }

    #[test]
    fn negative_zero_normalised() {
        let z = Endpoint::new(Float::with_val(53, -0.0), true);
        assert!(!z.value.is_sign_negative());
    }

    fn arb_iv() -> impl Strategy<Value = Interval> {
        (-100i32..100, 0i32..50, any::<bool>(), any::<bool>())
            .prop_map(|(a, w, lf, hf)| iv(a as f64, (a + w) as f64, lf, hf))
    }

    proptest! {
        #[test]
        fn refines_reflexive(a in arb_iv()) {
            prop_assert!(a.refines(&a));
        }

        #[test]
        fn refines_transitive(a in arb_iv(), b in arb_iv(), c in arb_iv()) {
            if a.refines(&b) && b.refines(&c) {
                prop_assert!(a.refines(&c));
            }
        }

        #[test]
        fn stuck_is_inherited(a in arb_iv(), b in arb_iv()) {
            let t = TargetFormat::Binary64;
            if b.is_stuck(t, false) && a.refines(&b) {
                prop_assert!(a.is_stuck(t, false));
            }
        }
    }
}
