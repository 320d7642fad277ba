//! Correctly-rounded scalar arithmetic over MPFR.
//!
//! Every operation reports whether its result is exact, using MPFR's ternary
//! return value rather than the global inexact flag, so the backend is safe
//! to share between threads. Results are additionally clamped into a
//! configurable exponent range, which is what makes overflow persistent
//! across precisions.

use std::cmp::Ordering;
use std::fmt;

use gmp_mpfr_sys::mpfr;
use rug::float::{Round, Special};
use rug::Float;
use thiserror::Error;

/// Arbitrary-precision binary floating-point value.
pub type BigFloat = Float;

/// Largest working precision the engine will use by default.
pub const DEFAULT_MAX_PRECISION: u32 = 10240;
/// Default exponent budget, matching MPFR's default exponent range.
pub const DEFAULT_EXPONENT_BITS: u32 = 31;
/// Precision used to compute the exp-family overflow thresholds.
pub const THRESHOLD_PRECISION: u32 = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RoundDir {
    Down,
    Up,
    Nearest,
}

impl RoundDir {
    fn raw(self) -> mpfr::rnd_t {
        match self {
            RoundDir::Down => mpfr::rnd_t::RNDD,
            RoundDir::Up => mpfr::rnd_t::RNDU,
            RoundDir::Nearest => mpfr::rnd_t::RNDN,
        }
    }

    pub fn to_rug(self) -> Round {
        match self {
            RoundDir::Down => Round::Down,
            RoundDir::Up => Round::Up,
            RoundDir::Nearest => Round::Nearest,
        }
    }

    /// The opposite directed rounding; nearest maps to itself.
    pub fn flip(self) -> RoundDir {
        match self {
            RoundDir::Down => RoundDir::Up,
            RoundDir::Up => RoundDir::Down,
            RoundDir::Nearest => RoundDir::Nearest,
        }
    }
}

/// The scalar functions the engine knows how to round correctly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarOp {
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Sqrt,
    Cbrt,
    Exp,
    Exp2,
    Log,
    Log2,
    Pow,
    Sin,
    Cos,
    Tan,
    Asin,
    Acos,
    Atan,
    Atan2,
    Fabs,
    Fmod,
    Trunc,
    Floor,
    Ceil,
}

impl ScalarOp {
    pub const ALL: [ScalarOp; 24] = [
        ScalarOp::Neg,
        ScalarOp::Add,
        ScalarOp::Sub,
        ScalarOp::Mul,
        ScalarOp::Div,
        ScalarOp::Sqrt,
        ScalarOp::Cbrt,
        ScalarOp::Exp,
        ScalarOp::Exp2,
        ScalarOp::Log,
        ScalarOp::Log2,
        ScalarOp::Pow,
        ScalarOp::Sin,
        ScalarOp::Cos,
        ScalarOp::Tan,
        ScalarOp::Asin,
        ScalarOp::Acos,
        ScalarOp::Atan,
        ScalarOp::Atan2,
        ScalarOp::Fabs,
        ScalarOp::Fmod,
        ScalarOp::Trunc,
        ScalarOp::Floor,
        ScalarOp::Ceil,
    ];

    pub fn arity(self) -> usize {
        use ScalarOp::*;
        match self {
            Add | Sub | Mul | Div | Pow | Atan2 | Fmod => 2,
            _ => 1,
        }
    }

    /// FPCore spelling of the operator.
    pub fn name(self) -> &'static str {
        use ScalarOp::*;
        match self {
            Neg => "neg",
            Add => "+",
            Sub => "-",
            Mul => "*",
            Div => "/",
            Sqrt => "sqrt",
            Cbrt => "cbrt",
            Exp => "exp",
            Exp2 => "exp2",
            Log => "log",
            Log2 => "log2",
            Pow => "pow",
            Sin => "sin",
            Cos => "cos",
            Tan => "tan",
            Asin => "asin",
            Acos => "acos",
            Atan => "atan",
            Atan2 => "atan2",
            Fabs => "fabs",
            Fmod => "fmod",
            Trunc => "trunc",
            Floor => "floor",
            Ceil => "ceil",
        }
    }

    pub fn from_name(name: &str) -> Option<ScalarOp> {
        ScalarOp::ALL.iter().copied().find(|op| op.name() == name)
    }

    /// Whether the point `args` lies in the mathematical domain of the
    /// operator, over the extended reals.
    ///
    /// This is stricter than IEEE semantics in a few places: `log(0)`,
    /// `x / 0`, `0^y` for `y <= 0`, and `atan2(0, 0)` are all domain errors.
    pub fn in_domain(self, args: &[Float]) -> bool {
        use ScalarOp::*;
        if args.iter().any(Float::is_nan) {
            return false;
        }
        match self {
            Neg | Fabs | Cbrt | Exp | Exp2 | Atan | Trunc | Floor | Ceil => true,
            Add => !(args[0].is_infinite() && args[1].is_infinite() && sign(&args[0]) != sign(&args[1])),
            Sub => !(args[0].is_infinite() && args[1].is_infinite() && sign(&args[0]) == sign(&args[1])),
            Mul => {
                !((args[0].is_zero() && args[1].is_infinite())
                    || (args[0].is_infinite() && args[1].is_zero()))
            }
            Div => !args[1].is_zero() && !(args[0].is_infinite() && args[1].is_infinite()),
            Sqrt => !args[0].is_sign_negative() || args[0].is_zero(),
            Log | Log2 => sign(&args[0]) > 0,
            Asin | Acos => args[0].is_finite() && args[0].clone().abs() <= 1,
            Sin | Cos | Tan => args[0].is_finite(),
            Atan2 => !(args[0].is_zero() && args[1].is_zero()),
            Fmod => args[0].is_finite() && !args[1].is_zero(),
            Pow => {
                let (x, y) = (&args[0], &args[1]);
                match sign(x) {
                    1 => true,
                    0 => sign(y) > 0,
                    _ => y.is_integer(),
                }
            }
        }
    }
}

impl fmt::Display for ScalarOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn sign(x: &Float) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_sign_negative() {
        -1
    } else {
        1
    }
}

/// A correctly rounded result and whether rounding was a no-op.
#[derive(Clone, Debug, PartialEq)]
pub struct Rounded {
    pub value: Float,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("{op} is undefined at the given arguments")]
    Domain { op: ScalarOp },
    #[error("{op} expects {expected} arguments, got {got}")]
    Arity { op: ScalarOp, expected: usize, got: usize },
    #[error("precision {0} is outside the supported range")]
    Precision(u32),
    #[error("exponent budget of {0} bits is outside the supported range 4..=31")]
    ExponentBits(u32),
}

/// Which exponential function a threshold refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpKind {
    Exp,
    Exp2,
}

/// Scalar arithmetic with a fixed exponent budget.
///
/// Values are `±m·2^e` with `0.5 <= m < 1` and `emin <= e <= emax`, where
/// `emax = 2^(exponent_bits-1) - 1` and `emin = -emax`. The thresholds for
/// persistent over- and underflow of `exp`/`exp2` depend only on that budget
/// and are computed once here.
#[derive(Clone, Debug)]
pub struct Backend {
    exponent_bits: u32,
    emax: i32,
    emin: i32,
    max_precision: u32,
    exp_overflow: Float,
    exp2_overflow: Float,
    exp_underflow: Float,
    exp2_underflow: Float,
}

impl Default for Backend {
    fn default() -> Self {
        Backend::new(DEFAULT_EXPONENT_BITS).expect("default exponent budget is valid")
    }
}

impl Backend {
    pub fn new(exponent_bits: u32) -> Result<Backend, BackendError> {
        if !(4..=31).contains(&exponent_bits) {
            return Err(BackendError::ExponentBits(exponent_bits));
        }
        let emax = (1i32 << (exponent_bits - 1)) - 1;
        // The native MPFR range must contain the emulated one.
        debug_assert!(rug::float::exp_max() >= emax && rug::float::exp_min() <= -emax);
        let emin = -emax;
        let exp_overflow = scaled_ln2(emax, RoundDir::Up);
        let exp2_overflow = Float::with_val(THRESHOLD_PRECISION, emax);
        let exp_underflow = scaled_ln2(emin - 1, RoundDir::Down);
        let exp2_underflow = Float::with_val(THRESHOLD_PRECISION, emin - 1);
        Ok(Backend {
            exponent_bits,
            emax,
            emin,
            max_precision: DEFAULT_MAX_PRECISION,
            exp_overflow,
            exp2_overflow,
            exp_underflow,
            exp2_underflow,
        })
    }

    pub fn with_max_precision(mut self, max_precision: u32) -> Result<Backend, BackendError> {
        if !(2..=rug::float::prec_max()).contains(&max_precision) {
            return Err(BackendError::Precision(max_precision));
        }
        self.max_precision = max_precision;
        Ok(self)
    }

    pub fn exponent_bits(&self) -> u32 {
        self.exponent_bits
    }

    pub fn emax(&self) -> i32 {
        self.emax
    }

    pub fn emin(&self) -> i32 {
        self.emin
    }

    pub fn max_precision(&self) -> u32 {
        self.max_precision
    }

    /// Upper-rounded `T` such that any `x >= T` overflows the exponential at
    /// every precision.
    pub fn overflow_threshold(&self, kind: ExpKind) -> &Float {
        match kind {
            ExpKind::Exp => &self.exp_overflow,
            ExpKind::Exp2 => &self.exp2_overflow,
        }
    }

    /// `x >= threshold`: the exponential is `+inf` when rounded up at any
    /// precision.
    pub fn overflows(&self, kind: ExpKind, x: &Float) -> bool {
        *x >= *self.overflow_threshold(kind)
    }

    /// The exponential of `x` lies strictly below the smallest positive
    /// value at every precision.
    pub fn underflows(&self, kind: ExpKind, x: &Float) -> bool {
        match kind {
            ExpKind::Exp => *x <= self.exp_underflow,
            ExpKind::Exp2 => *x < self.exp2_underflow,
        }
    }

    /// Largest finite value at precision `prec`.
    pub fn max_finite(&self, prec: u32) -> Float {
        let mut v = Float::with_val(prec, 1);
        v.next_down();
        v << self.emax as u32
    }

    /// Smallest positive value; independent of precision.
    pub fn min_positive(&self, prec: u32) -> Float {
        let v = Float::with_val(prec, 1);
        v >> (1 - self.emin) as u32
    }

    fn check_prec(&self, prec: u32) -> Result<(), BackendError> {
        if prec < 2 || prec > rug::float::prec_max() {
            return Err(BackendError::Precision(prec));
        }
        Ok(())
    }

    /// Round `f(args)` to `prec` bits in direction `dir`.
    pub fn rounded_op(
        &self,
        op: ScalarOp,
        args: &[Float],
        prec: u32,
        dir: RoundDir,
    ) -> Result<Rounded, BackendError> {
        if args.len() != op.arity() {
            return Err(BackendError::Arity { op, expected: op.arity(), got: args.len() });
        }
        self.check_prec(prec)?;
        if !op.in_domain(args) {
            return Err(BackendError::Domain { op });
        }
        let refs: Vec<&Float> = args.iter().collect();
        self.ieee_op(op, &refs, prec, dir).ok_or(BackendError::Domain { op })
    }

    /// Like [`Backend::rounded_op`] but with MPFR's IEEE-style semantics at
    /// domain boundaries (`log 0 = -inf`, `1/+0 = +inf`, `pow(+0, -1) = +inf`).
    /// Returns `None` where the result would be NaN.
    ///
    /// # Panics
    /// On an arity mismatch or an unsupported precision.
    pub fn ieee_op(&self, op: ScalarOp, args: &[&Float], prec: u32, dir: RoundDir) -> Option<Rounded> {
        assert_eq!(args.len(), op.arity(), "arity of {op}");
        assert!((2..=rug::float::prec_max()).contains(&prec), "precision {prec}");
        let mut out = Float::new(prec);
        let rnd = dir.raw();
        // SAFETY: `out` and `args` are initialized MPFR values; MPFR allows
        // inputs of any precision and writes only to `out`.
        let ternary = unsafe {
            let o = out.as_raw_mut();
            let a = args[0].as_raw();
            match op {
                ScalarOp::Neg => mpfr::neg(o, a, rnd),
                ScalarOp::Add => mpfr::add(o, a, args[1].as_raw(), rnd),
                ScalarOp::Sub => mpfr::sub(o, a, args[1].as_raw(), rnd),
                ScalarOp::Mul => mpfr::mul(o, a, args[1].as_raw(), rnd),
                ScalarOp::Div => mpfr::div(o, a, args[1].as_raw(), rnd),
                ScalarOp::Sqrt => mpfr::sqrt(o, a, rnd),
                ScalarOp::Cbrt => mpfr::cbrt(o, a, rnd),
                ScalarOp::Exp => mpfr::exp(o, a, rnd),
                ScalarOp::Exp2 => mpfr::exp2(o, a, rnd),
                ScalarOp::Log => mpfr::log(o, a, rnd),
                ScalarOp::Log2 => mpfr::log2(o, a, rnd),
                ScalarOp::Pow => mpfr::pow(o, a, args[1].as_raw(), rnd),
                ScalarOp::Sin => mpfr::sin(o, a, rnd),
                ScalarOp::Cos => mpfr::cos(o, a, rnd),
                ScalarOp::Tan => mpfr::tan(o, a, rnd),
                ScalarOp::Asin => mpfr::asin(o, a, rnd),
                ScalarOp::Acos => mpfr::acos(o, a, rnd),
                ScalarOp::Atan => mpfr::atan(o, a, rnd),
                ScalarOp::Atan2 => mpfr::atan2(o, a, args[1].as_raw(), rnd),
                ScalarOp::Fabs => mpfr::abs(o, a, rnd),
                ScalarOp::Fmod => mpfr::fmod(o, a, args[1].as_raw(), rnd),
                ScalarOp::Trunc => mpfr::rint_trunc(o, a, rnd),
                ScalarOp::Floor => mpfr::rint_floor(o, a, rnd),
                ScalarOp::Ceil => mpfr::rint_ceil(o, a, rnd),
            }
        };
        if out.is_nan() {
            return None;
        }
        Some(self.clamp(out, ternary == 0, dir))
    }

    /// Round an already computed value into `prec` bits.
    pub fn round(&self, x: &Float, prec: u32, dir: RoundDir) -> Rounded {
        let (v, ord) = Float::with_val_round(prec, x, dir.to_rug());
        self.clamp(v, ord == Ordering::Equal, dir)
    }

    /// Round an exact rational into `prec` bits.
    pub fn round_rational(&self, q: &rug::Rational, prec: u32, dir: RoundDir) -> Rounded {
        let (v, ord) = Float::with_val_round(prec, q, dir.to_rug());
        self.clamp(v, ord == Ordering::Equal, dir)
    }

    /// `pi` rounded in direction `dir`.
    pub fn pi(&self, prec: u32, dir: RoundDir) -> Float {
        Float::with_val_round(prec, rug::float::Constant::Pi, dir.to_rug()).0
    }

    /// Apply the configured exponent range to a result computed in MPFR's
    /// (wider) native range.
    fn clamp(&self, mut v: Float, exact: bool, dir: RoundDir) -> Rounded {
        if v.is_zero() {
            // Single zero: the sign is irrelevant for interval endpoints.
            if v.is_sign_negative() {
                v = Float::with_val(v.prec(), 0);
            }
            return Rounded { value: v, exact };
        }
        let Some(e) = v.get_exp() else {
            return Rounded { value: v, exact };
        };
        let prec = v.prec();
        let negative = v.is_sign_negative();
        if e > self.emax {
            let toward_inf = match dir {
                RoundDir::Nearest => true,
                RoundDir::Up => !negative,
                RoundDir::Down => negative,
            };
            let mag = if toward_inf {
                Float::with_val(prec, Special::Infinity)
            } else {
                self.max_finite(prec)
            };
            let value = if negative { -mag } else { mag };
            return Rounded { value, exact: false };
        }
        if e < self.emin {
            let away = match dir {
                RoundDir::Nearest => e >= self.emin - 1 && {
                    // Halfway point between 0 and the smallest positive value.
                    let half = self.min_positive(prec) >> 1u32;
                    v.clone().abs() > half
                },
                RoundDir::Up => !negative,
                RoundDir::Down => negative,
            };
            let value = if away {
                let m = self.min_positive(prec);
                if negative {
                    -m
                } else {
                    m
                }
            } else {
                Float::with_val(prec, 0)
            };
            return Rounded { value, exact: false };
        }
        Rounded { value: v, exact }
    }
}

/// `scale * ln 2` correctly rounded to the threshold precision in direction
/// `dir`, computed by widening an enclosure until both ends agree.
fn scaled_ln2(scale: i32, dir: RoundDir) -> Float {
    let mut work = 2 * THRESHOLD_PRECISION;
    loop {
        let lo_ln2 = Float::with_val_round(work, rug::float::Constant::Log2, Round::Down).0;
        let hi_ln2 = Float::with_val_round(work, rug::float::Constant::Log2, Round::Up).0;
        let (a, b) = if scale >= 0 { (lo_ln2, hi_ln2) } else { (hi_ln2, lo_ln2) };
        let lo = Float::with_val_round(work, &a * scale, Round::Down).0;
        let hi = Float::with_val_round(work, &b * scale, Round::Up).0;
        let r = dir.to_rug();
        let lo80 = Float::with_val_round(THRESHOLD_PRECISION, &lo, r).0;
        let hi80 = Float::with_val_round(THRESHOLD_PRECISION, &hi, r).0;
        if lo80 == hi80 {
            return lo80;
        }
        work *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(prec: u32, x: f64) -> Float {
        Float::with_val(prec, x)
    }

    #[test]
    fn exact_dyadic_division() {
        let b = Backend::default();
        let r = b.rounded_op(ScalarOp::Div, &[f(53, 1.0), f(53, 4.0)], 53, RoundDir::Down).unwrap();
        assert_eq!(r.value, 0.25);
        assert!(r.exact);
    }

    #[test]
    fn sqrt_exactness() {
        let b = Backend::default();
        for prec in [2, 24, 53, 80, 1000] {
            let r = b.rounded_op(ScalarOp::Sqrt, &[f(53, 2.0)], prec, RoundDir::Up).unwrap();
            assert!(!r.exact);
            let r = b.rounded_op(ScalarOp::Sqrt, &[f(53, 4.0)], prec, RoundDir::Down).unwrap();
            assert!(r.exact);
            assert_eq!(r.value, 2);
        }
    }

    #[test]
    fn domain_errors_are_signalled() {
        let b = Backend::default();
        let cases: Vec<(ScalarOp, Vec<f64>)> = vec![
            (ScalarOp::Sqrt, vec![-1.0]),
            (ScalarOp::Log, vec![0.0]),
            (ScalarOp::Log2, vec![-3.0]),
            (ScalarOp::Div, vec![1.0, 0.0]),
            (ScalarOp::Pow, vec![-2.0, 0.5]),
            (ScalarOp::Pow, vec![0.0, -1.0]),
            (ScalarOp::Pow, vec![0.0, 0.0]),
            (ScalarOp::Asin, vec![1.5]),
            (ScalarOp::Atan2, vec![0.0, 0.0]),
            (ScalarOp::Fmod, vec![1.0, 0.0]),
            (ScalarOp::Sin, vec![f64::INFINITY]),
            (ScalarOp::Add, vec![f64::INFINITY, f64::NEG_INFINITY]),
            (ScalarOp::Mul, vec![0.0, f64::INFINITY]),
        ];
        for (op, args) in cases {
            let args: Vec<Float> = args.iter().map(|&x| f(53, x)).collect();
            assert_eq!(
                b.rounded_op(op, &args, 80, RoundDir::Nearest),
                Err(BackendError::Domain { op }),
                "{op}"
            );
        }
        assert!(b.rounded_op(ScalarOp::Pow, &[f(53, -2.0), f(53, 3.0)], 80, RoundDir::Up).is_ok());
    }

    #[test]
    fn arity_mismatch() {
        let b = Backend::default();
        assert!(matches!(
            b.rounded_op(ScalarOp::Add, &[f(53, 1.0)], 80, RoundDir::Up),
            Err(BackendError::Arity { .. })
        ));
    }

    #[test]
    fn exp2_threshold_is_emax() {
        let b = Backend::default();
        assert_eq!(*b.overflow_threshold(ExpKind::Exp2), (1i64 << 30) - 1);
        let small = Backend::new(11).unwrap();
        assert_eq!(*small.overflow_threshold(ExpKind::Exp2), 1023);
    }

    #[test]
    fn exp_threshold_is_upper_rounded_ln2_multiple() {
        for bits in [8, 11, 31] {
            let b = Backend::new(bits).unwrap();
            let t = b.overflow_threshold(ExpKind::Exp);
            assert_eq!(t.prec(), THRESHOLD_PRECISION);
            // Independent: (emax * ln 2) at 200 bits, nearest.
            let wide = Float::with_val(200, rug::float::Constant::Log2) * b.emax();
            assert!(*t > wide);
            let mut below = t.clone();
            below.next_down();
            assert!(below < wide);
        }
    }

    #[test]
    fn exp_overflows_beyond_threshold_at_every_precision() {
        for bits in [11, 16, 31] {
            let b = Backend::new(bits).unwrap();
            let t = b.overflow_threshold(ExpKind::Exp).clone();
            for prec in [2, 24, 80, 333, 2048] {
                let up = b.rounded_op(ScalarOp::Exp, &[t.clone()], prec, RoundDir::Up).unwrap();
                assert!(up.value.is_infinite() && !up.exact, "bits {bits} prec {prec}");
                let down = b.rounded_op(ScalarOp::Exp, &[t.clone()], prec, RoundDir::Down).unwrap();
                assert_eq!(down.value, b.max_finite(prec));
            }
            // Just below the threshold (at the threshold's own precision) the
            // 80-bit rounding may still fit; the exact boundary is irrational.
            let mut below = t.clone();
            below.next_down();
            below.next_down();
            let r = b.rounded_op(ScalarOp::Exp, &[below], 200, RoundDir::Up).unwrap();
            assert!(r.value.is_finite());
        }
    }

    #[test]
    fn exp_underflow_is_persistent() {
        let b = Backend::new(11).unwrap();
        let mut u = Float::with_val(80, b.emin() - 1) * Float::with_val(80, rug::float::Constant::Log2);
        u -= 1;
        assert!(b.underflows(ExpKind::Exp, &u));
        for prec in [24, 80, 640] {
            let lo = b.rounded_op(ScalarOp::Exp, &[u.clone()], prec, RoundDir::Down).unwrap();
            assert!(lo.value.is_zero());
            let hi = b.rounded_op(ScalarOp::Exp, &[u.clone()], prec, RoundDir::Up).unwrap();
            assert_eq!(hi.value, b.min_positive(prec));
        }
        assert!(!b.underflows(ExpKind::Exp2, &Float::with_val(53, b.emin() - 1)));
        assert!(b.underflows(ExpKind::Exp2, &Float::with_val(53, b.emin() - 2)));
    }

    #[test]
    fn small_budget_clamps_products() {
        let b = Backend::new(11).unwrap();
        let big = Float::with_val(53, 2.0f64.powi(1000));
        let r = b.rounded_op(ScalarOp::Mul, &[big.clone(), big.clone()], 53, RoundDir::Up).unwrap();
        assert!(r.value.is_infinite() && !r.exact);
        let r = b.rounded_op(ScalarOp::Mul, &[big.clone(), big], 53, RoundDir::Down).unwrap();
        assert_eq!(r.value, b.max_finite(53));
        let tiny = Float::with_val(53, 2.0f64.powi(-1000));
        let r = b.rounded_op(ScalarOp::Mul, &[tiny.clone(), tiny.clone()], 53, RoundDir::Down).unwrap();
        assert!(r.value.is_zero());
        let r = b.rounded_op(ScalarOp::Mul, &[tiny.clone(), -tiny], 53, RoundDir::Down).unwrap();
        assert_eq!(r.value, -b.min_positive(53));
    }

    #[test]
    fn negative_zero_collapses() {
        let b = Backend::default();
        let r = b.rounded_op(ScalarOp::Neg, &[f(53, 0.0)], 53, RoundDir::Down).unwrap();
        assert!(r.value.is_zero() && !r.value.is_sign_negative());
    }

    #[test]
    fn op_names_round_trip() {
        for op in ScalarOp::ALL {
            assert_eq!(ScalarOp::from_name(op.name()), Some(op));
        }
    }
}
