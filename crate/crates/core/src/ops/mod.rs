//! Interval versions of the supported functions.
//!
//! Every operation is sound (the output contains the image of the inputs)
//! and propagates movability: an output endpoint is marked immovable only
//! when recomputing at any higher precision must reproduce it exactly.

mod arith;
mod compare;
mod fmod;
mod monotone;
mod pow;
mod trig;

use rug::float::Special;
use rug::Float;

use crate::backend::{Backend, RoundDir, Rounded, ScalarOp};
use crate::interval::{Endpoint, ErrorInterval, Interval};

pub use compare::{compare, if_merge, CompareOp};

/// Evaluation context: the backend plus the working precision.
#[derive(Clone, Copy, Debug)]
pub struct Ctx<'a> {
    pub backend: &'a Backend,
    pub prec: u32,
}

impl<'a> Ctx<'a> {
    pub fn new(backend: &'a Backend, prec: u32) -> Ctx<'a> {
        Ctx { backend, prec }
    }

    /// Apply `op` to interval arguments.
    ///
    /// # Panics
    /// If `args` does not match the operator's arity.
    pub fn apply(&self, op: ScalarOp, args: &[Interval]) -> Interval {
        assert_eq!(args.len(), op.arity(), "arity of {op}");
        if args.iter().any(Interval::is_error) {
            return Interval::guaranteed_error();
        }
        let inherited = args.iter().fold(ErrorInterval::NONE, |e, a| e.join(a.err));
        let out = match op {
            ScalarOp::Neg => self.neg(&args[0]),
            ScalarOp::Add => self.add(&args[0], &args[1]),
            ScalarOp::Sub => self.sub(&args[0], &args[1]),
            ScalarOp::Mul => self.mul(&args[0], &args[1]),
            ScalarOp::Div => self.div(&args[0], &args[1]),
            ScalarOp::Fabs => self.fabs(&args[0]),
            ScalarOp::Sqrt
            | ScalarOp::Cbrt
            | ScalarOp::Exp
            | ScalarOp::Exp2
            | ScalarOp::Log
            | ScalarOp::Log2
            | ScalarOp::Atan
            | ScalarOp::Asin
            | ScalarOp::Acos
            | ScalarOp::Trunc
            | ScalarOp::Floor
            | ScalarOp::Ceil => self.monotone(op, &args[0]),
            ScalarOp::Pow => self.pow(&args[0], &args[1]),
            ScalarOp::Sin => self.sin(&args[0]),
            ScalarOp::Cos => self.cos(&args[0]),
            ScalarOp::Tan => self.tan(&args[0]),
            ScalarOp::Atan2 => self.atan2(&args[0], &args[1]),
            ScalarOp::Fmod => self.fmod(&args[0], &args[1]),
        };
        let err = out.err.join(inherited);
        out.with_err(err)
    }

    /// `op(args)` rounded in `dir`, with IEEE limit semantics; `None` for NaN.
    pub(crate) fn round(&self, op: ScalarOp, args: &[&Float], dir: RoundDir) -> Option<Rounded> {
        self.backend.ieee_op(op, args, self.prec, dir)
    }

    /// An output endpoint computed from witness endpoints: immovable when
    /// all witnesses are immovable and the result is exact.
    pub(crate) fn endpoint(&self, op: ScalarOp, witnesses: &[&Endpoint], dir: RoundDir) -> Option<Endpoint> {
        let vals: Vec<&Float> = witnesses.iter().map(|w| &w.value).collect();
        let r = self.round(op, &vals, dir)?;
        let fixed = r.exact && witnesses.iter().all(|w| w.immovable);
        Some(Endpoint::new(r.value, fixed))
    }

    pub(crate) fn inf(&self, negative: bool) -> Float {
        let f = Float::with_val(self.prec, Special::Infinity);
        if negative {
            -f
        } else {
            f
        }
    }

    pub(crate) fn zero(&self) -> Float {
        Float::new(self.prec)
    }

    pub(crate) fn full_real(&self) -> Interval {
        Interval::movable(self.inf(true), self.inf(false))
    }
}

/// Sign class of an interval: 1 if it lies in `[0, +inf]`, -1 if in
/// `[-inf, 0]`, 0 if zero is strictly inside.
pub(crate) fn class(iv: &Interval) -> i8 {
    if !iv.lo.value.is_sign_negative() || iv.lo.value.is_zero() {
        1
    } else if iv.hi.value.is_sign_negative() || iv.hi.value.is_zero() {
        -1
    } else {
        0
    }
}

pub(crate) fn is_singleton(iv: &Interval) -> bool {
    iv.lo.value == iv.hi.value
}

/// Lower/upper envelope pick: `better(a, b)` selects `a`. When the two
/// values tie, the result is immovable if either is.
pub(crate) fn pick(a: Endpoint, b: Endpoint, lower: bool) -> Endpoint {
    if a.value == b.value {
        let fixed = a.immovable || b.immovable;
        return Endpoint::new(a.value, fixed);
    }
    let a_wins = if lower { a.value < b.value } else { a.value > b.value };
    if a_wins {
        a
    } else {
        b
    }
}
