//! Comparisons and branch merging.

use std::fmt;

use crate::interval::{BoolInterval, Endpoint, ErrorInterval, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CompareOp {
    pub fn name(self) -> &'static str {
        match self {
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
            CompareOp::Eq => "==",
            CompareOp::Ne => "!=",
        }
    }

    pub fn from_name(s: &str) -> Option<CompareOp> {
        Some(match s {
            "<" => CompareOp::Lt,
            "<=" => CompareOp::Le,
            ">" => CompareOp::Gt,
            ">=" => CompareOp::Ge,
            "==" => CompareOp::Eq,
            "!=" => CompareOp::Ne,
            _ => return None,
        })
    }

    /// The comparison on exact reals.
    pub fn holds<T: PartialOrd>(self, a: &T, b: &T) -> bool {
        match self {
            CompareOp::Lt => a < b,
            CompareOp::Le => a <= b,
            CompareOp::Gt => a > b,
            CompareOp::Ge => a >= b,
            CompareOp::Eq => a == b,
            CompareOp::Ne => a != b,
        }
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `a < b` style ordering test: `must` when it holds for every pair,
/// `may` when for some pair.
fn ordered(lo_strict: bool, a: &Interval, b: &Interval) -> BoolInterval {
    // must: a.hi (<|<=) b.lo ; may: a.lo (<|<=) b.hi
    let rel = |x: &Endpoint, y: &Endpoint| if lo_strict { x.value < y.value } else { x.value <= y.value };
    let must = rel(&a.hi, &b.lo);
    let may = rel(&a.lo, &b.hi);
    BoolInterval {
        must,
        may,
        must_fixed: must || (a.hi.immovable && b.lo.immovable),
        may_fixed: !may || (a.lo.immovable && b.hi.immovable),
    }
}

/// Three-valued comparison of two intervals, with the operands' errors.
pub fn compare(op: CompareOp, a: &Interval, b: &Interval) -> (BoolInterval, ErrorInterval) {
    if a.err.guaranteed || b.err.guaranteed {
        return (BoolInterval::UNKNOWN, ErrorInterval::GUARANTEED);
    }
    let err = a.err.join(b.err);
    let v = match op {
        CompareOp::Lt => ordered(true, a, b),
        CompareOp::Le => ordered(false, a, b),
        CompareOp::Gt => ordered(true, b, a),
        CompareOp::Ge => ordered(false, b, a),
        CompareOp::Eq | CompareOp::Ne => {
            let may = a.lo.value <= b.hi.value && b.lo.value <= a.hi.value;
            let must = a.lo.value == a.hi.value && b.lo.value == b.hi.value && a.lo.value == b.lo.value;
            let all_fixed = a.lo.immovable && a.hi.immovable && b.lo.immovable && b.hi.immovable;
            let eq = BoolInterval { must, may, must_fixed: must || !may || all_fixed, may_fixed: !may || all_fixed };
            if op == CompareOp::Eq {
                eq
            } else {
                eq.not()
            }
        }
    };
    (v, err)
}

/// `if cond then t else e` once both branches are evaluated.
pub fn if_merge(cond: BoolInterval, cond_err: ErrorInterval, t: &Interval, e: &Interval) -> Interval {
    if cond_err.guaranteed {
        return Interval::guaranteed_error();
    }
    let out = if cond.is_true() {
        t.clone()
    } else if cond.is_false() {
        e.clone()
    } else if t.err.guaranteed && e.err.guaranteed {
        return Interval::guaranteed_error();
    } else if t.err.guaranteed {
        e.clone().with_err(e.err.either(t.err))
    } else if e.err.guaranteed {
        t.clone().with_err(t.err.either(e.err))
    } else {
        let h = Interval::hull(t, e);
        if cond.is_stuck() {
            h
        } else {
            // The condition may still resolve to one branch.
            Interval::new(Endpoint::movable(h.lo.value), Endpoint::movable(h.hi.value), h.err)
        }
    };
    let err = out.err.join(cond_err);
    out.with_err(err)
}

#[cfg(test)]
mod tests {
    use super::super::test_util::*;
    use super::*;

    fn vals(b: BoolInterval) -> (bool, bool) {
        (b.must, b.may)
    }

    #[test]
    fn ordering() {
        assert_eq!(vals(compare(CompareOp::Lt, &iv(1.0, 3.0), &iv(4.0, 5.0)).0), (true, true));
        assert_eq!(vals(compare(CompareOp::Lt, &iv(1.0, 4.0), &iv(3.0, 5.0)).0), (false, true));
        assert_eq!(vals(compare(CompareOp::Ge, &iv(1.0, 3.0), &iv(4.0, 5.0)).0), (false, false));
        assert_eq!(vals(compare(CompareOp::Le, &iv(1.0, 3.0), &iv(3.0, 5.0)).0), (true, true));
        assert_eq!(vals(compare(CompareOp::Lt, &iv(1.0, 3.0), &iv(3.0, 5.0)).0), (false, true));
    }

    #[test]
    fn equality() {
        assert_eq!(vals(compare(CompareOp::Eq, &fixed(2.0, 2.0), &fixed(2.0, 2.0)).0), (true, true));
        assert_eq!(vals(compare(CompareOp::Eq, &iv(1.0, 3.0), &iv(2.0, 4.0)).0), (false, true));
        assert_eq!(vals(compare(CompareOp::Ne, &iv(1.0, 3.0), &iv(4.0, 5.0)).0), (true, true));
    }

    #[test]
    fn immovable_indeterminate_is_stuck() {
        let (b, _) = compare(CompareOp::Lt, &fixed(1.0, 4.0), &fixed(3.0, 5.0));
        assert!(b.is_stuck());
        let (b, _) = compare(CompareOp::Lt, &iv(1.0, 4.0), &iv(3.0, 5.0));
        assert!(!b.is_stuck());
    }

    #[test]
    fn error_propagation() {
        let (_, e) = compare(CompareOp::Lt, &Interval::guaranteed_error(), &iv(1.0, 2.0));
        assert!(e.guaranteed);
        let (_, e) = compare(CompareOp::Lt, &iv(1.0, 2.0).with_err(ErrorInterval::POSSIBLE), &iv(1.0, 2.0));
        assert_eq!(e, ErrorInterval::POSSIBLE);
    }

    #[test]
    fn merging() {
        let t = iv(1.0, 2.0);
        let e = iv(5.0, 6.0);
        assert_eq!(bounds(&if_merge(BoolInterval::UNKNOWN, ErrorInterval::NONE, &t, &e)), (1.0, 6.0));
        let a = fixed(1.0, 2.0);
        assert_eq!(if_merge(BoolInterval::TRUE, ErrorInterval::NONE, &a, &e), a);
        let r = if_merge(BoolInterval::UNKNOWN, ErrorInterval::NONE, &t, &Interval::guaranteed_error());
        assert_eq!(bounds(&r), (1.0, 2.0));
        assert_eq!(r.err, ErrorInterval::POSSIBLE);
    }

    #[test]
    fn undecided_merge_is_movable() {
        let r = if_merge(BoolInterval::UNKNOWN, ErrorInterval::NONE, &fixed(1.0, 1.0), &fixed(2.0, 2.0));
        assert_eq!(fl(&r), (false, false));
        let stuck = BoolInterval { must_fixed: true, may_fixed: true, ..BoolInterval::UNKNOWN };
        let r = if_merge(stuck, ErrorInterval::NONE, &fixed(1.0, 1.0), &fixed(2.0, 2.0));
        assert_eq!(fl(&r), (true, true));
    }
}
