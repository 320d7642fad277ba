//! Random values, intervals, expressions and preconditions.

use rand::Rng;
use rivalkit::{CompareOp, Expr, NamedConstant, ScalarOp};
use rug::Rational;

pub const VARS: [&str; 2] = ["x", "y"];

const FIELD_OPS: [ScalarOp; 5] = [ScalarOp::Neg, ScalarOp::Add, ScalarOp::Sub, ScalarOp::Mul, ScalarOp::Div];

/// Position of `x` in the ordering of all binary64 values, with both zeros
/// at 0.
pub fn ord(x: f64) -> i64 {
    let b = x.to_bits() as i64;
    if b < 0 {
        -(b & i64::MAX)
    } else {
        b
    }
}

pub fn unord(i: i64) -> f64 {
    if i < 0 {
        f64::from_bits((-i) as u64 | (1 << 63))
    } else {
        f64::from_bits(i as u64)
    }
}

fn nudge(x: f64, ulps: i64) -> f64 {
    let y = unord(ord(x) + ulps);
    if y.is_nan() {
        x
    } else {
        y
    }
}

/// A binary64 value, biased toward integers, values near 1, multiples of
/// pi/2, and extreme magnitudes.
pub fn value(rng: &mut impl Rng, allow_inf: bool) -> f64 {
    loop {
        let x = match rng.gen_range(0..11) {
            0 => rng.gen_range(-8i32..=8) as f64,
            1 | 2 => rng.gen_range(-10.0..10.0),
            3 => f64::from_bits(rng.gen()),
            4 => {
                let k = rng.gen_range(-40i32..=40) as f64;
                nudge(k * std::f64::consts::FRAC_PI_2, rng.gen_range(-2..=2))
            }
            5 => 1.0 + rng.gen_range(-1.0..1.0) * 2f64.powi(-rng.gen_range(1..53)),
            6 => {
                let m: f64 = rng.gen_range(0.5..1.0);
                let s = if rng.gen() { 1.0 } else { -1.0 };
                s * m * 2f64.powi(rng.gen_range(-1074..1024))
            }
            7 => rng.gen_range(-1.0..1.0),
            8 => rng.gen_range(-1e6f64..1e6).round(),
            9 => rng.gen_range(-800.0..800.0),
            _ if allow_inf => {
                if rng.gen() {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                }
            }
            _ => continue,
        };
        if x.is_nan() {
            continue;
        }
        return if x == 0.0 { 0.0 } else { x };
    }
}

/// Bounds of a random non-empty interval.
pub fn interval(rng: &mut impl Rng, allow_inf: bool) -> (f64, f64) {
    let a = value(rng, allow_inf);
    match rng.gen_range(0..10) {
        0 | 1 => (a, a),
        2 | 3 => {
            let b = nudge(a, rng.gen_range(1..64));
            (a.min(b), a.max(b))
        }
        _ => {
            let b = value(rng, allow_inf);
            (a.min(b), a.max(b))
        }
    }
}

/// A point of `[lo, hi]`, sometimes an endpoint.
pub fn point_in(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let x = match rng.gen_range(0..10) {
        0 | 1 => lo,
        2 | 3 => hi,
        4..=6 => unord(rng.gen_range(ord(lo)..=ord(hi))),
        _ => {
            let t: f64 = rng.gen();
            let x = lo + t * (hi - lo);
            if x.is_finite() {
                x.clamp(lo, hi)
            } else {
                unord(rng.gen_range(ord(lo)..=ord(hi)))
            }
        }
    };
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn leaf(rng: &mut impl Rng, constants: bool) -> Expr {
    match rng.gen_range(0..10) {
        0..=5 => Expr::var(VARS[rng.gen_range(0..VARS.len())]),
        6 | 7 => Expr::num(rng.gen_range(-3..=3)),
        8 => {
            let (n, d) = [(1, 10), (1, 3), (5, 2), (-7, 1000), (355, 113)][rng.gen_range(0..5)];
            Expr::Num(Rational::from((n, d)))
        }
        _ if constants => Expr::Const(if rng.gen() { NamedConstant::Pi } else { NamedConstant::E }),
        _ => Expr::num(2),
    }
}

/// A real expression over [`VARS`] of depth at most `depth` using every
/// supported operator.
pub fn expr(rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return leaf(rng, true);
    }
    let op = ScalarOp::ALL[rng.gen_range(0..ScalarOp::ALL.len())];
    Expr::apply(op, (0..op.arity()).map(|_| expr(rng, depth - 1)).collect())
}

/// Like [`expr`] but with only negation and the four field operations and
/// rational leaves.
pub fn field_expr(rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return leaf(rng, false);
    }
    let op = FIELD_OPS[rng.gen_range(0..FIELD_OPS.len())];
    Expr::apply(op, (0..op.arity()).map(|_| field_expr(rng, depth - 1)).collect())
}

fn bound(rng: &mut impl Rng) -> Expr {
    match rng.gen_range(0..4) {
        0 => Expr::num(rng.gen_range(-100..=100)),
        1 => Expr::Num(Rational::from((rng.gen_range(-1000..=1000), rng.gen_range(1..=64)))),
        2 => Expr::Num(Rational::from(rng.gen_range(-1e12f64..1e12).round() as i64)),
        _ => Expr::Num(Rational::from((1, 1u64 << rng.gen_range(1..60)))),
    }
}

fn atom(rng: &mut impl Rng) -> Expr {
    let ops = [CompareOp::Lt, CompareOp::Le, CompareOp::Gt, CompareOp::Ge];
    let op = ops[rng.gen_range(0..ops.len())];
    let v = Expr::var(VARS[rng.gen_range(0..VARS.len())]);
    match rng.gen_range(0..5) {
        0..=2 => {
            if rng.gen() {
                Expr::cmp(op, v, bound(rng))
            } else {
                Expr::cmp(op, bound(rng), v)
            }
        }
        3 => Expr::cmp(op, expr(rng, 2), bound(rng)),
        _ => Expr::cmp(op, Expr::apply(ScalarOp::Mul, vec![Expr::var("x"), Expr::var("y")]), bound(rng)),
    }
}

/// A random precondition over [`VARS`]: a nest of `and`, `or` and `not`
/// over comparisons.
pub fn precondition(rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.3) {
        return atom(rng);
    }
    match rng.gen_range(0..5) {
        0 | 1 => Expr::And(vec![precondition(rng, depth - 1), precondition(rng, depth - 1)]),
        2 | 3 => Expr::Or(vec![precondition(rng, depth - 1), precondition(rng, depth - 1)]),
        _ => Expr::not(precondition(rng, depth - 1)),
    }
}
