//! Reference evaluation of real expressions at a point.
//!
//! Field-only expressions over finite inputs are evaluated exactly with
//! rationals. Everything else is evaluated with round-to-nearest MPFR calls
//! at two high precisions; a result is trusted only when both agree.
//! Domain rules follow the mathematical definitions over the extended
//! reals and are written out here rather than taken from the library.

use rivalkit::{Expr, NamedConstant, ScalarOp};
use rug::float::{Constant, Special};
use rug::ops::Pow;
use rug::{Float, Rational};

/// What the reference says about an expression at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    Exact(Rational),
    /// Accurate to a relative `2^-(2p)` or better.
    Approx(Float),
    Error,
    /// The reference precisions disagreed, or the reference declined.
    Unreliable,
}

fn lookup(env: &[(&str, f64)], v: &str) -> f64 {
    env.iter().find(|(n, _)| *n == v).unwrap_or_else(|| panic!("unbound {v}")).1
}

/// Exact rational value, or `None` if the expression uses anything other
/// than the field operations or an input is infinite. `Some(None)` is a
/// domain error (division by zero).
pub fn exact(e: &Expr, env: &[(&str, f64)]) -> Option<Option<Rational>> {
    match e {
        Expr::Num(q) => Some(Some(q.clone())),
        Expr::Var(v) => Rational::from_f64(lookup(env, v)).map(Some),
        Expr::Apply(op, args) => {
            let mut vals = Vec::with_capacity(args.len());
            for a in args {
                vals.push(exact(a, env)?);
            }
            let vals: Option<Vec<Rational>> = vals.into_iter().collect();
            let Some(v) = vals else {
                // Check the operator is still a field one.
                return matches!(op, ScalarOp::Neg | ScalarOp::Add | ScalarOp::Sub | ScalarOp::Mul | ScalarOp::Div)
                    .then_some(None);
            };
            Some(match op {
                ScalarOp::Neg => Some(-v[0].clone()),
                ScalarOp::Add => Some(Rational::from(&v[0] + &v[1])),
                ScalarOp::Sub => Some(Rational::from(&v[0] - &v[1])),
                ScalarOp::Mul => Some(Rational::from(&v[0] * &v[1])),
                ScalarOp::Div if v[1] == 0 => None,
                ScalarOp::Div => Some(Rational::from(&v[0] / &v[1])),
                _ => return None,
            })
        }
        _ => None,
    }
}

fn is_int(x: &Float) -> bool {
    x.is_finite() && x.is_integer()
}

/// The mathematical domain of each operator at a point.
pub fn defined(op: ScalarOp, a: &[Float]) -> bool {
    use ScalarOp::*;
    if a.iter().any(Float::is_nan) {
        return false;
    }
    let x = &a[0];
    match op {
        Neg | Cbrt | Exp | Exp2 | Atan | Fabs | Trunc | Floor | Ceil => true,
        Add => !(x.is_infinite() && a[1].is_infinite() && x.is_sign_positive() != a[1].is_sign_positive()),
        Sub => !(x.is_infinite() && a[1].is_infinite() && x.is_sign_positive() == a[1].is_sign_positive()),
        Mul => !((x.is_zero() && a[1].is_infinite()) || (x.is_infinite() && a[1].is_zero())),
        Div => !a[1].is_zero() && !(x.is_infinite() && a[1].is_infinite()),
        Sqrt => *x >= 0,
        Log | Log2 => *x > 0,
        Sin | Cos | Tan => x.is_finite(),
        Asin | Acos => *x >= -1 && *x <= 1,
        Atan2 => !(x.is_zero() && a[1].is_zero()),
        Fmod => x.is_finite() && !a[1].is_zero(),
        Pow => {
            let y = &a[1];
            if *x > 0 {
                true
            } else if x.is_zero() {
                *y > 0
            } else {
                is_int(y)
            }
        }
    }
}

/// `op` at a point, rounded to nearest at `prec` bits; `Err` on a domain
/// error.
pub fn apply(op: ScalarOp, a: &[Float], prec: u32) -> Result<Float, ()> {
    use ScalarOp::*;
    if !defined(op, a) {
        return Err(());
    }
    let x = &a[0];
    let r = match op {
        Neg => Float::with_val(prec, -x),
        Add => Float::with_val(prec, x + &a[1]),
        Sub => Float::with_val(prec, x - &a[1]),
        Mul => Float::with_val(prec, x * &a[1]),
        Div => Float::with_val(prec, x / &a[1]),
        Sqrt => Float::with_val(prec, x.sqrt_ref()),
        Cbrt => Float::with_val(prec, x.cbrt_ref()),
        Exp => Float::with_val(prec, x.exp_ref()),
        Exp2 => Float::with_val(prec, x.exp2_ref()),
        Log => Float::with_val(prec, x.ln_ref()),
        Log2 => Float::with_val(prec, x.log2_ref()),
        Pow => Float::with_val(prec, x.pow(&a[1])),
        Sin => Float::with_val(prec, x.sin_ref()),
        Cos => Float::with_val(prec, x.cos_ref()),
        Tan => Float::with_val(prec, x.tan_ref()),
        Asin => Float::with_val(prec, x.asin_ref()),
        Acos => Float::with_val(prec, x.acos_ref()),
        Atan => Float::with_val(prec, x.atan_ref()),
        Atan2 => Float::with_val(prec, x.atan2_ref(&a[1])),
        Fabs => Float::with_val(prec, x.abs_ref()),
        Fmod => Float::with_val(prec, x % &a[1]),
        Trunc => Float::with_val(prec, x.trunc_ref()),
        Floor => Float::with_val(prec, x.floor_ref()),
        Ceil => Float::with_val(prec, x.ceil_ref()),
    };
    if r.is_nan() {
        return Err(());
    }
    // The library has no signed zero.
    Ok(if r.is_zero() { Float::with_val(prec, 0) } else { r })
}

/// Round-to-nearest evaluation at `prec` bits. `None` for node kinds the
/// reference does not model, or when a step is too costly.
pub fn approx(e: &Expr, env: &[(&str, f64)], prec: u32) -> Option<Result<Float, ()>> {
    Some(match e {
        Expr::Num(q) => Ok(Float::with_val(prec, q)),
        Expr::Var(v) => Ok(Float::with_val(prec, lookup(env, v))),
        Expr::Const(NamedConstant::Pi) => Ok(Float::with_val(prec, Constant::Pi)),
        Expr::Const(NamedConstant::E) => Ok(Float::with_val(prec, 1).exp()),
        Expr::Const(NamedConstant::Infinity) => Ok(Float::with_val(prec, Special::Infinity)),
        Expr::Apply(op, args) => {
            let mut vals = Vec::with_capacity(args.len());
            let mut failed = false;
            for a in args {
                match approx(a, env, prec)? {
                    Ok(v) => vals.push(v),
                    Err(()) => failed = true,
                }
            }
            if failed {
                Err(())
            } else if too_costly(*op, &vals) {
                return None;
            } else {
                apply(*op, &vals, prec)
            }
        }
        _ => return None,
    })
}

/// Argument reduction for trig and fmod costs time linear in the exponent
/// gap; past these limits the reference declines.
fn too_costly(op: ScalarOp, a: &[Float]) -> bool {
    let exp = |x: &Float| x.get_exp().unwrap_or(0);
    match op {
        ScalarOp::Sin | ScalarOp::Cos | ScalarOp::Tan => exp(&a[0]) > 1 << 14,
        ScalarOp::Fmod => exp(&a[0]) - exp(&a[1]) > 1 << 16,
        _ => false,
    }
}

fn agree(a: &Float, b: &Float, p: u32) -> bool {
    if a.is_infinite() || b.is_infinite() || a.is_zero() || b.is_zero() {
        return a == b;
    }
    let diff = Float::with_val(b.prec(), a - b).abs();
    let tol = Float::with_val(64, b.abs_ref()) >> (2 * p);
    diff <= tol
}

/// Reference value of `e` at `env` for checking results computed at
/// working precision `p`.
pub fn reference(e: &Expr, env: &[(&str, f64)], p: u32) -> Reference {
    if let Some(q) = exact(e, env) {
        return match q {
            Some(q) => Reference::Exact(q),
            None => Reference::Error,
        };
    }
    let (Some(a), Some(b)) = (approx(e, env, 4 * p), approx(e, env, 8 * p)) else {
        return Reference::Unreliable;
    };
    match (a, b) {
        (Err(()), Err(())) => Reference::Error,
        (Ok(a), Ok(b)) if agree(&a, &b, p) => Reference::Approx(b),
        _ => Reference::Unreliable,
    }
}
