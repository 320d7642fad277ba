//! Interval evaluation of expressions and the recomputation loop that turns
//! a program and a point into a ground truth.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use rug::Rational;
#[cfg(test)]
use rug::Float;
use thiserror::Error;

use crate::backend::{Backend, RoundDir, DEFAULT_MAX_PRECISION};
use crate::expr::{Expr, Program};
use crate::interval::{make_constant, BoolInterval, Endpoint, ErrorInterval, Interval, Value};
use crate::ops::{compare, if_merge, CompareOp, Ctx};
use crate::target::TargetFormat;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable '{0}'")]
    Unbound(String),
    #[error("type mismatch in {0}")]
    Type(String),
}

/// Variable bindings, innermost last.
pub type Env = Vec<(String, Value)>;

fn real(v: Value, e: &Expr) -> Result<Interval, EvalError> {
    match v {
        Value::Real(iv) => Ok(iv),
        Value::Bool(..) => Err(EvalError::Type(e.to_string())),
    }
}

fn boolean(v: Value, e: &Expr) -> Result<(BoolInterval, ErrorInterval), EvalError> {
    match v {
        Value::Bool(b, err) => Ok((b, err)),
        Value::Real(_) => Err(EvalError::Type(e.to_string())),
    }
}

/// An exact rational as `[R_down(q), R_up(q)]`, immovable when representable.
pub fn literal(q: &Rational, ctx: &Ctx<'_>) -> Interval {
    let lo = ctx.backend.round_rational(q, ctx.prec, RoundDir::Down);
    let hi = ctx.backend.round_rational(q, ctx.prec, RoundDir::Up);
    let fixed = lo.exact && hi.exact;
    Interval::new(Endpoint::new(lo.value, fixed), Endpoint::new(hi.value, fixed), ErrorInterval::NONE)
}

/// The hull of two boolean intervals; an end stays fixed only if fixed in
/// both and the condition choosing between them is stuck.
fn bool_hull(a: BoolInterval, b: BoolInterval, cond_stuck: bool) -> BoolInterval {
    BoolInterval {
        must: a.must && b.must,
        may: a.may || b.may,
        must_fixed: cond_stuck && a.must_fixed && b.must_fixed,
        may_fixed: cond_stuck && a.may_fixed && b.may_fixed,
    }
}

/// Evaluate `e` at the context's precision.
pub fn eval(e: &Expr, env: &mut Env, ctx: &Ctx<'_>) -> Result<Value, EvalError> {
    Ok(match e {
        Expr::Num(q) => Value::Real(literal(q, ctx)),
        Expr::Const(c) => Value::Real(make_constant(*c, ctx.prec, ctx.backend)),
        Expr::Bool(b) => Value::Bool(BoolInterval::constant(*b), ErrorInterval::NONE),
        Expr::Var(v) => env
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, val)| val.clone())
            .ok_or_else(|| EvalError::Unbound(v.clone()))?,
        Expr::Apply(op, args) => {
            let xs = args
                .iter()
                .map(|a| real(eval(a, env, ctx)?, a))
                .collect::<Result<Vec<_>, _>>()?;
            Value::Real(ctx.apply(*op, &xs))
        }
        Expr::If(c, t, f) => {
            let (cond, cerr) = boolean(eval(c, env, ctx)?, c)?;
            let tv = eval(t, env, ctx)?;
            let fv = eval(f, env, ctx)?;
            match (tv, fv) {
                (Value::Real(a), Value::Real(b)) => Value::Real(if_merge(cond, cerr, &a, &b)),
                (Value::Bool(a, ae), Value::Bool(b, be)) => {
                    let (v, err) = if cond.is_true() {
                        (a, ae)
                    } else if cond.is_false() {
                        (b, be)
                    } else {
                        (bool_hull(a, b, cond.is_stuck()), ae.either(be))
                    };
                    Value::Bool(v, err.join(cerr))
                }
                _ => return Err(EvalError::Type(e.to_string())),
            }
        }
        Expr::Let { bindings, body, sequential } => {
            let depth = env.len();
            let mut values = Vec::with_capacity(bindings.len());
            for (name, b) in bindings {
                let v = eval(b, env, ctx);
                let v = match v {
                    Ok(v) => v,
                    Err(err) => {
                        env.truncate(depth);
                        return Err(err);
                    }
                };
                if *sequential {
                    env.push((name.clone(), v));
                } else {
                    values.push((name.clone(), v));
                }
            }
            env.extend(values);
            let out = eval(body, env, ctx);
            env.truncate(depth);
            out?
        }
        Expr::Compare(op, a, b) => {
            let x = real(eval(a, env, ctx)?, a)?;
            let y = real(eval(b, env, ctx)?, b)?;
            let (v, err) = compare(*op, &x, &y);
            Value::Bool(v, err)
        }
        Expr::And(xs) | Expr::Or(xs) => {
            let is_and = matches!(e, Expr::And(_));
            let mut acc = BoolInterval::constant(is_and);
            let mut err = ErrorInterval::NONE;
            for x in xs {
                let (v, ve) = boolean(eval(x, env, ctx)?, x)?;
                acc = if is_and { acc.and(v) } else { acc.or(v) };
                err = err.join(ve);
            }
            Value::Bool(acc, err)
        }
        Expr::Not(x) => {
            let (v, err) = boolean(eval(x, env, ctx)?, x)?;
            Value::Bool(v.not(), err)
        }
        Expr::ErrOf(x) => {
            let err = eval(x, env, ctx)?.err();
            Value::Bool(err.as_bool(), ErrorInterval::NONE)
        }
    })
}

fn bound_literal(x: f64) -> Expr {
    Expr::Num(Rational::from_f64(x).expect("finite bound"))
}

/// `K- <= x <= K+` as an expression, with `K±` the target's extreme finite
/// values.
fn in_range(target: TargetFormat, x: Expr) -> Vec<Expr> {
    vec![
        Expr::cmp(CompareOp::Le, bound_literal(target.k_minus()), x.clone()),
        Expr::cmp(CompareOp::Le, x, bound_literal(target.k_plus())),
    ]
}

/// The boolean condition under which a point is a valid input: every input
/// and the output are finite in the target format, the body raises no
/// domain error, and the precondition holds without error.
pub fn validity_expr(p: &Program) -> Expr {
    let out = Expr::var("#out");
    let pre = Expr::var("#pre");
    let mut conj = Vec::new();
    for v in &p.vars {
        conj.extend(in_range(p.target, Expr::var(v)));
    }
    conj.push(pre.clone());
    conj.push(Expr::not(Expr::err_of(pre)));
    conj.push(Expr::not(Expr::err_of(out.clone())));
    conj.extend(in_range(p.target, out));
    Expr::Let {
        bindings: vec![
            ("#out".into(), p.body.clone()),
            ("#pre".into(), p.pre.clone().unwrap_or(Expr::Bool(true))),
        ],
        body: Box::new(Expr::And(conj)),
        sequential: false,
    }
}

/// Why a point is not a valid input, in reporting priority order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InvalidReason {
    NonFiniteInput,
    Precondition,
    DomainError,
    NonFiniteOutput,
}

impl InvalidReason {
    pub fn as_str(self) -> &'static str {
        match self {
            InvalidReason::NonFiniteInput => "non-finite-input",
            InvalidReason::Precondition => "precondition-false",
            InvalidReason::DomainError => "domain-error",
            InvalidReason::NonFiniteOutput => "non-finite-output",
        }
    }
}

impl fmt::Display for InvalidReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The validity condition split into its conjuncts, with the output.
#[derive(Clone, Debug)]
pub struct Validity {
    pub output: Interval,
    /// `(reason, conjunct)` in priority order.
    pub parts: [(InvalidReason, BoolInterval); 4],
}

impl Validity {
    pub fn all(&self) -> BoolInterval {
        self.parts.iter().fold(BoolInterval::TRUE, |acc, (_, b)| acc.and(*b))
    }

    /// The first conjunct known to be false.
    pub fn reason(&self) -> Option<InvalidReason> {
        self.parts.iter().find(|(_, b)| b.is_false()).map(|(r, _)| *r)
    }
}

/// Evaluate the validity condition of `p` with variables bound to `inputs`.
pub fn eval_validity(p: &Program, inputs: &[Interval], ctx: &Ctx<'_>) -> Result<Validity, EvalError> {
    assert_eq!(inputs.len(), p.vars.len(), "one interval per variable");
    let kmin = literal(&Rational::from_f64(p.target.k_minus()).expect("finite"), ctx);
    let kmax = literal(&Rational::from_f64(p.target.k_plus()).expect("finite"), ctx);
    let range = |x: &Interval| {
        let (a, _) = compare(CompareOp::Le, &kmin, x);
        let (b, _) = compare(CompareOp::Le, x, &kmax);
        a.and(b)
    };

    let mut env: Env = p.vars.iter().cloned().zip(inputs.iter().cloned().map(Value::Real)).collect();
    let finite_in = inputs.iter().fold(BoolInterval::TRUE, |acc, x| acc.and(range(x)));
    let pre = match &p.pre {
        Some(pre) => {
            let (v, err) = boolean(eval(pre, &mut env, ctx)?, pre)?;
            v.and(err.as_bool().not())
        }
        None => BoolInterval::TRUE,
    };
    let output = real(eval(&p.body, &mut env, ctx)?, &p.body)?;
    let domain = output.err.as_bool().not();
    let finite_out = if output.err.guaranteed { BoolInterval::FALSE } else { range(&output) };
    Ok(Validity {
        output,
        parts: [
            (InvalidReason::NonFiniteInput, finite_in),
            (InvalidReason::Precondition, pre),
            (InvalidReason::DomainError, domain),
            (InvalidReason::NonFiniteOutput, finite_out),
        ],
    })
}

/// Working precisions tried in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ladder {
    rungs: Vec<u32>,
}

impl Ladder {
    pub const DEFAULT_START: u32 = 80;

    /// `start, start*growth, ...`, capped so the last rung is `max`.
    pub fn new(start: u32, growth: u32, max: u32) -> Ladder {
        assert!(start >= 2 && growth >= 2 && max >= start, "bad ladder {start}*{growth}^k..{max}");
        let mut rungs = Vec::new();
        let mut p = start;
        while p < max {
            rungs.push(p);
            p = p.saturating_mul(growth);
        }
        rungs.push(max);
        Ladder { rungs }
    }

    pub fn with_max(max: u32) -> Ladder {
        Ladder::new(Ladder::DEFAULT_START.min(max), 2, max)
    }

    pub fn rungs(&self) -> &[u32] {
        &self.rungs
    }

    pub fn first(&self) -> u32 {
        self.rungs[0]
    }

    pub fn max(&self) -> u32 {
        *self.rungs.last().expect("non-empty")
    }

    /// The rungs at or above `p`.
    pub fn starting_at(&self, p: u32) -> Ladder {
        let rungs: Vec<u32> = self.rungs.iter().copied().filter(|&r| r >= p).collect();
        assert!(!rungs.is_empty(), "no rung at or above {p}");
        Ladder { rungs }
    }
}

impl Default for Ladder {
    fn default() -> Ladder {
        Ladder::with_max(DEFAULT_MAX_PRECISION)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome {
    Valid { value: f64, bits: u32 },
    Invalid { reason: InvalidReason, bits: u32 },
    Unsamplable { bits: u32 },
    Exhausted,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Valid { .. } => "valid",
            Outcome::Invalid { .. } => "invalid",
            Outcome::Unsamplable { .. } => "unsamplable",
            Outcome::Exhausted => "exhausted",
        }
    }

    pub fn bits(&self) -> Option<u32> {
        match *self {
            Outcome::Valid { bits, .. } | Outcome::Invalid { bits, .. } | Outcome::Unsamplable { bits } => Some(bits),
            Outcome::Exhausted => None,
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, Outcome::Valid { .. })
    }
}

/// What one rung of the ladder saw.
#[derive(Clone, Debug)]
pub struct Rung {
    pub bits: u32,
    pub output: Interval,
    pub validity: BoolInterval,
}

/// Counts of a batch of outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub valid: usize,
    pub invalid: usize,
    pub unsamplable: usize,
    pub exhausted: usize,
    /// Decided outcomes by the rung that decided them.
    pub by_bits: BTreeMap<u32, usize>,
}

impl Summary {
    pub fn add(&mut self, o: &Outcome) {
        match o {
            Outcome::Valid { .. } => self.valid += 1,
            Outcome::Invalid { .. } => self.invalid += 1,
            Outcome::Unsamplable { .. } => self.unsamplable += 1,
            Outcome::Exhausted => self.exhausted += 1,
        }
        if let Some(b) = o.bits() {
            *self.by_bits.entry(b).or_default() += 1;
        }
    }

    pub fn total(&self) -> usize {
        self.valid + self.invalid + self.unsamplable + self.exhausted
    }
}

/// Drives evaluation up the precision ladder.
#[derive(Clone, Debug)]
pub struct Engine {
    pub backend: Backend,
    pub ladder: Ladder,
    /// Treat a single immovable infinite output endpoint as stuck.
    pub strict_finite: bool,
}

impl Default for Engine {
    fn default() -> Engine {
        Engine::new(Backend::default())
    }
}

impl Engine {
    pub fn new(backend: Backend) -> Engine {
        let ladder = Ladder::with_max(backend.max_precision());
        Engine { backend, ladder, strict_finite: false }
    }

    pub fn with_ladder(mut self, ladder: Ladder) -> Engine {
        self.ladder = ladder;
        self
    }

    /// Point inputs as exact intervals.
    pub fn point_env(point: &[f64]) -> Vec<Interval> {
        point
            .iter()
            .map(|&x| Interval::make_point(x).expect("inputs are not NaN"))
            .collect()
    }

    /// Classify one rung's evaluation, or `None` to keep climbing.
    fn decide(&self, target: TargetFormat, v: &Validity, bits: u32) -> Option<Outcome> {
        let all = v.all();
        if all.is_false() {
            let reason = v.reason().expect("a false conjunction has a false conjunct");
            return Some(Outcome::Invalid { reason, bits });
        }
        if v.output.is_stuck(target, self.strict_finite) || all.is_stuck() {
            return Some(Outcome::Unsamplable { bits });
        }
        if all.is_true() && v.output.is_one_value(target) {
            let value = target.round(&v.output.lo.value, RoundDir::Nearest);
            return Some(Outcome::Valid { value, bits });
        }
        None
    }

    /// The correctly rounded value of `p` at `point`, or why there is none.
    ///
    /// Panics if `p` does not type-check or the point has the wrong length.
    pub fn ground_truth(&self, p: &Program, point: &[f64]) -> Outcome {
        self.ground_truth_traced(p, point).0
    }

    pub fn ground_truth_traced(&self, p: &Program, point: &[f64]) -> (Outcome, Vec<Rung>) {
        let inputs = Engine::point_env(point);
        let mut trace = Vec::new();
        for &bits in self.ladder.rungs() {
            let ctx = Ctx::new(&self.backend, bits);
            let v = eval_validity(p, &inputs, &ctx).expect("program must type-check");
            trace.push(Rung { bits, output: v.output.clone(), validity: v.all() });
            if let Some(o) = self.decide(p.target, &v, bits) {
                return (o, trace);
            }
        }
        (Outcome::Exhausted, trace)
    }

    /// Ground truths for many points, in input order.
    pub fn batch_ground_truth(&self, p: &Program, points: &[Vec<f64>]) -> (Vec<Outcome>, Summary) {
        let results: Vec<Outcome> = points.par_iter().map(|pt| self.ground_truth(p, pt)).collect();
        let mut summary = Summary::default();
        results.iter().for_each(|o| summary.add(o));
        (results, summary)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::ScalarOp;

    fn float(prec: u32, x: f64) -> Float {
        Float::with_val(prec, x)
    }

    fn running_example() -> Program {
        let xy = Expr::apply(ScalarOp::Pow, vec![Expr::var("x"), Expr::var("y")]);
        let den = Expr::apply(ScalarOp::Add, vec![xy.clone(), Expr::num(2)]);
        Program::new(&["x", "y"], Expr::apply(ScalarOp::Div, vec![xy, den]))
    }

    #[test]
    fn ladder_rungs() {
        assert_eq!(Ladder::default().rungs(), &[80, 160, 320, 640, 1280, 2560, 5120, 10240]);
        assert_eq!(Ladder::with_max(100).rungs(), &[80, 100]);
        assert_eq!(Ladder::default().starting_at(1000).rungs(), &[1280, 2560, 5120, 10240]);
    }

    #[test]
    fn literals() {
        let b = Backend::default();
        let ctx = Ctx::new(&b, 80);
        let half = literal(&Rational::from((1, 2)), &ctx);
        assert!(half.lo.immovable && half.hi.immovable && half.lo.value == 0.5);
        let tenth = literal(&Rational::from((1, 10)), &ctx);
        assert!(!tenth.lo.immovable && tenth.lo.value < tenth.hi.value);
    }

    #[test]
    fn err_of_clipped_sqrt() {
        let b = Backend::default();
        let ctx = Ctx::new(&b, 80);
        let e = Expr::err_of(Expr::apply(ScalarOp::Sqrt, vec![Expr::var("x")]));
        let x = Interval::movable(float(53, -4.0), float(53, 4.0));
        let mut env = vec![("x".to_string(), Value::Real(x))];
        let Value::Bool(v, _) = eval(&e, &mut env, &ctx).unwrap() else { panic!() };
        assert!(v.is_unknown());
    }

    #[test]
    fn let_shares_bindings() {
        let b = Backend::default();
        let ctx = Ctx::new(&b, 80);
        let e = Expr::Let {
            bindings: vec![("t".into(), Expr::apply(ScalarOp::Exp, vec![Expr::var("x")]))],
            body: Box::new(Expr::apply(ScalarOp::Sub, vec![Expr::var("t"), Expr::var("t")])),
            sequential: false,
        };
        let x = Interval::movable(float(53, 0.0), float(53, 1.0));
        let mut env = vec![("x".to_string(), Value::Real(x))];
        let Value::Real(r) = eval(&e, &mut env, &ctx).unwrap() else { panic!() };
        assert!(r.contains(&float(53, 0.0)));
        assert_eq!(env.len(), 1);
    }

    #[test]
    fn validity_expression_agrees_with_parts() {
        let b = Backend::default();
        let ctx = Ctx::new(&b, 80);
        let p = running_example();
        let inputs = Engine::point_env(&[3.0, 1.1]);
        let parts = eval_validity(&p, &inputs, &ctx).unwrap();
        let mut env: Env = vec![
            ("x".into(), Value::Real(inputs[0].clone())),
            ("y".into(), Value::Real(inputs[1].clone())),
        ];
        let Value::Bool(v, _) = eval(&validity_expr(&p), &mut env, &ctx).unwrap() else { panic!() };
        assert!(v.is_true() && parts.all().is_true());
    }

    #[test]
    fn outcomes() {
        let e = Engine::default();
        let p = running_example();
        let o = e.ground_truth(&p, &[3.0, 1.1]);
        let Outcome::Valid { value, bits } = o else { panic!("{o:?}") };
        assert_eq!(bits, 80);
        assert!((value - 0.626054).abs() < 1e-6);
        assert_eq!(e.ground_truth(&p, &[1e10, 1e10]), Outcome::Unsamplable { bits: 80 });

        let asin = Program::new(
            &["x"],
            Expr::apply(ScalarOp::Asin, vec![Expr::apply(ScalarOp::Add, vec![Expr::var("x"), Expr::num(2007)])]),
        );
        assert_eq!(e.ground_truth(&asin, &[0.0]), Outcome::Invalid { reason: InvalidReason::DomainError, bits: 80 });

        let pre = Program::new(&["x"], Expr::var("x")).with_pre(Expr::cmp(CompareOp::Lt, Expr::var("x"), Expr::num(0)));
        assert_eq!(e.ground_truth(&pre, &[1.0]), Outcome::Invalid { reason: InvalidReason::Precondition, bits: 80 });
        assert_eq!(
            e.ground_truth(&pre, &[f64::NEG_INFINITY]),
            Outcome::Invalid { reason: InvalidReason::NonFiniteInput, bits: 80 }
        );
        let exp = Program::new(&["x"], Expr::apply(ScalarOp::Exp, vec![Expr::var("x")]));
        assert_eq!(
            e.ground_truth(&exp, &[1000.0]),
            Outcome::Invalid { reason: InvalidReason::NonFiniteOutput, bits: 80 }
        );
    }

    #[test]
    fn sin_of_huge_argument_needs_1280_bits() {
        let p = Program::new(&["x"], Expr::apply(ScalarOp::Sin, vec![Expr::var("x")]));
        let o = Engine::default().ground_truth(&p, &[1e300]);
        assert!(matches!(o, Outcome::Valid { bits: 1280, .. }), "{o:?}");
    }

    #[test]
    fn batch_counts_partition() {
        let e = Engine::default();
        let p = running_example();
        let (r, s) = e.batch_ground_truth(&p, &[]);
        assert!(r.is_empty() && s.total() == 0);
        let pts = vec![vec![3.0, 1.1], vec![1e10, 1e10], vec![2.0, 2.0]];
        let (r, s) = e.batch_ground_truth(&p, &pts);
        assert_eq!(r.len(), 3);
        assert_eq!((s.valid, s.unsamplable, s.total()), (2, 1, 3));
        assert_eq!(s.by_bits.get(&80), Some(&3));
    }
}
