//! Expression trees and programs.

use std::collections::BTreeSet;
use std::fmt;

use rug::Rational;
use thiserror::Error;

use crate::backend::ScalarOp;
use crate::interval::NamedConstant;
use crate::ops::CompareOp;
use crate::target::TargetFormat;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    /// An exact rational literal.
    Num(Rational),
    Const(NamedConstant),
    Bool(bool),
    Var(String),
    Apply(ScalarOp, Vec<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    /// `let` (parallel) or `let*` (sequential) bindings.
    Let { bindings: Vec<(String, Expr)>, body: Box<Expr>, sequential: bool },
    Compare(CompareOp, Box<Expr>, Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
    /// Whether evaluating the subexpression raises a domain error.
    ErrOf(Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    Real,
    Bool,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Real => "real",
            Kind::Bool => "boolean",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable '{0}'")]
    Unbound(String),
    #[error("expected a {expected} expression, found a {found} one: {expr}")]
    Mismatch { expected: Kind, found: Kind, expr: String },
    #[error("{op} expects {expected} arguments, got {got}")]
    Arity { op: String, expected: usize, got: usize },
}

impl Expr {
    pub fn num(n: i64) -> Expr {
        Expr::Num(Rational::from(n))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn apply(op: ScalarOp, args: Vec<Expr>) -> Expr {
        Expr::Apply(op, args)
    }

    pub fn cmp(op: CompareOp, a: Expr, b: Expr) -> Expr {
        Expr::Compare(op, Box::new(a), Box::new(b))
    }

    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn err_of(e: Expr) -> Expr {
        Expr::ErrOf(Box::new(e))
    }

    /// Infer the kind of the expression, given kinds of free variables.
    pub fn kind(&self, scope: &mut Vec<(String, Kind)>) -> Result<Kind, TypeError> {
        let expect = |e: &Expr, k: Kind, scope: &mut Vec<(String, Kind)>| -> Result<(), TypeError> {
            let found = e.kind(scope)?;
            if found != k {
                return Err(TypeError::Mismatch { expected: k, found, expr: e.to_string() });
            }
            Ok(())
        };
        match self {
            Expr::Num(_) | Expr::Const(_) => Ok(Kind::Real),
            Expr::Bool(_) => Ok(Kind::Bool),
            Expr::Var(v) => scope
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, k)| *k)
                .ok_or_else(|| TypeError::Unbound(v.clone())),
            Expr::Apply(op, args) => {
                if args.len() != op.arity() {
                    return Err(TypeError::Arity { op: op.name().into(), expected: op.arity(), got: args.len() });
                }
                for a in args {
                    expect(a, Kind::Real, scope)?;
                }
                Ok(Kind::Real)
            }
            Expr::If(c, t, e) => {
                expect(c, Kind::Bool, scope)?;
                let k = t.kind(scope)?;
                expect(e, k, scope)?;
                Ok(k)
            }
            Expr::Let { bindings, body, sequential } => {
                let depth = scope.len();
                let mut kinds = Vec::with_capacity(bindings.len());
                for (name, e) in bindings {
                    let k = e.kind(scope)?;
                    if *sequential {
                        scope.push((name.clone(), k));
                    } else {
                        kinds.push((name.clone(), k));
                    }
                }
                scope.extend(kinds);
                let k = body.kind(scope);
                scope.truncate(depth);
                k
            }
            Expr::Compare(_, a, b) => {
                expect(a, Kind::Real, scope)?;
                expect(b, Kind::Real, scope)?;
                Ok(Kind::Bool)
            }
            Expr::And(xs) | Expr::Or(xs) => {
                for x in xs {
                    expect(x, Kind::Bool, scope)?;
                }
                Ok(Kind::Bool)
            }
            Expr::Not(x) => {
                expect(x, Kind::Bool, scope)?;
                Ok(Kind::Bool)
            }
            Expr::ErrOf(x) => {
                x.kind(scope)?;
                Ok(Kind::Bool)
            }
        }
    }

    /// Free variables, in sorted order.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::Bool(_) => {}
            Expr::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Expr::Apply(_, xs) | Expr::And(xs) | Expr::Or(xs) => xs.iter().for_each(|x| x.collect_free(bound, out)),
            Expr::If(c, t, e) => {
                c.collect_free(bound, out);
                t.collect_free(bound, out);
                e.collect_free(bound, out);
            }
            Expr::Let { bindings, body, sequential } => {
                let depth = bound.len();
                for (name, e) in bindings {
                    e.collect_free(bound, out);
                    if *sequential {
                        bound.push(name.clone());
                    }
                }
                if !sequential {
                    bound.extend(bindings.iter().map(|(n, _)| n.clone()));
                }
                body.collect_free(bound, out);
                bound.truncate(depth);
            }
            Expr::Compare(_, a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Expr::Not(x) | Expr::ErrOf(x) => x.collect_free(bound, out),
        }
    }
}

/// A benchmark: variables, optional precondition, and body.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub name: Option<String>,
    pub vars: Vec<String>,
    pub pre: Option<Expr>,
    pub body: Expr,
    pub target: TargetFormat,
}

impl Program {
    pub fn new(vars: &[&str], body: Expr) -> Program {
        Program {
            name: None,
            vars: vars.iter().map(|v| v.to_string()).collect(),
            pre: None,
            body,
            target: TargetFormat::Binary64,
        }
    }

    pub fn with_pre(mut self, pre: Expr) -> Program {
        self.pre = Some(pre);
        self
    }

    pub fn with_target(mut self, target: TargetFormat) -> Program {
        self.target = target;
        self
    }

    /// Check that the body is real-valued, the precondition boolean, and
    /// that both only mention declared variables.
    pub fn check(&self) -> Result<(), TypeError> {
        let mut scope: Vec<(String, Kind)> = self.vars.iter().map(|v| (v.clone(), Kind::Real)).collect();
        let k = self.body.kind(&mut scope)?;
        if k != Kind::Real {
            return Err(TypeError::Mismatch { expected: Kind::Real, found: k, expr: self.body.to_string() });
        }
        if let Some(pre) = &self.pre {
            let k = pre.kind(&mut scope)?;
            if k != Kind::Bool {
                return Err(TypeError::Mismatch { expected: Kind::Bool, found: k, expr: pre.to_string() });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::fpcore::print_expr(self))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::fpcore::print_program(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds() {
        let e = Expr::cmp(CompareOp::Lt, Expr::var("x"), Expr::num(1));
        let mut scope = vec![("x".to_string(), Kind::Real)];
        assert_eq!(e.kind(&mut scope), Ok(Kind::Bool));
        let bad = Expr::apply(ScalarOp::Sqrt, vec![e]);
        assert!(matches!(bad.kind(&mut scope), Err(TypeError::Mismatch { .. })));
        assert_eq!(Expr::var("y").kind(&mut scope), Err(TypeError::Unbound("y".into())));
    }

    #[test]
    fn let_scoping() {
        // (let ((x 1) (y x)) y): parallel let sees the outer x.
        let e = Expr::Let {
            bindings: vec![("x".into(), Expr::num(1)), ("y".into(), Expr::var("x"))],
            body: Box::new(Expr::var("y")),
            sequential: false,
        };
        assert_eq!(e.free_vars().into_iter().collect::<Vec<_>>(), vec!["x".to_string()]);
        let seq = Expr::Let {
            bindings: vec![("x".into(), Expr::num(1)), ("y".into(), Expr::var("x"))],
            body: Box::new(Expr::var("y")),
            sequential: true,
        };
        assert!(seq.free_vars().is_empty());
    }

    #[test]
    fn program_check() {
        let p = Program::new(&["x"], Expr::apply(ScalarOp::Sqrt, vec![Expr::var("x")]));
        assert!(p.check().is_ok());
        let p = Program::new(&["x"], Expr::var("z"));
        assert!(p.check().is_err());
        let p = Program::new(&["x"], Expr::var("x")).with_pre(Expr::num(1));
        assert!(p.check().is_err());
    }
}
