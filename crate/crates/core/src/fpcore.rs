//! Reading and printing the FPCore subset.
//!
//! ```text
//! (FPCore (x y) :name "example" :pre (< 0 x) (/ (pow x y) (+ (pow x y) 2)))
//! ```

use std::fmt::Write as _;

use rug::ops::Pow;
use rug::{Integer, Rational};
use thiserror::Error;

use crate::backend::ScalarOp;
use crate::expr::{Expr, Program};
use crate::interval::NamedConstant;
use crate::ops::CompareOp;
use crate::target::TargetFormat;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Clone, Debug)]
enum Sexp {
    Atom(String, Pos),
    Str(String, Pos),
    List(Vec<Sexp>, Pos),
}

#[derive(Clone, Copy, Debug)]
struct Pos {
    line: usize,
    col: usize,
}

impl Sexp {
    fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::Str(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

fn error<T>(pos: Pos, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line: pos.line, col: pos.col, msg: msg.into() })
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Sexp>, ParseError> {
        self.skip_blank();
        let pos = self.pos();
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        match c {
            '(' | '[' => {
                self.bump();
                let close = if c == '(' { ')' } else { ']' };
                let mut items = Vec::new();
                loop {
                    self.skip_blank();
                    match self.chars.peek() {
                        None => return error(pos, "unclosed parenthesis"),
                        Some(&d) if d == close => {
                            self.bump();
                            return Ok(Some(Sexp::List(items, pos)));
                        }
                        Some(')') | Some(']') => return error(self.pos(), "mismatched closing bracket"),
                        _ => items.push(self.read()?.expect("input is not empty")),
                    }
                }
            }
            ')' | ']' => error(pos, "unexpected closing parenthesis"),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => return error(pos, "unterminated string"),
                        Some('"') => return Ok(Some(Sexp::Str(s, pos))),
                        Some('\\') => match self.bump() {
                            Some(e) => s.push(e),
                            None => return error(pos, "unterminated string"),
                        },
                        Some(ch) => s.push(ch),
                    }
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&d) = self.chars.peek() {
                    if d.is_whitespace() || "()[]\";".contains(d) {
                        break;
                    }
                    s.push(d);
                    self.bump();
                }
                Ok(Some(Sexp::Atom(s, pos)))
            }
        }
    }
}

fn read_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut r = Reader { chars: text.chars().peekable(), line: 1, col: 1 };
    let mut out = Vec::new();
    while let Some(s) = r.read()? {
        out.push(s);
    }
    Ok(out)
}

/// Parse an exact numeric literal: decimal with optional exponent,
/// `p/q` rational, or C99 hexadecimal float.
pub fn parse_number(s: &str) -> Option<Rational> {
    let (neg, body) = match s.as_bytes().first()? {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let mag = if let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        parse_hex(hex)?
    } else if let Some((p, q)) = body.split_once('/') {
        if !is_digits(p) || !is_digits(q) {
            return None;
        }
        let q: Integer = q.parse().ok()?;
        if q == 0 {
            return None;
        }
        Rational::from((p.parse::<Integer>().ok()?, q))
    } else {
        parse_decimal(body)?
    };
    Some(if neg { -mag } else { mag })
}

fn is_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !(int.is_empty() || is_digits(int)) || !(frac.is_empty() || is_digits(frac)) {
        return None;
    }
    let digits: Integer = format!("{int}{frac}").parse().ok()?;
    let scale = exp.checked_sub(i32::try_from(frac.len()).ok()?)?;
    let ten = Integer::from(10).pow(scale.unsigned_abs());
    Some(if scale >= 0 { Rational::from(digits * ten) } else { Rational::from((digits, ten)) })
}

fn parse_hex(s: &str) -> Option<Rational> {
    let (mant, exp) = match s.find(['p', 'P']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let ok = |t: &str| t.bytes().all(|b| b.is_ascii_hexdigit());
    if !ok(int) || !ok(frac) {
        return None;
    }
    let digits = Integer::from_str_radix(&format!("{int}{frac}"), 16).ok()?;
    let scale = exp.checked_sub(i32::try_from(frac.len() * 4).ok()?)?;
    let two = Integer::from(1) << scale.unsigned_abs();
    Some(if scale >= 0 { Rational::from(digits * two) } else { Rational::from((digits, two)) })
}

fn atom<'s>(s: &'s Sexp, what: &str) -> Result<&'s str, ParseError> {
    match s {
        Sexp::Atom(a, _) => Ok(a),
        _ => error(s.pos(), format!("expected {what}")),
    }
}

fn is_symbol(s: &str) -> bool {
    let first = s.chars().next();
    matches!(first, Some(c) if !c.is_ascii_digit() && c != '#' && c != ':')
        && parse_number(s).is_none()
}

fn parse_expr(s: &Sexp) -> Result<Expr, ParseError> {
    match s {
        Sexp::Str(_, p) => error(*p, "unexpected string"),
        Sexp::Atom(a, p) => {
            if let Some(q) = parse_number(a) {
                return Ok(Expr::Num(q));
            }
            if let Some(c) = NamedConstant::from_name(a) {
                return Ok(Expr::Const(c));
            }
            match a.as_str() {
                "TRUE" => Ok(Expr::Bool(true)),
                "FALSE" => Ok(Expr::Bool(false)),
                _ if is_symbol(a) => Ok(Expr::Var(a.clone())),
                _ => error(*p, format!("invalid token '{a}'")),
            }
        }
        Sexp::List(items, p) => {
            let Some((head, rest)) = items.split_first() else {
                return error(*p, "empty expression");
            };
            let op = atom(head, "an operator")?;
            let args = || rest.iter().map(parse_expr).collect::<Result<Vec<_>, _>>();
            match op {
                "if" => {
                    let [c, t, e] = rest else {
                        return error(*p, format!("if expects 3 arguments, got {}", rest.len()));
                    };
                    Ok(Expr::If(Box::new(parse_expr(c)?), Box::new(parse_expr(t)?), Box::new(parse_expr(e)?)))
                }
                "let" | "let*" => {
                    let [Sexp::List(bs, _), body] = rest else {
                        return error(*p, format!("{op} expects a binding list and a body"));
                    };
                    let mut bindings = Vec::with_capacity(bs.len());
                    for b in bs {
                        let Sexp::List(pair, bp) = b else {
                            return error(b.pos(), "expected a (name expr) binding");
                        };
                        let [name, e] = pair.as_slice() else {
                            return error(*bp, "expected a (name expr) binding");
                        };
                        let name = atom(name, "a variable name")?;
                        if !is_symbol(name) {
                            return error(*bp, format!("invalid variable name '{name}'"));
                        }
                        bindings.push((name.to_string(), parse_expr(e)?));
                    }
                    Ok(Expr::Let { bindings, body: Box::new(parse_expr(body)?), sequential: op == "let*" })
                }
                "and" | "or" => {
                    let xs = args()?;
                    Ok(if op == "and" { Expr::And(xs) } else { Expr::Or(xs) })
                }
                "not" => {
                    let [x] = rest else {
                        return error(*p, format!("not expects 1 argument, got {}", rest.len()));
                    };
                    Ok(Expr::not(parse_expr(x)?))
                }
                "-" if rest.len() == 1 => Ok(Expr::Apply(ScalarOp::Neg, args()?)),
                "+" | "*" if rest.len() > 2 => {
                    let bin = ScalarOp::from_name(op).expect("known operator");
                    let mut xs = args()?.into_iter();
                    let first = xs.next().expect("at least three arguments");
                    Ok(xs.fold(first, |acc, x| Expr::Apply(bin, vec![acc, x])))
                }
                _ => {
                    if let Some(cmp) = CompareOp::from_name(op) {
                        return parse_compare(cmp, args()?, *p);
                    }
                    let Some(f) = ScalarOp::from_name(op).filter(|f| *f != ScalarOp::Neg) else {
                        return error(head.pos(), format!("unsupported operator '{op}'"));
                    };
                    if rest.len() != f.arity() {
                        return error(*p, format!("{op} expects {} arguments, got {}", f.arity(), rest.len()));
                    }
                    Ok(Expr::Apply(f, args()?))
                }
            }
        }
    }
}

/// Chained comparisons: `(< a b c)` means `a < b` and `b < c`; `!=` means
/// all pairs differ.
fn parse_compare(op: CompareOp, xs: Vec<Expr>, p: Pos) -> Result<Expr, ParseError> {
    if xs.len() < 2 {
        return error(p, format!("{op} expects at least 2 arguments, got {}", xs.len()));
    }
    if xs.len() == 2 {
        let mut it = xs.into_iter();
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        return Ok(Expr::cmp(op, a, b));
    }
    let mut parts = Vec::new();
    if op == CompareOp::Ne {
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                parts.push(Expr::cmp(op, xs[i].clone(), xs[j].clone()));
            }
        }
    } else {
        for w in xs.windows(2) {
            parts.push(Expr::cmp(op, w[0].clone(), w[1].clone()));
        }
    }
    Ok(Expr::And(parts))
}

/// Parse a single `FPCore` form.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let forms = read_all(text)?;
    match forms.as_slice() {
        [one] => program_from(one),
        [] => error(Pos { line: 1, col: 1 }, "no FPCore form found"),
        [_, second, ..] => error(second.pos(), "expected a single FPCore form"),
    }
}

/// Parse every `FPCore` form in a file.
pub fn parse_programs(text: &str) -> Result<Vec<Program>, ParseError> {
    read_all(text)?.iter().map(program_from).collect()
}

fn program_from(form: &Sexp) -> Result<Program, ParseError> {
    let Sexp::List(items, pos) = form else {
        return error(form.pos(), "expected (FPCore ...)");
    };
    let pos = *pos;
    match items.first() {
        Some(Sexp::Atom(a, _)) if a == "FPCore" => {}
        _ => return error(pos, "expected (FPCore ...)"),
    }
    let mut rest = &items[1..];
    // Optional identifier before the argument list.
    if let Some(Sexp::Atom(_, _)) = rest.first() {
        rest = &rest[1..];
    }
    let Some((Sexp::List(args, _), mut rest)) = rest.split_first() else {
        return error(pos, "expected an argument list");
    };
    let mut vars = Vec::with_capacity(args.len());
    for a in args {
        let name = atom(a, "a variable name")?;
        if !is_symbol(name) {
            return error(a.pos(), format!("invalid variable name '{name}'"));
        }
        if vars.iter().any(|v| v == name) {
            return error(a.pos(), format!("duplicate variable '{name}'"));
        }
        vars.push(name.to_string());
    }
    let mut name = None;
    let mut pre = None;
    let mut target = TargetFormat::Binary64;
    while let [Sexp::Atom(key, kp), value, tail @ ..] = rest {
        if !key.starts_with(':') {
            break;
        }
        match key.as_str() {
            ":name" => match value {
                Sexp::Str(s, _) => name = Some(s.clone()),
                Sexp::Atom(s, _) => name = Some(s.clone()),
                _ => return error(value.pos(), ":name expects a string"),
            },
            ":pre" => pre = Some(parse_expr(value)?),
            ":precision" => {
                let v = atom(value, "a precision")?;
                target = v.parse().or_else(|_| error(value.pos(), format!("unsupported precision '{v}'")))?;
            }
            _ => {
                let _ = kp;
            }
        }
        rest = tail;
    }
    let [body] = rest else {
        return error(pos, "expected exactly one body expression");
    };
    let program = Program { name, vars, pre, body: parse_expr(body)?, target };
    program.check().or_else(|e| error(pos, e.to_string()))?;
    Ok(program)
}

/// Exact decimal text when the denominator divides a power of ten,
/// `p/q` otherwise.
pub fn print_number(q: &Rational) -> String {
    let den = q.denom();
    let twos = den.find_one(0).unwrap_or(0);
    let odd = Integer::from(den >> twos);
    let fives = {
        let mut n = odd.clone();
        let mut k = 0u32;
        while n.is_divisible_u(5) {
            n /= 5u32;
            k += 1;
        }
        (n == 1).then_some(k)
    };
    let Some(fives) = fives else {
        return format!("{}/{}", q.numer(), den);
    };
    let k = twos.max(fives);
    if k == 0 {
        return q.numer().to_string();
    }
    let scaled = Integer::from(q.numer() * Integer::from(10).pow(k)) / den;
    let neg = scaled < 0;
    let digits = scaled.abs().to_string();
    let k = k as usize;
    let padded = if digits.len() <= k { format!("{}{digits}", "0".repeat(k + 1 - digits.len())) } else { digits };
    let (int, frac) = padded.split_at(padded.len() - k);
    format!("{}{int}.{frac}", if neg { "-" } else { "" })
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_list(out: &mut String, head: &str, xs: &[Expr]) {
    out.push('(');
    out.push_str(head);
    for x in xs {
        out.push(' ');
        write_expr(out, x);
    }
    out.push(')');
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Num(q) => out.push_str(&print_number(q)),
        Expr::Const(c) => out.push_str(c.name()),
        Expr::Bool(b) => out.push_str(if *b { "TRUE" } else { "FALSE" }),
        Expr::Var(v) => out.push_str(v),
        Expr::Apply(ScalarOp::Neg, xs) => write_list(out, "-", xs),
        Expr::Apply(op, xs) => write_list(out, op.name(), xs),
        Expr::If(c, t, f) => write_list(out, "if", &[(**c).clone(), (**t).clone(), (**f).clone()]),
        Expr::Let { bindings, body, sequential } => {
            out.push_str(if *sequential { "(let* (" } else { "(let (" });
            for (i, (name, v)) in bindings.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "[{name} ");
                write_expr(out, v);
                out.push(']');
            }
            out.push_str(") ");
            write_expr(out, body);
            out.push(')');
        }
        Expr::Compare(op, a, b) => write_list(out, op.name(), &[(**a).clone(), (**b).clone()]),
        Expr::And(xs) => write_list(out, "and", xs),
        Expr::Or(xs) => write_list(out, "or", xs),
        Expr::Not(x) => write_list(out, "not", std::slice::from_ref(x)),
        Expr::ErrOf(x) => write_list(out, "err", std::slice::from_ref(x)),
    }
}

pub fn print_program(p: &Program) -> String {
    let mut s = String::from("(FPCore (");
    s.push_str(&p.vars.join(" "));
    s.push(')');
    if let Some(name) = &p.name {
        let _ = write!(s, " :name {name:?}");
    }
    if p.target != TargetFormat::Binary64 {
        let _ = write!(s, " :precision {}", p.target.name());
    }
    if let Some(pre) = &p.pre {
        s.push_str(" :pre ");
        write_expr(&mut s, pre);
    }
    s.push(' ');
    write_expr(&mut s, &p.body);
    s.push(')');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers() {
        assert_eq!(parse_number("0.5"), Some(Rational::from((1, 2))));
        assert_eq!(parse_number("-1e-3"), Some(Rational::from((-1, 1000))));
        assert_eq!(parse_number("1/3"), Some(Rational::from((1, 3))));
        assert_eq!(parse_number("0x1.8p1"), Some(Rational::from(3)));
        assert_eq!(parse_number(".25"), Some(Rational::from((1, 4))));
        assert_eq!(parse_number("1e200").map(|q| q.denom().clone()), Some(Integer::from(1)));
        assert_eq!(parse_number("x"), None);
        assert_eq!(parse_number("1/0"), None);
        assert_eq!(parse_number("."), None);
    }

    #[test]
    fn number_printing() {
        for s in ["0.5", "-0.001", "1/3", "12", "-7/6", "0.0625", "1.1"] {
            assert_eq!(parse_number(&print_number(&parse_number(s).unwrap())), parse_number(s));
        }
        assert_eq!(print_number(&Rational::from((1, 2))), "0.5");
        assert_eq!(print_number(&Rational::from((-1, 1000))), "-0.001");
        assert_eq!(print_number(&Rational::from((1, 3))), "1/3");
    }

    #[test]
    fn simple_programs() {
        let p = parse_program("(FPCore (x) (sqrt x))").unwrap();
        assert_eq!(p.vars, vec!["x"]);
        assert!(p.pre.is_none());
        let p = parse_program("(FPCore (x) :pre (< 0 x) (log x))").unwrap();
        assert!(p.pre.is_some());
        let p = parse_program("(FPCore (x) :name \"neg\" :precision binary32 (- x))").unwrap();
        assert_eq!(p.body, Expr::Apply(ScalarOp::Neg, vec![Expr::var("x")]));
        assert_eq!(p.target, TargetFormat::Binary32);
        assert_eq!(p.name.as_deref(), Some("neg"));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_program("(FPCore (x)\n  (frobnicate x))").unwrap_err();
        assert_eq!((e.line, e.col), (2, 4));
        assert!(e.msg.contains("frobnicate"));
        let e = parse_program("(FPCore (x) (sqrt x x))").unwrap_err();
        assert!(e.msg.contains("expects 1"));
        let e = parse_program("(FPCore (x) (+ x y))").unwrap_err();
        assert!(e.msg.contains("unbound"));
        assert!(parse_program("(FPCore (x) (sqrt x)").is_err());
        assert!(parse_program("(FPCore (x) (< x 1))").is_err());
    }

    #[test]
    fn round_trip() {
        let texts = [
            "(FPCore (x y) :name \"r\" :pre (and (< 0 x 10) (>= y 1/2)) (/ (pow x y) (+ (pow x y) 2)))",
            "(FPCore (x) (let ([t (* x x)] [u 0.1]) (if (or (== t 0) (not (!= u x))) PI (- t))))",
            "(FPCore (a) (let* ([b (+ a 1 2 3)]) (fmod b E)))",
        ];
        for t in texts {
            let p = parse_program(t).unwrap();
            let q = parse_program(&print_program(&p)).unwrap();
            assert_eq!(p, q, "{t}");
        }
    }

    #[test]
    fn several_forms() {
        let ps = parse_programs("; comment\n(FPCore (x) x)\n(FPCore f (y) (exp y))").unwrap();
        assert_eq!(ps.len(), 2);
    }
}
