//! Branch-and-bound search for the valid part of the input space.
//!
//! The space of target-format inputs is cut into hyperrectangles. Each one
//! is evaluated with movable endpoints: rectangles proven valid go to `T`,
//! proven invalid to `F`, and undecided ones stay in `O` and are bisected
//! round-robin by ordinal.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::backend::RoundDir;
use crate::eval::{eval, eval_validity, Engine, Env};
use crate::expr::{Expr, Program};
use crate::interval::{Interval, Value};
use crate::ops::{CompareOp, Ctx};
use crate::target::TargetFormat;

/// One closed interval of target values per variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Rect(pub Vec<(f64, f64)>);

impl Rect {
    pub fn full(n: usize) -> Rect {
        Rect(vec![(f64::NEG_INFINITY, f64::INFINITY); n])
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        self.0.iter().zip(point).all(|(&(lo, hi), &x)| lo <= x && x <= hi)
    }

    /// Number of target values in the rectangle.
    pub fn count(&self, target: TargetFormat) -> Integer {
        self.0
            .iter()
            .fold(Integer::from(1), |acc, &(lo, hi)| acc * Integer::from(target.count_in(lo, hi)))
    }

    /// Fraction of the whole input space covered.
    pub fn weight(&self, target: TargetFormat) -> Rational {
        let total = Integer::from(target.total_count()).pow(self.dims() as u32);
        Rational::from((self.count(target), total))
    }

    /// A representative point: the ordinal midpoint of each side.
    pub fn witness(&self, target: TargetFormat) -> Vec<f64> {
        self.0
            .iter()
            .map(|&(lo, hi)| {
                let a = target.ordinal(lo).expect("member") as i128;
                let b = target.ordinal(hi).expect("member") as i128;
                target.ordinal_inverse((a + b).div_euclid(2) as i64).expect("in range")
            })
            .collect()
    }

    /// Split along `dim`, or the next dimension that has more than one
    /// value. `None` for a single point.
    pub fn split(&self, target: TargetFormat, dim: usize) -> Option<(Rect, Rect)> {
        let n = self.dims();
        (0..n).map(|k| (dim + k) % n).find_map(|d| {
            let (lo, hi) = self.0[d];
            let (mid, next) = target.split_point(lo, hi)?;
            let mut left = self.clone();
            let mut right = self.clone();
            left.0[d].1 = mid;
            right.0[d].0 = next;
            Some((left, right))
        })
    }

    fn intervals(&self) -> Vec<Interval> {
        self.0
            .iter()
            .map(|&(lo, hi)| Interval::movable(Float::with_val(53, lo), Float::with_val(53, hi)))
            .collect()
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (lo, hi)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "[{lo:e}, {hi:e}]")?;
        }
        f.write_str(")")
    }
}

/// Per-variable unions of disjoint closed intervals, sorted. A variable
/// that is absent is unrestricted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RangeTable(pub BTreeMap<String, Vec<(f64, f64)>>);

fn normalize(mut xs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    xs.retain(|(lo, hi)| lo <= hi);
    xs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(xs.len());
    for (lo, hi) in xs {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

fn intersect(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &(alo, ahi) in a {
        for &(blo, bhi) in b {
            let (lo, hi) = (alo.max(blo), ahi.min(bhi));
            if lo <= hi {
                out.push((lo, hi));
            }
        }
    }
    normalize(out)
}

impl RangeTable {
    pub fn unrestricted() -> RangeTable {
        RangeTable::default()
    }

    pub fn get(&self, var: &str) -> Option<&[(f64, f64)]> {
        self.0.get(var).map(Vec::as_slice)
    }

    fn and(mut self, other: RangeTable) -> RangeTable {
        for (v, xs) in other.0 {
            let merged = match self.0.remove(&v) {
                Some(ys) => intersect(&xs, &ys),
                None => xs,
            };
            self.0.insert(v, merged);
        }
        self
    }

    fn or(self, other: RangeTable) -> RangeTable {
        let mut out = BTreeMap::new();
        for (v, mut xs) in self.0 {
            if let Some(ys) = other.0.get(&v) {
                xs.extend(ys);
                out.insert(v, normalize(xs));
            }
        }
        RangeTable(out)
    }
}

/// The value of a variable-free expression as an outward-rounded range of
/// target values.
fn constant_range(e: &Expr, target: TargetFormat, ctx: &Ctx<'_>) -> Option<(f64, f64)> {
    if !e.free_vars().is_empty() {
        return None;
    }
    let Ok(Value::Real(iv)) = eval(e, &mut Env::new(), ctx) else {
        return None;
    };
    if iv.err.possible {
        return None;
    }
    Some((target.round(&iv.lo.value, RoundDir::Down), target.round(&iv.hi.value, RoundDir::Up)))
}

/// Static bounds on the variables implied by a precondition.
///
/// Comparisons between a variable and a constant bound that variable;
/// conjunctions intersect, disjunctions union, and anything else leaves
/// every variable unrestricted. Every point satisfying `pre` lies inside
/// the table.
pub fn range_analysis(pre: &Expr, vars: &[String], target: TargetFormat, ctx: &Ctx<'_>) -> RangeTable {
    let inf = f64::INFINITY;
    match pre {
        Expr::And(xs) => xs
            .iter()
            .map(|x| range_analysis(x, vars, target, ctx))
            .fold(RangeTable::unrestricted(), RangeTable::and),
        Expr::Or(xs) => {
            let mut it = xs.iter().map(|x| range_analysis(x, vars, target, ctx));
            match it.next() {
                Some(first) => it.fold(first, RangeTable::or),
                None => RangeTable::unrestricted(),
            }
        }
        Expr::Compare(op, a, b) => {
            let (var, c, op) = match (&**a, &**b) {
                (Expr::Var(v), other) => (v, other, *op),
                (other, Expr::Var(v)) => (v, other, flip(*op)),
                _ => return RangeTable::unrestricted(),
            };
            if !vars.contains(var) {
                return RangeTable::unrestricted();
            }
            let Some((clo, chi)) = constant_range(c, target, ctx) else {
                return RangeTable::unrestricted();
            };
            let range = match op {
                CompareOp::Lt | CompareOp::Le => (-inf, chi),
                CompareOp::Gt | CompareOp::Ge => (clo, inf),
                CompareOp::Eq => (clo, chi),
                CompareOp::Ne => return RangeTable::unrestricted(),
            };
            RangeTable([(var.clone(), normalize(vec![range]))].into_iter().collect())
        }
        _ => RangeTable::unrestricted(),
    }
}

/// `c op x` as `x op' c`.
fn flip(op: CompareOp) -> CompareOp {
    match op {
        CompareOp::Lt => CompareOp::Gt,
        CompareOp::Le => CompareOp::Ge,
        CompareOp::Gt => CompareOp::Lt,
        CompareOp::Ge => CompareOp::Le,
        other => other,
    }
}

/// What to do with a rectangle on which evaluation is stuck.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StuckPolicy {
    /// Record a warning and move the rectangle to `F`.
    #[default]
    Discard,
    /// Record a warning and keep the rectangle for sampling.
    Keep,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub iterations: usize,
    pub stuck: StuckPolicy,
    /// Upper bound on the number of seed rectangles from range analysis.
    pub max_seeds: usize,
}

impl Default for SearchConfig {
    fn default() -> SearchConfig {
        SearchConfig { iterations: 14, stuck: StuckPolicy::Discard, max_seeds: 256 }
    }
}

/// A rectangle on which no point can be sampled, with a member point.
#[derive(Clone, Debug, PartialEq)]
pub struct Warning {
    pub rect: Rect,
    pub witness: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct SearchState {
    pub target: TargetFormat,
    pub seeds: Vec<Rect>,
    /// Proven valid everywhere.
    pub t: Vec<Rect>,
    /// Proven invalid everywhere, plus discarded stuck rectangles.
    pub f: Vec<Rect>,
    /// Undecided.
    pub o: Vec<Rect>,
    /// Stuck rectangles retained under [`StuckPolicy::Keep`].
    pub stuck: Vec<Rect>,
    pub warnings: Vec<Warning>,
}

fn total_weight(rects: &[Rect], target: TargetFormat) -> Rational {
    rects.iter().fold(Rational::new(), |acc, r| acc + r.weight(target))
}

impl SearchState {
    pub fn weight_t(&self) -> Rational {
        total_weight(&self.t, self.target)
    }

    pub fn weight_f(&self) -> Rational {
        total_weight(&self.f, self.target)
    }

    pub fn weight_o(&self) -> Rational {
        total_weight(&self.o, self.target) + total_weight(&self.stuck, self.target)
    }

    pub fn weight_seeds(&self) -> Rational {
        total_weight(&self.seeds, self.target)
    }

    /// Rectangles sampling draws from, with whether each needs a validity
    /// check per point.
    pub fn pool(&self) -> Vec<(&Rect, bool)> {
        let t = self.t.iter().map(|r| (r, false));
        let o = self.o.iter().chain(&self.stuck).map(|r| (r, true));
        t.chain(o).collect()
    }

    pub fn has_valid_candidates(&self) -> bool {
        !(self.t.is_empty() && self.o.is_empty() && self.stuck.is_empty())
    }
}

/// Cartesian product of the per-variable ranges, coarsened to at most
/// `max` rectangles by replacing the longest unions with their hulls.
pub fn seed_rects(table: &RangeTable, vars: &[String], max: usize) -> Vec<Rect> {
    let full = vec![(f64::NEG_INFINITY, f64::INFINITY)];
    let mut sides: Vec<Vec<(f64, f64)>> =
        vars.iter().map(|v| table.get(v).map(<[_]>::to_vec).unwrap_or_else(|| full.clone())).collect();
    if sides.iter().any(Vec::is_empty) {
        return Vec::new();
    }
    let product = |s: &[Vec<(f64, f64)>]| s.iter().fold(1usize, |acc, x| acc.saturating_mul(x.len()));
    while product(&sides) > max.max(1) {
        let widest = (0..sides.len()).max_by_key(|&i| sides[i].len()).expect("non-empty");
        let s = &sides[widest];
        sides[widest] = vec![(s[0].0, s[s.len() - 1].1)];
    }
    let mut rects = vec![Vec::new()];
    for side in &sides {
        rects = rects
            .into_iter()
            .flat_map(|prefix: Vec<(f64, f64)>| {
                side.iter().map(move |&iv| {
                    let mut r = prefix.clone();
                    r.push(iv);
                    r
                })
            })
            .collect();
    }
    rects.into_iter().map(Rect).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Valid,
    Invalid,
    Stuck,
    Unknown,
}

fn classify(engine: &Engine, p: &Program, r: &Rect, prec: u32) -> Class {
    let ctx = Ctx::new(&engine.backend, prec);
    let v = eval_validity(p, &r.intervals(), &ctx).expect("program must type-check");
    let all = v.all();
    if all.is_false() {
        Class::Invalid
    } else if all.is_stuck() || v.output.is_stuck(p.target, engine.strict_finite) {
        Class::Stuck
    } else if all.is_true() {
        Class::Valid
    } else {
        Class::Unknown
    }
}

/// Run the search at the engine's first precision.
pub fn search(engine: &Engine, p: &Program, config: &SearchConfig) -> SearchState {
    search_with(engine, p, config, |_| {})
}

/// [`search`], calling `observe` after seeding and after every iteration.
pub fn search_with(
    engine: &Engine,
    p: &Program,
    config: &SearchConfig,
    mut observe: impl FnMut(&SearchState),
) -> SearchState {
    let prec = engine.ladder.first();
    let table = match &p.pre {
        Some(pre) => range_analysis(pre, &p.vars, p.target, &Ctx::new(&engine.backend, prec)),
        None => RangeTable::unrestricted(),
    };
    let seeds = seed_rects(&table, &p.vars, config.max_seeds);
    let mut state = SearchState {
        target: p.target,
        seeds: seeds.clone(),
        t: Vec::new(),
        f: Vec::new(),
        o: seeds,
        stuck: Vec::new(),
        warnings: Vec::new(),
    };
    observe(&state);
    let n = p.vars.len().max(1);
    // One extra pass classifies the halves made by the last split.
    for i in 0..=config.iterations {
        let last = i == config.iterations;
        let open = std::mem::take(&mut state.o);
        let classes: Vec<Class> = open.par_iter().map(|r| classify(engine, p, r, prec)).collect();
        for (r, c) in open.into_iter().zip(classes) {
            match c {
                Class::Valid => state.t.push(r),
                Class::Invalid => state.f.push(r),
                Class::Stuck => {
                    state.warnings.push(Warning { witness: r.witness(p.target), rect: r.clone() });
                    match config.stuck {
                        StuckPolicy::Discard => state.f.push(r),
                        StuckPolicy::Keep => state.stuck.push(r),
                    }
                }
                Class::Unknown if last => state.o.push(r),
                Class::Unknown => match r.split(p.target, i % n) {
                    Some((a, b)) => {
                        state.o.push(a);
                        state.o.push(b);
                    }
                    None => state.o.push(r),
                },
            }
        }
        observe(&state);
        if state.o.is_empty() {
            break;
        }
    }
    state
}
