//! Randomized checks of the interval library against the reference.
//!
//! Each runner is deterministic in its seed. Case `k` draws from its own
//! stream so the runners can be parallel.

use std::fmt;
use std::ops::Range;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rivalkit::eval::{eval, Env};
use rivalkit::{Backend, Ctx, Expr, Interval, ScalarOp, Value};
use rug::float::Round;
use rug::Float;

use crate::gen::{self, VARS};
use crate::oracle::{reference, Reference};

pub const PRECISIONS: [u32; 6] = [24, 53, 64, 80, 113, 160];

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub cases: usize,
    /// Individual comparisons made.
    pub checks: usize,
    /// Comparisons skipped because the reference was unreliable.
    pub skipped: usize,
    pub violations: usize,
    /// The first few violations, for diagnosis.
    pub examples: Vec<String>,
}

impl Report {
    fn merge(mut self, o: Report) -> Report {
        self.cases += o.cases;
        self.checks += o.checks;
        self.skipped += o.skipped;
        self.violations += o.violations;
        for e in o.examples {
            if self.examples.len() < 10 {
                self.examples.push(e);
            }
        }
        self
    }

    fn fail(&mut self, msg: String) {
        self.violations += 1;
        if self.examples.len() < 10 {
            self.examples.push(msg);
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} cases, {} checks, {} skipped, {} violations",
            self.cases, self.checks, self.skipped, self.violations
        )?;
        for e in &self.examples {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}

fn run(seed: u64, cases: Range<usize>, case: impl Fn(&mut ChaCha8Rng, &Backend, &mut Report) + Sync) -> Report {
    let backend = Backend::default();
    cases
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut r = Report { cases: 1, ..Report::default() };
            case(&mut rng, &backend, &mut r);
            r
        })
        .reduce(Report::default, Report::merge)
}

fn input(rng: &mut impl Rng, lo: f64, hi: f64) -> Interval {
    let lo_fixed = rng.gen_bool(0.5);
    let hi_fixed = if lo == hi { lo_fixed } else { rng.gen_bool(0.5) };
    Interval::from_bounds(Float::with_val(53, lo), Float::with_val(53, hi), lo_fixed, hi_fixed)
}

fn eval_real(e: &Expr, env: &[Interval], ctx: &Ctx<'_>) -> Interval {
    let mut env: Env = VARS.iter().zip(env).map(|(v, iv)| (v.to_string(), Value::Real(iv.clone()))).collect();
    match eval(e, &mut env, ctx).expect("well-typed") {
        Value::Real(iv) => iv,
        Value::Bool(..) => panic!("real expression expected"),
    }
}

fn contains_approx(iv: &Interval, v: &Float, p: u32) -> bool {
    if iv.err.guaranteed {
        return false;
    }
    if v.is_infinite() {
        return if v.is_sign_positive() { iv.hi.value == *v } else { iv.lo.value == *v };
    }
    let slack = Float::with_val(64, v.abs_ref()) >> (2 * p);
    let up = Float::with_val(v.prec() + 64, v + &slack);
    let down = Float::with_val(v.prec() + 64, v - &slack);
    iv.lo.value <= up && down <= iv.hi.value
}

/// Random expressions of depth at most 4 evaluated over random input
/// intervals, compared with the reference at points inside the inputs.
pub fn soundness(seed: u64, cases: usize) -> Report {
    soundness_range(seed, 0..cases)
}

pub fn soundness_range(seed: u64, cases: Range<usize>) -> Report {
    run(seed, cases, |rng, backend, rep| {
        let p = PRECISIONS[rng.gen_range(0..PRECISIONS.len())];
        let depth = rng.gen_range(1..=4);
        let e = if rng.gen_bool(0.3) { gen::field_expr(rng, depth) } else { gen::expr(rng, depth) };
        let allow_inf = rng.gen_bool(0.1);
        let bounds: Vec<(f64, f64)> = VARS.iter().map(|_| gen::interval(rng, allow_inf)).collect();
        let inputs: Vec<Interval> = bounds.iter().map(|&(lo, hi)| input(rng, lo, hi)).collect();
        let out = eval_real(&e, &inputs, &Ctx::new(backend, p));
        for _ in 0..4 {
            let point: Vec<f64> = bounds.iter().map(|&(lo, hi)| gen::point_in(rng, lo, hi)).collect();
            let env: Vec<(&str, f64)> = VARS.iter().copied().zip(point.iter().copied()).collect();
            rep.checks += 1;
            let ok = match reference(&e, &env, p) {
                Reference::Unreliable => {
                    rep.skipped += 1;
                    true
                }
                Reference::Error => out.err.possible,
                Reference::Exact(q) => !out.err.guaranteed && out.lo.value <= q && out.hi.value >= q,
                Reference::Approx(v) => contains_approx(&out, &v, p),
            };
            if !ok {
                rep.fail(format!("{e} at {point:?} over {bounds:?}, p={p}: got {out}"));
            }
        }
    })
}

/// Split `[lo, hi]` into at most `n` pieces of nearly equal value count.
pub fn pieces(lo: f64, hi: f64, n: i64) -> Vec<(f64, f64)> {
    let (a, b) = (gen::ord(lo) as i128, gen::ord(hi) as i128);
    let k = (n as i128).min(b - a).max(1);
    let cut = |i: i128| gen::unord((a + (b - a) * i / k) as i64);
    (0..k).map(|i| (cut(i), cut(i + 1))).collect()
}

fn hull(parts: &[Interval]) -> Option<(Float, Float)> {
    let mut it = parts.iter().filter(|iv| !iv.err.guaranteed);
    let first = it.next()?;
    let (mut lo, mut hi) = (first.lo.value.clone(), first.hi.value.clone());
    for iv in it {
        if iv.lo.value < lo {
            lo = iv.lo.value.clone();
        }
        if iv.hi.value > hi {
            hi = iv.hi.value.clone();
        }
    }
    Some((lo, hi))
}

/// `w` is within one ulp (at `p` bits) of `h` on either side.
fn within_ulp(w: &Float, h: &Float, p: u32) -> bool {
    if h.is_infinite() || w.is_infinite() {
        return w == h;
    }
    let mut below = Float::with_val_round(p, h, Round::Down).0;
    below.next_down();
    let mut above = Float::with_val_round(p, h, Round::Up).0;
    above.next_up();
    below <= *w && *w <= above
}

/// Single operators over random inputs: the hull of the results on an
/// 8-way subdivision of every argument matches the undivided result to
/// within one ulp.
pub fn completeness(seed: u64, cases: usize) -> Report {
    completeness_range(seed, 0..cases)
}

pub fn completeness_range(seed: u64, cases: Range<usize>) -> Report {
    run(seed, cases, |rng, backend, rep| {
        let p = PRECISIONS[rng.gen_range(0..PRECISIONS.len())];
        let op = ScalarOp::ALL[rng.gen_range(0..ScalarOp::ALL.len())];
        let allow_inf = rng.gen_bool(0.05);
        let bounds: Vec<(f64, f64)> = (0..op.arity()).map(|_| gen::interval(rng, allow_inf)).collect();
        let ctx = Ctx::new(backend, p);
        let iv = |(lo, hi): (f64, f64)| Interval::movable(Float::with_val(53, lo), Float::with_val(53, hi));
        let whole = ctx.apply(op, &bounds.iter().map(|&b| iv(b)).collect::<Vec<_>>());
        let splits: Vec<Vec<(f64, f64)>> = bounds.iter().map(|&(lo, hi)| pieces(lo, hi, 8)).collect();
        let parts: Vec<Interval> = match op.arity() {
            1 => splits[0].iter().map(|&a| ctx.apply(op, &[iv(a)])).collect(),
            _ => splits[0]
                .iter()
                .flat_map(|&a| splits[1].iter().map(move |&b| (a, b)))
                .map(|(a, b)| ctx.apply(op, &[iv(a), iv(b)]))
                .collect(),
        };
        rep.checks += 1;
        let ok = match (whole.err.guaranteed, hull(&parts)) {
            (true, h) => h.is_none(),
            (false, None) => false,
            (false, Some((lo, hi))) => within_ulp(&whole.lo.value, &lo, p) && within_ulp(&whole.hi.value, &hi, p),
        };
        if !ok {
            let h = hull(&parts).map(|(l, h)| format!("[{l}, {h}]")).unwrap_or("error".into());
            rep.fail(format!("{op} over {bounds:?}, p={p}: whole {whole}, hull {h}"));
        }
    })
}

/// `narrow` refines `wide`: errors only become more certain, bounds only
/// shrink, and immovable bounds are reproduced exactly.
pub fn refines(narrow: &Interval, wide: &Interval) -> bool {
    if wide.err.guaranteed {
        return narrow.err.guaranteed;
    }
    if narrow.err.possible && !wide.err.possible {
        return false;
    }
    if narrow.err.guaranteed {
        return true;
    }
    let lo = if wide.lo.immovable {
        narrow.lo.immovable && narrow.lo.value == wide.lo.value
    } else {
        narrow.lo.value >= wide.lo.value
    };
    let hi = if wide.hi.immovable {
        narrow.hi.immovable && narrow.hi.value == wide.hi.value
    } else {
        narrow.hi.value <= wide.hi.value
    };
    lo && hi
}

/// Random expressions evaluated at `p` and `2p` over the same inputs.
pub fn movability(seed: u64, cases: usize) -> Report {
    movability_range(seed, 0..cases)
}

pub fn movability_range(seed: u64, cases: Range<usize>) -> Report {
    run(seed, cases, |rng, backend, rep| {
        let p = PRECISIONS[rng.gen_range(0..PRECISIONS.len())];
        let depth = rng.gen_range(1..=4);
        let e = gen::expr(rng, depth);
        let allow_inf = rng.gen_bool(0.1);
        let bounds: Vec<(f64, f64)> = VARS.iter().map(|_| gen::interval(rng, allow_inf)).collect();
        let inputs: Vec<Interval> = bounds.iter().map(|&(lo, hi)| input(rng, lo, hi)).collect();
        let wide = eval_real(&e, &inputs, &Ctx::new(backend, p));
        let narrow = eval_real(&e, &inputs, &Ctx::new(backend, 2 * p));
        rep.checks += 1;
        if !refines(&narrow, &wide) {
            let ins: Vec<String> = inputs.iter().map(ToString::to_string).collect();
            rep.fail(format!("{e} over {ins:?}: {wide} at {p} bits, {narrow} at {} bits", 2 * p));
        }
    })
}
