//! Checks on the search partition and on sampling, with point counts taken
//! from bit patterns rather than from the library's ordinal tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rivalkit::sample::WeightedRects;
use rivalkit::search::search_with;
use rivalkit::{Engine, Program, Rect, SearchConfig, SearchState, StuckPolicy, TargetFormat};
use rug::{Integer, Rational};

use crate::gen;

fn ord32(x: f64) -> i64 {
    let b = (x as f32).to_bits() as i32 as i64;
    if b < 0 {
        -(b & 0x7fff_ffff)
    } else {
        b
    }
}

fn ord_in(target: TargetFormat, x: f64) -> i64 {
    match target {
        TargetFormat::Binary64 => gen::ord(x),
        TargetFormat::Binary32 => ord32(x),
    }
}

/// Number of values of `target` in `[lo, hi]`, counting both zeros once.
pub fn count(target: TargetFormat, lo: f64, hi: f64) -> Integer {
    Integer::from(ord_in(target, hi) as i128 - ord_in(target, lo) as i128 + 1)
}

/// Fraction of all input points in `r`.
pub fn weight(target: TargetFormat, r: &Rect) -> Rational {
    let all = count(target, f64::NEG_INFINITY, f64::INFINITY);
    r.0.iter().fold(Rational::from(1), |acc, &(lo, hi)| acc * Rational::from((count(target, lo, hi), all.clone())))
}

fn total(target: TargetFormat, rects: &[Rect]) -> Rational {
    rects.iter().fold(Rational::new(), |acc, r| acc + weight(target, r))
}

/// Where one search went wrong, if it did.
#[derive(Clone, Debug, Default)]
pub struct PartitionReport {
    pub searches: usize,
    pub states: usize,
    pub violations: Vec<String>,
}

impl PartitionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Disjointness by membership: every random point lies in at most one
/// rectangle of the final state, and in exactly one if it lies in a seed.
fn membership(state: &SearchState, rng: &mut impl Rng) -> Option<String> {
    let all: Vec<&Rect> = state.t.iter().chain(&state.f).chain(&state.o).chain(&state.stuck).collect();
    for seed in &state.seeds {
        for _ in 0..20 {
            let point: Vec<f64> = seed
                .0
                .iter()
                .map(|&(lo, hi)| state.target.from_f64(gen::point_in(rng, lo, hi)))
                .collect();
            let hits = all.iter().filter(|r| r.contains(&point)).count();
            if hits != 1 {
                return Some(format!("{point:?} lies in {hits} rectangles"));
            }
        }
    }
    None
}

/// Search `programs` one after another, checking after every iteration that
/// the weights of T, F, O and the stuck set add up to the seeds' weight, and
/// at the end that the rectangles are disjoint and no more numerous than the
/// splits allow.
pub fn conservation(engine: &Engine, programs: &[Program], config: &SearchConfig, seed: u64) -> PartitionReport {
    let mut report = PartitionReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for p in programs {
        let t = p.target;
        let mut seeds: Option<Rational> = None;
        let mut bad = Vec::new();
        let state = search_with(engine, p, config, |s| {
            report.states += 1;
            let whole = seeds.get_or_insert_with(|| total(t, &s.seeds)).clone();
            let parts = total(t, &s.t) + total(t, &s.f) + total(t, &s.o) + total(t, &s.stuck);
            if parts != whole || whole > 1 {
                bad.push(format!("{p}: parts {parts} vs seeds {whole}"));
            }
        });
        report.searches += 1;
        report.violations.extend(bad);
        let rects = state.t.len() + state.f.len() + state.o.len() + state.stuck.len();
        let bound = state.seeds.len() << (config.iterations.min(40));
        if rects > bound {
            report.violations.push(format!("{p}: {rects} rectangles from {} seeds", state.seeds.len()));
        }
        if let Some(v) = membership(&state, &mut rng) {
            report.violations.push(format!("{p}: {v}"));
        }
    }
    report
}

/// Random programs with preconditions, for [`conservation`].
pub fn programs(seed: u64, n: usize) -> Vec<Program> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let depth = rng.gen_range(1..=2);
            let body = gen::expr(&mut rng, depth);
            let depth = rng.gen_range(1..=3);
            let pre = gen::precondition(&mut rng, depth);
            let p = Program::new(&gen::VARS, body).with_pre(pre);
            if rng.gen_bool(0.2) {
                p.with_target(TargetFormat::Binary32)
            } else {
                p
            }
        })
        .collect()
}

/// Result of drawing from two rectangles whose weights are 1:3.
#[derive(Clone, Debug)]
pub struct Uniformity {
    pub draws: usize,
    /// Standardized deviation of the count in the lighter rectangle.
    pub z: f64,
    /// Chi-square statistic over ten equal bins of each rectangle.
    pub chi2: f64,
    pub dof: usize,
}

impl Uniformity {
    /// Within four standard deviations on both statistics.
    pub fn ok(&self) -> bool {
        let dof = self.dof as f64;
        self.z.abs() <= 4.0 && self.chi2 <= dof + 4.0 * (2.0 * dof).sqrt()
    }
}

const BINS: i64 = 10;

pub fn two_rects() -> (Rect, Rect) {
    // 1000 and 3000 consecutive binary64 values.
    let a = gen::ord(1.0);
    let b = gen::ord(-5.0);
    (Rect(vec![(gen::unord(a), gen::unord(a + 999))]), Rect(vec![(gen::unord(b), gen::unord(b + 2999))]))
}

/// Draw `draws` points the way sampling does and test the counts.
pub fn uniformity(seed: u64, draws: usize) -> Uniformity {
    let (a, b) = two_rects();
    let pool = WeightedRects::new(vec![(&a, false), (&b, false)], TargetFormat::Binary64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bins = vec![0usize; 2 * BINS as usize];
    let mut in_a = 0usize;
    for _ in 0..draws {
        let i = pool.choose(&mut rng);
        let x = pool.draw(i, &mut rng)[0];
        let (r, offset) = if a.contains(&[x]) { (&a, 0) } else { (&b, BINS) };
        assert!(r.contains(&[x]), "{x} outside both rectangles");
        if offset == 0 {
            in_a += 1;
        }
        let (lo, hi) = r.0[0];
        let span = (gen::ord(hi) - gen::ord(lo) + 1) as i64;
        let k = (gen::ord(x) - gen::ord(lo)) * BINS / span;
        bins[(offset + k) as usize] += 1;
    }
    let n = draws as f64;
    let z = (in_a as f64 - n / 4.0) / (n * 0.25 * 0.75).sqrt();
    let chi2 = bins
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let share = if (i as i64) < BINS { 0.25 } else { 0.75 };
            let expect = n * share / BINS as f64;
            (c as f64 - expect).powi(2) / expect
        })
        .sum();
    Uniformity { draws, z, chi2, dof: bins.len() - 1 }
}

/// A search configuration that keeps stuck rectangles, for tests that look
/// at them.
pub fn keeping() -> SearchConfig {
    SearchConfig { stuck: StuckPolicy::Keep, ..SearchConfig::default() }
}
