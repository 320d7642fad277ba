//! Drawing valid inputs uniformly from the result of a search.
//!
//! A rectangle is picked with probability proportional to its weight and a
//! point is drawn uniformly among its target values. Points from undecided
//! rectangles are kept only if their ground truth is valid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::Integer;
use thiserror::Error;

use crate::eval::{Engine, Outcome};
use crate::expr::Program;
use crate::search::{Rect, SearchState};
use crate::target::TargetFormat;

pub const DEFAULT_RETRIES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum SampleError {
    #[error("no valid inputs: every region of {searched} was proven invalid or unsamplable")]
    NoValidInputs { searched: String },
    #[error("low yield: no valid point after {retries} draws (sample {index})")]
    LowYield { index: usize, retries: usize },
}

/// An accepted input and its correctly rounded output.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub point: Vec<f64>,
    pub value: f64,
    pub bits: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SampleStats {
    pub draws: usize,
    pub accepted: usize,
    /// Draws whose point turned out invalid.
    pub rejected: usize,
    pub unsamplable: usize,
    pub exhausted: usize,
}

impl SampleStats {
    pub fn merge(&mut self, o: &SampleStats) {
        self.draws += o.draws;
        self.accepted += o.accepted;
        self.rejected += o.rejected;
        self.unsamplable += o.unsamplable;
        self.exhausted += o.exhausted;
    }

    /// Fraction of draws that did not yield a sample.
    pub fn rejection_rate(&self) -> f64 {
        if self.draws == 0 {
            0.0
        } else {
            (self.draws - self.accepted) as f64 / self.draws as f64
        }
    }
}

/// Rectangles with integer weights proportional to their point counts.
#[derive(Clone, Debug)]
pub struct WeightedRects<'a> {
    rects: Vec<(&'a Rect, bool)>,
    cumulative: Vec<Integer>,
    target: TargetFormat,
}

impl<'a> WeightedRects<'a> {
    pub fn new(pool: Vec<(&'a Rect, bool)>, target: TargetFormat) -> WeightedRects<'a> {
        let mut acc = Integer::new();
        let cumulative = pool
            .iter()
            .map(|(r, _)| {
                acc += r.count(target);
                acc.clone()
            })
            .collect();
        WeightedRects { rects: pool, cumulative, target }
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// Index of a rectangle chosen with probability proportional to weight.
    pub fn choose(&self, rng: &mut impl Rng) -> usize {
        let total = self.cumulative.last().expect("non-empty pool");
        let r = uniform_below(total, rng);
        self.cumulative.partition_point(|c| *c <= r)
    }

    /// A uniformly random target value in each side of rectangle `i`.
    pub fn draw(&self, i: usize, rng: &mut impl Rng) -> Vec<f64> {
        let t = self.target;
        let (rect, _) = self.rects[i];
        rect.0
            .iter()
            .map(|&(lo, hi)| {
                let a = t.ordinal(lo).expect("member");
                let b = t.ordinal(hi).expect("member");
                t.ordinal_inverse(rng.gen_range(a..=b)).expect("in range")
            })
            .collect()
    }
}

/// A uniform integer in `[0, n)` by rejection on the bit length.
fn uniform_below(n: &Integer, rng: &mut impl Rng) -> Integer {
    assert!(*n > 0);
    let bits = n.significant_bits();
    let words = bits.div_ceil(64) as usize;
    loop {
        let digits: Vec<u64> = (0..words).map(|_| rng.gen()).collect();
        let mut x = Integer::from_digits(&digits, rug::integer::Order::Lsf);
        x.keep_bits_mut(bits);
        if x < *n {
            return x;
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampleConfig {
    pub seed: u64,
    pub retries: usize,
}

impl Default for SampleConfig {
    fn default() -> SampleConfig {
        SampleConfig { seed: 0, retries: DEFAULT_RETRIES }
    }
}

/// Draw `count` valid points. Draw `k` uses its own random stream, so the
/// result does not depend on how the work is scheduled.
pub fn sample(
    engine: &Engine,
    p: &Program,
    state: &SearchState,
    count: usize,
    config: &SampleConfig,
) -> Result<(Vec<Sample>, SampleStats), SampleError> {
    if !state.has_valid_candidates() {
        let searched = if state.seeds.is_empty() {
            "the precondition's range (which is empty)".to_string()
        } else {
            state.seeds.iter().map(ToString::to_string).collect::<Vec<_>>().join(" u ")
        };
        return Err(SampleError::NoValidInputs { searched });
    }
    let pool = WeightedRects::new(state.pool(), p.target);
    let results: Vec<Result<(Sample, SampleStats), SampleError>> =
        (0..count).into_par_iter().map(|k| draw_one(engine, p, &pool, k, config)).collect();
    let mut samples = Vec::with_capacity(count);
    let mut stats = SampleStats::default();
    for r in results {
        let (s, st) = r?;
        samples.push(s);
        stats.merge(&st);
    }
    Ok((samples, stats))
}

fn draw_one(
    engine: &Engine,
    p: &Program,
    pool: &WeightedRects<'_>,
    k: usize,
    config: &SampleConfig,
) -> Result<(Sample, SampleStats), SampleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(k as u64);
    let mut stats = SampleStats::default();
    for _ in 0..config.retries {
        let i = pool.choose(&mut rng);
        let point = pool.draw(i, &mut rng);
        stats.draws += 1;
        match engine.ground_truth(p, &point) {
            Outcome::Valid { value, bits } => {
                stats.accepted += 1;
                return Ok((Sample { point, value, bits }, stats));
            }
            Outcome::Invalid { .. } => stats.rejected += 1,
            Outcome::Unsamplable { .. } => stats.unsamplable += 1,
            Outcome::Exhausted => stats.exhausted += 1,
        }
    }
    Err(SampleError::LowYield { index: k, retries: config.retries })
}
