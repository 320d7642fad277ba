use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rivalkit::eval::eval_validity;
use rivalkit::{
    parse_program, sample, search, Backend, Ctx, Engine, Expr, Interval, Ladder, Outcome, Program, SampleConfig,
    SearchConfig, SearchState,
};
use rivalkit_testkit::gen::{self, VARS};
use rivalkit_testkit::partition;
use rug::Float;

fn engine() -> Engine {
    Engine::default().with_ladder(Ladder::with_max(2560))
}

#[test]
fn weights_are_conserved_and_rectangles_disjoint() {
    let e = engine();
    let config = SearchConfig { iterations: 10, ..SearchConfig::default() };
    let programs = partition::programs(11, 40);
    let r = partition::conservation(&e, &programs, &config, 12);
    assert!(r.ok(), "{:#?}", r.violations);
    assert_eq!(r.searches, 40);
    assert!(r.states > 40 * 2);
}

#[test]
fn independent_weights_agree_with_the_library() {
    for p in partition::programs(13, 20) {
        let s = search(&engine(), &p, &SearchConfig { iterations: 6, ..SearchConfig::default() });
        for r in s.t.iter().chain(&s.f).chain(&s.o) {
            assert_eq!(r.weight(p.target), partition::weight(p.target, r), "{r}");
        }
    }
}

fn in_any(rects: &[rivalkit::Rect], x: &[f64]) -> bool {
    rects.iter().any(|r| r.contains(x))
}

#[test]
fn valid_points_are_never_ruled_out() {
    let e = engine();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut planted = 0;
    for p in partition::programs(15, 40) {
        let s = search(&e, &p, &SearchConfig { iterations: 8, ..partition::keeping() });
        for _ in 0..50 {
            let x: Vec<f64> = VARS.iter().map(|_| p.target.from_f64(gen::value(&mut rng, false))).collect();
            if let Outcome::Valid { .. } = e.ground_truth(&p, &x) {
                planted += 1;
                assert!(!in_any(&s.f, &x), "{p}: valid {x:?} in F");
                assert!(in_any(&s.t, &x) || in_any(&s.o, &x) || in_any(&s.stuck, &x), "{p}: {x:?} lost");
            }
        }
    }
    assert!(planted > 100, "{planted}");
}

#[test]
fn proven_valid_rectangles_only_hold_valid_points() {
    let e = engine();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut checked = 0;
    for p in partition::programs(17, 40) {
        let s = search(&e, &p, &SearchConfig { iterations: 8, ..SearchConfig::default() });
        for r in s.t.iter().take(5) {
            let x: Vec<f64> = r.0.iter().map(|&(lo, hi)| p.target.from_f64(gen::point_in(&mut rng, lo, hi))).collect();
            let out = e.ground_truth(&p, &x);
            assert!(!matches!(out, Outcome::Invalid { .. }), "{p}: {x:?} in {r} is {out:?}");
            checked += 1;
        }
    }
    assert!(checked > 20, "{checked}");
}

fn rect_intervals(r: &rivalkit::Rect) -> Vec<Interval> {
    r.0.iter().map(|&(lo, hi)| Interval::movable(Float::with_val(53, lo), Float::with_val(53, hi))).collect()
}

#[test]
fn stuck_rectangles_stay_stuck_at_double_precision() {
    let e = engine();
    let b = Backend::default();
    let mut programs = partition::programs(18, 60);
    programs.push(parse_program("(FPCore (x y) (/ (pow x y) (+ (pow x y) 2)))").unwrap());
    programs.push(parse_program("(FPCore (x) (/ (exp x) (- (exp x) 1)))").unwrap());
    let mut stuck = 0;
    for p in programs {
        let s = search(&e, &p, &SearchConfig { iterations: 8, ..partition::keeping() });
        assert_eq!(s.warnings.len(), s.stuck.len());
        for r in s.stuck.iter().take(100) {
            stuck += 1;
            let v = eval_validity(&p, &rect_intervals(r), &Ctx::new(&b, 160)).unwrap();
            let all = v.all();
            assert!(
                all.is_false() || all.is_stuck() || v.output.is_stuck(p.target, e.strict_finite),
                "{p} on {r}: {} {all:?}",
                v.output
            );
        }
    }
    assert!(stuck >= 2, "{stuck}");
}

#[test]
fn sampling_is_uniform_across_rectangles() {
    let u = partition::uniformity(19, 1_000_000);
    assert!(u.ok(), "{u:?}");
}

fn two_rect_state() -> (Program, SearchState) {
    let (a, b) = partition::two_rects();
    let p = Program::new(&["x"], Expr::var("x"));
    let state = SearchState {
        target: p.target,
        seeds: vec![rivalkit::Rect::full(1)],
        t: vec![a],
        f: vec![],
        o: vec![b],
        stuck: vec![],
        warnings: vec![],
    };
    (p, state)
}

#[test]
fn samples_are_seeded_and_come_from_the_pool() {
    let e = engine();
    let (p, state) = two_rect_state();
    let config = SampleConfig { seed: 7, ..SampleConfig::default() };
    let (first, stats) = sample(&e, &p, &state, 500, &config).unwrap();
    let (again, _) = sample(&e, &p, &state, 500, &config).unwrap();
    assert_eq!(first, again);
    assert_eq!(stats.accepted, 500);
    let (other, _) = sample(&e, &p, &state, 500, &SampleConfig { seed: 8, ..config }).unwrap();
    assert_ne!(first, other);
    for s in &first {
        assert!(in_any(&state.t, &s.point) || in_any(&state.o, &s.point));
        assert_eq!(s.value, s.point[0]);
    }
}

#[test]
fn empty_searches_are_reported() {
    let e = engine();
    let p = parse_program("(FPCore (x) :pre (and (< x 0) (> x 1)) x)").unwrap();
    let s = search(&e, &p, &SearchConfig::default());
    assert!(s.seeds.is_empty());
    assert!(matches!(sample(&e, &p, &s, 1, &SampleConfig::default()), Err(rivalkit::SampleError::NoValidInputs { .. })));
}
