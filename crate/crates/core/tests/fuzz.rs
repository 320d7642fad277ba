//! Randomized soundness, weak completeness and movability checks. The
//! acceptance suite runs the same checks with more cases.

use rivalkit_testkit::fuzz;

#[test]
fn soundness() {
    let r = fuzz::soundness(1, 4000);
    assert_eq!(r.violations, 0, "{r}");
    assert!(r.skipped * 10 < r.checks, "{r}");
}

#[test]
fn weak_completeness() {
    let r = fuzz::completeness(2, 1000);
    assert_eq!(r.violations, 0, "{r}");
}

#[test]
fn movability() {
    let r = fuzz::movability(3, 4000);
    assert_eq!(r.violations, 0, "{r}");
}
