use hasse_core::family::{self, AnalyzeOptions, Verdict};
use hasse_core::threedescent::SelmerMethod;

#[test]
fn h19_end_to_end() {
    let r = family::analyze(19, &AnalyzeOptions::default()).unwrap();
    assert!(r.hasse_violation);
    assert_eq!(r.verdict, Verdict::HasseViolation);
    assert_eq!(r.selmer_psi.method, SelmerMethod::CasselsBounds);
    assert_eq!((r.selmer_psi.order, r.selmer_psi.dual_order), (9, 1));
    assert_eq!(r.cubics.len(), 9);
    assert!(r.cubics.iter().all(|c| c.smooth && c.local.solvable));
    assert_eq!(r.sha_classes.len(), 8);
    assert_eq!(r.tamagawa_products(), [16, 16, 48]);
    let text = r.render_text();
    for line in ["rank: 0", "Sel^(psi) order: 9", "verdict: HASSE_VIOLATION"] {
        assert!(text.lines().any(|l| l.trim() == line), "missing {line:?} in\n{text}");
    }
}

// -821 is the one negative sieve value that still gives a violation, with a
// Selmer group of order 3 decided class by class
#[test]
fn h_minus_821_decided_by_local_solvability() {
    let r = family::analyze(-821, &AnalyzeOptions::default()).unwrap();
    assert_eq!(r.selmer_psi.method, SelmerMethod::LocalSolvability);
    assert_eq!(r.selmer_psi.order, 3);
    assert_eq!(r.verdict, Verdict::HasseViolation);
}
