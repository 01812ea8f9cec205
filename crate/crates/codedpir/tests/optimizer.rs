mod common;

use std::collections::HashSet;

use codedpir::optimizer::*;
use codedpir::protocol2::p2_structure_from_e;
use codedpir::protocol3::p3_setup_from_e;
use codedpir::rate::{beta_d_minimal, capacity_asymptotic, rat};
use codedpir::zoo::rs_code;
use codedpir::{fixtures, known, ErasureMatrix, Field};
use common::{check_solver_vs_brute_force, codewords, correctable_by_enumeration};
use itertools::Itertools;

fn supports(list: &PatternList) -> Vec<Vec<usize>> {
    list.patterns.iter().map(|p| p.support()).collect()
}

#[test]
fn pattern_lists_small_codes() {
    let f8 = Field::new(2, 3).unwrap();
    let mds = rs_code(&f8, 5, 3).unwrap();
    let l = compute_erasure_pattern_list(&mds, 2, DEFAULT_BUDGET, 0);
    assert!(l.exhaustive);
    assert_eq!(l.len(), 10);

    let bad = known::bad_5_3_2();
    let words = codewords(&bad);
    let expected: Vec<Vec<usize>> = (0..5).combinations(2).filter(|s| correctable_by_enumeration(&words, s)).collect();
    let got = supports(&compute_erasure_pattern_list(&bad, 2, DEFAULT_BUDGET, 0));
    assert_eq!(got, expected);
    assert!(got.len() < 10);

    let empty = compute_erasure_pattern_list(&bad, 0, DEFAULT_BUDGET, 0);
    assert_eq!(supports(&empty), vec![Vec::<usize>::new()]);
    assert!(compute_erasure_pattern_list(&bad, 3, DEFAULT_BUDGET, 0).is_empty());
}

#[test]
fn sampled_lists_are_correctable_deduplicated_and_seeded() {
    let code = known::code_12_4_6();
    let words = codewords(&code);
    let a = compute_erasure_pattern_list(&code, 5, 50, 7);
    let b = compute_erasure_pattern_list(&code, 5, 50, 7);
    assert!(!a.exhaustive);
    assert_eq!(a, b);
    assert!(a.len() <= 50 && !a.is_empty());
    let s = supports(&a);
    assert_eq!(s.iter().collect::<HashSet<_>>().len(), s.len());
    assert!(s.iter().all(|p| p.len() == 5 && correctable_by_enumeration(&words, p)));
}

#[test]
fn compute_matrix_on_worked_examples() {
    let code = known::good_5_3_2();
    let lg = compute_erasure_pattern_list(&code, 2, DEFAULT_BUDGET, 0);
    let lnk = compute_erasure_pattern_list(&code, 2, DEFAULT_BUDGET, 0);
    let e = compute_matrix(&lg, &lnk, 3, 2).expect("feasible");
    let s = p2_structure_from_e(&code, &e).unwrap();
    assert_eq!(s.rate(), rat(2, 5));

    let none = PatternList { w: 2, patterns: vec![], exhaustive: true };
    assert!(compute_matrix(&none, &lnk, 3, 2).is_none());

    let f8 = Field::new(2, 3).unwrap();
    let mds = rs_code(&f8, 5, 3).unwrap();
    let l = compute_erasure_pattern_list(&mds, 2, DEFAULT_BUDGET, 0);
    let e = compute_matrix(&l, &l, 3, 2).expect("feasible");
    assert_eq!(e.rate().unwrap(), capacity_asymptotic(5, 3));
    p2_structure_from_e(&mds, &e).unwrap();
}

#[test]
fn optimize_noncolluding() {
    let r = optimize_rate(&known::simplex_7_3_4(), &OptConfig::default()).unwrap();
    assert_eq!(r.rate(), rat(4, 7));
    let r = optimize_rate(&fixtures::code_11_6_4(), &OptConfig::default()).unwrap();
    assert_eq!(r.rate(), rat(5, 11));
    p2_structure_from_e(&fixtures::code_11_6_4(), r.e.as_ref().unwrap()).unwrap();

    // MDS of rate > 1/2: Γ starts at d_min − 1 = n − k, one iteration.
    let f8 = Field::new(2, 3).unwrap();
    let mds = rs_code(&f8, 7, 5).unwrap();
    let r = optimize_rate(&mds, &OptConfig::default()).unwrap();
    assert_eq!(r.iterations(), 1);
    assert_eq!(r.rate(), rat(2, 7));

    let fixed = OptConfig { rule: BetaDRule::Fixed, ..Default::default() };
    let r = optimize_rate(&known::good_5_3_2(), &fixed).unwrap();
    let e = r.e.unwrap();
    assert_eq!((e.d, e.beta), (3, 2));
    assert_eq!(r.gamma, 2);
}

#[test]
fn optimize_colluding() {
    let c = known::code_12_4_6();
    let r = optimize_rate_colluding(&c, &c, &OptConfig::default()).unwrap();
    assert_eq!(r.gamma, 2);
    assert_eq!(r.rate(), rat(1, 6));
    let setup = p3_setup_from_e(&c, &c, r.e.as_ref().unwrap()).unwrap();
    assert_eq!(setup.rate(), rat(1, 6));
    assert_eq!(r.steps.first().unwrap().gamma, 1);

    let r13 = codedpir::zoo::rm_code(1, 3).unwrap();
    let r23 = codedpir::zoo::rm_code(2, 3).unwrap();
    assert!(matches!(optimize_rate_colluding(&r13, &r23, &OptConfig::default()), Err(OptError::RateOneProduct)));
}

#[test]
fn steps_are_consecutive_and_bounded() {
    for code in [known::simplex_7_3_4(), known::good_5_3_2(), known::code_12_4_6(), known::pyramid_7_4()] {
        let r = optimize_rate(&code, &OptConfig::default()).unwrap();
        let start = code.k().min(code.min_distance().unwrap() - 1);
        let gammas: Vec<usize> = r.steps.iter().map(|s| s.gamma).collect();
        assert_eq!(gammas, (start..start + gammas.len()).collect::<Vec<_>>());
        assert!(r.gamma <= code.n() - code.k());
        if let Some(e) = &r.e {
            p2_structure_from_e(&code, e).unwrap();
        }
    }
}

#[test]
fn solver_matches_brute_force_up_to_length_nine() {
    check_solver_vs_brute_force().unwrap();
}

#[test]
fn erasure_matrix_shapes() {
    let r = optimize_rate(&known::simplex_7_3_4(), &OptConfig::default()).unwrap();
    let e: ErasureMatrix = r.e.unwrap();
    let (beta, d) = beta_d_minimal(3, 4);
    assert_eq!((e.beta, e.d), (beta, d));
    assert_eq!(e.ehat.row_regular(), Some(4));
    // Every column is erased β times among the d + β rows.
    let lam = codedpir::rate::e_to_lambda(&e);
    assert_eq!(lam.column_regular(), Some(d));
}
