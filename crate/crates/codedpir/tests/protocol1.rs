use codedpir::protocol1::*;
use codedpir::rate::{capacity_finite, rat, validate_rate_matrix, rate_protocol1};
use codedpir::{known, BinMatrix, Dss};

fn lambda_3_5() -> codedpir::RateMatrix {
    let lam = BinMatrix::parse(&["11100", "10011", "01011", "01110", "10101"]);
    validate_rate_matrix(&known::good_5_3_2(), &lam).unwrap()
}

#[test]
fn counting_functions() {
    assert_eq!(u_of(1, 3, 5, 2).unwrap(), 1);
    assert_eq!(d_of(0, 3, 5, 2).unwrap(), 3);
    assert_eq!(d_of(1, 3, 5, 2).unwrap(), 5);
    assert_eq!(d_of(0, 3, 5, 1).unwrap(), 1);
    assert_eq!(d_of(2, 2, 3, 3).unwrap() * 3, 27);
    assert_eq!(n_of(1, 3).unwrap(), 2);
    assert!(u_of(2, 3, 5, 2).is_err());
    assert!(d_of(2, 3, 5, 2).is_err());
    // Telescoping D(f−1)·ν = ν^f over a grid, against direct accumulation.
    for kappa in 1..5u64 {
        for nu in kappa + 1..7 {
            for f in 1..5usize {
                assert_eq!(d_of(f - 1, kappa, nu, f).unwrap() * nu, nu.pow(f as u32));
            }
        }
    }
}

#[test]
fn worked_example_schedule() {
    let code = known::good_5_3_2();
    let plan = p1_plan(&code, &lambda_3_5(), 2, 0, 7).unwrap();
    assert_eq!(plan.beta, 25);
    assert_eq!(plan.d(), 24);
    assert_eq!(plan.d() as u64, downloads_per_node(3, 5, 2));
    assert_eq!(plan.total_downloads(), 3 * 40);
    assert_eq!(plan.rate(), rate_protocol1(3, 5, 3, 5, 2).unwrap());
    assert_eq!(plan.rate(), rat(5, 8));
    assert_eq!(plan.rate(), capacity_finite(5, 3, 2));
    // Server 1, repetition 1: rows 1..3 of Y^(1), then rows 1,2,5 of Y^(2), then the two sums.
    let s = &plan.schedule[0];
    let terms: Vec<_> = s[..8].iter().map(|r| r.terms.clone()).collect();
    assert_eq!(
        terms,
        vec![
            vec![(0, 0)], vec![(0, 1)], vec![(0, 2)],
            vec![(1, 0)], vec![(1, 1)], vec![(1, 4)],
            vec![(0, 15), (1, 2)], vec![(0, 20), (1, 3)],
        ]
    );
    // Server 3, repetition 2, round 2: y1_{3·5+4} + y2_{5+2}, y1_{4·5+4} + y2_{5+3}.
    let s3 = &plan.schedule[2];
    assert_eq!(s3[14].terms, vec![(0, 18), (1, 6)]);
    assert_eq!(s3[15].terms, vec![(0, 23), (1, 7)]);
}

#[test]
fn worked_example_round_trip() {
    let code = known::good_5_3_2();
    for seed in 0..50 {
        for m in 0..2 {
            let plan = p1_plan(&code, &lambda_3_5(), 2, m, seed).unwrap();
            let dss = Dss::init(&code, 2, plan.beta, 1, seed).unwrap();
            let resp: Vec<Vec<u64>> = (0..5).map(|j| p1_answer(&dss, j, &plan.queries(j)).unwrap()).collect();
            let x = p1_decode(&plan, &resp, dss.symbol_field()).unwrap();
            assert_eq!(&x, dss.file(m));
        }
    }
}

#[test]
fn symmetry_audit() {
    let code = known::good_5_3_2();
    let mut plan = p1_plan(&code, &lambda_3_5(), 2, 0, 1).unwrap();
    let rep = p1_symmetry_audit(&plan);
    assert!(rep.balanced(), "{:?}", rep.violations);
    let c = &rep.counts[&(0, 0, 1)];
    assert_eq!(c[&vec![0]], 3);
    assert_eq!(c[&vec![1]], 3);
    assert_eq!(rep.counts[&(0, 0, 2)][&vec![0, 1]], 2);
    plan.schedule[3].remove(5);
    assert!(!p1_symmetry_audit(&plan).balanced());
}

#[test]
fn single_file() {
    let code = known::good_5_3_2();
    let plan = p1_plan(&code, &lambda_3_5(), 1, 0, 3).unwrap();
    assert_eq!(plan.d(), 3);
    assert!(plan.schedule.iter().flatten().all(|r| r.kind == SymbolKind::Desired));

    let x = {
        let dss = Dss::init(&code, 1, plan.beta, 1, 3).unwrap();
        let resp: Vec<Vec<u64>> = (0..5).map(|j| p1_answer(&dss, j, &plan.queries(j)).unwrap()).collect();
        (p1_decode(&plan, &resp, dss.symbol_field()).unwrap(), dss.file(0).clone())
    };
    assert_eq!(x.0, x.1);
}

fn round_trip(code: &codedpir::LinearCode, lam: &codedpir::RateMatrix, f: usize, ell: u32, seed: u64) -> P1Plan {
    let mut last = None;
    for m in 0..f {
        let plan = p1_plan(code, lam, f, m, seed).unwrap();
        let dss = Dss::init(code, f, plan.beta, ell, seed + 100).unwrap();
        let resp: Vec<Vec<u64>> = (0..code.n()).map(|j| p1_answer(&dss, j, &plan.queries(j)).unwrap()).collect();
        assert_eq!(&p1_decode(&plan, &resp, dss.symbol_field()).unwrap(), dss.file(m), "f={f} m={m}");
        assert!(p1_symmetry_audit(&plan).balanced());
        last = Some(plan);
    }
    last.unwrap()
}

#[test]
fn bad_code_with_its_lambda() {
    let bad = known::bad_5_3_2();
    let lam = validate_rate_matrix(&bad, &BinMatrix::parse(&["01111", "10011", "11100"])).unwrap();
    assert_eq!((lam.kappa, lam.nu), (2, 3));
    let plan = round_trip(&bad, &lam, 2, 1, 5);
    assert_eq!(plan.d(), 10);
    assert_eq!(plan.rate(), rat(27, 50));
    let plan = round_trip(&bad, &lam, 3, 1, 6);
    assert_eq!(plan.rate(), rate_protocol1(2, 3, 3, 5, 3).unwrap());
}

#[test]
fn more_files_and_extension_symbols() {
    let code = known::good_5_3_2();
    let plan = round_trip(&code, &lambda_3_5(), 3, 1, 9);
    assert_eq!(plan.rate(), capacity_finite(5, 3, 3));
    let plan = round_trip(&code, &lambda_3_5(), 4, 1, 10);
    assert_eq!(plan.d() as u64, downloads_per_node(3, 5, 4));
    round_trip(&code, &lambda_3_5(), 2, 3, 11);
}

#[test]
fn answers_reject_empty_sums_and_guard_stripes() {
    let code = known::good_5_3_2();
    let dss = Dss::init(&code, 1, 5, 1, 0).unwrap();
    assert!(p1_answer(&dss, 0, &[P1Query { terms: vec![] }]).is_err());
    assert_eq!(p1_answer(&dss, 2, &[P1Query { terms: vec![(0, 4)] }]).unwrap(), vec![dss.symbol(0, 4, 2)]);
    assert!(matches!(p1_plan(&code, &lambda_3_5(), 9, 0, 0), Err(P1Error::TooManyStripes(_))));
}
