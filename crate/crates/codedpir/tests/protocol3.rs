use std::collections::BTreeMap;

use codedpir::protocol2::{ascending_assignment, P2Error};
use codedpir::protocol3::*;
use codedpir::rate::rat;
use codedpir::zoo::rm_code;
use codedpir::{known, BinMatrix, Dss, Field, LinearCode, Matrix};

/// [12,4,6] code with C̄ = C, Ê rows {9,12} and {2,3}, I₁ = {2,3,9,12} (1-based).
fn colluding_example() -> P3Setup {
    let c = known::code_12_4_6();
    let ehat = BinMatrix::from_supports(12, &[vec![8, 11], vec![1, 2]]);
    p3_setup(&c, &c, &ehat, &[vec![1, 2, 8, 11]]).unwrap()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn codewords(code: &LinearCode) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    code.for_each_codeword(|w| out.push(w.to_vec())).unwrap();
    out
}

fn round_trip(setup: &P3Setup, f: usize, m: usize, seed: u64, ell: u32) {
    let dss = Dss::init(&setup.code, f, setup.beta(), ell, seed ^ 0x5eed).unwrap();
    let session = p3_queries(setup, f, m, seed).unwrap();
    let resp = p3_respond(&dss, &session.queries).unwrap();
    assert_eq!(resp.iter().map(|r| r.len()).sum::<usize>(), setup.code.n() * setup.d());
    let x = p3_decode(setup, &session, &resp, dss.symbol_field()).unwrap();
    assert_eq!(&x, dss.file(m), "f={f} m={m} seed={seed} ell={ell}");
}

#[test]
fn colluding_example_parameters() {
    let s = colluding_example();
    assert_eq!((s.gamma(), s.beta(), s.d()), (2, 1, 2));
    assert_eq!(s.ctilde.k(), 10);
    assert!(s.ctilde.same_code(&LinearCode::from_parity_check(known::square_12_10_2_parity()).unwrap()));
    assert_eq!(s.rate(), rat(1, 6));
    assert_eq!(s.rate(), s.rate_upper_bound());
    assert_eq!(s.baseline_rate().unwrap(), rat(1, 12));

    // T from a direct enumeration of the dual: the smallest nonzero weight, minus one.
    let dual = LinearCode::from_generator(s.cbar.parity_check().clone()).unwrap();
    let dmin = codewords(&dual).iter().map(|w| w.iter().filter(|&&x| x != 0).count()).filter(|&w| w > 0).min();
    assert_eq!(dmin, Some(3));
    assert_eq!(s.t, 2);
}

#[test]
fn printed_parity_check_isolates_wanted_symbols() {
    let s = colluding_example();
    let h = known::square_12_10_2_parity();
    for seed in 0..10 {
        let dss = Dss::init(&s.code, 1, 1, 2, seed).unwrap();
        let session = p3_queries(&s, 1, 0, seed).unwrap();
        let resp = p3_respond(&dss, &session.queries).unwrap();
        let fld = dss.symbol_field();
        let rho1: Vec<u64> = resp.iter().map(|r| r[0]).collect();
        assert_eq!(h.mul_vec(fld, &rho1).unwrap(), vec![dss.symbol(0, 0, 8), dss.symbol(0, 0, 11)]);
        // Second subquery: the printed H has columns 2,3 = (1,1),(1,0).
        let rho2: Vec<u64> = resp.iter().map(|r| r[1]).collect();
        let (c2, c3) = (dss.symbol(0, 0, 1), dss.symbol(0, 0, 2));
        assert_eq!(h.mul_vec(fld, &rho2).unwrap(), vec![fld.add(c2, c3), c2]);
    }
}

#[test]
fn colluding_example_round_trip() {
    let s = colluding_example();
    for seed in 0..20 {
        for f in 1..=3 {
            for m in 0..f {
                round_trip(&s, f, m, seed, 1 + (seed % 3) as u32);
            }
        }
    }
}

/// Joint distribution of one subquery at a set of nodes, over every choice of the βf codewords.
fn view_distribution(s: &P3Setup, f: usize, m: usize, nodes: &[usize], shared: bool) -> BTreeMap<Vec<u64>, usize> {
    let fld = s.cbar.field().clone();
    let words = codewords(&s.cbar);
    let n = s.code.n();
    let mut dist = BTreeMap::new();
    let mut choice = vec![0usize; f];
    loop {
        let block = Matrix::from_fn(&fld, f, n, |r, c| words[choice[r]][c]);
        let blocks = if shared {
            vec![block; s.d()]
        } else {
            let mut b = vec![Matrix::zeros(&fld, f, n); s.d()];
            b[0] = block;
            b
        };
        let sess = p3_queries_from(s, f, m, blocks, ascending_assignment(&s.structure)).unwrap();
        let mut key: Vec<u64> = nodes.iter().flat_map(|&l| sess.queries[l].q.row(0).to_vec()).collect();
        if shared {
            key.extend(nodes.iter().flat_map(|&l| sess.queries[l].q.row(1).to_vec()));
        }
        *dist.entry(key).or_insert(0) += 1;
        let mut r = 0;
        while r < f {
            choice[r] += 1;
            if choice[r] < words.len() {
                break;
            }
            choice[r] = 0;
            r += 1;
        }
        if r == f {
            return dist;
        }
    }
}

#[test]
fn any_two_nodes_see_the_same_distribution() {
    let s = colluding_example();
    let f = 2;
    for a in 0..12 {
        for b in a + 1..12 {
            let d0 = view_distribution(&s, f, 0, &[a, b], false);
            let d1 = view_distribution(&s, f, 1, &[a, b], false);
            assert_eq!(d0, d1, "nodes {a},{b}");
        }
    }
    // Some three nodes can tell the files apart.
    let leaks = (0..12).any(|a| {
        (a + 1..12).any(|b| {
            (b + 1..12).any(|c| view_distribution(&s, f, 0, &[a, b, c], false) != view_distribution(&s, f, 1, &[a, b, c], false))
        })
    });
    assert!(leaks);
}

#[test]
fn one_draw_for_all_subqueries_leaks_to_a_single_node() {
    let s = colluding_example();
    // Node 9 (1-based) is accessed by subquery 1 only; with shared codewords the two rows differ by ω_m.
    assert_ne!(view_distribution(&s, 2, 0, &[8], true), view_distribution(&s, 2, 1, &[8], true));
}

#[test]
fn setup_rejections() {
    let c = known::code_12_4_6();
    // {1,2} (1-based) is correctable by C but not by C∘C̄.
    let ehat = BinMatrix::from_supports(12, &[vec![0, 1], vec![2, 3]]);
    assert!(c.support_correctable(&[0, 1]));
    assert!(matches!(
        p3_setup(&c, &c, &ehat, &[vec![0, 1, 2, 3]]),
        Err(P3Error::StructureViolation(P2Error::C2Violation { row: 0, .. }))
    ));
    let r13 = rm_code(1, 3).unwrap();
    let r23 = rm_code(2, 3).unwrap();
    let any = BinMatrix::from_supports(8, &[vec![0]]);
    assert!(matches!(p3_setup(&r13, &r23, &any, &[vec![0, 1, 2, 4]]), Err(P3Error::RateOneProduct)));
    assert!(matches!(p3_rm_max_rate(1, 2, 3), Err(P3Error::RateOneProduct)));
}

#[test]
fn reed_muller_max_rate() {
    for (v, vbar, m) in [(1, 1, 3), (1, 1, 4), (0, 1, 3), (1, 2, 4), (1, 1, 5)] {
        let rm = p3_rm_max_rate(v, vbar, m).unwrap();
        let n = 1usize << m;
        let kt: usize = (0..=v + vbar).map(|i| binomial(m, i)).sum();
        let k: usize = (0..=v).map(|i| binomial(m, i)).sum();
        assert_eq!(rm.setup.ctilde.k(), kt);
        assert_eq!(rm.setup.rate(), rat((n - kt) as u64, n as u64), "R({v},{m}) with R({vbar},{m})");
        assert_eq!(rm.setup.rate(), rm.setup.rate_upper_bound());
        assert_eq!((rm.setup.d(), rm.setup.beta()), (k, n - kt));
        assert_eq!(rm.lam.nrows(), k + n - kt);
        assert!(validate_max_rate_matrix(&rm.setup.code, &rm.setup.cbar, &rm.lam).unwrap().valid());
        // T = 2^(v̄+1) − 1 since R(v̄,m)⊥ = R(m−v̄−1,m).
        assert_eq!(rm.setup.t, (1 << (vbar + 1)) - 1);
    }
    assert_eq!(p3_rm_max_rate(1, 1, 3).unwrap().setup.rate(), rat(1, 8));
    assert_eq!(p3_rm_max_rate(1, 1, 4).unwrap().setup.rate(), rat(5, 16));
    // [32,6] with itself: [32,16,8] square, rate 1/2.
    let c14 = p3_rm_max_rate(1, 1, 5).unwrap();
    assert_eq!(c14.setup.ctilde.min_distance().unwrap(), 8);
    assert_eq!(c14.setup.rate(), rat(1, 2));
}

#[test]
fn reed_muller_round_trip() {
    for (v, vbar, m) in [(1, 1, 3), (1, 1, 4), (0, 1, 4)] {
        let rm = p3_rm_max_rate(v, vbar, m).unwrap();
        for seed in 0..5 {
            round_trip(&rm.setup, 2, (seed % 2) as usize, seed, 1 + (seed % 2) as u32);
        }
    }
}

#[test]
fn max_rate_validation_flags_bad_rows() {
    let rm = p3_rm_max_rate(1, 1, 4).unwrap();
    let mut rows = rm.lam.rows().to_vec();
    rows.swap(0, rm.lam.nrows() - 1);
    let swapped = BinMatrix::new(rows);
    let report = validate_max_rate_matrix(&rm.setup.code, &rm.setup.cbar, &swapped).unwrap();
    assert!(report.column_regular);
    assert!(!report.valid());
    assert!(report.bad_product_rows.contains(&0));
}

#[test]
fn necessary_condition_on_known_pairs() {
    let c = known::code_12_4_6();
    let rep = necessary_condition_p3(&c, &c).unwrap();
    assert!(rep.pass, "{rep:?}");
    let r = rm_code(1, 4).unwrap();
    assert!(necessary_condition_p3(&r, &r).unwrap().pass);
    // MDS pair with k̃ = n − 1: bound s(n−k̃)/k ≤ d_s holds; always passes.
    let fld = Field::new(13, 1).unwrap();
    let rs = codedpir::zoo::rs_code(&fld, 12, 4).unwrap();
    let rs2 = codedpir::zoo::rs_code(&fld, 12, 2).unwrap();
    assert!(necessary_condition_p3(&rs, &rs2).unwrap().pass);
}
