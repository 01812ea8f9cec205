//! Independent oracles shared by the integration tests: GF(2) bitmask linear algebra,
//! brute-force enumerations, and the property checks built on them.
#![allow(dead_code)]

use std::collections::HashSet;

use codedpir::optimizer::{compute_erasure_pattern_list, compute_matrix_bounded, SearchOutcome, DEFAULT_BUDGET};
use codedpir::protocol2::p2_structure_from_e;
use codedpir::rate::beta_d_minimal;
use codedpir::zoo::{cyclic_code, rm_code, rs_code, uuv_code, uuv_square_dim_bound};
use codedpir::{known, ErasurePattern, Field, LinearCode, Matrix};
use itertools::Itertools;
use rand::Rng;

/// GF(2) rank of bit vectors.
pub fn rank(rows: impl IntoIterator<Item = u16>) -> usize {
    let mut basis = [0u16; 16];
    let mut r = 0;
    for mut v in rows {
        while v != 0 {
            let b = 15 - v.leading_zeros() as usize;
            if basis[b] == 0 {
                basis[b] = v;
                r += 1;
                break;
            }
            v ^= basis[b];
        }
    }
    r
}

pub fn mask(set: &[usize]) -> u16 {
    set.iter().fold(0, |m, &j| m | 1 << j)
}

/// Systematic [I_k | A] with A packed row-major in `a`.
pub fn systematic(n: usize, k: usize, a: u32) -> Vec<u16> {
    let w = n - k;
    (0..k).map(|i| (1u16 << i) | ((((a >> (i * w)) & ((1 << w) - 1)) as u16) << k)).collect()
}

/// [Aᵀ | I_{n−k}] for the systematic generator above.
pub fn systematic_dual(n: usize, k: usize, g: &[u16]) -> Vec<u16> {
    (0..n - k)
        .map(|j| (0..k).filter(|&i| g[i] >> (k + j) & 1 == 1).fold(1u16 << (k + j), |m, i| m | 1 << i))
        .collect()
}

pub fn span(g: &[u16]) -> Vec<u16> {
    (0..1u32 << g.len())
        .map(|c| (0..g.len()).filter(|&i| c >> i & 1 == 1).fold(0, |w, i| w ^ g[i]))
        .collect()
}

pub fn dmin(g: &[u16]) -> usize {
    span(g).iter().filter(|&&w| w != 0).map(|w| w.count_ones() as usize).min().unwrap_or(usize::MAX)
}

pub fn to_code(n: usize, g: &[u16]) -> LinearCode {
    let f = Field::binary();
    LinearCode::from_generator(Matrix::from_fn(&f, g.len(), n, |i, j| (g[i] >> j & 1) as u64)).unwrap()
}

pub fn to_masks(code: &LinearCode) -> Vec<u16> {
    (0..code.k())
        .map(|i| (0..code.n()).filter(|&j| code.generator().get(i, j) == 1).fold(0, |m, j| m | 1 << j))
        .collect()
}

/// Visit every systematic binary generator of length 2..=max_n; returns the count.
///
/// Every code is equivalent to a systematic one under a coordinate permutation, so for
/// permutation-invariant properties this covers all binary codes.
pub fn each_systematic(max_n: usize, mut visit: impl FnMut(usize, usize, &[u16])) -> usize {
    let mut count = 0;
    for n in 2..=max_n {
        for k in 1..n {
            for a in 0..1u32 << (k * (n - k)) {
                visit(n, k, &systematic(n, k, a));
                count += 1;
            }
        }
    }
    count
}

pub fn codewords(code: &LinearCode) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    code.for_each_codeword(|w| out.push(w.to_vec())).unwrap();
    out
}

/// A pattern is correctable iff no nonzero codeword lives inside it.
pub fn correctable_by_enumeration(words: &[Vec<u64>], support: &[usize]) -> bool {
    words.iter().all(|w| w.iter().all(|&x| x == 0) || (0..w.len()).any(|j| w[j] != 0 && !support.contains(&j)))
}

pub fn small_codes() -> Vec<LinearCode> {
    let f4 = Field::new(2, 2).unwrap();
    let f8 = Field::new(2, 3).unwrap();
    let f3 = Field::new(3, 1).unwrap();
    vec![
        known::good_5_3_2(),
        known::bad_5_3_2(),
        known::simplex_7_3_4(),
        known::pyramid_7_4(),
        cyclic_code(&Field::binary(), 7, &[1, 1, 0, 1]).unwrap(),
        rm_code(1, 3).unwrap(),
        rm_code(2, 4).unwrap(),
        rs_code(&f4, 3, 2).unwrap(),
        rs_code(&f8, 6, 3).unwrap(),
        rs_code(&f3, 3, 2).unwrap(),
        LinearCode::from_generator(Matrix::from_rows(&f3, &[vec![1, 0, 1, 2], vec![0, 1, 1, 1]]).unwrap()).unwrap(),
    ]
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Every (n−d+1)-set contains an information set; exhaustive over binary codes, n ≤ max_n.
pub fn check_proposition_1(max_n: usize) -> Result<usize, String> {
    let mut err = None;
    let count = each_systematic(max_n, |n, k, g| {
        if err.is_some() {
            return;
        }
        let d = dmin(g);
        for s in (0..n).combinations(n - d + 1) {
            let m = mask(&s);
            if rank(g.iter().map(|r| r & m)) != k {
                err = Some(format!("n={n} g={g:?} set={s:?}"));
                return;
            }
        }
    });
    err.map_or(Ok(count), Err)
}

/// I information set of C ⇔ its complement is one of the dual; exhaustive, n ≤ max_n.
pub fn check_proposition_2(max_n: usize) -> Result<usize, String> {
    let mut err = None;
    let count = each_systematic(max_n, |n, k, g| {
        if err.is_some() {
            return;
        }
        let h = systematic_dual(n, k, g);
        if !g.iter().all(|&x| h.iter().all(|&y| (x & y).count_ones() % 2 == 0)) {
            err = Some(format!("dual not orthogonal for {g:?}"));
            return;
        }
        let full = (1u16 << n) - 1;
        for s in (0..n).combinations(k) {
            let m = mask(&s);
            let info = rank(g.iter().map(|r| r & m)) == k;
            let dual_info = rank(h.iter().map(|r| r & full & !m)) == n - k;
            if info != dual_info {
                err = Some(format!("n={n} g={g:?} set={s:?}"));
                return;
            }
        }
    });
    err.map_or(Ok(count), Err)
}

/// Both propositions through the library's own routines, on small codes over several fields.
pub fn check_propositions_library() -> Result<(), String> {
    for code in small_codes() {
        let (n, k) = (code.n(), code.k());
        let d = code.min_distance().map_err(|e| e.to_string())?;
        for s in (0..n).combinations(n - d + 1) {
            let hit = s.iter().combinations(k).any(|i| code.is_information_set(&i.into_iter().copied().collect_vec()));
            ensure(hit, || format!("[{n},{k}] set {s:?} has no information set"))?;
        }
        let dual = code.dual();
        for s in (0..n).combinations(k) {
            let rest = (0..n).filter(|j| !s.contains(j)).collect_vec();
            ensure(code.is_information_set(&s) == dual.is_information_set(&rest), || format!("[{n},{k}] {s:?}"))?;
        }
    }
    Ok(())
}

/// |I ∩ χ(D)| ≥ s for every information set I and every s-dim subcode D (binary, k ≤ 5).
pub fn check_lemma_3() -> Result<usize, String> {
    let mut checked = 0;
    for code in small_codes().into_iter().filter(|c| c.field().order() == 2 && c.k() <= 5) {
        let n = code.n();
        let g = to_masks(&code);
        let words: Vec<u16> = span(&g).into_iter().filter(|&w| w != 0).collect();
        let infos: Vec<u16> = (0..n).combinations(code.k()).filter(|i| code.is_information_set(i)).map(|i| mask(&i)).collect();
        for s in 1..=code.k().min(3) {
            for pick in words.iter().combinations(s) {
                if rank(pick.iter().copied().copied()) != s {
                    continue;
                }
                let chi = pick.iter().fold(0u16, |m, &&w| m | w);
                for &i in &infos {
                    ensure((i & chi).count_ones() as usize >= s, || format!("[{n},{}] I={i:b} χ={chi:b}", code.k()))?;
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

/// Generalized weight via s-subsets of codewords (span checked by rank).
pub fn ghw_oracle(code: &LinearCode, s: usize) -> usize {
    let words: Vec<Vec<u64>> = codewords(code).into_iter().filter(|w| w.iter().any(|&x| x != 0)).collect();
    let f = code.field();
    let mut best = usize::MAX;
    for pick in words.iter().combinations(s) {
        let supp = (0..code.n()).filter(|&j| pick.iter().any(|w| w[j] != 0)).count();
        if supp >= best {
            continue;
        }
        let m = Matrix::from_rows(f, &pick.iter().map(|w| w.to_vec()).collect_vec()).unwrap();
        if m.rank() == s {
            best = supp;
        }
    }
    best
}

/// d_1 < d_2 < … < d_k ≤ n, d_1 = d_min, and agreement with the oracle where cheap.
pub fn check_ghw() -> Result<(), String> {
    for code in small_codes() {
        let h = code.weight_hierarchy().map_err(|e| e.to_string())?;
        ensure(h.len() == code.k(), || format!("hierarchy length {h:?}"))?;
        ensure(h.windows(2).all(|w| w[0] < w[1]), || format!("not strict: {h:?}"))?;
        ensure(*h.last().unwrap() <= code.n(), || format!("d_k > n: {h:?}"))?;
        ensure(h[0] == code.min_distance().unwrap(), || "d_1 ≠ d_min".into())?;
        if (code.field().order() as u128).pow(code.k() as u32) <= 256 {
            for s in 1..=code.k().min(3) {
                let o = ghw_oracle(&code, s);
                ensure(h[s - 1] == o, || format!("d_{s} = {} vs oracle {o}", h[s - 1]))?;
            }
        }
    }
    Ok(())
}

pub fn random_code(field: &Field, n: usize, k: usize, rng: &mut impl Rng) -> LinearCode {
    loop {
        let g = Matrix::from_fn(field, k, n, |_, _| rng.gen_range(0..field.order()));
        if g.rank() == k {
            return LinearCode::from_generator(g).unwrap();
        }
    }
}

/// Encode, erase a random pattern, overwrite the erased symbols with noise, decode.
pub fn check_decode_round_trip(cases: usize, seed: u64) -> Result<usize, String> {
    let mut rng = codedpir::rng::stream(seed, "decode-oracle", 0);
    let mut correctable = 0;
    for _ in 0..cases {
        let q = [2u64, 3, 4, 8][rng.gen_range(0..4)];
        let field = Field::from_order(q).unwrap();
        let n = rng.gen_range(3..10);
        let k = rng.gen_range(1..n);
        let code = random_code(&field, n, k, &mut rng);
        let msg: Vec<u64> = (0..k).map(|_| rng.gen_range(0..q)).collect();
        let word = code.encode(&field, &msg).unwrap();
        let erased = ErasurePattern::from_mask((0..n).map(|_| rng.gen_bool(0.4)).collect());
        let mut damaged = word.clone();
        for j in erased.support() {
            damaged[j] = rng.gen_range(0..q);
        }
        // oracle: correctable iff no nonzero codeword inside the pattern
        if q.pow(k as u32) <= 1 << 16 {
            let oracle = correctable_by_enumeration(&codewords(&code), &erased.support());
            ensure(code.erasure_correctable(&erased) == oracle, || format!("correctability disagrees: {erased:?}"))?;
        }
        match code.decode_erasures(&field, &damaged, &erased) {
            Ok(w) => {
                ensure(w == word, || format!("wrong decode over GF({q})"))?;
                correctable += 1;
            }
            Err(_) => ensure(!code.erasure_correctable(&erased), || "correctable pattern not decoded".into())?,
        }
    }
    Ok(correctable)
}

/// All column-count vectors of `times` rows drawn with repetition from `rows`.
fn reachable(rows: &[Vec<u8>], n: usize, times: usize) -> HashSet<Vec<u8>> {
    let mut cur: HashSet<Vec<u8>> = [vec![0u8; n]].into_iter().collect();
    for _ in 0..times {
        let mut next = HashSet::new();
        for v in &cur {
            for r in rows {
                next.insert(v.iter().zip(r).map(|(a, b)| a + b).collect::<Vec<u8>>());
            }
        }
        cur = next;
    }
    cur
}

/// Is there an erasure matrix with d weight-Γ correctable rows and β information-set
/// complements whose column counts agree?
pub fn brute_force_feasible(code: &LinearCode, gamma: usize, d: usize, beta: usize) -> bool {
    let n = code.n();
    let words = codewords(code);
    let hat: Vec<Vec<u8>> = (0..n)
        .combinations(gamma)
        .filter(|s| correctable_by_enumeration(&words, s))
        .map(|s| (0..n).map(|j| s.contains(&j) as u8).collect())
        .collect();
    // Information sets: complements of correctable (n−k)-patterns.
    let info: Vec<Vec<u8>> = (0..n)
        .combinations(n - code.k())
        .filter(|s| correctable_by_enumeration(&words, s))
        .map(|s| (0..n).map(|j| !s.contains(&j) as u8).collect())
        .collect();
    if hat.is_empty() || info.is_empty() {
        return false;
    }
    let a = reachable(&hat, n, d);
    let b = reachable(&info, n, beta);
    a.intersection(&b).next().is_some()
}

/// The exact solver agrees with brute force on random binary codes, n ≤ 9.
/// Returns (instances checked, feasible instances).
pub fn check_solver_vs_brute_force() -> Result<(usize, usize), String> {
    let mut rng = codedpir::rng::stream(2024, "solver-oracle", 0);
    let field = Field::binary();
    let (mut checked, mut feasible) = (0, 0);
    for n in 4..=9 {
        for k in 2..n - 1 {
            for _ in 0..3 {
                let code = random_code(&field, n, k, &mut rng);
                for gamma in 1..=(n - k) {
                    let (beta, d) = beta_d_minimal(k, gamma);
                    if beta + d > 9 {
                        continue;
                    }
                    let lg = compute_erasure_pattern_list(&code, gamma, DEFAULT_BUDGET, 0);
                    let lnk = compute_erasure_pattern_list(&code, n - k, DEFAULT_BUDGET, 0);
                    let oracle = brute_force_feasible(&code, gamma, d, beta);
                    match compute_matrix_bounded(&lg, &lnk, d, beta, u64::MAX) {
                        SearchOutcome::Found(e) => {
                            ensure(oracle, || format!("spurious solution n={n} k={k} Γ={gamma}"))?;
                            p2_structure_from_e(&code, &e).map_err(|e| e.to_string())?;
                            feasible += 1;
                        }
                        SearchOutcome::Infeasible => ensure(!oracle, || format!("missed a solution n={n} k={k} Γ={gamma}"))?,
                        SearchOutcome::Exhausted => return Err("budget exhausted with an unlimited budget".into()),
                    }
                    checked += 1;
                }
            }
        }
    }
    ensure(checked > 100 && feasible > 20 && feasible < checked, || format!("{checked} {feasible}"))?;
    Ok((checked, feasible))
}

/// dim((U|U+V)∘(U|U+V)) from the definition: span of all pairwise products of the
/// generator rows (u|u) and (0|1).
pub fn square_dim(n1: usize, u: &[u16]) -> usize {
    let mut rows: Vec<u16> = u.iter().map(|&r| r | r << n1).collect();
    rows.push(((1u16 << n1) - 1) << n1);
    let products = (0..rows.len()).flat_map(|i| (i..rows.len()).map(move |j| (i, j))).map(|(i, j)| rows[i] & rows[j]);
    rank(products)
}

pub struct UuvSummary {
    pub codes: usize,
    pub library_checked: usize,
    /// (n₁,k₁) pairs where some U attains the bound.
    pub tight: usize,
}

/// Every binary U with n₁ ≤ 8, 1 ≤ k₁ ≤ n₁−2 (systematic representatives; the square's
/// dimension is permutation invariant): the bound holds and the square is not the whole space.
pub fn check_uuv_bound() -> Result<UuvSummary, String> {
    let mut s = UuvSummary { codes: 0, library_checked: 0, tight: 0 };
    for n1 in 3..=8 {
        for k1 in 1..=n1 - 2 {
            let w = n1 - k1;
            let bound = uuv_square_dim_bound(n1, k1);
            let pairs = k1 * (k1 - 1) / 2;
            let expected = if w <= pairs { k1 + n1 + 1 } else { 2 * k1 + pairs + 1 };
            ensure(bound == expected, || format!("bound formula n1={n1} k1={k1}"))?;
            let mut worst = 0;
            for a in 0..1u32 << (k1 * w) {
                let u = systematic(n1, k1, a);
                let dim = square_dim(n1, &u);
                ensure(dim <= bound, || format!("n1={n1} k1={k1} U={u:?}: {dim} > {bound}"))?;
                ensure(dim < 2 * n1, || format!("full square for U={u:?}"))?;
                worst = worst.max(dim);
                s.codes += 1;
                if a % 997 == 0 {
                    let c = uuv_code(&to_code(n1, &u)).map_err(|e| e.to_string())?;
                    ensure((c.n(), c.k()) == (2 * n1, k1 + 1), || "uuv shape".into())?;
                    let lib = c.hadamard(&c).map_err(|e| e.to_string())?.k();
                    ensure(lib == dim, || format!("library square {lib} vs oracle {dim}"))?;
                    s.library_checked += 1;
                }
            }
            if worst == bound {
                s.tight += 1;
            }
        }
    }
    ensure(s.codes > 150_000 && s.library_checked > 100, || format!("coverage {} {}", s.codes, s.library_checked))?;
    Ok(s)
}
