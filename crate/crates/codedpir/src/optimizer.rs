//! Rate optimization: search for E = (Ê; Ē) with the largest Γ.
//!
//! `compute_matrix` is an exact search. It looks for d rows of ℒ_Γ and β rows of ℒ_{n−k}
//! such that every column is erased exactly β times in total. This is equivalent to the
//! column-weight matching of Ê against 1 − Ē. It runs as a DFS over the most constrained
//! column, with per-column deficit pruning and a memo of dead states. Rows may repeat.

use std::collections::{BTreeSet, HashSet};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{binomial, CodeError, ErasurePattern, LinearCode};
use crate::matrix::Matrix;
use crate::rate::{beta_d_minimal, rat, BinMatrix, ErasureMatrix, Rational};
use crate::rng;

/// Exhaustive enumeration up to this many candidate patterns, sampling beyond.
pub const DEFAULT_BUDGET: u128 = 100_000;
/// Search nodes per `compute_matrix` call before giving up.
pub const DEFAULT_NODE_LIMIT: u64 = 20_000_000;
/// Above this many candidate rows, search random sub-lists instead of the full lists.
pub const DEFAULT_ROW_CAP: usize = 40_000;
pub const DEFAULT_SUBSET_ROUNDS: usize = 8;
const MEMO_LIMIT: usize = 4_000_000;
const MAX_N: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OptError {
    #[error("C∘C̄ is the whole space (k̃ = n)")]
    RateOneProduct,
    #[error("length {0} exceeds the solver's limit of {MAX_N}")]
    TooLong(usize),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternList {
    pub w: usize,
    pub patterns: Vec<ErasurePattern>,
    /// Every correctable weight-w pattern is present.
    pub exhaustive: bool,
}

impl PatternList {
    pub fn len(&self) -> usize {
        self.patterns.len()
    }
    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

fn correctable_parallel(code: &LinearCode, candidates: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let threads = std::thread::available_parallelism().map(|t| t.get()).unwrap_or(1).min(16);
    if candidates.len() < 2048 || threads == 1 {
        return candidates.into_iter().filter(|s| code.support_correctable(s)).collect();
    }
    let chunk = candidates.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = candidates
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().filter(|s| code.support_correctable(s)).cloned().collect_vec()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker")).collect()
    })
}

/// Weight-w patterns correctable by `code`: all of them when C(n,w) ≤ budget, else up to `budget`
/// patterns from draws of w pivot columns of a randomly permuted H plus their correctable
/// cyclic shifts.
pub fn compute_erasure_pattern_list(code: &LinearCode, w: usize, budget: u128, seed: u64) -> PatternList {
    let n = code.n();
    let r = n - code.k();
    if w > r {
        return PatternList { w, patterns: vec![], exhaustive: true };
    }
    if binomial(n, w) <= budget {
        let found = correctable_parallel(code, (0..n).combinations(w).collect());
        let patterns = found.iter().map(|s| ErasurePattern::from_support(n, s)).collect();
        return PatternList { w, patterns, exhaustive: true };
    }
    let mut rng = rng::stream(seed, "pattern-list", w as u64);
    let h = code.parity_check();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut order: Vec<Vec<usize>> = Vec::new();
    let cap = budget.min(usize::MAX as u128) as usize;
    for _ in 0..budget {
        if order.len() >= cap {
            break;
        }
        let chosen = random_correctable(h, w, &mut rng);
        if !seen.insert(chosen.clone()) {
            continue;
        }
        order.push(chosen.clone());
        for t in 1..n {
            let mut shifted: Vec<usize> = chosen.iter().map(|&j| (j + t) % n).collect();
            shifted.sort_unstable();
            if order.len() < cap && !seen.contains(&shifted) && code.support_correctable(&shifted) {
                seen.insert(shifted.clone());
                order.push(shifted);
            }
        }
    }
    let patterns = order.iter().map(|s| ErasurePattern::from_support(n, s)).collect();
    PatternList { w, patterns, exhaustive: false }
}

/// What a bounded search concluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Found(ErasureMatrix),
    Infeasible,
    /// Node limit reached before the search finished.
    Exhausted,
}

fn mask_of(p: &ErasurePattern) -> u128 {
    p.support().iter().fold(0u128, |m, &j| m | (1u128 << j))
}

struct Search {
    n: usize,
    rows: Vec<u128>,
    /// First `split` rows come from ℒ_Γ.
    split: usize,
    picked: Vec<usize>,
    /// States (deficits, rows left) with no completion; the remaining problem depends on nothing else.
    dead: HashSet<(Vec<u8>, usize, usize)>,
    nodes: u64,
    limit: u64,
}

impl Search {
    /// Ok(true) found, Ok(false) infeasible, Err(()) limit.
    fn dfs(&mut self, deficit: &mut [u8], dr: usize, br: usize) -> Result<bool, ()> {
        if dr == 0 && br == 0 {
            return Ok(deficit.iter().all(|&x| x == 0));
        }
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(());
        }
        let remaining = (dr + br) as u8;
        if deficit.iter().any(|&x| x > remaining) {
            return Ok(false);
        }
        let key = (deficit.to_vec(), dr, br);
        if self.dead.contains(&key) {
            return Ok(false);
        }
        let open: u128 = (0..self.n).filter(|&j| deficit[j] > 0).fold(0, |m, j| m | (1u128 << j));
        let fits: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.rows[i] & !open == 0 && if i < self.split { dr > 0 } else { br > 0 })
            .collect();
        // Most constrained column: fewest fitting rows.
        let mut best: Option<(usize, usize)> = None;
        for j in (0..self.n).filter(|&j| deficit[j] > 0) {
            let c = fits.iter().filter(|&&i| self.rows[i] >> j & 1 == 1).count();
            if c == 0 {
                self.remember(key);
                return Ok(false);
            }
            if best.is_none_or(|(_, bc)| c < bc) {
                best = Some((j, c));
            }
        }
        let Some((col, _)) = best else {
            self.remember(key);
            return Ok(false);
        };
        let branch: Vec<usize> = fits.into_iter().filter(|&i| self.rows[i] >> col & 1 == 1).collect();
        for i in branch {
            let m = self.rows[i];
            for j in 0..self.n {
                if m >> j & 1 == 1 {
                    deficit[j] -= 1;
                }
            }
            self.picked.push(i);
            let (ndr, nbr) = if i < self.split { (dr - 1, br) } else { (dr, br - 1) };
            let r = self.dfs(deficit, ndr, nbr);
            for j in 0..self.n {
                if m >> j & 1 == 1 {
                    deficit[j] += 1;
                }
            }
            match r {
                Ok(false) => {
                    self.picked.pop();
                }
                other => return other,
            }
        }
        self.remember(key);
        Ok(false)
    }

    fn remember(&mut self, key: (Vec<u8>, usize, usize)) {
        if self.dead.len() < MEMO_LIMIT {
            self.dead.insert(key);
        }
    }
}

/// Bounded exact search; Ê rows keep the order in which ℒ_Γ lists them, likewise Ē.
pub fn compute_matrix_bounded(lg: &PatternList, lnk: &PatternList, d: usize, beta: usize, limit: u64) -> SearchOutcome {
    let n = match lg.patterns.first().or(lnk.patterns.first()) {
        Some(p) => p.n(),
        None => return SearchOutcome::Infeasible,
    };
    if lg.is_empty() || lnk.is_empty() || n > MAX_N || beta > u8::MAX as usize || lg.w * d + lnk.w * beta != n * beta {
        return SearchOutcome::Infeasible;
    }
    let rows: Vec<u128> = lg.patterns.iter().chain(&lnk.patterns).map(mask_of).collect();
    let mut s = Search {
        n,
        rows,
        split: lg.len(),
        picked: vec![],
        dead: HashSet::new(),
        nodes: 0,
        limit,
    };
    let mut deficit = vec![beta as u8; n];
    match s.dfs(&mut deficit, d, beta) {
        Ok(true) => {
            let mut picked = s.picked.clone();
            picked.sort_unstable();
            let (hat, bar): (Vec<usize>, Vec<usize>) = picked.into_iter().partition(|&i| i < s.split);
            let to_bin = |idx: &[usize], list: &PatternList, off: usize| {
                BinMatrix::new(idx.iter().map(|&i| list.patterns[i - off].bits()).collect())
            };
            SearchOutcome::Found(ErasureMatrix::new(to_bin(&hat, lg, 0), to_bin(&bar, lnk, s.split)))
        }
        Ok(false) => SearchOutcome::Infeasible,
        Err(()) => SearchOutcome::Exhausted,
    }
}

/// d rows of ℒ_Γ over β rows of ℒ_{n−k} with matching column counts, if any exist.
pub fn compute_matrix(lg: &PatternList, lnk: &PatternList, d: usize, beta: usize) -> Option<ErasureMatrix> {
    match compute_matrix_bounded(lg, lnk, d, beta, DEFAULT_NODE_LIMIT) {
        SearchOutcome::Found(e) => Some(e),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BetaDRule {
    /// β = lcm(k,Γ)/k, d = lcm(k,Γ)/Γ.
    #[default]
    Minimal,
    /// β = Γ, d = k.
    Fixed,
}

impl BetaDRule {
    pub fn apply(self, k: usize, gamma: usize) -> (usize, usize) {
        match self {
            BetaDRule::Minimal => beta_d_minimal(k, gamma),
            BetaDRule::Fixed => (gamma, k),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptConfig {
    pub rule: BetaDRule,
    pub budget: u128,
    pub node_limit: u64,
    pub row_cap: usize,
    pub subset_rounds: usize,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            rule: BetaDRule::Minimal,
            budget: DEFAULT_BUDGET,
            node_limit: DEFAULT_NODE_LIMIT,
            row_cap: DEFAULT_ROW_CAP,
            subset_rounds: DEFAULT_SUBSET_ROUNDS,
            seed: rng::DEFAULT_SEED,
        }
    }
}

/// One pass of the main loop.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaStep {
    pub gamma: usize,
    pub beta: usize,
    pub d: usize,
    pub patterns: usize,
    pub exhaustive: bool,
    /// The search ran on random sub-lists, so "infeasible" is not a proof.
    pub subsampled: bool,
    /// "found", "infeasible", "exhausted" or "empty".
    pub outcome: String,
}

#[derive(Debug, Clone)]
pub struct OptResult {
    pub e: Option<ErasureMatrix>,
    pub gamma: usize,
    pub n: usize,
    pub steps: Vec<GammaStep>,
    /// ℒ_{n−k} was complete.
    pub info_list_exhaustive: bool,
}

impl OptResult {
    pub fn rate(&self) -> Rational {
        match self.e {
            Some(_) => rat(self.gamma as u64, self.n as u64),
            None => rat(0, 1),
        }
    }
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }
}

fn main_loop(
    pattern_code: &LinearCode,
    code: &LinearCode,
    start: usize,
    stop: usize,
    cfg: &OptConfig,
) -> Result<OptResult, OptError> {
    let (n, k) = (code.n(), code.k());
    if n > MAX_N {
        return Err(OptError::TooLong(n));
    }
    let lnk = compute_erasure_pattern_list(code, n - k, cfg.budget, cfg.seed);
    let mut res = OptResult { e: None, gamma: start, n, steps: vec![], info_list_exhaustive: lnk.exhaustive };
    for gamma in start.max(1)..=stop {
        let (beta, d) = cfg.rule.apply(k, gamma);
        let lg = compute_erasure_pattern_list(pattern_code, gamma, cfg.budget, cfg.seed ^ 0x9e37);
        let subsampled = lg.len() + lnk.len() > cfg.row_cap;
        let mut step = GammaStep {
            gamma,
            beta,
            d,
            patterns: lg.len(),
            exhaustive: lg.exhaustive,
            subsampled,
            outcome: "empty".into(),
        };
        if lg.is_empty() {
            res.steps.push(step);
            continue;
        }
        let outcome = if subsampled {
            search_subsets(&lg, &lnk, d, beta, cfg, gamma as u64)
        } else {
            compute_matrix_bounded(&lg, &lnk, d, beta, cfg.node_limit)
        };
        match outcome {
            SearchOutcome::Found(e) => {
                step.outcome = "found".into();
                res.e = Some(e);
                res.gamma = gamma;
                res.steps.push(step);
            }
            other => {
                step.outcome = if other == SearchOutcome::Exhausted { "exhausted" } else { "infeasible" }.into();
                res.steps.push(step);
                return Ok(res);
            }
        }
    }
    Ok(res)
}

/// Random sub-lists of at most half the row cap each, a share of the node limit per round.
fn search_subsets(lg: &PatternList, lnk: &PatternList, d: usize, beta: usize, cfg: &OptConfig, tag: u64) -> SearchOutcome {
    let mut rng = rng::stream(cfg.seed, "opt-subsets", tag);
    let half = (cfg.row_cap / 2).max(1);
    let rounds = cfg.subset_rounds.max(1);
    let mut any_exhausted = false;
    for _ in 0..rounds {
        let pick = |list: &PatternList, rng: &mut rand_chacha::ChaCha20Rng| {
            let mut idx: Vec<usize> = (0..list.len()).collect();
            if idx.len() > half {
                idx.shuffle(rng);
                idx.truncate(half);
                idx.sort_unstable();
            }
            PatternList { w: list.w, patterns: idx.iter().map(|&i| list.patterns[i].clone()).collect(), exhaustive: false }
        };
        let (a, b) = (pick(lg, &mut rng), pick(lnk, &mut rng));
        match compute_matrix_bounded(&a, &b, d, beta, cfg.node_limit / rounds as u64) {
            SearchOutcome::Found(e) => return SearchOutcome::Found(e),
            SearchOutcome::Exhausted => any_exhausted = true,
            SearchOutcome::Infeasible => {}
        }
    }
    if any_exhausted {
        SearchOutcome::Exhausted
    } else {
        SearchOutcome::Infeasible
    }
}

/// Largest Γ for which an E exists, starting from Γ = min(k, d_min − 1) and stopping at the
/// first infeasible Γ (or n − k).
pub fn optimize_rate(code: &LinearCode, cfg: &OptConfig) -> Result<OptResult, OptError> {
    let start = code.k().min(code.min_distance()?.saturating_sub(1));
    main_loop(code, code, start, code.n() - code.k(), cfg)
}

/// Colluding variant: Ê rows correctable by C∘C̄, Ē rows complements of information sets of C,
/// Γ from 1 to n − k̃.
pub fn optimize_rate_colluding(code: &LinearCode, cbar: &LinearCode, cfg: &OptConfig) -> Result<OptResult, OptError> {
    let ctilde = code.hadamard(cbar)?;
    if ctilde.k() >= code.n() {
        return Err(OptError::RateOneProduct);
    }
    main_loop(&ctilde, code, 1, code.n() - ctilde.k(), cfg)
}

/// Pattern lists as 0/1 matrices (rows in list order).
pub fn pattern_matrix(list: &PatternList, n: usize) -> BinMatrix {
    if list.is_empty() {
        return BinMatrix::zeros(0, n);
    }
    BinMatrix::new(list.patterns.iter().map(|p| p.bits()).collect())
}

/// Random w-subsets of the pivot columns of a permuted H are always correctable.
pub fn random_correctable(h: &Matrix, w: usize, rng: &mut impl Rng) -> Vec<usize> {
    let n = h.cols();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let (_, pivots) = h.select_columns(&perm).rref();
    let mut s: Vec<usize> = pivots.choose_multiple(rng, w.min(pivots.len())).map(|&p| perm[p]).collect();
    s.sort_unstable();
    s
}
