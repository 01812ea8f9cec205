//! Protocol 1: the file-dependent scheme built on a rate matrix Λ_{κ,ν}. β = ν^f stripes,
//! κ repetitions of f rounds each; round r downloads sums over r files.
//!
//! Row indices below are 0-based rows of the interleaved arrays Y^(m) (y_t = c_{π_m(t)}).
//! The requested file plays the role of "file 1"; the other files, in ascending order,
//! fill the subsets ℳ.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{binomial, CodeError, ErasurePattern, LinearCode};
use crate::dss::Dss;
use crate::matrix::Matrix;
use crate::rate::{interference_matrices, rat, validate_rate_matrix, InterferencePair, RateMatrix, RateViolation, Rational};
use crate::rng;

/// Refuse plans with more stripes than this.
pub const MAX_STRIPES: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum P1Error {
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("invalid rate matrix: {0}")]
    InvalidLambda(RateViolation),
    #[error("κ = ν: no undesired symbols to exploit")]
    KappaEqualsNu,
    #[error("β = ν^f = {0} stripes exceeds the memory guard")]
    TooManyStripes(u128),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("decode failure: {0}")]
    DecodeFailure(String),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// U(ℓ) = Σ_{h=1}^{ℓ} κ^{f−h−1}(ν−κ)^{h−1}; U(0) = 0.
pub fn u_of(l: usize, kappa: u64, nu: u64, f: usize) -> Result<u64, P1Error> {
    if l + 1 > f.max(1) {
        return Err(P1Error::OutOfRange(format!("U({l}) needs ℓ ≤ f−1 = {}", f.saturating_sub(1))));
    }
    Ok((1..=l).map(|h| kappa.pow((f - h - 1) as u32) * (nu - kappa).pow((h - 1) as u32)).sum())
}

/// D(ℓ) = κ^{f−1} + Σ_{h=1}^{ℓ} C(f−1,h) κ^{f−h−1}(ν−κ)^h.
pub fn d_of(l: usize, kappa: u64, nu: u64, f: usize) -> Result<u64, P1Error> {
    if f == 0 || l > f - 1 {
        return Err(P1Error::OutOfRange(format!("D({l}) needs ℓ ≤ f−1")));
    }
    let tail: u64 = (1..=l)
        .map(|h| binomial(f - 1, h) as u64 * kappa.pow((f - h - 1) as u32) * (nu - kappa).pow(h as u32))
        .sum();
    Ok(kappa.pow((f - 1) as u32) + tail)
}

/// N(ℓ) = C(f−1, ℓ).
pub fn n_of(l: usize, f: usize) -> Result<u64, P1Error> {
    if f == 0 || l > f - 1 {
        return Err(P1Error::OutOfRange(format!("N({l}) needs ℓ ≤ f−1")));
    }
    Ok(binomial(f - 1, l) as u64)
}

/// Per-node download count d = κ(ν^f − κ^f)/(ν − κ).
pub fn downloads_per_node(kappa: u64, nu: u64, f: usize) -> u64 {
    kappa * (nu.pow(f as u32) - kappa.pow(f as u32)) / (nu - kappa)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymbolKind {
    Desired,
    Undesired,
}

/// One scheduled symbol-sum request, with the user-side labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct P1Request {
    pub repetition: usize,
    /// 1-based round number; every sum in round r has r terms.
    pub round: usize,
    pub kind: SymbolKind,
    /// Files in the sum, ascending.
    pub subset: Vec<usize>,
    /// (file, row of Y^(file)) pairs.
    pub terms: Vec<(usize, usize)>,
}

impl P1Request {
    /// (ℳ, row) of the aligned sum this request carries: all non-requested terms, which share a row.
    fn interference(&self, m: usize) -> Option<(Vec<usize>, usize)> {
        let others: Vec<(usize, usize)> = self.terms.iter().copied().filter(|&(file, _)| file != m).collect();
        let row = others.first()?.1;
        Some((others.iter().map(|t| t.0).collect(), row))
    }
}

/// What a node sees: coefficient-one sums of (file, stored row) symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct P1Query {
    pub terms: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct P1Plan {
    pub code: LinearCode,
    pub lam: RateMatrix,
    pub ab: InterferencePair,
    pub f: usize,
    pub m: usize,
    pub beta: usize,
    /// π_m: Y^(m) row t is stored row perm[m][t].
    pub perm: Vec<Vec<usize>>,
    /// Per node, in protocol order.
    pub schedule: Vec<Vec<P1Request>>,
    /// Per node, position p of the sent list carries schedule[node][order[node][p]].
    pub order: Vec<Vec<usize>>,
}

/// Subsets of `items` of the given size, colexicographic.
fn colex_subsets(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut subsets: Vec<Vec<usize>> = items.iter().copied().combinations(size).collect();
    subsets.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    subsets
}

pub fn p1_plan(code: &LinearCode, lam: &RateMatrix, f: usize, m: usize, seed: u64) -> Result<P1Plan, P1Error> {
    let lam = validate_rate_matrix(code, &lam.lam).map_err(P1Error::InvalidLambda)?;
    if f == 0 || m >= f {
        return Err(P1Error::OutOfRange(format!("file {m} of {f}")));
    }
    let (kappa, nu, n) = (lam.kappa, lam.nu, code.n());
    if kappa == nu {
        return Err(P1Error::KappaEqualsNu);
    }
    let beta128 = (nu as u128).checked_pow(f as u32).unwrap_or(u128::MAX);
    if beta128 > MAX_STRIPES as u128 {
        return Err(P1Error::TooManyStripes(beta128));
    }
    let beta = beta128 as usize;
    let (k64, nu64) = (kappa as u64, nu as u64);
    let ab = interference_matrices(&lam);
    let others: Vec<usize> = (0..f).filter(|&x| x != m).collect();
    let u = |l: usize| u_of(l, k64, nu64, f).expect("ℓ in range") as usize;
    let dd = |l: usize| d_of(l, k64, nu64, f).expect("ℓ in range") as usize;
    let u_top = if f >= 2 { u(f - 1) } else { 0 };
    let pow_k = kappa.pow((f - 1) as u32);

    let mut schedule: Vec<Vec<P1Request>> = vec![Vec::new(); n];
    for (j, sched) in schedule.iter_mut().enumerate() {
        for i in 0..kappa {
            let a_ij = ab.a[i][j];
            for round in 1..=f {
                // Desired symbols.
                if round == 1 {
                    for s in 0..pow_k {
                        sched.push(P1Request {
                            repetition: i,
                            round,
                            kind: SymbolKind::Desired,
                            subset: vec![m],
                            terms: vec![(m, pow_k * a_ij + s)],
                        });
                    }
                } else {
                    let l = round - 1;
                    let mut t = 0usize;
                    for subset in colex_subsets(&others, l) {
                        for uu in u(l - 1)..u(l) {
                            let base = i * u_top + uu;
                            for h in 0..nu - kappa {
                                let row = base * nu + ab.b[h][j];
                                let mut terms = vec![(m, (dd(l - 1) + t) * nu + a_ij)];
                                terms.extend(subset.iter().map(|&x| (x, row)));
                                terms.sort_unstable();
                                let mut full = subset.clone();
                                full.push(m);
                                full.sort_unstable();
                                sched.push(P1Request { repetition: i, round, kind: SymbolKind::Desired, subset: full, terms });
                                t += 1;
                            }
                        }
                    }
                }
                // Undesired symbols (sums over `round` non-requested files).
                if round < f {
                    for subset in colex_subsets(&others, round) {
                        for uu in u(round - 1)..u(round) {
                            let base = i * u_top + uu;
                            for h in 0..kappa {
                                let row = base * nu + ab.a[h][j];
                                sched.push(P1Request {
                                    repetition: i,
                                    round,
                                    kind: SymbolKind::Undesired,
                                    subset: subset.clone(),
                                    terms: subset.iter().map(|&x| (x, row)).collect(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    let perm = (0..f)
        .map(|file| {
            let mut p: Vec<usize> = (0..beta).collect();
            p.shuffle(&mut rng::stream(seed, "p1-stripe-perm", file as u64));
            p
        })
        .collect();
    let order = schedule
        .iter()
        .enumerate()
        .map(|(j, s)| {
            let mut o: Vec<usize> = (0..s.len()).collect();
            o.shuffle(&mut rng::stream(seed, "p1-node-shuffle", j as u64));
            o
        })
        .collect();
    Ok(P1Plan { code: code.clone(), lam, ab, f, m, beta, perm, schedule, order })
}

impl P1Plan {
    /// Node-visible queries for `node`, in sent (shuffled) order.
    pub fn queries(&self, node: usize) -> Vec<P1Query> {
        self.order[node]
            .iter()
            .map(|&p| P1Query {
                terms: self.schedule[node][p].terms.iter().map(|&(file, t)| (file, self.perm[file][t])).collect(),
            })
            .collect()
    }

    /// Downloads per node, counted from the schedule.
    pub fn d(&self) -> usize {
        self.schedule.first().map_or(0, |s| s.len())
    }

    pub fn total_downloads(&self) -> usize {
        self.schedule.iter().map(|s| s.len()).sum()
    }

    /// βk / (total downloads), from actual counts.
    pub fn rate(&self) -> Rational {
        rat((self.beta * self.code.k()) as u64, self.total_downloads() as u64)
    }
}

/// Node `node` answers its queries from what it stores.
pub fn p1_answer(dss: &Dss, node: usize, queries: &[P1Query]) -> Result<Vec<u64>, P1Error> {
    let fld = dss.symbol_field();
    queries
        .iter()
        .map(|q| {
            if q.terms.is_empty() {
                return Err(P1Error::BadRequest("empty file subset".into()));
            }
            q.terms.iter().try_fold(0u64, |acc, &(file, row)| {
                if file >= dss.f() || row >= dss.beta() {
                    return Err(P1Error::BadRequest(format!("(file {file}, row {row}) not stored")));
                }
                Ok(fld.add(acc, dss.symbol(file, row, node)))
            })
        })
        .collect()
}

fn fill(code: &LinearCode, fld: &crate::Field, known: &[Option<u64>]) -> Result<Vec<u64>, P1Error> {
    let erased = ErasurePattern::from_mask(known.iter().map(|x| x.is_none()).collect());
    let word: Vec<u64> = known.iter().map(|x| x.unwrap_or(0)).collect();
    code.decode_erasures(fld, &word, &erased)
        .map_err(|e| P1Error::DecodeFailure(format!("{e}")))
}

/// Recover X^(m) from all responses (`responses[node]` in sent order).
pub fn p1_decode(plan: &P1Plan, responses: &[Vec<u64>], fld: &crate::Field) -> Result<Matrix, P1Error> {
    let n = plan.code.n();
    if responses.len() != n || (0..n).any(|j| responses[j].len() != plan.schedule[j].len()) {
        return Err(P1Error::DecodeFailure("response shape does not match the plan".into()));
    }
    // Back into protocol order.
    let mut answers = vec![Vec::new(); n];
    for j in 0..n {
        let mut a = vec![0u64; responses[j].len()];
        for (p, &slot) in plan.order[j].iter().enumerate() {
            a[slot] = responses[j][p];
        }
        answers[j] = a;
    }

    // Aligned sums of non-requested files, keyed by (ℳ, row).
    let mut aligned: HashMap<(Vec<usize>, usize), Vec<Option<u64>>> = HashMap::new();
    for j in 0..n {
        for (req, &v) in plan.schedule[j].iter().zip(&answers[j]) {
            if req.kind == SymbolKind::Undesired {
                let key = (req.subset.clone(), req.terms[0].1);
                aligned.entry(key).or_insert_with(|| vec![None; n])[j] = Some(v);
            }
        }
    }
    let mut decoded_aligned: HashMap<(Vec<usize>, usize), Vec<u64>> = HashMap::new();
    for (key, known) in aligned {
        decoded_aligned.insert(key, fill(&plan.code, fld, &known)?);
    }

    // Desired symbols with side information cancelled.
    let mut stripes: HashMap<usize, Vec<Option<u64>>> = HashMap::new();
    for j in 0..n {
        for (req, &v) in plan.schedule[j].iter().zip(&answers[j]) {
            if req.kind != SymbolKind::Desired {
                continue;
            }
            let row = req.terms.iter().find(|t| t.0 == plan.m).expect("requested term").1;
            let value = match req.interference(plan.m) {
                None => v,
                Some(key) => {
                    let side = decoded_aligned
                        .get(&key)
                        .ok_or_else(|| P1Error::DecodeFailure(format!("no side information for {key:?}")))?;
                    fld.sub(v, side[j])
                }
            };
            let slot = stripes.entry(row).or_insert_with(|| vec![None; n]);
            if slot[j].is_some() {
                return Err(P1Error::DecodeFailure(format!("stripe {row} coordinate {j} downloaded twice")));
            }
            slot[j] = Some(value);
        }
    }
    if stripes.len() != plan.beta {
        return Err(P1Error::DecodeFailure(format!("{} of {} stripes covered", stripes.len(), plan.beta)));
    }

    let info = plan.code.pivot_information_set();
    let k = plan.code.k();
    let mut x = Matrix::zeros(fld, plan.beta, k);
    for (t, known) in stripes {
        let word = fill(&plan.code, fld, &known)?;
        let msg = plan.code.unencode_from(fld, &info, &info.iter().map(|&c| word[c]).collect_vec())?;
        let stored = plan.perm[plan.m][t];
        for (c, &s) in msg.iter().enumerate() {
            x.set(stored, c, s);
        }
    }
    Ok(x)
}

/// Request counts per (node, repetition, round), keyed by the file subset of each sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryReport {
    pub counts: BTreeMap<(usize, usize, usize), BTreeMap<Vec<usize>, usize>>,
    /// Per node, how many terms touch each file.
    pub file_frequency: Vec<Vec<usize>>,
    pub violations: Vec<String>,
}

impl SymmetryReport {
    pub fn balanced(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every round of every repetition at every node must request each size-r subset of files
/// equally often, identically across nodes; per node, every file is touched equally often.
pub fn p1_symmetry_audit(plan: &P1Plan) -> SymmetryReport {
    let f = plan.f;
    let mut counts: BTreeMap<(usize, usize, usize), BTreeMap<Vec<usize>, usize>> = BTreeMap::new();
    let mut file_frequency = vec![vec![0usize; f]; plan.schedule.len()];
    for (j, sched) in plan.schedule.iter().enumerate() {
        for req in sched {
            *counts.entry((j, req.repetition, req.round)).or_default().entry(req.subset.clone()).or_default() += 1;
            for &(file, _) in &req.terms {
                file_frequency[j][file] += 1;
            }
        }
    }
    let mut violations = Vec::new();
    let nodes = plan.schedule.len();
    let reps = plan.lam.kappa;
    for j in 0..nodes {
        for i in 0..reps {
            for r in 1..=f {
                let c = counts.get(&(j, i, r));
                let per: Vec<usize> = (0..f)
                    .combinations(r)
                    .map(|s| c.and_then(|c| c.get(&s)).copied().unwrap_or(0))
                    .collect();
                if per.iter().any(|&x| x != per[0]) {
                    violations.push(format!("node {j}, repetition {i}, round {r}: subset counts {per:?}"));
                }
                let reference = counts.get(&(0, i, r));
                if j > 0 && c != reference {
                    violations.push(format!("node {j}, repetition {i}, round {r}: differs from node 0"));
                }
            }
        }
        if file_frequency[j].iter().any(|&x| x != file_frequency[j][0]) {
            violations.push(format!("node {j}: file frequencies {:?}", file_frequency[j]));
        }
    }
    SymmetryReport { counts, file_frequency, violations }
}
