//! End-to-end runs over a simulated storage system, empirical privacy audits, and the
//! table reproduction report.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::code::{CodeError, LinearCode};
use crate::dss::{Dss, DssError};
use crate::fixtures::{Fixture, Reproduce};
use crate::matrix::Matrix;
use crate::optimizer::{optimize_rate, optimize_rate_colluding, OptConfig, OptError};
use crate::protocol1::{p1_answer, p1_decode, p1_plan, p1_symmetry_audit, P1Error};
use crate::protocol2::{ascending_assignment, p2_decode, p2_queries, p2_queries_from, p2_respond, p2_structure_from_e, P2Error, P2Structure};
use crate::protocol3::{
    collusion_threshold, p3_decode, p3_queries, p3_queries_from, p3_respond, p3_rm_max_rate, p3_setup_from_e, rate_upper_bound, P3Error,
    P3Setup,
};
use crate::rate::{capacity_asymptotic, lambda_generic, rat, render, to_f64, ErasureMatrix, RateError, RateMatrix, Rational};
use crate::rng;
use crate::zoo::ZooError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    P1(#[from] P1Error),
    #[error(transparent)]
    P2(#[from] P2Error),
    #[error(transparent)]
    P3(#[from] P3Error),
    #[error(transparent)]
    Dss(#[from] DssError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Optimizer(#[from] OptError),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error(transparent)]
    Rate(#[from] RateError),
    #[error("bad configuration: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolTag {
    P1,
    P2,
    P3,
}

/// A protocol together with everything it needs besides the stored data.
#[derive(Debug, Clone)]
pub enum Scheme {
    P1(RateMatrix),
    P2(P2Structure),
    P3(P3Setup),
}

impl Scheme {
    pub fn tag(&self) -> ProtocolTag {
        match self {
            Scheme::P1(_) => ProtocolTag::P1,
            Scheme::P2(_) => ProtocolTag::P2,
            Scheme::P3(_) => ProtocolTag::P3,
        }
    }

    /// Stripes the storage must hold for `f` files.
    pub fn beta(&self, code: &LinearCode, f: usize) -> Result<usize, HarnessError> {
        Ok(match self {
            Scheme::P1(lam) => p1_plan(code, lam, f, 0, 0)?.beta,
            Scheme::P2(s) => s.beta(),
            Scheme::P3(s) => s.beta(),
        })
    }

    fn code<'a>(&'a self, fallback: &'a LinearCode) -> &'a LinearCode {
        match self {
            Scheme::P1(_) => fallback,
            Scheme::P2(s) => &s.code,
            Scheme::P3(s) => &s.code,
        }
    }
}

/// What one node was sent: symbol sums for Protocol 1, a query matrix otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeQueries {
    Sums(Vec<Vec<(usize, usize)>>),
    Matrix(Vec<Vec<u64>>),
}

/// Default scheme for a code: the generic Λ for Protocol 1, the optimizer's matrix for
/// Protocols 2 and 3 (Protocol 3 queries with `query`, or the storage code itself).
pub fn build_scheme(
    tag: ProtocolTag,
    code: &LinearCode,
    query: Option<&LinearCode>,
    cfg: &OptConfig,
) -> Result<Scheme, HarnessError> {
    let none = || HarnessError::BadConfig("optimizer found no scheme".into());
    Ok(match tag {
        ProtocolTag::P1 => Scheme::P1(lambda_generic(code, cfg.seed)?),
        ProtocolTag::P2 => {
            let e = optimize_rate(code, cfg)?.e.ok_or_else(none)?;
            Scheme::P2(p2_structure_from_e(code, &e)?)
        }
        ProtocolTag::P3 => {
            let cbar = query.unwrap_or(code);
            let e = optimize_rate_colluding(code, cbar, cfg)?.e.ok_or_else(none)?;
            Scheme::P3(p3_setup_from_e(code, cbar, &e)?)
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub protocol: ProtocolTag,
    pub n: usize,
    pub k: usize,
    pub f: usize,
    pub m: usize,
    pub beta: usize,
    pub ell: u32,
    pub seed: u64,
    pub queries: Vec<NodeQueries>,
    pub responses: Vec<Vec<u64>>,
    /// β·k requested symbols.
    pub file_symbols: usize,
    /// Symbols actually returned, over all nodes.
    pub downloads: usize,
    /// `file_symbols/downloads`, reduced.
    pub rate: String,
    pub stored_digest: String,
    pub decoded_digest: String,
    pub recovered: bool,
}

impl Transcript {
    pub fn rate(&self) -> Rational {
        rat(self.file_symbols as u64, self.downloads as u64)
    }
}

fn digest(x: &Matrix) -> String {
    rng::digest_symbols(&x.to_rows().concat())
}

/// One retrieval of file `m` from `dss`, with the rate taken from what was downloaded.
pub fn run(scheme: &Scheme, dss: &Dss, m: usize, seed: u64) -> Result<Transcript, HarnessError> {
    let f = dss.f();
    let fld = dss.symbol_field();
    let (queries, responses, decoded) = match scheme {
        Scheme::P1(lam) => {
            let plan = p1_plan(dss.code(), lam, f, m, seed)?;
            if plan.beta != dss.beta() {
                return Err(HarnessError::BadConfig(format!("plan needs β = {}, storage has {}", plan.beta, dss.beta())));
            }
            let qs: Vec<_> = (0..dss.n()).map(|j| plan.queries(j)).collect();
            let resp = qs.iter().enumerate().map(|(j, q)| p1_answer(dss, j, q)).collect::<Result<Vec<_>, _>>()?;
            let x = p1_decode(&plan, &resp, fld)?;
            (qs.into_iter().map(|q| NodeQueries::Sums(q.into_iter().map(|s| s.terms).collect())).collect(), resp, x)
        }
        Scheme::P2(s) => {
            let session = p2_queries(s, f, m, seed)?;
            let resp = p2_respond(dss, &session.queries)?;
            let x = p2_decode(s, &session, &resp, fld)?;
            (session.queries.iter().map(|q| NodeQueries::Matrix(q.q.to_rows())).collect(), resp, x)
        }
        Scheme::P3(s) => {
            let session = p3_queries(s, f, m, seed)?;
            let resp = p3_respond(dss, &session.queries)?;
            let x = p3_decode(s, &session, &resp, fld)?;
            (session.queries.iter().map(|q| NodeQueries::Matrix(q.q.to_rows())).collect(), resp, x)
        }
    };
    let file_symbols = dss.beta() * dss.code().k();
    let downloads = responses.iter().map(|r| r.len()).sum();
    let rate = rat(file_symbols as u64, downloads as u64);
    Ok(Transcript {
        protocol: scheme.tag(),
        n: dss.n(),
        k: dss.code().k(),
        f,
        m,
        beta: dss.beta(),
        ell: fld.alpha() / dss.code().field().alpha(),
        seed,
        queries,
        responses,
        file_symbols,
        downloads,
        rate: rate.to_string(),
        stored_digest: digest(dss.file(m)),
        decoded_digest: digest(&decoded),
        recovered: &decoded == dss.file(m),
    })
}

/// Fresh random storage sized for the scheme, then one run.
pub fn simulate(scheme: &Scheme, code: &LinearCode, f: usize, m: usize, ell: u32, seed: u64) -> Result<Transcript, HarnessError> {
    let code = scheme.code(code);
    let beta = scheme.beta(code, f)?;
    let dss_seed = rng::stream(seed, "dss-files", 0).next_u64();
    let dss = Dss::init(code, f, beta, ell, dss_seed)?;
    run(scheme, &dss, m, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum AuditMode {
    /// Enumerate all query randomness; distributions must be identical.
    Exact,
    /// Chi-square homogeneity across requested files, per (set, position).
    Statistical { trials: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetAudit {
    pub set: Vec<usize>,
    /// Exact mode: number of enumerated draws per file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<u64>,
    /// Statistical mode: smallest p-value over positions, and where.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst_position: Option<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrivacyReport {
    pub protocol: ProtocolTag,
    pub mode: AuditMode,
    pub f: usize,
    /// Number of hypothesis tests, and the per-test level after Bonferroni.
    pub tests: usize,
    pub alpha: f64,
    pub sets: Vec<SetAudit>,
    /// Protocol 1 only: the schedule's subset and file-frequency balance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry_balanced: Option<bool>,
    pub pass: bool,
}

impl PrivacyReport {
    pub fn failing_sets(&self) -> Vec<&SetAudit> {
        self.sets.iter().filter(|s| !s.pass).collect()
    }
}

pub const AUDIT_LEVEL: f64 = 0.01;
const EXACT_LIMIT: u128 = 1 << 22;
const CATEGORY_LIMIT: usize = 1 << 16;

/// Every `size`-subset of the `n` nodes.
pub fn all_sets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(size).collect()
}

/// Collusion sets a scheme is meant to withstand: all single nodes for Protocols 1–2,
/// all T-sets for Protocol 3.
pub fn legal_sets(scheme: &Scheme, n: usize) -> Vec<Vec<usize>> {
    match scheme {
        Scheme::P3(s) => all_sets(n, s.t.min(n)),
        _ => all_sets(n, 1),
    }
}

/// Per node, the observed symbols of one query draw.
fn observe(scheme: &Scheme, code: &LinearCode, f: usize, m: usize, seed: u64) -> Result<Vec<Vec<u64>>, HarnessError> {
    Ok(match scheme {
        // The file subset of each sent sum, as a bit mask.
        Scheme::P1(lam) => {
            let plan = p1_plan(code, lam, f, m, seed)?;
            (0..code.n())
                .map(|j| plan.queries(j).iter().map(|q| q.terms.iter().fold(0u64, |acc, t| acc | 1 << t.0)).collect())
                .collect()
        }
        Scheme::P2(s) => p2_queries(s, f, m, seed)?.queries.iter().map(|q| q.q.to_rows().concat()).collect(),
        Scheme::P3(s) => p3_queries(s, f, m, seed)?.queries.iter().map(|q| q.q.to_rows().concat()).collect(),
    })
}

/// Chi-square homogeneity p-value for per-file category counts (rows = files).
fn homogeneity_p(table: &[Vec<u32>]) -> f64 {
    let cats: Vec<usize> = (0..table[0].len()).filter(|&c| table.iter().any(|r| r[c] > 0)).collect();
    if cats.len() < 2 || table.len() < 2 {
        return 1.0;
    }
    let row_tot: Vec<f64> = table.iter().map(|r| cats.iter().map(|&c| r[c] as f64).sum()).collect();
    let total: f64 = row_tot.iter().sum();
    let mut stat = 0.0;
    for &c in &cats {
        let col: f64 = table.iter().map(|r| r[c] as f64).sum();
        for (r, row) in table.iter().enumerate() {
            let e = row_tot[r] * col / total;
            let o = row[c] as f64;
            stat += (o - e) * (o - e) / e;
        }
    }
    let df = ((table.len() - 1) * (cats.len() - 1)) as f64;
    ChiSquared::new(df).map(|d| d.sf(stat)).unwrap_or(0.0)
}

/// Privacy audit of the queries for up to `f` files against the given collusion sets.
///
/// The stored data never enters the queries, so no storage is needed.
pub fn privacy_audit(
    scheme: &Scheme,
    code: &LinearCode,
    f: usize,
    sets: &[Vec<usize>],
    mode: AuditMode,
    seed: u64,
) -> Result<PrivacyReport, HarnessError> {
    let code = scheme.code(code);
    let n = code.n();
    if f < 2 {
        return Err(HarnessError::BadConfig("privacy needs at least two files".into()));
    }
    if let Some(s) = sets.iter().find(|s| s.is_empty() || s.iter().any(|&j| j >= n)) {
        return Err(HarnessError::BadConfig(format!("collusion set {s:?} for n = {n}")));
    }
    let symmetry_balanced = match scheme {
        Scheme::P1(lam) => Some((0..f).all(|m| p1_plan(code, lam, f, m, seed).map(|p| p1_symmetry_audit(&p).balanced()).unwrap_or(false))),
        _ => None,
    };
    let (tests, set_audits) = match mode {
        AuditMode::Exact => (sets.len(), exact_audit(scheme, f, sets)?),
        AuditMode::Statistical { trials } => statistical_audit(scheme, code, f, sets, trials, seed)?,
    };
    let alpha = AUDIT_LEVEL / tests.max(1) as f64;
    let sets: Vec<SetAudit> = set_audits
        .into_iter()
        .map(|mut s| {
            if let Some(p) = s.min_p {
                s.pass = p > alpha;
            }
            s
        })
        .collect();
    let pass = sets.iter().all(|s| s.pass) && symmetry_balanced != Some(false);
    Ok(PrivacyReport { protocol: scheme.tag(), mode, f, tests, alpha, sets, symmetry_balanced, pass })
}

fn statistical_audit(
    scheme: &Scheme,
    code: &LinearCode,
    f: usize,
    sets: &[Vec<usize>],
    trials: usize,
    seed: u64,
) -> Result<(usize, Vec<SetAudit>), HarnessError> {
    if trials < 1000 {
        return Err(HarnessError::BadConfig(format!("{trials} trials; the statistical audit needs at least 1000")));
    }
    // obs[m][node][position][trial], compacted to u16 symbols.
    let mut obs: Vec<Vec<Vec<Vec<u16>>>> = Vec::with_capacity(f);
    let mut alphabet = 0u64;
    for m in 0..f {
        let mut per_node: Vec<Vec<Vec<u16>>> = Vec::new();
        for t in 0..trials {
            let s = rng::stream(seed, "audit-trial", (m * trials + t) as u64).next_u64();
            let view = observe(scheme, code, f, m, s)?;
            if per_node.is_empty() {
                per_node = view.iter().map(|v| vec![Vec::with_capacity(trials); v.len()]).collect();
            }
            for (j, v) in view.iter().enumerate() {
                for (p, &x) in v.iter().enumerate() {
                    alphabet = alphabet.max(x + 1);
                    per_node[j][p].push(u16::try_from(x).map_err(|_| HarnessError::BadConfig("symbol alphabet too large".into()))?);
                }
            }
        }
        obs.push(per_node);
    }
    // Re-index P1 subset masks densely.
    if matches!(scheme, Scheme::P1(_)) {
        let mut index: HashMap<u16, u16> = HashMap::new();
        for x in obs.iter_mut().flatten().flatten().flatten() {
            let next = index.len() as u16;
            *x = *index.entry(*x).or_insert(next);
        }
        alphabet = index.len() as u64;
    }
    let alphabet = alphabet as usize;
    let positions = obs[0][0].len();
    let mut tests = 0;
    let mut out = Vec::with_capacity(sets.len());
    let mut cat = vec![0usize; trials];
    for set in sets {
        let cats = alphabet
            .checked_pow(set.len() as u32)
            .filter(|&c| c <= CATEGORY_LIMIT)
            .ok_or_else(|| HarnessError::BadConfig(format!("{alphabet}^{} categories", set.len())))?;
        let mut min_p = 1.0f64;
        let mut worst = 0;
        for p in 0..positions {
            let mut table = vec![vec![0u32; cats]; f];
            for (m, row) in table.iter_mut().enumerate() {
                cat.iter_mut().for_each(|c| *c = 0);
                for &j in set {
                    for (c, &x) in cat.iter_mut().zip(&obs[m][j][p]) {
                        *c = *c * alphabet + x as usize;
                    }
                }
                for &c in &cat {
                    row[c] += 1;
                }
            }
            let pv = homogeneity_p(&table);
            if pv < min_p {
                min_p = pv;
                worst = p;
            }
            tests += 1;
        }
        out.push(SetAudit { set: set.clone(), draws: None, min_p: Some(min_p), worst_position: Some(worst), pass: true });
    }
    Ok((tests, out))
}

/// Mixed-radix counter over `len` digits in 0..radix; false once it wraps.
fn advance(digits: &mut [u64], radix: u64) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn exact_audit(scheme: &Scheme, f: usize, sets: &[Vec<usize>]) -> Result<Vec<SetAudit>, HarnessError> {
    // histograms[m][set] : view → count
    let mut hist: Vec<Vec<HashMap<Vec<u64>, u64>>> = vec![vec![HashMap::new(); sets.len()]; f];
    let mut draws = 0u64;
    let mut record = |m: usize, views: &[Vec<u64>]| {
        for (si, set) in sets.iter().enumerate() {
            let key: Vec<u64> = set.iter().flat_map(|&j| views[j].iter().copied()).collect();
            *hist[m][si].entry(key).or_insert(0) += 1;
        }
    };
    match scheme {
        Scheme::P1(_) => return Err(HarnessError::BadConfig("exact mode covers Protocols 2 and 3".into())),
        // Every U.
        Scheme::P2(s) => {
            let fld = s.code.field().clone();
            let (rows, cols) = (s.d(), s.beta() * f);
            check_enumerable(fld.order(), rows * cols)?;
            for m in 0..f {
                let mut digits = vec![0u64; rows * cols];
                loop {
                    let u = Matrix::from_fn(&fld, rows, cols, |r, c| digits[r * cols + c]);
                    let sess = p2_queries_from(s, f, m, u, ascending_assignment(s))?;
                    let views: Vec<Vec<u64>> = sess.queries.iter().map(|q| q.q.to_rows().concat()).collect();
                    record(m, &views);
                    if m == 0 {
                        draws += 1;
                    }
                    if !advance(&mut digits, fld.order()) {
                        break;
                    }
                }
            }
        }
        // Subqueries draw independently, so it is enough to compare one subquery's view,
        // enumerating its βf codewords; the other subqueries are held at zero.
        Scheme::P3(s) => {
            let fld = s.cbar.field().clone();
            let mut words = Vec::new();
            s.cbar.for_each_codeword(|w| words.push(w.to_vec()))?;
            let rows = s.beta() * f;
            let n = s.code.n();
            check_enumerable(words.len() as u64, rows)?;
            for sub in 0..s.d() {
                for m in 0..f {
                    let mut choice = vec![0u64; rows];
                    loop {
                        let mut blocks = vec![Matrix::zeros(&fld, rows, n); s.d()];
                        blocks[sub] = Matrix::from_fn(&fld, rows, n, |r, c| words[choice[r] as usize][c]);
                        let sess = p3_queries_from(s, f, m, blocks, ascending_assignment(&s.structure))?;
                        let views: Vec<Vec<u64>> = sess
                            .queries
                            .iter()
                            .map(|q| std::iter::once(sub as u64).chain(q.q.row(sub).iter().copied()).collect())
                            .collect();
                        record(m, &views);
                        if m == 0 {
                            draws += 1;
                        }
                        if !advance(&mut choice, words.len() as u64) {
                            break;
                        }
                    }
                }
            }
        }
    }
    Ok(sets
        .iter()
        .enumerate()
        .map(|(si, set)| SetAudit {
            set: set.clone(),
            draws: Some(draws),
            min_p: None,
            worst_position: None,
            pass: (1..f).all(|m| hist[m][si] == hist[0][si]),
        })
        .collect())
}

fn check_enumerable(radix: u64, digits: usize) -> Result<(), HarnessError> {
    let total = (radix as u128).checked_pow(digits as u32);
    match total {
        Some(t) if t <= EXACT_LIMIT => Ok(()),
        _ => Err(HarnessError::BadConfig(format!("{radix}^{digits} draws is too many to enumerate"))),
    }
}

/// Tolerance for comparing exact rates with printed 4-decimal values.
pub const RENDER_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Default)]
pub struct TableOptions {
    pub opt: OptConfig,
    /// Also retrieve a file with the found scheme.
    pub round_trip: bool,
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub fixture: Fixture,
    pub d_min: usize,
    /// Table I: minimum distance of C shortened onto its pivot information set.
    pub d_min_prime: Option<usize>,
    pub t: Option<usize>,
    pub r_non_opt: Rational,
    pub r_opt: Option<Rational>,
    /// C_∞ (noncolluding) or R_UB (colluding).
    pub bound: Rational,
    pub c_lb: Option<Rational>,
    pub policy: String,
    pub e: Option<ErasureMatrix>,
    /// The found scheme passed its protocol's structure checks.
    pub validated: bool,
    pub recovered: Option<bool>,
    pub mismatches: Vec<String>,
    pub elapsed: Duration,
}

impl TableRow {
    pub fn matches(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn render(&self) -> String {
        let r = |x: &Rational| render(x, 4);
        let opt = |x: &Option<Rational>| x.as_ref().map_or("-".to_string(), r);
        format!(
            "{:<4} {:<3} [{},{}] d={} d'={} T={} R_non-opt={} R_opt={} bound={} C_LB={} policy={} {} ({:.2?})",
            self.fixture.id,
            self.fixture.table,
            self.fixture.n,
            self.fixture.k,
            self.d_min,
            self.d_min_prime.map_or("-".into(), |d| d.to_string()),
            self.t.map_or("-".into(), |t| t.to_string()),
            r(&self.r_non_opt),
            opt(&self.r_opt),
            r(&self.bound),
            opt(&self.c_lb),
            self.policy,
            if self.matches() { "MATCH".to_string() } else { format!("MISMATCH {:?}", self.mismatches) },
            self.elapsed,
        )
    }
}

fn d_over_n(d: usize, n: usize) -> Rational {
    rat(d.saturating_sub(1) as u64, n as u64)
}

/// Minimum distance of the code whose parity-check matrix is the non-identity part of a
/// systematic H, i.e. C shortened onto the pivot information set.
pub fn shortened_distance(code: &LinearCode) -> Result<Option<usize>, CodeError> {
    let info = code.pivot_information_set();
    let rest: Vec<usize> = (0..code.n()).filter(|j| !info.contains(j)).collect();
    let short = code.shorten(&info, &rest)?;
    Ok(if short.k() == 0 { None } else { Some(short.min_distance()?) })
}

fn off(what: &str, got: Option<f64>, want: f64) -> Option<String> {
    match got {
        Some(g) if (g - want).abs() < RENDER_TOL => None,
        _ => Some(format!("{what}: got {got:?}, published {want}")),
    }
}

pub fn report_row(fx: &Fixture, opts: &TableOptions) -> Result<TableRow, HarnessError> {
    let start = Instant::now();
    let code = fx.build()?;
    let n = code.n();
    let d_min = code.min_distance()?;
    let mut mismatches = Vec::new();
    let row = if fx.colluding() {
        let cbar = fx.build_query()?.ok_or_else(|| HarnessError::BadConfig(format!("{} has no query code", fx.id)))?;
        let ctilde = code.hadamard(&cbar)?;
        let t = collusion_threshold(&cbar)?;
        let r_non_opt = d_over_n(ctilde.min_distance()?, n);
        let bound = rate_upper_bound(&ctilde);
        let c_lb = rat((n - (code.k() + t - 1)) as u64, n as u64);
        let (setup, e, policy) = match &fx.reproduce {
            Reproduce::AnalyticRm { v, vbar, m } => {
                let rm = p3_rm_max_rate(*v, *vbar, *m)?;
                if !rm.setup.code.same_code(&code) || !rm.setup.cbar.same_code(&cbar) {
                    return Err(HarnessError::BadConfig(format!("{}: RM construction does not match the fixture codes", fx.id)));
                }
                let e = rm.setup.structure.erasure_matrix();
                (Some(rm.setup), Some(e), format!("analytic R({v},{m})∘R({vbar},{m}), β=Γ, d=k"))
            }
            Reproduce::Search => {
                let res = optimize_rate_colluding(&code, &cbar, &opts.opt)?;
                let setup = res.e.as_ref().map(|e| p3_setup_from_e(&code, &cbar, e)).transpose()?;
                (setup, res.e, format!("search, {:?} β/d, {} Γ-steps", opts.opt.rule, res.steps.len()))
            }
        };
        let r_opt = setup.as_ref().map(|s| s.rate());
        let recovered = match (&setup, opts.round_trip) {
            (Some(s), true) => Some(simulate(&Scheme::P3(s.clone()), &code, 2, 1, 1, opts.opt.seed)?.recovered),
            _ => None,
        };
        if fx.published.t != Some(t) {
            mismatches.push(format!("T: got {t}, published {:?}", fx.published.t));
        }
        mismatches.extend(off("C_LB", Some(to_f64(&c_lb)), fx.published.c_lb.unwrap_or(f64::NAN)));
        TableRow {
            fixture: fx.clone(),
            d_min,
            d_min_prime: None,
            t: Some(t),
            r_non_opt,
            r_opt,
            bound,
            c_lb: Some(c_lb),
            policy,
            validated: setup.is_some(),
            e,
            recovered,
            mismatches: Vec::new(),
            elapsed: Duration::ZERO,
        }
    } else {
        let d_min_prime = if fx.table == "I" { shortened_distance(&code)? } else { None };
        let r_non_opt = match d_min_prime {
            Some(d) => d_over_n(d, n),
            None => d_over_n(d_min, n),
        };
        let res = optimize_rate(&code, &opts.opt)?;
        let structure = res.e.as_ref().map(|e| p2_structure_from_e(&code, e)).transpose()?;
        let recovered = match (&structure, opts.round_trip) {
            (Some(s), true) => Some(simulate(&Scheme::P2(s.clone()), &code, 2, 1, 1, opts.opt.seed)?.recovered),
            _ => None,
        };
        if fx.published.d_min_prime != d_min_prime {
            mismatches.push(format!("d': got {d_min_prime:?}, published {:?}", fx.published.d_min_prime));
        }
        TableRow {
            fixture: fx.clone(),
            d_min,
            d_min_prime,
            t: None,
            r_non_opt,
            r_opt: structure.as_ref().map(|s| s.rate()),
            bound: capacity_asymptotic(n as u64, code.k() as u64),
            c_lb: None,
            policy: format!("search, {:?} β/d, {} Γ-steps", opts.opt.rule, res.steps.len()),
            validated: structure.is_some(),
            e: res.e,
            recovered,
            mismatches: Vec::new(),
            elapsed: Duration::ZERO,
        }
    };
    if d_min != fx.published.d_min {
        mismatches.push(format!("d_min: got {d_min}, published {}", fx.published.d_min));
    }
    mismatches.extend(off("R_non-opt", Some(to_f64(&row.r_non_opt)), fx.published.r_non_opt));
    mismatches.extend(off("R_opt", row.r_opt.as_ref().map(to_f64), fx.published.r_opt));
    mismatches.extend(off("bound", Some(to_f64(&row.bound)), fx.published.bound));
    if row.recovered == Some(false) {
        mismatches.push("round trip did not recover the file".into());
    }
    Ok(TableRow { mismatches, elapsed: start.elapsed(), ..row })
}

pub fn report_tables(fixtures: &[Fixture], opts: &TableOptions) -> Result<Vec<TableRow>, HarnessError> {
    fixtures.iter().map(|fx| report_row(fx, opts)).collect()
}
