//! Protocol 2: file-independent retrieval with queries Q^(l) = U + V^(l). V^(l) is zero
//! except for the requested file's β-column block Δ_l, whose rows are unit vectors picked
//! by Ê and the information sets I_1..I_β.

use itertools::Itertools;
use rand::Rng;
use thiserror::Error;

use crate::code::{CodeError, ErasurePattern, LinearCode};
use crate::dss::Dss;
use crate::field::Field;
use crate::matrix::{Matrix, MatrixError};
use crate::rate::{rat, BinMatrix, ErasureMatrix, Rational};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum P2Error {
    #[error("C1: row {row} of Ê has weight {weight}, expected Γ = {gamma}")]
    C1Violation { row: usize, weight: usize, gamma: usize },
    #[error("C2: row {row} of Ê ({support:?}) is not a correctable erasure pattern")]
    C2Violation { row: usize, support: Vec<usize> },
    #[error("C3: column {col} of Ê has weight {weight}, but coordinate {col} lies in {expected} information sets")]
    C3Violation { col: usize, weight: usize, expected: usize },
    #[error("set {index} ({set:?}) is not an information set")]
    NotInformationSet { index: usize, set: Vec<usize> },
    #[error("β·k = {bk} but Γ·d = {gd}")]
    Unbalanced { bk: usize, gd: usize },
    #[error("shape: {0}")]
    Shape(String),
    #[error("invalid stripe assignment: {0}")]
    BadAssignment(String),
    #[error("decode failure: {0}")]
    DecodeFailure(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Validated (Ê, I_1..I_β) for a code.
#[derive(Debug, Clone)]
pub struct P2Structure {
    pub code: LinearCode,
    pub ehat: BinMatrix,
    pub info_sets: Vec<Vec<usize>>,
    pub gamma: usize,
    /// ℱ_l = {i : l ∈ I_i}, ascending.
    pub f_sets: Vec<Vec<usize>>,
}

impl P2Structure {
    pub fn d(&self) -> usize {
        self.ehat.nrows()
    }
    pub fn beta(&self) -> usize {
        self.info_sets.len()
    }
    pub fn erasure_matrix(&self) -> ErasureMatrix {
        ErasureMatrix::from_information_sets(self.ehat.clone(), self.code.n(), &self.info_sets)
    }
    /// Γ/n = βk/(nd).
    pub fn rate(&self) -> Rational {
        rat(self.gamma as u64, self.code.n() as u64)
    }
}

/// Check C1–C3 (and βk = Γd) for Ê against the information sets.
pub fn p2_build_structure(code: &LinearCode, info_sets: &[Vec<usize>], ehat: &BinMatrix) -> Result<P2Structure, P2Error> {
    validate_structure(code, code, info_sets, ehat)
}

/// C1–C3 with the Ê rows checked against `pattern_code` (C itself here, C∘C̄ under collusion)
/// and the information sets against `code`.
pub(crate) fn validate_structure(
    code: &LinearCode,
    pattern_code: &LinearCode,
    info_sets: &[Vec<usize>],
    ehat: &BinMatrix,
) -> Result<P2Structure, P2Error> {
    let n = code.n();
    if ehat.ncols() != n || ehat.nrows() == 0 || info_sets.is_empty() {
        return Err(P2Error::Shape(format!("Ê is {}×{}, n = {n}, β = {}", ehat.nrows(), ehat.ncols(), info_sets.len())));
    }
    for (index, set) in info_sets.iter().enumerate() {
        let mut s = set.clone();
        s.sort_unstable();
        s.dedup();
        if s.len() != set.len() || s.iter().any(|&j| j >= n) || !code.is_information_set(&s) {
            return Err(P2Error::NotInformationSet { index, set: set.clone() });
        }
    }
    let gamma = ehat.row_weight(0);
    for row in 0..ehat.nrows() {
        let weight = ehat.row_weight(row);
        if weight != gamma {
            return Err(P2Error::C1Violation { row, weight, gamma });
        }
    }
    let (bk, gd) = (info_sets.len() * code.k(), gamma * ehat.nrows());
    if bk != gd {
        return Err(P2Error::Unbalanced { bk, gd });
    }
    for row in 0..ehat.nrows() {
        let support = ehat.row_support(row);
        if !pattern_code.support_correctable(&support) {
            return Err(P2Error::C2Violation { row, support });
        }
    }
    let f_sets: Vec<Vec<usize>> =
        (0..n).map(|l| (0..info_sets.len()).filter(|&i| info_sets[i].contains(&l)).collect()).collect();
    for (col, fl) in f_sets.iter().enumerate() {
        let weight = ehat.col_weight(col);
        if weight != fl.len() {
            return Err(P2Error::C3Violation { col, weight, expected: fl.len() });
        }
    }
    Ok(P2Structure { code: code.clone(), ehat: ehat.clone(), info_sets: info_sets.to_vec(), gamma, f_sets })
}

/// Same, from a stacked E = (Ê; Ē).
pub fn p2_structure_from_e(code: &LinearCode, e: &ErasureMatrix) -> Result<P2Structure, P2Error> {
    p2_build_structure(code, &e.information_sets(), &e.ehat)
}

/// s_i^(l) for every node: `assignment[l][i]` is the stripe (0-based) accessed by subquery i
/// at node l, or None where ê_{i,l} = 0.
pub type Assignment = Vec<Vec<Option<usize>>>;

/// First unused element of ℱ_l, ascending, for each one in column l of Ê.
pub fn ascending_assignment(s: &P2Structure) -> Assignment {
    (0..s.code.n())
        .map(|l| {
            let mut next = s.f_sets[l].iter();
            (0..s.d()).map(|i| if s.ehat.get(i, l) == 1 { next.next().copied() } else { None }).collect()
        })
        .collect()
}

/// Assignment must place distinct elements of ℱ_l exactly on the ones of column l.
pub fn check_assignment(s: &P2Structure, a: &Assignment) -> Result<(), P2Error> {
    if a.len() != s.code.n() || a.iter().any(|col| col.len() != s.d()) {
        return Err(P2Error::BadAssignment("shape".into()));
    }
    for (l, col) in a.iter().enumerate() {
        let mut used = Vec::new();
        for (i, x) in col.iter().enumerate() {
            match (s.ehat.get(i, l), x) {
                (0, None) => {}
                (1, Some(t)) if s.f_sets[l].contains(t) && !used.contains(t) => used.push(*t),
                _ => return Err(P2Error::BadAssignment(format!("node {l}, subquery {i}: {x:?}"))),
            }
        }
    }
    Ok(())
}

/// Node-visible query: the d×βf matrix over GF(q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct P2Query {
    pub node: usize,
    pub q: Matrix,
}

/// User-side state of one retrieval.
#[derive(Debug, Clone)]
pub struct P2Session {
    pub f: usize,
    pub m: usize,
    pub u: Matrix,
    pub assignment: Assignment,
    pub queries: Vec<P2Query>,
}

impl P2Session {
    /// Δ_l as a d×β binary matrix.
    pub fn delta(&self, node: usize, beta: usize) -> BinMatrix {
        let col = &self.assignment[node];
        let mut m = BinMatrix::zeros(col.len(), beta);
        for (i, x) in col.iter().enumerate() {
            if let Some(t) = x {
                m.set(i, *t, 1);
            }
        }
        m
    }
}

/// U: d×βf, i.i.d. uniform over GF(q).
pub fn p2_draw_u(s: &P2Structure, f: usize, seed: u64) -> Matrix {
    let fld = s.code.field();
    let q = fld.order();
    let mut rng = rng::stream(seed, "p2-u", 0);
    Matrix::from_fn(fld, s.d(), s.beta() * f, |_, _| rng.gen_range(0..q))
}

pub fn p2_queries(s: &P2Structure, f: usize, m: usize, seed: u64) -> Result<P2Session, P2Error> {
    p2_queries_from(s, f, m, p2_draw_u(s, f, seed), ascending_assignment(s))
}

/// Queries from an explicit U and assignment.
pub fn p2_queries_from(
    s: &P2Structure,
    f: usize,
    m: usize,
    u: Matrix,
    assignment: Assignment,
) -> Result<P2Session, P2Error> {
    let beta = s.beta();
    if m >= f || u.rows() != s.d() || u.cols() != beta * f || u.field() != s.code.field() {
        return Err(P2Error::Shape(format!("U is {}×{} for d = {}, βf = {}", u.rows(), u.cols(), s.d(), beta * f)));
    }
    check_assignment(s, &assignment)?;
    let fld = s.code.field();
    let queries = (0..s.code.n())
        .map(|l| {
            let mut q = u.clone();
            for (i, x) in assignment[l].iter().enumerate() {
                if let Some(t) = x {
                    let c = m * beta + t;
                    q.set(i, c, fld.add(q.get(i, c), 1));
                }
            }
            P2Query { node: l, q }
        })
        .collect();
    Ok(P2Session { f, m, u, assignment, queries })
}

/// r_l = Q^(l)·(c^(1)_{1,l}, …, c^(f)_{β,l})ᵀ.
pub fn p2_respond(dss: &Dss, queries: &[P2Query]) -> Result<Vec<Vec<u64>>, P2Error> {
    queries
        .iter()
        .map(|qr| {
            let stored: Vec<u64> = dss.node_view(qr.node).concat();
            if stored.len() != qr.q.cols() {
                return Err(P2Error::Shape(format!("query width {} ≠ βf = {}", qr.q.cols(), stored.len())));
            }
            Ok(qr.q.mul_vec(dss.symbol_field(), &stored)?)
        })
        .collect()
}

/// Per subquery: decode the interference codeword from the non-accessed nodes, subtract it to
/// expose Γ code symbols; then solve each stripe from its information set.
pub fn p2_decode(s: &P2Structure, session: &P2Session, responses: &[Vec<u64>], fld: &Field) -> Result<Matrix, P2Error> {
    let (n, d, beta) = (s.code.n(), s.d(), s.beta());
    if responses.len() != n || responses.iter().any(|r| r.len() != d) {
        return Err(P2Error::DecodeFailure("response shape".into()));
    }
    let mut stripes: Vec<Vec<Option<u64>>> = vec![vec![None; n]; beta];
    for i in 0..d {
        let word: Vec<u64> = (0..n).map(|l| responses[l][i]).collect();
        let erased = ErasurePattern::from_bits(s.ehat.row(i));
        let interference = s
            .code
            .decode_erasures(fld, &word, &erased)
            .map_err(|e| P2Error::DecodeFailure(format!("subquery {i}: {e}")))?;
        for l in erased.support() {
            let t = session.assignment[l][i].ok_or_else(|| P2Error::DecodeFailure("assignment hole".into()))?;
            stripes[t][l] = Some(fld.sub(word[l], interference[l]));
        }
    }
    let k = s.code.k();
    let mut x = Matrix::zeros(fld, beta, k);
    for (t, info) in s.info_sets.iter().enumerate() {
        let values = info
            .iter()
            .map(|&l| stripes[t][l].ok_or_else(|| P2Error::DecodeFailure(format!("stripe {t} missing node {l}"))))
            .collect::<Result<Vec<_>, _>>()?;
        let msg = s.code.unencode_from(fld, info, &values)?;
        for (c, v) in msg.into_iter().enumerate() {
            x.set(t, c, v);
        }
    }
    Ok(x)
}

/// Downloaded-symbol accounting for one run: βk/(n·d) from the response lengths.
pub fn achieved_rate(s: &P2Structure, responses: &[Vec<u64>]) -> Rational {
    let total: usize = responses.iter().map(|r| r.len()).sum();
    rat((s.beta() * s.code.k()) as u64, total as u64)
}

/// Supports of the Ê rows, for reporting.
pub fn access_sets(s: &P2Structure) -> Vec<Vec<usize>> {
    (0..s.d()).map(|i| s.ehat.row_support(i)).collect_vec()
}
