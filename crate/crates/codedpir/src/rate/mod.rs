//! Rate matrices Λ_{κ,ν}, interference matrices, the erasure-matrix view E = 1 − Λ,
//! capacity formulas, and the capacity conditions.

mod lrc;

pub use lrc::{lrc_e_matrix, lrc_parity_sets, LrcEMatrix, Swap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeError, LinearCode};
use crate::rng;

pub type Rational = BigRational;

pub fn rat(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Decimal rendering with `digits` places (rounded half up).
pub fn render(r: &Rational, digits: usize) -> String {
    format!("{:.*}", digits, to_f64(r))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RateError {
    #[error("κ = ν gives a zero-rate protocol")]
    KappaEqualsNu,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("permutation {0} is not an automorphism")]
    NotAutomorphism(usize),
    #[error("orbit of coordinate {0} under the permutations is not all of [n]")]
    NotCoveringOrbit(usize),
    #[error("not a valid rate matrix: {0}")]
    Invalid(RateViolation),
    #[error("no valid swap at iteration {iteration}")]
    NoValidSwap { iteration: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Binary matrix stored row-major as 0/1 bytes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BinMatrix(Vec<Vec<u8>>);

impl BinMatrix {
    pub fn new(rows: Vec<Vec<u8>>) -> Self {
        BinMatrix(rows)
    }
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinMatrix(vec![vec![0; cols]; rows])
    }
    pub fn ones(rows: usize, cols: usize) -> Self {
        BinMatrix(vec![vec![1; cols]; rows])
    }
    /// Rows given by their supports.
    pub fn from_supports(cols: usize, supports: &[Vec<usize>]) -> Self {
        BinMatrix(
            supports
                .iter()
                .map(|s| {
                    let mut r = vec![0u8; cols];
                    for &j in s {
                        r[j] = 1;
                    }
                    r
                })
                .collect(),
        )
    }
    /// Parse rows written as strings like "10100".
    pub fn parse(rows: &[&str]) -> Self {
        BinMatrix(
            rows.iter()
                .map(|r| r.bytes().filter(|b| *b == b'0' || *b == b'1').map(|b| b - b'0').collect())
                .collect(),
        )
    }
    pub fn nrows(&self) -> usize {
        self.0.len()
    }
    pub fn ncols(&self) -> usize {
        self.0.first().map_or(0, |r| r.len())
    }
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.0[i][j]
    }
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.0[i][j] = v;
    }
    pub fn row(&self, i: usize) -> &[u8] {
        &self.0[i]
    }
    pub fn rows(&self) -> &[Vec<u8>] {
        &self.0
    }
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.ncols()).filter(|&j| self.0[i][j] == 1).collect()
    }
    pub fn row_weight(&self, i: usize) -> usize {
        self.0[i].iter().filter(|&&b| b == 1).count()
    }
    pub fn col_weight(&self, j: usize) -> usize {
        self.0.iter().filter(|r| r[j] == 1).count()
    }
    pub fn col_weights(&self) -> Vec<usize> {
        (0..self.ncols()).map(|j| self.col_weight(j)).collect()
    }
    /// Common column weight, if every column has the same one.
    pub fn column_regular(&self) -> Option<usize> {
        let w = self.col_weights();
        let first = *w.first()?;
        w.iter().all(|&x| x == first).then_some(first)
    }
    pub fn row_regular(&self) -> Option<usize> {
        let first = self.row_weight(0);
        (0..self.nrows()).all(|i| self.row_weight(i) == first).then_some(first)
    }
    pub fn complement(&self) -> BinMatrix {
        BinMatrix(self.0.iter().map(|r| r.iter().map(|b| 1 - b).collect()).collect())
    }
    pub fn vstack(&self, other: &BinMatrix) -> BinMatrix {
        let mut rows = self.0.clone();
        rows.extend(other.0.iter().cloned());
        BinMatrix(rows)
    }
    pub fn split_rows(&self, at: usize) -> (BinMatrix, BinMatrix) {
        (BinMatrix(self.0[..at].to_vec()), BinMatrix(self.0[at..].to_vec()))
    }
    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(|r| r.iter().map(|b| char::from(b'0' + b)).collect()).collect()
    }
}

/// Why a candidate Λ failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateViolation {
    Shape { rows: usize, cols: usize, n: usize },
    ColumnWeight { col: usize, weight: usize, expected: usize },
    NoInformationSet { row: usize },
}

impl std::fmt::Display for RateViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RateViolation::Shape { rows, cols, n } => write!(f, "{rows}x{cols} matrix for a length-{n} code"),
            RateViolation::ColumnWeight { col, weight, expected } => {
                write!(f, "column {col} has weight {weight}, expected {expected}")
            }
            RateViolation::NoInformationSet { row } => write!(f, "row {row} contains no information set"),
        }
    }
}

/// A validated PIR achievable rate matrix Λ_{κ,ν}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RateMatrix {
    pub kappa: usize,
    pub nu: usize,
    pub lam: BinMatrix,
}

impl RateMatrix {
    /// κ/ν.
    pub fn ratio(&self) -> Rational {
        rat(self.kappa as u64, self.nu as u64)
    }
}

/// Does the coordinate set contain an information set of the code?
pub fn contains_information_set(code: &LinearCode, set: &[usize]) -> bool {
    set.len() >= code.k() && code.generator().select_columns(set).rank() == code.k()
}

/// Check both rate-matrix conditions: κ-column-regularity and an information set inside
/// every row support.
pub fn validate_rate_matrix(code: &LinearCode, lam: &BinMatrix) -> Result<RateMatrix, RateViolation> {
    if lam.ncols() != code.n() || lam.nrows() == 0 {
        return Err(RateViolation::Shape { rows: lam.nrows(), cols: lam.ncols(), n: code.n() });
    }
    let weights = lam.col_weights();
    let kappa = weights[0];
    if let Some(col) = weights.iter().position(|&w| w != kappa) {
        return Err(RateViolation::ColumnWeight { col, weight: weights[col], expected: kappa });
    }
    for row in 0..lam.nrows() {
        if !contains_information_set(code, &lam.row_support(row)) {
            return Err(RateViolation::NoInformationSet { row });
        }
    }
    Ok(RateMatrix { kappa, nu: lam.nrows(), lam: lam.clone() })
}

/// Interference matrices: column j of A lists (ascending) the rows of Λ with a one in
/// column j; B lists the rest. Entries are 0-based row indices of Λ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterferencePair {
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<usize>>,
}

impl InterferencePair {
    /// All (row, column) positions of value `v` in A, as column indices.
    pub fn a_set(&self, col: usize) -> Vec<usize> {
        self.a.iter().map(|r| r[col]).collect()
    }
    pub fn b_set(&self, col: usize) -> Vec<usize> {
        self.b.iter().map(|r| r[col]).collect()
    }
}

pub fn interference_matrices(lam: &RateMatrix) -> InterferencePair {
    let n = lam.lam.ncols();
    let (kappa, nu) = (lam.kappa, lam.nu);
    let mut a = vec![vec![0usize; n]; kappa];
    let mut b = vec![vec![0usize; n]; nu - kappa];
    for j in 0..n {
        let (mut ia, mut ib) = (0, 0);
        for u in 0..nu {
            if lam.lam.get(u, j) == 1 {
                a[ia][j] = u;
                ia += 1;
            } else {
                b[ib][j] = u;
                ib += 1;
            }
        }
    }
    InterferencePair { a, b }
}

/// 𝒮(a|A): columns of A containing the value a.
pub fn s_set(a: usize, mat: &[Vec<usize>]) -> Vec<usize> {
    let n = mat.first().map_or(0, |r| r.len());
    (0..n).filter(|&j| mat.iter().any(|r| r[j] == a)).collect()
}

/// C_f = ((n−k)/n) / (1 − (k/n)^f).
pub fn capacity_finite(n: u64, k: u64, f: u32) -> Rational {
    let base = rat(k, n);
    let denom = Rational::one() - num_traits::pow(base, f as usize);
    if denom.is_zero() {
        return Rational::zero();
    }
    rat(n - k, n) / denom
}

/// C_∞ = (n−k)/n.
pub fn capacity_asymptotic(n: u64, k: u64) -> Rational {
    rat(n - k, n)
}

/// Protocol 1 rate ((ν−κ)k/(κn)) / (1 − (κ/ν)^f).
pub fn rate_protocol1(kappa: u64, nu: u64, k: u64, n: u64, f: u32) -> Result<Rational, RateError> {
    if kappa >= nu {
        return Err(RateError::KappaEqualsNu);
    }
    let lead = Rational::new(BigInt::from((nu - kappa) * k), BigInt::from(kappa * n));
    let denom = Rational::one() - num_traits::pow(rat(kappa, nu), f as usize);
    Ok(lead / denom)
}

/// (β, d) = (LCM(k,Γ)/k, LCM(k,Γ)/Γ).
pub fn beta_d_minimal(k: usize, gamma: usize) -> (usize, usize) {
    assert!(gamma >= 1 && k >= 1, "Γ and k must be positive");
    let l = k.lcm(&gamma);
    (l / k, l / gamma)
}

/// Outcome of the generalized-Hamming-weight necessary condition d_s ≥ (n/k)s.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessaryReport {
    pub pass: bool,
    pub hierarchy: Vec<usize>,
    /// First violating (s, d_s).
    pub witness: Option<(usize, usize)>,
}

pub fn necessary_condition(code: &LinearCode) -> Result<NecessaryReport, CodeError> {
    let (n, k) = (code.n(), code.k());
    let hierarchy = code.weight_hierarchy()?;
    let witness = hierarchy
        .iter()
        .enumerate()
        .map(|(i, &d)| (i + 1, d))
        .find(|&(s, d)| d * k < n * s);
    Ok(NecessaryReport { pass: witness.is_none(), hierarchy, witness })
}

/// Λ_{k,n} whose i-th row is the image of `info` under the i-th automorphism.
pub fn lambda_from_automorphisms(
    code: &LinearCode,
    perms: &[Vec<usize>],
    info: &[usize],
) -> Result<RateMatrix, RateError> {
    let n = code.n();
    if perms.len() != n {
        return Err(RateError::ShapeMismatch(format!("{} permutations for n={n}", perms.len())));
    }
    for (i, p) in perms.iter().enumerate() {
        if !code.is_automorphism(p) {
            return Err(RateError::NotAutomorphism(i));
        }
    }
    for j in 0..n {
        let mut seen = vec![false; n];
        for p in perms {
            seen[p[j]] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(RateError::NotCoveringOrbit(j));
        }
    }
    if !code.is_information_set(info) {
        return Err(RateError::Invalid(RateViolation::NoInformationSet { row: 0 }));
    }
    let supports: Vec<Vec<usize>> = perms.iter().map(|p| info.iter().map(|&j| p[j]).collect()).collect();
    let lam = BinMatrix::from_supports(n, &supports);
    validate_rate_matrix(code, &lam).map_err(RateError::Invalid)
}

/// Information set from the pivots of G under a random column permutation.
pub fn random_information_set(code: &LinearCode, rng: &mut impl rand::Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..code.n()).collect();
    perm.shuffle(rng);
    let g = code.generator().select_columns(&perm);
    let mut set: Vec<usize> = g.rref().1.iter().map(|&c| perm[c]).collect();
    set.sort_unstable();
    set
}

/// Generic Λ_{k, k+Γ}, Γ = min(k, d_min−1): Γ information sets get the values k+1..k+Γ in A,
/// and the remaining entries of A are filled with 1..k round-robin, column by column.
pub fn lambda_generic(code: &LinearCode, seed: u64) -> Result<RateMatrix, RateError> {
    let (n, k) = (code.n(), code.k());
    let dmin = code.min_distance()?;
    let gamma = k.min(dmin.saturating_sub(1));
    if gamma == 0 {
        let lam = BinMatrix::ones(k.max(1), n);
        return validate_rate_matrix(code, &lam).map_err(RateError::Invalid);
    }
    let mut rng = rng::stream(seed, "lambda-generic", 0);
    let mut sets: Vec<Vec<usize>> = Vec::new();
    let mut attempts = 0;
    while sets.len() < gamma {
        let s = random_information_set(code, &mut rng);
        attempts += 1;
        // Prefer distinct sets; repetition is allowed once distinct ones run dry.
        if !sets.contains(&s) || attempts > 64 * gamma {
            sets.push(s);
        }
    }
    sets.sort();
    // A is k×n with values in 0..k+Γ (0-based); None = not yet assigned.
    let mut a: Vec<Vec<Option<usize>>> = vec![vec![None; n]; k];
    for (i, s) in sets.iter().enumerate() {
        for &j in s {
            a[i][j] = Some(k + i);
        }
    }
    let mut next = 0usize;
    for j in 0..n {
        for row in a.iter_mut() {
            if row[j].is_none() {
                row[j] = Some(next);
                next = (next + 1) % k;
            }
        }
    }
    let mut lam = BinMatrix::zeros(k + gamma, n);
    for row in &a {
        for (j, v) in row.iter().enumerate() {
            lam.set(v.expect("filled"), j, 1);
        }
    }
    validate_rate_matrix(code, &lam).map_err(RateError::Invalid)
}

/// E = (Ê; Ē): d rows of weight-Γ correctable patterns over β complements of information sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErasureMatrix {
    pub d: usize,
    pub beta: usize,
    pub ehat: BinMatrix,
    pub ebar: BinMatrix,
}

impl ErasureMatrix {
    pub fn new(ehat: BinMatrix, ebar: BinMatrix) -> Self {
        ErasureMatrix { d: ehat.nrows(), beta: ebar.nrows(), ehat, ebar }
    }

    /// Ê together with the information sets I_1..I_β (Ē rows are their complements).
    pub fn from_information_sets(ehat: BinMatrix, n: usize, info_sets: &[Vec<usize>]) -> Self {
        let ebar = BinMatrix::from_supports(n, info_sets).complement();
        Self::new(ehat, ebar)
    }

    /// Row weight of Ê (Γ), if uniform.
    pub fn gamma(&self) -> Option<usize> {
        self.ehat.row_regular()
    }

    pub fn stacked(&self) -> BinMatrix {
        self.ehat.vstack(&self.ebar)
    }

    /// Information sets I_i = complement of the i-th Ē row.
    pub fn information_sets(&self) -> Vec<Vec<usize>> {
        let lam = self.ebar.complement();
        (0..lam.nrows()).map(|i| lam.row_support(i)).collect()
    }

    /// PIR rate Γ/n of Protocols 2/3 with this matrix.
    pub fn rate(&self) -> Option<Rational> {
        self.gamma().map(|g| rat(g as u64, self.ehat.ncols() as u64))
    }
}

/// Λ = 1 − E.
pub fn e_to_lambda(e: &ErasureMatrix) -> BinMatrix {
    e.stacked().complement()
}

/// Split 1 − Λ with the first `d` rows as Ê.
pub fn lambda_to_e(lam: &BinMatrix, d: usize) -> Result<ErasureMatrix, RateError> {
    if d > lam.nrows() {
        return Err(RateError::ShapeMismatch(format!("d={d} exceeds {} rows", lam.nrows())));
    }
    let (ehat, ebar) = lam.complement().split_rows(d);
    Ok(ErasureMatrix::new(ehat, ebar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity_finite(5, 3, 2), rat(5, 8));
        assert_eq!(capacity_finite(5, 3, 1), rat(1, 1));
        assert_eq!(capacity_asymptotic(7, 3), rat(4, 7));
        assert_eq!(rate_protocol1(3, 5, 3, 5, 2).unwrap(), rat(5, 8));
        assert_eq!(beta_d_minimal(3, 2), (2, 3));
        assert_eq!(beta_d_minimal(4, 2), (1, 2));
    }

    #[test]
    fn s_sets() {
        // A of the 2×5 interference matrix, 0-based values.
        let a = vec![vec![1, 0, 0, 0, 0], vec![2, 2, 2, 1, 1]];
        assert_eq!(s_set(0, &a), vec![1, 2, 3, 4]);
        assert!(s_set(7, &a).is_empty());
    }
}
