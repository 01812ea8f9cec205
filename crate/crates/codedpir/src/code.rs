//! [n,k] linear codes and the code-level predicates used by the protocols.
//!
//! Coordinates are 0-based throughout the API.

use itertools::Itertools;
use thiserror::Error;

use crate::field::Field;
use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeError {
    #[error("generator matrix has rank {rank} < {rows} rows")]
    RankDeficientGenerator { rank: usize, rows: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("erasure pattern {0:?} is not correctable")]
    NotCorrectable(Vec<usize>),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("restriction to an empty coordinate set")]
    EmptySupport,
    #[error("codes over different fields")]
    FieldMismatch,
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Budget on rank tests for the subset-search algorithms.
const SUBSET_BUDGET: u128 = 20_000_000;
/// Codeword enumeration guard (q^k).
const ENUM_LIMIT: u128 = 1 << 24;

/// Binary mask over code coordinates; `true` means erased.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ErasurePattern {
    mask: Vec<bool>,
}

impl ErasurePattern {
    pub fn none(n: usize) -> Self {
        ErasurePattern { mask: vec![false; n] }
    }
    pub fn from_support(n: usize, support: &[usize]) -> Self {
        let mut mask = vec![false; n];
        for &j in support {
            mask[j] = true;
        }
        ErasurePattern { mask }
    }
    pub fn from_mask(mask: Vec<bool>) -> Self {
        ErasurePattern { mask }
    }
    pub fn from_bits(bits: &[u8]) -> Self {
        ErasurePattern {
            mask: bits.iter().map(|&b| b != 0).collect(),
        }
    }
    pub fn n(&self) -> usize {
        self.mask.len()
    }
    pub fn weight(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }
    pub fn support(&self) -> Vec<usize> {
        (0..self.mask.len()).filter(|&j| self.mask[j]).collect()
    }
    pub fn is_erased(&self, j: usize) -> bool {
        self.mask[j]
    }
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }
    pub fn bits(&self) -> Vec<u8> {
        self.mask.iter().map(|&b| b as u8).collect()
    }
    pub fn complement(&self) -> Self {
        ErasurePattern {
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }
}

/// An [n,k] linear code with generator G (k×n) and parity-check H ((n−k)×n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearCode {
    field: Field,
    n: usize,
    k: usize,
    g: Matrix,
    h: Matrix,
}

impl LinearCode {
    pub fn from_generator(g: Matrix) -> Result<Self, CodeError> {
        let rank = g.rank();
        if rank != g.rows() {
            return Err(CodeError::RankDeficientGenerator { rank, rows: g.rows() });
        }
        let h = g.null_space();
        Ok(LinearCode {
            field: g.field().clone(),
            n: g.cols(),
            k: g.rows(),
            g,
            h,
        })
    }

    /// Code defined as the kernel of `h`. A full-rank `h` is kept verbatim;
    /// otherwise redundant rows are dropped.
    pub fn from_parity_check(h: Matrix) -> Result<Self, CodeError> {
        let h = if h.rank() == h.rows() { h } else { h.row_basis() };
        let g = h.null_space();
        Ok(LinearCode {
            field: h.field().clone(),
            n: h.cols(),
            k: g.rows(),
            g,
            h,
        })
    }

    /// Span of arbitrary rows (dependent rows allowed).
    pub fn from_spanning_rows(rows: Matrix) -> Result<Self, CodeError> {
        Self::from_generator(rows.row_basis())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn generator(&self) -> &Matrix {
        &self.g
    }
    pub fn parity_check(&self) -> &Matrix {
        &self.h
    }
    /// Code rate k/n as a (numerator, denominator) pair.
    pub fn rate(&self) -> (usize, usize) {
        (self.k, self.n)
    }

    /// Replace H by another basis of the dual (e.g. a systematic or published form).
    pub fn with_parity_check(mut self, h: Matrix) -> Result<Self, CodeError> {
        if h.cols() != self.n || h.rank() != self.n - self.k || h.rows() != self.n - self.k {
            return Err(CodeError::DimensionMismatch("replacement parity-check".into()));
        }
        if !self.g.mul(&h.transpose())?.is_zero() {
            return Err(CodeError::DimensionMismatch("G·Hᵀ ≠ 0".into()));
        }
        self.h = h;
        Ok(self)
    }

    /// msg·G for a message over this field or an extension of it.
    pub fn encode(&self, msg_field: &Field, msg: &[u64]) -> Result<Vec<u64>, CodeError> {
        if msg.len() != self.k {
            return Err(CodeError::DimensionMismatch(format!("message length {} ≠ k={}", msg.len(), self.k)));
        }
        let m = Matrix::from_fn(msg_field, 1, self.k, |_, j| msg[j]);
        Ok(m.mul(&self.g)?.row(0).to_vec())
    }

    pub fn is_codeword(&self, word_field: &Field, word: &[u64]) -> Result<bool, CodeError> {
        if word.len() != self.n {
            return Err(CodeError::DimensionMismatch("word length".into()));
        }
        Ok(self.h.mul_vec(word_field, word)?.iter().all(|&x| x == 0))
    }

    pub fn dual(&self) -> LinearCode {
        LinearCode {
            field: self.field.clone(),
            n: self.n,
            k: self.n - self.k,
            g: self.h.clone(),
            h: self.g.clone(),
        }
    }

    pub fn is_information_set(&self, set: &[usize]) -> bool {
        set.len() == self.k && self.g.select_columns(set).rank() == self.k
    }

    /// Pivot columns of rref(G): always an information set.
    pub fn pivot_information_set(&self) -> Vec<usize> {
        self.g.rref().1
    }

    pub fn erasure_correctable(&self, e: &ErasurePattern) -> bool {
        self.support_correctable(&e.support())
    }

    /// rank(H restricted to `support`) = |support|.
    pub fn support_correctable(&self, support: &[usize]) -> bool {
        if support.len() > self.n - self.k {
            return false;
        }
        support.is_empty() || self.h.select_columns(support).rank() == support.len()
    }

    /// Fill in the erased coordinates of `word` (symbols over `word_field` ⊇ GF(q)).
    pub fn decode_erasures(
        &self,
        word_field: &Field,
        word: &[u64],
        erased: &ErasurePattern,
    ) -> Result<Vec<u64>, CodeError> {
        if word.len() != self.n || erased.n() != self.n {
            return Err(CodeError::DimensionMismatch("word / pattern length".into()));
        }
        let e = erased.support();
        if e.is_empty() {
            return Ok(word.to_vec());
        }
        if !self.support_correctable(&e) {
            return Err(CodeError::NotCorrectable(e));
        }
        let known: Vec<usize> = (0..self.n).filter(|j| !erased.is_erased(*j)).collect();
        let h = self.h.lift(word_field)?;
        let rhs = h
            .select_columns(&known)
            .mul_vec(word_field, &known.iter().map(|&j| word[j]).collect_vec())?;
        let rhs: Vec<u64> = rhs.iter().map(|&x| word_field.neg(x)).collect();
        let b = Matrix::from_fn(word_field, rhs.len(), 1, |i, _| rhs[i]);
        let x = h
            .select_columns(&e)
            .solve(&b)
            .map_err(|_| CodeError::NotCorrectable(e.clone()))?;
        let mut out = word.to_vec();
        for (t, &j) in e.iter().enumerate() {
            out[j] = x.get(t, 0);
        }
        Ok(out)
    }

    /// Recover the message from the coordinates of an information set.
    pub fn unencode_from(&self, word_field: &Field, info: &[usize], values: &[u64]) -> Result<Vec<u64>, CodeError> {
        // msg · G|_I = values  ⇔  (G|_I)ᵀ msgᵀ = valuesᵀ
        let gi = self.g.select_columns(info).transpose();
        let b = Matrix::from_fn(word_field, values.len(), 1, |i, _| values[i]);
        let x = gi.solve(&b).map_err(|_| CodeError::NotCorrectable(info.to_vec()))?;
        Ok(x.column(0))
    }

    fn q_pow_k(&self) -> Option<u128> {
        (self.field.order() as u128).checked_pow(self.k as u32)
    }

    /// Visit every codeword (guarded by q^k ≤ 2^24).
    pub fn for_each_codeword(&self, mut visit: impl FnMut(&[u64])) -> Result<(), CodeError> {
        let total = self.q_pow_k().filter(|&t| t <= ENUM_LIMIT).ok_or_else(|| {
            CodeError::TooLarge(format!("q^k for GF({})^{}", self.field.order(), self.k))
        })?;
        let f = &self.field;
        let q = f.order() as usize;
        // multiples[i][a] = a · g_i
        let multiples: Vec<Vec<Vec<u64>>> = (0..self.k)
            .map(|i| {
                (0..q as u64)
                    .map(|a| self.g.row(i).iter().map(|&x| f.mul(a, x)).collect())
                    .collect()
            })
            .collect();
        let mut digits = vec![0usize; self.k];
        let mut word = vec![0u64; self.n];
        visit(&word);
        for _ in 1..total {
            let mut i = 0;
            loop {
                let old = digits[i];
                let new = (old + 1) % q;
                for j in 0..self.n {
                    word[j] = f.add(f.sub(word[j], multiples[i][old][j]), multiples[i][new][j]);
                }
                digits[i] = new;
                if new != 0 {
                    break;
                }
                i += 1;
            }
            visit(&word);
        }
        Ok(())
    }

    /// Minimum Hamming distance. The zero code gets the convention n+1.
    pub fn min_distance(&self) -> Result<usize, CodeError> {
        if self.k == 0 {
            return Ok(self.n + 1);
        }
        let r = self.n - self.k;
        let enum_cost = self.q_pow_k().map(|t| t * self.n as u128);
        let mut dep_cost: u128 = 0;
        for w in 1..=r + 1 {
            dep_cost = dep_cost.saturating_add(binomial(self.n, w));
        }
        let dep_cost_scaled = dep_cost.saturating_mul((r.max(1) * (r + 1)) as u128);
        let use_enum = match enum_cost {
            Some(c) => self.q_pow_k().unwrap() <= ENUM_LIMIT && c <= dep_cost_scaled,
            None => false,
        };
        if use_enum {
            let mut best = self.n;
            self.for_each_codeword(|w| {
                let wt = w.iter().filter(|&&x| x != 0).count();
                if wt > 0 && wt < best {
                    best = wt;
                }
            })?;
            return Ok(best);
        }
        // Smallest set of linearly dependent parity-check columns.
        let mut spent: u128 = 0;
        for w in 1..=r + 1 {
            for s in (0..self.n).combinations(w) {
                spent += 1;
                if spent > SUBSET_BUDGET {
                    return Err(CodeError::TooLarge("minimum distance search".into()));
                }
                if w > r || self.h.select_columns(&s).rank() < w {
                    return Ok(w);
                }
            }
        }
        Ok(r + 1)
    }

    /// Generalized Hamming weight d_s: smallest support of an s-dimensional subcode.
    ///
    /// Uses the support characterization: a coordinate set S supports an s-dim subcode
    /// iff rank(G restricted to the complement of S) ≤ k − s.
    pub fn generalized_hamming_weight(&self, s: usize) -> Result<usize, CodeError> {
        if s == 0 || s > self.k {
            return Err(CodeError::DimensionMismatch(format!("s={} outside 1..={}", s, self.k)));
        }
        let mut spent: u128 = 0;
        for w in s..=self.n {
            for supp in (0..self.n).combinations(w) {
                spent += 1;
                if spent > SUBSET_BUDGET {
                    return Err(CodeError::TooLarge(format!("GHW d_{s}")));
                }
                let rest: Vec<usize> = (0..self.n).filter(|j| !supp.contains(j)).collect();
                let rk = if rest.is_empty() { 0 } else { self.g.select_columns(&rest).rank() };
                if self.k - rk >= s {
                    return Ok(w);
                }
            }
        }
        Ok(self.n)
    }

    /// Weight hierarchy (d_1, …, d_k).
    pub fn weight_hierarchy(&self) -> Result<Vec<usize>, CodeError> {
        (1..=self.k).map(|s| self.generalized_hamming_weight(s)).collect()
    }

    /// Hadamard (Schur) product code: span of all componentwise row products.
    pub fn hadamard(&self, other: &LinearCode) -> Result<LinearCode, CodeError> {
        if self.n != other.n {
            return Err(CodeError::DimensionMismatch(format!("lengths {} and {}", self.n, other.n)));
        }
        if self.field != other.field {
            return Err(CodeError::FieldMismatch);
        }
        let f = &self.field;
        let mut rows = Vec::with_capacity(self.k * other.k);
        for i in 0..self.k {
            for j in 0..other.k {
                rows.push(
                    self.g
                        .row(i)
                        .iter()
                        .zip(other.g.row(j))
                        .map(|(&a, &b)| f.mul(a, b))
                        .collect::<Vec<_>>(),
                );
            }
        }
        let m = if rows.is_empty() {
            Matrix::empty(f, self.n)
        } else {
            Matrix::from_rows(f, &rows)?
        };
        Self::from_spanning_rows(m)
    }

    /// Restriction of the codebook to `keep` (in the given order).
    pub fn puncture(&self, keep: &[usize]) -> Result<LinearCode, CodeError> {
        if keep.is_empty() {
            return Err(CodeError::EmptySupport);
        }
        Self::from_spanning_rows(self.g.select_columns(keep))
    }

    /// Codewords vanishing on `zero_on`, then restricted to `keep`.
    pub fn shorten(&self, keep: &[usize], zero_on: &[usize]) -> Result<LinearCode, CodeError> {
        if keep.is_empty() {
            return Err(CodeError::EmptySupport);
        }
        let msgs = if zero_on.is_empty() {
            Matrix::identity(&self.field, self.k)
        } else {
            self.g.select_columns(zero_on).transpose().null_space()
        };
        if msgs.rows() == 0 {
            return Self::from_generator(Matrix::empty(&self.field, keep.len()));
        }
        let sub = msgs.mul(&self.g)?;
        Self::from_spanning_rows(sub.select_columns(keep))
    }

    /// Apply a coordinate permutation: coordinate j moves to perm[j].
    pub fn permuted_generator(&self, perm: &[usize]) -> Matrix {
        let mut inv = vec![0usize; perm.len()];
        for (j, &pj) in perm.iter().enumerate() {
            inv[pj] = j;
        }
        Matrix::from_fn(&self.field, self.k, self.n, |i, c| self.g.get(i, inv[c]))
    }

    /// True iff permuting coordinates maps the code onto itself.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        if perm.len() != self.n || !is_permutation(perm) {
            return false;
        }
        let gp = self.permuted_generator(perm);
        self.g.vstack(&gp).map(|m| m.rank() == self.k).unwrap_or(false)
    }

    /// Same codeword set (rank test on stacked generators).
    pub fn same_code(&self, other: &LinearCode) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.field == other.field
            && self.g.vstack(&other.g).map(|m| m.rank() == self.k).unwrap_or(false)
    }

    /// Systematic generator [I | P] on the pivot information set, with columns reordered
    /// so the information set comes first. Returns (P as k×(n−k), column order).
    pub fn systematic_parts(&self) -> (Matrix, Vec<usize>) {
        let (r, piv) = self.g.rref();
        let rest: Vec<usize> = (0..self.n).filter(|j| !piv.contains(j)).collect();
        let p = r.select_columns(&rest);
        let mut order = piv;
        order.extend(rest);
        (p, order)
    }
}

pub fn is_permutation(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}
