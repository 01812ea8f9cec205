//! Code families: GRS/RS, binary Reed-Muller, cyclic, (r,δ) information-locality
//! (Pyramid-style) codes, and the (U | U+V) construction.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeError, LinearCode};
use crate::field::Field;
use crate::matrix::{Matrix, MatrixError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZooError {
    #[error("evaluation point {0} repeated")]
    DuplicatePoint(u64),
    #[error("multiplier at position {0} is zero")]
    ZeroMultiplier(usize),
    #[error("bad parameters: {0}")]
    BadDimensions(String),
    #[error("Reed-Muller order v={v} exceeds m={m} (or m > 10)")]
    BadOrder { v: usize, m: usize },
    #[error("g(x) does not divide x^{0} - 1")]
    NotDivisor(usize),
    #[error("assembled MDS parity-check is not MDS (d = {got}, want {want})")]
    NotMdsCompliant { got: usize, want: usize },
    #[error("(U|U+V) needs a binary U")]
    NonBinary,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Generalized Reed-Solomon code: row i of G is (v_j x_j^i)_j.
pub fn grs_code(
    field: &Field,
    k: usize,
    points: &[u64],
    multipliers: Option<&[u64]>,
) -> Result<LinearCode, ZooError> {
    let n = points.len();
    if k > n || n as u64 > field.order() {
        return Err(ZooError::BadDimensions(format!("GRS n={n}, k={k} over GF({})", field.order())));
    }
    if let Some((_, dup)) = points.iter().duplicates().enumerate().next() {
        return Err(ZooError::DuplicatePoint(*dup));
    }
    let ones = vec![1u64; n];
    let v = multipliers.unwrap_or(&ones);
    if v.len() != n {
        return Err(ZooError::BadDimensions("multiplier count".into()));
    }
    if let Some(j) = v.iter().position(|&x| x == 0) {
        return Err(ZooError::ZeroMultiplier(j));
    }
    let g = Matrix::from_fn(field, k, n, |i, j| field.mul(v[j], field.pow(points[j], i as u64)));
    Ok(LinearCode::from_generator(g)?)
}

/// RS code on the first n field elements in rep order (0, 1, 2, …).
pub fn rs_code(field: &Field, n: usize, k: usize) -> Result<LinearCode, ZooError> {
    let pts: Vec<u64> = (0..n as u64).collect();
    grs_code(field, k, &pts, None)
}

/// Evaluation code spanned by the monomials x^e (e ∈ exponents) on the given points.
pub fn monomial_code(field: &Field, points: &[u64], exponents: &[u64]) -> Result<LinearCode, ZooError> {
    let g = Matrix::from_fn(field, exponents.len(), points.len(), |i, j| field.pow(points[j], exponents[i]));
    Ok(LinearCode::from_generator(g)?)
}

/// True iff d_min = n − k + 1.
pub fn is_mds(code: &LinearCode) -> Result<bool, CodeError> {
    Ok(code.min_distance()? == code.n() - code.k() + 1)
}

/// Monomials (as variable-index lists) of degree ≤ v in graded lexicographic order.
pub fn rm_monomials(v: usize, m: usize) -> Vec<Vec<usize>> {
    (0..=v).flat_map(|deg| (0..m).combinations(deg)).collect()
}

/// Binary Reed-Muller code R(v,m); coordinate i ↔ μ with μ_j = bit (j−1) of i.
pub fn rm_code(v: usize, m: usize) -> Result<LinearCode, ZooError> {
    if v > m || m > 10 {
        return Err(ZooError::BadOrder { v, m });
    }
    let f = Field::binary();
    let mons = rm_monomials(v, m);
    let n = 1usize << m;
    let g = Matrix::from_fn(&f, mons.len(), n, |r, i| mons[r].iter().all(|&var| (i >> var) & 1 == 1) as u64);
    Ok(LinearCode::from_generator(g)?)
}

/// {μ : wt(μ) ≤ v} as coordinates.
pub fn rm_information_set(v: usize, m: usize) -> Vec<usize> {
    (0..1usize << m).filter(|i| i.count_ones() as usize <= v).collect()
}

/// Image of a coordinate set under the translation μ ↦ μ + σ (σ as a bitmask, bit j−1 = σ_j).
pub fn rm_translate(set: &[usize], sigma: usize) -> Vec<usize> {
    set.iter().map(|&i| i ^ sigma).collect()
}

/// σ from an explicit binary m-tuple (σ_1 first).
pub fn sigma_from_tuple(tuple: &[u8]) -> usize {
    tuple.iter().enumerate().map(|(j, &b)| (b as usize & 1) << j).sum()
}

fn poly_rem(field: &Field, a: &[u64], m: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = field.inv(m[dm]).expect("nonzero leading coefficient");
    while a.len() > dm {
        let top = *a.last().unwrap();
        if top != 0 {
            let c = field.mul(top, lead_inv);
            let off = a.len() - 1 - dm;
            for (i, &mi) in m.iter().enumerate() {
                a[off + i] = field.sub(a[off + i], field.mul(c, mi));
            }
        }
        a.pop();
    }
    a
}

/// Cyclic code generated by g(x) (coefficients low-to-high).
pub fn cyclic_code(field: &Field, n: usize, genpoly: &[u64]) -> Result<LinearCode, ZooError> {
    let mut g = genpoly.to_vec();
    while g.len() > 1 && g.last() == Some(&0) {
        g.pop();
    }
    let deg = g.len() - 1;
    if g.is_empty() || deg > n || g[deg] == 0 {
        return Err(ZooError::BadDimensions("generator polynomial".into()));
    }
    let mut xn1 = vec![0u64; n + 1];
    xn1[0] = field.neg(1);
    xn1[n] = 1;
    if poly_rem(field, &xn1, &g).iter().any(|&c| c != 0) {
        return Err(ZooError::NotDivisor(n));
    }
    let k = n - deg;
    let gm = Matrix::from_fn(field, k, n, |i, j| if j >= i && j - i <= deg { g[j - i] } else { 0 });
    Ok(LinearCode::from_generator(gm)?)
}

/// Cyclic shift j ↦ j+1 mod n, raised to the power t.
pub fn cyclic_shift(n: usize, t: usize) -> Vec<usize> {
    (0..n).map(|j| (j + t) % n).collect()
}

/// Parameters of an (r,δ) information-locality code in block form.
///
/// Column layout: for each local group j, r information coordinates followed by δ−1
/// local parities; then the a = n − L_c(r+δ−1) global parities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrcParams {
    pub field: Field,
    pub r: usize,
    pub delta: usize,
    pub lc: usize,
    pub n: usize,
    pub k: usize,
    /// P_j, each (δ−1)×r.
    pub local_parity: Vec<Matrix>,
    /// M_j, each a×r.
    pub global_mix: Vec<Matrix>,
}

impl LrcParams {
    pub fn nc(&self) -> usize {
        self.r + self.delta - 1
    }
    /// Number of global parities.
    pub fn globals(&self) -> usize {
        self.n - self.lc * self.nc()
    }
    /// n' = n − (L_c−1)(δ−1), the length of the associated MDS code.
    pub fn n_prime(&self) -> usize {
        self.n - (self.lc.saturating_sub(1)) * (self.delta - 1)
    }

    fn check(&self) -> Result<(), ZooError> {
        let bad = |s: &str| Err(ZooError::BadDimensions(s.to_string()));
        if self.delta == 0 || self.r == 0 {
            return bad("r and δ must be positive");
        }
        if self.k != self.lc * self.r {
            return bad("k must equal L_c·r");
        }
        if self.n < self.lc * self.nc() {
            return bad("n < L_c(r+δ−1)");
        }
        if self.local_parity.len() != self.lc || self.global_mix.len() != self.lc {
            return bad("need L_c blocks of P and M");
        }
        for p in &self.local_parity {
            if p.rows() != self.delta - 1 || p.cols() != self.r {
                return bad("P_j must be (δ−1)×r");
            }
        }
        for m in &self.global_mix {
            if m.rows() != self.globals() || m.cols() != self.r {
                return bad("M_j must be a×r");
            }
        }
        Ok(())
    }

    /// The block parity-check [[P_1 I 0 …], …, [M_1 0 M_2 0 … | I_a]].
    pub fn parity_check(&self) -> Result<Matrix, ZooError> {
        self.check()?;
        let (nc, a, d1) = (self.nc(), self.globals(), self.delta - 1);
        let mut h = Matrix::zeros(&self.field, self.lc * d1 + a, self.n);
        for j in 0..self.lc {
            let base = j * nc;
            for t in 0..d1 {
                let row = j * d1 + t;
                for c in 0..self.r {
                    h.set(row, base + c, self.local_parity[j].get(t, c));
                }
                h.set(row, base + self.r + t, 1);
            }
            for t in 0..a {
                let row = self.lc * d1 + t;
                for c in 0..self.r {
                    h.set(row, base + c, self.global_mix[j].get(t, c));
                }
            }
        }
        for t in 0..a {
            h.set(self.lc * d1 + t, self.lc * nc + t, 1);
        }
        Ok(h)
    }

    /// [P_1 … P_Lc ; M_1 … M_Lc | I_{n'−k}], the parity-check of the associated [n',k] code.
    pub fn mds_parity_check(&self) -> Result<Matrix, ZooError> {
        self.check()?;
        let (a, d1) = (self.globals(), self.delta - 1);
        let rows = d1 + a;
        let mut h = Matrix::zeros(&self.field, rows, self.k + rows);
        for j in 0..self.lc {
            for c in 0..self.r {
                for t in 0..d1 {
                    h.set(t, j * self.r + c, self.local_parity[j].get(t, c));
                }
                for t in 0..a {
                    h.set(d1 + t, j * self.r + c, self.global_mix[j].get(t, c));
                }
            }
        }
        for t in 0..rows {
            h.set(t, self.k + t, 1);
        }
        Ok(h)
    }

    /// Coordinates of local group j (0-based j < L_c).
    pub fn group(&self, j: usize) -> Vec<usize> {
        (j * self.nc()..(j + 1) * self.nc()).collect()
    }
}

/// Build the code with the block parity-check; optionally verify MDS compliance of
/// the associated [n',k] code.
pub fn lrc_optimal(params: &LrcParams, require_mds: bool) -> Result<LinearCode, ZooError> {
    let h = params.parity_check()?;
    if require_mds {
        let mds = LinearCode::from_parity_check(params.mds_parity_check()?)?;
        let got = mds.min_distance()?;
        let want = mds.n() - mds.k() + 1;
        if got != want {
            return Err(ZooError::NotMdsCompliant { got, want });
        }
    }
    let code = LinearCode::from_parity_check(h)?;
    if code.k() != params.k {
        return Err(ZooError::BadDimensions(format!("dimension {} ≠ k={}", code.k(), params.k)));
    }
    Ok(code)
}

/// Pyramid construction: split the first δ−1 parities of a systematic MDS code into
/// L_c local parities; the rest become global parities. The MDS code must have at least
/// δ−1 parities and k = L_c·r.
pub fn pyramid_from_mds(mds: &LinearCode, r: usize, delta: usize, lc: usize) -> Result<LrcParams, ZooError> {
    let k = mds.k();
    let np = mds.n();
    if k != lc * r || np - k < delta - 1 {
        return Err(ZooError::BadDimensions("pyramid split".into()));
    }
    // [A | I] with the identity on the last n'−k coordinates.
    let h = mds.parity_check();
    let tail: Vec<usize> = (k..np).collect();
    let t_inv = h.select_columns(&tail).inverse()?;
    let sys = t_inv.mul(h)?;
    let f = mds.field();
    let d1 = delta - 1;
    let a = np - k - d1;
    let local_parity = (0..lc)
        .map(|j| Matrix::from_fn(f, d1, r, |t, c| sys.get(t, j * r + c)))
        .collect();
    let global_mix = (0..lc)
        .map(|j| Matrix::from_fn(f, a, r, |t, c| sys.get(d1 + t, j * r + c)))
        .collect();
    Ok(LrcParams {
        field: f.clone(),
        r,
        delta,
        lc,
        n: lc * (r + d1) + a,
        k,
        local_parity,
        global_mix,
    })
}

/// (U | U+V) with V the binary repetition code: G = [[G_U, G_U], [0, 1]].
pub fn uuv_code(u: &LinearCode) -> Result<LinearCode, ZooError> {
    if u.field().order() != 2 {
        return Err(ZooError::NonBinary);
    }
    let (n1, k1) = (u.n(), u.k());
    let gu = u.generator();
    let g = Matrix::from_fn(u.field(), k1 + 1, 2 * n1, |i, j| {
        if i < k1 {
            gu.get(i, j % n1)
        } else {
            (j >= n1) as u64
        }
    });
    Ok(LinearCode::from_generator(g)?)
}

/// Upper bound on dim(C∘C) for the (U|U+V) code with U an [n₁,k₁] code.
pub fn uuv_square_dim_bound(n1: usize, k1: usize) -> usize {
    let pairs = k1 * k1.saturating_sub(1) / 2;
    if n1 - k1 <= pairs {
        k1 + n1 + 1
    } else {
        2 * k1 + pairs + 1
    }
}

/// Serializable code descriptions.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CodeSpec {
    Raw {
        q: u64,
        generator: Vec<Vec<u64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parity_check: Option<Vec<Vec<u64>>>,
    },
    /// Parity-check-only description.
    Kernel { q: u64, parity_check: Vec<Vec<u64>> },
    Grs {
        q: u64,
        n: usize,
        k: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<u64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        multipliers: Option<Vec<u64>>,
    },
    ReedMuller { v: usize, m: usize },
    Cyclic { q: u64, n: usize, genpoly: Vec<u64> },
    Lrc {
        q: u64,
        r: usize,
        delta: usize,
        #[serde(rename = "Lc")]
        lc: usize,
        n: usize,
        k: usize,
        #[serde(rename = "P")]
        p_blocks: Vec<Vec<Vec<u64>>>,
        #[serde(rename = "M")]
        m_blocks: Vec<Vec<Vec<u64>>>,
        #[serde(default)]
        mds: bool,
    },
    Uuv { u: Box<CodeSpec> },
}

fn rows_or_empty(f: &Field, rows: &[Vec<u64>], cols: usize) -> Result<Matrix, MatrixError> {
    if rows.is_empty() {
        Ok(Matrix::zeros(f, 0, cols))
    } else {
        Matrix::from_rows(f, rows)
    }
}

impl CodeSpec {
    pub fn build(&self) -> Result<LinearCode, ZooError> {
        match self {
            CodeSpec::Raw { q, generator, parity_check } => {
                let f = Field::from_order(*q).map_err(MatrixError::from)?;
                let code = LinearCode::from_generator(Matrix::from_rows(&f, generator)?)?;
                match parity_check {
                    Some(h) => Ok(code.with_parity_check(rows_or_empty(&f, h, generator[0].len())?)?),
                    None => Ok(code),
                }
            }
            CodeSpec::Kernel { q, parity_check } => {
                let f = Field::from_order(*q).map_err(MatrixError::from)?;
                Ok(LinearCode::from_parity_check(Matrix::from_rows(&f, parity_check)?)?)
            }
            CodeSpec::Grs { q, n, k, points, multipliers } => {
                let f = Field::from_order(*q).map_err(MatrixError::from)?;
                let pts = points.clone().unwrap_or_else(|| (0..*n as u64).collect());
                if pts.len() != *n {
                    return Err(ZooError::BadDimensions("point count ≠ n".into()));
                }
                grs_code(&f, *k, &pts, multipliers.as_deref())
            }
            CodeSpec::ReedMuller { v, m } => rm_code(*v, *m),
            CodeSpec::Cyclic { q, n, genpoly } => {
                let f = Field::from_order(*q).map_err(MatrixError::from)?;
                cyclic_code(&f, *n, genpoly)
            }
            CodeSpec::Lrc { .. } => {
                let (p, mds) = self.lrc_params()?.expect("lrc");
                lrc_optimal(&p, mds)
            }
            CodeSpec::Uuv { u } => uuv_code(&u.build()?),
        }
    }

    /// LRC block parameters when this is an `lrc` spec.
    pub fn lrc_params(&self) -> Result<Option<(LrcParams, bool)>, ZooError> {
        let CodeSpec::Lrc { q, r, delta, lc, n, k, p_blocks, m_blocks, mds } = self else {
            return Ok(None);
        };
        let f = Field::from_order(*q).map_err(MatrixError::from)?;
        let a = n.checked_sub(lc * (r + delta - 1)).ok_or_else(|| ZooError::BadDimensions("n too small".into()))?;
        let local_parity = if *delta == 1 {
            vec![Matrix::zeros(&f, 0, *r); *lc]
        } else {
            p_blocks.iter().map(|b| rows_or_empty(&f, b, *r)).collect::<Result<Vec<_>, _>>()?
        };
        let global_mix = if a == 0 {
            vec![Matrix::zeros(&f, 0, *r); *lc]
        } else {
            m_blocks.iter().map(|b| rows_or_empty(&f, b, *r)).collect::<Result<Vec<_>, _>>()?
        };
        Ok(Some((
            LrcParams { field: f, r: *r, delta: *delta, lc: *lc, n: *n, k: *k, local_parity, global_mix },
            *mds,
        )))
    }

    pub fn from_lrc_params(p: &LrcParams, mds: bool) -> CodeSpec {
        CodeSpec::Lrc {
            q: p.field.order(),
            r: p.r,
            delta: p.delta,
            lc: p.lc,
            n: p.n,
            k: p.k,
            p_blocks: p.local_parity.iter().map(|m| m.to_rows()).collect(),
            m_blocks: p.global_mix.iter().map(|m| m.to_rows()).collect(),
            mds,
        }
    }

    pub fn raw(code: &LinearCode) -> CodeSpec {
        CodeSpec::Raw {
            q: code.field().order(),
            generator: code.generator().to_rows(),
            parity_check: None,
        }
    }
}
