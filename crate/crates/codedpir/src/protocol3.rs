//! Protocol 3: privacy against T colluding nodes. Subqueries are random codewords of the
//! query code C̄ plus unit offsets; responses are C̃ = C∘C̄ codewords plus the wanted symbols,
//! which the user isolates through a parity-check of C̃.
//!
//! Every subquery draws its own βf codewords: reusing one draw across the d subqueries would
//! let colluders difference two subqueries and read the offsets.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::{CodeError, LinearCode};
use crate::dss::Dss;
use crate::field::Field;
use crate::matrix::{Matrix, MatrixError};
use crate::protocol2::{
    ascending_assignment, check_assignment, p2_respond, validate_structure, Assignment, P2Error, P2Query, P2Structure,
};
use crate::rate::{rat, BinMatrix, ErasureMatrix, Rational};
use crate::rng;
use crate::zoo::{rm_code, rm_information_set, rm_translate, ZooError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum P3Error {
    #[error("C∘C̄ is the whole space (k̃ = n): nothing left to retrieve with")]
    RateOneProduct,
    #[error("structure: {0}")]
    StructureViolation(P2Error),
    #[error("shape: {0}")]
    Shape(String),
    #[error("decode failure: {0}")]
    DecodeFailure(String),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Zoo(#[from] ZooError),
}

impl From<P2Error> for P3Error {
    fn from(e: P2Error) -> Self {
        P3Error::StructureViolation(e)
    }
}

#[derive(Debug, Clone)]
pub struct P3Setup {
    pub code: LinearCode,
    pub cbar: LinearCode,
    pub ctilde: LinearCode,
    /// d_min(C̄⊥) − 1.
    pub t: usize,
    /// Ê (rows correctable by C̃) bound to information sets of C.
    pub structure: P2Structure,
}

impl P3Setup {
    pub fn gamma(&self) -> usize {
        self.structure.gamma
    }
    pub fn d(&self) -> usize {
        self.structure.d()
    }
    pub fn beta(&self) -> usize {
        self.structure.beta()
    }
    pub fn rate(&self) -> Rational {
        self.structure.rate()
    }
    /// (n − k̃)/n.
    pub fn rate_upper_bound(&self) -> Rational {
        rate_upper_bound(&self.ctilde)
    }
    /// (d_min(C̃) − 1)/n, the rate of the fixed-structure scheme this protocol improves on.
    pub fn baseline_rate(&self) -> Result<Rational, P3Error> {
        Ok(rat((self.ctilde.min_distance()? - 1) as u64, self.code.n() as u64))
    }
}

pub fn rate_upper_bound(ctilde: &LinearCode) -> Rational {
    rat((ctilde.n() - ctilde.k()) as u64, ctilde.n() as u64)
}

/// T = d_min(C̄⊥) − 1.
pub fn collusion_threshold(cbar: &LinearCode) -> Result<usize, CodeError> {
    let dual = cbar.dual();
    if dual.k() == 0 {
        // C̄ is the whole space: no nonzero dual codeword, any set of nodes sees uniform queries.
        return Ok(cbar.n());
    }
    Ok(dual.min_distance()? - 1)
}

pub fn p3_setup(code: &LinearCode, cbar: &LinearCode, ehat: &BinMatrix, info_sets: &[Vec<usize>]) -> Result<P3Setup, P3Error> {
    let ctilde = code.hadamard(cbar)?;
    if ctilde.k() >= code.n() {
        return Err(P3Error::RateOneProduct);
    }
    let structure = validate_structure(code, &ctilde, info_sets, ehat)?;
    let t = collusion_threshold(cbar)?;
    Ok(P3Setup { code: code.clone(), cbar: cbar.clone(), ctilde, t, structure })
}

pub fn p3_setup_from_e(code: &LinearCode, cbar: &LinearCode, e: &ErasureMatrix) -> Result<P3Setup, P3Error> {
    p3_setup(code, cbar, &e.ehat, &e.information_sets())
}

/// User-side state: per subquery, the βf C̄-codewords (rows of a βf×n matrix).
#[derive(Debug, Clone)]
pub struct P3Session {
    pub f: usize,
    pub m: usize,
    pub codewords: Vec<Matrix>,
    pub assignment: Assignment,
    pub queries: Vec<P2Query>,
}

/// Uniform C̄-codewords: uniform messages times G^C̄; one βf×n block per subquery.
pub fn p3_draw_codewords(setup: &P3Setup, f: usize, seed: u64) -> Vec<Matrix> {
    let fld = setup.cbar.field();
    let q = fld.order();
    let rows = setup.beta() * f;
    (0..setup.d())
        .map(|i| {
            let mut rng = rng::stream(seed, "p3-query-codewords", i as u64);
            let msg = Matrix::from_fn(fld, rows, setup.cbar.k(), |_, _| rng.gen_range(0..q));
            msg.mul(setup.cbar.generator()).expect("shapes agree")
        })
        .collect()
}

pub fn p3_queries(setup: &P3Setup, f: usize, m: usize, seed: u64) -> Result<P3Session, P3Error> {
    let codewords = p3_draw_codewords(setup, f, seed);
    p3_queries_from(setup, f, m, codewords, ascending_assignment(&setup.structure))
}

/// q_i^(l) = c̊_l + ω_{β·m + s_i^(l)} for l ∈ 𝒥_i, else c̊_l.
pub fn p3_queries_from(
    setup: &P3Setup,
    f: usize,
    m: usize,
    codewords: Vec<Matrix>,
    assignment: Assignment,
) -> Result<P3Session, P3Error> {
    let (n, d, beta) = (setup.code.n(), setup.d(), setup.beta());
    if m >= f || codewords.len() != d || codewords.iter().any(|c| c.rows() != beta * f || c.cols() != n) {
        return Err(P3Error::Shape("codeword blocks must be d × (βf×n)".into()));
    }
    check_assignment(&setup.structure, &assignment)?;
    let fld = setup.cbar.field();
    let queries = (0..n)
        .map(|l| {
            let mut q = Matrix::from_fn(fld, d, beta * f, |i, c| codewords[i].get(c, l));
            for (i, x) in assignment[l].iter().enumerate() {
                if let Some(t) = x {
                    let c = m * beta + t;
                    q.set(i, c, fld.add(q.get(i, c), 1));
                }
            }
            P2Query { node: l, q }
        })
        .collect();
    Ok(P3Session { f, m, codewords, assignment, queries })
}

/// r_{l,i} = ⟨q_i^(l), (c^(1)_{1,l}, …, c^(f)_{β,l})⟩.
pub fn p3_respond(dss: &Dss, queries: &[P2Query]) -> Result<Vec<Vec<u64>>, P3Error> {
    Ok(p2_respond(dss, queries)?)
}

/// Per subquery: H^C̃ ρ = H^C̃|_𝒥 o_𝒥, solved for the Γ wanted symbols.
pub fn p3_decode(setup: &P3Setup, session: &P3Session, responses: &[Vec<u64>], fld: &Field) -> Result<Matrix, P3Error> {
    let (n, d, beta) = (setup.code.n(), setup.d(), setup.beta());
    if responses.len() != n || responses.iter().any(|r| r.len() != d) {
        return Err(P3Error::DecodeFailure("response shape".into()));
    }
    let h = setup.ctilde.parity_check().lift(fld)?;
    let mut stripes: Vec<Vec<Option<u64>>> = vec![vec![None; n]; beta];
    for i in 0..d {
        let rho: Vec<u64> = (0..n).map(|l| responses[l][i]).collect();
        let syndrome = h.mul_vec(fld, &rho)?;
        let j = setup.structure.ehat.row_support(i);
        let b = Matrix::from_fn(fld, syndrome.len(), 1, |r, _| syndrome[r]);
        let o = h
            .select_columns(&j)
            .solve(&b)
            .map_err(|e| P3Error::DecodeFailure(format!("subquery {i}: {e}")))?;
        for (t, &l) in j.iter().enumerate() {
            let s = session.assignment[l][i].ok_or_else(|| P3Error::DecodeFailure("assignment hole".into()))?;
            stripes[s][l] = Some(o.get(t, 0));
        }
    }
    let mut x = Matrix::zeros(fld, beta, setup.code.k());
    for (s, info) in setup.structure.info_sets.iter().enumerate() {
        let values = info
            .iter()
            .map(|&l| stripes[s][l].ok_or_else(|| P3Error::DecodeFailure(format!("stripe {s} missing node {l}"))))
            .collect::<Result<Vec<_>, _>>()?;
        for (c, v) in setup.code.unencode_from(fld, info, &values)?.into_iter().enumerate() {
            x.set(s, c, v);
        }
    }
    Ok(x)
}

/// Outcome of checking a candidate PIR maximum rate matrix Λ̃_{k, k+n−k̃}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxRateReport {
    pub column_regular: bool,
    /// Rows (among the first k) whose support is not an information set of C̃.
    pub bad_product_rows: Vec<usize>,
    /// Rows (among the last n−k̃) whose support is not an information set of C.
    pub bad_storage_rows: Vec<usize>,
    pub shape_ok: bool,
}

impl MaxRateReport {
    pub fn valid(&self) -> bool {
        self.shape_ok && self.column_regular && self.bad_product_rows.is_empty() && self.bad_storage_rows.is_empty()
    }
}

pub fn validate_max_rate_matrix(code: &LinearCode, cbar: &LinearCode, lam: &BinMatrix) -> Result<MaxRateReport, P3Error> {
    let ctilde = code.hadamard(cbar)?;
    let (n, k, kt) = (code.n(), code.k(), ctilde.k());
    let shape_ok = kt < n && lam.ncols() == n && lam.nrows() == k + n - kt;
    if !shape_ok {
        return Ok(MaxRateReport { column_regular: false, bad_product_rows: vec![], bad_storage_rows: vec![], shape_ok });
    }
    let column_regular = lam.column_regular() == Some(k);
    let bad_product_rows = (0..k).filter(|&i| !ctilde.is_information_set(&lam.row_support(i))).collect();
    let bad_storage_rows = (k..lam.nrows()).filter(|&i| !code.is_information_set(&lam.row_support(i))).collect();
    Ok(MaxRateReport { column_regular, bad_product_rows, bad_storage_rows, shape_ok })
}

/// Λ̃ → E: Ê = complements of the first k rows (Γ = n − k̃), Ē = complements of the rest.
pub fn max_rate_to_e(lam: &BinMatrix, k: usize) -> ErasureMatrix {
    let (ehat, ebar) = lam.complement().split_rows(k);
    ErasureMatrix::new(ehat, ebar)
}

/// Reed–Muller codes R(v,m), R(v̄,m) at rate (n−k̃)/n via translates: Ĩ_i = Ĩ + μ_i for μ_i ∈ I and
/// I_j = I + σ̄_j for σ̄_j ∉ Ĩ.
#[derive(Debug, Clone)]
pub struct RmMaxRate {
    pub lam: BinMatrix,
    pub setup: P3Setup,
}

pub fn p3_rm_max_rate(v: usize, vbar: usize, m: usize) -> Result<RmMaxRate, P3Error> {
    if m >= 24 {
        return Err(P3Error::Zoo(ZooError::BadDimensions(format!("2^{m} coordinates"))));
    }
    let code = rm_code(v, m)?;
    let cbar = rm_code(vbar, m)?;
    let vt = v + vbar;
    if vt >= m {
        return Err(P3Error::RateOneProduct);
    }
    let ctilde = code.hadamard(&cbar)?;
    if !ctilde.same_code(&rm_code(vt, m)?) {
        return Err(P3Error::Shape("C∘C̄ is not R(v+v̄, m)".into()));
    }
    let n = 1usize << m;
    let info = rm_information_set(v, m);
    let info_t = rm_information_set(vt, m);
    let outside: Vec<usize> = (0..n).filter(|x| !info_t.contains(x)).collect();
    let mut supports: Vec<Vec<usize>> = info.iter().map(|&mu| rm_translate(&info_t, mu)).collect();
    supports.extend(outside.iter().map(|&sigma| rm_translate(&info, sigma)));
    let lam = BinMatrix::from_supports(n, &supports);
    let report = validate_max_rate_matrix(&code, &cbar, &lam)?;
    if !report.valid() {
        return Err(P3Error::Shape(format!("translate construction failed: {report:?}")));
    }
    let e = max_rate_to_e(&lam, code.k());
    let setup = p3_setup_from_e(&code, &cbar, &e)?;
    Ok(RmMaxRate { lam, setup })
}

/// Generalized-weight conditions for a maximum rate matrix: d_s(C) ≥ s(n−k̃)/k for s ∈ [k] and
/// d_s(C̃) ≥ s for s ∈ [k̃]. The second holds for every code; it is reported for completeness.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct P3NecessaryReport {
    pub pass: bool,
    pub hierarchy: Vec<usize>,
    pub product_hierarchy: Vec<usize>,
    /// First violation: (which code, s, d_s); 0 = C, 1 = C̃.
    pub witness: Option<(u8, usize, usize)>,
}

pub fn necessary_condition_p3(code: &LinearCode, cbar: &LinearCode) -> Result<P3NecessaryReport, P3Error> {
    let ctilde = code.hadamard(cbar)?;
    let (n, k, kt) = (code.n(), code.k(), ctilde.k());
    let hierarchy = code.weight_hierarchy()?;
    let product_hierarchy = ctilde.weight_hierarchy()?;
    let witness = hierarchy
        .iter()
        .enumerate()
        .map(|(i, &d)| (0u8, i + 1, d))
        .find(|&(_, s, d)| d * k < (n - kt) * s)
        .or_else(|| product_hierarchy.iter().enumerate().map(|(i, &d)| (1u8, i + 1, d)).find(|&(_, s, d)| d < s));
    Ok(P3NecessaryReport { pass: witness.is_none(), hierarchy, product_hierarchy, witness })
}
