//! The table codes as serializable fixtures, with the published values they are checked against.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code::LinearCode;
use crate::field::Field;
use crate::known;
use crate::matrix::{Matrix, MatrixError};
use crate::zoo::{monomial_code, pyramid_from_mds, rm_code, rs_code, CodeSpec, ZooError};

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Zoo(#[from] ZooError),
    #[error("unknown fixture {0}")]
    Unknown(String),
}

/// How a row's optimized rate is reproduced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Reproduce {
    /// Run the optimizer (noncolluding, or colluding when a query code is present).
    Search,
    /// Reed–Muller translate construction R(v,m) with R(v̄,m).
    AnalyticRm { v: usize, vbar: usize, m: usize },
}

/// Published row values, as printed (4-decimal renderings).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PublishedRow {
    pub d_min: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_min_prime: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
    pub r_non_opt: f64,
    pub r_opt: f64,
    /// C_∞ in the noncolluding tables, R_UB in the colluding one.
    pub bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_lb: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub id: String,
    /// "I", "II" or "III".
    pub table: String,
    pub n: usize,
    pub k: usize,
    pub code: CodeSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_code: Option<CodeSpec>,
    pub reproduce: Reproduce,
    pub published: PublishedRow,
    pub source: String,
}

impl Fixture {
    pub fn build(&self) -> Result<LinearCode, ZooError> {
        self.code.build()
    }
    pub fn build_query(&self) -> Result<Option<LinearCode>, ZooError> {
        self.query_code.as_ref().map(|q| q.build()).transpose()
    }
    pub fn colluding(&self) -> bool {
        self.table == "III"
    }
    pub fn file_name(&self) -> String {
        let suffix = if self.colluding() { "_colluding" } else { "" };
        format!("{}{suffix}.json", self.id.to_lowercase())
    }
}

/// Tamo–Barg evaluation points for the [9,4] code: cosets of the cube roots of unity in GF(13).
pub const TB9_POINTS: [u64; 9] = [1, 3, 9, 2, 6, 5, 4, 12, 10];

fn gf(p: u64, e: u32) -> Field {
    Field::new(p, e).expect("field")
}

fn binary(rows: &[&str]) -> Matrix {
    let f = Field::binary();
    let rows: Vec<Vec<u64>> = rows.iter().map(|r| r.bytes().map(|b| (b - b'0') as u64).collect()).collect();
    Matrix::from_rows(&f, &rows).expect("rows")
}

/// Binary [11,6,4] code, first hit of a seeded search over systematic generators that reaches Γ = 5.
pub fn code_11_6_4() -> LinearCode {
    LinearCode::from_generator(binary(&[
        "10000011111",
        "01000010101",
        "00100001110",
        "00010011010",
        "00001001101",
        "00000110110",
    ]))
    .expect("code")
}

/// [16,10,5] LRC over GF(16): systematic RS[14,10] plus XOR local parities of each data half.
pub fn lrc_16_10_5() -> Result<LinearCode, ZooError> {
    let f = gf(2, 4);
    let rs = rs_code(&f, 14, 10)?;
    let (sys, pivots) = rs.generator().rref();
    if pivots != (0..10).collect::<Vec<_>>() {
        return Err(ZooError::BadDimensions("RS[14,10] not systematic on the first 10".into()));
    }
    let g = Matrix::from_fn(&f, 10, 16, |i, j| match j {
        0..=13 => sys.get(i, j),
        14 => (i < 5) as u64,
        _ => (i >= 5) as u64,
    });
    Ok(LinearCode::from_generator(g)?)
}

/// [13,8,4]: the extended Hamming code R(2,4) shortened on its first three coordinates.
pub fn uuv_inner_13_8_4() -> Result<LinearCode, ZooError> {
    let keep: Vec<usize> = (3..16).collect();
    Ok(rm_code(2, 4)?.shorten(&keep, &[0, 1, 2])?)
}

fn published(d_min: usize, d_min_prime: Option<usize>, r_non_opt: f64, r_opt: f64, bound: f64) -> PublishedRow {
    PublishedRow { d_min, d_min_prime, t: None, r_non_opt, r_opt, bound, c_lb: None }
}

fn published_colluding(d_min: usize, t: usize, r_non_opt: f64, r_opt: f64, r_ub: f64, c_lb: f64) -> PublishedRow {
    PublishedRow { d_min, d_min_prime: None, t: Some(t), r_non_opt, r_opt, bound: r_ub, c_lb: Some(c_lb) }
}

fn grs(q: u64, k: usize, points: &[u64]) -> CodeSpec {
    CodeSpec::Grs { q, n: points.len(), k, points: Some(points.to_vec()), multipliers: None }
}

/// Every reproducible table row (𝒞₆ and 𝒞₇ are out of reach and not included).
pub fn builtin() -> Result<Vec<Fixture>, FixtureError> {
    let f13 = gf(13, 1);
    let f16 = gf(2, 4);
    let p12: Vec<u64> = (1..13).collect();
    let c9 = monomial_code(&f13, &TB9_POINTS, &[0, 1, 3, 4])?;
    let c10 = monomial_code(&f13, &p12, &[0, 1, 2, 4, 5, 6])?;
    let c12 = monomial_code(&f13, &p12, &[0, 1, 4, 6])?;
    let pyr3 = pyramid_from_mds(&rs_code(&f16, 11, 8)?, 4, 2, 2)?;
    let pyr4 = pyramid_from_mds(&rs_code(&f16, 16, 12)?, 6, 3, 2)?;
    let uuv13 = CodeSpec::Uuv { u: Box::new(CodeSpec::raw(&uuv_inner_13_8_4()?)) };
    let rm14 = CodeSpec::Uuv { u: Box::new(CodeSpec::ReedMuller { v: 1, m: 4 }) };

    let fx = |id: &str, table: &str, n: usize, k: usize, code: CodeSpec, q: Option<CodeSpec>, r: Reproduce, p: PublishedRow, src: &str| Fixture {
        id: id.into(),
        table: table.into(),
        n,
        k,
        code,
        query_code: q,
        reproduce: r,
        published: p,
        source: src.into(),
    };
    use Reproduce::Search;
    Ok(vec![
        fx("C1", "I", 5, 3, CodeSpec::raw(&known::good_5_3_2()), None, Search,
            published(2, Some(3), 0.4, 0.4, 0.4), "systematic [5,3,2] worked example"),
        fx("C2", "I", 11, 6, CodeSpec::raw(&code_11_6_4()), None, Search,
            published(4, Some(4), 0.2727, 0.4545, 0.4545),
            "binary [11,6,4] (optimum d_min); first code from a seeded search over systematic generators reaching 5/11"),
        fx("C3", "I", 12, 8, CodeSpec::from_lrc_params(&pyr3, true), None, Search,
            published(4, Some(4), 0.25, 0.3333, 0.3333), "Pyramid code from RS[11,8] over GF(16), r=4, δ=2, two groups"),
        fx("C4", "I", 18, 12, CodeSpec::from_lrc_params(&pyr4, true), None, Search,
            published(5, Some(5), 0.2222, 0.3333, 0.3333), "Pyramid code from RS[16,12] over GF(16), r=6, δ=3, two groups"),
        fx("C5", "I", 16, 10, CodeSpec::raw(&lrc_16_10_5()?), None, Search,
            published(5, Some(5), 0.25, 0.375, 0.375), "[16,10,5] LRC of locality 5: RS[14,10] over GF(16) plus two XOR local parities"),
        fx("C8", "II", 7, 3, CodeSpec::raw(&known::simplex_7_3_4()), None, Search,
            published(4, None, 0.4286, 0.5714, 0.5714), "[7,3,4] simplex code"),
        fx("C9", "II", 9, 4, CodeSpec::raw(&c9), None, Search,
            published(5, None, 0.4444, 0.5555, 0.5555), "Tamo–Barg [9,4] over GF(13), locality 2, exponents {0,1,3,4}"),
        fx("C10", "II", 12, 6, CodeSpec::raw(&c10), None, Search,
            published(6, None, 0.4167, 0.5, 0.5), "Tamo–Barg [12,6] over GF(13), locality 3, exponents {0,1,2,4,5,6}"),
        fx("C9", "III", 9, 4, CodeSpec::raw(&c9), Some(grs(13, 2, &TB9_POINTS)), Search,
            published_colluding(5, 2, 0.3333, 0.3333, 0.3333, 0.4444), "Tamo–Barg [9,4] with RS[9,2] on the same points"),
        fx("C10", "III", 12, 6, CodeSpec::raw(&c10), Some(grs(13, 2, &p12)), Search,
            published_colluding(6, 2, 0.3333, 0.3333, 0.3333, 0.4167), "Tamo–Barg [12,6] with RS[12,2] on the same points"),
        fx("C11", "III", 12, 4, CodeSpec::raw(&known::code_12_4_6()), Some(CodeSpec::raw(&known::code_12_4_6())), Search,
            published_colluding(6, 2, 0.0833, 0.1667, 0.1667, 0.5833), "[12,4,6] binary code with itself as query code"),
        fx("C12", "III", 12, 4, CodeSpec::raw(&c12), Some(grs(13, 2, &p12)), Search,
            published_colluding(6, 2, 0.3333, 0.4167, 0.4167, 0.5833),
            "[12,4] LRC over GF(13) with two disjoint recovering sets, exponents {0,1,4,6}, with RS[12,2]"),
        fx("C13", "III", 26, 9, uuv13.clone(), Some(uuv13), Search,
            published_colluding(8, 3, 0.0, 0.1538, 0.1538, 0.5769), "(U | U+V) with U = [13,8,4] shortened extended Hamming code"),
        fx("C14", "III", 32, 6, rm14.clone(), Some(rm14), Reproduce::AnalyticRm { v: 1, vbar: 1, m: 5 },
            published_colluding(16, 3, 0.2188, 0.5, 0.5, 0.75), "(U | U+V) with U = R(1,4), i.e. R(1,5)"),
    ])
}

pub fn write_dir(dir: &Path, fixtures: &[Fixture]) -> Result<(), FixtureError> {
    std::fs::create_dir_all(dir)?;
    for f in fixtures {
        std::fs::write(dir.join(f.file_name()), serde_json::to_string_pretty(f)? + "\n")?;
    }
    Ok(())
}

/// All `*.json` fixtures in a directory, sorted by file name.
pub fn load_dir(dir: &Path) -> Result<Vec<Fixture>, FixtureError> {
    let mut paths: Vec<_> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| Ok(serde_json::from_str(&std::fs::read_to_string(p)?)?)).collect()
}

impl From<MatrixError> for FixtureError {
    fn from(e: MatrixError) -> Self {
        FixtureError::Zoo(ZooError::Matrix(e))
    }
}
