//! Simulated distributed storage: f files, each a β×k matrix over GF(q^ℓ), encoded row by
//! row with the storage code; node l holds column l of every coded array.

use rand::Rng;
use thiserror::Error;

use crate::code::{CodeError, LinearCode};
use crate::field::{Field, FieldError};
use crate::matrix::{Matrix, MatrixError};
use crate::rng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DssError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone)]
pub struct Dss {
    code: LinearCode,
    symbols: Field,
    files: Vec<Matrix>,
    arrays: Vec<Matrix>,
}

/// Random files, encoded. `ell` is the extension degree of the symbol field over the code field.
pub fn dss_init(code: &LinearCode, f: usize, beta: usize, ell: u32, seed: u64) -> Result<Dss, DssError> {
    Dss::init(code, f, beta, ell, seed)
}

impl Dss {
    pub fn init(code: &LinearCode, f: usize, beta: usize, ell: u32, seed: u64) -> Result<Dss, DssError> {
        if f == 0 || beta == 0 || ell == 0 {
            return Err(DssError::BadParams(format!("f={f}, β={beta}, ℓ={ell}")));
        }
        let symbols = code.field().extension(ell)?;
        let q = symbols.order();
        let files = (0..f)
            .map(|m| {
                let mut rng = rng::stream(seed, "dss-file", m as u64);
                Matrix::from_fn(&symbols, beta, code.k(), |_, _| rng.gen_range(0..q))
            })
            .collect();
        Dss::from_files(code, files)
    }

    /// Encode caller-supplied files (all over the same extension of the code field).
    pub fn from_files(code: &LinearCode, files: Vec<Matrix>) -> Result<Dss, DssError> {
        let first = files.first().ok_or_else(|| DssError::BadParams("no files".into()))?;
        let symbols = first.field().clone();
        let beta = first.rows();
        if !code.field().is_subfield_of(&symbols) {
            return Err(DssError::BadParams("symbol field does not contain the code field".into()));
        }
        for x in &files {
            if x.field() != &symbols || x.rows() != beta || x.cols() != code.k() || beta == 0 {
                return Err(DssError::BadParams("files must all be β×k over one field".into()));
            }
        }
        let arrays = files.iter().map(|x| x.mul(code.generator())).collect::<Result<Vec<_>, _>>()?;
        Ok(Dss { code: code.clone(), symbols, files, arrays })
    }

    pub fn code(&self) -> &LinearCode {
        &self.code
    }
    pub fn symbol_field(&self) -> &Field {
        &self.symbols
    }
    pub fn f(&self) -> usize {
        self.files.len()
    }
    pub fn beta(&self) -> usize {
        self.files[0].rows()
    }
    pub fn n(&self) -> usize {
        self.code.n()
    }
    /// X^(m), β×k.
    pub fn file(&self, m: usize) -> &Matrix {
        &self.files[m]
    }
    /// C^(m) = X^(m)·G, β×n.
    pub fn array(&self, m: usize) -> &Matrix {
        &self.arrays[m]
    }
    /// c^(m)_{row, node}.
    pub fn symbol(&self, m: usize, row: usize, node: usize) -> u64 {
        self.arrays[m].get(row, node)
    }
    /// What node l stores: for each file, its column of the coded array (length β).
    pub fn node_view(&self, node: usize) -> Vec<Vec<u64>> {
        self.arrays.iter().map(|c| c.column(node)).collect()
    }
    /// Every row of every coded array is a codeword.
    pub fn rows_are_codewords(&self) -> bool {
        self.arrays
            .iter()
            .all(|c| (0..c.rows()).all(|i| self.code.is_codeword(&self.symbols, c.row(i)).unwrap_or(false)))
    }
}
