//! Small named codes used as worked examples and regression fixtures.

use crate::code::LinearCode;
use crate::field::Field;
use crate::matrix::Matrix;
use crate::rate::BinMatrix;
use crate::zoo::{lrc_optimal, LrcParams};

fn binary_rows(rows: &[&str]) -> Matrix {
    let b = BinMatrix::parse(rows);
    let f = Field::binary();
    Matrix::from_rows(&f, &b.rows().iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect::<Vec<_>>())
        .expect("binary rows")
}

/// Systematic [5,3,2] code that admits a Λ_{3,5}.
pub fn good_5_3_2() -> LinearCode {
    LinearCode::from_generator(binary_rows(&["10010", "01011", "00101"])).expect("code")
}

/// Systematic [5,3,2] code violating the generalized-weight condition (d_2 = 3).
pub fn bad_5_3_2() -> LinearCode {
    LinearCode::from_generator(binary_rows(&["10010", "01010", "00101"])).expect("code")
}

/// [7,3,4] simplex code (dual of the [7,4,3] Hamming code) with a fixed parity-check.
pub fn simplex_7_3_4() -> LinearCode {
    LinearCode::from_parity_check(binary_rows(&["0111000", "1010100", "1100010", "1110001"])).expect("code")
}

/// [12,4,6] binary code used for the colluding example (C̄ = C, C∘C = [12,10,2]).
pub fn code_12_4_6() -> LinearCode {
    LinearCode::from_parity_check(binary_rows(&[
        "011010000000",
        "101001000000",
        "111000100000",
        "110100010000",
        "101100001000",
        "011100000100",
        "111100000010",
        "001100000001",
    ]))
    .expect("code")
}

/// Published parity-check of the [12,10,2] square of [`code_12_4_6`].
pub fn square_12_10_2_parity() -> Matrix {
    binary_rows(&["111100111100", "110111010011"])
}

/// [7,4] Pyramid code over GF(8) with r = 2, δ = 2, two local groups, one global parity.
/// Entries use z = 2 (class of x modulo x³+x+1): z³ = 3, z⁴ = 6, z⁵ = 7.
pub fn pyramid_7_4_params() -> LrcParams {
    let f = Field::new(2, 3).expect("GF(8)");
    let m = |rows: &[Vec<u64>]| Matrix::from_rows(&f, rows).expect("block");
    LrcParams {
        field: f.clone(),
        r: 2,
        delta: 2,
        lc: 2,
        n: 7,
        k: 4,
        local_parity: vec![m(&[vec![3, 1]]), m(&[vec![3, 2]])],
        global_mix: vec![m(&[vec![6, 1]]), m(&[vec![7, 7]])],
    }
}

pub fn pyramid_7_4() -> LinearCode {
    lrc_optimal(&pyramid_7_4_params(), true).expect("pyramid")
}
