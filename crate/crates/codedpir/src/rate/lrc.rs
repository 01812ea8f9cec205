//! (n−k)-regular erasure matrix for (r,δ) information-locality codes:
//! block-circulant initialization followed by the swap phase into the trailing
//! r̄ = n mod (r+δ−1) columns.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{BinMatrix, ErasureMatrix, RateError};
use crate::code::LinearCode;
use crate::rng;
use crate::zoo::LrcParams;

/// One swap: the one at (row, from) moved to (row, to).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Swap {
    pub iteration: usize,
    pub row: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrcEMatrix {
    /// Matrix after initialization, before any swap.
    pub initial: BinMatrix,
    pub e: BinMatrix,
    pub swaps: Vec<Swap>,
    /// Column order inside each π_l (identity = plain circulant).
    pub block_order: Vec<Vec<usize>>,
    pub attempts: usize,
}

impl LrcEMatrix {
    /// View as (Ê; Ē) with Γ = n−k: the first k rows form Ê and the remaining n−k rows Ē.
    pub fn erasure_matrix(&self, k: usize) -> ErasureMatrix {
        let (ehat, ebar) = self.e.split_rows(k);
        ErasureMatrix::new(ehat, ebar)
    }
}

/// Parity coordinate sets: local parities of each local group, then whole trailing
/// blocks of global parities, then the length-r̄ remainder (if any).
pub fn lrc_parity_sets(p: &LrcParams) -> Vec<Vec<usize>> {
    let nc = p.nc();
    let l = p.n / nc;
    let mut sets: Vec<Vec<usize>> = (0..l)
        .map(|j| {
            if j < p.lc {
                (j * nc + p.r..(j + 1) * nc).collect()
            } else {
                (j * nc..(j + 1) * nc).collect()
            }
        })
        .collect();
    if p.n % nc != 0 {
        sets.push((l * nc..p.n).collect());
    }
    sets
}

/// Kuhn's augmenting-path matching of targets to rows; `order` lists candidate rows in
/// preference order.
fn match_targets(targets: &[usize], order: &[usize], ok: &dyn Fn(usize, usize) -> bool) -> Option<Vec<usize>> {
    fn augment(
        t: usize,
        targets: &[usize],
        order: &[usize],
        ok: &dyn Fn(usize, usize) -> bool,
        owner: &mut Vec<Option<usize>>,
        seen: &mut Vec<bool>,
    ) -> bool {
        for (ri, &row) in order.iter().enumerate() {
            if seen[ri] || !ok(row, targets[t]) {
                continue;
            }
            seen[ri] = true;
            if owner[ri].is_none() || augment(owner[ri].unwrap(), targets, order, ok, owner, seen) {
                owner[ri] = Some(t);
                return true;
            }
        }
        false
    }
    let mut owner: Vec<Option<usize>> = vec![None; order.len()];
    for t in 0..targets.len() {
        let mut seen = vec![false; order.len()];
        if !augment(t, targets, order, ok, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut assignment = vec![0usize; targets.len()];
    for (ri, o) in owner.iter().enumerate() {
        if let Some(t) = o {
            assignment[*t] = order[ri];
        }
    }
    Some(assignment)
}

/// Column orders of the π_l blocks tried before giving up.
pub const BLOCK_ORDER_ATTEMPTS: usize = 4096;

/// The construction with circulant π_l blocks; when the code's coefficients make a row of
/// the initial matrix uncorrectable, or leave no valid swap, the columns inside each π_l
/// are reordered (keeping ρ_l-regularity) from a seeded stream and the construction is rerun.
pub fn lrc_e_matrix(p: &LrcParams, code: &LinearCode) -> Result<LrcEMatrix, RateError> {
    if code.n() != p.n || code.k() != p.k {
        return Err(RateError::ShapeMismatch("code does not match LRC parameters".into()));
    }
    let nc = p.nc();
    let l = p.n / nc;
    let mut order: Vec<Vec<usize>> = vec![(0..nc).collect(); l];
    let mut rng = rng::stream(0, "lrc-block-order", 0);
    let mut last = None;
    for attempt in 0..BLOCK_ORDER_ATTEMPTS {
        match build(p, code, &order) {
            Ok(mut e) => {
                e.attempts = attempt + 1;
                return Ok(e);
            }
            Err(err @ (RateError::NoValidSwap { .. } | RateError::Invalid(_))) => last = Some(err),
            Err(err) => return Err(err),
        }
        order.iter_mut().for_each(|o| o.shuffle(&mut rng));
    }
    Err(last.expect("at least one attempt"))
}

fn build(p: &LrcParams, code: &LinearCode, block_order: &[Vec<usize>]) -> Result<LrcEMatrix, RateError> {
    let (n, k) = (p.n, p.k);
    let nc = p.nc();
    let l = n / nc;
    let rbar = n % nc;
    let nk = n - k;
    let m = nk / l;
    let t = nk % l;
    let rho: Vec<usize> = (0..l).map(|i| if i < t { m + 1 } else { m }).collect();
    if rho.iter().any(|&r| r > nc) {
        return Err(RateError::ShapeMismatch("block weight exceeds block size".into()));
    }
    let psets = lrc_parity_sets(p);
    let mut e = BinMatrix::zeros(n, n);
    for ip in 0..l {
        for jp in 0..l {
            let pi = (jp + l - ip) % l;
            let w = rho[pi];
            for i in 0..nc {
                for c in 0..nc {
                    if (c + nc - i) % nc < w {
                        e.set(ip * nc + i, jp * nc + block_order[pi][c], 1);
                    }
                }
            }
        }
    }
    for row in nc * l..n {
        for s in &psets {
            for &c in s {
                e.set(row, c, 1);
            }
        }
    }
    let initial = e.clone();
    let d1 = p.delta - 1;
    let global_floor = 1.max(m.saturating_sub(d1));
    let block_weight = |e: &BinMatrix, row: usize, jp: usize| (jp * nc..(jp + 1) * nc).filter(|&c| e.get(row, c) == 1).count();
    let mut swaps = Vec::new();

    for jprime in 0..rbar {
        let z = nc * l + jprime;
        let mut done = false;
        for j in 0..l {
            let mut planned: Vec<(usize, usize)> = Vec::new();
            let mut feasible = true;
            for ip in 0..l {
                let jp = (j + ip) % l;
                let rows: Vec<usize> = (ip * nc..(ip + 1) * nc).collect();
                if jp >= p.lc && rows.iter().any(|&r| block_weight(&e, r, jp) < global_floor) {
                    feasible = false;
                    break;
                }
                let mut order = rows.clone();
                order.sort_by_key(|&r| (std::cmp::Reverse(block_weight(&e, r, jp)), r));
                let ok = |row: usize, col: usize| {
                    if e.get(row, col) != 1 || e.get(row, z) != 0 {
                        return false;
                    }
                    if jp < p.lc && block_weight(&e, row, jp) <= d1 {
                        return false;
                    }
                    let mut support = e.row_support(row);
                    support.retain(|&c| c != col);
                    support.push(z);
                    support.sort_unstable();
                    code.support_correctable(&support)
                };
                match match_targets(&psets[jp], &order, &ok) {
                    Some(rows_for) => {
                        planned.extend(rows_for.into_iter().zip(psets[jp].iter().copied()));
                    }
                    None => {
                        feasible = false;
                        break;
                    }
                }
            }
            if feasible {
                for (row, col) in planned {
                    e.set(row, col, 0);
                    e.set(row, z, 1);
                    swaps.push(Swap { iteration: jprime, row, from: col, to: z });
                }
                done = true;
                break;
            }
        }
        if !done {
            return Err(RateError::NoValidSwap { iteration: jprime });
        }
    }

    if e.row_regular() != Some(nk) || e.column_regular() != Some(nk) {
        return Err(RateError::ShapeMismatch("swap phase did not yield an (n−k)-regular matrix".into()));
    }
    if let Some(bad) = (0..n).find(|&i| !code.support_correctable(&e.row_support(i))) {
        return Err(RateError::Invalid(super::RateViolation::NoInformationSet { row: bad }));
    }
    Ok(LrcEMatrix { initial, e, swaps, block_order: block_order.to_vec(), attempts: 1 })
}
