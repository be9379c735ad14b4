//! Explicit decoder for one criss-cross deletion.
//!
//! The received `(n-1) x (n-1)` array is classified from its last column,
//! the deleted positions are located with the two VT component codes, and
//! the missing contents are refilled from the parities. Every reconstruction
//! is checked against the full code membership test before it is returned.

use std::fmt;

use serde::Serialize;

use crate::code::{check_n, is_codeword, v_symbol, CodeParams};
use crate::error::{invalid, Error, Result};
use crate::grid::BitGrid;
use crate::vt::{vt_decode_deletion, QaryWord};

/// What the received last column says about the deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// The last column (`j = n`) was deleted.
    LastColDeleted,
    /// A row in `1..=l+1` was deleted; this is its index.
    RowDeletedInU(usize),
    /// Rows `1..=l` survived.
    UIntact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DecodeCase {
    /// Row deleted inside the top band, last column present.
    Case1a,
    /// Top band intact, last column present.
    Case1b,
    /// Last column deleted.
    Case2,
}

impl fmt::Display for DecodeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecodeCase::Case1a => "1a",
            DecodeCase::Case1b => "1b",
            DecodeCase::Case2 => "2",
        })
    }
}

/// Which parity lines were among the deleted ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HypothesisNote {
    None,
    ParityRowDeleted,
    ParityColDeleted,
    ParityRowAndColDeleted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeTrace {
    pub case_taken: DecodeCase,
    pub row_index: usize,
    pub col_index: usize,
    pub hypothesis_notes: HypothesisNote,
}

impl DecodeTrace {
    fn new(case_taken: DecodeCase, n: usize, row_index: usize, col_index: usize) -> Self {
        let hypothesis_notes = match (row_index == n, col_index == 1) {
            (false, false) => HypothesisNote::None,
            (true, false) => HypothesisNote::ParityRowDeleted,
            (false, true) => HypothesisNote::ParityColDeleted,
            (true, true) => HypothesisNote::ParityRowAndColDeleted,
        };
        Self {
            case_taken,
            row_index,
            col_index,
            hypothesis_notes,
        }
    }
}

#[inline]
fn alternating(row: usize) -> u8 {
    ((row - 1) % 2) as u8
}

fn check_received(received: &BitGrid, n: usize) -> Result<usize> {
    let ell = check_n(n)?;
    if received.dims() != (n - 1, n - 1) {
        return invalid(format!(
            "expected a {0}x{0} received array, got {1}x{2}",
            n - 1,
            received.n_rows(),
            received.n_cols()
        ));
    }
    Ok(ell)
}

/// Reads the first `l + 1` entries of the received last column.
pub fn classify(received: &BitGrid, n: usize) -> Result<Classification> {
    let ell = check_received(received, n)?;
    let last = |r: usize| received.get(r, n - 1);
    if (1..=3).all(|r| last(r) == 0) {
        return Ok(Classification::LastColDeleted);
    }
    if last(1) == 1 {
        return Ok(Classification::RowDeletedInU(1));
    }
    Ok(match (1..=ell).find(|&p| last(p) == last(p + 1)) {
        Some(p) => Classification::RowDeletedInU(p + 1),
        None => Classification::UIntact,
    })
}

/// Parity of row `i` of `x` outside column `skip`.
fn row_parity_without(x: &BitGrid, i: usize, skip: usize) -> u8 {
    let mask = x.row_mask(i) & !(1u64 << (skip - 1));
    (mask.count_ones() % 2) as u8
}

fn col_parity_without(x: &BitGrid, j: usize, skip: usize) -> u8 {
    let mask = x.col_mask(j) & !(1u64 << (skip - 1));
    (mask.count_ones() % 2) as u8
}

/// Inserts row `i` and column `j` into `received` and fills them from the
/// code constraints. `u_symbol` holds rows `1..=l` of column `j` and is
/// ignored for `j = n`, whose top entries are the fixed alternating prefix.
pub fn complete(received: &BitGrid, i: usize, j: usize, u_symbol: Option<u32>, ell: usize) -> Result<BitGrid> {
    let n = received.n_rows() + 1;
    if !(1..=n).contains(&i) || !(1..=n).contains(&j) {
        return invalid(format!("deletion position ({i}, {j}) outside [1, {n}]"));
    }
    if j != n && u_symbol.is_none() {
        return invalid("a column symbol is required unless the last column was deleted");
    }
    let mut x = received.insert(&[(i, vec![0; n - 1])], &[(j, vec![0; n])])?;

    // Row i outside column j: every column sums to zero.
    for c in (1..=n).filter(|&c| c != j) {
        let v = col_parity_without(&x, c, i);
        x.set(i, c, v);
    }
    // Column j, rows 1..=n-1, top to bottom; the crossing cell is handled in order.
    for r in 1..n {
        let v = if j == n && r <= ell + 1 {
            alternating(r)
        } else if r <= ell {
            let sym = u_symbol.expect("checked above");
            ((sym >> (ell - r)) & 1) as u8
        } else {
            row_parity_without(&x, r, j)
        };
        x.set(r, j, v);
    }
    let v = col_parity_without(&x, j, n);
    x.set(n, j, v);
    Ok(x)
}

/// Locates the deleted row once column `j` is known, and completes.
/// Hypothesis A is the parity row; hypothesis B VT-decodes the right band.
fn row_hypotheses(
    received: &BitGrid,
    params: &CodeParams,
    j: usize,
    u_symbol: Option<u32>,
    case: DecodeCase,
    out: &mut Vec<(BitGrid, DecodeTrace)>,
) -> Result<()> {
    let (n, ell) = (params.n, params.ell);
    out.push((complete(received, n, j, u_symbol, ell)?, DecodeTrace::new(case, n, n, j)));

    // Received rows 1..=n-2 with column j restored. Entries outside the top
    // band come from the row parities, which hold for every surviving row
    // other than the parity row.
    let mut z = received.insert(&[], &[(j, vec![0; n - 1])])?;
    for r in 1..n {
        let v = if j == n && r <= ell {
            alternating(r)
        } else if r <= ell {
            ((u_symbol.expect("column symbol present for j < n") >> (ell - r)) & 1) as u8
        } else {
            row_parity_without(&z, r, j)
        };
        z.set(r, j, v);
    }
    // Received row l+1 is the original row l+1 or l+2 depending on whether
    // the deleted row lies below it, which decides whether the mask applies.
    for k in [ell + 1, ell] {
        let mut zk = z.clone();
        if j == n && k == ell + 1 {
            zk.set(ell + 1, n, alternating(ell + 1));
        }
        let symbols = (1..=n - 2)
            .map(|r| v_symbol(&zk, ell, r, (r <= k).then_some(r)))
            .collect();
        let word = QaryWord::new(n as u32, symbols)?;
        match vt_decode_deletion(&word, n - 1, params.v_label()) {
            Ok(corr) => {
                let i = corr.position;
                out.push((complete(received, i, j, u_symbol, ell)?, DecodeTrace::new(case, n, i, j)));
            }
            Err(Error::DecodeFailure(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(())
}

/// U word of the top band of `x` over all of its columns.
fn band_word(x: &BitGrid, ell: usize, n: usize) -> Result<QaryWord> {
    let symbols = (1..=x.n_cols())
        .map(|c| (1..=ell).fold(0u32, |acc, r| (acc << 1) | u32::from(x.get(r, c))))
        .collect();
    QaryWord::new(n as u32, symbols)
}

/// Recovers the codeword of `C_n(params)` whose criss-cross deletion ball
/// contains `received`.
pub fn decode(received: &BitGrid, params: &CodeParams) -> Result<(BitGrid, DecodeTrace)> {
    let (n, ell) = (params.n, params.ell);
    check_received(received, n)?;
    let mut candidates = Vec::new();
    match classify(received, n)? {
        Classification::RowDeletedInU(i) => {
            let restored: Vec<u8> = (1..n).map(|c| col_parity_without(received, c, n)).collect();
            let z = received.insert(&[(i, restored)], &[])?;
            let corr = vt_decode_deletion(&band_word(&z, ell, n)?, n, params.u_label())?;
            let x = complete(received, i, corr.position, Some(corr.symbol), ell)?;
            candidates.push((x, DecodeTrace::new(DecodeCase::Case1a, n, i, corr.position)));
        }
        Classification::UIntact => {
            let corr = vt_decode_deletion(&band_word(received, ell, n)?, n, params.u_label())?;
            row_hypotheses(received, params, corr.position, Some(corr.symbol), DecodeCase::Case1b, &mut candidates)?;
        }
        Classification::LastColDeleted => {
            row_hypotheses(received, params, n, None, DecodeCase::Case2, &mut candidates)?;
        }
    }

    let mut found: Option<(BitGrid, DecodeTrace)> = None;
    for (x, trace) in candidates {
        if !is_codeword(&x, params)? {
            continue;
        }
        match &found {
            None => found = Some((x, trace)),
            Some((prev, _)) if *prev == x => {}
            Some((prev, _)) => {
                return Err(Error::Ambiguous(format!(
                    "two codewords of C_{n}({params}) explain the received array:\n{prev}{x}"
                )))
            }
        }
    }
    found.ok_or_else(|| Error::DecodeFailure(format!("no codeword of C_{n}({params}) is consistent with the received array")))
}
