//! Binary arrays with 1-based row/column addressing, criss-cross deletion and
//! insertion primitives, and the plain-text grid format.
//!
//! The text format is a header line `"<rows> <cols>"` followed by one line per
//! row of exactly `cols` characters from `{0,1}`. Every line, including the
//! last, ends in `\n`; no other whitespace is allowed.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// Widest supported row; rows are stored as bitmasks.
pub const MAX_COLS: usize = 64;

/// An `n_rows x n_cols` binary array. Entry `(i, j)` is row `i`, column `j`,
/// both starting at 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitGrid {
    n_rows: usize,
    n_cols: usize,
    // Bit `j - 1` of `rows[i - 1]` holds entry (i, j).
    rows: Vec<u64>,
}

impl BitGrid {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return invalid(format!("grid dimensions must be positive, got {n_rows}x{n_cols}"));
        }
        if n_cols > MAX_COLS {
            return invalid(format!("at most {MAX_COLS} columns supported, got {n_cols}"));
        }
        Ok(Self {
            n_rows,
            n_cols,
            rows: vec![0; n_rows],
        })
    }

    /// Builds a grid from rows of 0/1 values.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut grid = Self::zeros(n_rows, n_cols)?;
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return invalid(format!(
                    "row {} has {} entries, expected {n_cols}",
                    i + 1,
                    row.len()
                ));
            }
            for (j, &v) in row.iter().enumerate() {
                if v > 1 {
                    return invalid(format!("entry ({}, {}) = {v} is not a bit", i + 1, j + 1));
                }
                grid.rows[i] |= u64::from(v) << j;
            }
        }
        Ok(grid)
    }

    /// Builds a grid whose entry `(i, j)` is `f(i, j)` (1-based).
    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let mut grid = Self::zeros(n_rows, n_cols)?;
        for i in 1..=n_rows {
            for j in 1..=n_cols {
                if f(i, j) {
                    grid.rows[i - 1] |= 1 << (j - 1);
                }
            }
        }
        Ok(grid)
    }

    /// Row-major packing: bit `(i - 1) * n_cols + (j - 1)` holds entry `(i, j)`.
    /// Inverse of [`BitGrid::to_bits`].
    pub fn from_bits(n_rows: usize, n_cols: usize, bits: u128) -> Result<Self> {
        if n_rows * n_cols > 128 {
            return invalid("grid too large for 128-bit packing");
        }
        Self::from_fn(n_rows, n_cols, |i, j| (bits >> ((i - 1) * n_cols + j - 1)) & 1 == 1)
    }

    pub(crate) fn from_row_masks(n_cols: usize, rows: Vec<u64>) -> Self {
        debug_assert!(!rows.is_empty() && n_cols > 0 && n_cols <= MAX_COLS);
        debug_assert!(rows.iter().all(|&r| n_cols == 64 || r >> n_cols == 0));
        Self {
            n_rows: rows.len(),
            n_cols,
            rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.n_rows, self.n_cols)
    }

    /// Entry `(i, j)`, 1-based. Panics when out of range.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        assert!(
            (1..=self.n_rows).contains(&i) && (1..=self.n_cols).contains(&j),
            "index ({i}, {j}) out of range for {}x{} grid",
            self.n_rows,
            self.n_cols
        );
        ((self.rows[i - 1] >> (j - 1)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        assert!(
            (1..=self.n_rows).contains(&i) && (1..=self.n_cols).contains(&j),
            "index ({i}, {j}) out of range for {}x{} grid",
            self.n_rows,
            self.n_cols
        );
        let bit = 1u64 << (j - 1);
        if v & 1 == 1 {
            self.rows[i - 1] |= bit;
        } else {
            self.rows[i - 1] &= !bit;
        }
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        let v = self.get(i, j);
        self.set(i, j, v ^ 1);
    }

    /// Row `i` as a bitmask (bit `j - 1` is column `j`).
    pub fn row_mask(&self, i: usize) -> u64 {
        self.rows[i - 1]
    }

    /// Column `j` as a bitmask (bit `i - 1` is row `i`). Requires at most 64 rows.
    pub fn col_mask(&self, j: usize) -> u64 {
        assert!(self.n_rows <= 64);
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &r)| acc | (((r >> (j - 1)) & 1) << i))
    }

    pub fn row(&self, i: usize) -> Vec<u8> {
        (1..=self.n_cols).map(|j| self.get(i, j)).collect()
    }

    pub fn col(&self, j: usize) -> Vec<u8> {
        (1..=self.n_rows).map(|i| self.get(i, j)).collect()
    }

    pub fn count_ones(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    /// Row-major packing into an integer; see [`BitGrid::from_bits`].
    pub fn to_bits(&self) -> u128 {
        assert!(self.n_rows * self.n_cols <= 128, "grid too large for 128-bit packing");
        let mut out = 0u128;
        for (i, &r) in self.rows.iter().enumerate() {
            out |= u128::from(r) << (i * self.n_cols);
        }
        out
    }

    /// Entrywise XOR of two grids of equal dimensions.
    pub fn xor(&self, other: &BitGrid) -> Result<BitGrid> {
        if self.dims() != other.dims() {
            return invalid(format!(
                "xor of {}x{} and {}x{} grids",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            ));
        }
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| a ^ b).collect();
        Ok(Self::from_row_masks(self.n_cols, rows))
    }

    pub fn transpose(&self) -> BitGrid {
        assert!(self.n_rows <= MAX_COLS);
        let rows = (1..=self.n_cols).map(|j| self.col_mask(j)).collect();
        Self::from_row_masks(self.n_rows, rows)
    }

    /// Subarray of rows `i1..=i2` and columns `j1..=j2`.
    pub fn subgrid(&self, i1: usize, i2: usize, j1: usize, j2: usize) -> Result<BitGrid> {
        if i1 < 1 || i1 > i2 || i2 > self.n_rows || j1 < 1 || j1 > j2 || j2 > self.n_cols {
            return invalid(format!(
                "subarray rows {i1}..={i2}, cols {j1}..={j2} out of range for {}x{} grid",
                self.n_rows, self.n_cols
            ));
        }
        let width = j2 - j1 + 1;
        let mask = low_mask(width);
        let rows = self.rows[i1 - 1..i2].iter().map(|r| (r >> (j1 - 1)) & mask).collect();
        Ok(Self::from_row_masks(width, rows))
    }

    /// `X^{i,j}`: the grid with row `i` and column `j` removed.
    pub fn delete_row_col(&self, i: usize, j: usize) -> Result<BitGrid> {
        self.delete(&DeletionSpec::new([i], [j])?)
    }

    /// Removes the listed rows and columns; remaining entries keep their order.
    pub fn delete(&self, spec: &DeletionSpec) -> Result<BitGrid> {
        if let Some(&i) = spec.rows.iter().find(|&&i| i < 1 || i > self.n_rows) {
            return invalid(format!("row index {i} out of range [1, {}]", self.n_rows));
        }
        if let Some(&j) = spec.cols.iter().find(|&&j| j < 1 || j > self.n_cols) {
            return invalid(format!("column index {j} out of range [1, {}]", self.n_cols));
        }
        if spec.rows.len() >= self.n_rows || spec.cols.len() >= self.n_cols {
            return invalid(format!(
                "deleting {} rows and {} columns of a {}x{} grid leaves nothing",
                spec.rows.len(),
                spec.cols.len(),
                self.n_rows,
                self.n_cols
            ));
        }
        let new_cols = self.n_cols - spec.cols.len();
        let rows = self
            .rows
            .iter()
            .enumerate()
            .filter(|(i, _)| !spec.rows.contains(&(i + 1)))
            .map(|(_, &r)| remove_bits(r, self.n_cols, &spec.cols))
            .collect();
        Ok(Self::from_row_masks(new_cols, rows))
    }

    /// Inserts rows and columns.
    ///
    /// Positions are indices in the *final* grid, so deleting exactly those
    /// rows and columns recovers `self`. Rows are placed first: each row
    /// content has `self.n_cols()` entries. Columns are placed second: each
    /// column content has the final row count, and supplies the entries where
    /// inserted rows and columns cross.
    pub fn insert(&self, rows: &[(usize, Vec<u8>)], cols: &[(usize, Vec<u8>)]) -> Result<BitGrid> {
        let final_rows = self.n_rows + rows.len();
        let final_cols = self.n_cols + cols.len();
        if final_cols > MAX_COLS {
            return invalid(format!("at most {MAX_COLS} columns supported"));
        }
        positions(rows.iter().map(|r| r.0), final_rows, "row")?;
        let col_pos = positions(cols.iter().map(|c| c.0), final_cols, "column")?;

        let mut out = Vec::with_capacity(final_rows);
        let mut src = self.rows.iter();
        for i in 1..=final_rows {
            match rows.iter().find(|r| r.0 == i) {
                Some((_, content)) => {
                    if content.len() != self.n_cols {
                        return invalid(format!(
                            "inserted row at {i} has {} entries, expected {}",
                            content.len(),
                            self.n_cols
                        ));
                    }
                    out.push(bits_to_mask(content)?);
                }
                None => out.push(*src.next().expect("row count checked")),
            }
        }
        let mut grid_rows = out;
        // Spread existing bits around the inserted columns, then fill them.
        for r in grid_rows.iter_mut() {
            *r = spread_bits(*r, final_cols, &col_pos);
        }
        for (j, content) in cols {
            if content.len() != final_rows {
                return invalid(format!(
                    "inserted column at {j} has {} entries, expected {final_rows}",
                    content.len()
                ));
            }
            for (i, &v) in content.iter().enumerate() {
                if v > 1 {
                    return invalid(format!("inserted entry {v} is not a bit"));
                }
                grid_rows[i] |= u64::from(v) << (j - 1);
            }
        }
        Ok(Self::from_row_masks(final_cols, grid_rows))
    }
}

fn positions(it: impl Iterator<Item = usize>, final_dim: usize, what: &str) -> Result<BTreeSet<usize>> {
    let mut seen = BTreeSet::new();
    for p in it {
        if p < 1 || p > final_dim {
            return invalid(format!("{what} insertion position {p} out of range [1, {final_dim}]"));
        }
        if !seen.insert(p) {
            return invalid(format!("duplicate {what} insertion position {p}"));
        }
    }
    Ok(seen)
}

fn bits_to_mask(bits: &[u8]) -> Result<u64> {
    let mut m = 0u64;
    for (k, &b) in bits.iter().enumerate() {
        if b > 1 {
            return invalid(format!("inserted entry {b} is not a bit"));
        }
        m |= u64::from(b) << k;
    }
    Ok(m)
}

#[inline]
pub(crate) fn low_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

/// Removes the (1-based) bit positions in `drop` from a `width`-bit row.
fn remove_bits(row: u64, width: usize, drop: &BTreeSet<usize>) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    for j in 1..=width {
        if !drop.contains(&j) {
            out |= ((row >> (j - 1)) & 1) << k;
            k += 1;
        }
    }
    out
}

/// Places the bits of `row` at the positions of `[1, width]` not in `holes`,
/// leaving zeros at the holes.
fn spread_bits(row: u64, width: usize, holes: &BTreeSet<usize>) -> u64 {
    let mut out = 0u64;
    let mut k = 0;
    for j in 1..=width {
        if !holes.contains(&j) {
            out |= ((row >> k) & 1) << (j - 1);
            k += 1;
        }
    }
    out
}

/// Sets of row and column indices to delete (1-based, distinct).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionSpec {
    rows: BTreeSet<usize>,
    cols: BTreeSet<usize>,
}

impl DeletionSpec {
    pub fn new(rows: impl IntoIterator<Item = usize>, cols: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut r = BTreeSet::new();
        for i in rows {
            if !r.insert(i) {
                return invalid(format!("duplicate row index {i}"));
            }
        }
        let mut c = BTreeSet::new();
        for j in cols {
            if !c.insert(j) {
                return invalid(format!("duplicate column index {j}"));
            }
        }
        Ok(Self { rows: r, cols: c })
    }

    pub fn rows(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().copied()
    }

    pub fn cols(&self) -> impl Iterator<Item = usize> + '_ {
        self.cols.iter().copied()
    }

    /// `(t_r, t_c)`.
    pub fn counts(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }
}

impl fmt::Debug for BitGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitGrid {}x{} [", self.n_rows, self.n_cols)?;
        for i in 1..=self.n_rows {
            if i > 1 {
                f.write_str(" ")?;
            }
            for j in 1..=self.n_cols {
                write!(f, "{}", self.get(i, j))?;
            }
        }
        f.write_str("]")
    }
}

/// Formats in the grid text format.
impl fmt::Display for BitGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n_rows, self.n_cols)?;
        for i in 1..=self.n_rows {
            for j in 1..=self.n_cols {
                f.write_str(if self.get(i, j) == 1 { "1" } else { "0" })?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

pub fn format_grid(grid: &BitGrid) -> String {
    grid.to_string()
}

pub fn parse_grid(text: &str) -> Result<BitGrid> {
    let perr = |line: usize, msg: String| Error::Parse { line, msg };
    if !text.ends_with('\n') {
        let last = text.split('\n').count();
        return Err(perr(last, "missing trailing newline".into()));
    }
    let mut lines = text[..text.len() - 1].split('\n');
    let header = lines.next().unwrap_or("");
    let mut parts = header.split(' ');
    let mut dim = |name: &str| -> Result<usize> {
        let tok = parts.next().ok_or_else(|| perr(1, format!("missing {name}")))?;
        if tok.is_empty() || !tok.bytes().all(|b| b.is_ascii_digit()) {
            return Err(perr(1, format!("{name} {tok:?} is not a decimal integer")));
        }
        tok.parse::<usize>()
            .map_err(|e| perr(1, format!("{name} {tok:?}: {e}")))
    };
    let n_rows = dim("row count")?;
    let n_cols = dim("column count")?;
    if parts.next().is_some() {
        return Err(perr(1, "header must be exactly \"<rows> <cols>\"".into()));
    }
    if n_rows == 0 || n_cols == 0 {
        return Err(perr(1, "dimensions must be positive".into()));
    }
    if n_cols > MAX_COLS {
        return Err(perr(1, format!("at most {MAX_COLS} columns supported")));
    }
    let mut rows = Vec::with_capacity(n_rows);
    for i in 0..n_rows {
        let line_no = i + 2;
        let line = lines
            .next()
            .ok_or_else(|| perr(line_no, format!("expected {n_rows} rows, found {i}")))?;
        if line.len() != n_cols {
            return Err(perr(
                line_no,
                format!("row has {} characters, expected {n_cols}", line.len()),
            ));
        }
        let mut mask = 0u64;
        for (j, b) in line.bytes().enumerate() {
            match b {
                b'0' => {}
                b'1' => mask |= 1 << j,
                other => {
                    return Err(perr(
                        line_no,
                        format!("unexpected character {:?} at column {}", other as char, j + 1),
                    ))
                }
            }
        }
        rows.push(mask);
    }
    if lines.next().is_some() {
        return Err(perr(n_rows + 2, "trailing content after last row".into()));
    }
    Ok(BitGrid::from_row_masks(n_cols, rows))
}

impl FromStr for BitGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_grid(s)
    }
}
