//! Structure of (1,1)-criss-cross deletion balls: when two deletions
//! collide, good rows and columns, exact ball sizes and the good/bad census.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{binomial, deletion_ball_keys};
use crate::error::{invalid, Error, Result};
use crate::grid::BitGrid;
use crate::limits::MAX_CENSUS_GRIDS;

fn check_square(x: &BitGrid, min: usize) -> Result<usize> {
    let n = x.n_rows();
    if x.n_cols() != n || n < min {
        return invalid(format!("expected a square array of side >= {min}, got {:?}", x.dims()));
    }
    Ok(n)
}

/// Whether `X^{i1,j1} = X^{i2,j2}`, decided from the run structure of `X`
/// alone, without forming the two deleted arrays.
///
/// With `j1 <= j2`, `i_min = min(i1, i2)` and `i_max = max(i1, i2)`:
///
/// | rows                | columns                     | relation                 |
/// |---------------------|-----------------------------|--------------------------|
/// | `1..i_min`          | `j1..j2`                    | `X[i][j] = X[i][j+1]`    |
/// | `i_max+1..=n`       | `j1..j2`                    | `X[i][j] = X[i][j+1]`    |
/// | `i_min..i_max`      | `1..j1`, `j2+1..=n`         | `X[i][j] = X[i+1][j]`    |
/// | `i_min..i_max`      | `j1..j2` (`i1 <= i2`)       | `X[i][j] = X[i+1][j+1]`  |
/// | `i_min..i_max`      | `j1+1..=j2` (`i1 > i2`)     | `X[i][j] = X[i+1][j-1]`  |
///
/// The four corner blocks are unconstrained.
pub fn collision_structure(x: &BitGrid, i1: usize, j1: usize, i2: usize, j2: usize) -> Result<bool> {
    let n = check_square(x, 3)?;
    if [i1, j1, i2, j2].iter().any(|&v| !(1..=n).contains(&v)) {
        return invalid(format!("indices ({i1},{j1}), ({i2},{j2}) outside [1, {n}]"));
    }
    if (i1, j1) == (i2, j2) {
        return invalid("the two deletions must differ");
    }
    let ((i1, j1), (i2, j2)) = if j1 <= j2 { ((i1, j1), (i2, j2)) } else { ((i2, j2), (i1, j1)) };
    let (i_min, i_max) = (i1.min(i2), i1.max(i2));
    let x = |i: usize, j: usize| x.get(i, j);

    let row_runs = (1..i_min)
        .chain(i_max + 1..=n)
        .all(|i| (j1..j2).all(|j| x(i, j) == x(i, j + 1)));
    let col_runs = (i_min..i_max).all(|i| (1..j1).chain(j2 + 1..=n).all(|j| x(i, j) == x(i + 1, j)));
    let diagonal = (i_min..i_max).all(|i| {
        if i1 <= i2 {
            (j1..j2).all(|j| x(i, j) == x(i + 1, j + 1))
        } else {
            (j1 + 1..=j2).all(|j| x(i, j) == x(i + 1, j - 1))
        }
    });
    Ok(row_runs && col_runs && diagonal)
}

/// Single-deletion ball of an `n`-bit word (bit `k` is position `k + 1`).
fn word_deletions(w: u64, n: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (0..n)
        .map(|k| {
            let low = w & ((1u64 << k) - 1);
            let high = (w >> (k + 1)) << k;
            low | high
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Whether a column `b` is good next to the column `a` on its left: their
/// single-deletion balls are disjoint. Equivalently, `a` and `b` are not
/// identical up to a zero, up or down shift over one interval of rows.
pub fn is_good_pair(a: u64, b: u64, n: usize) -> bool {
    let da = word_deletions(a, n);
    word_deletions(b, n).iter().all(|w| da.binary_search(w).is_err())
}

/// Sorted good column indices `I_c` and good row indices `I_r`, both in `[2, n]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GoodIndexSets {
    pub good_cols: Vec<usize>,
    pub good_rows: Vec<usize>,
}

pub fn good_columns(x: &BitGrid) -> Vec<usize> {
    let n = x.n_rows();
    (2..=x.n_cols())
        .filter(|&j| is_good_pair(x.col_mask(j - 1), x.col_mask(j), n))
        .collect()
}

pub fn good_rows(x: &BitGrid) -> Vec<usize> {
    good_columns(&x.transpose())
}

pub fn good_index_sets(x: &BitGrid) -> GoodIndexSets {
    GoodIndexSets {
        good_cols: good_columns(x),
        good_rows: good_rows(x),
    }
}

/// Number of columns `b` that are not good next to a fixed left column `a`.
pub fn bad_column_choices(a: u64, n: usize) -> usize {
    (0..1u64 << n).filter(|&b| !is_good_pair(a, b, n)).count()
}

/// `b_n = 3 * C(n, 2)`: the bound on [`bad_column_choices`] for any neighbour.
pub fn bad_choice_bound(n: usize) -> u128 {
    3 * binomial(n, 2)
}

/// `|D_{1,1}(X)|`, exactly.
pub fn ball_size(x: &BitGrid) -> Result<usize> {
    check_square(x, 2)?;
    Ok(deletion_ball_keys(x, 1, 1)?.len())
}

/// `sqrt(2) * 2^(n^2 - 3n)`, an upper bound on the number of bad arrays that
/// is only established for `n >= 54`.
pub fn bad_bound_formula(n: usize) -> f64 {
    std::f64::consts::SQRT_2 * 2f64.powi((n * n) as i32 - 3 * n as i32)
}

pub const BAD_BOUND_MIN_N: usize = 54;

/// Good/bad split of all `2^(n^2)` arrays by `|D_1(X)| >= n^2 / 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub n: usize,
    pub num_good: u64,
    pub num_bad: u64,
    pub bad_bound_formula: f64,
    pub bad_bound_applicable: bool,
}

/// `n=<n> good=<count> bad=<count>`.
impl fmt::Display for CensusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} good={} bad={}", self.n, self.num_good, self.num_bad)
    }
}

/// Ball size of an array packed with 8 bits per row (`n <= 8`).
fn packed_ball_size(g: u64, n: usize, scratch: &mut Vec<u64>) -> usize {
    scratch.clear();
    for i in 0..n {
        // Drop row i, then column j from every remaining row.
        let low_rows = g & ((1u64 << (8 * i)) - 1);
        let high_rows = if i + 1 < 8 { (g >> (8 * (i + 1))) << (8 * i) } else { 0 };
        let rows = low_rows | high_rows;
        for j in 0..n {
            let keep_low = 0x0101_0101_0101_0101u64 * ((1u64 << j) - 1);
            let keep_high = 0x0101_0101_0101_0101u64 * (0xFEu64 << j & 0xFF);
            scratch.push((rows & keep_low) | ((rows & keep_high) >> 1));
        }
    }
    scratch.sort_unstable();
    scratch.dedup();
    scratch.len()
}

fn pack(bits: u64, n: usize) -> u64 {
    (0..n).fold(0, |acc, i| acc | (((bits >> (i * n)) & ((1 << n) - 1)) << (8 * i)))
}

pub fn census(n: usize) -> Result<CensusReport> {
    if n < 2 {
        return invalid("census needs n >= 2");
    }
    let total = 1u128.checked_shl((n * n) as u32).unwrap_or(u128::MAX);
    if n * n > 127 || total > MAX_CENSUS_GRIDS {
        return Err(Error::Refused {
            what: format!("census of all {n}x{n} arrays"),
            needed: total,
            limit: MAX_CENSUS_GRIDS,
        });
    }
    let num_good = (0..total as u64)
        .into_par_iter()
        .fold(
            || (0u64, Vec::with_capacity(n * n)),
            |(acc, mut scratch), bits| {
                let size = packed_ball_size(pack(bits, n), n, &mut scratch);
                (acc + u64::from(2 * size >= n * n), scratch)
            },
        )
        .map(|(acc, _)| acc)
        .sum::<u64>();
    Ok(CensusReport {
        n,
        num_good,
        num_bad: total as u64 - num_good,
        bad_bound_formula: bad_bound_formula(n),
        bad_bound_applicable: n >= BAD_BOUND_MIN_N,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_grids(n: usize) -> impl Iterator<Item = BitGrid> {
        (0..1u128 << (n * n)).map(move |b| BitGrid::from_bits(n, n, b).unwrap())
    }

    #[test]
    fn collision_examples() {
        let z = BitGrid::zeros(3, 3).unwrap();
        assert!(collision_structure(&z, 1, 1, 2, 2).unwrap());
        let mut one = z.clone();
        one.set(1, 1, 1);
        assert!(!collision_structure(&one, 1, 1, 2, 2).unwrap());
        assert_ne!(one.delete_row_col(1, 1).unwrap(), one.delete_row_col(2, 2).unwrap());
        assert!(collision_structure(&z, 1, 1, 1, 1).is_err());
        assert!(collision_structure(&z, 0, 1, 1, 1).is_err());
        assert!(collision_structure(&BitGrid::zeros(2, 2).unwrap(), 1, 1, 2, 2).is_err());
    }

    #[test]
    fn collision_structure_matches_deletion_n3() {
        let pairs: Vec<_> = (1..=3)
            .flat_map(|a| (1..=3).flat_map(move |b| (1..=3).flat_map(move |c| (1..=3).map(move |d| (a, b, c, d)))))
            .filter(|&(a, b, c, d)| (a, b) != (c, d))
            .collect();
        for x in all_grids(3) {
            for &(i1, j1, i2, j2) in &pairs {
                let equal = x.delete_row_col(i1, j1).unwrap() == x.delete_row_col(i2, j2).unwrap();
                assert_eq!(collision_structure(&x, i1, j1, i2, j2).unwrap(), equal, "{x:?} ({i1},{j1}) ({i2},{j2})");
            }
        }
    }

    /// With the top band running through row `i_min` the table is wrong.
    #[test]
    fn top_band_including_i_min_disagrees() {
        // Deleting (2,1) or (2,2) removes row 2 either way; row 2 itself is free.
        let mut y = BitGrid::from_rows(&[[0u8, 0, 1], [0, 1, 1], [1, 1, 0]]).unwrap();
        assert_eq!(y.delete_row_col(2, 1).unwrap(), y.delete_row_col(2, 2).unwrap());
        assert!(collision_structure(&y, 2, 1, 2, 2).unwrap());
        // Row i_min = 2 breaks the run X[2][1] = X[2][2], yet the deletions agree.
        assert_ne!(y.get(2, 1), y.get(2, 2));
        y.flip(1, 1);
        assert!(!collision_structure(&y, 2, 1, 2, 2).unwrap());
        assert_ne!(y.delete_row_col(2, 1).unwrap(), y.delete_row_col(2, 2).unwrap());
    }

    #[test]
    fn word_deletion_ball() {
        assert_eq!(word_deletions(0b000, 3), vec![0]);
        // 0b101 is 1,0,1 from position 1: deletions 01, 11, 10
        assert_eq!(word_deletions(0b101, 3), vec![0b01, 0b10, 0b11]);
    }

    #[test]
    fn good_column_examples() {
        let z = BitGrid::zeros(4, 4).unwrap();
        assert!(good_columns(&z).is_empty());
        let x = BitGrid::from_fn(4, 4, |_, j| j == 2).unwrap();
        assert!(good_columns(&x).contains(&2));
        // A down shift: 0,0,1,1 next to 0,1,1,0 share the deletion 0,1,1.
        assert!(!is_good_pair(0b1100, 0b0110, 4));
    }

    #[test]
    fn good_rows_use_the_transpose() {
        let x = BitGrid::from_fn(4, 4, |i, _| i == 3).unwrap();
        assert_eq!(good_rows(&x), vec![3, 4]);
        assert!(good_columns(&x).is_empty());
    }

    #[test]
    fn per_column_bound_at_five() {
        let worst = (0..32).map(|a| bad_column_choices(a, 5)).max().unwrap();
        assert!(worst as u128 <= bad_choice_bound(5));
    }

    #[test]
    fn ball_size_examples() {
        assert_eq!(ball_size(&BitGrid::zeros(4, 4).unwrap()).unwrap(), 1);
        let x = BitGrid::from_rows(&[[0u8, 1], [1, 0]]).unwrap();
        assert_eq!(ball_size(&x).unwrap(), 2);
    }

    #[test]
    fn packed_ball_matches_generic() {
        let mut scratch = Vec::new();
        for n in [2usize, 3] {
            for x in all_grids(n) {
                let size = packed_ball_size(pack(x.to_bits() as u64, n), n, &mut scratch);
                assert_eq!(size, ball_size(&x).unwrap());
            }
        }
        let mut rng = crate::rng::stream_rng(3, 0);
        for _ in 0..200 {
            use rand::Rng as _;
            let bits: u64 = rng.gen::<u64>() & ((1 << 25) - 1);
            let x = BitGrid::from_bits(5, 5, u128::from(bits)).unwrap();
            assert_eq!(packed_ball_size(pack(bits, 5), 5, &mut scratch), ball_size(&x).unwrap());
        }
    }

    #[test]
    fn census_partitions() {
        let c = census(3).unwrap();
        assert_eq!(c.num_good + c.num_bad, 512);
        let direct = all_grids(3).filter(|x| 2 * ball_size(x).unwrap() >= 9).count() as u64;
        assert_eq!(c.num_good, direct);
        assert!(!c.bad_bound_applicable);
        assert!(matches!(census(6), Err(Error::Refused { .. })));
        assert_eq!(census(2).unwrap().to_string(), format!("n=2 good={} bad={}", census(2).unwrap().num_good, census(2).unwrap().num_bad));
    }

    #[test]
    fn bad_bound_value() {
        assert_eq!(bad_bound_formula(4), std::f64::consts::SQRT_2 * 16.0);
    }
}
