//! The criss-cross deletion/insertion channel: exact ball enumeration and
//! ball intersection tests.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::error::{invalid, Error, Result};
use crate::grid::{BitGrid, DeletionSpec};
use crate::limits::{MAX_BALL_CANDIDATES, MAX_INSERTION_DIM};

/// A duplicate-free set of grids sharing one shape. Iteration is in
/// ascending grid order, so results are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSet {
    dims: (usize, usize),
    grids: BTreeSet<BitGrid>,
}

impl GridSet {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            dims: (n_rows, n_cols),
            grids: BTreeSet::new(),
        }
    }

    /// Adds a grid; returns false if it was already present.
    pub fn insert(&mut self, grid: BitGrid) -> Result<bool> {
        if grid.dims() != self.dims {
            return invalid(format!(
                "grid of shape {:?} added to a set of shape {:?}",
                grid.dims(),
                self.dims
            ));
        }
        Ok(self.grids.insert(grid))
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.grids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grids.is_empty()
    }

    pub fn contains(&self, grid: &BitGrid) -> bool {
        self.grids.contains(grid)
    }

    pub fn iter(&self) -> impl Iterator<Item = &BitGrid> {
        self.grids.iter()
    }

    /// True iff the sets share a grid. Sets of different shapes never do.
    pub fn intersects(&self, other: &GridSet) -> bool {
        self.dims == other.dims && self.grids.intersection(&other.grids).next().is_some()
    }

    pub fn intersection(&self, other: &GridSet) -> GridSet {
        GridSet {
            dims: self.dims,
            grids: if self.dims == other.dims {
                self.grids.intersection(&other.grids).cloned().collect()
            } else {
                BTreeSet::new()
            },
        }
    }

    fn from_keys(dims: (usize, usize), keys: &[u128]) -> GridSet {
        let grids = keys
            .iter()
            .map(|&k| BitGrid::from_bits(dims.0, dims.1, k).expect("key fits its shape"))
            .collect();
        GridSet { dims, grids }
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

fn check_deletion_args(x: &BitGrid, t_r: usize, t_c: usize) -> Result<()> {
    let (r, c) = x.dims();
    if (t_r >= r || t_c >= c) && (t_r, t_c) != (0, 0) {
        return invalid(format!(
            "cannot delete {t_r} rows and {t_c} columns from a {r}x{c} grid"
        ));
    }
    let needed = binomial(r, t_r) * binomial(c, t_c);
    if needed > MAX_BALL_CANDIDATES {
        return Err(Error::Refused {
            what: format!("deletion ball ({t_r},{t_c}) of a {r}x{c} grid"),
            needed,
            limit: MAX_BALL_CANDIDATES,
        });
    }
    Ok(())
}

/// Sorted, deduplicated packed keys (see [`BitGrid::to_bits`]) of the
/// `(t_r, t_c)` deletion ball.
pub fn deletion_ball_keys(x: &BitGrid, t_r: usize, t_c: usize) -> Result<Vec<u128>> {
    check_deletion_args(x, t_r, t_c)?;
    let (r, c) = x.dims();
    let mut keys = Vec::with_capacity((binomial(r, t_r) * binomial(c, t_c)) as usize);
    for rows in (1..=r).combinations(t_r) {
        for cols in (1..=c).combinations(t_c) {
            let spec = DeletionSpec::new(rows.iter().copied(), cols)?;
            keys.push(x.delete(&spec)?.to_bits());
        }
    }
    keys.sort_unstable();
    keys.dedup();
    Ok(keys)
}

/// `D_{t_r,t_c}(X)`: every grid reachable by deleting `t_r` rows and `t_c` columns.
pub fn deletion_ball(x: &BitGrid, t_r: usize, t_c: usize) -> Result<GridSet> {
    let keys = deletion_ball_keys(x, t_r, t_c)?;
    let dims = (x.n_rows() - t_r, x.n_cols() - t_c);
    Ok(GridSet::from_keys(dims, &keys))
}

fn insertion_candidates(x: &BitGrid, t_r: usize, t_c: usize) -> Result<u128> {
    let (r, c) = x.dims();
    let (fr, fc) = (r + t_r, c + t_c);
    let new_cells = fr * fc - r * c;
    let positions = binomial(fr, t_r) * binomial(fc, t_c);
    let needed = if new_cells >= 100 {
        u128::MAX
    } else {
        positions.saturating_mul(1u128 << new_cells)
    };
    if fr > MAX_INSERTION_DIM || fc > MAX_INSERTION_DIM || needed > MAX_BALL_CANDIDATES {
        return Err(Error::Refused {
            what: format!("insertion ball ({t_r},{t_c}) of a {r}x{c} grid"),
            needed,
            limit: MAX_BALL_CANDIDATES,
        });
    }
    Ok(needed)
}

/// Sorted, deduplicated packed keys of the `(t_r, t_c)` insertion ball.
pub fn insertion_ball_keys(x: &BitGrid, t_r: usize, t_c: usize) -> Result<Vec<u128>> {
    insertion_candidates(x, t_r, t_c)?;
    let (r, c) = x.dims();
    let (fr, fc) = (r + t_r, c + t_c);
    let mut keys = Vec::new();
    for new_rows in (1..=fr).combinations(t_r) {
        for new_cols in (1..=fc).combinations(t_c) {
            // Base grid: X spread around the holes, holes zero.
            let mut base = 0u128;
            let mut holes = Vec::new();
            let mut xi = 0;
            for zi in 1..=fr {
                let row_new = new_rows.contains(&zi);
                if !row_new {
                    xi += 1;
                }
                let mut xj = 0;
                for zj in 1..=fc {
                    let bit = (zi - 1) * fc + (zj - 1);
                    if row_new || new_cols.contains(&zj) {
                        holes.push(bit);
                    } else {
                        xj += 1;
                        base |= u128::from(x.get(xi, xj)) << bit;
                    }
                }
            }
            for content in 0u64..(1u64 << holes.len()) {
                let mut key = base;
                for (k, &bit) in holes.iter().enumerate() {
                    key |= u128::from((content >> k) & 1) << bit;
                }
                keys.push(key);
            }
        }
    }
    keys.sort_unstable();
    keys.dedup();
    Ok(keys)
}

/// `I_{t_r,t_c}(X)`: every grid reachable by inserting `t_r` rows and `t_c`
/// columns with arbitrary contents. Refuses jobs beyond the enumeration guard.
pub fn insertion_ball(x: &BitGrid, t_r: usize, t_c: usize) -> Result<GridSet> {
    let keys = insertion_ball_keys(x, t_r, t_c)?;
    Ok(GridSet::from_keys((x.n_rows() + t_r, x.n_cols() + t_c), &keys))
}

/// True iff two sorted key lists share an element.
pub fn sorted_keys_intersect(a: &[u128], b: &[u128]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallKind {
    Deletion,
    Insertion,
}

/// `D_{t}(X) ∩ D_{t'}(Y) ≠ ∅` for per-side amounts `t = (t_r, t_c)`.
pub fn deletion_balls_intersect(
    x: &BitGrid,
    tx: (usize, usize),
    y: &BitGrid,
    ty: (usize, usize),
) -> Result<bool> {
    let dx = (x.n_rows().wrapping_sub(tx.0), x.n_cols().wrapping_sub(tx.1));
    let dy = (y.n_rows().wrapping_sub(ty.0), y.n_cols().wrapping_sub(ty.1));
    if dx != dy {
        return invalid(format!(
            "deletion balls of shapes {dx:?} and {dy:?} cannot be compared"
        ));
    }
    let a = deletion_ball_keys(x, tx.0, tx.1)?;
    let b = deletion_ball_keys(y, ty.0, ty.1)?;
    Ok(sorted_keys_intersect(&a, &b))
}

/// `I_{t}(X) ∩ I_{t'}(Y) ≠ ∅`, decided without materializing either ball:
/// the balls meet iff some common supergrid `Z` contains `X` and `Y` as
/// row/column subsequences, with every cell of `Z` seen by both agreeing.
pub fn insertion_balls_intersect(
    x: &BitGrid,
    tx: (usize, usize),
    y: &BitGrid,
    ty: (usize, usize),
) -> Result<bool> {
    let zx = (x.n_rows() + tx.0, x.n_cols() + tx.1);
    let zy = (y.n_rows() + ty.0, y.n_cols() + ty.1);
    if zx != zy {
        return invalid(format!(
            "insertion balls of shapes {zx:?} and {zy:?} cannot be compared"
        ));
    }
    Ok(common_supergrid_exists(x, y, zx.0, zx.1))
}

/// Maps each supergrid index to the (0-based) index of the embedded grid,
/// for one choice of which supergrid lines the embedded grid occupies.
fn embeddings(total: usize, kept: usize) -> Vec<Vec<Option<usize>>> {
    (0..total)
        .combinations(kept)
        .map(|chosen| {
            let mut map = vec![None; total];
            for (k, &z) in chosen.iter().enumerate() {
                map[z] = Some(k);
            }
            map
        })
        .collect()
}

fn common_supergrid_exists(x: &BitGrid, y: &BitGrid, z_rows: usize, z_cols: usize) -> bool {
    let (xr, xc) = x.dims();
    let (yr, yc) = y.dims();
    let row_maps_x = embeddings(z_rows, xr);
    let row_maps_y = embeddings(z_rows, yr);
    let col_maps_x = embeddings(z_cols, xc);
    let col_maps_y = embeddings(z_cols, yc);

    // For each pair of column embeddings, the (x col, y col) pairs that land
    // on a shared supergrid column, as a mask over the xc*yc agreement table.
    let fast = xc * yc <= 128;
    let col_requirements: Vec<u128> = if fast {
        col_maps_x
            .iter()
            .cartesian_product(&col_maps_y)
            .map(|(mx, my)| {
                (0..z_cols).fold(0u128, |acc, z| match (mx[z], my[z]) {
                    (Some(a), Some(b)) => acc | 1u128 << (a * yc + b),
                    _ => acc,
                })
            })
            .collect()
    } else {
        Vec::new()
    };

    for rx in &row_maps_x {
        for ry in &row_maps_y {
            let shared: Vec<(usize, usize)> = (0..z_rows)
                .filter_map(|z| Some((rx[z]? + 1, ry[z]? + 1)))
                .collect();
            // agree[a][b]: column a of X equals column b of Y on the shared rows
            let agree = |a: usize, b: usize| shared.iter().all(|&(i, k)| x.get(i, a + 1) == y.get(k, b + 1));
            if fast {
                let mut table = 0u128;
                for a in 0..xc {
                    for b in 0..yc {
                        if agree(a, b) {
                            table |= 1u128 << (a * yc + b);
                        }
                    }
                }
                if col_requirements.iter().any(|&req| req & !table == 0) {
                    return true;
                }
            } else {
                let hit = col_maps_x.iter().cartesian_product(&col_maps_y).any(|(mx, my)| {
                    (0..z_cols).all(|z| match (mx[z], my[z]) {
                        (Some(a), Some(b)) => agree(a, b),
                        _ => true,
                    })
                });
                if hit {
                    return true;
                }
            }
        }
    }
    false
}

/// Ball intersection with the same `(t_r, t_c)` on both sides.
pub fn balls_intersect(x: &BitGrid, y: &BitGrid, kind: BallKind, t_r: usize, t_c: usize) -> Result<bool> {
    if x.dims() != y.dims() {
        return invalid(format!(
            "grids of shapes {:?} and {:?} have balls of different shapes",
            x.dims(),
            y.dims()
        ));
    }
    match kind {
        BallKind::Deletion => deletion_balls_intersect(x, (t_r, t_c), y, (t_r, t_c)),
        BallKind::Insertion => insertion_balls_intersect(x, (t_r, t_c), y, (t_r, t_c)),
    }
}
