//! Verification harness: exhaustive and seeded-sample checks of the
//! combinatorial statements behind the code, each reported as one
//! [`VerificationResult`] that serializes to a JSON line.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::index::sample as sample_indices;
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{
    bad_choice_bound, bad_column_choices, ball_size, collision_structure, good_columns, good_rows,
};
use crate::channel::{
    deletion_ball_keys, deletion_balls_intersect, insertion_ball_keys, insertion_balls_intersect,
    sorted_keys_intersect,
};
use crate::code::{
    count_structural, is_codeword, redundancy_bounds, resample_data, sample_codeword_variant, scr_lower_bound,
    uperp_closed_form, vperp_closed_form, CodeParams, StructuralKind, Variant,
};
use crate::decoder::decode;
use crate::error::{invalid, Error, Result};
use crate::grid::{format_grid, parse_grid, BitGrid, DeletionSpec};
use crate::limits::{MAX_CENSUS_GRIDS, MAX_INSERTION_DIM, MAX_STRUCTURAL_STATES};
use crate::rng::{stream_rng, Rng};
use crate::vt::{check_coset_disjointness, vt_coset_census};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
    Formula,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scope {
    pub mode: Mode,
    /// Parameter range covered, e.g. `"m=3"` or `"n in {8}"`.
    pub range: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Tallies gathered while checking.
    pub counts: BTreeMap<String, u64>,
}

impl Scope {
    fn new(mode: Mode, range: impl Into<String>) -> Self {
        Self {
            mode,
            range: range.into(),
            samples: None,
            seed: None,
            counts: BTreeMap::new(),
        }
    }

    fn sampled(range: impl Into<String>, samples: usize, seed: u64) -> Self {
        Self {
            samples: Some(samples as u64),
            seed: Some(seed),
            ..Self::new(Mode::Sampled, range)
        }
    }

    fn count(mut self, key: &str, value: u64) -> Self {
        self.counts.insert(key.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationResult {
    pub statement: String,
    pub scope: Scope,
    pub passed: bool,
    /// The first counterexample by index when `passed` is false.
    pub witness: Option<Value>,
}

impl VerificationResult {
    fn new(statement: &str, scope: Scope, witness: Option<Value>) -> Self {
        Self {
            statement: statement.to_string(),
            scope,
            passed: witness.is_none(),
            witness,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("results serialize")
    }

    pub fn count(&self, key: &str) -> u64 {
        self.scope.counts.get(key).copied().unwrap_or(0)
    }
}

/// Deterministic per-item seed, independent of scheduling.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    stream_rng(seed, index).gen()
}

fn bitset_get(bits: &[u64], k: usize) -> bool {
    bits[k / 64] >> (k % 64) & 1 == 1
}

/// Ball routine used on one side of an equivalence check.
pub type BallFn = dyn Fn(&BitGrid, usize, usize) -> Result<Vec<u128>> + Sync;

/// Balls used by [`verify_equivalence_with`]; the insertion side can be
/// replaced to exercise the harness itself.
pub struct EquivalenceOracles<'a> {
    pub deletion: &'a BallFn,
    pub insertion: &'a BallFn,
}

pub fn default_oracles() -> EquivalenceOracles<'static> {
    EquivalenceOracles {
        deletion: &deletion_ball_keys,
        insertion: &insertion_ball_keys,
    }
}

fn all_grids(rows: usize, cols: usize) -> Vec<BitGrid> {
    (0..1u128 << (rows * cols))
        .map(|b| BitGrid::from_bits(rows, cols, b).expect("valid shape"))
        .collect()
}

/// Relation `{(x, y) : ball(x) and ball(y) share an element}` as a bitset
/// over `xs.len() * ys.len()`.
fn meeting_pairs(xs: &[BitGrid], tx: (usize, usize), ys: &[BitGrid], ty: (usize, usize), ball: &BallFn) -> Result<Vec<u64>> {
    let y_balls: Vec<Vec<u128>> = ys.par_iter().map(|y| ball(y, ty.0, ty.1)).collect::<Result<_>>()?;
    let mut owners: HashMap<u128, Vec<u32>> = HashMap::new();
    for (k, keys) in y_balls.iter().enumerate() {
        for &key in keys {
            owners.entry(key).or_default().push(k as u32);
        }
    }
    let ny = ys.len();
    let words = ny.div_ceil(64);
    let rows: Vec<Vec<u64>> = xs
        .par_iter()
        .map(|x| {
            let mut row = vec![0u64; words];
            for key in ball(x, tx.0, tx.1)? {
                for &k in owners.get(&key).map(Vec::as_slice).unwrap_or(&[]) {
                    row[k as usize / 64] |= 1 << (k % 64);
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

fn compare_relations(
    statement: &str,
    range: String,
    xs: &[BitGrid],
    ys: &[BitGrid],
    del: &[u64],
    ins: &[u64],
) -> VerificationResult {
    let ny = ys.len();
    let words = ny.div_ceil(64);
    let (mut meet, mut mismatches) = (0u64, 0u64);
    let mut witness = None;
    for a in 0..xs.len() {
        for w in 0..words {
            let (d, i) = (del[a * words + w], ins[a * words + w]);
            meet += u64::from(d.count_ones());
            let diff = d ^ i;
            mismatches += u64::from(diff.count_ones());
            if diff != 0 && witness.is_none() {
                let b = w * 64 + diff.trailing_zeros() as usize;
                witness = Some(json!({
                    "x": format_grid(&xs[a]),
                    "y": format_grid(&ys[b]),
                    "deletion_balls_meet": bitset_get(del, a * words * 64 + b),
                    "insertion_balls_meet": bitset_get(ins, a * words * 64 + b),
                }));
            }
        }
    }
    let scope = Scope::new(Mode::Exhaustive, range)
        .count("pairs", (xs.len() * ny) as u64)
        .count("meeting_pairs", meet)
        .count("mismatches", mismatches);
    VerificationResult::new(statement, scope, witness)
}

/// Exhaustive check over all pairs of `m x m` arrays that deletion balls meet
/// exactly when insertion balls meet, for one row and one column
/// (`ball-equivalence`), one row or one column alone (`row-ball-equivalence`,
/// `col-ball-equivalence`), and mixed shapes `(m+1) x m` against `m x (m+1)`
/// (`mixed-ball-equivalence`).
pub fn verify_equivalence(m: usize) -> Result<Vec<VerificationResult>> {
    verify_equivalence_with(m, &default_oracles())
}

pub fn verify_equivalence_with(m: usize, oracles: &EquivalenceOracles) -> Result<Vec<VerificationResult>> {
    if !(2..=3).contains(&m) {
        return invalid(format!("exhaustive equivalence needs 2 <= m <= 3, got {m}"));
    }
    let square = all_grids(m, m);
    let tall = all_grids(m + 1, m);
    let wide = all_grids(m, m + 1);
    let mut out = Vec::new();
    for (statement, t) in [("ball-equivalence", (1, 1)), ("row-ball-equivalence", (1, 0)), ("col-ball-equivalence", (0, 1))] {
        let del = meeting_pairs(&square, t, &square, t, oracles.deletion)?;
        let ins = meeting_pairs(&square, t, &square, t, oracles.insertion)?;
        out.push(compare_relations(statement, format!("m={m}"), &square, &square, &del, &ins));
    }
    let del = meeting_pairs(&tall, (1, 0), &wide, (0, 1), oracles.deletion)?;
    let ins = meeting_pairs(&tall, (0, 1), &wide, (1, 0), oracles.insertion)?;
    out.push(compare_relations("mixed-ball-equivalence", format!("m={m}"), &tall, &wide, &del, &ins));
    Ok(out)
}

fn random_grid(rng: &mut Rng, rows: usize, cols: usize) -> BitGrid {
    BitGrid::from_fn(rows, cols, |_, _| rng.gen()).expect("valid shape")
}

/// A partner for `x`: an unrelated array, a one-bit flip, or the result of
/// deleting `t` rows and columns and inserting `t` random ones back.
fn partner(rng: &mut Rng, x: &BitGrid, t: usize, kind: u64) -> Result<BitGrid> {
    let (r, c) = x.dims();
    match kind % 3 {
        0 => Ok(random_grid(rng, r, c)),
        1 => {
            let mut y = x.clone();
            y.flip(rng.gen_range(1..=r), rng.gen_range(1..=c));
            Ok(y)
        }
        _ => {
            let rows: Vec<usize> = sample_indices(rng, r, t).into_iter().map(|k| k + 1).collect();
            let cols: Vec<usize> = sample_indices(rng, c, t).into_iter().map(|k| k + 1).collect();
            let d = x.delete(&DeletionSpec::new(rows, cols)?)?;
            let mut new_rows: Vec<usize> = sample_indices(rng, r, t).into_iter().map(|k| k + 1).collect();
            let mut new_cols: Vec<usize> = sample_indices(rng, c, t).into_iter().map(|k| k + 1).collect();
            new_rows.sort_unstable();
            new_cols.sort_unstable();
            let row_data: Vec<(usize, Vec<u8>)> =
                new_rows.iter().map(|&i| (i, (0..c - t).map(|_| rng.gen_range(0..2)).collect())).collect();
            let col_data: Vec<(usize, Vec<u8>)> =
                new_cols.iter().map(|&j| (j, (0..r).map(|_| rng.gen_range(0..2)).collect())).collect();
            d.insert(&row_data, &col_data)
        }
    }
}

fn sampled_equivalence(statement: &str, m: usize, t: usize, samples: usize, seed: u64) -> Result<VerificationResult> {
    if m < t + 1 {
        return invalid(format!("need m >= t + 1, got m={m} t={t}"));
    }
    if m + t > MAX_INSERTION_DIM {
        return Err(Error::Refused {
            what: format!("insertion balls of {m}x{m} arrays with t={t}"),
            needed: (m + t) as u128,
            limit: MAX_INSERTION_DIM as u128,
        });
    }
    let outcomes: Vec<(bool, bool, BitGrid, BitGrid)> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k);
            let x = random_grid(&mut rng, m, m);
            let y = partner(&mut rng, &x, t, k)?;
            let d = deletion_balls_intersect(&x, (t, t), &y, (t, t))?;
            let i = insertion_balls_intersect(&x, (t, t), &y, (t, t))?;
            Ok((d, i, x, y))
        })
        .collect::<Result<_>>()?;
    let meet = outcomes.iter().filter(|o| o.0).count() as u64;
    let mismatches = outcomes.iter().filter(|o| o.0 != o.1).count() as u64;
    let witness = outcomes.iter().find(|o| o.0 != o.1).map(|(d, i, x, y)| {
        json!({"x": format_grid(x), "y": format_grid(y), "t": t,
               "deletion_balls_meet": d, "insertion_balls_meet": i})
    });
    let scope = Scope::sampled(format!("m={m} t={t}"), samples, seed)
        .count("meeting_pairs", meet)
        .count("mismatches", mismatches);
    Ok(VerificationResult::new(statement, scope, witness))
}

/// Sampled form of [`verify_equivalence`] for one row and column at larger `m`.
pub fn verify_equivalence_sampled(m: usize, samples: usize, seed: u64) -> Result<VerificationResult> {
    sampled_equivalence("ball-equivalence", m, 1, samples, seed)
}

/// `D_t(X) ∩ D_t(Y) ≠ ∅  ⇔  I_t(X) ∩ I_t(Y) ≠ ∅` on sampled pairs, with `t`
/// rows and `t` columns. A third of the pairs are related by construction.
pub fn verify_t_equivalence(m: usize, t: usize, samples: usize, seed: u64) -> Result<VerificationResult> {
    sampled_equivalence("t-equivalence", m, t, samples, seed)
}

fn ordered_pairs(n: usize) -> Vec<(usize, usize, usize, usize)> {
    let cells: Vec<(usize, usize)> = (1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for (a, &(i1, j1)) in cells.iter().enumerate() {
        for &(i2, j2) in &cells[a + 1..] {
            out.push((i1, j1, i2, j2));
        }
    }
    out
}

/// The run-structure test in [`collision_structure`] agrees with direct
/// comparison of the two deleted arrays, for every array (or `samples`
/// random arrays) and every pair of deletions.
pub fn verify_del_pattern(n: usize, samples: Option<usize>, seed: u64) -> Result<VerificationResult> {
    if n < 3 {
        return invalid("the collision pattern needs n >= 3");
    }
    let pairs = ordered_pairs(n);
    let total = 1u128.checked_shl((n * n) as u32).unwrap_or(u128::MAX);
    let (grids, scope): (Box<dyn Fn(u64) -> BitGrid + Sync>, Scope) = match samples {
        None => {
            if total > MAX_CENSUS_GRIDS {
                return Err(Error::Refused {
                    what: format!("all {n}x{n} arrays"),
                    needed: total,
                    limit: MAX_CENSUS_GRIDS,
                });
            }
            (
                Box::new(move |k| BitGrid::from_bits(n, n, u128::from(k)).expect("valid shape")),
                Scope::new(Mode::Exhaustive, format!("n={n}")),
            )
        }
        Some(s) => (
            Box::new(move |k| random_grid(&mut stream_rng(seed, k), n, n)),
            Scope::sampled(format!("n={n}"), s, seed),
        ),
    };
    let count = samples.map_or(total as u64, |s| s as u64);
    let per_grid: Vec<(u64, u64, Option<Value>)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let x = grids(k);
            let dels: Vec<BitGrid> = (1..=n)
                .flat_map(|i| (1..=n).map(move |j| (i, j)))
                .map(|(i, j)| x.delete_row_col(i, j))
                .collect::<Result<_>>()?;
            let (mut collisions, mut mismatches, mut witness) = (0, 0, None);
            for &(i1, j1, i2, j2) in &pairs {
                let equal = dels[(i1 - 1) * n + j1 - 1] == dels[(i2 - 1) * n + j2 - 1];
                let predicted = collision_structure(&x, i1, j1, i2, j2)?;
                collisions += u64::from(equal);
                if equal != predicted {
                    mismatches += 1;
                    witness.get_or_insert_with(|| {
                        json!({"x": format_grid(&x), "deletions": [[i1, j1], [i2, j2]],
                               "equal": equal, "predicted": predicted})
                    });
                }
            }
            Ok((collisions, mismatches, witness))
        })
        .collect::<Result<_>>()?;
    let collisions = per_grid.iter().map(|p| p.0).sum();
    let mismatches = per_grid.iter().map(|p| p.1).sum();
    let witness = per_grid.into_iter().find_map(|p| p.2);
    let scope = scope
        .count("arrays", count)
        .count("pairs_checked", count * pairs.len() as u64)
        .count("colliding_pairs", collisions)
        .count("mismatches", mismatches);
    Ok(VerificationResult::new("collision-pattern", scope, witness))
}

/// `|D_1(X)| >= |I_c| * |I_r|` and, when both index sets have at least
/// `n / sqrt 2` elements, `|D_1(X)| >= n^2 / 2`.
pub fn verify_ball_bound(n: usize, samples: Option<usize>, seed: u64) -> Result<VerificationResult> {
    if n < 2 {
        return invalid("the ball bound needs n >= 2");
    }
    let total = 1u128.checked_shl((n * n) as u32).unwrap_or(u128::MAX);
    let count = match samples {
        None if total > MAX_CENSUS_GRIDS => {
            return Err(Error::Refused {
                what: format!("all {n}x{n} arrays"),
                needed: total,
                limit: MAX_CENSUS_GRIDS,
            })
        }
        None => total as u64,
        Some(s) => s as u64,
    };
    let threshold = n as f64 / std::f64::consts::SQRT_2;
    let outcomes: Vec<(bool, bool, Option<Value>)> = (0..count)
        .into_par_iter()
        .map(|k| {
            let x = match samples {
                None => BitGrid::from_bits(n, n, u128::from(k))?,
                Some(_) => random_grid(&mut stream_rng(seed, k), n, n),
            };
            let size = ball_size(&x)?;
            let (gc, gr) = (good_columns(&x).len(), good_rows(&x).len());
            let product_ok = size >= gc * gr;
            let both_large = gc as f64 >= threshold && gr as f64 >= threshold;
            let threshold_ok = !both_large || 2 * size >= n * n;
            let witness = (!product_ok || !threshold_ok)
                .then(|| json!({"x": format_grid(&x), "ball_size": size, "good_cols": gc, "good_rows": gr}));
            Ok((both_large, witness.is_none(), witness))
        })
        .collect::<Result<_>>()?;
    let violations = outcomes.iter().filter(|o| !o.1).count() as u64;
    let large = outcomes.iter().filter(|o| o.0).count() as u64;
    let witness = outcomes.into_iter().find_map(|o| o.2);
    let scope = match samples {
        None => Scope::new(Mode::Exhaustive, format!("n={n}")),
        Some(s) => Scope::sampled(format!("n={n}"), s, seed),
    }
    .count("arrays", count)
    .count("above_threshold", large)
    .count("violations", violations);
    Ok(VerificationResult::new("ball-bound", scope, witness))
}

/// For every left neighbour, at most `3 * C(n, 2)` columns are not good.
pub fn verify_column_choice_bound(n: usize) -> Result<VerificationResult> {
    if !(2..=12).contains(&n) {
        return invalid(format!("column choice bound is enumerated for 2 <= n <= 12, got {n}"));
    }
    let worst: Vec<usize> = (0..1u64 << n).into_par_iter().map(|a| bad_column_choices(a, n)).collect();
    let (arg, &max) = worst.iter().enumerate().max_by_key(|&(k, v)| (*v, std::cmp::Reverse(k))).expect("nonempty");
    let bound = bad_choice_bound(n);
    let witness = (max as u128 > bound).then(|| json!({"left_column": arg, "bad_choices": max, "bound": bound as u64}));
    let scope = Scope::new(Mode::Exhaustive, format!("n={n}"))
        .count("worst_bad_choices", max as u64)
        .count("bound", bound as u64);
    Ok(VerificationResult::new("column-choice-bound", scope, witness))
}

/// Independent decoder reference: every way of inserting a row and a column
/// into `received` that yields a codeword of `params`.
///
/// For each insertion position the unknown cells are constrained by the
/// linear parts of the code (parities and fixed bits); the affine solution
/// space is solved by elimination over GF(2) and each solution is tested
/// for full membership.
pub fn completion_search(received: &BitGrid, params: &CodeParams) -> Result<Vec<BitGrid>> {
    let n = params.n;
    let ell = params.ell;
    if received.dims() != (n - 1, n - 1) {
        return invalid(format!("expected a {0}x{0} received array", n - 1));
    }
    let mut found = BTreeSet::new();
    for i in 1..=n {
        for j in 1..=n {
            let base = received.insert(&[(i, vec![0; n - 1])], &[(j, vec![0; n])])?;
            let cells: Vec<(usize, usize)> = (1..=n)
                .map(|c| (i, c))
                .chain((1..=n).filter(|&r| r != i).map(|r| (r, j)))
                .collect();
            let var = |r: usize, c: usize| cells.iter().position(|&x| x == (r, c));

            let mut eqs: Vec<Equation> = Vec::new();
            let mut add = |line: Vec<(usize, usize)>, rhs: u8| {
                let (mut mask, mut value) = (0u128, rhs);
                for (r, c) in line {
                    match var(r, c) {
                        Some(v) => mask ^= 1 << v,
                        None => value ^= base.get(r, c),
                    }
                }
                eqs.push((mask, value));
            };
            for r in ell + 1..n {
                add((1..=n).map(|c| (r, c)).collect(), 0);
            }
            for c in 1..=n {
                add((1..=n).map(|r| (r, c)).collect(), 0);
            }
            for r in 1..=ell + 1 {
                add(vec![(r, n)], ((r - 1) % 2) as u8);
            }
            for r in 1..=4 {
                add(vec![(r, n - 1)], 0);
            }

            let Some((pivots, reduced)) = eliminate(eqs, cells.len()) else {
                continue;
            };
            let free: Vec<usize> = (0..cells.len()).filter(|v| !pivots.contains_key(v)).collect();
            if free.len() > 20 {
                return Err(Error::Refused {
                    what: "completion search".into(),
                    needed: 1u128 << free.len(),
                    limit: 1 << 20,
                });
            }
            for assignment in 0..1u64 << free.len() {
                let mut values = 0u128;
                for (k, &v) in free.iter().enumerate() {
                    values |= u128::from((assignment >> k) & 1) << v;
                }
                for (&v, &row) in &pivots {
                    let (mask, rhs) = reduced[row];
                    let rest = (mask & !(1u128 << v) & values).count_ones() as u8 & 1;
                    values |= u128::from(rhs ^ rest) << v;
                }
                let mut y = base.clone();
                for (v, &(r, c)) in cells.iter().enumerate() {
                    y.set(r, c, ((values >> v) & 1) as u8);
                }
                if is_codeword(&y, params)? {
                    found.insert(y);
                }
            }
        }
    }
    Ok(found.into_iter().collect())
}

/// Mask over the unknowns and right-hand side.
type Equation = (u128, u8);

/// Reduced row echelon form. Returns pivot variable to equation index, or
/// `None` when the system is inconsistent. Pivot rows are fully reduced, so
/// each pivot depends on free variables only.
fn eliminate(mut eqs: Vec<Equation>, vars: usize) -> Option<(BTreeMap<usize, usize>, Vec<Equation>)> {
    let mut pivots = BTreeMap::new();
    let mut row = 0;
    for v in 0..vars {
        let Some(p) = (row..eqs.len()).find(|&k| eqs[k].0 >> v & 1 == 1) else {
            continue;
        };
        eqs.swap(row, p);
        let (pm, pr) = eqs[row];
        for (k, eq) in eqs.iter_mut().enumerate() {
            if k != row && eq.0 >> v & 1 == 1 {
                eq.0 ^= pm;
                eq.1 ^= pr;
            }
        }
        pivots.insert(v, row);
        row += 1;
    }
    if eqs[row..].iter().any(|&(m, r)| m == 0 && r == 1) {
        return None;
    }
    Some((pivots, eqs))
}

fn sample_case(n: usize, seed: u64, k: u64, variant: Variant) -> Result<(BitGrid, CodeParams)> {
    sample_codeword_variant(n, sub_seed(seed, k), variant)
}

fn variant_name(variant: Variant) -> &'static str {
    match variant {
        Variant::Published => "published",
        Variant::Repaired => "repaired",
    }
}

/// Decodes every one of the `n^2` deletions of `num_codewords` sampled codewords.
pub fn verify_decoder_round_trip(n: usize, num_codewords: usize, seed: u64, variant: Variant) -> Result<VerificationResult> {
    // (decoded, ambiguous, failed, first witness) per codeword
    type Tally = (u64, u64, u64, Option<Value>);
    let per_word: Vec<Tally> = (0..num_codewords as u64)
        .into_par_iter()
        .map(|k| {
            let (x, p) = sample_case(n, seed, k, variant)?;
            let (mut ok, mut ambiguous, mut wrong, mut witness) = (0, 0, 0, None);
            for i in 1..=n {
                for j in 1..=n {
                    let outcome = decode(&x.delete_row_col(i, j)?, &p);
                    let error = match outcome {
                        Ok((y, _)) if y == x => {
                            ok += 1;
                            continue;
                        }
                        Ok(_) => {
                            wrong += 1;
                            "decoded to a different array".to_string()
                        }
                        Err(Error::Ambiguous(_)) => {
                            ambiguous += 1;
                            "ambiguous".to_string()
                        }
                        Err(e) => {
                            wrong += 1;
                            e.to_string()
                        }
                    };
                    witness.get_or_insert_with(|| {
                        json!({"codeword": format_grid(&x), "params": p.to_string(),
                               "row": i, "col": j, "error": error})
                    });
                }
            }
            Ok((ok, ambiguous, wrong, witness))
        })
        .collect::<Result<_>>()?;
    let sum = |f: fn(&Tally) -> u64| per_word.iter().map(f).sum::<u64>();
    let scope = Scope::sampled(format!("n={n} code={}", variant_name(variant)), num_codewords, seed)
        .count("deletions", (num_codewords * n * n) as u64)
        .count("decoded", sum(|w| w.0))
        .count("ambiguous", sum(|w| w.1))
        .count("failed", sum(|w| w.2))
        .count("codewords_with_ambiguity", per_word.iter().filter(|w| w.1 > 0).count() as u64);
    let witness = per_word.into_iter().find_map(|w| w.3);
    Ok(VerificationResult::new("decoder-round-trip", scope, witness))
}

/// All single criss-cross deletions of an array, as grids.
fn ball_grids(x: &BitGrid) -> Result<BTreeSet<BitGrid>> {
    let (r, c) = x.dims();
    let mut out = BTreeSet::new();
    for i in 1..=r {
        for j in 1..=c {
            out.insert(x.delete_row_col(i, j)?);
        }
    }
    Ok(out)
}

/// Same-parameter partners of a codeword: the free data bits redrawn, rows
/// `l+1` and `l+2` exchanged, and rows `n-1` and `n` exchanged outside one
/// column. Only partners that are codewords of `params` are kept.
fn sibling_candidates(x: &BitGrid, params: &CodeParams, seed: u64) -> Result<Vec<BitGrid>> {
    let (n, ell) = (params.n, params.ell);
    let swap_rows = |r1: usize, r2: usize, keep: Option<usize>| {
        let mut y = x.clone();
        for c in (1..=n).filter(|&c| Some(c) != keep) {
            y.set(r1, c, x.get(r2, c));
            y.set(r2, c, x.get(r1, c));
        }
        y
    };
    let mut out = vec![resample_data(x, seed)?, swap_rows(ell + 1, ell + 2, None)];
    out.extend((1..=n).map(|j| swap_rows(n - 1, n, Some(j))));
    let mut kept = Vec::new();
    for y in out {
        if y != *x && !kept.contains(&y) && is_codeword(&y, params)? {
            kept.push(y);
        }
    }
    Ok(kept)
}

/// Sampled codeword pairs with identical parameters have disjoint balls.
pub fn verify_ball_disjointness(n: usize, num_codewords: usize, seed: u64, variant: Variant) -> Result<VerificationResult> {
    let outcomes: Vec<(u64, u64, Option<Value>)> = (0..num_codewords as u64)
        .into_par_iter()
        .map(|k| {
            let (x, p) = sample_case(n, seed, k, variant)?;
            let partners = sibling_candidates(&x, &p, sub_seed(seed ^ 0x5eed, k))?;
            let bx = ball_grids(&x)?;
            let (mut overlaps, mut witness) = (0, None);
            for y in &partners {
                if let Some(common) = bx.intersection(&ball_grids(y)?).next() {
                    overlaps += 1;
                    witness.get_or_insert_with(|| {
                        json!({"x": format_grid(&x), "y": format_grid(y), "params": p.to_string(),
                               "common": format_grid(common)})
                    });
                }
            }
            Ok((partners.len() as u64, overlaps, witness))
        })
        .collect::<Result<_>>()?;
    let scope = Scope::sampled(format!("n={n} code={}", variant_name(variant)), num_codewords, seed)
        .count("pairs", outcomes.iter().map(|o| o.0).sum())
        .count("overlapping_pairs", outcomes.iter().map(|o| o.1).sum());
    let witness = outcomes.into_iter().find_map(|o| o.2);
    Ok(VerificationResult::new("code-ball-disjointness", scope, witness))
}

/// Decoder output against [`completion_search`] on sampled (codeword,
/// deletion) cases. They agree when the decoder returns the unique survivor,
/// or reports ambiguity exactly when there are several.
pub fn verify_decoder_oracle(n: usize, cases: usize, seed: u64, variant: Variant) -> Result<VerificationResult> {
    let outcomes: Vec<(usize, Option<Value>)> = (0..cases as u64)
        .into_par_iter()
        .map(|k| {
            let (x, p) = sample_case(n, seed, k, variant)?;
            let mut rng = stream_rng(seed ^ 0xdec0de, k);
            let (i, j) = (rng.gen_range(1..=n), rng.gen_range(1..=n));
            let r = x.delete_row_col(i, j)?;
            let survivors = completion_search(&r, &p)?;
            let decoded = decode(&r, &p);
            let agree = match (&decoded, survivors.as_slice()) {
                (Ok((y, _)), [only]) => y == only,
                (Err(Error::Ambiguous(_)), s) => s.len() > 1,
                _ => false,
            } && survivors.contains(&x);
            let witness = (!agree).then(|| {
                json!({"codeword": format_grid(&x), "params": p.to_string(), "row": i, "col": j,
                       "survivors": survivors.len(),
                       "decoder": match &decoded { Ok(_) => "decoded".to_string(), Err(e) => e.to_string() }})
            });
            Ok((survivors.len(), witness))
        })
        .collect::<Result<_>>()?;
    let unique = outcomes.iter().filter(|o| o.0 == 1).count() as u64;
    let several = outcomes.iter().filter(|o| o.0 > 1).count() as u64;
    let disagreements = outcomes.iter().filter(|o| o.1.is_some()).count() as u64;
    let scope = Scope::sampled(format!("n={n} code={}", variant_name(variant)), cases, seed)
        .count("unique_survivor", unique)
        .count("several_survivors", several)
        .count("disagreements", disagreements);
    let witness = outcomes.into_iter().find_map(|o| o.1);
    Ok(VerificationResult::new("decoder-oracle", scope, witness))
}

/// Round trip, same-code ball disjointness and the oracle cross-check.
pub fn verify_code(n: usize, num_codewords: usize, seed: u64, variant: Variant) -> Result<Vec<VerificationResult>> {
    if n != 8 && n != 16 {
        return invalid(format!("code verification runs at n in {{8, 16}}, got {n}"));
    }
    let oracle_cases = num_codewords.clamp(1, 200);
    Ok(vec![
        verify_decoder_round_trip(n, num_codewords, seed, variant)?,
        verify_ball_disjointness(n, num_codewords, seed, variant)?,
        verify_decoder_oracle(n, oracle_cases, seed, variant)?,
    ])
}

/// Exact structural counts against their closed forms, and the inequality
/// chain behind the square bound.
pub fn verify_counts() -> Result<Vec<VerificationResult>> {
    let mut out = Vec::new();

    for (kind, statement, min_gap) in [(StructuralKind::Uperp, "count-uperp", 1), (StructuralKind::Vperp, "count-vperp", 2)] {
        let mut scope = Scope::new(Mode::Exhaustive, String::new());
        let mut witness = None;
        let mut covered = Vec::new();
        for ell in 1..=24usize {
            for n in ell + min_gap..=64 {
                let bits = ell * (n - ell - (min_gap - 1));
                if bits > MAX_STRUCTURAL_STATES.trailing_zeros() as usize {
                    break;
                }
                let got = count_structural(kind, n, ell)?.count;
                let want = match kind {
                    StructuralKind::Uperp => uperp_closed_form(n, ell),
                    _ => vperp_closed_form(n, ell),
                };
                covered.push(format!("({n},{ell})"));
                if got != want && witness.is_none() {
                    witness = Some(json!({"n": n, "ell": ell, "enumerated": got as u64, "closed_form": want as u64}));
                }
            }
        }
        scope.range = format!("(n,ell) in {{{}}}", covered.join(","));
        scope = scope.count("cases", covered.len() as u64);
        out.push(VerificationResult::new(statement, scope, witness));
    }

    // Redundancy of the rectangles at n = 2^ell where enumeration is feasible.
    {
        let (n, ell) = (8usize, 3usize);
        let r_u = (ell * (n - ell)) as f64 - (count_structural(StructuralKind::Uperp, n, ell)?.count as f64).log2();
        let r_v = (ell * (n - ell - 1)) as f64 - (count_structural(StructuralKind::Vperp, n, ell)?.count as f64).log2();
        let ratio = (n as f64 / (n as f64 - 1.0)).log2();
        let want_u = (n - ell - 1) as f64 * ratio;
        let want_v = (n - ell - 2) as f64 * ratio + 1.0;
        let ok = (r_u - want_u).abs() < 1e-9 && (r_v - want_v).abs() < 1e-9;
        let witness = (!ok).then(|| json!({"r_uperp": r_u, "want_uperp": want_u, "r_vperp": r_v, "want_vperp": want_v}));
        out.push(VerificationResult::new("redundancy-rectangles", Scope::new(Mode::Exhaustive, "n=8"), witness));
    }

    {
        let mut witness = None;
        let mut scope = Scope::new(Mode::Exhaustive, "ell in {2,3,4}");
        for ell in 2..=4 {
            let got = count_structural(StructuralKind::Scr, 0, ell)?.count;
            scope = scope.count(&format!("scr_{ell}"), got as u64);
            let exact_ok = ell != 2 || got == 10;
            if (got < scr_lower_bound(ell) || !exact_ok) && witness.is_none() {
                witness = Some(json!({"ell": ell, "count": got as u64, "lower_bound": scr_lower_bound(ell) as u64}));
            }
        }
        out.push(VerificationResult::new("count-scr", scope, witness));
    }

    {
        // R = l^2 - log2 |S_int| < l + 5 on the l x l square.
        let mut witness = None;
        let mut scope = Scope::new(Mode::Exhaustive, "ell in {3,4,5}");
        for ell in 3..=5 {
            let got = count_structural(StructuralKind::Sint, 0, ell)?.count;
            scope = scope.count(&format!("sint_{ell}"), got as u64);
            let r = (ell * ell) as f64 - (got as f64).log2();
            if r >= (ell + 5) as f64 && witness.is_none() {
                witness = Some(json!({"ell": ell, "count": got as u64, "redundancy": r}));
            }
        }
        out.push(VerificationResult::new("redundancy-square", scope, witness));
    }

    {
        let holds: Vec<u64> = (0..=64u64).filter(|&l| 4 * l as i128 - 4 >= 1i128 << l).collect();
        let scope = Scope::new(Mode::Exhaustive, format!("ell in 0..=64, holds for {holds:?}"))
            .count("ell_values_holding", holds.len() as u64);
        out.push(VerificationResult::new("square-inequality-as-printed", scope, None));

        let failing: Vec<u64> = (0..=64u64)
            .filter(|&l| 2.0 * (l as f64 - 1.0) * 2f64.powi(-(l as i32)) > 0.5)
            .collect();
        let witness = failing.first().map(|l| json!({"ell": l}));
        let scope = Scope::new(Mode::Exhaustive, "ell in 0..=64").count("failures", failing.len() as u64);
        out.push(VerificationResult::new("square-inequality", scope, witness));
    }
    Ok(out)
}

/// Every VT coset corrects one deletion, and the largest coset reaches the
/// pigeonhole bound `q^m / (q m)`.
pub fn verify_vt(cases: &[(usize, u32)]) -> Result<Vec<VerificationResult>> {
    let mut out = Vec::new();
    for &(m, q) in cases {
        let collision = check_coset_disjointness(m, q)?;
        let census = vt_coset_census(m, q)?;
        let (label, largest) = census.largest();
        let bound = census.pigeonhole_bound();
        let witness = match (&collision, (largest as f64) < bound) {
            (Some(c), _) => Some(json!({"a": c.label.a, "b": c.label.b, "first": c.first.symbols(),
                                        "second": c.second.symbols(), "common": c.common.symbols()})),
            (None, true) => Some(json!({"largest": largest, "bound": bound})),
            (None, false) => None,
        };
        let scope = Scope::new(Mode::Exhaustive, format!("m={m} q={q}"))
            .count("words", census.total())
            .count("largest_coset", largest)
            .count("largest_a", label.a as u64)
            .count("largest_b", u64::from(label.b));
        out.push(VerificationResult::new("vt-cosets", scope, witness));
    }
    Ok(out)
}

/// Closed-form bounds against an independent recomputation.
pub fn verify_bounds(ns: &[usize]) -> Result<VerificationResult> {
    const TOL: f64 = 1e-9;
    let mut witness = None;
    for &n in ns {
        let b = redundancy_bounds(n)?;
        let l = (n as f64).ln() / 2f64.ln();
        let log_e = 1.0 / 2f64.ln();
        let lower = 2.0 * n as f64 - 2.0 + 2.0 * l;
        let upper = 2.0 * n as f64 + 4.0 * l + 7.0 + 2.0 * log_e;
        let ok = (b.lower - lower).abs() < TOL
            && (b.upper - upper).abs() < TOL
            && b.gap <= 2.0 * l + 9.0 + 2.0 * log_e + TOL
            && b.composed <= b.upper + TOL;
        if !ok && witness.is_none() {
            witness = Some(serde_json::to_value(&b).expect("bounds serialize"));
        }
    }
    let list: Vec<String> = ns.iter().map(|n| n.to_string()).collect();
    let scope = Scope::new(Mode::Formula, format!("n in {{{}}}", list.join(",")));
    Ok(VerificationResult::new("redundancy-bounds", scope, witness))
}

/// Re-runs the single case named by a failed result's witness and reports
/// whether the failure reproduces.
pub fn recheck_witness(result: &VerificationResult) -> Result<bool> {
    let w = result
        .witness
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("result has no witness".into()))?;
    let grid = |key: &str| -> Result<BitGrid> {
        parse_grid(w[key].as_str().ok_or_else(|| Error::InvalidInput(format!("witness lacks {key}")))?)
    };
    let index = |key: &str| w[key].as_u64().map(|v| v as usize).ok_or_else(|| Error::InvalidInput(format!("witness lacks {key}")));
    match result.statement.as_str() {
        "decoder-round-trip" => {
            let x = grid("codeword")?;
            let p: CodeParams = w["params"].as_str().unwrap_or_default().parse()?;
            let r = x.delete_row_col(index("row")?, index("col")?)?;
            Ok(!matches!(decode(&r, &p), Ok((y, _)) if y == x))
        }
        "code-ball-disjointness" => {
            let (x, y) = (grid("x")?, grid("y")?);
            Ok(x != y && ball_grids(&x)?.intersection(&ball_grids(&y)?).next().is_some())
        }
        "collision-pattern" => {
            let x = grid("x")?;
            let d = &w["deletions"];
            let at = |a: usize, b: usize| d[a][b].as_u64().unwrap_or(0) as usize;
            let (i1, j1, i2, j2) = (at(0, 0), at(0, 1), at(1, 0), at(1, 1));
            let equal = x.delete_row_col(i1, j1)? == x.delete_row_col(i2, j2)?;
            Ok(equal != collision_structure(&x, i1, j1, i2, j2)?)
        }
        "ball-bound" => {
            let x = grid("x")?;
            Ok(ball_size(&x)? < good_columns(&x).len() * good_rows(&x).len())
        }
        "ball-equivalence" | "t-equivalence" | "row-ball-equivalence" | "col-ball-equivalence" | "mixed-ball-equivalence" => {
            let (x, y) = (grid("x")?, grid("y")?);
            let t = w["t"].as_u64().unwrap_or(1) as usize;
            let (dx, dy, ix, iy) = match result.statement.as_str() {
                "row-ball-equivalence" => ((1, 0), (1, 0), (1, 0), (1, 0)),
                "col-ball-equivalence" => ((0, 1), (0, 1), (0, 1), (0, 1)),
                "mixed-ball-equivalence" => ((1, 0), (0, 1), (0, 1), (1, 0)),
                _ => ((t, t), (t, t), (t, t), (t, t)),
            };
            let d = deletion_balls_intersect(&x, dx, &y, dy)?;
            let i = if (x.n_rows() + ix.0) * (x.n_cols() + ix.1) <= 25 {
                let (a, b) = (insertion_ball_keys(&x, ix.0, ix.1)?, insertion_ball_keys(&y, iy.0, iy.1)?);
                sorted_keys_intersect(&a, &b)
            } else {
                insertion_balls_intersect(&x, ix, &y, iy)?
            };
            Ok(d != i)
        }
        other => invalid(format!("no single-case recheck for {other}")),
    }
}
