//! q-ary Varshamov–Tenengolts (Tenengolts) single-deletion codes.
//!
//! A word `x` of length `m` over `{0..q-1}` has the binary signature
//! `s_1 = 1`, `s_i = [x_i >= x_{i-1}]`, and the label
//! `a = sum (i-1) s_i mod m`, `b = sum x_i mod q`. Words sharing a label form
//! a coset, and every coset corrects one deletion.

use std::collections::HashMap;

use crate::error::{invalid, Error, Result};
use crate::limits::{MAX_VT_CENSUS_WORDS, MAX_VT_DISJOINTNESS_WORDS};

/// A word over `{0..q-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QaryWord {
    q: u32,
    symbols: Vec<u32>,
}

impl QaryWord {
    pub fn new(q: u32, symbols: Vec<u32>) -> Result<Self> {
        if q < 2 {
            return invalid(format!("alphabet size must be at least 2, got {q}"));
        }
        if let Some(&s) = symbols.iter().find(|&&s| s >= q) {
            return invalid(format!("symbol {s} outside alphabet of size {q}"));
        }
        Ok(Self { q, symbols })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// Symbol at 1-based position `p`.
    pub fn symbol(&self, p: usize) -> u32 {
        self.symbols[p - 1]
    }

    /// The word with the symbol at 1-based position `p` removed.
    pub fn delete(&self, p: usize) -> QaryWord {
        let mut symbols = self.symbols.clone();
        symbols.remove(p - 1);
        QaryWord { q: self.q, symbols }
    }

    /// The word with `symbol` inserted so that it lands at 1-based position `p`.
    pub fn insert(&self, p: usize, symbol: u32) -> QaryWord {
        let mut symbols = self.symbols.clone();
        symbols.insert(p - 1, symbol);
        QaryWord { q: self.q, symbols }
    }

    /// Mixed-radix index in `[0, q^m)`, first symbol least significant.
    pub fn from_index(q: u32, m: usize, mut index: u64) -> QaryWord {
        let symbols = (0..m)
            .map(|_| {
                let s = (index % u64::from(q)) as u32;
                index /= u64::from(q);
                s
            })
            .collect();
        QaryWord { q, symbols }
    }

    /// All distinct words reachable by one deletion, sorted.
    pub fn deletion_ball(&self) -> Vec<QaryWord> {
        let mut out: Vec<QaryWord> = (1..=self.len()).map(|p| self.delete(p)).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Coset label of a word: `a` modulo the word length, `b` modulo `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VtLabel {
    pub a: usize,
    pub b: u32,
}

impl VtLabel {
    /// Validates `a < m` and `b < q`.
    pub fn new(a: usize, b: u32, m: usize, q: u32) -> Result<Self> {
        if a >= m {
            return invalid(format!("label a = {a} out of range [0, {}]", m.saturating_sub(1)));
        }
        if b >= q {
            return invalid(format!("label b = {b} out of range [0, {}]", q - 1));
        }
        Ok(Self { a, b })
    }
}

pub fn signature(x: &QaryWord) -> Vec<u8> {
    let s = &x.symbols;
    (0..s.len())
        .map(|i| u8::from(i == 0 || s[i] >= s[i - 1]))
        .collect()
}

pub fn vt_label(x: &QaryWord) -> VtLabel {
    let m = x.len().max(1);
    let a = signature(x)
        .iter()
        .enumerate()
        .map(|(i, &s)| i * usize::from(s))
        .sum::<usize>()
        % m;
    let b = (x.symbols.iter().map(|&v| u64::from(v)).sum::<u64>() % u64::from(x.q)) as u32;
    VtLabel { a, b }
}

/// Result of correcting one deletion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VtCorrection {
    pub word: QaryWord,
    /// Smallest 1-based index `p` with `word` minus position `p` equal to the
    /// received word. Exact when adjacent symbols of `word` are distinct.
    pub position: usize,
    pub symbol: u32,
}

/// Recovers the unique word of length `m` in coset `label` that contains `y`
/// in its single-deletion ball.
///
/// The deleted symbol is pinned by the `b` syndrome, so only the `m`
/// insertion positions of that one symbol need checking.
pub fn vt_decode_deletion(y: &QaryWord, m: usize, label: VtLabel) -> Result<VtCorrection> {
    if y.len() + 1 != m {
        return invalid(format!(
            "received word has length {}, expected {}",
            y.len(),
            m.saturating_sub(1)
        ));
    }
    let q = y.q;
    VtLabel::new(label.a, label.b, m, q)?;
    let partial = (y.symbols.iter().map(|&v| u64::from(v)).sum::<u64>() % u64::from(q)) as u32;
    let symbol = (label.b + q - partial) % q;

    let mut found: Option<QaryWord> = None;
    for p in 1..=m {
        let x = y.insert(p, symbol);
        if vt_label(&x) != label {
            continue;
        }
        match &found {
            None => found = Some(x),
            Some(prev) if *prev == x => {}
            Some(prev) => {
                return Err(Error::Internal(format!(
                    "two completions {:?} and {:?} in one VT coset",
                    prev.symbols, x.symbols
                )))
            }
        }
    }
    let word = found.ok_or_else(|| {
        Error::DecodeFailure(format!(
            "no word in coset (a={}, b={}) contains {:?} in its deletion ball",
            label.a, label.b, y.symbols
        ))
    })?;
    let position = (1..=m)
        .find(|&p| word.delete(p) == *y)
        .expect("completion was built by insertion");
    Ok(VtCorrection {
        symbol: word.symbol(position),
        word,
        position,
    })
}

/// Sizes of all `m * q` cosets of `{0..q-1}^m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetCensus {
    pub m: usize,
    pub q: u32,
    /// Indexed by `a * q + b`.
    pub sizes: Vec<u64>,
}

impl CosetCensus {
    pub fn size(&self, label: VtLabel) -> u64 {
        self.sizes[label.a * self.q as usize + label.b as usize]
    }

    pub fn total(&self) -> u64 {
        self.sizes.iter().sum()
    }

    /// Largest coset and its label (smallest label on ties).
    pub fn largest(&self) -> (VtLabel, u64) {
        let q = self.q as usize;
        let (idx, &size) = self
            .sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("at least one coset");
        (
            VtLabel {
                a: idx / q,
                b: (idx % q) as u32,
            },
            size,
        )
    }

    /// `q^m / (q m)`, the pigeonhole lower bound on the largest coset.
    pub fn pigeonhole_bound(&self) -> f64 {
        (self.q as f64).powi(self.m as i32) / (self.q as f64 * self.m as f64)
    }
}

fn word_count(m: usize, q: u32) -> u128 {
    (q as u128).checked_pow(m as u32).unwrap_or(u128::MAX)
}

pub fn vt_coset_census(m: usize, q: u32) -> Result<CosetCensus> {
    if m < 1 || q < 2 {
        return invalid(format!("need m >= 1 and q >= 2, got m={m}, q={q}"));
    }
    let total = word_count(m, q);
    if total > MAX_VT_CENSUS_WORDS {
        return Err(Error::Refused {
            what: format!("VT coset census m={m} q={q}"),
            needed: total,
            limit: MAX_VT_CENSUS_WORDS,
        });
    }
    let mut sizes = vec![0u64; m * q as usize];
    for idx in 0..total as u64 {
        let l = vt_label(&QaryWord::from_index(q, m, idx));
        sizes[l.a * q as usize + l.b as usize] += 1;
    }
    Ok(CosetCensus { m, q, sizes })
}

/// A pair of distinct words in one coset whose deletion balls meet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetCollision {
    pub label: VtLabel,
    pub first: QaryWord,
    pub second: QaryWord,
    pub common: QaryWord,
}

/// Checks that within every coset of `{0..q-1}^m` the single-deletion balls
/// are pairwise disjoint. Returns the first collision found, if any.
pub fn check_coset_disjointness(m: usize, q: u32) -> Result<Option<CosetCollision>> {
    if m < 2 || q < 2 {
        return invalid(format!("need m >= 2 and q >= 2, got m={m}, q={q}"));
    }
    let total = word_count(m, q);
    if total > MAX_VT_DISJOINTNESS_WORDS {
        return Err(Error::Refused {
            what: format!("VT coset disjointness m={m} q={q}"),
            needed: total,
            limit: MAX_VT_DISJOINTNESS_WORDS,
        });
    }
    // (label, received word) -> first word that produced it
    let mut owner: HashMap<(VtLabel, QaryWord), QaryWord> = HashMap::new();
    for idx in 0..total as u64 {
        let x = QaryWord::from_index(q, m, idx);
        let label = vt_label(&x);
        for y in x.deletion_ball() {
            match owner.get(&(label, y.clone())) {
                Some(prev) if *prev != x => {
                    return Ok(Some(CosetCollision {
                        label,
                        first: prev.clone(),
                        second: x,
                        common: y,
                    }))
                }
                Some(_) => {}
                None => {
                    owner.insert((label, y), x.clone());
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(q: u32, s: &[u32]) -> QaryWord {
        QaryWord::new(q, s.to_vec()).unwrap()
    }

    /// Reference decoder: every word of the coset, kept if `y` is one of its
    /// deletions.
    fn brute_force_completions(y: &QaryWord, m: usize, label: VtLabel) -> Vec<QaryWord> {
        let q = y.q();
        (0..u64::from(q).pow(m as u32))
            .map(|i| QaryWord::from_index(q, m, i))
            .filter(|x| vt_label(x) == label)
            .filter(|x| (1..=m).any(|p| x.delete(p) == *y))
            .collect()
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature(&w(4, &[2, 0, 3, 3])), vec![1, 0, 1, 1]);
        assert_eq!(signature(&w(4, &[0, 0, 0, 0])), vec![1, 1, 1, 1]);
        assert_eq!(signature(&w(2, &[1, 0])), vec![1, 0]);
    }

    #[test]
    fn label_examples() {
        assert_eq!(vt_label(&w(4, &[2, 0, 3, 3])), VtLabel { a: 1, b: 0 });
        assert_eq!(vt_label(&w(4, &[0, 0, 0, 0])), VtLabel { a: 2, b: 0 });
        assert_eq!(vt_label(&w(2, &[1, 0])), VtLabel { a: 0, b: 1 });
    }

    #[test]
    fn decode_example_matches_brute_force() {
        let y = w(3, &[0, 1, 0]);
        let label = VtLabel { a: 1, b: 0 };
        let oracle = brute_force_completions(&y, 4, label);
        assert_eq!(oracle, vec![w(3, &[0, 2, 1, 0])]);
        let got = vt_decode_deletion(&y, 4, label).unwrap();
        assert_eq!(got.word, w(3, &[0, 2, 1, 0]));
        assert_eq!(got.position, 2);
        assert_eq!(got.symbol, 2);
    }

    #[test]
    fn decode_constant_word_picks_first_position() {
        let got = vt_decode_deletion(&w(2, &[0, 0, 0]), 4, VtLabel { a: 2, b: 0 }).unwrap();
        assert_eq!(got.word, w(2, &[0, 0, 0, 0]));
        assert_eq!(got.position, 1);
        assert_eq!(got.symbol, 0);
    }

    #[test]
    fn decode_reports_missing_completion() {
        let y = w(3, &[2, 2, 2]);
        // Frozen from the brute-force search: (a=0, b=2) has no completion.
        let label = VtLabel { a: 0, b: 2 };
        assert!(brute_force_completions(&y, 4, label).is_empty());
        assert!(matches!(
            vt_decode_deletion(&y, 4, label),
            Err(Error::DecodeFailure(_))
        ));
    }

    #[test]
    fn decode_rejects_bad_arguments() {
        let y = w(3, &[0, 1]);
        assert!(vt_decode_deletion(&y, 4, VtLabel { a: 0, b: 0 }).is_err());
        assert!(vt_decode_deletion(&y, 3, VtLabel { a: 3, b: 0 }).is_err());
        assert!(vt_decode_deletion(&y, 3, VtLabel { a: 0, b: 3 }).is_err());
    }

    #[test]
    fn decoder_matches_brute_force_exhaustively() {
        for (m, q) in [(3, 2), (4, 2), (5, 2), (6, 2), (3, 3), (4, 3), (3, 4), (4, 4)] {
            for label_a in 0..m {
                for label_b in 0..q {
                    let label = VtLabel { a: label_a, b: label_b };
                    for yi in 0..u64::from(q).pow(m as u32 - 1) {
                        let y = QaryWord::from_index(q, m - 1, yi);
                        let oracle = brute_force_completions(&y, m, label);
                        assert!(oracle.len() <= 1, "coset not single-deletion correcting");
                        match (oracle.first(), vt_decode_deletion(&y, m, label)) {
                            (None, Err(Error::DecodeFailure(_))) => {}
                            (Some(x), Ok(got)) => {
                                assert_eq!(&got.word, x);
                                assert_eq!(got.word.delete(got.position), y);
                                assert!((1..got.position).all(|p| got.word.delete(p) != y));
                            }
                            (o, g) => panic!("m={m} q={q} y={y:?}: oracle {o:?}, decoder {g:?}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exact_position_when_adjacent_symbols_distinct() {
        for (m, q) in [(4, 3), (5, 3), (4, 4), (6, 2)] {
            for idx in 0..u64::from(q).pow(m as u32) {
                let x = QaryWord::from_index(q, m, idx);
                if x.symbols().windows(2).any(|p| p[0] == p[1]) {
                    continue;
                }
                let label = vt_label(&x);
                for p in 1..=m {
                    let got = vt_decode_deletion(&x.delete(p), m, label).unwrap();
                    assert_eq!((got.word.clone(), got.position, got.symbol), (x.clone(), p, x.symbol(p)));
                }
            }
        }
    }

    #[test]
    fn run_deletion_reports_run_start() {
        let x = w(3, &[1, 2, 2, 2, 0]);
        let label = vt_label(&x);
        for p in 2..=4 {
            let got = vt_decode_deletion(&x.delete(p), 5, label).unwrap();
            assert_eq!(got.word, x);
            assert_eq!(got.position, 2);
        }
    }

    #[test]
    fn census_partitions_and_meets_pigeonhole() {
        let c = vt_coset_census(2, 2).unwrap();
        assert_eq!(c.total(), 4);

        let c = vt_coset_census(6, 4).unwrap();
        assert_eq!(c.total(), 4096);
        assert!(c.largest().1 >= 171);
        assert!(c.largest().1 as f64 >= c.pigeonhole_bound());
    }

    #[test]
    fn census_guard_refuses() {
        assert!(matches!(vt_coset_census(13, 4), Err(Error::Refused { .. })));
        assert!(matches!(check_coset_disjointness(9, 4), Err(Error::Refused { .. })));
    }

    #[test]
    fn cosets_are_single_deletion_correcting() {
        for (m, q) in [(4, 3), (5, 2), (6, 4), (7, 2), (5, 3)] {
            assert_eq!(check_coset_disjointness(m, q).unwrap(), None, "m={m} q={q}");
        }
    }
}
