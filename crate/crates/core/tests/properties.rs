use crisscross::analysis::{ball_size, collision_structure, good_columns, good_rows};
use crisscross::code::{is_codeword, sample_codeword_variant, Variant};
use crisscross::verify::completion_search;
use crisscross::vt::{vt_decode_deletion, vt_label};
use crisscross::{decode, format_grid, parse_grid, BitGrid, CodeParams, Error, QaryWord};
use proptest::prelude::*;

fn grid(rows: usize, cols: usize) -> impl Strategy<Value = BitGrid> {
    proptest::collection::vec(any::<bool>(), rows * cols)
        .prop_map(move |bits| BitGrid::from_fn(rows, cols, |i, j| bits[(i - 1) * cols + j - 1]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(x in (1usize..10, 1usize..20).prop_flat_map(|(r, c)| grid(r, c))) {
        prop_assert_eq!(parse_grid(&format_grid(&x)).unwrap(), x);
    }

    #[test]
    fn insert_then_delete_is_identity(
        x in grid(5, 6),
        i in 1usize..=6,
        j in 1usize..=7,
        row in proptest::collection::vec(0u8..2, 6),
        col in proptest::collection::vec(0u8..2, 6),
    ) {
        let y = x.insert(&[(i, row)], &[(j, col)]).unwrap();
        prop_assert_eq!(y.dims(), (6, 7));
        prop_assert_eq!(y.delete_row_col(i, j).unwrap(), x);
    }

    #[test]
    fn vt_corrects_any_deletion(symbols in proptest::collection::vec(0u32..8, 2..12), p in any::<prop::sample::Index>()) {
        let x = QaryWord::new(8, symbols).unwrap();
        let pos = p.index(x.len()) + 1;
        let fixed = vt_decode_deletion(&x.delete(pos), x.len(), vt_label(&x)).unwrap();
        prop_assert_eq!(fixed.word, x);
    }

    #[test]
    fn params_text_round_trip(a in 0usize..16, b in 0usize..16, c in 0usize..15, d in 0usize..16) {
        let p = CodeParams::new(16, a, b, c, d).unwrap();
        prop_assert_eq!(p.to_string().parse::<CodeParams>().unwrap(), p);
    }

    #[test]
    fn collision_rule_matches_brute_force(x in grid(5, 5), i1 in 1usize..=5, j1 in 1usize..=5, i2 in 1usize..=5, j2 in 1usize..=5) {
        prop_assume!((i1, j1) != (i2, j2));
        let equal = x.delete_row_col(i1, j1).unwrap() == x.delete_row_col(i2, j2).unwrap();
        prop_assert_eq!(collision_structure(&x, i1, j1, i2, j2).unwrap(), equal);
    }

    #[test]
    fn ball_at_least_good_product(x in grid(6, 6)) {
        prop_assert!(ball_size(&x).unwrap() >= good_columns(&x).len() * good_rows(&x).len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn repaired_code_decodes_every_sampled_deletion(seed in any::<u64>(), i in 1usize..=16, j in 1usize..=16) {
        let (x, p) = sample_codeword_variant(16, seed, Variant::Repaired).unwrap();
        let r = x.delete_row_col(i, j).unwrap();
        let (y, trace) = decode(&r, &p).unwrap();
        prop_assert_eq!(y.delete_row_col(trace.row_index, trace.col_index).unwrap(), r);
        prop_assert_eq!(y, x);
    }

    #[test]
    fn decoder_output_explains_the_input(x in grid(7, 7), a in 0usize..8, b in 0usize..8, c in 0usize..7, d in 0usize..8) {
        // Arbitrary received arrays: any output must be a codeword whose ball
        // holds the input, and the oracle must agree on whether one exists.
        let p = CodeParams::new(8, a, b, c, d).unwrap();
        let survivors = completion_search(&x, &p).unwrap();
        match decode(&x, &p) {
            Ok((y, t)) => {
                prop_assert!(is_codeword(&y, &p).unwrap());
                prop_assert_eq!(y.delete_row_col(t.row_index, t.col_index).unwrap(), x);
                prop_assert_eq!(survivors, vec![y]);
            }
            Err(Error::Ambiguous(_)) => prop_assert!(survivors.len() > 1),
            Err(Error::DecodeFailure(_)) => prop_assert!(survivors.is_empty()),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn published_decoder_agrees_with_oracle(seed in any::<u64>(), i in 1usize..=8, j in 1usize..=8) {
        let (x, p) = sample_codeword_variant(8, seed, Variant::Published).unwrap();
        let r = x.delete_row_col(i, j).unwrap();
        let survivors = completion_search(&r, &p).unwrap();
        prop_assert!(survivors.contains(&x));
        match decode(&r, &p) {
            Ok((y, _)) => prop_assert_eq!(survivors, vec![y]),
            Err(Error::Ambiguous(_)) => prop_assert!(survivors.len() > 1),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }
}
