use proptest::prelude::*;
use schur_cli::cmfile::{parse_cm, to_json};
use schur_core::{CovarianceMatrix, DenseMatrix, ModePartition};

fn any_cm() -> impl Strategy<Value = CovarianceMatrix> {
    prop::collection::vec(1usize..3, 1..4).prop_flat_map(|modes| {
        let d: usize = 2 * modes.iter().sum::<usize>();
        prop::collection::vec(
            prop_oneof![any::<f64>().prop_filter("finite", |x| x.is_finite()), -10.0..10.0f64],
            d * d,
        )
        .prop_map(move |vals| {
            let m = DenseMatrix::from_fn(d, d, |i, j| vals[i.min(j) * d + i.max(j)]);
            let p = ModePartition::new(modes.iter().enumerate().map(|(i, &n)| (format!("P{i}"), n)))
                .unwrap();
            CovarianceMatrix::new_symmetric(m, p).unwrap()
        })
    })
}

proptest! {
    #[test]
    fn save_load_save_is_identical(v in any_cm()) {
        let text = to_json(&v);
        let back = parse_cm(&text).unwrap();
        prop_assert_eq!(back.matrix(), v.matrix());
        prop_assert_eq!(to_json(&back), text);
    }
}
