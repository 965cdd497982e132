use schur_core::gaussian_ops::partial_trace;
use schur_core::linalg::DenseMatrix;
use schur_core::measures::mutual_info_2;
use schur_core::verify::counterexample::{counterexample_cm, PUBLISHED};
use schur_core::{CmError, PartySelector};

#[test]
fn marginal_on_b1_and_a_is_principal_submatrix() {
    let v = counterexample_cm();
    let m = partial_trace(&v, &PartySelector::parse("B1,A").unwrap()).unwrap();
    assert_eq!(m.partition().labels(), vec!["A", "B1"]);
    // published rows 1-4 (A, blocked) then 5-6 (B1), A reordered to x1,p1,x2,p2
    let rows = [0usize, 2, 1, 3, 4, 5];
    let expect = DenseMatrix::from_fn(6, 6, |i, j| PUBLISHED[rows[i]][rows[j]]);
    assert_eq!(m.matrix(), &expect);
}

#[test]
fn determinant_measures_reject_indefinite_input() {
    let v = counterexample_cm();
    let det = v.matrix().determinant();
    assert!(det < 0.0);
    assert!(matches!(
        mutual_info_2(&v, &PartySelector::one("A")),
        Err(CmError::NotPd { .. } | CmError::NotBonaFide { .. } | CmError::NotPsd { .. })
    ));
}
