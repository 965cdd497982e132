//! Dense real symmetric matrix primitives.
//!
//! Everything above this module works with [`DenseMatrix`] values that are
//! symmetric within [`TOL_SYM_REL`]. Results that are symmetric in exact
//! arithmetic are passed through [`symmetrize`] before they are returned.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};

use crate::error::{CmError, Result};

/// Dense, row/column indexed real matrix.
pub type DenseMatrix = DMatrix<f64>;

/// Relative symmetry tolerance, scaled by `1 + max|M_ij|`.
pub const TOL_SYM_REL: f64 = 1e-10;
/// Relative PSD tolerance, scaled by `1 + λ_max`.
pub const TOL_PSD_REL: f64 = 1e-9;
/// Smallest eigenvalue accepted as positive definite.
pub const TOL_PD: f64 = 1e-12;
/// Reconstruction tolerance for factorizations.
pub const TOL_RECON: f64 = 1e-8;
/// Eigenvalues below `RANK_CUT * λ_max` are treated as zero by pseudo-inverses.
pub const RANK_CUT: f64 = 1e-10;

/// Ordered set of distinct row/column indices selecting a principal submatrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    /// Validates that `indices` is strictly increasing and bounded by `dim`.
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CmError::BadIndexSet(format!(
                "indices {indices:?} are not strictly increasing"
            )));
        }
        if let Some(&last) = indices.last() {
            if last >= dim {
                return Err(CmError::BadIndexSet(format!(
                    "index {last} out of range for dimension {dim}"
                )));
            }
        }
        Ok(IndexSet(indices))
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(mut indices: Vec<usize>, dim: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        Self::new(indices, dim)
    }

    pub fn range(start: usize, end: usize) -> Self {
        IndexSet((start..end).collect())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices in `0..dim` not contained in `self`.
    pub fn complement(&self, dim: usize) -> IndexSet {
        let mut out = Vec::with_capacity(dim.saturating_sub(self.0.len()));
        let mut it = self.0.iter().peekable();
        for i in 0..dim {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        IndexSet(out)
    }
}

/// Ascending eigenvalues and matching orthonormal eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl SymEig {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::INFINITY)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// `Q diag(f(λ)) Qᵀ`, symmetrized.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let s = f(self.values[j]);
            scaled.column_mut(j).scale_mut(s);
        }
        symmetrize(&(scaled * self.vectors.transpose()))
    }
}

pub fn max_abs(m: &DenseMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn symmetrize(m: &DenseMatrix) -> DenseMatrix {
    m * 0.5 + m.transpose() * 0.5
}

pub fn ensure_square_finite(m: &DenseMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(CmError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(CmError::NonFinite);
    }
    Ok(())
}

pub fn check_symmetric(m: &DenseMatrix) -> Result<()> {
    ensure_square_finite(m)?;
    let tolerance = TOL_SYM_REL * (1.0 + max_abs(m));
    let mut asymmetry = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            asymmetry = asymmetry.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if asymmetry > tolerance {
        return Err(CmError::NotSymmetric {
            asymmetry,
            tolerance,
        });
    }
    Ok(())
}

/// Symmetric eigendecomposition `M = Q diag(λ) Qᵀ` with ascending `λ`.
pub fn sym_eig(m: &DenseMatrix) -> Result<SymEig> {
    check_symmetric(m)?;
    let n = m.nrows();
    if n == 0 {
        return Ok(SymEig {
            values: vec![],
            vectors: DenseMatrix::zeros(0, 0),
        });
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SymEig { values, vectors })
}

pub fn min_eig_sym(m: &DenseMatrix) -> Result<f64> {
    Ok(sym_eig(m)?.min())
}

fn psd_eig(m: &DenseMatrix) -> Result<SymEig> {
    let eig = sym_eig(m)?;
    let lmax = eig.max().max(0.0);
    if eig.min() < -TOL_PSD_REL * (1.0 + lmax) {
        return Err(CmError::NotPsd { min_eig: eig.min() });
    }
    Ok(eig)
}

fn pd_eig(m: &DenseMatrix) -> Result<SymEig> {
    let eig = sym_eig(m)?;
    if eig.min() <= TOL_PD {
        return Err(CmError::NotPd { min_eig: eig.min() });
    }
    Ok(eig)
}

/// Principal square root of a PSD matrix; eigenvalues that are negative
/// within tolerance are clamped to zero.
pub fn sqrt_psd(m: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(psd_eig(m)?.map(|l| l.max(0.0).sqrt()))
}

/// Moore–Penrose pseudo-inverse of a PSD matrix, inverting on the support.
pub fn pinv_psd(m: &DenseMatrix) -> Result<DenseMatrix> {
    let eig = psd_eig(m)?;
    let cut = RANK_CUT * eig.max().max(0.0);
    Ok(eig.map(|l| if l > cut && l > 0.0 { 1.0 / l } else { 0.0 }))
}

/// Inverse of a positive definite matrix.
pub fn inverse_pd(m: &DenseMatrix) -> Result<DenseMatrix> {
    check_symmetric(m)?;
    match Cholesky::new(symmetrize(m)) {
        Some(ch) => Ok(symmetrize(&ch.inverse())),
        None => {
            let min_eig = min_eig_sym(m)?;
            Err(CmError::NotPd { min_eig })
        }
    }
}

/// `M^{-1/2}` for positive definite `M`.
pub fn inv_sqrt_pd(m: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(pd_eig(m)?.map(|l| 1.0 / l.sqrt()))
}

pub fn log_det_psd(m: &DenseMatrix) -> Result<f64> {
    Ok(pd_eig(m)?.values.iter().map(|l| l.ln()).sum())
}

/// Rows `rows` and columns `cols` of `m`.
pub fn submatrix(m: &DenseMatrix, rows: &[usize], cols: &[usize]) -> DenseMatrix {
    DenseMatrix::from_fn(rows.len(), cols.len(), |r, c| m[(rows[r], cols[c])])
}

pub fn principal(m: &DenseMatrix, idx: &IndexSet) -> DenseMatrix {
    submatrix(m, idx.as_slice(), idx.as_slice())
}

pub fn direct_sum(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (na, nb) = (a.nrows(), b.nrows());
    let mut out = DenseMatrix::zeros(na + nb, na + nb);
    out.view_mut((0, 0), (na, na)).copy_from(a);
    out.view_mut((na, na), (nb, nb)).copy_from(b);
    out
}

fn validate_keep(m: &DenseMatrix, keep: &IndexSet) -> Result<IndexSet> {
    if keep.is_empty() {
        return Err(CmError::BadIndexSet("kept block is empty".into()));
    }
    if keep.as_slice().iter().any(|&i| i >= m.nrows()) {
        return Err(CmError::BadIndexSet(format!(
            "index out of range for dimension {}",
            m.nrows()
        )));
    }
    Ok(keep.complement(m.nrows()))
}

/// Schur complement `M / A = B − Xᵀ A⁺ X`, where `B` is the block on `keep`
/// and `A` the block on the remaining indices. The inverse is taken on the
/// support of `A`; a Cholesky solve is used when `A` is safely positive
/// definite.
pub fn schur_complement(m: &DenseMatrix, keep: &IndexSet) -> Result<DenseMatrix> {
    let cond = validate_keep(m, keep)?;
    psd_eig(m)?;
    let b = principal(m, keep);
    if cond.is_empty() {
        return Ok(b);
    }
    let a = principal(m, &cond);
    let x = submatrix(m, cond.as_slice(), keep.as_slice());
    let max_diag = (0..a.nrows()).fold(0.0_f64, |acc, i| acc.max(a[(i, i)]));
    if let Some(ch) = Cholesky::new(a.clone()) {
        let l = ch.l();
        let min_pivot = (0..l.nrows()).fold(f64::INFINITY, |acc, i| acc.min(l[(i, i)]));
        if min_pivot * min_pivot > RANK_CUT * max_diag {
            let y = l
                .solve_lower_triangular(&x)
                .ok_or_else(|| CmError::NumericalFailure("triangular solve failed".into()))?;
            return Ok(symmetrize(&(b - y.transpose() * y)));
        }
    }
    let a_pinv = pinv_psd(&a)?;
    Ok(symmetrize(&(b - x.transpose() * a_pinv * x)))
}

/// Schur complement for a symmetric matrix that need not be PSD; only the
/// complement block has to be invertible. Used for published data that is
/// indefinite after rounding.
pub fn schur_complement_general(m: &DenseMatrix, keep: &IndexSet) -> Result<DenseMatrix> {
    let cond = validate_keep(m, keep)?;
    check_symmetric(m)?;
    let b = principal(m, keep);
    if cond.is_empty() {
        return Ok(b);
    }
    let a = principal(m, &cond);
    let x = submatrix(m, cond.as_slice(), keep.as_slice());
    let sol = a
        .lu()
        .solve(&x)
        .ok_or_else(|| CmError::NumericalFailure("conditioning block is singular".into()))?;
    Ok(symmetrize(&(b - x.transpose() * sol)))
}

/// Matrix geometric mean `M # N = M^{1/2} (M^{-1/2} N M^{-1/2})^{1/2} M^{1/2}`.
pub fn geometric_mean(m: &DenseMatrix, n: &DenseMatrix) -> Result<DenseMatrix> {
    if m.nrows() != n.nrows() {
        return Err(CmError::DimensionMismatch(format!(
            "geometric mean of {}x{} and {}x{}",
            m.nrows(),
            m.ncols(),
            n.nrows(),
            n.ncols()
        )));
    }
    let em = pd_eig(m)?;
    pd_eig(n)?;
    let m_half = em.map(f64::sqrt);
    let m_inv_half = em.map(|l| 1.0 / l.sqrt());
    let inner = symmetrize(&(&m_inv_half * n * &m_inv_half));
    let inner_sqrt = sqrt_psd(&inner)?;
    Ok(symmetrize(&(&m_half * inner_sqrt * &m_half)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mat(rows: &[&[f64]]) -> DenseMatrix {
        DenseMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c])
    }

    fn assert_mat_eq(a: &DenseMatrix, b: &DenseMatrix, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        let diff = max_abs(&(a - b));
        assert!(diff <= tol, "matrices differ by {diff:e}\n{a}\n{b}");
    }

    #[test]
    fn sym_eig_identity_and_diagonal() {
        let e = sym_eig(&DenseMatrix::identity(4, 4)).unwrap();
        assert_eq!(e.values, vec![1.0; 4]);
        let qtq = e.vectors.transpose() * &e.vectors;
        assert_mat_eq(&qtq, &DenseMatrix::identity(4, 4), 1e-12);

        let e = sym_eig(&mat(&[&[3.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 3.0, epsilon = 1e-14);

        let m = mat(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let e = sym_eig(&m).unwrap();
        assert_abs_diff_eq!(e.values[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 3.0, epsilon = 1e-14);
        assert_mat_eq(&e.map(|l| l), &m, 1e-12);
    }

    #[test]
    fn sym_eig_rejects_bad_input() {
        let m = mat(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert!(matches!(sym_eig(&m), Err(CmError::NotSymmetric { .. })));
        let m = mat(&[&[1.0, f64::NAN], &[f64::NAN, 1.0]]);
        assert_eq!(sym_eig(&m).unwrap_err(), CmError::NonFinite);
    }

    #[test]
    fn sqrt_examples() {
        assert_mat_eq(
            &sqrt_psd(&DenseMatrix::identity(2, 2)).unwrap(),
            &DenseMatrix::identity(2, 2),
            1e-14,
        );
        let r = sqrt_psd(&mat(&[&[4.0, 0.0], &[0.0, 9.0]])).unwrap();
        assert_mat_eq(&r, &mat(&[&[2.0, 0.0], &[0.0, 3.0]]), 1e-14);
        let r = sqrt_psd(&(DenseMatrix::identity(6, 6) * 4.0)).unwrap();
        assert_mat_eq(&r, &(DenseMatrix::identity(6, 6) * 2.0), 1e-14);
        assert!(matches!(
            sqrt_psd(&mat(&[&[1.0, 0.0], &[0.0, -1.0]])),
            Err(CmError::NotPsd { .. })
        ));
        // tiny negative eigenvalue is clamped
        let r = sqrt_psd(&mat(&[&[1.0, 0.0], &[0.0, -1e-12]])).unwrap();
        assert_eq!(r[(1, 1)], 0.0);
    }

    #[test]
    fn pinv_examples() {
        let p = pinv_psd(&mat(&[&[2.0, 0.0], &[0.0, 0.0]])).unwrap();
        assert_mat_eq(&p, &mat(&[&[0.5, 0.0], &[0.0, 0.0]]), 1e-14);
        let p = pinv_psd(&DenseMatrix::identity(3, 3)).unwrap();
        assert_mat_eq(&p, &DenseMatrix::identity(3, 3), 1e-14);
        let p = pinv_psd(&mat(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap();
        let third = 1.0 / 3.0;
        assert_mat_eq(
            &p,
            &mat(&[&[2.0 * third, -third], &[-third, 2.0 * third]]),
            1e-14,
        );
    }

    #[test]
    fn schur_examples() {
        let m = mat(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let s = schur_complement(&m, &IndexSet::new(vec![1], 2).unwrap()).unwrap();
        assert_abs_diff_eq!(s[(0, 0)], 1.5, epsilon = 1e-14);

        let a = mat(&[&[2.0, 0.3], &[0.3, 1.0]]);
        let b = mat(&[&[5.0, -1.0], &[-1.0, 4.0]]);
        let m = direct_sum(&a, &b);
        let s = schur_complement(&m, &IndexSet::range(2, 4)).unwrap();
        assert_mat_eq(&s, &b, 1e-14);

        let m = mat(&[&[4.0, 2.0], &[2.0, 5.0]]);
        let s = schur_complement(&m, &IndexSet::new(vec![1], 2).unwrap()).unwrap();
        assert_abs_diff_eq!(s[(0, 0)], 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.determinant(), 4.0 * s[(0, 0)], epsilon = 1e-12);
    }

    #[test]
    fn schur_on_singular_conditioning_block_uses_support() {
        // A = diag(2, 0) is singular; X has no component on the kernel.
        let m = mat(&[
            &[2.0, 0.0, 1.0],
            &[0.0, 0.0, 0.0],
            &[1.0, 0.0, 3.0],
        ]);
        let s = schur_complement(&m, &IndexSet::new(vec![2], 3).unwrap()).unwrap();
        assert_abs_diff_eq!(s[(0, 0)], 2.5, epsilon = 1e-12);
    }

    #[test]
    fn schur_errors() {
        let m = mat(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(matches!(
            schur_complement(&m, &IndexSet::new(vec![0], 2).unwrap()),
            Err(CmError::NotPsd { .. })
        ));
        assert!(IndexSet::new(vec![1, 0], 2).is_err());
        assert!(IndexSet::new(vec![0, 5], 2).is_err());
        let id = DenseMatrix::identity(2, 2);
        assert!(matches!(
            schur_complement(&id, &IndexSet::new(vec![], 2).unwrap()),
            Err(CmError::BadIndexSet(_))
        ));
    }

    #[test]
    fn geometric_mean_examples() {
        let m = mat(&[&[3.0, 1.0], &[1.0, 2.0]]);
        assert_mat_eq(&geometric_mean(&m, &m).unwrap(), &m, 1e-12);
        let g = geometric_mean(
            &(DenseMatrix::identity(3, 3) * 4.0),
            &DenseMatrix::identity(3, 3),
        )
        .unwrap();
        assert_mat_eq(&g, &(DenseMatrix::identity(3, 3) * 2.0), 1e-12);
        let g = geometric_mean(
            &mat(&[&[2.0, 0.0], &[0.0, 8.0]]),
            &mat(&[&[8.0, 0.0], &[0.0, 2.0]]),
        )
        .unwrap();
        assert_mat_eq(&g, &(DenseMatrix::identity(2, 2) * 4.0), 1e-12);
        assert!(matches!(
            geometric_mean(&mat(&[&[1.0, 0.0], &[0.0, 0.0]]), &m),
            Err(CmError::NotPd { .. })
        ));
    }

    #[test]
    fn log_det_and_min_eig_examples() {
        assert_abs_diff_eq!(
            log_det_psd(&DenseMatrix::identity(6, 6)).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(
            log_det_psd(&mat(&[&[e, 0.0], &[0.0, e]])).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            log_det_psd(&mat(&[&[2.0, 1.0], &[1.0, 2.0]])).unwrap(),
            3.0_f64.ln(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            min_eig_sym(&DenseMatrix::identity(2, 2)).unwrap(),
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            min_eig_sym(&mat(&[&[-1.0, 0.0], &[0.0, 5.0]])).unwrap(),
            -1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            min_eig_sym(&mat(&[&[0.0, 1.0], &[1.0, 0.0]])).unwrap(),
            -1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn index_set_complement() {
        let s = IndexSet::new(vec![1, 3], 5).unwrap();
        assert_eq!(s.complement(5).as_slice(), &[0, 2, 4]);
    }
}
