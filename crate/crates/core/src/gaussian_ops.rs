//! Partial traces, partial transposes, classical Gaussian maps and
//! Gaussian measurements at the level of covariance matrices.

use crate::cm::{CovarianceMatrix, ModePartition, PartySelector};
use crate::error::{CmError, Result};
use crate::linalg::{
    check_symmetric, min_eig_sym, principal, schur_complement, submatrix, symmetrize, DenseMatrix,
    IndexSet, TOL_PD,
};

/// Marginal on the kept parties, in partition order.
pub fn partial_trace(v: &CovarianceMatrix, keep: &PartySelector) -> Result<CovarianceMatrix> {
    let idx = v.partition().indices(keep)?;
    let partition = v.partition().restrict(keep)?;
    Ok(CovarianceMatrix::from_parts_unchecked(
        principal(v.matrix(), &idx),
        partition,
    ))
}

/// `Θ V Θ`, where `Θ` flips the sign of the momentum quadrature of every
/// mode in the selected parties.
pub fn partial_transpose(
    v: &CovarianceMatrix,
    transposed: &PartySelector,
) -> Result<CovarianceMatrix> {
    let idx = v.partition().indices(transposed)?;
    let mut m = v.matrix().clone();
    for &i in idx.as_slice().iter().filter(|&&i| i % 2 == 1) {
        m.row_mut(i).neg_mut();
        m.column_mut(i).neg_mut();
    }
    Ok(CovarianceMatrix::from_parts_unchecked(m, v.partition().clone()))
}

pub fn direct_sum(v: &CovarianceMatrix, w: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    v.direct_sum(w)
}

/// Data `γ_BB′ = [[γ_B, δ], [δᵀ, γ_B′]]` of a classical Gaussian map
/// `B → B′`, plus the parties that make up `B′`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMapSpec {
    pub gamma_b: DenseMatrix,
    pub gamma_bp: DenseMatrix,
    pub delta: DenseMatrix,
    pub output: ModePartition,
}

impl GaussianMapSpec {
    /// Builds a spec from the joint matrix `γ_BB′`, whose leading `dim_b`
    /// rows belong to the input.
    pub fn from_joint(gamma: &DenseMatrix, dim_b: usize, output: ModePartition) -> Result<Self> {
        let d = gamma.nrows();
        if dim_b > d || d - dim_b != output.dim() {
            return Err(CmError::DimensionMismatch(format!(
                "joint map matrix is {d}x{d}, input block {dim_b}, output partition `{output}`"
            )));
        }
        let b: Vec<usize> = (0..dim_b).collect();
        let bp: Vec<usize> = (dim_b..d).collect();
        Ok(GaussianMapSpec {
            gamma_b: submatrix(gamma, &b, &b),
            gamma_bp: submatrix(gamma, &bp, &bp),
            delta: submatrix(gamma, &b, &bp),
            output,
        })
    }

    pub fn joint(&self) -> DenseMatrix {
        let (db, dp) = (self.gamma_b.nrows(), self.gamma_bp.nrows());
        let mut g = DenseMatrix::zeros(db + dp, db + dp);
        g.view_mut((0, 0), (db, db)).copy_from(&self.gamma_b);
        g.view_mut((db, db), (dp, dp)).copy_from(&self.gamma_bp);
        g.view_mut((0, db), (db, dp)).copy_from(&self.delta);
        g.view_mut((db, 0), (dp, db)).copy_from(&self.delta.transpose());
        g
    }

    fn validate(&self, dim_b: usize) -> Result<()> {
        let (gb, gp, dl) = (&self.gamma_b, &self.gamma_bp, &self.delta);
        if gb.nrows() != dim_b
            || gb.ncols() != dim_b
            || gp.nrows() != self.output.dim()
            || gp.ncols() != self.output.dim()
            || dl.nrows() != dim_b
            || dl.ncols() != self.output.dim()
        {
            return Err(CmError::DimensionMismatch(format!(
                "map blocks {}x{}, {}x{}, {}x{} do not fit input dimension {} and output `{}`",
                gb.nrows(),
                gb.ncols(),
                gp.nrows(),
                gp.ncols(),
                dl.nrows(),
                dl.ncols(),
                dim_b,
                self.output
            )));
        }
        let joint = self.joint();
        check_symmetric(&joint)?;
        let min_eig = min_eig_sym(&joint)?;
        if min_eig <= TOL_PD {
            return Err(CmError::NotPd { min_eig });
        }
        Ok(())
    }
}

/// Applies a classical Gaussian map to the parties `on`.
///
/// The output lists the untouched parties first, in their original order,
/// followed by the parties of `spec.output`. Computed as the Schur
/// complement `(γ_BB′ + V) / (γ_B + V_B)` of the joint matrix on
/// `(rest, B, B′)`.
pub fn classical_gaussian_map(
    v: &CovarianceMatrix,
    spec: &GaussianMapSpec,
    on: &PartySelector,
) -> Result<CovarianceMatrix> {
    let part = v.partition();
    let b_idx = part.indices(on)?;
    spec.validate(b_idx.len())?;
    let rest_sel = part.complement(on)?;
    let rest_part = match &rest_sel {
        Some(sel) => part.restrict(sel)?,
        None => ModePartition::default(),
    };
    let out_part = rest_part.concat(&spec.output)?;
    let r_idx = b_idx.complement(v.dim());

    let (dr, db, dp) = (r_idx.len(), b_idx.len(), spec.gamma_bp.nrows());
    let vm = v.matrix();
    let mut joint = DenseMatrix::zeros(dr + db + dp, dr + db + dp);
    joint
        .view_mut((0, 0), (dr, dr))
        .copy_from(&principal(vm, &r_idx));
    let v_rb = submatrix(vm, r_idx.as_slice(), b_idx.as_slice());
    joint.view_mut((0, dr), (dr, db)).copy_from(&v_rb);
    joint
        .view_mut((dr, 0), (db, dr))
        .copy_from(&v_rb.transpose());
    joint
        .view_mut((dr, dr), (db, db))
        .copy_from(&(principal(vm, &b_idx) + &spec.gamma_b));
    joint
        .view_mut((dr, dr + db), (db, dp))
        .copy_from(&spec.delta);
    joint
        .view_mut((dr + db, dr), (dp, db))
        .copy_from(&spec.delta.transpose());
    joint
        .view_mut((dr + db, dr + db), (dp, dp))
        .copy_from(&spec.gamma_bp);

    let keep: Vec<usize> = (0..dr).chain(dr + db..dr + db + dp).collect();
    let keep = IndexSet::new(keep, joint.nrows())?;
    let out = schur_complement(&joint, &keep)?;
    Ok(CovarianceMatrix::from_parts_unchecked(out, out_part))
}

/// Conditional CM after a Gaussian measurement with seed matrix `gamma` on
/// the parties `measured`: `(V + 0 ⊕ γ) / (V_C + γ)`.
pub fn measurement_update(
    v: &CovarianceMatrix,
    gamma: &DenseMatrix,
    measured: &PartySelector,
) -> Result<CovarianceMatrix> {
    let part = v.partition();
    let c_idx = part.indices(measured)?;
    if gamma.nrows() != c_idx.len() || gamma.ncols() != c_idx.len() {
        return Err(CmError::DimensionMismatch(format!(
            "measurement matrix is {}x{}, measured block has dimension {}",
            gamma.nrows(),
            gamma.ncols(),
            c_idx.len()
        )));
    }
    check_symmetric(gamma)?;
    let rest = part.complement(measured)?.ok_or_else(|| {
        CmError::InvalidPartition("measurement would leave no parties".into())
    })?;
    let mut m = v.matrix().clone();
    for (a, &i) in c_idx.as_slice().iter().enumerate() {
        for (b, &j) in c_idx.as_slice().iter().enumerate() {
            m[(i, j)] += gamma[(a, b)];
        }
    }
    let keep = part.indices(&rest)?;
    let out = schur_complement(&symmetrize(&m), &keep)?;
    Ok(CovarianceMatrix::from_parts_unchecked(
        out,
        part.restrict(&rest)?,
    ))
}

/// `V / V_conditioning`: the CM of the remaining parties conditioned on
/// `conditioning`.
pub fn conditional_cm(
    v: &CovarianceMatrix,
    conditioning: &PartySelector,
) -> Result<CovarianceMatrix> {
    let part = v.partition();
    let rest = part.complement(conditioning)?.ok_or_else(|| {
        CmError::InvalidPartition("conditioning on every party leaves nothing".into())
    })?;
    let keep = part.indices(&rest)?;
    let out = schur_complement(v.matrix(), &keep)?;
    Ok(CovarianceMatrix::from_parts_unchecked(
        out,
        part.restrict(&rest)?,
    ))
}
