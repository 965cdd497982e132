//! The published 8×8 matrix on `A (2 modes), B1, B2` for which the
//! monogamy inequality with `A` as the steered party fails.

use crate::cm::{CovarianceMatrix, ModePartition, PartySelector};
use crate::error::Result;
use crate::linalg::{min_eig_sym, principal, schur_complement_general, DenseMatrix};
use crate::measures::g_from_spectrum;
use crate::symplectic::symplectic_spectrum_moduli;

/// Entries as printed. Rows 0..4 belong to `A` in the blocked order
/// `(x₁, x₂, p₁, p₂)`; rows 4..6 to `B1`, rows 6..8 to `B2`.
pub const PUBLISHED: [[f64; 8]; 8] = [
    [1.2, -0.3, 0.4, -2.7, 1.8, -1.9, 0.4, -0.1],
    [-0.3, 0.9, -1.2, 0.4, -1.2, 0.5, -0.4, 0.1],
    [0.4, -1.2, 4.5, 1.6, -1.4, 1.8, -0.1, -0.3],
    [-2.7, 0.4, 1.6, 12.0, -9.5, 10.1, -1.4, -0.3],
    [1.8, -1.2, -1.4, -9.5, 11.9, -11.5, 1.6, 0.8],
    [-1.9, 0.5, 1.8, 10.1, -11.5, 11.9, -1.0, -1.4],
    [0.4, -0.4, -0.1, -1.4, 1.6, -1.0, 2.4, -2.0],
    [-0.1, 0.1, -0.3, -0.3, 0.8, -1.4, -2.0, 2.8],
];

/// Row `i` of the interleaved matrix is row `INTERLEAVE[i]` of [`PUBLISHED`].
pub const INTERLEAVE: [usize; 8] = [0, 2, 1, 3, 4, 5, 6, 7];

pub const PARTITION: &str = "A:2,B1:1,B2:1";

pub fn published_matrix() -> DenseMatrix {
    DenseMatrix::from_fn(8, 8, |i, j| PUBLISHED[i][j])
}

/// The published matrix with quadratures reordered to `(x₁, p₁, x₂, p₂, …)`.
pub fn interleaved_matrix() -> DenseMatrix {
    DenseMatrix::from_fn(8, 8, |i, j| PUBLISHED[INTERLEAVE[i]][INTERLEAVE[j]])
}

/// The counterexample as a [`CovarianceMatrix`]. It is symmetric but not
/// positive semidefinite, so only the general-purpose routes apply to it.
pub fn counterexample_cm() -> CovarianceMatrix {
    CovarianceMatrix::new_symmetric(
        interleaved_matrix(),
        ModePartition::parse(PARTITION).expect("static partition"),
    )
    .expect("published matrix is symmetric")
}

/// `g₋(M_XY / M_X)` for any symmetric `M` with invertible `M_X`, using an
/// LU Schur complement and the eigenvalue-moduli spectrum.
pub fn steerability_general(
    v: &CovarianceMatrix,
    steering: &PartySelector,
    steered: &PartySelector,
) -> Result<f64> {
    let p = v.partition();
    let joint = steering.union(steered);
    let sub = principal(v.matrix(), &p.indices(&joint)?);
    let sub_p = p.restrict(&joint)?;
    let keep = sub_p.indices(steered)?;
    let cond = schur_complement_general(&sub, &keep)?;
    Ok(g_from_spectrum(&symplectic_spectrum_moduli(&cond)?).1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleReport {
    pub nu_min: f64,
    /// `𝒢(B1 B2⟩A) − 𝒢(B1⟩A) − 𝒢(B2⟩A)`.
    pub gap: f64,
    pub g_joint: f64,
    pub g_b1: f64,
    pub g_b2: f64,
    /// Smallest ordinary eigenvalue; negative for the printed entries.
    pub min_eigenvalue: f64,
}

impl CounterexampleReport {
    pub fn individual(&self) -> (f64, f64, f64) {
        (self.g_joint, self.g_b1, self.g_b2)
    }
}

pub fn reproduce_counterexample() -> Result<CounterexampleReport> {
    let v = counterexample_cm();
    let a = PartySelector::one("A");
    let nu_min = symplectic_spectrum_moduli(v.matrix())?[0];
    let g_joint = steerability_general(&v, &PartySelector::parse("B1,B2")?, &a)?;
    let g_b1 = steerability_general(&v, &PartySelector::one("B1"), &a)?;
    let g_b2 = steerability_general(&v, &PartySelector::one("B2"), &a)?;
    Ok(CounterexampleReport {
        nu_min,
        gap: g_joint - g_b1 - g_b2,
        g_joint,
        g_b1,
        g_b2,
        min_eigenvalue: min_eig_sym(v.matrix())?,
    })
}
