//! Scalar correlation quantifiers built on symplectic spectra and Schur
//! complements. All values are in nats.

mod e2;
mod renyi;

use std::fmt;
use std::str::FromStr;

use crate::cm::{CovarianceMatrix, PartySelector};
use crate::error::{CmError, Result};
use crate::gaussian_ops::{conditional_cm, partial_trace, partial_transpose};
use crate::linalg::{geometric_mean, inverse_pd, log_det_psd, DenseMatrix};
use crate::symplectic::{omega, require_bona_fide, symplectic_spectrum, williamson};

pub use e2::{e2_estimate, E2SearchConfig};
pub use renyi::{f_alpha, f_alpha_dd, f_one_dd, renyi_entropy, renyi_from_spectrum};

/// `(g₊, g₋)` of a symplectic spectrum.
pub fn g_from_spectrum(nus: &[f64]) -> (f64, f64) {
    nus.iter().fold((0.0, 0.0), |(p, m), nu| {
        let l = nu.ln();
        (p + l.max(0.0), m + (-l).max(0.0))
    })
}

pub fn g_plus_matrix(m: &DenseMatrix) -> Result<f64> {
    Ok(g_from_spectrum(&symplectic_spectrum(m)?).0)
}

pub fn g_minus_matrix(m: &DenseMatrix) -> Result<f64> {
    Ok(g_from_spectrum(&symplectic_spectrum(m)?).1)
}

/// `g₊(V) = Σ max(ln νᵢ, 0)`.
pub fn g_plus(v: &CovarianceMatrix) -> Result<f64> {
    g_plus_matrix(v.matrix())
}

/// `g₋(V) = Σ max(−ln νᵢ, 0)`.
pub fn g_minus(v: &CovarianceMatrix) -> Result<f64> {
    g_minus_matrix(v.matrix())
}

/// Gaussian steerability `𝒢(steering ⟩ steered) = g₋(V_{XY} / V_X)`.
///
/// Parties outside `steering ∪ steered` are traced out first.
pub fn steerability(
    v: &CovarianceMatrix,
    steering: &PartySelector,
    steered: &PartySelector,
) -> Result<f64> {
    if !steering.is_disjoint(steered) {
        return Err(CmError::InvalidPartition(
            "steering and steered parties overlap".into(),
        ));
    }
    let joint = partial_trace(v, &steering.union(steered))?;
    g_minus(&conditional_cm(&joint, steering)?)
}

/// Logarithmic negativity across `cut | rest`: `g₋` of the partially
/// transposed CM.
pub fn log_negativity(v: &CovarianceMatrix, cut: &PartySelector) -> Result<f64> {
    require_bona_fide(v.matrix())?;
    g_minus(&partial_transpose(v, cut)?)
}

/// `Tr ρ² = (det V)^{-1/2}`.
pub fn purity(v: &CovarianceMatrix) -> Result<f64> {
    require_bona_fide(v.matrix())?;
    Ok((-0.5 * log_det_psd(v.matrix())?).exp())
}

fn split(v: &CovarianceMatrix, cut: &PartySelector) -> Result<(DenseMatrix, DenseMatrix)> {
    let rest = v
        .partition()
        .complement(cut)?
        .ok_or_else(|| CmError::InvalidPartition("cut contains every party".into()))?;
    Ok((v.block(cut)?, v.block(&rest)?))
}

/// Rényi-2 mutual information `½ ln(det V_A det V_B / det V)` across
/// `cut | rest`.
pub fn mutual_info_2(v: &CovarianceMatrix, cut: &PartySelector) -> Result<f64> {
    let (a, b) = split(v, cut)?;
    Ok(0.5 * (log_det_psd(&a)? + log_det_psd(&b)? - log_det_psd(v.matrix())?))
}

/// Upper bound on the Gaussian Rényi-2 entanglement and the pure CM that
/// attains it.
#[derive(Debug, Clone)]
pub struct E2Upper {
    pub bound: f64,
    pub witness: CovarianceMatrix,
}

/// `γ# = V # (Ω V⁻¹ Ωᵀ)`, a pure CM below `V`, scored by `½ ln det γ#_cut`.
pub fn e2_upper(v: &CovarianceMatrix, cut: &PartySelector) -> Result<E2Upper> {
    require_bona_fide(v.matrix())?;
    let o = omega(v.n_modes());
    let dual = &o * inverse_pd(v.matrix())? * o.transpose();
    let g = geometric_mean(v.matrix(), &dual)?;
    let witness = CovarianceMatrix::from_parts_unchecked(g, v.partition().clone());
    split(&witness, cut)?;
    let bound = 0.5 * log_det_psd(&witness.block(cut)?)?;
    Ok(E2Upper { bound, witness })
}

/// `Z̄ = S diag(max(νᵢ, 1)) Sᵀ`: a quantum CM above `V` with
/// `½ ln det Z̄ = g₊(V)`.
pub fn variational_certificate_gplus(v: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    let w = williamson(v.matrix())?;
    Ok(CovarianceMatrix::from_parts_unchecked(
        w.rebuild_with(|nu| nu.max(1.0)),
        v.partition().clone(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    GPlus,
    GMinus,
    Steerability,
    LogNegativity,
    RenyiEntropy,
    MutualInfo2,
    E2Upper,
    E2Estimate,
    Purity,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 9] = [
        MeasureKind::GPlus,
        MeasureKind::GMinus,
        MeasureKind::Steerability,
        MeasureKind::LogNegativity,
        MeasureKind::RenyiEntropy,
        MeasureKind::MutualInfo2,
        MeasureKind::E2Upper,
        MeasureKind::E2Estimate,
        MeasureKind::Purity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::GPlus => "g_plus",
            MeasureKind::GMinus => "g_minus",
            MeasureKind::Steerability => "steerability",
            MeasureKind::LogNegativity => "log_negativity",
            MeasureKind::RenyiEntropy => "renyi_entropy",
            MeasureKind::MutualInfo2 => "mutual_info_2",
            MeasureKind::E2Upper => "e2_upper",
            MeasureKind::E2Estimate => "e2_estimate",
            MeasureKind::Purity => "purity",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = MeasureKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown measure `{s}` (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue {
    pub kind: MeasureKind,
    pub value: f64,
}
