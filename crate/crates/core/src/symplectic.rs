//! Symplectic forms, spectra, Williamson decomposition and random ensembles.

use nalgebra::linalg::Schur;

use crate::cm::{CovarianceMatrix, ModePartition};
use crate::error::{CmError, Result};
use crate::linalg::{
    check_symmetric, max_abs, sqrt_psd, sym_eig, symmetrize, DenseMatrix, TOL_PD, TOL_RECON,
};
use crate::rng::SeededRng;

/// Bona fide tolerance on the smallest symplectic eigenvalue.
pub const TOL_BONA: f64 = 1e-9;
/// Purity tolerance on every symplectic eigenvalue.
pub const TOL_PURE: f64 = 1e-7;

/// Label given to the ancillary party added by [`purify`].
pub const PURIFIER_LABEL: &str = "PURIF";

/// `⊕ [[0, 1], [-1, 0]]` over `n_modes` interleaved modes.
pub fn omega(n_modes: usize) -> DenseMatrix {
    let d = 2 * n_modes;
    let mut m = DenseMatrix::zeros(d, d);
    for k in 0..n_modes {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    m
}

fn modes_of_dim(m: &DenseMatrix) -> Result<usize> {
    if m.nrows() % 2 != 0 || m.nrows() == 0 {
        return Err(CmError::DimensionMismatch(format!(
            "dimension {} is not a positive even number",
            m.nrows()
        )));
    }
    Ok(m.nrows() / 2)
}

/// Pairs an ascending list with every value appearing twice.
fn pair_up(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect()
}

fn ensure_pd(m: &DenseMatrix) -> Result<()> {
    let eig = sym_eig(m)?;
    if eig.min() <= TOL_PD {
        return Err(CmError::NotPd { min_eig: eig.min() });
    }
    Ok(())
}

/// Symplectic eigenvalues of a positive definite matrix, ascending: the
/// singular values of `V^{1/2} Ω V^{1/2}`, each taken once.
pub fn symplectic_spectrum(m: &DenseMatrix) -> Result<Vec<f64>> {
    let n = modes_of_dim(m)?;
    ensure_pd(m)?;
    let r = sqrt_psd(m)?;
    let k = &r * omega(n) * &r;
    let sv = k.singular_values();
    Ok(pair_up(sv.iter().copied().collect()))
}

/// Moduli of the eigenvalues of `iΩM`, each taken once, ascending.
///
/// Agrees with [`symplectic_spectrum`] on positive definite input and is
/// also defined for indefinite symmetric matrices.
pub fn symplectic_spectrum_moduli(m: &DenseMatrix) -> Result<Vec<f64>> {
    let n = modes_of_dim(m)?;
    check_symmetric(m)?;
    let a = omega(n) * m;
    let ev = a.complex_eigenvalues();
    Ok(pair_up(ev.iter().map(|z| z.norm()).collect()))
}

/// `V = S · diag(ν₁, ν₁, …, νₙ, νₙ) · Sᵀ` with `S` symplectic.
#[derive(Debug, Clone)]
pub struct WilliamsonResult {
    pub s: DenseMatrix,
    pub nus: Vec<f64>,
}

impl WilliamsonResult {
    /// `diag(ν₁, ν₁, …)` in interleaved ordering.
    pub fn diagonal(&self) -> DenseMatrix {
        let d = 2 * self.nus.len();
        DenseMatrix::from_fn(d, d, |r, c| if r == c { self.nus[r / 2] } else { 0.0 })
    }

    /// `S · diag(f(ν)) · Sᵀ`.
    pub fn rebuild_with(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let mut scaled = self.s.clone();
        for j in 0..scaled.ncols() {
            let v = f(self.nus[j / 2]);
            scaled.column_mut(j).scale_mut(v);
        }
        symmetrize(&(scaled * self.s.transpose()))
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        self.rebuild_with(|nu| nu)
    }
}

/// Williamson decomposition of a positive definite matrix.
///
/// `K = V^{1/2} Ω V^{1/2}` is brought to real canonical form `Oᵀ K O =
/// ⊕ νᵢ [[0, 1], [-1, 0]]` with a real Schur factorization, then
/// `S = V^{1/2} O Λ^{-1/2}`.
pub fn williamson(m: &DenseMatrix) -> Result<WilliamsonResult> {
    let n = modes_of_dim(m)?;
    ensure_pd(m)?;
    let d = 2 * n;
    let om = omega(n);
    let r = sqrt_psd(m)?;
    let k = &r * &om * &r;
    let k = (&k - k.transpose()) * 0.5;

    let (q, t) = Schur::new(k).unpack();
    let kscale = max_abs(&t).max(f64::MIN_POSITIVE);
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(n);
    let mut i = 0;
    while i < d {
        if i + 1 >= d || t[(i + 1, i)].abs() <= 1e-12 * kscale {
            return Err(CmError::NumericalFailure(format!(
                "canonical form has an unpaired real eigenvalue at position {i}"
            )));
        }
        let b = 0.5 * (t[(i, i + 1)] - t[(i + 1, i)]);
        if b >= 0.0 {
            pairs.push((b, i, i + 1));
        } else {
            pairs.push((-b, i + 1, i));
        }
        i += 2;
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut s = DenseMatrix::zeros(d, d);
    let mut nus = Vec::with_capacity(n);
    for (slot, &(nu, c0, c1)) in pairs.iter().enumerate() {
        let w = 1.0 / nu.sqrt();
        let col0 = &r * q.column(c0) * w;
        let col1 = &r * q.column(c1) * w;
        s.column_mut(2 * slot).copy_from(&col0);
        s.column_mut(2 * slot + 1).copy_from(&col1);
        nus.push(nu);
    }
    let result = WilliamsonResult { s, nus };

    let symp_err = max_abs(&(&result.s * &om * result.s.transpose() - &om));
    let scale_s = 1.0 + max_abs(&result.s).powi(2);
    let recon_err = max_abs(&(result.reconstruct() - m));
    if symp_err > TOL_RECON * scale_s || recon_err > TOL_RECON * (1.0 + max_abs(m)) {
        return Err(CmError::NumericalFailure(format!(
            "Williamson residuals too large (symplectic {symp_err:e}, reconstruction {recon_err:e})"
        )));
    }
    Ok(result)
}

/// Outcome of a bona fide test: `margin = ν_min − 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BonaFide {
    pub is_bona_fide: bool,
    pub margin: f64,
}

/// `V + iΩ ≥ 0`, tested through the smallest symplectic eigenvalue.
///
/// Singular PSD input is reported as not bona fide with margin `-1`;
/// indefinite input is an error.
pub fn is_bona_fide(m: &DenseMatrix) -> Result<BonaFide> {
    modes_of_dim(m)?;
    let eig = sym_eig(m)?;
    if eig.min() < -crate::linalg::TOL_PSD_REL * (1.0 + eig.max().max(0.0)) {
        return Err(CmError::NotPsd { min_eig: eig.min() });
    }
    if eig.min() <= TOL_PD {
        return Ok(BonaFide {
            is_bona_fide: false,
            margin: -1.0,
        });
    }
    let nu_min = symplectic_spectrum(m)?[0];
    Ok(BonaFide {
        is_bona_fide: nu_min >= 1.0 - TOL_BONA,
        margin: nu_min - 1.0,
    })
}

pub(crate) fn require_bona_fide(m: &DenseMatrix) -> Result<()> {
    let nu_min = symplectic_spectrum(m)?[0];
    if nu_min < 1.0 - TOL_BONA {
        return Err(CmError::NotBonaFide { nu_min });
    }
    Ok(())
}

/// All symplectic eigenvalues equal to one within [`TOL_PURE`].
pub fn is_pure_cm(m: &DenseMatrix) -> Result<bool> {
    Ok(symplectic_spectrum(m)?
        .iter()
        .all(|nu| (nu - 1.0).abs() <= TOL_PURE))
}

/// Random symmetric matrix with independent `N(0, strength²)` entries.
pub fn random_symmetric(dim: usize, strength: f64, rng: &mut SeededRng) -> DenseMatrix {
    let mut h = DenseMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v = strength * rng.normal();
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    h
}

/// `S = exp(Ω H)` for a random symmetric `H`.
pub fn random_symplectic(n_modes: usize, strength: f64, rng: &mut SeededRng) -> DenseMatrix {
    let h = random_symmetric(2 * n_modes, strength, rng);
    (omega(n_modes) * h).exp()
}

/// `S · diag(ν) · Sᵀ` with `νᵢ ~ U[nu_lo, nu_hi]`. Not bona fide when
/// `nu_lo < 1`; used for the plain positive definite ensembles.
pub fn random_pd_cm(
    partition: &ModePartition,
    nu_lo: f64,
    nu_hi: f64,
    strength: f64,
    rng: &mut SeededRng,
) -> CovarianceMatrix {
    let n = partition.n_modes();
    let nus: Vec<f64> = (0..n).map(|_| rng.uniform(nu_lo, nu_hi)).collect();
    let s = random_symplectic(n, strength, rng);
    let w = WilliamsonResult { s, nus };
    CovarianceMatrix::from_parts_unchecked(w.reconstruct(), partition.clone())
}

/// Random quantum CM: symplectic eigenvalues uniform on `[1, nu_max]`.
/// `nu_max = 1` gives pure states.
pub fn random_quantum_cm(
    partition: &ModePartition,
    nu_max: f64,
    strength: f64,
    rng: &mut SeededRng,
) -> CovarianceMatrix {
    random_pd_cm(partition, 1.0, nu_max.max(1.0), strength, rng)
}

/// Pure CM on `partition ⊕ PURIF` whose marginal on `partition` is `V`.
///
/// Each Williamson mode is paired with one ancilla mode in the two-mode
/// squeezed form `[[ν I, √(ν²−1) Z], [√(ν²−1) Z, ν I]]`, and the result is
/// transformed by `S ⊕ I`.
pub fn purify(v: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    require_bona_fide(v.matrix())?;
    let w = williamson(v.matrix())?;
    let n = w.nus.len();
    let d = 2 * n;
    let mut core = DenseMatrix::zeros(2 * d, 2 * d);
    for (k, &nu) in w.nus.iter().enumerate() {
        // sqrt(ν²−1) amplifies round-off near ν = 1; snap those modes to vacuum
        let nu = if nu <= 1.0 + TOL_BONA { 1.0 } else { nu };
        let c = (nu * nu - 1.0).sqrt();
        let (a, b) = (2 * k, d + 2 * k);
        core[(a, a)] = nu;
        core[(a + 1, a + 1)] = nu;
        core[(b, b)] = nu;
        core[(b + 1, b + 1)] = nu;
        core[(a, b)] = c;
        core[(b, a)] = c;
        core[(a + 1, b + 1)] = -c;
        core[(b + 1, a + 1)] = -c;
    }
    let big_s = crate::linalg::direct_sum(&w.s, &DenseMatrix::identity(d, d));
    let matrix = symmetrize(&(&big_s * core * big_s.transpose()));
    let partition = v
        .partition()
        .concat(&ModePartition::single(PURIFIER_LABEL, n)?)?;
    CovarianceMatrix::new_symmetric(matrix, partition)
}
