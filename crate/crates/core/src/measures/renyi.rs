//! Rényi-α entropies of Gaussian states and the one-variable family `f_α`
//! that governs their behaviour under geometric means.

use crate::cm::CovarianceMatrix;
use crate::error::{CmError, Result};
use crate::symplectic::{require_bona_fide, symplectic_spectrum};

fn check_alpha(alpha: f64, min: f64, inclusive: bool) -> Result<()> {
    let ok = alpha.is_finite() && if inclusive { alpha >= min } else { alpha > min };
    if ok {
        Ok(())
    } else {
        Err(CmError::BadAlpha(alpha))
    }
}

/// `ln tanh(x/2)` for `x > 0`, accurate at both ends.
fn ln_tanh_half(x: f64) -> f64 {
    let e = (-x).exp();
    let num = if x < std::f64::consts::LN_2 {
        (-(-x).exp_m1()).ln()
    } else {
        (-e).ln_1p()
    };
    num - e.ln_1p()
}

/// `ln((eˣ + 1)/2)`.
fn ln_half_cosh_shift(x: f64) -> f64 {
    x + (-x).exp().ln_1p() - std::f64::consts::LN_2
}

/// `f₁(x) = a ln a − b ln b` with `a = (eˣ+1)/2`, `b = (eˣ−1)/2`, summed as
/// `ln a + b ln(1 + 1/b)` to avoid cancelling two large terms.
fn f_one(x: f64) -> f64 {
    let b = 0.5 * x.exp_m1();
    let tail = if b > 0.0 { b * (1.0 / b).ln_1p() } else { 0.0 };
    ln_half_cosh_shift(x) + tail
}

/// `f_α(x) = −1/(α−1) · ln(2^α / ((eˣ+1)^α − (eˣ−1)^α))`, with the von
/// Neumann form at `α = 1`. Defined for `x ≥ 0`.
pub fn f_alpha(x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, 1.0, true)?;
    if !(x >= 0.0) || !x.is_finite() {
        return Err(CmError::Domain(format!("f_alpha needs finite x >= 0, got {x}")));
    }
    if alpha == 1.0 {
        return Ok(f_one(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let tail = (-(alpha * ln_tanh_half(x)).exp_m1()).ln();
    Ok((alpha * ln_half_cosh_shift(x) + tail) / (alpha - 1.0))
}

/// Closed-form second derivative of [`f_alpha`] for `α > 1`, `x > 0`:
///
/// `f″ = α/(α−1) · cosh^α sinh^α / (sinh²x (cosh^α − sinh^α)²)
///       · (cosh^α sinh^{2−α} − sinh^α cosh^{2−α} − α + 1)`,
///
/// with half-angle arguments. Evaluated through `L = ln tanh(x/2)` and
/// `δ = α − 2` so both factors keep full relative accuracy near `α = 2`
/// and for large `x`.
pub fn f_alpha_dd(x: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha, 1.0, false)?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(CmError::Domain(format!("f_alpha_dd needs finite x > 0, got {x}")));
    }
    let l = ln_tanh_half(x);
    let delta = alpha - 2.0;
    let one_minus_t2 = -(2.0 * l).exp_m1();
    let one_minus_ta = -(alpha * l).exp_m1();
    let ratio = one_minus_t2 / one_minus_ta;
    let prefactor = alpha / (alpha - 1.0) * (delta * l).exp() * ratio * ratio / 4.0;
    let bracket =
        (-delta * l).exp() * ((2.0 + 2.0 * delta) * l).exp_m1() / (2.0 * l).exp_m1() - (1.0 + delta);
    Ok(prefactor * bracket)
}

/// Second derivative of the von Neumann term `f₁` for `x > 0`:
/// `f₁″ = atanh(u)/u − 1/(1 − u²)` with `u = e^{−x}`, summed as
/// `−Σ_k u^{2k} · 2k/(2k+1)` for small `u`.
pub fn f_one_dd(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(CmError::Domain(format!("f_one_dd needs finite x > 0, got {x}")));
    }
    let u = (-x).exp();
    if u > 0.25 {
        return Ok(u.atanh() / u - 1.0 / (1.0 - u * u));
    }
    let u2 = u * u;
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..60 {
        term *= u2;
        let kk = 2.0 * k as f64;
        sum -= term * kk / (kk + 1.0);
        if term < 1e-18 * sum.abs() {
            break;
        }
    }
    Ok(sum)
}

/// Rényi-α entropy from a symplectic spectrum. Eigenvalues below one (by
/// round-off) are treated as one.
pub fn renyi_from_spectrum(nus: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha, 1.0, true)?;
    nus.iter()
        .map(|&nu| f_alpha(nu.max(1.0).ln(), alpha))
        .sum()
}

/// Rényi-α entropy `𝒮_α(V)` of a Gaussian state, `α ≥ 1`; `α = 1` is the
/// von Neumann entropy.
pub fn renyi_entropy(v: &CovarianceMatrix, alpha: f64) -> Result<f64> {
    check_alpha(alpha, 1.0, true)?;
    require_bona_fide(v.matrix())?;
    renyi_from_spectrum(&symplectic_spectrum(v.matrix())?, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::ModePartition;
    use crate::linalg::{log_det_psd, DenseMatrix};
    use crate::rng::SeededRng;
    use crate::symplectic::random_quantum_cm;

    fn closed_form_term(nu: f64, alpha: f64) -> f64 {
        // direct evaluation of the closed form in ν
        -((2f64.powf(alpha)) / ((nu + 1.0).powf(alpha) - (nu - 1.0).powf(alpha))).ln()
            / (alpha - 1.0)
    }

    fn thermal(nu: f64) -> CovarianceMatrix {
        CovarianceMatrix::new(
            DenseMatrix::identity(2, 2) * nu,
            ModePartition::single("A", 1).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn entropy_examples() {
        let pure = random_quantum_cm(
            &ModePartition::parse("A:1,B:1").unwrap(),
            1.0,
            0.7,
            &mut SeededRng::new(3),
        );
        for a in [1.0, 1.5, 2.0, 3.0] {
            assert!(renyi_entropy(&pure, a).unwrap().abs() < 1e-7);
        }
        assert!((renyi_entropy(&thermal(3.0), 2.0).unwrap() - 3f64.ln()).abs() < 1e-12);
        assert!((renyi_entropy(&thermal(3.0), 1.0).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!(matches!(renyi_entropy(&thermal(3.0), 0.5), Err(CmError::BadAlpha(_))));
        assert!(matches!(
            renyi_entropy(&thermal(0.5), 2.0),
            Err(CmError::NotBonaFide { .. })
        ));
    }

    #[test]
    fn renyi_two_is_half_log_det() {
        let p = ModePartition::parse("A:2,B:1").unwrap();
        for t in 0..20 {
            let v = random_quantum_cm(&p, 3.0, 0.7, &mut SeededRng::with_stream(4, t));
            let s2 = renyi_entropy(&v, 2.0).unwrap();
            assert!((s2 - 0.5 * log_det_psd(v.matrix()).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn stable_form_matches_closed_form() {
        for &nu in &[1.0_f64, 1.01, 1.5, 3.0, 20.0] {
            for &a in &[1.5, 2.0, 2.5, 3.0] {
                let got = f_alpha(nu.ln(), a).unwrap();
                assert!((got - closed_form_term(nu, a)).abs() < 1e-12 * (1.0 + got.abs()));
            }
        }
    }

    #[test]
    fn f_two_is_identity() {
        for x in [1e-6, 0.1, 1.0, 5.0, 30.0] {
            assert!((f_alpha(x, 2.0).unwrap() - x).abs() < 1e-12 * (1.0 + x), "x {x}");
            assert!(f_alpha_dd(x, 2.0).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn second_derivative_matches_finite_differences() {
        let h = 1e-3;
        for &a in &[1.2, 1.5, 2.5, 3.0, 4.0] {
            for i in 1..=20 {
                let x = 0.5 * i as f64;
                let fd = (f_alpha(x + h, a).unwrap() - 2.0 * f_alpha(x, a).unwrap()
                    + f_alpha(x - h, a).unwrap())
                    / (h * h);
                let dd = f_alpha_dd(x, a).unwrap();
                assert!(
                    (fd - dd).abs() <= 1e-5f64.max(1e-5 * dd.abs()),
                    "alpha {a} x {x}: fd {fd} closed {dd}"
                );
            }
        }
    }

    #[test]
    fn von_neumann_second_derivative() {
        let h = 1e-3;
        for i in 1..=20 {
            let x = 0.25 * i as f64;
            let fd = (f_alpha(x + h, 1.0).unwrap() - 2.0 * f_alpha(x, 1.0).unwrap()
                + f_alpha(x - h, 1.0).unwrap())
                / (h * h);
            let dd = f_one_dd(x).unwrap();
            assert!(dd < 0.0);
            assert!((fd - dd).abs() <= 1e-5f64.max(1e-4 * dd.abs()), "x {x}: fd {fd} closed {dd}");
        }
        // both branches agree at the switch point
        let x = 4f64.ln();
        let u: f64 = 0.25;
        let direct = u.atanh() / u - 1.0 / (1.0 - u * u);
        assert!((f_one_dd(x).unwrap() - direct).abs() < 1e-14);
        assert!(f_one_dd(40.0).unwrap() < 0.0);
    }

    #[test]
    fn convexity_dichotomy() {
        assert!(f_alpha_dd(1.0, 1.5).unwrap() < 0.0);
        for i in 1..=100 {
            let x = 0.1 * i as f64;
            assert!(f_alpha_dd(x, 2.5).unwrap() >= -1e-12);
        }
        assert!(matches!(f_alpha_dd(1.0, 1.0), Err(CmError::BadAlpha(_))));
        assert!(matches!(f_alpha(-1.0, 2.0), Err(CmError::Domain(_))));
    }
}
