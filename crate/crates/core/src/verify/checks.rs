//! Margin functions for every registered check. A margin is the signed room
//! by which an inequality holds; the harness adds `tol · scale` before
//! deciding pass or fail.

use crate::cm::{CovarianceMatrix, ModePartition, PartySelector};
use crate::error::Result;
use crate::gaussian_ops::{
    classical_gaussian_map, conditional_cm, measurement_update, partial_trace, GaussianMapSpec,
};
use crate::linalg::{
    inverse_pd, log_det_psd, max_abs, min_eig_sym, symmetrize, DenseMatrix,
};
use crate::measures::{
    e2_upper, f_alpha, f_alpha_dd, f_one_dd, g_minus, g_minus_matrix, g_plus, g_plus_matrix, mutual_info_2,
    purity, steerability, variational_certificate_gplus,
};
use crate::rng::SeededRng;
use crate::symplectic::{
    is_pure_cm, omega, purify, random_pd_cm, random_quantum_cm, random_symmetric,
    random_symplectic, symplectic_spectrum, williamson, PURIFIER_LABEL,
};

use super::CheckConfig;

/// Signed slack of one trial before tolerance: the trial fails when
/// `margin + tol · scale < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub margin: f64,
    pub scale: f64,
}

impl Margin {
    pub fn new(margin: f64, scale: f64) -> Self {
        Margin { margin, scale }
    }

    /// Margin for a strict inequality: tolerance does not help.
    pub fn strict(margin: f64) -> Self {
        Margin { margin, scale: 0.0 }
    }

    pub fn slack(&self, tol: f64) -> f64 {
        if self.margin.is_nan() {
            return f64::NEG_INFINITY;
        }
        self.margin + tol * self.scale
    }

    /// The tighter of two margins, judged at `tol`.
    pub fn min(self, other: Margin, tol: f64) -> Margin {
        if other.slack(tol) < self.slack(tol) {
            other
        } else {
            self
        }
    }
}

fn sel(s: &str) -> PartySelector {
    PartySelector::parse(s).expect("static selector")
}

fn block(v: &CovarianceMatrix, s: &str) -> Result<DenseMatrix> {
    v.block(&sel(s))
}

fn logdet(v: &CovarianceMatrix, s: &str) -> Result<f64> {
    log_det_psd(&block(v, s)?)
}

/// `V_{keep ∪ cond} / V_cond` as a plain matrix.
fn cond_block(v: &CovarianceMatrix, keep: &str, cond: &str) -> Result<DenseMatrix> {
    let joint = partial_trace(v, &sel(keep).union(&sel(cond)))?;
    Ok(conditional_cm(&joint, &sel(cond))?.into_parts().0)
}

fn scale_of(ms: &[&DenseMatrix]) -> f64 {
    1.0 + ms.iter().map(|m| max_abs(m)).fold(0.0, f64::max)
}

// ----- ensembles -----------------------------------------------------------

pub(crate) fn random_partition(labels: &[&str], cfg: &CheckConfig, rng: &mut SeededRng) -> ModePartition {
    ModePartition::new(
        labels
            .iter()
            .map(|l| (l.to_string(), rng.int(1, cfg.max_modes_per_party.max(1)))),
    )
    .expect("distinct labels")
}

/// Positive definite CM that need not be bona fide.
pub(crate) fn pd_ensemble(labels: &[&str], cfg: &CheckConfig, rng: &mut SeededRng) -> CovarianceMatrix {
    let p = random_partition(labels, cfg, rng);
    random_pd_cm(&p, 0.2, cfg.nu_max.max(1.0), cfg.strength, rng)
}

pub(crate) fn quantum_ensemble(
    labels: &[&str],
    cfg: &CheckConfig,
    rng: &mut SeededRng,
) -> CovarianceMatrix {
    let p = random_partition(labels, cfg, rng);
    random_quantum_cm(&p, cfg.nu_max, cfg.strength, rng)
}

pub(crate) fn pure_ensemble(labels: &[&str], cfg: &CheckConfig, rng: &mut SeededRng) -> CovarianceMatrix {
    let p = random_partition(labels, cfg, rng);
    random_quantum_cm(&p, 1.0, cfg.strength, rng)
}

fn random_pure_gamma(n_modes: usize, cfg: &CheckConfig, rng: &mut SeededRng) -> DenseMatrix {
    let s = random_symplectic(n_modes, cfg.strength, rng);
    symmetrize(&(&s * s.transpose()))
}

fn random_psd(dim: usize, strength: f64, rng: &mut SeededRng) -> DenseMatrix {
    let r = random_symmetric(dim, strength, rng);
    symmetrize(&(&r * r.transpose()))
}

// ----- Schur complement and log-det inequalities ---------------------------

/// `ln det V_AC + ln det V_BC − ln det V_ABC − ln det V_C ≥ 0`.
pub fn ssa_logdet_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let terms = [
        logdet(v, "A,C")?,
        logdet(v, "B,C")?,
        log_det_psd(v.matrix())?,
        logdet(v, "C")?,
    ];
    let m = terms[0] + terms[1] - terms[2] - terms[3];
    Ok(Margin::new(m, 1.0 + terms.iter().map(|t| t.abs()).sum::<f64>()))
}

/// `ln det V_AC + ln det V_BC − ln det V_A − ln det V_B ≥ 0` for quantum CMs.
pub fn logdet_ineq_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let terms = [
        logdet(v, "A,C")?,
        logdet(v, "B,C")?,
        logdet(v, "A")?,
        logdet(v, "B")?,
    ];
    let m = terms[0] + terms[1] - terms[2] - terms[3];
    Ok(Margin::new(m, 1.0 + terms.iter().map(|t| t.abs()).sum::<f64>()))
}

/// `V_AC / V_C ≥ V_ABC / V_BC`.
pub fn thm1_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let lhs = cond_block(v, "A", "C")?;
    let rhs = cond_block(v, "A", "B,C")?;
    Ok(Margin::new(min_eig_sym(&(&lhs - &rhs))?, scale_of(&[v.matrix()])))
}

/// `Γ(V_AB) / Γ(V_B) ≥ V_AB / V_B` for a classical Gaussian map on `B`
/// whose output party is `Bp`.
pub fn thm2_margin(v: &CovarianceMatrix, spec: &GaussianMapSpec) -> Result<Margin> {
    let mapped = classical_gaussian_map(v, spec, &sel("B"))?;
    let lhs = cond_block(&mapped, "A", "Bp")?;
    let rhs = cond_block(v, "A", "B")?;
    Ok(Margin::new(
        min_eig_sym(&(&lhs - &rhs))?,
        scale_of(&[v.matrix(), mapped.matrix()]),
    ))
}

/// `V_AC / V_A ≥ Ω_Cᵀ (V_BC / V_B)⁻¹ Ω_C` for quantum CMs.
pub fn thm3_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let lhs = cond_block(v, "C", "A")?;
    let w = cond_block(v, "C", "B")?;
    let oc = omega(w.nrows() / 2);
    let rhs = oc.transpose() * inverse_pd(&w)? * &oc;
    Ok(Margin::new(
        min_eig_sym(&(&lhs - &rhs))?,
        scale_of(&[v.matrix(), &rhs]),
    ))
}

// ----- g± -------------------------------------------------------------------

/// `g₋(V_AB) ≥ g₋(V_A) + g₋(V_B)`.
pub fn gminus_superadd_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let joint = g_minus(v)?;
    let a = g_minus_matrix(&block(v, "A")?)?;
    let b = g_minus_matrix(&block(v, "B")?)?;
    Ok(Margin::new(joint - a - b, 1.0 + joint + a + b))
}

/// Convexity `g₋(pV + (1−p)W) ≤ p g₋(V) + (1−p) g₋(W)` and monotonicity
/// `g₋(V + P) ≤ g₋(V)` for `P ≥ 0`.
pub fn gminus_convex_margin(
    v: &DenseMatrix,
    w: &DenseMatrix,
    p: f64,
    bump: &DenseMatrix,
    tol: f64,
) -> Result<Margin> {
    let mix = symmetrize(&(v * p + w * (1.0 - p)));
    let (gv, gw, gm) = (g_minus_matrix(v)?, g_minus_matrix(w)?, g_minus_matrix(&mix)?);
    let convex = Margin::new(p * gv + (1.0 - p) * gw - gm, 1.0 + gv + gw);
    let up = g_minus_matrix(&symmetrize(&(v + bump)))?;
    let mono = Margin::new(gv - up, 1.0 + gv);
    Ok(convex.min(mono, tol))
}

/// `g₊` on multiples of the identity breaks midpoint convexity for
/// `c₁, c₂ ≥ 1` and midpoint concavity for `c₁ < 1 < c₂`. Both breaks are
/// strict, so the margin carries no tolerance.
pub fn gplus_nonconvex_margin(
    n_modes: usize,
    convex_pair: (f64, f64),
    concave_pair: (f64, f64),
) -> Result<Margin> {
    let d = 2 * n_modes;
    let g = |c: f64| g_plus_matrix(&(DenseMatrix::identity(d, d) * c));
    let (a, b) = convex_pair;
    let convex_break = g(0.5 * (a + b))? - 0.5 * (g(a)? + g(b)?);
    let (a, b) = concave_pair;
    let concave_break = 0.5 * (g(a)? + g(b)?) - g(0.5 * (a + b))?;
    Ok(Margin::strict(convex_break.min(concave_break)))
}

/// `√det(S_kᵀ V S_k) ≥ ν₁ ⋯ ν_k` for the first `2k` columns `S_k` of a
/// symplectic matrix.
pub fn var_expr_margin(v: &DenseMatrix, s: &DenseMatrix, k: usize) -> Result<Margin> {
    let sk = s.columns(0, 2 * k).into_owned();
    let reduced = symmetrize(&(sk.transpose() * v * &sk));
    let value = (0.5 * log_det_psd(&reduced)?).exp();
    let nus = symplectic_spectrum(v)?;
    let prod: f64 = nus[..k].iter().product();
    Ok(Margin::new(value - prod, 1.0 + value + prod))
}

/// `Z̄ ≥ V`, `Z̄` bona fide and `½ ln det Z̄ = g₊(V)`.
pub fn second_var_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let z = variational_certificate_gplus(v)?;
    let scale = scale_of(&[z.matrix()]);
    let above = min_eig_sym(&(z.matrix() - v.matrix()))?;
    let bona = symplectic_spectrum(z.matrix())?[0] - 1.0;
    let gp = g_plus(v)?;
    let eq = -(0.5 * log_det_psd(z.matrix())? - gp).abs();
    Ok(Margin::new(above.min(bona).min(eq), scale.max(1.0 + gp)))
}

// ----- steerability ---------------------------------------------------------

/// Convexity of `𝒢(A⟩B)` on a mixture and decrease under `V ↦ V + P`.
pub fn steer_props_1_margin(
    v: &CovarianceMatrix,
    w: &CovarianceMatrix,
    p: f64,
    bump: &DenseMatrix,
    tol: f64,
) -> Result<Margin> {
    let (a, b) = (sel("A"), sel("B"));
    let mix = CovarianceMatrix::new_symmetric(
        symmetrize(&(v.matrix() * p + w.matrix() * (1.0 - p))),
        v.partition().clone(),
    )?;
    let (gv, gw, gm) = (
        steerability(v, &a, &b)?,
        steerability(w, &a, &b)?,
        steerability(&mix, &a, &b)?,
    );
    let convex = Margin::new(p * gv + (1.0 - p) * gw - gm, 1.0 + gv + gw);
    let bumped = CovarianceMatrix::new_symmetric(
        symmetrize(&(v.matrix() + bump)),
        v.partition().clone(),
    )?;
    let mono = Margin::new(gv - steerability(&bumped, &a, &b)?, 1.0 + gv);
    Ok(convex.min(mono, tol))
}

/// Additivity of `𝒢` under direct sums; `v` has parties `A1,B1`, `w` has
/// `A2,B2`.
pub fn steer_props_2_margin(v: &CovarianceMatrix, w: &CovarianceMatrix) -> Result<Margin> {
    let sum = v.direct_sum(w)?;
    let joint = steerability(&sum, &sel("A1,A2"), &sel("B1,B2"))?;
    let parts = steerability(v, &sel("A1"), &sel("B1"))? + steerability(w, &sel("A2"), &sel("B2"))?;
    Ok(Margin::new(-(joint - parts).abs(), 1.0 + joint))
}

/// `𝒢(A'⟩B)` after a classical Gaussian map on `A` (output `Ap`) does not
/// exceed `𝒢(A⟩B)`.
pub fn steer_props_3_margin(v: &CovarianceMatrix, spec: &GaussianMapSpec) -> Result<Margin> {
    let before = steerability(v, &sel("A"), &sel("B"))?;
    let mapped = classical_gaussian_map(v, spec, &sel("A"))?;
    let after = steerability(&mapped, &sel("Ap"), &sel("B"))?;
    Ok(Margin::new(before - after, 1.0 + before))
}

/// `𝒢(A⟩B)` after a Gaussian measurement on `C` does not exceed
/// `𝒢(A⟩BC)`.
pub fn steer_props_4_margin(v: &CovarianceMatrix, gamma_c: &DenseMatrix) -> Result<Margin> {
    let before = steerability(v, &sel("A"), &sel("B,C"))?;
    let measured = measurement_update(v, gamma_c, &sel("C"))?;
    let after = steerability(&measured, &sel("A"), &sel("B"))?;
    Ok(Margin::new(before - after, 1.0 + before))
}

/// `𝒢(A⟩C) ≤ g₊(V_BC / V_B)`.
pub fn steer_props_5_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let steer = steerability(v, &sel("A"), &sel("C"))?;
    let bound = g_plus_matrix(&cond_block(v, "C", "B")?)?;
    Ok(Margin::new(bound - steer, 1.0 + bound))
}

/// `𝒢(A⟩B1 B2) ≥ 𝒢(A⟩B1) + 𝒢(A⟩B2)`.
pub fn mon_steer_1_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let joint = steerability(v, &sel("A"), &sel("B1,B2"))?;
    let b1 = steerability(v, &sel("A"), &sel("B1"))?;
    let b2 = steerability(v, &sel("A"), &sel("B2"))?;
    Ok(Margin::new(joint - b1 - b2, 1.0 + joint + b1 + b2))
}

/// `𝒢(B1 B2⟩A) ≥ 𝒢(B1⟩A) + 𝒢(B2⟩A)`.
pub fn mon_steer_2_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let joint = steerability(v, &sel("B1,B2"), &sel("A"))?;
    let b1 = steerability(v, &sel("B1"), &sel("A"))?;
    let b2 = steerability(v, &sel("B2"), &sel("A"))?;
    Ok(Margin::new(joint - b1 - b2, 1.0 + joint + b1 + b2))
}

// ----- Rényi-2 hierarchy ----------------------------------------------------

/// `½ ℐ₂(A:B) ≥ e2_upper ≥ max(𝒢(A⟩B), 𝒢(B⟩A))`.
pub fn hierarchy_margin(v: &CovarianceMatrix, tol: f64) -> Result<Margin> {
    let (a, b) = (sel("A"), sel("B"));
    let half_i = 0.5 * mutual_info_2(v, &a)?;
    let up = e2_upper(v, &a)?.bound;
    let steer = steerability(v, &a, &b)?.max(steerability(v, &b, &a)?);
    let scale = 1.0 + half_i;
    Ok(Margin::new(half_i - up, scale).min(Margin::new(up - steer, scale), tol))
}

/// `½ ln det V_A ≥ e2_upper(A:B) + e2_upper(A:C)` for pure `V_ABC`.
pub fn e2_monogamy_pure_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let a = sel("A");
    let whole = 0.5 * logdet(v, "A")?;
    let ab = e2_upper(&partial_trace(v, &sel("A,B"))?, &a)?.bound;
    let ac = e2_upper(&partial_trace(v, &sel("A,C"))?, &a)?.bound;
    Ok(Margin::new(whole - ab - ac, 1.0 + whole.abs()))
}

// ----- measurement lemmas ---------------------------------------------------

/// `ln det Z_BC − ln det ((Z + γ_C)/(Z_C + γ_C)) ≥ 0` for pure `γ_C`.
pub fn det_measurement_margin(z: &CovarianceMatrix, gamma_c: &DenseMatrix) -> Result<Margin> {
    let before = log_det_psd(z.matrix())?;
    let after = log_det_psd(measurement_update(z, gamma_c, &sel("C"))?.matrix())?;
    Ok(Margin::new(before - after, 1.0 + before.abs()))
}

/// `‖A‖₂ ‖B‖₂ − ‖X‖₂² ≥ 0` for a PSD block matrix `[[A, X], [Xᵀ, B]]`.
pub fn hs_block_margin(m: &DenseMatrix, split: usize) -> Result<Margin> {
    let d = m.nrows();
    let a = m.view((0, 0), (split, split)).norm();
    let b = m.view((split, split), (d - split, d - split)).norm();
    let x = m.view((0, split), (split, d - split)).norm();
    Ok(Margin::new(a * b - x * x, 1.0 + a * b))
}

/// Purity does not decrease under a pure Gaussian measurement on `C`.
pub fn purity_measurement_margin(v: &CovarianceMatrix, gamma_c: &DenseMatrix) -> Result<Margin> {
    let before = purity(v)?;
    let after = purity(&measurement_update(v, gamma_c, &sel("C"))?)?;
    Ok(Margin::new(after - before, 1.0))
}

// ----- f_α, purification, Williamson ----------------------------------------

pub const FALPHA_GRID: [f64; 5] = [1.0, 1.5, 2.0, 2.5, 3.0];

/// Second derivative of `f_α` by central differences.
pub fn f_alpha_fd2(x: f64, alpha: f64, h: f64) -> Result<f64> {
    Ok((f_alpha(x + h, alpha)? - 2.0 * f_alpha(x, alpha)? + f_alpha(x - h, alpha)?) / (h * h))
}

/// At `x`: `f_α″ ≥ 0` for `α ∈ {2, 2.5, 3}`, `f₁″ < 0`, and the fixed witness `f_{1.5}″(1) < 0`.
pub fn falpha_convexity_margin(x: f64, tol: f64) -> Result<Margin> {
    let mut m = Margin::strict(-f_alpha_dd(1.0, 1.5)?);
    for &alpha in &FALPHA_GRID {
        let next = if alpha >= 2.0 {
            Margin::new(f_alpha_dd(x, alpha)?, 1.0)
        } else if alpha == 1.0 {
            Margin::strict(-f_one_dd(x)?)
        } else {
            continue;
        };
        m = m.min(next, tol);
    }
    Ok(m)
}

/// Purifies `V_AB` and checks purity, the marginal, and the pure-state
/// identity `V_AB / V_B = Ω_Aᵀ (V_AC / V_C)⁻¹ Ω_A` with `C` the purifier.
pub fn purification_margin(v: &CovarianceMatrix) -> Result<Margin> {
    let pur = purify(v)?;
    let scale = scale_of(&[v.matrix()]).powi(2);
    let pure: f64 = if is_pure_cm(pur.matrix())? { 0.0 } else { -1.0 };
    let marginal = max_abs(&(partial_trace(&pur, &sel("A,B"))?.matrix() - v.matrix()));
    let lhs = cond_block(&pur, "A", "B")?;
    let ac = cond_block(&pur, "A", PURIFIER_LABEL)?;
    let oa = omega(ac.nrows() / 2);
    let rhs = oa.transpose() * inverse_pd(&ac)? * &oa;
    let ident = max_abs(&(lhs - rhs));
    Ok(Margin::new(pure.min(-marginal).min(-ident), scale))
}

/// Williamson residuals, normalised so the tolerance applies directly.
pub fn williamson_margin(v: &DenseMatrix) -> Result<Margin> {
    let w = williamson(v)?;
    let o = omega(w.nus.len());
    let symp = max_abs(&(&w.s * &o * w.s.transpose() - &o)) / (1.0 + max_abs(&w.s).powi(2));
    let recon = max_abs(&(w.reconstruct() - v)) / (1.0 + max_abs(v));
    let nus = symplectic_spectrum(v)?;
    let spec = w
        .nus
        .iter()
        .zip(&nus)
        .map(|(a, b)| (a - b).abs() / (1.0 + b))
        .fold(0.0, f64::max);
    Ok(Margin::new(-symp.max(recon).max(spec), 1.0))
}

// ----- trial drivers --------------------------------------------------------

pub(crate) fn random_map_spec(
    input_modes: usize,
    output_label: &str,
    cfg: &CheckConfig,
    rng: &mut SeededRng,
) -> Result<GaussianMapSpec> {
    let out_modes = rng.int(1, cfg.max_modes_per_party.max(1));
    let p = ModePartition::new([("IN", input_modes), (output_label, out_modes)])?;
    let g = random_pd_cm(&p, 0.3, cfg.nu_max.max(1.0), cfg.strength, rng);
    GaussianMapSpec::from_joint(
        g.matrix(),
        2 * input_modes,
        ModePartition::single(output_label, out_modes)?,
    )
}

pub(crate) fn trial_ssa(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    ssa_logdet_margin(&pd_ensemble(&["A", "B", "C"], cfg, rng))
}

pub(crate) fn trial_logdet_ineq(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    logdet_ineq_margin(&quantum_ensemble(&["A", "B", "C"], cfg, rng))
}

pub(crate) fn trial_thm1(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    thm1_margin(&pd_ensemble(&["A", "B", "C"], cfg, rng))
}

pub(crate) fn trial_thm2(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let v = pd_ensemble(&["A", "B"], cfg, rng);
    let spec = random_map_spec(v.partition().modes_of("B")?, "Bp", cfg, rng)?;
    thm2_margin(&v, &spec)
}

pub(crate) fn trial_thm3(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    thm3_margin(&quantum_ensemble(&["A", "B", "C"], cfg, rng))
}

pub(crate) fn trial_gminus_superadd(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    gminus_superadd_margin(&pd_ensemble(&["A", "B"], cfg, rng))
}

pub(crate) fn trial_gminus_convex(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let v = pd_ensemble(&["A", "B"], cfg, rng);
    let w = random_pd_cm(v.partition(), 0.2, cfg.nu_max.max(1.0), cfg.strength, rng);
    let p = rng.uniform(0.0, 1.0);
    let bump = random_psd(v.dim(), 0.5, rng);
    gminus_convex_margin(v.matrix(), w.matrix(), p, &bump, cfg.tol)
}

pub(crate) fn trial_gplus_nonconvex(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let n = rng.int(1, cfg.max_modes_per_party.max(1));
    let convex_pair = (rng.uniform(1.0, 3.0), rng.uniform(1.0, 3.0));
    let concave_pair = (rng.uniform(0.1, 0.5), rng.uniform(1.5, 2.5));
    gplus_nonconvex_margin(n, convex_pair, concave_pair)
}

pub(crate) fn trial_var_expr(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let v = pd_ensemble(&["A", "B"], cfg, rng);
    let n = v.n_modes();
    let s = random_symplectic(n, cfg.strength, rng);
    let k = rng.int(1, n);
    var_expr_margin(v.matrix(), &s, k)
}

pub(crate) fn trial_second_var(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    second_var_margin(&pd_ensemble(&["A", "B"], cfg, rng))
}

pub(crate) fn trial_steer_1(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let v = quantum_ensemble(&["A", "B"], cfg, rng);
    let w = random_quantum_cm(v.partition(), cfg.nu_max, cfg.strength, rng);
    let p = rng.uniform(0.0, 1.0);
    let bump = random_psd(v.dim(), 0.5, rng);
    steer_props_1_margin(&v, &w, p, &bump, cfg.tol)
}

pub(crate) fn trial_steer_2(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let v = quantum_ensemble(&["A1", "B1"], cfg, rng);
    let w = quantum_ensemble(&["A2", "B2"], cfg, rng);
    steer_props_2_margin(&v, &w)
}

pub(crate) fn trial_steer_3(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let v = quantum_ensemble(&["A", "B"], cfg, rng);
    let spec = random_map_spec(v.partition().modes_of("A")?, "Ap", cfg, rng)?;
    steer_props_3_margin(&v, &spec)
}

pub(crate) fn trial_steer_4(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let v = quantum_ensemble(&["A", "B", "C"], cfg, rng);
    let nc = v.partition().modes_of("C")?;
    let gamma = random_quantum_cm(
        &ModePartition::single("C", nc)?,
        cfg.nu_max,
        cfg.strength,
        rng,
    );
    steer_props_4_margin(&v, gamma.matrix())
}

pub(crate) fn trial_steer_5(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    steer_props_5_margin(&quantum_ensemble(&["A", "B", "C"], cfg, rng))
}

pub(crate) fn trial_mon_steer_1(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    mon_steer_1_margin(&quantum_ensemble(&["A", "B1", "B2"], cfg, rng))
}

pub(crate) fn trial_mon_steer_2_single(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let mut p = random_partition(&["A", "B1", "B2"], cfg, rng);
    p = ModePartition::new(
        p.parties()
            .iter()
            .map(|q| (q.label.clone(), if q.label == "A" { 1 } else { q.modes })),
    )?;
    mon_steer_2_margin(&random_quantum_cm(&p, cfg.nu_max, cfg.strength, rng))
}

pub(crate) fn trial_mon_steer_2_pure(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    mon_steer_2_margin(&pure_ensemble(&["A", "B1", "B2"], cfg, rng))
}

pub(crate) fn trial_mon_steer_2_general(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let p = ModePartition::new([("A", 2), ("B1", 1), ("B2", 1)])?;
    mon_steer_2_margin(&random_quantum_cm(&p, cfg.nu_max, cfg.strength, rng))
}

pub(crate) fn trial_hierarchy(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    hierarchy_margin(&quantum_ensemble(&["A", "B"], cfg, rng), cfg.tol)
}

pub(crate) fn trial_e2_monogamy(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    e2_monogamy_pure_margin(&pure_ensemble(&["A", "B", "C"], cfg, rng))
}

pub(crate) fn trial_det_measurement(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let z = quantum_ensemble(&["B", "C"], cfg, rng);
    let gamma = random_pure_gamma(z.partition().modes_of("C")?, cfg, rng);
    det_measurement_margin(&z, &gamma)
}

pub(crate) fn trial_hs_block(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let d = 2 * rng.int(1, 4);
    let split = rng.int(1, d - 1);
    hs_block_margin(&random_psd(d, cfg.strength, rng), split)
}

pub(crate) fn trial_falpha(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let x = 10.0 - rng.uniform(0.0, 10.0);
    falpha_convexity_margin(x.max(1e-3), cfg.tol)
}

pub(crate) fn trial_purification(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    purification_margin(&quantum_ensemble(&["A", "B"], cfg, rng))
}

pub(crate) fn trial_williamson(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    williamson_margin(pd_ensemble(&["A", "B"], cfg, rng).matrix())
}

pub(crate) fn trial_purity_measurement(cfg: &CheckConfig, rng: &mut SeededRng) -> Result<Margin> {
    let v = quantum_ensemble(&["B", "C"], cfg, rng);
    let gamma = random_pure_gamma(v.partition().modes_of("C")?, cfg, rng);
    purity_measurement_margin(&v, &gamma)
}
