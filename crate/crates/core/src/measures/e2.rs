//! Heuristic local search for the Gaussian Rényi-2 entanglement.
//!
//! The infimum of `½ ln det γ_A` over pure CMs `γ ≤ V` is a nonconvex
//! problem. [`e2_estimate`] explores pure CMs `γ = S Sᵀ` by left-multiplying
//! `S` with `exp(Ω H)` along random symmetric directions `H`, and returns the
//! best feasible value found. The result is an upper estimate of the
//! infimum, never a certified value.

use crate::cm::{CovarianceMatrix, PartySelector};
use crate::error::{CmError, Result};
use crate::linalg::{log_det_psd, max_abs, principal, sym_eig, DenseMatrix, IndexSet};
use crate::rng::SeededRng;
use crate::symplectic::{omega, random_symmetric, williamson};

use super::e2_upper;

/// Settings for [`e2_estimate`].
#[derive(Debug, Clone)]
pub struct E2SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub penalty_weight: f64,
    pub step_decay: f64,
    pub initial_step: f64,
    pub rng: SeededRng,
}

impl E2SearchConfig {
    pub fn new(seed: u64) -> Self {
        E2SearchConfig {
            restarts: 4,
            max_iters: 400,
            penalty_weight: 1e4,
            step_decay: 0.5,
            initial_step: 0.5,
            rng: SeededRng::new(seed),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.restarts >= 1
            && self.max_iters >= 1
            && self.penalty_weight > 0.0
            && self.step_decay > 0.0
            && self.step_decay < 1.0
            && self.initial_step > 0.0;
        if ok {
            Ok(())
        } else {
            Err(CmError::InvalidConfig(format!(
                "e2 search needs restarts, max_iters, penalty_weight, initial_step > 0 and \
                 step_decay in (0, 1); got {self:?}"
            )))
        }
    }
}

impl Default for E2SearchConfig {
    fn default() -> Self {
        Self::new(0)
    }
}

struct Problem<'a> {
    v: &'a DenseMatrix,
    cut: IndexSet,
    penalty: f64,
    feas_tol: f64,
}

#[derive(Clone, Copy)]
struct Eval {
    objective: f64,
    violation: f64,
}

impl Eval {
    fn feasible(&self) -> bool {
        self.violation == 0.0
    }
}

impl Problem<'_> {
    fn eval(&self, s: &DenseMatrix) -> Option<Eval> {
        let gamma = s * s.transpose();
        let objective = 0.5 * log_det_psd(&principal(&gamma, &self.cut)).ok()?;
        let eig = sym_eig(&(self.v - &gamma)).ok()?;
        let violation: f64 = eig
            .values
            .iter()
            .filter(|&&l| l < -self.feas_tol)
            .map(|l| l * l)
            .sum();
        Some(Eval {
            objective,
            violation,
        })
    }

    fn merit(&self, e: &Eval) -> f64 {
        e.objective + self.penalty * e.violation
    }

    /// Whether `cand` replaces `cur`: from a feasible point only feasible
    /// improvements are taken, otherwise the penalized merit decides.
    fn accepts(&self, cur: &Eval, cand: &Eval) -> bool {
        if cur.feasible() {
            cand.feasible() && cand.objective < cur.objective
        } else {
            self.merit(cand) < self.merit(cur)
        }
    }
}

fn unit_direction(dim: usize, rng: &mut SeededRng) -> DenseMatrix {
    let h = random_symmetric(dim, 1.0, rng);
    let n = h.norm();
    if n > 0.0 {
        h / n
    } else {
        h
    }
}

/// Runs one descent from `s0`; returns the best feasible objective seen.
fn descend(
    prob: &Problem<'_>,
    s0: DenseMatrix,
    cfg: &E2SearchConfig,
    rng: &mut SeededRng,
) -> Option<f64> {
    let dim = s0.nrows();
    let om = omega(dim / 2);
    let mut s = s0;
    let mut cur = prob.eval(&s)?;
    let mut best = cur.feasible().then_some(cur.objective);
    let mut step = cfg.initial_step;
    for _ in 0..cfg.max_iters {
        if step < 1e-9 {
            break;
        }
        let dir = unit_direction(dim, rng);
        let mut moved = false;
        for sign in [1.0, -1.0] {
            let g = (&om * &dir * (sign * step)).exp();
            let cand_s = &g * &s;
            let Some(cand) = prob.eval(&cand_s) else {
                continue;
            };
            if prob.accepts(&cur, &cand) {
                s = cand_s;
                cur = cand;
                moved = true;
                if cur.feasible() {
                    best = Some(best.map_or(cur.objective, |b: f64| b.min(cur.objective)));
                }
                break;
            }
        }
        if !moved {
            step *= cfg.step_decay;
        }
    }
    best
}

/// Heuristic upper estimate of the Gaussian Rényi-2 entanglement across
/// `cut | rest`.
///
/// Restarts begin at the geometric-mean witness of [`e2_upper`], at the
/// symplectic part `S Sᵀ` of the Williamson decomposition of `V`, and at
/// random perturbations of the witness. The returned value never exceeds
/// the [`e2_upper`] bound.
pub fn e2_estimate(v: &CovarianceMatrix, cut: &PartySelector, cfg: &E2SearchConfig) -> Result<f64> {
    cfg.validate()?;
    let upper = e2_upper(v, cut)?;
    let cut_idx = v.partition().indices(cut)?;
    let vm = v.matrix();
    let prob = Problem {
        v: vm,
        cut: cut_idx,
        penalty: cfg.penalty_weight,
        feas_tol: 1e-9 * (1.0 + max_abs(vm)),
    };
    let s_witness = williamson(upper.witness.matrix())?.s;
    let s_v = williamson(vm)?.s;
    let dim = vm.nrows();
    let om = omega(dim / 2);

    let mut rng = cfg.rng.clone();
    let mut best = upper.bound;
    for k in 0..cfg.restarts {
        let start = match k {
            0 => s_witness.clone(),
            1 => s_v.clone(),
            _ => {
                let h = random_symmetric(dim, 0.3, &mut rng);
                (&om * h).exp() * &s_witness
            }
        };
        let mut local = rng.fork(rng.stream().wrapping_add(1 + k as u64));
        if let Some(b) = descend(&prob, start, cfg, &mut local) {
            best = best.min(b);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::ModePartition;
    use crate::measures::steerability;
    use crate::symplectic::random_quantum_cm;

    fn sel(s: &str) -> PartySelector {
        PartySelector::parse(s).unwrap()
    }

    #[test]
    fn pure_state_value() {
        let p = ModePartition::parse("A:1,B:1").unwrap();
        let v = random_quantum_cm(&p, 1.0, 0.7, &mut SeededRng::new(5));
        let est = e2_estimate(&v, &sel("A"), &E2SearchConfig::new(1)).unwrap();
        let half = 0.5 * log_det_psd(&v.block(&sel("A")).unwrap()).unwrap();
        assert!((est - half).abs() < 1e-6);
    }

    #[test]
    fn tmsv_value() {
        let c = 1.7_f64;
        let s = (c * c - 1.0).sqrt();
        let m = DenseMatrix::from_row_slice(
            4,
            4,
            &[c, 0.0, s, 0.0, 0.0, c, 0.0, -s, s, 0.0, c, 0.0, 0.0, -s, 0.0, c],
        );
        let v = CovarianceMatrix::new(m, ModePartition::parse("A:1,B:1").unwrap()).unwrap();
        let est = e2_estimate(&v, &sel("A"), &E2SearchConfig::new(2)).unwrap();
        assert!((est - c.ln()).abs() < 1e-4);
    }

    #[test]
    fn mixed_state_bracket_and_determinism() {
        let p = ModePartition::parse("A:1,B:1").unwrap();
        let v = random_quantum_cm(&p, 2.0, 0.8, &mut SeededRng::new(11));
        let cfg = E2SearchConfig::new(11);
        let est = e2_estimate(&v, &sel("A"), &cfg).unwrap();
        assert_eq!(est.to_bits(), e2_estimate(&v, &sel("A"), &cfg).unwrap().to_bits());
        let up = e2_upper(&v, &sel("A")).unwrap().bound;
        assert!(est <= up + 1e-6);
        let lo = steerability(&v, &sel("A"), &sel("B"))
            .unwrap()
            .max(steerability(&v, &sel("B"), &sel("A")).unwrap());
        assert!(est >= lo - 1e-6);
    }

    #[test]
    fn rejects_bad_config() {
        let v = CovarianceMatrix::identity(ModePartition::parse("A:1,B:1").unwrap());
        let mut cfg = E2SearchConfig::new(0);
        cfg.step_decay = 1.5;
        assert!(matches!(
            e2_estimate(&v, &sel("A"), &cfg),
            Err(CmError::InvalidConfig(_))
        ));
    }
}
