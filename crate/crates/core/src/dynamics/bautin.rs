//! Two limit cycles from a degenerate Hopf point.
//!
//! Starting from a weak focus with `L1 = 0`, `L2 < 0`, stage one moves `a2`
//! and `b3` down together (the trace stays zero, `L1` turns positive) and
//! looks for a single stable cycle. Stage two raises `a2` again, making the
//! origin a stable focus and opening a small unstable cycle inside the
//! stable one. Perturbation sizes are found by search.

use serde::Serialize;

use super::integrator::IntegratorOptions;
use super::section::{find_limit_cycles, CycleStability, LimitCycleReport, Section};
use crate::classify::{focal_values, jacobian};
use crate::error::{Error, Result};
use crate::scheme::ParameterScheme;
use crate::Tolerance;

/// `a = (0, -1, -1, 4)`, `b = (0, -2, -1, 0)`: trace 0, determinant 9,
/// `L1 = 0`, `L2 = -10 pi / 288`.
pub fn bautin_base_point() -> ParameterScheme {
    ParameterScheme {
        a: [0.0, -1.0, -1.0, 4.0],
        b: [0.0, -2.0, -1.0, 0.0],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BautinOptions {
    /// Stage-one perturbations, tried in order.
    pub eps1: Vec<f64>,
    /// Stage-two perturbations as multiples of `eps1^2`, tried in order.
    pub eps2_factors: Vec<f64>,
    pub section: Section,
    pub n_seeds: usize,
    pub integrator: IntegratorOptions,
}

impl Default for BautinOptions {
    fn default() -> Self {
        Self {
            eps1: vec![0.01, 0.02, 0.005, 0.05, 0.002],
            eps2_factors: vec![1.0, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02, 0.01],
            section: Section::positive_u_axis(),
            n_seeds: 24,
            integrator: IntegratorOptions {
                rel_tol: 1e-11,
                abs_tol: 1e-13,
                max_time: 200.0,
                ..IntegratorOptions::oracle()
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BautinStage {
    pub eps: f64,
    pub scheme: ParameterScheme,
    pub trace: f64,
    pub det: f64,
    pub l1: f64,
    pub cycles: LimitCycleReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BautinAttempt {
    pub stage: u8,
    pub eps: f64,
    pub cycles_found: usize,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BautinReport {
    pub base: ParameterScheme,
    pub base_l1: f64,
    pub base_l2: Option<f64>,
    pub eps1: f64,
    pub eps2: f64,
    pub stage1: BautinStage,
    pub stage2: BautinStage,
    pub attempts: Vec<BautinAttempt>,
}

/// Base point with `a2` and `b3` lowered by `eps1`.
pub fn stage1_scheme(eps1: f64) -> ParameterScheme {
    let mut s = bautin_base_point();
    s.a[1] -= eps1;
    s.b[2] -= eps1;
    s
}

/// Stage-one scheme with `a2` raised by `eps2`.
pub fn stage2_scheme(eps1: f64, eps2: f64) -> ParameterScheme {
    let mut s = stage1_scheme(eps1);
    s.a[1] += eps2;
    s
}

fn stage(
    eps: f64,
    s: ParameterScheme,
    cycles: LimitCycleReport,
    tol: &Tolerance,
) -> Result<BautinStage> {
    let j = jacobian(&s);
    let l1 = if j.trace() == 0.0 {
        focal_values(&s, tol)?.l1
    } else {
        f64::NAN
    };
    Ok(BautinStage {
        eps,
        scheme: s,
        trace: j.trace(),
        det: j.det(),
        l1,
        cycles,
    })
}

fn kinds(r: &LimitCycleReport) -> Vec<CycleStability> {
    r.cycles.iter().map(|c| c.stability).collect()
}

/// Runs the two-stage search.
pub fn bautin_search(opts: &BautinOptions, tol: &Tolerance) -> Result<BautinReport> {
    let base = bautin_base_point();
    let fv = focal_values(&base, tol)?;
    let mut attempts = Vec::new();
    for &e1 in &opts.eps1 {
        let s1 = stage1_scheme(e1);
        let f1 = focal_values(&s1, tol)?;
        if !(f1.l1 > 0.0) {
            attempts.push(BautinAttempt {
                stage: 1,
                eps: e1,
                cycles_found: 0,
                note: format!("L1 = {} not positive", f1.l1),
            });
            continue;
        }
        // weakly nonlinear estimate of the cycle radius, used to place seeds
        let l2 = f1.l2.value().unwrap_or(fv.l2.value().unwrap_or(-1.0));
        let r_est = (f1.l1 / l2.abs()).sqrt().max(1e-3);
        let range1 = [0.05 * r_est, (4.0 * r_est).min(3.0)];
        let rep1 = find_limit_cycles(&s1, opts.section, range1, opts.n_seeds, &opts.integrator)?;
        let k1 = kinds(&rep1);
        attempts.push(BautinAttempt {
            stage: 1,
            eps: e1,
            cycles_found: k1.len(),
            note: format!("range {range1:?}, stabilities {k1:?}"),
        });
        if k1 != [CycleStability::Stable] {
            continue;
        }
        let outer = rep1.cycles[0].coordinate;
        for &f in &opts.eps2_factors {
            let e2 = f * e1 * e1;
            let s2 = stage2_scheme(e1, e2);
            let range2 = [0.02 * outer, 1.5 * outer];
            let rep2 =
                find_limit_cycles(&s2, opts.section, range2, opts.n_seeds, &opts.integrator)?;
            let k2 = kinds(&rep2);
            attempts.push(BautinAttempt {
                stage: 2,
                eps: e2,
                cycles_found: k2.len(),
                note: format!("range {range2:?}, stabilities {k2:?}"),
            });
            if k2 == [CycleStability::Unstable, CycleStability::Stable] {
                return Ok(BautinReport {
                    base,
                    base_l1: fv.l1,
                    base_l2: fv.l2.value(),
                    eps1: e1,
                    eps2: e2,
                    stage1: stage(e1, s1, rep1, tol)?,
                    stage2: stage(e2, s2, rep2, tol)?,
                    attempts,
                });
            }
        }
    }
    let tried: Vec<String> = attempts
        .iter()
        .map(|a| format!("stage {} eps {}: {}", a.stage, a.eps, a.note))
        .collect();
    Err(Error::SearchExhausted(format!(
        "no perturbation produced two cycles; tried {}",
        tried.join("; ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_schemes_keep_trace() {
        let s = stage1_scheme(0.1);
        assert_eq!(s.a[1], -1.1);
        assert_eq!(s.b[2], -1.1);
        assert!(jacobian(&s).trace().abs() < 1e-15);
        let t = stage2_scheme(0.1, 0.01);
        assert!((jacobian(&t).trace() + 0.01).abs() < 1e-15);
    }

    #[test]
    fn stage1_l1_positive() {
        let tol = Tolerance::default();
        for e in [0.001, 0.01, 0.1] {
            let l1 = focal_values(&stage1_scheme(e), &tol).unwrap().l1;
            assert!(l1 > 0.0, "{e}: {l1}");
        }
    }
}
