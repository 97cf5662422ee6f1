//! From a raw S-system to the scaled system to exponential form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::ParameterScheme;
use crate::Tolerance;

pub type Mat2 = [[f64; 2]; 2];

/// Planar S-system
///
/// ```text
/// x1' = alpha1 x1^g11 x2^g12 - beta1 x1^h11 x2^h12
/// x2' = alpha2 x1^g21 x2^g22 - beta2 x1^h21 x2^h22
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SSystemRecord", into = "SSystemRecord")]
pub struct SSystem {
    pub alpha: [f64; 2],
    pub beta: [f64; 2],
    pub g: Mat2,
    pub h: Mat2,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SSystemRecord {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub g11: f64,
    pub g12: f64,
    pub g21: f64,
    pub g22: f64,
    pub h11: f64,
    pub h12: f64,
    pub h21: f64,
    pub h22: f64,
}

impl TryFrom<SSystemRecord> for SSystem {
    type Error = Error;

    fn try_from(r: SSystemRecord) -> Result<Self> {
        SSystem::new(
            [r.alpha1, r.alpha2],
            [r.beta1, r.beta2],
            [[r.g11, r.g12], [r.g21, r.g22]],
            [[r.h11, r.h12], [r.h21, r.h22]],
        )
    }
}

impl From<SSystem> for SSystemRecord {
    fn from(s: SSystem) -> Self {
        SSystemRecord {
            alpha1: s.alpha[0],
            alpha2: s.alpha[1],
            beta1: s.beta[0],
            beta2: s.beta[1],
            g11: s.g[0][0],
            g12: s.g[0][1],
            g21: s.g[1][0],
            g22: s.g[1][1],
            h11: s.h[0][0],
            h12: s.h[0][1],
            h21: s.h[1][0],
            h22: s.h[1][1],
        }
    }
}

fn all_finite(m: &Mat2) -> bool {
    m.iter().flatten().all(|x| x.is_finite())
}

fn positive(xs: &[f64]) -> bool {
    xs.iter().all(|&x| x > 0.0 && x.is_finite())
}

/// `G - H`
pub fn exponent_difference(g: &Mat2, h: &Mat2) -> Mat2 {
    [
        [g[0][0] - h[0][0], g[0][1] - h[0][1]],
        [g[1][0] - h[1][0], g[1][1] - h[1][1]],
    ]
}

pub fn det2(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn max_abs(m: &Mat2) -> f64 {
    m.iter().flatten().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// `det(G - H)` is treated as zero below `tol.det * max(1, |G - H|_max)`.
pub fn is_singular(diff: &Mat2, tol: &Tolerance) -> bool {
    det2(diff).abs() < tol.det * max_abs(diff).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EquilibriumResult {
    Unique {
        x1: f64,
        x2: f64,
    },
    /// `det(G - H) = 0`: no positive equilibrium or a curve of them.
    DegenerateNoneOrInfinite,
}

impl SSystem {
    pub fn new(alpha: [f64; 2], beta: [f64; 2], g: Mat2, h: Mat2) -> Result<Self> {
        if !positive(&alpha) || !positive(&beta) {
            return Err(Error::Domain(
                "rate coefficients alpha, beta must be positive".into(),
            ));
        }
        if !all_finite(&g) || !all_finite(&h) {
            return Err(Error::Domain("kinetic orders must be finite".into()));
        }
        Ok(Self { alpha, beta, g, h })
    }

    pub fn exponent_difference(&self) -> Mat2 {
        exponent_difference(&self.g, &self.h)
    }

    /// Positive equilibrium from the log-linear system
    /// `(G - H) log x = (log(beta1/alpha1), log(beta2/alpha2))`, solved by
    /// Cramer's rule.
    pub fn solve_equilibrium(&self, tol: &Tolerance) -> EquilibriumResult {
        let m = self.exponent_difference();
        if is_singular(&m, tol) {
            return EquilibriumResult::DegenerateNoneOrInfinite;
        }
        let det = det2(&m);
        let r1 = (self.beta[0] / self.alpha[0]).ln();
        let r2 = (self.beta[1] / self.alpha[1]).ln();
        let y1 = (r1 * m[1][1] - m[0][1] * r2) / det;
        let y2 = (m[0][0] * r2 - r1 * m[1][0]) / det;
        EquilibriumResult::Unique {
            x1: y1.exp(),
            x2: y2.exp(),
        }
    }

    /// Right-hand side in the original coordinates.
    pub fn field(&self, x: [f64; 2]) -> [f64; 2] {
        let (production, degradation) = self.monomials(x);
        [
            production[0] - degradation[0],
            production[1] - degradation[1],
        ]
    }

    fn monomials(&self, x: [f64; 2]) -> ([f64; 2], [f64; 2]) {
        let mono = |c: f64, e: [f64; 2]| c * x[0].powf(e[0]) * x[1].powf(e[1]);
        (
            [
                mono(self.alpha[0], self.g[0]),
                mono(self.alpha[1], self.g[1]),
            ],
            [mono(self.beta[0], self.h[0]), mono(self.beta[1], self.h[1])],
        )
    }

    /// Scales the system at the positive equilibrium `eq`, moving it to (1, 1).
    pub fn scale(&self, eq: [f64; 2]) -> Result<ScaledSystem> {
        if !positive(&eq) {
            return Err(Error::Domain(
                "equilibrium must be strictly positive".into(),
            ));
        }
        let (production, degradation) = self.monomials(eq);
        for i in 0..2 {
            let size = production[i].abs().max(degradation[i].abs());
            if (production[i] - degradation[i]).abs() > 1e-9 * size {
                return Err(Error::Consistency(format!(
                    "({}, {}) is not an equilibrium: residual {} in equation {}",
                    eq[0],
                    eq[1],
                    production[i] - degradation[i],
                    i + 1
                )));
            }
        }
        let [x1, x2] = eq;
        let gamma1 = self.alpha[0] * x1.powf(self.g[0][0] - 1.0) * x2.powf(self.g[0][1]);
        let gamma2 = self.alpha[1] * x1.powf(self.g[1][0]) * x2.powf(self.g[1][1] - 1.0);
        ScaledSystem::new([gamma1, gamma2], self.g, self.h)
    }
}

/// S-system scaled so that (1, 1) is an equilibrium:
/// `x_i' = gamma_i (x^{g_i} - x^{h_i})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaledSystem {
    pub gamma: [f64; 2],
    pub g: Mat2,
    pub h: Mat2,
}

impl ScaledSystem {
    pub fn new(gamma: [f64; 2], g: Mat2, h: Mat2) -> Result<Self> {
        if !positive(&gamma) {
            return Err(Error::Domain("gamma1, gamma2 must be positive".into()));
        }
        if !all_finite(&g) || !all_finite(&h) {
            return Err(Error::Domain("kinetic orders must be finite".into()));
        }
        Ok(Self { gamma, g, h })
    }

    pub fn field(&self, x: [f64; 2]) -> [f64; 2] {
        let mono = |e: [f64; 2]| x[0].powf(e[0]) * x[1].powf(e[1]);
        [
            self.gamma[0] * (mono(self.g[0]) - mono(self.h[0])),
            self.gamma[1] * (mono(self.g[1]) - mono(self.h[1])),
        ]
    }

    /// Exponential form under `x1 = exp(gamma1 u)`, `x2 = exp(gamma2 v)`.
    pub fn to_exponential(&self) -> ParameterScheme {
        let [g1, g2] = self.gamma;
        let (g, h) = (&self.g, &self.h);
        ParameterScheme {
            a: [
                g1 * (g[0][0] - 1.0),
                g1 * (h[0][0] - 1.0),
                g1 * g[1][0],
                g1 * h[1][0],
            ],
            b: [
                g2 * g[0][1],
                g2 * h[0][1],
                g2 * (g[1][1] - 1.0),
                g2 * (h[1][1] - 1.0),
            ],
        }
    }
}

impl ParameterScheme {
    /// `(exp(a1 u + b1 v) - exp(a2 u + b2 v), exp(a3 u + b3 v) - exp(a4 u + b4 v))`
    #[inline]
    pub fn field(&self, p: [f64; 2]) -> [f64; 2] {
        let [u, v] = p;
        let e = |i: usize| self.exponent(i, u, v).exp();
        [e(0) - e(1), e(2) - e(3)]
    }

    /// Largest of the four exponents `a_i u + b_i v`.
    pub fn max_exponent(&self, p: [f64; 2]) -> f64 {
        (0..4)
            .map(|i| self.exponent(i, p[0], p[1]))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exponential form of the S-system with `gamma1 = gamma2 = 1`.
    pub fn from_exponents_unit_gamma(g: &Mat2, h: &Mat2) -> ParameterScheme {
        ScaledSystem {
            gamma: [1.0, 1.0],
            g: *g,
            h: *h,
        }
        .to_exponential()
    }

    /// Kinetic orders `(G, H)` whose exponential form with unit `gamma` is
    /// this scheme.
    pub fn unit_gamma_exponents(&self) -> (Mat2, Mat2) {
        let [a1, a2, a3, a4] = self.a;
        let [b1, b2, b3, b4] = self.b;
        (
            [[a1 + 1.0, b1], [a3, b3 + 1.0]],
            [[a2 + 1.0, b2], [a4, b4 + 1.0]],
        )
    }
}

/// Full chain: equilibrium, scaling, exponential form.
pub fn ssystem_to_scheme(
    sys: &SSystem,
    tol: &Tolerance,
) -> Result<(ScaledSystem, ParameterScheme)> {
    match sys.solve_equilibrium(tol) {
        EquilibriumResult::Unique { x1, x2 } => {
            let scaled = sys.scale([x1, x2])?;
            let scheme = scaled.to_exponential();
            Ok((scaled, scheme))
        }
        EquilibriumResult::DegenerateNoneOrInfinite => Err(Error::Degenerate(
            "det(G - H) = 0: no unique positive equilibrium".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    const ID: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    const ZERO: Mat2 = [[0.0, 0.0], [0.0, 0.0]];

    #[test]
    fn identity_log_system() {
        let sys = SSystem::new([1.0, 1.0], [E, E * E], ID, ZERO).unwrap();
        match sys.solve_equilibrium(&Tolerance::default()) {
            EquilibriumResult::Unique { x1, x2 } => {
                assert_relative_eq!(x1, E, max_relative = 1e-14);
                assert_relative_eq!(x2, E * E, max_relative = 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equal_rates_give_unit_equilibrium() {
        let g = [[0.5, -1.0], [2.0, 0.3]];
        let sys = SSystem::new([2.0, 3.0], [2.0, 3.0], g, ZERO).unwrap();
        assert_eq!(
            sys.solve_equilibrium(&Tolerance::default()),
            EquilibriumResult::Unique { x1: 1.0, x2: 1.0 }
        );
    }

    #[test]
    fn singular_difference_is_degenerate() {
        let g = [[1.0, 2.0], [2.0, 4.0]];
        let sys = SSystem::new([1.0, 2.0], [3.0, 4.0], g, ZERO).unwrap();
        assert_eq!(
            sys.solve_equilibrium(&Tolerance::default()),
            EquilibriumResult::DegenerateNoneOrInfinite
        );
    }

    #[test]
    fn scaling_at_unit_point_keeps_rates() {
        let g = [[0.5, -1.0], [2.0, 0.3]];
        let sys = SSystem::new([2.0, 3.0], [2.0, 3.0], g, ID).unwrap();
        let scaled = sys.scale([1.0, 1.0]).unwrap();
        assert_eq!(scaled.gamma, [2.0, 3.0]);
        assert_eq!(scaled.field([1.0, 1.0]), [0.0, 0.0]);
    }

    #[test]
    fn scaling_rejects_non_equilibrium() {
        let sys = SSystem::new([1.0, 1.0], [E, E * E], ID, ZERO).unwrap();
        assert!(matches!(sys.scale([1.0, 1.0]), Err(Error::Consistency(_))));
    }

    #[test]
    fn pipeline_residual() {
        let g = [[0.3, -0.8], [1.1, -0.4]];
        let h = [[-0.5, 0.2], [0.1, 0.9]];
        let sys = SSystem::new([1.7, 0.4], [0.9, 2.5], g, h).unwrap();
        let (scaled, scheme) = ssystem_to_scheme(&sys, &Tolerance::default()).unwrap();
        let f = scaled.field([1.0, 1.0]);
        assert!(f[0].abs() < 1e-10 && f[1].abs() < 1e-10);
        let z = scheme.field([0.0, 0.0]);
        assert_eq!(z, [0.0, 0.0]);
    }

    #[test]
    fn exponential_form_substitutions() {
        let s = ScaledSystem::new([1.0, 1.0], ID, ID)
            .unwrap()
            .to_exponential();
        assert_eq!(s, ParameterScheme::zero());
        let s = ScaledSystem::new([1.0, 1.0], [[2.0, 0.0], [0.0, 1.0]], ID)
            .unwrap()
            .to_exponential();
        assert_eq!(s.a, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(s.b, [0.0; 4]);
    }

    #[test]
    fn field_examples() {
        let s = ParameterScheme::new([0.0, 0.0, -1.0, 1.0], [1.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!(s.field([0.0, 0.0]), [0.0, 0.0]);
        for &(u, v) in &[(0.3, -1.2), (2.0, 0.5), (-0.7, 0.1)] {
            let f = s.field([u, v]);
            assert_relative_eq!(f[0], 2.0 * f64::sinh(v), max_relative = 1e-14);
            assert_relative_eq!(f[1], -2.0 * f64::sinh(u), max_relative = 1e-14);
        }
    }

    #[test]
    fn shifted_field_is_rescaled() {
        let s = ParameterScheme::new([0.4, -1.1, 0.7, 2.0], [1.3, -0.2, 0.5, -0.9]).unwrap();
        let (a, b) = (0.8, -1.7);
        let t = s.shift_equivalent(a, b);
        for &(u, v) in &[(0.3, -1.2), (1.0, 0.5), (-0.7, 0.9)] {
            let fs = s.field([u, v]);
            let ft = t.field([u, v]);
            let k = (-a * u - b * v).exp();
            assert_relative_eq!(ft[0], k * fs[0], max_relative = 1e-12);
            assert_relative_eq!(ft[1], k * fs[1], max_relative = 1e-12);
        }
    }

    #[test]
    fn unit_gamma_round_trip() {
        let s = ParameterScheme::new([0.4, -1.1, 0.7, 2.0], [1.3, -0.2, 0.5, -0.9]).unwrap();
        let (g, h) = s.unit_gamma_exponents();
        let t = ParameterScheme::from_exponents_unit_gamma(&g, &h);
        for i in 0..4 {
            assert_relative_eq!(t.a[i], s.a[i], epsilon = 1e-15);
            assert_relative_eq!(t.b[i], s.b[i], epsilon = 1e-15);
        }
    }
}
