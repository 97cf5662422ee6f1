//! Closed-form conserved quantities and auxiliary scalar functions.
//!
//! Every `exp(alpha z) / alpha` antiderivative is implemented through
//! [`phi`], `(exp(alpha z) - 1) / alpha`, which differs by the constant
//! `1 / alpha` and stays finite as `alpha -> 0` (limit `z`). Constants do not
//! affect conservation or the level-set geometry, and with this choice every
//! first integral except the reversible one vanishes at the origin.

use serde::Serialize;

use crate::classify::{center_cases, CenterCase};
use crate::error::{Error, Result};
use crate::scheme::ParameterScheme;
use crate::Tolerance;

/// `(exp(alpha z) - 1) / alpha`, equal to `z` at `alpha = 0`.
#[inline]
pub fn phi(alpha: f64, z: f64) -> f64 {
    if alpha == 0.0 {
        z
    } else {
        (alpha * z).exp_m1() / alpha
    }
}

/// Derivative of [`phi`] in `z`.
#[inline]
fn dphi(alpha: f64, z: f64) -> f64 {
    (alpha * z).exp()
}

/// Cases with a known first integral. `R12` is the intersection of the two
/// reversible families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IntegralCase {
    S,
    I1,
    I2,
    I3,
    I4,
    R12,
}

impl IntegralCase {
    pub const ALL: [IntegralCase; 6] = [
        IntegralCase::S,
        IntegralCase::I1,
        IntegralCase::I2,
        IntegralCase::I3,
        IntegralCase::I4,
        IntegralCase::R12,
    ];

    fn required(self) -> &'static [CenterCase] {
        match self {
            IntegralCase::S => &[CenterCase::S],
            IntegralCase::I1 => &[CenterCase::I1],
            IntegralCase::I2 => &[CenterCase::I2],
            IntegralCase::I3 => &[CenterCase::I3],
            IntegralCase::I4 => &[CenterCase::I4],
            IntegralCase::R12 => &[CenterCase::R1, CenterCase::R2],
        }
    }

    /// First-integral case for a center family, if one is known.
    pub fn for_center(case: CenterCase) -> Option<IntegralCase> {
        match case {
            CenterCase::S => Some(IntegralCase::S),
            CenterCase::I1 => Some(IntegralCase::I1),
            CenterCase::I2 => Some(IntegralCase::I2),
            CenterCase::I3 => Some(IntegralCase::I3),
            CenterCase::I4 => Some(IntegralCase::I4),
            CenterCase::R1 | CenterCase::R2 => None,
        }
    }

    /// The cases applicable to a scheme (all of its center families that
    /// carry an integral, plus `R12` when both reversible families hold).
    pub fn applicable(s: &ParameterScheme, tol: &Tolerance) -> Vec<IntegralCase> {
        let cases = center_cases(s, tol).unwrap_or_default();
        IntegralCase::ALL
            .into_iter()
            .filter(|ic| ic.required().iter().all(|c| cases.contains(c)))
            .collect()
    }
}

/// A first integral bound to a scheme, with the constants `p, q, r, s`
/// derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstIntegral {
    pub case: IntegralCase,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    /// Shift `(a, b)` of the integrating factor `exp(-a u - b v)`.
    pub shift: [f64; 2],
}

impl FirstIntegral {
    /// Binds `case` to `scheme`. The scheme must be a weak focus satisfying
    /// the case's defining equalities.
    pub fn new(scheme: &ParameterScheme, case: IntegralCase, tol: &Tolerance) -> Result<Self> {
        let cases = center_cases(scheme, tol)
            .map_err(|e| Error::OutOfScope(format!("first integral needs a weak focus: {e}")))?;
        if let Some(missing) = case.required().iter().find(|c| !cases.contains(c)) {
            return Err(Error::OutOfScope(format!(
                "scheme is not in case {missing}"
            )));
        }
        let [a1, a2, a3, a4] = scheme.a;
        let [b1, b2, b3, b4] = scheme.b;
        let (p, q, r, s, shift) = match case {
            IntegralCase::S => (a3 - a1, a4 - a1, b1 - b4, b2 - b4, [a1, b4]),
            IntegralCase::I1 => (a1 - a2, a4 - a2, b2 - b4, 0.0, [a2, b4]),
            IntegralCase::I2 => (a1 - a2, a3 - a2, b2 - b3, 0.0, [a2, b3]),
            IntegralCase::I3 => (a1 - a2, a3 - a1, b1 - b3, 0.0, [a1, b3]),
            IntegralCase::I4 => (a1 - a2, a4 - a1, b1 - b4, 0.0, [a1, b4]),
            IntegralCase::R12 => {
                let q = a4 - a1;
                if tol.is_zero(q, tol.scale_of(scheme), 1) {
                    return Err(Error::Degenerate("R1 and R2 with a4 = a1".into()));
                }
                (0.0, q, a3 - a1, 0.0, [a1, b4])
            }
        };
        Ok(Self {
            case,
            p,
            q,
            r,
            s,
            shift,
        })
    }

    /// Value at `(u, v)`.
    pub fn eval(&self, pt: [f64; 2]) -> f64 {
        let [u, v] = pt;
        let (p, q, r, s) = (self.p, self.q, self.r, self.s);
        match self.case {
            IntegralCase::S => (phi(p, u) - phi(q, u)) - (phi(r, v) - phi(s, v)),
            IntegralCase::I1 => -phi(p, u - v) + phi(q, u) - phi(r, v),
            IntegralCase::I2 => -phi(p, u + v) + phi(q, u) + phi(r, v),
            IntegralCase::I3 => -phi(p, v - u) - phi(q, u) + phi(r, v),
            IntegralCase::I4 => -phi(p, -u - v) - phi(q, u) - phi(r, v),
            IntegralCase::R12 => {
                (1.0 + (r * (u + v)).exp()) * ((q * u).exp() + (q * v).exp()).powf(-r / q)
            }
        }
    }

    /// Analytic gradient.
    pub fn gradient(&self, pt: [f64; 2]) -> [f64; 2] {
        let [u, v] = pt;
        let (p, q, r, s) = (self.p, self.q, self.r, self.s);
        match self.case {
            IntegralCase::S => [dphi(p, u) - dphi(q, u), -(dphi(r, v) - dphi(s, v))],
            IntegralCase::I1 => {
                let e = dphi(p, u - v);
                [-e + dphi(q, u), e - dphi(r, v)]
            }
            IntegralCase::I2 => {
                let e = dphi(p, u + v);
                [-e + dphi(q, u), -e + dphi(r, v)]
            }
            IntegralCase::I3 => {
                let e = dphi(p, v - u);
                [e - dphi(q, u), -e + dphi(r, v)]
            }
            IntegralCase::I4 => {
                let e = dphi(p, -u - v);
                [e - dphi(q, u), e - dphi(r, v)]
            }
            IntegralCase::R12 => {
                let (eu, ev) = ((q * u).exp(), (q * v).exp());
                let sum = eu + ev;
                let w = (r * (u + v)).exp();
                let base = sum.powf(-r / q);
                let dlog = |e: f64| -r * e / sum;
                [
                    r * w * base + (1.0 + w) * base * dlog(eu),
                    r * w * base + (1.0 + w) * base * dlog(ev),
                ]
            }
        }
    }

    /// Integrating factor `h` with `div(h f) = 0`.
    pub fn integrating_factor(&self, pt: [f64; 2]) -> f64 {
        let [u, v] = pt;
        let base = (-self.shift[0] * u - self.shift[1] * v).exp();
        match self.case {
            IntegralCase::R12 => {
                let (q, r) = (self.q, self.r);
                base * ((q * u).exp() + (q * v).exp()).powf(-(q + r) / q)
            }
            _ => base,
        }
    }
}

/// Convenience wrapper: first integral of `case` for `scheme` at `pt`.
pub fn first_integral(
    scheme: &ParameterScheme,
    case: IntegralCase,
    pt: [f64; 2],
    tol: &Tolerance,
) -> Result<f64> {
    Ok(FirstIntegral::new(scheme, case, tol)?.eval(pt))
}

/// Lyapunov function for the equal-exponent case `a1 = a2`:
/// `V = -[phi(a3-a1, u) - phi(a4-a1, u)] + [phi(b1-b4, v) - phi(b2-b4, v)]`,
/// with `V(0, 0) = 0`.
pub fn lyapunov_v(s: &ParameterScheme, pt: [f64; 2], tol: &Tolerance) -> Result<f64> {
    let [a1, a2, a3, a4] = s.a;
    let [b1, b2, _, b4] = s.b;
    if !tol.is_zero(a1 - a2, tol.scale_of(s), 1) {
        return Err(Error::OutOfScope(
            "Lyapunov function requires a1 = a2".into(),
        ));
    }
    let [u, v] = pt;
    Ok(-(phi(a3 - a1, u) - phi(a4 - a1, u)) + (phi(b1 - b4, v) - phi(b2 - b4, v)))
}

/// `div(h f) / h` for `h = exp(-a u - b v)`.
pub fn dulac_divergence(s: &ParameterScheme, a: f64, b: f64, pt: [f64; 2]) -> f64 {
    let [u, v] = pt;
    let e = |i: usize| s.exponent(i, u, v).exp();
    let [a1, a2, _, _] = s.a;
    let [_, _, b3, b4] = s.b;
    (a1 - a) * e(0) + (a - a2) * e(1) + (b3 - b) * e(2) + (b - b4) * e(3)
}

/// Point `u` on the orbit
/// `phi(b1-b4, v) - phi(b2-b4, v) = -exp((a4-a1) u) / (a4-a1)`
/// of the auxiliary system `u' = e^{a1 u + b1 v} - e^{a2 u + b2 v}`,
/// `v' = -e^{a4 u + b4 v}`, for `a1 = a2 > a4` and `v > 0`.
///
/// The right-hand side is strictly decreasing in `u` with range `(0, inf)`,
/// so the equation inverts in closed form.
pub fn separatrix_u_of_v(s: &ParameterScheme, v: f64, tol: &Tolerance) -> Result<f64> {
    let [a1, a2, _, a4] = s.a;
    let [b1, b2, _, b4] = s.b;
    let scale = tol.scale_of(s);
    if !tol.is_zero(a1 - a2, scale, 1) || !tol.lt(a4, a1, scale) {
        return Err(Error::OutOfScope("separatrix requires a1 = a2 > a4".into()));
    }
    if !(v > 0.0) {
        return Err(Error::Domain("separatrix is parametrized by v > 0".into()));
    }
    let k = a4 - a1;
    let lhs = phi(b1 - b4, v) - phi(b2 - b4, v);
    if !(lhs > 0.0) {
        return Err(Error::Domain(format!(
            "no point on the curve at v = {v} (left side {lhs} <= 0)"
        )));
    }
    Ok((-k * lhs).ln() / k)
}

/// Residual of the separatrix equation at `(u, v)`.
pub fn separatrix_residual(s: &ParameterScheme, pt: [f64; 2]) -> f64 {
    let [a1, _, _, a4] = s.a;
    let [b1, b2, _, b4] = s.b;
    let [u, v] = pt;
    let k = a4 - a1;
    phi(b1 - b4, v) - phi(b2 - b4, v) + (k * u).exp() / k
}
