//! Center problem: the seven center families, the first two focal values,
//! global centers, orientation and the first Lyapunov coefficient.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use super::{jacobian, normalize_for_focal, Linearization};
use crate::error::{Error, Result};
use crate::scheme::{ParameterScheme, Symmetry};
use crate::Tolerance;

/// The seven families of schemes with a center at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CenterCase {
    S,
    I1,
    I2,
    I3,
    I4,
    R1,
    R2,
}

/// Why a center exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A closed-form first integral (see [`crate::integrals`]).
    FirstIntegral,
    /// Reversibility with respect to the reflection `s1` (line `u = v`) or
    /// `s3` (line `u = -v`).
    Reflection { symmetry: Symmetry },
}

impl CenterCase {
    pub const ALL: [CenterCase; 7] = [
        CenterCase::S,
        CenterCase::I1,
        CenterCase::I2,
        CenterCase::I3,
        CenterCase::I4,
        CenterCase::R1,
        CenterCase::R2,
    ];

    /// Both defining equalities written as `lhs - rhs`.
    pub fn residuals(self, s: &ParameterScheme) -> [f64; 2] {
        let [a1, a2, a3, a4] = s.a;
        let [b1, b2, b3, b4] = s.b;
        match self {
            CenterCase::S => [a1 - a2, b3 - b4],
            CenterCase::I1 => [a1 - a3, b1 - b3],
            CenterCase::I2 => [a1 - a4, b1 - b4],
            CenterCase::I3 => [a2 - a4, b2 - b4],
            CenterCase::I4 => [a2 - a3, b2 - b3],
            CenterCase::R1 => [(a1 + b1) - (a4 + b4), (a2 + b2) - (a3 + b3)],
            CenterCase::R2 => [(a1 - b1) - (a3 - b3), (a2 - b2) - (a4 - b4)],
        }
    }

    pub fn holds(self, s: &ParameterScheme, tol: &Tolerance) -> bool {
        let scale = tol.scale_of(s);
        self.residuals(s).iter().all(|&r| tol.is_zero(r, scale, 1))
    }

    pub fn witness(self) -> Witness {
        match self {
            CenterCase::R1 => Witness::Reflection {
                symmetry: Symmetry::S1,
            },
            CenterCase::R2 => Witness::Reflection {
                symmetry: Symmetry::S3,
            },
            _ => Witness::FirstIntegral,
        }
    }
}

impl fmt::Display for CenterCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The linearization at the origin is not a pair of imaginary eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NotWeakFocus {
    TraceNonzero,
    DetNotPositive,
}

impl fmt::Display for NotWeakFocus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotWeakFocus::TraceNonzero => f.write_str("trace nonzero"),
            NotWeakFocus::DetNotPositive => f.write_str("det J <= 0"),
        }
    }
}

fn weak_focus(
    s: &ParameterScheme,
    tol: &Tolerance,
) -> std::result::Result<Linearization, NotWeakFocus> {
    let lin = Linearization::of(s, tol);
    if !lin.det_positive {
        Err(NotWeakFocus::DetNotPositive)
    } else if !lin.trace_zero {
        Err(NotWeakFocus::TraceNonzero)
    } else {
        Ok(lin)
    }
}

/// Every center family whose defining equalities hold. Requires `tr J = 0`
/// and `det J > 0`.
pub fn center_cases(
    s: &ParameterScheme,
    tol: &Tolerance,
) -> std::result::Result<Vec<CenterCase>, NotWeakFocus> {
    weak_focus(s, tol)?;
    Ok(CenterCase::ALL
        .into_iter()
        .filter(|c| c.holds(s, tol))
        .collect())
}

/// Subcase of the `L1 = 0` case tree in which a closed form for `L2` exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum L2Branch {
    B,
    C2,
    C4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SecondFocal {
    Value {
        value: f64,
        branch: L2Branch,
    },
    /// `L1 = 0` landed in an integrable subcase; all focal values vanish.
    ZeroByIntegrability {
        case: CenterCase,
    },
    /// `L2` is only defined once `L1` vanishes.
    UndefinedRequiresL1Zero,
}

impl SecondFocal {
    pub fn value(&self) -> Option<f64> {
        match *self {
            SecondFocal::Value { value, .. } => Some(value),
            SecondFocal::ZeroByIntegrability { .. } => Some(0.0),
            SecondFocal::UndefinedRequiresL1Zero => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FocalValues {
    pub l1: f64,
    /// Whether `L1` was classified as zero by the tolerance policy.
    pub l1_zero: bool,
    pub l2: SecondFocal,
}

/// First two focal values at a weak focus (`tr J = 0`, `det J > 0`),
/// computed on the normalization `a1 = b1 = 0`.
pub fn focal_values(s: &ParameterScheme, tol: &Tolerance) -> Result<FocalValues> {
    let lin = weak_focus(s, tol)
        .map_err(|e| Error::OutOfScope(format!("focal values need a weak focus: {e}")))?;
    let n = normalize_for_focal(s);
    let scale = tol.scale_of(&n);
    let zero = |x: f64, k: i32| tol.is_zero(x, scale, k);
    let [_, _, a3, a4] = n.a;
    let [_, b2, b3, b4] = n.b;
    if zero(b2, 1) {
        return Err(Error::Consistency(
            "b2 = 0 after normalization contradicts det J > 0".into(),
        ));
    }
    let root_det = lin.jac.det().sqrt();
    let d = a3 * a4 + a3 * b4 - a4 * b3;
    let bracket = d * b2 - (a3 - a4) * b3 * b4;
    let l1 = -PI / 8.0 * (b3 - b4) * bracket / (root_det * b2);

    let l1_zero = zero(b3 - b4, 1) || zero(bracket, 3);
    if !l1_zero {
        return Ok(FocalValues {
            l1,
            l1_zero,
            l2: SecondFocal::UndefinedRequiresL1Zero,
        });
    }
    let value = |value, branch| SecondFocal::Value { value, branch };
    let l2 = if zero(b3 - b4, 1) {
        SecondFocal::ZeroByIntegrability {
            case: CenterCase::S,
        }
    } else if !zero(d, 2) {
        let cross = a3 * b4 - a4 * b3;
        if zero(cross, 2) {
            return Err(Error::Consistency(
                "a3 b4 - a4 b3 = 0 with L1 = 0 forces det J = 0".into(),
            ));
        }
        let num =
            (b3 - b4) * (a4 + b4) * (a3 - b3) * (a3 - b3 + b4) * (a4 + b4 - b3) * cross * cross;
        value(-PI / 288.0 * num / (root_det * d * b3 * b4), L2Branch::B)
    } else if zero(b3, 1) {
        if zero(a3, 1) {
            SecondFocal::ZeroByIntegrability {
                case: CenterCase::I1,
            }
        } else if zero(a4 + b4, 1) {
            let num = a3 * a4 * a4 * (a3 - a4) * (a4 + b2) * (a3 - a4 - b2);
            value(-PI / 288.0 * num / (root_det * b2), L2Branch::C2)
        } else {
            return Err(Error::Consistency(
                "D = 0, b3 = 0 but neither a3 = 0 nor a4 + b4 = 0".into(),
            ));
        }
    } else if zero(b4, 1) {
        if zero(a4, 1) {
            SecondFocal::ZeroByIntegrability {
                case: CenterCase::I2,
            }
        } else if zero(a3 - b3, 1) {
            let num = a3 * a3 * a4 * (a3 - a4) * (a3 - b2) * (a3 - a4 - b2);
            value(PI / 288.0 * num / (root_det * b2), L2Branch::C4)
        } else {
            return Err(Error::Consistency(
                "D = 0, b4 = 0 but neither a4 = 0 nor a3 = b3".into(),
            ));
        }
    } else {
        return Err(Error::Consistency(
            "L1 = 0 and D = 0 require b3 = 0 or b4 = 0".into(),
        ));
    };
    Ok(FocalValues { l1, l1_zero, l2 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterVerdict {
    pub is_center: bool,
    pub cases: Vec<CenterCase>,
    pub focal: Option<FocalValues>,
    /// The focal values vanish exactly when a center family matched.
    pub consistent: bool,
    pub explanation: String,
}

/// Center test at the origin: weak focus plus membership in one of the seven
/// families, cross-checked against the focal values.
pub fn is_center(s: &ParameterScheme, tol: &Tolerance) -> CenterVerdict {
    let cases = match center_cases(s, tol) {
        Ok(c) => c,
        Err(reason) => {
            return CenterVerdict {
                is_center: false,
                cases: Vec::new(),
                focal: None,
                consistent: true,
                explanation: reason.to_string(),
            }
        }
    };
    let focal = focal_values(s, tol);
    let vanish = match &focal {
        Ok(f) => {
            f.l1_zero
                && f.l2
                    .value()
                    .is_some_and(|v| v.abs() <= 1e-9 * tol.scale_of(s).powi(2))
        }
        Err(_) => false,
    };
    let center = !cases.is_empty();
    let consistent = focal.is_ok() && vanish == center;
    let explanation = match (&focal, center) {
        (Err(e), _) => format!("cases {cases:?}; focal values unavailable: {e}"),
        (Ok(_), true) => format!("center of type {cases:?}"),
        (Ok(f), false) => format!(
            "weak focus, no center family matches (L1 = {}, L2 = {:?})",
            f.l1, f.l2
        ),
    };
    CenterVerdict {
        is_center: center,
        cases,
        focal: focal.ok(),
        consistent,
        explanation,
    }
}

fn require_center(s: &ParameterScheme, tol: &Tolerance) -> Result<()> {
    let v = is_center(s, tol);
    if v.is_center {
        Ok(())
    } else {
        Err(Error::OutOfScope(format!(
            "origin is not a center: {}",
            v.explanation
        )))
    }
}

/// Whether a center is global (all orbits closed and surrounding the origin).
pub fn is_global_center(s: &ParameterScheme, tol: &Tolerance) -> Result<bool> {
    require_center(s, tol)?;
    Ok(global_center_chains(s, tol))
}

/// The min/max chains of the global-center criterion, without checking that
/// the origin is a center.
pub fn global_center_chains(s: &ParameterScheme, tol: &Tolerance) -> bool {
    let scale = tol.scale_of(s);
    let le = |x, y| tol.le(x, y, scale);
    let [a1, a2, a3, a4] = s.a;
    let [b1, b2, b3, b4] = s.b;
    le(a3.min(a4), a1.min(a2))
        && le(a1.max(a2), a3.max(a4))
        && le(b1.min(b2), b3.min(b4))
        && le(b3.max(b4), b1.max(b2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Clockwise,
    Anticlockwise,
}

/// Rotation sense of the orbits around a center.
pub fn orientation(s: &ParameterScheme, tol: &Tolerance) -> Result<Orientation> {
    require_center(s, tol)?;
    let [_, _, a3, a4] = s.a;
    let [b1, b2, _, _] = s.b;
    if a3 < a4 && b1 > b2 {
        Ok(Orientation::Clockwise)
    } else if a3 > a4 && b1 < b2 {
        Ok(Orientation::Anticlockwise)
    } else {
        Err(Error::Consistency(
            "off-diagonal signs inconsistent with det J > 0".into(),
        ))
    }
}

/// First Lyapunov coefficient at a weak focus; negative means the origin is
/// asymptotically stable and a Hopf bifurcation in `tr J` is supercritical.
pub fn hopf_ell1(s: &ParameterScheme, tol: &Tolerance) -> Result<f64> {
    weak_focus(s, tol).map_err(|e| Error::OutOfScope(format!("ell1 needs a weak focus: {e}")))?;
    let [a1, _, a3, a4] = s.a;
    let [b1, b2, b3, b4] = s.b;
    if tol.is_zero(b2 - b1, tol.scale_of(s), 1) {
        return Err(Error::Consistency("b1 = b2 contradicts det J > 0".into()));
    }
    let (p, q) = (a3 - a1, a4 - a1);
    let (r, t) = (b3 - b1, b4 - b1);
    Ok(-(b3 - b4) * (p * q + p * t - q * r - (a3 - a4) * r * t / (b2 - b1)))
}

/// `L1 = (pi / 8) ell1 / sqrt(det J)`; exposed for cross-checks.
pub fn l1_from_ell1(s: &ParameterScheme, ell1: f64) -> f64 {
    PI / 8.0 * ell1 / jacobian(s).det().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TOL: Tolerance = Tolerance {
        eq: 1e-12,
        det: 1e-12,
    };

    fn scheme(a: [f64; 4], b: [f64; 4]) -> ParameterScheme {
        ParameterScheme::new(a, b).unwrap()
    }

    fn case_s() -> ParameterScheme {
        scheme([0.0, 0.0, -1.0, 1.0], [1.0, -1.0, 0.0, 0.0])
    }

    fn bautin_base() -> ParameterScheme {
        scheme([0.0, -1.0, -1.0, 4.0], [0.0, -2.0, -1.0, 0.0])
    }

    #[test]
    fn case_s_example() {
        assert_eq!(
            center_cases(&case_s(), &TOL).unwrap(),
            vec![CenterCase::S, CenterCase::R1, CenterCase::R2]
        );
        let v = is_center(&case_s(), &TOL);
        assert!(v.is_center && v.consistent);
        assert!(is_global_center(&case_s(), &TOL).unwrap());
        assert_eq!(
            orientation(&case_s(), &TOL).unwrap(),
            Orientation::Clockwise
        );
        assert_eq!(hopf_ell1(&case_s(), &TOL).unwrap(), 0.0);
        assert_eq!(focal_values(&case_s(), &TOL).unwrap().l1, 0.0);
    }

    #[test]
    fn mirrored_case_s_is_anticlockwise() {
        let m = case_s().apply_symmetry(Symmetry::S1);
        assert_eq!(m, scheme([0.0, 0.0, 1.0, -1.0], [-1.0, 1.0, 0.0, 0.0]));
        assert_eq!(orientation(&m, &TOL).unwrap(), Orientation::Anticlockwise);
    }

    #[test]
    fn bautin_base_point() {
        let s = bautin_base();
        // a2 - b2 = 1 but a4 - b4 = 4: no family matches.
        assert!(center_cases(&s, &TOL).unwrap().is_empty());
        let f = focal_values(&s, &TOL).unwrap();
        assert!(f.l1.abs() < 1e-12 && f.l1_zero);
        match f.l2 {
            SecondFocal::Value { value, branch } => {
                assert_eq!(branch, L2Branch::C4);
                assert_relative_eq!(value, -10.0 * PI / 288.0, max_relative = 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(hopf_ell1(&s, &TOL).unwrap(), 0.0);
        let v = is_center(&s, &TOL);
        assert!(!v.is_center && v.consistent);
    }

    #[test]
    fn l1_direct_evaluation() {
        // normalized (a2, b2, a3, b3, a4, b4) = (1, 1, 2, 1, -1, 0)
        let s = scheme([0.0, 1.0, 2.0, -1.0], [0.0, 1.0, 1.0, 0.0]);
        let f = focal_values(&s, &TOL).unwrap();
        assert_relative_eq!(f.l1, PI / (8.0 * 2f64.sqrt()), max_relative = 1e-14);
        assert_eq!(f.l2, SecondFocal::UndefinedRequiresL1Zero);
        assert_relative_eq!(hopf_ell1(&s, &TOL).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(l1_from_ell1(&s, 1.0), f.l1, max_relative = 1e-14);
        let v = is_center(&s, &TOL);
        assert!(!v.is_center && v.consistent);
    }

    #[test]
    fn preconditions() {
        let s = scheme([0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]);
        assert_eq!(center_cases(&s, &TOL), Err(NotWeakFocus::DetNotPositive));
        let v = is_center(&scheme([-1.0, 0.0, 0.0, 1.0], [1.0, 0.0, -1.0, 0.0]), &TOL);
        assert!(!v.is_center);
        assert_eq!(v.explanation, "trace nonzero");
        assert!(focal_values(&s, &TOL).is_err());
        assert!(is_global_center(&s, &TOL).is_err());
        assert!(orientation(&s, &TOL).is_err());
        assert!(hopf_ell1(&s, &TOL).is_err());
    }

    #[test]
    fn non_global_case_s() {
        // a3 = a4 cannot hold with det J > 0, so push a1 = a2 above max(a3, a4)
        let s = scheme([2.0, 2.0, -1.0, 1.0], [1.0, -1.0, 0.0, 0.0]);
        assert!(is_center(&s, &TOL).is_center);
        assert!(!is_global_center(&s, &TOL).unwrap());
    }

    #[test]
    fn r1_global_center_chain() {
        // R1 in the form u' = e^{a1 u + a4 v} - e^{a2 u + a3 v}, v' = e^{a3 u + a2 v} - e^{a4 u + a1 v}
        // with a3 <= a2 < a1 <= a4.
        let (a1, a2, a3, a4) = (0.5, -0.5, -1.0, 1.0);
        let s = scheme([a1, a2, a3, a4], [a4, a3, a2, a1]);
        let v = is_center(&s, &TOL);
        assert!(v.is_center, "{}", v.explanation);
        assert!(v.cases.contains(&CenterCase::R1));
        assert!(is_global_center(&s, &TOL).unwrap());
    }
}
