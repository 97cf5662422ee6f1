//! Asymptotic and global stability for all positive coefficients, and
//! boundedness of forward solutions.

use std::fmt;

use serde::Serialize;

use super::Linearization;
use crate::error::{Error, Result};
use crate::forms::{det2, exponent_difference, is_singular, Mat2};
use crate::scheme::{ParameterScheme, Sign, SignMatrix, SignPattern};
use crate::Tolerance;

use Sign::{Neg, Pos, Zero};

/// The five sign patterns of `G - H` (equivalently of the Jacobian) that make
/// the origin asymptotically stable for every choice of `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StableBranch {
    /// `(-,*;*,-)`
    A,
    /// `(0,+;-,-)`
    B,
    /// `(0,-;+,-)`
    C,
    /// `(-,-;+,0)`
    D,
    /// `(-,+;-,0)`
    E,
}

impl StableBranch {
    pub const ALL: [StableBranch; 5] = [
        StableBranch::A,
        StableBranch::B,
        StableBranch::C,
        StableBranch::D,
        StableBranch::E,
    ];

    pub const fn pattern(self) -> SignPattern {
        match self {
            StableBranch::A => SignPattern::new([Some(Neg), None, None, Some(Neg)]),
            StableBranch::B => SignPattern::new([Some(Zero), Some(Pos), Some(Neg), Some(Neg)]),
            StableBranch::C => SignPattern::new([Some(Zero), Some(Neg), Some(Pos), Some(Neg)]),
            StableBranch::D => SignPattern::new([Some(Neg), Some(Neg), Some(Pos), Some(Zero)]),
            StableBranch::E => SignPattern::new([Some(Neg), Some(Pos), Some(Neg), Some(Zero)]),
        }
    }

    fn of(m: &SignMatrix) -> Option<StableBranch> {
        StableBranch::ALL
            .into_iter()
            .find(|b| b.pattern().matches(m))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum NotStableReason {
    /// `det(G - H) < 0`: the origin is a saddle.
    Saddle,
    /// Both diagonal entries vanish: the origin is a center for every gamma.
    CenterNotAsymptoticallyStable,
    /// Some diagonal entry is positive, so the trace is positive for some gamma.
    TraceCanBePositive { sign_matrix: String },
    /// Locally stable for all gamma, but an exponent chain fails and
    /// unbounded solutions exist.
    UnboundedSolutionsExist { branch: StableBranch, chain: String },
}

impl fmt::Display for NotStableReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NotStableReason::Saddle => f.write_str("det(G - H) < 0, saddle"),
            NotStableReason::CenterNotAsymptoticallyStable => {
                f.write_str("center, not asymptotically stable")
            }
            NotStableReason::TraceCanBePositive { sign_matrix } => {
                write!(f, "sign matrix {sign_matrix} admits positive trace")
            }
            NotStableReason::UnboundedSolutionsExist { branch, chain } => {
                write!(
                    f,
                    "unbounded solutions exist (branch {branch:?}, violated {chain})"
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", content = "detail", rename_all = "snake_case")]
pub enum StabilityVerdict {
    AsympStableAllGamma(StableBranch),
    GloballyStableAllGamma(StableBranch),
    NotForAllGamma(NotStableReason),
}

fn checked_difference(g: &Mat2, h: &Mat2, tol: &Tolerance) -> Result<(Mat2, SignMatrix)> {
    let m = exponent_difference(g, h);
    if is_singular(&m, tol) {
        return Err(Error::Degenerate("det(G - H) = 0".into()));
    }
    let scale = m.iter().flatten().fold(1.0f64, |acc, x| acc.max(x.abs()));
    let signs = SignMatrix::of([m[0][0], m[0][1], m[1][0], m[1][1]], tol.eq * scale);
    Ok((m, signs))
}

/// Asymptotic stability of the origin for all `gamma1, gamma2 > 0`.
pub fn local_stability_all_gamma(g: &Mat2, h: &Mat2, tol: &Tolerance) -> Result<StabilityVerdict> {
    let (m, signs) = checked_difference(g, h, tol)?;
    if det2(&m) < 0.0 {
        return Ok(StabilityVerdict::NotForAllGamma(NotStableReason::Saddle));
    }
    if let Some(branch) = StableBranch::of(&signs) {
        return Ok(StabilityVerdict::AsympStableAllGamma(branch));
    }
    let reason = if signs.0[0] == Zero && signs.0[3] == Zero {
        NotStableReason::CenterNotAsymptoticallyStable
    } else {
        NotStableReason::TraceCanBePositive {
            sign_matrix: signs.to_string(),
        }
    };
    Ok(StabilityVerdict::NotForAllGamma(reason))
}

/// Global asymptotic stability of the origin for all `gamma1, gamma2 > 0`.
///
/// Branches `b`-`e` carry exponent chains; they are evaluated on the
/// exponential form with `gamma1 = gamma2 = 1` since every `a_i` scales with
/// `gamma1` and every `b_i` with `gamma2`.
pub fn global_stability_all_gamma(g: &Mat2, h: &Mat2, tol: &Tolerance) -> Result<StabilityVerdict> {
    let branch = match local_stability_all_gamma(g, h, tol)? {
        StabilityVerdict::AsympStableAllGamma(b) => b,
        other => return Ok(other),
    };
    if branch == StableBranch::A {
        return Ok(StabilityVerdict::GloballyStableAllGamma(branch));
    }
    let scheme = ParameterScheme::from_exponents_unit_gamma(g, h);
    match boundedness_status(&scheme, tol)? {
        BoundednessStatus::Bounded(_) => Ok(StabilityVerdict::GloballyStableAllGamma(branch)),
        BoundednessStatus::Unbounded(case) => Ok(StabilityVerdict::NotForAllGamma(
            NotStableReason::UnboundedSolutionsExist {
                branch,
                chain: case.chain().to_string(),
            },
        )),
        BoundednessStatus::Inconclusive(case) => Err(Error::Consistency(format!(
            "branch {branch:?} mapped to inequality case {case:?}"
        ))),
    }
}

/// Sign-geometry cases with `det J > 0` for which boundedness of all forward
/// solutions is decided (or constrained) by an exponent chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundednessCase {
    A,
    B1,
    B2,
    C1,
    C2,
    D1,
    D2,
    E1,
    E2,
}

impl BoundednessCase {
    fn pattern(self) -> SignPattern {
        let p = |x: [Sign; 4]| SignPattern::new(x.map(Some));
        match self {
            BoundednessCase::A => SignPattern::new([Some(Neg), None, None, Some(Neg)]),
            BoundednessCase::B1 => p([Pos, Pos, Neg, Neg]),
            BoundednessCase::B2 => p([Zero, Pos, Neg, Neg]),
            BoundednessCase::C1 => p([Pos, Neg, Pos, Neg]),
            BoundednessCase::C2 => p([Zero, Neg, Pos, Neg]),
            BoundednessCase::D1 => p([Neg, Neg, Pos, Pos]),
            BoundednessCase::D2 => p([Neg, Neg, Pos, Zero]),
            BoundednessCase::E1 => p([Neg, Pos, Neg, Pos]),
            BoundednessCase::E2 => p([Neg, Pos, Neg, Zero]),
        }
    }

    const ALL: [BoundednessCase; 9] = [
        BoundednessCase::A,
        BoundednessCase::B1,
        BoundednessCase::B2,
        BoundednessCase::C1,
        BoundednessCase::C2,
        BoundednessCase::D1,
        BoundednessCase::D2,
        BoundednessCase::E1,
        BoundednessCase::E2,
    ];

    pub fn chain(self) -> &'static str {
        match self {
            BoundednessCase::A => "none",
            BoundednessCase::B1 => "a3 <= a2 < a1 <= a4",
            BoundednessCase::B2 => "a3 <= a2 = a1 <= a4",
            BoundednessCase::C1 => "a4 <= a2 < a1 <= a3",
            BoundednessCase::C2 => "a4 <= a2 = a1 <= a3",
            BoundednessCase::D1 => "b1 <= b4 < b3 <= b2",
            BoundednessCase::D2 => "b1 <= b4 = b3 <= b2",
            BoundednessCase::E1 => "b2 <= b4 < b3 <= b1",
            BoundednessCase::E2 => "b2 <= b4 = b3 <= b1",
        }
    }

    /// Whether the case's chain is only necessary (not sufficient).
    pub fn necessary_only(self) -> bool {
        matches!(
            self,
            BoundednessCase::B1 | BoundednessCase::C1 | BoundednessCase::D1 | BoundednessCase::E1
        )
    }

    /// Outer inequalities of the chain. The strict or equal middle relation
    /// already follows from the sign matrix.
    fn chain_holds(self, s: &ParameterScheme, tol: &Tolerance, scale: f64) -> bool {
        let [a1, a2, a3, a4] = s.a;
        let [b1, b2, b3, b4] = s.b;
        let le = |x, y| tol.le(x, y, scale);
        match self {
            BoundednessCase::A => true,
            BoundednessCase::B1 | BoundednessCase::B2 => le(a3, a2) && le(a1, a4),
            BoundednessCase::C1 | BoundednessCase::C2 => le(a4, a2) && le(a1, a3),
            BoundednessCase::D1 | BoundednessCase::D2 => le(b1, b4) && le(b3, b2),
            BoundednessCase::E1 | BoundednessCase::E2 => le(b2, b4) && le(b3, b1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "case", rename_all = "snake_case")]
pub enum BoundednessStatus {
    Bounded(BoundednessCase),
    Unbounded(BoundednessCase),
    /// The necessary chain holds but sufficiency is not established.
    Inconclusive(BoundednessCase),
}

impl BoundednessStatus {
    pub fn case(&self) -> BoundednessCase {
        match *self {
            BoundednessStatus::Bounded(c)
            | BoundednessStatus::Unbounded(c)
            | BoundednessStatus::Inconclusive(c) => c,
        }
    }
}

/// Boundedness of all forward solutions of the exponential-form ODE with
/// `det J > 0`.
///
/// Sign matrices with a nonnegative diagonal (trace possibly positive or both
/// diagonal entries zero) are not covered and yield [`Error::OutOfScope`].
pub fn boundedness_status(s: &ParameterScheme, tol: &Tolerance) -> Result<BoundednessStatus> {
    let lin = Linearization::of(s, tol);
    if !lin.det_positive {
        return Err(Error::OutOfScope(
            "boundedness analysis requires det J > 0".into(),
        ));
    }
    let signs = lin.jac.sign_matrix(tol.eq * lin.scale);
    let case = BoundednessCase::ALL
        .into_iter()
        .find(|c| c.pattern().matches(&signs))
        .ok_or_else(|| {
            Error::OutOfScope(format!(
                "sign matrix {signs} has no negative diagonal entry"
            ))
        })?;
    let holds = case.chain_holds(s, tol, lin.scale);
    Ok(match (holds, case.necessary_only()) {
        (false, _) => BoundednessStatus::Unbounded(case),
        (true, false) => BoundednessStatus::Bounded(case),
        (true, true) => BoundednessStatus::Inconclusive(case),
    })
}
