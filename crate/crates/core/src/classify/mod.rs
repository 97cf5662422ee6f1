//! Exact decision procedures on parameter schemes and exponent matrices.

mod center;
mod stability;

pub use center::{
    center_cases, focal_values, global_center_chains, hopf_ell1, is_center, is_global_center,
    l1_from_ell1, orientation, CenterCase, CenterVerdict, FocalValues, L2Branch, NotWeakFocus,
    Orientation, SecondFocal, Witness,
};
pub use stability::{
    boundedness_status, global_stability_all_gamma, local_stability_all_gamma, BoundednessCase,
    BoundednessStatus, NotStableReason, StabilityVerdict, StableBranch,
};

use serde::Serialize;

use crate::scheme::{ParameterScheme, SignMatrix};
use crate::Tolerance;

/// Jacobian of the exponential-form ODE at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jacobian {
    pub j11: f64,
    pub j12: f64,
    pub j21: f64,
    pub j22: f64,
}

impl Jacobian {
    pub fn trace(&self) -> f64 {
        self.j11 + self.j22
    }

    pub fn det(&self) -> f64 {
        self.j11 * self.j22 - self.j12 * self.j21
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.j11, self.j12, self.j21, self.j22]
    }

    pub fn sign_matrix(&self, tol: f64) -> SignMatrix {
        SignMatrix::of(self.entries(), tol)
    }
}

impl std::ops::Neg for Jacobian {
    type Output = Jacobian;

    fn neg(self) -> Jacobian {
        Jacobian {
            j11: -self.j11,
            j12: -self.j12,
            j21: -self.j21,
            j22: -self.j22,
        }
    }
}

pub fn jacobian(s: &ParameterScheme) -> Jacobian {
    let [a1, a2, a3, a4] = s.a;
    let [b1, b2, b3, b4] = s.b;
    Jacobian {
        j11: a1 - a2,
        j12: b1 - b2,
        j21: a3 - a4,
        j22: b3 - b4,
    }
}

/// Orbitally equivalent scheme with `a1 = b1 = 0`.
pub fn normalize_for_focal(s: &ParameterScheme) -> ParameterScheme {
    s.shift_equivalent(s.a[0], s.b[0])
}

/// Trace/determinant facts at the origin, evaluated with the scheme's
/// tolerance scale.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Linearization {
    pub jac: Jacobian,
    pub scale: f64,
    pub trace_zero: bool,
    pub det_positive: bool,
}

impl Linearization {
    pub fn of(s: &ParameterScheme, tol: &Tolerance) -> Self {
        let jac = jacobian(s);
        let scale = tol.scale_of(s);
        Self {
            jac,
            scale,
            trace_zero: tol.is_zero(jac.trace(), scale, 1),
            det_positive: jac.det() > tol.eq * scale * scale,
        }
    }

    #[cfg(test)]
    pub fn weak_focus(&self) -> bool {
        self.trace_zero && self.det_positive
    }
}
