//! Analysis of planar S-systems.
//!
//! A planar S-system `x' = alpha x^G - beta x^H` is brought to exponential
//! form (module [`forms`]), described by an eight-entry [`ParameterScheme`]
//! (module [`scheme`]), classified exactly (module [`classify`]), equipped
//! with closed-form conserved quantities (module [`integrals`]) and checked
//! numerically by integration and return maps (module [`dynamics`]).

// NaN must fail range checks, hence `!(x > 0.0)`
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod dynamics;
pub mod error;
pub mod forms;
pub mod integrals;
pub mod portrait;
pub mod report;
pub mod sampling;
pub mod scheme;

pub use error::{Error, Result};
pub use forms::{EquilibriumResult, SSystem, ScaledSystem};
pub use scheme::{ParameterScheme, Sign, SignMatrix, SignPattern, Symmetry};

/// Tolerance policy for the exact algebraic conditions of the classifiers.
///
/// An equality `x == y` between scheme-derived quantities of polynomial
/// degree `k` holds when `|x - y| <= eq * scale^k`, where `scale` is
/// `max(1, |s|_max)` for the scheme `s` under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eq: f64,
    /// Relative threshold for `det(G - H) = 0`.
    pub det: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eq: 1e-12,
            det: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn scale_of(&self, s: &ParameterScheme) -> f64 {
        s.max_norm().max(1.0)
    }

    #[inline]
    pub fn is_zero(&self, x: f64, scale: f64, degree: i32) -> bool {
        x.abs() <= self.eq * scale.powi(degree)
    }

    /// `x <= y` up to the degree-one tolerance.
    #[inline]
    pub fn le(&self, x: f64, y: f64, scale: f64) -> bool {
        x <= y + self.eq * scale
    }

    /// `x < y` strictly beyond the degree-one tolerance.
    #[inline]
    pub fn lt(&self, x: f64, y: f64, scale: f64) -> bool {
        x < y - self.eq * scale
    }
}
