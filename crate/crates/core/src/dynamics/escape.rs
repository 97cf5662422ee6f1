//! Initial conditions whose orbits are unbounded when an exponent chain of
//! the boundedness classification fails.

use serde::Serialize;

use crate::classify::jacobian;
use crate::error::{Error, Result};
use crate::integrals::separatrix_u_of_v;
use crate::scheme::{ParameterScheme, Sign, SignMatrix, Symmetry};
use crate::Tolerance;

/// Escape seeds together with the symmetry that brought the scheme into the
/// reference configuration `sign J = (0,+;-,-)`, `a1 = a2 > a4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeWitness {
    pub symmetry: Symmetry,
    pub seeds: Vec<[f64; 2]>,
}

fn reference_frame(s: &ParameterScheme, tol: &Tolerance) -> bool {
    use Sign::*;
    let scale = tol.scale_of(s);
    let sm = SignMatrix::of(jacobian(s).entries(), tol.eq * scale);
    sm == SignMatrix([Zero, Pos, Neg, Neg]) && tol.lt(s.a[3], s.a[0], scale)
}

/// Seeds just beyond the orbit `u = u_sep(v)` of the auxiliary system,
/// mapped back to the coordinates of `s`. Solutions starting there are
/// monotone and unbounded.
///
/// Applies to the sign patterns `(0,+;-,-)`, `(0,-;+,-)`, `(-,-;+,0)` and
/// `(-,+;-,0)` whenever the matching exponent chain is violated.
pub fn escape_witness(s: &ParameterScheme, tol: &Tolerance) -> Result<EscapeWitness> {
    let g = Symmetry::ALL
        .into_iter()
        .find(|&g| reference_frame(&s.apply_symmetry(g), tol))
        .ok_or_else(|| {
            Error::OutOfScope("no symmetry image with sign (0,+;-,-) and a1 = a2 > a4".into())
        })?;
    let t = s.apply_symmetry(g);
    let back = g.inverse();
    let mut seeds = Vec::new();
    for v in [0.05, 0.2, 0.5, 1.0, 2.0] {
        let u = separatrix_u_of_v(&t, v, tol)?;
        for du in [0.5, 2.0] {
            seeds.push(back.apply_point([u + du, v]));
        }
    }
    Ok(EscapeWitness { symmetry: g, seeds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorOptions, Termination};

    const TOL: Tolerance = Tolerance {
        eq: 1e-12,
        det: 1e-12,
    };

    #[test]
    fn reference_scheme_escapes() {
        // sign (0,+;-,-), a1 = a2 = 0.5 > a4 = 0.2
        let s = ParameterScheme::new([0.5, 0.5, 0.0, 0.2], [0.6, -0.4, -0.3, 0.5]).unwrap();
        let w = escape_witness(&s, &TOL).unwrap();
        assert_eq!(w.symmetry, Symmetry::R0);
        let opts = IntegratorOptions {
            escape_radius: 30.0,
            max_time: 1e12,
            ..IntegratorOptions::oracle()
        };
        for x in &w.seeds {
            let tr = integrate(&s, *x, &opts).unwrap();
            assert!(
                matches!(tr.termination, Termination::Escaped | Termination::Overflow),
                "{x:?}: {:?}",
                tr.termination
            );
        }
    }

    #[test]
    fn symmetric_images_escape() {
        let s = ParameterScheme::new([0.5, 0.5, 0.0, 0.2], [0.6, -0.4, -0.3, 0.5]).unwrap();
        let opts = IntegratorOptions {
            escape_radius: 30.0,
            max_time: 1e12,
            ..IntegratorOptions::oracle()
        };
        for g in Symmetry::ALL {
            let t = s.apply_symmetry(g);
            let w = escape_witness(&t, &TOL).unwrap();
            let tr = integrate(&t, w.seeds[3], &opts).unwrap();
            assert_eq!(tr.termination, Termination::Escaped, "{g}");
        }
    }

    #[test]
    fn bounded_scheme_has_no_witness() {
        // chain a3 <= a1 = a2 <= a4 holds
        let s = ParameterScheme::new([0.0, 0.0, -1.0, 1.0], [0.5, -0.5, -1.0, 0.0]).unwrap();
        assert!(escape_witness(&s, &TOL).is_err());
    }
}
