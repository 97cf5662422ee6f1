//! The exponential-form parameter scheme, its orbital equivalences, and the
//! action of the symmetry group of the square on it.
//!
//! A scheme `(a1 a2 a3 a4; b1 b2 b3 b4)` stands for the planar ODE
//!
//! ```text
//! u' = exp(a1 u + b1 v) - exp(a2 u + b2 v)
//! v' = exp(a3 u + b3 v) - exp(a4 u + b4 v)
//! ```
//!
//! whose unique equilibrium (when the Jacobian is regular) is the origin.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Eight exponent coefficients of the exponential-form ODE, laid out as the
/// two rows `a = (a1..a4)` (coefficients of `u`) and `b = (b1..b4)`
/// (coefficients of `v`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SchemeRecord", into = "SchemeRecord")]
pub struct ParameterScheme {
    pub a: [f64; 4],
    pub b: [f64; 4],
}

/// Flat `a1..b4` record used for serialization.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeRecord {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
}

impl TryFrom<SchemeRecord> for ParameterScheme {
    type Error = Error;

    fn try_from(r: SchemeRecord) -> Result<Self> {
        ParameterScheme::new([r.a1, r.a2, r.a3, r.a4], [r.b1, r.b2, r.b3, r.b4])
    }
}

impl From<ParameterScheme> for SchemeRecord {
    fn from(s: ParameterScheme) -> Self {
        let [a1, a2, a3, a4] = s.a;
        let [b1, b2, b3, b4] = s.b;
        SchemeRecord {
            a1,
            a2,
            a3,
            a4,
            b1,
            b2,
            b3,
            b4,
        }
    }
}

impl ParameterScheme {
    /// Builds a scheme, rejecting non-finite entries.
    pub fn new(a: [f64; 4], b: [f64; 4]) -> Result<Self> {
        if a.iter().chain(b.iter()).all(|x| x.is_finite()) {
            Ok(Self { a, b })
        } else {
            Err(Error::Domain(
                "parameter scheme entries must be finite".into(),
            ))
        }
    }

    pub const fn zero() -> Self {
        Self {
            a: [0.0; 4],
            b: [0.0; 4],
        }
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.a
            .iter()
            .chain(self.b.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Exponent of monomial `i` (0-based) at `(u, v)`.
    #[inline]
    pub fn exponent(&self, i: usize, u: f64, v: f64) -> f64 {
        self.a[i] * u + self.b[i] * v
    }

    /// Exponent of monomial `i` minus that of monomial `j`, from the
    /// coefficient differences: exact cancellation where entries coincide,
    /// which matters far from the origin.
    #[inline]
    pub fn exponent_gap(&self, i: usize, j: usize, u: f64, v: f64) -> f64 {
        (self.a[i] - self.a[j]) * u + (self.b[i] - self.b[j]) * v
    }

    /// Action of a symmetry of the square on the scheme.
    pub fn apply_symmetry(&self, g: Symmetry) -> Self {
        let [a1, a2, a3, a4] = self.a;
        let [b1, b2, b3, b4] = self.b;
        let (a, b) = match g {
            Symmetry::R0 => (self.a, self.b),
            Symmetry::R1 => ([-b4, -b3, -b1, -b2], [a4, a3, a1, a2]),
            Symmetry::R2 => ([-a2, -a1, -a4, -a3], [-b2, -b1, -b4, -b3]),
            Symmetry::R3 => ([b3, b4, b2, b1], [-a3, -a4, -a2, -a1]),
            Symmetry::S0 => ([a1, a2, a4, a3], [-b1, -b2, -b4, -b3]),
            Symmetry::S1 => ([b3, b4, b1, b2], [a3, a4, a1, a2]),
            Symmetry::S2 => ([-a2, -a1, -a3, -a4], [b2, b1, b3, b4]),
            Symmetry::S3 => ([-b4, -b3, -b2, -b1], [-a4, -a3, -a2, -a1]),
        };
        Self { a, b }
    }

    /// Time reversal `t -> -t`: swaps the two monomials of each equation.
    pub fn time_reverse(&self) -> Self {
        let [a1, a2, a3, a4] = self.a;
        let [b1, b2, b3, b4] = self.b;
        Self {
            a: [a2, a1, a4, a3],
            b: [b2, b1, b4, b3],
        }
    }

    /// Orbitally equivalent scheme obtained by multiplying the vector field
    /// with `exp(-a u - b v)`.
    pub fn shift_equivalent(&self, a: f64, b: f64) -> Self {
        Self {
            a: self.a.map(|x| x - a),
            b: self.b.map(|x| x - b),
        }
    }

    /// Scheme of the ODE in coordinates `(c u, c v)` with time rescaled.
    pub fn uniform_scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!(
                "scale factor must be positive, got {c}"
            )));
        }
        Ok(Self {
            a: self.a.map(|x| x / c),
            b: self.b.map(|x| x / c),
        })
    }
}

impl fmt::Display for ParameterScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4] = self.a;
        let [b1, b2, b3, b4] = self.b;
        write!(f, "({a1}, {a2}, {a3}, {a4}; {b1}, {b2}, {b3}, {b4})")
    }
}

/// Elements of the dihedral group of order eight acting on the `(u, v)`
/// plane: rotations `r0..r3` by multiples of 90 degrees and reflections
/// `s0..s3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetry {
    R0,
    R1,
    R2,
    R3,
    S0,
    S1,
    S2,
    S3,
}

impl Symmetry {
    pub const ALL: [Symmetry; 8] = [
        Symmetry::R0,
        Symmetry::R1,
        Symmetry::R2,
        Symmetry::R3,
        Symmetry::S0,
        Symmetry::S1,
        Symmetry::S2,
        Symmetry::S3,
    ];

    /// Row-major integer matrix acting on column vectors `(u, v)`.
    pub const fn matrix(self) -> [[i8; 2]; 2] {
        match self {
            Symmetry::R0 => [[1, 0], [0, 1]],
            Symmetry::R1 => [[0, -1], [1, 0]],
            Symmetry::R2 => [[-1, 0], [0, -1]],
            Symmetry::R3 => [[0, 1], [-1, 0]],
            Symmetry::S0 => [[1, 0], [0, -1]],
            Symmetry::S1 => [[0, 1], [1, 0]],
            Symmetry::S2 => [[-1, 0], [0, 1]],
            Symmetry::S3 => [[0, -1], [-1, 0]],
        }
    }

    pub fn from_matrix(m: [[i8; 2]; 2]) -> Option<Symmetry> {
        Symmetry::ALL.into_iter().find(|g| g.matrix() == m)
    }

    pub const fn tag(self) -> &'static str {
        match self {
            Symmetry::R0 => "r0",
            Symmetry::R1 => "r1",
            Symmetry::R2 => "r2",
            Symmetry::R3 => "r3",
            Symmetry::S0 => "s0",
            Symmetry::S1 => "s1",
            Symmetry::S2 => "s2",
            Symmetry::S3 => "s3",
        }
    }

    pub fn determinant(self) -> i8 {
        let m = self.matrix();
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// The element `g . h` (apply `h` first, then `g`).
    pub fn compose(self, h: Symmetry) -> Symmetry {
        let (p, q) = (self.matrix(), h.matrix());
        let mut m = [[0i8; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = p[i][0] * q[0][j] + p[i][1] * q[1][j];
            }
        }
        Symmetry::from_matrix(m).expect("the dihedral group is closed under composition")
    }

    /// Inverse element; the matrices are orthogonal so this is the transpose.
    pub fn inverse(self) -> Symmetry {
        let m = self.matrix();
        Symmetry::from_matrix([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
            .expect("transpose of a group element is a group element")
    }

    /// Image of a point under the matrix.
    pub fn apply_point(self, p: [f64; 2]) -> [f64; 2] {
        let m = self.matrix();
        [
            f64::from(m[0][0]) * p[0] + f64::from(m[0][1]) * p[1],
            f64::from(m[1][0]) * p[0] + f64::from(m[1][1]) * p[1],
        ]
    }
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Neg,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Pos,
}

impl Sign {
    /// Sign of `x`, treating `|x| <= tol` as zero.
    pub fn of(x: f64, tol: f64) -> Sign {
        if x > tol {
            Sign::Pos
        } else if x < -tol {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }
}

/// Concrete sign pattern of a 2x2 matrix, entries in the order
/// (1,1), (1,2), (2,1), (2,2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignMatrix(pub [Sign; 4]);

impl SignMatrix {
    pub fn of(m: [f64; 4], tol: f64) -> SignMatrix {
        SignMatrix(m.map(|x| Sign::of(x, tol)))
    }
}

impl fmt::Display for SignMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p, q, r, s] = self.0.map(Sign::symbol);
        write!(f, "({p},{q};{r},{s})")
    }
}

impl Serialize for SignMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A sign pattern that may contain wildcards (`None`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignPattern(pub [Option<Sign>; 4]);

impl SignPattern {
    pub const fn new(entries: [Option<Sign>; 4]) -> Self {
        Self(entries)
    }

    pub fn matches(&self, m: &SignMatrix) -> bool {
        self.0
            .iter()
            .zip(m.0.iter())
            .all(|(p, s)| p.is_none_or(|p| p == *s))
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [p, q, r, s] = self.0.map(|e| e.map_or('*', Sign::symbol));
        write!(f, "({p},{q};{r},{s})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ParameterScheme {
        ParameterScheme::new([1.0, 2.0, 3.0, 4.0], [5.0, 6.0, 7.0, 8.0]).unwrap()
    }

    #[test]
    fn identity_and_printed_schemes() {
        let s = sample();
        assert_eq!(s.apply_symmetry(Symmetry::R0), s);
        let r1 = s.apply_symmetry(Symmetry::R1);
        assert_eq!(r1.a, [-8.0, -7.0, -5.0, -6.0]);
        assert_eq!(r1.b, [4.0, 3.0, 1.0, 2.0]);
        let s1 = s.apply_symmetry(Symmetry::S1);
        assert_eq!(s1.a, [7.0, 8.0, 5.0, 6.0]);
        assert_eq!(s1.b, [3.0, 4.0, 1.0, 2.0]);
    }

    #[test]
    fn time_reversal() {
        let s = sample();
        let t = s.time_reverse();
        assert_eq!(t.a, [2.0, 1.0, 4.0, 3.0]);
        assert_eq!(t.b, [6.0, 5.0, 8.0, 7.0]);
        assert_eq!(t.time_reverse(), s);
        let sym = ParameterScheme::new([1.0, 1.0, 2.0, 2.0], [3.0, 3.0, 4.0, 4.0]).unwrap();
        assert_eq!(sym.time_reverse(), sym);
    }

    #[test]
    fn shift_and_scale() {
        let s = sample();
        let t = s.shift_equivalent(1.0, 5.0);
        assert_eq!(t.a, [0.0, 1.0, 2.0, 3.0]);
        assert_eq!(t.b, [0.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.shift_equivalent(0.0, 0.0), s);

        let d = ParameterScheme::new([2.0, 4.0, 6.0, 8.0], [2.0, 4.0, 6.0, 8.0]).unwrap();
        let h = d.uniform_scale(2.0).unwrap();
        assert_eq!(h.a, [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(d.uniform_scale(1.0).unwrap(), d);
        assert!(d.uniform_scale(0.0).is_err());
        assert!(d.uniform_scale(-1.0).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        assert!(ParameterScheme::new([f64::NAN, 0.0, 0.0, 0.0], [0.0; 4]).is_err());
        assert!(ParameterScheme::new([0.0; 4], [0.0, f64::INFINITY, 0.0, 0.0]).is_err());
    }

    #[test]
    fn compose_examples() {
        assert_eq!(Symmetry::R1.compose(Symmetry::R1), Symmetry::R2);
        assert_eq!(Symmetry::S1.compose(Symmetry::S1), Symmetry::R0);
        // [[0,-1],[1,0]] . [[1,0],[0,-1]] = [[0,1],[1,0]]
        assert_eq!(Symmetry::R1.compose(Symmetry::S0), Symmetry::S1);
    }

    #[test]
    fn matrices_are_orthogonal() {
        for g in Symmetry::ALL {
            let m = g.matrix();
            assert!(m.iter().flatten().all(|x| (-1..=1).contains(x)));
            assert_eq!(g.compose(g.inverse()), Symmetry::R0);
            let expected = if g.tag().starts_with('r') { 1 } else { -1 };
            assert_eq!(g.determinant(), expected, "{g}");
        }
    }

    /// Independent route: a scheme transforms by pushing each exponent vector
    /// `(a_i, b_i)` through the matrix and permuting/negating the equations.
    fn derived_action(s: &ParameterScheme, g: Symmetry) -> ParameterScheme {
        let m = g.matrix();
        let w: Vec<[f64; 2]> = (0..4).map(|i| g.apply_point([s.a[i], s.b[i]])).collect();
        let mut a = [0.0; 4];
        let mut b = [0.0; 4];
        for row in 0..2 {
            // New component `row` is m[row][col] times old component col.
            let col = if m[row][0] != 0 { 0 } else { 1 };
            let sign = m[row][col];
            let (plus, minus) = if sign > 0 {
                (2 * col, 2 * col + 1)
            } else {
                (2 * col + 1, 2 * col)
            };
            a[2 * row] = w[plus][0];
            b[2 * row] = w[plus][1];
            a[2 * row + 1] = w[minus][0];
            b[2 * row + 1] = w[minus][1];
        }
        ParameterScheme { a, b }
    }

    #[test]
    fn tables_agree_with_matrix_action() {
        let s = sample();
        for g in Symmetry::ALL {
            assert_eq!(s.apply_symmetry(g), derived_action(&s, g), "{g}");
        }
    }

    #[test]
    fn sign_pattern_wildcards() {
        use Sign::*;
        let p = SignPattern::new([Some(Neg), None, None, Some(Neg)]);
        assert!(p.matches(&SignMatrix([Neg, Pos, Zero, Neg])));
        assert!(!p.matches(&SignMatrix([Zero, Pos, Neg, Neg])));
        assert_eq!(p.to_string(), "(-,*;*,-)");
        assert_eq!(
            SignMatrix::of([0.0, 1.0, -1.0, -2.0], 1e-12).to_string(),
            "(0,+;-,-)"
        );
    }
}
