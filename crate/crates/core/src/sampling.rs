//! Seeded random generators for schemes with prescribed structure.
//!
//! Used by property tests and by the verification sweeps; every draw is
//! reproducible from the seed.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::classify::{jacobian, CenterCase, StableBranch};
use crate::forms::Mat2;
use crate::scheme::ParameterScheme;

/// Center families that can be sampled; `R12` lies in both reversible
/// families at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CenterFamily {
    Case(CenterCase),
    R12,
}

impl CenterFamily {
    pub const ALL: [CenterFamily; 8] = [
        CenterFamily::Case(CenterCase::S),
        CenterFamily::Case(CenterCase::I1),
        CenterFamily::Case(CenterCase::I2),
        CenterFamily::Case(CenterCase::I3),
        CenterFamily::Case(CenterCase::I4),
        CenterFamily::Case(CenterCase::R1),
        CenterFamily::Case(CenterCase::R2),
        CenterFamily::R12,
    ];
}

pub struct Sampler {
    rng: StdRng,
    /// Free parameters are drawn from `[-magnitude, magnitude]`.
    pub magnitude: f64,
    /// Minimal `det J` accepted for weak foci and centers.
    pub min_det: f64,
}

const MAX_TRIES: usize = 100_000;

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: StdRng::seed_from_u64(seed),
            magnitude: 2.0,
            min_det: 0.05,
        }
    }

    pub fn with_magnitude(mut self, m: f64) -> Self {
        self.magnitude = m;
        self
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    fn free(&mut self) -> f64 {
        let m = self.magnitude;
        self.uniform(-m, m)
    }

    /// Strictly positive value in `[lo, magnitude]`.
    fn pos(&mut self, lo: f64) -> f64 {
        let m = self.magnitude.max(2.0 * lo);
        self.uniform(lo, m)
    }

    pub fn gamma(&mut self) -> [f64; 2] {
        [self.uniform(0.2, 3.0), self.uniform(0.2, 3.0)]
    }

    fn shifted(&mut self, s: ParameterScheme) -> ParameterScheme {
        let (a, b) = (self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0));
        s.shift_equivalent(a, b)
    }

    fn accept_focus(&self, s: &ParameterScheme) -> bool {
        jacobian(s).det() >= self.min_det
    }

    /// Uniform-entry scheme, no structure.
    pub fn generic_scheme(&mut self) -> ParameterScheme {
        ParameterScheme {
            a: std::array::from_fn(|_| self.free()),
            b: std::array::from_fn(|_| self.free()),
        }
    }

    /// Normalized (`a1 = b1 = 0`) scheme of the family with zero trace.
    fn normalized_center(&mut self, fam: CenterFamily) -> ParameterScheme {
        let mut x = || self.free();
        let (a, b) = match fam {
            CenterFamily::Case(CenterCase::S) => {
                let (a3, a4, b2, b3) = (x(), x(), x(), x());
                ([0.0, 0.0, a3, a4], [0.0, b2, b3, b3])
            }
            CenterFamily::Case(CenterCase::I1) => {
                let (a4, b2, b4) = (x(), x(), x());
                ([0.0, -b4, 0.0, a4], [0.0, b2, 0.0, b4])
            }
            CenterFamily::Case(CenterCase::I2) => {
                let (a3, b2, b3) = (x(), x(), x());
                ([0.0, b3, a3, 0.0], [0.0, b2, b3, 0.0])
            }
            CenterFamily::Case(CenterCase::I3) => {
                let (a3, b2, b3) = (x(), x(), x());
                let a2 = b3 - b2;
                ([0.0, a2, a3, a2], [0.0, b2, b3, b2])
            }
            CenterFamily::Case(CenterCase::I4) => {
                let (a4, b2, b4) = (x(), x(), x());
                let a2 = b2 - b4;
                ([0.0, a2, a2, a4], [0.0, b2, b2, b4])
            }
            CenterFamily::Case(CenterCase::R1) => {
                let (b2, b3, b4) = (x(), x(), x());
                let a2 = b3 - b4;
                ([0.0, a2, a2 + b2 - b3, -b4], [0.0, b2, b3, b4])
            }
            CenterFamily::Case(CenterCase::R2) => {
                let (b2, b3, b4) = (x(), x(), x());
                let a2 = b3 - b4;
                ([0.0, a2, b3, a2 - b2 + b4], [0.0, b2, b3, b4])
            }
            CenterFamily::R12 => {
                let q = x();
                let r = -q.signum() * x().abs();
                ([0.0, q + r, r, q], [0.0, r - q, r, -q])
            }
        };
        ParameterScheme { a, b }
    }

    /// Random shifted scheme inside a center family, `det J >= min_det`.
    pub fn center_scheme(&mut self, fam: CenterFamily) -> ParameterScheme {
        for _ in 0..MAX_TRIES {
            let s = self.normalized_center(fam);
            if self.accept_focus(&s) {
                return self.shifted(s);
            }
        }
        panic!("no center scheme of family {fam:?} after {MAX_TRIES} draws");
    }

    /// Random shifted weak focus (`tr J = 0`, `det J >= min_det`).
    pub fn weak_focus(&mut self) -> ParameterScheme {
        for _ in 0..MAX_TRIES {
            let (a3, a4, b2, b3, b4) = (
                self.free(),
                self.free(),
                self.free(),
                self.free(),
                self.free(),
            );
            let s = ParameterScheme {
                a: [0.0, b3 - b4, a3, a4],
                b: [0.0, b2, b3, b4],
            };
            if self.accept_focus(&s) {
                return self.shifted(s);
            }
        }
        panic!("no weak focus after {MAX_TRIES} draws");
    }

    /// Weak focus at distance at least `margin` from every center family
    /// (by the largest residual of the defining equalities).
    pub fn weak_focus_non_center(&mut self, margin: f64) -> ParameterScheme {
        for _ in 0..MAX_TRIES {
            let s = self.weak_focus();
            let far = CenterCase::ALL
                .iter()
                .all(|c| c.residuals(&s).iter().any(|r| r.abs() >= margin));
            if far {
                return s;
            }
        }
        panic!("no non-center weak focus after {MAX_TRIES} draws");
    }

    /// Kinetic orders `(G, H)` whose unit-gamma scheme satisfies the sign
    /// pattern and exponent chain of `branch`; `det J >= min_det`.
    pub fn stable_pair(&mut self, branch: StableBranch) -> (Mat2, Mat2) {
        self.branch_pair(branch, true)
    }

    /// Same sign pattern as [`Self::stable_pair`] (locally stable for every
    /// `gamma`) but with the exponent chain violated. `branch` must not be
    /// `A`, which has no chain.
    pub fn chain_violating_pair(&mut self, branch: StableBranch) -> (Mat2, Mat2) {
        assert!(branch != StableBranch::A, "branch A has no exponent chain");
        self.branch_pair(branch, false)
    }

    /// Three values `lo < mid < hi` with gaps of at least `0.1`, placed
    /// around `centre` so that `centre` is in `[lo, hi]` when `inside`, and
    /// strictly outside otherwise.
    fn chain(&mut self, centre: f64, inside: bool) -> (f64, f64) {
        let (d1, d2) = (self.pos(0.1), self.pos(0.1));
        if inside {
            // allow equality at either end now and then
            let lo = if self.uniform(0.0, 1.0) < 0.15 {
                centre
            } else {
                centre - d1
            };
            let hi = if lo < centre && self.uniform(0.0, 1.0) < 0.15 {
                centre
            } else {
                centre + d2
            };
            (lo, hi)
        } else if self.uniform(0.0, 1.0) < 0.5 {
            (centre + d1, centre + d1 + d2)
        } else {
            (centre - d1 - d2, centre - d1)
        }
    }

    fn branch_pair(&mut self, branch: StableBranch, chain_ok: bool) -> (Mat2, Mat2) {
        for _ in 0..MAX_TRIES {
            let s = match branch {
                StableBranch::A => {
                    let (a1, b3) = (self.free(), self.free());
                    let (a2, b4) = (a1 + self.pos(0.1), b3 + self.pos(0.1));
                    let (a3, a4, b1, b2) = (self.free(), self.free(), self.free(), self.free());
                    ParameterScheme {
                        a: [a1, a2, a3, a4],
                        b: [b1, b2, b3, b4],
                    }
                }
                StableBranch::B | StableBranch::C => {
                    // j11 = 0, j22 < 0; B: j12 > 0, j21 < 0 with a3 <= a1 <= a4
                    let a1 = self.free();
                    let (lo, hi) = self.chain(a1, chain_ok);
                    let (b1, b3) = (self.free(), self.free());
                    let (d12, d34) = (self.pos(0.1), self.pos(0.1));
                    if branch == StableBranch::B {
                        ParameterScheme {
                            a: [a1, a1, lo, hi],
                            b: [b1, b1 - d12, b3, b3 + d34],
                        }
                    } else {
                        ParameterScheme {
                            a: [a1, a1, hi, lo],
                            b: [b1, b1 + d12, b3, b3 + d34],
                        }
                    }
                }
                StableBranch::D | StableBranch::E => {
                    // j22 = 0, j11 < 0; D: j12 < 0, j21 > 0 with b1 <= b3 <= b2
                    let b3 = self.free();
                    let (lo, hi) = self.chain(b3, chain_ok);
                    let (a1, a3) = (self.free(), self.free());
                    let (d12, d34) = (self.pos(0.1), self.pos(0.1));
                    if branch == StableBranch::D {
                        ParameterScheme {
                            a: [a1, a1 + d12, a3, a3 - d34],
                            b: [lo, hi, b3, b3],
                        }
                    } else {
                        ParameterScheme {
                            a: [a1, a1 + d12, a3, a3 + d34],
                            b: [hi, lo, b3, b3],
                        }
                    }
                }
            };
            if self.accept_focus(&s) {
                return s.unit_gamma_exponents();
            }
        }
        panic!("no pair for branch {branch:?} after {MAX_TRIES} draws");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{
        boundedness_status, center_cases, global_stability_all_gamma, BoundednessStatus,
        Linearization, StabilityVerdict,
    };
    use crate::Tolerance;

    const TOL: Tolerance = Tolerance {
        eq: 1e-12,
        det: 1e-12,
    };

    #[test]
    fn centers_land_in_their_family() {
        let mut smp = Sampler::new(1);
        for fam in CenterFamily::ALL {
            for _ in 0..50 {
                let s = smp.center_scheme(fam);
                let cases = center_cases(&s, &TOL).unwrap();
                match fam {
                    CenterFamily::Case(c) => assert!(cases.contains(&c), "{fam:?} {s}"),
                    CenterFamily::R12 => {
                        assert!(
                            cases.contains(&CenterCase::R1) && cases.contains(&CenterCase::R2),
                            "{s}"
                        )
                    }
                }
            }
        }
    }

    #[test]
    fn non_centers_are_weak_foci() {
        let mut smp = Sampler::new(2);
        for _ in 0..100 {
            let s = smp.weak_focus_non_center(0.05);
            assert!(Linearization::of(&s, &TOL).weak_focus());
            assert!(center_cases(&s, &TOL).unwrap().is_empty());
        }
    }

    #[test]
    fn branch_pairs_match_verdicts() {
        let mut smp = Sampler::new(3);
        for br in StableBranch::ALL {
            for _ in 0..50 {
                let (g, h) = smp.stable_pair(br);
                assert_eq!(
                    global_stability_all_gamma(&g, &h, &TOL).unwrap(),
                    StabilityVerdict::GloballyStableAllGamma(br)
                );
                if br != StableBranch::A {
                    let (g, h) = smp.chain_violating_pair(br);
                    let v = global_stability_all_gamma(&g, &h, &TOL).unwrap();
                    assert!(
                        matches!(v, StabilityVerdict::NotForAllGamma(_)),
                        "{br:?}: {v:?}"
                    );
                    let s = ParameterScheme::from_exponents_unit_gamma(&g, &h);
                    assert!(matches!(
                        boundedness_status(&s, &TOL).unwrap(),
                        BoundednessStatus::Unbounded(_)
                    ));
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let a: Vec<_> = (0..5).map(|_| Sampler::new(9).generic_scheme()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
    }
}
