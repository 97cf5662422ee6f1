//! Adaptive integration with dense output: explicit Dormand-Prince 5(4) by
//! default, a linearly implicit Rosenbrock 4(3) method for stiff orbits.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scheme::ParameterScheme;

/// A smooth vector field on the plane.
pub trait PlanarField {
    fn eval(&self, x: [f64; 2]) -> [f64; 2];

    /// Largest exponent appearing in the field at `x`, used by the overflow
    /// guard. Fields without exponentials return `-inf`.
    fn max_exponent(&self, _x: [f64; 2]) -> f64 {
        f64::NEG_INFINITY
    }

    /// Row-major Jacobian at `x`; central differences unless overridden.
    fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let mut j = [[0.0; 2]; 2];
        for k in 0..2 {
            let d = f64::EPSILON.cbrt() * x[k].abs().max(1.0);
            let (mut p, mut m) = (x, x);
            p[k] += d;
            m[k] -= d;
            let (fp, fm) = (self.eval(p), self.eval(m));
            for i in 0..2 {
                j[i][k] = (fp[i] - fm[i]) / (2.0 * d);
            }
        }
        j
    }
}

impl PlanarField for ParameterScheme {
    #[inline]
    fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        self.field(x)
    }

    #[inline]
    fn max_exponent(&self, x: [f64; 2]) -> f64 {
        ParameterScheme::max_exponent(self, x)
    }

    fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        let e: [f64; 4] = std::array::from_fn(|i| self.exponent(i, x[0], x[1]).exp());
        let (a, b) = (self.a, self.b);
        [
            [a[0] * e[0] - a[1] * e[1], b[0] * e[0] - b[1] * e[1]],
            [a[2] * e[2] - a[3] * e[3], b[2] * e[2] - b[3] * e[3]],
        ]
    }
}

impl<T: PlanarField + ?Sized> PlanarField for &T {
    fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        (**self).eval(x)
    }

    fn max_exponent(&self, x: [f64; 2]) -> f64 {
        (**self).max_exponent(x)
    }

    fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        (**self).jacobian(x)
    }
}

/// Closure-backed field.
pub struct FnField<F>(pub F);

impl<F: Fn([f64; 2]) -> [f64; 2]> PlanarField for FnField<F> {
    fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        (self.0)(x)
    }
}

/// The field with time reversed.
pub struct Reversed<F>(pub F);

impl<F: PlanarField> PlanarField for Reversed<F> {
    fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let [p, q] = self.0.eval(x);
        [-p, -q]
    }

    fn max_exponent(&self, x: [f64; 2]) -> f64 {
        self.0.max_exponent(x)
    }

    fn jacobian(&self, x: [f64; 2]) -> [[f64; 2]; 2] {
        self.0.jacobian(x).map(|row| row.map(|v| -v))
    }
}

/// Same orbits as the scheme, traversed with the field divided by the sum of
/// its four monomials. Speeds stay below 2, so orbits that sweep through
/// regions with very large and very small exponents integrate at a steady
/// cost. Times are no longer physical times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitalField(pub ParameterScheme);

impl PlanarField for OrbitalField {
    fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let s = &self.0;
        let e: [f64; 4] = std::array::from_fn(|i| s.exponent(i, x[0], x[1]));
        let m = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w = e.map(|z| (z - m).exp());
        let total: f64 = w.iter().sum();
        [(w[0] - w[1]) / total, (w[2] - w[3]) / total]
    }
}

/// Same orbits as the scheme, with the field divided by the monomial sum of
/// whichever equation is slower at the current point, floored at
/// `exp(-SLOW_SCALE_GAP)` times the faster sum. The slow motion then has unit
/// speed, including slides along a nullcline of the fast equation, while runs
/// where one equation is overwhelmingly faster move at a bounded speed. The
/// fast component can be large, so pair with [`Method::Rosenbrock`]. Times
/// are no longer physical times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowScaledField(pub ParameterScheme);

/// Largest log-ratio of fast to slow speed kept by [`SlowScaledField`].
pub const SLOW_SCALE_GAP: f64 = 30.0;

impl PlanarField for SlowScaledField {
    fn eval(&self, x: [f64; 2]) -> [f64; 2] {
        let s = &self.0;
        let e: [f64; 4] = std::array::from_fn(|i| s.exponent(i, x[0], x[1]));
        let r = (0..4).fold(0, |r, i| if e[i] > e[r] { i } else { r });
        let e: [f64; 4] = std::array::from_fn(|i| s.exponent_gap(i, r, x[0], x[1]));
        let log_sum = |p: f64, q: f64| p.max(q) + (-(p - q).abs()).exp().ln_1p();
        let (lu, lv) = (log_sum(e[0], e[1]), log_sum(e[2], e[3]));
        let ln_n = lu.min(lv).max(lu.max(lv) - SLOW_SCALE_GAP);
        let w = e.map(|z| (z - ln_n).exp());
        [w[0] - w[1], w[2] - w[3]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Explicit Dormand-Prince 5(4).
    #[default]
    DormandPrince,
    /// Linearly implicit Rosenbrock 4(3) (Shampine's coefficients); for
    /// orbits that run along a nullcline where one exponential is huge.
    Rosenbrock,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_time: f64,
    /// Trajectories leaving this Euclidean radius terminate as `Escaped`.
    pub escape_radius: f64,
    /// Trajectories on which an exponent exceeds this cap terminate as
    /// `Overflow`.
    pub overflow_guard: f64,
    /// Hard cap on accepted plus rejected steps.
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self::oracle()
    }
}

impl IntegratorOptions {
    /// Tight tolerances for numerical verification.
    pub fn oracle() -> Self {
        Self {
            method: Method::DormandPrince,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: f64::INFINITY,
            max_time: 1e4,
            escape_radius: 1e3,
            overflow_guard: 700.0,
            max_steps: 5_000_000,
        }
    }

    /// Loose tolerances for drawing.
    pub fn portrait() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            max_time: 50.0,
            escape_radius: 50.0,
            ..Self::oracle()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x > 0.0 && !x.is_nan();
        if !(pos(self.rel_tol)
            && pos(self.abs_tol)
            && self.rel_tol.is_finite()
            && self.abs_tol.is_finite())
        {
            return Err(Error::Domain(
                "tolerances must be positive and finite".into(),
            ));
        }
        if !pos(self.escape_radius) || !pos(self.max_step) || !pos(self.max_time) {
            return Err(Error::Domain(
                "escape radius, max step and max time must be positive".into(),
            ));
        }
        if self.overflow_guard.is_nan() || self.max_steps == 0 {
            return Err(Error::Domain(
                "overflow guard must be a number and max_steps nonzero".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Termination {
    TimeLimit,
    ConvergedToOrigin,
    Escaped,
    Overflow,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Termination::TimeLimit => "TimeLimit",
            Termination::ConvergedToOrigin => "ConvergedToOrigin",
            Termination::Escaped => "Escaped",
            Termination::Overflow => "Overflow",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> Sample {
        *self
            .samples
            .last()
            .expect("trajectories hold at least the initial sample")
    }

    /// CSV with header `t,u,v` and a trailing `# termination=...` comment.
    /// Floats use the shortest representation that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(32 * self.samples.len() + 40);
        out.push_str("t,u,v\n");
        for s in &self.samples {
            out.push_str(&format!("{},{},{}\n", s.t, s.u, s.v));
        }
        out.push_str(&format!("# termination={}\n", self.termination));
        out
    }
}

/// Step-size underflow or step budget exhaustion, with everything computed
/// up to that point.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationFailure {
    pub t: f64,
    pub reason: String,
    pub partial: Vec<Sample>,
}

impl fmt::Display for IntegrationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "integration failed at t = {}: {}", self.t, self.reason)
    }
}

impl std::error::Error for IntegrationFailure {}

impl From<IntegrationFailure> for Error {
    fn from(e: IntegrationFailure) -> Self {
        Error::Integration {
            t: e.t,
            reason: e.reason,
        }
    }
}

// Dormand-Prince 5(4) tableau; the field is autonomous so the nodes c_i
// are not needed.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const GAM: f64 = 0.5;
const RA21: f64 = 2.0;
const RA31: f64 = 48.0 / 25.0;
const RA32: f64 = 6.0 / 25.0;
const RC21: f64 = -8.0;
const RC31: f64 = 372.0 / 25.0;
const RC32: f64 = 12.0 / 5.0;
const RC41: f64 = -112.0 / 125.0;
const RC42: f64 = -54.0 / 125.0;
const RC43: f64 = -2.0 / 5.0;
const RB: [f64; 4] = [19.0 / 9.0, 1.0 / 2.0, 25.0 / 108.0, 125.0 / 108.0];
const RE: [f64; 4] = [17.0 / 54.0, 7.0 / 36.0, 0.0, 125.0 / 108.0];

#[inline]
fn axpy(x: [f64; 2], terms: &[(f64, [f64; 2])]) -> [f64; 2] {
    let mut y = x;
    for &(c, k) in terms {
        y[0] += c * k[0];
        y[1] += c * k[1];
    }
    y
}

#[inline]
pub(crate) fn norm(x: [f64; 2]) -> f64 {
    x[0].hypot(x[1])
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    r: [[f64; 2]; 5],
}

impl DenseStep {
    /// Interpolated state at `t0 + theta h`, `theta` in `[0, 1]`.
    pub fn eval(&self, theta: f64) -> [f64; 2] {
        let [r1, r2, r3, r4, r5] = self.r;
        let s = 1.0 - theta;
        std::array::from_fn(|i| r1[i] + theta * (r2[i] + s * (r3[i] + theta * (r4[i] + s * r5[i]))))
    }

    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }
}

/// Stepping state shared by every driver in this module.
pub(crate) struct Stepper<'a, F: PlanarField + ?Sized> {
    field: &'a F,
    opts: &'a IntegratorOptions,
    pub t: f64,
    pub x: [f64; 2],
    f: [f64; 2],
    h: f64,
    steps: usize,
    pub dense: Option<DenseStep>,
    /// The last failure was loss of time resolution.
    underflow: bool,
}

pub(crate) enum Event {
    Continue,
    Stop(Termination),
}

impl<'a, F: PlanarField + ?Sized> Stepper<'a, F> {
    pub fn new(field: &'a F, x0: [f64; 2], opts: &'a IntegratorOptions) -> Self {
        let f = field.eval(x0);
        let mut st = Self {
            field,
            opts,
            t: 0.0,
            x: x0,
            f,
            h: 0.0,
            steps: 0,
            dense: None,
            underflow: false,
        };
        st.h = st.initial_step();
        st
    }

    fn scale(&self, x: [f64; 2], y: [f64; 2], i: usize) -> f64 {
        self.opts.abs_tol + self.opts.rel_tol * x[i].abs().max(y[i].abs())
    }

    fn rms(&self, v: [f64; 2], x: [f64; 2], y: [f64; 2]) -> f64 {
        let a = v[0] / self.scale(x, y, 0);
        let b = v[1] / self.scale(x, y, 1);
        ((a * a + b * b) / 2.0).sqrt()
    }

    fn initial_step(&self) -> f64 {
        let x = self.x;
        let d0 = self.rms(x, x, x);
        let d1 = self.rms(self.f, x, x);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        let h0 = h0.min(self.opts.max_step);
        let x1 = axpy(x, &[(h0, self.f)]);
        let f1 = self.field.eval(x1);
        let d2 = self.rms([f1[0] - self.f[0], f1[1] - self.f[1]], x, x) / h0;
        let m = d1.max(d2);
        let h1 = if !m.is_finite() {
            h0 * 1e-3
        } else if m <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / m).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.opts.max_step)
    }

    /// Termination test at the current state.
    pub fn check(&self) -> Event {
        let o = self.opts;
        let x = self.x;
        if self.field.max_exponent(x) > o.overflow_guard || !x[0].is_finite() || !x[1].is_finite() {
            return Event::Stop(Termination::Overflow);
        }
        let r = norm(x);
        if r > o.escape_radius {
            return Event::Stop(Termination::Escaped);
        }
        // a start exactly at the equilibrium counts as converged
        if r == 0.0 || (r < 10.0 * o.abs_tol && -(self.f[0] * x[0] + self.f[1] * x[1]) > 0.0) {
            return Event::Stop(Termination::ConvergedToOrigin);
        }
        if self.t >= o.max_time {
            return Event::Stop(Termination::TimeLimit);
        }
        Event::Continue
    }

    /// Takes one accepted step, ending no later than `max_time`.
    pub fn step(&mut self) -> std::result::Result<(), (f64, String)> {
        match self.opts.method {
            Method::DormandPrince => self.step_dp5(),
            Method::Rosenbrock => self.step_rosenbrock(),
        }
    }

    /// Step size for the next attempt, or the reason to give up.
    fn next_h(&mut self) -> std::result::Result<(f64, bool), (f64, String)> {
        let o = self.opts;
        self.steps += 1;
        if self.steps > o.max_steps {
            return Err((self.t, format!("step budget of {} exhausted", o.max_steps)));
        }
        let remaining = o.max_time - self.t;
        let mut h = self.h.min(o.max_step);
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        // time no longer advances in floating point
        if h <= 4.0 * f64::EPSILON * self.t.abs() || h < f64::MIN_POSITIVE {
            self.underflow = true;
            return Err((self.t, format!("step size underflow (h = {h:e})")));
        }
        Ok((h, last))
    }

    fn accept(
        &mut self,
        h: f64,
        last: bool,
        fac: f64,
        y: [f64; 2],
        fy: [f64; 2],
        r: [[f64; 2]; 5],
    ) {
        self.dense = Some(DenseStep { t0: self.t, h, r });
        self.t = if last { self.opts.max_time } else { self.t + h };
        self.x = y;
        self.f = fy;
        // Keep the proposed size when the final step was clipped.
        self.h = if last { self.h.max(h * fac) } else { h * fac };
    }

    fn step_rosenbrock(&mut self) -> std::result::Result<(), (f64, String)> {
        let (x, f0) = (self.x, self.f);
        let j = self.field.jacobian(x);
        let mut reject_prev = false;
        loop {
            let (h, last) = self.next_h()?;
            // (I / (gamma h) - J)^-1 r, solved as (I - gamma h J)^-1 (gamma h r)
            // so that huge steps do not underflow the determinant
            let gh = GAM * h;
            let w = [
                [1.0 - gh * j[0][0], -gh * j[0][1]],
                [-gh * j[1][0], 1.0 - gh * j[1][1]],
            ];
            let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
            let solve = |r: [f64; 2]| -> [f64; 2] {
                let r = [gh * r[0], gh * r[1]];
                [
                    (w[1][1] * r[0] - w[0][1] * r[1]) / det,
                    (w[0][0] * r[1] - w[1][0] * r[0]) / det,
                ]
            };
            let fe = |y| self.field.eval(y);
            let g1 = solve(f0);
            let f2 = fe(axpy(x, &[(RA21, g1)]));
            let g2 = solve(axpy(f2, &[(RC21 / h, g1)]));
            let f3 = fe(axpy(x, &[(RA31, g1), (RA32, g2)]));
            let g3 = solve(axpy(f3, &[(RC31 / h, g1), (RC32 / h, g2)]));
            let g4 = solve(axpy(f3, &[(RC41 / h, g1), (RC42 / h, g2), (RC43 / h, g3)]));
            let g = [g1, g2, g3, g4];
            let y = axpy(x, &std::array::from_fn::<_, 4, _>(|k| (RB[k], g[k])));
            let errv = axpy([0.0; 2], &std::array::from_fn::<_, 4, _>(|k| (RE[k], g[k])));
            let err = self.rms(errv, x, y);
            let fy = fe(y);
            let finite =
                det != 0.0 && err.is_finite() && fy.iter().chain(&y).all(|v| v.is_finite());
            if !finite {
                self.h = h * 0.2;
                reject_prev = true;
                continue;
            }
            let mut fac = if err == 0.0 {
                6.0
            } else {
                0.9 * err.powf(-0.25)
            };
            fac = fac.clamp(0.2, 6.0);
            if err <= 1.0 {
                if reject_prev {
                    fac = fac.min(1.0);
                }
                // cubic Hermite interpolant in the same nested form
                let r2: [f64; 2] = std::array::from_fn(|i| y[i] - x[i]);
                let r3: [f64; 2] = std::array::from_fn(|i| h * f0[i] - r2[i]);
                let r4: [f64; 2] = std::array::from_fn(|i| r2[i] - h * fy[i] - r3[i]);
                self.accept(h, last, fac, y, fy, [x, r2, r3, r4, [0.0; 2]]);
                return Ok(());
            }
            self.h = h * fac.min(1.0);
            reject_prev = true;
        }
    }

    fn step_dp5(&mut self) -> std::result::Result<(), (f64, String)> {
        let mut reject_prev = false;
        loop {
            let (h, last) = self.next_h()?;
            let (x, k1) = (self.x, self.f);
            let fe = |y| self.field.eval(y);
            let k2 = fe(axpy(x, &[(h * A21, k1)]));
            let k3 = fe(axpy(x, &[(h * A31, k1), (h * A32, k2)]));
            let k4 = fe(axpy(x, &[(h * A41, k1), (h * A42, k2), (h * A43, k3)]));
            let k5 = fe(axpy(
                x,
                &[(h * A51, k1), (h * A52, k2), (h * A53, k3), (h * A54, k4)],
            ));
            let k6 = fe(axpy(
                x,
                &[
                    (h * A61, k1),
                    (h * A62, k2),
                    (h * A63, k3),
                    (h * A64, k4),
                    (h * A65, k5),
                ],
            ));
            let y = axpy(
                x,
                &[
                    (h * A71, k1),
                    (h * A73, k3),
                    (h * A74, k4),
                    (h * A75, k5),
                    (h * A76, k6),
                ],
            );
            let k7 = fe(y);
            let errv: [f64; 2] = std::array::from_fn(|i| {
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
            });
            let err = self.rms(errv, x, y);
            let finite = err.is_finite() && k7[0].is_finite() && k7[1].is_finite();
            if !finite {
                self.h = h * 0.2;
                reject_prev = true;
                continue;
            }
            let mut fac = if err == 0.0 {
                10.0
            } else {
                0.9 * err.powf(-0.2)
            };
            fac = fac.clamp(0.2, 10.0);
            if err <= 1.0 {
                if reject_prev {
                    fac = fac.min(1.0);
                }
                let r2: [f64; 2] = std::array::from_fn(|i| y[i] - x[i]);
                let r3: [f64; 2] = std::array::from_fn(|i| h * k1[i] - r2[i]);
                let r4: [f64; 2] = std::array::from_fn(|i| r2[i] - h * k7[i] - r3[i]);
                let r5: [f64; 2] = std::array::from_fn(|i| {
                    h * (D1 * k1[i]
                        + D3 * k3[i]
                        + D4 * k4[i]
                        + D5 * k5[i]
                        + D6 * k6[i]
                        + D7 * k7[i])
                });
                self.accept(h, last, fac, y, k7, [x, r2, r3, r4, r5]);
                return Ok(());
            }
            self.h = h * fac.min(1.0);
            reject_prev = true;
        }
    }
}

/// Integrates the field from `x0` until one of the termination events.
pub fn integrate<F: PlanarField + ?Sized>(
    field: &F,
    x0: [f64; 2],
    opts: &IntegratorOptions,
) -> std::result::Result<Trajectory, IntegrationFailure> {
    let fail =
        |t: f64, reason: String, partial: Vec<Sample>| IntegrationFailure { t, reason, partial };
    if let Err(e) = opts.validate() {
        return Err(fail(0.0, e.to_string(), Vec::new()));
    }
    if !x0[0].is_finite() || !x0[1].is_finite() {
        return Err(fail(0.0, "non-finite initial condition".into(), Vec::new()));
    }
    let mut st = Stepper::new(field, x0, opts);
    let mut samples = vec![Sample {
        t: 0.0,
        u: x0[0],
        v: x0[1],
    }];
    loop {
        if let Event::Stop(termination) = st.check() {
            return Ok(Trajectory {
                samples,
                termination,
            });
        }
        if let Err((t, reason)) = st.step() {
            return Err(fail(t, reason, samples));
        }
        samples.push(Sample {
            t: st.t,
            u: st.x[0],
            v: st.x[1],
        });
    }
}

/// Where an orbit goes, without its time history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitFate {
    /// `TimeLimit` only when every chunk ran out of time.
    pub termination: Termination,
    pub end: [f64; 2],
    /// Number of clock restarts.
    pub restarts: usize,
}

/// Follows the orbit through `x0` in chunks of at most `opts.max_time`,
/// restarting the clock from the current point whenever a chunk ends or the
/// step size falls below the resolution of the clock. The clock only limits
/// how finely late parts of an orbit can be resolved; resetting it lets
/// orbits with transients of wildly different speeds run to their end.
///
/// A restart that made no progress at all is reported as a failure whose
/// `partial` holds the point where the orbit stalled.
pub fn orbit_fate<F: PlanarField + ?Sized>(
    field: &F,
    x0: [f64; 2],
    opts: &IntegratorOptions,
    max_restarts: usize,
) -> std::result::Result<OrbitFate, IntegrationFailure> {
    let fail =
        |t: f64, reason: String, partial: Vec<Sample>| IntegrationFailure { t, reason, partial };
    opts.validate()
        .map_err(|e| fail(0.0, e.to_string(), Vec::new()))?;
    let mut x = x0;
    for restarts in 0..=max_restarts {
        let mut st = Stepper::new(field, x, opts);
        loop {
            match st.check() {
                Event::Stop(Termination::TimeLimit) => break,
                Event::Stop(termination) => {
                    return Ok(OrbitFate {
                        termination,
                        end: st.x,
                        restarts,
                    })
                }
                Event::Continue => {}
            }
            if let Err((t, reason)) = st.step() {
                if !st.underflow || t == 0.0 {
                    let [u, v] = st.x;
                    return Err(fail(t, reason, vec![Sample { t, u, v }]));
                }
                break;
            }
        }
        x = st.x;
    }
    Ok(OrbitFate {
        termination: Termination::TimeLimit,
        end: x,
        restarts: max_restarts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Convergence {
    Yes,
    /// Left the escape radius or hit the overflow guard.
    No(Termination),
    Undecided,
}

pub fn converges_to_origin<F: PlanarField + ?Sized>(
    field: &F,
    x0: [f64; 2],
    opts: &IntegratorOptions,
) -> Result<Convergence> {
    let tr = integrate(field, x0, opts)?;
    Ok(match tr.termination {
        Termination::ConvergedToOrigin => Convergence::Yes,
        Termination::Escaped | Termination::Overflow => Convergence::No(tr.termination),
        Termination::TimeLimit => Convergence::Undecided,
    })
}
